//! Entangled pairs, fixed-parity site bases and projective measurement.

pub mod measure;
pub mod probe;
pub mod standard;

use std::sync::Arc;

use num_complex::Complex64;

use crate::encoding::{encoded_map_operator, LogicalWire};
use crate::error::{Error, Result};
use crate::fermion::{FermionOperator, FockState, ModeRegistry};
use crate::linalg::{self, CMatrix, SQRT_HALF};

pub use measure::{measure, measure_forced, measure_with, probabilities, project_all, Outcome, Selection};
pub use probe::{build_basis, occupation_basis, product_basis, OutputPair, PairRef, SiteLayout};

/// `(1 + a_i† a_j†)|Ω⟩/√2`.
pub fn make_bond(registry: Arc<ModeRegistry>, i: usize, j: usize) -> Result<FockState> {
    if i == j {
        return Err(Error::InvalidArgument("bond endpoints must differ".into()));
    }
    if i >= registry.len() || j >= registry.len() {
        return Err(Error::InvalidArgument("bond endpoint outside the registry".into()));
    }
    let pair = FockState::created(registry.clone(), &[i, j], Complex64::new(SQRT_HALF, 0.0));
    FockState::vacuum(registry).scaled(Complex64::new(SQRT_HALF, 0.0)).add_scaled(&pair, Complex64::new(1.0, 0.0))
}

/// Per-outcome record of a basis vector.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeInfo {
    /// Parity of every designated pair (active pairs first, then spectators).
    pub pair_parities: Vec<u8>,
    pub total_parity: u8,
    pub in_sectors: Vec<u8>,
    pub out_sectors: Vec<u8>,
    /// Logical map teleported onto the partner pairs by this outcome.
    pub realized: CMatrix,
    /// Index into the decoration family; 0 is the undecorated target.
    pub decoration: usize,
}

/// Complete orthonormal basis of one site.
#[derive(Debug, Clone)]
pub struct MeasurementBasis {
    pub site_modes: Arc<ModeRegistry>,
    pub vectors: Vec<FockState>,
    pub outcomes: Vec<OutcomeInfo>,
    /// Logical map of the distinguished outcome.
    pub target: CMatrix,
    pub designated: Vec<PairRef>,
    /// Partner pairs of the outputs, in logical order.
    pub partners: Vec<PairRef>,
}

impl MeasurementBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// By-product `B` with `realized = B · target`, when the target is square
    /// and invertible.
    pub fn byproduct_matrix(&self, k: usize) -> Option<CMatrix> {
        if self.target.nrows() != self.target.ncols() {
            return None;
        }
        let inv = self.target.clone().try_inverse()?;
        Some(&self.outcomes[k].realized * inv)
    }

    /// By-product of outcome `k` as an operator on the partner modes, mapping
    /// the even encoding of the intended output to the realized one.
    pub fn byproduct(&self, k: usize) -> Result<Option<FermionOperator>> {
        let Some(b) = self.byproduct_matrix(k) else { return Ok(None) };
        if self.partners.is_empty() {
            return Ok(None);
        }
        let mut labels: Vec<_> = self.partners.iter().flat_map(|p| [p.info, p.parity]).collect();
        labels.sort();
        let reg = ModeRegistry::new(labels)?.arc();
        let wires = |sectors: &[u8]| -> Result<Vec<LogicalWire>> {
            self.partners
                .iter()
                .zip(sectors)
                .map(|(p, &s)| Ok(LogicalWire::new(reg.require(&p.info)?, reg.require(&p.parity)?).with_sector(s)))
                .collect()
        };
        let zero = vec![0u8; self.partners.len()];
        let input = wires(&zero)?;
        let output = wires(&self.outcomes[k].out_sectors)?;
        Ok(Some(encoded_map_operator(&b, &input, &output, &reg)?))
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate().skip(i) {
                let ip = a.inner(b).unwrap_or_default();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - Complex64::new(want, 0.0)).norm());
            }
        }
        worst
    }

    /// Largest deviation of `Σ|φ_k⟩⟨φ_k|` from the identity (dense check).
    pub fn completeness_error(&self) -> f64 {
        let dim = 1usize << self.site_modes.len();
        let mut acc = CMatrix::zeros(dim, dim);
        for v in &self.vectors {
            for (r, a) in v.amplitudes() {
                for (c, b) in v.amplitudes() {
                    acc[(*r as usize, *c as usize)] += a * b.conj();
                }
            }
        }
        linalg::max_abs(&(acc - CMatrix::identity(dim, dim)))
    }
}
