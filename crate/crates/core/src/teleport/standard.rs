//! The two small teleportation gadgets with modes numbered from 1.
//!
//! Single-wire gadget (6 modes): the input qubit sits on `(1, 3)`, site modes
//! are `1..=4`, and bonds `(2, 5)`, `(4, 6)` carry the output to `(5, 6)`.
//!
//! Two-wire gadget (16 modes): the top site `1..=6` holds the control on
//! `(1, 3)`, the bottom site `7..=12` holds the target on `(9, 11)`. Bonds
//! `(2, 13)`, `(4, 14)`, `(10, 15)`, `(12, 16)` lead to the outputs and
//! `(5, 7)`, `(6, 8)` link the sites.

use std::sync::Arc;

use num_complex::Complex64;

use super::{build_basis, occupation_basis, MeasurementBasis, OutputPair, PairRef, SiteLayout};
use crate::encoding::{encode, LogicalWire};
use crate::error::{Error, Result};
use crate::fermion::{FermionOperator, FockState, ModeLabel, ModeRegistry};
use crate::linalg::{self, re, CMatrix};

fn m(k: u32) -> ModeLabel {
    ModeLabel::free(k)
}

fn pair(i: u32, p: u32) -> PairRef {
    PairRef::new(m(i), m(p))
}

/// Registry of modes `1..=n` in numeric order.
pub fn numbered_from_one(n: u32) -> Arc<ModeRegistry> {
    ModeRegistry::new((1..=n).map(m).collect()).expect("small registry").arc()
}

/// Applies `Π (1 + a_i† a_j†)/√2` over `bonds` (1-based) in the given order.
fn attach_bonds(s: &FockState, bonds: &[(u32, u32)]) -> Result<FockState> {
    let reg = s.registry().clone();
    let mut out = s.clone();
    for &(i, j) in bonds {
        let ii = reg.require(&m(i))?;
        let jj = reg.require(&m(j))?;
        let op = FermionOperator::identity(reg.clone())
            .add(&FermionOperator::normal_order(reg.clone(), &[(ii, true), (jj, true)], re(1.0)))?
            .scaled(re(linalg::SQRT_HALF));
        out = op.apply(&out)?;
    }
    Ok(out)
}

/// Sum of `coeff · Π a†` over 1-based mode lists, on `registry`.
pub fn creation_sum(registry: &Arc<ModeRegistry>, terms: &[(Complex64, &[u32])]) -> Result<FockState> {
    let mut s = FockState::zero(registry.clone());
    for (c, modes) in terms {
        let idx: Vec<usize> = modes.iter().map(|&k| registry.require(&m(k))).collect::<Result<_>>()?;
        s = s.add_scaled(&FockState::created(registry.clone(), &idx, *c), re(1.0))?;
    }
    Ok(s)
}

/// The single-wire gadget.
#[derive(Debug, Clone)]
pub struct SingleGadget {
    pub registry: Arc<ModeRegistry>,
    pub layout: SiteLayout,
    pub input: LogicalWire,
    pub output: LogicalWire,
}

impl Default for SingleGadget {
    fn default() -> Self {
        Self::new()
    }
}

impl SingleGadget {
    pub const BONDS: [(u32, u32); 2] = [(2, 5), (4, 6)];

    pub fn new() -> Self {
        Self {
            registry: numbered_from_one(6),
            layout: SiteLayout {
                inputs: vec![pair(1, 3)],
                outputs: vec![OutputPair { site: pair(2, 4), partner: pair(5, 6) }],
                spectators: vec![],
            },
            input: LogicalWire::new(0, 2),
            output: LogicalWire::new(4, 5),
        }
    }

    /// Encoded input on `(1, 3)` with both bonds attached.
    pub fn state(&self, spin: &[Complex64]) -> Result<FockState> {
        attach_bonds(&encode(spin, &[self.input], self.registry.clone())?, &Self::BONDS)
    }

    /// Basis teleporting `u` for an input in `sector`.
    pub fn basis(&self, u: &CMatrix, sector: u8) -> Result<MeasurementBasis> {
        if u.nrows() != 2 || u.ncols() != 2 {
            return Err(Error::InvalidArgument("single-wire gate must be 2x2".into()));
        }
        linalg::require_unitary(u, 1e-10)?;
        build_basis(&self.layout, u, &[sector])
    }

    /// `(U00 − U01 a2†a4† + U10 a1†a3† + U11 a1†a2†a3†a4†)|Ω⟩/2` on modes `1..=4`.
    ///
    /// Contracting with this bra teleports `U†`, not `U`.
    pub fn literal_vector(u: &CMatrix) -> Result<FockState> {
        let reg = numbered_from_one(4);
        creation_sum(
            &reg,
            &[
                (u[(0, 0)] * 0.5, &[]),
                (-u[(0, 1)] * 0.5, &[2, 4]),
                (u[(1, 0)] * 0.5, &[1, 3]),
                (u[(1, 1)] * 0.5, &[1, 2, 3, 4]),
            ],
        )
    }
}

/// Top-site map `|c⟩ ↦ Σ_x H_{xc} |x⟩_out |x⟩_link`.
pub fn uph_top_map() -> CMatrix {
    let h = linalg::hadamard();
    let mut t = CMatrix::zeros(4, 2);
    for x in 0..2 {
        for c in 0..2 {
            t[(3 * x, c)] = h[(x, c)];
        }
    }
    t
}

/// Bottom-site map `|x⟩_link |t⟩ ↦ Z^x H |t⟩`.
pub fn uph_bottom_map() -> CMatrix {
    let zh = [linalg::hadamard(), linalg::pauli(false, true) * linalg::hadamard()];
    let mut b = CMatrix::zeros(2, 4);
    for x in 0..2 {
        for t in 0..2 {
            for o in 0..2 {
                b[(o, 2 * x + t)] = zh[x][(o, t)];
            }
        }
    }
    b
}

/// The two-wire gadget.
#[derive(Debug, Clone)]
pub struct PairGadget {
    pub registry: Arc<ModeRegistry>,
    pub top: SiteLayout,
    pub bottom: SiteLayout,
    pub inputs: [LogicalWire; 2],
    pub outputs: [LogicalWire; 2],
}

impl Default for PairGadget {
    fn default() -> Self {
        Self::new()
    }
}

impl PairGadget {
    pub const BONDS: [(u32, u32); 6] = [(2, 13), (4, 14), (5, 7), (6, 8), (10, 15), (12, 16)];

    pub fn new() -> Self {
        Self {
            registry: numbered_from_one(16),
            top: SiteLayout {
                inputs: vec![pair(1, 3)],
                outputs: vec![
                    OutputPair { site: pair(2, 4), partner: pair(13, 14) },
                    OutputPair { site: pair(5, 6), partner: pair(7, 8) },
                ],
                spectators: vec![],
            },
            bottom: SiteLayout {
                inputs: vec![pair(7, 8), pair(9, 11)],
                outputs: vec![OutputPair { site: pair(10, 12), partner: pair(15, 16) }],
                spectators: vec![],
            },
            inputs: [LogicalWire::new(0, 2), LogicalWire::new(8, 10)],
            outputs: [LogicalWire::new(12, 13), LogicalWire::new(14, 15)],
        }
    }

    pub fn state(&self, spin: &[Complex64]) -> Result<FockState> {
        attach_bonds(&encode(spin, &self.inputs, self.registry.clone())?, &Self::BONDS)
    }

    pub fn top_basis(&self, sector: u8) -> Result<MeasurementBasis> {
        build_basis(&self.top, &uph_top_map(), &[sector])
    }

    pub fn bottom_basis(&self, link_sector: u8, target_sector: u8) -> Result<MeasurementBasis> {
        build_basis(&self.bottom, &uph_bottom_map(), &[link_sector, target_sector])
    }

    /// The eight-term top vector as written with modes `1..=6`, scaled by `1/(2√2)`.
    pub fn literal_top() -> Result<FockState> {
        let s = 1.0 / (2.0 * std::f64::consts::SQRT_2);
        creation_sum(
            &numbered_from_one(6),
            &[
                (re(s), &[]),
                (re(-s), &[2, 4]),
                (re(-s), &[5, 6]),
                (re(s), &[2, 4, 5, 6]),
                (re(s), &[1, 3]),
                (re(-s), &[1, 2, 3, 4]),
                (re(s), &[1, 3, 5, 6]),
                (re(-s), &[1, 2, 3, 4, 5, 6]),
            ],
        )
    }

    /// The four-term bottom vector on modes `7..=12`, scaled by `1/2`.
    pub fn literal_bottom() -> Result<FockState> {
        let reg = ModeRegistry::new((7..=12).map(m).collect())?.arc();
        creation_sum(
            &reg,
            &[(re(0.5), &[]), (re(-0.5), &[10, 12]), (re(0.5), &[7, 8, 9, 11]), (re(-0.5), &[7, 8, 9, 10, 11, 12])],
        )
    }
}

/// Which standard site basis to build.
#[derive(Debug, Clone, PartialEq)]
pub enum GateBasisKind {
    Uf(CMatrix),
    UphTop,
    UphBottom,
    /// Occupation basis of an eight-mode interior site.
    Isolation,
    /// Occupation basis of one readout pair.
    Readout,
}

/// Standard bases for inputs in the even sector.
pub fn gate_basis(kind: &GateBasisKind) -> Result<MeasurementBasis> {
    match kind {
        GateBasisKind::Uf(u) => SingleGadget::new().basis(u, 0),
        GateBasisKind::UphTop => PairGadget::new().top_basis(0),
        GateBasisKind::UphBottom => PairGadget::new().bottom_basis(0, 0),
        GateBasisKind::Isolation => occupation_basis(&(0..4).map(|p| pair(2 * p + 1, 2 * p + 2)).collect::<Vec<_>>()),
        GateBasisKind::Readout => occupation_basis(&[pair(1, 2)]),
    }
}
