//! Born-rule projective measurement of one site.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use super::MeasurementBasis;
use crate::error::{Error, Result};
use crate::fermion::state::{contraction_sign, gather_bits};
use crate::fermion::FockState;

/// How the outcome is chosen.
pub enum Selection<'a, R: Rng + ?Sized> {
    Sample(&'a mut R),
    Forced(usize),
}

/// One measurement result.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub index: usize,
    pub probability: f64,
    /// Renormalized state on the unmeasured modes.
    pub post: FockState,
}

/// `s` split by the occupation of the site modes, with the contraction sign
/// folded in: `slices[x]` is `⟨x|s⟩` on the remaining modes.
pub struct Slices {
    pub rest: std::sync::Arc<crate::fermion::ModeRegistry>,
    pub slices: BTreeMap<u64, BTreeMap<u64, Complex64>>,
}

impl Slices {
    pub fn new(s: &FockState, basis: &MeasurementBasis) -> Result<Self> {
        let reg = s.registry();
        let mut positions = Vec::with_capacity(basis.site_modes.len());
        for l in basis.site_modes.labels() {
            positions.push(reg.require(l)?);
        }
        if positions.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::RegistryMismatch(format!(
                "site modes {} are not in the state's order",
                basis.site_modes
            )));
        }
        let mask = positions.iter().fold(0u64, |m, &p| m | 1 << p);
        let rest = std::sync::Arc::new(reg.complement(mask));
        let mut slices: BTreeMap<u64, BTreeMap<u64, Complex64>> = BTreeMap::new();
        for (&n, &a) in s.amplitudes() {
            let site = n & mask;
            let x = gather_bits(n, mask, reg.len());
            let r = gather_bits(n, !mask, reg.len());
            let sign = contraction_sign(n, site);
            *slices.entry(x).or_default().entry(r).or_default() += a * sign;
        }
        Ok(Self { rest, slices })
    }

    /// Unnormalized `⟨φ_k|s⟩`.
    pub fn project(&self, basis: &MeasurementBasis, k: usize) -> FockState {
        let mut out: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (x, c) in basis.vectors[k].amplitudes() {
            if let Some(slice) = self.slices.get(x) {
                let cc = c.conj();
                for (r, a) in slice {
                    *out.entry(*r).or_default() += cc * a;
                }
            }
        }
        FockState::from_map(self.rest.clone(), out)
    }
}

fn require_normalized(s: &FockState) -> Result<()> {
    let n = s.norm();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

/// All unnormalized post-states `⟨φ_k|s⟩`, in basis order.
pub fn project_all(s: &FockState, basis: &MeasurementBasis) -> Result<Vec<FockState>> {
    let slices = Slices::new(s, basis)?;
    Ok((0..basis.len()).map(|k| slices.project(basis, k)).collect())
}

/// Born probabilities of every outcome.
pub fn probabilities(s: &FockState, basis: &MeasurementBasis) -> Result<Vec<f64>> {
    require_normalized(s)?;
    Ok(project_all(s, basis)?.iter().map(|p| p.norm_sqr()).collect())
}

/// Measures `s` on the site of `basis`.
pub fn measure_with<R: Rng + ?Sized>(
    s: &FockState,
    basis: &MeasurementBasis,
    selection: Selection<'_, R>,
) -> Result<Outcome> {
    require_normalized(s)?;
    let slices = Slices::new(s, basis)?;
    let index = match selection {
        Selection::Forced(k) => {
            if k >= basis.len() {
                return Err(Error::InvalidArgument(format!("outcome {k} out of range")));
            }
            k
        }
        Selection::Sample(rng) => {
            let posts: Vec<f64> = (0..basis.len()).map(|k| slices.project(basis, k).norm_sqr()).collect();
            let r: f64 = rng.random::<f64>();
            let mut acc = 0.0;
            let mut chosen = None;
            for (k, p) in posts.iter().enumerate() {
                if *p <= 0.0 {
                    continue;
                }
                acc += p;
                chosen = Some(k);
                if r < acc {
                    break;
                }
            }
            chosen.ok_or(Error::NullProjection)?
        }
    };
    let post = slices.project(basis, index);
    let probability = post.norm_sqr();
    if probability < 1e-24 {
        return Err(Error::ImpossibleOutcome { index, probability });
    }
    Ok(Outcome { index, probability, post: post.normalized() })
}

pub fn measure<R: Rng + ?Sized>(s: &FockState, basis: &MeasurementBasis, rng: &mut R) -> Result<Outcome> {
    measure_with(s, basis, Selection::Sample(rng))
}

pub fn measure_forced(s: &FockState, basis: &MeasurementBasis, index: usize) -> Result<Outcome> {
    measure_with::<rand_chacha::ChaCha8Rng>(s, basis, Selection::Forced(index))
}
