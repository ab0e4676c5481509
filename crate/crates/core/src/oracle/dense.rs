//! Dense fermionic linear algebra over all `2^M` occupation patterns.
//!
//! Operators are assembled from explicit matrices of single creators and
//! annihilators. Index `n` of a dense vector is the occupation pattern with
//! bit `i` for mode `i`; `a†_i` carries `(−1)^(occupied modes below i)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::{FermionOperator, FockState, ModeRegistry};
use crate::linalg::CMatrix;

/// Largest mode count handled by vector-level routines.
pub const MAX_DENSE_MODES: usize = 20;
/// Largest mode count for which full matrices are formed.
pub const MAX_MATRIX_MODES: usize = 10;

/// One factor as a signed partial permutation: column `n` maps to `(row, sign)`.
#[derive(Debug, Clone)]
pub struct FactorMatrix {
    cols: Vec<Option<(usize, f64)>>,
}

impl FactorMatrix {
    /// `a†_i` (or `a_i` when `creator` is false) on `m` modes.
    pub fn new(m: usize, i: usize, creator: bool) -> Self {
        let dim = 1usize << m;
        let below = (1usize << i) - 1;
        let cols = (0..dim)
            .map(|n| {
                let occupied = n >> i & 1 == 1;
                if occupied == creator {
                    return None;
                }
                let sign = if (n & below).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                Some((n ^ 1 << i, sign))
            })
            .collect();
        Self { cols }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (n, entry) in self.cols.iter().enumerate() {
            if let Some((row, sign)) = entry {
                out[*row] += v[n] * sign;
            }
        }
        out
    }

    pub fn to_matrix(&self) -> CMatrix {
        let dim = self.cols.len();
        let mut m = CMatrix::zeros(dim, dim);
        for (n, entry) in self.cols.iter().enumerate() {
            if let Some((row, sign)) = entry {
                m[(*row, n)] = Complex64::new(*sign, 0.0);
            }
        }
        m
    }
}

fn check_modes(m: usize, limit: usize) -> Result<()> {
    if m > limit {
        return Err(Error::TooManyModes(m));
    }
    Ok(())
}

/// Factors of one canonical monomial, leftmost first.
fn monomial_factors(cre: u64, ann: u64, m: usize) -> Vec<(usize, bool)> {
    let mut out: Vec<(usize, bool)> = (0..m).filter(|i| cre >> i & 1 == 1).map(|i| (i, true)).collect();
    out.extend((0..m).filter(|j| ann >> j & 1 == 1).map(|j| (j, false)));
    out
}

/// Applies `op` to a dense state of matching dimension.
pub fn dense_fermion_apply(op: &FermionOperator, state: &[Complex64]) -> Result<Vec<Complex64>> {
    let m = op.registry().len();
    check_modes(m, MAX_DENSE_MODES)?;
    if state.len() != 1 << m {
        return Err(Error::InvalidArgument(format!("dense state of length {} for {m} modes", state.len())));
    }
    let creators: Vec<FactorMatrix> = (0..m).map(|i| FactorMatrix::new(m, i, true)).collect();
    let annihilators: Vec<FactorMatrix> = (0..m).map(|i| FactorMatrix::new(m, i, false)).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for t in op.terms() {
        let mut v = state.to_vec();
        for &(i, creator) in monomial_factors(t.cre, t.ann, m).iter().rev() {
            v = if creator { creators[i].apply(&v) } else { annihilators[i].apply(&v) };
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o += t.coeff * x;
        }
    }
    Ok(out)
}

/// Full `2^M × 2^M` matrix of a monomial.
pub fn monomial_matrix(m: usize, cre: u64, ann: u64) -> Result<CMatrix> {
    check_modes(m, MAX_MATRIX_MODES)?;
    let dim = 1usize << m;
    let mut acc = CMatrix::identity(dim, dim);
    for (i, creator) in monomial_factors(cre, ann, m) {
        acc *= FactorMatrix::new(m, i, creator).to_matrix();
    }
    Ok(acc)
}

/// Full matrix of an operator.
pub fn operator_matrix(op: &FermionOperator) -> Result<CMatrix> {
    let m = op.registry().len();
    check_modes(m, MAX_MATRIX_MODES)?;
    let dim = 1usize << m;
    let mut acc = CMatrix::zeros(dim, dim);
    for t in op.terms() {
        acc += monomial_matrix(m, t.cre, t.ann)? * t.coeff;
    }
    Ok(acc)
}

/// Normal-ordered expansion of a dense matrix, found by solving against the
/// matrices of all `4^M` monomials.
pub fn matrix_to_operator(mat: &CMatrix, registry: std::sync::Arc<ModeRegistry>) -> Result<FermionOperator> {
    let m = registry.len();
    check_modes(m, 5)?;
    let dim = 1usize << m;
    if mat.nrows() != dim || mat.ncols() != dim {
        return Err(Error::InvalidArgument("matrix does not match the registry".into()));
    }
    let monos: Vec<(u64, u64)> = (0..dim as u64).flat_map(|c| (0..dim as u64).map(move |a| (c, a))).collect();
    let mut sys = CMatrix::zeros(dim * dim, monos.len());
    for (k, &(c, a)) in monos.iter().enumerate() {
        let mm = monomial_matrix(m, c, a)?;
        for (r, x) in mm.iter().enumerate() {
            sys[(r, k)] = *x;
        }
    }
    let rhs = nalgebra::DVector::from_iterator(dim * dim, mat.iter().copied());
    let coeffs = sys.lu().solve(&rhs).ok_or(Error::Singular)?;
    let mut op = FermionOperator::zero(registry.clone());
    for (k, &(c, a)) in monos.iter().enumerate() {
        if coeffs[k].norm() > 1e-13 {
            let word = monomial_factors(c, a, m);
            op = op.add(&FermionOperator::normal_order(registry.clone(), &word, coeffs[k]))?;
        }
    }
    Ok(op)
}

pub fn to_dense(s: &FockState) -> Result<Vec<Complex64>> {
    check_modes(s.num_modes(), MAX_DENSE_MODES)?;
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << s.num_modes()];
    for (k, a) in s.amplitudes() {
        v[*k as usize] = *a;
    }
    Ok(v)
}

pub fn from_dense(registry: std::sync::Arc<ModeRegistry>, v: &[Complex64]) -> FockState {
    FockState::from_pairs(registry, v.iter().enumerate().map(|(k, a)| (k as u64, *a)))
}

/// Encoded basis string `a` over wires `(info, parity, sector)`, wire 0 the
/// most significant bit, built as creators applied to the vacuum.
pub fn encoded_basis(m: usize, wires: &[(usize, usize, u8)], a: usize) -> Result<Vec<Complex64>> {
    check_modes(m, MAX_DENSE_MODES)?;
    let n = wires.len();
    let mut word = Vec::new();
    for (w, &(info, parity, sector)) in wires.iter().enumerate() {
        let bit = a >> (n - 1 - w) & 1 == 1;
        match (sector, bit) {
            (0, false) => {}
            (0, true) => word.extend([info, parity]),
            (_, false) => word.push(parity),
            (_, true) => word.push(info),
        }
    }
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << m];
    v[0] = Complex64::new(1.0, 0.0);
    for &i in word.iter().rev() {
        v = FactorMatrix::new(m, i, true).apply(&v);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::re;

    #[test]
    fn creator_on_vacuum() {
        let r = ModeRegistry::numbered(3).arc();
        let op = FermionOperator::create(r, 0);
        let mut v = vec![re(0.0); 8];
        v[0] = re(1.0);
        let out = dense_fermion_apply(&op, &v).unwrap();
        assert_eq!(out[1], re(1.0));
    }

    #[test]
    fn anticommutator_matrices() {
        let m = 3;
        for i in 0..m {
            for j in 0..m {
                let a = FactorMatrix::new(m, i, false).to_matrix();
                let b = FactorMatrix::new(m, j, true).to_matrix();
                let ac = &a * &b + &b * &a;
                let want = if i == j { CMatrix::identity(8, 8) } else { CMatrix::zeros(8, 8) };
                assert!(crate::linalg::max_abs(&(ac - want)) < 1e-15);
            }
        }
    }

    #[test]
    fn round_trip_operator() {
        let r = ModeRegistry::numbered(2).arc();
        let op = FermionOperator::normal_order(r.clone(), &[(1, false), (0, true)], re(2.0));
        let mat = operator_matrix(&op).unwrap();
        let back = matrix_to_operator(&mat, r).unwrap();
        assert!(op.distance_inf(&back).unwrap() < 1e-12);
    }

    #[test]
    fn too_many_modes() {
        let r = ModeRegistry::numbered(21).arc();
        let op = FermionOperator::identity(r);
        assert!(matches!(dense_fermion_apply(&op, &[]), Err(Error::TooManyModes(21))));
    }
}
