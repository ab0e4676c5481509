//! Recovering by-product operators from post-measurement states.

use nalgebra::DVector;
use num_complex::Complex64;

use super::dense::{encoded_basis, from_dense, matrix_to_operator, operator_matrix, to_dense};
use crate::error::{Error, Result};
use crate::fermion::{FermionOperator, FockState, Parity};
use crate::linalg::{self, CMatrix};

#[derive(Debug, Clone)]
pub struct Factorization {
    /// Minimal-norm `B` with `posts ≈ B · intended · inputs`.
    pub byproduct: FermionOperator,
    pub matrix: CMatrix,
    /// Largest column error `‖B·G·v − post‖`.
    pub residual: f64,
}

/// Solves `post_a = B · intended · input_a` for `B` by least squares.
///
/// `B` is only determined on the span of `intended · inputs`; the returned
/// operator vanishes on its orthogonal complement.
pub fn factor_byproduct(posts: &[FockState], intended: &FermionOperator, inputs: &[FockState]) -> Result<Factorization> {
    if posts.len() != inputs.len() || inputs.is_empty() {
        return Err(Error::InvalidArgument("need one post-state per input".into()));
    }
    let reg = intended.registry().clone();
    for s in posts.iter().chain(inputs) {
        s.check_registry(&reg)?;
    }
    let g = operator_matrix(intended)?;
    let dim = g.nrows();
    let cols = inputs.len();
    let mut v = CMatrix::zeros(dim, cols);
    let mut p = CMatrix::zeros(dim, cols);
    for (a, (input, post)) in inputs.iter().zip(posts).enumerate() {
        let gv = &g * DVector::from_vec(to_dense(input)?);
        v.set_column(a, &gv);
        p.set_column(a, &DVector::from_vec(to_dense(post)?));
    }
    let sv = v.clone().svd(false, false).singular_values;
    let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if smallest < 1e-10 {
        return Err(Error::Singular);
    }
    let b = &p * linalg::pinv(&v)?;
    let residual = (0..cols).map(|a| (&b * v.column(a) - p.column(a)).norm()).fold(0.0, f64::max);
    let byproduct = matrix_to_operator(&b, reg)?;
    Ok(Factorization { byproduct, matrix: b, residual })
}

/// Logical matrix `⟨E_c|B|E_a⟩` between two encodings of the same wires.
pub fn logical_matrix(b: &CMatrix, m: usize, inputs: &[(usize, usize, u8)], outputs: &[(usize, usize, u8)]) -> Result<CMatrix> {
    let din = 1 << inputs.len();
    let dout = 1 << outputs.len();
    let ins: Vec<DVector<Complex64>> =
        (0..din).map(|a| encoded_basis(m, inputs, a).map(DVector::from_vec)).collect::<Result<_>>()?;
    let outs: Vec<DVector<Complex64>> =
        (0..dout).map(|c| encoded_basis(m, outputs, c).map(DVector::from_vec)).collect::<Result<_>>()?;
    Ok(CMatrix::from_fn(dout, din, |c, a| outs[c].dotc(&(b * &ins[a]))))
}

/// Kind of a one-wire by-product.
#[derive(Debug, Clone, PartialEq)]
pub enum ByproductClass {
    /// Even operator acting as `X^x Z^z` within the sector.
    PauliLike { x: bool, z: bool, residual: f64 },
    /// Odd operator moving the wire to the other sector, acting as `X^x Z^z`
    /// between the two encodings.
    SectorFlip { x: bool, z: bool, residual: f64 },
    Other { residual: f64 },
}

/// Classifies a factorized by-product on one wire `(info, parity)` whose input
/// lives in sector `sector`.
pub fn classify(f: &Factorization, info: usize, parity: usize, sector: u8) -> Result<ByproductClass> {
    let m = f.byproduct.registry().len();
    let odd = f.byproduct.parity() == Parity::Odd;
    let out_sector = if odd { 1 - sector } else { sector };
    let l = logical_matrix(&f.matrix, m, &[(info, parity, sector)], &[(info, parity, out_sector)])?;
    let (bits, _, residual) = linalg::nearest_pauli_string(&l, 1);
    let (x, z) = bits[0];
    Ok(match f.byproduct.parity() {
        Parity::Even if residual < 1e-8 => ByproductClass::PauliLike { x, z, residual },
        Parity::Odd if residual < 1e-8 => ByproductClass::SectorFlip { x, z, residual },
        _ => ByproductClass::Other { residual },
    })
}

/// Applies a dense matrix to a state, for building test posts.
pub fn apply_matrix(b: &CMatrix, s: &FockState) -> Result<FockState> {
    let v = b * DVector::from_vec(to_dense(s)?);
    Ok(from_dense(s.registry().clone(), v.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{encode, LogicalWire};
    use crate::fermion::ModeRegistry;
    use crate::linalg::re;

    #[test]
    fn identity_outcome() {
        let r = ModeRegistry::numbered(2).arc();
        let w = [LogicalWire::new(0, 1)];
        let inputs = vec![encode(&[re(1.0), re(0.0)], &w, r.clone()).unwrap(), encode(&[re(0.0), re(1.0)], &w, r.clone()).unwrap()];
        let id = FermionOperator::identity(r);
        let f = factor_byproduct(&inputs, &id, &inputs).unwrap();
        assert!(f.residual < 1e-12);
        assert!(matches!(classify(&f, 0, 1, 0).unwrap(), ByproductClass::PauliLike { x: false, z: false, .. }));
    }

    #[test]
    fn odd_flip() {
        // a†_1 − a_1 sends |Ω⟩ to a†_1|Ω⟩ and a†_0 a†_1|Ω⟩ to a†_0|Ω⟩.
        let r = ModeRegistry::numbered(2).arc();
        let w = [LogicalWire::new(0, 1)];
        let inputs = vec![encode(&[re(1.0), re(0.0)], &w, r.clone()).unwrap(), encode(&[re(0.0), re(1.0)], &w, r.clone()).unwrap()];
        let b = FermionOperator::create(r.clone(), 1).sub(&FermionOperator::annihilate(r.clone(), 1)).unwrap();
        let posts: Vec<FockState> = inputs.iter().map(|s| b.apply(s).unwrap()).collect();
        let f = factor_byproduct(&posts, &FermionOperator::identity(r), &inputs).unwrap();
        assert!(f.residual < 1e-12);
        assert!(matches!(classify(&f, 0, 1, 0).unwrap(), ByproductClass::SectorFlip { x: false, z: false, .. }));
    }

    #[test]
    fn singular_intended() {
        let r = ModeRegistry::numbered(2).arc();
        let s = FockState::vacuum(r.clone());
        let zero = FermionOperator::zero(r);
        assert!(matches!(factor_byproduct(&[s.clone()], &zero, &[s]), Err(Error::Singular)));
    }
}
