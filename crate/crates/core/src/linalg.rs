//! Small dense complex matrices: spin gates, Pauli strings and random draws.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn mat2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, b, c, d])
}

/// `X^x Z^z`.
pub fn pauli(x: bool, z: bool) -> CMatrix {
    let xm = if x { mat2(re(0.0), re(1.0), re(1.0), re(0.0)) } else { CMatrix::identity(2, 2) };
    let zm = if z { mat2(re(1.0), re(0.0), re(0.0), re(-1.0)) } else { CMatrix::identity(2, 2) };
    xm * zm
}

/// Tensor product of `X^x Z^z` factors, wire 0 most significant.
pub fn pauli_string(bits: &[(bool, bool)]) -> CMatrix {
    bits.iter().fold(CMatrix::identity(1, 1), |acc, &(x, z)| kron(&acc, &pauli(x, z)))
}

pub fn hadamard() -> CMatrix {
    mat2(re(SQRT_HALF), re(SQRT_HALF), re(SQRT_HALF), re(-SQRT_HALF))
}

/// Encoded phase gate `diag(1, e^{iθ})`.
pub fn phase(theta: f64) -> CMatrix {
    mat2(re(1.0), re(0.0), re(0.0), Complex64::from_polar(1.0, theta))
}

/// Spin rotation `diag(e^{-iθ/2}, e^{iθ/2})`.
pub fn rz(theta: f64) -> CMatrix {
    mat2(Complex64::from_polar(1.0, -theta / 2.0), re(0.0), re(0.0), Complex64::from_polar(1.0, theta / 2.0))
}

/// Controlled-Z after a Hadamard on both qubits.
pub fn uph() -> CMatrix {
    let cz = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![re(1.0), re(1.0), re(1.0), re(-1.0)]));
    let h = hadamard();
    cz * kron(&h, &h)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `tr(a† b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Largest entry of `|U†U - I|`; infinite for non-square input.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let d = u.adjoint() * u - CMatrix::identity(u.nrows(), u.ncols());
    d.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn require_unitary(u: &CMatrix, tol: f64) -> Result<()> {
    let dev = unitarity_deviation(u);
    if dev > tol {
        Err(Error::NotUnitary(dev))
    } else {
        Ok(())
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Moore-Penrose pseudo-inverse.
pub fn pinv(m: &CMatrix) -> Result<CMatrix> {
    m.clone().pseudo_inverse(1e-12).map_err(|_| Error::Singular)
}

/// Best fit `m ≈ λ P` over Pauli strings on `n` wires. Returns the string,
/// `λ`, and the residual `max|m - λP| / |λ|`.
pub fn nearest_pauli_string(m: &CMatrix, n: usize) -> (Vec<(bool, bool)>, Complex64, f64) {
    let dim = 1usize << n;
    let mut best: Option<(Vec<(bool, bool)>, Complex64, f64)> = None;
    for code in 0..(1usize << (2 * n)) {
        let bits: Vec<(bool, bool)> =
            (0..n).map(|w| (code >> (2 * w) & 1 == 1, code >> (2 * w + 1) & 1 == 1)).collect();
        let p = pauli_string(&bits);
        let lambda = hs_inner(&p, m) / dim as f64;
        if lambda.norm() < 1e-12 {
            continue;
        }
        let res = max_abs(&(m - &p * lambda)) / lambda.norm();
        if best.as_ref().is_none_or(|b| res < b.2) {
            best = Some((bits, lambda, res));
        }
    }
    best.unwrap_or((vec![(false, false); n], re(0.0), f64::INFINITY))
}

/// Uniform random complex vector of unit norm.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> =
            (0..dim).map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Random unitary from the QR factor of a random complex matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let m = CMatrix::from_fn(dim, dim, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    m.qr().q()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gates_are_unitary() {
        for g in [hadamard(), phase(0.3), rz(1.1), uph(), pauli(true, true)] {
            assert!(unitarity_deviation(&g) < 1e-12);
        }
    }

    #[test]
    fn uph_on_11() {
        let col = uph().column(3).into_owned();
        let want = [0.5, -0.5, -0.5, -0.5];
        for (a, b) in col.iter().zip(want) {
            assert!((a - re(b)).norm() < 1e-12);
        }
    }

    #[test]
    fn pauli_fit_recovers_string() {
        let p = pauli_string(&[(true, false), (true, true)]) * c64(0.0, 1.0);
        let (bits, lambda, res) = nearest_pauli_string(&p, 2);
        assert_eq!(bits, vec![(true, false), (true, true)]);
        assert!((lambda - c64(0.0, 1.0)).norm() < 1e-12 && res < 1e-12);
    }
}
