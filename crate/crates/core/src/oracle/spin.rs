//! Dense qubit state vectors: circuit reference and qubit teleportation checks.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use crate::engine::{CircuitIR, Gate};
use crate::error::{Error, Result};
use crate::linalg::{self, c64, re, CMatrix};

/// Normalized qubit state, qubit 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    amps: Vec<Complex64>,
}

impl SpinState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() || amps.is_empty() {
            return Err(Error::InvalidArgument(format!("length {} is not a power of two", amps.len())));
        }
        let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { amps })
    }

    pub fn basis(qubits: usize, index: usize) -> Self {
        let mut amps = vec![re(0.0); 1 << qubits];
        amps[index] = re(1.0);
        Self { amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }
}

/// `|⟨a|b⟩|² / (‖a‖² ‖b‖²)`.
pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    ip.norm_sqr() / (na * nb)
}

/// Applies a `2^k × 2^k` matrix to the listed qubits (first listed is the
/// most significant index of the matrix).
pub fn apply_on(amps: &[Complex64], n: usize, qubits: &[usize], m: &CMatrix) -> Vec<Complex64> {
    let k = qubits.len();
    let mut out = vec![re(0.0); amps.len()];
    let shift = |q: usize| n - 1 - q;
    for (idx, amp) in amps.iter().enumerate() {
        if amp.norm() == 0.0 {
            continue;
        }
        let mut col = 0usize;
        for (j, &q) in qubits.iter().enumerate() {
            col |= (idx >> shift(q) & 1) << (k - 1 - j);
        }
        let base = qubits.iter().fold(idx, |acc, &q| acc & !(1 << shift(q)));
        for row in 0..(1usize << k) {
            let c = m[(row, col)];
            if c.norm() == 0.0 {
                continue;
            }
            let mut target = base;
            for (j, &q) in qubits.iter().enumerate() {
                target |= (row >> (k - 1 - j) & 1) << shift(q);
            }
            out[target] += c * amp;
        }
    }
    out
}

/// Spin matrices of the circuit gates. `Zf(θ)` maps to `diag(e^{-iθ/2}, e^{iθ/2})`.
pub fn gate_matrix(g: &Gate) -> CMatrix {
    match g {
        Gate::Zf { theta, .. } => linalg::rz(*theta),
        Gate::Hf { .. } => linalg::hadamard(),
        Gate::Uph { .. } => linalg::uph(),
    }
}

/// Dense application of every gate in order.
pub fn spin_apply(circuit: &CircuitIR, s: &SpinState) -> Result<SpinState> {
    if s.num_qubits() != circuit.wires {
        return Err(Error::InvalidArgument(format!(
            "state has {} qubits, circuit {}",
            s.num_qubits(),
            circuit.wires
        )));
    }
    let n = circuit.wires;
    let mut amps = s.amps.clone();
    for g in &circuit.gates {
        let qubits: Vec<usize> = match g {
            Gate::Zf { wire, .. } | Gate::Hf { wire } => vec![*wire],
            Gate::Uph { wires } => wires.to_vec(),
        };
        amps = apply_on(&amps, n, &qubits, &gate_matrix(g));
    }
    Ok(SpinState { amps })
}

/// Outcome of a teleportation check.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TeleportReport {
    pub outcomes: usize,
    pub worst_fidelity: f64,
    pub passed: bool,
}

fn pauli_by_name(i: usize) -> CMatrix {
    // I, X, Y, Z
    match i {
        0 => CMatrix::identity(2, 2),
        1 => linalg::pauli(true, false),
        2 => linalg::mat2(re(0.0), c64(0.0, -1.0), c64(0.0, 1.0), re(0.0)),
        _ => linalg::pauli(false, true),
    }
}

/// Best fidelity between `v` and `P · w` over Pauli strings `P` on `n` qubits.
fn best_pauli_fidelity(v: &[Complex64], w: &DVector<Complex64>, n: usize) -> f64 {
    let mut best: f64 = 0.0;
    for code in 0..(1usize << (2 * n)) {
        let p = (0..n).fold(CMatrix::identity(1, 1), |acc, q| linalg::kron(&acc, &pauli_by_name(code >> (2 * q) & 3)));
        let pw = &p * w;
        best = best.max(fidelity(v, pw.as_slice()));
    }
    best
}

/// Qubit 1 teleported through the pair `(2, 3)` with the four outcomes
/// `(U† σ_α ⊗ I)|Φ+⟩` on qubits `(1, 2)`; each must leave `σ_α U|ψ⟩` on 3.
pub fn spin_teleport_check<R: Rng + ?Sized>(u: &CMatrix, inputs: usize, rng: &mut R) -> Result<TeleportReport> {
    linalg::require_unitary(u, 1e-10)?;
    let bell = DVector::from_vec(vec![re(linalg::SQRT_HALF), re(0.0), re(0.0), re(linalg::SQRT_HALF)]);
    let mut worst: f64 = 1.0;
    let mut outcomes = 0;
    for _ in 0..inputs {
        let psi = linalg::random_state(rng, 2);
        // |ψ⟩_1 ⊗ |Φ+⟩_23
        let st: Vec<Complex64> = (0..8).map(|i| psi[i >> 2] * bell[i & 3]).collect();
        for a in 0..4 {
            let sigma = pauli_by_name(a);
            let phi = linalg::kron(&(u.adjoint() * &sigma), &CMatrix::identity(2, 2)) * &bell;
            let out: Vec<Complex64> =
                (0..2).map(|q3| (0..4).map(|r| phi[r].conj() * st[(r << 1) | q3]).sum()).collect();
            let want = &sigma * u * DVector::from_vec(psi.clone());
            worst = worst.min(fidelity(&out, want.as_slice()));
            outcomes += 1;
        }
    }
    Ok(TeleportReport { outcomes, worst_fidelity: worst, passed: (1.0 - worst) < 1e-12 })
}

/// Eight-qubit two-wire configuration: inputs on qubits 1 (control) and 5
/// (target), pairs `(2, 7)`, `(3, 4)`, `(6, 8)`. Sites `(1, 2, 3)` and
/// `(4, 5, 6)` are measured in turn and the result is read on `(7, 8)`.
fn pair_state(m: &[Complex64]) -> Vec<Complex64> {
    let mut t = vec![re(0.0); 256];
    let s = (1.0f64 / 8.0).sqrt();
    for c in 0..2 {
        for tq in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    for d in 0..2 {
                        let bits = [c, a, b, b, tq, d, a, d];
                        let idx = bits.iter().fold(0usize, |acc, &x| (acc << 1) | x);
                        t[idx] += m[2 * c + tq] * s;
                    }
                }
            }
        }
    }
    t
}

/// `⟨φ_top|⟨φ_bottom|` applied to the eight-qubit state; returns the state of `(7, 8)`.
fn contract_pair(state: &[Complex64], top: &[Complex64], bottom: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![re(0.0); 4];
    for (idx, amp) in state.iter().enumerate() {
        let t = idx >> 5;
        let b = (idx >> 2) & 7;
        let o = idx & 3;
        out[o] += top[t].conj() * bottom[b].conj() * amp;
    }
    out
}

fn ket(bits: &[&DVector<Complex64>]) -> DVector<Complex64> {
    bits.iter().fold(DVector::from_element(1, re(1.0)), |acc, v| {
        let mut out = DVector::zeros(acc.len() * v.len());
        for i in 0..acc.len() {
            for j in 0..v.len() {
                out[i * v.len() + j] = acc[i] * v[j];
            }
        }
        out
    })
}

/// Bra realizing a map `M` through the pairs: `φ[in, out] = conj(M[out, in])`,
/// scaled to unit norm. The input index is the most significant.
fn bra_for_map(m: &CMatrix) -> Vec<Complex64> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut v = vec![re(0.0); rows * cols];
    for o in 0..rows {
        for i in 0..cols {
            v[i * rows + o] = m[(o, i)].conj();
        }
    }
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Site bases built from Pauli decorations of the top and bottom maps.
fn constructed_pair_bases() -> (Vec<(Vec<Complex64>, CMatrix)>, Vec<(Vec<Complex64>, CMatrix)>) {
    use crate::teleport::standard::{uph_bottom_map, uph_top_map};
    let paulis: Vec<CMatrix> = (0..4).map(pauli_by_name).collect();
    let pick = |cands: Vec<CMatrix>| -> Vec<(Vec<Complex64>, CMatrix)> {
        let mut chosen: Vec<(Vec<Complex64>, CMatrix)> = Vec::new();
        for m in cands {
            let v = bra_for_map(&m);
            if chosen.iter().all(|(w, _)| w.iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm() < 1e-9) {
                chosen.push((v, m));
            }
        }
        chosen
    };
    let mut top_c = Vec::new();
    for p in &paulis {
        for q in &paulis {
            top_c.push(linalg::kron(p, q) * uph_top_map());
        }
    }
    let mut bottom_c = Vec::new();
    for r1 in &paulis {
        for r2 in &paulis {
            for q in &paulis {
                bottom_c.push(q * uph_bottom_map() * linalg::kron(r1, r2));
            }
        }
    }
    (pick(top_c), pick(bottom_c))
}

/// Which two-wire gate a family of site bases teleports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairBases {
    /// Bases built from Pauli decorations of the top and bottom maps.
    Constructed,
    /// `X^i X^j I (|0++⟩ ± |1−−⟩)` and `X^k X^l I (|00+⟩ ± |11−⟩)`.
    Literal,
}

/// Exhaustive check that every pair of site outcomes leaves
/// `Pauli ⊗ Pauli · gate · |m⟩` on qubits `(7, 8)`.
pub fn spin_pair_teleport_check<R: Rng + ?Sized>(
    bases: PairBases,
    gate: &CMatrix,
    inputs: usize,
    rng: &mut R,
) -> Result<TeleportReport> {
    let (tops, bottoms): (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) = match bases {
        PairBases::Constructed => {
            let (t, b) = constructed_pair_bases();
            if t.len() != 8 || b.len() != 8 {
                return Err(Error::InvalidArgument("incomplete constructed bases".into()));
            }
            (t.into_iter().map(|x| x.0).collect(), b.into_iter().map(|x| x.0).collect())
        }
        PairBases::Literal => {
            let s = linalg::SQRT_HALF;
            let e0 = DVector::from_vec(vec![re(1.0), re(0.0)]);
            let e1 = DVector::from_vec(vec![re(0.0), re(1.0)]);
            let plus = DVector::from_vec(vec![re(s), re(s)]);
            let minus = DVector::from_vec(vec![re(s), re(-s)]);
            let x = pauli_by_name(1);
            let xp = |i: usize| if i == 1 { x.clone() } else { CMatrix::identity(2, 2) };
            let mut tops = Vec::new();
            let mut bottoms = Vec::new();
            for i in 0..2 {
                for j in 0..2 {
                    for sign in [1.0, -1.0] {
                        let op = linalg::kron(&linalg::kron(&xp(i), &xp(j)), &CMatrix::identity(2, 2));
                        let t = (ket(&[&e0, &plus, &plus]) + ket(&[&e1, &minus, &minus]) * re(sign)) * re(s);
                        tops.push((op.clone() * t).as_slice().to_vec());
                        let b = (ket(&[&e0, &e0, &plus]) + ket(&[&e1, &e1, &minus]) * re(sign)) * re(s);
                        bottoms.push((op * b).as_slice().to_vec());
                    }
                }
            }
            (tops, bottoms)
        }
    };
    let mut worst: f64 = 1.0;
    let mut outcomes = 0;
    for _ in 0..inputs {
        let m = linalg::random_state(rng, 4);
        let state = pair_state(&m);
        let want = gate * DVector::from_vec(m.clone());
        for t in &tops {
            for b in &bottoms {
                let out = contract_pair(&state, t, b);
                let norm: f64 = out.iter().map(|x| x.norm_sqr()).sum();
                if norm < 1e-20 {
                    continue;
                }
                worst = worst.min(best_pauli_fidelity(&out, &want, 2));
                outcomes += 1;
            }
        }
    }
    Ok(TeleportReport { outcomes, worst_fidelity: worst, passed: (1.0 - worst) < 1e-12 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn phase_and_hadamard() {
        let c = CircuitIR { wires: 1, gates: vec![Gate::Zf { theta: 0.4, wire: 0 }] };
        let out = spin_apply(&c, &SpinState::basis(1, 0)).unwrap();
        assert!((out.amplitudes()[0] - Complex64::from_polar(1.0, -0.2)).norm() < 1e-12);
        let c = CircuitIR { wires: 1, gates: vec![Gate::Hf { wire: 0 }] };
        let out = spin_apply(&c, &SpinState::basis(1, 0)).unwrap();
        assert!((out.amplitudes()[1] - re(linalg::SQRT_HALF)).norm() < 1e-12);
    }

    #[test]
    fn uph_on_11() {
        let c = CircuitIR { wires: 2, gates: vec![Gate::Uph { wires: [0, 1] }] };
        let out = spin_apply(&c, &SpinState::basis(2, 3)).unwrap();
        for (a, b) in out.amplitudes().iter().zip([0.5, -0.5, -0.5, -0.5]) {
            assert!((a - re(b)).norm() < 1e-12);
        }
    }

    #[test]
    fn single_qubit_teleport() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let r = spin_teleport_check(&linalg::hadamard(), 3, &mut rng).unwrap();
        assert!(r.passed && r.outcomes == 12);
    }
}
