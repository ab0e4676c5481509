//! Randomized invariants of the operator algebra, encoding and oracles.

use fmbqc::encoding::{decode, encode, LogicalWire};
use fmbqc::fermion::{encoded_gate, FermionOperator, FockState, GateKind, ModeLabel, ModeRegistry, Parity};
use fmbqc::linalg::{random_state, random_unitary, CMatrix};
use fmbqc::oracle::dense::{dense_fermion_apply, from_dense, operator_matrix, to_dense};
use fmbqc::oracle::factor::factor_byproduct;
use fmbqc::oracle::spin::fidelity;
use fmbqc::verify::random_operator;
use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_fock(r: &mut ChaCha8Rng, reg: std::sync::Arc<ModeRegistry>) -> FockState {
    let v = random_state(r, 1 << reg.len());
    from_dense(reg, &v)
}

fn fixed_parity(r: &mut ChaCha8Rng, reg: std::sync::Arc<ModeRegistry>, odd: bool) -> FockState {
    let s = random_fock(r, reg.clone());
    let keep = s.amplitudes().iter().filter(|(k, _)| (k.count_ones() % 2 == 1) == odd).map(|(k, a)| (*k, *a));
    FockState::from_pairs(reg, keep).normalized()
}

/// Keeps only the monomials of one parity.
fn parity_part(op: &FermionOperator, odd: bool) -> FermionOperator {
    let reg = op.registry().clone();
    op.terms()
        .filter(|t| (t.parity() == Parity::Odd) == odd)
        .fold(FermionOperator::zero(reg.clone()), |acc, t| {
            acc.add(&FermionOperator::normal_order(reg.clone(), &t.factors(), t.coeff)).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn anticommutators(m in 1usize..=8, seed in any::<u64>()) {
        let mut r = rng(seed);
        let reg = ModeRegistry::numbered(m).arc();
        let i = r.random_range(0..m);
        let j = r.random_range(0..m);
        let a = FermionOperator::annihilate(reg.clone(), i);
        let bd = FermionOperator::create(reg.clone(), j);
        let b = FermionOperator::annihilate(reg.clone(), j);
        let mixed = a.mul(&bd).unwrap().add(&bd.mul(&a).unwrap()).unwrap();
        let want = if i == j { FermionOperator::identity(reg.clone()) } else { FermionOperator::zero(reg.clone()) };
        prop_assert!(mixed.distance_inf(&want).unwrap() < 1e-12);
        let same = a.mul(&b).unwrap().add(&b.mul(&a).unwrap()).unwrap();
        prop_assert!(same.is_zero());
        // Also as actions on a random state.
        let s = random_fock(&mut r, reg);
        let lhs = a.apply(&bd.apply(&s).unwrap()).unwrap().add_scaled(&bd.apply(&a.apply(&s).unwrap()).unwrap(), Complex64::new(1.0, 0.0)).unwrap();
        let rhs = if i == j { s.clone() } else { FockState::zero(s.registry().clone()) };
        prop_assert!(lhs.distance_inf(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn reordering_is_an_involution(m in 1usize..=8, seed in any::<u64>()) {
        let mut r = rng(seed);
        let reg = ModeRegistry::numbered(m).arc();
        let mut labels = reg.labels().to_vec();
        labels.shuffle(&mut r);
        let shuffled = ModeRegistry::new(labels).unwrap().arc();
        let s = random_fock(&mut r, reg.clone());
        let there = s.reordered(shuffled).unwrap();
        let back = there.reordered(reg).unwrap();
        prop_assert!(back.distance_inf(&s).unwrap() < 1e-15);
        prop_assert!((there.norm() - s.norm()).abs() < 1e-12);
    }

    #[test]
    fn parity_is_conserved(m in 1usize..=8, seed in any::<u64>(), odd_op in any::<bool>(), odd_state in any::<bool>()) {
        let mut r = rng(seed);
        let op = parity_part(&random_operator(&mut r, m, 6), odd_op);
        let s = fixed_parity(&mut r, op.registry().clone(), odd_state);
        let out = op.apply(&s).unwrap();
        if !out.is_zero() {
            prop_assert_eq!(out.parity(), Parity::from_bit(odd_op != odd_state));
        }
    }

    #[test]
    fn join_is_associative(na in 1u32..=3, nb in 1u32..=3, nc in 1u32..=2, seed in any::<u64>()) {
        let mut r = rng(seed);
        let labels: Vec<ModeLabel> = (0..na + nb + nc).map(ModeLabel::free).collect();
        // Interleave the three blocks in the merged order to exercise signs.
        let mut order = labels.clone();
        order.shuffle(&mut r);
        let block = |lo: u32, hi: u32| ModeRegistry::new(order[lo as usize..hi as usize].to_vec()).unwrap().arc();
        let (ra, rb, rc) = (block(0, na), block(na, na + nb), block(na + nb, na + nb + nc));
        let (pa, pb) = (r.random_bool(0.5), r.random_bool(0.5));
        let a = fixed_parity(&mut r, ra.clone(), pa);
        let b = fixed_parity(&mut r, rb.clone(), pb);
        let c = random_fock(&mut r, rc.clone());
        let all = ModeRegistry::sorted(labels).unwrap().arc();
        let sub = |x: &std::sync::Arc<ModeRegistry>, y: &std::sync::Arc<ModeRegistry>| {
            let mut l = x.labels().to_vec();
            l.extend(y.labels());
            ModeRegistry::sorted(l).unwrap().arc()
        };
        let left = FockState::join(&FockState::join(&a, &b, sub(&ra, &rb)).unwrap(), &c, all.clone()).unwrap();
        let right = FockState::join(&a, &FockState::join(&b, &c, sub(&rb, &rc)).unwrap(), all).unwrap();
        prop_assert!(left.distance_inf(&right).unwrap() < 1e-12);
    }

    #[test]
    fn encode_decode_round_trip(n in 1usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let reg = ModeRegistry::numbered(2 * n).arc();
        let wires: Vec<LogicalWire> = (0..n).map(|w| LogicalWire::new(2 * w, 2 * w + 1)).collect();
        let v = random_state(&mut r, 1 << n);
        let f = encode(&v, &wires, reg).unwrap();
        prop_assert_eq!(f.parity(), Parity::Even);
        let d = decode(&f, &wires).unwrap();
        for (a, b) in d.amplitudes.iter().zip(&v) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn dense_oracle_agrees_with_sparse_apply(m in 1usize..=8, seed in any::<u64>()) {
        let mut r = rng(seed);
        let op = random_operator(&mut r, m, 8);
        let v = random_state(&mut r, 1 << m);
        let sparse = to_dense(&op.apply(&from_dense(op.registry().clone(), &v)).unwrap()).unwrap();
        let dense = dense_fermion_apply(&op, &v).unwrap();
        for (a, b) in sparse.iter().zip(&dense) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }
}

/// `B` is recovered on the span of `G·v`, which is the whole encoded sector.
fn check_factorization(seed: u64, odd: bool, two: bool) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let n = if two { 2 } else { 1 };
    let m = 2 * n;
    let reg = ModeRegistry::numbered(m).arc();
    let wires: Vec<LogicalWire> = (0..n).map(|w| LogicalWire::new(2 * w, 2 * w + 1)).collect();
    let g = if two {
        encoded_gate(&GateKind::Uph, &[0, 1, 2, 3], &reg).unwrap()
    } else {
        encoded_gate(&GateKind::Uf(random_unitary(&mut r, 2)), &[0, 1], &reg).unwrap()
    };
    let mut b = parity_part(&random_operator(&mut r, m, 8), odd);
    if b.is_zero() {
        b = if odd { FermionOperator::create(reg.clone(), 0) } else { FermionOperator::identity(reg.clone()) };
    }
    let inputs: Vec<FockState> = (0..1usize << n)
        .map(|a| {
            let mut e = vec![Complex64::new(0.0, 0.0); 1 << n];
            e[a] = Complex64::new(1.0, 0.0);
            encode(&e, &wires, reg.clone()).unwrap()
        })
        .collect();
    let posts: Vec<FockState> = inputs.iter().map(|v| b.apply(&g.apply(v).unwrap()).unwrap()).collect();
    let f = factor_byproduct(&posts, &g, &inputs).unwrap();
    prop_assert!(f.residual < 1e-10);
    // Compare with B restricted to the encoded sector, which G preserves.
    let bm = operator_matrix(&b).unwrap();
    let dim = 1 << m;
    let mut proj = CMatrix::zeros(dim, dim);
    for v in &inputs {
        let d = DVector::from_vec(to_dense(v).unwrap());
        proj += &d * d.adjoint();
    }
    let want = &bm * &proj;
    let got = &f.matrix;
    // Up to a global phase: compare flattened vectors by fidelity.
    let (wv, gv): (Vec<Complex64>, Vec<Complex64>) = (want.iter().copied().collect(), got.iter().copied().collect());
    if want.norm() > 1e-9 {
        prop_assert!(1.0 - fidelity(&wv, &gv) < 1e-10);
        prop_assert!((want.norm() - got.norm()).abs() < 1e-9 * want.norm().max(1.0));
        prop_assert_eq!(f.byproduct.parity(), b.parity());
    } else {
        // B annihilates the encoded sector, so nothing is recoverable.
        prop_assert!(got.norm() < 1e-9);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn factorization_recovers_the_byproduct(seed in any::<u64>(), odd in any::<bool>(), two in any::<bool>()) {
        check_factorization(seed, odd, two)?;
    }
}

#[test]
fn factorization_of_a_byproduct_that_kills_the_sector() {
    check_factorization(3515036390653386674, true, true).unwrap();
}
