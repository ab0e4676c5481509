use fmbqc::encoding::{decode, LogicalWire};
use fmbqc::linalg::{self, random_state, random_unitary, CMatrix};
use fmbqc::teleport::standard::{PairGadget, SingleGadget};
use fmbqc::teleport::{measure_forced, probabilities};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn overlap(a: &[Complex64], b: &DVector<Complex64>) -> f64 {
    let ip: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
    ip.norm() / b.norm()
}

#[test]
fn every_single_gadget_outcome_matches_its_table_entry() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = SingleGadget::new();
    let mut u = random_unitary(&mut rng, 2);
    let mut basis = g.basis(&u, 0).unwrap();
    for trial in 0..100 {
        // Five gates, twenty inputs each.
        if trial % 20 == 0 {
            u = random_unitary(&mut rng, 2);
            basis = g.basis(&u, 0).unwrap();
        }
        let v = random_state(&mut rng, 2);
        let s = g.state(&v).unwrap();
        let probs = probabilities(&s, &basis).unwrap();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (k, p) in probs.iter().enumerate() {
            let info = &basis.outcomes[k];
            if info.in_sectors[0] != 0 {
                assert!(*p < 1e-20);
                continue;
            }
            assert!((p - 1.0 / 8.0).abs() < 1e-12, "outcome {k}: {p}");
            let post = measure_forced(&s, &basis, k).unwrap().post;
            let out = decode(&post, &[LogicalWire::new(0, 1).with_sector(info.out_sectors[0])]).unwrap();
            let want = &info.realized * DVector::from_vec(v.clone());
            assert!((overlap(&out.amplitudes, &want) - 1.0).abs() < 1e-12);
        }
        let out = decode(&measure_forced(&s, &basis, 0).unwrap().post, &[LogicalWire::new(0, 1)]).unwrap();
        let want = &u * DVector::from_vec(v.clone());
        assert!((overlap(&out.amplitudes, &want) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn pair_gadget_distinguished_outcomes_give_uph() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = PairGadget::new();
    let top = g.top_basis(0).unwrap();
    let bottom = g.bottom_basis(0, 0).unwrap();
    for _ in 0..5 {
        let v = random_state(&mut rng, 4);
        let s = g.state(&v).unwrap();
        let mid = measure_forced(&s, &top, 0).unwrap().post;
        let post = measure_forced(&mid, &bottom, 0).unwrap().post;
        let wires: Vec<LogicalWire> = vec![LogicalWire::new(0, 1), LogicalWire::new(2, 3)];
        let out = decode(&post, &wires).unwrap();
        let want = linalg::uph() * DVector::from_vec(v);
        assert!((overlap(&out.amplitudes, &want) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn literal_pair_vectors_realize_the_transpose() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = PairGadget::new();
    let mk = |v: fmbqc::fermion::FockState| fmbqc::teleport::MeasurementBasis {
        site_modes: v.registry().clone(),
        vectors: vec![v],
        outcomes: vec![],
        target: CMatrix::identity(1, 1),
        designated: vec![],
        partners: vec![],
    };
    let top = mk(PairGadget::literal_top().unwrap());
    let bottom = mk(PairGadget::literal_bottom().unwrap());
    let v = random_state(&mut rng, 4);
    let s = g.state(&v).unwrap();
    let mid = measure_forced(&s, &top, 0).unwrap().post;
    let post = measure_forced(&mid, &bottom, 0).unwrap().post;
    let out = decode(&post, &[LogicalWire::new(0, 1), LogicalWire::new(2, 3)]).unwrap();
    let want = linalg::uph().transpose() * DVector::from_vec(v);
    assert!((overlap(&out.amplitudes, &want) - 1.0).abs() < 1e-12);
}
