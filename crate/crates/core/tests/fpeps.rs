use std::collections::BTreeMap;

use fmbqc::fermion::{FockState, ModeRegistry, Parity};
use fmbqc::fpeps::{boundary_update, contract_physical, contract_region, BoundarySpec, Projection, Site};
use fmbqc::lattice::Lattice;
use fmbqc::oracle::dense::FactorMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_fixed_parity(reg: std::sync::Arc<ModeRegistry>, parity: u32, rng: &mut impl Rng) -> FockState {
    let n = reg.len();
    let s = FockState::from_pairs(
        reg,
        (0..1u64 << n)
            .filter(|b| b.count_ones() % 2 == parity)
            .map(|b| (b, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))),
    );
    s.normalized()
}

/// Boundary input with a fixed parity on every pair (k = 2) or overall (k = 1).
fn random_boundary(l: &Lattice, rng: &mut impl Rng) -> BoundarySpec {
    let reg = l.boundary_registry();
    if l.k == 1 {
        return BoundarySpec::new(random_fixed_parity(reg, rng.random_range(0..2), rng)).unwrap();
    }
    let mut s = FockState::vacuum(ModeRegistry::empty().arc());
    for r in 0..l.rows as usize {
        let pair = ModeRegistry::new(reg.labels()[2 * r..2 * r + 2].to_vec()).unwrap().arc();
        let p = random_fixed_parity(pair, rng.random_range(0..2), rng);
        let mut labels = s.registry().labels().to_vec();
        labels.extend(p.registry().labels());
        s = FockState::join(&s, &p, ModeRegistry::new(labels).unwrap().arc()).unwrap();
    }
    BoundarySpec::new(s).unwrap()
}

fn all_sites(l: &Lattice) -> Vec<Site> {
    (0..l.rows).flat_map(|r| (0..l.cols).map(move |c| (r, c))).collect()
}

#[test]
fn trivial_projections_reproduce_the_resource() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (rows, cols) in [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (2, 3)] {
        for k in [1, 2] {
            let l = Lattice::new(rows, cols, k).unwrap();
            let b = random_boundary(&l, &mut rng);
            let resource = l.build_resource(b.state.clone()).unwrap().materialize().unwrap();
            let ps: Vec<Projection> = all_sites(&l).into_iter().map(|s| Projection::trivial(&l, s)).collect();
            let phys = contract_physical(&l, &ps, &b).unwrap();
            let as_virtual = phys.relabeled(resource.registry().clone()).unwrap();
            let d = as_virtual.distance_inf(&resource).unwrap();
            assert!(d < 1e-12, "{rows}x{cols} k={k}: {d}");
        }
    }
}

/// `Σ_n A[n] C_c(n) C_v(n)†` as a dense matrix on a global register.
fn dense_projection(p: &Projection, positions: &[usize], nv: usize, m: usize) -> fmbqc::linalg::CMatrix {
    let dim = 1 << m;
    let mut acc = fmbqc::linalg::CMatrix::zeros(dim, dim);
    for (&pattern, &a) in &p.coefficients {
        let mut term = fmbqc::linalg::CMatrix::identity(dim, dim) * a;
        for i in nv..positions.len() {
            if pattern >> i & 1 == 1 {
                term *= FactorMatrix::new(m, positions[i], true).to_matrix();
            }
        }
        for i in (0..nv).rev() {
            if pattern >> i & 1 == 1 {
                term *= FactorMatrix::new(m, positions[i], false).to_matrix();
            }
        }
        acc += term;
    }
    acc
}

#[test]
fn one_by_two_matches_dense_enumeration() {
    let l = Lattice::new(1, 2, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..10 {
        let ps = if trial == 0 {
            // One physical mode per virtual mode, unit coefficients on matching patterns.
            vec![Projection::trivial(&l, (0, 0)), Projection::trivial(&l, (0, 1))]
        } else {
            vec![
                Projection::random(&l, (0, 0), 2, rng.random_range(0..2), &mut rng),
                Projection::random(&l, (0, 1), 1, rng.random_range(0..2), &mut rng),
            ]
        };
        let b = random_boundary(&l, &mut rng);
        let got = contract_physical(&l, &ps, &b).unwrap();

        let mut labels: Vec<_> = ps.iter().flat_map(|p| p.local_labels(&l)).collect();
        labels.sort();
        let reg = ModeRegistry::new(labels).unwrap();
        let m = reg.len();
        let pos = |p: &Projection| p.local_labels(&l).iter().map(|x| reg.index_of(x).unwrap()).collect::<Vec<_>>();
        // Boundary α(0,0) is mode 0; the bond is β(0,0)–α(0,1).
        let (a0, b0, a1) = (0usize, reg.index_of(&l.site_modes(0, 0)[1]).unwrap(), reg.index_of(&l.site_modes(0, 1)[0]).unwrap());
        let mut phi = vec![Complex64::new(0.0, 0.0); 1 << m];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (&bits, &amp) in b.state.amplitudes() {
            let base = (bits as usize) << a0;
            phi[base] += amp * h;
            // Boundary, β(0,0) and α(0,1) are already in ascending order.
            phi[base | 1 << b0 | 1 << a1] += amp * h;
        }
        let p0 = dense_projection(&ps[0], &pos(&ps[0]), l.site_modes(0, 0).len(), m);
        let p1 = dense_projection(&ps[1], &pos(&ps[1]), l.site_modes(0, 1).len(), m);
        let v = &p1 * (&p0 * nalgebra::DVector::from_vec(phi));
        let vmask = (1usize << a0) | (1 << b0) | (1 << a1);
        let mut want = BTreeMap::new();
        for (n, x) in v.iter().enumerate() {
            if n & vmask == 0 && x.norm() > 1e-14 {
                let mut k = 0u64;
                let mut j = 0;
                for i in 0..m {
                    if vmask >> i & 1 == 0 {
                        k |= ((n >> i & 1) as u64) << j;
                        j += 1;
                    }
                }
                want.insert(k, *x);
            }
        }
        let want = FockState::from_map(got.registry().clone(), want);
        assert!(got.distance_inf(&want).unwrap() < 1e-12, "trial {trial}");
    }
}

#[test]
fn boundary_update_matches_direct_measurement() {
    let l = Lattice::new(2, 2, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..20 {
        let ps: Vec<Projection> =
            all_sites(&l).into_iter().map(|s| Projection::random(&l, s, 1, rng.random_range(0..2), &mut rng)).collect();
        let b = random_boundary(&l, &mut rng);
        let full = contract_physical(&l, &ps, &b).unwrap();
        let o_parity = rng.random_range(0..2u32);
        let phys00 = ModeRegistry::new(ps[0].local_labels(&l)[l.site_modes(0, 0).len()..].to_vec()).unwrap().arc();
        let outcome = FockState::basis(phys00, o_parity as u64).scaled(Complex64::new(0.6, 0.8));
        let direct = full.contract(&outcome).unwrap();

        let upd = boundary_update(&l, &ps[0], &b, &outcome).unwrap();
        let rest: Vec<Site> = all_sites(&l).into_iter().skip(1).collect();
        let via = contract_region(&l, &rest, &ps[1..], &upd.boundary).unwrap();
        let p_rest: u32 = ps[1..].iter().map(|p| p.parity as u32).sum();
        let sign = if (o_parity * p_rest) % 2 == 1 { -1.0 } else { 1.0 };
        let d = direct.distance_inf(&via.scaled(Complex64::new(sign, 0.0))).unwrap();
        assert!(d < 1e-12, "trial {trial}: {d}");

        // Parity of the new boundary accounts for the projection and the outcome.
        let want = (b.state.parity().bit().unwrap() as u32 + ps[0].parity as u32 + o_parity) % 2;
        assert_eq!(upd.boundary.state.parity(), Parity::from_bit(want == 1));
    }
}

#[test]
fn vacuum_outcome_of_trivial_corner_is_bare_teleportation() {
    let l = Lattice::new(2, 2, 1).unwrap();
    let p = Projection::trivial(&l, (0, 0));
    let b = BoundarySpec::vacuum(&l);
    let phys = ModeRegistry::new(p.local_labels(&l)[3..].to_vec()).unwrap().arc();
    let upd = boundary_update(&l, &p, &b, &FockState::vacuum(phys)).unwrap();
    assert_eq!(upd.terms.len(), 1);
    // Both bonds contribute their empty half.
    let r = &upd.terms[0].operator;
    assert_eq!(r.num_terms(), 1);
    assert!((r.coefficient(0, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-12);
}

#[test]
fn elimination_order_only_changes_odd_signs() {
    // Global contraction with the projections applied in row-major order,
    // reversed, compared with lazy column-by-column elimination.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let l = Lattice::new(2, 2, 1).unwrap();
    for _ in 0..10 {
        let parities: Vec<u8> = (0..4).map(|_| rng.random_range(0..2)).collect();
        let ps: Vec<Projection> =
            all_sites(&l).into_iter().zip(&parities).map(|(s, &f)| Projection::random(&l, s, 1, f, &mut rng)).collect();
        let b = random_boundary(&l, &mut rng);
        let lazy = contract_physical(&l, &ps, &b).unwrap();

        let virt = l.build_resource(b.state.clone()).unwrap().materialize().unwrap();
        let mut labels = virt.registry().labels().to_vec();
        labels.extend(ps.iter().flat_map(|p| p.local_labels(&l)[l.site_modes(p.site.0, p.site.1).len()..].to_vec()));
        let reg = ModeRegistry::sorted(labels).unwrap().arc();
        let mut s = virt.embedded(reg.clone()).unwrap();
        // Apply P_11 first and P_00 last: ψ = P_00 P_01 P_10 P_11 Φ.
        for p in ps.iter().rev() {
            s = p.operator(&l, &reg).unwrap().apply(&s).unwrap();
        }
        let global = s.contract(&FockState::vacuum(virt.registry().clone())).unwrap();
        // Lazy elimination builds P_11 P_10 P_01 P_00 Φ (column-major (0,0),(1,0),(0,1),(1,1)).
        // Reordering fixed-parity factors costs (−1)^(f_a f_b) per swapped pair.
        let lazy_order = [0usize, 2, 1, 3];
        let global_order = [3usize, 2, 1, 0];
        let mut swaps = 0u32;
        for i in 0..4 {
            for j in i + 1..4 {
                let (a, b) = (lazy_order[i], lazy_order[j]);
                let pa = global_order.iter().position(|&x| x == a).unwrap();
                let pb = global_order.iter().position(|&x| x == b).unwrap();
                if pa > pb {
                    swaps += parities[a] as u32 * parities[b] as u32;
                }
            }
        }
        let sign = if swaps % 2 == 1 { -1.0 } else { 1.0 };
        let d = global.distance_inf(&lazy.scaled(Complex64::new(sign, 0.0))).unwrap();
        assert!(d < 1e-12, "{parities:?}: {d}");
        if parities.iter().all(|&f| f == 0) {
            assert!(global.distance_inf(&lazy).unwrap() < 1e-12);
        }
    }
}
