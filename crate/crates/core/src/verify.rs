//! Quick self-checks grouped by invariant, plus the small demos behind the
//! CLI. Each check compares the library against one of the dense oracles.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::encoding::{decode, LogicalWire};
use crate::engine::{run, CircuitIR, Gate, RunOptions};
use crate::error::Result;
use crate::fermion::{FermionOperator, FockState, ModeRegistry};
use crate::fpeps::{contract_physical, BoundarySpec, Projection};
use crate::lattice::Lattice;
use crate::linalg::{self, random_state, random_unitary, CMatrix};
use crate::oracle::dense::{dense_fermion_apply, from_dense, to_dense};
use crate::oracle::spin::{fidelity, spin_pair_teleport_check, spin_teleport_check, PairBases, TeleportReport};
use crate::report::emit_report;
use crate::teleport::standard::{gate_basis, GateBasisKind, PairGadget, SingleGadget};
use crate::teleport::{measure_forced, probabilities};

#[derive(Debug, Clone, Serialize)]
pub struct GroupResult {
    pub group: String,
    pub passed: bool,
    pub cases: usize,
    /// Worst deviation seen, in the group's own metric.
    pub worst: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: bool,
    pub groups: Vec<GroupResult>,
}

fn group(name: &str, cases: usize, worst: f64, tol: f64) -> GroupResult {
    GroupResult { group: name.into(), passed: worst <= tol, cases, worst }
}

/// Random operator with up to `terms` monomials on `m` modes.
pub fn random_operator<R: Rng + ?Sized>(rng: &mut R, m: usize, terms: usize) -> FermionOperator {
    let reg = ModeRegistry::numbered(m).arc();
    let mut op = FermionOperator::zero(reg.clone());
    for _ in 0..terms {
        let len = rng.random_range(0..=4);
        let word: Vec<(usize, bool)> = (0..len).map(|_| (rng.random_range(0..m), rng.random_bool(0.5))).collect();
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        op = op.add(&FermionOperator::normal_order(reg.clone(), &word, c)).expect("same registry");
    }
    op
}

/// Random circuit on one or two wires with at most `max_gates` gates.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, max_gates: usize) -> CircuitIR {
    let wires = rng.random_range(1..=2);
    let len = rng.random_range(0..=max_gates);
    let gates = (0..len)
        .map(|_| match rng.random_range(0..if wires == 2 { 3 } else { 2 }) {
            0 => Gate::Zf { theta: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI), wire: rng.random_range(0..wires) },
            1 => Gate::Hf { wire: rng.random_range(0..wires) },
            _ => Gate::Uph { wires: [0, 1] },
        })
        .collect();
    CircuitIR::new(wires, gates).expect("generated circuit is valid")
}

fn algebra(rng: &mut ChaCha8Rng) -> Result<GroupResult> {
    let mut worst: f64 = 0.0;
    let cases = 50;
    for _ in 0..cases {
        let m = rng.random_range(1..=6);
        let op = random_operator(rng, m, 4);
        let reg = op.registry().clone();
        let v: Vec<Complex64> = random_state(rng, 1 << m);
        let s = from_dense(reg, &v);
        let got = to_dense(&op.apply(&s)?)?;
        let want = dense_fermion_apply(&op, &v)?;
        worst = worst.max(got.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
    }
    Ok(group("algebra", cases, worst, 1e-12))
}

fn spin_teleport(rng: &mut ChaCha8Rng) -> Result<GroupResult> {
    let mut reports = vec![
        spin_teleport_check(&CMatrix::identity(2, 2), 5, rng)?,
        spin_teleport_check(&linalg::hadamard(), 5, rng)?,
        spin_teleport_check(&random_unitary(rng, 2), 5, rng)?,
    ];
    reports.push(spin_pair_teleport_check(PairBases::Constructed, &linalg::uph(), 3, rng)?);
    let worst = reports.iter().map(|r| 1.0 - r.worst_fidelity).fold(0.0, f64::max);
    Ok(group("spin-teleport", reports.iter().map(|r| r.outcomes).sum(), worst, 1e-12))
}

fn overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    fidelity(a, b)
}

/// Worst infidelity of the distinguished single-wire outcome over random gates and inputs.
fn single_gadget(rng: &mut ChaCha8Rng, gates: usize, inputs: usize) -> Result<f64> {
    let g = SingleGadget::new();
    let mut worst: f64 = 0.0;
    for _ in 0..gates {
        let u = random_unitary(rng, 2);
        let basis = g.basis(&u, 0)?;
        for _ in 0..inputs {
            let v = random_state(rng, 2);
            let post = measure_forced(&g.state(&v)?, &basis, 0)?.post;
            // The post-state lives on the two output modes only.
            let out = decode(&post, &[LogicalWire::new(0, 1)])?;
            let want = &u * nalgebra::DVector::from_vec(v);
            worst = worst.max(1.0 - overlap(&out.amplitudes, want.as_slice()));
        }
    }
    Ok(worst)
}

/// Worst infidelity of the distinguished two-site outcome against the spin gate.
fn pair_gadget(rng: &mut ChaCha8Rng, inputs: usize) -> Result<f64> {
    let g = PairGadget::new();
    let top = g.top_basis(0)?;
    let bottom = g.bottom_basis(0, 0)?;
    let mut worst: f64 = 0.0;
    for _ in 0..inputs {
        let v = random_state(rng, 4);
        let mid = measure_forced(&g.state(&v)?, &top, 0)?.post;
        let post = measure_forced(&mid, &bottom, 0)?.post;
        let out = decode(&post, &[LogicalWire::new(0, 1), LogicalWire::new(2, 3)])?;
        let want = linalg::uph() * nalgebra::DVector::from_vec(v);
        worst = worst.max(1.0 - overlap(&out.amplitudes, want.as_slice()));
    }
    Ok(worst)
}

fn fermion_teleport(rng: &mut ChaCha8Rng) -> Result<GroupResult> {
    let worst = single_gadget(rng, 5, 3)?.max(pair_gadget(rng, 5)?);
    Ok(group("fermion-teleport", 20, worst, 1e-10))
}

fn completeness(rng: &mut ChaCha8Rng) -> Result<GroupResult> {
    let kinds = [
        GateBasisKind::Uf(random_unitary(rng, 2)),
        GateBasisKind::Uf(linalg::hadamard()),
        GateBasisKind::UphTop,
        GateBasisKind::UphBottom,
        GateBasisKind::Isolation,
        GateBasisKind::Readout,
    ];
    let mut worst: f64 = 0.0;
    for k in &kinds {
        let b = gate_basis(k)?;
        worst = worst.max(b.completeness_error()).max(b.orthonormality_error());
        for _ in 0..5 {
            let reg = b.site_modes.clone();
            let v = random_state(rng, 1 << reg.len());
            let s = from_dense(reg, &v);
            let total: f64 = probabilities(&s, &b)?.iter().sum();
            worst = worst.max((total - 1.0).abs());
        }
    }
    Ok(group("basis-completeness", kinds.len(), worst, 1e-12))
}

fn end_to_end(rng: &mut ChaCha8Rng) -> Result<GroupResult> {
    let cases = 10;
    let mut worst: f64 = 0.0;
    for i in 0..cases {
        let c = random_circuit(rng, 4);
        let input = random_state(rng, 1 << c.wires);
        let r = run(&c, &input, i as u64, 2, &RunOptions { verify: true, ..Default::default() })?;
        worst = worst.max(1.0 - r.worst_fidelity().unwrap_or(0.0));
    }
    Ok(group("end-to-end", cases, worst, 1e-8))
}

fn fpeps(rng: &mut ChaCha8Rng) -> Result<GroupResult> {
    let mut worst: f64 = 0.0;
    let shapes = [(1, 2, 1), (2, 2, 1), (2, 2, 2)];
    for &(rows, cols, k) in &shapes {
        let l = Lattice::new(rows, cols, k)?;
        // A k = 2 boundary needs fixed parity on every pair; the vacuum has it.
        let b = if k == 1 {
            let reg = l.boundary_registry();
            let v = random_state(rng, 1 << reg.len());
            let even: Vec<Complex64> =
                v.iter().enumerate().map(|(n, x)| if n.count_ones() % 2 == 0 { *x } else { Complex64::new(0.0, 0.0) }).collect();
            BoundarySpec::new(from_dense(reg, &even).normalized())?
        } else {
            BoundarySpec::vacuum(&l)
        };
        let resource = l.build_resource(b.state.clone())?.materialize()?;
        let ps: Vec<Projection> =
            (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).map(|s| Projection::trivial(&l, s)).collect();
        let phys = contract_physical(&l, &ps, &b)?.relabeled(resource.registry().clone())?;
        worst = worst.max(phys.distance_inf(&resource)?);
    }
    Ok(group("fpeps", shapes.len(), worst, 1e-12))
}

fn determinism(seed: u64) -> Result<GroupResult> {
    let c = CircuitIR::new(2, vec![Gate::Hf { wire: 0 }, Gate::Uph { wires: [0, 1] }, Gate::Zf { theta: 0.3, wire: 1 }])?;
    let input = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
    let opts = RunOptions { verify: true, ..Default::default() };
    let a = emit_report(&c, &run(&c, &input, seed, 3, &opts)?);
    let b = emit_report(&c, &run(&c, &input, seed, 3, &opts)?);
    Ok(GroupResult { group: "determinism".into(), passed: a == b, cases: 1, worst: if a == b { 0.0 } else { 1.0 } })
}

/// Runs every group. Errors inside a group count as a failure of that group.
pub fn run_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks: Vec<(&str, Box<dyn FnOnce(&mut ChaCha8Rng) -> Result<GroupResult>>)> = vec![
        ("algebra", Box::new(algebra)),
        ("spin-teleport", Box::new(spin_teleport)),
        ("fermion-teleport", Box::new(fermion_teleport)),
        ("basis-completeness", Box::new(completeness)),
        ("end-to-end", Box::new(end_to_end)),
        ("fpeps", Box::new(fpeps)),
        ("determinism", Box::new(move |_| determinism(seed))),
    ];
    let groups: Vec<GroupResult> = checks
        .into_iter()
        .map(|(name, f)| {
            f(&mut rng).unwrap_or_else(|e| {
                log::error!("{name}: {e}");
                GroupResult { group: name.into(), passed: false, cases: 0, worst: f64::INFINITY }
            })
        })
        .collect();
    SuiteReport { seed, passed: groups.iter().all(|g| g.passed), groups }
}

#[derive(Debug, Clone, Serialize)]
pub struct TeleportCheck {
    pub seed: u64,
    pub passed: bool,
    pub spin_single: TeleportReport,
    pub spin_pair: TeleportReport,
    pub fermion_single_worst_infidelity: f64,
    pub fermion_pair_worst_infidelity: f64,
}

/// Spin and fermionic teleportation checks on random gates and inputs.
pub fn teleport_check(seed: u64) -> Result<TeleportCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_unitary(&mut rng, 2);
    let spin_single = spin_teleport_check(&u, 10, &mut rng)?;
    let spin_pair = spin_pair_teleport_check(PairBases::Constructed, &linalg::uph(), 5, &mut rng)?;
    let fs = single_gadget(&mut rng, 10, 5)?;
    let fp = pair_gadget(&mut rng, 10)?;
    let passed = spin_single.passed && spin_pair.passed && fs < 1e-10 && fp < 1e-10;
    Ok(TeleportCheck {
        seed,
        passed,
        spin_single,
        spin_pair,
        fermion_single_worst_infidelity: fs,
        fermion_pair_worst_infidelity: fp,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FpepsDemo {
    pub seed: u64,
    pub rows: u32,
    pub cols: u32,
    pub k: u8,
    pub physical_modes: usize,
    /// Norm of the contracted physical state.
    pub norm: f64,
    /// Nonzero amplitudes keyed by physical occupation pattern.
    pub amplitudes: Vec<(String, [f64; 2])>,
}

/// Contracts a 2x2 lattice with random one-mode projections of random parity
/// against a vacuum boundary.
pub fn fpeps_demo(seed: u64) -> Result<FpepsDemo> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = Lattice::new(2, 2, 1)?;
    let ps: Vec<Projection> = (0..2u32)
        .flat_map(|r| (0..2u32).map(move |c| (r, c)))
        .map(|s| {
            let parity = rng.random_range(0..2);
            Projection::random(&l, s, 1, parity, &mut rng)
        })
        .collect();
    let out: FockState = contract_physical(&l, &ps, &BoundarySpec::vacuum(&l))?;
    let m = out.num_modes();
    let amplitudes = out
        .amplitudes()
        .iter()
        .map(|(bits, a)| ((0..m).map(|i| if bits >> i & 1 == 1 { '1' } else { '0' }).collect(), [a.re, a.im]))
        .collect();
    Ok(FpepsDemo { seed, rows: l.rows, cols: l.cols, k: l.k, physical_modes: m, norm: out.norm(), amplitudes })
}
