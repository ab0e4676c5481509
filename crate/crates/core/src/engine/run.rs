//! Adaptive column-by-column execution on a lazily grown frontier.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::circuit::CircuitIR;
use super::compile::{compile, wire_row, MeasurementPattern, Site, SitePlan};
use super::frame::{sign_frame, ByproductFrame, MeasurementRecord, WireFrame};
use crate::encoding::{encode_in_sectors, read_amplitudes, LogicalWire};
use crate::error::{Error, Result};
use crate::fermion::{FockState, GateKind, ModeRegistry};
use crate::lattice::{Direction, Lattice};
use crate::linalg::{self, kron, CMatrix};
use crate::oracle::spin::{fidelity, spin_apply, SpinState};
use crate::teleport::standard::{uph_bottom_map, uph_top_map};
use crate::teleport::{
    build_basis, measure_with, occupation_basis, product_basis, MeasurementBasis, PairRef, Selection,
};

/// Largest distance from a Pauli string tolerated when updating the frame.
const PAULI_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Keep the readout pairs and decode the output state.
    Exact,
    /// Measure the readout pairs in the occupation basis.
    Sample,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub mode: Mode,
    /// Outcome overrides by site.
    pub forced: BTreeMap<Site, usize>,
    /// Compare exact-mode outputs with the spin oracle.
    pub verify: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { mode: Mode::Exact, forced: BTreeMap::new(), verify: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotResult {
    pub records: Vec<MeasurementRecord>,
    /// Frame left after the last gate column, already undone in `amplitudes`.
    pub frame: Vec<WireFrame>,
    pub global_sign: i8,
    /// Corrected output state (exact mode).
    pub amplitudes: Option<Vec<Complex64>>,
    /// Corrected readout bits, wire 0 first (sample mode).
    pub bits: Option<Vec<u8>>,
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub mode: Mode,
    pub shots: Vec<ShotResult>,
    /// Spin-oracle output when verification was requested.
    pub expected: Option<Vec<Complex64>>,
}

impl RunResult {
    pub fn worst_fidelity(&self) -> Option<f64> {
        self.shots.iter().filter_map(|s| s.fidelity).reduce(f64::min)
    }

    /// Counts of readout bit strings, wire 0 leftmost.
    pub fn histogram(&self) -> BTreeMap<String, usize> {
        let mut h = BTreeMap::new();
        for s in &self.shots {
            if let Some(bits) = &s.bits {
                let key: String = bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect();
                *h.entry(key).or_default() += 1;
            }
        }
        h
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct BasisKey {
    site: Site,
    frame: Vec<(bool, bool)>,
    sectors: Vec<u8>,
    sample: bool,
}

/// Realized maps of a two-wire gate column, collected top to bottom.
#[derive(Debug, Clone)]
struct PendingUph {
    top: CMatrix,
    relay: Option<CMatrix>,
    link_sector: u8,
}

/// Lazily grown state: the input plus every bond whose first endpoint has
/// been reached, minus every measured site.
#[derive(Debug, Clone)]
pub struct Frontier {
    pub state: FockState,
}

impl Frontier {
    /// Encodes `input` on the `α` pairs of column 0; all other boundary pairs
    /// stay empty.
    pub fn new(lattice: &Lattice, input: &[Complex64], wires: usize) -> Result<Self> {
        let reg = lattice.boundary_registry();
        let lw: Vec<LogicalWire> = (0..wires)
            .map(|w| wire_on(&reg, &lattice.pair(wire_row(w), 0, Direction::Left).expect("k = 2"), 0))
            .collect::<Result<_>>()?;
        Ok(Self { state: encode_in_sectors(input, &lw, reg)? })
    }

    /// Joins the outgoing bonds of `(row, col)`.
    pub fn attach(&mut self, lattice: &Lattice, row: u32, col: u32) -> Result<()> {
        for bond in lattice.outgoing_bonds(row, col) {
            let b = Lattice::bond_state(&bond)?;
            let mut labels = self.state.registry().labels().to_vec();
            labels.extend([bond.from, bond.to]);
            labels.sort();
            self.state = FockState::join(&self.state, &b, ModeRegistry::new(labels)?.arc())?;
        }
        Ok(())
    }

    /// Parity of a pair, which must be definite.
    pub fn pair_parity(&self, p: &PairRef) -> Result<u8> {
        let reg = self.state.registry();
        let (i, q) = (reg.require(&p.info)?, reg.require(&p.parity)?);
        let mut seen = None;
        for bits in self.state.amplitudes().keys() {
            let f = ((bits >> i ^ bits >> q) & 1) as u8;
            if seen.is_some_and(|s| s != f) {
                return Err(Error::MixedParity);
            }
            seen = Some(f);
        }
        seen.ok_or(Error::NullProjection)
    }
}

fn wire_on(reg: &ModeRegistry, p: &PairRef, sector: u8) -> Result<LogicalWire> {
    Ok(LogicalWire::new(reg.require(&p.info)?, reg.require(&p.parity)?).with_sector(sector))
}

fn to_pauli(m: &CMatrix, n: usize) -> Result<Vec<(bool, bool)>> {
    let (bits, _, residual) = linalg::nearest_pauli_string(m, n);
    if residual > PAULI_TOL {
        return Err(Error::NonPauliByproduct(residual));
    }
    Ok(bits)
}

/// Executes one compiled circuit; bases are cached across shots.
pub struct Executor {
    pub circuit: CircuitIR,
    pub pattern: MeasurementPattern,
    cache: HashMap<BasisKey, Arc<MeasurementBasis>>,
}

/// State of one shot in progress.
pub struct Shot {
    pub frontier: Frontier,
    pub frame: ByproductFrame,
    pending: HashMap<usize, PendingUph>,
    bits: Vec<u8>,
}

impl Executor {
    pub fn new(circuit: &CircuitIR) -> Result<Self> {
        Ok(Self { circuit: circuit.clone(), pattern: compile(circuit)?, cache: HashMap::new() })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.pattern.lattice
    }

    pub fn start(&self, input: &[Complex64]) -> Result<Shot> {
        Ok(Shot {
            frontier: Frontier::new(&self.pattern.lattice, input, self.pattern.wires)?,
            frame: ByproductFrame::new(self.pattern.wires),
            pending: HashMap::new(),
            bits: vec![0; self.pattern.wires],
        })
    }

    /// Basis of `site` given the current frame. Single-wire gates absorb the
    /// wire's Pauli record; two-wire columns use their bare maps and fold the
    /// record into the frame update instead.
    pub fn adapt_basis(&mut self, site: Site, frame: &ByproductFrame, link_sector: u8, mode: Mode) -> Result<Arc<MeasurementBasis>> {
        let plan = self.pattern.plan(site).clone();
        let (fr, sectors): (Vec<(bool, bool)>, Vec<u8>) = match &plan {
            SitePlan::Single { wire, .. } => {
                let w = frame.wires[*wire];
                (vec![(w.x, w.z)], vec![w.sector])
            }
            SitePlan::UphTop { wire } => (vec![], vec![frame.wires[*wire].sector]),
            SitePlan::Relay { .. } => (vec![], vec![link_sector]),
            SitePlan::UphBottom { wire } => (vec![], vec![link_sector, frame.wires[wire + 1].sector]),
            SitePlan::Isolation | SitePlan::Readout { .. } => (vec![], vec![]),
        };
        let key = BasisKey { site, frame: fr, sectors: sectors.clone(), sample: mode == Mode::Sample };
        if let Some(b) = self.cache.get(&key) {
            return Ok(b.clone());
        }
        let lattice = self.pattern.lattice;
        let (r, c) = site;
        let basis = match &plan {
            SitePlan::Single { wire, gate } => {
                let w = frame.wires[*wire];
                let target = gate.matrix() * w.inverse_matrix();
                build_basis(&self.pattern.site_layout(site).expect("gate site"), &target, &sectors)?
            }
            SitePlan::UphTop { .. } => build_basis(&self.pattern.site_layout(site).unwrap(), &uph_top_map(), &sectors)?,
            SitePlan::Relay { .. } => {
                build_basis(&self.pattern.site_layout(site).unwrap(), &CMatrix::identity(2, 2), &sectors)?
            }
            SitePlan::UphBottom { .. } => {
                build_basis(&self.pattern.site_layout(site).unwrap(), &uph_bottom_map(), &sectors)?
            }
            SitePlan::Isolation => lattice.isolation_basis(r, c)?,
            SitePlan::Readout { .. } => match mode {
                Mode::Sample => product_basis(lattice.site_registry(r, c), lattice.site_pairs(r, c))?,
                Mode::Exact => {
                    let spect: Vec<PairRef> = [Direction::Up, Direction::Down]
                        .iter()
                        .filter_map(|&d| lattice.pair(r, c, d))
                        .collect();
                    occupation_basis(&spect)?
                }
            },
        };
        let basis = Arc::new(basis);
        self.cache.insert(key, basis.clone());
        Ok(basis)
    }

    /// Attaches the bonds of `site`, measures it and updates the frame.
    pub fn step(&mut self, shot: &mut Shot, site: Site, selection: Selection<'_, ChaCha8Rng>, mode: Mode) -> Result<MeasurementRecord> {
        let lattice = self.pattern.lattice;
        let (r, c) = site;
        shot.frontier.attach(&lattice, r, c)?;
        let plan = self.pattern.plan(site).clone();
        let link_sector = match &plan {
            SitePlan::Relay { wire } | SitePlan::UphBottom { wire } => {
                shot.pending.get(wire).map(|p| p.link_sector).ok_or_else(|| {
                    Error::InvalidArgument(format!("two-wire gate at ({r},{c}) measured out of order"))
                })?
            }
            _ => 0,
        };
        let basis = self.adapt_basis(site, &shot.frame, link_sector, mode)?;
        let record = if basis.site_modes.is_empty() {
            MeasurementRecord { site, outcome: 0, probability: 1.0, parity: 0, pair_parities: vec![], decoration: 0 }
        } else {
            let out = measure_with(&shot.frontier.state, &basis, selection)?;
            shot.frontier.state = out.post;
            let info = &basis.outcomes[out.index];
            self.update_frame(shot, &plan, &basis, out.index, site)?;
            MeasurementRecord {
                site,
                outcome: out.index,
                probability: out.probability,
                parity: info.total_parity,
                pair_parities: info.pair_parities.clone(),
                decoration: info.decoration,
            }
        };
        shot.frame.records.push(record.clone());
        Ok(record)
    }

    fn update_frame(
        &self,
        shot: &mut Shot,
        plan: &SitePlan,
        basis: &MeasurementBasis,
        index: usize,
        site: Site,
    ) -> Result<()> {
        let info = &basis.outcomes[index];
        let frame = &mut shot.frame;
        match plan {
            SitePlan::Single { wire, gate } => {
                let w = frame.wires[*wire];
                let g_inv = gate.matrix().adjoint();
                let p = to_pauli(&(&info.realized * w.matrix() * g_inv), 1)?;
                frame.wires[*wire] = WireFrame { x: p[0].0, z: p[0].1, sector: info.out_sectors[0] };
            }
            SitePlan::UphTop { wire } => {
                shot.pending.insert(
                    *wire,
                    PendingUph { top: info.realized.clone(), relay: None, link_sector: info.out_sectors[1] },
                );
                frame.wires[*wire].sector = info.out_sectors[0];
            }
            SitePlan::Relay { wire } => {
                let p = shot.pending.get_mut(wire).expect("checked in step");
                p.relay = Some(info.realized.clone());
                p.link_sector = info.out_sectors[0];
            }
            SitePlan::UphBottom { wire } => {
                let p = shot.pending.remove(wire).expect("checked in step");
                let id = CMatrix::identity(2, 2);
                let relay = p.relay.unwrap_or_else(|| id.clone());
                let total = kron(&id, &info.realized) * kron(&kron(&id, &relay), &id) * kron(&p.top, &id);
                let (a, b) = (frame.wires[*wire], frame.wires[wire + 1]);
                let b_op = total * kron(&a.matrix(), &b.matrix()) * GateKind::Uph.matrix().adjoint();
                let bits = to_pauli(&b_op, 2)?;
                frame.wires[*wire] = WireFrame { x: bits[0].0, z: bits[0].1, sector: a.sector };
                frame.wires[wire + 1] = WireFrame { x: bits[1].0, z: bits[1].1, sector: info.out_sectors[0] };
            }
            SitePlan::Readout { wire } => {
                // Sample mode only: the product basis records the `α` info bit.
                if let Some(alpha) = self.pattern.lattice.pair(site.0, site.1, Direction::Left) {
                    if let Some(i) = basis.site_modes.index_of(&alpha.info) {
                        let bits = basis.vectors[index].amplitudes().keys().next().copied().unwrap_or(0);
                        shot.bits[*wire] = ((bits >> i & 1) as u8) ^ frame.wires[*wire].x as u8;
                    }
                }
            }
            SitePlan::Isolation => {}
        }
        Ok(())
    }

    /// Folds the nonlocal sign of column `col` into the frame.
    fn close_column(&self, shot: &mut Shot, col: u32) -> Result<()> {
        let lattice = self.pattern.lattice;
        if col + 1 >= lattice.cols {
            return Ok(());
        }
        let records = shot.frame.column_records(col);
        let mut sign = 1i8;
        for row in 0..lattice.rows {
            let alpha = lattice.pair(row, col + 1, Direction::Left).expect("k = 2");
            let n = shot.frontier.pair_parity(&alpha)?;
            sign *= sign_frame(&records, row, n);
        }
        shot.frame.global_sign *= sign;
        Ok(())
    }

    /// Runs one shot to completion.
    pub fn run_shot(&mut self, input: &[Complex64], rng: &mut ChaCha8Rng, options: &RunOptions) -> Result<ShotResult> {
        let mut shot = self.start(input)?;
        let schedule = self.pattern.schedule.clone();
        let mut last_col = 0;
        for site in schedule {
            if site.1 != last_col {
                self.close_column(&mut shot, last_col)?;
                last_col = site.1;
            }
            let sel = match options.forced.get(&site) {
                Some(&k) => Selection::Forced(k),
                None => Selection::Sample(&mut *rng),
            };
            self.step(&mut shot, site, sel, options.mode)?;
        }
        let frame = shot.frame.wires.clone();
        let mut result = ShotResult {
            records: shot.frame.records.clone(),
            frame: frame.clone(),
            global_sign: shot.frame.global_sign,
            amplitudes: None,
            bits: None,
            fidelity: None,
        };
        match options.mode {
            Mode::Sample => result.bits = Some(shot.bits.clone()),
            Mode::Exact => {
                let amps = self.decode_output(&shot)?;
                if options.verify {
                    let want = spin_apply(&self.circuit, &SpinState::new(input.to_vec())?)?;
                    result.fidelity = Some(fidelity(&amps, want.amplitudes()));
                }
                result.amplitudes = Some(amps);
            }
        }
        Ok(result)
    }

    /// Reads the readout pairs and undoes the remaining frame.
    fn decode_output(&self, shot: &Shot) -> Result<Vec<Complex64>> {
        let lattice = self.pattern.lattice;
        let state = &shot.frontier.state;
        let reg = state.registry();
        let col = lattice.cols - 1;
        let wires: Vec<LogicalWire> = (0..self.pattern.wires)
            .map(|w| {
                let p = lattice.pair(wire_row(w), col, Direction::Left).expect("k = 2");
                wire_on(reg, &p, shot.frame.wires[w].sector)
            })
            .collect::<Result<_>>()?;
        let raw = read_amplitudes(state, &wires)?;
        let mut correction = CMatrix::identity(1, 1);
        for w in &shot.frame.wires {
            correction = kron(&correction, &w.inverse_matrix());
        }
        let v = correction * nalgebra::DVector::from_vec(raw);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::NullProjection);
        }
        let sign = shot.frame.global_sign as f64;
        Ok(v.iter().map(|x| x * sign / norm).collect())
    }
}

/// Runs `shots` shots from one seeded generator.
pub fn run(circuit: &CircuitIR, input: &[Complex64], seed: u64, shots: usize, options: &RunOptions) -> Result<RunResult> {
    if shots == 0 {
        return Err(Error::InvalidArgument("need at least one shot".into()));
    }
    let mut exec = Executor::new(circuit)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(shots);
    for i in 0..shots {
        log::debug!("shot {i}");
        out.push(exec.run_shot(input, &mut rng, options)?);
    }
    let expected = if options.verify {
        Some(spin_apply(circuit, &SpinState::new(input.to_vec())?)?.into_amplitudes())
    } else {
        None
    };
    Ok(RunResult { seed, mode: options.mode, shots: out, expected })
}
