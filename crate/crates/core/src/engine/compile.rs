//! Circuit to lattice layout.
//!
//! Wire `w` runs along row `2w`; odd rows isolate neighbouring wires. Gates are
//! packed into layers as early as their wires allow and each layer becomes one
//! column, followed by a readout column. A two-wire gate uses the upper wire
//! row, the isolation row between (which relays the link) and the lower wire
//! row of one column.

use std::collections::BTreeMap;

use super::circuit::{CircuitIR, Gate};
use crate::error::{Error, Result};
use crate::fermion::GateKind;
use crate::lattice::{Direction, Lattice};
use crate::linalg::CMatrix;
use crate::teleport::{OutputPair, SiteLayout};

pub type Site = (u32, u32);

/// What a site does.
#[derive(Debug, Clone, PartialEq)]
pub enum SitePlan {
    /// Single-wire gate teleported from `α` to the next column; identity on idle wires.
    Single { wire: usize, gate: GateKind },
    /// Upper half of a two-wire gate on wires `(wire, wire + 1)`.
    UphTop { wire: usize },
    /// Isolation-row site passing the link downwards.
    Relay { wire: usize },
    UphBottom { wire: usize },
    Isolation,
    Readout { wire: usize },
}

#[derive(Debug, Clone)]
pub struct MeasurementPattern {
    pub lattice: Lattice,
    pub wires: usize,
    /// Column-major, top to bottom.
    pub schedule: Vec<Site>,
    pub plans: BTreeMap<Site, SitePlan>,
}

pub fn wire_row(wire: usize) -> u32 {
    2 * wire as u32
}

/// Lays the circuit out on a lattice.
pub fn compile(circuit: &CircuitIR) -> Result<MeasurementPattern> {
    circuit.validate()?;
    let n = circuit.wires;
    let mut free = vec![0usize; n];
    let mut layered: Vec<(usize, &Gate)> = Vec::new();
    for g in &circuit.gates {
        let ws = g.wires();
        let layer = ws.iter().map(|&w| free[w]).max().unwrap_or(0);
        for &w in &ws {
            free[w] = layer + 1;
        }
        layered.push((layer, g));
    }
    let layers = free.iter().copied().max().unwrap_or(0);
    let rows = (2 * n - 1) as u32;
    let cols = layers as u32 + 1;
    let lattice = Lattice::new(rows, cols, 2)?;

    let mut plans: BTreeMap<Site, SitePlan> = BTreeMap::new();
    for c in 0..cols {
        for r in 0..rows {
            let plan = if c + 1 == cols {
                if r % 2 == 0 {
                    SitePlan::Readout { wire: (r / 2) as usize }
                } else {
                    SitePlan::Isolation
                }
            } else if r % 2 == 0 {
                SitePlan::Single { wire: (r / 2) as usize, gate: GateKind::Uf(CMatrix::identity(2, 2)) }
            } else {
                SitePlan::Isolation
            };
            plans.insert((r, c), plan);
        }
    }
    for (layer, g) in layered {
        let c = layer as u32;
        match g {
            Gate::Zf { theta, wire } => {
                plans.insert((wire_row(*wire), c), SitePlan::Single { wire: *wire, gate: GateKind::Zf(*theta) });
            }
            Gate::Hf { wire } => {
                plans.insert((wire_row(*wire), c), SitePlan::Single { wire: *wire, gate: GateKind::Hf });
            }
            Gate::Uph { wires: [a, b] } => {
                let top = (*a).min(*b);
                if a.abs_diff(*b) != 1 {
                    return Err(Error::Circuit { path: "gates".into(), message: "non-adjacent two-wire gate".into() });
                }
                plans.insert((wire_row(top), c), SitePlan::UphTop { wire: top });
                plans.insert((wire_row(top) + 1, c), SitePlan::Relay { wire: top });
                plans.insert((wire_row(top) + 2, c), SitePlan::UphBottom { wire: top });
            }
        }
    }
    let schedule = (0..cols).flat_map(|c| (0..rows).map(move |r| (r, c))).collect();
    Ok(MeasurementPattern { lattice, wires: n, schedule, plans })
}

impl MeasurementPattern {
    pub fn plan(&self, site: Site) -> &SitePlan {
        &self.plans[&site]
    }

    /// Pair roles of a teleporting site. `None` for product-basis sites.
    pub fn site_layout(&self, site: Site) -> Option<SiteLayout> {
        let l = &self.lattice;
        let (r, c) = site;
        let p = |r: u32, c: u32, d: Direction| l.pair(r, c, d);
        let right = || OutputPair { site: p(r, c, Direction::Right).unwrap(), partner: p(r, c + 1, Direction::Left).unwrap() };
        let down = || OutputPair { site: p(r, c, Direction::Down).unwrap(), partner: p(r + 1, c, Direction::Up).unwrap() };
        let some = |ds: &[Direction]| ds.iter().filter_map(|&d| p(r, c, d)).collect::<Vec<_>>();
        match self.plan(site) {
            SitePlan::Single { .. } => Some(SiteLayout {
                inputs: some(&[Direction::Left]),
                outputs: vec![right()],
                spectators: some(&[Direction::Up, Direction::Down]),
            }),
            SitePlan::UphTop { .. } => Some(SiteLayout {
                inputs: some(&[Direction::Left]),
                outputs: vec![right(), down()],
                spectators: some(&[Direction::Up]),
            }),
            SitePlan::Relay { .. } => Some(SiteLayout {
                inputs: some(&[Direction::Up]),
                outputs: vec![down()],
                spectators: some(&[Direction::Left, Direction::Right]),
            }),
            SitePlan::UphBottom { .. } => Some(SiteLayout {
                inputs: some(&[Direction::Up, Direction::Left]),
                outputs: vec![right()],
                spectators: some(&[Direction::Down]),
            }),
            SitePlan::Isolation | SitePlan::Readout { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_gate_geometry() {
        let c = CircuitIR::new(1, vec![Gate::Hf { wire: 0 }]).unwrap();
        let p = compile(&c).unwrap();
        assert_eq!((p.lattice.rows, p.lattice.cols), (1, 2));
        assert_eq!(p.schedule, vec![(0, 0), (0, 1)]);
    }

    #[test]
    fn uph_geometry() {
        let c = CircuitIR::new(2, vec![Gate::Uph { wires: [0, 1] }]).unwrap();
        let p = compile(&c).unwrap();
        assert_eq!((p.lattice.rows, p.lattice.cols), (3, 2));
        assert_eq!(p.plan((1, 0)), &SitePlan::Relay { wire: 0 });
        assert_eq!(p.plan((1, 1)), &SitePlan::Isolation);
    }

    #[test]
    fn empty_circuit_is_readout_only() {
        let p = compile(&CircuitIR::new(1, vec![]).unwrap()).unwrap();
        assert_eq!(p.lattice.cols, 1);
        assert_eq!(p.plan((0, 0)), &SitePlan::Readout { wire: 0 });
    }

    #[test]
    fn layers_pack_early() {
        let c = CircuitIR::new(
            2,
            vec![Gate::Hf { wire: 0 }, Gate::Hf { wire: 1 }, Gate::Uph { wires: [1, 0] }, Gate::Zf { theta: 1.0, wire: 1 }],
        )
        .unwrap();
        let p = compile(&c).unwrap();
        assert_eq!(p.lattice.cols, 4);
        assert!(matches!(p.plan((2, 2)), SitePlan::Single { gate: GateKind::Zf(_), .. }));
    }

    #[test]
    fn rejects_non_adjacent() {
        assert!(CircuitIR::new(3, vec![Gate::Uph { wires: [0, 2] }]).is_err());
    }
}
