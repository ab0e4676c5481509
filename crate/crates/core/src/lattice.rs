//! Square-lattice resource geometry with `k` bonds per direction.
//!
//! Every site owns up to four groups of virtual modes: `δ` (up), `α` (left),
//! `β` (right) and `γ` (down), with a primed copy when `k = 2`. The `α` modes
//! of column 0 are the boundary inputs. Bonds join `β` of `(i, j)` to `α` of
//! `(i, j+1)` and `γ` of `(i, j)` to `δ` of `(i+1, j)`, each created as
//! `(1 + from† to†)/√2`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{FockState, ModeLabel, ModeRegistry, Parity, Role};
use crate::teleport::{make_bond, product_basis, MeasurementBasis, PairRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Left,
    Right,
    Down,
}

impl Direction {
    fn roles(self) -> [Role; 2] {
        match self {
            Direction::Up => [Role::Delta, Role::DeltaP],
            Direction::Left => [Role::Alpha, Role::AlphaP],
            Direction::Right => [Role::Beta, Role::BetaP],
            Direction::Down => [Role::Gamma, Role::GammaP],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bond {
    pub from: ModeLabel,
    pub to: ModeLabel,
    pub orientation: Orientation,
    /// 1-based copy index.
    pub copy: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lattice {
    pub rows: u32,
    pub cols: u32,
    pub k: u8,
}

/// Serializable description of a lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    pub rows: u32,
    pub cols: u32,
    pub k: u8,
    pub modes: Vec<String>,
    pub bonds: Vec<BondRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BondRecord {
    pub from: String,
    pub to: String,
    pub orientation: Orientation,
    pub copy: u8,
}

impl Lattice {
    pub fn new(rows: u32, cols: u32, k: u8) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("lattice needs at least one row and column".into()));
        }
        if !(1..=2).contains(&k) {
            return Err(Error::InvalidArgument(format!("bond multiplicity {k} not supported")));
        }
        Ok(Self { rows, cols, k })
    }

    pub fn has(&self, row: u32, col: u32, dir: Direction) -> bool {
        match dir {
            Direction::Up => row > 0,
            Direction::Left => true,
            Direction::Right => col + 1 < self.cols,
            Direction::Down => row + 1 < self.rows,
        }
    }

    /// Modes of one direction group, or empty if absent.
    pub fn modes_of(&self, row: u32, col: u32, dir: Direction) -> Vec<ModeLabel> {
        if !self.has(row, col, dir) {
            return vec![];
        }
        dir.roles()[..self.k as usize].iter().map(|&r| ModeLabel::site(row, col, r)).collect()
    }

    /// The `(unprimed, primed)` pair of a direction when `k = 2`.
    pub fn pair(&self, row: u32, col: u32, dir: Direction) -> Option<PairRef> {
        let m = self.modes_of(row, col, dir);
        (m.len() == 2).then(|| PairRef::new(m[0], m[1]))
    }

    /// Present pairs of a site in canonical order.
    pub fn site_pairs(&self, row: u32, col: u32) -> Vec<PairRef> {
        [Direction::Up, Direction::Left, Direction::Right, Direction::Down]
            .iter()
            .filter_map(|&d| self.pair(row, col, d))
            .collect()
    }

    pub fn site_modes(&self, row: u32, col: u32) -> Vec<ModeLabel> {
        let mut m: Vec<ModeLabel> = [Direction::Up, Direction::Left, Direction::Right, Direction::Down]
            .iter()
            .flat_map(|&d| self.modes_of(row, col, d))
            .collect();
        m.sort();
        m
    }

    pub fn site_registry(&self, row: u32, col: u32) -> Arc<ModeRegistry> {
        ModeRegistry::new(self.site_modes(row, col)).expect("site modes are unique").arc()
    }

    fn registry_labels(&self) -> Vec<ModeLabel> {
        let mut all = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                all.extend(self.site_modes(r, c));
            }
        }
        all
    }

    /// Every virtual mode in canonical order. Fails above the mode limit; the
    /// engine never needs the whole registry at once.
    pub fn registry(&self) -> Result<Arc<ModeRegistry>> {
        Ok(ModeRegistry::new(self.registry_labels())?.arc())
    }

    pub fn num_modes(&self) -> usize {
        self.registry_labels().len()
    }

    /// Bonds leaving `(row, col)`: rightward copies, then downward copies.
    pub fn outgoing_bonds(&self, row: u32, col: u32) -> Vec<Bond> {
        let mut out = Vec::new();
        let right = self.modes_of(row, col, Direction::Right);
        let left_next = if right.is_empty() { vec![] } else { self.modes_of(row, col + 1, Direction::Left) };
        for (i, (f, t)) in right.iter().zip(&left_next).enumerate() {
            out.push(Bond { from: *f, to: *t, orientation: Orientation::Horizontal, copy: i as u8 + 1 });
        }
        let down = self.modes_of(row, col, Direction::Down);
        let up_next = if down.is_empty() { vec![] } else { self.modes_of(row + 1, col, Direction::Up) };
        for (i, (f, t)) in down.iter().zip(&up_next).enumerate() {
            out.push(Bond { from: *f, to: *t, orientation: Orientation::Vertical, copy: i as u8 + 1 });
        }
        out
    }

    /// All bonds in construction order (sites row-major).
    pub fn bonds(&self) -> Vec<Bond> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.extend(self.outgoing_bonds(r, c));
            }
        }
        out
    }

    /// Column-0 `α` modes, top to bottom.
    pub fn boundary_modes(&self) -> Vec<ModeLabel> {
        (0..self.rows).flat_map(|r| self.modes_of(r, 0, Direction::Left)).collect()
    }

    pub fn boundary_registry(&self) -> Arc<ModeRegistry> {
        ModeRegistry::new(self.boundary_modes()).expect("unique").arc()
    }

    /// `(1 + from† to†)|Ω⟩/√2` on the two bond modes.
    pub fn bond_state(bond: &Bond) -> Result<FockState> {
        let reg = ModeRegistry::new(vec![bond.from, bond.to])?.arc();
        make_bond(reg, 0, 1)
    }

    /// Product basis of a whole site.
    pub fn isolation_basis(&self, row: u32, col: u32) -> Result<MeasurementBasis> {
        self.check_site(row, col)?;
        product_basis(self.site_registry(row, col), self.site_pairs(row, col))
    }

    /// Occupation basis of the `α` pair of a site in the last column.
    pub fn readout_basis(&self, row: u32, col: u32) -> Result<MeasurementBasis> {
        self.check_site(row, col)?;
        if col + 1 != self.cols {
            return Err(Error::InvalidArgument(format!("site ({row},{col}) is not in the last column")));
        }
        let p = self
            .pair(row, col, Direction::Left)
            .ok_or_else(|| Error::InvalidArgument("readout needs paired modes".into()))?;
        crate::teleport::occupation_basis(&[p])
    }

    fn check_site(&self, row: u32, col: u32) -> Result<()> {
        if row >= self.rows || col >= self.cols {
            return Err(Error::InvalidArgument(format!("site ({row},{col}) outside the lattice")));
        }
        Ok(())
    }

    /// Resource state description with `input` on the boundary modes.
    pub fn build_resource(&self, input: FockState) -> Result<Resource> {
        let boundary = self.boundary_registry();
        if **input.registry() != *boundary {
            return Err(Error::RegistryMismatch(format!(
                "input lives on {} but the boundary is {}",
                input.registry(),
                boundary
            )));
        }
        if input.parity() == Parity::Mixed {
            return Err(Error::MixedParity);
        }
        if self.k == 2 {
            for r in 0..self.rows as usize {
                let mut seen = None;
                for bits in input.amplitudes().keys() {
                    let p = (bits >> (2 * r) ^ bits >> (2 * r + 1)) & 1;
                    if seen.is_some_and(|s| s != p) {
                        return Err(Error::MixedParity);
                    }
                    seen = Some(p);
                }
            }
        }
        Ok(Resource { lattice: *self, input })
    }

    pub fn geometry(&self) -> LatticeGeometry {
        LatticeGeometry {
            rows: self.rows,
            cols: self.cols,
            k: self.k,
            modes: self.registry_labels().iter().map(|l| l.to_string()).collect(),
            bonds: self
                .bonds()
                .iter()
                .map(|b| BondRecord {
                    from: b.from.to_string(),
                    to: b.to.to_string(),
                    orientation: b.orientation,
                    copy: b.copy,
                })
                .collect(),
        }
    }

    pub fn geometry_json(&self) -> String {
        serde_json::to_string_pretty(&self.geometry()).expect("geometry serializes")
    }
}

/// Boundary input plus the implied bond product; bonds are attached lazily by
/// the engine and only materialized on request.
#[derive(Debug, Clone)]
pub struct Resource {
    pub lattice: Lattice,
    pub input: FockState,
}

impl Resource {
    /// The full state on [`Lattice::registry`]. Exponential in the bond count.
    pub fn materialize(&self) -> Result<FockState> {
        let n = self.lattice.num_modes();
        if n > crate::fermion::MAX_MODES {
            return Err(Error::RegistryTooLarge(n));
        }
        let mut state = self.input.clone();
        for bond in self.lattice.bonds() {
            let b = Lattice::bond_state(&bond)?;
            let mut labels: Vec<ModeLabel> = state.registry().labels().to_vec();
            labels.extend([bond.from, bond.to]);
            labels.sort();
            state = FockState::join(&state, &b, ModeRegistry::new(labels)?.arc())?;
        }
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let l = Lattice::new(2, 2, 2).unwrap();
        assert_eq!(l.bonds().len(), 8);
        assert_eq!(l.site_modes(0, 0).len(), 6);
        let l3 = Lattice::new(3, 3, 2).unwrap();
        assert_eq!(l3.site_modes(1, 1).len(), 8);
        assert_eq!(l3.isolation_basis(1, 1).unwrap().len(), 256);
        assert_eq!(l3.isolation_basis(0, 1).unwrap().len(), 64);
    }

    #[test]
    fn one_by_two_resource() {
        let l = Lattice::new(1, 2, 2).unwrap();
        let input = FockState::vacuum(l.boundary_registry());
        let s = l.build_resource(input).unwrap().materialize().unwrap();
        assert_eq!(s.num_modes(), 6);
        assert_eq!(s.support_len(), 4);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_wrong_input_modes() {
        let l = Lattice::new(1, 2, 2).unwrap();
        let bad = FockState::vacuum(ModeRegistry::numbered(2).arc());
        assert!(matches!(l.build_resource(bad), Err(Error::RegistryMismatch(_))));
    }

    #[test]
    fn geometry_round_trips() {
        let g = Lattice::new(2, 3, 1).unwrap().geometry();
        let back: LatticeGeometry = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(g, back);
    }
}
