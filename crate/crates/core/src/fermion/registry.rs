//! Mode labels and the globally ordered mode register.
//!
//! The order of labels in a [`ModeRegistry`] is the fermionic ordering used for
//! every sign computation: mode `i` of a registry corresponds to bit `i` of a
//! basis vector, and a basis vector `|n⟩` stands for
//! `(a_0†)^{n_0} (a_1†)^{n_1} ... |Ω⟩` with the lowest index leftmost.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register we can address with a `u64` occupation bitstring.
pub const MAX_MODES: usize = 63;

/// Where a mode lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Place {
    /// Lattice site, ordered row-major.
    Site { row: u32, col: u32 },
    /// Boundary mode not attached to a site.
    Boundary(u32),
    /// Free-standing mode (teleportation gadgets, tests).
    Free(u32),
}

/// Role of a mode within its site. Declaration order is the within-site order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    Delta,
    DeltaP,
    Alpha,
    AlphaP,
    Beta,
    BetaP,
    Gamma,
    GammaP,
    Physical,
    Info,
    Parity,
    Plain,
}

impl Role {
    pub fn symbol(self) -> &'static str {
        match self {
            Role::Delta => "δ",
            Role::DeltaP => "δ'",
            Role::Alpha => "α",
            Role::AlphaP => "α'",
            Role::Beta => "β",
            Role::BetaP => "β'",
            Role::Gamma => "γ",
            Role::GammaP => "γ'",
            Role::Physical => "c",
            Role::Info => "info",
            Role::Parity => "parity",
            Role::Plain => "m",
        }
    }
}

/// A unique mode label. The derived ordering is the global fermionic order:
/// place first (row-major for sites), then role, then copy index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeLabel {
    pub place: Place,
    pub role: Role,
    pub copy: u8,
}

impl ModeLabel {
    pub const fn site(row: u32, col: u32, role: Role) -> Self {
        Self { place: Place::Site { row, col }, role, copy: 0 }
    }

    pub const fn site_copy(row: u32, col: u32, role: Role, copy: u8) -> Self {
        Self { place: Place::Site { row, col }, role, copy }
    }

    /// Plain numbered mode, handy for reproducing small gadgets.
    pub const fn free(n: u32) -> Self {
        Self { place: Place::Free(n), role: Role::Plain, copy: 0 }
    }

    pub fn site_coord(&self) -> Option<(u32, u32)> {
        match self.place {
            Place::Site { row, col } => Some((row, col)),
            _ => None,
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.place {
            Place::Site { row, col } => write!(f, "{}({},{})", self.role.symbol(), row, col)?,
            Place::Boundary(i) => write!(f, "{}[b{}]", self.role.symbol(), i)?,
            Place::Free(i) => write!(f, "{}{}", self.role.symbol(), i)?,
        }
        if self.copy > 0 {
            write!(f, "_{}", self.copy)?;
        }
        Ok(())
    }
}

/// Ordered list of unique mode labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeRegistry {
    labels: Vec<ModeLabel>,
}

impl ModeRegistry {
    /// Registry in the given order. The order is kept as-is: it need not be
    /// sorted, which lets gadgets use their own numbering.
    pub fn new(labels: Vec<ModeLabel>) -> Result<Self> {
        if labels.len() > MAX_MODES {
            return Err(Error::RegistryTooLarge(labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateMode(l.to_string()));
            }
        }
        Ok(Self { labels })
    }

    /// Registry sorted into canonical global order.
    pub fn sorted(mut labels: Vec<ModeLabel>) -> Result<Self> {
        labels.sort();
        Self::new(labels)
    }

    /// `n` plain modes `m0 .. m{n-1}`.
    pub fn numbered(n: usize) -> Self {
        Self::new((0..n as u32).map(ModeLabel::free).collect()).expect("numbered registry")
    }

    pub fn empty() -> Self {
        Self { labels: Vec::new() }
    }

    pub fn arc(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> ModeLabel {
        self.labels[i]
    }

    pub fn index_of(&self, label: &ModeLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn require(&self, label: &ModeLabel) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    pub fn contains(&self, label: &ModeLabel) -> bool {
        self.labels.contains(label)
    }

    /// True if the labels are in strictly ascending global order.
    pub fn is_canonical(&self) -> bool {
        self.labels.windows(2).all(|w| w[0] < w[1])
    }

    /// Bit mask of the given labels inside this registry.
    pub fn mask_of(&self, labels: &[ModeLabel]) -> Result<u64> {
        let mut m = 0u64;
        for l in labels {
            m |= 1 << self.require(l)?;
        }
        Ok(m)
    }

    /// Registry made of the modes not in `mask`, in the same relative order.
    pub fn complement(&self, mask: u64) -> Self {
        Self {
            labels: self
                .labels
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 0)
                .map(|(_, l)| *l)
                .collect(),
        }
    }

    /// True if `self` is a subsequence of `other` (same relative order).
    pub fn is_subsequence_of(&self, other: &ModeRegistry) -> bool {
        let mut it = other.labels.iter();
        self.labels.iter().all(|l| it.any(|o| o == l))
    }
}

impl fmt::Display for ModeRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn site_order_is_row_major_then_role() {
        let a = ModeLabel::site(0, 1, Role::Delta);
        let b = ModeLabel::site(0, 0, Role::GammaP);
        let c = ModeLabel::site(1, 0, Role::Delta);
        assert!(b < a && a < c);
        assert!(ModeLabel::site(0, 0, Role::GammaP) < ModeLabel::site(0, 0, Role::Physical));
        assert!(ModeLabel::site(0, 0, Role::Delta) < ModeLabel::site(0, 0, Role::Alpha));
    }

    #[test]
    fn rejects_duplicates_and_oversize() {
        let l = ModeLabel::free(3);
        assert!(matches!(ModeRegistry::new(vec![l, l]), Err(Error::DuplicateMode(_))));
        let many = (0..64).map(ModeLabel::free).collect();
        assert!(matches!(ModeRegistry::new(many), Err(Error::RegistryTooLarge(64))));
    }

    #[test]
    fn complement_keeps_order() {
        let r = ModeRegistry::numbered(5);
        let c = r.complement(0b01010);
        assert_eq!(c.labels(), &[ModeLabel::free(0), ModeLabel::free(2), ModeLabel::free(4)]);
        assert!(c.is_subsequence_of(&r));
    }
}
