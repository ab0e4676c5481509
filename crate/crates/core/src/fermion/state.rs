//! Sparse Fock-space states over an ordered mode register.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::registry::{ModeLabel, ModeRegistry};
use crate::error::{Error, Result};

/// Amplitudes below this magnitude are dropped.
pub const PRUNE_EPS: f64 = 1e-14;

/// Fermion-number parity of a state or operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn of_bits(bits: u64) -> Parity {
        if bits.count_ones() % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn from_bit(odd: bool) -> Parity {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// Parity as a bit; `None` when mixed.
    pub fn bit(self) -> Option<u8> {
        match self {
            Parity::Even => Some(0),
            Parity::Odd => Some(1),
            Parity::Mixed => None,
        }
    }

    /// Parity of a product of two fixed-parity objects.
    pub fn combine(self, other: Parity) -> Parity {
        match (self.bit(), other.bit()) {
            (Some(a), Some(b)) => Parity::from_bit((a ^ b) == 1),
            _ => Parity::Mixed,
        }
    }
}

/// `(-1)` raised to the number of occupied modes strictly below `mode`.
#[inline]
pub fn jw_sign(bits: u64, mode: usize) -> f64 {
    let below = bits & ((1u64 << mode) - 1);
    if below.count_ones() & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Sparse superposition of occupation-number basis vectors.
///
/// Bit `i` of a key is the occupation of mode `i` of the registry. Iteration
/// order is the numeric order of the keys, which keeps every derived quantity
/// (sampling included) deterministic.
#[derive(Clone, PartialEq)]
pub struct FockState {
    registry: Arc<ModeRegistry>,
    amps: BTreeMap<u64, Complex64>,
    parity: Parity,
}

impl FockState {
    /// Builds a state, pruning negligible amplitudes.
    pub fn from_map(registry: Arc<ModeRegistry>, amps: BTreeMap<u64, Complex64>) -> Self {
        let amps: BTreeMap<u64, Complex64> =
            amps.into_iter().filter(|(_, a)| a.norm() >= PRUNE_EPS).collect();
        let parity = support_parity(amps.keys().copied());
        debug_assert!(amps.keys().all(|k| registry.len() == 64 || k >> registry.len() == 0));
        Self { registry, amps, parity }
    }

    pub fn from_pairs<I>(registry: Arc<ModeRegistry>, pairs: I) -> Self
    where
        I: IntoIterator<Item = (u64, Complex64)>,
    {
        let mut amps = BTreeMap::new();
        for (k, a) in pairs {
            *amps.entry(k).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        Self::from_map(registry, amps)
    }

    pub fn vacuum(registry: Arc<ModeRegistry>) -> Self {
        Self::basis(registry, 0)
    }

    pub fn basis(registry: Arc<ModeRegistry>, bits: u64) -> Self {
        Self::from_pairs(registry, [(bits, Complex64::new(1.0, 0.0))])
    }

    /// The zero vector.
    pub fn zero(registry: Arc<ModeRegistry>) -> Self {
        Self::from_map(registry, BTreeMap::new())
    }

    /// Product of creation operators on `modes` (in the order given) applied to
    /// the vacuum, scaled by `coeff`. Handles the reordering sign.
    pub fn created(registry: Arc<ModeRegistry>, modes: &[usize], coeff: Complex64) -> Self {
        let mut bits = 0u64;
        let mut sign = 1.0;
        for &m in modes.iter().rev() {
            if bits >> m & 1 == 1 {
                return Self::zero(registry);
            }
            sign *= jw_sign(bits, m);
            bits |= 1 << m;
        }
        Self::from_pairs(registry, [(bits, coeff * sign)])
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn num_modes(&self) -> usize {
        self.registry.len()
    }

    pub fn amplitudes(&self) -> &BTreeMap<u64, Complex64> {
        &self.amps
    }

    pub fn amplitude(&self, bits: u64) -> Complex64 {
        self.amps.get(&bits).copied().unwrap_or_default()
    }

    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    /// Fixed parity of the support. The zero vector reports `Even`.
    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::from_map(self.registry.clone(), self.amps.iter().map(|(k, a)| (*k, a * c)).collect())
    }

    /// Unit-norm copy. The zero vector is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scaled(Complex64::new(1.0 / n, 0.0))
    }

    pub fn check_registry(&self, other: &ModeRegistry) -> Result<()> {
        if Arc::as_ptr(&self.registry) == other as *const _ || *self.registry == *other {
            Ok(())
        } else {
            Err(Error::RegistryMismatch(format!("{} vs {}", self.registry, other)))
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &FockState, c: Complex64) -> Result<Self> {
        other.check_registry(&self.registry)?;
        let mut amps = self.amps.clone();
        for (k, a) in &other.amps {
            *amps.entry(*k).or_default() += a * c;
        }
        Ok(Self::from_map(self.registry.clone(), amps))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockState) -> Result<Complex64> {
        other.check_registry(&self.registry)?;
        let (small, large, conj_small) = if self.amps.len() <= other.amps.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, a) in &small.amps {
            if let Some(b) = large.amps.get(k) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    /// `|⟨self|other⟩|²` for normalized inputs.
    pub fn fidelity(&self, other: &FockState) -> Result<f64> {
        let ip = self.inner(other)?;
        Ok(ip.norm_sqr() / (self.norm_sqr() * other.norm_sqr()))
    }

    /// Max amplitude difference against `other`.
    pub fn distance_inf(&self, other: &FockState) -> Result<f64> {
        other.check_registry(&self.registry)?;
        let mut d: f64 = 0.0;
        for (k, a) in &self.amps {
            d = d.max((a - other.amplitude(*k)).norm());
        }
        for (k, b) in &other.amps {
            if !self.amps.contains_key(k) {
                d = d.max(b.norm());
            }
        }
        Ok(d)
    }

    /// Same amplitudes on a registry of equal length (position-wise relabel).
    pub fn relabeled(&self, registry: Arc<ModeRegistry>) -> Result<Self> {
        if registry.len() != self.registry.len() {
            return Err(Error::RegistryMismatch(format!(
                "relabel {} modes onto {}",
                self.registry.len(),
                registry.len()
            )));
        }
        Ok(Self { registry, amps: self.amps.clone(), parity: self.parity })
    }

    /// Embeds into a registry that contains this one as a subsequence. No sign
    /// arises because the relative order of occupied modes is unchanged.
    pub fn embedded(&self, target: Arc<ModeRegistry>) -> Result<Self> {
        if !self.registry.is_subsequence_of(&target) {
            return Err(Error::RegistryMismatch(format!(
                "{} is not a subsequence of {}",
                self.registry, target
            )));
        }
        let positions: Vec<usize> =
            self.registry.labels().iter().map(|l| target.index_of(l).unwrap()).collect();
        let amps = self.amps.iter().map(|(k, a)| (scatter_bits(*k, &positions), *a)).collect();
        Ok(Self::from_map(target, amps))
    }

    /// Same physical state on a registry holding the same labels in another
    /// order; each basis vector picks up the sign of the reordering.
    pub fn reordered(&self, target: Arc<ModeRegistry>) -> Result<Self> {
        if target.len() != self.registry.len() {
            return Err(Error::RegistryMismatch(format!("reorder {} onto {}", self.registry, target)));
        }
        let positions: Vec<usize> =
            self.registry.labels().iter().map(|l| target.require(l)).collect::<Result<_>>()?;
        let amps = self.amps.iter().map(|(k, a)| {
            let seq: Vec<usize> = bit_positions(*k).map(|i| positions[i]).collect();
            (seq.iter().fold(0u64, |acc, &p| acc | 1 << p), a * permutation_sign(&seq))
        });
        Ok(Self::from_pairs(target, amps))
    }

    /// Product state `A·B|Ω⟩` on `merged`, where `a = A|Ω⟩` and `b = B|Ω⟩`.
    ///
    /// The sign for each pair of basis vectors is the permutation sign of
    /// bringing the concatenated creation string into the order of `merged`.
    pub fn join(a: &FockState, b: &FockState, merged: Arc<ModeRegistry>) -> Result<FockState> {
        for l in a.registry.labels() {
            if b.registry.contains(l) {
                return Err(Error::OverlappingRegistries);
            }
        }
        if a.num_modes() + b.num_modes() != merged.len() {
            return Err(Error::RegistryMismatch(format!(
                "join of {} and {} into {}",
                a.registry, b.registry, merged
            )));
        }
        let pos_a: Vec<usize> = a.registry.labels().iter().map(|l| merged.require(l)).collect::<Result<_>>()?;
        let pos_b: Vec<usize> = b.registry.labels().iter().map(|l| merged.require(l)).collect::<Result<_>>()?;
        let mut amps: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (ka, va) in &a.amps {
            let seq_a: Vec<usize> = bit_positions(*ka).map(|i| pos_a[i]).collect();
            for (kb, vb) in &b.amps {
                let mut seq = seq_a.clone();
                seq.extend(bit_positions(*kb).map(|i| pos_b[i]));
                let sign = permutation_sign(&seq);
                let bits = seq.iter().fold(0u64, |acc, &p| acc | 1 << p);
                *amps.entry(bits).or_default() += va * vb * sign;
            }
        }
        Ok(FockState::from_map(merged, amps))
    }

    /// Partial overlap `⟨bra|self⟩` over the modes of `bra.registry()`.
    ///
    /// With `bra = Σ c_x X_x|Ω⟩`, this is `⟨Ω_S| Σ conj(c_x) X_x† |self⟩`, where the
    /// annihilators act in the global order of `self`. The result lives on the
    /// complement registry.
    pub fn contract(&self, bra: &FockState) -> Result<FockState> {
        let positions: Vec<usize> =
            bra.registry.labels().iter().map(|l| self.registry.require(l)).collect::<Result<_>>()?;
        let site_mask = positions.iter().fold(0u64, |m, &p| m | 1 << p);
        let rest = Arc::new(self.registry.complement(site_mask));
        // Group bra terms by their global site pattern.
        let mut bra_terms: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (k, c) in bra.amps.iter() {
            let global = scatter_bits_checked(*k, &positions, &bra.registry, &self.registry)?;
            bra_terms.insert(global.0, c.conj() * global.1);
        }
        let mut out: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (n, amp) in &self.amps {
            let site = n & site_mask;
            let Some(c) = bra_terms.get(&site) else { continue };
            let sign = contraction_sign(*n, site);
            let rest_bits = gather_bits(*n, !site_mask, self.registry.len());
            *out.entry(rest_bits).or_default() += c * amp * sign;
        }
        Ok(FockState::from_map(rest, out))
    }

    /// Labels of the occupied modes of a basis key.
    pub fn occupied_labels(&self, bits: u64) -> Vec<ModeLabel> {
        bit_positions(bits).map(|i| self.registry.label(i)).collect()
    }
}

/// Sign of `X†|n⟩` restricted to the vacuum on `site`: each annihilated mode
/// picks up the occupied non-site modes before it.
#[inline]
pub(crate) fn contraction_sign(n: u64, site: u64) -> f64 {
    let others = n & !site;
    let mut flips = 0u32;
    let mut s = site;
    while s != 0 {
        let m = s.trailing_zeros() as usize;
        flips += (others & ((1u64 << m) - 1)).count_ones();
        s &= s - 1;
    }
    if flips & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn support_parity(keys: impl Iterator<Item = u64>) -> Parity {
    let mut seen: Option<Parity> = None;
    for k in keys {
        let p = Parity::of_bits(k);
        match seen {
            None => seen = Some(p),
            Some(q) if q != p => return Parity::Mixed,
            _ => {}
        }
    }
    seen.unwrap_or(Parity::Even)
}

pub(crate) fn bit_positions(bits: u64) -> impl Iterator<Item = usize> {
    let mut b = bits;
    std::iter::from_fn(move || {
        if b == 0 {
            None
        } else {
            let i = b.trailing_zeros() as usize;
            b &= b - 1;
            Some(i)
        }
    })
}

fn scatter_bits(bits: u64, positions: &[usize]) -> u64 {
    bit_positions(bits).fold(0u64, |acc, i| acc | 1 << positions[i])
}

/// Maps a key of `sub` into `full` where `sub` may be ordered differently from
/// `full`; returns the new key and the reordering sign.
fn scatter_bits_checked(
    bits: u64,
    positions: &[usize],
    _sub: &ModeRegistry,
    _full: &ModeRegistry,
) -> Result<(u64, f64)> {
    let seq: Vec<usize> = bit_positions(bits).map(|i| positions[i]).collect();
    let sign = permutation_sign(&seq);
    Ok((seq.iter().fold(0u64, |acc, &p| acc | 1 << p), sign))
}

/// Compresses the bits of `mask` into consecutive low bits.
pub(crate) fn gather_bits(bits: u64, mask: u64, len: usize) -> u64 {
    let mut out = 0u64;
    let mut j = 0;
    for i in 0..len {
        if mask >> i & 1 == 1 {
            if bits >> i & 1 == 1 {
                out |= 1 << j;
            }
            j += 1;
        }
    }
    out
}

/// Sign of the permutation sorting `seq` ascending (entries distinct).
pub(crate) fn permutation_sign(seq: &[usize]) -> f64 {
    let mut inv = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

impl fmt::Debug for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FockState{} {{", self.registry)?;
        for (i, (k, a)) in self.amps.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " {:0w$b}: {:.6}{:+.6}i", k, a.re, a.im, w = self.registry.len().max(1))?;
        }
        write!(f, " }}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn created_orders_with_sign() {
        let r = ModeRegistry::numbered(3).arc();
        let s = FockState::created(r.clone(), &[1, 0], c(1.0));
        assert_eq!(s.amplitude(0b011), c(-1.0));
        let s = FockState::created(r.clone(), &[0, 2], c(1.0));
        assert_eq!(s.amplitude(0b101), c(1.0));
        assert!(FockState::created(r, &[1, 1], c(1.0)).is_zero());
    }

    #[test]
    fn inner_products() {
        let r = ModeRegistry::numbered(2).arc();
        let vac = FockState::vacuum(r.clone());
        assert_eq!(vac.inner(&vac).unwrap(), c(1.0));
        let pair = FockState::from_pairs(r, [(0, c(1.0)), (0b11, c(1.0))]);
        assert_eq!(pair.inner(&pair).unwrap(), c(2.0));
    }

    #[test]
    fn join_signs() {
        let a = ModeLabel::free(0);
        let b = ModeLabel::free(1);
        let ra = ModeRegistry::new(vec![a]).unwrap().arc();
        let rb = ModeRegistry::new(vec![b]).unwrap().arc();
        let merged = ModeRegistry::new(vec![a, b]).unwrap().arc();
        let sa = FockState::basis(ra, 1);
        let sb = FockState::basis(rb, 1);
        let ab = FockState::join(&sa, &sb, merged.clone()).unwrap();
        assert_eq!(ab.amplitude(0b11), c(1.0));
        let ba = FockState::join(&sb, &sa, merged).unwrap();
        assert_eq!(ba.amplitude(0b11), c(-1.0));
    }

    #[test]
    fn join_rejects_overlap() {
        let r = ModeRegistry::numbered(1).arc();
        let s = FockState::vacuum(r.clone());
        assert_eq!(FockState::join(&s, &s, r), Err(Error::OverlappingRegistries));
    }

    #[test]
    fn mismatched_registries_error() {
        let s = FockState::vacuum(ModeRegistry::numbered(2).arc());
        let t = FockState::vacuum(ModeRegistry::numbered(3).arc());
        assert!(matches!(s.inner(&t), Err(Error::RegistryMismatch(_))));
    }

    #[test]
    fn pruning_and_parity() {
        let r = ModeRegistry::numbered(2).arc();
        let s = FockState::from_pairs(r.clone(), [(0b01, c(1e-16)), (0b11, c(1.0))]);
        assert_eq!(s.support_len(), 1);
        assert_eq!(s.parity(), Parity::Even);
        let m = FockState::from_pairs(r, [(0b01, c(1.0)), (0b11, c(1.0))]);
        assert_eq!(m.parity(), Parity::Mixed);
    }

    #[test]
    fn contract_with_vacuum_bra_keeps_empty_site() {
        let r = ModeRegistry::numbered(3).arc();
        let s = FockState::from_pairs(r, [(0b000, c(0.6)), (0b011, c(0.8))]);
        let bra = FockState::vacuum(ModeRegistry::new(vec![ModeLabel::free(0)]).unwrap().arc());
        let out = s.contract(&bra).unwrap();
        assert_eq!(out.support_len(), 1);
        assert_eq!(out.amplitude(0), c(0.6));
    }
}
