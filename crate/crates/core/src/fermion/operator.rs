//! Normally ordered fermionic operators.
//!
//! A monomial is stored as a pair of bit masks `(cre, ann)` standing for
//! `a†_{i1} ... a†_{ik} a_{j1} ... a_{jl}` with `i1 < ... < ik` and
//! `j1 < ... < jl`. This is exactly the canonical normal order, so two
//! monomials are like terms iff their masks agree.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::registry::ModeRegistry;
use super::state::{bit_positions, jw_sign, FockState, Parity, PRUNE_EPS};
use crate::error::{Error, Result};

/// One factor of a raw product: mode index and whether it is a creator.
pub type Factor = (usize, bool);

/// A canonical monomial with its coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermionMonomial {
    pub coeff: Complex64,
    pub cre: u64,
    pub ann: u64,
}

impl FermionMonomial {
    /// Factors in canonical order: creators ascending, then annihilators ascending.
    pub fn factors(&self) -> Vec<Factor> {
        bit_positions(self.cre)
            .map(|i| (i, true))
            .chain(bit_positions(self.ann).map(|j| (j, false)))
            .collect()
    }

    pub fn degree(&self) -> u32 {
        self.cre.count_ones() + self.ann.count_ones()
    }

    pub fn parity(&self) -> Parity {
        Parity::from_bit(self.degree() % 2 == 1)
    }

    /// Action on the basis vector `n`: new key and sign, or `None` if it vanishes.
    #[inline]
    pub fn act(cre: u64, ann: u64, n: u64) -> Option<(u64, f64)> {
        if n & ann != ann {
            return None;
        }
        let mut bits = n;
        let mut sign = 1.0;
        let mut a = ann;
        while a != 0 {
            let j = 63 - a.leading_zeros() as usize;
            sign *= jw_sign(bits, j);
            bits &= !(1u64 << j);
            a &= !(1u64 << j);
        }
        if bits & cre != 0 {
            return None;
        }
        let mut c = cre;
        while c != 0 {
            let i = 63 - c.leading_zeros() as usize;
            sign *= jw_sign(bits, i);
            bits |= 1u64 << i;
            c &= !(1u64 << i);
        }
        Some((bits, sign))
    }
}

/// Sum of canonical monomials over a shared registry.
#[derive(Clone, PartialEq)]
pub struct FermionOperator {
    registry: Arc<ModeRegistry>,
    terms: BTreeMap<(u64, u64), Complex64>,
    parity: Parity,
}

impl FermionOperator {
    fn from_terms(registry: Arc<ModeRegistry>, terms: BTreeMap<(u64, u64), Complex64>) -> Self {
        let terms: BTreeMap<_, _> = terms.into_iter().filter(|(_, c)| c.norm() >= PRUNE_EPS).collect();
        let mut parity: Option<Parity> = None;
        for (cre, ann) in terms.keys() {
            let p = Parity::from_bit((cre.count_ones() + ann.count_ones()) % 2 == 1);
            parity = match parity {
                None => Some(p),
                Some(q) if q == p => Some(q),
                Some(_) => Some(Parity::Mixed),
            };
        }
        Self { registry, terms, parity: parity.unwrap_or(Parity::Even) }
    }

    pub fn zero(registry: Arc<ModeRegistry>) -> Self {
        Self::from_terms(registry, BTreeMap::new())
    }

    pub fn scalar(registry: Arc<ModeRegistry>, c: Complex64) -> Self {
        Self::from_terms(registry, BTreeMap::from([((0, 0), c)]))
    }

    pub fn identity(registry: Arc<ModeRegistry>) -> Self {
        Self::scalar(registry, Complex64::new(1.0, 0.0))
    }

    pub fn create(registry: Arc<ModeRegistry>, mode: usize) -> Self {
        Self::normal_order(registry, &[(mode, true)], Complex64::new(1.0, 0.0))
    }

    pub fn annihilate(registry: Arc<ModeRegistry>, mode: usize) -> Self {
        Self::normal_order(registry, &[(mode, false)], Complex64::new(1.0, 0.0))
    }

    /// `a†_i a_i`.
    pub fn number(registry: Arc<ModeRegistry>, mode: usize) -> Self {
        Self::normal_order(registry, &[(mode, true), (mode, false)], Complex64::new(1.0, 0.0))
    }

    /// Canonical form of `coeff * word[0] * word[1] * ...`.
    ///
    /// Adjacent out-of-order factors are swapped with a sign; `a_i a_i†` also
    /// spawns the contraction term. Repeated identical factors vanish.
    pub fn normal_order(registry: Arc<ModeRegistry>, word: &[Factor], coeff: Complex64) -> Self {
        let mut out: BTreeMap<(u64, u64), Complex64> = BTreeMap::new();
        let mut stack: Vec<(Vec<Factor>, Complex64)> = vec![(word.to_vec(), coeff)];
        let key = |f: &Factor| (if f.1 { 0u8 } else { 1u8 }, f.0);
        while let Some((w, c)) = stack.pop() {
            let mut swapped = false;
            let mut dead = false;
            for k in 0..w.len().saturating_sub(1) {
                let (p, q) = (w[k], w[k + 1]);
                if key(&p) == key(&q) {
                    dead = true;
                    break;
                }
                if key(&p) > key(&q) {
                    let mut sw = w.clone();
                    sw.swap(k, k + 1);
                    stack.push((sw, -c));
                    if p.0 == q.0 && !p.1 && q.1 {
                        let mut contracted = w.clone();
                        contracted.drain(k..k + 2);
                        stack.push((contracted, c));
                    }
                    swapped = true;
                    break;
                }
            }
            if dead || swapped {
                continue;
            }
            let mut cre = 0u64;
            let mut ann = 0u64;
            for (m, d) in &w {
                if *d {
                    cre |= 1 << m;
                } else {
                    ann |= 1 << m;
                }
            }
            *out.entry((cre, ann)).or_default() += c;
        }
        Self::from_terms(registry, out)
    }

    /// `coeff * |n⟩`'s creation string, i.e. `a†` on the bits of `n` ascending.
    pub fn creation_string(registry: Arc<ModeRegistry>, bits: u64, coeff: Complex64) -> Self {
        Self::from_terms(registry, BTreeMap::from([((bits, 0), coeff)]))
    }

    /// The operator `Σ c_n C_n` with `state = Σ c_n C_n|Ω⟩`.
    pub fn from_state(state: &FockState) -> Self {
        Self::from_terms(
            state.registry().clone(),
            state.amplitudes().iter().map(|(k, c)| ((*k, 0), *c)).collect(),
        )
    }

    /// Projector onto the vacuum of the modes in `mask`: `Π (1 - n_i)`.
    pub fn vacuum_projector(registry: Arc<ModeRegistry>, mask: u64) -> Self {
        let mut op = Self::identity(registry.clone());
        for i in bit_positions(mask) {
            let n = Self::number(registry.clone(), i);
            op = op.mul(&Self::identity(registry.clone()).sub(&n).unwrap()).unwrap();
        }
        op
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = FermionMonomial> + '_ {
        self.terms.iter().map(|(&(cre, ann), &coeff)| FermionMonomial { coeff, cre, ann })
    }

    pub fn coefficient(&self, cre: u64, ann: u64) -> Complex64 {
        self.terms.get(&(cre, ann)).copied().unwrap_or_default()
    }

    fn check(&self, other: &ModeRegistry) -> Result<()> {
        if Arc::as_ptr(&self.registry) == other as *const _ || *self.registry == *other {
            Ok(())
        } else {
            Err(Error::RegistryMismatch(format!("{} vs {}", self.registry, other)))
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::from_terms(self.registry.clone(), self.terms.iter().map(|(k, v)| (*k, v * c)).collect())
    }

    pub fn add(&self, other: &FermionOperator) -> Result<Self> {
        self.check(&other.registry)?;
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            *terms.entry(*k).or_default() += v;
        }
        Ok(Self::from_terms(self.registry.clone(), terms))
    }

    pub fn sub(&self, other: &FermionOperator) -> Result<Self> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &FermionOperator) -> Result<Self> {
        self.check(&other.registry)?;
        let mut acc = BTreeMap::new();
        for a in self.terms() {
            for b in other.terms() {
                let mut word = a.factors();
                word.extend(b.factors());
                let prod = Self::normal_order(self.registry.clone(), &word, a.coeff * b.coeff);
                for (k, v) in prod.terms {
                    *acc.entry(k).or_default() += v;
                }
            }
        }
        Ok(Self::from_terms(self.registry.clone(), acc))
    }

    /// Hermitian adjoint. Reversing each group of `k` factors costs
    /// `(-1)^{k(k-1)/2}`; no contraction terms arise.
    pub fn adjoint(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&(cre, ann), c)| {
                let k = cre.count_ones();
                let l = ann.count_ones();
                let flips = k * k.saturating_sub(1) / 2 + l * l.saturating_sub(1) / 2;
                let s = if flips % 2 == 1 { -1.0 } else { 1.0 };
                ((ann, cre), c.conj() * s)
            })
            .collect();
        Self::from_terms(self.registry.clone(), terms)
    }

    /// `self · s`.
    pub fn apply(&self, s: &FockState) -> Result<FockState> {
        self.check(s.registry())?;
        let mut out: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (&(cre, ann), c) in &self.terms {
            for (&n, a) in s.amplitudes() {
                if let Some((m, sign)) = FermionMonomial::act(cre, ann, n) {
                    *out.entry(m).or_default() += c * a * sign;
                }
            }
        }
        Ok(FockState::from_map(s.registry().clone(), out))
    }

    /// Largest coefficient difference.
    pub fn distance_inf(&self, other: &FermionOperator) -> Result<f64> {
        self.check(&other.registry)?;
        let diff = self.sub(other)?;
        Ok(diff.terms.values().map(|c| c.norm()).fold(0.0, f64::max))
    }
}

impl fmt::Debug for FermionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.4}{:+.4}i)", m.coeff.re, m.coeff.im)?;
            for (mode, d) in m.factors() {
                write!(f, " a{}{}", mode, if d { "†" } else { "" })?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn reg(n: usize) -> Arc<ModeRegistry> {
        ModeRegistry::numbered(n).arc()
    }

    #[test]
    fn anticommutator_expands() {
        let op = FermionOperator::normal_order(reg(1), &[(0, false), (0, true)], one());
        assert_eq!(op.num_terms(), 2);
        assert_eq!(op.coefficient(0, 0), one());
        assert_eq!(op.coefficient(1, 1), -one());
    }

    #[test]
    fn exclusion_and_swap() {
        assert!(FermionOperator::normal_order(reg(1), &[(0, true), (0, true)], one()).is_zero());
        let op = FermionOperator::normal_order(reg(2), &[(1, false), (0, true)], one());
        assert_eq!(op.num_terms(), 1);
        assert_eq!(op.coefficient(0b01, 0b10), -one());
    }

    #[test]
    fn apply_signs() {
        let r = reg(3);
        let s = FockState::vacuum(r.clone());
        let out = FermionOperator::create(r.clone(), 0).apply(&s).unwrap();
        assert_eq!(out.amplitude(0b001), one());
        let s = FockState::basis(r.clone(), 0b001);
        let out = FermionOperator::create(r, 1).apply(&s).unwrap();
        assert_eq!(out.amplitude(0b011), -one());
    }

    #[test]
    fn adjoint_reverses_strings() {
        let r = reg(3);
        let op = FermionOperator::creation_string(r.clone(), 0b111, one());
        let adj = op.adjoint();
        // (a0† a1† a2†)† = a2 a1 a0 = -a0 a1 a2
        assert_eq!(adj.coefficient(0, 0b111), -one());
        let s = FockState::basis(r, 0b111);
        let back = adj.apply(&s).unwrap();
        assert_eq!(back.amplitude(0), one());
    }

    #[test]
    fn vacuum_projector_kills_occupied() {
        let r = reg(2);
        let p = FermionOperator::vacuum_projector(r.clone(), 0b11);
        let s = FockState::from_pairs(r, [(0, one()), (0b01, one()), (0b11, one())]);
        let out = p.apply(&s).unwrap();
        assert_eq!(out.support_len(), 1);
        assert_eq!(out.amplitude(0), one());
    }

    #[test]
    fn parity_tracking() {
        let r = reg(2);
        assert_eq!(FermionOperator::create(r.clone(), 0).parity(), Parity::Odd);
        assert_eq!(FermionOperator::number(r.clone(), 0).parity(), Parity::Even);
        let mixed = FermionOperator::identity(r.clone()).add(&FermionOperator::create(r, 1)).unwrap();
        assert_eq!(mixed.parity(), Parity::Mixed);
    }
}
