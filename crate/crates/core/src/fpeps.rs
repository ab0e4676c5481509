//! Fermionic PEPS: fixed-parity on-site projections applied to the virtual
//! bond state, contracted against the virtual vacuum.
//!
//! A projection on site `s` is `P = Σ_n A[n] C_c(n) C_v(n)†`, where `C_c`
//! creates the physical modes of the pattern in ascending order and `C_v(n)†`
//! annihilates its virtual modes in descending order. Physical modes sort
//! after the virtual modes of their site. Sites are eliminated column by
//! column, top to bottom; bonds are attached when their first site is reached.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{FermionOperator, FockState, ModeLabel, ModeRegistry, Parity, Role};
use crate::lattice::{Bond, Lattice};

pub type Site = (u32, u32);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub site: Site,
    /// Number of physical modes on the site.
    pub physical: u8,
    /// Amplitudes keyed by the joint pattern over the site's virtual modes
    /// (canonical order, low bits) followed by its physical modes.
    pub coefficients: BTreeMap<u64, Complex64>,
    pub parity: u8,
}

pub fn physical_label(site: Site, copy: u8) -> ModeLabel {
    ModeLabel::site_copy(site.0, site.1, Role::Physical, copy)
}

impl Projection {
    /// Validated projection. Every pattern must have parity `parity`.
    pub fn new(
        lattice: &Lattice,
        site: Site,
        physical: u8,
        coefficients: BTreeMap<u64, Complex64>,
        parity: u8,
    ) -> Result<Self> {
        let p = Self { site, physical, coefficients, parity };
        p.validate(lattice)?;
        Ok(p)
    }

    pub fn validate(&self, lattice: &Lattice) -> Result<()> {
        let (r, c) = self.site;
        if r >= lattice.rows || c >= lattice.cols {
            return Err(Error::InvalidArgument(format!("projection site ({r},{c}) outside the lattice")));
        }
        let n = lattice.site_modes(r, c).len() + self.physical as usize;
        for (&pattern, a) in &self.coefficients {
            if pattern >> n != 0 {
                return Err(Error::InvalidArgument(format!("pattern {pattern:#b} exceeds {n} site modes")));
            }
            if a.norm() > 0.0 && (pattern.count_ones() % 2) as u8 != self.parity {
                return Err(Error::ParityViolation(pattern));
            }
        }
        Ok(())
    }

    /// Virtual then physical labels of the site.
    pub fn local_labels(&self, lattice: &Lattice) -> Vec<ModeLabel> {
        let mut labels = lattice.site_modes(self.site.0, self.site.1);
        labels.extend((0..self.physical).map(|l| physical_label(self.site, l)));
        labels
    }

    /// Copies every virtual mode onto its own physical mode.
    pub fn trivial(lattice: &Lattice, site: Site) -> Self {
        let nv = lattice.site_modes(site.0, site.1).len();
        let coefficients = (0..1u64 << nv).map(|v| (v | v << nv, Complex64::new(1.0, 0.0))).collect();
        Self { site, physical: nv as u8, coefficients, parity: 0 }
    }

    /// Random amplitudes on every pattern of the given parity.
    pub fn random<R: Rng + ?Sized>(lattice: &Lattice, site: Site, physical: u8, parity: u8, rng: &mut R) -> Self {
        let n = lattice.site_modes(site.0, site.1).len() + physical as usize;
        let coefficients = (0..1u64 << n)
            .filter(|p| (p.count_ones() % 2) as u8 == parity)
            .map(|p| (p, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
            .collect();
        Self { site, physical, coefficients, parity }
    }

    /// `P` as an operator on `registry`, which must hold all local modes.
    pub fn operator(&self, lattice: &Lattice, registry: &Arc<ModeRegistry>) -> Result<FermionOperator> {
        let local = self.local_labels(lattice);
        let nv = lattice.site_modes(self.site.0, self.site.1).len();
        let idx: Vec<usize> = local.iter().map(|l| registry.require(l)).collect::<Result<_>>()?;
        let mut op = FermionOperator::zero(registry.clone());
        for (&pattern, &a) in &self.coefficients {
            if a.norm() == 0.0 {
                continue;
            }
            let mut word: Vec<(usize, bool)> =
                (nv..local.len()).filter(|&i| pattern >> i & 1 == 1).map(|i| (idx[i], true)).collect();
            word.extend((0..nv).rev().filter(|&i| pattern >> i & 1 == 1).map(|i| (idx[i], false)));
            op = op.add(&FermionOperator::normal_order(registry.clone(), &word, a))?;
        }
        Ok(op)
    }
}

/// State on the left-boundary virtual modes of a region, top to bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpec {
    pub modes: Vec<ModeLabel>,
    pub state: FockState,
}

impl BoundarySpec {
    pub fn new(state: FockState) -> Result<Self> {
        if state.parity() == Parity::Mixed {
            return Err(Error::MixedParity);
        }
        let modes = state.registry().labels().to_vec();
        if modes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::RegistryMismatch("boundary modes must be in canonical order".into()));
        }
        Ok(Self { modes, state })
    }

    /// Vacuum on the column-0 `α` modes.
    pub fn vacuum(lattice: &Lattice) -> Self {
        Self::new(FockState::vacuum(lattice.boundary_registry())).expect("vacuum is even")
    }
}

fn merged(state: &FockState, extra: &[ModeLabel]) -> Result<Arc<ModeRegistry>> {
    let mut labels = state.registry().labels().to_vec();
    labels.extend_from_slice(extra);
    Ok(ModeRegistry::sorted(labels)?.arc())
}

/// Projects `labels` of `state` onto the vacuum and drops them.
fn drop_vacuum(state: &FockState, labels: &[ModeLabel]) -> Result<FockState> {
    let mut sorted = labels.to_vec();
    sorted.sort();
    state.contract(&FockState::vacuum(ModeRegistry::new(sorted)?.arc()))
}

/// Physical state of the sites in `region` with `boundary` on the virtual
/// modes whose bond partner lies outside the region.
pub fn contract_region(
    lattice: &Lattice,
    region: &[Site],
    projections: &[Projection],
    boundary: &BoundarySpec,
) -> Result<FockState> {
    let sites: BTreeSet<Site> = region.iter().copied().collect();
    let mut by_site: BTreeMap<Site, &Projection> = BTreeMap::new();
    for p in projections {
        p.validate(lattice)?;
        if !sites.contains(&p.site) {
            return Err(Error::InvalidArgument(format!("projection for ({},{}) outside the region", p.site.0, p.site.1)));
        }
        if by_site.insert(p.site, p).is_some() {
            return Err(Error::InvalidArgument(format!("two projections on ({},{})", p.site.0, p.site.1)));
        }
    }
    if let Some(s) = sites.iter().find(|s| !by_site.contains_key(s)) {
        return Err(Error::InvalidArgument(format!("site ({},{}) has no projection", s.0, s.1)));
    }

    // Coverage: every virtual mode is a bond endpoint inside the region or a boundary mode.
    let internal: Vec<Bond> = lattice
        .bonds()
        .into_iter()
        .filter(|b| sites.contains(&b.from.site_coord().unwrap()) && sites.contains(&b.to.site_coord().unwrap()))
        .collect();
    let mut covered: BTreeSet<ModeLabel> = BTreeSet::new();
    for l in internal.iter().flat_map(|b| [b.from, b.to]).chain(boundary.modes.iter().copied()) {
        if !covered.insert(l) {
            return Err(Error::DuplicateMode(l.to_string()));
        }
    }
    for &(r, c) in &sites {
        for l in lattice.site_modes(r, c) {
            if !covered.remove(&l) {
                return Err(Error::UncoveredMode(l.to_string()));
            }
        }
    }
    if let Some(l) = covered.iter().next() {
        return Err(Error::UnknownMode(format!("{l} belongs to no region site")));
    }

    let mut order: Vec<Site> = sites.iter().copied().collect();
    order.sort_by_key(|&(r, c)| (c, r));
    let mut state = boundary.state.clone();
    let mut attached = vec![false; internal.len()];
    for site in order {
        for (i, b) in internal.iter().enumerate() {
            let touches = b.from.site_coord() == Some(site) || b.to.site_coord() == Some(site);
            if touches && !attached[i] {
                attached[i] = true;
                let reg = merged(&state, &[b.from, b.to])?;
                state = FockState::join(&state, &Lattice::bond_state(b)?, reg)?;
            }
        }
        let p = by_site[&site];
        let phys: Vec<ModeLabel> = (0..p.physical).map(|l| physical_label(site, l)).collect();
        state = state.embedded(merged(&state, &phys)?)?;
        state = p.operator(lattice, state.registry())?.apply(&state)?;
        state = drop_vacuum(&state, &lattice.site_modes(site.0, site.1))?;
    }
    if state.is_zero() {
        return Err(Error::NullProjection);
    }
    Ok(state)
}

/// Physical state of the whole lattice.
pub fn contract_physical(lattice: &Lattice, projections: &[Projection], boundary: &BoundarySpec) -> Result<FockState> {
    let region: Vec<Site> = (0..lattice.rows).flat_map(|r| (0..lattice.cols).map(move |c| (r, c))).collect();
    contract_region(lattice, &region, projections, boundary)
}

/// One term of the boundary decomposition.
#[derive(Debug, Clone)]
pub struct BoundaryTerm {
    /// Occupation of the corner site's `α` modes.
    pub pattern: u64,
    /// Operator created on the corner's right and lower partner modes.
    pub operator: FermionOperator,
    /// Remaining boundary modes for this term.
    pub rest: FockState,
}

#[derive(Debug, Clone)]
pub struct BoundaryUpdate {
    pub terms: Vec<BoundaryTerm>,
    /// Boundary of the lattice without the corner.
    pub boundary: BoundarySpec,
}

/// Eliminates the top-left site after measuring its physical modes in
/// `outcome`, returning the operators it leaves on its partner modes.
///
/// With `Σ_a R^a B^a` as the new boundary, contracting the remaining sites
/// reproduces `⟨outcome|ψ⟩` up to `(−1)^(|outcome| · p_rest)`, where `p_rest`
/// is the total parity of the remaining projections.
pub fn boundary_update(
    lattice: &Lattice,
    projection: &Projection,
    boundary: &BoundarySpec,
    outcome: &FockState,
) -> Result<BoundaryUpdate> {
    let corner = (0, 0);
    if projection.site != corner {
        return Err(Error::InvalidArgument("boundary update starts at the top-left site".into()));
    }
    projection.validate(lattice)?;
    if outcome.parity() == Parity::Mixed {
        return Err(Error::MixedParity);
    }
    let phys: Vec<ModeLabel> = (0..projection.physical).map(|l| physical_label(corner, l)).collect();
    if outcome.registry().labels() != phys.as_slice() {
        return Err(Error::RegistryMismatch(format!("outcome lives on {}", outcome.registry())));
    }
    let alpha = lattice.modes_of(0, 0, crate::lattice::Direction::Left);
    let breg = boundary.state.registry();
    if breg.labels().len() < alpha.len() || breg.labels()[..alpha.len()] != alpha[..] {
        return Err(Error::RegistryMismatch("boundary must start with the corner's α modes".into()));
    }
    let ka = alpha.len();
    let rest_reg = Arc::new(breg.complement((1u64 << ka) - 1));
    let alpha_reg = ModeRegistry::new(alpha.clone())?.arc();

    let mut split: BTreeMap<u64, BTreeMap<u64, Complex64>> = BTreeMap::new();
    for (&bits, &amp) in boundary.state.amplitudes() {
        split.entry(bits & ((1 << ka) - 1)).or_default().insert(bits >> ka, amp);
    }
    let bonds = lattice.outgoing_bonds(0, 0);
    let mut partners: Vec<ModeLabel> = bonds.iter().map(|b| b.to).collect();
    partners.sort();

    let mut terms = Vec::new();
    let mut next: Option<FockState> = None;
    for (pattern, rest_amps) in split {
        let mut s = FockState::basis(alpha_reg.clone(), pattern);
        for b in &bonds {
            let reg = merged(&s, &[b.from, b.to])?;
            s = FockState::join(&s, &Lattice::bond_state(b)?, reg)?;
        }
        s = s.embedded(merged(&s, &phys)?)?;
        s = projection.operator(lattice, s.registry())?.apply(&s)?;
        s = drop_vacuum(&s, &lattice.site_modes(0, 0))?;
        let r = s.contract(outcome)?;
        debug_assert_eq!(r.registry().labels(), partners.as_slice());
        let rest = FockState::from_map(rest_reg.clone(), rest_amps);
        let mut labels = partners.clone();
        labels.extend(rest_reg.labels());
        let joined = FockState::join(&r, &rest, ModeRegistry::sorted(labels)?.arc())?;
        next = Some(match next {
            None => joined,
            Some(acc) => acc.add_scaled(&joined, Complex64::new(1.0, 0.0))?,
        });
        terms.push(BoundaryTerm { pattern, operator: FermionOperator::from_state(&r), rest });
    }
    let state = next.ok_or(Error::NullProjection)?;
    Ok(BoundaryUpdate { terms, boundary: BoundarySpec::new(state)? })
}
