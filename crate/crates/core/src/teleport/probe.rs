//! Measurement bases built by probing the logical map of each site string.
//!
//! A site is split into mode pairs. Input pairs carry encoded qubits into the
//! site, output pairs are bonded to partner pairs that carry the result away,
//! and spectator pairs are read in the occupation basis. For a fixed pattern
//! of pair parities, every active string `x` induces a linear map `T_x` from
//! the encoded inputs to the encoded partners. The `T_x` of one pattern form
//! an orthogonal basis of that matrix space, so any target map `F` is realized
//! by the unique bra with `Σ conj(c_x) T_x ∝ F`.

use std::sync::Arc;

use num_complex::Complex64;

use super::{MeasurementBasis, OutcomeInfo};
use crate::encoding::{read_amplitudes, LogicalWire};
use crate::error::{Error, Result};
use crate::fermion::{FermionOperator, FockState, ModeLabel, ModeRegistry};
use crate::linalg::{self, CMatrix};

/// Two modes of one encoded qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairRef {
    pub info: ModeLabel,
    pub parity: ModeLabel,
}

impl PairRef {
    pub fn new(info: ModeLabel, parity: ModeLabel) -> Self {
        Self { info, parity }
    }
}

/// Output pair of a site and the partner pair it is bonded to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OutputPair {
    pub site: PairRef,
    pub partner: PairRef,
}

/// Pair roles of one site. Inputs and outputs are listed in logical order
/// (first entry is the most significant qubit).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SiteLayout {
    pub inputs: Vec<PairRef>,
    pub outputs: Vec<OutputPair>,
    pub spectators: Vec<PairRef>,
}

impl SiteLayout {
    fn active(&self) -> Vec<PairRef> {
        self.inputs.iter().copied().chain(self.outputs.iter().map(|o| o.site)).collect()
    }

    /// All site modes in canonical order.
    pub fn site_registry(&self) -> Result<ModeRegistry> {
        let mut labels: Vec<ModeLabel> = self
            .active()
            .iter()
            .chain(&self.spectators)
            .flat_map(|p| [p.info, p.parity])
            .collect();
        labels.sort();
        ModeRegistry::new(labels)
    }

    /// Modes of the partner pairs in canonical order.
    pub fn partner_registry(&self) -> Result<ModeRegistry> {
        let mut labels: Vec<ModeLabel> = self.outputs.iter().flat_map(|o| [o.partner.info, o.partner.parity]).collect();
        labels.sort();
        ModeRegistry::new(labels)
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }
}

fn wire_on(reg: &ModeRegistry, p: &PairRef, sector: u8) -> Result<LogicalWire> {
    Ok(LogicalWire::new(reg.require(&p.info)?, reg.require(&p.parity)?).with_sector(sector))
}

/// Active strings of a parity pattern: per pair, `00`/`11` for even and
/// `10`/`01` (info set, parity set) for odd.
fn pattern_strings(reg: &ModeRegistry, pairs: &[PairRef], pattern: &[u8]) -> Result<Vec<u64>> {
    let mut out = vec![0u64];
    for (p, &f) in pairs.iter().zip(pattern) {
        let i = 1u64 << reg.require(&p.info)?;
        let q = 1u64 << reg.require(&p.parity)?;
        let choices = if f == 0 { [0, i | q] } else { [i, q] };
        out = out.iter().flat_map(|&s| choices.map(|c| s | c)).collect();
    }
    Ok(out)
}

struct Probe {
    /// Active site modes.
    active: Arc<ModeRegistry>,
    /// Active site modes then partners, canonical order.
    local: Arc<ModeRegistry>,
    partners: Arc<ModeRegistry>,
    bonds: FermionOperator,
}

impl Probe {
    fn new(layout: &SiteLayout) -> Result<Self> {
        let mut active: Vec<ModeLabel> = layout.active().iter().flat_map(|p| [p.info, p.parity]).collect();
        active.sort();
        let partners = layout.partner_registry()?;
        let mut local = active.clone();
        local.extend(partners.labels());
        local.sort();
        let local = ModeRegistry::new(local)?.arc();
        let one = Complex64::new(1.0, 0.0);
        let mut bonds = FermionOperator::identity(local.clone());
        for o in &layout.outputs {
            for (s, p) in [(o.site.info, o.partner.info), (o.site.parity, o.partner.parity)] {
                let pair = FermionOperator::normal_order(
                    local.clone(),
                    &[(local.require(&s)?, true), (local.require(&p)?, true)],
                    one,
                );
                bonds = bonds.mul(&FermionOperator::identity(local.clone()).add(&pair)?)?;
            }
        }
        Ok(Self { active: ModeRegistry::new(active)?.arc(), local, partners: partners.arc(), bonds })
    }

    /// `T_x` for the active string `x` (bits of the active registry).
    fn map(&self, layout: &SiteLayout, x: u64, in_sec: &[u8], out_sec: &[u8]) -> Result<CMatrix> {
        let in_wires: Vec<LogicalWire> =
            layout.inputs.iter().zip(in_sec).map(|(p, &s)| wire_on(&self.local, p, s)).collect::<Result<_>>()?;
        let out_wires: Vec<LogicalWire> = layout
            .outputs
            .iter()
            .zip(out_sec)
            .map(|(o, &s)| wire_on(&self.partners, &o.partner, s))
            .collect::<Result<_>>()?;
        let k_in = 1usize << in_wires.len();
        let k_out = 1usize << out_wires.len();
        let bra = FockState::basis(self.active.clone(), x);
        let mut t = CMatrix::zeros(k_out, k_in);
        for a in 0..k_in {
            let mut e = vec![Complex64::new(0.0, 0.0); k_in];
            e[a] = Complex64::new(1.0, 0.0);
            let input = crate::encoding::encode_in_sectors(&e, &in_wires, self.local.clone())?;
            let joint = self.bonds.apply(&input)?;
            let post = joint.contract(&bra)?.relabeled(self.partners.clone())?;
            let amps = read_amplitudes(&post, &out_wires)?;
            for (b, v) in amps.into_iter().enumerate() {
                t[(b, a)] = v;
            }
        }
        Ok(t)
    }
}

/// Candidate decorations `Q·G·R` of the target, output-only Paulis first.
/// The per-wire order `I, Z, X, XZ` makes the single-qubit labels read as
/// Pauli `Z`, `X`, `Y`.
fn decorations(target: &CMatrix, k_in: usize, k_out: usize) -> Vec<CMatrix> {
    const ORDER: [(bool, bool); 4] = [(false, false), (false, true), (true, false), (true, true)];
    let strings = |n: usize| -> Vec<CMatrix> {
        (0..(1usize << (2 * n)))
            .map(|code| {
                let bits: Vec<(bool, bool)> = (0..n).map(|w| ORDER[code >> (2 * (n - 1 - w)) & 3]).collect();
                linalg::pauli_string(&bits)
            })
            .collect()
    };
    let mut out = Vec::new();
    for r in strings(k_in) {
        for q in strings(k_out) {
            out.push(&q * target * &r);
        }
    }
    out
}

fn orthogonal_family(target: &CMatrix, k_in: usize, k_out: usize) -> Result<Vec<CMatrix>> {
    let dim = 1usize << (k_in + k_out);
    let mut family: Vec<CMatrix> = Vec::with_capacity(dim);
    for cand in decorations(target, k_in, k_out) {
        let nc = cand.norm();
        if nc < 1e-12 {
            continue;
        }
        if family.iter().all(|f| linalg::hs_inner(f, &cand).norm() < 1e-9 * nc * f.norm()) {
            family.push(cand);
            if family.len() == dim {
                return Ok(family);
            }
        }
    }
    Err(Error::InvalidArgument(format!(
        "no orthogonal Pauli decoration family for a {}x{} target",
        target.nrows(),
        target.ncols()
    )))
}

/// Builds the complete basis of `layout` for `target`.
///
/// `input_sectors` picks the distinguished pattern: input pairs in those
/// sectors and all outputs even. Its first family member (the target itself)
/// with all spectators empty is vector 0.
pub fn build_basis(layout: &SiteLayout, target: &CMatrix, input_sectors: &[u8]) -> Result<MeasurementBasis> {
    let k_in = layout.num_inputs();
    let k_out = layout.num_outputs();
    if target.nrows() != 1 << k_out || target.ncols() != 1 << k_in {
        return Err(Error::InvalidArgument(format!(
            "target is {}x{} but the site has {} inputs and {} outputs",
            target.nrows(),
            target.ncols(),
            k_in,
            k_out
        )));
    }
    if input_sectors.len() != k_in {
        return Err(Error::InvalidArgument("one sector per input pair required".into()));
    }
    let site = layout.site_registry()?.arc();
    let probe = Probe::new(layout)?;
    let active_pairs = layout.active();
    let np = active_pairs.len();
    let family = orthogonal_family(target, k_in, k_out)?;

    // Patterns in order, distinguished first.
    let first: Vec<u8> = input_sectors.iter().copied().chain(std::iter::repeat_n(0, k_out)).collect();
    let mut patterns = vec![first.clone()];
    for code in 0..(1usize << np) {
        let p: Vec<u8> = (0..np).map(|i| (code >> (np - 1 - i) & 1) as u8).collect();
        if p != first {
            patterns.push(p);
        }
    }

    let spect_reg = {
        let mut l: Vec<ModeLabel> = layout.spectators.iter().flat_map(|p| [p.info, p.parity]).collect();
        l.sort();
        ModeRegistry::new(l)?.arc()
    };
    let designated: Vec<PairRef> = active_pairs.iter().chain(&layout.spectators).copied().collect();
    let designated_idx: Vec<(usize, usize)> = designated
        .iter()
        .map(|p| Ok((site.require(&p.info)?, site.require(&p.parity)?)))
        .collect::<Result<_>>()?;

    let mut vectors = Vec::new();
    let mut outcomes = Vec::new();
    for pattern in &patterns {
        let (in_sec, out_sec) = pattern.split_at(k_in);
        let strings = pattern_strings(&probe.active, &active_pairs, pattern)?;
        let maps: Vec<CMatrix> =
            strings.iter().map(|&x| probe.map(layout, x, in_sec, out_sec)).collect::<Result<_>>()?;
        let dim = strings.len();
        let t = CMatrix::from_fn(dim, dim, |r, c| maps[c][(r % (1 << k_out), r >> k_out)]);
        let t_inv = t.clone().try_inverse().ok_or(Error::Singular)?;
        for (d, f) in family.iter().enumerate() {
            let vf = nalgebra::DVector::from_fn(dim, |r, _| f[(r % (1 << k_out), r >> k_out)]);
            let cc = &t_inv * vf;
            let norm = cc.norm();
            let coeffs: Vec<Complex64> = cc.iter().map(|v| v.conj() / norm).collect();
            let mut realized = CMatrix::zeros(1 << k_out, 1 << k_in);
            for (m, c) in maps.iter().zip(&coeffs) {
                realized += m * c.conj();
            }
            let active_vec = FockState::from_pairs(probe.active.clone(), strings.iter().copied().zip(coeffs));
            for sbits in 0..(1u64 << spect_reg.len()) {
                let spect = FockState::basis(spect_reg.clone(), sbits);
                let v = FockState::join(&active_vec, &spect, site.clone())?;
                let pair_parities = parities_of(&v, &designated_idx);
                let total_parity = v.parity().bit().unwrap_or(0);
                vectors.push(v);
                outcomes.push(OutcomeInfo {
                    pair_parities,
                    total_parity,
                    in_sectors: in_sec.to_vec(),
                    out_sectors: out_sec.to_vec(),
                    realized: realized.clone(),
                    decoration: d,
                });
            }
        }
    }
    Ok(MeasurementBasis {
        site_modes: site,
        vectors,
        outcomes,
        target: target.clone(),
        designated,
        partners: layout.outputs.iter().map(|o| o.partner).collect(),
    })
}

fn parities_of(v: &FockState, pairs: &[(usize, usize)]) -> Vec<u8> {
    let (&bits, _) = v.amplitudes().iter().next().expect("basis vectors are nonzero");
    pairs.iter().map(|&(i, p)| ((bits >> i ^ bits >> p) & 1) as u8).collect()
}

/// Occupation-number basis over the modes of `pairs`.
pub fn occupation_basis(pairs: &[PairRef]) -> Result<MeasurementBasis> {
    let mut labels: Vec<ModeLabel> = pairs.iter().flat_map(|p| [p.info, p.parity]).collect();
    labels.sort();
    product_basis(ModeRegistry::new(labels)?.arc(), pairs.to_vec())
}

/// Occupation-number basis over every mode of `site`; `designated` pairs get
/// their parities recorded.
pub fn product_basis(site: Arc<ModeRegistry>, designated: Vec<PairRef>) -> Result<MeasurementBasis> {
    let idx: Vec<(usize, usize)> = designated
        .iter()
        .map(|p| Ok((site.require(&p.info)?, site.require(&p.parity)?)))
        .collect::<Result<_>>()?;
    let n = 1u64 << site.len();
    let mut vectors = Vec::with_capacity(n as usize);
    let mut outcomes = Vec::with_capacity(n as usize);
    for bits in 0..n {
        let v = FockState::basis(site.clone(), bits);
        outcomes.push(OutcomeInfo {
            pair_parities: parities_of(&v, &idx),
            total_parity: (bits.count_ones() % 2) as u8,
            in_sectors: vec![],
            out_sectors: vec![],
            realized: CMatrix::identity(1, 1),
            decoration: 0,
        });
        vectors.push(v);
    }
    Ok(MeasurementBasis { site_modes: site, vectors, outcomes, target: CMatrix::identity(1, 1), designated, partners: vec![] })
}
