//! Qubit ↔ mode-pair encoding.
//!
//! Each logical wire owns an `(info, parity)` pair. In sector 0 the logical
//! `|1⟩` is `info† parity†|Ω⟩` and `|0⟩` is the pair vacuum; in sector 1
//! `|0⟩ = parity†|Ω⟩` and `|1⟩ = info†|Ω⟩`. Either way the logical bit is the
//! occupation of the info mode. Multi-wire strings are products in wire order,
//! and spin index `a` has wire 0 as its most significant bit.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{FermionOperator, FockState, ModeRegistry};
use crate::linalg::CMatrix;

/// Mode indices of one encoded qubit plus its parity sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LogicalWire {
    pub info: usize,
    pub parity: usize,
    pub sector: u8,
}

impl LogicalWire {
    pub fn new(info: usize, parity: usize) -> Self {
        Self { info, parity, sector: 0 }
    }

    pub fn with_sector(self, sector: u8) -> Self {
        Self { sector, ..self }
    }

    pub fn mask(&self) -> u64 {
        (1 << self.info) | (1 << self.parity)
    }

    fn modes_for(&self, bit: bool) -> Vec<usize> {
        match (self.sector, bit) {
            (0, false) => vec![],
            (0, true) => vec![self.info, self.parity],
            (_, false) => vec![self.parity],
            (_, true) => vec![self.info],
        }
    }

    /// True if the pair occupation in `bits` is allowed by the sector.
    pub fn admits(&self, bits: u64) -> bool {
        let i = bits >> self.info & 1;
        let p = bits >> self.parity & 1;
        (i ^ p) as u8 == self.sector
    }
}

fn check_wires(wires: &[LogicalWire], registry: &ModeRegistry) -> Result<()> {
    let mut seen = 0u64;
    for w in wires {
        if w.info == w.parity || w.info >= registry.len() || w.parity >= registry.len() {
            return Err(Error::InvalidArgument(format!("bad wire {w:?}")));
        }
        if seen & w.mask() != 0 {
            return Err(Error::InvalidArgument("wires share a mode".into()));
        }
        seen |= w.mask();
    }
    Ok(())
}

/// Basis key and sign of the encoded string for spin index `a`.
pub fn basis_string(a: usize, wires: &[LogicalWire], registry: &Arc<ModeRegistry>) -> (u64, f64) {
    let n = wires.len();
    let mut modes = Vec::with_capacity(2 * n);
    for (w, wire) in wires.iter().enumerate() {
        modes.extend(wire.modes_for(a >> (n - 1 - w) & 1 == 1));
    }
    let s = FockState::created(registry.clone(), &modes, Complex64::new(1.0, 0.0));
    let (&key, amp) = s.amplitudes().iter().next().expect("distinct wire modes");
    (key, amp.re)
}

/// Encoded basis string as a creation operator.
pub fn basis_operator(a: usize, wires: &[LogicalWire], registry: &Arc<ModeRegistry>) -> FermionOperator {
    let (key, sign) = basis_string(a, wires, registry);
    FermionOperator::creation_string(registry.clone(), key, Complex64::new(sign, 0.0))
}

/// Encodes a normalized spin vector; every wire must be in sector 0.
pub fn encode(spin: &[Complex64], wires: &[LogicalWire], registry: Arc<ModeRegistry>) -> Result<FockState> {
    if let Some(w) = wires.iter().position(|w| w.sector != 0) {
        return Err(Error::SectorViolation { wire: w });
    }
    encode_in_sectors(spin, wires, registry)
}

/// Encoding honoring each wire's sector flag.
pub fn encode_in_sectors(
    spin: &[Complex64],
    wires: &[LogicalWire],
    registry: Arc<ModeRegistry>,
) -> Result<FockState> {
    check_wires(wires, &registry)?;
    if spin.len() != 1 << wires.len() {
        return Err(Error::InvalidArgument(format!(
            "spin vector of length {} for {} wires",
            spin.len(),
            wires.len()
        )));
    }
    let norm = spin.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let pairs = spin.iter().enumerate().map(|(a, m)| {
        let (key, sign) = basis_string(a, wires, &registry);
        (key, m * sign)
    });
    Ok(FockState::from_pairs(registry.clone(), pairs))
}

/// Result of [`decode`].
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    /// Unit-norm spin amplitudes.
    pub amplitudes: Vec<Complex64>,
    /// Norm of the fermionic input.
    pub norm: f64,
    /// Unit phase of the largest amplitude.
    pub phase: Complex64,
}

/// Reads the spin amplitudes off a state supported on the wire modes.
///
/// Modes outside the wires must be empty; a basis vector breaking a wire's
/// sector is reported as a sector violation.
pub fn decode(f: &FockState, wires: &[LogicalWire]) -> Result<Decoded> {
    let amps = read_amplitudes(f, wires)?;
    let norm = amps.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::NullProjection);
    }
    let amplitudes: Vec<Complex64> = amps.iter().map(|x| x / norm).collect();
    let big = amplitudes
        .iter()
        .copied()
        .fold(Complex64::new(0.0, 0.0), |b, x| if x.norm() > b.norm() + 1e-12 { x } else { b });
    Ok(Decoded { amplitudes, norm, phase: big / big.norm() })
}

/// Unnormalized spin amplitudes of `f`, with the same checks as [`decode`].
pub fn read_amplitudes(f: &FockState, wires: &[LogicalWire]) -> Result<Vec<Complex64>> {
    let registry = f.registry().clone();
    check_wires(wires, &registry)?;
    let n = wires.len();
    let wire_mask = wires.iter().fold(0u64, |m, w| m | w.mask());
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (&bits, amp) in f.amplitudes() {
        if bits & !wire_mask != 0 {
            return Err(Error::InvalidArgument(format!("occupied mode outside the wires in {bits:#b}")));
        }
        let mut a = 0usize;
        for (w, wire) in wires.iter().enumerate() {
            if !wire.admits(bits) {
                return Err(Error::SectorViolation { wire: w });
            }
            if bits >> wire.info & 1 == 1 {
                a |= 1 << (n - 1 - w);
            }
        }
        let (key, sign) = basis_string(a, wires, &registry);
        debug_assert_eq!(key, bits);
        amps[a] = amp * sign;
    }
    Ok(amps)
}

/// `Σ_{b,a} m[b,a] E_b P_vac E_a†` between encoded strings of two wire sets.
///
/// `P_vac` projects every mode of both wire sets onto the vacuum, so the
/// operator acts as `m` from the `inputs` encoding to the `outputs` encoding.
pub fn encoded_map_operator(
    m: &CMatrix,
    inputs: &[LogicalWire],
    outputs: &[LogicalWire],
    registry: &Arc<ModeRegistry>,
) -> Result<FermionOperator> {
    check_wires(inputs, registry)?;
    check_wires(outputs, registry)?;
    if m.ncols() != 1 << inputs.len() || m.nrows() != 1 << outputs.len() {
        return Err(Error::InvalidArgument("matrix shape does not match wires".into()));
    }
    let mask = inputs.iter().chain(outputs).fold(0u64, |acc, w| acc | w.mask());
    let proj = FermionOperator::vacuum_projector(registry.clone(), mask);
    let mut op = FermionOperator::zero(registry.clone());
    for a in 0..m.ncols() {
        let right = proj.mul(&basis_operator(a, inputs, registry).adjoint())?;
        for b in 0..m.nrows() {
            let c = m[(b, a)];
            if c.norm() < 1e-15 {
                continue;
            }
            let term = basis_operator(b, outputs, registry).mul(&right)?.scaled(c);
            op = op.add(&term)?;
        }
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{re, SQRT_HALF};

    fn two_wires() -> (Arc<ModeRegistry>, Vec<LogicalWire>) {
        (ModeRegistry::numbered(4).arc(), vec![LogicalWire::new(0, 1), LogicalWire::new(2, 3)])
    }

    #[test]
    fn encode_zero_is_vacuum() {
        let r = ModeRegistry::numbered(2).arc();
        let s = encode(&[re(1.0), re(0.0)], &[LogicalWire::new(0, 1)], r).unwrap();
        assert_eq!(s.amplitude(0), re(1.0));
        assert_eq!(s.support_len(), 1);
    }

    #[test]
    fn encode_10_positive() {
        let (r, w) = two_wires();
        let s = encode(&[re(0.0), re(0.0), re(1.0), re(0.0)], &w, r).unwrap();
        assert_eq!(s.amplitude(0b0011), re(1.0));
    }

    #[test]
    fn odd_sector_decode() {
        let r = ModeRegistry::numbered(2).arc();
        let w = [LogicalWire::new(0, 1).with_sector(1)];
        let s = FockState::from_pairs(r.clone(), [(0b01, re(SQRT_HALF)), (0b10, re(SQRT_HALF))]);
        let d = decode(&s, &w).unwrap();
        assert!((d.amplitudes[0] - re(SQRT_HALF)).norm() < 1e-12);
        assert!((d.amplitudes[1] - re(SQRT_HALF)).norm() < 1e-12);
        let vac = FockState::vacuum(r);
        assert_eq!(decode(&vac, &w), Err(Error::SectorViolation { wire: 0 }));
    }

    #[test]
    fn rejects_unnormalized() {
        let r = ModeRegistry::numbered(2).arc();
        assert!(matches!(
            encode(&[re(1.0), re(1.0)], &[LogicalWire::new(0, 1)], r),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn sector_flipping_map() {
        let r = ModeRegistry::numbered(2).arc();
        let even = [LogicalWire::new(0, 1)];
        let odd = [LogicalWire::new(0, 1).with_sector(1)];
        let op = encoded_map_operator(&CMatrix::identity(2, 2), &even, &odd, &r).unwrap();
        let v = [re(0.6), re(0.8)];
        let out = op.apply(&encode(&v, &even, r.clone()).unwrap()).unwrap();
        let d = decode(&out, &odd).unwrap();
        assert!((d.amplitudes[0] - re(0.6)).norm() < 1e-12);
        assert!((d.amplitudes[1] - re(0.8)).norm() < 1e-12);
    }
}
