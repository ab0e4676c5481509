//! Encoded gates as even fermionic operators.

use std::sync::Arc;

use crate::encoding::{encoded_map_operator, LogicalWire};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

use super::{FermionOperator, ModeRegistry};

/// Gates on encoded qubits.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    /// `diag(1, e^{iθ})` on one wire.
    Zf(f64),
    Hf,
    /// Arbitrary single-wire unitary.
    Uf(CMatrix),
    /// Controlled-Z after Hadamards on both wires.
    Uph,
}

impl GateKind {
    pub fn num_wires(&self) -> usize {
        match self {
            GateKind::Uph => 2,
            _ => 1,
        }
    }

    /// Logical matrix acting on the encoded sector.
    pub fn matrix(&self) -> CMatrix {
        match self {
            GateKind::Zf(theta) => linalg::phase(*theta),
            GateKind::Hf => linalg::hadamard(),
            GateKind::Uf(u) => u.clone(),
            GateKind::Uph => linalg::uph(),
        }
    }
}

/// Even operator whose restriction to the encoded even sector is the gate.
///
/// `targets` lists `(info, parity)` mode indices per wire, flattened.
pub fn encoded_gate(kind: &GateKind, targets: &[usize], registry: &Arc<ModeRegistry>) -> Result<FermionOperator> {
    if targets.len() != 2 * kind.num_wires() {
        return Err(Error::InvalidArgument(format!(
            "gate needs {} target modes, got {}",
            2 * kind.num_wires(),
            targets.len()
        )));
    }
    let m = kind.matrix();
    if m.nrows() != 1 << kind.num_wires() {
        return Err(Error::InvalidArgument("gate matrix has the wrong size".into()));
    }
    linalg::require_unitary(&m, 1e-10)?;
    let wires: Vec<LogicalWire> = targets.chunks(2).map(|p| LogicalWire::new(p[0], p[1])).collect();
    encoded_map_operator(&m, &wires, &wires, registry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{decode, encode};
    use crate::fermion::{FockState, Parity};
    use crate::linalg::{c64, re, SQRT_HALF};
    use num_complex::Complex64;

    #[test]
    fn zf_phases_the_pair() {
        let r = ModeRegistry::numbered(2).arc();
        let g = encoded_gate(&GateKind::Zf(0.7), &[0, 1], &r).unwrap();
        assert_eq!(g.parity(), Parity::Even);
        let s = FockState::from_pairs(r, [(0, re(0.6)), (0b11, c64(0.0, 0.8))]);
        let out = g.apply(&s).unwrap();
        assert!((out.amplitude(0) - re(0.6)).norm() < 1e-12);
        let want = c64(0.0, 0.8) * Complex64::from_polar(1.0, 0.7);
        assert!((out.amplitude(0b11) - want).norm() < 1e-12);
    }

    #[test]
    fn hf_on_vacuum() {
        let r = ModeRegistry::numbered(2).arc();
        let g = encoded_gate(&GateKind::Hf, &[0, 1], &r).unwrap();
        let out = g.apply(&FockState::vacuum(r)).unwrap();
        assert!((out.amplitude(0) - re(SQRT_HALF)).norm() < 1e-12);
        assert!((out.amplitude(0b11) - re(SQRT_HALF)).norm() < 1e-12);
    }

    #[test]
    fn uph_on_11() {
        let r = ModeRegistry::numbered(4).arc();
        let wires = [crate::encoding::LogicalWire::new(0, 1), crate::encoding::LogicalWire::new(2, 3)];
        let g = encoded_gate(&GateKind::Uph, &[0, 1, 2, 3], &r).unwrap();
        let s = encode(&[re(0.0), re(0.0), re(0.0), re(1.0)], &wires, r).unwrap();
        let d = decode(&g.apply(&s).unwrap(), &wires).unwrap();
        for (a, b) in d.amplitudes.iter().zip([0.5, -0.5, -0.5, -0.5]) {
            assert!((a - re(b)).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_unitary() {
        let r = ModeRegistry::numbered(2).arc();
        let m = CMatrix::from_element(2, 2, re(1.0));
        assert!(matches!(encoded_gate(&GateKind::Uf(m), &[0, 1], &r), Err(Error::NotUnitary(_))));
    }
}
