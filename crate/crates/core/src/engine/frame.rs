//! By-product bookkeeping.
//!
//! Each wire carries a Pauli record `X^x Z^z` (the logical state on the wire
//! is that Pauli applied to the ideal one) and the sector of the pair that
//! currently holds it. Odd outcomes also leave a sign on every mode that
//! precedes the measured site, collected here as `global_sign`.

use serde::{Deserialize, Serialize};

use super::compile::Site;
use crate::linalg::{pauli, CMatrix};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WireFrame {
    pub x: bool,
    pub z: bool,
    pub sector: u8,
}

impl WireFrame {
    pub fn matrix(&self) -> CMatrix {
        pauli(self.x, self.z)
    }

    /// `(X^x Z^z)⁻¹ = Z^z X^x`.
    pub fn inverse_matrix(&self) -> CMatrix {
        pauli(false, self.z) * pauli(self.x, false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub site: Site,
    pub outcome: usize,
    pub probability: f64,
    /// Parity of the measured basis vector.
    pub parity: u8,
    pub pair_parities: Vec<u8>,
    /// Decoration index of the outcome; 0 for the distinguished vector.
    pub decoration: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ByproductFrame {
    pub wires: Vec<WireFrame>,
    pub records: Vec<MeasurementRecord>,
    pub global_sign: i8,
}

impl ByproductFrame {
    pub fn new(wires: usize) -> Self {
        Self { wires: vec![WireFrame::default(); wires], records: Vec::new(), global_sign: 1 }
    }

    pub fn is_trivial(&self) -> bool {
        self.wires.iter().all(|w| !w.x && !w.z)
    }

    pub fn column_records(&self, col: u32) -> Vec<&MeasurementRecord> {
        self.records.iter().filter(|r| r.site.1 == col).collect()
    }
}

/// `N = Σ f` over records of rows strictly below `row`.
pub fn odd_count_below(records: &[&MeasurementRecord], row: u32) -> u32 {
    records.iter().filter(|r| r.site.0 > row).map(|r| r.parity as u32).sum()
}

/// `(−1)^(n_α · N)` for the `α` modes of `(row, j+1)` after column `j`.
pub fn sign_frame(records: &[&MeasurementRecord], row: u32, n_alpha: u8) -> i8 {
    if (n_alpha as u32 * odd_count_below(records, row)) % 2 == 1 {
        -1
    } else {
        1
    }
}
