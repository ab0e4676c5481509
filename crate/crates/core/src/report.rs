//! JSON interchange: circuit input and run reports.
//!
//! Complex numbers are written as `[re, im]`. Decoded amplitudes keep their
//! global phase, including the tracked sign. Reports contain only ordered
//! containers, so a given seed always produces the same bytes.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::engine::{CircuitIR, Mode, RunResult};
use crate::error::{Error, Result};

/// Parses and validates a circuit. Schema errors name the offending field.
pub fn parse_circuit(text: &str) -> Result<CircuitIR> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let circuit: CircuitIR = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Circuit { path: if path == "." { "<root>".into() } else { path }, message: e.into_inner().to_string() }
    })?;
    circuit.validate()?;
    Ok(circuit)
}

#[derive(Debug, Serialize)]
struct ShotReport {
    /// `[row, col, outcome]` in measurement order.
    outcomes: Vec<[u64; 3]>,
    global_sign: i8,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bits: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fidelity: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Report<'a> {
    seed: u64,
    mode: Mode,
    shots: usize,
    circuit: &'a CircuitIR,
    results: Vec<ShotReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    histogram: Option<BTreeMap<String, usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    worst_fidelity: Option<f64>,
}

fn clean(x: f64) -> f64 {
    if x.abs() < 1e-14 {
        0.0
    } else {
        x
    }
}

fn pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|x| [clean(x.re), clean(x.im)]).collect()
}

/// Pretty-printed report of a run.
pub fn emit_report(circuit: &CircuitIR, result: &RunResult) -> String {
    let results = result
        .shots
        .iter()
        .map(|s| ShotReport {
            outcomes: s.records.iter().map(|r| [r.site.0 as u64, r.site.1 as u64, r.outcome as u64]).collect(),
            global_sign: s.global_sign,
            amplitudes: s.amplitudes.as_deref().map(pairs),
            bits: s.bits.as_ref().map(|b| b.iter().map(|x| if *x == 1 { '1' } else { '0' }).collect()),
            fidelity: s.fidelity,
        })
        .collect();
    let report = Report {
        seed: result.seed,
        mode: result.mode,
        shots: result.shots.len(),
        circuit,
        results,
        histogram: (result.mode == Mode::Sample).then(|| result.histogram()),
        expected: result.expected.as_deref().map(pairs),
        worst_fidelity: result.worst_fidelity(),
    };
    serde_json::to_string_pretty(&report).expect("report serializes")
}
