use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One gate of the logical circuit. Angles are in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Gate {
    Zf { theta: f64, wire: usize },
    Hf { wire: usize },
    /// Controlled-Z after Hadamards on two adjacent wires.
    Uph { wires: [usize; 2] },
}

impl Gate {
    pub fn wires(&self) -> Vec<usize> {
        match self {
            Gate::Zf { wire, .. } | Gate::Hf { wire } => vec![*wire],
            Gate::Uph { wires } => wires.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitIR {
    pub wires: usize,
    pub gates: Vec<Gate>,
}

impl CircuitIR {
    pub fn new(wires: usize, gates: Vec<Gate>) -> Result<Self> {
        let c = Self { wires, gates };
        c.validate()?;
        Ok(c)
    }

    /// Checks wire ranges, finite angles and adjacency of two-wire gates.
    pub fn validate(&self) -> Result<()> {
        if self.wires == 0 {
            return Err(Error::Circuit { path: "wires".into(), message: "need at least one wire".into() });
        }
        for (i, g) in self.gates.iter().enumerate() {
            let path = format!("gates[{i}]");
            for w in g.wires() {
                if w >= self.wires {
                    return Err(Error::Circuit {
                        path: format!("{path}.wire"),
                        message: format!("wire {w} out of range for {} wires", self.wires),
                    });
                }
            }
            match g {
                Gate::Zf { theta, .. } if !theta.is_finite() => {
                    return Err(Error::Circuit { path: format!("{path}.theta"), message: "angle must be finite".into() });
                }
                Gate::Uph { wires: [a, b] } => {
                    if a == b {
                        return Err(Error::Circuit {
                            path: format!("{path}.wires"),
                            message: "the two wires must differ".into(),
                        });
                    }
                    if a.abs_diff(*b) != 1 {
                        return Err(Error::Circuit {
                            path: format!("{path}.wires"),
                            message: format!("wires {a} and {b} are not adjacent"),
                        });
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}
