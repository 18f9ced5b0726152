//! JSON-shaped circuit files:
//! `{"n":4,"gates":[{"kind":"Rx","target":0,"control":null,"theta":0.3,"parametric":true}]}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Circuit, GateEntry};
use crate::error::Error;
use crate::scalar::Real;
use crate::state::{GateKind, GateOp};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateRecord {
    kind: GateKind,
    target: usize,
    control: Option<usize>,
    theta: Option<f64>,
    parametric: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitRecord {
    n: usize,
    gates: Vec<GateRecord>,
}

/// Failure while reading a circuit file.
#[derive(Debug, Error)]
pub enum CircuitFileError {
    #[error("malformed circuit at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("invalid gate #{index}: {msg}")]
    Gate { index: usize, msg: String },
}

impl From<CircuitFileError> for Error {
    fn from(e: CircuitFileError) -> Self {
        match e {
            CircuitFileError::Syntax { line, column, msg } => {
                Error::Parse { line, msg: format!("column {column}: {msg}") }
            }
            CircuitFileError::Gate { index, msg } => Error::Parse { line: 0, msg: format!("gate #{index}: {msg}") },
        }
    }
}

impl<T: Real> Circuit<T> {
    pub fn to_json(&self) -> String {
        let record = CircuitRecord {
            n: self.n,
            gates: self
                .gates
                .iter()
                .map(|e| GateRecord {
                    kind: e.gate.kind,
                    target: e.gate.target,
                    control: e.gate.control,
                    theta: e.gate.kind.is_rotation().then(|| e.gate.theta.as_f64()),
                    parametric: e.parametric,
                })
                .collect(),
        };
        serde_json::to_string(&record).expect("plain data serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, CircuitFileError> {
        let record: CircuitRecord = serde_json::from_str(text).map_err(|e| CircuitFileError::Syntax {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        let mut circuit = Circuit::new(record.n);
        for (index, g) in record.gates.into_iter().enumerate() {
            let bad = |msg: &str| CircuitFileError::Gate { index, msg: msg.to_string() };
            let theta = match (g.kind.is_rotation(), g.theta) {
                (true, Some(t)) => T::lit(t),
                (true, None) => return Err(bad("rotation without theta")),
                (false, None) => T::zero(),
                (false, Some(_)) => return Err(bad("H/CNOT must have theta null")),
            };
            if !g.kind.is_rotation() && g.parametric {
                return Err(bad("H/CNOT must have parametric false"));
            }
            let gate = GateOp { kind: g.kind, target: g.target, control: g.control, theta };
            circuit
                .push(GateEntry { gate, parametric: g.parametric })
                .map_err(|e| CircuitFileError::Gate { index, msg: e.to_string() })?;
        }
        Ok(circuit)
    }
}
