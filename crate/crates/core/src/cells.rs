//! Behavioral cell library.
//!
//! Each cell is a total truth function over ranged ports. Transistor costs
//! live in [`crate::costing`]; a cell here only knows its interface and what
//! it computes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::value::ValueRange;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CellError {
    #[error("{cell}.{port}: value {value} exceeds port range {max}")]
    RangeViolation {
        cell: CellKind,
        port: &'static str,
        value: u8,
        max: u8,
    },
    #[error("{cell}: expected {expected} inputs, got {got}")]
    Arity {
        cell: CellKind,
        expected: usize,
        got: usize,
    },
    #[error("unknown cell `{0}`")]
    Unknown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PortSpec {
    pub name: &'static str,
    pub direction: Direction,
    pub range: ValueRange,
}

const fn input(name: &'static str, range: ValueRange) -> PortSpec {
    PortSpec {
        name,
        direction: Direction::In,
        range,
    }
}

const fn output(name: &'static str, range: ValueRange) -> PortSpec {
    PortSpec {
        name,
        direction: Direction::Out,
        range,
    }
}

const B: ValueRange = ValueRange::BINARY;
const T: ValueRange = ValueRange::TERNARY;
const Q: ValueRange = ValueRange::QUATERNARY;

/// Every primitive known to the library, in canonical reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellKind {
    And2,
    Fa,
    Ha,
    Xor2,
    Nqi,
    Iqi,
    Pqi,
    Qmul1,
    Q331,
    Q332,
    Qh32,
    Qh31,
    DecQ2b,
    EncB2q,
}

impl CellKind {
    pub const ALL: [CellKind; 14] = [
        CellKind::And2,
        CellKind::Fa,
        CellKind::Ha,
        CellKind::Xor2,
        CellKind::Nqi,
        CellKind::Iqi,
        CellKind::Pqi,
        CellKind::Qmul1,
        CellKind::Q331,
        CellKind::Q332,
        CellKind::Qh32,
        CellKind::Qh31,
        CellKind::DecQ2b,
        CellKind::EncB2q,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CellKind::And2 => "AND2",
            CellKind::Fa => "FA",
            CellKind::Ha => "HA",
            CellKind::Xor2 => "XOR2",
            CellKind::Nqi => "NQI",
            CellKind::Iqi => "IQI",
            CellKind::Pqi => "PQI",
            CellKind::Qmul1 => "QMUL1",
            CellKind::Q331 => "Q331",
            CellKind::Q332 => "Q332",
            CellKind::Qh32 => "QH32",
            CellKind::Qh31 => "QH31",
            CellKind::DecQ2b => "DEC_Q2B",
            CellKind::EncB2q => "ENC_B2Q",
        }
    }

    /// Inputs first, then outputs.
    pub fn ports(self) -> &'static [PortSpec] {
        const AND2: [PortSpec; 3] = [input("a", B), input("b", B), output("y", B)];
        const FA: [PortSpec; 5] = [
            input("a", B),
            input("b", B),
            input("cin", B),
            output("s", B),
            output("cout", B),
        ];
        const HA: [PortSpec; 4] = [input("a", B), input("b", B), output("s", B), output("cout", B)];
        const INV: [PortSpec; 2] = [input("q", Q), output("y", B)];
        const QMUL1: [PortSpec; 4] = [input("a", Q), input("b", Q), output("qm", Q), output("qc", T)];
        const Q331: [PortSpec; 5] = [
            input("a", Q),
            input("b", Q),
            input("cin", B),
            output("s", Q),
            output("cout", B),
        ];
        const Q332: [PortSpec; 5] = [
            input("a", Q),
            input("b", Q),
            input("cin", T),
            output("s", Q),
            output("cout", T),
        ];
        const QH32: [PortSpec; 4] = [input("a", T), input("b", Q), output("s", Q), output("cout", B)];
        const QH31: [PortSpec; 4] = [input("a", Q), input("b", B), output("s", Q), output("cout", B)];
        const DEC: [PortSpec; 3] = [input("q", Q), output("x1", B), output("x0", B)];
        const ENC: [PortSpec; 3] = [input("x1", B), input("x0", B), output("q", Q)];
        match self {
            CellKind::And2 | CellKind::Xor2 => &AND2,
            CellKind::Fa => &FA,
            CellKind::Ha => &HA,
            CellKind::Nqi | CellKind::Iqi | CellKind::Pqi => &INV,
            CellKind::Qmul1 => &QMUL1,
            CellKind::Q331 => &Q331,
            CellKind::Q332 => &Q332,
            CellKind::Qh32 => &QH32,
            CellKind::Qh31 => &QH31,
            CellKind::DecQ2b => &DEC,
            CellKind::EncB2q => &ENC,
        }
    }

    pub fn inputs(self) -> &'static [PortSpec] {
        &self.ports()[..self.num_inputs()]
    }

    pub fn outputs(self) -> &'static [PortSpec] {
        &self.ports()[self.num_inputs()..]
    }

    pub fn num_inputs(self) -> usize {
        match self {
            CellKind::Fa | CellKind::Q331 | CellKind::Q332 => 3,
            CellKind::Nqi | CellKind::Iqi | CellKind::Pqi | CellKind::DecQ2b => 1,
            _ => 2,
        }
    }

    pub fn num_outputs(self) -> usize {
        self.ports().len() - self.num_inputs()
    }

    pub fn port(self, name: &str) -> Option<(usize, &'static PortSpec)> {
        self.ports().iter().enumerate().find(|(_, p)| p.name == name)
    }

    /// Evaluates the cell. `out` must hold at least [`num_outputs`](Self::num_outputs) slots.
    pub fn eval_into(self, inputs: &[u8], out: &mut [u8]) -> Result<(), CellError> {
        let specs = self.inputs();
        if inputs.len() != specs.len() {
            return Err(CellError::Arity {
                cell: self,
                expected: specs.len(),
                got: inputs.len(),
            });
        }
        for (&v, p) in inputs.iter().zip(specs) {
            if !p.range.contains(v) {
                return Err(CellError::RangeViolation {
                    cell: self,
                    port: p.name,
                    value: v,
                    max: p.range.max_value(),
                });
            }
        }
        self.truth(inputs, out);
        Ok(())
    }

    pub fn eval(self, inputs: &[u8]) -> Result<Vec<u8>, CellError> {
        let mut out = vec![0; self.num_outputs()];
        self.eval_into(inputs, &mut out)?;
        Ok(out)
    }

    // Inputs are already range-checked.
    fn truth(self, i: &[u8], out: &mut [u8]) {
        match self {
            CellKind::And2 => out[0] = i[0] & i[1],
            CellKind::Xor2 => out[0] = i[0] ^ i[1],
            CellKind::Fa | CellKind::Ha => {
                let total: u8 = i.iter().sum();
                out[0] = total & 1;
                out[1] = total >> 1;
            }
            CellKind::Nqi => out[0] = u8::from(i[0] < 1),
            CellKind::Iqi => out[0] = u8::from(i[0] < 2),
            CellKind::Pqi => out[0] = u8::from(i[0] < 3),
            CellKind::Qmul1 => {
                let p = i[0] * i[1];
                out[0] = p % 4;
                out[1] = p / 4;
            }
            CellKind::Q331 | CellKind::Q332 | CellKind::Qh32 | CellKind::Qh31 => {
                let total: u8 = i.iter().sum();
                out[0] = total % 4;
                out[1] = total / 4;
            }
            CellKind::DecQ2b => {
                out[0] = i[0] >> 1;
                out[1] = i[0] & 1;
            }
            CellKind::EncB2q => out[0] = 2 * i[0] + i[1],
        }
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CellKind {
    type Err = CellError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CellKind::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CellError::Unknown(s.to_string()))
    }
}

impl Serialize for CellKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for CellKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn pair(cell: CellKind, inputs: &[u8]) -> Result<(u8, u8), CellError> {
    let mut out = [0u8; 2];
    cell.eval_into(inputs, &mut out)?;
    Ok((out[0], out[1]))
}

/// One-digit quaternary multiplier: `(qm, qc)` with `4·qc + qm = a·b`.
pub fn qmul1(a: u8, b: u8) -> Result<(u8, u8), CellError> {
    pair(CellKind::Qmul1, &[a, b])
}

/// Quaternary full adder with ternary carry in and out.
pub fn q332(a: u8, b: u8, cin: u8) -> Result<(u8, u8), CellError> {
    pair(CellKind::Q332, &[a, b, cin])
}

/// Quaternary full adder with binary carry in and out.
pub fn q331(a: u8, b: u8, cin: u8) -> Result<(u8, u8), CellError> {
    pair(CellKind::Q331, &[a, b, cin])
}

/// Half adder for a ternary `a` and a quaternary `b`. The ports are not
/// interchangeable.
pub fn qh32(a: u8, b: u8) -> Result<(u8, u8), CellError> {
    pair(CellKind::Qh32, &[a, b])
}

pub fn qh31(a: u8, b: u8) -> Result<(u8, u8), CellError> {
    pair(CellKind::Qh31, &[a, b])
}

/// Quaternary digit to `(x1, x0)` with `q = 2·x1 + x0`.
pub fn decode_q2b(q: u8) -> Result<(u8, u8), CellError> {
    pair(CellKind::DecQ2b, &[q])
}

pub fn encode_b2q(x1: u8, x0: u8) -> Result<u8, CellError> {
    let mut out = [0u8; 1];
    CellKind::EncB2q.eval_into(&[x1, x0], &mut out)?;
    Ok(out[0])
}

/// Threshold detectors `(q < 1, q < 2, q < 3)`. A logical 1 stands for the
/// top voltage level.
pub fn mvl_inverters(q: u8) -> Result<(u8, u8, u8), CellError> {
    let mut out = [0u8; 1];
    let mut bits = [0u8; 3];
    for (slot, cell) in bits
        .iter_mut()
        .zip([CellKind::Nqi, CellKind::Iqi, CellKind::Pqi])
    {
        cell.eval_into(&[q], &mut out)?;
        *slot = out[0];
    }
    Ok((bits[0], bits[1], bits[2]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruthRow {
    pub inputs: Vec<u8>,
    pub outputs: Vec<u8>,
}

/// Every input combination in lexicographic order (first port most significant).
pub fn enumerate_truth_table(cell: CellKind) -> Vec<TruthRow> {
    let ranges: Vec<u8> = cell.inputs().iter().map(|p| p.range.max_value()).collect();
    let total: usize = ranges.iter().map(|&m| usize::from(m) + 1).product();
    let mut rows = Vec::with_capacity(total);
    let mut current = vec![0u8; ranges.len()];
    for _ in 0..total {
        let outputs = cell
            .eval(&current)
            .expect("enumerated inputs are within port ranges");
        rows.push(TruthRow {
            inputs: current.clone(),
            outputs,
        });
        // odometer, last port fastest
        for k in (0..current.len()).rev() {
            if current[k] < ranges[k] {
                current[k] += 1;
                break;
            }
            current[k] = 0;
        }
    }
    rows
}

/// Golden-file form of a truth table: header of port names, one row per input combination.
pub fn truth_table_csv(cell: CellKind) -> String {
    let header: Vec<&str> = cell.ports().iter().map(|p| p.name).collect();
    let mut s = header.join(",");
    s.push('\n');
    for row in enumerate_truth_table(cell) {
        let fields: Vec<String> = row
            .inputs
            .iter()
            .chain(&row.outputs)
            .map(u8::to_string)
            .collect();
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}
