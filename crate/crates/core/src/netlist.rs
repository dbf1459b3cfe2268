//! Single-digit nets, cell instances and topological evaluation.
//!
//! A [`Netlist`] is immutable once built. Construction validates it and
//! caches a topological order of the instances, so evaluation is one pass
//! over that order with caller-owned value storage.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cells::{CellError, CellKind};
use crate::costing::BillOfCells;
use crate::value::{Radix, ValueRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NetId(pub u32);

impl NetId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InstanceId(pub u32);

impl InstanceId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for InstanceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    /// Index into the primary input list.
    Input(usize),
    Const(u8),
    /// Output port index of an instance.
    Cell { instance: InstanceId, port: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Net {
    pub id: NetId,
    pub range: ValueRange,
    pub driver: Driver,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: InstanceId,
    pub cell: CellKind,
    /// One net per input port, in port order.
    pub inputs: Vec<NetId>,
    /// One net per output port, in port order.
    pub outputs: Vec<NetId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimaryInput {
    pub name: String,
    pub range: ValueRange,
    pub net: NetId,
}

/// Arithmetic function a netlist is meant to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Function {
    Mul,
    Add,
}

impl Function {
    pub fn apply(self, a: u64, b: u64) -> u64 {
        match self {
            Function::Mul => a * b,
            Function::Add => a + b,
        }
    }
}

/// How the primary inputs and outputs group into two integer operands and a result.
///
/// Inputs are `widths[0]` digits of the first operand followed by `widths[1]`
/// digits of the second, least-significant first; outputs are the result
/// digits, least-significant first, all in `radix`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interface {
    pub function: Function,
    pub radix: Radix,
    pub widths: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("{instance} ({cell}): port `{port}` unbound")]
    UnboundPort {
        instance: InstanceId,
        cell: CellKind,
        port: &'static str,
    },
    #[error("{instance} ({cell}): {extra} extra bindings")]
    ExtraBindings {
        instance: InstanceId,
        cell: CellKind,
        extra: usize,
    },
    #[error("{instance}: port `{port}` refers to missing net {net}")]
    UnknownNet {
        instance: InstanceId,
        port: &'static str,
        net: NetId,
    },
    #[error("{instance} ({cell}): net {net} of range {net_range} drives port `{port}` of range {port_range}")]
    RangeMismatch {
        instance: InstanceId,
        cell: CellKind,
        port: &'static str,
        net: NetId,
        net_range: ValueRange,
        port_range: ValueRange,
    },
    #[error("net {net}: declared range {declared} but driver produces range {driven}")]
    DriverRange {
        net: NetId,
        declared: ValueRange,
        driven: ValueRange,
    },
    #[error("net {net}: driven by more than one source")]
    MultipleDrivers { net: NetId },
    #[error("net {net}: declared driver does not bind it")]
    DanglingDriver { net: NetId },
    #[error("net {net}: constant {value} exceeds range {range}")]
    ConstRange {
        net: NetId,
        value: u8,
        range: ValueRange,
    },
    #[error("net ids must be dense and ordered; position {position} holds {net}")]
    NetOrder { position: usize, net: NetId },
    #[error("instance ids must be dense and ordered; position {position} holds {instance}")]
    InstanceOrder {
        position: usize,
        instance: InstanceId,
    },
    #[error("primary output refers to missing net {0}")]
    UnknownOutput(NetId),
    #[error("primary input `{name}`: {reason}")]
    BadInput { name: String, reason: String },
    #[error("combinational cycle through {0:?}")]
    Cycle(Vec<InstanceId>),
}

#[derive(Debug, Error)]
pub enum NetlistError {
    #[error("netlist failed validation:\n{}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("{0}")]
    Cell(#[from] CellError),
    #[error("net {net}: value {value} exceeds declared range {max}")]
    NetRange { net: NetId, value: u8, max: u8 },
    #[error("expected {expected} input digits, got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("operand {operand}: expected radix {expected}, got {got}")]
    InputRadix {
        operand: usize,
        expected: Radix,
        got: Radix,
    },
    #[error("missing net {0}")]
    UnknownNet(NetId),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| format!("  {x}"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    name: String,
    interface: Interface,
    inputs: Vec<PrimaryInput>,
    outputs: Vec<NetId>,
    instances: Vec<Instance>,
    nets: Vec<Net>,
    order: Vec<usize>,
}

impl Netlist {
    /// Validates the parts and caches the evaluation order.
    pub fn new(
        name: impl Into<String>,
        interface: Interface,
        inputs: Vec<PrimaryInput>,
        outputs: Vec<NetId>,
        instances: Vec<Instance>,
        nets: Vec<Net>,
    ) -> Result<Self, NetlistError> {
        let mut netlist = Netlist {
            name: name.into(),
            interface,
            inputs,
            outputs,
            instances,
            nets,
            order: Vec::new(),
        };
        netlist.order = netlist.check()?;
        Ok(netlist)
    }

    /// An empty netlist with zero-width operands.
    pub fn empty(function: Function, radix: Radix) -> Self {
        Netlist {
            name: "empty".into(),
            interface: Interface {
                function,
                radix,
                widths: [0, 0],
            },
            inputs: Vec::new(),
            outputs: Vec::new(),
            instances: Vec::new(),
            nets: Vec::new(),
            order: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn interface(&self) -> Interface {
        self.interface
    }

    pub fn inputs(&self) -> &[PrimaryInput] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NetId] {
        &self.outputs
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn nets(&self) -> &[Net] {
        &self.nets
    }

    pub fn net(&self, id: NetId) -> Option<&Net> {
        self.nets.get(id.index())
    }

    /// Structural check; always `Ok` for a constructed netlist.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        validate_parts(&self.inputs, &self.outputs, &self.instances, &self.nets).map(|_| ())
    }

    fn check(&self) -> Result<Vec<usize>, NetlistError> {
        let mut order =
            validate_parts(&self.inputs, &self.outputs, &self.instances, &self.nets)
                .map_err(NetlistError::Invalid)?;
        let iface = self.interface;
        let expected = iface.widths[0] + iface.widths[1];
        let mut bad = Vec::new();
        if self.inputs.len() != expected {
            bad.push(Violation::BadInput {
                name: "*".into(),
                reason: format!(
                    "interface declares {expected} input digits, netlist has {}",
                    self.inputs.len()
                ),
            });
        }
        let digit = ValueRange::for_radix(iface.radix);
        for pi in &self.inputs {
            if pi.range != digit {
                bad.push(Violation::BadInput {
                    name: pi.name.clone(),
                    reason: format!("range {} does not match radix {}", pi.range, iface.radix),
                });
            }
        }
        if !bad.is_empty() {
            return Err(NetlistError::Invalid(bad));
        }
        order.shrink_to_fit();
        Ok(order)
    }

    /// Fresh per-evaluation value storage, one slot per net.
    pub fn new_state(&self) -> Vec<u8> {
        vec![0; self.nets.len()]
    }

    /// Evaluates with flat input digits (operand digits concatenated) into `state`.
    pub fn evaluate_into(&self, input_digits: &[u8], state: &mut [u8]) -> Result<(), NetlistError> {
        if input_digits.len() != self.inputs.len() {
            return Err(NetlistError::InputCount {
                expected: self.inputs.len(),
                got: input_digits.len(),
            });
        }
        debug_assert_eq!(state.len(), self.nets.len());
        for net in &self.nets {
            if let Driver::Const(v) = net.driver {
                state[net.id.index()] = v;
            }
        }
        for (pi, &v) in self.inputs.iter().zip(input_digits) {
            if !pi.range.contains(v) {
                return Err(NetlistError::NetRange {
                    net: pi.net,
                    value: v,
                    max: pi.range.max_value(),
                });
            }
            state[pi.net.index()] = v;
        }
        let mut ins = [0u8; 3];
        let mut outs = [0u8; 2];
        for &idx in &self.order {
            let inst = &self.instances[idx];
            for (slot, net) in ins.iter_mut().zip(&inst.inputs) {
                *slot = state[net.index()];
            }
            inst.cell.eval_into(&ins[..inst.inputs.len()], &mut outs)?;
            for (&v, net) in outs.iter().zip(&inst.outputs) {
                let max = self.nets[net.index()].range.max_value();
                if v > max {
                    return Err(NetlistError::NetRange { net: *net, value: v, max });
                }
                state[net.index()] = v;
            }
        }
        Ok(())
    }

    /// Evaluates one digit vector per operand and returns the output digits.
    pub fn evaluate(&self, operands: &[crate::value::DigitVector]) -> Result<Vec<u8>, NetlistError> {
        let mut flat = Vec::with_capacity(self.inputs.len());
        for (k, op) in operands.iter().enumerate() {
            if op.radix() != self.interface.radix {
                return Err(NetlistError::InputRadix {
                    operand: k,
                    expected: self.interface.radix,
                    got: op.radix(),
                });
            }
            flat.extend_from_slice(op.digits());
        }
        let mut state = self.new_state();
        self.evaluate_into(&flat, &mut state)?;
        Ok(self.outputs.iter().map(|n| state[n.index()]).collect())
    }

    pub fn read_outputs<'a>(&'a self, state: &'a [u8]) -> impl Iterator<Item = u8> + 'a {
        self.outputs.iter().map(move |n| state[n.index()])
    }

    pub fn bill_of_cells(&self) -> BillOfCells {
        BillOfCells::from_cells(self.instances.iter().map(|i| i.cell))
    }
}

/// Returns the topological instance order, or every violation found.
pub fn validate_parts(
    inputs: &[PrimaryInput],
    outputs: &[NetId],
    instances: &[Instance],
    nets: &[Net],
) -> Result<Vec<usize>, Vec<Violation>> {
    let mut v = Vec::new();
    for (position, net) in nets.iter().enumerate() {
        if net.id.index() != position {
            v.push(Violation::NetOrder {
                position,
                net: net.id,
            });
        }
    }
    for (position, inst) in instances.iter().enumerate() {
        if inst.id.index() != position {
            v.push(Violation::InstanceOrder {
                position,
                instance: inst.id,
            });
        }
    }
    if !v.is_empty() {
        return Err(v);
    }

    // who actually binds each net as an output or primary input
    let mut sources: Vec<Vec<Driver>> = vec![Vec::new(); nets.len()];
    for (k, pi) in inputs.iter().enumerate() {
        match sources.get_mut(pi.net.index()) {
            Some(s) => s.push(Driver::Input(k)),
            None => v.push(Violation::BadInput {
                name: pi.name.clone(),
                reason: format!("missing net {}", pi.net),
            }),
        }
    }
    for inst in instances {
        let ins = inst.cell.inputs();
        let outs = inst.cell.outputs();
        for (port, spec) in ins.iter().enumerate() {
            match inst.inputs.get(port) {
                None => v.push(Violation::UnboundPort {
                    instance: inst.id,
                    cell: inst.cell,
                    port: spec.name,
                }),
                Some(&net) => match nets.get(net.index()) {
                    None => v.push(Violation::UnknownNet {
                        instance: inst.id,
                        port: spec.name,
                        net,
                    }),
                    Some(n) if n.range > spec.range => v.push(Violation::RangeMismatch {
                        instance: inst.id,
                        cell: inst.cell,
                        port: spec.name,
                        net,
                        net_range: n.range,
                        port_range: spec.range,
                    }),
                    Some(_) => {}
                },
            }
        }
        for (port, spec) in outs.iter().enumerate() {
            match inst.outputs.get(port) {
                None => v.push(Violation::UnboundPort {
                    instance: inst.id,
                    cell: inst.cell,
                    port: spec.name,
                }),
                Some(&net) => match sources.get_mut(net.index()) {
                    None => v.push(Violation::UnknownNet {
                        instance: inst.id,
                        port: spec.name,
                        net,
                    }),
                    Some(s) => s.push(Driver::Cell {
                        instance: inst.id,
                        port,
                    }),
                },
            }
        }
        let extra = inst.inputs.len().saturating_sub(ins.len())
            + inst.outputs.len().saturating_sub(outs.len());
        if extra > 0 {
            v.push(Violation::ExtraBindings {
                instance: inst.id,
                cell: inst.cell,
                extra,
            });
        }
    }
    for (net, found) in nets.iter().zip(&sources) {
        let declared_ok = match net.driver {
            Driver::Const(value) => {
                if !net.range.contains(value) {
                    v.push(Violation::ConstRange {
                        net: net.id,
                        value,
                        range: net.range,
                    });
                }
                found.is_empty()
            }
            d => found.len() == 1 && found[0] == d,
        };
        let bound = found.len() + usize::from(matches!(net.driver, Driver::Const(_)));
        if bound > 1 {
            v.push(Violation::MultipleDrivers { net: net.id });
        } else if !declared_ok {
            v.push(Violation::DanglingDriver { net: net.id });
        }
        // a cell output may be declared narrower than its port (range-aware
        // compression); the bound is then enforced during evaluation
        let narrowable = matches!(net.driver, Driver::Cell { .. });
        let driven = match net.driver {
            Driver::Input(k) => inputs.get(k).map(|pi| pi.range),
            Driver::Cell { instance, port } => instances
                .get(instance.index())
                .and_then(|i| i.cell.outputs().get(port))
                .map(|p| p.range),
            Driver::Const(_) => None,
        };
        if let Some(driven) = driven {
            if net.range > driven || (!narrowable && net.range != driven) {
                v.push(Violation::DriverRange {
                    net: net.id,
                    declared: net.range,
                    driven,
                });
            }
        }
    }
    for &o in outputs {
        if o.index() >= nets.len() {
            v.push(Violation::UnknownOutput(o));
        }
    }
    if !v.is_empty() {
        return Err(v);
    }

    // Kahn's algorithm over instances
    let mut fanout: Vec<Vec<usize>> = vec![Vec::new(); nets.len()];
    let mut pending: Vec<usize> = Vec::with_capacity(instances.len());
    for (idx, inst) in instances.iter().enumerate() {
        let mut deps = 0;
        for &net in &inst.inputs {
            if let Driver::Cell { .. } = nets[net.index()].driver {
                fanout[net.index()].push(idx);
                deps += 1;
            }
        }
        pending.push(deps);
    }
    let mut queue: VecDeque<usize> = (0..instances.len()).filter(|&i| pending[i] == 0).collect();
    let mut order = Vec::with_capacity(instances.len());
    while let Some(idx) = queue.pop_front() {
        order.push(idx);
        for &net in &instances[idx].outputs {
            for &reader in &fanout[net.index()] {
                pending[reader] -= 1;
                if pending[reader] == 0 {
                    queue.push_back(reader);
                }
            }
        }
    }
    if order.len() != instances.len() {
        let stuck = (0..instances.len())
            .filter(|&i| pending[i] > 0)
            .map(|i| instances[i].id)
            .collect();
        return Err(vec![Violation::Cycle(stuck)]);
    }
    Ok(order)
}

/// Incremental construction. Cell inputs are range-checked as they are wired.
#[derive(Debug, Default)]
pub struct NetlistBuilder {
    inputs: Vec<PrimaryInput>,
    instances: Vec<Instance>,
    nets: Vec<Net>,
    consts: BTreeMap<u8, NetId>,
}

impl NetlistBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn new_net(&mut self, range: ValueRange, driver: Driver) -> NetId {
        let id = NetId(self.nets.len() as u32);
        self.nets.push(Net { id, range, driver });
        id
    }

    pub fn input(&mut self, name: impl Into<String>, range: ValueRange) -> NetId {
        let k = self.inputs.len();
        let net = self.new_net(range, Driver::Input(k));
        self.inputs.push(PrimaryInput {
            name: name.into(),
            range,
            net,
        });
        net
    }

    /// Shared constant net (binary range for 0 and 1).
    pub fn constant(&mut self, value: u8) -> Result<NetId, NetlistError> {
        if let Some(&id) = self.consts.get(&value) {
            return Ok(id);
        }
        let range = ValueRange::new(value.max(1)).map_err(|_| {
            NetlistError::Invalid(vec![Violation::ConstRange {
                net: NetId(self.nets.len() as u32),
                value,
                range: ValueRange::QUATERNARY,
            }])
        })?;
        let id = self.new_net(range, Driver::Const(value));
        self.consts.insert(value, id);
        Ok(id)
    }

    pub fn range(&self, net: NetId) -> Option<ValueRange> {
        self.nets.get(net.index()).map(|n| n.range)
    }

    /// Instantiates `cell` on `inputs` and returns its fresh output nets.
    pub fn cell(&mut self, cell: CellKind, inputs: &[NetId]) -> Result<Vec<NetId>, NetlistError> {
        let ranges: Vec<ValueRange> = cell.outputs().iter().map(|p| p.range).collect();
        self.cell_narrowed(cell, inputs, &ranges)
    }

    /// Like [`cell`](Self::cell) but declares each output with the given
    /// range, which must not exceed the port range.
    pub fn cell_narrowed(
        &mut self,
        cell: CellKind,
        inputs: &[NetId],
        out_ranges: &[ValueRange],
    ) -> Result<Vec<NetId>, NetlistError> {
        let id = InstanceId(self.instances.len() as u32);
        let specs = cell.inputs();
        if inputs.len() != specs.len() {
            return Err(CellError::Arity {
                cell,
                expected: specs.len(),
                got: inputs.len(),
            }
            .into());
        }
        for (spec, &net) in specs.iter().zip(inputs) {
            let range = self.range(net).ok_or(NetlistError::UnknownNet(net))?;
            if range > spec.range {
                return Err(NetlistError::Invalid(vec![Violation::RangeMismatch {
                    instance: id,
                    cell,
                    port: spec.name,
                    net,
                    net_range: range,
                    port_range: spec.range,
                }]));
            }
        }
        let out_specs = cell.outputs();
        if out_ranges.len() != out_specs.len() {
            return Err(CellError::Arity {
                cell,
                expected: out_specs.len(),
                got: out_ranges.len(),
            }
            .into());
        }
        let mut violations = Vec::new();
        for (port, (spec, &range)) in out_specs.iter().zip(out_ranges).enumerate() {
            if range > spec.range {
                violations.push(Violation::DriverRange {
                    net: NetId((self.nets.len() + port) as u32),
                    declared: range,
                    driven: spec.range,
                });
            }
        }
        if !violations.is_empty() {
            return Err(NetlistError::Invalid(violations));
        }
        let outputs: Vec<NetId> = out_ranges
            .iter()
            .enumerate()
            .map(|(port, &range)| self.new_net(range, Driver::Cell { instance: id, port }))
            .collect();
        self.instances.push(Instance {
            id,
            cell,
            inputs: inputs.to_vec(),
            outputs: outputs.clone(),
        });
        Ok(outputs)
    }

    pub fn num_instances(&self) -> usize {
        self.instances.len()
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn finish(
        self,
        name: impl Into<String>,
        interface: Interface,
        outputs: Vec<NetId>,
    ) -> Result<Netlist, NetlistError> {
        Netlist::new(name, interface, self.inputs, outputs, self.instances, self.nets)
    }
}

// ---------------------------------------------------------------------------
// JSON form

#[derive(Debug, Serialize, Deserialize)]
struct NetlistJson {
    name: String,
    function: Function,
    radix: Radix,
    operands: Vec<OperandJson>,
    inputs: Vec<InputJson>,
    outputs: Vec<NetId>,
    instances: Vec<InstanceJson>,
    nets: Vec<NetJson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct OperandJson {
    name: String,
    width: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct InputJson {
    name: String,
    range: ValueRange,
    net: NetId,
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceJson {
    id: InstanceId,
    cell: CellKind,
    bindings: indexmap::IndexMap<String, NetId>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NetJson {
    id: NetId,
    range: ValueRange,
    driver: DriverJson,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum DriverJson {
    Input {
        input: usize,
    },
    Const {
        #[serde(rename = "const")]
        value: u8,
    },
    Cell {
        instance: InstanceId,
        port: String,
    },
}

const OPERAND_NAMES: [&str; 2] = ["a", "b"];

impl Netlist {
    pub fn to_json(&self) -> String {
        let doc = NetlistJson {
            name: self.name.clone(),
            function: self.interface.function,
            radix: self.interface.radix,
            operands: OPERAND_NAMES
                .iter()
                .zip(self.interface.widths)
                .map(|(n, w)| OperandJson {
                    name: (*n).into(),
                    width: w,
                })
                .collect(),
            inputs: self
                .inputs
                .iter()
                .map(|pi| InputJson {
                    name: pi.name.clone(),
                    range: pi.range,
                    net: pi.net,
                })
                .collect(),
            outputs: self.outputs.clone(),
            instances: self
                .instances
                .iter()
                .map(|inst| InstanceJson {
                    id: inst.id,
                    cell: inst.cell,
                    bindings: inst
                        .cell
                        .ports()
                        .iter()
                        .zip(inst.inputs.iter().chain(&inst.outputs))
                        .map(|(p, &n)| (p.name.to_string(), n))
                        .collect(),
                })
                .collect(),
            nets: self
                .nets
                .iter()
                .map(|n| NetJson {
                    id: n.id,
                    range: n.range,
                    driver: match n.driver {
                        Driver::Input(input) => DriverJson::Input { input },
                        Driver::Const(value) => DriverJson::Const { value },
                        Driver::Cell { instance, port } => DriverJson::Cell {
                            instance,
                            port: self.instances[instance.index()].cell.outputs()[port]
                                .name
                                .to_string(),
                        },
                    },
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("netlist serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, NetlistError> {
        let doc: NetlistJson = serde_json::from_str(text)?;
        let mut violations = Vec::new();
        if doc.operands.len() != 2 {
            violations.push(Violation::BadInput {
                name: "*".into(),
                reason: format!("expected 2 operands, got {}", doc.operands.len()),
            });
        }
        let mut instances = Vec::with_capacity(doc.instances.len());
        for ij in &doc.instances {
            let mut inputs = Vec::new();
            let mut outputs = Vec::new();
            for spec in ij.cell.ports() {
                let Some(&net) = ij.bindings.get(spec.name) else {
                    violations.push(Violation::UnboundPort {
                        instance: ij.id,
                        cell: ij.cell,
                        port: spec.name,
                    });
                    continue;
                };
                match spec.direction {
                    crate::cells::Direction::In => inputs.push(net),
                    crate::cells::Direction::Out => outputs.push(net),
                }
            }
            let extra = ij
                .bindings
                .keys()
                .filter(|k| ij.cell.port(k).is_none())
                .count();
            if extra > 0 {
                violations.push(Violation::ExtraBindings {
                    instance: ij.id,
                    cell: ij.cell,
                    extra,
                });
            }
            instances.push(Instance {
                id: ij.id,
                cell: ij.cell,
                inputs,
                outputs,
            });
        }
        let mut nets = Vec::with_capacity(doc.nets.len());
        for nj in doc.nets {
            let driver = match nj.driver {
                DriverJson::Input { input } => Driver::Input(input),
                DriverJson::Const { value } => Driver::Const(value),
                DriverJson::Cell { instance, port } => {
                    let idx = doc
                        .instances
                        .iter()
                        .find(|i| i.id == instance)
                        .and_then(|i| i.cell.outputs().iter().position(|p| p.name == port));
                    match idx {
                        Some(port) => Driver::Cell { instance, port },
                        None => {
                            violations.push(Violation::DanglingDriver { net: nj.id });
                            continue;
                        }
                    }
                }
            };
            nets.push(Net {
                id: nj.id,
                range: nj.range,
                driver,
            });
        }
        if !violations.is_empty() {
            return Err(NetlistError::Invalid(violations));
        }
        let inputs = doc
            .inputs
            .into_iter()
            .map(|i| PrimaryInput {
                name: i.name,
                range: i.range,
                net: i.net,
            })
            .collect();
        let interface = Interface {
            function: doc.function,
            radix: doc.radix,
            widths: [doc.operands[0].width, doc.operands[1].width],
        };
        Netlist::new(doc.name, interface, inputs, doc.outputs, instances, nets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::to_digits;

    fn iface(function: Function, radix: Radix, w: usize) -> Interface {
        Interface {
            function,
            radix,
            widths: [w, w],
        }
    }

    fn single(cell: CellKind, radix: Radix) -> Netlist {
        let mut b = NetlistBuilder::new();
        let r = ValueRange::for_radix(radix);
        let x = b.input("a[0]", r);
        let y = b.input("b[0]", r);
        let outs = b.cell(cell, &[x, y]).unwrap();
        b.finish(cell.name(), iface(Function::Mul, radix, 1), outs)
            .unwrap()
    }

    #[test]
    fn empty_is_valid() {
        let n = Netlist::empty(Function::Mul, Radix::Binary);
        assert!(n.validate().is_ok());
        assert_eq!(n.evaluate(&[]).unwrap(), Vec::<u8>::new());
        assert!(n.bill_of_cells().is_empty());
    }

    #[test]
    fn and2_netlist() {
        let n = single(CellKind::And2, Radix::Binary);
        let one = to_digits(1, 2, 1).unwrap();
        assert_eq!(n.evaluate(&[one.clone(), one]).unwrap(), vec![1]);
    }

    #[test]
    fn qmul1_netlist() {
        let n = single(CellKind::Qmul1, Radix::Quaternary);
        let three = to_digits(3, 4, 1).unwrap();
        assert_eq!(n.evaluate(&[three.clone(), three]).unwrap(), vec![1, 2]);
    }

    #[test]
    fn builder_rejects_wide_net_on_binary_port() {
        let mut b = NetlistBuilder::new();
        let q = b.input("q", ValueRange::QUATERNARY);
        let x = b.input("x", ValueRange::BINARY);
        let err = b.cell(CellKind::Fa, &[q, x, x]).unwrap_err();
        match err {
            NetlistError::Invalid(v) => assert!(matches!(
                v[0],
                Violation::RangeMismatch { port: "a", .. }
            )),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn validate_reports_range_violation() {
        // quaternary net into binary FA input, assembled by hand
        let nets = vec![
            Net {
                id: NetId(0),
                range: ValueRange::QUATERNARY,
                driver: Driver::Input(0),
            },
            Net {
                id: NetId(1),
                range: ValueRange::BINARY,
                driver: Driver::Cell {
                    instance: InstanceId(0),
                    port: 0,
                },
            },
            Net {
                id: NetId(2),
                range: ValueRange::BINARY,
                driver: Driver::Cell {
                    instance: InstanceId(0),
                    port: 1,
                },
            },
        ];
        let inputs = vec![PrimaryInput {
            name: "q".into(),
            range: ValueRange::QUATERNARY,
            net: NetId(0),
        }];
        let instances = vec![Instance {
            id: InstanceId(0),
            cell: CellKind::Fa,
            inputs: vec![NetId(0), NetId(0), NetId(0)],
            outputs: vec![NetId(1), NetId(2)],
        }];
        let v = validate_parts(&inputs, &[NetId(1)], &instances, &nets).unwrap_err();
        assert_eq!(v.len(), 3);
        assert!(v.iter().all(|x| matches!(x, Violation::RangeMismatch { .. })));
    }

    #[test]
    fn validate_reports_multiple_drivers() {
        let nets = vec![
            Net {
                id: NetId(0),
                range: ValueRange::BINARY,
                driver: Driver::Input(0),
            },
            Net {
                id: NetId(1),
                range: ValueRange::BINARY,
                driver: Driver::Cell {
                    instance: InstanceId(0),
                    port: 0,
                },
            },
        ];
        let inputs = vec![PrimaryInput {
            name: "x".into(),
            range: ValueRange::BINARY,
            net: NetId(0),
        }];
        let instances = (0..2)
            .map(|k| Instance {
                id: InstanceId(k),
                cell: CellKind::And2,
                inputs: vec![NetId(0), NetId(0)],
                outputs: vec![NetId(1)],
            })
            .collect::<Vec<_>>();
        let v = validate_parts(&inputs, &[], &instances, &nets).unwrap_err();
        assert_eq!(v, vec![Violation::MultipleDrivers { net: NetId(1) }]);
    }

    #[test]
    fn validate_reports_cycle() {
        let nets = vec![
            Net {
                id: NetId(0),
                range: ValueRange::BINARY,
                driver: Driver::Cell {
                    instance: InstanceId(0),
                    port: 0,
                },
            },
            Net {
                id: NetId(1),
                range: ValueRange::BINARY,
                driver: Driver::Cell {
                    instance: InstanceId(1),
                    port: 0,
                },
            },
        ];
        let instances = vec![
            Instance {
                id: InstanceId(0),
                cell: CellKind::And2,
                inputs: vec![NetId(1), NetId(1)],
                outputs: vec![NetId(0)],
            },
            Instance {
                id: InstanceId(1),
                cell: CellKind::And2,
                inputs: vec![NetId(0), NetId(0)],
                outputs: vec![NetId(1)],
            },
        ];
        let v = validate_parts(&[], &[], &instances, &nets).unwrap_err();
        assert_eq!(v, vec![Violation::Cycle(vec![InstanceId(0), InstanceId(1)])]);
    }

    #[test]
    fn unbound_port() {
        let nets = vec![Net {
            id: NetId(0),
            range: ValueRange::BINARY,
            driver: Driver::Const(0),
        }];
        let instances = vec![Instance {
            id: InstanceId(0),
            cell: CellKind::And2,
            inputs: vec![NetId(0)],
            outputs: vec![],
        }];
        let v = validate_parts(&[], &[], &instances, &nets).unwrap_err();
        assert!(v.contains(&Violation::UnboundPort {
            instance: InstanceId(0),
            cell: CellKind::And2,
            port: "b"
        }));
        assert!(v.contains(&Violation::UnboundPort {
            instance: InstanceId(0),
            cell: CellKind::And2,
            port: "y"
        }));
    }

    #[test]
    fn input_out_of_range_names_net() {
        let n = single(CellKind::And2, Radix::Binary);
        let mut st = n.new_state();
        let err = n.evaluate_into(&[2, 1], &mut st).unwrap_err();
        assert!(matches!(err, NetlistError::NetRange { net: NetId(0), value: 2, max: 1 }));
    }

    #[test]
    fn json_round_trip() {
        let mut b = NetlistBuilder::new();
        let a = b.input("a[0]", ValueRange::QUATERNARY);
        let c = b.input("b[0]", ValueRange::QUATERNARY);
        let zero = b.constant(0).unwrap();
        let out = b.cell(CellKind::Q331, &[a, c, zero]).unwrap();
        let n = b
            .finish("adder", iface(Function::Add, Radix::Quaternary, 1), out)
            .unwrap();
        let text = n.to_json();
        let back = Netlist::from_json(&text).unwrap();
        assert_eq!(back, n);
        assert_eq!(back.to_json(), text);
        assert!(text.contains("\"const\": 0"));
    }

    #[test]
    fn narrowed_output_is_enforced_at_evaluation() {
        // QH31 on two binary wires: sum <= 2, carry always 0 but declared binary
        let mut b = NetlistBuilder::new();
        let x = b.input("a[0]", ValueRange::BINARY);
        let y = b.input("b[0]", ValueRange::BINARY);
        let out = b
            .cell_narrowed(CellKind::Qh31, &[x, y], &[ValueRange::TERNARY, ValueRange::BINARY])
            .unwrap();
        let n = b
            .finish("narrow", iface(Function::Add, Radix::Binary, 1), out)
            .unwrap();
        assert!(n.validate().is_ok());
        let mut st = n.new_state();
        n.evaluate_into(&[1, 1], &mut st).unwrap();
        assert_eq!(n.read_outputs(&st).collect::<Vec<_>>(), vec![2, 0]);

        // an unsound narrowing is caught when the bound is exceeded
        let mut b = NetlistBuilder::new();
        let x = b.input("a[0]", ValueRange::BINARY);
        let y = b.input("b[0]", ValueRange::BINARY);
        let out = b
            .cell_narrowed(CellKind::Qh31, &[x, y], &[ValueRange::BINARY, ValueRange::BINARY])
            .unwrap();
        let n = b
            .finish("unsound", iface(Function::Add, Radix::Binary, 1), out)
            .unwrap();
        let mut st = n.new_state();
        assert!(matches!(
            n.evaluate_into(&[1, 1], &mut st),
            Err(NetlistError::NetRange { value: 2, max: 1, .. })
        ));
    }

    #[test]
    fn widening_an_output_is_rejected() {
        let mut b = NetlistBuilder::new();
        let x = b.input("a[0]", ValueRange::BINARY);
        let err = b
            .cell_narrowed(CellKind::Nqi, &[x], &[ValueRange::QUATERNARY])
            .unwrap_err();
        assert!(matches!(err, NetlistError::Invalid(ref v) if matches!(v[0], Violation::DriverRange { .. })));
    }
}
