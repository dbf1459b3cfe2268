//! Multiplier and adder constructors.
//!
//! All multipliers share one shape: a partial-product array drops wires into
//! weighted columns, a reduction tree compresses every column to at most two
//! wires, and a ripple carry-propagate adder (CPA) produces the digits.
//!
//! Columns track the provable maximum of every wire. For radix 4 the
//! compressor is picked from those maxima, and its outputs are declared with
//! the narrowed ranges `sum = min(Σ, 3)`, `carry = Σ div 4`. A carry whose
//! bound is 0 never enters a column. Wires at weight ≥ 2n are dropped: every
//! wire is non-negative and the product is below radix^2n, so they are 0.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cells::CellKind;
use crate::costing::BillOfCells;
use crate::netlist::{Function, Interface, NetId, Netlist, NetlistBuilder, NetlistError};
use crate::value::{Radix, ValueRange};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("operand width must be at least 1")]
    ZeroWidth,
    #[error("operand width {0} is too large")]
    TooWide(usize),
    #[error("wire {net} of range {range} cannot enter a radix-{radix} column")]
    WireRange { net: NetId, range: u8, radix: u32 },
    #[error("column {column} has {wires} wires; the final adder takes at most 2")]
    TooManyRows { column: usize, wires: usize },
    #[error("column compression made no progress in stage {stage}")]
    Stalled { stage: usize },
    #[error("unknown policy '{0}' (expected wallace or dadda)")]
    UnknownPolicy(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    #[default]
    Wallace,
    Dadda,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Wallace => "wallace",
            Policy::Dadda => "dadda",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = GenError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "wallace" => Ok(Policy::Wallace),
            "dadda" => Ok(Policy::Dadda),
            _ => Err(GenError::UnknownPolicy(s.to_string())),
        }
    }
}

/// A wire waiting in a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Wire {
    pub net: NetId,
    pub range: ValueRange,
    /// Row of the partial-product array this wire descends from. Only the
    /// binary Wallace tree groups by it.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Column {
    pub weight: usize,
    pub wires: Vec<Wire>,
}

pub type Columns = Vec<Column>;

fn empty_columns(n: usize) -> Columns {
    (0..n)
        .map(|weight| Column {
            weight,
            wires: Vec::new(),
        })
        .collect()
}

/// One compressor placed by the reduction tree or the CPA.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    /// 1-based reduction stage; 0 for the CPA.
    pub stage: usize,
    pub column: usize,
    pub cell: CellKind,
    pub consumed: Vec<NetId>,
    /// Outputs that went on into a column or the result.
    pub produced: Vec<NetId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionPlan {
    pub radix: Radix,
    pub policy: Policy,
    /// Column contents before the first stage and after each stage.
    pub snapshots: Vec<Vec<Vec<NetId>>>,
    pub steps: Vec<Step>,
}

impl ReductionPlan {
    pub fn num_stages(&self) -> usize {
        self.snapshots.len().saturating_sub(1)
    }

    pub fn bill(&self) -> BillOfCells {
        BillOfCells::from_cells(self.steps.iter().map(|s| s.cell))
    }

    /// Weighted value of every snapshot under one evaluated state.
    pub fn stage_values(&self, state: &[u8]) -> Vec<u128> {
        let base = u128::from(self.radix.base());
        self.snapshots
            .iter()
            .map(|cols| {
                cols.iter()
                    .enumerate()
                    .map(|(w, nets)| {
                        let s: u128 = nets.iter().map(|n| u128::from(state[n.index()])).sum();
                        s * base.pow(w as u32)
                    })
                    .sum()
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let heights = |cols: &Vec<Vec<NetId>>| {
            cols.iter()
                .map(|c| c.len().to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut s = format!(
            "radix {} {} reduction, {} stages\n",
            self.radix.base(),
            self.policy,
            self.num_stages()
        );
        s.push_str(&format!("heights: {}\n", heights(&self.snapshots[0])));
        for stage in 1..=self.num_stages() {
            s.push_str(&format!("stage {stage}\n"));
            for st in self.steps.iter().filter(|st| st.stage == stage) {
                s.push_str(&format!(
                    "  col {:>2} {:<5} {} -> {}\n",
                    st.column,
                    st.cell.name(),
                    net_list(&st.consumed),
                    net_list(&st.produced)
                ));
            }
            s.push_str(&format!("heights: {}\n", heights(&self.snapshots[stage])));
        }
        s
    }
}

fn net_list(nets: &[NetId]) -> String {
    let parts: Vec<String> = nets.iter().map(|n| n.to_string()).collect();
    format!("[{}]", parts.join(" "))
}

/// A generated circuit and its bill split by construction phase.
#[derive(Debug, Clone)]
pub struct Generated {
    pub netlist: Netlist,
    pub plan: Option<ReductionPlan>,
    pub partial_products: BillOfCells,
    pub reduction: BillOfCells,
    pub cpa: BillOfCells,
    /// Decoders and encoders at radix boundaries.
    pub interfaces: BillOfCells,
}

impl Generated {
    pub fn bill(&self) -> BillOfCells {
        self.netlist.bill_of_cells()
    }

    /// Reduction tree plus CPA.
    pub fn adder_bill(&self) -> BillOfCells {
        self.reduction.clone().merged(&self.cpa)
    }
}

// ---------------------------------------------------------------------------
// Partial products

fn operand_inputs(b: &mut NetlistBuilder, n: usize, range: ValueRange) -> (Vec<NetId>, Vec<NetId>) {
    let a = (0..n).map(|i| b.input(format!("a[{i}]"), range)).collect();
    let bb = (0..n).map(|i| b.input(format!("b[{i}]"), range)).collect();
    (a, bb)
}

fn check_width(n: usize, max: usize) -> Result<(), GenError> {
    match n {
        0 => Err(GenError::ZeroWidth),
        n if n > max => Err(GenError::TooWide(n)),
        _ => Ok(()),
    }
}

fn and_array(b: &mut NetlistBuilder, a: &[NetId], bb: &[NetId]) -> Result<Columns, GenError> {
    let mut cols = empty_columns(a.len() + bb.len());
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in bb.iter().enumerate() {
            let y = b.cell(CellKind::And2, &[ai, bj])?[0];
            cols[i + j].wires.push(Wire {
                net: y,
                range: ValueRange::BINARY,
                line: i,
            });
        }
    }
    Ok(cols)
}

fn qmul_array(b: &mut NetlistBuilder, a: &[NetId], bb: &[NetId]) -> Result<Columns, GenError> {
    let mut cols = empty_columns(a.len() + bb.len());
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in bb.iter().enumerate() {
            let out = b.cell(CellKind::Qmul1, &[ai, bj])?;
            cols[i + j].wires.push(Wire {
                net: out[0],
                range: ValueRange::QUATERNARY,
                line: 2 * i,
            });
            cols[i + j + 1].wires.push(Wire {
                net: out[1],
                range: ValueRange::TERNARY,
                line: 2 * i + 1,
            });
        }
    }
    Ok(cols)
}

/// n×n AND array on fresh binary inputs `a[i]`, `b[j]`. Bit a_i·b_j lands in
/// column i+j; 2n columns are returned.
pub fn build_partial_products_binary(n: usize) -> Result<(NetlistBuilder, Columns), GenError> {
    check_width(n, 32)?;
    let mut b = NetlistBuilder::new();
    let (a, bb) = operand_inputs(&mut b, n, ValueRange::BINARY);
    let cols = and_array(&mut b, &a, &bb)?;
    Ok((b, cols))
}

/// n×n QMUL1 array on fresh quaternary inputs. The product digit of a_i·b_j
/// lands in column i+j and its ternary carry in column i+j+1.
pub fn build_partial_products_quaternary(n: usize) -> Result<(NetlistBuilder, Columns), GenError> {
    check_width(n, 16)?;
    let mut b = NetlistBuilder::new();
    let (a, bb) = operand_inputs(&mut b, n, ValueRange::QUATERNARY);
    let cols = qmul_array(&mut b, &a, &bb)?;
    Ok((b, cols))
}

// ---------------------------------------------------------------------------
// Compressors

struct Placed {
    cell: CellKind,
    consumed: Vec<NetId>,
    sum: Wire,
    carry: Option<Wire>,
}

fn range_of(max: u8) -> ValueRange {
    ValueRange::new(max.max(1)).expect("bounded by 3")
}

/// Instantiates the cheapest compressor able to add `wires` (two or three of
/// them). `pad_zero` adds a constant 0 as third operand of a Q331, which is
/// how two quaternary wires are added.
fn place(b: &mut NetlistBuilder, radix: Radix, wires: &[Wire], pad_zero: bool, line: usize) -> Result<Placed, GenError> {
    let mut w = wires.to_vec();
    w.sort_by(|x, y| y.range.cmp(&x.range));
    let total: u8 = w.iter().map(|x| x.range.max_value()).sum();
    let nets: Vec<NetId> = w.iter().map(|x| x.net).collect();
    let smallest = if pad_zero { 0 } else { w.last().map_or(0, |x| x.range.max_value()) };
    let (cell, inputs) = match (radix, w.len() + usize::from(pad_zero)) {
        (Radix::Binary, 3) => (CellKind::Fa, nets),
        (Radix::Binary, 2) => (CellKind::Ha, nets),
        (Radix::Quaternary, 3) => {
            let cell = if smallest <= 1 { CellKind::Q331 } else { CellKind::Q332 };
            let mut inputs = nets;
            if pad_zero {
                inputs.push(b.constant(0)?);
            }
            (cell, inputs)
        }
        (Radix::Quaternary, 2) if smallest <= 1 => (CellKind::Qh31, nets),
        // QH32 takes its ternary operand on port a
        (Radix::Quaternary, 2) => (CellKind::Qh32, vec![nets[1], nets[0]]),
        _ => unreachable!("compressors take two or three operands"),
    };
    let base = radix.base() as u8;
    let sum_max = total.min(base - 1);
    let carry_max = total / base;
    let out = b.cell_narrowed(cell, &inputs, &[range_of(sum_max), range_of(carry_max)])?;
    Ok(Placed {
        cell,
        consumed: w.iter().map(|x| x.net).collect(),
        sum: Wire {
            net: out[0],
            range: range_of(sum_max),
            line,
        },
        carry: (carry_max > 0).then(|| Wire {
            net: out[1],
            range: range_of(carry_max),
            line: line + 1,
        }),
    })
}

/// Picks three wires for one radix-4 compressor: the three oldest, unless all
/// three are quaternary, in which case the two oldest join the first later
/// ternary wire (binary failing that). {3,3,3} has no cell.
fn pick_three(q: &[Wire]) -> Option<[usize; 3]> {
    if q.len() < 3 {
        return None;
    }
    if q[..3].iter().any(|w| w.range.max_value() <= 2) {
        return Some([0, 1, 2]);
    }
    [2u8, 1].iter().find_map(|&want| {
        (3..q.len())
            .find(|&k| q[k].range.max_value() == want)
            .map(|k| [0, 1, k])
    })
}

/// The oldest wire and the first later wire that together fit QH32 or QH31.
fn pick_two(q: &[Wire]) -> Option<[usize; 2]> {
    let first = q.first()?;
    (1..q.len())
        .find(|&k| first.range.max_value().min(q[k].range.max_value()) <= 2)
        .map(|k| [0, k])
}

fn take(q: &mut Vec<Wire>, idx: &[usize]) -> Vec<Wire> {
    let picked: Vec<Wire> = idx.iter().map(|&k| q[k]).collect();
    let mut sorted = idx.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    for k in sorted {
        q.remove(k);
    }
    picked
}

// ---------------------------------------------------------------------------
// Reduction

fn dadda_heights(max: usize) -> Vec<usize> {
    let mut d = vec![2];
    while *d.last().unwrap() < max {
        let next = d.last().unwrap() * 3 / 2;
        d.push(next);
    }
    d
}

fn snapshot(cols: &Columns) -> Vec<Vec<NetId>> {
    cols.iter()
        .map(|c| c.wires.iter().map(|w| w.net).collect())
        .collect()
}

fn max_height(cols: &Columns) -> usize {
    cols.iter().map(|c| c.wires.len()).max().unwrap_or(0)
}

fn record(steps: &mut Vec<Step>, stage: usize, column: usize, p: &Placed, carry_kept: bool) {
    let mut produced = vec![p.sum.net];
    if let (Some(c), true) = (p.carry, carry_kept) {
        produced.push(c.net);
    }
    steps.push(Step {
        stage,
        column,
        cell: p.cell,
        consumed: p.consumed.clone(),
        produced,
    });
}

/// Row-grouped binary Wallace stage: rows are taken three at a time and, in
/// every column, a group of three bits gets an FA, two bits an HA, one bit
/// passes. Group g feeds rows 2g (sums) and 2g+1 (carries); leftover rows
/// follow.
fn wallace_rows_stage(b: &mut NetlistBuilder, cols: &Columns, stage: usize, steps: &mut Vec<Step>) -> Result<Columns, GenError> {
    let lines = cols
        .iter()
        .flat_map(|c| c.wires.iter().map(|w| w.line + 1))
        .max()
        .unwrap_or(0);
    let groups = lines / 3;
    let mut next = empty_columns(cols.len());
    for (ci, col) in cols.iter().enumerate() {
        for g in 0..groups {
            let ws: Vec<Wire> = col
                .wires
                .iter()
                .filter(|w| w.line / 3 == g)
                .copied()
                .collect();
            match ws.len() {
                0 => {}
                1 => next[ci].wires.push(Wire { line: 2 * g, ..ws[0] }),
                _ => {
                    let p = place(b, Radix::Binary, &ws, false, 2 * g)?;
                    let keep = ci + 1 < cols.len();
                    record(steps, stage, ci, &p, keep);
                    next[ci].wires.push(p.sum);
                    if let (Some(c), true) = (p.carry, keep) {
                        next[ci + 1].wires.push(c);
                    }
                }
            }
        }
        for w in col.wires.iter().filter(|w| w.line >= 3 * groups) {
            next[ci].wires.push(Wire {
                line: 2 * groups + (w.line - 3 * groups),
                ..*w
            });
        }
    }
    for c in &mut next {
        c.wires.sort_by_key(|w| w.line);
    }
    Ok(next)
}

/// Column-FIFO stage. Without a limit (Wallace) every column is compressed
/// while three wires remain; with a Dadda limit a column is compressed only
/// down to the limit, counting carries already arriving from this stage.
fn fifo_stage(
    b: &mut NetlistBuilder,
    radix: Radix,
    cols: &Columns,
    limit: Option<usize>,
    stage: usize,
    steps: &mut Vec<Step>,
) -> Result<Columns, GenError> {
    let mut carries: Vec<Vec<Wire>> = vec![Vec::new(); cols.len() + 1];
    let mut next = empty_columns(cols.len());
    for (ci, col) in cols.iter().enumerate() {
        let mut q = col.wires.clone();
        let mut sums = Vec::new();
        loop {
            let height = q.len() + sums.len() + carries[ci].len();
            let group: Vec<Wire>;
            let mut pad = false;
            match limit {
                None if q.len() < 3 => break,
                Some(d) if height <= d => break,
                _ => {}
            }
            let wants_pair = matches!(limit, Some(d) if height == d + 1);
            match radix {
                Radix::Binary => {
                    if q.len() >= 3 && !wants_pair {
                        group = take(&mut q, &[0, 1, 2]);
                    } else if q.len() >= 2 {
                        group = take(&mut q, &[0, 1]);
                    } else {
                        break;
                    }
                }
                Radix::Quaternary => {
                    let pair = pick_two(&q);
                    let triple = pick_three(&q);
                    if let (true, Some(p)) = (wants_pair, pair) {
                        group = take(&mut q, &p);
                    } else if let Some(t) = triple {
                        group = take(&mut q, &t);
                    } else if let Some(p) = pair {
                        group = take(&mut q, &p);
                    } else if q.len() >= 3 {
                        group = take(&mut q, &[0, 1]);
                        pad = true;
                    } else {
                        break;
                    }
                }
            }
            let p = place(b, radix, &group, pad, 0)?;
            let keep = ci + 1 < cols.len();
            record(steps, stage, ci, &p, keep);
            sums.push(p.sum);
            if let (Some(c), true) = (p.carry, keep) {
                carries[ci + 1].push(c);
            }
        }
        // creation order: survivors, then this stage's carries, then sums
        next[ci].wires = q;
        next[ci].wires.append(&mut carries[ci]);
        next[ci].wires.append(&mut sums);
    }
    Ok(next)
}

/// Compresses every column to at most two wires. Carries out of the last
/// column are discarded, so callers size `cols` to make them provably 0.
pub fn compress_columns(
    b: &mut NetlistBuilder,
    cols: Columns,
    radix: Radix,
    policy: Policy,
) -> Result<(ReductionPlan, Columns), GenError> {
    for w in cols.iter().flat_map(|c| &c.wires) {
        if w.range.max_value() > radix.digit_max() || b.range(w.net) != Some(w.range) {
            return Err(GenError::WireRange {
                net: w.net,
                range: w.range.max_value(),
                radix: radix.base(),
            });
        }
    }
    let heights = dadda_heights(max_height(&cols));
    let mut plan = ReductionPlan {
        radix,
        policy,
        snapshots: vec![snapshot(&cols)],
        steps: Vec::new(),
    };
    let mut cols = cols;
    let mut stage = 0;
    while max_height(&cols) > 2 {
        stage += 1;
        let before = plan.steps.len();
        let h = max_height(&cols);
        cols = match (radix, policy) {
            (Radix::Binary, Policy::Wallace) => wallace_rows_stage(b, &cols, stage, &mut plan.steps)?,
            (_, Policy::Wallace) => fifo_stage(b, radix, &cols, None, stage, &mut plan.steps)?,
            (_, Policy::Dadda) => {
                let d = heights.iter().copied().filter(|&d| d < h).max().unwrap_or(2);
                fifo_stage(b, radix, &cols, Some(d), stage, &mut plan.steps)?
            }
        };
        if plan.steps.len() == before {
            return Err(GenError::Stalled { stage });
        }
        plan.snapshots.push(snapshot(&cols));
    }
    Ok((plan, cols))
}

// ---------------------------------------------------------------------------
// Final adder

/// Ripple carry-propagate adder over columns of at most two wires, least
/// significant first. Returns one output net per column; empty columns read
/// a constant 0. The carry out of the last column is discarded.
pub fn build_cpa(b: &mut NetlistBuilder, cols: &Columns, radix: Radix) -> Result<(Vec<NetId>, Vec<Step>), GenError> {
    let mut outputs = Vec::with_capacity(cols.len());
    let mut steps = Vec::new();
    let mut carry: Option<Wire> = None;
    for (ci, col) in cols.iter().enumerate() {
        if col.wires.len() > 2 {
            return Err(GenError::TooManyRows {
                column: ci,
                wires: col.wires.len(),
            });
        }
        let mut ins = col.wires.clone();
        ins.extend(carry.take());
        let out = match ins.len() {
            0 => b.constant(0)?,
            1 => ins[0].net,
            n => {
                let pad = n == 2 && ins.iter().all(|w| w.range.max_value() > 2);
                let p = place(b, radix, &ins, pad, 0)?;
                let keep = ci + 1 < cols.len();
                record(&mut steps, 0, ci, &p, keep);
                if keep {
                    carry = p.carry;
                }
                p.sum.net
            }
        };
        outputs.push(out);
    }
    Ok((outputs, steps))
}

// ---------------------------------------------------------------------------
// Architectures

fn steps_bill(steps: &[Step]) -> BillOfCells {
    BillOfCells::from_cells(steps.iter().map(|s| s.cell))
}

struct Core {
    outputs: Vec<NetId>,
    plan: ReductionPlan,
    partial_products: BillOfCells,
    cpa: BillOfCells,
}

fn binary_core(b: &mut NetlistBuilder, a: &[NetId], bb: &[NetId], policy: Policy) -> Result<Core, GenError> {
    let cols = and_array(b, a, bb)?;
    let pp = BillOfCells::from_cells(std::iter::repeat(CellKind::And2).take(a.len() * bb.len()));
    let (plan, cols) = compress_columns(b, cols, Radix::Binary, policy)?;
    let (outputs, steps) = build_cpa(b, &cols, Radix::Binary)?;
    Ok(Core {
        outputs,
        plan,
        partial_products: pp,
        cpa: steps_bill(&steps),
    })
}

/// n-bit × n-bit unsigned multiplier with 2n output bits.
pub fn build_binary_multiplier(n: usize, policy: Policy) -> Result<Generated, GenError> {
    check_width(n, 32)?;
    let mut b = NetlistBuilder::new();
    let (a, bb) = operand_inputs(&mut b, n, ValueRange::BINARY);
    let core = binary_core(&mut b, &a, &bb, policy)?;
    let netlist = b.finish(
        format!("binary-{policy}-{n}x{n}"),
        Interface {
            function: Function::Mul,
            radix: Radix::Binary,
            widths: [n, n],
        },
        core.outputs,
    )?;
    Ok(Generated {
        netlist,
        reduction: core.plan.bill(),
        plan: Some(core.plan),
        partial_products: core.partial_products,
        cpa: core.cpa,
        interfaces: BillOfCells::new(),
    })
}

/// n-digit × n-digit quaternary multiplier built from QMUL1 cells and
/// quaternary compressors, with 2n output digits.
pub fn build_quaternary_direct(n: usize, policy: Policy) -> Result<Generated, GenError> {
    check_width(n, 16)?;
    let mut b = NetlistBuilder::new();
    let (a, bb) = operand_inputs(&mut b, n, ValueRange::QUATERNARY);
    let cols = qmul_array(&mut b, &a, &bb)?;
    let (plan, cols) = compress_columns(&mut b, cols, Radix::Quaternary, policy)?;
    let (outputs, steps) = build_cpa(&mut b, &cols, Radix::Quaternary)?;
    let netlist = b.finish(
        format!("quat-direct-{policy}-{n}x{n}"),
        Interface {
            function: Function::Mul,
            radix: Radix::Quaternary,
            widths: [n, n],
        },
        outputs,
    )?;
    Ok(Generated {
        netlist,
        reduction: plan.bill(),
        plan: Some(plan),
        partial_products: BillOfCells::from_cells(std::iter::repeat(CellKind::Qmul1).take(n * n)),
        cpa: steps_bill(&steps),
        interfaces: BillOfCells::new(),
    })
}

/// Quaternary multiplier that decodes every input digit to two bits, runs a
/// 2n×2n binary multiplier and encodes the 4n product bits back to 2n digits.
pub fn build_quaternary_hybrid(n: usize, policy: Policy) -> Result<Generated, GenError> {
    check_width(n, 16)?;
    let mut b = NetlistBuilder::new();
    let (a, bb) = operand_inputs(&mut b, n, ValueRange::QUATERNARY);
    let decode = |b: &mut NetlistBuilder, digits: &[NetId]| -> Result<Vec<NetId>, GenError> {
        let mut bits = Vec::with_capacity(2 * digits.len());
        for &q in digits {
            let x = b.cell(CellKind::DecQ2b, &[q])?;
            bits.push(x[1]);
            bits.push(x[0]);
        }
        Ok(bits)
    };
    let abits = decode(&mut b, &a)?;
    let bbits = decode(&mut b, &bb)?;
    let core = binary_core(&mut b, &abits, &bbits, policy)?;
    let mut outputs = Vec::with_capacity(2 * n);
    for pair in core.outputs.chunks(2) {
        outputs.push(b.cell(CellKind::EncB2q, &[pair[1], pair[0]])?[0]);
    }
    let netlist = b.finish(
        format!("quat-hybrid-{policy}-{n}x{n}"),
        Interface {
            function: Function::Mul,
            radix: Radix::Quaternary,
            widths: [n, n],
        },
        outputs,
    )?;
    let interfaces = BillOfCells::from_cells(
        std::iter::repeat(CellKind::DecQ2b)
            .take(2 * n)
            .chain(std::iter::repeat(CellKind::EncB2q).take(2 * n)),
    );
    Ok(Generated {
        netlist,
        reduction: core.plan.bill(),
        plan: Some(core.plan),
        partial_products: core.partial_products,
        cpa: core.cpa,
        interfaces,
    })
}

/// n-digit quaternary ripple adder: a chain of Q331 cells, the first with a
/// constant 0 carry-in. Produces n+1 digits, the last one binary.
pub fn build_ripple_adder_quaternary(n: usize) -> Result<Generated, GenError> {
    check_width(n, 31)?;
    let mut b = NetlistBuilder::new();
    let (a, bb) = operand_inputs(&mut b, n, ValueRange::QUATERNARY);
    let mut carry = b.constant(0)?;
    let mut outputs = Vec::with_capacity(n + 1);
    for (&x, &y) in a.iter().zip(&bb) {
        let out = b.cell(CellKind::Q331, &[x, y, carry])?;
        outputs.push(out[0]);
        carry = out[1];
    }
    outputs.push(carry);
    let netlist = b.finish(
        format!("quat-ripple-adder-{n}"),
        Interface {
            function: Function::Add,
            radix: Radix::Quaternary,
            widths: [n, n],
        },
        outputs,
    )?;
    let cpa = netlist.bill_of_cells();
    Ok(Generated {
        netlist,
        plan: None,
        partial_products: BillOfCells::new(),
        reduction: BillOfCells::new(),
        cpa,
        interfaces: BillOfCells::new(),
    })
}
