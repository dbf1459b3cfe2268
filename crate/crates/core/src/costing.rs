//! Transistor-count schemes, bills of cells and comparison reports.
//!
//! A scheme maps names to costs. A name is either a leaf with a fixed count
//! or a composite whose cost is the cost of a sub-bill under the same scheme;
//! the quaternary one-digit multiplier is priced that way from its inverter,
//! subcircuit and multiplexer parts.

use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::cells::CellKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CostError {
    #[error("scheme `{scheme}` has no cost for `{name}`")]
    Uncosted { scheme: String, name: String },
    #[error("scheme `{scheme}`: composite `{name}` refers back to itself")]
    Recursive { scheme: String, name: String },
    #[error("unknown cost scheme `{0}`")]
    UnknownScheme(String),
}

/// Multiset of cell names, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct BillOfCells(IndexMap<String, u64>);

impl BillOfCells {
    pub fn new() -> Self {
        Self::default()
    }

    /// Counts cells; entries follow the library's canonical order.
    pub fn from_cells(cells: impl IntoIterator<Item = CellKind>) -> Self {
        let mut counts = [0u64; CellKind::ALL.len()];
        for c in cells {
            counts[c as usize] += 1;
        }
        let mut bill = BillOfCells::new();
        for (cell, n) in CellKind::ALL.iter().zip(counts) {
            if n > 0 {
                bill.add(cell.name(), n);
            }
        }
        bill
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, u64)>) -> Self {
        let mut bill = BillOfCells::new();
        for (name, n) in pairs {
            bill.add(name, n);
        }
        bill
    }

    /// Adds `count` of `name`. Zero counts are not recorded.
    pub fn add(&mut self, name: &str, count: u64) {
        if count == 0 {
            return;
        }
        *self.0.entry(name.to_string()).or_insert(0) += count;
    }

    /// Multiset union.
    pub fn merge(&mut self, other: &BillOfCells) {
        for (name, &n) in &other.0 {
            self.add(name, n);
        }
    }

    pub fn merged(mut self, other: &BillOfCells) -> Self {
        self.merge(other);
        self
    }

    pub fn get(&self, name: &str) -> u64 {
        self.0.get(name).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Same multiset regardless of order.
    pub fn same_counts(&self, other: &BillOfCells) -> bool {
        self.0.len() == other.0.len() && self.iter().all(|(k, v)| other.get(k) == v)
    }
}

impl fmt::Display for BillOfCells {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, n) in self.iter() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{name}:{n}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CostEntry {
    Leaf(u64),
    Composite(BillOfCells),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostScheme {
    pub name: String,
    entries: IndexMap<String, CostEntry>,
}

impl CostScheme {
    pub fn new(name: impl Into<String>) -> Self {
        CostScheme {
            name: name.into(),
            entries: IndexMap::new(),
        }
    }

    pub fn leaf(mut self, name: &str, transistors: u64) -> Self {
        self.entries.insert(name.to_string(), CostEntry::Leaf(transistors));
        self
    }

    pub fn composite(mut self, name: &str, parts: BillOfCells) -> Self {
        self.entries.insert(name.to_string(), CostEntry::Composite(parts));
        self
    }

    pub fn entry(&self, name: &str) -> Option<&CostEntry> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Transistors for one `name`, expanding composites.
    pub fn unit_cost(&self, name: &str) -> Result<u64, CostError> {
        self.unit_cost_guarded(name, &mut Vec::new())
    }

    fn unit_cost_guarded<'a>(&'a self, name: &'a str, stack: &mut Vec<&'a str>) -> Result<u64, CostError> {
        if stack.contains(&name) {
            return Err(CostError::Recursive {
                scheme: self.name.clone(),
                name: name.to_string(),
            });
        }
        match self.entries.get_key_value(name) {
            None => Err(CostError::Uncosted {
                scheme: self.name.clone(),
                name: name.to_string(),
            }),
            Some((_, CostEntry::Leaf(t))) => Ok(*t),
            Some((key, CostEntry::Composite(parts))) => {
                stack.push(key.as_str());
                let mut total = 0;
                for (part, n) in parts.iter() {
                    total += n * self.unit_cost_guarded(part, stack)?;
                }
                stack.pop();
                Ok(total)
            }
        }
    }
}

/// Scheme names as used on the command line and in reports.
pub const BINARY_FA16: &str = "binary-fa16";
pub const BINARY_FA28: &str = "binary-fa28";
pub const QUAT_MIN: &str = "quat-min";
pub const QUAT_SUBBLOCK: &str = "quat-subblock";

// Parts of the one-digit quaternary multiplier.
pub const QMUL1_A_INVERTERS: &str = "QMUL1.A_INV";
pub const QMUL1_B_INVERTERS: &str = "QMUL1.B_INV";
pub const QMUL1_PRODUCT_SUBCIRCUITS: &str = "QMUL1.SUB_0202_0321";
pub const QMUL1_CARRY_SUBCIRCUITS: &str = "QMUL1.SUB_0011_0012";
pub const QMUL1_MUX4: &str = "QMUL1.MUX4";

fn binary_scheme(name: &str, fa: u64, ha: u64) -> CostScheme {
    CostScheme::new(name)
        .leaf("AND2", 6)
        .leaf("FA", fa)
        .leaf("HA", ha)
        .leaf("XOR2", 9)
        .leaf("DEC_Q2B", 21)
        .leaf("ENC_B2Q", 14)
}

pub fn qmul1_parts() -> BillOfCells {
    BillOfCells::from_pairs([
        (QMUL1_A_INVERTERS, 1),
        (QMUL1_B_INVERTERS, 1),
        (QMUL1_PRODUCT_SUBCIRCUITS, 1),
        (QMUL1_CARRY_SUBCIRCUITS, 1),
        (QMUL1_MUX4, 1),
    ])
}

/// `inv` = (A-side inverters, B-side inverters); adders = (Q331, Q332, QH32, QH31).
fn quaternary_scheme(name: &str, inv: (u64, u64), adders: [u64; 4]) -> CostScheme {
    CostScheme::new(name)
        .leaf(QMUL1_A_INVERTERS, inv.0)
        .leaf(QMUL1_B_INVERTERS, inv.1)
        .leaf(QMUL1_PRODUCT_SUBCIRCUITS, 10)
        .leaf(QMUL1_CARRY_SUBCIRCUITS, 10)
        .leaf(QMUL1_MUX4, 12)
        .composite("QMUL1", qmul1_parts())
        .leaf("Q331", adders[0])
        .leaf("Q332", adders[1])
        .leaf("QH32", adders[2])
        .leaf("QH31", adders[3])
}

/// The four pinned schemes.
pub fn schemes() -> Vec<CostScheme> {
    vec![
        binary_scheme(BINARY_FA16, 16, 16),
        binary_scheme(BINARY_FA28, 28, 12),
        // shared decode inverters: the lower bound
        quaternary_scheme(QUAT_MIN, (12, 10), [100, 154, 50, 26]),
        // inverters duplicated per subblock
        quaternary_scheme(QUAT_SUBBLOCK, (24, 20), [118, 184, 54, 30]),
    ]
}

pub fn scheme(name: &str) -> Result<CostScheme, CostError> {
    schemes()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| CostError::UnknownScheme(name.to_string()))
}

/// Short column label used in the published tables.
pub fn short_scheme_name(name: &str) -> &str {
    match name {
        BINARY_FA16 => "fa16",
        BINARY_FA28 => "fa28",
        QUAT_MIN => "min",
        QUAT_SUBBLOCK => "subblock",
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineItem {
    pub name: String,
    pub count: u64,
    pub unit: u64,
    pub subtotal: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CostBreakdown {
    pub total: u64,
    pub lines: Vec<LineItem>,
}

/// Prices every entry of `bill`, preserving bill order.
pub fn cost_of_bill(bill: &BillOfCells, scheme: &CostScheme) -> Result<CostBreakdown, CostError> {
    let mut lines = Vec::with_capacity(bill.len());
    let mut total = 0;
    for (name, count) in bill.iter() {
        let unit = scheme.unit_cost(name)?;
        total += unit * count;
        lines.push(LineItem {
            name: name.to_string(),
            count,
            unit,
            subtotal: unit * count,
        });
    }
    Ok(CostBreakdown { total, lines })
}

pub fn total_cost(bill: &BillOfCells, scheme: &CostScheme) -> Result<u64, CostError> {
    cost_of_bill(bill, scheme).map(|b| b.total)
}

// ---------------------------------------------------------------------------
// Published bills

pub const BILL_BINARY_8X8: &str = "binary-8x8";
pub const BILL_QUAT_DIRECT_ADDERS: &str = "quat-direct-adders";
pub const BILL_QUAT_DIRECT_FULL: &str = "quat-direct-full";
pub const BILL_QUAT_HYBRID_PUBLISHED: &str = "quat-hybrid-published";
pub const BILL_QUAT_HYBRID_FULL: &str = "quat-hybrid-full";

pub fn binary_8x8_reduction() -> BillOfCells {
    BillOfCells::from_pairs([("FA", 38), ("HA", 15)])
}

pub fn binary_8x8_cpa() -> BillOfCells {
    BillOfCells::from_pairs([("FA", 9), ("HA", 1)])
}

pub fn quat_4x4_adders() -> BillOfCells {
    BillOfCells::from_pairs([("Q331", 13), ("Q332", 9), ("QH32", 3), ("QH31", 2)])
}

fn interfaces(digits: u64) -> BillOfCells {
    BillOfCells::from_pairs([("DEC_Q2B", digits), ("ENC_B2Q", digits)])
}

/// The bills exactly as the published tables charge them.
pub fn published_bills() -> IndexMap<&'static str, BillOfCells> {
    let binary = BillOfCells::from_pairs([("AND2", 64)])
        .merged(&binary_8x8_reduction())
        .merged(&binary_8x8_cpa());
    let adders = quat_4x4_adders();
    let full = BillOfCells::from_pairs([("QMUL1", 16)]).merged(&adders);
    let mut out = IndexMap::new();
    out.insert(BILL_BINARY_8X8, binary.clone());
    out.insert(BILL_QUAT_DIRECT_ADDERS, adders);
    out.insert(BILL_QUAT_DIRECT_FULL, full);
    // four digit interfaces, as charged in the hybrid table
    out.insert(BILL_QUAT_HYBRID_PUBLISHED, interfaces(4).merged(&binary));
    // one decoder per input digit, one encoder per output digit
    out.insert(BILL_QUAT_HYBRID_FULL, interfaces(8).merged(&binary));
    out
}

/// A published table as rows of sub-bills, priced under one or more schemes.
#[derive(Debug, Clone)]
pub struct PublishedTable {
    pub id: &'static str,
    pub title: &'static str,
    pub schemes: Vec<&'static str>,
    pub rows: Vec<(&'static str, BillOfCells)>,
}

impl PublishedTable {
    /// Per-row costs followed by the column totals, one column per scheme.
    pub fn evaluate(&self) -> Result<(Vec<Vec<u64>>, Vec<u64>), CostError> {
        let schemes: Vec<CostScheme> = self
            .schemes
            .iter()
            .map(|s| scheme(s))
            .collect::<Result<_, _>>()?;
        let mut totals = vec![0; schemes.len()];
        let mut rows = Vec::with_capacity(self.rows.len());
        for (_, bill) in &self.rows {
            let mut row = Vec::with_capacity(schemes.len());
            for (k, s) in schemes.iter().enumerate() {
                let c = total_cost(bill, s)?;
                totals[k] += c;
                row.push(c);
            }
            rows.push(row);
        }
        Ok((rows, totals))
    }
}

pub fn published_tables() -> Vec<PublishedTable> {
    let one = |name: &'static str| BillOfCells::from_pairs([(name, 1)]);
    vec![
        PublishedTable {
            id: "qmul1",
            title: "Quaternary 1-digit multiplier transistor count",
            schemes: vec![QUAT_MIN, QUAT_SUBBLOCK],
            rows: vec![
                ("A inverters (NQI, NQI/, IQI, PQI, PQI/)", one(QMUL1_A_INVERTERS)),
                ("B inverters (NQI, NQI/, IQI, PQI, PQI/)", one(QMUL1_B_INVERTERS)),
                ("0202, 0321", one(QMUL1_PRODUCT_SUBCIRCUITS)),
                ("0011, 0012", one(QMUL1_CARRY_SUBCIRCUITS)),
                ("MUX4", one(QMUL1_MUX4)),
            ],
        },
        PublishedTable {
            id: "binary-8x8",
            title: "8 x 8 bit multiplier transistor count",
            schemes: vec![BINARY_FA16, BINARY_FA28],
            rows: vec![
                ("1-bit multiplier", BillOfCells::from_pairs([("AND2", 64)])),
                ("Wallace FAs", BillOfCells::from_pairs([("FA", 38)])),
                ("Wallace HAs", BillOfCells::from_pairs([("HA", 15)])),
                ("Final CPAs", binary_8x8_cpa()),
            ],
        },
        PublishedTable {
            id: "quat-hybrid",
            title: "Quaternary 4x4 multiplier with binary interfaces",
            schemes: vec![BINARY_FA16, BINARY_FA28],
            rows: vec![
                ("Interface (4 digits)", interfaces(4)),
                ("8x8 bit multiplier", published_bills()[BILL_BINARY_8X8].clone()),
            ],
        },
        PublishedTable {
            id: "quat-adders",
            title: "Quaternary adders transistor count",
            schemes: vec![QUAT_MIN, QUAT_SUBBLOCK],
            rows: vec![
                ("Q331", one("Q331")),
                ("Q332", one("Q332")),
                ("QH32", one("QH32")),
                ("QH31", one("QH31")),
            ],
        },
        PublishedTable {
            id: "quat-direct",
            title: "Direct 4x4 quaternary multiplier transistor count (adders)",
            schemes: vec![QUAT_MIN, QUAT_SUBBLOCK],
            rows: vec![
                ("Q331 x13", BillOfCells::from_pairs([("Q331", 13)])),
                ("Q332 x9", BillOfCells::from_pairs([("Q332", 9)])),
                ("QH32 x3", BillOfCells::from_pairs([("QH32", 3)])),
                ("QH31 x2", BillOfCells::from_pairs([("QH31", 2)])),
            ],
        },
    ]
}

// ---------------------------------------------------------------------------
// Comparison

/// Truncates to two decimals. The published comparison figure (1892/2888
/// printed as 0.65) is a truncation, not a round-to-nearest.
pub fn ratio_2dp(numerator: u64, denominator: u64) -> String {
    if denominator == 0 {
        return "inf".to_string();
    }
    let hundredths = numerator * 100 / denominator;
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub architecture: String,
    pub scheme: String,
    pub bill: BillOfCells,
    pub total: u64,
    pub ratio_to_baseline: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairRatio {
    pub numerator: String,
    pub denominator: String,
    pub value: String,
    pub exact: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub ratios: Vec<PairRatio>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Architecture<'a> {
    pub name: &'a str,
    pub bill: &'a BillOfCells,
    pub scheme: &'a CostScheme,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error("comparison needs at least two architectures, got {0}")]
    TooFew(usize),
    #[error(transparent)]
    Cost(#[from] CostError),
}

/// Prices each architecture; the first one is the baseline. Pairwise ratios
/// are `earlier / later`.
pub fn compare(archs: &[Architecture<'_>]) -> Result<ComparisonReport, CompareError> {
    if archs.len() < 2 {
        return Err(CompareError::TooFew(archs.len()));
    }
    let totals: Vec<u64> = archs
        .iter()
        .map(|a| total_cost(a.bill, a.scheme))
        .collect::<Result<_, _>>()?;
    let rows = archs
        .iter()
        .zip(&totals)
        .map(|(a, &t)| ComparisonRow {
            architecture: a.name.to_string(),
            scheme: a.scheme.name.clone(),
            bill: a.bill.clone(),
            total: t,
            ratio_to_baseline: ratio_2dp(t, totals[0]),
        })
        .collect();
    let mut ratios = Vec::new();
    for i in 0..archs.len() {
        for j in i + 1..archs.len() {
            ratios.push(PairRatio {
                numerator: label(&archs[i]),
                denominator: label(&archs[j]),
                value: ratio_2dp(totals[i], totals[j]),
                exact: totals[i] as f64 / totals[j] as f64,
            });
        }
    }
    Ok(ComparisonReport {
        rows,
        ratios,
        notes: Vec::new(),
    })
}

fn label(a: &Architecture<'_>) -> String {
    format!("{}@{}", a.name, a.scheme.name)
}

impl ComparisonReport {
    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        s.push_str("| architecture | scheme | cells | total | ratio to baseline |\n");
        s.push_str("|---|---|---|---:|---:|\n");
        for r in &self.rows {
            s.push_str(&format!(
                "| {} | {} | {} | {} | {} |\n",
                r.architecture, r.scheme, r.bill, r.total, r.ratio_to_baseline
            ));
        }
        if !self.ratios.is_empty() {
            s.push('\n');
            for p in &self.ratios {
                s.push_str(&format!(
                    "- ratio({} / {}) = {} (exact {:.4})\n",
                    p.numerator, p.denominator, p.value, p.exact
                ));
            }
        }
        for n in &self.notes {
            s.push_str(&format!("\n> {n}\n"));
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("architecture,scheme,cells,total,ratio_to_baseline\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.architecture, r.scheme, r.bill, r.total, r.ratio_to_baseline
            ));
        }
        s
    }
}
