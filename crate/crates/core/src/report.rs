//! The reproduction report: published tables priced from pinned bills,
//! headline ratios, and the generators' own census side by side.
//!
//! Output is byte-stable: no timestamps, fixed ordering, fixed float
//! formatting.

use serde::Serialize;
use thiserror::Error;

use crate::costing::{
    compare, published_bills, published_tables, ratio_2dp, scheme, short_scheme_name, total_cost, Architecture,
    BillOfCells, CompareError, ComparisonReport, CostError, CostScheme, BILL_BINARY_8X8, BILL_QUAT_DIRECT_ADDERS,
    BILL_QUAT_DIRECT_FULL, BILL_QUAT_HYBRID_FULL, BILL_QUAT_HYBRID_PUBLISHED, BINARY_FA16, BINARY_FA28, QUAT_MIN,
    QUAT_SUBBLOCK,
};
use crate::generators::{build_binary_multiplier, build_quaternary_direct, build_quaternary_hybrid, GenError, Policy};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Compare(#[from] CompareError),
    #[error(transparent)]
    Gen(#[from] GenError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub label: String,
    pub bill: String,
    pub costs: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub id: String,
    pub title: String,
    pub schemes: Vec<String>,
    pub rows: Vec<TableRow>,
    pub totals: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TotalRow {
    pub bill: String,
    pub scheme: String,
    pub total: u64,
    /// Set for totals that correct the published accounting.
    pub erratum: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusRow {
    pub architecture: String,
    pub scheme: String,
    pub published_bill: String,
    pub published_total: u64,
    pub generated_bill: String,
    pub generated_total: u64,
    /// Relative difference, in percent, two decimals.
    pub deviation: String,
    pub exact: bool,
    pub within_5pct: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Ratio {
    pub numerator: String,
    pub denominator: String,
    pub value: String,
    pub exact: String,
}

impl Ratio {
    pub fn line(&self) -> String {
        format!(
            "ratio({} / {}) = {} (exact {})",
            self.numerator, self.denominator, self.value, self.exact
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tables: Vec<TableReport>,
    pub totals: Vec<TotalRow>,
    pub comparison: ComparisonReport,
    pub ratios: Vec<Ratio>,
    pub census: Vec<CensusRow>,
    pub notes: Vec<String>,
}

fn schemes_for(names: &[&str]) -> Result<Vec<CostScheme>, CostError> {
    names.iter().map(|n| scheme(n)).collect()
}

fn percent(generated: u64, published: u64) -> String {
    let d = (generated as f64 - published as f64) / published as f64 * 100.0;
    format!("{d:+.2}%")
}

/// Totals of the generators' bills against the published bills.
pub fn census() -> Result<Vec<CensusRow>, ReportError> {
    let bills = published_bills();
    let binary = schemes_for(&[BINARY_FA16, BINARY_FA28])?;
    let quat = schemes_for(&[QUAT_MIN, QUAT_SUBBLOCK])?;
    let mut entries: Vec<(String, BillOfCells, &str, &[CostScheme])> = Vec::new();
    for policy in [Policy::Wallace, Policy::Dadda] {
        let g = build_binary_multiplier(8, policy)?;
        entries.push((g.netlist.name().to_string(), g.bill(), BILL_BINARY_8X8, &binary));
    }
    for policy in [Policy::Wallace, Policy::Dadda] {
        let g = build_quaternary_direct(4, policy)?;
        let name = g.netlist.name().to_string();
        entries.push((format!("{name} adders"), g.adder_bill(), BILL_QUAT_DIRECT_ADDERS, &quat));
        entries.push((name, g.bill(), BILL_QUAT_DIRECT_FULL, &quat));
    }
    let g = build_quaternary_hybrid(4, Policy::Wallace)?;
    entries.push((g.netlist.name().to_string(), g.bill(), BILL_QUAT_HYBRID_FULL, &binary));

    let mut rows = Vec::new();
    for (name, bill, published, schemes) in entries {
        let pb = &bills[published];
        for s in schemes {
            let pt = total_cost(pb, s)?;
            let gt = total_cost(&bill, s)?;
            rows.push(CensusRow {
                architecture: name.clone(),
                scheme: short_scheme_name(&s.name).to_string(),
                published_bill: format!("{published}: {pb}"),
                published_total: pt,
                generated_bill: bill.to_string(),
                generated_total: gt,
                deviation: percent(gt, pt),
                exact: bill.same_counts(pb),
                within_5pct: gt.abs_diff(pt) * 100 <= pt * 5,
            });
        }
    }
    Ok(rows)
}

fn headline_ratios() -> Result<Vec<Ratio>, ReportError> {
    let bills = published_bills();
    let cost = |bill: &str, s: &str| -> Result<u64, ReportError> { Ok(total_cost(&bills[bill], &scheme(s)?)?) };
    let pairs = [
        ("binary-fa28", BILL_BINARY_8X8, BINARY_FA28, "quat-direct-min", BILL_QUAT_DIRECT_ADDERS, QUAT_MIN),
        ("binary-fa16", BILL_BINARY_8X8, BINARY_FA16, "quat-direct-min", BILL_QUAT_DIRECT_ADDERS, QUAT_MIN),
        ("binary-fa28", BILL_BINARY_8X8, BINARY_FA28, "quat-direct-subblock", BILL_QUAT_DIRECT_ADDERS, QUAT_SUBBLOCK),
        ("hybrid-fa28", BILL_QUAT_HYBRID_PUBLISHED, BINARY_FA28, "quat-direct-min", BILL_QUAT_DIRECT_ADDERS, QUAT_MIN),
        ("hybrid-fa16", BILL_QUAT_HYBRID_PUBLISHED, BINARY_FA16, "quat-direct-min", BILL_QUAT_DIRECT_ADDERS, QUAT_MIN),
    ];
    pairs
        .iter()
        .map(|&(nl, nb, ns, dl, db, ds)| {
            let (n, d) = (cost(nb, ns)?, cost(db, ds)?);
            Ok(Ratio {
                numerator: nl.to_string(),
                denominator: dl.to_string(),
                value: ratio_2dp(n, d),
                exact: format!("{:.4}", n as f64 / d as f64),
            })
        })
        .collect()
}

/// Builds the full report.
pub fn reproduce() -> Result<Report, ReportError> {
    let mut tables = Vec::new();
    for t in published_tables() {
        let (costs, totals) = t.evaluate()?;
        tables.push(TableReport {
            id: t.id.to_string(),
            title: t.title.to_string(),
            schemes: t.schemes.iter().map(|s| short_scheme_name(s).to_string()).collect(),
            rows: t
                .rows
                .iter()
                .zip(costs)
                .map(|((label, bill), costs)| TableRow {
                    label: label.to_string(),
                    bill: bill.to_string(),
                    costs,
                })
                .collect(),
            totals,
        });
    }

    let bills = published_bills();
    let qmul1 = BillOfCells::from_pairs([("QMUL1", 1)]);
    let mut totals = Vec::new();
    let mut push_totals = |name: &str, bill: &BillOfCells, names: &[&str], erratum: bool| -> Result<(), ReportError> {
        for s in names {
            totals.push(TotalRow {
                bill: name.to_string(),
                scheme: short_scheme_name(s).to_string(),
                total: total_cost(bill, &scheme(s)?)?,
                erratum,
            });
        }
        Ok(())
    };
    let quat = [QUAT_MIN, QUAT_SUBBLOCK];
    let binary = [BINARY_FA16, BINARY_FA28];
    push_totals("qmul1", &qmul1, &quat, false)?;
    push_totals(BILL_BINARY_8X8, &bills[BILL_BINARY_8X8], &binary, false)?;
    push_totals(BILL_QUAT_HYBRID_PUBLISHED, &bills[BILL_QUAT_HYBRID_PUBLISHED], &binary, false)?;
    push_totals(BILL_QUAT_HYBRID_FULL, &bills[BILL_QUAT_HYBRID_FULL], &binary, true)?;
    push_totals(BILL_QUAT_DIRECT_ADDERS, &bills[BILL_QUAT_DIRECT_ADDERS], &quat, false)?;
    push_totals(BILL_QUAT_DIRECT_FULL, &bills[BILL_QUAT_DIRECT_FULL], &quat, true)?;

    let s16 = scheme(BINARY_FA16)?;
    let s28 = scheme(BINARY_FA28)?;
    let smin = scheme(QUAT_MIN)?;
    let ssub = scheme(QUAT_SUBBLOCK)?;
    let archs = [
        Architecture { name: BILL_BINARY_8X8, bill: &bills[BILL_BINARY_8X8], scheme: &s16 },
        Architecture { name: BILL_BINARY_8X8, bill: &bills[BILL_BINARY_8X8], scheme: &s28 },
        Architecture { name: BILL_QUAT_HYBRID_PUBLISHED, bill: &bills[BILL_QUAT_HYBRID_PUBLISHED], scheme: &s16 },
        Architecture { name: BILL_QUAT_HYBRID_PUBLISHED, bill: &bills[BILL_QUAT_HYBRID_PUBLISHED], scheme: &s28 },
        Architecture { name: BILL_QUAT_DIRECT_ADDERS, bill: &bills[BILL_QUAT_DIRECT_ADDERS], scheme: &smin },
        Architecture { name: BILL_QUAT_DIRECT_ADDERS, bill: &bills[BILL_QUAT_DIRECT_ADDERS], scheme: &ssub },
        Architecture { name: BILL_QUAT_DIRECT_FULL, bill: &bills[BILL_QUAT_DIRECT_FULL], scheme: &smin },
        Architecture { name: BILL_QUAT_DIRECT_FULL, bill: &bills[BILL_QUAT_DIRECT_FULL], scheme: &ssub },
    ];
    let mut comparison = compare(&archs)?;
    comparison.ratios.clear();

    let census = census()?;
    let notes = notes(&census);
    Ok(Report {
        tables,
        totals,
        comparison,
        ratios: headline_ratios()?,
        census,
        notes,
    })
}

fn notes(census: &[CensusRow]) -> Vec<String> {
    let mut notes = vec![
        "QMUL1: the published truth table lists a+b instead of a*b in the rows with A=1 \
         ((1,1)->2,0; (1,2)->3,0; (1,3)->0,1). The cell computes qm = a*b mod 4, qc = a*b div 4."
            .to_string(),
        "quat-hybrid-published charges 4 digit interfaces (140 T under fa16). A 4x4 multiplier has \
         8 input digits to decode and 8 output digits to encode; quat-hybrid-full charges all 16 cells (280 T)."
            .to_string(),
        "quat-direct-adders counts the adders only. quat-direct-full adds the 16 QMUL1 cells (864 T min, \
         1216 T subblock)."
            .to_string(),
        "Ratios are truncated to two decimals.".to_string(),
    ];
    let headline = |r: &&CensusRow| {
        r.architecture.contains("wallace")
            && (r.published_bill.starts_with(BILL_BINARY_8X8) || r.published_bill.starts_with(BILL_QUAT_DIRECT_ADDERS))
            && (r.scheme == "fa16" || r.scheme == "min")
    };
    for r in census.iter().filter(headline).filter(|r| !r.exact) {
        notes.push(format!(
            "census: {} generates {} where {} is published.",
            r.architecture, r.generated_bill, r.published_bill
        ));
    }
    notes
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Markdown => self.to_markdown(),
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn totals_lines(&self) -> String {
        let mut s = String::from("bill, scheme, total, flag\n");
        for t in &self.totals {
            let flag = if t.erratum { "erratum" } else { "-" };
            s.push_str(&format!("{}, {}, {}, {flag}\n", t.bill, t.scheme, t.total));
        }
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from("# Multiplier transistor counts\n");
        for t in &self.tables {
            s.push_str(&format!("\n## {} (`{}`)\n\n", t.title, t.id));
            s.push_str(&format!("| row | cells | {} |\n", t.schemes.join(" | ")));
            s.push_str(&format!("|---|---|{}\n", "---:|".repeat(t.schemes.len())));
            for r in &t.rows {
                let costs: Vec<String> = r.costs.iter().map(u64::to_string).collect();
                s.push_str(&format!("| {} | {} | {} |\n", r.label, r.bill, costs.join(" | ")));
            }
            let totals: Vec<String> = t.totals.iter().map(|v| format!("**{v}**")).collect();
            s.push_str(&format!("| total | | {} |\n", totals.join(" | ")));
        }
        s.push_str("\n## Totals\n\n```\n");
        s.push_str(&self.totals_lines());
        s.push_str("```\n\n## Comparison\n\n");
        s.push_str(&self.comparison.to_markdown());
        s.push_str("\n## Ratios\n\n");
        for r in &self.ratios {
            s.push_str(&format!("- {}\n", r.line()));
        }
        s.push_str("\n## Generator census\n\n");
        s.push_str("| architecture | scheme | published | total | generated | total | deviation |\n");
        s.push_str("|---|---|---|---:|---|---:|---:|\n");
        for c in &self.census {
            s.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} | {} |\n",
                c.architecture,
                c.scheme,
                c.published_bill,
                c.published_total,
                c.generated_bill,
                c.generated_total,
                c.deviation
            ));
        }
        s.push_str("\n## Notes\n\n");
        for n in &self.notes {
            s.push_str(&format!("- {n}\n"));
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.totals_lines();
        s.push('\n');
        s.push_str(&self.comparison.to_csv());
        s.push_str("\nnumerator,denominator,ratio,exact\n");
        for r in &self.ratios {
            s.push_str(&format!("{},{},{},{}\n", r.numerator, r.denominator, r.value, r.exact));
        }
        s.push_str("\narchitecture,scheme,published_total,generated_total,deviation,generated_cells\n");
        for c in &self.census {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.architecture, c.scheme, c.published_total, c.generated_total, c.deviation, c.generated_bill
            ));
        }
        s.push('\n');
        for r in &self.ratios {
            s.push_str(&r.line());
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
