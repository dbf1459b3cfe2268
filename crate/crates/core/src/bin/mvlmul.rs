use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use mvlmul::cells::{truth_table_csv, CellKind};
use mvlmul::costing::{self, cost_of_bill, short_scheme_name, CostScheme};
use mvlmul::generators::{self, Generated, Policy};
use mvlmul::netlist::{Netlist, NetlistError};
use mvlmul::report::{self, Format};
use mvlmul::value::Radix;
use mvlmul::verify::{exhaustive_verify, sampled_verify, VerifyError, DEFAULT_CAP};

#[derive(Parser)]
#[command(name = "mvlmul", version, about = "Build, verify and cost binary and quaternary multipliers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Arch {
    BinaryWallace,
    BinaryDadda,
    QuatDirect,
    QuatHybrid,
    QuatRippleAdder,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Wallace,
    Dadda,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Md,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a netlist, write it as JSON and print its bill of cells.
    Build {
        #[arg(long, value_enum)]
        arch: Arch,
        /// Operand width in bits (binary) or digits (quaternary).
        #[arg(long)]
        width: usize,
        /// Reduction policy; binary-dadda implies dadda.
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
        /// Cost scheme(s) to price the bill with; defaults to both schemes of the radix.
        #[arg(long)]
        scheme: Vec<String>,
        /// Output file; defaults to <netlist name>.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also print the stage-by-stage reduction plan.
        #[arg(long)]
        plan: bool,
    },
    /// Check a netlist file against integer arithmetic.
    Verify {
        file: PathBuf,
        /// Sample this many random operand pairs instead of enumerating.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest input space enumerated exhaustively.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: VerifyFormat,
    },
    /// Emit the transistor-count tables and comparison.
    Report {
        #[arg(long)]
        reproduce_paper: bool,
        #[arg(long, value_enum, default_value = "md")]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a cell's truth table as CSV.
    TruthTable { cell: String },
}

/// Trials drawn when the space exceeds the cap and no count was given.
const DEFAULT_TRIALS: u64 = 100_000;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Build {
            arch,
            width,
            policy,
            scheme,
            out,
            plan,
        } => build(arch, width, policy, &scheme, out, plan),
        Command::Verify {
            file,
            trials,
            seed,
            cap,
            format,
        } => verify(file, trials, seed, cap, format),
        Command::Report {
            reproduce_paper,
            format,
            out,
        } => {
            if !reproduce_paper {
                bail!("nothing to report; pass --reproduce-paper");
            }
            let format = match format {
                ReportFormat::Md => Format::Markdown,
                ReportFormat::Csv => Format::Csv,
                ReportFormat::Json => Format::Json,
            };
            let text = report::reproduce()?.render(format);
            match out {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::TruthTable { cell } => {
            let kind: CellKind = cell.parse()?;
            print!("{}", truth_table_csv(kind));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn resolve_scheme(name: &str, radix: Radix) -> Result<CostScheme> {
    let full = costing::schemes()
        .into_iter()
        .find(|s| s.name == name || short_scheme_name(&s.name) == name)
        .ok_or_else(|| anyhow!("unknown scheme '{name}'"))?;
    let binary = full.name.starts_with("binary");
    if binary != (radix == Radix::Binary) {
        bail!("scheme '{}' does not price radix-{} cells", full.name, radix.base());
    }
    Ok(full)
}

fn build(
    arch: Arch,
    width: usize,
    policy: Option<PolicyArg>,
    schemes: &[String],
    out: Option<PathBuf>,
    show_plan: bool,
) -> Result<ExitCode> {
    let policy = match (arch, policy) {
        (Arch::BinaryDadda, Some(PolicyArg::Wallace)) => bail!("binary-dadda cannot use the wallace policy"),
        (Arch::BinaryDadda, _) | (_, Some(PolicyArg::Dadda)) => Policy::Dadda,
        _ => Policy::Wallace,
    };
    let g: Generated = match arch {
        Arch::BinaryWallace | Arch::BinaryDadda => generators::build_binary_multiplier(width, policy)?,
        Arch::QuatDirect => generators::build_quaternary_direct(width, policy)?,
        Arch::QuatHybrid => generators::build_quaternary_hybrid(width, policy)?,
        Arch::QuatRippleAdder => generators::build_ripple_adder_quaternary(width)?,
    };
    // the hybrid is priced with the binary schemes
    let pricing_radix = match arch {
        Arch::QuatDirect | Arch::QuatRippleAdder => Radix::Quaternary,
        _ => Radix::Binary,
    };
    let names: Vec<String> = if schemes.is_empty() {
        match pricing_radix {
            Radix::Binary => vec![costing::BINARY_FA16.into(), costing::BINARY_FA28.into()],
            Radix::Quaternary => vec![costing::QUAT_MIN.into(), costing::QUAT_SUBBLOCK.into()],
        }
    } else {
        schemes.to_vec()
    };
    let schemes: Vec<CostScheme> = names
        .iter()
        .map(|n| resolve_scheme(n, pricing_radix))
        .collect::<Result<_>>()?;

    let path = out.unwrap_or_else(|| PathBuf::from(format!("{}.json", g.netlist.name())));
    fs::write(&path, g.netlist.to_json()).with_context(|| format!("writing {}", path.display()))?;

    println!("netlist: {}", g.netlist.name());
    println!("file: {}", path.display());
    println!("bill: {}", g.bill());
    for (label, part) in [
        ("partial products", &g.partial_products),
        ("reduction", &g.reduction),
        ("cpa", &g.cpa),
        ("interfaces", &g.interfaces),
    ] {
        if !part.is_empty() {
            println!("  {label}: {part}");
        }
    }
    if let Some(plan) = &g.plan {
        println!("stages: {}", plan.num_stages());
    }
    for s in &schemes {
        let c = cost_of_bill(&g.bill(), s)?;
        println!("cost[{}]: {} T", s.name, c.total);
    }
    if show_plan {
        if let Some(plan) = &g.plan {
            print!("{}", plan.to_text());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(file: PathBuf, trials: Option<u64>, seed: u64, cap: u64, format: VerifyFormat) -> Result<ExitCode> {
    let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
    let netlist = match Netlist::from_json(&text) {
        Ok(n) => n,
        // a structurally broken circuit fails verification rather than usage
        Err(NetlistError::Invalid(violations)) => {
            println!("FAIL {}: {} structural violations", file.display(), violations.len());
            for v in violations {
                eprintln!("  {v}");
            }
            return Ok(ExitCode::from(1));
        }
        Err(e) => return Err(anyhow!(e).context(format!("loading {}", file.display()))),
    };
    let function = netlist.interface().function;
    let oracle = move |a: u64, b: u64| function.apply(a, b);
    let result = match trials {
        Some(t) => sampled_verify(&netlist, oracle, t, seed)?,
        None => match exhaustive_verify(&netlist, oracle, cap) {
            Err(VerifyError::CapExceeded { space, cap }) => {
                eprintln!("input space {space} exceeds cap {cap}; sampling {DEFAULT_TRIALS} pairs with seed {seed}");
                sampled_verify(&netlist, oracle, DEFAULT_TRIALS, seed)?
            }
            other => other?,
        },
    };
    let audit = result.range_audit(&netlist);
    match format {
        VerifyFormat::Json => {
            let body = serde_json::json!({ "result": result, "range_audit": audit });
            println!("{}", serde_json::to_string_pretty(&body)?);
        }
        VerifyFormat::Text => {
            let summary = result.to_text();
            let mut lines = summary.lines();
            if let Some(first) = lines.next() {
                println!("{first}");
            }
            println!(
                "range audit: {} violations, {} over-provisioned nets",
                audit.violations.len(),
                audit.over_provisioned.len()
            );
            for l in lines {
                eprintln!("{l}");
            }
        }
    }
    if result.passed() && audit.violations.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
