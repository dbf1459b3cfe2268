//! Oracle-based functional verification.
//!
//! Both operands are enumerated (or sampled) as integers, split into digits
//! for the netlist, and the output digits are compared with the integer
//! oracle. Exhaustive runs are sharded over the first operand with rayon;
//! shard results merge associatively.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::netlist::{NetId, Netlist};
use crate::value::{digits_value, write_digits};

/// Default ceiling on exhaustive input-space size.
pub const DEFAULT_CAP: u64 = 1 << 24;

/// Counterexamples kept per run.
pub const MAX_FAILURES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("input space of {space} cases exceeds the cap of {cap}; use sampled verification (--trials N --seed S)")]
    CapExceeded { space: u128, cap: u64 },
    #[error("operand of {width} digits does not fit in 64 bits")]
    OperandTooWide { width: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub a: u64,
    pub b: u64,
    pub expected: u64,
    /// Output digits, least-significant first. Empty when evaluation failed.
    pub got: Vec<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationResult {
    pub netlist: String,
    pub mode: Mode,
    pub cases: u64,
    pub failure_count: u64,
    /// First failures in input order, at most [`MAX_FAILURES`].
    pub failures: Vec<Failure>,
    /// Largest value seen on each net, indexed by net id.
    pub net_max: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RangeFinding {
    pub net: NetId,
    pub declared: u8,
    pub observed: u8,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RangeAudit {
    /// Observed above declared. Always a bug.
    pub violations: Vec<RangeFinding>,
    /// Declared above observed. Reported, not a failure.
    pub over_provisioned: Vec<RangeFinding>,
}

impl VerificationResult {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn range_audit(&self, netlist: &Netlist) -> RangeAudit {
        let mut audit = RangeAudit::default();
        for (net, &observed) in netlist.nets().iter().zip(&self.net_max) {
            let declared = net.range.max_value();
            let finding = RangeFinding {
                net: net.id,
                declared,
                observed,
            };
            if observed > declared {
                audit.violations.push(finding);
            } else if observed < declared {
                audit.over_provisioned.push(finding);
            }
        }
        audit
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    pub fn to_text(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let mode = match self.mode {
            Mode::Exhaustive => "exhaustive".to_string(),
            Mode::Sampled { trials, seed } => format!("sampled, {trials} trials, seed {seed}"),
        };
        let mut s = format!(
            "{verdict} {}: {}/{} cases ({mode})\n",
            self.netlist,
            self.cases - self.failure_count,
            self.cases
        );
        for f in &self.failures {
            match &f.error {
                Some(e) => s.push_str(&format!("  a={} b={} expected={} error: {e}\n", f.a, f.b, f.expected)),
                None => s.push_str(&format!(
                    "  a={} b={} expected={} got digits {:?}\n",
                    f.a, f.b, f.expected, f.got
                )),
            }
        }
        if self.failure_count as usize > self.failures.len() {
            s.push_str(&format!(
                "  ... {} more\n",
                self.failure_count as usize - self.failures.len()
            ));
        }
        s
    }

    fn empty(netlist: &Netlist, mode: Mode) -> Self {
        VerificationResult {
            netlist: netlist.name().to_string(),
            mode,
            cases: 0,
            failure_count: 0,
            failures: Vec::new(),
            net_max: vec![0; netlist.nets().len()],
        }
    }

    fn merge(mut self, other: VerificationResult) -> Self {
        self.cases += other.cases;
        self.failure_count += other.failure_count;
        self.failures.extend(other.failures);
        self.failures.sort_by_key(|f| (f.a, f.b));
        self.failures.truncate(MAX_FAILURES);
        for (m, o) in self.net_max.iter_mut().zip(other.net_max) {
            *m = (*m).max(o);
        }
        self
    }
}

/// Per-thread evaluation context.
struct Checker<'a, F> {
    netlist: &'a Netlist,
    oracle: &'a F,
    state: Vec<u8>,
    digits: Vec<u8>,
    got: Vec<u8>,
    result: VerificationResult,
}

impl<'a, F: Fn(u64, u64) -> u64> Checker<'a, F> {
    fn new(netlist: &'a Netlist, oracle: &'a F, mode: Mode) -> Self {
        Checker {
            netlist,
            oracle,
            state: netlist.new_state(),
            digits: vec![0; netlist.inputs().len()],
            got: Vec::with_capacity(netlist.outputs().len()),
            result: VerificationResult::empty(netlist, mode),
        }
    }

    fn check(&mut self, a: u64, b: u64) {
        let iface = self.netlist.interface();
        let (da, db) = self.digits.split_at_mut(iface.widths[0]);
        write_digits(a, iface.radix, da).expect("operand a within its width");
        write_digits(b, iface.radix, db).expect("operand b within its width");
        let expected = (self.oracle)(a, b);
        self.result.cases += 1;
        match self.netlist.evaluate_into(&self.digits, &mut self.state) {
            Ok(()) => {
                for (m, &v) in self.result.net_max.iter_mut().zip(&self.state) {
                    *m = (*m).max(v);
                }
                self.got.clear();
                self.got.extend(self.netlist.read_outputs(&self.state));
                let fits = iface
                    .radix
                    .capacity(self.got.len())
                    .map_or(true, |cap| expected < cap);
                if !fits || digits_value(&self.got, iface.radix) != expected {
                    self.fail(a, b, expected, None);
                }
            }
            Err(e) => self.fail(a, b, expected, Some(e.to_string())),
        }
    }

    fn fail(&mut self, a: u64, b: u64, expected: u64, error: Option<String>) {
        self.result.failure_count += 1;
        if self.result.failures.len() < MAX_FAILURES {
            let got = if error.is_some() { Vec::new() } else { self.got.clone() };
            self.result.failures.push(Failure {
                a,
                b,
                expected,
                got,
                error,
            });
        }
    }
}

fn operand_spaces(netlist: &Netlist) -> Result<(u64, u64), VerifyError> {
    let iface = netlist.interface();
    let space = |w: usize| {
        iface
            .radix
            .capacity(w)
            .ok_or(VerifyError::OperandTooWide { width: w })
    };
    Ok((space(iface.widths[0])?, space(iface.widths[1])?))
}

/// Runs every operand pair. Refuses when the space exceeds `cap`.
pub fn exhaustive_verify<F>(netlist: &Netlist, oracle: F, cap: u64) -> Result<VerificationResult, VerifyError>
where
    F: Fn(u64, u64) -> u64 + Sync,
{
    let (sa, sb) = operand_spaces(netlist)?;
    let space = u128::from(sa) * u128::from(sb);
    if space > u128::from(cap) {
        return Err(VerifyError::CapExceeded { space, cap });
    }
    let oracle = &oracle;
    let result = (0..sa)
        .into_par_iter()
        .fold(
            || Checker::new(netlist, oracle, Mode::Exhaustive),
            |mut chk, a| {
                for b in 0..sb {
                    chk.check(a, b);
                }
                chk
            },
        )
        .map(|chk| chk.result)
        .reduce(
            || VerificationResult::empty(netlist, Mode::Exhaustive),
            VerificationResult::merge,
        );
    Ok(result)
}

/// Uniform independent draws of both operands from a seeded generator.
pub fn sampled_verify<F>(netlist: &Netlist, oracle: F, trials: u64, seed: u64) -> Result<VerificationResult, VerifyError>
where
    F: Fn(u64, u64) -> u64,
{
    let (sa, sb) = operand_spaces(netlist)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chk = Checker::new(netlist, &oracle, Mode::Sampled { trials, seed });
    for _ in 0..trials {
        let a = rng.gen_range(0..sa);
        let b = rng.gen_range(0..sb);
        chk.check(a, b);
    }
    Ok(chk.result)
}

/// Exhaustive when the space fits under `cap`, otherwise sampled.
pub fn verify_auto<F>(
    netlist: &Netlist,
    oracle: F,
    cap: u64,
    trials: u64,
    seed: u64,
) -> Result<VerificationResult, VerifyError>
where
    F: Fn(u64, u64) -> u64 + Sync,
{
    match exhaustive_verify(netlist, &oracle, cap) {
        Err(VerifyError::CapExceeded { .. }) => sampled_verify(netlist, &oracle, trials, seed),
        other => other,
    }
}
