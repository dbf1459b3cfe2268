//! Acceptance suite. Runs every criterion and prints one PASS/FAIL line per
//! criterion; exits non-zero if any fails.

use std::time::Instant;

use mvlmul::cells::{enumerate_truth_table, qmul1, CellKind};
use mvlmul::costing::{
    published_bills, scheme, schemes, total_cost, BillOfCells, BINARY_FA16, BINARY_FA28, QUAT_MIN, QUAT_SUBBLOCK,
};
use mvlmul::generators::{
    build_binary_multiplier, build_quaternary_direct, build_quaternary_hybrid, build_ripple_adder_quaternary,
    Generated, Policy,
};
use mvlmul::netlist::Netlist;
use mvlmul::report::{self, Format};
use mvlmul::value::write_digits;
use mvlmul::verify::{exhaustive_verify, DEFAULT_CAP};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn cost(bill: &BillOfCells, s: &str) -> u64 {
    total_cost(bill, &scheme(s).unwrap()).unwrap()
}

fn eval(n: &Netlist, a: u64, b: u64, st: &mut [u8]) -> Vec<u8> {
    let iface = n.interface();
    let mut d = vec![0; n.inputs().len()];
    let (da, db) = d.split_at_mut(iface.widths[0]);
    write_digits(a, iface.radix, da).unwrap();
    write_digits(b, iface.radix, db).unwrap();
    n.evaluate_into(&d, st).unwrap();
    n.read_outputs(st).collect()
}

struct Built {
    binary_wallace: Generated,
    binary_dadda: Generated,
    direct: Generated,
    hybrid: Generated,
    adder: Generated,
}

fn build() -> Built {
    Built {
        binary_wallace: build_binary_multiplier(8, Policy::Wallace).unwrap(),
        binary_dadda: build_binary_multiplier(8, Policy::Dadda).unwrap(),
        direct: build_quaternary_direct(4, Policy::Wallace).unwrap(),
        hybrid: build_quaternary_hybrid(4, Policy::Wallace).unwrap(),
        adder: build_ripple_adder_quaternary(4).unwrap(),
    }
}

fn exhaustive(g: &Generated, oracle: fn(u64, u64) -> u64) -> Result<String, String> {
    let t = Instant::now();
    let r = exhaustive_verify(&g.netlist, oracle, DEFAULT_CAP).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    check(r.passed(), format!("{}: {}", g.netlist.name(), r.to_text()))?;
    check(r.cases == 65_536, format!("{}: {} cases", g.netlist.name(), r.cases))?;
    let audit = r.range_audit(&g.netlist);
    check(
        audit.violations.is_empty(),
        format!("{}: {} range violations", g.netlist.name(), audit.violations.len()),
    )?;
    Ok(format!("{} {}/{} in {secs:.2}s", g.netlist.name(), r.cases, r.cases))
}

fn criterion_1(b: &Built) -> Outcome {
    let mut parts = Vec::new();
    let t = Instant::now();
    parts.push(exhaustive(&b.binary_wallace, |x, y| x * y)?);
    let wallace_secs = t.elapsed().as_secs_f64();
    check(wallace_secs < 5.0, format!("binary Wallace took {wallace_secs:.2}s"))?;
    parts.push(exhaustive(&b.binary_dadda, |x, y| x * y)?);
    parts.push(exhaustive(&b.direct, |x, y| x * y)?);
    parts.push(exhaustive(&b.hybrid, |x, y| x * y)?);
    parts.push(exhaustive(&b.adder, |x, y| x + y)?);
    let (d, h) = (&b.direct.netlist, &b.hybrid.netlist);
    let (mut sd, mut sh) = (d.new_state(), h.new_state());
    for x in 0..256 {
        for y in 0..256 {
            let (od, oh) = (eval(d, x, y, &mut sd), eval(h, x, y, &mut sh));
            check(od == oh, format!("hybrid/direct differ at {x}x{y}: {od:?} vs {oh:?}"))?;
        }
    }
    parts.push("hybrid == direct on 65536 pairs".into());
    Ok(parts.join("; "))
}

fn criterion_2() -> Outcome {
    for a in 0..4u8 {
        for b in 0..4u8 {
            let (m, c) = qmul1(a, b).unwrap();
            check(4 * c + m == a * b, format!("QMUL1({a},{b})"))?;
        }
    }
    // published rows for A=2,3 as (B, QM, QC)
    let rows2 = [(0, 0, 0), (1, 2, 0), (2, 0, 1), (3, 2, 1)];
    let rows3 = [(0, 0, 0), (1, 3, 0), (2, 2, 1), (3, 1, 2)];
    for (a, rows) in [(2u8, rows2), (3, rows3)] {
        for (b, qm, qc) in rows {
            check(qmul1(a, b).unwrap() == (qm, qc), format!("published QMUL1 row {a},{b}"))?;
        }
    }
    let adders = [(CellKind::Q332, 48), (CellKind::Q331, 32), (CellKind::Qh32, 12), (CellKind::Qh31, 8)];
    for (cell, n) in adders {
        let rows = enumerate_truth_table(cell);
        check(rows.len() == n, format!("{cell}: {} rows", rows.len()))?;
        for r in rows {
            let sum: u8 = r.inputs.iter().sum();
            check(r.outputs == vec![sum % 4, sum / 4], format!("{cell} {:?}", r.inputs))?;
        }
    }
    for q in 0..4u8 {
        let bits = CellKind::DecQ2b.eval(&[q]).unwrap();
        check(bits == vec![q / 2, q % 2], format!("DEC_Q2B({q})"))?;
        check(CellKind::EncB2q.eval(&bits).unwrap() == vec![q], format!("ENC_B2Q({q})"))?;
    }
    Ok("QMUL1 16/16 (A=1 rows follow a*b, erratum), adders 48/32/12/8 rows, DEC/ENC 4/4".into())
}

fn criterion_3() -> Outcome {
    let q1 = BillOfCells::from_pairs([("QMUL1", 1)]);
    check(cost(&q1, QUAT_MIN) == 54 && cost(&q1, QUAT_SUBBLOCK) == 76, "QMUL1 54/76")?;
    let bills = published_bills();
    let bin = &bills["binary-8x8"];
    check(cost(bin, BINARY_FA16) == 1392 && cost(bin, BINARY_FA28) == 1892, "binary 1392/1892")?;
    let rows = [
        (BillOfCells::from_pairs([("AND2", 64)]), 384, 384),
        (BillOfCells::from_pairs([("FA", 38)]), 608, 1064),
        (BillOfCells::from_pairs([("HA", 15)]), 240, 180),
        (BillOfCells::from_pairs([("FA", 9), ("HA", 1)]), 160, 264),
    ];
    for (bill, a, b) in rows {
        check(
            cost(&bill, BINARY_FA16) == a && cost(&bill, BINARY_FA28) == b,
            format!("binary row {bill}"),
        )?;
    }
    let hyb = &bills["quat-hybrid-published"];
    check(cost(hyb, BINARY_FA16) == 1532 && cost(hyb, BINARY_FA28) == 2032, "hybrid 1532/2032")?;
    let full = &bills["quat-hybrid-full"];
    check(
        cost(full, BINARY_FA16) == 1392 + 280 && cost(full, BINARY_FA28) == 1892 + 280,
        "hybrid full accounting",
    )?;
    for (cell, min, sub) in [("Q331", 100, 118), ("Q332", 154, 184), ("QH32", 50, 54), ("QH31", 26, 30)] {
        let b = BillOfCells::from_pairs([(cell, 1)]);
        check(cost(&b, QUAT_MIN) == min && cost(&b, QUAT_SUBBLOCK) == sub, cell)?;
    }
    let adders = &bills["quat-direct-adders"];
    check(cost(adders, QUAT_MIN) == 2888 && cost(adders, QUAT_SUBBLOCK) == 3412, "direct 2888/3412")?;
    let qfull = &bills["quat-direct-full"];
    check(
        cost(qfull, QUAT_MIN) == 2888 + 16 * 54 && cost(qfull, QUAT_SUBBLOCK) == 3412 + 16 * 76,
        "direct full 3752/4628",
    )?;
    let md = report::reproduce().map_err(|e| e.to_string())?.render(Format::Markdown);
    for needle in [
        "binary-8x8, fa16, 1392",
        "quat-direct-adders, min, 2888",
        "quat-hybrid-full, fa16, 1672, erratum",
        "quat-direct-full, min, 3752, erratum",
        "quat-direct-full, subblock, 4628, erratum",
        "ratio(binary-fa28 / quat-direct-min) = 0.65",
    ] {
        check(md.contains(needle), format!("report lacks '{needle}'"))?;
    }
    Ok("all pinned totals exact; report carries the 0.65 ratio and erratum rows".into())
}

fn criterion_4(b: &Built, functional: bool) -> Outcome {
    let bin_red = b.binary_wallace.reduction.to_string();
    let bin_cpa = b.binary_wallace.cpa.to_string();
    let quat = b.direct.adder_bill();
    let exact = bin_red == "FA:38 HA:15" && bin_cpa == "FA:9 HA:1" && quat.to_string() == "Q331:13 Q332:9 QH32:3 QH31:2";
    let detail = format!("binary reduction {bin_red} + cpa {bin_cpa}; quaternary {quat}");
    if exact {
        return Ok(format!("exact census: {detail}"));
    }
    // degraded form
    check(functional, "degraded census check needs criterion 1")?;
    let bills = published_bills();
    let mut devs = Vec::new();
    for (gen, published, names) in [
        (b.binary_wallace.bill(), &bills["binary-8x8"], [BINARY_FA16, BINARY_FA28]),
        (quat.clone(), &bills["quat-direct-adders"], [QUAT_MIN, QUAT_SUBBLOCK]),
    ] {
        for s in names {
            let (g, p) = (cost(&gen, s), cost(published, s));
            check(g.abs_diff(p) * 100 <= p * 5, format!("{s}: {g} vs {p} exceeds 5%"))?;
            devs.push(format!("{s} {g}/{p}"));
        }
    }
    let md = report::reproduce().map_err(|e| e.to_string())?.render(Format::Markdown);
    for bill in [
        b.binary_wallace.bill().to_string(),
        quat.to_string(),
        bills["binary-8x8"].to_string(),
        bills["quat-direct-adders"].to_string(),
    ] {
        check(md.contains(&bill), format!("report lacks bill {bill}"))?;
    }
    Ok(format!(
        "degraded (exact census not reached: {detail}); costs within 5%: {}",
        devs.join(", ")
    ))
}

fn criterion_5(b: &Built) -> Outcome {
    for g in [&b.binary_wallace, &b.binary_dadda, &b.direct, &b.hybrid] {
        let n = &g.netlist;
        let plan = g.plan.as_ref().unwrap();
        let space = n.interface().radix.capacity(n.interface().widths[0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut st = n.new_state();
        for _ in 0..1000 {
            let (x, y) = (rng.gen_range(0..space), rng.gen_range(0..space));
            eval(n, x, y, &mut st);
            let v = plan.stage_values(&st);
            check(
                v.iter().all(|&s| s == u128::from(x * y)),
                format!("{} loses value at {x}x{y}: {v:?}", n.name()),
            )?;
        }
    }
    // the range audit ran inside criterion 1's exhaustive runs; repeat here so
    // this criterion stands alone
    for g in [&b.binary_wallace, &b.binary_dadda, &b.direct, &b.hybrid, &b.adder] {
        let f = g.netlist.interface().function;
        let r = exhaustive_verify(&g.netlist, |x, y| f.apply(x, y), DEFAULT_CAP).map_err(|e| e.to_string())?;
        let audit = r.range_audit(&g.netlist);
        check(audit.violations.is_empty(), format!("{}: range violations", g.netlist.name()))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for s in schemes() {
        let names: Vec<String> = s.names().map(str::to_string).collect();
        for _ in 0..200 {
            let mut random_bill = || {
                let mut bill = BillOfCells::new();
                for _ in 0..rng.gen_range(0..6) {
                    bill.add(&names[rng.gen_range(0..names.len())], rng.gen_range(1..40));
                }
                bill
            };
            let (b1, b2) = (random_bill(), random_bill());
            let joint = b1.clone().merged(&b2);
            check(
                total_cost(&joint, &s).unwrap() == total_cost(&b1, &s).unwrap() + total_cost(&b2, &s).unwrap(),
                format!("{}: cost not linear", s.name),
            )?;
        }
    }
    let (min, sub) = (scheme(QUAT_MIN).unwrap(), scheme(QUAT_SUBBLOCK).unwrap());
    for cell in ["QMUL1", "Q331", "Q332", "QH32", "QH31"] {
        check(
            sub.unit_cost(cell).unwrap() >= min.unit_cost(cell).unwrap(),
            format!("{cell}: subblock below min"),
        )?;
    }
    Ok("value conserved on 4x1000 seeded inputs; 0 range violations; linearity and dominance hold".into())
}

fn main() {
    let built = build();
    let c1 = criterion_1(&built);
    let functional = c1.is_ok();
    let results = [
        ("functional equivalence", c1),
        ("cell truth tables", criterion_2()),
        ("published-table reproduction", criterion_3()),
        ("generator census", criterion_4(&built, functional)),
        ("invariant suites", criterion_5(&built)),
    ];
    let mut failed = 0;
    for (k, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(detail) => println!("criterion {} ({name}): PASS - {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL - {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
