//! Property tests over costing, compression and verification.

use mvlmul::cells::CellKind;
use mvlmul::costing::{schemes, scheme, total_cost, BillOfCells, QUAT_MIN, QUAT_SUBBLOCK};
use mvlmul::generators::{build_cpa, build_quaternary_direct, compress_columns, Column, Policy, Wire};
use mvlmul::netlist::{Function, Interface, NetlistBuilder};
use mvlmul::value::{digits_value, Radix, ValueRange};
use mvlmul::verify::{exhaustive_verify, sampled_verify, DEFAULT_CAP};
use proptest::prelude::*;

fn bill_strategy(names: Vec<String>) -> impl Strategy<Value = BillOfCells> {
    proptest::collection::vec((0..names.len(), 1u64..50), 0..8).prop_map(move |items| {
        let mut b = BillOfCells::new();
        for (k, n) in items {
            b.add(&names[k], n);
        }
        b
    })
}

fn scheme_and_two_bills() -> impl Strategy<Value = (usize, BillOfCells, BillOfCells)> {
    (0usize..4).prop_flat_map(|k| {
        let names: Vec<String> = schemes()[k].names().map(str::to_string).collect();
        (Just(k), bill_strategy(names.clone()), bill_strategy(names))
    })
}

proptest! {
    #[test]
    fn cost_is_linear((k, b1, b2) in scheme_and_two_bills()) {
        let s = &schemes()[k];
        let joint = b1.clone().merged(&b2);
        prop_assert_eq!(
            total_cost(&joint, s).unwrap(),
            total_cost(&b1, s).unwrap() + total_cost(&b2, s).unwrap()
        );
    }
}

#[test]
fn subblock_dominates_min_for_every_quaternary_cell() {
    let (min, sub) = (scheme(QUAT_MIN).unwrap(), scheme(QUAT_SUBBLOCK).unwrap());
    for name in min.names() {
        assert!(sub.unit_cost(name).unwrap() >= min.unit_cost(name).unwrap(), "{name}");
    }
    for cell in [CellKind::Qmul1, CellKind::Q331, CellKind::Q332, CellKind::Qh32, CellKind::Qh31] {
        assert!(sub.unit_cost(cell.name()).unwrap() > min.unit_cost(cell.name()).unwrap());
    }
}

/// Column profile of wire ranges (1..=3), one vector per column.
fn profile() -> impl Strategy<Value = Vec<Vec<u8>>> {
    proptest::collection::vec(proptest::collection::vec(1u8..=3, 0..7), 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Any radix-4 column profile compresses to at most two rows, and the
    /// final adder output carries exactly the weighted sum of the wires.
    #[test]
    fn quaternary_compression_conserves_value(
        cols in profile(),
        policy in prop_oneof![Just(Policy::Wallace), Just(Policy::Dadda)],
        inputs in proptest::collection::vec(0u8..=3, 64),
    ) {
        let mut b = NetlistBuilder::new();
        let mut columns: Vec<Column> = Vec::new();
        let mut sources = Vec::new();
        for (w, ranges) in cols.iter().enumerate() {
            let mut wires = Vec::new();
            for &r in ranges {
                let q = b.input(format!("a[{}]", sources.len()), ValueRange::QUATERNARY);
                sources.push(r);
                // narrow the quaternary input to the wanted range
                let net = match r {
                    3 => q,
                    2 => b.cell(CellKind::Qmul1, &[q, q]).unwrap()[1],
                    _ => b.cell(CellKind::DecQ2b, &[q]).unwrap()[1],
                };
                wires.push(Wire { net, range: ValueRange::new(r).unwrap(), line: wires.len() });
            }
            columns.push(Column { weight: w, wires });
        }
        // headroom so no carry leaves the array
        for w in cols.len()..cols.len() + 4 {
            columns.push(Column { weight: w, wires: Vec::new() });
        }
        let (plan, rows) = compress_columns(&mut b, columns, Radix::Quaternary, policy).unwrap();
        prop_assert!(rows.iter().all(|c| c.wires.len() <= 2));
        let (outs, _) = build_cpa(&mut b, &rows, Radix::Quaternary).unwrap();
        let k = sources.len();
        let n = b
            .finish("profile", Interface { function: Function::Add, radix: Radix::Quaternary, widths: [k, 0] }, outs)
            .unwrap();
        let digits: Vec<u8> = inputs[..k].to_vec();
        let mut st = n.new_state();
        n.evaluate_into(&digits, &mut st).unwrap();
        let values = plan.stage_values(&st);
        let out: Vec<u8> = n.read_outputs(&st).collect();
        prop_assert!(values.iter().all(|&v| v == values[0]));
        prop_assert_eq!(u128::from(digits_value(&out, Radix::Quaternary)), values[0]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exhaustive_pass_implies_sampled_pass(seed in any::<u64>(), trials in 1u64..300) {
        let g = build_quaternary_direct(2, Policy::Wallace).unwrap();
        prop_assume!(exhaustive_verify(&g.netlist, |a, b| a * b, DEFAULT_CAP).unwrap().passed());
        prop_assert!(sampled_verify(&g.netlist, |a, b| a * b, trials, seed).unwrap().passed());
    }
}
