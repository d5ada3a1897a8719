mod common;

use std::collections::BTreeSet;

use statenet::claims::{check_c1_on, periodic_points};
use statenet::network::{find_cycles, tail_lengths, Analysis};
use statenet::{build_network, ControlParameter, Precision, QuantizationMode};

fn as_u64(succ: &[u32]) -> Vec<u64> {
    succ.iter().map(|&s| u64::from(s)).collect()
}

#[test]
fn exact_value_examples_against_big_rationals() {
    // 121 * 16 * 16 = 30976, 121 * 8 * 24 = 23232
    assert_eq!(common::rational_step(121, 5, 5, 16, "floor"), 30976 / 1024);
    let mu = ControlParameter::new(121, 5).unwrap();
    let n = Precision::new(5, &mu).unwrap();
    let r = statenet::exact_value(16, &mu, n).unwrap();
    assert_eq!((r.num, r.log2_den), (30976, 10));
    let r = statenet::exact_value(8, &mu, n).unwrap();
    assert_eq!((r.num, r.log2_den), (23232, 10));
    assert!(common::is_zero(
        &(common::rational_frac(121, 5, 5, 16) - common::quarter(1))
    ));
}

#[test]
fn steps_match_rational_oracle() {
    for (num, exp) in [(121, 5), (3, 2), (7, 3), (1, 1), (255, 6)] {
        let mu = ControlParameter::new(num, exp).unwrap();
        for bits in exp.max(1)..=9 {
            for mode in QuantizationMode::ALL {
                let net = build_network(mu, Precision::new(bits, &mu).unwrap(), mode).unwrap();
                let expect = common::rational_table(num, exp, bits, mode.as_str());
                assert_eq!(as_u64(net.successors()), expect, "mu={mu} n={bits} {mode}");
            }
        }
    }
}

#[test]
fn graph_analysis_matches_oracle() {
    for (num, exp) in [(121, 5), (3, 2), (7, 3)] {
        let mu = ControlParameter::new(num, exp).unwrap();
        for bits in exp..=10 {
            for mode in QuantizationMode::ALL {
                let net = build_network(mu, Precision::new(bits, &mu).unwrap(), mode).unwrap();
                let oracle = common::graph_oracle(&as_u64(net.successors()));
                let a = Analysis::new(&net);

                assert_eq!(a.in_degree, oracle.in_degree);
                assert_eq!(tail_lengths(&net), oracle.tails);
                let cycles: BTreeSet<Vec<usize>> = find_cycles(&net)
                    .into_iter()
                    .map(|mut c| {
                        c.sort_unstable();
                        c
                    })
                    .collect();
                assert_eq!(cycles, oracle.cycles);

                assert_eq!(a.components.len(), oracle.components.len());
                for (info, members) in a.components.iter().zip(&oracle.components) {
                    assert_eq!(info.node_count, members.len());
                    assert_eq!(info.min_label, members[0]);
                    assert!(info.cycle.iter().all(|c| members.binary_search(c).is_ok()));
                    let max_tail = members.iter().map(|&m| oracle.tails[m]).max().unwrap();
                    assert_eq!(info.max_tail_length, max_tail);
                }
                for (v, &id) in a.component_of.iter().enumerate() {
                    assert!(oracle.components[id as usize].binary_search(&v).is_ok());
                }
            }
        }
    }
}

#[test]
fn collision_pairs_match_all_pairs_oracle() {
    for (num, exp) in [(121, 5), (3, 2), (7, 3)] {
        let mu = ControlParameter::new(num, exp).unwrap();
        for bits in exp..=10 {
            let net = build_network(
                mu,
                Precision::new(bits, &mu).unwrap(),
                QuantizationMode::Round,
            )
            .unwrap();
            let pairs = common::collision_pairs(&as_u64(net.successors()));
            let report = check_c1_on(&net);
            assert_eq!(report.checked_count, pairs.len() as u64);
            let bound = 1usize << (bits + 1 - exp);
            let expected: Vec<Vec<i64>> = pairs
                .iter()
                .filter(|(a, b)| b - a >= bound)
                .map(|&(a, b)| vec![a as i64, b as i64])
                .collect();
            let mut got: Vec<Vec<i64>> =
                report.violations.iter().map(|w| w.input.clone()).collect();
            got.sort();
            assert_eq!(got, expected, "mu={mu} n={bits}");
        }
    }
}

#[test]
fn periodic_points_match_iteration() {
    for (num, exp) in [(121, 5), (3, 2), (7, 3)] {
        let mu = ControlParameter::new(num, exp).unwrap();
        for bits in exp..=10 {
            let net = build_network(
                mu,
                Precision::new(bits, &mu).unwrap(),
                QuantizationMode::Round,
            )
            .unwrap();
            let succ = as_u64(net.successors());
            for m in 1..=12 {
                assert_eq!(
                    periodic_points(&net, m).unwrap(),
                    common::periodic_by_iteration(&succ, m),
                    "mu={mu} n={bits} m={m}"
                );
            }
        }
    }
}

#[test]
fn five_bit_topology() {
    // frozen from the rational oracle; the network drawn for mu = 121/2^5 at 5 bits
    let expect: Vec<u64> = vec![
        0, 4, 7, 10, 13, 16, 18, 21, 23, 24, 26, 27, 28, 29, 30, 30, 30, 30, 30, 29, 28, 27, 26,
        24, 23, 21, 18, 16, 13, 10, 7, 4, 0,
    ];
    assert_eq!(common::rational_table(121, 5, 5, "round"), expect);
    let mu = ControlParameter::new(121, 5).unwrap();
    let net = build_network(mu, Precision::new(5, &mu).unwrap(), QuantizationMode::Round).unwrap();
    let oracle = common::graph_oracle(&expect);
    assert_eq!(oracle.components.len(), 3);
    assert_eq!(Analysis::new(&net).components.len(), 3);
    let sizes: Vec<usize> = oracle.components.iter().map(Vec::len).collect();
    assert_eq!(sizes.iter().sum::<usize>(), 33);
}
