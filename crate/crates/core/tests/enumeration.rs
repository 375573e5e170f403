//! Closed forms against brute-force enumeration over every placement of `m`
//! users on a small synthetic network with finitely many rate outcomes.

use cellse::metrics::{mean_total_se, mean_typical_se, variance_total_se, variance_typical_se};
use cellse::occupancy::{expected_inverse_occupancy, joint_occupied_probability, occupied_indicator_covariance};
use cellse::{CellStats, InverseOccupancy};
use proptest::prelude::*;

/// One cell: its outcomes as `(probability mass, rate)` pairs.
type Cell = Vec<(f64, f64)>;

fn stats_of(cells: &[Cell]) -> CellStats {
    let mut p = Vec::new();
    let mut psi = Vec::new();
    let mut psi2 = Vec::new();
    for c in cells {
        let mass = c.iter().map(|o| o.0).sum::<f64>().min(1.0);
        p.push(mass);
        psi.push(c.iter().map(|o| o.0 * o.1).sum::<f64>() / mass);
        psi2.push(c.iter().map(|o| o.0 * o.1 * o.1).sum::<f64>() / mass);
    }
    CellStats::new(p, psi, psi2).unwrap()
}

struct Moments {
    mean_total: f64,
    var_total: f64,
    mean_typical: f64,
    var_typical: f64,
}

/// Walks all `K^m` assignments of users to (cell, outcome) pairs.
fn enumerate(cells: &[Cell], m: usize) -> Moments {
    let outcomes: Vec<(usize, f64, f64)> = cells
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.iter().map(move |&(w, r)| (i, w, r)))
        .collect();
    let k = outcomes.len();
    let mut idx = vec![0usize; m];
    let (mut e_t, mut e_t2, mut e_u, mut e_u2) = (0.0, 0.0, 0.0, 0.0);
    loop {
        let weight: f64 = idx.iter().map(|&j| outcomes[j].1).product();
        let mut counts = vec![0usize; cells.len()];
        for &j in &idx {
            counts[outcomes[j].0] += 1;
        }
        let x: Vec<f64> = idx.iter().map(|&j| outcomes[j].2 / counts[outcomes[j].0] as f64).collect();
        let total: f64 = x.iter().sum();
        let sq: f64 = x.iter().map(|v| v * v).sum();
        e_t += weight * total;
        e_t2 += weight * total * total;
        e_u += weight * total / m as f64;
        e_u2 += weight * sq / m as f64;

        let mut pos = 0;
        loop {
            if pos == m {
                return Moments {
                    mean_total: e_t,
                    var_total: e_t2 - e_t * e_t,
                    mean_typical: e_u,
                    var_typical: e_u2 - e_u * e_u,
                };
            }
            idx[pos] += 1;
            if idx[pos] < k {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Occupancy counts of every placement of `m` users over cells with masses `p`,
/// together with the placement probability.
fn placements(p: &[f64], m: usize) -> Vec<(f64, Vec<usize>)> {
    let n = p.len();
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    'outer: loop {
        let w: f64 = idx.iter().map(|&i| p[i]).product();
        let mut counts = vec![0usize; n];
        for &i in &idx {
            counts[i] += 1;
        }
        out.push((w, counts));
        for pos in 0..m {
            idx[pos] += 1;
            if idx[pos] < n {
                continue 'outer;
            }
            idx[pos] = 0;
        }
        return out;
    }
}

fn example_cells() -> Vec<Cell> {
    vec![
        vec![(0.1, 2.0), (0.15, 0.5)],
        vec![(0.3, 1.25)],
        vec![(0.2, 3.0), (0.05, 0.0), (0.2, 1.0)],
    ]
}

#[test]
fn closed_form_metrics_match_enumeration_on_fixed_network() {
    let cells = example_cells();
    let stats = stats_of(&cells);
    for m in 1..=6u64 {
        let e = enumerate(&cells, m as usize);
        let exact = InverseOccupancy::Exact;
        assert!((mean_total_se(&stats, m) - e.mean_total).abs() < 1e-10, "m={m}");
        assert!((variance_total_se(&stats, m, exact).unwrap() - e.var_total).abs() < 1e-10, "m={m}");
        assert!((mean_typical_se(&stats, m) - e.mean_typical).abs() < 1e-10, "m={m}");
        assert!((variance_typical_se(&stats, m, exact).unwrap() - e.var_typical).abs() < 1e-10, "m={m}");
    }
}

#[test]
fn pair_functionals_match_enumeration_on_fixed_network() {
    let p = [0.25, 0.3, 0.45];
    for m in 1..=6 {
        let all = placements(&p, m);
        for i in 0..3 {
            let e_inv: f64 = all
                .iter()
                .map(|(w, c)| if c[i] > 0 { w / c[i] as f64 } else { 0.0 })
                .sum();
            assert!((expected_inverse_occupancy(m as u64, p[i]).unwrap() - e_inv).abs() < 1e-12);
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let both: f64 = all.iter().filter(|(_, c)| c[i] > 0 && c[j] > 0).map(|(w, _)| w).sum();
                let oi: f64 = all.iter().filter(|(_, c)| c[i] > 0).map(|(w, _)| w).sum();
                let oj: f64 = all.iter().filter(|(_, c)| c[j] > 0).map(|(w, _)| w).sum();
                let m = m as u64;
                assert!((joint_occupied_probability(m, p[i], p[j]).unwrap() - both).abs() < 1e-12);
                assert!((occupied_indicator_covariance(m, p[i], p[j]).unwrap() - (both - oi * oj)).abs() < 1e-12);
            }
        }
    }
}

fn arb_cells() -> impl Strategy<Value = Vec<Cell>> {
    // Up to three cells with one or two outcomes each; masses normalised afterwards.
    prop::collection::vec(prop::collection::vec((0.05f64..1.0, 0.0f64..4.0), 1..=2), 1..=3).prop_map(|cells| {
        let total: f64 = cells.iter().flatten().map(|o| o.0).sum();
        cells
            .into_iter()
            .map(|c| c.into_iter().map(|(w, r)| (w / total, r)).collect())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_metrics_match_enumeration(cells in arb_cells(), m in 1usize..=5) {
        let stats = stats_of(&cells);
        let e = enumerate(&cells, m);
        let m = m as u64;
        let exact = InverseOccupancy::Exact;
        prop_assert!((mean_total_se(&stats, m) - e.mean_total).abs() < 1e-10);
        prop_assert!((variance_total_se(&stats, m, exact).unwrap() - e.var_total).abs() < 1e-10);
        prop_assert!((mean_typical_se(&stats, m) - e.mean_typical).abs() < 1e-10);
        prop_assert!((variance_typical_se(&stats, m, exact).unwrap() - e.var_typical).abs() < 1e-10);
    }
}
