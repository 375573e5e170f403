use cellse::model::controls_from_reparam;
use cellse::montecarlo::{estimate, sample_users, simulate_trial, trial_rng, McConfig};
use cellse::partition::{GainField, QuadratureGrid};
use cellse::{Point, ReparamControl, Scenario};

fn scenario_i(resolution: usize) -> Scenario {
    Scenario::two_station_line(5.0, 5.0, 0.1, 3.0, resolution).unwrap()
}

#[test]
fn seeded_estimates_are_reproducible() {
    let s = scenario_i(2001);
    let c = controls_from_reparam(&s, ReparamControl::new(2.0, -1.0).unwrap()).unwrap();
    let cfg = McConfig::new(20, 500, 42).unwrap();
    let a = estimate(&s, &c, &cfg).unwrap();
    let b = estimate(&s, &c, &cfg).unwrap();
    assert_eq!(a, b);
    let other = estimate(&s, &c, &McConfig::new(20, 500, 43).unwrap()).unwrap();
    assert_ne!(a.mean_total, other.mean_total);
    assert!((a.p_hat.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((a.mean_typical - a.mean_total / 20.0).abs() < 1e-12);
    assert!(a.se_mean_total.unwrap() >= 0.0 && a.se_std_typical.unwrap() >= 0.0);
}

#[test]
fn single_trial_leaves_errors_undefined() {
    let s = scenario_i(101);
    let e = estimate(&s, &s.default_control(), &McConfig::new(5, 1, 0).unwrap()).unwrap();
    assert!(e.se_mean_total.is_none() && e.se_std_total.is_none() && e.se_mean_fairness.is_none());
}

#[test]
fn timeshare_splits_colocated_users() {
    let s = scenario_i(101);
    let c = s.default_control();
    let u = Point::on_line(2.5);
    let one = simulate_trial(&s, &c, &[u]).unwrap();
    let two = simulate_trial(&s, &c, &[u, u]).unwrap();
    assert_eq!(one.fairness, 1.0);
    assert!((two.per_user[0] - one.per_user[0] / 2.0).abs() < 1e-15);
    assert!((two.total - one.total).abs() < 1e-15);
    assert!(simulate_trial(&s, &c, &[Point::on_line(1.05)]).is_err());
}

/// Fraction of sampled users whose exact association differs from the grid
/// cell that contains them.
fn disagreement(resolution: usize) -> f64 {
    let s = Scenario::quincunx(3.0, 0.1, 3.0, resolution).unwrap();
    let c = controls_from_reparam(&s, ReparamControl::new(1.3, -0.4).unwrap()).unwrap();
    let part = GainField::new(&s).partition(&c).unwrap();
    let grid = QuadratureGrid::for_scenario(&s);
    let (nx, _) = grid.shape();
    let h = grid.step();
    let mut rng = trial_rng(9, 0);
    let users = sample_users(&s, 20_000, &mut rng);
    let out = simulate_trial(&s, &c, &users).unwrap();
    let mut bad = 0;
    for (u, &a) in users.iter().zip(&out.assignment) {
        let ix = (((u.x + 3.0) / h) as usize).min(nx - 1);
        let iy = (((u.y + 3.0) / h) as usize).min(nx - 1);
        if let Some(g) = part.assignment()[iy * nx + ix] {
            if g != a {
                bad += 1;
            }
        }
    }
    bad as f64 / users.len() as f64
}

#[test]
fn sampled_association_agrees_with_grid() {
    let coarse = disagreement(51);
    let fine = disagreement(201);
    assert!(coarse < 0.1, "{coarse}");
    assert!(fine < coarse, "{fine} vs {coarse}");
}
