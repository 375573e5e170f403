//! Monte Carlo reference: drop users uniformly, associate them with the exact
//! (continuous) biased SINR, and measure the resulting SE directly.
//!
//! Trial `t` draws from a ChaCha8 generator seeded with `seed_from_u64(seed)`
//! and switched to stream `t`, so trials are independent of scheduling and
//! any subset can be replayed on its own.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::jain_fairness;
use crate::model::{ArenaShape, ControlPoint, Point, Scenario};
use crate::partition::{associate, shannon_rate, station_gains};
use crate::scalar::{pairwise_sum, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    /// Users per trial.
    pub m: u64,
    pub trials: u64,
    pub seed: u64,
}

impl McConfig {
    pub fn new(m: u64, trials: u64, seed: u64) -> Result<Self> {
        if m == 0 || trials == 0 {
            return Err(Error::InvalidMcConfig(format!("m = {m} and trials = {trials} must both be positive")));
        }
        Ok(Self { m, trials, seed })
    }
}

/// Generator for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `m` independent uniform locations over the arena minus the deadzones.
pub fn sample_users<T: Real, R: Rng + ?Sized>(scenario: &Scenario<T>, m: usize, rng: &mut R) -> Vec<Point<T>> {
    let (x0, x1, y0, y1) = scenario.arena().bounds();
    let two_d = matches!(scenario.arena().shape, ArenaShape::Rectangle { .. });
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let x = x0 + (x1 - x0) * T::lit(rng.random::<f64>());
        let y = if two_d { y0 + (y1 - y0) * T::lit(rng.random::<f64>()) } else { T::zero() };
        let p = Point::new(x, y);
        if !scenario.in_deadzone(&p) {
            out.push(p);
        }
    }
    out
}

/// SE outcome of one user drop.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome<T> {
    /// Serving station of each user.
    pub assignment: Vec<usize>,
    /// Per-user SE: the user's rate divided by its cell's occupancy.
    pub per_user: Vec<T>,
    pub total: T,
    pub fairness: T,
}

/// Associates each user by exact biased SINR and applies uniform timesharing.
pub fn simulate_trial<T: Real>(
    scenario: &Scenario<T>,
    control: &ControlPoint<T>,
    users: &[Point<T>],
) -> Result<TrialOutcome<T>> {
    control.check_for(scenario)?;
    if users.is_empty() {
        return Err(Error::Empty("trial without users"));
    }
    let n = scenario.station_count();
    let mut assignment = Vec::with_capacity(users.len());
    let mut rates = Vec::with_capacity(users.len());
    for u in users {
        if scenario.in_deadzone(u) {
            return Err(Error::InsideDeadzone { x: u.x.to_f64_lossy(), y: u.y.to_f64_lossy() });
        }
        let gains = station_gains(scenario, u);
        let (owner, sinr) = associate(&gains, control.powers(), control.biases(), scenario.noise());
        assignment.push(owner);
        rates.push(shannon_rate(sinr));
    }
    let mut occupancy = vec![0u64; n];
    for &a in &assignment {
        occupancy[a] += 1;
    }
    let per_user: Vec<T> = assignment
        .iter()
        .zip(&rates)
        .map(|(&a, &r)| r / T::from_count(occupancy[a]))
        .collect();
    let total = pairwise_sum(&per_user);
    let fairness = jain_fairness(&per_user)?;
    Ok(TrialOutcome { assignment, per_user, total, fairness })
}

/// Empirical counterparts of the closed-form metrics, with standard errors.
///
/// Typical-user quantities average over all `m` users of each trial, i.e.
/// they condition on the drop and integrate the uniform user choice exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimates<T> {
    pub trials: u64,
    pub mean_total: T,
    pub std_total: T,
    pub mean_typical: T,
    pub std_typical: T,
    pub mean_fairness: T,
    /// `None` when a single trial leaves the spread unidentified.
    pub se_mean_total: Option<T>,
    pub se_std_total: Option<T>,
    pub se_mean_typical: Option<T>,
    pub se_std_typical: Option<T>,
    pub se_mean_fairness: Option<T>,
    /// Fraction of all sampled users associated with each station.
    pub p_hat: Vec<T>,
}

struct TrialSummary<T> {
    total: T,
    mean_square: T,
    fairness: T,
    counts: Vec<u64>,
}

fn run_trial<T: Real>(scenario: &Scenario<T>, control: &ControlPoint<T>, cfg: &McConfig, trial: u64) -> Result<TrialSummary<T>> {
    let mut rng = trial_rng(cfg.seed, trial);
    let users = sample_users(scenario, cfg.m as usize, &mut rng);
    let out = simulate_trial(scenario, control, &users)?;
    let squares: Vec<T> = out.per_user.iter().map(|&x| x * x).collect();
    let mut counts = vec![0u64; scenario.station_count()];
    for &a in &out.assignment {
        counts[a] += 1;
    }
    Ok(TrialSummary {
        total: out.total,
        mean_square: pairwise_sum(&squares) / T::from_count(cfg.m),
        fairness: out.fairness,
        counts,
    })
}

fn mean<T: Real>(v: &[T]) -> T {
    pairwise_sum(v) / T::from_count(v.len() as u64)
}

/// Unbiased sample variance around a given centre.
fn sample_variance<T: Real>(v: &[T], centre: T) -> Option<T> {
    if v.len() < 2 {
        return None;
    }
    let dev: Vec<T> = v.iter().map(|&x| (x - centre) * (x - centre)).collect();
    Some(pairwise_sum(&dev) / T::from_count(v.len() as u64 - 1))
}

fn std_error<T: Real>(v: &[T]) -> Option<T> {
    let c = mean(v);
    sample_variance(v, c).map(|var| (var / T::from_count(v.len() as u64)).sqrt())
}

/// Runs `cfg.trials` independent drops and aggregates them in trial order.
pub fn estimate<T: Real>(scenario: &Scenario<T>, control: &ControlPoint<T>, cfg: &McConfig) -> Result<McEstimates<T>> {
    control.check_for(scenario)?;
    let cfg = McConfig::new(cfg.m, cfg.trials, cfg.seed)?;
    let summaries: Vec<TrialSummary<T>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(scenario, control, &cfg, t))
        .collect::<Result<_>>()?;
    let m = T::from_count(cfg.m);
    let totals: Vec<T> = summaries.iter().map(|s| s.total).collect();
    let typical: Vec<T> = totals.iter().map(|&x| x / m).collect();
    let squares: Vec<T> = summaries.iter().map(|s| s.mean_square).collect();
    let fairness: Vec<T> = summaries.iter().map(|s| s.fairness).collect();

    let mean_total = mean(&totals);
    let var_total = sample_variance(&totals, mean_total);
    let std_total = var_total.unwrap_or_else(T::zero).sqrt();
    // Delta method on s^2 = mean((X - mean)^2); se(s) = se(s^2) / (2 s).
    let se_std_total = var_total.and_then(|_| {
        let dev: Vec<T> = totals.iter().map(|&x| (x - mean_total) * (x - mean_total)).collect();
        std_error(&dev).map(|se_var| half_ratio(se_var, std_total))
    });

    let mean_typical = mean(&typical);
    let mean_sq = mean(&squares);
    let var_typical = (mean_sq - mean_typical * mean_typical).max(T::zero());
    let std_typical = var_typical.sqrt();
    // Influence of each trial on mean(A) - mean(B)^2 is A_t - 2 mean(B) B_t.
    let se_std_typical = if summaries.len() < 2 {
        None
    } else {
        let two_b = T::lit(2.0) * mean_typical;
        let z: Vec<T> = squares.iter().zip(&typical).map(|(&a, &b)| a - two_b * b).collect();
        std_error(&z).map(|se_var| half_ratio(se_var, std_typical))
    };

    let mut counts = vec![0u64; scenario.station_count()];
    for s in &summaries {
        for (c, k) in counts.iter_mut().zip(&s.counts) {
            *c += k;
        }
    }
    let all = T::from_count(cfg.m * cfg.trials);
    Ok(McEstimates {
        trials: cfg.trials,
        mean_total,
        std_total,
        mean_typical,
        std_typical,
        mean_fairness: mean(&fairness),
        se_mean_total: std_error(&totals),
        se_std_total,
        se_mean_typical: std_error(&typical),
        se_std_typical,
        se_mean_fairness: std_error(&fairness),
        p_hat: counts.iter().map(|&c| T::from_count(c) / all).collect(),
    })
}

fn half_ratio<T: Real>(se_var: T, std: T) -> T {
    if std > T::zero() {
        se_var / (T::lit(2.0) * std)
    } else {
        se_var.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{controls_from_reparam, ReparamControl};

    fn scenario_i() -> Scenario<f64> {
        Scenario::two_station_line(5.0, 5.0, 0.1, 3.0, 2001).unwrap()
    }

    #[test]
    fn sampling_is_uniform_and_avoids_deadzones() {
        let s = Scenario::two_station_line(5.0, 5.0, 0.0, 3.0, 101).unwrap();
        let mut rng = trial_rng(7, 0);
        let n = 1_000_000;
        let users = sample_users(&s, n, &mut rng);
        let mean = users.iter().map(|p| p.x).sum::<f64>() / n as f64;
        let sd = 10.0 / 12f64.sqrt();
        assert!(mean.abs() < 4.0 * sd / (n as f64).sqrt(), "{mean}");

        let s = scenario_i();
        let users = sample_users(&s, 10_000, &mut rng);
        assert!(users.iter().all(|p| !s.in_deadzone(p) && p.x.abs() <= 5.0));
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let s = scenario_i();
        let a = sample_users(&s, 100, &mut trial_rng(3, 9));
        let b = sample_users(&s, 100, &mut trial_rng(3, 9));
        let c = sample_users(&s, 100, &mut trial_rng(3, 10));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn single_user_gets_full_rate() {
        let s = scenario_i();
        let c = controls_from_reparam(&s, ReparamControl::new(0.5, 0.0).unwrap()).unwrap();
        let u = [Point::on_line(2.0)];
        let out = simulate_trial(&s, &c, &u).unwrap();
        let sinr = crate::partition::sinr_at(&s, &c, 1, &u[0]).unwrap();
        assert_eq!(out.assignment, vec![1]);
        assert_eq!(out.per_user[0], shannon_rate(sinr));
        assert_eq!(out.fairness, 1.0);
    }

    #[test]
    fn colocated_users_share_the_rate() {
        let s = scenario_i();
        let c = ControlPoint::uniform(2);
        let one = simulate_trial(&s, &c, &[Point::on_line(-2.5)]).unwrap();
        let two = simulate_trial(&s, &c, &[Point::on_line(-2.5), Point::on_line(-2.5)]).unwrap();
        assert_eq!(two.per_user[0], one.per_user[0] / 2.0);
        assert_eq!(two.total, one.total);
    }

    #[test]
    fn single_trial_has_no_standard_errors() {
        let s = scenario_i();
        let est = estimate(&s, &ControlPoint::uniform(2), &McConfig::new(5, 1, 1).unwrap()).unwrap();
        assert!(est.se_mean_total.is_none() && est.se_std_total.is_none());
        assert!(est.se_std_typical.is_none() && est.se_mean_fairness.is_none());
        assert!((est.p_hat.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn typical_mean_is_total_mean_over_m() {
        let s = scenario_i();
        let cfg = McConfig::new(20, 500, 11).unwrap();
        let est = estimate(&s, &ControlPoint::uniform(2), &cfg).unwrap();
        assert!((est.mean_typical - est.mean_total / 20.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(McConfig::new(0, 10, 1).is_err());
        assert!(McConfig::new(10, 0, 1).is_err());
    }
}
