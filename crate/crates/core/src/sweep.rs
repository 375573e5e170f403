//! Control-grid sweeps: per-control cell statistics, the three tradeoff
//! bullets, and their Pareto-efficient frontiers.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::{
    asymptotic_fairness, asymptotic_mean_total_se, mean_total_se, mean_typical_se, std_total_se, std_typical_se,
};
use crate::model::{controls_from_reparam, ReparamControl, Scenario};
use crate::occupancy::InverseOccupancy;
use crate::partition::{CellStats, GainField};
use crate::scalar::Real;

/// Which controls a grid varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControlMode {
    Joint,
    /// Power varies; biases fixed at one.
    PowerOnly,
    /// Bias varies; powers fixed at one.
    BiasOnly,
}

impl ControlMode {
    pub const ALL: [ControlMode; 3] = [ControlMode::Joint, ControlMode::PowerOnly, ControlMode::BiasOnly];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Joint => "joint",
            Self::PowerOnly => "power",
            Self::BiasOnly => "bias",
        }
    }
}

/// Rectangular grid of `(tau, beta)` controls.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlGrid<T> {
    tau_values: Vec<T>,
    beta_values: Vec<T>,
    mode: ControlMode,
}

/// `count` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let span = hi - lo;
            let last = T::from_count(count as u64 - 1);
            (0..count)
                .map(|k| {
                    if k + 1 == count {
                        hi
                    } else {
                        lo + span * T::from_count(k as u64) / last
                    }
                })
                .collect()
        }
    }
}

fn check_axis<T: Real>(values: &[T], name: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidGrid(format!("{name} values are empty")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid(format!("{name} values must be finite")));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid(format!("{name} values must be strictly increasing")));
    }
    Ok(())
}

impl<T: Real> ControlGrid<T> {
    pub fn joint(tau_values: Vec<T>, beta_values: Vec<T>) -> Result<Self> {
        check_axis(&tau_values, "tau")?;
        check_axis(&beta_values, "beta")?;
        Ok(Self { tau_values, beta_values, mode: ControlMode::Joint })
    }

    pub fn power_only(tau_values: Vec<T>) -> Result<Self> {
        check_axis(&tau_values, "tau")?;
        Ok(Self { tau_values, beta_values: vec![T::zero()], mode: ControlMode::PowerOnly })
    }

    pub fn bias_only(beta_values: Vec<T>) -> Result<Self> {
        check_axis(&beta_values, "beta")?;
        Ok(Self { tau_values: vec![T::zero()], beta_values, mode: ControlMode::BiasOnly })
    }

    /// Builds a grid of the given mode, taking the varied axis from `tau_values`
    /// or `beta_values` as appropriate.
    pub fn with_mode(mode: ControlMode, tau_values: Vec<T>, beta_values: Vec<T>) -> Result<Self> {
        match mode {
            ControlMode::Joint => Self::joint(tau_values, beta_values),
            ControlMode::PowerOnly => Self::power_only(tau_values),
            ControlMode::BiasOnly => Self::bias_only(beta_values),
        }
    }

    pub fn tau_values(&self) -> &[T] {
        &self.tau_values
    }

    pub fn beta_values(&self) -> &[T] {
        &self.beta_values
    }

    pub fn mode(&self) -> ControlMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.tau_values.len() * self.beta_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Controls in tau-major order.
    pub fn controls(&self) -> impl Iterator<Item = ReparamControl<T>> + '_ {
        self.tau_values
            .iter()
            .flat_map(move |&tau| self.beta_values.iter().map(move |&beta| ReparamControl { tau, beta }))
    }

    /// True when every control of `other` is also a control of `self`.
    pub fn contains_grid(&self, other: &Self) -> bool {
        other.tau_values.iter().all(|t| self.tau_values.contains(t))
            && other.beta_values.iter().all(|b| self.beta_values.contains(b))
    }
}

/// Cell statistics for every control of a grid, computed once and reused for any `m`.
#[derive(Debug, Clone)]
pub struct StatsMap<T> {
    mode: ControlMode,
    entries: Vec<(ReparamControl<T>, CellStats<T>)>,
}

impl<T: Real> StatsMap<T> {
    pub fn mode(&self) -> ControlMode {
        self.mode
    }

    pub fn entries(&self) -> &[(ReparamControl<T>, CellStats<T>)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, control: &ReparamControl<T>) -> Option<&CellStats<T>> {
        self.entries.iter().find(|(c, _)| c == control).map(|(_, s)| s)
    }
}

/// Evaluates the partition and cell statistics at every grid control.
pub fn precompute_stats_map<T: Real>(scenario: &Scenario<T>, grid: &ControlGrid<T>) -> Result<StatsMap<T>> {
    let field = GainField::new(scenario);
    precompute_with_field(scenario, &field, grid)
}

/// As [`precompute_stats_map`], reusing a pathloss field built for `scenario`.
pub fn precompute_with_field<T: Real>(
    scenario: &Scenario<T>,
    field: &GainField<T>,
    grid: &ControlGrid<T>,
) -> Result<StatsMap<T>> {
    let controls: Vec<ReparamControl<T>> = grid.controls().collect();
    let entries = controls
        .into_par_iter()
        .map(|rc| {
            let control = controls_from_reparam(scenario, rc)?;
            Ok((rc, field.cell_stats(&control)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StatsMap { mode: grid.mode, entries })
}

/// The three tradeoffs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TradeoffKind {
    /// Standard deviation vs mean of total SE at `m` users.
    MTotal,
    /// Standard deviation vs mean of typical-user SE at `m` users.
    MTypical,
    /// Asymptotic fairness vs asymptotic mean total SE.
    Fairness,
}

impl TradeoffKind {
    pub const ALL: [TradeoffKind; 3] = [TradeoffKind::MTotal, TradeoffKind::MTypical, TradeoffKind::Fairness];

    pub fn name(&self) -> &'static str {
        match self {
            Self::MTotal => "M_total",
            Self::MTypical => "M_typical",
            Self::Fairness => "F",
        }
    }

    /// Whether a larger horizontal coordinate is preferred.
    pub fn maximizes_x(&self) -> bool {
        matches!(self, Self::Fairness)
    }

    /// True when `a` beats `b` strictly on both axes.
    pub fn dominates<T: Real>(&self, a: &BulletPoint<T>, b: &BulletPoint<T>) -> bool {
        let better_x = if self.maximizes_x() { a.x > b.x } else { a.x < b.x };
        better_x && a.y > b.y
    }

    /// True when `a` is at least as good as `b` on both axes.
    pub fn weakly_dominates<T: Real>(&self, a: &BulletPoint<T>, b: &BulletPoint<T>) -> bool {
        let x_ok = if self.maximizes_x() { a.x >= b.x } else { a.x <= b.x };
        x_ok && a.y >= b.y
    }
}

/// An achievable metric pair and the control that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct BulletPoint<T> {
    pub control: ReparamControl<T>,
    pub x: T,
    pub y: T,
    pub stats: CellStats<T>,
}

/// Maps every stored control to its `(x, y)` pair for `kind`. `m` is ignored
/// for [`TradeoffKind::Fairness`].
pub fn build_bullet<T: Real>(
    map: &StatsMap<T>,
    m: u64,
    kind: TradeoffKind,
    mode: InverseOccupancy,
) -> Result<Vec<BulletPoint<T>>> {
    if m == 0 && kind != TradeoffKind::Fairness {
        return Err(Error::InvalidProbability("user count m must be at least 1".into()));
    }
    map.entries
        .par_iter()
        .map(|(control, stats)| {
            let (x, y) = match kind {
                TradeoffKind::MTotal => (std_total_se(stats, m, mode)?, mean_total_se(stats, m)),
                TradeoffKind::MTypical => (std_typical_se(stats, m, mode)?, mean_typical_se(stats, m)),
                TradeoffKind::Fairness => (asymptotic_fairness(stats)?, asymptotic_mean_total_se(stats)),
            };
            if !(x.is_finite() && y.is_finite()) {
                return Err(Error::InvalidStats(format!("non-finite metric at tau={}, beta={}", control.tau, control.beta)));
            }
            Ok(BulletPoint { control: *control, x, y, stats: stats.clone() })
        })
        .collect()
}

/// Non-dominated subset of a bullet.
#[derive(Debug, Clone, PartialEq)]
pub struct Frontier<T> {
    pub kind: TradeoffKind,
    /// Sorted by `x`, then `y`, then control.
    pub points: Vec<BulletPoint<T>>,
    pub efficient_controls: Vec<ReparamControl<T>>,
}

fn point_order<T: Real>(a: &BulletPoint<T>, b: &BulletPoint<T>) -> Ordering {
    let key = |p: &BulletPoint<T>| [p.x, p.y, p.control.tau, p.control.beta].map(|v| v.to_f64_lossy());
    let (ka, kb) = (key(a), key(b));
    ka.iter()
        .zip(&kb)
        .map(|(u, v)| u.total_cmp(v))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Extracts the points no rival beats strictly on both axes.
///
/// Sorts by preference on `x`, then sweeps groups of equal `x` while tracking
/// the best `y` among strictly preferred groups.
pub fn pareto_frontier<T: Real>(points: &[BulletPoint<T>], kind: TradeoffKind) -> Result<Frontier<T>> {
    if points.is_empty() {
        return Err(Error::Empty("frontier of an empty bullet"));
    }
    let mut sorted: Vec<&BulletPoint<T>> = points.iter().collect();
    sorted.sort_by(|a, b| {
        let o = point_order(a, b);
        if kind.maximizes_x() {
            o.reverse()
        } else {
            o
        }
    });
    let mut kept = Vec::new();
    let mut best_y = T::neg_infinity();
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end].x == sorted[start].x {
            end += 1;
        }
        let group = &sorted[start..end];
        kept.extend(group.iter().filter(|p| !(best_y > p.y)).map(|p| (*p).clone()));
        for p in group {
            best_y = best_y.max(p.y);
        }
        start = end;
    }
    kept.sort_by(point_order);
    let efficient_controls = kept.iter().map(|p| p.control).collect();
    Ok(Frontier { kind, points: kept, efficient_controls })
}

/// Quadratic pairwise-dominance frontier; the reference for [`pareto_frontier`].
pub fn pareto_frontier_pairwise<T: Real>(points: &[BulletPoint<T>], kind: TradeoffKind) -> Vec<BulletPoint<T>> {
    let mut kept: Vec<BulletPoint<T>> = points
        .iter()
        .filter(|p| !points.iter().any(|q| kind.dominates(q, p)))
        .cloned()
        .collect();
    kept.sort_by(point_order);
    kept
}

/// How far a joint-control frontier sits beyond a unilateral one.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport<T> {
    pub kind: TradeoffKind,
    /// Every unilateral frontier point is weakly dominated by some joint frontier point.
    pub all_weakly_dominated: bool,
    /// Unilateral frontier points that no joint frontier point weakly dominates.
    pub violations: Vec<ReparamControl<T>>,
    /// Unilateral frontier points strictly dominated on both axes.
    pub strictly_dominated: usize,
    /// Largest improvement in the horizontal metric over any unilateral point.
    pub max_gap_x: T,
    /// Largest improvement in the vertical metric over any unilateral point.
    pub max_gap_y: T,
}

/// Compares a unilateral frontier against the joint frontier of the same
/// scenario and `m`. Every unilateral frontier control must appear in the
/// joint bullet.
pub fn dominance_check<T: Real>(
    joint: &Frontier<T>,
    joint_bullet: &[BulletPoint<T>],
    unilateral: &Frontier<T>,
) -> Result<DominanceReport<T>> {
    if joint.kind != unilateral.kind {
        return Err(Error::NotSubset("frontiers are of different kinds".into()));
    }
    let kind = joint.kind;
    for u in &unilateral.points {
        if !joint_bullet.iter().any(|j| j.control == u.control) {
            return Err(Error::NotSubset(format!(
                "control tau={}, beta={} is missing from the joint grid",
                u.control.tau, u.control.beta
            )));
        }
    }
    let mut violations = Vec::new();
    let mut strictly = 0;
    let mut gap_x = T::zero();
    let mut gap_y = T::zero();
    for u in &unilateral.points {
        let mut covered = false;
        let mut strict = false;
        for j in &joint.points {
            if kind.weakly_dominates(j, u) {
                covered = true;
                strict |= kind.dominates(j, u);
                let dx = if kind.maximizes_x() { j.x - u.x } else { u.x - j.x };
                gap_x = gap_x.max(dx);
                gap_y = gap_y.max(j.y - u.y);
            }
        }
        if !covered {
            violations.push(u.control);
        }
        if strict {
            strictly += 1;
        }
    }
    Ok(DominanceReport {
        kind,
        all_weakly_dominated: violations.is_empty(),
        violations,
        strictly_dominated: strictly,
        max_gap_x: gap_x,
        max_gap_y: gap_y,
    })
}

/// Labels `a`..`i` for the nine extreme controls of a joint grid: `tau` in
/// {min, middle, max} outer, `beta` in {min, middle, max} inner.
pub fn extreme_labels<T: Real>(grid: &ControlGrid<T>) -> Vec<(ReparamControl<T>, char)> {
    let picks = |v: &[T]| [v[0], v[v.len() / 2], v[v.len() - 1]];
    let taus = picks(&grid.tau_values);
    let betas = picks(&grid.beta_values);
    let mut out: Vec<(ReparamControl<T>, char)> = Vec::with_capacity(9);
    let mut label = b'a';
    for &tau in &taus {
        for &beta in &betas {
            let rc = ReparamControl { tau, beta };
            if !out.iter().any(|(c, _)| *c == rc) {
                out.push((rc, label as char));
            }
            label += 1;
        }
    }
    out
}
