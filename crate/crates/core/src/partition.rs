//! SINR evaluation, biased-SINR cell partitions on a midpoint grid, the
//! per-cell rate moments they induce, and the closed-form boundary of the
//! two-station line.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ArenaShape, ControlPoint, Point, Scenario};
use crate::scalar::{CompensatedSum, Real};

/// SINR of `station` at `point`: own received power over interference plus noise.
pub fn sinr_at<T: Real>(scenario: &Scenario<T>, control: &ControlPoint<T>, station: usize, point: &Point<T>) -> Result<T> {
    control.check_for(scenario)?;
    let n = scenario.station_count();
    if station >= n {
        return Err(Error::StationOutOfRange { index: station, count: n });
    }
    if scenario.in_deadzone(point) {
        return Err(Error::InsideDeadzone { x: point.x.to_f64_lossy(), y: point.y.to_f64_lossy() });
    }
    let gains = station_gains(scenario, point);
    Ok(sinr_from_gains(&gains, control.powers(), scenario.noise(), station))
}

/// Pathloss `d^-alpha` from every station to `point`.
pub(crate) fn station_gains<T: Real>(scenario: &Scenario<T>, point: &Point<T>) -> Vec<T> {
    let alpha = scenario.alpha();
    scenario
        .stations()
        .iter()
        .map(|bs| bs.location.distance(point).powf(-alpha))
        .collect()
}

fn sinr_from_gains<T: Real>(gains: &[T], powers: &[T], noise: T, station: usize) -> T {
    let mut interference = noise;
    for (j, (&g, &t)) in gains.iter().zip(powers).enumerate() {
        if j != station {
            interference = interference + t * g;
        }
    }
    powers[station] * gains[station] / interference
}

/// Serving station (largest biased SINR, lowest index on ties) and its SINR.
pub(crate) fn associate<T: Real>(gains: &[T], powers: &[T], biases: &[T], noise: T) -> (usize, T) {
    let mut best = 0;
    let mut best_sinr = sinr_from_gains(gains, powers, noise, 0);
    let mut best_score = biases[0] * best_sinr;
    for i in 1..gains.len() {
        let sinr = sinr_from_gains(gains, powers, noise, i);
        let score = biases[i] * sinr;
        if score > best_score {
            best = i;
            best_sinr = sinr;
            best_score = score;
        }
    }
    (best, best_sinr)
}

/// Instantaneous rate `log2(1 + sinr)` in bps/Hz.
pub fn shannon_rate<T: Real>(sinr: T) -> T {
    sinr.ln_1p() / T::LN_2()
}

/// Uniform midpoint grid over the arena: one sample per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid<T> {
    points: Vec<Point<T>>,
    nx: usize,
    ny: usize,
    cell_measure: T,
}

impl<T: Real> QuadratureGrid<T> {
    pub fn for_scenario(scenario: &Scenario<T>) -> Self {
        let arena = scenario.arena();
        let n = arena.resolution;
        let (x0, x1, y0, y1) = arena.bounds();
        let xs = midpoints(x0, x1, n);
        match arena.shape {
            ArenaShape::Interval { .. } => Self {
                points: xs.iter().map(|&x| Point::on_line(x)).collect(),
                nx: n,
                ny: 1,
                cell_measure: (x1 - x0) / T::from_count(n as u64),
            },
            ArenaShape::Rectangle { .. } => {
                let ys = midpoints(y0, y1, n);
                let mut points = Vec::with_capacity(n * n);
                for &y in &ys {
                    for &x in &xs {
                        points.push(Point::new(x, y));
                    }
                }
                let nn = T::from_count(n as u64);
                Self { points, nx: n, ny: n, cell_measure: (x1 - x0) / nn * ((y1 - y0) / nn) }
            }
        }
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    /// Grid shape as `(points along x, points along y)`; `ny == 1` for intervals.
    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Length or area represented by each sample.
    pub fn cell_measure(&self) -> T {
        self.cell_measure
    }

    /// Length of one grid step along `x`.
    pub fn step(&self) -> T {
        if self.points.len() < 2 {
            return T::zero();
        }
        self.points[1].x - self.points[0].x
    }
}

/// Cell midpoints of `[lo, hi]` split into `n` cells. Written as an offset from
/// the centre with an integer numerator, so mirrored indices give exactly
/// mirrored coordinates on a symmetric range.
fn midpoints<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let half_width = (hi - lo) / T::lit(2.0);
    let centre = (lo + hi) / T::lit(2.0);
    let nn = T::from_count(n as u64);
    (0..n)
        .map(|k| {
            let offset = T::from_i64(2 * k as i64 + 1 - n as i64).expect("index fits");
            centre + offset * half_width / nn
        })
        .collect()
}

/// Pathloss from every station to every grid point outside the deadzones.
///
/// Depends only on the scenario, so one field serves every control point.
#[derive(Debug, Clone)]
pub struct GainField<T> {
    grid: Arc<QuadratureGrid<T>>,
    /// Grid index of each active (non-deadzone) sample.
    active: Vec<usize>,
    /// Row-major `active.len() x n` pathloss table.
    gains: Vec<T>,
    stations: usize,
    noise: T,
}

impl<T: Real> GainField<T> {
    pub fn new(scenario: &Scenario<T>) -> Self {
        let grid = QuadratureGrid::for_scenario(scenario);
        let n = scenario.station_count();
        let active: Vec<usize> = grid
            .points
            .iter()
            .enumerate()
            .filter(|(_, p)| !scenario.in_deadzone(p))
            .map(|(i, _)| i)
            .collect();
        let gains: Vec<T> = active
            .par_iter()
            .flat_map_iter(|&i| station_gains(scenario, &grid.points[i]))
            .collect();
        Self { grid: Arc::new(grid), active, gains, stations: n, noise: scenario.noise() }
    }

    pub fn grid(&self) -> &QuadratureGrid<T> {
        &self.grid
    }

    /// Number of grid samples outside every deadzone.
    pub fn active_count(&self) -> usize {
        self.active.len()
    }

    fn evaluate(&self, control: &ControlPoint<T>) -> Result<Vec<(usize, T)>> {
        if control.len() != self.stations {
            return Err(Error::InvalidControl(format!(
                "control has {} entries but the scenario has {} stations",
                control.len(),
                self.stations
            )));
        }
        let (powers, biases) = (control.powers(), control.biases());
        Ok(self
            .gains
            .par_chunks(self.stations)
            .map(|g| associate(g, powers, biases, self.noise))
            .collect())
    }

    pub fn partition(&self, control: &ControlPoint<T>) -> Result<CellPartition<T>> {
        let evaluated = self.evaluate(control)?;
        let mut assignment = vec![None; self.grid.points.len()];
        let mut counts = vec![0u64; self.stations];
        for (&idx, &(owner, _)) in self.active.iter().zip(&evaluated) {
            assignment[idx] = Some(owner);
            counts[owner] += 1;
        }
        let h = self.grid.cell_measure;
        Ok(CellPartition {
            grid: Arc::clone(&self.grid),
            assignment,
            cell_measures: counts.iter().map(|&c| T::from_count(c) * h).collect(),
            arena_measure: T::from_count(self.active.len() as u64) * h,
        })
    }

    /// Partition and rate moments in a single pass over the grid.
    pub fn cell_stats(&self, control: &ControlPoint<T>) -> Result<CellStats<T>> {
        let evaluated = self.evaluate(control)?;
        Ok(accumulate_stats(self.stations, self.active.len(), evaluated.into_iter()))
    }
}

fn accumulate_stats<T: Real>(n: usize, total: usize, samples: impl Iterator<Item = (usize, T)>) -> CellStats<T> {
    let mut counts = vec![0u64; n];
    let mut first = vec![CompensatedSum::new(); n];
    let mut second = vec![CompensatedSum::new(); n];
    for (owner, sinr) in samples {
        let r = shannon_rate(sinr);
        counts[owner] += 1;
        first[owner].add(r);
        second[owner].add(r * r);
    }
    let total = T::from_count(total as u64);
    let mut p = Vec::with_capacity(n);
    let mut psi1 = Vec::with_capacity(n);
    let mut psi2 = Vec::with_capacity(n);
    for i in 0..n {
        if counts[i] == 0 {
            p.push(T::zero());
            psi1.push(T::zero());
            psi2.push(T::zero());
        } else {
            let c = T::from_count(counts[i]);
            p.push(c / total);
            let m1 = first[i].value() / c;
            psi1.push(m1);
            // Jensen holds exactly in the limit; clip the last-ulp rounding.
            psi2.push((second[i].value() / c).max(m1 * m1));
        }
    }
    CellStats { p, psi1, psi2 }
}

/// Grid assignment of every sample to its serving station.
#[derive(Debug, Clone)]
pub struct CellPartition<T> {
    grid: Arc<QuadratureGrid<T>>,
    assignment: Vec<Option<usize>>,
    cell_measures: Vec<T>,
    arena_measure: T,
}

impl<T: Real> CellPartition<T> {
    pub fn grid(&self) -> &QuadratureGrid<T> {
        &self.grid
    }

    /// Serving station per grid point; `None` inside a deadzone.
    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    pub fn cell_measures(&self) -> &[T] {
        &self.cell_measures
    }

    /// Arena measure with deadzones removed.
    pub fn arena_measure(&self) -> T {
        self.arena_measure
    }

    /// `(point, owner)` pairs in grid order.
    pub fn iter(&self) -> impl Iterator<Item = (&Point<T>, Option<usize>)> {
        self.grid.points.iter().zip(self.assignment.iter().copied())
    }
}

/// Assigns every grid point outside the deadzones to the station with the
/// largest biased SINR.
pub fn compute_partition<T: Real>(scenario: &Scenario<T>, control: &ControlPoint<T>) -> Result<CellPartition<T>> {
    control.check_for(scenario)?;
    GainField::new(scenario).partition(control)
}

/// Association probabilities and the first two rate moments of every cell,
/// by midpoint quadrature on the partition's grid.
pub fn compute_cell_stats<T: Real>(
    scenario: &Scenario<T>,
    control: &ControlPoint<T>,
    partition: &CellPartition<T>,
) -> Result<CellStats<T>> {
    control.check_for(scenario)?;
    if *partition.grid != QuadratureGrid::for_scenario(scenario) {
        return Err(Error::InvalidStats("partition was computed on a different grid".into()));
    }
    let n = scenario.station_count();
    let samples: Vec<(usize, T)> = partition
        .iter()
        .filter_map(|(p, owner)| owner.map(|o| (p, o)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(p, o)| {
            let g = station_gains(scenario, p);
            (o, sinr_from_gains(&g, control.powers(), scenario.noise(), o))
        })
        .collect();
    let total = samples.len();
    Ok(accumulate_stats(n, total, samples.into_iter()))
}

/// Per-cell association probabilities and rate moments.
#[derive(Debug, Clone, PartialEq)]
pub struct CellStats<T> {
    p: Vec<T>,
    psi1: Vec<T>,
    psi2: Vec<T>,
}

impl<T: Real> CellStats<T> {
    /// Builds externally supplied statistics, checking that `p` is a
    /// probability vector, moments are nonnegative, `psi2 >= psi1^2`, and
    /// empty cells carry zero moments.
    pub fn new(p: Vec<T>, psi1: Vec<T>, psi2: Vec<T>) -> Result<Self> {
        let n = p.len();
        if n == 0 || psi1.len() != n || psi2.len() != n {
            return Err(Error::InvalidStats("p, psi and psi2 must have equal nonzero length".into()));
        }
        let tol = T::epsilon() * T::lit(64.0) * T::from_count(n as u64);
        let mut total = CompensatedSum::new();
        for i in 0..n {
            let (pi, m1, m2) = (p[i], psi1[i], psi2[i]);
            if !(pi.is_finite() && m1.is_finite() && m2.is_finite()) {
                return Err(Error::InvalidStats(format!("cell {i} has a non-finite entry")));
            }
            if pi < T::zero() || pi > T::one() || m1 < T::zero() || m2 < T::zero() {
                return Err(Error::InvalidStats(format!("cell {i} has an entry out of range")));
            }
            if m2 < m1 * m1 * (T::one() - tol) {
                return Err(Error::InvalidStats(format!("cell {i} violates psi2 >= psi^2")));
            }
            if pi == T::zero() && (m1 != T::zero() || m2 != T::zero()) {
                return Err(Error::InvalidStats(format!("empty cell {i} carries nonzero moments")));
            }
            total.add(pi);
        }
        if (total.value() - T::one()).abs() > tol {
            return Err(Error::InvalidStats(format!("p sums to {}, not 1", total.value())));
        }
        Ok(Self { p, psi1, psi2 })
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Association probabilities.
    pub fn p(&self) -> &[T] {
        &self.p
    }

    /// Mean instantaneous rate per cell (bps/Hz).
    pub fn psi1(&self) -> &[T] {
        &self.psi1
    }

    /// Second moment of the instantaneous rate per cell ((bps/Hz)^2).
    pub fn psi2(&self) -> &[T] {
        &self.psi2
    }

    /// Statistics with cells permuted: entry `i` of the result is entry `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            p: order.iter().map(|&i| self.p[i]).collect(),
            psi1: order.iter().map(|&i| self.psi1[i]).collect(),
            psi2: order.iter().map(|&i| self.psi2[i]).collect(),
        }
    }
}

/// Which of the five boundary topologies the two-station line is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCase {
    /// Station 1's cell is the interior interval `(y-, y+)`.
    Station1Interior,
    /// Station 1's cell is `(-left, y+)`.
    Station1LeftSegment,
    /// Equal effective strength: the boundary is the midpoint.
    Midpoint,
    /// Station 2's cell is `(y-, right)`.
    Station2RightSegment,
    /// Station 2's cell is the interior interval `(y-, y+)`.
    Station2Interior,
}

impl BoundaryCase {
    /// Lower-case roman label `i` .. `v`.
    pub fn label(&self) -> &'static str {
        match self {
            Self::Station1Interior => "i",
            Self::Station1LeftSegment => "ii",
            Self::Midpoint => "iii",
            Self::Station2RightSegment => "iv",
            Self::Station2Interior => "v",
        }
    }
}

/// Closed-form cell boundary of the noise-free two-station line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBsBoundary<T> {
    /// `(2 tau + beta) / alpha`.
    pub sigma: T,
    /// `(e^sigma + 1) / (e^sigma - 1)`; absent at `sigma = 0`.
    pub gamma: Option<T>,
    pub y_minus: Option<T>,
    pub y_plus: Option<T>,
    pub case: BoundaryCase,
}

/// Value of `sigma` at which a boundary root reaches an arena edge at distance `delta`.
pub fn edge_threshold<T: Real>(delta: T) -> T {
    T::lit(2.0) * ((delta + T::one()) / (delta - T::one())).ln()
}

/// Cell boundary of the two-station line on `[-d1, +d2]` for log power ratio
/// `tau`, log bias ratio `beta`, and pathloss exponent `alpha`.
pub fn two_bs_boundary<T: Real>(tau: T, beta: T, alpha: T, d1: T, d2: T) -> TwoBsBoundary<T> {
    debug_assert!(alpha >= T::one() && d1 > T::one() && d2 > T::one());
    let sigma = (T::lit(2.0) * tau + beta) / alpha;
    if sigma == T::zero() {
        return TwoBsBoundary { sigma, gamma: None, y_minus: None, y_plus: None, case: BoundaryCase::Midpoint };
    }
    let two = T::lit(2.0);
    // gamma - 1 = 2 / (e^sigma - 1) keeps precision when |gamma| is near 1.
    let gamma_minus_one = two / sigma.exp_m1();
    let gamma = T::one() + gamma_minus_one;
    let root = (gamma_minus_one * (gamma_minus_one + two)).sqrt();
    // The roots multiply to one; take the large-magnitude one directly and
    // invert it for the other.
    let (y_minus, y_plus) = if sigma > T::zero() {
        let y_plus = gamma + root;
        (y_plus.recip(), y_plus)
    } else {
        let y_minus = gamma - root;
        (y_minus, y_minus.recip())
    };
    let case = if sigma < -edge_threshold(d1) {
        BoundaryCase::Station1Interior
    } else if sigma < T::zero() {
        BoundaryCase::Station1LeftSegment
    } else if sigma <= edge_threshold(d2) {
        BoundaryCase::Station2RightSegment
    } else {
        BoundaryCase::Station2Interior
    };
    TwoBsBoundary { sigma, gamma: Some(gamma), y_minus: Some(y_minus), y_plus: Some(y_plus), case }
}

/// Cell lengths `(|C1|, |C2|)` on `[-d1, +d2]`; they always sum to `d1 + d2`.
pub fn two_bs_cell_lengths<T: Real>(b: &TwoBsBoundary<T>, d1: T, d2: T) -> (T, T) {
    let total = d1 + d2;
    let ym = b.y_minus.unwrap_or_else(T::zero);
    let yp = b.y_plus.unwrap_or_else(T::zero);
    match b.case {
        BoundaryCase::Station1Interior => (yp - ym, total - (yp - ym)),
        BoundaryCase::Station1LeftSegment => (yp + d1, d2 - yp),
        BoundaryCase::Midpoint => (d1, d2),
        BoundaryCase::Station2RightSegment => (ym + d1, d2 - ym),
        BoundaryCase::Station2Interior => (total - (yp - ym), yp - ym),
    }
}

/// The open intervals making up `(C1, C2)` on `[-d1, +d2]`.
pub fn two_bs_cells<T: Real>(b: &TwoBsBoundary<T>, d1: T, d2: T) -> (Vec<(T, T)>, Vec<(T, T)>) {
    let (lo, hi) = (-d1, d2);
    let ym = b.y_minus.unwrap_or_else(T::zero);
    let yp = b.y_plus.unwrap_or_else(T::zero);
    match b.case {
        BoundaryCase::Station1Interior => (vec![(ym, yp)], vec![(lo, ym), (yp, hi)]),
        BoundaryCase::Station1LeftSegment => (vec![(lo, yp)], vec![(yp, hi)]),
        BoundaryCase::Midpoint => (vec![(lo, T::zero())], vec![(T::zero(), hi)]),
        BoundaryCase::Station2RightSegment => (vec![(lo, ym)], vec![(ym, hi)]),
        BoundaryCase::Station2Interior => (vec![(lo, ym), (yp, hi)], vec![(ym, yp)]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{controls_from_reparam, Arena, BaseStation, ReparamControl, ScenarioSpec};

    fn scenario_i() -> Scenario<f64> {
        Scenario::two_station_line(5.0, 5.0, 0.1, 3.0, 2001).unwrap()
    }

    fn control(s: &Scenario<f64>, tau: f64, beta: f64) -> ControlPoint<f64> {
        controls_from_reparam(s, ReparamControl::new(tau, beta).unwrap()).unwrap()
    }

    #[test]
    fn sir_is_one_at_midpoint_for_equal_powers() {
        let s = scenario_i();
        let c = control(&s, 0.0, 0.0);
        for k in 0..2 {
            assert_eq!(sinr_at(&s, &c, k, &Point::on_line(0.0)).unwrap(), 1.0);
        }
    }

    #[test]
    fn sir_matches_closed_form_on_the_line() {
        let s = scenario_i();
        let tau = 0.7;
        let c = control(&s, tau, 0.0);
        for &y in &[-4.2, -0.5, 0.3, 2.5, 4.9] {
            let expected = tau.exp() * ((y - 1.0f64).abs() / (y + 1.0f64).abs()).powf(3.0);
            let got = sinr_at(&s, &c, 0, &Point::on_line(y)).unwrap();
            assert!((got - expected).abs() <= 1e-13 * expected.max(1.0), "{y}: {got} vs {expected}");
        }
    }

    #[test]
    fn single_station_sinr_is_snr() {
        let spec = ScenarioSpec {
            arena: Arena::interval(5.0, 5.0, 101),
            stations: vec![BaseStation::new(Point::on_line(0.0))],
            alpha: 2.0,
            deadzone: 0.1,
            noise: 0.25,
        };
        let s = spec.validate().unwrap();
        let c = ControlPoint::new(vec![3.0f64], vec![1.0]).unwrap();
        let got = sinr_at(&s, &c, 0, &Point::on_line(2.0)).unwrap();
        assert!((got - 3.0 * 0.25 / 0.25).abs() < 1e-14);
    }

    #[test]
    fn sinr_rejects_deadzone_and_bad_index() {
        let s = scenario_i();
        let c = control(&s, 0.0, 0.0);
        assert!(matches!(sinr_at(&s, &c, 0, &Point::on_line(-1.05)), Err(Error::InsideDeadzone { .. })));
        assert!(matches!(sinr_at(&s, &c, 2, &Point::on_line(0.0)), Err(Error::StationOutOfRange { .. })));
    }

    #[test]
    fn grid_midpoints_are_mirror_symmetric() {
        let s = scenario_i();
        let grid = QuadratureGrid::for_scenario(&s);
        let pts = grid.points();
        for k in 0..pts.len() {
            assert_eq!(pts[k].x, -pts[pts.len() - 1 - k].x);
        }
        assert_eq!(pts[1000].x, 0.0);
    }

    #[test]
    fn symmetric_partition_splits_evenly() {
        let s = scenario_i();
        let c = control(&s, 0.0, 0.0);
        let part = compute_partition(&s, &c).unwrap();
        let h = part.grid().cell_measure();
        let m = part.cell_measures();
        // The midpoint sample ties and goes to the lower index.
        assert!((m[0] - m[1]).abs() <= h * 1.000001);
        let total: f64 = m.iter().sum();
        assert!((total - part.arena_measure()).abs() < 1e-12);
        assert!((part.arena_measure() - 9.6).abs() <= 2.0 * h);
    }

    #[test]
    fn symmetric_stats_are_mirror_images() {
        let s = scenario_i().with_resolution(2000).unwrap();
        let c = control(&s, 0.0, 0.0);
        let part = compute_partition(&s, &c).unwrap();
        let stats = compute_cell_stats(&s, &c, &part).unwrap();
        assert!((stats.p()[0] - 0.5).abs() < 1e-12);
        assert!((stats.psi1()[0] - stats.psi1()[1]).abs() < 1e-12);
        assert!(stats.psi2()[0] > stats.psi1()[0].powi(2));
    }

    #[test]
    fn fused_stats_equal_two_step_stats() {
        let s = scenario_i();
        let c = control(&s, 1.3, -2.0);
        let part = compute_partition(&s, &c).unwrap();
        let a = compute_cell_stats(&s, &c, &part).unwrap();
        let b = GainField::new(&s).cell_stats(&c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn interior_cell_matches_closed_form() {
        // sigma = 2 ln 3 with beta = 0 and alpha = 3.
        let tau = 3.0 * 3f64.ln();
        let b = two_bs_boundary(tau, 0.0, 3.0, 5.0, 5.0);
        assert!((b.gamma.unwrap() - 1.25).abs() < 1e-14);
        assert!((b.y_minus.unwrap() - 0.5).abs() < 1e-14);
        assert!((b.y_plus.unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(b.case, BoundaryCase::Station2Interior);

        let s = Scenario::two_station_line(5.0, 5.0, 0.0, 3.0, 2001).unwrap();
        let part = compute_partition(&s, &control(&s, tau, 0.0)).unwrap();
        let step = part.grid().step();
        for (p, owner) in part.iter() {
            let inside = p.x > 0.5 + step && p.x < 2.0 - step;
            let outside = p.x < 0.5 - step || p.x > 2.0 + step;
            if inside {
                assert_eq!(owner, Some(1), "x = {}", p.x);
            } else if outside {
                assert_eq!(owner, Some(0), "x = {}", p.x);
            }
        }
        assert!((part.cell_measures()[1] - 1.5).abs() <= 2.0 * step);
    }

    #[test]
    fn midpoint_case_and_lengths() {
        let b = two_bs_boundary(0.0, 0.0, 3.0, 5.0, 5.0);
        assert_eq!(b.case, BoundaryCase::Midpoint);
        assert_eq!(b.gamma, None);
        assert_eq!(two_bs_cell_lengths(&b, 5.0, 5.0), (5.0, 5.0));
        assert_eq!(two_bs_cells(&b, 5.0, 5.0), (vec![(-5.0, 0.0)], vec![(0.0, 5.0)]));
    }

    #[test]
    fn right_segment_lengths() {
        let b = TwoBsBoundary {
            sigma: 0.5,
            gamma: None,
            y_minus: Some(0.5),
            y_plus: Some(2.0),
            case: BoundaryCase::Station2RightSegment,
        };
        assert_eq!(two_bs_cell_lengths(&b, 5.0, 5.0), (5.5, 4.5));
    }

    #[test]
    fn edge_threshold_value() {
        let h = edge_threshold(5.0f64);
        assert!((h - 2.0 * 1.5f64.ln()).abs() < 1e-15);
        assert!((h - 0.8109302162163288).abs() < 1e-15);
        let alpha = 3.0;
        let tau_for = |sigma: f64| sigma * alpha / 2.0;
        assert_eq!(two_bs_boundary(tau_for(h * 1.001), 0.0, alpha, 5.0, 5.0).case, BoundaryCase::Station2Interior);
        assert_eq!(two_bs_boundary(tau_for(h * 0.999), 0.0, alpha, 5.0, 5.0).case, BoundaryCase::Station2RightSegment);
        assert_eq!(two_bs_boundary(tau_for(-h * 1.001), 0.0, alpha, 5.0, 5.0).case, BoundaryCase::Station1Interior);
        assert_eq!(two_bs_boundary(tau_for(-h * 0.999), 0.0, alpha, 5.0, 5.0).case, BoundaryCase::Station1LeftSegment);
    }

    #[test]
    fn weak_station_cell_vanishes() {
        for &sigma in &[-5.0f64, -20.0, -60.0, -700.0] {
            let b = two_bs_boundary(sigma / 2.0, 0.0, 1.0, 5.0, 5.0);
            assert_eq!(b.case, BoundaryCase::Station1Interior);
            let (c1, c2) = two_bs_cell_lengths(&b, 5.0, 5.0);
            assert!(c1 >= 0.0 && c1 < 4.0 * (sigma / 4.0).exp() + 1e-300, "{sigma}: {c1}");
            assert_eq!(c1 + c2, 10.0);
            assert!((b.gamma.unwrap() + 1.0).abs() < 2.5 * sigma.exp() + 1e-300);
        }
    }

    #[test]
    fn cell_stats_validation() {
        assert!(CellStats::new(vec![0.5, 0.5], vec![1.0, 2.0], vec![1.0, 4.0]).is_ok());
        assert!(CellStats::new(vec![0.5, 0.4], vec![1.0, 2.0], vec![1.0, 4.0]).is_err());
        assert!(CellStats::new(vec![0.5, 0.5], vec![1.0, 2.0], vec![0.9, 4.0]).is_err());
        assert!(CellStats::new(vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(CellStats::new(vec![1.0], vec![1.0], vec![1.0, 1.0]).is_err());
    }
}
