//! Scenario geometry, base stations and control vectors.
//!
//! Lengths are normalized so that the two-station line has its stations at
//! `-1` and `+1`. Powers and biases are linear-scale; `(tau, beta)` is a
//! natural-log view onto them for the two preset layouts.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A location in the arena. One-dimensional arenas use `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn on_line(x: T) -> Self {
        Self { x, y: T::zero() }
    }

    pub fn distance(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArenaShape<T> {
    /// The segment `[-left, +right]`.
    Interval { left: T, right: T },
    /// The square `[-half_width, +half_width]^2`.
    Rectangle { half_width: T },
}

/// Bounded arena with the number of quadrature points per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arena<T> {
    pub shape: ArenaShape<T>,
    pub resolution: usize,
}

impl<T: Real> Arena<T> {
    pub fn interval(left: T, right: T, resolution: usize) -> Self {
        Self { shape: ArenaShape::Interval { left, right }, resolution }
    }

    pub fn rectangle(half_width: T, resolution: usize) -> Self {
        Self { shape: ArenaShape::Rectangle { half_width }, resolution }
    }

    pub fn dimension(&self) -> usize {
        match self.shape {
            ArenaShape::Interval { .. } => 1,
            ArenaShape::Rectangle { .. } => 2,
        }
    }

    /// `(x_lo, x_hi, y_lo, y_hi)`; one-dimensional arenas report a zero-width `y` range.
    pub fn bounds(&self) -> (T, T, T, T) {
        match self.shape {
            ArenaShape::Interval { left, right } => (-left, right, T::zero(), T::zero()),
            ArenaShape::Rectangle { half_width } => (-half_width, half_width, -half_width, half_width),
        }
    }

    /// Lebesgue measure (length or area) of the whole arena, deadzones included.
    pub fn measure(&self) -> T {
        let (x0, x1, y0, y1) = self.bounds();
        match self.shape {
            ArenaShape::Interval { .. } => x1 - x0,
            ArenaShape::Rectangle { .. } => (x1 - x0) * (y1 - y0),
        }
    }

    pub fn contains(&self, p: &Point<T>) -> bool {
        let (x0, x1, y0, y1) = self.bounds();
        p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1
    }

    /// True when the closed disk (segment in 1D) of `radius` around `p` lies in the arena.
    fn contains_disk(&self, p: &Point<T>, radius: T) -> bool {
        let (x0, x1, y0, y1) = self.bounds();
        let x_ok = p.x - radius >= x0 && p.x + radius <= x1;
        match self.shape {
            ArenaShape::Interval { .. } => x_ok && p.y == T::zero(),
            ArenaShape::Rectangle { .. } => x_ok && p.y - radius >= y0 && p.y + radius <= y1,
        }
    }

    fn check(&self) -> Result<()> {
        if self.resolution < 3 {
            return Err(Error::InvalidScenario(format!(
                "arena resolution {} is below 3",
                self.resolution
            )));
        }
        match self.shape {
            ArenaShape::Interval { left, right } => {
                if !(left > T::one() && left.is_finite() && right > T::one() && right.is_finite()) {
                    return Err(Error::InvalidScenario(format!(
                        "interval bounds must exceed 1, got ({left}, {right})"
                    )));
                }
            }
            ArenaShape::Rectangle { half_width } => {
                if !(half_width > T::one() && half_width.is_finite()) {
                    return Err(Error::InvalidScenario(format!(
                        "rectangle half-width must exceed 1, got {half_width}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A base station with its default power and bias (both linear scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseStation<T> {
    pub location: Point<T>,
    pub power: T,
    pub bias: T,
}

impl<T: Real> BaseStation<T> {
    pub fn new(location: Point<T>) -> Self {
        Self { location, power: T::one(), bias: T::one() }
    }
}

/// Unchecked scenario description. Turn it into a [`Scenario`] with
/// [`validate_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec<T> {
    pub arena: Arena<T>,
    pub stations: Vec<BaseStation<T>>,
    /// Pathloss exponent.
    pub alpha: T,
    /// Deadzone radius around every station.
    pub deadzone: T,
    /// Background noise power.
    pub noise: T,
}

impl<T: Real> ScenarioSpec<T> {
    pub fn validate(self) -> Result<Scenario<T>> {
        validate_scenario(self)
    }
}

/// Station arrangements that admit the `(tau, beta)` reparameterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Two stations on an interval arena.
    TwoStationLine,
    /// Five stations on a square arena: station 0 at the origin, the rest at `(±1, ±1)`.
    Quincunx,
    General,
}

/// A validated scenario. All invariants hold for the lifetime of the value.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    spec: ScenarioSpec<T>,
}

/// Checks every scenario invariant, reporting the first one violated.
pub fn validate_scenario<T: Real>(spec: ScenarioSpec<T>) -> Result<Scenario<T>> {
    spec.arena.check()?;
    if spec.stations.is_empty() {
        return Err(Error::InvalidScenario("at least one station is required".into()));
    }
    if !(spec.alpha >= T::one() && spec.alpha.is_finite()) {
        return Err(Error::InvalidScenario(format!("pathloss exponent {} is below 1", spec.alpha)));
    }
    if !(spec.deadzone >= T::zero() && spec.deadzone.is_finite()) {
        return Err(Error::InvalidScenario(format!("deadzone radius {} is negative", spec.deadzone)));
    }
    if !(spec.noise >= T::zero() && spec.noise.is_finite()) {
        return Err(Error::InvalidScenario(format!("noise power {} is negative", spec.noise)));
    }
    if spec.stations.len() == 1 && spec.noise == T::zero() {
        return Err(Error::InvalidScenario(
            "a single station without noise has unbounded SINR".into(),
        ));
    }
    for (i, bs) in spec.stations.iter().enumerate() {
        if !(bs.power > T::zero() && bs.power.is_finite() && bs.bias > T::zero() && bs.bias.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "station {i} needs positive finite power and bias"
            )));
        }
        if !spec.arena.contains(&bs.location) {
            return Err(Error::InvalidScenario(format!("station {i} lies outside the arena")));
        }
        if !spec.arena.contains_disk(&bs.location, spec.deadzone) {
            return Err(Error::InvalidScenario(format!(
                "deadzone of station {i} extends beyond the arena"
            )));
        }
    }
    let two_delta = spec.deadzone + spec.deadzone;
    for i in 0..spec.stations.len() {
        for j in i + 1..spec.stations.len() {
            let d = spec.stations[i].location.distance(&spec.stations[j].location);
            if d < two_delta || d == T::zero() {
                return Err(Error::InvalidScenario(format!(
                    "deadzones of stations {i} and {j} overlap (separation {d}, 2*delta {two_delta})"
                )));
            }
        }
    }
    Ok(Scenario { spec })
}

impl<T: Real> Scenario<T> {
    /// Two stations at `-1` and `+1` on `[-left, +right]`, noise-free.
    pub fn two_station_line(left: T, right: T, deadzone: T, alpha: T, resolution: usize) -> Result<Self> {
        ScenarioSpec {
            arena: Arena::interval(left, right, resolution),
            stations: vec![
                BaseStation::new(Point::on_line(-T::one())),
                BaseStation::new(Point::on_line(T::one())),
            ],
            alpha,
            deadzone,
            noise: T::zero(),
        }
        .validate()
    }

    /// Centre station plus four corner stations at `(±1, ±1)` on `[-half_width, +half_width]^2`.
    pub fn quincunx(half_width: T, deadzone: T, alpha: T, resolution: usize) -> Result<Self> {
        let one = T::one();
        let corners = [(-one, -one), (one, -one), (-one, one), (one, one)];
        let mut stations = vec![BaseStation::new(Point::new(T::zero(), T::zero()))];
        stations.extend(corners.iter().map(|&(x, y)| BaseStation::new(Point::new(x, y))));
        ScenarioSpec {
            arena: Arena::rectangle(half_width, resolution),
            stations,
            alpha,
            deadzone,
            noise: T::zero(),
        }
        .validate()
    }

    pub fn arena(&self) -> &Arena<T> {
        &self.spec.arena
    }

    pub fn stations(&self) -> &[BaseStation<T>] {
        &self.spec.stations
    }

    pub fn station_count(&self) -> usize {
        self.spec.stations.len()
    }

    pub fn alpha(&self) -> T {
        self.spec.alpha
    }

    pub fn deadzone(&self) -> T {
        self.spec.deadzone
    }

    pub fn noise(&self) -> T {
        self.spec.noise
    }

    pub fn spec(&self) -> &ScenarioSpec<T> {
        &self.spec
    }

    /// Same scenario with a different quadrature resolution.
    pub fn with_resolution(&self, resolution: usize) -> Result<Self> {
        let mut spec = self.spec.clone();
        spec.arena.resolution = resolution;
        spec.validate()
    }

    /// True when `p` is within the deadzone radius of some station.
    pub fn in_deadzone(&self, p: &Point<T>) -> bool {
        let delta = self.spec.deadzone;
        self.spec.stations.iter().any(|bs| bs.location.distance(p) <= delta)
    }

    pub fn layout(&self) -> Layout {
        let st = &self.spec.stations;
        match self.spec.arena.shape {
            ArenaShape::Interval { .. } if st.len() == 2 => Layout::TwoStationLine,
            ArenaShape::Rectangle { .. } if st.len() == 5 => {
                let one = T::one();
                let centre_ok = st[0].location == Point::new(T::zero(), T::zero());
                let corners_ok = st[1..]
                    .iter()
                    .all(|bs| bs.location.x.abs() == one && bs.location.y.abs() == one);
                let distinct = (1..5).all(|i| (i + 1..5).all(|j| st[i].location != st[j].location));
                if centre_ok && corners_ok && distinct {
                    Layout::Quincunx
                } else {
                    Layout::General
                }
            }
            _ => Layout::General,
        }
    }

    /// Control point built from the per-station default powers and biases.
    pub fn default_control(&self) -> ControlPoint<T> {
        ControlPoint {
            powers: self.spec.stations.iter().map(|s| s.power).collect(),
            biases: self.spec.stations.iter().map(|s| s.bias).collect(),
        }
    }
}

/// Per-station transmit powers and association biases, linear scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPoint<T> {
    powers: Vec<T>,
    biases: Vec<T>,
}

impl<T: Real> ControlPoint<T> {
    pub fn new(powers: Vec<T>, biases: Vec<T>) -> Result<Self> {
        if powers.is_empty() || powers.len() != biases.len() {
            return Err(Error::InvalidControl(format!(
                "need matching nonempty power and bias vectors, got {} and {}",
                powers.len(),
                biases.len()
            )));
        }
        if let Some(bad) = powers.iter().chain(&biases).find(|v| !(**v > T::zero() && v.is_finite())) {
            return Err(Error::InvalidControl(format!("entry {bad} is not positive and finite")));
        }
        Ok(Self { powers, biases })
    }

    /// All powers and biases equal to one.
    pub fn uniform(n: usize) -> Self {
        Self { powers: vec![T::one(); n], biases: vec![T::one(); n] }
    }

    pub fn powers(&self) -> &[T] {
        &self.powers
    }

    pub fn biases(&self) -> &[T] {
        &self.biases
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    /// Multiplies every power by `rho`; SIR is unchanged by this.
    pub fn scale_powers(&self, rho: T) -> Result<Self> {
        Self::new(self.powers.iter().map(|&t| t * rho).collect(), self.biases.clone())
    }

    pub(crate) fn check_for(&self, scenario: &Scenario<T>) -> Result<()> {
        if self.len() != scenario.station_count() {
            return Err(Error::InvalidControl(format!(
                "control has {} entries but the scenario has {} stations",
                self.len(),
                scenario.station_count()
            )));
        }
        Ok(())
    }
}

/// Log-ratio control: `tau = ln(t_1 / t_rest)`, `beta = ln(b_1 / b_rest)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReparamControl<T> {
    pub tau: T,
    pub beta: T,
}

impl<T: Real> ReparamControl<T> {
    pub fn new(tau: T, beta: T) -> Result<Self> {
        if !(tau.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidControl(format!("tau={tau}, beta={beta} must be finite")));
        }
        Ok(Self { tau, beta })
    }

    /// Recovers `(tau, beta)` from the first two entries of a control point.
    pub fn from_control(control: &ControlPoint<T>) -> Result<Self> {
        if control.len() < 2 {
            return Err(Error::InvalidControl("need at least two stations".into()));
        }
        Self::new(
            (control.powers[0] / control.powers[1]).ln(),
            (control.biases[0] / control.biases[1]).ln(),
        )
    }
}

/// Expands `(tau, beta)` into linear powers and biases for the two preset layouts.
///
/// Two stations get `(e^tau, 1)` / `(e^beta, 1)`; the quincunx gets the
/// centre at `e^tau` / `e^beta` and all corners at one.
pub fn controls_from_reparam<T: Real>(scenario: &Scenario<T>, rc: ReparamControl<T>) -> Result<ControlPoint<T>> {
    let rc = ReparamControl::new(rc.tau, rc.beta)?;
    let n = match scenario.layout() {
        Layout::TwoStationLine => 2,
        Layout::Quincunx => 5,
        Layout::General => return Err(Error::NotReparameterizable),
    };
    let mut powers = vec![T::one(); n];
    let mut biases = vec![T::one(); n];
    powers[0] = rc.tau.exp();
    biases[0] = rc.beta.exp();
    ControlPoint::new(powers, biases)
}
