//! Presets, JSON configuration files and command-line overrides.
//!
//! Settings are resolved in three layers: a preset, then the fields present in
//! a `--config` file, then explicit flags.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use cellse::model::{Arena, BaseStation, Point, ScenarioSpec};
use cellse::sweep::linspace;
use cellse::Scenario;
use serde::{Deserialize, Serialize};

/// `count` evenly spaced values from `lo` to `hi`, written `lo:hi:count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub const fn new(lo: f64, hi: f64, count: usize) -> Self {
        Self { lo, hi, count }
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.count)
    }
}

impl FromStr for Axis {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, count] = parts[..] else {
            bail!("expected lo:hi:count, got {s:?}");
        };
        let axis = Axis { lo: lo.trim().parse()?, hi: hi.trim().parse()?, count: count.trim().parse()? };
        if axis.count == 0 {
            bail!("grid count must be positive");
        }
        if axis.count > 1 && !(axis.lo < axis.hi) {
            bail!("grid needs lo < hi when count > 1");
        }
        if axis.count == 1 && axis.lo != axis.hi {
            bail!("a one-point grid needs lo == hi");
        }
        Ok(axis)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationConfig {
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default = "one")]
    pub power: f64,
    #[serde(default = "one")]
    pub bias: f64,
}

fn one() -> f64 {
    1.0
}

/// Geometry of the network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "snake_case", deny_unknown_fields)]
pub enum Geometry {
    /// Stations at -1 and +1 on `[-left, right]`.
    TwoStationLine { left: f64, right: f64 },
    /// Centre plus four corners at `(±1, ±1)` on `[-half_width, half_width]^2`.
    Quincunx { half_width: f64 },
    /// Arbitrary stations on `[-left, right]` (when `half_width` is absent) or a square.
    Custom {
        #[serde(default)]
        left: Option<f64>,
        #[serde(default)]
        right: Option<f64>,
        #[serde(default)]
        half_width: Option<f64>,
        stations: Vec<StationConfig>,
    },
}

/// Fully resolved run settings; also written next to the outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub name: String,
    pub geometry: Geometry,
    pub alpha: f64,
    pub deadzone: f64,
    pub noise: f64,
    pub resolution: usize,
    pub tau: Axis,
    pub beta: Axis,
    pub unilateral_tau: Axis,
    pub unilateral_beta: Axis,
    pub partition_tau: Axis,
    pub partition_beta: Axis,
    pub mc_tau: Axis,
    pub mc_beta: Axis,
    pub m: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
    pub approx_occupancy: bool,
}

/// Optional overrides, as read from a config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub preset: Option<String>,
    pub name: Option<String>,
    pub geometry: Option<Geometry>,
    pub alpha: Option<f64>,
    pub deadzone: Option<f64>,
    pub noise: Option<f64>,
    pub resolution: Option<usize>,
    pub tau: Option<Axis>,
    pub beta: Option<Axis>,
    pub unilateral_tau: Option<Axis>,
    pub unilateral_beta: Option<Axis>,
    pub partition_tau: Option<Axis>,
    pub partition_beta: Option<Axis>,
    pub mc_tau: Option<Axis>,
    pub mc_beta: Option<Axis>,
    pub m: Option<Vec<u64>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub approx_occupancy: Option<bool>,
}

pub const PRESETS: [&str; 4] = ["two_bs_i", "two_bs_ii", "two_bs_iii", "quincunx"];

const ORIGIN: Axis = Axis::new(0.0, 0.0, 1);

fn two_bs(name: &str, left: f64, right: f64, deadzone: f64) -> Settings {
    Settings {
        name: name.into(),
        geometry: Geometry::TwoStationLine { left, right },
        alpha: 3.0,
        deadzone,
        noise: 0.0,
        resolution: 2001,
        tau: Axis::new(-10.0, 10.0, 51),
        beta: Axis::new(-10.0, 10.0, 51),
        unilateral_tau: Axis::new(-10.0, 10.0, 101),
        unilateral_beta: Axis::new(-10.0, 10.0, 101),
        partition_tau: Axis::new(-5.0, 5.0, 3),
        partition_beta: Axis::new(-5.0, 5.0, 3),
        mc_tau: ORIGIN,
        mc_beta: ORIGIN,
        m: vec![50],
        trials: 100_000,
        seed: 0,
        approx_occupancy: false,
    }
}

pub fn preset(name: &str) -> Result<Settings> {
    Ok(match name {
        "two_bs_i" => two_bs(name, 5.0, 5.0, 0.1),
        "two_bs_ii" => two_bs(name, 5.0, 5.0, 0.5),
        "two_bs_iii" => two_bs(name, 2.0, 8.0, 0.1),
        "quincunx" => Settings {
            name: name.into(),
            geometry: Geometry::Quincunx { half_width: 3.0 },
            alpha: 3.0,
            deadzone: 0.0,
            noise: 0.0,
            resolution: 501,
            tau: Axis::new(-3.0, 3.0, 25),
            beta: Axis::new(-3.0, 3.0, 25),
            unilateral_tau: Axis::new(-3.0, 3.0, 25),
            unilateral_beta: Axis::new(-3.0, 3.0, 25),
            partition_tau: Axis::new(-3.0, 3.0, 3),
            partition_beta: Axis::new(-3.0, 3.0, 3),
            mc_tau: ORIGIN,
            mc_beta: ORIGIN,
            m: vec![100],
            trials: 100_000,
            seed: 0,
            approx_occupancy: false,
        },
        other => bail!("unknown preset {other:?}; expected one of {}", PRESETS.join(", ")),
    })
}

impl Settings {
    pub fn apply(&mut self, o: Overrides) {
        macro_rules! take {
            ($($f:ident),*) => { $(if let Some(v) = o.$f { self.$f = v; })* };
        }
        take!(
            name, geometry, alpha, deadzone, noise, resolution, tau, beta, unilateral_tau, unilateral_beta,
            partition_tau, partition_beta, mc_tau, mc_beta, m, trials, seed, approx_occupancy
        );
    }

    /// Resolves the preset named on the command line or in the file (default
    /// `two_bs_i`) and applies the file's remaining fields.
    pub fn load(preset_flag: Option<&str>, config: Option<&Path>) -> Result<Settings> {
        let overrides = match config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str::<Overrides>(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => Overrides::default(),
        };
        let base = preset_flag.or(overrides.preset.as_deref()).unwrap_or("two_bs_i");
        let mut s = preset(base)?;
        s.apply(overrides);
        Ok(s)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let (alpha, delta, res) = (self.alpha, self.deadzone, self.resolution);
        let mut s = match &self.geometry {
            Geometry::TwoStationLine { left, right } => Scenario::two_station_line(*left, *right, delta, alpha, res)?,
            Geometry::Quincunx { half_width } => Scenario::quincunx(*half_width, delta, alpha, res)?,
            Geometry::Custom { left, right, half_width, stations } => {
                let arena = match (half_width, left, right) {
                    (Some(h), None, None) => Arena::rectangle(*h, res),
                    (None, Some(l), Some(r)) => Arena::interval(*l, *r, res),
                    _ => bail!("custom geometry needs either half_width or both left and right"),
                };
                ScenarioSpec {
                    arena,
                    stations: stations
                        .iter()
                        .map(|s| BaseStation { location: Point::new(s.x, s.y), power: s.power, bias: s.bias })
                        .collect(),
                    alpha,
                    deadzone: delta,
                    noise: self.noise,
                }
                .validate()?
            }
        };
        if self.noise != 0.0 && !matches!(self.geometry, Geometry::Custom { .. }) {
            let mut spec = s.spec().clone();
            spec.noise = self.noise;
            s = spec.validate()?;
        }
        Ok(s)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}
