//! Downlink spectral-efficiency statistics for cellular networks under joint
//! cell-bias and transmit-power control.
//!
//! The pipeline runs `Scenario` + `ControlPoint` -> [`partition::CellStats`]
//! -> [`metrics::MetricSet`], with [`sweep`] mapping whole control grids to
//! tradeoff bullets and Pareto frontiers, and [`montecarlo`] providing an
//! independent sampled reference.
//!
//! Every numeric type is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`.

pub mod error;
pub mod metrics;
pub mod model;
pub mod montecarlo;
pub mod occupancy;
pub mod partition;
pub mod scalar;
pub mod sweep;

pub use error::{Error, Result};
pub use occupancy::InverseOccupancy;
pub use scalar::Real;
pub use sweep::{ControlMode, TradeoffKind};

pub type Point = model::Point<f64>;
pub type Arena = model::Arena<f64>;
pub type BaseStation = model::BaseStation<f64>;
pub type ScenarioSpec = model::ScenarioSpec<f64>;
pub type Scenario = model::Scenario<f64>;
pub type ControlPoint = model::ControlPoint<f64>;
pub type ReparamControl = model::ReparamControl<f64>;
pub type CellPartition = partition::CellPartition<f64>;
pub type CellStats = partition::CellStats<f64>;
pub type TwoBsBoundary = partition::TwoBsBoundary<f64>;
pub type MetricSet = metrics::MetricSet<f64>;
pub type ControlGrid = sweep::ControlGrid<f64>;
pub type StatsMap = sweep::StatsMap<f64>;
pub type BulletPoint = sweep::BulletPoint<f64>;
pub type Frontier = sweep::Frontier<f64>;
pub type DominanceReport = sweep::DominanceReport<f64>;
pub type McEstimates = montecarlo::McEstimates<f64>;
