//! Command-line front end for `cellse`: presets, configuration files and
//! CSV/JSON export of partitions, sweeps, Monte Carlo checks and occupancy curves.

pub mod config;
pub mod run;
pub mod table;
