//! The four subcommands. Each writes its tables into one output directory and
//! returns the list of files it produced.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use cellse::metrics::metric_set;
use cellse::model::{controls_from_reparam, Layout};
use cellse::montecarlo::{estimate, McConfig};
use cellse::occupancy::{approximation_crossing, expected_inverse_occupancy, expected_inverse_occupancy_approx};
use cellse::partition::{two_bs_boundary, two_bs_cell_lengths, GainField};
use cellse::sweep::{build_bullet, dominance_check, extreme_labels, pareto_frontier, precompute_with_field};
use cellse::{
    CellStats, ControlGrid, ControlMode, ControlPoint, InverseOccupancy, ReparamControl, Scenario, StatsMap,
    TradeoffKind,
};

use crate::config::{Axis, Geometry, Settings};
use crate::table::{Cell, Format, Table};

pub const PARTITION_COLUMNS_1D: [&str; 2] = ["x", "station"];
pub const PARTITION_COLUMNS_2D: [&str; 3] = ["x", "y", "station"];
pub const PARTITION_INDEX_COLUMNS: [&str; 4] = ["index", "tau", "beta", "file"];
pub const STATS_COLUMNS: [&str; 6] = ["tau", "beta", "cell", "p", "psi", "psi2"];
pub const BOUNDARY_COLUMNS: [&str; 11] =
    ["tau", "beta", "sigma", "gamma", "y_minus", "y_plus", "case", "c1_length", "c2_length", "c1_grid", "c2_grid"];
pub const BULLET_COLUMNS: [&str; 6] = ["tau", "beta", "x", "y", "on_frontier", "label"];
pub const FRONTIER_COLUMNS: [&str; 4] = ["tau", "beta", "x", "y"];
pub const DOMINANCE_COLUMNS: [&str; 9] = [
    "mode",
    "kind",
    "m",
    "comparable",
    "all_weakly_dominated",
    "strictly_dominated",
    "frontier_points",
    "max_gap_x",
    "max_gap_y",
];
pub const MC_REPORT_COLUMNS: [&str; 11] =
    ["tau", "beta", "m", "trials", "seed", "metric", "analytic", "estimate", "se", "z", "pass"];
pub const MC_CONVERGENCE_COLUMNS: [&str; 11] = [
    "tau",
    "beta",
    "m",
    "trials",
    "mean_fairness",
    "se_fairness",
    "c_bar",
    "fairness_gap",
    "mean_total",
    "mu_bar",
    "total_gap",
];
pub const MC_ASSOCIATION_COLUMNS: [&str; 6] = ["tau", "beta", "m", "cell", "p_grid", "p_hat"];
pub const OCCUPANCY_COLUMNS: [&str; 5] = ["m", "p", "exact", "approx", "relative_error"];
pub const CROSSING_COLUMNS: [&str; 2] = ["p", "m_crossing"];

/// Monte Carlo tolerance in standard errors.
pub const MC_TOLERANCE: f64 = 4.0;

fn occupancy_mode(s: &Settings) -> InverseOccupancy {
    if s.approx_occupancy {
        InverseOccupancy::Approximate
    } else {
        InverseOccupancy::Exact
    }
}

fn suffix(s: &Settings) -> &'static str {
    if s.approx_occupancy {
        "_approx"
    } else {
        ""
    }
}

fn prepare(out: &Path, settings: &Settings) -> Result<Scenario> {
    let scenario = settings.scenario()?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join("settings.json"), settings.to_json()?)?;
    Ok(scenario)
}

/// `(tau, beta, control)` for every grid point, or the scenario's own control
/// when the layout has no two-parameter view.
fn controls(scenario: &Scenario, tau: &Axis, beta: &Axis) -> Result<Vec<(Option<ReparamControl>, ControlPoint)>> {
    if scenario.layout() == Layout::General {
        return Ok(vec![(None, scenario.default_control())]);
    }
    let grid = ControlGrid::joint(tau.values(), beta.values())?;
    grid.controls()
        .map(|rc| Ok((Some(rc), controls_from_reparam(scenario, rc)?)))
        .collect()
}

fn rc_cells(rc: Option<ReparamControl>) -> [Cell; 2] {
    match rc {
        Some(rc) => [rc.tau.into(), rc.beta.into()],
        None => [Cell::Null, Cell::Null],
    }
}

fn push_stats(t: &mut Table, rc: Option<ReparamControl>, stats: &CellStats) {
    for i in 0..stats.len() {
        let [a, b] = rc_cells(rc);
        t.push(vec![a, b, (i + 1).into(), stats.p()[i].into(), stats.psi1()[i].into(), stats.psi2()[i].into()]);
    }
}

pub fn run_partition(settings: &Settings, out: &Path, format: Format) -> Result<Vec<String>> {
    let scenario = prepare(out, settings)?;
    let field = GainField::new(&scenario);
    let two_d = matches!(scenario.arena().shape, cellse::model::ArenaShape::Rectangle { .. });
    let mut files = vec!["settings.json".to_string()];
    let mut index = Table::new(&PARTITION_INDEX_COLUMNS);
    let mut stats_table = Table::new(&STATS_COLUMNS);
    let mut boundary = Table::new(&BOUNDARY_COLUMNS);
    for (k, (rc, control)) in controls(&scenario, &settings.partition_tau, &settings.partition_beta)?
        .into_iter()
        .enumerate()
    {
        let part = field.partition(&control)?;
        let mut t = Table::new(if two_d { &PARTITION_COLUMNS_2D } else { &PARTITION_COLUMNS_1D });
        for (p, owner) in part.iter() {
            let station: Cell = owner.map_or(0, |i| i + 1).into();
            if two_d {
                t.push(vec![p.x.into(), p.y.into(), station]);
            } else {
                t.push(vec![p.x.into(), station]);
            }
        }
        let name = t.write(out, &format!("partition_{k:04}"), format)?;
        let [a, b] = rc_cells(rc);
        index.push(vec![k.into(), a, b, name.clone().into()]);
        files.push(name);
        let stats = field.cell_stats(&control)?;
        push_stats(&mut stats_table, rc, &stats);

        if let (Some(rc), Geometry::TwoStationLine { left, right }) = (rc, &settings.geometry) {
            if scenario.noise() == 0.0 {
                let bd = two_bs_boundary(rc.tau, rc.beta, scenario.alpha(), *left, *right);
                let (c1, c2) = two_bs_cell_lengths(&bd, *left, *right);
                let m = part.cell_measures();
                boundary.push(vec![
                    rc.tau.into(),
                    rc.beta.into(),
                    bd.sigma.into(),
                    bd.gamma.into(),
                    bd.y_minus.into(),
                    bd.y_plus.into(),
                    bd.case.label().into(),
                    c1.into(),
                    c2.into(),
                    m[0].into(),
                    m[1].into(),
                ]);
            }
        }
    }
    files.push(index.write(out, "partition_index", format)?);
    files.push(stats_table.write(out, "partition_stats", format)?);
    if !boundary.rows.is_empty() {
        files.push(boundary.write(out, "boundary", format)?);
    }
    Ok(files)
}

fn grid_for(settings: &Settings, mode: ControlMode) -> Result<ControlGrid> {
    Ok(match mode {
        ControlMode::Joint => ControlGrid::joint(settings.tau.values(), settings.beta.values())?,
        ControlMode::PowerOnly => ControlGrid::power_only(settings.unilateral_tau.values())?,
        ControlMode::BiasOnly => ControlGrid::bias_only(settings.unilateral_beta.values())?,
    })
}

fn bullet_stem(mode: ControlMode, kind: TradeoffKind, m: u64) -> String {
    match kind {
        TradeoffKind::Fairness => format!("{}_{}", mode.name(), kind.name()),
        _ => format!("{}_{}_m{m}", mode.name(), kind.name()),
    }
}

/// The `m` values a tradeoff kind is evaluated at; the fairness bullet does not depend on `m`.
fn m_values(kind: TradeoffKind, ms: &[u64]) -> Vec<u64> {
    match kind {
        TradeoffKind::Fairness => ms.iter().take(1).copied().collect(),
        _ => ms.to_vec(),
    }
}

pub fn run_sweep(settings: &Settings, modes: &[ControlMode], out: &Path, format: Format) -> Result<Vec<String>> {
    let scenario = prepare(out, settings)?;
    if scenario.layout() == Layout::General {
        bail!("sweeps need the two-station or quincunx layout");
    }
    if settings.m.is_empty() {
        bail!("at least one m is required");
    }
    let field = GainField::new(&scenario);
    let occ = occupancy_mode(settings);
    let sfx = suffix(settings);
    let mut files = vec!["settings.json".to_string()];
    let mut maps: Vec<(ControlMode, ControlGrid, StatsMap)> = Vec::new();
    for &mode in modes {
        let grid = grid_for(settings, mode)?;
        let map = precompute_with_field(&scenario, &field, &grid)?;
        let mut t = Table::new(&STATS_COLUMNS);
        for (rc, stats) in map.entries() {
            push_stats(&mut t, Some(*rc), stats);
        }
        files.push(t.write(out, &format!("stats_{}", mode.name()), format)?);
        maps.push((mode, grid, map));
    }

    let mut dominance = Table::new(&DOMINANCE_COLUMNS);
    for kind in TradeoffKind::ALL {
        for m in m_values(kind, &settings.m) {
            let mut built = Vec::new();
            for (mode, grid, map) in &maps {
                let bullet = build_bullet(map, m, kind, occ)?;
                let frontier = pareto_frontier(&bullet, kind)?;
                let labels = if *mode == ControlMode::Joint { extreme_labels(grid) } else { Vec::new() };
                let mut bt = Table::new(&BULLET_COLUMNS);
                for p in &bullet {
                    let on = frontier.efficient_controls.contains(&p.control);
                    let label = labels.iter().find(|(c, _)| *c == p.control).map_or(Cell::Null, |(_, l)| l.to_string().into());
                    bt.push(vec![p.control.tau.into(), p.control.beta.into(), p.x.into(), p.y.into(), on.into(), label]);
                }
                let stem = bullet_stem(*mode, kind, m);
                files.push(bt.write(out, &format!("bullet_{stem}{sfx}"), format)?);
                let mut ft = Table::new(&FRONTIER_COLUMNS);
                for p in &frontier.points {
                    ft.push(vec![p.control.tau.into(), p.control.beta.into(), p.x.into(), p.y.into()]);
                }
                files.push(ft.write(out, &format!("frontier_{stem}{sfx}"), format)?);
                built.push((*mode, grid, bullet, frontier));
            }
            let Some((_, jgrid, jbullet, jfrontier)) = built.iter().find(|b| b.0 == ControlMode::Joint) else {
                continue;
            };
            for (mode, grid, _, frontier) in built.iter().filter(|b| b.0 != ControlMode::Joint) {
                let m_cell: Cell = if kind == TradeoffKind::Fairness { Cell::Null } else { m.into() };
                let mut row = vec![mode.name().into(), kind.name().into(), m_cell];
                if jgrid.contains_grid(grid) {
                    let r = dominance_check(jfrontier, jbullet, frontier)?;
                    row.extend([
                        true.into(),
                        r.all_weakly_dominated.into(),
                        r.strictly_dominated.into(),
                        frontier.points.len().into(),
                        r.max_gap_x.into(),
                        r.max_gap_y.into(),
                    ]);
                } else {
                    row.extend([false.into(), Cell::Null, Cell::Null, frontier.points.len().into(), Cell::Null, Cell::Null]);
                }
                dominance.push(row);
            }
        }
    }
    if !dominance.rows.is_empty() {
        files.push(dominance.write(out, &format!("dominance{sfx}"), format)?);
    }
    Ok(files)
}

/// Result of an `mc` run: files written plus the number of failed comparisons.
pub struct McOutcome {
    pub files: Vec<String>,
    pub failures: usize,
}

pub fn run_mc(settings: &Settings, out: &Path, format: Format) -> Result<McOutcome> {
    let scenario = prepare(out, settings)?;
    if settings.m.is_empty() {
        bail!("at least one m is required");
    }
    let field = GainField::new(&scenario);
    let occ = occupancy_mode(settings);
    let sfx = suffix(settings);
    let mut report = Table::new(&MC_REPORT_COLUMNS);
    let mut conv = Table::new(&MC_CONVERGENCE_COLUMNS);
    let mut assoc = Table::new(&MC_ASSOCIATION_COLUMNS);
    let mut failures = 0;
    for (rc, control) in controls(&scenario, &settings.mc_tau, &settings.mc_beta)? {
        let stats = field.cell_stats(&control)?;
        for &m in &settings.m {
            let ms = metric_set(&stats, m, occ)?;
            let cfg = McConfig::new(m, settings.trials, settings.seed)?;
            let e = estimate(&scenario, &control, &cfg)?;
            let rows = [
                ("mu", ms.mu_m, e.mean_total, e.se_mean_total),
                ("sigma", ms.sigma_m, e.std_total, e.se_std_total),
                ("mu_u", ms.mu_u_m, e.mean_typical, e.se_mean_typical),
                ("sigma_u", ms.sigma_u_m, e.std_typical, e.se_std_typical),
            ];
            for (name, analytic, est, se) in rows {
                let z = se.map(|se| {
                    if se > 0.0 {
                        (analytic - est) / se
                    } else if analytic == est {
                        0.0
                    } else {
                        f64::INFINITY.copysign(analytic - est)
                    }
                });
                let pass = z.map(|z| z.abs() <= MC_TOLERANCE);
                if pass == Some(false) {
                    failures += 1;
                }
                let [a, b] = rc_cells(rc);
                let z_cell = match z {
                    Some(z) if z.is_finite() => Cell::Num(z),
                    _ => Cell::Null,
                };
                report.push(vec![
                    a,
                    b,
                    m.into(),
                    settings.trials.into(),
                    settings.seed.into(),
                    name.into(),
                    analytic.into(),
                    est.into(),
                    se.into(),
                    z_cell,
                    pass.map_or(Cell::Null, Cell::Bool),
                ]);
            }
            let [a, b] = rc_cells(rc);
            conv.push(vec![
                a,
                b,
                m.into(),
                settings.trials.into(),
                e.mean_fairness.into(),
                e.se_mean_fairness.into(),
                ms.c_bar.into(),
                (e.mean_fairness - ms.c_bar).abs().into(),
                e.mean_total.into(),
                ms.mu_bar.into(),
                (e.mean_total - ms.mu_bar).abs().into(),
            ]);
            for (i, (&pg, &ph)) in stats.p().iter().zip(&e.p_hat).enumerate() {
                let [a, b] = rc_cells(rc);
                assoc.push(vec![a, b, m.into(), (i + 1).into(), pg.into(), ph.into()]);
            }
        }
    }
    let files = vec![
        "settings.json".to_string(),
        report.write(out, &format!("mc_report{sfx}"), format)?,
        conv.write(out, &format!("mc_convergence{sfx}"), format)?,
        assoc.write(out, "mc_association", format)?,
    ];
    Ok(McOutcome { files, failures })
}

pub fn run_occupancy(ps: &[f64], m_max: u64, out: &Path, format: Format) -> Result<Vec<String>> {
    if m_max == 0 {
        bail!("--m-max must be at least 1");
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut curves = Table::new(&OCCUPANCY_COLUMNS);
    let mut crossing = Table::new(&CROSSING_COLUMNS);
    for &p in ps {
        if !(p > 0.0 && p <= 1.0) {
            bail!("p = {p} must lie in (0, 1]");
        }
        for m in 1..=m_max {
            let exact = expected_inverse_occupancy(m, p)?;
            let approx = expected_inverse_occupancy_approx(m, p)?;
            curves.push(vec![m.into(), p.into(), exact.into(), approx.into(), ((approx - exact) / exact).into()]);
        }
        let c = approximation_crossing(p, m_max)?;
        crossing.push(vec![p.into(), c.map_or(Cell::Null, Cell::from)]);
    }
    Ok(vec![curves.write(out, "occupancy", format)?, crossing.write(out, "occupancy_crossing", format)?])
}
