use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use cellse::ControlMode;
use cellse_cli::config::{Axis, Settings};
use cellse_cli::run::{run_mc, run_occupancy, run_partition, run_sweep};
use cellse_cli::table::Format;
use clap::{Args, Parser, Subcommand, ValueEnum};

const AFTER_HELP: &str = "\
Output tables (17 significant digits; JSON files hold {\"columns\": [...], \"rows\": [[...]]} with the same cells):
  partition: partition_NNNN (x[,y],station; station 0 marks the deadzone), partition_index (index,tau,beta,file),
             partition_stats (tau,beta,cell,p,psi,psi2), boundary (tau,beta,sigma,gamma,y_minus,y_plus,case,
             c1_length,c2_length,c1_grid,c2_grid; two-station line only)
  sweep:     stats_<mode>, bullet_<mode>_<kind>[_m<m>] (tau,beta,x,y,on_frontier,label),
             frontier_<mode>_<kind>[_m<m>] (tau,beta,x,y), dominance (mode,kind,m,comparable,
             all_weakly_dominated,strictly_dominated,frontier_points,max_gap_x,max_gap_y)
  mc:        mc_report (tau,beta,m,trials,seed,metric,analytic,estimate,se,z,pass),
             mc_convergence (tau,beta,m,trials,mean_fairness,se_fairness,c_bar,fairness_gap,mean_total,mu_bar,total_gap),
             mc_association (tau,beta,m,cell,p_grid,p_hat)
  occupancy: occupancy (m,p,exact,approx,relative_error), occupancy_crossing (p,m_crossing)
Files computed with --approx-occupancy carry an _approx suffix.";

#[derive(Parser)]
#[command(name = "cellse", version, about = "Spectral-efficiency statistics under joint cell-bias and power control", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write cell assignments on the quadrature grid for each control.
    Partition(Common),
    /// Sweep a control grid and extract bullets and Pareto frontiers.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Restrict to one control mode; all three by default.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Compare closed-form metrics with Monte Carlo estimates.
    Mc(Common),
    /// Exact and approximate inverse-occupancy curves.
    Occupancy {
        /// Cell probability (repeatable).
        #[arg(long = "p", default_values_t = vec![0.25, 0.75])]
        p: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        m_max: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
}

#[derive(Args)]
struct Common {
    /// two_bs_i, two_bs_ii, two_bs_iii or quincunx.
    #[arg(long)]
    preset: Option<String>,
    /// JSON file whose fields override the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Log power ratio grid as lo:hi:count.
    #[arg(long, allow_hyphen_values = true)]
    grid_tau: Option<Axis>,
    /// Log bias ratio grid as lo:hi:count.
    #[arg(long, allow_hyphen_values = true)]
    grid_beta: Option<Axis>,
    /// Number of users (repeatable).
    #[arg(long)]
    m: Vec<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Quadrature points per axis.
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Use the constant-time approximation of E[1{M>0}/M].
    #[arg(long)]
    approx_occupancy: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Joint,
    Power,
    Bias,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

enum Target {
    Partition,
    Sweep,
    Mc,
}

impl Common {
    fn settings(&self, target: Target) -> Result<Settings> {
        let mut s = Settings::load(self.preset.as_deref(), self.config.as_deref())?;
        if let Some(t) = self.grid_tau {
            match target {
                Target::Partition => s.partition_tau = t,
                Target::Sweep => (s.tau, s.unilateral_tau) = (t, t),
                Target::Mc => s.mc_tau = t,
            }
        }
        if let Some(b) = self.grid_beta {
            match target {
                Target::Partition => s.partition_beta = b,
                Target::Sweep => (s.beta, s.unilateral_beta) = (b, b),
                Target::Mc => s.mc_beta = b,
            }
        }
        if !self.m.is_empty() {
            s.m = self.m.clone();
        }
        if let Some(t) = self.trials {
            s.trials = t;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(r) = self.resolution {
            s.resolution = r;
        }
        s.approx_occupancy |= self.approx_occupancy;
        Ok(s)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Partition(c) => {
            let files = run_partition(&c.settings(Target::Partition)?, &c.out, c.format.into())?;
            println!("wrote {} files to {}", files.len(), c.out.display());
        }
        Command::Sweep { common: c, mode } => {
            let modes = match mode {
                None => ControlMode::ALL.to_vec(),
                Some(ModeArg::Joint) => vec![ControlMode::Joint],
                Some(ModeArg::Power) => vec![ControlMode::PowerOnly],
                Some(ModeArg::Bias) => vec![ControlMode::BiasOnly],
            };
            let files = run_sweep(&c.settings(Target::Sweep)?, &modes, &c.out, c.format.into())?;
            println!("wrote {} files to {}", files.len(), c.out.display());
        }
        Command::Mc(c) => {
            let outcome = run_mc(&c.settings(Target::Mc)?, &c.out, c.format.into())?;
            println!("wrote {} files to {}", outcome.files.len(), c.out.display());
            if outcome.failures > 0 {
                eprintln!("{} comparison(s) outside the Monte Carlo tolerance", outcome.failures);
                return Ok(ExitCode::from(1));
            }
        }
        Command::Occupancy { p, m_max, out, format } => {
            let files = run_occupancy(&p, m_max, &out, format.into())?;
            println!("wrote {} files to {}", files.len(), out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}
