use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use fdcell_core::experiment::{run_experiment, sic_sweep, weight_sweep, ExperimentConfig};
use fdcell_core::metrics::{LinkClass, MetricsReport};
use fdcell_core::SchedulerMode;

mod output;

#[derive(Parser, Debug)]
#[command(name = "fdcell", version, about = "Full-duplex small cell + D2D scheduling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scheduler over a batch of scenarios and write CDFs and combination shares.
    Simulate {
        #[arg(long, default_value = "dpa")]
        mode: SchedulerMode,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Mean aggregate throughput per mode over a list of SIC values.
    SweepSic {
        /// SIC values in dB
        #[arg(long = "values", value_delimiter = ',', default_value = "65,75,85,95,105")]
        values: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "fpa,dpa,hd")]
        modes: Vec<SchedulerMode>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// DPA per-link throughputs over a list of D2D weights (DL and UL weights fixed at 1).
    SweepWeight {
        #[arg(long = "values", value_delimiter = ',', default_value = "0.2,0.4,0.6,0.8,1.0")]
        values: Vec<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print the default configuration as TOML.
    DefaultConfig,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// TOML experiment file; flags below override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenarios: Option<usize>,
    #[arg(long)]
    ttis: Option<usize>,
    #[arg(long = "sic-db")]
    sic_db: Option<f64>,
    #[arg(long = "w-d2d")]
    w_d2d: Option<f64>,
    /// Base seed; scenario i uses seed + i
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl CommonArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(n) = self.scenarios {
            cfg.run.num_scenarios = n;
        }
        if let Some(t) = self.ttis {
            cfg.run.num_ttis = t;
        }
        if let Some(s) = self.sic_db {
            cfg.scenario.sic = s;
        }
        if let Some(w) = self.w_d2d {
            cfg.utility.w_d2d = w;
        }
        if let Some(s) = self.seed {
            cfg.scenario.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_dir(&self) -> Result<&Path> {
        std::fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        Ok(&self.out)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { mode, common } => simulate(mode, &common),
        Command::SweepSic { values, modes, common } => sweep_sic(&values, &modes, &common),
        Command::SweepWeight { values, common } => sweep_weight(&values, &common),
        Command::DefaultConfig => {
            print!("{}", ExperimentConfig::default().to_toml_string());
            Ok(())
        }
    }
}

fn simulate(mode: SchedulerMode, common: &CommonArgs) -> Result<()> {
    let cfg = common.config()?;
    let out = common.out_dir()?;
    let traces = run_experiment(&cfg, mode)?;
    let report = MetricsReport::from_traces(&traces);

    let mut files = Vec::new();
    for class in LinkClass::ALL {
        let name = format!("cdf_{}.csv", class.name());
        output::write_cdf(&out.join(&name), report.throughputs(class))?;
        files.push(name);
    }
    output::write_combos(&out.join("combos.csv"), &report.combinations)?;
    files.push("combos.csv".into());

    let summary = output::Summary::from_report(&report);
    output::write_manifest(out, "simulate", &cfg, &[mode], &files, &summary)?;
    println!(
        "{mode}: aggregate {:.2} Mbit/s, simultaneous {:.1}%, {} -> {}",
        report.aggregate_throughput / 1e6,
        report.combinations.simultaneous,
        summary.energy_efficiency_gb_per_j.map_or("no energy spent".into(), |e| format!("{e:.4} Gb/J")),
        out.display()
    );
    Ok(())
}

fn sweep_sic(values: &[f64], modes: &[SchedulerMode], common: &CommonArgs) -> Result<()> {
    if values.is_empty() || modes.is_empty() {
        bail!("need at least one SIC value and one mode");
    }
    let cfg = common.config()?;
    let out = common.out_dir()?;
    let sweep = sic_sweep(&cfg, values, modes)?;
    output::write_sic_sweep(&out.join("sic_sweep.csv"), &sweep)?;
    output::write_manifest(out, "sweep-sic", &cfg, modes, &["sic_sweep.csv".into()], &sweep)?;
    for (m, mode) in sweep.modes.iter().enumerate() {
        let row: Vec<_> = sweep.throughput[m].iter().map(|t| format!("{:.2}", t / 1e6)).collect();
        println!("{mode}: {} Mbit/s", row.join(" "));
    }
    Ok(())
}

fn sweep_weight(values: &[f64], common: &CommonArgs) -> Result<()> {
    let cfg = common.config()?;
    let out = common.out_dir()?;
    let points = weight_sweep(&cfg, values)?;
    output::write_weight_sweep(&out.join("weight_sweep.csv"), &points)?;
    let medians: Vec<_> = points.iter().map(output::WeightSummary::from_point).collect();
    output::write_manifest(out, "sweep-weight", &cfg, &[SchedulerMode::Dpa], &["weight_sweep.csv".into()], &medians)?;
    for m in &medians {
        println!("w_d2d {}: median D2D {:.2} Mbit/s", m.w_d2d, m.d2d_median_bps / 1e6);
    }
    Ok(())
}
