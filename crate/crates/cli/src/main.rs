//! `haps`: run HAPS coverage campaigns and the relay consumption assessment.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use haps_core::architecture::Architecture;
use haps_core::channel::NtnTables;
use haps_core::config::{ScenarioConfig, PRESETS};
use haps_core::consumption::{haps_relay_assessment, relay_advantage, RelayScenario};
use haps_core::geometry::Point3;
use haps_core::report::{
    read_cdf, read_consumption_csv, read_users_csv, write_cdf, write_consumption_csv,
    write_users_csv, AggregateReport,
};
use haps_core::simulation::run_campaign;

/// Environment variable naming the default NTN channel table.
const TABLE_ENV: &str = "HAPS_NTN_TABLE";

#[derive(Debug, Parser)]
#[command(
    name = "haps",
    version,
    about = "HAPS bent-pipe vs regenerative system simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one or more campaigns and write per-user, report and CDF files.
    Run(Common),
    /// Power-efficiency factors and relay verdict per terminal distance.
    Consumption {
        #[command(flatten)]
        common: Common,
        /// Evaluate a single hand case instead of the configured sweep (meters).
        #[arg(long, requires_all = ["d2", "d3"])]
        d1: Option<f64>,
        #[arg(long, requires_all = ["d1", "d3"])]
        d2: Option<f64>,
        #[arg(long, requires_all = ["d1", "d2"])]
        d3: Option<f64>,
    },
    /// Check a configuration and print its canonical form.
    Validate(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (TOML). Missing keys take their defaults.
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario; repeat for a sweep, or `all`.
    #[arg(long, value_name = "NAME")]
    preset: Vec<String>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["bp", "rg"])]
    arch: Option<String>,
    /// NTN channel table CSV; beats the config file and $HAPS_NTN_TABLE.
    #[arg(long, value_name = "PATH")]
    ntn_table: Option<PathBuf>,
}

/// A resolved scenario plus where its table comes from.
struct Scenario {
    config: ScenarioConfig,
    table: Option<PathBuf>,
}

impl Common {
    fn scenarios(&self) -> Result<Vec<Scenario>> {
        let mut bases: Vec<(ScenarioConfig, Option<PathBuf>)> = Vec::new();
        if let Some(path) = &self.config {
            let cfg = ScenarioConfig::load(path)
                .with_context(|| format!("loading {}", path.display()))?;
            // relative table paths are relative to the config file
            let table = cfg.ntn_table.as_ref().map(|t| {
                let t = PathBuf::from(t);
                match path.parent() {
                    Some(dir) if t.is_relative() => dir.join(t),
                    _ => t,
                }
            });
            bases.push((cfg, table));
        }
        for name in &self.preset {
            if name == "all" {
                for p in PRESETS {
                    bases.push((ScenarioConfig::preset(p)?, None));
                }
            } else {
                bases.push((ScenarioConfig::preset(name)?, None));
            }
        }
        if bases.is_empty() {
            bases.push((ScenarioConfig::default(), None));
        }

        let env_table = std::env::var_os(TABLE_ENV).map(PathBuf::from);
        bases
            .into_iter()
            .map(|(mut config, cfg_table)| {
                if let Some(seed) = self.seed {
                    config.seed = seed;
                }
                if let Some(arch) = &self.arch {
                    config.architecture = Architecture::parse(arch).expect("restricted by clap");
                }
                if let Some(out) = &self.out {
                    config.output.dir = out.display().to_string();
                }
                config.validate()?;
                let table = self
                    .ntn_table
                    .clone()
                    .or(cfg_table)
                    .or_else(|| env_table.clone());
                Ok(Scenario { config, table })
            })
            .collect()
    }
}

impl Scenario {
    fn tables(&self) -> Result<NtnTables<f64>> {
        match &self.table {
            Some(path) => NtnTables::from_path(path)
                .with_context(|| format!("loading NTN table {}", path.display())),
            None => Ok(NtnTables::rural_default()),
        }
    }
}

fn cmd_run(common: &Common) -> Result<()> {
    let scenarios = common.scenarios()?;
    let sweep = scenarios.len() > 1;
    for s in &scenarios {
        let cfg = &s.config;
        let mut dir = PathBuf::from(&cfg.output.dir);
        if sweep {
            dir.push(&cfg.name);
        }
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;

        let result =
            run_campaign(cfg, s.tables()?).with_context(|| format!("running {}", cfg.name))?;
        let report = AggregateReport::new(cfg, &result);

        let users = dir.join("users.csv");
        write_users_csv(&users, &result.terminals)?;
        report.write(dir.join("report.toml"))?;
        fs::write(dir.join("config.toml"), cfg.to_toml_string())
            .with_context(|| format!("writing {}", dir.join("config.toml").display()))?;
        if cfg.output.write_cdf {
            let dl: Vec<f64> = result.terminals.iter().map(|t| t.dl_se).collect();
            let ul: Vec<f64> = result.terminals.iter().map(|t| t.ul_se).collect();
            write_cdf(dir.join("cdf_dl.txt"), &dl)?;
            write_cdf(dir.join("cdf_ul.txt"), &ul)?;
        }

        // read everything back before declaring success
        ensure!(
            read_users_csv(&users)?.len() == result.terminals.len(),
            "{} does not round-trip",
            users.display()
        );
        ensure!(
            AggregateReport::read(dir.join("report.toml"))? == report,
            "report does not round-trip"
        );
        if cfg.output.write_cdf {
            for f in ["cdf_dl.txt", "cdf_ul.txt"] {
                ensure!(
                    read_cdf(dir.join(f))?.len() == result.terminals.len(),
                    "{f} does not round-trip"
                );
            }
        }

        println!(
            "{:<30} DL mean {:.3} edge {:.3} | UL mean {:.3} edge {:.3} -> {}",
            cfg.name,
            result.dl.mean_se,
            result.dl.cell_edge_se,
            result.ul.mean_se,
            result.ul.cell_edge_se,
            dir.display()
        );
    }
    Ok(())
}

fn cmd_consumption(common: &Common, hand: Option<(f64, f64, f64)>) -> Result<()> {
    let scenarios = common.scenarios()?;
    if scenarios.len() != 1 {
        bail!("consumption takes a single scenario");
    }
    let cfg = &scenarios[0].config;
    let chains = cfg.relay_chains().context("invalid consumption chain")?;
    println!("H_relay  = {:.6}", chains.h_relay);
    println!("H_source = {:.6}", chains.h_source);

    if let Some((d1, d2, d3)) = hand {
        let adv = relay_advantage(&RelayScenario {
            d1,
            d2,
            d3,
            g_rx_relay: chains.g_rx_relay,
            g_rx_sink: chains.g_rx_sink,
            h_relay: chains.h_relay,
            h_source: chains.h_source,
        })?;
        println!("d1,d2,d3,RHS,verdict");
        println!("{d1},{d2},{d3},{},{}", adv.rhs, adv.verdict);
        return Ok(());
    }

    let haps = cfg.flight_pattern()?.center;
    let terminals: Vec<Point3<f64>> = cfg
        .consumption
        .terminal_distances_m
        .iter()
        .map(|&r| Point3::ground(r, 0.0))
        .collect();
    let rows = haps_relay_assessment(haps, cfg.gateway_position(), &terminals, &chains)?;

    let dir = PathBuf::from(&cfg.output.dir);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join("consumption.csv");
    write_consumption_csv(&path, &rows)?;
    ensure!(
        read_consumption_csv(&path)?.len() == rows.len(),
        "{} does not round-trip",
        path.display()
    );

    println!(
        "{:>10} {:>10} {:>12} {:>10}  verdict",
        "d1_m", "d3_m", "(d1/d3)^2", "RHS"
    );
    for r in &rows {
        println!(
            "{:>10.0} {:>10.0} {:>12.4} {:>10.4}  {}{}",
            r.d1,
            r.d3,
            r.d1_d3_sq,
            r.advantage.rhs,
            r.advantage.verdict,
            if r.within_distance_bound {
                ""
            } else {
                "  (outside (d1/d3)^2 < 25/4)"
            }
        );
    }
    println!("-> {}", path.display());
    Ok(())
}

fn cmd_validate(common: &Common) -> Result<()> {
    for s in common.scenarios()? {
        s.tables()?;
        print!("{}", s.config.to_toml_string());
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(c) => cmd_run(c),
        Command::Consumption { common, d1, d2, d3 } => {
            let hand = match (d1, d2, d3) {
                (Some(a), Some(b), Some(c)) => Some((*a, *b, *c)),
                _ => None,
            };
            cmd_consumption(common, hand)
        }
        Command::Validate(c) => cmd_validate(c),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
