use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use salfd::metrics::{noise_sweep, run_metrics, standard_noise, Mode};
use salfd::planfile::{self, PlanFile};
use salfd::tracefile::{read_config, read_trace, trace_to_string};
use salfd_core::fixtures::{fixture, fixtures, Fixture};
use salfd_core::sensor::expand_demo;
use salfd_core::{learn, reverse_plan, NoiseConfig, PipelineConfig};

#[derive(Parser)]
#[command(name = "salfd", version, about = "Learn LEGO construction plans from demonstrations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a construction plan from a demonstration trace.
    Learn {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Take the top-ranked candidate without simulation verification.
        #[arg(long)]
        no_verify: bool,
        /// Also write the full per-step report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Paired LfD / SaLfD success rates over fixtures, noise points and seeds.
    Metrics {
        /// `all` or a comma-separated list of fixture names.
        #[arg(long, default_value = "all")]
        fixtures: String,
        /// `zero`, `standard`, `sweep`, or a JSON file holding a list of noise configs.
        #[arg(long, default_value = "standard")]
        noise_grid: String,
        #[arg(long, default_value_t = 50)]
        seeds: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the disassembly plan of an assembly plan.
    Reverse {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the observation frames of a trace as JSON.
    Render {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a built-in fixture as a trace file.
    Fixture {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use the standard noise preset instead of a clean sensor.
        #[arg(long)]
        noisy: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Serve the HTTP API for interactive demonstrations.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn config(path: Option<&Path>) -> anyhow::Result<PipelineConfig> {
    match path {
        Some(p) => read_config(p).with_context(|| format!("reading config {}", p.display())),
        None => Ok(PipelineConfig::default()),
    }
}

fn write_out(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Learn { trace, config: cfg_path, out, no_verify, report } => {
            let mut cfg = config(cfg_path.as_deref())?;
            if no_verify {
                cfg.verification_enabled = false;
            }
            let trace =
                read_trace(&trace, &cfg.catalog).with_context(|| format!("reading trace {}", trace.display()))?;
            let start = Instant::now();
            let mut r = learn(&trace, &cfg)?;
            r.elapsed = Some(start.elapsed());
            let file = PlanFile { bounds: cfg.bounds, plan: r.plan.clone() };
            write_out(Some(&out), &planfile::serialize(&file, &cfg.catalog)?)?;
            if let Some(p) = report {
                write_out(Some(&p), &(serde_json::to_string_pretty(&r)? + "\n"))?;
            }
            for s in &r.steps {
                match (&s.outcome, &s.failure) {
                    (Some(o), _) => eprintln!(
                        "step {:>3}: {:?} s={:.3} trials={} skipped={}",
                        s.step,
                        o.via,
                        o.score,
                        o.trials.len(),
                        o.skipped.len()
                    ),
                    (None, Some(f)) => eprintln!("step {:>3}: FAILED {f}", s.step),
                    (None, None) => {}
                }
            }
            eprintln!(
                "learned {} of {} operations, structure cost {}, {}",
                r.plan.len(),
                trace.events.len(),
                r.cost,
                if r.success { "success" } else { "FAILURE" }
            );
            Ok(if r.success { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Metrics { fixtures: which, noise_grid, seeds, config: cfg_path, out } => {
            let cfg = config(cfg_path.as_deref())?;
            let fx = select_fixtures(&which)?;
            let grid = parse_grid(&noise_grid)?;
            let seeds: Vec<u64> = (1..=seeds).collect();
            let report = run_metrics(&fx, &grid, &seeds, &cfg);
            for (i, n) in grid.iter().enumerate() {
                eprintln!(
                    "noise[{i}] σd={:.3} σb={:.3} p_dark={:.2} p_flip={:.3}: LfD {:.1}%  SaLfD {:.1}%",
                    n.depth_sigma,
                    n.bias_sigma,
                    n.p_dark,
                    n.p_flip,
                    100.0 * report.mean_success(i, Mode::Lfd),
                    100.0 * report.mean_success(i, Mode::Salfd),
                );
            }
            write_out(Some(&out), &(serde_json::to_string_pretty(&report)? + "\n"))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Reverse { plan, out } => {
            let cat = salfd_core::Catalog::default();
            let text = std::fs::read_to_string(&plan).with_context(|| format!("reading {}", plan.display()))?;
            let file = planfile::parse(&text, &cat)?;
            let rev = PlanFile { bounds: file.bounds, plan: reverse_plan(&file.plan)? };
            write_out(out.as_deref(), &planfile::serialize(&rev, &cat)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Render { trace, out } => {
            let cfg = PipelineConfig::default();
            let trace = read_trace(&trace, &cfg.catalog)?;
            let frames = expand_demo(&trace, &cfg.catalog, cfg.bounds)?;
            write_out(out.as_deref(), &(serde_json::to_string(&frames)? + "\n"))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Fixture { name, out, noisy, seed } => {
            let Some(f) = fixture(&name) else { bail!("unknown fixture {name:?}") };
            let noise = if noisy { standard_noise() } else { NoiseConfig::ZERO }.with_seed(seed);
            let cfg = PipelineConfig { noise, ..PipelineConfig::default() };
            write_out(out.as_deref(), &trace_to_string(&cfg.trace(f.events), &cfg.catalog)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Serve { port, host, config: cfg_path } => {
            let cfg = config(cfg_path.as_deref())?;
            let addr = std::net::SocketAddr::new(host, port);
            let rt = tokio::runtime::Runtime::new()?;
            eprintln!("listening on http://{addr}");
            rt.block_on(salfd::server::serve(cfg, addr)).with_context(|| format!("serving on {addr}"))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn select_fixtures(which: &str) -> anyhow::Result<Vec<Fixture>> {
    if which == "all" {
        return Ok(fixtures());
    }
    which.split(',').map(|n| fixture(n.trim()).with_context(|| format!("unknown fixture {n:?}"))).collect()
}

fn parse_grid(spec: &str) -> anyhow::Result<Vec<NoiseConfig>> {
    Ok(match spec {
        "zero" => vec![NoiseConfig::ZERO],
        "standard" => vec![standard_noise()],
        "sweep" => noise_sweep(),
        path => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading noise grid {path}"))?;
            serde_json::from_str(&text).with_context(|| format!("parsing noise grid {path}"))?
        }
    })
}
