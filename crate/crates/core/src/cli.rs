//! Command-line front end: `track`, `synth`, `eval` and `tune`.
//!
//! Exit codes: 0 on success, 2 for usage, parse and configuration errors,
//! 1 for anything else (I/O, numerical failure).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::TrackerConfig;
use crate::error::{Error, Result};
use crate::eval::metrics::{evaluate, ClearMetrics};
use crate::eval::synth::{generate, CameraScript, SceneSpec};
use crate::io;
use crate::tracker::run_sequence;
use crate::tuner::{self, Metric, SearchSpace};

#[derive(Debug, Parser)]
#[command(name = "groundtrack", version, about = "Ground-plane multi-object tracker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CameraArg {
    Static,
    Pan,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Mota,
    Idf1,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Track a detection file and write MOTChallenge results.
    Track {
        #[arg(long)]
        dets: PathBuf,
        #[arg(long)]
        homography: PathBuf,
        #[arg(long)]
        affines: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Frame rate; sets dt = 1/fps. Defaults to the config's dt.
        #[arg(long)]
        fps: Option<f64>,
    },
    /// Generate a synthetic crossing scene bundle.
    Synth {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        agents: usize,
        #[arg(long, default_value_t = 300)]
        frames: i64,
        #[arg(long, value_enum, default_value_t = CameraArg::Pan)]
        camera: CameraArg,
        #[arg(long, default_value_t = 1.0)]
        noise_px: f64,
        #[arg(long, default_value_t = 0.1)]
        dropout: f64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Score results against ground truth.
    Eval {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        res: PathBuf,
    },
    /// Pattern-search the tunable parameters on the synthetic benchmark.
    Tune {
        #[arg(long)]
        config_init: Option<PathBuf>,
        /// Rows `name lower upper step`; unlisted parameters stay fixed.
        /// Without it every tunable parameter is searched.
        #[arg(long)]
        bounds: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MetricArg::Mota)]
        metric: MetricArg,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        /// Where to write the `iter,param_vector,value` trace.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Where to write the best config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::InvalidConfig(_)
        | Error::InvalidThresholds { .. }
        | Error::InvalidSpec(_)
        | Error::SingularHomography(_) => 2,
        _ => 1,
    }
}

fn print_metrics(m: &ClearMetrics) {
    println!("MOTA {:.4}", m.mota);
    println!("IDF1 {:.4}", m.idf1);
    println!("IDSW {}", m.idsw);
    println!("FP {}", m.fp);
    println!("FN {}", m.fn_);
    println!("GT {}", m.gt);
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Track { dets, homography, affines, config, out, fps } => {
            let mut cfg = match &config {
                Some(p) => TrackerConfig::load(p)?,
                None => TrackerConfig::default(),
            };
            if let Some(fps) = fps {
                cfg.set("fps", fps)?;
            }
            cfg.validate()?;
            let bundle = io::SequenceBundle::load(&dets, &homography, affines.as_deref(), 1.0 / cfg.dt)?;
            let results = run_sequence(&bundle.detections, &bundle.h0, &bundle.affines, &cfg)?;
            io::write_results(&results, &out)?;
            log::info!("wrote {} frames to {}", results.len(), out.display());
        }
        Command::Synth { seed, agents, frames, camera, noise_px, dropout, out_dir } => {
            let camera = match camera {
                CameraArg::Static => CameraScript::Static,
                CameraArg::Pan => CameraScript::Pan { speed: 2.0, amplitude: 100.0 },
            };
            let mut spec = SceneSpec::crossing(seed, agents, frames, camera);
            spec.noise_px = noise_px;
            spec.dropout = dropout;
            let scene = generate(&spec)?;
            let paths = io::write_bundle(&out_dir, &scene.detections, &scene.h0, &scene.affines, &scene.gt.labeled())?;
            println!("{}", paths.detections.display());
        }
        Command::Eval { gt, res } => {
            let m = evaluate(&io::read_labeled(&gt)?, &io::read_labeled(&res)?, 0.5);
            print_metrics(&m);
        }
        Command::Tune { config_init, bounds, metric, max_iters, trace, out } => {
            let base = match &config_init {
                Some(p) => TrackerConfig::load(p)?,
                None => TrackerConfig::default(),
            };
            base.validate()?;
            let space = match &bounds {
                Some(p) => SearchSpace::from_bounds(&base, &std::fs::read_to_string(p)?, p)?,
                None => SearchSpace::around(&base),
            };
            let metric = match metric {
                MetricArg::Mota => Metric::Mota,
                MetricArg::Idf1 => Metric::Idf1,
            };
            let (best, result) = tuner::tune_on_benchmark(&base, &space, metric, max_iters)?;
            if let Some(p) = &trace {
                std::fs::write(p, tuner::format_trace(&result.trace))?;
            }
            if let Some(p) = &out {
                std::fs::write(p, best.to_text())?;
            }
            println!("initial {:.6}", result.trace[0].value);
            println!("best {:.6}", result.value);
            print!("{}", best.to_text());
        }
    }
    Ok(())
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let code = match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    let _ = std::io::stdout().flush();
    code
}
