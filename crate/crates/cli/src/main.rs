//! `phyto`: growth fitting, actuation densities and rover / gripper
//! simulations from the command line.
//!
//! Exit codes: 0 success, 2 bad input, 3 outputs written but the run failed
//! softly (fit not converged, rover stalled).

mod run;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phyto_core::audit;
use phyto_core::fit::FitOptions;
use phyto_core::gripper::{GripperConfigFile, LedSchedule};
use phyto_core::rover::RoverConfigFile;
use phyto_core::{Error, GrowthParams, Result};

use run::{digest_file, execute, replay, Outcome, RunConfig};

#[derive(Parser)]
#[command(name = "phyto", version, about = "Plant-growth actuator toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate length and growth rate of a logistic law.
    Growth {
        #[command(flatten)]
        growth: GrowthArgs,
        #[arg(long, default_value_t = 55.0)]
        t_end: f64,
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Generate a seeded synthetic length series.
    Synth {
        #[command(flatten)]
        growth: GrowthArgs,
        #[arg(long, default_value_t = 40.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1.0 / 6.0)]
        dt: f64,
        /// Half-width of the uniform noise, mm.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Fit a logistic law to a `t_h,length_mm` CSV.
    Fit {
        input: PathBuf,
        #[arg(long)]
        max_iterations: Option<usize>,
        #[arg(long)]
        step_tolerance: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Power and/or energy density of a seed actuator.
    Density {
        #[arg(long)]
        force_mn: Option<f64>,
        #[arg(long)]
        velocity_mm_h: Option<f64>,
        #[arg(long)]
        f_start_mn: Option<f64>,
        #[arg(long)]
        f_end_mn: Option<f64>,
        #[arg(long)]
        stroke_mm: Option<f64>,
        #[arg(long, default_value_t = 0.033)]
        mass_g: f64,
        /// Print the related discrepancy notes.
        #[arg(long)]
        ledger: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Simulate the sprout-driven rover.
    Rover {
        /// JSON configuration; missing fields take defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 40.0)]
        t_end: f64,
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        #[arg(long)]
        ledger: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Simulate the phototropic gripper.
    Gripper {
        #[arg(long)]
        config: Option<PathBuf>,
        /// `t_start_h,t_end_h,target` CSV; defaults to pick-and-place.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long, default_value_t = 21.0)]
        t_end: f64,
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Re-run a previous invocation from its manifest.json.
    Replay {
        manifest: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Print every known discrepancy note.
    Ledger,
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Env {
    Dark,
    Light,
}

#[derive(Args)]
struct GrowthArgs {
    /// Parameter preset; individual values override it.
    #[arg(long, value_enum, default_value = "dark")]
    env: Env,
    /// Growth rate, 1/h.
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    /// Carrying capacity, mm.
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Initial length, mm.
    #[arg(long, allow_negative_numbers = true)]
    l0: Option<f64>,
}

impl GrowthArgs {
    fn resolve(&self) -> Result<GrowthParams> {
        let base = match self.env {
            Env::Dark => GrowthParams::DARK,
            Env::Light => GrowthParams::LIGHT,
        };
        GrowthParams::new(self.r.unwrap_or(base.r()), self.k.unwrap_or(base.k()), self.l0.unwrap_or(base.l0()))
            .map_err(|e| Error::Input(e.to_string()))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    let (run, out) = match cmd {
        Command::Growth { growth, t_end, dt, out } => {
            (RunConfig::Growth { growth: growth.resolve()?, t_end_h: t_end, dt_h: dt }, out)
        }
        Command::Synth { growth, t_end, dt, noise, seed, out } => {
            (RunConfig::Synth { growth: growth.resolve()?, t_end_h: t_end, dt_h: dt, noise_mm: noise, seed }, out)
        }
        Command::Fit { input, max_iterations, step_tolerance, out } => {
            let mut options = FitOptions::default();
            if let Some(n) = max_iterations {
                options.max_iterations = n;
            }
            if let Some(tol) = step_tolerance {
                options.step_tolerance = tol;
            }
            options.validate().map_err(|e| Error::Input(e.to_string()))?;
            (RunConfig::Fit { input: digest_file(&input)?, options }, out)
        }
        Command::Density { force_mn, velocity_mm_h, f_start_mn, f_end_mn, stroke_mm, mass_g, ledger, out } => {
            (RunConfig::Density { force_mn, velocity_mm_h, f_start_mn, f_end_mn, stroke_mm, mass_g, ledger }, out)
        }
        Command::Rover { config, t_end, dt, ledger, out } => {
            let file: RoverConfigFile = match config {
                Some(p) => read_json(&p)?,
                None => RoverConfigFile::default(),
            };
            let config = file.resolve().map_err(|e| Error::Input(e.to_string()))?;
            (RunConfig::Rover { config, t_end_h: t_end, dt_h: dt, ledger }, out)
        }
        Command::Gripper { config, schedule, t_end, dt, out } => {
            let file: GripperConfigFile = match config {
                Some(p) => read_json(&p)?,
                None => GripperConfigFile::default(),
            };
            let config = file.resolve().map_err(|e| Error::Input(e.to_string()))?;
            let schedule = match schedule {
                Some(p) => {
                    let f =
                        fs::File::open(&p).map_err(|e| Error::Input(format!("cannot read {}: {e}", p.display())))?;
                    LedSchedule::read_csv(f).map_err(|e| Error::Input(e.to_string()))?
                }
                None => LedSchedule::pick_and_place(),
            };
            (RunConfig::Gripper { config, schedule, t_end_h: t_end, dt_h: dt }, out)
        }
        Command::Replay { manifest, out } => return replay(&manifest, &out.out_dir),
        Command::Ledger => {
            let mut stdout = std::io::stdout().lock();
            for d in audit::ALL {
                if writeln!(stdout, "{d}").is_err() {
                    break;
                }
            }
            return Ok(Outcome::Success);
        }
    };
    execute(&run, &out.out_dir)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
