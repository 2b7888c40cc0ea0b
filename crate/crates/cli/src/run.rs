//! Resolved runs: every subcommand is turned into a [`RunConfig`] with all
//! defaults materialised, executed, and recorded in a manifest that can be
//! replayed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use phyto_core::actuation::{energy_density, power_density, SeedSpec};
use phyto_core::audit;
use phyto_core::fit::{self, FitOptions};
use phyto_core::format::csv_num;
use phyto_core::gripper::{simulate_gripper, GripperConfig, LedSchedule};
use phyto_core::rover::{simulate_rover, RoverConfig, RoverStatus};
use phyto_core::{time_grid, Error, GrowthParams, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Outputs were written but the run did not reach its goal (fit did not
    /// converge, rover stalled).
    SoftFailure,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::SoftFailure => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum RunConfig {
    Growth {
        growth: GrowthParams,
        t_end_h: f64,
        dt_h: f64,
    },
    Synth {
        growth: GrowthParams,
        t_end_h: f64,
        dt_h: f64,
        noise_mm: f64,
        seed: u64,
    },
    Fit {
        input: InputDigest,
        options: FitOptions,
    },
    Density {
        force_mn: Option<f64>,
        velocity_mm_h: Option<f64>,
        f_start_mn: Option<f64>,
        f_end_mn: Option<f64>,
        stroke_mm: Option<f64>,
        mass_g: f64,
        ledger: bool,
    },
    Rover {
        config: RoverConfig,
        t_end_h: f64,
        dt_h: f64,
        ledger: bool,
    },
    Gripper {
        config: GripperConfig,
        schedule: LedSchedule,
        t_end_h: f64,
        dt_h: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub run: RunConfig,
    /// Output file names, relative to the output directory.
    pub outputs: Vec<String>,
}

pub fn digest_file(path: &Path) -> Result<InputDigest> {
    let bytes = fs::read(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let path = fs::canonicalize(path)?;
    Ok(InputDigest { path: path.to_string_lossy().into_owned(), sha256: hex::encode(Sha256::digest(&bytes)) })
}

/// Writes named files into an output directory and remembers their names.
struct Outputs {
    dir: PathBuf,
    names: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), names: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.names.push(name.to_string());
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

/// Executes a run, writing its outputs and manifest into `out_dir`.
pub fn execute(run: &RunConfig, out_dir: &Path) -> Result<Outcome> {
    let mut out = Outputs::new(out_dir)?;
    let outcome = match run {
        RunConfig::Growth { growth, t_end_h, dt_h } => run_growth(&mut out, growth, *t_end_h, *dt_h)?,
        RunConfig::Synth { growth, t_end_h, dt_h, noise_mm, seed } => {
            let samples = fit::synth_series(growth, *dt_h, *t_end_h, *noise_mm, *seed)?;
            let mut buf = Vec::new();
            fit::write_samples(&mut buf, &samples)?;
            out.write("series.csv", &buf)?;
            Outcome::Success
        }
        RunConfig::Fit { input, options } => run_fit(&mut out, input, options)?,
        RunConfig::Density { force_mn, velocity_mm_h, f_start_mn, f_end_mn, stroke_mm, mass_g, ledger } => {
            let seed = SeedSpec::new(*mass_g).map_err(|e| Error::Input(e.to_string()))?;
            let mut doc = serde_json::Map::new();
            doc.insert("mass_g".into(), json!(mass_g));
            let mut any = false;
            match (force_mn, velocity_mm_h) {
                (Some(f), Some(v)) => {
                    let p = power_density(*f, *v, &seed).map_err(as_input)?;
                    doc.insert("force_mN".into(), json!(f));
                    doc.insert("velocity_mm_h".into(), json!(v));
                    doc.insert("power_density_W_kg".into(), json!(p));
                    eprintln!(
                        "note: published power densities do not follow from force x velocity / mass; see ledger entry [{}]",
                        audit::POWER_DENSITY.id
                    );
                    any = true;
                }
                (None, None) => {}
                _ => return Err(Error::Input("power density needs both --force-mn and --velocity-mm-h".into())),
            }
            match (f_start_mn, f_end_mn, stroke_mm) {
                (Some(a), Some(b), Some(s)) => {
                    let e = energy_density(*a, *b, *s, &seed).map_err(as_input)?;
                    doc.insert("f_start_mN".into(), json!(a));
                    doc.insert("f_end_mN".into(), json!(b));
                    doc.insert("stroke_mm".into(), json!(s));
                    doc.insert("energy_density_J_kg".into(), json!(e));
                    any = true;
                }
                (None, None, None) => {}
                _ => return Err(Error::Input("energy density needs --f-start-mn, --f-end-mn and --stroke-mm".into())),
            }
            if !any {
                return Err(Error::Input("nothing to compute: give power and/or energy inputs".into()));
            }
            if *ledger {
                print_ledger(&[&audit::POWER_DENSITY, &audit::INITIAL_VELOCITY]);
            }
            out.json("density.json", &doc)?;
            println!("{}", serde_json::to_string(&doc).expect("json"));
            Outcome::Success
        }
        RunConfig::Rover { config, t_end_h, dt_h, ledger } => run_rover(&mut out, config, *t_end_h, *dt_h, *ledger)?,
        RunConfig::Gripper { config, schedule, t_end_h, dt_h } => {
            let run = simulate_gripper(config, schedule, *t_end_h, *dt_h).map_err(as_input)?;
            let mut buf = Vec::new();
            run.write_trajectories_csv(&mut buf)?;
            out.write("trajectories.csv", &buf)?;
            let mut buf = Vec::new();
            run.write_events_csv(&mut buf)?;
            out.write("events.csv", &buf)?;
            println!("{}", serde_json::to_string(&run.events).expect("json"));
            Outcome::Success
        }
    };

    let manifest = RunManifest {
        tool: "phyto".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        run: run.clone(),
        outputs: out.names.clone(),
    };
    out.json(MANIFEST_FILE, &manifest)?;
    Ok(outcome)
}

/// Re-executes a manifest, checking that file inputs are unchanged.
pub fn replay(manifest_path: &Path, out_dir: &Path) -> Result<Outcome> {
    let text = fs::read_to_string(manifest_path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", manifest_path.display())))?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| Error::Input(format!("bad manifest: {e}")))?;
    if let RunConfig::Fit { input, .. } = &manifest.run {
        let now = digest_file(Path::new(&input.path))?;
        if now.sha256 != input.sha256 {
            return Err(Error::Input(format!("input {} changed since the manifest was written", input.path)));
        }
    }
    execute(&manifest.run, out_dir)
}

fn as_input(e: Error) -> Error {
    match e {
        Error::Io(_) => e,
        other => Error::Input(other.to_string()),
    }
}

fn print_ledger(entries: &[&audit::Discrepancy]) {
    for d in entries {
        eprintln!("ledger: {d}");
    }
}

fn run_growth(out: &mut Outputs, growth: &GrowthParams, t_end: f64, dt: f64) -> Result<Outcome> {
    let grid = time_grid(dt, t_end).map_err(as_input)?;
    let peak = growth.peak_rate();
    let mut buf = Vec::new();
    {
        let mut w = csvw(&mut buf);
        w.write_record(["t_h", "length_mm", "rate_mm_h"]).map_err(Error::from)?;
        for t in grid {
            w.write_record([csv_num(t), csv_num(growth.length_at(t)?), csv_num(growth.rate_at(t)?)])
                .map_err(Error::from)?;
        }
        w.flush()?;
    }
    writeln!(
        buf,
        "# peak_rate_mm_h={},length_at_peak_mm={},time_at_peak_h={}",
        csv_num(peak.rate),
        csv_num(peak.length_at_peak),
        csv_num(peak.time_at_peak)
    )?;
    out.write("growth.csv", &buf)?;
    println!("{}", serde_json::to_string(&peak).expect("json"));
    Ok(Outcome::Success)
}

fn run_fit(out: &mut Outputs, input: &InputDigest, options: &FitOptions) -> Result<Outcome> {
    let bytes = fs::read(&input.path).map_err(|e| Error::Input(format!("cannot read {}: {e}", input.path)))?;
    let samples = fit::read_samples(bytes.as_slice()).map_err(as_input)?;
    let report = fit::fit_logistic(&samples, options).map_err(as_input)?;
    let doc = json!({
        "r_per_h": report.params.r(),
        "k_mm": report.params.k(),
        "l0_mm": report.params.l0(),
        "rmse_mm": report.rmse,
        "iterations": report.iterations,
        "converged": report.converged,
    });
    out.json("fit.json", &doc)?;
    let mut buf = Vec::new();
    {
        let mut w = csvw(&mut buf);
        w.write_record(["t_h", "length_mm", "fitted_mm", "residual_mm"]).map_err(Error::from)?;
        for (s, e) in samples.iter().zip(&report.residuals) {
            w.write_record([csv_num(s.t), csv_num(s.length), csv_num(s.length - e), csv_num(*e)])
                .map_err(Error::from)?;
        }
        w.flush()?;
    }
    out.write("residuals.csv", &buf)?;
    println!("{}", serde_json::to_string(&doc).expect("json"));
    Ok(if report.converged { Outcome::Success } else { Outcome::SoftFailure })
}

fn run_rover(out: &mut Outputs, config: &RoverConfig, t_end: f64, dt: f64, ledger: bool) -> Result<Outcome> {
    let traj = simulate_rover(config, t_end, dt).map_err(as_input)?;
    let gate = config.gate_force_mn()?;
    eprintln!("rolling-resistance gate: {} mN", csv_num(gate));
    if ledger {
        print_ledger(&[&audit::ROLLING_RESISTANCE]);
    }
    let mut buf = Vec::new();
    traj.write_csv(&mut buf)?;
    out.write("trajectory.csv", &buf)?;
    let last = traj.last();
    let summary = json!({
        "t_h": last.t,
        "d_mm": last.d,
        "theta_rad": last.theta_total,
        "phases": last.phases_completed,
        "active_sprout": last.active_index,
        "status": last.status,
        "gate_force_mN": gate,
    });
    out.json("summary.json", &summary)?;
    println!("{}", serde_json::to_string(&summary).expect("json"));
    Ok(if last.status == RoverStatus::Stalled { Outcome::SoftFailure } else { Outcome::Success })
}

fn csvw<W: Write>(w: W) -> csv::Writer<W> {
    csv::Writer::from_writer(w)
}
