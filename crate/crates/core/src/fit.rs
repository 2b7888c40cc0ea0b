//! Damped least-squares estimation of logistic growth parameters.
//!
//! The solver is a three-parameter Levenberg–Marquardt loop with Marquardt
//! diagonal scaling: the damping factor is multiplied by ten after a step that
//! fails to reduce the squared error and divided by ten after one that does.
//! Parameters are projected back onto `r > 0, 0 < L0 < K` after every trial
//! step.

use std::io::{Read, Write};

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::csv_num;
use crate::growth::{GrowthParams, GrowthSample};
use crate::time_grid;

pub const SAMPLE_HEADER: [&str; 2] = ["t_h", "length_mm"];

const DAMPING_FACTOR: f64 = 10.0;
const DAMPING_MIN: f64 = 1e-15;
const DAMPING_MAX: f64 = 1e16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Relative parameter change below which the fit is declared converged.
    pub step_tolerance: f64,
    pub damping_init: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_iterations: 200, step_tolerance: 1e-8, damping_init: 1e-3 }
    }
}

impl FitOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Input("max_iterations must be positive".into()));
        }
        for (name, v) in [("step_tolerance", self.step_tolerance), ("damping_init", self.damping_init)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Input(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Outcome of a fit. `residuals[i] = length_i - L(t_i)` in sample order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub params: GrowthParams,
    pub rmse: f64,
    pub iterations: usize,
    pub converged: bool,
    pub residuals: Vec<f64>,
}

/// Fits the logistic law to `samples` starting from [`initial_guess`].
pub fn fit_logistic(samples: &[GrowthSample], options: &FitOptions) -> Result<FitReport> {
    let init = initial_guess(samples)?;
    fit_logistic_from(samples, init, options)
}

/// Fits the logistic law starting from a caller-supplied point.
pub fn fit_logistic_from(samples: &[GrowthSample], init: GrowthParams, options: &FitOptions) -> Result<FitReport> {
    check_samples(samples)?;
    options.validate()?;

    let mut p = Vector3::new(init.r(), init.k(), init.l0());
    let mut cost = sse(&p, samples);
    let mut damping = options.damping_init;
    let mut converged = cost == 0.0;
    let mut iterations = 0;

    while !converged && iterations < options.max_iterations {
        iterations += 1;
        let (jtj, jtr) = normal_equations(&p, samples);
        let mut scaled = jtj;
        for i in 0..3 {
            scaled[(i, i)] += damping * jtj[(i, i)].max(f64::EPSILON);
        }
        let Some(delta) = scaled.lu().solve(&jtr) else {
            damping = (damping * DAMPING_FACTOR).min(DAMPING_MAX);
            continue;
        };
        let trial = project(p + delta);
        let small =
            (0..3).all(|i| (trial[i] - p[i]).abs() <= options.step_tolerance * (p[i].abs() + options.step_tolerance));
        let trial_cost = sse(&trial, samples);
        if trial_cost.is_finite() && trial_cost < cost {
            p = trial;
            cost = trial_cost;
            damping = (damping / DAMPING_FACTOR).max(DAMPING_MIN);
        } else {
            damping = (damping * DAMPING_FACTOR).min(DAMPING_MAX);
        }
        // A vanishing trial step means no representable improvement is left,
        // whether or not that last step was taken.
        converged = small || cost == 0.0;
    }

    let params = to_params(&p)?;
    let residuals: Vec<f64> = samples.iter().map(|s| s.length - model(&p, s.t)).collect();
    Ok(FitReport { params, rmse: rms(&residuals), iterations, converged, residuals })
}

/// Starting point for the fit.
///
/// `K` is 5% above the largest length (inflated by 1.5x until it clears every
/// sample), `L0` is the length at the earliest time, and `r` is the slope of a
/// least-squares line through `ln(L / (K - L))` against `t`.
pub fn initial_guess(samples: &[GrowthSample]) -> Result<GrowthParams> {
    check_samples(samples)?;
    let max_len = samples.iter().map(|s| s.length).fold(f64::MIN, f64::max);
    let mut k = 1.05 * max_len;
    while samples.iter().any(|s| s.length >= k) {
        k *= 1.5;
    }

    let t_min = samples.iter().map(|s| s.t).fold(f64::MAX, f64::min);
    let first = samples.iter().find(|s| s.t == t_min).expect("non-empty samples");
    let l0 = first.length.min(0.99 * k);

    let n = samples.len() as f64;
    let logit: Vec<f64> = samples.iter().map(|s| (s.length / (k - s.length)).ln()).collect();
    let t_mean = samples.iter().map(|s| s.t).sum::<f64>() / n;
    let y_mean = logit.iter().sum::<f64>() / n;
    let (sxy, sxx) = samples.iter().zip(&logit).fold((0.0, 0.0), |(sxy, sxx), (s, y)| {
        let dt = s.t - t_mean;
        (sxy + dt * (y - y_mean), sxx + dt * dt)
    });
    let slope = sxy / sxx;
    let r = if slope.is_finite() && slope > 0.0 { slope } else { 1e-3 };

    GrowthParams::new(r, k, l0)
}

/// Root-mean-square deviation of `samples` from the curve.
pub fn rmse(params: &GrowthParams, samples: &[GrowthSample]) -> f64 {
    let p = Vector3::new(params.r(), params.k(), params.l0());
    (sse(&p, samples) / samples.len() as f64).sqrt()
}

/// Samples of `params` every `dt` hours on `[0, t_end]`, with optional
/// uniform noise in `[-noise_amp, noise_amp]` drawn from a seeded ChaCha8
/// stream.
///
/// With `noise_amp == 0` each length equals [`GrowthParams::length_at`]
/// exactly. Noisy lengths are floored at 1e-9 mm to stay positive.
pub fn synth_series(
    params: &GrowthParams,
    dt: f64,
    t_end: f64,
    noise_amp: f64,
    seed: u64,
) -> Result<Vec<GrowthSample>> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::Input(format!("t_end must be > 0, got {t_end}")));
    }
    if !(noise_amp.is_finite() && noise_amp >= 0.0) {
        return Err(Error::Input(format!("noise amplitude must be >= 0, got {noise_amp}")));
    }
    let grid = time_grid(dt, t_end).map_err(|e| Error::Input(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    grid.into_iter()
        .map(|t| {
            let mut length = params.length_at(t)?;
            if noise_amp > 0.0 {
                length = (length + rng.random_range(-noise_amp..=noise_amp)).max(1e-9);
            }
            Ok(GrowthSample { t, length })
        })
        .collect()
}

/// Reads a `t_h,length_mm` CSV. Lines starting with `#` are skipped.
pub fn read_samples<R: Read>(reader: R) -> Result<Vec<GrowthSample>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != SAMPLE_HEADER {
        return Err(Error::Input(format!(
            "expected header `{}`, found `{}`",
            SAMPLE_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let s: GrowthSample = row.map_err(|e| Error::Input(e.to_string()))?;
        s.validate()?;
        out.push(s);
    }
    Ok(out)
}

pub fn write_samples<W: Write>(writer: W, samples: &[GrowthSample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SAMPLE_HEADER)?;
    for s in samples {
        w.write_record([csv_num(s.t), csv_num(s.length)])?;
    }
    w.flush()?;
    Ok(())
}

fn check_samples(samples: &[GrowthSample]) -> Result<()> {
    if samples.len() < 4 {
        return Err(Error::Input(format!("need at least 4 samples to fit, got {}", samples.len())));
    }
    for s in samples {
        s.validate()?;
    }
    let mut times: Vec<f64> = samples.iter().map(|s| s.t).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    if times.len() < 3 {
        return Err(Error::Input(format!("need at least 3 distinct sample times, got {}", times.len())));
    }
    let first = samples[0].length;
    if samples.iter().all(|s| s.length == first) {
        return Err(Error::Input("constant-length series carries no growth information".into()));
    }
    Ok(())
}

fn project(p: Vector3<f64>) -> Vector3<f64> {
    let r = p[0].max(1e-12);
    let k = p[1].max(1e-9);
    let l0 = p[2].clamp(k * 1e-12, k * (1.0 - 1e-12));
    Vector3::new(r, k, l0)
}

fn to_params(p: &Vector3<f64>) -> Result<GrowthParams> {
    GrowthParams::new(p[0], p[1], p[2])
}

fn model(p: &Vector3<f64>, t: f64) -> f64 {
    let (r, k, l0) = (p[0], p[1], p[2]);
    if t == 0.0 {
        return l0;
    }
    k / (1.0 + (k - l0) / l0 * (-r * t).exp())
}

fn sse(p: &Vector3<f64>, samples: &[GrowthSample]) -> f64 {
    samples
        .iter()
        .map(|s| {
            let e = s.length - model(p, s.t);
            e * e
        })
        .sum()
}

fn rms(residuals: &[f64]) -> f64 {
    (residuals.iter().map(|e| e * e).sum::<f64>() / residuals.len() as f64).sqrt()
}

/// Accumulates `JᵀJ` and `Jᵀ(y - f)` with the analytic Jacobian of the
/// logistic law with respect to `(r, K, L0)`.
fn normal_equations(p: &Vector3<f64>, samples: &[GrowthSample]) -> (Matrix3<f64>, Vector3<f64>) {
    let (r, k, l0) = (p[0], p[1], p[2]);
    let odds = (k - l0) / l0;
    let mut jtj = Matrix3::zeros();
    let mut jtr = Vector3::zeros();
    for s in samples {
        let e = (-r * s.t).exp();
        let d = 1.0 + odds * e;
        let d2 = d * d;
        let grad = Vector3::new(k * odds * s.t * e / d2, 1.0 / d - k * e / (l0 * d2), k * k * e / (l0 * l0 * d2));
        jtj += grad * grad.transpose();
        jtr += grad * (s.length - model(p, s.t));
    }
    (jtj, jtr)
}
