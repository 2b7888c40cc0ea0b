//! Growing plants treated as actuators.
//!
//! The crate is organised around the logistic stem-growth law and the two
//! robots built on top of it:
//!
//! * [`growth`] evaluates the logistic length law, its rate and inversion.
//! * [`fit`] recovers growth parameters from a displacement series.
//! * [`actuation`] holds force–stroke profiles and power/energy densities.
//! * [`rover`] simulates the growth-driven rolling robot.
//! * [`gripper`] simulates phototropic fingers under a timed LED schedule.
//! * [`audit`] lists published figures that the models cannot reproduce.
//!
//! Units are fixed per module: hours and millimetres for growth, mN and grams
//! for forces and seed masses. SI conversion only happens in [`actuation`]
//! and in the rolling-resistance gate of [`rover`].

pub mod actuation;
pub mod audit;
pub mod error;
pub mod fit;
pub mod format;
pub mod gripper;
pub mod growth;
pub mod rover;

pub use error::{Error, Result};
pub use growth::{GrowthParams, GrowthSample, PeakRate};

/// Sample times `0, dt, 2dt, ...` up to `t_end`, always ending exactly at
/// `t_end`.
///
/// A grid point within `1e-9 * dt` of `t_end` is snapped onto it, so
/// `time_grid(1/6, 40)` yields exactly 241 points.
pub fn time_grid(dt: f64, t_end: f64) -> Result<Vec<f64>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Domain(format!("time step must be positive, got {dt}")));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::Domain(format!("end time must be non-negative, got {t_end}")));
    }
    let tol = 1e-9 * dt;
    let mut grid = vec![0.0];
    let mut i = 1u64;
    loop {
        let t = i as f64 * dt;
        if t >= t_end - tol {
            break;
        }
        grid.push(t);
        i += 1;
    }
    if t_end > 0.0 {
        grid.push(t_end);
    }
    Ok(grid)
}
