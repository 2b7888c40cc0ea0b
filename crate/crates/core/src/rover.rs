//! Growth-driven rolling rover.
//!
//! Sprouts sit around the rim of a wheel at fixed angular spacing. The
//! engaged sprout pushes against the ground, so every millimetre it grows past
//! its contact length rolls the wheel by `1/R` radians:
//!
//! ```text
//! theta_phase(t) = (L(t) - L_s) / R        d(t) = R * theta_total(t)
//! ```
//!
//! Once `theta_phase` reaches the sprout spacing the next sprout takes over,
//! with its own `L_s` snapshotted at that moment. The handover is located at
//! the exact crossing time inside the step, so each completed phase adds
//! exactly `R * spacing` of travel.

use std::f64::consts::FRAC_PI_4;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::actuation::ForceProfile;
use crate::error::{Error, Result};
use crate::format::csv_num;
use crate::growth::GrowthParams;
use crate::time_grid;

/// Standard gravity, m/s².
pub const GRAVITY: f64 = 9.81;

pub const TRAJECTORY_HEADER: [&str; 5] = ["t_h", "theta_rad", "d_mm", "active_sprout", "status"];

/// Rolling resistance `mu_R * N` in newtons.
pub fn rolling_resistance(mu_r: f64, normal_force_n: f64) -> Result<f64> {
    if !(mu_r.is_finite() && mu_r >= 0.0) {
        return Err(Error::Domain(format!("rolling resistance coefficient must be >= 0, got {mu_r}")));
    }
    if !(normal_force_n.is_finite() && normal_force_n >= 0.0) {
        return Err(Error::Domain(format!("normal force must be >= 0, got {normal_force_n}")));
    }
    Ok(mu_r * normal_force_n)
}

/// Fully resolved rover configuration. Field names carry their units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoverConfig {
    pub radius_mm: f64,
    pub sprout_count: usize,
    pub spacing_rad: f64,
    pub robot_mass_g: f64,
    pub mu_r: f64,
    /// Length at which the first sprout touches the ground, and the minimum
    /// length any later sprout needs before it can engage.
    pub contact_length_mm: f64,
    /// Germination time of each sprout; a sprout's growth clock is
    /// `t - offset`.
    pub germination_offsets_h: Vec<f64>,
    pub growth: GrowthParams,
    pub profile: ForceProfile,
}

/// Rover configuration as read from JSON. Missing fields take the defaults
/// of [`RoverConfig::with_growth`] for the given (or dark) growth law.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoverConfigFile {
    pub radius_mm: Option<f64>,
    pub sprout_count: Option<usize>,
    pub spacing_rad: Option<f64>,
    pub robot_mass_g: Option<f64>,
    pub mu_r: Option<f64>,
    pub contact_length_mm: Option<f64>,
    pub germination_offsets_h: Option<Vec<f64>>,
    pub growth: Option<GrowthParams>,
    pub profile: Option<ForceProfile>,
}

impl RoverConfigFile {
    pub fn resolve(self) -> Result<RoverConfig> {
        let growth = self.growth.unwrap_or(GrowthParams::DARK);
        let mut cfg = RoverConfig {
            radius_mm: self.radius_mm.unwrap_or(12.5),
            sprout_count: self.sprout_count.unwrap_or(4),
            spacing_rad: self.spacing_rad.unwrap_or(FRAC_PI_4),
            robot_mass_g: self.robot_mass_g.unwrap_or(5.0),
            mu_r: self.mu_r.unwrap_or(0.01),
            contact_length_mm: self.contact_length_mm.unwrap_or(growth.l0()),
            germination_offsets_h: Vec::new(),
            growth,
            profile: self.profile.unwrap_or_else(ForceProfile::dark),
        };
        cfg.germination_offsets_h = match self.germination_offsets_h {
            Some(v) => v,
            None => cfg.staggered_offsets(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RoverConfig {
    /// 25 mm wheel, 5 g, four sprouts at 45°, dark growth and force profile.
    pub fn dark_default() -> Self {
        Self::with_growth(GrowthParams::DARK, ForceProfile::dark())
    }

    pub fn light_default() -> Self {
        Self::with_growth(GrowthParams::LIGHT, ForceProfile::light())
    }

    /// Default geometry for a growth law. The first sprout touches the ground
    /// at `t = 0` and later sprouts are staggered so each reaches contact
    /// length as its predecessor finishes its phase.
    pub fn with_growth(growth: GrowthParams, profile: ForceProfile) -> Self {
        RoverConfigFile { growth: Some(growth), profile: Some(profile), ..Default::default() }
            .resolve()
            .expect("default rover configuration is valid")
    }

    /// Offsets `i * T` where `T` is the time one sprout needs to grow from
    /// contact length through a full phase. All zero if that is unreachable.
    pub fn staggered_offsets(&self) -> Vec<f64> {
        let start = self.contact_length_mm.max(self.growth.l0());
        let end = start + self.radius_mm * self.spacing_rad;
        let period = match (self.growth.time_to_length(start), self.growth.time_to_length(end)) {
            (Ok(a), Ok(b)) => b - a,
            _ => 0.0,
        };
        (0..self.sprout_count).map(|i| i as f64 * period).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Input(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        positive("radius_mm", self.radius_mm)?;
        positive("spacing_rad", self.spacing_rad)?;
        positive("robot_mass_g", self.robot_mass_g)?;
        positive("contact_length_mm", self.contact_length_mm)?;
        if self.sprout_count == 0 {
            return Err(Error::Input("sprout_count must be at least 1".into()));
        }
        if !(self.mu_r.is_finite() && self.mu_r >= 0.0) {
            return Err(Error::Input(format!("mu_r must be >= 0, got {}", self.mu_r)));
        }
        if self.germination_offsets_h.len() != self.sprout_count {
            return Err(Error::Input(format!(
                "expected {} germination offsets, got {}",
                self.sprout_count,
                self.germination_offsets_h.len()
            )));
        }
        if self.germination_offsets_h.iter().any(|o| !o.is_finite()) {
            return Err(Error::Input("germination offsets must be finite".into()));
        }
        if self.germination_offsets_h.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Input("germination offsets must be non-decreasing".into()));
        }
        Ok(())
    }

    /// Rolling-resistance gate in mN for this robot's weight.
    pub fn gate_force_mn(&self) -> Result<f64> {
        let normal = self.robot_mass_g * 1e-3 * GRAVITY;
        Ok(rolling_resistance(self.mu_r, normal)? * 1e3)
    }

    /// Travel contributed by one full phase, mm.
    pub fn phase_travel_mm(&self) -> f64 {
        self.radius_mm * self.spacing_rad
    }

    /// Length of sprout `i` at time `t`; zero before germination.
    pub fn sprout_length(&self, i: usize, t: f64) -> f64 {
        let clock = t - self.germination_offsets_h[i];
        if clock < 0.0 {
            0.0
        } else {
            self.growth.length_at(clock).expect("clock is non-negative")
        }
    }

    /// Earliest time `>= not_before` at which sprout `i` is at least contact
    /// length, or `None` if it never gets there.
    fn engagement_time(&self, i: usize, not_before: f64) -> Option<f64> {
        let offset = self.germination_offsets_h[i];
        let clock = if self.contact_length_mm <= self.growth.l0() {
            0.0
        } else {
            self.growth.time_to_length(self.contact_length_mm).ok()?
        };
        Some(not_before.max(offset + clock))
    }

    /// Time at which sprout `i`, engaged at length `ls`, has rolled a full
    /// phase.
    fn completion_time(&self, i: usize, ls: f64) -> Option<f64> {
        let clock = self.growth.time_to_length(ls + self.phase_travel_mm()).ok()?;
        Some(self.germination_offsets_h[i] + clock)
    }
}

/// One sprout's contribution window, ignoring the stall gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub sprout: usize,
    pub engaged_at_h: f64,
    /// `L_s` of this sprout, mm.
    pub contact_length_mm: f64,
    /// `None` when the sprout stops growing before completing the phase.
    pub completed_at_h: Option<f64>,
}

/// Closed-form phase sequence: each sprout engages when its predecessor
/// completes (or later, once it reaches contact length).
pub fn phase_schedule(config: &RoverConfig) -> Result<Vec<Phase>> {
    config.validate()?;
    let mut phases = Vec::new();
    let mut cursor = 0.0;
    for i in 0..config.sprout_count {
        let Some(engaged_at_h) = config.engagement_time(i, cursor) else {
            break;
        };
        let ls = config.sprout_length(i, engaged_at_h);
        let completed_at_h = config.completion_time(i, ls);
        phases.push(Phase { sprout: i, engaged_at_h, contact_length_mm: ls, completed_at_h });
        match completed_at_h {
            Some(c) => cursor = c,
            None => break,
        }
    }
    Ok(phases)
}

/// Horizontal travel at time `t` assuming the rover never stalls.
pub fn predict_displacement(config: &RoverConfig, t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    let mut d = 0.0;
    for phase in phase_schedule(config)? {
        if t < phase.engaged_at_h {
            break;
        }
        match phase.completed_at_h {
            Some(c) if t >= c => d += config.phase_travel_mm(),
            _ => {
                d += config.sprout_length(phase.sprout, t) - phase.contact_length_mm;
                break;
            }
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoverStatus {
    Rolling,
    Stalled,
    Exhausted,
}

impl RoverStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RoverStatus::Rolling => "rolling",
            RoverStatus::Stalled => "stalled",
            RoverStatus::Exhausted => "exhausted",
        }
    }
}

impl std::str::FromStr for RoverStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rolling" => Ok(RoverStatus::Rolling),
            "stalled" => Ok(RoverStatus::Stalled),
            "exhausted" => Ok(RoverStatus::Exhausted),
            other => Err(Error::Input(format!("unknown rover status `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoverState {
    pub t: f64,
    pub theta_total: f64,
    pub d: f64,
    /// Index of the engaged (or next-to-engage) sprout; equals the sprout
    /// count once every sprout has completed its phase.
    pub active_index: usize,
    pub phases_completed: usize,
    pub sprout_lengths: Vec<f64>,
    pub status: RoverStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<RoverState>,
}

impl Trajectory {
    pub fn last(&self) -> &RoverState {
        self.states.last().expect("trajectory has an initial state")
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(TRAJECTORY_HEADER)?;
        for s in &self.states {
            w.write_record([
                csv_num(s.t),
                csv_num(s.theta_total),
                csv_num(s.d),
                s.active_index.to_string(),
                s.status.as_str().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One row of a trajectory CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t_h: f64,
    pub theta_rad: f64,
    pub d_mm: f64,
    pub active_sprout: usize,
    pub status: RoverStatus,
}

pub fn read_trajectory_csv<R: Read>(reader: R) -> Result<Vec<TrajectoryRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    if rdr.headers()?.iter().collect::<Vec<_>>() != TRAJECTORY_HEADER {
        return Err(Error::Input(format!("expected header `{}`", TRAJECTORY_HEADER.join(","))));
    }
    rdr.deserialize().map(|r| r.map_err(|e| Error::Input(e.to_string()))).collect()
}

/// Mutable run state, confined to one simulation.
struct Engine<'a> {
    cfg: &'a RoverConfig,
    gate_mn: f64,
    active: usize,
    /// `L_s` of the active sprout; `None` while waiting for it to reach
    /// contact length.
    contact: Option<f64>,
    theta_done: f64,
    theta_phase: f64,
    phases: usize,
    status: RoverStatus,
}

impl Engine<'_> {
    fn blocked(&self, stroke: f64) -> Result<bool> {
        Ok(self.cfg.profile.force_at(stroke.max(0.0))? < self.gate_mn)
    }

    /// Advances the run from `from` to `to`, handling any number of
    /// handovers inside the interval.
    fn advance(&mut self, from: f64, to: f64) -> Result<()> {
        let cfg = self.cfg;
        let mut cursor = from;
        while self.status == RoverStatus::Rolling {
            if self.active == cfg.sprout_count {
                self.status = RoverStatus::Exhausted;
                break;
            }
            let ls = match self.contact {
                Some(ls) => ls,
                None => match cfg.engagement_time(self.active, cursor) {
                    Some(e) if e <= to => {
                        let ls = cfg.sprout_length(self.active, e);
                        self.contact = Some(ls);
                        self.theta_phase = 0.0;
                        ls
                    }
                    // Waiting: the wheel holds still until the sprout is long
                    // enough to touch the ground.
                    _ => break,
                },
            };
            match cfg.completion_time(self.active, ls) {
                Some(c) if c <= to => {
                    if self.blocked(cfg.phase_travel_mm())? {
                        self.status = RoverStatus::Stalled;
                        break;
                    }
                    self.theta_done += cfg.spacing_rad;
                    self.theta_phase = 0.0;
                    self.phases += 1;
                    self.active += 1;
                    self.contact = None;
                    cursor = c;
                }
                _ => {
                    let stroke = cfg.sprout_length(self.active, to) - ls;
                    if self.blocked(stroke)? {
                        self.status = RoverStatus::Stalled;
                    } else {
                        self.theta_phase = stroke.max(0.0) / cfg.radius_mm;
                    }
                    break;
                }
            }
        }
        Ok(())
    }

    fn snapshot(&self, t: f64) -> RoverState {
        let theta_total = self.theta_done + self.theta_phase;
        RoverState {
            t,
            theta_total,
            d: self.cfg.radius_mm * theta_total,
            active_index: self.active,
            phases_completed: self.phases,
            sprout_lengths: (0..self.cfg.sprout_count).map(|i| self.cfg.sprout_length(i, t)).collect(),
            status: self.status,
        }
    }
}

/// Simulates the rover on a fixed grid `0, dt, 2dt, ..., t_end`.
///
/// At each step the engaged sprout must push with at least the rolling
/// resistance (force taken from the profile at its current stroke);
/// otherwise the run stalls and stays stalled. States keep being emitted
/// after a stall or once every sprout is spent.
pub fn simulate_rover(config: &RoverConfig, t_end: f64, dt: f64) -> Result<Trajectory> {
    config.validate()?;
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::Domain(format!("t_end must be > 0, got {t_end}")));
    }
    if !(dt.is_finite() && dt > 0.0 && dt <= 0.5) {
        return Err(Error::Domain(format!("dt must lie in (0, 0.5], got {dt}")));
    }
    let grid = time_grid(dt, t_end)?;
    let mut engine = Engine {
        cfg: config,
        gate_mn: config.gate_force_mn()?,
        active: 0,
        contact: None,
        theta_done: 0.0,
        theta_phase: 0.0,
        phases: 0,
        status: RoverStatus::Rolling,
    };
    engine.advance(0.0, 0.0)?;
    let mut states = Vec::with_capacity(grid.len());
    states.push(engine.snapshot(0.0));
    for w in grid.windows(2) {
        engine.advance(w[0], w[1])?;
        states.push(engine.snapshot(w[1]));
    }
    Ok(Trajectory { states })
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUANTUM: f64 = 12.5 * FRAC_PI_4;

    #[test]
    fn rolling_resistance_examples() {
        assert_eq!(rolling_resistance(0.0, 3.0).unwrap(), 0.0);
        let n = 5e-3 * GRAVITY;
        assert!((n - 0.04905).abs() < 1e-15);
        assert!((rolling_resistance(0.01, n).unwrap() - 4.905e-4).abs() < 1e-15);
        assert!((rolling_resistance(0.01, 0.098).unwrap() - 9.8e-4).abs() < 1e-15);
        assert!(rolling_resistance(-0.1, 1.0).is_err());
        assert!(rolling_resistance(0.1, -1.0).is_err());
        assert!((RoverConfig::dark_default().gate_force_mn().unwrap() - 0.4905).abs() < 1e-12);
    }

    #[test]
    fn defaults_match_rover_geometry() {
        let c = RoverConfig::dark_default();
        assert_eq!(c.radius_mm, 12.5);
        assert_eq!(c.sprout_count, 4);
        assert_eq!(c.robot_mass_g, 5.0);
        assert_eq!(c.contact_length_mm, GrowthParams::DARK.l0());
        assert_eq!(c.germination_offsets_h[0], 0.0);
        assert!((c.phase_travel_mm() - 9.8175).abs() < 1e-4);
    }

    #[test]
    fn first_phase_completes_at_inverted_time() {
        let c = RoverConfig::dark_default();
        let t1 = c.growth.time_to_length(c.contact_length_mm + QUANTUM).unwrap();
        let phases = phase_schedule(&c).unwrap();
        assert_eq!(phases[0].engaged_at_h, 0.0);
        assert!((phases[0].completed_at_h.unwrap() - t1).abs() < 1e-12);
        assert!((predict_displacement(&c, t1).unwrap() - QUANTUM).abs() < 1e-12);
        assert_eq!(predict_displacement(&c, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn completed_phases_are_quantised() {
        let c = RoverConfig::dark_default();
        let phases = phase_schedule(&c).unwrap();
        for (n, p) in phases.iter().enumerate() {
            if let Some(done) = p.completed_at_h {
                let d = predict_displacement(&c, done).unwrap();
                assert!((d - (n + 1) as f64 * QUANTUM).abs() < 1e-9, "phase {n}: {d}");
            }
        }
    }

    #[test]
    fn heavy_resistance_stalls_immediately() {
        let mut c = RoverConfig::dark_default();
        c.mu_r = 100.0;
        assert!(c.gate_force_mn().unwrap() > c.profile.max_force());
        let traj = simulate_rover(&c, 5.0, 0.1).unwrap();
        assert_eq!(traj.states[1].status, RoverStatus::Stalled);
        assert!(traj.states.iter().all(|s| s.d == 0.0));
        assert_eq!(traj.last().status, RoverStatus::Stalled);
    }

    #[test]
    fn chain_rule_within_phase() {
        let c = RoverConfig::dark_default();
        let traj = simulate_rover(&c, 15.0, 0.1).unwrap();
        for w in traj.states.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            assert_eq!(a.active_index, b.active_index);
            let dl = b.sprout_lengths[0] - a.sprout_lengths[0];
            assert!((b.d - a.d - dl).abs() < 1e-9);
        }
        let last = traj.last();
        assert!((last.d - (last.sprout_lengths[0] - c.contact_length_mm)).abs() < 1e-9);
    }

    #[test]
    fn simulation_matches_prediction() {
        let c = RoverConfig::dark_default();
        let traj = simulate_rover(&c, 80.0, 0.1).unwrap();
        for s in &traj.states {
            let p = predict_displacement(&c, s.t).unwrap();
            assert!((s.d - p).abs() < 1e-9, "t={} sim={} pred={p}", s.t, s.d);
        }
    }

    #[test]
    fn runs_out_of_sprouts() {
        let c = RoverConfig::dark_default();
        let traj = simulate_rover(&c, 200.0, 0.5).unwrap();
        let last = traj.last();
        assert_eq!(last.status, RoverStatus::Exhausted);
        assert_eq!(last.active_index, 4);
        assert_eq!(last.phases_completed, 4);
        assert!((last.d - 4.0 * QUANTUM).abs() < 1e-9);
    }

    #[test]
    fn waits_for_short_sprout() {
        let mut c = RoverConfig::dark_default();
        c.germination_offsets_h = vec![0.0, 30.0, 30.0, 30.0];
        let traj = simulate_rover(&c, 35.0, 0.1).unwrap();
        let t1 = phase_schedule(&c).unwrap()[0].completed_at_h.unwrap();
        assert!(t1 < 30.0);
        for s in &traj.states {
            if s.t > t1 && s.t < 30.0 {
                assert_eq!(s.status, RoverStatus::Rolling);
                assert_eq!(s.active_index, 1);
                assert!((s.d - QUANTUM).abs() < 1e-12);
            }
        }
        assert!(traj.last().d > QUANTUM);
    }

    #[test]
    fn unreachable_contact_never_moves() {
        let mut c = RoverConfig::dark_default();
        c.contact_length_mm = 200.0;
        let traj = simulate_rover(&c, 10.0, 0.5).unwrap();
        assert!(traj.states.iter().all(|s| s.d == 0.0 && s.status == RoverStatus::Rolling));
        assert_eq!(predict_displacement(&c, 10.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let c = RoverConfig::dark_default();
        assert!(matches!(simulate_rover(&c, 10.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(simulate_rover(&c, 10.0, 0.6), Err(Error::Domain(_))));
        assert!(matches!(simulate_rover(&c, 0.0, 0.1), Err(Error::Domain(_))));
        let mut bad = c.clone();
        bad.germination_offsets_h = vec![0.0, 2.0, 1.0, 3.0];
        assert!(matches!(simulate_rover(&bad, 1.0, 0.1), Err(Error::Input(_))));
        let mut bad = c.clone();
        bad.radius_mm = 0.0;
        assert!(bad.validate().is_err());
        let mut bad = c;
        bad.sprout_count = 0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn config_file_materialises_defaults() {
        let file: RoverConfigFile = serde_json::from_str(r#"{"mu_r": 0.02}"#).unwrap();
        let cfg = file.resolve().unwrap();
        let mut expected = RoverConfig::dark_default();
        expected.mu_r = 0.02;
        assert_eq!(cfg, expected);
        let json = serde_json::to_string(&cfg).unwrap();
        let again: RoverConfigFile = serde_json::from_str(&json).unwrap();
        assert_eq!(again.resolve().unwrap(), cfg);
        assert!(serde_json::from_str::<RoverConfigFile>(r#"{"radius": 1}"#).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let traj = simulate_rover(&RoverConfig::dark_default(), 3.0, 0.5).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let rows = read_trajectory_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), traj.states.len());
        assert_eq!(rows[0].status, RoverStatus::Rolling);
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("t_h,theta_rad,d_mm,active_sprout,status\n0,0,0,0,rolling\n"));
    }
}
