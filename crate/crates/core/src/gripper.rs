//! Phototropic plant fingers.
//!
//! Each finger is a planar chain of straight segments. Every step the tip
//! grows by the logistic length increment and turns toward the active light
//! by
//!
//! ```text
//! turn = kappa * growth * sin(azimuth - heading)
//! ```
//!
//! clamped so the heading never overshoots the light direction. Lights are
//! either absolute azimuths or symbolic: `inner` points from each fingertip
//! to the object centre, `outer` the opposite way.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::format::csv_num;
use crate::growth::GrowthParams;
use crate::time_grid;

pub const SCHEDULE_HEADER: [&str; 3] = ["t_start_h", "t_end_h", "target"];
pub const TRAJECTORY_HEADER: [&str; 5] = ["t_h", "finger", "tip_x_mm", "tip_y_mm", "heading_rad"];
pub const EVENTS_HEADER: [&str; 2] = ["t_h", "kind"];

/// Maps an angle to `[-pi, pi]`. Odd in its argument, so mirrored scenes
/// stay bit-identical.
pub fn wrap_angle(mut a: f64) -> f64 {
    while a > PI {
        a -= TAU;
    }
    while a < -PI {
        a += TAU;
    }
    a
}

/// New heading after `delta_growth` mm of growth under light from
/// `light_azimuth` (`None` = darkness).
pub fn tropism_step(heading: f64, light_azimuth: Option<f64>, delta_growth: f64, kappa: f64) -> Result<f64> {
    if !(delta_growth.is_finite() && delta_growth >= 0.0) {
        return Err(Error::Domain(format!("growth increment must be >= 0, got {delta_growth}")));
    }
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::Domain(format!("tropic gain must be >= 0, got {kappa}")));
    }
    let Some(azimuth) = light_azimuth else {
        return Ok(heading);
    };
    let error = wrap_angle(azimuth - heading);
    let turn = kappa * delta_growth * error.sin();
    let turn = turn.clamp(-error.abs(), error.abs());
    Ok(heading + turn)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub length_mm: f64,
    pub heading_rad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Finger {
    pub base_mm: [f64; 2],
    pub segments: Vec<Segment>,
    /// Germination time relative to the run start; the growth clock is
    /// `t - offset`.
    pub growth_clock_offset_h: f64,
}

impl Finger {
    pub fn validate(&self) -> Result<()> {
        if self.base_mm.iter().any(|v| !v.is_finite()) || !self.growth_clock_offset_h.is_finite() {
            return Err(Error::Input("finger base and clock offset must be finite".into()));
        }
        for s in &self.segments {
            if !(s.length_mm.is_finite() && s.length_mm > 0.0 && s.heading_rad.is_finite()) {
                return Err(Error::Input(format!("invalid finger segment {s:?}")));
            }
        }
        Ok(())
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length_mm).sum()
    }

    pub fn tip(&self) -> [f64; 2] {
        self.segments.iter().fold(self.base_mm, |[x, y], s| {
            [x + s.length_mm * s.heading_rad.cos(), y + s.length_mm * s.heading_rad.sin()]
        })
    }

    /// Heading of the last segment.
    pub fn tip_heading(&self) -> Option<f64> {
        self.segments.last().map(|s| s.heading_rad)
    }

    fn clock(&self, t: f64) -> f64 {
        (t - self.growth_clock_offset_h).max(0.0)
    }
}

/// Absolute angle between the first and last segment headings.
pub fn bend_angle(finger: &Finger) -> Result<f64> {
    match (finger.segments.first(), finger.segments.last()) {
        (Some(a), Some(b)) => Ok(wrap_angle(b.heading_rad - a.heading_rad).abs()),
        _ => Err(Error::Input("finger has no segments".into())),
    }
}

/// Where a light interval points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LightTarget {
    /// Toward the object centre, resolved per fingertip.
    Inner,
    /// Away from the object centre, resolved per fingertip.
    Outer,
    /// Fixed direction in radians.
    Azimuth(f64),
}

impl LightTarget {
    fn mirrored(self) -> Self {
        match self {
            LightTarget::Azimuth(a) => LightTarget::Azimuth(-a),
            other => other,
        }
    }
}

impl fmt::Display for LightTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LightTarget::Inner => f.write_str("inner"),
            LightTarget::Outer => f.write_str("outer"),
            LightTarget::Azimuth(a) => write!(f, "{a}"),
        }
    }
}

impl FromStr for LightTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inner" => Ok(LightTarget::Inner),
            "outer" => Ok(LightTarget::Outer),
            other => match other.parse::<f64>() {
                Ok(a) if a.is_finite() => Ok(LightTarget::Azimuth(a)),
                _ => Err(Error::Input(format!(
                    "light target must be `inner`, `outer` or an azimuth in radians, got `{other}`"
                ))),
            },
        }
    }
}

impl Serialize for LightTarget {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LightTarget {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightInterval {
    pub t_start_h: f64,
    pub t_end_h: f64,
    pub target: LightTarget,
}

/// Non-overlapping light intervals in time order. Gaps are darkness.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<LightInterval>", into = "Vec<LightInterval>")]
pub struct LedSchedule {
    intervals: Vec<LightInterval>,
}

impl TryFrom<Vec<LightInterval>> for LedSchedule {
    type Error = Error;

    fn try_from(v: Vec<LightInterval>) -> Result<Self> {
        LedSchedule::new(v)
    }
}

impl From<LedSchedule> for Vec<LightInterval> {
    fn from(s: LedSchedule) -> Self {
        s.intervals
    }
}

impl LedSchedule {
    pub fn new(intervals: Vec<LightInterval>) -> Result<Self> {
        for iv in &intervals {
            if !(iv.t_start_h.is_finite() && iv.t_end_h.is_finite() && iv.t_start_h < iv.t_end_h) {
                return Err(Error::Input(format!(
                    "light interval needs t_start < t_end, got [{}, {})",
                    iv.t_start_h, iv.t_end_h
                )));
            }
        }
        if intervals.windows(2).any(|w| w[1].t_start_h < w[0].t_end_h) {
            return Err(Error::Input("light intervals must be ordered and non-overlapping".into()));
        }
        Ok(Self { intervals })
    }

    /// Inner LEDs for 0–11 h, outer LEDs for 11–21 h.
    pub fn pick_and_place() -> Self {
        Self::new(vec![
            LightInterval { t_start_h: 0.0, t_end_h: 11.0, target: LightTarget::Inner },
            LightInterval { t_start_h: 11.0, t_end_h: 21.0, target: LightTarget::Outer },
        ])
        .expect("built-in schedule is valid")
    }

    pub fn intervals(&self) -> &[LightInterval] {
        &self.intervals
    }

    /// Light on at time `t`; intervals are half-open `[start, end)`.
    pub fn active_at(&self, t: f64) -> Option<LightTarget> {
        self.intervals.iter().find(|iv| iv.t_start_h <= t && t < iv.t_end_h).map(|iv| iv.target)
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        if rdr.headers()?.iter().collect::<Vec<_>>() != SCHEDULE_HEADER {
            return Err(Error::Input(format!("expected header `{}`", SCHEDULE_HEADER.join(","))));
        }
        let intervals = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<LightInterval>, _>>()
            .map_err(|e| Error::Input(e.to_string()))?;
        Self::new(intervals)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(SCHEDULE_HEADER)?;
        for iv in &self.intervals {
            let target = match iv.target {
                LightTarget::Azimuth(a) => csv_num(a),
                other => other.to_string(),
            };
            w.write_record([csv_num(iv.t_start_h), csv_num(iv.t_end_h), target])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Schedule for the scene reflected across the x axis.
    pub fn mirrored(&self) -> Self {
        Self {
            intervals: self.intervals.iter().map(|iv| LightInterval { target: iv.target.mirrored(), ..*iv }).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GripperConfig {
    pub fingers: Vec<Finger>,
    pub growth: GrowthParams,
    /// Radians of turn per mm of growth at 90° misalignment.
    pub kappa_rad_per_mm: f64,
    pub object_center_mm: [f64; 2],
    pub object_radius_mm: f64,
    pub grasp_epsilon_mm: f64,
    pub release_hysteresis_mm: f64,
}

/// Gripper configuration as read from JSON; missing fields take the
/// [`GripperConfig::default`] values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GripperConfigFile {
    pub fingers: Option<Vec<Finger>>,
    pub growth: Option<GrowthParams>,
    pub kappa_rad_per_mm: Option<f64>,
    pub object_center_mm: Option<[f64; 2]>,
    pub object_radius_mm: Option<f64>,
    pub grasp_epsilon_mm: Option<f64>,
    pub release_hysteresis_mm: Option<f64>,
}

impl GripperConfigFile {
    pub fn resolve(self) -> Result<GripperConfig> {
        let d = GripperConfig::default();
        let cfg = GripperConfig {
            fingers: self.fingers.unwrap_or(d.fingers),
            growth: self.growth.unwrap_or(d.growth),
            kappa_rad_per_mm: self.kappa_rad_per_mm.unwrap_or(d.kappa_rad_per_mm),
            object_center_mm: self.object_center_mm.unwrap_or(d.object_center_mm),
            object_radius_mm: self.object_radius_mm.unwrap_or(d.object_radius_mm),
            grasp_epsilon_mm: self.grasp_epsilon_mm.unwrap_or(d.grasp_epsilon_mm),
            release_hysteresis_mm: self.release_hysteresis_mm.unwrap_or(d.release_hysteresis_mm),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Default tropic gain, rad/mm.
pub const DEFAULT_KAPPA: f64 = 0.11;

impl Default for GripperConfig {
    /// Two light-grown fingers hanging from `(±6, 0)`, germinated 40 h before
    /// the run so they start 16.3 mm long, above a 4 mm object at `(0, -22)`.
    fn default() -> Self {
        let growth = GrowthParams::LIGHT;
        let age = 40.0;
        let stub = growth.length_at(age).expect("age is non-negative");
        let finger = |x: f64| Finger {
            base_mm: [x, 0.0],
            segments: vec![Segment { length_mm: stub, heading_rad: -FRAC_PI_2 }],
            growth_clock_offset_h: -age,
        };
        Self {
            fingers: vec![finger(-6.0), finger(6.0)],
            growth,
            kappa_rad_per_mm: DEFAULT_KAPPA,
            object_center_mm: [0.0, -22.0],
            object_radius_mm: 4.0,
            grasp_epsilon_mm: 0.5,
            release_hysteresis_mm: 0.5,
        }
    }
}

impl GripperConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fingers.is_empty() {
            return Err(Error::Input("gripper needs at least one finger".into()));
        }
        for f in &self.fingers {
            f.validate()?;
            if f.segments.is_empty() {
                return Err(Error::Input("every finger needs an initial segment".into()));
            }
        }
        if !(self.kappa_rad_per_mm.is_finite() && self.kappa_rad_per_mm >= 0.0) {
            return Err(Error::Input(format!("kappa must be >= 0, got {}", self.kappa_rad_per_mm)));
        }
        if self.object_center_mm.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("object centre must be finite".into()));
        }
        for (name, v) in [("object_radius_mm", self.object_radius_mm), ("grasp_epsilon_mm", self.grasp_epsilon_mm)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Input(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.release_hysteresis_mm.is_finite() && self.release_hysteresis_mm >= 0.0) {
            return Err(Error::Input("release_hysteresis_mm must be >= 0".into()));
        }
        Ok(())
    }

    /// The scene reflected across the x axis.
    pub fn mirrored(&self) -> Self {
        let mut m = self.clone();
        m.object_center_mm[1] = -m.object_center_mm[1];
        for f in &mut m.fingers {
            f.base_mm[1] = -f.base_mm[1];
            for s in &mut f.segments {
                s.heading_rad = -s.heading_rad;
            }
        }
        m
    }

    /// Distance from `p` to the object surface; zero inside the object.
    pub fn surface_gap(&self, p: [f64; 2]) -> f64 {
        let [cx, cy] = self.object_center_mm;
        ((p[0] - cx).hypot(p[1] - cy) - self.object_radius_mm).max(0.0)
    }

    fn azimuth(&self, target: LightTarget, tip: [f64; 2]) -> f64 {
        let [cx, cy] = self.object_center_mm;
        match target {
            LightTarget::Inner => (cy - tip[1]).atan2(cx - tip[0]),
            LightTarget::Outer => (tip[1] - cy).atan2(tip[0] - cx),
            LightTarget::Azimuth(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Grasp,
    Release,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GripperEvent {
    #[serde(rename = "t_h")]
    pub t: f64,
    pub kind: EventKind,
}

/// Fingertip pose after a step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TipSample {
    pub t_h: f64,
    pub finger: usize,
    pub tip_x_mm: f64,
    pub tip_y_mm: f64,
    pub heading_rad: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GripperRun {
    /// Time-major: all fingers at `t = 0`, then all fingers at `dt`, ...
    pub samples: Vec<TipSample>,
    pub events: Vec<GripperEvent>,
    /// Finger chains at the end of the run.
    pub fingers: Vec<Finger>,
}

impl GripperRun {
    pub fn write_trajectories_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(TRAJECTORY_HEADER)?;
        for s in &self.samples {
            w.write_record([
                csv_num(s.t_h),
                s.finger.to_string(),
                csv_num(s.tip_x_mm),
                csv_num(s.tip_y_mm),
                csv_num(s.heading_rad),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_events_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(EVENTS_HEADER)?;
        for e in &self.events {
            let kind = match e.kind {
                EventKind::Grasp => "grasp",
                EventKind::Release => "release",
            };
            w.write_record([csv_num(e.t), kind.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn read_trajectories_csv<R: Read>(reader: R) -> Result<Vec<TipSample>> {
    let mut rdr = csv::Reader::from_reader(reader);
    if rdr.headers()?.iter().collect::<Vec<_>>() != TRAJECTORY_HEADER {
        return Err(Error::Input(format!("expected header `{}`", TRAJECTORY_HEADER.join(","))));
    }
    rdr.deserialize().map(|r| r.map_err(|e| Error::Input(e.to_string()))).collect()
}

pub fn read_events_csv<R: Read>(reader: R) -> Result<Vec<GripperEvent>> {
    let mut rdr = csv::Reader::from_reader(reader);
    if rdr.headers()?.iter().collect::<Vec<_>>() != EVENTS_HEADER {
        return Err(Error::Input(format!("expected header `{}`", EVENTS_HEADER.join(","))));
    }
    rdr.deserialize().map(|r| r.map_err(|e| Error::Input(e.to_string()))).collect()
}

/// Grows every finger under `schedule` on the grid `0, dt, ..., t_end`.
///
/// The light active at the start of a step steers the whole step. Each step
/// appends one segment whose length is the exact logistic increment over the
/// step, so arc length tracks the growth law without integration drift.
/// A grasp fires when every tip is within `grasp_epsilon` of the object
/// surface; after a grasp, a release fires once every tip is farther than
/// `grasp_epsilon + release_hysteresis`.
pub fn simulate_gripper(config: &GripperConfig, schedule: &LedSchedule, t_end: f64, dt: f64) -> Result<GripperRun> {
    config.validate()?;
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::Domain(format!("t_end must be > 0, got {t_end}")));
    }
    if !(dt.is_finite() && dt > 0.0 && dt <= 0.5) {
        return Err(Error::Domain(format!("dt must lie in (0, 0.5], got {dt}")));
    }
    let grid = time_grid(dt, t_end)?;
    let mut fingers = config.fingers.clone();
    let mut tips: Vec<[f64; 2]> = fingers.iter().map(Finger::tip).collect();
    let mut samples = Vec::with_capacity(grid.len() * fingers.len());
    let mut events = Vec::new();
    let mut grasped = false;

    let record = |samples: &mut Vec<TipSample>, t: f64, fingers: &[Finger], tips: &[[f64; 2]]| {
        for (i, (f, tip)) in fingers.iter().zip(tips).enumerate() {
            samples.push(TipSample {
                t_h: t,
                finger: i,
                tip_x_mm: tip[0],
                tip_y_mm: tip[1],
                heading_rad: f.tip_heading().expect("validated non-empty"),
            });
        }
    };
    record(&mut samples, 0.0, &fingers, &tips);

    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let light = schedule.active_at(t0);
        for (finger, tip) in fingers.iter_mut().zip(tips.iter_mut()) {
            let grown = config.growth.length_at(finger.clock(t1))? - config.growth.length_at(finger.clock(t0))?;
            if grown <= 0.0 {
                continue;
            }
            let azimuth = light.map(|target| config.azimuth(target, *tip));
            let current = finger.tip_heading().expect("validated non-empty");
            let heading = tropism_step(current, azimuth, grown, config.kappa_rad_per_mm)?;
            *tip = [tip[0] + grown * heading.cos(), tip[1] + grown * heading.sin()];
            finger.segments.push(Segment { length_mm: grown, heading_rad: heading });
        }
        record(&mut samples, t1, &fingers, &tips);

        let gaps = tips.iter().map(|&p| config.surface_gap(p));
        if !grasped && gaps.clone().all(|g| g <= config.grasp_epsilon_mm) {
            grasped = true;
            events.push(GripperEvent { t: t1, kind: EventKind::Grasp });
        } else if grasped && gaps.clone().all(|g| g > config.grasp_epsilon_mm + config.release_hysteresis_mm) {
            grasped = false;
            events.push(GripperEvent { t: t1, kind: EventKind::Release });
        }
    }

    Ok(GripperRun { samples, events, fingers })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_heading_is_fixed_point() {
        assert_eq!(tropism_step(0.3, Some(0.3), 5.0, 0.2).unwrap(), 0.3);
    }

    #[test]
    fn perpendicular_light_turn() {
        let h = tropism_step(0.0, Some(FRAC_PI_2), 2.0, 0.05).unwrap();
        assert!((h - 0.1).abs() < 1e-15);
        let h = tropism_step(0.0, Some(-FRAC_PI_2), 2.0, 0.05).unwrap();
        assert!((h + 0.1).abs() < 1e-15);
    }

    #[test]
    fn turn_never_overshoots() {
        let h = tropism_step(0.0, Some(0.1), 100.0, 1.0).unwrap();
        assert_eq!(h, 0.1);
    }

    #[test]
    fn darkness_and_zero_gain_keep_heading() {
        assert_eq!(tropism_step(1.0, None, 3.0, 0.2).unwrap(), 1.0);
        assert_eq!(tropism_step(1.0, Some(2.0), 3.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn tropism_rejects_negative_growth() {
        assert!(tropism_step(0.0, Some(1.0), -1.0, 0.1).is_err());
        assert!(tropism_step(0.0, Some(1.0), 1.0, -0.1).is_err());
    }

    #[test]
    fn wraps_the_short_way_round() {
        // Light just across the ±pi seam: turn should be small and positive
        // through pi, not a full revolution.
        let h = tropism_step(PI - 0.05, Some(-PI + 0.05), 1.0, 10.0).unwrap();
        assert!((h - (PI + 0.05)).abs() < 1e-12);
        assert_eq!(wrap_angle(3.0 * PI), PI);
        assert_eq!(wrap_angle(-0.5), -0.5);
    }

    #[test]
    fn bend_angle_examples() {
        let seg = |h| Segment { length_mm: 1.0, heading_rad: h };
        let mut f = Finger { base_mm: [0.0, 0.0], segments: vec![seg(0.0)], growth_clock_offset_h: 0.0 };
        assert_eq!(bend_angle(&f).unwrap(), 0.0);
        f.segments.push(seg(std::f64::consts::FRAC_PI_4));
        assert!((bend_angle(&f).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        f.segments.clear();
        assert!(bend_angle(&f).is_err());
    }

    #[test]
    fn schedule_validation() {
        let iv = |a, b| LightInterval { t_start_h: a, t_end_h: b, target: LightTarget::Inner };
        assert!(LedSchedule::new(vec![iv(0.0, 1.0), iv(1.0, 2.0)]).is_ok());
        assert!(LedSchedule::new(vec![iv(0.0, 1.5), iv(1.0, 2.0)]).is_err());
        assert!(LedSchedule::new(vec![iv(2.0, 1.0)]).is_err());
        let s = LedSchedule::pick_and_place();
        assert_eq!(s.active_at(0.0), Some(LightTarget::Inner));
        assert_eq!(s.active_at(11.0), Some(LightTarget::Outer));
        assert_eq!(s.active_at(21.0), None);
    }

    #[test]
    fn schedule_csv_round_trip() {
        let text = "t_start_h,t_end_h,target\n0,11,inner\n11,21,outer\n22,23,1.5\n";
        let s = LedSchedule::read_csv(text.as_bytes()).unwrap();
        assert_eq!(s.intervals()[2].target, LightTarget::Azimuth(1.5));
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
        assert!(LedSchedule::read_csv("t_start_h,t_end_h,target\n0,1,sideways\n".as_bytes()).is_err());
    }

    #[test]
    fn empty_schedule_grows_straight() {
        let cfg = GripperConfig::default();
        let run = simulate_gripper(&cfg, &LedSchedule::default(), 21.0, 0.1).unwrap();
        assert!(run.events.is_empty());
        for s in &run.samples {
            assert_eq!(s.heading_rad, -FRAC_PI_2);
            assert!((s.tip_x_mm - cfg.fingers[s.finger].base_mm[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn pick_and_place_sequence() {
        let cfg = GripperConfig::default();
        let run = simulate_gripper(&cfg, &LedSchedule::pick_and_place(), 21.0, 0.1).unwrap();
        let kinds: Vec<_> = run.events.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, vec![EventKind::Grasp, EventKind::Release], "{:?}", run.events);
        assert!(run.events[0].t < 11.0);
        assert!(run.events[1].t > 11.0);
    }

    #[test]
    fn config_file_defaults() {
        let cfg: GripperConfigFile = serde_json::from_str(r#"{"kappa_rad_per_mm": 0.2}"#).unwrap();
        let cfg = cfg.resolve().unwrap();
        assert_eq!(cfg.kappa_rad_per_mm, 0.2);
        assert_eq!(cfg.fingers, GripperConfig::default().fingers);
        let json = serde_json::to_string(&cfg).unwrap();
        let back: GripperConfigFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.resolve().unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_inputs() {
        let cfg = GripperConfig::default();
        let s = LedSchedule::default();
        assert!(simulate_gripper(&cfg, &s, 1.0, 0.0).is_err());
        assert!(simulate_gripper(&cfg, &s, 1.0, 1.0).is_err());
        assert!(simulate_gripper(&cfg, &s, -1.0, 0.1).is_err());
        let mut bad = cfg.clone();
        bad.fingers[0].segments.clear();
        assert!(bad.validate().is_err());
        let mut bad = cfg;
        bad.object_radius_mm = 0.0;
        assert!(bad.validate().is_err());
    }
}
