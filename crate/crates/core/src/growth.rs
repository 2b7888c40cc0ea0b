//! Logistic stem-growth kinetics.
//!
//! A stem of initial length `L0` grows toward a ceiling `K` at intrinsic rate
//! `r`:
//!
//! ```text
//! L(t) = K / (1 + ((K - L0) / L0) * exp(-r t))
//! ```
//!
//! Time is in hours and length in millimetres throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the logistic length law.
///
/// Construction validates `r > 0`, `K > 0` and `0 < L0 < K`, so every value
/// of this type is usable by the evaluation methods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrowthParams", into = "RawGrowthParams")]
pub struct GrowthParams {
    r: f64,
    k: f64,
    l0: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrowthParams {
    r_per_h: f64,
    k_mm: f64,
    l0_mm: f64,
}

impl TryFrom<RawGrowthParams> for GrowthParams {
    type Error = Error;

    fn try_from(raw: RawGrowthParams) -> Result<Self> {
        GrowthParams::new(raw.r_per_h, raw.k_mm, raw.l0_mm)
    }
}

impl From<GrowthParams> for RawGrowthParams {
    fn from(p: GrowthParams) -> Self {
        RawGrowthParams { r_per_h: p.r, k_mm: p.k, l0_mm: p.l0 }
    }
}

impl GrowthParams {
    /// Dark-grown (etiolated) radish sprout.
    ///
    /// `L0` is not a fitted value: it is back-solved from the 46.4 mm length
    /// observed after 40 h.
    pub const DARK: GrowthParams = GrowthParams { r: 0.0792, k: 105.0, l0: 3.3865 };

    /// Light-grown sprout. `L0` back-solved from 16.3 mm at 40 h.
    pub const LIGHT: GrowthParams = GrowthParams { r: 0.0500, k: 65.1, l0: 2.8156 };

    pub fn new(r: f64, k: f64, l0: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Parameter(format!("growth rate r must be finite and > 0, got {r}")));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Parameter(format!("maximum length K must be finite and > 0, got {k}")));
        }
        if !(l0.is_finite() && l0 > 0.0 && l0 < k) {
            return Err(Error::Parameter(format!("initial length L0 must satisfy 0 < L0 < K = {k}, got {l0}")));
        }
        Ok(Self { r, k, l0 })
    }

    /// Parameters whose curve passes through `length` at time `t`, for a
    /// given rate and ceiling.
    pub fn from_anchor(r: f64, k: f64, t: f64, length: f64) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Domain(format!("anchor time must be >= 0, got {t}")));
        }
        if !(length > 0.0 && length < k) {
            return Err(Error::Domain(format!("anchor length must lie in (0, K), got {length}")));
        }
        // Solve K/L - 1 = ((K - L0)/L0) e^{-rt} for L0.
        let odds = (k / length - 1.0) * (r * t).exp();
        Self::new(r, k, k / (1.0 + odds))
    }

    /// Intrinsic elongation rate, 1/h.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Maximum length, mm.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// Length at `t = 0`, mm.
    pub fn l0(&self) -> f64 {
        self.l0
    }

    /// `(K - L0) / L0`, the logistic odds against full growth at `t = 0`.
    fn initial_odds(&self) -> f64 {
        (self.k - self.l0) / self.l0
    }

    /// Stem length at time `t` (hours).
    pub fn length_at(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        if t == 0.0 {
            return Ok(self.l0);
        }
        Ok(self.k / (1.0 + self.initial_odds() * (-self.r * t).exp()))
    }

    /// Growth rate `dL/dt = r L (1 - L/K)` in mm/h.
    pub fn rate_at(&self, t: f64) -> Result<f64> {
        let l = self.length_at(t)?;
        Ok(self.r * l * (1.0 - l / self.k))
    }

    /// Maximum growth rate and where it occurs.
    ///
    /// `time_at_peak` is negative when `L0 > K/2`, i.e. the curve starts past
    /// its inflection point.
    pub fn peak_rate(&self) -> PeakRate {
        PeakRate {
            rate: self.r * self.k / 4.0,
            length_at_peak: self.k / 2.0,
            time_at_peak: self.initial_odds().ln() / self.r,
        }
    }

    /// Time at which the stem reaches `length`. `length == L0` maps to 0.
    pub fn time_to_length(&self, length: f64) -> Result<f64> {
        if !(length.is_finite() && length >= self.l0 && length < self.k) {
            return Err(Error::Domain(format!(
                "length {length} outside [{}, {}) reachable by the curve",
                self.l0, self.k
            )));
        }
        if length == self.l0 {
            return Ok(0.0);
        }
        Ok((self.initial_odds() * length / (self.k - length)).ln() / self.r)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be finite and >= 0, got {t}")))
    }
}

/// Location and value of the maximum growth rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakRate {
    /// mm/h
    pub rate: f64,
    /// mm
    pub length_at_peak: f64,
    /// h
    pub time_at_peak: f64,
}

/// One measured (or synthesised) stem length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample {
    #[serde(rename = "t_h")]
    pub t: f64,
    #[serde(rename = "length_mm")]
    pub length: f64,
}

impl GrowthSample {
    pub fn new(t: f64, length: f64) -> Result<Self> {
        let s = Self { t, length };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(Error::Input(format!("sample time must be finite and >= 0, got {}", self.t)));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::Input(format!("sample length must be finite and > 0, got {}", self.length)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DARK: GrowthParams = GrowthParams::DARK;
    const LIGHT: GrowthParams = GrowthParams::LIGHT;

    #[test]
    fn initial_length_is_exact() {
        assert_eq!(DARK.length_at(0.0).unwrap(), 3.3865);
        assert_eq!(LIGHT.length_at(0.0).unwrap(), 2.8156);
    }

    #[test]
    fn dark_anchors() {
        assert!((DARK.length_at(40.0).unwrap() - 46.4).abs() <= 0.1);
        assert!((DARK.length_at(55.0).unwrap() - 75.8).abs() <= 0.8);
    }

    #[test]
    fn light_anchor() {
        assert!((LIGHT.length_at(40.0).unwrap() - 16.3).abs() <= 0.05);
    }

    #[test]
    fn peak_closed_forms() {
        let p = DARK.peak_rate();
        assert!((p.rate - 2.079).abs() <= 0.001);
        assert_eq!(p.length_at_peak, 52.5);
        let at = DARK.rate_at(p.time_at_peak).unwrap();
        assert!(((at - p.rate) / p.rate).abs() < 1e-9);

        let q = LIGHT.peak_rate();
        assert!((q.rate - 0.81375).abs() < 1e-12);
        assert!((q.length_at_peak - 32.55).abs() < 1e-12);
    }

    #[test]
    fn half_ceiling_start_peaks_at_zero() {
        let p = GrowthParams::new(0.1, 80.0, 40.0).unwrap();
        assert_eq!(p.peak_rate().time_at_peak, 0.0);
    }

    #[test]
    fn rate_decays_at_long_times() {
        assert!(DARK.rate_at(400.0).unwrap() < 1e-9);
        assert!(DARK.rate_at(400.0).unwrap() >= 0.0);
    }

    #[test]
    fn time_inversion_at_start() {
        assert_eq!(DARK.time_to_length(DARK.l0()).unwrap(), 0.0);
        let t = DARK.time_to_length(DARK.l0() + 1e-9).unwrap();
        assert!((0.0..1e-6).contains(&t));
    }

    #[test]
    fn anchor_solves_initial_length() {
        let dark = GrowthParams::from_anchor(0.0792, 105.0, 40.0, 46.4).unwrap();
        assert!((dark.l0() - 3.38632).abs() < 1e-5);
        assert!((dark.l0() - GrowthParams::DARK.l0()).abs() < 5e-4);
        let light = GrowthParams::from_anchor(0.05, 65.1, 40.0, 16.3).unwrap();
        assert!((light.l0() - 2.8156).abs() < 1e-4);
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(matches!(GrowthParams::new(0.0, 10.0, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(GrowthParams::new(0.1, -1.0, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(GrowthParams::new(0.1, 10.0, 10.0), Err(Error::Parameter(_))));
        assert!(matches!(GrowthParams::new(0.1, 10.0, 0.0), Err(Error::Parameter(_))));
        assert!(matches!(GrowthParams::new(f64::NAN, 10.0, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(GrowthParams::new(0.1, f64::INFINITY, 1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn rejects_negative_time() {
        assert!(matches!(DARK.length_at(-1.0), Err(Error::Domain(_))));
        assert!(matches!(DARK.rate_at(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_unreachable_lengths() {
        assert!(matches!(DARK.time_to_length(105.0), Err(Error::Domain(_))));
        assert!(matches!(DARK.time_to_length(2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn json_uses_unit_suffixed_names() {
        let s = serde_json::to_string(&DARK).unwrap();
        assert_eq!(s, r#"{"r_per_h":0.0792,"k_mm":105.0,"l0_mm":3.3865}"#);
        let back: GrowthParams = serde_json::from_str(&s).unwrap();
        assert_eq!(back, DARK);
        let bad = serde_json::from_str::<GrowthParams>(r#"{"r_per_h":0.1,"k_mm":5.0,"l0_mm":6.0}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn sample_validation() {
        assert!(GrowthSample::new(0.0, 1.0).is_ok());
        assert!(GrowthSample::new(-1.0, 1.0).is_err());
        assert!(GrowthSample::new(1.0, 0.0).is_err());
    }
}
