//! JSON experiment configs. Every command has its own payload type; unknown
//! fields are rejected and all physical parameters are range-checked before
//! anything is computed.

use std::f64::consts::PI;
use std::path::Path;

use dplab_core::geometry::TabulatedPhi;
use dplab_core::rng::DEFAULT_SEED;
use dplab_core::solver2d::{Rect, DEFAULT_EIG_TOL, DEFAULT_VERDICT_TOL};
use dplab_core::{AngularProfile, Moebius, MonotoneCurve, Point2, PolylineCurve};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable that overrides the seed of every command.
pub const SEED_ENV: &str = "DPLAB_SEED";

fn bad(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, format!("must be positive and finite, got {v}")))
    }
}

fn finite(field: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, format!("must be finite, got {v}")))
    }
}

/// `(az + b)/(cz + d)` with coefficients as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoebiusConfig {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub c: [f64; 2],
    pub d: [f64; 2],
}

impl MoebiusConfig {
    pub const INVERSION: MoebiusConfig = MoebiusConfig { a: [0.0, 0.0], b: [1.0, 0.0], c: [1.0, 0.0], d: [0.0, 0.0] };

    pub fn moebius(&self) -> dplab_core::Result<Moebius> {
        let z = |v: [f64; 2]| Complex64::new(v[0], v[1]);
        Moebius::new(z(self.a), z(self.b), z(self.c), z(self.d))
    }
}

fn default_samples() -> usize {
    1025
}

fn inversion() -> MoebiusConfig {
    MoebiusConfig::INVERSION
}

/// Any curve a command accepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveConfig {
    Interval {
        length: f64,
        #[serde(default)]
        origin: [f64; 2],
        #[serde(default)]
        angle: f64,
    },
    Spiral {
        slope: f64,
        #[serde(default)]
        offset: f64,
        extent: f64,
        #[serde(default)]
        origin: [f64; 2],
    },
    Tabulated {
        #[serde(default)]
        origin: [f64; 2],
        extent: f64,
        radii: Vec<f64>,
        phi: Vec<f64>,
        dphi: Vec<f64>,
    },
    /// Arc of the circle of radius `radius` centred at `(0, radius)` with
    /// its gap of half-angle `epsilon` around the origin; transported by
    /// `moebius` (default `1/z`) onto a straight segment.
    Arc {
        radius: f64,
        epsilon: f64,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "inversion")]
        moebius: MoebiusConfig,
    },
    /// `Λ = M(Γ)` for a monotone `Γ` of one of the first three kinds.
    Lft {
        gamma: Box<CurveConfig>,
        moebius: MoebiusConfig,
        #[serde(default = "default_samples")]
        samples: usize,
    },
}

impl CurveConfig {
    pub fn validate(&self, field: &str) -> Result<(), CliError> {
        let sub = |name: &str| format!("{field}.{name}");
        match self {
            CurveConfig::Interval { length, origin, angle } => {
                positive(&sub("length"), *length)?;
                finite(&sub("angle"), *angle)?;
                origin.iter().try_for_each(|&v| finite(&sub("origin"), v))
            }
            CurveConfig::Spiral { slope, offset, extent, origin } => {
                finite(&sub("slope"), *slope)?;
                finite(&sub("offset"), *offset)?;
                positive(&sub("extent"), *extent)?;
                origin.iter().try_for_each(|&v| finite(&sub("origin"), v))
            }
            CurveConfig::Tabulated { extent, .. } => {
                positive(&sub("extent"), *extent)?;
                match self.monotone() {
                    Some(Err(e)) => Err(bad(field, e)),
                    _ => Ok(()),
                }
            }
            CurveConfig::Arc { radius, epsilon, samples, moebius } => {
                positive(&sub("radius"), *radius)?;
                if !(*epsilon > 0.0 && *epsilon < PI) {
                    return Err(bad(&sub("epsilon"), format!("must lie in (0, π), got {epsilon}")));
                }
                if *samples < 3 {
                    return Err(bad(&sub("samples"), "must be at least 3"));
                }
                moebius.moebius().map(|_| ()).map_err(|e| bad(&sub("moebius"), e))
            }
            CurveConfig::Lft { gamma, moebius, samples } => {
                if gamma.monotone().is_none() {
                    return Err(bad(&sub("gamma.kind"), "must be interval, spiral or tabulated"));
                }
                gamma.validate(&sub("gamma"))?;
                if *samples < 2 {
                    return Err(bad(&sub("samples"), "must be at least 2"));
                }
                moebius.moebius().map(|_| ()).map_err(|e| bad(&sub("moebius"), e))
            }
        }
    }

    /// The curve itself for the three monotone kinds.
    pub fn monotone(&self) -> Option<dplab_core::Result<MonotoneCurve>> {
        let at = |o: &[f64; 2]| Point2::new(o[0], o[1]);
        match self {
            CurveConfig::Interval { length, origin, angle } => Some(MonotoneCurve::interval(at(origin), *length, *angle)),
            CurveConfig::Spiral { slope, offset, extent, origin } => Some(MonotoneCurve::new(
                at(origin),
                *extent,
                AngularProfile::Linear { slope: *slope, offset: *offset },
            )),
            CurveConfig::Tabulated { origin, extent, radii, phi, dphi } => Some(
                TabulatedPhi::new(radii.clone(), phi.clone(), dphi.clone())
                    .and_then(|t| MonotoneCurve::new(at(origin), *extent, AngularProfile::Tabulated(t))),
            ),
            _ => None,
        }
    }

    /// The arc polyline and its map, for `kind = "arc"`.
    pub fn arc(&self) -> Option<dplab_core::Result<(PolylineCurve, Moebius)>> {
        match self {
            CurveConfig::Arc { radius, epsilon, samples, moebius } => Some(
                PolylineCurve::circular_arc(*radius, *epsilon, *samples).and_then(|p| Ok((p, moebius.moebius()?))),
            ),
            _ => None,
        }
    }
}

/// `[x_min, x_max, y_min, y_max]`.
pub type BoxConfig = [f64; 4];

fn validate_box(field: &str, b: &BoxConfig) -> Result<Rect, CliError> {
    Rect::new(b[0], b[1], b[2], b[3]).map_err(|e| bad(field, e))
}

fn default_fe_cells() -> usize {
    2048
}

fn default_fe_count() -> usize {
    2
}

fn default_theta_points() -> usize {
    400
}

fn default_eig_tol() -> f64 {
    DEFAULT_EIG_TOL
}

fn default_verdict_tol() -> f64 {
    DEFAULT_VERDICT_TOL
}

fn default_eigenpairs() -> usize {
    3
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    pub curve: CurveConfig,
    /// Constant strength to classify, if any.
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Loop1dConfig {
    pub d: f64,
    pub omega: f64,
    #[serde(default = "default_fe_cells")]
    pub fe_cells: usize,
    #[serde(default = "default_fe_count")]
    pub fe_count: usize,
    /// Points of the `Θ` curve in the plot.
    #[serde(default = "default_theta_points")]
    pub theta_points: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LftConfig {
    /// `kind` must be `arc` or `lft`.
    pub curve: CurveConfig,
    /// Constant strength on `Λ` to transport.
    pub omega: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solve2dConfig {
    /// `interval` (placed along the x axis from its origin) or `arc`.
    pub curve: CurveConfig,
    pub omega: f64,
    #[serde(rename = "box")]
    pub rect: BoxConfig,
    pub h: f64,
    #[serde(default = "default_eigenpairs")]
    pub eigenpairs: usize,
    #[serde(default = "default_eig_tol")]
    pub eig_tol: f64,
    #[serde(default = "default_verdict_tol")]
    pub verdict_tol: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalConfig {
    pub length: f64,
    #[serde(rename = "box")]
    pub rect: BoxConfig,
    pub h: f64,
    pub tol_omega: f64,
    #[serde(default = "default_eig_tol")]
    pub eig_tol: f64,
    #[serde(default = "default_verdict_tol")]
    pub verdict_tol: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn all_criteria() -> Vec<u8> {
    (1..=8).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "all_criteria")]
    pub criteria: Vec<u8>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { criteria: all_criteria(), seed: DEFAULT_SEED }
    }
}

/// A config that can check itself and carries a seed.
pub trait Validate {
    fn validate(&self) -> Result<(), CliError>;
    fn seed_mut(&mut self) -> &mut u64;
}

fn count(field: &str, v: usize, min: usize, max: usize) -> Result<(), CliError> {
    if (min..=max).contains(&v) {
        Ok(())
    } else {
        Err(bad(field, format!("must lie in [{min}, {max}], got {v}")))
    }
}

impl Validate for ThresholdConfig {
    fn validate(&self) -> Result<(), CliError> {
        self.curve.validate("curve")?;
        if let Some(w) = self.omega {
            finite("omega", w)?;
        }
        Ok(())
    }

    fn seed_mut(&mut self) -> &mut u64 {
        &mut self.seed
    }
}

impl Validate for Loop1dConfig {
    fn validate(&self) -> Result<(), CliError> {
        positive("d", self.d)?;
        finite("omega", self.omega)?;
        count("fe_cells", self.fe_cells, 16, 1 << 20)?;
        count("fe_count", self.fe_count, 1, 64)?;
        count("theta_points", self.theta_points, 2, 100_000)
    }

    fn seed_mut(&mut self) -> &mut u64 {
        &mut self.seed
    }
}

impl Validate for LftConfig {
    fn validate(&self) -> Result<(), CliError> {
        if !matches!(self.curve, CurveConfig::Arc { .. } | CurveConfig::Lft { .. }) {
            return Err(bad("curve.kind", "must be \"arc\" or \"lft\""));
        }
        self.curve.validate("curve")?;
        finite("omega", self.omega)
    }

    fn seed_mut(&mut self) -> &mut u64 {
        &mut self.seed
    }
}

fn validate_numerics(h: f64, eig_tol: f64, verdict_tol: f64) -> Result<(), CliError> {
    positive("h", h)?;
    positive("eig_tol", eig_tol)?;
    positive("verdict_tol", verdict_tol)
}

impl Validate for Solve2dConfig {
    fn validate(&self) -> Result<(), CliError> {
        if !matches!(self.curve, CurveConfig::Interval { .. } | CurveConfig::Arc { .. }) {
            return Err(bad("curve.kind", "must be \"interval\" or \"arc\""));
        }
        if let CurveConfig::Interval { angle, .. } = self.curve {
            if angle != 0.0 {
                return Err(bad("curve.angle", "the crack must be horizontal (angle 0)"));
            }
        }
        self.curve.validate("curve")?;
        finite("omega", self.omega)?;
        let rect = validate_box("box", &self.rect)?;
        validate_numerics(self.h, self.eig_tol, self.verdict_tol)?;
        if self.h > rect.width().min(rect.height()) / 4.0 {
            return Err(bad("h", "needs at least 4 cells across the box"));
        }
        count("eigenpairs", self.eigenpairs, 1, 10)
    }

    fn seed_mut(&mut self) -> &mut u64 {
        &mut self.seed
    }
}

impl Validate for CriticalConfig {
    fn validate(&self) -> Result<(), CliError> {
        positive("length", self.length)?;
        let rect = validate_box("box", &self.rect)?;
        validate_numerics(self.h, self.eig_tol, self.verdict_tol)?;
        positive("tol_omega", self.tol_omega)?;
        if !(rect.x_min < 0.0 && rect.x_max > self.length && rect.y_min < 0.0 && rect.y_max > 0.0) {
            return Err(bad("box", format!("must contain the crack (0, {}) × {{0}} in its interior", self.length)));
        }
        Ok(())
    }

    fn seed_mut(&mut self) -> &mut u64 {
        &mut self.seed
    }
}

impl Validate for VerifyConfig {
    fn validate(&self) -> Result<(), CliError> {
        if self.criteria.is_empty() {
            return Err(bad("criteria", "must not be empty"));
        }
        match self.criteria.iter().find(|c| !(1..=8).contains(*c)) {
            Some(c) => Err(bad("criteria", format!("unknown criterion {c}"))),
            None => Ok(()),
        }
    }

    fn seed_mut(&mut self) -> &mut u64 {
        &mut self.seed
    }
}

/// Parses, applies the seed override and validates.
pub fn parse<T: DeserializeOwned + Validate>(text: &str, seed_override: Option<u64>) -> Result<T, CliError> {
    let mut cfg: T = serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("line {} column {}: {e}", e.line(), e.column())))?;
    if let Some(seed) = seed_override {
        *cfg.seed_mut() = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load<T: DeserializeOwned + Validate>(path: &Path, seed_override: Option<u64>) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse(&text, seed_override)
}

/// Reads `DPLAB_SEED`, if set.
pub fn seed_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{SEED_ENV} = {v:?} is not an unsigned integer"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Config(format!("{SEED_ENV}: {e}"))),
    }
}
