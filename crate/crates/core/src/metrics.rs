//! Observables derived from the Gaussian engine: fringe visibility,
//! error-propagation phase sensitivity, and its comparison to shot noise.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closed_form;
use crate::config::InterferometerConfig;
use crate::error::{Error, Result};
use crate::gaussian::{propagate_to, run_interferometer, Mode, Stage};
use crate::optimize::grid_then_golden;

pub const DEFAULT_DERIVATIVE_STEP: f64 = 1e-5;
const RICHARDSON_STEP: f64 = 1e-3;
const DERIVATIVE_RTOL: f64 = 1e-6;
const STATIONARY_THRESHOLD: f64 = 1e-12;

/// Working-point search window; the fringe is even and 2π-periodic so half a
/// period suffices. The ends are kept off the fringe extrema, where mean and
/// slope both vanish.
pub const THETA_SEARCH: (f64, f64) = (1e-3, PI - 1e-3);
pub const THETA_GRID_POINTS: usize = 256;
pub const THETA_XTOL: f64 = 1e-8;

/// Which photon number sets the shot-noise reference `1/N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotNoiseConvention {
    /// Signal photons leaving the first amplifier.
    AfterOpa1,
    /// Signal photons after the internal loss.
    AfterLoss,
    /// Signal plus idler pair photons from the first amplifier, `2·N_s`.
    Pairs,
}

impl ShotNoiseConvention {
    pub const ALL: [ShotNoiseConvention; 3] = [
        ShotNoiseConvention::AfterOpa1,
        ShotNoiseConvention::AfterLoss,
        ShotNoiseConvention::Pairs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ShotNoiseConvention::AfterOpa1 => "after_opa1",
            ShotNoiseConvention::AfterLoss => "after_loss",
            ShotNoiseConvention::Pairs => "pairs",
        }
    }
}

impl fmt::Display for ShotNoiseConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ShotNoiseConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "after_opa1" => Ok(ShotNoiseConvention::AfterOpa1),
            "after_loss" => Ok(ShotNoiseConvention::AfterLoss),
            "pairs" => Ok(ShotNoiseConvention::Pairs),
            other => Err(Error::Config(format!(
                "unknown shot-noise convention `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub theta_opt: f64,
    pub dtheta2: f64,
    pub dtheta2_shotnoise: f64,
    /// Positive when the sensitivity beats shot noise.
    pub db_vs_shotnoise: f64,
    pub snl_convention: ShotNoiseConvention,
}

/// `10·log₁₀(shot_noise / dtheta2)`.
pub fn db_below_shot_noise(shot_noise: f64, dtheta2: f64) -> f64 {
    10.0 * (shot_noise / dtheta2).log10()
}

fn signal_mean(cfg: &InterferometerConfig) -> Result<f64> {
    Ok(run_interferometer(cfg)?.mean_photons(Mode::Signal))
}

/// Fringe contrast from propagating the state at `θ = 0` and `θ = π`.
pub fn visibility_numeric(cfg: &InterferometerConfig) -> Result<f64> {
    let bright = signal_mean(&cfg.with_theta(0.0))?;
    let dark = signal_mean(&cfg.with_theta(PI))?;
    let total = bright + dark;
    if total <= 0.0 {
        return Err(Error::UndefinedVisibility);
    }
    Ok((bright - dark) / total)
}

fn central_difference(cfg: &InterferometerConfig, theta: f64, h: f64) -> Result<f64> {
    let up = signal_mean(&cfg.with_theta(theta + h))?;
    let down = signal_mean(&cfg.with_theta(theta - h))?;
    Ok((up - down) / (2.0 * h))
}

fn agrees(numeric: f64, analytic: f64) -> bool {
    (numeric - analytic).abs() <= DERIVATIVE_RTOL * analytic.abs().max(numeric.abs())
}

/// Slope `d⟨N_s⟩/dθ` of the propagated state at `theta0`, by central
/// difference, checked against the analytic fringe slope. Falls back to a
/// Richardson-extrapolated wider stencil when the two disagree.
pub fn phase_derivative(cfg: &InterferometerConfig, theta0: f64, step: f64) -> Result<f64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::domain("derivative_step", step, "> 0"));
    }
    let analytic = closed_form::mean_signal_derivative(&cfg.with_theta(theta0));
    let numeric = central_difference(cfg, theta0, step)?;
    if numeric.abs() < STATIONARY_THRESHOLD || analytic.abs() < STATIONARY_THRESHOLD {
        return Err(Error::StationaryPoint {
            theta: theta0,
            derivative: numeric,
        });
    }
    if agrees(numeric, analytic) {
        return Ok(numeric);
    }
    let wide = central_difference(cfg, theta0, RICHARDSON_STEP)?;
    let half = central_difference(cfg, theta0, 0.5 * RICHARDSON_STEP)?;
    let extrapolated = (4.0 * half - wide) / 3.0;
    if agrees(extrapolated, analytic) {
        Ok(extrapolated)
    } else {
        Err(Error::DerivativeMismatch {
            theta: theta0,
            numeric: extrapolated,
            analytic,
        })
    }
}

/// Error-propagation phase uncertainty `Var(N_s) / |d⟨N_s⟩/dθ|²` at `theta0`.
pub fn sensitivity(cfg: &InterferometerConfig, theta0: f64, step: f64) -> Result<f64> {
    let at = cfg.with_theta(theta0);
    let variance = run_interferometer(&at)?.photon_stats(Mode::Signal).variance;
    let slope = phase_derivative(cfg, theta0, step)?;
    Ok(variance / (slope * slope))
}

/// Shot-noise phase variance `1/N` under the chosen convention.
pub fn shot_noise_level(
    cfg: &InterferometerConfig,
    convention: ShotNoiseConvention,
) -> Result<f64> {
    let photons = match convention {
        ShotNoiseConvention::AfterOpa1 => {
            propagate_to(cfg, Stage::AfterFirstAmplifier)?.mean_photons(Mode::Signal)
        }
        ShotNoiseConvention::AfterLoss => {
            propagate_to(cfg, Stage::AfterLoss)?.mean_photons(Mode::Signal)
        }
        ShotNoiseConvention::Pairs => {
            2.0 * propagate_to(cfg, Stage::AfterFirstAmplifier)?.mean_photons(Mode::Signal)
        }
    };
    if photons <= 0.0 {
        return Err(Error::domain(
            "N_s",
            photons,
            "> 0 photons inside the interferometer",
        ));
    }
    Ok(1.0 / photons)
}

/// Minimizes [`sensitivity`] over the working point and compares the result
/// to shot noise.
pub fn optimal_sensitivity(
    cfg: &InterferometerConfig,
    convention: ShotNoiseConvention,
) -> Result<SensitivityReport> {
    cfg.validate()?;
    if cfg.g2 <= 0.0 {
        return Err(Error::domain("G2", cfg.g2, "> 0 for phase sensing"));
    }
    let objective =
        |theta: f64| sensitivity(cfg, theta, DEFAULT_DERIVATIVE_STEP).unwrap_or(f64::INFINITY);
    let (lo, hi) = THETA_SEARCH;
    let best = match grid_then_golden(objective, lo, hi, THETA_GRID_POINTS, THETA_XTOL) {
        Some(m) => m,
        None => {
            // Report why the mid-fringe point fails.
            sensitivity(cfg, 0.5 * PI, DEFAULT_DERIVATIVE_STEP)?;
            return Err(Error::StationaryPoint {
                theta: 0.5 * PI,
                derivative: 0.0,
            });
        }
    };
    let dtheta2_shotnoise = shot_noise_level(cfg, convention)?;
    Ok(SensitivityReport {
        theta_opt: best.x,
        dtheta2: best.value,
        dtheta2_shotnoise,
        db_vs_shotnoise: db_below_shot_noise(dtheta2_shotnoise, best.value),
        snl_convention: convention,
    })
}
