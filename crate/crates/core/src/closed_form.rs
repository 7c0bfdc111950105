//! Analytic signal photon number and fringe visibility of the lossy, seeded
//! two-amplifier interferometer.
//!
//! These are evaluated directly from the closed forms and serve as the
//! reference the Gaussian engine is checked against. The single-gain
//! visibility helpers assume balanced amplifiers; anything else goes through
//! [`visibility`].

use serde::{Deserialize, Serialize};

use crate::config::InterferometerConfig;
use crate::error::{check_nonnegative, check_transmission, Error, Result};

/// Gain combinations that appear in the output photon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainShorthand {
    /// `½ sinh(2G₁) sinh(2G₂)`, the interference amplitude.
    pub beta: f64,
    /// `sinh²G₂ cosh²G₁`
    pub lambda21: f64,
    /// `sinh²G₁ cosh²G₂`
    pub lambda12: f64,
    /// `cosh²G₁`
    pub delta1: f64,
    /// `sinh²G₂`, vacuum amplification by the second amplifier.
    pub delta2: f64,
}

impl GainShorthand {
    pub fn new(g1: f64, g2: f64) -> Self {
        let (s1, c1) = (g1.sinh(), g1.cosh());
        let (s2, c2) = (g2.sinh(), g2.cosh());
        Self {
            beta: 0.5 * (2.0 * g1).sinh() * (2.0 * g2).sinh(),
            lambda21: s2 * s2 * c1 * c1,
            lambda12: s1 * s1 * c2 * c2,
            delta1: c1 * c1,
            delta2: s2 * s2,
        }
    }
}

pub fn shorthand(cfg: &InterferometerConfig) -> GainShorthand {
    GainShorthand::new(cfg.g1, cfg.g2)
}

/// Mean signal photon number at the output:
/// `(n_i+1)(β cosθ t_i t_s + λ₂₁ t_i² + λ₁₂ t_s²) + δ₂(1 − t_i²)`.
pub fn mean_signal(cfg: &InterferometerConfig) -> f64 {
    let k = shorthand(cfg);
    let (ts, ti) = (cfg.t_s, cfg.t_i);
    (cfg.n_i + 1.0)
        * (k.beta * cfg.theta.cos() * ti * ts + k.lambda21 * ti * ti + k.lambda12 * ts * ts)
        + k.delta2 * (1.0 - ti * ti)
}

/// `d⟨N_s⟩/dθ = −(n_i+1) β sinθ t_i t_s`.
pub fn mean_signal_derivative(cfg: &InterferometerConfig) -> f64 {
    let k = shorthand(cfg);
    -(cfg.n_i + 1.0) * k.beta * cfg.theta.sin() * cfg.t_i * cfg.t_s
}

/// General fringe visibility for arbitrary gains, transmissions and seed.
pub fn visibility(cfg: &InterferometerConfig) -> Result<f64> {
    cfg.validate()?;
    let k = shorthand(cfg);
    let (ts, ti, n1) = (cfg.t_s, cfg.t_i, cfg.n_i + 1.0);
    let num = k.beta * n1 * ti * ts;
    let den = k.lambda12 * n1 * ts * ts + k.delta2 * (1.0 + ti * ti * (n1 * k.delta1 - 1.0));
    if den <= 0.0 {
        return Err(Error::UndefinedVisibility);
    }
    Ok(num / den)
}

/// Contrast `(N₀ − N_π)/(N₀ + N_π)` from two evaluations of [`mean_signal`].
pub fn visibility_from_fringe(cfg: &InterferometerConfig) -> Result<f64> {
    cfg.validate()?;
    let bright = mean_signal(&cfg.with_theta(0.0));
    let dark = mean_signal(&cfg.with_theta(std::f64::consts::PI));
    let total = bright + dark;
    if total <= 0.0 {
        return Err(Error::UndefinedVisibility);
    }
    Ok((bright - dark) / total)
}

/// Balanced gains, loss on the signal only: `2t_s/(t_s² + 1)`.
pub fn visibility_signal_loss(t_s: f64) -> Result<f64> {
    check_transmission("t_s", t_s)?;
    Ok(2.0 * t_s / (t_s * t_s + 1.0))
}

/// Balanced gains, loss on the idler only.
pub fn visibility_idler_loss(t_i: f64, gain: f64, n_i: f64) -> Result<f64> {
    check_transmission("t_i", t_i)?;
    check_nonnegative("G", gain)?;
    check_nonnegative("n_i", n_i)?;
    let c2 = gain.cosh().powi(2);
    let n1 = n_i + 1.0;
    Ok(2.0 * n1 * t_i * c2 / (n1 * (t_i * t_i + 1.0) * c2 + 1.0 - t_i * t_i))
}

/// Balanced gains, equal loss `t` on both modes.
pub fn visibility_symmetric_loss(t: f64, gain: f64, n_i: f64) -> Result<f64> {
    check_transmission("t", t)?;
    check_nonnegative("G", gain)?;
    check_nonnegative("n_i", n_i)?;
    let c2 = gain.cosh().powi(2);
    let a = 2.0 * (n_i + 1.0) * t * t * c2;
    Ok(a / (a + 1.0 - t * t))
}

/// Lossless balanced phase sensitivity, in both algebraic forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealSensitivity {
    /// `1 / ((1+n_i) sinh²(2G))`
    pub from_gain: f64,
    /// `1 / (4(1+n_i)(N² + N))` with `N = sinh²G`.
    pub from_pairs: f64,
}

impl IdealSensitivity {
    pub fn value(&self) -> f64 {
        self.from_gain
    }
}

pub fn ideal_sensitivity(gain: f64, n_i: f64) -> Result<IdealSensitivity> {
    check_nonnegative("G", gain)?;
    check_nonnegative("n_i", n_i)?;
    if gain == 0.0 {
        return Err(Error::InfiniteSensitivity);
    }
    let n_sq = gain.sinh().powi(2);
    let out = IdealSensitivity {
        from_gain: 1.0 / ((1.0 + n_i) * (2.0 * gain).sinh().powi(2)),
        from_pairs: 1.0 / (4.0 * (1.0 + n_i) * (n_sq * n_sq + n_sq)),
    };
    debug_assert!((out.from_gain - out.from_pairs).abs() <= 1e-10 * out.from_gain);
    Ok(out)
}
