//! Two-mode Gaussian state propagation.
//!
//! Quadratures are ordered `(x_s, p_s, x_i, p_i)` with `x = (a + a†)/√2`, so
//! the vacuum covariance is `½·I` and a coherent state of mean photon number
//! `n` has displacement `√(2n)`. Every map here is a Gaussian channel; states
//! are values and each map consumes and returns one.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::config::InterferometerConfig;
use crate::error::{check_nonnegative, check_transmission, Error, Result};

/// Selects one of the two field modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Signal,
    Idler,
}

impl Mode {
    fn offset(self) -> usize {
        match self {
            Mode::Signal => 0,
            Mode::Idler => 2,
        }
    }
}

/// Mean and variance of a single mode's photon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonStats {
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTwoModeState {
    cov: Matrix4<f64>,
    disp: Vector4<f64>,
}

impl Default for GaussianTwoModeState {
    fn default() -> Self {
        Self::vacuum()
    }
}

impl GaussianTwoModeState {
    pub fn vacuum() -> Self {
        Self {
            cov: Matrix4::identity() * 0.5,
            disp: Vector4::zeros(),
        }
    }

    /// Builds a state from raw moments. The covariance is symmetrized.
    pub fn from_moments(cov: Matrix4<f64>, disp: Vector4<f64>) -> Self {
        Self { cov, disp }.symmetrized()
    }

    pub fn covariance(&self) -> &Matrix4<f64> {
        &self.cov
    }

    pub fn displacement(&self) -> &Vector4<f64> {
        &self.disp
    }

    fn symmetrized(mut self) -> Self {
        self.cov = (self.cov + self.cov.transpose()) * 0.5;
        self
    }

    fn transformed(self, s: &Matrix4<f64>) -> Self {
        Self {
            cov: s * self.cov * s.transpose(),
            disp: s * self.disp,
        }
        .symmetrized()
    }

    /// Displaces a vacuum idler into a real coherent state with `n_i` mean
    /// photons.
    pub fn seed_idler(mut self, n_i: f64) -> Result<Self> {
        check_nonnegative("n_i", n_i)?;
        if self.disp[2] != 0.0 || self.disp[3] != 0.0 {
            return Err(Error::Config(
                "idler seed requires an undisplaced idler".into(),
            ));
        }
        self.disp[2] = (2.0 * n_i).sqrt();
        Ok(self)
    }

    /// Two-mode squeezer with real gain `g` and zero squeezing phase:
    /// `a_s → cosh g·a_s + sinh g·a_i†` and symmetrically for the idler.
    pub fn apply_squeezer(self, g: f64) -> Self {
        let (c, s) = (g.cosh(), g.sinh());
        #[rustfmt::skip]
        let sym = Matrix4::new(
            c, 0.0, s, 0.0,
            0.0, c, 0.0, -s,
            s, 0.0, c, 0.0,
            0.0, -s, 0.0, c,
        );
        self.transformed(&sym)
    }

    /// Rotates one mode's quadratures: `(x, p) → (x cosθ + p sinθ, −x sinθ + p cosθ)`,
    /// i.e. `a → a·e^{−iθ}`.
    pub fn apply_phase(self, theta: f64, mode: Mode) -> Self {
        let (sn, cs) = theta.sin_cos();
        let k = mode.offset();
        let mut rot = Matrix4::identity();
        rot[(k, k)] = cs;
        rot[(k, k + 1)] = sn;
        rot[(k + 1, k)] = -sn;
        rot[(k + 1, k + 1)] = cs;
        self.transformed(&rot)
    }

    /// Independent pure-loss channels on both modes with amplitude
    /// transmissions `t_s`, `t_i`.
    pub fn apply_loss(self, t_s: f64, t_i: f64) -> Result<Self> {
        check_transmission("t_s", t_s)?;
        check_transmission("t_i", t_i)?;
        let x = Matrix4::from_diagonal(&Vector4::new(t_s, t_s, t_i, t_i));
        let noise = Vector4::new(
            1.0 - t_s * t_s,
            1.0 - t_s * t_s,
            1.0 - t_i * t_i,
            1.0 - t_i * t_i,
        ) * 0.5;
        let mut out = self.transformed(&x);
        out.cov += Matrix4::from_diagonal(&noise);
        Ok(out)
    }

    fn reduced(&self, mode: Mode) -> (Matrix2<f64>, Vector2<f64>) {
        let k = mode.offset();
        (
            self.cov.fixed_view::<2, 2>(k, k).into_owned(),
            self.disp.fixed_rows::<2>(k).into_owned(),
        )
    }

    /// Photon-number mean and variance of one mode from its reduced Gaussian
    /// state `(V, d)`:
    ///
    /// `⟨n⟩ = ½(Tr V − 1) + ½|d|²`, `Var n = ½ Tr V² − ¼ + dᵀ V d`.
    ///
    /// Both are evaluated through the excess covariance `W = V − ½I`, which
    /// keeps near-vacuum values from cancelling against the ½ offsets.
    pub fn photon_stats(&self, mode: Mode) -> PhotonStats {
        let (v, d) = self.reduced(mode);
        let w = v - Matrix2::identity() * 0.5;
        let mean = 0.5 * w.trace() + 0.5 * d.norm_squared();
        let variance = 0.5 * w.trace() + 0.5 * (w * w).trace() + (d.transpose() * v * d)[0];
        PhotonStats {
            mean: mean.max(0.0),
            variance: variance.max(0.0),
        }
    }

    pub fn mean_photons(&self, mode: Mode) -> f64 {
        self.photon_stats(mode).mean
    }

    /// Symplectic eigenvalues `(ν₋, ν₊)` of the covariance; physical states
    /// have `ν₋ ≥ ½`.
    pub fn symplectic_eigenvalues(&self) -> (f64, f64) {
        let a = self.cov.fixed_view::<2, 2>(0, 0).determinant();
        let b = self.cov.fixed_view::<2, 2>(2, 2).determinant();
        let c = self.cov.fixed_view::<2, 2>(0, 2).determinant();
        let delta = a + b + 2.0 * c;
        let det = self.cov.determinant();
        let disc = (delta * delta - 4.0 * det).max(0.0).sqrt();
        let lo = ((delta - disc) * 0.5).max(0.0).sqrt();
        let hi = ((delta + disc) * 0.5).max(0.0).sqrt();
        (lo, hi)
    }
}

/// Tap points along the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Seeded,
    AfterFirstAmplifier,
    AfterLoss,
    AfterPhase,
    Output,
}

/// Propagates `cfg` up to and including `stage`.
///
/// Order: idler seed, first squeezer, loss, signal phase, second squeezer.
pub fn propagate_to(cfg: &InterferometerConfig, stage: Stage) -> Result<GaussianTwoModeState> {
    cfg.validate()?;
    let state = GaussianTwoModeState::vacuum().seed_idler(cfg.n_i)?;
    if stage == Stage::Seeded {
        return Ok(state);
    }
    let state = state.apply_squeezer(cfg.g1);
    if stage == Stage::AfterFirstAmplifier {
        return Ok(state);
    }
    let state = state.apply_loss(cfg.t_s, cfg.t_i)?;
    if stage == Stage::AfterLoss {
        return Ok(state);
    }
    let state = state.apply_phase(cfg.theta, Mode::Signal);
    if stage == Stage::AfterPhase {
        return Ok(state);
    }
    Ok(state.apply_squeezer(cfg.g2))
}

pub fn run_interferometer(cfg: &InterferometerConfig) -> Result<GaussianTwoModeState> {
    propagate_to(cfg, Stage::Output)
}
