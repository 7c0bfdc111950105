use serde::{Deserialize, Serialize};

use crate::error::{check_nonnegative, check_transmission, Error, Result};

/// Full parameter set of a two-OPA interferometer with internal loss and an
/// idler seed.
///
/// Transmissions are amplitude coefficients; power transmission is `t²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    /// Gain of the first amplifier.
    pub g1: f64,
    /// Gain of the second amplifier.
    pub g2: f64,
    /// Relative phase between the amplifiers, radians.
    pub theta: f64,
    /// Signal amplitude transmission.
    pub t_s: f64,
    /// Idler amplitude transmission.
    pub t_i: f64,
    /// Mean photon number of the coherent idler seed.
    pub n_i: f64,
}

impl Default for InterferometerConfig {
    fn default() -> Self {
        Self {
            g1: 0.1,
            g2: 0.1,
            theta: 0.0,
            t_s: 1.0,
            t_i: 1.0,
            n_i: 0.0,
        }
    }
}

impl InterferometerConfig {
    /// Balanced, lossless, unseeded configuration.
    pub fn balanced(gain: f64) -> Self {
        Self {
            g1: gain,
            g2: gain,
            ..Self::default()
        }
    }

    pub fn with_gains(mut self, g1: f64, g2: f64) -> Self {
        self.g1 = g1;
        self.g2 = g2;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    /// Sets amplitude transmissions.
    pub fn with_transmission(mut self, t_s: f64, t_i: f64) -> Self {
        self.t_s = t_s;
        self.t_i = t_i;
        self
    }

    /// Sets transmissions from power values `t²`.
    pub fn with_power_transmission(self, ts2: f64, ti2: f64) -> Self {
        self.with_transmission(ts2.sqrt(), ti2.sqrt())
    }

    pub fn with_seed(mut self, n_i: f64) -> Self {
        self.n_i = n_i;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_nonnegative("G1", self.g1)?;
        check_nonnegative("G2", self.g2)?;
        if !self.theta.is_finite() {
            return Err(Error::domain("theta", self.theta, "finite"));
        }
        check_transmission("t_s", self.t_s)?;
        check_transmission("t_i", self.t_i)?;
        check_nonnegative("n_i", self.n_i)
    }
}
