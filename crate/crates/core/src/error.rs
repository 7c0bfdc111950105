use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("visibility is undefined: total fringe flux is zero")]
    UndefinedVisibility,

    #[error("sensitivity is infinite at zero parametric gain")]
    InfiniteSensitivity,

    #[error("stationary working point at theta = {theta}: |dN/dtheta| = {derivative:e}")]
    StationaryPoint { theta: f64, derivative: f64 },

    #[error(
        "numeric derivative {numeric:e} disagrees with analytic {analytic:e} at theta = {theta}"
    )]
    DerivativeMismatch {
        theta: f64,
        numeric: f64,
        analytic: f64,
    },

    #[error("Fock cutoff {cutoff} too small: tail population {tail:e}")]
    Truncation { cutoff: usize, tail: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            expected,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Checks an amplitude transmission lies in [0, 1].
pub(crate) fn check_transmission(name: &'static str, t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::domain(name, t, "0 <= t <= 1"))
    }
}

pub(crate) fn check_nonnegative(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(name, v, "finite and >= 0"))
    }
}
