//! Truncated two-mode Fock-space brute force.
//!
//! Every operation acts on explicit photon-number amplitudes so that the
//! Gaussian engine can be checked against something that shares none of its
//! algebra. Once loss has mixed the state, the density operator is kept as a
//! sum of unnormalised pure branches `ρ = Σ_k |ψ_k⟩⟨ψ_k|`, one per Kraus
//! outcome. Flat basis index is `n_s + n_i·D` for cutoff `D`.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

use crate::config::InterferometerConfig;
use crate::error::{check_transmission, Error, Result};
use crate::gaussian::{Mode, PhotonStats};

type C64 = Complex64;

/// Largest single-squeezer gain the oracle accepts.
pub const MAX_SQUEEZE_GAIN: f64 = 0.5;
/// Largest displacement `|α|²` the oracle accepts.
pub const MAX_DISPLACEMENT_PHOTONS: f64 = 8.0;
/// Parameter box of [`FockOracle::pipeline`].
pub const PIPELINE_MAX_GAIN: f64 = 0.3;
pub const PIPELINE_MAX_SEED: f64 = 4.0;

const SERIES_TOL: f64 = 1e-17;
/// Kraus branches lighter than this are dropped; their weight counts toward
/// the truncation budget.
const BRANCH_FLOOR: f64 = 1e-20;

/// `exp(a)` by scaling and squaring of the Taylor series.
fn expm<T>(a: &DMatrix<T>) -> DMatrix<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n = a.nrows();
    let norm = a.norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.unscale(2f64.powi(squarings));
    let mut sum = DMatrix::<T>::identity(n, n);
    let mut term = DMatrix::<T>::identity(n, n);
    for k in 1..64 {
        term = (&term * &scaled).unscale(k as f64);
        sum += &term;
        if term.norm() <= SERIES_TOL * sum.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Squeeze unitary `exp[G(a_s†a_i† − a_s a_i)]`, stored per conserved
/// photon-number difference `Δ = n_s − n_i`. Each block is real orthogonal.
struct SqueezeBlocks {
    cutoff: usize,
    blocks: Vec<(usize, usize, DMatrix<f64>)>,
}

impl SqueezeBlocks {
    fn new(gain: f64, cutoff: usize) -> Self {
        let d = cutoff as i64;
        let blocks = (-(d - 1)..d)
            .map(|delta| {
                let (a, b) = (delta.max(0) as usize, (-delta).max(0) as usize);
                let len = cutoff - delta.unsigned_abs() as usize;
                let mut gen = DMatrix::<f64>::zeros(len, len);
                for k in 0..len.saturating_sub(1) {
                    let amp = (((k + a + 1) * (k + b + 1)) as f64).sqrt() * gain;
                    gen[(k + 1, k)] = amp;
                    gen[(k, k + 1)] = -amp;
                }
                (a, b, expm(&gen))
            })
            .collect();
        Self { cutoff, blocks }
    }

    fn apply(&self, v: &mut [C64], scratch: &mut Vec<C64>) {
        let d = self.cutoff;
        for (a, b, u) in &self.blocks {
            let len = u.nrows();
            scratch.clear();
            scratch.extend((0..len).map(|k| v[(k + a) + (k + b) * d]));
            for r in 0..len {
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..len {
                    acc += scratch[c] * u[(r, c)];
                }
                v[(r + a) + (r + b) * d] = acc;
            }
        }
    }
}

/// Applies a single-mode operator `m` (D×D) to a flat two-mode vector.
fn apply_single_mode(
    m: &DMatrix<C64>,
    mode: Mode,
    d: usize,
    v: &mut [C64],
    scratch: &mut Vec<C64>,
) {
    scratch.clear();
    scratch.extend_from_slice(v);
    for ni in 0..d {
        for ns in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            match mode {
                Mode::Signal => {
                    for c in 0..d {
                        acc += m[(ns, c)] * scratch[c + ni * d];
                    }
                }
                Mode::Idler => {
                    for c in 0..d {
                        acc += m[(ni, c)] * scratch[ns + c * d];
                    }
                }
            }
            v[ns + ni * d] = acc;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// `amp[(n_s, n_i)]`
    Pure(DMatrix<C64>),
    /// Branches `ψ_k[(n_s, n_i)]` with `ρ = Σ_k |ψ_k⟩⟨ψ_k|`.
    Mixed(Vec<DMatrix<C64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockTwoModeState {
    cutoff: usize,
    repr: Repr,
    /// Weight of pruned Kraus branches.
    discarded: f64,
}

impl FockTwoModeState {
    pub fn vacuum(cutoff: usize) -> Self {
        assert!(cutoff >= 4, "cutoff must be at least 4");
        let mut amp = DMatrix::zeros(cutoff, cutoff);
        amp[(0, 0)] = C64::new(1.0, 0.0);
        Self {
            cutoff,
            repr: Repr::Pure(amp),
            discarded: 0.0,
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    /// Amplitude of `|n_s, n_i⟩`, if the state is still pure.
    pub fn amplitude(&self, n_s: usize, n_i: usize) -> Option<C64> {
        match &self.repr {
            Repr::Pure(a) => Some(a[(n_s, n_i)]),
            Repr::Mixed(_) => None,
        }
    }

    /// Joint photon-number distribution `P[(n_s, n_i)]`.
    pub fn probabilities(&self) -> DMatrix<f64> {
        let d = self.cutoff;
        match &self.repr {
            Repr::Pure(a) => a.map(|z| z.norm_sqr()),
            Repr::Mixed(branches) => branches
                .iter()
                .fold(DMatrix::zeros(d, d), |acc, b| acc + b.map(|z| z.norm_sqr())),
        }
    }

    /// Full density matrix `ρ[(ket, bra)]` over flat indices (`D² × D²`).
    pub fn density_matrix(&self) -> DMatrix<C64> {
        let n = self.cutoff * self.cutoff;
        let branches = match &self.repr {
            Repr::Pure(a) => std::slice::from_ref(a),
            Repr::Mixed(b) => b.as_slice(),
        };
        branches.iter().fold(DMatrix::zeros(n, n), |acc, b| {
            let v = DVector::from_column_slice(b.as_slice());
            acc + &v * v.adjoint()
        })
    }

    /// Number of pure branches carrying the state.
    pub fn rank_bound(&self) -> usize {
        match &self.repr {
            Repr::Pure(_) => 1,
            Repr::Mixed(b) => b.len(),
        }
    }

    fn for_each_branch(&mut self, mut f: impl FnMut(&mut DMatrix<C64>)) {
        match &mut self.repr {
            Repr::Pure(a) => f(a),
            Repr::Mixed(branches) => branches.iter_mut().for_each(f),
        }
    }

    pub fn trace(&self) -> f64 {
        self.probabilities().sum()
    }

    /// Probability in the top two photon-number levels of either mode, plus
    /// any pruned branch weight.
    pub fn tail_population(&self) -> f64 {
        let d = self.cutoff;
        let p = self.probabilities();
        let mut tail = self.discarded;
        for ni in 0..d {
            for ns in 0..d {
                if ns + 2 >= d || ni + 2 >= d {
                    tail += p[(ns, ni)];
                }
            }
        }
        tail
    }

    pub fn photon_stats(&self, mode: Mode) -> PhotonStats {
        let p = self.probabilities();
        let (mut m1, mut m2) = (0.0, 0.0);
        for ni in 0..self.cutoff {
            for ns in 0..self.cutoff {
                let n = match mode {
                    Mode::Signal => ns,
                    Mode::Idler => ni,
                } as f64;
                m1 += n * p[(ns, ni)];
                m2 += n * n * p[(ns, ni)];
            }
        }
        PhotonStats {
            mean: m1,
            variance: m2 - m1 * m1,
        }
    }

    fn checked(self, tolerance: f64) -> Result<Self> {
        let tail = self.tail_population();
        if tail < tolerance {
            Ok(self)
        } else {
            Err(Error::Truncation {
                cutoff: self.cutoff,
                tail,
            })
        }
    }

    /// Displacement `exp(α a† − α* a)` on one mode.
    pub fn displace(self, alpha: C64, mode: Mode) -> Result<Self> {
        if alpha.norm_sqr() > MAX_DISPLACEMENT_PHOTONS {
            return Err(Error::domain(
                "|alpha|^2",
                alpha.norm_sqr(),
                "<= 8 in the Fock oracle",
            ));
        }
        if alpha == C64::new(0.0, 0.0) {
            return Ok(self);
        }
        let d = self.cutoff;
        let mut gen = DMatrix::<C64>::zeros(d, d);
        for n in 0..d - 1 {
            let s = ((n + 1) as f64).sqrt();
            gen[(n + 1, n)] = alpha * s;
            gen[(n, n + 1)] = -alpha.conj() * s;
        }
        let op = expm(&gen);
        let mut scratch = Vec::with_capacity(d * d);
        let mut out = self;
        out.for_each_branch(|a| apply_single_mode(&op, mode, d, a.as_mut_slice(), &mut scratch));
        Ok(out)
    }

    /// Two-mode squeezer `exp[G(a_s†a_i† − a_s a_i)]`.
    pub fn squeeze(self, gain: f64) -> Result<Self> {
        if !(0.0..=MAX_SQUEEZE_GAIN).contains(&gain) {
            return Err(Error::domain("G", gain, "0 <= G <= 0.5 in the Fock oracle"));
        }
        if gain == 0.0 {
            return Ok(self);
        }
        let d = self.cutoff;
        let blocks = SqueezeBlocks::new(gain, d);
        let mut scratch = Vec::with_capacity(d);
        let mut out = self;
        out.for_each_branch(|a| blocks.apply(a.as_mut_slice(), &mut scratch));
        Ok(out)
    }

    /// Signal phase shift `exp(−iθ n_s)`, so that `a_s → a_s e^{−iθ}` as in the
    /// Gaussian engine.
    pub fn phase(self, theta: f64) -> Self {
        let d = self.cutoff;
        let factors: Vec<C64> = (0..d)
            .map(|n| C64::from_polar(1.0, -(n as f64) * theta))
            .collect();
        let mut out = self;
        out.for_each_branch(|a| {
            for ni in 0..d {
                for ns in 0..d {
                    a[(ns, ni)] *= factors[ns];
                }
            }
        });
        out
    }

    /// Pure-loss channel with amplitude transmission `t` on one mode, as the
    /// Kraus sum `Σ_k K_k ρ K_k†` with
    /// `K_k |n⟩ = √C(n,k) t^{n−k} (1−t²)^{k/2} |n−k⟩`.
    pub fn loss(self, t: f64, mode: Mode) -> Result<Self> {
        check_transmission("t", t)?;
        if t == 1.0 {
            return Ok(self);
        }
        let d = self.cutoff;
        let r = (1.0 - t * t).max(0.0).sqrt();
        // kraus[k][n]: coefficient of |n+k⟩ → |n⟩.
        let kraus: Vec<Vec<f64>> = (0..d)
            .map(|k| {
                (0..d - k)
                    .map(|n| binomial(n + k, k).sqrt() * t.powi(n as i32) * r.powi(k as i32))
                    .collect()
            })
            .collect();
        let branches = match self.repr {
            Repr::Pure(a) => vec![a],
            Repr::Mixed(b) => b,
        };
        let mut discarded = self.discarded;
        let mut out = Vec::with_capacity(branches.len() * 4);
        for psi in &branches {
            for (k, coeff) in kraus.iter().enumerate() {
                let mut phi = DMatrix::<C64>::zeros(d, d);
                for (n, &c) in coeff.iter().enumerate() {
                    for other in 0..d {
                        match mode {
                            Mode::Signal => phi[(n, other)] = psi[(n + k, other)] * c,
                            Mode::Idler => phi[(other, n)] = psi[(other, n + k)] * c,
                        }
                    }
                }
                let weight = phi.norm_squared();
                if weight > BRANCH_FLOOR {
                    out.push(phi);
                } else {
                    discarded += weight;
                }
            }
        }
        Ok(Self {
            cutoff: d,
            repr: Repr::Mixed(out),
            discarded,
        })
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (1..=k).fold(1.0, |acc, j| acc * (n - k + j) as f64 / j as f64)
}

/// Runs the truncated-space interferometer with automatic cutoff doubling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockOracle {
    pub cutoff: usize,
    /// Cutoff ceiling while the state is pure.
    pub max_cutoff: usize,
    /// Cutoff ceiling once loss has mixed the state (branch storage can grow
    /// as `D⁴`).
    pub max_mixed_cutoff: usize,
    pub tail_tolerance: f64,
}

impl Default for FockOracle {
    fn default() -> Self {
        Self {
            cutoff: 40,
            max_cutoff: 128,
            max_mixed_cutoff: 64,
            tail_tolerance: 1e-10,
        }
    }
}

/// Output of [`FockOracle::pipeline`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockRun {
    pub signal: PhotonStats,
    pub idler: PhotonStats,
    pub cutoff: usize,
    pub trace: f64,
}

impl FockOracle {
    pub fn with_cutoff(cutoff: usize) -> Self {
        Self {
            cutoff,
            ..Self::default()
        }
    }

    fn run_once(&self, cfg: &InterferometerConfig, d: usize) -> Result<FockTwoModeState> {
        let tol = self.tail_tolerance;
        let mut state = FockTwoModeState::vacuum(d)
            .displace(C64::new(cfg.n_i.sqrt(), 0.0), Mode::Idler)?
            .checked(tol)?
            .squeeze(cfg.g1)?
            .checked(tol)?;
        let lossy = cfg.t_s < 1.0 || cfg.t_i < 1.0;
        if lossy && d > self.max_mixed_cutoff {
            return Err(Error::Truncation {
                cutoff: d,
                tail: state.tail_population(),
            });
        }
        state = state
            .loss(cfg.t_s, Mode::Signal)?
            .loss(cfg.t_i, Mode::Idler)?;
        state.phase(cfg.theta).squeeze(cfg.g2)?.checked(tol)
    }

    /// Seed, squeeze, loss, phase, squeeze; returns photon statistics by
    /// direct summation over the final state.
    pub fn pipeline(&self, cfg: &InterferometerConfig) -> Result<FockRun> {
        cfg.validate()?;
        if cfg.g1 > PIPELINE_MAX_GAIN || cfg.g2 > PIPELINE_MAX_GAIN {
            return Err(Error::domain(
                "G",
                cfg.g1.max(cfg.g2),
                "<= 0.3 in the Fock pipeline",
            ));
        }
        if cfg.n_i > PIPELINE_MAX_SEED {
            return Err(Error::domain("n_i", cfg.n_i, "<= 4 in the Fock pipeline"));
        }
        let mut d = self.cutoff;
        loop {
            match self.run_once(cfg, d) {
                Ok(state) => {
                    return Ok(FockRun {
                        signal: state.photon_stats(Mode::Signal),
                        idler: state.photon_stats(Mode::Idler),
                        cutoff: d,
                        trace: state.trace(),
                    })
                }
                Err(Error::Truncation { .. }) if 2 * d <= self.max_cutoff => d *= 2,
                Err(e) => return Err(e),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn tmsv(gain: f64, d: usize) -> FockTwoModeState {
        FockTwoModeState::vacuum(d).squeeze(gain).unwrap()
    }

    #[test]
    fn expm_of_rotation_generator() {
        let g = DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]);
        let e = expm(&g);
        assert_relative_eq!(e[(0, 0)], 2f64.cos(), epsilon = 1e-14);
        assert_relative_eq!(e[(1, 0)], 2f64.sin(), epsilon = 1e-14);
    }

    #[test]
    fn squeezing_vacuum_gives_schmidt_amplitudes() {
        let g = 0.1;
        let s = tmsv(g, 40);
        for n in 0..10 {
            let expect = g.tanh().powi(n as i32) / g.cosh();
            assert_relative_eq!(s.amplitude(n, n).unwrap().re, expect, epsilon = 1e-14);
            assert!(s.amplitude(n, n + 1).unwrap().norm() < 1e-16);
        }
        let p = s.probabilities();
        assert_relative_eq!(
            p[(1, 1)] / p[(0, 0)],
            0.00993370915256022,
            max_relative = 1e-5
        );
        let st = s.photon_stats(Mode::Signal);
        assert_relative_eq!(st.mean, g.sinh().powi(2), max_relative = 1e-12);
        assert_relative_eq!(st.variance, 0.0101340464798069, max_relative = 1e-5);
        assert_relative_eq!(s.trace(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_operations_are_identity() {
        let v = FockTwoModeState::vacuum(12);
        assert_eq!(v.clone().squeeze(0.0).unwrap(), v);
        assert_eq!(
            v.clone().displace(C64::new(0.0, 0.0), Mode::Idler).unwrap(),
            v
        );
        assert_eq!(v.clone().loss(1.0, Mode::Signal).unwrap(), v);
        assert_eq!(v.clone().phase(0.0), v);
    }

    #[test]
    fn phase_leaves_number_distribution() {
        let s = tmsv(0.2, 30);
        let p = s.probabilities();
        let q = s.phase(1.7).probabilities();
        assert!((p - q).abs().max() < 1e-15);
    }

    #[test]
    fn destructive_fringe_is_dark() {
        let out = tmsv(0.1, 40).phase(PI).squeeze(0.1).unwrap();
        assert!(out.photon_stats(Mode::Signal).mean.abs() < 1e-9);
    }

    #[test]
    fn coherent_state_is_poissonian() {
        let s = FockTwoModeState::vacuum(40)
            .displace(C64::new(2.0, 0.0), Mode::Idler)
            .unwrap();
        let st = s.photon_stats(Mode::Idler);
        assert_relative_eq!(st.mean, 4.0, max_relative = 1e-10);
        assert_relative_eq!(st.variance, 4.0, max_relative = 1e-10);
        let s = FockTwoModeState::vacuum(40)
            .displace(C64::new(0.0, 1.5), Mode::Signal)
            .unwrap();
        assert_relative_eq!(
            s.photon_stats(Mode::Signal).mean,
            2.25,
            max_relative = 1e-10
        );
        assert!(FockTwoModeState::vacuum(8)
            .displace(C64::new(3.0, 0.0), Mode::Idler)
            .is_err());
    }

    #[test]
    fn seeded_squeezer_scales_by_seed_plus_one() {
        let alpha: f64 = 1.7;
        let s = FockTwoModeState::vacuum(40)
            .displace(C64::new(alpha, 0.0), Mode::Idler)
            .unwrap()
            .squeeze(0.1)
            .unwrap();
        assert_relative_eq!(
            s.photon_stats(Mode::Signal).mean,
            0.1f64.sinh().powi(2) * (1.0 + alpha * alpha),
            max_relative = 1e-10
        );
    }

    #[test]
    fn attenuated_coherent_state() {
        let s = FockTwoModeState::vacuum(30)
            .displace(C64::new(2f64.sqrt(), 0.0), Mode::Idler)
            .unwrap()
            .loss(0.5, Mode::Idler)
            .unwrap();
        assert!(!s.is_pure());
        let st = s.photon_stats(Mode::Idler);
        assert_relative_eq!(st.mean, 0.5, max_relative = 1e-10);
        assert_relative_eq!(st.variance, 0.5, max_relative = 1e-9);
    }

    #[test]
    fn attenuated_thermal_marginal() {
        let s = tmsv(0.2, 24).loss(0.7, Mode::Signal).unwrap();
        assert_relative_eq!(
            s.photon_stats(Mode::Signal).mean,
            0.49 * 0.2f64.sinh().powi(2),
            max_relative = 1e-10
        );
        assert_relative_eq!(s.trace(), 1.0, epsilon = 1e-9);
        assert!(s.probabilities().iter().all(|&p| p >= -1e-12));
    }

    #[test]
    fn loss_is_trace_preserving_on_mixed_input() {
        let s = tmsv(0.25, 20)
            .loss(0.8, Mode::Signal)
            .unwrap()
            .loss(0.3, Mode::Idler)
            .unwrap()
            .squeeze(0.2)
            .unwrap();
        assert_relative_eq!(s.trace(), 1.0, epsilon = 1e-9);
        assert!(s.probabilities().iter().all(|&p| p >= -1e-12));
        let s = s.loss(0.0, Mode::Signal).unwrap();
        assert!(s.photon_stats(Mode::Signal).mean.abs() < 1e-14);
    }

    #[test]
    fn mixed_density_is_positive_hermitian() {
        let s = FockTwoModeState::vacuum(8)
            .displace(C64::new(0.6, 0.3), Mode::Idler)
            .unwrap()
            .squeeze(0.2)
            .unwrap()
            .loss(0.6, Mode::Signal)
            .unwrap()
            .loss(0.8, Mode::Idler)
            .unwrap()
            .phase(0.9);
        assert!(s.rank_bound() > 1);
        let rho = s.density_matrix();
        assert!((&rho - rho.adjoint()).norm() < 1e-15);
        let eig = rho.clone().symmetric_eigenvalues();
        assert!(eig.iter().all(|&e| e >= -1e-12), "{eig}");
        assert_relative_eq!(rho.trace().re, s.trace(), epsilon = 1e-14);
    }

    #[test]
    fn pipeline_fringe_extremes() {
        let oracle = FockOracle::default();
        let cfg = InterferometerConfig::balanced(0.1);
        let bright = oracle.pipeline(&cfg).unwrap();
        assert!((bright.signal.mean - 0.0405361859192274).abs() < 1e-7);
        assert_relative_eq!(
            bright.signal.mean,
            0.2f64.sinh().powi(2),
            max_relative = 1e-10
        );
        let dark = oracle.pipeline(&cfg.with_theta(PI)).unwrap();
        assert!(dark.signal.mean.abs() < 1e-9);
    }

    #[test]
    fn pipeline_rejects_out_of_regime() {
        let oracle = FockOracle::default();
        assert!(oracle
            .pipeline(&InterferometerConfig::balanced(0.4))
            .is_err());
        assert!(oracle
            .pipeline(&InterferometerConfig::balanced(0.1).with_seed(5.0))
            .is_err());
        assert!(FockTwoModeState::vacuum(8).squeeze(0.6).is_err());
    }

    #[test]
    fn small_cutoff_doubles() {
        let oracle = FockOracle {
            cutoff: 5,
            ..FockOracle::default()
        };
        let cfg = InterferometerConfig::default()
            .with_gains(0.3, 0.3)
            .with_seed(3.0)
            .with_theta(0.4);
        let run = oracle.pipeline(&cfg).unwrap();
        assert!(run.cutoff > 5);
        let reference = FockOracle::default().pipeline(&cfg).unwrap();
        assert!((run.signal.mean - reference.signal.mean).abs() < 1e-8);
    }

    #[test]
    fn truncation_error_when_capped() {
        let oracle = FockOracle {
            cutoff: 5,
            max_cutoff: 8,
            ..FockOracle::default()
        };
        let cfg = InterferometerConfig::balanced(0.3).with_seed(4.0);
        assert!(matches!(
            oracle.pipeline(&cfg),
            Err(Error::Truncation { .. })
        ));
    }
}
