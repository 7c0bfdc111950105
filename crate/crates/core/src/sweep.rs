//! Parameter sweeps, preconfigured figure data, the three-way validation
//! suite, and their CSV/JSON serialization.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form;
use crate::config::InterferometerConfig;
use crate::error::{Error, Result};
use crate::fock::FockOracle;
use crate::gaussian::{run_interferometer, Mode};
use crate::metrics::{self, ShotNoiseConvention};

pub const MAX_STEPS: usize = 1_000_000;

/// Swept parameter. The `*2` axes are power transmissions `t²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    SignalTransmission,
    IdlerTransmission,
    BothTransmission,
    Theta,
    Seed,
    Gain1,
    Gain2,
}

impl Axis {
    pub const ALL: [Axis; 7] = [
        Axis::SignalTransmission,
        Axis::IdlerTransmission,
        Axis::BothTransmission,
        Axis::Theta,
        Axis::Seed,
        Axis::Gain1,
        Axis::Gain2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Axis::SignalTransmission => "t_s2",
            Axis::IdlerTransmission => "t_i2",
            Axis::BothTransmission => "t_both2",
            Axis::Theta => "theta",
            Axis::Seed => "n_i",
            Axis::Gain1 => "G1",
            Axis::Gain2 => "G2",
        }
    }

    fn check_range(self, lo: f64, hi: f64) -> Result<()> {
        let ok = match self {
            Axis::SignalTransmission | Axis::IdlerTransmission | Axis::BothTransmission => {
                (0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi)
            }
            Axis::Theta => lo.is_finite() && hi.is_finite(),
            Axis::Seed | Axis::Gain1 | Axis::Gain2 => lo >= 0.0 && hi.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "range [{lo}, {hi}] outside the domain of axis {self}"
            )))
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axis::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown axis `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Mean,
    Visibility,
    Dtheta2,
    DbVsShotnoise,
    /// Shot-noise phase variance under the sweep's convention.
    ShotNoise,
    /// Lossless balanced bound relative to shot noise, in dB.
    IdealDbVsShotnoise,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Mean,
        Metric::Visibility,
        Metric::Dtheta2,
        Metric::DbVsShotnoise,
        Metric::ShotNoise,
        Metric::IdealDbVsShotnoise,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Mean => "mean",
            Metric::Visibility => "visibility",
            Metric::Dtheta2 => "dtheta2",
            Metric::DbVsShotnoise => "db_vs_shotnoise",
            Metric::ShotNoise => "shot_noise",
            Metric::IdealDbVsShotnoise => "ideal_db_vs_shotnoise",
        }
    }

    fn needs_sensitivity(self) -> bool {
        matches!(self, Metric::Dtheta2 | Metric::DbVsShotnoise)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown metric `{s}`")))
    }
}

/// Flat key/value configuration file. Every key is optional so files and
/// command-line overrides can be layered with [`SweepFile::overlay`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ts2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ti2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_i: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snl_convention: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_ts2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_ti2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis_total: Option<bool>,
}

impl SweepFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_text(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Interferometer parameters, with unset keys at their defaults
    /// (G₁ = G₂ = 0.1, θ = 0, lossless, unseeded).
    pub fn interferometer(&self) -> InterferometerConfig {
        InterferometerConfig {
            g1: self.g1.unwrap_or(0.1),
            g2: self.g2.unwrap_or(0.1),
            theta: self.theta.unwrap_or(0.0),
            t_s: self.ts2.unwrap_or(1.0).sqrt(),
            t_i: self.ti2.unwrap_or(1.0).sqrt(),
            n_i: self.n_i.unwrap_or(0.0),
        }
    }

    pub fn snl_convention(&self) -> Result<ShotNoiseConvention> {
        match &self.snl_convention {
            Some(s) => s.parse(),
            None => Ok(ShotNoiseConvention::Pairs),
        }
    }

    /// Keys set in `top` replace those in `self`.
    pub fn overlay(self, top: SweepFile) -> SweepFile {
        SweepFile {
            g1: top.g1.or(self.g1),
            g2: top.g2.or(self.g2),
            theta: top.theta.or(self.theta),
            ts2: top.ts2.or(self.ts2),
            ti2: top.ti2.or(self.ti2),
            n_i: top.n_i.or(self.n_i),
            snl_convention: top.snl_convention.or(self.snl_convention),
            axis: top.axis.or(self.axis),
            lo: top.lo.or(self.lo),
            hi: top.hi.or(self.hi),
            steps: top.steps.or(self.steps),
            base_ts2: top.base_ts2.or(self.base_ts2),
            base_ti2: top.base_ti2.or(self.base_ti2),
            metrics: top.metrics.or(self.metrics),
            axis_total: top.axis_total.or(self.axis_total),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    /// Values of the parameters that are not swept.
    pub fixed: InterferometerConfig,
    pub metrics: Vec<Metric>,
    /// Initial power transmissions `(t_s², t_i²)` that swept extra loss
    /// multiplies.
    pub base_transmission: Option<(f64, f64)>,
    /// Read the transmission axis as total transmission instead of extra
    /// transmission on top of the base.
    pub axis_total: bool,
    pub snl_convention: ShotNoiseConvention,
}

impl SweepSpec {
    pub fn new(axis: Axis, lo: f64, hi: f64, steps: usize) -> Self {
        Self {
            axis,
            lo,
            hi,
            steps,
            fixed: InterferometerConfig::default(),
            metrics: vec![Metric::Mean],
            base_transmission: None,
            axis_total: false,
            snl_convention: ShotNoiseConvention::Pairs,
        }
    }

    pub fn with_fixed(mut self, fixed: InterferometerConfig) -> Self {
        self.fixed = fixed;
        self
    }

    pub fn with_metrics(mut self, metrics: &[Metric]) -> Self {
        self.metrics = metrics.to_vec();
        self
    }

    pub fn with_base_transmission(mut self, ts2: f64, ti2: f64) -> Self {
        self.base_transmission = Some((ts2, ti2));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_STEPS).contains(&self.steps) {
            return Err(Error::Config(format!(
                "steps = {} must be in [2, {MAX_STEPS}]",
                self.steps
            )));
        }
        if self.lo.partial_cmp(&self.hi) != Some(std::cmp::Ordering::Less) {
            return Err(Error::Config(format!(
                "need lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        self.axis.check_range(self.lo, self.hi)?;
        if let Some((bs, bi)) = self.base_transmission {
            for (name, b) in [("base_ts2", bs), ("base_ti2", bi)] {
                if !(b > 0.0 && b <= 1.0) {
                    return Err(Error::Config(format!("{name} = {b} must be in (0, 1]")));
                }
            }
        }
        if self.metrics.is_empty() {
            return Err(Error::Config("no metrics requested".into()));
        }
        self.fixed.validate()
    }

    pub fn from_file(file: &SweepFile) -> Result<Self> {
        let missing = |k: &str| Error::Config(format!("missing key `{k}`"));
        let axis: Axis = file
            .axis
            .as_deref()
            .ok_or_else(|| missing("axis"))?
            .parse()?;
        let fixed = file.interferometer();
        let base_transmission = match (file.base_ts2, file.base_ti2) {
            (None, None) => None,
            (s, i) => Some((s.unwrap_or(1.0), i.unwrap_or(1.0))),
        };
        let metrics = match &file.metrics {
            Some(list) => list.iter().map(|m| m.parse()).collect::<Result<Vec<_>>>()?,
            None => vec![Metric::Mean],
        };
        let spec = SweepSpec {
            axis,
            lo: file.lo.ok_or_else(|| missing("lo"))?,
            hi: file.hi.ok_or_else(|| missing("hi"))?,
            steps: file.steps.ok_or_else(|| missing("steps"))?,
            fixed,
            metrics,
            base_transmission,
            axis_total: file.axis_total.unwrap_or(false),
            snl_convention: file.snl_convention()?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_file(&self) -> SweepFile {
        SweepFile {
            g1: Some(self.fixed.g1),
            g2: Some(self.fixed.g2),
            theta: Some(self.fixed.theta),
            ts2: Some(self.fixed.t_s * self.fixed.t_s),
            ti2: Some(self.fixed.t_i * self.fixed.t_i),
            n_i: Some(self.fixed.n_i),
            snl_convention: Some(self.snl_convention.to_string()),
            axis: Some(self.axis.to_string()),
            lo: Some(self.lo),
            hi: Some(self.hi),
            steps: Some(self.steps),
            base_ts2: self.base_transmission.map(|b| b.0),
            base_ti2: self.base_transmission.map(|b| b.1),
            metrics: Some(self.metrics.iter().map(|m| m.to_string()).collect()),
            axis_total: Some(self.axis_total),
        }
    }

    pub fn axis_values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|k| {
                if k + 1 == n {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    /// Interferometer configuration at axis value `x`.
    pub fn config_at(&self, x: f64) -> InterferometerConfig {
        let mut cfg = self.fixed;
        let (mut ts2, mut ti2) = (cfg.t_s * cfg.t_s, cfg.t_i * cfg.t_i);
        if let Some((bs, bi)) = self.base_transmission {
            ts2 = bs;
            ti2 = bi;
        }
        let compose = |base: f64| if self.axis_total { x } else { base * x };
        match self.axis {
            Axis::SignalTransmission => ts2 = compose(ts2),
            Axis::IdlerTransmission => ti2 = compose(ti2),
            Axis::BothTransmission => {
                ts2 = compose(ts2);
                ti2 = compose(ti2);
            }
            Axis::Theta => cfg.theta = x,
            Axis::Seed => cfg.n_i = x,
            Axis::Gain1 => cfg.g1 = x,
            Axis::Gain2 => cfg.g2 = x,
        }
        cfg.with_power_transmission(ts2, ti2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub ts2: f64,
    pub ti2: f64,
    /// One entry per requested metric, in request order.
    pub values: Vec<Option<f64>>,
    pub errors: Vec<String>,
}

impl SweepRow {
    pub fn is_error(&self) -> bool {
        !self.errors.is_empty()
    }

    pub fn value(&self, spec: &SweepSpec, metric: Metric) -> Option<f64> {
        let k = spec.metrics.iter().position(|&m| m == metric)?;
        self.values[k]
    }
}

fn evaluate_point(spec: &SweepSpec, x: f64) -> SweepRow {
    let cfg = spec.config_at(x);
    let mut errors = Vec::new();
    let mut record = |metric: Metric, r: Result<f64>| match r {
        Ok(v) if v.is_finite() => Some(v),
        Ok(v) => {
            errors.push(format!("{metric}: non-finite value {v}"));
            None
        }
        Err(e) => {
            errors.push(format!("{metric}: {e}"));
            None
        }
    };

    let report = if spec.metrics.iter().any(|m| m.needs_sensitivity()) {
        Some(metrics::optimal_sensitivity(&cfg, spec.snl_convention))
    } else {
        None
    };
    let values = spec
        .metrics
        .iter()
        .map(|&metric| {
            let r = match metric {
                Metric::Mean => run_interferometer(&cfg).map(|s| s.mean_photons(Mode::Signal)),
                Metric::Visibility => metrics::visibility_numeric(&cfg),
                Metric::Dtheta2 => report.clone().expect("computed above").map(|r| r.dtheta2),
                Metric::DbVsShotnoise => report
                    .clone()
                    .expect("computed above")
                    .map(|r| r.db_vs_shotnoise),
                Metric::ShotNoise => metrics::shot_noise_level(&cfg, spec.snl_convention),
                Metric::IdealDbVsShotnoise => ideal_db(&cfg, spec.snl_convention),
            };
            record(metric, r)
        })
        .collect();
    SweepRow {
        axis_value: x,
        ts2: cfg.t_s * cfg.t_s,
        ti2: cfg.t_i * cfg.t_i,
        values,
        errors,
    }
}

fn ideal_db(cfg: &InterferometerConfig, convention: ShotNoiseConvention) -> Result<f64> {
    if cfg.g1 != cfg.g2 {
        return Err(Error::Config("ideal bound needs balanced gains".into()));
    }
    let ideal = closed_form::ideal_sensitivity(cfg.g1, cfg.n_i)?.value();
    let snl = metrics::shot_noise_level(cfg, convention)?;
    Ok(metrics::db_below_shot_noise(snl, ideal))
}

/// Evaluates every axis point. Points run concurrently; rows come back in
/// axis order and failures are recorded per row.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    Ok(spec
        .axis_values()
        .into_par_iter()
        .map(|x| evaluate_point(spec, x))
        .collect())
}

/// Column-oriented result table shared by the CSV and JSON writers.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Lines emitted as `# ...` comments ahead of the CSV header.
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Text(s) => serde_json::Value::String(s.clone()),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

impl Table {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for line in &self.comments {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::to_json))
                    .collect::<serde_json::Map<_, _>>();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::json!({
            "header": self.comments,
            "columns": self.columns,
            "rows": rows,
        })
    }

    pub fn error_rows(&self) -> usize {
        let Some(k) = self.columns.iter().position(|c| c == "error") else {
            return 0;
        };
        self.rows
            .iter()
            .filter(|r| !matches!(&r[k], Cell::Empty))
            .count()
    }
}

fn spec_comments(spec: &SweepSpec) -> Vec<String> {
    let mut out = Vec::new();
    if let Ok(text) = spec.to_file().to_text() {
        out.extend(text.lines().map(|l| format!("  {l}")));
    }
    out
}

fn metric_columns(spec: &SweepSpec) -> Vec<String> {
    let mut cols = vec![
        spec.axis.to_string(),
        "ts2_total".into(),
        "ti2_total".into(),
    ];
    cols.extend(spec.metrics.iter().map(|m| m.to_string()));
    cols.push("error".into());
    cols
}

fn row_cells(row: &SweepRow) -> Vec<Cell> {
    let mut cells = vec![
        Cell::Num(row.axis_value),
        Cell::Num(row.ts2),
        Cell::Num(row.ti2),
    ];
    cells.extend(row.values.iter().map(|v| v.map_or(Cell::Empty, Cell::Num)));
    cells.push(if row.errors.is_empty() {
        Cell::Empty
    } else {
        Cell::Text(row.errors.join("; "))
    });
    cells
}

fn axis_reading(spec: &SweepSpec) -> &'static str {
    let transmission = matches!(
        spec.axis,
        Axis::SignalTransmission | Axis::IdlerTransmission | Axis::BothTransmission
    );
    match (
        transmission,
        spec.base_transmission.is_some(),
        spec.axis_total,
    ) {
        (false, _, _) => "direct",
        (true, false, _) => "total transmission",
        (true, true, true) => "total transmission",
        (true, true, false) => "extra transmission times base",
    }
}

fn tool_header() -> String {
    format!("su11 {}", crate::VERSION)
}

/// Table for a single sweep.
pub fn sweep_table(spec: &SweepSpec, rows: &[SweepRow]) -> Table {
    let mut comments = vec![
        tool_header(),
        format!("axis = {} ({})", spec.axis, axis_reading(spec)),
        format!("snl_convention = {}", spec.snl_convention),
        "config:".into(),
    ];
    comments.extend(spec_comments(spec));
    Table {
        comments,
        columns: metric_columns(spec),
        rows: rows.iter().map(row_cells).collect(),
    }
}

/// Preconfigured figure reproductions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
}

impl Figure {
    pub const ALL: [Figure; 6] = [
        Figure::Fig2a,
        Figure::Fig2b,
        Figure::Fig3a,
        Figure::Fig3b,
        Figure::Fig4a,
        Figure::Fig4b,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig4a => "fig4a",
            Figure::Fig4b => "fig4b",
        }
    }

    /// Named sweeps making up the figure, one per plotted curve.
    pub fn series(self, axis_total: bool, snl: ShotNoiseConvention) -> Vec<(String, SweepSpec)> {
        let loss_curves = |n_i: f64, lo: f64, steps: usize, metrics: &[Metric]| {
            let fixed = InterferometerConfig::balanced(0.1).with_seed(n_i);
            [
                ("signal_loss", Axis::SignalTransmission),
                ("idler_loss", Axis::IdlerTransmission),
                ("symmetric_loss", Axis::BothTransmission),
            ]
            .into_iter()
            .map(|(name, axis)| {
                let mut spec = SweepSpec::new(axis, lo, 1.0, steps)
                    .with_fixed(fixed)
                    .with_metrics(metrics);
                spec.snl_convention = snl;
                (name.to_string(), spec)
            })
            .collect::<Vec<_>>()
        };
        let fig4 = |axis: Axis| {
            let (bs, bi) = (0.52, 0.42);
            let hi = match (axis_total, axis) {
                (false, _) => 1.0,
                (true, Axis::SignalTransmission) => bs,
                (true, _) => bi,
            };
            [("spontaneous", 0.0), ("stimulated", 1e4)]
                .into_iter()
                .map(|(name, n_i)| {
                    let fixed = InterferometerConfig::default()
                        .with_gains(0.45, 0.2)
                        .with_seed(n_i);
                    let mut spec = SweepSpec::new(axis, 0.005, hi, 200)
                        .with_fixed(fixed)
                        .with_metrics(&[Metric::Visibility])
                        .with_base_transmission(bs, bi);
                    spec.axis_total = axis_total;
                    spec.snl_convention = snl;
                    (name.to_string(), spec)
                })
                .collect::<Vec<_>>()
        };
        let sensitivity = [
            Metric::Dtheta2,
            Metric::ShotNoise,
            Metric::DbVsShotnoise,
            Metric::IdealDbVsShotnoise,
        ];
        match self {
            Figure::Fig2a => loss_curves(0.0, 0.01, 100, &[Metric::Visibility]),
            Figure::Fig2b => loss_curves(50.0, 0.01, 100, &[Metric::Visibility]),
            Figure::Fig3a => loss_curves(0.0, 0.05, 96, &sensitivity),
            Figure::Fig3b => loss_curves(50.0, 0.05, 96, &sensitivity),
            Figure::Fig4a => fig4(Axis::SignalTransmission),
            Figure::Fig4b => fig4(Axis::IdlerTransmission),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown figure `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub figure: Figure,
    pub series: Vec<(String, SweepSpec, Vec<SweepRow>)>,
}

pub fn figure(fig: Figure, axis_total: bool, snl: ShotNoiseConvention) -> Result<FigureData> {
    let series = fig
        .series(axis_total, snl)
        .into_iter()
        .map(|(name, spec)| {
            let rows = run_sweep(&spec)?;
            Ok((name, spec, rows))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FigureData {
        figure: fig,
        series,
    })
}

impl FigureData {
    /// All series stacked into one table with a leading `series` column.
    pub fn table(&self) -> Table {
        let mut comments = vec![tool_header(), format!("figure = {}", self.figure)];
        let mut columns = vec!["series".to_string(), "x".to_string()];
        let mut rows = Vec::new();
        for (k, (name, spec, data)) in self.series.iter().enumerate() {
            comments.push(format!(
                "series {name}: axis = {} ({}), snl_convention = {}",
                spec.axis,
                axis_reading(spec),
                spec.snl_convention
            ));
            comments.extend(spec_comments(spec));
            if k == 0 {
                columns.extend(metric_columns(spec).into_iter().skip(1));
            }
            for row in data {
                let mut cells = vec![Cell::Text(name.clone())];
                cells.extend(row_cells(row));
                rows.push(cells);
            }
        }
        Table {
            comments,
            columns,
            rows,
        }
    }

    /// gnuplot script plotting every metric column per series from the CSV
    /// named `<figure>.csv`.
    pub fn plot_script(&self) -> String {
        let table = self.table();
        let name = self.figure.as_str();
        let mut s = String::new();
        s.push_str("set datafile separator ','\nset datafile columnheaders\n");
        s.push_str(&format!(
            "set terminal pngcairo size 900,600\nset output '{name}.png'\n"
        ));
        s.push_str("set xlabel 'x'\nset key outside\n");
        let metric_cols: Vec<(usize, &String)> = table
            .columns
            .iter()
            .enumerate()
            .skip(4)
            .filter(|(_, c)| c.as_str() != "error")
            .collect();
        let mut plots = Vec::new();
        for (series, _, _) in &self.series {
            for (idx, col) in &metric_cols {
                plots.push(format!(
                    "'{name}.csv' using 2:(strcol(1) eq '{series}' ? column({}) : 1/0) with lines title '{series} {col}'",
                    idx + 1
                ));
            }
        }
        s.push_str("plot ");
        s.push_str(&plots.join(", \\\n     "));
        s.push('\n');
        s
    }
}

/// Worst-case agreement for one pair of routes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: &'static str,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub compared: usize,
    pub worst_relative: f64,
    /// `|a − b| / max(abs_tol, rel_tol·max(|a|, |b|))`; ≤ 1 passes.
    pub worst_ratio: f64,
    pub worst_config: Option<InterferometerConfig>,
    pub breaches: usize,
}

impl CheckSummary {
    fn new(name: &'static str, rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            name,
            rel_tol,
            abs_tol,
            compared: 0,
            worst_relative: 0.0,
            worst_ratio: 0.0,
            worst_config: None,
            breaches: 0,
        }
    }

    fn record(&mut self, a: f64, b: f64, cfg: &InterferometerConfig) -> bool {
        let diff = (a - b).abs();
        let scale = a.abs().max(b.abs());
        let rel = if scale > 0.0 { diff / scale } else { 0.0 };
        let ratio = diff / self.abs_tol.max(self.rel_tol * scale);
        self.compared += 1;
        self.worst_relative = self.worst_relative.max(rel);
        if ratio > self.worst_ratio || ratio.is_nan() {
            self.worst_ratio = ratio;
            self.worst_config = Some(*cfg);
        }
        let ok = ratio <= 1.0;
        if !ok {
            self.breaches += 1;
        }
        ok
    }

    pub fn passed(&self) -> bool {
        self.breaches == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub points: usize,
    pub checks: Vec<CheckSummary>,
    /// `(point index, reason)` for checks skipped at singular points.
    pub skipped: Vec<(usize, String)>,
    /// Offending configurations, one line each.
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checks.iter().all(CheckSummary::passed)
    }
}

/// Random configuration inside the Fock oracle's regime.
pub fn random_config<R: Rng>(rng: &mut R) -> InterferometerConfig {
    InterferometerConfig {
        g1: rng.gen_range(0.0..=0.3),
        g2: rng.gen_range(0.0..=0.3),
        theta: rng.gen_range(0.0..std::f64::consts::TAU),
        t_s: rng.gen_range(0.1..=1.0),
        t_i: rng.gen_range(0.1..=1.0),
        n_i: rng.gen_range(0.0..=4.0),
    }
}

pub fn random_grid(seed: u64, points: usize) -> Vec<InterferometerConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..points).map(|_| random_config(&mut rng)).collect()
}

/// Tolerances of the three-way agreement suite.
pub mod tolerances {
    pub const MEAN_CLOSED_VS_GAUSSIAN: (f64, f64) = (1e-10, 1e-12);
    pub const MEAN_FOCK: (f64, f64) = (1e-7, 1e-9);
    pub const VARIANCE_FOCK_VS_GAUSSIAN: (f64, f64) = (1e-6, 1e-9);
    pub const VISIBILITY: (f64, f64) = (1e-10, 1e-10);
}

/// Cross-checks closed form, Gaussian engine and Fock oracle on a seeded
/// random grid. With `force_singular` the first point is moved to zero gain,
/// where visibility is undefined and gets skipped.
pub fn validate(seed: u64, points: usize, force_singular: bool) -> Result<ValidationReport> {
    if points > 10_000 {
        return Err(Error::Config(format!("points = {points} exceeds 10000")));
    }
    let mut grid = random_grid(seed, points);
    if force_singular {
        if let Some(first) = grid.first_mut() {
            first.g1 = 0.0;
            first.g2 = 0.0;
        }
    }
    let oracle = FockOracle::default();
    struct Point {
        closed: f64,
        gaussian: crate::gaussian::PhotonStats,
        fock: Result<crate::fock::FockRun>,
        vis: (Result<f64>, Result<f64>),
    }
    let evaluated: Vec<Result<Point>> = grid
        .par_iter()
        .map(|cfg| {
            Ok(Point {
                closed: closed_form::mean_signal(cfg),
                gaussian: run_interferometer(cfg)?.photon_stats(Mode::Signal),
                fock: oracle.pipeline(cfg),
                vis: (
                    closed_form::visibility(cfg),
                    metrics::visibility_numeric(cfg),
                ),
            })
        })
        .collect();

    use tolerances::*;
    let mut mean_cg = CheckSummary::new(
        "mean: closed form vs gaussian",
        MEAN_CLOSED_VS_GAUSSIAN.0,
        MEAN_CLOSED_VS_GAUSSIAN.1,
    );
    let mut mean_fc = CheckSummary::new("mean: fock vs closed form", MEAN_FOCK.0, MEAN_FOCK.1);
    let mut mean_fg = CheckSummary::new("mean: fock vs gaussian", MEAN_FOCK.0, MEAN_FOCK.1);
    let mut var_fg = CheckSummary::new(
        "variance: fock vs gaussian",
        VARIANCE_FOCK_VS_GAUSSIAN.0,
        VARIANCE_FOCK_VS_GAUSSIAN.1,
    );
    let mut vis = CheckSummary::new(
        "visibility: closed form vs gaussian",
        VISIBILITY.0,
        VISIBILITY.1,
    );
    let mut skipped = Vec::new();
    let mut failures = Vec::new();

    for (k, (cfg, point)) in grid.iter().zip(evaluated).enumerate() {
        let point = match point {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("point {k} {cfg:?}: {e}"));
                continue;
            }
        };
        let mut ok = mean_cg.record(point.closed, point.gaussian.mean, cfg);
        match &point.fock {
            Ok(run) => {
                ok &= mean_fc.record(run.signal.mean, point.closed, cfg);
                ok &= mean_fg.record(run.signal.mean, point.gaussian.mean, cfg);
                ok &= var_fg.record(run.signal.variance, point.gaussian.variance, cfg);
            }
            Err(e) => {
                ok = false;
                failures.push(format!("point {k} {cfg:?}: fock oracle: {e}"));
            }
        }
        match point.vis {
            (Ok(a), Ok(b)) => ok &= vis.record(a, b, cfg),
            (Err(Error::UndefinedVisibility), Err(Error::UndefinedVisibility)) => {
                skipped.push((k, "undefined visibility (zero gain)".to_string()));
            }
            (a, b) => {
                ok = false;
                failures.push(format!(
                    "point {k} {cfg:?}: visibility routes disagree: {a:?} vs {b:?}"
                ));
            }
        }
        if !ok && point.fock.is_ok() {
            failures.push(format!("point {k} {cfg:?}: tolerance breach"));
        }
    }

    Ok(ValidationReport {
        seed,
        points,
        checks: vec![mean_cg, mean_fc, mean_fg, var_fg, vis],
        skipped,
        failures,
    })
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "validation: seed {} points {}", self.seed, self.points)?;
        for c in &self.checks {
            writeln!(
                f,
                "  [{}] {:<40} n={:<5} worst rel {:.3e} (tol rel {:.0e} / abs {:.0e})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.compared,
                c.worst_relative,
                c.rel_tol,
                c.abs_tol
            )?;
        }
        for (k, why) in &self.skipped {
            writeln!(f, "  skipped point {k}: {why}")?;
        }
        for line in &self.failures {
            writeln!(f, "  {line}")?;
        }
        write!(f, "result: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}
