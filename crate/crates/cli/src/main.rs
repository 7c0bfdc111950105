use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use su11_core::sweep::{self, Figure, SweepFile, SweepSpec, Table};
use su11_core::{closed_form, metrics, ShotNoiseConvention};

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_POINT_ERRORS: u8 = 3;

/// SU(1,1) interferometer simulator: sweeps, figure data, sensitivity and
/// cross-validation.
#[derive(Parser, Debug)]
#[command(name = "su11", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep one parameter and write a CSV table.
    Sweep(SweepArgs),
    /// Regenerate the data behind one of the preset figures.
    Figure(FigureArgs),
    /// Optimal working point and phase sensitivity.
    Sensitivity(PointArgs),
    /// Fringe visibility from the closed form and the Gaussian engine.
    Visibility(PointArgs),
    /// Cross-check the three computation routes on a random grid.
    Validate(ValidateArgs),
}

/// Flags named after the configuration file keys; each overrides the file.
#[derive(Args, Debug, Default)]
struct ParamArgs {
    /// Flat TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Gain of the first amplifier.
    #[arg(long)]
    g1: Option<f64>,
    /// Gain of the second amplifier.
    #[arg(long)]
    g2: Option<f64>,
    /// Phase between the amplifiers, radians.
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Signal power transmission t_s².
    #[arg(long)]
    ts2: Option<f64>,
    /// Idler power transmission t_i².
    #[arg(long)]
    ti2: Option<f64>,
    /// Mean photon number of the idler seed.
    #[arg(long = "n_i")]
    n_i: Option<f64>,
    /// after_opa1, after_loss or pairs.
    #[arg(long = "snl_convention")]
    snl_convention: Option<String>,
}

impl ParamArgs {
    fn layered(&self, extra: SweepFile) -> Result<SweepFile> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                SweepFile::parse(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => SweepFile::default(),
        };
        let flags = SweepFile {
            g1: self.g1,
            g2: self.g2,
            theta: self.theta,
            ts2: self.ts2,
            ti2: self.ti2,
            n_i: self.n_i,
            snl_convention: self.snl_convention.clone(),
            ..extra
        };
        Ok(file.overlay(flags))
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// t_s2, t_i2, t_both2, theta, n_i, G1 or G2.
    #[arg(long)]
    axis: Option<String>,
    /// First axis value.
    #[arg(long, allow_negative_numbers = true)]
    lo: Option<f64>,
    /// Last axis value.
    #[arg(long, allow_negative_numbers = true)]
    hi: Option<f64>,
    /// Number of axis points, 2 to 1000000.
    #[arg(long)]
    steps: Option<usize>,
    /// Initial signal power transmission multiplied by a swept t_s2/t_both2.
    #[arg(long = "base_ts2")]
    base_ts2: Option<f64>,
    /// Initial idler power transmission multiplied by a swept t_i2/t_both2.
    #[arg(long = "base_ti2")]
    base_ti2: Option<f64>,
    /// Comma-separated: mean, visibility, dtheta2, db_vs_shotnoise,
    /// shot_noise, ideal_db_vs_shotnoise.
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<String>>,
    /// Read transmission axes as total rather than extra transmission.
    #[arg(long = "axis-total")]
    axis_total: bool,
    /// CSV destination; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write a JSON mirror here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Print the merged configuration and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// fig2a, fig2b, fig3a, fig3b, fig4a or fig4b.
    figure: String,
    /// Directory receiving <figure>.csv and <figure>.gp; stdout CSV when absent.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Read the transmission axis as total rather than extra transmission.
    #[arg(long = "axis-total")]
    axis_total: bool,
    /// Shot-noise convention for the sensitivity figures.
    #[arg(long = "snl_convention", default_value = "pairs")]
    snl_convention: String,
    /// Also write <figure>.json into the output directory.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct PointArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Seed of the random configuration grid.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of random configurations, at most 10000.
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Replace the first point by the zero-gain singular configuration.
    #[arg(long)]
    force_singular: bool,
    /// Emit the report as JSON.
    #[arg(long)]
    json: bool,
}

/// Failure categories that map onto distinct exit codes.
#[derive(Debug)]
enum Outcome {
    Ok,
    PointErrors(usize),
    ValidationFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::PointErrors(n)) => {
            eprintln!("warning: {n} row(s) carry per-point errors");
            ExitCode::from(EXIT_POINT_ERRORS)
        }
        Ok(Outcome::ValidationFailed) => ExitCode::from(EXIT_VALIDATION),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SU11_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("SU11_THREADS={raw:?} is not a thread count"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Figure(args) => cmd_figure(args),
        Command::Sensitivity(args) => cmd_sensitivity(args),
        Command::Visibility(args) => cmd_visibility(args),
        Command::Validate(args) => cmd_validate(args),
    }
}

fn write_table(table: &Table, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let file = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            table.write_csv(io::BufWriter::new(file))?;
        }
        None => table.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn write_json(value: &serde_json::Value, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_sweep(args: SweepArgs) -> Result<Outcome> {
    let file = args.params.layered(SweepFile {
        axis: args.axis,
        lo: args.lo,
        hi: args.hi,
        steps: args.steps,
        base_ts2: args.base_ts2,
        base_ti2: args.base_ti2,
        metrics: args.metrics,
        axis_total: args.axis_total.then_some(true),
        ..SweepFile::default()
    })?;
    let spec = SweepSpec::from_file(&file)?;
    if args.print_config {
        print!("{}", spec.to_file().to_text()?);
        return Ok(Outcome::Ok);
    }
    let rows = sweep::run_sweep(&spec)?;
    let table = sweep::sweep_table(&spec, &rows);
    write_table(&table, args.output.as_deref())?;
    if let Some(path) = &args.json {
        write_json(&table.to_json(), path)?;
    }
    Ok(match table.error_rows() {
        0 => Outcome::Ok,
        n => Outcome::PointErrors(n),
    })
}

fn cmd_figure(args: FigureArgs) -> Result<Outcome> {
    let fig: Figure = args.figure.parse()?;
    let snl: ShotNoiseConvention = args.snl_convention.parse()?;
    let data = sweep::figure(fig, args.axis_total, snl)?;
    let table = data.table();
    match &args.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let stem = fig.as_str();
            write_table(&table, Some(&dir.join(format!("{stem}.csv"))))?;
            fs::write(dir.join(format!("{stem}.gp")), data.plot_script())?;
            if args.json {
                write_json(&table.to_json(), &dir.join(format!("{stem}.json")))?;
            }
        }
        None => write_table(&table, None)?,
    }
    Ok(match table.error_rows() {
        0 => Outcome::Ok,
        n => Outcome::PointErrors(n),
    })
}

fn cmd_sensitivity(args: PointArgs) -> Result<Outcome> {
    let file = args.params.layered(SweepFile::default())?;
    let cfg = file.interferometer();
    let conventions: Vec<ShotNoiseConvention> = match &file.snl_convention {
        Some(_) => vec![file.snl_convention()?],
        None => ShotNoiseConvention::ALL.to_vec(),
    };
    let reports = conventions
        .iter()
        .map(|&c| metrics::optimal_sensitivity(&cfg, c))
        .collect::<su11_core::Result<Vec<_>>>()?;
    let mut out = io::stdout().lock();
    if args.json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(
                &serde_json::json!({ "config": cfg, "reports": reports })
            )?
        )?;
        return Ok(Outcome::Ok);
    }
    let first = &reports[0];
    writeln!(out, "theta_opt  {:.10}", first.theta_opt)?;
    writeln!(out, "dtheta2    {:.10e}", first.dtheta2)?;
    if cfg.g1 == cfg.g2 && cfg.t_s == 1.0 && cfg.t_i == 1.0 {
        if let Ok(ideal) = closed_form::ideal_sensitivity(cfg.g1, cfg.n_i) {
            writeln!(out, "ideal      {:.10e}", ideal.value())?;
        }
    }
    for r in &reports {
        writeln!(
            out,
            "{:<11} shot_noise {:.10e}  {:+.4} dB below shot noise",
            r.snl_convention.as_str(),
            r.dtheta2_shotnoise,
            r.db_vs_shotnoise
        )?;
    }
    Ok(Outcome::Ok)
}

fn cmd_visibility(args: PointArgs) -> Result<Outcome> {
    let file = args.params.layered(SweepFile::default())?;
    let cfg = file.interferometer();
    cfg.validate()?;
    let closed = closed_form::visibility(&cfg)?;
    let numeric = metrics::visibility_numeric(&cfg)?;
    let mut out = io::stdout().lock();
    if args.json {
        let value =
            serde_json::json!({ "config": cfg, "closed_form": closed, "gaussian": numeric });
        writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
    } else {
        writeln!(out, "closed_form {closed:.12}")?;
        writeln!(out, "gaussian    {numeric:.12}")?;
    }
    Ok(Outcome::Ok)
}

fn cmd_validate(args: ValidateArgs) -> Result<Outcome> {
    let report = sweep::validate(args.seed, args.points, args.force_singular)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("{report}");
    }
    Ok(if report.passed() {
        Outcome::Ok
    } else {
        Outcome::ValidationFailed
    })
}
