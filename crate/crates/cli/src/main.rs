//! `qcurve` command-line tool.

mod data;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qcurve::asymptotics::{md_asymptotic_variance, KernelContext};
use qcurve::curves::{curve_grid, curve_index_checked, fmt17, uniform_grid, CurveSamples};
use qcurve::empirical_qf::{EmpiricalQf, PlottingPositionQf};
use qcurve::gof::{ad_test, DEFAULT_BOOTSTRAP_REPS};
use qcurve::md_estimation::md_fit;
use qcurve::quadrature::QuadratureSpec;
use qcurve::shape_estimators::scale_for_shape;
use qcurve::simulation::{render_tables, run_simulation, Estimator, SimulationConfig, TableFormat};
use qcurve::weibull::closed_curve;
use qcurve::{CurveKind, MdConfig, Method, SortedSample, WeibullParams};

use crate::data::DataFile;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(#[from] qcurve::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn class(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::Numeric(e) => e.class(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "qcurve", version, about = "Quantile concentration curves and Weibull shape estimation")]
struct Cli {
    /// Master seed for random streams.
    #[arg(long, global = true, default_value_t = 20_240_101)]
    seed: u64,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Machine-readable output format.
    #[arg(long, global = true, value_enum)]
    format: Option<OutFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Qz,
    Qd,
}

impl From<Kind> for CurveKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Qz => CurveKind::QZ,
            Kind::Qd => CurveKind::QD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindSel {
    Qz,
    Qd,
    Both,
}

impl KindSel {
    fn kinds(self) -> Vec<CurveKind> {
        match self {
            KindSel::Qz => vec![CurveKind::QZ],
            KindSel::Qd => vec![CurveKind::QD],
            KindSel::Both => CurveKind::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableArg {
    Csv,
    Markdown,
}

fn parse_estimator(s: &str) -> Result<Estimator, String> {
    s.parse::<Estimator>().map_err(|_| {
        format!("unknown estimator '{s}'; valid identifiers: {}", Estimator::valid_ids())
    })
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|_| {
        let ids: Vec<&str> = Method::ALL.iter().map(|m| m.as_str()).collect();
        format!("unknown method '{s}'; valid identifiers: {}", ids.join(", "))
    })
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Data file: one value per line, or a delimited file with a header.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Column name or 0-based index.
    #[arg(long, requires = "input")]
    column: Option<String>,
}

impl InputArgs {
    fn sample(&self) -> CliResult<Option<SortedSample>> {
        match &self.input {
            None => Ok(None),
            Some(p) => {
                let d = DataFile::read(p, self.column.as_deref())?;
                Ok(Some(SortedSample::new(d.values)?))
            }
        }
    }

    fn require(&self) -> CliResult<SortedSample> {
        self.sample()?
            .ok_or_else(|| CliError::Usage("--input is required".into()))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the Weibull shape from data.
    Fit {
        #[command(flatten)]
        input: InputArgs,
        /// Estimator identifier.
        #[arg(long, default_value = "ml", value_parser = parse_estimator)]
        method: Estimator,
        /// Curve matched by the minimum-distance estimators.
        #[arg(long, value_enum, default_value = "qz")]
        curve: Kind,
        /// Starting estimator of the minimum-distance search.
        #[arg(long, value_parser = parse_method)]
        start: Option<Method>,
    },
    /// Tabulate a curve on an equally spaced grid.
    Curve {
        #[command(flatten)]
        input: InputArgs,
        /// Weibull shape for the closed-form curve.
        #[arg(long, conflicts_with = "input")]
        beta: Option<f64>,
        #[arg(long, value_enum, default_value = "qz")]
        kind: Kind,
        /// Number of grid intervals.
        #[arg(long, default_value_t = 100)]
        grid: usize,
        /// `hf`, `empirical`, or an estimator whose fitted shape is plugged in.
        #[arg(long, default_value = "hf")]
        estimator: String,
    },
    /// Concentration indices.
    Index {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, conflicts_with = "input")]
        beta: Option<f64>,
        #[arg(long, value_enum, default_value = "both")]
        kind: KindSel,
        /// `hf` for the nonparametric index or an estimator id for plug-in.
        #[arg(long, default_value = "hf", value_parser = parse_estimator)]
        method: Estimator,
    },
    /// Monte Carlo comparison of estimators.
    Simulate {
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,3")]
        betas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "30,100")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        /// Worker threads (defaults to available cores).
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_delimiter = ',', value_parser = parse_estimator)]
        estimators: Option<Vec<Estimator>>,
        #[arg(long, value_delimiter = ',', value_enum, default_value = "qz,qd")]
        curves: Vec<Kind>,
        /// Multiplier applied to table values.
        #[arg(long, default_value_t = 1000.0)]
        scale: f64,
        #[arg(long, value_enum, default_value = "markdown")]
        table: TableArg,
        /// Also write the rendered tables here.
        #[arg(long)]
        tables: Option<PathBuf>,
    },
    /// Asymptotic variance of the minimum-distance shape estimator.
    Asymvar {
        #[arg(long)]
        beta: f64,
        #[arg(long, value_enum, default_value = "qz")]
        curve: Kind,
    },
    /// Anderson-Darling test of the Weibull fit with bootstrap p-value.
    Gof {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = DEFAULT_BOOTSTRAP_REPS)]
        reps: usize,
    },
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable output");
    s.push('\n');
    s
}

fn opt17(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

#[derive(Debug, Serialize)]
struct FitOutput {
    method: String,
    beta_hat: f64,
    sigma_hat: f64,
    n: usize,
    iterations: usize,
    residual: f64,
    start: Option<f64>,
    curve: Option<CurveKind>,
}

fn fit_shape(
    sample: &SortedSample,
    method: Estimator,
    curve: CurveKind,
    start: Option<Method>,
) -> CliResult<qcurve::EstimateResult> {
    match method {
        Estimator::Hf => Err(CliError::Usage(
            "hf is a nonparametric curve estimator and has no shape estimate".into(),
        )),
        Estimator::Md(reference) => {
            let mut cfg = MdConfig::new(curve, reference);
            cfg.start_method = start;
            Ok(md_fit(sample, &cfg)?)
        }
        Estimator::Shape(m) => Ok(m.estimate(sample)?),
    }
}

fn cmd_fit(
    input: &InputArgs,
    method: Estimator,
    curve: Kind,
    start: Option<Method>,
    format: OutFormat,
) -> CliResult<String> {
    let sample = input.require()?;
    let r = fit_shape(&sample, method, curve.into(), start)?;
    let out = FitOutput {
        sigma_hat: scale_for_shape(&sample, r.beta_hat)?,
        beta_hat: r.beta_hat,
        method: r.method,
        n: sample.len(),
        iterations: r.iterations,
        residual: r.residual,
        start: r.start,
        curve: matches!(method, Estimator::Md(_)).then(|| curve.into()),
    };
    Ok(match format {
        OutFormat::Json => to_json(&out),
        OutFormat::Csv => format!(
            "method,beta_hat,sigma_hat,n,iterations,residual,start,curve\n{},{},{},{},{},{},{},{}\n",
            out.method,
            fmt17(out.beta_hat),
            fmt17(out.sigma_hat),
            out.n,
            out.iterations,
            fmt17(out.residual),
            opt17(out.start),
            out.curve.map(|c| c.as_str()).unwrap_or(""),
        ),
    })
}

fn cmd_curve(
    input: &InputArgs,
    beta: Option<f64>,
    kind: CurveKind,
    grid: usize,
    estimator: &str,
    format: OutFormat,
) -> CliResult<String> {
    if grid == 0 {
        return Err(CliError::Usage("--grid must be at least 1".into()));
    }
    let ps = uniform_grid(grid);
    let closed = |b: f64| -> CliResult<CurveSamples> {
        let points = ps
            .iter()
            .map(|&p| closed_curve(kind, b, p).map(|v| (p, v)))
            .collect::<qcurve::Result<Vec<_>>>()?;
        Ok(CurveSamples { points })
    };
    let samples = match (input.sample()?, beta) {
        (None, None) => return Err(CliError::Usage("give either --input or --beta".into())),
        (Some(_), Some(_)) => return Err(CliError::Usage("--input and --beta are exclusive".into())),
        (None, Some(b)) => closed(b)?,
        (Some(x), None) => match estimator {
            "hf" => curve_grid(&PlottingPositionQf::hf(&x), kind, &ps)?,
            "empirical" => curve_grid(&EmpiricalQf::new(&x), kind, &ps)?,
            other => {
                let e = parse_estimator(other).map_err(CliError::Usage)?;
                closed(fit_shape(&x, e, kind, None)?.beta_hat)?
            }
        },
    };
    Ok(match format {
        OutFormat::Csv => samples.to_csv(),
        OutFormat::Json => to_json(&samples),
    })
}

#[derive(Debug, Serialize)]
struct IndexEntry {
    kind: CurveKind,
    value: f64,
    beta_hat: Option<f64>,
    refined: f64,
    panels: usize,
    nodes: usize,
}

#[derive(Debug, Serialize)]
struct IndexOutput {
    method: String,
    n: Option<usize>,
    indices: Vec<IndexEntry>,
}

fn cmd_index(
    input: &InputArgs,
    beta: Option<f64>,
    kinds: &[CurveKind],
    method: Estimator,
    format: OutFormat,
) -> CliResult<String> {
    let spec = QuadratureSpec::default();
    let plug_in = |kind: CurveKind, b: f64| -> CliResult<IndexEntry> {
        let e = curve_index_checked(&WeibullParams::new(b, 1.0)?, kind, &spec)?;
        Ok(IndexEntry {
            kind,
            value: e.value,
            beta_hat: Some(b),
            refined: e.refined,
            panels: e.panels,
            nodes: e.nodes,
        })
    };
    let sample = input.sample()?;
    let (label, n) = match (&sample, beta) {
        (None, None) => return Err(CliError::Usage("give either --input or --beta".into())),
        (Some(_), Some(_)) => return Err(CliError::Usage("--input and --beta are exclusive".into())),
        (None, Some(_)) => ("closed".to_string(), None),
        (Some(x), None) => (method.as_str().to_string(), Some(x.len())),
    };
    let mut indices = Vec::new();
    for &kind in kinds {
        let entry = match (&sample, beta) {
            (None, Some(b)) => plug_in(kind, b)?,
            (Some(x), _) => match method {
                Estimator::Hf => {
                    let e = curve_index_checked(&PlottingPositionQf::hf(x), kind, &spec)?;
                    IndexEntry {
                        kind,
                        value: e.value,
                        beta_hat: None,
                        refined: e.refined,
                        panels: e.panels,
                        nodes: e.nodes,
                    }
                }
                other => plug_in(kind, fit_shape(x, other, kind, None)?.beta_hat)?,
            },
            _ => unreachable!("input combinations checked above"),
        };
        indices.push(entry);
    }
    let out = IndexOutput { method: label, n, indices };
    Ok(match format {
        OutFormat::Json => to_json(&out),
        OutFormat::Csv => {
            let mut s = String::from("kind,method,beta_hat,value,refined,panels,nodes\n");
            for e in &out.indices {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    e.kind,
                    out.method,
                    opt17(e.beta_hat),
                    fmt17(e.value),
                    fmt17(e.refined),
                    e.panels,
                    e.nodes
                );
            }
            s
        }
    })
}

#[derive(Debug, Serialize)]
struct AsymvarOutput {
    beta: f64,
    curve: CurveKind,
    sigma2: f64,
    a: f64,
    c: f64,
    panels: usize,
    nodes: usize,
    rel_change_a: f64,
    rel_change_c: f64,
}

fn cmd_asymvar(beta: f64, curve: CurveKind, format: OutFormat) -> CliResult<String> {
    let v = md_asymptotic_variance(&KernelContext::weibull(beta, 1.0, curve)?)?;
    let out = AsymvarOutput {
        beta,
        curve,
        sigma2: v.sigma2,
        a: v.a,
        c: v.c,
        panels: v.panels,
        nodes: v.nodes,
        rel_change_a: v.rel_change_a,
        rel_change_c: v.rel_change_c,
    };
    Ok(match format {
        OutFormat::Json => to_json(&out),
        OutFormat::Csv => format!(
            "beta,curve,sigma2,a,c,panels,nodes,rel_change_a,rel_change_c\n{},{},{},{},{},{},{},{},{}\n",
            fmt17(beta),
            curve,
            fmt17(v.sigma2),
            fmt17(v.a),
            fmt17(v.c),
            v.panels,
            v.nodes,
            fmt17(v.rel_change_a),
            fmt17(v.rel_change_c)
        ),
    })
}

#[derive(Debug, Serialize)]
struct GofOutput {
    statistic: f64,
    p_value: f64,
    bootstrap_reps: usize,
    n: usize,
    seed: u64,
    fitted: WeibullParams,
}

fn cmd_gof(input: &InputArgs, reps: usize, seed: u64, format: OutFormat) -> CliResult<String> {
    if reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    let sample = input.require()?;
    let r = ad_test(&sample, reps, seed)?;
    Ok(match format {
        OutFormat::Json => to_json(&GofOutput {
            statistic: r.statistic,
            p_value: r.p_value,
            bootstrap_reps: r.bootstrap_reps,
            n: sample.len(),
            seed,
            fitted: r.fitted,
        }),
        OutFormat::Csv => format!(
            "statistic,p_value,bootstrap_reps,n,seed,beta,sigma\n{},{},{},{},{},{},{}\n",
            fmt17(r.statistic),
            fmt17(r.p_value),
            r.bootstrap_reps,
            sample.len(),
            seed,
            fmt17(r.fitted.beta),
            fmt17(r.fitted.sigma)
        ),
    })
}

fn emit(path: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let out = cli.output.as_ref();
    let text = match &cli.command {
        Command::Fit {
            input,
            method,
            curve,
            start,
        } => cmd_fit(input, *method, *curve, *start, cli.format.unwrap_or(OutFormat::Json))?,
        Command::Curve {
            input,
            beta,
            kind,
            grid,
            estimator,
        } => cmd_curve(input, *beta, (*kind).into(), *grid, estimator, cli.format.unwrap_or(OutFormat::Csv))?,
        Command::Index {
            input,
            beta,
            kind,
            method,
        } => cmd_index(input, *beta, &kind.kinds(), *method, cli.format.unwrap_or(OutFormat::Json))?,
        Command::Asymvar { beta, curve } => {
            cmd_asymvar(*beta, (*curve).into(), cli.format.unwrap_or(OutFormat::Json))?
        }
        Command::Gof { input, reps } => {
            cmd_gof(input, *reps, cli.seed, cli.format.unwrap_or(OutFormat::Json))?
        }
        Command::Simulate {
            betas,
            sizes,
            reps,
            workers,
            estimators,
            curves,
            scale,
            table,
            tables,
        } => {
            let config = SimulationConfig {
                betas: betas.clone(),
                sizes: sizes.clone(),
                replications: *reps,
                estimators: estimators.clone().unwrap_or_else(|| Estimator::DECLARED.to_vec()),
                curves: curves.iter().map(|k| (*k).into()).collect(),
                master_seed: cli.seed,
                workers: workers.unwrap_or_else(|| {
                    std::thread::available_parallelism().map_or(1, |n| n.get())
                }),
                quadrature: QuadratureSpec::default(),
            };
            config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let report = run_simulation(&config)?;
            let fmt = match table {
                TableArg::Csv => TableFormat::Csv,
                TableArg::Markdown => TableFormat::Markdown,
            };
            let rendered = render_tables(&report, *scale, fmt);
            if let Some(p) = tables {
                emit(Some(p), &rendered)?;
            }
            match out {
                Some(p) => {
                    let body = match cli.format.unwrap_or(OutFormat::Json) {
                        OutFormat::Json => report.to_json() + "\n",
                        OutFormat::Csv => report.to_csv(),
                    };
                    emit(Some(p), &body)?;
                    rendered
                }
                None => rendered,
            }
        }
    };
    match (&cli.command, out) {
        // simulate wrote its report already; tables go to stdout
        (Command::Simulate { .. }, _) => emit(None, &text),
        _ => emit(out, &text),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.class());
            ExitCode::from(e.exit_code())
        }
    }
}
