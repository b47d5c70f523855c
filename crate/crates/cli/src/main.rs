use clap::{Args, Parser, Subcommand};
use gauduchon_core::jets::ChartPoint;
use gauduchon_core::metric_dsl::{compile, parse_metric_dsl};
use gauduchon_core::models::{build_model, lambda_star, ModelSpec, MODEL_NAMES};
use gauduchon_core::report::{
    curvature_dashboard, emit_report, emit_table, parse_range, run_verification_suite, sweep, t_grid, Format, Quantity,
    SweepConfig, VerifyConfig,
};
use gauduchon_core::{Error, MetricField, C64};
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gauduchon", version, about = "Gauduchon-connection curvature of Hermitian metrics")]
struct Cli {
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// Built-in model: flat, fubini_study, hopf, hopf_lambda, iwasawa, random_poly.
    #[arg(long)]
    model: Option<String>,
    /// Metric written in the text format (overrides --model).
    #[arg(long)]
    metric_file: Option<std::path::PathBuf>,
    /// Complex dimension of the model.
    #[arg(long)]
    n: Option<usize>,
    /// Parameter of hopf_lambda.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Seed of random_poly.
    #[arg(long, default_value_t = 1)]
    model_seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature dashboard at one point.
    Curvature {
        #[command(flatten)]
        model: ModelArgs,
        /// Coordinates, e.g. `0.5,1+0.2i,-0.3i`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Connection parameter: 1 Chern, 0 Lichnerowicz, -1 Bismut
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// Jet order (2, or 3 for the d(Ric1) check).
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Tabulate a quantity along a range of t.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// ric1_norm, scal, scal_tilde, hsc_min, hsc_max or torsion_norm.
        #[arg(long)]
        quantity: String,
        /// `a:b:step`, inclusive.
        #[arg(long, allow_hyphen_values = true)]
        t_range: String,
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Add one column per sample point.
        #[arg(long)]
        breakdown: bool,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Run the identity checks.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tolerance of the exact identities; related bounds scale with it.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, default_value_t = 100_000)]
        mc_samples: usize,
        /// Omit timings so repeated runs are byte-identical.
        #[arg(long)]
        stable_output: bool,
        #[arg(long, default_value = "text")]
        format: String,
        /// Replace the closed form with a broken one; the run must fail.
        #[arg(long, hide = true)]
        corrupt_closed_form: bool,
    },
    /// Ricci-flat parameter of the Hopf family.
    LambdaStar {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long)]
        n: usize,
    },
}

fn parse_complex(s: &str) -> Result<C64, Error> {
    let s = s.trim().replace(' ', "");
    let bad = || Error::ConfigError(format!("'{s}' is not a complex number"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) {
        // split at the last sign that is not an exponent sign
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            x => x,
        };
        Ok(C64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?))
    } else {
        Ok(C64::new(s.parse().map_err(|_| bad())?, 0.0))
    }
}

fn model_spec(m: &ModelArgs, default_n: Option<usize>) -> Result<ModelSpec, Error> {
    let name = m.model.as_deref().ok_or_else(|| Error::ConfigError("need --model or --metric-file".into()))?;
    if !MODEL_NAMES.contains(&name) {
        return Err(Error::ConfigError(format!("unknown model '{name}' (expected one of: {})", MODEL_NAMES.join(", "))));
    }
    let n = m.n.or(default_n).unwrap_or(if name == "iwasawa" { 3 } else { 2 });
    let mut spec = ModelSpec::new(name, n);
    spec.lambda = m.lambda.unwrap_or(0.0);
    spec.seed = m.model_seed;
    Ok(spec)
}

fn metric_field(m: &ModelArgs, default_n: Option<usize>) -> Result<(MetricField, Option<ModelSpec>), Error> {
    if let Some(path) = &m.metric_file {
        let src = std::fs::read_to_string(path).map_err(|e| Error::ConfigError(format!("{}: {e}", path.display())))?;
        return Ok((compile(parse_metric_dsl(&src)?), None));
    }
    let spec = model_spec(m, default_n)?;
    Ok((build_model(&spec)?, Some(spec)))
}

/// Exit code 2 for usage problems, 1 for mathematical failures.
fn exit_for(e: &Error) -> u8 {
    match e {
        Error::ConfigError(_)
        | Error::InvalidParameter(_)
        | Error::OutOfRange(_)
        | Error::PointOutsideChart(_)
        | Error::SyntaxError { .. }
        | Error::DimensionError(_)
        | Error::DimensionMismatch { .. }
        | Error::NonHermitianEntry(_)
        | Error::IoError(_) => 2,
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<(String, u8), Error> {
    match &cli.command {
        Command::Curvature { model, point, t, order, format } => {
            let format: Format = format.parse()?;
            let z = point.split(',').map(parse_complex).collect::<Result<Vec<_>, _>>()?;
            let (field, _) = metric_field(model, Some(z.len()))?;
            let p = ChartPoint::new(z);
            field.check_point(&p)?;
            let d = curvature_dashboard(&field, &p, *t, *order)?;
            let out = match format {
                Format::Json => serde_json::to_string_pretty(&d).map_err(|e| Error::IoError(e.to_string()))? + "\n",
                Format::Text => d.to_text(),
                Format::Csv => return Err(Error::ConfigError("curvature supports json and text".into())),
            };
            Ok((out, 0))
        }
        Command::Sweep { model, quantity, t_range, points, seed, breakdown, format } => {
            let format: Format = format.parse()?;
            let quantity: Quantity = quantity.parse()?;
            let (a, b, step) = parse_range(t_range)?;
            let grid = t_grid(a, b, step)?;
            if model.metric_file.is_some() {
                return Err(Error::ConfigError("sweep works on built-in models only".into()));
            }
            let spec = model_spec(model, None)?;
            let table = sweep(&SweepConfig { model: spec, quantity, grid, points: *points, seed: *seed, breakdown: *breakdown })?;
            Ok((emit_table(&table, format)?, 0))
        }
        Command::Verify { suite, seed, tol, points, mc_samples, stable_output, format, corrupt_closed_form } => {
            let format: Format = format.parse()?;
            let cfg = VerifyConfig {
                suite: suite.clone(),
                seed: *seed,
                tol: *tol,
                points: *points,
                mc_samples: *mc_samples,
                stable_output: *stable_output,
                corrupt_closed_form: *corrupt_closed_form,
            };
            let report = run_verification_suite(&cfg)?;
            Ok((emit_report(&report, format)?, report.exit_code() as u8))
        }
        Command::LambdaStar { t, n } => {
            Ok((format!("{}\n", lambda_star(*t, *n)?), 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok((text, code)) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &text),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
