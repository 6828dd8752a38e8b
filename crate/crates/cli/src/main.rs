//! Command-line front end for model reduction by covariance and Markov interpolation.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use covinterp::error::{Category, Error, Result};
use covinterp::estimate::{default_burn_in, markov_from_impulse, run_filter, sample_covariance, toeplitz_psd, white_noise, SignalSeries};
use covinterp::filter::{InputToStateFilter, Layout};
use covinterp::format::{self, FilterSpec};
use covinterp::interp::{project_sigma, solve_with, structure_fit, InterpolationData, SolveOptions};
use covinterp::realize::{realize_model, Domain, StateSpaceModel};
use covinterp::reduction::{
    balanced_truncation, bilinear_discretize, freq_response, frequency_csv, hankel_singular_values, reduce, GridSpec, ReduceOptions,
};

#[derive(Parser)]
#[command(name = "covinterp", version, about = "Model reduction by Markov and covariance interpolation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a stable model to degree k with an input-to-state filter of k + 1 states.
    Reduce(ReduceArgs),
    /// Map a continuous model to discrete time with the bilinear transform.
    Discretize(DiscretizeArgs),
    /// Tabulate magnitude and phase on a frequency grid.
    Freqresp(FreqArgs),
    /// Balanced truncation of a stable model.
    Baltrunc(BaltruncArgs),
    /// Estimate the state covariance of a filter driven by a signal.
    Estimate(EstimateArgs),
}

#[derive(Args)]
struct ReduceArgs {
    /// Model file, or a directory with A.mtx, B.mtx, C.mtx [, D.mtx].
    #[arg(long)]
    model: PathBuf,
    /// Filter spec (e.g. `circle:0.95:even`) or a filter file.
    #[arg(long)]
    filter: String,
    /// Degree of the reduced model; the filter gets k + 1 states.
    #[arg(long)]
    degree: Option<usize>,
    /// Sample period T.
    #[arg(long)]
    period: Option<f64>,
    /// Frequency grid `lo:hi:npts:log|lin` in rad/s.
    #[arg(long, default_value_t = GridSpec::default())]
    grid: GridSpec,
    /// Reject data that fail the state-covariance structure test.
    #[arg(long)]
    strict_sigma: bool,
    /// Scale the reduced model by the square root of the input variance.
    #[arg(long)]
    apply_variance: bool,
    /// Add stage timings to the report.
    #[arg(long)]
    timings: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DiscretizeArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    period: f64,
    /// Output directory; the model is printed when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FreqArgs {
    #[arg(long)]
    model: PathBuf,
    /// Sample period, required for discrete models.
    #[arg(long)]
    period: Option<f64>,
    #[arg(long, default_value_t = GridSpec::default())]
    grid: GridSpec,
    /// Output directory; the table is printed when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BaltruncArgs {
    #[arg(long)]
    model: PathBuf,
    /// Number of states to keep.
    #[arg(long)]
    degree: usize,
    /// Sample period, required for continuous models.
    #[arg(long)]
    period: Option<f64>,
    /// Output directory; the model is printed when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    filter: String,
    /// Filter order is degree + 1 when the filter spec leaves it open.
    #[arg(long)]
    degree: Option<usize>,
    /// Signal file; white noise is generated when omitted.
    #[arg(long)]
    signal: Option<PathBuf>,
    /// Signal files hold `re im` per line.
    #[arg(long)]
    two_column: bool,
    /// Length of the generated white noise.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    period: f64,
    /// Samples discarded before averaging (default min(1000, N/10)).
    #[arg(long)]
    burn_in: Option<usize>,
    /// Impulse-response file (same layout as signals); enables solving.
    #[arg(long)]
    markov: Option<PathBuf>,
    #[arg(long)]
    strict_sigma: bool,
    #[arg(long)]
    out: PathBuf,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", dir.join(name).display()));
    fs::create_dir_all(dir).map_err(io)?;
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(contents.as_bytes()).map_err(io)?;
    file.sync_all().map_err(io)?;
    drop(file);
    fs::rename(&tmp, dir.join(name)).map_err(io)
}

fn emit(out: Option<&Path>, name: &str, contents: &str) -> Result<()> {
    match out {
        Some(dir) => write_atomic(dir, name, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn load_filter_spec(arg: &str) -> Result<FilterSpec> {
    let path = Path::new(arg);
    if path.is_file() {
        FilterSpec::parse_file(&read_text(path)?)
    } else {
        arg.parse()
    }
}

/// Resolves the filter order from `--degree` and the spec; they must agree.
fn build_filter(spec: &FilterSpec, degree: Option<usize>, period: Option<f64>) -> Result<InputToStateFilter> {
    let wanted = degree.map(|k| k + 1);
    if let (Some(n), Some(w)) = (spec.order(), wanted) {
        if n != w {
            return Err(Error::InvalidArgument(format!(
                "filter has {n} states but degree {} needs {w}",
                w - 1
            )));
        }
    }
    spec.build(wanted, period)
}

fn discrete_for(model: &StateSpaceModel, period: Option<f64>) -> Result<StateSpaceModel> {
    match model.domain() {
        Domain::Discrete => Ok(model.clone()),
        Domain::Continuous => {
            let t = period.ok_or_else(|| Error::InvalidArgument("a continuous model needs --period".into()))?;
            bilinear_discretize(model, t)
        }
    }
}

fn run_reduce(args: &ReduceArgs) -> Result<()> {
    let model = format::load_model(&args.model)?;
    let spec = load_filter_spec(&args.filter)?;
    let filter = build_filter(&spec, args.degree, args.period)?;
    let descriptor = match spec.order() {
        Some(_) => spec.to_string(),
        None => format!("{spec} (n={})", filter.n()),
    };
    let opts = ReduceOptions {
        period: args.period,
        strict_sigma: args.strict_sigma,
        apply_variance: args.apply_variance,
        grid: args.grid,
        timings: args.timings,
    };
    let result = reduce(&model, &filter, &descriptor, &opts)?;
    let out = &args.out;
    write_atomic(out, "reduced.rtf", &format::write_rational(&result.rational))?;
    write_atomic(out, "reduced.sss", &format::write_model(&result.state_space))?;
    if let (Some(orig), Some(red)) = (&result.original_response, &result.reduced_response) {
        write_atomic(out, "original_freq.csv", &frequency_csv(orig))?;
        write_atomic(out, "reduced_freq.csv", &frequency_csv(red))?;
    }
    let report = result.report.to_string();
    write_atomic(out, "report.txt", &report)?;
    print!("{report}");
    Ok(())
}

fn run_discretize(args: &DiscretizeArgs) -> Result<()> {
    let model = format::load_model(&args.model)?;
    let discrete = bilinear_discretize(&model, args.period)?;
    emit(args.out.as_deref(), "discrete.sss", &format::write_model(&discrete))
}

fn run_freqresp(args: &FreqArgs) -> Result<()> {
    let model = format::load_model(&args.model)?;
    let points = freq_response(&model, &args.grid, args.period)?;
    emit(args.out.as_deref(), "freq.csv", &frequency_csv(&points))
}

fn run_baltrunc(args: &BaltruncArgs) -> Result<()> {
    let model = discrete_for(&format::load_model(&args.model)?, args.period)?;
    let reduced = balanced_truncation(&model, args.degree)?;
    if let Some(dir) = &args.out {
        let hsv: String = hankel_singular_values(&model)?.iter().map(|s| format!("{s:e}\n")).collect();
        write_atomic(dir, "hankel.txt", &hsv)?;
    }
    emit(args.out.as_deref(), "baltrunc.sss", &format::write_model(&reduced))
}

fn run_estimate(args: &EstimateArgs) -> Result<()> {
    let spec = load_filter_spec(&args.filter)?;
    let filter = build_filter(&spec, args.degree, Some(args.period))?;
    let signal = match &args.signal {
        Some(path) => format::parse_signal(&read_text(path)?, args.two_column, args.period)?,
        None => {
            let noise = white_noise(args.samples, args.seed)?;
            SignalSeries::new(noise.samples().to_vec(), args.period)?
        }
    };
    let burn_in = args.burn_in.unwrap_or_else(|| default_burn_in(signal.len()));
    let raw = sample_covariance(&run_filter(&filter, &signal), burn_in)?;
    let (_, structure_residual) = structure_fit(&filter, &raw)?;
    if args.strict_sigma && structure_residual > covinterp::numkit::Tolerances::DEFAULT.structure {
        return Err(Error::StructureViolation {
            residual: structure_residual,
        });
    }
    let sigma = project_sigma(&filter, &raw)?;

    let mut report = String::new();
    report.push_str(&format!(
        "filter={spec}\nn={}\nsamples={}\nburn_in={burn_in}\n",
        filter.n(),
        signal.len()
    ));
    report.push_str(&format!("sigma_structure_residual={structure_residual:e}\n"));
    if args.signal.is_none() {
        let rel = (&sigma - filter.gramian()).norm() / filter.gramian().norm();
        report.push_str(&format!("seed={}\nrelative_error_vs_gramian={rel:e}\n", args.seed));
    }
    if matches!(filter.layout(), Layout::Caratheodory { .. }) {
        let row: Vec<_> = sigma.row(0).iter().copied().collect();
        report.push_str(&format!("toeplitz_min_eigenvalue={:e}\n", toeplitz_psd(&row)?));
    }
    write_atomic(&args.out, "sigma.txt", &format::write_matrix(&sigma))?;

    if let Some(path) = &args.markov {
        let h = format::parse_signal(&read_text(path)?, args.two_column, args.period)?;
        let est = markov_from_impulse(&filter, h.samples())?;
        let data = InterpolationData::new(sigma, est.markov)?;
        write_atomic(&args.out, "data.txt", &format::write_data(&data))?;
        let opts = SolveOptions {
            strict_sigma: args.strict_sigma,
            ..SolveOptions::default()
        };
        let solution = solve_with(&filter, &data, &opts)?;
        let (rational, state_space) = realize_model(&filter, &solution)?;
        write_atomic(&args.out, "model.rtf", &format::write_rational(&rational))?;
        write_atomic(&args.out, "model.sss", &format::write_model(&state_space))?;
        report.push_str(&format!(
            "markov_truncation_bound={:e}\nlambda={:e}\nmultiplicity={}\n",
            est.truncation_bound, solution.lambda, solution.multiplicity
        ));
    }
    write_atomic(&args.out, "estimate_report.txt", &report)?;
    print!("{report}");
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Reduce(a) => run_reduce(a),
        Command::Discretize(a) => run_discretize(a),
        Command::Freqresp(a) => run_freqresp(a),
        Command::Baltrunc(a) => run_baltrunc(a),
        Command::Estimate(a) => run_estimate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.tag());
            ExitCode::from(match e.category() {
                Category::Validation => 2,
                Category::Numerical => 3,
            })
        }
    }
}
