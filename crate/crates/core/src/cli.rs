//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for configuration errors (bad flags, values or
//! output directory), 1 for failures while running.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytic::{
    analytic_target_risk, estimator_skewness, estimator_variance, expected_moment,
    moment_convergence_check, window_growth,
};
use crate::experiments::{
    run_model_selection, run_risk_distribution, run_weight_histogram, ExperimentConfig, SplitBasis,
    DEFAULT_SEED,
};
use crate::output::{write_outputs, OutputFormats, RunMetadata, RunResults};
use crate::risk::{RegularizedLinearClassifier, THETA_BASE};
use crate::selection::{LambdaGrid, SelectionMethod};
use crate::Error;

#[derive(Debug, Parser)]
#[command(
    name = "iwskew",
    version,
    about = "Sampling distribution of the importance-weighted risk estimator under covariate shift"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Histogram of exact importance weights of source draws.
    Weights(RunArgs),
    /// Sampling distribution of the weighted risk at the fixed classifier.
    RiskDist(RunArgs),
    /// Regularization selection with the body/tail split.
    ModelSelect(RunArgs),
    /// Print analytic target risk, variance and skewness (or divergence).
    Oracle(RunArgs),
    /// Run weights, risk-dist and model-select.
    All(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SelectionArg {
    ClosedForm,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SplitArg {
    FixedClassifier,
    MinimizedRisk,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Master seed of the random streams.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Repetitions per sample size.
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32,64")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.75)]
    sigma_source: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_target: f64,
    /// Fixed classifier parameter [default: 1/(2√π)].
    #[arg(long)]
    theta: Option<f64>,
    /// Lambda search grid as MIN:MAX:STEP [default: -5:5:0.01].
    #[arg(long, value_name = "MIN:MAX:STEP")]
    lambda_grid: Option<LambdaGrid>,
    #[arg(long, value_enum, default_value_t = SelectionArg::Grid)]
    selection: SelectionArg,
    /// Risk used to split repetitions into body and tail.
    #[arg(long, value_enum, default_value_t = SplitArg::FixedClassifier)]
    split_basis: SplitArg,
    /// Histogram bins.
    #[arg(long, default_value_t = 50)]
    bins: usize,
    /// Source draws for the weight histogram.
    #[arg(long, default_value_t = 10_000)]
    weight_draws: usize,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also write SVG plots.
    #[arg(long)]
    svg: bool,
    /// Worker threads [default: all cores].
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            master_seed: self.seed,
            repetitions: self.reps,
            sample_sizes: self.sizes.clone(),
            sigma_source: self.sigma_source,
            sigma_target: self.sigma_target,
            theta_fixed: self.theta.unwrap_or(THETA_BASE),
            lambda_grid: self.lambda_grid.unwrap_or_default(),
            selection_method: match self.selection {
                SelectionArg::ClosedForm => SelectionMethod::ClosedForm,
                SelectionArg::Grid => SelectionMethod::Grid,
            },
            split_basis: match self.split_basis {
                SplitArg::FixedClassifier => SplitBasis::FixedClassifier,
                SplitArg::MinimizedRisk => SplitBasis::MinimizedRisk,
            },
            bins: self.bins,
            weight_sample_size: self.weight_draws,
        }
    }
}

fn flag_for(field: &str) -> &'static str {
    match field {
        "repetitions" => "--reps",
        "sample_sizes" => "--sizes",
        "sigma_source" => "--sigma-source",
        "sigma_target" => "--sigma-target",
        "theta_fixed" => "--theta",
        "bins" => "--bins",
        "weight_sample_size" => "--weight-draws",
        _ => "configuration",
    }
}

fn config_failure(flag: &str, msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: invalid value for `{flag}`: {msg}");
    2
}

fn check_output_dir(dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let probe = dir.join(".iwskew-write-probe");
    fs::write(&probe, b"")?;
    fs::remove_file(probe)
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (name, args) = match &cli.command {
        Command::Weights(a) => ("weights", a),
        Command::RiskDist(a) => ("risk-dist", a),
        Command::ModelSelect(a) => ("model-select", a),
        Command::Oracle(a) => ("oracle", a),
        Command::All(a) => ("all", a),
    };
    let config = args.config();
    if let Err(Error::Config { field, reason }) = config.validate() {
        return config_failure(flag_for(field), reason);
    }
    if let Err(e) = config.problem() {
        return config_failure("--sigma-source/--sigma-target", e);
    }
    if name == "oracle" {
        return match print_oracles(&config) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        };
    }
    if let Err(e) = check_output_dir(&args.out) {
        return config_failure("--out", format!("{}: {e}", args.out.display()));
    }
    let pool = match args.threads {
        Some(0) => return config_failure("--threads", "must be >= 1"),
        Some(k) => rayon::ThreadPoolBuilder::new().num_threads(k).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return 1;
        }
    };
    let formats = OutputFormats { svg: args.svg };
    match pool.install(|| run_experiments(name, &config, &args.out, formats)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run_experiments(
    name: &str,
    config: &ExperimentConfig,
    out: &Path,
    formats: OutputFormats,
) -> crate::Result<()> {
    let want = |sub: &str| name == "all" || name == sub;
    let weights = if want("weights") {
        let w = run_weight_histogram(config)?;
        println!(
            "weights: {} draws, min {:.6}, mean {:.6}, skewness g1 {}",
            w.weights.len(),
            w.weights.iter().copied().fold(f64::INFINITY, f64::min),
            w.summary.mean,
            w.summary
                .skewness_g1
                .map_or("NA".to_string(), |g| format!("{g:.4}")),
        );
        Some(w)
    } else {
        None
    };
    let risk = if want("risk-dist") {
        let r = run_risk_distribution(config)?;
        for d in &r {
            println!(
                "risk-dist n={:<3} mean {:.6} (oracle {:.6}) variance {:.6} g1 {}",
                d.n,
                d.summary.mean,
                d.oracle.mean,
                d.summary.variance,
                d.summary
                    .skewness_g1
                    .map_or("NA".to_string(), |g| format!("{g:.4}")),
            );
        }
        Some(r)
    } else {
        None
    };
    let selection = if want("model-select") {
        let m = run_model_selection(config)?;
        for s in &m {
            println!(
                "model-select n={:<3} body {:.3} of {}, mean lambda body {} tail {}",
                s.n,
                s.body_fraction().unwrap_or(f64::NAN),
                s.body_count() + s.tail_count(),
                s.body_lambda
                    .map_or("NA".to_string(), |l| format!("{:.4}", l.mean)),
                s.tail_lambda
                    .map_or("NA".to_string(), |l| format!("{:.4}", l.mean)),
            );
        }
        Some(m)
    } else {
        None
    };
    let results = RunResults {
        weights: weights.as_ref(),
        risk_distribution: risk.as_deref(),
        model_selection: selection.as_deref(),
    };
    let manifest = write_outputs(&results, &RunMetadata::new(name, config), out, formats)?;
    println!("wrote {} files to {}", manifest.len(), out.display());
    Ok(())
}

fn print_oracles(config: &ExperimentConfig) -> crate::Result<()> {
    let problem = config.problem()?;
    let classifier = RegularizedLinearClassifier::with_theta(config.theta_fixed);
    let risk = expected_moment(1, &classifier, &problem)?;
    println!(
        "sigma_source {} sigma_target {} theta {}",
        config.sigma_source, config.sigma_target, config.theta_fixed
    );
    println!("target_risk {}", risk.value);
    if config.sigma_target == 1.0 {
        println!(
            "target_risk_closed_form {}",
            analytic_target_risk(config.theta_fixed)
        );
    }
    for k in 1..=3 {
        let finite = moment_convergence_check(k, &problem)?;
        if finite {
            let m = expected_moment(k, &classifier, &problem)?;
            println!(
                "moment_k{k} {} (error estimate {:.1e})",
                m.value, m.quadrature_error_estimate
            );
        } else {
            let g = window_growth(k, &classifier, &problem)?;
            println!(
                "moment_k{k} divergent (doubling the window to ±{} grows the integral by {:.3e})",
                2.0 * g.half_width,
                g.relative_change()
            );
        }
    }
    for &n in &config.sample_sizes {
        let vw = estimator_variance(&classifier, n, true, &problem)?;
        let vt = estimator_variance(&classifier, n, false, &problem)?;
        let sw = estimator_skewness(&classifier, n, true, &problem);
        let st = estimator_skewness(&classifier, n, false, &problem);
        let show = |r: &crate::Result<crate::analytic::MomentOracleResult>| match r {
            Ok(m) => m.get().map_or("divergent".to_string(), |v| v.to_string()),
            Err(Error::Unsupported(_)) => "undefined".to_string(),
            Err(e) => format!("error ({e})"),
        };
        println!(
            "n {n} variance_weighted {} variance_target {} skewness_weighted {} skewness_target {}",
            vw.get().map_or("divergent".to_string(), |v| v.to_string()),
            vt.get().map_or("divergent".to_string(), |v| v.to_string()),
            show(&sw),
            show(&st),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grid_and_sizes() {
        let cli = Cli::try_parse_from([
            "iwskew",
            "model-select",
            "--lambda-grid",
            "0:1:0.5",
            "--sizes",
            "2,4",
        ])
        .unwrap();
        let Command::ModelSelect(a) = cli.command else {
            panic!()
        };
        let c = a.config();
        assert_eq!(c.sample_sizes, vec![2, 4]);
        assert_eq!(c.lambda_grid.len(), 3);
        assert_eq!(c.theta_fixed, THETA_BASE);
    }

    #[test]
    fn config_errors_exit_two() {
        assert_eq!(
            run_cli([
                "iwskew",
                "model-select",
                "--lambda-grid",
                "0:1:0.5",
                "--sizes",
                "0"
            ]),
            2
        );
        assert_eq!(run_cli(["iwskew", "risk-dist", "--bogus"]), 2);
        assert_eq!(run_cli(["iwskew", "risk-dist", "--reps", "ten"]), 2);
        assert_eq!(
            run_cli(["iwskew", "risk-dist", "--lambda-grid", "1:0:1"]),
            2
        );
    }

    #[test]
    fn flag_names() {
        assert_eq!(flag_for("sample_sizes"), "--sizes");
        assert_eq!(flag_for("repetitions"), "--reps");
    }
}
