//! The three repetition experiments: the weight histogram, the sampling
//! distribution of the weighted risk, and regularization selection split into
//! body and tail.
//!
//! Repetition `rep` at sample size `n` always draws from stream
//! [`stream_id`]`(n, rep)` of the master seed, so every experiment sees the
//! same dataset for the same `(n, rep)` and results do not depend on how rayon
//! schedules the work. Aggregation happens after the ordered collect.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{estimator_skewness, estimator_variance, generalized_moment};
use crate::domain::{importance_weight, CovariateShiftProblem};
use crate::risk::{empirical_risk, RegularizedLinearClassifier, THETA_BASE};
use crate::sampling::{draw_dataset, DomainTag, LabeledDataset, RngSeedSpec};
use crate::selection::{select_lambda, LambdaGrid, SelectionMethod};
use crate::stats::{
    body_tail_split, histogram, location_summary, sample_moments, BodyTailSplit, HistogramData,
    LocationSummary, MomentSummary,
};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 2018;

/// Stream used by the weight-histogram draw. Repetition streams have `n ≥ 1`
/// in their upper half and never collide with it.
pub const WEIGHT_STREAM: u64 = 0;

/// Stream id of repetition `rep` at sample size `n`.
pub fn stream_id(n: usize, rep: usize) -> u64 {
    ((n as u64) << 32) | (rep as u64 & 0xffff_ffff)
}

/// Which per-repetition risk decides body versus tail in model selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitBasis {
    /// `R̂_W` of the fixed classifier `θ = theta_fixed`, the quantity whose
    /// sampling distribution is skewed.
    FixedClassifier,
    /// `R̂_W(θ_λ̂)`, the minimized validation risk.
    MinimizedRisk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub repetitions: usize,
    pub sample_sizes: Vec<usize>,
    pub sigma_source: f64,
    pub sigma_target: f64,
    pub theta_fixed: f64,
    pub lambda_grid: LambdaGrid,
    pub selection_method: SelectionMethod,
    pub split_basis: SplitBasis,
    pub bins: usize,
    pub weight_sample_size: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            master_seed: DEFAULT_SEED,
            repetitions: 10_000,
            sample_sizes: vec![2, 4, 8, 16, 32, 64],
            sigma_source: 0.75,
            sigma_target: 1.0,
            theta_fixed: THETA_BASE,
            lambda_grid: LambdaGrid::default(),
            selection_method: SelectionMethod::Grid,
            split_basis: SplitBasis::FixedClassifier,
            bins: 50,
            weight_sample_size: 10_000,
        }
    }
}

fn config_error(field: &'static str, reason: impl Into<String>) -> Error {
    Error::Config {
        field,
        reason: reason.into(),
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(config_error("repetitions", "must be >= 1"));
        }
        if self.sample_sizes.is_empty() {
            return Err(config_error(
                "sample_sizes",
                "need at least one sample size",
            ));
        }
        if let Some(&n) = self
            .sample_sizes
            .iter()
            .find(|&&n| n == 0 || n > u32::MAX as usize)
        {
            return Err(config_error(
                "sample_sizes",
                format!("sample size {n} out of range (must be >= 1)"),
            ));
        }
        if self.repetitions > u32::MAX as usize {
            return Err(config_error("repetitions", "too many repetitions"));
        }
        if !(self.sigma_source.is_finite() && self.sigma_source > 0.0) {
            return Err(config_error("sigma_source", "must be finite and > 0"));
        }
        if !(self.sigma_target.is_finite() && self.sigma_target > 0.0) {
            return Err(config_error("sigma_target", "must be finite and > 0"));
        }
        if !self.theta_fixed.is_finite() {
            return Err(config_error("theta_fixed", "must be finite"));
        }
        if self.bins == 0 {
            return Err(config_error("bins", "must be >= 1"));
        }
        if self.weight_sample_size == 0 {
            return Err(config_error("weight_sample_size", "must be >= 1"));
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<CovariateShiftProblem> {
        CovariateShiftProblem::centered(self.sigma_source, self.sigma_target)
    }

    pub fn fixed_classifier(&self) -> RegularizedLinearClassifier {
        RegularizedLinearClassifier::with_theta(self.theta_fixed)
    }

    fn seed(&self, n: usize, rep: usize) -> RngSeedSpec {
        RngSeedSpec::new(self.master_seed, stream_id(n, rep))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    RiskDistribution,
    ModelSelection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Body,
    Tail,
    /// Closed-form selection had no solution (`Σ w x² = 0`).
    Degenerate,
}

impl Part {
    pub fn as_str(self) -> &'static str {
        match self {
            Part::Body => "body",
            Part::Tail => "tail",
            Part::Degenerate => "degenerate",
        }
    }
}

/// One repetition's output. For model selection `risk` is the minimized
/// weighted risk; for the risk distribution it is `R̂_W` at the fixed classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub rep: usize,
    pub risk: f64,
    pub lambda_hat: Option<f64>,
    pub part: Option<Part>,
}

fn source_weights(data: &LabeledDataset, problem: &CovariateShiftProblem) -> Result<Vec<f64>> {
    data.xs()
        .iter()
        .map(|&x| importance_weight(x, problem))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightHistogram {
    pub xs: Vec<f64>,
    pub weights: Vec<f64>,
    pub histogram: HistogramData,
    pub summary: MomentSummary,
}

/// Exact importance weights of `weight_sample_size` source draws.
pub fn run_weight_histogram(config: &ExperimentConfig) -> Result<WeightHistogram> {
    config.validate()?;
    let problem = config.problem()?;
    let seed = RngSeedSpec::new(config.master_seed, WEIGHT_STREAM);
    let data = draw_dataset(&problem, DomainTag::Source, config.weight_sample_size, seed);
    let weights = source_weights(&data, &problem)?;
    let histogram = histogram(&weights, config.bins)?;
    let summary = sample_moments(&weights)?;
    Ok(WeightHistogram {
        xs: data.xs().to_vec(),
        weights,
        histogram,
        summary,
    })
}

/// Population values for `R̂_W` at one sample size. Variance and skewness are
/// `None` where the corresponding moment is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleValues {
    pub mean: f64,
    pub variance: Option<f64>,
    pub skewness: Option<f64>,
}

pub fn weighted_risk_oracles(
    classifier: &RegularizedLinearClassifier,
    n: usize,
    problem: &CovariateShiftProblem,
) -> Result<OracleValues> {
    let mean = generalized_moment(1, 0, classifier, problem)?.value;
    let variance = estimator_variance(classifier, n, true, problem)?.get();
    let skewness = match estimator_skewness(classifier, n, true, problem) {
        Ok(r) => r.get(),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(OracleValues {
        mean,
        variance,
        skewness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskDistribution {
    pub n: usize,
    pub records: Vec<ExperimentRecord>,
    pub histogram: HistogramData,
    pub summary: MomentSummary,
    pub oracle: OracleValues,
}

impl RiskDistribution {
    pub fn risks(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.risk).collect()
    }
}

fn weighted_risks_at(
    config: &ExperimentConfig,
    problem: &CovariateShiftProblem,
    n: usize,
) -> Result<Vec<f64>> {
    let classifier = config.fixed_classifier();
    (0..config.repetitions)
        .into_par_iter()
        .map(|rep| {
            let data = draw_dataset(problem, DomainTag::Source, n, config.seed(n, rep));
            let weights = source_weights(&data, problem)?;
            Ok(empirical_risk(&data, &classifier, Some(&weights))?.value)
        })
        .collect()
}

/// `R̂_W` at the fixed classifier over `repetitions` datasets per sample size.
pub fn run_risk_distribution(config: &ExperimentConfig) -> Result<Vec<RiskDistribution>> {
    config.validate()?;
    let problem = config.problem()?;
    let classifier = config.fixed_classifier();
    config
        .sample_sizes
        .iter()
        .map(|&n| {
            let risks = weighted_risks_at(config, &problem, n)?;
            let records = risks
                .iter()
                .enumerate()
                .map(|(rep, &risk)| ExperimentRecord {
                    experiment: ExperimentKind::RiskDistribution,
                    n,
                    rep,
                    risk,
                    lambda_hat: None,
                    part: None,
                })
                .collect();
            Ok(RiskDistribution {
                n,
                records,
                histogram: histogram(&risks, config.bins)?,
                summary: sample_moments(&risks)?,
                oracle: weighted_risk_oracles(&classifier, n, &problem)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSelection {
    pub n: usize,
    pub records: Vec<ExperimentRecord>,
    /// Split over the non-degenerate repetitions; indices are repetition indices.
    pub split: Option<BodyTailSplit>,
    pub degenerate_count: usize,
    pub body_lambda: Option<LocationSummary>,
    pub tail_lambda: Option<LocationSummary>,
}

impl ModelSelection {
    pub fn body_count(&self) -> usize {
        self.split.as_ref().map_or(0, |s| s.body_indices.len())
    }

    pub fn tail_count(&self) -> usize {
        self.split.as_ref().map_or(0, |s| s.tail_indices.len())
    }

    pub fn body_fraction(&self) -> Option<f64> {
        self.split.as_ref().map(|s| s.body_fraction)
    }
}

struct Repetition {
    fixed_risk: f64,
    /// `(λ̂, minimized risk)`, or `None` for a degenerate design.
    selected: Option<(f64, f64)>,
}

fn run_selection_at(
    config: &ExperimentConfig,
    problem: &CovariateShiftProblem,
    n: usize,
) -> Result<ModelSelection> {
    let classifier = config.fixed_classifier();
    let reps: Vec<Repetition> = (0..config.repetitions)
        .into_par_iter()
        .map(|rep| {
            let data = draw_dataset(problem, DomainTag::Source, n, config.seed(n, rep));
            let weights = source_weights(&data, problem)?;
            let fixed_risk = empirical_risk(&data, &classifier, Some(&weights))?.value;
            let selected = match select_lambda(
                config.selection_method,
                &data,
                &weights,
                &config.lambda_grid,
            ) {
                Ok(r) => Some((r.lambda_hat, r.risk_at_min)),
                Err(Error::DegenerateDesign) => None,
                Err(e) => return Err(e),
            };
            Ok(Repetition {
                fixed_risk,
                selected,
            })
        })
        .collect::<Result<_>>()?;

    let valid: Vec<usize> = (0..reps.len())
        .filter(|&i| reps[i].selected.is_some())
        .collect();
    let basis: Vec<f64> = valid
        .iter()
        .map(|&i| match config.split_basis {
            SplitBasis::FixedClassifier => reps[i].fixed_risk,
            SplitBasis::MinimizedRisk => reps[i].selected.map_or(f64::NAN, |s| s.1),
        })
        .collect();
    let split = if valid.is_empty() {
        None
    } else {
        let local = body_tail_split(&basis)?;
        Some(BodyTailSplit {
            threshold: local.threshold,
            body_indices: local.body_indices.iter().map(|&j| valid[j]).collect(),
            tail_indices: local.tail_indices.iter().map(|&j| valid[j]).collect(),
            body_fraction: local.body_fraction,
        })
    };

    let mut parts = vec![Part::Degenerate; reps.len()];
    if let Some(s) = &split {
        s.body_indices.iter().for_each(|&i| parts[i] = Part::Body);
        s.tail_indices.iter().for_each(|&i| parts[i] = Part::Tail);
    }
    let records: Vec<ExperimentRecord> = reps
        .iter()
        .enumerate()
        .map(|(rep, r)| ExperimentRecord {
            experiment: ExperimentKind::ModelSelection,
            n,
            rep,
            risk: r.selected.map_or(r.fixed_risk, |s| s.1),
            lambda_hat: r.selected.map(|s| s.0),
            part: Some(parts[rep]),
        })
        .collect();

    let lambdas_of = |idx: &[usize]| -> Vec<f64> {
        idx.iter()
            .filter_map(|&i| reps[i].selected.map(|s| s.0))
            .collect()
    };
    let (body_lambda, tail_lambda) = match &split {
        Some(s) => (
            location_summary(&lambdas_of(&s.body_indices)),
            location_summary(&lambdas_of(&s.tail_indices)),
        ),
        None => (None, None),
    };
    Ok(ModelSelection {
        n,
        records,
        split,
        degenerate_count: reps.len() - valid.len(),
        body_lambda,
        tail_lambda,
    })
}

/// Selects `λ̂` on every repetition, then splits repetitions into body and
/// tail around the mean of the configured risk basis.
pub fn run_model_selection(config: &ExperimentConfig) -> Result<Vec<ModelSelection>> {
    config.validate()?;
    let problem = config.problem()?;
    config
        .sample_sizes
        .iter()
        .map(|&n| run_selection_at(config, &problem, n))
        .collect()
}
