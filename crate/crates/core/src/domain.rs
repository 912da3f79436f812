//! The covariate-shift generative setting.
//!
//! Source and target domains have Gaussian input marginals and share one
//! class posterior, `p(y | x) = Φ(y·x)`. Because only one posterior exists in
//! [`CovariateShiftProblem`], the covariate-shift assumption holds by
//! construction and the importance weight reduces to the ratio of marginals,
//! `w(x) = p_T(x) / p_S(x)`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `ln(√(2π))`.
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Class label in `{-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Neg,
    Pos,
}

impl Label {
    pub fn value(self) -> f64 {
        match self {
            Label::Neg => -1.0,
            Label::Pos => 1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Label::Neg => -1,
            Label::Pos => 1,
        }
    }
}

impl TryFrom<i64> for Label {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self> {
        match value {
            -1 => Ok(Label::Neg),
            1 => Ok(Label::Pos),
            _ => Err(Error::InvalidLabel { value }),
        }
    }
}

/// Normal distribution parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    mean: f64,
    std: f64,
}

impl GaussianSpec {
    pub fn new(mean: f64, std: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidLocation { mean });
        }
        if !(std.is_finite() && std > 0.0) {
            return Err(Error::InvalidScale { std });
        }
        Ok(Self { mean, std })
    }

    pub fn standard() -> Self {
        Self {
            mean: 0.0,
            std: 1.0,
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std(&self) -> f64 {
        self.std
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.std;
        -0.5 * z * z - self.std.ln() - LN_SQRT_2PI
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.std;
        (-0.5 * z * z).exp() / (self.std * (2.0 * PI).sqrt())
    }
}

/// Normal density of `spec` evaluated at `x`.
pub fn gaussian_pdf(x: f64, spec: &GaussianSpec) -> f64 {
    spec.pdf(x)
}

/// `Φ(x)`, computed through the complementary error function so that both
/// tails keep full relative precision.
pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// The shared class posterior `p(y | x) = Φ(y·x)`.
pub fn posterior_prob(y: Label, x: f64) -> f64 {
    standard_normal_cdf(y.value() * x)
}

/// Source and target marginals plus the class prior.
///
/// The default instance is the reference setting: a standard-normal target and
/// a narrower zero-mean source with standard deviation 0.75, equal priors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovariateShiftProblem {
    source: GaussianSpec,
    target: GaussianSpec,
    prior_pos: f64,
}

impl Default for CovariateShiftProblem {
    fn default() -> Self {
        Self {
            source: GaussianSpec {
                mean: 0.0,
                std: 0.75,
            },
            target: GaussianSpec::standard(),
            prior_pos: 0.5,
        }
    }
}

impl CovariateShiftProblem {
    pub fn new(source: GaussianSpec, target: GaussianSpec, prior_pos: f64) -> Result<Self> {
        if !(prior_pos > 0.0 && prior_pos < 1.0) {
            return Err(Error::InvalidPrior { prior: prior_pos });
        }
        Ok(Self {
            source,
            target,
            prior_pos,
        })
    }

    /// Zero-mean source and target with the given scales and equal priors.
    pub fn centered(sigma_source: f64, sigma_target: f64) -> Result<Self> {
        Self::new(
            GaussianSpec::new(0.0, sigma_source)?,
            GaussianSpec::new(0.0, sigma_target)?,
            0.5,
        )
    }

    pub fn source(&self) -> &GaussianSpec {
        &self.source
    }

    pub fn target(&self) -> &GaussianSpec {
        &self.target
    }

    pub fn prior_pos(&self) -> f64 {
        self.prior_pos
    }

    pub fn prior(&self, y: Label) -> f64 {
        match y {
            Label::Pos => self.prior_pos,
            Label::Neg => 1.0 - self.prior_pos,
        }
    }

    /// `ln w(x)`; finite for every finite `x`.
    pub fn ln_importance_weight(&self, x: f64) -> f64 {
        self.target.ln_pdf(x) - self.source.ln_pdf(x)
    }
}

/// Exact importance weight `p_T(x) / p_S(x)`.
///
/// Evaluated as the exponential of a log-density difference. Returns
/// [`Error::WeightOutOfRange`] instead of infinity when the ratio overflows.
pub fn importance_weight(x: f64, problem: &CovariateShiftProblem) -> Result<f64> {
    let w = problem.ln_importance_weight(x).exp();
    if w.is_finite() {
        Ok(w)
    } else {
        Err(Error::WeightOutOfRange { x })
    }
}
