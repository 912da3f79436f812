//! Population moments of the risk estimators, by quadrature.
//!
//! Everything here is built from the family of generalized moments
//!
//! ```text
//! M(a, b) = ∫ Σ_y p_T(x) Φ(y x) ℓ(xθ, y)^a w(x)^b dx
//! ```
//!
//! `M(1, 0)` is the target risk, `M(2, 1)` and `M(3, 2)` enter the sampling
//! variance and skewness of the weighted estimator, and `M(a, 0)` those of the
//! target estimator. For zero-mean Gaussians the integrand behaves like
//! `exp(-c x²)` with `c = (b+1)/(2σ_T²) - b/(2σ_S²)`, so `M(a, b)` is finite
//! iff `(b+1)σ_S² > b σ_T²`. That test is applied before any integration; a
//! divergent moment is reported, never integrated.

use std::f64::consts::PI;

use serde::Serialize;

use crate::domain::{standard_normal_cdf, CovariateShiftProblem, Label};
use crate::quadrature::{integrate, QuadratureConfig, QuadratureResult};
use crate::risk::{quadratic_loss, RegularizedLinearClassifier};
use crate::{Error, Result};

/// Absolute tolerance of every oracle integral.
pub const ORACLE_ABS_TOL: f64 = 1e-10;

/// Half-width of the integration window, in standard deviations.
const WINDOW_SIGMAS: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentOracleResult {
    /// NaN unless `converged`.
    pub value: f64,
    pub k: u32,
    pub converged: bool,
    pub quadrature_error_estimate: f64,
}

impl MomentOracleResult {
    fn divergent(k: u32) -> Self {
        Self {
            value: f64::NAN,
            k,
            converged: false,
            quadrature_error_estimate: f64::INFINITY,
        }
    }

    /// The value, if the underlying moments are finite.
    pub fn get(&self) -> Option<f64> {
        self.converged.then_some(self.value)
    }
}

fn is_centered(problem: &CovariateShiftProblem) -> bool {
    problem.source().mean() == 0.0 && problem.target().mean() == 0.0
}

/// Whether `E_T[ℓ^k w^(k-1)]` is finite, i.e. `k σ_S² > (k-1) σ_T²`.
///
/// Only defined for zero-mean source and target; `k = 1` carries no weight
/// factor and is always finite.
pub fn moment_convergence_check(k: u32, problem: &CovariateShiftProblem) -> Result<bool> {
    if k == 0 {
        return Err(Error::InvalidMomentOrder { k });
    }
    if k == 1 {
        return Ok(true);
    }
    if !is_centered(problem) {
        return Err(Error::Unsupported(
            "moment convergence criterion requires zero-mean source and target",
        ));
    }
    let vs = problem.source().std().powi(2);
    let vt = problem.target().std().powi(2);
    Ok(k as f64 * vs > (k - 1) as f64 * vt)
}

/// Window half-width for `M(·, b)`: twelve standard deviations of the wider
/// marginal, or twelve effective standard deviations of the weighted
/// integrand when that decays more slowly.
fn window_half_width(weight_power: u32, problem: &CovariateShiftProblem) -> f64 {
    let ss = problem.source().std();
    let st = problem.target().std();
    let offset = problem
        .source()
        .mean()
        .abs()
        .max(problem.target().mean().abs());
    let mut half = WINDOW_SIGMAS * ss.max(st);
    if weight_power > 0 {
        let b = weight_power as f64;
        let c = (b + 1.0) / (2.0 * st * st) - b / (2.0 * ss * ss);
        if c > 0.0 {
            half = half.max(WINDOW_SIGMAS / (2.0 * c).sqrt());
        }
    }
    offset + half
}

fn integrand(
    x: f64,
    loss_power: u32,
    weight_power: u32,
    theta: f64,
    problem: &CovariateShiftProblem,
) -> f64 {
    // p_T(x) w(x)^b in log space; w^b alone overflows long before the product does.
    let ln_density =
        problem.target().ln_pdf(x) + weight_power as f64 * problem.ln_importance_weight(x);
    let density = ln_density.exp();
    if density == 0.0 {
        return 0.0;
    }
    let pred = x * theta;
    [Label::Pos, Label::Neg]
        .into_iter()
        .map(|y| {
            standard_normal_cdf(y.value() * x) * quadratic_loss(pred, y).powi(loss_power as i32)
        })
        .sum::<f64>()
        * density
}

/// `M(loss_power, weight_power)` over `[-half_width, half_width]`, with no
/// convergence check.
pub fn raw_moment_integral(
    loss_power: u32,
    weight_power: u32,
    classifier: &RegularizedLinearClassifier,
    problem: &CovariateShiftProblem,
    half_width: f64,
) -> QuadratureResult {
    let theta = classifier.theta();
    let config = QuadratureConfig {
        abs_tol: ORACLE_ABS_TOL,
        ..QuadratureConfig::default()
    };
    integrate(
        |x| integrand(x, loss_power, weight_power, theta, problem),
        -half_width,
        half_width,
        &config,
    )
}

/// `M(loss_power, weight_power)`, or a divergent marker when infinite.
pub fn generalized_moment(
    loss_power: u32,
    weight_power: u32,
    classifier: &RegularizedLinearClassifier,
    problem: &CovariateShiftProblem,
) -> Result<MomentOracleResult> {
    if weight_power > 0 && !moment_convergence_check(weight_power + 1, problem)? {
        return Ok(MomentOracleResult::divergent(loss_power));
    }
    let half = window_half_width(weight_power, problem);
    let r = raw_moment_integral(loss_power, weight_power, classifier, problem, half);
    if !r.converged {
        return Err(Error::QuadratureNotConverged {
            tolerance: ORACLE_ABS_TOL,
            estimate: r.error_estimate,
        });
    }
    Ok(MomentOracleResult {
        value: r.value,
        k: loss_power,
        converged: true,
        quadrature_error_estimate: r.error_estimate,
    })
}

/// `E_T[ℓ^k w^(k-1)]`.
pub fn expected_moment(
    k: u32,
    classifier: &RegularizedLinearClassifier,
    problem: &CovariateShiftProblem,
) -> Result<MomentOracleResult> {
    if k == 0 {
        return Err(Error::InvalidMomentOrder { k });
    }
    generalized_moment(k, k - 1, classifier, problem)
}

/// Raw `E_T[ℓ^k w^(k-1)]` integrals over the oracle window and over a window
/// twice as wide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowGrowth {
    pub half_width: f64,
    pub narrow: f64,
    pub wide: f64,
}

impl WindowGrowth {
    /// `(wide - narrow) / |narrow|`.
    pub fn relative_change(&self) -> f64 {
        (self.wide - self.narrow) / self.narrow.abs()
    }
}

/// Numerical evidence for (non-)convergence: the oracle integral recomputed
/// on a doubled window. Converged moments barely move; divergent ones grow.
pub fn window_growth(
    k: u32,
    classifier: &RegularizedLinearClassifier,
    problem: &CovariateShiftProblem,
) -> Result<WindowGrowth> {
    if k == 0 {
        return Err(Error::InvalidMomentOrder { k });
    }
    let half = window_half_width(k - 1, problem);
    let narrow = raw_moment_integral(k, k - 1, classifier, problem, half);
    let wide = raw_moment_integral(k, k - 1, classifier, problem, 2.0 * half);
    Ok(WindowGrowth {
        half_width: half,
        narrow: narrow.value,
        wide: wide.value,
    })
}

/// Closed-form target risk `θ² - 2θ/√π + 1` for the probit posterior under a
/// standard-normal target (`E_T[x²] = 1`, `E_T[x y] = 1/√π`).
pub fn analytic_target_risk(theta: f64) -> f64 {
    theta * theta - 2.0 * theta / PI.sqrt() + 1.0
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Config {
            field: "n",
            reason: "sample size must be >= 1".into(),
        });
    }
    Ok(())
}

/// Sampling variance of the weighted estimator,
/// `(E_T[ℓ² w] - R_T²) / n`, or of the target estimator,
/// `(E_T[ℓ²] - R_T²) / n`, when `weighted` is false.
pub fn estimator_variance(
    classifier: &RegularizedLinearClassifier,
    n: usize,
    weighted: bool,
    problem: &CovariateShiftProblem,
) -> Result<MomentOracleResult> {
    check_n(n)?;
    let risk = generalized_moment(1, 0, classifier, problem)?;
    let second = generalized_moment(2, u32::from(weighted), classifier, problem)?;
    if !second.converged {
        return Ok(MomentOracleResult::divergent(2));
    }
    let single = (second.value - risk.value * risk.value).max(0.0);
    Ok(MomentOracleResult {
        value: single / n as f64,
        k: 2,
        converged: true,
        quadrature_error_estimate: (second.quadrature_error_estimate
            + 2.0 * risk.value.abs() * risk.quadrature_error_estimate)
            / n as f64,
    })
}

/// Standardized third central moment of the mean of `n` iid terms with raw
/// moments `m1, m2, m3`: `μ₃ / (σ³ √n)`.
pub fn standardized_skewness(m1: f64, m2: f64, m3: f64, n: usize) -> f64 {
    let central3 = m3 - 3.0 * m1 * m2 + 2.0 * m1.powi(3);
    let central2 = m2 - m1 * m1;
    central3 / (central2.powf(1.5) * (n as f64).sqrt())
}

/// Moment coefficient of skewness of the estimator's sampling distribution.
///
/// For the weighted estimator the terms `ℓ w` have raw moments
/// `E_S[(ℓw)^j] = E_T[ℓ^j w^(j-1)]`; the target estimator uses `E_T[ℓ^j]`.
/// Reports `converged = false` when the third moment is infinite.
pub fn estimator_skewness(
    classifier: &RegularizedLinearClassifier,
    n: usize,
    weighted: bool,
    problem: &CovariateShiftProblem,
) -> Result<MomentOracleResult> {
    check_n(n)?;
    let w = u32::from(weighted);
    let third = generalized_moment(3, 2 * w, classifier, problem)?;
    if !third.converged {
        return Ok(MomentOracleResult::divergent(3));
    }
    let risk = generalized_moment(1, 0, classifier, problem)?;
    let second = generalized_moment(2, w, classifier, problem)?;
    let spread = second.value - risk.value * risk.value;
    if spread <= 1e-12 * second.value.abs().max(1.0) {
        return Err(Error::Unsupported(
            "skewness undefined: estimator has zero variance",
        ));
    }
    Ok(MomentOracleResult {
        value: standardized_skewness(risk.value, second.value, third.value, n),
        k: 3,
        converged: true,
        quadrature_error_estimate: risk.quadrature_error_estimate
            + second.quadrature_error_estimate
            + third.quadrature_error_estimate,
    })
}
