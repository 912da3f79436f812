//! Linear classifier, loss and empirical risk estimators.

use serde::{Deserialize, Serialize};

use crate::domain::Label;
use crate::sampling::{DomainTag, LabeledDataset};
use crate::{Error, Result};

/// `1 / (2√π)`, the fixed base parameter of the classifier.
pub const THETA_BASE: f64 = std::f64::consts::FRAC_2_SQRT_PI / 4.0;

/// `h(x) = x·θ` with `θ = theta_base + lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizedLinearClassifier {
    pub theta_base: f64,
    pub lambda: f64,
}

impl Default for RegularizedLinearClassifier {
    fn default() -> Self {
        Self::new(0.0)
    }
}

impl RegularizedLinearClassifier {
    pub fn new(lambda: f64) -> Self {
        Self {
            theta_base: THETA_BASE,
            lambda,
        }
    }

    /// Classifier whose effective parameter equals `theta`.
    pub fn with_theta(theta: f64) -> Self {
        Self::new(theta - THETA_BASE)
    }

    pub fn theta(&self) -> f64 {
        self.theta_base + self.lambda
    }

    pub fn predict(&self, x: f64) -> f64 {
        x * self.theta()
    }
}

/// Loss evaluation seam. Only the quadratic loss is provided.
pub trait Loss {
    fn eval(&self, prediction: f64, y: Label) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct QuadraticLoss;

impl Loss for QuadraticLoss {
    #[inline]
    fn eval(&self, prediction: f64, y: Label) -> f64 {
        let r = prediction - y.value();
        r * r
    }
}

pub fn quadratic_loss(prediction: f64, y: Label) -> f64 {
    QuadraticLoss.eval(prediction, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RiskKind {
    Source,
    Target,
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub value: f64,
    pub n: usize,
    pub kind: RiskKind,
}

pub(crate) fn validate_weights(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(Error::WeightLengthMismatch {
            weights: weights.len(),
            data: n,
        });
    }
    if let Some((index, &value)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
    {
        return Err(Error::InvalidWeight { index, value });
    }
    Ok(())
}

/// `(1/n) Σ ℓ(h(x_i), y_i)·w_i` without input checks; `weights` must match `data`.
pub(crate) fn weighted_risk_unchecked(
    data: &LabeledDataset,
    classifier: &RegularizedLinearClassifier,
    weights: Option<&[f64]>,
) -> f64 {
    let loss = QuadraticLoss;
    let sum: f64 = match weights {
        Some(w) => data
            .iter()
            .zip(w)
            .map(|((x, y), w)| loss.eval(classifier.predict(x), y) * w)
            .sum(),
        None => data
            .iter()
            .map(|(x, y)| loss.eval(classifier.predict(x), y))
            .sum(),
    };
    sum / data.len() as f64
}

/// Empirical risk of `classifier` on `data`.
///
/// With weights this is the importance-weighted estimator, normalized by the
/// dataset size (not by the weight sum). Without weights the estimate is
/// tagged with the dataset's domain.
pub fn empirical_risk(
    data: &LabeledDataset,
    classifier: &RegularizedLinearClassifier,
    weights: Option<&[f64]>,
) -> Result<RiskEstimate> {
    if data.is_empty() {
        return Err(Error::EmptyInput { what: "dataset" });
    }
    if let Some(w) = weights {
        validate_weights(w, data.len())?;
    }
    let kind = match (weights, data.domain()) {
        (Some(_), _) => RiskKind::Weighted,
        (None, DomainTag::Source) => RiskKind::Source,
        (None, DomainTag::Target) => RiskKind::Target,
    };
    Ok(RiskEstimate {
        value: weighted_risk_unchecked(data, classifier, weights),
        n: data.len(),
        kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn ds(pairs: &[(f64, i64)]) -> LabeledDataset {
        LabeledDataset::from_pairs(pairs, DomainTag::Source).unwrap()
    }

    #[test]
    fn predictions() {
        let base = RegularizedLinearClassifier::new(0.0);
        assert_eq!(base.predict(0.0), 0.0);
        assert_abs_diff_eq!(base.predict(1.0), 0.282_094_8, epsilon = 1e-7);
        let opt = RegularizedLinearClassifier::new(THETA_BASE);
        assert_abs_diff_eq!(opt.predict(1.0), 0.564_189_6, epsilon = 1e-7);
        assert_abs_diff_eq!(
            RegularizedLinearClassifier::with_theta(1.0).theta(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn losses() {
        assert_eq!(quadratic_loss(1.0, Label::Pos), 0.0);
        assert_eq!(quadratic_loss(0.0, Label::Pos), 1.0);
        assert_eq!(quadratic_loss(-1.0, Label::Pos), 4.0);
    }

    #[test]
    fn risk_examples() {
        let r = empirical_risk(
            &ds(&[(0.0, 1)]),
            &RegularizedLinearClassifier::new(0.0),
            Some(&[0.75]),
        )
        .unwrap();
        assert_abs_diff_eq!(r.value, 0.75, epsilon = 1e-15);
        assert_eq!(r.kind, RiskKind::Weighted);

        let perfect = RegularizedLinearClassifier::new(1.0 - THETA_BASE);
        let r = empirical_risk(&ds(&[(1.0, 1), (-1.0, -1)]), &perfect, None).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-15);
        assert_eq!(r.kind, RiskKind::Source);
    }

    #[test]
    fn risk_errors() {
        let c = RegularizedLinearClassifier::default();
        let empty = ds(&[]);
        assert!(matches!(
            empirical_risk(&empty, &c, None),
            Err(Error::EmptyInput { .. })
        ));
        let d = ds(&[(0.5, 1), (1.0, -1)]);
        assert!(matches!(
            empirical_risk(&d, &c, Some(&[1.0])),
            Err(Error::WeightLengthMismatch { .. })
        ));
        assert!(matches!(
            empirical_risk(&d, &c, Some(&[1.0, -0.5])),
            Err(Error::InvalidWeight { index: 1, .. })
        ));
    }

    fn dataset_strategy() -> impl Strategy<Value = (Vec<(f64, bool)>, Vec<f64>)> {
        (1usize..20).prop_flat_map(|n| {
            (
                prop::collection::vec((-5.0f64..5.0, any::<bool>()), n),
                prop::collection::vec(0.0f64..10.0, n),
            )
        })
    }

    fn build(pairs: &[(f64, bool)]) -> LabeledDataset {
        let xs = pairs.iter().map(|p| p.0).collect();
        let ys = pairs
            .iter()
            .map(|p| if p.1 { Label::Pos } else { Label::Neg })
            .collect();
        LabeledDataset::new(xs, ys, DomainTag::Source).unwrap()
    }

    proptest! {
        #[test]
        fn nonnegative((pairs, w) in dataset_strategy(), lambda in -5.0f64..5.0) {
            let d = build(&pairs);
            let c = RegularizedLinearClassifier::new(lambda);
            prop_assert!(empirical_risk(&d, &c, Some(&w)).unwrap().value >= 0.0);
            prop_assert!(empirical_risk(&d, &c, None).unwrap().value >= 0.0);
        }

        #[test]
        fn unit_weights_match_unweighted((pairs, _w) in dataset_strategy(), lambda in -5.0f64..5.0) {
            let d = build(&pairs);
            let c = RegularizedLinearClassifier::new(lambda);
            let ones = vec![1.0; d.len()];
            prop_assert_eq!(
                empirical_risk(&d, &c, Some(&ones)).unwrap().value,
                empirical_risk(&d, &c, None).unwrap().value
            );
        }

        #[test]
        fn linear_in_weights((pairs, w) in dataset_strategy(), a in 0.01f64..100.0) {
            let d = build(&pairs);
            let c = RegularizedLinearClassifier::default();
            let scaled: Vec<f64> = w.iter().map(|v| a * v).collect();
            let base = empirical_risk(&d, &c, Some(&w)).unwrap().value;
            let r = empirical_risk(&d, &c, Some(&scaled)).unwrap().value;
            assert_relative_eq!(r, a * base, max_relative = 1e-12, epsilon = 1e-300);
        }
    }
}
