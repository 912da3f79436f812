//! Regularization-parameter selection by minimizing the weighted validation
//! risk `R̂_W(θ_λ)` over `λ`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::risk::{
    validate_weights, weighted_risk_unchecked, RegularizedLinearClassifier, THETA_BASE,
};
use crate::sampling::LabeledDataset;
use crate::{Error, Result};

/// Uniform grid `min, min + step, …` up to `max` (inclusive within rounding).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    min: f64,
    max: f64,
    step: f64,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        Self {
            min: -5.0,
            max: 5.0,
            step: 0.01,
        }
    }
}

impl LambdaGrid {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        let finite = min.is_finite() && max.is_finite() && step.is_finite();
        if !finite || min >= max || step <= 0.0 {
            return Err(Error::InvalidGrid { min, max, step });
        }
        Ok(Self { min, max, step })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.min + i as f64 * self.step)
    }

    pub fn contains(&self, lambda: f64) -> bool {
        lambda >= self.min && lambda <= self.min + (self.len() - 1) as f64 * self.step
    }
}

impl FromStr for LambdaGrid {
    type Err = String;

    /// Parses `MIN:MAX:STEP`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected MIN:MAX:STEP, got `{s}`"));
        }
        let mut nums = [0.0; 3];
        for (slot, part) in nums.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("`{part}` is not a number: {e}"))?;
        }
        LambdaGrid::new(nums[0], nums[1], nums[2]).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMethod {
    ClosedForm,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub lambda_hat: f64,
    pub risk_at_min: f64,
    pub method: SelectionMethod,
}

/// Exact minimizer of the weighted quadratic risk,
/// `θ* = Σ w x y / Σ w x²`, reported as `λ̂ = θ* - 1/(2√π)`.
pub fn select_lambda_closed_form(
    data: &LabeledDataset,
    weights: &[f64],
) -> Result<SelectionResult> {
    if data.is_empty() {
        return Err(Error::EmptyInput { what: "dataset" });
    }
    validate_weights(weights, data.len())?;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for ((x, y), w) in data.iter().zip(weights) {
        sxy += w * x * y.value();
        sxx += w * x * x;
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateDesign);
    }
    let lambda_hat = sxy / sxx - THETA_BASE;
    let classifier = RegularizedLinearClassifier::new(lambda_hat);
    Ok(SelectionResult {
        lambda_hat,
        risk_at_min: weighted_risk_unchecked(data, &classifier, Some(weights)),
        method: SelectionMethod::ClosedForm,
    })
}

/// Grid search; ties go to the smallest `λ`.
pub fn select_lambda_grid(
    data: &LabeledDataset,
    weights: &[f64],
    grid: &LambdaGrid,
) -> Result<SelectionResult> {
    if data.is_empty() {
        return Err(Error::EmptyInput { what: "dataset" });
    }
    validate_weights(weights, data.len())?;
    let mut best = (f64::NAN, f64::INFINITY);
    for lambda in grid.points() {
        let risk = weighted_risk_unchecked(
            data,
            &RegularizedLinearClassifier::new(lambda),
            Some(weights),
        );
        if risk < best.1 {
            best = (lambda, risk);
        }
    }
    Ok(SelectionResult {
        lambda_hat: best.0,
        risk_at_min: best.1,
        method: SelectionMethod::Grid,
    })
}

pub fn select_lambda(
    method: SelectionMethod,
    data: &LabeledDataset,
    weights: &[f64],
    grid: &LambdaGrid,
) -> Result<SelectionResult> {
    match method {
        SelectionMethod::ClosedForm => select_lambda_closed_form(data, weights),
        SelectionMethod::Grid => select_lambda_grid(data, weights, grid),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use crate::domain::Label;
    use crate::risk::empirical_risk;
    use crate::sampling::DomainTag;

    fn ds(pairs: &[(f64, i64)]) -> LabeledDataset {
        LabeledDataset::from_pairs(pairs, DomainTag::Source).unwrap()
    }

    #[test]
    fn grid_shape() {
        let g = LambdaGrid::default();
        assert_eq!(g.len(), 1001);
        assert!(g.points().any(|l| l == 0.0));
        assert!(g.contains(THETA_BASE));
        assert_abs_diff_eq!(g.points().last().unwrap(), 5.0, epsilon = 1e-12);
        let g: LambdaGrid = "0:1:0.5".parse().unwrap();
        assert_eq!(g.points().collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
        assert!("1:0:0.5".parse::<LambdaGrid>().is_err());
        assert!("0:1:0".parse::<LambdaGrid>().is_err());
        assert!("0:1".parse::<LambdaGrid>().is_err());
        assert!("a:1:0.1".parse::<LambdaGrid>().is_err());
    }

    #[test]
    fn closed_form_examples() {
        let r = select_lambda_closed_form(&ds(&[(2.0, 1)]), &[1.0]).unwrap();
        assert_abs_diff_eq!(r.lambda_hat, 0.5 - THETA_BASE, epsilon = 1e-15);
        assert_abs_diff_eq!(r.lambda_hat, 0.217_905_2, epsilon = 1e-7);

        let r = select_lambda_closed_form(&ds(&[(1.0, 1), (-1.0, -1)]), &[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(r.lambda_hat, 0.717_905_2, epsilon = 1e-7);
        assert_abs_diff_eq!(r.risk_at_min, 0.0, epsilon = 1e-15);

        assert!(matches!(
            select_lambda_closed_form(&ds(&[(0.0, 1)]), &[3.0]),
            Err(Error::DegenerateDesign)
        ));
        assert!(matches!(
            select_lambda_closed_form(&ds(&[(1.0, 1)]), &[0.0]),
            Err(Error::DegenerateDesign)
        ));
    }

    #[test]
    fn grid_examples() {
        let grid = LambdaGrid::new(-1.0, 1.0, 1.0).unwrap();
        let d = ds(&[(1.0, 1)]);
        let r = select_lambda_grid(&d, &[1.0], &grid).unwrap();
        assert_eq!(r.lambda_hat, 1.0);
        assert_abs_diff_eq!(
            r.risk_at_min,
            (1.0 + THETA_BASE - 1.0f64).powi(2),
            epsilon = 1e-15
        );
        for (lambda, expected) in [(-1.0, 2.951), (0.0, 0.515), (1.0, 0.0796)] {
            let v = empirical_risk(&d, &RegularizedLinearClassifier::new(lambda), Some(&[1.0]))
                .unwrap()
                .value;
            assert_abs_diff_eq!(v, expected, epsilon = 1e-3);
        }

        let zeros = ds(&[(0.0, 1), (0.0, -1)]);
        let r = select_lambda_grid(&zeros, &[1.0, 2.0], &LambdaGrid::default()).unwrap();
        assert_eq!(r.lambda_hat, -5.0);
    }

    #[test]
    fn dispatch() {
        let d = ds(&[(1.5, 1), (-0.5, 1)]);
        let g = LambdaGrid::default();
        let a = select_lambda(SelectionMethod::Grid, &d, &[1.0, 1.0], &g).unwrap();
        let b = select_lambda(SelectionMethod::ClosedForm, &d, &[1.0, 1.0], &g).unwrap();
        assert_eq!(a.method, SelectionMethod::Grid);
        assert_eq!(b.method, SelectionMethod::ClosedForm);
        assert!((a.lambda_hat - b.lambda_hat).abs() <= g.step());
    }

    fn small_dataset() -> impl Strategy<Value = (Vec<(f64, bool)>, Vec<f64>)> {
        (1usize..=8).prop_flat_map(|n| {
            (
                prop::collection::vec((-3.0f64..3.0, any::<bool>()), n),
                prop::collection::vec(0.05f64..5.0, n),
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
        fn closed_form_is_optimal((pairs, w) in small_dataset(), probes in prop::collection::vec(-10.0f64..10.0, 50)) {
            let d = build(&pairs);
            prop_assume!(d.xs().iter().any(|x| x.abs() > 1e-3));
            let r = select_lambda_closed_form(&d, &w).unwrap();
            for lambda in probes {
                let other = empirical_risk(&d, &RegularizedLinearClassifier::new(lambda), Some(&w)).unwrap().value;
                prop_assert!(r.risk_at_min <= other + 1e-12 * other.max(1.0));
            }
        }

        #[test]
        fn scale_invariance((pairs, w) in small_dataset(), a in 0.01f64..100.0) {
            let d = build(&pairs);
            prop_assume!(d.xs().iter().any(|x| x.abs() > 1e-3));
            let scaled: Vec<f64> = w.iter().map(|v| a * v).collect();
            let c1 = select_lambda_closed_form(&d, &w).unwrap().lambda_hat;
            let c2 = select_lambda_closed_form(&d, &scaled).unwrap().lambda_hat;
            prop_assert!((c1 - c2).abs() <= 1e-9 * c1.abs().max(1.0));
            let g = LambdaGrid::default();
            let g1 = select_lambda_grid(&d, &w, &g).unwrap().lambda_hat;
            let g2 = select_lambda_grid(&d, &scaled, &g).unwrap().lambda_hat;
            prop_assert_eq!(g1, g2);
        }

        #[test]
        fn grid_agrees_with_closed_form((pairs, w) in small_dataset()) {
            let d = build(&pairs);
            prop_assume!(d.xs().iter().any(|x| x.abs() > 1e-3));
            let g = LambdaGrid::default();
            let c = select_lambda_closed_form(&d, &w).unwrap();
            prop_assume!(g.contains(c.lambda_hat));
            let r = select_lambda_grid(&d, &w, &g).unwrap();
            prop_assert!((r.lambda_hat - c.lambda_hat).abs() <= g.step() * (1.0 + 1e-9));
        }
    }
}
