//! Summaries of collections of estimates.

use serde::Serialize;

use crate::{Error, Result};

/// Mean, unbiased variance and two sample-skewness measures.
///
/// `skewness_g1 = m₃ / m₂^{3/2}` with central moments `m_k = (1/c) Σ (v - v̄)^k`;
/// `skewness_adjusted = g1 √(c(c-1)) / (c-2)`. Both are `None` when the
/// count is below 3 or the values are all equal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSummary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness_g1: Option<f64>,
    pub skewness_adjusted: Option<f64>,
}

pub fn sample_moments(values: &[f64]) -> Result<MomentSummary> {
    let count = values.len();
    if count == 0 {
        return Err(Error::EmptyInput { what: "values" });
    }
    let c = count as f64;
    let mean = values.iter().sum::<f64>() / c;
    let (mut s2, mut s3) = (0.0, 0.0);
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
    }
    let variance = if count > 1 { s2 / (c - 1.0) } else { 0.0 };
    let m2 = s2 / c;
    let m3 = s3 / c;
    let (g1, adjusted) = if count >= 3 && m2 > 0.0 {
        let g1 = m3 / m2.powf(1.5);
        (Some(g1), Some(g1 * (c * (c - 1.0)).sqrt() / (c - 2.0)))
    } else {
        (None, None)
    };
    Ok(MomentSummary {
        count,
        mean,
        variance,
        skewness_g1: g1,
        skewness_adjusted: adjusted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramData {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl HistogramData {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }
}

/// Uniform bins over `[min, max]`.
///
/// Bins are closed on the right, `(e_i, e_{i+1}]`, and the first bin also
/// takes its left edge, so both extremes are counted.
///
/// A constant input gets a span widened by a few ulps around the value so the
/// edges stay strictly increasing.
pub fn histogram(values: &[f64], bins: usize) -> Result<HistogramData> {
    if values.is_empty() {
        return Err(Error::EmptyInput { what: "values" });
    }
    if bins == 0 {
        return Err(Error::Config {
            field: "bins",
            reason: "need at least one bin".into(),
        });
    }
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }
    let mut lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        let pad = lo.abs().max(1.0) * f64::EPSILON * 16.0 * bins as f64;
        lo -= pad;
        hi += pad;
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + i as f64 * width })
        .collect();
    let mut counts = vec![0u64; bins];
    for &v in values {
        let idx = (((v - lo) / width).ceil() as usize)
            .saturating_sub(1)
            .min(bins - 1);
        counts[idx] += 1;
    }
    Ok(HistogramData { edges, counts })
}

/// Partition of repetitions around the mean of their risks.
///
/// Body: risk strictly below the mean. Tail: risk at or above it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BodyTailSplit {
    pub threshold: f64,
    pub body_indices: Vec<usize>,
    pub tail_indices: Vec<usize>,
    pub body_fraction: f64,
}

pub fn body_tail_split(risks: &[f64]) -> Result<BodyTailSplit> {
    if risks.is_empty() {
        return Err(Error::EmptyInput { what: "risks" });
    }
    let threshold = risks.iter().sum::<f64>() / risks.len() as f64;
    let (body_indices, tail_indices): (Vec<usize>, Vec<usize>) =
        (0..risks.len()).partition(|&i| risks[i] < threshold);
    let body_fraction = body_indices.len() as f64 / risks.len() as f64;
    Ok(BodyTailSplit {
        threshold,
        body_indices,
        tail_indices,
        body_fraction,
    })
}

/// Linearly interpolated quantile of sorted data (Hyndman–Fan type 7).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// Location summary used for the λ̂ boxplots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocationSummary {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
}

pub fn location_summary(values: &[f64]) -> Option<LocationSummary> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(LocationSummary {
        count: sorted.len(),
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        median: quantile_sorted(&sorted, 0.5)?,
        q1: quantile_sorted(&sorted, 0.25)?,
        q3: quantile_sorted(&sorted, 0.75)?,
        min: sorted[0],
        max: sorted[sorted.len() - 1],
    })
}
