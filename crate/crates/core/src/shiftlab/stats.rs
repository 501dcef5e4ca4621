//! Small statistics toolbox for the shift analytics: Wilson score interval,
//! empirical CDFs and the Mann-Whitney U rank test.

use crate::error::{Error, Result};

/// 97.5th percentile of the standard normal (95% two-sided coverage).
pub const Z_95: f64 = 1.959963984540054;

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: usize, n: usize, z: f64) -> (f64, f64) {
    assert!(n > 0, "wilson interval needs at least one trial");
    assert!(successes <= n);
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    // The Wilson interval always contains the point estimate; clamping keeps
    // that true under floating-point rounding at p = 0 and p = 1.
    (
        (center - half).max(0.0).min(p),
        (center + half).min(1.0).max(p),
    )
}

/// Right-continuous empirical CDF over a finite sample.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    values: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Self {
        assert!(!samples.is_empty(), "empty sample");
        samples.sort_unstable_by(f64::total_cmp);
        EmpiricalCdf { values: samples }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Fraction of samples less than or equal to `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let count = self.values.partition_point(|&v| v <= x);
        count as f64 / self.values.len() as f64
    }

    /// The sorted sample, i.e. the CDF's jump points.
    pub fn support(&self) -> &[f64] {
        &self.values
    }
}

/// Complementary error function (Numerical Recipes Chebyshev fit,
/// fractional error below 1.2e-7).
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t * (-z * z - 1.26551223
        + t * (1.00002368
            + t * (0.37409196
                + t * (0.09678418
                    + t * (-0.18628806
                        + t * (0.27886807
                            + t * (-1.13520398
                                + t * (1.48851587
                                    + t * (-0.82215223 + t * 0.17087277)))))))))
    .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitneyResult {
    /// U statistic of the first sample (midrank convention for ties).
    pub u: f64,
    pub z: f64,
    /// Two-sided p-value from the normal approximation with tie correction.
    pub p_value: f64,
}

/// Two-sided Mann-Whitney U test. Requires at least 2 samples per group.
pub fn mann_whitney_u(first: &[f64], second: &[f64]) -> Result<MannWhitneyResult> {
    if first.len() < 2 || second.len() < 2 {
        return Err(Error::InsufficientSamples {
            first: first.len(),
            second: second.len(),
        });
    }
    let n1 = first.len();
    let n2 = second.len();
    let n = n1 + n2;

    let mut pooled: Vec<(f64, usize)> = first
        .iter()
        .map(|&v| (v, 0))
        .chain(second.iter().map(|&v| (v, 1)))
        .collect();
    pooled.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    // Midranks and the tie-correction term sum(t^3 - t) over tie groups.
    let mut rank_sum_first = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let tie = (j - i) as f64;
        let midrank = (i + j + 1) as f64 / 2.0;
        if tie > 1.0 {
            tie_term += tie * tie * tie - tie;
        }
        for item in &pooled[i..j] {
            if item.1 == 0 {
                rank_sum_first += midrank;
            }
        }
        i = j;
    }

    let u = rank_sum_first - (n1 * (n1 + 1)) as f64 / 2.0;
    let mean_u = (n1 * n2) as f64 / 2.0;
    let nf = n as f64;
    let variance = (n1 * n2) as f64 / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));

    if variance <= 0.0 {
        // Every pooled value is identical; no difference is detectable.
        return Ok(MannWhitneyResult {
            u,
            z: 0.0,
            p_value: 1.0,
        });
    }
    let z = (u - mean_u) / variance.sqrt();
    let p_value = erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0);
    Ok(MannWhitneyResult { u, z, p_value })
}
