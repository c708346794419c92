//! Statistics kernel: two-sample tests, rank correlation and Monte Carlo
//! envelopes. Every function is pure.

pub mod special;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("degenerate table: a row or column sum is zero")]
    DegenerateTable,
    #[error("empty sample")]
    EmptySample,
    #[error("samples must have equal length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("no rank variation")]
    NoRankVariation,
    #[error("non-finite value in sample")]
    NonFinite,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "0")]
    Zero,
}

impl Direction {
    pub fn of(value: f64) -> Self {
        if value > 0.0 {
            Direction::Positive
        } else if value < 0.0 {
            Direction::Negative
        } else {
            Direction::Zero
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Direction::Positive => Direction::Negative,
            Direction::Negative => Direction::Positive,
            Direction::Zero => Direction::Zero,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Direction::Positive => "+",
            Direction::Negative => "-",
            Direction::Zero => "0",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ChiSquare,
    Wilcoxon,
    Ks,
    Spearman,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub direction: Direction,
    pub method: Method,
    /// False when the p-value approximation is known to be poor for the
    /// sample size (Spearman with n < 10).
    pub reliable: bool,
}

impl TestResult {
    fn new(method: Method, statistic: f64, p_value: f64, direction: Direction) -> Self {
        TestResult {
            statistic,
            p_value: p_value.clamp(0.0, 1.0),
            direction,
            method,
            reliable: true,
        }
    }
}

/// Pearson chi-square test of independence on the 2×2 table
/// `[[a, b], [c, d]]`, one degree of freedom.
///
/// Direction is the sign of `a/(a+b) − c/(c+d)`: positive when the first
/// row has the larger share in the first column.
pub fn chi_square_2x2(a: u64, b: u64, c: u64, d: u64, yates: bool) -> Result<TestResult, StatsError> {
    let (r1, r2, c1, c2) = (a + b, c + d, a + c, b + d);
    if r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0 {
        return Err(StatsError::DegenerateTable);
    }
    let n = (r1 + r2) as f64;
    // ad − bc exactly in i128
    let cross = a as i128 * d as i128 - b as i128 * c as i128;
    let mut num = (cross as f64).abs();
    if yates {
        num = (num - n / 2.0).max(0.0);
    }
    let denom = r1 as f64 * r2 as f64 * c1 as f64 * c2 as f64;
    let statistic = n * num * num / denom;
    let p = special::chi_square_sf(statistic, 1.0);
    Ok(TestResult::new(
        Method::ChiSquare,
        statistic,
        p,
        Direction::of(cross as f64),
    ))
}

/// Midranks (1-based) of `values`; ties share the mean of their positions.
/// Returns the ranks in input order and Σ(t³ − t) over tie groups.
pub fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        let t = (j - i) as f64;
        ties += t * t * t - t;
        i = j;
    }
    (ranks, ties)
}

fn check_sample(x: &[f64]) -> Result<(), StatsError> {
    if x.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

/// Wilcoxon rank-sum (Mann–Whitney) test, two-tailed.
///
/// The statistic is the midrank sum of `x`. The p-value uses the normal
/// approximation with tie-corrected variance and a 0.5 continuity
/// correction. Direction is the sign of `W − E[W]`, i.e. positive when `x`
/// tends to exceed `y`.
pub fn wilcoxon_rank_sum(x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    check_sample(x)?;
    check_sample(y)?;
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let w: f64 = ranks[..x.len()].iter().sum();
    let n = n1 + n2;
    let expected = n1 * (n + 1.0) / 2.0;
    let variance = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)).max(1.0));
    let shift = w - expected;
    let direction = Direction::of(shift);
    if variance <= 0.0 || shift == 0.0 {
        return Ok(TestResult::new(Method::Wilcoxon, w, 1.0, direction));
    }
    let z = (shift.abs() - 0.5).max(0.0) / variance.sqrt();
    let p = 2.0 * special::normal_sf(z);
    Ok(TestResult::new(Method::Wilcoxon, w, p, direction))
}

/// Two-sample Kolmogorov–Smirnov test.
///
/// `D = sup |F_x − F_y|` over the pooled support. The p-value comes from the
/// asymptotic Kolmogorov distribution at `λ = (√m + 0.12 + 0.11/√m)·D` with
/// effective size `m = n₁n₂/(n₁+n₂)` (Stephens' small-sample adjustment).
/// Direction is positive when `x` is stochastically larger, i.e. when the
/// largest gap has `F_x` below `F_y`.
pub fn ks_two_sample(x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    check_sample(x)?;
    check_sample(y)?;
    let (sx, sy) = (sorted(x), sorted(y));
    let (d_plus, d_minus) = ks_gaps(&sx, &sy);
    let d = d_plus.max(d_minus);
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let m = n1 * n2 / (n1 + n2);
    let lambda = (m.sqrt() + 0.12 + 0.11 / m.sqrt()) * d;
    let p = special::kolmogorov_sf(lambda);
    let direction = if d_plus > d_minus {
        Direction::Positive
    } else if d_minus > d_plus {
        Direction::Negative
    } else {
        Direction::Zero
    };
    Ok(TestResult::new(Method::Ks, d, p, direction))
}

fn sorted(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v
}

/// Returns `(max(F_y − F_x), max(F_x − F_y))` over the pooled points.
fn ks_gaps(sx: &[f64], sy: &[f64]) -> (f64, f64) {
    let (n1, n2) = (sx.len() as f64, sy.len() as f64);
    let (mut i, mut j) = (0, 0);
    let (mut d_plus, mut d_minus) = (0.0f64, 0.0f64);
    while i < sx.len() || j < sy.len() {
        let t = match (sx.get(i), sy.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        while i < sx.len() && sx[i] <= t {
            i += 1;
        }
        while j < sy.len() && sy[j] <= t {
            j += 1;
        }
        let diff = j as f64 / n2 - i as f64 / n1;
        d_plus = d_plus.max(diff);
        d_minus = d_minus.max(-diff);
    }
    (d_plus, d_minus)
}

/// Spearman rank correlation: Pearson correlation of midranks.
///
/// The two-sided p-value uses `t = r·√((n−2)/(1−r²))` with n − 2 degrees of
/// freedom and is marked unreliable for n < 10.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFew { needed: 2, got: x.len() });
    }
    check_sample(x)?;
    check_sample(y)?;
    let (rx, _) = midranks(x);
    let (ry, _) = midranks(y);
    let r = pearson(&rx, &ry).ok_or(StatsError::NoRankVariation)?;
    let n = x.len() as f64;
    let p = if n < 3.0 {
        1.0
    } else if r.abs() >= 1.0 {
        0.0
    } else {
        let df = n - 2.0;
        let t = r * (df / (1.0 - r * r)).sqrt();
        special::student_t_two_sided(t, df)
    };
    let mut res = TestResult::new(Method::Spearman, r, p, Direction::of(r));
    res.reliable = x.len() >= 10;
    Ok(res)
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Mean and 95% percentile interval of a set of Monte Carlo draws.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEnvelope {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_runs: usize,
    pub seed: u64,
}

impl MonteCarloEnvelope {
    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

pub const MIN_ENVELOPE_RUNS: usize = 100;

/// Builds a Monte Carlo envelope from exactly `n_runs` draws.
///
/// The interval bounds are the 2.5% and 97.5% quantiles, interpolated
/// linearly between order statistics at position `p·(n − 1)`. The result
/// depends only on the multiset of samples, not their order.
pub fn envelope(samples: &[f64], seed: u64, n_runs: usize) -> Result<MonteCarloEnvelope, StatsError> {
    if n_runs < MIN_ENVELOPE_RUNS {
        return Err(StatsError::TooFew {
            needed: MIN_ENVELOPE_RUNS,
            got: n_runs,
        });
    }
    if samples.len() != n_runs {
        return Err(StatsError::LengthMismatch(samples.len(), n_runs));
    }
    check_sample(samples)?;
    let s = sorted(samples);
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    Ok(MonteCarloEnvelope {
        mean,
        ci_low: quantile_sorted(&s, 0.025),
        ci_high: quantile_sorted(&s, 0.975),
        n_runs,
        seed,
    })
}

/// Linear-interpolation quantile of an ascending slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}
