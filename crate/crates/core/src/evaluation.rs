//! Quantitative assessment of rankings: correlations against ground truth,
//! top-k metric summaries, the Mann-Whitney U test, and cumulative degree
//! tables.

use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::algorithms::ScoreSet;
use crate::scalar::Scalar;
use crate::simulator::GroundTruth;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("sequences have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least 2 paired observations, got {len}")]
    TooShort { len: usize },
    #[error("{which} input has zero variance, correlation undefined")]
    ZeroVariance { which: &'static str },
    #[error("{which} sample is empty")]
    EmptySample { which: &'static str },
    #[error("{which} contains a non-finite value")]
    NonFinite { which: &'static str },
    #[error("no metadata record for paper {paper}")]
    MissingMetadata { paper: usize },
}

/// Product-moment correlation of two equal-length sequences.
///
/// Zero variance in either input is an explicit error — quietly returning 0
/// would fabricate a result where none is defined.
pub fn pearson<F: Scalar>(x: &[F], y: &[F]) -> Result<F, EvalError> {
    if x.len() != y.len() {
        return Err(EvalError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(EvalError::TooShort { len: x.len() });
    }
    let n = F::from_usize_lossy(x.len());
    let mean_x = x.iter().copied().sum::<F>() / n;
    let mean_y = y.iter().copied().sum::<F>() / n;
    let mut sxx = F::zero();
    let mut syy = F::zero();
    let mut sxy = F::zero();
    for (&xi, &yi) in x.iter().zip(y.iter()) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == F::zero() {
        return Err(EvalError::ZeroVariance { which: "first" });
    }
    if syy == F::zero() {
        return Err(EvalError::ZeroVariance { which: "second" });
    }
    // Clamp away the last-ulp excursions beyond [-1, 1].
    Ok((sxy / (sxx.sqrt() * syy.sqrt()))
        .min(F::one())
        .max(-F::one()))
}

/// The four benchmark correlations between estimated and true quantities.
/// `None` marks a correlation that is undefined on this data (zero-variance
/// input), deliberately distinct from a correlation of 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport<F> {
    /// corr(estimated item quality, true item fitness) — accuracy on items.
    pub quality_fitness: Option<F>,
    /// corr(estimated user reputation, true user ability) — accuracy on users.
    pub reputation_ability: Option<F>,
    /// corr(estimated item quality, item creation step) — bias toward old items
    /// (negative: older items score higher).
    pub quality_created_at: Option<F>,
    /// corr(estimated user reputation, true user activity) — bias toward
    /// hyperactive users.
    pub reputation_activity: Option<F>,
}

fn missing_on_zero_variance<F: Scalar>(r: Result<F, EvalError>) -> Result<Option<F>, EvalError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(EvalError::ZeroVariance { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Score a [`ScoreSet`] against the generator's ground truth.
///
/// Reputation is correlated over *all* users, including the ones who never
/// interacted and hold score 0 — silently dropping inactive users would
/// overstate how well reputation tracks activity and ability.
pub fn correlation_report<F: Scalar>(
    scores: &ScoreSet<F>,
    truth: &GroundTruth<F>,
) -> Result<CorrelationReport<F>, EvalError> {
    if scores.quality.len() != truth.fitness.len() {
        return Err(EvalError::LengthMismatch {
            left: scores.quality.len(),
            right: truth.fitness.len(),
        });
    }
    if scores.reputation.len() != truth.ability.len() {
        return Err(EvalError::LengthMismatch {
            left: scores.reputation.len(),
            right: truth.ability.len(),
        });
    }
    let created: Vec<F> = truth
        .created_at
        .iter()
        .map(|&t| F::from_usize_lossy(t))
        .collect();
    Ok(CorrelationReport {
        quality_fitness: missing_on_zero_variance(pearson(
            scores.quality.values(),
            &truth.fitness,
        ))?,
        reputation_ability: missing_on_zero_variance(pearson(
            scores.reputation.values(),
            &truth.ability,
        ))?,
        quality_created_at: missing_on_zero_variance(pearson(scores.quality.values(), &created))?,
        reputation_activity: missing_on_zero_variance(pearson(
            scores.reputation.values(),
            &truth.activity,
        ))?,
    })
}

/// Ids of the highest-scoring nodes, highest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    pub ids: Vec<usize>,
    /// Set when more ids were requested than nodes exist; `ids` then holds
    /// the full population.
    pub truncated: bool,
}

/// The `k` largest scores, descending, ties broken by ascending id so the
/// result is deterministic. Asking for more than the population returns the
/// whole ranking with [`Ranking::truncated`] set.
pub fn top_k<F: Scalar>(scores: &[F], k: usize) -> Ranking {
    let mut ids: Vec<usize> = (0..scores.len()).collect();
    ids.sort_unstable_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let truncated = k > ids.len();
    ids.truncate(k);
    Ranking { ids, truncated }
}

/// Mean and standard error of one metric over a top-k selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary<F> {
    pub mean: F,
    /// Sample standard deviation (n-1 denominator) over sqrt(n); 0 for a
    /// single observation (see [`TopKReport::singleton`]).
    pub std_error: F,
}

fn summarize<F: Scalar>(values: &[F]) -> MetricSummary<F> {
    let n = F::from_usize_lossy(values.len());
    let mean = values.iter().copied().sum::<F>() / n;
    if values.len() < 2 {
        return MetricSummary {
            mean,
            std_error: F::zero(),
        };
    }
    let ss: F = values.iter().map(|&v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (n - F::one())).sqrt();
    MetricSummary {
        mean,
        std_error: sd / n.sqrt(),
    }
}

/// External per-paper metrics joined against a ranking. `downloads` is
/// optional because it comes from the event log rather than the paper
/// metadata file and is not always available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaperFacts<F> {
    pub submission_day: i64,
    pub citations: u64,
    pub impact_factor: F,
    pub downloads: Option<u64>,
}

/// Mean and standard error of each external metric over the top-k papers of
/// a ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct TopKReport<F> {
    /// Number of papers actually summarized (the requested k, unless the
    /// ranking was shorter).
    pub k: usize,
    pub submission_day: MetricSummary<F>,
    /// Missing when any selected paper lacks a download count.
    pub downloads: Option<MetricSummary<F>>,
    pub citations: MetricSummary<F>,
    pub impact_factor: MetricSummary<F>,
    /// Set when k = 1, where a standard error is not estimable and reported
    /// as 0 by convention.
    pub singleton: bool,
}

/// Summarize the first `k` entries of `ranked` against `facts` (indexed by
/// paper id). Every selected paper must have a facts record.
pub fn top_k_report<F: Scalar>(
    ranked: &[usize],
    facts: &[Option<PaperFacts<F>>],
    k: usize,
) -> Result<TopKReport<F>, EvalError> {
    let take = k.min(ranked.len());
    if take == 0 {
        return Err(EvalError::EmptySample { which: "ranking" });
    }
    let mut days = Vec::with_capacity(take);
    let mut downloads: Option<Vec<F>> = Some(Vec::with_capacity(take));
    let mut citations = Vec::with_capacity(take);
    let mut impact = Vec::with_capacity(take);
    for &paper in &ranked[..take] {
        let record = facts
            .get(paper)
            .and_then(|r| r.as_ref())
            .ok_or(EvalError::MissingMetadata { paper })?;
        days.push(F::from_f64_lossy(record.submission_day as f64));
        citations.push(F::from_f64_lossy(record.citations as f64));
        impact.push(record.impact_factor);
        match (&mut downloads, record.downloads) {
            (Some(list), Some(d)) => list.push(F::from_f64_lossy(d as f64)),
            _ => downloads = None,
        }
    }
    Ok(TopKReport {
        k: take,
        submission_day: summarize(&days),
        downloads: downloads.as_deref().map(summarize),
        citations: summarize(&citations),
        impact_factor: summarize(&impact),
        singleton: take == 1,
    })
}

/// Sidedness of the Mann-Whitney test, phrased for the first sample:
/// [`Alternative::Less`] asks whether sample A tends to *smaller* values than
/// sample B.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    TwoSided,
    Less,
    Greater,
}

/// How the p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PvalueMethod {
    /// Exact permutation distribution of U (counts every subset).
    Exact,
    /// Normal approximation with tie correction and continuity correction.
    NormalApproximation,
}

/// Mann-Whitney result. `u` is the U statistic of the first sample
/// (`U_a = R_a - n_a(n_a+1)/2` from midranks).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MwuResult<F> {
    pub u: F,
    pub p: F,
    pub method: PvalueMethod,
}

/// Exact enumeration is used when either side has fewer than 8 observations;
/// both sides at 8 or more switch to the normal approximation. (The exact
/// path additionally requires the pooled size to stay within
/// [`EXACT_POOL_LIMIT`], beyond which subset counts stop being exactly
/// representable; such lopsided inputs fall back to the approximation.)
pub fn mann_whitney_u<F: Scalar>(
    a: &[F],
    b: &[F],
    alternative: Alternative,
) -> Result<MwuResult<F>, EvalError> {
    let exact = a.len().min(b.len()) < 8 && a.len() + b.len() <= EXACT_POOL_LIMIT;
    let method = if exact {
        PvalueMethod::Exact
    } else {
        PvalueMethod::NormalApproximation
    };
    mann_whitney_u_with_method(a, b, alternative, method)
}

/// Pooled-size cap for the exact method: subset counts up to C(n, 7) stay
/// below 2^53 (exactly representable) through n = 200, and the tabulation
/// stays small.
pub const EXACT_POOL_LIMIT: usize = 200;

/// [`mann_whitney_u`] with the p-value method forced, mainly for calibrating
/// the approximation against the exact distribution.
pub fn mann_whitney_u_with_method<F: Scalar>(
    a: &[F],
    b: &[F],
    alternative: Alternative,
    method: PvalueMethod,
) -> Result<MwuResult<F>, EvalError> {
    if a.is_empty() {
        return Err(EvalError::EmptySample { which: "first" });
    }
    if b.is_empty() {
        return Err(EvalError::EmptySample { which: "second" });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite { which: "first" });
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite { which: "second" });
    }

    let n_a = a.len();
    let n_b = b.len();
    let n = n_a + n_b;

    // Midranks over the pooled sample, kept as doubled integers so ties stay
    // exact: a group of equal values spanning sorted positions i..=j (0-based)
    // all get doubled midrank i + j + 2.
    let mut order: Vec<usize> = (0..n).collect();
    let value = |i: usize| -> f64 {
        if i < n_a {
            a[i].to_f64_lossy()
        } else {
            b[i - n_a].to_f64_lossy()
        }
    };
    order.sort_by(|&i, &j| value(i).partial_cmp(&value(j)).expect("finite values"));
    let mut doubled_rank = vec![0u64; n];
    let mut tie_sizes: Vec<u64> = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && value(order[end + 1]) == value(order[start]) {
            end += 1;
        }
        for &idx in &order[start..=end] {
            doubled_rank[idx] = (start + end + 2) as u64;
        }
        tie_sizes.push((end - start + 1) as u64);
        start = end + 1;
    }

    let doubled_rank_sum_a: u64 = doubled_rank[..n_a].iter().sum();
    // U_a in doubled units: 2*U_a = 2*R_a - n_a(n_a+1).
    let u2_obs = doubled_rank_sum_a as i64 - (n_a * (n_a + 1)) as i64;
    let u = F::from_f64_lossy(u2_obs as f64 / 2.0);

    let p = match method {
        PvalueMethod::Exact => exact_p(&doubled_rank, n_a, n_b, u2_obs, alternative),
        PvalueMethod::NormalApproximation => {
            normal_p(u2_obs as f64 / 2.0, n_a, n_b, &tie_sizes, alternative)
        }
    };
    Ok(MwuResult {
        u,
        p: F::from_f64_lossy(p),
        method,
    })
}

/// Exact permutation p-value: tabulate, over all subsets of the pooled
/// midranks with the size of the smaller sample, how many reach each rank
/// sum, then read off the tail(s) containing the observed U. Counts are exact
/// integers in f64 up to the [`EXACT_POOL_LIMIT`] guard.
fn exact_p(
    doubled_rank: &[u64],
    n_a: usize,
    n_b: usize,
    u2_obs: i64,
    alternative: Alternative,
) -> f64 {
    let total_sum: u64 = doubled_rank.iter().sum(); // = n(n+1) for n pooled values
    let m = n_a.min(n_b);

    // counts[j][s] = number of j-subsets of the pooled doubled ranks with sum s
    let mut counts = vec![vec![0.0f64; total_sum as usize + 1]; m + 1];
    counts[0][0] = 1.0;
    for &r in doubled_rank {
        for j in (1..=m).rev() {
            for s in (r as usize..=total_sum as usize).rev() {
                let from = counts[j - 1][s - r as usize];
                if from > 0.0 {
                    counts[j][s] += from;
                }
            }
        }
    }
    let dist = &counts[m];
    let mu2 = (n_a * n_b) as i64; // mean of 2*U_a

    // Convert a smaller-side rank sum s into the first sample's doubled U.
    let u2_of = |s: usize| -> i64 {
        if n_a <= n_b {
            s as i64 - (n_a * (n_a + 1)) as i64
        } else {
            // enumerated the complement: sample A holds the remaining ranks
            (total_sum as i64 - s as i64) - (n_a * (n_a + 1)) as i64
        }
    };

    let mut matched = 0.0;
    let mut total = 0.0;
    let dev_obs = (u2_obs - mu2).abs();
    for (s, &count) in dist.iter().enumerate() {
        if count == 0.0 {
            continue;
        }
        total += count;
        let u2 = u2_of(s);
        let hit = match alternative {
            Alternative::TwoSided => (u2 - mu2).abs() >= dev_obs,
            Alternative::Less => u2 <= u2_obs,
            Alternative::Greater => u2 >= u2_obs,
        };
        if hit {
            matched += count;
        }
    }
    matched / total
}

/// Normal approximation with tie-corrected variance and a 0.5 continuity
/// correction. A pooled sample that is one single tie group has zero variance
/// and carries no evidence: p = 1.
fn normal_p(u: f64, n_a: usize, n_b: usize, tie_sizes: &[u64], alternative: Alternative) -> f64 {
    let na = n_a as f64;
    let nb = n_b as f64;
    let n = na + nb;
    let mu = na * nb / 2.0;
    let tie_term: f64 = tie_sizes.iter().map(|&t| (t * t * t - t) as f64).sum();
    let variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        return 1.0;
    }
    let sigma = variance.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let p = match alternative {
        Alternative::TwoSided => {
            let z = ((u - mu).abs() - 0.5).max(0.0) / sigma;
            2.0 * (1.0 - normal.cdf(z))
        }
        Alternative::Less => normal.cdf((u - mu + 0.5) / sigma),
        Alternative::Greater => 1.0 - normal.cdf((u - mu - 0.5) / sigma),
    };
    p.clamp(0.0, 1.0)
}

/// Descending-cumulative degree table: for each degree value present, the
/// fraction of nodes with at least that degree. Nodes of degree 0 are left
/// out entirely (they are invisible on the usual log-log plot and would only
/// rescale the fractions).
pub fn cumulative_degree_distribution<F: Scalar>(degrees: &[usize]) -> Vec<(usize, F)> {
    let mut counts = std::collections::BTreeMap::<usize, usize>::new();
    for &d in degrees {
        if d > 0 {
            *counts.entry(d).or_insert(0) += 1;
        }
    }
    let total: usize = counts.values().sum();
    if total == 0 {
        return Vec::new();
    }
    let total_f = F::from_usize_lossy(total);
    let mut remaining = total;
    let mut table = Vec::with_capacity(counts.len());
    for (&degree, &count) in &counts {
        table.push((degree, F::from_usize_lossy(remaining) / total_f));
        remaining -= count;
    }
    table
}
