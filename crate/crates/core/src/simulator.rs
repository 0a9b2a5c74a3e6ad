//! Agent-based generator of benchmark networks with known ground truth.
//!
//! `N` users carry two hidden traits drawn from the density `p(x) = mu *
//! x^(mu-1)` on (0, 1]: *ability* (how good their uploads are, and how
//! selectively they download) and *activity* (how often they act). The system
//! evolves in discrete steps. Each step, every user independently wakes with
//! probability equal to their activity; an awake user uploads a fresh item
//! with probability `upload_prob` (fitness `a + (1-a)*x`, `x ~ U[0, X]`,
//! linking uploader and item at weight `w_up`) and then downloads
//! `downloads_per_step` items they have not touched before, picked with
//! probability proportional to `fitness^(selectivity * ability)` at weight
//! `w_down`.
//!
//! Items become downloadable the step *after* creation: every step works
//! against a catalog snapshot taken at its start, so the outcome does not
//! depend on the order users are visited within a step.
//!
//! Everything is driven by one seeded ChaCha stream — identical config and
//! seed give a bit-identical [`SimResult`] on every platform.

use rand::distr::{Distribution, StandardUniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ingestion::Action;
use crate::network::UserItemNetwork;
use crate::scalar::Scalar;

/// Invalid generator parameters.
#[derive(Debug, Error, PartialEq)]
#[error("simulation parameter {name} = {value} must satisfy {requirement}")]
pub struct SimError {
    pub name: &'static str,
    pub value: f64,
    pub requirement: &'static str,
}

/// Generator parameters. [`Default`] gives the benchmark configuration:
/// 1000 users, `mu = 0.5`, fitness headroom `X = 0.5`, selectivity `h = 5`,
/// upload probability 0.1, 200 steps, weights 1 / 0.1, two downloads per
/// active step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig<F> {
    /// Number of users `N` (fixed for the whole run).
    pub n_users: usize,
    /// Shape of the ability/activity density `p(x) = mu * x^(mu-1)`, in (0, 1].
    pub mu: F,
    /// Upper bound `X` of the uniform fitness boost above the uploader's
    /// ability, in [0, 1].
    pub fitness_spread: F,
    /// Download selectivity exponent `h > 0`: an ability-`a` user picks items
    /// proportionally to `fitness^(h*a)`.
    pub selectivity: F,
    /// Probability that an awake user uploads this step, in [0, 1].
    pub upload_prob: F,
    /// Number of time steps `t`.
    pub steps: usize,
    /// Link weight of an upload (> 0).
    pub w_up: F,
    /// Link weight of a download (> 0).
    pub w_down: F,
    /// Downloads attempted per active user per step.
    pub downloads_per_step: usize,
    /// RNG seed; the only source of randomness.
    pub seed: u64,
}

impl<F: Scalar> Default for SimConfig<F> {
    fn default() -> Self {
        SimConfig {
            n_users: 1000,
            mu: F::from_f64_lossy(0.5),
            fitness_spread: F::from_f64_lossy(0.5),
            selectivity: F::from_f64_lossy(5.0),
            upload_prob: F::from_f64_lossy(0.1),
            steps: 200,
            w_up: F::one(),
            w_down: F::from_f64_lossy(0.1),
            downloads_per_step: 2,
            seed: 0,
        }
    }
}

impl<F: Scalar> SimConfig<F> {
    pub fn validate(&self) -> Result<(), SimError> {
        let err = |name, value: F, requirement| {
            Err(SimError {
                name,
                value: value.to_f64_lossy(),
                requirement,
            })
        };
        if !(self.mu > F::zero() && self.mu <= F::one()) {
            return err("mu", self.mu, "0 < mu <= 1");
        }
        if !(self.fitness_spread >= F::zero() && self.fitness_spread <= F::one()) {
            return err("fitness_spread", self.fitness_spread, "0 <= X <= 1");
        }
        if !(self.selectivity > F::zero()) || !self.selectivity.is_finite() {
            return err("selectivity", self.selectivity, "h > 0");
        }
        if !(self.upload_prob >= F::zero() && self.upload_prob <= F::one()) {
            return err("upload_prob", self.upload_prob, "0 <= p <= 1");
        }
        if !(self.w_up > F::zero()) || !self.w_up.is_finite() {
            return err("w_up", self.w_up, "w_up > 0");
        }
        if !(self.w_down > F::zero()) || !self.w_down.is_finite() {
            return err("w_down", self.w_down, "w_down > 0");
        }
        Ok(())
    }

    /// Download-to-upload weight ratio; the one weight combination the
    /// ranking algorithms actually respond to (scaling both weights together
    /// never changes a ranking).
    pub fn weight_ratio(&self) -> F {
        self.w_down / self.w_up
    }
}

/// The hidden variables behind a generated network, for scoring estimates
/// against the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth<F> {
    /// Per-user ability in (0, 1].
    pub ability: Vec<F>,
    /// Per-user activity in (0, 1].
    pub activity: Vec<F>,
    /// Per-item intrinsic fitness, inside `[a_up, a_up + (1-a_up)*X]` of its
    /// uploader.
    pub fitness: Vec<F>,
    /// Step at which each item appeared.
    pub created_at: Vec<usize>,
    /// User who uploaded each item.
    pub uploader: Vec<usize>,
}

/// One interaction, in chronological order of occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimEvent {
    pub step: usize,
    pub user: usize,
    pub item: usize,
    pub action: Action,
}

/// A generated benchmark: the weighted network, the ground truth, and the
/// raw event log (uploads at weight `w_up`, downloads at `w_down`).
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult<F> {
    pub network: UserItemNetwork<F>,
    pub truth: GroundTruth<F>,
    pub events: Vec<SimEvent>,
    /// Degeneracy notes (e.g. the run produced no interactions at all).
    pub warnings: Vec<String>,
}

/// One draw from the trait density `p(x) = mu * x^(mu-1)` on (0, 1], by
/// inverse CDF: `x = u^(1/mu)` with `u` uniform on (0, 1].
pub fn sample_trait<F, R>(mu: F, rng: &mut R) -> F
where
    F: Scalar,
    R: Rng + ?Sized,
    StandardUniform: Distribution<F>,
{
    // random() is uniform on [0, 1); reflect to (0, 1] so x never lands on 0.
    let u = F::one() - rng.random::<F>();
    u.powf(mu.recip())
}

/// Fitness of a fresh item: the uploader's ability plus a uniform boost into
/// the remaining headroom, `f = a + (1-a) * x` with `x ~ U[0, X]`.
pub fn item_fitness<F, R>(ability: F, fitness_spread: F, rng: &mut R) -> F
where
    F: Scalar,
    R: Rng + ?Sized,
    StandardUniform: Distribution<F>,
{
    let x = rng.random::<F>() * fitness_spread;
    ability + (F::one() - ability) * x
}

/// Pick one index with probability proportional to its weight, or `None` when
/// no weight is positive. Consumes exactly one random number when a draw is
/// possible, none otherwise.
fn draw_weighted<F, R>(weights: &[F], rng: &mut R) -> Option<usize>
where
    F: Scalar,
    R: Rng + ?Sized,
    StandardUniform: Distribution<F>,
{
    let total: F = weights.iter().copied().sum();
    if !(total > F::zero()) {
        return None;
    }
    let target = rng.random::<F>() * total;
    let mut acc = F::zero();
    let mut last_positive = None;
    for (index, &w) in weights.iter().enumerate() {
        if w > F::zero() {
            acc += w;
            last_positive = Some(index);
            if target < acc {
                return Some(index);
            }
        }
    }
    last_positive // rounding pushed the target past the final bin
}

/// Choose up to `count` distinct catalog items for a user, each draw
/// proportional to `fitness^(selectivity * ability)` over the remaining
/// candidates (sequential draws renormalize implicitly). Items listed in
/// `already_linked` are never offered; fewer than `count` results means the
/// candidate pool ran dry. Zero-ability users pick uniformly — including
/// items of fitness 0, via the `0^0 = 1` convention.
pub fn select_downloads<F, R>(
    fitness: &[F],
    already_linked: &[usize],
    ability: F,
    selectivity: F,
    count: usize,
    rng: &mut R,
) -> Vec<usize>
where
    F: Scalar,
    R: Rng + ?Sized,
    StandardUniform: Distribution<F>,
{
    let exponent = selectivity * ability;
    let mut weights: Vec<F> = fitness
        .iter()
        .map(|&f| {
            if exponent == F::zero() {
                F::one()
            } else {
                f.powf(exponent)
            }
        })
        .collect();
    for &item in already_linked {
        if item < weights.len() {
            weights[item] = F::zero();
        }
    }
    let mut picks = Vec::with_capacity(count);
    for _ in 0..count {
        match draw_weighted(&weights, rng) {
            Some(pick) => {
                weights[pick] = F::zero();
                picks.push(pick);
            }
            None => break,
        }
    }
    picks
}

/// Run the full generator. See the module docs for the step semantics.
///
/// Degenerate configurations (zero steps, zero users, an upload probability
/// of 0 with an empty starting catalog) are not errors; they produce an empty
/// network and a warning in the result.
pub fn run_simulation<F>(config: &SimConfig<F>) -> Result<SimResult<F>, SimError>
where
    F: Scalar,
    StandardUniform: Distribution<F>,
{
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_users = config.n_users;

    let ability: Vec<F> = (0..n_users)
        .map(|_| sample_trait(config.mu, &mut rng))
        .collect();
    let activity: Vec<F> = (0..n_users)
        .map(|_| sample_trait(config.mu, &mut rng))
        .collect();

    let mut fitness: Vec<F> = Vec::new();
    let mut ln_fitness: Vec<F> = Vec::new(); // cached for the weight kernel below
    let mut created_at: Vec<usize> = Vec::new();
    let mut uploader: Vec<usize> = Vec::new();
    let mut linked: Vec<Vec<u32>> = vec![Vec::new(); n_users];
    let mut events: Vec<SimEvent> = Vec::new();
    let mut weights: Vec<F> = Vec::new();

    for step in 0..config.steps {
        // Catalog snapshot: items uploaded during this step only become
        // downloadable in the next one.
        let downloadable = fitness.len();
        for user in 0..n_users {
            if !(rng.random::<F>() < activity[user]) {
                continue;
            }
            if rng.random::<F>() < config.upload_prob {
                let item = fitness.len();
                let f = item_fitness(ability[user], config.fitness_spread, &mut rng);
                fitness.push(f);
                // f = 0 has probability zero but would ln() to -inf, which the
                // exp() below correctly turns back into weight 0.
                ln_fitness.push(f.ln());
                created_at.push(step);
                uploader.push(user);
                linked[user].push(item as u32);
                events.push(SimEvent {
                    step,
                    user,
                    item,
                    action: Action::Upload,
                });
            }
            if downloadable == 0 || config.downloads_per_step == 0 {
                continue;
            }
            // fitness^(h*a) over the snapshot, minus everything already linked
            let exponent = config.selectivity * ability[user];
            weights.clear();
            if exponent == F::zero() {
                weights.resize(downloadable, F::one());
            } else {
                weights.extend(
                    ln_fitness[..downloadable]
                        .iter()
                        .map(|&lf| (exponent * lf).exp()),
                );
            }
            for &item in &linked[user] {
                if (item as usize) < downloadable {
                    weights[item as usize] = F::zero();
                }
            }
            for _ in 0..config.downloads_per_step {
                let Some(pick) = draw_weighted(&weights, &mut rng) else {
                    break;
                };
                weights[pick] = F::zero();
                linked[user].push(pick as u32);
                events.push(SimEvent {
                    step,
                    user,
                    item: pick,
                    action: Action::Download,
                });
            }
        }
    }

    let edges: Vec<(usize, usize, F)> = events
        .iter()
        .map(|e| {
            let weight = match e.action {
                Action::Upload => config.w_up,
                Action::Download => config.w_down,
                Action::View => unreachable!("the generator only uploads and downloads"),
            };
            (e.user, e.item, weight)
        })
        .collect();
    let network = UserItemNetwork::with_shape(n_users, fitness.len(), &edges)
        .expect("generator links each (user, item) pair at most once");

    let mut warnings = Vec::new();
    if events.is_empty() {
        warnings.push(
            "simulation produced no interactions (degenerate steps/activity/upload settings)"
                .to_string(),
        );
    }

    Ok(SimResult {
        network,
        truth: GroundTruth {
            ability,
            activity,
            fitness,
            created_at,
            uploader,
        },
        events,
        warnings,
    })
}
