//! The four ranking algorithms as fixed-point iterations.
//!
//! All of them repeat the same cycle: recompute each score vector from the
//! previous sweep's values (Jacobi order — reputation, then author credit,
//! then quality, every update reading only the last sweep), L2-normalize
//! every vector, and stop once the summed absolute change across all vector
//! elements drops below the tolerance.
//!
//! * [`bihits`] — mutual reinforcement `R = W Q`, `Q = W^T R` (or the binary
//!   adjacency when `weighted` is off).
//! * [`qr`] — adds per-node degree damping `deg^-theta` and subtraction of a
//!   fraction `rho` of the opposite side's mean score.
//! * [`eigenrumor`] — couples an author-credit vector into quality with
//!   mixing weight `omega`, on sqrt-degree-normalized views of both graphs.
//! * [`qrc`] — the QR update plus an author-credit vector mixed into quality
//!   with weight `lambda`, on the raw weighted graphs.
//!
//! Non-convergence is an expected outcome for some parameter choices, so it
//! is reported in [`ScoreSet::converged`] rather than raised as an error.

use thiserror::Error;

use crate::network::{AuthorPaperNetwork, ScoreVector, Side, UserItemNetwork};
use crate::scalar::Scalar;

/// Errors raised before iteration starts; never for failure to converge.
#[derive(Debug, Error, PartialEq)]
pub enum AlgorithmError {
    #[error("network has no edges to rank")]
    EmptyNetwork,
    #[error(
        "user-item network has {items} items but the authorship network covers {papers} papers"
    )]
    PaperCountMismatch { items: usize, papers: usize },
    #[error("authorship network has no authors")]
    NoAuthors,
    #[error("parameter {name} = {value} is outside [{min}, {max}]")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
}

fn check_unit_range<F: Scalar>(name: &'static str, value: F) -> Result<(), AlgorithmError> {
    if value >= F::zero() && value <= F::one() {
        Ok(())
    } else {
        Err(AlgorithmError::ParameterOutOfRange {
            name,
            value: value.to_f64_lossy(),
            min: 0.0,
            max: 1.0,
        })
    }
}

/// Degree exponents and mean-shift strengths of the QR update.
///
/// `theta_q`/`theta_r` damp quality/reputation by the receiving node's
/// degree; `rho_q`/`rho_r` subtract that fraction of the mean quality and
/// reputation inside the opposite update. All zeros recovers weighted biHITS.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QrParams<F> {
    pub theta_q: F,
    pub theta_r: F,
    pub rho_q: F,
    pub rho_r: F,
}

impl<F: Scalar> QrParams<F> {
    pub fn new(theta_q: F, theta_r: F, rho_q: F, rho_r: F) -> Result<Self, AlgorithmError> {
        let params = QrParams {
            theta_q,
            theta_r,
            rho_q,
            rho_r,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), AlgorithmError> {
        check_unit_range("theta_q", self.theta_q)?;
        check_unit_range("theta_r", self.theta_r)?;
        check_unit_range("rho_q", self.rho_q)?;
        check_unit_range("rho_r", self.rho_r)
    }
}

/// QR parameters extended with the author-credit coupling.
///
/// `phi_a` damps credit by the author's paper count, `phi_p` damps the credit
/// flowing back into a paper by its author count, `rho_a` is the credit
/// mean-shift (0 by default: the shift enters oddly — it subtracts the mean
/// credit from item quality inside the credit update — and nothing in the
/// evaluated configurations exercises it). `lambda` mixes author credit into
/// item quality: 0 ignores authors entirely, 1 ranks papers by authors alone.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QrcParams<F> {
    pub qr: QrParams<F>,
    pub phi_a: F,
    pub phi_p: F,
    pub rho_a: F,
    pub lambda: F,
}

impl<F: Scalar> QrcParams<F> {
    pub fn new(
        qr: QrParams<F>,
        phi_a: F,
        phi_p: F,
        rho_a: F,
        lambda: F,
    ) -> Result<Self, AlgorithmError> {
        let params = QrcParams {
            qr,
            phi_a,
            phi_p,
            rho_a,
            lambda,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), AlgorithmError> {
        self.qr.validate()?;
        check_unit_range("phi_a", self.phi_a)?;
        check_unit_range("phi_p", self.phi_p)?;
        check_unit_range("rho_a", self.rho_a)?;
        check_unit_range("lambda", self.lambda)
    }
}

/// Stopping rule for the fixed-point loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceConfig<F> {
    /// Stop once the summed absolute per-element change of all score vectors
    /// in one sweep falls below this.
    pub tolerance: F,
    /// Give up (with `converged = false`) after this many sweeps.
    pub max_iterations: usize,
}

impl<F: Scalar> Default for ConvergenceConfig<F> {
    fn default() -> Self {
        ConvergenceConfig {
            tolerance: F::from_f64_lossy(1e-8),
            max_iterations: 10_000,
        }
    }
}

impl<F: Scalar> ConvergenceConfig<F> {
    pub fn new(tolerance: F, max_iterations: usize) -> Result<Self, AlgorithmError> {
        if !(tolerance > F::zero()) || !tolerance.is_finite() {
            return Err(AlgorithmError::ParameterOutOfRange {
                name: "tolerance",
                value: tolerance.to_f64_lossy(),
                min: f64::MIN_POSITIVE,
                max: f64::MAX,
            });
        }
        if max_iterations == 0 {
            return Err(AlgorithmError::ParameterOutOfRange {
                name: "max_iterations",
                value: 0.0,
                min: 1.0,
                max: usize::MAX as f64,
            });
        }
        Ok(ConvergenceConfig {
            tolerance,
            max_iterations,
        })
    }
}

/// Result of one algorithm run: the score vectors plus convergence
/// diagnostics. On success every vector has unit L2 norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet<F> {
    /// Per-user reputation `R`.
    pub reputation: ScoreVector<F>,
    /// Per-item quality `Q`.
    pub quality: ScoreVector<F>,
    /// Per-author credit `A`; present only for the author-aware algorithms.
    pub credit: Option<ScoreVector<F>>,
    /// Completed sweeps.
    pub iterations: usize,
    /// Whether the residual dropped below the tolerance.
    pub converged: bool,
    /// Summed absolute change of all vector elements in the last sweep.
    pub residual: F,
    /// Non-fatal diagnostics (e.g. the input network was disconnected).
    pub warnings: Vec<String>,
}

impl<F: Scalar> ScoreSet<F> {
    /// Fresh uniform-unit state, the standard initialization of all four
    /// algorithms: every entry `1/sqrt(side length)`.
    pub fn uniform_init(n_users: usize, n_items: usize, n_authors: Option<usize>) -> Self {
        ScoreSet {
            reputation: ScoreVector::uniform_unit(Side::User, n_users),
            quality: ScoreVector::uniform_unit(Side::Item, n_items),
            credit: n_authors.map(|o| ScoreVector::uniform_unit(Side::Author, o)),
            iterations: 0,
            converged: false,
            residual: F::infinity(),
            warnings: Vec::new(),
        }
    }
}

/// Normalize `next` to unit L2 norm, flip its sign if it points away from
/// `prev` (suppresses period-2 sign oscillation without affecting rankings),
/// and add the element-wise absolute change to `residual`.
fn normalize_and_diff<F: Scalar>(prev: &[F], next: &mut [F], residual: &mut F) {
    let norm = next.iter().map(|&v| v * v).sum::<F>().sqrt();
    if norm > F::zero() {
        for v in next.iter_mut() {
            *v /= norm;
        }
    }
    let mut dot = F::zero();
    for (&p, &n) in prev.iter().zip(next.iter()) {
        dot += p * n;
    }
    if dot < F::zero() {
        for v in next.iter_mut() {
            *v = -*v;
        }
    }
    for (&p, &n) in prev.iter().zip(next.iter()) {
        *residual += (n - p).abs();
    }
}

/// Run `update` to a fixed point under the shared protocol: Jacobi sweeps,
/// per-sweep L2 normalization and sign stabilization of every vector, and the
/// summed-absolute-change stopping rule.
///
/// `update` receives the previous sweep's (normalized) state and returns the
/// raw next vectors; only the vectors of its return value are used. The
/// vectors of `init` should be unit norm (use [`ScoreSet::uniform_init`]).
/// Hitting `max_iterations` is reported via `converged = false`, never as an
/// error — some parameter settings genuinely do not converge and that is a
/// result in itself.
pub fn fixed_point_iterate<F, U>(
    init: ScoreSet<F>,
    config: &ConvergenceConfig<F>,
    mut update: U,
) -> ScoreSet<F>
where
    F: Scalar,
    U: FnMut(&ScoreSet<F>) -> ScoreSet<F>,
{
    let mut state = init;
    state.iterations = 0;
    state.converged = false;
    state.residual = F::infinity();
    for sweep in 1..=config.max_iterations {
        let mut next = update(&state);
        debug_assert_eq!(next.reputation.len(), state.reputation.len());
        debug_assert_eq!(next.quality.len(), state.quality.len());
        debug_assert_eq!(next.credit.is_some(), state.credit.is_some());

        let mut residual = F::zero();
        normalize_and_diff(
            state.reputation.values(),
            next.reputation.values_mut(),
            &mut residual,
        );
        normalize_and_diff(
            state.quality.values(),
            next.quality.values_mut(),
            &mut residual,
        );
        if let (Some(prev), Some(new)) = (&state.credit, &mut next.credit) {
            normalize_and_diff(prev.values(), new.values_mut(), &mut residual);
        }

        state.reputation = next.reputation;
        state.quality = next.quality;
        state.credit = next.credit;
        state.iterations = sweep;
        state.residual = residual;
        if residual < config.tolerance {
            state.converged = true;
            break;
        }
    }
    state
}

fn check_user_item<F: Scalar>(net: &UserItemNetwork<F>) -> Result<(), AlgorithmError> {
    if net.n_users() == 0 || net.n_items() == 0 || net.edge_count() == 0 {
        Err(AlgorithmError::EmptyNetwork)
    } else {
        Ok(())
    }
}

fn check_author_paper<F: Scalar>(
    net: &UserItemNetwork<F>,
    authorship: &AuthorPaperNetwork<F>,
) -> Result<(), AlgorithmError> {
    if authorship.n_papers() != net.n_items() {
        return Err(AlgorithmError::PaperCountMismatch {
            items: net.n_items(),
            papers: authorship.n_papers(),
        });
    }
    if authorship.n_authors() == 0 {
        return Err(AlgorithmError::NoAuthors);
    }
    Ok(())
}

/// Shared two-vector engine behind [`bihits`] and [`qr`]. The caller has
/// already validated the network and parameters.
fn qr_fixed_point<F: Scalar>(
    net: &UserItemNetwork<F>,
    params: &QrParams<F>,
    config: &ConvergenceConfig<F>,
) -> ScoreSet<F> {
    let mut init = ScoreSet::uniform_init(net.n_users(), net.n_items(), None);
    if !net.is_connected() {
        init.warnings.push(
            "user-item network is disconnected; the fixed point may depend on the initialization"
                .to_string(),
        );
    }
    fixed_point_iterate(init, config, |state| {
        let quality_mean = state.quality.mean();
        let reputation_mean = state.reputation.mean();
        let reputation = net
            .aggregate(
                &state.quality,
                Side::User,
                params.theta_r,
                params.rho_q,
                quality_mean,
            )
            .expect("validated shapes");
        let quality = net
            .aggregate(
                &state.reputation,
                Side::Item,
                params.theta_q,
                params.rho_r,
                reputation_mean,
            )
            .expect("validated shapes");
        ScoreSet {
            reputation,
            quality,
            ..state.clone()
        }
    })
}

/// Mutually reinforcing reputation/quality scores: `R = W Q`, `Q = W^T R`
/// with per-sweep normalization, on the weighted matrix or (with `weighted`
/// off) the binary adjacency.
///
/// A disconnected network is accepted but annotated with a warning, since the
/// fixed point is then not guaranteed unique.
pub fn bihits<F: Scalar>(
    net: &UserItemNetwork<F>,
    weighted: bool,
    config: &ConvergenceConfig<F>,
) -> Result<ScoreSet<F>, AlgorithmError> {
    check_user_item(net)?;
    let params = QrParams::default();
    if weighted {
        Ok(qr_fixed_point(net, &params, config))
    } else {
        Ok(qr_fixed_point(&net.unweighted_view(), &params, config))
    }
}

/// The degree-damped, mean-shifted generalization of [`bihits`]:
///
/// ```text
/// R_i = k_i^(-theta_r)     * sum_a w_ia * (Q_a - rho_q * mean(Q))
/// Q_a = k_a^(-theta_q)     * sum_i w_ia * (R_i - rho_r * mean(R))
/// ```
///
/// Means are recomputed from the current iterate each sweep. With all
/// parameters zero this is exactly weighted biHITS (same code path). Some
/// settings — notably `(0,1,1,1)` on heavy-tailed data — do not converge;
/// that comes back as `converged = false`.
pub fn qr<F: Scalar>(
    net: &UserItemNetwork<F>,
    params: &QrParams<F>,
    config: &ConvergenceConfig<F>,
) -> Result<ScoreSet<F>, AlgorithmError> {
    params.validate()?;
    check_user_item(net)?;
    Ok(qr_fixed_point(net, params, config))
}

/// Author-coupled ranking on sqrt-degree-normalized views:
///
/// ```text
/// R = W' Q          A = P' Q          Q = omega * P'^T A + (1 - omega) * W'^T R
/// ```
///
/// where `W'` divides each weight by `sqrt(k_user)` and `P'` each link by
/// `sqrt(d_author)`. At `omega = 0` this is biHITS on `W'`, and credit is a
/// single readout `A = P' Q` at the fixed point (reported normalized).
pub fn eigenrumor<F: Scalar>(
    net: &UserItemNetwork<F>,
    authorship: &AuthorPaperNetwork<F>,
    omega: F,
    config: &ConvergenceConfig<F>,
) -> Result<ScoreSet<F>, AlgorithmError> {
    check_unit_range("omega", omega)?;
    check_user_item(net)?;
    check_author_paper(net, authorship)?;
    let half = F::from_f64_lossy(0.5);
    let w = net.normalized_view(half);
    let p = authorship.normalized_view(half);

    if omega == F::zero() {
        let mut result = qr_fixed_point(&w, &QrParams::default(), config);
        result.credit = Some(credit_readout(&p, &result.quality, F::zero(), F::zero()));
        return Ok(result);
    }

    let init = ScoreSet::uniform_init(net.n_users(), net.n_items(), Some(authorship.n_authors()));
    let one_minus = F::one() - omega;
    Ok(fixed_point_iterate(init, config, |state| {
        let reputation = w
            .aggregate(&state.quality, Side::User, F::zero(), F::zero(), F::zero())
            .expect("validated shapes");
        let credit = p
            .aggregate(
                &state.quality,
                Side::Author,
                F::zero(),
                F::zero(),
                F::zero(),
            )
            .expect("validated shapes");
        let prev_credit = state.credit.as_ref().expect("credit initialized");
        let from_authors = p
            .aggregate(prev_credit, Side::Item, F::zero(), F::zero(), F::zero())
            .expect("validated shapes");
        let from_users = w
            .aggregate(
                &state.reputation,
                Side::Item,
                F::zero(),
                F::zero(),
                F::zero(),
            )
            .expect("validated shapes");
        let quality = mix(omega, &from_authors, one_minus, &from_users);
        ScoreSet {
            reputation,
            quality,
            credit: Some(credit),
            ..state.clone()
        }
    }))
}

/// The QR update extended with an author-credit vector on the raw graphs:
///
/// ```text
/// R_i = k_i^(-theta_r) * sum_a w_ia * (Q_a - rho_q * mean(Q))
/// A_m = d_m^(-phi_a)   * sum_a p_ma * (Q_a - rho_a * mean(A))
/// Q_a = (1 - lambda) * k_a^(-theta_q) * sum_i w_ia * (R_i - rho_r * mean(R))
///       +     lambda * d_a^(-phi_p)   * sum_m p_ma * A_m
/// ```
///
/// Papers without author metadata simply receive no credit term. At
/// `lambda = 0` the reputation/quality pair is computed by the plain QR run
/// (bit-identical result and iteration count) and credit becomes a one-shot
/// readout of the top equation at the QR fixed point, evaluated from the
/// uniform initial credit and then normalized.
pub fn qrc<F: Scalar>(
    net: &UserItemNetwork<F>,
    authorship: &AuthorPaperNetwork<F>,
    params: &QrcParams<F>,
    config: &ConvergenceConfig<F>,
) -> Result<ScoreSet<F>, AlgorithmError> {
    params.validate()?;
    check_user_item(net)?;
    check_author_paper(net, authorship)?;

    if params.lambda == F::zero() {
        let mut result = qr_fixed_point(net, &params.qr, config);
        // mean(A) of the uniform unit initialization, the value the coupled
        // iteration would have seen on its first credit sweep
        let uniform_mean = F::from_usize_lossy(authorship.n_authors()).sqrt().recip();
        let shift = params.rho_a * uniform_mean;
        result.credit = Some(credit_readout(
            authorship,
            &result.quality,
            params.phi_a,
            shift,
        ));
        return Ok(result);
    }

    let init = ScoreSet::uniform_init(net.n_users(), net.n_items(), Some(authorship.n_authors()));
    let lambda = params.lambda;
    let one_minus = F::one() - lambda;
    let qr_params = params.qr;
    Ok(fixed_point_iterate(init, config, |state| {
        let quality_mean = state.quality.mean();
        let reputation_mean = state.reputation.mean();
        let prev_credit = state.credit.as_ref().expect("credit initialized");
        let credit_mean = prev_credit.mean();

        let reputation = net
            .aggregate(
                &state.quality,
                Side::User,
                qr_params.theta_r,
                qr_params.rho_q,
                quality_mean,
            )
            .expect("validated shapes");
        let credit = authorship
            .aggregate(
                &state.quality,
                Side::Author,
                params.phi_a,
                params.rho_a,
                credit_mean,
            )
            .expect("validated shapes");
        let from_users = net
            .aggregate(
                &state.reputation,
                Side::Item,
                qr_params.theta_q,
                qr_params.rho_r,
                reputation_mean,
            )
            .expect("validated shapes");
        let from_authors = authorship
            .aggregate(prev_credit, Side::Item, params.phi_p, F::zero(), F::zero())
            .expect("validated shapes");
        let quality = mix(one_minus, &from_users, lambda, &from_authors);
        ScoreSet {
            reputation,
            quality,
            credit: Some(credit),
            ..state.clone()
        }
    }))
}

/// Credit as a single pass `A_m = d_m^(-phi_a) * sum p_ma (Q_a - shift)`,
/// normalized to unit length (nothing to sign-stabilize against: with the
/// shift at its defaults the readout of a nonnegative quality vector is
/// nonnegative).
fn credit_readout<F: Scalar>(
    authorship: &AuthorPaperNetwork<F>,
    quality: &ScoreVector<F>,
    phi_a: F,
    shift: F,
) -> ScoreVector<F> {
    let mut credit = authorship
        .aggregate(quality, Side::Author, phi_a, F::one(), shift)
        .expect("validated shapes");
    let norm = credit.l2_norm();
    if norm > F::zero() {
        for v in credit.values_mut() {
            *v /= norm;
        }
    }
    credit
}

/// `wa * a + wb * b`, elementwise, keeping the side tag of `a`.
fn mix<F: Scalar>(wa: F, a: &ScoreVector<F>, wb: F, b: &ScoreVector<F>) -> ScoreVector<F> {
    debug_assert_eq!(a.len(), b.len());
    let values = a
        .values()
        .iter()
        .zip(b.values().iter())
        .map(|(&x, &y)| wa * x + wb * y)
        .collect();
    ScoreVector::new(a.side(), values)
}
