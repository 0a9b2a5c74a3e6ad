//! Randomized invariant checks: the sparse kernels against dense oracles,
//! the iteration against its mathematical guarantees, and the statistics
//! against brute-force enumeration.

use std::collections::BTreeMap;

use proptest::prelude::*;

use qrc_core::algorithms::{
    bihits, fixed_point_iterate, qr, qrc, ConvergenceConfig, QrParams, QrcParams, ScoreSet,
};
use qrc_core::evaluation::{mann_whitney_u, pearson, top_k, Alternative, PvalueMethod};
use qrc_core::ingestion::{dedup_earliest, filter_low_activity, Action, InteractionEvent};
use qrc_core::network::{AuthorPaperNetwork, ScoreVector, Side, UserItemNetwork};
use qrc_core::simulator::{run_simulation, SimConfig};

const USERS: usize = 6;
const ITEMS: usize = 6;

/// Random sparse edge sets on a fixed 6x6 grid; the map keys keep
/// (user, item) pairs unique.
fn arb_edges() -> impl Strategy<Value = BTreeMap<(usize, usize), f64>> {
    prop::collection::btree_map((0..USERS, 0..ITEMS), 0.1f64..2.0, 1..=20)
}

fn build(edges: &BTreeMap<(usize, usize), f64>) -> UserItemNetwork<f64> {
    let list: Vec<(usize, usize, f64)> = edges.iter().map(|(&(u, i), &w)| (u, i, w)).collect();
    UserItemNetwork::with_shape(USERS, ITEMS, &list).expect("unique in-bounds edges")
}

/// Dense-matrix mirror of the sparse aggregation: weighted sum of shifted
/// inputs, scaled by receiver degree to the given power.
fn dense_aggregate(
    edges: &BTreeMap<(usize, usize), f64>,
    input: &[f64],
    toward_item: bool,
    exponent: f64,
    strength: f64,
    mean: f64,
) -> Vec<f64> {
    let (n_out, n_in) = if toward_item {
        (ITEMS, USERS)
    } else {
        (USERS, ITEMS)
    };
    let mut out = vec![0.0; n_out];
    for receiver in 0..n_out {
        let incident: Vec<(usize, f64)> = edges
            .iter()
            .filter_map(|(&(u, i), &w)| {
                let (from, to) = if toward_item { (u, i) } else { (i, u) };
                (to == receiver).then_some((from, w))
            })
            .collect();
        if incident.is_empty() {
            continue;
        }
        let degree = incident.len() as f64;
        let scale = if exponent == 0.0 {
            1.0
        } else if exponent == 1.0 {
            degree.recip()
        } else {
            degree.powf(-exponent)
        };
        let sum: f64 = incident
            .iter()
            .map(|&(from, w)| w * (input[from] - strength * mean))
            .sum();
        out[receiver] = scale * sum;
    }
    debug_assert_eq!(n_in, input.len());
    out
}

fn l2_normalize(values: &mut [f64]) {
    let norm: f64 = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in values.iter_mut() {
            *v /= norm;
        }
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    dot / (na * nb)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn aggregate_matches_dense_oracle(
        edges in arb_edges(),
        user_values in prop::collection::vec(-2.0f64..2.0, USERS),
        item_values in prop::collection::vec(-2.0f64..2.0, ITEMS),
        exponent in prop_oneof![Just(0.0), Just(0.5), Just(1.0), Just(0.37)],
        strength in 0.0f64..1.5,
        mean in -1.0f64..1.0,
    ) {
        let net = build(&edges);

        let toward_item = net
            .aggregate(&ScoreVector::new(Side::User, user_values.clone()), Side::Item, exponent, strength, mean)
            .unwrap();
        let expected = dense_aggregate(&edges, &user_values, true, exponent, strength, mean);
        for (got, want) in toward_item.values().iter().zip(&expected) {
            prop_assert!((got - want).abs() < 1e-12, "item side: {got} vs {want}");
        }

        let toward_user = net
            .aggregate(&ScoreVector::new(Side::Item, item_values.clone()), Side::User, exponent, strength, mean)
            .unwrap();
        let expected = dense_aggregate(&edges, &item_values, false, exponent, strength, mean);
        for (got, want) in toward_user.values().iter().zip(&expected) {
            prop_assert!((got - want).abs() < 1e-12, "user side: {got} vs {want}");
        }
    }

    #[test]
    fn aggregate_is_linear_without_shift(
        edges in arb_edges(),
        x in prop::collection::vec(-1.0f64..1.0, USERS),
        y in prop::collection::vec(-1.0f64..1.0, USERS),
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
        exponent in prop_oneof![Just(0.0), Just(0.5), Just(1.0)],
    ) {
        let net = build(&edges);
        let combined: Vec<f64> = x.iter().zip(&y).map(|(a, b)| alpha * a + beta * b).collect();

        let lhs = net
            .aggregate(&ScoreVector::new(Side::User, combined), Side::Item, exponent, 0.0, 0.0)
            .unwrap();
        let fx = net
            .aggregate(&ScoreVector::new(Side::User, x), Side::Item, exponent, 0.0, 0.0)
            .unwrap();
        let fy = net
            .aggregate(&ScoreVector::new(Side::User, y), Side::Item, exponent, 0.0, 0.0)
            .unwrap();
        for ((l, a), b) in lhs.values().iter().zip(fx.values()).zip(fy.values()) {
            prop_assert!((l - (alpha * a + beta * b)).abs() < 1e-12);
        }
    }

    #[test]
    fn normalized_view_folds_degree_into_weights(
        edges in arb_edges(),
        input in prop::collection::vec(-1.0f64..1.0, USERS),
        exponent in prop_oneof![Just(0.5), Just(1.0)],
    ) {
        let net = build(&edges);
        let through_view = net
            .normalized_view(exponent)
            .aggregate(&ScoreVector::new(Side::User, input.clone()), Side::Item, 0.0, 0.0, 0.0)
            .unwrap();

        // Dividing each weight by k_user^e is the same as feeding the raw
        // network an input pre-divided per user.
        let prescaled: Vec<f64> = input
            .iter()
            .enumerate()
            .map(|(u, &v)| {
                let k = net.user_degree(u);
                if k == 0 { v } else { v / (k as f64).powf(exponent) }
            })
            .collect();
        let direct = net
            .aggregate(&ScoreVector::new(Side::User, prescaled), Side::Item, 0.0, 0.0, 0.0)
            .unwrap();
        for (a, b) in through_view.values().iter().zip(direct.values()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn degree_sums_match_edge_count(edges in arb_edges()) {
        let net = build(&edges);
        let by_user: usize = (0..net.n_users()).map(|u| net.user_degree(u)).sum();
        let by_item: usize = (0..net.n_items()).map(|i| net.item_degree(i)).sum();
        prop_assert_eq!(by_user, net.edge_count());
        prop_assert_eq!(by_item, net.edge_count());
    }

    #[test]
    fn weight_scaling_leaves_scores_unchanged(
        edges in arb_edges(),
        scale in 0.01f64..100.0,
        theta_q in 0.0f64..1.0,
        theta_r in 0.0f64..1.0,
        rho_q in 0.0f64..1.0,
        rho_r in 0.0f64..1.0,
    ) {
        let net = build(&edges);
        let scaled_edges: BTreeMap<(usize, usize), f64> =
            edges.iter().map(|(&k, &w)| (k, w * scale)).collect();
        let scaled = build(&scaled_edges);

        let params = QrParams::new(theta_q, theta_r, rho_q, rho_r).unwrap();
        let config = ConvergenceConfig { tolerance: 1e-11, max_iterations: 50_000 };
        let a = qr(&net, &params, &config).unwrap();
        let b = qr(&scaled, &params, &config).unwrap();
        prop_assume!(a.converged && b.converged);
        for (x, y) in a.quality.values().iter().zip(b.quality.values()) {
            prop_assert!((x - y).abs() < 1e-8, "quality drifted: {x} vs {y}");
        }
        for (x, y) in a.reputation.values().iter().zip(b.reputation.values()) {
            prop_assert!((x - y).abs() < 1e-8, "reputation drifted: {x} vs {y}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bihits_limit_ignores_initialization(
        edges in arb_edges(),
        r0 in prop::collection::vec(0.05f64..1.0, USERS),
        q0 in prop::collection::vec(0.05f64..1.0, ITEMS),
    ) {
        let net = build(&edges);
        prop_assume!(net.is_connected());

        let config = ConvergenceConfig { tolerance: 1e-12, max_iterations: 100_000 };
        let reference = bihits(&net, true, &config).unwrap();
        prop_assume!(reference.converged);

        let start = ScoreSet {
            reputation: ScoreVector::new(Side::User, r0),
            quality: ScoreVector::new(Side::Item, q0),
            ..ScoreSet::uniform_init(USERS, ITEMS, None)
        };
        let from_elsewhere = fixed_point_iterate(start, &config, |state| ScoreSet {
            reputation: net.aggregate(&state.quality, Side::User, 0.0, 0.0, 0.0).unwrap(),
            quality: net.aggregate(&state.reputation, Side::Item, 0.0, 0.0, 0.0).unwrap(),
            ..state.clone()
        });
        prop_assume!(from_elsewhere.converged);

        let agreement = cosine(reference.quality.values(), from_elsewhere.quality.values());
        prop_assert!(agreement > 1.0 - 1e-6, "limits diverge: cosine {agreement}");
    }

    #[test]
    fn converged_state_survives_one_more_sweep(
        edges in arb_edges(),
        theta_q in 0.0f64..1.0,
        theta_r in 0.0f64..1.0,
        rho_q in 0.0f64..1.0,
        rho_r in 0.0f64..1.0,
    ) {
        let net = build(&edges);
        let params = QrParams::new(theta_q, theta_r, rho_q, rho_r).unwrap();
        let config = ConvergenceConfig { tolerance: 1e-10, max_iterations: 50_000 };
        let state = qr(&net, &params, &config).unwrap();
        prop_assume!(state.converged);

        let q_mean = state.quality.mean();
        let r_mean = state.reputation.mean();
        let mut next_r = net
            .aggregate(&state.quality, Side::User, theta_r, rho_q, q_mean)
            .unwrap()
            .into_values();
        let mut next_q = net
            .aggregate(&state.reputation, Side::Item, theta_q, rho_r, r_mean)
            .unwrap()
            .into_values();
        l2_normalize(&mut next_r);
        l2_normalize(&mut next_q);
        if next_r.iter().zip(state.reputation.values()).map(|(a, b)| a * b).sum::<f64>() < 0.0 {
            next_r.iter_mut().for_each(|v| *v = -*v);
        }
        if next_q.iter().zip(state.quality.values()).map(|(a, b)| a * b).sum::<f64>() < 0.0 {
            next_q.iter_mut().for_each(|v| *v = -*v);
        }

        for (new, old) in next_r.iter().zip(state.reputation.values()) {
            prop_assert!((new - old).abs() < config.tolerance);
        }
        for (new, old) in next_q.iter().zip(state.quality.values()) {
            prop_assert!((new - old).abs() < config.tolerance);
        }
    }

    // Note: weight scaling is NOT an invariance of the coupled author mode —
    // the user-feedback term of quality is linear in the weights while the
    // author-credit term ignores them, so scaling shifts the blend. The
    // structural invariance that does hold is relabeling equivariance.
    #[test]
    fn qrc_is_equivariant_under_item_relabeling(
        edges in arb_edges(),
        author_papers in prop::collection::vec(
            prop::collection::btree_set(0..ITEMS, 1..=3), 1..=3),
        permutation in Just((0..ITEMS).collect::<Vec<usize>>()).prop_shuffle(),
        theta_q in 0.0f64..1.0,
        theta_r in 0.0f64..1.0,
        lambda in 0.0f64..1.0,
    ) {
        let links: Vec<(usize, usize)> = author_papers
            .iter()
            .enumerate()
            .flat_map(|(a, papers)| papers.iter().map(move |&p| (a, p)))
            .collect();
        let net = build(&edges);
        let authorship =
            AuthorPaperNetwork::from_links(author_papers.len(), ITEMS, &links).unwrap();

        let relabeled_edges: BTreeMap<(usize, usize), f64> =
            edges.iter().map(|(&(u, i), &w)| ((u, permutation[i]), w)).collect();
        let relabeled_links: Vec<(usize, usize)> =
            links.iter().map(|&(a, p)| (a, permutation[p])).collect();
        let relabeled_net = build(&relabeled_edges);
        let relabeled_authorship =
            AuthorPaperNetwork::from_links(author_papers.len(), ITEMS, &relabeled_links).unwrap();

        // Zero shifts keep all vectors nonnegative, so no sign flips can
        // disagree between the two runs; the fixed sweep budget makes the
        // comparison independent of convergence behavior.
        let params = QrcParams {
            qr: QrParams::new(theta_q, theta_r, 0.0, 0.0).unwrap(),
            phi_a: 0.5,
            phi_p: 1.0,
            rho_a: 0.0,
            lambda,
        };
        let config = ConvergenceConfig { tolerance: 1e-300, max_iterations: 25 };
        let base = qrc(&net, &authorship, &params, &config).unwrap();
        let relabeled = qrc(&relabeled_net, &relabeled_authorship, &params, &config).unwrap();

        let base_q = base.quality.values();
        let relabeled_q = relabeled.quality.values();
        for (item, &target) in permutation.iter().enumerate() {
            prop_assert!((base_q[item] - relabeled_q[target]).abs() < 1e-9);
        }
        for (x, y) in base.reputation.values().iter().zip(relabeled.reputation.values()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        for (x, y) in
            base.credit.unwrap().values().iter().zip(relabeled.credit.unwrap().values())
        {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}

// ---------------------------------------------------------------------------
// Statistics

/// Independent Mann-Whitney oracle: midranks by quadratic counting, the exact
/// distribution by enumerating every subset of pooled indices.
fn mwu_oracle(a: &[f64], b: &[f64], alternative: Alternative) -> (f64, f64) {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let midrank: Vec<f64> = (0..n)
        .map(|i| {
            let less = pooled.iter().filter(|&&v| v < pooled[i]).count() as f64;
            let equal = pooled.iter().filter(|&&v| v == pooled[i]).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect();
    let n_a = a.len();
    let offset = (n_a * (n_a + 1)) as f64 / 2.0;
    let u_of = |mask: u32| -> f64 {
        (0..n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| midrank[i])
            .sum::<f64>()
            - offset
    };
    let observed = u_of((1u32 << n_a) - 1);
    let mu = (n_a * (n - n_a)) as f64 / 2.0;

    let mut hits = 0u64;
    let mut total = 0u64;
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize != n_a {
            continue;
        }
        total += 1;
        let u = u_of(mask);
        let tail = match alternative {
            Alternative::TwoSided => (u - mu).abs() >= (observed - mu).abs(),
            Alternative::Less => u <= observed,
            Alternative::Greater => u >= observed,
        };
        if tail {
            hits += 1;
        }
    }
    (observed, hits as f64 / total as f64)
}

fn arb_alternative() -> impl Strategy<Value = Alternative> {
    prop_oneof![
        Just(Alternative::TwoSided),
        Just(Alternative::Less),
        Just(Alternative::Greater)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mwu_exact_path_matches_enumeration(
        a in prop::collection::vec(0u8..5, 1..=6),
        b in prop::collection::vec(0u8..5, 1..=6),
        alternative in arb_alternative(),
    ) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        let result = mann_whitney_u(&a, &b, alternative).unwrap();
        prop_assert_eq!(result.method, PvalueMethod::Exact);
        let (u, p) = mwu_oracle(&a, &b, alternative);
        prop_assert!((result.u - u).abs() < 1e-12, "U {} vs oracle {u}", result.u);
        prop_assert!((result.p - p).abs() < 1e-12, "p {} vs oracle {p}", result.p);
    }

    #[test]
    fn pearson_is_symmetric_bounded_and_affine_invariant(
        pair in (3..20usize).prop_flat_map(|n| (
            prop::collection::vec(-10.0f64..10.0, n),
            prop::collection::vec(-10.0f64..10.0, n),
        )),
        gain in 0.5f64..2.0,
        bias in -5.0f64..5.0,
    ) {
        let (x, y) = pair;
        let r = match pearson(&x, &y) {
            Ok(r) => r,
            Err(_) => return Ok(()), // degenerate draw, nothing to check
        };
        prop_assert!((-1.0..=1.0).contains(&r));
        prop_assert!((pearson(&y, &x).unwrap() - r).abs() < 1e-12);

        let shifted: Vec<f64> = x.iter().map(|v| gain * v + bias).collect();
        prop_assert!((pearson(&shifted, &y).unwrap() - r).abs() < 1e-9);
        let negated: Vec<f64> = x.iter().map(|v| -v).collect();
        prop_assert!((pearson(&negated, &y).unwrap() + r).abs() < 1e-12);
    }

    #[test]
    fn top_k_is_a_valid_ranking(
        raw in prop::collection::vec(-100i32..100, 0..30),
        k in 0..40usize,
    ) {
        let scores: Vec<f64> = raw.iter().map(|&v| f64::from(v)).collect();
        let ranking = top_k(&scores, k);
        prop_assert_eq!(ranking.ids.len(), k.min(scores.len()));
        prop_assert_eq!(ranking.truncated, k > scores.len());
        let mut seen = std::collections::BTreeSet::new();
        for window in ranking.ids.windows(2) {
            let (first, second) = (window[0], window[1]);
            prop_assert!(
                scores[first] > scores[second]
                    || (scores[first] == scores[second] && first < second)
            );
        }
        for &id in &ranking.ids {
            prop_assert!(seen.insert(id), "duplicate id {id}");
        }

        // Any strictly increasing rescoring leaves the ranking alone
        // (2x + 1 is exact on these integer-valued scores).
        let transformed: Vec<f64> = scores.iter().map(|v| 2.0 * v + 1.0).collect();
        prop_assert_eq!(top_k(&transformed, k).ids, ranking.ids);
    }
}

// ---------------------------------------------------------------------------
// Ingestion

fn arb_event() -> impl Strategy<Value = InteractionEvent> {
    (0..5u8, 0..5u8, 0..3usize, 0..8u64).prop_map(|(user, paper, action, timestamp)| {
        InteractionEvent {
            user_id: format!("u{user}"),
            paper_id: format!("p{paper}"),
            action: Action::ALL[action],
            timestamp,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dedup_depends_only_on_the_event_multiset(
        events in prop::collection::vec(arb_event(), 0..40),
    ) {
        let once = dedup_earliest(&events);
        prop_assert_eq!(&dedup_earliest(&once), &once, "not idempotent");

        let mut reversed = events.clone();
        reversed.reverse();
        prop_assert_eq!(&dedup_earliest(&reversed), &once, "order sensitive");

        let mut by_time = events.clone();
        by_time.sort_by_key(|e| (e.timestamp, e.action));
        prop_assert_eq!(&dedup_earliest(&by_time), &once, "order sensitive");

        // One survivor per pair, and it attains the pairwise minimum.
        let mut pairs = std::collections::BTreeSet::new();
        for event in &once {
            prop_assert!(pairs.insert((event.user_id.clone(), event.paper_id.clone())));
            let best = events
                .iter()
                .filter(|e| e.user_id == event.user_id && e.paper_id == event.paper_id)
                .map(|e| (e.timestamp, e.action))
                .min()
                .unwrap();
            prop_assert_eq!((event.timestamp, event.action), best);
        }
        let distinct: std::collections::BTreeSet<_> =
            events.iter().map(|e| (&e.user_id, &e.paper_id)).collect();
        prop_assert_eq!(once.len(), distinct.len());
    }

    #[test]
    fn low_activity_filter_never_touches_uploaders(
        events in prop::collection::vec(arb_event(), 0..40),
    ) {
        let kept = filter_low_activity(&events);
        for event in &events {
            let uploads =
                events.iter().filter(|e| e.user_id == event.user_id && e.action == Action::Upload).count();
            let total = events.iter().filter(|e| e.user_id == event.user_id).count();
            let retained = kept.iter().filter(|e| e.user_id == event.user_id).count();
            if uploads >= 1 || total >= 2 {
                prop_assert_eq!(retained, total, "user {} lost events", event.user_id);
            } else {
                prop_assert_eq!(retained, 0, "user {} should be dropped", event.user_id);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Simulator

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn simulation_is_deterministic_and_respects_bounds(
        seed in any::<u64>(),
        n_users in 20..50usize,
        steps in 5..15usize,
    ) {
        let config = SimConfig { n_users, steps, seed, ..SimConfig::<f64>::default() };
        let first = run_simulation(&config).unwrap();
        let second = run_simulation(&config).unwrap();
        prop_assert_eq!(&first.events, &second.events);
        prop_assert_eq!(&first.truth.fitness, &second.truth.fitness);

        let truth = &first.truth;
        for (item, &fitness) in truth.fitness.iter().enumerate() {
            let ability = truth.ability[truth.uploader[item]];
            let ceiling = ability + (1.0 - ability) * config.fitness_spread;
            prop_assert!(fitness >= ability - 1e-12 && fitness <= ceiling + 1e-12);
            prop_assert!(truth.created_at[item] < steps);
        }

        let degree_sum: usize =
            (0..first.network.n_users()).map(|u| first.network.user_degree(u)).sum();
        prop_assert_eq!(degree_sum, first.network.edge_count());
        prop_assert_eq!(first.events.len(), first.network.edge_count());
    }
}
