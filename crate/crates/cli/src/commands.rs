//! Implementations behind the subcommands. Every command that writes files
//! also writes a manifest sidecar describing the invocation, and all of them
//! funnel errors through [`CliError`] so exit codes stay consistent.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use qrc_core::algorithms::{
    bihits, eigenrumor, qr, qrc, ConvergenceConfig, QrParams, QrcParams, ScoreSet,
};
use qrc_core::evaluation::{
    cumulative_degree_distribution, mann_whitney_u, pearson, top_k, top_k_report, Alternative,
    EvalError, MetricSummary, PaperFacts, PvalueMethod, TopKReport,
};
use qrc_core::ingestion::{
    apply_blocklist, build_networks, build_user_item, dedup_earliest, filter_low_activity,
    filter_min_day, normalize_author_name, read_blocklist, read_events_path, read_papers_path,
    write_events_path, Action, InteractionEvent, LabelIndex, PaperRecord, WeightScheme,
};
use qrc_core::network::{AuthorPaperNetwork, UserItemNetwork};
use qrc_core::simulator::{run_simulation, SimConfig};

use crate::args::{
    ActionFilter, Algo, Cli, Command, ConvergenceArgs, DegreeDistArgs, EvaluateArgs, ParamArgs,
    PrepArgs, RankArgs, SideArg, SimulateArgs, SweepArgs,
};
use crate::error::CliError;
use crate::manifest::write_manifest;
use crate::scores::{class_rows, read_scores, write_scores, ScoreRow};
use crate::truth::{
    read_item_truth, read_user_truth, write_item_truth, write_user_truth, ItemTruthRow,
    UserTruthRow,
};

/// Dispatch a parsed invocation. `argv` is the raw argument vector after the
/// binary name, recorded verbatim in manifests so runs can be replayed.
pub fn run(cli: Cli, argv: &[String]) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args, argv),
        Command::Rank(args) => cmd_rank(&args, argv),
        Command::Sweep(args) => cmd_sweep(&args, argv),
        Command::Evaluate(args) => cmd_evaluate(&args, argv),
        Command::DegreeDist(args) => cmd_degree_dist(&args, argv),
    }
}

/// Manifest path for a single-file output: `<out>.manifest` alongside it.
pub fn manifest_sidecar(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".manifest");
    out.with_file_name(name)
}

// ---------------------------------------------------------------------------
// simulate

fn cmd_simulate(args: &SimulateArgs, argv: &[String]) -> Result<(), CliError> {
    let config = SimConfig {
        n_users: args.users,
        mu: args.mu,
        fitness_spread: args.fitness_spread,
        selectivity: args.selectivity,
        upload_prob: args.upload_prob,
        steps: args.steps,
        w_up: args.w_up,
        w_down: args.w_down,
        downloads_per_step: args.downloads_per_step,
        seed: args.seed,
    };
    let result = run_simulation(&config)?;
    for warning in &result.warnings {
        eprintln!("warning: {warning}");
    }

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::io(&format!("creating {}", args.out_dir.display()), e))?;

    let events: Vec<InteractionEvent> = result
        .events
        .iter()
        .map(|event| InteractionEvent {
            user_id: event.user.to_string(),
            paper_id: event.item.to_string(),
            action: event.action,
            timestamp: event.step as u64,
        })
        .collect();
    write_events_path(args.out_dir.join("events.csv"), &events)?;

    let truth = &result.truth;
    let users: Vec<UserTruthRow> = (0..config.n_users)
        .map(|user| UserTruthRow {
            user_id: user.to_string(),
            ability: truth.ability[user],
            activity: truth.activity[user],
        })
        .collect();
    write_user_truth(&args.out_dir.join("truth_users.csv"), &users)?;

    let items: Vec<ItemTruthRow> = (0..truth.fitness.len())
        .map(|item| ItemTruthRow {
            item_id: item.to_string(),
            fitness: truth.fitness[item],
            created_at: truth.created_at[item] as u64,
        })
        .collect();
    write_item_truth(&args.out_dir.join("truth_items.csv"), &items)?;

    write_manifest(
        &args.out_dir.join("manifest.txt"),
        "simulate",
        argv,
        Some(args.seed),
        &[],
    )?;
    eprintln!(
        "seed={} users={} items={} events={}",
        args.seed,
        config.n_users,
        truth.fitness.len(),
        events.len()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// shared loading / network assembly

struct LoadedData {
    events: Vec<InteractionEvent>,
    papers: Option<Vec<PaperRecord>>,
}

/// Read, clean, and (optionally) cut the inputs. Repeat interactions are
/// always collapsed to the earliest per pair; the blocklist, day cutoff, and
/// low-activity filter apply only when asked for.
fn load_events_and_papers(
    events_path: &Path,
    papers_path: Option<&Path>,
    prep: &PrepArgs,
) -> Result<LoadedData, CliError> {
    let mut events = read_events_path(events_path)?;
    let mut papers = papers_path.map(read_papers_path).transpose()?;

    if let Some(blocklist_path) = &prep.blocklist {
        let blocked = read_blocklist(blocklist_path)?;
        events = apply_blocklist(&events, &blocked);
    }
    if let Some(min_day) = prep.min_day {
        let records = papers
            .as_ref()
            .ok_or_else(|| CliError::Usage("--min-day requires --papers".to_string()))?;
        let (kept_events, kept_papers) = filter_min_day(&events, records, min_day);
        events = kept_events;
        papers = Some(kept_papers);
    }
    let mut events = dedup_earliest(&events);
    if prep.filter_low_activity {
        events = filter_low_activity(&events);
    }
    Ok(LoadedData { events, papers })
}

struct Assembled {
    network: UserItemNetwork<f64>,
    authorship: Option<AuthorPaperNetwork<f64>>,
    users: LabelIndex,
    papers: LabelIndex,
    authors: Option<LabelIndex>,
}

/// Build the network(s). With metadata, the paper file defines the item
/// universe (untouched papers become isolated items) and authorship links
/// come from canonicalized names; without it the items are whatever the
/// events mention.
fn assemble(data: &LoadedData, prep: &PrepArgs) -> Result<Assembled, CliError> {
    let scheme = WeightScheme::new(prep.w_up, prep.w_down, prep.w_view)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    match &data.papers {
        Some(records) => {
            let corpus = build_networks(&data.events, records, &scheme)?;
            Ok(Assembled {
                network: corpus.network,
                authorship: Some(corpus.authorship),
                users: corpus.users,
                papers: corpus.papers,
                authors: Some(corpus.authors),
            })
        }
        None => {
            let (network, users, papers) = build_user_item(&data.events, &scheme)?;
            Ok(Assembled {
                network,
                authorship: None,
                users,
                papers,
                authors: None,
            })
        }
    }
}

fn execute_algorithm(
    algo: Algo,
    unweighted: bool,
    assembled: &Assembled,
    params: &ParamArgs,
    convergence: &ConvergenceArgs,
) -> Result<ScoreSet<f64>, CliError> {
    if unweighted && algo != Algo::Bihits {
        return Err(CliError::Usage(
            "--unweighted only applies to --algo bihits".to_string(),
        ));
    }
    let config = ConvergenceConfig::new(convergence.tolerance, convergence.max_iters)?;
    let authorship = || {
        assembled.authorship.as_ref().ok_or_else(|| {
            CliError::Usage(format!(
                "--algo {} needs author links; pass --papers with author metadata",
                algo.as_str()
            ))
        })
    };
    let scores = match algo {
        Algo::Bihits => bihits(&assembled.network, !unweighted, &config)?,
        Algo::Qr => qr(
            &assembled.network,
            &QrParams::new(params.tq, params.tr, params.rq, params.rr)?,
            &config,
        )?,
        Algo::Er => eigenrumor(&assembled.network, authorship()?, params.omega, &config)?,
        Algo::Qrc => qrc(
            &assembled.network,
            authorship()?,
            &QrcParams {
                qr: QrParams::new(params.tq, params.tr, params.rq, params.rr)?,
                phi_a: params.fa,
                phi_p: params.fp,
                rho_a: params.ra,
                lambda: params.lambda,
            },
            &config,
        )?,
    };
    Ok(scores)
}

// ---------------------------------------------------------------------------
// rank

fn cmd_rank(args: &RankArgs, argv: &[String]) -> Result<(), CliError> {
    let data = load_events_and_papers(&args.events, args.papers.as_deref(), &args.prep)?;
    let assembled = assemble(&data, &args.prep)?;
    let scores = execute_algorithm(
        args.algo,
        args.unweighted,
        &assembled,
        &args.params,
        &args.convergence,
    )?;

    for warning in &scores.warnings {
        eprintln!("warning: {warning}");
    }
    eprintln!(
        "algo={} converged={} iterations={} residual={:e}",
        args.algo.as_str(),
        scores.converged,
        scores.iterations,
        scores.residual
    );

    let mut rows = class_rows("user", scores.reputation.values(), |i| {
        assembled.users.label(i).to_string()
    });
    rows.extend(class_rows("item", scores.quality.values(), |i| {
        assembled.papers.label(i).to_string()
    }));
    if let (Some(credit), Some(authors)) = (&scores.credit, &assembled.authors) {
        rows.extend(class_rows("author", credit.values(), |i| {
            authors.label(i).to_string()
        }));
    }
    write_scores(&args.out, &rows)?;

    let mut inputs: Vec<(&str, &Path)> = vec![("events", args.events.as_path())];
    if let Some(papers) = &args.papers {
        inputs.push(("papers", papers.as_path()));
    }
    if let Some(blocklist) = &args.prep.blocklist {
        inputs.push(("blocklist", blocklist.as_path()));
    }
    write_manifest(&manifest_sidecar(&args.out), "rank", argv, None, &inputs)?;

    if !scores.converged {
        return Err(CliError::NonConvergence(format!(
            "no fixed point within {} sweeps (residual {:e}); {} holds the last iterate",
            scores.iterations,
            scores.residual,
            args.out.display()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep

fn build_grid(base: ParamArgs, vary: &[String], qr16: bool) -> Result<Vec<ParamArgs>, CliError> {
    if qr16 {
        if !vary.is_empty() {
            return Err(CliError::Usage(
                "--qr16 and --vary are mutually exclusive".to_string(),
            ));
        }
        let mut grid = Vec::with_capacity(16);
        for tq in [0.0, 1.0] {
            for tr in [0.0, 1.0] {
                for rq in [0.0, 1.0] {
                    for rr in [0.0, 1.0] {
                        grid.push(ParamArgs {
                            tq,
                            tr,
                            rq,
                            rr,
                            ..base
                        });
                    }
                }
            }
        }
        return Ok(grid);
    }
    let mut grid = vec![base];
    for axis in vary {
        let (name, list) = axis.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("--vary expects PARAM=v1,v2,... got {axis:?}"))
        })?;
        let values: Vec<f64> = list
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("--vary {name}: {v:?} is not a number")))
            })
            .collect::<Result<_, _>>()?;
        let mut widened = Vec::with_capacity(grid.len() * values.len());
        for point in &grid {
            for &value in &values {
                widened.push(apply_param(*point, name, value)?);
            }
        }
        grid = widened;
    }
    Ok(grid)
}

fn apply_param(mut point: ParamArgs, name: &str, value: f64) -> Result<ParamArgs, CliError> {
    match name {
        "tq" => point.tq = value,
        "tr" => point.tr = value,
        "rq" => point.rq = value,
        "rr" => point.rr = value,
        "fa" => point.fa = value,
        "fp" => point.fp = value,
        "ra" => point.ra = value,
        "lambda" => point.lambda = value,
        "omega" => point.omega = value,
        other => {
            return Err(CliError::Usage(format!(
                "unknown sweep parameter {other:?}"
            )))
        }
    }
    Ok(point)
}

fn correlation_or_blank(x: &[f64], y: &[f64]) -> Result<Option<f64>, CliError> {
    match pearson(x, y) {
        Ok(r) => Ok(Some(r)),
        Err(EvalError::ZeroVariance { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Map each ground-truth row to its network node, checking the strict
/// direction: a node in the data without a truth row is an error, while a
/// truth row for an absent node backfills score 0 (an entity nobody ranked).
fn truth_join(
    truth_ids: &[&str],
    labels: &LabelIndex,
    class: &str,
) -> Result<Vec<Option<usize>>, CliError> {
    let known: HashSet<&str> = truth_ids.iter().copied().collect();
    let mut offending: Vec<&str> = labels
        .iter()
        .filter(|label| !known.contains(label))
        .collect();
    if !offending.is_empty() {
        offending.sort_unstable();
        return Err(CliError::Data(format!(
            "{class} ids present in the data but missing from ground truth: {}",
            offending.join(", ")
        )));
    }
    Ok(truth_ids.iter().map(|id| labels.get(id)).collect())
}

fn joined_scores(values: &[f64], join: &[Option<usize>]) -> Vec<f64> {
    join.iter()
        .map(|slot| slot.map(|i| values[i]).unwrap_or(0.0))
        .collect()
}

struct SweepRow {
    point: ParamArgs,
    converged: bool,
    iterations: usize,
    residual: f64,
    /// quality~fitness, reputation~ability, quality~age, reputation~activity
    correlations: [Option<f64>; 4],
    topk: Option<TopKReport<f64>>,
    warnings: Vec<String>,
}

const SWEEP_HEADER: [&str; 25] = [
    "algo",
    "tq",
    "tr",
    "rq",
    "rr",
    "fa",
    "fp",
    "ra",
    "lambda",
    "omega",
    "converged",
    "iterations",
    "residual",
    "c_quality_fitness",
    "c_reputation_ability",
    "c_quality_age",
    "c_reputation_activity",
    "day_mean",
    "day_se",
    "downloads_mean",
    "downloads_se",
    "citations_mean",
    "citations_se",
    "impact_mean",
    "impact_se",
];

fn opt_cell(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn cmd_sweep(args: &SweepArgs, argv: &[String]) -> Result<(), CliError> {
    let data = load_events_and_papers(&args.events, args.papers.as_deref(), &args.prep)?;
    let assembled = assemble(&data, &args.prep)?;
    let grid = build_grid(args.params, &args.vary, args.qr16)?;

    let user_truth = args
        .truth_users
        .as_ref()
        .map(|p| read_user_truth(p))
        .transpose()?;
    let item_truth = args
        .truth_items
        .as_ref()
        .map(|p| read_item_truth(p))
        .transpose()?;
    let user_join = user_truth
        .as_ref()
        .map(|rows| {
            let ids: Vec<&str> = rows.iter().map(|r| r.user_id.as_str()).collect();
            truth_join(&ids, &assembled.users, "user")
        })
        .transpose()?;
    let item_join = item_truth
        .as_ref()
        .map(|rows| {
            let ids: Vec<&str> = rows.iter().map(|r| r.item_id.as_str()).collect();
            truth_join(&ids, &assembled.papers, "item")
        })
        .transpose()?;

    // Per-paper metric facts, aligned with network item indices (metadata
    // file order). Download counts come from the processed event stream.
    let facts: Option<Vec<Option<PaperFacts<f64>>>> = data.papers.as_ref().map(|records| {
        let mut downloads: HashMap<&str, u64> = HashMap::new();
        for event in &data.events {
            if event.action == Action::Download {
                *downloads.entry(event.paper_id.as_str()).or_insert(0) += 1;
            }
        }
        records
            .iter()
            .map(|record| {
                Some(PaperFacts {
                    submission_day: record.submission_day,
                    citations: record.citations,
                    impact_factor: record.impact_factor,
                    downloads: Some(
                        downloads
                            .get(record.paper_id.as_str())
                            .copied()
                            .unwrap_or(0),
                    ),
                })
            })
            .collect()
    });

    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|point| -> Result<SweepRow, CliError> {
            let scores = execute_algorithm(
                args.algo,
                args.unweighted,
                &assembled,
                point,
                &args.convergence,
            )?;
            let mut row = SweepRow {
                point: *point,
                converged: scores.converged,
                iterations: scores.iterations,
                residual: scores.residual,
                correlations: [None; 4],
                topk: None,
                warnings: scores.warnings.clone(),
            };
            // Metrics of a non-converged iterate would be noise; leave blank.
            if scores.converged {
                if let (Some(truth), Some(join)) = (&item_truth, &item_join) {
                    let joined = joined_scores(scores.quality.values(), join);
                    let fitness: Vec<f64> = truth.iter().map(|r| r.fitness).collect();
                    let age: Vec<f64> = truth.iter().map(|r| r.created_at as f64).collect();
                    row.correlations[0] = correlation_or_blank(&joined, &fitness)?;
                    row.correlations[2] = correlation_or_blank(&joined, &age)?;
                }
                if let (Some(truth), Some(join)) = (&user_truth, &user_join) {
                    let joined = joined_scores(scores.reputation.values(), join);
                    let ability: Vec<f64> = truth.iter().map(|r| r.ability).collect();
                    let activity: Vec<f64> = truth.iter().map(|r| r.activity).collect();
                    row.correlations[1] = correlation_or_blank(&joined, &ability)?;
                    row.correlations[3] = correlation_or_blank(&joined, &activity)?;
                }
                if let Some(facts) = &facts {
                    let ranking = top_k(scores.quality.values(), args.k);
                    row.topk = Some(top_k_report(&ranking.ids, facts, args.k)?);
                }
            }
            Ok(row)
        })
        .collect::<Result<_, _>>()?;

    let file = std::fs::File::create(&args.out)
        .map_err(|e| CliError::io(&format!("writing {}", args.out.display()), e))?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    writer.write_record(SWEEP_HEADER)?;
    for row in &rows {
        let p = &row.point;
        let mut record: Vec<String> = vec![
            args.algo.as_str().to_string(),
            p.tq.to_string(),
            p.tr.to_string(),
            p.rq.to_string(),
            p.rr.to_string(),
            p.fa.to_string(),
            p.fp.to_string(),
            p.ra.to_string(),
            p.lambda.to_string(),
            p.omega.to_string(),
            row.converged.to_string(),
            row.iterations.to_string(),
            row.residual.to_string(),
        ];
        for correlation in row.correlations {
            record.push(opt_cell(correlation));
        }
        match &row.topk {
            Some(report) => {
                record.push(report.submission_day.mean.to_string());
                record.push(report.submission_day.std_error.to_string());
                let downloads = report.downloads.as_ref();
                record.push(opt_cell(downloads.map(|d| d.mean)));
                record.push(opt_cell(downloads.map(|d| d.std_error)));
                record.push(report.citations.mean.to_string());
                record.push(report.citations.std_error.to_string());
                record.push(report.impact_factor.mean.to_string());
                record.push(report.impact_factor.std_error.to_string());
            }
            None => record.extend(std::iter::repeat_with(String::new).take(8)),
        }
        writer.write_record(&record)?;
    }
    writer
        .flush()
        .map_err(|e| CliError::io(&format!("writing {}", args.out.display()), e))?;

    let distinct_warnings: BTreeSet<&String> = rows.iter().flat_map(|r| &r.warnings).collect();
    for warning in distinct_warnings {
        eprintln!("warning: {warning}");
    }
    let converged = rows.iter().filter(|r| r.converged).count();
    eprintln!("grid points={} converged={}", rows.len(), converged);

    let mut inputs: Vec<(&str, &Path)> = vec![("events", args.events.as_path())];
    if let Some(papers) = &args.papers {
        inputs.push(("papers", papers.as_path()));
    }
    if let Some(truth_users) = &args.truth_users {
        inputs.push(("truth_users", truth_users.as_path()));
    }
    if let Some(truth_items) = &args.truth_items {
        inputs.push(("truth_items", truth_items.as_path()));
    }
    if let Some(blocklist) = &args.prep.blocklist {
        inputs.push(("blocklist", blocklist.as_path()));
    }
    write_manifest(&manifest_sidecar(&args.out), "sweep", argv, None, &inputs)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// evaluate

struct MetricSamples {
    day: Vec<f64>,
    citations: Vec<f64>,
    impact: Vec<f64>,
    downloads: Option<Vec<f64>>,
}

fn metric_samples(facts: &[Option<PaperFacts<f64>>]) -> MetricSamples {
    let mut day = Vec::new();
    let mut citations = Vec::new();
    let mut impact = Vec::new();
    let mut downloads = Vec::new();
    for fact in facts.iter().flatten() {
        day.push(fact.submission_day as f64);
        citations.push(fact.citations as f64);
        impact.push(fact.impact_factor);
        if let Some(count) = fact.downloads {
            downloads.push(count as f64);
        }
    }
    let downloads = (downloads.len() == day.len()).then_some(downloads);
    MetricSamples {
        day,
        citations,
        impact,
        downloads,
    }
}

/// Item rows of a scores file in rank order, truncated to k.
fn top_k_items(rows: &[ScoreRow], k: usize) -> Vec<&ScoreRow> {
    let mut items: Vec<&ScoreRow> = rows.iter().filter(|r| r.class == "item").collect();
    items.sort_by_key(|r| r.rank);
    items.truncate(k);
    items
}

fn facts_for_items(
    items: &[&ScoreRow],
    records: &HashMap<&str, &PaperRecord>,
    downloads: Option<&HashMap<String, u64>>,
) -> Result<Vec<Option<PaperFacts<f64>>>, CliError> {
    items
        .iter()
        .map(|row| {
            let record = records.get(row.id.as_str()).ok_or_else(|| {
                CliError::Data(format!("no metadata record for paper {:?}", row.id))
            })?;
            Ok(Some(PaperFacts {
                submission_day: record.submission_day,
                citations: record.citations,
                impact_factor: record.impact_factor,
                downloads: downloads.map(|map| map.get(row.id.as_str()).copied().unwrap_or(0)),
            }))
        })
        .collect()
}

fn push_summary(
    lines: &mut Vec<(String, String)>,
    prefix: &str,
    name: &str,
    summary: &MetricSummary<f64>,
) {
    lines.push((format!("{prefix}.{name}.mean"), summary.mean.to_string()));
    lines.push((format!("{prefix}.{name}.se"), summary.std_error.to_string()));
}

fn push_topk(lines: &mut Vec<(String, String)>, prefix: &str, report: &TopKReport<f64>) {
    lines.push((format!("{prefix}.k"), report.k.to_string()));
    push_summary(lines, prefix, "submission_day", &report.submission_day);
    if let Some(downloads) = &report.downloads {
        push_summary(lines, prefix, "downloads", downloads);
    }
    push_summary(lines, prefix, "citations", &report.citations);
    push_summary(lines, prefix, "impact_factor", &report.impact_factor);
}

fn push_mwu(
    lines: &mut Vec<(String, String)>,
    name: &str,
    a: &[f64],
    b: &[f64],
) -> Result<(), CliError> {
    let result = mann_whitney_u(a, b, Alternative::TwoSided)?;
    lines.push((format!("mwu.{name}.u"), result.u.to_string()));
    lines.push((format!("mwu.{name}.p"), result.p.to_string()));
    let method = match result.method {
        PvalueMethod::Exact => "exact",
        PvalueMethod::NormalApproximation => "normal",
    };
    lines.push((format!("mwu.{name}.method"), method.to_string()));
    Ok(())
}

/// Score ids must be a subset of the truth ids; anything else means the two
/// files describe different data sets.
fn reject_unknown_ids(
    score_ids: impl Iterator<Item = impl AsRef<str>>,
    truth_ids: &HashSet<&str>,
    class: &str,
) -> Result<(), CliError> {
    let mut offending: Vec<String> = score_ids
        .filter(|id| !truth_ids.contains(id.as_ref()))
        .map(|id| id.as_ref().to_string())
        .collect();
    if offending.is_empty() {
        return Ok(());
    }
    offending.sort_unstable();
    Err(CliError::Data(format!(
        "{class} ids in the scores file but not in ground truth: {}",
        offending.join(", ")
    )))
}

fn cmd_evaluate(args: &EvaluateArgs, argv: &[String]) -> Result<(), CliError> {
    let rows = read_scores(&args.scores)?;
    let mut lines: Vec<(String, String)> = Vec::new();

    // Correlations against ground truth. Truth rows define the population:
    // entities the ranking never saw count with score 0 rather than being
    // dropped, so hyperactivity bias stays visible.
    let mut quality_fitness = None;
    let mut quality_age = None;
    let mut reputation_ability = None;
    let mut reputation_activity = None;
    if let Some(path) = &args.truth_items {
        let truth = read_item_truth(path)?;
        let truth_ids: HashSet<&str> = truth.iter().map(|r| r.item_id.as_str()).collect();
        let item_rows: Vec<&ScoreRow> = rows.iter().filter(|r| r.class == "item").collect();
        reject_unknown_ids(item_rows.iter().map(|r| &r.id), &truth_ids, "item")?;
        let by_id: HashMap<&str, f64> =
            item_rows.iter().map(|r| (r.id.as_str(), r.score)).collect();
        let joined: Vec<f64> = truth
            .iter()
            .map(|r| by_id.get(r.item_id.as_str()).copied().unwrap_or(0.0))
            .collect();
        let fitness: Vec<f64> = truth.iter().map(|r| r.fitness).collect();
        let age: Vec<f64> = truth.iter().map(|r| r.created_at as f64).collect();
        quality_fitness = Some(correlation_or_blank(&joined, &fitness)?);
        quality_age = Some(correlation_or_blank(&joined, &age)?);
    }
    if let Some(path) = &args.truth_users {
        let truth = read_user_truth(path)?;
        let truth_ids: HashSet<&str> = truth.iter().map(|r| r.user_id.as_str()).collect();
        let user_rows: Vec<&ScoreRow> = rows.iter().filter(|r| r.class == "user").collect();
        reject_unknown_ids(user_rows.iter().map(|r| &r.id), &truth_ids, "user")?;
        let by_id: HashMap<&str, f64> =
            user_rows.iter().map(|r| (r.id.as_str(), r.score)).collect();
        let joined: Vec<f64> = truth
            .iter()
            .map(|r| by_id.get(r.user_id.as_str()).copied().unwrap_or(0.0))
            .collect();
        let ability: Vec<f64> = truth.iter().map(|r| r.ability).collect();
        let activity: Vec<f64> = truth.iter().map(|r| r.activity).collect();
        reputation_ability = Some(correlation_or_blank(&joined, &ability)?);
        reputation_activity = Some(correlation_or_blank(&joined, &activity)?);
    }
    if let Some(value) = quality_fitness {
        lines.push(("corr.quality_fitness".to_string(), opt_cell(value)));
    }
    if let Some(value) = reputation_ability {
        lines.push(("corr.reputation_ability".to_string(), opt_cell(value)));
    }
    if let Some(value) = quality_age {
        lines.push(("corr.quality_age".to_string(), opt_cell(value)));
    }
    if let Some(value) = reputation_activity {
        lines.push(("corr.reputation_activity".to_string(), opt_cell(value)));
    }

    // Top-k metric report against paper metadata, plus the rank-sum
    // comparison when a second scores file is given.
    if let Some(papers_path) = &args.papers {
        let records_list = read_papers_path(papers_path)?;
        let records: HashMap<&str, &PaperRecord> = records_list
            .iter()
            .map(|r| (r.paper_id.as_str(), r))
            .collect();
        let downloads: Option<HashMap<String, u64>> = match &args.events {
            Some(events_path) => {
                let events = dedup_earliest(&read_events_path(events_path)?);
                let mut counts: HashMap<String, u64> = HashMap::new();
                for event in &events {
                    if event.action == Action::Download {
                        *counts.entry(event.paper_id.clone()).or_insert(0) += 1;
                    }
                }
                Some(counts)
            }
            None => None,
        };

        let selected = top_k_items(&rows, args.k);
        if selected.is_empty() {
            return Err(CliError::Data(format!(
                "{} contains no item rows to report on",
                args.scores.display()
            )));
        }
        let facts = facts_for_items(&selected, &records, downloads.as_ref())?;
        let indices: Vec<usize> = (0..facts.len()).collect();
        let report = top_k_report(&indices, &facts, args.k)?;
        push_topk(&mut lines, "topk", &report);

        if let Some(baseline_path) = &args.baseline {
            let baseline_rows = read_scores(baseline_path)?;
            let baseline_selected = top_k_items(&baseline_rows, args.k);
            if baseline_selected.is_empty() {
                return Err(CliError::Data(format!(
                    "{} contains no item rows to report on",
                    baseline_path.display()
                )));
            }
            let baseline_facts = facts_for_items(&baseline_selected, &records, downloads.as_ref())?;
            let baseline_indices: Vec<usize> = (0..baseline_facts.len()).collect();
            let baseline_report = top_k_report(&baseline_indices, &baseline_facts, args.k)?;
            push_topk(&mut lines, "topk_baseline", &baseline_report);

            let ours = metric_samples(&facts);
            let theirs = metric_samples(&baseline_facts);
            push_mwu(&mut lines, "submission_day", &ours.day, &theirs.day)?;
            if let (Some(a), Some(b)) = (&ours.downloads, &theirs.downloads) {
                push_mwu(&mut lines, "downloads", a, b)?;
            }
            push_mwu(&mut lines, "citations", &ours.citations, &theirs.citations)?;
            push_mwu(&mut lines, "impact_factor", &ours.impact, &theirs.impact)?;
        }
    } else if args.baseline.is_some() {
        return Err(CliError::Usage(
            "--baseline compares top-k metrics and needs --papers".to_string(),
        ));
    } else if args.events.is_some() {
        return Err(CliError::Usage(
            "--events only adds download counts to the --papers report".to_string(),
        ));
    }

    if lines.is_empty() {
        return Err(CliError::Usage(
            "nothing to evaluate: pass --truth-users/--truth-items and/or --papers".to_string(),
        ));
    }
    for (metric, value) in &lines {
        println!("{metric} = {value}");
    }

    if let Some(out) = &args.out {
        let file = std::fs::File::create(out)
            .map_err(|e| CliError::io(&format!("writing {}", out.display()), e))?;
        let mut writer = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(file);
        writer.write_record(["metric", "value"])?;
        for (metric, value) in &lines {
            writer.write_record([metric.as_str(), value.as_str()])?;
        }
        writer
            .flush()
            .map_err(|e| CliError::io(&format!("writing {}", out.display()), e))?;

        let mut inputs: Vec<(&str, &Path)> = vec![("scores", args.scores.as_path())];
        if let Some(p) = &args.baseline {
            inputs.push(("baseline", p.as_path()));
        }
        if let Some(p) = &args.truth_users {
            inputs.push(("truth_users", p.as_path()));
        }
        if let Some(p) = &args.truth_items {
            inputs.push(("truth_items", p.as_path()));
        }
        if let Some(p) = &args.papers {
            inputs.push(("papers", p.as_path()));
        }
        if let Some(p) = &args.events {
            inputs.push(("events", p.as_path()));
        }
        write_manifest(&manifest_sidecar(out), "evaluate", argv, None, &inputs)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// degree-dist

fn action_of(filter: ActionFilter) -> Option<Action> {
    match filter {
        ActionFilter::All => None,
        ActionFilter::Upload => Some(Action::Upload),
        ActionFilter::Download => Some(Action::Download),
        ActionFilter::View => Some(Action::View),
    }
}

fn cmd_degree_dist(args: &DegreeDistArgs, argv: &[String]) -> Result<(), CliError> {
    let degrees: Vec<usize> =
        match args.side {
            SideArg::User | SideArg::Item => {
                let events_path = args.events.as_ref().ok_or_else(|| {
                    CliError::Usage("--side user/item requires --events".to_string())
                })?;
                let mut events = read_events_path(events_path)?;
                if !args.exclude_user.is_empty() {
                    let excluded: BTreeSet<String> = args.exclude_user.iter().cloned().collect();
                    events = apply_blocklist(&events, &excluded);
                }
                let events = dedup_earliest(&events);
                let wanted = action_of(args.action);
                let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                for event in &events {
                    if wanted.is_none_or(|action| event.action == action) {
                        let key = match args.side {
                            SideArg::User => event.user_id.as_str(),
                            _ => event.paper_id.as_str(),
                        };
                        *counts.entry(key).or_insert(0) += 1;
                    }
                }
                counts.into_values().collect()
            }
            SideArg::Author => {
                if args.action != ActionFilter::All {
                    return Err(CliError::Usage(
                    "--action does not apply to the author side; authorship has no action kinds"
                        .to_string(),
                ));
                }
                let papers_path = args.papers.as_ref().ok_or_else(|| {
                    CliError::Usage("--side author requires --papers".to_string())
                })?;
                let records = read_papers_path(papers_path)?;
                let mut counts: BTreeMap<String, usize> = BTreeMap::new();
                for record in &records {
                    let mut canonical = BTreeSet::new();
                    for raw in &record.authors {
                        canonical.insert(normalize_author_name(raw)?);
                    }
                    for name in canonical {
                        *counts.entry(name).or_insert(0) += 1;
                    }
                }
                counts.into_values().collect()
            }
        };

    let table = cumulative_degree_distribution::<f64>(&degrees);
    let file = std::fs::File::create(&args.out)
        .map_err(|e| CliError::io(&format!("writing {}", args.out.display()), e))?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    writer.write_record(["degree", "fraction"])?;
    for (degree, fraction) in &table {
        writer.write_record([degree.to_string(), fraction.to_string()])?;
    }
    writer
        .flush()
        .map_err(|e| CliError::io(&format!("writing {}", args.out.display()), e))?;

    let mut inputs: Vec<(&str, &Path)> = Vec::new();
    if let Some(events) = &args.events {
        inputs.push(("events", events.as_path()));
    }
    if let Some(papers) = &args.papers {
        inputs.push(("papers", papers.as_path()));
    }
    write_manifest(
        &manifest_sidecar(&args.out),
        "degree-dist",
        argv,
        None,
        &inputs,
    )?;
    Ok(())
}
