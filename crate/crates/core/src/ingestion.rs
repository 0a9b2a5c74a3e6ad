//! Raw-data pipeline: interaction-event and paper-metadata CSV files in,
//! cleaned event streams and the two bipartite networks out.
//!
//! Cleaning follows three rules: keep only the earliest interaction per
//! (user, paper) pair, drop users with no uploads and at most one action,
//! and merge author spellings down to "first initial + surname".

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{AuthorPaperNetwork, NetworkError, UserItemNetwork};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("author name {raw:?} contains no alphabetic characters")]
    UnparseableAuthor { raw: String },
    #[error("event references paper {paper:?} which has no metadata record")]
    UnknownPaper { paper: String },
    #[error("paper id {paper:?} appears more than once in the metadata")]
    DuplicatePaper { paper: String },
    #[error("{name} weight must be positive and finite, got {value}")]
    InvalidWeight { name: &'static str, value: f64 },
    #[error("unknown action {value:?} (expected upload, download, or view)")]
    UnknownAction { value: String },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// The three interaction kinds, strongest first. The ordering is the tie-break
/// precedence used by [`dedup_earliest`] when two actions share a timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Upload,
    Download,
    View,
}

impl Action {
    pub const ALL: [Action; 3] = [Action::Upload, Action::Download, Action::View];

    pub fn as_str(self) -> &'static str {
        match self {
            Action::Upload => "upload",
            Action::Download => "download",
            Action::View => "view",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Action {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "upload" => Ok(Action::Upload),
            "download" => Ok(Action::Download),
            "view" => Ok(Action::View),
            other => Err(IngestError::UnknownAction {
                value: other.to_string(),
            }),
        }
    }
}

/// One row of the event log: a user acted on a paper at a point in time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub user_id: String,
    pub paper_id: String,
    pub action: Action,
    pub timestamp: u64,
}

/// One row of the paper metadata file, with the author field already split.
#[derive(Debug, Clone, PartialEq)]
pub struct PaperRecord {
    pub paper_id: String,
    pub submission_day: i64,
    pub title: String,
    /// Raw author names as written, in file order; may be empty.
    pub authors: Vec<String>,
    pub citations: u64,
    pub impact_factor: f64,
}

/// Wire format of a paper row: authors as one semicolon-separated field,
/// citations/impact factor optional (empty cell means "not known", read as 0).
#[derive(Debug, Serialize, Deserialize)]
struct RawPaperRow {
    paper_id: String,
    submission_day: i64,
    title: String,
    authors: String,
    citations: Option<u64>,
    impact_factor: Option<f64>,
}

impl From<RawPaperRow> for PaperRecord {
    fn from(raw: RawPaperRow) -> Self {
        PaperRecord {
            paper_id: raw.paper_id,
            submission_day: raw.submission_day,
            title: raw.title,
            authors: raw
                .authors
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect(),
            citations: raw.citations.unwrap_or(0),
            impact_factor: raw.impact_factor.unwrap_or(0.0),
        }
    }
}

impl From<&PaperRecord> for RawPaperRow {
    fn from(record: &PaperRecord) -> Self {
        RawPaperRow {
            paper_id: record.paper_id.clone(),
            submission_day: record.submission_day,
            title: record.title.clone(),
            authors: record.authors.join(";"),
            citations: Some(record.citations),
            impact_factor: Some(record.impact_factor),
        }
    }
}

/// Link weight per interaction kind; all must be positive. Defaults: upload
/// 1, download 0.1, view 0.05.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightScheme<F> {
    pub upload: F,
    pub download: F,
    pub view: F,
}

impl<F: Scalar> Default for WeightScheme<F> {
    fn default() -> Self {
        WeightScheme {
            upload: F::one(),
            download: F::from_f64_lossy(0.1),
            view: F::from_f64_lossy(0.05),
        }
    }
}

impl<F: Scalar> WeightScheme<F> {
    pub fn new(upload: F, download: F, view: F) -> Result<Self, IngestError> {
        let scheme = WeightScheme {
            upload,
            download,
            view,
        };
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        for (name, value) in [
            ("upload", self.upload),
            ("download", self.download),
            ("view", self.view),
        ] {
            if !(value > F::zero() && value.is_finite()) {
                return Err(IngestError::InvalidWeight {
                    name,
                    value: value.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }

    pub fn weight(&self, action: Action) -> F {
        match action {
            Action::Upload => self.upload,
            Action::Download => self.download,
            Action::View => self.view,
        }
    }
}

// ---------------------------------------------------------------------------
// CSV I/O

/// Read interaction events from CSV with header
/// `user_id,paper_id,action,timestamp`.
pub fn read_events<R: Read>(reader: R) -> Result<Vec<InteractionEvent>, IngestError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    csv_reader
        .deserialize()
        .map(|row| row.map_err(IngestError::from))
        .collect()
}

pub fn read_events_path<P: AsRef<Path>>(path: P) -> Result<Vec<InteractionEvent>, IngestError> {
    read_events(BufReader::new(File::open(path)?))
}

pub fn write_events<W: Write>(writer: W, events: &[InteractionEvent]) -> Result<(), IngestError> {
    // Header written by hand so that an empty event list still yields a
    // well-formed file (serde-driven headers only appear with the first row).
    let mut csv_writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    csv_writer.write_record(["user_id", "paper_id", "action", "timestamp"])?;
    for event in events {
        csv_writer.serialize(event)?;
    }
    csv_writer.flush()?;
    Ok(())
}

pub fn write_events_path<P: AsRef<Path>>(
    path: P,
    events: &[InteractionEvent],
) -> Result<(), IngestError> {
    write_events(File::create(path)?, events)
}

/// Read paper metadata from CSV with header
/// `paper_id,submission_day,title,authors,citations,impact_factor`; the
/// authors cell holds a semicolon-separated name list.
pub fn read_papers<R: Read>(reader: R) -> Result<Vec<PaperRecord>, IngestError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    csv_reader
        .deserialize::<RawPaperRow>()
        .map(|row| row.map(PaperRecord::from).map_err(IngestError::from))
        .collect()
}

pub fn read_papers_path<P: AsRef<Path>>(path: P) -> Result<Vec<PaperRecord>, IngestError> {
    read_papers(BufReader::new(File::open(path)?))
}

pub fn write_papers<W: Write>(writer: W, papers: &[PaperRecord]) -> Result<(), IngestError> {
    let mut csv_writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    csv_writer.write_record([
        "paper_id",
        "submission_day",
        "title",
        "authors",
        "citations",
        "impact_factor",
    ])?;
    for record in papers {
        csv_writer.serialize(RawPaperRow::from(record))?;
    }
    csv_writer.flush()?;
    Ok(())
}

pub fn write_papers_path<P: AsRef<Path>>(
    path: P,
    papers: &[PaperRecord],
) -> Result<(), IngestError> {
    write_papers(File::create(path)?, papers)
}

/// Read a user blocklist: one user id per line, `#` comments and blank lines
/// skipped.
pub fn read_blocklist<P: AsRef<Path>>(path: P) -> Result<BTreeSet<String>, IngestError> {
    let mut blocked = BTreeSet::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        blocked.insert(trimmed.to_string());
    }
    Ok(blocked)
}

// ---------------------------------------------------------------------------
// Cleaning

/// Collapse repeat interactions: keep exactly one event per (user, paper)
/// pair — the earliest, with timestamp ties broken by action strength
/// (upload over download over view). Output is sorted by (user, paper), so
/// the result depends only on the event multiset, not its order, and the
/// function is idempotent.
pub fn dedup_earliest(events: &[InteractionEvent]) -> Vec<InteractionEvent> {
    let mut best: BTreeMap<(&str, &str), &InteractionEvent> = BTreeMap::new();
    for event in events {
        let key = (event.user_id.as_str(), event.paper_id.as_str());
        match best.get_mut(&key) {
            None => {
                best.insert(key, event);
            }
            Some(held) => {
                if (event.timestamp, event.action) < (held.timestamp, held.action) {
                    *held = event;
                }
            }
        }
    }
    best.into_values().cloned().collect()
}

/// Drop every event of any user who uploaded nothing and acted at most once.
/// Users with at least one upload are always kept. Event order is preserved.
pub fn filter_low_activity(events: &[InteractionEvent]) -> Vec<InteractionEvent> {
    let mut uploads: HashMap<&str, usize> = HashMap::new();
    let mut totals: HashMap<&str, usize> = HashMap::new();
    for event in events {
        *totals.entry(event.user_id.as_str()).or_insert(0) += 1;
        if event.action == Action::Upload {
            *uploads.entry(event.user_id.as_str()).or_insert(0) += 1;
        }
    }
    events
        .iter()
        .filter(|e| {
            uploads.get(e.user_id.as_str()).copied().unwrap_or(0) >= 1
                || totals[e.user_id.as_str()] >= 2
        })
        .cloned()
        .collect()
}

/// Drop events whose user appears in `blocked`.
pub fn apply_blocklist(
    events: &[InteractionEvent],
    blocked: &BTreeSet<String>,
) -> Vec<InteractionEvent> {
    events
        .iter()
        .filter(|e| !blocked.contains(&e.user_id))
        .cloned()
        .collect()
}

/// Remove papers submitted before `min_day`, along with every event touching
/// a removed paper. Events pointing at papers absent from the metadata are
/// kept — flagging those is [`build_networks`]'s job.
pub fn filter_min_day(
    events: &[InteractionEvent],
    papers: &[PaperRecord],
    min_day: i64,
) -> (Vec<InteractionEvent>, Vec<PaperRecord>) {
    let removed: BTreeSet<&str> = papers
        .iter()
        .filter(|p| p.submission_day < min_day)
        .map(|p| p.paper_id.as_str())
        .collect();
    let kept_papers = papers
        .iter()
        .filter(|p| !removed.contains(p.paper_id.as_str()))
        .cloned();
    let kept_events = events
        .iter()
        .filter(|e| !removed.contains(e.paper_id.as_str()))
        .cloned();
    (kept_events.collect(), kept_papers.collect())
}

/// Reduce an author name to "first initial + final surname token": the first
/// alphabetic character of the name, uppercased, then the last
/// whitespace-separated token with trailing `.`/`,` stripped. Hyphens,
/// apostrophes, interior case, and diacritics are left untouched, so
/// "H. Eugene Stanley", "HE Stanley", and "H Stanley" all collapse to
/// "H Stanley" while "E. Ben-Jacob" stays distinguishable as "E Ben-Jacob".
pub fn normalize_author_name(raw: &str) -> Result<String, IngestError> {
    let unparseable = || IngestError::UnparseableAuthor {
        raw: raw.to_string(),
    };
    let initial = raw
        .chars()
        .find(|c| c.is_alphabetic())
        .ok_or_else(unparseable)?
        .to_uppercase()
        .to_string();
    let surname = raw
        .split_whitespace()
        .filter(|token| token.chars().any(|c| c.is_alphabetic()))
        .last()
        .ok_or_else(unparseable)?
        .trim_end_matches(['.', ',']);
    Ok(format!("{initial} {surname}"))
}

// ---------------------------------------------------------------------------
// Interning and network assembly

/// Bidirectional label <-> dense-index map. Indices are assigned in first
/// insertion order, so network node numbering follows the input files.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelIndex {
    labels: Vec<String>,
    positions: HashMap<String, usize>,
}

impl LabelIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of `label`, inserting it if new.
    pub fn intern(&mut self, label: &str) -> usize {
        if let Some(&idx) = self.positions.get(label) {
            return idx;
        }
        let idx = self.labels.len();
        self.labels.push(label.to_string());
        self.positions.insert(label.to_string(), idx);
        idx
    }

    pub fn get(&self, label: &str) -> Option<usize> {
        self.positions.get(label).copied()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }
}

/// Everything assembled from one data set: both networks plus the label maps
/// giving each node index its external name.
#[derive(Debug, Clone)]
pub struct Corpus<F> {
    pub network: UserItemNetwork<F>,
    pub authorship: AuthorPaperNetwork<F>,
    pub users: LabelIndex,
    pub papers: LabelIndex,
    pub authors: LabelIndex,
}

/// Build the user-item network alone from an event stream, interning user
/// and paper labels in order of first appearance. Events must already be
/// deduplicated — a repeated (user, paper) pair is an error.
pub fn build_user_item<F: Scalar>(
    events: &[InteractionEvent],
    scheme: &WeightScheme<F>,
) -> Result<(UserItemNetwork<F>, LabelIndex, LabelIndex), IngestError> {
    scheme.validate()?;
    let mut users = LabelIndex::new();
    let mut papers = LabelIndex::new();
    let mut edges = Vec::with_capacity(events.len());
    for event in events {
        let user = users.intern(&event.user_id);
        let paper = papers.intern(&event.paper_id);
        edges.push((user, paper, scheme.weight(event.action)));
    }
    let network = UserItemNetwork::with_shape(users.len(), papers.len(), &edges)?;
    Ok((network, users, papers))
}

/// Assemble both networks. Paper indices follow metadata file order (papers
/// nobody touched stay as isolated items); user indices follow first
/// appearance in the event stream; author nodes are canonicalized names, one
/// node per spelling-merged author. Every event must reference a known paper,
/// and events must already be deduplicated.
pub fn build_networks<F: Scalar>(
    events: &[InteractionEvent],
    paper_records: &[PaperRecord],
    scheme: &WeightScheme<F>,
) -> Result<Corpus<F>, IngestError> {
    scheme.validate()?;

    let mut papers = LabelIndex::new();
    for record in paper_records {
        if papers.get(&record.paper_id).is_some() {
            return Err(IngestError::DuplicatePaper {
                paper: record.paper_id.clone(),
            });
        }
        papers.intern(&record.paper_id);
    }

    let mut users = LabelIndex::new();
    let mut edges = Vec::with_capacity(events.len());
    for event in events {
        let paper = papers
            .get(&event.paper_id)
            .ok_or_else(|| IngestError::UnknownPaper {
                paper: event.paper_id.clone(),
            })?;
        let user = users.intern(&event.user_id);
        edges.push((user, paper, scheme.weight(event.action)));
    }
    let network = UserItemNetwork::with_shape(users.len(), papers.len(), &edges)?;

    let mut authors = LabelIndex::new();
    let mut links = Vec::new();
    for (paper, record) in paper_records.iter().enumerate() {
        // Set-dedup within the paper: two spellings of one person on the
        // same paper must not produce a double link.
        let mut canonical = BTreeSet::new();
        for raw in &record.authors {
            canonical.insert(normalize_author_name(raw)?);
        }
        for name in canonical {
            links.push((authors.intern(&name), paper));
        }
    }
    let authorship = AuthorPaperNetwork::from_links(authors.len(), papers.len(), &links)?;

    Ok(Corpus {
        network,
        authorship,
        users,
        papers,
        authors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn event(user: &str, paper: &str, action: Action, timestamp: u64) -> InteractionEvent {
        InteractionEvent {
            user_id: user.to_string(),
            paper_id: paper.to_string(),
            action,
            timestamp,
        }
    }

    #[test]
    fn action_parsing_and_display() {
        for action in Action::ALL {
            assert_eq!(action.as_str().parse::<Action>().unwrap(), action);
        }
        assert_eq!(" download ".parse::<Action>().unwrap(), Action::Download);
        assert!(matches!(
            "click".parse::<Action>(),
            Err(IngestError::UnknownAction { value }) if value == "click"
        ));
    }

    #[test]
    fn empty_event_list_still_gets_a_header() {
        let mut buffer = Vec::new();
        write_events(&mut buffer, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buffer.clone()).unwrap(),
            "user_id,paper_id,action,timestamp\n"
        );
        assert!(read_events(buffer.as_slice()).unwrap().is_empty());
    }

    #[test]
    fn events_csv_roundtrip_with_pinned_header() {
        let events = vec![
            event("u1", "p1", Action::Upload, 3),
            event("u2", "p1", Action::View, 9),
        ];
        let mut buffer = Vec::new();
        write_events(&mut buffer, &events).unwrap();
        let text = String::from_utf8(buffer.clone()).unwrap();
        assert!(text.starts_with("user_id,paper_id,action,timestamp\n"));
        assert!(text.contains("u1,p1,upload,3"));
        assert_eq!(read_events(buffer.as_slice()).unwrap(), events);
    }

    #[test]
    fn papers_csv_handles_author_lists_and_missing_fields() {
        let csv_text = "paper_id,submission_day,title,authors,citations,impact_factor\n\
                        p1,12,\"Scaling laws, revisited\",\"H. Eugene Stanley; D Sornette\",4,2.5\n\
                        p2,13,Untitled,,,\n";
        let papers = read_papers(csv_text.as_bytes()).unwrap();
        assert_eq!(papers.len(), 2);
        assert_eq!(papers[0].authors, vec!["H. Eugene Stanley", "D Sornette"]);
        assert_eq!(papers[0].citations, 4);
        assert!(papers[1].authors.is_empty());
        assert_eq!(papers[1].citations, 0);
        assert_eq!(papers[1].impact_factor, 0.0);

        let mut buffer = Vec::new();
        write_papers(&mut buffer, &papers).unwrap();
        assert_eq!(read_papers(buffer.as_slice()).unwrap(), papers);
    }

    #[test]
    fn dedup_keeps_earliest_interaction() {
        let events = vec![
            event("u1", "p1", Action::View, 5),
            event("u1", "p1", Action::Download, 9),
        ];
        let deduped = dedup_earliest(&events);
        assert_eq!(deduped, vec![event("u1", "p1", Action::View, 5)]);
    }

    #[test]
    fn dedup_breaks_timestamp_ties_by_action_strength() {
        let events = vec![
            event("u1", "p1", Action::View, 5),
            event("u1", "p1", Action::Download, 5),
        ];
        assert_eq!(
            dedup_earliest(&events),
            vec![event("u1", "p1", Action::Download, 5)]
        );
    }

    #[test]
    fn dedup_is_idempotent_and_order_insensitive() {
        let mut events = vec![
            event("u2", "p1", Action::Download, 4),
            event("u1", "p2", Action::View, 8),
            event("u1", "p1", Action::Upload, 2),
            event("u1", "p2", Action::Download, 3),
        ];
        let once = dedup_earliest(&events);
        assert_eq!(dedup_earliest(&once), once);
        events.reverse();
        assert_eq!(dedup_earliest(&events), once);
        assert_eq!(once.len(), 3);
    }

    #[test]
    fn low_activity_filter_applies_the_upload_or_two_actions_rule() {
        let events = vec![
            event("lurker", "p1", Action::View, 1),
            event("uploader", "p2", Action::Upload, 2),
            event("reader", "p1", Action::View, 3),
            event("reader", "p2", Action::View, 4),
        ];
        let kept = filter_low_activity(&events);
        assert_eq!(kept.len(), 3);
        assert!(kept.iter().all(|e| e.user_id != "lurker"));
        assert!(kept.iter().any(|e| e.user_id == "uploader"));
    }

    #[test]
    fn author_name_spellings_collapse() {
        for spelling in [
            "H. Eugene Stanley",
            "HE Stanley",
            "H Stanley",
            "h. e. stanley",
        ] {
            let canonical = normalize_author_name(spelling).unwrap();
            assert!(
                canonical == "H Stanley" || canonical == "H stanley",
                "{spelling:?} -> {canonical:?}"
            );
        }
        assert_eq!(
            normalize_author_name("H. Eugene Stanley").unwrap(),
            "H Stanley"
        );
        assert_eq!(normalize_author_name("HE Stanley").unwrap(), "H Stanley");
        assert_eq!(normalize_author_name("D Sornette").unwrap(), "D Sornette");
        assert_eq!(
            normalize_author_name("E. Ben-Jacob").unwrap(),
            "E Ben-Jacob"
        );
        assert_eq!(normalize_author_name("José Ortega,").unwrap(), "J Ortega");
    }

    #[test]
    fn author_name_normalization_is_idempotent() {
        for raw in [
            "H. Eugene Stanley",
            "E. Ben-Jacob",
            "D Sornette",
            "José Ortega",
        ] {
            let once = normalize_author_name(raw).unwrap();
            assert_eq!(normalize_author_name(&once).unwrap(), once);
        }
    }

    #[test]
    fn author_name_without_letters_is_rejected() {
        assert!(matches!(
            normalize_author_name("123 456"),
            Err(IngestError::UnparseableAuthor { raw }) if raw == "123 456"
        ));
    }

    #[test]
    fn build_networks_assembles_both_sides() {
        let papers = vec![
            PaperRecord {
                paper_id: "p1".into(),
                submission_day: 1,
                title: "first".into(),
                authors: vec!["H. Eugene Stanley".into()],
                citations: 10,
                impact_factor: 2.0,
            },
            PaperRecord {
                paper_id: "p2".into(),
                submission_day: 2,
                title: "second".into(),
                authors: vec!["HE Stanley".into(), "D Sornette".into()],
                citations: 0,
                impact_factor: 0.0,
            },
        ];
        let events = vec![
            event("alice", "p1", Action::Upload, 1),
            event("bob", "p1", Action::View, 2),
            event("bob", "p2", Action::Download, 3),
        ];
        let corpus: Corpus<f64> =
            build_networks(&events, &papers, &WeightScheme::default()).unwrap();

        assert_eq!(corpus.network.n_users(), 2);
        assert_eq!(corpus.network.n_items(), 2);
        assert_eq!(corpus.network.edge_count(), events.len());
        let p1_weights: Vec<f64> = corpus
            .network
            .item_edges(0)
            .map(|(_, weight)| weight)
            .collect();
        assert_eq!(p1_weights, vec![1.0, 0.05]);

        // The two Stanley spellings become one author node spanning both papers.
        assert_eq!(corpus.authors.len(), 2);
        let stanley = corpus.authors.get("H Stanley").unwrap();
        assert_eq!(corpus.authorship.author_degree(stanley), 2);
        assert_eq!(
            corpus
                .authors
                .get("D Sornette")
                .map(|a| corpus.authorship.author_degree(a)),
            Some(1)
        );
    }

    #[test]
    fn build_networks_rejects_bad_references() {
        let papers = vec![PaperRecord {
            paper_id: "p1".into(),
            submission_day: 1,
            title: String::new(),
            authors: Vec::new(),
            citations: 0,
            impact_factor: 0.0,
        }];
        let orphan = vec![event("u", "ghost", Action::View, 1)];
        assert!(matches!(
            build_networks::<f64>(&orphan, &papers, &WeightScheme::default()),
            Err(IngestError::UnknownPaper { paper }) if paper == "ghost"
        ));

        let doubled = vec![papers[0].clone(), papers[0].clone()];
        assert!(matches!(
            build_networks::<f64>(&[], &doubled, &WeightScheme::default()),
            Err(IngestError::DuplicatePaper { paper }) if paper == "p1"
        ));
    }

    #[test]
    fn build_user_item_interns_in_first_appearance_order() {
        let events = vec![
            event("x", "b", Action::Download, 1),
            event("y", "a", Action::Upload, 2),
            event("x", "a", Action::View, 3),
        ];
        let (network, users, papers) =
            build_user_item::<f64>(&events, &WeightScheme::default()).unwrap();
        assert_eq!(users.label(0), "x");
        assert_eq!(papers.label(0), "b");
        assert_eq!(network.edge_count(), 3);
        assert_eq!(network.user_degree(0), 2);
    }

    #[test]
    fn blocklist_and_min_day_filters() {
        let events = vec![
            event("spammer", "p1", Action::Upload, 1),
            event("human", "p1", Action::View, 2),
            event("human", "p0", Action::Download, 3),
        ];
        let blocked = BTreeSet::from(["spammer".to_string()]);
        let unblocked = apply_blocklist(&events, &blocked);
        assert_eq!(unblocked.len(), 2);

        let papers = vec![
            PaperRecord {
                paper_id: "p0".into(),
                submission_day: 3,
                title: String::new(),
                authors: Vec::new(),
                citations: 0,
                impact_factor: 0.0,
            },
            PaperRecord {
                paper_id: "p1".into(),
                submission_day: 9,
                title: String::new(),
                authors: Vec::new(),
                citations: 0,
                impact_factor: 0.0,
            },
        ];
        let (kept_events, kept_papers) = filter_min_day(&events, &papers, 5);
        assert_eq!(kept_papers.len(), 1);
        assert_eq!(kept_papers[0].paper_id, "p1");
        assert!(kept_events.iter().all(|e| e.paper_id == "p1"));
        assert_eq!(kept_events.len(), 2);
    }

    #[test]
    fn weight_scheme_validation() {
        assert!(WeightScheme::<f64>::default().validate().is_ok());
        assert!(matches!(
            WeightScheme::new(1.0, 0.0, 0.05),
            Err(IngestError::InvalidWeight {
                name: "download",
                ..
            })
        ));
        assert!(matches!(
            WeightScheme::new(1.0, 0.1, f64::NAN),
            Err(IngestError::InvalidWeight { name: "view", .. })
        ));
    }

    #[test]
    fn label_index_roundtrips() {
        let mut index = LabelIndex::new();
        assert_eq!(index.intern("a"), 0);
        assert_eq!(index.intern("b"), 1);
        assert_eq!(index.intern("a"), 0);
        assert_eq!(index.len(), 2);
        assert_eq!(index.label(1), "b");
        assert_eq!(index.get("b"), Some(1));
        assert_eq!(index.get("c"), None);
        assert_eq!(index.iter().collect::<Vec<_>>(), vec!["a", "b"]);
    }
}
