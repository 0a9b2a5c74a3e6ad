//! Sparse bipartite networks and the shared aggregation kernel.
//!
//! Two graph types live here: [`UserItemNetwork`] (weighted user-item
//! interactions) and [`AuthorPaperNetwork`] (binary authorship links). Both
//! store their edges in compressed sparse row form twice — once per traversal
//! direction — so that score propagation in either direction is a cache
//! friendly linear scan. Networks are immutable after construction and safe
//! to share across threads.
//!
//! All four ranking algorithms reduce to repeated calls of one kernel,
//! [`UserItemNetwork::aggregate`]: for every node on the output side, sum the
//! mean-shifted scores of its neighbours and damp by a power of its degree,
//!
//! ```text
//! out_t = deg_t^(-theta) * sum over neighbours s of  w_ts * (in_s - rho * shift_mean)
//! ```
//!
//! Nodes with degree zero output exactly 0, which sidesteps both 0^0 and
//! division by zero. Summation runs in ascending neighbour id so results are
//! bit-reproducible run to run.

use thiserror::Error;

use crate::scalar::Scalar;

/// Node class a score vector or aggregation direction refers to.
///
/// Papers and simulated items share the `Item` side; `Author` only appears in
/// connection with an [`AuthorPaperNetwork`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    User,
    Item,
    Author,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::User => write!(f, "user"),
            Side::Item => write!(f, "item"),
            Side::Author => write!(f, "author"),
        }
    }
}

/// Errors raised while building or querying a network.
#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("duplicate edge between user {user} and item {item}")]
    DuplicateEdge { user: usize, item: usize },
    #[error("edge (user {user}, item {item}) has non-positive or non-finite weight {weight}")]
    InvalidWeight {
        user: usize,
        item: usize,
        weight: f64,
    },
    #[error("edge (user {user}, item {item}) outside declared shape {n_users} x {n_items}")]
    EdgeOutOfBounds {
        user: usize,
        item: usize,
        n_users: usize,
        n_items: usize,
    },
    #[error("duplicate authorship link between author {author} and paper {paper}")]
    DuplicateLink { author: usize, paper: usize },
    #[error(
        "link (author {author}, paper {paper}) outside declared shape {n_authors} x {n_papers}"
    )]
    LinkOutOfBounds {
        author: usize,
        paper: usize,
        n_authors: usize,
        n_papers: usize,
    },
    #[error("author {author} has no papers")]
    AuthorWithoutPapers { author: usize },
    #[error("score vector is on the {found} side, expected {expected}")]
    SideMismatch { expected: Side, found: Side },
    #[error("score vector has {found} entries, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("network has no {side} side")]
    UnsupportedSide { side: Side },
}

/// One score per node of a given side.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector<F> {
    side: Side,
    values: Vec<F>,
}

impl<F: Scalar> ScoreVector<F> {
    pub fn new(side: Side, values: Vec<F>) -> Self {
        ScoreVector { side, values }
    }

    /// The uniform unit-norm vector `(1/sqrt(n), ..., 1/sqrt(n))` that every
    /// algorithm starts from.
    pub fn uniform_unit(side: Side, len: usize) -> Self {
        let value = if len == 0 {
            F::zero()
        } else {
            F::from_usize_lossy(len).sqrt().recip()
        };
        ScoreVector {
            side,
            values: vec![value; len],
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [F] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<F> {
        self.values
    }

    pub fn l2_norm(&self) -> F {
        self.values.iter().map(|&v| v * v).sum::<F>().sqrt()
    }

    /// Arithmetic mean over all nodes of the side (0 for an empty side).
    pub fn mean(&self) -> F {
        if self.values.is_empty() {
            F::zero()
        } else {
            self.values.iter().copied().sum::<F>() / F::from_usize_lossy(self.values.len())
        }
    }
}

/// Compressed sparse row half of a bipartite graph: for each row node, the
/// column ids (ascending) and edge weights of its incident edges.
#[derive(Debug, Clone, PartialEq)]
struct Csr<F> {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<F>,
}

impl<F: Scalar> Csr<F> {
    /// Build from (row, col, weight) triples. Returns the offending pair on a
    /// duplicate (row, col). Bounds are the caller's responsibility.
    fn build(
        n_rows: usize,
        edges: impl Iterator<Item = (usize, usize, F)> + Clone,
    ) -> Result<Self, (usize, usize)> {
        let mut offsets = vec![0usize; n_rows + 1];
        let mut n_edges = 0usize;
        for (row, _, _) in edges.clone() {
            offsets[row + 1] += 1;
            n_edges += 1;
        }
        for i in 0..n_rows {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut cols = vec![0usize; n_edges];
        let mut weights = vec![F::zero(); n_edges];
        for (row, col, weight) in edges {
            let slot = cursor[row];
            cols[slot] = col;
            weights[slot] = weight;
            cursor[row] += 1;
        }
        // Sort each row by column id and reject duplicates.
        let mut scratch: Vec<(usize, F)> = Vec::new();
        for row in 0..n_rows {
            let span = offsets[row]..offsets[row + 1];
            if span.len() < 2 {
                continue;
            }
            scratch.clear();
            scratch.extend(
                cols[span.clone()]
                    .iter()
                    .copied()
                    .zip(weights[span.clone()].iter().copied()),
            );
            scratch.sort_unstable_by_key(|&(col, _)| col);
            for pair in scratch.windows(2) {
                if pair[0].0 == pair[1].0 {
                    return Err((row, pair[0].0));
                }
            }
            for (offset, &(col, weight)) in span.zip(scratch.iter()) {
                cols[offset] = col;
                weights[offset] = weight;
            }
        }
        Ok(Csr {
            offsets,
            cols,
            weights,
        })
    }

    fn n_rows(&self) -> usize {
        self.offsets.len() - 1
    }

    fn degree(&self, row: usize) -> usize {
        self.offsets[row + 1] - self.offsets[row]
    }

    fn row(&self, row: usize) -> impl Iterator<Item = (usize, F)> + '_ {
        let span = self.offsets[row]..self.offsets[row + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.weights[span].iter().copied())
    }

    fn map_weights(&self, mut f: impl FnMut(usize, usize, F) -> F) -> Csr<F> {
        let mut weights = Vec::with_capacity(self.weights.len());
        for row in 0..self.n_rows() {
            for (col, w) in self.row(row) {
                weights.push(f(row, col, w));
            }
        }
        Csr {
            offsets: self.offsets.clone(),
            cols: self.cols.clone(),
            weights,
        }
    }

    /// The `deg^(-exponent) * sum w * (in - shift)` kernel over every row.
    fn aggregate(&self, input: &[F], exponent: F, shift: F) -> Vec<F> {
        let mut out = vec![F::zero(); self.n_rows()];
        for row in 0..self.n_rows() {
            let degree = self.degree(row);
            if degree == 0 {
                continue; // isolated node: contributes and receives nothing
            }
            let mut acc = F::zero();
            for (col, weight) in self.row(row) {
                acc += weight * (input[col] - shift);
            }
            out[row] = acc * degree_scale(degree, exponent);
        }
        out
    }
}

/// `degree^(-exponent)`, with the 0 and 1 exponents computed exactly so that
/// sums and plain averages don't pick up `powf` rounding.
fn degree_scale<F: Scalar>(degree: usize, exponent: F) -> F {
    if exponent == F::zero() {
        F::one()
    } else {
        let d = F::from_usize_lossy(degree);
        if exponent == F::one() {
            d.recip()
        } else {
            d.powf(-exponent)
        }
    }
}

/// Weighted bipartite graph between `N` users and `M` items.
///
/// Stored edges always carry strictly positive weight; the unweighted
/// adjacency is recovered with [`unweighted_view`](Self::unweighted_view).
/// Degrees count stored edges (they ignore weights).
#[derive(Debug, Clone, PartialEq)]
pub struct UserItemNetwork<F> {
    by_user: Csr<F>,
    by_item: Csr<F>,
}

impl<F: Scalar> UserItemNetwork<F> {
    /// Build from `(user, item, weight)` triples, inferring the shape from
    /// the largest ids present. Duplicate pairs and non-positive weights are
    /// rejected.
    pub fn from_edges(edges: &[(usize, usize, F)]) -> Result<Self, NetworkError> {
        let n_users = edges.iter().map(|&(u, _, _)| u + 1).max().unwrap_or(0);
        let n_items = edges.iter().map(|&(_, i, _)| i + 1).max().unwrap_or(0);
        Self::with_shape(n_users, n_items, edges)
    }

    /// Build with an explicit shape, so trailing isolated nodes (users who
    /// never acted, items nobody touched) stay part of the network.
    pub fn with_shape(
        n_users: usize,
        n_items: usize,
        edges: &[(usize, usize, F)],
    ) -> Result<Self, NetworkError> {
        for &(user, item, weight) in edges {
            if user >= n_users || item >= n_items {
                return Err(NetworkError::EdgeOutOfBounds {
                    user,
                    item,
                    n_users,
                    n_items,
                });
            }
            if !(weight > F::zero()) || !weight.is_finite() {
                return Err(NetworkError::InvalidWeight {
                    user,
                    item,
                    weight: weight.to_f64_lossy(),
                });
            }
        }
        let by_user = Csr::build(n_users, edges.iter().copied())
            .map_err(|(user, item)| NetworkError::DuplicateEdge { user, item })?;
        let by_item = Csr::build(n_items, edges.iter().map(|&(u, i, w)| (i, u, w)))
            .expect("duplicates already rejected in the by-user pass");
        Ok(UserItemNetwork { by_user, by_item })
    }

    pub fn n_users(&self) -> usize {
        self.by_user.n_rows()
    }

    pub fn n_items(&self) -> usize {
        self.by_item.n_rows()
    }

    pub fn edge_count(&self) -> usize {
        self.by_user.cols.len()
    }

    /// Unweighted degree `k_i` of one user.
    pub fn user_degree(&self, user: usize) -> usize {
        self.by_user.degree(user)
    }

    /// Unweighted degree `k_alpha` of one item.
    pub fn item_degree(&self, item: usize) -> usize {
        self.by_item.degree(item)
    }

    /// Items incident to a user, ascending by item id.
    pub fn user_edges(&self, user: usize) -> impl Iterator<Item = (usize, F)> + '_ {
        self.by_user.row(user)
    }

    /// Users incident to an item, ascending by user id.
    pub fn item_edges(&self, item: usize) -> impl Iterator<Item = (usize, F)> + '_ {
        self.by_item.row(item)
    }

    /// Same topology with every weight replaced by 1.
    pub fn unweighted_view(&self) -> Self {
        UserItemNetwork {
            by_user: self.by_user.map_weights(|_, _, _| F::one()),
            by_item: self.by_item.map_weights(|_, _, _| F::one()),
        }
    }

    /// Same topology with every weight divided by `k_user^exponent`, the
    /// active-user bias reduction used by EigenRumor (exponent 0.5 there).
    /// Every stored edge has a user of degree >= 1, so this cannot fail.
    pub fn normalized_view(&self, exponent: F) -> Self {
        let scale: Vec<F> = (0..self.n_users())
            .map(|u| degree_scale(self.user_degree(u), exponent))
            .collect();
        UserItemNetwork {
            by_user: self.by_user.map_weights(|user, _, w| w * scale[user]),
            by_item: self.by_item.map_weights(|_, user, w| w * scale[user]),
        }
    }

    /// Whether every node is reachable from every other through the bipartite
    /// edges. Empty networks count as connected; the algorithms reject them
    /// separately.
    pub fn is_connected(&self) -> bool {
        let (n, m) = (self.n_users(), self.n_items());
        if n + m == 0 {
            return true;
        }
        let mut seen_user = vec![false; n];
        let mut seen_item = vec![false; m];
        let mut queue: Vec<(Side, usize)> = Vec::new();
        if n > 0 {
            seen_user[0] = true;
            queue.push((Side::User, 0));
        } else {
            seen_item[0] = true;
            queue.push((Side::Item, 0));
        }
        let mut visited = 1usize;
        while let Some((side, node)) = queue.pop() {
            match side {
                Side::User => {
                    for (item, _) in self.by_user.row(node) {
                        if !seen_item[item] {
                            seen_item[item] = true;
                            visited += 1;
                            queue.push((Side::Item, item));
                        }
                    }
                }
                Side::Item => {
                    for (user, _) in self.by_item.row(node) {
                        if !seen_user[user] {
                            seen_user[user] = true;
                            visited += 1;
                            queue.push((Side::User, user));
                        }
                    }
                }
                Side::Author => unreachable!("user-item traversal never queues authors"),
            }
        }
        visited == n + m
    }

    /// Mean-shifted degree-damped aggregation toward one side:
    ///
    /// `out_t = deg_t^(-exponent) * sum_{s ~ t} w_ts * (in_s - shift_strength * shift_mean)`
    ///
    /// `toward` selects the output side; the input vector must live on the
    /// opposite side. Degree-0 output nodes score exactly 0.
    pub fn aggregate(
        &self,
        input: &ScoreVector<F>,
        toward: Side,
        exponent: F,
        shift_strength: F,
        shift_mean: F,
    ) -> Result<ScoreVector<F>, NetworkError> {
        let (csr, expected_side, expected_len) = match toward {
            Side::User => (&self.by_user, Side::Item, self.n_items()),
            Side::Item => (&self.by_item, Side::User, self.n_users()),
            Side::Author => return Err(NetworkError::UnsupportedSide { side: Side::Author }),
        };
        if input.side() != expected_side {
            return Err(NetworkError::SideMismatch {
                expected: expected_side,
                found: input.side(),
            });
        }
        if input.len() != expected_len {
            return Err(NetworkError::LengthMismatch {
                expected: expected_len,
                found: input.len(),
            });
        }
        let shift = shift_strength * shift_mean;
        Ok(ScoreVector::new(
            toward,
            csr.aggregate(input.values(), exponent, shift),
        ))
    }
}

/// Binary bipartite graph between `O` authors and `M` papers.
///
/// Links are unit weight by construction. Every author carries at least one
/// link (an author node only exists because some paper listed it); papers
/// with no known authors are allowed and simply have degree 0. Papers share
/// the [`Side::Item`] tag with the user-item network they annotate.
#[derive(Debug, Clone, PartialEq)]
pub struct AuthorPaperNetwork<F> {
    by_author: Csr<F>,
    by_paper: Csr<F>,
}

impl<F: Scalar> AuthorPaperNetwork<F> {
    /// Build from `(author, paper)` pairs with an explicit shape.
    pub fn from_links(
        n_authors: usize,
        n_papers: usize,
        links: &[(usize, usize)],
    ) -> Result<Self, NetworkError> {
        for &(author, paper) in links {
            if author >= n_authors || paper >= n_papers {
                return Err(NetworkError::LinkOutOfBounds {
                    author,
                    paper,
                    n_authors,
                    n_papers,
                });
            }
        }
        let by_author = Csr::build(n_authors, links.iter().map(|&(a, p)| (a, p, F::one())))
            .map_err(|(author, paper)| NetworkError::DuplicateLink { author, paper })?;
        let by_paper = Csr::build(n_papers, links.iter().map(|&(a, p)| (p, a, F::one())))
            .expect("duplicates already rejected in the by-author pass");
        for author in 0..n_authors {
            if by_author.degree(author) == 0 {
                return Err(NetworkError::AuthorWithoutPapers { author });
            }
        }
        Ok(AuthorPaperNetwork {
            by_author,
            by_paper,
        })
    }

    pub fn n_authors(&self) -> usize {
        self.by_author.n_rows()
    }

    pub fn n_papers(&self) -> usize {
        self.by_paper.n_rows()
    }

    pub fn link_count(&self) -> usize {
        self.by_author.cols.len()
    }

    /// Number of papers credited to an author (`d_m`, always >= 1).
    pub fn author_degree(&self, author: usize) -> usize {
        self.by_author.degree(author)
    }

    /// Number of known authors of a paper (`d_alpha`, may be 0).
    pub fn paper_degree(&self, paper: usize) -> usize {
        self.by_paper.degree(paper)
    }

    pub fn author_links(&self, author: usize) -> impl Iterator<Item = usize> + '_ {
        self.by_author.row(author).map(|(paper, _)| paper)
    }

    pub fn paper_links(&self, paper: usize) -> impl Iterator<Item = usize> + '_ {
        self.by_paper.row(paper).map(|(author, _)| author)
    }

    /// Same links with weights `1 / d_author^exponent` (EigenRumor's prolific
    /// author damping, exponent 0.5 there).
    pub fn normalized_view(&self, exponent: F) -> Self {
        let scale: Vec<F> = (0..self.n_authors())
            .map(|a| degree_scale(self.author_degree(a), exponent))
            .collect();
        AuthorPaperNetwork {
            by_author: self.by_author.map_weights(|author, _, w| w * scale[author]),
            by_paper: self.by_paper.map_weights(|_, author, w| w * scale[author]),
        }
    }

    /// The same kernel as [`UserItemNetwork::aggregate`], between the author
    /// and paper (item) sides.
    pub fn aggregate(
        &self,
        input: &ScoreVector<F>,
        toward: Side,
        exponent: F,
        shift_strength: F,
        shift_mean: F,
    ) -> Result<ScoreVector<F>, NetworkError> {
        let (csr, expected_side, expected_len) = match toward {
            Side::Author => (&self.by_author, Side::Item, self.n_papers()),
            Side::Item => (&self.by_paper, Side::Author, self.n_authors()),
            Side::User => return Err(NetworkError::UnsupportedSide { side: Side::User }),
        };
        if input.side() != expected_side {
            return Err(NetworkError::SideMismatch {
                expected: expected_side,
                found: input.side(),
            });
        }
        if input.len() != expected_len {
            return Err(NetworkError::LengthMismatch {
                expected: expected_len,
                found: input.len(),
            });
        }
        let shift = shift_strength * shift_mean;
        Ok(ScoreVector::new(
            toward,
            csr.aggregate(input.values(), exponent, shift),
        ))
    }
}
