//! Sparse parity-check matrices as Tanner graphs.
//!
//! Edges are stored in check-node-major order: the edges of check node `j`
//! occupy the contiguous index range `row_ptr[j]..row_ptr[j + 1]`, sorted by
//! variable-node index. Every per-edge message array in the decoders uses
//! this order.

use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    n_vns: usize,
    n_cns: usize,
    row_ptr: Vec<usize>,
    edge_vn: Vec<usize>,
    edge_cn: Vec<usize>,
    col_ptr: Vec<usize>,
    col_edges: Vec<usize>,
}

impl TannerGraph {
    /// Builds a graph from per-check-node neighbour lists. Lists may be given
    /// in any order; duplicates and out-of-range indices are rejected.
    pub fn from_rows(n_vns: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let n_cns = rows.len();
        let mut row_ptr = Vec::with_capacity(n_cns + 1);
        let mut edge_vn = Vec::new();
        let mut edge_cn = Vec::new();
        row_ptr.push(0);
        for (j, row) in rows.iter().enumerate() {
            let mut sorted = row.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameters(format!(
                    "check node {j} lists a variable node twice"
                )));
            }
            if let Some(&bad) = sorted.iter().find(|&&i| i >= n_vns) {
                return Err(Error::InvalidParameters(format!(
                    "check node {j} references variable node {bad} >= {n_vns}"
                )));
            }
            edge_cn.extend(std::iter::repeat_n(j, sorted.len()));
            edge_vn.extend_from_slice(&sorted);
            row_ptr.push(edge_vn.len());
        }

        let mut col_deg = vec![0usize; n_vns];
        for &i in &edge_vn {
            col_deg[i] += 1;
        }
        let mut col_ptr = Vec::with_capacity(n_vns + 1);
        col_ptr.push(0);
        for d in &col_deg {
            col_ptr.push(col_ptr.last().unwrap() + d);
        }
        // Edges are visited in increasing order, so each column list ends up
        // sorted by check-node index.
        let mut fill = col_ptr[..n_vns].to_vec();
        let mut col_edges = vec![0usize; edge_vn.len()];
        for (e, &i) in edge_vn.iter().enumerate() {
            col_edges[fill[i]] = e;
            fill[i] += 1;
        }

        Ok(Self {
            n_vns,
            n_cns,
            row_ptr,
            edge_vn,
            edge_cn,
            col_ptr,
            col_edges,
        })
    }

    /// Builds a graph from a dense 0/1 matrix given row by row.
    pub fn from_dense(h: &[Vec<u8>]) -> Result<Self> {
        let n = h.first().map_or(0, |r| r.len());
        if h.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameters("ragged dense matrix".into()));
        }
        let rows: Vec<Vec<usize>> = h
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, &b)| b != 0).map(|(i, _)| i).collect())
            .collect();
        Self::from_rows(n, &rows)
    }

    pub fn n_vns(&self) -> usize {
        self.n_vns
    }

    pub fn n_cns(&self) -> usize {
        self.n_cns
    }

    pub fn n_edges(&self) -> usize {
        self.edge_vn.len()
    }

    /// Edge index range of check node `j`.
    pub fn cn_edge_range(&self, j: usize) -> std::ops::Range<usize> {
        self.row_ptr[j]..self.row_ptr[j + 1]
    }

    /// Sorted variable-node neighbours M(j).
    pub fn cn_neighbors(&self, j: usize) -> &[usize] {
        &self.edge_vn[self.cn_edge_range(j)]
    }

    /// Edge indices incident to variable node `i`, sorted by check node.
    pub fn vn_edges(&self, i: usize) -> &[usize] {
        &self.col_edges[self.col_ptr[i]..self.col_ptr[i + 1]]
    }

    /// Sorted check-node neighbours N(i).
    pub fn vn_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.vn_edges(i).iter().map(|&e| self.edge_cn[e])
    }

    /// `(cn, vn)` endpoints of edge `e`.
    pub fn edge(&self, e: usize) -> (usize, usize) {
        (self.edge_cn[e], self.edge_vn[e])
    }

    pub fn edge_vns(&self) -> &[usize] {
        &self.edge_vn
    }

    /// Canonical edge list.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edge_cn.iter().copied().zip(self.edge_vn.iter().copied())
    }

    /// Looks up the edge joining check node `j` and variable node `i`.
    pub fn edge_index(&self, j: usize, i: usize) -> Option<usize> {
        let range = self.cn_edge_range(j);
        self.edge_vn[range.clone()]
            .binary_search(&i)
            .ok()
            .map(|p| range.start + p)
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.row_ptr.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        self.col_ptr.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn max_row_weight(&self) -> usize {
        self.row_weights().into_iter().max().unwrap_or(0)
    }

    pub fn max_col_weight(&self) -> usize {
        self.col_weights().into_iter().max().unwrap_or(0)
    }

    /// Largest number of variable nodes shared by any two check nodes.
    pub fn max_row_overlap(&self) -> usize {
        let mut best = 0;
        let mut counts = vec![0usize; self.n_cns];
        for j in 0..self.n_cns {
            let mut touched = Vec::new();
            for &i in self.cn_neighbors(j) {
                for k in self.vn_neighbors(i) {
                    if k > j {
                        if counts[k] == 0 {
                            touched.push(k);
                        }
                        counts[k] += 1;
                    }
                }
            }
            for k in touched {
                best = best.max(counts[k]);
                counts[k] = 0;
            }
        }
        best
    }

    /// True iff some pair of check nodes shares at least two variable nodes.
    pub fn has_four_cycle(&self) -> bool {
        self.max_row_overlap() >= 2
    }

    /// Parity checks of `bits` (0/1 per variable node).
    pub fn syndrome(&self, bits: &[u8]) -> Result<Vec<u8>> {
        if bits.len() != self.n_vns {
            return Err(Error::LengthMismatch {
                expected: self.n_vns,
                found: bits.len(),
            });
        }
        Ok((0..self.n_cns)
            .map(|j| self.cn_neighbors(j).iter().fold(0u8, |acc, &i| acc ^ (bits[i] & 1)))
            .collect())
    }

    pub fn is_codeword(&self, bits: &[u8]) -> Result<bool> {
        Ok(self.syndrome(bits)?.iter().all(|&s| s == 0))
    }

    pub fn from_alist(text: &str) -> Result<Self> {
        load_alist(text)
    }

    pub fn to_alist(&self) -> String {
        save_alist(self)
    }
}

/// Declared code parameters. The rate comes from the declared dimension,
/// never from the rank of the parity-check matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub n: usize,
    pub k: usize,
    pub dv: usize,
    pub dc: usize,
}

impl CodeSpec {
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Design parameters of a graph: `k = N - M` and the maximum degrees.
    pub fn for_graph(g: &TannerGraph) -> Self {
        Self {
            n: g.n_vns(),
            k: g.n_vns().saturating_sub(g.n_cns()),
            dv: g.max_col_weight(),
            dc: g.max_row_weight(),
        }
    }
}

/// How candidate rows are drawn for a new column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RowSampling {
    /// Uniform over rows whose weight is still below `dc`.
    Uniform,
    /// Proportional to each row's remaining capacity `dc - weight`.
    #[default]
    CapacityWeighted,
}

/// Random column-by-column construction of a `(dv, dc)`-regular code
/// without 4-cycles.
///
/// Columns are appended one at a time; a column whose rows would share two
/// positions with an existing column is rejected and redrawn. After
/// `column_retries` failed draws the construction backtracks to a random
/// earlier column (at most `backtrack_window` columns back, or anywhere if
/// unset) and discards everything after it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegularConstruction {
    pub n: usize,
    pub dv: usize,
    pub dc: usize,
    pub seed: u64,
    pub max_restarts: usize,
    pub column_retries: usize,
    pub backtrack_window: Option<usize>,
    pub sampling: RowSampling,
}

impl Default for RegularConstruction {
    fn default() -> Self {
        Self::new(1500, 3, 15, 1)
    }
}

impl RegularConstruction {
    pub fn new(n: usize, dv: usize, dc: usize, seed: u64) -> Self {
        Self {
            n,
            dv,
            dc,
            seed,
            max_restarts: 10_000,
            column_retries: 50,
            backtrack_window: Some(64),
            sampling: RowSampling::default(),
        }
    }

    pub fn n_checks(&self) -> Result<usize> {
        if self.n == 0 || self.dv == 0 || self.dc == 0 {
            return Err(Error::InvalidParameters("n, dv and dc must be at least 1".into()));
        }
        if !(self.n * self.dv).is_multiple_of(self.dc) {
            return Err(Error::InvalidParameters(format!(
                "n*dv = {} is not divisible by dc = {}",
                self.n * self.dv,
                self.dc
            )));
        }
        let m = self.n * self.dv / self.dc;
        if self.dv > m {
            return Err(Error::InvalidParameters(format!(
                "dv = {} exceeds the number of checks {m}",
                self.dv
            )));
        }
        Ok(m)
    }

    pub fn build(&self) -> Result<TannerGraph> {
        let m = self.n_checks()?;
        let (n, dv, dc) = (self.n, self.dv, self.dc);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);

        let mut weight = vec![0usize; m];
        // partners[r] lists every row already sharing a column with r.
        let mut partners: Vec<Vec<usize>> = vec![Vec::new(); m];
        let mut cols: Vec<usize> = Vec::with_capacity(n * dv);
        let mut restarts = 0usize;
        let mut open: Vec<usize> = Vec::with_capacity(m);
        let mut pick: Vec<usize> = Vec::with_capacity(dv);

        while cols.len() < n * dv {
            let col = cols.len() / dv;
            open.clear();
            open.extend((0..m).filter(|&r| weight[r] < dc));

            let mut placed = false;
            if open.len() >= dv {
                for _ in 0..self.column_retries.max(1) {
                    pick.clear();
                    match self.sampling {
                        RowSampling::Uniform => {
                            pick.extend(open.choose_multiple(&mut rng, dv).copied());
                        }
                        RowSampling::CapacityWeighted => {
                            let chosen = open
                                .choose_multiple_weighted(&mut rng, dv, |&r| (dc - weight[r]) as f64)
                                .expect("positive weights");
                            pick.extend(chosen.copied());
                        }
                    }
                    let clash = pick
                        .iter()
                        .enumerate()
                        .any(|(a, &ra)| pick[a + 1..].iter().any(|rb| partners[ra].contains(rb)));
                    if !clash {
                        placed = true;
                        break;
                    }
                }
            }

            if placed {
                pick.sort_unstable();
                for (a, &ra) in pick.iter().enumerate() {
                    weight[ra] += 1;
                    for &rb in &pick[a + 1..] {
                        partners[ra].push(rb);
                        partners[rb].push(ra);
                    }
                }
                cols.extend_from_slice(&pick);
                continue;
            }

            restarts += 1;
            if restarts > self.max_restarts || col == 0 && open.len() < dv {
                return Err(Error::ConstructionFailed { restarts });
            }
            let lo = match self.backtrack_window {
                Some(w) => col.saturating_sub(w.max(1)),
                None => 0,
            };
            let target = if col == 0 { 0 } else { rng.random_range(lo..col) };
            while cols.len() > target * dv {
                let start = cols.len() - dv;
                let removed: Vec<usize> = cols.drain(start..).collect();
                for (a, &ra) in removed.iter().enumerate() {
                    weight[ra] -= 1;
                    for &rb in &removed[a + 1..] {
                        remove_one(&mut partners[ra], rb);
                        remove_one(&mut partners[rb], ra);
                    }
                }
            }
        }

        let mut rows: Vec<Vec<usize>> = vec![Vec::with_capacity(dc); m];
        for (c, chunk) in cols.chunks(dv).enumerate() {
            for &r in chunk {
                rows[r].push(c);
            }
        }
        TannerGraph::from_rows(n, &rows)
    }
}

fn remove_one(list: &mut Vec<usize>, value: usize) {
    if let Some(p) = list.iter().position(|&x| x == value) {
        list.swap_remove(p);
    }
}

/// Constructs a `(dv, dc)`-regular code of length `n` with girth at least 6.
pub fn construct_regular_code(
    n: usize,
    dv: usize,
    dc: usize,
    seed: u64,
    max_restarts: usize,
) -> Result<TannerGraph> {
    RegularConstruction {
        max_restarts,
        ..RegularConstruction::new(n, dv, dc, seed)
    }
    .build()
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line parsed as integers, with its 1-based line number.
    fn next_ints(&mut self, what: &str) -> Result<(usize, Vec<usize>)> {
        for (idx, line) in self.inner.by_ref() {
            self.last = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| Error::Parse {
                        line: idx + 1,
                        msg: format!("expected a non-negative integer in {what}, found {t:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((idx + 1, nums));
        }
        Err(Error::Parse {
            line: self.last + 1,
            msg: format!("unexpected end of file while reading {what}"),
        })
    }

    fn next_exact(&mut self, what: &str, count: usize) -> Result<(usize, Vec<usize>)> {
        let (line, nums) = self.next_ints(what)?;
        if nums.len() != count {
            return Err(Error::Parse {
                line,
                msg: format!("{what}: expected {count} values, found {}", nums.len()),
            });
        }
        Ok((line, nums))
    }
}

/// Parses the conventional alist format (1-based indices, zero padding
/// allowed).
pub fn load_alist(text: &str) -> Result<TannerGraph> {
    let mut lines = Lines::new(text);
    let (_, dims) = lines.next_exact("header", 2)?;
    let (n, m) = (dims[0], dims[1]);
    let (_, maxdeg) = lines.next_exact("maximum degrees", 2)?;
    let (max_col, max_row) = (maxdeg[0], maxdeg[1]);
    let (cl, col_deg) = lines.next_exact("column degrees", n)?;
    let (rl, row_deg) = lines.next_exact("row degrees", m)?;
    if let Some(d) = col_deg.iter().find(|&&d| d > max_col) {
        return Err(Error::Parse { line: cl, msg: format!("column degree {d} exceeds maximum {max_col}") });
    }
    if let Some(d) = row_deg.iter().find(|&&d| d > max_row) {
        return Err(Error::Parse { line: rl, msg: format!("row degree {d} exceeds maximum {max_row}") });
    }

    let read_lists = |lines: &mut Lines, count: usize, degs: &[usize], bound: usize, what: &str| {
        let mut lists = Vec::with_capacity(count);
        for (idx, &deg) in degs.iter().enumerate() {
            let (line, nums) = lines.next_ints(what)?;
            let entries: Vec<usize> = nums.into_iter().filter(|&x| x != 0).collect();
            if entries.len() != deg {
                return Err(Error::Inconsistent(format!(
                    "line {line}: {what} {} has {} entries but degree {deg}",
                    idx + 1,
                    entries.len()
                )));
            }
            if let Some(&bad) = entries.iter().find(|&&x| x > bound) {
                return Err(Error::Parse { line, msg: format!("index {bad} out of range 1..={bound}") });
            }
            lists.push(entries.into_iter().map(|x| x - 1).collect::<Vec<_>>());
        }
        Ok::<_, Error>(lists)
    };

    let col_lists = read_lists(&mut lines, n, &col_deg, m, "column")?;
    let row_lists = read_lists(&mut lines, m, &row_deg, n, "row")?;

    let g = TannerGraph::from_rows(n, &row_lists).map_err(|e| Error::Inconsistent(e.to_string()))?;
    for (i, list) in col_lists.iter().enumerate() {
        let mut sorted = list.clone();
        sorted.sort_unstable();
        if !sorted.iter().copied().eq(g.vn_neighbors(i)) {
            return Err(Error::Inconsistent(format!(
                "column {} adjacency disagrees with the row lists",
                i + 1
            )));
        }
    }
    Ok(g)
}

/// Writes the graph in alist format; short lists are zero-padded to the
/// maximum degree.
pub fn save_alist(g: &TannerGraph) -> String {
    let col_w = g.col_weights();
    let row_w = g.row_weights();
    let max_col = g.max_col_weight();
    let max_row = g.max_row_weight();
    let mut out = String::new();
    let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");

    let _ = writeln!(out, "{} {}", g.n_vns(), g.n_cns());
    let _ = writeln!(out, "{max_col} {max_row}");
    let _ = writeln!(out, "{}", join(&mut col_w.iter().copied()));
    let _ = writeln!(out, "{}", join(&mut row_w.iter().copied()));
    for i in 0..g.n_vns() {
        let mut it = g
            .vn_neighbors(i)
            .map(|j| j + 1)
            .chain(std::iter::repeat(0))
            .take(max_col);
        let _ = writeln!(out, "{}", join(&mut it));
    }
    for j in 0..g.n_cns() {
        let mut it = g
            .cn_neighbors(j)
            .iter()
            .map(|&i| i + 1)
            .chain(std::iter::repeat(0))
            .take(max_row);
        let _ = writeln!(out, "{}", join(&mut it));
    }
    out
}
