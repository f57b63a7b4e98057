//! Metrics derived from rank vectors and eigenvectors.

use std::collections::{BTreeSet, HashMap};

use num_complex::Complex64;
use serde::Serialize;

use crate::arnoldi::{principal_arg, EigenPair};
use crate::dense::spectral_order;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, LabelTable, NodeId};
use crate::rank::{loglog_slope, FitResult};

/// `κ = N Σ_i P(i) P*(i) − 1`.
pub fn correlator(p: &[f64], p_star: &[f64]) -> Result<f64> {
    if p.len() != p_star.len() {
        return Err(Error::Dimension {
            expected: p.len(),
            found: p_star.len(),
        });
    }
    let s: f64 = p.iter().zip(p_star).map(|(a, b)| a * b).sum();
    Ok(p.len() as f64 * s - 1.0)
}

/// Inverse participation ratio `(Σ|ψ|²)² / Σ|ψ|⁴`.
pub fn ipr(psi: &[Complex64]) -> Result<f64> {
    // scale first so that |ψ|⁴ neither underflows nor overflows
    let max = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::ZeroVector);
    }
    let (s2, s4) = psi.iter().fold((0.0, 0.0), |(s2, s4), z| {
        let a = (z / max).norm_sqr();
        (s2 + a, s4 + a * a)
    });
    Ok(s2 * s2 / s4)
}

/// Smallest local rank used by [`decay_exponent`] for a vector of length `n`.
pub fn default_decay_threshold(n: usize) -> usize {
    if n < 100_000 {
        (n / 100).max(10)
    } else {
        10_000
    }
}

/// Exponent `b` of `|ψ|(K) ∼ K^b`, where `K` orders `|ψ|` decreasingly,
/// fitted over `K ≥ k_threshold` and positive values.
pub fn decay_exponent(psi: &[Complex64], k_threshold: Option<usize>) -> Result<FitResult> {
    let k_min = k_threshold.unwrap_or_else(|| default_decay_threshold(psi.len())).max(1);
    let mut moduli: Vec<f64> = psi.iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    let points: Vec<(f64, f64)> = moduli
        .iter()
        .enumerate()
        .skip(k_min - 1)
        .take_while(|(_, &m)| m > 0.0)
        .map(|(i, &m)| ((i + 1) as f64, m))
        .collect();
    if points.len() < 3 {
        return Err(Error::Fit(format!(
            "{} positive entries at local rank >= {k_min}, need at least 3",
            points.len()
        )));
    }
    let (slope, stderr) = loglog_slope(&points)?;
    Ok(FitResult {
        exponent: slope,
        stderr,
        k_min,
        k_max: k_min + points.len() - 1,
        points_used: points.len(),
    })
}

/// Permutation of `0..n` sorting `|ψ|` decreasingly, ties by node id.
pub fn modulus_order(psi: &[Complex64]) -> Vec<NodeId> {
    let moduli: Vec<f64> = psi.iter().map(|z| z.norm()).collect();
    crate::rank::rank_order(&moduli)
}

/// Link counts between the first `k` nodes of an ordering (set `A`) and the
/// rest (set `B`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CutRow {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N_AA")]
    pub n_aa: u64,
    #[serde(rename = "N_AB")]
    pub n_ab: u64,
    #[serde(rename = "N_BA")]
    pub n_ba: u64,
    #[serde(rename = "N_BB")]
    pub n_bb: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutCounts {
    pub link_count: u64,
    /// One row per cut `K = 0..=N`.
    pub rows: Vec<CutRow>,
}

fn check_permutation(order: &[NodeId], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: order.len(),
        });
    }
    let mut seen = vec![false; n];
    for &i in order {
        let i = i as usize;
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidArgument(format!(
                "ordering is not a permutation of 0..{n} (node {i})"
            )));
        }
    }
    Ok(())
}

/// Sweeps the cut through `ordering` (node ids, best first), counting only
/// explicit links.
pub fn cut_counts(g: &DirectedGraph, ordering: &[NodeId]) -> Result<CutCounts> {
    let n = g.node_count();
    check_permutation(ordering, n)?;
    let total = g.edge_count() as u64;
    let mut in_a = vec![false; n];
    let (mut aa, mut ab, mut ba) = (0u64, 0u64, 0u64);
    let mut rows = Vec::with_capacity(n + 1);
    let row = |k, aa, ab, ba| CutRow {
        k,
        n_aa: aa,
        n_ab: ab,
        n_ba: ba,
        n_bb: total - aa - ab - ba,
    };
    rows.push(row(0, 0, 0, 0));
    for (k, &u) in ordering.iter().enumerate() {
        let u = u as usize;
        for &v in g.out_neighbors(u) {
            let v = v as usize;
            if v == u {
                aa += 1;
            } else if in_a[v] {
                ba -= 1;
                aa += 1;
            } else {
                ab += 1;
            }
        }
        for &w in g.in_neighbors(u) {
            let w = w as usize;
            if w == u {
                continue;
            }
            if in_a[w] {
                ab -= 1;
                aa += 1;
            } else {
                ba += 1;
            }
        }
        in_a[u] = true;
        rows.push(row(k + 1, aa, ab, ba));
    }
    Ok(CutCounts {
        link_count: total,
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    Linear,
    Log,
}

/// Node density `W(K, K*)` on a `cells × cells` grid.
#[derive(Clone, Debug, Serialize)]
pub struct DensityGrid {
    pub scale: GridScale,
    pub cells: usize,
    pub node_count: usize,
    /// Cell boundaries in rank units, `cells + 1` values shared by both
    /// axes.
    pub edges: Vec<f64>,
    /// Nodes per cell, row-major with `x` (cell of `K`) as the row.
    #[serde(skip)]
    pub counts: Vec<u64>,
}

impl DensityGrid {
    pub fn count(&self, x: usize, y: usize) -> u64 {
        self.counts[x * self.cells + y]
    }

    /// `W = count / N`.
    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.count(x, y) as f64 / self.node_count as f64
    }

    pub fn total_weight(&self) -> f64 {
        (0..self.cells)
            .flat_map(|x| (0..self.cells).map(move |y| (x, y)))
            .map(|(x, y)| self.weight(x, y))
            .sum()
    }
}

fn check_ranks(ranks: &[u32], n: usize) -> Result<()> {
    let order: Vec<NodeId> = ranks.iter().map(|&k| k.wrapping_sub(1)).collect();
    check_permutation(&order, n)
}

/// Cell of a 1-based rank.
pub fn grid_cell(k: u32, n: usize, cells: usize, scale: GridScale) -> usize {
    match scale {
        GridScale::Linear => ((k as u64 - 1) * cells as u64 / n as u64) as usize,
        GridScale::Log => {
            if n <= 1 {
                0
            } else {
                let c = ((k as f64).ln() * cells as f64 / (n as f64).ln()).floor() as usize;
                c.min(cells - 1)
            }
        }
    }
}

/// Places every node at `(K(i), K*(i))`; `k` and `k_star` hold 1-based
/// ranks per node.
pub fn density_grid(k: &[u32], k_star: &[u32], cells: usize, scale: GridScale) -> Result<DensityGrid> {
    let n = k.len();
    if cells < 1 {
        return Err(Error::InvalidArgument("grid needs at least one cell per axis".into()));
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    check_ranks(k, n)?;
    check_ranks(k_star, n)?;
    let mut counts = vec![0u64; cells * cells];
    for (&a, &b) in k.iter().zip(k_star) {
        let x = grid_cell(a, n, cells, scale);
        let y = grid_cell(b, n, cells, scale);
        counts[x * cells + y] += 1;
    }
    let edges = (0..=cells)
        .map(|c| match scale {
            GridScale::Linear => 1.0 + c as f64 * n as f64 / cells as f64,
            GridScale::Log => (c as f64 * (n as f64).ln() / cells as f64).exp(),
        })
        .collect();
    Ok(DensityGrid {
        scale,
        cells,
        node_count: n,
        edges,
        counts,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopNode {
    /// Local rank `K_i`, 1-based.
    pub k: usize,
    pub node_id: NodeId,
    pub modulus: f64,
    pub label: String,
}

/// Label used for a node: its text, the decimal id when the table lacks it,
/// `node:<id>` when there is no table at all.
pub fn node_label(labels: Option<&LabelTable>, node: usize) -> String {
    match labels {
        Some(t) => t.label_or_id(node),
        None => format!("node:{node}"),
    }
}

/// The `count` nodes of largest `|ψ|`.
pub fn top_nodes(psi: &[Complex64], labels: Option<&LabelTable>, count: usize) -> Vec<TopNode> {
    modulus_order(psi)
        .into_iter()
        .take(count)
        .enumerate()
        .map(|(k, i)| TopNode {
            k: k + 1,
            node_id: i,
            modulus: psi[i as usize].norm(),
            label: node_label(labels, i as usize),
        })
        .collect()
}

pub const DEFAULT_STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "by", "de", "del", "der", "des", "di", "die", "du",
    "en", "et", "for", "from", "in", "is", "it", "la", "le", "les", "of", "on", "or", "the", "to",
    "und", "von", "with",
];

pub fn default_stopwords() -> BTreeSet<String> {
    DEFAULT_STOPWORDS.iter().map(|s| s.to_string()).collect()
}

/// Lower-cases, splits on whitespace, trims non-alphanumeric characters from
/// both ends of each token.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split_whitespace()
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
        .filter(|t| !t.is_empty())
}

/// Word counts over all labels, by decreasing count then alphabetically.
pub fn word_frequency<S: AsRef<str>>(labels: &[S], stopwords: &BTreeSet<String>) -> Vec<(String, usize)> {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for label in labels {
        for token in tokenize(label.as_ref()) {
            if !stopwords.contains(&token) {
                *counts.entry(token).or_default() += 1;
            }
        }
    }
    let mut table: Vec<(String, usize)> = counts.into_iter().collect();
    table.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    table
}

/// `arg λ` in `(−π, π]`.
pub fn eigenvalue_phase(lambda: Complex64) -> Result<f64> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidArgument("phase of zero eigenvalue".into()));
    }
    Ok(principal_arg(lambda))
}

/// The `count` items of largest `|λ|` in spectral order. A conjugate pair
/// split by the cut is kept whole, so the result may hold `count + 1`.
pub fn select_near_circle_by<T, F>(items: &[T], count: usize, lambda: F) -> Vec<T>
where
    T: Clone,
    F: Fn(&T) -> Complex64,
{
    let mut sorted: Vec<&T> = items.iter().collect();
    sorted.sort_by(|a, b| spectral_order(&lambda(a), &lambda(b)));
    let mut keep = count.min(sorted.len());
    if keep > 0 && keep < sorted.len() {
        let last = lambda(sorted[keep - 1]);
        if last.im != 0.0 && lambda(sorted[keep]) == last.conj() {
            keep += 1;
        }
    }
    sorted.into_iter().take(keep).cloned().collect()
}

pub fn select_near_circle(spectrum: &[EigenPair], count: usize) -> Vec<EigenPair> {
    select_near_circle_by(spectrum, count, |p| p.lambda)
}

/// Community summary of one eigenvector.
#[derive(Clone, Debug, Serialize)]
pub struct CommunityReport {
    pub m: usize,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub phase: f64,
    pub ipr: f64,
    pub top_word: Option<String>,
    pub top_20_nodes: Vec<TopNode>,
}

/// Labels the eigenvector by the most frequent word among its `pool`
/// largest (nonzero) entries.
pub fn community(
    pair: &EigenPair,
    labels: Option<&LabelTable>,
    stopwords: &BTreeSet<String>,
    pool: usize,
) -> Result<CommunityReport> {
    let order = modulus_order(&pair.psi);
    let texts: Vec<String> = order
        .iter()
        .take(pool)
        .filter(|&&i| pair.psi[i as usize] != Complex64::new(0.0, 0.0))
        .map(|&i| node_label(labels, i as usize))
        .collect();
    let top_word = word_frequency(&texts, stopwords).into_iter().next().map(|(w, _)| w);
    Ok(CommunityReport {
        m: pair.m,
        re: pair.lambda.re,
        im: pair.lambda.im,
        abs: pair.lambda.norm(),
        phase: eigenvalue_phase(pair.lambda)?,
        ipr: ipr(&pair.psi)?,
        top_word,
        top_20_nodes: top_nodes(&pair.psi, labels, 20),
    })
}

/// Scalar metrics gathered by the analysis command.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub kappa: f64,
    pub pagerank_ipr: f64,
    pub cheirank_ipr: f64,
    pub eigenvectors: Vec<EigenvectorMetrics>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenvectorMetrics {
    pub m: usize,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub phase: f64,
    pub ipr: f64,
    /// Absent when the tail holds fewer than three positive entries.
    pub decay: Option<FitResult>,
}

pub fn eigenvector_metrics(pair: &EigenPair) -> Result<EigenvectorMetrics> {
    Ok(EigenvectorMetrics {
        m: pair.m,
        re: pair.lambda.re,
        im: pair.lambda.im,
        abs: pair.lambda.norm(),
        phase: eigenvalue_phase(pair.lambda)?,
        ipr: ipr(&pair.psi)?,
        decay: decay_exponent(&pair.psi, None).ok(),
    })
}

/// IPR of a probability vector.
pub fn real_ipr(p: &[f64]) -> Result<f64> {
    let psi: Vec<Complex64> = p.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    ipr(&psi)
}
