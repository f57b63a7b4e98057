//! PageRank, CheiRank and power-law fits of ranked probabilities.

use serde::Serialize;

use crate::dense;
use crate::error::{Error, Result};
use crate::exec;
use crate::graph::{DirectedGraph, Direction, NodeId};
use crate::operator::{LinearOperator, StochasticOperator};
use crate::subspaces::{dense_block, SubspaceDecomposition, DEFAULT_DENSE_LIMIT};

pub const DEFAULT_ALPHA: f64 = 0.85;
pub const NEAR_ONE_ALPHA: f64 = 1.0 - 1e-8;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const NEAR_ONE_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Probability vector with its rank permutation.
#[derive(Clone, Debug, PartialEq)]
pub struct RankVector {
    pub probabilities: Vec<f64>,
    /// `order[k]` is the node of rank `k + 1`.
    pub order: Vec<NodeId>,
    /// `rank[i]` is the 1-based rank `K(i)` of node `i`.
    pub rank: Vec<u32>,
    pub alpha: f64,
    pub iterations: usize,
    /// `‖G P − P‖₁`.
    pub residual: f64,
}

impl RankVector {
    /// Ranks `probabilities` by decreasing value, ties by ascending node id.
    pub fn from_probabilities(
        probabilities: Vec<f64>,
        alpha: f64,
        iterations: usize,
        residual: f64,
    ) -> Self {
        let order = rank_order(&probabilities);
        let mut rank = vec![0u32; order.len()];
        for (k, &i) in order.iter().enumerate() {
            rank[i as usize] = k as u32 + 1;
        }
        RankVector {
            probabilities,
            order,
            rank,
            alpha,
            iterations,
            residual,
        }
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Node holding 1-based rank `k`.
    pub fn node_at(&self, k: usize) -> NodeId {
        self.order[k - 1]
    }

    /// Probabilities in rank order.
    pub fn sorted(&self) -> impl Iterator<Item = f64> + '_ {
        self.order.iter().map(|&i| self.probabilities[i as usize])
    }
}

/// Permutation sorting `values` descending, ties by ascending index.
pub fn rank_order(values: &[f64]) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = (0..values.len() as NodeId).collect();
    order.sort_by(|&a, &b| {
        values[b as usize]
            .total_cmp(&values[a as usize])
            .then(a.cmp(&b))
    });
    order
}

fn check_params(alpha: f64, tol: f64, max_iter: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("damping {alpha} outside [0, 1]")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument("iteration limit must be positive".into()));
    }
    Ok(())
}

fn normalize(v: &mut [f64], exec: exec::Execution) {
    let s = exec::sum_by(exec, v.len(), |i| v[i]);
    if s > 0.0 {
        exec::for_each_chunk_mut(exec, v, |_, block| {
            for x in block {
                *x /= s;
            }
        });
    }
}

fn google_residual(op: &StochasticOperator<'_>, p: &[f64], alpha: f64) -> f64 {
    let mut gp = vec![0.0; p.len()];
    op.apply_unchecked(p, alpha, &mut gp);
    exec::l1_distance(op.execution(), &gp, p)
}

/// Power iteration `P ← G(α) P` from the uniform vector until the L1 change
/// drops to `tol`.
pub fn pagerank(
    op: &StochasticOperator<'_>,
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RankVector> {
    check_params(alpha, tol, max_iter)?;
    let n = op.dim();
    let exec = op.execution();
    let mut v = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut change = f64::INFINITY;
    while iterations < max_iter {
        op.apply_unchecked(&v, alpha, &mut next);
        normalize(&mut next, exec);
        change = exec::l1_distance(exec, &next, &v);
        std::mem::swap(&mut v, &mut next);
        iterations += 1;
        if change <= tol {
            break;
        }
    }
    let residual = google_residual(op, &v, alpha);
    let rv = RankVector::from_probabilities(v, alpha, iterations, residual);
    if change > tol {
        return Err(Error::NotConverged {
            iterations,
            residual,
            last: Box::new(rv),
        });
    }
    Ok(rv)
}

/// Result of [`pagerank_near_one`].
#[derive(Clone, Debug)]
pub struct NearOneRank {
    pub rank: RankVector,
    /// `Σ P(i)` over subspace nodes.
    pub mass_on_subspaces: f64,
}

/// PageRank for `1 − α ≪ 1` using the block-triangular structure.
///
/// The core part solves `x = α S_cc x + (1−α)/N` by fixed-point iteration;
/// each subspace then solves `(I − α B_j) p_j = α (S_sc x)_j + (1−α)/N`
/// densely. Without subspaces this is plain [`pagerank`].
///
/// The core entries are of order `1 − α`, so `tol` bounds the L1 change of
/// the core iteration relative to its current L1 norm.
pub fn pagerank_near_one(
    op: &StochasticOperator<'_>,
    decomp: &SubspaceDecomposition,
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> Result<NearOneRank> {
    check_params(alpha, tol, max_iter)?;
    if decomp.subspace_node_count() == 0 {
        return Ok(NearOneRank {
            rank: pagerank(op, alpha, tol, max_iter)?,
            mass_on_subspaces: 0.0,
        });
    }
    if let Some((j, v)) = decomp
        .subspaces()
        .iter()
        .enumerate()
        .find(|(_, v)| v.len() > DEFAULT_DENSE_LIMIT)
    {
        return Err(Error::Capacity {
            subspace: j,
            dim: v.len(),
            limit: DEFAULT_DENSE_LIMIT,
        });
    }
    let core = op.core_operator(decomp)?;
    let exec = op.execution();
    let n = op.dim();
    let teleport = (1.0 - alpha) / n as f64;

    let n_c = core.dim();
    let mut x = vec![teleport; n_c];
    let mut next = vec![0.0; n_c];
    let mut iterations = 0;
    let mut change = if n_c == 0 { 0.0 } else { f64::INFINITY };
    while n_c > 0 && iterations < max_iter {
        core.apply_to(&x, &mut next);
        exec::for_each_chunk_mut(exec, &mut next, |_, block| {
            for y in block {
                *y = alpha * *y + teleport;
            }
        });
        let scale = exec::sum_by(exec, n_c, |i| next[i].abs());
        change = exec::l1_distance(exec, &next, &x) / scale;
        std::mem::swap(&mut x, &mut next);
        iterations += 1;
        if change <= tol {
            break;
        }
    }

    let mut p = vec![0.0; n];
    for (&node, &value) in decomp.core_order().iter().zip(&x) {
        p[node as usize] = value;
    }
    let dangling_sum: f64 = op.dangling().iter().map(|&d| p[d as usize]).sum();
    let solved = exec::map_items(exec, decomp.subspaces(), |nodes| {
        let mut a = dense_block(op, nodes);
        for r in 0..a.rows() {
            for c in 0..a.cols() {
                let delta = if r == c { 1.0 } else { 0.0 };
                a[(r, c)] = delta - alpha * a[(r, c)];
            }
        }
        let rhs: Vec<f64> = nodes
            .iter()
            .map(|&i| {
                let inflow: f64 = op
                    .predecessors(i as usize)
                    .iter()
                    .filter(|&&k| decomp.core_position(k as usize).is_some())
                    .map(|&k| p[k as usize] * op.link_weight(k as usize))
                    .sum();
                alpha * (inflow + dangling_sum / n as f64) + teleport
            })
            .collect();
        dense::solve(&a, &rhs)
    });
    for (nodes, values) in decomp.subspaces().iter().zip(solved) {
        for (&i, v) in nodes.iter().zip(values?) {
            p[i as usize] = v.max(0.0);
        }
    }
    normalize(&mut p, exec);
    let mass_on_subspaces = decomp
        .subspaces()
        .iter()
        .flatten()
        .map(|&i| p[i as usize])
        .sum();
    let residual = google_residual(op, &p, alpha);
    let rank = RankVector::from_probabilities(p, alpha, iterations, residual);
    if change > tol {
        return Err(Error::NotConverged {
            iterations,
            residual,
            last: Box::new(rank),
        });
    }
    Ok(NearOneRank {
        rank,
        mass_on_subspaces,
    })
}

/// PageRank of the inverted network.
pub fn cheirank(g: &DirectedGraph, alpha: f64, tol: f64, max_iter: usize) -> Result<RankVector> {
    pagerank(&StochasticOperator::new(g, Direction::Inverse), alpha, tol, max_iter)
}

/// Least-squares power-law fit on a log-log scale.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    /// `β = −slope` for rank fits, `b = slope` for eigenvector decay.
    pub exponent: f64,
    pub stderr: f64,
    pub k_min: usize,
    pub k_max: usize,
    pub points_used: usize,
}

/// `(slope, standard error of slope)` of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::Fit(format!("{} points, need at least 3", points.len())));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::Fit(format!("non-positive value at ({x}, {y})")));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all abscissae coincide".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok((slope, (ssr / (n - 2.0) / sxx).sqrt()))
}

/// Zipf exponent `β` of `P(K) ∼ K^{−β}` over ranks `k_min..=k_max`.
pub fn zipf_fit(rv: &RankVector, k_min: usize, k_max: usize) -> Result<FitResult> {
    let n = rv.len();
    if k_min < 1 || k_min >= k_max || k_max > n {
        return Err(Error::Fit(format!(
            "rank range [{k_min}, {k_max}] invalid for N = {n}"
        )));
    }
    let points: Vec<(f64, f64)> = (k_min..=k_max)
        .map(|k| (k as f64, rv.probabilities[rv.node_at(k) as usize]))
        .collect();
    if let Some(k) = (k_min..=k_max).find(|&k| !(points[k - k_min].1 > 0.0)) {
        return Err(Error::Fit(format!("zero probability at rank {k}")));
    }
    let (slope, stderr) = loglog_slope(&points)?;
    Ok(FitResult {
        exponent: -slope,
        stderr,
        k_min,
        k_max,
        points_used: points.len(),
    })
}

/// Default Zipf range `[10, N/100]`, widened for small networks so that at
/// least three ranks remain.
pub fn default_fit_range(n: usize) -> Option<(usize, usize)> {
    let (lo, hi) = (10, n / 100);
    if hi >= lo + 2 {
        Some((lo, hi))
    } else if n >= 3 {
        Some((1, n))
    } else {
        None
    }
}
