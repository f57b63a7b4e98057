//! Matrix-free application of the link operator `S` and the Google matrix
//! `G(α) = αS + (1-α)/N`.
//!
//! `S_ij = A_ij / outdeg(j)` for nodes with out-links and `S_ij = 1/N` for
//! dangling columns. The dangling and teleport columns are rank-one terms
//! evaluated from two running sums, so one product costs `O(N + N_ℓ)`.
//!
//! Products are computed row by row from the in-links of each node, so every
//! output entry is accumulated in a fixed order and the result does not
//! depend on how rows are distributed across threads.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::graph::{DirectedGraph, Direction, NodeId};
use crate::subspaces::SubspaceDecomposition;

/// A real square operator that can be applied to vectors.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = A x`; both slices have length [`dim`](Self::dim).
    fn apply_to(&self, x: &[f64], y: &mut [f64]);
}

/// Wraps a closure as a [`LinearOperator`].
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F> FnOperator<F>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnOperator { dim, f }
    }
}

impl<F> LinearOperator for FnOperator<F>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_to(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}

#[derive(Clone, Debug)]
pub struct StochasticOperator<'g> {
    graph: &'g DirectedGraph,
    direction: Direction,
    /// `1 / outdeg(j)`, zero for dangling `j`.
    inv_out_degree: Vec<f64>,
    dangling: Vec<NodeId>,
    exec: Execution,
    compensated: bool,
}

impl<'g> StochasticOperator<'g> {
    /// `S` for [`Direction::Forward`], `S*` (reversed links, own dangling
    /// set) for [`Direction::Inverse`].
    pub fn new(graph: &'g DirectedGraph, direction: Direction) -> Self {
        let n = graph.node_count();
        let mut inv_out_degree = vec![0.0; n];
        let mut dangling = Vec::new();
        for (j, w) in inv_out_degree.iter_mut().enumerate() {
            let d = graph.successors(direction, j).len();
            if d == 0 {
                dangling.push(j as NodeId);
            } else {
                *w = 1.0 / d as f64;
            }
        }
        StochasticOperator {
            graph,
            direction,
            inv_out_degree,
            dangling,
            exec: Execution::default(),
            compensated: false,
        }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    /// Accumulate the rank-one sums with compensated summation.
    pub fn with_compensated_sums(mut self, on: bool) -> Self {
        self.compensated = on;
        self
    }

    pub fn graph(&self) -> &'g DirectedGraph {
        self.graph
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    pub fn dim(&self) -> usize {
        self.graph.node_count()
    }

    pub fn dangling(&self) -> &[NodeId] {
        &self.dangling
    }

    pub fn is_dangling(&self, j: usize) -> bool {
        self.inv_out_degree[j] == 0.0
    }

    /// Weight of every link leaving `j`, zero if `j` is dangling.
    pub fn link_weight(&self, j: usize) -> f64 {
        self.inv_out_degree[j]
    }

    /// Nodes that `j` links to in the selected direction.
    pub fn successors(&self, j: usize) -> &'g [NodeId] {
        self.graph.successors(self.direction, j)
    }

    /// Nodes linking to `i` in the selected direction.
    pub fn predecessors(&self, i: usize) -> &'g [NodeId] {
        self.graph.predecessors(self.direction, i)
    }

    /// Column `j` of `S` as `(row, value)` pairs; dangling columns are dense.
    pub fn column(&self, j: usize) -> Vec<(usize, f64)> {
        let n = self.dim();
        if self.is_dangling(j) {
            (0..n).map(|i| (i, 1.0 / n as f64)).collect()
        } else {
            let w = self.inv_out_degree[j];
            self.successors(j).iter().map(|&i| (i as usize, w)).collect()
        }
    }

    fn sum(&self, len: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
        if self.compensated {
            exec::compensated_sum_by(self.exec, len, f)
        } else {
            exec::sum_by(self.exec, len, f)
        }
    }

    fn check_input(&self, v: &[f64], alpha: f64) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: v.len(),
            });
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArgument(format!(
                "damping {alpha} outside [0, 1]"
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("operator input".into()));
        }
        Ok(())
    }

    /// `y = G(α) v`.
    pub fn apply(&self, v: &[f64], alpha: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(v, alpha, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, v: &[f64], alpha: f64, out: &mut [f64]) -> Result<()> {
        self.check_input(v, alpha)?;
        if out.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: out.len(),
            });
        }
        self.apply_unchecked(v, alpha, out);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&self, v: &[f64], alpha: f64, out: &mut [f64]) {
        let n = self.dim() as f64;
        let dangling = &self.dangling;
        let dangling_sum = self.sum(dangling.len(), |k| v[dangling[k] as usize]);
        let total = if alpha < 1.0 {
            self.sum(v.len(), |i| v[i])
        } else {
            0.0
        };
        let shift = alpha * dangling_sum / n + (1.0 - alpha) * total / n;
        let inv = &self.inv_out_degree;
        exec::fill(self.exec, out, |i| {
            let link: f64 = self
                .predecessors(i)
                .iter()
                .map(|&j| v[j as usize] * inv[j as usize])
                .sum();
            alpha * link + shift
        });
    }

    /// Complex product, applied to real and imaginary parts independently.
    pub fn apply_complex(&self, v: &[Complex64], alpha: f64) -> Result<Vec<Complex64>> {
        let re: Vec<f64> = v.iter().map(|z| z.re).collect();
        let im: Vec<f64> = v.iter().map(|z| z.im).collect();
        let yr = self.apply(&re, alpha)?;
        let yi = self.apply(&im, alpha)?;
        Ok(yr
            .into_iter()
            .zip(yi)
            .map(|(r, i)| Complex64::new(r, i))
            .collect())
    }

    /// The core block `S_cc` of a decomposition computed for this operator.
    pub fn core_operator<'a>(
        &'a self,
        decomp: &'a SubspaceDecomposition,
    ) -> Result<CoreOperator<'a, 'g>> {
        if decomp.direction() != self.direction || decomp.node_count() != self.dim() {
            return Err(Error::InvalidArgument(
                "decomposition was computed for a different operator".into(),
            ));
        }
        let dangling_core = self
            .dangling
            .iter()
            .filter_map(|&j| decomp.core_position(j as usize))
            .collect();
        Ok(CoreOperator {
            op: self,
            decomp,
            dangling_core,
        })
    }

    /// `S_cc v` for `v` indexed by the core ordering of `decomp`.
    pub fn apply_core(&self, decomp: &SubspaceDecomposition, v: &[f64]) -> Result<Vec<f64>> {
        let core = self.core_operator(decomp)?;
        if v.len() != core.dim() {
            return Err(Error::Dimension {
                expected: core.dim(),
                found: v.len(),
            });
        }
        let mut out = vec![0.0; core.dim()];
        core.apply_to(v, &mut out);
        Ok(out)
    }
}

impl LinearOperator for StochasticOperator<'_> {
    fn dim(&self) -> usize {
        self.graph.node_count()
    }

    /// Applies `S` (`α = 1`).
    fn apply_to(&self, x: &[f64], y: &mut [f64]) {
        self.apply_unchecked(x, 1.0, y)
    }
}

/// `S_cc`: links between core nodes plus the core rows of the dangling
/// columns. Column sums fall below one where mass leaks into subspaces.
pub struct CoreOperator<'a, 'g> {
    op: &'a StochasticOperator<'g>,
    decomp: &'a SubspaceDecomposition,
    /// Core positions of dangling nodes (all dangling nodes are core nodes).
    dangling_core: Vec<u32>,
}

impl CoreOperator<'_, '_> {
    pub fn decomposition(&self) -> &SubspaceDecomposition {
        self.decomp
    }
}

impl LinearOperator for CoreOperator<'_, '_> {
    fn dim(&self) -> usize {
        self.decomp.core_count()
    }

    fn apply_to(&self, x: &[f64], y: &mut [f64]) {
        let n = self.op.dim() as f64;
        let exec = self.op.exec;
        let dangling = &self.dangling_core;
        let dangling_sum = if self.op.compensated {
            exec::compensated_sum_by(exec, dangling.len(), |k| x[dangling[k] as usize])
        } else {
            exec::sum_by(exec, dangling.len(), |k| x[dangling[k] as usize])
        };
        let shift = dangling_sum / n;
        let order = self.decomp.core_order();
        let inv = &self.op.inv_out_degree;
        exec::fill(exec, y, |p| {
            let node = order[p] as usize;
            let link: f64 = self
                .op
                .predecessors(node)
                .iter()
                .filter_map(|&j| {
                    self.decomp
                        .core_position(j as usize)
                        .map(|q| x[q as usize] * inv[j as usize])
                })
                .sum();
            link + shift
        });
    }
}
