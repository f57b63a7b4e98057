//! Invariant subspaces and the core space.
//!
//! A node belongs to the core when some dangling node can be reached from it
//! along links. Everything else is forward-closed and free of dangling
//! nodes, hence invariant under `S`; its weak components are the subspaces
//! `V_j`. Ordering subspace nodes first gives the block-triangular form
//!
//! ```text
//! S = | S_ss  S_sc |
//!     |  0    S_cc |
//! ```
//!
//! where `S_ss` is block diagonal with one column-stochastic block per `V_j`.

use std::collections::VecDeque;

use num_complex::Complex64;
use serde::Serialize;

use crate::dense::{self, DenseMatrix};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::graph::{DirectedGraph, Direction, NodeId};
use crate::operator::StochasticOperator;

/// Largest block handed to the dense eigensolver by default.
pub const DEFAULT_DENSE_LIMIT: usize = 10_000;

/// Default tolerance for `|λ| = 1` and `λ = 1`.
pub const DEFAULT_UNIT_TOL: f64 = 1e-10;

const CORE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeClass {
    Core,
    /// Index into [`SubspaceDecomposition::subspaces`].
    Subspace(usize),
}

#[derive(Clone, Debug)]
pub struct DetectOptions {
    pub direction: Direction,
    pub dense_limit: usize,
    /// Move components larger than `dense_limit` into the core instead of
    /// failing later in [`subspace_spectrum`].
    pub reclassify_oversized: bool,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            direction: Direction::Forward,
            dense_limit: DEFAULT_DENSE_LIMIT,
            reclassify_oversized: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceDecomposition {
    direction: Direction,
    class: Vec<u32>,
    subspaces: Vec<Vec<NodeId>>,
    core_order: Vec<NodeId>,
    core_position: Vec<u32>,
    reclassified: Vec<usize>,
}

impl SubspaceDecomposition {
    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn node_count(&self) -> usize {
        self.class.len()
    }

    /// `N_c`.
    pub fn core_count(&self) -> usize {
        self.core_order.len()
    }

    /// Core nodes in ascending id order; position `p` of a core vector
    /// refers to node `core_order()[p]`.
    pub fn core_order(&self) -> &[NodeId] {
        &self.core_order
    }

    pub fn core_position(&self, node: usize) -> Option<u32> {
        let p = self.core_position[node];
        (p != CORE).then_some(p)
    }

    /// `N_s`.
    pub fn subspace_node_count(&self) -> usize {
        self.node_count() - self.core_count()
    }

    /// `N_d`.
    pub fn subspace_count(&self) -> usize {
        self.subspaces.len()
    }

    /// `d_max`, zero without subspaces.
    pub fn max_dimension(&self) -> usize {
        self.subspaces.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Member lists, each ascending, numbered by smallest member.
    pub fn subspaces(&self) -> &[Vec<NodeId>] {
        &self.subspaces
    }

    pub fn class_of(&self, node: usize) -> NodeClass {
        match self.class[node] {
            CORE => NodeClass::Core,
            j => NodeClass::Subspace(j as usize),
        }
    }

    /// Sizes of weak components moved into the core for exceeding the dense
    /// limit. Empty unless reclassification was requested and needed.
    pub fn reclassified(&self) -> &[usize] {
        &self.reclassified
    }

    /// Checks closure, disjointness and the absence of dangling members
    /// against `g`.
    pub fn verify(&self, g: &DirectedGraph) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidArgument(msg));
        if g.node_count() != self.node_count() {
            return Err(Error::Dimension {
                expected: self.node_count(),
                found: g.node_count(),
            });
        }
        let mut seen = vec![false; self.node_count()];
        for (j, members) in self.subspaces.iter().enumerate() {
            for &u in members {
                let u = u as usize;
                if std::mem::replace(&mut seen[u], true) {
                    return fail(format!("node {u} appears twice"));
                }
                if self.class[u] != j as u32 {
                    return fail(format!("node {u} listed in subspace {j} but tagged otherwise"));
                }
                let out = g.successors(self.direction, u);
                if out.is_empty() {
                    return fail(format!("subspace {j} contains dangling node {u}"));
                }
                if let Some(&v) = out.iter().find(|&&v| self.class[v as usize] != j as u32) {
                    return fail(format!("link {u} -> {v} leaves subspace {j}"));
                }
            }
        }
        for (p, &c) in self.core_order.iter().enumerate() {
            if seen[c as usize] || self.core_position[c as usize] != p as u32 {
                return fail(format!("core node {c} inconsistently indexed"));
            }
            seen[c as usize] = true;
        }
        if seen.iter().any(|s| !s) {
            return fail("some node is unclassified".into());
        }
        Ok(())
    }
}

/// Forward decomposition with default options.
pub fn detect_subspaces(g: &DirectedGraph) -> SubspaceDecomposition {
    detect_subspaces_with(g, &DetectOptions::default())
}

pub fn detect_subspaces_with(g: &DirectedGraph, opts: &DetectOptions) -> SubspaceDecomposition {
    let n = g.node_count();
    let dir = opts.direction;

    // backward search from every dangling node
    let mut in_core = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for d in g.dangling_nodes(dir) {
        in_core[d as usize] = true;
        queue.push_back(d as usize);
    }
    while let Some(v) = queue.pop_front() {
        for &u in g.predecessors(dir, v) {
            if !std::mem::replace(&mut in_core[u as usize], true) {
                queue.push_back(u as usize);
            }
        }
    }

    // weak components of the remainder
    let mut uf = UnionFind::new(n);
    for u in (0..n).filter(|&u| !in_core[u]) {
        for &v in g.successors(dir, u) {
            uf.union(u, v as usize);
        }
    }
    let mut root_label = vec![CORE; n];
    let mut subspaces: Vec<Vec<NodeId>> = Vec::new();
    for u in (0..n).filter(|&u| !in_core[u]) {
        let r = uf.find(u);
        if root_label[r] == CORE {
            root_label[r] = subspaces.len() as u32;
            subspaces.push(Vec::new());
        }
        subspaces[root_label[r] as usize].push(u as NodeId);
    }

    let mut reclassified = Vec::new();
    if opts.reclassify_oversized {
        subspaces.retain(|members| {
            if members.len() > opts.dense_limit {
                reclassified.push(members.len());
                for &u in members {
                    in_core[u as usize] = true;
                }
                false
            } else {
                true
            }
        });
    }

    let mut class = vec![CORE; n];
    for (j, members) in subspaces.iter().enumerate() {
        for &u in members {
            class[u as usize] = j as u32;
        }
    }
    let mut core_order = Vec::new();
    let mut core_position = vec![CORE; n];
    for u in (0..n).filter(|&u| class[u] == CORE) {
        core_position[u] = core_order.len() as u32;
        core_order.push(u as NodeId);
    }

    SubspaceDecomposition {
        direction: dir,
        class,
        subspaces,
        core_order,
        core_position,
        reclassified,
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let up = self.parent[self.parent[x] as usize];
            self.parent[x] = up;
            x = up as usize;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // smaller root wins, which keeps the structure deterministic
        if ra < rb {
            self.parent[rb] = ra as u32;
        } else if rb < ra {
            self.parent[ra] = rb as u32;
        }
    }
}

/// Dense sub-block of `S` on rows and columns `nodes` (in the given order).
/// Dangling columns contribute `1/N` to every row of the block.
pub fn dense_block(op: &StochasticOperator<'_>, nodes: &[NodeId]) -> DenseMatrix {
    let n = op.dim();
    let k = nodes.len();
    let mut local = vec![u32::MAX; n];
    for (p, &u) in nodes.iter().enumerate() {
        local[u as usize] = p as u32;
    }
    let mut m = DenseMatrix::zeros(k, k);
    let uniform = 1.0 / n as f64;
    for (c, &j) in nodes.iter().enumerate() {
        let j = j as usize;
        if op.is_dangling(j) {
            for r in 0..k {
                m[(r, c)] += uniform;
            }
        } else {
            let w = op.link_weight(j);
            for &i in op.successors(j) {
                let r = local[i as usize];
                if r != u32::MAX {
                    m[(r as usize, c)] += w;
                }
            }
        }
    }
    m
}

#[derive(Clone, Debug)]
pub struct SpectrumConfig {
    pub dense_limit: usize,
    pub eigenvectors: bool,
    pub tol_circle: f64,
    pub tol_one: f64,
    pub exec: Execution,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            dense_limit: DEFAULT_DENSE_LIMIT,
            eigenvectors: true,
            tol_circle: DEFAULT_UNIT_TOL,
            tol_one: DEFAULT_UNIT_TOL,
            exec: Execution::default(),
        }
    }
}

/// Full spectrum of one subspace block.
#[derive(Clone, Debug)]
pub struct BlockSpectrum {
    pub subspace: usize,
    pub nodes: Vec<NodeId>,
    pub values: Vec<Complex64>,
    /// Unit-norm eigenvectors over `nodes`, one per value; empty when not
    /// requested.
    pub vectors: Vec<Vec<Complex64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSummary {
    #[serde(rename = "N_s")]
    pub n_s: usize,
    #[serde(rename = "N_c")]
    pub n_c: usize,
    #[serde(rename = "N_d")]
    pub n_d: usize,
    pub d_max: usize,
    #[serde(rename = "N_circ")]
    pub n_circ: usize,
    #[serde(rename = "N_1")]
    pub n_1: usize,
    #[serde(skip)]
    pub blocks: Vec<BlockSpectrum>,
}

impl SpectrumSummary {
    /// Every subspace eigenvalue, blocks in subspace order.
    pub fn values(&self) -> impl Iterator<Item = &Complex64> {
        self.blocks.iter().flat_map(|b| b.values.iter())
    }
}

/// Dense diagonalisation of every subspace block.
pub fn subspace_spectrum(
    op: &StochasticOperator<'_>,
    decomp: &SubspaceDecomposition,
    config: &SpectrumConfig,
) -> Result<SpectrumSummary> {
    if decomp.direction() != op.direction() || decomp.node_count() != op.dim() {
        return Err(Error::InvalidArgument(
            "decomposition was computed for a different operator".into(),
        ));
    }
    if let Some((j, v)) = decomp
        .subspaces()
        .iter()
        .enumerate()
        .find(|(_, v)| v.len() > config.dense_limit)
    {
        return Err(Error::Capacity {
            subspace: j,
            dim: v.len(),
            limit: config.dense_limit,
        });
    }
    let indexed: Vec<(usize, &Vec<NodeId>)> = decomp.subspaces().iter().enumerate().collect();
    let blocks = exec::map_items(config.exec, &indexed, |&(j, nodes)| {
        let block = dense_block(op, nodes);
        let mut eig = dense::eigen(&block, config.eigenvectors)?;
        for v in eig.vectors.iter_mut() {
            dense::normalize_phase(v);
        }
        Ok(BlockSpectrum {
            subspace: j,
            nodes: nodes.clone(),
            values: eig.values,
            vectors: eig.vectors,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let (n_circ, n_1) = count_unit_eigenvalues(
        blocks.iter().flat_map(|b| b.values.iter()),
        config.tol_circle,
        config.tol_one,
    );
    Ok(SpectrumSummary {
        n_s: decomp.subspace_node_count(),
        n_c: decomp.core_count(),
        n_d: decomp.subspace_count(),
        d_max: decomp.max_dimension(),
        n_circ,
        n_1,
        blocks,
    })
}

/// `(N_circ, N_1)`: values with `||λ| - 1| ≤ tol_circle` and with
/// `|λ - 1| ≤ tol_one`.
pub fn count_unit_eigenvalues<'a, I>(values: I, tol_circle: f64, tol_one: f64) -> (usize, usize)
where
    I: IntoIterator<Item = &'a Complex64>,
{
    values.into_iter().fold((0, 0), |(c, o), z| {
        let on_circle = (z.norm() - 1.0).abs() <= tol_circle;
        let one = (z - Complex64::new(1.0, 0.0)).norm() <= tol_one;
        (c + on_circle as usize, o + one as usize)
    })
}
