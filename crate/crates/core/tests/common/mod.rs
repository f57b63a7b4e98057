#![allow(dead_code)]

use gmspec::synth::RandomGraph;
use gmspec::{Complex64, DirectedGraph};
use nalgebra::DMatrix;

/// Dense `S` built straight from the edge list.
pub fn dense_s(g: &DirectedGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut outdeg = vec![0usize; n];
    for (s, _) in g.edges() {
        outdeg[s as usize] += 1;
    }
    let mut m = DMatrix::zeros(n, n);
    for (s, d) in g.edges() {
        m[(d as usize, s as usize)] += 1.0 / outdeg[s as usize] as f64;
    }
    for j in (0..n).filter(|&j| outdeg[j] == 0) {
        for i in 0..n {
            m[(i, j)] = 1.0 / n as f64;
        }
    }
    m
}

pub fn dense_g(g: &DirectedGraph, alpha: f64) -> DMatrix<f64> {
    let n = g.node_count();
    dense_s(g) * alpha + DMatrix::from_element(n, n, (1.0 - alpha) / n as f64)
}

/// Nodes from which a dangling node can be reached, by plain fixed-point
/// iteration over the edge list.
pub fn naive_core(g: &DirectedGraph) -> Vec<usize> {
    let n = g.node_count();
    let edges: Vec<(u32, u32)> = g.edges().collect();
    let mut core: Vec<bool> = (0..n).map(|i| !edges.iter().any(|&(s, _)| s as usize == i)).collect();
    loop {
        let mut changed = false;
        for &(s, d) in &edges {
            if core[d as usize] && !core[s as usize] {
                core[s as usize] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..n).filter(|&i| core[i]).collect()
}

pub fn submatrix(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    m.clone().complex_eigenvalues().iter().copied().collect()
}

/// Hausdorff distance between two finite point sets in the plane.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_way = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    one_way(a, b).max(one_way(b, a))
}

/// Largest distance of a greedy one-to-one matching; infinite if the sizes
/// differ.
pub fn matching_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for p in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, q)| (k, (p - q).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

/// Mixed test graphs: varying size, dangling fraction and planted closed
/// groups.
pub fn fixture_graph(seed: u64, max_nodes: usize) -> DirectedGraph {
    let nodes = 10 + (seed as usize * 37) % (max_nodes - 9);
    let dangling = [0.0, 0.05, 0.2, 0.5][seed as usize % 4];
    RandomGraph {
        nodes,
        mean_out_degree: 2.0 + (seed % 3) as f64,
        dangling_fraction: dangling,
        closed_groups: (seed % 3) as usize,
        group_size: 2 + (seed % 4) as usize,
        seed,
    }
    .build()
}

/// Hausdorff distance restricted to points of modulus above `r`, each
/// matched against the full other set. Zero eigenvalues of these matrices
/// are often defective, and dense solvers only resolve them to about
/// `eps^(1/k)`.
pub fn hausdorff_outside(a: &[Complex64], b: &[Complex64], r: f64) -> f64 {
    let one_way = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .filter(|p| p.norm() > r)
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}
