//! Seeded synthetic networks for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec::Execution;
use crate::graph::{DirectedGraph, NodeId};

/// Parameters of [`random_graph`].
#[derive(Clone, Debug)]
pub struct RandomGraph {
    pub nodes: usize,
    /// Mean out-degree of non-dangling nodes before deduplication.
    pub mean_out_degree: f64,
    /// Fraction of nodes without out-links.
    pub dangling_fraction: f64,
    /// Number of planted groups whose links stay inside the group.
    pub closed_groups: usize,
    pub group_size: usize,
    pub seed: u64,
}

impl RandomGraph {
    pub fn new(nodes: usize, seed: u64) -> Self {
        RandomGraph {
            nodes,
            mean_out_degree: 3.0,
            dangling_fraction: 0.1,
            closed_groups: 0,
            group_size: 0,
            seed,
        }
    }

    pub fn build(&self) -> DirectedGraph {
        random_graph(self)
    }
}

fn out_degree(rng: &mut ChaCha8Rng, mean: f64) -> usize {
    // uniform on 1..=2·mean−1 has the requested mean
    let hi = (2.0 * mean - 1.0).round().max(1.0) as usize;
    rng.gen_range(1..=hi)
}

/// Random directed graph in which every node has at least one in-link
/// (nodes without in-links add spurious defective zero eigenvalues).
///
/// The first `closed_groups · group_size` node ids (after a random
/// relabelling) form groups with internal links only, so they end up as
/// invariant subspaces.
pub fn random_graph(spec: &RandomGraph) -> DirectedGraph {
    let n = spec.nodes;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut ids: Vec<NodeId> = (0..n as NodeId).collect();
    ids.shuffle(&mut rng);

    let planted = (spec.closed_groups * spec.group_size).min(n);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    for g in 0..spec.closed_groups {
        let lo = g * spec.group_size;
        let hi = ((g + 1) * spec.group_size).min(planted);
        if lo >= hi {
            break;
        }
        let members = &ids[lo..hi];
        // a directed cycle keeps the group free of dangling nodes and of
        // nodes without in-links
        for (k, &u) in members.iter().enumerate() {
            edges.push((u, members[(k + 1) % members.len()]));
            for _ in 1..out_degree(&mut rng, spec.mean_out_degree) {
                edges.push((u, members[rng.gen_range(0..members.len())]));
            }
        }
    }

    let open = &ids[planted..];
    let n_dangling = ((open.len() as f64) * spec.dangling_fraction).round() as usize;
    let n_dangling = n_dangling.min(open.len());
    let linking = &open[n_dangling..];
    for &u in linking {
        for _ in 0..out_degree(&mut rng, spec.mean_out_degree) {
            edges.push((u, ids[rng.gen_range(0..n)]));
        }
    }
    let mut has_in = vec![false; n];
    for &(_, v) in &edges {
        has_in[v as usize] = true;
    }
    if !linking.is_empty() {
        for &v in open {
            if !has_in[v as usize] {
                edges.push((linking[rng.gen_range(0..linking.len())], v));
            }
        }
    }
    DirectedGraph::from_edges(n, edges).expect("generated ids are in range")
}

/// Heavy-tailed network of about `nodes · mean_out_degree` links.
///
/// Link targets follow `P(t) ∝ t^{-1/2}` over a random relabelling of the
/// nodes; out-degrees are uniform with the requested mean.
pub fn scale_free_graph(
    nodes: usize,
    mean_out_degree: f64,
    dangling_fraction: f64,
    seed: u64,
    exec: Execution,
) -> DirectedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<NodeId> = (0..nodes as NodeId).collect();
    ids.shuffle(&mut rng);
    let n = nodes as f64;
    let mut edges: Vec<(NodeId, NodeId)> =
        Vec::with_capacity((n * mean_out_degree * 1.05) as usize);
    for u in 0..nodes {
        if rng.gen::<f64>() < dangling_fraction {
            continue;
        }
        for _ in 0..out_degree(&mut rng, mean_out_degree) {
            let x: f64 = rng.gen();
            let t = ((n * x * x) as usize).min(nodes - 1);
            edges.push((u as NodeId, ids[t]));
        }
    }
    DirectedGraph::from_edges_with(nodes, edges, exec).expect("generated ids are in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspaces::detect_subspaces;

    #[test]
    fn every_node_has_an_in_link() {
        for seed in 0..10 {
            let g = RandomGraph {
                dangling_fraction: 0.3,
                ..RandomGraph::new(60, seed)
            }
            .build();
            assert!((0..60).all(|i| g.in_degree(i) > 0));
        }
    }

    #[test]
    fn planted_groups_become_subspaces() {
        let g = RandomGraph {
            closed_groups: 3,
            group_size: 4,
            ..RandomGraph::new(40, 5)
        }
        .build();
        let d = detect_subspaces(&g);
        assert!(d.subspace_node_count() >= 12);
        d.verify(&g).unwrap();
    }

    #[test]
    fn generation_is_seeded() {
        let a = RandomGraph::new(50, 9).build();
        let b = RandomGraph::new(50, 9).build();
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
        let c = scale_free_graph(1000, 5.0, 0.1, 3, Execution::Sequential);
        let d = scale_free_graph(1000, 5.0, 0.1, 3, Execution::Parallel);
        assert_eq!(c.edges().collect::<Vec<_>>(), d.edges().collect::<Vec<_>>());
    }
}
