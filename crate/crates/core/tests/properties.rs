mod common;

use common::{dense_g, dense_s, naive_core};
use gmspec::analysis::{correlator, cut_counts, density_grid, ipr, GridScale};
use gmspec::graph::{read_binary, write_binary, write_edge_list};
use gmspec::rank::{pagerank_near_one, rank_order};
use gmspec::subspaces::dense_block;
use gmspec::{
    cheirank, detect_subspaces, load_edge_list, pagerank, Complex64, DirectedGraph, Direction,
    EdgeListOptions, NodeId, StochasticOperator,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn graph_strategy(max_nodes: usize) -> impl Strategy<Value = DirectedGraph> {
    (1..=max_nodes).prop_flat_map(|n| {
        let edge = (0..n as NodeId, 0..n as NodeId);
        prop::collection::vec(edge, 0..=4 * n)
            .prop_map(move |edges| DirectedGraph::from_edges(n, edges).unwrap())
    })
}

fn permuted(g: &DirectedGraph, perm: &[NodeId]) -> DirectedGraph {
    let edges: Vec<_> = g.edges().map(|(s, d)| (perm[s as usize], perm[d as usize])).collect();
    DirectedGraph::from_edges(g.node_count(), edges).unwrap()
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<NodeId>> {
    Just((0..n as NodeId).collect::<Vec<_>>()).prop_shuffle()
}

/// Stationary vector of `G(α)` from the dense solve
/// `(I − α S) x = 1`, `P = x / Σx`.
fn dense_pagerank(g: &DirectedGraph, alpha: f64) -> Vec<f64> {
    let n = g.node_count();
    let a = DMatrix::identity(n, n) - dense_s(g) * alpha;
    let x = a.lu().solve(&DVector::from_element(n, 1.0)).unwrap();
    let s = x.sum();
    x.iter().map(|v| v / s).collect()
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn google_products_preserve_mass_and_sign(g in graph_strategy(60), alpha in 0.0f64..=1.0, seed in any::<u64>()) {
        let n = g.node_count();
        let v: Vec<f64> = (0..n).map(|i| ((seed.wrapping_add(i as u64 * 7919)) % 1000) as f64 + 1.0).collect();
        let total: f64 = v.iter().sum();
        for dir in [Direction::Forward, Direction::Inverse] {
            let op = StochasticOperator::new(&g, dir);
            let w = op.apply(&v, alpha).unwrap();
            let sum: f64 = w.iter().sum();
            prop_assert!((sum - total).abs() <= 1e-12 * total);
            prop_assert!(w.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn products_match_dense_google_matrix(g in graph_strategy(80), alpha in 0.0f64..=1.0) {
        let n = g.node_count();
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let want = dense_g(&g, alpha) * DVector::from_column_slice(&v);
        let got = StochasticOperator::new(&g, Direction::Forward).apply(&v, alpha).unwrap();
        for i in 0..n {
            prop_assert!((got[i] - want[i]).abs() <= 1e-13);
        }
        let gt = g.transpose();
        let want_inv = dense_g(&gt, alpha) * DVector::from_column_slice(&v);
        let got_inv = StochasticOperator::new(&g, Direction::Inverse).apply(&v, alpha).unwrap();
        for i in 0..n {
            prop_assert!((got_inv[i] - want_inv[i]).abs() <= 1e-13);
        }
    }

    #[test]
    fn subspaces_are_closed_and_free_of_dangling_nodes(g in graph_strategy(60)) {
        let d = detect_subspaces(&g);
        d.verify(&g).unwrap();
        let core: Vec<usize> = d.core_order().iter().map(|&c| c as usize).collect();
        prop_assert_eq!(core, naive_core(&g));
        for s in d.subspaces() {
            for &u in s {
                prop_assert!(g.out_degree(u as usize) > 0);
                for &v in g.out_neighbors(u as usize) {
                    prop_assert!(s.contains(&v));
                }
            }
            prop_assert!(s.windows(2).all(|w| w[0] < w[1]));
        }
        prop_assert_eq!(d.core_count() + d.subspace_node_count(), g.node_count());
    }

    #[test]
    fn detection_on_the_core_finds_nothing_more(g in graph_strategy(60)) {
        let d = detect_subspaces(&g);
        if d.core_count() > 0 {
            let core_graph = g.induced(d.core_order()).unwrap();
            let again = detect_subspaces(&core_graph);
            prop_assert_eq!(again.subspace_count(), 0);
        }
    }

    #[test]
    fn subspace_blocks_are_column_stochastic(g in graph_strategy(60)) {
        let op = StochasticOperator::new(&g, Direction::Forward);
        let d = detect_subspaces(&g);
        for s in d.subspaces() {
            let b = dense_block(&op, s);
            for j in 0..b.cols() {
                let col: f64 = (0..b.rows()).map(|i| b[(i, j)]).sum();
                prop_assert!((col - 1.0).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn pagerank_matches_dense_solve(g in graph_strategy(50)) {
        let alpha = 0.85;
        let op = StochasticOperator::new(&g, Direction::Forward);
        let rv = pagerank(&op, alpha, 1e-13, 10_000).unwrap();
        let want = dense_pagerank(&g, alpha);
        prop_assert!(l1(&rv.probabilities, &want) <= 1e-10);
        prop_assert!(rv.residual <= 1e-11);
        prop_assert!(rv.iterations <= 400);
        let sum: f64 = rv.probabilities.iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
        for k in 0..rv.len() {
            prop_assert_eq!(rv.rank[rv.order[k] as usize] as usize, k + 1);
        }
        for w in rv.order.windows(2) {
            let (a, b) = (w[0] as usize, w[1] as usize);
            let (pa, pb) = (rv.probabilities[a], rv.probabilities[b]);
            prop_assert!(pa > pb || (pa == pb && a < b));
        }
    }

    #[test]
    fn pagerank_commutes_with_relabelling((g, perm) in graph_strategy(50).prop_flat_map(|g| {
        let n = g.node_count();
        (Just(g), permutation(n))
    })) {
        let h = permuted(&g, &perm);
        let p = pagerank(&StochasticOperator::new(&g, Direction::Forward), 0.85, 1e-13, 10_000).unwrap();
        let q = pagerank(&StochasticOperator::new(&h, Direction::Forward), 0.85, 1e-13, 10_000).unwrap();
        for i in 0..g.node_count() {
            prop_assert!((p.probabilities[i] - q.probabilities[perm[i] as usize]).abs() <= 1e-12);
        }
        let ps = cheirank(&g, 0.85, 1e-13, 10_000).unwrap();
        let qs = cheirank(&h, 0.85, 1e-13, 10_000).unwrap();
        let kp = correlator(&p.probabilities, &ps.probabilities).unwrap();
        let kq = correlator(&q.probabilities, &qs.probabilities).unwrap();
        prop_assert!((kp - kq).abs() <= 1e-9);
    }

    #[test]
    fn cheirank_is_pagerank_of_the_transpose(g in graph_strategy(50)) {
        let a = cheirank(&g, 0.85, 1e-12, 10_000).unwrap();
        let gt = g.transpose();
        let b = pagerank(&StochasticOperator::new(&gt, Direction::Forward), 0.85, 1e-12, 10_000).unwrap();
        prop_assert_eq!(&a.probabilities, &b.probabilities);
        prop_assert_eq!(&a.order, &b.order);
    }

    #[test]
    fn near_one_pagerank_matches_dense_solve(g in graph_strategy(40)) {
        let alpha = 1.0 - 1e-8;
        let op = StochasticOperator::new(&g, Direction::Forward);
        let d = detect_subspaces(&g);
        let r = pagerank_near_one(&op, &d, alpha, 1e-12, 100_000);
        // without subspaces the power method may need ~1e8 steps; only
        // decompositions with subspaces are checked here
        if d.subspace_count() > 0 {
            let r = r.unwrap();
            let want = dense_pagerank(&g, alpha);
            prop_assert!(l1(&r.rank.probabilities, &want) <= 1e-7, "{}", l1(&r.rank.probabilities, &want));
            let mass: f64 = d.subspaces().iter().flatten().map(|&i| r.rank.probabilities[i as usize]).sum();
            prop_assert!((mass - r.mass_on_subspaces).abs() <= 1e-12);
        }
    }

    #[test]
    fn ipr_is_scale_invariant(re in prop::collection::vec(-1.0f64..1.0, 1..50), c in 1e-150f64..1e150) {
        let psi: Vec<Complex64> = re.iter().enumerate().map(|(i, &x)| Complex64::new(x, (i as f64).cos())).collect();
        let scaled: Vec<Complex64> = psi.iter().map(|z| z * c).collect();
        let (a, b) = (ipr(&psi).unwrap(), ipr(&scaled).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a);
        prop_assert!(a >= 1.0 - 1e-12 && a <= psi.len() as f64 + 1e-9);
    }

    #[test]
    fn cut_counts_match_brute_force((g, perm) in graph_strategy(30).prop_flat_map(|g| {
        let n = g.node_count();
        (Just(g), permutation(n))
    })) {
        let c = cut_counts(&g, &perm).unwrap();
        prop_assert_eq!(c.rows.len(), g.node_count() + 1);
        for row in &c.rows {
            let a: Vec<NodeId> = perm[..row.k].to_vec();
            let mut want = [0u64; 4];
            for (s, d) in g.edges() {
                let idx = 2 * (!a.contains(&s)) as usize + (!a.contains(&d)) as usize;
                want[idx] += 1;
            }
            prop_assert_eq!([row.n_aa, row.n_ab, row.n_ba, row.n_bb], want);
            prop_assert_eq!(row.n_aa + row.n_ab + row.n_ba + row.n_bb, c.link_count);
        }
    }

    #[test]
    fn density_grids_are_normalized(perm_a in permutation(97), perm_b in permutation(97), cells in 1usize..40) {
        let to_rank = |p: &[NodeId]| {
            let mut k = vec![0u32; p.len()];
            for (pos, &i) in p.iter().enumerate() {
                k[i as usize] = pos as u32 + 1;
            }
            k
        };
        let (ka, kb) = (to_rank(&perm_a), to_rank(&perm_b));
        for scale in [GridScale::Linear, GridScale::Log] {
            let grid = density_grid(&ka, &kb, cells, scale).unwrap();
            prop_assert!((grid.total_weight() - 1.0).abs() <= 1e-12);
            let total: u64 = (0..cells).flat_map(|x| (0..cells).map(move |y| (x, y))).map(|(x, y)| grid.count(x, y)).sum();
            prop_assert_eq!(total, 97);
        }
    }

    #[test]
    fn edge_list_round_trip(g in graph_strategy(60), base in 0u8..=1) {
        let mut text = Vec::new();
        write_edge_list(&g, &mut text, base).unwrap();
        let opts = EdgeListOptions { index_base: base, ..EdgeListOptions::default() };
        let back = load_edge_list(&text[..], &opts);
        if g.edge_count() == 0 {
            prop_assert!(back.is_err());
        } else {
            let back = back.unwrap();
            prop_assert_eq!(back.node_count(), g.node_count());
            prop_assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
        }
        let mut bin = Vec::new();
        write_binary(&g, &mut bin).unwrap();
        let b = read_binary(&bin[..]).unwrap();
        prop_assert_eq!(b.node_count(), g.node_count());
        prop_assert_eq!(b.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }

    #[test]
    fn degree_sums_and_transpose(g in graph_strategy(60)) {
        let out: usize = (0..g.node_count()).map(|i| g.out_degree(i)).sum();
        let inn: usize = (0..g.node_count()).map(|i| g.in_degree(i)).sum();
        prop_assert_eq!(out, g.edge_count());
        prop_assert_eq!(inn, g.edge_count());
        let t = g.transpose();
        let st = t.stats();
        prop_assert_eq!(st.node_count, g.node_count());
        prop_assert_eq!(st.link_count, g.edge_count());
        prop_assert_eq!(st.dangling_count, (0..g.node_count()).filter(|&i| g.in_degree(i) == 0).count());
        prop_assert_eq!(t.transpose().edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
        prop_assert_eq!(g.dangling_nodes(Direction::Inverse), t.dangling_nodes(Direction::Forward));
    }
}

#[test]
fn rank_order_breaks_ties_by_node_id() {
    assert_eq!(rank_order(&[0.2, 0.4, 0.2, 0.2]), vec![1, 0, 2, 3]);
}

#[test]
fn dense_s_columns_sum_to_one() {
    let g = common::fixture_graph(3, 50);
    let s = dense_s(&g);
    for j in 0..s.ncols() {
        assert!((s.column(j).sum() - 1.0).abs() < 1e-13);
    }
}
