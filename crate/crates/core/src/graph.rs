//! Directed graphs in compressed adjacency form, plus the text and binary
//! formats they are read from and written to.
//!
//! A graph keeps both the forward (out-link) and backward (in-link) adjacency
//! so that the link operator of the network and of its inverse are equally
//! cheap. Duplicate edges are collapsed, self-loops are kept.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};

pub type NodeId = u32;

/// Which of the two link operators a computation refers to: `S` built from
/// the network as given, or `S*` built from the network with every link
/// reversed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    pub fn reversed(self) -> Self {
        match self {
            Direction::Forward => Direction::Inverse,
            Direction::Inverse => Direction::Forward,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Direction::Forward => "fwd",
            Direction::Inverse => "inv",
        }
    }
}

/// Compressed rows: `targets[offsets[i]..offsets[i + 1]]`, sorted per row.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Csr {
    fn row(&self, i: usize) -> &[NodeId] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Builds rows from `(row, col)` pairs already sorted and unique.
    fn from_sorted_pairs(n: usize, pairs: &[(NodeId, NodeId)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(r, _) in pairs {
            offsets[r as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.iter().map(|&(_, c)| c).collect();
        Csr { offsets, targets }
    }

    /// Counting-sort transpose; rows of the result come out sorted.
    fn transposed(&self, n: usize) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &t in &self.targets {
            offsets[t as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0 as NodeId; self.targets.len()];
        for src in 0..n {
            for &dst in self.row(src) {
                let slot = &mut cursor[dst as usize];
                targets[*slot] = src as NodeId;
                *slot += 1;
            }
        }
        Csr { offsets, targets }
    }
}

/// Immutable directed graph on dense node ids `0..N`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectedGraph {
    node_count: usize,
    forward: Csr,
    backward: Csr,
    labels: Option<LabelTable>,
}

impl DirectedGraph {
    /// Builds a graph from `(source, destination)` pairs; duplicates collapse.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        Self::from_edges_with(node_count, edges, Execution::default())
    }

    pub fn from_edges_with<I>(node_count: usize, edges: I, exec: Execution) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        if node_count == 0 {
            return Err(Error::InvalidArgument("graph needs at least one node".into()));
        }
        if node_count > NodeId::MAX as usize {
            return Err(Error::InvalidArgument(format!(
                "{node_count} nodes exceed the 32-bit id space"
            )));
        }
        let mut keys: Vec<u64> = Vec::new();
        for (s, d) in edges {
            for id in [s, d] {
                if id as usize >= node_count {
                    return Err(Error::Range {
                        id: id as i64,
                        bound: node_count as u64,
                    });
                }
            }
            keys.push(((s as u64) << 32) | d as u64);
        }
        exec::sort_unstable(exec, &mut keys);
        keys.dedup();
        let pairs: Vec<(NodeId, NodeId)> = keys
            .iter()
            .map(|&k| ((k >> 32) as NodeId, k as NodeId))
            .collect();
        drop(keys);
        let forward = Csr::from_sorted_pairs(node_count, &pairs);
        drop(pairs);
        let backward = forward.transposed(node_count);
        Ok(DirectedGraph {
            node_count,
            forward,
            backward,
            labels: None,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.forward.targets.len()
    }

    pub fn out_neighbors(&self, i: usize) -> &[NodeId] {
        self.forward.row(i)
    }

    pub fn in_neighbors(&self, i: usize) -> &[NodeId] {
        self.backward.row(i)
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.forward.degree(i)
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.backward.degree(i)
    }

    /// Out-links of `i` in the network selected by `dir` (in-links of the
    /// original network for [`Direction::Inverse`]).
    pub fn successors(&self, dir: Direction, i: usize) -> &[NodeId] {
        match dir {
            Direction::Forward => self.forward.row(i),
            Direction::Inverse => self.backward.row(i),
        }
    }

    pub fn predecessors(&self, dir: Direction, i: usize) -> &[NodeId] {
        self.successors(dir.reversed(), i)
    }

    /// Nodes without out-links in the network selected by `dir`.
    pub fn dangling_nodes(&self, dir: Direction) -> Vec<NodeId> {
        (0..self.node_count)
            .filter(|&i| self.successors(dir, i).is_empty())
            .map(|i| i as NodeId)
            .collect()
    }

    /// All edges in ascending `(source, destination)` order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count)
            .flat_map(move |s| self.forward.row(s).iter().map(move |&d| (s as NodeId, d)))
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.forward.row(src).binary_search(&(dst as NodeId)).is_ok()
    }

    /// The inverse network: every link reversed, labels kept.
    pub fn transpose(&self) -> DirectedGraph {
        DirectedGraph {
            node_count: self.node_count,
            forward: self.backward.clone(),
            backward: self.forward.clone(),
            labels: self.labels.clone(),
        }
    }

    pub fn stats(&self) -> GraphStats {
        graph_stats(self)
    }

    pub fn labels(&self) -> Option<&LabelTable> {
        self.labels.as_ref()
    }

    /// Attaches a label table; every labelled id must be a node of the graph.
    pub fn attach_labels(&mut self, labels: LabelTable) -> Result<()> {
        if let Some((&id, _)) = labels.entries.range(self.node_count as u64..).next() {
            return Err(Error::Range {
                id: id as i64,
                bound: self.node_count as u64,
            });
        }
        self.labels = Some(labels);
        Ok(())
    }

    /// Sub-graph induced on `keep` (sorted node ids), renumbered densely in
    /// that order. Links leaving the kept set are dropped.
    pub fn induced(&self, keep: &[NodeId]) -> Result<DirectedGraph> {
        const NONE: NodeId = NodeId::MAX;
        let mut position = vec![NONE; self.node_count];
        for (p, &v) in keep.iter().enumerate() {
            position[v as usize] = p as NodeId;
        }
        let edges = keep.iter().enumerate().flat_map(|(p, &v)| {
            let position = &position;
            self.out_neighbors(v as usize)
                .iter()
                .filter(move |&&w| position[w as usize] != NONE)
                .map(move |&w| (p as NodeId, position[w as usize]))
        });
        DirectedGraph::from_edges(keep.len(), edges.collect::<Vec<_>>())
    }
}

/// Size figures of a network.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    #[serde(rename = "N")]
    pub node_count: usize,
    #[serde(rename = "N_l")]
    pub link_count: usize,
    #[serde(rename = "dangling")]
    pub dangling_count: usize,
    /// `N_ℓ / N`.
    #[serde(rename = "zeta")]
    pub links_per_node: f64,
}

pub fn graph_stats(g: &DirectedGraph) -> GraphStats {
    let dangling_count = (0..g.node_count).filter(|&i| g.out_degree(i) == 0).count();
    GraphStats {
        node_count: g.node_count,
        link_count: g.edge_count(),
        dangling_count,
        links_per_node: g.edge_count() as f64 / g.node_count as f64,
    }
}

pub fn transpose(g: &DirectedGraph) -> DirectedGraph {
    g.transpose()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeListOptions {
    /// Id of the first node in the file, 0 or 1.
    pub index_base: u8,
    pub comment_prefix: char,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        EdgeListOptions {
            index_base: 0,
            comment_prefix: '#',
        }
    }
}

struct EdgeLines {
    pairs: Vec<(i64, i64)>,
    /// From a `# Nodes: N` header comment.
    declared_nodes: Option<(usize, usize)>,
}

/// `N` of a SNAP-style `Nodes: N Edges: M` comment.
fn declared_node_count(comment: &str) -> Option<usize> {
    let mut tokens = comment.split_whitespace();
    while let Some(t) = tokens.next() {
        if t.eq_ignore_ascii_case("nodes:") {
            return tokens.next()?.parse().ok();
        }
    }
    None
}

fn parse_edge_lines<R: BufRead>(source: R, opts: &EdgeListOptions) -> Result<EdgeLines> {
    if opts.index_base > 1 {
        return Err(Error::InvalidArgument(format!(
            "index base must be 0 or 1, got {}",
            opts.index_base
        )));
    }
    let base = opts.index_base as i64;
    let mut pairs = Vec::new();
    let mut declared_nodes = None;
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if let Some(comment) = trimmed.strip_prefix(opts.comment_prefix) {
            if declared_nodes.is_none() {
                declared_nodes = declared_node_count(comment).map(|n| (n, lineno));
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut next_id = || -> Result<i64> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: lineno,
                message: "expected two node ids".into(),
            })?;
            let raw: i64 = tok.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid node id {tok:?}"),
            })?;
            let id = raw - base;
            if id < 0 {
                return Err(Error::Range {
                    id,
                    bound: NodeId::MAX as u64,
                });
            }
            if id >= NodeId::MAX as i64 {
                return Err(Error::Range {
                    id,
                    bound: NodeId::MAX as u64,
                });
            }
            Ok(id)
        };
        let src = next_id()?;
        let dst = next_id()?;
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("unexpected token {extra:?}"),
            });
        }
        pairs.push((src, dst));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(EdgeLines {
        pairs,
        declared_nodes,
    })
}

/// Reads a whitespace-separated `src dst` edge list. `N` is one more than the
/// largest id seen, or the count of a `# Nodes: N` header comment, which
/// allows trailing isolated nodes.
pub fn load_edge_list<R: BufRead>(source: R, opts: &EdgeListOptions) -> Result<DirectedGraph> {
    let EdgeLines {
        pairs,
        declared_nodes,
    } = parse_edge_lines(source, opts)?;
    let max = pairs.iter().map(|&(s, d)| s.max(d)).max().unwrap_or(0);
    let mut n = max as usize + 1;
    if let Some((declared, line)) = declared_nodes {
        if declared < n {
            return Err(Error::Parse {
                line,
                message: format!("header declares {declared} nodes but id {max} occurs"),
            });
        }
        n = declared;
    }
    DirectedGraph::from_edges(n, pairs.into_iter().map(|(s, d)| (s as NodeId, d as NodeId)))
}

/// Maps dense node ids back to the ids of the input file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdMap {
    original: Vec<u64>,
}

impl IdMap {
    pub fn original_id(&self, node: NodeId) -> u64 {
        self.original[node as usize]
    }

    pub fn dense_id(&self, original: u64) -> Option<NodeId> {
        self.original
            .binary_search(&original)
            .ok()
            .map(|p| p as NodeId)
    }

    pub fn len(&self) -> usize {
        self.original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.original.is_empty()
    }

    /// Re-keys a label table read with original ids; unknown ids are an error.
    pub fn translate_labels(&self, labels: &LabelTable) -> Result<LabelTable> {
        let mut out = LabelTable::default();
        for (&id, text) in &labels.entries {
            let dense = self.dense_id(id).ok_or(Error::Range {
                id: id as i64,
                bound: self.original.len() as u64,
            })?;
            out.entries.insert(dense as u64, text.clone());
        }
        out.duplicates = labels.duplicates;
        Ok(out)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "node_id,original_id")?;
        for (dense, orig) in self.original.iter().enumerate() {
            writeln!(w, "{dense},{orig}")?;
        }
        Ok(())
    }
}

/// Like [`load_edge_list`] but assigns dense ids in ascending order of the
/// ids that actually occur, so sparse id spaces do not create empty nodes.
pub fn load_edge_list_remapped<R: BufRead>(
    source: R,
    opts: &EdgeListOptions,
) -> Result<(DirectedGraph, IdMap)> {
    let pairs = parse_edge_lines(source, opts)?.pairs;
    let mut ids: Vec<u64> = pairs
        .iter()
        .flat_map(|&(s, d)| [s as u64, d as u64])
        .collect();
    ids.sort_unstable();
    ids.dedup();
    let map = IdMap { original: ids };
    let dense = |x: i64| map.dense_id(x as u64).expect("id collected above");
    let graph = DirectedGraph::from_edges(
        map.len(),
        pairs.iter().map(|&(s, d)| (dense(s), dense(d))).collect::<Vec<_>>(),
    )?;
    Ok((graph, map))
}

/// Writes the canonical (sorted, unique) edge list after a `# Nodes: N
/// Edges: M` header.
pub fn write_edge_list<W: Write>(g: &DirectedGraph, mut w: W, index_base: u8) -> Result<()> {
    let base = index_base as u64;
    writeln!(w, "# Nodes: {} Edges: {}", g.node_count(), g.edge_count())?;
    for (s, d) in g.edges() {
        writeln!(w, "{} {}", s as u64 + base, d as u64 + base)?;
    }
    Ok(())
}

/// Node labels keyed by node id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelTable {
    entries: BTreeMap<u64, String>,
    /// Ids that appeared more than once in the source; the last entry won.
    pub duplicates: usize,
}

impl LabelTable {
    pub fn get(&self, node: usize) -> Option<&str> {
        self.entries.get(&(node as u64)).map(String::as_str)
    }

    /// The label, or the decimal id when the node has none.
    pub fn label_or_id(&self, node: usize) -> String {
        self.get(node)
            .map(str::to_owned)
            .unwrap_or_else(|| node.to_string())
    }

    pub fn insert(&mut self, node: u64, text: impl Into<String>) -> Option<String> {
        self.entries.insert(node, text.into())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &str)> {
        self.entries.iter().map(|(&k, v)| (k, v.as_str()))
    }
}

/// Reads `id<TAB>text` lines. Later duplicates replace earlier ones and are
/// counted in [`LabelTable::duplicates`].
pub fn load_labels<R: BufRead>(source: R) -> Result<LabelTable> {
    let mut table = LabelTable::default();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let (id, text) = line.split_once('\t').ok_or_else(|| Error::Parse {
            line: lineno,
            message: "expected id<TAB>label".into(),
        })?;
        let id: u64 = id.trim().parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("invalid node id {id:?}"),
        })?;
        if table.entries.insert(id, text.to_owned()).is_some() {
            table.duplicates += 1;
        }
    }
    Ok(table)
}

const CACHE_MAGIC: &[u8; 8] = b"GMSPCSR1";

/// Binary cache: magic, `N`, `N_ℓ`, then the `N + 1` forward offsets and the
/// `N_ℓ` targets, all little-endian `u64`.
pub fn write_binary<W: Write>(g: &DirectedGraph, mut w: W) -> Result<()> {
    w.write_all(CACHE_MAGIC)?;
    w.write_all(&(g.node_count as u64).to_le_bytes())?;
    w.write_all(&(g.edge_count() as u64).to_le_bytes())?;
    for &o in &g.forward.offsets {
        w.write_all(&(o as u64).to_le_bytes())?;
    }
    for &t in &g.forward.targets {
        w.write_all(&(t as u64).to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<DirectedGraph> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(Error::BadCache("wrong magic bytes".into()));
    }
    let mut word = [0u8; 8];
    let mut next = |r: &mut R| -> Result<u64> {
        r.read_exact(&mut word)?;
        Ok(u64::from_le_bytes(word))
    };
    let n = next(&mut r)? as usize;
    let m = next(&mut r)? as usize;
    if n == 0 || n > NodeId::MAX as usize {
        return Err(Error::BadCache(format!("node count {n}")));
    }
    let mut offsets = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        offsets.push(next(&mut r)? as usize);
    }
    if offsets[0] != 0 || offsets[n] != m || offsets.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::BadCache("offsets are not monotone".into()));
    }
    let mut targets = Vec::with_capacity(m);
    for _ in 0..m {
        let t = next(&mut r)?;
        if t >= n as u64 {
            return Err(Error::BadCache(format!("target {t} out of range")));
        }
        targets.push(t as NodeId);
    }
    let forward = Csr { offsets, targets };
    for i in 0..n {
        if forward.row(i).windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadCache(format!("row {i} not sorted and unique")));
        }
    }
    let backward = forward.transposed(n);
    Ok(DirectedGraph {
        node_count: n,
        forward,
        backward,
        labels: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &str, base: u8) -> Result<DirectedGraph> {
        load_edge_list(
            s.as_bytes(),
            &EdgeListOptions {
                index_base: base,
                ..Default::default()
            },
        )
    }

    fn edge_vec(g: &DirectedGraph) -> Vec<(NodeId, NodeId)> {
        g.edges().collect()
    }

    fn t3() -> DirectedGraph {
        DirectedGraph::from_edges(3, [(0, 1), (1, 0)]).unwrap()
    }

    #[test]
    fn node_count_header_keeps_isolated_nodes() {
        let g = load_edge_list("# Nodes: 3 Edges: 2\n0 1\n1 0\n".as_bytes(), &EdgeListOptions::default()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.dangling_nodes(Direction::Forward), vec![2]);
        let err = load_edge_list("# nodes: 2\n0 5\n".as_bytes(), &EdgeListOptions::default());
        assert!(matches!(err, Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn loads_two_cycle() {
        let g = load("0 1\n1 0\n", 0).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(edge_vec(&g), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn one_based_duplicates_collapse() {
        let g = load("1 2\n2 1\n1 2\n", 1).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(edge_vec(&g), vec![(0, 1), (1, 0)]);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn malformed_token_reports_line() {
        match load("0 1\nx 2\n", 0) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_after_base_is_range_error() {
        assert!(matches!(load("0 1\n", 1), Err(Error::Range { id: -1, .. })));
        assert!(matches!(load("-3 1\n", 0), Err(Error::Range { .. })));
    }

    #[test]
    fn empty_and_comment_only_inputs_fail() {
        assert!(matches!(load("", 0), Err(Error::EmptyInput)));
        assert!(matches!(load("# a\n# b\n\n", 0), Err(Error::EmptyInput)));
    }

    #[test]
    fn comments_and_self_loops() {
        let g = load("# header\n0 0\n0 1\n", 0).unwrap();
        assert_eq!(edge_vec(&g), vec![(0, 0), (0, 1)]);
        assert_eq!(g.in_neighbors(0), &[0]);
    }

    #[test]
    fn remap_compacts_sparse_ids() {
        let (g, map) =
            load_edge_list_remapped("10 500\n500 7\n".as_bytes(), &Default::default()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(map.original_id(0), 7);
        assert_eq!(map.original_id(2), 500);
        assert_eq!(edge_vec(&g), vec![(1, 2), (2, 0)]);
    }

    #[test]
    fn labels_last_wins() {
        let t = load_labels("0\tGaafu Alif Atoll\n".as_bytes()).unwrap();
        assert_eq!(t.get(0), Some("Gaafu Alif Atoll"));
        let t = load_labels("5\tA\n5\tB\n".as_bytes()).unwrap();
        assert_eq!(t.get(5), Some("B"));
        assert_eq!(t.duplicates, 1);
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn label_attachment_bounds() {
        let mut one = DirectedGraph::from_edges(1, [(0, 0)]).unwrap();
        one.attach_labels(load_labels("0\tX\n".as_bytes()).unwrap())
            .unwrap();
        let mut two = DirectedGraph::from_edges(2, [(0, 1)]).unwrap();
        let err = two
            .attach_labels(load_labels("3\tY\n".as_bytes()).unwrap())
            .unwrap_err();
        assert!(matches!(err, Error::Range { id: 3, bound: 2 }));
    }

    #[test]
    fn label_without_tab_is_parse_error() {
        assert!(matches!(
            load_labels("0 no tab\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn transpose_examples() {
        let g = DirectedGraph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(edge_vec(&g.transpose()), vec![(1, 0)]);
        let cyc = DirectedGraph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(cyc.transpose(), cyc);
        let tt = t3().transpose();
        assert_eq!(tt.node_count(), 3);
        assert_eq!(tt.in_degree(2), 0);
        assert_eq!(tt.out_degree(2), 0);
        assert_eq!(tt.transpose(), t3());
    }

    #[test]
    fn stats_examples() {
        let s = t3().stats();
        assert_eq!((s.node_count, s.link_count, s.dangling_count), (3, 2, 1));
        assert!((s.links_per_node - 2.0 / 3.0).abs() < 1e-15);

        let k3 = DirectedGraph::from_edges(
            3,
            [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)],
        )
        .unwrap();
        let s = k3.stats();
        assert_eq!((s.link_count, s.dangling_count), (6, 0));
        assert_eq!(s.links_per_node, 2.0);

        let single = DirectedGraph::from_edges(1, []).unwrap();
        let s = single.stats();
        assert_eq!((s.link_count, s.dangling_count), (0, 1));
        assert_eq!(s.links_per_node, 0.0);
    }

    #[test]
    fn binary_cache_round_trip() {
        let g = DirectedGraph::from_edges(5, [(0, 1), (0, 4), (3, 3), (4, 2)]).unwrap();
        let mut buf = Vec::new();
        write_binary(&g, &mut buf).unwrap();
        assert_eq!(&buf[..8], CACHE_MAGIC);
        assert_eq!(buf.len(), 8 + 16 + 8 * 6 + 8 * 4);
        assert_eq!(read_binary(buf.as_slice()).unwrap(), g);
        buf[0] = b'X';
        assert!(matches!(read_binary(buf.as_slice()), Err(Error::BadCache(_))));
    }

    #[test]
    fn induced_subgraph_drops_outside_links() {
        let g = DirectedGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 1)]).unwrap();
        let sub = g.induced(&[1, 2, 3]).unwrap();
        assert_eq!(edge_vec(&sub), vec![(0, 1), (1, 2), (2, 0)]);
    }
}
