//! Undirected simple graphs, independent sets and instance generators.
//!
//! Vertices are dense ids `0..n`. Induced subgraphs carry `labels` that map
//! each vertex back to its id in the root graph, so solutions found on a
//! kernel can always be expressed on the original instance.

pub(crate) mod generate;
mod io;

pub use generate::{
    build_asset_graph, build_unit_disk_graph, generate_union_jack, AssetGraphSpec, UnionJackSpec,
    DISTANCE_RTOL, UNION_JACK_RADIUS_RATIO,
};
pub use io::{parse_dimacs, parse_json, read_graph, to_dimacs, to_json, write_graph, GraphFormat};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Free-form provenance stored alongside a graph in the JSON format.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    coords: Option<Vec<[f64; 2]>>,
    labels: Option<Vec<usize>>,
    meta: Option<GraphMeta>,
}

impl Graph {
    /// Builds a graph from an edge list. Edges are unordered; `(u, v)` and
    /// `(v, u)` in the same list count as a duplicate.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut normalized = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= vertex_count {
                    return Err(Error::VertexOutOfRange { vertex: w, vertex_count });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v) in &normalized {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            vertex_count,
            edges: normalized,
            adjacency,
            coords: None,
            labels: None,
            meta: None,
        })
    }

    pub fn edgeless(vertex_count: usize) -> Self {
        Graph::new(vertex_count, []).expect("edgeless graph is always valid")
    }

    pub fn complete(vertex_count: usize) -> Self {
        let edges = (0..vertex_count).flat_map(|u| (u + 1..vertex_count).map(move |v| (u, v)));
        Graph::new(vertex_count, edges).expect("complete graph is always valid")
    }

    pub fn path(vertex_count: usize) -> Self {
        Graph::new(vertex_count, (1..vertex_count).map(|v| (v - 1, v))).expect("valid path")
    }

    pub fn cycle(vertex_count: usize) -> Self {
        assert!(vertex_count >= 3, "a simple cycle needs at least three vertices");
        let edges = (0..vertex_count).map(|v| (v, (v + 1) % vertex_count));
        Graph::new(vertex_count, edges).expect("valid cycle")
    }

    pub fn with_coords(mut self, coords: Vec<[f64; 2]>) -> Result<Self> {
        if coords.len() != self.vertex_count {
            return Err(Error::InvalidGraph(format!(
                "{} coordinates for {} vertices",
                coords.len(),
                self.vertex_count
            )));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.vertex_count {
            return Err(Error::InvalidGraph(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.vertex_count
            )));
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("labels must be unique".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_meta(mut self, meta: GraphMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_count == 0
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.vertex_count && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn meta(&self) -> Option<&GraphMeta> {
        self.meta.as_ref()
    }

    /// Id of `v` in the root graph this graph was extracted from.
    pub fn label(&self, v: usize) -> usize {
        match &self.labels {
            Some(labels) => labels[v],
            None => v,
        }
    }

    /// Subgraph induced by `keep` (any order, duplicates ignored). Vertex `i`
    /// of the result is the `i`-th smallest kept vertex; labels are composed
    /// so they keep pointing at the root graph.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Graph {
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let mut index = vec![usize::MAX; self.vertex_count];
        for (new, &old) in kept.iter().enumerate() {
            index[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]));
        let mut sub = Graph::new(kept.len(), edges).expect("induced subgraph of a valid graph");
        sub.coords = self
            .coords
            .as_ref()
            .map(|c| kept.iter().map(|&v| c[v]).collect());
        sub.labels = Some(kept.iter().map(|&v| self.label(v)).collect());
        sub
    }

    /// Same graph with vertex `v` renamed to `perm[v]`. Coordinates and
    /// labels travel with their vertex.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.vertex_count;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter("relabel requires a permutation".into()));
        }
        let mut g = Graph::new(n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))?;
        let mut inverse = vec![0; n];
        for (v, &p) in perm.iter().enumerate() {
            inverse[p] = v;
        }
        g.coords = self
            .coords
            .as_ref()
            .map(|c| inverse.iter().map(|&v| c[v]).collect());
        g.labels = self
            .labels
            .as_ref()
            .map(|l| inverse.iter().map(|&v| l[v]).collect());
        g.meta = self.meta.clone();
        Ok(g)
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.vertex_count {
            Err(Error::VertexOutOfRange { vertex: v, vertex_count: self.vertex_count })
        } else {
            Ok(())
        }
    }

    /// First conflicting pair in `members`, if any.
    pub(crate) fn find_conflict(&self, members: &[usize]) -> Result<Option<(usize, usize)>> {
        let mut inside = vec![false; self.vertex_count];
        for &v in members {
            self.check_vertex(v)?;
            inside[v] = true;
        }
        for &v in members {
            if let Some(&u) = self.adjacency[v].iter().find(|&&u| inside[u]) {
                return Ok(Some((v.min(u), v.max(u))));
            }
        }
        Ok(None)
    }
}

/// True iff no edge of `graph` has both endpoints in `candidate`.
pub fn is_independent(graph: &Graph, candidate: &[usize]) -> Result<bool> {
    Ok(graph.find_conflict(candidate)?.is_none())
}

/// A validated independent set, stored as sorted distinct vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndependentSet(Vec<usize>);

impl IndependentSet {
    pub fn new(graph: &Graph, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some((u, v)) = graph.find_conflict(&members)? {
            return Err(Error::NotIndependent(u, v));
        }
        Ok(IndependentSet(members))
    }

    pub fn empty() -> Self {
        IndependentSet(Vec::new())
    }

    /// Caller guarantees independence; members are sorted and deduplicated.
    pub(crate) fn from_members_unchecked(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        IndependentSet(members)
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn to_bits(&self, vertex_count: usize) -> Vec<bool> {
        let mut bits = vec![false; vertex_count];
        for &v in &self.0 {
            bits[v] = true;
        }
        bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_set_is_independent() {
        assert!(is_independent(&Graph::complete(4), &[]).unwrap());
        assert!(is_independent(&Graph::edgeless(0), &[]).unwrap());
    }

    #[test]
    fn triangle_pair_is_dependent() {
        assert!(!is_independent(&Graph::complete(3), &[0, 1]).unwrap());
    }

    #[test]
    fn path_endpoints_are_independent() {
        assert!(is_independent(&Graph::path(3), &[0, 2]).unwrap());
    }

    #[test]
    fn out_of_range_vertex_is_an_error() {
        let err = is_independent(&Graph::path(3), &[0, 3]).unwrap_err();
        assert!(matches!(err, Error::VertexOutOfRange { vertex: 3, vertex_count: 3 }));
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        assert!(matches!(Graph::new(3, [(1, 1)]), Err(Error::SelfLoop(1))));
        assert!(matches!(
            Graph::new(3, [(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
    }

    #[test]
    fn coords_must_match_vertex_count() {
        assert!(Graph::edgeless(2).with_coords(vec![[0.0, 0.0]]).is_err());
    }

    #[test]
    fn labels_must_be_unique() {
        assert!(Graph::edgeless(2).with_labels(vec![4, 4]).is_err());
        assert!(Graph::edgeless(2).with_labels(vec![4, 5]).is_ok());
    }

    #[test]
    fn induced_subgraph_composes_labels() {
        let g = Graph::path(5);
        let sub = g.induced_subgraph(&[4, 1, 2]);
        assert_eq!(sub.vertex_count(), 3);
        assert_eq!(sub.edges(), &[(0, 1)]);
        assert_eq!(sub.labels(), Some(&[1, 2, 4][..]));
        let subsub = sub.induced_subgraph(&[0, 2]);
        assert_eq!(subsub.labels(), Some(&[1, 4][..]));
        assert_eq!(subsub.edge_count(), 0);
    }

    #[test]
    fn independent_set_rejects_conflicts() {
        let g = Graph::path(3);
        assert!(matches!(
            IndependentSet::new(&g, [1, 2]),
            Err(Error::NotIndependent(1, 2))
        ));
        let set = IndependentSet::new(&g, [2, 0, 2]).unwrap();
        assert_eq!(set.members(), &[0, 2]);
        assert_eq!(set.size(), 2);
    }

    #[test]
    fn relabel_permutes_edges_and_coords() {
        let g = Graph::path(3)
            .with_coords(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
            .unwrap();
        let r = g.relabel(&[2, 0, 1]).unwrap();
        assert!(r.has_edge(2, 0));
        assert!(r.has_edge(0, 1));
        assert!(!r.has_edge(2, 1));
        assert_eq!(r.coords().unwrap()[2], [0.0, 0.0]);
        assert!(g.relabel(&[0, 0, 1]).is_err());
    }
}
