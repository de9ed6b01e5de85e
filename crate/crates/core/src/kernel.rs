//! Exact kernelization by simplicial-vertex removal.
//!
//! A vertex whose closed neighbourhood is a clique belongs to some maximum
//! independent set, so it can be taken and its neighbourhood discarded
//! without losing optimality. Repeating this until no such vertex is left
//! yields an irreducible kernel.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, IndependentSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub selected: usize,
    pub removed: Vec<usize>,
}

/// Ordered record of one `classical_reduce` call, in ids of the input graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    /// Input-graph ids of the kernel vertices, in kernel order.
    pub kernel_vertices: Vec<usize>,
}

impl ReductionTrace {
    pub fn selected(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.steps.iter().map(|s| s.selected).collect();
        s.sort_unstable();
        s
    }

    pub fn removed(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.steps.iter().flat_map(|s| s.removed.iter().copied()).collect();
        r.sort_unstable();
        r
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Number of input vertices eliminated (selected or removed).
    pub fn footprint(&self) -> usize {
        self.steps.iter().map(|s| 1 + s.removed.len()).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    /// Induced subgraph on the survivors; labels point at the root graph.
    pub graph: Graph,
    pub irreducible: bool,
}

impl Kernel {
    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }
}

/// Smallest-id vertex whose closed neighbourhood is a clique.
pub fn find_simplicial_vertex(graph: &Graph) -> Option<usize> {
    let alive = vec![true; graph.vertex_count()];
    (0..graph.vertex_count()).find(|&v| is_simplicial(graph, &alive, v))
}

fn is_simplicial(graph: &Graph, alive: &[bool], v: usize) -> bool {
    let nbrs: Vec<usize> = graph.neighbors(v).iter().copied().filter(|&u| alive[u]).collect();
    nbrs.iter()
        .enumerate()
        .all(|(i, &a)| nbrs[i + 1..].iter().all(|&b| graph.has_edge(a, b)))
}

/// Exhaustively removes simplicial vertices, always taking the smallest id
/// available.
///
/// Deleting vertices never breaks an existing clique neighbourhood, so once a
/// vertex is simplicial it stays simplicial until it is itself removed. Only
/// the surviving neighbours of deleted vertices need rechecking.
pub fn classical_reduce(graph: &Graph) -> (Kernel, ReductionTrace) {
    let n = graph.vertex_count();
    let mut alive = vec![true; n];
    let mut ready: BTreeSet<usize> =
        (0..n).filter(|&v| is_simplicial(graph, &alive, v)).collect();
    let mut steps = Vec::new();

    while let Some(v) = ready.pop_first() {
        let removed: Vec<usize> = graph.neighbors(v).iter().copied().filter(|&u| alive[u]).collect();
        alive[v] = false;
        for &u in &removed {
            alive[u] = false;
            ready.remove(&u);
        }
        let mut dirty = BTreeSet::new();
        for &u in &removed {
            dirty.extend(graph.neighbors(u).iter().copied().filter(|&w| alive[w]));
        }
        for w in dirty {
            if !ready.contains(&w) && is_simplicial(graph, &alive, w) {
                ready.insert(w);
            }
        }
        steps.push(ReductionStep { selected: v, removed });
    }

    let kernel_vertices: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    let kernel = Kernel {
        graph: graph.induced_subgraph(&kernel_vertices),
        irreducible: true,
    };
    (kernel, ReductionTrace { steps, kernel_vertices })
}

/// Lifts a kernel solution back to the reduced graph: the trace's selected
/// vertices plus the kernel solution in input-graph ids.
pub fn reconstruct(
    trace: &ReductionTrace,
    kernel: &Kernel,
    kernel_solution: &IndependentSet,
) -> Result<IndependentSet> {
    if kernel.graph.vertex_count() != trace.kernel_vertices.len() {
        return Err(Error::InvalidParameter("kernel does not belong to this trace".into()));
    }
    let checked = IndependentSet::new(&kernel.graph, kernel_solution.members().iter().copied())?;
    let mut members = trace.selected();
    members.extend(checked.members().iter().map(|&v| trace.kernel_vertices[v]));
    Ok(IndependentSet::from_members_unchecked(members))
}
