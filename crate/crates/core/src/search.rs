//! Exact bitmask searches over independent sets: maximum size, counting and
//! enumeration by size. Graphs are limited to 64 vertices by the mask width;
//! callers impose tighter limits.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest graph the exact routines accept by default.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 40;

const MASK_BITS: usize = 64;

pub(crate) struct BitGraph {
    nbr: Vec<u64>,
    all: u64,
}

impl BitGraph {
    pub(crate) fn new(graph: &Graph, limit: usize) -> Result<Self> {
        let n = graph.vertex_count();
        let limit = limit.min(MASK_BITS);
        if n > limit {
            return Err(Error::LimitExceeded { what: "exact enumeration", actual: n, limit });
        }
        let mut nbr = vec![0u64; n];
        for &(u, v) in graph.edges() {
            nbr[u] |= 1 << v;
            nbr[v] |= 1 << u;
        }
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Ok(BitGraph { nbr, all })
    }

    /// Greedy clique cover of `cand`; its size bounds any independent set
    /// inside `cand` from above.
    fn clique_cover(&self, mut cand: u64) -> usize {
        let mut cliques = 0;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            // Grow a clique greedily from v among the remaining candidates.
            let mut pool = cand & self.nbr[v];
            while pool != 0 {
                let u = pool.trailing_zeros() as usize;
                cand &= !(1 << u);
                pool &= self.nbr[u];
                pool &= !(1 << u);
            }
            cliques += 1;
        }
        cliques
    }

    pub(crate) fn max_independent_set(&self) -> u64 {
        let mut best = 0u64;
        self.mis_rec(self.all, 0, &mut best);
        best
    }

    fn mis_rec(&self, mut cand: u64, mut chosen: u64, best: &mut u64) {
        // Vertices with at most one candidate neighbour are always safe to take.
        loop {
            let mut progressed = false;
            let mut scan = cand;
            while scan != 0 {
                let v = scan.trailing_zeros() as usize;
                scan &= scan - 1;
                if cand & (1 << v) == 0 {
                    continue;
                }
                if (self.nbr[v] & cand).count_ones() <= 1 {
                    chosen |= 1 << v;
                    cand &= !(self.nbr[v] | (1 << v));
                    progressed = true;
                }
            }
            if !progressed {
                break;
            }
        }
        if cand == 0 {
            if chosen.count_ones() > best.count_ones() {
                *best = chosen;
            }
            return;
        }
        if chosen.count_ones() as usize + self.clique_cover(cand) <= best.count_ones() as usize {
            return;
        }
        let mut pivot = 0;
        let mut pivot_deg = 0;
        let mut scan = cand;
        while scan != 0 {
            let v = scan.trailing_zeros() as usize;
            scan &= scan - 1;
            let d = (self.nbr[v] & cand).count_ones();
            if d > pivot_deg {
                pivot = v;
                pivot_deg = d;
            }
        }
        self.mis_rec(cand & !(self.nbr[pivot] | (1 << pivot)), chosen | (1 << pivot), best);
        self.mis_rec(cand & !(1 << pivot), chosen, best);
    }

    pub(crate) fn count_of_size(&self, size: usize) -> u128 {
        self.count_rec(self.all, size)
    }

    fn count_rec(&self, cand: u64, k: usize) -> u128 {
        if k == 0 {
            return 1;
        }
        let pop = cand.count_ones() as usize;
        if pop < k {
            return 0;
        }
        if pop > k && self.clique_cover(cand) < k {
            return 0;
        }
        let v = cand.trailing_zeros() as usize;
        let without = cand & !(1 << v);
        self.count_rec(without, k) + self.count_rec(without & !self.nbr[v], k - 1)
    }

    pub(crate) fn enumerate_of_size(&self, size: usize, cap: usize, out: &mut Vec<u64>) -> Result<()> {
        self.enum_rec(self.all, 0, size, cap, out)
    }

    fn enum_rec(&self, cand: u64, chosen: u64, k: usize, cap: usize, out: &mut Vec<u64>) -> Result<()> {
        if k == 0 {
            if out.len() >= cap {
                return Err(Error::LimitExceeded { what: "enumerated sets", actual: cap + 1, limit: cap });
            }
            out.push(chosen);
            return Ok(());
        }
        let pop = cand.count_ones() as usize;
        if pop < k || (pop > k && self.clique_cover(cand) < k) {
            return Ok(());
        }
        let v = cand.trailing_zeros() as usize;
        let without = cand & !(1 << v);
        self.enum_rec(without & !self.nbr[v], chosen | (1 << v), k - 1, cap, out)?;
        self.enum_rec(without, chosen, k, cap, out)
    }
}

pub(crate) fn mask_to_vec(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    out
}
