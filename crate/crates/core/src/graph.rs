//! Unweighted trust graph in compressed sparse row form.

use alloc::vec::Vec;

use crate::ids::IdMap;
use crate::linalg::CsrMatrix;

/// Sparse, unweighted user-user trust adjacency.
///
/// Neighbor lists are sorted ascending and free of duplicates and self-loops.
/// When `directed` is false the adjacency is symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    directed: bool,
    ids: IdMap,
}

/// Records dropped while building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl TrustGraph {
    /// Builds a graph from arcs. Self-loops and repeated arcs are dropped
    /// and counted. For an undirected graph each arc is inserted both ways.
    ///
    /// Panics if an endpoint is `>= ids.len()`.
    pub fn from_arcs<I>(ids: IdMap, arcs: I, directed: bool) -> (Self, BuildStats)
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let n = ids.len();
        let mut stats = BuildStats::default();
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (u, v) in arcs {
            assert!((u as usize) < n && (v as usize) < n, "arc ({u}, {v}) out of range for {n} nodes");
            if u == v {
                stats.self_loops += 1;
                continue;
            }
            pairs.push((u, v));
            if !directed {
                pairs.push((v, u));
            }
        }
        let before = pairs.len();
        pairs.sort_unstable();
        pairs.dedup();
        stats.duplicates = if directed { before - pairs.len() } else { (before - pairs.len()) / 2 };
        (Self::from_sorted_pairs(ids, &pairs, directed), stats)
    }

    /// Undirected graph on `n` nodes with sequential ids.
    pub fn undirected(n: usize, edges: &[(u32, u32)]) -> Self {
        Self::from_arcs(IdMap::sequential(n), edges.iter().copied(), false).0
    }

    /// Directed graph on `n` nodes with sequential ids.
    pub fn directed(n: usize, arcs: &[(u32, u32)]) -> Self {
        Self::from_arcs(IdMap::sequential(n), arcs.iter().copied(), true).0
    }

    fn from_sorted_pairs(ids: IdMap, pairs: &[(u32, u32)], directed: bool) -> Self {
        let n = ids.len();
        let mut offsets = alloc::vec![0usize; n + 1];
        for &(u, _) in pairs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.iter().map(|&(_, v)| v).collect();
        TrustGraph { offsets, targets, directed, ids }
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of stored arcs (each undirected edge counts twice).
    pub fn num_arcs(&self) -> usize {
        self.targets.len()
    }

    /// Number of edges: arcs for a directed graph, unordered pairs otherwise.
    pub fn num_edges(&self) -> usize {
        if self.directed {
            self.targets.len()
        } else {
            self.targets.len() / 2
        }
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn ids(&self) -> &IdMap {
        &self.ids
    }

    #[inline]
    pub fn neighbors(&self, u: u32) -> &[u32] {
        let u = u as usize;
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: u32) -> usize {
        let u = u as usize;
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn has_arc(&self, u: u32, v: u32) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.num_nodes() as u32).flat_map(move |u| self.neighbors(u).iter().map(move |&v| (u, v)))
    }

    /// Unordered edges `(u, v)` with `u < v`; only meaningful for undirected graphs.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.arcs().filter(|&(u, v)| u < v)
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = alloc::vec![0usize; self.num_nodes()];
        for &v in &self.targets {
            deg[v as usize] += 1;
        }
        deg
    }

    /// Nodes with at least one incident arc in either direction.
    pub fn has_incident_arc(&self) -> Vec<bool> {
        let mut seen: Vec<bool> = (0..self.num_nodes() as u32).map(|u| self.degree(u) > 0).collect();
        for &v in &self.targets {
            seen[v as usize] = true;
        }
        seen
    }

    /// Symmetric closure: `u - v` is present iff `u -> v` or `v -> u` was.
    pub fn to_undirected(&self) -> TrustGraph {
        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(self.targets.len() * 2);
        for (u, v) in self.arcs() {
            pairs.push((u, v));
            pairs.push((v, u));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Self::from_sorted_pairs(self.ids.clone(), &pairs, false)
    }

    /// Reverses every arc. An undirected graph is returned unchanged.
    pub fn transpose(&self) -> TrustGraph {
        if !self.directed {
            return self.clone();
        }
        let mut pairs: Vec<(u32, u32)> = self.arcs().map(|(u, v)| (v, u)).collect();
        pairs.sort_unstable();
        Self::from_sorted_pairs(self.ids.clone(), &pairs, true)
    }

    /// Relabels node `u` as `perm[u]`.
    pub fn permute(&self, perm: &[u32]) -> TrustGraph {
        assert_eq!(perm.len(), self.num_nodes());
        let mut names = alloc::vec![""; perm.len()];
        for (u, &p) in perm.iter().enumerate() {
            names[p as usize] = self.ids.name(u as u32).unwrap_or("");
        }
        let mut ids = IdMap::new();
        for name in names {
            ids.intern(name);
        }
        let mut pairs: Vec<(u32, u32)> = self.arcs().map(|(u, v)| (perm[u as usize], perm[v as usize])).collect();
        pairs.sort_unstable();
        Self::from_sorted_pairs(ids, &pairs, self.directed)
    }

    /// Adjacency as a sparse matrix of ones.
    pub fn adjacency(&self) -> CsrMatrix {
        CsrMatrix::from_parts(
            self.num_nodes(),
            self.num_nodes(),
            self.offsets.clone(),
            self.targets.clone(),
            alloc::vec![1.0; self.targets.len()],
        )
    }

    /// Row-stochastic transition matrix `D^-1 A`; rows of isolated nodes are zero.
    pub fn transition(&self) -> CsrMatrix {
        let mut values = Vec::with_capacity(self.targets.len());
        for u in 0..self.num_nodes() as u32 {
            let d = self.degree(u) as f64;
            values.extend(core::iter::repeat_n(1.0 / d, self.degree(u)));
        }
        CsrMatrix::from_parts(self.num_nodes(), self.num_nodes(), self.offsets.clone(), self.targets.clone(), values)
    }

    /// Induced subgraph on the nodes with `keep[u]`; returns it with the
    /// old index of each new node.
    pub fn induced(&self, keep: &[bool]) -> (TrustGraph, Vec<u32>) {
        let mut new_index = alloc::vec![u32::MAX; self.num_nodes()];
        let mut old = Vec::new();
        let mut ids = IdMap::new();
        for u in 0..self.num_nodes() {
            if keep[u] {
                new_index[u] = old.len() as u32;
                old.push(u as u32);
                ids.intern(self.ids.name(u as u32).unwrap_or(""));
            }
        }
        let mut pairs = Vec::new();
        for (u, v) in self.arcs() {
            let (a, b) = (new_index[u as usize], new_index[v as usize]);
            if a != u32::MAX && b != u32::MAX {
                pairs.push((a, b));
            }
        }
        pairs.sort_unstable();
        (Self::from_sorted_pairs(ids, &pairs, self.directed), old)
    }
}
