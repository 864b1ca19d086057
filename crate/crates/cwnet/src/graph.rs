//! Complex-weighted graphs with Hermitian structure, plus plain directed
//! graphs used by the magnetic-Laplacian analysis.
//!
//! Edges are stored once in a canonical direction (`source < target`); the
//! mirrored entry of the weight matrix is always constructed as the complex
//! conjugate, so `W == W*` holds bitwise by construction.

use crate::angle;
use crate::{Error, Result};
use ndarray::{Array1, Array2};
use num_complex::Complex64;

/// A single Hermitian edge weight `r·e^{iφ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexWeight {
    /// Magnitude `r ≥ 0`. A zero magnitude means the edge does not exist,
    /// so stored weights are strictly positive.
    pub magnitude: f64,
    /// Phase `φ ∈ [0, 2π)` for the edge's canonical direction.
    pub phase: f64,
}

impl ComplexWeight {
    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }

    /// The weight seen when traversing the edge in the opposite direction.
    pub fn conjugated(&self) -> ComplexWeight {
        ComplexWeight {
            magnitude: self.magnitude,
            phase: angle::mirror(self.phase),
        }
    }
}

/// An undirected edge with its canonical-direction weight (`source < target`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: ComplexWeight,
}

/// Node degrees `d_i = Σ_j r_ij` and their total `2m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVector {
    pub entries: Vec<f64>,
    pub total: f64,
}

/// An undirected-topology graph with Hermitian complex weights.
#[derive(Debug, Clone)]
pub struct ComplexGraph {
    node_count: usize,
    edges: Vec<Edge>,
    /// Per node: (neighbor, index into `edges`), in canonical edge order.
    neighbors: Vec<Vec<(usize, usize)>>,
}

/// One input record: `(i, j, magnitude, phase)` with the phase given for the
/// direction `i → j`.
pub type EdgeRecord = (usize, usize, f64, f64);

const MIRROR_TOL: f64 = 1e-12;

impl ComplexGraph {
    /// Builds a graph from edge records, enforcing every invariant including
    /// a connected skeleton. An edge may be given in one direction (the
    /// Hermitian mirror is inferred) or in both (the mirrors must agree).
    pub fn new(node_count: usize, records: &[EdgeRecord]) -> Result<Self> {
        let g = Self::with_components(node_count, records)?;
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    /// Like [`ComplexGraph::new`] but tolerates a disconnected skeleton, for
    /// block-diagonal constructions (e.g. clustering tests with `p_out = 0`).
    /// Isolated nodes are still rejected since degrees must stay positive.
    pub fn with_components(node_count: usize, records: &[EdgeRecord]) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidParameter("node_count must be positive".into()));
        }
        let mut canonical: std::collections::BTreeMap<(usize, usize), (ComplexWeight, bool)> =
            std::collections::BTreeMap::new();
        for &(i, j, magnitude, phase) in records {
            if i >= node_count || j >= node_count {
                return Err(Error::InvalidEdge(format!(
                    "edge ({i}, {j}) out of range for n = {node_count}"
                )));
            }
            if i == j {
                return Err(Error::InvalidEdge(format!("self-loop at node {i}")));
            }
            if !(magnitude > 0.0) || !magnitude.is_finite() {
                return Err(Error::InvalidEdge(format!(
                    "edge ({i}, {j}) has non-positive magnitude {magnitude}"
                )));
            }
            if !(0.0..angle::TWO_PI).contains(&phase) {
                return Err(Error::InvalidEdge(format!(
                    "edge ({i}, {j}) has phase {phase} outside [0, 2*pi)"
                )));
            }
            let reversed = i > j;
            let key = if reversed { (j, i) } else { (i, j) };
            let weight = ComplexWeight {
                magnitude,
                phase: if reversed { angle::mirror(phase) } else { phase },
            };
            match canonical.get(&key) {
                None => {
                    canonical.insert(key, (weight, reversed));
                }
                Some(&(existing, was_reversed)) => {
                    if was_reversed == reversed {
                        return Err(Error::HermitianViolation(format!(
                            "edge ({i}, {j}) given twice in the same direction"
                        )));
                    }
                    if (existing.magnitude - weight.magnitude).abs() > MIRROR_TOL
                        || !angle::eq(existing.phase, weight.phase, MIRROR_TOL)
                    {
                        return Err(Error::HermitianViolation(format!(
                            "mirrored records for edge ({}, {}) disagree",
                            key.0, key.1
                        )));
                    }
                }
            }
        }
        let edges: Vec<Edge> = canonical
            .into_iter()
            .map(|((source, target), (weight, _))| Edge { source, target, weight })
            .collect();
        let mut neighbors = vec![Vec::new(); node_count];
        for (idx, e) in edges.iter().enumerate() {
            neighbors[e.source].push((e.target, idx));
            neighbors[e.target].push((e.source, idx));
        }
        if let Some(isolated) = neighbors.iter().position(|nb| nb.is_empty()) {
            return Err(Error::InvalidEdge(format!(
                "node {isolated} is isolated (degrees must be positive)"
            )));
        }
        Ok(ComplexGraph { node_count, edges, neighbors })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` as `(neighbor, edge index)` pairs.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.neighbors[v]
    }

    /// The weight of the edge from `i` to `j`, if present.
    pub fn directed_weight(&self, i: usize, j: usize) -> Option<ComplexWeight> {
        self.neighbors[i].iter().find(|&&(nb, _)| nb == j).map(|&(_, idx)| {
            let e = &self.edges[idx];
            if e.source == i {
                e.weight
            } else {
                e.weight.conjugated()
            }
        })
    }

    /// Degrees `d_i = Σ_j r_ij` and the total weight `2m`.
    pub fn degree_vector(&self) -> DegreeVector {
        let mut entries = vec![0.0; self.node_count];
        for e in &self.edges {
            entries[e.source] += e.weight.magnitude;
            entries[e.target] += e.weight.magnitude;
        }
        let total = entries.iter().sum();
        DegreeVector { entries, total }
    }

    /// The Hermitian weight matrix `W`. Mirrored entries are constructed as
    /// exact conjugates of their canonical counterpart.
    pub fn weight_matrix(&self) -> Array2<Complex64> {
        let mut w = Array2::zeros((self.node_count, self.node_count));
        for e in &self.edges {
            let v = e.weight.value();
            w[(e.source, e.target)] = v;
            w[(e.target, e.source)] = v.conj();
        }
        w
    }

    /// The complex Laplacian `L = D − W`.
    pub fn laplacian(&self) -> Array2<Complex64> {
        let d = self.degree_vector();
        let mut l = self.weight_matrix();
        l.mapv_inplace(|z| -z);
        for i in 0..self.node_count {
            l[(i, i)] = Complex64::new(d.entries[i], 0.0);
        }
        l
    }

    /// The random-walk Laplacian `L_rw = I − D⁻¹W`.
    pub fn random_walk_laplacian(&self) -> Array2<Complex64> {
        let mut m = self.transition_matrix();
        m.mapv_inplace(|z| -z);
        for i in 0..self.node_count {
            m[(i, i)] += Complex64::new(1.0, 0.0);
        }
        m
    }

    /// The complex transition matrix `P = D⁻¹W`.
    pub fn transition_matrix(&self) -> Array2<Complex64> {
        let d = self.degree_vector();
        let mut p = self.weight_matrix();
        for i in 0..self.node_count {
            let inv = Complex64::new(1.0 / d.entries[i], 0.0);
            for j in 0..self.node_count {
                p[(i, j)] *= inv;
            }
        }
        p
    }

    /// The Hermitian matrix `P_h = D^{−1/2} W D^{−1/2}` similar to `P`
    /// (`P = D^{−1/2} P_h D^{1/2}`), whose spectrum is therefore real.
    pub fn hermitian_transition(&self) -> Array2<Complex64> {
        let d = self.degree_vector();
        let inv_sqrt: Vec<f64> = d.entries.iter().map(|&x| 1.0 / x.sqrt()).collect();
        let mut p = Array2::zeros((self.node_count, self.node_count));
        for e in &self.edges {
            let v = e.weight.value() * (inv_sqrt[e.source] * inv_sqrt[e.target]);
            p[(e.source, e.target)] = v;
            p[(e.target, e.source)] = v.conj();
        }
        p
    }

    /// The graph `|W|` with the same topology and magnitudes but all phases 0.
    pub fn magnitude_graph(&self) -> ComplexGraph {
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| Edge {
                source: e.source,
                target: e.target,
                weight: ComplexWeight { magnitude: e.weight.magnitude, phase: 0.0 },
            })
            .collect();
        ComplexGraph {
            node_count: self.node_count,
            edges,
            neighbors: self.neighbors.clone(),
        }
    }

    /// The subgraph induced by `nodes`, reindexed in the given order. The
    /// result may be disconnected; isolated nodes are rejected as usual.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<ComplexGraph> {
        let mut index = std::collections::HashMap::new();
        for (new, &old) in nodes.iter().enumerate() {
            if old >= self.node_count {
                return Err(Error::InvalidParameter(format!("node {old} out of range")));
            }
            if index.insert(old, new).is_some() {
                return Err(Error::InvalidParameter(format!("node {old} repeated")));
            }
        }
        let records: Vec<EdgeRecord> = self
            .edges
            .iter()
            .filter_map(|e| {
                let (Some(&s), Some(&t)) = (index.get(&e.source), index.get(&e.target)) else {
                    return None;
                };
                Some((s, t, e.weight.magnitude, e.weight.phase))
            })
            .collect();
        ComplexGraph::with_components(nodes.len(), &records)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.node_count];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &self.neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.node_count
    }

    /// Whether the undirected skeleton is 2-colorable.
    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![u8::MAX; self.node_count];
        for start in 0..self.node_count {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &(w, _) in &self.neighbors[v] {
                    if color[w] == u8::MAX {
                        color[w] = 1 - color[v];
                        queue.push_back(w);
                    } else if color[w] == color[v] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Whether the symmetric walk on the skeleton is aperiodic. Every edge
    /// yields a closed walk of length 2, so the period divides 2 and the walk
    /// is aperiodic exactly when some cycle is odd; trees and other bipartite
    /// skeletons have period 2.
    pub fn is_aperiodic(&self) -> bool {
        !self.is_bipartite()
    }

    /// BFS spanning forest from node 0 (then from the smallest unreached node
    /// in each further component): `(parent, depth)` per node, with
    /// `parent[root] == root`.
    pub(crate) fn bfs_tree(&self) -> (Vec<usize>, Vec<usize>) {
        let mut parent = vec![usize::MAX; self.node_count];
        let mut depth = vec![0usize; self.node_count];
        for root in 0..self.node_count {
            if parent[root] != usize::MAX {
                continue;
            }
            parent[root] = root;
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &(w, _) in &self.neighbors[v] {
                    if parent[w] == usize::MAX {
                        parent[w] = v;
                        depth[w] = depth[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        (parent, depth)
    }
}

/// Enumerates every simple cycle of an undirected adjacency structure exactly
/// once, as a node sequence starting at the cycle's smallest node. Exponential
/// in general; intended for desk-scale oracles (`n ≤ 12`).
pub fn simple_cycles(adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adjacency.len();
    let mut cycles = Vec::new();
    let mut path: Vec<usize> = Vec::new();
    let mut on_path = vec![false; n];

    fn dfs(
        start: usize,
        v: usize,
        adjacency: &[Vec<usize>],
        path: &mut Vec<usize>,
        on_path: &mut Vec<bool>,
        cycles: &mut Vec<Vec<usize>>,
    ) {
        for &w in &adjacency[v] {
            if w == start {
                // require length >= 3 and a fixed orientation so each cycle
                // is reported once
                if path.len() >= 3 && path[1] < *path.last().unwrap() {
                    cycles.push(path.clone());
                }
            } else if w > start && !on_path[w] {
                path.push(w);
                on_path[w] = true;
                dfs(start, w, adjacency, path, on_path, cycles);
                on_path[w] = false;
                path.pop();
            }
        }
    }

    for start in 0..n {
        path.clear();
        path.push(start);
        on_path[start] = true;
        dfs(start, start, adjacency, &mut path, &mut on_path, &mut cycles);
        on_path[start] = false;
    }
    cycles
}

/// A directed graph with positive edge weights (magnetic-Laplacian input).
#[derive(Debug, Clone)]
pub struct DirectedGraph {
    node_count: usize,
    edges: Vec<(usize, usize, f64)>,
    weights: std::collections::BTreeMap<(usize, usize), f64>,
}

impl DirectedGraph {
    pub fn new(node_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidParameter("node_count must be positive".into()));
        }
        let mut weights = std::collections::BTreeMap::new();
        for &(i, j, w) in edges {
            if i >= node_count || j >= node_count {
                return Err(Error::InvalidEdge(format!(
                    "edge ({i}, {j}) out of range for n = {node_count}"
                )));
            }
            if i == j {
                return Err(Error::InvalidEdge(format!("self-loop at node {i}")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidEdge(format!(
                    "edge ({i}, {j}) has non-positive weight {w}"
                )));
            }
            if weights.insert((i, j), w).is_some() {
                return Err(Error::InvalidEdge(format!("duplicate edge ({i}, {j})")));
            }
        }
        let edges: Vec<(usize, usize, f64)> =
            weights.iter().map(|(&(i, j), &w)| (i, j, w)).collect();
        let g = DirectedGraph { node_count, edges, weights };
        if !g.skeleton_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights.get(&(i, j)).copied().unwrap_or(0.0)
    }

    /// Skeleton adjacency: unordered neighbor lists over edges of either
    /// direction, deduplicated, ascending.
    pub fn skeleton(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for &(i, j, _) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    fn skeleton_connected(&self) -> bool {
        let adj = self.skeleton();
        let mut seen = vec![false; self.node_count];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.node_count
    }
}

/// Convenience: dense Hermitian check used by matrix-level entry points.
pub fn max_hermitian_asymmetry(m: &Array2<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// A complex state vector indexed by nodes.
pub fn complex_vector(values: &[Complex64]) -> Array1<Complex64> {
    Array1::from_vec(values.to_vec())
}
