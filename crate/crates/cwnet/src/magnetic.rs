//! Magnetic Laplacians of directed graphs.
//!
//! A directed graph is mapped to a complex-weighted one: magnitudes are the
//! symmetrised weights `w_s(i,j) = (w_ij + w_ji)/2` and each one-directional
//! edge carries phase `±θ` by orientation (`0` for reciprocated pairs). The
//! magnetic Laplacian is the complex Laplacian of that graph, so balance
//! theory determines when the normalized operator attains its extreme
//! eigenvalues 0 and 2: both conditions reduce to arithmetic on the effective
//! lengths (net orientation counts) of the skeleton's fundamental cycles.
//!
//! For eigenvalue 0 the condition on the sweep grid `θ = 2π/r` is `r | g`
//! with `g` the gcd of nonzero effective lengths. For eigenvalue 2 the
//! corresponding antibalance condition also involves each cycle's parity:
//! `net·θ + len·π ≡ 0 (mod 2π)` per fundamental cycle. The divisor-set
//! description `Θ₂ = {2π/c + π}` reported by [`theta_two_set`] misses grid
//! points whenever a cycle is even (e.g. the directed 6-cycle at `θ = 2π/3`),
//! so [`sweep`] derives its predictions from the full per-cycle conditions,
//! which match the eigensolver exactly.

use crate::graph::{ComplexGraph, DirectedGraph, EdgeRecord};
use crate::linalg::{hermitian_eig, CMatrix};
use crate::{angle, clustering, Error, Result};
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Fundamental-cycle orientation data of a directed graph's skeleton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectiveCycleReport {
    /// `|#forward − #backward|` per fundamental cycle.
    pub fundamental_effective_lengths: Vec<usize>,
    /// Edge count of each fundamental cycle, paired with the entry above.
    pub fundamental_lengths: Vec<usize>,
    /// gcd of the nonzero effective lengths (0 when none).
    pub gcd_nonzero: usize,
    /// All positive divisors of `gcd_nonzero`, ascending (empty when 0).
    pub divisor_set: Vec<usize>,
}

/// A set of phases, either finite or all of `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ThetaSet {
    Finite(Vec<f64>),
    AllTheta,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MagneticSweepResult {
    pub r_values: Vec<usize>,
    pub lambda_min: Vec<f64>,
    pub lambda_max: Vec<f64>,
    pub predicted_zero_r: Vec<usize>,
    pub predicted_two_r: Vec<usize>,
}

/// Orientation `a(i,j)`: +1 for `i→j` only, −1 for `j→i` only, 0 for a
/// reciprocated pair, and `None` when the skeleton has no such edge.
fn orientation(h: &DirectedGraph, i: usize, j: usize) -> Option<i64> {
    let fwd = h.weight(i, j) > 0.0;
    let bwd = h.weight(j, i) > 0.0;
    match (fwd, bwd) {
        (true, true) => Some(0),
        (true, false) => Some(1),
        (false, true) => Some(-1),
        (false, false) => None,
    }
}

/// The complex-weighted view `G^θ`: magnitude `w_s(i,j)`, phase `θ·a(i,j)`.
pub fn induced_complex_graph(h: &DirectedGraph, theta: f64) -> Result<ComplexGraph> {
    let mut records: Vec<EdgeRecord> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for &(i, j, _) in h.edges() {
        let key = (i.min(j), i.max(j));
        if !seen.insert(key) {
            continue;
        }
        let (u, v) = key;
        let ws = (h.weight(u, v) + h.weight(v, u)) / 2.0;
        let a = orientation(h, u, v).unwrap();
        records.push((u, v, ws, angle::wrap(theta * a as f64)));
    }
    ComplexGraph::with_components(h.node_count(), &records)
}

/// The magnetic Laplacian `L^θ`: diagonal `Σ_h w_s(i,h)`, off-diagonal
/// `−w_s(i,j)·e^{iθ·a(i,j)}`. Hermitian by construction.
pub fn magnetic_laplacian(h: &DirectedGraph, theta: f64) -> CMatrix {
    let n = h.node_count();
    let mut l = Array2::<Complex64>::zeros((n, n));
    let mut degree = vec![0.0f64; n];
    let mut seen = std::collections::BTreeSet::new();
    for &(i, j, _) in h.edges() {
        let key = (i.min(j), i.max(j));
        if !seen.insert(key) {
            continue;
        }
        let (u, v) = key;
        let ws = (h.weight(u, v) + h.weight(v, u)) / 2.0;
        let a = orientation(h, u, v).unwrap();
        let off = -Complex64::from_polar(ws, theta * a as f64);
        l[(u, v)] = off;
        l[(v, u)] = off.conj();
        degree[u] += ws;
        degree[v] += ws;
    }
    for i in 0..n {
        l[(i, i)] = Complex64::new(degree[i], 0.0);
    }
    l
}

fn symmetrized_degrees(h: &DirectedGraph) -> Result<Vec<f64>> {
    let n = h.node_count();
    let mut degree = vec![0.0f64; n];
    for &(i, j, w) in h.edges() {
        let ws = (w + h.weight(j, i)) / 2.0;
        // each directed edge contributes half of the pair weight; a
        // reciprocated pair is visited twice and sums to w_s on each side
        degree[i] += ws / if h.weight(j, i) > 0.0 { 2.0 } else { 1.0 };
        degree[j] += ws / if h.weight(j, i) > 0.0 { 2.0 } else { 1.0 };
    }
    if let Some(idx) = degree.iter().position(|&d| d <= 0.0) {
        return Err(Error::InvalidParameter(format!("node {idx} has zero degree")));
    }
    Ok(degree)
}

/// Random-walk normalization `D^{θ−1} L^θ` (same spectrum as the Hermitian
/// form by similarity).
pub fn normalized_magnetic_laplacian(h: &DirectedGraph, theta: f64) -> Result<CMatrix> {
    let degree = symmetrized_degrees(h)?;
    let mut l = magnetic_laplacian(h, theta);
    let n = h.node_count();
    for i in 0..n {
        let inv = 1.0 / degree[i];
        for j in 0..n {
            l[(i, j)] *= inv;
        }
    }
    Ok(l)
}

/// Hermitian normalization `D^{−1/2} L^θ D^{−1/2}`; eigenvalues lie in
/// `[0, 2]` and are the ones used by [`sweep`].
pub fn normalized_magnetic_hermitian(h: &DirectedGraph, theta: f64) -> Result<CMatrix> {
    let degree = symmetrized_degrees(h)?;
    let inv_sqrt: Vec<f64> = degree.iter().map(|&d| 1.0 / d.sqrt()).collect();
    let mut l = magnetic_laplacian(h, theta);
    let n = h.node_count();
    for i in 0..n {
        for j in 0..n {
            l[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    Ok(l)
}

/// Computes the fundamental cycles of the skeleton from a BFS spanning tree
/// and their net orientation counts.
pub fn effective_cycles(h: &DirectedGraph) -> EffectiveCycleReport {
    let n = h.node_count();
    let adj = h.skeleton();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut order = Vec::new();
    for root in 0..n {
        if parent[root] != usize::MAX {
            continue;
        }
        parent[root] = root;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &adj[v] {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut effective = Vec::new();
    let mut lengths = Vec::new();
    for u in 0..n {
        for &v in &adj[u] {
            if v <= u || parent[v] == u || parent[u] == v {
                continue;
            }
            // fundamental cycle: tree path u→…→lca→…→v plus the edge v→u
            let (mut a, mut b) = (u, v);
            let mut left = Vec::new();
            let mut right = Vec::new();
            while depth[a] > depth[b] {
                left.push(a);
                a = parent[a];
            }
            while depth[b] > depth[a] {
                right.push(b);
                b = parent[b];
            }
            while a != b {
                left.push(a);
                right.push(b);
                a = parent[a];
                b = parent[b];
            }
            left.push(a);
            right.reverse();
            left.extend(right);
            let cycle = left; // u … lca … v
            let mut net: i64 = 0;
            let len = cycle.len();
            for idx in 0..len {
                let x = cycle[idx];
                let y = cycle[(idx + 1) % len];
                net += orientation(h, x, y).unwrap();
            }
            effective.push(net.unsigned_abs() as usize);
            lengths.push(len);
        }
    }
    let gcd_nonzero = effective.iter().filter(|&&e| e > 0).fold(0usize, |acc, &e| gcd(acc, e));
    let divisor_set = if gcd_nonzero == 0 {
        Vec::new()
    } else {
        (1..=gcd_nonzero).filter(|d| gcd_nonzero % d == 0).collect()
    };
    EffectiveCycleReport {
        fundamental_effective_lengths: effective,
        fundamental_lengths: lengths,
        gcd_nonzero,
        divisor_set,
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if a == 0 {
        b
    } else {
        gcd(b % a, a)
    }
}

/// `Θ₀ = {2π/c : c ∈ divisor_set}` when cycles of nonzero effective length
/// exist, otherwise all of `[0, 2π)`.
pub fn theta_zero_set(report: &EffectiveCycleReport) -> ThetaSet {
    if report.gcd_nonzero == 0 {
        ThetaSet::AllTheta
    } else {
        ThetaSet::Finite(
            report.divisor_set.iter().map(|&c| angle::wrap(angle::TWO_PI / c as f64)).collect(),
        )
    }
}

/// `Θ₂ = {(2π/c + π) mod 2π : c ∈ divisor_set}` when cycles of nonzero
/// effective length exist, otherwise all of `[0, 2π)`. This divisor-set
/// description is incomplete on even cycles; see [`predicts_two`] for the
/// exact grid condition the sweep uses.
pub fn theta_two_set(report: &EffectiveCycleReport) -> ThetaSet {
    if report.gcd_nonzero == 0 {
        ThetaSet::AllTheta
    } else {
        ThetaSet::Finite(
            report
                .divisor_set
                .iter()
                .map(|&c| angle::wrap(angle::TWO_PI / c as f64 + std::f64::consts::PI))
                .collect(),
        )
    }
}

/// Whether the normalized operator attains eigenvalue 0 at `θ = 2π/r`:
/// `G^θ` balanced ⇔ every fundamental cycle satisfies `net·θ ≡ 0 (mod 2π)`
/// ⇔ `r | net` for every cycle.
pub fn predicts_zero(report: &EffectiveCycleReport, r: usize) -> bool {
    report.fundamental_effective_lengths.iter().all(|&net| net % r == 0)
}

/// Whether the normalized operator attains eigenvalue 2 at `θ = 2π/r`:
/// `G^θ` antibalanced ⇔ every fundamental cycle satisfies
/// `net·θ + len·π ≡ 0 (mod 2π)` ⇔ `r | 2·net` and `2·net/r + len` is even.
pub fn predicts_two(report: &EffectiveCycleReport, r: usize) -> bool {
    report
        .fundamental_effective_lengths
        .iter()
        .zip(&report.fundamental_lengths)
        .all(|(&net, &len)| {
            let doubled = 2 * net;
            doubled % r == 0 && (doubled / r + len) % 2 == 0
        })
}

/// Extreme eigenvalues of the normalized magnetic Laplacian over the integer
/// grid `θ = 2π/r`, `r = 1..=r_max`, with the closed-form predictions of
/// where 0 and 2 are attained.
pub fn sweep(h: &DirectedGraph, r_max: usize) -> Result<MagneticSweepResult> {
    if r_max == 0 {
        return Err(Error::InvalidParameter("r_max must be at least 1".into()));
    }
    let report = effective_cycles(h);
    let mut r_values = Vec::with_capacity(r_max);
    let mut lambda_min = Vec::with_capacity(r_max);
    let mut lambda_max = Vec::with_capacity(r_max);
    let mut predicted_zero_r = Vec::new();
    let mut predicted_two_r = Vec::new();
    for r in 1..=r_max {
        let theta = angle::TWO_PI / r as f64;
        let eig = hermitian_eig(&normalized_magnetic_hermitian(h, theta)?)?;
        r_values.push(r);
        lambda_max.push(eig.eigenvalues[0]);
        lambda_min.push(*eig.eigenvalues.last().unwrap());
        if predicts_zero(&report, r) {
            predicted_zero_r.push(r);
        }
        if predicts_two(&report, r) {
            predicted_two_r.push(r);
        }
    }
    Ok(MagneticSweepResult { r_values, lambda_min, lambda_max, predicted_zero_r, predicted_two_r })
}

/// Which extreme eigenvector drives the role embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoleVector {
    SmallestEigenvalue,
    LargestEigenvalue,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RolesResult {
    pub labels: Vec<usize>,
    pub num_roles: usize,
    /// Set when the selected extreme eigenvalue is not actually attained
    /// (λ_min not near 0, resp. λ_max not near 2); the embedding is still
    /// returned.
    pub low_confidence: bool,
}

/// Groups nodes by the phase pattern of an extreme eigenvector of the
/// normalized magnetic Laplacian: components are embedded as `(Re, Im)`
/// pairs and clustered with k-means. When `num_roles` is not given it is
/// estimated by a gap heuristic on the sorted component phases.
pub fn roles(
    h: &DirectedGraph,
    theta: f64,
    num_roles: Option<usize>,
    seed: u64,
    vector: RoleVector,
) -> Result<RolesResult> {
    let n = h.node_count();
    let eig = hermitian_eig(&normalized_magnetic_hermitian(h, theta)?)?;
    let (col, low_confidence) = match vector {
        RoleVector::SmallestEigenvalue => {
            (n - 1, eig.eigenvalues[n - 1].abs() > 1e-6)
        }
        RoleVector::LargestEigenvalue => (0, (eig.eigenvalues[0] - 2.0).abs() > 1e-6),
    };
    let components: Vec<Complex64> = (0..n).map(|i| eig.eigenvectors[(i, col)]).collect();
    let k = match num_roles {
        Some(k) => k,
        None => phase_cluster_count(&components),
    };
    if k == 0 || k > n {
        return Err(Error::InvalidK(format!("num_roles = {k} outside 1..={n}")));
    }
    let mut points = Array2::<f64>::zeros((n, 2));
    for (i, z) in components.iter().enumerate() {
        points[(i, 0)] = z.re;
        points[(i, 1)] = z.im;
    }
    let labels = clustering::kmeans(&points, k, seed, 20)?;
    Ok(RolesResult { labels, num_roles: k, low_confidence })
}

/// Counts phase clusters among eigenvector components: sorts the phases of
/// the non-negligible components and counts circular gaps of at least half
/// the largest gap.
fn phase_cluster_count(components: &[Complex64]) -> usize {
    let max_mag = components.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if max_mag == 0.0 {
        return 1;
    }
    let mut phases: Vec<f64> = components
        .iter()
        .filter(|z| z.norm() > 1e-9 * max_mag)
        .map(|z| angle::wrap(z.arg()))
        .collect();
    if phases.len() <= 1 {
        return 1;
    }
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = phases.len();
    let mut gaps: Vec<f64> = (0..m)
        .map(|i| {
            if i + 1 < m {
                phases[i + 1] - phases[i]
            } else {
                angle::TWO_PI - phases[m - 1] + phases[0]
            }
        })
        .collect();
    gaps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let threshold = (gaps[0] / 2.0).max(1e-9);
    gaps.iter().filter(|&&g| g >= threshold).count().max(1)
}

/// A directed cycle `0 → 1 → … → n−1 → 0` with unit weights.
pub fn gen_directed_cycle(n: usize) -> Result<DirectedGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter("cycle length must be at least 2".into()));
    }
    let edges: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
    DirectedGraph::new(n, &edges)
}

/// Directed cycles chained at single shared nodes: each cycle starts at the
/// last node of the previous one, so no two cycles share an edge.
pub fn gen_tree_of_cycles(lengths: &[usize]) -> Result<DirectedGraph> {
    if lengths.is_empty() {
        return Err(Error::InvalidParameter("need at least one cycle length".into()));
    }
    if lengths.iter().any(|&l| l < 2) {
        return Err(Error::InvalidParameter("cycle lengths must be at least 2".into()));
    }
    let n: usize = lengths.iter().map(|&l| l - 1).sum::<usize>() + 1;
    let mut edges = Vec::new();
    let mut shared = 0usize;
    let mut next = 1usize;
    for &len in lengths {
        let mut prev = shared;
        for _ in 0..len - 1 {
            edges.push((prev, next, 1.0));
            prev = next;
            next += 1;
        }
        edges.push((prev, shared, 1.0));
        shared = prev;
    }
    DirectedGraph::new(n, &edges)
}

/// A directed `n`-cycle plus one directed chord `from → to`, so the chord
/// shares edges with the base cycle's sub-cycles.
pub fn gen_nested_cycles(n: usize, chord_from: usize, chord_to: usize) -> Result<DirectedGraph> {
    if n < 3 {
        return Err(Error::InvalidParameter("base cycle must have length at least 3".into()));
    }
    if chord_from >= n || chord_to >= n || chord_from == chord_to {
        return Err(Error::InvalidParameter("chord endpoints must be distinct cycle nodes".into()));
    }
    if chord_to == (chord_from + 1) % n {
        return Err(Error::InvalidParameter("chord duplicates a base cycle edge".into()));
    }
    let mut edges: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
    edges.push((chord_from, chord_to, 1.0));
    DirectedGraph::new(n, &edges)
}
