//! General cuts and two-level spectral clustering.
//!
//! Level-one communities are found from magnitudes, then each community is
//! split into subcommunities whose relative phases carry the structure. The
//! general ratio cut sums, per community, the absolute boundary cut plus a
//! `(1 − cos)` phase-misalignment penalty over ordered subcommunity pairs,
//! divided by community size — which is exactly `Tr(X*LX)` for the complex
//! indicator matrix `X`, so the relaxed minimizer is the span of the smallest
//! eigenvectors of `L`.
//!
//! Summation convention: all cut sums run over ordered node pairs, matching
//! the double sums that make the trace identity exact. An undirected edge
//! inside a subcommunity therefore contributes twice to `ccut(a, a)`, and the
//! identity `ccut(a, b) = ccut(b, a)` makes the between-pair total symmetric.

use crate::graph::ComplexGraph;
use crate::linalg::{hermitian_eig, CMatrix};
use crate::{angle, Error, Result};
use ndarray::Array2;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Two-level community labels: a community per node, a subcommunity within
/// that community, and a phase per (community, subcommunity) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelPartition {
    /// Node → community index in `0..k`.
    pub level_one: Vec<usize>,
    /// Node → subcommunity index within its community (contiguous from 0).
    pub level_two: Vec<usize>,
    /// `theta[h][a]` → phase of subcommunity `a` of community `h`, chosen so
    /// that an edge from `a` to `b` is expected to carry phase `θ_a − θ_b`.
    pub theta: Vec<Vec<f64>>,
}

impl TwoLevelPartition {
    pub fn community_count(&self) -> usize {
        self.theta.len()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.level_one.len() != n || self.level_two.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.level_one.len() });
        }
        let k = self.theta.len();
        let mut seen = vec![Vec::<bool>::new(); k];
        for (h, thetas) in self.theta.iter().enumerate() {
            seen[h] = vec![false; thetas.len()];
        }
        for i in 0..n {
            let h = self.level_one[i];
            if h >= k {
                return Err(Error::InvalidSubset(format!("node {i} has community {h} >= {k}")));
            }
            let a = self.level_two[i];
            if a >= self.theta[h].len() {
                return Err(Error::InvalidSubset(format!(
                    "node {i} has subcommunity {a} without a phase in community {h}"
                )));
            }
            seen[h][a] = true;
        }
        for (h, flags) in seen.iter().enumerate() {
            if flags.iter().any(|&f| !f) && !flags.is_empty() {
                // contiguity: every declared subcommunity must be used
                if flags.iter().any(|&f| !f) {
                    return Err(Error::InvalidSubset(format!(
                        "community {h} declares unused subcommunities"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Nodes of community `h`, ascending.
    pub fn community_members(&self, h: usize) -> Vec<usize> {
        (0..self.level_one.len()).filter(|&i| self.level_one[i] == h).collect()
    }

    /// Flattened `(community, subcommunity)` labels for scoring.
    pub fn product_labels(&self) -> Vec<usize> {
        let mut widths = vec![0usize; self.theta.len()];
        for (h, t) in self.theta.iter().enumerate() {
            widths[h] = t.len();
        }
        let mut offset = vec![0usize; self.theta.len()];
        let mut acc = 0;
        for h in 0..self.theta.len() {
            offset[h] = acc;
            acc += widths[h];
        }
        self.level_one
            .iter()
            .zip(&self.level_two)
            .map(|(&h, &a)| offset[h] + a)
            .collect()
    }
}

/// Per-community cut terms plus the assembled general ratio cut.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CutReport {
    pub absolute_cuts: Vec<f64>,
    /// `complex_cuts[h][a][b]` over ordered subcommunity pairs.
    pub complex_cuts: Vec<Vec<Vec<f64>>>,
    pub gcut: Vec<f64>,
    pub grcut: f64,
}

/// `cut(X, Xᶜ) = Σ_{i∈X, j∉X} r_ij` (each boundary edge counted once, as the
/// single ordered matrix entry with its row in `X`).
pub fn absolute_cut(g: &ComplexGraph, member: &[bool]) -> Result<f64> {
    if member.len() != g.node_count() {
        return Err(Error::DimensionMismatch { expected: g.node_count(), got: member.len() });
    }
    let inside = member.iter().filter(|&&m| m).count();
    if inside == 0 || inside == g.node_count() {
        return Err(Error::InvalidSubset("subset must be nonempty and proper".into()));
    }
    Ok(g.edges()
        .iter()
        .filter(|e| member[e.source] != member[e.target])
        .map(|e| e.weight.magnitude)
        .sum())
}

/// `ccut(X_a, X_b) = Σ_{i∈X_a, j∈X_b} (1 − cos(φ_ij − (θ_a − θ_b))) r_ij`
/// over ordered pairs. Pass the same set twice (with `θ_a = θ_b`) for the
/// within-subcommunity case, where each edge contributes in both directions.
pub fn complex_cut(
    g: &ComplexGraph,
    xa: &[usize],
    xb: &[usize],
    theta_a: f64,
    theta_b: f64,
) -> Result<f64> {
    let n = g.node_count();
    let mut in_a = vec![false; n];
    let mut in_b = vec![false; n];
    for &i in xa {
        if i >= n {
            return Err(Error::InvalidSubset(format!("node {i} out of range")));
        }
        in_a[i] = true;
    }
    for &j in xb {
        if j >= n {
            return Err(Error::InvalidSubset(format!("node {j} out of range")));
        }
        in_b[j] = true;
    }
    let same = xa == xb;
    if !same && xa.iter().any(|&i| in_b[i]) {
        return Err(Error::InvalidSubset("subcommunities overlap".into()));
    }
    let delta = theta_a - theta_b;
    let mut total = 0.0;
    for e in g.edges() {
        let (u, v) = (e.source, e.target);
        let r = e.weight.magnitude;
        if in_a[u] && in_b[v] {
            total += (1.0 - (e.weight.phase - delta).cos()) * r;
        }
        if in_a[v] && in_b[u] {
            total += (1.0 - (angle::mirror(e.weight.phase) - delta).cos()) * r;
        }
    }
    Ok(total)
}

/// Assembles the absolute, complex, and general cuts of a two-level
/// partition and the general ratio cut `Σ_h gcut_h / |X^{(h)}|`.
pub fn general_ratio_cut(g: &ComplexGraph, p: &TwoLevelPartition) -> Result<CutReport> {
    let n = g.node_count();
    p.validate(n)?;
    let k = p.community_count();
    let mut absolute_cuts = Vec::with_capacity(k);
    let mut complex_cuts = Vec::with_capacity(k);
    let mut gcut = Vec::with_capacity(k);
    let mut grcut = 0.0;
    for h in 0..k {
        let members = p.community_members(h);
        if members.is_empty() {
            return Err(Error::InvalidSubset(format!("community {h} is empty")));
        }
        let l_h = p.theta[h].len();
        let cut = if members.len() == n {
            0.0
        } else {
            let mut mask = vec![false; n];
            for &m in &members {
                mask[m] = true;
            }
            absolute_cut(g, &mask)?
        };
        let mut subs: Vec<Vec<usize>> = vec![Vec::new(); l_h];
        for &m in &members {
            subs[p.level_two[m]].push(m);
        }
        let mut ccuts = vec![vec![0.0; l_h]; l_h];
        let mut csum = 0.0;
        for a in 0..l_h {
            for b in 0..l_h {
                if subs[a].is_empty() || subs[b].is_empty() {
                    continue;
                }
                let c = complex_cut(g, &subs[a], &subs[b], p.theta[h][a], p.theta[h][b])?;
                ccuts[a][b] = c;
                csum += c;
            }
        }
        let total = cut + csum;
        grcut += total / members.len() as f64;
        absolute_cuts.push(cut);
        complex_cuts.push(ccuts);
        gcut.push(total);
    }
    Ok(CutReport { absolute_cuts, complex_cuts, gcut, grcut })
}

/// The `n×k` complex indicator matrix of a partition: column `h` carries
/// `exp(iθ_{X_a^{(h)}})/√|X^{(h)}|` on members of community `h`, zero
/// elsewhere; columns are orthonormal.
pub fn indicator_matrix(p: &TwoLevelPartition, n: usize) -> Result<CMatrix> {
    p.validate(n)?;
    let k = p.community_count();
    let mut sizes = vec![0usize; k];
    for &h in &p.level_one {
        sizes[h] += 1;
    }
    let mut x = Array2::<Complex64>::zeros((n, k));
    for i in 0..n {
        let h = p.level_one[i];
        let theta = p.theta[h][p.level_two[i]];
        x[(i, h)] = Complex64::from_polar(1.0 / (sizes[h] as f64).sqrt(), theta);
    }
    Ok(x)
}

/// `Tr(X* L X)`, the trace form of the general ratio cut.
pub fn trace_form(g: &ComplexGraph, p: &TwoLevelPartition) -> Result<f64> {
    let x = indicator_matrix(p, g.node_count())?;
    let l = g.laplacian();
    let lx = l.dot(&x);
    let mut trace = 0.0;
    for h in 0..x.ncols() {
        for i in 0..x.nrows() {
            trace += (x[(i, h)].conj() * lx[(i, h)]).re;
        }
    }
    Ok(trace)
}

/// The `k` smallest eigenpairs of the complex Laplacian, ascending.
pub fn spectral_embedding(g: &ComplexGraph, k: usize) -> Result<(Vec<f64>, CMatrix)> {
    let n = g.node_count();
    if k == 0 || k > n {
        return Err(Error::InvalidK(format!("k = {k} outside 1..={n}")));
    }
    let eig = hermitian_eig(&g.laplacian())?;
    let mut values = Vec::with_capacity(k);
    let mut vectors = Array2::<Complex64>::zeros((n, k));
    for (col, (value, src)) in eig.ascending().take(k).enumerate() {
        values.push(value);
        for row in 0..n {
            vectors[(row, col)] = eig.eigenvectors[(row, src)];
        }
    }
    Ok((values, vectors))
}

/// Number of near-zero eigenvalues in an ascending list.
pub fn estimate_k(eigenvalues: &[f64], tol: f64) -> usize {
    eigenvalues.iter().filter(|&&l| l < tol).count()
}

/// Lloyd's algorithm with k-means++ seeding and best-of-restarts selection.
/// Deterministic given the seed; restarts use derived seeds.
pub fn kmeans(points: &Array2<f64>, k: usize, seed: u64, restarts: usize) -> Result<Vec<usize>> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidK(format!("k = {k} outside 1..={n}")));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for r in 0..restarts.max(1) {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed.wrapping_add((r as u64).wrapping_mul(0x9E3779B97F4A7C15)));
        let (labels, inertia) = kmeans_once(points, k, &mut rng);
        if best.as_ref().map_or(true, |(bi, _)| inertia < *bi) {
            best = Some((inertia, labels));
        }
    }
    Ok(best.unwrap().1)
}

const KMEANS_MAX_ITER: usize = 300;
const KMEANS_REL_TOL: f64 = 1e-6;

fn sq_dist(a: ndarray::ArrayView1<f64>, b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn kmeans_once(points: &Array2<f64>, k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64) {
    let (n, dim) = points.dim();
    // k-means++ seeding
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    let first = rng.gen_range(0..n);
    centers.push(points.row(first).to_vec());
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total <= 0.0 {
            rng.gen_range(0..n)
        } else {
            let mut target = rng.gen_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        };
        centers.push(points.row(idx).to_vec());
        for i in 0..n {
            d2[i] = d2[i].min(sq_dist(points.row(i), centers.last().unwrap()));
        }
    }

    let mut labels = vec![0usize; n];
    let mut inertia = f64::INFINITY;
    for _ in 0..KMEANS_MAX_ITER {
        // assignment
        let mut new_inertia = 0.0;
        for i in 0..n {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let d = sq_dist(points.row(i), center);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            labels[i] = best;
            new_inertia += best_d;
        }
        // update
        let mut counts = vec![0usize; k];
        let mut sums = vec![vec![0.0; dim]; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            for d in 0..dim {
                sums[labels[i]][d] += points[(i, d)];
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // relocate an empty cluster to the point farthest from its center
                let far = (0..n)
                    .max_by(|&a, &b| {
                        sq_dist(points.row(a), &centers[labels[a]])
                            .partial_cmp(&sq_dist(points.row(b), &centers[labels[b]]))
                            .unwrap()
                    })
                    .unwrap();
                centers[c] = points.row(far).to_vec();
            } else {
                for d in 0..dim {
                    centers[c][d] = sums[c][d] / counts[c] as f64;
                }
            }
        }
        let improved = inertia.is_infinite()
            || (inertia - new_inertia) > KMEANS_REL_TOL * inertia.max(f64::MIN_POSITIVE);
        inertia = new_inertia;
        if !improved {
            break;
        }
    }
    (labels, inertia)
}

/// Options of [`spectral_cluster`].
#[derive(Debug, Clone)]
pub struct ClusterOptions {
    /// Find level-one communities with a classic spectral embedding of the
    /// magnitude graph instead of the `|Y|` rows of the complex embedding.
    pub level_one_on_magnitude: bool,
    pub kmeans_restarts: usize,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        ClusterOptions { level_one_on_magnitude: false, kmeans_restarts: 20 }
    }
}

/// Two-level spectral clustering: embed with the `k` smallest eigenvectors of
/// `L`, k-means the magnitude rows into `k` communities, then k-means the
/// `[Re | Im]` rows within community `h` into `l_h` subcommunities and
/// estimate each subcommunity phase.
///
/// Communities are relabeled by ascending smallest member so that the
/// per-community counts `l` apply in a deterministic order.
pub fn spectral_cluster(
    g: &ComplexGraph,
    k: usize,
    l: &[usize],
    seed: u64,
    options: &ClusterOptions,
) -> Result<TwoLevelPartition> {
    let n = g.node_count();
    if l.len() != k {
        return Err(Error::InvalidK(format!("need {k} subcommunity counts, got {}", l.len())));
    }
    if l.iter().any(|&lh| lh == 0) {
        return Err(Error::InvalidK("subcommunity counts must be positive".into()));
    }
    if l.iter().sum::<usize>() > n {
        return Err(Error::InvalidK("more subcommunities than nodes".into()));
    }
    let (_, y) = spectral_embedding(g, k)?;

    // level one
    let level_one_points = if options.level_one_on_magnitude {
        let (_, ybar) = spectral_embedding(&g.magnitude_graph(), k)?;
        let mut pts = Array2::<f64>::zeros((n, k));
        for i in 0..n {
            for c in 0..k {
                pts[(i, c)] = ybar[(i, c)].re;
            }
        }
        pts
    } else {
        let mut pts = Array2::<f64>::zeros((n, k));
        for i in 0..n {
            for c in 0..k {
                pts[(i, c)] = y[(i, c)].norm();
            }
        }
        pts
    };
    let raw_one = kmeans(&level_one_points, k, seed, options.kmeans_restarts)?;
    let level_one = relabel_by_first_member(&raw_one, k);

    // level two, per community, on the [Re | Im] embedding rows
    let mut level_two = vec![0usize; n];
    let mut theta = Vec::with_capacity(k);
    for h in 0..k {
        let members: Vec<usize> = (0..n).filter(|&i| level_one[i] == h).collect();
        if members.is_empty() {
            return Err(Error::InvalidK(format!("level-one clustering produced empty community {h}")));
        }
        let l_h = l[h].min(members.len());
        let mut pts = Array2::<f64>::zeros((members.len(), 2 * k));
        for (row, &i) in members.iter().enumerate() {
            for c in 0..k {
                pts[(row, c)] = y[(i, c)].re;
                pts[(row, k + c)] = y[(i, c)].im;
            }
        }
        let raw_two = kmeans(&pts, l_h, seed.wrapping_add(1 + h as u64), options.kmeans_restarts)?;
        let relabeled = relabel_by_first_member(&raw_two, l_h);
        for (row, &i) in members.iter().enumerate() {
            level_two[i] = relabeled[row];
        }
        theta.push(estimate_theta(g, &members, &relabeled, l_h));
    }
    Ok(TwoLevelPartition { level_one, level_two, theta })
}

/// Renames cluster labels so that clusters appear in order of their smallest
/// member index.
fn relabel_by_first_member(labels: &[usize], k: usize) -> Vec<usize> {
    let mut rank = vec![usize::MAX; k];
    let mut next = 0usize;
    for &lab in labels {
        if rank[lab] == usize::MAX {
            rank[lab] = next;
            next += 1;
        }
    }
    labels.iter().map(|&lab| rank[lab]).collect()
}

/// Phases for the subcommunities of one community: aggregate the community's
/// weights into a supernode Hermitian matrix `H_ab = Σ_{i∈a, j∈b} W_ij` and
/// propagate `θ_b = θ_a − arg(H_ab)` over a BFS spanning tree of the
/// supernode graph. Exact for balanced communities.
fn estimate_theta(g: &ComplexGraph, members: &[usize], sub_labels: &[usize], l_h: usize) -> Vec<f64> {
    let mut sub_of = std::collections::HashMap::new();
    for (row, &i) in members.iter().enumerate() {
        sub_of.insert(i, sub_labels[row]);
    }
    let mut h = vec![vec![Complex64::new(0.0, 0.0); l_h]; l_h];
    for e in g.edges() {
        if let (Some(&a), Some(&b)) = (sub_of.get(&e.source), sub_of.get(&e.target)) {
            let w = e.weight.value();
            h[a][b] += w;
            h[b][a] += w.conj();
        }
    }
    let mut theta = vec![0.0f64; l_h];
    let mut visited = vec![false; l_h];
    for root in 0..l_h {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        theta[root] = 0.0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            for b in 0..l_h {
                if !visited[b] && h[a][b].norm() > 0.0 {
                    visited[b] = true;
                    theta[b] = angle::wrap(theta[a] - h[a][b].arg());
                    queue.push_back(b);
                }
            }
        }
    }
    theta
}

/// Normalized mutual information with geometric-mean normalization and
/// natural logarithms. If either labeling is constant, the score is 1 when
/// both are (the partitions coincide) and 0 otherwise.
pub fn nmi(labels_a: &[usize], labels_b: &[usize]) -> Result<f64> {
    if labels_a.len() != labels_b.len() {
        return Err(Error::DimensionMismatch { expected: labels_a.len(), got: labels_b.len() });
    }
    if labels_a.is_empty() {
        return Err(Error::InvalidParameter("empty labelings".into()));
    }
    let n = labels_a.len() as f64;
    let mut joint: std::collections::HashMap<(usize, usize), f64> = std::collections::HashMap::new();
    let mut marg_a: std::collections::HashMap<usize, f64> = std::collections::HashMap::new();
    let mut marg_b: std::collections::HashMap<usize, f64> = std::collections::HashMap::new();
    for (&a, &b) in labels_a.iter().zip(labels_b) {
        *joint.entry((a, b)).or_default() += 1.0;
        *marg_a.entry(a).or_default() += 1.0;
        *marg_b.entry(b).or_default() += 1.0;
    }
    let h_a: f64 = -marg_a.values().map(|&c| (c / n) * (c / n).ln()).sum::<f64>();
    let h_b: f64 = -marg_b.values().map(|&c| (c / n) * (c / n).ln()).sum::<f64>();
    if h_a <= 0.0 || h_b <= 0.0 {
        return Ok(if h_a <= 0.0 && h_b <= 0.0 { 1.0 } else { 0.0 });
    }
    let mut mi = 0.0;
    for (&(a, b), &c) in &joint {
        let p = c / n;
        mi += p * (c * n / (marg_a[&a] * marg_b[&b])).ln();
    }
    Ok((mi / (h_a * h_b).sqrt()).clamp(0.0, 1.0))
}

/// Sum of the `k` smallest Laplacian eigenvalues — the Rayleigh–Ritz lower
/// bound on the general ratio cut of any partition with `k` communities.
pub fn relaxation_bound(g: &ComplexGraph, k: usize) -> Result<f64> {
    let (values, _) = spectral_embedding(g, k)?;
    Ok(values.iter().sum())
}
