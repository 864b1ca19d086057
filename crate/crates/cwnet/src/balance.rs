//! Structural balance of complex-weighted graphs.
//!
//! A graph is balanced when every cycle's phase sum is 0 (mod 2π), and
//! antibalanced when that holds after adding π to every edge phase. Both at
//! once forces a bipartite skeleton; everything else is strictly unbalanced.
//! The combinatorial classifier assigns node potentials over a BFS spanning
//! tree and checks the non-tree edges; the spectral classifier reads the same
//! answer off the extreme eigenvalues of `P_h = D^{−1/2} W D^{−1/2}`, and a
//! brute-force cycle enumeration serves as the desk-scale oracle.

use crate::angle;
use crate::graph::{simple_cycles, ComplexGraph};
use crate::linalg::{hermitian_eig, CMatrix};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest graph accepted by [`brute_force_classify`].
pub const BRUTE_FORCE_LIMIT: usize = 12;
/// Spectral slack for the eigenvalue-based classification.
pub const SPECTRAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BalanceClass {
    Balanced,
    Antibalanced,
    BalancedAndAntibalanced,
    StrictlyUnbalanced,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BalanceReport {
    pub balanced: bool,
    pub antibalanced: bool,
    pub class: BalanceClass,
    /// `1 − λ₁(P_h)`; zero exactly for balanced graphs.
    pub dissimilarity_to_balance: f64,
    /// `1 + λ_n(P_h)`; zero exactly for antibalanced graphs.
    pub dissimilarity_to_antibalance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionMode {
    Balanced,
    Antibalanced,
}

/// The structural-theorem partition: node subsets of equal path potential,
/// with the potential of a path from the subset of node 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BalancePartition {
    /// Node → subset index (0-based; subset 0 contains node 0).
    pub subset_of: Vec<usize>,
    /// Subset index → shared potential `θ` in `[0, 2π)`, with
    /// `subset_phase[0] == 0`.
    pub subset_phase: Vec<f64>,
}

impl BalancePartition {
    pub fn subset_count(&self) -> usize {
        self.subset_phase.len()
    }

    /// The potential `θ_{1σ(i)}` of node `i`.
    pub fn node_phase(&self, i: usize) -> f64 {
        self.subset_phase[self.subset_of[i]]
    }
}

fn class_of(balanced: bool, antibalanced: bool) -> BalanceClass {
    match (balanced, antibalanced) {
        (true, true) => BalanceClass::BalancedAndAntibalanced,
        (true, false) => BalanceClass::Balanced,
        (false, true) => BalanceClass::Antibalanced,
        (false, false) => BalanceClass::StrictlyUnbalanced,
    }
}

/// BFS node potentials with every edge phase shifted by `shift`:
/// `ψ_root = 0`, `ψ_j = (ψ_i + φ_ij + shift) mod 2π` along tree edges.
fn potentials(g: &ComplexGraph, shift: f64) -> Vec<f64> {
    let n = g.node_count();
    let mut psi = vec![f64::NAN; n];
    for root in 0..n {
        if !psi[root].is_nan() {
            continue;
        }
        psi[root] = 0.0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in g.neighbors(v) {
                if psi[w].is_nan() {
                    let phi = g.directed_weight(v, w).unwrap().phase;
                    psi[w] = angle::wrap(psi[v] + phi + shift);
                    queue.push_back(w);
                }
            }
        }
    }
    psi
}

/// Whether every edge satisfies `(φ_ij + shift) ≡ ψ_j − ψ_i (mod 2π)`.
fn potentials_consistent(g: &ComplexGraph, shift: f64, psi: &[f64], tol: f64) -> bool {
    g.edges().iter().all(|e| {
        let lhs = angle::wrap(e.weight.phase + shift);
        let rhs = angle::wrap(psi[e.target] - psi[e.source]);
        angle::eq(lhs, rhs, tol)
    })
}

fn dissimilarities(g: &ComplexGraph) -> Result<(f64, f64)> {
    let eig = hermitian_eig(&g.hermitian_transition())?;
    let lambda_1 = eig.eigenvalues[0];
    let lambda_n = *eig.eigenvalues.last().unwrap();
    Ok(((1.0 - lambda_1).max(0.0), (1.0 + lambda_n).max(0.0)))
}

/// Classifies via BFS potentials and the non-tree edge check.
pub fn classify(g: &ComplexGraph) -> Result<BalanceReport> {
    classify_with_tol(g, angle::PHASE_TOL)
}

pub fn classify_with_tol(g: &ComplexGraph, tol: f64) -> Result<BalanceReport> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let psi_b = potentials(g, 0.0);
    let balanced = potentials_consistent(g, 0.0, &psi_b, tol);
    let psi_a = potentials(g, PI);
    let antibalanced = potentials_consistent(g, PI, &psi_a, tol);
    let (d_b, d_a) = dissimilarities(g)?;
    Ok(BalanceReport {
        balanced,
        antibalanced,
        class: class_of(balanced, antibalanced),
        dissimilarity_to_balance: d_b,
        dissimilarity_to_antibalance: d_a,
    })
}

/// Classifies from the spectrum of `P_h`: balanced ⇔ `λ₁ = 1`,
/// antibalanced ⇔ `λ_n = −1`, strictly unbalanced ⇔ `ρ(P_h) < 1`.
pub fn classify_spectral(g: &ComplexGraph) -> Result<BalanceReport> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let eig = hermitian_eig(&g.hermitian_transition())?;
    let lambda_1 = eig.eigenvalues[0];
    let lambda_n = *eig.eigenvalues.last().unwrap();
    let balanced = lambda_1 >= 1.0 - SPECTRAL_TOL;
    let antibalanced = lambda_n <= -1.0 + SPECTRAL_TOL;
    Ok(BalanceReport {
        balanced,
        antibalanced,
        class: class_of(balanced, antibalanced),
        dissimilarity_to_balance: (1.0 - lambda_1).max(0.0),
        dissimilarity_to_antibalance: (1.0 + lambda_n).max(0.0),
    })
}

/// Literal application of the cycle definition: enumerates every simple cycle
/// of the skeleton (one orientation each; the reversed orientation then has
/// phase `2π − θ` automatically) and checks phase sums.
pub fn brute_force_classify(g: &ComplexGraph) -> Result<BalanceReport> {
    brute_force_classify_with_tol(g, angle::PHASE_TOL)
}

pub fn brute_force_classify_with_tol(g: &ComplexGraph, tol: f64) -> Result<BalanceReport> {
    let n = g.node_count();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(n, BRUTE_FORCE_LIMIT));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut adjacency = vec![Vec::new(); n];
    for e in g.edges() {
        adjacency[e.source].push(e.target);
        adjacency[e.target].push(e.source);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    let mut balanced = true;
    let mut antibalanced = true;
    for cycle in simple_cycles(&adjacency) {
        let len = cycle.len();
        let mut sum = 0.0;
        for idx in 0..len {
            let a = cycle[idx];
            let b = cycle[(idx + 1) % len];
            sum += g.directed_weight(a, b).unwrap().phase;
        }
        if !angle::eq(angle::wrap(sum), 0.0, tol) {
            balanced = false;
        }
        if !angle::eq(angle::wrap(sum + len as f64 * PI), 0.0, tol) {
            antibalanced = false;
        }
        if !balanced && !antibalanced {
            break;
        }
    }
    let (d_b, d_a) = dissimilarities(g)?;
    Ok(BalanceReport {
        balanced,
        antibalanced,
        class: class_of(balanced, antibalanced),
        dissimilarity_to_balance: d_b,
        dissimilarity_to_antibalance: d_a,
    })
}

/// Extracts the structural-theorem partition for the requested mode. Subsets
/// are the level sets of the BFS potential (after the π shift in antibalanced
/// mode); subset 0 is node 0's with phase exactly 0, the rest are ordered by
/// ascending phase.
pub fn extract_partition(g: &ComplexGraph, mode: PartitionMode) -> Result<BalancePartition> {
    extract_partition_with_tol(g, mode, angle::PHASE_TOL)
}

pub fn extract_partition_with_tol(
    g: &ComplexGraph,
    mode: PartitionMode,
    tol: f64,
) -> Result<BalancePartition> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let shift = match mode {
        PartitionMode::Balanced => 0.0,
        PartitionMode::Antibalanced => PI,
    };
    let psi = potentials(g, shift);
    if !potentials_consistent(g, shift, &psi, tol) {
        return Err(Error::NotInClass(format!("{mode:?}")));
    }
    group_by_phase(&psi, tol)
}

/// Groups nodes into level sets of a circular potential. Node 0's group gets
/// index 0 and phase exactly 0 (its potential is 0 by construction).
fn group_by_phase(psi: &[f64], tol: f64) -> Result<BalancePartition> {
    let n = psi.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| psi[a].partial_cmp(&psi[b]).unwrap().then(a.cmp(&b)));
    // split sorted potentials where the circular gap exceeds the tolerance
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &node in &order {
        match groups.last() {
            Some(last) if angle::dist(psi[node], psi[*last.last().unwrap()]) <= tol => {
                groups.last_mut().unwrap().push(node);
            }
            _ => groups.push(vec![node]),
        }
    }
    // the first and last groups may wrap around 2π
    if groups.len() > 1 {
        let first = &groups[0];
        let last = groups.last().unwrap();
        if angle::dist(psi[first[0]], psi[*last.last().unwrap()]) <= tol {
            let merged = groups.pop().unwrap();
            groups[0].extend(merged);
        }
    }
    // representative phase: the lowest-index member's potential
    let mut reps: Vec<(usize, f64, Vec<usize>)> = groups
        .into_iter()
        .map(|mut members| {
            members.sort_unstable();
            let rep = members[0];
            (rep, psi[rep], members)
        })
        .collect();
    // node 0's subset comes first with phase 0; the rest ascend by phase
    reps.sort_by(|a, b| {
        let a_root = a.2.contains(&0);
        let b_root = b.2.contains(&0);
        b_root.cmp(&a_root).then(a.1.partial_cmp(&b.1).unwrap())
    });
    let mut subset_of = vec![0usize; n];
    let mut subset_phase = Vec::with_capacity(reps.len());
    for (idx, (_, phase, members)) in reps.iter().enumerate() {
        let phase = if idx == 0 { 0.0 } else { *phase };
        subset_phase.push(phase);
        for &m in members {
            subset_of[m] = idx;
        }
    }
    Ok(BalancePartition { subset_of, subset_phase })
}

/// Switching transformation `W′ = Q* W Q` with `Q = diag(e^{iψ})`: each edge
/// phase becomes `(φ_ij − ψ_i + ψ_j) mod 2π`. Magnitudes, cycle phases, and
/// the balance class are unchanged.
pub fn gauge_transform(g: &ComplexGraph, psi: &[f64]) -> Result<ComplexGraph> {
    if psi.len() != g.node_count() {
        return Err(Error::DimensionMismatch { expected: g.node_count(), got: psi.len() });
    }
    let records: Vec<(usize, usize, f64, f64)> = g
        .edges()
        .iter()
        .map(|e| {
            (
                e.source,
                e.target,
                e.weight.magnitude,
                angle::wrap(e.weight.phase - psi[e.source] + psi[e.target]),
            )
        })
        .collect();
    ComplexGraph::with_components(g.node_count(), &records)
}

/// Diagonal of `I₁*`: entry `i` is `exp(−θ_{1σ(i)} i)`.
pub fn gauge_vector(partition: &BalancePartition) -> Vec<Complex64> {
    partition
        .subset_of
        .iter()
        .map(|&s| Complex64::from_polar(1.0, -partition.subset_phase[s]))
        .collect()
}

/// `W̄` of the magnitude graph, for spectral comparisons.
pub fn magnitude_weight_matrix(g: &ComplexGraph) -> CMatrix {
    g.magnitude_graph().weight_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn triangle(phases: [f64; 3]) -> ComplexGraph {
        // edges oriented 0→1, 1→2, 2→0
        ComplexGraph::new(3, &[
            (0, 1, 1.0, phases[0]),
            (1, 2, 1.0, phases[1]),
            (2, 0, 1.0, phases[2]),
        ])
        .unwrap()
    }

    #[test]
    fn classic_triangle_is_balanced_only() {
        let r = classify(&triangle([0.0, 0.0, 0.0])).unwrap();
        assert_eq!(r.class, BalanceClass::Balanced);
        assert!(r.balanced && !r.antibalanced);
        assert!(r.dissimilarity_to_balance <= 1e-8);
        assert!(r.dissimilarity_to_antibalance > 0.0);
    }

    #[test]
    fn rotated_triangle_is_balanced() {
        let third = 2.0 * PI / 3.0;
        let r = classify(&triangle([third, third, third])).unwrap();
        assert_eq!(r.class, BalanceClass::Balanced);
    }

    #[test]
    fn all_pi_triangle_is_antibalanced() {
        let r = classify(&triangle([PI, PI, PI])).unwrap();
        assert_eq!(r.class, BalanceClass::Antibalanced);
        assert!(r.dissimilarity_to_antibalance <= 1e-8);
        assert!(r.dissimilarity_to_balance > 0.0);
    }

    #[test]
    fn quarter_turn_triangle_is_strictly_unbalanced() {
        let r = classify(&triangle([PI / 2.0, 0.0, 0.0])).unwrap();
        assert_eq!(r.class, BalanceClass::StrictlyUnbalanced);
        assert!(r.dissimilarity_to_balance > 0.0);
        assert!(r.dissimilarity_to_antibalance > 0.0);
    }

    #[test]
    fn trees_are_vacuously_both() {
        let tree = ComplexGraph::new(4, &[
            (0, 1, 1.0, 1.0),
            (1, 2, 1.0, 2.0),
            (1, 3, 1.0, 3.0),
        ])
        .unwrap();
        for report in [
            classify(&tree).unwrap(),
            classify_spectral(&tree).unwrap(),
            brute_force_classify(&tree).unwrap(),
        ] {
            assert_eq!(report.class, BalanceClass::BalancedAndAntibalanced);
        }
        assert!(tree.is_bipartite());
    }

    #[test]
    fn both_classes_implies_bipartite() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let grid = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
        for _ in 0..200 {
            let n = rng.gen_range(3..7);
            let mut records = Vec::new();
            for i in 1..n {
                let j = rng.gen_range(0..i);
                records.push((j, i, 1.0, *grid.choose(&mut rng).unwrap()));
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    if records.iter().any(|&(a, b, _, _)| (a, b) == (i, j)) {
                        continue;
                    }
                    if rng.gen_bool(0.3) {
                        records.push((i, j, 1.0, *grid.choose(&mut rng).unwrap()));
                    }
                }
            }
            let g = ComplexGraph::new(n, &records).unwrap();
            let r = classify(&g).unwrap();
            if r.balanced && r.antibalanced {
                assert!(g.is_bipartite());
            }
        }
    }

    #[test]
    fn signed_balanced_graph_partitions_into_two() {
        // two camps joined by phase-π edges
        let g = ComplexGraph::new(4, &[
            (0, 1, 1.0, 0.0),
            (2, 3, 1.0, 0.0),
            (0, 2, 1.0, PI),
            (1, 3, 1.0, PI),
            (0, 3, 1.0, PI),
        ])
        .unwrap();
        let p = extract_partition(&g, PartitionMode::Balanced).unwrap();
        assert_eq!(p.subset_count(), 2);
        assert_eq!(p.subset_phase[0], 0.0);
        assert_abs_diff_eq!(p.subset_phase[1], PI, epsilon = 1e-12);
        assert_eq!(p.subset_of, vec![0, 0, 1, 1]);
    }

    #[test]
    fn three_supernode_template_partition() {
        let third = 2.0 * PI / 3.0;
        // supernodes {0,1}, {2,3}, {4,5}; template edges carry phase 2π/3
        let g = ComplexGraph::new(6, &[
            (0, 1, 1.0, 0.0),
            (2, 3, 1.0, 0.0),
            (4, 5, 1.0, 0.0),
            (0, 2, 1.0, third),
            (1, 3, 1.0, third),
            (2, 4, 1.0, third),
            (4, 0, 1.0, third),
        ])
        .unwrap();
        assert_eq!(classify(&g).unwrap().class, BalanceClass::Balanced);
        let p = extract_partition(&g, PartitionMode::Balanced).unwrap();
        assert_eq!(p.subset_count(), 3);
        assert_eq!(p.subset_of, vec![0, 0, 1, 1, 2, 2]);
        assert_abs_diff_eq!(p.subset_phase[1], third, epsilon = 1e-9);
        assert_abs_diff_eq!(p.subset_phase[2], 2.0 * third, epsilon = 1e-9);
    }

    #[test]
    fn classic_graph_partitions_trivially() {
        let g = triangle([0.0, 0.0, 0.0]);
        let p = extract_partition(&g, PartitionMode::Balanced).unwrap();
        assert_eq!(p.subset_count(), 1);
        assert_eq!(p.subset_phase, vec![0.0]);
    }

    #[test]
    fn partition_refuses_wrong_mode() {
        let g = triangle([PI / 2.0, 0.0, 0.0]);
        assert!(matches!(
            extract_partition(&g, PartitionMode::Balanced),
            Err(Error::NotInClass(_))
        ));
    }

    fn random_connected_classic(n: usize, p: f64, rng: &mut ChaCha8Rng) -> ComplexGraph {
        loop {
            let mut records = Vec::new();
            for i in 1..n {
                let j = rng.gen_range(0..i);
                records.push((j, i, rng.gen_range(0.1..2.0), 0.0));
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    if records.iter().any(|&(a, b, _, _)| (a, b) == (i, j)) {
                        continue;
                    }
                    if rng.gen_bool(p) {
                        records.push((i, j, rng.gen_range(0.1..2.0), 0.0));
                    }
                }
            }
            if let Ok(g) = ComplexGraph::new(n, &records) {
                return g;
            }
        }
    }

    #[test]
    fn gauge_transform_preserves_class_and_recovers_levels() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let g = random_connected_classic(8, 0.4, &mut rng);
        // identity gauge
        let same = gauge_transform(&g, &vec![0.0; 8]).unwrap();
        assert_eq!(g.weight_matrix(), same.weight_matrix());

        let psi: Vec<f64> = (0..8).map(|_| rng.gen_range(0.0..angle::TWO_PI)).collect();
        let t = gauge_transform(&g, &psi).unwrap();
        let r = classify(&t).unwrap();
        assert!(r.balanced);
        let p = extract_partition(&t, PartitionMode::Balanced).unwrap();
        // recovered potentials equal ψ's level sets up to the global shift ψ_0
        for i in 0..8 {
            for j in 0..8 {
                let same_level = angle::eq(psi[i], psi[j], 1e-9);
                assert_eq!(p.subset_of[i] == p.subset_of[j], same_level);
            }
        }
        // spectra agree (unitary similarity)
        let a = hermitian_eig(&g.weight_matrix()).unwrap();
        let b = hermitian_eig(&t.weight_matrix()).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-9);
        }
    }

    #[test]
    fn classifiers_agree_on_grid_phase_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let grid = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
        for _ in 0..100 {
            let n = rng.gen_range(3..=8);
            let mut records = Vec::new();
            for i in 1..n {
                let j = rng.gen_range(0..i);
                records.push((j, i, 1.0, *grid.choose(&mut rng).unwrap()));
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    if records.iter().any(|&(a, b, _, _)| (a, b) == (i, j)) {
                        continue;
                    }
                    if rng.gen_bool(0.35) {
                        records.push((i, j, 1.0, *grid.choose(&mut rng).unwrap()));
                    }
                }
            }
            let g = ComplexGraph::new(n, &records).unwrap();
            let a = classify(&g).unwrap();
            let b = classify_spectral(&g).unwrap();
            let c = brute_force_classify(&g).unwrap();
            assert_eq!(a.class, b.class, "tree vs spectral on n={n}");
            assert_eq!(a.class, c.class, "tree vs brute on n={n}");
        }
    }

    #[test]
    fn leading_eigenvector_carries_partition_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..10 {
            let g0 = random_connected_classic(10, 0.5, &mut rng);
            if g0.is_bipartite() {
                continue;
            }
            let psi: Vec<f64> = (0..10).map(|_| rng.gen_range(0.0..angle::TWO_PI)).collect();
            let g = gauge_transform(&g0, &psi).unwrap();
            let part = extract_partition(&g, PartitionMode::Balanced).unwrap();
            let eig = hermitian_eig(&g.weight_matrix()).unwrap();
            let u1 = eig.eigenvectors.column(0);
            // remove the solver's phase normalization: align component 0 to
            // phase 2π − θ_{1,σ(0)} = 0
            let align = u1[0] / u1[0].norm();
            for i in 0..10 {
                let z = u1[i] * align.conj();
                let expected = angle::wrap(angle::TWO_PI - part.node_phase(i));
                assert!(
                    angle::eq(angle::wrap(z.arg()), expected, 1e-6),
                    "component {i}: got {}, expected {}",
                    angle::wrap(z.arg()),
                    expected
                );
            }
        }
    }
}
