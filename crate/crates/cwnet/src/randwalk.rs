//! Discrete-time random walks with complex phases.
//!
//! States are stored as column vectors `x(t)` evolving by the adjoint
//! operator, `x(t+1) = P* x(t)`, which is the column form of the row
//! evolution `x(t+1)* = x(t)* P` with `P = D⁻¹W`. All closed forms below are
//! stated in that column convention; they are the conjugates of the row-form
//! expressions. Balanced graphs converge to a fixed point, antibalanced ones
//! alternate between an odd-time and an even-time limit, and strictly
//! unbalanced ones decay to zero.

use crate::balance::{self, BalancePartition, PartitionMode};
use crate::graph::ComplexGraph;
use crate::linalg::{evolve_left_step, hermitian_eig, CMatrix, CVector};
use crate::{angle, Error, Result};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A complex density vector over nodes at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    pub densities: CVector,
    pub time: usize,
}

impl WalkerState {
    /// Builds an initial state, enforcing `Σ_i |x_i(0)| = 1`.
    pub fn new(densities: CVector) -> Result<Self> {
        let mass: f64 = densities.iter().map(|z| z.norm()).sum();
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "initial state must have unit total magnitude, got {mass}"
            )));
        }
        Ok(WalkerState { densities, time: 0 })
    }

    /// Uniform real initial state `x_i(0) = 1/n`.
    pub fn uniform(n: usize) -> Self {
        WalkerState {
            densities: Array1::from_elem(n, Complex64::new(1.0 / n as f64, 0.0)),
            time: 0,
        }
    }

    /// All mass on one node.
    pub fn delta(n: usize, node: usize) -> Self {
        let mut densities = Array1::from_elem(n, Complex64::new(0.0, 0.0));
        densities[node] = Complex64::new(1.0, 0.0);
        WalkerState { densities, time: 0 }
    }
}

/// One step of the complex walk.
pub fn walk_step(g: &ComplexGraph, state: &WalkerState) -> Result<WalkerState> {
    let p = g.transition_matrix();
    let densities = evolve_left_step(&p, &state.densities)?;
    Ok(WalkerState { densities, time: state.time + 1 })
}

fn inner(a: &[Complex64], b: &CVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

fn steady_state_common(
    g: &ComplexGraph,
    x0: &CVector,
    mode: PartitionMode,
) -> Result<(BalancePartition, Complex64, Vec<f64>, f64)> {
    if x0.len() != g.node_count() {
        return Err(Error::DimensionMismatch { expected: g.node_count(), got: x0.len() });
    }
    if g.is_bipartite() {
        return Err(Error::Bipartite);
    }
    let partition = balance::extract_partition(g, mode)?;
    let ones = balance::gauge_vector(&partition);
    // coefficient ⟨1̃₁, x(0)⟩ (the conjugate of the row form x(0)* 1̃₁)
    let coeff = inner(&ones, x0);
    let d = g.degree_vector();
    Ok((partition, coeff, d.entries, d.total))
}

/// Closed-form limit of the walk on a balanced non-bipartite graph:
/// `x_j(∞) = exp(−θ_{1σ(j)} i) · ⟨1̃₁, x(0)⟩ · d_j / (2m)`.
pub fn steady_state_balanced(g: &ComplexGraph, x0: &CVector) -> Result<CVector> {
    let report = balance::classify(g)?;
    if !report.balanced {
        return Err(Error::NotInClass("Balanced".into()));
    }
    let (partition, coeff, degrees, total) =
        steady_state_common(g, x0, PartitionMode::Balanced)?;
    Ok(Array1::from_iter((0..g.node_count()).map(|j| {
        Complex64::from_polar(1.0, -partition.node_phase(j)) * coeff * (degrees[j] / total)
    })))
}

/// Closed-form odd- and even-time limits on an antibalanced non-bipartite
/// graph; the odd limit is the negated even limit.
pub fn steady_state_antibalanced(g: &ComplexGraph, x0: &CVector) -> Result<(CVector, CVector)> {
    let report = balance::classify(g)?;
    if !report.antibalanced {
        return Err(Error::NotInClass("Antibalanced".into()));
    }
    let (partition, coeff, degrees, total) =
        steady_state_common(g, x0, PartitionMode::Antibalanced)?;
    let even: CVector = Array1::from_iter((0..g.node_count()).map(|j| {
        Complex64::from_polar(1.0, -partition.node_phase(j)) * coeff * (degrees[j] / total)
    }));
    let odd = even.mapv(|z| -z);
    Ok((odd, even))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SteadyStateKind {
    Fixed,
    OddEvenAlternating,
    Zero,
    NotConverged,
}

#[derive(Debug, Clone, Serialize)]
pub struct SteadyStateReport {
    pub kind: SteadyStateKind,
    /// One vector for `Fixed`/`Zero`, two (odd then even) for
    /// `OddEvenAlternating`, the last iterate when not converged.
    #[serde(serialize_with = "serialize_states")]
    pub fixed_points: Vec<CVector>,
    pub converged_at: Option<usize>,
    /// Max-norm gap between the detected limit and the closed form, when the
    /// graph is balanced or antibalanced (non-bipartite) and the form applies.
    pub closed_form_max_err: Option<f64>,
}

fn serialize_states<S: serde::Serializer>(
    states: &[CVector],
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = ser.serialize_seq(Some(states.len()))?;
    for s in states {
        let pairs: Vec<(f64, f64)> = s.iter().map(|z| (z.re, z.im)).collect();
        seq.serialize_element(&pairs)?;
    }
    seq.end()
}

fn max_norm_diff(a: &CVector, b: &CVector) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_norm(a: &CVector) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Iterates the walk and classifies the limit with a window-2 comparison
/// (the antibalanced limit only exists along odd/even subsequences). The
/// detected limit is cross-checked against the closed forms when those apply.
pub fn simulate_to_limit(
    g: &ComplexGraph,
    x0: &CVector,
    tol: f64,
    max_t: usize,
) -> Result<SteadyStateReport> {
    if tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    if x0.len() != g.node_count() {
        return Err(Error::DimensionMismatch { expected: g.node_count(), got: x0.len() });
    }
    let p = g.transition_matrix();
    let mut prev2: Option<CVector> = None;
    let mut prev: Option<CVector> = None;
    let mut x = x0.clone();
    let mut t = 0usize;
    loop {
        if max_norm(&x) < tol {
            let err = Some(max_norm(&x));
            return Ok(SteadyStateReport {
                kind: SteadyStateKind::Zero,
                fixed_points: vec![x],
                converged_at: Some(t),
                closed_form_max_err: err,
            });
        }
        // A slowly decaying state can pass the difference tests long before
        // its norm reaches tol, so a nonzero limit is only declared once it
        // is resolvable above the tolerance.
        let resolvable = max_norm(&x) >= 10.0 * tol;
        if let (true, Some(ref p1)) = (resolvable, &prev) {
            if max_norm_diff(&x, p1) < tol {
                let closed_form_max_err = closed_form_err_fixed(g, x0, &x)?;
                return Ok(SteadyStateReport {
                    kind: SteadyStateKind::Fixed,
                    fixed_points: vec![x],
                    converged_at: Some(t),
                    closed_form_max_err,
                });
            }
        }
        if let (true, Some(ref p2), Some(_)) = (resolvable, &prev2, &prev) {
            if max_norm_diff(&x, p2) < tol {
                // period-2 limit: order the pair as (odd, even)
                let (odd, even) = if t % 2 == 1 {
                    (x.clone(), prev.clone().unwrap())
                } else {
                    (prev.clone().unwrap(), x.clone())
                };
                let closed_form_max_err = closed_form_err_alternating(g, x0, &odd, &even)?;
                return Ok(SteadyStateReport {
                    kind: SteadyStateKind::OddEvenAlternating,
                    fixed_points: vec![odd, even],
                    converged_at: Some(t),
                    closed_form_max_err,
                });
            }
        }
        if t >= max_t {
            return Ok(SteadyStateReport {
                kind: SteadyStateKind::NotConverged,
                fixed_points: vec![x],
                converged_at: None,
                closed_form_max_err: None,
            });
        }
        let next = evolve_left_step(&p, &x)?;
        prev2 = prev.take();
        prev = Some(std::mem::replace(&mut x, next));
        t += 1;
    }
}

fn closed_form_err_fixed(g: &ComplexGraph, x0: &CVector, limit: &CVector) -> Result<Option<f64>> {
    let report = balance::classify(g)?;
    if report.balanced && !g.is_bipartite() {
        let closed = steady_state_balanced(g, x0)?;
        Ok(Some(max_norm_diff(limit, &closed)))
    } else {
        Ok(None)
    }
}

fn closed_form_err_alternating(
    g: &ComplexGraph,
    x0: &CVector,
    odd: &CVector,
    even: &CVector,
) -> Result<Option<f64>> {
    let report = balance::classify(g)?;
    if report.antibalanced && !g.is_bipartite() {
        let (codd, ceven) = steady_state_antibalanced(g, x0)?;
        Ok(Some(max_norm_diff(odd, &codd).max(max_norm_diff(even, &ceven))))
    } else {
        Ok(None)
    }
}

/// Mixing-time guess `10·⌈ln(1/tol)/(1 − |λ₂|)⌉` from the spectral gap of
/// `P_h`, capped at 10⁶.
pub fn default_max_t(g: &ComplexGraph, tol: f64) -> Result<usize> {
    const CAP: usize = 1_000_000;
    let eig = hermitian_eig(&g.hermitian_transition())?;
    let mut mags: Vec<f64> = eig.eigenvalues.iter().map(|l| l.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let lambda2 = if mags.len() > 1 { mags[1] } else { 0.0 };
    let gap = 1.0 - lambda2;
    if gap <= 0.0 {
        return Ok(CAP);
    }
    let t = 10.0 * ((1.0 / tol).ln() / gap).ceil();
    Ok((t as usize).min(CAP).max(1))
}

/// Phase-class index of every edge on the `2π/k` grid, canonical direction.
fn phase_classes(g: &ComplexGraph, k: usize) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let step = angle::TWO_PI / k as f64;
    g.edges()
        .iter()
        .map(|e| {
            let z = (e.weight.phase / step).round() as i64;
            let z = z.rem_euclid(k as i64) as usize;
            if !angle::eq(e.weight.phase, z as f64 * step, angle::PHASE_TOL) {
                return Err(Error::PhaseGridViolation { phase: e.weight.phase, k });
            }
            Ok(z)
        })
        .collect()
}

/// The `nk×nk` lifted adjacency: block `(a, b)` holds `A^{((b−a) mod k)·φ₀}`
/// with magnitudes as entries; row sums of the lifted matrix equal the
/// original degrees. Flattened index `(a, i) = a·n + i`.
pub fn lifted_adjacency(g: &ComplexGraph, k: usize) -> Result<Array2<f64>> {
    let classes = phase_classes(g, k)?;
    let n = g.node_count();
    let mut m = Array2::<f64>::zeros((n * k, n * k));
    for (e, &z) in g.edges().iter().zip(&classes) {
        let zr = (k - z) % k; // class of the reversed direction
        for a in 0..k {
            let b_fwd = (a + z) % k;
            m[(a * n + e.source, b_fwd * n + e.target)] = e.weight.magnitude;
            let b_rev = (a + zr) % k;
            m[(a * n + e.target, b_rev * n + e.source)] = e.weight.magnitude;
        }
    }
    Ok(m)
}

/// `P^{(k)} = D^{(k)−1} A^{(k)}`, the transition matrix of the lifted walk.
pub fn lifted_transition(g: &ComplexGraph, k: usize) -> Result<Array2<f64>> {
    let mut m = lifted_adjacency(g, k)?;
    let d = g.degree_vector();
    let n = g.node_count();
    for a in 0..k {
        for i in 0..n {
            let inv = 1.0 / d.entries[i];
            for col in 0..n * k {
                m[(a * n + i, col)] *= inv;
            }
        }
    }
    Ok(m)
}

/// Walker densities split by node and carried phase class: entry `(i, z)` is
/// the density on node `i` of walkers with phase `z·2π/k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseClassState {
    pub densities: Array2<f64>,
    pub time: usize,
}

impl PhaseClassState {
    pub fn new(densities: Array2<f64>) -> Self {
        PhaseClassState { densities, time: 0 }
    }

    /// Flattens to the lifted index convention `(z, i) → z·n + i`.
    pub fn flatten(&self) -> Array1<f64> {
        let (n, k) = self.densities.dim();
        let mut out = Array1::zeros(n * k);
        for z in 0..k {
            for i in 0..n {
                out[z * n + i] = self.densities[(i, z)];
            }
        }
        out
    }

    pub fn from_flat(flat: &Array1<f64>, n: usize, k: usize) -> Self {
        let mut densities = Array2::zeros((n, k));
        for z in 0..k {
            for i in 0..n {
                densities[(i, z)] = flat[z * n + i];
            }
        }
        PhaseClassState { densities, time: 0 }
    }

    pub fn total_mass(&self) -> f64 {
        self.densities.iter().sum()
    }

    /// Phase marginal `Σ_z x_i^z` per node (evolves as the classic walk).
    pub fn node_marginal(&self) -> Array1<f64> {
        let (n, k) = self.densities.dim();
        Array1::from_iter((0..n).map(|i| (0..k).map(|z| self.densities[(i, z)]).sum()))
    }

    /// Phase average `Σ_z e^{i·z·2π/k} x_i^z` per node (evolves by `P` in the
    /// row convention).
    pub fn phase_average(&self) -> CVector {
        let (n, k) = self.densities.dim();
        let step = angle::TWO_PI / k as f64;
        Array1::from_iter((0..n).map(|i| {
            (0..k)
                .map(|z| Complex64::from_polar(self.densities[(i, z)], z as f64 * step))
                .sum()
        }))
    }
}

/// One step of the phase-resolved dynamics:
/// `x_j^θ(t+1) = Σ_i (1/d_i) Σ_z A_ij^{zφ₀} x_i^{θ−zφ₀}(t)`.
pub fn phase_class_step(g: &ComplexGraph, k: usize, s: &PhaseClassState) -> Result<PhaseClassState> {
    let n = g.node_count();
    if s.densities.dim() != (n, k) {
        return Err(Error::DimensionMismatch { expected: n * k, got: s.densities.len() });
    }
    let classes = phase_classes(g, k)?;
    let d = g.degree_vector();
    let mut next = Array2::<f64>::zeros((n, k));
    for (e, &z) in g.edges().iter().zip(&classes) {
        let zr = (k - z) % k;
        for theta in 0..k {
            // walkers arriving at target through the forward direction
            let from = (theta + k - z) % k;
            next[(e.target, theta)] +=
                e.weight.magnitude / d.entries[e.source] * s.densities[(e.source, from)];
            // and at source through the reversed direction
            let from_rev = (theta + k - zr) % k;
            next[(e.source, theta)] +=
                e.weight.magnitude / d.entries[e.target] * s.densities[(e.target, from_rev)];
        }
    }
    Ok(PhaseClassState { densities: next, time: s.time + 1 })
}

/// Verifies the phase pattern of matrix powers:
/// `(P^t)_ij = (±1)^t · exp(θ_{σ(i)σ(j)} i) · (P̄^t)_ij` with the plus sign on
/// balanced graphs and `(−1)^t` on antibalanced ones.
pub fn phase_pattern_check(g: &ComplexGraph, t: usize) -> Result<bool> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    let report = balance::classify(g)?;
    let (mode, sign) = if report.balanced {
        (PartitionMode::Balanced, 1.0)
    } else if report.antibalanced {
        (PartitionMode::Antibalanced, if t % 2 == 0 { 1.0 } else { -1.0 })
    } else {
        return Err(Error::NotInClass("Balanced or Antibalanced".into()));
    };
    let partition = balance::extract_partition(g, mode)?;
    let p_t = matrix_power(&g.transition_matrix(), t);
    let pbar_t = matrix_power(&g.magnitude_graph().transition_matrix(), t);
    let n = g.node_count();
    for i in 0..n {
        for j in 0..n {
            let theta = angle::wrap(partition.node_phase(j) - partition.node_phase(i));
            let expected = Complex64::from_polar(1.0, theta) * sign * pbar_t[(i, j)];
            if (p_t[(i, j)] - expected).norm() > 1e-8 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn matrix_power(m: &CMatrix, t: usize) -> CMatrix {
    let mut out = Array2::eye(m.nrows());
    for _ in 0..t {
        out = out.dot(m);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::gauge_transform;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn triangle(phases: [f64; 3]) -> ComplexGraph {
        ComplexGraph::new(3, &[
            (0, 1, 1.0, phases[0]),
            (1, 2, 1.0, phases[1]),
            (2, 0, 1.0, phases[2]),
        ])
        .unwrap()
    }

    #[test]
    fn single_step_examples() {
        let g = triangle([0.0, 0.0, 0.0]);
        let s = walk_step(&g, &WalkerState::delta(3, 0)).unwrap();
        assert_eq!(s.time, 1);
        assert_abs_diff_eq!(s.densities[1].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.densities[2].re, 0.5, epsilon = 1e-15);

        let two = ComplexGraph::new(2, &[(0, 1, 1.0, PI)]).unwrap();
        let s = walk_step(&two, &WalkerState::delta(2, 0)).unwrap();
        assert_abs_diff_eq!(s.densities[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.densities[1].re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.densities[1].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn balanced_walk_magnitudes_follow_classic_walk() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g0 = ComplexGraph::new(5, &[
            (0, 1, 1.0, 0.0),
            (1, 2, 2.0, 0.0),
            (2, 3, 1.0, 0.0),
            (3, 4, 0.5, 0.0),
            (4, 0, 1.0, 0.0),
            (0, 2, 1.0, 0.0),
        ])
        .unwrap();
        let psi: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..angle::TWO_PI)).collect();
        let g = gauge_transform(&g0, &psi).unwrap();
        let part = balance::extract_partition(&g, PartitionMode::Balanced).unwrap();
        // initial phases aligned with 1̃₁ (column convention: e^{-iθ})
        let x0: CVector = Array1::from_iter(
            (0..5).map(|i| Complex64::from_polar(0.2, -part.node_phase(i))),
        );
        let mut state = WalkerState::new(x0).unwrap();
        let mut classic = WalkerState::uniform(5);
        let bar = g.magnitude_graph();
        for _ in 0..10 {
            state = walk_step(&g, &state).unwrap();
            classic = walk_step(&bar, &classic).unwrap();
            for i in 0..5 {
                assert_abs_diff_eq!(
                    state.densities[i].norm(),
                    classic.densities[i].re,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn classic_steady_state_is_degree_proportional() {
        let g = triangle([0.0, 0.0, 0.0]);
        let x0 = WalkerState::uniform(3).densities;
        let x = steady_state_balanced(&g, &x0).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(x[i].re, 2.0 / 6.0, epsilon = 1e-12);
            assert_abs_diff_eq!(x[i].im, 0.0, epsilon = 1e-12);
        }
        // walk_step leaves the fixed point unchanged
        let step = walk_step(&g, &WalkerState { densities: x.clone(), time: 0 }).unwrap();
        assert!(max_norm_diff(&step.densities, &x) < 1e-10);
    }

    #[test]
    fn orthogonal_initial_state_vanishes() {
        let g = triangle([0.0, 0.0, 0.0]);
        // ⟨1̃₁, x0⟩ = 0 for the classic graph means Σ x_i = 0
        let x0 = crate::graph::complex_vector(&[
            Complex64::new(0.5, 0.0),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        let x = steady_state_balanced(&g, &x0).unwrap();
        assert!(max_norm(&x) < 1e-15);
        let (odd, even) = steady_state_antibalanced(&triangle([PI, PI, PI]), &x0).unwrap();
        assert!(max_norm(&odd) < 1e-15 && max_norm(&even) < 1e-15);
    }

    #[test]
    fn antibalanced_limits_are_negatives() {
        let g = triangle([PI, PI, PI]);
        let x0 = WalkerState::uniform(3).densities;
        let (odd, even) = steady_state_antibalanced(&g, &x0).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!((odd[i] + even[i]).norm(), 0.0, epsilon = 1e-15);
        }
        // long even-time evolution approaches the even limit
        let p = g.transition_matrix();
        let x = crate::linalg::evolve_left(&p, &x0, 5000).unwrap();
        assert!(max_norm_diff(&x, &even) < 1e-8);
        for i in 0..3 {
            assert_abs_diff_eq!(even[i].norm(), 2.0 / 6.0 * inner_mag(&g, &x0), epsilon = 1e-10);
        }
    }

    fn inner_mag(g: &ComplexGraph, x0: &CVector) -> f64 {
        let part = balance::extract_partition(g, PartitionMode::Antibalanced).unwrap();
        let ones = balance::gauge_vector(&part);
        inner(&ones, x0).norm()
    }

    #[test]
    fn bipartite_closed_forms_refuse() {
        let c4 = ComplexGraph::new(4, &[
            (0, 1, 1.0, 0.0),
            (1, 2, 1.0, 0.0),
            (2, 3, 1.0, 0.0),
            (3, 0, 1.0, 0.0),
        ])
        .unwrap();
        let x0 = WalkerState::uniform(4).densities;
        assert!(matches!(steady_state_balanced(&c4, &x0), Err(Error::Bipartite)));
    }

    #[test]
    fn simulate_detects_all_three_kinds() {
        let x0 = WalkerState::uniform(3).densities;

        let balanced = triangle([0.0, 0.0, 0.0]);
        let r = simulate_to_limit(&balanced, &x0, 1e-10, 10_000).unwrap();
        assert_eq!(r.kind, SteadyStateKind::Fixed);
        assert!(r.closed_form_max_err.unwrap() < 1e-8);

        let anti = triangle([PI, PI, PI]);
        let r = simulate_to_limit(&anti, &x0, 1e-10, 10_000).unwrap();
        assert_eq!(r.kind, SteadyStateKind::OddEvenAlternating);
        assert!(r.closed_form_max_err.unwrap() < 1e-8);
        assert_eq!(r.fixed_points.len(), 2);

        let unb = triangle([PI / 2.0, 0.0, 0.0]);
        let r = simulate_to_limit(&unb, &x0, 1e-8, 100_000).unwrap();
        assert_eq!(r.kind, SteadyStateKind::Zero);

        let r = simulate_to_limit(&unb, &x0, 1e-8, 3).unwrap();
        assert_eq!(r.kind, SteadyStateKind::NotConverged);
        assert_eq!(r.converged_at, None);
    }

    #[test]
    fn default_max_t_is_finite_and_capped() {
        let g = triangle([0.0, 0.0, 0.0]);
        let t = default_max_t(&g, 1e-8).unwrap();
        assert!(t >= 10 && t < 1_000_000);
        // bipartite graph has |λ2| = 1, hits the cap
        let c4 = ComplexGraph::new(4, &[
            (0, 1, 1.0, 0.0),
            (1, 2, 1.0, 0.0),
            (2, 3, 1.0, 0.0),
            (3, 0, 1.0, 0.0),
        ])
        .unwrap();
        assert_eq!(default_max_t(&c4, 1e-8).unwrap(), 1_000_000);
    }

    #[test]
    fn lifting_with_k1_recovers_adjacency() {
        let g = triangle([0.0, 0.0, 0.0]);
        let a = lifted_adjacency(&g, 1).unwrap();
        let w = g.weight_matrix();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a[(i, j)], w[(i, j)].re);
            }
        }
    }

    #[test]
    fn signed_lifting_k2_block_structure() {
        // one positive edge (0,1), one negative edge (1,2)
        let g = ComplexGraph::new(3, &[(0, 1, 1.0, 0.0), (1, 2, 1.0, PI)]).unwrap();
        let a = lifted_adjacency(&g, 2).unwrap();
        let n = 3;
        // positive edge stays in diagonal blocks
        assert_eq!(a[(0, 1)], 1.0);
        assert_eq!(a[(n, n + 1)], 1.0);
        // negative edge couples the two phase classes
        assert_eq!(a[(1, n + 2)], 1.0);
        assert_eq!(a[(n + 1, 2)], 1.0);
        assert_eq!(a[(1, 2)], 0.0);
        // row sums equal degrees
        let d = g.degree_vector();
        for a_blk in 0..2 {
            for i in 0..n {
                let row_sum: f64 = (0..2 * n).map(|c| a[(a_blk * n + i, c)]).sum();
                assert_eq!(row_sum, d.entries[i]);
            }
        }
    }

    #[test]
    fn phase_grid_violation_detected() {
        let g = triangle([PI / 2.0, 0.0, 0.0]);
        assert!(matches!(
            lifted_adjacency(&g, 3),
            Err(Error::PhaseGridViolation { .. })
        ));
        assert!(lifted_adjacency(&g, 4).is_ok());
    }

    #[test]
    fn phase_class_step_matches_lifted_evolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for k in [2usize, 3, 4] {
            let step = angle::TWO_PI / k as f64;
            let g = ComplexGraph::new(4, &[
                (0, 1, 1.0, 0.0),
                (1, 2, 2.0, step),
                (2, 3, 1.0, angle::wrap(2.0 * step)),
                (3, 0, 0.5, step),
                (0, 2, 1.0, 0.0),
            ])
            .unwrap();
            let mut dens = Array2::<f64>::zeros((4, k));
            for i in 0..4 {
                for z in 0..k {
                    dens[(i, z)] = rng.gen_range(0.0..1.0);
                }
            }
            let total: f64 = dens.iter().sum();
            dens.mapv_inplace(|v| v / total);
            let s0 = PhaseClassState::new(dens);
            let s1 = phase_class_step(&g, k, &s0).unwrap();
            // mass conserved
            assert_abs_diff_eq!(s1.total_mass(), 1.0, epsilon = 1e-12);
            // flattened step equals row evolution by the lifted transition
            let p = lifted_transition(&g, k).unwrap();
            let y0 = s0.flatten();
            let y1_expected = p.t().dot(&y0);
            let y1 = s1.flatten();
            for idx in 0..4 * k {
                assert_abs_diff_eq!(y1[idx], y1_expected[idx], epsilon = 1e-12);
            }
            // node marginal evolves by the classic walk
            let classic = walk_step(
                &g.magnitude_graph(),
                &WalkerState { densities: s0.node_marginal().mapv(|v| Complex64::new(v, 0.0)), time: 0 },
            )
            .unwrap();
            let marg = s1.node_marginal();
            for i in 0..4 {
                assert_abs_diff_eq!(marg[i], classic.densities[i].re, epsilon = 1e-12);
            }
            // phase average evolves by P in the row convention, i.e. the
            // conjugate of the column step
            let avg0 = s0.phase_average();
            let avg1 = s1.phase_average();
            let stepped = evolve_left_step(&g.transition_matrix(), &avg0.mapv(|z| z.conj()))
                .unwrap()
                .mapv(|z| z.conj());
            for i in 0..4 {
                assert!((avg1[i] - stepped[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn phase_pattern_holds_on_gauge_transformed_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let g0 = ComplexGraph::new(5, &[
            (0, 1, 1.0, 0.0),
            (1, 2, 1.0, 0.0),
            (2, 0, 1.0, 0.0),
            (2, 3, 2.0, 0.0),
            (3, 4, 1.0, 0.0),
            (4, 2, 1.0, 0.0),
        ])
        .unwrap();
        // classic graphs trivially satisfy the pattern
        for t in 1..=3 {
            assert!(phase_pattern_check(&g0, t).unwrap());
        }
        let psi: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..angle::TWO_PI)).collect();
        let g = gauge_transform(&g0, &psi).unwrap();
        for t in 1..=3 {
            assert!(phase_pattern_check(&g, t).unwrap());
        }
        // antibalanced graph: the (−1)^t factor must flip between t=2 and t=3
        let anti = gauge_transform(
            &ComplexGraph::new(3, &[(0, 1, 1.0, PI), (1, 2, 1.0, PI), (2, 0, 1.0, PI)]).unwrap(),
            &[0.3, 1.2, 4.0],
        )
        .unwrap();
        for t in 1..=4 {
            assert!(phase_pattern_check(&anti, t).unwrap(), "t = {t}");
        }
        let unb = triangle([PI / 2.0, 0.0, 0.0]);
        assert!(matches!(phase_pattern_check(&unb, 2), Err(Error::NotInClass(_))));
    }

    #[test]
    fn magnitude_domination_by_classic_walk() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..20 {
            let n = rng.gen_range(4..9);
            let mut records = Vec::new();
            for i in 1..n {
                let j = rng.gen_range(0..i);
                records.push((j, i, rng.gen_range(0.2..2.0), rng.gen_range(0.0..angle::TWO_PI)));
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    if records.iter().any(|&(a, b, _, _)| (a, b) == (i, j)) {
                        continue;
                    }
                    if rng.gen_bool(0.3) {
                        records.push((i, j, rng.gen_range(0.2..2.0), rng.gen_range(0.0..angle::TWO_PI)));
                    }
                }
            }
            let g = ComplexGraph::new(n, &records).unwrap();
            let bar = g.magnitude_graph();
            let mut x = WalkerState::uniform(n);
            let mut xbar = WalkerState::uniform(n);
            for _ in 0..15 {
                x = walk_step(&g, &x).unwrap();
                xbar = walk_step(&bar, &xbar).unwrap();
                for i in 0..n {
                    assert!(x.densities[i].norm() <= xbar.densities[i].re + 1e-12);
                }
            }
        }
    }
}
