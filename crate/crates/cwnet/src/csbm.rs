//! Complex stochastic block model with planted two-level structure.
//!
//! The skeleton is a plain SBM; within community `h` the nodes are divided
//! into `l_h` nearly equal subcommunities and an edge from subcommunity `a`
//! to `b` carries the template phase `(b−a)·2π/l_h`, so intra-subcommunity
//! edges carry phase 0 and each community is balanced. A mixing probability
//! `η` then rewrites each within-community phase, independently, to one of
//! the other phase values occurring in that community's initial
//! configuration. Between-community edges carry phase 0 and all magnitudes
//! are 1.
//!
//! Determinism: a single ChaCha stream drives, in order, (1) the skeleton
//! Bernoulli draws over ascending node pairs, (2) nothing for the template
//! phases, (3) one mixing draw per within-community edge in ascending edge
//! order plus one index draw per mixed edge. Failed connectivity attempts
//! keep consuming the same stream.

use crate::clustering::TwoLevelPartition;
use crate::graph::{ComplexGraph, EdgeRecord};
use crate::{angle, Error, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsbmParams {
    pub community_sizes: Vec<usize>,
    pub p_in: f64,
    pub p_out: f64,
    /// Mixing probability `η ∈ [0, 1]`.
    pub eta: f64,
    /// Subcommunity counts per community.
    pub l: Vec<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct LabeledGraph {
    pub graph: ComplexGraph,
    pub truth: TwoLevelPartition,
}

const MAX_ATTEMPTS: usize = 100;

fn validate(params: &CsbmParams) -> Result<()> {
    if params.community_sizes.is_empty() || params.community_sizes.iter().any(|&s| s == 0) {
        return Err(Error::InvalidParameter("community sizes must be positive".into()));
    }
    if params.l.len() != params.community_sizes.len() {
        return Err(Error::InvalidParameter(format!(
            "{} communities but {} subcommunity counts",
            params.community_sizes.len(),
            params.l.len()
        )));
    }
    if !(0.0..=1.0).contains(&params.p_in)
        || !(0.0..=1.0).contains(&params.p_out)
        || params.p_out > params.p_in
    {
        return Err(Error::InvalidParameter(
            "need 0 <= p_out <= p_in <= 1".into(),
        ));
    }
    if !(0.0..=1.0).contains(&params.eta) {
        return Err(Error::InvalidParameter("eta must lie in [0, 1]".into()));
    }
    for (h, (&size, &l_h)) in params.community_sizes.iter().zip(&params.l).enumerate() {
        if l_h == 0 || l_h > size {
            return Err(Error::InvalidParameter(format!(
                "community {h}: l = {l_h} outside 1..={size}"
            )));
        }
    }
    Ok(())
}

/// Node → (community, subcommunity) for the planted structure: communities
/// are contiguous index ranges, each divided evenly with remainders going to
/// the lowest subcommunity indices.
fn planted_labels(params: &CsbmParams) -> (Vec<usize>, Vec<usize>) {
    let n: usize = params.community_sizes.iter().sum();
    let mut level_one = vec![0usize; n];
    let mut level_two = vec![0usize; n];
    let mut start = 0usize;
    for (h, (&size, &l_h)) in params.community_sizes.iter().zip(&params.l).enumerate() {
        let base = size / l_h;
        let extra = size % l_h;
        let mut node = start;
        for a in 0..l_h {
            let count = base + usize::from(a < extra);
            for _ in 0..count {
                level_one[node] = h;
                level_two[node] = a;
                node += 1;
            }
        }
        start += size;
    }
    (level_one, level_two)
}

/// Planted subcommunity phases: `θ_a = (−a·2π/l_h) mod 2π`, so that an edge
/// from `a` to `b` expects phase `θ_a − θ_b = (b−a)·2π/l_h`.
fn planted_theta(l: &[usize]) -> Vec<Vec<f64>> {
    l.iter()
        .map(|&l_h| {
            (0..l_h)
                .map(|a| ((l_h - a) % l_h) as f64 * (angle::TWO_PI / l_h as f64))
                .collect()
        })
        .collect()
}

/// Generates one labeled benchmark graph. With `p_out = 0` and more than one
/// community the graph necessarily splits into one component per community;
/// in that case each community must come out connected, otherwise the whole
/// skeleton must.
pub fn generate(params: &CsbmParams) -> Result<LabeledGraph> {
    validate(params)?;
    let n: usize = params.community_sizes.iter().sum();
    let k = params.community_sizes.len();
    let (level_one, level_two) = planted_labels(params);
    let theta = planted_theta(&params.l);
    let disconnected_by_design = params.p_out == 0.0 && k > 1;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    for _ in 0..MAX_ATTEMPTS {
        // (1) skeleton
        let mut records: Vec<EdgeRecord> = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let p = if level_one[i] == level_one[j] { params.p_in } else { params.p_out };
                if rng.gen_bool(p) {
                    // (2) template phase
                    let phase = if level_one[i] == level_one[j] {
                        let l_h = params.l[level_one[i]];
                        let diff = (level_two[j] + l_h - level_two[i]) % l_h;
                        angle::wrap(diff as f64 * (angle::TWO_PI / l_h as f64))
                    } else {
                        0.0
                    };
                    records.push((i, j, 1.0, phase));
                }
            }
        }
        // (3) mixing: per within-community edge, in edge order
        if params.eta > 0.0 {
            let mut occurring: Vec<Vec<f64>> = vec![Vec::new(); k];
            for &(i, j, _, phase) in &records {
                if level_one[i] == level_one[j] {
                    let set = &mut occurring[level_one[i]];
                    if !set.iter().any(|&p| angle::eq(p, phase, angle::PHASE_TOL)) {
                        set.push(phase);
                    }
                }
            }
            for set in &mut occurring {
                set.sort_by(|a, b| a.partial_cmp(b).unwrap());
            }
            for rec in &mut records {
                if level_one[rec.0] != level_one[rec.1] {
                    continue;
                }
                if !rng.gen_bool(params.eta) {
                    continue;
                }
                let set = &occurring[level_one[rec.0]];
                let candidates: Vec<f64> = set
                    .iter()
                    .copied()
                    .filter(|&p| !angle::eq(p, rec.3, angle::PHASE_TOL))
                    .collect();
                if !candidates.is_empty() {
                    rec.3 = candidates[rng.gen_range(0..candidates.len())];
                }
            }
        }

        let graph = if disconnected_by_design {
            ComplexGraph::with_components(n, &records)
        } else {
            ComplexGraph::new(n, &records)
        };
        let Ok(graph) = graph else { continue };
        if disconnected_by_design || params.p_out > 0.0 {
            // each community must be internally connected for the planted
            // structure to be recoverable
            let mut ok = true;
            let mut start = 0usize;
            for &size in &params.community_sizes {
                let nodes: Vec<usize> = (start..start + size).collect();
                match graph.induced_subgraph(&nodes) {
                    Ok(sub) if sub.is_connected() => {}
                    _ => {
                        ok = false;
                        break;
                    }
                }
                start += size;
            }
            if !ok {
                continue;
            }
        }
        return Ok(LabeledGraph {
            graph,
            truth: TwoLevelPartition {
                level_one: level_one.clone(),
                level_two: level_two.clone(),
                theta: theta.clone(),
            },
        });
    }
    Err(Error::GenerationFailed(format!(
        "no connected sample after {MAX_ATTEMPTS} attempts"
    )))
}

/// Counts the distinct phases (bucketed at 1e−9 rad) among the canonical
/// within-community edges, sorted by phase.
pub fn phase_histogram(g: &ComplexGraph, community: &[usize]) -> Result<Vec<(f64, usize)>> {
    if community.is_empty() {
        return Err(Error::InvalidSubset("empty community".into()));
    }
    let mut member = vec![false; g.node_count()];
    for &i in community {
        if i >= g.node_count() {
            return Err(Error::InvalidSubset(format!("node {i} out of range")));
        }
        member[i] = true;
    }
    let mut buckets: Vec<(f64, usize)> = Vec::new();
    for e in g.edges() {
        if !(member[e.source] && member[e.target]) {
            continue;
        }
        let phase = e.weight.phase;
        match buckets.iter_mut().find(|(p, _)| angle::eq(*p, phase, angle::PHASE_TOL)) {
            Some(entry) => entry.1 += 1,
            None => buckets.push((phase, 1)),
        }
    }
    buckets.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(buckets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::{self, BalanceClass, PartitionMode};
    use std::f64::consts::PI;

    fn params(sizes: &[usize], l: &[usize], p_in: f64, p_out: f64, eta: f64, seed: u64) -> CsbmParams {
        CsbmParams {
            community_sizes: sizes.to_vec(),
            p_in,
            p_out,
            eta,
            l: l.to_vec(),
            seed,
        }
    }

    #[test]
    fn signed_template_is_balanced() {
        let lg = generate(&params(&[24], &[2], 0.5, 0.0, 0.0, 1)).unwrap();
        let report = balance::classify(&lg.graph).unwrap();
        assert!(report.balanced);
        let hist = phase_histogram(&lg.graph, &(0..24).collect::<Vec<_>>()).unwrap();
        let phases: Vec<f64> = hist.iter().map(|&(p, _)| p).collect();
        assert_eq!(phases.len(), 2);
        assert!(angle::eq(phases[0], 0.0, 1e-9) && angle::eq(phases[1], PI, 1e-9));
    }

    #[test]
    fn three_way_template_partition_recovery() {
        let lg = generate(&params(&[30], &[3], 0.6, 0.0, 0.0, 2)).unwrap();
        assert_eq!(balance::classify(&lg.graph).unwrap().class, BalanceClass::Balanced);
        let part = balance::extract_partition(&lg.graph, PartitionMode::Balanced).unwrap();
        assert_eq!(part.subset_count(), 3);
        // subsets coincide with the planted subcommunities
        for i in 0..30 {
            for j in 0..30 {
                assert_eq!(
                    part.subset_of[i] == part.subset_of[j],
                    lg.truth.level_two[i] == lg.truth.level_two[j]
                );
            }
        }
        let hist = phase_histogram(&lg.graph, &(0..30).collect::<Vec<_>>()).unwrap();
        let phases: Vec<f64> = hist.iter().map(|&(p, _)| p).collect();
        let third = angle::TWO_PI / 3.0;
        assert_eq!(phases.len(), 3);
        assert!(angle::eq(phases[0], 0.0, 1e-9));
        assert!(angle::eq(phases[1], third, 1e-9));
        assert!(angle::eq(phases[2], 2.0 * third, 1e-9));
    }

    #[test]
    fn same_seed_is_bit_exact() {
        let p = params(&[20, 20], &[2, 3], 0.5, 0.05, 0.2, 99);
        let a = generate(&p).unwrap();
        let b = generate(&p).unwrap();
        assert_eq!(a.graph.edges().len(), b.graph.edges().len());
        for (x, y) in a.graph.edges().iter().zip(b.graph.edges()) {
            assert_eq!(x.source, y.source);
            assert_eq!(x.target, y.target);
            assert_eq!(x.weight.phase.to_bits(), y.weight.phase.to_bits());
        }
        let c = generate(&params(&[20, 20], &[2, 3], 0.5, 0.05, 0.2, 100)).unwrap();
        assert_ne!(
            a.graph.edges().len() == c.graph.edges().len()
                && a.graph
                    .edges()
                    .iter()
                    .zip(c.graph.edges())
                    .all(|(x, y)| x.source == y.source
                        && x.target == y.target
                        && x.weight.phase == y.weight.phase),
            true,
            "different seeds should differ"
        );
    }

    #[test]
    fn truth_theta_matches_template() {
        let lg = generate(&params(&[12, 12], &[2, 3], 0.7, 0.1, 0.0, 5)).unwrap();
        for (h, &l_h) in [2usize, 3].iter().enumerate() {
            for a in 0..l_h {
                for b in 0..l_h {
                    let expected = angle::wrap((b as f64 - a as f64) * angle::TWO_PI / l_h as f64);
                    let got = angle::wrap(lg.truth.theta[h][a] - lg.truth.theta[h][b]);
                    assert!(angle::eq(got, expected, 1e-9), "h={h} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn mixing_keeps_support() {
        let base = generate(&params(&[24], &[3], 0.6, 0.0, 0.0, 7)).unwrap();
        let mixed = generate(&params(&[24], &[3], 0.6, 0.0, 1.0, 7)).unwrap();
        let nodes: Vec<usize> = (0..24).collect();
        let support = |lg: &LabeledGraph| -> Vec<f64> {
            phase_histogram(&lg.graph, &nodes).unwrap().iter().map(|&(p, _)| p).collect()
        };
        let base_support = support(&base);
        for p in support(&mixed) {
            assert!(base_support.iter().any(|&q| angle::eq(p, q, 1e-9)));
        }
        // full mixing on η=1 changes phases but classify still runs
        assert!(balance::classify(&mixed.graph).is_ok());
    }

    #[test]
    fn disconnected_by_design_components_are_balanced() {
        let lg = generate(&params(&[16, 16], &[2, 2], 0.6, 0.0, 0.0, 13)).unwrap();
        assert!(!lg.graph.is_connected());
        for h in 0..2 {
            let nodes: Vec<usize> = (0..32).filter(|&i| lg.truth.level_one[i] == h).collect();
            let sub = lg.graph.induced_subgraph(&nodes).unwrap();
            let report = balance::classify(&sub).unwrap();
            assert!(report.balanced, "component {h}");
            let part = balance::extract_partition(&sub, PartitionMode::Balanced).unwrap();
            for (a_idx, &a) in nodes.iter().enumerate() {
                for (b_idx, &b) in nodes.iter().enumerate() {
                    assert_eq!(
                        part.subset_of[a_idx] == part.subset_of[b_idx],
                        lg.truth.level_two[a] == lg.truth.level_two[b]
                    );
                }
            }
        }
    }

    #[test]
    fn expected_within_edge_count() {
        // mean over 100 seeds within 3 standard errors of p_in·C(s,2)
        let s = 20usize;
        let pairs = (s * (s - 1) / 2) as f64;
        let p_in = 0.45;
        let mut counts = Vec::new();
        for seed in 0..100 {
            let lg = generate(&params(&[s], &[2], p_in, 0.0, 0.0, seed)).unwrap();
            counts.push(lg.graph.edges().len() as f64);
        }
        let mean: f64 = counts.iter().sum::<f64>() / counts.len() as f64;
        let expected = p_in * pairs;
        let std_per_graph = (pairs * p_in * (1.0 - p_in)).sqrt();
        let tol = 3.0 * std_per_graph / (counts.len() as f64).sqrt();
        assert!(
            (mean - expected).abs() <= tol,
            "mean {mean} vs expected {expected} ± {tol}"
        );
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(generate(&params(&[10], &[11], 0.5, 0.0, 0.0, 1)).is_err());
        assert!(generate(&params(&[10], &[2], 0.2, 0.5, 0.0, 1)).is_err());
        assert!(generate(&params(&[10], &[2], 0.5, 0.0, 1.5, 1)).is_err());
        // impossible connectivity: two communities, p_out tiny but nonzero,
        // p_in too small to connect them reliably is still retried; a zero
        // p_in with l=1 can never connect a community of size > 1
        assert!(matches!(
            generate(&params(&[5, 5], &[1, 1], 0.0, 0.0, 0.0, 1)),
            Err(Error::GenerationFailed(_))
        ));
    }
}
