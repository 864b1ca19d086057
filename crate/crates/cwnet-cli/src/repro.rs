//! Desk-scale experiment grids behind `cwnet repro`.
//!
//! Each grid writes deterministic CSVs into the output directory (same seed,
//! byte-identical files) plus optional SVG renderings. Cell seeds derive from
//! the base seed as `base + cell_index·100000 + sample`.

use crate::output::{polyline_svg, Run};
use clap::ValueEnum;
use cwnet::clustering::{self, ClusterOptions};
use cwnet::csbm::{self, CsbmParams};
use cwnet::magnetic;
use rayon::prelude::*;
use std::path::Path;

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig4,
    Fig5,
    Fig8,
    Fig10,
    Fig12,
}

pub const SAMPLES: usize = 20;
const COMMUNITY_SIZE: usize = 60;

pub fn run(figure: Figure, outdir: &Path, seed: u64, svg: bool, run: &mut Run) -> anyhow::Result<()> {
    std::fs::create_dir_all(outdir)?;
    match figure {
        Figure::Fig4 => fig4(outdir, seed, svg, run),
        Figure::Fig5 => fig5(outdir, seed, svg, run),
        Figure::Fig8 => {
            let graphs: Vec<(String, cwnet::DirectedGraph)> = [3usize, 4, 5, 6, 10, 12, 15, 16]
                .iter()
                .map(|&n| (format!("c{n}"), magnetic::gen_directed_cycle(n).unwrap()))
                .collect();
            sweep_family(outdir, "fig8", &graphs, svg, run)
        }
        Figure::Fig10 => {
            let graphs: Vec<(String, cwnet::DirectedGraph)> = [[3usize, 3], [4, 4], [6, 6], [3, 6]]
                .iter()
                .map(|ls| {
                    (format!("tree_{}x{}", ls[0], ls[1]), magnetic::gen_tree_of_cycles(ls).unwrap())
                })
                .collect();
            sweep_family(outdir, "fig10", &graphs, svg, run)
        }
        Figure::Fig12 => {
            let graphs: Vec<(String, cwnet::DirectedGraph)> = [(2usize, 0usize), (3, 0), (4, 0)]
                .iter()
                .map(|&(from, to)| {
                    (format!("nested_{from}to{to}"), magnetic::gen_nested_cycles(6, from, to).unwrap())
                })
                .collect();
            sweep_family(outdir, "fig12", &graphs, svg, run)
        }
    }
}

/// Mean and std of the NMI between planted and recovered product labels over
/// [`SAMPLES`] generated graphs.
pub fn nmi_cell(params: &CsbmParams, cell_seed: u64, magnitude_level_one: bool) -> (f64, f64) {
    let k = params.community_sizes.len();
    let options =
        ClusterOptions { level_one_on_magnitude: magnitude_level_one, ..ClusterOptions::default() };
    let scores: Vec<f64> = (0..SAMPLES)
        .map(|sample| {
            let mut p = params.clone();
            p.seed = cell_seed.wrapping_add(sample as u64);
            let labeled = csbm::generate(&p).expect("csbm generation");
            let predicted =
                clustering::spectral_cluster(&labeled.graph, k, &p.l, p.seed, &options)
                    .expect("spectral clustering");
            clustering::nmi(&labeled.truth.product_labels(), &predicted.product_labels())
                .expect("nmi")
        })
        .collect();
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    let var =
        scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / scores.len() as f64;
    (mean, var.sqrt())
}

fn fig4(outdir: &Path, seed: u64, svg: bool, run: &mut Run) -> anyhow::Result<()> {
    let l1_values = [2usize, 3];
    let p_in_values = [0.4, 0.5, 0.6, 0.7, 0.8];
    let eta_values = [0.0, 0.1, 0.2, 0.3];
    let mut cells = Vec::new();
    for &l1 in &l1_values {
        for &p_in in &p_in_values {
            for &eta in &eta_values {
                cells.push((l1, p_in, eta));
            }
        }
    }
    let results: Vec<(f64, f64)> = cells
        .par_iter()
        .enumerate()
        .map(|(idx, &(l1, p_in, eta))| {
            let params = CsbmParams {
                community_sizes: vec![COMMUNITY_SIZE],
                p_in,
                p_out: 0.0,
                eta,
                l: vec![l1],
                seed: 0,
            };
            nmi_cell(&params, seed.wrapping_add(idx as u64 * 100_000), true)
        })
        .collect();
    let mut csv = String::from("l1,p_in,eta,nmi_mean,nmi_std\n");
    for (&(l1, p_in, eta), &(mean, std)) in cells.iter().zip(&results) {
        csv.push_str(&format!("{l1},{p_in},{eta},{mean},{std}\n"));
    }
    let path = outdir.join("fig4.csv");
    run.emit(Some(&path), &csv)?;
    if svg {
        for &l1 in &l1_values {
            let series: Vec<(String, Vec<(f64, f64)>)> = p_in_values
                .iter()
                .map(|&p_in| {
                    let pts: Vec<(f64, f64)> = cells
                        .iter()
                        .zip(&results)
                        .filter(|((c_l1, c_pin, _), _)| *c_l1 == l1 && *c_pin == p_in)
                        .map(|((_, _, eta), (mean, _))| (*eta, *mean))
                        .collect();
                    (format!("p_in={p_in}"), pts)
                })
                .collect();
            let chart = polyline_svg(&format!("mean NMI, l1 = {l1}"), &series);
            std::fs::write(outdir.join(format!("fig4_l{l1}.svg")), chart)?;
        }
    }
    Ok(())
}

fn fig5(outdir: &Path, seed: u64, svg: bool, run: &mut Run) -> anyhow::Result<()> {
    let combos = [(2usize, 2usize), (2, 3), (3, 3)];
    let p_in_values = [0.4, 0.6, 0.8];
    let p_out_values = [0.005, 0.01, 0.02, 0.05];
    let eta_values = [0.0, 0.1, 0.2, 0.3];
    let mut cells = Vec::new();
    for &(l1, l2) in &combos {
        for &eta in &eta_values {
            for &p_in in &p_in_values {
                for &p_out in &p_out_values {
                    cells.push((l1, l2, p_in, p_out, eta));
                }
            }
        }
    }
    let results: Vec<(f64, f64)> = cells
        .par_iter()
        .enumerate()
        .map(|(idx, &(l1, l2, p_in, p_out, eta))| {
            let params = CsbmParams {
                community_sizes: vec![COMMUNITY_SIZE, COMMUNITY_SIZE],
                p_in,
                p_out,
                eta,
                l: vec![l1, l2],
                seed: 0,
            };
            nmi_cell(&params, seed.wrapping_add(idx as u64 * 100_000), true)
        })
        .collect();
    let mut csv = String::from("l1,l2,p_in,p_out,eta,nmi_mean,nmi_std\n");
    for (&(l1, l2, p_in, p_out, eta), &(mean, std)) in cells.iter().zip(&results) {
        csv.push_str(&format!("{l1},{l2},{p_in},{p_out},{eta},{mean},{std}\n"));
    }
    let path = outdir.join("fig5.csv");
    run.emit(Some(&path), &csv)?;
    if svg {
        for &(l1, l2) in &combos {
            for &eta in &eta_values {
                let series: Vec<(String, Vec<(f64, f64)>)> = p_in_values
                    .iter()
                    .map(|&p_in| {
                        let pts: Vec<(f64, f64)> = cells
                            .iter()
                            .zip(&results)
                            .filter(|((a, b, c, _, e), _)| {
                                (*a, *b) == (l1, l2) && *c == p_in && *e == eta
                            })
                            .map(|((_, _, _, p_out, _), (mean, _))| (*p_out, *mean))
                            .collect();
                        (format!("p_in={p_in}"), pts)
                    })
                    .collect();
                let chart =
                    polyline_svg(&format!("mean NMI, l=({l1},{l2}), eta={eta}"), &series);
                std::fs::write(outdir.join(format!("fig5_l{l1}{l2}_eta{eta}.svg")), chart)?;
            }
        }
    }
    Ok(())
}

fn sweep_family(
    outdir: &Path,
    prefix: &str,
    graphs: &[(String, cwnet::DirectedGraph)],
    svg: bool,
    run: &mut Run,
) -> anyhow::Result<()> {
    let sweeps: Vec<_> = graphs
        .par_iter()
        .map(|(_, h)| magnetic::sweep(h, 100).expect("sweep"))
        .collect();
    for ((name, _), result) in graphs.iter().zip(&sweeps) {
        let mut csv = String::from("r,lambda_min,lambda_max,predicted_zero,predicted_two\n");
        for (idx, &r) in result.r_values.iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                r,
                result.lambda_min[idx],
                result.lambda_max[idx],
                result.predicted_zero_r.contains(&r),
                result.predicted_two_r.contains(&r)
            ));
        }
        let path = outdir.join(format!("{prefix}_{name}.csv"));
        run.emit(Some(&path), &csv)?;
        if svg {
            let min_pts: Vec<(f64, f64)> = result
                .r_values
                .iter()
                .zip(&result.lambda_min)
                .map(|(&r, &l)| (r as f64, l))
                .collect();
            let max_pts: Vec<(f64, f64)> = result
                .r_values
                .iter()
                .zip(&result.lambda_max)
                .map(|(&r, &l)| (r as f64, l))
                .collect();
            let chart = polyline_svg(
                &format!("{name}: extreme eigenvalues over r"),
                &[("lambda_min".to_string(), min_pts), ("lambda_max".to_string(), max_pts)],
            );
            std::fs::write(outdir.join(format!("{prefix}_{name}.svg")), chart)?;
        }
    }
    Ok(())
}
