//! `cwnet` — command-line analysis of complex-weighted networks: balance
//! classification, complex random walks, two-level spectral clustering, CSBM
//! benchmarks, and magnetic-Laplacian sweeps of directed graphs.

mod output;
mod repro;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use cwnet::balance::{self, PartitionMode};
use cwnet::clustering::{self, ClusterOptions, TwoLevelPartition};
use cwnet::csbm;
use cwnet::graph::complex_vector;
use cwnet::io;
use cwnet::magnetic::{self, RoleVector};
use cwnet::randwalk;
use num_complex::Complex64;
use output::Run;
use serde_json::json;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "cwnet", version, about = "Complex-weighted network analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for randomized operations
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Numeric tolerance override
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads for experiment grids (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format where both apply
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result to a file (with a sibling run manifest) instead of stdout
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a graph as balanced / antibalanced / strictly unbalanced
    Classify {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Tree)]
        method: Method,
    },
    /// Extract the structural-theorem partition
    Partition {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Evolve the complex random walk and report its limit
    Walk {
        file: PathBuf,
        /// Initial state: 'uniform' or a file of `i re im` lines
        #[arg(long, default_value = "uniform")]
        x0: String,
        /// Maximum steps (default: spectral-gap estimate)
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Two-level spectral clustering
    Cluster {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        /// Comma-separated subcommunity counts, one per community
        #[arg(long, value_delimiter = ',')]
        l: Vec<usize>,
        /// Cluster level one on the magnitude graph (the paper's experiments)
        #[arg(long)]
        levelone_magnitude: bool,
    },
    /// Evaluate the cuts of a stored partition
    Cut {
        file: PathBuf,
        /// Partition JSON (as produced by `cluster`)
        #[arg(long)]
        partition: PathBuf,
    },
    /// Normalized mutual information of two labelings (one label per line)
    Nmi { labels_a: PathBuf, labels_b: PathBuf },
    /// Generate a CSBM benchmark graph with planted two-level structure
    Csbm {
        /// Comma-separated community sizes
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long)]
        pin: f64,
        #[arg(long, default_value_t = 0.0)]
        pout: f64,
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
        /// Comma-separated subcommunity counts
        #[arg(long, value_delimiter = ',')]
        l: Vec<usize>,
        /// Where to write the ground truth JSON
        #[arg(short = 't', long)]
        truth: Option<PathBuf>,
    },
    /// Magnetic-Laplacian analysis of directed graphs
    #[command(subcommand)]
    Magnetic(MagneticCommand),
    /// Generate the directed test graphs
    #[command(subcommand)]
    Gen(GenCommand),
    /// Eigenvalues of a graph matrix
    Spectrum {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MatrixKind::W)]
        matrix: MatrixKind,
    },
    /// Re-run a figure-scale experiment grid
    Repro {
        #[arg(value_enum)]
        figure: repro::Figure,
        #[arg(long, default_value = "repro-out")]
        outdir: PathBuf,
        /// Also render an SVG per curve
        #[arg(long)]
        svg: bool,
    },
}

#[derive(Subcommand)]
enum MagneticCommand {
    /// Extreme eigenvalues over the integer grid θ = 2π/r
    Sweep {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        rmax: usize,
    },
    /// Role extraction from an extreme eigenvector
    Roles {
        file: PathBuf,
        /// Phase, accepted as `2pi/K` or decimal radians
        #[arg(long)]
        theta: String,
        /// Number of roles (default: gap heuristic)
        #[arg(long)]
        roles: Option<usize>,
        /// Use the largest-eigenvalue eigenvector instead of the smallest
        #[arg(long)]
        largest: bool,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Directed cycle of length n
    Dcycle {
        #[arg(long)]
        n: usize,
    },
    /// Directed cycles chained at shared nodes
    Treecycles {
        #[arg(long, value_delimiter = ',')]
        lengths: Vec<usize>,
    },
    /// Directed cycle with one chord
    Nestedcycles {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Method {
    Tree,
    Spectral,
    Brute,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    Balanced,
    Antibalanced,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MatrixKind {
    W,
    L,
    Lrw,
    Ph,
}

fn parse_theta(text: &str) -> anyhow::Result<f64> {
    let lower = text.trim().to_ascii_lowercase();
    if let Some(rest) = lower.strip_prefix("2pi/") {
        let k: f64 = rest.parse().context("bad K in 2pi/K")?;
        anyhow::ensure!(k > 0.0, "K must be positive in 2pi/K");
        return Ok(cwnet::angle::wrap(cwnet::angle::TWO_PI / k));
    }
    if lower == "2pi" {
        return Ok(0.0);
    }
    let v: f64 = lower.parse().context("theta must be `2pi/K` or decimal radians")?;
    anyhow::ensure!((0.0..cwnet::angle::TWO_PI).contains(&v), "theta must lie in [0, 2pi)");
    Ok(v)
}

fn read_labels(path: &Path) -> anyhow::Result<Vec<usize>> {
    let text = std::fs::read_to_string(path)?;
    let mut labels = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        labels.push(
            line.parse::<usize>()
                .with_context(|| format!("{}:{}: bad label '{line}'", path.display(), idx + 1))?,
        );
    }
    anyhow::ensure!(!labels.is_empty(), "no labels in {}", path.display());
    Ok(labels)
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().ok();
    }
    match dispatch(&cli) {
        Ok(()) => {}
        Err(err) => {
            let code = err
                .downcast_ref::<cwnet::Error>()
                .map(output::error_code)
                .unwrap_or("internal");
            let obj = json!({"error": {"code": code, "message": err.to_string()}});
            eprintln!("{obj}");
            std::process::exit(1);
        }
    }
}

fn dispatch(cli: &Cli) -> anyhow::Result<()> {
    let mut run = Run::new(Some(cli.seed));
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Classify { file, method } => {
            run.record_input(file)?;
            let g = io::load_edge_list(file)?;
            let tol = cli.tol.unwrap_or(cwnet::angle::PHASE_TOL);
            let report = match method {
                Method::Tree => balance::classify_with_tol(&g, tol)?,
                Method::Spectral => balance::classify_spectral(&g)?,
                Method::Brute => balance::brute_force_classify_with_tol(&g, tol)?,
            };
            run.emit(out, &serde_json::to_string_pretty(&report)?)?;
        }
        Command::Partition { file, mode } => {
            run.record_input(file)?;
            let g = io::load_edge_list(file)?;
            let mode = match mode {
                Mode::Balanced => PartitionMode::Balanced,
                Mode::Antibalanced => PartitionMode::Antibalanced,
            };
            let partition = balance::extract_partition(&g, mode)?;
            run.emit(out, &serde_json::to_string_pretty(&partition)?)?;
        }
        Command::Walk { file, x0, steps } => {
            run.record_input(file)?;
            let g = io::load_edge_list(file)?;
            let state = if x0 == "uniform" {
                randwalk::WalkerState::uniform(g.node_count())
            } else {
                let path = PathBuf::from(x0);
                run.record_input(&path)?;
                let text = std::fs::read_to_string(&path)?;
                randwalk::WalkerState::new(io::parse_initial_state(&text, g.node_count())?)?
            };
            let tol = cli.tol.unwrap_or(1e-8);
            let max_t = match steps {
                Some(t) => *t,
                None => randwalk::default_max_t(&g, tol)?,
            };
            let report = randwalk::simulate_to_limit(&g, &state.densities, tol, max_t)?;
            let final_norm = report
                .fixed_points
                .last()
                .map(|v| v.iter().map(|z| z.norm()).fold(0.0f64, f64::max))
                .unwrap_or(0.0);
            let payload = json!({
                "tol": tol,
                "max_t": max_t,
                "report": report,
                "final_norm_inf": final_norm,
            });
            run.emit(out, &serde_json::to_string_pretty(&payload)?)?;
        }
        Command::Cluster { file, k, l, levelone_magnitude } => {
            run.record_input(file)?;
            let g = io::load_edge_list(file)?;
            let options = ClusterOptions {
                level_one_on_magnitude: *levelone_magnitude,
                ..ClusterOptions::default()
            };
            let partition = clustering::spectral_cluster(&g, *k, l, cli.seed, &options)?;
            let cuts = clustering::general_ratio_cut(&g, &partition)?;
            let payload = json!({"partition": partition, "cuts": cuts});
            run.emit(out, &serde_json::to_string_pretty(&payload)?)?;
        }
        Command::Cut { file, partition } => {
            run.record_input(file)?;
            run.record_input(partition)?;
            let g = io::load_edge_list(file)?;
            let text = std::fs::read_to_string(partition)?;
            let partition: TwoLevelPartition = serde_json::from_str(&text)
                .with_context(|| "partition file must be TwoLevelPartition JSON")?;
            let cuts = clustering::general_ratio_cut(&g, &partition)?;
            run.emit(out, &serde_json::to_string_pretty(&cuts)?)?;
        }
        Command::Nmi { labels_a, labels_b } => {
            run.record_input(labels_a)?;
            run.record_input(labels_b)?;
            let a = read_labels(labels_a)?;
            let b = read_labels(labels_b)?;
            let score = clustering::nmi(&a, &b)?;
            match cli.format {
                Some(Format::Json) => run.emit(out, &json!({"nmi": score}).to_string())?,
                _ => run.emit(out, &format!("{score}"))?,
            }
        }
        Command::Csbm { sizes, pin, pout, eta, l, truth } => {
            let params = csbm::CsbmParams {
                community_sizes: sizes.clone(),
                p_in: *pin,
                p_out: *pout,
                eta: *eta,
                l: l.clone(),
                seed: cli.seed,
            };
            let labeled = csbm::generate(&params)?;
            run.emit(out, &io::format_edge_list(&labeled.graph))?;
            if let Some(truth_path) = truth {
                std::fs::write(truth_path, serde_json::to_string_pretty(&labeled.truth)?)?;
            }
        }
        Command::Magnetic(sub) => match sub {
            MagneticCommand::Sweep { file, rmax } => {
                run.record_input(file)?;
                let h = io::load_directed_edge_list(file)?;
                let result = magnetic::sweep(&h, *rmax)?;
                match cli.format {
                    Some(Format::Json) => {
                        run.emit(out, &serde_json::to_string_pretty(&result)?)?;
                    }
                    _ => {
                        let mut csvtext =
                            String::from("r,lambda_min,lambda_max,predicted_zero,predicted_two\n");
                        for (idx, &r) in result.r_values.iter().enumerate() {
                            csvtext.push_str(&format!(
                                "{},{},{},{},{}\n",
                                r,
                                result.lambda_min[idx],
                                result.lambda_max[idx],
                                result.predicted_zero_r.contains(&r),
                                result.predicted_two_r.contains(&r)
                            ));
                        }
                        run.emit(out, csvtext.trim_end())?;
                    }
                }
            }
            MagneticCommand::Roles { file, theta, roles, largest } => {
                run.record_input(file)?;
                let h = io::load_directed_edge_list(file)?;
                let theta = parse_theta(theta)?;
                let vector = if *largest {
                    RoleVector::LargestEigenvalue
                } else {
                    RoleVector::SmallestEigenvalue
                };
                let result = magnetic::roles(&h, theta, *roles, cli.seed, vector)?;
                run.emit(out, &serde_json::to_string_pretty(&result)?)?;
            }
        },
        Command::Gen(sub) => {
            let h = match sub {
                GenCommand::Dcycle { n } => magnetic::gen_directed_cycle(*n)?,
                GenCommand::Treecycles { lengths } => magnetic::gen_tree_of_cycles(lengths)?,
                GenCommand::Nestedcycles { n, from, to } => {
                    magnetic::gen_nested_cycles(*n, *from, *to)?
                }
            };
            run.emit(out, &io::format_directed_edge_list(&h))?;
        }
        Command::Spectrum { file, matrix } => {
            run.record_input(file)?;
            let g = io::load_edge_list(file)?;
            let (name, m): (&str, cwnet::CMatrix) = match matrix {
                MatrixKind::W => ("W", g.weight_matrix()),
                MatrixKind::L => ("L", g.laplacian()),
                MatrixKind::Lrw => ("L_rw", g.random_walk_laplacian()),
                MatrixKind::Ph => ("P_h", g.hermitian_transition()),
            };
            // L_rw is not Hermitian; use the similar Hermitian operator
            let eig = match matrix {
                MatrixKind::Lrw => {
                    let ph = g.hermitian_transition();
                    let n = g.node_count();
                    let mut sym = ph.mapv(|z| -z);
                    for i in 0..n {
                        sym[(i, i)] += Complex64::new(1.0, 0.0);
                    }
                    cwnet::linalg::hermitian_eig(&sym)?
                }
                _ => cwnet::linalg::hermitian_eig(&m)?,
            };
            let payload = json!({
                "matrix": name,
                "eigenvalues": eig.eigenvalues,
                "matrix_json": io::MatrixJson::from(&m),
            });
            run.emit(out, &serde_json::to_string_pretty(&payload)?)?;
        }
        Command::Repro { figure, outdir, svg } => {
            repro::run(*figure, outdir, cli.seed, *svg, &mut run)?;
        }
    }
    Ok(())
}

/// Shared by repro: evolve a complex vector from a state file or uniform.
#[allow(dead_code)]
fn parse_x0(text: &str, n: usize) -> anyhow::Result<cwnet::CVector> {
    if text == "uniform" {
        Ok(complex_vector(&vec![Complex64::new(1.0 / n as f64, 0.0); n]))
    } else {
        Ok(io::parse_initial_state(text, n)?)
    }
}
