//! Command-line front end: graph analysis to JSON reports, steering to CSV.
//!
//! Exit codes for `analyze` (and `simulate` on refusal): 0 the system is
//! target controllable, 3 it is not, 4 undetermined by the enabled checks,
//! 1 input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use netctrl::ctrb::{kalman_decompose, target_selection_check};
use netctrl::exact::independent_row_subsets;
use netctrl::extensions::{general_linear_triple, lift_rank_check, scc_analyze, GeneralLinearSpec};
use netctrl::gen::random_graph;
use netctrl::graph::Graph;
use netctrl::partition::{partition_check, suggest_targets};
use netctrl::reach::reachable_target_check;
use netctrl::report::{self, AnalyzeOptions, Tolerances};
use netctrl::steering::{simulate_high_order, steer, SteeringProblem};
use netctrl::{ctrb, Error};

#[derive(Parser)]
#[command(name = "netctrl", version, about = "Target controllability analysis for leader-follower networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check and print a JSON report.
    Analyze {
        graph: PathBuf,
        /// Skip exact-rank computations; the verdict may degrade to
        /// UNDETERMINED (exit 4).
        #[arg(long)]
        no_exact: bool,
        /// Relative eigenvalue clustering tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol_eig: f64,
        /// Relative numeric rank tolerance (default: per-matrix
        /// max(rows, cols) * machine epsilon).
        #[arg(long)]
        tol_rank: Option<f64>,
        /// Cap on enumerated admissible target selections.
        #[arg(long, default_value_t = 16)]
        cap: usize,
        /// Also check the block-companion lift of this order.
        #[arg(long)]
        order: Option<usize>,
        /// JSON sidecar with general linear agent dynamics.
        #[arg(long)]
        general_linear: Option<PathBuf>,
    },
    /// Leader-relative equitable partition and its verdict.
    Partition { graph: PathBuf },
    /// Reachability layering and the zero-row cross-check.
    Reach { graph: PathBuf },
    /// Exact controllability decomposition summary.
    Decompose { graph: PathBuf },
    /// Enumerate admissible target sets of a given size.
    SelectTargets {
        graph: PathBuf,
        /// Target set size to enumerate.
        #[arg(long)]
        count: usize,
        /// Stop after this many sets.
        #[arg(long, default_value_t = 64)]
        cap: usize,
    },
    /// Strongly connected components and connectivity conditions.
    Scc {
        graph: PathBuf,
        /// JSON sidecar with general linear agent dynamics; the verdict
        /// then applies to the Kronecker system.
        #[arg(long)]
        general_linear: Option<PathBuf>,
    },
    /// Rank comparison against a lifted system.
    Lift {
        graph: PathBuf,
        /// Block-companion lift order.
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Analyze the Kronecker system of this sidecar instead.
        #[arg(long)]
        general_linear: Option<PathBuf>,
    },
    /// Minimum-energy steering of the target outputs; prints CSV.
    Simulate {
        graph: PathBuf,
        /// Initial state: `zero` or a file of whitespace-separated values
        /// of the (lifted) state dimension.
        #[arg(long, default_value = "zero")]
        x0: String,
        /// Desired terminal outputs, comma-separated.
        #[arg(long)]
        yf: String,
        #[arg(long, default_value_t = 1.0)]
        tf: f64,
        /// Number of samples (at least 2).
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        /// Agent dynamics order (1 = consensus integrators).
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
    /// Emit a random fixture graph (developer aid). The NETCTRL_SEED
    /// environment variable fixes the seed.
    GenRandom {
        /// Upper bound on the node count.
        #[arg(long, default_value_t = 8)]
        nodes: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_graph(path: &Path) -> netctrl::Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    Graph::parse(&text)
}

fn load_spec(path: &Path) -> netctrl::Result<GeneralLinearSpec> {
    let text = std::fs::read_to_string(path)?;
    GeneralLinearSpec::from_json(&text)
}

fn run(command: Command) -> netctrl::Result<ExitCode> {
    match command {
        Command::Analyze {
            graph,
            no_exact,
            tol_eig,
            tol_rank,
            cap,
            order,
            general_linear,
        } => {
            if order == Some(0) {
                return Err(Error::InvalidArgument("--order must be at least 1".into()));
            }
            let g = load_graph(&graph)?;
            let spec = general_linear.as_deref().map(load_spec).transpose()?;
            let opts = AnalyzeOptions {
                exact: !no_exact,
                tolerances: Tolerances {
                    eig: tol_eig,
                    rank: tol_rank,
                },
                cap,
                lift_order: order,
            };
            let report = report::analyze(&g, spec.as_ref(), &opts)?;
            println!("{}", report::to_json(&report));
            Ok(ExitCode::from(report.verdict.exit_code as u8))
        }
        Command::Partition { graph } => {
            let g = load_graph(&graph)?;
            let (partition, verdict) = partition_check(&g)?;
            #[derive(Serialize)]
            struct Out {
                schema: u32,
                cells: Vec<Vec<usize>>,
                applicable: bool,
                cell_target_counts: Vec<usize>,
                has_unreachable_target: bool,
                controllable: Option<bool>,
                rank_cross_check: usize,
            }
            let out = Out {
                schema: report::SCHEMA_VERSION,
                cells: partition
                    .cells()
                    .iter()
                    .map(|c| c.iter().map(|v| v + 1).collect())
                    .collect(),
                applicable: verdict.applicable,
                cell_target_counts: verdict.cell_target_counts,
                has_unreachable_target: verdict.has_unreachable_target,
                controllable: verdict.controllable,
                rank_cross_check: verdict.rank_cross_check,
            };
            println!("{}", report::to_json(&out));
            Ok(ExitCode::SUCCESS)
        }
        Command::Reach { graph } => {
            let g = load_graph(&graph)?;
            let reach = netctrl::reach::analyze_reachability(&g);
            let check = reachable_target_check(&g)?;
            #[derive(Serialize)]
            struct Out {
                schema: u32,
                reachable: Vec<usize>,
                unreachable: Vec<usize>,
                classes: Vec<Vec<usize>>,
                unreachable_targets: Vec<usize>,
                w_zero_rows: Vec<usize>,
                dim_upper_bound: usize,
            }
            let ids = |s: &std::collections::BTreeSet<usize>| -> Vec<usize> {
                s.iter().map(|v| v + 1).collect()
            };
            let out = Out {
                schema: report::SCHEMA_VERSION,
                reachable: ids(&reach.reachable),
                unreachable: ids(&reach.unreachable),
                classes: reach.classes.iter().map(|c| ids(c)).collect(),
                unreachable_targets: ids(&reach.unreachable_targets),
                w_zero_rows: check.w_zero_rows.iter().copied().collect(),
                dim_upper_bound: check.dim_upper_bound,
            };
            println!("{}", report::to_json(&out));
            Ok(ExitCode::SUCCESS)
        }
        Command::Decompose { graph } => {
            let g = load_graph(&graph)?;
            let t = g.system_triple();
            let kd = kalman_decompose(&t);
            let selection = target_selection_check(&t)?;
            #[derive(Serialize)]
            struct Out {
                schema: u32,
                kappa: usize,
                p1: Vec<Vec<String>>,
                a_c: Vec<Vec<String>>,
                b_c: Vec<Vec<String>>,
                h_c: Vec<Vec<String>>,
                selection_admissible: bool,
                selected_rows_rank: usize,
            }
            let out = Out {
                schema: report::SCHEMA_VERSION,
                kappa: kd.kappa,
                p1: kd.p1.to_string_rows(),
                a_c: kd.a_c.to_string_rows(),
                b_c: kd.b_c.to_string_rows(),
                h_c: kd.h_c.to_string_rows(),
                selection_admissible: selection.admissible,
                selected_rows_rank: selection.selected_rows_rank,
            };
            println!("{}", report::to_json(&out));
            Ok(ExitCode::SUCCESS)
        }
        Command::SelectTargets { graph, count, cap } => {
            if count == 0 {
                return Err(Error::InvalidArgument("--count must be at least 1".into()));
            }
            let g = load_graph(&graph)?;
            let t = g.system_triple();
            let kd = kalman_decompose(&t);
            let (sets, truncated) = independent_row_subsets(&kd.p1, count, cap);
            let class_suggestions = suggest_targets(&g, cap)?;
            #[derive(Serialize)]
            struct Out {
                schema: u32,
                kappa: usize,
                count: usize,
                sets: Vec<Vec<usize>>,
                truncated: bool,
                class_suggestions: Vec<Vec<usize>>,
                class_suggestions_truncated: bool,
            }
            let out = Out {
                schema: report::SCHEMA_VERSION,
                kappa: kd.kappa,
                count,
                sets: sets
                    .iter()
                    .map(|s| s.iter().map(|v| v + 1).collect())
                    .collect(),
                truncated,
                class_suggestions: class_suggestions
                    .sets
                    .iter()
                    .map(|s| s.iter().map(|v| v + 1).collect())
                    .collect(),
                class_suggestions_truncated: class_suggestions.truncated,
            };
            println!("{}", report::to_json(&out));
            Ok(ExitCode::SUCCESS)
        }
        Command::Scc {
            graph,
            general_linear,
        } => {
            let g = load_graph(&graph)?;
            let spec = general_linear.as_deref().map(load_spec).transpose()?;
            let scc = scc_analyze(&g);
            let check = netctrl::extensions::connectivity_check(&g, spec.as_ref())?;
            #[derive(Serialize)]
            struct Out {
                schema: u32,
                #[serde(flatten)]
                scc: report::SccSection,
            }
            let out = Out {
                schema: report::SCHEMA_VERSION,
                scc: report::scc_section_dto(&scc, &check),
            };
            println!("{}", report::to_json(&out));
            Ok(ExitCode::SUCCESS)
        }
        Command::Lift {
            graph,
            order,
            general_linear,
        } => {
            if order == 0 {
                return Err(Error::InvalidArgument("--order must be at least 1".into()));
            }
            let g = load_graph(&graph)?;
            match general_linear {
                Some(path) => {
                    let spec = load_spec(&path)?;
                    let gt = general_linear_triple(&g, &spec);
                    let rank = ctrb::target_ctrb_matrix(&gt).rank();
                    #[derive(Serialize)]
                    struct Out {
                        schema: u32,
                        sigma: usize,
                        state_dim: usize,
                        p: usize,
                        rank: usize,
                        controllable: bool,
                    }
                    let out = Out {
                        schema: report::SCHEMA_VERSION,
                        sigma: spec.sigma,
                        state_dim: gt.n(),
                        p: gt.p(),
                        rank,
                        controllable: rank == gt.p(),
                    };
                    println!("{}", report::to_json(&out));
                }
                None => {
                    let check = lift_rank_check(&g.system_triple(), order)?;
                    #[derive(Serialize)]
                    struct Out {
                        schema: u32,
                        order: usize,
                        rank_first: usize,
                        rank_lifted: usize,
                        equal: bool,
                    }
                    let out = Out {
                        schema: report::SCHEMA_VERSION,
                        order,
                        rank_first: check.rank_first,
                        rank_lifted: check.rank_lifted,
                        equal: check.equal,
                    };
                    println!("{}", report::to_json(&out));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            graph,
            x0,
            yf,
            tf,
            steps,
            order,
        } => {
            let g = load_graph(&graph)?;
            let t = g.system_triple();
            let dim = g.node_count() * order.max(1);
            let x0 = parse_x0(&x0, dim)?;
            let yf = parse_float_list(&yf)?;
            let result = if order <= 1 {
                steer(&SteeringProblem::new(&t, x0, yf, tf, steps)?)
            } else {
                simulate_high_order(&t, order, x0, yf, tf, steps)
            };
            match result {
                Ok(traj) => {
                    print!("{}", traj.to_csv());
                    Ok(ExitCode::SUCCESS)
                }
                Err(Error::SingularGramian(msg)) => {
                    eprintln!("error: {msg}");
                    Ok(ExitCode::from(3))
                }
                Err(e) => Err(e),
            }
        }
        Command::GenRandom { nodes } => {
            let seed = std::env::var("NETCTRL_SEED")
                .ok()
                .and_then(|s| s.parse::<u64>().ok())
                .unwrap_or(0);
            use rand::SeedableRng;
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let g = random_graph(&mut rng, nodes.max(1));
            print!("{}", g.to_canonical_string());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_x0(arg: &str, dim: usize) -> netctrl::Result<Vec<f64>> {
    if arg == "zero" {
        return Ok(vec![0.0; dim]);
    }
    let text = std::fs::read_to_string(arg)?;
    let values: Vec<f64> = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad x0 entry `{tok}`")))
        })
        .collect::<netctrl::Result<_>>()?;
    if values.len() != dim {
        return Err(Error::Dimension(format!(
            "x0 has {} entries, the (lifted) state dimension is {dim}",
            values.len()
        )));
    }
    Ok(values)
}

fn parse_float_list(arg: &str) -> netctrl::Result<Vec<f64>> {
    arg.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad value `{tok}` in list")))
        })
        .collect()
}
