//! Machine-readable analysis reports.
//!
//! The report owns the JSON schema (`"schema": 1`): node ids are 1-based
//! as in graph files, complex numbers are `[re, im]` pairs, exact
//! rationals are strings, and every float is printed with 17 significant
//! digits so identical inputs produce byte-identical reports. Every
//! negative verdict carries at least one certificate.

use std::collections::BTreeSet;
use std::io;

use nalgebra::Complex;
use serde::Serialize;

use crate::ctrb::{
    kalman_decompose, left_eigen_obstruction, max_independent_row_sets, pbh_check,
    target_ctrb_matrix, ObstructionCertificate, PbhReport,
};
use crate::extensions::{
    connectivity_check, connectivity_verdict_unverified, general_linear_triple, lift_rank_check,
    scc_analyze, ConnectivityCheck, GeneralLinearSpec, NecessityVerdict, SccReport,
};
use crate::graph::Graph;
use crate::partition::{partition_summary, PartitionSummary};
use crate::reach::{analyze_reachability, ReachabilityReport};
use crate::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Tolerances threaded through the numeric checks, echoed in the report.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tolerances {
    /// Relative eigenvalue clustering tolerance (scaled by the system norm).
    pub eig: f64,
    /// Relative numeric rank tolerance; `None` selects the per-matrix
    /// default `max(rows, cols) * machine epsilon`.
    pub rank: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eig: 1e-8,
            rank: None,
        }
    }
}

/// Which checks `analyze` should run.
#[derive(Clone, Copy, Debug)]
pub struct AnalyzeOptions {
    /// Skip every exact-rank computation; verdicts then come only from
    /// the structural and numeric necessary/sufficient conditions.
    pub exact: bool,
    pub tolerances: Tolerances,
    /// Cap on enumerated admissible target selections.
    pub cap: usize,
    /// Also analyze the block-companion lift of this order.
    pub lift_order: Option<usize>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            exact: true,
            tolerances: Tolerances::default(),
            cap: 16,
            lift_order: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    TargetControllable,
    NotTargetControllable,
    Undetermined,
}

impl Verdict {
    /// Process exit code contract: 0 controllable, 3 not, 4 undetermined.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::TargetControllable => 0,
            Verdict::NotTargetControllable => 3,
            Verdict::Undetermined => 4,
        }
    }
}

/// Evidence attached to a negative verdict.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// `rank W < p`.
    RankDeficit { dim: usize, p: usize },
    /// Exactly-zero rows of `W`, named by their target nodes.
    ZeroRows { targets: Vec<usize> },
    /// A cell holding two or more targets (equal rows of `W`).
    CellMultiplicity { cell: Vec<usize>, targets_in_cell: Vec<usize> },
    /// A left eigenvector supported on the targets annihilating `B`.
    LeftEigenvector { lambda: [f64; 2] },
    /// A target-only independent follower component with no leader edge.
    IsolatedTargetComponent { component: Vec<usize> },
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphSummary {
    pub n: usize,
    pub edge_count: usize,
    pub leaders: Vec<usize>,
    pub targets: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReachabilitySection {
    pub reachable: Vec<usize>,
    pub unreachable: Vec<usize>,
    /// `classes[k]` lists the followers whose shortest path from the
    /// leader set passes through `k` intermediate nodes.
    pub classes: Vec<Vec<usize>>,
    pub unreachable_targets: Vec<usize>,
    /// `p - |unreachable targets|`.
    pub dim_upper_bound: usize,
    /// Row indices (0-based into the target list) of exactly-zero rows of
    /// `W`; present only when exact checks ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_zero_rows: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionSection {
    pub cells: Vec<Vec<usize>>,
    pub applicable: bool,
    pub cell_target_counts: Vec<usize>,
    pub has_unreachable_target: bool,
    /// Criterion answer when applicable, otherwise `null`.
    pub controllable: Option<bool>,
    /// Exact `rank W`; absent without exact checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_cross_check: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankSection {
    pub dim: usize,
    pub p: usize,
    pub controllable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KalmanSection {
    pub kappa: usize,
    /// All admissible target selections of size `kappa` (1-based node
    /// ids), truncated at the cap.
    pub admissible_target_sets: Vec<Vec<usize>>,
    pub truncated: bool,
    pub selection_admissible: bool,
    pub selected_rows_rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PbhSection {
    pub entries: Vec<PbhEntryDto>,
    pub all_pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PbhEntryDto {
    pub lambda: [f64; 2],
    pub multiplicity: usize,
    pub rank: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionSection {
    pub lambda: [f64; 2],
    pub theta: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SccSection {
    pub components: Vec<Vec<usize>>,
    pub independent: Vec<bool>,
    pub follower_components: Vec<Vec<usize>>,
    pub follower_independent: Vec<bool>,
    pub target_only_independent: Vec<Vec<usize>>,
    pub ltf_connected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ltf_reason: Option<String>,
    pub precondition_holds: bool,
    pub verdict: NecessityVerdictDto,
}

#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NecessityVerdictDto {
    NotTargetControllable,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneralLinearSection {
    pub sigma: usize,
    pub state_dim: usize,
    pub p: usize,
    pub rank: usize,
    pub controllable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictSection {
    pub status: Verdict,
    pub exit_code: i32,
    pub certificates: Vec<Certificate>,
}

/// Full analysis output; every field carries its evidence.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub tool_version: String,
    pub graph_summary: GraphSummary,
    pub tolerances: Tolerances,
    pub reachability: ReachabilitySection,
    pub partition: PartitionSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<RankSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kalman: Option<KalmanSection>,
    pub pbh: PbhSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<ObstructionSection>,
    pub scc: SccSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lift: Option<LiftSectionDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub general_linear: Option<GeneralLinearSection>,
    pub verdict: VerdictSection,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LiftSectionDto {
    pub order: usize,
    pub rank_first: usize,
    pub rank_lifted: usize,
    pub equal: bool,
}

fn one_based<'a>(ids: impl IntoIterator<Item = &'a usize>) -> Vec<usize> {
    ids.into_iter().map(|&v| v + 1).collect()
}

fn one_based_sets<'a>(sets: impl IntoIterator<Item = &'a BTreeSet<usize>>) -> Vec<Vec<usize>> {
    sets.into_iter().map(|s| one_based(s.iter())).collect()
}

fn pair(z: Complex<f64>) -> [f64; 2] {
    [z.re, z.im]
}

fn reachability_section(
    g: &Graph,
    r: &ReachabilityReport,
    w_zero_rows: Option<Vec<usize>>,
) -> ReachabilitySection {
    ReachabilitySection {
        reachable: one_based(r.reachable.iter()),
        unreachable: one_based(r.unreachable.iter()),
        classes: one_based_sets(r.classes.iter()),
        unreachable_targets: one_based(r.unreachable_targets.iter()),
        dim_upper_bound: g.targets().len() - r.unreachable_targets.len(),
        w_zero_rows,
    }
}

fn partition_section(s: &PartitionSummary, controllable: Option<bool>, rank: Option<usize>) -> PartitionSection {
    PartitionSection {
        cells: one_based_sets(s.partition.cells().iter()),
        applicable: s.applicable,
        cell_target_counts: s.cell_target_counts.clone(),
        has_unreachable_target: s.has_unreachable_target,
        controllable,
        rank_cross_check: rank,
    }
}

fn pbh_section(r: &PbhReport) -> PbhSection {
    PbhSection {
        entries: r
            .entries
            .iter()
            .map(|e| PbhEntryDto {
                lambda: pair(e.lambda),
                multiplicity: e.multiplicity,
                rank: e.rank,
                pass: e.pass,
            })
            .collect(),
        all_pass: r.all_pass,
    }
}

fn obstruction_section(c: &ObstructionCertificate) -> ObstructionSection {
    ObstructionSection {
        lambda: pair(c.lambda),
        theta: c.theta.iter().map(|&z| pair(z)).collect(),
    }
}

/// Builds the SCC report section (1-based ids); shared with the CLI.
pub fn scc_section_dto(scc: &SccReport, check: &ConnectivityCheck) -> SccSection {
    SccSection {
        components: one_based_sets(scc.components.iter()),
        independent: scc.independent.clone(),
        follower_components: one_based_sets(scc.follower_components.iter()),
        follower_independent: scc.follower_independent.clone(),
        target_only_independent: one_based_sets(scc.target_only_independent.iter()),
        ltf_connected: scc.ltf_connected,
        ltf_reason: scc.ltf_reason.clone(),
        precondition_holds: check.precondition_holds,
        verdict: match check.verdict {
            NecessityVerdict::NotTargetControllable => NecessityVerdictDto::NotTargetControllable,
            NecessityVerdict::Inconclusive => NecessityVerdictDto::Inconclusive,
        },
    }
}

/// Runs the full pipeline and assembles the report. The binding verdict is
/// the exact rank when enabled; without it, the structural necessary and
/// sufficient conditions decide where they can and the verdict degrades to
/// `UNDETERMINED` where they cannot.
pub fn analyze(g: &Graph, spec: Option<&GeneralLinearSpec>, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let reach = analyze_reachability(g);
    let summary = partition_summary(g);
    let triple = g.system_triple();
    let pbh = pbh_check(&triple, opts.tolerances.eig, opts.tolerances.rank)?;
    let obstruction = left_eigen_obstruction(&triple, opts.tolerances.eig)?;
    let scc = scc_analyze(g);

    let mut certificates = Vec::new();
    if let Some(cert) = &obstruction {
        certificates.push(Certificate::LeftEigenvector {
            lambda: pair(cert.lambda),
        });
    }
    for (cell, &count) in summary
        .partition
        .cells()
        .iter()
        .zip(&summary.cell_target_counts)
    {
        if count >= 2 {
            certificates.push(Certificate::CellMultiplicity {
                cell: one_based(cell.iter()),
                targets_in_cell: one_based(cell.iter().filter(|&&v| g.is_target(v))),
            });
        }
    }
    if !reach.unreachable_targets.is_empty() {
        certificates.push(Certificate::ZeroRows {
            targets: one_based(reach.unreachable_targets.iter()),
        });
    }

    let p = g.targets().len();
    let report = if opts.exact {
        let w = target_ctrb_matrix(&triple);
        let dim = w.rank();
        let controllable = dim == p;
        if !controllable {
            certificates.insert(0, Certificate::RankDeficit { dim, p });
        }

        let connectivity = connectivity_check(g, spec)?;
        if connectivity.verdict == NecessityVerdict::NotTargetControllable {
            for comp in &scc.target_only_independent {
                certificates.push(Certificate::IsolatedTargetComponent {
                    component: one_based(comp.iter()),
                });
            }
        }

        let partition_controllable = if summary.applicable {
            let by_cells = summary.criterion_satisfied();
            if by_cells != controllable {
                return Err(crate::Error::CrossCheck(format!(
                    "cell criterion says controllable={by_cells} but rank W = {dim} of p = {p}"
                )));
            }
            Some(by_cells)
        } else {
            None
        };

        let kd = kalman_decompose(&triple);
        let selections = max_independent_row_sets(&kd.p1, opts.cap);
        let selection = crate::ctrb::target_selection_check(&triple)?;

        let lift = match opts.lift_order {
            Some(order) => {
                let c = lift_rank_check(&triple, order)?;
                Some(LiftSectionDto {
                    order,
                    rank_first: c.rank_first,
                    rank_lifted: c.rank_lifted,
                    equal: c.equal,
                })
            }
            None => None,
        };

        let general_linear = spec.map(|s| {
            let gt = general_linear_triple(g, s);
            let rank = target_ctrb_matrix(&gt).rank();
            GeneralLinearSection {
                sigma: s.sigma,
                state_dim: gt.n(),
                p: gt.p(),
                rank,
                controllable: rank == gt.p(),
            }
        });

        let status = if controllable {
            Verdict::TargetControllable
        } else {
            Verdict::NotTargetControllable
        };
        AnalysisReport {
            schema: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            graph_summary: GraphSummary {
                n: g.node_count(),
                edge_count: g.edges().len(),
                leaders: one_based(g.leaders().iter()),
                targets: one_based(g.targets().iter()),
            },
            tolerances: opts.tolerances,
            reachability: reachability_section(g, &reach, Some(w.zero_rows())),
            partition: partition_section(&summary, partition_controllable, Some(dim)),
            rank: Some(RankSection {
                dim,
                p,
                controllable,
            }),
            kalman: Some(KalmanSection {
                kappa: kd.kappa,
                admissible_target_sets: selections
                    .sets
                    .iter()
                    .map(|s| one_based(s.iter()))
                    .collect(),
                truncated: selections.truncated,
                selection_admissible: selection.admissible,
                selected_rows_rank: selection.selected_rows_rank,
            }),
            pbh: pbh_section(&pbh),
            obstruction: obstruction.as_ref().map(obstruction_section),
            scc: scc_section_dto(&scc, &connectivity),
            lift,
            general_linear,
            verdict: VerdictSection {
                status,
                exit_code: status.exit_code(),
                certificates: if controllable { Vec::new() } else { certificates },
            },
        }
    } else {
        let connectivity = connectivity_verdict_unverified(&scc);
        if connectivity.verdict == NecessityVerdict::NotTargetControllable {
            for comp in &scc.target_only_independent {
                certificates.push(Certificate::IsolatedTargetComponent {
                    component: one_based(comp.iter()),
                });
            }
        }
        let partition_controllable = summary
            .applicable
            .then(|| summary.criterion_satisfied());

        let status = if !reach.unreachable_targets.is_empty()
            || partition_controllable == Some(false)
            || obstruction.is_some()
            || connectivity.verdict == NecessityVerdict::NotTargetControllable
        {
            Verdict::NotTargetControllable
        } else if partition_controllable == Some(true) {
            Verdict::TargetControllable
        } else {
            Verdict::Undetermined
        };
        AnalysisReport {
            schema: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            graph_summary: GraphSummary {
                n: g.node_count(),
                edge_count: g.edges().len(),
                leaders: one_based(g.leaders().iter()),
                targets: one_based(g.targets().iter()),
            },
            tolerances: opts.tolerances,
            reachability: reachability_section(g, &reach, None),
            partition: partition_section(&summary, partition_controllable, None),
            rank: None,
            kalman: None,
            pbh: pbh_section(&pbh),
            obstruction: obstruction.as_ref().map(obstruction_section),
            scc: scc_section_dto(&scc, &connectivity),
            lift: None,
            general_linear: None,
            verdict: VerdictSection {
                status,
                exit_code: status.exit_code(),
                certificates: if status == Verdict::NotTargetControllable {
                    certificates
                } else {
                    Vec::new()
                },
            },
        }
    };
    Ok(report)
}

struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes any report value to JSON with every float printed in
/// 17-significant-digit scientific notation, so output is byte-stable.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value
        .serialize(&mut ser)
        .expect("report types serialize infallibly");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}
