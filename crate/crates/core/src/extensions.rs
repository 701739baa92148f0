//! Higher-order integrator lifts, Kronecker-structured general linear
//! agents, and strongly-connected-component connectivity conditions.
//!
//! The block-companion lift leaves the target-controllability rank
//! unchanged, which `lift_rank_check` verifies exactly on both sides. For
//! general linear agent dynamics the network system is assembled from
//! Kronecker products. The SCC analysis identifies independent components
//! of the follower subgraph made of target nodes only: if one exists yet
//! receives no leader edge, it is unreachable in its entirety and the
//! system cannot be target controllable.

use std::collections::BTreeSet;

use crate::ctrb::target_ctrb_matrix;
use crate::exact::{parse_rat, rat, Rat, RatMatrix};
use crate::graph::{Graph, SystemTriple};
use crate::{Error, Result};

/// Block-companion lift of the system to agents with `m_order`-th order
/// integrator dynamics. The lifted state stacks `m_order` copies of the
/// network state; identity blocks sit on the superdiagonal and the original
/// state matrix in the bottom-left corner. Inputs enter the last block and
/// outputs read the first.
pub fn lift_high_order(t: &SystemTriple, m_order: usize) -> SystemTriple {
    assert!(m_order >= 1, "order must be at least 1");
    if m_order == 1 {
        return t.clone();
    }
    let n = t.n();
    let nm = n * m_order;
    let mut a = RatMatrix::zeros(nm, nm);
    for block in 0..m_order - 1 {
        for i in 0..n {
            a[(block * n + i, (block + 1) * n + i)] = rat(1);
        }
    }
    for i in 0..n {
        for j in 0..n {
            a[((m_order - 1) * n + i, j)] = t.a()[(i, j)].clone();
        }
    }
    let mut b = RatMatrix::zeros(nm, t.l());
    for i in 0..n {
        for j in 0..t.l() {
            b[((m_order - 1) * n + i, j)] = t.b()[(i, j)].clone();
        }
    }
    let mut h = RatMatrix::zeros(t.p(), nm);
    for i in 0..t.p() {
        for j in 0..n {
            h[(i, j)] = t.h()[(i, j)].clone();
        }
    }
    SystemTriple::new(a, b, h)
}

/// Exact rank comparison between a system and its `m_order` lift.
#[derive(Clone, Copy, Debug)]
pub struct LiftRankCheck {
    pub rank_first: usize,
    pub rank_lifted: usize,
    pub equal: bool,
}

/// Computes both ranks exactly (the lifted one over the full `n * m_order`
/// power horizon) and insists they agree; a mismatch aborts with
/// [`Error::CrossCheck`].
pub fn lift_rank_check(t: &SystemTriple, m_order: usize) -> Result<LiftRankCheck> {
    let rank_first = target_ctrb_matrix(t).rank();
    let lifted = lift_high_order(t, m_order);
    let rank_lifted = target_ctrb_matrix(&lifted).rank();
    if rank_first != rank_lifted {
        return Err(Error::CrossCheck(format!(
            "lift changed the target rank: {rank_first} -> {rank_lifted}"
        )));
    }
    Ok(LiftRankCheck {
        rank_first,
        rank_lifted,
        equal: true,
    })
}

/// Per-agent general linear dynamics, coupling through the graph:
///
/// ```text
/// x_i' = A x_i + M z_i (+ N u_i on leaders),   z_i' = K * consensus error
/// ```
///
/// The closed network system is `(I_n (x) A - L (x) M K, B (x) N, H (x) I_sigma)`.
#[derive(Clone, Debug)]
pub struct GeneralLinearSpec {
    /// Per-agent state dimension.
    pub sigma: usize,
    /// `sigma x sigma` drift.
    pub a_tilde: RatMatrix,
    /// `sigma x sigma_z` coupling input map.
    pub m: RatMatrix,
    /// `sigma x l_u` external input map.
    pub n_mat: RatMatrix,
    /// `sigma_z x sigma` coupling feedback gain.
    pub k: RatMatrix,
}

impl GeneralLinearSpec {
    pub fn new(
        sigma: usize,
        a_tilde: RatMatrix,
        m: RatMatrix,
        n_mat: RatMatrix,
        k: RatMatrix,
    ) -> Result<Self> {
        if sigma == 0 {
            return Err(Error::Sidecar("sigma must be at least 1".into()));
        }
        if a_tilde.nrows() != sigma || a_tilde.ncols() != sigma {
            return Err(Error::Sidecar(format!(
                "A must be {sigma}x{sigma}, got {}x{}",
                a_tilde.nrows(),
                a_tilde.ncols()
            )));
        }
        if m.nrows() != sigma {
            return Err(Error::Sidecar(format!(
                "M must have {sigma} rows, got {}",
                m.nrows()
            )));
        }
        if n_mat.nrows() != sigma {
            return Err(Error::Sidecar(format!(
                "N must have {sigma} rows, got {}",
                n_mat.nrows()
            )));
        }
        if k.ncols() != sigma || k.nrows() != m.ncols() {
            return Err(Error::Sidecar(format!(
                "K must be {}x{sigma} to match M, got {}x{}",
                m.ncols(),
                k.nrows(),
                k.ncols()
            )));
        }
        if m.ncols() == 0 || n_mat.ncols() == 0 {
            return Err(Error::Sidecar("M and N need at least one column".into()));
        }
        Ok(GeneralLinearSpec {
            sigma,
            a_tilde,
            m,
            n_mat,
            k,
        })
    }

    /// Parses the JSON sidecar:
    ///
    /// ```json
    /// {"sigma": 2, "A": [[0,1],[0,0]], "M": [[0],[1]], "N": [[0],[1]], "K": [["1","0"]]}
    /// ```
    ///
    /// Entries are integers or rational strings (`"3/2"`, `"0.5"`);
    /// non-integer JSON numbers are rejected to keep values exact.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Sidecar(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Sidecar("top level must be an object".into()))?;
        let sigma = obj
            .get("sigma")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Sidecar("missing integer field `sigma`".into()))?
            as usize;
        let matrix = |name: &str| -> Result<RatMatrix> {
            let rows = obj
                .get(name)
                .and_then(|v| v.as_array())
                .ok_or_else(|| Error::Sidecar(format!("missing matrix field `{name}`")))?;
            let mut out: Vec<Vec<Rat>> = Vec::with_capacity(rows.len());
            for row in rows {
                let row = row
                    .as_array()
                    .ok_or_else(|| Error::Sidecar(format!("`{name}` rows must be arrays")))?;
                let mut entries = Vec::with_capacity(row.len());
                for cell in row {
                    entries.push(json_rat(name, cell)?);
                }
                out.push(entries);
            }
            RatMatrix::from_rows(out)
                .map_err(|_| Error::Sidecar(format!("`{name}` rows have unequal lengths")))
        };
        GeneralLinearSpec::new(
            sigma,
            matrix("A")?,
            matrix("M")?,
            matrix("N")?,
            matrix("K")?,
        )
    }
}

fn json_rat(name: &str, v: &serde_json::Value) -> Result<Rat> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(rat(i))
            } else {
                Err(Error::Sidecar(format!(
                    "non-integer number {n} in `{name}`; write it as a string like \"3/2\""
                )))
            }
        }
        serde_json::Value::String(s) => {
            parse_rat(s).map_err(|e| Error::Sidecar(format!("bad entry in `{name}`: {e}")))
        }
        other => Err(Error::Sidecar(format!(
            "entry {other} in `{name}` must be a number or string"
        ))),
    }
}

/// Assembles the Kronecker network system for general linear agents:
/// state matrix `I_n (x) A - L (x) M K`, inputs `B (x) N`, outputs
/// `H (x) I_sigma`.
pub fn general_linear_triple(g: &Graph, spec: &GeneralLinearSpec) -> SystemTriple {
    let t = g.system_triple();
    let n = g.node_count();
    let mk = spec.m.mul(&spec.k);
    let laplacian = g.laplacian();
    let a = RatMatrix::identity(n)
        .kron(&spec.a_tilde)
        .sub(&laplacian.kron(&mk));
    let b = t.b().kron(&spec.n_mat);
    let h = t.h().kron(&RatMatrix::identity(spec.sigma));
    SystemTriple::new(a, b, h)
}

/// Strongly connected components of the graph and of its follower-induced
/// subgraph, with independence flags and the leader-target-follower
/// connectivity predicate.
#[derive(Clone, Debug)]
pub struct SccReport {
    /// Components of the whole graph, each sorted, ordered by smallest member.
    pub components: Vec<BTreeSet<usize>>,
    /// Flag per component: no incoming edge from another component.
    pub independent: Vec<bool>,
    /// Components of the follower-induced subgraph.
    pub follower_components: Vec<BTreeSet<usize>>,
    pub follower_independent: Vec<bool>,
    /// Independent follower components consisting of target nodes only.
    pub target_only_independent: Vec<BTreeSet<usize>>,
    /// True when some target-only independent follower component receives
    /// an edge from a leader.
    pub ltf_connected: bool,
    /// Why `ltf_connected` is false: `no-target-only-iscc` or
    /// `no-leader-edge`.
    pub ltf_reason: Option<String>,
}

/// Tarjan over an adjacency list; components come out sorted by smallest
/// member for deterministic reports.
fn tarjan(adj: &[Vec<usize>]) -> Vec<BTreeSet<usize>> {
    struct State<'a> {
        adj: &'a [Vec<usize>],
        index: usize,
        idx: Vec<Option<usize>>,
        low: Vec<usize>,
        stack: Vec<usize>,
        on_stack: Vec<bool>,
        comps: Vec<BTreeSet<usize>>,
    }
    fn connect(v: usize, s: &mut State) {
        s.idx[v] = Some(s.index);
        s.low[v] = s.index;
        s.index += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for &w in &s.adj[v] {
            if s.idx[w].is_none() {
                connect(w, s);
                s.low[v] = s.low[v].min(s.low[w]);
            } else if s.on_stack[w] {
                s.low[v] = s.low[v].min(s.idx[w].unwrap());
            }
        }
        if s.low[v] == s.idx[v].unwrap() {
            let mut comp = BTreeSet::new();
            loop {
                let w = s.stack.pop().expect("tarjan stack");
                s.on_stack[w] = false;
                comp.insert(w);
                if w == v {
                    break;
                }
            }
            s.comps.push(comp);
        }
    }
    let n = adj.len();
    let mut s = State {
        adj,
        index: 0,
        idx: vec![None; n],
        low: vec![0; n],
        stack: Vec::new(),
        on_stack: vec![false; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if s.idx[v].is_none() {
            connect(v, &mut s);
        }
    }
    let mut comps = s.comps;
    comps.sort_by_key(|c| *c.first().unwrap());
    comps
}

/// Flags components with no incoming edge from a different component.
fn independence_flags(adj: &[Vec<usize>], comps: &[BTreeSet<usize>]) -> Vec<bool> {
    let n = adj.len();
    let mut comp_of = vec![usize::MAX; n];
    for (ci, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }
    let mut independent = vec![true; comps.len()];
    for u in 0..n {
        for &w in &adj[u] {
            if comp_of[u] != comp_of[w] {
                independent[comp_of[w]] = false;
            }
        }
    }
    independent
}

pub fn scc_analyze(g: &Graph) -> SccReport {
    let adj = g.out_neighbors();
    let components = tarjan(&adj);
    let independent = independence_flags(&adj, &components);

    let followers = g.followers();
    let pos_of: std::collections::BTreeMap<usize, usize> = followers
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut fadj = vec![Vec::new(); followers.len()];
    for e in g.edges() {
        if let (Some(&fu), Some(&fw)) = (pos_of.get(&e.from), pos_of.get(&e.to)) {
            fadj[fu].push(fw);
        }
    }
    let follower_components: Vec<BTreeSet<usize>> = tarjan(&fadj)
        .into_iter()
        .map(|c| c.into_iter().map(|i| followers[i]).collect())
        .collect();
    let follower_independent = {
        let comps_local: Vec<BTreeSet<usize>> = follower_components
            .iter()
            .map(|c| c.iter().map(|v| pos_of[v]).collect())
            .collect();
        independence_flags(&fadj, &comps_local)
    };

    let target_only_independent: Vec<BTreeSet<usize>> = follower_components
        .iter()
        .zip(&follower_independent)
        .filter(|(c, &ind)| ind && c.iter().all(|&v| g.is_target(v)))
        .map(|(c, _)| c.clone())
        .collect();

    let leader_feeds = |comp: &BTreeSet<usize>| {
        g.edges()
            .iter()
            .any(|e| g.is_leader(e.from) && comp.contains(&e.to))
    };
    let (ltf_connected, ltf_reason) = if target_only_independent.is_empty() {
        (false, Some("no-target-only-iscc".to_string()))
    } else if target_only_independent.iter().any(leader_feeds) {
        (true, None)
    } else {
        (false, Some("no-leader-edge".to_string()))
    };

    SccReport {
        components,
        independent,
        follower_components,
        follower_independent,
        target_only_independent,
        ltf_connected,
        ltf_reason,
    }
}

/// Outcome of the connectivity necessity test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NecessityVerdict {
    /// A target-only independent follower component receives no leader
    /// edge; its targets are unreachable and the rank is certifiably
    /// deficient.
    NotTargetControllable,
    /// The test cannot decide (it is a necessary condition only).
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct ConnectivityCheck {
    /// Whether a target-only independent follower component exists.
    pub precondition_holds: bool,
    pub ltf_connected: bool,
    pub verdict: NecessityVerdict,
}

/// The necessity verdict read straight off an SCC report, without rank
/// verification.
pub fn connectivity_verdict_unverified(scc: &SccReport) -> ConnectivityCheck {
    let precondition_holds = !scc.target_only_independent.is_empty();
    let verdict = if precondition_holds && !scc.ltf_connected {
        NecessityVerdict::NotTargetControllable
    } else {
        NecessityVerdict::Inconclusive
    };
    ConnectivityCheck {
        precondition_holds,
        ltf_connected: scc.ltf_connected,
        verdict,
    }
}

/// Evaluates the necessity test on the graph. Every negative verdict is
/// confirmed against the exact rank of the system it applies to (the
/// first-order system, or the Kronecker system when `spec` is given); a
/// contradiction aborts with [`Error::CrossCheck`].
pub fn connectivity_check(
    g: &Graph,
    spec: Option<&GeneralLinearSpec>,
) -> Result<ConnectivityCheck> {
    let scc = scc_analyze(g);
    let precondition_holds = !scc.target_only_independent.is_empty();
    let verdict = if precondition_holds && !scc.ltf_connected {
        let triple = match spec {
            Some(s) => general_linear_triple(g, s),
            None => g.system_triple(),
        };
        let rank = target_ctrb_matrix(&triple).rank();
        if rank == triple.p() {
            return Err(Error::CrossCheck(format!(
                "connectivity test certifies failure but rank W = {rank} is full"
            )));
        }
        NecessityVerdict::NotTargetControllable
    } else {
        NecessityVerdict::Inconclusive
    };
    Ok(ConnectivityCheck {
        precondition_holds,
        ltf_connected: scc.ltf_connected,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Complex;
    use num_traits::Zero;

    fn seven_node() -> Graph {
        Graph::parse(include_str!("../fixtures/seven_node.graph")).unwrap()
    }

    fn ten_node() -> Graph {
        Graph::parse(include_str!("../fixtures/ten_node_ltf.graph")).unwrap()
    }

    fn ten_node_cut() -> Graph {
        let g = ten_node();
        let edges = g
            .edges()
            .iter()
            .filter(|e| !(e.from == 0 && e.to == 3))
            .cloned()
            .collect();
        Graph::new(10, edges, g.leaders().to_vec(), g.targets().to_vec()).unwrap()
    }

    #[test]
    fn lift_order_one_is_identity() {
        let t = seven_node().system_triple();
        assert_eq!(lift_high_order(&t, 1), t);
    }

    #[test]
    fn lift_order_two_block_layout() {
        let t = seven_node().system_triple();
        let lifted = lift_high_order(&t, 2);
        assert_eq!(lifted.n(), 14);
        assert!(lifted.a().block(0, 0, 7, 7).is_zero());
        assert_eq!(lifted.a().block(0, 7, 7, 7), RatMatrix::identity(7));
        assert_eq!(lifted.a().block(7, 0, 7, 7), *t.a());
        assert!(lifted.a().block(7, 7, 7, 7).is_zero());
        assert!(lifted.b().block(0, 0, 7, 1).is_zero());
        assert_eq!(lifted.b().block(7, 0, 7, 1), *t.b());
        assert_eq!(lifted.h().block(0, 0, 2, 7), *t.h());
        assert!(lifted.h().block(0, 7, 2, 7).is_zero());
    }

    #[test]
    fn lift_single_agent_is_integrator_chain() {
        let g = Graph::parse("n 1\nleaders 1\ntargets 1\n").unwrap();
        let lifted = lift_high_order(&g.system_triple(), 3);
        let expected = RatMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        assert_eq!(*lifted.a(), expected);
    }

    #[test]
    fn lift_rank_checks() {
        let t = seven_node().system_triple();
        let c = lift_rank_check(&t, 2).unwrap();
        assert_eq!((c.rank_first, c.rank_lifted, c.equal), (2, 2, true));

        let g = Graph::parse("n 1\nleaders 1\ntargets 1\n").unwrap();
        let c = lift_rank_check(&g.system_triple(), 4).unwrap();
        assert_eq!((c.rank_first, c.rank_lifted), (1, 1));
    }

    #[test]
    fn lifted_w_has_interleaved_zero_blocks() {
        let t = seven_node().system_triple();
        for m_order in 2..=3 {
            let lifted = lift_high_order(&t, m_order);
            let w = target_ctrb_matrix(&lifted);
            let l = lifted.l();
            for k in 0..lifted.n() {
                let block = w.block(0, k * l, lifted.p(), l);
                if k % m_order == m_order - 1 {
                    assert_eq!(block, target_ctrb_matrix(&t).block(0, (k / m_order) * l, t.p(), l));
                } else {
                    assert!(block.is_zero(), "order {m_order}, power {k}");
                }
            }
        }
    }

    #[test]
    fn sidecar_parsing_and_validation() {
        let spec = GeneralLinearSpec::from_json(
            r#"{"sigma":2,"A":[[0,1],[0,0]],"M":[[0],[1]],"N":[[0],[1]],"K":[["1","0"]]}"#,
        )
        .unwrap();
        assert_eq!(spec.sigma, 2);
        assert_eq!(spec.k, RatMatrix::from_i64(&[&[1, 0]]));

        assert!(GeneralLinearSpec::from_json(r#"{"sigma":0}"#).is_err());
        assert!(GeneralLinearSpec::from_json(
            r#"{"sigma":1,"A":[[0.5]],"M":[[1]],"N":[[1]],"K":[[1]]}"#
        )
        .is_err());
        let fraction = GeneralLinearSpec::from_json(
            r#"{"sigma":1,"A":[["1/2"]],"M":[[1]],"N":[[1]],"K":[[1]]}"#,
        )
        .unwrap();
        assert_eq!(fraction.a_tilde, RatMatrix::from_rows(vec![vec![crate::exact::ratio(1, 2)]]).unwrap());
        // K shaped incompatibly with M.
        assert!(GeneralLinearSpec::from_json(
            r#"{"sigma":1,"A":[[0]],"M":[[1]],"N":[[1]],"K":[[1],[1]]}"#
        )
        .is_err());
    }

    #[test]
    fn scalar_agents_reduce_to_first_order() {
        let g = seven_node();
        let spec = GeneralLinearSpec::from_json(
            r#"{"sigma":1,"A":[[0]],"M":[[1]],"N":[[1]],"K":[[1]]}"#,
        )
        .unwrap();
        assert_eq!(general_linear_triple(&g, &spec), g.system_triple());
    }

    #[test]
    fn edgeless_graph_gives_block_diagonal_drift() {
        let g = Graph::parse("n 2\nleaders 1\ntargets 2\n").unwrap();
        let spec = GeneralLinearSpec::from_json(
            r#"{"sigma":2,"A":[[1,2],[3,4]],"M":[[0],[1]],"N":[[0],[1]],"K":[[1,0]]}"#,
        )
        .unwrap();
        let t = general_linear_triple(&g, &spec);
        assert_eq!(t.a().block(0, 0, 2, 2), spec.a_tilde);
        assert_eq!(t.a().block(2, 2, 2, 2), spec.a_tilde);
        assert!(t.a().block(0, 2, 2, 2).is_zero());
    }

    #[test]
    fn kronecker_assembly_matches_index_oracle() {
        let g = Graph::parse("n 2\nleaders 1\ntargets 2\nedge 1 2 1\n").unwrap();
        let spec = GeneralLinearSpec::from_json(
            r#"{"sigma":2,"A":[[0,1],[0,0]],"M":[[0],[1]],"N":[[0],[1]],"K":[[1,0]]}"#,
        )
        .unwrap();
        let t = general_linear_triple(&g, &spec);
        let l = g.laplacian();
        let mk = spec.m.mul(&spec.k);
        for i in 0..2 {
            for j in 0..2 {
                for s in 0..2 {
                    for r in 0..2 {
                        let mut want = Rat::zero();
                        if i == j {
                            want += &spec.a_tilde[(s, r)];
                        }
                        want -= &l[(i, j)] * &mk[(s, r)];
                        assert_eq!(t.a()[(i * 2 + s, j * 2 + r)], want);
                    }
                }
            }
        }
        assert_eq!(t.l(), 1);
        assert_eq!(t.p(), 2);
    }

    #[test]
    fn ten_node_components_and_ltf() {
        let scc = scc_analyze(&ten_node());
        let cycle: BTreeSet<usize> = [3, 7, 8].into_iter().collect();
        assert!(scc.follower_components.contains(&cycle));
        assert_eq!(scc.target_only_independent, vec![cycle.clone()]);
        assert!(scc.ltf_connected);
        assert!(scc.ltf_reason.is_none());
        // The cycle is one component of the full graph as well, but not
        // independent there: leader 1 feeds it.
        let idx = scc.components.iter().position(|c| *c == cycle).unwrap();
        assert!(!scc.independent[idx]);
    }

    #[test]
    fn single_node_is_independent_component() {
        let g = Graph::parse("n 1\nleaders 1\ntargets 1\n").unwrap();
        let scc = scc_analyze(&g);
        assert_eq!(scc.components.len(), 1);
        assert_eq!(scc.independent, vec![true]);
    }

    #[test]
    fn follower_cycle_without_leader_edge() {
        let g = Graph::parse("n 3\nleaders 1\ntargets 2 3\nedge 2 3 1\nedge 3 2 1\n").unwrap();
        let scc = scc_analyze(&g);
        assert_eq!(
            scc.target_only_independent,
            vec![[1, 2].into_iter().collect::<BTreeSet<_>>()]
        );
        assert!(!scc.ltf_connected);
        assert_eq!(scc.ltf_reason.as_deref(), Some("no-leader-edge"));
    }

    #[test]
    fn necessity_verdicts() {
        let intact = connectivity_check(&ten_node(), None).unwrap();
        assert!(intact.precondition_holds && intact.ltf_connected);
        assert_eq!(intact.verdict, NecessityVerdict::Inconclusive);

        let cut = connectivity_check(&ten_node_cut(), None).unwrap();
        assert!(cut.precondition_holds && !cut.ltf_connected);
        assert_eq!(cut.verdict, NecessityVerdict::NotTargetControllable);
        let w = target_ctrb_matrix(&ten_node_cut().system_triple());
        assert!(w.rank() < 4);

        let no_iscc = connectivity_check(&seven_node(), None).unwrap();
        assert!(!no_iscc.precondition_holds);
        assert_eq!(no_iscc.verdict, NecessityVerdict::Inconclusive);
    }

    #[test]
    fn necessity_verdict_for_kronecker_system() {
        let spec = GeneralLinearSpec::from_json(
            r#"{"sigma":2,"A":[[0,1],[0,0]],"M":[[0],[1]],"N":[[0],[1]],"K":[[1,0]]}"#,
        )
        .unwrap();
        let cut = connectivity_check(&ten_node_cut(), Some(&spec)).unwrap();
        assert_eq!(cut.verdict, NecessityVerdict::NotTargetControllable);
    }

    /// An isolated target-only component supports an explicit left
    /// eigenvector of the Kronecker system that annihilates the inputs.
    #[test]
    fn isolated_component_left_eigenvector() {
        let g = ten_node_cut();
        let spec = GeneralLinearSpec::from_json(
            r#"{"sigma":2,"A":[[0,1],[0,0]],"M":[[0],[1]],"N":[[0],[1]],"K":[[1,0]]}"#,
        )
        .unwrap();
        let t = general_linear_triple(&g, &spec);
        let component = [3usize, 7, 8];
        let sigma = spec.sigma;

        // Sub-block of the system matrix on the component's coordinates.
        let coords: Vec<usize> = component
            .iter()
            .flat_map(|&c| (0..sigma).map(move |s| c * sigma + s))
            .collect();
        let sub = t.a().select_rows(&coords).select_cols(&coords).to_float();
        let eigs = crate::numeric::eigenvalues(&sub).unwrap();
        let lambda = eigs[0];
        let shifted = sub.to_na().map(Complex::from)
            - nalgebra::DMatrix::identity(coords.len(), coords.len()) * lambda;
        let basis = crate::numeric::complex_nullspace(&shifted.transpose(), 1e-10).unwrap();
        assert!(!basis.is_empty());
        let small = &basis[0];

        let n_big = t.n();
        let mut theta = nalgebra::DVector::<Complex<f64>>::zeros(n_big);
        for (pos, &c) in coords.iter().enumerate() {
            theta[c] = small[pos];
        }
        let na = t.a().to_float().to_na().map(Complex::from);
        let nb = t.b().to_float().to_na().map(Complex::from);
        let resid = (theta.transpose() * &na - theta.transpose() * lambda)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let leak = (theta.transpose() * &nb)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(resid <= 1e-8, "residual {resid}");
        assert!(leak <= 1e-8, "input leak {leak}");
    }
}
