//! Reachability from the leader set and its exact matrix-side counterpart.
//!
//! Followers are layered by the number of intermediate nodes on a shortest
//! unit-weight path from the leader set: a follower first reached at BFS
//! depth `d >= 1` sits in class `d - 1`. Leaders are reachable by
//! definition and carry no class. A target is steerable only if it is
//! reachable, and that is equivalent to its row of the target
//! controllability matrix being nonzero; both sides are computed and
//! cross-asserted here.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::ctrb::target_ctrb_matrix;
use crate::graph::Graph;
use crate::{Error, Result};

/// Leader-set reachability with follower layering.
#[derive(Clone, Debug)]
pub struct ReachabilityReport {
    /// All reachable nodes, leaders included (0-based, ascending).
    pub reachable: BTreeSet<usize>,
    /// Complement of `reachable`.
    pub unreachable: BTreeSet<usize>,
    /// Class of each reachable follower: intermediate-node count of a
    /// shortest path from the leader set.
    pub class_of: BTreeMap<usize, usize>,
    /// Members of each class, indexed by class number (contiguous from 0).
    pub classes: Vec<BTreeSet<usize>>,
    /// Targets that no leader can reach.
    pub unreachable_targets: BTreeSet<usize>,
}

/// Multi-source BFS from the leader set on the unit-reweighted digraph.
pub fn analyze_reachability(g: &Graph) -> ReachabilityReport {
    let adj = g.out_neighbors();
    let mut depth: Vec<Option<usize>> = vec![None; g.node_count()];
    let mut queue = VecDeque::new();
    for &v in g.leaders() {
        depth[v] = Some(0);
        queue.push_back(v);
    }
    while let Some(u) = queue.pop_front() {
        let du = depth[u].unwrap();
        for &w in &adj[u] {
            if depth[w].is_none() {
                depth[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }

    let mut report = ReachabilityReport {
        reachable: BTreeSet::new(),
        unreachable: BTreeSet::new(),
        class_of: BTreeMap::new(),
        classes: Vec::new(),
        unreachable_targets: BTreeSet::new(),
    };
    for v in 0..g.node_count() {
        match depth[v] {
            None => {
                report.unreachable.insert(v);
            }
            Some(d) => {
                report.reachable.insert(v);
                if !g.is_leader(v) {
                    let class = d - 1;
                    report.class_of.insert(v, class);
                    if report.classes.len() <= class {
                        report.classes.resize(class + 1, BTreeSet::new());
                    }
                    report.classes[class].insert(v);
                }
            }
        }
    }
    report.unreachable_targets = g
        .targets()
        .iter()
        .copied()
        .filter(|v| report.unreachable.contains(v))
        .collect();
    report
}

/// Graph-side and matrix-side test that every target is reachable, with the
/// two answers cross-asserted.
#[derive(Clone, Debug)]
pub struct ReachableTargetCheck {
    /// Targets unreachable from the leader set (graph side).
    pub unreachable_targets: BTreeSet<usize>,
    /// Indices of exactly-zero rows of the target controllability matrix
    /// (matrix side; row `i` belongs to the `i`-th declared target).
    pub w_zero_rows: BTreeSet<usize>,
    /// `p - |unreachable targets|`, an upper bound on the dimension of the
    /// target controllable subspace.
    pub dim_upper_bound: usize,
}

/// Runs both the BFS test and the exact zero-row scan of `W` and insists
/// they identify the same target nodes. A mismatch would falsify the
/// reachability equivalence and aborts with [`Error::CrossCheck`].
pub fn reachable_target_check(g: &Graph) -> Result<ReachableTargetCheck> {
    let reach = analyze_reachability(g);
    let w = target_ctrb_matrix(&g.system_triple());
    let w_zero_rows: BTreeSet<usize> = w.zero_rows().into_iter().collect();
    let from_rows: BTreeSet<usize> = w_zero_rows.iter().map(|&i| g.targets()[i]).collect();
    if from_rows != reach.unreachable_targets {
        return Err(Error::CrossCheck(format!(
            "zero rows of W name targets {:?} but BFS finds unreachable targets {:?}",
            from_rows, reach.unreachable_targets
        )));
    }
    Ok(ReachableTargetCheck {
        dim_upper_bound: g.targets().len() - reach.unreachable_targets.len(),
        unreachable_targets: reach.unreachable_targets,
        w_zero_rows,
    })
}
