//! Equitable partition refinement and the partition-based controllability
//! verdict.
//!
//! A partition is equitable when any two nodes of a cell receive the same
//! total in-edge weight from every cell. Refinement starts from leader
//! singletons plus one all-follower cell and repeatedly splits cells by
//! their exact weight signature until the partition is stable; the result
//! is the coarsest equitable refinement of the seed. Nodes sharing a cell
//! of that partition have identical rows in the controllability matrix, so
//! two targets in one cell rule out target controllability. When every
//! reachability class sits inside a single cell, the converse holds too
//! and the cell counts decide the verdict outright; otherwise the verdict
//! is left undetermined and the exact rank decides.

use std::collections::{BTreeMap, BTreeSet};

use crate::ctrb::target_ctrb_matrix;
use crate::exact::Rat;
use crate::graph::Graph;
use crate::reach::{analyze_reachability, ReachabilityReport};
use crate::{Error, Result};

/// Ordered list of disjoint cells covering every node exactly once.
/// Cells are kept sorted by their smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    cells: Vec<BTreeSet<usize>>,
    cell_of: Vec<usize>,
}

impl Partition {
    pub fn new(cells: Vec<BTreeSet<usize>>, n: usize) -> Result<Self> {
        if cells.iter().any(BTreeSet::is_empty) {
            return Err(Error::InvalidArgument("empty cell".into()));
        }
        let mut cells = cells;
        cells.sort_by_key(|c| *c.first().unwrap());
        let mut cell_of = vec![usize::MAX; n];
        for (idx, cell) in cells.iter().enumerate() {
            for &v in cell {
                if v >= n {
                    return Err(Error::InvalidArgument(format!(
                        "node {} out of range",
                        v + 1
                    )));
                }
                if cell_of[v] != usize::MAX {
                    return Err(Error::InvalidArgument(format!(
                        "node {} in two cells",
                        v + 1
                    )));
                }
                cell_of[v] = idx;
            }
        }
        if cell_of.contains(&usize::MAX) {
            return Err(Error::InvalidArgument("cells do not cover all nodes".into()));
        }
        Ok(Partition { cells, cell_of })
    }

    /// One cell per node.
    pub fn singletons(n: usize) -> Self {
        Partition {
            cells: (0..n).map(|v| BTreeSet::from([v])).collect(),
            cell_of: (0..n).collect(),
        }
    }

    pub fn cells(&self) -> &[BTreeSet<usize>] {
        &self.cells
    }

    pub fn cell_of(&self, v: usize) -> usize {
        self.cell_of[v]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// True iff every cell of `self` is contained in a cell of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        self.cells.iter().all(|cell| {
            let mut it = cell.iter();
            let first = other.cell_of[*it.next().unwrap()];
            it.all(|&v| other.cell_of[v] == first)
        })
    }
}

/// True iff the partition satisfies the equitable condition for `g`:
/// exact in-weight sums from every cell agree within each cell.
pub fn is_equitable(g: &Graph, p: &Partition) -> bool {
    let a = g.adjacency();
    for cell in p.cells() {
        let mut reference: Option<Vec<Rat>> = None;
        for &u in cell {
            let sums: Vec<Rat> = p
                .cells()
                .iter()
                .map(|c| c.iter().map(|&w| a[(u, w)].clone()).sum())
                .collect();
            match &reference {
                None => reference = Some(sums),
                Some(r) => {
                    if r != &sums {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Coarsest equitable refinement of `seed`: iterated splitting of cells by
/// the exact vector of in-weight sums toward the current cells, to a
/// fixpoint.
pub fn coarsest_ep(g: &Graph, seed: &Partition) -> Partition {
    let a = g.adjacency();
    let mut current = seed.clone();
    loop {
        let mut next_cells: Vec<BTreeSet<usize>> = Vec::new();
        for cell in current.cells() {
            let mut groups: BTreeMap<Vec<Rat>, BTreeSet<usize>> = BTreeMap::new();
            for &u in cell {
                let signature: Vec<Rat> = current
                    .cells()
                    .iter()
                    .map(|c| c.iter().map(|&w| a[(u, w)].clone()).sum())
                    .collect();
                groups.entry(signature).or_default().insert(u);
            }
            next_cells.extend(groups.into_values());
        }
        let next = Partition::new(next_cells, g.node_count()).expect("split of a partition");
        if next.len() == current.len() {
            debug_assert!(is_equitable(g, &next));
            return next;
        }
        current = next;
    }
}

/// Partition with leaders fixed as singleton cells and the followers split
/// by the coarsest equitable refinement relative to those singletons.
pub fn leader_partition(g: &Graph) -> Partition {
    let mut cells: Vec<BTreeSet<usize>> = g
        .leaders()
        .iter()
        .map(|&v| BTreeSet::from([v]))
        .collect();
    let followers: BTreeSet<usize> = g.followers().into_iter().collect();
    if !followers.is_empty() {
        cells.push(followers);
    }
    let seed = Partition::new(cells, g.node_count()).expect("leader/follower split");
    coarsest_ep(g, &seed)
}

/// True iff every reachability class is contained in a single cell.
pub fn class_cell_consistent(p: &Partition, r: &ReachabilityReport) -> bool {
    r.classes.iter().all(|class| {
        let mut it = class.iter();
        match it.next() {
            None => true,
            Some(&first) => {
                let c = p.cell_of(first);
                it.all(|&v| p.cell_of(v) == c)
            }
        }
    })
}

/// Partition-based target-controllability verdict.
#[derive(Clone, Debug)]
pub struct PartitionVerdict {
    /// Whether the cell-count criterion applies: every reachability class
    /// lies inside one cell.
    pub applicable: bool,
    /// Number of declared targets in each cell, aligned with the cells.
    pub cell_target_counts: Vec<usize>,
    pub has_unreachable_target: bool,
    /// Defined only when `applicable`; `None` means undetermined by this
    /// criterion (the exact rank still decides).
    pub controllable: Option<bool>,
    /// Exact `rank W`, always computed as a cross-check.
    pub rank_cross_check: usize,
}

/// Rank-free view of the partition criterion: the partition, whether the
/// criterion applies, per-cell target counts, and the reachability flag.
#[derive(Clone, Debug)]
pub struct PartitionSummary {
    pub partition: Partition,
    pub applicable: bool,
    pub cell_target_counts: Vec<usize>,
    pub has_unreachable_target: bool,
}

impl PartitionSummary {
    /// The criterion's answer when it applies: one target per cell at most
    /// and no unreachable target.
    pub fn criterion_satisfied(&self) -> bool {
        self.cell_target_counts.iter().all(|&c| c <= 1) && !self.has_unreachable_target
    }
}

pub fn partition_summary(g: &Graph) -> PartitionSummary {
    let partition = leader_partition(g);
    let reach = analyze_reachability(g);
    let applicable = class_cell_consistent(&partition, &reach);
    let mut cell_target_counts = vec![0usize; partition.len()];
    for &t in g.targets() {
        cell_target_counts[partition.cell_of(t)] += 1;
    }
    PartitionSummary {
        partition,
        applicable,
        cell_target_counts,
        has_unreachable_target: !reach.unreachable_targets.is_empty(),
    }
}

/// Evaluates the cell-count criterion and cross-asserts it against the
/// exact rank whenever it applies. Returns the partition alongside the
/// verdict.
pub fn partition_check(g: &Graph) -> Result<(Partition, PartitionVerdict)> {
    let summary = partition_summary(g);
    let rank = target_ctrb_matrix(&g.system_triple()).rank();
    let controllable = if summary.applicable {
        let by_cells = summary.criterion_satisfied();
        let by_rank = rank == g.targets().len();
        if by_cells != by_rank {
            return Err(Error::CrossCheck(format!(
                "cell criterion says controllable={by_cells} but rank W = {rank} of p = {}",
                g.targets().len()
            )));
        }
        Some(by_cells)
    } else {
        None
    };
    Ok((
        summary.partition,
        PartitionVerdict {
            applicable: summary.applicable,
            cell_target_counts: summary.cell_target_counts,
            has_unreachable_target: summary.has_unreachable_target,
            controllable,
            rank_cross_check: rank,
        },
    ))
}

/// Verified target-set suggestions: all leaders plus one representative
/// per reachability class.
#[derive(Clone, Debug)]
pub struct SuggestedTargets {
    /// Candidate target sets (0-based, ascending) that passed the exact
    /// rank verification; only verified sets are listed.
    pub sets: Vec<Vec<usize>>,
    /// Whether enumeration stopped at the cap.
    pub truncated: bool,
}

/// Enumerates candidate target sets (leaders + one node per reachability
/// class, all combinations in lexicographic order, up to `cap`) and keeps
/// those whose exact rank equals their size.
pub fn suggest_targets(g: &Graph, cap: usize) -> Result<SuggestedTargets> {
    let reach = analyze_reachability(g);
    let class_members: Vec<Vec<usize>> = reach
        .classes
        .iter()
        .map(|c| c.iter().copied().collect())
        .collect();
    let mut sets = Vec::new();
    let mut truncated = false;
    let mut choice = vec![0usize; class_members.len()];
    'enumerate: loop {
        if sets.len() == cap {
            truncated = true;
            break;
        }
        let mut candidate: BTreeSet<usize> = g.leaders().iter().copied().collect();
        for (class, &pick) in class_members.iter().zip(&choice) {
            candidate.insert(class[pick]);
        }
        let candidate: Vec<usize> = candidate.into_iter().collect();
        let trial = g.with_targets(candidate.clone())?;
        let rank = target_ctrb_matrix(&trial.system_triple()).rank();
        if rank == candidate.len() {
            sets.push(candidate);
        }
        // Odometer step over class member choices.
        for k in (0..choice.len()).rev() {
            choice[k] += 1;
            if choice[k] < class_members[k].len() {
                continue 'enumerate;
            }
            choice[k] = 0;
        }
        break;
    }
    Ok(SuggestedTargets { sets, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn six_node() -> Graph {
        Graph::parse(include_str!("../fixtures/six_node.graph")).unwrap()
    }

    fn seven_node() -> Graph {
        Graph::parse(include_str!("../fixtures/seven_node.graph")).unwrap()
    }

    fn cells_of(p: &Partition) -> Vec<Vec<usize>> {
        p.cells()
            .iter()
            .map(|c| c.iter().copied().collect())
            .collect()
    }

    /// All set partitions of `0..n`, for brute-force oracles.
    fn all_partitions(n: usize) -> Vec<Vec<BTreeSet<usize>>> {
        let mut out = Vec::new();
        fn place(v: usize, n: usize, cells: &mut Vec<BTreeSet<usize>>, out: &mut Vec<Vec<BTreeSet<usize>>>) {
            if v == n {
                out.push(cells.clone());
                return;
            }
            for i in 0..cells.len() {
                cells[i].insert(v);
                place(v + 1, n, cells, out);
                cells[i].remove(&v);
            }
            cells.push(BTreeSet::from([v]));
            place(v + 1, n, cells, out);
            cells.pop();
        }
        place(0, n, &mut Vec::new(), &mut out);
        out
    }

    /// Coarsest equitable refinement of `seed` by exhaustive search.
    fn brute_force_coarsest(g: &Graph, seed: &Partition) -> Partition {
        let n = g.node_count();
        let candidates: Vec<Partition> = all_partitions(n)
            .into_iter()
            .map(|cells| Partition::new(cells, n).unwrap())
            .filter(|p| p.refines(seed) && is_equitable(g, p))
            .collect();
        let coarsest = candidates
            .iter()
            .max_by_key(|p| n - p.len())
            .unwrap()
            .clone();
        for p in &candidates {
            assert!(
                p.refines(&coarsest),
                "coarsest equitable refinement must be unique"
            );
        }
        coarsest
    }

    #[test]
    fn singleton_seed_is_fixed() {
        let g = six_node();
        let seed = Partition::singletons(6);
        assert_eq!(coarsest_ep(&g, &seed), seed);
    }

    #[test]
    fn edgeless_graph_keeps_one_cell() {
        let g = Graph::parse("n 4\nleaders 1\ntargets 2\n").unwrap();
        let seed = Partition::new(vec![(0..4).collect()], 4).unwrap();
        assert_eq!(coarsest_ep(&g, &seed), seed);
    }

    #[test]
    fn fan_pair_splits_off() {
        let g = Graph::parse("n 4\nleaders 1\ntargets 2\nedge 1 3 1\nedge 1 4 1\n").unwrap();
        let seed = Partition::new(vec![BTreeSet::from([0]), (1..4).collect()], 4).unwrap();
        let got = coarsest_ep(&g, &seed);
        assert_eq!(cells_of(&got), vec![vec![0], vec![1], vec![2, 3]]);
        assert_eq!(got, brute_force_coarsest(&g, &seed));
    }

    #[test]
    fn six_node_leader_partition() {
        let p = leader_partition(&six_node());
        assert_eq!(cells_of(&p), vec![vec![0], vec![1], vec![2, 3], vec![4, 5]]);
    }

    #[test]
    fn all_leader_graph_gives_singletons() {
        let g = Graph::parse("n 3\nleaders 1 2 3\ntargets 1\nedge 1 2 1\n").unwrap();
        assert_eq!(leader_partition(&g), Partition::singletons(3));
    }

    #[test]
    fn star_followers_form_one_cell() {
        for k in 1..=4 {
            let mut text = format!("n {}\nleaders 1\ntargets 1\n", k + 1);
            for v in 2..=(k + 1) {
                text.push_str(&format!("edge 1 {v} 1\n"));
            }
            let g = Graph::parse(&text).unwrap();
            let p = leader_partition(&g);
            assert_eq!(cells_of(&p), vec![vec![0], (1..=k).collect::<Vec<_>>()]);
            let seed = Partition::new(
                vec![BTreeSet::from([0]), (1..=k).collect()],
                k + 1,
            )
            .unwrap();
            assert_eq!(p, brute_force_coarsest(&g, &seed));
        }
    }

    #[test]
    fn refinement_is_idempotent() {
        for g in [six_node(), seven_node()] {
            let p = leader_partition(&g);
            assert_eq!(coarsest_ep(&g, &p), p);
            assert!(is_equitable(&g, &p));
        }
    }

    #[test]
    fn leader_cells_stay_singletons() {
        for g in [six_node(), seven_node()] {
            let p = leader_partition(&g);
            for &v in g.leaders() {
                assert_eq!(p.cells()[p.cell_of(v)].len(), 1);
            }
        }
    }

    #[test]
    fn merging_follower_cells_breaks_equitability() {
        let g = six_node();
        let p = leader_partition(&g);
        let cells = p.cells();
        let follower_cells: Vec<usize> = (0..cells.len())
            .filter(|&k| cells[k].iter().all(|&v| !g.is_leader(v)))
            .collect();
        for &i in &follower_cells {
            for &j in &follower_cells {
                if j <= i {
                    continue;
                }
                let mut merged: Vec<BTreeSet<usize>> = Vec::new();
                for (k, c) in cells.iter().enumerate() {
                    if k == j {
                        continue;
                    }
                    let mut c = c.clone();
                    if k == i {
                        c.extend(cells[j].iter().copied());
                    }
                    merged.push(c);
                }
                let coarser = Partition::new(merged, g.node_count()).unwrap();
                assert!(!is_equitable(&g, &coarser), "merge {i},{j}");
            }
        }
    }

    #[test]
    fn class_consistency_on_fixtures() {
        let g = six_node();
        let p = leader_partition(&g);
        let r = analyze_reachability(&g);
        assert_eq!(r.classes[0], BTreeSet::from([2, 3]));
        assert_eq!(r.classes[1], BTreeSet::from([4, 5]));
        assert!(class_cell_consistent(&p, &r));

        let g7 = seven_node();
        let p7 = leader_partition(&g7);
        let r7 = analyze_reachability(&g7);
        assert!(!class_cell_consistent(&p7, &r7));
    }

    #[test]
    fn singleton_classes_are_always_consistent() {
        let g = Graph::parse("n 3\nleaders 1\ntargets 3\nedge 1 2 1\nedge 2 3 1\n").unwrap();
        let r = analyze_reachability(&g);
        assert!(r.classes.iter().all(|c| c.len() == 1));
        assert!(class_cell_consistent(&Partition::singletons(3), &r));
    }

    #[test]
    fn verdict_controllable_pair() {
        let (p, v) = partition_check(&six_node()).unwrap();
        assert_eq!(p.len(), 4);
        assert!(v.applicable);
        assert_eq!(v.controllable, Some(true));
        assert!(!v.has_unreachable_target);
        assert_eq!(v.rank_cross_check, 2);
    }

    #[test]
    fn verdict_two_targets_in_one_cell() {
        let g = six_node().with_targets(vec![2, 3]).unwrap();
        let (_, v) = partition_check(&g).unwrap();
        assert!(v.applicable);
        assert_eq!(v.controllable, Some(false));
        assert_eq!(v.cell_target_counts.iter().max(), Some(&2));
        assert!(v.rank_cross_check < 2);
    }

    #[test]
    fn verdict_undetermined_when_classes_straddle_cells() {
        let (_, v) = partition_check(&seven_node()).unwrap();
        assert!(!v.applicable);
        assert_eq!(v.controllable, None);
        assert_eq!(v.rank_cross_check, 2);
    }

    #[test]
    fn suggestions_on_six_node() {
        let s = suggest_targets(&six_node(), 64).unwrap();
        assert!(!s.truncated);
        assert!(s.sets.contains(&vec![0, 1, 2, 4]));
        assert_eq!(s.sets.len(), 4);
        for set in &s.sets {
            let trial = six_node().with_targets(set.clone()).unwrap();
            assert_eq!(
                target_ctrb_matrix(&trial.system_triple()).rank(),
                set.len()
            );
        }
    }

    #[test]
    fn suggestions_all_leader_graph() {
        let g = Graph::parse("n 2\nleaders 1 2\ntargets 1\nedge 1 2 1\n").unwrap();
        let s = suggest_targets(&g, 8).unwrap();
        assert_eq!(s.sets, vec![vec![0, 1]]);
    }

    #[test]
    fn suggestions_subsets_of_admissible_selections() {
        let s = suggest_targets(&seven_node(), 64).unwrap();
        let admissible = [
            vec![0, 1, 5],
            vec![0, 1, 6],
            vec![0, 2, 5],
            vec![0, 2, 6],
        ];
        assert_eq!(s.sets.len(), 4);
        for set in &s.sets {
            assert!(
                admissible.iter().any(|a| set.iter().all(|v| a.contains(v))),
                "{set:?}"
            );
        }
    }

    #[test]
    fn suggestion_cap_truncates() {
        let s = suggest_targets(&six_node(), 2).unwrap();
        assert!(s.truncated);
        assert_eq!(s.sets.len(), 2);
    }
}
