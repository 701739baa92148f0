//! Directed weighted graph with declared leader and target nodes, plus the
//! `(A, B, H)` realization of the consensus dynamics it induces.
//!
//! Node ids are 1-based in files and reports (matching the usual drawing
//! convention) and 0-based everywhere inside the library.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use crate::exact::{parse_rat, Rat, RatMatrix};
use crate::{Error, Result};

/// One weighted directed edge `from -> to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: Rat,
}

/// Directed weighted graph with nonempty leader and target sets.
///
/// Invariants enforced at construction: ids in range, no self-loops, no
/// duplicate `(from, to)` pairs, strictly positive weights, leaders and
/// targets nonempty and deduplicated in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    leaders: Vec<usize>,
    targets: Vec<usize>,
}

impl Graph {
    /// Validating constructor over 0-based ids.
    pub fn new(
        n: usize,
        edges: Vec<Edge>,
        leaders: Vec<usize>,
        targets: Vec<usize>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one node".into()));
        }
        if leaders.is_empty() {
            return Err(Error::InvalidGraph("leader set is empty".into()));
        }
        if targets.is_empty() {
            return Err(Error::InvalidGraph("target set is empty".into()));
        }
        for (name, ids) in [("leader", &leaders), ("target", &targets)] {
            let mut seen = BTreeSet::new();
            for &v in ids {
                if v >= n {
                    return Err(Error::InvalidGraph(format!(
                        "{name} id {} out of range 1..={n}",
                        v + 1
                    )));
                }
                if !seen.insert(v) {
                    return Err(Error::InvalidGraph(format!(
                        "duplicate {name} id {}",
                        v + 1
                    )));
                }
            }
        }
        let mut seen = BTreeSet::new();
        for e in &edges {
            if e.from >= n || e.to >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) out of range 1..={n}",
                    e.from + 1,
                    e.to + 1
                )));
            }
            if e.from == e.to {
                return Err(Error::InvalidGraph(format!(
                    "self-loop on node {}",
                    e.from + 1
                )));
            }
            if !e.weight.is_positive() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has non-positive weight {}",
                    e.from + 1,
                    e.to + 1,
                    e.weight
                )));
            }
            if !seen.insert((e.from, e.to)) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    e.from + 1,
                    e.to + 1
                )));
            }
        }
        let mut edges = edges;
        edges.sort_by_key(|e| (e.from, e.to));
        Ok(Graph {
            n,
            edges,
            leaders,
            targets,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Leader ids (0-based) in declaration order.
    pub fn leaders(&self) -> &[usize] {
        &self.leaders
    }

    /// Target ids (0-based) in declaration order.
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn is_leader(&self, v: usize) -> bool {
        self.leaders.contains(&v)
    }

    pub fn is_target(&self, v: usize) -> bool {
        self.targets.contains(&v)
    }

    /// Followers = nodes that are not leaders, ascending.
    pub fn followers(&self) -> Vec<usize> {
        (0..self.n).filter(|v| !self.is_leader(*v)).collect()
    }

    /// Same graph with a different target set.
    pub fn with_targets(&self, targets_zero_based: Vec<usize>) -> Result<Graph> {
        Graph::new(
            self.n,
            self.edges.clone(),
            self.leaders.clone(),
            targets_zero_based,
        )
    }

    /// Out-neighbor adjacency lists (`from -> [to...]`).
    pub fn out_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.from].push(e.to);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
        }
        adj
    }

    /// Weighted adjacency matrix: `a[i][j] = w` when there is an edge
    /// `j -> i`, zero otherwise (zero diagonal).
    pub fn adjacency(&self) -> RatMatrix {
        let mut a = RatMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            a[(e.to, e.from)] = e.weight.clone();
        }
        a
    }

    /// Graph Laplacian `L = D - A` with in-degree diagonal; every row sums
    /// to exactly zero.
    pub fn laplacian(&self) -> RatMatrix {
        let a = self.adjacency();
        let mut l = RatMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let mut diag = Rat::zero();
            for j in 0..self.n {
                if i != j {
                    diag += &a[(i, j)];
                    l[(i, j)] = -a[(i, j)].clone();
                }
            }
            l[(i, i)] = diag;
        }
        l
    }

    /// The `(A, B, H)` realization: `A = -L`, one input column per leader,
    /// one output row per target, in declaration order.
    pub fn system_triple(&self) -> SystemTriple {
        let a = self.laplacian().scale(&crate::exact::rat(-1));
        let mut b = RatMatrix::zeros(self.n, self.leaders.len());
        for (k, &v) in self.leaders.iter().enumerate() {
            b[(v, k)] = crate::exact::rat(1);
        }
        let mut h = RatMatrix::zeros(self.targets.len(), self.n);
        for (k, &v) in self.targets.iter().enumerate() {
            h[(k, v)] = crate::exact::rat(1);
        }
        SystemTriple::new(a, b, h)
    }

    /// Canonical text form: `n`, `leaders`, `targets` headers then edges
    /// sorted by `(from, to)`, all ids 1-based.
    pub fn to_canonical_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n {}", self.n);
        let ids = |v: &[usize]| {
            v.iter()
                .map(|x| (x + 1).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(s, "leaders {}", ids(&self.leaders));
        let _ = writeln!(s, "targets {}", ids(&self.targets));
        for e in &self.edges {
            let _ = writeln!(s, "edge {} {} {}", e.from + 1, e.to + 1, e.weight);
        }
        s
    }

    /// Parses the line-oriented graph format:
    ///
    /// ```text
    /// # comment
    /// n 7
    /// leaders 1
    /// targets 2 6
    /// edge 1 2 1
    /// edge 4 2 3/2
    /// edge 5 3 0.5
    /// ```
    ///
    /// Headers must appear in the order `n`, `leaders`, `targets`; weights
    /// are integers, `p/q` fractions, or finite decimals, converted exactly.
    pub fn parse(text: &str) -> Result<Graph> {
        let mut n: Option<usize> = None;
        let mut leaders: Option<Vec<usize>> = None;
        let mut targets: Option<Vec<usize>> = None;
        let mut edges: Vec<Edge> = Vec::new();
        let mut seen_edges: BTreeSet<(usize, usize)> = BTreeSet::new();

        let parse_id = |tok: &str, line: usize, n: usize| -> Result<usize> {
            let id: usize = tok
                .parse()
                .map_err(|_| Error::parse(line, format!("bad node id `{tok}`")))?;
            if id == 0 {
                return Err(Error::parse(line, "node ids are 1-based"));
            }
            if id > n {
                return Err(Error::parse(line, format!("node id {id} out of range 1..={n}")));
            }
            Ok(id - 1)
        };

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tokens = content.split_whitespace();
            let keyword = tokens.next().unwrap();
            let rest: Vec<&str> = tokens.collect();
            match keyword {
                "n" => {
                    if n.is_some() {
                        return Err(Error::parse(line, "repeated `n` header"));
                    }
                    let [tok] = rest.as_slice() else {
                        return Err(Error::parse(line, "expected `n <count>`"));
                    };
                    let count: usize = tok
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad node count `{tok}`")))?;
                    n = Some(count);
                }
                "leaders" => {
                    let Some(n) = n else {
                        return Err(Error::parse(line, "`leaders` before `n`"));
                    };
                    if leaders.is_some() {
                        return Err(Error::parse(line, "repeated `leaders` header"));
                    }
                    if rest.is_empty() {
                        return Err(Error::parse(line, "empty leader list"));
                    }
                    leaders = Some(
                        rest.iter()
                            .map(|t| parse_id(t, line, n))
                            .collect::<Result<_>>()?,
                    );
                }
                "targets" => {
                    if leaders.is_none() {
                        return Err(Error::parse(line, "`targets` before `leaders`"));
                    }
                    if targets.is_some() {
                        return Err(Error::parse(line, "repeated `targets` header"));
                    }
                    if rest.is_empty() {
                        return Err(Error::parse(line, "empty target list"));
                    }
                    targets = Some(
                        rest.iter()
                            .map(|t| parse_id(t, line, n.unwrap()))
                            .collect::<Result<_>>()?,
                    );
                }
                "edge" => {
                    if targets.is_none() {
                        return Err(Error::parse(line, "`edge` before the `targets` header"));
                    }
                    let [from, to, weight] = rest.as_slice() else {
                        return Err(Error::parse(line, "expected `edge <from> <to> <weight>`"));
                    };
                    let weight = parse_rat(weight)
                        .map_err(|e| Error::parse(line, format!("bad weight: {e}")))?;
                    if !weight.is_positive() {
                        return Err(Error::parse(line, format!("non-positive weight {weight}")));
                    }
                    let from = parse_id(from, line, n.unwrap())?;
                    let to = parse_id(to, line, n.unwrap())?;
                    if from == to {
                        return Err(Error::parse(line, format!("self-loop on node {}", from + 1)));
                    }
                    if !seen_edges.insert((from, to)) {
                        return Err(Error::parse(
                            line,
                            format!("duplicate edge ({}, {})", from + 1, to + 1),
                        ));
                    }
                    edges.push(Edge { from, to, weight });
                }
                other => {
                    return Err(Error::parse(line, format!("unknown keyword `{other}`")));
                }
            }
        }

        let n = n.ok_or_else(|| Error::InvalidGraph("missing `n` header".into()))?;
        let leaders = leaders.ok_or_else(|| Error::InvalidGraph("missing `leaders` header".into()))?;
        let targets = targets.ok_or_else(|| Error::InvalidGraph("missing `targets` header".into()))?;
        Graph::new(n, edges, leaders, targets)
    }
}

/// State-space realization `(A, B, H)` of a network system. For graph-built
/// systems `A = -L`, `B` selects leaders, and `H` selects targets; lifted and
/// Kronecker-assembled systems reuse the same container with general blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemTriple {
    a: RatMatrix,
    b: RatMatrix,
    h: RatMatrix,
}

impl SystemTriple {
    pub fn new(a: RatMatrix, b: RatMatrix, h: RatMatrix) -> Self {
        assert_eq!(a.nrows(), a.ncols(), "state matrix must be square");
        assert_eq!(a.nrows(), b.nrows(), "input matrix row count");
        assert_eq!(a.nrows(), h.ncols(), "output matrix column count");
        SystemTriple { a, b, h }
    }

    /// State dimension.
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Input count.
    pub fn l(&self) -> usize {
        self.b.ncols()
    }

    /// Output count.
    pub fn p(&self) -> usize {
        self.h.nrows()
    }

    pub fn a(&self) -> &RatMatrix {
        &self.a
    }

    pub fn b(&self) -> &RatMatrix {
        &self.b
    }

    pub fn h(&self) -> &RatMatrix {
        &self.h
    }
}
