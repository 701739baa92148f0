//! Seeded random fixture generators, shared by the test corpora and the
//! `gen-random` developer command.

use rand::rngs::StdRng;
use rand::Rng;

use crate::exact::ratio;
use crate::graph::{Edge, Graph};

/// Random directed weighted graph with nonempty leader and target sets.
/// Edge density, weights, and set sizes are drawn from ranges that keep
/// the fixtures desk-sized; all randomness comes from `rng`.
pub fn random_graph(rng: &mut StdRng, max_n: usize) -> Graph {
    let n = rng.gen_range(1..=max_n.max(1));
    let density = rng.gen_range(0.10..0.45);
    let mut edges = Vec::new();
    for from in 0..n {
        for to in 0..n {
            if from != to && rng.gen_bool(density) {
                edges.push(Edge {
                    from,
                    to,
                    weight: ratio(rng.gen_range(1..=4), rng.gen_range(1..=3)),
                });
            }
        }
    }
    let leader_count = rng.gen_range(1..=n.min(3));
    let target_count = rng.gen_range(1..=n.min(3));
    let leaders = distinct_ids(rng, n, leader_count);
    let targets = distinct_ids(rng, n, target_count);
    Graph::new(n, edges, leaders, targets).expect("generator respects graph invariants")
}

fn distinct_ids(rng: &mut StdRng, n: usize, count: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in (1..pool.len()).rev() {
        pool.swap(i, rng.gen_range(0..=i));
    }
    pool.truncate(count);
    pool
}

/// A graph built cell by cell so that the leader-relative equitable
/// partition and the reachability layering line up: every layer is one
/// cell, each member of layer `d` draws equal total weight from layer
/// `d-1` (or from the leaders for `d = 0`), and optional decoration nodes
/// stay unreachable. Used to exercise the partition criterion in its
/// applicable regime.
pub struct LayeredFixture {
    pub graph: Graph,
    /// One entry per layer: the nodes of that layer (ascending).
    pub layer_cells: Vec<Vec<usize>>,
    /// Nodes with no path from any leader.
    pub unreachable: Vec<usize>,
}

pub fn random_layered_fixture(rng: &mut StdRng) -> LayeredFixture {
    let leader_count = rng.gen_range(1..=2);
    let layer_count = rng.gen_range(1..=3);
    let layer_sizes: Vec<usize> = (0..layer_count).map(|_| rng.gen_range(1..=3)).collect();
    let stray_count = if rng.gen_bool(0.4) { rng.gen_range(1..=2) } else { 0 };

    let mut next = 0;
    let leaders: Vec<usize> = (0..leader_count).map(|_| post_inc(&mut next)).collect();
    let layer_cells: Vec<Vec<usize>> = layer_sizes
        .iter()
        .map(|&s| (0..s).map(|_| post_inc(&mut next)).collect())
        .collect();
    let unreachable: Vec<usize> = (0..stray_count).map(|_| post_inc(&mut next)).collect();
    let n = next;

    let mut edges: Vec<Edge> = Vec::new();
    // Leaders feed the first layer uniformly; at least one must.
    let mut fed = false;
    for (k, &leader) in leaders.iter().enumerate() {
        if rng.gen_bool(0.7) || (!fed && k == leaders.len() - 1) {
            fed = true;
            let w = ratio(rng.gen_range(1..=3), rng.gen_range(1..=2));
            for &v in &layer_cells[0] {
                edges.push(Edge { from: leader, to: v, weight: w.clone() });
            }
        }
    }
    // Each deeper layer draws one fixed total from the previous layer,
    // through one donor per receiver.
    for d in 1..layer_cells.len() {
        let total = ratio(rng.gen_range(1..=3), rng.gen_range(1..=2));
        for &v in &layer_cells[d] {
            let donor = layer_cells[d - 1][rng.gen_range(0..layer_cells[d - 1].len())];
            edges.push(Edge { from: donor, to: v, weight: total.clone() });
        }
    }
    // Occasional backward coupling: a later layer feeds an earlier one,
    // again one donor per receiver with a shared total. This cannot
    // shorten any shortest path.
    if layer_cells.len() >= 2 && rng.gen_bool(0.3) {
        let to_layer = rng.gen_range(0..layer_cells.len() - 1);
        let from_layer = rng.gen_range(to_layer + 1..layer_cells.len());
        let total = ratio(rng.gen_range(1..=2), 1);
        for &v in &layer_cells[to_layer] {
            let donor = layer_cells[from_layer][rng.gen_range(0..layer_cells[from_layer].len())];
            if donor != v {
                edges.push(Edge { from: donor, to: v, weight: total.clone() });
            }
        }
    }
    // Followers may feed leaders freely: leader cells are singletons, so
    // no equal-sum constraint binds them.
    for &leader in &leaders {
        if rng.gen_bool(0.3) {
            let layer = &layer_cells[rng.gen_range(0..layer_cells.len())];
            let donor = layer[rng.gen_range(0..layer.len())];
            edges.push(Edge {
                from: donor,
                to: leader,
                weight: ratio(rng.gen_range(1..=3), 1),
            });
        }
    }
    // Unreachable decoration: a chain among the stray nodes only.
    for pair in unreachable.windows(2) {
        edges.push(Edge { from: pair[0], to: pair[1], weight: ratio(1, 1) });
    }

    let default_target = layer_cells[0][0];
    let graph = Graph::new(n, edges, leaders, vec![default_target])
        .expect("layered generator respects graph invariants");
    LayeredFixture {
        graph,
        layer_cells,
        unreachable,
    }
}

fn post_inc(counter: &mut usize) -> usize {
    let v = *counter;
    *counter += 1;
    v
}

/// A fixture whose follower subgraph contains one independent component
/// made of target nodes only (a directed cycle, or a single node), plus a
/// random feeder region. With `with_leader_edge` the component receives
/// exactly one edge from a leader; without it the component is unreachable
/// in its entirety.
pub fn random_isolated_component_fixture(rng: &mut StdRng, with_leader_edge: bool) -> Graph {
    let leader_count = rng.gen_range(1..=2);
    let feeder_count = rng.gen_range(0..=3);
    let cycle_size = rng.gen_range(1..=3);

    let mut next = 0;
    let leaders: Vec<usize> = (0..leader_count).map(|_| post_inc(&mut next)).collect();
    let feeders: Vec<usize> = (0..feeder_count).map(|_| post_inc(&mut next)).collect();
    let cycle: Vec<usize> = (0..cycle_size).map(|_| post_inc(&mut next)).collect();
    let n = next;

    let mut edges = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut push = |edges: &mut Vec<Edge>, from: usize, to: usize, w: (i64, i64)| {
        if from != to && seen.insert((from, to)) {
            edges.push(Edge { from, to, weight: ratio(w.0, w.1) });
        }
    };
    if cycle_size >= 2 {
        for k in 0..cycle_size {
            push(&mut edges, cycle[k], cycle[(k + 1) % cycle_size], (1, 1));
        }
    }
    if with_leader_edge {
        push(&mut edges, leaders[0], cycle[0], (rng.gen_range(1..=3), 1));
    }
    // Random feeder wiring from leaders and earlier feeders.
    for (i, &f) in feeders.iter().enumerate() {
        let sources: Vec<usize> = leaders.iter().chain(feeders[..i].iter()).copied().collect();
        let donor = sources[rng.gen_range(0..sources.len())];
        push(&mut edges, donor, f, (rng.gen_range(1..=3), rng.gen_range(1..=2)));
        if rng.gen_bool(0.3) {
            // The component may feed outward without losing independence.
            push(&mut edges, cycle[rng.gen_range(0..cycle_size)], f, (1, 1));
        }
    }
    Graph::new(n, edges, leaders, cycle).expect("component generator respects graph invariants")
}
