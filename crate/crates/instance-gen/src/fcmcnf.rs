use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use milp_core::{MilpInstance, RowSense, SparseRow, VarType};

use crate::config::FcmcnfParams;
use crate::graph::{derive_seed, gen_er_graph, ErGraph};

#[derive(Debug, Error)]
pub enum FcmcnfError {
    #[error("no viable graph after {0} attempts (missing paths or overloaded arcs)")]
    RetriesExhausted(usize),
}

/// One commodity: a unit of demand to route from `source` to `sink`.
#[derive(Clone, Copy, Debug)]
pub struct Commodity {
    pub source: usize,
    pub sink: usize,
}

/// Fixed-charge multicommodity network flow over a bidirected random graph.
///
/// Variables: one continuous flow per (commodity, arc) plus one binary
/// open/closed indicator per arc. Constraints: per-commodity flow
/// conservation at every node and a per-arc capacity row coupling flows to
/// the indicator. Routing costs and fixed charges are uniform integers.
pub fn gen_fcmcnf(n: usize, seed: u64, p: f64, params: &FcmcnfParams) -> Result<MilpInstance, FcmcnfError> {
    assert!(n >= 2);
    let m_commodities = (params.commodity_factor * n as f64).ceil() as usize;

    for attempt in 0..params.max_retries {
        let attempt_seed = derive_seed(seed, 0x0F00 + attempt as u64);
        let graph = gen_er_graph(n, p, derive_seed(attempt_seed, 1));
        if graph.edges.is_empty() {
            continue;
        }
        if params
            .max_edges
            .is_some_and(|cap| graph.num_edges() > cap)
        {
            continue;
        }
        let arcs = bidirect(&graph);
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(attempt_seed, 2));

        let commodities: Vec<Commodity> = (0..m_commodities)
            .map(|_| {
                let source = rng.random_range(0..n);
                let mut sink = rng.random_range(0..n - 1);
                if sink >= source {
                    sink += 1;
                }
                Commodity { source, sink }
            })
            .collect();

        // Every commodity needs a directed path; since arcs come in both
        // directions this is connectivity of the underlying graph.
        let adjacency = adjacency_list(n, &arcs);
        if !commodities
            .iter()
            .all(|c| path_exists(&adjacency, c.source, c.sink))
        {
            continue;
        }

        let cap_lo = ((params.capacity_frac.0 * m_commodities as f64).ceil() as u64).max(1);
        let cap_hi = ((params.capacity_frac.1 * m_commodities as f64).ceil() as u64).max(cap_lo);
        let capacities: Vec<u64> = (0..arcs.len())
            .map(|_| rng.random_range(cap_lo..=cap_hi))
            .collect();

        // Cheap viability check: hop-count shortest paths must not overload
        // any arc. (A sufficient condition for feasibility, not necessary.)
        if !routable(&adjacency, &arcs, &commodities, &capacities) {
            continue;
        }

        let routing: Vec<Vec<u64>> = (0..m_commodities)
            .map(|_| {
                (0..arcs.len())
                    .map(|_| rng.random_range(params.routing_cost.0..=params.routing_cost.1))
                    .collect()
            })
            .collect();
        let fixed: Vec<u64> = (0..arcs.len())
            .map(|_| rng.random_range(params.fixed_charge.0..=params.fixed_charge.1))
            .collect();

        let name = format!("fcmcnf_n{n}_s{seed}");
        return Ok(build_fcmcnf(
            name,
            n,
            &arcs,
            &commodities,
            &routing,
            &fixed,
            &capacities,
        ));
    }
    Err(FcmcnfError::RetriesExhausted(params.max_retries))
}

/// Assembles the MILP from explicit network data. Exposed so tests can build
/// tiny hand-crafted networks with known optima.
pub fn build_fcmcnf(
    name: String,
    n: usize,
    arcs: &[(usize, usize)],
    commodities: &[Commodity],
    routing: &[Vec<u64>],
    fixed: &[u64],
    capacities: &[u64],
) -> MilpInstance {
    let num_arcs = arcs.len();
    let m = commodities.len();
    // Flow variable of commodity k on arc a: k * num_arcs + a.
    // Arc-open binary y_a: m * num_arcs + a.
    let num_vars = m * num_arcs + num_arcs;
    let flow = |k: usize, a: usize| k * num_arcs + a;
    let open = |a: usize| m * num_arcs + a;

    let mut objective = vec![0.0; num_vars];
    for (k, costs) in routing.iter().enumerate() {
        for (a, &c) in costs.iter().enumerate() {
            objective[flow(k, a)] = c as f64;
        }
    }
    for (a, &f) in fixed.iter().enumerate() {
        objective[open(a)] = f as f64;
    }

    let mut rows = Vec::new();
    let mut senses = Vec::new();
    let mut rhs = Vec::new();
    // Flow conservation: out - in = +1 at source, -1 at sink, 0 elsewhere.
    for (k, com) in commodities.iter().enumerate() {
        for v in 0..n {
            let mut entries = Vec::new();
            for (a, &(from, to)) in arcs.iter().enumerate() {
                if from == v {
                    entries.push((flow(k, a), 1.0));
                } else if to == v {
                    entries.push((flow(k, a), -1.0));
                }
            }
            if entries.is_empty() {
                continue; // isolated node: no flow terms, demand must be zero
            }
            let d = if v == com.source {
                1.0
            } else if v == com.sink {
                -1.0
            } else {
                0.0
            };
            rows.push(SparseRow::new(entries));
            senses.push(RowSense::Eq);
            rhs.push(d);
        }
    }
    // Capacity coupling: sum_k x_ka - u_a * y_a <= 0.
    for (a, &u) in capacities.iter().enumerate() {
        let mut entries: Vec<(usize, f64)> = (0..m).map(|k| (flow(k, a), 1.0)).collect();
        entries.push((open(a), -(u as f64)));
        rows.push(SparseRow::new(entries));
        senses.push(RowSense::Le);
        rhs.push(0.0);
    }

    let mut lower = vec![0.0; num_vars];
    let mut upper = vec![1.0; num_vars];
    let mut vtypes = vec![VarType::Continuous; num_vars];
    for a in 0..num_arcs {
        vtypes[open(a)] = VarType::Binary;
    }
    // Unit demands cap any acyclic flow at 1; tightening the flow bounds this
    // way does not change the optimum.
    lower.truncate(num_vars);
    upper.truncate(num_vars);

    MilpInstance::new(
        name, num_vars, objective, rows, senses, rhs, lower, upper, vtypes,
    )
    .expect("generator produces valid instances")
}

fn bidirect(graph: &ErGraph) -> Vec<(usize, usize)> {
    let mut arcs = Vec::with_capacity(graph.edges.len() * 2);
    for &(u, v) in &graph.edges {
        arcs.push((u, v));
        arcs.push((v, u));
    }
    arcs
}

fn adjacency_list(n: usize, arcs: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); n];
    for (a, &(from, to)) in arcs.iter().enumerate() {
        adj[from].push((to, a));
    }
    adj
}

fn path_exists(adj: &[Vec<(usize, usize)>], s: usize, t: usize) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut queue = std::collections::VecDeque::from([s]);
    seen[s] = true;
    while let Some(v) = queue.pop_front() {
        if v == t {
            return true;
        }
        for &(w, _) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

/// Routes every commodity along a hop-count shortest path and checks arc
/// loads against capacities.
fn routable(
    adj: &[Vec<(usize, usize)>],
    arcs: &[(usize, usize)],
    commodities: &[Commodity],
    capacities: &[u64],
) -> bool {
    let mut load = vec![0u64; arcs.len()];
    for com in commodities {
        let Some(path) = bfs_path(adj, com.source, com.sink) else {
            return false;
        };
        for a in path {
            load[a] += 1;
            if load[a] > capacities[a] {
                return false;
            }
        }
    }
    true
}

fn bfs_path(adj: &[Vec<(usize, usize)>], s: usize, t: usize) -> Option<Vec<usize>> {
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; adj.len()];
    let mut seen = vec![false; adj.len()];
    let mut queue = std::collections::VecDeque::from([s]);
    seen[s] = true;
    while let Some(v) = queue.pop_front() {
        if v == t {
            let mut path = Vec::new();
            let mut cur = t;
            while cur != s {
                let (p, a) = prev[cur].unwrap();
                path.push(a);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for &(w, a) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((v, a));
                queue.push_back(w);
            }
        }
    }
    None
}
