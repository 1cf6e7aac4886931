//! Seeded graph and query workload generators.
//!
//! Constructions are spelled out here rather than imported so that a given
//! seed produces the same graph on every platform and toolchain: a
//! configuration-model random regular graph, a Newman-Watts-Strogatz small
//! world (ring plus random shortcuts, no rewiring), and preferential
//! attachment seeded from a single edge. Queries are induced subgraphs over
//! the distinct vertices collected by a seeded random walk.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, Label, VertexId};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum GenModel {
    /// Every vertex gets exactly this degree.
    RandomRegular { degree: usize },
    /// Ring lattice joining each vertex to its `ring_neighbors` nearest
    /// neighbors, plus one random shortcut per ring edge with the given
    /// probability.
    SmallWorldNws { ring_neighbors: usize, shortcut_prob: f64 },
    /// Single-edge seed; each later vertex attaches this many edges to
    /// existing vertices, picked proportionally to degree.
    ScaleFreeBa { attach: usize },
}

#[derive(Debug, Clone)]
pub struct GenSpec {
    pub model: GenModel,
    pub vertex_count: usize,
    pub sigma_size: u32,
    pub seed: u64,
}

/// Deterministically generates the structure, then draws vertex labels
/// uniformly from the alphabet.
pub fn generate_graph(spec: &GenSpec) -> Result<Graph> {
    if spec.sigma_size == 0 {
        return Err(Error::InfeasibleGenSpec("label alphabet must be non-empty".into()));
    }
    let n = spec.vertex_count;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let edges = match spec.model {
        GenModel::RandomRegular { degree } => random_regular_edges(n, degree, &mut rng)?,
        GenModel::SmallWorldNws { ring_neighbors, shortcut_prob } => {
            small_world_edges(n, ring_neighbors, shortcut_prob, &mut rng)?
        }
        GenModel::ScaleFreeBa { attach } => preferential_edges(n, attach, &mut rng)?,
    };
    let labels: Vec<Label> =
        (0..n).map(|_| Label(rng.random_range(0..spec.sigma_size))).collect();
    Graph::from_edges(labels, &edges, Some(spec.sigma_size))
}

fn random_regular_edges(
    n: usize,
    degree: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(VertexId, VertexId)>> {
    if degree == 0 || degree >= n || (n * degree) % 2 != 0 {
        return Err(Error::InfeasibleGenSpec(format!(
            "no {degree}-regular graph on {n} vertices"
        )));
    }
    // Configuration model: shuffle degree-many stubs per vertex, pair them
    // up, retry the shuffle on self-loops or duplicates.
    let mut stubs: Vec<VertexId> = Vec::with_capacity(n * degree);
    for v in 0..n as VertexId {
        stubs.extend(std::iter::repeat(v).take(degree));
    }
    'attempt: for _ in 0..500 {
        stubs.shuffle(rng);
        let mut seen = std::collections::HashSet::with_capacity(stubs.len() / 2);
        let mut edges = Vec::with_capacity(stubs.len() / 2);
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || !seen.insert((u.min(v), u.max(v))) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        return Ok(edges);
    }
    Err(Error::InfeasibleGenSpec(format!(
        "pairing failed for a {degree}-regular graph on {n} vertices"
    )))
}

fn small_world_edges(
    n: usize,
    ring_neighbors: usize,
    shortcut_prob: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(VertexId, VertexId)>> {
    let half = ring_neighbors / 2;
    if half == 0 || 2 * half >= n {
        return Err(Error::InfeasibleGenSpec(format!(
            "ring with {ring_neighbors} neighbors needs more than {n} vertices"
        )));
    }
    if !(0.0..=1.0).contains(&shortcut_prob) {
        return Err(Error::InfeasibleGenSpec("shortcut probability outside [0, 1]".into()));
    }
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for i in 0..n as VertexId {
        for j in 1..=half as VertexId {
            let k = (i + j) % n as VertexId;
            if seen.insert((i.min(k), i.max(k))) {
                edges.push((i, k));
            }
        }
    }
    let ring = edges.clone();
    for (u, _) in ring {
        if rng.random_range(0.0..1.0) >= shortcut_prob {
            continue;
        }
        for _ in 0..32 {
            let w = rng.random_range(0..n as VertexId);
            if w != u && seen.insert((u.min(w), u.max(w))) {
                edges.push((u, w));
                break;
            }
        }
    }
    Ok(edges)
}

fn preferential_edges(
    n: usize,
    attach: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(VertexId, VertexId)>> {
    if attach == 0 || n < 2 {
        return Err(Error::InfeasibleGenSpec(format!(
            "attachment {attach} on {n} vertices is not constructible"
        )));
    }
    let mut edges: Vec<(VertexId, VertexId)> = vec![(0, 1)];
    // Every edge endpoint appears once; uniform picks from this list are
    // degree-proportional.
    let mut endpoints: Vec<VertexId> = vec![0, 1];
    let mut targets = Vec::with_capacity(attach);
    for v in 2..n as VertexId {
        let want = attach.min(v as usize);
        targets.clear();
        while targets.len() < want {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((v, t));
            endpoints.push(v);
            endpoints.push(t);
        }
    }
    Ok(edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryCategory {
    Dense,
    Sparse,
    Any,
}

#[derive(Debug, Clone)]
pub struct QueryGenSpec {
    pub size: usize,
    pub count: usize,
    pub seed: u64,
    pub category: QueryCategory,
}

/// Average degree strictly above 3 marks a query as dense.
pub fn is_dense(q: &Graph) -> bool {
    2.0 * q.edge_count() as f64 / q.vertex_count() as f64 > 3.0
}

/// Random-walk query workload: each query is the induced subgraph of the
/// distinct vertices gathered by a seeded walk, renumbered in first-visit
/// order. Every emitted query is connected. The dense/sparse filter only
/// applies to sizes above 4.
pub fn generate_queries(g: &Graph, spec: &QueryGenSpec) -> Result<Vec<Graph>> {
    assert!(spec.size >= 2, "queries need at least one edge");
    if spec.size > g.vertex_count() {
        return Err(Error::WalkExhausted { requested: spec.size });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let starts: Vec<VertexId> =
        (0..g.vertex_count() as VertexId).filter(|&v| g.degree(v) > 0).collect();
    if starts.is_empty() {
        return Err(Error::WalkExhausted { requested: spec.size });
    }

    let mut queries = Vec::with_capacity(spec.count);
    let mut attempts = 0usize;
    let attempt_budget = 400 * spec.count.max(1);
    while queries.len() < spec.count {
        attempts += 1;
        if attempts > attempt_budget {
            return Err(Error::WalkExhausted { requested: spec.size });
        }
        let Some(q) = walk_query(g, spec.size, starts[rng.random_range(0..starts.len())], &mut rng)
        else {
            continue;
        };
        if spec.size > 4 {
            match spec.category {
                QueryCategory::Dense if !is_dense(&q) => continue,
                QueryCategory::Sparse if is_dense(&q) => continue,
                _ => {}
            }
        }
        queries.push(q);
    }
    Ok(queries)
}

fn walk_query(g: &Graph, size: usize, start: VertexId, rng: &mut ChaCha8Rng) -> Option<Graph> {
    let mut visited: Vec<VertexId> = vec![start];
    let mut current = start;
    for _ in 0..80 * size {
        if visited.len() == size {
            break;
        }
        let nbrs = g.neighbors(current);
        if nbrs.is_empty() {
            return None;
        }
        let next = nbrs[rng.random_range(0..nbrs.len())];
        if !visited.contains(&next) {
            visited.push(next);
        }
        current = next;
    }
    if visited.len() < size {
        return None;
    }
    Some(induced_subgraph(g, &visited))
}

/// Induced subgraph on `vertices`, renumbered by position in the slice.
pub fn induced_subgraph(g: &Graph, vertices: &[VertexId]) -> Graph {
    let labels: Vec<Label> = vertices.iter().map(|&v| g.label(v)).collect();
    let mut edges = Vec::new();
    for (i, &u) in vertices.iter().enumerate() {
        for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
            if g.adjacent(u, v) {
                edges.push((i as VertexId, j as VertexId));
            }
        }
    }
    Graph::from_edges(labels, &edges, Some(g.sigma_size())).expect("induced subgraph is simple")
}
