//! Cost-based DFS query planning.
//!
//! A plan fixes the DFS edge order the engine joins along, the first-visit
//! vertex permutation, and the non-DFS edges that become existence checks
//! during growth. Planning runs one greedy DFS per start vertex, picking
//! the cheapest frontier edge at every expansion, and keeps the cheapest
//! plan overall. All ties break toward smaller vertex ids so identical
//! inputs give identical plans.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, OrientedEdge, VertexId};
use crate::{Error, Result};

/// Edge-cost function for the greedy DFS.
#[derive(Debug, Clone)]
pub enum CostStrategy {
    /// `-(d(q_i) + d(q_j))`: prefer high-degree endpoints.
    Degree,
    /// Sum of each endpoint's rarest 1-hop neighborhood label, counted
    /// against the data graph's global label frequencies.
    LabelFrequency { min_neighborhood_freq: Vec<i64> },
}

impl CostStrategy {
    pub fn degree() -> Self {
        CostStrategy::Degree
    }

    /// Precomputes, per query vertex, the minimum data-graph frequency over
    /// the labels of its query neighbors.
    pub fn label_frequency(query: &Graph, data_label_counts: &[u64]) -> Self {
        let mins = (0..query.vertex_count() as VertexId)
            .map(|v| {
                query
                    .neighbors(v)
                    .iter()
                    .map(|&w| {
                        data_label_counts.get(query.label(w).0 as usize).copied().unwrap_or(0)
                            as i64
                    })
                    .min()
                    .unwrap_or(0)
            })
            .collect();
        CostStrategy::LabelFrequency { min_neighborhood_freq: mins }
    }
}

/// How the set of DFS start vertices is chosen.
#[derive(Debug, Clone)]
pub enum StartStrategy {
    /// Top-k vertices by degree, ties toward smaller ids.
    MaxDeg { k: usize },
    /// Top-k vertices whose own label is rarest in the data graph.
    MinLF { k: usize },
    /// K seeded-uniform distinct vertices.
    Rand { k: usize, seed: u64 },
}

/// Query cost of one edge under the chosen strategy.
pub fn edge_cost(
    strategy: &CostStrategy,
    query: &Graph,
    q_i: VertexId,
    q_j: VertexId,
) -> Result<i64> {
    if !query.has_edge(q_i, q_j)? {
        return Err(Error::NotAnEdge(q_i, q_j));
    }
    Ok(cost_unchecked(strategy, query, q_i, q_j))
}

fn cost_unchecked(strategy: &CostStrategy, query: &Graph, q_i: VertexId, q_j: VertexId) -> i64 {
    match strategy {
        CostStrategy::Degree => -((query.degree(q_i) + query.degree(q_j)) as i64),
        CostStrategy::LabelFrequency { min_neighborhood_freq } => {
            min_neighborhood_freq[q_i as usize] + min_neighborhood_freq[q_j as usize]
        }
    }
}

/// Picks the DFS start set `M_st`.
pub fn select_start_vertices(
    strategy: &StartStrategy,
    query: &Graph,
    data_label_counts: &[u64],
) -> Result<Vec<VertexId>> {
    let n = query.vertex_count();
    let k = match strategy {
        StartStrategy::MaxDeg { k } | StartStrategy::MinLF { k } | StartStrategy::Rand { k, .. } => {
            *k
        }
    };
    if k == 0 || k > n {
        return Err(Error::StartCountOutOfRange { k, max: n });
    }
    let mut ids: Vec<VertexId> = (0..n as VertexId).collect();
    match strategy {
        StartStrategy::MaxDeg { .. } => {
            ids.sort_by_key(|&v| (std::cmp::Reverse(query.degree(v)), v));
        }
        StartStrategy::MinLF { .. } => {
            ids.sort_by_key(|&v| {
                (
                    data_label_counts.get(query.label(v).0 as usize).copied().unwrap_or(0),
                    v,
                )
            });
        }
        StartStrategy::Rand { seed, .. } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            ids.shuffle(&mut rng);
        }
    }
    ids.truncate(k);
    Ok(ids)
}

/// A DFS query plan: edge order, permutation, growth-time checks, and cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryPlan {
    /// Spanning-tree edges in traversal order; each source precedes its
    /// target in `pi`.
    pub dfs_edges: Vec<OrientedEdge>,
    /// Query vertices in first-visit order.
    pub pi: Vec<VertexId>,
    /// For each position in `pi`, the earlier query vertices joined to it
    /// by an edge off the DFS tree.
    pub non_dfs_checks: Vec<Vec<VertexId>>,
    pub total_cost: i64,
}

impl QueryPlan {
    /// Position of each query vertex in `pi`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![usize::MAX; self.pi.len()];
        for (i, &v) in self.pi.iter().enumerate() {
            pos[v as usize] = i;
        }
        pos
    }
}

impl fmt::Display for QueryPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pi: {:?}", self.pi)?;
        writeln!(
            f,
            "dfs edges: {}",
            self.dfs_edges
                .iter()
                .map(|e| format!("({},{})", e.from, e.to))
                .collect::<Vec<_>>()
                .join(" ")
        )?;
        for (j, checks) in self.non_dfs_checks.iter().enumerate() {
            if !checks.is_empty() {
                writeln!(f, "checks at pi[{j}] ({}): {:?}", self.pi[j], checks)?;
            }
        }
        write!(f, "cost: {}", self.total_cost)
    }
}

/// Greedy DFS plan from one fixed start vertex.
pub fn plan_from_start(
    query: &Graph,
    cost: &CostStrategy,
    start: VertexId,
) -> Result<QueryPlan> {
    let n = query.vertex_count();
    let mut visited = vec![false; n];
    visited[start as usize] = true;
    let mut pi = vec![start];
    let mut stack = vec![start];
    let mut dfs_edges = Vec::with_capacity(n.saturating_sub(1));
    let mut total_cost = 0i64;

    while pi.len() < n {
        let Some(&top) = stack.last() else {
            return Err(Error::DisconnectedQuery);
        };
        let next = query
            .neighbors(top)
            .iter()
            .copied()
            .filter(|&w| !visited[w as usize])
            .min_by_key(|&w| (cost_unchecked(cost, query, top, w), w));
        match next {
            Some(w) => {
                visited[w as usize] = true;
                total_cost += cost_unchecked(cost, query, top, w);
                dfs_edges.push(OrientedEdge::new(top, w));
                pi.push(w);
                stack.push(w);
            }
            None => {
                stack.pop();
            }
        }
    }

    let mut pos = vec![usize::MAX; n];
    for (i, &v) in pi.iter().enumerate() {
        pos[v as usize] = i;
    }
    let mut tree: std::collections::HashSet<(VertexId, VertexId)> = std::collections::HashSet::new();
    for e in &dfs_edges {
        tree.insert((e.from.min(e.to), e.from.max(e.to)));
    }
    let mut non_dfs_checks = vec![Vec::new(); n];
    for (u, v) in query.edges() {
        if tree.contains(&(u.min(v), u.max(v))) {
            continue;
        }
        let (early, late) = if pos[u as usize] < pos[v as usize] { (u, v) } else { (v, u) };
        non_dfs_checks[pos[late as usize]].push(early);
    }

    Ok(QueryPlan { dfs_edges, pi, non_dfs_checks, total_cost })
}

/// Plans the query: one greedy DFS per start vertex, cheapest plan wins,
/// ties broken by start order. Disconnected queries are rejected since a
/// single DFS must cover every vertex.
pub fn plan_query(
    query: &Graph,
    cost: &CostStrategy,
    start: &StartStrategy,
    data_label_counts: &[u64],
) -> Result<QueryPlan> {
    if !query.is_connected() {
        return Err(Error::DisconnectedQuery);
    }
    let starts = select_start_vertices(start, query, data_label_counts)?;
    let mut best: Option<QueryPlan> = None;
    for &s in &starts {
        let plan = plan_from_start(query, cost, s)?;
        if best.as_ref().is_none_or(|b| plan.total_cost < b.total_cost) {
            best = Some(plan);
        }
    }
    Ok(best.expect("start set is non-empty"))
}
