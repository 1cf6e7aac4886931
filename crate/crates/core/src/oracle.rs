//! Independent ground truth: brute-force match enumeration and exact star
//! isomorphism, used by the acceptance suite to check the engine.
//!
//! Deliberately shares nothing with the index/engine path: no feature
//! extraction, no embeddings, no candidate tables. Plain backtracking over
//! label-compatible vertices with adjacency and injectivity checks.

use crate::feature::AnchoredStar;
use crate::graph::{Graph, VertexId};
use crate::{Error, Result};

/// Default cap on query size; brute force beyond this is not desk-scale.
pub const DEFAULT_QUERY_BOUND: usize = 10;

/// A complete set of injective bindings `V(Q) -> V(G)`, indexed by query
/// vertex id, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub bindings: Vec<Vec<VertexId>>,
}

impl OracleResult {
    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

/// Enumerates every injective, label- and edge-preserving mapping of `query`
/// into `data` by plain backtracking.
pub fn brute_force_matches(query: &Graph, data: &Graph) -> Result<OracleResult> {
    brute_force_matches_bounded(query, data, DEFAULT_QUERY_BOUND)
}

pub fn brute_force_matches_bounded(
    query: &Graph,
    data: &Graph,
    bound: usize,
) -> Result<OracleResult> {
    let nq = query.vertex_count();
    if nq > bound {
        return Err(Error::OracleBound { size: nq, bound });
    }
    if nq == 0 {
        return Ok(OracleResult { bindings: vec![] });
    }

    // Visit query vertices in an order that keeps each new vertex adjacent
    // to an already-placed one whenever its component allows, so adjacency
    // prunes early. Falls back to any unvisited vertex for new components.
    let order = connected_order(query);
    let mut position = vec![usize::MAX; nq];
    for (pos, &q) in order.iter().enumerate() {
        position[q as usize] = pos;
    }
    // For each order position, the query neighbors placed before it.
    let earlier_neighbors: Vec<Vec<VertexId>> = order
        .iter()
        .map(|&q| {
            query
                .neighbors(q)
                .iter()
                .copied()
                .filter(|&w| position[w as usize] < position[q as usize])
                .collect()
        })
        .collect();

    let mut label_buckets: Vec<Vec<VertexId>> = vec![Vec::new(); data.sigma_size() as usize + 1];
    for v in 0..data.vertex_count() as VertexId {
        label_buckets[data.label(v).0 as usize].push(v);
    }

    let mut bindings = Vec::new();
    let mut assignment = vec![u32::MAX; nq];
    let mut used = vec![false; data.vertex_count()];
    descend(
        query,
        data,
        &order,
        &earlier_neighbors,
        &label_buckets,
        0,
        &mut assignment,
        &mut used,
        &mut bindings,
    );
    bindings.sort_unstable();
    Ok(OracleResult { bindings })
}

#[allow(clippy::too_many_arguments)]
fn descend(
    query: &Graph,
    data: &Graph,
    order: &[VertexId],
    earlier_neighbors: &[Vec<VertexId>],
    label_buckets: &[Vec<VertexId>],
    depth: usize,
    assignment: &mut [u32],
    used: &mut [bool],
    bindings: &mut Vec<Vec<VertexId>>,
) {
    if depth == order.len() {
        bindings.push(assignment.to_vec());
        return;
    }
    let q = order[depth];
    let anchors = &earlier_neighbors[depth];

    // Candidate pool: neighbors of one placed image when available,
    // otherwise the label bucket.
    let pool: &[VertexId] = if let Some(&a) = anchors.first() {
        data.neighbors(assignment[a as usize])
    } else {
        match label_buckets.get(query.label(q).0 as usize) {
            Some(bucket) => bucket,
            None => return,
        }
    };

    for &u in pool {
        if used[u as usize] || data.label(u) != query.label(q) {
            continue;
        }
        if data.degree(u) < query.degree(q) {
            continue;
        }
        if anchors
            .iter()
            .any(|&a| !data.adjacent(assignment[a as usize], u))
        {
            continue;
        }
        assignment[q as usize] = u;
        used[u as usize] = true;
        descend(query, data, order, earlier_neighbors, label_buckets, depth + 1, assignment, used, bindings);
        used[u as usize] = false;
        assignment[q as usize] = u32::MAX;
    }
}

fn connected_order(g: &Graph) -> Vec<VertexId> {
    let n = g.vertex_count();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for root in 0..n as VertexId {
        if seen[root as usize] {
            continue;
        }
        seen[root as usize] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

/// Exact isomorphism test for anchored stars: canonical triples are a
/// complete invariant for star-shaped features.
pub fn star_isomorphic(a: &AnchoredStar, b: &AnchoredStar) -> bool {
    a.center_label == b.center_label
        && a.anchor_label == b.anchor_label
        && a.leaf_labels == b.leaf_labels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Label;

    fn uniform(n: usize, edges: &[(VertexId, VertexId)]) -> Graph {
        Graph::from_edges(vec![Label(0); n], edges, None).unwrap()
    }

    fn triangle() -> Graph {
        uniform(3, &[(0, 1), (1, 2), (0, 2)])
    }

    fn k4() -> Graph {
        uniform(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    #[test]
    fn triangle_in_triangle_has_six_bindings() {
        let r = brute_force_matches(&triangle(), &triangle()).unwrap();
        assert_eq!(r.len(), 6);
    }

    #[test]
    fn absent_label_yields_empty() {
        let q = Graph::from_edges(vec![Label(5), Label(5)], &[(0, 1)], None).unwrap();
        let r = brute_force_matches(&q, &triangle()).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn triangle_in_k4_matches_permutation_oracle() {
        let q = triangle();
        let g = k4();
        let r = brute_force_matches(&q, &g).unwrap();
        assert_eq!(r.len(), 24);
        assert_eq!(r, permutation_oracle(&q, &g));
    }

    #[test]
    fn oracles_agree_on_labeled_instances() {
        // Several small labeled shapes checked against the second,
        // permutation-enumeration oracle.
        let data = Graph::from_edges(
            vec![Label(0), Label(1), Label(0), Label(1), Label(2), Label(0)],
            &[(0, 1), (1, 2), (2, 3), (3, 0), (1, 4), (4, 5), (2, 5)],
            None,
        )
        .unwrap();
        let queries = [
            Graph::from_edges(vec![Label(0), Label(1)], &[(0, 1)], None).unwrap(),
            Graph::from_edges(vec![Label(0), Label(1), Label(0)], &[(0, 1), (1, 2)], None).unwrap(),
            Graph::from_edges(
                vec![Label(0), Label(1), Label(2)],
                &[(0, 1), (1, 2), (0, 2)],
                None,
            )
            .unwrap(),
            Graph::from_edges(
                vec![Label(0), Label(1), Label(0), Label(1)],
                &[(0, 1), (1, 2), (2, 3), (3, 0)],
                None,
            )
            .unwrap(),
        ];
        for q in &queries {
            assert_eq!(brute_force_matches(q, &data).unwrap(), permutation_oracle(q, &data));
        }
    }

    #[test]
    fn bound_is_enforced() {
        let q = uniform(4, &[(0, 1), (1, 2), (2, 3)]);
        assert!(matches!(
            brute_force_matches_bounded(&q, &k4(), 3),
            Err(Error::OracleBound { size: 4, bound: 3 })
        ));
    }

    #[test]
    fn star_isomorphism_via_bijection_search() {
        let a = AnchoredStar::new(Label(0), Label(1), vec![Label(2), Label(1)]);
        let b = AnchoredStar::new(Label(0), Label(1), vec![Label(1), Label(2)]);
        let c = AnchoredStar::new(Label(1), Label(1), vec![Label(1), Label(2)]);
        assert!(star_isomorphic(&a, &b));
        assert!(!star_isomorphic(&a, &c));

        // Exhaustive cross-check against a generic bijection-search
        // isomorphism test over all stars with <= 3 leaves and 3 labels.
        let stars = all_stars(3, 3);
        for x in &stars {
            for y in &stars {
                assert_eq!(
                    star_isomorphic(x, y),
                    graphs_isomorphic(&star_to_graph(x), &star_to_graph(y), x.leaf_count() + 2),
                    "{x:?} vs {y:?}"
                );
            }
        }
    }

    /// Second oracle: enumerate all injective maps and check both
    /// isomorphism conditions literally.
    fn permutation_oracle(query: &Graph, data: &Graph) -> OracleResult {
        let nq = query.vertex_count();
        let mut bindings = Vec::new();
        let mut pick = vec![u32::MAX; nq];
        fn rec(
            query: &Graph,
            data: &Graph,
            depth: usize,
            pick: &mut Vec<u32>,
            out: &mut Vec<Vec<u32>>,
        ) {
            let nq = query.vertex_count();
            if depth == nq {
                for a in 0..nq as u32 {
                    if query.label(a) != data.label(pick[a as usize]) {
                        return;
                    }
                    for b in (a + 1)..nq as u32 {
                        if query.adjacent(a, b)
                            && !data.adjacent(pick[a as usize], pick[b as usize])
                        {
                            return;
                        }
                    }
                }
                out.push(pick.clone());
                return;
            }
            for u in 0..data.vertex_count() as u32 {
                if pick[..depth].contains(&u) {
                    continue;
                }
                pick[depth] = u;
                rec(query, data, depth + 1, pick, out);
            }
            pick[depth] = u32::MAX;
        }
        rec(query, data, 0, &mut pick, &mut bindings);
        bindings.sort_unstable();
        OracleResult { bindings }
    }

    fn star_to_graph(s: &AnchoredStar) -> Graph {
        let mut labels = vec![s.center_label, s.anchor_label];
        labels.extend(s.leaf_labels.iter().copied());
        let edges: Vec<(u32, u32)> = (1..labels.len() as u32).map(|v| (0, v)).collect();
        Graph::from_edges(labels, &edges, None).unwrap()
    }

    /// Label-aware graph isomorphism by exhaustive bijection search,
    /// restricted to equal-size graphs. The anchor designation is encoded by
    /// requiring vertex 1 (the anchor endpoint) to map to vertex 1 and the
    /// center to the center, mirroring what anchored-feature identity means.
    fn graphs_isomorphic(a: &Graph, b: &Graph, n: usize) -> bool {
        if b.vertex_count() != n || a.vertex_count() != n {
            return false;
        }
        let ids: Vec<u32> = (2..n as u32).collect();
        permutations(&ids).into_iter().any(|perm| {
            let mut map = vec![0u32; n];
            map[0] = 0;
            map[1] = 1;
            for (i, &p) in perm.iter().enumerate() {
                map[i + 2] = p;
            }
            (0..n as u32).all(|v| a.label(v) == b.label(map[v as usize]))
                && (0..n as u32).all(|u| {
                    (0..n as u32).all(|v| {
                        a.adjacent(u, v) == b.adjacent(map[u as usize], map[v as usize])
                    })
                })
        })
    }

    fn permutations(items: &[u32]) -> Vec<Vec<u32>> {
        if items.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for (i, &x) in items.iter().enumerate() {
            let mut rest = items.to_vec();
            rest.remove(i);
            for mut tail in permutations(&rest) {
                tail.insert(0, x);
                out.push(tail);
            }
        }
        out
    }

    fn all_stars(max_leaves: usize, sigma: u32) -> Vec<AnchoredStar> {
        let mut out = Vec::new();
        for center in 0..sigma {
            for anchor in 0..sigma {
                let mut stack: Vec<Vec<Label>> = vec![vec![]];
                while let Some(leaves) = stack.pop() {
                    out.push(AnchoredStar::new(Label(center), Label(anchor), leaves.clone()));
                    if leaves.len() < max_leaves {
                        let start = leaves.last().map_or(0, |l| l.0);
                        for next in start..sigma {
                            let mut more = leaves.clone();
                            more.push(Label(next));
                            stack.push(more);
                        }
                    }
                }
            }
        }
        out
    }
}
