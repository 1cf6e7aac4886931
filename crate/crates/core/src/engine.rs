//! Online matching: candidate retrieval per DFS edge and parallel
//! match-tree growth.
//!
//! Candidates for a DFS edge are the union of three index lookups (stars
//! centered at either endpoint, path-code intersection), each guaranteed
//! not to drop a true match. Growth seeds one tree per candidate of the
//! first DFS edge and extends along the permutation by hash-joining on the
//! already-placed endpoint, pruning a branch on a binding conflict or a
//! failed non-DFS edge check. Branches are isolated, so seeds can grow on
//! any number of workers without changing the result set.

use std::collections::{HashMap, HashSet};
use std::sync::Mutex;
use std::time::Instant;

use crate::embedding::{Backend, EmbeddingKey};
use crate::feature::{max_anchored_paths, max_anchored_star, PathCode};
use crate::graph::{Graph, Label, OrientedEdge, VertexId};
use crate::index::{AnchorIndexes, StarFamily};
use crate::plan::{plan_query, CostStrategy, QueryPlan, StartStrategy};
use crate::{Error, Result};

/// Which index family produced a candidate pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyTag {
    S,
    SPrime,
    P,
}

/// One candidate match for a DFS edge: data vertices for the edge's source
/// and target query vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CandidatePair {
    pub for_src: VertexId,
    pub for_tgt: VertexId,
    pub family: FamilyTag,
}

/// All candidate pairs of one DFS edge, distinct by data pair, each tagged
/// with the single family that contributed it.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    /// The plan's DFS edge (query vertex ids).
    pub edge: OrientedEdge,
    pub pairs: Vec<CandidatePair>,
}

impl CandidateSet {
    pub fn family_counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for p in &self.pairs {
            match p.family {
                FamilyTag::S => c.0 += 1,
                FamilyTag::SPrime => c.1 += 1,
                FamilyTag::P => c.2 += 1,
            }
        }
        c
    }
}

/// Candidate sets in plan order, with the non-seed sets grouped by the
/// candidate vertex bound to the already-placed query endpoint.
#[derive(Debug)]
pub struct CandidateTable {
    pub sets: Vec<CandidateSet>,
    groups: Vec<HashMap<VertexId, Vec<VertexId>>>,
}

impl CandidateTable {
    /// Groups each non-seed set for the hash join, once per DFS edge.
    pub fn build(sets: Vec<CandidateSet>) -> Self {
        let groups = sets
            .iter()
            .enumerate()
            .map(|(i, set)| {
                let mut group: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
                if i > 0 {
                    for pair in &set.pairs {
                        group.entry(pair.for_src).or_default().push(pair.for_tgt);
                    }
                }
                group
            })
            .collect();
        CandidateTable { sets, groups }
    }
}

/// Complete injective bindings, indexed by query vertex id, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatchSet {
    pub bindings: Vec<Vec<VertexId>>,
}

impl MatchSet {
    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

/// Embedding-side work for one DFS edge, separated from the lookups so the
/// two stages can be timed independently.
struct EdgeProbe {
    /// Lookup in the orientation keyed by (q_i, q_j); `flipped` records
    /// whether that orientation is the reverse of the plan edge.
    flipped: bool,
    labels: (Label, Label),
    star_key: EmbeddingKey,
    star_prime_key: EmbeddingKey,
    path_codes: Vec<PathCode>,
}

fn make_probes(query: &Graph, edge: OrientedEdge, backend: &Backend) -> Result<Vec<EdgeProbe>> {
    let (a, b) = (edge.from, edge.to);
    let (la, lb) = (query.label(a), query.label(b));
    let mut orientations = Vec::with_capacity(2);
    if la < lb {
        orientations.push((a, b, false));
    } else if lb < la {
        orientations.push((b, a, true));
    } else {
        orientations.push((a, b, false));
        orientations.push((b, a, true));
    }

    let mut probes = Vec::with_capacity(orientations.len());
    for (qi, qj, flipped) in orientations {
        if let Some(bound) = backend.sigma_bound() {
            // Labels beyond the model's table cannot occur in the indexed
            // graph, so this edge has no candidates at all.
            let out_of_bound = query
                .neighbors(qi)
                .iter()
                .chain(query.neighbors(qj))
                .chain([&qi, &qj])
                .any(|&v| query.label(v).0 >= bound);
            if out_of_bound {
                continue;
            }
        }
        let o = OrientedEdge::new(qi, qj);
        let star = max_anchored_star(query, o)?;
        let star_prime = max_anchored_star(query, o.reversed())?;
        let mut path_codes = max_anchored_paths(query, o)?;
        path_codes.sort_unstable();
        path_codes.dedup();
        probes.push(EdgeProbe {
            flipped,
            labels: (query.label(qi), query.label(qj)),
            star_key: backend.key_for_star(&star)?,
            star_prime_key: backend.key_for_star(&star_prime)?,
            path_codes,
        });
    }
    Ok(probes)
}

fn probe_candidates(
    edge: OrientedEdge,
    probes: &[EdgeProbe],
    indexes: &AnchorIndexes,
) -> Result<CandidateSet> {
    let mut pairs = Vec::new();
    let mut seen: HashSet<(VertexId, VertexId)> = HashSet::new();
    let mut push = |e: OrientedEdge, flipped: bool, family: FamilyTag, out: &mut Vec<CandidatePair>| {
        let (for_src, for_tgt) = if flipped { (e.to, e.from) } else { (e.from, e.to) };
        if seen.insert((for_src, for_tgt)) {
            out.push(CandidatePair { for_src, for_tgt, family });
        }
    };

    for probe in probes {
        for &e in indexes.lookup_star(StarFamily::S, &probe.star_key, probe.labels)? {
            push(e, probe.flipped, FamilyTag::S, &mut pairs);
        }
        for &e in indexes.lookup_star(StarFamily::SPrime, &probe.star_prime_key, probe.labels)? {
            push(e, probe.flipped, FamilyTag::SPrime, &mut pairs);
        }
        // Path candidates: intersect the lookups across all maximum path
        // codes; every result is already a subset of the dense-dense edges,
        // so the first lookup seeds the intersection.
        let mut path_hits: Option<HashSet<OrientedEdge>> = None;
        for code in &probe.path_codes {
            let hits: HashSet<OrientedEdge> =
                indexes.lookup_path(code).iter().copied().collect();
            path_hits = Some(match path_hits {
                None => hits,
                Some(acc) => acc.intersection(&hits).copied().collect(),
            });
            if path_hits.as_ref().is_some_and(HashSet::is_empty) {
                break;
            }
        }
        if let Some(hits) = path_hits {
            let mut ordered: Vec<OrientedEdge> = hits.into_iter().collect();
            ordered.sort_unstable();
            for e in ordered {
                push(e, probe.flipped, FamilyTag::P, &mut pairs);
            }
        }
    }
    Ok(CandidateSet { edge, pairs })
}

/// Retrieves the candidate set of one query DFS edge. When the endpoint
/// labels tie, both query-edge orientations are probed and their results
/// unioned with the orientation folded into the pair.
pub fn get_candidates(
    edge: OrientedEdge,
    query: &Graph,
    indexes: &AnchorIndexes,
    backend: &Backend,
) -> Result<CandidateSet> {
    let probes = make_probes(query, edge, backend)?;
    probe_candidates(edge, &probes, indexes)
}

/// Grows match trees from the first DFS edge's candidates along `pi`.
///
/// `workers` caps the number of threads growing seed trees; any value
/// produces the same `MatchSet`. With the `parallel` feature disabled the
/// growth always runs on the calling thread.
pub fn match_growth(
    plan: &QueryPlan,
    table: &CandidateTable,
    data: &Graph,
    workers: usize,
) -> MatchSet {
    if table.sets.is_empty() || plan.pi.len() < 2 {
        return MatchSet::default();
    }
    let positions = plan.positions();
    // Check lists resolved to pi positions once, up front.
    let checks_by_depth: Vec<Vec<usize>> = plan
        .non_dfs_checks
        .iter()
        .map(|checks| checks.iter().map(|&q| positions[q as usize]).collect())
        .collect();
    // For each growth depth d >= 2, the pi position the joined edge hangs off.
    let src_positions: Vec<usize> =
        plan.dfs_edges.iter().map(|e| positions[e.from as usize]).collect();

    let seeds = &table.sets[0].pairs;
    let sink: Mutex<Vec<Vec<VertexId>>> = Mutex::new(Vec::new());

    let grow_seed = |seed: &CandidatePair| {
        let mut binding = vec![0 as VertexId; plan.pi.len()];
        binding[0] = seed.for_src;
        binding[1] = seed.for_tgt;
        let mut local = Vec::new();
        grow(plan, table, data, &checks_by_depth, &src_positions, &mut binding, 2, &mut local);
        if !local.is_empty() {
            let mut remapped: Vec<Vec<VertexId>> = local
                .iter()
                .map(|b| {
                    let mut by_vertex = vec![0 as VertexId; plan.pi.len()];
                    for (pos, &q) in plan.pi.iter().enumerate() {
                        by_vertex[q as usize] = b[pos];
                    }
                    by_vertex
                })
                .collect();
            sink.lock().expect("sink poisoned").append(&mut remapped);
        }
    };

    run_over_seeds(seeds, workers, grow_seed);

    let mut bindings = sink.into_inner().expect("sink poisoned");
    bindings.sort_unstable();
    bindings.dedup();
    MatchSet { bindings }
}

#[cfg(feature = "parallel")]
fn run_over_seeds<F>(seeds: &[CandidatePair], workers: usize, grow_seed: F)
where
    F: Fn(&CandidatePair) + Sync,
{
    if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("worker pool");
        pool.install(|| {
            use rayon::prelude::*;
            seeds.par_iter().for_each(grow_seed);
        });
    } else {
        seeds.iter().for_each(grow_seed);
    }
}

#[cfg(not(feature = "parallel"))]
fn run_over_seeds<F>(seeds: &[CandidatePair], _workers: usize, grow_seed: F)
where
    F: Fn(&CandidatePair) + Sync,
{
    seeds.iter().for_each(grow_seed);
}

#[allow(clippy::too_many_arguments)]
fn grow(
    plan: &QueryPlan,
    table: &CandidateTable,
    data: &Graph,
    checks_by_depth: &[Vec<usize>],
    src_positions: &[usize],
    binding: &mut Vec<VertexId>,
    depth: usize,
    out: &mut Vec<Vec<VertexId>>,
) {
    if depth == plan.pi.len() {
        out.push(binding.clone());
        return;
    }
    let edge_idx = depth - 1;
    let src_binding = binding[src_positions[edge_idx]];
    let Some(candidates) = table.groups[edge_idx].get(&src_binding) else {
        return;
    };
    'next: for &cand in candidates {
        // Case 1: permutation conflict.
        if binding[..depth].contains(&cand) {
            continue;
        }
        // Case 2: every non-DFS edge into this position must exist in G.
        for &pos in &checks_by_depth[depth] {
            if !data.adjacent(binding[pos], cand) {
                continue 'next;
            }
        }
        binding[depth] = cand;
        grow(plan, table, data, checks_by_depth, src_positions, binding, depth + 1, out);
    }
}

/// Plan selection knobs plus the growth worker count.
#[derive(Debug, Clone)]
pub struct QueryConfig {
    pub cost: CostKind,
    pub start: StartKind,
    /// Start-set size; defaults to `min(3, |V(Q)|)`.
    pub start_count: Option<usize>,
    pub seed: u64,
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostKind {
    Degree,
    LabelFrequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartKind {
    MaxDeg,
    MinLF,
    Rand,
}

impl Default for QueryConfig {
    fn default() -> Self {
        QueryConfig {
            cost: CostKind::Degree,
            start: StartKind::MaxDeg,
            start_count: None,
            seed: 0,
            workers: 8,
        }
    }
}

/// Per-stage wall-clock timings, microseconds.
#[derive(Debug, Clone, Copy, Default)]
pub struct StageTimings {
    pub plan_us: u64,
    pub embed_us: u64,
    pub candidates_us: u64,
    pub growth_us: u64,
}

impl StageTimings {
    pub fn total_us(&self) -> u64 {
        self.plan_us + self.embed_us + self.candidates_us + self.growth_us
    }
}

/// Everything one query run produces.
#[derive(Debug)]
pub struct QueryOutcome {
    pub matches: MatchSet,
    pub plan: QueryPlan,
    pub candidates: Vec<CandidateSet>,
    pub timings: StageTimings,
}

/// End-to-end matching: plan, embed, retrieve candidates, grow.
pub fn query(
    query_graph: &Graph,
    data: &Graph,
    indexes: &AnchorIndexes,
    backend: &Backend,
    cfg: &QueryConfig,
) -> Result<QueryOutcome> {
    if query_graph.vertex_count() < 2 || query_graph.edge_count() == 0 {
        return Err(Error::EdgelessQuery);
    }
    let meta = indexes.meta();
    if meta.graph_digest != data.digest() {
        return Err(Error::GraphDigestMismatch { index: meta.graph_digest, graph: data.digest() });
    }
    if meta.backend != backend.tag() {
        return Err(Error::BackendMismatch {
            key: backend.tag().name(),
            index: meta.backend.name(),
        });
    }
    if meta.model_digest != backend.model_digest() {
        return Err(Error::ModelDigestMismatch {
            key: backend.model_digest(),
            index: meta.model_digest,
        });
    }

    let t0 = Instant::now();
    let data_counts = data.label_counts();
    let cost = match cfg.cost {
        CostKind::Degree => CostStrategy::degree(),
        CostKind::LabelFrequency => CostStrategy::label_frequency(query_graph, &data_counts),
    };
    let k = cfg.start_count.unwrap_or_else(|| query_graph.vertex_count().min(3));
    let start = match cfg.start {
        StartKind::MaxDeg => StartStrategy::MaxDeg { k },
        StartKind::MinLF => StartStrategy::MinLF { k },
        StartKind::Rand => StartStrategy::Rand { k, seed: cfg.seed },
    };
    let plan = plan_query(query_graph, &cost, &start, &data_counts)?;
    let plan_us = t0.elapsed().as_micros() as u64;

    let t1 = Instant::now();
    let probes: Vec<Vec<EdgeProbe>> = plan
        .dfs_edges
        .iter()
        .map(|&e| make_probes(query_graph, e, backend))
        .collect::<Result<_>>()?;
    let embed_us = t1.elapsed().as_micros() as u64;

    let t2 = Instant::now();
    let sets: Vec<CandidateSet> = plan
        .dfs_edges
        .iter()
        .zip(&probes)
        .map(|(&e, p)| probe_candidates(e, p, indexes))
        .collect::<Result<_>>()?;
    let table = CandidateTable::build(sets);
    let candidates_us = t2.elapsed().as_micros() as u64;

    let t3 = Instant::now();
    let matches = match_growth(&plan, &table, data, cfg.workers.max(1));
    let growth_us = t3.elapsed().as_micros() as u64;

    Ok(QueryOutcome {
        matches,
        candidates: table.sets,
        plan,
        timings: StageTimings { plan_us, embed_us, candidates_us, growth_us },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{GinModel, ModelConfig};
    use crate::graph::Label;
    use crate::index::{build_indexes, IndexConfig};
    use crate::oracle::brute_force_matches;

    fn uniform(n: usize, edges: &[(VertexId, VertexId)]) -> Graph {
        Graph::from_edges(vec![Label(0); n], edges, None).unwrap()
    }

    fn k4() -> Graph {
        uniform(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    fn triangle() -> Graph {
        uniform(3, &[(0, 1), (1, 2), (0, 2)])
    }

    fn run(q: &Graph, g: &Graph, backend: &Backend) -> MatchSet {
        let idx = build_indexes(g, backend, &IndexConfig { dstar: 3, k: 1 }).unwrap();
        query(q, g, &idx, backend, &QueryConfig::default()).unwrap().matches
    }

    #[test]
    fn triangle_query_on_k4_finds_all_bindings() {
        // 4 triangles x 6 automorphic bindings.
        let out = run(&triangle(), &k4(), &Backend::Wl);
        assert_eq!(out.len(), 24);
        assert_eq!(out.bindings, brute_force_matches(&triangle(), &k4()).unwrap().bindings);
    }

    #[test]
    fn gin_backend_agrees_with_oracle() {
        let g = crate::gen::generate_graph(&crate::gen::GenSpec {
            model: crate::gen::GenModel::SmallWorldNws { ring_neighbors: 4, shortcut_prob: 0.3 },
            vertex_count: 40,
            sigma_size: 3,
            seed: 12,
        })
        .unwrap();
        let queries = crate::gen::generate_queries(
            &g,
            &crate::gen::QueryGenSpec {
                size: 5,
                count: 4,
                seed: 3,
                category: crate::gen::QueryCategory::Any,
            },
        )
        .unwrap();
        let backend = Backend::Gin(GinModel::seeded(g.sigma_size(), &ModelConfig::default()));
        let idx = build_indexes(&g, &backend, &IndexConfig { dstar: 4, k: 1 }).unwrap();
        for q in &queries {
            let got = query(q, &g, &idx, &backend, &QueryConfig::default()).unwrap();
            let want = brute_force_matches(q, &g).unwrap();
            assert_eq!(got.matches.bindings, want.bindings);
        }
    }

    #[test]
    fn worker_counts_do_not_change_results() {
        let g = crate::gen::generate_graph(&crate::gen::GenSpec {
            model: crate::gen::GenModel::ScaleFreeBa { attach: 2 },
            vertex_count: 60,
            sigma_size: 2,
            seed: 8,
        })
        .unwrap();
        let q = crate::gen::generate_queries(
            &g,
            &crate::gen::QueryGenSpec {
                size: 5,
                count: 1,
                seed: 1,
                category: crate::gen::QueryCategory::Any,
            },
        )
        .unwrap()
        .remove(0);
        let idx = build_indexes(&g, &Backend::Wl, &IndexConfig::default()).unwrap();
        let mut results = Vec::new();
        for workers in [1, 2, 8] {
            let cfg = QueryConfig { workers, ..QueryConfig::default() };
            results.push(query(&q, &g, &idx, &Backend::Wl, &cfg).unwrap().matches);
        }
        assert_eq!(results[0], results[1]);
        assert_eq!(results[1], results[2]);
    }

    #[test]
    fn empty_label_pair_gives_empty_candidates() {
        let g = Graph::from_edges(vec![Label(0), Label(0)], &[(0, 1)], Some(3)).unwrap();
        let q = Graph::from_edges(vec![Label(1), Label(2)], &[(0, 1)], Some(3)).unwrap();
        let idx = build_indexes(&g, &Backend::Wl, &IndexConfig::default()).unwrap();
        let set = get_candidates(OrientedEdge::new(0, 1), &q, &idx, &Backend::Wl).unwrap();
        assert!(set.pairs.is_empty());
    }

    #[test]
    fn out_of_alphabet_query_labels_yield_empty_results() {
        let g = Graph::from_edges(vec![Label(0), Label(1)], &[(0, 1)], None).unwrap();
        let backend = Backend::Gin(GinModel::seeded(g.sigma_size(), &ModelConfig::default()));
        let idx = build_indexes(&g, &backend, &IndexConfig::default()).unwrap();
        let q = Graph::from_edges(vec![Label(0), Label(9)], &[(0, 1)], None).unwrap();
        let out = query(&q, &g, &idx, &backend, &QueryConfig::default()).unwrap();
        assert!(out.matches.is_empty());
    }

    #[test]
    fn single_vertex_queries_are_rejected() {
        let g = triangle();
        let idx = build_indexes(&g, &Backend::Wl, &IndexConfig::default()).unwrap();
        let q = Graph::from_edges(vec![Label(0)], &[], None).unwrap();
        assert!(matches!(
            query(&q, &g, &idx, &Backend::Wl, &QueryConfig::default()),
            Err(Error::EdgelessQuery)
        ));
    }

    #[test]
    fn stale_indexes_are_refused() {
        let g = triangle();
        let other = k4();
        let idx = build_indexes(&other, &Backend::Wl, &IndexConfig::default()).unwrap();
        assert!(matches!(
            query(&triangle(), &g, &idx, &Backend::Wl, &QueryConfig::default()),
            Err(Error::GraphDigestMismatch { .. })
        ));
    }

    #[test]
    fn query_isomorphic_to_data_yields_automorphisms() {
        let g = Graph::from_edges(
            vec![Label(0), Label(0), Label(1), Label(1)],
            &[(0, 1), (1, 2), (2, 3), (3, 0)],
            None,
        )
        .unwrap();
        let out = run(&g.clone(), &g, &Backend::Wl);
        let want = brute_force_matches(&g, &g).unwrap();
        assert_eq!(out.bindings, want.bindings);
        // C4 with opposite equal labels: the automorphism group has order 4.
        assert_eq!(out.len(), 4);
    }

    #[test]
    fn family_partitions_are_disjoint_within_a_set() {
        let g = crate::gen::generate_graph(&crate::gen::GenSpec {
            model: crate::gen::GenModel::ScaleFreeBa { attach: 3 },
            vertex_count: 50,
            sigma_size: 2,
            seed: 4,
        })
        .unwrap();
        let idx = build_indexes(&g, &Backend::Wl, &IndexConfig { dstar: 3, k: 1 }).unwrap();
        let q = crate::gen::generate_queries(
            &g,
            &crate::gen::QueryGenSpec {
                size: 4,
                count: 3,
                seed: 9,
                category: crate::gen::QueryCategory::Any,
            },
        )
        .unwrap();
        for qg in &q {
            for (u, v) in qg.edges() {
                let set =
                    get_candidates(OrientedEdge::new(u, v), qg, &idx, &Backend::Wl).unwrap();
                let mut seen = HashSet::new();
                for p in &set.pairs {
                    assert!(seen.insert((p.for_src, p.for_tgt)), "duplicate pair in {set:?}");
                }
            }
        }
    }
}
