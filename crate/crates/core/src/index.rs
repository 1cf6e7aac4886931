//! The three offline hash indexes over anchored features.
//!
//! Every label-normalized orientation of every data edge lands in exactly
//! one family, decided by its degree class: stars centered at the low-label
//! endpoint for sparse-sparse and sparse-dense edges (`I_S`), stars
//! centered at the sparse endpoint for dense-sparse edges (`I_S'`), path
//! codes for dense-dense edges (`I_P`). Entries group edges first by
//! embedding key, then by the edge's label pair: key collisions across
//! label pairs are possible and the label filter at lookup time is
//! mandatory.
//!
//! Construction is single-owner; built or loaded indexes are immutable and
//! safe for unrestricted concurrent lookups.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::bytes::Reader;
use crate::embedding::{Backend, BackendTag, EmbeddingKey};
use crate::feature::{check_radius, enumerate_anchored_paths, enumerate_anchored_stars, PathCode};
use crate::graph::{classify_edge, normalize_edge, EdgeType, Graph, Label, OrientedEdge};
use crate::{Error, Result};

const INDEX_MAGIC: &[u8; 8] = b"GAE-IDX1";

/// Edges sharing one embedding key and one label pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexEntry {
    pub label_pair: (Label, Label),
    pub edges: Vec<OrientedEdge>,
}

/// Which star index a lookup targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarFamily {
    /// Sparse-sparse and sparse-dense edges, stars centered at `from`.
    S,
    /// Dense-sparse edges, stars centered at `to`.
    SPrime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexMeta {
    pub dstar: u32,
    pub k: u32,
    pub backend: BackendTag,
    pub model_digest: u64,
    pub graph_digest: u64,
}

/// Raw insertion counters from the build pass, before entry-level merging.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub star_insertions: u64,
    pub path_insertions: u64,
    pub sparse_sparse_edges: u64,
    pub sparse_dense_edges: u64,
    pub dense_sparse_edges: u64,
    pub dense_dense_edges: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct IndexConfig {
    pub dstar: u32,
    pub k: u32,
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig { dstar: 10, k: 1 }
    }
}

#[derive(Debug, PartialEq)]
pub struct AnchorIndexes {
    i_s: HashMap<EmbeddingKey, Vec<IndexEntry>>,
    i_s_prime: HashMap<EmbeddingKey, Vec<IndexEntry>>,
    i_p: HashMap<PathCode, Vec<OrientedEdge>>,
    meta: IndexMeta,
    stats: BuildStats,
}

/// Builds all three indexes over the data graph.
pub fn build_indexes(g: &Graph, backend: &Backend, cfg: &IndexConfig) -> Result<AnchorIndexes> {
    check_radius(cfg.k)?;
    let mut idx = AnchorIndexes {
        i_s: HashMap::new(),
        i_s_prime: HashMap::new(),
        i_p: HashMap::new(),
        meta: IndexMeta {
            dstar: cfg.dstar,
            k: cfg.k,
            backend: backend.tag(),
            model_digest: backend.model_digest(),
            graph_digest: g.digest(),
        },
        stats: BuildStats::default(),
    };

    for (u, v) in g.edges() {
        for o in normalize_edge(g, u, v)? {
            let pair = (g.label(o.from), g.label(o.to));
            match classify_edge(g, o, cfg.dstar) {
                t @ (EdgeType::SparseSparse | EdgeType::SparseDense) => {
                    if t == EdgeType::SparseSparse {
                        idx.stats.sparse_sparse_edges += 1;
                    } else {
                        idx.stats.sparse_dense_edges += 1;
                    }
                    for star in enumerate_anchored_stars(g, o)? {
                        let key = backend.key_for_star(&star)?;
                        push_star(&mut idx.i_s, key, pair, o);
                        idx.stats.star_insertions += 1;
                    }
                }
                EdgeType::DenseSparse => {
                    idx.stats.dense_sparse_edges += 1;
                    // Stars centered at the sparse endpoint keep the subset
                    // count below 2^dstar; the indexed edge keeps its
                    // label-normalized orientation.
                    let centered = OrientedEdge::new(o.to, o.from);
                    for star in enumerate_anchored_stars(g, centered)? {
                        let key = backend.key_for_star(&star)?;
                        push_star(&mut idx.i_s_prime, key, pair, o);
                        idx.stats.star_insertions += 1;
                    }
                }
                EdgeType::DenseDense => {
                    idx.stats.dense_dense_edges += 1;
                    for code in enumerate_anchored_paths(g, o)? {
                        let edges = idx.i_p.entry(code).or_default();
                        if edges.last() != Some(&o) {
                            edges.push(o);
                        }
                        idx.stats.path_insertions += 1;
                    }
                }
            }
        }
    }

    idx.canonicalize();
    Ok(idx)
}

fn push_star(
    map: &mut HashMap<EmbeddingKey, Vec<IndexEntry>>,
    key: EmbeddingKey,
    pair: (Label, Label),
    edge: OrientedEdge,
) {
    let entries = map.entry(key).or_default();
    match entries.iter_mut().find(|e| e.label_pair == pair) {
        Some(entry) => {
            // Within one build pass, repeats of an edge under one
            // (key, pair) arrive back to back.
            if entry.edges.last() != Some(&edge) {
                entry.edges.push(edge);
            }
        }
        None => entries.push(IndexEntry { label_pair: pair, edges: vec![edge] }),
    }
}

impl AnchorIndexes {
    fn canonicalize(&mut self) {
        for entries in self.i_s.values_mut().chain(self.i_s_prime.values_mut()) {
            for entry in entries.iter_mut() {
                entry.edges.sort_unstable();
                entry.edges.dedup();
            }
            entries.sort_unstable_by_key(|e| e.label_pair);
        }
        for edges in self.i_p.values_mut() {
            edges.sort_unstable();
            edges.dedup();
        }
    }

    pub fn meta(&self) -> &IndexMeta {
        &self.meta
    }

    pub fn stats(&self) -> &BuildStats {
        &self.stats
    }

    pub fn star_key_count(&self, family: StarFamily) -> usize {
        match family {
            StarFamily::S => self.i_s.len(),
            StarFamily::SPrime => self.i_s_prime.len(),
        }
    }

    pub fn path_key_count(&self) -> usize {
        self.i_p.len()
    }

    fn family(&self, family: StarFamily) -> &HashMap<EmbeddingKey, Vec<IndexEntry>> {
        match family {
            StarFamily::S => &self.i_s,
            StarFamily::SPrime => &self.i_s_prime,
        }
    }

    /// Edges filed under `key` whose label pair matches; empty when either
    /// the key or the pair is absent. Refuses keys from a different backend
    /// or model than the one the index was built with.
    pub fn lookup_star(
        &self,
        family: StarFamily,
        key: &EmbeddingKey,
        pair: (Label, Label),
    ) -> Result<&[OrientedEdge]> {
        if key.backend != self.meta.backend {
            return Err(Error::BackendMismatch {
                key: key.backend.name(),
                index: self.meta.backend.name(),
            });
        }
        if key.model_digest != self.meta.model_digest {
            return Err(Error::ModelDigestMismatch {
                key: key.model_digest,
                index: self.meta.model_digest,
            });
        }
        Ok(self
            .family(family)
            .get(key)
            .and_then(|entries| entries.iter().find(|e| e.label_pair == pair))
            .map(|e| e.edges.as_slice())
            .unwrap_or(&[]))
    }

    /// Dense-dense edges having an anchored path with this code.
    pub fn lookup_path(&self, code: &PathCode) -> &[OrientedEdge] {
        self.i_p.get(code).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The distinct oriented edges present in each family, for partition
    /// checks and stats.
    pub fn family_edge_sets(
        &self,
    ) -> (Vec<OrientedEdge>, Vec<OrientedEdge>, Vec<OrientedEdge>) {
        let collect_star = |map: &HashMap<EmbeddingKey, Vec<IndexEntry>>| {
            let mut edges: Vec<OrientedEdge> =
                map.values().flatten().flat_map(|e| e.edges.iter().copied()).collect();
            edges.sort_unstable();
            edges.dedup();
            edges
        };
        let mut paths: Vec<OrientedEdge> =
            self.i_p.values().flat_map(|v| v.iter().copied()).collect();
        paths.sort_unstable();
        paths.dedup();
        (collect_star(&self.i_s), collect_star(&self.i_s_prime), paths)
    }

    /// Writes the versioned binary index file; the payload carries a
    /// trailing content checksum.
    pub fn save(&self, path: &Path) -> Result<u64> {
        let mut buf = Vec::new();
        buf.extend_from_slice(INDEX_MAGIC);
        buf.extend_from_slice(&self.meta.dstar.to_le_bytes());
        buf.extend_from_slice(&self.meta.k.to_le_bytes());
        buf.push(match self.meta.backend {
            BackendTag::Gin => 0,
            BackendTag::Wl => 1,
        });
        buf.extend_from_slice(&self.meta.model_digest.to_le_bytes());
        buf.extend_from_slice(&self.meta.graph_digest.to_le_bytes());
        for c in [
            self.stats.star_insertions,
            self.stats.path_insertions,
            self.stats.sparse_sparse_edges,
            self.stats.sparse_dense_edges,
            self.stats.dense_sparse_edges,
            self.stats.dense_dense_edges,
        ] {
            buf.extend_from_slice(&c.to_le_bytes());
        }

        for map in [&self.i_s, &self.i_s_prime] {
            let mut keys: Vec<&EmbeddingKey> = map.keys().collect();
            keys.sort_unstable();
            buf.extend_from_slice(&(keys.len() as u64).to_le_bytes());
            for key in keys {
                buf.push(key.components.len() as u8);
                for c in &key.components {
                    buf.extend_from_slice(&c.to_le_bytes());
                }
                let entries = &map[key];
                buf.extend_from_slice(&(entries.len() as u32).to_le_bytes());
                for entry in entries {
                    buf.extend_from_slice(&entry.label_pair.0 .0.to_le_bytes());
                    buf.extend_from_slice(&entry.label_pair.1 .0.to_le_bytes());
                    buf.extend_from_slice(&(entry.edges.len() as u32).to_le_bytes());
                    for e in &entry.edges {
                        buf.extend_from_slice(&e.from.to_le_bytes());
                        buf.extend_from_slice(&e.to.to_le_bytes());
                    }
                }
            }
        }

        let mut codes: Vec<&PathCode> = self.i_p.keys().collect();
        codes.sort_unstable();
        buf.extend_from_slice(&(codes.len() as u64).to_le_bytes());
        for code in codes {
            match code {
                PathCode::Pair(a, b) => {
                    buf.push(2);
                    buf.extend_from_slice(&a.0.to_le_bytes());
                    buf.extend_from_slice(&b.0.to_le_bytes());
                }
                PathCode::Triple(a, b, c) => {
                    buf.push(3);
                    buf.extend_from_slice(&a.0.to_le_bytes());
                    buf.extend_from_slice(&b.0.to_le_bytes());
                    buf.extend_from_slice(&c.0.to_le_bytes());
                }
            }
            let edges = &self.i_p[code];
            buf.extend_from_slice(&(edges.len() as u32).to_le_bytes());
            for e in edges {
                buf.extend_from_slice(&e.from.to_le_bytes());
                buf.extend_from_slice(&e.to.to_le_bytes());
            }
        }

        let checksum = payload_checksum(&buf);
        buf.extend_from_slice(&checksum.to_le_bytes());
        let mut file = std::fs::File::create(path)?;
        file.write_all(&buf)?;
        Ok(buf.len() as u64)
    }

    /// Reads and verifies an index file.
    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        if bytes.len() < 8 + 8 {
            return Err(Error::Truncated);
        }
        let (payload, tail) = bytes.split_at(bytes.len() - 8);
        let stored = u64::from_le_bytes(tail.try_into().unwrap());
        let mut r = Reader::new(payload);
        if r.take(8)? != INDEX_MAGIC {
            return Err(Error::BadMagic { expected: "GAE-IDX1" });
        }
        if payload_checksum(payload) != stored {
            return Err(Error::ChecksumMismatch);
        }

        let dstar = r.u32()?;
        let k = r.u32()?;
        let backend = match r.u8()? {
            0 => BackendTag::Gin,
            1 => BackendTag::Wl,
            _ => return Err(Error::ChecksumMismatch),
        };
        let model_digest = r.u64()?;
        let graph_digest = r.u64()?;
        let stats = BuildStats {
            star_insertions: r.u64()?,
            path_insertions: r.u64()?,
            sparse_sparse_edges: r.u64()?,
            sparse_dense_edges: r.u64()?,
            dense_sparse_edges: r.u64()?,
            dense_dense_edges: r.u64()?,
        };

        let mut star_maps = Vec::with_capacity(2);
        for _ in 0..2 {
            let key_count = r.u64()? as usize;
            let mut map = HashMap::with_capacity(key_count);
            for _ in 0..key_count {
                let comp_len = r.u8()? as usize;
                let mut components = Vec::with_capacity(comp_len);
                for _ in 0..comp_len {
                    components.push(r.i64()?);
                }
                let key = EmbeddingKey { components, backend, model_digest };
                let entry_count = r.u32()? as usize;
                let mut entries = Vec::with_capacity(entry_count);
                for _ in 0..entry_count {
                    let pair = (Label(r.u32()?), Label(r.u32()?));
                    let edge_count = r.u32()? as usize;
                    let mut edges = Vec::with_capacity(edge_count);
                    for _ in 0..edge_count {
                        edges.push(OrientedEdge::new(r.u32()?, r.u32()?));
                    }
                    entries.push(IndexEntry { label_pair: pair, edges });
                }
                map.insert(key, entries);
            }
            star_maps.push(map);
        }
        let i_s_prime = star_maps.pop().unwrap();
        let i_s = star_maps.pop().unwrap();

        let code_count = r.u64()? as usize;
        let mut i_p = HashMap::with_capacity(code_count);
        for _ in 0..code_count {
            let code = match r.u8()? {
                2 => PathCode::Pair(Label(r.u32()?), Label(r.u32()?)),
                3 => PathCode::Triple(Label(r.u32()?), Label(r.u32()?), Label(r.u32()?)),
                _ => return Err(Error::ChecksumMismatch),
            };
            let edge_count = r.u32()? as usize;
            let mut edges = Vec::with_capacity(edge_count);
            for _ in 0..edge_count {
                edges.push(OrientedEdge::new(r.u32()?, r.u32()?));
            }
            i_p.insert(code, edges);
        }
        r.expect_end()?;

        Ok(AnchorIndexes {
            i_s,
            i_s_prime,
            i_p,
            meta: IndexMeta { dstar, k, backend, model_digest, graph_digest },
            stats,
        })
    }
}

fn payload_checksum(payload: &[u8]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(payload);
    let out = hasher.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("sha256 is 32 bytes"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{GinModel, ModelConfig};
    use crate::feature::max_anchored_star;
    use crate::gen::{generate_graph, GenModel, GenSpec};

    fn wl_index(g: &Graph, dstar: u32) -> AnchorIndexes {
        build_indexes(g, &Backend::Wl, &IndexConfig { dstar, k: 1 }).unwrap()
    }

    #[test]
    fn empty_graph_builds_empty_indexes() {
        let g = Graph::from_edges(vec![], &[], None).unwrap();
        let idx = wl_index(&g, 10);
        assert_eq!(idx.star_key_count(StarFamily::S), 0);
        assert_eq!(idx.star_key_count(StarFamily::SPrime), 0);
        assert_eq!(idx.path_key_count(), 0);
    }

    #[test]
    fn isomorphic_stars_merge_into_one_entry() {
        // Two disjoint paths with identical label shape: their max stars
        // collide on one key and the entry lists both edges.
        let g = Graph::from_edges(
            vec![Label(0), Label(1), Label(2), Label(0), Label(1), Label(2)],
            &[(0, 1), (1, 2), (3, 4), (4, 5)],
            None,
        )
        .unwrap();
        let idx = wl_index(&g, 10);
        let star = max_anchored_star(&g, OrientedEdge::new(1, 2)).unwrap();
        let key = Backend::Wl.key_for_star(&star).unwrap();
        let hits = idx.lookup_star(StarFamily::S, &key, (Label(1), Label(2))).unwrap();
        assert_eq!(hits, &[OrientedEdge::new(1, 2), OrientedEdge::new(4, 5)]);
    }

    #[test]
    fn star_insertions_match_brute_recount() {
        let g = generate_graph(&GenSpec {
            model: GenModel::SmallWorldNws { ring_neighbors: 4, shortcut_prob: 0.3 },
            vertex_count: 50,
            sigma_size: 5,
            seed: 77,
        })
        .unwrap();
        let dstar = 5;
        let idx = wl_index(&g, dstar);

        let mut expected = 0u64;
        for (u, v) in g.edges() {
            for o in normalize_edge(&g, u, v).unwrap() {
                match classify_edge(&g, o, dstar) {
                    EdgeType::SparseSparse | EdgeType::SparseDense => {
                        expected += 1 << (g.degree(o.from) - 1);
                    }
                    EdgeType::DenseSparse => {
                        expected += 1 << (g.degree(o.to) - 1);
                    }
                    EdgeType::DenseDense => {}
                }
            }
        }
        assert_eq!(idx.stats().star_insertions, expected);
    }

    #[test]
    fn partition_covers_every_orientation_exactly_once() {
        let g = generate_graph(&GenSpec {
            model: GenModel::ScaleFreeBa { attach: 3 },
            vertex_count: 60,
            sigma_size: 4,
            seed: 5,
        })
        .unwrap();
        let dstar = 4;
        let idx = wl_index(&g, dstar);
        let (s, sp, p) = idx.family_edge_sets();

        let mut expected: Vec<OrientedEdge> = Vec::new();
        for (u, v) in g.edges() {
            expected.extend(normalize_edge(&g, u, v).unwrap());
        }
        expected.sort_unstable();

        let mut union: Vec<OrientedEdge> = s.iter().chain(&sp).chain(&p).copied().collect();
        union.sort_unstable();
        assert_eq!(union, expected, "families must partition the orientations");
        assert!(s.iter().all(|e| !sp.contains(e) && !p.contains(e)));
        assert!(sp.iter().all(|e| !p.contains(e)));
    }

    #[test]
    fn lookup_star_filters_by_label_pair() {
        // One embedding position shared by four anchored stars whose
        // underlying labeled graphs are isomorphic; label alignment keeps
        // only the two compatible edges.
        //   v0:A-(v1:B), v0-(v2:C)        sparse-sparse edges at v0
        //   v3:A-(v4:B), v3-(v5:C), v5 has three extra C-neighbors
        let mut edges = vec![(0, 1), (0, 2), (3, 4), (3, 5)];
        let mut labels = vec![
            Label(0), // v0: A
            Label(1), // v1: B
            Label(2), // v2: C
            Label(0), // v3: A
            Label(1), // v4: B
            Label(2), // v5: C (dense)
        ];
        for extra in 6..9u32 {
            labels.push(Label(2));
            edges.push((5, extra));
        }
        let g = Graph::from_edges(labels, &edges, None).unwrap();
        let model = GinModel::seeded(g.sigma_size(), &ModelConfig::default());
        let backend = Backend::Gin(model);
        let idx = build_indexes(&g, &backend, &IndexConfig { dstar: 3, k: 1 }).unwrap();

        // Query-side max star shaped like B - A - C, anchored on the B edge.
        let qstar = crate::feature::AnchoredStar::new(Label(0), Label(1), vec![Label(2)]);
        let key = backend.key_for_star(&qstar).unwrap();
        let hits = idx.lookup_star(StarFamily::S, &key, (Label(0), Label(1))).unwrap();
        assert_eq!(hits, &[OrientedEdge::new(0, 1), OrientedEdge::new(3, 4)]);

        // The same key under the other label pair holds the C-anchored
        // stars instead; the B-pair lookup must not see them.
        let swapped = idx.lookup_star(StarFamily::S, &key, (Label(0), Label(2))).unwrap();
        assert!(swapped.contains(&OrientedEdge::new(0, 2)));

        // Absent key.
        let other = backend
            .key_for_star(&crate::feature::AnchoredStar::new(Label(1), Label(1), vec![]))
            .unwrap();
        assert!(idx.lookup_star(StarFamily::S, &other, (Label(1), Label(1))).unwrap().is_empty());
    }

    #[test]
    fn lookup_path_intersection_scenario() {
        // Two dense-dense edges into a shared endpoint, both with an
        // anchored path coded (B, A, C); nothing else may surface under
        // that code.
        //   v5:A adj {v3:B, v8:C, extra C}; v9:A adj {v12:B, v8:C, extra C}
        //   v8:C adj {v5, v9, extra C}
        let labels = vec![
            Label(1), // 0 = v3: B
            Label(0), // 1 = v5: A
            Label(2), // 2 = v8: C
            Label(0), // 3 = v9: A
            Label(1), // 4 = v12: B
            Label(2), // 5 extra neighbor of v5
            Label(2), // 6 extra neighbor of v9
            Label(2), // 7 extra neighbor of v8
        ];
        let edges = vec![(0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (3, 6), (5, 6), (2, 7)];
        let g = Graph::from_edges(labels, &edges, None).unwrap();
        let idx = wl_index(&g, 2);
        let hits = idx.lookup_path(&PathCode::Triple(Label(1), Label(0), Label(2)));
        assert_eq!(hits, &[OrientedEdge::new(1, 2), OrientedEdge::new(3, 2)]);
        assert!(idx.lookup_path(&PathCode::Triple(Label(0), Label(0), Label(0))).is_empty());
    }

    #[test]
    fn path_key_count_stays_under_alphabet_bound() {
        for seed in 0..5 {
            let g = generate_graph(&GenSpec {
                model: GenModel::ScaleFreeBa { attach: 3 },
                vertex_count: 80,
                sigma_size: 5,
                seed,
            })
            .unwrap();
            // Small threshold so dense-dense edges actually occur.
            let idx = wl_index(&g, 2);
            assert!(idx.path_key_count() <= 150, "|sigma|^3 + |sigma|^2 for 5 labels");
        }
    }

    #[test]
    fn save_load_roundtrip_and_corruption() {
        let g = generate_graph(&GenSpec {
            model: GenModel::SmallWorldNws { ring_neighbors: 4, shortcut_prob: 0.2 },
            vertex_count: 40,
            sigma_size: 4,
            seed: 1,
        })
        .unwrap();
        let idx = wl_index(&g, 3);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("idx.bin");
        idx.save(&path).unwrap();
        let loaded = AnchorIndexes::load(&path).unwrap();
        assert_eq!(loaded, idx);

        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'Z';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(AnchorIndexes::load(&path), Err(Error::BadMagic { .. })));

        bytes[0] = b'G';
        bytes[40] ^= 0x55;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(AnchorIndexes::load(&path), Err(Error::ChecksumMismatch)));

        let len = bytes.len();
        std::fs::write(&path, &bytes[..len.saturating_sub(11)]).unwrap();
        assert!(AnchorIndexes::load(&path).is_err());
    }

    #[test]
    fn lookups_refuse_foreign_keys() {
        let g = Graph::from_edges(vec![Label(0), Label(1)], &[(0, 1)], None).unwrap();
        let idx = wl_index(&g, 10);
        let model = GinModel::seeded(2, &ModelConfig::default());
        let gin = Backend::Gin(model);
        let star = max_anchored_star(&g, OrientedEdge::new(0, 1)).unwrap();
        let key = gin.key_for_star(&star).unwrap();
        assert!(matches!(
            idx.lookup_star(StarFamily::S, &key, (Label(0), Label(1))),
            Err(Error::BackendMismatch { .. })
        ));

        let gin_idx = build_indexes(&g, &gin, &IndexConfig::default()).unwrap();
        let other = Backend::Gin(GinModel::seeded(2, &ModelConfig { seed: 99, ..ModelConfig::default() }));
        let other_key = other.key_for_star(&star).unwrap();
        assert!(matches!(
            gin_idx.lookup_star(StarFamily::S, &other_key, (Label(0), Label(1))),
            Err(Error::ModelDigestMismatch { .. })
        ));
    }
}
