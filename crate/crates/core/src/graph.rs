//! Vertex-labeled undirected graphs: construction, text-format ingestion,
//! degree/label queries, and the degree-threshold edge taxonomy.
//!
//! Graphs are immutable after construction and use a CSR-style layout: one
//! flat neighbor array plus per-vertex offsets, neighbor lists sorted
//! ascending. All read paths are safe for unrestricted concurrent use.

use std::collections::HashSet;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::{Error, ParseErrorKind, Result};

/// Vertex identifier, dense in `0..vertex_count`.
pub type VertexId = u32;

/// Vertex label code; valid codes are `0..sigma_size` of the owning graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub u32);

/// An edge with a meaningful endpoint order.
///
/// `from` is the endpoint the feature machinery treats as the query-side
/// `q_i` binding; label normalization guarantees `L(from) <= L(to)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrientedEdge {
    pub from: VertexId,
    pub to: VertexId,
}

impl OrientedEdge {
    pub fn new(from: VertexId, to: VertexId) -> Self {
        OrientedEdge { from, to }
    }

    /// The same edge with endpoints swapped.
    pub fn reversed(self) -> Self {
        OrientedEdge { from: self.to, to: self.from }
    }
}

/// Degree-threshold class of a label-normalized oriented edge.
///
/// The first component refers to `from`, the second to `to`; "sparse" means
/// degree at most the threshold `d*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeType {
    SparseSparse,
    SparseDense,
    DenseSparse,
    DenseDense,
}

/// Immutable vertex-labeled undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<Label>,
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    edge_count: usize,
    sigma_size: u32,
    digest: u64,
}

impl Graph {
    /// Builds a graph from an edge list.
    ///
    /// Rejects self-loops and duplicate edges. `sigma_size` must cover every
    /// label code; pass `None` to derive it as `max(label) + 1`.
    pub fn from_edges(
        labels: Vec<Label>,
        edges: &[(VertexId, VertexId)],
        sigma_size: Option<u32>,
    ) -> Result<Self> {
        let n = labels.len();
        let max_label = labels.iter().map(|l| l.0).max().unwrap_or(0);
        let sigma = sigma_size.unwrap_or(max_label + 1);
        if !labels.is_empty() && max_label >= sigma {
            return Err(Error::LabelOutOfRange(max_label, sigma));
        }

        let mut adjacency: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v) in edges {
            if u as usize >= n {
                return Err(Error::InvalidVertex(u));
            }
            if v as usize >= n {
                return Err(Error::InvalidVertex(v));
            }
            if u == v {
                return Err(Error::parse(0, ParseErrorKind::SelfLoop(u)));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::parse(0, ParseErrorKind::DuplicateEdge(key.0, key.1)));
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        Ok(Self::from_adjacency(labels, adjacency, edges.len(), sigma))
    }

    fn from_adjacency(
        labels: Vec<Label>,
        mut adjacency: Vec<Vec<VertexId>>,
        edge_count: usize,
        sigma_size: u32,
    ) -> Self {
        let mut offsets = Vec::with_capacity(labels.len() + 1);
        let mut neighbors = Vec::with_capacity(2 * edge_count);
        offsets.push(0);
        for adj in &mut adjacency {
            adj.sort_unstable();
            neighbors.extend_from_slice(adj);
            offsets.push(neighbors.len());
        }
        let digest = content_digest(&labels, &offsets, &neighbors);
        Graph { labels, offsets, neighbors, edge_count, sigma_size, digest }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Size of the label alphabet; every label code is strictly below it.
    pub fn sigma_size(&self) -> u32 {
        self.sigma_size
    }

    pub fn label(&self, v: VertexId) -> Label {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    /// Neighbors of `v`, sorted ascending.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.neighbors[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    /// All edges, once each, with `from < to` by id.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.vertex_count() as VertexId)
            .flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Content digest over labels and adjacency; binds persisted indexes to
    /// the exact graph they were built from.
    pub fn digest(&self) -> u64 {
        self.digest
    }

    /// Validated adjacency test; `O(log degree)` via binary search.
    pub fn has_edge(&self, u: VertexId, v: VertexId) -> Result<bool> {
        if u as usize >= self.vertex_count() {
            return Err(Error::InvalidVertex(u));
        }
        if v as usize >= self.vertex_count() {
            return Err(Error::InvalidVertex(v));
        }
        Ok(self.adjacent(u, v))
    }

    /// Adjacency test for ids already known to be valid.
    pub(crate) fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Per-label vertex counts, indexed by label code.
    pub fn label_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.sigma_size as usize];
        for l in &self.labels {
            counts[l.0 as usize] += 1;
        }
        counts
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n <= 1 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0 as VertexId];
        seen[0] = true;
        let mut visited = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    visited += 1;
                    stack.push(w);
                }
            }
        }
        visited == n
    }

    /// Parses the `t/v/e` text format:
    ///
    /// ```text
    /// t <|V|> <|E|>
    /// v <id> <label> [<degree>]
    /// e <u> <v>
    /// ```
    ///
    /// Vertex ids must be exactly `0..|V|-1`. A declared degree is validated
    /// against the edge list, never trusted.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

        let (header_line, header) = lines
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or_else(|| Error::parse(1, ParseErrorKind::Malformed("empty input".into())))?;
        let mut it = header.split_whitespace();
        if it.next() != Some("t") {
            return Err(Error::parse(
                header_line,
                ParseErrorKind::Malformed("expected header 't <|V|> <|E|>'".into()),
            ));
        }
        let vertex_count: usize = parse_field(&mut it, header_line, "vertex count")?;
        let edge_count: usize = parse_field(&mut it, header_line, "edge count")?;

        let mut labels: Vec<Option<Label>> = vec![None; vertex_count];
        let mut declared: Vec<Option<(usize, usize)>> = vec![None; vertex_count]; // (degree, line)
        for _ in 0..vertex_count {
            let (line_no, line) = next_record(&mut lines, "vertex record")?;
            let mut it = line.split_whitespace();
            if it.next() != Some("v") {
                return Err(Error::parse(
                    line_no,
                    ParseErrorKind::Malformed(format!("expected vertex record, got '{line}'")),
                ));
            }
            let id: u64 = parse_field(&mut it, line_no, "vertex id")?;
            if id >= vertex_count as u64 {
                return Err(Error::parse(line_no, ParseErrorKind::UnknownVertex(id)));
            }
            let id = id as usize;
            if labels[id].is_some() {
                return Err(Error::parse(
                    line_no,
                    ParseErrorKind::Malformed(format!("vertex {id} declared twice")),
                ));
            }
            let label: u32 = parse_field(&mut it, line_no, "label")?;
            labels[id] = Some(Label(label));
            if let Some(deg) = it.next() {
                let deg: usize = deg.parse().map_err(|_| {
                    Error::parse(line_no, ParseErrorKind::Malformed(format!("bad degree '{deg}'")))
                })?;
                declared[id] = Some((deg, line_no));
            }
            if it.next().is_some() {
                return Err(Error::parse(
                    line_no,
                    ParseErrorKind::Malformed("trailing fields on vertex record".into()),
                ));
            }
        }

        let mut adjacency: Vec<Vec<VertexId>> = vec![Vec::new(); vertex_count];
        let mut seen = HashSet::with_capacity(edge_count);
        for _ in 0..edge_count {
            let (line_no, line) = next_record(&mut lines, "edge record")?;
            let mut it = line.split_whitespace();
            if it.next() != Some("e") {
                return Err(Error::parse(
                    line_no,
                    ParseErrorKind::Malformed(format!("expected edge record, got '{line}'")),
                ));
            }
            let u: u64 = parse_field(&mut it, line_no, "edge endpoint")?;
            let v: u64 = parse_field(&mut it, line_no, "edge endpoint")?;
            for id in [u, v] {
                if id >= vertex_count as u64 {
                    return Err(Error::parse(line_no, ParseErrorKind::UnknownVertex(id)));
                }
            }
            let (u, v) = (u as VertexId, v as VertexId);
            if u == v {
                return Err(Error::parse(line_no, ParseErrorKind::SelfLoop(u)));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::parse(line_no, ParseErrorKind::DuplicateEdge(u.min(v), u.max(v))));
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }

        if let Some((line_no, line)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(Error::parse(
                line_no,
                ParseErrorKind::Malformed(format!("unexpected trailing record '{line}'")),
            ));
        }

        for (id, decl) in declared.iter().enumerate() {
            if let Some((deg, line_no)) = decl {
                if *deg != adjacency[id].len() {
                    return Err(Error::parse(
                        *line_no,
                        ParseErrorKind::DegreeMismatch {
                            vertex: id as VertexId,
                            declared: *deg,
                            computed: adjacency[id].len(),
                        },
                    ));
                }
            }
        }

        let labels: Vec<Label> = labels.into_iter().map(|l| l.expect("all ids seen")).collect();
        let max_label = labels.iter().map(|l| l.0).max().unwrap_or(0);
        Ok(Self::from_adjacency(labels, adjacency, edge_count, max_label + 1))
    }

    /// Serializes in the same `t/v/e` format `parse` accepts, with computed
    /// degrees on the vertex records and edges listed with `u < v`.
    pub fn write(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "t {} {}", self.vertex_count(), self.edge_count());
        for v in 0..self.vertex_count() as VertexId {
            let _ = writeln!(out, "v {} {} {}", v, self.label(v).0, self.degree(v));
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "e {u} {v}");
        }
        out
    }
}

fn next_record<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    what: &str,
) -> Result<(usize, &'a str)> {
    lines
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| Error::parse(0, ParseErrorKind::Malformed(format!("missing {what}"))))
}

fn parse_field<T: std::str::FromStr>(
    it: &mut std::str::SplitWhitespace<'_>,
    line: usize,
    what: &str,
) -> Result<T> {
    it.next()
        .ok_or_else(|| Error::parse(line, ParseErrorKind::Malformed(format!("missing {what}"))))?
        .parse()
        .map_err(|_| Error::parse(line, ParseErrorKind::Malformed(format!("bad {what}"))))
}

fn content_digest(labels: &[Label], offsets: &[usize], neighbors: &[VertexId]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update((labels.len() as u64).to_le_bytes());
    for l in labels {
        hasher.update(l.0.to_le_bytes());
    }
    for o in offsets {
        hasher.update((*o as u64).to_le_bytes());
    }
    for n in neighbors {
        hasher.update(n.to_le_bytes());
    }
    let out = hasher.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("sha256 yields 32 bytes"))
}

/// Label-normalized orientations of the edge `(u, v)`.
///
/// Returns one orientation putting the smaller label first, or both
/// orientations when the labels tie: the tie case has two maximal anchored
/// features, one per endpoint, and index and query sides must agree on that.
pub fn normalize_edge(g: &Graph, u: VertexId, v: VertexId) -> Result<Vec<OrientedEdge>> {
    if !g.has_edge(u, v)? {
        return Err(Error::NotAnEdge(u, v));
    }
    let (lu, lv) = (g.label(u), g.label(v));
    Ok(if lu < lv {
        vec![OrientedEdge::new(u, v)]
    } else if lv < lu {
        vec![OrientedEdge::new(v, u)]
    } else {
        vec![OrientedEdge::new(u, v), OrientedEdge::new(v, u)]
    })
}

/// Classifies a normalized oriented edge by the degree threshold `dstar`.
pub fn classify_edge(g: &Graph, e: OrientedEdge, dstar: u32) -> EdgeType {
    let sparse_from = g.degree(e.from) <= dstar as usize;
    let sparse_to = g.degree(e.to) <= dstar as usize;
    match (sparse_from, sparse_to) {
        (true, true) => EdgeType::SparseSparse,
        (true, false) => EdgeType::SparseDense,
        (false, true) => EdgeType::DenseSparse,
        (false, false) => EdgeType::DenseDense,
    }
}
