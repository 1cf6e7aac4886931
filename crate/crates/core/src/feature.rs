//! Per-edge feature structures: anchored stars and anchored path codes.
//!
//! A star is the anchor edge plus a subset of the center endpoint's other
//! incident edges; an edge whose center has degree `d` has exactly
//! `2^(d-1)` of them. A path code is the label tuple of a length-1 or
//! length-2 path through the anchor edge; an edge has exactly `d` of those.
//! Enumeration is streamed so callers never hold all subsets of one edge in
//! memory at once.

use crate::graph::{Graph, Label, OrientedEdge, VertexId};
use crate::{Error, Result};

/// The only feature radius this implementation supports.
pub const SUPPORTED_RADIUS: u32 = 1;

/// Returns an error unless `k` is the supported feature radius.
pub fn check_radius(k: u32) -> Result<()> {
    if k == SUPPORTED_RADIUS {
        Ok(())
    } else {
        Err(Error::UnsupportedRadius(k))
    }
}

/// An anchored star: the anchor edge plus a subset of the center's other
/// incident edges, reduced to its canonical label form.
///
/// `leaf_labels` is always sorted ascending; two stars are isomorphic
/// exactly when their `(center_label, anchor_label, leaf_labels)` triples
/// are equal. `members` carries the realizing data-graph vertices
/// (center, anchor endpoint, leaves in label-sorted order) and is absent on
/// the query side.
#[derive(Debug, Clone)]
pub struct AnchoredStar {
    pub center_label: Label,
    pub anchor_label: Label,
    pub leaf_labels: Vec<Label>,
    pub members: Option<Vec<VertexId>>,
}

impl AnchoredStar {
    /// Builds a star in canonical form from unordered leaf labels.
    pub fn new(center_label: Label, anchor_label: Label, mut leaf_labels: Vec<Label>) -> Self {
        leaf_labels.sort_unstable();
        AnchoredStar { center_label, anchor_label, leaf_labels, members: None }
    }

    fn with_members(
        center_label: Label,
        anchor_label: Label,
        labeled_leaves: &mut Vec<(Label, VertexId)>,
        center: VertexId,
        anchor: VertexId,
    ) -> Self {
        labeled_leaves.sort_unstable();
        let mut members = Vec::with_capacity(labeled_leaves.len() + 2);
        members.push(center);
        members.push(anchor);
        let mut leaf_labels = Vec::with_capacity(labeled_leaves.len());
        for (l, v) in labeled_leaves.iter() {
            leaf_labels.push(*l);
            members.push(*v);
        }
        AnchoredStar { center_label, anchor_label, leaf_labels, members: Some(members) }
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_labels.len()
    }

    /// Owned canonical triple, usable as a map key for isomorphism classes.
    pub fn canonical_triple(&self) -> (Label, Label, Vec<Label>) {
        (self.center_label, self.anchor_label, self.leaf_labels.clone())
    }
}

/// Label tuple of an anchored path, ordered from the farthest vertex toward
/// the anchor edge: `(L(w), L(u), L(v))`, or `(L(u), L(v))` for the bare
/// anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathCode {
    Pair(Label, Label),
    Triple(Label, Label, Label),
}

/// Streams all `2^(d(from)-1)` anchored stars of `e`, centered at `e.from`.
///
/// One star per subset of the center's non-anchor incident edges, from the
/// bare anchor (empty subset) to the maximum star (all leaves), each with
/// realizing member vertices. Callers are expected to enforce the degree
/// threshold; the subset mask is a `u64`, which is far beyond any degree
/// that survives thresholding.
pub fn enumerate_anchored_stars<'g>(
    g: &'g Graph,
    e: OrientedEdge,
) -> Result<impl Iterator<Item = AnchoredStar> + 'g> {
    if !g.has_edge(e.from, e.to)? {
        return Err(Error::NotAnEdge(e.from, e.to));
    }
    let center_label = g.label(e.from);
    let anchor_label = g.label(e.to);
    let others: Vec<VertexId> =
        g.neighbors(e.from).iter().copied().filter(|&w| w != e.to).collect();
    assert!(others.len() < 64, "star enumeration needs a thresholded center degree");
    let subset_count: u64 = 1 << others.len();
    let mut scratch = Vec::with_capacity(others.len());
    Ok((0..subset_count).map(move |mask| {
        scratch.clear();
        for (i, &w) in others.iter().enumerate() {
            if mask >> i & 1 == 1 {
                scratch.push((g.label(w), w));
            }
        }
        AnchoredStar::with_members(center_label, anchor_label, &mut scratch, e.from, e.to)
    }))
}

/// The star of `e` with every non-anchor edge of the center included.
pub fn max_anchored_star(g: &Graph, e: OrientedEdge) -> Result<AnchoredStar> {
    if !g.has_edge(e.from, e.to)? {
        return Err(Error::NotAnEdge(e.from, e.to));
    }
    let mut leaves: Vec<(Label, VertexId)> = g
        .neighbors(e.from)
        .iter()
        .copied()
        .filter(|&w| w != e.to)
        .map(|w| (g.label(w), w))
        .collect();
    Ok(AnchoredStar::with_members(g.label(e.from), g.label(e.to), &mut leaves, e.from, e.to))
}

/// All `d(from)` anchored path codes of `e`: the bare pair plus one triple
/// per non-anchor neighbor of the center. Duplicate label tuples are kept;
/// merging happens at the index.
pub fn enumerate_anchored_paths(g: &Graph, e: OrientedEdge) -> Result<Vec<PathCode>> {
    if !g.has_edge(e.from, e.to)? {
        return Err(Error::NotAnEdge(e.from, e.to));
    }
    let (lu, lv) = (g.label(e.from), g.label(e.to));
    let mut codes = Vec::with_capacity(g.degree(e.from));
    codes.push(PathCode::Pair(lu, lv));
    for &w in g.neighbors(e.from) {
        if w != e.to {
            codes.push(PathCode::Triple(g.label(w), lu, lv));
        }
    }
    Ok(codes)
}

/// The maximum anchored paths of `e`: all triples when the center has
/// another neighbor, otherwise the single bare pair.
pub fn max_anchored_paths(g: &Graph, e: OrientedEdge) -> Result<Vec<PathCode>> {
    let mut codes = enumerate_anchored_paths(g, e)?;
    if codes.len() > 1 {
        codes.remove(0);
    }
    Ok(codes)
}
