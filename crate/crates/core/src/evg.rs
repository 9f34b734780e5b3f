//! Visibility graph of segment endpoints and its extension to critical lines.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::geometry::{Point, Segment, Vector};
use crate::scalar::Scalar;
use crate::scene::{Scene, SegmentId};
use crate::visibility::sight_line_clear;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeKind {
    Visibility,
    Extension,
}

/// What an extension ray stopped at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hit {
    Segment(SegmentId),
    BoundingBox,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvgEdge {
    pub segment: Segment,
    pub kind: EdgeKind,
    /// Input segments this edge touches at its ends (one or two ids).
    pub incident: Vec<SegmentId>,
    /// For extensions, the obstacle or box side where the ray stopped.
    pub hit: Option<Hit>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evg {
    /// The `2n` segment endpoints followed by extension hit points.
    pub vertices: Vec<Point>,
    pub edges: Vec<EvgEdge>,
    /// `m_{s_i}`: edges incident on each input segment.
    pub incidence: Vec<usize>,
}

impl Evg {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn visibility_edges(&self) -> impl Iterator<Item = &EvgEdge> {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Visibility)
    }
}

/// An endpoint, addressed as `(segment, 0 | 1)`.
pub type EndpointPair = ((SegmentId, usize), (SegmentId, usize));

fn endpoint(scene: &Scene, (s, e): (SegmentId, usize)) -> &Point {
    let seg = scene.segment(s);
    if e == 0 {
        &seg.a
    } else {
        &seg.b
    }
}

/// All mutually visible endpoint pairs, including each segment's own pair.
pub fn build_vg(scene: &Scene) -> Vec<EndpointPair> {
    let ends: Vec<(SegmentId, usize)> = (0..scene.len()).flat_map(|s| [(s, 0), (s, 1)]).collect();
    let mut out = Vec::new();
    for (i, &u) in ends.iter().enumerate() {
        for &v in &ends[i + 1..] {
            if u.0 == v.0 || sight_line_clear(scene, endpoint(scene, u), endpoint(scene, v), None) {
                out.push((u, v));
            }
        }
    }
    out
}

/// First point where the ray `from + λ d` (λ > 0) meets an obstacle or the
/// box. `None` if an obstacle runs along the ray from `from` itself.
fn shoot(scene: &Scene, from: &Point, d: &Vector) -> Option<(Point, Hit)> {
    let mut best: Option<(Scalar, Hit)> = None;
    let consider = |lambda: Scalar, hit: Hit, best: &mut Option<(Scalar, Hit)>| {
        if best.as_ref().is_none_or(|(b, _)| lambda < *b) {
            *best = Some((lambda, hit));
        }
    };
    for (id, s) in scene.segments().iter().enumerate() {
        let e = s.direction();
        let denom = d.cross(&e);
        let w = s.a.sub(from);
        if denom.is_zero() {
            if !w.cross(d).is_zero() {
                continue;
            }
            let dd = d.norm2();
            let la = &w.dot(d) / &dd;
            let lb = &s.b.sub(from).dot(d) / &dd;
            let (lo, hi) = if la <= lb { (la, lb) } else { (lb, la) };
            if hi.signum() != Ordering::Greater {
                continue;
            }
            if lo.signum() != Ordering::Greater {
                return None;
            }
            consider(lo, Hit::Segment(id), &mut best);
            continue;
        }
        let lambda = &w.cross(&e) / &denom;
        let mu = &w.cross(d) / &denom;
        if lambda.signum() == Ordering::Greater && mu.signum() != Ordering::Less && mu <= Scalar::one() {
            consider(lambda, Hit::Segment(id), &mut best);
        }
    }
    let b = scene.bbox();
    for (bound, num, den) in [
        (&b.max.x, &from.x, &d.x),
        (&b.min.x, &from.x, &d.x),
        (&b.max.y, &from.y, &d.y),
        (&b.min.y, &from.y, &d.y),
    ] {
        if !den.is_zero() {
            let lambda = &(bound - num) / den;
            if lambda.signum() == Ordering::Greater {
                consider(lambda, Hit::BoundingBox, &mut best);
            }
        }
    }
    let (lambda, hit) = best?;
    Some((from.offset(d, &lambda), hit))
}

/// VG edges plus their extensions to the first obstacle or the box.
pub fn build_evg(scene: &Scene) -> Evg {
    let mut vertices: Vec<Point> = scene.segments().iter().flat_map(|s| [s.a.clone(), s.b.clone()]).collect();
    let mut edges = Vec::new();
    let mut incidence = vec![0usize; scene.len()];
    for (u, v) in build_vg(scene) {
        let (pu, pv) = (endpoint(scene, u).clone(), endpoint(scene, v).clone());
        let mut incident = vec![u.0];
        if v.0 != u.0 {
            incident.push(v.0);
        }
        for &s in &incident {
            incidence[s] += 1;
        }
        for (from, owner, d) in [(&pv, v.0, pv.sub(&pu)), (&pu, u.0, pu.sub(&pv))] {
            if let Some((hit_point, hit)) = shoot(scene, from, &d) {
                let mut inc = vec![owner];
                if let Hit::Segment(h) = hit {
                    incidence[h] += 1;
                    if h != owner {
                        inc.push(h);
                    }
                }
                vertices.push(hit_point.clone());
                edges.push(EvgEdge { segment: Segment::new(from.clone(), hit_point), kind: EdgeKind::Extension, incident: inc, hit: Some(hit) });
            }
        }
        edges.push(EvgEdge { segment: Segment::new(pu, pv), kind: EdgeKind::Visibility, incident, hit: None });
    }
    Evg { vertices, edges, incidence }
}

/// Canonical supporting line: direction scaled to `(1, k)` or `(0, 1)`, plus
/// the offset `cross(dir, p)`.
pub(crate) fn line_key(s: &Segment) -> (Scalar, Scalar, Scalar) {
    let d = s.direction();
    let dir = if d.x.is_zero() {
        Vector { x: Scalar::zero(), y: Scalar::one() }
    } else {
        Vector { x: Scalar::one(), y: &d.y / &d.x }
    };
    let off = dir.cross(&Vector { x: s.a.x.clone(), y: s.a.y.clone() });
    (dir.x, dir.y, off)
}

/// Merges collinear segments that overlap or touch into maximal pieces.
pub fn merge_collinear(segments: impl IntoIterator<Item = Segment>) -> Vec<Segment> {
    let mut lines: BTreeMap<(Scalar, Scalar, Scalar), Vec<(Point, Point)>> = BTreeMap::new();
    for s in segments {
        let (a, b) = s.lex_sorted();
        let (a, b) = (a.clone(), b.clone());
        lines.entry(line_key(&s)).or_default().push((a, b));
    }
    let mut out = Vec::new();
    for (_, mut pieces) in lines {
        pieces.sort();
        let mut cur: Option<(Point, Point)> = None;
        for (a, b) in pieces {
            cur = match cur {
                Some((ca, cb)) if a <= cb => Some((ca, if b > cb { b } else { cb })),
                Some((ca, cb)) => {
                    out.push(Segment::new(ca, cb));
                    Some((a, b))
                }
                None => Some((a, b)),
            };
        }
        if let Some((a, b)) = cur {
            out.push(Segment::new(a, b));
        }
    }
    out
}

/// The critical lines: every EVG edge, with collinear chains merged.
///
/// Input segments are included, since each segment is its own VG edge.
pub fn critical_edge_set(evg: &Evg) -> Vec<Segment> {
    merge_collinear(evg.edges.iter().map(|e| e.segment.clone()))
}
