//! Ground-truth visibility among closed obstacle segments.
//!
//! Sight lines are open segments and obstacles are closed: a sight line that
//! grazes an obstacle endpoint is blocked. The bounding box only clips; it
//! never blocks.

mod fast;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::geometry::{
    clip_to_halfplanes, direction_compare, open_segments_cross, orient, Orientation, Point, Segment, Triangle, Vector,
};
use crate::scalar::Scalar;
use crate::scene::{Scene, SegmentId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VisibilityError {
    #[error("point {0} lies outside the bounding box")]
    OutOfBounds(Point),
    #[error("point lies on obstacle segment {0}")]
    PointOnObstacle(SegmentId),
}

/// Exact visible-segment count at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountResult {
    pub count: usize,
    pub visible: BTreeSet<SegmentId>,
}

impl CountResult {
    pub fn from_set(visible: BTreeSet<SegmentId>) -> Self {
        CountResult { count: visible.len(), visible }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySource {
    Segment(SegmentId),
    BoundingBox,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryVertex {
    pub point: Point,
    pub source: BoundarySource,
}

/// Region seen from `viewpoint`, as a counterclockwise vertex cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityPolygon {
    pub viewpoint: Point,
    pub boundary: Vec<BoundaryVertex>,
    pub visible_segment_ids: BTreeSet<SegmentId>,
    pub visible_endpoint_count: usize,
}

fn check_inside(scene: &Scene, p: &Point) -> Result<(), VisibilityError> {
    if scene.bbox().contains(p) {
        Ok(())
    } else {
        Err(VisibilityError::OutOfBounds(p.clone()))
    }
}

/// True iff no obstacle (other than `ignore`) meets the open segment `(p, q)`.
pub fn sees_point(scene: &Scene, p: &Point, q: &Point, ignore: Option<SegmentId>) -> Result<bool, VisibilityError> {
    check_inside(scene, p)?;
    check_inside(scene, q)?;
    Ok(sight_line_clear(scene, p, q, ignore))
}

pub(crate) fn sight_line_clear(scene: &Scene, p: &Point, q: &Point, ignore: Option<SegmentId>) -> bool {
    if p == q {
        return true;
    }
    let sight = Segment { a: p.clone(), b: q.clone() };
    let bounds = sight.bounds();
    scene
        .segments()
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != ignore)
        .all(|(_, s)| !s.bounds().overlaps(&bounds) || !open_segments_cross(&sight, s))
}

/// Weak visibility of segment `i` from `p`.
///
/// Only obstacles inside the closed triangle `conv(p, s_i)` can block; each
/// casts a closed shadow interval onto `s_i`, and the segment is visible iff
/// those intervals leave part of `[0, 1]` uncovered.
pub fn sees_segment(scene: &Scene, p: &Point, i: SegmentId) -> Result<bool, VisibilityError> {
    check_inside(scene, p)?;
    Ok(segment_visible_from(scene, p, i))
}

pub(crate) fn segment_visible_from(scene: &Scene, p: &Point, i: SegmentId) -> bool {
    let target = scene.segment(i);
    if target.contains(p) {
        return true;
    }
    let Some(cone) = Triangle::new(p.clone(), target.a.clone(), target.b.clone()) else {
        // p on the supporting line, off the segment: only the near end counts.
        let near = if p.dist2(&target.a) <= p.dist2(&target.b) { &target.a } else { &target.b };
        return sight_line_clear(scene, p, near, Some(i));
    };
    let v = cone.vertices();
    let halfplanes = [(v[0].clone(), v[1].clone()), (v[1].clone(), v[2].clone()), (v[2].clone(), v[0].clone())];
    let cone_box = cone.bounds();
    let e = target.direction();
    let project = |x: &Point| -> Scalar {
        let d = x.sub(p);
        &p.sub(&target.a).cross(&d) / &e.cross(&d)
    };
    let mut shadows: Vec<(Scalar, Scalar)> = Vec::new();
    for (j, s) in scene.segments().iter().enumerate() {
        if j == i || !s.bounds().overlaps(&cone_box) {
            continue;
        }
        let Some((lo, hi)) = clip_to_halfplanes(s, &halfplanes, false) else {
            continue;
        };
        let x0 = s.point_at(&lo);
        let x1 = s.point_at(&hi);
        let ts: Vec<Scalar> = [x0, x1].iter().filter(|x| *x != p).map(&project).collect();
        let (Some(a), Some(b)) = (ts.iter().min(), ts.iter().max()) else {
            continue;
        };
        if a.signum() == Ordering::Less || *b > Scalar::one() {
            debug_assert!(false, "shadow escaped the cone");
        }
        shadows.push((a.clone(), b.clone()));
    }
    shadows.sort();
    let mut reach: Option<Scalar> = None;
    for (a, b) in shadows {
        match &reach {
            None if a.signum() == Ordering::Greater => return true,
            Some(r) if a > *r => return true,
            _ => {}
        }
        if reach.as_ref().is_none_or(|r| b > *r) {
            reach = Some(b);
        }
    }
    reach.is_none_or(|r| r < Scalar::one())
}

/// A direction strictly inside the counterclockwise sweep from `u` to `v`.
fn direction_between(u: &Vector, v: &Vector) -> Vector {
    if u.cross(v).signum() == Ordering::Greater {
        Vector { x: &u.x + &v.x, y: &u.y + &v.y }
    } else {
        Vector { x: -&u.y, y: u.x.clone() }
    }
}

/// Whether `s` is nearer to `p` than `t` along every ray from `p` that
/// crosses both. The segments must be disjoint and neither collinear with `p`.
fn in_front(p: &Point, s: &Segment, t: &Segment) -> bool {
    let t1 = orient(&s.a, &s.b, &t.a).sign();
    let t2 = orient(&s.a, &s.b, &t.b).sign();
    if t1 * t2 >= 0 {
        // t lies on one side of the line through s.
        let side = if t1 != 0 { t1 } else { t2 };
        return side != orient(&s.a, &s.b, p).sign();
    }
    // t straddles that line, so s lies on one side of the line through t.
    let s1 = orient(&t.a, &t.b, &s.a).sign();
    let s2 = orient(&t.a, &t.b, &s.b).sign();
    let side = if s1 != 0 { s1 } else { s2 };
    side == orient(&t.a, &t.b, p).sign()
}

/// Ray parameter where `p + λ w` meets the supporting line of `s`.
fn ray_param(p: &Point, w: &Vector, s: &Segment) -> Scalar {
    let e = s.direction();
    &s.a.sub(p).cross(&e) / &w.cross(&e)
}

fn ray_hits_box(scene: &Scene, p: &Point, w: &Vector) -> Point {
    let b = scene.bbox();
    let mut best: Option<Scalar> = None;
    let mut consider = |lambda: Scalar| {
        if lambda.signum() == Ordering::Greater && best.as_ref().is_none_or(|x| lambda < *x) {
            best = Some(lambda);
        }
    };
    if !w.x.is_zero() {
        consider(&(&b.max.x - &p.x) / &w.x);
        consider(&(&b.min.x - &p.x) / &w.x);
    }
    if !w.y.is_zero() {
        consider(&(&b.max.y - &p.y) / &w.y);
        consider(&(&b.min.y - &p.y) / &w.y);
    }
    match best {
        Some(l) => p.offset(w, &l),
        None => p.clone(),
    }
}

struct SweepOutput {
    visible: BTreeSet<SegmentId>,
    boundary: Vec<BoundaryVertex>,
    endpoint_count: usize,
}

enum Event {
    Start(SegmentId),
    End(SegmentId),
    Corner,
    Radial(SegmentId),
}

/// Rotational sweep around `p` (which must not lie on an obstacle).
fn sweep(scene: &Scene, p: &Point, detailed: bool) -> SweepOutput {
    let mut events: Vec<(Vector, Event)> = Vec::with_capacity(2 * scene.len() + 4);
    let mut starts: Vec<Vector> = Vec::with_capacity(scene.len());
    let mut ends: Vec<Vector> = Vec::with_capacity(scene.len());
    let mut radial = Vec::new();
    for (id, s) in scene.segments().iter().enumerate() {
        let da = s.a.sub(p);
        let db = s.b.sub(p);
        match orient(p, &s.a, &s.b) {
            Orientation::Ccw => {
                events.push((da.clone(), Event::Start(id)));
                events.push((db.clone(), Event::End(id)));
                starts.push(da);
                ends.push(db);
            }
            Orientation::Cw => {
                events.push((db.clone(), Event::Start(id)));
                events.push((da.clone(), Event::End(id)));
                starts.push(db);
                ends.push(da);
            }
            Orientation::Collinear => {
                let near = if da.norm2() <= db.norm2() { da.clone() } else { db.clone() };
                events.push((near, Event::Radial(id)));
                radial.push(id);
                starts.push(da);
                ends.push(db);
            }
        }
    }
    for c in scene.bbox().corners() {
        if &c != p {
            events.push((c.sub(p), Event::Corner));
        }
    }
    events.sort_by(|a, b| direction_compare(&a.0, &b.0));
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < events.len() {
        let mut j = i + 1;
        while j < events.len() && direction_compare(&events[i].0, &events[j].0) == Ordering::Equal {
            j += 1;
        }
        groups.push((i, j));
        i = j;
    }
    let k = groups.len();
    let dir = |g: usize| &events[groups[g % k].0].0;

    let is_radial = |id: SegmentId| radial.contains(&id);
    let crosses = |id: SegmentId, w: &Vector| starts[id].cross(w).signum() == Ordering::Greater && w.cross(&ends[id]).signum() == Ordering::Greater;

    let segs = scene.segments();
    let closer = |a: SegmentId, b: SegmentId| in_front(p, &segs[a], &segs[b]);

    // Status for the wrap-around interval (d_{k-1}, d_0).
    let w_init = direction_between(dir(k - 1), dir(0));
    let mut status: Vec<SegmentId> = (0..scene.len()).filter(|&id| !is_radial(id) && crosses(id, &w_init)).collect();
    status.sort_by(|&a, &b| if a == b { Ordering::Equal } else if closer(a, b) { Ordering::Less } else { Ordering::Greater });

    let mut out = SweepOutput { visible: BTreeSet::new(), boundary: Vec::new(), endpoint_count: 0 };
    for g in 0..k {
        let (lo, hi) = groups[g];
        let d = dir(g);
        if detailed {
            let mut candidates: Vec<SegmentId> = status.clone();
            for (_, ev) in &events[lo..hi] {
                match ev {
                    Event::Start(id) | Event::End(id) | Event::Radial(id) => candidates.push(*id),
                    Event::Corner => {}
                }
            }
            candidates.sort_unstable();
            candidates.dedup();
            let blocked = |target: &Point| {
                let sight = Segment { a: p.clone(), b: target.clone() };
                candidates.iter().any(|&c| open_segments_cross(&sight, &segs[c]))
            };
            for (_, ev) in &events[lo..hi] {
                match ev {
                    Event::Start(id) | Event::End(id) => {
                        let s = &segs[*id];
                        let da = s.a.sub(p);
                        let e = if da.cross(d).is_zero() && da.dot(d).signum() == Ordering::Greater { &s.a } else { &s.b };
                        if !blocked(e) {
                            out.endpoint_count += 1;
                        }
                    }
                    Event::Radial(id) => {
                        let s = &segs[*id];
                        let near = if p.dist2(&s.a) <= p.dist2(&s.b) { &s.a } else { &s.b };
                        if !blocked(near) {
                            out.endpoint_count += 1;
                            out.visible.insert(*id);
                            out.boundary.push(BoundaryVertex { point: near.clone(), source: BoundarySource::Segment(*id) });
                        }
                    }
                    Event::Corner => {}
                }
            }
        } else {
            for (_, ev) in &events[lo..hi] {
                if let Event::Radial(id) = ev {
                    let s = &segs[*id];
                    let near = if p.dist2(&s.a) <= p.dist2(&s.b) { &s.a } else { &s.b };
                    let sight = Segment { a: p.clone(), b: near.clone() };
                    let clear = status.iter().chain(events[lo..hi].iter().filter_map(|(_, ev)| match ev {
                        Event::Start(i) | Event::End(i) | Event::Radial(i) => Some(i),
                        Event::Corner => None,
                    }));
                    let mut ok = true;
                    for &c in clear {
                        if c != *id && open_segments_cross(&sight, &segs[c]) {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        out.visible.insert(*id);
                    }
                }
            }
        }

        let next = dir(g + 1);
        for (_, ev) in &events[lo..hi] {
            if let Event::End(id) = ev {
                if let Some(pos) = status.iter().position(|x| x == id) {
                    status.remove(pos);
                }
            }
        }
        for (_, ev) in &events[lo..hi] {
            if let Event::Start(id) = ev {
                let pos = status.partition_point(|&other| closer(other, *id));
                status.insert(pos, *id);
            }
        }
        match status.first() {
            Some(&front) => {
                out.visible.insert(front);
                if detailed {
                    let s = &segs[front];
                    for ray in [d, next] {
                        let pt = p.offset(ray, &ray_param(p, ray, s));
                        push_vertex(&mut out.boundary, pt, BoundarySource::Segment(front));
                    }
                }
            }
            None => {
                if detailed {
                    for ray in [d, next] {
                        push_vertex(&mut out.boundary, ray_hits_box(scene, p, ray), BoundarySource::BoundingBox);
                    }
                }
            }
        }
    }
    if detailed && out.boundary.len() > 1 && out.boundary.first().map(|v| &v.point) == out.boundary.last().map(|v| &v.point) {
        out.boundary.pop();
    }
    out
}

fn push_vertex(boundary: &mut Vec<BoundaryVertex>, point: Point, source: BoundarySource) {
    if boundary.last().map(|v| &v.point) != Some(&point) {
        boundary.push(BoundaryVertex { point, source });
    }
}

fn obstacle_at(scene: &Scene, p: &Point) -> Option<SegmentId> {
    scene.segments_through(p).next()
}

/// Visibility polygon of `p`; refuses viewpoints on obstacles.
pub fn visibility_polygon(scene: &Scene, p: &Point) -> Result<VisibilityPolygon, VisibilityError> {
    check_inside(scene, p)?;
    if let Some(id) = obstacle_at(scene, p) {
        return Err(VisibilityError::PointOnObstacle(id));
    }
    let out = sweep(scene, p, true);
    Ok(VisibilityPolygon {
        viewpoint: p.clone(),
        boundary: out.boundary,
        visible_segment_ids: out.visible,
        visible_endpoint_count: out.endpoint_count,
    })
}

/// Exact `m_p`: rotational sweep off obstacles, per-segment tests on them.
pub fn visible_count_oracle(scene: &Scene, p: &Point) -> Result<CountResult, VisibilityError> {
    check_inside(scene, p)?;
    let visible = if obstacle_at(scene, p).is_some() {
        (0..scene.len()).filter(|&i| segment_visible_from(scene, p, i)).collect()
    } else {
        fast::visible_set(scene, p).unwrap_or_else(|| sweep(scene, p, false).visible)
    };
    Ok(CountResult::from_set(visible))
}

/// Number of obstacle endpoints visible from `p` (0, 1 or 2 per segment).
pub fn visible_endpoint_count(scene: &Scene, p: &Point) -> Result<usize, VisibilityError> {
    check_inside(scene, p)?;
    if let Some(id) = obstacle_at(scene, p) {
        return Err(VisibilityError::PointOnObstacle(id));
    }
    Ok(sweep(scene, p, true).endpoint_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use alloc::vec;

    fn pt(x: &str, y: &str) -> Point {
        Point::new(x.parse().unwrap(), y.parse().unwrap())
    }

    fn ten_box() -> Rect {
        Rect::new(Point::from_ints(0, 0), Point::from_ints(10, 10))
    }

    fn scene_a() -> Scene {
        Scene::new(ten_box(), vec![Segment::new(pt("4", "4"), pt("6", "4"))]).unwrap()
    }

    fn scene_b() -> Scene {
        Scene::new(
            ten_box(),
            vec![Segment::new(pt("3", "5"), pt("7", "5")), Segment::new(pt("3.5", "3"), pt("6.5", "3"))],
        )
        .unwrap()
    }

    #[test]
    fn point_point_examples() {
        let a = scene_a();
        assert!(!sees_point(&a, &pt("5", "1"), &pt("5", "9"), None).unwrap());
        assert!(sees_point(&a, &pt("1", "1"), &pt("2", "1"), None).unwrap());
        // s1 at y = 3 spans x in [3.5, 6.5] and crosses this sight line at (5, 3).
        assert!(!sees_point(&scene_b(), &pt("5", "1"), &pt("5", "4"), None).unwrap());
        assert!(sees_point(&scene_b(), &pt("5", "3.5"), &pt("5", "4"), None).unwrap());
        // Grazing an endpoint blocks.
        assert!(!sees_point(&a, &pt("2", "2"), &pt("6", "6"), None).unwrap());
        assert!(sees_point(&a, &pt("2", "2"), &pt("6", "6"), Some(0)).unwrap());
        assert!(matches!(sees_point(&a, &pt("11", "1"), &pt("2", "1"), None), Err(VisibilityError::OutOfBounds(_))));
    }

    #[test]
    fn point_segment_examples() {
        let b = scene_b();
        assert!(!sees_segment(&b, &pt("5", "1"), 0).unwrap());
        assert!(sees_segment(&b, &pt("5", "1"), 1).unwrap());
        assert!(sees_segment(&b, &pt("0.5", "4"), 0).unwrap());
        assert!(sees_segment(&b, &pt("0.5", "4"), 1).unwrap());
        // On the segment itself.
        assert!(sees_segment(&b, &pt("4", "5"), 0).unwrap());
        // On the supporting line, beyond the end: blocked only if something
        // sits between.
        assert!(sees_segment(&b, &pt("1", "5"), 0).unwrap());
    }

    #[test]
    fn shadows_touching_at_a_point_still_cover() {
        // Two blockers whose shadows on the far segment meet exactly at
        // its midpoint: closed shadows cover it.
        let scene = Scene::new(
            Rect::new(Point::from_ints(0, 0), Point::from_ints(20, 20)),
            vec![
                Segment::new(Point::from_ints(2, 10), Point::from_ints(18, 10)),
                Segment::new(Point::from_ints(3, 5), Point::from_ints(10, 5)),
                Segment::new(Point::from_ints(10, 6), Point::from_ints(17, 6)),
            ],
        )
        .unwrap();
        let p = Point::from_ints(10, 0);
        // Blocker 1 shadows x ∈ [-4, 20] at y = 10 scaled: from (10,0) through
        // (3,5) hits y=10 at x=-4; through (10,5) at x=10. Blocker 2 through
        // (10,6) at x=10 and (17,6) at x=21.67. Together they cover [2, 18].
        assert!(!sees_segment(&scene, &p, 0).unwrap());
        assert!(!visible_count_oracle(&scene, &p).unwrap().visible.contains(&0));
    }

    #[test]
    fn polygon_examples() {
        let a = scene_a();
        let vp = visibility_polygon(&a, &pt("5", "1")).unwrap();
        assert_eq!(vp.visible_segment_ids, BTreeSet::from([0]));
        assert!(vp.boundary.iter().any(|v| v.source == BoundarySource::Segment(0)));
        assert!(vp.boundary.iter().any(|v| v.source == BoundarySource::BoundingBox));
        assert_eq!(vp.visible_endpoint_count, 2);
        let far = visibility_polygon(&a, &pt("9.5", "9.5")).unwrap();
        assert_eq!(far.visible_segment_ids, BTreeSet::from([0]));
        let b = scene_b();
        assert_eq!(visibility_polygon(&b, &pt("5", "1")).unwrap().visible_segment_ids, BTreeSet::from([1]));
        assert!(matches!(visibility_polygon(&b, &pt("4", "5")), Err(VisibilityError::PointOnObstacle(0))));
    }

    #[test]
    fn oracle_examples() {
        let b = scene_b();
        let r = visible_count_oracle(&b, &pt("5", "1")).unwrap();
        assert_eq!((r.count, r.visible), (1, BTreeSet::from([1])));
        assert_eq!(visible_count_oracle(&b, &pt("0.5", "4")).unwrap().count, 2);
        assert_eq!(visible_count_oracle(&scene_a(), &pt("5", "5")).unwrap().count, 1);
        // On an obstacle the oracle falls back to per-segment tests.
        assert_eq!(visible_count_oracle(&b, &pt("5", "3")).unwrap().visible, BTreeSet::from([0, 1]));
    }

    #[test]
    fn endpoint_examples() {
        let b = scene_b();
        assert_eq!(visible_endpoint_count(&scene_a(), &pt("5", "1")).unwrap(), 2);
        assert_eq!(visible_endpoint_count(&b, &pt("5", "1")).unwrap(), 2);
        assert_eq!(visible_endpoint_count(&b, &pt("0.5", "4")).unwrap(), 4);
    }

    #[test]
    fn radial_segment_visibility() {
        // p on the supporting line of segment 0, with segment 1 in between.
        let scene = Scene::new(
            ten_box(),
            vec![Segment::new(Point::from_ints(6, 5), Point::from_ints(8, 5)), Segment::new(Point::from_ints(4, 4), Point::from_ints(4, 6))],
        )
        .unwrap();
        let p = Point::from_ints(1, 5);
        assert!(!sees_segment(&scene, &p, 0).unwrap());
        assert_eq!(visible_count_oracle(&scene, &p).unwrap().visible, BTreeSet::from([1]));
        let q = Point::from_ints(9, 5);
        assert!(sees_segment(&scene, &q, 0).unwrap());
        assert_eq!(visible_count_oracle(&scene, &q).unwrap().visible, BTreeSet::from([0, 1]));
        assert_eq!(visible_endpoint_count(&scene, &q).unwrap(), 3);
    }

    /// Disjoint integer segments on a tiny grid: lots of collinear and
    /// shared-coordinate degeneracies.
    fn lattice_scene(raw: &[(i64, i64, i64, i64)]) -> Scene {
        let mut segs: Vec<Segment> = Vec::new();
        for &(a, b, c, d) in raw {
            let Some(s) = Segment::try_new(Point::from_ints(a, b), Point::from_ints(c, d)) else { continue };
            if segs.iter().all(|t| !crate::geometry::segments_intersect(&s, t)) {
                segs.push(s);
            }
        }
        if segs.is_empty() {
            segs.push(Segment::new(Point::from_ints(1, 1), Point::from_ints(2, 3)));
        }
        Scene::new(Rect::new(Point::from_ints(0, 0), Point::from_ints(12, 12)), segs).unwrap()
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(300))]

        #[test]
        fn sweep_matches_per_segment_tests(
            raw in proptest::collection::vec((1i64..=11, 1i64..=11, 1i64..=11, 1i64..=11), 1..14),
            qx in 0i64..=24, qy in 0i64..=24,
        ) {
            let scene = lattice_scene(&raw);
            let p = Point::new(Scalar::from_ratio(qx, 2), Scalar::from_ratio(qy, 2));
            let brute: BTreeSet<SegmentId> = (0..scene.len()).filter(|&i| sees_segment(&scene, &p, i).unwrap()).collect();
            proptest::prop_assert_eq!(&visible_count_oracle(&scene, &p).unwrap().visible, &brute);
            if scene.segments_through(&p).next().is_none() {
                let poly = visibility_polygon(&scene, &p).unwrap();
                proptest::prop_assert_eq!(&poly.visible_segment_ids, &brute);
                proptest::prop_assert_eq!(fast::visible_set(&scene, &p), Some(sweep(&scene, &p, false).visible));
                let ends = scene.endpoints().filter(|(_, e)| sees_point(&scene, &p, e, None).unwrap()).count();
                proptest::prop_assert_eq!(poly.visible_endpoint_count, ends);
            }
        }

        #[test]
        fn sight_lines_are_symmetric(
            raw in proptest::collection::vec((1i64..=11, 1i64..=11, 1i64..=11, 1i64..=11), 1..10),
            a in (0i64..=24, 0i64..=24), b in (0i64..=24, 0i64..=24),
        ) {
            let scene = lattice_scene(&raw);
            let p = Point::new(Scalar::from_ratio(a.0, 2), Scalar::from_ratio(a.1, 2));
            let q = Point::new(Scalar::from_ratio(b.0, 2), Scalar::from_ratio(b.1, 2));
            let pq = sees_point(&scene, &p, &q, None).unwrap();
            proptest::prop_assert_eq!(pq, sees_point(&scene, &q, &p, None).unwrap());
            // Removing an obstacle never hides anything.
            if !pq && scene.len() > 1 {
                let fewer = Scene::new(scene.bbox().clone(), scene.segments()[1..].to_vec()).unwrap();
                let before = visible_count_oracle(&scene, &p).unwrap().visible;
                let after = visible_count_oracle(&fewer, &p).unwrap().visible;
                proptest::prop_assert!(before.iter().filter(|&&i| i > 0).all(|i| after.contains(&(i - 1))));
            }
        }
    }
}
