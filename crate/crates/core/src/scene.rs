//! Obstacle scenes: validation, degeneracy audit and seeded generation.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{orient, segment_dist2, segments_intersect, Orientation, Point, Rect, Segment};
use crate::scalar::Scalar;

pub type SegmentId = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SceneError {
    #[error("scene has no segments")]
    Empty,
    #[error("bounding box has zero width or height")]
    DegenerateBox,
    #[error("segment {0} has coincident endpoints")]
    DegenerateSegment(SegmentId),
    #[error("segment {0} is not strictly inside the bounding box")]
    OutOfBounds(SegmentId),
    #[error("segments {0} and {1} intersect")]
    DisjointnessViolation(SegmentId, SegmentId),
    #[error("generation exhausted its attempt budget after placing {placed} of {wanted} segments")]
    GenerationExhausted { placed: usize, wanted: usize },
}

/// Identifies endpoint `end` (0 = `a`, 1 = `b`) of segment `segment`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EndpointRef {
    pub segment: SegmentId,
    pub end: u8,
}

/// Degeneracies that are legal but worth knowing about.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeneralPositionReport {
    /// Three endpoints of three distinct segments on one line.
    pub collinear_endpoints: Vec<[EndpointRef; 3]>,
    /// Two endpoints with the same x coordinate.
    pub shared_x: Vec<[EndpointRef; 2]>,
    /// An endpoint on the supporting line of another segment.
    pub endpoint_on_segment_line: Vec<(EndpointRef, SegmentId)>,
}

impl GeneralPositionReport {
    pub fn is_clean(&self) -> bool {
        self.collinear_endpoints.is_empty() && self.shared_x.is_empty() && self.endpoint_on_segment_line.is_empty()
    }
}

/// Disjoint closed segments strictly inside a bounding box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scene {
    bbox: Rect,
    segments: Vec<Segment>,
}

impl Scene {
    /// Builds a scene, rejecting hard violations.
    pub fn new(bbox: Rect, segments: Vec<Segment>) -> Result<Self, SceneError> {
        let scene = Scene { bbox, segments };
        scene.check_hard()?;
        Ok(scene)
    }

    /// Builds from raw endpoint pairs (for loaders that may see `a == b`).
    pub fn from_endpoints(bbox: Rect, endpoints: Vec<(Point, Point)>) -> Result<Self, SceneError> {
        let mut segments = Vec::with_capacity(endpoints.len());
        for (i, (a, b)) in endpoints.into_iter().enumerate() {
            segments.push(Segment::try_new(a, b).ok_or(SceneError::DegenerateSegment(i))?);
        }
        Scene::new(bbox, segments)
    }

    pub fn bbox(&self) -> &Rect {
        &self.bbox
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, id: SegmentId) -> &Segment {
        &self.segments[id]
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn endpoint(&self, e: EndpointRef) -> &Point {
        let s = &self.segments[e.segment];
        if e.end == 0 {
            &s.a
        } else {
            &s.b
        }
    }

    pub fn endpoints(&self) -> impl Iterator<Item = (EndpointRef, &Point)> + '_ {
        self.segments.iter().enumerate().flat_map(|(i, s)| {
            [(EndpointRef { segment: i, end: 0 }, &s.a), (EndpointRef { segment: i, end: 1 }, &s.b)]
        })
    }

    /// Segments containing `p`.
    pub fn segments_through(&self, p: &Point) -> impl Iterator<Item = SegmentId> + '_ {
        let p = p.clone();
        self.segments.iter().enumerate().filter(move |(_, s)| s.contains(&p)).map(|(i, _)| i)
    }

    pub fn on_any_segment(&self, p: &Point) -> bool {
        self.segments.iter().any(|s| s.contains(p))
    }

    fn check_hard(&self) -> Result<(), SceneError> {
        if self.segments.is_empty() {
            return Err(SceneError::Empty);
        }
        if !self.bbox.is_proper() {
            return Err(SceneError::DegenerateBox);
        }
        for (i, s) in self.segments.iter().enumerate() {
            if s.a == s.b {
                return Err(SceneError::DegenerateSegment(i));
            }
            if !self.bbox.strictly_contains(&s.a) || !self.bbox.strictly_contains(&s.b) {
                return Err(SceneError::OutOfBounds(i));
            }
        }
        for i in 0..self.segments.len() {
            for j in i + 1..self.segments.len() {
                if segments_intersect(&self.segments[i], &self.segments[j]) {
                    return Err(SceneError::DisjointnessViolation(i, j));
                }
            }
        }
        Ok(())
    }

    /// Re-checks the hard invariants and audits general position.
    pub fn validate(&self) -> Result<GeneralPositionReport, SceneError> {
        self.check_hard()?;
        let ends: Vec<(EndpointRef, &Point)> = self.endpoints().collect();
        let mut report = GeneralPositionReport::default();
        for i in 0..ends.len() {
            for j in i + 1..ends.len() {
                if ends[i].1.x == ends[j].1.x {
                    report.shared_x.push([ends[i].0, ends[j].0]);
                }
            }
        }
        for (e, p) in &ends {
            for (sid, s) in self.segments.iter().enumerate() {
                if sid != e.segment && orient(&s.a, &s.b, p) == Orientation::Collinear {
                    report.endpoint_on_segment_line.push((*e, sid));
                }
            }
        }
        for i in 0..ends.len() {
            for j in i + 1..ends.len() {
                if ends[j].0.segment == ends[i].0.segment {
                    continue;
                }
                for k in j + 1..ends.len() {
                    if ends[k].0.segment == ends[i].0.segment || ends[k].0.segment == ends[j].0.segment {
                        continue;
                    }
                    if orient(ends[i].1, ends[j].1, ends[k].1) == Orientation::Collinear {
                        report.collinear_endpoints.push([ends[i].0, ends[j].0, ends[k].0]);
                    }
                }
            }
        }
        Ok(report)
    }
}

/// Seeded point strictly inside `bbox` on its `2^-16` sub-lattice.
pub fn sample_point(rng: &mut impl Rng, bbox: &Rect) -> Point {
    const DEN: i64 = 1 << 16;
    let x = &bbox.min.x + &(&bbox.width() * &Scalar::from_ratio(rng.random_range(1..DEN), DEN));
    let y = &bbox.min.y + &(&bbox.height() * &Scalar::from_ratio(rng.random_range(1..DEN), DEN));
    Point::new(x, y)
}

/// Parameters for [`generate_random`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub n: usize,
    pub bbox: Rect,
    /// Lattice resolution: endpoints lie on `bbox.min + (i, j) * size / grid`.
    pub grid: u32,
    pub min_separation: Scalar,
    pub max_len: Scalar,
    /// Candidate draws allowed per requested segment.
    pub attempts_per_segment: usize,
}

impl GenParams {
    /// Defaults: `[0, 1000]²`, unit lattice, separation 10, length ≤ 500.
    pub fn new(n: usize) -> Self {
        GenParams {
            n,
            bbox: Rect::new(Point::from_ints(0, 0), Point::from_ints(1000, 1000)),
            grid: 1000,
            min_separation: Scalar::from_int(10),
            max_len: Scalar::from_int(500),
            attempts_per_segment: 2000,
        }
    }
}

/// Rejection-samples `n` lattice segments in general position.
///
/// A candidate is accepted iff it keeps distance `>= min_separation` from all
/// accepted segments and introduces no shared x coordinate and no collinear
/// endpoint triple. The total budget is `n * attempts_per_segment` draws.
pub fn generate_random(params: &GenParams, seed: u64) -> Result<Scene, SceneError> {
    assert!(params.n >= 1, "n must be positive");
    assert!(params.min_separation.signum() == core::cmp::Ordering::Greater, "min_separation must be positive");
    assert!(params.grid >= 4, "lattice too coarse");
    let grid = params.grid as i64;
    let step_x = &params.bbox.width() / &Scalar::from_int(grid);
    let step_y = &params.bbox.height() / &Scalar::from_int(grid);
    let to_point = |(i, j): (i64, i64)| {
        Point::new(
            &params.bbox.min.x + &(&step_x * &Scalar::from_int(i)),
            &params.bbox.min.y + &(&step_y * &Scalar::from_int(j)),
        )
    };
    // Largest lattice offset that could still respect max_len.
    let min_step = if step_x < step_y { step_x.clone() } else { step_y.clone() };
    let reach = (&params.max_len / &min_step).floor();
    let reach: i64 = num_traits::ToPrimitive::to_i64(&reach).unwrap_or(grid).clamp(1, grid);
    let max_len2 = &params.max_len * &params.max_len;
    let sep2 = &params.min_separation * &params.min_separation;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lattice: Vec<[(i64, i64); 2]> = Vec::with_capacity(params.n);
    let mut segments: Vec<Segment> = Vec::with_capacity(params.n);
    let budget = params.n.saturating_mul(params.attempts_per_segment);
    let mut attempts = 0usize;
    while segments.len() < params.n {
        if attempts >= budget {
            return Err(SceneError::GenerationExhausted { placed: segments.len(), wanted: params.n });
        }
        attempts += 1;
        let a = (rng.random_range(1..grid), rng.random_range(1..grid));
        let d = (rng.random_range(-reach..=reach), rng.random_range(-reach..=reach));
        if d == (0, 0) {
            continue;
        }
        let b = (a.0 + d.0, a.1 + d.1);
        if b.0 <= 0 || b.0 >= grid || b.1 <= 0 || b.1 >= grid {
            continue;
        }
        if !lattice_general_position(&lattice, [a, b]) {
            continue;
        }
        let cand = Segment::new(to_point(a), to_point(b));
        if cand.direction().norm2() > max_len2 {
            continue;
        }
        if segments.iter().any(|s| segment_dist2(s, &cand) < sep2) {
            continue;
        }
        lattice.push([a, b]);
        segments.push(cand);
    }
    Scene::new(params.bbox.clone(), segments)
}

fn cross_i(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i128 {
    (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
}

/// Lattice-space general-position test for adding `cand` to `placed`.
fn lattice_general_position(placed: &[[(i64, i64); 2]], cand: [(i64, i64); 2]) -> bool {
    if cand[0].0 == cand[1].0 {
        return false;
    }
    let old: Vec<(i64, i64)> = placed.iter().flatten().copied().collect();
    for p in &cand {
        if old.iter().any(|q| q.0 == p.0) {
            return false;
        }
    }
    // Any collinear triple involving a new endpoint (this also covers an
    // endpoint on another segment's supporting line).
    for i in 0..old.len() {
        for j in i + 1..old.len() {
            for p in &cand {
                if cross_i(old[i], old[j], *p) == 0 {
                    return false;
                }
            }
        }
        if cross_i(cand[0], cand[1], old[i]) == 0 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pt(x: &str, y: &str) -> Point {
        Point::new(x.parse().unwrap(), y.parse().unwrap())
    }

    fn ten_box() -> Rect {
        Rect::new(Point::from_ints(0, 0), Point::from_ints(10, 10))
    }

    fn scene_b() -> Scene {
        Scene::new(
            ten_box(),
            vec![Segment::new(pt("3", "5"), pt("7", "5")), Segment::new(pt("3.5", "3"), pt("6.5", "3"))],
        )
        .unwrap()
    }

    #[test]
    fn crossing_segments_rejected() {
        let err = Scene::new(
            ten_box(),
            vec![
                Segment::new(Point::from_ints(1, 1), Point::from_ints(5, 5)),
                Segment::new(Point::from_ints(1, 5), Point::from_ints(5, 1)),
            ],
        )
        .unwrap_err();
        assert_eq!(err, SceneError::DisjointnessViolation(0, 1));
    }

    #[test]
    fn shared_endpoint_is_a_violation() {
        let err = Scene::new(
            ten_box(),
            vec![
                Segment::new(Point::from_ints(1, 1), Point::from_ints(5, 5)),
                Segment::new(Point::from_ints(5, 5), Point::from_ints(8, 1)),
            ],
        )
        .unwrap_err();
        assert_eq!(err, SceneError::DisjointnessViolation(0, 1));
    }

    #[test]
    fn out_of_bounds_and_degenerate() {
        let touching = Scene::new(ten_box(), vec![Segment::new(Point::from_ints(0, 1), Point::from_ints(3, 3))]);
        assert_eq!(touching.unwrap_err(), SceneError::OutOfBounds(0));
        let zero = Scene::from_endpoints(ten_box(), vec![(Point::from_ints(2, 2), Point::from_ints(2, 2))]);
        assert_eq!(zero.unwrap_err(), SceneError::DegenerateSegment(0));
        assert_eq!(Scene::new(ten_box(), vec![]).unwrap_err(), SceneError::Empty);
    }

    #[test]
    fn scene_b_report() {
        // The two horizontals share x = 3? No: 3, 7, 3.5, 6.5 are distinct,
        // but each segment's endpoints are level, so nothing else is flagged.
        let r = scene_b().validate().unwrap();
        assert!(r.collinear_endpoints.is_empty());
        assert!(r.shared_x.is_empty());
        assert!(r.endpoint_on_segment_line.is_empty());
        assert!(r.is_clean());
    }

    #[test]
    fn collinear_endpoints_are_flagged_not_rejected() {
        let s = Scene::new(
            ten_box(),
            vec![
                Segment::new(Point::from_ints(1, 1), Point::from_ints(1, 3)),
                Segment::new(Point::from_ints(2, 2), Point::from_ints(3, 8)),
                Segment::new(Point::from_ints(4, 4), Point::from_ints(6, 1)),
            ],
        )
        .unwrap();
        let r = s.validate().unwrap();
        assert!(r.collinear_endpoints.iter().any(|t| t.iter().map(|e| e.segment).collect::<Vec<_>>() == vec![0, 1, 2]));
        assert!(!r.shared_x.is_empty());
        assert!(!r.is_clean());
    }

    #[test]
    fn generation_is_deterministic() {
        let p = GenParams::new(10);
        assert_eq!(generate_random(&p, 42).unwrap(), generate_random(&p, 42).unwrap());
        assert_ne!(generate_random(&p, 42).unwrap(), generate_random(&p, 43).unwrap());
    }

    #[test]
    fn generated_single_segment_is_valid() {
        let s = generate_random(&GenParams::new(1), 0).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.validate().unwrap().is_clean());
    }

    #[test]
    fn generated_forty_are_pairwise_disjoint() {
        let s = generate_random(&GenParams::new(40), 7).unwrap();
        assert_eq!(s.len(), 40);
        // Independent O(n²) check with the full intersection classifier.
        for i in 0..40 {
            for j in i + 1..40 {
                assert_eq!(
                    crate::geometry::segment_intersection(s.segment(i), s.segment(j)),
                    crate::geometry::Intersection::Empty
                );
            }
        }
        assert!(s.validate().unwrap().is_clean());
    }

    #[test]
    fn over_constrained_generation_exhausts() {
        let mut p = GenParams::new(200);
        p.bbox = Rect::new(Point::from_ints(0, 0), Point::from_ints(20, 20));
        p.grid = 20;
        p.min_separation = Scalar::from_int(3);
        p.max_len = Scalar::from_int(5);
        p.attempts_per_segment = 20;
        assert!(matches!(generate_random(&p, 1), Err(SceneError::GenerationExhausted { wanted: 200, .. })));
    }
}
