//! Colored triangle cover of the visibility regions and its edge set `E`.
//!
//! Triangles come from the labeled trapezoidal map: every positive-area
//! trapezoid is split along its bottom-left to top-right diagonal and each
//! half is emitted once per color in the trapezoid's label. Geometry is shared
//! between colors, so a cover stores shapes once and `(shape, color)` pairs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arrangement::FaceLabels;
use crate::evg::merge_collinear;
use crate::geometry::{point_in_triangle, Containment, Point, Rect, Segment, Triangle};
use crate::grid::BucketGrid;
use crate::scene::{sample_point, Scene, SegmentId};
use crate::trapmap::{Adjacency, TrapMap};
use crate::visibility::visible_count_oracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColoredTriangle {
    pub shape: usize,
    pub color: SegmentId,
}

/// A maximal piece of a region boundary and the colors whose membership
/// changes across it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverEdge {
    pub segment: Segment,
    pub colors: Vec<SegmentId>,
}

/// Colors whose triangles contain a point.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Membership {
    /// Interior containment count per color.
    pub colors: BTreeMap<SegmentId, usize>,
    /// The point lies on the boundary of some triangle.
    pub boundary: bool,
}

impl Membership {
    pub fn distinct(&self) -> usize {
        self.colors.len()
    }

    pub fn total(&self) -> usize {
        self.colors.values().sum()
    }

    pub fn contains(&self, color: SegmentId) -> bool {
        self.colors.contains_key(&color)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverStats {
    pub triangles: usize,
    pub shapes: usize,
    pub edges: usize,
    pub per_color: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Cover {
    bbox: Rect,
    colors: usize,
    shapes: Vec<Triangle>,
    /// Sorted by shape.
    triangles: Vec<ColoredTriangle>,
    /// `triangles[shape_start[s]..shape_start[s + 1]]` belong to shape `s`.
    shape_start: Vec<usize>,
    edges: Vec<CoverEdge>,
    grid: BucketGrid,
}

impl Cover {
    fn assemble(bbox: Rect, colors: usize, shapes: Vec<Triangle>, mut triangles: Vec<ColoredTriangle>, edges: Vec<CoverEdge>) -> Self {
        triangles.sort_by_key(|t| (t.shape, t.color));
        let mut shape_start = Vec::with_capacity(shapes.len() + 1);
        let mut k = 0;
        for s in 0..=shapes.len() {
            while k < triangles.len() && triangles[k].shape < s {
                k += 1;
            }
            shape_start.push(k);
        }
        let bounds: Vec<Rect> = shapes.iter().map(Triangle::bounds).collect();
        let grid = BucketGrid::new(&bbox, &bounds);
        Cover { bbox, colors, shapes, triangles, shape_start, edges, grid }
    }

    /// A cover from explicit colored triangles. Every triangle edge enters
    /// `E`, merged along lines per color.
    pub fn from_triangles(bbox: Rect, colors: usize, triangles: Vec<(Triangle, SegmentId)>) -> Self {
        let mut by_color: BTreeMap<SegmentId, Vec<Segment>> = BTreeMap::new();
        for (t, c) in &triangles {
            assert!(*c < colors, "color out of range");
            by_color.entry(*c).or_default().extend(t.edges());
        }
        let mut tagged: BTreeMap<(Point, Point), Vec<SegmentId>> = BTreeMap::new();
        for (c, segs) in by_color {
            for s in merge_collinear(segs) {
                tagged.entry((s.a, s.b)).or_default().push(c);
            }
        }
        let edges = tagged.into_iter().map(|((a, b), colors)| CoverEdge { segment: Segment::new(a, b), colors }).collect();
        let (shapes, colored): (Vec<Triangle>, Vec<ColoredTriangle>) =
            triangles.into_iter().enumerate().map(|(i, (t, color))| (t, ColoredTriangle { shape: i, color })).unzip();
        Cover::assemble(bbox, colors, shapes, colored, edges)
    }

    pub fn bbox(&self) -> &Rect {
        &self.bbox
    }

    pub fn color_count(&self) -> usize {
        self.colors
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangles(&self) -> &[ColoredTriangle] {
        &self.triangles
    }

    pub fn shape(&self, s: usize) -> &Triangle {
        &self.shapes[s]
    }

    pub fn shapes(&self) -> &[Triangle] {
        &self.shapes
    }

    pub fn edges(&self) -> &[CoverEdge] {
        &self.edges
    }

    /// Colors of the triangles sharing shape `s`.
    pub fn shape_colors(&self, s: usize) -> impl Iterator<Item = SegmentId> + '_ {
        self.triangles[self.shape_start[s]..self.shape_start[s + 1]].iter().map(|t| t.color)
    }

    pub fn membership(&self, p: &Point) -> Membership {
        let mut out = Membership::default();
        for &s in self.grid.at_point(p) {
            if self.shape_start[s] == self.shape_start[s + 1] {
                continue;
            }
            match point_in_triangle(p, &self.shapes[s]) {
                Containment::Inside => {
                    for c in self.shape_colors(s) {
                        *out.colors.entry(c).or_insert(0) += 1;
                    }
                }
                Containment::Boundary => out.boundary = true,
                Containment::Outside => {}
            }
        }
        out
    }

    /// The same cover with colored triangle `k` removed (edges unchanged).
    pub fn without_triangle(&self, k: usize) -> Cover {
        let mut triangles = self.triangles.clone();
        triangles.remove(k);
        Cover::assemble(self.bbox.clone(), self.colors, self.shapes.clone(), triangles, self.edges.clone())
    }

    /// Index of a colored triangle of largest area.
    pub fn largest_triangle(&self) -> Option<usize> {
        (0..self.triangles.len()).max_by(|&a, &b| {
            let (sa, sb) = (&self.shapes[self.triangles[a].shape], &self.shapes[self.triangles[b].shape]);
            sa.double_area().cmp(&sb.double_area()).then(b.cmp(&a))
        })
    }

    pub fn stats(&self) -> CoverStats {
        let mut per_color = alloc::vec![0; self.colors];
        for t in &self.triangles {
            per_color[t.color] += 1;
        }
        CoverStats { triangles: self.triangles.len(), shapes: self.shapes.len(), edges: self.edges.len(), per_color }
    }
}

fn symmetric_difference(a: &BTreeSet<SegmentId>, b: &BTreeSet<SegmentId>) -> Vec<SegmentId> {
    a.symmetric_difference(b).copied().collect()
}

/// Cover from a labeled map. `E` holds the boundary pieces between
/// differently labeled trapezoids, tagged with the colors that change.
pub fn build_cover(map: &TrapMap, labels: &FaceLabels, colors: usize) -> Cover {
    let mut shapes = Vec::new();
    let mut triangles = Vec::new();
    for t in 0..map.len() {
        let Some(label) = labels.label(t) else { continue };
        if label.is_empty() {
            continue;
        }
        for tri in map.triangles(t) {
            let shape = shapes.len();
            shapes.push(tri);
            triangles.extend(label.iter().map(|&color| ColoredTriangle { shape, color }));
        }
    }

    let mut raw: BTreeMap<Vec<SegmentId>, Vec<Segment>> = BTreeMap::new();
    for t in 0..map.len() {
        let Some(lt) = labels.label(t) else { continue };
        for &(u, kind) in map.neighbors(t) {
            if u < t {
                continue;
            }
            let Some(lu) = labels.label(u) else { continue };
            let diff = symmetric_difference(lt, lu);
            if diff.is_empty() {
                continue;
            }
            let (Some(ct), Some(cu)) = (map.corners(t), map.corners(u)) else { continue };
            let piece = match kind {
                Adjacency::Wall => continue,
                Adjacency::Piece(pc) => {
                    let x0 = if ct[0].x > cu[0].x { &ct[0].x } else { &cu[0].x };
                    let x1 = if ct[1].x < cu[1].x { &ct[1].x } else { &cu[1].x };
                    let s = map.piece_segment(pc);
                    Segment::new(Point::new(x0.clone(), s.y_at(x0)), Point::new(x1.clone(), s.y_at(x1)))
                }
                Adjacency::Vertical => {
                    // One trap ends where the other starts; overlap their walls.
                    let (left, right) = if ct[1].x == cu[0].x { (&ct, &cu) } else { (&cu, &ct) };
                    let x = left[1].x.clone();
                    let y0 = if left[1].y > right[0].y { &left[1].y } else { &right[0].y };
                    let y1 = if left[2].y < right[3].y { &left[2].y } else { &right[3].y };
                    Segment::new(Point::new(x.clone(), y0.clone()), Point::new(x, y1.clone()))
                }
            };
            raw.entry(diff).or_default().push(piece);
        }
    }
    let mut edges = Vec::new();
    for (colors, pieces) in raw {
        for segment in merge_collinear(pieces) {
            edges.push(CoverEdge { segment, colors: colors.clone() });
        }
    }
    Cover::assemble(map.bbox().clone(), colors, shapes, triangles, edges)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverCounterexample {
    pub point: Point,
    pub color: SegmentId,
    pub in_cover: bool,
    pub visible: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoverReport {
    pub samples: usize,
    /// Drawn points rejected for lying on a triangle boundary or a segment.
    pub rejected: usize,
    pub counterexamples: Vec<CoverCounterexample>,
}

/// Compares membership with the oracle at `samples` seeded points off all
/// triangle boundaries and segments.
pub fn verify_cover(cover: &Cover, scene: &Scene, samples: usize, seed: u64) -> CoverReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CoverReport::default();
    while report.samples < samples {
        let p = sample_point(&mut rng, scene.bbox());
        let m = cover.membership(&p);
        if m.boundary || scene.on_any_segment(&p) {
            report.rejected += 1;
            assert!(report.rejected <= 100 * samples.max(1), "no general-position samples");
            continue;
        }
        report.samples += 1;
        let visible = visible_count_oracle(scene, &p).expect("sample inside the box").visible;
        for color in 0..cover.color_count() {
            let (in_cover, seen) = (m.contains(color), visible.contains(&color));
            if in_cover != seen {
                report.counterexamples.push(CoverCounterexample { point: p.clone(), color, in_cover, visible: seen });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::Arrangement;
    use crate::geometry::{segments_intersect, Rect};
    use crate::scene::{generate_random, GenParams};
    use alloc::vec;

    fn pt(x: &str, y: &str) -> Point {
        Point::new(x.parse().unwrap(), y.parse().unwrap())
    }

    fn ten_box() -> Rect {
        Rect::new(Point::from_ints(0, 0), Point::from_ints(10, 10))
    }

    fn scene_b() -> Scene {
        Scene::new(ten_box(), vec![Segment::new(pt("3", "5"), pt("7", "5")), Segment::new(pt("3.5", "3"), pt("6.5", "3"))]).unwrap()
    }

    fn cover_of(scene: &Scene) -> Cover {
        let arr = Arrangement::build(scene, 1).unwrap();
        build_cover(&arr.map, &arr.labels, scene.len())
    }

    #[test]
    fn single_segment_covers_everything() {
        let scene = Scene::new(ten_box(), vec![Segment::new(pt("4", "4"), pt("6", "4"))]).unwrap();
        let cover = cover_of(&scene);
        assert!(cover.edges().is_empty());
        let report = verify_cover(&cover, &scene, 300, 2);
        assert!(report.counterexamples.is_empty());
        for p in [pt("1", "1"), pt("5", "9.5"), pt("0.25", "7")] {
            let m = cover.membership(&p);
            assert!(m.boundary || m.contains(0));
        }
    }

    #[test]
    fn scene_b_membership() {
        let b = scene_b();
        let cover = cover_of(&b);
        let m = cover.membership(&pt("5", "1"));
        assert!(!m.boundary);
        assert_eq!(m.colors, BTreeMap::from([(1, 1)]));
        let m = cover.membership(&pt("0.5", "4"));
        assert_eq!(m.colors, BTreeMap::from([(0, 1), (1, 1)]));
        assert!(verify_cover(&cover, &b, 1000, 5).counterexamples.is_empty());
        let mutated = cover.without_triangle(cover.largest_triangle().unwrap());
        assert!(!verify_cover(&mutated, &b, 1000, 5).counterexamples.is_empty());
        assert!(verify_cover(&cover, &b, 0, 5).counterexamples.is_empty());
    }

    #[test]
    fn generated_covers_are_exact() {
        for seed in 0..3 {
            let scene = generate_random(&GenParams::new(6), seed).unwrap();
            let cover = cover_of(&scene);
            let report = verify_cover(&cover, &scene, 400, seed);
            assert!(report.counterexamples.is_empty(), "{:?}", report.counterexamples.first());
            assert!(cover.edges().len() <= 3 * cover.len());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..200 {
                let p = sample_point(&mut rng, scene.bbox());
                let m = cover.membership(&p);
                if m.boundary || scene.on_any_segment(&p) {
                    continue;
                }
                assert!(m.colors.values().all(|&k| k == 1));
                assert_eq!(m.total(), visible_count_oracle(&scene, &p).unwrap().count);
            }
        }
    }

    #[test]
    fn boundary_edges_separate_changes() {
        let scene = generate_random(&GenParams::new(5), 11).unwrap();
        let cover = cover_of(&scene);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 200 {
            let p = sample_point(&mut rng, scene.bbox());
            let q = sample_point(&mut rng, scene.bbox());
            if scene.on_any_segment(&p) || scene.on_any_segment(&q) {
                continue;
            }
            let vp = visible_count_oracle(&scene, &p).unwrap().visible;
            let vq = visible_count_oracle(&scene, &q).unwrap().visible;
            let pq = Segment::new(p, q);
            for c in vp.symmetric_difference(&vq) {
                assert!(cover.edges().iter().any(|e| e.colors.contains(c) && segments_intersect(&e.segment, &pq)));
            }
            checked += 1;
        }
    }

    #[test]
    fn explicit_triangles() {
        let t = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| Triangle::new(Point::from_ints(a.0, a.1), Point::from_ints(b.0, b.1), Point::from_ints(c.0, c.1)).unwrap();
        let cover = Cover::from_triangles(ten_box(), 2, vec![(t((0, 0), (4, 0), (0, 4)), 0), (t((4, 0), (4, 4), (0, 4)), 0), (t((1, 1), (9, 1), (1, 9)), 1)]);
        // The shared diagonal of color 0 stays one edge; the squares' outline is merged.
        assert_eq!(cover.edges().iter().filter(|e| e.colors == vec![0]).count(), 5);
        assert_eq!(cover.edges().iter().filter(|e| e.colors == vec![1]).count(), 3);
        let m = cover.membership(&pt("1.5", "1.5"));
        assert_eq!(m.colors, BTreeMap::from([(0, 1), (1, 1)]));
        assert!(cover.membership(&pt("2", "2")).boundary);
        assert_eq!(cover.stats().per_color, vec![2, 1]);
    }
}
