//! Random-sampling cutting over the cover edges and the correction walk.
//!
//! A sample of `r` edges of `E` is decomposed into trapezoids, and every
//! trapezoid is split along its bottom-left to top-right diagonal into
//! triangular cells. Each cell records the edges of `E` crossing its interior
//! and the edges lying along its boundary.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cover::{Cover, CoverEdge};
use crate::evg::line_key;
use crate::geometry::{orient, point_in_triangle, Containment, segment_crosses_triangle_interior, segment_intersection, segment_meets_triangle, segments_intersect, Intersection, Orientation, Point, Rect, Segment, Triangle};
use crate::grid::BucketGrid;
use crate::scalar::Scalar;
use crate::scene::{Scene, SegmentId};
use crate::trapmap::{build_trap_map, Located, TrapId, TrapMap, TrapMapError};
use crate::visibility::segment_visible_from;

pub type CellId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct CuttingParams {
    /// Tradeoff parameter in `(0, 1)`.
    pub alpha: Scalar,
    pub crossing_bound_constant: f64,
    pub cell_bound_constant: f64,
    pub max_retries: u32,
}

impl CuttingParams {
    /// Constants 4 and 8, at most 16 retries.
    pub fn new(alpha: Scalar) -> Self {
        CuttingParams { alpha, crossing_bound_constant: 4.0, cell_bound_constant: 8.0, max_retries: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CuttingError {
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(Scalar),
    #[error("no sample met the bounds after {retries} retries: max crossing list {max_crossing} (bound {crossing_bound:.2}), {cells} cells (bound {cell_bound:.2})")]
    RetryExhausted { retries: u32, max_crossing: usize, crossing_bound: f64, cells: usize, cell_bound: f64 },
    #[error("trapezoidal map of the sample failed: {0}")]
    Map(#[from] TrapMapError),
}

/// Sample size `max(2, ceil(m^(1 - alpha)))`, capped at `m`, computed exactly.
pub fn sample_size(m: usize, alpha: &Scalar) -> usize {
    let (p, q) = (alpha.numer(), alpha.denom());
    let q: u32 = q.try_into().expect("alpha denominator too large");
    let p: u32 = p.try_into().expect("alpha must lie in (0, 1)");
    let target = num_traits::pow(BigInt::from(m), (q - p) as usize);
    // Smallest r with r^q >= m^(q - p).
    let (mut lo, mut hi) = (1usize, m.max(1));
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if num_traits::pow(BigInt::from(mid), q as usize) >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo.max(2).min(m)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub triangle: Triangle,
    pub trap: TrapId,
    /// 0 below the trapezoid's diagonal, 1 above.
    pub half: usize,
}

#[derive(Debug, Clone)]
pub struct Cutting {
    pub alpha: Scalar,
    pub r: usize,
    /// Seed that produced the accepted sample.
    pub sample_seed: u64,
    pub retry_count: u32,
    pub sample: Vec<usize>,
    edges: Vec<CoverEdge>,
    map: TrapMap,
    cells: Vec<Cell>,
    cell_of: Vec<[Option<CellId>; 2]>,
    crossing: Vec<Vec<usize>>,
    boundary: Vec<Vec<usize>>,
    adjacency: Vec<Vec<CellId>>,
    edge_grid: BucketGrid,
    cell_grid: BucketGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CuttingStats {
    pub edges: usize,
    pub r: usize,
    pub cells: usize,
    pub retry_count: u32,
    pub max_crossing: usize,
    pub crossing_bound: f64,
    pub cell_bound: f64,
    /// Cells per crossing-list length.
    pub crossing_histogram: BTreeMap<usize, usize>,
}

fn crossing_bound(params: &CuttingParams, m: usize, r: usize) -> f64 {
    if r < 2 {
        return m as f64;
    }
    params.crossing_bound_constant * (m as f64 / r as f64) * Float::ln(r as f64)
}

/// Whether `e` shares a positive-length piece with an edge of `t`.
fn along_boundary(e: &Segment, t: &Triangle) -> bool {
    t.edges().iter().any(|side| {
        orient(&side.a, &side.b, &e.a) == Orientation::Collinear
            && orient(&side.a, &side.b, &e.b) == Orientation::Collinear
            && matches!(segment_intersection(side, e), Intersection::Overlap(_))
    })
}

/// Cells sharing a boundary piece of positive length.
fn cell_adjacency(cells: &[Cell]) -> Vec<Vec<CellId>> {
    let mut lines: BTreeMap<(Scalar, Scalar, Scalar), Vec<(Point, Point, CellId)>> = BTreeMap::new();
    for (id, c) in cells.iter().enumerate() {
        for side in c.triangle.edges() {
            let (a, b) = side.lex_sorted();
            lines.entry(line_key(&side)).or_default().push((a.clone(), b.clone(), id));
        }
    }
    let mut adj: Vec<BTreeSet<CellId>> = vec![BTreeSet::new(); cells.len()];
    for (_, mut spans) in lines {
        spans.sort();
        // Sweep along the line keeping spans that are still open.
        let mut open: Vec<(Point, CellId)> = Vec::new();
        for (a, b, id) in spans {
            open.retain(|(end, _)| *end > a);
            for &(_, other) in &open {
                if other != id {
                    adj[id].insert(other);
                    adj[other].insert(id);
                }
            }
            open.push((b, id));
        }
    }
    adj.into_iter().map(|s| s.into_iter().collect()).collect()
}

impl Cutting {
    /// Cutting of a given sample; `seed` drives the trapezoidal map.
    pub fn from_sample(edges: &[CoverEdge], bbox: &Rect, alpha: Scalar, sample: Vec<usize>, seed: u64, retry_count: u32) -> Result<Self, TrapMapError> {
        let r = sample.len();
        let segs: Vec<Segment> = sample.iter().map(|&i| edges[i].segment.clone()).collect();
        let map = build_trap_map(&segs, bbox, seed)?;
        let mut cells = Vec::new();
        let mut cell_of = vec![[None, None]; map.len()];
        for t in 0..map.len() {
            let Some([bl, br, tr, tl]) = map.corners(t) else { continue };
            for (half, tri) in [Triangle::new(bl.clone(), br, tr.clone()), Triangle::new(bl, tr, tl)].into_iter().enumerate() {
                if let Some(triangle) = tri {
                    cell_of[t][half] = Some(cells.len());
                    cells.push(Cell { triangle, trap: t, half });
                }
            }
        }
        let edge_bounds: Vec<Rect> = edges.iter().map(|e| e.segment.bounds()).collect();
        let edge_grid = BucketGrid::new(bbox, &edge_bounds);
        let cell_bounds: Vec<Rect> = cells.iter().map(|c| c.triangle.bounds()).collect();
        let cell_grid = BucketGrid::new(bbox, &cell_bounds);
        let mut crossing = Vec::with_capacity(cells.len());
        let mut boundary = Vec::with_capacity(cells.len());
        for (c, b) in cells.iter().zip(&cell_bounds) {
            let mut cross = Vec::new();
            let mut along = Vec::new();
            for e in edge_grid.overlapping(b) {
                let s = &edges[e].segment;
                if !s.bounds().overlaps(b) {
                    continue;
                }
                if segment_crosses_triangle_interior(s, &c.triangle) {
                    cross.push(e);
                } else if along_boundary(s, &c.triangle) {
                    along.push(e);
                }
            }
            crossing.push(cross);
            boundary.push(along);
        }
        let adjacency = cell_adjacency(&cells);
        Ok(Cutting { alpha, r, sample_seed: seed, retry_count, sample, edges: edges.to_vec(), map, cells, cell_of, crossing, boundary, adjacency, edge_grid, cell_grid })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn bbox(&self) -> &Rect {
        self.map.bbox()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, c: CellId) -> &Cell {
        &self.cells[c]
    }

    pub fn edges(&self) -> &[CoverEdge] {
        &self.edges
    }

    pub fn map(&self) -> &TrapMap {
        &self.map
    }

    /// Edges of `E` meeting the interior of cell `c`.
    pub fn crossing_list(&self, c: CellId) -> &[usize] {
        &self.crossing[c]
    }

    /// Edges of `E` running along the boundary of cell `c`.
    pub fn boundary_list(&self, c: CellId) -> &[usize] {
        &self.boundary[c]
    }

    pub fn neighbors(&self, c: CellId) -> &[CellId] {
        &self.adjacency[c]
    }

    /// Exhaustive crossing list of cell `c` (for audits).
    pub fn crossing_list_exhaustive(&self, c: CellId) -> Vec<usize> {
        let t = &self.cells[c].triangle;
        (0..self.edges.len()).filter(|&e| segment_crosses_triangle_interior(&self.edges[e].segment, t)).collect()
    }

    /// The cell whose open interior contains `p`, if any.
    pub fn locate(&self, p: &Point) -> Option<CellId> {
        let Located::Trap(t) = self.map.locate(p) else { return None };
        if !self.map.strictly_inside(t, p) {
            return None;
        }
        self.cell_of[t][self.map.diagonal_side(t, p)?]
    }

    /// Cells whose closure contains `p`.
    pub fn cells_touching(&self, p: &Point) -> Vec<CellId> {
        let probe = Rect::spanning(p, p);
        self.cell_grid.overlapping(&probe).into_iter().filter(|&c| point_in_triangle(p, &self.cells[c].triangle) != Containment::Outside).collect()
    }

    /// Whether `p` lies on an edge of `E`.
    pub fn on_edge(&self, p: &Point) -> bool {
        self.edge_grid.at_point(p).iter().any(|&e| self.edges[e].segment.contains(p))
    }

    pub fn max_crossing(&self) -> usize {
        self.crossing.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn stats(&self, params: &CuttingParams) -> CuttingStats {
        let mut crossing_histogram = BTreeMap::new();
        for l in &self.crossing {
            *crossing_histogram.entry(l.len()).or_insert(0) += 1;
        }
        CuttingStats {
            edges: self.edges.len(),
            r: self.r,
            cells: self.cells.len(),
            retry_count: self.retry_count,
            max_crossing: self.max_crossing(),
            crossing_bound: crossing_bound(params, self.edges.len(), self.r),
            cell_bound: params.cell_bound_constant * (self.r * self.r) as f64,
            crossing_histogram,
        }
    }
}

/// Samples `r` edges of `E` and builds the cutting, re-sampling with the next
/// seed while the crossing or cell bound is violated.
pub fn build_cutting(edges: &[CoverEdge], bbox: &Rect, params: &CuttingParams, seed: u64) -> Result<Cutting, CuttingError> {
    let alpha = &params.alpha;
    if alpha.signum() != core::cmp::Ordering::Greater || *alpha >= Scalar::one() {
        return Err(CuttingError::InvalidAlpha(alpha.clone()));
    }
    let m = edges.len();
    let r = sample_size(m, alpha);
    let cross_bound = crossing_bound(params, m, r);
    let cell_bound = params.cell_bound_constant * ((r * r).max(1)) as f64;
    let mut last = (0, 0);
    for attempt in 0..=params.max_retries {
        let s = seed.wrapping_add(attempt as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let mut sample = rand::seq::index::sample(&mut rng, m, r).into_vec();
        sample.sort_unstable();
        let cutting = Cutting::from_sample(edges, bbox, alpha.clone(), sample, s, attempt)?;
        let (mc, cells) = (cutting.max_crossing(), cutting.len());
        if mc as f64 <= cross_bound && cells as f64 <= cell_bound {
            return Ok(cutting);
        }
        last = (mc, cells);
    }
    Err(CuttingError::RetryExhausted { retries: params.max_retries, max_crossing: last.0, crossing_bound: cross_bound, cells: last.1, cell_bound })
}

/// Point-to-color visibility used by the correction walk.
pub trait ColorVisibility {
    fn sees_color(&self, p: &Point, color: SegmentId) -> bool;
}

impl ColorVisibility for Scene {
    fn sees_color(&self, p: &Point, color: SegmentId) -> bool {
        segment_visible_from(self, p, color)
    }
}

/// Membership in the cover stands in for visibility.
impl ColorVisibility for Cover {
    fn sees_color(&self, p: &Point, color: SegmentId) -> bool {
        self.membership(p).contains(color)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WalkError {
    /// An endpoint of the walk lies on an edge of `E`.
    DegeneratePath(Point),
    /// An endpoint of the walk is outside every cell.
    OutOfBounds(Point),
    /// Corrections drove the count below zero.
    NegativeCount,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WalkOutcome {
    pub count: usize,
    pub cells_visited: usize,
    pub candidates_scanned: usize,
    pub colors_tested: usize,
    pub corrections: i64,
}

/// Applies `±1` per color of the candidate edges meeting `[q, q']` whose
/// visibility differs between the ends.
fn correct(count: usize, q1: &Point, q2: &Point, kept: &BTreeSet<SegmentId>, vis: &impl ColorVisibility, out: &mut WalkOutcome) -> Result<(), WalkError> {
    let mut value = count as i64;
    for &c in kept {
        match (vis.sees_color(q1, c), vis.sees_color(q2, c)) {
            (false, true) => out.corrections += 1,
            (true, false) => out.corrections -= 1,
            _ => {}
        }
    }
    out.colors_tested = kept.len();
    value += out.corrections;
    out.count = usize::try_from(value).map_err(|_| WalkError::NegativeCount)?;
    Ok(())
}

/// Count at `q2` from the count at `q1`, walking the cells that meet the
/// closed segment `[q1, q2]`.
pub fn correction_walk(q1: &Point, count: usize, q2: &Point, vis: &impl ColorVisibility, cutting: &Cutting) -> Result<WalkOutcome, WalkError> {
    for q in [q1, q2] {
        if !cutting.bbox().contains(q) {
            return Err(WalkError::OutOfBounds(q.clone()));
        }
        if cutting.on_edge(q) {
            return Err(WalkError::DegeneratePath(q.clone()));
        }
    }
    let mut out = WalkOutcome { count, ..WalkOutcome::default() };
    if q1 == q2 {
        return Ok(out);
    }
    let path = Segment::new(q1.clone(), q2.clone());
    let start = cutting.cells_touching(q1);
    if start.is_empty() {
        return Err(WalkError::OutOfBounds(q1.clone()));
    }
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<CellId> = VecDeque::new();
    for c in start {
        seen.insert(c);
        queue.push_back(c);
    }
    let mut candidates = BTreeSet::new();
    while let Some(c) = queue.pop_front() {
        out.cells_visited += 1;
        candidates.extend(cutting.crossing_list(c).iter().chain(cutting.boundary_list(c)).copied());
        for &d in cutting.neighbors(c) {
            if !seen.contains(&d) && segment_meets_triangle(&path, &cutting.cell(d).triangle) {
                seen.insert(d);
                queue.push_back(d);
            }
        }
    }
    out.candidates_scanned = candidates.len();
    let mut kept = BTreeSet::new();
    for e in candidates {
        let edge = &cutting.edges()[e];
        if segments_intersect(&edge.segment, &path) {
            kept.extend(edge.colors.iter().copied());
        }
    }
    correct(count, q1, q2, &kept, vis, &mut out)?;
    Ok(out)
}

/// Single-cell correction: `q1` and `q2` both lie in the open cell `c`.
pub(crate) fn correct_in_cell(q1: &Point, count: usize, q2: &Point, c: CellId, vis: &impl ColorVisibility, cutting: &Cutting) -> Result<WalkOutcome, WalkError> {
    let mut out = WalkOutcome { count, cells_visited: 1, ..WalkOutcome::default() };
    let list = cutting.crossing_list(c);
    out.candidates_scanned = list.len();
    if q1 == q2 {
        return Ok(out);
    }
    let path = Segment::new(q1.clone(), q2.clone());
    let mut kept = BTreeSet::new();
    for &e in list {
        let edge = &cutting.edges()[e];
        if segments_intersect(&edge.segment, &path) {
            kept.extend(edge.colors.iter().copied());
        }
    }
    correct(count, q1, q2, &kept, vis, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::Arrangement;
    use crate::cover::build_cover;
    use crate::scene::{generate_random, GenParams};

    fn ratio(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    #[test]
    fn sample_sizes() {
        assert_eq!(sample_size(100, &ratio("0.5")), 10);
        assert_eq!(sample_size(101, &ratio("0.5")), 11);
        assert_eq!(sample_size(1000, &ratio("1/3")), 100);
        assert_eq!(sample_size(1000, &ratio("0.99")), 2);
        assert_eq!(sample_size(1, &ratio("0.5")), 1);
        assert_eq!(sample_size(0, &ratio("0.5")), 0);
        assert_eq!(sample_size(16, &ratio("0.25")), 8);
    }

    #[test]
    fn alpha_is_validated() {
        for a in ["0", "1", "1.2", "-0.5"] {
            assert!(matches!(build_cutting(&[], &Rect::new(Point::from_ints(0, 0), Point::from_ints(1, 1)), &CuttingParams::new(ratio(a)), 0), Err(CuttingError::InvalidAlpha(_))));
        }
    }

    fn fixture(n: usize, seed: u64) -> (Scene, Cover) {
        let scene = generate_random(&GenParams::new(n), seed).unwrap();
        let arr = Arrangement::build(&scene, seed).unwrap();
        let cover = build_cover(&arr.map, &arr.labels, n);
        (scene, cover)
    }

    #[test]
    fn cells_tile_and_lists_are_complete() {
        let (scene, cover) = fixture(6, 4);
        for alpha in ["0.25", "0.5", "0.75"] {
            let cutting = build_cutting(cover.edges(), scene.bbox(), &CuttingParams::new(ratio(alpha)), 9).unwrap();
            let mut area = Scalar::zero();
            for c in cutting.cells() {
                area = &area + &c.triangle.double_area();
            }
            assert_eq!(area, &scene.bbox().area() * &Scalar::from_int(2));
            for c in 0..cutting.len() {
                assert_eq!(cutting.crossing_list(c), cutting.crossing_list_exhaustive(c).as_slice());
                for &d in cutting.neighbors(c) {
                    assert!(cutting.neighbors(d).contains(&c));
                }
            }
            // Cells reachable from cell 0 cover everything.
            let mut seen = vec![false; cutting.len()];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(c) = stack.pop() {
                for &d in cutting.neighbors(c) {
                    if !seen[d] {
                        seen[d] = true;
                        stack.push(d);
                    }
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn walks_match_the_oracle() {
        let (scene, cover) = fixture(8, 2);
        let cutting = build_cutting(cover.edges(), scene.bbox(), &CuttingParams::new(ratio("0.5")), 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut done = 0;
        while done < 60 {
            let p = crate::scene::sample_point(&mut rng, scene.bbox());
            let q = crate::scene::sample_point(&mut rng, scene.bbox());
            if scene.on_any_segment(&p) || scene.on_any_segment(&q) || cutting.on_edge(&p) || cutting.on_edge(&q) {
                continue;
            }
            let mp = crate::visibility::visible_count_oracle(&scene, &p).unwrap();
            let mq = crate::visibility::visible_count_oracle(&scene, &q).unwrap();
            let walk = correction_walk(&p, mp.count, &q, &scene, &cutting).unwrap();
            assert_eq!(walk.count, mq.count);
            // Colors never tested keep their visibility.
            let path = Segment::new(p.clone(), q.clone());
            let tested: BTreeSet<SegmentId> = cutting.edges().iter().filter(|e| segments_intersect(&e.segment, &path)).flat_map(|e| e.colors.iter().copied()).collect();
            for c in 0..scene.len() {
                if !tested.contains(&c) {
                    assert_eq!(mp.visible.contains(&c), mq.visible.contains(&c));
                }
            }
            assert_eq!(correction_walk(&p, mp.count, &p, &scene, &cutting).unwrap().candidates_scanned, 0);
            done += 1;
        }
    }

    #[test]
    fn nested_colors_correct_three_to_two() {
        let tri = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| Triangle::new(Point::from_ints(a.0, a.1), Point::from_ints(b.0, b.1), Point::from_ints(c.0, c.1)).unwrap();
        let bbox = Rect::new(Point::from_ints(0, 0), Point::from_ints(10, 10));
        // Red 0, green 1, blue 2.
        let cover = Cover::from_triangles(bbox.clone(), 3, vec![(tri((1, 1), (9, 1), (5, 9)), 0), (tri((2, 2), (6, 2), (4, 6)), 1), (tri((1, 2), (9, 2), (5, 8)), 2)]);
        let (pi, p) = (Point::from_ints(4, 3), Point::from_ints(7, 3));
        assert_eq!(cover.membership(&pi).distinct(), 3);
        for alpha in ["0.25", "0.5", "0.75"] {
            let cutting = build_cutting(cover.edges(), &bbox, &CuttingParams::new(ratio(alpha)), 0).unwrap();
            let walk = correction_walk(&pi, 3, &p, &cover, &cutting).unwrap();
            assert_eq!((walk.count, walk.corrections, walk.colors_tested), (2, -1, 1));
            assert_eq!(correction_walk(&p, 2, &pi, &cover, &cutting).unwrap().count, 3);
        }
    }
}
