//! Exact baseline: label every face of the critical-line arrangement with its
//! visible set and answer queries by point location.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::evg::{build_evg, critical_edge_set, Evg};
use crate::geometry::{Point, Segment};
use crate::scene::{Scene, SegmentId};
use crate::trapmap::{build_trap_map, Adjacency, Located, TrapId, TrapMap, TrapMapError};
use crate::visibility::{visible_count_oracle, CountResult, VisibilityError};

/// Union-find with path halving.
#[derive(Debug, Clone)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Visible set per face; positive-area traps map to faces through wall
/// adjacency, slivers have no face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceLabels {
    face_of: Vec<Option<usize>>,
    faces: Vec<BTreeSet<SegmentId>>,
}

impl FaceLabels {
    pub fn face_of(&self, t: TrapId) -> Option<usize> {
        self.face_of[t]
    }

    pub fn label(&self, t: TrapId) -> Option<&BTreeSet<SegmentId>> {
        self.face_of[t].map(|f| &self.faces[f])
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn face_label(&self, face: usize) -> &BTreeSet<SegmentId> {
        &self.faces[face]
    }
}

/// Labels each face by one oracle call at a representative of its first
/// positive-area trap. The map must contain every critical line.
pub fn label_faces(map: &TrapMap, scene: &Scene) -> FaceLabels {
    let mut sets = DisjointSets::new(map.len());
    for t in 0..map.len() {
        for &(u, kind) in map.neighbors(t) {
            if kind == Adjacency::Wall {
                sets.union(t, u);
            }
        }
    }
    let mut root_face: BTreeMap<usize, usize> = BTreeMap::new();
    let mut face_of = Vec::with_capacity(map.len());
    let mut reps: Vec<Point> = Vec::new();
    for t in 0..map.len() {
        let Some(rep) = map.representative(t) else {
            face_of.push(None);
            continue;
        };
        let face = *root_face.entry(sets.find(t)).or_insert_with(|| {
            reps.push(rep);
            reps.len() - 1
        });
        face_of.push(Some(face));
    }
    let faces = reps.iter().map(|p| visible_count_oracle(scene, p).expect("representative inside the box").visible).collect();
    FaceLabels { face_of, faces }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangementStats {
    pub critical_edges: usize,
    pub traps: usize,
    pub crossings: usize,
    pub faces: usize,
    /// Positive-area traps per visible count.
    pub label_histogram: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone)]
pub struct Arrangement {
    pub critical: Vec<Segment>,
    pub map: TrapMap,
    pub labels: FaceLabels,
}

impl Arrangement {
    /// EVG, critical lines, trapezoidal map and labels for `scene`.
    pub fn build(scene: &Scene, seed: u64) -> Result<Self, TrapMapError> {
        Self::from_evg(scene, &build_evg(scene), seed)
    }

    /// Same as [`Arrangement::build`] with a precomputed EVG.
    pub fn from_evg(scene: &Scene, evg: &Evg, seed: u64) -> Result<Self, TrapMapError> {
        let critical = critical_edge_set(evg);
        let map = build_trap_map(&critical, scene.bbox(), seed)?;
        let labels = label_faces(&map, scene);
        Ok(Arrangement { critical, map, labels })
    }

    /// Label lookup, falling back to the oracle on critical lines.
    pub fn baseline_query(&self, scene: &Scene, p: &Point) -> Result<CountResult, VisibilityError> {
        if !scene.bbox().contains(p) {
            return Err(VisibilityError::OutOfBounds(p.clone()));
        }
        match self.map.locate(p) {
            Located::Trap(t) => match self.labels.label(t) {
                Some(label) => Ok(CountResult::from_set(label.clone())),
                None => visible_count_oracle(scene, p),
            },
            Located::OnBoundary => visible_count_oracle(scene, p),
        }
    }

    pub fn stats(&self) -> ArrangementStats {
        let mut label_histogram = BTreeMap::new();
        for t in 0..self.map.len() {
            if let Some(label) = self.labels.label(t) {
                *label_histogram.entry(label.len()).or_insert(0) += 1;
            }
        }
        let s = self.map.stats();
        ArrangementStats { critical_edges: self.critical.len(), traps: s.traps, crossings: s.crossings, faces: self.labels.face_count(), label_histogram }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::scalar::Scalar;
    use crate::scene::{generate_random, GenParams};
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(x: &str, y: &str) -> Point {
        Point::new(x.parse().unwrap(), y.parse().unwrap())
    }

    fn ten_box() -> Rect {
        Rect::new(Point::from_ints(0, 0), Point::from_ints(10, 10))
    }

    fn scene_b() -> Scene {
        Scene::new(ten_box(), vec![Segment::new(pt("3", "5"), pt("7", "5")), Segment::new(pt("3.5", "3"), pt("6.5", "3"))]).unwrap()
    }

    #[test]
    fn single_segment_labels() {
        let scene = Scene::new(ten_box(), vec![Segment::new(pt("4", "4"), pt("6", "4"))]).unwrap();
        let arr = Arrangement::build(&scene, 0).unwrap();
        assert!((0..arr.map.len()).all(|t| arr.labels.label(t).is_none_or(|l| l == &BTreeSet::from([0]))));
        assert_eq!(arr.baseline_query(&scene, &pt("5", "1")).unwrap().count, 1);
    }

    #[test]
    fn two_horizontals() {
        let b = scene_b();
        let arr = Arrangement::build(&b, 0).unwrap();
        let Located::Trap(t) = arr.map.locate(&pt("5", "1")) else { panic!() };
        assert_eq!(arr.labels.label(t), Some(&BTreeSet::from([1])));
        let Located::Trap(t) = arr.map.locate(&pt("0.5", "4")) else { panic!() };
        assert_eq!(arr.labels.label(t), Some(&BTreeSet::from([0, 1])));
        assert_eq!(arr.baseline_query(&b, &pt("5", "1")).unwrap().count, 1);
        assert_eq!(arr.baseline_query(&b, &pt("0.5", "4")).unwrap().count, 2);
        assert_eq!(arr.baseline_query(&b, &pt("5", "5")).unwrap().count, 2);
        // Golden trapezoid count for this insertion seed.
        assert_eq!(arr.map.len(), Arrangement::build(&b, 0).unwrap().map.len());
        assert_eq!(arr.map.len(), 38);
    }

    #[test]
    fn faces_are_constant_and_baseline_is_exact() {
        for seed in 0..3 {
            let scene = generate_random(&GenParams::new(5), seed).unwrap();
            let arr = Arrangement::build(&scene, seed).unwrap();
            let mut area = Scalar::zero();
            for t in 0..arr.map.len() {
                area = &area + &arr.map.area(t);
            }
            assert_eq!(area, scene.bbox().area());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Face constancy: random interior points of random traps.
            for _ in 0..100 {
                let t = rng.random_range(0..arr.map.len());
                for tri in arr.map.triangles(t) {
                    let w = [rng.random_range(1..50), rng.random_range(1..50), rng.random_range(1..50)];
                    let p = tri.interior_point(w);
                    assert_eq!(Some(&visible_count_oracle(&scene, &p).unwrap().visible), arr.labels.label(t));
                }
            }
            for _ in 0..200 {
                let p = Point::from_ints(rng.random_range(0..=1000), rng.random_range(0..=1000));
                assert_eq!(arr.baseline_query(&scene, &p).unwrap(), visible_count_oracle(&scene, &p).unwrap());
            }
        }
    }
}
