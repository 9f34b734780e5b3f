//! Uniform bucket grid over bounding rectangles.
//!
//! Bucket ranges come from `f64` approximations widened by one bucket on each
//! side, so the grid only prunes; callers still run exact predicates on the
//! candidates it returns.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::geometry::{Point, Rect};

#[derive(Debug, Clone)]
pub struct BucketGrid {
    origin: (f64, f64),
    cell: (f64, f64),
    dim: usize,
    buckets: Vec<Vec<usize>>,
}

impl BucketGrid {
    /// Indexes `items` (by bounding rectangle) inside `bbox`, aiming for a few
    /// items per bucket.
    pub fn new<'a>(bbox: &Rect, items: impl IntoIterator<Item = &'a Rect>) -> Self {
        let rects: Vec<(f64, f64, f64, f64)> = items.into_iter().map(|r| (r.min.x.to_f64(), r.min.y.to_f64(), r.max.x.to_f64(), r.max.y.to_f64())).collect();
        let dim = (Float::ceil(Float::sqrt(rects.len() as f64 / 2.0)) as usize).clamp(1, 512);
        let origin = (bbox.min.x.to_f64(), bbox.min.y.to_f64());
        let cell = ((bbox.max.x.to_f64() - origin.0) / dim as f64, (bbox.max.y.to_f64() - origin.1) / dim as f64);
        let mut grid = BucketGrid { origin, cell, dim, buckets: vec![Vec::new(); dim * dim] };
        for (id, &(x0, y0, x1, y1)) in rects.iter().enumerate() {
            let (i0, i1) = grid.span(x0, x1, 0);
            let (j0, j1) = grid.span(y0, y1, 1);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    grid.buckets[i * dim + j].push(id);
                }
            }
        }
        grid
    }

    fn index(&self, v: f64, axis: usize) -> isize {
        let (o, c) = if axis == 0 { (self.origin.0, self.cell.0) } else { (self.origin.1, self.cell.1) };
        let k = Float::floor((v - o) / c);
        k.clamp(-1.0, self.dim as f64) as isize
    }

    fn span(&self, lo: f64, hi: f64, axis: usize) -> (usize, usize) {
        let top = self.dim as isize - 1;
        let a = (self.index(lo, axis) - 1).clamp(0, top) as usize;
        let b = (self.index(hi, axis) + 1).clamp(0, top) as usize;
        (a, b)
    }

    /// Items whose bucket range contains `p`; a superset of those whose
    /// rectangle contains it.
    pub fn at_point(&self, p: &Point) -> &[usize] {
        let i = self.index(p.x.to_f64(), 0).clamp(0, self.dim as isize - 1) as usize;
        let j = self.index(p.y.to_f64(), 1).clamp(0, self.dim as isize - 1) as usize;
        &self.buckets[i * self.dim + j]
    }

    /// Sorted, deduplicated superset of the items whose rectangle meets `r`.
    pub fn overlapping(&self, r: &Rect) -> Vec<usize> {
        let (i0, i1) = self.span(r.min.x.to_f64(), r.max.x.to_f64(), 0);
        let (j0, j1) = self.span(r.min.y.to_f64(), r.max.y.to_f64(), 1);
        let mut out = Vec::new();
        for i in i0..=i1 {
            for j in j0..=j1 {
                out.extend_from_slice(&self.buckets[i * self.dim + j]);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use proptest::prelude::*;

    fn rect(x0: i64, y0: i64, x1: i64, y1: i64) -> Rect {
        Rect::new(Point::from_ints(x0, y0), Point::from_ints(x1, y1))
    }

    proptest! {
        #[test]
        fn never_misses(raw in proptest::collection::vec((0i64..100, 0i64..100, 0i64..30, 0i64..30), 1..60), q in (0i64..=300, 0i64..=300)) {
            let items: Vec<Rect> = raw.iter().map(|&(x, y, w, h)| rect(x, y, (x + w).min(100), (y + h).min(100))).collect();
            let grid = BucketGrid::new(&rect(0, 0, 100, 100), &items);
            let p = Point::new(Scalar::from_ratio(q.0, 3), Scalar::from_ratio(q.1, 3));
            for (i, r) in items.iter().enumerate() {
                if r.contains(&p) {
                    prop_assert!(grid.at_point(&p).contains(&i));
                }
            }
            let probe = Rect::spanning(&p, &Point::from_ints(50, 50));
            let hits = grid.overlapping(&probe);
            for (i, r) in items.iter().enumerate() {
                if r.overlaps(&probe) {
                    prop_assert!(hits.contains(&i));
                }
            }
        }
    }
}
