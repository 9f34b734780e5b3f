//! Counting index: one representative point and exact count per cutting cell.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cutting::{correct_in_cell, correction_walk, CellId, Cutting, WalkError};
use crate::geometry::{point_in_triangle, Containment, Point, Triangle};
use crate::scalar::Scalar;
use crate::scene::Scene;
use crate::visibility::{visible_count_oracle, VisibilityError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexCell {
    pub rep: Point,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexOptions {
    /// Seed for representative points.
    pub seed: u64,
    /// Every this many cells in walk order is checked against the oracle.
    pub verify_every: usize,
}

impl IndexOptions {
    pub fn new(seed: u64) -> Self {
        IndexOptions { seed, verify_every: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("correction walk into cell {cell} failed: {error:?}")]
    Walk { cell: CellId, error: WalkError },
    #[error("cell {cell}: walk gave {walked}, oracle gives {oracle}")]
    VerificationMismatch { cell: CellId, walked: usize, oracle: usize },
    #[error("no general-position point found in cell {0}")]
    NoRepresentative(CellId),
}

/// Work done while building the index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildCounters {
    pub oracle_calls: usize,
    pub walks: usize,
    pub candidates_scanned: usize,
    pub colors_tested: usize,
    pub verified: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub count: usize,
    pub cell: Option<CellId>,
    pub candidate_edges_scanned: usize,
    pub colors_tested: usize,
    pub corrections: i64,
    pub used_fallback: bool,
}

#[derive(Debug, Clone)]
pub struct Index {
    scene: Scene,
    cutting: Cutting,
    cells: Vec<IndexCell>,
    counters: BuildCounters,
}

/// Open vertical extent of `t` at `x` (strictly between its extreme `x`).
fn slice(t: &Triangle, x: &Scalar) -> (Scalar, Scalar) {
    let mut ys: Vec<Scalar> = Vec::with_capacity(3);
    for e in t.edges() {
        if e.is_vertical() {
            continue;
        }
        let (a, b) = e.lex_sorted();
        if &a.x <= x && x <= &b.x {
            ys.push(e.y_at(x));
        }
    }
    let lo = ys.iter().min().expect("x inside the triangle").clone();
    let hi = ys.iter().max().expect("x inside the triangle").clone();
    (lo, hi)
}

/// The simplest rational inside a random one of `parts` equal pieces of
/// `(lo, hi)`.
fn jitter(rng: &mut ChaCha8Rng, lo: &Scalar, hi: &Scalar, parts: i64) -> Scalar {
    let k = rng.random_range(0..parts);
    let w = hi - lo;
    let a = lo + &(&w * &Scalar::from_ratio(k, parts));
    let b = lo + &(&w * &Scalar::from_ratio(k + 1, parts));
    Scalar::simplest_between(&a, &b)
}

/// A point strictly inside cell `c`, off every edge of `E` and every segment.
fn pick_representative(rng: &mut ChaCha8Rng, cutting: &Cutting, scene: &Scene, c: CellId) -> Option<Point> {
    let t = &cutting.cell(c).triangle;
    let b = t.bounds();
    for attempt in 0..64 {
        let parts = 8i64 << (attempt / 8);
        let x = jitter(rng, &b.min.x, &b.max.x, parts);
        let (ylo, yhi) = slice(t, &x);
        if ylo >= yhi {
            continue;
        }
        let p = Point::new(x, jitter(rng, &ylo, &yhi, parts));
        if point_in_triangle(&p, t) == Containment::Inside && !cutting.on_edge(&p) && !scene.on_any_segment(&p) {
            return Some(p);
        }
    }
    None
}

impl Index {
    /// Picks representatives, counts the first cell with the oracle and the
    /// rest by correction walks in breadth-first order over cell adjacency.
    pub fn build(scene: Scene, cutting: Cutting, opts: &IndexOptions) -> Result<Self, IndexError> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut reps = Vec::with_capacity(cutting.len());
        for c in 0..cutting.len() {
            reps.push(pick_representative(&mut rng, &cutting, &scene, c).ok_or(IndexError::NoRepresentative(c))?);
        }
        let mut counts: Vec<Option<usize>> = vec![None; cutting.len()];
        let mut counters = BuildCounters::default();
        let oracle = |p: &Point| visible_count_oracle(&scene, p).expect("representative inside the box").count;
        let mut order = 0usize;
        for root in 0..cutting.len() {
            if counts[root].is_some() {
                continue;
            }
            counts[root] = Some(oracle(&reps[root]));
            counters.oracle_calls += 1;
            order += 1;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                let mu = counts[u].expect("queued cells are counted");
                for &v in cutting.neighbors(u) {
                    if counts[v].is_some() {
                        continue;
                    }
                    let walk = correction_walk(&reps[u], mu, &reps[v], &scene, &cutting).map_err(|error| IndexError::Walk { cell: v, error })?;
                    counters.walks += 1;
                    counters.candidates_scanned += walk.candidates_scanned;
                    counters.colors_tested += walk.colors_tested;
                    if opts.verify_every > 0 && order.is_multiple_of(opts.verify_every) {
                        let expected = oracle(&reps[v]);
                        counters.oracle_calls += 1;
                        counters.verified += 1;
                        if expected != walk.count {
                            return Err(IndexError::VerificationMismatch { cell: v, walked: walk.count, oracle: expected });
                        }
                    }
                    order += 1;
                    counts[v] = Some(walk.count);
                    queue.push_back(v);
                }
            }
        }
        let cells = reps.into_iter().zip(counts).map(|(rep, count)| IndexCell { rep, count: count.expect("every cell counted") }).collect();
        Ok(Index { scene, cutting, cells, counters })
    }

    /// Reassembles an index from stored parts without recounting.
    pub fn from_parts(scene: Scene, cutting: Cutting, cells: Vec<IndexCell>) -> Self {
        assert_eq!(cutting.len(), cells.len(), "one stored cell per cutting cell");
        Index { scene, cutting, cells, counters: BuildCounters::default() }
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn cutting(&self) -> &Cutting {
        &self.cutting
    }

    pub fn cells(&self) -> &[IndexCell] {
        &self.cells
    }

    pub fn counters(&self) -> &BuildCounters {
        &self.counters
    }

    /// Exact count at `p`: the cell's stored count corrected along the
    /// segment to `p`, or the oracle when `p` is on a cell boundary, an edge
    /// of `E` or a segment.
    pub fn query(&self, p: &Point) -> Result<QueryResult, VisibilityError> {
        if !self.scene.bbox().contains(p) {
            return Err(VisibilityError::OutOfBounds(p.clone()));
        }
        let cell = self.cutting.locate(p);
        if let Some(c) = cell {
            if !self.cutting.on_edge(p) && !self.scene.on_any_segment(p) {
                let IndexCell { rep, count } = &self.cells[c];
                if let Ok(w) = correct_in_cell(rep, *count, p, c, &self.scene, &self.cutting) {
                    return Ok(QueryResult {
                        count: w.count,
                        cell,
                        candidate_edges_scanned: w.candidates_scanned,
                        colors_tested: w.colors_tested,
                        corrections: w.corrections,
                        used_fallback: false,
                    });
                }
            }
        }
        let count = visible_count_oracle(&self.scene, p)?.count;
        Ok(QueryResult { count, cell, candidate_edges_scanned: 0, colors_tested: 0, corrections: 0, used_fallback: true })
    }

    /// Cells whose stored count differs from the oracle at their
    /// representative: `(cell, stored, oracle)`.
    pub fn audit(&self) -> Vec<(CellId, usize, usize)> {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(c, cell)| {
                let truth = visible_count_oracle(&self.scene, &cell.rep).expect("representative inside the box").count;
                (truth != cell.count).then_some((c, cell.count, truth))
            })
            .collect()
    }
}
