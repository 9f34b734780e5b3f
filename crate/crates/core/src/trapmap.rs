//! Randomized incremental trapezoidal map with exact predicates.
//!
//! Ties in `x` are broken by a symbolic shear `x' = x + εy`: points compare
//! lexicographically, vertical pieces become steep non-vertical ones, and
//! orientation tests are unchanged because the shear preserves orientation.
//! Traps whose two walls share an `x` coordinate ("slivers") have zero area;
//! they stay in the map for point location but have no cells and no
//! neighbors. Adjacency is computed on the real geometry afterwards.
//!
//! Input edges are split at every pairwise intersection first, so pieces meet
//! only at shared endpoints and insertion never sees a proper crossing.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{orient, segment_intersection, Intersection, Orientation, Point, Rect, Segment, Triangle, Vector};
use crate::scalar::Scalar;

pub type TrapId = usize;
pub type PieceId = usize;
pub type VertexId = usize;

/// Piece ids of the bounding box bottom and top.
pub const BOX_BOTTOM: PieceId = 0;
pub const BOX_TOP: PieceId = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TrapMapError {
    #[error("edges {0} and {1} overlap along a segment")]
    Overlap(usize, usize),
    #[error("edge {0} leaves the bounding box")]
    OutOfBounds(usize),
}

/// A maximal part of an input edge between split points, oriented
/// lexicographically (`left < right`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub left: VertexId,
    pub right: VertexId,
    /// Index of the input edge, `None` for the box top and bottom.
    pub source: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trap {
    pub top: PieceId,
    pub bottom: PieceId,
    pub leftp: VertexId,
    pub rightp: VertexId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adjacency {
    /// Across part of a vertical wall line.
    Wall,
    /// Across a piece of an input edge.
    Piece(PieceId),
    /// Across vertical pieces only; the shared wall is fully covered.
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Located {
    Trap(TrapId),
    /// The point is a vertex or lies on a piece.
    OnBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    X(VertexId, usize, usize),
    Y(PieceId, usize, usize),
    Leaf(TrapId),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrapMapStats {
    pub edges: usize,
    pub pieces: usize,
    pub vertices: usize,
    /// Split points that are not endpoints of the edges being split.
    pub crossings: usize,
    pub traps: usize,
    pub slivers: usize,
    pub dag_nodes: usize,
}

#[derive(Debug, Clone)]
pub struct TrapMap {
    bbox: Rect,
    vertices: Vec<Point>,
    pieces: Vec<Piece>,
    geo: Vec<Segment>,
    traps: Vec<Trap>,
    dag: Vec<Node>,
    adjacency: Vec<Vec<(TrapId, Adjacency)>>,
    stats: TrapMapStats,
}

fn on_box_side(s: &Segment, b: &Rect) -> bool {
    (s.a.x == s.b.x && (s.a.x == b.min.x || s.a.x == b.max.x)) || (s.a.y == s.b.y && (s.a.y == b.min.y || s.a.y == b.max.y))
}

/// Splits edges at all pairwise intersections. Returns `(left, right, edge)`.
fn split_edges(edges: &[Segment]) -> Result<(Vec<(Point, Point, usize)>, usize), TrapMapError> {
    let mut order: Vec<usize> = (0..edges.len()).collect();
    let bounds: Vec<Rect> = edges.iter().map(Segment::bounds).collect();
    order.sort_by(|&i, &j| bounds[i].min.x.cmp(&bounds[j].min.x));
    let mut cuts: Vec<Vec<Point>> = edges
        .iter()
        .map(|e| {
            let (a, b) = e.lex_sorted();
            vec![a.clone(), b.clone()]
        })
        .collect();
    let mut crossings = 0;
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if bounds[j].min.x > bounds[i].max.x {
                break;
            }
            if !bounds[i].overlaps(&bounds[j]) {
                continue;
            }
            match segment_intersection(&edges[i], &edges[j]) {
                Intersection::Empty => {}
                Intersection::Overlap(_) => return Err(TrapMapError::Overlap(i.min(j), i.max(j))),
                Intersection::Point(p) => {
                    let ei = edges[i].has_endpoint(&p);
                    let ej = edges[j].has_endpoint(&p);
                    if !ei && !ej {
                        crossings += 1;
                    }
                    if !ei {
                        cuts[i].push(p.clone());
                    }
                    if !ej {
                        cuts[j].push(p);
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for (i, mut c) in cuts.into_iter().enumerate() {
        c.sort();
        c.dedup();
        for w in c.windows(2) {
            out.push((w[0].clone(), w[1].clone(), i));
        }
    }
    Ok((out, crossings))
}

struct Builder {
    map: TrapMap,
    trap_leaf: Vec<usize>,
    alive: Vec<bool>,
    dirs: Vec<Vector>,
}

impl Builder {
    fn y_on(&self, piece: PieceId, r: &Point) -> Scalar {
        let g = &self.map.geo[piece];
        if g.is_vertical() {
            r.y.clone()
        } else {
            g.y_at(&r.x)
        }
    }

    /// Is piece `s`, just right of the sheared vertical through `r`, above `t`?
    fn probe_above(&self, s: PieceId, r: &Point, t: PieceId) -> bool {
        let ys = self.y_on(s, r);
        let yt = self.y_on(t, r);
        match ys.cmp(&yt) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => {
                let (ds, dt) = (&self.dirs[s], &self.dirs[t]);
                let c = if ys <= r.y { dt.cross(ds) } else { ds.cross(dt) };
                debug_assert!(!c.is_zero(), "overlapping pieces {s} and {t}");
                c.signum() == Ordering::Greater
            }
        }
    }

    fn locate_probe(&self, s: PieceId, r: &Point) -> TrapId {
        let mut n = 0;
        loop {
            match self.map.dag[n] {
                Node::Leaf(t) => return t,
                Node::X(v, l, rt) => n = if self.map.vertices[v] <= *r { rt } else { l },
                Node::Y(t, a, b) => n = if self.probe_above(s, r, t) { a } else { b },
            }
        }
    }

    fn new_trap(&mut self, trap: Trap) -> TrapId {
        let id = self.map.traps.len();
        self.map.traps.push(trap);
        self.alive.push(true);
        self.trap_leaf.push(self.map.dag.len());
        self.map.dag.push(Node::Leaf(id));
        id
    }

    fn push_node(&mut self, node: Node) -> usize {
        self.map.dag.push(node);
        self.map.dag.len() - 1
    }

    fn insert(&mut self, s: PieceId) {
        let Piece { left: pv, right: qv, .. } = self.map.pieces[s].clone();
        let p = self.map.vertices[pv].clone();
        let q = self.map.vertices[qv].clone();
        let mut crossed = vec![self.locate_probe(s, &p)];
        loop {
            let r = self.map.traps[*crossed.last().unwrap()].rightp;
            if self.map.vertices[r] >= q {
                break;
            }
            let rp = self.map.vertices[r].clone();
            crossed.push(self.locate_probe(s, &rp));
        }
        let k = crossed.len() - 1;
        let first = self.map.traps[crossed[0]];
        let last = self.map.traps[crossed[k]];
        let a = (self.map.vertices[first.leftp] < p).then(|| self.new_trap(Trap { top: first.top, bottom: first.bottom, leftp: first.leftp, rightp: pv }));
        let b = (q < self.map.vertices[last.rightp]).then(|| self.new_trap(Trap { top: last.top, bottom: last.bottom, leftp: qv, rightp: last.rightp }));

        let mut upper = Vec::with_capacity(k + 1);
        let mut lower = Vec::with_capacity(k + 1);
        for (chain, breaks_on, is_upper) in [(&mut upper, Orientation::Ccw, true), (&mut lower, Orientation::Cw, false)] {
            let mut start = pv;
            let mut pending = 0;
            for j in 0..=k {
                pending += 1;
                let t = self.map.traps[crossed[j]];
                let wall = t.rightp;
                let ends = j == k || orient(&p, &q, &self.map.vertices[wall]) == breaks_on;
                if ends {
                    let right = if j == k { qv } else { wall };
                    let trap = if is_upper {
                        Trap { top: t.top, bottom: s, leftp: start, rightp: right }
                    } else {
                        Trap { top: s, bottom: t.bottom, leftp: start, rightp: right }
                    };
                    let id = self.new_trap(trap);
                    chain.extend(core::iter::repeat_n(id, pending));
                    pending = 0;
                    start = right;
                }
            }
        }

        for j in 0..=k {
            let old = crossed[j];
            self.alive[old] = false;
            let ya = self.trap_leaf[upper[j]];
            let yb = self.trap_leaf[lower[j]];
            let mut node = Node::Y(s, ya, yb);
            if j == k {
                if let Some(b) = b {
                    let y = self.push_node(node);
                    node = Node::X(qv, y, self.trap_leaf[b]);
                }
            }
            if j == 0 {
                if let Some(a) = a {
                    let inner = self.push_node(node);
                    node = Node::X(pv, self.trap_leaf[a], inner);
                }
            }
            self.map.dag[self.trap_leaf[old]] = node;
        }
    }
}

/// Builds the map of `edges` inside `bbox`, inserting pieces in an order
/// drawn from `seed`. Edges lying on the box boundary are ignored.
pub fn build_trap_map(edges: &[Segment], bbox: &Rect, seed: u64) -> Result<TrapMap, TrapMapError> {
    for (i, e) in edges.iter().enumerate() {
        if !bbox.contains(&e.a) || !bbox.contains(&e.b) {
            return Err(TrapMapError::OutOfBounds(i));
        }
    }
    let kept: Vec<usize> = (0..edges.len()).filter(|&i| !on_box_side(&edges[i], bbox)).collect();
    let kept_edges: Vec<Segment> = kept.iter().map(|&i| edges[i].clone()).collect();
    let (split, crossings) = split_edges(&kept_edges).map_err(|e| match e {
        TrapMapError::Overlap(i, j) => TrapMapError::Overlap(kept[i], kept[j]),
        other => other,
    })?;

    let mut index: BTreeMap<Point, VertexId> = BTreeMap::new();
    let mut vertices = Vec::new();
    let mut vid = |p: &Point, vertices: &mut Vec<Point>| -> VertexId {
        *index.entry(p.clone()).or_insert_with(|| {
            vertices.push(p.clone());
            vertices.len() - 1
        })
    };
    let (x0, y0, x1, y1) = (&bbox.min.x, &bbox.min.y, &bbox.max.x, &bbox.max.y);
    let c00 = Point::new(x0.clone(), y0.clone());
    let c10 = Point::new(x1.clone(), y0.clone());
    let c01 = Point::new(x0.clone(), y1.clone());
    let c11 = Point::new(x1.clone(), y1.clone());
    let mut pieces = vec![
        Piece { left: vid(&c00, &mut vertices), right: vid(&c10, &mut vertices), source: None },
        Piece { left: vid(&c01, &mut vertices), right: vid(&c11, &mut vertices), source: None },
    ];
    for (a, b, src) in split {
        pieces.push(Piece { left: vid(&a, &mut vertices), right: vid(&b, &mut vertices), source: Some(kept[src]) });
    }
    let geo: Vec<Segment> = pieces.iter().map(|p| Segment::new(vertices[p.left].clone(), vertices[p.right].clone())).collect();
    let dirs = geo.iter().map(Segment::direction).collect();

    let start = Trap { top: BOX_TOP, bottom: BOX_BOTTOM, leftp: pieces[0].left, rightp: pieces[1].right };
    let mut builder = Builder {
        map: TrapMap {
            bbox: bbox.clone(),
            vertices,
            pieces,
            geo,
            traps: vec![start],
            dag: vec![Node::Leaf(0)],
            adjacency: Vec::new(),
            stats: TrapMapStats::default(),
        },
        trap_leaf: vec![0],
        alive: vec![true],
        dirs,
    };
    let mut order: Vec<PieceId> = (2..builder.map.pieces.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    for s in order {
        builder.insert(s);
    }

    let Builder { mut map, alive, .. } = builder;
    let mut remap = vec![usize::MAX; map.traps.len()];
    let mut traps = Vec::new();
    for (i, t) in map.traps.iter().enumerate() {
        if alive[i] {
            remap[i] = traps.len();
            traps.push(*t);
        }
    }
    for n in &mut map.dag {
        if let Node::Leaf(t) = n {
            *t = remap[*t];
        }
    }
    map.traps = traps;
    map.adjacency = map.compute_adjacency();
    map.stats = TrapMapStats {
        edges: edges.len(),
        pieces: map.pieces.len() - 2,
        vertices: map.vertices.len(),
        crossings,
        traps: map.traps.len(),
        slivers: (0..map.traps.len()).filter(|&t| !map.has_area(t)).count(),
        dag_nodes: map.dag.len(),
    };
    Ok(map)
}

impl TrapMap {
    pub fn bbox(&self) -> &Rect {
        &self.bbox
    }

    pub fn stats(&self) -> TrapMapStats {
        self.stats
    }

    pub fn len(&self) -> usize {
        self.traps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traps.is_empty()
    }

    pub fn traps(&self) -> &[Trap] {
        &self.traps
    }

    pub fn trap(&self, t: TrapId) -> &Trap {
        &self.traps[t]
    }

    pub fn vertex(&self, v: VertexId) -> &Point {
        &self.vertices[v]
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece(&self, p: PieceId) -> &Piece {
        &self.pieces[p]
    }

    /// Geometry of a piece, oriented left to right.
    pub fn piece_segment(&self, p: PieceId) -> &Segment {
        &self.geo[p]
    }

    pub fn neighbors(&self, t: TrapId) -> &[(TrapId, Adjacency)] {
        &self.adjacency[t]
    }

    /// Point location; points on pieces or at vertices report `OnBoundary`.
    ///
    /// The located trap contains `p` in its closure. `p` may still lie on one
    /// of its walls; see [`TrapMap::strictly_inside`].
    pub fn locate(&self, p: &Point) -> Located {
        let mut n = 0;
        loop {
            match self.dag[n] {
                Node::Leaf(t) => return Located::Trap(t),
                Node::X(v, l, r) => match p.cmp(&self.vertices[v]) {
                    Ordering::Less => n = l,
                    Ordering::Greater => n = r,
                    Ordering::Equal => return Located::OnBoundary,
                },
                Node::Y(s, a, b) => {
                    let g = &self.geo[s];
                    match orient(&g.a, &g.b, p) {
                        Orientation::Ccw => n = a,
                        Orientation::Cw => n = b,
                        Orientation::Collinear => return Located::OnBoundary,
                    }
                }
            }
        }
    }

    fn left_x(&self, t: TrapId) -> &Scalar {
        &self.vertices[self.traps[t].leftp].x
    }

    fn right_x(&self, t: TrapId) -> &Scalar {
        &self.vertices[self.traps[t].rightp].x
    }

    pub fn has_area(&self, t: TrapId) -> bool {
        self.left_x(t) < self.right_x(t)
    }

    /// `y` of a (non-vertical) bounding piece at `x`.
    fn y_of(&self, piece: PieceId, x: &Scalar) -> Scalar {
        self.geo[piece].y_at(x)
    }

    /// Corners `[bottom-left, bottom-right, top-right, top-left]` of a trap
    /// with positive area; consecutive corners may coincide.
    pub fn corners(&self, t: TrapId) -> Option<[Point; 4]> {
        if !self.has_area(t) {
            return None;
        }
        let tr = &self.traps[t];
        let (lx, rx) = (self.left_x(t).clone(), self.right_x(t).clone());
        Some([
            Point::new(lx.clone(), self.y_of(tr.bottom, &lx)),
            Point::new(rx.clone(), self.y_of(tr.bottom, &rx)),
            Point::new(rx.clone(), self.y_of(tr.top, &rx)),
            Point::new(lx.clone(), self.y_of(tr.top, &lx)),
        ])
    }

    /// Exact area of a trap (zero for slivers).
    pub fn area(&self, t: TrapId) -> Scalar {
        match self.corners(t) {
            Some([bl, br, tr, tl]) => {
                let h = &(&(&tl.y - &bl.y) + &(&tr.y - &br.y)) / &Scalar::from_int(2);
                &h * &(&br.x - &bl.x)
            }
            None => Scalar::zero(),
        }
    }

    /// The two triangles of a positive trap, split along the diagonal from
    /// bottom-left to top-right. A degenerate half is omitted.
    pub fn triangles(&self, t: TrapId) -> Vec<Triangle> {
        let Some([bl, br, tr, tl]) = self.corners(t) else {
            return Vec::new();
        };
        [Triangle::new(bl.clone(), br, tr.clone()), Triangle::new(bl, tr, tl)].into_iter().flatten().collect()
    }

    /// Index (0 = lower-right, 1 = upper-left) of the triangle of [`TrapMap::triangles`]
    /// whose side of the diagonal contains `p`; `None` on the diagonal.
    pub fn diagonal_side(&self, t: TrapId, p: &Point) -> Option<usize> {
        let [bl, _, tr, _] = self.corners(t)?;
        match orient(&bl, &tr, p) {
            Orientation::Cw => Some(0),
            Orientation::Ccw => Some(1),
            Orientation::Collinear => None,
        }
    }

    /// A point strictly inside a positive trap with small coordinates: the
    /// simplest rational `x` between the walls, then the simplest `y` there.
    pub fn representative(&self, t: TrapId) -> Option<Point> {
        if !self.has_area(t) {
            return None;
        }
        let tr = &self.traps[t];
        let x = Scalar::simplest_between(self.left_x(t), self.right_x(t));
        let y = Scalar::simplest_between(&self.y_of(tr.bottom, &x), &self.y_of(tr.top, &x));
        Some(Point::new(x, y))
    }

    /// True iff `p` (already located in `t`) avoids the trap's walls and
    /// bounding pieces.
    pub fn strictly_inside(&self, t: TrapId, p: &Point) -> bool {
        if !self.has_area(t) || &p.x == self.left_x(t) || &p.x == self.right_x(t) {
            return false;
        }
        let tr = &self.traps[t];
        let (b, tp) = (&self.geo[tr.bottom], &self.geo[tr.top]);
        orient(&b.a, &b.b, p) == Orientation::Ccw && orient(&tp.a, &tp.b, p) == Orientation::Cw
    }

    fn compute_adjacency(&self) -> Vec<Vec<(TrapId, Adjacency)>> {
        let mut adj = vec![Vec::new(); self.traps.len()];
        let mut above: BTreeMap<PieceId, Vec<TrapId>> = BTreeMap::new();
        let mut below: BTreeMap<PieceId, Vec<TrapId>> = BTreeMap::new();
        // Per vertical line: right sides of traps ending there, left sides of
        // traps starting there, and vertical pieces on it, as `y` intervals.
        type Side = (Scalar, Scalar, TrapId);
        let mut lines: BTreeMap<Scalar, (Vec<Side>, Vec<Side>, Vec<(Scalar, Scalar)>)> = BTreeMap::new();
        for (i, t) in self.traps.iter().enumerate() {
            above.entry(t.bottom).or_default().push(i);
            below.entry(t.top).or_default().push(i);
            if let Some([bl, br, tr, tl]) = self.corners(i) {
                lines.entry(br.x.clone()).or_default().0.push((br.y, tr.y, i));
                lines.entry(bl.x.clone()).or_default().1.push((bl.y, tl.y, i));
            }
        }
        for g in &self.geo {
            if g.is_vertical() {
                if let Some(line) = lines.get_mut(&g.a.x) {
                    line.2.push((g.a.y.clone(), g.b.y.clone()));
                }
            }
        }
        for (_, (mut lefts, mut rights, mut walls)) in lines {
            lefts.sort();
            rights.sort();
            walls.sort();
            let (mut i, mut j) = (0, 0);
            while i < lefts.len() && j < rights.len() {
                let (l, r) = (&lefts[i], &rights[j]);
                let lo = if l.0 > r.0 { &l.0 } else { &r.0 };
                let hi = if l.1 < r.1 { &l.1 } else { &r.1 };
                if lo < hi {
                    let mut covered = Scalar::zero();
                    for (a, b) in &walls {
                        let (a, b) = (if a > lo { a } else { lo }, if b < hi { b } else { hi });
                        if a < b {
                            covered = &covered + &(b - a);
                        }
                    }
                    let kind = if covered < hi - lo { Adjacency::Wall } else { Adjacency::Vertical };
                    adj[l.2].push((r.2, kind));
                    adj[r.2].push((l.2, kind));
                }
                if l.1 < r.1 {
                    i += 1;
                } else {
                    j += 1;
                }
            }
        }
        for (piece, ups) in &above {
            let Some(downs) = below.get(piece) else { continue };
            for &u in ups {
                for &d in downs {
                    let (tu, td) = (&self.traps[u], &self.traps[d]);
                    let lo = self.vertices[tu.leftp].clone().max(self.vertices[td.leftp].clone());
                    let hi = self.vertices[tu.rightp].clone().min(self.vertices[td.rightp].clone());
                    if lo.x < hi.x {
                        adj[u].push((d, Adjacency::Piece(*piece)));
                        adj[d].push((u, Adjacency::Piece(*piece)));
                    }
                }
            }
        }
        adj
    }

    /// Linear scan used to cross-check [`TrapMap::locate`]: traps whose lex
    /// range and vertical extent contain `p`.
    pub fn scan(&self, p: &Point) -> Vec<TrapId> {
        (0..self.traps.len())
            .filter(|&t| {
                let tr = &self.traps[t];
                if !(self.vertices[tr.leftp] < *p && *p < self.vertices[tr.rightp]) {
                    return false;
                }
                let (b, tp) = (&self.geo[tr.bottom], &self.geo[tr.top]);
                orient(&b.a, &b.b, p) == Orientation::Ccw && orient(&tp.a, &tp.b, p) == Orientation::Cw
            })
            .collect()
    }
}
