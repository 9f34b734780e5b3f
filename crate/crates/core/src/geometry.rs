//! Exact planar primitives over [`Scalar`] coordinates.

use core::cmp::Ordering;
use core::fmt;

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(Scalar::from_int(x), Scalar::from_int(y))
    }

    pub fn sub(&self, o: &Point) -> Vector {
        Vector { x: &self.x - &o.x, y: &self.y - &o.y }
    }

    pub fn offset(&self, v: &Vector, t: &Scalar) -> Point {
        Point::new(&self.x + &(&v.x * t), &self.y + &(&v.y * t))
    }

    pub fn midpoint(&self, o: &Point) -> Point {
        Point::new(Scalar::midpoint(&self.x, &o.x), Scalar::midpoint(&self.y, &o.y))
    }

    pub fn dist2(&self, o: &Point) -> Scalar {
        self.sub(o).norm2()
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.x, self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vector {
    pub x: Scalar,
    pub y: Scalar,
}

impl Vector {
    pub fn cross(&self, o: &Vector) -> Scalar {
        &(&self.x * &o.y) - &(&self.y * &o.x)
    }

    pub fn dot(&self, o: &Vector) -> Scalar {
        &(&self.x * &o.x) + &(&self.y * &o.y)
    }

    pub fn norm2(&self) -> Scalar {
        self.dot(self)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Ccw,
    Cw,
    Collinear,
}

impl Orientation {
    fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Greater => Orientation::Ccw,
            Ordering::Less => Orientation::Cw,
            Ordering::Equal => Orientation::Collinear,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Orientation::Ccw => 1,
            Orientation::Cw => -1,
            Orientation::Collinear => 0,
        }
    }
}

/// Twice the signed area of `abc`.
pub fn orient_det(a: &Point, b: &Point, c: &Point) -> Scalar {
    let (l, r) = orient_terms(a, b, c);
    &l - &r
}

fn orient_terms(a: &Point, b: &Point, c: &Point) -> (Scalar, Scalar) {
    let l = &(&b.x - &a.x) * &(&c.y - &a.y);
    let r = &(&b.y - &a.y) * &(&c.x - &a.x);
    (l, r)
}

/// Sign of the determinant of `(b - a, c - a)`.
pub fn orient(a: &Point, b: &Point, c: &Point) -> Orientation {
    let (l, r) = orient_terms(a, b, c);
    Orientation::from_ordering(l.cmp(&r))
}

/// A closed segment with distinct endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl fmt::Debug for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?} - {:?}]", self.a, self.b)
    }
}

impl Segment {
    /// Panics if `a == b`; use [`Segment::try_new`] for untrusted input.
    pub fn new(a: Point, b: Point) -> Self {
        assert!(a != b, "degenerate segment at {a:?}");
        Segment { a, b }
    }

    pub fn try_new(a: Point, b: Point) -> Option<Self> {
        (a != b).then_some(Segment { a, b })
    }

    pub fn direction(&self) -> Vector {
        self.b.sub(&self.a)
    }

    /// Endpoints in lexicographic order.
    pub fn lex_sorted(&self) -> (&Point, &Point) {
        if self.a <= self.b {
            (&self.a, &self.b)
        } else {
            (&self.b, &self.a)
        }
    }

    pub fn is_vertical(&self) -> bool {
        self.a.x == self.b.x
    }

    pub fn contains(&self, p: &Point) -> bool {
        point_on_segment(p, self)
    }

    pub fn has_endpoint(&self, p: &Point) -> bool {
        &self.a == p || &self.b == p
    }

    /// `y` of the supporting line at `x`; the segment must not be vertical.
    pub fn y_at(&self, x: &Scalar) -> Scalar {
        let d = self.direction();
        let t = &(x - &self.a.x) / &d.x;
        &self.a.y + &(&d.y * &t)
    }

    pub fn point_at(&self, t: &Scalar) -> Point {
        self.a.offset(&self.direction(), t)
    }

    pub fn midpoint(&self) -> Point {
        self.a.midpoint(&self.b)
    }

    pub fn reversed(&self) -> Segment {
        Segment { a: self.b.clone(), b: self.a.clone() }
    }

    pub fn bounds(&self) -> Rect {
        Rect::spanning(&self.a, &self.b)
    }
}

/// Closed axis-aligned rectangle.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Self {
        Rect { min, max }
    }

    pub fn spanning(a: &Point, b: &Point) -> Self {
        let (x0, x1) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
        let (y0, y1) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
        Rect::new(Point::new(x0.clone(), y0.clone()), Point::new(x1.clone(), y1.clone()))
    }

    pub fn of_points<'a>(pts: impl IntoIterator<Item = &'a Point>) -> Option<Rect> {
        let mut it = pts.into_iter();
        let first = it.next()?;
        let mut r = Rect::new(first.clone(), first.clone());
        for p in it {
            if p.x < r.min.x {
                r.min.x = p.x.clone();
            }
            if p.x > r.max.x {
                r.max.x = p.x.clone();
            }
            if p.y < r.min.y {
                r.min.y = p.y.clone();
            }
            if p.y > r.max.y {
                r.max.y = p.y.clone();
            }
        }
        Some(r)
    }

    pub fn is_proper(&self) -> bool {
        self.min.x < self.max.x && self.min.y < self.max.y
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.min.x <= p.x && p.x <= self.max.x && self.min.y <= p.y && p.y <= self.max.y
    }

    pub fn strictly_contains(&self, p: &Point) -> bool {
        self.min.x < p.x && p.x < self.max.x && self.min.y < p.y && p.y < self.max.y
    }

    pub fn overlaps(&self, o: &Rect) -> bool {
        self.min.x <= o.max.x && o.min.x <= self.max.x && self.min.y <= o.max.y && o.min.y <= self.max.y
    }

    pub fn width(&self) -> Scalar {
        &self.max.x - &self.min.x
    }

    pub fn height(&self) -> Scalar {
        &self.max.y - &self.min.y
    }

    pub fn area(&self) -> Scalar {
        &self.width() * &self.height()
    }

    /// Corners in counterclockwise order starting at `min`.
    pub fn corners(&self) -> [Point; 4] {
        [
            self.min.clone(),
            Point::new(self.max.x.clone(), self.min.y.clone()),
            self.max.clone(),
            Point::new(self.min.x.clone(), self.max.y.clone()),
        ]
    }

    pub fn sides(&self) -> [Segment; 4] {
        let c = self.corners();
        [
            Segment::new(c[0].clone(), c[1].clone()),
            Segment::new(c[1].clone(), c[2].clone()),
            Segment::new(c[2].clone(), c[3].clone()),
            Segment::new(c[3].clone(), c[0].clone()),
        ]
    }
}

/// Closed-segment membership.
pub fn point_on_segment(p: &Point, s: &Segment) -> bool {
    orient(&s.a, &s.b, p) == Orientation::Collinear && in_closed_box(p, &s.a, &s.b)
}

fn in_closed_box(p: &Point, a: &Point, b: &Point) -> bool {
    let (x0, x1) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (y0, y1) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    x0 <= &p.x && &p.x <= x1 && y0 <= &p.y && &p.y <= y1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intersection {
    Empty,
    Point(Point),
    Overlap(Segment),
}

/// Intersection point of the supporting lines, if they are not parallel.
pub fn line_intersection(s: &Segment, t: &Segment) -> Option<Point> {
    let d = s.direction();
    let e = t.direction();
    let den = d.cross(&e);
    if den.is_zero() {
        return None;
    }
    let u = &t.a.sub(&s.a).cross(&e) / &den;
    Some(s.a.offset(&d, &u))
}

/// Exact classification of `s ∩ t`.
pub fn segment_intersection(s: &Segment, t: &Segment) -> Intersection {
    let o1 = orient(&s.a, &s.b, &t.a);
    let o2 = orient(&s.a, &s.b, &t.b);
    if o1 == Orientation::Collinear && o2 == Orientation::Collinear {
        let (s0, s1) = s.lex_sorted();
        let (t0, t1) = t.lex_sorted();
        let lo = if s0 >= t0 { s0 } else { t0 };
        let hi = if s1 <= t1 { s1 } else { t1 };
        return match lo.cmp(hi) {
            Ordering::Less => Intersection::Overlap(Segment::new(lo.clone(), hi.clone())),
            Ordering::Equal => Intersection::Point(lo.clone()),
            Ordering::Greater => Intersection::Empty,
        };
    }
    if o1 != Orientation::Collinear && o1 == o2 {
        return Intersection::Empty;
    }
    let o3 = orient(&t.a, &t.b, &s.a);
    let o4 = orient(&t.a, &t.b, &s.b);
    if o3 != Orientation::Collinear && o3 == o4 {
        return Intersection::Empty;
    }
    // Exactly one point; return an existing endpoint when it is one.
    if o1 == Orientation::Collinear {
        return Intersection::Point(t.a.clone());
    }
    if o2 == Orientation::Collinear {
        return Intersection::Point(t.b.clone());
    }
    if o3 == Orientation::Collinear {
        return Intersection::Point(s.a.clone());
    }
    if o4 == Orientation::Collinear {
        return Intersection::Point(s.b.clone());
    }
    Intersection::Point(line_intersection(s, t).expect("non-parallel"))
}

pub fn segments_intersect(s: &Segment, t: &Segment) -> bool {
    let o1 = orient(&s.a, &s.b, &t.a).sign();
    let o2 = orient(&s.a, &s.b, &t.b).sign();
    if o1 == 0 && o2 == 0 {
        let (s0, s1) = s.lex_sorted();
        let (t0, t1) = t.lex_sorted();
        return s0 <= t1 && t0 <= s1;
    }
    if o1 * o2 > 0 {
        return false;
    }
    let o3 = orient(&t.a, &t.b, &s.a).sign();
    let o4 = orient(&t.a, &t.b, &s.b).sign();
    o3 * o4 <= 0
}

/// True iff the relative interior of `s` meets the closed segment `t`.
pub fn open_segments_cross(s: &Segment, t: &Segment) -> bool {
    let o1 = orient(&s.a, &s.b, &t.a).sign();
    let o2 = orient(&s.a, &s.b, &t.b).sign();
    if o1 == 0 && o2 == 0 {
        let (s0, s1) = s.lex_sorted();
        let (t0, t1) = t.lex_sorted();
        // open (s0, s1) against closed [t0, t1]
        return t1 > s0 && t0 < s1;
    }
    if o1 * o2 > 0 {
        return false;
    }
    let o3 = orient(&t.a, &t.b, &s.a).sign();
    let o4 = orient(&t.a, &t.b, &s.b).sign();
    o3 * o4 < 0
}

/// Triangle with counterclockwise, non-collinear vertices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Triangle {
    v: [Point; 3],
}

impl fmt::Debug for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tri{:?}", self.v)
    }
}

impl Triangle {
    /// Reorders to counterclockwise; `None` for collinear input.
    pub fn new(a: Point, b: Point, c: Point) -> Option<Self> {
        match orient(&a, &b, &c) {
            Orientation::Ccw => Some(Triangle { v: [a, b, c] }),
            Orientation::Cw => Some(Triangle { v: [a, c, b] }),
            Orientation::Collinear => None,
        }
    }

    pub fn vertices(&self) -> &[Point; 3] {
        &self.v
    }

    pub fn edge(&self, i: usize) -> Segment {
        Segment { a: self.v[i].clone(), b: self.v[(i + 1) % 3].clone() }
    }

    pub fn edges(&self) -> [Segment; 3] {
        [self.edge(0), self.edge(1), self.edge(2)]
    }

    pub fn bounds(&self) -> Rect {
        Rect::of_points(self.v.iter()).expect("three vertices")
    }

    /// Twice the area.
    pub fn double_area(&self) -> Scalar {
        orient_det(&self.v[0], &self.v[1], &self.v[2])
    }

    pub fn centroid(&self) -> Point {
        let three = Scalar::from_int(3);
        Point::new(
            &(&(&self.v[0].x + &self.v[1].x) + &self.v[2].x) / &three,
            &(&(&self.v[0].y + &self.v[1].y) + &self.v[2].y) / &three,
        )
    }

    /// Convex combination with positive integer weights; strictly interior.
    pub fn interior_point(&self, w: [u32; 3]) -> Point {
        let total = Scalar::from_int((w[0] as i64) + (w[1] as i64) + (w[2] as i64));
        let mut x = Scalar::zero();
        let mut y = Scalar::zero();
        for (p, wi) in self.v.iter().zip(w) {
            let wi = Scalar::from_int(wi as i64);
            x = &x + &(&p.x * &wi);
            y = &y + &(&p.y * &wi);
        }
        Point::new(&x / &total, &y / &total)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

pub fn point_in_triangle(p: &Point, t: &Triangle) -> Containment {
    let v = &t.v;
    let mut on_edge = false;
    for i in 0..3 {
        match orient(&v[i], &v[(i + 1) % 3], p) {
            Orientation::Cw => return Containment::Outside,
            Orientation::Collinear => on_edge = true,
            Orientation::Ccw => {}
        }
    }
    if on_edge {
        Containment::Boundary
    } else {
        Containment::Inside
    }
}

/// Parameter interval of `s` (as `a + t (b - a)`, `t ∈ [0, 1]`) inside the
/// intersection of the half-planes left of each directed edge. With
/// `strict`, the half-planes are open. Returns `(lo, hi)` with `lo <= hi`
/// (and `lo < hi` when strict), or `None` if empty.
pub fn clip_to_halfplanes(s: &Segment, edges: &[(Point, Point)], strict: bool) -> Option<(Scalar, Scalar)> {
    let mut lo = Scalar::zero();
    let mut hi = Scalar::one();
    let mut lo_open = false;
    let mut hi_open = false;
    for (ea, eb) in edges {
        let f0 = orient_det(ea, eb, &s.a);
        let f1 = orient_det(ea, eb, &s.b);
        let slope = &f1 - &f0;
        match slope.signum() {
            Ordering::Equal => {
                let ok = if strict { f0.signum() == Ordering::Greater } else { f0.signum() != Ordering::Less };
                if !ok {
                    return None;
                }
            }
            Ordering::Greater => {
                // t > -f0 / slope
                let bound = &(-&f0) / &slope;
                if bound > lo || (bound == lo && strict) {
                    lo = bound;
                    lo_open = strict;
                }
            }
            Ordering::Less => {
                let bound = &(-&f0) / &slope;
                if bound < hi || (bound == hi && strict) {
                    hi = bound;
                    hi_open = strict;
                }
            }
        }
    }
    match lo.cmp(&hi) {
        Ordering::Less => Some((lo, hi)),
        Ordering::Equal if !lo_open && !hi_open => Some((lo, hi)),
        _ => None,
    }
}

/// True iff `s` meets the open interior of `t`.
pub fn segment_crosses_triangle_interior(s: &Segment, t: &Triangle) -> bool {
    let v = &t.v;
    let edges = [
        (v[0].clone(), v[1].clone()),
        (v[1].clone(), v[2].clone()),
        (v[2].clone(), v[0].clone()),
    ];
    clip_to_halfplanes(s, &edges, true).is_some()
}

/// True iff `s` meets the closed triangle `t`.
pub fn segment_meets_triangle(s: &Segment, t: &Triangle) -> bool {
    let v = &t.v;
    let edges = [
        (v[0].clone(), v[1].clone()),
        (v[1].clone(), v[2].clone()),
        (v[2].clone(), v[0].clone()),
    ];
    clip_to_halfplanes(s, &edges, false).is_some()
}

fn upper_half(v: &Vector) -> bool {
    v.y.signum() == Ordering::Greater || (v.y.is_zero() && v.x.signum() == Ordering::Greater)
}

/// Compares two nonzero directions counterclockwise from the positive x axis.
pub fn direction_compare(u: &Vector, v: &Vector) -> Ordering {
    let (hu, hv) = (upper_half(u), upper_half(v));
    if hu != hv {
        return if hu { Ordering::Less } else { Ordering::Greater };
    }
    match u.cross(v).signum() {
        Ordering::Greater => Ordering::Less,
        Ordering::Less => Ordering::Greater,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Total order of `u`, `v` around `origin`: by direction (counterclockwise
/// from +x), then by distance.
pub fn angular_compare(origin: &Point, u: &Point, v: &Point) -> Ordering {
    let du = u.sub(origin);
    let dv = v.sub(origin);
    debug_assert!(!du.is_zero() && !dv.is_zero());
    direction_compare(&du, &dv).then_with(|| du.norm2().cmp(&dv.norm2()))
}

/// Squared distance from `p` to the closed segment `s`.
pub fn point_segment_dist2(p: &Point, s: &Segment) -> Scalar {
    let d = s.direction();
    let w = p.sub(&s.a);
    let t = w.dot(&d);
    if t.signum() != Ordering::Greater {
        return w.norm2();
    }
    let len2 = d.norm2();
    if t >= len2 {
        return p.dist2(&s.b);
    }
    // |w|^2 - (w.d)^2 / |d|^2
    &w.norm2() - &(&(&t * &t) / &len2)
}

/// Squared distance between two closed segments.
pub fn segment_dist2(s: &Segment, t: &Segment) -> Scalar {
    if segments_intersect(s, t) {
        return Scalar::zero();
    }
    [
        point_segment_dist2(&s.a, t),
        point_segment_dist2(&s.b, t),
        point_segment_dist2(&t.a, s),
        point_segment_dist2(&t.b, s),
    ]
    .into_iter()
    .min()
    .expect("four candidates")
}
