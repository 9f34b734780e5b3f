//! Counting sweep on scaled integer coordinates.
//!
//! All coordinates are multiplied by the common denominator and translated so
//! the viewpoint is the origin. With magnitudes below 2^60 every predicate the
//! sweep needs is a sign of an `i128` expression, so no rational arithmetic
//! happens on the hot path.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::geometry::Point;
use crate::scalar::Scalar;
use crate::scene::{Scene, SegmentId};

const LIMIT: i128 = 1 << 60;

type V = (i128, i128);

fn cross(u: V, v: V) -> i128 {
    u.0 * v.1 - u.1 * v.0
}

fn sub(u: V, v: V) -> V {
    (u.0 - v.0, u.1 - v.1)
}

fn orient(a: V, b: V, c: V) -> i8 {
    cross(sub(b, a), sub(c, a)).signum() as i8
}

fn upper_half(v: V) -> bool {
    v.1 > 0 || (v.1 == 0 && v.0 > 0)
}

fn direction_compare(u: V, v: V) -> Ordering {
    let (hu, hv) = (upper_half(u), upper_half(v));
    if hu != hv {
        return if hu { Ordering::Less } else { Ordering::Greater };
    }
    0.cmp(&cross(u, v))
}

fn direction_between(u: V, v: V) -> V {
    if cross(u, v) > 0 {
        (u.0 + v.0, u.1 + v.1)
    } else {
        (-u.1, u.0)
    }
}

fn norm2(v: V) -> i128 {
    v.0 * v.0 + v.1 * v.1
}

/// Relative interior of `(a, b)` meets the closed segment `(c, d)`.
fn open_cross(a: V, b: V, c: V, d: V) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    if o1 == 0 && o2 == 0 {
        let (s0, s1) = if a <= b { (a, b) } else { (b, a) };
        let (t0, t1) = if c <= d { (c, d) } else { (d, c) };
        return t1 > s0 && t0 < s1;
    }
    if o1 * o2 > 0 {
        return false;
    }
    orient(c, d, a) * orient(c, d, b) < 0
}

fn in_front(s: (V, V), t: (V, V)) -> bool {
    let o = (0, 0);
    let t1 = orient(s.0, s.1, t.0);
    let t2 = orient(s.0, s.1, t.1);
    if t1 * t2 >= 0 {
        let side = if t1 != 0 { t1 } else { t2 };
        return side != orient(s.0, s.1, o);
    }
    let s1 = orient(t.0, t.1, s.0);
    let s2 = orient(t.0, t.1, s.1);
    let side = if s1 != 0 { s1 } else { s2 };
    side == orient(t.0, t.1, o)
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Scales the scene about `p`, or `None` if some coordinate is too large.
fn scaled(scene: &Scene, p: &Point) -> Option<(Vec<(V, V)>, [V; 4])> {
    let mut coords: Vec<&Scalar> = Vec::with_capacity(4 * scene.len() + 6);
    coords.push(&p.x);
    coords.push(&p.y);
    for s in scene.segments() {
        coords.extend([&s.a.x, &s.a.y, &s.b.x, &s.b.y]);
    }
    let b = scene.bbox();
    coords.extend([&b.min.x, &b.min.y, &b.max.x, &b.max.y]);
    let mut lcm: i128 = 1;
    for c in &coords {
        let (_, d) = c.as_small()?;
        let d = d as i128;
        lcm = lcm / gcd(lcm, d) * d;
        if lcm > LIMIT {
            return None;
        }
    }
    let scale = |c: &Scalar| -> Option<i128> {
        let (n, d) = c.as_small()?;
        (n as i128).checked_mul(lcm / d as i128)
    };
    let (px, py) = (scale(&p.x)?, scale(&p.y)?);
    let rel = |q: &Point| -> Option<V> {
        let x = scale(&q.x)?.checked_sub(px)?;
        let y = scale(&q.y)?.checked_sub(py)?;
        (x.abs() < LIMIT && y.abs() < LIMIT).then_some((x, y))
    };
    let mut segs = Vec::with_capacity(scene.len());
    for s in scene.segments() {
        segs.push((rel(&s.a)?, rel(&s.b)?));
    }
    let c = b.corners();
    let corners = [rel(&c[0])?, rel(&c[1])?, rel(&c[2])?, rel(&c[3])?];
    Some((segs, corners))
}

enum Event {
    Start(SegmentId),
    End(SegmentId),
    Corner,
    Radial(SegmentId),
}

/// Visible set of `p` (off every obstacle), or `None` when the coordinates
/// are too large for the integer predicates.
pub(super) fn visible_set(scene: &Scene, p: &Point) -> Option<BTreeSet<SegmentId>> {
    let (segs, corners) = scaled(scene, p)?;
    let n = segs.len();
    let mut events: Vec<(V, Event)> = Vec::with_capacity(2 * n + 4);
    let mut starts: Vec<V> = Vec::with_capacity(n);
    let mut ends: Vec<V> = Vec::with_capacity(n);
    let mut radial = Vec::new();
    for (id, &(a, b)) in segs.iter().enumerate() {
        match cross(a, b).signum() {
            1 => {
                events.push((a, Event::Start(id)));
                events.push((b, Event::End(id)));
                starts.push(a);
                ends.push(b);
            }
            -1 => {
                events.push((b, Event::Start(id)));
                events.push((a, Event::End(id)));
                starts.push(b);
                ends.push(a);
            }
            _ => {
                let near = if norm2(a) <= norm2(b) { a } else { b };
                events.push((near, Event::Radial(id)));
                radial.push(id);
                starts.push(a);
                ends.push(b);
            }
        }
    }
    for c in corners {
        if c != (0, 0) {
            events.push((c, Event::Corner));
        }
    }
    events.sort_by(|a, b| direction_compare(a.0, b.0));
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < events.len() {
        let mut j = i + 1;
        while j < events.len() && direction_compare(events[i].0, events[j].0) == Ordering::Equal {
            j += 1;
        }
        groups.push((i, j));
        i = j;
    }
    let k = groups.len();
    let dir = |g: usize| events[groups[g % k].0].0;
    let crosses = |id: SegmentId, w: V| cross(starts[id], w) > 0 && cross(w, ends[id]) > 0;
    let closer = |a: SegmentId, b: SegmentId| in_front(segs[a], segs[b]);

    let w_init = direction_between(dir(k - 1), dir(0));
    let mut status: Vec<SegmentId> = (0..n).filter(|&id| !radial.contains(&id) && crosses(id, w_init)).collect();
    status.sort_by(|&a, &b| if a == b { Ordering::Equal } else if closer(a, b) { Ordering::Less } else { Ordering::Greater });

    let mut visible = BTreeSet::new();
    for g in 0..k {
        let (lo, hi) = groups[g];
        for (near, ev) in &events[lo..hi] {
            if let Event::Radial(id) = ev {
                let nearby = status.iter().chain(events[lo..hi].iter().filter_map(|(_, ev)| match ev {
                    Event::Start(i) | Event::End(i) | Event::Radial(i) => Some(i),
                    Event::Corner => None,
                }));
                let mut clear = true;
                for &c in nearby {
                    if c != *id && open_cross((0, 0), *near, segs[c].0, segs[c].1) {
                        clear = false;
                        break;
                    }
                }
                if clear {
                    visible.insert(*id);
                }
            }
        }
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
        if let Some(&front) = status.first() {
            visible.insert(front);
        }
    }
    Some(visible)
}
