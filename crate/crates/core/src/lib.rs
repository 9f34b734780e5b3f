//! Exact visibility counting for sets of disjoint closed segments.
//!
//! Given segments `S` inside a bounding box, the number of segments visible
//! from a query point is answered exactly by a randomized cutting index over
//! the edges of a colored triangle cover of the segments' visibility regions,
//! correcting a stored count at a representative point of the query's cell.
//! The crate also carries the ground-truth oracle (rotational sweep), the
//! arrangement baseline and the visible-endpoint estimate used to
//! cross-check it.
//!
//! Everything here is pure computation over exact rationals and builds
//! without `std` (an allocator is required).

#![cfg_attr(not(feature = "std"), no_std)]
// Errors carry the exact offending point; index loops mirror the geometry.
#![allow(clippy::result_large_err, clippy::type_complexity, clippy::needless_range_loop)]

extern crate alloc;

pub mod arrangement;
pub mod cover;
pub mod cutting;
pub mod evg;
pub mod geometry;
pub mod grid;
pub mod index;
pub mod scalar;
pub mod scene;
pub mod trapmap;
pub mod visibility;

pub use geometry::{Containment, Intersection, Orientation, Point, Rect, Segment, Triangle};
pub use scalar::Scalar;
pub use scene::{Scene, SceneError, SegmentId};
pub use visibility::{CountResult, VisibilityError, VisibilityPolygon};
