//! Backward-orbit dynamics of univalent holomorphic self-maps.
//!
//! The crate computes Kobayashi geometry on a small catalog of homogeneous
//! domains (disc, ball, polydisc, Siegel upper half-space, slit plane),
//! iterates self-maps given in a small expression language forwards and
//! backwards, estimates backward/forward step sequences and divergence
//! rates, classifies maps as elliptic/parabolic/hyperbolic, partitions the
//! stable subset into canonical submanifolds, and verifies pre-models
//! against hyperbolic normal forms.
//!
//! Distances use the doubled convention `k(0, r) = log((1+r)/(1-r))`; see
//! [`geometry::Convention`] for the `arctanh` rescaling.

pub mod catalog;
pub mod dsl;
pub mod dynamics;
pub mod geometry;
pub mod holomap;
pub mod premodel;
pub mod seq;
pub mod stable_set;
pub mod tol;

pub use dsl::{parse_map, ExprMap, MapDef};
pub use geometry::{BoundaryPoint, Convention, DomainKind, DomainModel, DomainPoint, TangentVector};
pub use holomap::{backward_orbit, forward_orbit, invert_point, OrbitRecord};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
