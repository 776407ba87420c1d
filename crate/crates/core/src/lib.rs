//! Numerical realization of Lagrangian skeletons of ample divisor complements.
//!
//! Given a holomorphic section `h` of a positive line bundle power on one of
//! the catalog varieties (CP^1, CP^2, the quadric P^1 x P^1), the crate
//! computes the critical points and finite gradient-flow trajectories of
//! `phi = -ln |h|`, assembles them into a skeleton, measures symplectic face
//! areas and connection phase transport along the skeleton, and compares the
//! resulting topology against an exact integer-homology oracle for the
//! complement.

pub mod critical;
pub mod flow;
pub mod geometry;
pub mod skeleton;
pub mod topology;

pub use geometry::{ChartPoint, Level, Section, VarietyDescriptor, VarietyKind};
pub use topology::{DivisorClass, HomologyResult, ShadowVerdict};
