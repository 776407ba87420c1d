//! Catalog varieties, affine charts, Fubini-Study structure, holomorphic
//! sections and exact evaluation of `phi = -ln |h|` with its derivatives.

mod area;
mod connection;
mod phi;
mod section;
mod variety;

pub use area::{fs_area, halton, sample_halton_cp1, sample_uniform, total_mass, AreaEstimate};
pub use connection::{phase_increment, resample_polyline, PhaseTransport};
pub use phi::{
    eval_phi, grad_phi, grad_phi_euclid, h_norm, hessian_euclid, hessian_phi, metric_hermitian,
    metric_real, riemannian_grad_norm, spectrum_and_index, DIVISOR_EPS,
};
pub use section::{monomial_exponents, Section, SectionJson};
pub use variety::{ChartPoint, Homogeneous, Level, VarietyDescriptor, VarietyKind};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    /// The point is within the hard proximity floor of the zero set of `h`.
    #[error("point lies on or too close to the divisor (|h| = {h_norm:.3e})")]
    OnDivisor { h_norm: f64 },
    #[error("point lies outside the domain of chart {chart}")]
    ChartUndefined { chart: u8 },
    #[error("invalid variety descriptor: {0}")]
    BadDescriptor(String),
    #[error("invalid section: {0}")]
    BadSection(String),
}
