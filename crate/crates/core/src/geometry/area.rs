use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::variety::{ChartPoint, VarietyDescriptor, VarietyKind};

/// Monte-Carlo omega-area estimate with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct AreaEstimate {
    pub area: f64,
    pub std_err: f64,
}

/// Total mass `int omega^n / n!` of the variety in the line-area-1
/// normalization: 1 for CP^1, 1/2 for CP^2, 1 for the quadric.
pub fn total_mass(desc: &VarietyDescriptor) -> f64 {
    match desc.kind {
        VarietyKind::Cp1 | VarietyKind::QuadricP1xP1 => 1.0,
        VarietyKind::Cp2 => 0.5,
    }
}

/// Van der Corput radical inverse in the given base.
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Fubini-Study-uniform point on CP^1 from a low-discrepancy index
/// (inverse CDF of the radial area law `r^2 / (1 + r^2)`).
pub fn sample_halton_cp1(desc: &VarietyDescriptor, index: u64) -> ChartPoint {
    let t = halton(index + 1, 2).clamp(1e-12, 1.0 - 1e-12);
    let theta = 2.0 * std::f64::consts::PI * halton(index + 1, 3);
    let r = (t / (1.0 - t)).sqrt();
    desc.canonical(&ChartPoint::cp1(Complex64::from_polar(r, theta)))
}

/// Fubini-Study-uniform random point: unit-sphere projection of standard
/// complex Gaussians, factor by factor.
pub fn sample_uniform(desc: &VarietyDescriptor, rng: &mut impl Rng) -> ChartPoint {
    let mut factors = Vec::new();
    for f in desc.factors() {
        factors.push((0..=f.dim).map(|_| gaussian(rng)).collect::<Vec<_>>());
    }
    let mut hom = super::variety::Homogeneous { factors };
    for coords in &mut hom.factors {
        let norm = coords.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in coords.iter_mut() {
            *z /= norm;
        }
    }
    desc.from_homogeneous(&hom)
}

/// Box-Muller standard complex Gaussian.
fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let u: f64 = loop {
        let v = rng.gen::<f64>();
        if v > 0.0 {
            break v;
        }
    };
    let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    Complex64::from_polar((-2.0 * u.ln()).sqrt(), theta)
}

/// omega-area of the region described by a membership predicate. CP^1 uses
/// a deterministic low-discrepancy point set; higher-dimensional varieties
/// use a seeded Gaussian sampler. The reported standard error is the plain
/// Monte-Carlo estimate (conservative for the low-discrepancy set).
pub fn fs_area<F>(desc: &VarietyDescriptor, pred: F, samples: usize, seed: u64) -> AreaEstimate
where
    F: Fn(&ChartPoint) -> bool + Sync,
{
    let mass = total_mass(desc);
    let hits: usize = if desc.kind == VarietyKind::Cp1 {
        (0..samples as u64)
            .into_par_iter()
            .map(|i| usize::from(pred(&sample_halton_cp1(desc, i))))
            .sum()
    } else {
        (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i.wrapping_mul(0x9e3779b97f4a7c15)));
                usize::from(pred(&sample_uniform(desc, &mut rng)))
            })
            .sum()
    };
    let p = hits as f64 / samples as f64;
    AreaEstimate {
        area: mass * p,
        std_err: mass * (p * (1.0 - p) / samples as f64).sqrt(),
    }
}
