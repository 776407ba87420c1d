use num_complex::Complex64;

use super::phi::{h_norm, DIVISOR_EPS};
use super::section::Section;
use super::variety::ChartPoint;
use super::GeometryError;

/// Accumulated twist of `arg h` relative to covariant-constant transport of
/// the Chern connection along a path.
#[derive(Clone, Copy, Debug)]
pub struct PhaseTransport {
    /// Net increment over the whole path (radians).
    pub total: f64,
    /// Maximum absolute running increment along the path.
    pub max_abs: f64,
}

/// Subdivide polyline segments so that no chart chord exceeds `max_seg`.
pub fn resample_polyline(
    section: &Section,
    path: &[ChartPoint],
    max_seg: f64,
) -> Vec<ChartPoint> {
    let desc = &section.descriptor;
    let mut out: Vec<ChartPoint> = Vec::with_capacity(path.len());
    for pair in path.windows(2) {
        let p = &pair[0];
        let q = match desc.convert(&pair[1], p.chart) {
            Ok(q) => q,
            Err(_) => {
                out.push(p.clone());
                continue;
            }
        };
        let chord: f64 = p
            .coords
            .iter()
            .zip(&q.coords)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let pieces = (chord / max_seg).ceil().max(1.0) as usize;
        for i in 0..pieces {
            let t = i as f64 / pieces as f64;
            let coords: Vec<Complex64> = p
                .coords
                .iter()
                .zip(&q.coords)
                .map(|(a, b)| a * (1.0 - t) + b * t)
                .collect();
            out.push(desc.canonical(&ChartPoint::new(p.chart, coords)));
        }
    }
    if let Some(last) = path.last() {
        out.push(last.clone());
    }
    out
}

/// Twist of `arg h` relative to covariant-constant transport along a sampled
/// polyline: per segment, the change of `arg p` in the chart trivialization
/// minus the integral of the imaginary part of the Chern connection form.
/// For a closed loop in CP^1 bounding a region R with m zeros of h inside,
/// the total is `2 pi (m - k area(R))`.
pub fn phase_increment(
    section: &Section,
    path: &[ChartPoint],
) -> Result<PhaseTransport, GeometryError> {
    let desc = &section.descriptor;
    let factors = desc.factors();
    let mut total = 0.0f64;
    let mut max_abs = 0.0f64;
    for pair in path.windows(2) {
        let p = &pair[0];
        // Express both endpoints in one chart; segments are short so at
        // least one of the two charts covers both.
        let (p, q) = match desc.convert(&pair[1], p.chart) {
            Ok(q) => (p.clone(), q),
            Err(_) => {
                let q = pair[1].clone();
                let p = desc.convert(p, q.chart)?;
                (p, q)
            }
        };
        let poly = section.chart_poly(p.chart);
        for pt in [&p, &q] {
            if h_norm(section, pt) < DIVISOR_EPS {
                return Err(GeometryError::OnDivisor { h_norm: h_norm(section, pt) });
            }
        }
        let vp = poly.eval(&p.coords);
        let vq = poly.eval(&q.coords);
        let darg = (vq / vp).arg();

        // Connection form along the straight chart segment, Simpson rule.
        let du: Vec<Complex64> =
            q.coords.iter().zip(&p.coords).map(|(b, a)| b - a).collect();
        let form = |t: f64| -> f64 {
            let mut val = 0.0;
            let mut off = 0;
            for f in &factors {
                let mut inner = Complex64::new(0.0, 0.0);
                let mut rho = 0.0;
                for a in off..off + f.dim {
                    let u = p.coords[a] * (1.0 - t) + q.coords[a] * t;
                    inner += u.conj() * du[a];
                    rho += u.norm_sqr();
                }
                val += f64::from(f.level) * (inner / (1.0 + rho)).im;
                off += f.dim;
            }
            val
        };
        let integral = (form(0.0) + 4.0 * form(0.5) + form(1.0)) / 6.0;
        total += darg - integral;
        max_abs = max_abs.max(total.abs());
    }
    Ok(PhaseTransport { total, max_abs })
}
