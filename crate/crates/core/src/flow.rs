//! Gradient-flow integration for phi: trajectory classification (converge /
//! escape to the divisor / budget), separatrix tracing, and basin fields.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::critical::CriticalSet;
use crate::geometry::{
    eval_phi, grad_phi, h_norm, hessian_phi, metric_real, riemannian_grad_norm, ChartPoint,
    Section,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowDirection {
    /// Toward the divisor (phi increases).
    Ascending,
    /// Toward the minima (phi decreases).
    Descending,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fate {
    /// Critical cluster id (isolated point or Bott circle).
    ConvergedTo(usize),
    /// Label of the nearest divisor zero at escape, when known.
    EscapedToDivisor(Option<usize>),
    /// Step or time budget exhausted; deliberately not coerced.
    Budget,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<ChartPoint>,
    pub fate: Fate,
    pub phi_profile: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct FlowControls {
    pub rtol: f64,
    pub atol: f64,
    /// |h| below this declares divisor escape (phi > 23 there).
    pub escape_h: f64,
    /// Gradient norm for convergence at an isolated cluster.
    pub grad_tol: f64,
    /// Bott-circle convergence: distance < bott_dist and gradient < bott_grad.
    pub bott_dist: f64,
    pub bott_grad: f64,
    pub max_steps: usize,
    /// Flow-time horizon; infinite for classification runs.
    pub max_time: f64,
    /// Record the polyline and phi profile (off for bulk classification).
    pub record: bool,
}

impl Default for FlowControls {
    fn default() -> Self {
        Self {
            rtol: 1e-6,
            atol: 1e-9,
            escape_h: 1e-10,
            grad_tol: 1e-9,
            bott_dist: 1e-5,
            bott_grad: 1e-7,
            max_steps: 100_000,
            max_time: f64::INFINITY,
            record: true,
        }
    }
}

fn rhs(section: &Section, p: &ChartPoint, sign: f64) -> Option<DVector<f64>> {
    let g = grad_phi(section, p).ok()?;
    let mut v = DVector::zeros(2 * g.len());
    for (a, z) in g.iter().enumerate() {
        v[2 * a] = sign * z.re;
        v[2 * a + 1] = sign * z.im;
    }
    Some(v)
}

fn offset(p: &ChartPoint, v: &DVector<f64>) -> ChartPoint {
    let coords = p
        .coords
        .iter()
        .enumerate()
        .map(|(a, z)| z + Complex64::new(v[2 * a], v[2 * a + 1]))
        .collect();
    ChartPoint::new(p.chart, coords)
}

/// A descending trajectory this close to an index-0 cluster with this small
/// a gradient cannot leave its basin; snapping avoids a step-size ratchet at
/// the integrator's stability boundary around steep minima.
const SINK_DIST: f64 = 1e-5;
const SINK_GRAD: f64 = 1e-3;

/// Terminal check shared by every accepted state.
fn settled(
    section: &Section,
    critical: &CriticalSet,
    p: &ChartPoint,
    direction: FlowDirection,
    controls: &FlowControls,
) -> Option<usize> {
    let g = riemannian_grad_norm(section, p).ok()?;
    if g < controls.grad_tol {
        return critical.nearest_cluster(section, p).map(|(id, _)| id);
    }
    if g < controls.bott_grad {
        if let Some((id, d)) = critical.nearest_cluster(section, p) {
            if critical.circle_for_cluster(id).is_some() && d < controls.bott_dist {
                return Some(id);
            }
        }
    }
    if direction == FlowDirection::Descending && g < SINK_GRAD {
        if let Some((id, d)) = critical.nearest_cluster(section, p) {
            let min_record =
                critical.record_for_cluster(id).is_some_and(|r| r.morse_index == 0) && d < SINK_DIST;
            let min_circle =
                critical.circle_for_cluster(id).is_some_and(|c| c.morse_index == 0)
                    && d < controls.bott_dist;
            if min_record || min_circle {
                return Some(id);
            }
        }
    }
    None
}

fn nearest_zero(section: &Section, zeros: &[(ChartPoint, usize)], p: &ChartPoint) -> Option<usize> {
    zeros
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            section
                .descriptor
                .distance(&a.0, p)
                .total_cmp(&section.descriptor.distance(&b.0, p))
        })
        .map(|(i, _)| i)
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive embedded Runge-Kutta integration of the gradient flow with
/// chart switching and phi-monotonicity enforced at step acceptance.
pub fn integrate(
    section: &Section,
    critical: &CriticalSet,
    zeros: &[(ChartPoint, usize)],
    start: &ChartPoint,
    direction: FlowDirection,
    controls: &FlowControls,
) -> Trajectory {
    let desc = &section.descriptor;
    let sign = match direction {
        FlowDirection::Ascending => 1.0,
        FlowDirection::Descending => -1.0,
    };
    let mut p = if start.max_abs() > 1.5 { desc.canonical(start) } else { start.clone() };
    let mut samples = Vec::new();
    let mut phi_profile = Vec::new();
    let mut record = |p: &ChartPoint, phi: f64| {
        if controls.record {
            samples.push(p.clone());
            phi_profile.push(phi);
        }
    };

    let mut phi = match eval_phi(section, &p) {
        Ok(v) => v,
        Err(_) => {
            // Started essentially on the divisor.
            return Trajectory {
                samples: vec![p.clone()],
                fate: Fate::EscapedToDivisor(nearest_zero(section, zeros, &p)),
                phi_profile: Vec::new(),
            };
        }
    };
    record(&p, phi);
    if let Some(id) = settled(section, critical, &p, direction, controls) {
        return Trajectory { samples, fate: Fate::ConvergedTo(id), phi_profile };
    }

    let mut h: f64 = 1e-3;
    let mut t = 0.0;
    let mut accepted = 0usize;
    while accepted < controls.max_steps {
        if t >= controls.max_time {
            return Trajectory { samples, fate: Fate::Budget, phi_profile };
        }
        if h_norm(section, &p) < controls.escape_h {
            record(&p, phi);
            let label = nearest_zero(section, zeros, &p);
            return Trajectory { samples, fate: Fate::EscapedToDivisor(label), phi_profile };
        }
        h = h.min(controls.max_time - t).max(1e-14);

        // One attempted RK step; any stage failure (divisor proximity)
        // shrinks the step.
        let mut ks: Vec<DVector<f64>> = Vec::with_capacity(7);
        let k1 = match rhs(section, &p, sign) {
            Some(k) => k,
            None => {
                record(&p, phi);
                let label = nearest_zero(section, zeros, &p);
                return Trajectory { samples, fate: Fate::EscapedToDivisor(label), phi_profile };
            }
        };
        ks.push(k1);
        let mut stage_failed = false;
        for row in &A {
            let mut d = DVector::zeros(2 * desc.n());
            for (j, k) in ks.iter().enumerate() {
                if row[j] != 0.0 {
                    d += k * (row[j] * h);
                }
            }
            match rhs(section, &offset(&p, &d), sign) {
                Some(k) => ks.push(k),
                None => {
                    stage_failed = true;
                    break;
                }
            }
        }
        if stage_failed {
            h *= 0.25;
            if h < 1e-14 {
                record(&p, phi);
                let label = nearest_zero(section, zeros, &p);
                return Trajectory { samples, fate: Fate::EscapedToDivisor(label), phi_profile };
            }
            continue;
        }

        let mut d5 = DVector::zeros(2 * desc.n());
        let mut d4 = DVector::zeros(2 * desc.n());
        for (j, k) in ks.iter().enumerate() {
            if B5[j] != 0.0 {
                d5 += k * (B5[j] * h);
            }
            if B4[j] != 0.0 {
                d4 += k * (B4[j] * h);
            }
        }
        let cand = offset(&p, &d5);
        let scale = controls.atol + controls.rtol * p.max_abs().max(cand.max_abs());
        let err = (&d5 - &d4).amax() / scale;
        let cand_phi = eval_phi(section, &cand);
        let monotone = match (&cand_phi, direction) {
            (Ok(v), FlowDirection::Ascending) => *v >= phi - 1e-10,
            (Ok(v), FlowDirection::Descending) => *v <= phi + 1e-10,
            (Err(_), _) => false,
        };
        if err <= 1.0 && monotone {
            t += h;
            accepted += 1;
            p = cand;
            phi = cand_phi.unwrap();
            if p.max_abs() > 1.5 {
                p = desc.canonical(&p);
            }
            record(&p, phi);
            if let Some(id) = settled(section, critical, &p, direction, controls) {
                return Trajectory { samples, fate: Fate::ConvergedTo(id), phi_profile };
            }
            let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
            h = (h * factor.clamp(0.2, 5.0)).min(0.5);
        } else if !monotone && err <= 1.0 {
            h *= 0.5;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
        if h < 1e-14 {
            // Stalled: almost always a grazing pass at the divisor.
            record(&p, phi);
            if h_norm(section, &p) < 1e-6 {
                let label = nearest_zero(section, zeros, &p);
                return Trajectory { samples, fate: Fate::EscapedToDivisor(label), phi_profile };
            }
            return Trajectory { samples, fate: Fate::Budget, phi_profile };
        }
    }
    record(&p, phi);
    Trajectory { samples, fate: Fate::Budget, phi_profile }
}

/// A saddle's stable curve under the ascending flow, traced by descending
/// integration from both offsets along the stable eigendirection.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Separatrix {
    pub saddle: usize,
    /// Both halves run from near the saddle down to their terminal cluster.
    pub halves: [Trajectory; 2],
}

impl Separatrix {
    pub fn complete(&self) -> bool {
        self.halves.iter().all(|t| matches!(t.fate, Fate::ConvergedTo(_)))
    }

    pub fn endpoints(&self) -> [Option<usize>; 2] {
        let end = |t: &Trajectory| match t.fate {
            Fate::ConvergedTo(id) => Some(id),
            _ => None,
        };
        [end(&self.halves[0]), end(&self.halves[1])]
    }
}

/// Offset magnitude off the saddle along its stable eigendirection.
const SEPARATRIX_OFFSET: f64 = 1e-5;

/// Descending unit direction (metric-normalized) of the saddle's negative
/// Hessian eigenvalue, in chart coordinates.
fn stable_direction(section: &Section, p: &ChartPoint) -> Option<DVector<f64>> {
    let h = hessian_phi(section, p).ok()?;
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut best = 0;
    for i in 0..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    if eig.eigenvalues[best] >= 0.0 {
        return None;
    }
    let v: DVector<f64> = eig.eigenvectors.column(best).into_owned();
    let g = metric_real(&section.descriptor, p);
    let l = nalgebra::Cholesky::new(g)?.l();
    l.transpose().solve_upper_triangular(&v)
}

/// Trace one separatrix per index-1 saddle of the critical set.
pub fn trace_separatrices(
    section: &Section,
    critical: &CriticalSet,
    zeros: &[(ChartPoint, usize)],
    controls: &FlowControls,
) -> Vec<Separatrix> {
    let mut controls = *controls;
    controls.record = true;
    // Skeleton edges feed the connection-phase checks, which integrate
    // arg h along the polyline; they need tighter tracking than bulk
    // classification.
    controls.rtol = controls.rtol.min(1e-9);
    controls.atol = controls.atol.min(1e-12);
    critical
        .saddles()
        .into_par_iter()
        .filter_map(|id| {
            let rec = critical.record_for_cluster(id)?;
            let dir = stable_direction(section, &rec.location)?;
            let run = |sign: f64| {
                let start = offset(&rec.location, &(&dir * (sign * SEPARATRIX_OFFSET)));
                integrate(section, critical, zeros, &start, FlowDirection::Descending, &controls)
            };
            let (a, b) = rayon::join(|| run(1.0), || run(-1.0));
            Some(Separatrix { saddle: id, halves: [a, b] })
        })
        .collect()
}

/// Ascending fate of a single point (bulk classification entry point).
pub fn ascend_fate(
    section: &Section,
    critical: &CriticalSet,
    zeros: &[(ChartPoint, usize)],
    p: &ChartPoint,
    controls: &FlowControls,
) -> Fate {
    let mut controls = *controls;
    controls.record = false;
    integrate(section, critical, zeros, p, FlowDirection::Ascending, &controls).fate
}

/// Ascending fates of a regular grid over chart-0 coordinates
/// `[-half, half]^2` (n = 1 only). Row-major, y outer.
pub fn classify_grid(
    section: &Section,
    critical: &CriticalSet,
    zeros: &[(ChartPoint, usize)],
    grid: usize,
    half: f64,
    controls: &FlowControls,
) -> Vec<(ChartPoint, Fate)> {
    assert_eq!(section.descriptor.n(), 1, "grid classification is defined for curves");
    let pts: Vec<ChartPoint> = (0..grid * grid)
        .map(|i| {
            let (iy, ix) = (i / grid, i % grid);
            let step = 2.0 * half / (grid.max(2) - 1) as f64;
            ChartPoint::cp1(Complex64::new(-half + ix as f64 * step, -half + iy as f64 * step))
        })
        .collect();
    pts.into_par_iter()
        .map(|p| {
            let fate = ascend_fate(section, critical, zeros, &p, controls);
            (p, fate)
        })
        .collect()
}
