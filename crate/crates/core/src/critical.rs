//! Location and classification of the critical points of phi, including
//! Morse-Bott critical circles arising in symmetric configurations.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{
    grad_phi_euclid, halton, hessian_euclid, hessian_phi, metric_real, riemannian_grad_norm,
    spectrum_and_index, ChartPoint, Section,
};
use crate::topology::{euler_complement, DivisorClass};
use crate::geometry::{eval_phi, VarietyKind};

/// Record invariant: the Riemannian gradient norm at each record is below
/// this bound.
pub const GRAD_TOL: f64 = 1e-9;
/// Newton termination target (well below GRAD_TOL so the invariant holds
/// with margin after re-chart).
const NEWTON_TOL: f64 = 1e-11;
/// Chart-aware deduplication radius.
pub const MERGE_RADIUS: f64 = 1e-6;
/// Near-zero Hessian eigenvalue threshold for Morse-Bott detection.
pub const DEGENERATE_TAU: f64 = 1e-6;
/// Predictor step (metric arc length) for circle continuation.
const CIRCLE_STEP: f64 = 1e-2;
/// A continued circle must close to within this distance of its start.
const CIRCLE_CLOSE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalKind {
    Isolated,
    BottCircleMember,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalRecord {
    pub location: ChartPoint,
    pub phi_value: f64,
    /// 2n eigenvalues of the metric-frame Hessian, ascending.
    pub hessian_spectrum: Vec<f64>,
    /// Count of eigenvalues below -tau; bounded by n for plurisubharmonic
    /// phi.
    pub morse_index: usize,
    pub kind: CriticalKind,
    pub cluster_id: usize,
    pub residual: f64,
}

/// A closed critical circle, sampled at metric arc-length steps of about
/// `1e-2`; first and last samples coincide.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BottCircle {
    pub cluster_id: usize,
    /// Transversal Morse index of the circle.
    pub morse_index: usize,
    pub samples: Vec<ChartPoint>,
}

/// A converged solution with a near-singular Hessian that could not be
/// resolved into a closed circle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DegenerateDiagnostic {
    pub location: ChartPoint,
    pub hessian_spectrum: Vec<f64>,
    pub reason: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CriticalSet {
    pub records: Vec<CriticalRecord>,
    pub bott_circles: Vec<BottCircle>,
    /// Isolated records per Morse index.
    pub counts_by_index: Vec<usize>,
    pub nonconverged_starts: usize,
    pub unresolved: Vec<DegenerateDiagnostic>,
}

impl CriticalSet {
    pub fn isolated(&self) -> impl Iterator<Item = &CriticalRecord> {
        self.records.iter().filter(|r| r.kind == CriticalKind::Isolated)
    }

    pub fn num_clusters(&self) -> usize {
        self.isolated().count() + self.bott_circles.len()
    }

    /// Cluster ids of isolated minima.
    pub fn minima(&self) -> Vec<usize> {
        self.isolated().filter(|r| r.morse_index == 0).map(|r| r.cluster_id).collect()
    }

    /// Cluster ids of isolated index-1 saddles.
    pub fn saddles(&self) -> Vec<usize> {
        self.isolated().filter(|r| r.morse_index == 1).map(|r| r.cluster_id).collect()
    }

    pub fn record_for_cluster(&self, id: usize) -> Option<&CriticalRecord> {
        self.records.iter().find(|r| r.cluster_id == id && r.kind == CriticalKind::Isolated)
    }

    pub fn circle_for_cluster(&self, id: usize) -> Option<&BottCircle> {
        self.bott_circles.iter().find(|c| c.cluster_id == id)
    }

    /// Nearest cluster (isolated point or circle) and its chart-aware
    /// distance from `p`.
    pub fn nearest_cluster(&self, section: &Section, p: &ChartPoint) -> Option<(usize, f64)> {
        let desc = &section.descriptor;
        let mut best: Option<(usize, f64)> = None;
        for r in self.isolated() {
            let d = desc.distance(&r.location, p);
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((r.cluster_id, d));
            }
        }
        for c in &self.bott_circles {
            let d = desc.distance_to_polyline(&c.samples, p);
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((c.cluster_id, d));
            }
        }
        best
    }
}

fn real_vec(e: &[Complex64]) -> DVector<f64> {
    let mut v = DVector::zeros(2 * e.len());
    for (a, z) in e.iter().enumerate() {
        v[2 * a] = z.re;
        v[2 * a + 1] = z.im;
    }
    v
}

fn apply_step(p: &ChartPoint, step: &DVector<f64>, scale: f64) -> ChartPoint {
    let coords = p
        .coords
        .iter()
        .enumerate()
        .map(|(a, z)| z + scale * Complex64::new(step[2 * a], step[2 * a + 1]))
        .collect();
    ChartPoint::new(p.chart, coords)
}

/// Low-discrepancy multistart grid: `budget` Halton disk points per chart,
/// radius 1.3 (overlapping the neighboring charts). The seed offsets the
/// sequence index, so a doubled budget extends rather than replaces the
/// start set.
fn start_points(section: &Section, budget: usize, seed: u64) -> Vec<ChartPoint> {
    let desc = section.descriptor;
    let n = desc.n();
    let bases = [2u64, 3, 5, 7];
    let offset = (seed % 65_536) * 100_000;
    let mut starts = Vec::with_capacity(budget * desc.num_charts());
    for chart in 0..desc.num_charts() {
        for i in 0..budget {
            let idx = offset + i as u64 + 1;
            let coords = (0..n)
                .map(|a| {
                    let r = 1.3 * halton(idx, bases[2 * a]).sqrt();
                    let th = std::f64::consts::TAU * halton(idx, bases[2 * a + 1]);
                    Complex64::from_polar(r, th)
                })
                .collect();
            starts.push(ChartPoint::new(chart as u8, coords));
        }
    }
    starts
}

/// Damped Newton on the real 2n-dimensional system grad phi = 0, with chart
/// switching. Returns the solution and its Riemannian gradient norm.
fn newton(section: &Section, start: &ChartPoint) -> Option<(ChartPoint, f64)> {
    let desc = &section.descriptor;
    let mut p = start.clone();
    let mut res = riemannian_grad_norm(section, &p).ok()?;
    for _ in 0..80 {
        if !res.is_finite() {
            return None;
        }
        if res < NEWTON_TOL {
            return Some((p, res));
        }
        let e = grad_phi_euclid(section, &p).ok()?;
        let hess = hessian_euclid(section, &p).ok()?;
        let mut step = hess.lu().solve(&(-real_vec(&e)))?;
        let norm = step.norm();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        // Trust region in chart coordinates.
        if norm > 0.5 {
            step *= 0.5 / norm;
        }
        let mut accepted = None;
        let mut lambda = 1.0;
        for _ in 0..10 {
            let cand = apply_step(&p, &step, lambda);
            if let Ok(r) = riemannian_grad_norm(section, &cand) {
                if r.is_finite() && r < res {
                    accepted = Some((cand, r));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let (q, r) = accepted?;
        p = if q.max_abs() > 1.5 { desc.canonical(&q) } else { q };
        res = r;
    }
    (res < NEWTON_TOL).then_some((p, res))
}

/// Null eigendirection of the frame Hessian pulled back to chart
/// coordinates (unit metric norm), plus the corresponding eigenvalue.
fn null_tangent(section: &Section, p: &ChartPoint) -> Option<(DVector<f64>, f64)> {
    let h = hessian_phi(section, p).ok()?;
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut best = 0;
    for i in 0..eig.eigenvalues.len() {
        if eig.eigenvalues[i].abs() < eig.eigenvalues[best].abs() {
            best = i;
        }
    }
    let v: DVector<f64> = eig.eigenvectors.column(best).into_owned();
    let g = metric_real(&section.descriptor, p);
    let l = nalgebra::Cholesky::new(g)?.l();
    let w = l.transpose().solve_upper_triangular(&v)?;
    Some((w, eig.eigenvalues[best]))
}

/// Least-squares Newton corrector (pseudo-inverse of the near-singular
/// Euclidean Hessian): moves transversally back onto the critical circle.
fn correct_onto_circle(section: &Section, start: ChartPoint) -> Option<ChartPoint> {
    let desc = &section.descriptor;
    let mut p = start;
    for _ in 0..8 {
        let res = riemannian_grad_norm(section, &p).ok()?;
        if res < NEWTON_TOL {
            return Some(p);
        }
        let e = grad_phi_euclid(section, &p).ok()?;
        let hess = hessian_euclid(section, &p).ok()?;
        let svd = hess.svd(true, true);
        let eps = 1e-8 * svd.singular_values.max();
        let step = svd.solve(&(-real_vec(&e)), eps).ok()?;
        p = apply_step(&p, &step.column(0).into_owned(), 1.0);
        if p.max_abs() > 1.5 {
            p = desc.canonical(&p);
        }
    }
    (riemannian_grad_norm(section, &p).ok()? < 1e-10).then_some(p)
}

/// Predictor-corrector continuation along the null eigendirection.
/// Returns the closed sample loop (first == last) or None.
fn trace_circle(section: &Section, start: &ChartPoint) -> Option<Vec<ChartPoint>> {
    let desc = &section.descriptor;
    let mut samples = vec![start.clone()];
    let mut prev = start.clone();
    for step_i in 0..5000 {
        let cur = samples.last().unwrap().clone();
        let (mut t, eigval) = null_tangent(section, &cur)?;
        if eigval.abs() > 1e-4 {
            return None; // wandered off the degenerate locus
        }
        if step_i > 0 {
            // Keep moving the same way around the circle.
            let prev_here = desc.convert(&prev, cur.chart).ok()?;
            let disp = real_vec(&cur.coords) - real_vec(&prev_here.coords);
            if t.dot(&disp) < 0.0 {
                t = -t;
            }
        }
        let mut cand = apply_step(&cur, &t, CIRCLE_STEP);
        if cand.max_abs() > 1.5 {
            cand = desc.canonical(&cand);
        }
        let cand = correct_onto_circle(section, cand)?;
        if step_i >= 5 && desc.distance(&cand, start) < 0.7 * CIRCLE_STEP {
            // Final aimed step onto the start point.
            let target = desc.convert(start, cand.chart).ok()?;
            let aim = real_vec(&target.coords) - real_vec(&cand.coords);
            let closed = correct_onto_circle(section, apply_step(&cand, &aim, 1.0))?;
            if desc.distance(&closed, start) > CIRCLE_CLOSE {
                return None;
            }
            samples.push(cand);
            samples.push(start.clone());
            return Some(samples);
        }
        prev = cur;
        samples.push(cand);
    }
    None
}

/// Total order on chart points for deterministic output.
fn point_cmp(a: &ChartPoint, b: &ChartPoint) -> std::cmp::Ordering {
    a.chart.cmp(&b.chart).then_with(|| {
        for (x, y) in a.coords.iter().zip(&b.coords) {
            let c = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
            if c != std::cmp::Ordering::Equal {
                return c;
            }
        }
        std::cmp::Ordering::Equal
    })
}

/// Multistart damped Newton over all charts with chart-aware deduplication,
/// Hessian classification, and Morse-Bott circle continuation.
/// Deterministic for a fixed (section, budget, seed).
pub fn find_critical_points(section: &Section, budget_per_chart: usize, seed: u64) -> CriticalSet {
    let desc = &section.descriptor;
    let starts = start_points(section, budget_per_chart.max(1), seed);
    let attempted = starts.len();
    let mut sols: Vec<(ChartPoint, f64)> =
        starts.par_iter().filter_map(|s| newton(section, s)).collect();
    let nonconverged_starts = attempted - sols.len();

    // Keep the smallest-residual representative within the merge radius.
    sols.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut unique: Vec<(ChartPoint, f64)> = Vec::new();
    for (p, r) in sols {
        let pc = desc.canonical(&p);
        if unique.iter().all(|(q, _)| desc.distance(q, &pc) > MERGE_RADIUS) {
            unique.push((pc, r));
        }
    }
    unique.sort_by(|a, b| point_cmp(&a.0, &b.0));

    struct Classified {
        location: ChartPoint,
        residual: f64,
        phi_value: f64,
        spectrum: Vec<f64>,
        index: usize,
        null: usize,
    }
    let classified: Vec<Classified> = unique
        .into_iter()
        .filter_map(|(p, r)| {
            let h = hessian_phi(section, &p).ok()?;
            let (spectrum, index, null) = spectrum_and_index(&h, DEGENERATE_TAU);
            let phi_value = eval_phi(section, &p).ok()?;
            Some(Classified { location: p, residual: r, phi_value, spectrum, index, null })
        })
        .collect();

    let mut isolated: Vec<CriticalRecord> = Vec::new();
    let mut circles: Vec<(Vec<ChartPoint>, usize, Vec<CriticalRecord>)> = Vec::new();
    let mut unresolved = Vec::new();
    let mut circle_member: Vec<Option<usize>> = vec![None; classified.len()];

    for (i, c) in classified.iter().enumerate() {
        if c.null == 0 {
            isolated.push(CriticalRecord {
                location: c.location.clone(),
                phi_value: c.phi_value,
                hessian_spectrum: c.spectrum.clone(),
                morse_index: c.index,
                kind: CriticalKind::Isolated,
                cluster_id: 0,
                residual: c.residual,
            });
        } else if c.null >= 2 {
            unresolved.push(DegenerateDiagnostic {
                location: c.location.clone(),
                hessian_spectrum: c.spectrum.clone(),
                reason: format!("{} near-zero Hessian eigenvalues", c.null),
            });
        } else if circle_member[i].is_none() {
            match trace_circle(section, &c.location) {
                Some(samples) => {
                    let idx = circles.len();
                    // Absorb every degenerate solution lying on this circle.
                    for (j, cj) in classified.iter().enumerate() {
                        if cj.null == 1
                            && circle_member[j].is_none()
                            && desc.distance_to_polyline(&samples, &cj.location) < 1e-3
                        {
                            circle_member[j] = Some(idx);
                        }
                    }
                    circles.push((samples, c.index, Vec::new()));
                }
                None => unresolved.push(DegenerateDiagnostic {
                    location: c.location.clone(),
                    hessian_spectrum: c.spectrum.clone(),
                    reason: "circle continuation failed to close".into(),
                }),
            }
        }
    }
    for (j, member) in circle_member.iter().enumerate() {
        if let Some(idx) = *member {
            let c = &classified[j];
            circles[idx].2.push(CriticalRecord {
                location: c.location.clone(),
                phi_value: c.phi_value,
                hessian_spectrum: c.spectrum.clone(),
                morse_index: c.index,
                kind: CriticalKind::BottCircleMember,
                cluster_id: 0,
                residual: c.residual,
            });
        }
    }

    // Cluster ids: isolated records first (in canonical order), circles after.
    let n_iso = isolated.len();
    for (id, r) in isolated.iter_mut().enumerate() {
        r.cluster_id = id;
    }
    let mut records = isolated;
    let mut bott_circles = Vec::new();
    for (i, (samples, index, mut members)) in circles.into_iter().enumerate() {
        let id = n_iso + i;
        for m in &mut members {
            m.cluster_id = id;
        }
        records.extend(members);
        bott_circles.push(BottCircle { cluster_id: id, morse_index: index, samples });
    }

    let mut counts_by_index = vec![0usize; 2 * desc.n() + 1];
    for r in &records {
        if r.kind == CriticalKind::Isolated {
            counts_by_index[r.morse_index] += 1;
        }
    }
    CriticalSet { records, bott_circles, counts_by_index, nonconverged_starts, unresolved }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EulerCheck {
    /// Morse alternating sum over isolated records; Bott circles contribute
    /// zero.
    pub alternating_sum: i64,
    pub expected: i64,
    pub pass: bool,
    /// False when degenerate solutions remain unresolved.
    pub applicable: bool,
}

/// Consistency of the critical set against the Euler characteristic of the
/// divisor complement (the skeleton is a deformation retract of it).
pub fn euler_check(set: &CriticalSet, kind: VarietyKind, class: &DivisorClass) -> EulerCheck {
    let expected = euler_complement(kind, class).unwrap_or(0);
    let applicable = set.unresolved.is_empty();
    let alternating_sum: i64 = set
        .isolated()
        .map(|r| if r.morse_index % 2 == 0 { 1 } else { -1 })
        .sum();
    EulerCheck { alternating_sum, expected, pass: applicable && alternating_sum == expected, applicable }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Section, VarietyDescriptor};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cp1_section(k: u32, coeffs: &[Complex64]) -> Section {
        Section::new(VarietyDescriptor::cp1(k), coeffs).unwrap()
    }

    /// p = z at level 1: the lone critical point of phi is the minimum at
    /// the zero's antipode (the far chart's origin), phi = 0.
    #[test]
    fn level_one_single_minimum() {
        let s = cp1_section(1, &[c(0.0, 0.0), c(1.0, 0.0)]);
        let set = find_critical_points(&s, 64, 0);
        assert_eq!(set.records.len(), 1);
        assert!(set.bott_circles.is_empty());
        assert!(set.unresolved.is_empty());
        let r = &set.records[0];
        assert_eq!(r.morse_index, 0);
        assert_eq!(r.location.chart, 1);
        assert!(r.location.coords[0].norm() < 1e-9);
        assert!(r.phi_value.abs() < 1e-12);
        let chk = euler_check(&set, VarietyKind::Cp1, &DivisorClass::Cp1Points { distinct: 1 });
        assert!(chk.pass, "{chk:?}");
    }

    /// Non-reduced p = z^2 at level 2: same picture, one minimum at the
    /// antipode; the complement retracts onto a point.
    #[test]
    fn nonreduced_square_single_minimum() {
        let s = cp1_section(2, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let set = find_critical_points(&s, 64, 0);
        assert_eq!(set.records.len(), 1);
        assert_eq!(set.records[0].morse_index, 0);
        assert_eq!(set.records[0].location.chart, 1);
        assert!(set.bott_circles.is_empty());
    }

    /// Reducible bidegree-(1,1) quadric section p = z w: one minimum at the
    /// product of antipodes, chi(C x C) = 1.
    #[test]
    fn quadric_reducible_single_minimum() {
        let desc = VarietyDescriptor::quadric(1, 1);
        // graded-lex over (Z0 Z1) x (W0 W1): coefficient of Z1 W1
        let exps = crate::geometry::monomial_exponents(&desc);
        let coeffs: Vec<Complex64> = exps
            .iter()
            .map(|e| if e == &vec![0, 1, 0, 1] { c(1.0, 0.0) } else { c(0.0, 0.0) })
            .collect();
        let s = Section::new(desc, &coeffs).unwrap();
        let set = find_critical_points(&s, 64, 0);
        assert_eq!(set.records.len(), 1);
        let r = &set.records[0];
        assert_eq!(r.morse_index, 0);
        assert_eq!(r.location.chart, 3);
        assert!(r.location.max_abs() < 1e-9);
        let chk = euler_check(&set, VarietyKind::QuadricP1xP1, &DivisorClass::QuadricTwoRulings);
        assert!(chk.pass, "{chk:?}");
    }

    /// Exact distance from a point to the great circle {[cos t : i sin t]}.
    fn circle_distance(desc: &VarietyDescriptor, p: &ChartPoint) -> f64 {
        let hom = desc.homogeneous(p);
        let (q0, q1) = (hom.factors[0][0], hom.factors[0][1]);
        // max_t |<c(t), q>|^2 for c(t) = (cos t, i sin t)
        let alpha = q0.norm_sqr();
        let beta = q1.norm_sqr();
        let gamma = -2.0 * (q0 * q1.conj()).im;
        let mean = 0.5 * (alpha + beta);
        let dev = (0.25 * (alpha - beta).powi(2) + 0.25 * gamma * gamma).sqrt();
        ((mean + dev).sqrt().min(1.0)).acos()
    }

    /// Antipodal zeros +1/-1 at level 2: the critical set is exactly the
    /// Bott circle of minima through 0 and infinity.
    #[test]
    fn antipodal_bott_circle() {
        let s = cp1_section(2, &[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let set = find_critical_points(&s, 128, 0);
        assert_eq!(set.bott_circles.len(), 1);
        assert!(set.isolated().count() == 0, "no isolated points expected");
        assert!(set.unresolved.is_empty());
        let circle = &set.bott_circles[0];
        assert_eq!(circle.morse_index, 0);
        assert_eq!(circle.samples.first().unwrap(), circle.samples.last().unwrap());
        let desc = s.descriptor;
        // Hausdorff distance against the exact circle, both directions.
        for p in &circle.samples {
            assert!(circle_distance(&desc, p) < 1e-4);
        }
        for i in 0..=1000 {
            let t = std::f64::consts::PI * f64::from(i) / 1000.0;
            let exact = if t.cos().abs() > 1e-9 {
                ChartPoint::cp1(c(0.0, t.sin() / t.cos()))
            } else {
                ChartPoint::new(1, vec![c(0.0, 0.0)])
            };
            assert!(desc.distance_to_polyline(&circle.samples, &exact) < 1e-4);
        }
        // Members lie on the circle and are flagged as such.
        assert!(set.records.iter().all(|r| r.kind == CriticalKind::BottCircleMember));
    }

    /// Cube roots of unity at level 3: Morse set with 2 minima (0 and
    /// infinity) and 3 saddles; chi = -1.
    #[test]
    fn symmetric_cubic_morse_set() {
        let s = cp1_section(3, &[c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let set = find_critical_points(&s, 256, 0);
        assert!(set.bott_circles.is_empty());
        assert!(set.unresolved.is_empty());
        assert_eq!(set.counts_by_index[0], 2);
        assert_eq!(set.counts_by_index[1], 3);
        assert_eq!(set.isolated().count(), 5);
        let chk = euler_check(&set, VarietyKind::Cp1, &DivisorClass::Cp1Points { distinct: 3 });
        assert!(chk.pass, "{chk:?}");
        // Saddles sit at the negated cube roots of unity, phi = ln(2)/2... no:
        // just check the known one at z = -1.
        let target = ChartPoint::cp1(c(-1.0, 0.0));
        assert!(set
            .isolated()
            .any(|r| r.morse_index == 1 && s.descriptor.distance(&r.location, &target) < 1e-8));
    }

    #[test]
    fn determinism_and_budget_monotonicity() {
        let s = cp1_section(3, &[c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let a = find_critical_points(&s, 96, 7);
        let b = find_critical_points(&s, 96, 7);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let big = find_critical_points(&s, 192, 7);
        for r in a.isolated() {
            assert!(big
                .isolated()
                .any(|q| s.descriptor.distance(&q.location, &r.location) < MERGE_RADIUS));
        }
    }

    /// SU(2) rotations commute with the construction: rotate the section,
    /// the critical set rotates along.
    #[test]
    fn rotational_equivariance() {
        let k = 3usize;
        let coeffs = [c(-0.8, 0.3), c(0.1, -0.2), c(0.4, 0.0), c(1.0, 0.2)];
        let s = cp1_section(3, &coeffs);
        // U in SU(2): columns (a, b), (-conj b, conj a)
        let (a, b) = (c(0.6, 0.3), c(0.5, -0.554977477020464));
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / norm, b / norm);
        // P'(Z) = P(U^{-1} Z), U^{-1} = [[conj a, conj b], [-b, a]]:
        // Z0' = conj(a) Z0 + conj(b) Z1, Z1' = -b Z0 + a Z1.
        // P = sum c_j Z0^{k-j} Z1^j -> expand binomially.
        let mut new_coeffs = vec![c(0.0, 0.0); k + 1];
        for (j, &cj) in coeffs.iter().enumerate() {
            // (conj a Z0 + conj b Z1)^{k-j} (-b Z0 + a Z1)^j
            let mut poly = vec![c(1.0, 0.0)]; // coefficients in Z1 degree
            for _ in 0..k - j {
                let mut next = vec![c(0.0, 0.0); poly.len() + 1];
                for (d, &pc) in poly.iter().enumerate() {
                    next[d] += pc * a.conj();
                    next[d + 1] += pc * b.conj();
                }
                poly = next;
            }
            for _ in 0..j {
                let mut next = vec![c(0.0, 0.0); poly.len() + 1];
                for (d, &pc) in poly.iter().enumerate() {
                    next[d] += pc * (-b);
                    next[d + 1] += pc * a;
                }
                poly = next;
            }
            for (d, &pc) in poly.iter().enumerate() {
                new_coeffs[d] += cj * pc;
            }
        }
        let s_rot = cp1_section(3, &new_coeffs);
        let set = find_critical_points(&s, 256, 0);
        let set_rot = find_critical_points(&s_rot, 256, 0);
        assert_eq!(set.isolated().count(), set_rot.isolated().count());
        for r in set.isolated() {
            // Rotate the record by U: [Z0, Z1] -> [a Z0 - conj(b) Z1, b Z0 + conj(a)...
            // U = [[a, -conj b], [b, conj a]] applied to hom coords of r.
            let hom = s.descriptor.homogeneous(&r.location);
            let (z0, z1) = (hom.factors[0][0], hom.factors[0][1]);
            let rotated = crate::geometry::Homogeneous {
                factors: vec![vec![a * z0 - b.conj() * z1, b * z0 + a.conj() * z1]],
            };
            let target = s.descriptor.from_homogeneous(&rotated);
            let best = set_rot
                .isolated()
                .map(|q| s.descriptor.distance(&q.location, &target))
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-6, "rotated critical point missing: {best}");
        }
    }

    /// Fermat cubic on CP^2: the solver must report the index-0 point at
    /// the chart origin with phi = 0, and every index must respect the
    /// plurisubharmonic bound <= 2.
    #[test]
    fn fermat_cubic_contains_origin_minimum() {
        let desc = VarietyDescriptor::cp2(3);
        let exps = crate::geometry::monomial_exponents(&desc);
        let coeffs: Vec<Complex64> = exps
            .iter()
            .map(|e| {
                if e == &vec![3, 0, 0] || e == &vec![0, 3, 0] || e == &vec![0, 0, 3] {
                    c(1.0, 0.0)
                } else {
                    c(0.0, 0.0)
                }
            })
            .collect();
        let s = Section::new(desc, &coeffs).unwrap();
        let set = find_critical_points(&s, 600, 0);
        assert!(set.unresolved.is_empty());
        assert!(set.isolated().all(|r| r.morse_index <= 2));
        let origin = ChartPoint::new(0, vec![c(0.0, 0.0), c(0.0, 0.0)]);
        let found = set
            .isolated()
            .find(|r| desc.distance(&r.location, &origin) < 1e-8)
            .expect("origin minimum");
        assert_eq!(found.morse_index, 0);
        assert!(found.phi_value.abs() < 1e-8);
        // Full Morse count: 3 minima, 9 saddles, 9 index-2 points; chi = 3.
        let chk = euler_check(&set, VarietyKind::Cp2, &DivisorClass::Cp2SmoothCurve { degree: 3 });
        assert!(chk.pass, "{chk:?} counts {:?}", set.counts_by_index);
    }
}
