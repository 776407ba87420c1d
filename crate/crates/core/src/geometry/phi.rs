use nalgebra::DMatrix;
use num_complex::Complex64;

use super::section::Section;
use super::variety::{ChartPoint, VarietyDescriptor};
use super::GeometryError;

/// Hard proximity floor: |h| below this is treated as "on the divisor".
/// phi and its gradient blow up logarithmically there.
pub const DIVISOR_EPS: f64 = 1e-12;

/// Per-factor affine-variable layout: (offset into coords, dim, level).
fn factor_layout(desc: &VarietyDescriptor) -> Vec<(usize, usize, u32)> {
    let mut out = Vec::new();
    let mut off = 0;
    for f in desc.factors() {
        out.push((off, f.dim, f.level));
        off += f.dim;
    }
    out
}

/// Fubini-Study norm of the section at a chart point:
/// `|p(u)| / prod_f (1 + |u_f|^2)^{k_f / 2}`. Chart independent.
pub fn h_norm(section: &Section, point: &ChartPoint) -> f64 {
    let poly = section.chart_poly(point.chart);
    let p = poly.eval(&point.coords);
    let mut log_den = 0.0;
    for (off, dim, level) in factor_layout(&section.descriptor) {
        let rho: f64 = point.coords[off..off + dim].iter().map(|z| z.norm_sqr()).sum();
        log_den += f64::from(level) * 0.5 * (1.0 + rho).ln();
    }
    p.norm() * (-log_den).exp()
}

/// `phi = -ln |h|` in the Fubini-Study norm.
pub fn eval_phi(section: &Section, point: &ChartPoint) -> Result<f64, GeometryError> {
    let hn = h_norm(section, point);
    if hn < DIVISOR_EPS {
        return Err(GeometryError::OnDivisor { h_norm: hn });
    }
    Ok(-hn.ln())
}

/// Euclidean chart gradient of phi as a complex vector:
/// `e_a = phi_x_a + i phi_y_a = -conj(dp_a / p) + k_f u_a / (1 + rho_f)`.
pub fn grad_phi_euclid(
    section: &Section,
    point: &ChartPoint,
) -> Result<Vec<Complex64>, GeometryError> {
    let hn = h_norm(section, point);
    if hn < DIVISOR_EPS {
        return Err(GeometryError::OnDivisor { h_norm: hn });
    }
    let poly = section.chart_poly(point.chart);
    let (p, dp) = poly.eval_grad(&point.coords);
    let mut e = vec![Complex64::new(0.0, 0.0); section.descriptor.n()];
    for (off, dim, level) in factor_layout(&section.descriptor) {
        let rho: f64 = point.coords[off..off + dim].iter().map(|z| z.norm_sqr()).sum();
        for a in off..off + dim {
            e[a] = -(dp[a] / p).conj() + f64::from(level) * point.coords[a] / (1.0 + rho);
        }
    }
    Ok(e)
}

/// Hermitian Fubini-Study metric blocks at a chart point, as a dense n x n
/// complex matrix (block diagonal over factors). `g(u, v) = Re(u^* H v)`
/// with `H_ab = (1/pi) (delta_ab (1+rho) - conj(u_a) u_b) / (1+rho)^2`.
pub fn metric_hermitian(desc: &VarietyDescriptor, point: &ChartPoint) -> Vec<Vec<Complex64>> {
    let n = desc.n();
    let zero = Complex64::new(0.0, 0.0);
    let mut h = vec![vec![zero; n]; n];
    for (off, dim, _) in factor_layout(desc) {
        let rho: f64 = point.coords[off..off + dim].iter().map(|z| z.norm_sqr()).sum();
        let d2 = (1.0 + rho) * (1.0 + rho);
        for a in off..off + dim {
            for b in off..off + dim {
                let mut v = -point.coords[a].conj() * point.coords[b];
                if a == b {
                    v += Complex64::new(1.0 + rho, 0.0);
                }
                h[a][b] = v / (std::f64::consts::PI * d2);
            }
        }
    }
    h
}

/// Real 2n x 2n metric matrix in interleaved `(x_1, y_1, ..., x_n, y_n)`
/// coordinates.
pub fn metric_real(desc: &VarietyDescriptor, point: &ChartPoint) -> DMatrix<f64> {
    let n = desc.n();
    let h = metric_hermitian(desc, point);
    let mut g = DMatrix::zeros(2 * n, 2 * n);
    for a in 0..n {
        for b in 0..n {
            g[(2 * a, 2 * b)] = h[a][b].re;
            g[(2 * a, 2 * b + 1)] = -h[a][b].im;
            g[(2 * a + 1, 2 * b)] = h[a][b].im;
            g[(2 * a + 1, 2 * b + 1)] = h[a][b].re;
        }
    }
    g
}

/// Riemannian gradient of phi with respect to the Fubini-Study metric,
/// obtained from the Euclidean gradient via the explicit inverse metric.
/// Vanishes exactly at critical points.
pub fn grad_phi(section: &Section, point: &ChartPoint) -> Result<Vec<Complex64>, GeometryError> {
    let e = grad_phi_euclid(section, point)?;
    Ok(solve_metric(&section.descriptor, point, &e))
}

/// Solve `H grad = e` block by block (blocks have dim 1 or 2).
pub(crate) fn solve_metric(
    desc: &VarietyDescriptor,
    point: &ChartPoint,
    e: &[Complex64],
) -> Vec<Complex64> {
    let h = metric_hermitian(desc, point);
    let mut out = vec![Complex64::new(0.0, 0.0); e.len()];
    for (off, dim, _) in factor_layout(desc) {
        match dim {
            1 => out[off] = e[off] / h[off][off].re,
            2 => {
                let (a, b) = (off, off + 1);
                let det = h[a][a] * h[b][b] - h[a][b] * h[b][a];
                out[a] = (h[b][b] * e[a] - h[a][b] * e[b]) / det;
                out[b] = (h[a][a] * e[b] - h[b][a] * e[a]) / det;
            }
            _ => unreachable!(),
        }
    }
    out
}

/// Metric norm of the Riemannian gradient, `sqrt(g(grad, grad))`.
pub fn riemannian_grad_norm(section: &Section, point: &ChartPoint) -> Result<f64, GeometryError> {
    let e = grad_phi_euclid(section, point)?;
    let grad = solve_metric(&section.descriptor, point, &e);
    // g(grad, grad) = Re(grad^* H grad) = Re(grad^* e)
    let v: f64 = grad.iter().zip(&e).map(|(g, e)| (g.conj() * e).re).sum();
    Ok(v.max(0.0).sqrt())
}

/// Real symmetric 2n x 2n Euclidean chart Hessian of phi (interleaved
/// coordinates). Matches second finite differences of `eval_phi`.
pub fn hessian_euclid(section: &Section, point: &ChartPoint) -> Result<DMatrix<f64>, GeometryError> {
    let hn = h_norm(section, point);
    if hn < DIVISOR_EPS {
        return Err(GeometryError::OnDivisor { h_norm: hn });
    }
    let n = section.descriptor.n();
    let poly = section.chart_poly(point.chart);
    let (p, dp, d2p) = poly.eval_hess(&point.coords);
    let zero = Complex64::new(0.0, 0.0);
    // A_ab = d^2 phi / du_a du_b, B_ab = d^2 phi / du_a d(conj u_b)
    let mut amat = vec![vec![zero; n]; n];
    let mut bmat = vec![vec![zero; n]; n];
    for a in 0..n {
        for b in 0..n {
            amat[a][b] = -0.5 * (d2p[a][b] / p - dp[a] * dp[b] / (p * p));
        }
    }
    for (off, dim, level) in factor_layout(&section.descriptor) {
        let rho: f64 = point.coords[off..off + dim].iter().map(|z| z.norm_sqr()).sum();
        let k = f64::from(level);
        let d2 = (1.0 + rho) * (1.0 + rho);
        for a in off..off + dim {
            for b in off..off + dim {
                let mut v = -point.coords[a].conj() * point.coords[b] / d2;
                if a == b {
                    v += Complex64::new(1.0 / (1.0 + rho), 0.0);
                }
                bmat[a][b] = 0.5 * k * v;
                // The metric term also contributes a holomorphic block:
                // d_a d_b ln(1+rho) = -conj(u_a) conj(u_b) / (1+rho)^2.
                amat[a][b] -= 0.5 * k * (point.coords[a] * point.coords[b]).conj() / d2;
            }
        }
    }
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for a in 0..n {
        for b in 0..n {
            let aa = amat[a][b];
            let bb = bmat[a][b];
            m[(2 * a, 2 * b)] = 2.0 * aa.re + 2.0 * bb.re;
            m[(2 * a, 2 * b + 1)] = -2.0 * aa.im + 2.0 * bb.im;
            m[(2 * a + 1, 2 * b)] = -2.0 * aa.im - 2.0 * bb.im;
            m[(2 * a + 1, 2 * b + 1)] = -2.0 * aa.re + 2.0 * bb.re;
        }
    }
    Ok(m)
}

/// Hessian of phi expressed in a metric-orthonormal frame:
/// `L^{-1} Hess L^{-T}` with `G = L L^T` the Cholesky factor of the real
/// Fubini-Study metric. At critical points this has the same signature as
/// the Euclidean Hessian and its eigenvalues are frame independent.
pub fn hessian_phi(section: &Section, point: &ChartPoint) -> Result<DMatrix<f64>, GeometryError> {
    let hess = hessian_euclid(section, point)?;
    let g = metric_real(&section.descriptor, point);
    let chol = nalgebra::Cholesky::new(g).expect("FS metric is positive definite");
    let l = chol.l();
    let y = l
        .clone()
        .solve_lower_triangular(&hess)
        .expect("triangular solve");
    let m = l
        .solve_lower_triangular(&y.transpose())
        .expect("triangular solve");
    // Symmetrize away float noise.
    Ok((&m + m.transpose()) * 0.5)
}

/// Sorted eigenvalue spectrum of a symmetric matrix plus the Morse index
/// (eigenvalues below `-tau`) and the number of near-zero eigenvalues.
pub fn spectrum_and_index(m: &DMatrix<f64>, tau: f64) -> (Vec<f64>, usize, usize) {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let index = vals.iter().filter(|&&v| v < -tau).count();
    let null = vals.iter().filter(|&&v| v.abs() <= tau).count();
    (vals, index, null)
}
