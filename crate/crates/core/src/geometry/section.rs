use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::variety::{ChartPoint, Level, VarietyDescriptor, VarietyKind};
use super::GeometryError;

/// Holomorphic section of `L^k`, stored as homogeneous monomial coefficients.
///
/// Coefficient order is graded-lex over the affine chart-0 exponents:
/// * CP^1, level k: `c_j` multiplies `z^j` (homogeneous `Z0^{k-j} Z1^j`),
///   j = 0..=k.
/// * CP^2, level k: pairs `(a, b)` with `a + b <= k` enumerated with `a`
///   outer, `b` inner; `c_{a,b}` multiplies `z1^a z2^b`
///   (homogeneous `Z0^{k-a-b} Z1^a Z2^b`).
/// * Quadric, bidegree (a, b): pairs `(i, j)` with `i <= a`, `j <= b`, `i`
///   outer; `c_{i,j}` multiplies `z^i w^j`.
///
/// Coefficients are defined up to a global non-zero complex scale; all
/// downstream outputs are scale-invariant (`phi` shifts by a constant).
#[derive(Clone, Debug)]
pub struct Section {
    pub descriptor: VarietyDescriptor,
    /// (coefficient, homogeneous exponents flattened over factors).
    pub terms: Vec<(Complex64, Vec<u8>)>,
    chart_polys: Vec<ChartPoly>,
}

/// Dehomogenized polynomial in one chart: coefficient plus exponents of the
/// n affine variables.
#[derive(Clone, Debug)]
pub struct ChartPoly {
    pub terms: Vec<(Complex64, [u8; 2])>,
    pub nvars: usize,
}

/// The documented JSON wire format for sections.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SectionJson {
    pub variety: VarietyKind,
    pub level: Level,
    pub coefficients: Vec<[f64; 2]>,
}

/// Enumerate homogeneous exponent tuples in the documented order.
pub fn monomial_exponents(desc: &VarietyDescriptor) -> Vec<Vec<u8>> {
    match (desc.kind, desc.level) {
        (VarietyKind::Cp1, Level::Single(k)) => {
            (0..=k).map(|j| vec![(k - j) as u8, j as u8]).collect()
        }
        (VarietyKind::Cp2, Level::Single(k)) => {
            let mut out = Vec::new();
            for a in 0..=k {
                for b in 0..=(k - a) {
                    out.push(vec![(k - a - b) as u8, a as u8, b as u8]);
                }
            }
            out
        }
        (VarietyKind::QuadricP1xP1, Level::Bidegree(a, b)) => {
            let mut out = Vec::new();
            for i in 0..=a {
                for j in 0..=b {
                    out.push(vec![(a - i) as u8, i as u8, (b - j) as u8, j as u8]);
                }
            }
            out
        }
        _ => panic!("descriptor not validated"),
    }
}

impl Section {
    pub fn new(
        descriptor: VarietyDescriptor,
        coefficients: &[Complex64],
    ) -> Result<Self, GeometryError> {
        descriptor.validate()?;
        let exps = monomial_exponents(&descriptor);
        if coefficients.len() != exps.len() {
            return Err(GeometryError::BadSection(format!(
                "expected {} coefficients for {:?} level {:?}, got {}",
                exps.len(),
                descriptor.kind,
                descriptor.level,
                coefficients.len()
            )));
        }
        if coefficients.iter().all(|c| c.norm() == 0.0) {
            return Err(GeometryError::BadSection("all coefficients are zero".into()));
        }
        let terms: Vec<(Complex64, Vec<u8>)> = coefficients
            .iter()
            .zip(exps)
            .filter(|(c, _)| c.norm() > 0.0)
            .map(|(c, e)| (*c, e))
            .collect();
        let mut s = Self { descriptor, terms, chart_polys: Vec::new() };
        s.chart_polys = (0..descriptor.num_charts() as u8).map(|c| s.build_chart_poly(c)).collect();
        Ok(s)
    }

    pub fn from_json(json: &str) -> Result<Self, GeometryError> {
        let parsed: SectionJson = serde_json::from_str(json)
            .map_err(|e| GeometryError::BadSection(format!("JSON parse error: {e}")))?;
        Self::from_section_json(&parsed)
    }

    pub fn from_section_json(sj: &SectionJson) -> Result<Self, GeometryError> {
        let descriptor = VarietyDescriptor { kind: sj.variety, level: sj.level };
        let coeffs: Vec<Complex64> =
            sj.coefficients.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        Self::new(descriptor, &coeffs)
    }

    pub fn to_section_json(&self) -> SectionJson {
        let exps = monomial_exponents(&self.descriptor);
        let mut coeffs = vec![[0.0, 0.0]; exps.len()];
        for (c, e) in &self.terms {
            let idx = exps.iter().position(|x| x == e).expect("term in monomial basis");
            coeffs[idx] = [c.re, c.im];
        }
        SectionJson {
            variety: self.descriptor.kind,
            level: self.descriptor.level,
            coefficients: coeffs,
        }
    }

    /// CP^1 only: expand the monic polynomial with the given chart-0 zeros.
    /// The number of zeros must equal the level.
    pub fn from_zeros_cp1(k: u32, zeros: &[Complex64]) -> Result<Self, GeometryError> {
        if zeros.len() != k as usize {
            return Err(GeometryError::BadSection(format!(
                "level {k} section needs {k} zeros, got {}",
                zeros.len()
            )));
        }
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for a in zeros {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * a;
            }
            coeffs = next;
        }
        Self::new(VarietyDescriptor::cp1(k), &coeffs)
    }

    fn build_chart_poly(&self, chart: u8) -> ChartPoly {
        let denoms = self.descriptor.chart_denoms(chart);
        let factors = self.descriptor.factors();
        let nvars = self.descriptor.n();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (c, e) in &self.terms {
            let mut affine = [0u8; 2];
            let mut slot = 0;
            let mut off = 0;
            for (f, &d) in factors.iter().zip(&denoms) {
                for i in 0..=f.dim {
                    if i != d {
                        affine[slot] = e[off + i];
                        slot += 1;
                    }
                }
                off += f.dim + 1;
            }
            terms.push((*c, affine));
        }
        ChartPoly { terms, nvars }
    }

    pub fn chart_poly(&self, chart: u8) -> &ChartPoly {
        &self.chart_polys[chart as usize]
    }

    /// Distinct zeros of a CP^1 section with multiplicities (chart-aware; a
    /// zero at infinity appears as the origin of chart 1).
    pub fn zeros_cp1(&self) -> Vec<(ChartPoint, usize)> {
        assert_eq!(self.descriptor.kind, VarietyKind::Cp1);
        let Level::Single(k) = self.descriptor.level else { unreachable!() };
        let exps = monomial_exponents(&self.descriptor);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); exps.len()];
        for (c, e) in &self.terms {
            coeffs[e[1] as usize] = *c;
        }
        let maxc = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut deg = coeffs.len() - 1;
        while deg > 0 && coeffs[deg].norm() < 1e-13 * maxc {
            deg -= 1;
        }
        let finite = aberth_roots(&coeffs[..=deg]);
        let mut clusters: Vec<(ChartPoint, usize)> = Vec::new();
        for r in finite {
            let p = self.descriptor.canonical(&ChartPoint::cp1(r));
            match clusters.iter_mut().find(|(q, _)| self.descriptor.distance(q, &p) < 1e-5) {
                Some((_, m)) => *m += 1,
                None => clusters.push((p, 1)),
            }
        }
        let inf_mult = k as usize - deg;
        if inf_mult > 0 {
            let inf = ChartPoint::new(1, vec![Complex64::new(0.0, 0.0)]);
            match clusters.iter_mut().find(|(q, _)| self.descriptor.distance(q, &inf) < 1e-5) {
                Some((_, m)) => *m += inf_mult,
                None => clusters.push((inf, inf_mult)),
            }
        }
        clusters
    }
}

impl ChartPoly {
    #[inline]
    pub fn eval(&self, u: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, e) in &self.terms {
            let mut t = *c;
            for a in 0..self.nvars {
                t *= cpow(u[a], e[a]);
            }
            acc += t;
        }
        acc
    }

    /// Value and holomorphic gradient.
    #[inline]
    pub fn eval_grad(&self, u: &[Complex64]) -> (Complex64, [Complex64; 2]) {
        let zero = Complex64::new(0.0, 0.0);
        let mut val = zero;
        let mut grad = [zero, zero];
        for (c, e) in &self.terms {
            let mut t = *c;
            for a in 0..self.nvars {
                t *= cpow(u[a], e[a]);
            }
            val += t;
            for a in 0..self.nvars {
                if e[a] > 0 {
                    let mut d = *c * f64::from(e[a]);
                    for b in 0..self.nvars {
                        let exp = if b == a { e[b] - 1 } else { e[b] };
                        d *= cpow(u[b], exp);
                    }
                    grad[a] += d;
                }
            }
        }
        (val, grad)
    }

    /// Value, gradient and holomorphic second derivatives `d^2 p / du_a du_b`.
    pub fn eval_hess(&self, u: &[Complex64]) -> (Complex64, [Complex64; 2], [[Complex64; 2]; 2]) {
        let (val, grad) = self.eval_grad(u);
        let zero = Complex64::new(0.0, 0.0);
        let mut hess = [[zero; 2]; 2];
        for (c, e) in &self.terms {
            for a in 0..self.nvars {
                for b in a..self.nvars {
                    let factor = if a == b {
                        f64::from(e[a]) * f64::from(e[a].saturating_sub(1))
                    } else {
                        f64::from(e[a]) * f64::from(e[b])
                    };
                    if factor == 0.0 {
                        continue;
                    }
                    let mut d = *c * factor;
                    for v in 0..self.nvars {
                        let mut exp = e[v];
                        if v == a {
                            exp -= 1;
                        }
                        if v == b {
                            exp -= 1;
                        }
                        d *= cpow(u[v], exp);
                    }
                    hess[a][b] += d;
                    if a != b {
                        hess[b][a] += d;
                    }
                }
            }
        }
        (val, grad, hess)
    }
}

#[inline]
fn cpow(z: Complex64, e: u8) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..e {
        acc *= z;
    }
    acc
}

/// Aberth-Ehrlich root finder for small dense polynomials (coefficients low
/// to high, leading coefficient non-negligible).
pub fn aberth_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let radius = 1.0
        + coeffs[..deg]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|j| {
            let ang = 2.0 * std::f64::consts::PI * (j as f64 + 0.25) / deg as f64;
            Complex64::from_polar(radius * 0.8, ang)
        })
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for _ in 0..400 {
        let mut max_step = 0.0f64;
        for j in 0..deg {
            let (p, dp) = eval(z[j]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = if dp.norm() > 0.0 { p / dp } else { Complex64::new(1e-8, 0.0) };
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..deg {
                if k != j {
                    s += 1.0 / (z[j] - z[k]);
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * s;
            let step = if denom.norm() > 1e-300 { w / denom } else { w };
            z[j] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[j].norm()));
        }
        if max_step < 1e-14 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn from_zeros_expands() {
        // (z - 1)(z + 1) = z^2 - 1
        let s = Section::from_zeros_cp1(2, &[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let p = s.chart_poly(0);
        assert!((p.eval(&[c(2.0, 0.0)]) - c(3.0, 0.0)).norm() < 1e-14);
        assert!((p.eval(&[c(0.0, 1.0)]) - c(-2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn chart_one_poly_matches_transition() {
        // p(z) = z^2 - 1 -> q(w) = w^2 p(1/w) = 1 - w^2
        let s = Section::from_zeros_cp1(2, &[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let q = s.chart_poly(1);
        assert!((q.eval(&[c(0.5, 0.0)]) - c(0.75, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn grad_and_hess_match_finite_differences() {
        let desc = VarietyDescriptor::cp2(3);
        let n = monomial_exponents(&desc).len();
        let coeffs: Vec<Complex64> =
            (0..n).map(|i| c(1.0 + 0.3 * i as f64, -0.2 * i as f64)).collect();
        let s = Section::new(desc, &coeffs).unwrap();
        let p = s.chart_poly(0);
        let u = [c(0.3, -0.1), c(-0.2, 0.4)];
        let (v0, g, h) = p.eval_hess(&u);
        let eps = 1e-6;
        for a in 0..2 {
            let mut up = u;
            up[a] += c(eps, 0.0);
            let vp = p.eval(&up);
            let fd = (vp - v0) / eps;
            assert!((fd - g[a]).norm() < 1e-5 * (1.0 + g[a].norm()));
            let (_, gp) = p.eval_grad(&up);
            for b in 0..2 {
                let fd2 = (gp[b] - p.eval_grad(&u).1[b]) / eps;
                assert!((fd2 - h[b][a]).norm() < 1e-4 * (1.0 + h[b][a].norm()));
            }
        }
    }

    #[test]
    fn zeros_with_multiplicity_and_infinity() {
        // z^2 with level 3: double zero at 0, simple zero at infinity.
        let s = Section::new(
            VarietyDescriptor::cp1(3),
            &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let zeros = s.zeros_cp1();
        assert_eq!(zeros.len(), 2);
        let mut mults: Vec<usize> = zeros.iter().map(|(_, m)| *m).collect();
        mults.sort_unstable();
        assert_eq!(mults, vec![1, 2]);
    }

    #[test]
    fn aberth_cube_roots_of_unity() {
        // z^3 - 1
        let coeffs = [c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let mut roots = aberth_roots(&coeffs);
        roots.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
        for r in &roots {
            assert!((r.norm() - 1.0).abs() < 1e-10);
            assert!((cpow(*r, 3) - c(1.0, 0.0)).norm() < 1e-9);
        }
        assert_eq!(roots.len(), 3);
    }
}
