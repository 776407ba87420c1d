use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::GeometryError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarietyKind {
    #[serde(rename = "CP1")]
    Cp1,
    #[serde(rename = "CP2")]
    Cp2,
    #[serde(rename = "QuadricP1xP1")]
    QuadricP1xP1,
}

/// Line bundle level: a single degree for projective space, a bidegree for
/// the quadric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Level {
    Single(u32),
    Bidegree(u32, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarietyDescriptor {
    pub kind: VarietyKind,
    pub level: Level,
}

/// One projective factor of the variety: `dim` is the projective dimension,
/// `level` the bundle degree along that factor.
#[derive(Clone, Copy, Debug)]
pub struct Factor {
    pub dim: usize,
    pub level: u32,
}

impl VarietyDescriptor {
    pub fn cp1(k: u32) -> Self {
        Self { kind: VarietyKind::Cp1, level: Level::Single(k) }
    }

    pub fn cp2(k: u32) -> Self {
        Self { kind: VarietyKind::Cp2, level: Level::Single(k) }
    }

    pub fn quadric(a: u32, b: u32) -> Self {
        Self { kind: VarietyKind::QuadricP1xP1, level: Level::Bidegree(a, b) }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        match (self.kind, self.level) {
            (VarietyKind::Cp1 | VarietyKind::Cp2, Level::Single(k)) if k >= 1 => Ok(()),
            (VarietyKind::QuadricP1xP1, Level::Bidegree(a, b)) if a + b >= 1 => Ok(()),
            _ => Err(GeometryError::BadDescriptor(format!(
                "level {:?} is not valid for {:?}",
                self.level, self.kind
            ))),
        }
    }

    /// Complex dimension.
    pub fn n(&self) -> usize {
        match self.kind {
            VarietyKind::Cp1 => 1,
            VarietyKind::Cp2 | VarietyKind::QuadricP1xP1 => 2,
        }
    }

    pub fn factors(&self) -> Vec<Factor> {
        match (self.kind, self.level) {
            (VarietyKind::Cp1, Level::Single(k)) => vec![Factor { dim: 1, level: k }],
            (VarietyKind::Cp2, Level::Single(k)) => vec![Factor { dim: 2, level: k }],
            (VarietyKind::QuadricP1xP1, Level::Bidegree(a, b)) => {
                vec![Factor { dim: 1, level: a }, Factor { dim: 1, level: b }]
            }
            _ => panic!("descriptor not validated"),
        }
    }

    /// Total number of homogeneous variables over all factors.
    pub fn num_hom_vars(&self) -> usize {
        self.factors().iter().map(|f| f.dim + 1).sum()
    }

    pub fn num_charts(&self) -> usize {
        self.factors().iter().map(|f| f.dim + 1).product()
    }

    /// Per-factor homogeneous index that is scaled to 1 in the given chart.
    pub fn chart_denoms(&self, chart: u8) -> Vec<usize> {
        let factors = self.factors();
        let mut denoms = vec![0usize; factors.len()];
        let mut c = chart as usize;
        for (i, f) in factors.iter().enumerate().rev() {
            denoms[i] = c % (f.dim + 1);
            c /= f.dim + 1;
        }
        denoms
    }

    fn chart_from_denoms(&self, denoms: &[usize]) -> u8 {
        let mut c = 0usize;
        for (f, &d) in self.factors().iter().zip(denoms) {
            c = c * (f.dim + 1) + d;
        }
        c as u8
    }

    /// Unit-normalized homogeneous coordinates of a chart point.
    pub fn homogeneous(&self, p: &ChartPoint) -> Homogeneous {
        let factors = self.factors();
        let denoms = self.chart_denoms(p.chart);
        let mut out = Vec::with_capacity(factors.len());
        let mut offset = 0;
        for (f, &d) in factors.iter().zip(&denoms) {
            let mut coords = vec![Complex64::new(0.0, 0.0); f.dim + 1];
            coords[d] = Complex64::new(1.0, 0.0);
            let mut slot = 0;
            for i in 0..=f.dim {
                if i != d {
                    coords[i] = p.coords[offset + slot];
                    slot += 1;
                }
            }
            let norm = coords.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in &mut coords {
                *z /= norm;
            }
            out.push(coords);
            offset += f.dim;
        }
        Homogeneous { factors: out }
    }

    /// Chart policy: re-express in the chart where each factor's largest
    /// modulus homogeneous coordinate is the denominator. Keeps all affine
    /// coordinates bounded by 1 in modulus.
    pub fn canonical(&self, p: &ChartPoint) -> ChartPoint {
        let hom = self.homogeneous(p);
        self.from_homogeneous(&hom)
    }

    pub fn from_homogeneous(&self, hom: &Homogeneous) -> ChartPoint {
        let denoms: Vec<usize> = hom
            .factors
            .iter()
            .map(|coords| {
                let mut best = 0;
                for (i, z) in coords.iter().enumerate() {
                    if z.norm_sqr() > coords[best].norm_sqr() + 0.0 {
                        best = i;
                    }
                }
                best
            })
            .collect();
        self.chart_point_from_hom(hom, &denoms)
            .expect("argmax denominator is non-zero")
    }

    fn chart_point_from_hom(
        &self,
        hom: &Homogeneous,
        denoms: &[usize],
    ) -> Result<ChartPoint, GeometryError> {
        let chart = self.chart_from_denoms(denoms);
        let mut coords = Vec::with_capacity(self.n());
        for (coordsf, &d) in hom.factors.iter().zip(denoms) {
            let denom = coordsf[d];
            if denom.norm() < 1e-12 {
                return Err(GeometryError::ChartUndefined { chart });
            }
            for (i, z) in coordsf.iter().enumerate() {
                if i != d {
                    coords.push(z / denom);
                }
            }
        }
        Ok(ChartPoint { chart, coords })
    }

    /// Re-express `p` in the given chart; errors if the point lies outside
    /// the chart's domain.
    pub fn convert(&self, p: &ChartPoint, chart: u8) -> Result<ChartPoint, GeometryError> {
        if p.chart == chart {
            return Ok(p.clone());
        }
        let hom = self.homogeneous(p);
        let denoms = self.chart_denoms(chart);
        self.chart_point_from_hom(&hom, &denoms)
    }

    /// Distance from `q` to a sampled polyline, resolving each segment in
    /// its own chart (point-to-segment, so the result is not limited by the
    /// sample spacing).
    pub fn distance_to_polyline(&self, path: &[ChartPoint], q: &ChartPoint) -> f64 {
        let mut best = f64::INFINITY;
        if path.len() == 1 {
            return self.distance(&path[0], q);
        }
        for pair in path.windows(2) {
            let a = &pair[0];
            let (a, b, qq) = match (self.convert(&pair[1], a.chart), self.convert(q, a.chart)) {
                (Ok(b), Ok(qq)) => (a.clone(), b, qq),
                _ => {
                    best = best.min(self.distance(&pair[0], q)).min(self.distance(&pair[1], q));
                    continue;
                }
            };
            // Project in chart coordinates, then measure exactly.
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..a.coords.len() {
                let d = b.coords[i] - a.coords[i];
                num += (d.conj() * (qq.coords[i] - a.coords[i])).re;
                den += d.norm_sqr();
            }
            let t = if den > 0.0 { (num / den).clamp(0.0, 1.0) } else { 0.0 };
            let proj: Vec<Complex64> = a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(x, y)| x * (1.0 - t) + y * t)
                .collect();
            best = best.min(self.distance(&ChartPoint::new(a.chart, proj), q));
        }
        best
    }

    /// Chart-aware distance: the root sum of squares of per-factor
    /// Fubini-Study angles `arccos |<u, v>|`.
    pub fn distance(&self, a: &ChartPoint, b: &ChartPoint) -> f64 {
        let ha = self.homogeneous(a);
        let hb = self.homogeneous(b);
        let mut sum = 0.0;
        for (fa, fb) in ha.factors.iter().zip(&hb.factors) {
            let inner: Complex64 = fa.iter().zip(fb).map(|(x, y)| x.conj() * y).sum();
            let c = inner.norm().min(1.0);
            // acos is ill-conditioned near 1; for nearby points use the
            // orthogonal rejection, whose norm is sin of the angle.
            let ang = if c > 0.7 {
                let sin2: f64 = fb
                    .iter()
                    .zip(fa)
                    .map(|(y, x)| (y - x * inner).norm_sqr())
                    .sum();
                sin2.sqrt().min(1.0).asin()
            } else {
                c.acos()
            };
            sum += ang * ang;
        }
        sum.sqrt()
    }
}

/// A point in one of the standard affine charts; `coords` holds the n affine
/// complex coordinates, concatenated over factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub chart: u8,
    pub coords: Vec<Complex64>,
}

impl ChartPoint {
    pub fn new(chart: u8, coords: Vec<Complex64>) -> Self {
        Self { chart, coords }
    }

    pub fn cp1(z: Complex64) -> Self {
        Self { chart: 0, coords: vec![z] }
    }

    /// Largest affine coordinate modulus; drives chart switching.
    pub fn max_abs(&self) -> f64 {
        self.coords.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Unit-normalized homogeneous coordinates, one vector per factor.
#[derive(Clone, Debug)]
pub struct Homogeneous {
    pub factors: Vec<Vec<Complex64>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn chart_roundtrip_cp1() {
        let v = VarietyDescriptor::cp1(2);
        let p = ChartPoint::cp1(c(2.0, 1.0));
        let q = v.convert(&p, 1).unwrap();
        // w = 1/z
        let w = c(1.0, 0.0) / c(2.0, 1.0);
        assert!((q.coords[0] - w).norm() < 1e-14);
        let back = v.convert(&q, 0).unwrap();
        assert!((back.coords[0] - p.coords[0]).norm() < 1e-14);
    }

    #[test]
    fn canonical_picks_bounded_chart() {
        let v = VarietyDescriptor::cp1(2);
        let p = ChartPoint::cp1(c(3.0, 0.0));
        let q = v.canonical(&p);
        assert_eq!(q.chart, 1);
        assert!(q.max_abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn quadric_charts() {
        let v = VarietyDescriptor::quadric(1, 1);
        assert_eq!(v.num_charts(), 4);
        let p = ChartPoint::new(0, vec![c(0.5, 0.0), c(3.0, 0.0)]);
        let q = v.canonical(&p);
        assert_eq!(q.chart, 1); // second factor flips
        assert!((q.coords[0] - c(0.5, 0.0)).norm() < 1e-14);
        assert!((q.coords[1] - c(1.0 / 3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn distance_symmetric_and_chart_free() {
        let v = VarietyDescriptor::cp1(1);
        let a = ChartPoint::cp1(c(0.3, -0.2));
        let b = ChartPoint::cp1(c(1.4, 0.9));
        let b1 = v.convert(&b, 1).unwrap();
        assert!((v.distance(&a, &b) - v.distance(&b, &a)).abs() < 1e-14);
        assert!((v.distance(&a, &b) - v.distance(&a, &b1)).abs() < 1e-12);
        assert!(v.distance(&a, &a) < 1e-12);
    }

    #[test]
    fn antipodal_distance_is_half_pi() {
        let v = VarietyDescriptor::cp1(1);
        let zero = ChartPoint::cp1(c(0.0, 0.0));
        let inf = ChartPoint::new(1, vec![c(0.0, 0.0)]);
        assert!((v.distance(&zero, &inf) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
