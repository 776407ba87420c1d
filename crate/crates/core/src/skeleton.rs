//! Assembly of the shadow as a concrete graph (curves only), basin face
//! areas, the area-quantization and phase-constancy checks, and SVG export.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::critical::{BottCircle, CriticalSet};
use crate::flow::{ascend_fate, Fate, FlowControls, Separatrix};
use crate::geometry::{
    phase_increment, resample_polyline, sample_halton_cp1, total_mass, ChartPoint, Level, Section,
};
use crate::topology::{homology, ChainComplex, HomologyResult, IntMatrix, TopologyError};

/// Separatrix endpoints must land within this distance of their vertex.
pub const ENDPOINT_TOL: f64 = 1e-4;
/// Resampling pitch for connection-phase transport along edges.
const PHASE_SEG: f64 = 5e-3;
/// Allowed phase-transport deviation along an edge or cycle.
pub const PHASE_TOL: f64 = 1e-2;

#[derive(Debug, Error)]
pub enum SkeletonError {
    #[error("separatrix at saddle {saddle} did not converge on both halves")]
    IncompleteSeparatrix { saddle: usize },
    #[error("separatrix at saddle {saddle} ends at no known vertex")]
    DanglingEdge { saddle: usize },
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SkeletonVertex {
    pub cluster_id: usize,
    pub location: ChartPoint,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SkeletonEdge {
    pub saddle: usize,
    /// Vertex indices into `SkeletonGraph::vertices`; equal for loop edges.
    pub tail: usize,
    pub head: usize,
    /// Runs tail -> saddle -> head; the saddle is an interior sample.
    pub polyline: Vec<ChartPoint>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SkeletonGraph {
    pub vertices: Vec<SkeletonVertex>,
    pub edges: Vec<SkeletonEdge>,
    pub bott_cycles: Vec<BottCircle>,
}

impl SkeletonGraph {
    /// Euler characteristic; each Bott cycle contributes zero.
    pub fn euler(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64
    }

    /// The shadow proper (the union of 1-cells) is empty iff there are no
    /// edges and no cycles; isolated minima are 0-cells of the retract but
    /// carry no top homology.
    pub fn shadow_is_empty(&self) -> bool {
        self.edges.is_empty() && self.bott_cycles.is_empty()
    }

    pub fn num_components(&self) -> usize {
        // Union-find over vertices; cycles are standalone components.
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let r = find(parent, parent[i]);
                parent[i] = r;
            }
            parent[i]
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.tail), find(&mut parent, e.head));
            parent[a] = b;
        }
        let mut roots: Vec<usize> =
            (0..self.vertices.len()).map(|i| find(&mut parent, i)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len() + self.bott_cycles.len()
    }

    /// Integer chain complex: each Bott cycle becomes one vertex plus one
    /// loop edge.
    pub fn chain_complex(&self) -> ChainComplex {
        let nv = self.vertices.len() + self.bott_cycles.len();
        let ne = self.edges.len() + self.bott_cycles.len();
        let mut d1 = IntMatrix::zeros(nv, ne);
        for (j, e) in self.edges.iter().enumerate() {
            if e.tail != e.head {
                d1[(e.tail, j)] = -1;
                d1[(e.head, j)] = 1;
            }
        }
        ChainComplex { dims: vec![nv, ne], boundaries: vec![d1] }
    }

    pub fn homology(&self) -> Result<HomologyResult, TopologyError> {
        homology(&self.chain_complex())
    }
}

/// Assemble the skeleton graph: minima become vertices, complete
/// separatrices become edges, Bott circles become standalone cycles.
pub fn build_skeleton(
    desc: &crate::geometry::VarietyDescriptor,
    critical: &CriticalSet,
    separatrices: &[Separatrix],
) -> Result<SkeletonGraph, SkeletonError> {
    let minima = critical.minima();
    let vertices: Vec<SkeletonVertex> = minima
        .iter()
        .map(|&id| SkeletonVertex {
            cluster_id: id,
            location: critical.record_for_cluster(id).expect("minimum record").location.clone(),
        })
        .collect();
    let vertex_of = |cluster: usize| minima.iter().position(|&m| m == cluster);

    let mut edges = Vec::new();
    for sep in separatrices {
        if !sep.complete() {
            return Err(SkeletonError::IncompleteSeparatrix { saddle: sep.saddle });
        }
        let [a, b] = sep.endpoints();
        let (tail, head) = match (a.and_then(vertex_of), b.and_then(vertex_of)) {
            (Some(t), Some(h)) => (t, h),
            _ => return Err(SkeletonError::DanglingEdge { saddle: sep.saddle }),
        };
        for (half, v) in sep.halves.iter().zip([tail, head]) {
            let terminal = half.samples.last().expect("recorded half");
            if desc.distance(terminal, &vertices[v].location) > ENDPOINT_TOL {
                return Err(SkeletonError::DanglingEdge { saddle: sep.saddle });
            }
        }
        // tail -> saddle -> head
        let saddle_loc = critical.record_for_cluster(sep.saddle).expect("saddle record");
        let mut polyline: Vec<ChartPoint> =
            sep.halves[0].samples.iter().rev().cloned().collect();
        polyline.push(saddle_loc.location.clone());
        polyline.extend(sep.halves[1].samples.iter().cloned());
        edges.push(SkeletonEdge { saddle: sep.saddle, tail, head, polyline });
    }
    Ok(SkeletonGraph { vertices, edges, bott_cycles: critical.bott_circles.clone() })
}

/// One escape basin: the open region flowing to a single divisor zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Face {
    pub zero_label: usize,
    pub zero_location: ChartPoint,
    pub multiplicity: usize,
    pub area: f64,
    pub std_err: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FaceReport {
    pub faces: Vec<Face>,
    /// Fraction of samples with Budget fate; high values mean low
    /// confidence in the areas.
    pub budget_fraction: f64,
    /// Fraction of samples converging to the measure-zero bounded set.
    pub converged_fraction: f64,
}

/// Basin areas by low-discrepancy sampling of the Fubini-Study measure and
/// ascending-flow classification (curves only).
pub fn face_areas(
    section: &Section,
    critical: &CriticalSet,
    zeros: &[(ChartPoint, usize)],
    samples: usize,
    controls: &FlowControls,
) -> FaceReport {
    let desc = &section.descriptor;
    assert_eq!(desc.n(), 1, "basin areas are defined for curves");
    let fates: Vec<Fate> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let p = sample_halton_cp1(desc, i + 1);
            ascend_fate(section, critical, zeros, &p, controls)
        })
        .collect();
    let mut counts = vec![0usize; zeros.len()];
    let mut budget = 0usize;
    let mut converged = 0usize;
    for f in &fates {
        match f {
            Fate::EscapedToDivisor(Some(l)) => counts[*l] += 1,
            Fate::EscapedToDivisor(None) => {}
            Fate::Budget => budget += 1,
            Fate::ConvergedTo(_) => converged += 1,
        }
    }
    let mass = total_mass(desc);
    let n = samples as f64;
    let faces = zeros
        .iter()
        .enumerate()
        .map(|(l, (loc, mult))| {
            let p = counts[l] as f64 / n;
            Face {
                zero_label: l,
                zero_location: loc.clone(),
                multiplicity: *mult,
                area: mass * p,
                std_err: mass * (p * (1.0 - p) / n).sqrt(),
            }
        })
        .collect();
    FaceReport {
        faces,
        budget_fraction: budget as f64 / n,
        converged_fraction: converged as f64 / n,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FaceCheck {
    pub zero_label: usize,
    pub k_area: f64,
    pub three_sigma: f64,
    pub nearest_integer: i64,
    pub zero_count: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhaseCheck {
    /// "edge <saddle>" or "cycle <cluster>".
    pub element: String,
    pub max_deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BsReport {
    pub faces: Vec<FaceCheck>,
    pub phases: Vec<PhaseCheck>,
    pub pass: bool,
}

/// Bohr-Sommerfeld quantization (k * basin area is the zero multiplicity)
/// and phase constancy of h along every skeleton element.
pub fn bs_check(
    section: &Section,
    skeleton: &SkeletonGraph,
    face_report: &FaceReport,
) -> Result<BsReport, crate::geometry::GeometryError> {
    let k = match section.descriptor.level {
        Level::Single(k) => f64::from(k),
        Level::Bidegree(a, b) => f64::from(a + b),
    };
    let mut faces = Vec::new();
    // A skeleton without 1-cells bounds no finite faces; the single basin
    // carries the whole area and the check is vacuous.
    if !skeleton.shadow_is_empty() {
        for f in &face_report.faces {
            let k_area = k * f.area;
            let nearest = k_area.round() as i64;
            let three_sigma = 3.0 * k * f.std_err;
            let pass = (k_area - nearest as f64).abs() < three_sigma + PHASE_TOL
                && nearest == f.multiplicity as i64;
            faces.push(FaceCheck {
                zero_label: f.zero_label,
                k_area,
                three_sigma,
                nearest_integer: nearest,
                zero_count: f.multiplicity,
                pass,
            });
        }
    }
    let mut phases = Vec::new();
    for e in &skeleton.edges {
        let path = resample_polyline(section, &e.polyline, PHASE_SEG);
        let t = phase_increment(section, &path)?;
        phases.push(PhaseCheck {
            element: format!("edge {}", e.saddle),
            max_deviation: t.max_abs,
            pass: t.max_abs < PHASE_TOL,
        });
    }
    for c in &skeleton.bott_cycles {
        let path = resample_polyline(section, &c.samples, PHASE_SEG);
        let t = phase_increment(section, &path)?;
        phases.push(PhaseCheck {
            element: format!("cycle {}", c.cluster_id),
            max_deviation: t.max_abs,
            pass: t.max_abs < PHASE_TOL,
        });
    }
    let pass = faces.iter().all(|f| f.pass) && phases.iter().all(|p| p.pass);
    Ok(BsReport { faces, phases, pass })
}

/// SVG rendering of the skeleton in chart-0 coordinates, fixed viewport
/// [-2.2, 2.2]^2 at 800x800. Divisor zeros are crosses, vertices dots,
/// edges and cycles polylines; segments through the far chart are broken
/// at the viewport edge.
pub fn skeleton_svg(
    section: &Section,
    skeleton: &SkeletonGraph,
    zeros: &[(ChartPoint, usize)],
) -> String {
    const HALF: f64 = 2.2;
    const SIZE: f64 = 800.0;
    let desc = &section.descriptor;
    let to_px = |z: Complex64| -> (f64, f64) {
        (
            (z.re + HALF) / (2.0 * HALF) * SIZE,
            (HALF - z.im) / (2.0 * HALF) * SIZE,
        )
    };
    let chart0 = |p: &ChartPoint| -> Option<Complex64> {
        let q = desc.convert(p, 0).ok()?;
        let z = q.coords[0];
        (z.re.abs() <= HALF && z.im.abs() <= HALF).then_some(z)
    };
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" \
         viewBox=\"0 0 {SIZE} {SIZE}\">\n<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n"
    ));
    let draw_path = |samples: &[ChartPoint], color: &str, out: &mut String| {
        let mut run: Vec<(f64, f64)> = Vec::new();
        let flush = |run: &mut Vec<(f64, f64)>, out: &mut String| {
            if run.len() >= 2 {
                let pts: Vec<String> =
                    run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                out.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                    pts.join(" ")
                ));
            }
            run.clear();
        };
        for p in samples {
            match chart0(p) {
                Some(z) => run.push(to_px(z)),
                None => flush(&mut run, out),
            }
        }
        flush(&mut run, out);
    };
    for e in &skeleton.edges {
        draw_path(&e.polyline, "#1f77b4", &mut out);
    }
    for c in &skeleton.bott_cycles {
        draw_path(&c.samples, "#2ca02c", &mut out);
    }
    for v in &skeleton.vertices {
        if let Some(z) = chart0(&v.location) {
            let (x, y) = to_px(z);
            out.push_str(&format!(
                "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"#1f77b4\"/>\n"
            ));
        }
    }
    for (z, _) in zeros {
        if let Some(z) = chart0(z) {
            let (x, y) = to_px(z);
            out.push_str(&format!(
                "<path d=\"M {x0:.2} {y0:.2} L {x1:.2} {y1:.2} M {x0:.2} {y1:.2} L {x1:.2} {y0:.2}\" \
                 stroke=\"#d62728\" stroke-width=\"1.5\"/>\n",
                x0 = x - 5.0,
                x1 = x + 5.0,
                y0 = y - 5.0,
                y1 = y + 5.0,
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}
