use std::time::Instant;

use anyhow::Result;

use lagshadow_core::critical::{euler_check, find_critical_points};
use lagshadow_core::flow::{classify_grid, trace_separatrices, Fate, FlowControls};
use lagshadow_core::geometry::Section;
use lagshadow_core::skeleton::{bs_check, build_skeleton, face_areas, skeleton_svg};
use lagshadow_core::topology::{oracle_complement, verdict};
use lagshadow_core::ChartPoint;

use crate::report::{RunReport, SkeletonSummary, StageError, Timings, ZeroEntry, REPORT_SCHEMA_VERSION, TOOL_VERSION};
use crate::scene::Scene;

/// Half-width of the chart-0 window for fate grids.
const GRID_HALF: f64 = 2.0;

pub struct RunOutput {
    pub report: RunReport,
    /// Present for curves (n = 1).
    pub svg: Option<String>,
    /// Present in grid mode: chart-0 points with their ascending fates.
    pub fates: Option<Vec<(ChartPoint, Fate)>>,
    /// False when the run hit a fatal stage or an inconsistent verdict.
    pub ok: bool,
}

/// Run the whole pipeline on one scene: critical set, separatrices,
/// skeleton graph, basin areas with quantization checks, homology from both
/// sources, and the shadow verdict.
pub fn run_scene(scene: &Scene) -> Result<RunOutput> {
    let t0 = Instant::now();
    let section: Section = scene.section()?;
    let class = scene.divisor_class(&section)?;
    let desc = section.descriptor;
    let n = desc.n();
    let seed = scene.controls.seed;

    let t = Instant::now();
    let critical = find_critical_points(&section, scene.budget_per_chart(&section), seed);
    let critical_ms = t.elapsed().as_secs_f64() * 1e3;
    let euler = euler_check(&critical, desc.kind, &class);
    let oracle = oracle_complement(desc.kind, &class)?;

    let mut report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        seed,
        scene: scene.clone(),
        divisor_class: class.clone(),
        zeros: None,
        critical_set: critical.clone(),
        euler_check: euler,
        skeleton: None,
        faces: None,
        bohr_sommerfeld: None,
        homology_numeric: None,
        homology_oracle: oracle.clone(),
        verdict: None,
        error: None,
        timings: Timings::default(),
    };
    report.timings.critical_ms = critical_ms;

    let mut svg = None;
    let mut fates = None;
    let mut ok = true;
    let controls = FlowControls::default();

    if n == 1 {
        let zeros = section.zeros_cp1();
        report.zeros = Some(
            zeros
                .iter()
                .enumerate()
                .map(|(label, (location, multiplicity))| ZeroEntry {
                    label,
                    location: location.clone(),
                    multiplicity: *multiplicity,
                })
                .collect(),
        );

        let t = Instant::now();
        let separatrices = trace_separatrices(&section, &critical, &zeros, &controls);
        report.timings.flow_ms = t.elapsed().as_secs_f64() * 1e3;

        match build_skeleton(&desc, &critical, &separatrices) {
            Ok(skeleton) => {
                report.skeleton = Some(SkeletonSummary::new(&skeleton));
                svg = Some(skeleton_svg(&section, &skeleton, &zeros));

                let t = Instant::now();
                let faces =
                    face_areas(&section, &critical, &zeros, scene.controls.area_samples, &controls);
                report.timings.faces_ms = t.elapsed().as_secs_f64() * 1e3;
                match bs_check(&section, &skeleton, &faces) {
                    Ok(bs) => report.bohr_sommerfeld = Some(bs),
                    Err(e) => {
                        ok = false;
                        report.error =
                            Some(StageError { stage: "bohr_sommerfeld".into(), message: e.to_string() });
                    }
                }
                report.faces = Some(faces);

                match skeleton.homology() {
                    Ok(numeric) => {
                        match verdict(n, Some(&numeric), Some(&oracle)) {
                            Ok(v) => report.verdict = Some(v),
                            Err(e) => {
                                ok = false;
                                report.error =
                                    Some(StageError { stage: "verdict".into(), message: e.to_string() });
                            }
                        }
                        report.homology_numeric = Some(numeric);
                    }
                    Err(e) => {
                        ok = false;
                        report.error =
                            Some(StageError { stage: "homology".into(), message: e.to_string() });
                    }
                }
            }
            Err(e) => {
                ok = false;
                report.error = Some(StageError { stage: "skeleton".into(), message: e.to_string() });
            }
        }

        if scene.controls.grid > 0 {
            fates = Some(classify_grid(&section, &critical, &zeros, scene.controls.grid, GRID_HALF, &controls));
        }
    } else {
        // Surfaces run in critical-points-only mode: the verdict comes from
        // the analytic oracle, cross-checked by the Euler count.
        match verdict(n, None, Some(&oracle)) {
            Ok(v) => report.verdict = Some(v),
            Err(e) => {
                ok = false;
                report.error = Some(StageError { stage: "verdict".into(), message: e.to_string() });
            }
        }
        if report.euler_check.applicable && !report.euler_check.pass {
            ok = false;
            if report.error.is_none() {
                report.error = Some(StageError {
                    stage: "euler_check".into(),
                    message: "Morse alternating sum disagrees with the complement Euler characteristic".into(),
                });
            }
        }
    }

    report.timings.total_ms = t0.elapsed().as_secs_f64() * 1e3;
    Ok(RunOutput { report, svg, fates, ok })
}
