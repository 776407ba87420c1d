//! The ten acceptance criteria, one test each, printing a single pass/fail
//! line per criterion (run with `-- --nocapture` to see them).

use std::collections::HashMap;
use std::panic::AssertUnwindSafe;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use lagshadow_cli::catalog;
use lagshadow_cli::pipeline::{run_scene, RunOutput};
use lagshadow_cli::scene::{Controls, Scene};
use lagshadow_core::geometry::{
    eval_phi, grad_phi_euclid, h_norm, monomial_exponents, sample_uniform, Section,
};
use lagshadow_core::topology::{smith_normal_form, IntMatrix};
use lagshadow_core::{ChartPoint, Level, VarietyDescriptor, VarietyKind};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ---------------------------------------------------------------------------
// Shared scene runs, computed once per process.

fn generated_triple(index: u64) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + index);
    let mut zeros: Vec<Complex64> = Vec::new();
    let desc = VarietyDescriptor::cp1(3);
    while zeros.len() < 3 {
        let z = c(rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2));
        let p = ChartPoint::cp1(z);
        let separated = zeros
            .iter()
            .all(|w| desc.distance(&ChartPoint::cp1(*w), &p) > 0.3);
        if separated {
            zeros.push(z);
        }
    }
    Scene {
        schema_version: lagshadow_cli::scene::SCHEMA_VERSION,
        name: Some(format!("cp1_k3_gen{index}")),
        variety: VarietyKind::Cp1,
        level: Level::Single(3),
        coefficients: None,
        zeros: Some(zeros.iter().map(|z| [z.re, z.im]).collect()),
        divisor_class: None,
        controls: Controls::default(),
    }
}

fn scene_by_name(name: &str) -> Scene {
    if let Some(rest) = name.strip_prefix("cp1_k3_gen") {
        return generated_triple(rest.parse().expect("generated scene index"));
    }
    catalog::find(name).unwrap_or_else(|| panic!("unknown scene {name}")).scene
}

fn run(name: &str) -> Arc<RunOutput> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<RunOutput>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(name) {
        return hit.clone();
    }
    let out = Arc::new(run_scene(&scene_by_name(name)).expect("pipeline run"));
    cache.lock().unwrap().insert(name.to_string(), out.clone());
    out
}

const CURVE_SCENES: &[&str] = &[
    "cp1_k1",
    "cp1_k2_antipodal",
    "cp1_k2_nonreduced",
    "cp1_k3_symmetric",
    "cp1_k3_gen1",
    "cp1_k3_gen2",
    "cp1_k3_gen3",
    "cp1_k3_gen4",
    "cp1_k3_gen5",
];

const SURFACE_SCENES: &[&str] =
    &["quadric_reducible", "quadric_irreducible", "cp2_line", "cp2_conic", "cp2_cubic_fermat"];

// ---------------------------------------------------------------------------
// Reporting scaffold.

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn criterion(num: usize, desc: &str, body: impl FnOnce() -> Result<(), String>) {
    let outcome = std::panic::catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| p.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    match &outcome {
        Ok(()) => println!("criterion {num:2} ({desc}): pass"),
        Err(e) => println!("criterion {num:2} ({desc}): FAIL — {e}"),
    }
    assert!(outcome.is_ok(), "criterion {num} ({desc}) failed");
}

// ---------------------------------------------------------------------------
// Criteria.

#[test]
fn criterion_01_empty_cases() {
    criterion(1, "forward direction, empty shadows", || {
        for name in ["cp1_k1", "cp1_k2_nonreduced", "quadric_reducible"] {
            let out = run(name);
            let r = &out.report;
            let n = if name.starts_with("cp1") { 1 } else { 2 };
            ensure!(r.homology_oracle.rank(n) == 0, "{name}: oracle H_n nonzero");
            ensure!(!r.homology_oracle.nontrivial(n), "{name}: oracle H_n has torsion");
            let v = r.verdict.as_ref().ok_or_else(|| format!("{name}: no verdict"))?;
            ensure!(!v.nonempty && v.components == 0, "{name}: verdict not empty");
            if n == 1 {
                let sk = r.skeleton.as_ref().ok_or_else(|| format!("{name}: no skeleton"))?;
                ensure!(sk.graph.shadow_is_empty(), "{name}: skeleton has 1-cells");
            }
            ensure!(out.ok, "{name}: run not ok");
        }
        Ok(())
    });
}

#[test]
fn criterion_02_antipodal_circle() {
    criterion(2, "reverse direction, antipodal Bott circle", || {
        let out = run("cp1_k2_antipodal");
        let r = &out.report;
        let sk = r.skeleton.as_ref().ok_or("no skeleton")?;
        ensure!(sk.graph.bott_cycles.len() == 1, "expected one Bott cycle");
        ensure!(sk.edges == 0, "unexpected edges");
        let num = r.homology_numeric.as_ref().ok_or("no numeric homology")?;
        ensure!(num.betti == vec![1, 1], "betti {:?}", num.betti);
        ensure!(r.homology_oracle.betti == vec![1, 1], "oracle betti");

        // Exact level set |h| = 1 for zeros +-1 is the circle
        // [cos t : i sin t]; Hausdorff distance both ways must be < 1e-4.
        let desc = VarietyDescriptor::cp1(2);
        let samples = &sk.graph.bott_cycles[0].samples;
        // Distance from a point to the exact circle, in closed form: the
        // squared overlap is A cos^2 + B sin^2 + 2 C sin cos.
        let to_exact = |p: &ChartPoint| -> f64 {
            let hom = desc.homogeneous(p);
            let (a0, a1) = (hom.factors[0][0], hom.factors[0][1]);
            let b = -Complex64::i() * a1;
            let (aa, bb) = (a0.norm_sqr(), b.norm_sqr());
            let cc = (a0 * b.conj()).re;
            let peak = 0.5 * (aa + bb) + (0.25 * (aa - bb).powi(2) + cc * cc).sqrt();
            peak.min(1.0).sqrt().min(1.0).acos()
        };
        let d1 = samples.iter().map(|p| to_exact(p)).fold(0.0, f64::max);
        ensure!(d1 < 1e-4, "computed-to-exact distance {d1:.2e}");
        let mut d2: f64 = 0.0;
        for i in 0..2000 {
            let t = std::f64::consts::PI * i as f64 / 2000.0;
            let q = if t.cos().abs() > 0.5 {
                ChartPoint::cp1(Complex64::i() * (t.sin() / t.cos()))
            } else {
                ChartPoint::new(1, vec![-Complex64::i() * (t.cos() / t.sin())])
            };
            d2 = d2.max(desc.distance_to_polyline(samples, &q));
        }
        ensure!(d2 < 1e-4, "exact-to-computed distance {d2:.2e}");
        Ok(())
    });
}

#[test]
fn criterion_03_level_three_graphs() {
    criterion(3, "level-3 skeleton graphs", || {
        let scenes = ["cp1_k3_symmetric", "cp1_k3_gen1", "cp1_k3_gen2", "cp1_k3_gen3", "cp1_k3_gen4", "cp1_k3_gen5"];
        for name in scenes {
            let out = run(name);
            let sk = out.report.skeleton.as_ref().ok_or_else(|| format!("{name}: no skeleton ({:?})", out.report.error))?;
            ensure!(sk.euler == -1, "{name}: chi = {}", sk.euler);
            let num = out.report.homology_numeric.as_ref().unwrap();
            ensure!(num.betti == vec![1, 2], "{name}: betti {:?}", num.betti);
            let shape = (sk.vertices, sk.edges);
            ensure!(
                shape == (2, 3) || shape == (1, 2),
                "{name}: unexpected graph shape V={} E={}",
                sk.vertices,
                sk.edges
            );
            ensure!(sk.bott_cycles == 0, "{name}: unexpected Bott cycle");
        }
        Ok(())
    });
}

#[test]
fn criterion_04_bs_quantization() {
    criterion(4, "Bohr-Sommerfeld face quantization", || {
        for name in CURVE_SCENES {
            let out = run(name);
            let r = &out.report;
            let zeros = r.zeros.as_ref().unwrap();
            if zeros.iter().any(|z| z.multiplicity > 1) {
                continue; // criterion covers reduced divisors only
            }
            let Level::Single(k) = r.scene.level else { unreachable!() };
            let faces = &r.faces.as_ref().ok_or_else(|| format!("{name}: no faces"))?.faces;
            let mut total = 0usize;
            for f in faces {
                let dev = (f64::from(k) * f.area - f.multiplicity as f64).abs();
                ensure!(
                    dev < 1e-2,
                    "{name}: face {} k*area off by {dev:.2e}",
                    f.zero_label
                );
                total += f.multiplicity;
            }
            ensure!(total == k as usize, "{name}: multiplicities sum to {total}");
        }
        // Symmetric scenes: areas at the exact symmetric value within 3 sigma.
        for (name, exact) in [("cp1_k2_antipodal", 0.5), ("cp1_k3_symmetric", 1.0 / 3.0)] {
            let out = run(name);
            for f in &out.report.faces.as_ref().unwrap().faces {
                ensure!(
                    (f.area - exact).abs() <= 3.0 * f.std_err,
                    "{name}: face {} area {} vs {exact}",
                    f.zero_label,
                    f.area
                );
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_05_phase_constancy() {
    criterion(5, "special-section phase constancy", || {
        for name in CURVE_SCENES {
            let out = run(name);
            let bs = out.report.bohr_sommerfeld.as_ref().ok_or_else(|| format!("{name}: no BS report"))?;
            for phase in &bs.phases {
                ensure!(
                    phase.pass && phase.max_deviation < 1e-2,
                    "{name}: {} deviates by {:.2e}",
                    phase.element,
                    phase.max_deviation
                );
            }
            ensure!(bs.pass, "{name}: BS report failed");
        }
        Ok(())
    });
}

#[test]
fn criterion_06_morse_index_bound() {
    criterion(6, "Morse index bound and Fermat minimum", || {
        for name in CURVE_SCENES.iter().chain(SURFACE_SCENES) {
            let out = run(name);
            let n = if name.starts_with("cp1") { 1 } else { 2 };
            for rec in &out.report.critical_set.records {
                ensure!(
                    rec.morse_index <= n,
                    "{name}: index {} exceeds n = {n}",
                    rec.morse_index
                );
            }
        }
        let out = run("cp2_cubic_fermat");
        let origin = out.report.critical_set.records.iter().find(|r| {
            r.chart_origin_distance() < 1e-6 && r.morse_index == 0
        });
        let origin = origin.ok_or("Fermat: no index-0 point at the chart origin")?;
        ensure!(origin.phi_value.abs() <= 1e-8, "Fermat: phi at origin = {}", origin.phi_value);
        Ok(())
    });
}

trait OriginDistance {
    fn chart_origin_distance(&self) -> f64;
}

impl OriginDistance for lagshadow_core::critical::CriticalRecord {
    fn chart_origin_distance(&self) -> f64 {
        self.location.coords.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[test]
fn criterion_07_numerical_hygiene() {
    criterion(7, "gradients, boundary maps, SNF", || {
        // Gradient vs central differences, 100 probes per variety.
        let descs = [
            VarietyDescriptor::cp1(3),
            VarietyDescriptor::cp2(2),
            VarietyDescriptor::quadric(1, 1),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for desc in &descs {
            let mut checked = 0;
            while checked < 100 {
                let coeffs: Vec<Complex64> = (0..monomial_exponents(desc).len())
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let s = Section::new(*desc, &coeffs).map_err(|e| e.to_string())?;
                let p = sample_uniform(desc, &mut rng);
                if h_norm(&s, &p) < 1e-3 || p.max_abs() > 1.4 {
                    continue;
                }
                let e = grad_phi_euclid(&s, &p).unwrap();
                let scale = e.iter().map(|z| z.norm()).fold(1.0, f64::max);
                let eps = 1e-6;
                for a in 0..desc.n() {
                    for dir in 0..2 {
                        let dz = if dir == 0 { c(eps, 0.0) } else { c(0.0, eps) };
                        let mut q = p.clone();
                        let mut r = p.clone();
                        q.coords[a] += dz;
                        r.coords[a] -= dz;
                        let fd = (eval_phi(&s, &q).unwrap() - eval_phi(&s, &r).unwrap())
                            / (2.0 * eps);
                        let analytic = if dir == 0 { e[a].re } else { e[a].im };
                        let rel = (fd - analytic).abs() / scale;
                        ensure!(rel < 1e-6, "{desc:?}: gradient rel err {rel:.2e}");
                    }
                }
                checked += 1;
            }
        }

        // Boundary-of-boundary vanishes exactly on every computed skeleton.
        for name in CURVE_SCENES {
            let out = run(name);
            let complex = out.report.skeleton.as_ref().unwrap().graph.chain_complex();
            complex.validate().map_err(|e| format!("{name}: {e}"))?;
        }

        // SNF divisibility chain on 50 random matrices.
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        for _ in 0..50 {
            let (rows, cols) = (rng.gen_range(1..7), rng.gen_range(1..7));
            let m = IntMatrix::from_rows(
                &(0..rows)
                    .map(|_| (0..cols).map(|_| rng.gen_range(-9i128..=9)).collect())
                    .collect::<Vec<_>>(),
            );
            let snf = smith_normal_form(&m).map_err(|e| e.to_string())?;
            for w in snf.diag.windows(2) {
                ensure!(w[1] % w[0] == 0, "divisibility chain broken: {:?}", snf.diag);
            }
            ensure!(snf.diag.iter().all(|&d| d > 0), "non-positive diagonal");
        }
        Ok(())
    });
}

#[test]
fn criterion_08_oracle_concordance() {
    criterion(8, "numeric vs analytic homology, curves", || {
        for name in CURVE_SCENES {
            let out = run(name);
            let r = &out.report;
            let num = r.homology_numeric.as_ref().ok_or_else(|| format!("{name}: no numeric homology"))?;
            ensure!(
                num.betti == r.homology_oracle.betti && num.torsion == r.homology_oracle.torsion,
                "{name}: numeric {num:?} vs oracle {:?}",
                r.homology_oracle
            );
            let v = r.verdict.as_ref().ok_or_else(|| format!("{name}: no verdict"))?;
            ensure!(v.agreement == Some(true), "{name}: sources disagree");
            ensure!(out.ok && r.error.is_none(), "{name}: run reported an error");
        }
        Ok(())
    });
}

#[test]
fn criterion_09_low_level_surface_oracle() {
    criterion(9, "line and conic complements are shadow-free", || {
        for name in ["cp2_line", "cp2_conic"] {
            let out = run(name);
            let r = &out.report;
            ensure!(r.homology_oracle.rank(2) == 0, "{name}: oracle rank H_2 nonzero");
            let v = r.verdict.as_ref().ok_or_else(|| format!("{name}: no verdict"))?;
            ensure!(!v.nonempty, "{name}: verdict nonempty");
            ensure!(out.ok, "{name}: run not ok");
        }
        Ok(())
    });
}

#[test]
fn criterion_10_reproducibility() {
    criterion(10, "fixed-seed byte reproducibility", || {
        let scene = scene_by_name("cp1_k3_gen1");
        let strip = |out: &RunOutput| -> String {
            let mut v = serde_json::to_value(&out.report).unwrap();
            v.as_object_mut().unwrap().remove("timings");
            serde_json::to_string(&v).unwrap()
        };
        let a = strip(&run_scene(&scene).map_err(|e| e.to_string())?);
        let b = strip(&run_scene(&scene).map_err(|e| e.to_string())?);
        ensure!(a == b, "reports differ outside timings");
        Ok(())
    });
}
