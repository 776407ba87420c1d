use lagshadow_core::{DivisorClass, Level, VarietyKind};

use crate::scene::{Controls, Scene, SCHEMA_VERSION};

/// A bundled golden scene with its expected outcome, for `catalog` and the
/// golden tests.
pub struct CatalogEntry {
    pub name: &'static str,
    pub expectation: &'static str,
    pub scene: Scene,
}

fn scene(
    name: &str,
    variety: VarietyKind,
    level: Level,
    coefficients: Option<Vec<[f64; 2]>>,
    zeros: Option<Vec<[f64; 2]>>,
    divisor_class: Option<DivisorClass>,
) -> Scene {
    Scene {
        schema_version: SCHEMA_VERSION,
        name: Some(name.to_string()),
        variety,
        level,
        coefficients,
        zeros,
        divisor_class,
        controls: Controls::default(),
    }
}

pub fn catalog() -> Vec<CatalogEntry> {
    let c3 = 3f64.sqrt() / 2.0;
    vec![
        CatalogEntry {
            name: "cp1_k1",
            expectation: "verdict empty: one point removed from the sphere leaves a disc",
            scene: scene("cp1_k1", VarietyKind::Cp1, Level::Single(1), None, Some(vec![[0.0, 0.0]]), None),
        },
        CatalogEntry {
            name: "cp1_k2_antipodal",
            expectation: "verdict nonempty, components 1: a single equatorial circle of minima; areas 1/2 each, BS pass",
            scene: scene(
                "cp1_k2_antipodal",
                VarietyKind::Cp1,
                Level::Single(2),
                None,
                Some(vec![[1.0, 0.0], [-1.0, 0.0]]),
                None,
            ),
        },
        CatalogEntry {
            name: "cp1_k2_nonreduced",
            expectation: "verdict empty: the doubled zero removes a single point",
            scene: scene(
                "cp1_k2_nonreduced",
                VarietyKind::Cp1,
                Level::Single(2),
                None,
                Some(vec![[0.0, 0.0], [0.0, 0.0]]),
                None,
            ),
        },
        CatalogEntry {
            name: "cp1_k3_symmetric",
            expectation: "theta graph: V=2, E=3, chi=-1, b1=2; areas 1/3 each",
            scene: scene(
                "cp1_k3_symmetric",
                VarietyKind::Cp1,
                Level::Single(3),
                None,
                Some(vec![[1.0, 0.0], [-0.5, c3], [-0.5, -c3]]),
                None,
            ),
        },
        CatalogEntry {
            name: "cp1_k3_generic",
            expectation: "chi=-1, b1=2; shape theta (V=2,E=3) or bouquet (V=1,E=2)",
            scene: scene(
                "cp1_k3_generic",
                VarietyKind::Cp1,
                Level::Single(3),
                None,
                Some(vec![[0.9, 0.1], [-0.6, 0.7], [0.2, -1.1]]),
                None,
            ),
        },
        CatalogEntry {
            name: "quadric_reducible",
            expectation: "verdict empty: complement of the two rulings is a product of planes",
            scene: scene(
                "quadric_reducible",
                VarietyKind::QuadricP1xP1,
                Level::Bidegree(1, 1),
                Some(vec![[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]),
                None,
                Some(DivisorClass::QuadricTwoRulings),
            ),
        },
        CatalogEntry {
            name: "quadric_irreducible",
            expectation: "verdict nonempty, components 1: rank H_2 = 1; the minima form a degenerate 2-sphere (reported as diagnostics)",
            scene: scene(
                "quadric_irreducible",
                VarietyKind::QuadricP1xP1,
                Level::Bidegree(1, 1),
                Some(vec![[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]),
                None,
                Some(DivisorClass::QuadricSmoothSection),
            ),
        },
        CatalogEntry {
            name: "cp2_line",
            expectation: "verdict empty: the line complement is a plane, H_2 = 0",
            scene: scene(
                "cp2_line",
                VarietyKind::Cp2,
                Level::Single(1),
                Some(vec![[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]),
                None,
                Some(DivisorClass::Cp2SmoothCurve { degree: 1 }),
            ),
        },
        CatalogEntry {
            name: "cp2_conic",
            expectation: "verdict empty: smooth conic complement has H_2 = 0 (torsion Z/2 in H_1)",
            scene: scene(
                "cp2_conic",
                VarietyKind::Cp2,
                Level::Single(2),
                Some(vec![
                    [1.0, 0.0], // x0^2
                    [0.0, 0.0],
                    [1.0, 0.0], // x2^2
                    [0.0, 0.0],
                    [0.0, 0.0],
                    [1.0, 0.0], // x1^2
                ]),
                None,
                Some(DivisorClass::Cp2SmoothCurve { degree: 2 }),
            ),
        },
        CatalogEntry {
            name: "cp2_cubic_fermat",
            expectation: "oracle rank H_2 = 2, numeric mode = critical-points-only; 21 critical points, Morse sum 3",
            scene: scene(
                "cp2_cubic_fermat",
                VarietyKind::Cp2,
                Level::Single(3),
                Some(vec![
                    [1.0, 0.0], // x0^3
                    [0.0, 0.0],
                    [0.0, 0.0],
                    [1.0, 0.0], // x2^3
                    [0.0, 0.0],
                    [0.0, 0.0],
                    [0.0, 0.0],
                    [0.0, 0.0],
                    [0.0, 0.0],
                    [1.0, 0.0], // x1^3
                ]),
                None,
                Some(DivisorClass::Cp2SmoothCurve { degree: 3 }),
            ),
        },
    ]
}

pub fn find(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name)
}
