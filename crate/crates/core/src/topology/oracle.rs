use serde::{Deserialize, Serialize};

use super::homology::HomologyResult;
use super::TopologyError;
use crate::geometry::VarietyKind;

/// Catalog description of a divisor, as far as the analytic complement
/// homology depends on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DivisorClass {
    /// CP^1: m distinct zeros (multiplicities do not change the complement).
    Cp1Points { distinct: usize },
    /// CP^2: smooth curve of the given degree.
    Cp2SmoothCurve { degree: u32 },
    /// Quadric: irreducible hyperplane section (smooth (1,1) curve).
    QuadricSmoothSection,
    /// Quadric: reducible hyperplane section, a line from each ruling; the
    /// complement is contractible (homotopic to C x C).
    QuadricTwoRulings,
}

impl std::fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Cp1Points { distinct } => write!(f, "{distinct} distinct points"),
            Self::Cp2SmoothCurve { degree } => write!(f, "smooth degree-{degree} curve"),
            Self::QuadricSmoothSection => write!(f, "irreducible plane section"),
            Self::QuadricTwoRulings => write!(f, "two rulings"),
        }
    }
}

/// Exact homology of the complement `X \ D` up to degree n.
///
/// CP^1 minus m points is a wedge of m-1 circles. For CP^2 minus a smooth
/// degree-d curve, H_1 = Z/d and the rank of H_2 is (d-1)(d-2) (the Euler
/// count with b_0 = 1, b_1 rank 0, homotopy dimension <= 2 for the affine
/// complement). The quadric cases follow the same Euler count.
pub fn oracle_complement(
    kind: VarietyKind,
    class: &DivisorClass,
) -> Result<HomologyResult, TopologyError> {
    match (kind, class) {
        (VarietyKind::Cp1, DivisorClass::Cp1Points { distinct }) => {
            if *distinct == 0 {
                return Err(TopologyError::OutOfCatalog("empty divisor".into()));
            }
            Ok(HomologyResult::free(vec![1, distinct - 1]))
        }
        (VarietyKind::Cp2, DivisorClass::Cp2SmoothCurve { degree }) => {
            let d = *degree as usize;
            if d == 0 {
                return Err(TopologyError::OutOfCatalog("degree zero".into()));
            }
            let b2 = (d as i64 - 1) * (d as i64 - 2);
            let mut h = HomologyResult::free(vec![1, 0, b2 as usize]);
            if d > 1 {
                h.torsion[1] = vec![d as i64];
            }
            Ok(h)
        }
        (VarietyKind::QuadricP1xP1, DivisorClass::QuadricSmoothSection) => {
            Ok(HomologyResult::free(vec![1, 0, 1]))
        }
        (VarietyKind::QuadricP1xP1, DivisorClass::QuadricTwoRulings) => {
            Ok(HomologyResult::free(vec![1, 0, 0]))
        }
        _ => Err(TopologyError::OutOfCatalog(format!("{class} on {kind:?}"))),
    }
}

/// Euler characteristic of the complement `X \ D` for a catalog divisor.
pub fn euler_complement(kind: VarietyKind, class: &DivisorClass) -> Result<i64, TopologyError> {
    match (kind, class) {
        (VarietyKind::Cp1, DivisorClass::Cp1Points { distinct }) => Ok(2 - *distinct as i64),
        (VarietyKind::Cp2, DivisorClass::Cp2SmoothCurve { degree }) => {
            let d = *degree as i64;
            Ok(1 + (d - 1) * (d - 2))
        }
        (VarietyKind::QuadricP1xP1, DivisorClass::QuadricSmoothSection) => Ok(2),
        (VarietyKind::QuadricP1xP1, DivisorClass::QuadricTwoRulings) => Ok(1),
        _ => Err(TopologyError::OutOfCatalog(format!("{class} on {kind:?}"))),
    }
}
