use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use lagshadow_core::{DivisorClass, Level, Section, VarietyKind};

/// One batch-run input: the variety, the section (by coefficients in the
/// graded monomial basis, or by chart-0 zeros for curves), the divisor
/// class for the analytic oracle, and solver controls.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scene {
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub variety: VarietyKind,
    pub level: Level,
    /// Coefficients `[re, im]` in the graded monomial basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<[f64; 2]>>,
    /// Chart-0 zeros (curves only); expanded to a monic polynomial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeros: Option<Vec<[f64; 2]>>,
    /// Divisor class for the analytic oracle; derived from the zero set for
    /// curves when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisor_class: Option<DivisorClass>,
    #[serde(default)]
    pub controls: Controls,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct Controls {
    pub seed: u64,
    /// Newton multistart budget, split evenly over the charts; 0 selects
    /// the dimension-dependent default 512 * 3^n.
    pub starts: usize,
    /// Monte-Carlo samples for basin areas (curves only).
    pub area_samples: usize,
    /// Side length of the optional chart-0 fate grid; 0 disables it.
    pub grid: usize,
}

impl Default for Controls {
    fn default() -> Self {
        Self { seed: 0, starts: 0, area_samples: 20_000, grid: 0 }
    }
}

pub const SCHEMA_VERSION: u32 = 1;

impl Scene {
    pub fn from_json(text: &str) -> Result<Self> {
        let scene: Scene = serde_json::from_str(text).context("scene schema")?;
        if scene.schema_version != SCHEMA_VERSION {
            bail!("unsupported scene schema_version {}", scene.schema_version);
        }
        Ok(scene)
    }

    pub fn section(&self) -> Result<Section> {
        match (&self.coefficients, &self.zeros) {
            (Some(coeffs), None) => {
                let c: Vec<Complex64> =
                    coeffs.iter().map(|p| Complex64::new(p[0], p[1])).collect();
                let desc = lagshadow_core::VarietyDescriptor { kind: self.variety, level: self.level };
                Ok(Section::new(desc, &c)?)
            }
            (None, Some(zeros)) => {
                if self.variety != VarietyKind::Cp1 {
                    bail!("field `zeros` is only valid for CP1 scenes");
                }
                let Level::Single(k) = self.level else {
                    bail!("CP1 level must be a single integer");
                };
                let z: Vec<Complex64> =
                    zeros.iter().map(|p| Complex64::new(p[0], p[1])).collect();
                Ok(Section::from_zeros_cp1(k, &z)?)
            }
            (Some(_), Some(_)) => bail!("fields `coefficients` and `zeros` are exclusive"),
            (None, None) => bail!("one of `coefficients` or `zeros` is required"),
        }
    }

    /// Oracle divisor class: explicit, or derived from the distinct zero
    /// count for curves.
    pub fn divisor_class(&self, section: &Section) -> Result<DivisorClass> {
        if let Some(class) = &self.divisor_class {
            return Ok(class.clone());
        }
        if self.variety == VarietyKind::Cp1 {
            let distinct = section.zeros_cp1().len();
            return Ok(DivisorClass::Cp1Points { distinct });
        }
        bail!("field `divisor_class` is required when the variety is a surface")
    }

    /// Effective Newton multistart budget per chart.
    pub fn budget_per_chart(&self, section: &Section) -> usize {
        let desc = &section.descriptor;
        let total = if self.controls.starts > 0 {
            self.controls.starts
        } else {
            512 * 3usize.pow(desc.n() as u32)
        };
        total.div_ceil(desc.num_charts())
    }
}
