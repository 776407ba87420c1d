use serde::{Deserialize, Serialize};

use super::homology::HomologyResult;
use super::TopologyError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictSource {
    NumericSkeleton,
    AnalyticOracle,
    Both,
}

/// Outcome of the shadow dichotomy: non-empty iff `H_n(X \ D, Z)` is
/// non-trivial, with rank counting components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowVerdict {
    pub nonempty: bool,
    pub components: usize,
    pub source: VerdictSource,
    pub agreement: Option<bool>,
}

/// Combine the available homology sources into a verdict. When both the
/// numeric skeleton homology and the analytic oracle are present they must
/// agree in degree n (and, for a non-empty skeleton, in every degree);
/// disagreement is surfaced as `Inconsistent`.
pub fn verdict(
    n: usize,
    numeric: Option<&HomologyResult>,
    oracle: Option<&HomologyResult>,
) -> Result<ShadowVerdict, TopologyError> {
    let (primary, source) = match (numeric, oracle) {
        (Some(num), Some(orc)) => {
            let top_agree = num.rank(n) == orc.rank(n) && num.nontrivial(n) == orc.nontrivial(n);
            // An empty skeleton has no cells at all, so only degree n is
            // comparable; a non-empty one must reproduce the complement's
            // homology in every degree.
            let skeleton_nonempty = num.betti.iter().any(|&b| b > 0);
            let full_agree = !skeleton_nonempty || num.betti == orc.betti;
            if !(top_agree && full_agree) {
                return Err(TopologyError::Inconsistent(format!(
                    "numeric betti {:?} vs oracle betti {:?}",
                    num.betti, orc.betti
                )));
            }
            (orc, VerdictSource::Both)
        }
        (Some(num), None) => (num, VerdictSource::NumericSkeleton),
        (None, Some(orc)) => (orc, VerdictSource::AnalyticOracle),
        (None, None) => return Err(TopologyError::NoSource),
    };
    let agreement = match source {
        VerdictSource::Both => Some(true),
        _ => None,
    };
    Ok(ShadowVerdict {
        nonempty: primary.nontrivial(n),
        components: primary.rank(n),
        source,
        agreement,
    })
}
