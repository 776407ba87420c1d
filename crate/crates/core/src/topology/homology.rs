use serde::{Deserialize, Serialize};

use super::snf::{smith_normal_form, IntMatrix};
use super::TopologyError;

/// Integer chain complex: `dims[k]` is the rank of `C_k` and
/// `boundaries[k]` the map `C_{k+1} -> C_k` (shape `dims[k] x dims[k+1]`).
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub dims: Vec<usize>,
    pub boundaries: Vec<IntMatrix>,
}

impl ChainComplex {
    pub fn validate(&self) -> Result<(), TopologyError> {
        if self.dims.is_empty() {
            return Ok(());
        }
        if self.boundaries.len() + 1 != self.dims.len() {
            return Err(TopologyError::NotAChainComplex);
        }
        for (k, b) in self.boundaries.iter().enumerate() {
            if b.rows != self.dims[k] || b.cols != self.dims[k + 1] {
                return Err(TopologyError::NotAChainComplex);
            }
        }
        // d o d = 0, exact integer check
        for pair in self.boundaries.windows(2) {
            let prod = pair[0].mul(&pair[1]);
            if prod.data.iter().any(|&x| x != 0) {
                return Err(TopologyError::NotAChainComplex);
            }
        }
        Ok(())
    }
}

/// Betti numbers and torsion invariant factors per degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyResult {
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<i64>>,
}

impl HomologyResult {
    pub fn free(betti: Vec<usize>) -> Self {
        let torsion = vec![Vec::new(); betti.len()];
        Self { betti, torsion }
    }

    pub fn euler(&self) -> i64 {
        self.betti
            .iter()
            .enumerate()
            .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }

    pub fn rank(&self, degree: usize) -> usize {
        self.betti.get(degree).copied().unwrap_or(0)
    }

    /// Non-triviality of `H_degree` counting both rank and torsion.
    pub fn nontrivial(&self, degree: usize) -> bool {
        self.rank(degree) > 0 || self.torsion.get(degree).is_some_and(|t| !t.is_empty())
    }
}

/// Exact integer homology via Smith normal form.
pub fn homology(complex: &ChainComplex) -> Result<HomologyResult, TopologyError> {
    complex.validate()?;
    let top = complex.dims.len();
    let mut betti = Vec::with_capacity(top);
    let mut torsion = Vec::with_capacity(top);
    for k in 0..top {
        let rank_out = if k == 0 {
            0
        } else {
            smith_normal_form(&complex.boundaries[k - 1])?.rank
        };
        let (rank_in, factors) = if k < complex.boundaries.len() {
            let snf = smith_normal_form(&complex.boundaries[k])?;
            let tor: Vec<i64> = snf
                .diag
                .iter()
                .filter(|&&d| d > 1)
                .map(|&d| i64::try_from(d).map_err(|_| TopologyError::OverflowGuard))
                .collect::<Result<_, _>>()?;
            (snf.rank, tor)
        } else {
            (0, Vec::new())
        };
        betti.push(complex.dims[k] - rank_in - rank_out);
        torsion.push(factors);
    }
    Ok(HomologyResult { betti, torsion })
}
