//! Integer homology of computed skeletons, the analytic homology oracle for
//! catalog divisor complements, and the shadow verdict.

mod homology;
mod oracle;
mod snf;
mod verdict;

pub use homology::{homology, ChainComplex, HomologyResult};
pub use oracle::{euler_complement, oracle_complement, DivisorClass};
pub use snf::{smith_normal_form, IntMatrix, Snf};
pub use verdict::{verdict, ShadowVerdict, VerdictSource};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("integer overflow in Smith normal form beyond arbitrary-precision range")]
    OverflowGuard,
    #[error("boundary maps do not compose to zero")]
    NotAChainComplex,
    #[error("divisor class {0} is not in the catalog for this variety")]
    OutOfCatalog(String),
    #[error("numeric skeleton homology disagrees with the analytic oracle: {0}")]
    Inconsistent(String),
    #[error("no homology source available")]
    NoSource,
}
