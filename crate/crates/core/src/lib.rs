//! Complex and real polynomial Hurwitz numbers at desk scale.
//!
//! Complex counts come from factorizations of a full cycle in the symmetric
//! group. Real normalized polynomials with prescribed real branch data are
//! found by a multistart Newton solver whose output is certified complete
//! against that count, and their signs give the s-number. Real isomorphism
//! classes of coverings, weighted by automorphisms, give the real Hurwitz
//! number, which is checked against the s-number.

pub mod config;
pub mod coverings;
pub mod error;
pub mod factorizations;
pub mod partitions;
pub mod poly;
pub mod polysolve;
pub mod real_signs;
pub mod series;
pub mod verify;

use num_rational::Ratio;
use serde::Serializer;

pub use config::{OutputFormat, RunConfig, Tolerances};
pub use coverings::{real_hurwitz, theorem_check, CoveringClass, RealHurwitz, TheoremReport};
pub use error::{Error, Result};
pub use factorizations::{count_factorizations, HurwitzCount, Perm};
pub use partitions::{BranchSpec, Parity, Partition};
pub use polysolve::{classify_real, solve_all, Solution, SolutionSet};
pub use real_signs::{s_number, RealPolynomial, SNumber};
pub use series::{basis_fit, h_value, series_table, BasisFit, SeriesTable};
pub use verify::{verify, VerifyReport};

/// Format an exact rational as `p/q`, or `p` when integral.
pub fn format_ratio(r: &Ratio<i64>) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn serialize_ratio<S: Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_ratio(r))
}

pub(crate) fn serialize_opt_ratio<S: Serializer>(
    r: &Option<Ratio<i64>>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => serialize_ratio(r, s),
        None => s.serialize_none(),
    }
}
