//! Disorders, ordered pairs, signs and s-numbers of real normalized
//! polynomials.
//!
//! All counts come from the solver's root assignments, so ramification
//! orders are exact. A pair of real preimages `x₁ < x₂` of the same branch
//! value is a disorder when the order at `x₁` is strictly larger, and an
//! ordered pair when the order at `x₂` is strictly larger; ties count as
//! neither.

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::partitions::{BranchSpec, Partition};
use crate::polysolve::{classify_real, solve_all, SolutionSet};

/// Preimage data of one branch value before sorting.
#[derive(Clone, Debug)]
pub struct RawBranch {
    pub value: f64,
    pub profile: Partition,
    /// Real preimages with their orders, in any order.
    pub real: Vec<(f64, usize)>,
    /// Orders of the non-real preimages.
    pub nonreal_orders: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealPreimage {
    pub x: f64,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchPreimages {
    pub value: f64,
    pub profile: Partition,
    /// Sorted by increasing `x`.
    pub real: Vec<RealPreimage>,
    pub nonreal_orders: Vec<usize>,
    pub disorders: usize,
    pub ordered_pairs: usize,
}

impl BranchPreimages {
    pub fn orders(&self) -> Vec<usize> {
        self.real.iter().map(|p| p.order).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealPolynomial {
    pub degree: usize,
    /// `a_2, …, a_d`.
    pub coefficients: Vec<f64>,
    pub branches: Vec<BranchPreimages>,
    pub disorders: usize,
    pub ordered_pairs: usize,
    pub sign: i8,
}

/// Sort real preimages and reject pairs closer than the cluster tolerance.
pub fn real_preimage_sequence(
    value: f64,
    mut real: Vec<(f64, usize)>,
    cluster: f64,
) -> Result<Vec<RealPreimage>> {
    real.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale = 1.0 + real.iter().fold(0.0f64, |m, r| m.max(r.0.abs()));
    for w in real.windows(2) {
        if w[1].0 - w[0].0 <= cluster * scale {
            return Err(Error::ClusterAmbiguity { value, x1: w[0].0, x2: w[1].0 });
        }
    }
    Ok(real.into_iter().map(|(x, order)| RealPreimage { x, order }).collect())
}

/// Pairs `i < j` with `orders[i] > orders[j]`.
pub fn disorders_in(orders: &[usize]) -> usize {
    orders
        .iter()
        .enumerate()
        .map(|(i, a)| orders[i + 1..].iter().filter(|b| a > b).count())
        .sum()
}

/// Pairs `i < j` with `orders[i] < orders[j]`.
pub fn ordered_pairs_in(orders: &[usize]) -> usize {
    orders
        .iter()
        .enumerate()
        .map(|(i, a)| orders[i + 1..].iter().filter(|b| a < b).count())
        .sum()
}

impl RealPolynomial {
    pub fn new(
        degree: usize,
        coefficients: Vec<f64>,
        branches: Vec<RawBranch>,
        cluster: f64,
    ) -> Result<Self> {
        let branches = branches
            .into_iter()
            .map(|raw| {
                let real = real_preimage_sequence(raw.value, raw.real, cluster)?;
                let total: usize = real.iter().map(|p| p.order).sum::<usize>()
                    + raw.nonreal_orders.iter().sum::<usize>();
                if total != degree {
                    return Err(Error::DegenerateConfiguration(format!(
                        "preimage orders over w={} sum to {total}, expected {degree}",
                        raw.value
                    )));
                }
                let orders: Vec<usize> = real.iter().map(|p| p.order).collect();
                Ok(BranchPreimages {
                    value: raw.value,
                    profile: raw.profile,
                    disorders: disorders_in(&orders),
                    ordered_pairs: ordered_pairs_in(&orders),
                    real,
                    nonreal_orders: raw.nonreal_orders,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let disorders = branches.iter().map(|b| b.disorders).sum();
        let ordered_pairs = branches.iter().map(|b| b.ordered_pairs).sum();
        Ok(Self {
            degree,
            coefficients,
            branches,
            disorders,
            ordered_pairs,
            sign: if disorders % 2 == 0 { 1 } else { -1 },
        })
    }

    pub fn disorder_count(&self) -> usize {
        self.disorders
    }

    pub fn ordered_pair_count(&self) -> usize {
        self.ordered_pairs
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Coefficients of `P(-z)`, which is normalized when the degree is even.
    pub fn reflected_coefficients(&self) -> Vec<f64> {
        let d = self.degree;
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, &a)| if (d - 2 - i) % 2 == 1 { -a } else { a })
            .collect()
    }

    /// Whether every odd-degree coefficient vanishes (to `tol`, relative).
    pub fn is_even_polynomial(&self, tol: f64) -> bool {
        let scale = 1.0 + self.coefficients.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let d = self.degree;
        self.coefficients
            .iter()
            .enumerate()
            .all(|(i, a)| (d - 2 - i) % 2 == 0 || a.abs() <= tol * scale)
    }
}

/// Whether two real coefficient vectors agree to the relative tolerance `tol`.
pub fn real_coefficients_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = 1.0 + a.iter().chain(b).fold(0.0f64, |m, x| m.max(x.abs()));
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

/// Σ ε(P) over the given polynomials.
pub fn signed_sum(polys: &[RealPolynomial]) -> i64 {
    polys.iter().map(|p| i64::from(p.sign)).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct SNumber {
    pub spec: String,
    pub s: i64,
    pub complex_count: usize,
    pub real_count: usize,
    pub polynomials: Vec<RealPolynomial>,
}

/// The signed sum over real polynomials of a complete solution set.
///
/// With `cfg.corrupt_sign` the first polynomial's sign is flipped; this is a
/// negative control for the verification sweep.
pub fn s_number_from(set: &SolutionSet, real: Vec<RealPolynomial>, cfg: &RunConfig) -> SNumber {
    let mut s = signed_sum(&real);
    if cfg.corrupt_sign {
        if let Some(first) = real.first() {
            s -= 2 * i64::from(first.sign);
        }
    }
    SNumber {
        spec: set.spec.key(),
        s,
        complex_count: set.solutions.len(),
        real_count: real.len(),
        polynomials: real,
    }
}

pub fn s_number(spec: &BranchSpec, cfg: &RunConfig) -> Result<SNumber> {
    let set = solve_all(spec, cfg)?;
    let real = classify_real(&set, cfg)?;
    Ok(s_number_from(&set, real, cfg))
}
