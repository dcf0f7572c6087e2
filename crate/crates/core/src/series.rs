//! One-part real double Hurwitz numbers `h_λ(m)` and a structural fit of
//! their exponential generating series against the `tanh`/`sech` basis.

use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;
use serde::Serialize;

use crate::config::RunConfig;
use crate::coverings::{real_hurwitz, vanishes_by_definition};
use crate::error::{Error, Result};
use crate::partitions::{BranchSpec, Parity, Partition};

/// The one-part spec for `λ ∪ (1^m)`: that profile at `w = 1` followed by
/// `l(λ) + m - 1` simple profiles at `2, 3, …`. `None` for the degree-1
/// identity covering, which has no branch points.
pub fn one_part_spec(lambda: &Partition, m: usize) -> Result<Option<BranchSpec>> {
    let big = lambda.with_ones(m);
    let d = big.degree();
    if d == 1 {
        return Ok(None);
    }
    let simple_count = big.len() - 1;
    let mut profiles = vec![big];
    profiles.extend(std::iter::repeat_n(Partition::simple(d), simple_count));
    let total: usize = profiles.iter().map(Partition::len).sum();
    assert_eq!(total, (profiles.len() - 1) * d + 1, "one-part spec violates the length constraint");
    BranchSpec::with_default_values(profiles).map(Some)
}

/// `h_λ(m)`; 1 for the degree-1 identity covering by convention.
pub fn h_value(lambda: &Partition, m: usize, cfg: &RunConfig) -> Result<i64> {
    let d = lambda.degree() + m;
    if d > cfg.max_degree {
        return Err(Error::ScaleExceeded { degree: d, bound: cfg.max_degree });
    }
    let Some(spec) = one_part_spec(lambda, m)? else {
        return Ok(1);
    };
    let hr = real_hurwitz(&spec, cfg)?.value;
    assert!(hr.is_integer(), "h value {hr} for {} is not an integer", spec.key());
    Ok(hr.to_integer())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesEntry {
    pub m: usize,
    pub degree: usize,
    pub value: i64,
    /// Parity of the degree `|λ| + m`.
    pub parity: Parity,
    /// The value is 0 by the parity-odd rule, without solving.
    pub short_circuit: bool,
    /// Set for entries fixed by convention rather than computed.
    pub convention: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesTable {
    pub lambda: Partition,
    pub entries: Vec<SeriesEntry>,
    /// First `m` that could not be computed, with the reason.
    pub truncated_at: Option<(usize, String)>,
}

impl SeriesTable {
    pub fn value(&self, m: usize) -> Option<i64> {
        self.entries.iter().find(|e| e.m == m).map(|e| e.value)
    }

    pub fn max_m(&self) -> Option<usize> {
        self.entries.last().map(|e| e.m)
    }
}

/// `h_λ(m)` for `m = 0..=mmax`, stopping at the first degree beyond the
/// configured bound.
pub fn series_table(lambda: &Partition, mmax: usize, cfg: &RunConfig) -> Result<SeriesTable> {
    let mut entries = Vec::new();
    let mut truncated_at = None;
    for m in 0..=mmax {
        let degree = lambda.degree() + m;
        let value = match h_value(lambda, m, cfg) {
            Ok(v) => v,
            Err(e @ Error::ScaleExceeded { .. }) => {
                truncated_at = Some((m, e.to_string()));
                break;
            }
            Err(e) => return Err(e),
        };
        let spec = one_part_spec(lambda, m)?;
        entries.push(SeriesEntry {
            m,
            degree,
            value,
            parity: Parity::of(degree),
            short_circuit: spec.as_ref().is_some_and(vanishes_by_definition),
            convention: spec.is_none(),
        });
    }
    Ok(SeriesTable { lambda: lambda.clone(), entries, truncated_at })
}

/// Power series coefficients of `tanh q` and `sech q` through `q^order`.
pub fn tanh_sech_series(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut f = vec![0.0; order + 1];
    let mut g = vec![0.0; order + 1];
    g[0] = 1.0;
    // f' = 1 - f², g' = -f g.
    for n in 0..order {
        let ff: f64 = (0..=n).map(|i| f[i] * f[n - i]).sum();
        let fg: f64 = (0..=n).map(|i| f[i] * g[n - i]).sum();
        f[n + 1] = ((if n == 0 { 1.0 } else { 0.0 }) - ff) / (n + 1) as f64;
        g[n + 1] = -fg / (n + 1) as f64;
    }
    (f, g)
}

fn series_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    (0..n).map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisTerm {
    /// Power of `q`.
    pub a: usize,
    /// Power of `tanh q`.
    pub b: usize,
    pub coefficient: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisFit {
    pub parity: Parity,
    pub degree_bound: usize,
    /// Whether each basis element carries the factor `sech q`.
    pub sech_factor: bool,
    pub terms: Vec<BasisTerm>,
    /// Max mismatch over orders `0..=order` of the fitted series.
    pub residual: f64,
    pub order: usize,
    pub data_points: usize,
    pub basis_size: usize,
    /// Basis at least as large as the data: the fit is structural only.
    pub underdetermined: bool,
}

/// Least-squares fit of the parity part of `Σ h(m) q^m / m!` by
/// `{q^a tanh^b : a + b ≤ bound}`, times `sech q` for the odd part.
///
/// The parity is that of the degree `|λ| + m`; orders of the other parity
/// enter the fit as zeros.
pub fn basis_fit(table: &SeriesTable, parity: Parity, bound: usize) -> Result<BasisFit> {
    let selected = table.entries.iter().filter(|e| e.parity == parity).count();
    if selected < 2 && !(table.entries.len() == 1 && selected == 1) {
        return Err(Error::InsufficientData(selected));
    }
    let order = table.max_m().ok_or(Error::InsufficientData(0))?;
    let mut target = vec![0.0; order + 1];
    let mut factorial = 1.0;
    for m in 0..=order {
        if m > 0 {
            factorial *= m as f64;
        }
        if let Some(e) = table.entries.iter().find(|e| e.m == m && e.parity == parity) {
            target[m] = e.value as f64 / factorial;
        }
    }

    let (f, g) = tanh_sech_series(order);
    let sech_factor = parity == Parity::Odd;
    let mut basis: Vec<((usize, usize), Vec<f64>)> = Vec::new();
    let mut fpow = vec![0.0; order + 1];
    fpow[0] = 1.0;
    let mut fpows = Vec::new();
    for _ in 0..=bound {
        fpows.push(fpow.clone());
        fpow = series_mul(&fpow, &f);
    }
    for total in 0..=bound {
        for a in 0..=total {
            let b = total - a;
            let mut s = vec![0.0; order + 1];
            for (k, c) in fpows[b].iter().enumerate() {
                if k + a <= order {
                    s[k + a] = *c;
                }
            }
            if sech_factor {
                s = series_mul(&s, &g);
            }
            basis.push(((a, b), s));
        }
    }

    let rows = order + 1;
    let cols = basis.len();
    let mat = DMatrix::from_fn(rows, cols, |r, c| basis[c].1[r]);
    let rhs = DVector::from_vec(target.clone());
    let coef = mat
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .expect("SVD with both factors computed");
    let fitted = &mat * &coef;
    let residual = fitted.iter().zip(&target).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    let terms = basis
        .iter()
        .zip(coef.iter())
        .map(|(((a, b), _), c)| BasisTerm { a: *a, b: *b, coefficient: *c })
        .collect();
    Ok(BasisFit {
        parity,
        degree_bound: bound,
        sech_factor,
        terms,
        residual,
        order,
        data_points: rows,
        basis_size: cols,
        underdetermined: cols >= rows,
    })
}

/// Exact EGF coefficient `h(m) / m!`.
pub fn egf_coefficient(value: i64, m: usize) -> Ratio<i64> {
    let fact: i64 = (1..=m as i64).product();
    Ratio::new(value, fact)
}
