//! All normalized complex polynomials with prescribed ramification over
//! prescribed real branch values, with a completeness certificate.
//!
//! The unknowns are the preimages of the branch values (see [`SystemSpec`]).
//! Random starts are refined by damped Newton, validated (residual and
//! profile exactness), mapped to coefficient space and deduplicated there,
//! which quotients away the permutation symmetry among equal parts. The run
//! stops once the number of distinct solutions reaches the factorization
//! count `N`.

mod cache;
mod newton;
mod system;

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cache::{load_cached, spec_hash, store_cached, CacheRecord};
pub use system::{build_system, SystemSpec};

use crate::config::{RunConfig, Tolerances};
use crate::error::{Error, Result};
use crate::factorizations::count_factorizations;
use crate::partitions::BranchSpec;
use crate::poly::max_abs;
use crate::real_signs::{RawBranch, RealPolynomial};
use newton::{damped_newton, polish};

/// One preimage of a branch value with its ramification order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootPart {
    pub root: Complex64,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// `a_2, …, a_d`: the coefficients of `z^{d-2}, …, z^0`.
    pub coefficients: Vec<Complex64>,
    /// Preimages of each branch value, in the layout of [`SystemSpec`].
    pub roots: Vec<Vec<RootPart>>,
    pub residual: f64,
}

impl Solution {
    fn from_unknowns(sys: &SystemSpec, x: &[Complex64], residual: f64) -> Self {
        let roots = (0..sys.k())
            .map(|i| {
                x[sys.branch_range(i)]
                    .iter()
                    .zip(sys.orders(i))
                    .map(|(&root, &order)| RootPart { root, order })
                    .collect()
            })
            .collect();
        Self { coefficients: sys.coefficients(x), roots, residual }
    }

    pub(crate) fn unknowns(&self) -> Vec<Complex64> {
        self.roots.iter().flatten().map(|r| r.root).collect()
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() + 1
    }

    /// The solution with all coefficients conjugated.
    pub fn conjugate(&self) -> Solution {
        self.map_roots(|r| r.conj(), |_, a| a.conj())
    }

    /// `P(ζz)` for `ζ^d = 1`; preimages are divided by `ζ`.
    pub fn rotate(&self, zeta: Complex64) -> Solution {
        let d = self.degree() as i32;
        self.map_roots(|r| r / zeta, |idx, a| a * zeta.powi(d - 2 - idx as i32))
    }

    fn map_roots(
        &self,
        root_map: impl Fn(Complex64) -> Complex64,
        coeff_map: impl Fn(usize, Complex64) -> Complex64,
    ) -> Solution {
        Solution {
            coefficients: self.coefficients.iter().enumerate().map(|(i, &a)| coeff_map(i, a)).collect(),
            roots: self
                .roots
                .iter()
                .map(|b| b.iter().map(|r| RootPart { root: root_map(r.root), order: r.order }).collect())
                .collect(),
            residual: self.residual,
        }
    }

    /// Largest imaginary part of a coefficient, relative to the coefficient size.
    pub fn imaginary_size(&self) -> f64 {
        let imag = self.coefficients.iter().fold(0.0f64, |m, a| m.max(a.im.abs()));
        imag / (1.0 + max_abs(&self.coefficients))
    }
}

/// Whether two coefficient vectors agree to the relative tolerance `tol`.
pub fn coefficients_close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    let scale = 1.0 + max_abs(a).max(max_abs(b));
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol * scale)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Certificate {
    Complete,
    Incomplete { found: usize, target: u64 },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub starts: usize,
    pub converged: usize,
    pub degenerate: usize,
    pub failed: usize,
    pub harvested: usize,
    pub cached: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionSet {
    #[serde(serialize_with = "serialize_spec_key")]
    pub spec: BranchSpec,
    pub solutions: Vec<Solution>,
    pub target: u64,
    pub certificate: Certificate,
    pub stats: SolveStats,
}

fn serialize_spec_key<S: serde::Serializer>(spec: &BranchSpec, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&spec.key())
}

impl SolutionSet {
    pub fn is_complete(&self) -> bool {
        self.certificate == Certificate::Complete
    }

    pub fn find(&self, coefficients: &[Complex64], tol: f64) -> Option<usize> {
        self.solutions.iter().position(|s| coefficients_close(&s.coefficients, coefficients, tol))
    }

    /// Every solution's conjugate is also a solution.
    pub fn conjugation_closed(&self, tol: f64) -> bool {
        self.solutions.iter().all(|s| self.find(&s.conjugate().coefficients, tol).is_some())
    }

    /// Every solution's image under `z ↦ ζz`, `ζ^d = 1`, is also a solution.
    pub fn rotation_closed(&self, tol: f64) -> bool {
        let d = self.spec.degree();
        self.solutions.iter().all(|s| {
            (1..d).all(|r| self.find(&s.rotate(root_of_unity(d, r)).coefficients, tol).is_some())
        })
    }

    pub fn max_residual(&self) -> f64 {
        self.solutions.iter().fold(0.0, |m, s| m.max(s.residual))
    }
}

fn root_of_unity(d: usize, r: usize) -> Complex64 {
    Complex64::from_polar(1.0, TAU * r as f64 / d as f64)
}

enum Outcome {
    Accepted(Vec<Complex64>, f64),
    Degenerate,
    Failed,
}

/// Relative separation check between all preimages of each branch value.
fn profile_exact(sys: &SystemSpec, x: &[Complex64], cluster: f64) -> bool {
    let scale = 1.0 + max_abs(x);
    (0..sys.k()).all(|i| {
        let roots = &x[sys.branch_range(i)];
        roots.iter().enumerate().all(|(a, ra)| {
            roots[a + 1..].iter().all(|rb| (ra - rb).norm() > cluster * scale)
        })
    })
}

fn start_point(sys: &SystemSpec, seed: u64, index: usize, scale: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let amp = scale / std::f64::consts::SQRT_2;
    (0..sys.num_unknowns())
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re * amp, im * amp)
        })
        .collect()
}

fn run_start(sys: &SystemSpec, cfg: &RunConfig, index: usize, scale: f64) -> Outcome {
    let x0 = start_point(sys, cfg.seed, index, scale);
    let bound = 1e6 * scale;
    let tol = &cfg.tolerances;
    let Some(conv) = damped_newton(sys, x0, cfg.newton_max_iter, bound, tol.residual) else {
        return Outcome::Failed;
    };
    let (x, residual) = polish(sys, &conv.x, 2);
    let residual = residual.min(conv.residual);
    if residual > tol.residual {
        return Outcome::Failed;
    }
    if !profile_exact(sys, &x, tol.cluster) {
        return Outcome::Degenerate;
    }
    Outcome::Accepted(x, residual)
}

/// Deduplicating collector; the only mutable state of a run.
struct Collector<'a> {
    sys: &'a SystemSpec,
    tol: Tolerances,
    solutions: Vec<Solution>,
}

impl Collector<'_> {
    fn contains(&self, s: &Solution) -> bool {
        self.solutions.iter().any(|t| coefficients_close(&t.coefficients, &s.coefficients, self.tol.dedup))
    }

    fn insert(&mut self, s: Solution) -> bool {
        if self.contains(&s) {
            return false;
        }
        self.solutions.push(s);
        true
    }

    /// Insert the orbit of `seed` under conjugation and `z ↦ ζz`; returns the
    /// number of new solutions beyond `seed` itself.
    fn harvest(&mut self, seed: &Solution) -> usize {
        let d = self.sys.degree();
        let mut frontier = vec![seed.clone()];
        let mut added = 0;
        while let Some(s) = frontier.pop() {
            let mut mates = vec![s.conjugate()];
            mates.extend((1..d).map(|r| s.rotate(root_of_unity(d, r))));
            for mate in mates {
                let x = mate.unknowns();
                let residual = max_abs(self.sys.residual(&x).as_slice());
                if residual > self.tol.residual || !profile_exact(self.sys, &x, self.tol.cluster) {
                    continue;
                }
                let mate = Solution::from_unknowns(self.sys, &x, residual);
                if self.insert(mate.clone()) {
                    added += 1;
                    frontier.push(mate);
                }
            }
        }
        added
    }
}

fn compare_solutions(a: &Solution, b: &Solution) -> Ordering {
    a.coefficients
        .iter()
        .zip(&b.coefficients)
        .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Run the multistart search. The certificate records whether the count
/// reached `N`; an overcount is an error.
pub fn enumerate(spec: &BranchSpec, cfg: &RunConfig) -> Result<SolutionSet> {
    cfg.validate()?;
    if spec.degree() > cfg.max_degree {
        return Err(Error::ScaleExceeded { degree: spec.degree(), bound: cfg.max_degree });
    }
    let target = count_factorizations(spec.profiles(), cfg.enumeration_budget)?.n;
    let sys = build_system(spec);
    let mut stats = SolveStats::default();
    let mut coll = Collector { sys: &sys, tol: cfg.tolerances, solutions: Vec::new() };

    if let Some(path) = &cfg.cache {
        for cached in load_cached(path, spec)? {
            let x = cached.unknowns();
            if x.len() != sys.num_unknowns() {
                continue;
            }
            let (x, residual) = polish(&sys, &x, 2);
            if residual <= cfg.tolerances.residual
                && profile_exact(&sys, &x, cfg.tolerances.cluster)
                && coll.insert(Solution::from_unknowns(&sys, &x, residual))
            {
                stats.cached += 1;
            }
        }
    }

    let d = spec.degree() as f64;
    let scale = (1.0 + spec.max_abs_value()).powf(1.0 / d);
    let mut next = 0;
    'batches: while (coll.solutions.len() as u64) < target && next < cfg.budget {
        let end = (next + cfg.batch_size).min(cfg.budget);
        let outcomes: Vec<Outcome> = cfg.install(|| {
            (next..end).into_par_iter().map(|i| run_start(&sys, cfg, i, scale)).collect()
        });
        for outcome in outcomes {
            stats.starts += 1;
            match outcome {
                Outcome::Accepted(x, residual) => {
                    stats.converged += 1;
                    let s = Solution::from_unknowns(&sys, &x, residual);
                    if coll.insert(s.clone()) && cfg.harvest {
                        stats.harvested += coll.harvest(&s);
                    }
                }
                Outcome::Degenerate => stats.degenerate += 1,
                Outcome::Failed => stats.failed += 1,
            }
            if coll.solutions.len() as u64 >= target {
                break 'batches;
            }
        }
        next = end;
    }

    let mut solutions = coll.solutions;
    let found = solutions.len();
    if found as u64 > target {
        return Err(Error::OvercountDetected { found, target });
    }
    solutions.sort_by(compare_solutions);
    let certificate = if found as u64 == target {
        Certificate::Complete
    } else {
        Certificate::Incomplete { found, target }
    };
    if let Some(path) = &cfg.cache {
        store_cached(path, spec, &solutions)?;
    }
    Ok(SolutionSet { spec: spec.clone(), solutions, target, certificate, stats })
}

/// Like [`enumerate`], but an incomplete certificate is an error.
pub fn solve_all(spec: &BranchSpec, cfg: &RunConfig) -> Result<SolutionSet> {
    let set = enumerate(spec, cfg)?;
    match set.certificate {
        Certificate::Complete => Ok(set),
        Certificate::Incomplete { found, target } if set.stats.degenerate > 0 => {
            Err(Error::DegenerateConfiguration(format!(
                "found {found} of {target} solutions; {} starts converged to points violating profile exactness",
                set.stats.degenerate
            )))
        }
        Certificate::Incomplete { found, target } => Err(Error::IncompleteEnumeration { found, target }),
    }
}

/// Snap a point onto the real locus: preimages within the cluster tolerance
/// of the real axis become real, the others are paired with their conjugate
/// partner of the same order and symmetrized.
fn project_real(sys: &SystemSpec, x: &mut [Complex64], cluster: f64) -> Result<()> {
    let scale = 1.0 + max_abs(x);
    for i in 0..sys.k() {
        let range = sys.branch_range(i);
        let orders = sys.orders(i).to_vec();
        let roots = &mut x[range];
        let mut done = vec![false; roots.len()];
        for a in 0..roots.len() {
            if done[a] {
                continue;
            }
            if roots[a].im.abs() <= 0.5 * cluster * scale {
                roots[a].im = 0.0;
                done[a] = true;
                continue;
            }
            let target = roots[a].conj();
            let partner = (0..roots.len())
                .filter(|&b| b != a && !done[b] && orders[b] == orders[a])
                .min_by(|&b, &c| (roots[b] - target).norm().total_cmp(&(roots[c] - target).norm()));
            let Some(b) = partner.filter(|&b| (roots[b] - target).norm() <= cluster * scale) else {
                return Err(Error::DegenerateConfiguration(format!(
                    "preimage {} of w={} has no conjugate partner",
                    roots[a],
                    sys.spec().values()[i]
                )));
            };
            let mean = (roots[a] + roots[b].conj()) * 0.5;
            roots[a] = mean;
            roots[b] = mean.conj();
            done[a] = true;
            done[b] = true;
        }
    }
    Ok(())
}

fn real_polynomial(sys: &SystemSpec, s: &Solution, cfg: &RunConfig) -> Result<RealPolynomial> {
    let tol = &cfg.tolerances;
    let mut x = s.unknowns();
    for _ in 0..3 {
        project_real(sys, &mut x, tol.cluster)?;
        x = polish(sys, &x, 1).0;
    }
    project_real(sys, &mut x, tol.cluster)?;
    let residual = max_abs(sys.residual(&x).as_slice());
    if residual > tol.residual {
        return Err(Error::DegenerateConfiguration(format!(
            "real polish left residual {residual:e}"
        )));
    }
    let spec = sys.spec();
    let branches = (0..sys.k())
        .map(|i| {
            let mut raw = RawBranch {
                value: spec.values()[i],
                profile: spec.profiles()[i].clone(),
                real: Vec::new(),
                nonreal_orders: Vec::new(),
            };
            for (&root, &order) in x[sys.branch_range(i)].iter().zip(sys.orders(i)) {
                if root.im == 0.0 {
                    raw.real.push((root.re, order));
                } else {
                    raw.nonreal_orders.push(order);
                }
            }
            raw
        })
        .collect();
    let coefficients = sys.coefficients(&x).iter().map(|a| a.re).collect();
    RealPolynomial::new(spec.degree(), coefficients, branches, tol.cluster)
}

/// The real members of a complete solution set, re-polished on the real locus.
pub fn classify_real(set: &SolutionSet, cfg: &RunConfig) -> Result<Vec<RealPolynomial>> {
    if let Certificate::Incomplete { found, target } = set.certificate {
        return Err(Error::IncompleteEnumeration { found, target });
    }
    let sys = build_system(&set.spec);
    let tol = cfg.tolerances.realness;
    let mut out = Vec::new();
    for s in &set.solutions {
        let imag = s.imaginary_size();
        if imag < tol {
            out.push(real_polynomial(&sys, s, cfg)?);
        } else if imag < 10.0 * tol {
            return Err(Error::AmbiguousRealness { imag, tol });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::Partition;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn contains(set: &SolutionSet, coeffs: &[Complex64]) -> bool {
        set.find(coeffs, 1e-8).is_some()
    }

    #[test]
    fn cubic_closed_form() {
        // -4c^3 = w1 - w2, p = -3c^2, q = (w1 + w2)/2.
        let spec = BranchSpec::new(vec![p(&[2, 1]), p(&[2, 1])], vec![-2.0, 2.0]).unwrap();
        let set = solve_all(&spec, &RunConfig::default()).unwrap();
        assert_eq!(set.solutions.len(), 3);
        for r in 0..3 {
            let pc = -3.0 * root_of_unity(3, r);
            assert!(contains(&set, &[pc, c(0.0, 0.0)]), "missing p = {pc}");
        }
        assert!(set.max_residual() < 1e-10);
    }

    #[test]
    fn quartic_two_two_closed_form() {
        let spec =
            BranchSpec::from_attachment(vec![p(&[2, 1, 1]), p(&[2, 2])], vec![2.0, 1.0]).unwrap();
        let set = solve_all(&spec, &RunConfig::default()).unwrap();
        assert_eq!(set.solutions.len(), 2);
        // (z^2 ± 1)^2 + 1 = z^4 ± 2z^2 + 2
        assert!(contains(&set, &[c(2.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]));
        assert!(contains(&set, &[c(-2.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]));
    }

    #[test]
    fn quartic_three_one_closed_form() {
        // (z - a)^3 (z + 3a) + 28 with a^4 = 1: z^4 - 6a^2 z^2 + 8a^3 z - 3a^4 + 28.
        let spec =
            BranchSpec::from_attachment(vec![p(&[3, 1]), p(&[2, 1, 1])], vec![28.0, 1.0]).unwrap();
        let set = solve_all(&spec, &RunConfig::default()).unwrap();
        assert_eq!(set.solutions.len(), 4);
        for r in 0..4 {
            let a = root_of_unity(4, r);
            let coeffs = [-6.0 * a * a, 8.0 * a * a * a, c(25.0, 0.0)];
            assert!(contains(&set, &coeffs), "missing a = {a}");
        }
    }

    #[test]
    fn real_classification_examples() {
        let cfg = RunConfig::default();
        let spec = BranchSpec::new(vec![p(&[2, 1]), p(&[2, 1])], vec![-2.0, 2.0]).unwrap();
        let real = classify_real(&solve_all(&spec, &cfg).unwrap(), &cfg).unwrap();
        assert_eq!(real.len(), 1);
        assert!((real[0].coefficients[0] + 3.0).abs() < 1e-8);
        assert!(real[0].coefficients[1].abs() < 1e-8);

        let spec =
            BranchSpec::from_attachment(vec![p(&[2, 1, 1]), p(&[2, 2])], vec![2.0, 1.0]).unwrap();
        assert_eq!(classify_real(&solve_all(&spec, &cfg).unwrap(), &cfg).unwrap().len(), 2);

        let spec =
            BranchSpec::from_attachment(vec![p(&[2, 1, 1]), p(&[2, 2])], vec![1.0, 2.0]).unwrap();
        let set = solve_all(&spec, &cfg).unwrap();
        assert_eq!(set.solutions.len(), 2);
        assert!(classify_real(&set, &cfg).unwrap().is_empty());
    }

    #[test]
    fn closures_hold() {
        let cfg = RunConfig::default();
        let spec = BranchSpec::with_default_values(vec![Partition::simple(4); 3]).unwrap();
        let set = solve_all(&spec, &cfg).unwrap();
        assert_eq!(set.solutions.len(), 16);
        assert!(set.conjugation_closed(1e-6));
        assert!(set.rotation_closed(1e-6));
        let real = classify_real(&set, &cfg).unwrap();
        assert_eq!(real.len() % 2, 16 % 2);
    }

    #[test]
    fn without_harvesting_still_complete() {
        let cfg = RunConfig { harvest: false, ..RunConfig::default() };
        let spec = BranchSpec::new(vec![p(&[3, 1]), p(&[2, 1, 1])], vec![-1.0, 3.0]).unwrap();
        let set = solve_all(&spec, &cfg).unwrap();
        assert_eq!(set.solutions.len(), 4);
        assert_eq!(set.stats.harvested, 0);
    }

    #[test]
    fn tiny_budget_is_incomplete() {
        let cfg = RunConfig { budget: 1, harvest: false, ..RunConfig::default() };
        let spec = BranchSpec::with_default_values(vec![Partition::simple(4); 3]).unwrap();
        let set = enumerate(&spec, &cfg).unwrap();
        assert!(matches!(set.certificate, Certificate::Incomplete { target: 16, .. }));
        assert!(matches!(
            solve_all(&spec, &cfg),
            Err(Error::IncompleteEnumeration { target: 16, .. }) | Err(Error::DegenerateConfiguration(_))
        ));
        assert!(matches!(classify_real(&set, &cfg), Err(Error::IncompleteEnumeration { .. })));
    }

    #[test]
    fn loose_dedup_cannot_exceed_target() {
        // With a huge dedup tolerance solutions merge; the count can only drop.
        let mut cfg = RunConfig::default();
        cfg.tolerances.dedup = 10.0;
        cfg.budget = 200;
        let spec = BranchSpec::with_default_values(vec![Partition::simple(4); 3]).unwrap();
        let set = enumerate(&spec, &cfg).unwrap();
        assert!(set.solutions.len() < 16);
    }

    #[test]
    fn scale_bound() {
        let cfg = RunConfig { max_degree: 3, ..RunConfig::default() };
        let spec = BranchSpec::with_default_values(vec![Partition::full(4)]).unwrap();
        assert!(matches!(enumerate(&spec, &cfg), Err(Error::ScaleExceeded { degree: 4, bound: 3 })));
    }

    #[test]
    fn deterministic_across_workers() {
        let spec = BranchSpec::new(vec![p(&[2, 1, 1]), p(&[2, 1, 1]), p(&[2, 1, 1])], vec![-1.0, 0.5, 3.0])
            .unwrap();
        let one = RunConfig { workers: Some(1), ..RunConfig::default() };
        let four = RunConfig { workers: Some(4), ..RunConfig::default() };
        let a = serde_json::to_string(&enumerate(&spec, &one).unwrap()).unwrap();
        let b = serde_json::to_string(&enumerate(&spec, &four).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
