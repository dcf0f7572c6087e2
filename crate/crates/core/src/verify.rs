//! Verification sweep over all branch data up to a given degree and number
//! of branch points.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::coverings::{analyze, theorem_check_from, vanishes_by_definition, SpecAnalysis};
use crate::error::{Error, Result};
use crate::partitions::{floor_sum, format_profiles, partitions_of, BranchSpec, Partition};
use crate::real_signs::{real_coefficients_close, RealPolynomial};

/// Multisets of nontrivial partitions of `d` with `k ≤ kmax` members that
/// satisfy the length constraint, each sorted in non-increasing order.
pub fn enumerate_specs(d: usize, kmax: usize) -> Vec<Vec<Partition>> {
    let parts: Vec<Partition> = partitions_of(d).into_iter().filter(|p| !p.is_trivial()).collect();
    let mut out = Vec::new();
    fn rec(
        parts: &[Partition],
        start: usize,
        d: usize,
        kmax: usize,
        cur: &mut Vec<Partition>,
        out: &mut Vec<Vec<Partition>>,
    ) {
        let k = cur.len();
        if k > 0 && k < d {
            let total: usize = cur.iter().map(Partition::len).sum();
            if total == (k - 1) * d + 1 {
                out.push(cur.clone());
            }
        }
        if k == kmax || k + 1 >= d {
            return;
        }
        for i in start..parts.len() {
            cur.push(parts[i].clone());
            rec(parts, i, d, kmax, cur, out);
            cur.pop();
        }
    }
    rec(&parts, 0, d, kmax, &mut Vec::new(), &mut out);
    out
}

/// Specs for every degree `2..=dmax`.
pub fn sweep_specs(dmax: usize, kmax: usize) -> Vec<Vec<Partition>> {
    (2..=dmax).flat_map(|d| enumerate_specs(d, kmax)).collect()
}

/// Distinct orderings of a multiset, in lexicographic order.
pub fn distinct_orderings(items: &[Partition]) -> Vec<Vec<Partition>> {
    let mut cur = items.to_vec();
    cur.sort();
    let mut out = vec![cur.clone()];
    loop {
        let n = cur.len();
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[i - 1] < cur[j]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
    out
}

/// Branch value configurations used for invariance checks: `1..k`, seeded
/// random spacings, and a configuration straddling zero.
pub fn value_configs(k: usize, seed: u64) -> Vec<Vec<f64>> {
    let default: Vec<f64> = (1..=k).map(|i| i as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x05ee_d0f7_a1e5);
    let mut w = rng.random_range(-3.0..3.0);
    let random: Vec<f64> = (0..k)
        .map(|_| {
            let v = w;
            w += rng.random_range(0.5..3.0);
            v
        })
        .collect();
    let shifted: Vec<f64> = (1..=k).map(|i| 2.0 * i as f64 - k as f64 - 1.5).collect();
    vec![default, random, shifted]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Status {
    Pass,
    Fail,
    FailedInfra,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    /// Measured-only properties never fail a record.
    pub required: bool,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecRecord {
    pub spec: String,
    pub degree: usize,
    pub profiles: String,
    #[serde(rename = "N")]
    pub n: Option<u64>,
    #[serde(rename = "H", serialize_with = "crate::serialize_opt_ratio")]
    pub h: Option<Ratio<i64>>,
    pub s: Option<i64>,
    pub s_reversed: Option<i64>,
    #[serde(rename = "HR", serialize_with = "crate::serialize_opt_ratio")]
    pub hr: Option<Ratio<i64>>,
    pub status: Status,
    pub checks: Vec<PropertyCheck>,
    pub error: Option<String>,
}

impl SpecRecord {
    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub failed_infra: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub dmax: usize,
    pub kmax: usize,
    pub records: Vec<SpecRecord>,
    pub summary: Summary,
    pub pass: bool,
}

struct Checks(Vec<PropertyCheck>);

impl Checks {
    fn push(&mut self, name: &str, required: bool, pass: bool, detail: impl Into<String>) {
        self.0.push(PropertyCheck { name: name.into(), required, pass, detail: detail.into() });
    }
}

fn is_infra(e: &Error) -> bool {
    !matches!(e, Error::SignMismatch(..) | Error::InvolutionMismatch | Error::InvalidSpec(_))
}

fn reflected_match<'a>(p: &RealPolynomial, set: &'a [RealPolynomial], tol: f64) -> Option<&'a RealPolynomial> {
    let r = p.reflected_coefficients();
    set.iter().find(|q| real_coefficients_close(&q.coefficients, &r, tol))
}

/// Parity laws on one real solution set: orbit sign relation, per-branch
/// parity, and `t(P(-z)) = ord(P)`. Returns (orbit, per-branch, reflection)
/// violation descriptions.
fn parity_violations(
    real: &[RealPolynomial],
    floor_total: usize,
    tol: f64,
) -> (Vec<String>, Vec<String>, Vec<String>) {
    let (mut orbit, mut branch, mut reflection) = (Vec::new(), Vec::new(), Vec::new());
    let factor: i8 = if floor_total % 2 == 0 { 1 } else { -1 };
    for p in real {
        for (i, b) in p.branches.iter().enumerate() {
            let expected = b.profile.o_count() / 2 % 2;
            if (b.disorders + b.ordered_pairs) % 2 != expected {
                branch.push(format!(
                    "{:?} branch {i}: t+ord = {} vs floor(o/2) = {}",
                    p.coefficients,
                    b.disorders + b.ordered_pairs,
                    b.profile.o_count() / 2
                ));
            }
        }
        if p.degree % 2 == 1 {
            continue;
        }
        match reflected_match(p, real, tol) {
            Some(q) => {
                if p.sign != factor * q.sign {
                    orbit.push(format!("{:?}: sign {} vs mirror {}", p.coefficients, p.sign, q.sign));
                }
                if q.disorders != p.ordered_pairs {
                    reflection.push(format!(
                        "{:?}: t(P(-z)) = {} but ord(P) = {}",
                        p.coefficients, q.disorders, p.ordered_pairs
                    ));
                }
            }
            None => orbit.push(format!("{:?}: no mirror in the real set", p.coefficients)),
        }
    }
    (orbit, branch, reflection)
}

fn summarize(v: &[String]) -> String {
    match v.len() {
        0 => "ok".into(),
        n => format!("{n} violations, first: {}", v[0]),
    }
}

fn solution_checks(a: &SpecAnalysis, cfg: &RunConfig, checks: &mut Checks) {
    let tol = cfg.tolerances;
    let mut sets = vec![(&a.solutions, &a.real, "")];
    if let Some((set, real)) = &a.reversed {
        sets.push((set, real, " (reversed)"));
    }
    for (set, real, suffix) in sets {
        let closed = set.conjugation_closed(tol.dedup) && set.rotation_closed(tol.dedup);
        checks.push(&format!("closures{suffix}"), true, closed, format!("{} solutions", set.solutions.len()));
        let n = set.target;
        checks.push(
            &format!("real-count-parity{suffix}"),
            true,
            real.len() as u64 % 2 == n % 2,
            format!("{} real of N = {n}", real.len()),
        );
        let r = set.max_residual();
        checks.push(&format!("residuals{suffix}"), true, r < tol.residual, format!("max residual {r:e}"));
        checks.push(
            &format!("complete{suffix}"),
            true,
            set.is_complete() && set.solutions.len() as u64 == a.count.n,
            format!("{} of {}", set.solutions.len(), a.count.n),
        );
    }
}

/// Run every check on one profile multiset.
pub fn verify_spec(profiles: &[Partition], cfg: &RunConfig) -> SpecRecord {
    let base = BranchSpec::with_default_values(profiles.to_vec()).expect("enumerated specs are valid");
    let d = base.degree();
    let mut record = SpecRecord {
        spec: base.key(),
        degree: d,
        profiles: format_profiles(base.profiles()),
        n: None,
        h: None,
        s: None,
        s_reversed: None,
        hr: None,
        status: Status::Pass,
        checks: Vec::new(),
        error: None,
    };
    let mut checks = Checks(Vec::new());
    match run_checks(&base, cfg, &mut record, &mut checks) {
        Ok(()) => {
            record.status = if checks.0.iter().all(|c| c.pass || !c.required) {
                Status::Pass
            } else {
                Status::Fail
            };
        }
        Err(e) => {
            record.status = if is_infra(&e) { Status::FailedInfra } else { Status::Fail };
            record.error = Some(e.to_string());
        }
    }
    record.checks = checks.0;
    record
}

fn run_checks(base: &BranchSpec, cfg: &RunConfig, record: &mut SpecRecord, checks: &mut Checks) -> Result<()> {
    let d = base.degree();
    let a = analyze(base, cfg)?;
    record.n = Some(a.count.n);
    record.h = Some(a.count.h);
    let report = theorem_check_from(&a, cfg)?;
    record.s = Some(report.s);
    record.s_reversed = report.s_reversed;
    record.hr = Some(report.hr);
    checks.push("theorem", true, report.pass, report.failures.join("; "));
    if let Some(h) = report.half_sum {
        checks.push("half-sum", true, h == report.hr, format!("{h} vs {}", report.hr));
    }
    solution_checks(&a, cfg, checks);

    let floor_total = floor_sum(base.profiles());
    let tol = cfg.tolerances.dedup;
    let (mut orbit, mut branch, mut reflection) = parity_violations(&a.real, floor_total, tol);
    if let Some((_, real)) = &a.reversed {
        let (o, b, r) = parity_violations(real, floor_total, tol);
        orbit.extend(o);
        branch.extend(b);
        reflection.extend(r);
    }
    let even = d % 2 == 0;
    checks.push("per-branch-parity", even, branch.is_empty(), summarize(&branch));
    if even {
        checks.push("orbit-sign-relation", true, orbit.is_empty(), summarize(&orbit));
        checks.push("reflection-t-ord", true, reflection.is_empty(), summarize(&reflection));
    }
    if vanishes_by_definition(base) {
        let zero = report.s == 0 && report.hr == Ratio::from_integer(0);
        checks.push("vanishing", true, zero, format!("s = {}, HR = {}", report.s, report.hr));
    }

    // Order and position invariance.
    let mut mismatches = Vec::new();
    let mut runs = 0;
    for ordering in distinct_orderings(base.profiles()) {
        for (c, values) in value_configs(base.k(), cfg.seed).into_iter().enumerate() {
            let spec = BranchSpec::new(ordering.clone(), values)?;
            let r = theorem_check_from(&analyze(&spec, cfg)?, cfg)?;
            runs += 1;
            if r.s != report.s || r.hr != report.hr || !r.pass {
                mismatches.push(format!(
                    "{} (config {c}): s = {}, HR = {}, pass = {}",
                    spec.key(),
                    r.s,
                    r.hr,
                    r.pass
                ));
            }
        }
    }
    checks.push(
        "order-invariance",
        true,
        mismatches.is_empty(),
        if mismatches.is_empty() { format!("{runs} configurations agree") } else { mismatches.join("; ") },
    );
    Ok(())
}

/// Sweep all specs with `2 ≤ d ≤ dmax` and `k ≤ kmax`, sorted by spec key.
pub fn verify(dmax: usize, kmax: usize, cfg: &RunConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    if dmax > cfg.max_degree {
        return Err(Error::ScaleExceeded { degree: dmax, bound: cfg.max_degree });
    }
    let mut records: Vec<SpecRecord> = sweep_specs(dmax, kmax).iter().map(|p| verify_spec(p, cfg)).collect();
    records.sort_by(|a, b| a.spec.cmp(&b.spec));
    let mut summary = Summary { total: records.len(), ..Summary::default() };
    for r in &records {
        match r.status {
            Status::Pass => summary.passed += 1,
            Status::Fail => summary.failed += 1,
            Status::FailedInfra => summary.failed_infra += 1,
        }
    }
    let pass = summary.passed == summary.total;
    Ok(VerifyReport { dmax, kmax, records, summary, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn specs_of_small_degree() {
        assert_eq!(enumerate_specs(2, 3), vec![vec![p(&[2])]]);
        assert_eq!(enumerate_specs(3, 3), vec![vec![p(&[3])], vec![p(&[2, 1]), p(&[2, 1])]]);
        let d4 = enumerate_specs(4, 3);
        assert!(d4.contains(&vec![p(&[4])]));
        assert!(d4.contains(&vec![p(&[3, 1]), p(&[2, 1, 1])]));
        assert!(d4.contains(&vec![p(&[2, 2]), p(&[2, 1, 1])]));
        assert!(d4.contains(&vec![p(&[2, 1, 1]); 3]));
        for spec in sweep_specs(5, 4) {
            let d = spec[0].degree();
            let k = spec.len();
            assert!(k < d);
            assert_eq!(spec.iter().map(Partition::len).sum::<usize>(), (k - 1) * d + 1);
        }
    }

    #[test]
    fn orderings_are_distinct() {
        let o = distinct_orderings(&[p(&[2, 1, 1]), p(&[2, 1, 1]), p(&[3, 1])]);
        assert_eq!(o.len(), 3);
        assert_eq!(distinct_orderings(&[p(&[2]), p(&[3]), p(&[4])]).len(), 6);
    }

    #[test]
    fn value_configs_are_increasing() {
        for k in 1..=4 {
            let configs = value_configs(k, 7);
            assert_eq!(configs.len(), 3);
            for c in configs {
                assert_eq!(c.len(), k);
                assert!(c.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn small_sweep_passes() {
        let report = verify(3, 2, &RunConfig::default()).unwrap();
        assert_eq!(report.summary.total, 3);
        assert!(report.pass, "{:#?}", report.records);
    }

    #[test]
    fn corrupted_sign_fails_sweep() {
        let cfg = RunConfig { corrupt_sign: true, ..RunConfig::default() };
        let report = verify(3, 2, &cfg).unwrap();
        assert!(report.summary.failed >= 1);
        assert!(!report.pass);
    }
}
