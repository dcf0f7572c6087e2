//! Real isomorphism classes of polynomial coverings, represented by their
//! normalized real polynomials, and the real polynomial Hurwitz number.
//!
//! A real polynomial of degree `d` is brought to normalized form by a real
//! affine change of variable. For odd `d` the form is unique. For even `d`
//! with positive leading coefficient there are the two forms `Q(z)` and
//! `Q(-z)`, which coincide exactly when `Q` is even (then `|Aut| = 2`); a
//! negative leading coefficient is handled through `-P`, whose branch data
//! is the reversed, negated spec.

use num_rational::Ratio;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::factorizations::{count_factorizations, HurwitzCount};
use crate::partitions::{BranchSpec, Parity};
use crate::poly::compose_affine;
use crate::polysolve::{classify_real, solve_all, SolutionSet};
use crate::real_signs::{real_coefficients_close, signed_sum, RealPolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    PositiveLeading,
    NegativeLeading,
}

/// Normalized forms of a real polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Normalized {
    pub side: Side,
    /// Each form as `a_2, …, a_d`.
    pub forms: Vec<Vec<f64>>,
    pub aut_order: u8,
}

const FORM_TOL: f64 = 1e-12;

/// Normalize a real polynomial given by descending coefficients
/// `a_d, …, a_0` with `a_d ≠ 0`.
pub fn normalize(desc: &[f64]) -> Normalized {
    let d = desc.len() - 1;
    assert!(d >= 1 && desc[0] != 0.0, "need degree >= 1 and a nonzero leading coefficient");
    let lead = desc[0];
    let (side, poly): (Side, Vec<f64>) = if d % 2 == 0 && lead < 0.0 {
        (Side::NegativeLeading, desc.iter().map(|c| -c).collect())
    } else {
        (Side::PositiveLeading, desc.to_vec())
    };
    let lead = poly[0];
    let shift = if d >= 2 { -poly[1] / (d as f64 * lead) } else { -poly[1] / lead };
    let magnitude = lead.abs().powf(-1.0 / d as f64);
    let strip = |q: Vec<f64>| -> Vec<f64> { q.into_iter().skip(2).collect() };
    if d % 2 == 1 {
        let scale = lead.signum() * magnitude;
        return Normalized { side, forms: vec![strip(compose_affine(&poly, scale, shift))], aut_order: 1 };
    }
    let plus = strip(compose_affine(&poly, magnitude, shift));
    let minus = strip(compose_affine(&poly, -magnitude, shift));
    if real_coefficients_close(&plus, &minus, FORM_TOL) {
        Normalized { side, forms: vec![plus], aut_order: 2 }
    } else {
        Normalized { side, forms: vec![plus, minus], aut_order: 1 }
    }
}

/// Class sign, in `{-1, 0, 1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoveringClass {
    pub side: Side,
    pub representatives: Vec<RealPolynomial>,
    pub aut_order: u8,
    pub class_sign: i8,
    #[serde(serialize_with = "crate::serialize_ratio")]
    pub weight: Ratio<i64>,
}

/// Group a real solution set into orbits of `P(z) ↦ P(-z)`.
///
/// Each polynomial's normalized forms (from [`normalize`] on its monic
/// expansion) are matched against the set; an unmatched form is an error.
fn orbits(polys: &[RealPolynomial], tol: f64) -> Result<Vec<Vec<usize>>> {
    let mut assigned = vec![false; polys.len()];
    let mut out = Vec::new();
    for i in 0..polys.len() {
        if assigned[i] {
            continue;
        }
        let p = &polys[i];
        let mut desc = vec![1.0, 0.0];
        desc.extend(&p.coefficients);
        let forms = normalize(&desc).forms;
        let mut members = Vec::new();
        for form in &forms {
            let j = polys
                .iter()
                .position(|q| real_coefficients_close(&q.coefficients, form, tol))
                .ok_or(Error::InvolutionMismatch)?;
            if !members.contains(&j) {
                members.push(j);
            }
        }
        if !members.contains(&i) || members.iter().any(|&j| assigned[j]) {
            return Err(Error::InvolutionMismatch);
        }
        for &j in &members {
            assigned[j] = true;
        }
        out.push(members);
    }
    Ok(out)
}

/// Sign of a class given its representatives' signs.
///
/// Odd degree: the unique representative's sign. Even degree with even
/// parity: the common sign of the representatives. Even degree with odd
/// parity: the average, which is 0 for a pair of opposite signs.
pub fn class_sign(reps: &[i8], degree: usize, parity: Parity) -> Result<i8> {
    match reps {
        [s] => Ok(*s),
        [a, b] if degree % 2 == 0 && parity == Parity::Even => {
            if a == b {
                Ok(*a)
            } else {
                Err(Error::SignMismatch(*a, *b))
            }
        }
        [a, b] => Ok(((i16::from(*a) + i16::from(*b)) / 2) as i8),
        _ => Err(Error::InvolutionMismatch),
    }
}

fn build_classes(
    side: Side,
    polys: &[RealPolynomial],
    degree: usize,
    parity: Parity,
    tol: f64,
) -> Result<Vec<CoveringClass>> {
    let groups: Vec<Vec<usize>> = if degree % 2 == 1 {
        (0..polys.len()).map(|i| vec![i]).collect()
    } else {
        orbits(polys, tol)?
    };
    groups
        .into_iter()
        .map(|members| {
            let representatives: Vec<RealPolynomial> =
                members.iter().map(|&i| polys[i].clone()).collect();
            let aut_order: u8 = if degree % 2 == 0 && representatives.len() == 1 { 2 } else { 1 };
            let signs: Vec<i8> = representatives.iter().map(RealPolynomial::sign).collect();
            let class_sign = class_sign(&signs, degree, parity)?;
            Ok(CoveringClass {
                side,
                representatives,
                aut_order,
                class_sign,
                weight: Ratio::new(i64::from(class_sign), i64::from(aut_order)),
            })
        })
        .collect()
}

/// Classes from the real solutions of a spec and, for even degree, of its
/// reversed spec (the negative-leading side).
pub fn classes_from_real_sets(
    spec: &BranchSpec,
    positive: &[RealPolynomial],
    negative: Option<&[RealPolynomial]>,
    tol: f64,
) -> Result<Vec<CoveringClass>> {
    let d = spec.degree();
    let parity = spec.floor_sum_parity();
    let mut classes = build_classes(Side::PositiveLeading, positive, d, parity, tol)?;
    if d % 2 == 0 {
        let negative = negative.ok_or_else(|| {
            Error::InvalidSpec("even degree needs the reversed spec's real solutions".into())
        })?;
        classes.extend(build_classes(Side::NegativeLeading, negative, d, parity, tol)?);
    }
    Ok(classes)
}

/// Solver output for a spec and, for even degree, its reversed spec.
#[derive(Clone, Debug)]
pub struct SpecAnalysis {
    pub spec: BranchSpec,
    pub count: HurwitzCount,
    pub solutions: SolutionSet,
    pub real: Vec<RealPolynomial>,
    pub reversed: Option<(SolutionSet, Vec<RealPolynomial>)>,
}

pub fn analyze(spec: &BranchSpec, cfg: &RunConfig) -> Result<SpecAnalysis> {
    let count = count_factorizations(spec.profiles(), cfg.enumeration_budget)?;
    let solutions = solve_all(spec, cfg)?;
    let real = classify_real(&solutions, cfg)?;
    let reversed = if spec.degree() % 2 == 0 {
        let rev = spec.reversed();
        let set = solve_all(&rev, cfg)?;
        let real = classify_real(&set, cfg)?;
        Some((set, real))
    } else {
        None
    };
    Ok(SpecAnalysis { spec: spec.clone(), count, solutions, real, reversed })
}

impl SpecAnalysis {
    pub fn classes(&self, cfg: &RunConfig) -> Result<Vec<CoveringClass>> {
        classes_from_real_sets(
            &self.spec,
            &self.real,
            self.reversed.as_ref().map(|(_, r)| r.as_slice()),
            cfg.tolerances.dedup,
        )
    }

    /// Whether H^R is zero by definition (even degree, odd parity).
    pub fn short_circuits(&self) -> bool {
        vanishes_by_definition(&self.spec)
    }
}

pub fn vanishes_by_definition(spec: &BranchSpec) -> bool {
    spec.degree() % 2 == 0 && spec.floor_sum_parity() == Parity::Odd
}

pub fn covering_classes(spec: &BranchSpec, cfg: &RunConfig) -> Result<Vec<CoveringClass>> {
    analyze(spec, cfg)?.classes(cfg)
}

/// Σ class_sign / aut_order.
pub fn weighted_sum(classes: &[CoveringClass]) -> Ratio<i64> {
    classes.iter().map(|c| c.weight).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct RealHurwitz {
    pub spec: String,
    #[serde(serialize_with = "crate::serialize_ratio")]
    pub value: Ratio<i64>,
    pub reason: String,
    pub classes: Option<Vec<CoveringClass>>,
}

pub const PARITY_ODD_REASON: &str = "parity-odd branch";

/// The real polynomial Hurwitz number. Zero without solving when the degree
/// is even and the floor-sum parity is odd, unless `cfg.force_classes`.
pub fn real_hurwitz(spec: &BranchSpec, cfg: &RunConfig) -> Result<RealHurwitz> {
    if vanishes_by_definition(spec) && !cfg.force_classes {
        return Ok(RealHurwitz {
            spec: spec.key(),
            value: Ratio::from_integer(0),
            reason: PARITY_ODD_REASON.into(),
            classes: None,
        });
    }
    let classes = covering_classes(spec, cfg)?;
    let (value, reason) = if vanishes_by_definition(spec) {
        (Ratio::from_integer(0), PARITY_ODD_REASON.to_string())
    } else {
        (weighted_sum(&classes), "class sum".to_string())
    };
    Ok(RealHurwitz { spec: spec.key(), value, reason, classes: Some(classes) })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassSummary {
    pub side: Side,
    pub reps: Vec<Vec<f64>>,
    pub aut: u8,
    pub sign: i8,
}

impl From<&CoveringClass> for ClassSummary {
    fn from(c: &CoveringClass) -> Self {
        Self {
            side: c.side,
            reps: c.representatives.iter().map(|r| r.coefficients.clone()).collect(),
            aut: c.aut_order,
            sign: c.class_sign,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub spec: String,
    pub degree: usize,
    pub parity: Parity,
    pub s: i64,
    pub s_reversed: Option<i64>,
    #[serde(rename = "HR", serialize_with = "crate::serialize_ratio")]
    pub hr: Ratio<i64>,
    /// Σ class_sign / aut over all classes (averaged signs in the parity-odd branch).
    #[serde(serialize_with = "crate::serialize_ratio")]
    pub class_sum: Ratio<i64>,
    #[serde(serialize_with = "crate::serialize_opt_ratio")]
    pub half_sum: Option<Ratio<i64>>,
    pub classes: Vec<ClassSummary>,
    pub pass: bool,
    pub failures: Vec<String>,
}

/// Compare H^R (class route) with the s-number (polynomial route); for even
/// degree also with `½(s + s_reversed)`.
pub fn theorem_check_from(analysis: &SpecAnalysis, cfg: &RunConfig) -> Result<TheoremReport> {
    let spec = &analysis.spec;
    let d = spec.degree();
    let parity = spec.floor_sum_parity();
    let set_s = crate::real_signs::s_number_from(&analysis.solutions, analysis.real.clone(), cfg).s;
    let s_reversed = analysis.reversed.as_ref().map(|(_, r)| signed_sum(r));
    let mut failures = Vec::new();

    let classes = match analysis.classes(cfg) {
        Ok(c) => c,
        Err(e @ (Error::SignMismatch(..) | Error::InvolutionMismatch)) => {
            failures.push(e.to_string());
            Vec::new()
        }
        Err(e) => return Err(e),
    };
    let class_sum = weighted_sum(&classes);
    let hr = if analysis.short_circuits() { Ratio::from_integer(0) } else { class_sum };

    if !hr.is_integer() {
        failures.push(format!("H^R = {hr} is not an integer"));
    }
    if hr != Ratio::from_integer(set_s) {
        failures.push(format!("H^R = {hr} but s = {set_s}"));
    }
    let half_sum = s_reversed.map(|sr| Ratio::new(set_s + sr, 2));
    if let Some(h) = half_sum {
        if h != hr {
            failures.push(format!("half-sum {h} differs from H^R = {hr}"));
        }
        if class_sum != h {
            failures.push(format!("class sum {class_sum} differs from half-sum {h}"));
        }
    }
    if analysis.short_circuits() && set_s != 0 {
        failures.push(format!("parity-odd spec has s = {set_s}"));
    }
    if d % 2 == 0 {
        let negative = classes.iter().filter(|c| c.side == Side::NegativeLeading);
        let reps: usize = negative.map(|c| c.representatives.len()).sum();
        let expected = analysis.reversed.as_ref().map_or(0, |(_, r)| r.len());
        if reps != expected {
            failures.push(format!("negative side has {reps} representatives, reversed spec has {expected} real solutions"));
        }
    }

    Ok(TheoremReport {
        spec: spec.key(),
        degree: d,
        parity,
        s: set_s,
        s_reversed,
        hr,
        class_sum,
        half_sum,
        classes: classes.iter().map(ClassSummary::from).collect(),
        pass: failures.is_empty(),
        failures,
    })
}

pub fn theorem_check(spec: &BranchSpec, cfg: &RunConfig) -> Result<TheoremReport> {
    theorem_check_from(&analyze(spec, cfg)?, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::Partition;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        real_coefficients_close(a, b, 1e-12)
    }

    #[test]
    fn normalize_odd_cubic() {
        // (z - 1)^3 + 3(z - 1)^2 = z^3 - 3z + 2
        let n = normalize(&[1.0, 3.0, 0.0, 0.0]);
        assert_eq!(n.side, Side::PositiveLeading);
        assert_eq!(n.aut_order, 1);
        assert_eq!(n.forms.len(), 1);
        assert!(close(&n.forms[0], &[-3.0, 2.0]));
    }

    #[test]
    fn normalize_odd_negative_leading_is_unique() {
        // -x^3 at x = -z is z^3.
        let n = normalize(&[-1.0, 0.0, 0.0, 0.0]);
        assert_eq!(n.forms, vec![vec![0.0, 0.0]]);
        assert_eq!(n.side, Side::PositiveLeading);
    }

    #[test]
    fn normalize_quartic_with_shift() {
        // x^4 + x^3 at x = z - 1/4, and its mirror.
        let n = normalize(&[1.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(n.aut_order, 1);
        assert_eq!(n.forms.len(), 2);
        // Expand (z - 1/4)^4 + (z - 1/4)^3 by hand:
        // z^4 + (-1 + 1) z^3 + (6/16 - 3/4) z^2 + (-4/64 + 3/16) z + (1/256 - 1/64)
        let expected = [6.0 / 16.0 - 3.0 / 4.0, -4.0 / 64.0 + 3.0 / 16.0, 1.0 / 256.0 - 1.0 / 64.0];
        assert!(close(&n.forms[0], &expected));
        let mirrored = [expected[0], -expected[1], expected[2]];
        assert!(close(&n.forms[1], &mirrored));
        assert!(expected[1] != 0.0);
    }

    #[test]
    fn normalize_even_quartic() {
        let n = normalize(&[1.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(n.forms, vec![vec![1.0, 0.0, 0.0]]);
        assert_eq!(n.aut_order, 2);
    }

    #[test]
    fn normalize_negative_leading_even() {
        let n = normalize(&[-2.0, 0.0, 0.0]);
        assert_eq!(n.side, Side::NegativeLeading);
        assert_eq!(n.aut_order, 2);
        assert!(close(&n.forms[0], &[0.0]));
    }

    #[test]
    fn class_sign_rules() {
        assert_eq!(class_sign(&[-1], 3, Parity::Even).unwrap(), -1);
        assert_eq!(class_sign(&[1, 1], 4, Parity::Even).unwrap(), 1);
        assert!(matches!(class_sign(&[1, -1], 4, Parity::Even), Err(Error::SignMismatch(1, -1))));
        assert_eq!(class_sign(&[1, -1], 4, Parity::Odd).unwrap(), 0);
        assert_eq!(class_sign(&[-1], 4, Parity::Odd).unwrap(), -1);
    }

    #[test]
    fn degree_two_classes() {
        let cfg = RunConfig::default();
        let spec = BranchSpec::new(vec![Partition::full(2)], vec![5.0]).unwrap();
        let classes = covering_classes(&spec, &cfg).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].side, Side::PositiveLeading);
        assert!(close(&classes[0].representatives[0].coefficients, &[5.0]));
        assert_eq!(classes[1].side, Side::NegativeLeading);
        assert!(close(&classes[1].representatives[0].coefficients, &[-5.0]));
        for c in &classes {
            assert_eq!((c.aut_order, c.class_sign), (2, 1));
        }
        assert_eq!(real_hurwitz(&spec, &cfg).unwrap().value, Ratio::from_integer(1));
    }

    #[test]
    fn cubic_class() {
        let cfg = RunConfig::default();
        let spec = BranchSpec::new(vec![p(&[2, 1]), p(&[2, 1])], vec![-2.0, 2.0]).unwrap();
        let classes = covering_classes(&spec, &cfg).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!((classes[0].aut_order, classes[0].class_sign), (1, -1));
        assert_eq!(real_hurwitz(&spec, &cfg).unwrap().value, Ratio::from_integer(-1));
    }

    #[test]
    fn three_one_pair_cancels() {
        let cfg = RunConfig::default();
        let spec = BranchSpec::from_attachment(vec![p(&[3, 1]), p(&[2, 1, 1])], vec![28.0, 1.0]).unwrap();
        let classes = covering_classes(&spec, &cfg).unwrap();
        let positive: Vec<&CoveringClass> =
            classes.iter().filter(|c| c.side == Side::PositiveLeading).collect();
        assert_eq!(positive.len(), 1);
        assert_eq!(positive[0].representatives.len(), 2);
        assert_eq!(positive[0].aut_order, 1);
        assert_eq!(positive[0].class_sign, 0);
        let signs: Vec<i8> = positive[0].representatives.iter().map(|r| r.sign).collect();
        assert_eq!(signs.iter().map(|&s| i32::from(s)).sum::<i32>(), 0);

        let hr = real_hurwitz(&spec, &cfg).unwrap();
        assert_eq!(hr.value, Ratio::from_integer(0));
        assert_eq!(hr.reason, PARITY_ODD_REASON);
        assert!(hr.classes.is_none());
        let forced = real_hurwitz(&spec, &RunConfig { force_classes: true, ..cfg }).unwrap();
        assert_eq!(weighted_sum(forced.classes.as_ref().unwrap()), Ratio::from_integer(0));
    }

    #[test]
    fn theorem_examples() {
        let cfg = RunConfig::default();
        let spec = BranchSpec::new(vec![p(&[2, 1]), p(&[2, 1])], vec![-2.0, 2.0]).unwrap();
        let r = theorem_check(&spec, &cfg).unwrap();
        assert!(r.pass, "{:?}", r.failures);
        assert_eq!((r.s, r.hr), (-1, Ratio::from_integer(-1)));

        let spec = BranchSpec::from_attachment(vec![p(&[2, 1, 1]), p(&[2, 2])], vec![2.0, 1.0]).unwrap();
        let r = theorem_check(&spec, &cfg).unwrap();
        assert!(r.pass, "{:?}", r.failures);
        assert_eq!((r.s, r.s_reversed, r.half_sum), (0, Some(0), Some(Ratio::from_integer(0))));

        for d in 2..=5 {
            let spec = BranchSpec::new(vec![Partition::full(d)], vec![1.5]).unwrap();
            let r = theorem_check(&spec, &cfg).unwrap();
            assert!(r.pass, "{:?}", r.failures);
            assert_eq!((r.s, r.hr), (1, Ratio::from_integer(1)));
        }
    }

    #[test]
    fn corrupted_sign_fails_check() {
        let cfg = RunConfig { corrupt_sign: true, ..RunConfig::default() };
        let spec = BranchSpec::new(vec![p(&[2, 1]), p(&[2, 1])], vec![-2.0, 2.0]).unwrap();
        assert!(!theorem_check(&spec, &cfg).unwrap().pass);
    }
}
