//! Integer partitions, their parity statistics, and validated branch data.
//!
//! Text formats: a partition is written `"a,b,c"`, a list of profiles
//! `"a,b|c,d"`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An integer partition with parts stored in non-increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::EmptyPartition);
        }
        if parts.contains(&0) {
            return Err(Error::NonPositivePart(0));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { parts })
    }

    /// The one-row partition `(d)`.
    pub fn full(d: usize) -> Self {
        Self { parts: vec![d] }
    }

    /// `(1^d)`, which imposes no ramification.
    pub fn trivial(d: usize) -> Self {
        Self { parts: vec![1; d] }
    }

    /// `(2, 1^{d-2})`, the profile of a simple branch point.
    pub fn simple(d: usize) -> Self {
        assert!(d >= 2, "a simple profile needs degree at least 2");
        let mut parts = vec![2];
        parts.resize(d - 1, 1);
        Self { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Sum of the parts.
    pub fn degree(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of parts, `l(λ)`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.iter().all(|&p| p == 1)
    }

    /// Multiplicities as `(part, count)` pairs, largest part first.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((q, c)) if *q == p => *c += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// Number of distinct part values occurring an odd number of times.
    pub fn o_count(&self) -> usize {
        self.multiplicities().iter().filter(|(_, c)| c % 2 == 1).count()
    }

    /// Subtract one from every part and drop the zeros. `None` when nothing
    /// is left.
    pub fn reduce(&self) -> Option<Partition> {
        let parts: Vec<usize> = self.parts.iter().filter(|&&p| p > 1).map(|p| p - 1).collect();
        (!parts.is_empty()).then_some(Partition { parts })
    }

    /// `λ ∪ (1^m)`.
    pub fn with_ones(&self, m: usize) -> Partition {
        let mut parts = self.parts.clone();
        parts.resize(parts.len() + m, 1);
        Partition { parts }
    }

    /// Size of the conjugacy class of this cycle type in `S_d`.
    pub fn class_size(&self) -> u128 {
        let d = self.degree() as u128;
        let mut num: u128 = (1..=d).product();
        for (part, count) in self.multiplicities() {
            num /= (part as u128).pow(count as u32);
            num /= (1..=count as u128).product::<u128>();
        }
        num
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(Error::EmptyPartition);
        }
        let mut parts = Vec::new();
        for token in trimmed.split(',') {
            let value: i64 = token.trim().parse().map_err(|_| Error::MalformedToken {
                text: text.to_string(),
                token: token.to_string(),
            })?;
            if value <= 0 {
                return Err(Error::NonPositivePart(value));
            }
            parts.push(value as usize);
        }
        Partition::new(parts)
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

pub fn parse_partition(text: &str) -> Result<Partition> {
    text.parse()
}

/// Parse `"a,b|c,d|..."`.
pub fn parse_profiles(text: &str) -> Result<Vec<Partition>> {
    text.split('|').map(parse_partition).collect()
}

pub fn format_profiles(profiles: &[Partition]) -> String {
    profiles.iter().map(Partition::to_string).collect::<Vec<_>>().join("|")
}

/// Parse a comma-separated list of reals.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|_| Error::MalformedToken {
                text: text.to_string(),
                token: tok.to_string(),
            })
        })
        .collect()
}

pub fn o_count(lambda: &Partition) -> usize {
    lambda.o_count()
}

pub fn reduce_partition(lambda: &Partition) -> Option<Partition> {
    lambda.reduce()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }
}

/// Σ ⌊o(λᵢ)/2⌋ over the profiles.
pub fn floor_sum(profiles: &[Partition]) -> usize {
    profiles.iter().map(|p| p.o_count() / 2).sum()
}

pub fn floor_sum_parity(profiles: &[Partition]) -> Parity {
    Parity::of(floor_sum(profiles))
}

/// Profiles attached to strictly increasing real branch values.
///
/// Construction enforces a common degree, the genus-zero length constraint
/// `Σ l(λᵢ) = (k-1)d + 1`, `k < d`, and drops trivial profiles `(1^d)`
/// together with their values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchSpec {
    profiles: Vec<Partition>,
    values: Vec<f64>,
    degree: usize,
}

impl BranchSpec {
    /// Validate profiles against branch values given in increasing order.
    pub fn new(profiles: Vec<Partition>, values: Vec<f64>) -> Result<Self> {
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidSpec(format!(
                "branch values must be strictly increasing, got {values:?}"
            )));
        }
        Self::canonicalize(profiles, values)
    }

    /// Accept the attachment profile ↦ value in any order; pairs are sorted by
    /// value before validation. Values must be pairwise distinct.
    pub fn from_attachment(profiles: Vec<Partition>, values: Vec<f64>) -> Result<Self> {
        if profiles.len() != values.len() {
            return Err(Error::InvalidSpec(format!(
                "{} profiles but {} values",
                profiles.len(),
                values.len()
            )));
        }
        let mut pairs: Vec<(Partition, f64)> = profiles.into_iter().zip(values).collect();
        pairs.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (profiles, values) = pairs.into_iter().unzip();
        Self::new(profiles, values)
    }

    /// Attach the profiles to the default values `1, 2, ..., k`.
    pub fn with_default_values(profiles: Vec<Partition>) -> Result<Self> {
        let values = (1..=profiles.len()).map(|i| i as f64).collect();
        Self::new(profiles, values)
    }

    fn canonicalize(profiles: Vec<Partition>, values: Vec<f64>) -> Result<Self> {
        if profiles.is_empty() {
            return Err(Error::InvalidSpec("at least one profile is required".into()));
        }
        if profiles.len() != values.len() {
            return Err(Error::InvalidSpec(format!(
                "{} profiles but {} values",
                profiles.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec(format!("non-finite branch value {v}")));
        }
        let degree = profiles[0].degree();
        if let Some(p) = profiles.iter().find(|p| p.degree() != degree) {
            return Err(Error::InvalidSpec(format!(
                "mixed degrees: ({}) has degree {} but ({}) has degree {degree}",
                p,
                p.degree(),
                profiles[0]
            )));
        }
        let (profiles, values): (Vec<_>, Vec<_>) = profiles
            .into_iter()
            .zip(values)
            .filter(|(p, _)| !p.is_trivial())
            .unzip();
        if profiles.is_empty() {
            return Err(Error::InvalidSpec(format!(
                "all profiles are trivial (degree {degree})"
            )));
        }
        let k = profiles.len();
        let total: usize = profiles.iter().map(Partition::len).sum();
        if total != (k - 1) * degree + 1 {
            return Err(Error::InvalidSpec(format!(
                "length constraint violated: sum of lengths {total} != (k-1)d+1 = {}",
                (k - 1) * degree + 1
            )));
        }
        if k >= degree {
            return Err(Error::InvalidSpec(format!("need k < d, got k={k}, d={degree}")));
        }
        Ok(Self { profiles, values, degree })
    }

    pub fn profiles(&self) -> &[Partition] {
        &self.profiles
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn k(&self) -> usize {
        self.profiles.len()
    }

    pub fn floor_sum_parity(&self) -> Parity {
        floor_sum_parity(&self.profiles)
    }

    /// Profiles reversed, values negated and reversed: the data of `-P`.
    pub fn reversed(&self) -> BranchSpec {
        BranchSpec {
            profiles: self.profiles.iter().rev().cloned().collect(),
            values: self.values.iter().rev().map(|v| -v).collect(),
            degree: self.degree,
        }
    }

    /// Same profiles at new increasing values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<BranchSpec> {
        BranchSpec::new(self.profiles.clone(), values)
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Canonical text key, e.g. `2,1|2,1@-2,2`.
    pub fn key(&self) -> String {
        let values: Vec<String> = self.values.iter().map(|v| format!("{v:?}")).collect();
        format!("{}@{}", format_profiles(&self.profiles), values.join(","))
    }
}

/// All partitions of `d`, in reverse lexicographic order.
pub fn partitions_of(d: usize) -> Vec<Partition> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        rec(d, d, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn parse_examples() {
        let a = parse_partition("2,1").unwrap();
        assert_eq!(a.parts(), &[2, 1]);
        assert_eq!(a.degree(), 3);
        let b = parse_partition("1,3").unwrap();
        assert_eq!(b.parts(), &[3, 1]);
        assert_eq!(b.degree(), 4);
        assert_eq!(parse_partition("4").unwrap().parts(), &[4]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_partition("2,x"), Err(Error::MalformedToken { .. })));
        assert!(matches!(parse_partition("2,0"), Err(Error::NonPositivePart(0))));
        assert!(matches!(parse_partition("-1"), Err(Error::NonPositivePart(-1))));
        assert!(matches!(parse_partition(""), Err(Error::EmptyPartition)));
        assert!(parse_partition("2,,1").is_err());
    }

    #[test]
    fn profile_list_round_trip() {
        let profiles = parse_profiles("2,1,1|2,2").unwrap();
        assert_eq!(profiles, vec![p(&[2, 1, 1]), p(&[2, 2])]);
        assert_eq!(format_profiles(&profiles), "2,1,1|2,2");
    }

    #[test]
    fn o_count_examples() {
        assert_eq!(o_count(&p(&[2, 2])), 0);
        assert_eq!(o_count(&p(&[3, 1])), 2);
        assert_eq!(o_count(&p(&[2, 1, 1])), 1);
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce_partition(&p(&[3, 1])), Some(p(&[2])));
        assert_eq!(reduce_partition(&p(&[1, 1, 1])), None);
        assert_eq!(reduce_partition(&p(&[2, 2, 1])), Some(p(&[1, 1])));
    }

    #[test]
    fn floor_sum_parity_examples() {
        assert_eq!(floor_sum_parity(&[p(&[2, 1]), p(&[2, 1])]), Parity::Even);
        // o(3,1) = 2, o(2,1,1) = 1: floors 1 + 0.
        assert_eq!(floor_sum_parity(&[p(&[3, 1]), p(&[2, 1, 1])]), Parity::Odd);
        assert_eq!(floor_sum_parity(&[p(&[2, 1, 1]), p(&[2, 2])]), Parity::Even);
    }

    #[test]
    fn validate_examples() {
        let spec = BranchSpec::new(vec![p(&[2, 1]), p(&[2, 1])], vec![-2.0, 2.0]).unwrap();
        assert_eq!(spec.degree(), 3);
        assert_eq!(spec.k(), 2);

        let spec =
            BranchSpec::new(vec![p(&[1, 1, 1]), p(&[2, 1]), p(&[2, 1])], vec![0.0, 1.0, 2.0])
                .unwrap();
        assert_eq!(spec.profiles(), &[p(&[2, 1]), p(&[2, 1])]);
        assert_eq!(spec.values(), &[1.0, 2.0]);

        let err = BranchSpec::new(vec![p(&[2, 2]), p(&[2, 2])], vec![1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec(_)));
    }

    #[test]
    fn validate_errors() {
        assert!(BranchSpec::new(vec![p(&[2, 1]), p(&[2, 2])], vec![1.0, 2.0]).is_err());
        assert!(BranchSpec::new(vec![p(&[2, 1]), p(&[2, 1])], vec![2.0, 1.0]).is_err());
        assert!(BranchSpec::new(vec![p(&[2, 1]), p(&[2, 1])], vec![1.0, 1.0]).is_err());
        assert!(BranchSpec::new(vec![p(&[1, 1])], vec![1.0]).is_err());
        assert!(BranchSpec::new(vec![p(&[1])], vec![1.0]).is_err());
        assert!(BranchSpec::new(vec![p(&[2, 1])], vec![f64::NAN]).is_err());
    }

    #[test]
    fn attachment_sorts_by_value() {
        let spec =
            BranchSpec::from_attachment(vec![p(&[2, 1, 1]), p(&[2, 2])], vec![2.0, 1.0]).unwrap();
        assert_eq!(spec.profiles(), &[p(&[2, 2]), p(&[2, 1, 1])]);
        assert_eq!(spec.values(), &[1.0, 2.0]);
        assert!(BranchSpec::from_attachment(vec![p(&[2, 1]), p(&[2, 1])], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn reversed_spec() {
        let spec = BranchSpec::new(vec![p(&[3, 1]), p(&[2, 1, 1])], vec![1.0, 28.0]).unwrap();
        let rev = spec.reversed();
        assert_eq!(rev.profiles(), &[p(&[2, 1, 1]), p(&[3, 1])]);
        assert_eq!(rev.values(), &[-28.0, -1.0]);
        assert_eq!(rev.reversed(), spec);
    }

    #[test]
    fn class_sizes() {
        assert_eq!(p(&[2, 1]).class_size(), 3);
        assert_eq!(p(&[2, 2]).class_size(), 3);
        assert_eq!(p(&[4]).class_size(), 6);
        assert_eq!(p(&[1, 1, 1, 1]).class_size(), 1);
        let total: u128 = partitions_of(6).iter().map(Partition::class_size).sum();
        assert_eq!(total, 720);
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (1..=8).map(|d| partitions_of(d).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22]);
    }

    fn arb_partition() -> impl Strategy<Value = Partition> {
        prop::collection::vec(1usize..6, 1..8).prop_map(|v| Partition::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn o_count_has_parity_of_length(lambda in arb_partition()) {
            prop_assert_eq!(lambda.o_count() % 2, lambda.len() % 2);
        }

        #[test]
        fn reduce_drops_length_from_degree(lambda in arb_partition()) {
            let reduced = lambda.reduce().map_or(0, |r| r.degree());
            prop_assert_eq!(reduced + lambda.len(), lambda.degree());
        }

        #[test]
        fn validation_is_idempotent(d in 2usize..7, pick in 0usize..1000) {
            let simple: Vec<Partition> = vec![Partition::simple(d); d - 1];
            let mut profiles = simple;
            // Optionally merge in a trivial profile, which must be dropped.
            let mut values: Vec<f64> = (0..profiles.len()).map(|i| i as f64).collect();
            if pick % 2 == 0 {
                profiles.insert(0, Partition::trivial(d));
                values.insert(0, -1.0);
            }
            let spec = BranchSpec::new(profiles, values).unwrap();
            let again = BranchSpec::new(spec.profiles().to_vec(), spec.values().to_vec()).unwrap();
            prop_assert_eq!(spec, again);
        }
    }
}
