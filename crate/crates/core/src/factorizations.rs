//! Complex polynomial Hurwitz numbers by counting factorizations of a full
//! cycle in the symmetric group.
//!
//! `N` is the number of tuples `(σ₁, …, σ_k)` with `σᵢ` of cycle type `λᵢ`
//! whose product is the fixed cycle `α₀ = (1 2 … d)`. This equals the number
//! of normalized complex polynomials with the given ramification, and the
//! Hurwitz number is `H = N / d`.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partitions::Partition;

/// A permutation of `{0, …, d-1}` stored by images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u8>,
}

impl Perm {
    pub fn identity(d: usize) -> Self {
        Self { images: (0..d as u8).collect() }
    }

    /// Panics unless `images` is a bijection of `0..images.len()`.
    pub fn from_images(images: Vec<usize>) -> Self {
        let d = images.len();
        let mut seen = vec![false; d];
        for &i in &images {
            assert!(i < d && !seen[i], "not a permutation: {images:?}");
            seen[i] = true;
        }
        Self { images: images.into_iter().map(|i| i as u8).collect() }
    }

    /// Build from disjoint cycles over `0..d`.
    pub fn from_cycles(d: usize, cycles: &[&[usize]]) -> Self {
        let mut images: Vec<usize> = (0..d).collect();
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                images[x] = c[(i + 1) % c.len()];
            }
        }
        Self::from_images(images)
    }

    /// The cycle `0 -> 1 -> … -> d-1 -> 0`.
    pub fn full_cycle(d: usize) -> Self {
        Self { images: (0..d).map(|i| ((i + 1) % d) as u8).collect() }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.images.iter().map(|&i| i as usize)
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0u8; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j as usize] = i as u8;
        }
        Perm { images }
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm { images: self.images.iter().map(|&i| other.images[i as usize]).collect() }
    }

    /// `g⁻¹ · self · g` in the `then` convention.
    pub fn conjugate_by(&self, g: &Perm) -> Perm {
        g.inverse().then(self).then(g)
    }

    pub fn cycle_count(&self) -> usize {
        cycle_count(&self.images)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.images.len();
        let mut seen = vec![false; d];
        for start in 0..d {
            if seen[start] {
                continue;
            }
            f.write_str("(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{}", x + 1)?;
                first = false;
                x = self.images[x] as usize;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn cycle_count(images: &[u8]) -> usize {
    let mut seen = [false; 256];
    let mut count = 0;
    for start in 0..images.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = images[x] as usize;
        }
    }
    count
}

fn cycle_lengths(images: &[u8]) -> Vec<usize> {
    let mut seen = vec![false; images.len()];
    let mut lengths = Vec::new();
    for start in 0..images.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            len += 1;
            x = images[x] as usize;
        }
        lengths.push(len);
    }
    lengths
}

pub fn cycle_type(p: &Perm) -> Partition {
    Partition::new(cycle_lengths(&p.images)).expect("a permutation of d >= 1 symbols")
}

/// Every permutation of cycle type `lambda`, each exactly once.
///
/// The cycle through the smallest unused symbol is chosen first: its length
/// ranges over the distinct remaining part sizes and its remaining symbols
/// over ordered selections of unused symbols.
pub fn enumerate_class(d: usize, lambda: &Partition) -> Vec<Perm> {
    assert_eq!(lambda.degree(), d, "partition must have degree {d}");
    let mut remaining: Vec<(usize, usize)> = lambda.multiplicities();
    let mut images = vec![0u8; d];
    let mut used = vec![false; d];
    let mut out = Vec::with_capacity(lambda.class_size() as usize);
    fill(&mut remaining, &mut images, &mut used, &mut out);
    out
}

fn fill(
    remaining: &mut [(usize, usize)],
    images: &mut [u8],
    used: &mut [bool],
    out: &mut Vec<Perm>,
) {
    let Some(start) = used.iter().position(|u| !u) else {
        out.push(Perm { images: images.to_vec() });
        return;
    };
    for slot in 0..remaining.len() {
        let (len, count) = remaining[slot];
        if count == 0 {
            continue;
        }
        remaining[slot].1 -= 1;
        used[start] = true;
        let mut cycle = vec![start];
        extend_cycle(len, &mut cycle, remaining, images, used, out);
        used[start] = false;
        remaining[slot].1 += 1;
    }
}

fn extend_cycle(
    len: usize,
    cycle: &mut Vec<usize>,
    remaining: &mut [(usize, usize)],
    images: &mut [u8],
    used: &mut [bool],
    out: &mut Vec<Perm>,
) {
    if cycle.len() == len {
        for (i, &x) in cycle.iter().enumerate() {
            images[x] = cycle[(i + 1) % len] as u8;
        }
        fill(remaining, images, used, out);
        return;
    }
    for next in 0..used.len() {
        if used[next] {
            continue;
        }
        used[next] = true;
        cycle.push(next);
        extend_cycle(len, cycle, remaining, images, used, out);
        cycle.pop();
        used[next] = false;
    }
}

/// Exact factorization count and Hurwitz number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HurwitzCount {
    pub degree: usize,
    pub n: u64,
    #[serde(serialize_with = "crate::serialize_ratio")]
    pub h: Ratio<i64>,
    /// Tuples visited by the search, after pruning.
    pub visited: u64,
}

/// Count factorizations, reordering the profiles by class size first.
///
/// The largest class goes last so that it is determined by the others, and
/// the smaller classes are branched on first.
pub fn count_factorizations(profiles: &[Partition], budget: u64) -> Result<HurwitzCount> {
    let mut order: Vec<Partition> = profiles.to_vec();
    order.sort_by_key(Partition::class_size);
    count_ordered(&order, &Perm::full_cycle(profiles_degree(profiles)?), budget)
}

fn profiles_degree(profiles: &[Partition]) -> Result<usize> {
    let d = profiles
        .first()
        .ok_or_else(|| Error::InvalidSpec("no profiles".into()))?
        .degree();
    if profiles.iter().any(|p| p.degree() != d) {
        return Err(Error::InvalidSpec("profiles of mixed degree".into()));
    }
    if d > 64 {
        return Err(Error::ScaleExceeded { degree: d, bound: 64 });
    }
    let total: usize = profiles.iter().map(Partition::len).sum();
    if total != (profiles.len() - 1) * d + 1 {
        return Err(Error::InvalidSpec(format!(
            "length constraint violated: sum of lengths {total} != (k-1)d+1"
        )));
    }
    Ok(d)
}

/// Count tuples in the given profile order with product equal to `target`,
/// which must be a `d`-cycle.
///
/// The search keeps only partial products whose cycle count is exactly
/// `d - Σ (d - l(λᵢ))` over the factors placed so far: each factor of type λ
/// moves the cycle count by at most `d - l(λ)`, and the length constraint
/// leaves no slack to reach a single cycle at the end.
pub fn count_ordered(profiles: &[Partition], target: &Perm, budget: u64) -> Result<HurwitzCount> {
    let d = profiles_degree(profiles)?;
    assert_eq!(target.degree(), d);
    assert_eq!(target.cycle_count(), 1, "target must be a full cycle");
    let k = profiles.len();
    let last = &profiles[k - 1];

    let n = if k == 1 {
        u64::from(cycle_type(target) == *last)
    } else {
        let classes: Vec<Vec<Perm>> =
            profiles[..k - 1].iter().map(|p| enumerate_class(d, p)).collect();
        let mut expected_cycles = Vec::with_capacity(k - 1);
        let mut c = d;
        for p in &profiles[..k - 1] {
            c -= d - p.len();
            expected_cycles.push(c);
        }
        let visited = AtomicU64::new(0);
        let search = Search {
            classes: &classes,
            expected_cycles: &expected_cycles,
            last_type: last.parts(),
            target,
            visited: &visited,
            budget,
        };
        let counts: Vec<Option<u64>> = classes[0]
            .par_iter()
            .map(|first| search.count_from(first))
            .collect();
        if counts.iter().any(Option::is_none) || visited.load(Ordering::Relaxed) > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        let n = counts.into_iter().map(|c| c.unwrap_or(0)).sum();
        return Ok(HurwitzCount {
            degree: d,
            n,
            h: Ratio::new(n as i64, d as i64),
            visited: visited.into_inner(),
        });
    };
    Ok(HurwitzCount { degree: d, n, h: Ratio::new(n as i64, d as i64), visited: 1 })
}

struct Search<'a> {
    classes: &'a [Vec<Perm>],
    expected_cycles: &'a [usize],
    last_type: &'a [usize],
    target: &'a Perm,
    visited: &'a AtomicU64,
    budget: u64,
}

impl Search<'_> {
    fn count_from(&self, first: &Perm) -> Option<u64> {
        if first.cycle_count() != self.expected_cycles[0] {
            return Some(0);
        }
        let mut local = 0u64;
        let count = self.descend(1, &first.images, &mut local)?;
        self.flush(&mut local)?;
        Some(count)
    }

    fn flush(&self, local: &mut u64) -> Option<()> {
        let total = self.visited.fetch_add(*local, Ordering::Relaxed) + *local;
        *local = 0;
        (total <= self.budget).then_some(())
    }

    fn descend(&self, depth: usize, product: &[u8], local: &mut u64) -> Option<u64> {
        *local += 1;
        if *local >= 4096 {
            self.flush(local)?;
        }
        if depth == self.classes.len() {
            // The closing factor maps product(x) to α₀(x).
            let mut last = vec![0u8; product.len()];
            for (x, &px) in product.iter().enumerate() {
                last[px as usize] = self.target.images[x];
            }
            let mut lengths = cycle_lengths(&last);
            lengths.sort_unstable_by(|a, b| b.cmp(a));
            return Some(u64::from(lengths == self.last_type));
        }
        let mut total = 0;
        let mut next = vec![0u8; product.len()];
        for sigma in &self.classes[depth] {
            for (x, &px) in product.iter().enumerate() {
                next[x] = sigma.images[px as usize];
            }
            if cycle_count(&next) == self.expected_cycles[depth] {
                total += self.descend(depth + 1, &next, local)?;
            }
        }
        Some(total)
    }
}
