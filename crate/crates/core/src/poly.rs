//! Dense univariate polynomial helpers. Coefficients are stored in ascending
//! degree order unless a function says otherwise.

use num_complex::Complex64;

/// Multiply `p` in place by `(z - r)`.
pub(crate) fn mul_linear(p: &mut Vec<Complex64>, r: Complex64) {
    p.push(Complex64::new(0.0, 0.0));
    for i in (0..p.len()).rev() {
        let lower = if i > 0 { p[i - 1] } else { Complex64::new(0.0, 0.0) };
        p[i] = lower - r * p[i];
    }
}

/// `∏ (z - rᵢ)^{mᵢ}`, monic.
pub(crate) fn from_roots(roots: impl IntoIterator<Item = (Complex64, usize)>) -> Vec<Complex64> {
    let mut p = vec![Complex64::new(1.0, 0.0)];
    for (r, m) in roots {
        for _ in 0..m {
            mul_linear(&mut p, r);
        }
    }
    p
}

/// Compose a real polynomial (descending coefficients) with `z ↦ s·z + b`,
/// returning descending coefficients.
pub(crate) fn compose_affine(desc: &[f64], s: f64, b: f64) -> Vec<f64> {
    // Horner in ascending form: acc = acc·(s z + b) + c.
    let mut acc: Vec<f64> = Vec::new();
    for &c in desc {
        let mut next = vec![0.0; acc.len() + 1];
        for (i, &a) in acc.iter().enumerate() {
            next[i] += a * b;
            next[i + 1] += a * s;
        }
        next[0] += c;
        acc = next;
    }
    acc.reverse();
    acc
}

pub(crate) fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |m, c| m.max(c.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn roots_expand() {
        // (z - 1)^2 (z + 2) = z^3 - 3z + 2
        let p = from_roots([(c(1.0), 2), (c(-2.0), 1)]);
        assert_eq!(p, vec![c(2.0), c(-3.0), c(0.0), c(1.0)]);
    }

    #[test]
    fn affine_composition() {
        // x^3 + 3x^2 at x = z - 1 is z^3 - 3z + 2.
        assert_eq!(compose_affine(&[1.0, 3.0, 0.0, 0.0], 1.0, -1.0), vec![1.0, 0.0, -3.0, 2.0]);
        // x^2 at x = 2z + 1 is 4z^2 + 4z + 1.
        assert_eq!(compose_affine(&[1.0, 0.0, 0.0], 2.0, 1.0), vec![4.0, 4.0, 1.0]);
    }
}
