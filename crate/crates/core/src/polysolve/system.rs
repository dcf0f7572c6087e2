use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::partitions::BranchSpec;
use crate::poly::{from_roots, mul_linear};

/// The square polynomial system whose solutions are the normalized
/// polynomials with the prescribed ramification.
///
/// Unknowns are the preimage roots `ρ_{i,j}`, one per part `λ_{i,j}`, laid
/// out branch by branch in partition order. Writing
/// `Q_i = ∏_j (z - ρ_{i,j})^{λ_{i,j}}`, the equations are
///
/// * row 0: the `z^{d-1}` coefficient of `Q_0`, which must vanish;
/// * rows `1 + (i-1)d + c` for `i ≥ 1`, `c < d`: the `z^c` coefficient of
///   `(Q_i + w_i) - (Q_0 + w_0)`.
#[derive(Clone, Debug)]
pub struct SystemSpec {
    spec: BranchSpec,
    orders: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    unknowns: usize,
}

pub fn build_system(spec: &BranchSpec) -> SystemSpec {
    let orders: Vec<Vec<usize>> = spec.profiles().iter().map(|p| p.parts().to_vec()).collect();
    let mut offsets = Vec::with_capacity(orders.len());
    let mut unknowns = 0;
    for o in &orders {
        offsets.push(unknowns);
        unknowns += o.len();
    }
    SystemSpec { spec: spec.clone(), orders, offsets, unknowns }
}

impl SystemSpec {
    pub fn spec(&self) -> &BranchSpec {
        &self.spec
    }

    pub fn num_unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn num_equations(&self) -> usize {
        1 + (self.orders.len() - 1) * self.spec.degree()
    }

    pub fn degree(&self) -> usize {
        self.spec.degree()
    }

    /// Ramification orders of branch `i`, in unknown order.
    pub fn orders(&self, i: usize) -> &[usize] {
        &self.orders[i]
    }

    /// Index range of branch `i`'s unknowns.
    pub fn branch_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i] + self.orders[i].len()
    }

    pub fn k(&self) -> usize {
        self.orders.len()
    }

    fn branch_poly(&self, i: usize, x: &[Complex64]) -> Vec<Complex64> {
        let roots = &x[self.branch_range(i)];
        from_roots(roots.iter().copied().zip(self.orders[i].iter().copied()))
    }

    /// Coefficients `a_2, …, a_d` of `Q_0 + w_0`, i.e. the coefficients of
    /// `z^{d-2}, …, z^0`.
    pub fn coefficients(&self, x: &[Complex64]) -> Vec<Complex64> {
        let d = self.degree();
        let mut p = self.branch_poly(0, x);
        p[0] += self.spec.values()[0];
        (0..d - 1).rev().map(|e| p[e]).collect()
    }

    pub fn residual(&self, x: &[Complex64]) -> DVector<Complex64> {
        assert_eq!(x.len(), self.unknowns);
        let d = self.degree();
        let w = self.spec.values();
        let mut f = DVector::zeros(self.num_equations());
        let base = self.branch_poly(0, x);
        f[0] = base[d - 1];
        for i in 1..self.k() {
            let q = self.branch_poly(i, x);
            for c in 0..d {
                let mut v = q[c] - base[c];
                if c == 0 {
                    v += w[i] - w[0];
                }
                f[1 + (i - 1) * d + c] = v;
            }
        }
        f
    }

    /// Residual and analytic Jacobian at `x`.
    pub fn residual_and_jacobian(
        &self,
        x: &[Complex64],
    ) -> (DVector<Complex64>, DMatrix<Complex64>) {
        let f = self.residual(x);
        let d = self.degree();
        let mut jac = DMatrix::zeros(self.num_equations(), self.unknowns);
        for i in 0..self.k() {
            let range = self.branch_range(i);
            for (j, col) in range.clone().enumerate() {
                let deriv = self.root_derivative(i, j, x);
                if i == 0 {
                    jac[(0, col)] = deriv[d - 1];
                    for b in 1..self.k() {
                        for c in 0..d {
                            jac[(1 + (b - 1) * d + c, col)] = -deriv[c];
                        }
                    }
                } else {
                    for c in 0..d {
                        jac[(1 + (i - 1) * d + c, col)] = deriv[c];
                    }
                }
            }
        }
        (f, jac)
    }

    /// `∂Q_i/∂ρ_{i,j} = -m (z-ρ)^{m-1} ∏_{j'≠j} (z-ρ_{i,j'})^{m'}`, ascending,
    /// padded to length `d`.
    fn root_derivative(&self, i: usize, j: usize, x: &[Complex64]) -> Vec<Complex64> {
        let range = self.branch_range(i);
        let roots = &x[range];
        let orders = &self.orders[i];
        let mut p = vec![Complex64::new(1.0, 0.0)];
        for (jj, (&r, &m)) in roots.iter().zip(orders).enumerate() {
            let reps = if jj == j { m - 1 } else { m };
            for _ in 0..reps {
                mul_linear(&mut p, r);
            }
        }
        let scale = -(orders[j] as f64);
        let mut out: Vec<Complex64> = p.into_iter().map(|c| c * scale).collect();
        out.resize(self.degree(), Complex64::new(0.0, 0.0));
        out
    }
}
