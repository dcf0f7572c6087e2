use nalgebra::DVector;
use num_complex::Complex64;

use super::system::SystemSpec;
use crate::poly::max_abs;

/// A Newton run that met the step criterion.
pub(crate) struct Converged {
    pub x: Vec<Complex64>,
    pub residual: f64,
}

const STEP_TOL: f64 = 1e-13;
const MAX_HALVINGS: usize = 30;

fn norm(v: &DVector<Complex64>) -> f64 {
    max_abs(v.as_slice())
}

/// Damped Newton: halve the step until the residual decreases; stop when the
/// accepted step is below `1e-13` relative to the iterate. Returns `None` on
/// a singular Jacobian, divergence past `bound`, or no convergence within
/// `max_iter` iterations.
pub(crate) fn damped_newton(
    sys: &SystemSpec,
    x0: Vec<Complex64>,
    max_iter: usize,
    bound: f64,
    residual_tol: f64,
) -> Option<Converged> {
    let mut x = DVector::from_vec(x0);
    let (mut f, mut jac) = sys.residual_and_jacobian(x.as_slice());
    let mut fnorm = norm(&f);
    for _ in 0..max_iter {
        let dx = jac.clone().lu().solve(&(-&f))?;
        if dx.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return None;
        }
        let step = norm(&dx);
        let xnorm = norm(&x);
        if step <= STEP_TOL * (1.0 + xnorm) {
            return Some(Converged { x: x.as_slice().to_vec(), residual: fnorm });
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial = &x + &dx * Complex64::new(alpha, 0.0);
            let ft = sys.residual(trial.as_slice());
            let tn = norm(&ft);
            if tn.is_finite() && tn < fnorm {
                accepted = Some((trial, tn));
                break;
            }
            alpha *= 0.5;
        }
        let Some((trial, tn)) = accepted else {
            // No decrease is possible at rounding level.
            return (fnorm <= residual_tol)
                .then(|| Converged { x: x.as_slice().to_vec(), residual: fnorm });
        };
        let moved = alpha * step;
        x = trial;
        if norm(&x) > bound {
            return None;
        }
        if moved <= STEP_TOL * (1.0 + norm(&x)) {
            return Some(Converged { x: x.as_slice().to_vec(), residual: tn });
        }
        let (f2, j2) = sys.residual_and_jacobian(x.as_slice());
        f = f2;
        jac = j2;
        fnorm = tn;
    }
    None
}

/// A few undamped steps from a point already close to a solution, keeping
/// the best iterate.
pub(crate) fn polish(sys: &SystemSpec, x0: &[Complex64], steps: usize) -> (Vec<Complex64>, f64) {
    let mut best = x0.to_vec();
    let mut best_res = norm(&sys.residual(&best));
    let mut x = DVector::from_vec(x0.to_vec());
    for _ in 0..steps {
        let (f, jac) = sys.residual_and_jacobian(x.as_slice());
        let Some(dx) = jac.lu().solve(&(-f)) else { break };
        x += dx;
        let r = norm(&sys.residual(x.as_slice()));
        if !r.is_finite() {
            break;
        }
        if r < best_res {
            best_res = r;
            best = x.as_slice().to_vec();
        }
    }
    (best, best_res)
}
