//! Damped Newton solver for the regularized-leader step.

use crate::error::{Error, Result};
use crate::linalg;

use super::barrier::Barrier;
use super::{ARGMIN_TOL, BOUNDARY_TOL, MAX_NEWTON_ITERS};

const ARMIJO_DECREASE: f64 = 1e-4;
const ARMIJO_SHRINK: f64 = 0.5;

/// Diagnostics from one argmin solve.
#[derive(Debug, Clone)]
pub struct NewtonTrace {
    pub x: Vec<f64>,
    /// First-order residual after each accepted step, starting with the
    /// residual at the warm start.
    pub residuals: Vec<f64>,
}

/// Minimizes `<-eta * accumulated, x> + barrier(x)` by damped Newton steps
/// with Armijo backtracking, starting from an interior warm start.
///
/// The returned point satisfies `|| -eta*accumulated + grad barrier || <= 1e-8`
/// and keeps every barrier argument at least `1e-12`. Deterministic given its
/// inputs.
pub fn rftl_argmin<B: Barrier>(
    barrier: &B,
    accumulated: &[f64],
    eta: f64,
    warm_start: &[f64],
) -> Result<Vec<f64>> {
    rftl_argmin_traced(barrier, accumulated, eta, warm_start).map(|t| t.x)
}

/// As [`rftl_argmin`], also reporting the per-step residual history.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN eta
pub fn rftl_argmin_traced<B: Barrier>(
    barrier: &B,
    accumulated: &[f64],
    eta: f64,
    warm_start: &[f64],
) -> Result<NewtonTrace> {
    if !(eta > 0.0) {
        return Err(Error::Parameter(format!("eta must be positive, got {eta}")));
    }
    let domain = barrier.domain();
    domain.require_interior(warm_start, BOUNDARY_TOL)?;
    // linear part of the objective: <c, x> with c = -eta * accumulated.
    let c: Vec<f64> = accumulated.iter().map(|g| -eta * g).collect();

    let mut x = warm_start.to_vec();
    let mut phi = barrier.value(&x)?;
    let mut residuals = Vec::new();
    for _iter in 0..MAX_NEWTON_ITERS {
        let grad_phi = barrier.gradient(&x)?;
        let r: Vec<f64> = grad_phi.iter().zip(&c).map(|(g, ci)| g + ci).collect();
        let res = linalg::norm2(&r);
        residuals.push(res);
        if res <= ARGMIN_TOL {
            return Ok(NewtonTrace { x, residuals });
        }
        let mut step = barrier.hessian_solve(&x, &r)?;
        for s in &mut step {
            *s = -*s;
        }
        let mut slope = linalg::dot(&r, &step);
        if !slope.is_finite() {
            return Err(Error::Numeric("non-finite Newton direction".into()));
        }
        if slope >= 0.0 {
            // The solve lost positive definiteness to rounding (extreme
            // boundary conditioning); fall back to steepest descent.
            for (s, ri) in step.iter_mut().zip(&r) {
                *s = -ri;
            }
            slope = -linalg::dot(&r, &r);
        }
        let t_max = max_feasible_step(domain, &x, &step);
        // Newton decrement; inside the quadratic-convergence region the full
        // step is taken without a line search (the Armijo decrease there is
        // below floating-point resolution).
        let decrement = (-slope).sqrt();
        if decrement <= 0.25 {
            let t = t_max.min(1.0);
            let cand: Vec<f64> = x.iter().zip(&step).map(|(xi, si)| xi + t * si).collect();
            domain.require_interior(&cand, BOUNDARY_TOL)?;
            x = cand;
            phi = barrier.value(&x)?;
            continue;
        }
        let mut t = t_max.min(1.0);
        let obj = |pt: &[f64]| -> Result<f64> { Ok(linalg::dot(&c, pt) + barrier.value(pt)?) };
        let mut accepted = false;
        while t > 1e-18 {
            let cand: Vec<f64> = x.iter().zip(&step).map(|(xi, si)| xi + t * si).collect();
            if domain.require_interior(&cand, BOUNDARY_TOL).is_ok() {
                let val = obj(&cand)?;
                if val <= linalg::dot(&c, &x) + phi + ARMIJO_DECREASE * t * slope {
                    x = cand;
                    phi = barrier.value(&x)?;
                    accepted = true;
                    break;
                }
            }
            t *= ARMIJO_SHRINK;
        }
        if !accepted {
            return Err(Error::Convergence {
                iters: residuals.len(),
                residual: res,
            });
        }
    }
    let grad_phi = barrier.gradient(&x)?;
    let r: Vec<f64> = grad_phi.iter().zip(&c).map(|(g, ci)| g + ci).collect();
    let res = linalg::norm2(&r);
    if res <= ARGMIN_TOL {
        residuals.push(res);
        return Ok(NewtonTrace { x, residuals });
    }
    Err(Error::Convergence {
        iters: MAX_NEWTON_ITERS,
        residual: res,
    })
}

/// Largest step in direction `step` keeping every barrier argument at least
/// the boundary tolerance.
fn max_feasible_step(
    domain: &super::domain::ProductSimplexDomain,
    x: &[f64],
    step: &[f64],
) -> f64 {
    let mut t = f64::INFINITY;
    for (xi, si) in x.iter().zip(step) {
        if *si < 0.0 {
            t = t.min((xi - BOUNDARY_TOL) / -si);
        }
    }
    for b in 0..domain.num_blocks() {
        let dsum: f64 = step[domain.block_range(b)].iter().sum();
        if dsum > 0.0 {
            let slack = 1.0 - domain.block_sum(x, b);
            t = t.min((slack - BOUNDARY_TOL) / dsum);
        }
    }
    t.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ProductSimplexBarrier, ProductSimplexDomain};
    use crate::sampling::RandomStream;

    #[test]
    fn zero_accumulated_returns_analytic_center() {
        let dom = ProductSimplexDomain::new(vec![2, 3]).unwrap();
        let bar = ProductSimplexBarrier::new(dom.clone());
        let warm = {
            let mut s = RandomStream::new(1);
            dom.sample_interior(&mut s, 1e-2)
        };
        let x = rftl_argmin(&bar, &vec![0.0; dom.total_dim()], 0.5, &warm).unwrap();
        for (a, b) in x.iter().zip(bar.analytic_center()) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn one_dimensional_closed_form() {
        // On [0,1] with eta*accumulated = 3 the stationarity condition is
        // 1/(1-x) - 1/x = 3, i.e. 3x^2 - x - 1 = 0, x = (1 + sqrt(13))/6.
        let dom = ProductSimplexDomain::unit_box(1).unwrap();
        let bar = ProductSimplexBarrier::new(dom);
        let x = rftl_argmin(&bar, &[3.0], 1.0, &[0.5]).unwrap();
        assert!((x[0] - 0.7675918792439982).abs() < 1e-9, "{}", x[0]);
    }

    #[test]
    fn postconditions_hold_on_random_instances() {
        let dom = ProductSimplexDomain::new(vec![2, 2, 3]).unwrap();
        let bar = ProductSimplexBarrier::new(dom.clone());
        let mut s = RandomStream::new(9);
        let mut warm = bar.analytic_center();
        let mut acc = vec![0.0; dom.total_dim()];
        for _ in 0..25 {
            for a in &mut acc {
                *a += 4.0 * (s.uniform() - 0.3);
            }
            let trace = rftl_argmin_traced(&bar, &acc, 0.7, &warm).unwrap();
            // KKT residual and strict interiority.
            assert!(*trace.residuals.last().unwrap() <= ARGMIN_TOL);
            assert!(dom.require_interior(&trace.x, BOUNDARY_TOL).is_ok());
            // Residual decreases at every accepted Newton step.
            for w in trace.residuals.windows(2) {
                assert!(
                    w[1] <= w[0] * (1.0 + 1e-9),
                    "residual increased: {} -> {}",
                    w[0],
                    w[1]
                );
            }
            warm = trace.x;
        }
    }

    #[test]
    fn determinism() {
        let dom = ProductSimplexDomain::new(vec![3]).unwrap();
        let bar = ProductSimplexBarrier::new(dom.clone());
        let acc = vec![1.5, -2.0, 0.25];
        let a = rftl_argmin(&bar, &acc, 0.3, &bar.analytic_center()).unwrap();
        let b = rftl_argmin(&bar, &acc, 0.3, &bar.analytic_center()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_eta() {
        let dom = ProductSimplexDomain::unit_box(1).unwrap();
        let bar = ProductSimplexBarrier::new(dom);
        assert!(rftl_argmin(&bar, &[1.0], 0.0, &[0.5]).is_err());
    }
}
