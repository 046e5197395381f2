//! Damped Newton iteration for the small implicit systems of the schemes.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const MAX_HALVINGS: usize = 20;

/// A map `R^m -> R^n`; Jacobians are returned row-major.
pub type VectorFn<'a> = dyn Fn(&[f64]) -> Vec<f64> + 'a;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Residual tolerance, relative to `1 + ||x||_inf`.
    pub tol: f64,
    pub max_iter: usize,
    /// Finite-difference step, scaled by `1 + ||x||_inf`.
    pub fd_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 50, fd_step: 1e-7 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        if self.fd_step.is_nan() || self.fd_step <= 0.0 {
            return Err(Error::Config(format!("fd_step must be positive, got {}", self.fd_step)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

pub(crate) fn sup_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Forward-difference Jacobian of `residual` at `x`, row-major.
pub fn fd_jacobian(residual: &VectorFn<'_>, x: &[f64], fd_step: f64) -> Vec<f64> {
    let m = x.len();
    let r0 = residual(x);
    let n = r0.len();
    let step = fd_step * (1.0 + sup_norm(x));
    let mut jac = vec![0.0; n * m];
    let mut xp = x.to_vec();
    for j in 0..m {
        xp[j] = x[j] + step;
        let delta = xp[j] - x[j];
        let rp = residual(&xp);
        for i in 0..n {
            jac[i * m + j] = (rp[i] - r0[i]) / delta;
        }
        xp[j] = x[j];
    }
    jac
}

/// Solves `J dx = -r`, rejecting numerically singular `J`.
fn newton_direction(jac: Vec<f64>, r: &[f64]) -> Result<Vec<f64>> {
    let m = r.len();
    let lu = DMatrix::from_row_slice(m, m, &jac).lu();
    let u = lu.u();
    let diag = u.diagonal();
    let big = diag.iter().fold(0.0f64, |a, d| a.max(d.abs()));
    let small = diag.iter().fold(f64::INFINITY, |a, d| a.min(d.abs()));
    if big.is_nan() || big <= 0.0 || small <= 1e-13 * big || !small.is_finite() {
        return Err(Error::Singular);
    }
    let rhs = DVector::from_iterator(m, r.iter().map(|v| -v));
    let dx = lu.solve(&rhs).ok_or(Error::Singular)?;
    Ok(dx.iter().copied().collect())
}

/// Damped Newton: stops once `||r(x)||_inf <= tol (1 + ||x||_inf)` or the
/// Newton update itself is that small, halving the step up to 20 times
/// whenever the full step increases the residual.
/// Without an analytic Jacobian a forward-difference one is used.
pub fn newton_solve(
    residual: &VectorFn<'_>,
    jacobian: Option<&VectorFn<'_>>,
    x_init: &[f64],
    cfg: &SolverConfig,
) -> Result<NewtonSolution> {
    cfg.validate()?;
    let mut x = x_init.to_vec();
    let mut r = residual(&x);
    if r.len() != x.len() {
        return Err(Error::Dimension { expected: x.len(), found: r.len() });
    }
    let mut norm = sup_norm(&r);
    for iter in 0..=cfg.max_iter {
        if norm <= cfg.tol * (1.0 + sup_norm(&x)) {
            return Ok(NewtonSolution { x, iterations: iter, residual: norm });
        }
        if iter == cfg.max_iter || !norm.is_finite() {
            break;
        }
        let jac = match jacobian {
            Some(j) => j(&x),
            None => fd_jacobian(residual, &x, cfg.fd_step),
        };
        let dx = newton_direction(jac, &r)?;
        // a negligible update means the residual sits at its rounding floor
        if sup_norm(&dx) <= cfg.tol * (1.0 + sup_norm(&x)) {
            let xt: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
            let nt = sup_norm(&residual(&xt));
            return Ok(NewtonSolution { x: xt, iterations: iter + 1, residual: nt });
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + lambda * d).collect();
            let rt = residual(&trial);
            let nt = sup_norm(&rt);
            if nt < norm || nt <= cfg.tol * (1.0 + sup_norm(&trial)) {
                accepted = Some((trial, rt, nt));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((xt, rt, nt)) => {
                x = xt;
                r = rt;
                norm = nt;
            }
            None => break,
        }
    }
    Err(Error::NoConvergence { iterations: cfg.max_iter, residual: norm })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn linear_scalar() {
        let s = newton_solve(&|x| vec![x[0] - 2.0], None, &[0.0], &cfg()).unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-12);
        let s = newton_solve(&|x| vec![x[0] - 1.0 - 0.5 * x[0]], None, &[1.0], &cfg()).unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-11);
    }

    #[test]
    fn quadratic_scalar() {
        let jac = |x: &[f64]| vec![2.0 * x[0]];
        let s = newton_solve(&|x| vec![x[0] * x[0] - 4.0], Some(&jac), &[3.0], &cfg()).unwrap();
        assert!((s.x[0] - 2.0).abs() <= 1e-12 * 3.0);
        assert!(s.iterations >= 3);
        let s = newton_solve(&|x| vec![x[0] * x[0] - 4.0], None, &[3.0], &cfg()).unwrap();
        assert!((s.x[0] - 2.0).abs() <= 1e-11);
    }

    #[test]
    fn coupled_system() {
        // x^2 + y^2 = 1, x = y
        let r = |v: &[f64]| vec![v[0] * v[0] + v[1] * v[1] - 1.0, v[0] - v[1]];
        let s = newton_solve(&r, None, &[1.0, 0.2], &cfg()).unwrap();
        let e = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.x[0] - e).abs() < 1e-11 && (s.x[1] - e).abs() < 1e-11);
    }

    #[test]
    fn damping_rescues_overshoot() {
        // atan has a tiny basin for undamped Newton
        let jac = |x: &[f64]| vec![1.0 / (1.0 + x[0] * x[0])];
        let s = newton_solve(&|x| vec![x[0].atan()], Some(&jac), &[3.0], &cfg()).unwrap();
        assert!(s.x[0].abs() < 1e-11);
    }

    #[test]
    fn singular_and_nonconvergent() {
        let jac = |_: &[f64]| vec![0.0];
        assert_eq!(newton_solve(&|x| vec![x[0] * 0.0 + 1.0], Some(&jac), &[0.0], &cfg()).unwrap_err(), Error::Singular);
        let few = SolverConfig { max_iter: 1, ..cfg() };
        let jac = |x: &[f64]| vec![2.0 * x[0]];
        let err = newton_solve(&|x| vec![x[0] * x[0] - 4.0], Some(&jac), &[30.0], &few).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 1, .. }));
    }

    #[test]
    fn stops_at_the_rounding_floor() {
        // deterministic noise of size 5e-12 keeps the residual above tol
        let r = |x: &[f64]| vec![x[0] - 2.0 + 5e-12 * (x[0] * 1e12).sin()];
        let jac = |_: &[f64]| vec![1.0];
        let s = newton_solve(&r, Some(&jac), &[0.0], &cfg()).unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-11);
        assert!(s.iterations <= 3);
    }

    #[test]
    fn rejects_bad_config() {
        let bad = SolverConfig { tol: 0.0, ..cfg() };
        assert!(matches!(newton_solve(&|x| x.to_vec(), None, &[1.0], &bad), Err(Error::Config(_))));
        let bad = SolverConfig { max_iter: 0, ..cfg() };
        assert!(bad.validate().is_err());
    }
}
