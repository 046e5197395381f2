//! Discrete variational embedding of Lagrangian systems.
//!
//! The discrete action is `[J_Delta(L(T, X, Delta X))]_N`. Its critical points
//! over boundary-zero variations are exactly the solutions of the discrete
//! Euler-Lagrange equation
//!
//! ```text
//! Nabla(dL/dv(T, X, Delta X)) = dL/dx(T, X, Delta X)   on nodes 1..N-1
//! ```
//!
//! which, marched forward from two initial nodes, is a variational integrator.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embeddings::{Method, Trajectory};
use crate::error::{Error, Result};
use crate::grid::{dot, pair_star, DiscreteFunction, Support, TimeGrid};
use crate::newton::{newton_solve, SolverConfig};
use crate::operators::{delta, j_delta};
use crate::sum::compensated_sum;

pub type LagrangianValueFn = dyn Fn(f64, &[f64], &[f64]) -> f64 + Send + Sync;
pub type LagrangianPartialFn = dyn Fn(f64, &[f64], &[f64]) -> Vec<f64> + Send + Sync;
pub type PotentialGradientFn = dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync;

const SPOT_CHECK_POINTS: usize = 8;
const SPOT_CHECK_SEED: u64 = 0x05ee_d1a9;

/// `L(t, x, v)` with optional analytic partials.
pub struct Lagrangian {
    dim: usize,
    value: Box<LagrangianValueFn>,
    dl_dx: Option<Box<LagrangianPartialFn>>,
    dl_dv: Option<Box<LagrangianPartialFn>>,
    /// Set for `L = |v|^2 / 2 - V(t, x)`: the gradient of `V`.
    potential_gradient: Option<Box<PotentialGradientFn>>,
    fd_step: f64,
}

impl fmt::Debug for Lagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lagrangian")
            .field("dim", &self.dim)
            .field("analytic_partials", &(self.dl_dx.is_some() && self.dl_dv.is_some()))
            .field("separable", &self.potential_gradient.is_some())
            .finish()
    }
}

/// Fourth-order central difference gradient.
fn central_gradient(g: impl Fn(&[f64]) -> f64, at: &[f64], step: f64) -> Vec<f64> {
    let mut p = at.to_vec();
    let mut at_offset = |i: usize, off: f64| {
        p[i] = at[i] + off;
        let v = g(&p);
        p[i] = at[i];
        v
    };
    (0..at.len())
        .map(|i| {
            let s = step * (1.0 + at[i].abs());
            let near = at_offset(i, s) - at_offset(i, -s);
            let far = at_offset(i, 2.0 * s) - at_offset(i, -2.0 * s);
            (8.0 * near - far) / (12.0 * s)
        })
        .collect()
}

impl Lagrangian {
    /// Lagrangian whose partials fall back to central differences.
    pub fn new(dim: usize, value: impl Fn(f64, &[f64], &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { dim, value: Box::new(value), dl_dx: None, dl_dv: None, potential_gradient: None, fd_step: 1e-3 }
    }

    /// Attaches analytic partials after spot-checking them against central
    /// differences at a few seeded random points.
    pub fn with_partials(
        mut self,
        dl_dx: impl Fn(f64, &[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
        dl_dv: impl Fn(f64, &[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        self.dl_dx = Some(Box::new(dl_dx));
        self.dl_dv = Some(Box::new(dl_dv));
        self.spot_check()?;
        Ok(self)
    }

    /// `L = |v|^2 / 2 - V(t, x)`. Forward stepping is explicit leapfrog.
    pub fn separable(
        dim: usize,
        potential: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        let gradient: std::sync::Arc<PotentialGradientFn> = std::sync::Arc::new(gradient);
        let g2 = gradient.clone();
        let mut lag = Self::new(dim, move |t, x, v| 0.5 * dot(v, v) - potential(t, x))
            .with_partials(move |t, x, _| g2(t, x).into_iter().map(|g| -g).collect(), |_, _, v| v.to_vec())?;
        lag.potential_gradient = Some(Box::new(move |t, x| gradient(t, x)));
        Ok(lag)
    }

    pub fn with_fd_step(mut self, fd_step: f64) -> Self {
        self.fd_step = fd_step;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_separable(&self) -> bool {
        self.potential_gradient.is_some()
    }

    pub fn value(&self, t: f64, x: &[f64], v: &[f64]) -> f64 {
        (self.value)(t, x, v)
    }

    /// `dL/dx`, analytic or by central differences.
    pub fn dl_dx(&self, t: f64, x: &[f64], v: &[f64]) -> Vec<f64> {
        match &self.dl_dx {
            Some(f) => f(t, x, v),
            None => central_gradient(|y| self.value(t, y, v), x, self.fd_step),
        }
    }

    /// `dL/dv`, analytic or by central differences.
    pub fn dl_dv(&self, t: f64, x: &[f64], v: &[f64]) -> Vec<f64> {
        match &self.dl_dv {
            Some(f) => f(t, x, v),
            None => central_gradient(|w| self.value(t, x, w), v, self.fd_step),
        }
    }

    fn spot_check(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(SPOT_CHECK_SEED);
        let step = 1e-3;
        for _ in 0..SPOT_CHECK_POINTS {
            let t = rng.gen_range(0.0..1.0);
            let x: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let checks = [
                ("dL/dx", self.dl_dx(t, &x, &v), central_gradient(|y| self.value(t, y, &v), &x, step)),
                ("dL/dv", self.dl_dv(t, &x, &v), central_gradient(|w| self.value(t, &x, w), &v, step)),
            ];
            for (which, analytic, numeric) in checks {
                let ok = analytic.len() == numeric.len()
                    && analytic.iter().zip(&numeric).all(|(a, n)| (a - n).abs() <= 1e-5 * a.abs().max(1.0));
                if !ok {
                    return Err(Error::PartialMismatch { which, t, x, v });
                }
            }
        }
        Ok(())
    }

    fn check_input(&self, x: &DiscreteFunction) -> Result<()> {
        x.require_support(Support::Full)?;
        x.require_dim(self.dim)
    }
}

/// Momenta `dL/dv(t_k, X_k, Delta X_k)` and forces `dL/dx(...)` on `T+`.
fn momenta_and_forces(lag: &Lagrangian, x: &DiscreteFunction) -> Result<(DiscreteFunction, DiscreteFunction)> {
    lag.check_input(x)?;
    let dx = delta(x)?;
    let grid = *x.grid();
    let d = lag.dim;
    let p = DiscreteFunction::from_nodes(grid, Support::Plus, d, |k, out| {
        out.copy_from_slice(&lag.dl_dv(grid.node(k), x.at(k), dx.at(k)))
    });
    let q = DiscreteFunction::from_nodes(grid, Support::Plus, d, |k, out| {
        out.copy_from_slice(&lag.dl_dx(grid.node(k), x.at(k), dx.at(k)))
    });
    Ok((p, q))
}

/// Discrete action `[J_Delta(L(T, X, Delta X))]_N`.
pub fn action_delta(lag: &Lagrangian, x: &DiscreteFunction) -> Result<f64> {
    lag.check_input(x)?;
    let dx = delta(x)?;
    let grid = *x.grid();
    let integrand = DiscreteFunction::from_nodes(grid, Support::Plus, 1, |k, out| {
        out[0] = lag.value(grid.node(k), x.at(k), dx.at(k));
    });
    Ok(j_delta(&integrand)?.scalar_at(grid.steps()))
}

/// `sum_k L_d(X_k, X_{k+1}, h)` with `L_d(a, b, h) = h L(t_k, a, (b - a) / h)`.
pub fn action_marsden_west(lag: &Lagrangian, x: &DiscreteFunction) -> Result<f64> {
    lag.check_input(x)?;
    let grid = *x.grid();
    let h = grid.h();
    let discrete_lagrangian = |k: usize, a: &[f64], b: &[f64]| {
        let v: Vec<f64> = a.iter().zip(b).map(|(a, b)| (b - a) / h).collect();
        h * lag.value(grid.node(k), a, &v)
    };
    Ok(compensated_sum((0..grid.steps()).map(|k| discrete_lagrangian(k, x.at(k), x.at(k + 1)))))
}

/// Directional derivative of [`action_delta`] at `X` along `H`:
/// `[J_Delta(dL/dv * Delta H + dL/dx * H)]_N`.
pub fn frechet_derivative(lag: &Lagrangian, x: &DiscreteFunction, hdir: &DiscreteFunction) -> Result<f64> {
    let (p, q) = momenta_and_forces(lag, x)?;
    hdir.require_support(Support::Full)?;
    hdir.require_dim(lag.dim)?;
    let dh = delta(hdir)?;
    let integrand = pair_star(&p, &dh)?.add(&pair_star(&q, &hdir.restrict(Support::Plus)?)?)?;
    Ok(j_delta(&integrand)?.scalar_at(x.grid().steps()))
}

/// Discrete Euler-Lagrange residual on the interior nodes,
/// `R_k = (p_k - p_{k-1}) / h - dL/dx(t_k, X_k, Delta X_k)`.
pub fn del_residual(lag: &Lagrangian, x: &DiscreteFunction) -> Result<DiscreteFunction> {
    let (p, q) = momenta_and_forces(lag, x)?;
    let h = x.grid().h();
    Ok(DiscreteFunction::from_nodes(*x.grid(), Support::Interior, lag.dim, |k, out| {
        for (c, o) in out.iter_mut().enumerate() {
            *o = (p.at(k)[c] - p.at(k - 1)[c]) / h - q.at(k)[c];
        }
    }))
}

/// Slot derivatives of the two-point discrete Lagrangian, summed at each
/// interior node and negated: `-(D2 L_d(X_{k-1}, X_k) + D1 L_d(X_k, X_{k+1}))`.
/// With this sign the result equals `h * del_residual`.
pub fn marsden_west_residual(lag: &Lagrangian, x: &DiscreteFunction) -> Result<DiscreteFunction> {
    lag.check_input(x)?;
    let grid = *x.grid();
    let h = grid.h();
    let velocity = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(a, b)| (b - a) / h).collect() };
    // L_d(a, b) = h L(t, a, (b - a)/h):
    //   D1 L_d = h dL/dx - dL/dv,   D2 L_d = dL/dv
    let d1 = |k: usize| -> Vec<f64> {
        let (a, b) = (x.at(k), x.at(k + 1));
        let v = velocity(a, b);
        let lx = lag.dl_dx(grid.node(k), a, &v);
        let lv = lag.dl_dv(grid.node(k), a, &v);
        lx.iter().zip(&lv).map(|(gx, gv)| h * gx - gv).collect()
    };
    let d2 = |k: usize| -> Vec<f64> {
        let (a, b) = (x.at(k), x.at(k + 1));
        lag.dl_dv(grid.node(k), a, &velocity(a, b))
    };
    Ok(DiscreteFunction::from_nodes(grid, Support::Interior, lag.dim, |k, out| {
        let back = d2(k - 1);
        let fwd = d1(k);
        for (o, (b, f)) in out.iter_mut().zip(back.iter().zip(&fwd)) {
            *o = -(b + f);
        }
    }))
}

/// Discrete Legendre energy `<dL/dv, Delta X_k> - L` on `T+`.
pub fn energy_diagnostic(lag: &Lagrangian, x: &DiscreteFunction) -> Result<DiscreteFunction> {
    lag.check_input(x)?;
    let dx = delta(x)?;
    let grid = *x.grid();
    Ok(DiscreteFunction::from_nodes(grid, Support::Plus, 1, |k, out| {
        let (t, xk, vk) = (grid.node(k), x.at(k), dx.at(k));
        out[0] = dot(&lag.dl_dv(t, xk, vk), vk) - lag.value(t, xk, vk);
    }))
}

/// True when the Euler-Lagrange residual is below `tol` in the sup norm.
pub fn critical_point_check(lag: &Lagrangian, x: &DiscreteFunction, tol: f64) -> Result<bool> {
    Ok(del_residual(lag, x)?.sup_norm() <= tol)
}

/// Largest `|DL(X)(H)|` over `samples` seeded random variations `H` with
/// `H_0 = H_N = 0` and interior entries uniform in `[-1, 1]`.
pub fn variation_probe(lag: &Lagrangian, x: &DiscreteFunction, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = x.grid().steps();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let hdir = DiscreteFunction::from_nodes(*x.grid(), Support::Full, lag.dim, |k, out| {
            if k != 0 && k != n {
                out.iter_mut().for_each(|o| *o = rng.gen_range(-1.0..1.0));
            }
        });
        worst = worst.max(frechet_derivative(lag, x, &hdir)?.abs());
    }
    Ok(worst)
}

fn check_start(lag: &Lagrangian, x: &[f64]) -> Result<()> {
    if x.len() != lag.dim {
        return Err(Error::Dimension { expected: lag.dim, found: x.len() });
    }
    Ok(())
}

/// `h R_k` as a function of the unknown `X_{k+1}`.
fn step_residual<'a>(
    lag: &'a Lagrangian,
    t: f64,
    h: f64,
    x_prev: &'a [f64],
    x_cur: &'a [f64],
) -> impl Fn(&[f64]) -> Vec<f64> + 'a {
    let v_prev: Vec<f64> = x_cur.iter().zip(x_prev).map(|(a, b)| (a - b) / h).collect();
    let p_prev = lag.dl_dv(t - h, x_prev, &v_prev);
    move |y: &[f64]| {
        let v: Vec<f64> = y.iter().zip(x_cur).map(|(a, b)| (a - b) / h).collect();
        let p = lag.dl_dv(t, x_cur, &v);
        let q = lag.dl_dx(t, x_cur, &v);
        (0..y.len()).map(|c| p[c] - p_prev[c] - h * q[c]).collect()
    }
}

fn map_newton(step: usize, e: Error) -> Error {
    match e {
        Error::Singular => Error::Degenerate { step },
        other => Error::Step { step, source: Box::new(other) },
    }
}

/// Marches the discrete Euler-Lagrange equation from `X_0 = x0`, `X_1 = x1`.
///
/// Separable Lagrangians step by the explicit leapfrog recurrence
/// `X_{k+1} = 2 X_k - X_{k-1} - h^2 grad V(t_k, X_k)`; otherwise each step
/// solves `R_k = 0` for `X_{k+1}` by damped Newton.
pub fn del_integrate(
    lag: &Lagrangian,
    x0: &[f64],
    x1: &[f64],
    grid: &TimeGrid,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    check_start(lag, x0)?;
    check_start(lag, x1)?;
    let d = lag.dim;
    let h = grid.h();
    let mut states = DiscreteFunction::zeros(*grid, Support::Full, d);
    states.at_mut(0).copy_from_slice(x0);
    states.at_mut(1).copy_from_slice(x1);
    let mut iterations = Vec::with_capacity(grid.steps().saturating_sub(1));
    for k in 1..grid.steps() {
        let t = grid.node(k);
        let next: Vec<f64> = match &lag.potential_gradient {
            Some(grad) => {
                let (xm, xk) = (states.at(k - 1), states.at(k));
                let g = grad(t, xk);
                // the step equation is linear in X_{k+1}, so this closed form
                // is exactly one Newton step
                iterations.push(1);
                (0..d).map(|c| 2.0 * xk[c] - xm[c] - h * h * g[c]).collect()
            }
            None => {
                let (xm, xk) = (states.at(k - 1).to_vec(), states.at(k).to_vec());
                let residual = step_residual(lag, t, h, &xm, &xk);
                let guess: Vec<f64> = (0..d).map(|c| 2.0 * xk[c] - xm[c]).collect();
                let sol = newton_solve(&residual, None, &guess, cfg).map_err(|e| map_newton(k, e))?;
                iterations.push(sol.iterations);
                sol.x
            }
        };
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Step {
                step: k,
                source: Box::new(Error::Evaluation {
                    node: k + 1,
                    t: grid.node(k + 1),
                    reason: "non-finite state".into(),
                }),
            });
        }
        states.at_mut(k + 1).copy_from_slice(&next);
    }
    Ok(Trajectory { states, method: Method::DiscreteEulerLagrange, iterations })
}

/// [`del_integrate`] started from a position and velocity: `X_1 = x0 + h v0`.
pub fn del_integrate_from_velocity(
    lag: &Lagrangian,
    x0: &[f64],
    v0: &[f64],
    grid: &TimeGrid,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    check_start(lag, v0)?;
    let x1: Vec<f64> = x0.iter().zip(v0).map(|(x, v)| x + grid.h() * v).collect();
    del_integrate(lag, x0, &x1, grid, cfg)
}

/// Fixed-endpoint problem: finds interior nodes with `X_0 = x0`, `X_N = xn`
/// solving the stacked Euler-Lagrange system by global Newton, starting from
/// the straight line between the endpoints.
pub fn del_solve_bvp(
    lag: &Lagrangian,
    x0: &[f64],
    xn: &[f64],
    grid: &TimeGrid,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    check_start(lag, x0)?;
    check_start(lag, xn)?;
    let d = lag.dim;
    let n = grid.steps();
    let h = grid.h();
    let assemble = |y: &[f64]| -> DiscreteFunction {
        DiscreteFunction::from_nodes(*grid, Support::Full, d, |k, out| {
            if k == 0 {
                out.copy_from_slice(x0);
            } else if k == n {
                out.copy_from_slice(xn);
            } else {
                out.copy_from_slice(&y[(k - 1) * d..k * d]);
            }
        })
    };
    let residual = |y: &[f64]| -> Vec<f64> {
        match del_residual(lag, &assemble(y)) {
            Ok(r) => r.values().iter().map(|v| h * v).collect(),
            Err(_) => vec![f64::NAN; y.len()],
        }
    };
    let guess: Vec<f64> = (1..n)
        .flat_map(|k| {
            let s = k as f64 / n as f64;
            x0.iter().zip(xn).map(move |(a, b)| a + s * (b - a))
        })
        .collect();
    let sol = newton_solve(&residual, None, &guess, cfg).map_err(|e| map_newton(0, e))?;
    Ok(Trajectory { states: assemble(&sol.x), method: Method::DiscreteEulerLagrange, iterations: vec![sol.iterations] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic() -> Lagrangian {
        Lagrangian::separable(1, |_, x| 0.5 * x[0] * x[0], |_, x| vec![x[0]]).unwrap()
    }

    fn harmonic_generic() -> Lagrangian {
        Lagrangian::new(1, |_, x, v| 0.5 * v[0] * v[0] - 0.5 * x[0] * x[0])
            .with_partials(|_, x, _| vec![-x[0]], |_, _, v| vec![v[0]])
            .unwrap()
    }

    fn free() -> Lagrangian {
        Lagrangian::separable(1, |_, _| 0.0, |_, _| vec![0.0]).unwrap()
    }

    fn g(n: usize, h: f64) -> TimeGrid {
        TimeGrid::with_step(0.0, h, n).unwrap()
    }

    fn scalar(grid: TimeGrid, v: &[f64]) -> DiscreteFunction {
        DiscreteFunction::scalar(grid, Support::Full, v.to_vec()).unwrap()
    }

    #[test]
    fn action_small_case() {
        let x = scalar(g(2, 1.0), &[0., 1., 0.]);
        assert_eq!(action_delta(&harmonic(), &x).unwrap(), 0.5);
        assert_eq!(action_marsden_west(&harmonic(), &x).unwrap(), 0.5);
        let zero = Lagrangian::new(1, |_, _, _| 0.0);
        assert_eq!(action_delta(&zero, &x).unwrap(), 0.0);
    }

    #[test]
    fn action_of_unit_lagrangian_is_interval_length() {
        let grid = TimeGrid::new(0.5, 2.0, 7).unwrap();
        let one = Lagrangian::new(1, |_, _, _| 1.0);
        let x = DiscreteFunction::zeros(grid, Support::Full, 1);
        assert!((action_marsden_west(&one, &x).unwrap() - 1.5).abs() < 1e-14);
        let c = crate::grid::constant_lift(&[3.0], &grid);
        let kinetic = Lagrangian::new(1, |_, _, v| 0.5 * v[0] * v[0]);
        assert_eq!(action_marsden_west(&kinetic, &c).unwrap(), 0.0);
    }

    #[test]
    fn bad_partials_are_rejected() {
        let err = Lagrangian::new(1, |_, x, v| 0.5 * v[0] * v[0] - 0.5 * x[0] * x[0])
            .with_partials(|_, x, _| vec![x[0]], |_, _, v| vec![v[0]])
            .unwrap_err();
        assert!(matches!(err, Error::PartialMismatch { which: "dL/dx", .. }));
    }

    #[test]
    fn leapfrog_first_step() {
        let tr = del_integrate(&harmonic(), &[1.0], &[1.0], &g(2, 0.1), &SolverConfig::default()).unwrap();
        assert!((tr.states.scalar_at(2) - 0.99).abs() < 1e-15);
    }

    #[test]
    fn free_particle_moves_uniformly() {
        let tr = del_integrate(&free(), &[1.0], &[1.25], &g(8, 0.5), &SolverConfig::default()).unwrap();
        for k in 0..=8 {
            assert!((tr.states.scalar_at(k) - (1.0 + 0.25 * k as f64)).abs() < 1e-14);
        }
        let e = energy_diagnostic(&free(), &tr.states).unwrap();
        assert!(e.values().iter().all(|&v| (v - e.values()[0]).abs() < 1e-12));
    }

    #[test]
    fn free_particle_residual_is_second_difference() {
        let kinetic = Lagrangian::new(1, |_, _, v| 0.5 * v[0] * v[0])
            .with_partials(|_, _, _| vec![0.0], |_, _, v| vec![v[0]])
            .unwrap();
        let h = 0.5;
        let vals = [0.3, -1.2, 2.0, 0.7, 0.7, -0.1];
        let x = scalar(g(5, h), &vals);
        let r = del_residual(&kinetic, &x).unwrap();
        assert_eq!(r.support(), Support::Interior);
        for k in 1..5 {
            let expect = (vals[k + 1] - 2.0 * vals[k] + vals[k - 1]) / (h * h);
            assert!((r.scalar_at(k) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn generic_newton_path_matches_leapfrog() {
        let grid = g(50, 0.1);
        let cfg = SolverConfig::default();
        let a = del_integrate(&harmonic(), &[1.0], &[1.02], &grid, &cfg).unwrap();
        let b = del_integrate(&harmonic_generic(), &[1.0], &[1.02], &grid, &cfg).unwrap();
        assert!(a.states.close_to(&b.states, 1e-12));
        assert!(b.iterations.iter().all(|&i| (1..=2).contains(&i)), "{:?}", b.iterations);
        assert!(critical_point_check(&harmonic_generic(), &b.states, 1e-9).unwrap());
    }

    #[test]
    fn energy_of_harmonic_oscillator() {
        let x = scalar(g(3, 0.5), &[1.0, 0.8, 0.2, -0.4]);
        let e = energy_diagnostic(&harmonic(), &x).unwrap();
        let dx = delta(&x).unwrap();
        for k in 0..3 {
            let expect = 0.5 * dx.scalar_at(k).powi(2) + 0.5 * x.scalar_at(k).powi(2);
            assert!((e.scalar_at(k) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn marsden_west_vanishes_with_zero_lagrangian() {
        let zero = Lagrangian::new(2, |_, _, _| 0.0);
        let x = DiscreteFunction::new(g(3, 0.2), Support::Full, 2, vec![1., 2., 3., 4., 5., 6., 7., 8.]).unwrap();
        assert!(marsden_west_residual(&zero, &x).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn smallest_interior() {
        let x = scalar(g(2, 1.0), &[0.0, 1.0, 0.0]);
        let r = del_residual(&harmonic(), &x).unwrap();
        assert_eq!(r.values().len(), 1);
        assert!(!critical_point_check(&harmonic(), &x, 1e-9).unwrap());
    }

    #[test]
    fn degenerate_lagrangian_is_reported() {
        // L = x has dL/dv = 0, so the step equation does not see X_{k+1}
        let lag = Lagrangian::new(1, |_, x, _| x[0]);
        let err = del_integrate(&lag, &[1.0], &[1.1], &g(4, 0.1), &SolverConfig::default()).unwrap_err();
        assert_eq!(err, Error::Degenerate { step: 1 });
    }

    #[test]
    fn boundary_value_mode() {
        let grid = TimeGrid::new(0.0, 1.0, 20).unwrap();
        let cfg = SolverConfig::default();
        let tr = del_solve_bvp(&harmonic_generic(), &[0.0], &[1.0], &grid, &cfg).unwrap();
        assert_eq!(tr.states.scalar_at(0), 0.0);
        assert_eq!(tr.states.scalar_at(20), 1.0);
        assert!(del_residual(&harmonic_generic(), &tr.states).unwrap().sup_norm() < 1e-9);
        // the same path is reached by shooting from its first two nodes
        let x1 = tr.states.scalar_at(1);
        let shot = del_integrate(&harmonic(), &[0.0], &[x1], &grid, &cfg).unwrap();
        assert!(shot.states.close_to(&tr.states, 1e-9));
    }

    #[test]
    fn pendulum_newton_path() {
        let lag = Lagrangian::new(1, |_, x, v| 0.5 * v[0] * v[0] + x[0].cos());
        let sep = Lagrangian::separable(1, |_, x| -x[0].cos(), |_, x| vec![x[0].sin()]).unwrap();
        let grid = g(40, 0.05);
        let cfg = SolverConfig::default();
        let a = del_integrate(&lag, &[0.5], &[0.5], &grid, &cfg).unwrap();
        let b = del_integrate(&sep, &[0.5], &[0.5], &grid, &cfg).unwrap();
        assert!(a.states.close_to(&b.states, 1e-8));
    }
}
