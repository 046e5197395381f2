//! Differential and integral discrete embeddings of `dx/dt = f(t, x)`.
//!
//! Each embedding is a system of equations on the grid. They all decouple
//! into blocks of 1, 2 or 3 steps: given `X` at the block start, a few
//! unknowns are fixed by an implicit system and, for the integral forms, the
//! block's last node follows from an explicit quadrature.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{DiscreteFunction, Support, TimeGrid};
use crate::newton::{fd_jacobian, newton_solve, SolverConfig};
use crate::operators::{delta, delta2, delta3, initial_value, j_delta, j_delta2, j_delta3, j_nabla, nabla};

pub type FieldFn = dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync;
/// Row-major `d x d` Jacobian `df/dx`.
pub type FieldJacobianFn = dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync;

/// Right-hand side of a first-order system.
pub struct OdeField {
    dim: usize,
    f: Box<FieldFn>,
    jacobian: Option<Box<FieldJacobianFn>>,
}

impl fmt::Debug for OdeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeField").field("dim", &self.dim).field("analytic_jacobian", &self.jacobian.is_some()).finish()
    }
}

impl OdeField {
    pub fn new(dim: usize, f: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self { dim, f: Box::new(f), jacobian: None }
    }

    pub fn with_jacobian(mut self, j: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Box::new(j));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn eval(&self, t: f64, x: &[f64]) -> Vec<f64> {
        (self.f)(t, x)
    }

    /// Analytic Jacobian when available, forward differences otherwise.
    pub fn jacobian(&self, t: f64, x: &[f64], fd_step: f64) -> Vec<f64> {
        match &self.jacobian {
            Some(j) => j(t, x),
            None => fd_jacobian(&|y: &[f64]| (self.f)(t, y), x, fd_step),
        }
    }

    /// `f(T, X)` as a Full-support discrete function.
    pub fn apply(&self, x: &DiscreteFunction) -> Result<DiscreteFunction> {
        x.require_support(Support::Full)?;
        x.require_dim(self.dim)?;
        let grid = *x.grid();
        let mut err = None;
        let out = DiscreteFunction::from_nodes(grid, Support::Full, self.dim, |k, out| {
            let y = self.eval(grid.node(k), x.at(k));
            if y.len() == out.len() {
                out.copy_from_slice(&y);
            } else if err.is_none() {
                err = Some(Error::Evaluation {
                    node: k,
                    t: grid.node(k),
                    reason: format!("field returned {} components, expected {}", y.len(), out.len()),
                });
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    DeltaDifferential,
    NablaDifferential,
    DeltaIntegral,
    NablaIntegral,
    Delta2Differential,
    Delta2Integral,
    Delta3Differential,
    Delta3Integral,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 8] = [
        SchemeKind::DeltaDifferential,
        SchemeKind::NablaDifferential,
        SchemeKind::DeltaIntegral,
        SchemeKind::NablaIntegral,
        SchemeKind::Delta2Differential,
        SchemeKind::Delta2Integral,
        SchemeKind::Delta3Differential,
        SchemeKind::Delta3Integral,
    ];

    /// Interpolation order of the underlying operator.
    pub fn order(self) -> usize {
        match self {
            SchemeKind::Delta2Differential | SchemeKind::Delta2Integral => 2,
            SchemeKind::Delta3Differential | SchemeKind::Delta3Integral => 3,
            _ => 1,
        }
    }

    /// Required divisor of the step count.
    pub fn block(self) -> usize {
        self.order()
    }

    pub fn is_integral(self) -> bool {
        matches!(
            self,
            SchemeKind::DeltaIntegral
                | SchemeKind::NablaIntegral
                | SchemeKind::Delta2Integral
                | SchemeKind::Delta3Integral
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::DeltaDifferential => "DeltaDifferential",
            SchemeKind::NablaDifferential => "NablaDifferential",
            SchemeKind::DeltaIntegral => "DeltaIntegral",
            SchemeKind::NablaIntegral => "NablaIntegral",
            SchemeKind::Delta2Differential => "Delta2Differential",
            SchemeKind::Delta2Integral => "Delta2Integral",
            SchemeKind::Delta3Differential => "Delta3Differential",
            SchemeKind::Delta3Integral => "Delta3Integral",
        }
    }

    fn table(self) -> &'static BlockScheme {
        match self {
            SchemeKind::DeltaDifferential | SchemeKind::DeltaIntegral => &FORWARD_EULER,
            SchemeKind::NablaDifferential | SchemeKind::NablaIntegral => &BACKWARD_EULER,
            SchemeKind::Delta2Differential => &DELTA2_DIFFERENTIAL,
            SchemeKind::Delta2Integral => &DELTA2_INTEGRAL,
            SchemeKind::Delta3Differential => &DELTA3_DIFFERENTIAL,
            SchemeKind::Delta3Integral => &DELTA3_INTEGRAL,
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown scheme '{s}'"))
    }
}

/// One block equation `sum_j c_j X_j - h sum_j w_j f(t_j, X_j) = 0`, indices
/// local to the block.
struct Row {
    c: [f64; 4],
    w: [f64; 4],
}

/// Per-block update. The first `implicit.len()` unknowns `X_1..X_m` solve the
/// implicit rows jointly; when present, `closing` gives the last block node as
/// `X_0 + h sum_j closing_j f(t_j, X_j)`.
struct BlockScheme {
    width: usize,
    implicit: &'static [Row],
    closing: Option<[f64; 4]>,
}

static FORWARD_EULER: BlockScheme = BlockScheme { width: 1, implicit: &[], closing: Some([1.0, 0.0, 0.0, 0.0]) };

static BACKWARD_EULER: BlockScheme =
    BlockScheme { width: 1, implicit: &[Row { c: [-1.0, 1.0, 0.0, 0.0], w: [0.0, 1.0, 0.0, 0.0] }], closing: None };

// Delta2 X = f(T, X) row by row, multiplied by h.
static DELTA2_DIFFERENTIAL: BlockScheme = BlockScheme {
    width: 2,
    implicit: &[
        Row { c: [-1.5, 2.0, -0.5, 0.0], w: [1.0, 0.0, 0.0, 0.0] },
        Row { c: [-0.5, 0.0, 0.5, 0.0], w: [0.0, 1.0, 0.0, 0.0] },
    ],
    closing: None,
};

// Trapezoidal half step, then the midpoint accumulation over the block.
static DELTA2_INTEGRAL: BlockScheme = BlockScheme {
    width: 2,
    implicit: &[Row { c: [-1.0, 1.0, 0.0, 0.0], w: [0.5, 0.5, 0.0, 0.0] }],
    closing: Some([0.0, 2.0, 0.0, 0.0]),
};

// Delta3 X = f(T, X) row by row, multiplied by 6h.
static DELTA3_DIFFERENTIAL: BlockScheme = BlockScheme {
    width: 3,
    implicit: &[
        Row { c: [-11.0, 18.0, -9.0, 2.0], w: [6.0, 0.0, 0.0, 0.0] },
        Row { c: [-2.0, -3.0, 6.0, -1.0], w: [0.0, 6.0, 0.0, 0.0] },
        Row { c: [1.0, -6.0, 3.0, 2.0], w: [0.0, 0.0, 6.0, 0.0] },
    ],
    closing: None,
};

// Partial integrals to the first two block nodes, then the whole-block rule.
static DELTA3_INTEGRAL: BlockScheme = BlockScheme {
    width: 3,
    implicit: &[
        Row { c: [-1.0, 1.0, 0.0, 0.0], w: [5.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0, 0.0] },
        Row { c: [-1.0, 0.0, 1.0, 0.0], w: [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0, 0.0] },
    ],
    closing: Some([0.75, 0.0, 2.25, 0.0]),
};

/// What produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Scheme(SchemeKind),
    DiscreteEulerLagrange,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: DiscreteFunction,
    pub method: Method,
    /// Newton iterations spent per block (0 for explicit blocks).
    pub iterations: Vec<usize>,
}

impl Trajectory {
    pub fn grid(&self) -> &TimeGrid {
        self.states.grid()
    }
}

fn solve_block(
    ode: &OdeField,
    scheme: &BlockScheme,
    grid: &TimeGrid,
    start: usize,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<(Vec<Vec<f64>>, usize)> {
    let d = ode.dim();
    let h = grid.h();
    let t: Vec<f64> = (0..=scheme.width).map(|j| grid.node(start + j)).collect();
    let f0 = ode.eval(t[0], x0);
    if f0.len() != d {
        return Err(Error::Dimension { expected: d, found: f0.len() });
    }
    let m = scheme.implicit.len();

    let mut nodes: Vec<Vec<f64>> = vec![x0.to_vec()];
    let mut iterations = 0;
    if m > 0 {
        let unpack = |y: &[f64]| -> Vec<Vec<f64>> {
            let mut xs = vec![x0.to_vec()];
            xs.extend(y.chunks(d).map(<[f64]>::to_vec));
            xs
        };
        let residual = |y: &[f64]| -> Vec<f64> {
            let xs = unpack(y);
            let fs: Vec<Vec<f64>> = (1..=m).map(|j| ode.eval(t[j], &xs[j])).collect();
            let mut r = Vec::with_capacity(m * d);
            for row in scheme.implicit {
                for c in 0..d {
                    let mut lin = row.c[0] * x0[c];
                    let mut quad = row.w[0] * f0[c];
                    for j in 1..=m {
                        lin += row.c[j] * xs[j][c];
                        quad += row.w[j] * fs[j - 1][c];
                    }
                    r.push(lin - h * quad);
                }
            }
            r
        };
        let jacobian = |y: &[f64]| -> Vec<f64> {
            let xs = unpack(y);
            let md = m * d;
            let mut jac = vec![0.0; md * md];
            for j in 1..=m {
                let needs_f = scheme.implicit.iter().any(|row| row.w[j] != 0.0);
                let jf = if needs_f { ode.jacobian(t[j], &xs[j], cfg.fd_step) } else { vec![0.0; d * d] };
                for (i, row) in scheme.implicit.iter().enumerate() {
                    for a in 0..d {
                        for b in 0..d {
                            let mut v = -h * row.w[j] * jf[a * d + b];
                            if a == b {
                                v += row.c[j];
                            }
                            jac[(i * d + a) * md + (j - 1) * d + b] = v;
                        }
                    }
                }
            }
            jac
        };
        let guess: Vec<f64> =
            (1..=m).flat_map(|j| x0.iter().zip(&f0).map(move |(x, f)| x + j as f64 * h * f)).collect();
        let sol = newton_solve(&residual, Some(&jacobian), &guess, cfg)?;
        iterations = sol.iterations;
        nodes.extend(sol.x.chunks(d).map(<[f64]>::to_vec));
    }
    if let Some(w) = scheme.closing {
        let fs: Vec<Vec<f64>> = (0..scheme.width)
            .map(|j| {
                if j == 0 {
                    f0.clone()
                } else if w[j] != 0.0 {
                    ode.eval(t[j], &nodes[j])
                } else {
                    Vec::new()
                }
            })
            .collect();
        let last: Vec<f64> = (0..d)
            .map(|c| {
                let mut acc = 0.0;
                for j in 0..scheme.width {
                    if w[j] != 0.0 {
                        acc += w[j] * fs[j][c];
                    }
                }
                x0[c] + h * acc
            })
            .collect();
        nodes.push(last);
    }
    nodes.remove(0);
    Ok((nodes, iterations))
}

/// Marches `scheme` from `x0` across the grid.
pub fn integrate(
    ode: &OdeField,
    x0: &[f64],
    grid: &TimeGrid,
    scheme: SchemeKind,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    if x0.len() != ode.dim() {
        return Err(Error::Dimension { expected: ode.dim(), found: x0.len() });
    }
    grid.require_divisible(scheme.block())?;
    let table = scheme.table();
    let d = ode.dim();
    let mut states = DiscreteFunction::zeros(*grid, Support::Full, d);
    states.at_mut(0).copy_from_slice(x0);
    let mut iterations = Vec::with_capacity(grid.steps() / table.width);
    for start in (0..grid.steps()).step_by(table.width) {
        let current = states.at(start).to_vec();
        let (nodes, iters) = solve_block(ode, table, grid, start, &current, cfg)
            .map_err(|e| Error::Step { step: start, source: Box::new(e) })?;
        for (j, x) in nodes.iter().enumerate() {
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Step {
                    step: start,
                    source: Box::new(Error::Evaluation {
                        node: start + j + 1,
                        t: grid.node(start + j + 1),
                        reason: "non-finite state".into(),
                    }),
                });
            }
            states.at_mut(start + j + 1).copy_from_slice(x);
        }
        iterations.push(iters);
    }
    Ok(Trajectory { states, method: Method::Scheme(scheme), iterations })
}

/// Pointwise residual of the scheme's defining equations, evaluated with the
/// operators module: `D X - f(T, X)` on the derivative's support for the
/// differential forms, `X - X_0 - J(f(T, X))` on Full for the integral forms.
pub fn scheme_residual(ode: &OdeField, x: &DiscreteFunction, scheme: SchemeKind) -> Result<DiscreteFunction> {
    x.grid().require_divisible(scheme.block())?;
    let f = ode.apply(x)?;
    match scheme {
        SchemeKind::DeltaDifferential => delta(x)?.sub(&f.restrict(Support::Plus)?),
        SchemeKind::NablaDifferential => nabla(x)?.sub(&f.restrict(Support::Minus)?),
        SchemeKind::Delta2Differential => delta2(x)?.sub(&f.restrict(Support::Plus)?),
        SchemeKind::Delta3Differential => delta3(x)?.sub(&f.restrict(Support::Plus)?),
        SchemeKind::DeltaIntegral => x.sub(&initial_value(x)?)?.sub(&j_delta(&f)?),
        SchemeKind::NablaIntegral => x.sub(&initial_value(x)?)?.sub(&j_nabla(&f)?),
        SchemeKind::Delta2Integral => x.sub(&initial_value(x)?)?.sub(&j_delta2(&f)?),
        SchemeKind::Delta3Integral => x.sub(&initial_value(x)?)?.sub(&j_delta3(&f)?),
    }
}

/// Measured agreement of the differential and integral embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport {
    pub order: usize,
    /// Sup-norm distance between the two trajectories over all nodes.
    pub max_node_discrepancy: f64,
    /// `max_node_discrepancy <= 100 * tol`.
    pub coherent: bool,
    /// Coherence asserted in the literature for this order (order 2 is
    /// claimed incoherent), kept for side-by-side reporting.
    pub claimed_coherent: bool,
}

pub fn scheme_pairs(order: usize) -> Result<&'static [(SchemeKind, SchemeKind)]> {
    const ORDER1: [(SchemeKind, SchemeKind); 2] = [
        (SchemeKind::DeltaDifferential, SchemeKind::DeltaIntegral),
        (SchemeKind::NablaDifferential, SchemeKind::NablaIntegral),
    ];
    const ORDER2: [(SchemeKind, SchemeKind); 1] = [(SchemeKind::Delta2Differential, SchemeKind::Delta2Integral)];
    const ORDER3: [(SchemeKind, SchemeKind); 1] = [(SchemeKind::Delta3Differential, SchemeKind::Delta3Integral)];
    match order {
        1 => Ok(&ORDER1),
        2 => Ok(&ORDER2),
        3 => Ok(&ORDER3),
        o => Err(Error::Config(format!("coherence order must be 1, 2 or 3, got {o}"))),
    }
}

/// Integrates the differential and integral embeddings of the given order
/// and compares them node by node.
pub fn coherence_check(
    ode: &OdeField,
    x0: &[f64],
    grid: &TimeGrid,
    order: usize,
    cfg: &SolverConfig,
) -> Result<CoherenceReport> {
    let mut worst = 0.0f64;
    for &(diff, int) in scheme_pairs(order)? {
        let a = integrate(ode, x0, grid, diff, cfg)?;
        let b = integrate(ode, x0, grid, int, cfg)?;
        worst = worst.max(a.states.sup_distance(&b.states)?);
    }
    Ok(CoherenceReport {
        order,
        max_node_discrepancy: worst,
        coherent: worst <= 100.0 * cfg.tol,
        claimed_coherent: order != 2,
    })
}
