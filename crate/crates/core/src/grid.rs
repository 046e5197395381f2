//! Uniform time grids and support-tagged discrete functions.
//!
//! A discrete function carries the subset of grid nodes it lives on. Forward
//! differences land on [`Support::Plus`] (nodes `0..N-1`), backward differences
//! on [`Support::Minus`] (nodes `1..N`), and Euler-Lagrange residuals on
//! [`Support::Interior`]. Every operator checks the tag before touching data.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::sum::compensated_sum;

/// Uniform partition of `[a, b]` into `steps` intervals of width `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    a: f64,
    b: f64,
    steps: usize,
    h: f64,
}

impl TimeGrid {
    pub fn new(a: f64, b: f64, steps: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite bounds [{a}, {b}]")));
        }
        if a >= b {
            return Err(Error::InvalidGrid(format!("need a < b, got [{a}, {b}]")));
        }
        if steps == 0 {
            return Err(Error::InvalidGrid("need at least one step".into()));
        }
        let h = (b - a) / steps as f64;
        Ok(Self { a, b, steps, h })
    }

    /// Grid with the given step count and step size, starting at `a`.
    pub fn with_step(a: f64, h: f64, steps: usize) -> Result<Self> {
        if h.is_nan() || h <= 0.0 {
            return Err(Error::InvalidGrid(format!("step must be positive, got {h}")));
        }
        let mut grid = Self::new(a, a + h * steps as f64, steps)?;
        grid.h = h;
        Ok(grid)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of steps `N`; the grid has `N + 1` nodes.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Node `t_k = a + k h`, with `t_N = b` exactly.
    pub fn node(&self, k: usize) -> f64 {
        assert!(k <= self.steps, "node index {k} out of range 0..={}", self.steps);
        if k == self.steps {
            self.b
        } else {
            self.a + k as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(move |k| self.node(k))
    }

    pub(crate) fn require_divisible(&self, block: usize) -> Result<()> {
        if !self.steps.is_multiple_of(block) {
            return Err(Error::Divisibility { steps: self.steps, block });
        }
        Ok(())
    }
}

/// Which grid nodes a discrete function is defined on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Support {
    /// All nodes `0..=N`.
    Full,
    /// Nodes `0..=N-1`.
    Plus,
    /// Nodes `1..=N`.
    Minus,
    /// Nodes `1..=N-1`.
    Interior,
}

impl Support {
    pub fn range(self, steps: usize) -> Range<usize> {
        match self {
            Support::Full => 0..steps + 1,
            Support::Plus => 0..steps,
            Support::Minus => 1..steps + 1,
            Support::Interior => 1..steps,
        }
    }

    pub fn len(self, steps: usize) -> usize {
        self.range(steps).len()
    }

    /// True when every node of `self` also belongs to `other`.
    pub fn within(self, other: Support) -> bool {
        matches!(
            (self, other),
            (_, Support::Full)
                | (Support::Plus, Support::Plus)
                | (Support::Minus, Support::Minus)
                | (Support::Interior, _)
        )
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Support::Full => "Full",
            Support::Plus => "Plus",
            Support::Minus => "Minus",
            Support::Interior => "Interior",
        };
        f.write_str(s)
    }
}

/// Vector-valued samples on a subset of grid nodes.
///
/// Values are stored node-major: the `dim` components of the first supported
/// node, then the next node, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFunction {
    grid: TimeGrid,
    support: Support,
    dim: usize,
    values: Vec<f64>,
}

impl DiscreteFunction {
    pub fn new(grid: TimeGrid, support: Support, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension { expected: 1, found: 0 });
        }
        let expected = support.len(grid.steps) * dim;
        if values.len() != expected {
            return Err(Error::Dimension { expected, found: values.len() });
        }
        Ok(Self { grid, support, dim, values })
    }

    /// Scalar function from one value per supported node.
    pub fn scalar(grid: TimeGrid, support: Support, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, support, 1, values)
    }

    pub fn zeros(grid: TimeGrid, support: Support, dim: usize) -> Self {
        let n = support.len(grid.steps) * dim;
        Self { grid, support, dim, values: vec![0.0; n] }
    }

    /// Builds a function by evaluating `f(k, out)` at every supported node `k`.
    pub fn from_nodes(grid: TimeGrid, support: Support, dim: usize, mut f: impl FnMut(usize, &mut [f64])) -> Self {
        let mut out = Self::zeros(grid, support, dim);
        for k in support.range(grid.steps) {
            f(k, out.at_mut(k));
        }
        out
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn indices(&self) -> Range<usize> {
        self.support.range(self.grid.steps)
    }

    pub fn contains(&self, k: usize) -> bool {
        self.indices().contains(&k)
    }

    /// Sample at global node index `k`. Panics when `k` is outside the support.
    pub fn at(&self, k: usize) -> &[f64] {
        let r = self.indices();
        assert!(r.contains(&k), "node {k} outside {} support", self.support);
        let i = (k - r.start) * self.dim;
        &self.values[i..i + self.dim]
    }

    pub fn at_mut(&mut self, k: usize) -> &mut [f64] {
        let r = self.indices();
        assert!(r.contains(&k), "node {k} outside {} support", self.support);
        let i = (k - r.start) * self.dim;
        &mut self.values[i..i + self.dim]
    }

    pub fn get(&self, k: usize) -> Option<&[f64]> {
        self.contains(k).then(|| self.at(k))
    }

    /// Scalar sample at node `k`; panics for `dim != 1`.
    pub fn scalar_at(&self, k: usize) -> f64 {
        assert_eq!(self.dim, 1, "scalar_at on a {}-dimensional function", self.dim);
        self.at(k)[0]
    }

    /// Copy of `self` restricted to a smaller support.
    pub fn restrict(&self, support: Support) -> Result<Self> {
        if !support.within(self.support) {
            return Err(Error::Support { expected: "a superset of the requested support", found: self.support });
        }
        Ok(Self::from_nodes(self.grid, support, self.dim, |k, out| out.copy_from_slice(self.at(k))))
    }

    pub fn require_support(&self, expected: Support) -> Result<()> {
        if self.support != expected {
            return Err(Error::Support { expected: support_name(expected), found: self.support });
        }
        Ok(())
    }

    pub(crate) fn require_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::Dimension { expected: dim, found: self.dim });
        }
        Ok(())
    }

    pub fn check_combinable(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::NotCombinable("different grids".into()));
        }
        if self.support != other.support {
            return Err(Error::NotCombinable(format!("supports {} and {} differ", self.support, other.support)));
        }
        if self.dim != other.dim {
            return Err(Error::NotCombinable(format!("dimensions {} and {} differ", self.dim, other.dim)));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_combinable(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| f(x, y)).collect();
        Ok(Self { values, ..self.clone() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self { values: self.values.iter().map(|x| alpha * x).collect(), ..self.clone() }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { values: self.values.iter().map(|&x| f(x)).collect(), ..self.clone() }
    }

    /// Same values reinterpreted on another support of equal length.
    pub(crate) fn relabel(self, support: Support) -> Self {
        debug_assert_eq!(support.len(self.grid.steps), self.support.len(self.grid.steps));
        Self { support, ..self }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest componentwise distance to `other`, which must be combinable.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        self.check_combinable(other)?;
        Ok(self.values.iter().zip(&other.values).fold(0.0, |m, (x, y)| m.max((x - y).abs())))
    }

    /// Agreement up to `max(tol, tol * ||other||_inf)` in the sup norm.
    pub fn close_to(&self, other: &Self, tol: f64) -> bool {
        match self.sup_distance(other) {
            Ok(d) => d <= tol.max(tol * other.sup_norm().max(self.sup_norm())),
            Err(_) => false,
        }
    }

    /// True for a Full-support function vanishing at both end nodes.
    pub fn is_boundary_zero(&self) -> bool {
        self.support == Support::Full
            && self.at(0).iter().all(|&x| x == 0.0)
            && self.at(self.grid.steps).iter().all(|&x| x == 0.0)
    }
}

fn support_name(s: Support) -> &'static str {
    match s {
        Support::Full => "Full",
        Support::Plus => "Plus",
        Support::Minus => "Minus",
        Support::Interior => "Interior",
    }
}

/// Samples `f` at every node of `grid`.
///
/// Fails when `f` returns a non-finite component or changes output dimension,
/// naming the offending node.
pub fn discretise(grid: &TimeGrid, f: impl Fn(f64) -> Vec<f64>) -> Result<DiscreteFunction> {
    let mut values = Vec::new();
    let mut dim = None;
    for (k, t) in grid.nodes().enumerate() {
        let y = f(t);
        let d = *dim.get_or_insert(y.len());
        if y.len() != d || d == 0 {
            return Err(Error::Evaluation {
                node: k,
                t,
                reason: format!("returned {} components, expected {}", y.len(), d.max(1)),
            });
        }
        if let Some(bad) = y.iter().find(|v| !v.is_finite()) {
            return Err(Error::Evaluation { node: k, t, reason: format!("non-finite value {bad}") });
        }
        values.extend(y);
    }
    DiscreteFunction::new(*grid, Support::Full, dim.unwrap_or(1), values)
}

/// The constant function equal to `c` at every node.
pub fn constant_lift(c: &[f64], grid: &TimeGrid) -> DiscreteFunction {
    DiscreteFunction::from_nodes(*grid, Support::Full, c.len(), |_, out| out.copy_from_slice(c))
}

/// Shift from `T+` to `T-`: `sigma(F)(t_i) = F(t_{i-1})`.
pub fn sigma(f: &DiscreteFunction) -> Result<DiscreteFunction> {
    f.require_support(Support::Plus)?;
    Ok(f.clone().relabel(Support::Minus))
}

/// Shift from `T-` to `T+`: `rho(F)(t_i) = F(t_{i+1})`.
pub fn rho(f: &DiscreteFunction) -> Result<DiscreteFunction> {
    f.require_support(Support::Minus)?;
    Ok(f.clone().relabel(Support::Plus))
}

/// Pointwise (componentwise) product.
pub fn star(f: &DiscreteFunction, g: &DiscreteFunction) -> Result<DiscreteFunction> {
    f.zip_with(g, |x, y| x * y)
}

/// Pointwise Euclidean pairing; the result is scalar.
pub fn pair_star(f: &DiscreteFunction, g: &DiscreteFunction) -> Result<DiscreteFunction> {
    f.check_combinable(g)?;
    Ok(DiscreteFunction::from_nodes(f.grid, f.support, 1, |k, out| {
        out[0] = dot(f.at(k), g.at(k));
    }))
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Accepts Full data or data supported exactly on the summation range.
fn scalar_product(f: &DiscreteFunction, g: &DiscreteFunction, range: Support) -> Result<f64> {
    if f.support != Support::Full {
        f.require_support(range)?;
    }
    f.check_combinable(g)?;
    let h = f.grid.h;
    Ok(compensated_sum(range.range(f.grid.steps).map(|k| h * dot(f.at(k), g.at(k)))))
}

/// `h * sum_{k=0}^{N-1} <F_k, G_k>`, the left-rectangle scalar product.
pub fn scalar_product_plus(f: &DiscreteFunction, g: &DiscreteFunction) -> Result<f64> {
    scalar_product(f, g, Support::Plus)
}

/// `h * sum_{k=1}^{N} <F_k, G_k>`, the right-rectangle scalar product.
pub fn scalar_product_minus(f: &DiscreteFunction, g: &DiscreteFunction) -> Result<f64> {
    scalar_product(f, g, Support::Minus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize) -> TimeGrid {
        TimeGrid::new(a, b, n).unwrap()
    }

    fn example() -> DiscreteFunction {
        DiscreteFunction::scalar(grid(0.0, 6.0, 6), Support::Full, vec![2., 1., 3., 2., 7., 5., 2.]).unwrap()
    }

    #[test]
    fn grid_nodes_are_uniform() {
        let g = grid(-1.3, 2.9, 37);
        assert_eq!(g.node(0), -1.3);
        assert_eq!(g.node(37), 2.9);
        let ulp = 4.0 * f64::EPSILON * 2.9;
        for k in 0..37 {
            assert!((g.node(k + 1) - g.node(k) - g.h()).abs() <= 4.0 * ulp);
        }
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(TimeGrid::new(1.0, 1.0, 3).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0).is_err());
        assert!(TimeGrid::new(0.0, f64::NAN, 2).is_err());
    }

    #[test]
    fn support_ranges() {
        assert_eq!(Support::Full.range(4), 0..5);
        assert_eq!(Support::Plus.range(4), 0..4);
        assert_eq!(Support::Minus.range(4), 1..5);
        assert_eq!(Support::Interior.range(4), 1..4);
        assert_eq!(Support::Interior.len(1), 0);
    }

    #[test]
    fn discretise_samples_nodes() {
        let f = discretise(&grid(0.0, 6.0, 6), |t| vec![t]).unwrap();
        assert_eq!(f.values(), &[0., 1., 2., 3., 4., 5., 6.]);
        let sq = discretise(&grid(0.0, 2.0, 2), |t| vec![t * t]).unwrap();
        assert_eq!(sq.values(), &[0., 1., 4.]);
        let c = discretise(&grid(0.0, 1.0, 3), |_| vec![4.5]).unwrap();
        assert!(c.values().iter().all(|&x| x == 4.5));
    }

    #[test]
    fn discretise_names_failing_node() {
        let err = discretise(&grid(0.0, 4.0, 4), |t| vec![(2.0 - t).ln()]).unwrap_err();
        match err {
            Error::Evaluation { node, .. } => assert_eq!(node, 2),
            e => panic!("unexpected {e}"),
        }
        let err = discretise(&grid(0.0, 4.0, 4), |t| if t > 2.5 { vec![0.0; 2] } else { vec![0.0] }).unwrap_err();
        assert!(matches!(err, Error::Evaluation { node: 3, .. }));
    }

    #[test]
    fn constant_lift_is_constant() {
        let g = grid(0.0, 6.0, 6);
        assert_eq!(constant_lift(&[2.0], &g).values(), &[2.0; 7]);
        assert!(constant_lift(&[0.0, 0.0], &g).values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn sigma_relabels_plus_to_minus() {
        let g = grid(0.0, 6.0, 6);
        let f = DiscreteFunction::scalar(g, Support::Plus, vec![-1., 2., -1., 5., -2., -3.]).unwrap();
        let s = sigma(&f).unwrap();
        assert_eq!(s.support(), Support::Minus);
        for i in 1..=6 {
            assert_eq!(s.scalar_at(i), f.scalar_at(i - 1));
        }
        assert_eq!(rho(&s).unwrap(), f);
        assert!(sigma(&example()).is_err());
        assert!(rho(&f).is_err());
    }

    #[test]
    fn rho_single_node() {
        let g = grid(0.0, 1.0, 1);
        let m = DiscreteFunction::scalar(g, Support::Minus, vec![7.0]).unwrap();
        let p = rho(&m).unwrap();
        assert_eq!(p.scalar_at(0), 7.0);
        assert_eq!(sigma(&p).unwrap(), m);
    }

    #[test]
    fn star_and_pairing() {
        let g = grid(0.0, 2.0, 2);
        let f = DiscreteFunction::scalar(g, Support::Full, vec![1., 2., 3.]).unwrap();
        let h = DiscreteFunction::scalar(g, Support::Full, vec![4., 5., 6.]).unwrap();
        assert_eq!(star(&f, &h).unwrap().values(), &[4., 10., 18.]);
        assert_eq!(star(&f, &constant_lift(&[1.0], &g)).unwrap(), f);
        assert_eq!(pair_star(&f, &h).unwrap(), star(&f, &h).unwrap());

        let g1 = grid(0.0, 1.0, 1);
        let a = DiscreteFunction::new(g1, Support::Full, 2, vec![1., 0., 0., 1.]).unwrap();
        let b = DiscreteFunction::new(g1, Support::Full, 2, vec![0., 1., 1., 0.]).unwrap();
        assert_eq!(pair_star(&a, &b).unwrap().values(), &[0., 0.]);

        let one = DiscreteFunction::new(g1, Support::Plus, 2, vec![3., 4.]).unwrap();
        assert_eq!(pair_star(&one, &one).unwrap().values(), &[25.]);
    }

    #[test]
    fn star_rejects_mismatch() {
        let g = grid(0.0, 2.0, 2);
        let f = DiscreteFunction::scalar(g, Support::Full, vec![1., 2., 3.]).unwrap();
        let p = DiscreteFunction::scalar(g, Support::Plus, vec![1., 2.]).unwrap();
        assert!(matches!(star(&f, &p), Err(Error::NotCombinable(_))));
        let other = DiscreteFunction::scalar(grid(0.0, 4.0, 2), Support::Full, vec![1., 2., 3.]).unwrap();
        assert!(star(&f, &other).is_err());
        let v = DiscreteFunction::new(g, Support::Full, 2, vec![0.0; 6]).unwrap();
        assert!(pair_star(&f, &v).is_err());
    }

    #[test]
    fn scalar_products_on_example() {
        let f = example();
        assert_eq!(scalar_product_plus(&f, &f).unwrap(), 92.0);
        assert_eq!(scalar_product_minus(&f, &f).unwrap(), 92.0);
    }

    #[test]
    fn scalar_products_ignore_one_endpoint() {
        let g = grid(0.0, 1.0, 5);
        let mut last = DiscreteFunction::zeros(g, Support::Full, 1);
        last.at_mut(5)[0] = 3.0;
        assert_eq!(scalar_product_plus(&last, &last).unwrap(), 0.0);
        let mut first = DiscreteFunction::zeros(g, Support::Full, 1);
        first.at_mut(0)[0] = 3.0;
        assert_eq!(scalar_product_minus(&first, &first).unwrap(), 0.0);
    }

    #[test]
    fn plus_product_degenerate_exactly_on_last_node() {
        // exhaustive over {-1, 0, 1}^(N+1), N <= 4
        for n in 1..=4usize {
            let g = grid(0.0, 1.0, n);
            let count = 3usize.pow(n as u32 + 1);
            for code in 0..count {
                let mut c = code;
                let vals: Vec<f64> = (0..=n)
                    .map(|_| {
                        let v = (c % 3) as f64 - 1.0;
                        c /= 3;
                        v
                    })
                    .collect();
                let f = DiscreteFunction::scalar(g, Support::Full, vals.clone()).unwrap();
                let p = scalar_product_plus(&f, &f).unwrap();
                assert!(p >= 0.0);
                assert_eq!(p == 0.0, vals[..n].iter().all(|&x| x == 0.0));
            }
        }
    }

    #[test]
    fn boundary_zero_predicate() {
        let g = grid(0.0, 1.0, 3);
        let f = DiscreteFunction::scalar(g, Support::Full, vec![0., 1., 2., 0.]).unwrap();
        assert!(f.is_boundary_zero());
        let f = DiscreteFunction::scalar(g, Support::Full, vec![0., 1., 2., 1e-300]).unwrap();
        assert!(!f.is_boundary_zero());
    }

    #[test]
    fn restrict_checks_inclusion() {
        let f = example();
        let p = f.restrict(Support::Plus).unwrap();
        assert_eq!(p.values(), &[2., 1., 3., 2., 7., 5.]);
        let i = p.restrict(Support::Interior).unwrap();
        assert_eq!(i.values(), &[1., 3., 2., 7., 5.]);
        assert!(p.restrict(Support::Minus).is_err());
    }
}
