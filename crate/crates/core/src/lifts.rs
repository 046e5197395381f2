//! Lifts of discrete data to piecewise polynomials and the projection back.
//!
//! A [`PiecewisePoly`] is made of blocks spanning `block` grid steps. Each
//! block stores, per component, up to four power-basis coefficients in the
//! local variable `u = t - t_start` of that block.

use crate::error::{Error, Result};
use crate::grid::{DiscreteFunction, Support, TimeGrid};
use crate::sum::CompensatedSum;

pub const MAX_DEGREE: usize = 3;

/// Power-basis coefficients `c0 + c1 u + c2 u^2 + c3 u^3`.
pub type Coeffs = [f64; MAX_DEGREE + 1];

/// Which one-sided limit a piecewise polynomial takes at block boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinuitySide {
    /// Segment `i` owns `[t_i, t_{i+1})`.
    RightContinuous,
    /// Segment `i` owns `(t_i, t_{i+1}]`.
    LeftContinuous,
    /// Adjacent segments agree at shared boundaries.
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    grid: TimeGrid,
    block: usize,
    side: ContinuitySide,
    dim: usize,
    segments: Vec<Coeffs>,
}

fn horner(c: &Coeffs, u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &x| acc * u + x)
}

impl PiecewisePoly {
    /// Builds a piecewise polynomial from per-block coefficient rows.
    ///
    /// `segments[s * dim + c]` holds component `c` of block `s`. Continuous
    /// polynomials are checked for agreement at interior block boundaries.
    pub fn from_segments(
        grid: TimeGrid,
        block: usize,
        side: ContinuitySide,
        dim: usize,
        segments: Vec<Coeffs>,
    ) -> Result<Self> {
        if block == 0 || block > MAX_DEGREE {
            return Err(Error::InvalidPolynomial(format!("block width {block} not in 1..=3")));
        }
        grid.require_divisible(block)?;
        if dim == 0 {
            return Err(Error::Dimension { expected: 1, found: 0 });
        }
        let blocks = grid.steps() / block;
        if segments.len() != blocks * dim {
            return Err(Error::Dimension { expected: blocks * dim, found: segments.len() });
        }
        if segments.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPolynomial("non-finite coefficient".into()));
        }
        let p = Self { grid, block, side, dim, segments };
        if side == ContinuitySide::Continuous {
            let width = block as f64 * grid.h();
            for s in 1..blocks {
                for c in 0..dim {
                    let left = horner(p.segment(s - 1, c), width);
                    let right = p.segment(s, c)[0];
                    if (left - right).abs() > 1e-12 * left.abs().max(right.abs()).max(1.0) {
                        return Err(Error::InvalidPolynomial(format!(
                            "jump {left} -> {right} at block boundary {s}, component {c}"
                        )));
                    }
                }
            }
        }
        Ok(p)
    }

    pub fn zero(grid: TimeGrid, block: usize, side: ContinuitySide, dim: usize) -> Result<Self> {
        grid.require_divisible(block)?;
        let n = grid.steps() / block * dim;
        Self::from_segments(grid, block, side, dim, vec![[0.0; 4]; n])
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Block width in grid steps.
    pub fn block(&self) -> usize {
        self.block
    }

    pub fn side(&self) -> ContinuitySide {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> usize {
        self.grid.steps() / self.block
    }

    pub fn segment(&self, s: usize, c: usize) -> &Coeffs {
        &self.segments[s * self.dim + c]
    }

    pub fn segments(&self) -> &[Coeffs] {
        &self.segments
    }

    /// Highest power with a non-zero coefficient over all segments.
    pub fn degree(&self) -> usize {
        self.segments.iter().map(|c| c.iter().rposition(|&x| x != 0.0).unwrap_or(0)).max().unwrap_or(0)
    }

    fn block_start(&self, s: usize) -> f64 {
        self.grid.node(s * self.block)
    }

    /// Block owning node `k` under this polynomial's side convention.
    fn block_of_node(&self, k: usize) -> usize {
        let last = self.blocks() - 1;
        match self.side {
            ContinuitySide::LeftContinuous => {
                if k == 0 {
                    0
                } else {
                    (k - 1) / self.block
                }
            }
            _ => (k / self.block).min(last),
        }
    }

    fn eval_block(&self, s: usize, u: f64) -> Vec<f64> {
        (0..self.dim).map(|c| horner(self.segment(s, c), u)).collect()
    }

    fn eval_node(&self, k: usize) -> Vec<f64> {
        let s = self.block_of_node(k);
        let u = (k - s * self.block) as f64 * self.grid.h();
        self.eval_block(s, u)
    }

    /// Value at `t`, using the side convention at block boundaries and the
    /// adjacent segment's closure at the endpoint a one-sided space lacks.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let (a, b) = (self.grid.a(), self.grid.b());
        if !(t >= a && t <= b) {
            return Err(Error::Domain { t, a, b });
        }
        let pos = (t - a) / self.grid.h();
        let k = pos.round();
        if (pos - k).abs() <= 1e-12 * pos.max(1.0) {
            return Ok(self.eval_node(k as usize));
        }
        let s = ((pos / self.block as f64).floor() as usize).min(self.blocks() - 1);
        Ok(self.eval_block(s, t - self.block_start(s)))
    }
}

/// Samples a piecewise polynomial at every grid node.
pub fn pi_project(p: &PiecewisePoly) -> DiscreteFunction {
    DiscreteFunction::from_nodes(p.grid, Support::Full, p.dim, |k, out| out.copy_from_slice(&p.eval_node(k)))
}

/// Lagrange basis on a handful of nodes, expanded to power-basis coefficients.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl LagrangeBasis {
    pub fn new(nodes: &[f64]) -> Result<Self> {
        if nodes.is_empty() || nodes.len() > MAX_DEGREE + 1 {
            return Err(Error::InvalidPolynomial(format!("{} interpolation nodes", nodes.len())));
        }
        let mut weights = Vec::with_capacity(nodes.len());
        for (i, &ti) in nodes.iter().enumerate() {
            let mut prod = 1.0;
            for (j, &tj) in nodes.iter().enumerate() {
                if i != j {
                    prod *= ti - tj;
                }
            }
            if prod == 0.0 {
                return Err(Error::InvalidPolynomial("repeated interpolation node".into()));
            }
            weights.push(1.0 / prod);
        }
        Ok(Self { nodes: nodes.to_vec(), weights })
    }

    /// Nodes `0, h, ..., (m-1) h` in a block's local variable.
    pub fn uniform(m: usize, h: f64) -> Result<Self> {
        let nodes: Vec<f64> = (0..m).map(|j| j as f64 * h).collect();
        Self::new(&nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Coefficients of `l_i(u) = w_i * prod_{j != i} (u - T_j)`.
    pub fn basis(&self, i: usize) -> Coeffs {
        let mut poly: Coeffs = [0.0; 4];
        poly[0] = self.weights[i];
        for (j, &tj) in self.nodes.iter().enumerate() {
            if j == i {
                continue;
            }
            // multiply by (u - tj)
            for d in (0..=MAX_DEGREE).rev() {
                let shifted = if d > 0 { poly[d - 1] } else { 0.0 };
                poly[d] = shifted - tj * poly[d];
            }
        }
        poly
    }

    /// Coefficients of the interpolant through `(T_j, values[j])`.
    pub fn interpolate(&self, values: &[f64]) -> Coeffs {
        assert_eq!(values.len(), self.nodes.len());
        let mut out: Coeffs = [0.0; 4];
        for (i, &v) in values.iter().enumerate() {
            let b = self.basis(i);
            for d in 0..=MAX_DEGREE {
                out[d] += v * b[d];
            }
        }
        out
    }

    /// Barycentric evaluation of the interpolant (second form).
    pub fn eval_interpolant(&self, values: &[f64], u: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&tj, &w), &v) in self.nodes.iter().zip(&self.weights).zip(values) {
            if u == tj {
                return v;
            }
            let q = w / (u - tj);
            num += q * v;
            den += q;
        }
        num / den
    }
}

fn require_nodes(f: &DiscreteFunction, needs: Support) -> Result<()> {
    if needs.within(f.support()) {
        Ok(())
    } else {
        Err(Error::Support {
            expected: match needs {
                Support::Plus => "Full or Plus",
                Support::Minus => "Full or Minus",
                _ => "Full",
            },
            found: f.support(),
        })
    }
}

/// Interpolates each block through `points` consecutive nodes starting at the
/// block start, then extends that polynomial over the whole block.
fn lagrange_blocks(f: &DiscreteFunction, block: usize, points: usize, side: ContinuitySide) -> Result<PiecewisePoly> {
    let grid = *f.grid();
    grid.require_divisible(block)?;
    let basis = LagrangeBasis::uniform(points, grid.h())?;
    let dim = f.dim();
    let mut segments = Vec::with_capacity(grid.steps() / block * dim);
    let mut vals = vec![0.0; points];
    for s in 0..grid.steps() / block {
        for c in 0..dim {
            for (j, v) in vals.iter_mut().enumerate() {
                *v = f.at(s * block + j)[c];
            }
            segments.push(basis.interpolate(&vals));
        }
    }
    PiecewisePoly::from_segments(grid, block, side, dim, segments)
}

/// Piecewise-constant lift with value `F_i` on `[t_i, t_{i+1})`.
pub fn iota0_plus(f: &DiscreteFunction) -> Result<PiecewisePoly> {
    require_nodes(f, Support::Plus)?;
    let grid = *f.grid();
    let segments = (0..grid.steps()).flat_map(|k| f.at(k).iter().map(|&v| [v, 0.0, 0.0, 0.0])).collect();
    PiecewisePoly::from_segments(grid, 1, ContinuitySide::RightContinuous, f.dim(), segments)
}

/// Piecewise-constant lift with value `F_i` on `(t_{i-1}, t_i]`.
pub fn iota0_minus(f: &DiscreteFunction) -> Result<PiecewisePoly> {
    require_nodes(f, Support::Minus)?;
    let grid = *f.grid();
    let segments = (1..=grid.steps()).flat_map(|k| f.at(k).iter().map(|&v| [v, 0.0, 0.0, 0.0])).collect();
    PiecewisePoly::from_segments(grid, 1, ContinuitySide::LeftContinuous, f.dim(), segments)
}

/// Continuous piecewise-linear interpolant.
pub fn iota1(f: &DiscreteFunction) -> Result<PiecewisePoly> {
    f.require_support(Support::Full)?;
    let grid = *f.grid();
    let h = grid.h();
    let mut segments = Vec::with_capacity(grid.steps() * f.dim());
    for k in 0..grid.steps() {
        for (&x0, &x1) in f.at(k).iter().zip(f.at(k + 1)) {
            segments.push([x0, (x1 - x0) / h, 0.0, 0.0]);
        }
    }
    PiecewisePoly::from_segments(grid, 1, ContinuitySide::Continuous, f.dim(), segments)
}

/// Continuous piecewise-quadratic interpolant on 2-step blocks.
pub fn iota2(f: &DiscreteFunction) -> Result<PiecewisePoly> {
    f.require_support(Support::Full)?;
    lagrange_blocks(f, 2, 3, ContinuitySide::Continuous)
}

/// Continuous piecewise-cubic interpolant on 3-step blocks.
pub fn iota3(f: &DiscreteFunction) -> Result<PiecewisePoly> {
    f.require_support(Support::Full)?;
    lagrange_blocks(f, 3, 4, ContinuitySide::Continuous)
}

/// Right-continuous lift on 2-step blocks: the line through the first two
/// block nodes.
pub fn iota1_plus(f: &DiscreteFunction) -> Result<PiecewisePoly> {
    require_nodes(f, Support::Plus)?;
    f.grid().require_divisible(2)?;
    let h = f.grid().h();
    let mut segments = Vec::new();
    for s in 0..f.grid().steps() / 2 {
        for (&x0, &x1) in f.at(2 * s).iter().zip(f.at(2 * s + 1)) {
            segments.push([x0, (x1 - x0) / h, 0.0, 0.0]);
        }
    }
    PiecewisePoly::from_segments(*f.grid(), 2, ContinuitySide::RightContinuous, f.dim(), segments)
}

/// Right-continuous lift on 3-step blocks: the quadratic through the first
/// three block nodes.
pub fn iota2_plus(f: &DiscreteFunction) -> Result<PiecewisePoly> {
    require_nodes(f, Support::Plus)?;
    lagrange_blocks(f, 3, 3, ContinuitySide::RightContinuous)
}

fn differentiate(p: &PiecewisePoly, side: ContinuitySide) -> PiecewisePoly {
    let segments = p.segments.iter().map(|c| [c[1], 2.0 * c[2], 3.0 * c[3], 0.0]).collect();
    PiecewisePoly { segments, side, ..p.clone() }
}

/// Segmentwise right derivative.
pub fn d_plus(p: &PiecewisePoly) -> PiecewisePoly {
    differentiate(p, ContinuitySide::RightContinuous)
}

/// Segmentwise left derivative.
pub fn d_minus(p: &PiecewisePoly) -> PiecewisePoly {
    differentiate(p, ContinuitySide::LeftContinuous)
}

/// Exact `t -> int_a^t p(s) ds`. Fails for cubic input, whose primitive would
/// leave the degree-3 space.
pub fn antiderivative(p: &PiecewisePoly) -> Result<PiecewisePoly> {
    if p.segments.iter().any(|c| c[3] != 0.0) {
        return Err(Error::DegreeOverflow);
    }
    let width = p.block as f64 * p.grid.h();
    let mut offsets: Vec<CompensatedSum> = vec![CompensatedSum::new(); p.dim];
    let mut segments = Vec::with_capacity(p.segments.len());
    for s in 0..p.blocks() {
        for (c, acc) in offsets.iter_mut().enumerate() {
            let q = p.segment(s, c);
            let prim = [0.0, q[0], q[1] / 2.0, q[2] / 3.0];
            segments.push([acc.value(), prim[1], prim[2], prim[3]]);
            acc.add(horner(&prim, width));
        }
    }
    Ok(PiecewisePoly { segments, side: ContinuitySide::Continuous, ..p.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::discretise;

    fn grid(a: f64, b: f64, n: usize) -> TimeGrid {
        TimeGrid::new(a, b, n).unwrap()
    }

    fn example() -> DiscreteFunction {
        DiscreteFunction::scalar(grid(0.0, 6.0, 6), Support::Full, vec![2., 1., 3., 2., 7., 5., 2.]).unwrap()
    }

    #[test]
    fn partition_of_unity() {
        for m in 1..=4 {
            for h in [1.0, 0.1, 3.7] {
                let basis = LagrangeBasis::uniform(m, h).unwrap();
                let mut total = [0.0; 4];
                for i in 0..m {
                    let b = basis.basis(i);
                    for d in 0..4 {
                        total[d] += b[d];
                    }
                }
                assert!((total[0] - 1.0).abs() < 1e-12);
                for d in 1..4 {
                    assert!(total[d].abs() < 1e-11 / h.powi(d as i32), "m={m} h={h} {total:?}");
                }
            }
        }
    }

    #[test]
    fn basis_is_cardinal() {
        let basis = LagrangeBasis::new(&[0.0, 0.5, 1.5, 2.0]).unwrap();
        for i in 0..4 {
            for (j, &t) in basis.nodes().iter().enumerate() {
                let v = horner(&basis.basis(i), t);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((v - expect).abs() < 1e-12);
            }
        }
        assert!(LagrangeBasis::new(&[0.0, 1.0, 1.0]).is_err());
        let vals = [1.0, -2.0, 0.5, 4.0];
        let coeffs = basis.interpolate(&vals);
        for u in [0.1, 0.7, 1.9] {
            assert!((basis.eval_interpolant(&vals, u) - horner(&coeffs, u)).abs() < 1e-12);
        }
    }

    #[test]
    fn iota0_values_on_example() {
        let f = example();
        assert_eq!(iota0_plus(&f).unwrap().eval(0.5).unwrap(), vec![2.0]);
        assert_eq!(iota0_minus(&f).unwrap().eval(0.5).unwrap(), vec![1.0]);
        // right continuity at interior nodes, closure at t = b
        let p = iota0_plus(&f).unwrap();
        for i in 0..6 {
            assert_eq!(p.eval(i as f64).unwrap(), vec![f.scalar_at(i)]);
        }
        assert_eq!(p.eval(6.0).unwrap(), vec![5.0]);
        let projected = pi_project(&p);
        assert_eq!(projected.values(), &[2., 1., 3., 2., 7., 5., 5.]);
        let m = iota0_minus(&f).unwrap();
        assert_eq!(pi_project(&m).values(), &[1., 1., 3., 2., 7., 5., 2.]);
    }

    #[test]
    fn iota0_of_constant_is_constant() {
        let g = grid(0.0, 1.0, 4);
        let c = crate::grid::constant_lift(&[3.0], &g);
        for p in [iota0_plus(&c).unwrap(), iota0_minus(&c).unwrap()] {
            assert_eq!(p.degree(), 0);
            assert!(p.segments().iter().all(|s| s[0] == 3.0));
        }
    }

    #[test]
    fn iota1_midpoint_and_projection() {
        let g = grid(0.0, 1.0, 1);
        let f = DiscreteFunction::scalar(g, Support::Full, vec![2.0, 1.0]).unwrap();
        assert_eq!(iota1(&f).unwrap().eval(0.5).unwrap(), vec![1.5]);
        let e = example();
        assert_eq!(pi_project(&iota1(&e).unwrap()), e);
    }

    #[test]
    fn iota1_reproduces_lines() {
        let g = grid(-1.0, 2.0, 9);
        let f = discretise(&g, |t| vec![3.0 * t - 0.5]).unwrap();
        let p = iota1(&f).unwrap();
        for t in [-0.93, 0.0, 0.41, 1.999] {
            assert!((p.eval(t).unwrap()[0] - (3.0 * t - 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn iota2_through_square() {
        let g = grid(0.0, 2.0, 2);
        let f = DiscreteFunction::scalar(g, Support::Full, vec![0.0, 1.0, 4.0]).unwrap();
        let p = iota2(&f).unwrap();
        assert!((p.eval(1.5).unwrap()[0] - 2.25).abs() < 1e-14);
        assert_eq!(pi_project(&p), f);
        let q = d_plus(&p);
        for t in [0.0, 0.3, 1.0, 1.7] {
            assert!((q.eval(t).unwrap()[0] - 2.0 * t).abs() < 1e-14);
        }
        assert!(iota2(&example().restrict(Support::Full).unwrap()).is_ok());
        let odd = discretise(&grid(0.0, 1.0, 3), |t| vec![t]).unwrap();
        assert_eq!(iota2(&odd).unwrap_err(), Error::Divisibility { steps: 3, block: 2 });
    }

    #[test]
    fn iota3_through_cube() {
        let g = grid(0.0, 3.0, 3);
        let f = DiscreteFunction::scalar(g, Support::Full, vec![0.0, 1.0, 8.0, 27.0]).unwrap();
        let p = iota3(&f).unwrap();
        for t in [0.25, 1.5, 2.9] {
            assert!((p.eval(t).unwrap()[0] - t * t * t).abs() < 1e-12);
        }
        let c = crate::grid::constant_lift(&[-2.0], &g);
        let lifted = iota3(&c).unwrap();
        assert!(lifted.segments().iter().all(|s| s[0] == -2.0 && s[1..].iter().all(|x| x.abs() < 1e-14)));
        assert!(iota3(&example()).is_ok());
        assert!(iota3(&discretise(&grid(0.0, 1.0, 4), |t| vec![t]).unwrap()).is_err());
    }

    #[test]
    fn iota1_plus_two_point_line() {
        let g = grid(0.0, 2.0, 2);
        let f = DiscreteFunction::scalar(g, Support::Plus, vec![0.0, 2.0]).unwrap();
        let p = iota1_plus(&f).unwrap();
        for t in [0.0, 0.5, 1.0, 1.5, 2.0] {
            assert!((p.eval(t).unwrap()[0] - 2.0 * t).abs() < 1e-14);
        }
        let c = crate::grid::constant_lift(&[1.5], &grid(0.0, 1.0, 4));
        assert_eq!(iota1_plus(&c).unwrap().degree(), 0);
    }

    #[test]
    fn iota2_plus_three_point_quadratic() {
        let g = grid(0.0, 3.0, 3);
        let f = DiscreteFunction::scalar(g, Support::Plus, vec![0.0, 2.0, 4.0]).unwrap();
        let p = iota2_plus(&f).unwrap();
        for t in [0.0, 1.2, 2.5, 3.0] {
            assert!((p.eval(t).unwrap()[0] - 2.0 * t).abs() < 1e-13);
        }
        let z = DiscreteFunction::zeros(grid(0.0, 1.0, 6), Support::Plus, 2);
        assert!(iota2_plus(&z).unwrap().segments().iter().all(|s| s == &[0.0; 4]));
    }

    #[test]
    fn one_sided_derivatives_of_linear_lift() {
        let f = example();
        let p = iota1(&f).unwrap();
        let dp = pi_project(&d_plus(&p));
        let dm = pi_project(&d_minus(&p));
        for k in 0..6 {
            assert_eq!(dp.scalar_at(k), f.scalar_at(k + 1) - f.scalar_at(k));
            assert_eq!(dm.scalar_at(k + 1), f.scalar_at(k + 1) - f.scalar_at(k));
        }
        let c = crate::grid::constant_lift(&[4.0], f.grid());
        assert!(pi_project(&d_plus(&iota1(&c).unwrap())).values().iter().all(|&x| x == 0.0));
        assert!(pi_project(&d_minus(&iota1(&c).unwrap())).values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn antiderivative_of_rectangles() {
        let p = iota0_plus(&example()).unwrap();
        let big = antiderivative(&p).unwrap();
        assert_eq!(big.side(), ContinuitySide::Continuous);
        assert_eq!(big.eval(0.0).unwrap(), vec![0.0]);
        assert_eq!(big.eval(1.0).unwrap(), vec![2.0]);
        assert_eq!(big.eval(2.0).unwrap(), vec![3.0]);
        assert_eq!(big.eval(1.5).unwrap(), vec![2.5]);
    }

    #[test]
    fn antiderivative_of_linear() {
        let g = grid(0.0, 2.0, 2);
        let f = DiscreteFunction::scalar(g, Support::Plus, vec![0.0, 2.0]).unwrap();
        let big = antiderivative(&iota1_plus(&f).unwrap()).unwrap();
        assert!((big.eval(2.0).unwrap()[0] - 4.0).abs() < 1e-14);
        assert!((big.eval(1.3).unwrap()[0] - 1.69).abs() < 1e-14);
        let zero = PiecewisePoly::zero(g, 1, ContinuitySide::Continuous, 1).unwrap();
        assert_eq!(antiderivative(&zero).unwrap(), zero);
        assert_eq!(pi_project(&zero).values(), &[0.0; 3]);
    }

    #[test]
    fn antiderivative_rejects_cubics() {
        let f = DiscreteFunction::scalar(grid(0.0, 3.0, 3), Support::Full, vec![0., 1., 8., 27.]).unwrap();
        assert_eq!(antiderivative(&iota3(&f).unwrap()).unwrap_err(), Error::DegreeOverflow);
    }

    #[test]
    fn continuity_is_validated() {
        let g = grid(0.0, 2.0, 2);
        let bad = vec![[0.0, 1.0, 0.0, 0.0], [2.0, 0.0, 0.0, 0.0]];
        assert!(PiecewisePoly::from_segments(g, 1, ContinuitySide::Continuous, 1, bad.clone()).is_err());
        assert!(PiecewisePoly::from_segments(g, 1, ContinuitySide::RightContinuous, 1, bad).is_ok());
        assert!(PiecewisePoly::from_segments(g, 4, ContinuitySide::RightContinuous, 1, vec![]).is_err());
    }

    #[test]
    fn eval_domain_and_boundaries() {
        let f = example();
        let p = iota0_plus(&f).unwrap();
        assert!(matches!(p.eval(-0.1), Err(Error::Domain { .. })));
        assert!(matches!(p.eval(6.1), Err(Error::Domain { .. })));
        let m = iota0_minus(&f).unwrap();
        assert_eq!(m.eval(0.0).unwrap(), vec![1.0]);
        assert_eq!(m.eval(3.0).unwrap(), vec![2.0]);
        assert_eq!(m.eval(6.0).unwrap(), vec![2.0]);
    }

    #[test]
    fn step_lift_recovers_step_functions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..12 {
            let g = grid(0.0, 1.0, n);
            let segs: Vec<Coeffs> = (0..n).map(|_| [rng.gen_range(-5.0..5.0), 0.0, 0.0, 0.0]).collect();
            let right = PiecewisePoly::from_segments(g, 1, ContinuitySide::RightContinuous, 1, segs.clone()).unwrap();
            assert_eq!(iota0_plus(&pi_project(&right)).unwrap(), right);
            let left = PiecewisePoly::from_segments(g, 1, ContinuitySide::LeftContinuous, 1, segs).unwrap();
            assert_eq!(iota0_minus(&pi_project(&left)).unwrap(), left);
        }
    }
}
