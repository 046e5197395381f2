//! Discrete derivatives and antiderivatives of interpolation orders 1 to 3.
//!
//! Every operator has a closed-form stencil here and a second implementation
//! in [`pipeline`] that composes lift, exact calculus on the piecewise
//! polynomial, and projection. The two must agree to rounding.

use crate::error::{Error, Result};
use crate::grid::{pair_star, DiscreteFunction, Support};
use crate::sum::CompensatedSum;

/// Discrete derivative and antiderivative operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Delta,
    Nabla,
    Delta2,
    Delta3,
    JDelta,
    JNabla,
    JDelta2,
    JDelta3,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 8] = [
        OperatorKind::Delta,
        OperatorKind::Nabla,
        OperatorKind::Delta2,
        OperatorKind::Delta3,
        OperatorKind::JDelta,
        OperatorKind::JNabla,
        OperatorKind::JDelta2,
        OperatorKind::JDelta3,
    ];

    /// Required divisor of the step count.
    pub fn block(self) -> usize {
        match self {
            OperatorKind::Delta2 | OperatorKind::JDelta2 => 2,
            OperatorKind::Delta3 | OperatorKind::JDelta3 => 3,
            _ => 1,
        }
    }

    /// Support of the input this operator reads; antiderivatives also accept Full.
    pub fn input_support(self) -> Support {
        match self {
            OperatorKind::JDelta | OperatorKind::JDelta2 | OperatorKind::JDelta3 => Support::Plus,
            OperatorKind::JNabla => Support::Minus,
            _ => Support::Full,
        }
    }

    pub fn apply(self, f: &DiscreteFunction) -> Result<DiscreteFunction> {
        match self {
            OperatorKind::Delta => delta(f),
            OperatorKind::Nabla => nabla(f),
            OperatorKind::Delta2 => delta2(f),
            OperatorKind::Delta3 => delta3(f),
            OperatorKind::JDelta => j_delta(f),
            OperatorKind::JNabla => j_nabla(f),
            OperatorKind::JDelta2 => j_delta2(f),
            OperatorKind::JDelta3 => j_delta3(f),
        }
    }

    /// Same operator computed through lift, exact calculus and projection.
    pub fn apply_pipeline(self, f: &DiscreteFunction) -> Result<DiscreteFunction> {
        match self {
            OperatorKind::Delta => pipeline::delta(f),
            OperatorKind::Nabla => pipeline::nabla(f),
            OperatorKind::Delta2 => pipeline::delta2(f),
            OperatorKind::Delta3 => pipeline::delta3(f),
            OperatorKind::JDelta => pipeline::j_delta(f),
            OperatorKind::JNabla => pipeline::j_nabla(f),
            OperatorKind::JDelta2 => pipeline::j_delta2(f),
            OperatorKind::JDelta3 => pipeline::j_delta3(f),
        }
    }
}

fn require_full(f: &DiscreteFunction) -> Result<()> {
    f.require_support(Support::Full)
}

fn require_plus_nodes(f: &DiscreteFunction) -> Result<()> {
    if Support::Plus.within(f.support()) {
        Ok(())
    } else {
        Err(Error::Support { expected: "Full or Plus", found: f.support() })
    }
}

fn require_minus_nodes(f: &DiscreteFunction) -> Result<()> {
    if Support::Minus.within(f.support()) {
        Ok(())
    } else {
        Err(Error::Support { expected: "Full or Minus", found: f.support() })
    }
}

/// Applies a block stencil: node `block * s + r` of the Plus-supported output
/// is `sum_j rows[r][j] * F_{block * s + j} / (scale * h)`.
fn block_stencil<const W: usize>(f: &DiscreteFunction, rows: &[[f64; W]], scale: f64) -> Result<DiscreteFunction> {
    require_full(f)?;
    let block = rows.len();
    let grid = *f.grid();
    grid.require_divisible(block)?;
    let denom = scale * grid.h();
    Ok(DiscreteFunction::from_nodes(grid, Support::Plus, f.dim(), |k, out| {
        let start = k - k % block;
        let row = &rows[k % block];
        for (c, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, w) in row.iter().enumerate() {
                acc += w * f.at(start + j)[c];
            }
            *o = acc / denom;
        }
    }))
}

/// Forward difference `(F_{k+1} - F_k) / h` on `T+`.
pub fn delta(f: &DiscreteFunction) -> Result<DiscreteFunction> {
    require_full(f)?;
    let h = f.grid().h();
    Ok(DiscreteFunction::from_nodes(*f.grid(), Support::Plus, f.dim(), |k, out| {
        for ((o, x1), x0) in out.iter_mut().zip(f.at(k + 1)).zip(f.at(k)) {
            *o = (x1 - x0) / h;
        }
    }))
}

/// Backward difference `(F_k - F_{k-1}) / h` on `T-`.
pub fn nabla(f: &DiscreteFunction) -> Result<DiscreteFunction> {
    require_full(f)?;
    let h = f.grid().h();
    Ok(DiscreteFunction::from_nodes(*f.grid(), Support::Minus, f.dim(), |k, out| {
        for ((o, x1), x0) in out.iter_mut().zip(f.at(k)).zip(f.at(k - 1)) {
            *o = (x1 - x0) / h;
        }
    }))
}

/// Right derivative of the blockwise quadratic interpolant, at nodes `2k`, `2k+1`.
pub fn delta2(f: &DiscreteFunction) -> Result<DiscreteFunction> {
    block_stencil(f, &[[-3.0, 4.0, -1.0], [-1.0, 0.0, 1.0]], 2.0)
}

/// Right derivative of the blockwise cubic interpolant, at nodes `3k..3k+2`.
pub fn delta3(f: &DiscreteFunction) -> Result<DiscreteFunction> {
    block_stencil(f, &[[-11.0, 18.0, -9.0, 2.0], [-2.0, -3.0, 6.0, -1.0], [1.0, -6.0, 3.0, 2.0]], 6.0)
}

/// Cumulative block quadrature. For each block of width `block` starting at
/// `s`, `full(F, s)` is the whole-block integral and `partial(F, s, r)` the
/// integral from the block start to node `s + r` (`0 < r < block`).
fn block_antiderivative(
    f: &DiscreteFunction,
    block: usize,
    full: impl Fn(&DiscreteFunction, usize, usize) -> f64,
    partial: impl Fn(&DiscreteFunction, usize, usize, usize) -> f64,
) -> Result<DiscreteFunction> {
    let grid = *f.grid();
    grid.require_divisible(block)?;
    let dim = f.dim();
    let mut out = DiscreteFunction::zeros(grid, Support::Full, dim);
    let mut acc = vec![CompensatedSum::new(); dim];
    for s in (0..grid.steps()).step_by(block) {
        for (c, a) in acc.iter_mut().enumerate() {
            let base = a.value();
            for r in 1..block {
                out.at_mut(s + r)[c] = base + partial(f, s, r, c);
            }
            a.add(full(f, s, c));
            out.at_mut(s + block)[c] = a.value();
        }
    }
    Ok(out)
}

/// Left-rectangle antiderivative `[J F]_k = h * sum_{i<k} F_i`.
pub fn j_delta(f: &DiscreteFunction) -> Result<DiscreteFunction> {
    require_plus_nodes(f)?;
    let h = f.grid().h();
    block_antiderivative(f, 1, |f, s, c| h * f.at(s)[c], |_, _, _, _| unreachable!())
}

/// Right-rectangle antiderivative `[J F]_k = h * sum_{1<=i<=k} F_i`.
pub fn j_nabla(f: &DiscreteFunction) -> Result<DiscreteFunction> {
    require_minus_nodes(f)?;
    let h = f.grid().h();
    block_antiderivative(f, 1, |f, s, c| h * f.at(s + 1)[c], |_, _, _, _| unreachable!())
}

/// Antiderivative paired with [`delta2`]: midpoint rule over each 2-block,
/// trapezoid to the block's middle node.
pub fn j_delta2(f: &DiscreteFunction) -> Result<DiscreteFunction> {
    require_plus_nodes(f)?;
    let h = f.grid().h();
    block_antiderivative(f, 2, |f, s, c| 2.0 * h * f.at(s + 1)[c], |f, s, _, c| h * (f.at(s)[c] + f.at(s + 1)[c]) / 2.0)
}

/// Antiderivative paired with [`delta3`]: the quadratic through the first
/// three block nodes integrated exactly over the block and its first two steps.
pub fn j_delta3(f: &DiscreteFunction) -> Result<DiscreteFunction> {
    require_plus_nodes(f)?;
    let h = f.grid().h();
    block_antiderivative(
        f,
        3,
        |f, s, c| 3.0 * h * (f.at(s)[c] + 3.0 * f.at(s + 2)[c]) / 4.0,
        |f, s, r, c| {
            let (f0, f1, f2) = (f.at(s)[c], f.at(s + 1)[c], f.at(s + 2)[c]);
            match r {
                1 => h / 12.0 * (5.0 * f0 + 8.0 * f1 - f2),
                _ => h / 3.0 * (f0 + 4.0 * f1 + f2),
            }
        },
    )
}

/// Terminal value of the chosen antiderivative of the pairing `<F, G>`.
pub fn pairing_functional(f: &DiscreteFunction, g: &DiscreteFunction, kind: OperatorKind) -> Result<f64> {
    let p = pair_star(f, g)?;
    let n = f.grid().steps();
    let j = match kind {
        OperatorKind::JDelta => j_delta(&p)?,
        OperatorKind::JNabla => j_nabla(&p)?,
        other => {
            return Err(Error::Config(format!("pairing needs JDelta or JNabla, got {other:?}")));
        }
    };
    Ok(j.scalar_at(n))
}

/// Outcome of the constructive Dubois-Raymond test.
#[derive(Debug, Clone, PartialEq)]
pub struct DuboisRaymond {
    pub interior_zero: bool,
    /// Boundary-zero test function with positive pairing against `F`,
    /// present only when `F` has a non-zero interior value.
    pub witness: Option<DiscreteFunction>,
}

/// Decides whether `F` vanishes on the interior nodes, and otherwise builds
/// `G` with `G_0 = G_N = 0`, `G_k = F_k` inside, so that the pairing
/// `[J_Delta(F * G)]_N = h * sum F_k^2 > 0`.
pub fn dubois_raymond_witness(f: &DiscreteFunction) -> Result<DuboisRaymond> {
    require_full(f)?;
    f.require_dim(1)?;
    let n = f.grid().steps();
    let interior_zero = (1..n).all(|k| f.scalar_at(k) == 0.0);
    let witness = (!interior_zero).then(|| {
        DiscreteFunction::from_nodes(*f.grid(), Support::Full, 1, |k, out| {
            out[0] = if k == 0 || k == n { 0.0 } else { f.scalar_at(k) };
        })
    });
    Ok(DuboisRaymond { interior_zero, witness })
}

/// Constant function `F_0` on the grid of `f`.
pub fn initial_value(f: &DiscreteFunction) -> Result<DiscreteFunction> {
    require_full(f)?;
    Ok(crate::grid::constant_lift(f.at(0), f.grid()))
}

/// The pipeline route: `pi o d+ o iota` and `pi o int o iota`.
pub mod pipeline {
    use super::*;
    use crate::lifts::{
        antiderivative, d_minus, d_plus, iota0_minus, iota0_plus, iota1, iota1_plus, iota2, iota2_plus, iota3,
        pi_project,
    };

    pub fn delta(f: &DiscreteFunction) -> Result<DiscreteFunction> {
        pi_project(&d_plus(&iota1(f)?)).restrict(Support::Plus)
    }

    pub fn nabla(f: &DiscreteFunction) -> Result<DiscreteFunction> {
        pi_project(&d_minus(&iota1(f)?)).restrict(Support::Minus)
    }

    pub fn delta2(f: &DiscreteFunction) -> Result<DiscreteFunction> {
        pi_project(&d_plus(&iota2(f)?)).restrict(Support::Plus)
    }

    pub fn delta3(f: &DiscreteFunction) -> Result<DiscreteFunction> {
        pi_project(&d_plus(&iota3(f)?)).restrict(Support::Plus)
    }

    pub fn j_delta(f: &DiscreteFunction) -> Result<DiscreteFunction> {
        Ok(pi_project(&antiderivative(&iota0_plus(f)?)?))
    }

    pub fn j_nabla(f: &DiscreteFunction) -> Result<DiscreteFunction> {
        Ok(pi_project(&antiderivative(&iota0_minus(f)?)?))
    }

    pub fn j_delta2(f: &DiscreteFunction) -> Result<DiscreteFunction> {
        Ok(pi_project(&antiderivative(&iota1_plus(f)?)?))
    }

    pub fn j_delta3(f: &DiscreteFunction) -> Result<DiscreteFunction> {
        Ok(pi_project(&antiderivative(&iota2_plus(f)?)?))
    }
}
