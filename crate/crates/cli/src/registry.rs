//! Named ODEs and Lagrangians with reference solutions where known.

use dembed::{Lagrangian, OdeField};

use crate::CliError;

type Reference = Box<dyn Fn(f64, f64, &[f64]) -> Vec<f64>>;

pub struct Problem {
    pub field: OdeField,
    pub default_x0: Vec<f64>,
    /// `reference(t, a, x0)`: exact state at `t` when started from `x0` at `a`.
    pub reference: Option<Reference>,
}

pub const PROBLEMS: [&str; 5] = ["exp", "decay", "logistic", "harmonic2d", "pendulum"];
pub const LAGRANGIANS: [&str; 3] = ["harmonic", "pendulum_lag", "free"];

pub fn problem(name: &str) -> Result<Problem, CliError> {
    let p = match name {
        "exp" => Problem {
            field: OdeField::new(1, |_, x| vec![x[0]]).with_jacobian(|_, _| vec![1.0]),
            default_x0: vec![1.0],
            reference: Some(Box::new(|t, a, x0| vec![x0[0] * (t - a).exp()])),
        },
        "decay" => Problem {
            field: OdeField::new(1, |_, x| vec![-x[0]]).with_jacobian(|_, _| vec![-1.0]),
            default_x0: vec![1.0],
            reference: Some(Box::new(|t, a, x0| vec![x0[0] * (a - t).exp()])),
        },
        "logistic" => Problem {
            field: OdeField::new(1, |_, x| vec![x[0] * (1.0 - x[0])]).with_jacobian(|_, x| vec![1.0 - 2.0 * x[0]]),
            default_x0: vec![0.5],
            reference: Some(Box::new(|t, a, x0| {
                let g = (t - a).exp();
                vec![x0[0] * g / (1.0 - x0[0] + x0[0] * g)]
            })),
        },
        "harmonic2d" => Problem {
            field: OdeField::new(2, |_, x| vec![x[1], -x[0]]).with_jacobian(|_, _| vec![0.0, 1.0, -1.0, 0.0]),
            default_x0: vec![1.0, 0.0],
            reference: Some(Box::new(|t, a, x0| {
                let (s, c) = (t - a).sin_cos();
                vec![x0[0] * c + x0[1] * s, -x0[0] * s + x0[1] * c]
            })),
        },
        "pendulum" => Problem {
            field: OdeField::new(2, |_, x| vec![x[1], -x[0].sin()])
                .with_jacobian(|_, x| vec![0.0, 1.0, -x[0].cos(), 0.0]),
            default_x0: vec![1.0, 0.0],
            reference: None,
        },
        other => {
            return Err(CliError::Config(format!("unknown problem '{other}'; expected one of {}", PROBLEMS.join(", "))))
        }
    };
    Ok(p)
}

pub fn lagrangian(name: &str) -> Result<(Lagrangian, Vec<f64>), CliError> {
    let built = match name {
        "harmonic" => (Lagrangian::separable(1, |_, x| 0.5 * x[0] * x[0], |_, x| vec![x[0]]), vec![1.0]),
        "pendulum_lag" => (Lagrangian::separable(1, |_, x| -x[0].cos(), |_, x| vec![x[0].sin()]), vec![0.5]),
        "free" => (Lagrangian::separable(1, |_, _| 0.0, |_, _| vec![0.0]), vec![0.0]),
        other => {
            return Err(CliError::Config(format!(
                "unknown Lagrangian '{other}'; expected one of {}",
                LAGRANGIANS.join(", ")
            )))
        }
    };
    let (lag, x0) = built;
    Ok((lag.map_err(|e| CliError::Numerical(e.to_string()))?, x0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn references_solve_their_odes() {
        for name in PROBLEMS {
            let p = problem(name).unwrap();
            let Some(r) = &p.reference else { continue };
            let (t, a, eps) = (0.7, 0.2, 1e-6);
            let x = r(t, a, &p.default_x0);
            let dx: Vec<f64> = r(t + eps, a, &p.default_x0)
                .iter()
                .zip(r(t - eps, a, &p.default_x0))
                .map(|(u, d)| (u - d) / (2.0 * eps))
                .collect();
            for (d, f) in dx.iter().zip(p.field.eval(t, &x)) {
                assert!((d - f).abs() < 1e-8, "{name}");
            }
            assert_eq!(r(a, a, &p.default_x0), p.default_x0);
        }
    }

    #[test]
    fn every_name_resolves() {
        assert!(PROBLEMS.iter().all(|n| problem(n).is_ok()));
        assert!(LAGRANGIANS.iter().all(|n| lagrangian(n).is_ok()));
        assert!(matches!(problem("nope"), Err(CliError::Config(_))));
    }
}
