//! The subcommands. Each returns the text it produces; `main` routes it to
//! the output file or standard output.

use std::fmt::Write as _;

use dembed::analysis::{least_squares_slope, pairwise_orders};
use dembed::invariants;
use dembed::variational::{del_integrate, del_integrate_from_velocity, energy_diagnostic};
use dembed::{coherence_check, DiscreteFunction, Error, SchemeKind, TimeGrid};

use crate::config::RunConfig;
use crate::registry;
use crate::CliError;

const DEFAULT_NS: [usize; 5] = [12, 24, 48, 96, 192];

/// Grid, divisibility and dimension problems are the caller's to fix; the
/// rest happened while computing.
fn lib_error(e: Error) -> CliError {
    match e {
        Error::InvalidGrid(_) | Error::Divisibility { .. } | Error::Config(_) | Error::Dimension { .. } => {
            CliError::Config(e.to_string())
        }
        other => CliError::Numerical(other.to_string()),
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn grid(a: f64, b: f64, n: usize, block: usize) -> Result<TimeGrid, CliError> {
    if !n.is_multiple_of(block) {
        return Err(CliError::Config(format!("N = {n} is not divisible by the block width {block}")));
    }
    TimeGrid::new(a, b, n).map_err(lib_error)
}

fn scheme(cfg: &RunConfig) -> Result<SchemeKind, CliError> {
    match cfg.scheme.as_deref() {
        None => Ok(SchemeKind::DeltaDifferential),
        Some(s) if s.eq_ignore_ascii_case("del") => {
            Err(CliError::Config("the discrete Euler-Lagrange scheme runs under the 'variational' command".into()))
        }
        Some(s) => s.parse().map_err(CliError::Config),
    }
}

fn vector(given: &Option<Vec<f64>>, default: &[f64], what: &str) -> Result<Vec<f64>, CliError> {
    let v = given.clone().unwrap_or_else(|| default.to_vec());
    if v.len() != default.len() {
        return Err(CliError::Config(format!("{what} has {} components, expected {}", v.len(), default.len())));
    }
    Ok(v)
}

/// `k,t,x_0,...,x_{d-1}` plus an optional extra column on the first nodes.
fn trajectory_csv(x: &DiscreteFunction, extra: Option<(&str, &DiscreteFunction)>) -> String {
    let mut out = String::from("k,t");
    for c in 0..x.dim() {
        write!(out, ",x_{c}").unwrap();
    }
    if let Some((name, _)) = extra {
        write!(out, ",{name}").unwrap();
    }
    out.push('\n');
    for k in x.indices() {
        write!(out, "{k},{}", num(x.grid().node(k))).unwrap();
        for v in x.at(k) {
            write!(out, ",{}", num(*v)).unwrap();
        }
        if let Some((_, e)) = extra {
            out.push(',');
            if let Some(v) = e.get(k) {
                out.push_str(&num(v[0]));
            }
        }
        out.push('\n');
    }
    out
}

pub fn integrate(cfg: &RunConfig) -> Result<String, CliError> {
    let p = registry::problem(&cfg.problem("exp"))?;
    let scheme = scheme(cfg)?;
    let (a, b) = cfg.interval();
    let g = grid(a, b, cfg.steps(12)?, scheme.block())?;
    let x0 = vector(&cfg.x0, &p.default_x0, "x0")?;
    let tr = dembed::integrate(&p.field, &x0, &g, scheme, &cfg.solver()?).map_err(lib_error)?;
    Ok(trajectory_csv(&tr.states, None))
}

pub fn converge(cfg: &RunConfig) -> Result<String, CliError> {
    let name = cfg.problem("exp");
    let p = registry::problem(&name)?;
    let reference =
        p.reference.as_ref().ok_or_else(|| CliError::Config(format!("problem '{name}' has no reference solution")))?;
    let scheme = scheme(cfg)?;
    let (a, b) = cfg.interval();
    let ns = cfg.ns.clone().unwrap_or_else(|| DEFAULT_NS.to_vec());
    if ns.len() < 2 {
        return Err(CliError::Config("a convergence study needs at least two step counts".into()));
    }
    let x0 = vector(&cfg.x0, &p.default_x0, "x0")?;
    let solver = cfg.solver()?;
    let grids = ns.iter().map(|&n| grid(a, b, n, scheme.block())).collect::<Result<Vec<_>, _>>()?;
    let (mut hs, mut errs) = (Vec::new(), Vec::new());
    for g in &grids {
        let tr = dembed::integrate(&p.field, &x0, g, scheme, &solver).map_err(lib_error)?;
        let err = tr
            .states
            .indices()
            .flat_map(|k| {
                let exact = reference(g.node(k), a, &x0);
                tr.states.at(k).iter().zip(exact).map(|(x, e)| (x - e).abs()).collect::<Vec<_>>()
            })
            .fold(0.0, f64::max);
        hs.push(g.h());
        errs.push(err);
    }
    let mut out = String::from("N,h,error_sup,order_estimate\n");
    for (i, order) in pairwise_orders(&hs, &errs).into_iter().enumerate() {
        let order = order.map(num).unwrap_or_default();
        writeln!(out, "{},{},{},{order}", ns[i], num(hs[i]), num(errs[i])).unwrap();
    }
    let log_h: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let log_e: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let slope = least_squares_slope(&log_h, &log_e).map_err(lib_error)?;
    writeln!(out, "least_squares,,,{}", num(slope)).unwrap();
    Ok(out)
}

pub fn cohere(cfg: &RunConfig) -> Result<String, CliError> {
    let p = registry::problem(&cfg.problem("exp"))?;
    let (a, b) = cfg.interval();
    let g = grid(a, b, cfg.steps(48)?, 6)?;
    let x0 = vector(&cfg.x0, &p.default_x0, "x0")?;
    let solver = cfg.solver()?;
    let mut out =
        format!("# differential vs integral embeddings, coherent when discrepancy <= {}\n", num(100.0 * solver.tol));
    out.push_str("order,max_node_discrepancy,coherent,claimed_coherent\n");
    for order in 1..=3 {
        let r = coherence_check(&p.field, &x0, &g, order, &solver).map_err(lib_error)?;
        writeln!(out, "{order},{},{},{}", num(r.max_node_discrepancy), r.coherent, r.claimed_coherent).unwrap();
    }
    Ok(out)
}

pub fn variational(cfg: &RunConfig) -> Result<String, CliError> {
    let (lag, default_x0) = registry::lagrangian(&cfg.problem("harmonic"))?;
    let (a, b) = cfg.interval();
    let g = grid(a, b, cfg.steps(100)?, 1)?;
    let x0 = vector(&cfg.x0, &default_x0, "x0")?;
    let solver = cfg.solver()?;
    let tr = match (&cfg.x1, &cfg.v0) {
        (Some(_), _) => del_integrate(&lag, &x0, &vector(&cfg.x1, &default_x0, "x1")?, &g, &solver),
        (None, v0) => {
            let v0 = vector(v0, &vec![0.0; default_x0.len()], "v0")?;
            del_integrate_from_velocity(&lag, &x0, &v0, &g, &solver)
        }
    }
    .map_err(lib_error)?;
    let e = energy_diagnostic(&lag, &tr.states).map_err(lib_error)?;
    let mut out = trajectory_csv(&tr.states, Some(("E", &e)));
    let values = e.values();
    let max_dev = values.iter().map(|v| (v - values[0]).abs()).fold(0.0, f64::max);
    let times: Vec<f64> = e.indices().map(|k| g.node(k)).collect();
    let slope = least_squares_slope(&times, values).unwrap_or(f64::NAN);
    writeln!(out, "# max_abs_energy_deviation={},drift_slope={}", num(max_dev), num(slope)).unwrap();
    Ok(out)
}

/// The report always comes back; failures are listed in the error too.
pub fn selftest(cfg: &RunConfig) -> (String, Result<(), CliError>) {
    let seed = cfg.seed.unwrap_or(invariants::DEFAULT_SEED);
    let mut out = format!("# seed={seed}\ninvariant,result,detail\n");
    let outcomes = invariants::run_all(seed);
    for o in &outcomes {
        writeln!(out, "{},{},{}", o.name, if o.passed { "PASS" } else { "FAIL" }, o.detail.replace(',', ";")).unwrap();
    }
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name.to_string()).collect();
    let status = if failed.is_empty() { Ok(()) } else { Err(CliError::Selftest(failed)) };
    (out, status)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(json: &str) -> RunConfig {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn forward_euler_rows() {
        let out = integrate(&cfg(r#"{"problem": "exp", "b": 1.0, "N": 2}"#)).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "k,t,x_0");
        assert_eq!(lines[3], format!("2,{},{}", num(1.0), num(2.25)));
    }

    #[test]
    fn divisibility_is_a_config_error() {
        let err = integrate(&cfg(r#"{"scheme": "Delta3Integral", "N": 4}"#)).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert!(matches!(cohere(&cfg(r#"{"N": 8}"#)), Err(CliError::Config(_))));
    }

    #[test]
    fn missing_reference_is_a_config_error() {
        assert!(matches!(converge(&cfg(r#"{"problem": "pendulum"}"#)), Err(CliError::Config(_))));
    }

    #[test]
    fn step_failure_is_numerical() {
        // x' = x with backward Euler and h = 1 makes the step singular
        let err = integrate(&cfg(r#"{"scheme": "NablaDifferential", "N": 1}"#)).unwrap_err();
        assert!(matches!(err, CliError::Numerical(_)), "{err:?}");
    }
}
