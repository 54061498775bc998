use std::path::{Path, PathBuf};

use inflap::calculus::{gradient_sweep, marching_check, CalcError, GradientOptions, TAU};
use inflap::io::{field_csv, field_map, IoError, ProblemDoc};
use inflap::solver::{solve, uniqueness_probe, Init, Scheme, SolveError, SolveOptions, Uniqueness};
use inflap::{DirichletProblem, ProblemError, ScalarField};
use serde_json::{json, Value};

use crate::output::{Input, Sink};
use crate::{Failure, InitArg, SchemeArg};

pub struct Args {
    pub tol: f64,
    pub init: InitArg,
    pub scheme: SchemeArg,
    pub max_iters: usize,
    pub probe_uniqueness: bool,
}

pub fn io_failure(e: IoError) -> Failure {
    match e {
        IoError::Problem(p) => problem_failure(p),
        other => Failure::invalid(other.to_string()),
    }
}

pub fn problem_failure(e: ProblemError) -> Failure {
    Failure::invalid(e.to_string())
}

pub fn solve_failure(e: SolveError) -> Failure {
    match e {
        SolveError::TruncationLimited(_) => Failure { code: Failure::TRUNCATED, message: e.to_string() },
        other => Failure::invalid(other.to_string()),
    }
}

/// Marching and gradient-estimate pass counts over every admissible triple.
fn verification(p: &DirichletProblem, u: &ScalarField, residual: f64) -> Value {
    let tau = TAU.max(2.0 * residual);
    let (mut checked, mut passed) = (0usize, 0usize);
    for &x in p.interior() {
        for &y in p.graph.neighbors(x) {
            checked += 1;
            if marching_check(p, u, x, y, tau).is_ok_and(|r| r.holds) {
                passed += 1;
            }
        }
    }
    let gradient = match gradient_sweep(p, u, None, &GradientOptions { tau, unexposed: None }) {
        Ok(s) => json!({
            "checked": s.checked,
            "passed": s.checked - s.violations.len(),
            "min_margin": if s.min_margin.is_finite() { json!(s.min_margin) } else { Value::Null },
        }),
        Err(CalcError::Precondition(why)) => json!({ "skipped": why }),
        Err(e) => json!({ "skipped": e.to_string() }),
    };
    json!({
        "tau": tau,
        "residual": residual,
        "marching": { "checked": checked, "passed": passed },
        "gradient_estimate": gradient,
    })
}

pub fn run(path: &Path, args: Args, out: Option<&PathBuf>) -> Result<(), Failure> {
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(Failure::invalid("--tol must be positive"));
    }
    let input = Input::read(path)?;
    let doc = ProblemDoc::parse(input.text()?).map_err(io_failure)?;
    let p = doc.to_problem().map_err(io_failure)?;
    let init = match args.init {
        InitArg::Upper => Init::UpperBarrier,
        InitArg::Lower => Init::LowerBarrier,
    };
    let scheme = match args.scheme {
        SchemeArg::Jacobi => Scheme::Jacobi,
        SchemeArg::GaussSeidel => Scheme::GaussSeidel,
    };
    let opts = SolveOptions { init, tol: args.tol, max_iters: args.max_iters, scheme };
    let outcome = solve(&p, &opts).map_err(solve_failure)?;

    let uniqueness = if args.probe_uniqueness {
        Some(match uniqueness_probe(&p, &opts).map_err(solve_failure)? {
            Uniqueness::UniqueEvidence { gap, threshold, f_one_signed } => {
                json!({ "verdict": "unique_evidence", "gap": gap, "threshold": threshold, "f_one_signed": f_one_signed })
            }
            Uniqueness::DistinctSolutions { gap, threshold, u_hi, u_lo } => json!({
                "verdict": "distinct_solutions",
                "gap": gap,
                "threshold": threshold,
                "u_hi": field_map(&p.graph, &u_hi),
                "u_lo": field_map(&p.graph, &u_lo),
            }),
        })
    } else {
        None
    };

    let mut doc = json!({
        "converged": outcome.converged,
        "iterations": outcome.iterations,
        "residual": outcome.residual,
        "init": outcome.init,
        "scheme": scheme,
        "tol": args.tol,
        "width": p.width().finite(),
        "field": field_map(&p.graph, &outcome.field),
        "verification": verification(&p, &outcome.field, outcome.residual),
    });
    if let Some(u) = uniqueness {
        doc["uniqueness"] = u;
    }

    let options = json!({
        "tol": args.tol,
        "init": format!("{:?}", args.init).to_lowercase(),
        "scheme": scheme,
        "max_iters": args.max_iters,
        "probe_uniqueness": args.probe_uniqueness,
    });
    let mut sink = Sink::new("solve", options);
    sink.input(&input);
    sink.primary("outcome.json", &doc);
    sink.file("field.csv", field_csv(&p.graph, &outcome.field).map_err(io_failure)?);
    sink.finish(out)?;

    if !outcome.converged {
        return Err(Failure {
            code: Failure::NOT_CONVERGED,
            message: format!("not converged after {} sweeps (residual {:e})", outcome.iterations, outcome.residual),
        });
    }
    Ok(())
}
