use std::path::{Path, PathBuf};

use inflap::euclid::{convergence_run, ConvergenceConfig, DomainSpec, EuclidError, FieldExpr};
use inflap::io::convergence_csv;
use serde_json::json;

use crate::output::{Input, Sink};
use crate::solve::io_failure;
use crate::Failure;

fn exact_arg(spec: &DomainSpec, arg: &str) -> Result<Option<FieldExpr>, Failure> {
    let parse = |text: &str, what: &str| {
        serde_json::from_str::<FieldExpr>(text).map_err(|e| Failure::invalid(format!("--exact {what}: {e}")))
    };
    match arg.trim() {
        "none" => Ok(None),
        "g" => Ok(Some(spec.g.clone())),
        t if t.starts_with('{') => parse(t, "JSON").map(Some),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::invalid(format!("--exact {path}: {e}")))?;
            parse(&text, path).map(Some)
        }
    }
}

pub fn run(
    path: &Path,
    schedule: Option<Vec<f64>>,
    exact: Option<&str>,
    max_samples: usize,
    tol: f64,
    out: Option<&PathBuf>,
) -> Result<(), Failure> {
    let input = Input::read(path)?;
    let spec: DomainSpec =
        serde_json::from_str(input.text()?).map_err(|e| Failure::invalid(format!("malformed domain JSON: {e}")))?;
    let mut cfg = ConvergenceConfig::from_spec(&spec, schedule).map_err(|e| Failure::invalid(e.to_string()))?;
    if let Some(arg) = exact {
        cfg.exact = exact_arg(&spec, arg)?;
        if let Some(e) = &cfg.exact {
            e.validate(spec.shape.dim()).map_err(|e| Failure::invalid(e.to_string()))?;
        }
    }
    cfg.max_samples = max_samples;
    cfg.tol = tol;
    let report = convergence_run(&spec, &cfg).map_err(|e| match e {
        EuclidError::Solve(_) => Failure { code: Failure::NOT_CONVERGED, message: e.to_string() },
        other => Failure::invalid(other.to_string()),
    })?;

    for level in &report.levels {
        if let Some(why) = &level.failure {
            eprintln!("warning: ε = {}: {why}", level.eps);
        }
        for w in level.stats.iter().flat_map(|s| &s.warnings) {
            eprintln!("warning: ε = {}: {w}", level.eps);
        }
    }
    let options = json!({
        "eps_schedule": cfg.schedule,
        "exact": cfg.exact,
        "max_samples": max_samples,
        "tol": tol,
    });
    let mut sink = Sink::new("converge", options);
    sink.input(&input);
    sink.primary("report.json", &report);
    sink.file("convergence.csv", convergence_csv(&report).map_err(io_failure)?);
    sink.finish(out)?;

    if !report.summary.complete {
        return Err(Failure::invalid("some ε level could not be discretised; see the warnings above"));
    }
    if !report.summary.all_converged {
        return Err(Failure { code: Failure::NOT_CONVERGED, message: "some ε level did not converge".into() });
    }
    Ok(())
}
