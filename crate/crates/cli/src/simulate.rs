use std::path::{Path, PathBuf};
use std::sync::Arc;

use inflap::game::{estimate_value, GameError};
use inflap::io::GameDoc;
use inflap::solver::{solve, SolveOptions};
use serde_json::json;

use crate::output::{Input, Sink};
use crate::solve::{io_failure, problem_failure, solve_failure};
use crate::Failure;

fn game_failure(e: GameError) -> Failure {
    match e {
        GameError::Truncated(_) => Failure { code: Failure::TRUNCATED, message: e.to_string() },
        GameError::AllCapped(_) => Failure { code: Failure::NOT_CONVERGED, message: e.to_string() },
        GameError::Problem(p) => problem_failure(p),
        other => Failure::invalid(other.to_string()),
    }
}

pub fn run(path: &Path, n: usize, seed: u64, out: Option<&PathBuf>) -> Result<(), Failure> {
    if n == 0 {
        return Err(Failure::invalid("--n must be at least 1"));
    }
    let input = Input::read(path)?;
    let doc = GameDoc::parse(input.text()?).map_err(io_failure)?;
    let cfg = doc.to_config().map_err(io_failure)?;
    let strategies = doc.strategies();

    // The PDE value, both as a reference and for greedy strategies.
    let solved = if strategies.one.needs_field() || strategies.two.needs_field() {
        Some(solve(&cfg.to_problem(), &SolveOptions::default()).map_err(solve_failure)?)
    } else {
        solve(&cfg.to_problem(), &SolveOptions::default()).ok()
    };
    let field = solved.as_ref().map(|o| Arc::new(o.field.clone()));
    let one = strategies.one.build(&cfg.graph, field.as_ref()).map_err(io_failure)?;
    let two = strategies.two.build(&cfg.graph, field.as_ref()).map_err(io_failure)?;
    let est = estimate_value(&cfg, &one, &two, n, seed).map_err(game_failure)?;

    if est.capped > 0 {
        eprintln!(
            "warning: {} of {} games hit the cap of {} rounds and were excluded from the mean",
            est.capped, est.n, cfg.max_rounds
        );
    }
    let doc = json!({
        "mean": est.mean,
        "stderr": est.stderr,
        "capped": est.capped,
        "n": est.n,
        "seed": est.seed,
        "start": doc.start,
        "max_rounds": cfg.max_rounds,
        "strategies": strategies,
        "solver_value": solved.as_ref().map(|o| o.field[cfg.start]),
        "solver_residual": solved.as_ref().map(|o| o.residual),
    });
    let mut sink = Sink::new("simulate", json!({ "n": n, "seed": seed }));
    sink.input(&input);
    sink.seed(seed);
    sink.primary("estimate.json", &doc);
    sink.finish(out)
}
