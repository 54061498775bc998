use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use inflap::calculus::inf_laplacian;
use inflap::gallery::{
    cca_counterexample, comb_graph, doubling_graph, nonexistence_witness, sign_change_example, GalleryError,
};
use inflap::graph::GraphDoc;
use inflap::io::{field_map, to_json, ProblemDoc};
use serde_json::{json, Value};

use crate::output::Sink;
use crate::Failure;

struct Params(BTreeMap<String, String>);

impl Params {
    fn parse(text: &str) -> Result<Self, Failure> {
        let mut map = BTreeMap::new();
        for pair in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Failure::invalid(format!("parameter `{pair}` is not key=value")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Params(map))
    }

    fn get<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, Failure> {
        self.0
            .remove(key)
            .map(|v| v.parse().map_err(|_| Failure::invalid(format!("parameter {key}: cannot parse `{v}`"))))
            .transpose()
    }

    fn or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T, Failure> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Rejects parameters the example does not know.
    fn done(self, name: &str) -> Result<(), Failure> {
        match self.0.keys().next() {
            Some(k) => Err(Failure::invalid(format!("gallery {name} has no parameter `{k}`"))),
            None => Ok(()),
        }
    }
}

fn gallery_failure(e: GalleryError) -> Failure {
    Failure::invalid(e.to_string())
}

pub fn run(name: &str, params: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    let mut ps = Params::parse(params)?;
    let (used, doc, problem): (Value, Value, Option<ProblemDoc>) = match name {
        "sign-change" => {
            ps.done(name)?;
            let s = sign_change_example();
            let g = &s.problem.graph;
            let problem = ProblemDoc::from_problem(&s.problem);
            let doc = json!({
                "problem": problem,
                "fields": { "u": field_map(g, &s.u) },
                "family": { "shift_indicator_of": "X", "a_range": [s.family.0, s.family.1] },
            });
            (json!({}), doc, Some(problem))
        }
        "doubling" => {
            let n: usize = ps.or("n", 1024)?;
            ps.done(name)?;
            let d = doubling_graph(n).map_err(gallery_failure)?;
            let g = &d.problem.graph;
            let problem = ProblemDoc::from_problem(&d.problem);
            let doc = json!({
                "problem": problem,
                "fields": { "u": field_map(g, &d.u), "v": field_map(g, &d.v) },
                "unexposed_bounds": d.unexposed_bounds(),
            });
            (json!({ "n": n }), doc, Some(problem))
        }
        "comb" => {
            let c: u64 = ps.or("c", 2)?;
            let teeth: usize = ps.or("teeth", 16)?;
            let depth: Option<u64> = ps.get("depth")?;
            ps.done(name)?;
            let comb = comb_graph(c, teeth, depth).map_err(gallery_failure)?;
            let g = &comb.problem.graph;
            let problem = ProblemDoc::from_problem(&comb.problem);
            let shaft: Vec<i64> = (0..comb.teeth()).filter_map(|n| comb.vertex(n, 0)).map(|v| g.id(v)).collect();
            let doc = json!({
                "problem": problem,
                "fields": { "u": field_map(g, &comb.u), "v": field_map(g, &comb.v) },
                "shaft": shaft,
                "lengths": comb.lengths,
                "tails": comb.tails,
                "margins": comb.margins,
                "unexposed_bounds": comb.unexposed_bounds(),
            });
            (json!({ "c": c, "teeth": teeth, "depth": depth }), doc, Some(problem))
        }
        "cca" => {
            let a: f64 = ps.or("a", 0.3)?;
            let half_width: usize = ps.or("half_width", 6)?;
            ps.done(name)?;
            let ex = cca_counterexample(a, half_width).map_err(gallery_failure)?;
            let g = &ex.graph;
            let lap = inf_laplacian(g, &ex.u, ex.center).map_err(|e| Failure::invalid(e.to_string()))?;
            let doc = json!({
                "graph": GraphDoc::from_graph(g),
                "fields": { "u": field_map(g, &ex.u) },
                "center": g.id(ex.center),
                "center_laplacian": lap,
            });
            (json!({ "a": a, "half_width": half_width }), doc, None)
        }
        "nonexistence" => {
            let depths: String = ps.or("depths", "4:8:16:32".to_string())?;
            ps.done(name)?;
            let depths: Vec<usize> = depths
                .split(':')
                .map(|d| d.trim().parse().map_err(|_| Failure::invalid(format!("depths: cannot parse `{d}`"))))
                .collect::<Result<_, _>>()?;
            let rep = nonexistence_witness(&depths).map_err(gallery_failure)?;
            (json!({ "depths": depths }), serde_json::to_value(&rep).expect("report serialises"), None)
        }
        other => {
            return Err(Failure::invalid(format!(
                "unknown gallery example `{other}`; choose sign-change, doubling, comb, cca or nonexistence"
            )))
        }
    };
    let mut sink = Sink::new("gallery", json!({ "name": name, "params": used }));
    sink.primary("gallery.json", &doc);
    if let Some(p) = problem {
        sink.file("problem.json", to_json(&p));
    }
    sink.finish(out)
}
