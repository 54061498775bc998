//! File formats: problem, game and domain JSON, field and report CSV.
//!
//! Floats are written with 17 significant digits so every value round-trips
//! exactly; non-finite values become `null`.

use std::collections::{BTreeMap, HashMap};
use std::io;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use thiserror::Error;

use crate::euclid::ConvergenceReport;
use crate::field::ScalarField;
use crate::game::{GameConfig, GameError, Strategy, DEFAULT_MAX_ROUNDS};
use crate::graph::{Graph, GraphDoc, GraphError, Vertex};
use crate::problem::{DirichletProblem, ProblemError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("`{field}` has no value for boundary vertex {id}")]
    MissingValue { field: &'static str, id: i64 },
    #[error("`{field}` gives a value for vertex {id}, which is not in {region}")]
    Misplaced { field: &'static str, id: i64, region: &'static str },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("strategy needs a value field, none was supplied")]
    NeedsField,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("`{0}` is not a vertex id")]
    BadKey(String),
}

/// `{:.16e}` with a plain exponent: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

/// Pretty JSON with 17-significant-digit floats.
struct Sig17<'a>(PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident $(, $arg:ident: $ty:ty)*);* $(;)?) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for Sig17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_f64(v).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    delegate! {
        begin_array;
        end_array;
        begin_array_value, first: bool;
        end_array_value;
        begin_object;
        end_object;
        begin_object_key, first: bool;
        begin_object_value;
        end_object_value;
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serialising to memory cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// `{graph, X, g, f}`: `g` must cover `Y`, `f` defaults to 0 on `X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemDoc {
    pub graph: GraphDoc,
    #[serde(rename = "X")]
    pub interior: Vec<i64>,
    pub g: BTreeMap<i64, f64>,
    #[serde(default)]
    pub f: BTreeMap<i64, f64>,
}

fn indices(g: &Graph, ids: &[i64]) -> Result<Vec<Vertex>, IoError> {
    ids.iter().map(|&id| g.vertex(id).map_err(IoError::from)).collect()
}

/// Spreads `{id: value}` over `V`; `on` says where values are expected.
fn spread(
    g: &Graph,
    map: &BTreeMap<i64, f64>,
    field: &'static str,
    on: &dyn Fn(Vertex) -> bool,
    region: &'static str,
    required: bool,
) -> Result<ScalarField, IoError> {
    let mut out = ScalarField::zeros(g.len());
    for (&id, &value) in map {
        let v = g.vertex(id)?;
        if !on(v) {
            return Err(IoError::Misplaced { field, id, region });
        }
        out[v] = value;
    }
    if required {
        if let Some(v) = (0..g.len()).find(|&v| on(v) && !map.contains_key(&g.id(v))) {
            return Err(IoError::MissingValue { field, id: g.id(v) });
        }
    }
    Ok(out)
}

fn collect(g: &Graph, field: &ScalarField, on: impl Fn(Vertex) -> bool) -> BTreeMap<i64, f64> {
    (0..g.len()).filter(|&v| on(v)).map(|v| (g.id(v), field[v])).collect()
}

impl ProblemDoc {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_problem(&self) -> Result<DirichletProblem, IoError> {
        let graph = self.graph.to_graph()?;
        let interior = indices(&graph, &self.interior)?;
        let mut mask = vec![false; graph.len()];
        for &x in &interior {
            mask[x] = true;
        }
        let f = spread(&graph, &self.f, "f", &|v| mask[v], "X", false)?;
        let g = spread(&graph, &self.g, "g", &|v| !mask[v], "Y", true)?;
        Ok(DirichletProblem::new(graph, &interior, f, g)?)
    }

    pub fn from_problem(p: &DirichletProblem) -> Self {
        let g = &*p.graph;
        let mut interior: Vec<i64> = p.interior().iter().map(|&x| g.id(x)).collect();
        interior.sort_unstable();
        ProblemDoc {
            graph: GraphDoc::from_graph(g),
            interior,
            g: collect(g, &p.g, |v| !p.is_interior(v)),
            f: collect(g, &p.f, |v| p.is_interior(v)),
        }
    }
}

/// Field as `{id: value}`.
pub fn field_map(g: &Graph, u: &ScalarField) -> BTreeMap<i64, f64> {
    collect(g, u, |_| true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategyDoc {
    /// Greedy on the solved game value (or a supplied field).
    GreedyMax,
    GreedyMin,
    TowardBoundary,
    /// `{from: to}`. Keys stay strings: tagged enums cannot coerce map keys.
    Scripted { moves: BTreeMap<String, i64> },
}

impl StrategyDoc {
    pub fn needs_field(&self) -> bool {
        matches!(self, StrategyDoc::GreedyMax | StrategyDoc::GreedyMin)
    }

    pub fn build(&self, g: &Graph, field: Option<&Arc<ScalarField>>) -> Result<Strategy, IoError> {
        Ok(match self {
            StrategyDoc::GreedyMax => Strategy::GreedyMax(field.ok_or(IoError::NeedsField)?.clone()),
            StrategyDoc::GreedyMin => Strategy::GreedyMin(field.ok_or(IoError::NeedsField)?.clone()),
            StrategyDoc::TowardBoundary => Strategy::TowardBoundary,
            StrategyDoc::Scripted { moves } => {
                let mut map = HashMap::new();
                for (a, &b) in moves {
                    let a: i64 = a.trim().parse().map_err(|_| IoError::BadKey(a.clone()))?;
                    map.insert(g.vertex(a)?, g.vertex(b)?);
                }
                Strategy::Scripted(map)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyPair {
    pub one: StrategyDoc,
    pub two: StrategyDoc,
}

impl Default for StrategyPair {
    fn default() -> Self {
        StrategyPair { one: StrategyDoc::GreedyMax, two: StrategyDoc::GreedyMin }
    }
}

/// `{graph, X, g, r, start, max_rounds}` plus optional strategies (default:
/// greedy on the solved value for both players).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameDoc {
    pub graph: GraphDoc,
    #[serde(rename = "X")]
    pub interior: Vec<i64>,
    pub g: BTreeMap<i64, f64>,
    #[serde(default)]
    pub r: BTreeMap<i64, f64>,
    pub start: i64,
    #[serde(default = "default_rounds")]
    pub max_rounds: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategies: Option<StrategyPair>,
}

fn default_rounds() -> usize {
    DEFAULT_MAX_ROUNDS
}

impl GameDoc {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_config(&self) -> Result<GameConfig, IoError> {
        let graph = self.graph.to_graph()?;
        let interior = indices(&graph, &self.interior)?;
        let mut mask = vec![false; graph.len()];
        for &x in &interior {
            mask[x] = true;
        }
        let r = spread(&graph, &self.r, "r", &|v| mask[v], "X", false)?;
        let g = spread(&graph, &self.g, "g", &|v| !mask[v], "Y", true)?;
        let start = graph.vertex(self.start)?;
        Ok(GameConfig::new(graph, &interior, r, g, start, self.max_rounds)?)
    }

    pub fn strategies(&self) -> StrategyPair {
        self.strategies.clone().unwrap_or_default()
    }
}

/// `id,value` rows in ascending id order.
pub fn field_csv(g: &Graph, u: &ScalarField) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "value"])?;
    for v in g.vertices_by_id() {
        w.write_record([g.id(v).to_string(), fmt_f64(u[v])])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| IoError::Csv(e.into_error().into()))?).expect("CSV is UTF-8"))
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// One row per ε: residual, bound, `C_r` per r, boundary deviation per δ,
/// the `δ = 2ε` diagonal, the Cauchy difference to the next level and, when
/// an exact solution was given, the errors. Empty cells mark missing values.
pub fn convergence_csv(rep: &ConvergenceReport) -> Result<String, IoError> {
    let has_exact = rep.levels.iter().any(|l| l.stats.as_ref().is_some_and(|s| s.error.is_some()));
    let mut header = vec!["eps".to_string(), "residual".into(), "sup_norm".into(), "bound".into()];
    header.extend(rep.r_grid.iter().map(|r| format!("C_r[r={}]", fmt_f64(*r))));
    header.extend(rep.delta_grid.iter().map(|d| format!("boundary[delta={}]", fmt_f64(*d))));
    header.push("boundary[delta=2eps]".into());
    header.push("cauchy_next".into());
    if has_exact {
        header.push("error_probe".into());
        header.push("error_all".into());
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for (i, l) in rep.levels.iter().enumerate() {
        let mut row = vec![fmt_f64(l.eps)];
        let cauchy = rep.cauchy.get(i).copied().flatten();
        match &l.stats {
            Some(s) => {
                row.extend([fmt_f64(s.residual), fmt_f64(s.sup_norm), fmt_f64(s.bound)]);
                row.extend(s.modulus.iter().map(|m| opt(m.c_r)));
                row.extend(s.boundary.iter().map(|b| opt(b.max_deviation)));
                row.push(opt(s.boundary_diagonal.max_deviation));
                row.push(opt(cauchy));
                if has_exact {
                    row.push(opt(s.error));
                    row.push(opt(s.error_all));
                }
            }
            None => row.resize(header.len(), String::new()),
        }
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| IoError::Csv(e.into_error().into()))?).expect("CSV is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PATH: &str = r#"{
        "graph": {"vertices": [0, 1, 2, 3, 4], "edges": [[0, 1], [1, 2], [2, 3], [3, 4]]},
        "X": [1, 2, 3],
        "g": {"0": 0.0, "4": 2.0}
    }"#;

    #[test]
    fn problem_round_trip() {
        let doc = ProblemDoc::parse(PATH).unwrap();
        let p = doc.to_problem().unwrap();
        assert_eq!(p.g[4], 2.0);
        let again = ProblemDoc::from_problem(&p);
        let back: ProblemDoc = serde_json::from_str(&to_json(&again)).unwrap();
        assert_eq!(back, again);
        assert_eq!(back.to_problem().unwrap().g, p.g);
    }

    #[test]
    fn missing_and_misplaced_values() {
        let mut doc = ProblemDoc::parse(PATH).unwrap();
        doc.g.remove(&4);
        assert!(matches!(doc.to_problem(), Err(IoError::MissingValue { field: "g", id: 4 })));
        doc.g.insert(4, 1.0);
        doc.f.insert(0, 1.0);
        assert!(matches!(doc.to_problem(), Err(IoError::Misplaced { field: "f", id: 0, .. })));
    }

    #[test]
    fn floats_keep_17_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(f64::NAN), "null");
        let x: f64 = 1.0 / 3.0;
        let text = to_json(&vec![x]);
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back[0].to_bits(), x.to_bits());
    }

    #[test]
    fn csv_rows() {
        let p = ProblemDoc::parse(PATH).unwrap().to_problem().unwrap();
        let text = field_csv(&p.graph, &p.g).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert_eq!(text.lines().nth(5).unwrap(), "4,2.0000000000000000e0");
    }

    #[test]
    fn game_doc_defaults() {
        let text = r#"{"graph": {"vertices": [0, 1, 2], "edges": [[0, 1], [1, 2]]},
                       "X": [1], "g": {"0": 0, "2": 1}, "start": 1}"#;
        let doc = GameDoc::parse(text).unwrap();
        assert_eq!(doc.max_rounds, DEFAULT_MAX_ROUNDS);
        assert_eq!(doc.strategies(), StrategyPair::default());
        let cfg = doc.to_config().unwrap();
        assert_eq!(cfg.start, 1);
    }
}
