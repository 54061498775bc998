//! Discrete infinity-Laplace equations on graphs: operator, checks, solvers,
//! tug-of-war simulation, example graphs and Euclidean ε-graph discretisation.

pub mod calculus;
pub mod euclid;
pub mod field;
pub mod gallery;
pub mod game;
pub mod graph;
pub mod io;
pub mod problem;
pub mod solver;

pub use field::ScalarField;
pub use graph::{Distance, Graph, GraphBuilder, GraphError, GraphKind, Vertex, Width};
pub use problem::{DirichletProblem, Partition, ProblemError};
