use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::graph::Vertex;

/// Real-valued function on the vertices of a graph, indexed densely.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarField(Vec<f64>);

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        ScalarField(values)
    }

    pub fn constant(n: usize, c: f64) -> Self {
        ScalarField(vec![c; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    pub fn from_fn(n: usize, f: impl FnMut(Vertex) -> f64) -> Self {
        ScalarField((0..n).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sup |self - other|`.
    pub fn sup_distance(&self, other: &ScalarField) -> f64 {
        assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn sup_over(&self, vs: impl IntoIterator<Item = Vertex>) -> Option<f64> {
        vs.into_iter().map(|v| self.0[v]).reduce(f64::max)
    }

    pub fn inf_over(&self, vs: impl IntoIterator<Item = Vertex>) -> Option<f64> {
        vs.into_iter().map(|v| self.0[v]).reduce(f64::min)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField(self.0.iter().map(|&v| f(v)).collect())
    }
}

impl Index<Vertex> for ScalarField {
    type Output = f64;
    fn index(&self, v: Vertex) -> &f64 {
        &self.0[v]
    }
}

impl IndexMut<Vertex> for ScalarField {
    fn index_mut(&mut self, v: Vertex) -> &mut f64 {
        &mut self.0[v]
    }
}

impl From<Vec<f64>> for ScalarField {
    fn from(v: Vec<f64>) -> Self {
        ScalarField(v)
    }
}
