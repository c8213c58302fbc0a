//! Dense coordinate vectors and linear functionals.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Largest ambient dimension accepted anywhere in the library.
pub const MAX_DIM: usize = 8;

/// A point or direction in `E^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct Vector(pub Vec<f64>);

/// A linear functional `f(x) = <coeffs, x>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct LinearFunctional(pub Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Self {
        Vector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    /// The `k`-th standard basis vector of `E^dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[k] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|x| x * s).collect())
    }

    pub fn normalized(&self) -> Vector {
        self.scale(1.0 / self.norm())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// Maximum absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &Vector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Read this vector as the coefficient vector of a functional.
    pub fn as_functional(&self) -> LinearFunctional {
        LinearFunctional(self.0.clone())
    }
}

impl LinearFunctional {
    pub fn new(coeffs: Vec<f64>) -> Self {
        LinearFunctional(coeffs)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, x: &Vector) -> f64 {
        dot(&self.0, &x.0)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn scale(&self, s: f64) -> LinearFunctional {
        LinearFunctional(self.0.iter().map(|x| x * s).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    /// The Riesz representative of this functional.
    pub fn as_vector(&self) -> Vector {
        Vector(self.0.clone())
    }

    pub fn max_abs_diff(&self, other: &LinearFunctional) -> f64 {
        self.as_vector().max_abs_diff(&other.as_vector())
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl From<Vec<f64>> for LinearFunctional {
    fn from(v: Vec<f64>) -> Self {
        LinearFunctional(v)
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        self.scale(s)
    }
}

impl Neg for &LinearFunctional {
    type Output = LinearFunctional;
    fn neg(self) -> LinearFunctional {
        LinearFunctional(self.0.iter().map(|a| -a).collect())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Reject dimensions outside `1..=MAX_DIM`.
pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(invalid(format!("dimension {dim} outside 1..={MAX_DIM}")));
    }
    Ok(())
}

pub(crate) fn check_same_dim(dim: usize, v: &[f64], what: &str) -> Result<()> {
    if v.len() != dim {
        return Err(invalid(format!(
            "{what} has dimension {} but {dim} was expected",
            v.len()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(invalid(format!("{what} has non-finite entries")));
    }
    Ok(())
}
