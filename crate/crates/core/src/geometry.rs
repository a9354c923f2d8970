//! Vectors in ℝⁿ and the handful of kernels the rest of the crate needs.

use std::ops::{Add, Index, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point or direction in ℝⁿ. The dimension is fixed at construction and
/// is always at least one.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector<T>(Vec<T>);

impl<T: Scalar> Vector<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        Ok(Vector(coords))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least one");
        Vector(vec![T::zero(); n])
    }

    /// The `i`-th standard basis vector.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = T::one();
        v
    }

    pub fn from_f64s(values: &[f64]) -> Result<Self> {
        let coords = values
            .iter()
            .map(|&v| T::from_f64(v).ok_or_else(|| Error::InvalidArgument(format!("non-finite coordinate {v}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(coords)
    }

    pub fn from_i64s(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| T::from_i64(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<T> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|v| v.is_zero())
    }

    pub fn scale(&self, k: &T) -> Self {
        Vector(self.0.iter().map(|v| v.clone() * k.clone()).collect())
    }

    pub fn to_f64(&self) -> Vector<f64> {
        Vector(self.0.iter().map(Scalar::to_f64).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
    }

    pub(crate) fn dot_unchecked(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub(crate) fn sq_norm_unchecked(&self) -> T {
        self.dot_unchecked(self)
    }

    /// `self + k * other`.
    pub(crate) fn axpy(&self, k: &T, other: &Self) -> Self {
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() + k.clone() * b.clone())
                .collect(),
        )
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Inner product `Σ aᵢbᵢ`.
pub fn dot<T: Scalar>(a: &Vector<T>, b: &Vector<T>) -> Result<T> {
    check_dims(a.dim(), b.dim())?;
    Ok(a.dot_unchecked(b))
}

/// `a · a`. The square root is never needed for comparisons.
pub fn sq_norm<T: Scalar>(a: &Vector<T>) -> T {
    a.sq_norm_unchecked()
}

/// Removes from `v` its orthogonal projection onto `span(basis)`.
///
/// Exact mode runs classical Gram–Schmidt without normalization, so the
/// result is orthogonal to every basis vector exactly. Float mode runs
/// modified Gram–Schmidt with one reorthogonalization pass. Zero (and, in
/// float mode, numerically dependent) basis vectors are skipped.
pub fn project_out<T: Scalar>(v: &Vector<T>, basis: &[Vector<T>]) -> Result<Vector<T>> {
    for b in basis {
        check_dims(v.dim(), b.dim())?;
    }
    if T::EXACT {
        Ok(project_out_classical(v, basis))
    } else {
        Ok(project_out_modified(v, basis))
    }
}

fn project_out_classical<T: Scalar>(v: &Vector<T>, basis: &[Vector<T>]) -> Vector<T> {
    let mut ortho: Vec<(Vector<T>, T)> = Vec::with_capacity(basis.len());
    for b in basis.iter().filter(|b| !b.is_zero()) {
        let mut q = b.clone();
        for (o, oo) in &ortho {
            let k = b.dot_unchecked(o) / oo.clone();
            q = q.axpy(&-k, o);
        }
        if !q.is_zero() {
            let qq = q.sq_norm_unchecked();
            ortho.push((q, qq));
        }
    }
    let mut out = v.clone();
    for (o, oo) in &ortho {
        let k = v.dot_unchecked(o) / oo.clone();
        out = out.axpy(&-k, o);
    }
    out
}

fn project_out_modified<T: Scalar>(v: &Vector<T>, basis: &[Vector<T>]) -> Vector<T> {
    let mut ortho: Vec<(Vector<T>, T)> = Vec::with_capacity(basis.len());
    for b in basis {
        let bb = b.sq_norm_unchecked();
        if bb.is_zero() {
            continue;
        }
        let mut q = b.clone();
        for _ in 0..2 {
            for (o, oo) in &ortho {
                let k = q.dot_unchecked(o) / oo.clone();
                q = q.axpy(&-k, o);
            }
        }
        let qq = q.sq_norm_unchecked();
        // Numerically inside the span of the earlier vectors.
        if qq.to_f64() <= 1e-24 * bb.to_f64() {
            continue;
        }
        ortho.push((q, qq));
    }
    let mut out = v.clone();
    for _ in 0..2 {
        for (o, oo) in &ortho {
            let k = out.dot_unchecked(o) / oo.clone();
            out = out.axpy(&-k, o);
        }
    }
    out
}

impl<T: Scalar> Index<usize> for Vector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

/// Coordinate-wise sum. Panics on dimension mismatch; use [`dot`] and the
/// other checked entry points at API boundaries.
impl<T: Scalar> Add for &Vector<T> {
    type Output = Vector<T>;

    fn add(self, rhs: &Vector<T>) -> Vector<T> {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a.clone() + b.clone()).collect())
    }
}

impl<T: Scalar> Sub for &Vector<T> {
    type Output = Vector<T>;

    fn sub(self, rhs: &Vector<T>) -> Vector<T> {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a.clone() - b.clone()).collect())
    }
}

impl<T: Scalar> Neg for &Vector<T> {
    type Output = Vector<T>;

    fn neg(self) -> Vector<T> {
        Vector(self.0.iter().map(|a| -a.clone()).collect())
    }
}
