//! Small dense vectors and matrices over [`Scalar`].

use std::fmt;
use std::ops::Index;

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(pub Vec<Scalar>);

impl Vector {
    pub fn new(coords: Vec<Scalar>) -> Self {
        Vector(coords)
    }

    pub fn zeros(k: usize) -> Self {
        Vector(vec![Scalar::zero(); k])
    }

    pub fn unit(k: usize, i: usize) -> Self {
        let mut v = Vector::zeros(k);
        v.0[i] = Scalar::one();
        v
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        Vector(xs.iter().map(|&x| Scalar::from_int(x)).collect())
    }

    pub fn from_integers(xs: &[Integer]) -> Self {
        Vector(xs.iter().map(|x| Scalar::from_integer(x.clone())).collect())
    }

    pub fn parse(xs: &[&str]) -> Result<Self> {
        xs.iter().map(|s| Scalar::parse(s)).collect::<Result<Vec<_>>>().map(Vector)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Scalar> {
        self.0.iter()
    }

    pub fn is_exact(&self) -> bool {
        self.0.iter().all(Scalar::is_exact)
    }

    /// First `m` coordinates.
    pub fn particle(&self, m: usize) -> Vector {
        Vector(self.0[..m].to_vec())
    }

    /// Coordinates after the first `m`.
    pub fn time(&self, m: usize) -> Vector {
        Vector(self.0[m..].to_vec())
    }

    pub fn concat(&self, other: &Vector) -> Vector {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Vector(v)
    }

    pub fn dot(&self, other: &Vector) -> Scalar {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm2_sq(&self) -> Scalar {
        self.dot(self)
    }

    pub fn norm_sup(&self) -> Scalar {
        self.0.iter().fold(Scalar::zero(), |acc, x| acc.max_of(&x.abs()))
    }

    pub fn norm_l1(&self) -> Scalar {
        self.0.iter().map(Scalar::abs).sum()
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: &Scalar) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }

    pub fn neg(&self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Scalar::to_f64).collect()
    }

    /// Sup-norm distance between two points.
    pub fn dist_sup(&self, other: &Vector) -> Scalar {
        self.sub(other).norm_sup()
    }
}

impl Index<usize> for Vector {
    type Output = Scalar;
    fn index(&self, i: usize) -> &Scalar {
        &self.0[i]
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Dense row-major matrix; rows are stored as vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matrix {
    rows: Vec<Vector>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vector>) -> Result<Self> {
        if let Some(first) = rows.first() {
            let c = first.dim();
            if rows.iter().any(|r| r.dim() != c) {
                return Err(Error::DimensionMismatch("ragged matrix rows".into()));
            }
        }
        Ok(Matrix { rows })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| Vector::from_ints(r)).collect()).expect("rectangular")
    }

    pub fn zeros(r: usize, c: usize) -> Self {
        Matrix { rows: vec![Vector::zeros(c); r] }
    }

    pub fn identity(k: usize) -> Self {
        Matrix { rows: (0..k).map(|i| Vector::unit(k, i)).collect() }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, Vector::dim)
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &Vector {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.rows[i].0[j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.rows[i].0[j] = v;
    }

    pub fn col(&self, j: usize) -> Vector {
        Vector(self.rows.iter().map(|r| r.0[j].clone()).collect())
    }

    pub fn is_exact(&self) -> bool {
        self.rows.iter().all(Vector::is_exact)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix { rows: (0..self.ncols()).map(|j| self.col(j)).collect() }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let ot = other.transpose();
        Matrix {
            rows: self
                .rows
                .iter()
                .map(|r| Vector(ot.rows.iter().map(|c| r.dot(c)).collect()))
                .collect(),
        }
    }

    /// `M v` for a column vector `v`.
    pub fn mul_vec(&self, v: &Vector) -> Vector {
        Vector(self.rows.iter().map(|r| r.dot(v)).collect())
    }

    /// `x^T M`: the combination `sum_i x_i row_i`.
    pub fn combine_rows(&self, x: &[Scalar]) -> Vector {
        let mut acc = Vector::zeros(self.ncols());
        for (xi, r) in x.iter().zip(&self.rows) {
            if !xi.is_zero() {
                acc = acc.add(&r.scale(xi));
            }
        }
        acc
    }

    /// `x^T M` with integer coefficients.
    pub fn combine_rows_int(&self, x: &[Integer]) -> Vector {
        let mut acc = Vector::zeros(self.ncols());
        for (xi, r) in x.iter().zip(&self.rows) {
            if *xi != 0 {
                acc = acc.add(&Vector(r.0.iter().map(|a| a.mul_int(xi)).collect()));
            }
        }
        acc
    }

    /// Scales column `j` by `s`.
    pub fn scale_col(&mut self, j: usize, s: &Scalar) {
        for r in &mut self.rows {
            r.0[j] = &r.0[j] * s;
        }
    }

    /// Determinant by fraction-exact Gaussian elimination.
    pub fn det(&self) -> Scalar {
        let n = self.nrows();
        assert_eq!(n, self.ncols(), "determinant of a non-square matrix");
        let mut a: Vec<Vec<Scalar>> = self.rows.iter().map(|r| r.0.clone()).collect();
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = pivot_row(&a, c, c) else {
                return Scalar::zero();
            };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            let piv = a[c][c].clone();
            det = &det * &piv;
            for r in c + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = &a[r][c] / &piv;
                for j in c..n {
                    let t = &f * &a[c][j];
                    a[r][j] = &a[r][j] - &t;
                }
            }
        }
        det
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.nrows();
        if n != self.ncols() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let mut a: Vec<Vec<Scalar>> = self.rows.iter().map(|r| r.0.clone()).collect();
        let mut inv: Vec<Vec<Scalar>> = Matrix::identity(n).rows.into_iter().map(|r| r.0).collect();
        for c in 0..n {
            let p = pivot_row(&a, c, c).ok_or(Error::SingularBasis)?;
            a.swap(p, c);
            inv.swap(p, c);
            let piv = a[c][c].recip();
            for j in 0..n {
                a[c][j] = &a[c][j] * &piv;
                inv[c][j] = &inv[c][j] * &piv;
            }
            for r in 0..n {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                for j in 0..n {
                    let t = &f * &a[c][j];
                    a[r][j] = &a[r][j] - &t;
                    let t = &f * &inv[c][j];
                    inv[r][j] = &inv[r][j] - &t;
                }
            }
        }
        Ok(Matrix { rows: inv.into_iter().map(Vector).collect() })
    }

    /// Gram matrix `M M^T` of the rows.
    pub fn gram(&self) -> Matrix {
        let n = self.nrows();
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let d = self.rows[i].dot(&self.rows[j]);
                g.set(j, i, d.clone());
                g.set(i, j, d);
            }
        }
        g
    }
}

/// Row index of a usable pivot in column `c` at or below `start`.
///
/// Exact entries pick the first nonzero; floats pick the largest magnitude.
fn pivot_row(a: &[Vec<Scalar>], c: usize, start: usize) -> Option<usize> {
    let mut best: Option<usize> = None;
    for r in start..a.len() {
        let x = &a[r][c];
        if x.is_zero() {
            continue;
        }
        if x.is_exact() {
            return Some(r);
        }
        match best {
            Some(b) if a[b][c].abs() >= x.abs() => {}
            _ => best = Some(r),
        }
    }
    best
}
