//! Unimodular and affine lattices, their duals, rational hyperplanes and the
//! diagonal flow.

pub mod enumerate;
pub mod kernel;
pub mod reduce;

use std::sync::OnceLock;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Scalar;
use enumerate::Norm;

/// Largest dimension accepted by the exhaustive searches.
pub const MAX_DIM: usize = 8;

/// Relative tolerance for unimodularity of float bases.
pub const FLOAT_DET_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "LatticeRepr", into = "LatticeRepr")]
pub struct Lattice {
    basis: Matrix,
    gram: OnceLock<Matrix>,
}

#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    basis: Matrix,
}

impl TryFrom<LatticeRepr> for Lattice {
    type Error = Error;
    fn try_from(r: LatticeRepr) -> Result<Self> {
        Lattice::general(r.basis)
    }
}

impl From<Lattice> for LatticeRepr {
    fn from(l: Lattice) -> Self {
        LatticeRepr { basis: l.basis }
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis
    }
}

impl Lattice {
    /// A unimodular lattice from basis rows.
    pub fn new(basis: Matrix) -> Result<Self> {
        let l = Lattice::general(basis)?;
        let d = l.basis.det().abs();
        let ok = if d.is_exact() { d == Scalar::one() } else { d.approx_eq(&Scalar::one(), FLOAT_DET_TOL) };
        if !ok {
            return Err(Error::NotUnimodular(d.to_string()));
        }
        Ok(l)
    }

    /// Any full-rank lattice; used for rescaled pictures that are not unimodular.
    pub fn general(basis: Matrix) -> Result<Self> {
        if basis.nrows() != basis.ncols() {
            return Err(Error::DimensionMismatch("basis must be square".into()));
        }
        if basis.det().is_zero() {
            return Err(Error::SingularBasis);
        }
        Ok(Lattice { basis, gram: OnceLock::new() })
    }

    pub(crate) fn from_trusted(basis: Matrix) -> Self {
        Lattice { basis, gram: OnceLock::new() }
    }

    /// The standard lattice `Z^k`.
    pub fn integer(k: usize) -> Self {
        Lattice::from_trusted(Matrix::identity(k))
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn is_exact(&self) -> bool {
        self.basis.is_exact()
    }

    pub fn gram(&self) -> &Matrix {
        self.gram.get_or_init(|| self.basis.gram())
    }

    pub fn covolume(&self) -> Scalar {
        self.basis.det().abs()
    }

    pub fn point(&self, coeffs: &[Integer]) -> Vector {
        self.basis.combine_rows_int(coeffs)
    }

    /// Real coordinates of `v` on the basis rows.
    pub fn coordinates(&self, v: &Vector) -> Result<Vec<Scalar>> {
        let inv = self.basis.inverse()?;
        Ok(inv.transpose().mul_vec(v).0)
    }

    /// Dual lattice: basis is the inverse transpose.
    pub fn dual(&self) -> Result<Lattice> {
        Ok(Lattice::from_trusted(self.basis.inverse()?.transpose()))
    }

    fn check_dim(&self) -> Result<()> {
        if self.dim() > MAX_DIM {
            return Err(Error::DimensionTooLarge(self.dim()));
        }
        Ok(())
    }
}

/// Sup-norm shortest nonzero vector.
pub fn shortest_vector(l: &Lattice) -> Result<Vector> {
    l.check_dim()?;
    Ok(enumerate::shortest(l.basis.rows(), Norm::Sup).vector)
}

/// Euclidean shortest nonzero vector with its squared length.
pub fn shortest_vector_l2(l: &Lattice) -> Result<(Vector, Scalar)> {
    l.check_dim()?;
    let f = enumerate::shortest(l.basis.rows(), Norm::Euclid);
    Ok((f.vector, f.value))
}

/// Λ + c.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineLattice {
    pub lattice: Lattice,
    pub shift: Vector,
}

impl AffineLattice {
    pub fn new(lattice: Lattice, shift: Vector) -> Result<Self> {
        if shift.dim() != lattice.dim() {
            return Err(Error::DimensionMismatch("shift dimension".into()));
        }
        Ok(AffineLattice { lattice, shift })
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// Whether the shift lies in the lattice, i.e. the origin is a point.
    pub fn contains_origin(&self) -> Result<bool> {
        Ok(self.lattice.coordinates(&self.shift)?.iter().all(|c| c.dist_to_int().is_zero()))
    }
}

/// Point of Λ + c closest to `target` in the sup norm, with its distance.
pub fn closest_point_with_distance(x: &AffineLattice, target: &Vector) -> Result<(Vector, Scalar)> {
    x.lattice.check_dim()?;
    let t = target.sub(&x.shift);
    let f = enumerate::closest(x.lattice.basis.rows(), &t, Norm::Sup);
    Ok((f.vector.add(&x.shift), f.value))
}

pub fn closest_point(x: &AffineLattice, target: &Vector) -> Result<Vector> {
    closest_point_with_distance(x, target).map(|(p, _)| p)
}

/// Rows `(e_i, 0)` and `(A_{.j}, e_j)` with shift `(-b, 0)`: the points
/// `(A q + p - b, q)`.
pub fn affine_lattice_of(a: &Matrix, b: &Vector) -> Result<AffineLattice> {
    let m = a.nrows();
    let n = a.ncols();
    if b.dim() != m {
        return Err(Error::DimensionMismatch(format!("b has {} entries, A has {m} rows", b.dim())));
    }
    let k = m + n;
    let mut rows = Vec::with_capacity(k);
    for i in 0..m {
        rows.push(Vector::unit(k, i));
    }
    for j in 0..n {
        let mut r = a.col(j).concat(&Vector::zeros(n));
        r.0[m + j] = Scalar::one();
        rows.push(r);
    }
    let lattice = Lattice::from_trusted(Matrix::from_rows(rows)?);
    let shift = b.neg().concat(&Vector::zeros(n));
    AffineLattice::new(lattice, shift)
}

/// `H = w^⊥` for a primitive dual vector `w`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub dual_vector: Vector,
    pub covolume_sq: Scalar,
}

impl Hyperplane {
    pub fn from_dual(w: Vector) -> Self {
        let c = w.norm2_sq();
        Hyperplane { dual_vector: w, covolume_sq: c }
    }

    /// Smallness with respect to `xi0^2 = k`.
    pub fn is_small(&self, k: usize) -> bool {
        self.covolume_sq <= Scalar::from_int(k as i64)
    }
}

/// Integer pairings `<b_i, w>` of `w` with the basis rows of `l`.
pub fn pairings(l: &Lattice, w: &Vector) -> Result<Vec<Integer>> {
    l.basis
        .rows()
        .iter()
        .map(|r| {
            let p = r.dot(w);
            if p.dist_to_int().is_zero() {
                Ok(p.round())
            } else {
                Err(Error::NotRational(format!("pairing {p} is not an integer")))
            }
        })
        .collect()
}

/// Primitive version of `w` in `l*`.
pub fn primitive_dual(l: &Lattice, w: &Vector) -> Result<Vector> {
    let a = pairings(l, w)?;
    let g = kernel::gcd_all(&a);
    if g == 0 {
        return Err(Error::NotRational("zero dual vector".into()));
    }
    Ok(w.scale(&Scalar::from_rational(Rational::from((1, g)))))
}

/// `|H|^2` of the hyperplane `w^⊥` relative to `l`.
pub fn covolume_sq(h: &Hyperplane, l: &Lattice) -> Result<Scalar> {
    Ok(primitive_dual(l, &h.dual_vector)?.norm2_sq())
}

/// Z-basis of `H ∩ L` and a vector `λ0 ∈ L` with `<w, λ0> = 1` (primitive `w`).
pub fn hyperplane_basis(h: &Hyperplane, l: &Lattice) -> Result<(Vec<Vector>, Vector)> {
    let a = pairings(l, &h.dual_vector)?;
    let (g, cols) = kernel::column_transform(&a);
    if g == 0 {
        return Err(Error::NotRational("zero dual vector".into()));
    }
    let basis = cols[1..].iter().map(|c| l.point(c)).collect();
    Ok((basis, l.point(&cols[0])))
}

/// Gram determinant of a family of vectors.
pub fn gram_det(vs: &[Vector]) -> Scalar {
    if vs.is_empty() {
        return Scalar::one();
    }
    Matrix::from_rows(vs.to_vec()).expect("same dimension").gram().det()
}

/// All `H = w^⊥` with primitive `w ∈ L*`, `|w|^2 <= bound_sq`, one per ± pair.
///
/// Sorted by covolume, then by the dual-basis coefficients.
pub fn enumerate_small_hyperplanes(l: &Lattice, bound_sq: &Scalar) -> Result<Vec<Hyperplane>> {
    l.check_dim()?;
    if bound_sq.cmp_zero() != std::cmp::Ordering::Greater {
        return Ok(Vec::new());
    }
    let dual = l.dual()?;
    let mut found: Vec<(Scalar, Vec<Integer>, Vector)> = enumerate::primitive_within(dual.basis.rows(), bound_sq)
        .into_iter()
        .filter(|(c, _, _)| c.iter().find(|x| **x != 0).is_some_and(|x| *x > 0))
        .map(|(c, _, _)| {
            let w = dual.point(&c);
            (w.norm2_sq(), c, w)
        })
        .collect();
    found.sort_by(|a, b| a.0.cmp_s(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(found.into_iter().map(|(c, _, w)| Hyperplane { dual_vector: w, covolume_sq: c }).collect())
}

/// `|det(H_basis, v)|`: volume of the parallelepiped on a hyperplane basis and `v`.
pub fn pyramid_volume(h_basis: &[Vector], v: &Vector) -> Result<Scalar> {
    let k = v.dim();
    if h_basis.len() + 1 != k || h_basis.iter().any(|h| h.dim() != k) {
        return Err(Error::DimensionMismatch("need k-1 vectors in R^k".into()));
    }
    if gram_det(h_basis).is_zero() {
        return Err(Error::DegenerateBase);
    }
    let mut rows = h_basis.to_vec();
    rows.push(v.clone());
    Ok(Matrix::from_rows(rows)?.det().abs())
}

/// Sampled diagonal flow: one step multiplies particle coordinates by `u^{-n}`
/// and time coordinates by `u^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSchedule {
    pub m: usize,
    pub n: usize,
    pub u: Scalar,
}

impl FlowSchedule {
    pub fn new(m: usize, n: usize, u: Scalar) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameter("m and n must be positive".into()));
        }
        if !u.is_exact() || u.cmp_zero() != std::cmp::Ordering::Greater || u >= Scalar::one() {
            return Err(Error::InvalidParameter(format!("flow base u = {u} must be a rational in (0,1)")));
        }
        Ok(FlowSchedule { m, n, u })
    }

    /// Base `u` with `u^n = alpha*beta`, if that root is rational.
    pub fn from_alpha_beta(m: usize, n: usize, alpha_beta: &Scalar) -> Result<Self> {
        let u = alpha_beta.exact_root(n as u32).ok_or_else(|| {
            Error::InvalidParameter(format!("alpha*beta = {alpha_beta} has no rational {n}-th root"))
        })?;
        FlowSchedule::new(m, n, u)
    }

    pub fn k(&self) -> usize {
        self.m + self.n
    }

    /// `u^{-n*steps}`.
    pub fn particle_factor(&self, steps: i64) -> Scalar {
        self.u.pow(-(self.n as i32) * steps as i32)
    }

    /// `u^{m*steps}`.
    pub fn time_factor(&self, steps: i64) -> Scalar {
        self.u.pow(self.m as i32 * steps as i32)
    }

    /// The flow time of `steps` steps, `steps * (-m n log u)`.
    pub fn time(&self, steps: i64) -> f64 {
        -(self.m as f64) * (self.n as f64) * self.u.to_f64().ln() * steps as f64
    }

    /// The diagonal matrix `g` for `steps` steps.
    pub fn step_matrix(&self, steps: i64) -> Matrix {
        let mut g = Matrix::identity(self.k());
        let (p, t) = (self.particle_factor(steps), self.time_factor(steps));
        for i in 0..self.k() {
            g.set(i, i, if i < self.m { p.clone() } else { t.clone() });
        }
        g
    }

    /// `g v`.
    pub fn flow_vector(&self, steps: i64, v: &Vector) -> Vector {
        let (p, t) = (self.particle_factor(steps), self.time_factor(steps));
        Vector(v.iter().enumerate().map(|(i, x)| if i < self.m { x * &p } else { x * &t }).collect())
    }

    /// `g^{-T} w`: how dual vectors move under the flow.
    pub fn flow_dual(&self, steps: i64, w: &Vector) -> Vector {
        self.flow_vector(-steps, w)
    }

    pub fn flow_lattice(&self, steps: i64, l: &Lattice) -> Lattice {
        let rows = l.basis.rows().iter().map(|r| self.flow_vector(steps, r)).collect();
        Lattice::from_trusted(Matrix::from_rows(rows).expect("square"))
    }
}

/// `g^{steps} (Λ + c)`.
pub fn apply_flow(f: &FlowSchedule, steps: i64, x: &AffineLattice) -> AffineLattice {
    AffineLattice { lattice: f.flow_lattice(steps, &x.lattice), shift: f.flow_vector(steps, &x.shift) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_half_two() -> Lattice {
        Lattice::new(Matrix::from_rows(vec![Vector::parse(&["1/2", "0"]).unwrap(), Vector::from_ints(&[0, 2])]).unwrap())
            .unwrap()
    }

    #[test]
    fn covolume_examples() {
        let h = Hyperplane::from_dual(Vector::from_ints(&[0, 1]));
        assert_eq!(covolume_sq(&h, &Lattice::integer(2)).unwrap(), Scalar::one());
        let l = diag_half_two();
        let h = Hyperplane::from_dual(Vector::parse(&["0", "1/2"]).unwrap());
        assert_eq!(covolume_sq(&h, &l).unwrap(), Scalar::ratio(1, 4));
        let bad = Hyperplane::from_dual(Vector::parse(&["1/3", "0"]).unwrap());
        assert!(matches!(covolume_sq(&bad, &l), Err(Error::NotRational(_))));
    }

    #[test]
    fn dual_examples() {
        assert_eq!(Lattice::integer(3).dual().unwrap(), Lattice::integer(3));
        let d = diag_half_two().dual().unwrap();
        assert_eq!(d.basis().row(0), &Vector::from_ints(&[2, 0]));
        assert_eq!(d.basis().row(1), &Vector::parse(&["0", "1/2"]).unwrap());
    }

    #[test]
    fn small_hyperplanes_examples() {
        let hs = enumerate_small_hyperplanes(&Lattice::integer(2), &Scalar::from_int(2)).unwrap();
        assert_eq!(hs.len(), 4);
        let hs = enumerate_small_hyperplanes(&diag_half_two(), &Scalar::from_int(2)).unwrap();
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].dual_vector, Vector::parse(&["0", "1/2"]).unwrap());
        let hs = enumerate_small_hyperplanes(&diag_half_two(), &Scalar::ratio(1, 1000)).unwrap();
        assert!(hs.is_empty());
    }

    #[test]
    fn shortest_and_closest_examples() {
        assert_eq!(shortest_vector(&Lattice::integer(2)).unwrap().norm_sup(), Scalar::one());
        let v = shortest_vector(&diag_half_two()).unwrap();
        assert_eq!(v, Vector::parse(&["1/2", "0"]).unwrap());
        let x = AffineLattice::new(Lattice::integer(2), Vector::parse(&["3/10", "2/5"]).unwrap()).unwrap();
        let (p, d) = closest_point_with_distance(&x, &Vector::zeros(2)).unwrap();
        assert_eq!(p, Vector::parse(&["3/10", "2/5"]).unwrap());
        assert_eq!(d, Scalar::ratio(2, 5));
        let z = AffineLattice::new(Lattice::integer(2), Vector::zeros(2)).unwrap();
        assert_eq!(closest_point(&z, &Vector::zeros(2)).unwrap(), Vector::zeros(2));
    }

    #[test]
    fn dimension_limit() {
        let l = Lattice::integer(MAX_DIM + 1);
        assert!(matches!(shortest_vector(&l), Err(Error::DimensionTooLarge(9))));
    }

    #[test]
    fn flow_examples() {
        let f = FlowSchedule::new(1, 1, Scalar::ratio(1, 2)).unwrap();
        let p = Vector::parse(&["1/10", "8"]).unwrap();
        assert_eq!(f.flow_vector(1, &p), Vector::parse(&["1/5", "4"]).unwrap());
        let a = Matrix::from_rows(vec![Vector::parse(&["1/3"]).unwrap()]).unwrap();
        let x = affine_lattice_of(&a, &Vector::parse(&["1/6"]).unwrap()).unwrap();
        assert_eq!(apply_flow(&f, 0, &x), x);
        assert_eq!(apply_flow(&f, -3, &apply_flow(&f, 3, &x)), x);
        assert_eq!(f.flow_lattice(5, &x.lattice).covolume(), Scalar::one());
    }

    #[test]
    fn flow_from_alpha_beta() {
        let f = FlowSchedule::from_alpha_beta(2, 2, &Scalar::ratio(1, 16)).unwrap();
        assert_eq!(f.u, Scalar::ratio(1, 4));
        assert!(FlowSchedule::from_alpha_beta(1, 2, &Scalar::ratio(1, 2)).is_err());
        let g = f.step_matrix(1);
        assert_eq!(g.det(), Scalar::one());
    }

    #[test]
    fn pyramid_examples() {
        let v = pyramid_volume(&[Vector::from_ints(&[1, 0])], &Vector::from_ints(&[0, 1])).unwrap();
        assert_eq!(v, Scalar::one());
        let v = pyramid_volume(&[Vector::from_ints(&[1, 0])], &Vector::from_ints(&[3, 0])).unwrap();
        assert!(v.is_zero());
        let e = pyramid_volume(&[Vector::from_ints(&[1, 0, 0]), Vector::from_ints(&[2, 0, 0])], &Vector::from_ints(&[0, 0, 1]));
        assert!(matches!(e, Err(Error::DegenerateBase)));
    }

    #[test]
    fn hyperplane_basis_matches_covolume() {
        let l = Lattice::new(Matrix::from_int_rows(&[&[1, 2, 0], &[0, 1, 3], &[1, 1, 1]])).unwrap_err();
        assert!(matches!(l, Error::NotUnimodular(_)));
        let l = Lattice::new(Matrix::from_int_rows(&[&[1, 2, 0], &[0, 1, 3], &[0, 0, 1]])).unwrap();
        let w = primitive_dual(&l, &l.dual().unwrap().point(&[Integer::from(2), Integer::from(-1), Integer::from(1)]))
            .unwrap();
        let h = Hyperplane::from_dual(w);
        let (basis, lambda0) = hyperplane_basis(&h, &l).unwrap();
        assert_eq!(gram_det(&basis), h.covolume_sq);
        assert_eq!(h.dual_vector.dot(&lambda0), Scalar::one());
    }
}
