//! Schnorr–Euchner style enumeration on a reduced basis.
//!
//! All pruning comparisons are carried out in [`Scalar`] arithmetic, so in
//! rational mode the set of visited points is exactly the set inside the
//! (possibly shrinking) Euclidean radius.

use rug::Integer;

use super::reduce::{lll, Gso, Reduced};
use crate::linalg::Vector;
use crate::scalar::Scalar;

/// Pruning bounds for [`enumerate`].
#[derive(Clone, Debug)]
pub struct Bound {
    /// Euclidean radius squared around the target.
    pub radius_sq: Scalar,
    /// Optional sup-norm radius; each level then also checks the slab
    /// `|<v - t, b*_i>| <= R |b*_i|_1`, which every point of the box obeys.
    pub sup: Option<Scalar>,
    /// Require strict inequality in the sup test (search for strict improvements).
    pub strict: bool,
    /// Only coefficient vectors with gcd 1 are wanted.
    pub primitive: bool,
    /// On the innermost level visit only the sup-norm minimisers of the line
    /// instead of every point in range. Suits searches for one best point.
    pub line: bool,
    /// Never visit the zero coefficient vector.
    pub nonzero: bool,
}

impl Bound {
    pub fn euclid(radius_sq: Scalar) -> Self {
        Bound { radius_sq, sup: None, strict: false, primitive: false, line: false, nonzero: false }
    }
}

struct Walker<'a, F> {
    basis: &'a [Vector],
    target: &'a Vector,
    gso: &'a Gso,
    l1: Vec<Scalar>,
    tau: Vec<Scalar>,
    bound: Bound,
    x: Vec<Integer>,
    dev: Vec<Scalar>,
    part: Vec<Scalar>,
    visit: F,
}

impl<'a, F> Walker<'a, F>
where
    F: FnMut(&[Integer], &Scalar) -> Option<Bound>,
{
    fn center(&self, i: usize) -> Scalar {
        let n = self.x.len();
        let mut c = self.tau[i].clone();
        for j in i + 1..n {
            if self.x[j] != 0 {
                let t = self.gso.mu[j][i].mul_int(&self.x[j]);
                c = &c - &t;
            }
        }
        c
    }

    fn feasible(&self, i: usize, dev: &Scalar, part: &Scalar) -> bool {
        if *part > self.bound.radius_sq {
            return false;
        }
        if let Some(r) = &self.bound.sup {
            let lhs = &dev.abs() * &self.gso.bsq[i];
            let rhs = r * &self.l1[i];
            if self.bound.strict { lhs < rhs } else { lhs <= rhs }
        } else {
            true
        }
    }

    fn ancestors_ok(&self, i: usize) -> bool {
        (i + 1..self.x.len()).all(|j| self.feasible(j, &self.dev[j], &self.part[j]))
    }

    /// Integer `x` minimising `|base + x b_0|_sup`, where `base` collects the
    /// higher levels. The function is convex, so the integer minimum sits
    /// next to a real minimiser, and a real minimiser sits at a breakpoint.
    fn line_level(&mut self, partial: &Scalar) {
        let b0 = &self.basis[0];
        let mut base = self.target.neg();
        for (j, xj) in self.x.iter().enumerate().skip(1) {
            if *xj != 0 {
                base = base.add(&Vector(self.basis[j].iter().map(|a| a.mul_int(xj)).collect()));
            }
        }
        let f = |x: &Scalar| -> Scalar {
            base.iter().zip(b0.iter()).fold(Scalar::zero(), |acc, (a, c)| acc.max_of(&(a + &(c * x)).abs()))
        };
        let k = base.dim();
        let mut pts = Vec::new();
        for i in 0..k {
            let (ai, ci) = (&base[i], &b0[i]);
            if !ci.is_zero() {
                pts.push(&-ai / ci);
            }
            for j in i + 1..k {
                let (aj, cj) = (&base[j], &b0[j]);
                let diff = cj - ci;
                if !diff.is_zero() {
                    pts.push(&(ai - aj) / &diff);
                }
                let sum = ci + cj;
                if !sum.is_zero() {
                    pts.push(&-&(ai + aj) / &sum);
                }
            }
        }
        let Some(star) = pts.into_iter().map(|p| (f(&p), p)).reduce(|a, b| if b.0 < a.0 { b } else { a }) else {
            return;
        };
        let (lo, hi) = (star.1.floor(), star.1.ceil());
        let mut xs = vec![lo.clone()];
        if hi != lo {
            xs.push(hi);
        }
        let zero_line = self.bound.nonzero && self.x[1..].iter().all(|v| *v == 0);
        if zero_line {
            xs = vec![Integer::from(1), Integer::from(-1)];
        }
        let c = self.center(0);
        for x in xs {
            if !self.ancestors_ok(0) {
                break;
            }
            let d = &Scalar::from_integer(x.clone()) - &c;
            let part = partial + &(&d.square() * &self.gso.bsq[0]);
            self.x[0] = x;
            self.dev[0] = d;
            self.part[0] = part.clone();
            if let Some(b) = (self.visit)(&self.x, &part) {
                self.bound = b;
            }
        }
        self.x[0] = Integer::new();
    }

    fn level(&mut self, i: usize, partial: &Scalar) {
        if i == 0 && self.bound.line {
            return self.line_level(partial);
        }
        let c = self.center(i);
        let x0 = c.round();
        let bi = self.gso.bsq[i].clone();
        let lone = self.bound.primitive && i == 0 && self.x[1..].iter().all(|v| *v == 0);
        for dir in [1i32, -1] {
            let mut x = if dir == 1 { x0.clone() } else { Integer::from(&x0 - 1) };
            loop {
                if !self.ancestors_ok(i) {
                    self.x[i] = Integer::new();
                    return;
                }
                let d = &Scalar::from_integer(x.clone()) - &c;
                let part = partial + &(&d.square() * &bi);
                if !self.feasible(i, &d, &part) {
                    break;
                }
                let skip = lone && x != 1 && x != -1;
                if !skip {
                    self.x[i] = x.clone();
                    self.dev[i] = d;
                    self.part[i] = part.clone();
                    if i == 0 {
                        if let Some(b) = (self.visit)(&self.x, &part) {
                            self.bound = b;
                        }
                    } else {
                        self.level(i - 1, &part);
                    }
                }
                if lone && ((dir == 1 && x >= 1) || (dir == -1 && x <= -1)) {
                    break;
                }
                if dir == 1 {
                    x += 1;
                } else {
                    x -= 1;
                }
            }
        }
        self.x[i] = Integer::new();
    }
}

/// Depth-first search over `x` with `|sum x_i b_i - target|` inside `bound`.
///
/// The callback receives coefficients on `basis` and the squared distance;
/// returning `Some(b)` replaces the bound, and branches that no longer fit
/// are abandoned immediately.
pub fn enumerate<F>(basis: &[Vector], target: &Vector, bound: Bound, visit: F)
where
    F: FnMut(&[Integer], &Scalar) -> Option<Bound>,
{
    let n = basis.len();
    if n == 0 {
        return;
    }
    let gso = Gso::new(basis);
    let tau = (0..n).map(|i| &target.dot(&gso.bstar[i]) / &gso.bsq[i]).collect();
    let l1 = gso.bstar.iter().map(Vector::norm_l1).collect();
    let mut w = Walker {
        basis,
        target,
        gso: &gso,
        l1,
        tau,
        bound,
        x: vec![Integer::new(); n],
        dev: vec![Scalar::zero(); n],
        part: vec![Scalar::zero(); n],
        visit,
    };
    w.level(n - 1, &Scalar::zero());
}

/// Babai nearest-plane coefficients for `target` on `basis`.
pub fn babai(basis: &[Vector], target: &Vector) -> Vec<Integer> {
    let n = basis.len();
    let gso = Gso::new(basis);
    let tau: Vec<Scalar> = (0..n).map(|i| &target.dot(&gso.bstar[i]) / &gso.bsq[i]).collect();
    let mut x = vec![Integer::new(); n];
    for i in (0..n).rev() {
        let mut c = tau[i].clone();
        for j in i + 1..n {
            c = &c - &gso.mu[j][i].mul_int(&x[j]);
        }
        x[i] = c.round();
    }
    x
}

fn combine(basis: &[Vector], x: &[Integer]) -> Vector {
    let k = basis.first().map_or(0, Vector::dim);
    let mut v = Vector::zeros(k);
    for (xi, b) in x.iter().zip(basis) {
        if *xi != 0 {
            v = v.add(&Vector(b.0.iter().map(|a| a.mul_int(xi)).collect()));
        }
    }
    v
}

fn sign_normalize(c: &mut [Integer]) -> bool {
    let flip = c.iter().find(|x| **x != 0).is_some_and(|x| *x < 0);
    if flip {
        for x in c.iter_mut() {
            *x = Integer::from(-&*x);
        }
    }
    flip
}

/// Norm used by the searches below.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    Sup,
    Euclid,
}

impl Norm {
    fn of(self, v: &Vector) -> Scalar {
        match self {
            Norm::Sup => v.norm_sup(),
            Norm::Euclid => v.norm2_sq(),
        }
    }

    /// Search bound for points strictly better than `val` (sup) or no worse
    /// than `val` (Euclidean).
    fn bound(self, val: &Scalar, k: usize) -> Bound {
        match self {
            Norm::Sup => Bound {
                radius_sq: &val.square() * &Scalar::from_int(k as i64),
                sup: Some(val.clone()),
                strict: true,
                primitive: false,
                line: true,
                nonzero: false,
            },
            Norm::Euclid => Bound::euclid(val.clone()),
        }
    }
}

/// Result of a shortest/closest search, with coefficients on the original basis.
#[derive(Clone, Debug)]
pub struct Found {
    pub vector: Vector,
    pub coeffs: Vec<Integer>,
    /// Sup norm, or squared Euclidean norm for [`Norm::Euclid`].
    pub value: Scalar,
}

/// Shortest nonzero vector.
///
/// In the sup norm the search only looks for strict improvements, so among
/// several minimisers the result is the lexicographically smallest
/// sign-normalised coefficient vector among those met before the bound
/// tightened (deterministic, but not a global tie-break).
pub fn shortest(basis: &[Vector], norm: Norm) -> Found {
    let red = lll(basis);
    let k = basis.first().map_or(0, Vector::dim);
    let mut best: Option<Found> = None;
    let consider = |v: Vector, mut coeffs: Vec<Integer>, best: &mut Option<Found>| {
        let flip = sign_normalize(&mut coeffs);
        let v = if flip { v.neg() } else { v };
        let val = norm.of(&v);
        let better = match best {
            None => true,
            Some(b) => match val.cmp_s(&b.value) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => coeffs < b.coeffs,
                std::cmp::Ordering::Greater => false,
            },
        };
        if better {
            *best = Some(Found { vector: v, coeffs, value: val });
        }
    };
    for (i, b) in red.basis.iter().enumerate() {
        consider(b.clone(), red.transform[i].clone(), &mut best);
    }
    let nonzero = |b: Bound| Bound { nonzero: true, ..b };
    let start = nonzero(norm.bound(&best.as_ref().expect("nonempty basis").value, k));
    let zero = Vector::zeros(k);
    enumerate(&red.basis, &zero, start, |x, _| {
        if x.iter().all(|c| *c == 0) {
            return None;
        }
        let v = combine(&red.basis, x);
        consider(v, red.to_original(x), &mut best);
        best.as_ref().map(|b| nonzero(norm.bound(&b.value, k)))
    });
    best.expect("nonempty basis")
}

/// Lattice vector closest to `target`, with the same tie rule as [`shortest`].
pub fn closest(basis: &[Vector], target: &Vector, norm: Norm) -> Found {
    let red = lll(basis);
    let k = target.dim();
    let x0 = babai(&red.basis, target);
    let v0 = combine(&red.basis, &x0);
    let mut best = Found { value: norm.of(&v0.sub(target)), vector: v0, coeffs: red.to_original(&x0) };
    let start = norm.bound(&best.value, k);
    enumerate(&red.basis, target, start, |x, _| {
        let v = combine(&red.basis, x);
        let val = norm.of(&v.sub(target));
        let replace = match val.cmp_s(&best.value) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => red.to_original(x) < best.coeffs,
            std::cmp::Ordering::Greater => false,
        };
        if replace {
            best = Found { coeffs: red.to_original(x), vector: v, value: val };
        }
        Some(norm.bound(&best.value, k))
    });
    best
}

/// All lattice vectors (with original coefficients) of squared Euclidean
/// norm at most `bound_sq`, zero excluded.
pub fn all_within(basis: &[Vector], bound_sq: &Scalar) -> Vec<(Vec<Integer>, Vector, Scalar)> {
    collect_within(basis, Bound::euclid(bound_sq.clone()))
}

/// Like [`all_within`] but only primitive vectors. Multiples of a very short
/// vector are skipped without being visited.
pub fn primitive_within(basis: &[Vector], bound_sq: &Scalar) -> Vec<(Vec<Integer>, Vector, Scalar)> {
    let b = Bound { primitive: true, ..Bound::euclid(bound_sq.clone()) };
    collect_within(basis, b)
        .into_iter()
        .filter(|(c, _, _)| super::kernel::gcd_all(c) == 1)
        .collect()
}

fn collect_within(basis: &[Vector], bound: Bound) -> Vec<(Vec<Integer>, Vector, Scalar)> {
    let red: Reduced = lll(basis);
    let k = basis.first().map_or(0, Vector::dim);
    let mut out = Vec::new();
    enumerate(&red.basis, &Vector::zeros(k), bound, |x, d| {
        if x.iter().any(|c| *c != 0) {
            out.push((red.to_original(x), combine(&red.basis, x), d.clone()));
        }
        None
    });
    out
}
