//! LLL reduction that tracks the unimodular change of basis.

use rug::Integer;

use crate::linalg::Vector;
use crate::scalar::Scalar;

/// Gram–Schmidt data: `mu[i][j]` for `j < i` and squared lengths of `b*_i`.
#[derive(Clone, Debug)]
pub struct Gso {
    pub mu: Vec<Vec<Scalar>>,
    pub bstar: Vec<Vector>,
    pub bsq: Vec<Scalar>,
}

impl Gso {
    pub fn new(basis: &[Vector]) -> Gso {
        let n = basis.len();
        let mut bstar: Vec<Vector> = Vec::with_capacity(n);
        let mut bsq: Vec<Scalar> = Vec::with_capacity(n);
        let mut mu = vec![vec![Scalar::zero(); n]; n];
        for i in 0..n {
            let mut v = basis[i].clone();
            for j in 0..i {
                let m = &basis[i].dot(&bstar[j]) / &bsq[j];
                v = v.sub(&bstar[j].scale(&m));
                mu[i][j] = m;
            }
            mu[i][i] = Scalar::one();
            bsq.push(v.norm2_sq());
            bstar.push(v);
        }
        Gso { mu, bstar, bsq }
    }
}

/// A reduced basis with `basis[i] = sum_j transform[i][j] * original[j]`.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub basis: Vec<Vector>,
    pub transform: Vec<Vec<Integer>>,
}

impl Reduced {
    /// Maps coefficients on the reduced basis to coefficients on the original.
    pub fn to_original(&self, x: &[Integer]) -> Vec<Integer> {
        let k = self.transform.len();
        let mut out = vec![Integer::new(); k];
        for (xi, row) in x.iter().zip(&self.transform) {
            if *xi == 0 {
                continue;
            }
            for (o, r) in out.iter_mut().zip(row) {
                *o += Integer::from(xi * r);
            }
        }
        out
    }
}

/// LLL with `delta = 3/4`. The input rows must be linearly independent.
pub fn lll(basis: &[Vector]) -> Reduced {
    let n = basis.len();
    let mut b: Vec<Vector> = basis.to_vec();
    let mut u: Vec<Vec<Integer>> = (0..n)
        .map(|i| (0..n).map(|j| Integer::from((i == j) as u32)).collect())
        .collect();
    if n <= 1 {
        return Reduced { basis: b, transform: u };
    }
    let delta = Scalar::ratio(3, 4);
    let mut gso = Gso::new(&b);
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 100_000 {
            break;
        }
        for j in (0..k).rev() {
            let q = gso.mu[k][j].round();
            if q == 0 {
                continue;
            }
            let qs = Scalar::from_integer(q.clone());
            b[k] = b[k].sub(&b[j].scale(&qs));
            let uj = u[j].clone();
            for (x, y) in u[k].iter_mut().zip(&uj) {
                *x -= Integer::from(&q * y);
            }
            for i in 0..j {
                let t = &qs * &gso.mu[j][i];
                gso.mu[k][i] = &gso.mu[k][i] - &t;
            }
            gso.mu[k][j] = &gso.mu[k][j] - &qs;
        }
        let lhs = gso.bsq[k].clone();
        let rhs = &(&delta - &gso.mu[k][k - 1].square()) * &gso.bsq[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            gso = Gso::new(&b);
            k = (k - 1).max(1);
        }
    }
    Reduced { basis: b, transform: u }
}
