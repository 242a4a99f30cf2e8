//! White strategies: the hyperplane-avoidance strategy for `Bad_A`, the
//! wrapper for `Bad^b`, and the growth check for singular `A`.

mod bad_a;
mod bad_b;
mod bad_inf;

pub use bad_a::{BadA, BadAOptions, BadAState, Case1Certificate, LedgerEntry, Tracked};
pub use bad_b::{margin, rescaled_lattice, BadB, BadBEvent, Greedy};
pub use bad_inf::{bad_inf_verify, BadInfReport, BadInfVerdict};

use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::fractal::DecayParams;
use crate::lattice::FlowSchedule;
use crate::linalg::{Matrix, Vector};
use crate::scalar::Scalar;

/// `ceil(sqrt k)`.
pub fn xi0_ceil(k: usize) -> u32 {
    let mut c = 0u32;
    while (c as usize) * (c as usize) < k {
        c += 1;
    }
    c
}

/// Largest power of two not above half of `(4 (2 ceil(sqrt k) C)^(1/eta))^(-1)`.
///
/// Depends only on the decay constants and `k`, never on `beta`.
pub fn alpha_for(decay: &DecayParams, k: usize) -> Scalar {
    dyadic_below(decay, xi0_ceil(k))
}

/// Largest power of two not above half of `(4 (2 xi0 C)^(1/eta))^(-1)`.
pub(crate) fn dyadic_below(decay: &DecayParams, xi0: u32) -> Scalar {
    let prec = 256;
    let base = Float::with_val(prec, 2 * xi0) * Float::with_val(prec, decay.c);
    let root = base.ln() / Float::with_val(prec, decay.eta);
    let bound = (Float::with_val(prec, 4) * root.exp()).recip();
    let half = bound / 2u32;
    let mut e = 0u32;
    while Float::with_val(prec, Float::i_exp(1, -(e as i32))) > half {
        e += 1;
    }
    Scalar::from_rational(rug::Rational::from((1, Integer::from(1) << e)))
}

/// `j` with `rho = u^(n j)`, if `rho` lies on the flow grid.
pub fn grid_index(schedule: &FlowSchedule, rho: &Scalar) -> Option<i64> {
    let step = schedule.u.pow(schedule.n as i32);
    let mut x = Scalar::one();
    if *rho <= x {
        for j in 0..=4096 {
            if x == *rho {
                return Some(j);
            }
            if x < *rho {
                return None;
            }
            x = &x * &step;
        }
    } else {
        for j in 1..=64 {
            x = &x / &step;
            if x == *rho {
                return Some(-j);
            }
            if x > *rho {
                return None;
            }
        }
    }
    None
}

/// Float precision needed to flow a float lattice `steps` steps without
/// losing the short vectors.
pub fn required_precision(schedule: &FlowSchedule, steps: i64) -> u32 {
    let bits_per_step = (1.0 / schedule.u.to_f64()).log2().ceil() as i64 * schedule.m.max(schedule.n) as i64;
    (96 + 2 * bits_per_step * steps.max(0)) as u32
}

/// `w0 = (a, 0)` in `(L_A(0) Z^k)^*`: the smallest nonzero `a ∈ Z^m`
/// (sup norm up to `bound`, first nonzero entry positive, then
/// lexicographic) with `a^T A` integral.
pub fn case1_detect(a: &Matrix, bound: i64) -> Result<Vector> {
    if !a.is_exact() {
        return Err(Error::NotCase1("A is not rational".into()));
    }
    let (m, n) = (a.nrows(), a.ncols());
    for shell in 1..=bound {
        let side = 2 * shell + 1;
        let total = (side as u64).pow(m as u32);
        for idx in 0..total {
            let mut rem = idx;
            let mut v = vec![0i64; m];
            for c in v.iter_mut().rev() {
                *c = (rem % side as u64) as i64 - shell;
                rem /= side as u64;
            }
            if v.iter().map(|c| c.abs()).max() != Some(shell) {
                continue;
            }
            if v.iter().find(|c| **c != 0).is_some_and(|c| *c < 0) {
                continue;
            }
            let av = Vector::from_ints(&v);
            let integral = (0..n).all(|j| av.dot(&a.col(j)).dist_to_int().is_zero());
            if integral {
                return Ok(av.concat(&Vector::zeros(n)));
            }
        }
    }
    Err(Error::NotCase1(format!("no a with |a| <= {bound} makes a^T A integral")))
}

/// `A` as an `m x n` matrix from a row-major point of `R^{mn}`.
pub fn matrix_from_point(x: &Vector, m: usize, n: usize) -> Matrix {
    Matrix::from_rows((0..m).map(|i| Vector(x.0[i * n..(i + 1) * n].to_vec())).collect()).expect("rectangular")
}

/// Row-major flattening of a matrix.
pub fn point_from_matrix(a: &Matrix) -> Vector {
    Vector(a.rows().iter().flat_map(|r| r.0.iter().cloned()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractal::SupportSpec;

    #[test]
    fn alpha_examples() {
        let d = DecayParams::new(2.0, 1.0, 1.0).unwrap();
        assert_eq!(alpha_for(&d, 2), Scalar::ratio(1, 64));
        let d = DecayParams::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(alpha_for(&d, 2), Scalar::ratio(1, 32));
        let d = DecayParams::new(2.0, 1e12, 1.0).unwrap();
        assert!(alpha_for(&d, 2) <= Scalar::ratio(1, 8));
        let c = DecayParams::for_support(&SupportSpec::cantor());
        assert_eq!(alpha_for(&c, 2), Scalar::ratio(1, 1024));
    }

    #[test]
    fn case1_examples() {
        let zero = Matrix::from_rows(vec![Vector::zeros(1)]).unwrap();
        assert_eq!(case1_detect(&zero, 50).unwrap(), Vector::from_ints(&[1, 0]));
        let third = Matrix::from_rows(vec![Vector::parse(&["1/3"]).unwrap()]).unwrap();
        assert_eq!(case1_detect(&third, 50).unwrap(), Vector::from_ints(&[3, 0]));
        let phi = Matrix::from_rows(vec![Vector(vec![Scalar::named("golden", 128).unwrap()])]).unwrap();
        assert!(matches!(case1_detect(&phi, 50), Err(Error::NotCase1(_))));
        let big = Matrix::from_rows(vec![Vector::parse(&["1/101"]).unwrap()]).unwrap();
        assert!(case1_detect(&big, 50).is_err());
    }

    #[test]
    fn grid() {
        let f = FlowSchedule::new(1, 1, Scalar::ratio(1, 256)).unwrap();
        assert_eq!(grid_index(&f, &Scalar::one()), Some(0));
        assert_eq!(grid_index(&f, &Scalar::ratio(1, 65536)), Some(2));
        assert_eq!(grid_index(&f, &Scalar::from_int(256)), Some(-1));
        assert_eq!(grid_index(&f, &Scalar::ratio(1, 2)), None);
        assert_eq!(xi0_ceil(2), 2);
        assert_eq!(xi0_ceil(4), 2);
        assert_eq!(xi0_ceil(5), 3);
    }
}
