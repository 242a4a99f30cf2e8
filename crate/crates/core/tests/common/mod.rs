#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Integer;
use schmidt_core::lattice::Lattice;
use schmidt_core::{Matrix, Scalar, Vector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random integer matrix with determinant ±1, built from elementary row moves.
pub fn unimodular_int(rng: &mut ChaCha8Rng, k: usize, moves: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| (i == j) as i64).collect()).collect();
    for _ in 0..moves {
        let i = rng.gen_range(0..k);
        let j = rng.gen_range(0..k);
        match rng.gen_range(0..4) {
            0 if i != j => m.swap(i, j),
            1 => m[i].iter_mut().for_each(|x| *x = -*x),
            _ if i != j => {
                let c = [-2, -1, 1, 2][rng.gen_range(0..4)];
                let rj = m[j].clone();
                m[i].iter_mut().zip(rj).for_each(|(x, y)| *x += c * y);
            }
            _ => {}
        }
    }
    m
}

pub fn int_matrix(rows: &[Vec<i64>]) -> Matrix {
    Matrix::from_rows(rows.iter().map(|r| Vector::from_ints(r)).collect()).unwrap()
}

/// `U D V` with integer unimodular `U, V` and a rational diagonal `D` of determinant 1.
pub fn unimodular_rational(rng: &mut ChaCha8Rng, k: usize) -> Lattice {
    let u = int_matrix(&unimodular_int(rng, k, 3 * k));
    let v = int_matrix(&unimodular_int(rng, k, 3 * k));
    let mut d = Matrix::identity(k);
    let mut prod = Scalar::one();
    for i in 0..k - 1 {
        let x = Scalar::ratio(rng.gen_range(1..5), rng.gen_range(1..5));
        prod = &prod * &x;
        d.set(i, i, x);
    }
    d.set(k - 1, k - 1, prod.recip());
    Lattice::new(u.mul(&d).mul(&v)).unwrap()
}

/// Squared Euclidean distance from `v` to the span of `base`, by Gram–Schmidt.
pub fn dist_to_span_sq(base: &[Vector], v: &Vector) -> Scalar {
    let mut ortho: Vec<Vector> = Vec::new();
    for b in base {
        let mut x = b.clone();
        for o in &ortho {
            x = x.sub(&o.scale(&(&x.dot(o) / &o.norm2_sq())));
        }
        ortho.push(x);
    }
    let mut r = v.clone();
    for o in &ortho {
        r = r.sub(&o.scale(&(&r.dot(o) / &o.norm2_sq())));
    }
    r.norm2_sq()
}

/// Every integer vector in `prod [-b_i, b_i]`, as i64.
pub fn int_box(bounds: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (-b..=b).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

pub fn integers(c: &[i64]) -> Vec<Integer> {
    c.iter().map(|&x| Integer::from(x)).collect()
}

/// `|c_i|` bound for lattice points within Euclidean distance `radius` of a
/// point: `radius * |column i of B^{-1}|`.
pub fn coefficient_box(l: &Lattice, radius: f64) -> Vec<i64> {
    let inv = l.basis().inverse().unwrap();
    (0..l.dim())
        .map(|i| {
            let col: f64 = inv.col(i).to_f64().iter().map(|x| x * x).sum::<f64>().sqrt();
            (radius * col).ceil() as i64 + 1
        })
        .collect()
}

/// Random rational in `[lo, hi]` with denominator `den`.
pub fn rational_in(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Scalar {
    Scalar::ratio(rng.gen_range(lo * den..=hi * den), den)
}
