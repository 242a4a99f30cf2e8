//! Integer column operations used to extract Z-bases of sublattices.

use rug::Integer;

/// gcd of all entries (nonnegative; zero for the zero vector).
pub fn gcd_all(a: &[Integer]) -> Integer {
    a.iter().fold(Integer::new(), |g, x| g.gcd(x))
}

/// Unimodular `U` with `a U = (g, 0, ..., 0)` where `g = gcd(a)`.
///
/// Returned as a list of columns. Columns `1..k` span the integer kernel of
/// `a`; column `0` pairs with `a` to `g`.
pub fn column_transform(a: &[Integer]) -> (Integer, Vec<Vec<Integer>>) {
    let k = a.len();
    let mut cols: Vec<Vec<Integer>> = (0..k)
        .map(|j| (0..k).map(|i| Integer::from((i == j) as u32)).collect())
        .collect();
    let mut a0 = a.first().cloned().unwrap_or_default();
    for i in 1..k {
        let ai = a[i].clone();
        if ai == 0 {
            continue;
        }
        let (g, s, t) = a0.clone().gcd_cofactors(ai.clone(), Integer::new());
        let p = Integer::from(&ai / &g);
        let q = Integer::from(&a0 / &g);
        let c0 = cols[0].clone();
        let ci = cols[i].clone();
        cols[0] = c0.iter().zip(&ci).map(|(x, y)| Integer::from(&s * x) + Integer::from(&t * y)).collect();
        cols[i] = c0.iter().zip(&ci).map(|(x, y)| Integer::from(&p * x) - Integer::from(&q * y)).collect();
        a0 = g;
    }
    if a0 < 0 {
        a0 = -a0;
        for x in &mut cols[0] {
            *x = Integer::from(-&*x);
        }
    }
    (a0, cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dot(a: &[Integer], b: &[Integer]) -> Integer {
        a.iter().zip(b).map(|(x, y)| Integer::from(x * y)).sum()
    }

    #[test]
    fn simple_kernel() {
        let a: Vec<Integer> = [6, 10, 15].iter().map(|&x| Integer::from(x)).collect();
        let (g, cols) = column_transform(&a);
        assert_eq!(g, 1);
        assert_eq!(dot(&a, &cols[0]), 1);
        for c in &cols[1..] {
            assert_eq!(dot(&a, c), 0);
        }
    }

    proptest! {
        #[test]
        fn transform_is_unimodular(v in proptest::collection::vec(-30i64..30, 1..6)) {
            let a: Vec<Integer> = v.iter().map(|&x| Integer::from(x)).collect();
            let (g, cols) = column_transform(&a);
            prop_assert_eq!(&g, &gcd_all(&a));
            prop_assert_eq!(dot(&a, &cols[0]), g.clone());
            for c in &cols[1..] {
                prop_assert_eq!(dot(&a, c), Integer::new());
            }
            let m = crate::linalg::Matrix::from_rows(
                cols.iter().map(|c| crate::linalg::Vector::from_integers(c)).collect(),
            ).unwrap();
            prop_assert_eq!(m.det().abs(), crate::scalar::Scalar::one());
        }
    }
}
