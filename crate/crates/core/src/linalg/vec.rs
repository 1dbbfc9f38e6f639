//! Small dense-vector helpers used across the crate.

use crate::scalar::Scalar;

pub fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

pub fn norm_sq<F: Scalar>(a: &[F]) -> F {
    dot(a, a)
}

pub fn norm<F: Scalar>(a: &[F]) -> F {
    norm_sq(a).sqrt()
}

/// `y += alpha * x`
pub fn axpy<F: Scalar>(alpha: F, x: &[F], y: &mut [F]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}

pub fn sub<F: Scalar>(a: &[F], b: &[F]) -> Vec<F> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

pub fn scale<F: Scalar>(alpha: F, a: &[F]) -> Vec<F> {
    a.iter().map(|x| alpha * *x).collect()
}

/// Euclidean distance between `a` and `b`.
pub fn dist<F: Scalar>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x - *y) * (*x - *y))
        .sum::<F>()
        .sqrt()
}

/// Normalizes `a` in place and returns its original norm.
pub fn normalize<F: Scalar>(a: &mut [F]) -> F {
    let n = norm(a);
    if n > F::zero() {
        for x in a.iter_mut() {
            *x /= n;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_norm_dist() {
        let a = [1.0f64, 2.0, 2.0];
        let b = [2.0f64, 0.0, 1.0];
        assert_eq!(dot(&a, &b), 4.0);
        assert_eq!(norm(&a), 3.0);
        assert_eq!(dist(&a, &b), (1.0f64 + 4.0 + 1.0).sqrt());
    }

    #[test]
    fn axpy_and_normalize() {
        let mut y = vec![1.0f64, 1.0];
        axpy(2.0, &[3.0, -1.0], &mut y);
        assert_eq!(y, vec![7.0, -1.0]);
        let n = normalize(&mut y);
        assert!((n - 50.0f64.sqrt()).abs() < 1e-12);
        assert!((norm(&y) - 1.0).abs() < 1e-12);
    }
}
