//! Small dense complex helpers on top of nalgebra.

use nalgebra::DMatrix;

use crate::C64;

/// Ratio of largest to smallest singular value; `inf` for rank-deficient input.
pub fn condition_number(a: &DMatrix<C64>) -> f64 {
    if a.is_empty() {
        return 1.0;
    }
    let sv = a.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Inverse of a Hermitian positive-definite matrix via Cholesky.
pub fn hpd_inverse(a: &DMatrix<C64>) -> Option<DMatrix<C64>> {
    let inv = a.clone().cholesky()?.inverse();
    // Cholesky's inverse is Hermitian only up to rounding; symmetrize.
    Some((&inv + inv.adjoint()) * C64::new(0.5, 0.0))
}

/// `xᴴ A y`.
pub fn quad_form(x: &[C64], a: &DMatrix<C64>, y: &[C64]) -> C64 {
    let n = x.len();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = C64::new(0.0, 0.0);
        for j in 0..n {
            row += a[(i, j)] * y[j];
        }
        acc += x[i].conj() * row;
    }
    acc
}

/// Real part of `xᴴ A x` for Hermitian `A`.
pub fn hermitian_form(x: &[C64], a: &DMatrix<C64>) -> f64 {
    quad_form(x, a, x).re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_hpd() {
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(2.0, 0.0), C64::new(0.5, 0.5), C64::new(0.5, -0.5), C64::new(3.0, 0.0)],
        );
        let inv = hpd_inverse(&a).unwrap();
        let eye = &a * &inv;
        assert!((eye - DMatrix::identity(2, 2)).norm() < 1e-14);
        assert!((condition_number(&DMatrix::<C64>::identity(3, 3)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn forms() {
        let a = DMatrix::from_diagonal_element(2, 2, C64::new(2.0, 0.0));
        let x = [C64::new(1.0, 1.0), C64::new(0.0, -1.0)];
        assert!((hermitian_form(&x, &a) - 6.0).abs() < 1e-15);
    }
}
