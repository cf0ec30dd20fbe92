//! Small complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// `a^H b`.
#[inline]
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[inline]
pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Columns of `m` selected by `cols`, as a new matrix.
pub fn select_columns(m: &CMat, cols: &[usize]) -> CMat {
    CMat::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])])
}

/// Dominant left/right singular pair of `m`: returns `(sigma_max^2, u, v)`
/// with `m v = sigma u`.
pub fn dominant_singular(m: &CMat) -> (f64, CVec, CVec) {
    let svd = m.clone().svd(true, true);
    let (k, s) =
        svd.singular_values.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc },
        );
    let u = svd.u.expect("requested").column(k).into_owned();
    let v = svd.v_t.expect("requested").row(k).adjoint();
    (s * s, u, v)
}

/// `log2 det(A)` for a Hermitian positive-definite `A`; `None` otherwise.
pub fn log2_det_hpd(a: CMat) -> Option<f64> {
    let chol = a.cholesky()?;
    Some(chol.l_dirty().diagonal().iter().map(|d| 2.0 * d.re.log2()).sum())
}

/// Numerically stable `ln(sum(exp(xs)))`. Returns `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}
