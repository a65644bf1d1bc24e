//! Dense least squares by Householder QR.
//!
//! Columns are scaled to unit Euclidean norm before factorization and the
//! solution is rescaled afterwards, which keeps mixed-magnitude bases
//! (1, x, x², ...) well conditioned.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves `min ‖A·c − b‖₂` for a row-major `rows × cols` design.
///
/// Fails with [`Error::SingularDesign`] when the scaled design has numerical
/// rank below `cols`.
pub fn lstsq<F: Scalar>(design: &[Vec<F>], target: &[F]) -> Result<Vec<F>> {
    let rows = design.len();
    if rows != target.len() {
        return Err(Error::Shape { expected: rows, got: target.len() });
    }
    let cols = design.first().map_or(0, Vec::len);
    if cols == 0 {
        return Err(Error::EmptyInput);
    }
    if let Some(bad) = design.iter().find(|r| r.len() != cols) {
        return Err(Error::Shape { expected: cols, got: bad.len() });
    }
    if rows < cols {
        return Err(Error::SingularDesign { rank: rows, cols });
    }

    // column-major copy, scaled
    let mut a: Vec<Vec<F>> = (0..cols)
        .map(|j| design.iter().map(|r| r[j]).collect())
        .collect();
    let mut scale = vec![F::one(); cols];
    for (j, col) in a.iter_mut().enumerate() {
        let n = crate::scalar::norm(col);
        if n > F::zero() {
            scale[j] = n;
            col.iter_mut().for_each(|v| *v = *v / n);
        }
    }
    let mut b = target.to_vec();

    let eps = F::epsilon() * F::count(rows.max(cols)) * F::lit(16.0);
    let mut rank = 0;
    for k in 0..cols {
        let sigma = a[k][k..].iter().map(|&v| v * v).sum::<F>().sqrt();
        if sigma <= eps {
            continue;
        }
        rank += 1;
        let alpha = if a[k][k] > F::zero() { -sigma } else { sigma };
        let mut v: Vec<F> = a[k][k..].to_vec();
        v[0] = v[0] - alpha;
        let vnorm2 = v.iter().map(|&x| x * x).sum::<F>();
        if vnorm2 == F::zero() {
            continue;
        }
        for col in a.iter_mut().skip(k) {
            let s = col[k..].iter().zip(&v).map(|(&x, &y)| x * y).sum::<F>();
            let f = (s + s) / vnorm2;
            for (x, &y) in col[k..].iter_mut().zip(&v) {
                *x = *x - f * y;
            }
        }
        let s = b[k..].iter().zip(&v).map(|(&x, &y)| x * y).sum::<F>();
        let f = (s + s) / vnorm2;
        for (x, &y) in b[k..].iter_mut().zip(&v) {
            *x = *x - f * y;
        }
    }
    if rank < cols {
        return Err(Error::SingularDesign { rank, cols });
    }
    let rmax = (0..cols).map(|k| a[k][k].abs()).fold(F::zero(), F::max);
    let tiny = rmax * F::epsilon() * F::count(cols) * F::lit(1e3);
    let rank = (0..cols).filter(|&k| a[k][k].abs() > tiny).count();
    if rank < cols {
        return Err(Error::SingularDesign { rank, cols });
    }

    let mut x = vec![F::zero(); cols];
    for k in (0..cols).rev() {
        let mut s = b[k];
        for j in k + 1..cols {
            s = s - a[j][k] * x[j];
        }
        x[k] = s / a[k][k];
    }
    for (xi, s) in x.iter_mut().zip(&scale) {
        *xi = *xi / *s;
    }
    Ok(x)
}
