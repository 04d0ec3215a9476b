//! Dense complex matrix helpers on top of faer.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::C64;

pub type CMat = Mat<C64>;

const EXACT_SVD_MAX: usize = 768;

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

pub fn diag(d: &[C64]) -> CMat {
    let n = d.len();
    let mut m = CMat::zeros(n, n);
    for (i, z) in d.iter().enumerate() {
        m[(i, i)] = *z;
    }
    m
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

pub fn scale(a: &CMat, s: C64) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

/// `a + s * b`
pub fn axpy(a: &CMat, s: C64, b: &CMat) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] + s * b[(i, j)])
}

pub fn add_assign(a: &mut CMat, s: C64, b: &CMat) {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            a[(i, j)] += s * b[(i, j)];
        }
    }
}

pub fn max_abs(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn sub(a: &CMat, b: &CMat) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] - b[(i, j)])
}

/// Largest entry of `a - a^*`, relative to the largest entry of `a` (at least 1).
pub fn hermitian_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut d = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            d = d.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    d / max_abs(a).max(1.0)
}

pub fn unitary_defect(a: &CMat) -> f64 {
    let p = a.adjoint() * a;
    max_abs(&sub(&p, &identity(a.nrows())))
}

fn is_real(a: &CMat) -> bool {
    let scale = max_abs(a).max(f64::MIN_POSITIVE);
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if a[(i, j)].im.abs() > 1e-15 * scale {
                return false;
            }
        }
    }
    true
}

fn real_part(a: &CMat) -> Mat<f64> {
    Mat::<f64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].re)
}

fn check_hermitian(a: &CMat) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::Precondition("matrix is not square".into()));
    }
    let d = hermitian_defect(a);
    if d > crate::tol::HERMITIAN {
        return Err(Error::NotHermitian(d));
    }
    Ok(())
}

/// Eigenvalues of a Hermitian matrix in nondecreasing order.
pub fn eigvalsh(a: &CMat) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    if is_real(a) {
        real_part(a)
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))
    } else {
        a.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))
    }
}

/// Eigenvalues and eigenvectors (columns) of a Hermitian matrix.
pub fn eigh(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    check_hermitian(a)?;
    if is_real(a) {
        let ev = real_part(a)
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))?;
        let n = a.nrows();
        let vals = (0..n).map(|i| ev.S().column_vector()[i]).collect();
        let u = ev.U();
        Ok((vals, CMat::from_fn(n, n, |i, j| C64::new(u[(i, j)], 0.0))))
    } else {
        let ev = a.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))?;
        let n = a.nrows();
        let vals = (0..n).map(|i| ev.S().column_vector()[i].re).collect();
        Ok((vals, ev.U().to_owned()))
    }
}

/// `f(a)` for Hermitian `a` through its eigendecomposition.
pub fn func_hermitian(a: &CMat, f: impl Fn(f64) -> C64) -> Result<CMat> {
    let (vals, u) = eigh(a)?;
    let n = a.nrows();
    let fu = CMat::from_fn(n, n, |i, j| u[(i, j)] * f(vals[j]));
    Ok(&fu * u.adjoint())
}

pub fn solve(a: &CMat, b: &CMat) -> CMat {
    a.partial_piv_lu().solve(b)
}

pub fn inverse(a: &CMat) -> CMat {
    solve(a, &identity(a.nrows()))
}

pub fn col_norm(a: &CMat, j: usize) -> f64 {
    a.col(j).norm_l2()
}

/// Largest column norm of `a * frame` (frame columns are unit vectors).
pub fn frame_norm(a: &CMat, frame: &CMat) -> f64 {
    let p = a * frame;
    (0..p.ncols()).map(|j| col_norm(&p, j)).fold(0.0, f64::max)
}

/// Largest column norm.
pub fn max_col_norm(a: &CMat) -> f64 {
    (0..a.ncols()).map(|j| col_norm(a, j)).fold(0.0, f64::max)
}

pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    a.singular_values().map_err(|e| Error::Numerical(format!("svd: {e:?}")))
}

/// Operator norm: exact SVD for small matrices, power iteration otherwise.
pub fn spectral_norm(a: &CMat) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    if a.nrows().max(a.ncols()) <= EXACT_SVD_MAX {
        if let Ok(s) = singular_values(a) {
            return s.first().cloned().unwrap_or(0.0);
        }
    }
    let apply = |v: &[C64]| -> Vec<C64> { matvec(a, v) };
    let apply_adj = |v: &[C64]| -> Vec<C64> { matvec_adjoint(a, v) };
    power_norm(a.ncols(), None, apply, apply_adj, 1e-12, 2000)
}

pub fn matvec(a: &CMat, v: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::default(); a.nrows()];
    for (j, x) in v.iter().enumerate() {
        if *x == C64::default() {
            continue;
        }
        let col = a.col(j);
        for (i, o) in out.iter_mut().enumerate() {
            *o += col[i] * x;
        }
    }
    out
}

pub fn matvec_adjoint(a: &CMat, v: &[C64]) -> Vec<C64> {
    (0..a.ncols())
        .map(|j| {
            let col = a.col(j);
            (0..a.nrows()).map(|i| col[i].conj() * v[i]).sum()
        })
        .collect()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value of a matrix-free operator by power iteration on
/// `A^* A`. The start vector defaults to a fixed deterministic pattern.
pub fn power_norm(
    n: usize,
    start: Option<Vec<C64>>,
    apply: impl Fn(&[C64]) -> Vec<C64>,
    apply_adj: impl Fn(&[C64]) -> Vec<C64>,
    rtol: f64,
    max_iter: usize,
) -> f64 {
    let mut v = start.unwrap_or_else(|| {
        (0..n).map(|i| C64::new(1.0 + 0.37 * ((i * 7919) % 97) as f64 / 97.0, 0.11 * ((i * 104729) % 89) as f64 / 89.0)).collect()
    });
    let nv = vec_norm(&v);
    if nv == 0.0 {
        return 0.0;
    }
    for z in v.iter_mut() {
        *z /= nv;
    }
    let mut est = 0.0f64;
    for _ in 0..max_iter {
        let w = apply_adj(&apply(&v));
        let nw = vec_norm(&w);
        if nw == 0.0 {
            return 0.0;
        }
        let new = nw.sqrt();
        v = w.into_iter().map(|z| z / nw).collect();
        if (new - est).abs() <= rtol * new {
            return new;
        }
        est = new;
    }
    est
}

/// Columns of `cols` with each column scaled to unit norm.
pub fn normalize_columns(cols: &mut CMat) {
    for j in 0..cols.ncols() {
        let n = col_norm(cols, j);
        if n > 0.0 {
            for i in 0..cols.nrows() {
                cols[(i, j)] /= n;
            }
        }
    }
}
