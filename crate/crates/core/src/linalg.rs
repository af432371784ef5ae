//! Dense eigensolvers backed by LAPACK.
//!
//! nalgebra's own `SymmetricEigen` deflates too early on matrices with
//! clusters of tiny eigenvalues (errors up to 1e-3 on rank-deficient Gram
//! matrices) and its complex Schur iteration can stall on nearly scalar
//! inputs, so eigenproblems go through `zheev` / `zgeev` instead.

use num_complex::Complex64;

use crate::qsim::CMatrix;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Eigenvalues (ascending) and orthonormal eigenvector columns of a
/// Hermitian matrix. Only the Hermitian part of `h` is used.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let mut a = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let ni = n as i32;
    let mut w = vec![0.0; n];
    let mut rwork = vec![0.0; (3 * n).saturating_sub(2).max(1)];
    let mut info = 0;
    let mut query = [czero()];
    unsafe { lapack::zheev(b'V', b'U', ni, a.as_mut_slice(), ni, &mut w, &mut query, -1, &mut rwork, &mut info) };
    let lwork = (query[0].re as usize).max(2 * n);
    let mut work = vec![czero(); lwork];
    unsafe {
        lapack::zheev(b'V', b'U', ni, a.as_mut_slice(), ni, &mut w, &mut work, lwork as i32, &mut rwork, &mut info)
    };
    assert_eq!(info, 0, "zheev failed with info {info}");
    (w, a)
}

/// Eigenvalues of a general square complex matrix, unordered.
pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let mut a = m.clone();
    let ni = n as i32;
    let mut w = vec![czero(); n];
    let mut vl = [czero()];
    let mut vr = [czero()];
    let mut rwork = vec![0.0; 2 * n];
    let mut info = 0;
    let mut query = [czero()];
    unsafe {
        lapack::zgeev(
            b'N',
            b'N',
            ni,
            a.as_mut_slice(),
            ni,
            &mut w,
            &mut vl,
            1,
            &mut vr,
            1,
            &mut query,
            -1,
            &mut rwork,
            &mut info,
        )
    };
    let lwork = (query[0].re as usize).max(2 * n);
    let mut work = vec![czero(); lwork];
    unsafe {
        lapack::zgeev(
            b'N',
            b'N',
            ni,
            a.as_mut_slice(),
            ni,
            &mut w,
            &mut vl,
            1,
            &mut vr,
            1,
            &mut work,
            lwork as i32,
            &mut rwork,
            &mut info,
        )
    };
    assert_eq!(info, 0, "zgeev failed with info {info}");
    w
}

/// Eigenphases in `(-π, π]` and orthonormal eigenvector columns of a
/// unitary (more generally, normal) matrix, from the complex Schur form.
/// Also returns the largest strictly-upper entry of the triangular factor,
/// which is zero for exactly normal inputs.
pub fn unitary_eigen(u: &CMatrix) -> (Vec<f64>, CMatrix, f64) {
    let n = u.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0), 0.0);
    }
    let mut a = u.clone();
    let ni = n as i32;
    let mut sdim = 0;
    let mut w = vec![czero(); n];
    let mut vs = CMatrix::zeros(n, n);
    let mut rwork = vec![0.0; n];
    let mut bwork = vec![0; n];
    let mut info = 0;
    let mut query = [czero()];
    unsafe {
        lapack::zgees(
            b'V',
            b'N',
            None,
            ni,
            a.as_mut_slice(),
            ni,
            &mut sdim,
            &mut w,
            vs.as_mut_slice(),
            ni,
            &mut query,
            -1,
            &mut rwork,
            &mut bwork,
            &mut info,
        )
    };
    let lwork = (query[0].re as usize).max(2 * n);
    let mut work = vec![czero(); lwork];
    unsafe {
        lapack::zgees(
            b'V',
            b'N',
            None,
            ni,
            a.as_mut_slice(),
            ni,
            &mut sdim,
            &mut w,
            vs.as_mut_slice(),
            ni,
            &mut work,
            lwork as i32,
            &mut rwork,
            &mut bwork,
            &mut info,
        )
    };
    assert_eq!(info, 0, "zgees failed with info {info}");
    let mut off = 0.0f64;
    for j in 0..n {
        for i in 0..j {
            off = off.max(a[(i, j)].norm());
        }
    }
    (w.iter().map(|z| z.arg()).collect(), vs, off)
}
