//! Dense eigenvalues of general complex matrices.
//!
//! Matrices are built with nalgebra; eigenvalues come from faer's
//! Hessenberg-QR solver, whose deflation test is relative to the matrix norm
//! and so copes with clusters of tiny or repeated eigenvalues. Results are
//! sorted by modulus, largest first.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// All eigenvalues with multiplicity, sorted by descending modulus.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::InvalidParameter(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let a = faer::Mat::<Complex64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let mut ev = a.eigenvalues().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    sort_by_modulus(&mut ev);
    Ok(ev)
}

pub fn sort_by_modulus(ev: &mut [Complex64]) {
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.re.total_cmp(&a.re)).then(b.im.total_cmp(&a.im)));
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `max |(MM* - M*M)_{ij}|`; zero exactly for normal matrices.
pub fn non_normality(m: &ComplexMatrix) -> f64 {
    let a = m.adjoint();
    let c = m * &a - &a * m;
    c.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
