//! Dense complex linear algebra used by every analysis route.
//!
//! Everything here works on `nalgebra` dynamic matrices of `Complex64`.
//! Matrices are vectorized by column stacking, so that
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`, and operator-space inner products are
//! Hilbert–Schmidt: `⟨A, B⟩ = tr(A* B) = vec(A)* vec(B)`.

mod closure;
mod expm;
mod subspace;

pub use closure::{invariant_closure, lie_closure, operator_algebra_closure};
pub use expm::matrix_exp;
pub use subspace::{Field, SubspaceBasis};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Thresholds for rank and dependence decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Singular values below `rel_rank_tol * sigma_max` count as zero.
    pub rel_rank_tol: f64,
    /// Absolute floor under which anything counts as zero.
    pub abs_floor: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel_rank_tol: 1e-9,
            abs_floor: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel_rank_tol: f64, abs_floor: f64) -> Result<Self> {
        if !(rel_rank_tol > 0.0 && abs_floor > 0.0) {
            return Err(Error::Validation(format!(
                "tolerances must be positive (rel {rel_rank_tol}, abs {abs_floor})"
            )));
        }
        Ok(Tolerance {
            rel_rank_tol,
            abs_floor,
        })
    }

    pub fn with_rel(rel_rank_tol: f64) -> Self {
        Tolerance {
            rel_rank_tol,
            ..Tolerance::default()
        }
    }

    /// Cut-off for singular values of a matrix whose largest one is `sigma_max`.
    pub fn cutoff(&self, sigma_max: f64) -> f64 {
        (self.rel_rank_tol * sigma_max).max(self.abs_floor)
    }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn is_finite(a: &CMat) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_finite(a: &CMat) -> Result<()> {
    if is_finite(a) {
        Ok(())
    } else {
        Err(Error::InvalidMatrix)
    }
}

pub fn ensure_square(a: &CMat, d: usize) -> Result<()> {
    if a.nrows() != d {
        return Err(Error::DimError {
            expected: d,
            found: a.nrows(),
        });
    }
    if a.ncols() != d {
        return Err(Error::DimError {
            expected: d,
            found: a.ncols(),
        });
    }
    Ok(())
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// `tr(A* B)`.
pub fn hs_inner(a: &CMat, b: &CMat) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(a: &CMat) -> Complex64 {
    a.diagonal().iter().sum()
}

/// Column-stacking vectorization.
pub fn vectorize(a: &CMat) -> CVec {
    CVec::from_column_slice(a.as_slice())
}

/// Inverse of [`vectorize`] for a `d × d` matrix.
pub fn unvectorize(v: &CVec, d: usize) -> CMat {
    assert_eq!(v.len(), d * d, "vector length is not a square");
    CMat::from_column_slice(d, d, v.as_slice())
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `‖A − A*‖_F ≤ tol · max(1, ‖A‖_F)`.
pub fn is_hermitian(a: &CMat, tol: f64) -> bool {
    a.is_square() && frobenius(&(a - a.adjoint())) <= tol * frobenius(a).max(1.0)
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

pub fn ket_bra(u: &CVec, v: &CVec) -> CMat {
    u * v.adjoint()
}

pub fn basis_vector(d: usize, k: usize) -> CVec {
    let mut e = CVec::zeros(d);
    e[k] = ONE;
    e
}

/// Singular values in decreasing order.
pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    ensure_finite(a)?;
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Number of singular values above the tolerance cut-off.
pub fn numeric_rank(a: &CMat, tol: &Tolerance) -> Result<usize> {
    let s = singular_values(a)?;
    let Some(&smax) = s.first() else {
        return Ok(0);
    };
    let cut = tol.cutoff(smax);
    Ok(s.iter().filter(|&&x| x > cut).count())
}

/// Orthonormal basis of the right kernel of `a`.
pub fn kernel_basis(a: &CMat, tol: &Tolerance) -> Result<Vec<CVec>> {
    Ok(kernel_with_spectrum(a, tol)?.0)
}

/// Kernel basis together with the full singular spectrum, decreasing.
pub fn kernel_with_spectrum(a: &CMat, tol: &Tolerance) -> Result<(Vec<CVec>, Vec<f64>)> {
    ensure_finite(a)?;
    let n = a.ncols();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    // nalgebra only returns min(rows, cols) right singular vectors, so wide
    // inputs are padded with zero rows.
    let padded = if a.nrows() < n {
        let mut p = CMat::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Internal("SVD did not return right singular vectors".into()))?;
    let sv = &svd.singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let cut = tol.cutoff(smax);
    let mut kernel = Vec::new();
    for (i, &s) in sv.iter().enumerate() {
        if s <= cut {
            kernel.push(v_t.row(i).adjoint());
        }
    }
    let mut spectrum: Vec<f64> = sv.iter().copied().collect();
    spectrum.sort_by(|x, y| y.total_cmp(x));
    Ok((kernel, spectrum))
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues increasing.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, Vec<CVec>) {
    let h = hermitian_part(a);
    let eig = h.symmetric_eigen();
    let mut pairs: Vec<(f64, CVec)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, eig.eigenvectors.column(i).into_owned()))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

pub fn min_hermitian_eigenvalue(a: &CMat) -> f64 {
    hermitian_eigen(a).0.first().copied().unwrap_or(0.0)
}

/// Eigenvalues of a general square matrix from its complex Schur form.
pub fn eigenvalues(a: &CMat) -> Vec<Complex64> {
    if a.is_empty() {
        return Vec::new();
    }
    match a.clone().schur().eigenvalues() {
        Some(ev) => ev.iter().copied().collect(),
        None => a.clone().schur().unpack().1.diagonal().iter().copied().collect(),
    }
}

/// One unit eigenvector per distinct eigenvalue cluster (several when an
/// eigenspace is numerically multi-dimensional).
pub fn eigenvectors(a: &CMat) -> Vec<CVec> {
    let d = a.nrows();
    let scale = frobenius(a).max(1e-300);
    if scale < 1e-14 {
        return (0..d).map(|k| basis_vector(d, k)).collect();
    }
    let mut distinct: Vec<Complex64> = Vec::new();
    for lambda in eigenvalues(a) {
        if distinct.iter().all(|mu| (mu - lambda).norm() > 1e-7 * scale) {
            distinct.push(lambda);
        }
    }
    let mut out = Vec::new();
    for lambda in distinct {
        let shifted = a - identity(d) * lambda;
        let svd = shifted.svd(false, true);
        let Some(v_t) = svd.v_t else { continue };
        let sv = &svd.singular_values;
        let smin_idx = (0..sv.len())
            .min_by(|&i, &j| sv[i].total_cmp(&sv[j]))
            .unwrap_or(0);
        let mut found = false;
        for i in 0..sv.len() {
            if sv[i] <= 1e-7 * scale {
                out.push(v_t.row(i).adjoint());
                found = true;
            }
        }
        if !found {
            out.push(v_t.row(smin_idx).adjoint());
        }
    }
    out
}

/// Best complex scalar `z` minimizing `‖a − z·b‖_F`, with the relative residual.
pub fn best_scalar_fit(a: &CMat, b: &CMat) -> (Complex64, f64) {
    let bb = hs_inner(b, b).re;
    if bb == 0.0 {
        return (ZERO, if frobenius(a) == 0.0 { 0.0 } else { 1.0 });
    }
    let z = hs_inner(b, a) / bb;
    let r = frobenius(&(a - b * z));
    (z, r / frobenius(a).max(1e-300))
}

/// Pauli matrices `σ_1, σ_2, σ_3`.
pub fn pauli() -> [CMat; 3] {
    [
        CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_identity_and_zero() {
        let tol = Tolerance::default();
        assert_eq!(numeric_rank(&identity(3), &tol).unwrap(), 3);
        assert_eq!(numeric_rank(&CMat::zeros(4, 4), &tol).unwrap(), 0);
    }

    #[test]
    fn rank_drops_tiny_singular_value() {
        // Exact rational rank of diag(1, 1e-15) is 2; truncated at relative
        // threshold 1e-9 the second entry is below cut-off.
        let a = CMat::from_diagonal(&CVec::from_vec(vec![ONE, c(1e-15, 0.0)]));
        assert_eq!(numeric_rank(&a, &Tolerance::default()).unwrap(), 1);
    }

    #[test]
    fn rank_rejects_nan() {
        let mut a = identity(2);
        a[(0, 1)] = c(f64::NAN, 0.0);
        assert_eq!(numeric_rank(&a, &Tolerance::default()), Err(Error::InvalidMatrix));
    }

    #[test]
    fn kernel_of_wide_matrix() {
        let a = CMat::from_row_slice(1, 3, &[ONE, ONE, ZERO]);
        let k = kernel_basis(&a, &Tolerance::default()).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!((&a * v).norm() < 1e-12);
        }
    }

    #[test]
    fn vectorization_convention() {
        let a = CMat::from_fn(3, 3, |i, j| c(i as f64 + 0.5, j as f64 - 1.0));
        let x = CMat::from_fn(3, 3, |i, j| c((i * j) as f64, 1.0 + i as f64));
        let b = CMat::from_fn(3, 3, |i, j| c(j as f64, (i + 2 * j) as f64));
        let lhs = vectorize(&(&a * &x * &b));
        let rhs = kron(&b.transpose(), &a) * vectorize(&x);
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn eigenvectors_of_diagonal() {
        let a = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]));
        let v = eigenvectors(&a);
        assert_eq!(v.len(), 3);
        for x in &v {
            let ax = &a * x;
            let (z, r) = best_scalar_fit(&CMat::from_column_slice(3, 1, ax.as_slice()),
                &CMat::from_column_slice(3, 1, x.as_slice()));
            assert!(r < 1e-10, "{z} {r}");
        }
    }
}
