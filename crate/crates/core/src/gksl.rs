//! GKSL models: drift, generator action, superoperators, exact evolution and
//! minimality of the representation.
//!
//! The Heisenberg generator is
//! `ℒ(x) = G* x + Σ_ℓ L_ℓ* x L_ℓ + x G` with `G = −½ Σ_ℓ L_ℓ* L_ℓ − iH`,
//! and the Schrödinger generator is its trace dual
//! `ℒ_*(ρ) = G ρ + Σ_ℓ L_ℓ ρ L_ℓ* + ρ G*`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkit::{
    self, commutator, ensure_finite, ensure_square, frobenius, hermitian_eigen, hermitian_part,
    identity, kron, matrix_exp, trace, unvectorize, vectorize, CMat, CVec, Tolerance, I, ONE,
};

/// Hermiticity tolerance used when a model is built from external data.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Tolerance on trace and positivity of density matrices.
pub const STATE_TOL: f64 = 1e-9;

/// GKSL data `(H, L_1, …, L_m)` on `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    dim: usize,
    h: CMat,
    ls: Vec<CMat>,
}

impl LindbladModel {
    pub fn new(h: CMat, ls: Vec<CMat>) -> Result<Self> {
        let dim = h.nrows();
        if dim == 0 {
            return Err(Error::Validation("model dimension must be positive".into()));
        }
        ensure_square(&h, dim)?;
        ensure_finite(&h)?;
        for l in &ls {
            ensure_square(l, dim)?;
            ensure_finite(l)?;
        }
        let skew = frobenius(&(&h - h.adjoint()));
        if skew > HERMITIAN_TOL * frobenius(&h).max(1.0) {
            return Err(Error::Validation(format!(
                "H is not Hermitian (‖H − H*‖_F = {skew:e})"
            )));
        }
        Ok(LindbladModel {
            dim,
            h: hermitian_part(&h),
            ls,
        })
    }

    /// Pure Hamiltonian model with no jump operators.
    pub fn hamiltonian(h: CMat) -> Result<Self> {
        Self::new(h, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> &CMat {
        &self.h
    }

    pub fn ls(&self) -> &[CMat] {
        &self.ls
    }

    /// Number of jump operators.
    pub fn m(&self) -> usize {
        self.ls.len()
    }

    /// Conjugates every operator by the unitary `u`: `A ↦ U A U*`.
    pub fn conjugated(&self, u: &CMat) -> Result<Self> {
        let ud = u.adjoint();
        LindbladModel::new(
            u * &self.h * &ud,
            self.ls.iter().map(|l| u * l * &ud).collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Heisenberg,
    Schrodinger,
}

/// `G = −½ Σ_ℓ L_ℓ* L_ℓ − iH`.
pub fn drift(model: &LindbladModel) -> CMat {
    let mut g = &model.h * (-I);
    for l in &model.ls {
        g -= (l.adjoint() * l).scale(0.5);
    }
    g
}

/// Stratonovich-corrected drift `G̃ = G − ½ Σ_ℓ L_ℓ²`.
pub fn stratonovich_drift(model: &LindbladModel) -> CMat {
    let mut g = drift(model);
    for l in &model.ls {
        g -= (l * l).scale(0.5);
    }
    g
}

/// `ℒ(x)` (Heisenberg) or `ℒ_*(x)` (Schrödinger) via the drift form.
pub fn apply_generator(model: &LindbladModel, x: &CMat, mode: Mode) -> Result<CMat> {
    ensure_square(x, model.dim)?;
    let g = drift(model);
    let out = match mode {
        Mode::Heisenberg => {
            let mut y = g.adjoint() * x + x * &g;
            for l in &model.ls {
                y += l.adjoint() * x * l;
            }
            y
        }
        Mode::Schrodinger => {
            let mut y = &g * x + x * g.adjoint();
            for l in &model.ls {
                y += l * x * l.adjoint();
            }
            y
        }
    };
    Ok(out)
}

/// Heisenberg generator in commutator–dissipator form,
/// `i[H, x] + ½ Σ_ℓ (−L*L x + 2 L* x L − x L*L)`.
pub fn apply_generator_dissipator_form(model: &LindbladModel, x: &CMat) -> Result<CMat> {
    ensure_square(x, model.dim)?;
    let mut y = commutator(&model.h, x) * I;
    for l in &model.ls {
        let ll = l.adjoint() * l;
        y += (-(&ll * x) + (l.adjoint() * x * l).scale(2.0) - x * &ll).scale(0.5);
    }
    Ok(y)
}

/// Matrix of the generator on column-stacked `d × d` matrices.
#[derive(Debug, Clone)]
pub struct Superoperator {
    pub mode: Mode,
    pub dim: usize,
    pub matrix: CMat,
}

impl Superoperator {
    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        ensure_square(x, self.dim)?;
        Ok(unvectorize(&(&self.matrix * vectorize(x)), self.dim))
    }

    /// `‖S vec(I)‖` in Heisenberg mode, `‖vec(I)* S‖` in Schrödinger mode;
    /// both vanish for a valid GKSL generator.
    pub fn identity_residual(&self) -> f64 {
        let id = vectorize(&identity(self.dim));
        match self.mode {
            Mode::Heisenberg => (&self.matrix * id).norm(),
            Mode::Schrodinger => (id.adjoint() * &self.matrix).norm(),
        }
    }
}

/// Assembles `ℒ` or `ℒ_*` as a `d² × d²` matrix using
/// `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.
pub fn superoperator(model: &LindbladModel, mode: Mode) -> Superoperator {
    let d = model.dim;
    let id = identity(d);
    let g = drift(model);
    let matrix = match mode {
        Mode::Heisenberg => {
            // G* x + x G + Σ L* x L
            let mut s = kron(&id, &g.adjoint()) + kron(&g.transpose(), &id);
            for l in &model.ls {
                s += kron(&l.transpose(), &l.adjoint());
            }
            s
        }
        Mode::Schrodinger => {
            // G ρ + ρ G* + Σ L ρ L*
            let mut s = kron(&id, &g) + kron(&g.conjugate(), &id);
            for l in &model.ls {
                s += kron(&l.conjugate(), l);
            }
            s
        }
    };
    Superoperator { mode, dim: d, matrix }
}

/// A density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    rho: CMat,
}

impl QuantumState {
    /// Validates Hermiticity, unit trace and positivity within `STATE_TOL`.
    pub fn new(rho: CMat) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::DimError {
                expected: rho.nrows(),
                found: rho.ncols(),
            });
        }
        ensure_finite(&rho)?;
        let skew = frobenius(&(&rho - rho.adjoint()));
        if skew > STATE_TOL * frobenius(&rho).max(1.0) {
            return Err(Error::Validation(format!("density matrix not Hermitian ({skew:e})")));
        }
        let rho = hermitian_part(&rho);
        let tr = trace(&rho).re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::Validation(format!("density matrix trace {tr} ≠ 1")));
        }
        let lmin = matkit::min_hermitian_eigenvalue(&rho);
        if lmin < -STATE_TOL {
            return Err(Error::Validation(format!(
                "density matrix has negative eigenvalue {lmin:e}"
            )));
        }
        Ok(QuantumState { rho })
    }

    /// `|ξ⟩⟨ξ| / ‖ξ‖²`.
    pub fn pure(xi: &CVec) -> Result<Self> {
        let n2 = xi.norm_squared();
        if n2 == 0.0 {
            return Err(Error::ZeroVector);
        }
        QuantumState::new(xi * xi.adjoint() / Complex64::new(n2, 0.0))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        QuantumState {
            rho: identity(d).unscale(d as f64),
        }
    }

    pub fn rho(&self) -> &CMat {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    /// Eigenvalues in increasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.rho).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Eigenvalues with round-off negatives in `[−STATE_TOL, 0)` set to zero.
    /// For reporting only.
    pub fn clipped_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues()
            .into_iter()
            .map(|l| if (-STATE_TOL..0.0).contains(&l) { 0.0 } else { l })
            .collect()
    }

    pub fn rank(&self, tol: &Tolerance) -> usize {
        let ev = self.eigenvalues();
        let max = ev.iter().copied().fold(0.0, f64::max);
        let cut = tol.cutoff(max);
        ev.iter().filter(|&&l| l > cut).count()
    }
}

/// `𝒯_{*t}(ρ) = exp(t ℒ_*) ρ`.
pub fn evolve_state(model: &LindbladModel, rho: &QuantumState, t: f64) -> Result<QuantumState> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    if rho.dim() != model.dim {
        return Err(Error::DimError {
            expected: model.dim,
            found: rho.dim(),
        });
    }
    if t == 0.0 {
        return Ok(rho.clone());
    }
    let s = superoperator(model, Mode::Schrodinger);
    let prop = matrix_exp(&s.matrix, t);
    let out = hermitian_part(&unvectorize(&(prop * vectorize(rho.rho())), model.dim));
    let lmin = matkit::min_hermitian_eigenvalue(&out);
    if lmin < -STATE_TOL {
        return Err(Error::BrokenExponential(lmin));
    }
    QuantumState::new(out)
}

/// Result of the linear-independence test on `{I, L_1, …, L_m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalityCheck {
    pub minimal: bool,
    /// Coefficients `(c_0, c_1, …, c_m)` with `c_0 I + Σ c_ℓ L_ℓ = 0`,
    /// scaled so that the last non-negligible coefficient is `−1`.
    pub witness: Option<Vec<Complex64>>,
}

pub fn check_minimal(model: &LindbladModel, tol: &Tolerance) -> MinimalityCheck {
    let d = model.dim;
    let cols = model.m() + 1;
    let mut mat = CMat::zeros(d * d, cols);
    mat.set_column(0, &vectorize(&identity(d)));
    for (j, l) in model.ls.iter().enumerate() {
        mat.set_column(j + 1, &vectorize(l));
    }
    let kernel = matkit::kernel_basis(&mat, tol).unwrap_or_default();
    match kernel.first() {
        None => MinimalityCheck {
            minimal: true,
            witness: None,
        },
        Some(v) => {
            let big = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let last = v
                .iter()
                .rposition(|z| z.norm() > 1e-8 * big)
                .unwrap_or(cols - 1);
            let scale = -ONE / v[last];
            MinimalityCheck {
                minimal: false,
                witness: Some(v.iter().map(|z| z * scale).collect()),
            }
        }
    }
}

/// An equivalent representation with `{I, L_1, …, L_m'}` linearly
/// independent.
///
/// Each `L_ℓ` loses its identity component `c_ℓ = tr(L_ℓ)/d`; for
/// `L = L' + c·I` the generator changes by `½[c L'* − c̄ L', ·]`, which is
/// absorbed by `H ← H + (c L'* − c̄ L')/(2i)`. The traceless family is then
/// compressed through the eigenbasis of its Gram matrix `C*C = VΛV*`;
/// the columns of `CV` preserve `Σ_ℓ vec(L_ℓ) vec(L_ℓ)*`
/// and hence the dissipator.
pub fn minimalize(model: &LindbladModel, tol: &Tolerance) -> Result<LindbladModel> {
    let d = model.dim;
    let id = identity(d);
    let mut h = model.h.clone();
    let mut traceless = Vec::with_capacity(model.m());
    for l in &model.ls {
        let c = trace(l) / Complex64::new(d as f64, 0.0);
        let lp = l - &id * c;
        h += (lp.adjoint() * c - &lp * c.conj()) / (I * 2.0);
        traceless.push(lp);
    }
    if traceless.is_empty() {
        return LindbladModel::new(h, Vec::new());
    }
    let mut coeffs = CMat::zeros(d * d, traceless.len());
    for (j, l) in traceless.iter().enumerate() {
        coeffs.set_column(j, &vectorize(l));
    }
    // Rank from singular values; directions from the Gram eigenbasis, since the
    // SVD's singular vectors lose accuracy on rank-deficient complex input.
    let sv = coeffs.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let cut = tol.cutoff(smax);
    let rank = sv.iter().filter(|&&s| s > cut && s > 0.0).count();
    let (_, vecs) = hermitian_eigen(&(coeffs.adjoint() * &coeffs));
    let ls = vecs
        .iter()
        .rev()
        .take(rank)
        .map(|v| unvectorize(&(&coeffs * v), d))
        .collect();
    LindbladModel::new(h, ls)
}
