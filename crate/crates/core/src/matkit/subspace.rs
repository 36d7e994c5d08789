use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CMat, CVec, Tolerance};
use crate::error::{Error, Result};

/// Scalar field over which a span is taken.
///
/// `Real` spans treat `C^n` as `R^{2n}` with inner product `Re⟨u, v⟩`, so `v`
/// and `i·v` are independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    Complex,
    Real,
}

/// Orthonormal basis of a subspace of `C^n` (or of `R^{2n}` for real spans).
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    vectors: Vec<CVec>,
    tol: Tolerance,
    field: Field,
    /// Smallest relative residual of an accepted vector.
    min_accepted: f64,
    /// Largest relative residual of a rejected, non-zero vector.
    max_rejected: f64,
}

impl SubspaceBasis {
    pub fn empty(ambient_dim: usize, field: Field, tol: Tolerance) -> Self {
        SubspaceBasis {
            ambient_dim,
            vectors: Vec::new(),
            tol,
            field,
            min_accepted: f64::INFINITY,
            max_rejected: 0.0,
        }
    }

    /// Builds a basis from arbitrary spanning vectors.
    pub fn spanned_by(
        ambient_dim: usize,
        field: Field,
        tol: Tolerance,
        vectors: &[CVec],
    ) -> Result<Self> {
        let mut b = SubspaceBasis::empty(ambient_dim, field, tol);
        for v in vectors {
            b.push(v)?;
        }
        Ok(b)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn tol(&self) -> Tolerance {
        self.tol
    }

    pub fn vectors(&self) -> &[CVec] {
        &self.vectors
    }

    /// Dimension over the basis field.
    pub fn count(&self) -> usize {
        self.vectors.len()
    }

    /// Real dimension: twice the count for complex spans.
    pub fn real_dim(&self) -> usize {
        match self.field {
            Field::Complex => 2 * self.count(),
            Field::Real => self.count(),
        }
    }

    pub fn max_dim(&self) -> usize {
        match self.field {
            Field::Complex => self.ambient_dim,
            Field::Real => 2 * self.ambient_dim,
        }
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.max_dim()
    }

    /// Closest distance of any decision to the rejection threshold, as the
    /// pair (smallest accepted residual, largest rejected non-zero residual),
    /// both relative to the candidate norm.
    pub fn margins(&self) -> (f64, f64) {
        (self.min_accepted, self.max_rejected)
    }

    fn inner(&self, u: &CVec, v: &CVec) -> Complex64 {
        let z = u.dotc(v);
        match self.field {
            Field::Complex => z,
            Field::Real => Complex64::new(z.re, 0.0),
        }
    }

    /// Component of `v` orthogonal to the span (two Gram–Schmidt passes).
    pub fn residual(&self, v: &CVec) -> CVec {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &self.vectors {
                let coef = self.inner(b, &r);
                r.axpy(-coef, b, Complex64::new(1.0, 0.0));
            }
        }
        r
    }

    /// Orthogonal projection of `v` onto the span.
    pub fn project(&self, v: &CVec) -> CVec {
        v - self.residual(v)
    }

    /// `‖residual(v)‖ / ‖v‖`, zero for the zero vector.
    pub fn relative_residual(&self, v: &CVec) -> f64 {
        let n = v.norm();
        if n == 0.0 {
            0.0
        } else {
            self.residual(v).norm() / n
        }
    }

    /// Membership within the basis tolerance.
    pub fn contains(&self, v: &CVec) -> bool {
        let n = v.norm();
        n <= self.tol.abs_floor || self.residual(v).norm() <= self.tol.rel_rank_tol * n
    }

    /// Whether every basis vector of `other` lies in this span.
    pub fn contains_span(&self, other: &SubspaceBasis) -> bool {
        other.vectors.iter().all(|v| {
            self.residual(v).norm() <= 10.0 * self.tol.rel_rank_tol.max(other.tol.rel_rank_tol)
        })
    }

    /// Adds `v` if it is independent of the current span. Returns whether the
    /// basis grew.
    pub fn push(&mut self, v: &CVec) -> Result<bool> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimError {
                expected: self.ambient_dim,
                found: v.len(),
            });
        }
        if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidMatrix);
        }
        if self.is_full() {
            return Ok(false);
        }
        let n = v.norm();
        if n <= self.tol.abs_floor {
            return Ok(false);
        }
        let r = self.residual(v);
        let rn = r.norm();
        let ratio = rn / n;
        if ratio <= self.tol.rel_rank_tol || rn <= self.tol.abs_floor {
            if ratio > 1e-13 {
                self.max_rejected = self.max_rejected.max(ratio);
            }
            return Ok(false);
        }
        self.min_accepted = self.min_accepted.min(ratio);
        self.vectors.push(r.unscale(rn));
        Ok(true)
    }

    /// Basis of `span(self ∪ new_vectors)`.
    pub fn orthonormal_extend(&self, new_vectors: &[CVec]) -> Result<SubspaceBasis> {
        let mut out = self.clone();
        for v in new_vectors {
            out.push(v)?;
        }
        Ok(out)
    }

    /// Basis vectors as the columns of an `ambient_dim × count` matrix.
    pub fn matrix(&self) -> CMat {
        let mut m = CMat::zeros(self.ambient_dim, self.count());
        for (j, v) in self.vectors.iter().enumerate() {
            m.set_column(j, v);
        }
        m
    }

    /// Orthogonal projector onto a complex span.
    pub fn projector(&self) -> CMat {
        let m = self.matrix();
        &m * m.adjoint()
    }

    /// Complex span of the same vectors.
    pub fn to_complex(&self) -> Result<SubspaceBasis> {
        SubspaceBasis::spanned_by(self.ambient_dim, Field::Complex, self.tol, &self.vectors)
    }

    /// Maximum deviation of the Gram matrix from the identity (in the field's
    /// inner product).
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, u) in self.vectors.iter().enumerate() {
            for (j, v) in self.vectors.iter().enumerate() {
                let g = self.inner(u, v);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}
