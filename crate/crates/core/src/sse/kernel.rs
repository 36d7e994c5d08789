//! Allocation-free time stepping for the linear SSE.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::gksl::{drift, LindbladModel};
use crate::matkit::{identity, matrix_exp, CMat};

/// Time discretization of `dX = G X dt + Σ_ℓ L_ℓ X dW^ℓ`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// `X ← X + h G X + Σ_ℓ L_ℓ X ΔW^ℓ`.
    EulerMaruyama,
    /// `X ← e^{hG} (X + Σ_ℓ L_ℓ X ΔW^ℓ)`.
    #[default]
    ExponentialEuler,
    /// `X ← X + h G X + M X + ½ (M² − h Σ_ℓ L_ℓ²) X` with `M = Σ_ℓ ΔW^ℓ L_ℓ`.
    /// Strong order one when the `L_ℓ` commute (in particular for `m = 1`).
    Milstein,
}

/// Row-major dense square matrix.
#[derive(Debug, Clone)]
pub(crate) struct DenseOp {
    d: usize,
    data: Vec<Complex64>,
}

impl DenseOp {
    pub(crate) fn new(a: &CMat) -> Self {
        let d = a.nrows();
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                data.push(a[(i, j)]);
            }
        }
        DenseOp { d, data }
    }

    /// `out = A x`.
    #[inline]
    pub(crate) fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        let d = self.d;
        for (i, o) in out.iter_mut().enumerate().take(d) {
            let row = &self.data[i * d..(i + 1) * d];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            *o = acc;
        }
    }

    /// `out += s · A x` for real `s`.
    #[inline]
    pub(crate) fn apply_add_scaled(&self, s: f64, x: &[Complex64], out: &mut [Complex64]) {
        let d = self.d;
        for (i, o) in out.iter_mut().enumerate().take(d) {
            let row = &self.data[i * d..(i + 1) * d];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            *o += acc * s;
        }
    }
}

pub(crate) struct Stepper {
    d: usize,
    scheme: Scheme,
    base: DenseOp,
    ls: Vec<DenseOp>,
}

pub(crate) struct Scratch {
    y: Vec<Complex64>,
    z: Vec<Complex64>,
}

impl Scratch {
    pub(crate) fn new(d: usize) -> Self {
        Scratch {
            y: vec![Complex64::new(0.0, 0.0); d],
            z: vec![Complex64::new(0.0, 0.0); d],
        }
    }
}

impl Stepper {
    pub(crate) fn new(model: &LindbladModel, scheme: Scheme, h: f64) -> Self {
        let d = model.dim();
        let g = drift(model);
        let base = match scheme {
            Scheme::EulerMaruyama => identity(d) + g.scale(h),
            Scheme::ExponentialEuler => matrix_exp(&g, h),
            Scheme::Milstein => {
                let mut b = identity(d) + g.scale(h);
                for l in model.ls() {
                    b -= (l * l).scale(0.5 * h);
                }
                b
            }
        };
        Stepper {
            d,
            scheme,
            base: DenseOp::new(&base),
            ls: model.ls().iter().map(DenseOp::new).collect(),
        }
    }

    /// Advances `x` by one step with increments `dw` (one per channel).
    #[inline]
    pub(crate) fn step(&self, x: &mut [Complex64], dw: &[f64], s: &mut Scratch) {
        let d = self.d;
        match self.scheme {
            Scheme::EulerMaruyama => {
                self.base.apply(x, &mut s.y);
                for (l, &w) in self.ls.iter().zip(dw) {
                    l.apply_add_scaled(w, x, &mut s.y);
                }
                x[..d].copy_from_slice(&s.y);
            }
            Scheme::ExponentialEuler => {
                s.z.copy_from_slice(&x[..d]);
                for (l, &w) in self.ls.iter().zip(dw) {
                    l.apply_add_scaled(w, x, &mut s.z);
                }
                self.base.apply(&s.z, x);
            }
            Scheme::Milstein => {
                // z = M x, y = base x + z + ½ M z
                s.z.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                for (l, &w) in self.ls.iter().zip(dw) {
                    l.apply_add_scaled(w, x, &mut s.z);
                }
                self.base.apply(x, &mut s.y);
                for i in 0..d {
                    s.y[i] += s.z[i];
                }
                for (l, &w) in self.ls.iter().zip(dw) {
                    l.apply_add_scaled(0.5 * w, &s.z, &mut s.y);
                }
                x[..d].copy_from_slice(&s.y);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::{c, CVec};

    #[test]
    fn dense_op_matches_nalgebra() {
        let a = CMat::from_fn(3, 3, |i, j| c(i as f64 + 1.0, j as f64 - 0.5));
        let x = CVec::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)]);
        let mut out = vec![Complex64::new(0.0, 0.0); 3];
        DenseOp::new(&a).apply(x.as_slice(), &mut out);
        let want = &a * &x;
        for i in 0..3 {
            assert!((out[i] - want[i]).norm() < 1e-14);
        }
    }
}
