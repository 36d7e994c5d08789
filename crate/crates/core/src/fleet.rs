//! Seeded random models and vectors for sweeps and property tests.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::gksl::LindbladModel;
use crate::matkit::{c, hermitian_part, CMat, CVec, ONE};

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Complex Ginibre matrix with `E|a_ij|² = 1/d`.
pub fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    let s = (0.5 / rows as f64).sqrt();
    CMat::from_fn(rows, cols, |_, _| c(s * gaussian(rng), s * gaussian(rng)))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    hermitian_part(&ginibre(rng, d, d))
}

/// Uniformly distributed unit vector.
pub fn random_unit_vector(rng: &mut ChaCha8Rng, d: usize) -> CVec {
    loop {
        let v = CVec::from_fn(d, |_, _| c(gaussian(rng), gaussian(rng)));
        let n = v.norm();
        if n > 1e-12 {
            return v.unscale(n);
        }
    }
}

/// Haar unitary from the QR factorization of a Ginibre matrix with the
/// phases of `R`'s diagonal removed.
pub fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    let qr = ginibre(rng, d, d).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { ONE };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Gaussian model: Hermitian `H` and `m` Ginibre `L_ℓ`.
pub fn random_model(rng: &mut ChaCha8Rng, d: usize, m: usize) -> LindbladModel {
    let h = random_hermitian(rng, d);
    let ls = (0..m).map(|_| ginibre(rng, d, d)).collect();
    LindbladModel::new(h, ls).expect("Gaussian model is valid")
}

/// Model whose `H` and `L_ℓ` are block-diagonal with a leading `k × k` block,
/// rotated by a Haar unitary. The invariant subspace is `U·span(e_1..e_k)`.
pub fn block_diagonal_model(rng: &mut ChaCha8Rng, d: usize, m: usize, k: usize) -> (LindbladModel, CMat) {
    assert!(0 < k && k < d, "block size must be proper");
    let block = |rng: &mut ChaCha8Rng, herm: bool| {
        let a = if herm {
            random_hermitian(rng, k)
        } else {
            ginibre(rng, k, k)
        };
        let b = if herm {
            random_hermitian(rng, d - k)
        } else {
            ginibre(rng, d - k, d - k)
        };
        let mut out = CMat::zeros(d, d);
        out.view_mut((0, 0), (k, k)).copy_from(&a);
        out.view_mut((k, k), (d - k, d - k)).copy_from(&b);
        out
    };
    let h = block(rng, true);
    let ls = (0..m).map(|_| block(rng, false)).collect();
    let u = random_unitary(rng, d);
    let model = LindbladModel::new(h, ls)
        .expect("block model is valid")
        .conjugated(&u)
        .expect("unitary conjugation is valid");
    (model, u)
}

/// Model with `span(e_1..e_k)` invariant for `G` and every `L_ℓ` while its
/// complement is not, rotated by a Haar unitary.
///
/// `L_ℓ = [[A_ℓ, B_ℓ], [0, C_ℓ]]`; the lower-left block of `G` is
/// `−½ Σ B_ℓ* A_ℓ − i H_21`, which vanishes for `H_21 = (i/2) Σ B_ℓ* A_ℓ`.
pub fn triangular_model(rng: &mut ChaCha8Rng, d: usize, m: usize, k: usize) -> (LindbladModel, CMat) {
    assert!(0 < k && k < d, "block size must be proper");
    let mut h21 = CMat::zeros(d - k, k);
    let mut ls = Vec::with_capacity(m);
    for _ in 0..m {
        let a = ginibre(rng, k, k);
        let b = ginibre(rng, k, d - k);
        let cc = ginibre(rng, d - k, d - k);
        h21 += b.adjoint() * &a * c(0.0, 0.5);
        let mut l = CMat::zeros(d, d);
        l.view_mut((0, 0), (k, k)).copy_from(&a);
        l.view_mut((0, k), (k, d - k)).copy_from(&b);
        l.view_mut((k, k), (d - k, d - k)).copy_from(&cc);
        ls.push(l);
    }
    let mut h = CMat::zeros(d, d);
    h.view_mut((0, 0), (k, k)).copy_from(&random_hermitian(rng, k));
    h.view_mut((k, k), (d - k, d - k))
        .copy_from(&random_hermitian(rng, d - k));
    h.view_mut((k, 0), (d - k, k)).copy_from(&h21);
    h.view_mut((0, k), (k, d - k)).copy_from(&h21.adjoint());
    let u = random_unitary(rng, d);
    let model = LindbladModel::new(h, ls)
        .expect("triangular model is valid")
        .conjugated(&u)
        .expect("unitary conjugation is valid");
    (model, u)
}

/// Uniform draw from `[lo, hi)`.
pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gksl::drift;
    use crate::matkit::{basis_vector, frobenius, identity};
    use rand::SeedableRng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..5 {
            let u = random_unitary(&mut rng, d);
            assert!(frobenius(&(u.adjoint() * &u - identity(d))) < 1e-12);
        }
    }

    #[test]
    fn triangular_model_has_invariant_leading_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (d, k) in [(2, 1), (3, 1), (3, 2), (4, 2)] {
            let (model, u) = triangular_model(&mut rng, d, 2, k);
            let g = drift(&model);
            let q = u.columns(0, k).into_owned();
            let p = &q * q.adjoint();
            let comp = identity(d) - p;
            assert!(frobenius(&(&comp * &g * &q)) < 1e-12);
            for l in model.ls() {
                assert!(frobenius(&(&comp * l * &q)) < 1e-12);
            }
            // The complement is not invariant.
            let w = u.columns(k, d - k).into_owned();
            let pw = identity(d) - &w * w.adjoint();
            let leak: f64 = model.ls().iter().map(|l| frobenius(&(&pw * l * &w))).sum();
            assert!(leak > 1e-3);
        }
    }

    #[test]
    fn unit_vectors_are_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_unit_vector(&mut rng, 4);
        assert!((v.norm() - 1.0).abs() < 1e-14);
        assert_ne!(v, basis_vector(4, 0));
    }
}
