//! Built-in example models.

use crate::gksl::LindbladModel;
use crate::matkit::{c, identity, pauli, CMat, I, ONE, ZERO};
use crate::{Error, Result};

/// Dilation factor of the non-minimal `pure-hamiltonian` variant.
pub const DILATION: num_complex::Complex64 = num_complex::Complex64::new(0.6, 0.8);

pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    build: fn() -> LindbladModel,
}

impl CatalogEntry {
    pub fn model(&self) -> LindbladModel {
        (self.build)()
    }
}

pub const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "pauli",
        summary: "d=2, L = iσ_2 (anti-selfadjoint), H = σ_3; irreducible",
        build: pauli_model,
    },
    CatalogEntry {
        name: "pure-hamiltonian",
        summary: "d=2, H = σ_3, no noise; reducible, LARC fails",
        build: pure_hamiltonian,
    },
    CatalogEntry {
        name: "pure-hamiltonian-dilated",
        summary: "pure-hamiltonian written non-minimally with L = z·1",
        build: pure_hamiltonian_dilated,
    },
    CatalogEntry {
        name: "so3",
        summary: "d=3 rotation example; irreducible, LARC fails at every e_k",
        build: so3,
    },
    CatalogEntry {
        name: "generic-cycle-3",
        summary: "generic QMS on the 3-cycle 1→2→3→1 with unit rates, energies 0,1,2",
        build: generic_cycle_3,
    },
];

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}

pub fn lookup(name: &str) -> Result<LindbladModel> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .map(CatalogEntry::model)
        .ok_or_else(|| Error::Validation(format!("unknown catalog model `{name}`")))
}

pub fn pauli_model() -> LindbladModel {
    let [_, s2, s3] = pauli();
    LindbladModel::new(s3, vec![s2 * I]).expect("valid catalog model")
}

pub fn pure_hamiltonian() -> LindbladModel {
    let [_, _, s3] = pauli();
    LindbladModel::hamiltonian(s3).expect("valid catalog model")
}

/// Same generator as [`pure_hamiltonian`] with `L_1 = z·1`, `G = −|z|²/2 − iH`.
pub fn pure_hamiltonian_dilated() -> LindbladModel {
    let [_, _, s3] = pauli();
    LindbladModel::new(s3, vec![identity(2) * DILATION]).expect("valid catalog model")
}

pub fn so3_l() -> CMat {
    CMat::from_row_slice(3, 3, &[ZERO, ONE, ZERO, -ONE, ZERO, ZERO, ZERO, ZERO, ZERO])
}

pub fn so3_h() -> CMat {
    CMat::from_row_slice(3, 3, &[ZERO, ZERO, -I, ZERO, ZERO, ZERO, I, ZERO, ZERO])
}

/// Drift the rotation example is expected to produce.
pub fn so3_g() -> CMat {
    let h = c(-0.5, 0.0);
    CMat::from_row_slice(3, 3, &[h, ZERO, -ONE, ZERO, h, ZERO, ONE, ZERO, ZERO])
}

pub fn so3() -> LindbladModel {
    LindbladModel::new(so3_h(), vec![so3_l()]).expect("valid catalog model")
}

pub fn generic_cycle_3() -> LindbladModel {
    let d = 3;
    let h = CMat::from_fn(d, d, |i, j| if i == j { c(i as f64, 0.0) } else { ZERO });
    let ls = (0..d)
        .map(|l| {
            let k = (l + 1) % d;
            let mut m = CMat::zeros(d, d);
            m[(k, l)] = ONE;
            m
        })
        .collect();
    LindbladModel::new(h, ls).expect("valid catalog model")
}
