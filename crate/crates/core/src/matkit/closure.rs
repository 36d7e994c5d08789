use super::{
    commutator, ensure_square, identity, unvectorize, vectorize, CMat, CVec, Field, SubspaceBasis,
    Tolerance,
};
use crate::error::{Error, Result};

fn common_dim(mats: &[CMat]) -> Option<usize> {
    mats.first().map(|m| m.nrows())
}

fn check_family(mats: &[CMat], d: usize) -> Result<()> {
    for m in mats {
        ensure_square(m, d)?;
    }
    Ok(())
}

/// Smallest subspace containing `seeds` and invariant under every operator.
///
/// Each sweep applies all operators to the vectors added in the previous
/// sweep; the dimension grows strictly until it stabilizes, so at most
/// `d + 1` sweeps are needed.
pub fn invariant_closure(
    seeds: &[CVec],
    operators: &[CMat],
    tol: &Tolerance,
) -> Result<SubspaceBasis> {
    let Some(first) = seeds.first() else {
        return Err(Error::EmptyInput("seed list"));
    };
    let d = first.len();
    check_family(operators, d)?;
    let mut basis = SubspaceBasis::spanned_by(d, Field::Complex, *tol, seeds)?;
    let mut frontier: Vec<CVec> = basis.vectors().to_vec();
    let cap = d + 1;
    for _ in 0..cap {
        if frontier.is_empty() || basis.is_full() {
            return Ok(basis);
        }
        let start = basis.count();
        for v in &frontier {
            for a in operators {
                basis.push(&(a * v))?;
            }
        }
        frontier = basis.vectors()[start..].to_vec();
    }
    if frontier.is_empty() || basis.is_full() {
        Ok(basis)
    } else {
        Err(Error::ClosureDiverged(cap))
    }
}

/// Hilbert–Schmidt orthonormal basis (as vectorized matrices) of the
/// associative algebra generated by `generators`, unital when
/// `include_identity` is set.
pub fn operator_algebra_closure(
    generators: &[CMat],
    include_identity: bool,
    tol: &Tolerance,
    dim: usize,
) -> Result<SubspaceBasis> {
    let d = common_dim(generators).unwrap_or(dim);
    if d != dim {
        return Err(Error::DimError {
            expected: dim,
            found: d,
        });
    }
    check_family(generators, d)?;
    let mut basis = SubspaceBasis::empty(d * d, Field::Complex, *tol);
    if include_identity {
        basis.push(&vectorize(&identity(d)))?;
    }
    for g in generators {
        basis.push(&vectorize(g))?;
    }
    // Left multiplication by generators of the span of all words of length
    // ≤ n yields the words of length ≤ n + 1.
    let mut frontier: Vec<CVec> = basis.vectors().to_vec();
    let cap = d * d + 1;
    for _ in 0..cap {
        if frontier.is_empty() || basis.is_full() {
            return Ok(basis);
        }
        let start = basis.count();
        for v in &frontier {
            let b = unvectorize(v, d);
            for g in generators {
                basis.push(&vectorize(&(g * &b)))?;
            }
        }
        frontier = basis.vectors()[start..].to_vec();
    }
    if frontier.is_empty() || basis.is_full() {
        Ok(basis)
    } else {
        Err(Error::ClosureDiverged(cap))
    }
}

/// Real Lie algebra generated by `generators` under `[A, B] = AB − BA`,
/// returned as a real span of vectorized matrices.
pub fn lie_closure(generators: &[CMat], tol: &Tolerance, dim: usize) -> Result<SubspaceBasis> {
    let d = common_dim(generators).unwrap_or(dim);
    if d != dim {
        return Err(Error::DimError {
            expected: dim,
            found: d,
        });
    }
    check_family(generators, d)?;
    let mut basis = SubspaceBasis::empty(d * d, Field::Real, *tol);
    for g in generators {
        basis.push(&vectorize(g))?;
    }
    let mut frontier: Vec<CMat> = basis.vectors().iter().map(|v| unvectorize(v, d)).collect();
    let cap = 2 * d * d + 1;
    for _ in 0..cap {
        if frontier.is_empty() || basis.is_full() {
            return Ok(basis);
        }
        let start = basis.count();
        let all: Vec<CMat> = basis.vectors().iter().map(|v| unvectorize(v, d)).collect();
        for a in &frontier {
            for b in &all {
                basis.push(&vectorize(&commutator(a, b)))?;
            }
        }
        frontier = basis.vectors()[start..]
            .iter()
            .map(|v| unvectorize(v, d))
            .collect();
    }
    if frontier.is_empty() || basis.is_full() {
        Ok(basis)
    } else {
        Err(Error::ClosureDiverged(cap))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::{basis_vector, c, pauli, ONE, ZERO};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn shift3() -> CMat {
        CMat::from_fn(3, 3, |i, j| if i == (j + 1) % 3 { ONE } else { ZERO })
    }

    #[test]
    fn closure_of_zero_operator_is_seed_line() {
        let b = invariant_closure(&[basis_vector(3, 0)], &[CMat::zeros(3, 3)], &tol()).unwrap();
        assert_eq!(b.count(), 1);
    }

    #[test]
    fn shift_orbit_fills_space() {
        let b = invariant_closure(&[basis_vector(3, 0)], &[shift3()], &tol()).unwrap();
        assert_eq!(b.count(), 3);
    }

    #[test]
    fn empty_seed_rejected() {
        assert_eq!(
            invariant_closure(&[], &[shift3()], &tol()).unwrap_err(),
            Error::EmptyInput("seed list")
        );
    }

    #[test]
    fn algebra_dimensions() {
        let [s1, _, s3] = pauli();
        assert_eq!(operator_algebra_closure(&[], true, &tol(), 2).unwrap().count(), 1);
        assert_eq!(
            operator_algebra_closure(&[s1, s3], true, &tol(), 2).unwrap().count(),
            4
        );
        let diag = CMat::from_diagonal(&CVec::from_vec(vec![ONE, c(2.0, 0.0)]));
        assert_eq!(
            operator_algebra_closure(&[diag], true, &tol(), 2).unwrap().count(),
            2
        );
    }

    #[test]
    fn lie_closure_small_cases() {
        let a = CMat::from_fn(3, 3, |i, j| c(i as f64 - j as f64, (i * j) as f64));
        assert_eq!(lie_closure(&[a], &tol(), 3).unwrap().count(), 1);
        let d1 = CMat::from_diagonal(&CVec::from_vec(vec![ONE, c(2.0, 0.0)]));
        let d2 = CMat::from_diagonal(&CVec::from_vec(vec![c(0.0, 1.0), c(-3.0, 0.0)]));
        assert!(lie_closure(&[d1, d2], &tol(), 2).unwrap().count() <= 2);
        // su(2): iσ_k span a 3-dimensional real algebra.
        let gens: Vec<CMat> = pauli().iter().take(2).map(|s| s * c(0.0, 1.0)).collect();
        assert_eq!(lie_closure(&gens, &tol(), 2).unwrap().count(), 3);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = operator_algebra_closure(&[identity(2), identity(3)], true, &tol(), 2).unwrap_err();
        assert!(matches!(err, Error::DimError { .. }));
    }
}
