use super::{identity, CMat};

// Degree-13 Padé coefficients and the matching scaling threshold.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn norm1(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `e^{tA}` by scaling and squaring with a [13/13] Padé approximant.
pub fn matrix_exp(a: &CMat, t: f64) -> CMat {
    assert!(a.is_square(), "matrix_exp needs a square matrix");
    assert!(t.is_finite(), "matrix_exp needs a finite time");
    let d = a.nrows();
    if d == 0 {
        return a.clone();
    }
    let mut x = a.scale(t);
    let n1 = norm1(&x);
    let s = if n1 > THETA13 {
        (n1 / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    if s > 0 {
        x.unscale_mut(2f64.powi(s));
    }
    let b = &PADE13;
    let id = identity(d);
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;
    let u_inner = &x6 * (x6.scale(b[13]) + x4.scale(b[11]) + x2.scale(b[9]))
        + x6.scale(b[7])
        + x4.scale(b[5])
        + x2.scale(b[3])
        + id.scale(b[1]);
    let u = &x * u_inner;
    let v = &x6 * (x6.scale(b[12]) + x4.scale(b[10]) + x2.scale(b[8]))
        + x6.scale(b[6])
        + x4.scale(b[4])
        + x2.scale(b[2])
        + id.scale(b[0]);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular for scaled arguments");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::{c, frobenius, CVec, ONE, ZERO};

    fn taylor(a: &CMat, t: f64, terms: usize) -> CMat {
        let d = a.nrows();
        let x = a.scale(t);
        let mut term = identity(d);
        let mut sum = identity(d);
        for k in 1..terms {
            term = &term * &x / c(k as f64, 0.0);
            sum += &term;
        }
        sum
    }

    fn so3_drift() -> CMat {
        let h = c(-0.5, 0.0);
        CMat::from_row_slice(
            3,
            3,
            &[h, ZERO, -ONE, ZERO, h, ZERO, ONE, ZERO, ZERO],
        )
    }

    #[test]
    fn zero_generator_gives_identity() {
        for t in [0.0, 1.0, -3.5] {
            assert_eq!(matrix_exp(&CMat::zeros(3, 3), t), identity(3));
        }
    }

    #[test]
    fn diagonal_case() {
        let a = CMat::from_diagonal(&CVec::from_vec(vec![c(-0.5, 0.0), c(-0.5, 0.0)]));
        let e = matrix_exp(&a, 2.0);
        let want = (-1.0f64).exp();
        assert!((e[(0, 0)].re - want).abs() < 1e-15);
        assert!((e[(1, 1)].re - want).abs() < 1e-15);
        assert!(e[(0, 1)].norm() < 1e-16);
    }

    #[test]
    fn matches_taylor_oracle_on_so3_drift() {
        let g = so3_drift();
        let e = matrix_exp(&g, 1.0);
        let oracle = taylor(&g, 1.0, 100);
        assert!(frobenius(&(&e - &oracle)) <= 1e-10, "{}", frobenius(&(&e - &oracle)));
        assert!(frobenius(&(&e - &oracle)) / frobenius(&oracle) <= 1e-12);
    }

    #[test]
    fn large_norm_uses_squaring() {
        // exp of a rotation generator with angle 40: exact cos/sin.
        let a = CMat::from_row_slice(2, 2, &[ZERO, c(-40.0, 0.0), c(40.0, 0.0), ZERO]);
        let e = matrix_exp(&a, 1.0);
        assert!((e[(0, 0)].re - 40f64.cos()).abs() < 1e-11);
        assert!((e[(1, 0)].re - 40f64.sin()).abs() < 1e-11);
    }
}
