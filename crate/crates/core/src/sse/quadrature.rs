//! Gauss–Legendre rules and simplex quadrature.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `n`-point Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map from [-1, 1] to [0, 1].
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor Gauss–Legendre over the ordered simplex
/// `0 ≤ s_k ≤ … ≤ s_1 ≤ t` via `s_1 = t u_1`, `s_i = s_{i-1} u_i`, whose
/// Jacobian is `t · s_1 ⋯ s_{k-1}`.
pub(crate) fn simplex_gauss<F: FnMut(&[f64]) -> f64>(k: usize, t: f64, nodes: usize, mut f: F) -> f64 {
    let (x, w) = gauss_legendre_unit(nodes);
    let mut idx = vec![0usize; k];
    let mut s = vec![0.0; k];
    let mut total = 0.0;
    loop {
        let mut weight = t;
        let mut prev = t;
        for i in 0..k {
            s[i] = prev * x[idx[i]];
            weight *= w[idx[i]];
            if i + 1 < k {
                weight *= s[i];
            }
            prev = s[i];
        }
        total += weight * f(&s);
        // Odometer increment.
        let mut pos = 0;
        loop {
            if pos == k {
                return total;
            }
            idx[pos] += 1;
            if idx[pos] < nodes {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Monte Carlo over the same simplex: returns `(estimate, std_error)`.
pub(crate) fn simplex_monte_carlo<F: FnMut(&[f64]) -> f64>(
    k: usize,
    t: f64,
    samples: usize,
    rng: &mut ChaCha8Rng,
    mut f: F,
) -> (f64, f64) {
    let volume = t.powi(k as i32) / (1..=k).map(|i| i as f64).product::<f64>();
    let mut s = vec![0.0; k];
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..samples {
        for v in s.iter_mut() {
            *v = t * rng.random::<f64>();
        }
        s.sort_by(|a, b| b.total_cmp(a));
        let y = f(&s);
        sum += y;
        sum2 += y * y;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = if samples > 1 {
        ((sum2 / n - mean * mean) * n / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    (volume * mean, volume * (var / n).sqrt())
}
