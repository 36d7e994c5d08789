//! Piecewise-polygonal (Wong–Zakai) approximation.
//!
//! On each polygon interval of length `1/n` the noise is replaced by its
//! linear interpolant with slope `u_ℓ = n ΔW^ℓ`, and the resulting linear ODE
//! `x' = (G̃ + Σ_ℓ u_ℓ L_ℓ) x` is solved exactly by a matrix exponential.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernel::{Scheme, Scratch, Stepper};
use super::noise::{coarsen, NoiseStream};
use crate::error::{Error, Result};
use crate::gksl::{stratonovich_drift, LindbladModel};
use crate::matkit::{matrix_exp, CVec};

/// Wiener increments on a uniform fine grid starting at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinePath {
    pub h: f64,
    pub steps: usize,
    pub channels: usize,
    /// Step-major, `steps × channels`.
    pub increments: Vec<f64>,
}

impl FinePath {
    pub fn new(h: f64, channels: usize, increments: Vec<f64>) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::GridError(format!("fine step {h} is not positive")));
        }
        let steps = if channels == 0 {
            return Err(Error::GridError(
                "a path with zero channels needs an explicit step count".into(),
            ));
        } else if !increments.len().is_multiple_of(channels) {
            return Err(Error::GridError(format!(
                "{} increments do not split into {channels} channels",
                increments.len()
            )));
        } else {
            increments.len() / channels
        };
        Ok(FinePath {
            h,
            steps,
            channels,
            increments,
        })
    }

    /// Deterministic path (no channels) with `steps` grid intervals.
    pub fn silent(h: f64, steps: usize) -> Self {
        FinePath {
            h,
            steps,
            channels: 0,
            increments: Vec::new(),
        }
    }

    /// Seeded path from the same streams the Itô simulator uses.
    pub fn sample(master_seed: u64, path: u64, h: f64, steps: usize, channels: usize) -> Self {
        let increments = NoiseStream::new(master_seed, path).increments(steps, channels, h);
        FinePath {
            h,
            steps,
            channels,
            increments,
        }
    }

    pub fn t_final(&self) -> f64 {
        self.h * self.steps as f64
    }

    /// `W_{t_k}` for every grid index, channel-minor.
    pub fn cumulative(&self) -> Vec<f64> {
        let m = self.channels;
        let mut out = vec![0.0; (self.steps + 1) * m];
        for k in 0..self.steps {
            for l in 0..m {
                out[(k + 1) * m + l] = out[k * m + l] + self.increments[k * m + l];
            }
        }
        out
    }
}

/// States on the fine grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CVec>,
}

impl Trajectory {
    /// `max_k ‖x_k − y_k‖` over a shared grid.
    pub fn sup_distance(&self, other: &Trajectory) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Number of fine steps per polygon interval for resolution `n`.
fn fine_per_interval(path: &FinePath, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::GridError("resolution must be at least 1".into()));
    }
    let intervals_f = n as f64 * path.t_final();
    let intervals = intervals_f.round() as usize;
    if intervals == 0 || (intervals_f - intervals as f64).abs() > 1e-9 * intervals_f.max(1.0) {
        return Err(Error::GridError(format!(
            "resolution {n} does not tile [0, {}]",
            path.t_final()
        )));
    }
    if !path.steps.is_multiple_of(intervals) {
        return Err(Error::GridError(format!(
            "{} polygon intervals do not divide {} fine steps",
            intervals, path.steps
        )));
    }
    Ok(path.steps / intervals)
}

/// Polygonal solution at resolution `n` (intervals of length `1/n`),
/// sampled on the fine grid of `path`.
pub fn simulate_wong_zakai(
    model: &LindbladModel,
    xi: &CVec,
    path: &FinePath,
    n: usize,
) -> Result<Trajectory> {
    if xi.len() != model.dim() {
        return Err(Error::DimError {
            expected: model.dim(),
            found: xi.len(),
        });
    }
    if xi.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    if path.channels != model.m() && !(model.m() == 0 && path.channels == 0) {
        return Err(Error::GridError(format!(
            "path has {} channels, model has {} noise operators",
            path.channels,
            model.m()
        )));
    }
    let per = fine_per_interval(path, n)?;
    let m = model.m();
    let gt = stratonovich_drift(model);
    let coarse = if m > 0 {
        coarsen(&path.increments, m, per)
    } else {
        Vec::new()
    };
    let intervals = path.steps / per;
    let interval_len = per as f64 * path.h;
    let mut times = Vec::with_capacity(path.steps + 1);
    let mut states = Vec::with_capacity(path.steps + 1);
    let mut x = xi.clone();
    times.push(0.0);
    states.push(x.clone());
    for j in 0..intervals {
        let mut a = gt.clone();
        for (l, op) in model.ls().iter().enumerate() {
            let slope = coarse[j * m + l] / interval_len;
            a += op.scale(slope);
        }
        let step = matrix_exp(&a, path.h);
        for i in 0..per {
            x = &step * &x;
            times.push((j * per + i + 1) as f64 * path.h);
            states.push(x.clone());
        }
    }
    Ok(Trajectory { times, states })
}

/// Itô solution on the fine grid of `path` with the given scheme.
pub fn simulate_ito_path(
    model: &LindbladModel,
    xi: &CVec,
    path: &FinePath,
    scheme: Scheme,
) -> Result<Trajectory> {
    if xi.len() != model.dim() {
        return Err(Error::DimError {
            expected: model.dim(),
            found: xi.len(),
        });
    }
    let stepper = Stepper::new(model, scheme, path.h);
    let mut scratch = Scratch::new(model.dim());
    let mut x: Vec<Complex64> = xi.iter().copied().collect();
    let m = model.m();
    let mut times = vec![0.0];
    let mut states = vec![xi.clone()];
    let none = vec![0.0; m];
    for k in 0..path.steps {
        let dw = if m == 0 {
            &none[..]
        } else {
            &path.increments[k * m..(k + 1) * m]
        };
        stepper.step(&mut x, dw, &mut scratch);
        times.push((k + 1) as f64 * path.h);
        states.push(CVec::from_column_slice(&x));
    }
    Ok(Trajectory { times, states })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WongZakaiCurve {
    pub t: f64,
    pub fine_steps: usize,
    pub n_paths: usize,
    pub resolutions: Vec<usize>,
    /// Median over paths of the sup-norm error at each resolution.
    pub median_errors: Vec<f64>,
    pub strictly_decreasing: bool,
}

/// Median sup-norm distance between polygonal solutions and a fine-grid
/// Milstein reference driven by the same Brownian path.
pub fn wong_zakai_convergence(
    model: &LindbladModel,
    xi: &CVec,
    t: f64,
    resolutions: &[usize],
    n_paths: usize,
    fine_steps: usize,
    master_seed: u64,
) -> Result<WongZakaiCurve> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::InvalidTime(t));
    }
    if resolutions.is_empty() || resolutions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("resolutions must be strictly increasing".into()));
    }
    if n_paths == 0 || fine_steps == 0 {
        return Err(Error::Validation("n_paths and fine_steps must be positive".into()));
    }
    let h = t / fine_steps as f64;
    let mut errors = vec![Vec::with_capacity(n_paths); resolutions.len()];
    for p in 0..n_paths {
        let path = if model.m() == 0 {
            FinePath::silent(h, fine_steps)
        } else {
            FinePath::sample(master_seed, p as u64, h, fine_steps, model.m())
        };
        // Exponential Euler is exact without noise.
        let scheme = if model.m() == 0 {
            Scheme::ExponentialEuler
        } else {
            Scheme::Milstein
        };
        let reference = simulate_ito_path(model, xi, &path, scheme)?;
        for (r, &n) in resolutions.iter().enumerate() {
            let wz = simulate_wong_zakai(model, xi, &path, n)?;
            errors[r].push(wz.sup_distance(&reference));
        }
    }
    let median_errors: Vec<f64> = errors.into_iter().map(median).collect();
    let strictly_decreasing = median_errors.windows(2).all(|w| w[1] < w[0]);
    Ok(WongZakaiCurve {
        t,
        fine_steps,
        n_paths,
        resolutions: resolutions.to_vec(),
        median_errors,
        strictly_decreasing,
    })
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
