//! Linear stochastic Schrödinger equation
//! `dX_t = G X_t dt + Σ_ℓ L_ℓ X_t dW^ℓ_t` with real independent Wiener
//! processes, and the Monte Carlo checks built on it:
//! second moments reproduce `𝒯_{*t}(|ξ⟩⟨ξ|)`, `E‖X_t‖² = ‖ξ‖²`, and the
//! second-moment matrix is positive definite exactly when `S(ξ)` is the
//! whole space.

mod chaos;
mod kernel;
pub mod noise;
mod quadrature;
mod wong_zakai;

pub use chaos::{chaos_isometry_check, ChaosOptions, ChaosReport};
pub use kernel::Scheme;
pub use quadrature::gauss_legendre_unit;
pub use wong_zakai::{
    simulate_ito_path, simulate_wong_zakai, wong_zakai_convergence, FinePath, Trajectory, WongZakaiCurve,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gksl::{evolve_state, LindbladModel, QuantumState};
use crate::matkit::{frobenius, hermitian_eigen, min_hermitian_eigenvalue, CMat, CVec};
use kernel::{Scratch, Stepper};
use noise::{coarsen, NoiseStream};

/// Trajectories per deterministic reduction chunk.
const CHUNK: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    pub t_final: f64,
    pub steps: usize,
    pub n_traj: usize,
    pub master_seed: u64,
    pub scheme: Scheme,
    /// Keep every `record_every`-th grid point in stored ensembles.
    pub record_every: usize,
}

impl TrajectoryConfig {
    pub fn new(t_final: f64, steps: usize, n_traj: usize, master_seed: u64) -> Result<Self> {
        let cfg = TrajectoryConfig {
            t_final,
            steps,
            n_traj,
            master_seed,
            scheme: Scheme::default(),
            record_every: 1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_record_every(mut self, record_every: usize) -> Self {
        self.record_every = record_every;
        self
    }

    pub fn with_t_final(mut self, t_final: f64) -> Self {
        self.t_final = t_final;
        self
    }

    pub fn with_master_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidTime(self.t_final));
        }
        if self.steps == 0 || self.n_traj == 0 {
            return Err(Error::Validation("steps and n_traj must be positive".into()));
        }
        if self.record_every == 0 || !self.steps.is_multiple_of(self.record_every) {
            return Err(Error::GridError(format!(
                "record_every = {} does not divide steps = {}",
                self.record_every, self.steps
            )));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn record_count(&self) -> usize {
        self.steps / self.record_every + 1
    }
}

/// Stored sample paths on the recorded grid.
#[derive(Debug, Clone)]
pub struct TrajectoryEnsemble {
    pub config: TrajectoryConfig,
    pub xi: CVec,
    pub times: Vec<f64>,
    data: Vec<Complex64>,
}

impl TrajectoryEnsemble {
    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn n_traj(&self) -> usize {
        self.config.n_traj
    }

    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    pub fn sample(&self, traj: usize, time_index: usize) -> &[Complex64] {
        let d = self.dim();
        let start = (traj * self.n_times() + time_index) * d;
        &self.data[start..start + d]
    }

    pub fn state(&self, traj: usize, time_index: usize) -> CVec {
        CVec::from_column_slice(self.sample(traj, time_index))
    }
}

fn check_xi(model: &LindbladModel, xi: &CVec) -> Result<()> {
    if xi.len() != model.dim() {
        return Err(Error::DimError {
            expected: model.dim(),
            found: xi.len(),
        });
    }
    if xi.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(())
}

/// Integrates one path, calling `record(k, x)` at every grid index that is
/// a multiple of `record_every` (including 0 and `steps`).
fn run_path(
    stepper: &Stepper,
    xi: &[Complex64],
    increments: &[f64],
    channels: usize,
    steps: usize,
    record_every: usize,
    mut record: impl FnMut(usize, &[Complex64]),
) {
    let d = xi.len();
    let mut x = xi.to_vec();
    let mut scratch = Scratch::new(d);
    record(0, &x);
    for k in 0..steps {
        let dw = &increments[k * channels..(k + 1) * channels];
        stepper.step(&mut x, dw, &mut scratch);
        if (k + 1) % record_every == 0 {
            record(k + 1, &x);
        }
    }
}

/// Simulates `n_traj` Itô paths and stores them on the recorded grid.
pub fn simulate_ito(
    model: &LindbladModel,
    xi: &CVec,
    config: &TrajectoryConfig,
) -> Result<TrajectoryEnsemble> {
    config.validate()?;
    check_xi(model, xi)?;
    let d = model.dim();
    let m = model.m();
    let h = config.h();
    let stepper = Stepper::new(model, config.scheme, h);
    let n_rec = config.record_count();
    let per_traj: Vec<Vec<Complex64>> = (0..config.n_traj)
        .into_par_iter()
        .map(|j| {
            let incs = NoiseStream::new(config.master_seed, j as u64).increments(config.steps, m, h);
            let mut out = Vec::with_capacity(n_rec * d);
            run_path(&stepper, xi.as_slice(), &incs, m, config.steps, config.record_every, |_, x| {
                out.extend_from_slice(x)
            });
            out
        })
        .collect();
    let times = (0..n_rec)
        .map(|r| (r * config.record_every) as f64 * h)
        .collect();
    Ok(TrajectoryEnsemble {
        config: *config,
        xi: xi.clone(),
        times,
        data: per_traj.concat(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixEstimate {
    pub value: CMat,
    /// Entrywise standard errors.
    pub std_errors: DMatrix<f64>,
    /// `sqrt(Σ_ij se_ij²)`, the expected Frobenius size of the sampling error.
    pub aggregate_std_error: f64,
    pub n: usize,
}

/// Running sums for `|X⟩⟨X|` and `‖X‖²`.
#[derive(Debug, Clone)]
struct Moments {
    d: usize,
    n: usize,
    sum: Vec<Complex64>,
    sum_abs2: Vec<f64>,
    norm2: f64,
    norm4: f64,
}

impl Moments {
    fn new(d: usize) -> Self {
        Moments {
            d,
            n: 0,
            sum: vec![Complex64::new(0.0, 0.0); d * d],
            sum_abs2: vec![0.0; d * d],
            norm2: 0.0,
            norm4: 0.0,
        }
    }

    fn add(&mut self, x: &[Complex64]) {
        let d = self.d;
        self.n += 1;
        let mut n2 = 0.0;
        for i in 0..d {
            n2 += x[i].norm_sqr();
            for j in 0..d {
                let z = x[i] * x[j].conj();
                self.sum[i * d + j] += z;
                self.sum_abs2[i * d + j] += z.norm_sqr();
            }
        }
        self.norm2 += n2;
        self.norm4 += n2 * n2;
    }

    fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_abs2.iter_mut().zip(&other.sum_abs2) {
            *a += b;
        }
        self.norm2 += other.norm2;
        self.norm4 += other.norm4;
    }

    fn se(&self, sum_sq: f64, mean_abs2: f64) -> f64 {
        let n = self.n as f64;
        if self.n < 2 {
            return 0.0;
        }
        let var = ((sum_sq / n - mean_abs2) * n / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }

    fn density(&self) -> MatrixEstimate {
        let d = self.d;
        let n = self.n as f64;
        let value = CMat::from_fn(d, d, |i, j| self.sum[i * d + j] / n);
        let std_errors = DMatrix::from_fn(d, d, |i, j| {
            self.se(self.sum_abs2[i * d + j], value[(i, j)].norm_sqr())
        });
        let aggregate_std_error = std_errors.iter().map(|s| s * s).sum::<f64>().sqrt();
        MatrixEstimate {
            value,
            std_errors,
            aggregate_std_error,
            n: self.n,
        }
    }

    fn norm(&self) -> ScalarEstimate {
        let mean = self.norm2 / self.n as f64;
        ScalarEstimate {
            value: mean,
            std_error: self.se(self.norm4, mean * mean),
            n: self.n,
        }
    }
}

fn ensemble_moments(ensemble: &TrajectoryEnsemble, time_index: usize) -> Moments {
    let mut m = Moments::new(ensemble.dim());
    for j in 0..ensemble.n_traj() {
        m.add(ensemble.sample(j, time_index));
    }
    m
}

/// Sample mean of `‖X_t‖²` at a recorded time.
pub fn mean_square_norm(ensemble: &TrajectoryEnsemble, time_index: usize) -> ScalarEstimate {
    ensemble_moments(ensemble, time_index).norm()
}

/// Sample mean of `|X_t⟩⟨X_t|` at a recorded time.
pub fn estimate_density(ensemble: &TrajectoryEnsemble, time_index: usize) -> MatrixEstimate {
    ensemble_moments(ensemble, time_index).density()
}

/// Final-time second moments without storing paths.
#[derive(Debug, Clone)]
pub struct FinalMoments {
    pub density: MatrixEstimate,
    pub norm: ScalarEstimate,
}

/// Streams `n_traj` paths and accumulates moments at `t_final`. When
/// `refine` is set, each path is also integrated on the grid twice as fine
/// driven by the same Brownian path; the second result holds those moments.
fn stream_moments(
    model: &LindbladModel,
    xi: &CVec,
    config: &TrajectoryConfig,
    refine: bool,
) -> Result<(Moments, Option<Moments>)> {
    config.validate()?;
    check_xi(model, xi)?;
    let d = model.dim();
    let m = model.m();
    let h = config.h();
    let coarse = Stepper::new(model, config.scheme, h);
    let fine = refine.then(|| Stepper::new(model, config.scheme, h / 2.0));
    let n = config.n_traj;
    let chunks: Vec<(Moments, Option<Moments>)> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = Moments::new(d);
            let mut acc_fine = refine.then(|| Moments::new(d));
            for j in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let mut stream = NoiseStream::new(config.master_seed, j as u64);
                let (incs, fine_incs) = if let Some(ref f) = fine {
                    let fi = stream.increments(2 * config.steps, m, h / 2.0);
                    let ci = coarsen(&fi, m, 2);
                    (ci, Some((f, fi)))
                } else {
                    (stream.increments(config.steps, m, h), None)
                };
                run_path(&coarse, xi.as_slice(), &incs, m, config.steps, config.steps, |k, x| {
                    if k == config.steps {
                        acc.add(x)
                    }
                });
                if let (Some((f, fi)), Some(af)) = (fine_incs, acc_fine.as_mut()) {
                    let steps = 2 * config.steps;
                    run_path(f, xi.as_slice(), &fi, m, steps, steps, |k, x| {
                        if k == steps {
                            af.add(x)
                        }
                    });
                }
            }
            (acc, acc_fine)
        })
        .collect();
    let mut total = Moments::new(d);
    let mut total_fine = refine.then(|| Moments::new(d));
    for (a, f) in &chunks {
        total.merge(a);
        if let (Some(tf), Some(f)) = (total_fine.as_mut(), f) {
            tf.merge(f);
        }
    }
    Ok((total, total_fine))
}

pub fn simulate_final_moments(
    model: &LindbladModel,
    xi: &CVec,
    config: &TrajectoryConfig,
) -> Result<FinalMoments> {
    let (m, _) = stream_moments(model, xi, config, false)?;
    Ok(FinalMoments {
        density: m.density(),
        norm: m.norm(),
    })
}

/// `‖ξ‖² · 𝒯_{*t}(|ξ⟩⟨ξ|/‖ξ‖²)` from the superoperator exponential.
pub fn exact_second_moment(model: &LindbladModel, xi: &CVec, t: f64) -> Result<CMat> {
    let rho = QuantumState::pure(xi)?;
    let out = evolve_state(model, &rho, t)?;
    Ok(out.rho().scale(xi.norm_squared()))
}

/// Monte Carlo estimate of `E|X_t⟩⟨X_t|` against exact evolution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepresentationReport {
    pub t: f64,
    pub n_traj: usize,
    pub steps: usize,
    /// `‖estimate − exact‖_F` at the requested step size.
    pub distance: f64,
    pub aggregate_std_error: f64,
    /// `C·h` with `C` calibrated from the same paths at step `h/2`.
    pub bias_budget: f64,
    pub threshold: f64,
    pub pass: bool,
}

pub fn verify_representation(
    model: &LindbladModel,
    xi: &CVec,
    t: f64,
    config: &TrajectoryConfig,
) -> Result<RepresentationReport> {
    let cfg = config.with_t_final(t);
    let exact = exact_second_moment(model, xi, t)?;
    let (coarse, fine) = stream_moments(model, xi, &cfg, true)?;
    let est = coarse.density();
    let est_fine = fine
        .ok_or_else(|| Error::Internal("refined moments missing".into()))?
        .density();
    let distance = frobenius(&(&est.value - &exact));
    // bias(h) ≈ C h and bias(h/2) ≈ C h / 2, so C h ≈ 2 (ρ_h − ρ_{h/2}).
    let bias_budget = 2.0 * frobenius(&(&est.value - &est_fine.value));
    let threshold = 5.0 * est.aggregate_std_error + bias_budget;
    Ok(RepresentationReport {
        t,
        n_traj: cfg.n_traj,
        steps: cfg.steps,
        distance,
        aggregate_std_error: est.aggregate_std_error,
        bias_budget,
        threshold,
        pass: distance <= threshold,
    })
}

/// Frobenius distance between the Monte Carlo second moment and exact
/// evolution, without bias calibration.
pub fn density_distance(
    model: &LindbladModel,
    xi: &CVec,
    config: &TrajectoryConfig,
) -> Result<(f64, f64)> {
    let exact = exact_second_moment(model, xi, config.t_final)?;
    let moments = simulate_final_moments(model, xi, config)?;
    Ok((
        frobenius(&(&moments.density.value - &exact)),
        moments.density.aggregate_std_error,
    ))
}

/// Decision constant: the second moment is positive definite when its
/// smallest eigenvalue exceeds this many standard errors.
pub const TOTALITY_SIGMAS: f64 = 3.0;

/// Eigenvalues below this fraction of `tr E[X_t X_t*]` are roundoff.
pub const TOTALITY_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TotalityReport {
    pub min_eigenvalue: f64,
    /// Standard error of `|⟨v, X_t⟩|²` averaged over paths, `v` the sampled
    /// bottom eigenvector; first-order error of `min_eigenvalue`.
    pub eigen_std_error: f64,
    /// Frobenius norm of the entrywise standard errors of the whole matrix.
    pub aggregate_std_error: f64,
    pub total: bool,
    /// `min_eigenvalue > 3 · aggregate_std_error`, kept for comparison; far
    /// more conservative than `total` because it charges every entry's noise
    /// to one eigenvalue.
    pub total_by_aggregate: bool,
    /// Smallest eigenvalue of the exactly evolved second moment.
    pub exact_reference: f64,
}

/// Whether the essential range of `X_t(ξ)` spans `C^d`, decided from the
/// smallest eigenvalue of the sampled `E[X_t X_t*]`.
///
/// `total` requires `λ_min > 3·se_v` and `λ_min > 1e-10·tr`, where `se_v`
/// is the sample standard error of `|⟨v, X_t⟩|²` along the sampled bottom
/// eigenvector `v`.
pub fn totality_test(
    model: &LindbladModel,
    xi: &CVec,
    t: f64,
    config: &TrajectoryConfig,
) -> Result<TotalityReport> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::InvalidTime(t));
    }
    let cfg = config.with_t_final(t).with_record_every(config.steps);
    let ens = simulate_ito(model, xi, &cfg)?;
    let last = ens.n_times() - 1;
    let density = estimate_density(&ens, last);
    let (values, vectors) = hermitian_eigen(&density.value);
    let lmin = values[0];
    let v = &vectors[0];
    let n = ens.n_traj();
    let (mut s1, mut s2) = (0.0, 0.0);
    for j in 0..n {
        let y = v.dotc(&ens.state(j, last)).norm_sqr();
        s1 += y;
        s2 += y * y;
    }
    let nf = n as f64;
    let eigen_std_error = if n > 1 {
        let mean = s1 / nf;
        (((s2 / nf - mean * mean) * nf / (nf - 1.0)).max(0.0) / nf).sqrt()
    } else {
        0.0
    };
    let trace: f64 = values.iter().sum();
    let exact = exact_second_moment(model, xi, t)?;
    let se = density.aggregate_std_error;
    Ok(TotalityReport {
        min_eigenvalue: lmin,
        eigen_std_error,
        aggregate_std_error: se,
        total: lmin > TOTALITY_SIGMAS * eigen_std_error && lmin > TOTALITY_FLOOR * trace,
        total_by_aggregate: lmin > TOTALITY_SIGMAS * se,
        exact_reference: min_hermitian_eigenvalue(&exact),
    })
}

/// Largest `|‖X_t‖² − ‖ξ‖²|` over all stored paths and times. Only
/// meaningful when every `L_ℓ` is anti-selfadjoint, where the exact
/// solution keeps its norm.
pub fn pathwise_norm_drift(model: &LindbladModel, ensemble: &TrajectoryEnsemble) -> Result<f64> {
    let worst = model
        .ls()
        .iter()
        .map(|l| frobenius(&(l + l.adjoint())) / frobenius(l).max(1.0))
        .fold(0.0, f64::max);
    if worst > 1e-10 {
        return Err(Error::NotAntiSelfAdjoint(worst));
    }
    let target = ensemble.xi.norm_squared();
    let mut drift: f64 = 0.0;
    for j in 0..ensemble.n_traj() {
        for r in 0..ensemble.n_times() {
            let n2: f64 = ensemble.sample(j, r).iter().map(|z| z.norm_sqr()).sum();
            drift = drift.max((n2 - target).abs());
        }
    }
    Ok(drift)
}
