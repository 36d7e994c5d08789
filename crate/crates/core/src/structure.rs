//! Structural analysis of a GKSL model: commutator spans `S(ξ)`,
//! irreducibility, support projections, invariant states, fixed points,
//! decoherence-free triviality and the Lie-algebra rank condition.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fleet::random_unit_vector;
use crate::gksl::{drift, evolve_state, stratonovich_drift, superoperator, LindbladModel, Mode, QuantumState};
use crate::matkit::{
    basis_vector, commutator, eigenvectors, hermitian_part, identity, invariant_closure,
    kernel_basis, kron, lie_closure, matrix_exp, min_hermitian_eigenvalue, numeric_rank,
    operator_algebra_closure, trace, unvectorize, vectorize, CMat, CVec, Field, SubspaceBasis,
    Tolerance,
};
use crate::sse::{totality_test, TotalityReport, TrajectoryConfig};

/// Minimum eigenvalue above which an invariant state counts as faithful.
pub const FAITHFUL_TOL: f64 = 1e-10;

/// `[δ_G^0(L), …, δ_G^{n_max}(L)]` with `δ_G(A) = [G, A]`.
pub fn delta_powers(g: &CMat, l: &CMat, n_max: usize) -> Result<Vec<CMat>> {
    crate::matkit::ensure_square(l, g.nrows())?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(l.clone());
    for n in 0..n_max {
        let next = commutator(g, &out[n]);
        out.push(next);
    }
    Ok(out)
}

/// Matrix of `ad_A = [A, ·]` on column-stacked operators.
fn ad_superop(a: &CMat) -> CMat {
    let d = a.nrows();
    let id = identity(d);
    kron(&id, a) - kron(&a.transpose(), &id)
}

/// Orthonormal basis (in operator form) of `span{δ_G^n(L_ℓ) : n ≥ 0, ℓ}`.
///
/// The span is the `ad_G`-invariant closure of the `L_ℓ` in the
/// `d²`-dimensional operator space, so powers beyond `d² − 1` add nothing.
pub fn delta_span(model: &LindbladModel, tol: &Tolerance) -> Result<Vec<CMat>> {
    if model.m() == 0 {
        return Ok(Vec::new());
    }
    let d = model.dim();
    let seeds: Vec<CVec> = model.ls().iter().map(vectorize).collect();
    let basis = invariant_closure(&seeds, &[ad_superop(&drift(model))], tol)?;
    Ok(basis.vectors().iter().map(|v| unvectorize(v, d)).collect())
}

#[derive(Debug, Clone)]
pub struct SxiResult {
    /// `ξ / ‖ξ‖`.
    pub xi: CVec,
    pub basis: SubspaceBasis,
    pub dim: usize,
    /// Highest `δ_G` power that can contribute, `d² − 1`.
    pub delta_powers_used: usize,
}

fn unit(xi: &CVec) -> Result<CVec> {
    let n = xi.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(xi.unscale(n))
}

/// `S(ξ)` given a precomputed [`delta_span`].
pub fn s_xi_span_with(delta: &[CMat], xi: &CVec, tol: &Tolerance) -> Result<SxiResult> {
    let xi = unit(xi)?;
    let d = xi.len();
    let basis = invariant_closure(std::slice::from_ref(&xi), delta, tol)?;
    Ok(SxiResult {
        dim: basis.count(),
        xi,
        basis,
        delta_powers_used: (d * d).saturating_sub(1),
    })
}

/// Span of all `δ_G^{n_1}(L_{ℓ_1}) ⋯ δ_G^{n_k}(L_{ℓ_k}) ξ`, `k ≥ 0`.
pub fn s_xi_span(model: &LindbladModel, xi: &CVec, tol: &Tolerance) -> Result<SxiResult> {
    if xi.len() != model.dim() {
        return Err(Error::DimError {
            expected: model.dim(),
            found: xi.len(),
        });
    }
    s_xi_span_with(&delta_span(model, tol)?, xi, tol)
}

/// Canonical vectors, eigenvectors of `G` and of each `L_ℓ`, then `k_random`
/// Haar-random unit vectors. Every proper common invariant subspace of
/// `{G, L_ℓ}` contains an eigenvector of `G`, so this set detects
/// reducibility that random vectors alone almost surely miss.
pub fn probe_vectors(model: &LindbladModel, k_random: usize, seed: u64) -> Vec<CVec> {
    structural_probes(&drift(model), model.ls(), k_random, seed)
}

fn structural_probes(g: &CMat, ls: &[CMat], k_random: usize, seed: u64) -> Vec<CVec> {
    let d = g.nrows();
    let mut out: Vec<CVec> = (0..d).map(|k| basis_vector(d, k)).collect();
    out.extend(eigenvectors(g));
    for l in ls {
        out.extend(eigenvectors(l));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    out.extend((0..k_random).map(|_| random_unit_vector(&mut rng, d)));
    out
}

/// Verdict of the `S(ξ)` route over a probe set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SxiSweep {
    pub probes: usize,
    pub min_dim: usize,
    pub all_full: bool,
    /// First probe with a deficient span.
    pub deficient_at: Option<Vec<Complex64>>,
}

pub fn sxi_sweep(model: &LindbladModel, probes: &[CVec], tol: &Tolerance) -> Result<SxiSweep> {
    let delta = delta_span(model, tol)?;
    let d = model.dim();
    let mut min_dim = d;
    let mut deficient_at = None;
    for p in probes {
        let s = s_xi_span_with(&delta, p, tol)?;
        if s.dim < min_dim {
            min_dim = s.dim;
        }
        if s.dim < d && deficient_at.is_none() {
            deficient_at = Some(s.xi.iter().copied().collect());
        }
    }
    Ok(SxiSweep {
        probes: probes.len(),
        min_dim,
        all_full: min_dim == d,
        deficient_at,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IrreducibilityMethod {
    AlgebraGL,
    AlgebraDelta,
    MonteCarloTotality,
}

/// Nontrivial subspace `V` with `A V ⊆ V` for a family of operators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantSubspace {
    /// Orthonormal basis of `V`.
    pub basis: Vec<Vec<Complex64>>,
    /// `max_A ‖(1 − P_V) A P_V‖_F / max(‖A‖_F, 1)`.
    pub residual: f64,
}

impl InvariantSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn vectors(&self) -> Vec<CVec> {
        self.basis.iter().map(|v| CVec::from_vec(v.clone())).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IrreducibilityVerdict {
    pub irreducible: bool,
    pub method: IrreducibilityMethod,
    /// Dimension of the generated unital algebra (algebra routes).
    pub closure_dim: Option<usize>,
    pub witness: Option<InvariantSubspace>,
    /// Per-probe totality results (Monte Carlo route).
    pub totality: Vec<TotalityReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrreducibilityOptions {
    pub tol: Tolerance,
    /// Random probes added to the structural ones in the Monte Carlo route.
    pub mc_random_probes: usize,
    pub mc_config: TrajectoryConfig,
    pub seed: u64,
}

impl Default for IrreducibilityOptions {
    fn default() -> Self {
        IrreducibilityOptions {
            tol: Tolerance::default(),
            mc_random_probes: 2,
            mc_config: TrajectoryConfig {
                t_final: 2.0,
                steps: 200,
                n_traj: 4000,
                master_seed: 0x7a11,
                scheme: crate::sse::Scheme::ExponentialEuler,
                record_every: 1,
            },
            seed: 0x9e3779b9,
        }
    }
}

/// Unital algebra closure with the borderline-rank check.
fn algebra_dim(gens: &[CMat], d: usize, tol: &Tolerance) -> Result<usize> {
    let basis = operator_algebra_closure(gens, true, tol, d)?;
    let dim = basis.count();
    let full = d * d;
    if dim + 1 >= full {
        let (min_acc, max_rej) = basis.margins();
        let rel = tol.rel_rank_tol;
        if min_acc < 100.0 * rel || max_rej > rel / 100.0 {
            return Err(Error::ToleranceAmbiguity(format!(
                "algebra dimension {dim} of {full}; smallest accepted residual {min_acc:.3e}, \
                 largest rejected {max_rej:.3e} at tolerance {rel:.1e}"
            )));
        }
    }
    Ok(dim)
}

pub fn is_irreducible(
    model: &LindbladModel,
    method: IrreducibilityMethod,
    options: &IrreducibilityOptions,
) -> Result<IrreducibilityVerdict> {
    let d = model.dim();
    let tol = &options.tol;
    match method {
        IrreducibilityMethod::AlgebraGL | IrreducibilityMethod::AlgebraDelta => {
            let gens = if method == IrreducibilityMethod::AlgebraGL {
                let mut g = vec![drift(model)];
                g.extend(model.ls().iter().cloned());
                g
            } else {
                delta_span(model, tol)?
            };
            let dim = algebra_dim(&gens, d, tol)?;
            let irreducible = dim == d * d;
            let witness = if irreducible {
                None
            } else {
                common_invariant_subspace(&gens, d, tol, options.seed)?
            };
            Ok(IrreducibilityVerdict {
                irreducible,
                method,
                closure_dim: Some(dim),
                witness,
                totality: Vec::new(),
            })
        }
        IrreducibilityMethod::MonteCarloTotality => {
            let probes = probe_vectors(model, options.mc_random_probes, options.seed);
            let mut reports = Vec::with_capacity(probes.len());
            let mut irreducible = true;
            for p in &probes {
                let r = totality_test(model, p, options.mc_config.t_final, &options.mc_config)?;
                irreducible &= r.total;
                reports.push(r);
                if !irreducible {
                    break;
                }
            }
            Ok(IrreducibilityVerdict {
                irreducible,
                method,
                closure_dim: None,
                witness: None,
                totality: reports,
            })
        }
    }
}

/// Both algebra routes, which must agree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraConsensus {
    pub gl: IrreducibilityVerdict,
    pub delta: IrreducibilityVerdict,
}

impl AlgebraConsensus {
    pub fn irreducible(&self) -> bool {
        self.gl.irreducible
    }
}

pub fn algebra_consensus(
    model: &LindbladModel,
    options: &IrreducibilityOptions,
) -> Result<AlgebraConsensus> {
    let gl = is_irreducible(model, IrreducibilityMethod::AlgebraGL, options)?;
    let delta = is_irreducible(model, IrreducibilityMethod::AlgebraDelta, options)?;
    if gl.irreducible != delta.irreducible {
        return Err(Error::Inconsistent(format!(
            "algebra of {{G, L}} has dim {:?} but algebra of the δ-span has dim {:?}",
            gl.closure_dim, delta.closure_dim
        )));
    }
    Ok(AlgebraConsensus { gl, delta })
}

fn invariance_residual(ops: &[CMat], basis: &SubspaceBasis) -> f64 {
    let q = basis.matrix();
    let p = &q * q.adjoint();
    let d = p.nrows();
    let comp = identity(d) - p;
    ops.iter()
        .map(|a| {
            let r = &comp * a * &q;
            crate::matkit::frobenius(&r) / crate::matkit::frobenius(a).max(1.0)
        })
        .fold(0.0, f64::max)
}

fn to_witness(ops: &[CMat], basis: &SubspaceBasis) -> InvariantSubspace {
    InvariantSubspace {
        basis: basis
            .vectors()
            .iter()
            .map(|v| v.iter().copied().collect())
            .collect(),
        residual: invariance_residual(ops, basis),
    }
}

/// Smallest proper closure among the candidate seeds, if any.
fn best_closure(
    seeds: &[CVec],
    ops: &[CMat],
    tol: &Tolerance,
    d: usize,
) -> Result<Option<SubspaceBasis>> {
    let mut best: Option<SubspaceBasis> = None;
    for s in seeds {
        if s.norm() <= tol.abs_floor {
            continue;
        }
        let c = invariant_closure(std::slice::from_ref(s), ops, tol)?;
        if c.count() < d && best.as_ref().is_none_or(|b| c.count() < b.count()) {
            best = Some(c);
            if best.as_ref().is_some_and(|b| b.count() == 1) {
                break;
            }
        }
    }
    Ok(best)
}

fn random_algebra_element(ops: &[CMat], rng: &mut ChaCha8Rng) -> CMat {
    let d = ops[0].nrows();
    let mut a = CMat::zeros(d, d);
    for x in ops {
        a += x.scale(rng.random::<f64>() - 0.5);
    }
    for x in ops {
        for y in ops {
            a += (x * y).scale(rng.random::<f64>() - 0.5);
        }
    }
    a
}

/// A proper nonzero subspace invariant under every operator in `ops`.
///
/// Candidates in order: closures of eigenvectors of a random element of the
/// generated algebra, of each generator, and of canonical vectors; then
/// eigenspaces of a non-scalar commutant element; then orthogonal
/// complements of invariant subspaces of the adjoint family.
pub fn common_invariant_subspace(
    ops: &[CMat],
    d: usize,
    tol: &Tolerance,
    seed: u64,
) -> Result<Option<InvariantSubspace>> {
    if d < 2 {
        return Ok(None);
    }
    if ops.iter().all(|a| crate::matkit::frobenius(a) <= tol.abs_floor) {
        let b = SubspaceBasis::spanned_by(d, Field::Complex, *tol, &[basis_vector(d, 0)])?;
        return Ok(Some(to_witness(ops, &b)));
    }
    if let Some(b) = invariant_candidates(ops, d, tol, seed)? {
        return Ok(Some(to_witness(ops, &b)));
    }
    if let Some(b) = commutant_eigenspace(ops, d, tol)? {
        return Ok(Some(to_witness(ops, &b)));
    }
    let adj: Vec<CMat> = ops.iter().map(|a| a.adjoint()).collect();
    if let Some(w) = invariant_candidates(&adj, d, tol, seed ^ 0x5a5a)? {
        // V invariant for every A* ⇒ V^⊥ invariant for every A.
        let p = w.projector();
        let comp = identity(d) - p;
        let cols: Vec<CVec> = (0..d).map(|j| comp.column(j).into_owned()).collect();
        let b = SubspaceBasis::spanned_by(d, Field::Complex, *tol, &cols)?;
        if b.count() > 0 && b.count() < d {
            return Ok(Some(to_witness(ops, &b)));
        }
    }
    Ok(None)
}

fn invariant_candidates(
    ops: &[CMat],
    d: usize,
    tol: &Tolerance,
    seed: u64,
) -> Result<Option<SubspaceBasis>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..2 {
        let r = random_algebra_element(ops, &mut rng);
        if let Some(b) = best_closure(&eigenvectors(&r), ops, tol, d)? {
            return Ok(Some(b));
        }
    }
    let mut seeds = Vec::new();
    for a in ops {
        seeds.extend(eigenvectors(a));
    }
    seeds.extend((0..d).map(|k| basis_vector(d, k)));
    best_closure(&seeds, ops, tol, d)
}

/// Kernel of `X ↦ ([A, X])_A`, as operators.
pub fn commutant(ops: &[CMat], d: usize, tol: &Tolerance) -> Result<Vec<CMat>> {
    if ops.is_empty() {
        return Ok((0..d * d)
            .map(|k| unvectorize(&basis_vector(d * d, k), d))
            .collect());
    }
    let mut stacked = CMat::zeros(ops.len() * d * d, d * d);
    for (i, a) in ops.iter().enumerate() {
        stacked
            .view_mut((i * d * d, 0), (d * d, d * d))
            .copy_from(&ad_superop(a));
    }
    Ok(kernel_basis(&stacked, tol)?
        .iter()
        .map(|v| unvectorize(v, d))
        .collect())
}

fn commutant_eigenspace(ops: &[CMat], d: usize, tol: &Tolerance) -> Result<Option<SubspaceBasis>> {
    let comm = commutant(ops, d, tol)?;
    if comm.len() < 2 {
        return Ok(None);
    }
    let id = identity(d);
    for c in comm {
        // Remove the scalar part; what is left is non-scalar.
        let z = trace(&c) / Complex64::new(d as f64, 0.0);
        let nc = &c - &id * z;
        if crate::matkit::frobenius(&nc) <= 1e-6 * crate::matkit::frobenius(&c) {
            continue;
        }
        if let Some(b) = best_closure(&eigenvectors(&nc), ops, tol, d)? {
            return Ok(Some(b));
        }
    }
    Ok(None)
}

/// Projection onto the support of `𝒯_{*t}(|ξ⟩⟨ξ|)`, computed as `e^{tG} S(ξ)`.
#[derive(Debug, Clone)]
pub struct SupportReport {
    pub projection: CMat,
    pub rank: usize,
    /// Numerical rank of the exactly evolved state.
    pub state_rank: usize,
    pub agree: bool,
}

pub fn support_projection(
    model: &LindbladModel,
    xi: &CVec,
    t: f64,
    tol: &Tolerance,
) -> Result<SupportReport> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    let s = s_xi_span(model, xi, tol)?;
    let p_t = matrix_exp(&drift(model), t);
    let images: Vec<CVec> = s.basis.vectors().iter().map(|v| &p_t * v).collect();
    let img = SubspaceBasis::spanned_by(model.dim(), Field::Complex, *tol, &images)?;
    let rho = evolve_state(model, &QuantumState::pure(&s.xi)?, t)?;
    let state_rank = rho.rank(&Tolerance::with_rel(1e-8));
    Ok(SupportReport {
        projection: img.projector(),
        rank: img.count(),
        state_rank,
        agree: img.count() == state_rank,
    })
}

#[derive(Debug, Clone)]
pub struct InvariantStateReport {
    pub kernel_dim: usize,
    /// The invariant state when unique, otherwise one of maximal support.
    pub state: Option<QuantumState>,
    pub unique: bool,
    pub faithful: bool,
    pub min_eigenvalue: Option<f64>,
    /// `‖ℒ_*(state)‖_F`.
    pub residual: f64,
}

fn superop_kernel(model: &LindbladModel, mode: Mode, tol: &Tolerance) -> Result<(CMat, Vec<CVec>)> {
    let s = superoperator(model, mode).matrix;
    let k = kernel_basis(&s, tol)?;
    Ok((s, k))
}

fn state_from(v: &CVec, d: usize) -> Result<QuantumState> {
    let m = unvectorize(v, d);
    let tr = trace(&m);
    if tr.norm() <= 1e-14 {
        return Err(Error::Internal("invariant kernel element has zero trace".into()));
    }
    QuantumState::new(hermitian_part(&(m / tr)))
}

pub fn invariant_states(model: &LindbladModel, tol: &Tolerance) -> Result<InvariantStateReport> {
    let d = model.dim();
    let (s, kernel) = superop_kernel(model, Mode::Schrodinger, tol)?;
    let kernel_dim = kernel.len();
    if kernel_dim == 0 {
        return Err(Error::Internal(
            "Schrödinger generator has trivial kernel; every finite QMS has an invariant state".into(),
        ));
    }
    let state = if kernel_dim == 1 {
        state_from(&kernel[0], d)?
    } else {
        maximal_invariant_state_from(&s, &kernel, d, tol)?
    };
    let lmin = state.min_eigenvalue();
    let residual = crate::matkit::frobenius(&unvectorize(&(&s * vectorize(state.rho())), d));
    Ok(InvariantStateReport {
        kernel_dim,
        unique: kernel_dim == 1,
        faithful: lmin > FAITHFUL_TOL,
        min_eigenvalue: Some(lmin),
        residual,
        state: Some(state),
    })
}

/// Ergodic average of `1/d`: the invariant state with the largest support.
pub fn maximal_invariant_state(model: &LindbladModel, tol: &Tolerance) -> Result<QuantumState> {
    let d = model.dim();
    let (s, kernel) = superop_kernel(model, Mode::Schrodinger, tol)?;
    if kernel.is_empty() {
        return Err(Error::Internal("Schrödinger generator has trivial kernel".into()));
    }
    maximal_invariant_state_from(&s, &kernel, d, tol)
}

fn maximal_invariant_state_from(
    s: &CMat,
    kernel: &[CVec],
    d: usize,
    tol: &Tolerance,
) -> Result<QuantumState> {
    // Zero is a semisimple eigenvalue of a QMS generator, so the spectral
    // projection onto ker S is K (Y*K)^{-1} Y* with Y spanning ker S*.
    let left = kernel_basis(&s.adjoint(), tol)?;
    if left.len() != kernel.len() {
        return Err(Error::Internal(format!(
            "left and right kernels differ in dimension ({} vs {})",
            left.len(),
            kernel.len()
        )));
    }
    let k = CMat::from_columns(kernel);
    let y = CMat::from_columns(&left);
    let gram = y.adjoint() * &k;
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::Internal("singular kernel pairing".into()))?;
    let mixed = vectorize(&(identity(d) / Complex64::new(d as f64, 0.0)));
    let avg = &k * (inv * (y.adjoint() * mixed));
    state_from(&avg, d)
}

#[derive(Debug, Clone)]
pub struct FixedPoints {
    pub dim: usize,
    pub basis: Vec<CMat>,
    pub trivial: bool,
}

/// Kernel of the Heisenberg generator.
pub fn fixed_points(model: &LindbladModel, tol: &Tolerance) -> Result<FixedPoints> {
    let d = model.dim();
    let (_, kernel) = superop_kernel(model, Mode::Heisenberg, tol)?;
    Ok(FixedPoints {
        dim: kernel.len(),
        trivial: kernel.len() == 1,
        basis: kernel.iter().map(|v| unvectorize(v, d)).collect(),
    })
}

/// Whether the commutant of `{δ_H^n(L_ℓ), δ_H^n(L_ℓ*)}` is `C·1`.
/// Requires a faithful invariant state.
pub fn decoherence_free_trivial(model: &LindbladModel, tol: &Tolerance) -> Result<bool> {
    let state = maximal_invariant_state(model, tol)?;
    let lmin = state.min_eigenvalue();
    if lmin <= FAITHFUL_TOL {
        return Err(Error::NotApplicable(format!(
            "no faithful invariant state (largest-support state has minimum eigenvalue {lmin:.3e})"
        )));
    }
    let d = model.dim();
    let mut seeds: Vec<CVec> = Vec::new();
    for l in model.ls() {
        seeds.push(vectorize(l));
        seeds.push(vectorize(&l.adjoint()));
    }
    let family: Vec<CMat> = if seeds.is_empty() {
        Vec::new()
    } else {
        invariant_closure(&seeds, &[ad_superop(model.h())], tol)?
            .vectors()
            .iter()
            .map(|v| unvectorize(v, d))
            .collect()
    };
    Ok(commutant(&family, d, tol)?.len() == 1)
}

/// Real Lie algebra generated by `{G̃, L_ℓ}` (or by the `L_ℓ` alone).
pub fn larc_algebra(model: &LindbladModel, with_drift: bool, tol: &Tolerance) -> Result<Vec<CMat>> {
    let d = model.dim();
    let mut gens = Vec::new();
    if with_drift {
        gens.push(stratonovich_drift(model));
    }
    gens.extend(model.ls().iter().cloned());
    if gens.is_empty() {
        return Ok(Vec::new());
    }
    Ok(lie_closure(&gens, tol, d)?
        .vectors()
        .iter()
        .map(|v| unvectorize(v, d))
        .collect())
}

#[derive(Debug, Clone)]
pub struct LarcManifold {
    pub xi: CVec,
    /// Real span of `{A ξ : A ∈ 𝔤}` inside `C^d ≅ R^{2d}`.
    pub real: SubspaceBasis,
    pub complex: SubspaceBasis,
}

impl LarcManifold {
    pub fn real_dim(&self) -> usize {
        self.real.count()
    }

    pub fn complex_dim(&self) -> usize {
        self.complex.count()
    }
}

/// Images of `ξ` under a basis of a Lie algebra; `ξ` itself is not added.
pub fn larc_manifold_in(algebra: &[CMat], xi: &CVec, tol: &Tolerance) -> Result<LarcManifold> {
    let xi = unit(xi)?;
    let d = xi.len();
    let images: Vec<CVec> = algebra.iter().map(|a| a * &xi).collect();
    Ok(LarcManifold {
        real: SubspaceBasis::spanned_by(d, Field::Real, *tol, &images)?,
        complex: SubspaceBasis::spanned_by(d, Field::Complex, *tol, &images)?,
        xi,
    })
}

pub fn larc_manifold(model: &LindbladModel, xi: &CVec, tol: &Tolerance) -> Result<LarcManifold> {
    if xi.len() != model.dim() {
        return Err(Error::DimError {
            expected: model.dim(),
            found: xi.len(),
        });
    }
    larc_manifold_in(&larc_algebra(model, true, tol)?, xi, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LarcVerdict {
    /// Full at every probe and the algebra generated by `𝔤` is `M_d`.
    Holds,
    FailsAt(Vec<Complex64>),
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeDim {
    pub xi: Vec<Complex64>,
    pub real_dim: usize,
    pub complex_dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LarcReport {
    pub with_drift: bool,
    /// Real dimension of `𝔤`.
    pub lie_dim: usize,
    pub per_xi: Vec<ProbeDim>,
    pub min_complex_dim: usize,
    /// Unital associative algebra generated by `𝔤` is all of `M_d`.
    pub burnside_full: bool,
    pub verdict: LarcVerdict,
    pub caveat: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LarcOptions {
    pub random_probes: usize,
    pub seed: u64,
    /// Include `G̃` among the generators of `𝔤`.
    pub with_drift: bool,
}

impl Default for LarcOptions {
    fn default() -> Self {
        LarcOptions {
            random_probes: 50,
            seed: 0x1a5c,
            with_drift: true,
        }
    }
}

pub fn larc_check(model: &LindbladModel, options: &LarcOptions, tol: &Tolerance) -> Result<LarcReport> {
    let d = model.dim();
    let algebra = larc_algebra(model, options.with_drift, tol)?;
    let gt = stratonovich_drift(model);
    let probes = structural_probes(&gt, model.ls(), options.random_probes, options.seed);
    let mut per_xi = Vec::with_capacity(probes.len());
    let mut first_deficient = None;
    let mut min_complex_dim = d;
    for p in &probes {
        let mf = larc_manifold_in(&algebra, p, tol)?;
        min_complex_dim = min_complex_dim.min(mf.complex_dim());
        if mf.complex_dim() < d && first_deficient.is_none() {
            first_deficient = Some(mf.xi.iter().copied().collect::<Vec<_>>());
        }
        per_xi.push(ProbeDim {
            xi: mf.xi.iter().copied().collect(),
            real_dim: mf.real_dim(),
            complex_dim: mf.complex_dim(),
        });
    }
    let burnside_full = !algebra.is_empty()
        && operator_algebra_closure(&algebra, true, tol, d)?.count() == d * d;
    let (verdict, caveat) = if let Some(xi) = first_deficient {
        (LarcVerdict::FailsAt(xi), None)
    } else if burnside_full {
        (
            LarcVerdict::Holds,
            Some(format!(
                "full at all {} probes; holding for every ξ is sampled, not proven",
                probes.len()
            )),
        )
    } else {
        // A common invariant subspace of 𝔤 traps 𝔤v for every v inside it.
        match common_invariant_subspace(&algebra, d, tol, options.seed)? {
            Some(w) => {
                let v = w.vectors()[0].clone();
                let mf = larc_manifold_in(&algebra, &v, tol)?;
                min_complex_dim = min_complex_dim.min(mf.complex_dim());
                per_xi.push(ProbeDim {
                    xi: mf.xi.iter().copied().collect(),
                    real_dim: mf.real_dim(),
                    complex_dim: mf.complex_dim(),
                });
                (LarcVerdict::FailsAt(mf.xi.iter().copied().collect()), None)
            }
            None => (
                LarcVerdict::Inconclusive,
                Some("probes full but the generated algebra is not M_d and no witness was found".into()),
            ),
        }
    };
    Ok(LarcReport {
        with_drift: options.with_drift,
        lie_dim: algebra.len(),
        per_xi,
        min_complex_dim,
        burnside_full,
        verdict,
        caveat,
    })
}

/// Numerical rank of `𝒯_{*t}(|ξ⟩⟨ξ|)` at the support tolerance.
pub fn evolved_rank(model: &LindbladModel, xi: &CVec, t: f64) -> Result<usize> {
    let rho = evolve_state(model, &QuantumState::pure(xi)?, t)?;
    numeric_rank(rho.rho(), &Tolerance::with_rel(1e-8))
}

/// Smallest eigenvalue of `𝒯_{*t}(|ξ⟩⟨ξ|)`.
pub fn evolved_min_eigenvalue(model: &LindbladModel, xi: &CVec, t: f64) -> Result<f64> {
    let rho = evolve_state(model, &QuantumState::pure(xi)?, t)?;
    Ok(min_hermitian_eigenvalue(rho.rho()))
}

#[cfg(test)]
mod tests;
