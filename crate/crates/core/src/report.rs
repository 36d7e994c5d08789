//! Full structural analysis of a model as a versioned JSON document.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::gksl::{check_minimal, minimalize, LindbladModel};
use crate::io::{emit_model, vector_json};
use crate::matkit::{CMat, CVec, Tolerance};
use crate::sse::{verify_representation, RepresentationReport, TrajectoryConfig};
use crate::structure::{
    decoherence_free_trivial, fixed_points, invariant_states, is_irreducible, larc_check,
    probe_vectors, s_xi_span_with, delta_span, IrreducibilityMethod, IrreducibilityOptions,
    IrreducibilityVerdict, LarcOptions, LarcReport, LarcVerdict,
};

pub const SCHEMA_VERSION: u32 = 1;

/// SHA-256 of the canonical model JSON, hex encoded.
pub fn fingerprint(model: &LindbladModel) -> String {
    hex::encode(Sha256::digest(emit_model(model).as_bytes()))
}

#[derive(Debug, Clone, Serialize)]
pub struct Minimality {
    pub minimal: bool,
    /// `(c_0, c_1, …)` with `c_0 I + Σ c_ℓ L_ℓ = 0`.
    pub witness: Option<Vec<num_complex::Complex64>>,
    pub original_m: usize,
    pub minimal_m: usize,
    pub tolerance: Tolerance,
}

#[derive(Debug, Clone, Serialize)]
pub struct TaggedVerdict<T: Serialize> {
    pub method: String,
    pub tolerance: Tolerance,
    pub result: T,
}

fn tagged<T: Serialize>(method: &str, tol: &Tolerance, result: T) -> TaggedVerdict<T> {
    TaggedVerdict {
        method: method.to_string(),
        tolerance: *tol,
        result,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantStateSummary {
    pub kernel_dim: usize,
    pub unique: bool,
    pub faithful: bool,
    pub min_eigenvalue: Option<f64>,
    pub residual: f64,
    /// Density matrix as rows of `[re, im]`.
    pub state: Option<Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeSpan {
    pub xi: Value,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub fingerprint: String,
    pub dim: usize,
    pub minimality: Minimality,
    /// Verdicts on the minimal representation.
    pub irreducibility: Vec<TaggedVerdict<IrreducibilityVerdict>>,
    pub irreducible: bool,
    pub invariant_state: TaggedVerdict<InvariantStateSummary>,
    pub fixed_point_dim: TaggedVerdict<usize>,
    /// `None` when no faithful invariant state exists.
    pub decoherence_free_trivial: TaggedVerdict<Option<bool>>,
    pub larc: TaggedVerdict<LarcReport>,
    /// LARC on the representation as given, when it was not minimal.
    pub larc_original: Option<TaggedVerdict<LarcReport>>,
    pub s_xi: TaggedVerdict<Vec<ProbeSpan>>,
    pub sse: Vec<RepresentationReport>,
    /// Logical consequences that failed; empty for a consistent report.
    pub inconsistencies: Vec<String>,
    /// Statistical disagreements that do not contradict a theorem.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub tol: Tolerance,
    pub seed: u64,
    /// Random `ξ` added to the structural probes.
    pub probes: usize,
    pub monte_carlo: bool,
    /// Representation checks `(ξ, t, config)` to run.
    pub sse: Vec<(CVec, f64, TrajectoryConfig)>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            tol: Tolerance::default(),
            seed: 0,
            probes: 20,
            monte_carlo: true,
            sse: Vec::new(),
        }
    }
}

fn method_name(m: IrreducibilityMethod) -> &'static str {
    match m {
        IrreducibilityMethod::AlgebraGL => "algebra-gl",
        IrreducibilityMethod::AlgebraDelta => "algebra-delta",
        IrreducibilityMethod::MonteCarloTotality => "monte-carlo-totality",
    }
}

fn matrix_value(m: &CMat) -> Value {
    Value::Array(
        m.row_iter()
            .map(|r| Value::Array(r.iter().map(|z| serde_json::json!([z.re, z.im])).collect()))
            .collect(),
    )
}

pub fn analyze(model: &LindbladModel, options: &AnalysisOptions) -> Result<AnalysisReport> {
    let tol = &options.tol;
    let check = check_minimal(model, tol);
    let minimal_model = minimalize(model, tol)?;
    let minimality = Minimality {
        minimal: check.minimal,
        witness: check.witness,
        original_m: model.m(),
        minimal_m: minimal_model.m(),
        tolerance: *tol,
    };
    let m = &minimal_model;
    let irr_opts = IrreducibilityOptions {
        tol: *tol,
        seed: options.seed,
        ..IrreducibilityOptions::default()
    };
    let mut methods = vec![IrreducibilityMethod::AlgebraGL, IrreducibilityMethod::AlgebraDelta];
    if options.monte_carlo {
        methods.push(IrreducibilityMethod::MonteCarloTotality);
    }
    let verdicts = methods
        .iter()
        .map(|&meth| is_irreducible(m, meth, &irr_opts).map(|v| tagged(method_name(meth), tol, v)))
        .collect::<Result<Vec<_>>>()?;
    let irreducible = verdicts[0].result.irreducible;

    let inv = invariant_states(m, tol)?;
    let invariant_state = tagged(
        "schrodinger-kernel",
        tol,
        InvariantStateSummary {
            kernel_dim: inv.kernel_dim,
            unique: inv.unique,
            faithful: inv.faithful,
            min_eigenvalue: inv.min_eigenvalue,
            residual: inv.residual,
            state: inv.state.as_ref().map(|s| matrix_value(s.rho())),
        },
    );
    let fixed = fixed_points(m, tol)?;
    let dft = match decoherence_free_trivial(m, tol) {
        Ok(b) => Some(b),
        Err(crate::Error::NotApplicable(_)) => None,
        Err(e) => return Err(e),
    };

    let larc_opts = LarcOptions {
        random_probes: options.probes,
        seed: options.seed,
        with_drift: true,
    };
    let larc = tagged("lie-closure-sampled", tol, larc_check(m, &larc_opts, tol)?);
    let larc_original = if check.minimal {
        None
    } else {
        Some(tagged("lie-closure-sampled", tol, larc_check(model, &larc_opts, tol)?))
    };

    let delta = delta_span(m, tol)?;
    let s_xi = probe_vectors(m, options.probes, options.seed)
        .iter()
        .map(|p| {
            s_xi_span_with(&delta, p, tol).map(|s| ProbeSpan {
                xi: vector_json(&s.xi),
                dim: s.dim,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let sse = options
        .sse
        .iter()
        .map(|(xi, t, cfg)| verify_representation(model, xi, *t, cfg))
        .collect::<Result<Vec<_>>>()?;

    let d = m.dim();
    let mut inconsistencies = Vec::new();
    let mut notes = Vec::new();
    for v in &verdicts[1..] {
        if v.result.irreducible != irreducible {
            let msg = format!(
                "{} says irreducible = {}, algebra-gl says {}",
                v.method, v.result.irreducible, irreducible
            );
            if v.result.method == IrreducibilityMethod::MonteCarloTotality {
                notes.push(msg);
            } else {
                inconsistencies.push(msg);
            }
        }
    }
    let all_full = s_xi.iter().all(|p| p.dim == d);
    if irreducible && !all_full {
        inconsistencies.push("irreducible model has a probe with deficient S(ξ)".into());
    }
    if irreducible {
        if !(inv.unique && inv.faithful) {
            inconsistencies.push("irreducible model lacks a unique faithful invariant state".into());
        }
        if fixed.dim != 1 {
            inconsistencies.push(format!("irreducible model has {} fixed points", fixed.dim));
        }
        if dft != Some(true) {
            inconsistencies.push("irreducible model has a nontrivial decoherence-free algebra".into());
        }
    }
    if larc.result.verdict == LarcVerdict::Holds && !irreducible {
        inconsistencies.push("LARC holds on a reducible model".into());
    }
    if !irreducible {
        if let Some(w) = &verdicts[0].result.witness {
            if w.dim() == 0 || w.dim() == d {
                inconsistencies.push("reducibility witness is trivial".into());
            }
        }
    }

    Ok(AnalysisReport {
        schema: SCHEMA_VERSION,
        fingerprint: fingerprint(model),
        dim: d,
        minimality,
        irreducibility: verdicts,
        irreducible,
        invariant_state,
        fixed_point_dim: tagged("heisenberg-kernel", tol, fixed.dim),
        decoherence_free_trivial: tagged("commutant", tol, dft),
        larc,
        larc_original,
        s_xi: tagged("invariant-closure", tol, s_xi),
        sse,
        inconsistencies,
        notes,
    })
}
