//! JSON model and rate-graph formats, trajectory CSV, ensemble summaries.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major lists of
//! rows. Emission followed by parsing reproduces a model bit for bit.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::generic::{DiagonalHamiltonian, RateMatrix};
use crate::gksl::{LindbladModel, HERMITIAN_TOL};
use crate::matkit::{c, CMat, CVec};
use crate::sse::{MatrixEstimate, ScalarEstimate, TrajectoryEnsemble};

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!("line {} column {}: {e}", e.line(), e.column()))
    })
}

fn field<'a>(obj: &'a Value, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::Parse(format!("missing field `{name}`")))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("`{path}` must be an array")))
}

fn as_f64(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::Parse(format!("`{path}` must be a number")))
}

fn as_dim(v: &Value) -> Result<usize> {
    match v.as_u64() {
        Some(d) if d > 0 => Ok(d as usize),
        _ => Err(Error::Parse("`dim` must be a positive integer".into())),
    }
}

fn complex_matrix(v: &Value, d: usize, path: &str) -> Result<CMat> {
    let rows = as_array(v, path)?;
    if rows.len() != d {
        return Err(Error::Parse(format!("`{path}` has {} rows, expected {d}", rows.len())));
    }
    let mut m = CMat::zeros(d, d);
    for (i, row) in rows.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        let entries = as_array(row, &rp)?;
        if entries.len() != d {
            return Err(Error::Parse(format!("`{rp}` has {} entries, expected {d}", entries.len())));
        }
        for (j, z) in entries.iter().enumerate() {
            let zp = format!("{path}[{i}][{j}]");
            match z.as_array().map(Vec::as_slice) {
                Some([re, im]) => m[(i, j)] = c(as_f64(re, &zp)?, as_f64(im, &zp)?),
                _ => return Err(Error::Parse(format!("`{zp}` must be an [re, im] pair"))),
            }
        }
    }
    Ok(m)
}

fn matrix_json(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn vector_json(v: &CVec) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

/// Entries `(i, j)` with `i ≤ j` where `|H_ij − conj(H_ji)|` exceeds the
/// Hermiticity tolerance.
fn non_hermitian_entries(h: &CMat) -> Vec<(usize, usize)> {
    let d = h.nrows();
    let mut bad = Vec::new();
    for i in 0..d {
        for j in i..d {
            if (h[(i, j)] - h[(j, i)].conj()).norm() > HERMITIAN_TOL {
                bad.push((i, j));
            }
        }
    }
    bad
}

pub fn parse_model(text: &str) -> Result<LindbladModel> {
    let root = parse_json(text)?;
    let d = as_dim(field(&root, "dim")?)?;
    let h = complex_matrix(field(&root, "H")?, d, "H")?;
    let bad = non_hermitian_entries(&h);
    if !bad.is_empty() {
        let list: Vec<String> = bad.iter().map(|(i, j)| format!("H[{i}][{j}]")).collect();
        return Err(Error::Validation(format!(
            "H is not Hermitian at entries {}",
            list.join(", ")
        )));
    }
    let ls = as_array(field(&root, "L")?, "L")?
        .iter()
        .enumerate()
        .map(|(k, l)| complex_matrix(l, d, &format!("L[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    LindbladModel::new(h, ls)
}

/// Canonical JSON: sorted keys, shortest round-trip float formatting.
pub fn model_to_value(model: &LindbladModel) -> Value {
    json!({
        "dim": model.dim(),
        "H": matrix_json(model.h()),
        "L": model.ls().iter().map(matrix_json).collect::<Vec<_>>(),
    })
}

pub fn emit_model(model: &LindbladModel) -> String {
    model_to_value(model).to_string()
}

/// Rate graph and diagonal Hamiltonian; `energies` defaults to zero.
pub fn parse_rates(text: &str) -> Result<(RateMatrix, DiagonalHamiltonian)> {
    let root = parse_json(text)?;
    let d = as_dim(field(&root, "dim")?)?;
    let rows = as_array(field(&root, "gamma")?, "gamma")?;
    if rows.len() != d {
        return Err(Error::Parse(format!("`gamma` has {} rows, expected {d}", rows.len())));
    }
    let gamma = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let rp = format!("gamma[{i}]");
            let entries = as_array(row, &rp)?;
            if entries.len() != d {
                return Err(Error::Parse(format!("`{rp}` has {} entries, expected {d}", entries.len())));
            }
            entries
                .iter()
                .enumerate()
                .map(|(j, x)| as_f64(x, &format!("gamma[{i}][{j}]")))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let energies = match root.get("energies") {
        None => vec![0.0; d],
        Some(v) => {
            let e = as_array(v, "energies")?
                .iter()
                .enumerate()
                .map(|(i, x)| as_f64(x, &format!("energies[{i}]")))
                .collect::<Result<Vec<f64>>>()?;
            if e.len() != d {
                return Err(Error::Parse(format!("`energies` has {} entries, expected {d}", e.len())));
            }
            e
        }
    };
    Ok((RateMatrix::new(gamma)?, DiagonalHamiltonian::new(energies)?))
}

pub fn emit_rates(gamma: &RateMatrix, h: &DiagonalHamiltonian) -> String {
    json!({"dim": gamma.dim(), "gamma": gamma.rows(), "energies": h.energies}).to_string()
}

/// Comma-separated complex vector such as `1,0` or `0.6+0.8i,0`.
pub fn parse_vector(text: &str) -> Result<CVec> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Parse(format!("empty component in vector `{text}`")));
    }
    let entries = parts
        .iter()
        .map(|p| parse_complex(p))
        .collect::<Result<Vec<_>>>()?;
    Ok(CVec::from_vec(entries))
}

fn parse_complex(s: &str) -> Result<num_complex::Complex64> {
    s.parse::<num_complex::Complex64>()
        .map_err(|_| Error::Parse(format!("cannot read `{s}` as a complex number")))
}

/// Columns `traj_id, step, t, re_0, im_0, …`; `step` counts integration
/// steps, so recorded rows are spaced by `record_every`.
pub fn write_trajectory_csv<W: Write>(ens: &TrajectoryEnsemble, mut out: W) -> Result<()> {
    let d = ens.dim();
    let io = |e: std::io::Error| Error::Internal(format!("CSV write failed: {e}"));
    let mut header = String::from("traj_id,step,t");
    for k in 0..d {
        header.push_str(&format!(",re_{k},im_{k}"));
    }
    writeln!(out, "{header}").map_err(io)?;
    let stride = ens.config.record_every;
    for traj in 0..ens.n_traj() {
        for (idx, t) in ens.times.iter().enumerate() {
            let mut line = format!("{traj},{},{t}", idx * stride);
            for z in ens.sample(traj, idx) {
                line.push_str(&format!(",{},{}", z.re, z.im));
            }
            writeln!(out, "{line}").map_err(io)?;
        }
    }
    out.flush().map_err(io)
}

/// Final-time estimates of an ensemble run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub t: f64,
    pub n_traj: usize,
    pub steps: usize,
    pub mean_square_norm: ScalarEstimate,
    /// `E|X_t⟩⟨X_t|` as `[re, im]` rows.
    pub density: Value,
    pub density_std_errors: Vec<Vec<f64>>,
    pub aggregate_std_error: f64,
}

impl EnsembleSummary {
    pub fn new(t: f64, steps: usize, norm: ScalarEstimate, density: &MatrixEstimate) -> Self {
        let se = &density.std_errors;
        EnsembleSummary {
            t,
            n_traj: density.n,
            steps,
            mean_square_norm: norm,
            density: matrix_json(&density.value),
            density_std_errors: (0..se.nrows())
                .map(|i| (0..se.ncols()).map(|j| se[(i, j)]).collect())
                .collect(),
            aggregate_std_error: density.aggregate_std_error,
        }
    }
}
