//! Generic quantum Markov semigroups: one jump operator
//! `L_{ℓk} = √γ_{ℓk} |e_k⟩⟨e_ℓ|` per positive rate and a diagonal
//! Hamiltonian. Their irreducibility reduces to strong connectivity of the
//! rate graph.
//!
//! Indices are zero-based throughout.

use std::collections::VecDeque;

use num_complex::Complex64;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gksl::{apply_generator, LindbladModel, Mode};
use crate::matkit::{best_scalar_fit, c, commutator, ket_bra, basis_vector, CMat, Tolerance};
use crate::structure::{
    is_irreducible, larc_check, IrreducibilityMethod, IrreducibilityOptions, IrreducibilityVerdict,
    LarcOptions, LarcReport, LarcVerdict,
};

/// Jump rates `γ_{ℓk}` from `ℓ` to `k`; the diagonal is ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateMatrix {
    dim: usize,
    gamma: Vec<Vec<f64>>,
}

impl RateMatrix {
    pub fn new(gamma: Vec<Vec<f64>>) -> Result<Self> {
        let dim = gamma.len();
        if dim == 0 {
            return Err(Error::EmptyInput("rate matrix"));
        }
        for (l, row) in gamma.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimError {
                    expected: dim,
                    found: row.len(),
                });
            }
            for (k, &rate) in row.iter().enumerate() {
                if l != k && !(rate >= 0.0 && rate.is_finite()) {
                    return Err(Error::InvalidRate { from: l, to: k, rate });
                }
            }
        }
        Ok(RateMatrix { dim, gamma })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rate(&self, from: usize, to: usize) -> f64 {
        if from == to {
            0.0
        } else {
            self.gamma[from][to]
        }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.gamma
    }

    /// Positive-rate edges `(ℓ, k)` in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for l in 0..self.dim {
            for k in 0..self.dim {
                if self.rate(l, k) > 0.0 {
                    out.push((l, k));
                }
            }
        }
        out
    }

    /// Classical generator `Q` with `Q_{ℓk} = γ_{ℓk}` and zero row sums.
    pub fn classical_generator(&self) -> nalgebra::DMatrix<f64> {
        let d = self.dim;
        let mut q = nalgebra::DMatrix::zeros(d, d);
        for l in 0..d {
            for k in 0..d {
                if l != k {
                    q[(l, k)] = self.rate(l, k);
                    q[(l, l)] -= self.rate(l, k);
                }
            }
        }
        q
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalHamiltonian {
    pub energies: Vec<f64>,
}

impl DiagonalHamiltonian {
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::Validation("energies must be finite".into()));
        }
        Ok(DiagonalHamiltonian { energies })
    }

    pub fn zero(d: usize) -> Self {
        DiagonalHamiltonian {
            energies: vec![0.0; d],
        }
    }

    pub fn matrix(&self) -> CMat {
        let d = self.energies.len();
        CMat::from_fn(d, d, |i, j| if i == j { c(self.energies[i], 0.0) } else { c(0.0, 0.0) })
    }
}

/// `√γ_{ℓk} |e_k⟩⟨e_ℓ|`.
pub fn jump_operator(gamma: &RateMatrix, from: usize, to: usize) -> CMat {
    let d = gamma.dim();
    ket_bra(&basis_vector(d, to), &basis_vector(d, from)) * c(gamma.rate(from, to).sqrt(), 0.0)
}

/// Model with jump operators in [`RateMatrix::edges`] order; zero rates are
/// omitted.
pub fn build_generic(gamma: &RateMatrix, h: &DiagonalHamiltonian) -> Result<LindbladModel> {
    if h.energies.len() != gamma.dim() {
        return Err(Error::DimError {
            expected: gamma.dim(),
            found: h.energies.len(),
        });
    }
    let ls = gamma
        .edges()
        .into_iter()
        .map(|(l, k)| jump_operator(gamma, l, k))
        .collect();
    LindbladModel::new(h.matrix(), ls)
}

/// `R_{jk} = [ℒ(|e_j⟩⟨e_j|)]_{kk}` in the requested picture. The Heisenberg
/// restriction equals `Q`, the Schrödinger one `Qᵀ`.
pub fn diagonal_restriction(model: &LindbladModel, mode: Mode) -> Result<nalgebra::DMatrix<f64>> {
    let d = model.dim();
    let mut r = nalgebra::DMatrix::zeros(d, d);
    for j in 0..d {
        let e = basis_vector(d, j);
        let out = apply_generator(model, &ket_bra(&e, &e), mode)?;
        for k in 0..d {
            // Column j holds the image of the j-th unit: r = matrix of the map.
            r[(k, j)] = out[(k, k)].re;
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathCertificate {
    pub from: usize,
    pub to: usize,
    /// Vertices `from = j_0, j_1, …, j_n = to`, pairwise distinct.
    pub path: Vec<usize>,
    pub rate_product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainVerdict {
    pub irreducible: bool,
    pub components: usize,
    /// One shortest positive-rate path per ordered pair `from ≠ to`.
    pub paths: Vec<PathCertificate>,
    /// An ordered pair `(ℓ, k)` with no positive-rate path from `ℓ` to `k`.
    pub unreachable: Option<(usize, usize)>,
}

/// Breadth-first predecessor tree from `src`.
fn bfs(gamma: &RateMatrix, src: usize) -> Vec<Option<usize>> {
    let d = gamma.dim();
    let mut pred = vec![None; d];
    let mut seen = vec![false; d];
    seen[src] = true;
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for v in 0..d {
            if !seen[v] && gamma.rate(u, v) > 0.0 {
                seen[v] = true;
                pred[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    pred
}

pub fn chain_irreducible(gamma: &RateMatrix) -> ChainVerdict {
    let d = gamma.dim();
    let mut graph = DiGraph::<(), f64>::new();
    let nodes: Vec<_> = (0..d).map(|_| graph.add_node(())).collect();
    for (l, k) in gamma.edges() {
        graph.add_edge(nodes[l], nodes[k], gamma.rate(l, k));
    }
    let components = tarjan_scc(&graph).len();
    let irreducible = components == 1;
    let trees: Vec<_> = (0..d).map(|s| bfs(gamma, s)).collect();
    let mut paths = Vec::new();
    let mut unreachable = None;
    if irreducible {
        for (from, tree) in trees.iter().enumerate() {
            for to in 0..d {
                if from == to {
                    continue;
                }
                let mut path = vec![to];
                let mut cur = to;
                while let Some(p) = tree[cur] {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                let rate_product = path.windows(2).map(|w| gamma.rate(w[0], w[1])).product();
                paths.push(PathCertificate {
                    from,
                    to,
                    path,
                    rate_product,
                });
            }
        }
    } else {
        'search: for from in (0..d).rev() {
            for (to, parent) in trees[from].iter().enumerate() {
                if to != from && parent.is_none() {
                    unreachable = Some((from, to));
                    break 'search;
                }
            }
        }
    }
    ChainVerdict {
        irreducible,
        components,
        paths,
        unreachable,
    }
}

/// Iterated bracket `[L_{j_{n−1} j_n}, [ …, [L_{j_1 j_2}, L_{j_0 j_1}] … ]]`.
pub fn path_bracket(gamma: &RateMatrix, path: &[usize]) -> Result<CMat> {
    if path.len() < 2 {
        return Err(Error::Validation("a bracket path needs at least one edge".into()));
    }
    let mut acc = jump_operator(gamma, path[0], path[1]);
    for w in path[1..].windows(2) {
        acc = commutator(&jump_operator(gamma, w[0], w[1]), &acc);
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketCheck {
    pub from: usize,
    pub to: usize,
    pub coefficient: Complex64,
    /// `(rate product)^{1/2}`.
    pub expected: f64,
    /// Relative residual of the fit to `|e_to⟩⟨e_from|`.
    pub shape_residual: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenericReport {
    pub chain: ChainVerdict,
    pub algebra: IrreducibilityVerdict,
    pub larc: LarcReport,
    /// LARC from the brackets of the `L`'s alone, recorded for comparison.
    pub larc_without_drift: LarcReport,
    pub brackets: Vec<BracketCheck>,
    pub max_bracket_error: f64,
    /// `max |R − Qᵀ|` for the Schrödinger restriction to diagonals.
    pub diagonal_restriction_error: f64,
}

impl GenericReport {
    pub fn irreducible(&self) -> bool {
        self.chain.irreducible
    }
}

pub fn verify_equivalences(
    gamma: &RateMatrix,
    h: &DiagonalHamiltonian,
    larc_options: &LarcOptions,
    tol: &Tolerance,
) -> Result<GenericReport> {
    let model = build_generic(gamma, h)?;
    let chain = chain_irreducible(gamma);
    let options = IrreducibilityOptions {
        tol: *tol,
        ..IrreducibilityOptions::default()
    };
    let algebra = is_irreducible(&model, IrreducibilityMethod::AlgebraGL, &options)?;
    let larc = larc_check(&model, larc_options, tol)?;
    let larc_without_drift = larc_check(
        &model,
        &LarcOptions {
            with_drift: false,
            ..*larc_options
        },
        tol,
    )?;
    let larc_holds = match larc.verdict {
        LarcVerdict::Holds => true,
        LarcVerdict::FailsAt(_) => false,
        LarcVerdict::Inconclusive => {
            return Err(Error::Inconsistent(
                "LARC inconclusive on a generic model".into(),
            ))
        }
    };
    if chain.irreducible != algebra.irreducible || chain.irreducible != larc_holds {
        return Err(Error::Inconsistent(format!(
            "chain irreducible = {}, algebra irreducible = {}, LARC holds = {}",
            chain.irreducible, algebra.irreducible, larc_holds
        )));
    }
    let mut brackets = Vec::with_capacity(chain.paths.len());
    for cert in &chain.paths {
        let b = path_bracket(gamma, &cert.path)?;
        let unit = ket_bra(&basis_vector(gamma.dim(), cert.to), &basis_vector(gamma.dim(), cert.from));
        let (z, shape_residual) = best_scalar_fit(&b, &unit);
        let expected = cert.rate_product.sqrt();
        brackets.push(BracketCheck {
            from: cert.from,
            to: cert.to,
            coefficient: z,
            expected,
            shape_residual,
            relative_error: (z - c(expected, 0.0)).norm() / expected,
        });
    }
    let max_bracket_error = brackets
        .iter()
        .map(|b| b.relative_error.max(b.shape_residual))
        .fold(0.0, f64::max);
    if max_bracket_error > 1e-10 {
        return Err(Error::Inconsistent(format!(
            "iterated bracket deviates from the path-rate coefficient by {max_bracket_error:.3e}"
        )));
    }
    let r = diagonal_restriction(&model, Mode::Schrodinger)?;
    let diagonal_restriction_error = (r - gamma.classical_generator().transpose()).amax();
    Ok(GenericReport {
        chain,
        algebra,
        larc,
        larc_without_drift,
        brackets,
        max_bracket_error,
        diagonal_restriction_error,
    })
}
