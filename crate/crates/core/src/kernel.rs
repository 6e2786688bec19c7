//! The Toeplitz kernel attached to a representation, its Gram matrices, the
//! clique-alternating positivity test and the explicit clique factorization.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Vertex, VertexSet};
use crate::linalg::{self, c, CMatrix};
use crate::rep::{OperatorMatrix, Representation};
use crate::word::{commutes, generator_commutes, remove_common_initial, Word};

/// Default vertex-count limit for sweeps over all subsets.
pub const DEFAULT_GUARD: usize = 16;

/// `K(p, q)`: strip common initial syllables to reach `(u, v)`, then
/// `T(v) T(u)*` when `u` and `v` commute and zero otherwise.
pub fn kernel(t: &Representation, p: &Word, q: &Word) -> CMatrix {
    let g = t.graph();
    let (u, v) = remove_common_initial(p, q, g);
    if commutes(&u, &v, g) {
        t.evaluate(&v) * t.evaluate(&u).adjoint()
    } else {
        linalg::zeros(t.dim(), t.dim())
    }
}

fn labels(t: &Representation, words: &[Word]) -> Vec<String> {
    words.iter().map(|w| w.display(t.graph()).to_string()).collect()
}

/// `K[F1, F2]` with block `(i, j) = K(p_i, q_j)`.
pub fn gram_between(t: &Representation, rows: &[Word], cols: &[Word]) -> OperatorMatrix {
    let mut out = OperatorMatrix::new(labels(t, rows), labels(t, cols), t.dim());
    let blocks: Vec<CMatrix> = (0..rows.len() * cols.len())
        .into_par_iter()
        .map(|k| kernel(t, &rows[k / cols.len()], &cols[k % cols.len()]))
        .collect();
    for (k, b) in blocks.iter().enumerate() {
        out.set(k / cols.len(), k % cols.len(), b);
    }
    out
}

/// `K[F]`; duplicates in `words` are kept.
pub fn gram(t: &Representation, words: &[Word]) -> OperatorMatrix {
    gram_between(t, words, words)
}

/// Diagonal operator matrix `D(λ, F)` whose `i`-th entry is `T_λ^m` when
/// `e_λ` commutes with `p_i` and zero otherwise.
pub fn shift_diagonal(t: &Representation, lambda: Vertex, words: &[Word], m: u32) -> OperatorMatrix {
    let mut out = OperatorMatrix::new(labels(t, words), labels(t, words), t.dim());
    let power = t.generator(lambda).pow(m);
    for (i, p) in words.iter().enumerate() {
        if generator_commutes(lambda, p, t.graph()) {
            out.set(i, i, &power);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PsdCheck {
    pub psd: bool,
    pub min_eigenvalue: f64,
}

/// `λ_min(½(M + M*)) ≥ −tol·max(1, ‖M‖)`, after checking `M` is Hermitian
/// within the same relative tolerance.
pub fn psd_check(m: &CMatrix, tol: f64) -> Result<PsdCheck> {
    let residual = linalg::hermitian_residual(m);
    if residual > tol {
        return Err(Error::NotHermitian(residual));
    }
    let (values, _) = linalg::hermitian_eigen(m);
    let min = values.first().copied().unwrap_or(0.0);
    let norm = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    Ok(PsdCheck { psd: min >= -tol * norm, min_eigenvalue: min })
}

/// `T_U T_U*` for every clique, in clique order.
fn clique_terms(t: &Representation) -> Vec<(VertexSet, CMatrix)> {
    t.graph()
        .cliques()
        .into_iter()
        .map(|u| {
            let tu = t.evaluate_set(&u);
            let term = &tu * tu.adjoint();
            (u, term)
        })
        .collect()
}

fn z_from_terms(terms: &[(VertexSet, CMatrix)], within: &VertexSet, dim: usize) -> CMatrix {
    let mask = within.mask();
    terms.iter().filter(|(u, _)| u.mask() & !mask == 0).fold(linalg::zeros(dim, dim), |acc, (u, term)| {
        let sign = if u.len().is_multiple_of(2) { 1.0 } else { -1.0 };
        acc + term * c(sign, 0.0)
    })
}

/// `Z_V = Σ (−1)^{|U|} T_U T_U*` over cliques `U ⊆ V`.
pub fn z_matrix(t: &Representation, within: &VertexSet) -> CMatrix {
    z_from_terms(&clique_terms(t), within, t.dim())
}

#[derive(Clone, Copy, Debug)]
pub struct RegularityOptions {
    pub tol: f64,
    pub guard: usize,
    /// Sweep even when the vertex count exceeds `guard`.
    pub override_guard: bool,
    /// Only test `W = Λ`. The verdict is then not a certificate.
    pub top_only: bool,
}

impl Default for RegularityOptions {
    fn default() -> Self {
        RegularityOptions { tol: 1e-9, guard: DEFAULT_GUARD, override_guard: false, top_only: false }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubsetRecord {
    pub subset: Vec<String>,
    pub min_eigenvalue: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityVerdict {
    pub regular: bool,
    /// False when only the top subset was examined.
    pub certifying: bool,
    pub tol: f64,
    pub records: Vec<SubsetRecord>,
}

impl RegularityVerdict {
    pub fn failures(&self) -> impl Iterator<Item = &SubsetRecord> {
        self.records.iter().filter(|r| !r.pass)
    }
}

/// Tests `Z_W ⪰ 0` for every `W ⊆ Λ`, in increasing bitmask order.
pub fn check_regular(t: &Representation, opts: &RegularityOptions) -> Result<RegularityVerdict> {
    let g = t.graph();
    let n = g.len();
    if !opts.top_only && n > opts.guard && !opts.override_guard {
        return Err(Error::GuardExceeded { vertices: n, guard: opts.guard });
    }
    if n >= 64 {
        return Err(Error::GuardExceeded { vertices: n, guard: 63 });
    }
    let terms = clique_terms(t);
    let masks: Vec<u64> = if opts.top_only { vec![(1u64 << n) - 1] } else { (0..1u64 << n).collect() };
    let records = masks
        .par_iter()
        .map(|&mask| {
            let w = VertexSet::from_mask(mask);
            let z = z_from_terms(&terms, &w, t.dim());
            let check = psd_check(&z, opts.tol)?;
            Ok(SubsetRecord {
                subset: w.iter().map(|v| g.label(v).to_string()).collect(),
                min_eigenvalue: check.min_eigenvalue,
                pass: check.psd,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegularityVerdict {
        regular: records.iter().all(|r| r.pass),
        certifying: !opts.top_only,
        tol: opts.tol,
        records,
    })
}

/// `‖Σ_{cliques W ⊇ F} T_{W∖F} Z_{N_W} T_{W∖F}* − I‖`.
pub fn clique_identity_residual(t: &Representation, fixed: &VertexSet) -> Result<f64> {
    let g = t.graph();
    if !g.is_clique(fixed) {
        return Err(Error::NotAClique(g.format_set(fixed)));
    }
    let terms = clique_terms(t);
    let mut sum = linalg::zeros(t.dim(), t.dim());
    for w in g.cliques().iter().filter(|w| fixed.is_subset(w)) {
        let z = z_from_terms(&terms, &g.neighborhood(w)?, t.dim());
        let a = t.evaluate_set(&w.difference(fixed));
        sum += &a * z * a.adjoint();
    }
    Ok(linalg::op_norm(&(sum - linalg::identity(t.dim()))))
}

/// `K[F_c]` over all cliques in clique order.
pub fn clique_gram(t: &Representation) -> OperatorMatrix {
    let words: Vec<Word> = t.graph().cliques().iter().map(Word::clique).collect();
    gram(t, &words)
}

/// Lower-triangular factor `R_c` with `R_c[U, W] = T_{W∖U} Z_{N_W}^{1/2}` for
/// `U ⊆ W` and zero otherwise, so that `K[F_c] = R_c R_c*`.
pub fn cholesky_factor_cliques(t: &Representation, tol: f64) -> Result<OperatorMatrix> {
    let g = t.graph();
    let cliques = g.cliques();
    let terms = clique_terms(t);
    let roots = cliques
        .iter()
        .map(|w| linalg::psd_sqrt(&z_from_terms(&terms, &g.neighborhood(w)?, t.dim()), tol))
        .collect::<Result<Vec<_>>>()?;
    let names: Vec<String> = cliques.iter().map(|u| g.format_set(u)).collect();
    let mut r = OperatorMatrix::new(names.clone(), names, t.dim());
    for (i, u) in cliques.iter().enumerate() {
        for (j, w) in cliques.iter().enumerate() {
            if u.is_subset(w) {
                r.set(i, j, &(t.evaluate_set(&w.difference(u)) * &roots[j]));
            }
        }
    }
    Ok(r)
}
