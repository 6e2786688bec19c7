//! Finite truncation of the minimal isometric dilation.
//!
//! The formal space is `span{δ_p ⊗ h : deg p ≤ N}` with inner product given by
//! the Gram matrix of the kernel. Its quotient by the null space is realised
//! in coordinates `C^r` through `Q = Λ_r^{1/2} U_r*`, so that
//! `(Qx)*(Qy) = x* G y` for formal vectors `x, y`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Vertex;
use crate::kernel::{gram, kernel};
use crate::linalg::{self, CMatrix};
use crate::rep::{OperatorMatrix, Representation, DEFAULT_TOL};
use crate::word::{enumerate_ball, generator_commutes, multiply, Word};

/// Default relative eigenvalue cut for the null space.
pub const DEFAULT_CUT: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct TruncatedDilation {
    pub depth: u32,
    pub ball: Vec<Word>,
    pub gram: OperatorMatrix,
    /// Smallest eigenvalue of the Gram matrix before the cut.
    pub gram_min_eigenvalue: f64,
    pub rank: usize,
    /// `r × (|ball|·d)` coordinate map.
    pub quotient: CMatrix,
    /// `r × d` isometry onto the `δ_e ⊗ H` subspace.
    pub embed: CMatrix,
    /// Shift for each vertex; exact on `domain`, zero on its complement.
    pub vgen: Vec<CMatrix>,
    /// Orthonormal basis of the image of the `deg ≤ N−1` sub-ball.
    pub domain: CMatrix,
    /// Orthonormal basis of the image of the `deg ≤ N−2` sub-ball.
    pub inner_domain: CMatrix,
    /// `(λ_max / λ_min)^{1/2}` over the kept spectrum.
    pub kappa: f64,
    pub cut: f64,
}

/// Columns of `q` belonging to words with `deg ≤ max_deg`.
fn sub_columns(q: &CMatrix, ball: &[Word], d: usize, max_deg: u32) -> CMatrix {
    let count = ball.iter().take_while(|w| w.degree() <= max_deg).count();
    q.columns(0, count * d).into_owned()
}

/// Orthonormal basis for the column space of `m`, discarding singular values
/// at or below `eps`.
fn range_basis(m: &CMatrix, eps: f64) -> CMatrix {
    if m.ncols() == 0 {
        return linalg::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > eps).collect();
    CMatrix::from_fn(m.nrows(), keep.len(), |r, k| u[(r, keep[k])])
}

/// Builds the dilation on the ball of degree `depth`.
///
/// Eigenvalues at or below `cut·‖G‖` are treated as null. Fails with
/// [`Error::NotPsd`] when the Gram matrix has an eigenvalue below
/// `−max(cut, 1e-9)·‖G‖`.
pub fn build_truncated_dilation(t: &Representation, depth: u32, cut: f64) -> Result<TruncatedDilation> {
    let g = t.graph();
    let d = t.dim();
    let ball = enumerate_ball(g, depth);
    let gm = gram(t, &ball);
    let (values, vectors) = linalg::hermitian_eigen(&gm.data);
    let top = values.last().copied().unwrap_or(0.0).max(0.0);
    let min = values.first().copied().unwrap_or(0.0);
    if min < -cut.max(DEFAULT_TOL) * top.max(1.0) {
        return Err(Error::NotPsd(min));
    }
    let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] > cut * top).collect();
    let rank = keep.len();
    let n = gm.data.nrows();
    let quotient = CMatrix::from_fn(rank, n, |r, k| vectors[(k, keep[r])].conj() * values[keep[r]].sqrt());
    let embed = quotient.columns(0, d).into_owned();
    let kappa = keep.first().map_or(1.0, |&i| (top / values[i]).sqrt());

    let eps = (cut * top).sqrt();
    let q_sub = sub_columns(&quotient, &ball, d, depth.saturating_sub(1));
    let domain = if depth == 0 { linalg::zeros(rank, 0) } else { range_basis(&q_sub, eps) };
    let inner_domain =
        if depth < 2 { linalg::zeros(rank, 0) } else { range_basis(&sub_columns(&quotient, &ball, d, depth - 2), eps) };

    let index = |w: &Word| ball.binary_search_by(|b| (b.degree(), b).cmp(&(w.degree(), w))).ok();
    let vgen = g
        .vertices()
        .map(|v| {
            if depth == 0 {
                return linalg::zeros(rank, rank);
            }
            // Q S_v restricted to the sub-ball
            let mut shifted = linalg::zeros(rank, q_sub.ncols());
            for (i, p) in ball.iter().take(q_sub.ncols() / d).enumerate() {
                let j = index(&multiply(&Word::generator(v, 1), p, g)).expect("ball closed under shift");
                shifted.columns_mut(i * d, d).copy_from(&quotient.columns(j * d, d));
            }
            let pinv = q_sub.clone().pseudo_inverse(eps).expect("pseudo-inverse");
            shifted * pinv
        })
        .collect();

    Ok(TruncatedDilation {
        depth,
        ball,
        gram: gm,
        gram_min_eigenvalue: min,
        rank,
        quotient,
        embed,
        vgen,
        domain,
        inner_domain,
        kappa,
        cut,
    })
}

impl TruncatedDilation {
    /// `V(p)`: ordered product of shifts over the normal form of `p`.
    pub fn v_word(&self, p: &Word) -> CMatrix {
        p.syllables().iter().fold(linalg::identity(self.rank), |acc, s| acc * self.vgen[s.vertex].pow(s.exponent))
    }

    pub fn v(&self, lambda: Vertex) -> &CMatrix {
        &self.vgen[lambda]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DilationReport {
    pub depth: u32,
    pub ball_size: usize,
    pub rank: usize,
    pub domain_rank: usize,
    pub kappa: f64,
    pub gram_min_eigenvalue: f64,
    /// `max_p ‖E* V(p) E − T(p)‖`.
    pub compression: f64,
    /// `max_{p,q} ‖E* V(p)* V(q) E − K(p, q)‖`.
    pub kernel: f64,
    /// `‖B* V_λ* V_λ B − I‖` per vertex, `B` spanning the domain.
    pub isometry: Vec<(String, f64)>,
}

impl DilationReport {
    pub fn max_isometry(&self) -> f64 {
        self.isometry.iter().map(|x| x.1).fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.compression.max(self.kernel).max(self.max_isometry())
    }
}

pub fn verify_dilation(dil: &TruncatedDilation, t: &Representation) -> DilationReport {
    let g = t.graph();
    let images: Vec<CMatrix> = dil.ball.par_iter().map(|p| dil.v_word(p) * &dil.embed).collect();
    let compression = dil
        .ball
        .par_iter()
        .zip(images.par_iter())
        .map(|(p, vp)| linalg::op_norm(&(dil.embed.adjoint() * vp - t.evaluate(p))))
        .reduce(|| 0.0, f64::max);
    let n = dil.ball.len();
    let kernel_res = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let m = images[i].adjoint() * &images[j] - kernel(t, &dil.ball[i], &dil.ball[j]);
            linalg::op_norm(&m)
        })
        .reduce(|| 0.0, f64::max);
    let b = &dil.domain;
    let isometry = g
        .vertices()
        .map(|v| {
            let vb = &dil.vgen[v] * b;
            let r = vb.adjoint() * &vb - linalg::identity(b.ncols());
            (g.label(v).to_string(), if b.ncols() == 0 { 0.0 } else { linalg::op_norm(&r) })
        })
        .collect();
    DilationReport {
        depth: dil.depth,
        ball_size: n,
        rank: dil.rank,
        domain_rank: b.ncols(),
        kappa: dil.kappa,
        gram_min_eigenvalue: dil.gram_min_eigenvalue,
        compression,
        kernel: kernel_res,
        isometry,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NicaReport {
    /// `‖B* V_i* V_j B‖` for non-adjacent `i ≠ j`.
    pub orthogonality: Vec<(String, String, f64)>,
    /// `‖(V_i V_j − V_j V_i) B₂‖` for adjacent `i, j`, `B₂` spanning the
    /// `deg ≤ N−2` image.
    pub commutation: Vec<(String, String, f64)>,
    /// `max ‖(V_λ V(q) E)* V(p) E − K(q, p) T_λ*‖` over `λ` not initial in `p`
    /// with `e_λ` commuting with `p`; the target is zero otherwise.
    pub star_commutation: f64,
    /// `max ‖K(p, e_λ q) − D K(p, q)‖` with `D = T_λ` or `0` as above.
    pub shift_identity: f64,
}

impl NicaReport {
    pub fn max_residual(&self) -> f64 {
        self.orthogonality
            .iter()
            .chain(&self.commutation)
            .map(|x| x.2)
            .fold(self.star_commutation.max(self.shift_identity), f64::max)
    }
}

pub fn verify_nica(dil: &TruncatedDilation, t: &Representation) -> NicaReport {
    let g = t.graph();
    let (b, b2) = (&dil.domain, &dil.inner_domain);
    let mut orthogonality = Vec::new();
    let mut commutation = Vec::new();
    for i in g.vertices() {
        for j in g.vertices().filter(|&j| j > i) {
            let (vi, vj) = (&dil.vgen[i], &dil.vgen[j]);
            let (li, lj) = (g.label(i).to_string(), g.label(j).to_string());
            if g.adjacent(i, j) {
                let r = if b2.ncols() == 0 { 0.0 } else { linalg::op_norm(&((vi * vj - vj * vi) * b2)) };
                commutation.push((li, lj, r));
            } else {
                let r = if b.ncols() == 0 { 0.0 } else { linalg::op_norm(&((vi * b).adjoint() * (vj * b))) };
                orthogonality.push((li, lj, r));
            }
        }
    }

    let d = t.dim();
    let short: Vec<(&Word, CMatrix)> =
        dil.ball.iter().filter(|q| q.degree() < dil.depth).map(|q| (q, dil.v_word(q) * &dil.embed)).collect();
    let cases: Vec<(Vertex, &Word)> = g
        .vertices()
        .flat_map(|l| dil.ball.iter().filter(move |p| !p.initial_vertices().contains(l)).map(move |p| (l, p)))
        .collect();
    let (star, shift) = cases
        .par_iter()
        .map(|&(l, p)| {
            let commuting = generator_commutes(l, p, g);
            let vp = dil.v_word(p) * &dil.embed;
            let tl = t.generator(l);
            let mut star: f64 = 0.0;
            let mut shift: f64 = 0.0;
            for (q, vq) in &short {
                let lq = &dil.vgen[l] * vq;
                let kqp = kernel(t, q, p);
                let target = if commuting { &kqp * tl.adjoint() } else { linalg::zeros(d, d) };
                star = star.max(linalg::op_norm(&(lq.adjoint() * &vp - target)));
                let lifted = kernel(t, p, &multiply(&Word::generator(l, 1), q, g));
                let target = if commuting { tl * kernel(t, p, q) } else { linalg::zeros(d, d) };
                shift = shift.max(linalg::op_norm(&(lifted - target)));
            }
            (star, shift)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    NicaReport { orthogonality, commutation, star_commutation: star, shift_identity: shift }
}
