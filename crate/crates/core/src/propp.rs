//! Property (P): positivity of `f(r) = Σ_U (−1)^{|U|} r^{|U|} T_U T_U*` on
//! `[ρ, 1]`, and the projection-family identities behind it.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{SimpleGraph, VertexSet};
use crate::kernel::psd_check;
use crate::linalg::{self, c, CMatrix};
use crate::random::seeded;
use crate::rep::Representation;

pub const DEFAULT_GRID: usize = 101;

/// `k` evenly spaced points from `0` to `1`; `{0}` when `k = 1`.
pub fn default_grid(k: usize) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..k).map(|i| i as f64 / (k - 1) as f64).collect(),
    }
}

fn sign(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn f_within(t: &Representation, within: &VertexSet, r: f64) -> CMatrix {
    t.graph().cliques_within(within).iter().fold(linalg::zeros(t.dim(), t.dim()), |acc, u| {
        let tu = t.evaluate_set(u);
        acc + &tu * tu.adjoint() * c(sign(u.len()) * r.powi(u.len() as i32), 0.0)
    })
}

/// `f(r)` summed over all cliques.
pub fn f_poly(t: &Representation, r: f64) -> CMatrix {
    f_within(t, &t.graph().all_vertices(), r)
}

#[derive(Clone, Debug, Serialize)]
pub struct GridPoint {
    pub r: f64,
    pub min_eigenvalue: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyPReport {
    pub tol: f64,
    pub grid_size: usize,
    pub points: Vec<GridPoint>,
    /// Smallest grid point from which every later point passes; `None` when
    /// the largest point fails.
    pub rho: Option<f64>,
}

impl PropertyPReport {
    pub fn all_pass(&self) -> bool {
        self.points.iter().all(|p| p.pass)
    }
}

/// Evaluates `f` on the grid, sorted ascending.
pub fn check_property_p(t: &Representation, grid: &[f64], tol: f64) -> Result<PropertyPReport> {
    if let Some(bad) = grid.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(Error::Malformed(format!("grid point {bad} outside [0, 1]")));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let points = sorted
        .par_iter()
        .map(|&r| {
            let check = psd_check(&f_poly(t, r), tol)?;
            Ok(GridPoint { r, min_eigenvalue: check.min_eigenvalue, pass: check.psd })
        })
        .collect::<Result<Vec<_>>>()?;
    let tail = points.iter().rev().take_while(|p| p.pass).count();
    let rho = (tail > 0).then(|| points[points.len() - tail].r);
    Ok(PropertyPReport { tol, grid_size: points.len(), points, rho })
}

/// Commuting orthogonal projections with `P_i P_j = 0` for non-adjacent
/// `i ≠ j`.
#[derive(Clone, Debug)]
pub struct ProjectionFamily {
    graph: SimpleGraph,
    dim: usize,
    projections: Vec<CMatrix>,
}

impl ProjectionFamily {
    pub fn new(graph: SimpleGraph, projections: Vec<CMatrix>, tol: f64) -> Result<Self> {
        if projections.len() != graph.len() {
            return Err(Error::InvalidProjections(format!(
                "{} projections for {} vertices",
                projections.len(),
                graph.len()
            )));
        }
        let dim = projections.first().map_or(1, CMatrix::nrows);
        let bad = |what: &str, v: usize| Error::InvalidProjections(format!("{what} at vertex `{}`", graph.label(v)));
        for (v, p) in projections.iter().enumerate() {
            if p.nrows() != dim || p.ncols() != dim {
                return Err(bad("wrong shape", v));
            }
            if linalg::op_norm(&(p - p.adjoint())) > tol || linalg::op_norm(&(p * p - p)) > tol {
                return Err(bad("not an orthogonal projection", v));
            }
        }
        for i in graph.vertices() {
            for j in graph.vertices().filter(|&j| j > i) {
                let (a, b) = (&projections[i], &projections[j]);
                if linalg::op_norm(&(a * b - b * a)) > tol {
                    return Err(bad("non-commuting pair", i));
                }
                if !graph.adjacent(i, j) && linalg::op_norm(&(a * b)) > tol {
                    return Err(bad("overlapping non-adjacent pair", i));
                }
            }
        }
        Ok(ProjectionFamily { graph, dim, projections })
    }

    /// Diagonal 0/1 projections with the given index supports.
    pub fn from_supports(graph: SimpleGraph, dim: usize, supports: &[Vec<usize>]) -> Result<Self> {
        if let Some(&k) = supports.iter().flatten().find(|&&k| k >= dim) {
            return Err(Error::InvalidProjections(format!("support index {k} out of range for dim {dim}")));
        }
        let projections = supports
            .iter()
            .map(|s| CMatrix::from_fn(dim, dim, |r, k| c(if r == k && s.contains(&r) { 1.0 } else { 0.0 }, 0.0)))
            .collect();
        ProjectionFamily::new(graph, projections, 0.0)
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn projections(&self) -> &[CMatrix] {
        &self.projections
    }

    /// `P_U`, the identity for `U = ∅`.
    pub fn product(&self, set: &VertexSet) -> CMatrix {
        set.iter().fold(linalg::identity(self.dim), |acc, v| acc * &self.projections[v])
    }

    /// `Σ_{cliques U} (−1)^{|U|} r^{|U|} P_U`.
    pub fn f(&self, r: f64) -> CMatrix {
        self.graph.cliques().iter().fold(linalg::zeros(self.dim, self.dim), |acc, u| {
            acc + self.product(u) * c(sign(u.len()) * r.powi(u.len() as i32), 0.0)
        })
    }
}

/// Random diagonal family on `C^dim`: each basis index is assigned a clique,
/// every clique at least once, and `P_i` is supported on the indices whose
/// clique contains `i`.
pub fn synth_projection_family(g: &SimpleGraph, dim: usize, seed: u64) -> Result<ProjectionFamily> {
    let cliques = g.cliques();
    if dim < cliques.len() {
        return Err(Error::InvalidProjections(format!("dim {dim} cannot realise all {} cliques", cliques.len())));
    }
    let mut rng = seeded(seed);
    let mut assigned: Vec<usize> =
        (0..dim).map(|k| if k < cliques.len() { k } else { rng.random_range(0..cliques.len()) }).collect();
    for i in (1..dim).rev() {
        assigned.swap(i, rng.random_range(0..=i));
    }
    let supports: Vec<Vec<usize>> =
        g.vertices().map(|v| (0..dim).filter(|&k| cliques[assigned[k]].contains(v)).collect()).collect();
    ProjectionFamily::from_supports(g.clone(), dim, &supports)
}

#[derive(Clone, Debug)]
pub struct QDecomposition {
    /// `R_U = P_U Π_{i∉U} (I − P_i)` for every `U ⊆ Λ`, by increasing mask.
    pub r: Vec<(VertexSet, CMatrix)>,
    /// `Q_m = Σ_{|U|=m} R_U` for `m = 0..=|Λ|`.
    pub q: Vec<CMatrix>,
}

pub fn q_decomposition(pf: &ProjectionFamily) -> QDecomposition {
    let n = pf.graph.len();
    let d = pf.dim;
    let r: Vec<(VertexSet, CMatrix)> = (0..1u64 << n)
        .map(|mask| {
            let u = VertexSet::from_mask(mask);
            let m = pf.graph.vertices().fold(linalg::identity(d), |acc, i| {
                let p = &pf.projections[i];
                if u.contains(i) {
                    acc * p
                } else {
                    acc * (linalg::identity(d) - p)
                }
            });
            (u, m)
        })
        .collect();
    let mut q = vec![linalg::zeros(d, d); n + 1];
    for (u, m) in &r {
        q[u.len()] += m;
    }
    QDecomposition { r, q }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct TaylorReport {
    pub r: f64,
    /// `‖f(r) − Σ_m (−1)^m (r−1)^m Q_m‖`.
    pub residual: f64,
    /// `max_m ‖S_m − Q_m‖`.
    pub s_residual: f64,
}

pub fn taylor_identity_residual(pf: &ProjectionFamily, r: f64) -> TaylorReport {
    let dec = q_decomposition(pf);
    let d = pf.dim;
    let expansion = dec
        .q
        .iter()
        .enumerate()
        .fold(linalg::zeros(d, d), |acc, (m, q)| acc + q * c(sign(m) * (r - 1.0).powi(m as i32), 0.0));
    let residual = linalg::op_norm(&(pf.f(r) - expansion));
    let cliques = pf.graph.cliques();
    let s_residual = (0..dec.q.len())
        .map(|m| {
            let s = cliques.iter().filter(|u| u.len() >= m).fold(linalg::zeros(d, d), |acc, u| {
                acc + pf.product(u) * c(sign(u.len() - m) * binomial(u.len(), m), 0.0)
            });
            linalg::op_norm(&(s - &dec.q[m]))
        })
        .fold(0.0, f64::max);
    TaylorReport { r, residual, s_residual }
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaReport {
    /// `max_{i, r} ‖Δ_Λ(r) − Δ_{W_i}(r) + r T_i Δ_{W_i}(r) T_i*‖`, `W_i = Λ∖{i}`.
    pub identity_residual: f64,
    /// `Δ_Λ(r) ⪰ 0` at every grid point.
    pub top_psd: bool,
    /// `Δ_W(r) ⪰ 0` for every `W` and every grid point.
    pub all_subsets_psd: bool,
    /// Subsets (by label) with a failing grid point.
    pub failing_subsets: Vec<Vec<String>>,
}

/// Checks the one-vertex recursion for `Δ_W(r)` on a complete graph and
/// whether positivity at the top propagates to all subsets on the grid.
pub fn delta_propagation_check(t: &Representation, grid: &[f64], tol: f64) -> Result<DeltaReport> {
    let g = t.graph();
    if !g.is_complete() {
        return Err(Error::NotComplete);
    }
    let all = g.all_vertices();
    let mut identity_residual: f64 = 0.0;
    for &r in grid {
        let top = f_within(t, &all, r);
        for i in g.vertices() {
            let w = all.difference(&VertexSet::new(vec![i]));
            let dw = f_within(t, &w, r);
            let ti = t.generator(i);
            let rhs = &dw - ti * &dw * ti.adjoint() * c(r, 0.0);
            identity_residual = identity_residual.max(linalg::op_norm(&(&top - rhs)));
        }
    }
    let mut top_psd = true;
    let mut failing_subsets = Vec::new();
    for mask in 0..1u64 << g.len() {
        let w = VertexSet::from_mask(mask);
        let mut ok = true;
        for &r in grid {
            ok &= psd_check(&f_within(t, &w, r), tol)?.psd;
        }
        if w == all {
            top_psd = ok;
        }
        if !ok {
            failing_subsets.push(w.iter().map(|v| g.label(v).to_string()).collect());
        }
    }
    Ok(DeltaReport { identity_residual, top_psd, all_subsets_psd: failing_subsets.is_empty(), failing_subsets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::edge_plus_point;
    use crate::kernel::z_matrix;

    fn pair(a: f64, b: f64) -> Representation {
        Representation::scalars(SimpleGraph::edgeless(&["1", "2"]), &[a, b]).unwrap()
    }

    #[test]
    fn f_poly_examples() {
        let t = Representation::scalars(edge_plus_point(), &[0.5, 0.5, 0.7]).unwrap();
        assert_eq!(f_poly(&t, 0.0), linalg::identity(1));
        assert!(linalg::op_norm(&(f_poly(&t, 1.0) - z_matrix(&t, &t.graph().all_vertices()))) == 0.0);
        assert!((f_poly(&pair(0.8, 0.8), 0.7)[(0, 0)].re - 0.104).abs() < 1e-12);
    }

    #[test]
    fn property_p_examples() {
        let grid = default_grid(11);
        let t = Representation::scalars(edge_plus_point(), &[0.5, 0.5, 0.7]).unwrap();
        let rep = check_property_p(&t, &grid, 1e-9).unwrap();
        assert!(rep.all_pass() && rep.rho == Some(0.0));

        let rep = check_property_p(&pair(0.8, 0.8), &grid, 1e-9).unwrap();
        let last = rep.points.last().unwrap();
        assert!(!last.pass && (last.min_eigenvalue + 0.28).abs() < 1e-12);
        assert!(rep.points.iter().filter(|p| p.r <= 0.7 + 1e-12).all(|p| p.pass));
        assert_eq!(rep.rho, None);

        let rep = check_property_p(&pair(0.8, 0.8), &[0.0], 1e-9).unwrap();
        assert!(rep.all_pass());
        assert!(check_property_p(&pair(0.1, 0.1), &[1.5], 1e-9).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let g = default_grid(DEFAULT_GRID);
        assert_eq!(g.len(), 101);
        assert_eq!((g[0], g[100]), (0.0, 1.0));
        assert!((g[50] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn trivial_families() {
        let g = SimpleGraph::complete(&["1", "2", "3"]);
        let zero = ProjectionFamily::from_supports(g.clone(), 4, &[vec![], vec![], vec![]]).unwrap();
        let dec = q_decomposition(&zero);
        assert_eq!(dec.q[0], linalg::identity(4));
        assert!(dec.q[1..].iter().all(|q| q == &linalg::zeros(4, 4)));
        for r in [0.0, 0.4, 1.0] {
            assert_eq!(taylor_identity_residual(&zero, r).residual, 0.0);
        }
        let full: Vec<Vec<usize>> = vec![(0..4).collect(); 3];
        let full = ProjectionFamily::from_supports(g, 4, &full).unwrap();
        let dec = q_decomposition(&full);
        assert_eq!(dec.q[3], linalg::identity(4));
        assert!(dec.q[..3].iter().all(|q| q == &linalg::zeros(4, 4)));
    }

    #[test]
    fn synthetic_family_respects_graph() {
        let g = edge_plus_point();
        let pf = synth_projection_family(&g, 8, 42).unwrap();
        let p = pf.projections();
        assert_eq!(&p[0] * &p[2], linalg::zeros(8, 8));
        assert_eq!(&p[1] * &p[2], linalg::zeros(8, 8));
        let dec = q_decomposition(&pf);
        let sum = dec.q.iter().fold(linalg::zeros(8, 8), |a, q| a + q);
        assert_eq!(sum, linalg::identity(8));
        for (m, a) in dec.q.iter().enumerate() {
            assert_eq!(a * a, *a);
            for b in &dec.q[m + 1..] {
                assert_eq!(a * b, linalg::zeros(8, 8));
            }
        }
        let rep = taylor_identity_residual(&pf, 1.0);
        assert_eq!(rep.residual, 0.0);
        assert_eq!(rep.s_residual, 0.0);
        assert!(synth_projection_family(&g, 4, 1).is_err());
    }

    #[test]
    fn rejects_invalid_families() {
        let g = edge_plus_point();
        let overlapping = ProjectionFamily::from_supports(g.clone(), 2, &[vec![0], vec![], vec![0]]);
        assert!(matches!(overlapping, Err(Error::InvalidProjections(_))));
        let not_proj = vec![linalg::scalar(0.5), linalg::scalar(0.0), linalg::scalar(0.0)];
        assert!(ProjectionFamily::new(g, not_proj, 1e-12).is_err());
    }

    #[test]
    fn delta_examples() {
        let k2 = Representation::scalars(SimpleGraph::complete(&["1", "2"]), &[0.6, 0.6]).unwrap();
        let rep = delta_propagation_check(&k2, &[0.2, 0.5, 0.9], 1e-9).unwrap();
        assert!(rep.identity_residual < 1e-15);
        assert!(rep.top_psd && rep.all_subsets_psd);
        let rep = delta_propagation_check(&k2, &[0.0], 1e-9).unwrap();
        assert!(rep.all_subsets_psd);
        assert!(matches!(delta_propagation_check(&pair(0.1, 0.1), &[0.5], 1e-9), Err(Error::NotComplete)));
    }
}
