//! Seeded generators for test representations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::{SimpleGraph, Vertex};
use crate::kernel::{check_regular, RegularityOptions};
use crate::linalg::{self, c, CMatrix};
use crate::rep::{Representation, DEFAULT_TOL};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with real and imaginary parts uniform in `[-1, 1]`.
pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Random matrix rescaled to operator norm uniform in `(0, max_norm]`.
pub fn random_contraction<R: Rng>(rng: &mut R, d: usize, max_norm: f64) -> CMatrix {
    let m = random_matrix(rng, d, d);
    let n = linalg::op_norm(&m).max(f64::MIN_POSITIVE);
    let target = max_norm * (1.0 - rng.random::<f64>());
    m * c(target / n, 0.0)
}

fn random_disc_point<R: Rng>(rng: &mut R) -> f64 {
    rng.random::<f64>().sqrt()
}

/// `n` commuting contractions `S D_i S^{-1}` with diagonal `D_i` and a
/// non-unitary similarity `S`. Each is rescaled to a norm in `[0.5, 1]`, which
/// puts the tuple on either side of the regularity boundary.
pub fn random_commuting_tuple<R: Rng>(rng: &mut R, n: usize, d: usize) -> Vec<CMatrix> {
    let s = loop {
        let s = linalg::identity(d) + random_matrix(rng, d, d) * c(0.6, 0.0);
        let sv = s.singular_values();
        if sv.min() > 0.2 {
            break s;
        }
    };
    let s_inv = s.clone().try_inverse().expect("well-conditioned similarity");
    (0..n)
        .map(|_| {
            let diag = nalgebra::DVector::from_fn(d, |_, _| {
                let r = random_disc_point(rng);
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                c(r * theta.cos(), r * theta.sin())
            });
            let t = &s * CMatrix::from_diagonal(&diag) * &s_inv;
            let norm = linalg::op_norm(&t).max(f64::MIN_POSITIVE);
            t * c(rng.random_range(0.5..1.0) / norm, 0.0)
        })
        .collect()
}

/// `n` contractions with `‖Σ T_i T_i*‖^{1/2}` uniform in `[0.7, 1.3]`.
pub fn random_row_tuple<R: Rng>(rng: &mut R, n: usize, d: usize) -> Vec<CMatrix> {
    let raw: Vec<CMatrix> = (0..n).map(|_| random_matrix(rng, d, d)).collect();
    let sum = raw.iter().fold(linalg::zeros(d, d), |acc, a| acc + a * a.adjoint());
    let target = rng.random_range(0.7..1.3);
    let scale = target / linalg::op_norm(&sum).sqrt().max(f64::MIN_POSITIVE);
    raw.into_iter()
        .map(|a| {
            let a = a * c(scale, 0.0);
            let n = linalg::op_norm(&a);
            if n > 1.0 {
                a * c(1.0 / n, 0.0)
            } else {
                a
            }
        })
        .collect()
}

/// A valid representation of `g` on `C^d`.
///
/// Either all generators come from one commuting family, or a random
/// independent set receives arbitrary contractions while its neighbours act
/// as scalars and the remaining vertices share a commuting family.
pub fn random_representation<R: Rng>(rng: &mut R, g: &SimpleGraph, d: usize) -> Result<Representation> {
    let n = g.len();
    let mut gens = random_commuting_tuple(rng, n, d);
    if rng.random_bool(0.5) {
        let mut order: Vec<Vertex> = g.vertices().collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let mut free: Vec<Vertex> = Vec::new();
        for v in order {
            if free.iter().all(|&f| !g.adjacent(f, v)) && rng.random_bool(0.7) {
                free.push(v);
            }
        }
        for v in g.vertices() {
            if free.contains(&v) {
                gens[v] = random_contraction(rng, d, 1.0);
            } else if free.iter().any(|&f| g.adjacent(f, v)) {
                let r = rng.random::<f64>();
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                gens[v] = linalg::identity(d) * c(r * theta.cos(), r * theta.sin());
            }
        }
    }
    Representation::new(g.clone(), gens, DEFAULT_TOL)
}

/// Smallest eigenvalue over all subset defects.
pub fn regularity_margin(t: &Representation) -> Result<f64> {
    let v = check_regular(t, &RegularityOptions { override_guard: true, ..Default::default() })?;
    Ok(v.records.iter().map(|r| r.min_eigenvalue).fold(f64::INFINITY, f64::min))
}

/// Shrinks `t` by factors of `0.8` until every subset defect has smallest
/// eigenvalue at least `margin`.
pub fn shrink_to_regular(t: &Representation, margin: f64) -> Result<Representation> {
    let mut current = t.clone();
    while regularity_margin(&current)? < margin {
        current = current.scaled(0.8)?;
    }
    Ok(current)
}

/// Random representation shrunk until regular with the given margin.
pub fn random_regular_representation<R: Rng>(
    rng: &mut R,
    g: &SimpleGraph,
    d: usize,
    margin: f64,
) -> Result<Representation> {
    shrink_to_regular(&random_representation(rng, g, d)?, margin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{diamond, edge_plus_point};

    #[test]
    fn generators_are_reproducible() {
        let g = diamond();
        let a = random_representation(&mut seeded(7), &g, 3).unwrap();
        let b = random_representation(&mut seeded(7), &g, 3).unwrap();
        assert_eq!(a.generators(), b.generators());
    }

    #[test]
    fn random_reps_are_valid_on_fixture_graphs() {
        let mut rng = seeded(1);
        for _ in 0..30 {
            for g in [diamond(), edge_plus_point()] {
                let d = rng.random_range(1..=3);
                let t = random_regular_representation(&mut rng, &g, d, 1e-3).unwrap();
                assert!(regularity_margin(&t).unwrap() >= 1e-3);
            }
        }
    }

    #[test]
    fn commuting_tuples_commute_and_contract() {
        let mut rng = seeded(3);
        let ts = random_commuting_tuple(&mut rng, 3, 3);
        for a in &ts {
            assert!(linalg::op_norm(a) <= 1.0 + 1e-12);
            for b in &ts {
                assert!(linalg::op_norm(&(a * b - b * a)) < 1e-10);
            }
        }
    }
}
