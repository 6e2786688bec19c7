//! Acceptance gate: one PASS/FAIL line per criterion; exits non-zero on any
//! failure.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::process::ExitCode;
use std::time::Instant;

use graphprod::dilation::{build_truncated_dilation, verify_dilation, verify_nica, DEFAULT_CUT};
use graphprod::graph::{diamond, edge_plus_point};
use graphprod::kernel::{
    check_regular, cholesky_factor_cliques, clique_gram, gram, gram_between, psd_check, shift_diagonal,
    RegularityOptions,
};
use graphprod::linalg::{self, CMatrix};
use graphprod::propp::{
    check_property_p, default_grid, q_decomposition, synth_projection_family, taylor_identity_residual,
};
use graphprod::random::{
    random_commuting_tuple, random_regular_representation, random_representation, random_row_tuple, seeded,
};
use graphprod::reduction::{reduce_to_single_blocks, set_potential};
use graphprod::word::{multiply, normal_form, Syllable};
use graphprod::{Representation, SimpleGraph, Vertex, Word};
use rand::Rng;

const TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn regular_opts() -> RegularityOptions {
    RegularityOptions { tol: TOL, ..Default::default() }
}

fn random_word<R: Rng>(rng: &mut R, g: &SimpleGraph, max_deg: u32) -> Word {
    let target = rng.random_range(0..=max_deg);
    let mut syl = Vec::new();
    let mut deg = 0;
    while deg < target {
        let k = rng.random_range(1..=target - deg);
        syl.push(Syllable::new(rng.random_range(0..g.len()), k));
        deg += k;
    }
    normal_form(&syl, g)
}

fn criterion_1() -> Outcome {
    let g = edge_plus_point();
    let mut rng = seeded(101);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let d = rng.random_range(1..=4);
        let t = random_regular_representation(&mut rng, &g, d, 1e-6).expect("rep");
        let k = clique_gram(&t);
        let r = cholesky_factor_cliques(&t, TOL).expect("factor");
        worst = worst.max(linalg::frobenius(&(&k.data - &r.data * r.data.adjoint())));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst <= 1e-10 && secs < 1.0, format!("max ‖K[F_c] − R_c R_c*‖_F = {worst:.2e}, {secs:.3} s"))
}

/// `Π_{i∈W} (id − M_i)(I)` with `M_i(X) = T_i X T_i*`.
fn brehmer_defect(gens: &[CMatrix], subset: &[usize]) -> CMatrix {
    let d = gens[0].nrows();
    subset.iter().fold(linalg::identity(d), |x, &i| &x - &gens[i] * &x * gens[i].adjoint())
}

fn criterion_2() -> Outcome {
    let mut rng = seeded(202);
    let (mut agree, mut regular) = (0, 0);
    let total = 100;
    for k in 0..total {
        let n = 2 + k % 2;
        let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let g = SimpleGraph::complete(&labels);
        let d = rng.random_range(1..=3);
        let gens = random_commuting_tuple(&mut rng, n, d);
        let t = Representation::new(g, gens.clone(), TOL).expect("rep");
        let verdict = check_regular(&t, &regular_opts()).expect("sweep").regular;
        let oracle = (0..1usize << n).all(|mask| {
            let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let m = brehmer_defect(&gens, &subset);
            let scale = linalg::op_norm(&m).max(1.0);
            linalg::min_eigenvalue(&m) >= -TOL * scale
        });
        agree += usize::from(verdict == oracle);
        regular += usize::from(oracle);
    }
    outcome(agree == total, format!("{agree}/{total} agree ({regular} regular, {} not)", total - regular))
}

fn criterion_3() -> Outcome {
    let mut rng = seeded(303);
    let (mut agree, mut regular) = (0, 0);
    let total = 100;
    for _ in 0..total {
        let n = rng.random_range(2..=4);
        let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let d = rng.random_range(1..=3);
        let gens = random_row_tuple(&mut rng, n, d);
        let defect = gens.iter().fold(linalg::identity(d), |acc, a| acc - a * a.adjoint());
        let oracle = linalg::min_eigenvalue(&defect) >= -TOL;
        let t = Representation::new(SimpleGraph::edgeless(&labels), gens, TOL).expect("rep");
        let verdict = check_regular(&t, &regular_opts()).expect("sweep").regular;
        agree += usize::from(verdict == oracle);
        regular += usize::from(oracle);
    }
    outcome(agree == total, format!("{agree}/{total} agree ({regular} row contractions)"))
}

fn criterion_4() -> Outcome {
    let mut rng = seeded(404);
    let mut failures = Vec::new();
    let mut steps_total = 0;
    for k in 0..50 {
        let g = if k % 2 == 0 { diamond() } else { edge_plus_point() };
        let d = rng.random_range(1..=3);
        let t = random_regular_representation(&mut rng, &g, d, 0.0).expect("rep");
        let size = rng.random_range(1..=4);
        let f: BTreeSet<Word> = (0..size).map(|_| random_word(&mut rng, &g, 3)).collect();
        let trace = reduce_to_single_blocks(&f, &g);
        steps_total += trace.steps.len();
        let c0 = set_potential(&f, &g);
        let descent = trace.steps.iter().all(|s| s.c_after < s.c_before);
        let single = trace.final_set.iter().all(|w| w.num_blocks() <= 1);
        let words: Vec<Word> = f.iter().cloned().collect();
        let reduced: Vec<Word> = trace.final_set.iter().cloned().collect();
        let reduced_psd = psd_check(&gram(&t, &reduced).data, TOL).expect("hermitian").psd;
        let full_psd = psd_check(&gram(&t, &words).data, TOL).expect("hermitian").psd;
        if trace.steps.len() > c0 || !descent || !single || (reduced_psd && !full_psd) {
            failures.push(k);
        }
    }
    outcome(failures.is_empty(), format!("50 instances, {steps_total} steps, counterexamples {failures:?}"))
}

fn criterion_5() -> Outcome {
    let zero = Representation::scalars(SimpleGraph::edgeless(&["1"]), &[0.0]).expect("rep");
    let dil = build_truncated_dilation(&zero, 3, DEFAULT_CUT).expect("dilation");
    let shift = CMatrix::from_fn(4, 4, |r, k| linalg::c(if r == k + 1 { 1.0 } else { 0.0 }, 0.0));
    let formal = dil.quotient.adjoint() * &dil.vgen[0] * &dil.quotient;
    let exact = dil.gram.data == linalg::identity(4) && linalg::frobenius(&(formal - shift)) < 1e-14;

    let mut rng = seeded(505);
    let (mut compression, mut orth, mut kappa): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in 0..20 {
        let g = if k % 2 == 0 { edge_plus_point() } else { diamond() };
        let d = rng.random_range(1..=2);
        let t = random_regular_representation(&mut rng, &g, d, 0.0).expect("rep");
        let dil = build_truncated_dilation(&t, 3, DEFAULT_CUT).expect("dilation");
        let rep = verify_dilation(&dil, &t);
        let nica = verify_nica(&dil, &t);
        compression = compression.max(rep.compression);
        orth = orth.max(nica.orthogonality.iter().map(|x| x.2).fold(0.0, f64::max));
        kappa = kappa.max(rep.kappa);
    }
    outcome(
        exact && compression <= 1e-8 && orth <= 1e-8,
        format!("T=0 exact: {exact}; compression {compression:.2e}, orthogonality {orth:.2e}, max κ {kappa:.1e}"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = seeded(606);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < 100 {
        let g = if count % 2 == 0 { diamond() } else { edge_plus_point() };
        let d = rng.random_range(1..=3);
        let t = random_representation(&mut rng, &g, d).expect("rep");
        let lambda: Vertex = rng.random_range(0..g.len());
        let m = rng.random_range(1..=3u32);
        let f1: Vec<Word> = (0..rng.random_range(1..=4))
            .map(|_| random_word(&mut rng, &g, 3))
            .filter(|p| !p.initial_vertices().contains(lambda))
            .collect();
        if f1.is_empty() {
            continue;
        }
        let f2: Vec<Word> = (0..rng.random_range(1..=4)).map(|_| random_word(&mut rng, &g, 3)).collect();
        let lifted: Vec<Word> = f2.iter().map(|q| multiply(&Word::generator(lambda, m), q, &g)).collect();
        let lhs = gram_between(&t, &f1, &lifted).data;
        let rhs = shift_diagonal(&t, lambda, &f1, m).data * gram_between(&t, &f1, &f2).data;
        worst = worst.max(linalg::op_norm(&(lhs - rhs)));
        count += 1;
    }
    outcome(worst <= 1e-10, format!("100 instances, max residual {worst:.2e}"))
}

fn criterion_7() -> Outcome {
    let mut rng = seeded(707);
    let grid = default_grid(101);
    let graphs = [
        edge_plus_point(),
        diamond(),
        SimpleGraph::complete(&["1", "2"]),
        SimpleGraph::complete(&["1", "2", "3"]),
        SimpleGraph::edgeless(&["1", "2", "3"]),
    ];
    let (mut tested, mut failed) = (0, 0);
    let mut worst = f64::INFINITY;
    for k in 0..100 {
        let g = &graphs[k % graphs.len()];
        let d = rng.random_range(1..=3);
        // odd samples are shrunk only until they first become regular
        let t = if k % 2 == 1 {
            random_regular_representation(&mut rng, g, d, 0.0).expect("rep")
        } else {
            let t = random_representation(&mut rng, g, d).expect("rep");
            t.scaled(rng.random_range(0.5..1.0)).expect("rep")
        };
        if !check_regular(&t, &regular_opts()).expect("sweep").regular {
            continue;
        }
        tested += 1;
        let rep = check_property_p(&t, &grid, TOL).expect("grid");
        let min = rep.points.iter().map(|p| p.min_eigenvalue).fold(f64::INFINITY, f64::min);
        worst = worst.min(min);
        failed += usize::from(min < -1e-9);
    }
    outcome(tested > 0 && failed == 0, format!("{tested} regular reps, {failed} failing, min eigenvalue {worst:.2e}"))
}

fn criterion_8() -> Outcome {
    let mut rng = seeded(808);
    let (mut worst, mut exact): (f64, bool) = (0.0, true);
    for k in 0..50 {
        let g = if k % 2 == 0 { edge_plus_point() } else { SimpleGraph::complete(&["1", "2", "3"]) };
        let dim = rng.random_range(g.cliques().len()..=16);
        let pf = synth_projection_family(&g, dim, rng.random()).expect("family");
        for r in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let rep = taylor_identity_residual(&pf, r);
            worst = worst.max(rep.residual).max(rep.s_residual);
        }
        let sum = q_decomposition(&pf).q.iter().fold(linalg::zeros(dim, dim), |a, q| a + q);
        exact &= sum == linalg::identity(dim);
    }
    outcome(worst <= 1e-12 && exact, format!("max residual {worst:.2e}, Σ Q_m = I exactly: {exact}"))
}

fn criterion_9() -> Outcome {
    let n = linalg::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let t = Representation::new(SimpleGraph::complete(&["1", "2"]), vec![n.clone(), n], TOL).expect("rep");
    let v = check_regular(&t, &regular_opts()).expect("sweep");
    let top = v.records.iter().find(|r| r.subset == ["1", "2"]).expect("top subset");
    let pass = !v.regular && !top.pass && (top.min_eigenvalue + 1.0).abs() <= 1e-12;
    outcome(pass, format!("regular = {}, λ_min on {{1,2}} = {:.15}", v.regular, top.min_eigenvalue))
}

/// Canonical representative of the orbit of a letter sequence under swaps of
/// neighbouring letters whose vertices are adjacent.
fn orbit_min(letters: Vec<Vertex>, g: &SimpleGraph) -> Vec<Vertex> {
    let mut seen = BTreeSet::from([letters.clone()]);
    let mut queue = VecDeque::from([letters]);
    while let Some(w) = queue.pop_front() {
        for i in 0..w.len().saturating_sub(1) {
            if g.adjacent(w[i], w[i + 1]) {
                let mut s = w.clone();
                s.swap(i, i + 1);
                if seen.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
        }
    }
    seen.into_iter().next().expect("nonempty orbit")
}

fn syllable_sequences(n: usize, max_deg: u32) -> Vec<Vec<Syllable>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<(Vec<Syllable>, u32)> = vec![(Vec::new(), 0)];
    while let Some((seq, deg)) = frontier.pop() {
        for v in 0..n {
            for k in 1..=max_deg - deg {
                let mut s = seq.clone();
                s.push(Syllable::new(v, k));
                out.push(s.clone());
                frontier.push((s, deg + k));
            }
        }
    }
    out
}

fn criterion_10() -> Outcome {
    let g = diamond();
    let start = Instant::now();
    let seqs = syllable_sequences(g.len(), 4);
    let mut by_nf: HashMap<Word, Vec<Vertex>> = HashMap::new();
    let mut by_orbit: BTreeMap<Vec<Vertex>, Word> = BTreeMap::new();
    let mut mismatches = 0;
    for s in &seqs {
        let letters: Vec<Vertex> = s.iter().flat_map(|x| std::iter::repeat_n(x.vertex, x.exponent as usize)).collect();
        let orbit = orbit_min(letters, &g);
        let nf = normal_form(s, &g);
        if by_nf.entry(nf.clone()).or_insert_with(|| orbit.clone()) != &orbit {
            mismatches += 1;
        }
        if by_orbit.entry(orbit).or_insert_with(|| nf.clone()) != &nf {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mismatches == 0 && secs < 10.0,
        format!("{} sequences, {} classes, {mismatches} mismatches, {secs:.2} s", seqs.len(), by_nf.len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("clique Gram factorization", criterion_1),
        ("complete-graph commuting oracle", criterion_2),
        ("row-contraction oracle", criterion_3),
        ("reduction soundness", criterion_4),
        ("dilation compression", criterion_5),
        ("left shift identity", criterion_6),
        ("property (P) with rho = 0", criterion_7),
        ("Taylor identity", criterion_8),
        ("nilpotent negative control", criterion_9),
        ("normal form vs shuffle orbits", criterion_10),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        all &= o.pass;
        println!("{} [{:>2}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
