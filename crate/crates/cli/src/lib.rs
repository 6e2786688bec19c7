//! Command dispatch and report formatting for the `graphprod` binary.
//!
//! Exit codes: `0` success, `1` mathematical failure, `2` input error.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use graphprod::dilation::{build_truncated_dilation, verify_dilation, verify_nica, DEFAULT_CUT};
use graphprod::kernel::{
    check_regular, cholesky_factor_cliques, clique_gram, gram, kernel, psd_check, RegularityOptions, DEFAULT_GUARD,
};
use graphprod::linalg::{self, CMatrix};
use graphprod::propp::{check_property_p, default_grid, DEFAULT_GRID};
use graphprod::random::{random_regular_representation, random_representation, seeded};
use graphprod::reduction::{reduce_to_single_blocks, set_potential};
use graphprod::rep::{matrix_to_json, DEFAULT_TOL};
use graphprod::word::block_vertex_data;
use graphprod::{parse_word, Error, OperatorMatrix, Representation, SimpleGraph, Word};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] Error),
}

impl CliError {
    /// Failed positivity is a mathematical verdict; everything else is input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(Error::NotPsd(_)) => EXIT_FALSE,
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "graphprod",
    version,
    about = "Graph products of N: normal forms, Toeplitz kernels, regularity and dilations"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Graph file: {"vertices": [..], "edges": [[a, b], ..]}.
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// Representation file: {"dim": d, "generators": {label: matrix}}.
    #[arg(long, global = true)]
    pub rep: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 2)]
    pub depth: u32,
    #[arg(long, global = true, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_GUARD)]
    pub guard: usize,
    /// Sweep all subsets even above the guard.
    #[arg(long, global = true)]
    pub override_guard: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normal form of a word.
    NormalForm { word: String },
    /// Block decomposition and block-vertex data of a word.
    Blocks { word: String },
    /// K(p, q).
    Kernel { p: String, q: String },
    /// Gram matrix K[F] of the given words and its positivity.
    Gram {
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Positivity of every subset defect Z_W.
    CheckRegular {
        /// Test only W = all vertices; not a certificate.
        #[arg(long)]
        top_only: bool,
    },
    /// Clique Gram matrix and its explicit lower-triangular factor.
    FactorCliques,
    /// Reduce a word set to single-block words.
    ReduceSet {
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Truncated dilation on the ball of degree --depth.
    Dilate,
    /// Nica-covariance residuals of the truncated dilation.
    CheckNica,
    /// Positivity of f(r) on a grid of --grid points in [0, 1].
    CheckPropertyP,
    /// Seeded random representation of --graph, written as JSON.
    RandomRep {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Shrink until every subset defect is positive semidefinite.
        #[arg(long)]
        regular: bool,
    },
}

/// Result of one command: exit code, human-readable text and JSON report.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub report: Value,
}

impl Outcome {
    pub fn render(&self, json: bool) -> String {
        if json {
            serde_json::to_string_pretty(&self.report).expect("report serialization") + "\n"
        } else {
            self.text.clone()
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_graph(cfg: &RunConfig) -> Result<SimpleGraph, CliError> {
    let path = cfg.graph.as_ref().ok_or_else(|| CliError::Usage("--graph is required".into()))?;
    Ok(SimpleGraph::from_json(&read(path)?)?)
}

fn load_rep(cfg: &RunConfig, g: &SimpleGraph) -> Result<Representation, CliError> {
    let path = cfg.rep.as_ref().ok_or_else(|| CliError::Usage("--rep is required".into()))?;
    Ok(Representation::from_json(&read(path)?, g, cfg.tol)?)
}

fn parse_all(words: &[String], g: &SimpleGraph) -> Result<Vec<Word>, CliError> {
    words.iter().map(|w| parse_word(w, g).map_err(CliError::from)).collect()
}

fn fmt_entry(re: f64, im: f64) -> String {
    if im == 0.0 {
        format!("{re:.6}")
    } else {
        format!("{re:.6}{im:+.6}i")
    }
}

fn matrix_text(m: &CMatrix) -> String {
    let cells: Vec<Vec<String>> =
        (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| fmt_entry(m[(r, c)].re, m[(r, c)].im)).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(0);
    let mut out = String::new();
    for row in cells {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        writeln!(out, "  [{}]", line.join("  ")).unwrap();
    }
    out
}

fn operator_json(m: &OperatorMatrix) -> Value {
    json!({ "rows": m.rows, "cols": m.cols, "block": m.block, "matrix": matrix_to_json(&m.data) })
}

fn set_labels(set: &BTreeSet<Word>, g: &SimpleGraph) -> Vec<String> {
    set.iter().map(|w| w.display(g).to_string()).collect()
}

/// Residual threshold for the dilation commands.
fn dilation_threshold(tol: f64, kappa: f64) -> f64 {
    1e3 * tol * kappa.max(1.0)
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let g = load_graph(cfg)?;
    let mut text = String::new();
    let mut code = EXIT_OK;
    let body: Value = match &cfg.command {
        Command::NormalForm { word } => {
            let w = parse_word(word, &g)?;
            writeln!(text, "{}", w.display(&g)).unwrap();
            json!({ "normal_form": w.display(&g).to_string(), "length": w.length(), "degree": w.degree() })
        }
        Command::Blocks { word } => {
            let w = parse_word(word, &g)?;
            let data = block_vertex_data(&w, &g);
            let bseq: Vec<String> = data.bseq.iter().map(|s| g.format_set(s)).collect();
            writeln!(text, "{}", w.display_blocks(&g)).unwrap();
            writeln!(text, "B0 = {}; B = [{}]; c = {}", g.format_set(&data.b0), bseq.join(", "), data.c).unwrap();
            json!({
                "blocks": w.display_blocks(&g).to_string(),
                "num_blocks": w.num_blocks(),
                "b0": g.format_set(&data.b0),
                "bseq": bseq,
                "c": data.c,
            })
        }
        Command::Kernel { p, q } => {
            let t = load_rep(cfg, &g)?;
            let (p, q) = (parse_word(p, &g)?, parse_word(q, &g)?);
            let k = kernel(&t, &p, &q);
            writeln!(text, "K({}, {}) =", p.display(&g), q.display(&g)).unwrap();
            text += &matrix_text(&k);
            json!({ "p": p.display(&g).to_string(), "q": q.display(&g).to_string(), "kernel": matrix_to_json(&k) })
        }
        Command::Gram { words } => {
            let t = load_rep(cfg, &g)?;
            let f = parse_all(words, &g)?;
            let m = gram(&t, &f);
            let check = psd_check(&m.data, cfg.tol)?;
            writeln!(text, "K[F] over {}:", m.rows.join(", ")).unwrap();
            text += &matrix_text(&m.data);
            writeln!(
                text,
                "min eigenvalue {:.6e}: {}",
                check.min_eigenvalue,
                if check.psd { "PSD" } else { "not PSD" }
            )
            .unwrap();
            code = if check.psd { EXIT_OK } else { EXIT_FALSE };
            json!({ "gram": operator_json(&m), "min_eigenvalue": check.min_eigenvalue, "psd": check.psd })
        }
        Command::CheckRegular { top_only } => {
            let t = load_rep(cfg, &g)?;
            let opts = RegularityOptions {
                tol: cfg.tol,
                guard: cfg.guard,
                override_guard: cfg.override_guard,
                top_only: *top_only,
            };
            let v = check_regular(&t, &opts)?;
            writeln!(text, "{:<20} {:>16}  verdict", "subset", "min eigenvalue").unwrap();
            for r in &v.records {
                let name = format!("{{{}}}", r.subset.join(","));
                writeln!(text, "{name:<20} {:>16.6e}  {}", r.min_eigenvalue, if r.pass { "pass" } else { "FAIL" })
                    .unwrap();
            }
            let verdict = match (v.regular, v.certifying) {
                (false, _) => "not regular",
                (true, true) => "regular",
                (true, false) => "top subset passes (not a certificate)",
            };
            writeln!(text, "{verdict}").unwrap();
            code = if v.regular { EXIT_OK } else { EXIT_FALSE };
            serde_json::to_value(&v).expect("verdict serialization")
        }
        Command::FactorCliques => {
            let t = load_rep(cfg, &g)?;
            let k = clique_gram(&t);
            let r = cholesky_factor_cliques(&t, cfg.tol)?;
            let residual = linalg::frobenius(&(&k.data - &r.data * r.data.adjoint()));
            writeln!(text, "cliques: {}", r.rows.join(", ")).unwrap();
            text += "K[F_c] =\n";
            text += &matrix_text(&k.data);
            text += "R_c =\n";
            text += &matrix_text(&r.data);
            writeln!(text, "‖K[F_c] − R_c R_c*‖_F = {residual:.3e}").unwrap();
            json!({ "clique_gram": operator_json(&k), "factor": operator_json(&r), "residual": residual })
        }
        Command::ReduceSet { words } => {
            let f: BTreeSet<Word> = parse_all(words, &g)?.into_iter().collect();
            let trace = reduce_to_single_blocks(&f, &g);
            writeln!(text, "{:>4}  {:>6}  {:>4}  {:>4}", "step", "lambda", "|F|", "c").unwrap();
            writeln!(text, "{:>4}  {:>6}  {:>4}  {:>4}", 0, "-", f.len(), set_potential(&f, &g)).unwrap();
            let mut steps = Vec::new();
            for (i, s) in trace.steps.iter().enumerate() {
                let label = g.label(s.lambda);
                writeln!(text, "{:>4}  {:>6}  {:>4}  {:>4}", i + 1, label, s.output.len(), s.c_after).unwrap();
                steps.push(json!({
                    "lambda": label,
                    "input": set_labels(&s.input, &g),
                    "output": set_labels(&s.output, &g),
                    "c_before": s.c_before,
                    "c_after": s.c_after,
                }));
            }
            writeln!(text, "final: {{{}}}", set_labels(&trace.final_set, &g).join(", ")).unwrap();
            json!({ "initial_potential": set_potential(&f, &g), "steps": steps, "final_set": set_labels(&trace.final_set, &g) })
        }
        Command::Dilate => {
            let t = load_rep(cfg, &g)?;
            let dil = build_truncated_dilation(&t, cfg.depth, DEFAULT_CUT)?;
            let rep = verify_dilation(&dil, &t);
            let threshold = dilation_threshold(cfg.tol, rep.kappa);
            let pass = rep.max_residual() <= threshold;
            writeln!(
                text,
                "depth {}: ball {} words, rank {}, domain rank {}",
                rep.depth, rep.ball_size, rep.rank, rep.domain_rank
            )
            .unwrap();
            writeln!(text, "gram min eigenvalue {:.3e}, kappa {:.3e}", rep.gram_min_eigenvalue, rep.kappa).unwrap();
            writeln!(text, "compression residual {:.3e}", rep.compression).unwrap();
            writeln!(text, "kernel residual      {:.3e}", rep.kernel).unwrap();
            for (l, r) in &rep.isometry {
                writeln!(text, "isometry V_{l}         {r:.3e}").unwrap();
            }
            writeln!(text, "{} (threshold {threshold:.1e})", if pass { "pass" } else { "FAIL" }).unwrap();
            code = if pass { EXIT_OK } else { EXIT_FALSE };
            json!({ "report": rep, "threshold": threshold, "pass": pass })
        }
        Command::CheckNica => {
            let t = load_rep(cfg, &g)?;
            let dil = build_truncated_dilation(&t, cfg.depth, DEFAULT_CUT)?;
            let nica = verify_nica(&dil, &t);
            let threshold = dilation_threshold(cfg.tol, dil.kappa);
            let pass = nica.max_residual() <= threshold;
            writeln!(text, "{:<14} {:<8} residual", "family", "pair").unwrap();
            for (a, b, r) in &nica.orthogonality {
                writeln!(text, "{:<14} {:<8} {r:.3e}", "orthogonal", format!("{a},{b}")).unwrap();
            }
            for (a, b, r) in &nica.commutation {
                writeln!(text, "{:<14} {:<8} {r:.3e}", "commuting", format!("{a},{b}")).unwrap();
            }
            writeln!(text, "{:<14} {:<8} {:.3e}", "star-commuting", "all", nica.star_commutation).unwrap();
            writeln!(text, "{:<14} {:<8} {:.3e}", "left shift", "all", nica.shift_identity).unwrap();
            writeln!(text, "{} (threshold {threshold:.1e})", if pass { "pass" } else { "FAIL" }).unwrap();
            code = if pass { EXIT_OK } else { EXIT_FALSE };
            json!({ "report": nica, "depth": cfg.depth, "threshold": threshold, "pass": pass })
        }
        Command::CheckPropertyP => {
            let t = load_rep(cfg, &g)?;
            let rep = check_property_p(&t, &default_grid(cfg.grid), cfg.tol)?;
            let regular = if g.len() <= cfg.guard || cfg.override_guard {
                let opts = RegularityOptions {
                    tol: cfg.tol,
                    guard: cfg.guard,
                    override_guard: cfg.override_guard,
                    top_only: false,
                };
                Some(check_regular(&t, &opts)?.regular)
            } else {
                None
            };
            writeln!(text, "{:>8} {:>16}  verdict", "r", "min eigenvalue").unwrap();
            for p in &rep.points {
                writeln!(text, "{:>8.4} {:>16.6e}  {}", p.r, p.min_eigenvalue, if p.pass { "pass" } else { "FAIL" })
                    .unwrap();
            }
            match rep.rho {
                Some(rho) => writeln!(text, "empirical rho = {rho} on a {}-point grid", rep.grid_size).unwrap(),
                None => writeln!(text, "f(1) is not PSD; no rho on this grid").unwrap(),
            }
            let regular_text = regular.map_or("not checked (guard)", |r| if r { "regular" } else { "not regular" });
            writeln!(text, "regularity: {regular_text}").unwrap();
            let holds = rep.rho.is_some_and(|r| r < 1.0 || rep.grid_size == 1);
            code = if holds { EXIT_OK } else { EXIT_FALSE };
            json!({ "report": rep, "property_p": holds, "regular": regular })
        }
        Command::RandomRep { dim, regular } => {
            if *dim == 0 {
                return Err(CliError::Usage("--dim must be positive".into()));
            }
            let mut rng = seeded(cfg.seed);
            let t = if *regular {
                random_regular_representation(&mut rng, &g, *dim, 0.0)?
            } else {
                random_representation(&mut rng, &g, *dim)?
            };
            let rep: Value = serde_json::from_str(&t.to_json()).expect("representation json");
            text = serde_json::to_string_pretty(&rep).expect("representation json") + "\n";
            rep
        }
    };
    let command = command_name(&cfg.command);
    let report = json!({ "command": command, "seed": cfg.seed, "tol": cfg.tol, "exit_code": code, "result": body });
    if !matches!(cfg.command, Command::RandomRep { .. }) {
        writeln!(text, "seed {}", cfg.seed).unwrap();
    }
    Ok(Outcome { code, text, report })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::NormalForm { .. } => "normal-form",
        Command::Blocks { .. } => "blocks",
        Command::Kernel { .. } => "kernel",
        Command::Gram { .. } => "gram",
        Command::CheckRegular { .. } => "check-regular",
        Command::FactorCliques => "factor-cliques",
        Command::ReduceSet { .. } => "reduce-set",
        Command::Dilate => "dilate",
        Command::CheckNica => "check-nica",
        Command::CheckPropertyP => "check-property-p",
        Command::RandomRep { .. } => "random-rep",
    }
}

/// Output of [`execute`]; `stderr` holds text-mode error messages.
#[derive(Debug)]
pub struct Rendered {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs a parsed configuration. Errors become a message on `stderr` in text
/// mode and an error object on `stdout` in JSON mode.
pub fn execute(cfg: &RunConfig) -> Rendered {
    match run(cfg) {
        Ok(o) => Rendered { code: o.code, stdout: o.render(cfg.json), stderr: String::new() },
        Err(e) => {
            let code = e.exit_code();
            if cfg.json {
                let v = json!({ "command": command_name(&cfg.command), "seed": cfg.seed, "exit_code": code, "error": e.to_string() });
                let stdout = serde_json::to_string_pretty(&v).expect("error serialization") + "\n";
                Rendered { code, stdout, stderr: String::new() }
            } else {
                Rendered { code, stdout: String::new(), stderr: format!("error: {e}\n") }
            }
        }
    }
}
