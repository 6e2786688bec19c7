//! Reduction of a finite word set to single-block words by repeated
//! application of `d_λ`.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{SimpleGraph, Vertex, VertexSet};
use crate::word::{block_vertex_data, d_lambda, Word};

/// Sum of `c(f)` over the distinct block-vertex sequences occurring in `set`.
pub fn set_potential(set: &BTreeSet<Word>, g: &SimpleGraph) -> usize {
    let mut seen: HashSet<Vec<VertexSet>> = HashSet::new();
    let mut total = 0;
    for w in set {
        let data = block_vertex_data(w, g);
        if seen.insert(data.bseq) {
            total += data.c;
        }
    }
    total
}

/// Picks `λ` as the smallest vertex of `B_1` of the first multi-block word
/// and returns `(λ, d_λ(set))`.
pub fn reduce_step(set: &BTreeSet<Word>, g: &SimpleGraph) -> Result<(Vertex, BTreeSet<Word>)> {
    let p = set.iter().find(|w| w.num_blocks() >= 2).ok_or(Error::NoMultiBlockWord)?;
    // B_1 of a multi-block word is nonempty: a second-block vertex is
    // non-adjacent to some first-block vertex.
    let lambda = block_vertex_data(p, g).bseq[0].iter().next().expect("multi-block word has nonempty B_1");
    let parts: Vec<BTreeSet<Word>> = set.par_iter().map(|w| d_lambda(lambda, w, g)).collect();
    Ok((lambda, parts.into_iter().flatten().collect()))
}

#[derive(Clone, Debug)]
pub struct ReductionStep {
    pub lambda: Vertex,
    pub input: BTreeSet<Word>,
    pub output: BTreeSet<Word>,
    pub c_before: usize,
    pub c_after: usize,
}

#[derive(Clone, Debug)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    pub final_set: BTreeSet<Word>,
}

/// Applies [`reduce_step`] until every word has at most one block.
pub fn reduce_to_single_blocks(set: &BTreeSet<Word>, g: &SimpleGraph) -> ReductionTrace {
    let mut current = set.clone();
    let mut steps = Vec::new();
    while let Ok((lambda, output)) = reduce_step(&current, g) {
        let c_before = set_potential(&current, g);
        let c_after = set_potential(&output, g);
        debug_assert!(c_after < c_before);
        steps.push(ReductionStep { lambda, input: current, output: output.clone(), c_before, c_after });
        current = output;
    }
    ReductionTrace { steps, final_set: current }
}
