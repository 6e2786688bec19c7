//! Elements of the graph product monoid in canonical block form.
//!
//! A [`Word`] stores its unique block decomposition `b_1 b_2 ... b_m`: block
//! `b_1` collects every initial syllable, `b_2` the initial syllables of the
//! remainder, and so on. Two expressions denote the same monoid element
//! exactly when their block lists coincide, so equality, hashing and ordering
//! are structural.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{SimpleGraph, Vertex, VertexSet};

/// A factor `e_v^k` with `k >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub vertex: Vertex,
    pub exponent: u32,
}

impl Syllable {
    pub fn new(vertex: Vertex, exponent: u32) -> Self {
        Syllable { vertex, exponent }
    }
}

/// Commuting syllables of one block, keyed by vertex in graph order.
pub type Block = BTreeMap<Vertex, u32>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    blocks: Vec<Block>,
}

/// Block-vertex data of a word: `b0` holds initial vertices whose generator
/// commutes with the word, `bseq` is `B_1 .. B_m` and `c` their total size.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockVertexData {
    pub b0: VertexSet,
    pub bseq: Vec<VertexSet>,
    pub c: usize,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn generator(v: Vertex, exponent: u32) -> Self {
        let mut w = Word::identity();
        if exponent > 0 {
            w.blocks.push(Block::from([(v, exponent)]));
        }
        w
    }

    /// `e_U`, the product of the generators of a clique.
    pub fn clique(set: &VertexSet) -> Self {
        let mut w = Word::identity();
        if !set.is_empty() {
            w.blocks.push(set.iter().map(|v| (v, 1)).collect());
        }
        w
    }

    pub fn is_identity(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Syllables block by block, each block in vertex order. This is a
    /// reduced expression of the word.
    pub fn syllables(&self) -> Vec<Syllable> {
        self.blocks.iter().flat_map(|b| b.iter().map(|(&v, &k)| Syllable::new(v, k))).collect()
    }

    /// Number of syllables of a reduced expression.
    pub fn length(&self) -> usize {
        self.blocks.iter().map(Block::len).sum()
    }

    /// Total exponent sum.
    pub fn degree(&self) -> u32 {
        self.blocks.iter().flat_map(|b| b.values()).sum()
    }

    pub fn initial_vertices(&self) -> VertexSet {
        self.blocks.first().map(|b| b.keys().copied().collect()).unwrap_or_default()
    }

    /// Vertex set of block `t` (zero-based).
    pub fn block_vertices(&self, t: usize) -> VertexSet {
        self.blocks[t].keys().copied().collect()
    }

    /// Exponent of the initial syllable at `v`, if `v` is initial.
    pub fn initial_exponent(&self, v: Vertex) -> Option<u32> {
        self.blocks.first().and_then(|b| b.get(&v).copied())
    }

    /// Every vertex occurring in the word.
    pub fn support(&self) -> VertexSet {
        self.blocks.iter().flat_map(|b| b.keys().copied()).collect()
    }

    /// Appends `e_v^k` on the right and restores the block form.
    ///
    /// The syllable lands in the block right after the last block holding a
    /// vertex that does not commute with `v`; if an occurrence of `v` sits at
    /// or after that position it is amalgamated there instead.
    fn push(&mut self, v: Vertex, k: u32, g: &SimpleGraph) {
        if k == 0 {
            return;
        }
        let mut floor = 0;
        let mut last_same = None;
        for (t, block) in self.blocks.iter().enumerate() {
            if block.contains_key(&v) {
                last_same = Some(t);
            }
            if block.keys().any(|&u| u != v && !g.adjacent(u, v)) {
                floor = t + 1;
            }
        }
        match last_same {
            Some(s) if s >= floor => *self.blocks[s].get_mut(&v).unwrap() += k,
            _ if floor == self.blocks.len() => self.blocks.push(Block::from([(v, k)])),
            _ => {
                self.blocks[floor].insert(v, k);
            }
        }
    }

    /// Removes `n` from the exponent of the initial syllable at `v`.
    /// Panics if `v` is not initial or its exponent is smaller than `n`.
    fn remove_initial(&self, v: Vertex, n: u32, g: &SimpleGraph) -> Word {
        let k = self.initial_exponent(v).expect("vertex is initial");
        assert!(n <= k, "cannot remove more than the initial exponent");
        if n < k {
            let mut w = self.clone();
            *w.blocks[0].get_mut(&v).unwrap() -= n;
            return w;
        }
        let mut out = Word::identity();
        for (t, block) in self.blocks.iter().enumerate() {
            for (&u, &e) in block {
                if t > 0 || u != v {
                    out.push(u, e, g);
                }
            }
        }
        out
    }

    pub fn display<'a>(&'a self, g: &'a SimpleGraph) -> WordDisplay<'a> {
        WordDisplay { word: self, graph: g, blocks: false }
    }

    /// Like [`Word::display`] but with each block bracketed.
    pub fn display_blocks<'a>(&'a self, g: &'a SimpleGraph) -> WordDisplay<'a> {
        WordDisplay { word: self, graph: g, blocks: true }
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    graph: &'a SimpleGraph,
    blocks: bool,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return f.write_str("e");
        }
        let syl = |v: Vertex, k: u32| {
            if k == 1 {
                format!("e{}", self.graph.label(v))
            } else {
                format!("e{}^{}", self.graph.label(v), k)
            }
        };
        let parts: Vec<String> = self
            .word
            .blocks
            .iter()
            .map(|b| {
                let inner: Vec<String> = b.iter().map(|(&v, &k)| syl(v, k)).collect();
                if self.blocks {
                    format!("[{}]", inner.join(" "))
                } else {
                    inner.join(" ")
                }
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Canonical block form of the product of `syllables`.
pub fn normal_form(syllables: &[Syllable], g: &SimpleGraph) -> Word {
    let mut w = Word::identity();
    for s in syllables {
        w.push(s.vertex, s.exponent, g);
    }
    w
}

pub fn multiply(x: &Word, y: &Word, g: &SimpleGraph) -> Word {
    let mut w = x.clone();
    for s in y.syllables() {
        w.push(s.vertex, s.exponent, g);
    }
    w
}

pub fn commutes(x: &Word, y: &Word, g: &SimpleGraph) -> bool {
    multiply(x, y, g) == multiply(y, x, g)
}

/// Whether `e_v` commutes with `p`.
pub fn generator_commutes(v: Vertex, p: &Word, g: &SimpleGraph) -> bool {
    commutes(&Word::generator(v, 1), p, g)
}

/// Cancels common initial syllables until `u` and `v` share no initial
/// vertex; the result satisfies `u^{-1} v = x^{-1} y` in the graph group.
pub fn remove_common_initial(x: &Word, y: &Word, g: &SimpleGraph) -> (Word, Word) {
    let (mut u, mut v) = (x.clone(), y.clone());
    loop {
        let common = u.initial_vertices().intersection(&v.initial_vertices());
        let Some(lambda) = common.iter().next() else {
            return (u, v);
        };
        let m = u.initial_exponent(lambda).unwrap().min(v.initial_exponent(lambda).unwrap());
        u = u.remove_initial(lambda, m, g);
        v = v.remove_initial(lambda, m, g);
    }
}

/// The set `d_λ(p)`.
///
/// When `λ` is initial in `p` the whole initial `λ`-syllable is stripped to
/// form `p'`; the result is `{p'}` if `e_λ` does not commute with `p'` and
/// `{e_λ p', p'}` otherwise. When `λ` is not initial the result is `{p}` or
/// `{e_λ p, p}` by the same commutation test applied to `p`.
pub fn d_lambda(lambda: Vertex, p: &Word, g: &SimpleGraph) -> BTreeSet<Word> {
    let base = match p.initial_exponent(lambda) {
        Some(k) => p.remove_initial(lambda, k, g),
        None => p.clone(),
    };
    let mut out = BTreeSet::new();
    if generator_commutes(lambda, &base, g) {
        out.insert(multiply(&Word::generator(lambda, 1), &base, g));
    }
    out.insert(base);
    out
}

pub fn block_vertex_data(x: &Word, g: &SimpleGraph) -> BlockVertexData {
    if x.is_identity() {
        return BlockVertexData { b0: VertexSet::empty(), bseq: Vec::new(), c: 0 };
    }
    let (b0, b1): (Vec<Vertex>, Vec<Vertex>) = x.initial_vertices().iter().partition(|&v| generator_commutes(v, x, g));
    let mut bseq = vec![VertexSet::new(b1)];
    bseq.extend((1..x.num_blocks()).map(|t| x.block_vertices(t)));
    let c = bseq.iter().map(VertexSet::len).sum();
    BlockVertexData { b0: VertexSet::new(b0), bseq, c }
}

fn resolve_label(ident: &str, g: &SimpleGraph) -> Option<Vertex> {
    g.vertex(ident).or_else(|| ident.strip_prefix('e').and_then(|l| g.vertex(l)))
}

/// Parses `atom*` with `atom := IDENT ('^' UINT)?`, whitespace separated.
///
/// An identifier is first matched against the raw labels and then, with a
/// leading `e` stripped, against the labels again. A bare `e` that names no
/// vertex denotes the identity. Positions in errors are byte offsets.
pub fn parse_word(text: &str, g: &SimpleGraph) -> Result<Word> {
    let mut syllables = Vec::new();
    let mut offset = 0;
    for token in text.split_whitespace() {
        let pos = offset + text[offset..].find(token).expect("token in text");
        offset = pos + token.len();
        let (ident, exp) = match token.split_once('^') {
            Some((ident, exp)) => (ident, Some(exp)),
            None => (token, None),
        };
        if ident.is_empty() {
            return Err(Error::Syntax { pos, msg: "expected a vertex identifier".into() });
        }
        let exponent = match exp {
            None => 1,
            Some("") => return Err(Error::Syntax { pos: pos + ident.len() + 1, msg: "expected an exponent".into() }),
            Some(e) => {
                let epos = pos + ident.len() + 1;
                if e.starts_with('-') || e.starts_with('+') {
                    return Err(Error::BadExponent { pos: epos });
                }
                if !e.chars().all(|c| c.is_ascii_digit()) {
                    return Err(Error::Syntax { pos: epos, msg: format!("invalid exponent `{e}`") });
                }
                match e.parse::<u32>() {
                    Ok(0) | Err(_) => return Err(Error::BadExponent { pos: epos }),
                    Ok(k) => k,
                }
            }
        };
        match resolve_label(ident, g) {
            Some(v) => syllables.push(Syllable::new(v, exponent)),
            None if ident == "e" => {}
            None => return Err(Error::UnknownVertex { label: ident.to_string(), pos }),
        }
    }
    Ok(normal_form(&syllables, g))
}

/// All words of degree at most `depth`, ordered by degree and then by
/// normal form.
pub fn enumerate_ball(g: &SimpleGraph, depth: u32) -> Vec<Word> {
    let mut all = vec![Word::identity()];
    let mut frontier = vec![Word::identity()];
    for _ in 0..depth {
        let next: BTreeSet<Word> =
            frontier.iter().flat_map(|w| g.vertices().map(move |v| multiply(&Word::generator(v, 1), w, g))).collect();
        frontier = next.into_iter().collect();
        all.extend(frontier.iter().cloned());
    }
    all
}
