//! Seeded random graphs, the Θ extension-property checker, the failure-bound
//! calculator, nested balanced chains, and back-and-forth extension of
//! partial isomorphisms.
//!
//! Everything here is bit-exactly reproducible: the generator is fully
//! specified below, per-trial seeds are derived by a documented rule, and
//! parallel execution cannot change any result.

use std::fmt;

use rayon::prelude::*;

use crate::error::Error;
use crate::graph::{BipartiteGraph, PartialSidedMap, Side, VertexRef};

/// Golden-ratio increment used by the generator and the seed-derivation rule.
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The 64-bit finalizer used by [`SplitMix64`]: `z ^= z >> 30` then
/// `z *= 0xBF58476D1CE4E5B9`, `z ^= z >> 27`, `z *= 0x94D049BB133111EB`,
/// `z ^= z >> 31` (all multiplications wrapping).
pub fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    z
}

/// Deterministic 64-bit generator with a fully documented contract: state
/// advances by adding `0x9E3779B97F4A7C15` (wrapping), and each output is
/// [`mix64`] of the new state. Identical seeds give identical streams on
/// every platform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// One fair bit: the least significant bit of [`SplitMix64::next_u64`]
    /// (one full word is consumed per bit).
    pub fn next_bit(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// Uniform draw from `0..bound` by rejection sampling (no modulo bias).
    /// Panics when `bound` is zero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "next_below requires a positive bound");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % bound;
            }
        }
    }
}

/// Per-trial sub-seed rule: `mix64(master ^ mix64(index + GOLDEN))` (wrapping
/// add). Trials can therefore run in any order, or in parallel, without
/// changing what each trial sees.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index.wrapping_add(GOLDEN)))
}

/// Sample an m×n graph whose cross-type bits are independent fair coin
/// flips: cells are filled row-major, `(0,0), (0,1), …`, one generator word
/// per cell, taking each word's least significant bit.
pub fn sample_graph(m: usize, n: usize, seed: u64) -> Result<BipartiteGraph, Error> {
    if m == 0 || n == 0 {
        return Err(Error::ZeroSide);
    }
    let mut rng = SplitMix64::new(seed);
    BipartiteGraph::from_fn(m, n, |_, _| rng.next_bit())
}

/// A failing Θ instance: two disjoint vertex sets on `side` for which no
/// opposite vertex realizes cross-type `P1` toward all of `x1` and `P2`
/// toward all of `x2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaFailure {
    pub side: Side,
    pub x1: Vec<usize>,
    pub x2: Vec<usize>,
}

impl fmt::Display for ThetaFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "side {} ; X1: ", self.side)?;
        fmt_index_list(f, &self.x1)?;
        write!(f, " ; X2: ")?;
        fmt_index_list(f, &self.x2)
    }
}

fn fmt_index_list(f: &mut fmt::Formatter<'_>, set: &[usize]) -> fmt::Result {
    if set.is_empty() {
        return write!(f, "-");
    }
    for (k, i) in set.iter().enumerate() {
        if k > 0 {
            write!(f, ",")?;
        }
        write!(f, "{}", i)?;
    }
    Ok(())
}

/// Outcome of a Θ check: `ok`, or the first failing instance in the
/// documented enumeration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaWitness {
    pub ok: bool,
    pub failing: Option<ThetaFailure>,
}

impl fmt::Display for ThetaWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failing {
            None => write!(f, "ok"),
            Some(w) => write!(f, "failing: {}", w),
        }
    }
}

/// Check the extension property Θ_k: for every pair of disjoint subsets
/// `X1`, `X2` of one side, each of size at most `k`, some vertex on the
/// opposite side has cross-type `P1` to every member of `X1` and `P2` to
/// every member of `X2`. Empty sets impose no constraint, so any opposite
/// vertex satisfies them.
///
/// Instances are enumerated side `L` first, then `R`; within a side, `X1`
/// runs through ascending-index sequences in lexicographic order (prefix
/// before extension), and for each `X1`, `X2` runs through subsets of its
/// complement in the same order. The first failing instance is returned.
pub fn check_theta(g: &BipartiteGraph, k: usize) -> ThetaWitness {
    for side in [Side::L, Side::R] {
        if let Some(failing) = check_theta_side(g, k, side) {
            return ThetaWitness {
                ok: false,
                failing: Some(failing),
            };
        }
    }
    ThetaWitness {
        ok: true,
        failing: None,
    }
}

/// Per-vertex masks over the opposite side: word-packed bit sets of the
/// opposite vertices joined by a `P1` cross-type.
struct SideView {
    subset_side: usize,
    opposite_words: usize,
    full: Vec<u64>,
    p1: Vec<Vec<u64>>,
}

impl SideView {
    fn new(g: &BipartiteGraph, side: Side) -> SideView {
        let (s, o) = match side {
            Side::L => (g.left_count(), g.right_count()),
            Side::R => (g.right_count(), g.left_count()),
        };
        let words = o.div_ceil(64);
        let mut full = vec![!0u64; words];
        if o % 64 != 0 {
            full[words - 1] = (1u64 << (o % 64)) - 1;
        }
        let p1 = (0..s)
            .map(|x| {
                let mut mask = vec![0u64; words];
                for w in 0..o {
                    let bit = match side {
                        Side::L => g.bit(x, w),
                        Side::R => g.bit(w, x),
                    };
                    if bit {
                        mask[w / 64] |= 1 << (w % 64);
                    }
                }
                mask
            })
            .collect();
        SideView {
            subset_side: s,
            opposite_words: words,
            full,
            p1,
        }
    }

    fn and(&self, acc: &[u64], x: usize, complement: bool) -> Vec<u64> {
        (0..self.opposite_words)
            .map(|w| {
                let m = if complement {
                    !self.p1[x][w] & self.full[w]
                } else {
                    self.p1[x][w]
                };
                acc[w] & m
            })
            .collect()
    }
}

fn check_theta_side(g: &BipartiteGraph, k: usize, side: Side) -> Option<ThetaFailure> {
    let view = SideView::new(g, side);
    let mut x1 = Vec::new();
    let acc = view.full.clone();
    rec_x1(&view, k, side, 0, &mut x1, &acc)
}

fn rec_x1(
    view: &SideView,
    k: usize,
    side: Side,
    start: usize,
    x1: &mut Vec<usize>,
    acc: &[u64],
) -> Option<ThetaFailure> {
    let mut x2 = Vec::new();
    if let Some(f) = rec_x2(view, k, side, x1, 0, &mut x2, acc) {
        return Some(f);
    }
    if x1.len() < k {
        for v in start..view.subset_side {
            let next = view.and(acc, v, false);
            x1.push(v);
            if let Some(f) = rec_x1(view, k, side, v + 1, x1, &next) {
                return Some(f);
            }
            x1.pop();
        }
    }
    None
}

fn rec_x2(
    view: &SideView,
    k: usize,
    side: Side,
    x1: &[usize],
    start: usize,
    x2: &mut Vec<usize>,
    acc: &[u64],
) -> Option<ThetaFailure> {
    if acc.iter().all(|&w| w == 0) {
        return Some(ThetaFailure {
            side,
            x1: x1.to_vec(),
            x2: x2.clone(),
        });
    }
    if x2.len() < k {
        for v in start..view.subset_side {
            if x1.binary_search(&v).is_ok() {
                continue;
            }
            let next = view.and(acc, v, true);
            x2.push(v);
            if let Some(f) = rec_x2(view, k, side, x1, v + 1, x2, &next) {
                return Some(f);
            }
            x2.pop();
        }
    }
    None
}

/// Binomial coefficient in double precision; zero when `b > a`.
fn binom(a: usize, b: usize) -> f64 {
    if b > a {
        return 0.0;
    }
    let mut acc = 1.0;
    for i in 0..b {
        acc *= (a - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// One term of the analytic failure bound:
/// `C_m = binom(m+1, k) * binom(m+1-k, k) * (1 - 4^{-k})^(m-2k)`.
/// Small `m` below `2k` is evaluated exactly as written (the exponent goes
/// negative); binomials with too-small upper index make the term zero.
pub fn failure_bound_term(m: usize, k: usize) -> f64 {
    assert!(k >= 1, "the bound is defined for k >= 1");
    if m + 1 < k {
        return 0.0;
    }
    let b1 = binom(m + 1, k);
    let b2 = binom(m + 1 - k, k);
    if b1 == 0.0 || b2 == 0.0 {
        return 0.0;
    }
    let base = 1.0 - 0.25f64.powi(k as i32);
    let exponent = m as i64 - 2 * k as i64;
    b1 * b2 * base.powi(exponent as i32)
}

/// Ratio of consecutive terms, `C_{m+1} / C_m`, valid where the terms are
/// positive: `(1 - 4^{-k}) * (m+2) / (m+2-2k)`. Decreasing in `m`, with
/// limit `1 - 4^{-k}`; drops below 1 once `m > 2k*4^k - 2`.
fn term_ratio(m: usize, k: usize) -> f64 {
    (1.0 - 0.25f64.powi(k as i32)) * (m + 2) as f64 / ((m + 2) as f64 - (2 * k) as f64)
}

/// Upper bound on the infinite series `Σ_{m ≥ m0} 4·C_m`: at least `terms`
/// exact terms starting at `m0`, automatically extended past the point where
/// the term ratio drops safely below 1, then closed with the geometric tail
/// `4·C_t / (1 - ratio(t))` — valid because the ratio decreases, so every
/// later ratio is at most `ratio(t)`.
pub fn bound_tail_sum(m0: usize, k: usize, terms: usize) -> f64 {
    assert!(k >= 1, "the bound is defined for k >= 1");
    let mut sum = 0.0;
    let mut m = m0;
    let exact_end = m0.saturating_add(terms);
    while m < exact_end {
        sum += 4.0 * failure_bound_term(m, k);
        m += 1;
    }
    // Dominance point: ratio < 1 strictly after 2k*4^k - 2; going to twice
    // that keeps the closing geometric factor within a small constant of
    // the true tail.
    let dominance = 4 * k * 4usize.pow(k as u32);
    while m < dominance || term_ratio(m, k) >= 1.0 {
        sum += 4.0 * failure_bound_term(m, k);
        m += 1;
    }
    let r = term_ratio(m, k);
    sum + 4.0 * failure_bound_term(m, k) / (1.0 - r)
}

/// Side sizes of a balanced total: the left side receives the extra vertex
/// on odd totals, `(ceil(t/2), floor(t/2))`.
pub fn balanced_split(total: usize) -> (usize, usize) {
    (total.div_ceil(2), total / 2)
}

/// Monte Carlo estimate of how often Θ_k fails on balanced random graphs of
/// a given total size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FailureEstimate {
    pub failures: u64,
    pub trials: u64,
    /// Failure fraction in `[0, 1]`.
    pub rate: f64,
    /// Normal-approximation 95% half-width, `1.96 * sqrt(rate(1-rate)/trials)`.
    pub ci95: f64,
}

impl fmt::Display for FailureEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{} failures ; rate {:.6} ; ci95 {:.6}",
            self.failures, self.trials, self.rate, self.ci95
        )
    }
}

/// Estimate the Θ_k failure rate over `trials` independent samples at the
/// balanced split of `n_total`. Trial `i` uses [`derive_seed`]`(seed, i)`,
/// so results are identical regardless of thread count or schedule.
pub fn estimate_theta_failure(
    n_total: usize,
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<FailureEstimate, Error> {
    if n_total < 2 {
        return Err(Error::ZeroSide);
    }
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    let (l, r) = balanced_split(n_total);
    let failures = (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let g = sample_graph(l, r, derive_seed(seed, i)).expect("sides are positive");
            !check_theta(&g, k).ok
        })
        .count() as u64;
    let rate = failures as f64 / trials as f64;
    let ci95 = 1.96 * (rate * (1.0 - rate) / trials as f64).sqrt();
    Ok(FailureEstimate {
        failures,
        trials,
        rate,
        ci95,
    })
}

/// Parameters for a nested chain of balanced graphs: totals run
/// `2 ..= max_size`, sides split by [`balanced_split`], all bits drawn once
/// from the stream seeded with `seed`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainSpec {
    pub max_size: usize,
    pub seed: u64,
}

impl ChainSpec {
    /// Side sizes at a given total.
    pub fn side_sizes(total: usize) -> (usize, usize) {
        balanced_split(total)
    }
}

/// Build the nested chain: element `i` is the graph of total size `i + 2`,
/// and each graph is the induced prefix subgraph of every later one.
///
/// Vertices are appended one at a time — odd totals add a left vertex, even
/// totals a right vertex. A new left vertex `a` fills cells `(a, 0..r)` in
/// ascending column order; a new right vertex `b` fills `(0..l, b)` in
/// ascending row order; each cell consumes one stream word (LSB), exactly as
/// in [`sample_graph`]'s per-cell rule.
pub fn build_chain(spec: &ChainSpec) -> Result<Vec<BipartiteGraph>, Error> {
    if spec.max_size < 2 {
        return Err(Error::TooSmall(format!(
            "chain needs total size at least 2, got {}",
            spec.max_size
        )));
    }
    let mut rng = SplitMix64::new(spec.seed);
    let (max_l, max_r) = balanced_split(spec.max_size);
    let mut bits = vec![vec![false; max_r]; max_l];
    let (mut l, mut r) = (0usize, 0usize);
    let mut out = Vec::with_capacity(spec.max_size - 1);
    for total in 1..=spec.max_size {
        if total % 2 == 1 {
            for b in 0..r {
                bits[l][b] = rng.next_bit();
            }
            l += 1;
        } else {
            for a in 0..l {
                bits[a][r] = rng.next_bit();
            }
            r += 1;
        }
        if total >= 2 {
            out.push(BipartiteGraph::from_fn(l, r, |a, b| bits[a][b]).expect("sides positive"));
        }
    }
    Ok(out)
}

/// Extend a partial isomorphism of `g` onto itself by one source vertex `v`:
/// returns the extension through the least-index target on `v`'s side that
/// is not yet used and keeps every mapped cross-type equal, or `None` when
/// no such target exists. The input map must be a valid partial isomorphism
/// with `v` unmapped.
pub fn extend_partial_iso(
    g: &BipartiteGraph,
    f: &PartialSidedMap,
    v: VertexRef,
) -> Result<Option<PartialSidedMap>, Error> {
    if v.index >= g.side_count(v.side) {
        return Err(Error::OutOfRange(format!(
            "vertex {} in a {}x{} graph",
            v,
            g.left_count(),
            g.right_count()
        )));
    }
    if f.contains_source(v) {
        return Err(Error::AlreadyMapped(v.to_string()));
    }
    if !f.is_partial_isomorphism(g)? {
        return Err(Error::NotPartialIso(
            "the given partial map does not preserve cross-types".into(),
        ));
    }
    let side_len = g.side_count(v.side);
    'cand: for w in 0..side_len {
        if f.contains_target(VertexRef { side: v.side, index: w }) {
            continue;
        }
        let opposite: Vec<(usize, usize)> = f.pairs(v.side.opposite()).collect();
        for (from, to) in opposite {
            let (src, dst) = match v.side {
                Side::L => (g.bit(v.index, from), g.bit(w, to)),
                Side::R => (g.bit(from, v.index), g.bit(to, w)),
            };
            if src != dst {
                continue 'cand;
            }
        }
        let mut extended = f.clone();
        extended
            .insert(v.side, v.index, w)
            .expect("candidate was validated fresh");
        return Ok(Some(extended));
    }
    Ok(None)
}
