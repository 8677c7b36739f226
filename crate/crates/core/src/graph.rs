//! Finite bipartite graphs whose left-right pairs each carry one of two
//! cross-types, plus side-preserving maps between them and exact isomorphism
//! search.
//!
//! The text format for a graph is strict: a header line `m n` (ASCII decimal
//! counts separated by a single space), then `m` rows of exactly `n`
//! characters from `{'0','1'}` with `'1'` meaning cross-type `P1`, every line
//! newline-terminated, nothing else. `Display` emits it and `FromStr` rejects
//! any deviation with a line and column.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::bits::BitMatrix;
use crate::error::{Error, TextError};

/// The two vertex classes of a bipartite graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::L => write!(f, "L"),
            Side::R => write!(f, "R"),
        }
    }
}

/// A vertex named by side and 0-based index within that side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexRef {
    pub side: Side,
    pub index: usize,
}

impl VertexRef {
    pub fn left(index: usize) -> Self {
        VertexRef {
            side: Side::L,
            index,
        }
    }

    pub fn right(index: usize) -> Self {
        VertexRef {
            side: Side::R,
            index,
        }
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.side, self.index)
    }
}

/// Cross-type of a left-right pair. `P1` is the bit value 1 in the text
/// formats; `P2` is 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CrossType {
    P1,
    P2,
}

impl CrossType {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            CrossType::P1
        } else {
            CrossType::P2
        }
    }

    pub fn bit(self) -> bool {
        matches!(self, CrossType::P1)
    }
}

impl fmt::Display for CrossType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossType::P1 => write!(f, "P1"),
            CrossType::P2 => write!(f, "P2"),
        }
    }
}

/// A left-right vertex pair. Construction enforces that the endpoints sit on
/// the correct sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CrossEdge {
    left: VertexRef,
    right: VertexRef,
}

impl CrossEdge {
    pub fn new(left: VertexRef, right: VertexRef) -> Result<Self, Error> {
        if left.side != Side::L || right.side != Side::R {
            return Err(Error::DimensionMismatch(format!(
                "cross edge endpoints must be (L, R), got ({}, {})",
                left, right
            )));
        }
        Ok(CrossEdge { left, right })
    }

    /// Edge between left index `a` and right index `b`.
    pub fn between(a: usize, b: usize) -> Self {
        CrossEdge {
            left: VertexRef::left(a),
            right: VertexRef::right(b),
        }
    }

    pub fn left(&self) -> VertexRef {
        self.left
    }

    pub fn right(&self) -> VertexRef {
        self.right
    }
}

/// A finite bipartite graph: every (left, right) pair carries exactly one
/// cross-type, stored as one bit (`true` = `P1`). Both sides are nonempty.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BipartiteGraph {
    left_count: usize,
    right_count: usize,
    cross: BitMatrix,
}

impl BipartiteGraph {
    /// Build from a row-major bit slice of length `left_count * right_count`.
    pub fn new(left_count: usize, right_count: usize, bits: &[bool]) -> Result<Self, Error> {
        if left_count == 0 || right_count == 0 {
            return Err(Error::ZeroSide);
        }
        let expected = left_count
            .checked_mul(right_count)
            .ok_or_else(|| Error::DimensionMismatch("side product overflows".into()))?;
        if bits.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "expected {} cells for a {}x{} graph, got {}",
                expected,
                left_count,
                right_count,
                bits.len()
            )));
        }
        let cross = BitMatrix::from_fn(left_count, right_count, |a, b| bits[a * right_count + b]);
        Ok(BipartiteGraph {
            left_count,
            right_count,
            cross,
        })
    }

    /// Build by evaluating `f(a, b)` for every cell.
    pub fn from_fn(
        left_count: usize,
        right_count: usize,
        f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self, Error> {
        if left_count == 0 || right_count == 0 {
            return Err(Error::ZeroSide);
        }
        Ok(BipartiteGraph {
            left_count,
            right_count,
            cross: BitMatrix::from_fn(left_count, right_count, f),
        })
    }

    pub fn left_count(&self) -> usize {
        self.left_count
    }

    pub fn right_count(&self) -> usize {
        self.right_count
    }

    pub fn side_count(&self, side: Side) -> usize {
        match side {
            Side::L => self.left_count,
            Side::R => self.right_count,
        }
    }

    /// Raw cross-type bit for left `a`, right `b`. Panics when out of range;
    /// use [`BipartiteGraph::cross_type`] for a checked lookup.
    #[inline]
    pub fn bit(&self, a: usize, b: usize) -> bool {
        self.cross.get(a, b)
    }

    pub fn cross_type(&self, e: &CrossEdge) -> Result<CrossType, Error> {
        let a = e.left().index;
        let b = e.right().index;
        if a >= self.left_count || b >= self.right_count {
            return Err(Error::OutOfRange(format!(
                "edge ({}, {}) in a {}x{} graph",
                e.left(),
                e.right(),
                self.left_count,
                self.right_count
            )));
        }
        Ok(CrossType::from_bit(self.bit(a, b)))
    }

    /// Subgraph induced by the given index sets. Inputs are treated as sets:
    /// rows and columns of the result follow ascending index order and
    /// duplicates collapse. Empty sets are rejected with `ZeroSide`.
    pub fn induced_subgraph(&self, left_set: &[usize], right_set: &[usize]) -> Result<Self, Error> {
        let lefts = normalize_index_set(left_set, self.left_count, "left")?;
        let rights = normalize_index_set(right_set, self.right_count, "right")?;
        BipartiteGraph::from_fn(lefts.len(), rights.len(), |a, b| {
            self.bit(lefts[a], rights[b])
        })
    }

    /// Number of `P1` cross-edges.
    pub fn p1_count(&self) -> usize {
        self.cross.count_ones()
    }

    /// The graph with every cross-type exchanged.
    pub fn flip_all(&self) -> Self {
        let mut cross = self.cross.clone();
        cross.toggle_all();
        BipartiteGraph {
            left_count: self.left_count,
            right_count: self.right_count,
            cross,
        }
    }
}

fn normalize_index_set(set: &[usize], bound: usize, side: &str) -> Result<Vec<usize>, Error> {
    if set.is_empty() {
        return Err(Error::ZeroSide);
    }
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&bad) = v.iter().find(|&&i| i >= bound) {
        return Err(Error::OutOfRange(format!(
            "{} index {} with side size {}",
            side, bad, bound
        )));
    }
    Ok(v)
}

impl fmt::Display for BipartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_grid(f, self.left_count, self.right_count, |a, b| self.bit(a, b))
    }
}

impl fmt::Debug for BipartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BipartiteGraph[\n{}]", self)
    }
}

impl FromStr for BipartiteGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (rows, cols, bits) = parse_grid(s)?;
        if rows == 0 || cols == 0 {
            return Err(Error::ZeroSide);
        }
        Ok(BipartiteGraph {
            left_count: rows,
            right_count: cols,
            cross: bits,
        })
    }
}

pub(crate) fn render_grid(
    f: &mut fmt::Formatter<'_>,
    rows: usize,
    cols: usize,
    mut get: impl FnMut(usize, usize) -> bool,
) -> fmt::Result {
    writeln!(f, "{} {}", rows, cols)?;
    for r in 0..rows {
        for c in 0..cols {
            write!(f, "{}", if get(r, c) { '1' } else { '0' })?;
        }
        writeln!(f)?;
    }
    Ok(())
}

/// Strict parser for the grid text format shared by graphs and flip matrices.
pub(crate) fn parse_grid(s: &str) -> Result<(usize, usize, BitMatrix), TextError> {
    let bytes = s.as_bytes();
    let mut pos = 0;

    let (rows, p) = parse_count(bytes, pos, 1, 1)?;
    pos = p;
    if pos >= bytes.len() || bytes[pos] != b' ' {
        return Err(TextError::new(1, pos + 1, "expected a single space"));
    }
    pos += 1;
    let (cols, p) = parse_count(bytes, pos, 1, pos + 1)?;
    pos = p;
    if pos >= bytes.len() || bytes[pos] != b'\n' {
        return Err(TextError::new(1, pos + 1, "expected newline after header"));
    }
    pos += 1;

    let words_per_row = cols.div_ceil(64);
    let mut words: Vec<u64> = Vec::new();
    for r in 0..rows {
        let line = r + 2;
        let row_base = words.len();
        words.resize(row_base + words_per_row, 0);
        for c in 0..cols {
            match bytes.get(pos) {
                Some(b'1') => words[row_base + c / 64] |= 1 << (c % 64),
                Some(b'0') => {}
                Some(b'\n') => {
                    return Err(TextError::new(
                        line,
                        c + 1,
                        format!("row has {} cells, expected {}", c, cols),
                    ))
                }
                Some(_) => {
                    return Err(TextError::new(line, c + 1, "expected '0' or '1'"));
                }
                None => {
                    return Err(TextError::new(line, c + 1, "unexpected end of input"));
                }
            }
            pos += 1;
        }
        match bytes.get(pos) {
            Some(b'\n') => pos += 1,
            Some(b'0') | Some(b'1') => {
                return Err(TextError::new(
                    line,
                    cols + 1,
                    format!("row has more than {} cells", cols),
                ))
            }
            Some(_) => {
                return Err(TextError::new(line, cols + 1, "expected newline"));
            }
            None => {
                return Err(TextError::new(line, cols + 1, "unexpected end of input"));
            }
        }
    }
    if pos != bytes.len() {
        return Err(TextError::new(
            rows + 2,
            1,
            "unexpected content after final row",
        ));
    }
    let mut m = BitMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            if words[r * words_per_row + c / 64] >> (c % 64) & 1 == 1 {
                m.set(r, c, true);
            }
        }
    }
    Ok((rows, cols, m))
}

fn parse_count(
    bytes: &[u8],
    start: usize,
    line: usize,
    col: usize,
) -> Result<(usize, usize), TextError> {
    let mut pos = start;
    let mut digits = 0;
    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
        pos += 1;
        digits += 1;
    }
    if digits == 0 {
        return Err(TextError::new(line, col, "expected a decimal count"));
    }
    let text = std::str::from_utf8(&bytes[start..pos]).unwrap();
    if text.len() > 1 && text.starts_with('0') {
        return Err(TextError::new(line, col, "leading zeros are not allowed"));
    }
    let value: usize = text
        .parse()
        .map_err(|_| TextError::new(line, col, "count too large"))?;
    Ok((value, pos))
}

/// A side-preserving injective map between two graphs' vertex sets, stored as
/// target indices (total on the source side) plus the target side sizes it
/// was validated against.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SidedMap {
    left_map: Vec<usize>,
    right_map: Vec<usize>,
    target_left: usize,
    target_right: usize,
}

impl SidedMap {
    pub fn new(
        left_map: Vec<usize>,
        right_map: Vec<usize>,
        target_left: usize,
        target_right: usize,
    ) -> Result<Self, Error> {
        check_injection(&left_map, target_left, Side::L)?;
        check_injection(&right_map, target_right, Side::R)?;
        Ok(SidedMap {
            left_map,
            right_map,
            target_left,
            target_right,
        })
    }

    pub fn identity(left_count: usize, right_count: usize) -> Self {
        SidedMap {
            left_map: (0..left_count).collect(),
            right_map: (0..right_count).collect(),
            target_left: left_count,
            target_right: right_count,
        }
    }

    pub fn left_len(&self) -> usize {
        self.left_map.len()
    }

    pub fn right_len(&self) -> usize {
        self.right_map.len()
    }

    pub fn target_left(&self) -> usize {
        self.target_left
    }

    pub fn target_right(&self) -> usize {
        self.target_right
    }

    /// Image of source left vertex `a`. Panics when out of range.
    #[inline]
    pub fn left(&self, a: usize) -> usize {
        self.left_map[a]
    }

    /// Image of source right vertex `b`. Panics when out of range.
    #[inline]
    pub fn right(&self, b: usize) -> usize {
        self.right_map[b]
    }

    pub fn left_map(&self) -> &[usize] {
        &self.left_map
    }

    pub fn right_map(&self) -> &[usize] {
        &self.right_map
    }

    pub fn apply(&self, v: VertexRef) -> Result<VertexRef, Error> {
        let slot = match v.side {
            Side::L => self.left_map.get(v.index),
            Side::R => self.right_map.get(v.index),
        };
        slot.map(|&i| VertexRef {
            side: v.side,
            index: i,
        })
        .ok_or_else(|| Error::OutOfRange(format!("vertex {} outside the map domain", v)))
    }

    pub fn is_bijection(&self) -> bool {
        self.left_map.len() == self.target_left && self.right_map.len() == self.target_right
    }

    /// True when the map is total on `source` and lands in `target`.
    pub fn fits(&self, source: &BipartiteGraph, target: &BipartiteGraph) -> bool {
        self.left_map.len() == source.left_count()
            && self.right_map.len() == source.right_count()
            && self.target_left == target.left_count()
            && self.target_right == target.right_count()
    }

    /// Definitional isomorphism test: the map fits and preserves every
    /// cross-type on the nose.
    pub fn is_isomorphism(
        &self,
        source: &BipartiteGraph,
        target: &BipartiteGraph,
    ) -> Result<bool, Error> {
        if !self.fits(source, target) {
            return Err(Error::DimensionMismatch(
                "map does not fit the given source and target".into(),
            ));
        }
        for a in 0..source.left_count() {
            for b in 0..source.right_count() {
                if source.bit(a, b) != target.bit(self.left(a), self.right(b)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Composition `then` after `self`.
    pub fn compose(&self, then: &SidedMap) -> Result<SidedMap, Error> {
        if self.target_left != then.left_map.len() || self.target_right != then.right_map.len() {
            return Err(Error::DimensionMismatch(
                "composition requires the first target to equal the second domain".into(),
            ));
        }
        SidedMap::new(
            self.left_map.iter().map(|&a| then.left_map[a]).collect(),
            self.right_map.iter().map(|&b| then.right_map[b]).collect(),
            then.target_left,
            then.target_right,
        )
    }

    /// Inverse of a bijection; `None` when the map is not a bijection.
    pub fn inverse(&self) -> Option<SidedMap> {
        if !self.is_bijection() {
            return None;
        }
        let mut left_inv = vec![0; self.target_left];
        for (a, &x) in self.left_map.iter().enumerate() {
            left_inv[x] = a;
        }
        let mut right_inv = vec![0; self.target_right];
        for (b, &y) in self.right_map.iter().enumerate() {
            right_inv[y] = b;
        }
        Some(SidedMap {
            left_map: left_inv,
            right_map: right_inv,
            target_left: self.left_map.len(),
            target_right: self.right_map.len(),
        })
    }
}

fn check_injection(map: &[usize], target: usize, side: Side) -> Result<(), Error> {
    let mut seen = vec![false; target];
    for &i in map {
        if i >= target {
            return Err(Error::OutOfRange(format!(
                "{} target index {} with target side size {}",
                side, i, target
            )));
        }
        if seen[i] {
            return Err(Error::DuplicateTarget(format!("{}{}", side, i)));
        }
        seen[i] = true;
    }
    Ok(())
}

/// A partial side-preserving injection on a single graph, used by the
/// extension lab. Entries are kept in ascending source order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialSidedMap {
    left: BTreeMap<usize, usize>,
    right: BTreeMap<usize, usize>,
}

impl PartialSidedMap {
    pub fn new() -> Self {
        Self::default()
    }

    fn side_map(&self, side: Side) -> &BTreeMap<usize, usize> {
        match side {
            Side::L => &self.left,
            Side::R => &self.right,
        }
    }

    pub fn insert(&mut self, side: Side, from: usize, to: usize) -> Result<(), Error> {
        let map = match side {
            Side::L => &mut self.left,
            Side::R => &mut self.right,
        };
        if map.contains_key(&from) {
            return Err(Error::AlreadyMapped(format!("{}{}", side, from)));
        }
        if map.values().any(|&t| t == to) {
            return Err(Error::DuplicateTarget(format!("{}{}", side, to)));
        }
        map.insert(from, to);
        Ok(())
    }

    pub fn get(&self, side: Side, from: usize) -> Option<usize> {
        self.side_map(side).get(&from).copied()
    }

    pub fn len(&self, side: Side) -> usize {
        self.side_map(side).len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty() && self.right.is_empty()
    }

    pub fn contains_source(&self, v: VertexRef) -> bool {
        self.side_map(v.side).contains_key(&v.index)
    }

    pub fn contains_target(&self, v: VertexRef) -> bool {
        self.side_map(v.side).values().any(|&t| t == v.index)
    }

    /// Pairs `(from, to)` on one side in ascending source order.
    pub fn pairs(&self, side: Side) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.side_map(side).iter().map(|(&f, &t)| (f, t))
    }

    /// True when the map is a partial isomorphism of `g` onto itself:
    /// all entries in range and every mapped cross-type preserved.
    pub fn is_partial_isomorphism(&self, g: &BipartiteGraph) -> Result<bool, Error> {
        for (&f, &t) in &self.left {
            if f >= g.left_count() || t >= g.left_count() {
                return Err(Error::OutOfRange(format!("left entry {}->{}", f, t)));
            }
        }
        for (&f, &t) in &self.right {
            if f >= g.right_count() || t >= g.right_count() {
                return Err(Error::OutOfRange(format!("right entry {}->{}", f, t)));
            }
        }
        for (&a, &fa) in &self.left {
            for (&b, &fb) in &self.right {
                if g.bit(a, b) != g.bit(fa, fb) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// All side-preserving isomorphisms from `g` onto `h`, in lexicographic
/// `(left_map, right_map)` order. Returns the empty list when the side sizes
/// differ. Exact search intended for small sides; panics above 64 per side.
pub fn find_isomorphisms(g: &BipartiteGraph, h: &BipartiteGraph) -> Vec<SidedMap> {
    if g.left_count() != h.left_count() || g.right_count() != h.right_count() {
        return Vec::new();
    }
    let m = g.left_count();
    let n = g.right_count();
    assert!(
        m <= 64 && n <= 64,
        "isomorphism search supports sides up to 64"
    );

    let mut search = IsoSearch {
        g,
        h,
        m,
        n,
        left_map: vec![0; m],
        used: vec![false; m],
        out: Vec::new(),
    };
    search.extend_left(0);
    search.out
}

struct IsoSearch<'a> {
    g: &'a BipartiteGraph,
    h: &'a BipartiteGraph,
    m: usize,
    n: usize,
    left_map: Vec<usize>,
    used: Vec<bool>,
    out: Vec<SidedMap>,
}

impl IsoSearch<'_> {
    /// Column patterns over the first `t` assigned rows: for each source
    /// column its bits under source rows `0..t`, and for each target column
    /// its bits under the image rows. A consistent assignment must make the
    /// two multisets equal.
    fn columns_consistent(&self, t: usize) -> bool {
        let mut gp: Vec<u64> = (0..self.n)
            .map(|b| {
                (0..t).fold(0u64, |acc, s| acc | (u64::from(self.g.bit(s, b)) << s))
            })
            .collect();
        let mut hp: Vec<u64> = (0..self.n)
            .map(|c| {
                (0..t).fold(0u64, |acc, s| {
                    acc | (u64::from(self.h.bit(self.left_map[s], c)) << s)
                })
            })
            .collect();
        gp.sort_unstable();
        hp.sort_unstable();
        gp == hp
    }

    fn extend_left(&mut self, t: usize) {
        if t == self.m {
            let mut right_map = vec![0; self.n];
            let mut used = vec![false; self.n];
            self.extend_right(0, &mut right_map, &mut used);
            return;
        }
        for cand in 0..self.m {
            if self.used[cand] {
                continue;
            }
            self.left_map[t] = cand;
            self.used[cand] = true;
            if self.columns_consistent(t + 1) {
                self.extend_left(t + 1);
            }
            self.used[cand] = false;
        }
    }

    fn extend_right(&mut self, b: usize, right_map: &mut Vec<usize>, used: &mut Vec<bool>) {
        if b == self.n {
            self.out.push(SidedMap {
                left_map: self.left_map.clone(),
                right_map: right_map.clone(),
                target_left: self.m,
                target_right: self.n,
            });
            return;
        }
        'cand: for c in 0..self.n {
            if used[c] {
                continue;
            }
            for s in 0..self.m {
                if self.g.bit(s, b) != self.h.bit(self.left_map[s], c) {
                    continue 'cand;
                }
            }
            right_map[b] = c;
            used[c] = true;
            self.extend_right(b + 1, right_map, used);
            used[c] = false;
        }
    }
}
