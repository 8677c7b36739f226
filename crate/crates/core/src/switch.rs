//! Two-sided switching: patterns of per-vertex flips, the flip matrices they
//! induce, and flip matrices of concrete maps between graphs.
//!
//! A switch pattern holds one flip bit per left vertex and one per right
//! vertex; applying it to a graph toggles the cross-type of `(a, b)` exactly
//! when the two endpoint bits differ. Switching with respect to a vertex set
//! `A` means flipping the bits of `A`'s members, so a pair is toggled iff
//! exactly one endpoint lies in `A`.

use std::fmt;
use std::str::FromStr;

use crate::bits::BitMatrix;
use crate::error::{Error, TextError};
use crate::graph::{parse_grid, render_grid, BipartiteGraph, Side, SidedMap};

/// Per-vertex flip bits for both sides of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SwitchPattern {
    left: Vec<bool>,
    right: Vec<bool>,
}

impl SwitchPattern {
    pub fn new(left: Vec<bool>, right: Vec<bool>) -> Self {
        SwitchPattern { left, right }
    }

    /// The identity pattern (no flips).
    pub fn zero(left_len: usize, right_len: usize) -> Self {
        SwitchPattern {
            left: vec![false; left_len],
            right: vec![false; right_len],
        }
    }

    /// Pattern flipping exactly the listed vertices (set semantics).
    pub fn from_sets(
        left_len: usize,
        right_len: usize,
        left_set: &[usize],
        right_set: &[usize],
    ) -> Result<Self, Error> {
        let mut p = SwitchPattern::zero(left_len, right_len);
        for &a in left_set {
            if a >= left_len {
                return Err(Error::OutOfRange(format!(
                    "left flip index {} with side size {}",
                    a, left_len
                )));
            }
            p.left[a] = true;
        }
        for &b in right_set {
            if b >= right_len {
                return Err(Error::OutOfRange(format!(
                    "right flip index {} with side size {}",
                    b, right_len
                )));
            }
            p.right[b] = true;
        }
        Ok(p)
    }

    pub fn left_len(&self) -> usize {
        self.left.len()
    }

    pub fn right_len(&self) -> usize {
        self.right.len()
    }

    pub fn side_len(&self, side: Side) -> usize {
        match side {
            Side::L => self.left.len(),
            Side::R => self.right.len(),
        }
    }

    /// Flip bit of left vertex `a`. Panics when out of range.
    #[inline]
    pub fn left(&self, a: usize) -> bool {
        self.left[a]
    }

    /// Flip bit of right vertex `b`. Panics when out of range.
    #[inline]
    pub fn right(&self, b: usize) -> bool {
        self.right[b]
    }

    /// Whether the pattern toggles the pair `(a, b)`.
    #[inline]
    pub fn flips(&self, a: usize, b: usize) -> bool {
        self.left[a] ^ self.right[b]
    }

    pub fn left_set(&self) -> Vec<usize> {
        bit_set(&self.left)
    }

    pub fn right_set(&self) -> Vec<usize> {
        bit_set(&self.right)
    }

    /// Total number of flipped vertices on both sides.
    pub fn popcount(&self) -> usize {
        self.left.iter().filter(|&&b| b).count() + self.right.iter().filter(|&&b| b).count()
    }

    pub fn is_zero(&self) -> bool {
        self.popcount() == 0
    }

    /// The complementary pattern: every bit on both sides inverted. It
    /// induces the same flips on every pair, which is exactly the ambiguity
    /// in reading a pattern off its flip matrix.
    pub fn complement_both(&self) -> Self {
        SwitchPattern {
            left: self.left.iter().map(|&b| !b).collect(),
            right: self.right.iter().map(|&b| !b).collect(),
        }
    }

    /// XOR composition with another pattern of the same shape; applying the
    /// result equals applying both patterns in sequence.
    pub fn compose(&self, other: &SwitchPattern) -> Result<SwitchPattern, Error> {
        if self.left.len() != other.left.len() || self.right.len() != other.right.len() {
            return Err(Error::DimensionMismatch(format!(
                "pattern shapes ({}, {}) and ({}, {})",
                self.left.len(),
                self.right.len(),
                other.left.len(),
                other.right.len()
            )));
        }
        Ok(SwitchPattern {
            left: self
                .left
                .iter()
                .zip(&other.left)
                .map(|(&x, &y)| x ^ y)
                .collect(),
            right: self
                .right
                .iter()
                .zip(&other.right)
                .map(|(&x, &y)| x ^ y)
                .collect(),
        })
    }

    /// Parse the `Display` form. Side lengths are not part of the text, so
    /// they must be supplied; indices must be in range and not repeat.
    pub fn parse_with_lens(s: &str, left_len: usize, right_len: usize) -> Result<Self, Error> {
        let body = s.strip_suffix('\n').unwrap_or(s);
        let (l_part, r_part) = body
            .split_once(" ; ")
            .ok_or_else(|| TextError::new(1, 1, "expected 'L: ... ; R: ...'"))?;
        let l_items = parse_side_list(l_part, "L: ", left_len)?;
        let r_items = parse_side_list(r_part, "R: ", right_len)?;
        SwitchPattern::from_sets(left_len, right_len, &l_items, &r_items)
    }
}

fn bit_set(bits: &[bool]) -> Vec<usize> {
    bits.iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect()
}

fn parse_side_list(part: &str, prefix: &str, len: usize) -> Result<Vec<usize>, Error> {
    let rest = part
        .strip_prefix(prefix)
        .ok_or_else(|| TextError::new(1, 1, format!("expected '{}' prefix", prefix.trim())))?;
    if rest == "-" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for item in rest.split(',') {
        if item.is_empty() || item.chars().any(|c| !c.is_ascii_digit()) {
            return Err(TextError::new(1, 1, format!("bad index list item {:?}", item)).into());
        }
        if item.len() > 1 && item.starts_with('0') {
            return Err(TextError::new(1, 1, "leading zeros are not allowed").into());
        }
        let idx: usize = item
            .parse()
            .map_err(|_| TextError::new(1, 1, "index too large"))?;
        if out.contains(&idx) {
            return Err(Error::DuplicateTarget(format!(
                "{}{}",
                prefix.trim_end_matches(": "),
                idx
            )));
        }
        if idx >= len {
            return Err(Error::OutOfRange(format!(
                "flip index {} with side size {}",
                idx, len
            )));
        }
        out.push(idx);
    }
    Ok(out)
}

impl fmt::Display for SwitchPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L: ")?;
        write_index_set(f, &self.left_set())?;
        write!(f, " ; R: ")?;
        write_index_set(f, &self.right_set())
    }
}

fn write_index_set(f: &mut fmt::Formatter<'_>, set: &[usize]) -> fmt::Result {
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

/// A 0/1 matrix over (left, right) pairs recording where two cross-type
/// assignments disagree. Rows index the left side, columns the right side.
/// Unlike graphs, zero-size flip matrices are allowed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FlipMatrix {
    bits: BitMatrix,
}

impl FlipMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FlipMatrix {
            bits: BitMatrix::zeros(rows, cols),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> bool) -> Self {
        FlipMatrix {
            bits: BitMatrix::from_fn(rows, cols, f),
        }
    }

    pub fn rows(&self) -> usize {
        self.bits.rows()
    }

    pub fn cols(&self) -> usize {
        self.bits.cols()
    }

    /// Entry at row `a`, column `b`. Panics when out of range.
    #[inline]
    pub fn get(&self, a: usize, b: usize) -> bool {
        self.bits.get(a, b)
    }

    pub fn set(&mut self, a: usize, b: usize, value: bool) {
        self.bits.set(a, b, value);
    }

    pub fn toggle(&mut self, a: usize, b: usize) {
        self.bits.toggle(a, b);
    }

    pub fn toggle_row(&mut self, a: usize) {
        self.bits.toggle_row(a);
    }

    pub fn toggle_col(&mut self, b: usize) {
        self.bits.toggle_col(b);
    }

    pub fn toggle_all(&mut self) {
        self.bits.toggle_all();
    }

    /// Entrywise XOR with a matrix of the same shape.
    pub fn xor_assign(&mut self, other: &FlipMatrix) -> Result<(), Error> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::DimensionMismatch(format!(
                "flip matrix shapes {}x{} and {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        self.bits.xor_assign(&other.bits);
        Ok(())
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    /// `Some(v)` when every entry equals `v`; an empty matrix counts as
    /// constant false.
    pub fn constant_value(&self) -> Option<bool> {
        self.bits.constant_value()
    }

    /// Submatrix on the given row and column index sets (ascending, deduped).
    pub fn submatrix(&self, row_set: &[usize], col_set: &[usize]) -> Result<FlipMatrix, Error> {
        let rows = checked_index_set(row_set, self.rows(), "row")?;
        let cols = checked_index_set(col_set, self.cols(), "column")?;
        Ok(FlipMatrix::from_fn(rows.len(), cols.len(), |a, b| {
            self.get(rows[a], cols[b])
        }))
    }

    pub(crate) fn matrix(&self) -> &BitMatrix {
        &self.bits
    }
}

fn checked_index_set(set: &[usize], bound: usize, what: &str) -> Result<Vec<usize>, Error> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&bad) = v.iter().find(|&&i| i >= bound) {
        return Err(Error::OutOfRange(format!(
            "{} index {} with bound {}",
            what, bad, bound
        )));
    }
    Ok(v)
}

impl fmt::Display for FlipMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_grid(f, self.rows(), self.cols(), |a, b| self.get(a, b))
    }
}

impl fmt::Debug for FlipMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FlipMatrix[\n{}]", self)
    }
}

impl FromStr for FlipMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (_, _, bits) = parse_grid(s)?;
        Ok(FlipMatrix { bits })
    }
}

/// The graph obtained by applying a switch pattern: the cross-type of
/// `(a, b)` is toggled exactly when the pattern flips that pair.
pub fn apply_switch(g: &BipartiteGraph, p: &SwitchPattern) -> Result<BipartiteGraph, Error> {
    if p.left_len() != g.left_count() || p.right_len() != g.right_count() {
        return Err(Error::DimensionMismatch(format!(
            "pattern shape ({}, {}) on a {}x{} graph",
            p.left_len(),
            p.right_len(),
            g.left_count(),
            g.right_count()
        )));
    }
    BipartiteGraph::from_fn(g.left_count(), g.right_count(), |a, b| {
        g.bit(a, b) ^ p.flips(a, b)
    })
}

/// XOR composition of two patterns of the same shape.
pub fn compose_patterns(p: &SwitchPattern, q: &SwitchPattern) -> Result<SwitchPattern, Error> {
    p.compose(q)
}

/// Flip matrix of a total map `f` from `g` into `h`: entry `(a, b)` is set
/// where the cross-type of `(a, b)` in `g` differs from the cross-type of
/// the image pair in `h`. The zero matrix characterizes isomorphisms.
pub fn flip_matrix(
    f: &SidedMap,
    g: &BipartiteGraph,
    h: &BipartiteGraph,
) -> Result<FlipMatrix, Error> {
    if !f.fits(g, h) {
        return Err(Error::DimensionMismatch(
            "map does not fit the given source and target".into(),
        ));
    }
    Ok(FlipMatrix::from_fn(
        g.left_count(),
        g.right_count(),
        |a, b| g.bit(a, b) ^ h.bit(f.left(a), f.right(b)),
    ))
}

/// Flip matrix induced by a pattern alone: entry `(a, b)` set where the
/// pattern flips the pair.
pub fn pattern_flip_matrix(p: &SwitchPattern) -> FlipMatrix {
    FlipMatrix::from_fn(p.left_len(), p.right_len(), |a, b| p.flips(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::find_isomorphisms;

    fn g(text: &str) -> BipartiteGraph {
        text.parse().unwrap()
    }

    #[test]
    fn switch_flips_single_left_vertex() {
        let graph = g("2 2\n10\n01\n");
        let p = SwitchPattern::from_sets(2, 2, &[0], &[]).unwrap();
        let switched = apply_switch(&graph, &p).unwrap();
        assert_eq!(switched.to_string(), "2 2\n01\n01\n");
    }

    #[test]
    fn switch_is_an_involution() {
        let graph = g("3 2\n10\n01\n11\n");
        let p = SwitchPattern::from_sets(3, 2, &[1, 2], &[0]).unwrap();
        let twice = apply_switch(&apply_switch(&graph, &p).unwrap(), &p).unwrap();
        assert_eq!(twice, graph);
    }

    #[test]
    fn switch_rejects_shape_mismatch() {
        let graph = g("2 2\n10\n01\n");
        let p = SwitchPattern::zero(3, 2);
        assert!(matches!(
            apply_switch(&graph, &p),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn compose_is_xor() {
        let p = SwitchPattern::from_sets(3, 2, &[0, 1], &[1]).unwrap();
        let q = SwitchPattern::from_sets(3, 2, &[1, 2], &[1]).unwrap();
        let pq = compose_patterns(&p, &q).unwrap();
        assert_eq!(pq.left_set(), vec![0, 2]);
        assert_eq!(pq.right_set(), Vec::<usize>::new());
        assert!(pq.compose(&pq).unwrap().is_zero());
    }

    #[test]
    fn complement_induces_same_flips() {
        let p = SwitchPattern::from_sets(3, 3, &[0, 2], &[1]).unwrap();
        assert_eq!(pattern_flip_matrix(&p), pattern_flip_matrix(&p.complement_both()));
        assert_ne!(p, p.complement_both());
    }

    #[test]
    fn pattern_display_roundtrip() {
        let p = SwitchPattern::from_sets(3, 2, &[0, 2], &[]).unwrap();
        assert_eq!(p.to_string(), "L: 0,2 ; R: -");
        let back = SwitchPattern::parse_with_lens("L: 0,2 ; R: -", 3, 2).unwrap();
        assert_eq!(back, p);
        let zero = SwitchPattern::zero(1, 1);
        assert_eq!(zero.to_string(), "L: - ; R: -");
        assert_eq!(
            SwitchPattern::parse_with_lens("L: - ; R: -\n", 1, 1).unwrap(),
            zero
        );
    }

    #[test]
    fn pattern_parse_rejects_bad_input() {
        assert!(SwitchPattern::parse_with_lens("L: 0 R: -", 2, 2).is_err());
        assert!(SwitchPattern::parse_with_lens("L: 2 ; R: -", 2, 2).is_err());
        assert!(SwitchPattern::parse_with_lens("L: 0,0 ; R: -", 2, 2).is_err());
        assert!(SwitchPattern::parse_with_lens("L: 01 ; R: -", 20, 2).is_err());
        assert!(SwitchPattern::parse_with_lens("L: a ; R: -", 2, 2).is_err());
        assert!(SwitchPattern::parse_with_lens("X: 0 ; R: -", 2, 2).is_err());
    }

    #[test]
    fn flip_matrix_of_identity_is_zero() {
        let graph = g("2 3\n101\n010\n");
        let id = SidedMap::identity(2, 3);
        let e = flip_matrix(&id, &graph, &graph).unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn flip_matrix_detects_disagreements() {
        let a = g("2 2\n10\n01\n");
        let b = g("2 2\n11\n01\n");
        let e = flip_matrix(&SidedMap::identity(2, 2), &a, &b).unwrap();
        assert_eq!(e.to_string(), "2 2\n01\n00\n");
        assert_eq!(e.count_ones(), 1);
    }

    #[test]
    fn flip_matrix_zero_iff_isomorphism() {
        let a = g("2 2\n10\n01\n");
        let b = g("2 2\n01\n10\n");
        for f in find_isomorphisms(&a, &b) {
            assert!(flip_matrix(&f, &a, &b).unwrap().is_zero());
        }
        let id = SidedMap::identity(2, 2);
        assert!(!flip_matrix(&id, &a, &b).unwrap().is_zero());
    }

    #[test]
    fn switched_target_shifts_flip_matrix_by_pattern() {
        let graph = g("3 3\n101\n010\n110\n");
        let p = SwitchPattern::from_sets(3, 3, &[1], &[0, 2]).unwrap();
        let switched = apply_switch(&graph, &p).unwrap();
        let e = flip_matrix(&SidedMap::identity(3, 3), &graph, &switched).unwrap();
        assert_eq!(e, pattern_flip_matrix(&p));
    }

    #[test]
    fn flip_matrix_grid_roundtrip() {
        let text = "2 3\n101\n010\n";
        let e: FlipMatrix = text.parse().unwrap();
        assert_eq!(e.to_string(), text);
        assert_eq!(e.count_ones(), 3);
    }

    #[test]
    fn flip_matrix_ops() {
        let mut e = FlipMatrix::zeros(2, 2);
        e.toggle_row(0);
        e.toggle_col(1);
        // row 0 = 1,0 ; row 1 = 0,1
        assert_eq!(e.to_string(), "2 2\n10\n01\n");
        e.toggle_all();
        assert_eq!(e.to_string(), "2 2\n01\n10\n");
        let mut f = e.clone();
        f.xor_assign(&e).unwrap();
        assert!(f.is_zero());
        assert_eq!(f.constant_value(), Some(false));
        assert_eq!(e.constant_value(), None);
        assert!(f.xor_assign(&FlipMatrix::zeros(1, 2)).is_err());
    }

    #[test]
    fn submatrix_selects_cells() {
        let e: FlipMatrix = "3 3\n101\n010\n110\n".parse().unwrap();
        let s = e.submatrix(&[0, 2], &[1, 2]).unwrap();
        assert_eq!(s.to_string(), "2 2\n01\n10\n");
        assert!(e.submatrix(&[3], &[0]).is_err());
    }

    #[test]
    fn zero_size_flip_matrices_allowed() {
        let e = FlipMatrix::zeros(0, 5);
        assert_eq!(e.constant_value(), Some(false));
        assert!(e.is_zero());
        let parsed: FlipMatrix = "0 5\n".parse().unwrap();
        assert_eq!(parsed, e);
    }
}
