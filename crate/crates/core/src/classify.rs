//! Classification of flip matrices into the five-class lattice of
//! side-preserving map families, and the GF(2) decomposition of a flip
//! matrix into a switch pattern.
//!
//! The classes form a lattice ordered by inclusion of the map families they
//! name: `AutStar` (cross-type preserving or globally exchanging) sits at the
//! bottom, `SL` and `SR` (closures under left-only / right-only vertex
//! switches) are incomparable above it, `SLR` (both sides) is their join, and
//! `Sym` (all side-preserving bijections) is the top.

use std::fmt;

use crate::switch::{pattern_flip_matrix, FlipMatrix, SwitchPattern};

/// The five-class lattice. `Display` renders the conventional tags
/// `AUT_STAR`, `S_L`, `S_R`, `S_LR`, `SYM`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductClass {
    AutStar,
    SL,
    SR,
    SLR,
    Sym,
}

impl ReductClass {
    /// All classes in a fixed order compatible with the lattice
    /// (every class appears after everything below it).
    pub const ALL: [ReductClass; 5] = [
        ReductClass::AutStar,
        ReductClass::SL,
        ReductClass::SR,
        ReductClass::SLR,
        ReductClass::Sym,
    ];

    /// Encoding as a capability set: bit 0 = left switches, bit 1 = right
    /// switches, bit 2 = arbitrary maps. Lattice order is subset order.
    fn mask(self) -> u8 {
        match self {
            ReductClass::AutStar => 0b000,
            ReductClass::SL => 0b001,
            ReductClass::SR => 0b010,
            ReductClass::SLR => 0b011,
            ReductClass::Sym => 0b111,
        }
    }

    fn from_mask(mask: u8) -> ReductClass {
        match mask {
            0b000 => ReductClass::AutStar,
            0b001 => ReductClass::SL,
            0b010 => ReductClass::SR,
            0b011 => ReductClass::SLR,
            _ => ReductClass::Sym,
        }
    }

    /// Lattice order: `self` is below (a subfamily of) `other`.
    pub fn le(self, other: ReductClass) -> bool {
        self.mask() & !other.mask() == 0
    }

    /// Greatest class below both arguments.
    pub fn meet(self, other: ReductClass) -> ReductClass {
        ReductClass::from_mask(self.mask() & other.mask())
    }

    /// Least class above both arguments.
    pub fn join(self, other: ReductClass) -> ReductClass {
        ReductClass::from_mask(self.mask() | other.mask())
    }
}

impl PartialOrd for ReductClass {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering;
        match (ReductClass::le(*self, *other), ReductClass::le(*other, *self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }
}

impl fmt::Display for ReductClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            ReductClass::AutStar => "AUT_STAR",
            ReductClass::SL => "S_L",
            ReductClass::SR => "S_R",
            ReductClass::SLR => "S_LR",
            ReductClass::Sym => "SYM",
        };
        write!(f, "{}", tag)
    }
}

/// True iff every 1-row, 2-column submatrix has an even number of set bits;
/// equivalently, every row is constant.
pub fn preserves_1x2_parity(e: &FlipMatrix) -> bool {
    (0..e.rows()).all(|a| e.matrix().row_constant(a))
}

/// True iff every 2-row, 1-column submatrix has an even number of set bits;
/// equivalently, every column is constant.
pub fn preserves_2x1_parity(e: &FlipMatrix) -> bool {
    (1..e.rows()).all(|a| e.matrix().row_eq(0, a))
}

/// True iff every 2×2 submatrix has an even number of set bits;
/// equivalently, any two rows are equal or complementary.
pub fn preserves_2x2_parity(e: &FlipMatrix) -> bool {
    (1..e.rows()).all(|a| e.matrix().row_eq(0, a) || e.matrix().row_eq_complement(0, a))
}

/// Coordinates of a 2×2 submatrix with an odd number of set bits: two row
/// indices and two column indices, each ascending.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OddMinor {
    pub rows: (usize, usize),
    pub cols: (usize, usize),
}

impl fmt::Display for OddMinor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rows {},{} ; cols {},{}",
            self.rows.0, self.rows.1, self.cols.0, self.cols.1
        )
    }
}

/// First 2×2 submatrix with odd bit count, in lexicographic order of
/// `(rows.0, rows.1, cols.0, cols.1)`; `None` when every 2×2 submatrix is
/// even, i.e. exactly when [`preserves_2x2_parity`] holds.
pub fn find_odd_minor(e: &FlipMatrix) -> Option<OddMinor> {
    // An odd 2×2 submatrix on rows (a1, a2) exists iff the XOR of the two
    // rows is non-constant; the lexicographically least column pair is then
    // (0, first column where the XOR differs from its column-0 value).
    for a1 in 0..e.rows() {
        for a2 in (a1 + 1)..e.rows() {
            if e.matrix().row_eq(a1, a2) || e.matrix().row_eq_complement(a1, a2) {
                continue;
            }
            let x0 = e.get(a1, 0) ^ e.get(a2, 0);
            let b2 = (1..e.cols())
                .find(|&b| (e.get(a1, b) ^ e.get(a2, b)) != x0)
                .expect("non-constant XOR row must differ from its first entry somewhere");
            return Some(OddMinor {
                rows: (a1, a2),
                cols: (0, b2),
            });
        }
    }
    None
}

/// The minimal class whose maps can have flip matrix `e`: constant matrices
/// come from isomorphisms or the global exchange; constant rows from
/// left-side switching; constant columns from right-side switching; even 2×2
/// parity from two-sided switching; everything else is unrestricted.
pub fn classify(e: &FlipMatrix) -> ReductClass {
    if e.constant_value().is_some() {
        ReductClass::AutStar
    } else if preserves_1x2_parity(e) {
        ReductClass::SL
    } else if preserves_2x1_parity(e) {
        ReductClass::SR
    } else if preserves_2x2_parity(e) {
        ReductClass::SLR
    } else {
        ReductClass::Sym
    }
}

/// A flip matrix written as per-vertex switch bits plus an optional global
/// exchange: the represented matrix is `pattern_flip_matrix(pattern)` with
/// every entry additionally toggled when `global_exchange` is set.
///
/// The representation is redundant: complementing both sides of the pattern,
/// or complementing one side while toggling `global_exchange`, leaves the
/// matrix unchanged. [`SwitchDecomposition::normalize`] picks the unique
/// representative with `global_exchange = false` and first left bit 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SwitchDecomposition {
    pub global_exchange: bool,
    pub pattern: SwitchPattern,
}

impl SwitchDecomposition {
    /// The flip matrix this decomposition denotes.
    pub fn flip_matrix(&self) -> FlipMatrix {
        let mut e = pattern_flip_matrix(&self.pattern);
        if self.global_exchange {
            e.toggle_all();
        }
        e
    }

    pub fn is_global_exchange(&self) -> bool {
        self.global_exchange
    }

    /// Canonical representative of the same flip matrix: fold the exchange
    /// bit into the right side, then complement both sides if the first
    /// left bit is set.
    pub fn normalize(&self) -> SwitchDecomposition {
        let mut left: Vec<bool> = (0..self.pattern.left_len())
            .map(|a| self.pattern.left(a))
            .collect();
        let mut right: Vec<bool> = (0..self.pattern.right_len())
            .map(|b| self.pattern.right(b) ^ self.global_exchange)
            .collect();
        if left.first().copied().unwrap_or(false) {
            for x in &mut left {
                *x = !*x;
            }
            for y in &mut right {
                *y = !*y;
            }
        }
        SwitchDecomposition {
            global_exchange: false,
            pattern: SwitchPattern::new(left, right),
        }
    }
}

impl fmt::Display for SwitchDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "exchange: {} ; pattern: {}",
            if self.global_exchange { "yes" } else { "no" },
            self.pattern
        )
    }
}

/// Solve `e(a,b) = left(a) XOR right(b)` over GF(2). Returns the normalized
/// decomposition (no global exchange, first left bit 0), or `None` exactly
/// when some 2×2 submatrix is odd.
pub fn decompose(e: &FlipMatrix) -> Option<SwitchDecomposition> {
    if !preserves_2x2_parity(e) {
        return None;
    }
    // Anchor at the first row and column: with left(0) fixed to 0 the right
    // bits must be row 0 itself, and each left bit follows from column 0.
    let right: Vec<bool> = (0..e.cols()).map(|b| e.get(0, b)).collect();
    let anchor = right.first().copied().unwrap_or(false);
    let left: Vec<bool> = (0..e.rows()).map(|a| e.get(a, 0) ^ anchor).collect();
    Some(SwitchDecomposition {
        global_exchange: false,
        pattern: SwitchPattern::new(left, right),
    })
}

/// Everything the classifier can say about one flip matrix: its class, the
/// switch decomposition when one exists, the constant value for matrices of
/// isomorphism/exchange kind, and an odd-submatrix certificate otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationReport {
    pub class: ReductClass,
    pub decomposable: bool,
    /// Normalized switch pattern reproducing the matrix; present iff
    /// `decomposable`.
    pub pattern: Option<SwitchPattern>,
    /// For constant matrices only: `Some(false)` = all-zero (isomorphism
    /// kind), `Some(true)` = all-one (global exchange kind). This refines
    /// the bottom class without introducing a sixth class.
    pub exchange: Option<bool>,
    /// Odd 2×2 submatrix witnessing non-decomposability; present iff the
    /// class is the top class.
    pub certificate: Option<OddMinor>,
}

impl fmt::Display for ClassificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "class: {}", self.class)?;
        if let Some(x) = self.exchange {
            write!(f, " ({})", if x { "exchange" } else { "identity" })?;
        }
        write!(
            f,
            " ; decomposable: {}",
            if self.decomposable { "yes" } else { "no" }
        )?;
        if let Some(p) = &self.pattern {
            write!(f, " ; pattern: {}", p)?;
        }
        if let Some(c) = &self.certificate {
            write!(f, " ; odd submatrix: {}", c)?;
        }
        Ok(())
    }
}

/// Classify and package the full report for one flip matrix.
pub fn classify_report(e: &FlipMatrix) -> ClassificationReport {
    let class = classify(e);
    let decomposition = decompose(e);
    ClassificationReport {
        class,
        decomposable: decomposition.is_some(),
        pattern: decomposition.map(|d| d.pattern),
        exchange: e.constant_value(),
        certificate: find_odd_minor(e),
    }
}

/// Test convenience: build a flip matrix from 0/1 byte rows.
#[cfg(test)]
pub(crate) fn flip_from_rows(rows: &[&[u8]]) -> FlipMatrix {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    FlipMatrix::from_fn(r, c, |a, b| rows[a][b] == 1)
}
