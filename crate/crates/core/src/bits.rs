//! Word-packed GF(2) matrix used as the backing store for cross-type tables
//! and flip matrices. Bits beyond the column count in the last word of each
//! row are kept at zero so popcounts and equality work on whole words.

#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            words: vec![0; rows * words_per_row],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "bit index out of range");
        let w = self.words[r * self.words_per_row + c / 64];
        w >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        assert!(r < self.rows && c < self.cols, "bit index out of range");
        let w = &mut self.words[r * self.words_per_row + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn toggle(&mut self, r: usize, c: usize) {
        let v = self.get(r, c);
        self.set(r, c, !v);
    }

    /// Mask covering the valid bits of the last word in a row.
    fn tail_mask(&self) -> u64 {
        let rem = self.cols % 64;
        if rem == 0 {
            !0
        } else {
            (1 << rem) - 1
        }
    }

    pub fn toggle_row(&mut self, r: usize) {
        assert!(r < self.rows, "row index out of range");
        let start = r * self.words_per_row;
        for i in 0..self.words_per_row {
            self.words[start + i] = !self.words[start + i];
        }
        if self.words_per_row > 0 {
            let mask = self.tail_mask();
            self.words[start + self.words_per_row - 1] &= mask;
        }
    }

    pub fn toggle_col(&mut self, c: usize) {
        assert!(c < self.cols, "column index out of range");
        for r in 0..self.rows {
            self.words[r * self.words_per_row + c / 64] ^= 1 << (c % 64);
        }
    }

    pub fn toggle_all(&mut self) {
        for r in 0..self.rows {
            self.toggle_row(r);
        }
    }

    pub fn xor_assign(&mut self, other: &BitMatrix) {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "xor of mismatched bit matrices"
        );
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    /// `Some(v)` when every cell holds `v`; an empty matrix counts as
    /// constant false.
    pub fn constant_value(&self) -> Option<bool> {
        if self.rows == 0 || self.cols == 0 {
            return Some(false);
        }
        if self.is_zero() {
            return Some(false);
        }
        let full = self.rows * self.cols;
        if self.count_ones() == full {
            Some(true)
        } else {
            None
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        let start = r * self.words_per_row;
        &self.words[start..start + self.words_per_row]
    }

    pub fn row_eq(&self, r1: usize, r2: usize) -> bool {
        self.row_words(r1) == self.row_words(r2)
    }

    pub fn row_eq_complement(&self, r1: usize, r2: usize) -> bool {
        let mask = self.tail_mask();
        let a = self.row_words(r1);
        let b = self.row_words(r2);
        let last = self.words_per_row - 1;
        a.iter().zip(b).enumerate().all(|(i, (x, y))| {
            let m = if i == last { mask } else { !0 };
            (x ^ y) & m == m
        })
    }

    pub fn row_constant(&self, r: usize) -> bool {
        let words = self.row_words(r);
        let mask = self.tail_mask();
        let last = self.words_per_row - 1;
        let zero = words
            .iter()
            .enumerate()
            .all(|(i, w)| *w & (if i == last { mask } else { !0 }) == 0);
        let one = words
            .iter()
            .enumerate()
            .all(|(i, w)| *w & (if i == last { mask } else { !0 }) == if i == last { mask } else { !0 });
        zero || one
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", if self.get(r, c) { '1' } else { '0' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
