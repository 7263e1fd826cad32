use std::fmt;
use std::str::FromStr;

use super::MatrixError;

const WORD_BITS: usize = 64;

/// A failure signature: one bit per golden test, 1 = the code failed it.
///
/// Bits are packed little-endian into `u64` words. Bits past `width` are
/// always zero, so word-wise equality, hashing and popcounts are exact.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    words: Vec<u64>,
    width: usize,
}

impl Signature {
    pub fn zeros(width: usize) -> Self {
        Self {
            words: vec![0; width.div_ceil(WORD_BITS)],
            width,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut sig = Self::zeros(bits.len());
        for (j, &b) in bits.iter().enumerate() {
            if b {
                sig.set(j);
            }
        }
        sig
    }

    /// Builds a signature with the given bit positions set.
    ///
    /// # Panics
    /// Panics if any position is `>= width`.
    pub fn from_ones<I: IntoIterator<Item = usize>>(width: usize, ones: I) -> Self {
        let mut sig = Self::zeros(width);
        for j in ones {
            sig.set(j);
        }
        sig
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    /// # Panics
    /// Panics if `j >= width`.
    #[inline]
    pub fn get(&self, j: usize) -> bool {
        assert!(j < self.width, "bit {j} out of range for width {}", self.width);
        (self.words[j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    /// # Panics
    /// Panics if `j >= width`.
    #[inline]
    pub fn set(&mut self, j: usize) {
        assert!(j < self.width, "bit {j} out of range for width {}", self.width);
        self.words[j / WORD_BITS] |= 1u64 << (j % WORD_BITS);
    }

    #[inline]
    pub fn popcount(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of tests failed by both signatures, `popcount(a AND b)`.
    #[inline]
    pub fn and_count(&self, other: &Self) -> u32 {
        debug_assert_eq!(self.width, other.width);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    /// GF(2) addition.
    #[inline]
    pub fn xor_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Index of the lowest set bit, if any.
    pub fn lowest_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD_BITS + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width).filter(move |&j| self.get(j))
    }

    /// The signature restricted to `columns`, in the given order.
    pub fn restrict(&self, columns: &[usize]) -> Self {
        let mut out = Self::zeros(columns.len());
        for (k, &j) in columns.iter().enumerate() {
            if self.get(j) {
                out.set(k);
            }
        }
        out
    }

    pub(crate) fn check_width(&self, other: &Self) -> Result<(), MatrixError> {
        if self.width != other.width {
            return Err(MatrixError::WidthMismatch {
                expected: self.width,
                found: other.width,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.width {
            f.write_str(if self.get(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature({self})")
    }
}

/// Parses a `0`/`1` string; character `j` is bit `j`.
impl FromStr for Signature {
    type Err = MatrixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut sig = Self::zeros(s.len());
        for (j, c) in s.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => sig.set(j),
                other => {
                    return Err(MatrixError::BadBit {
                        found: other as char,
                        column: j,
                    })
                }
            }
        }
        Ok(sig)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_display_roundtrip() {
        let s: Signature = "0110".parse().unwrap();
        assert_eq!(s.width(), 4);
        assert!(!s.get(0) && s.get(1) && s.get(2) && !s.get(3));
        assert_eq!(s.to_string(), "0110");
        assert_eq!(s.popcount(), 2);
    }

    #[test]
    fn rejects_other_characters() {
        assert!(matches!(
            "01x".parse::<Signature>(),
            Err(MatrixError::BadBit { found: 'x', column: 2 })
        ));
    }

    #[test]
    fn wide_signatures_span_words() {
        let s = Signature::from_ones(130, [0, 64, 129]);
        assert_eq!(s.popcount(), 3);
        assert_eq!(s.lowest_one(), Some(0));
        assert_eq!(s.ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        let t = Signature::from_ones(130, [64, 100]);
        assert_eq!(s.and_count(&t), 1);
        let mut u = s.clone();
        u.xor_assign(&t);
        assert_eq!(u.ones().collect::<Vec<_>>(), vec![0, 100, 129]);
    }

    #[test]
    fn restrict_keeps_column_order() {
        let s: Signature = "10110".parse().unwrap();
        assert_eq!(s.restrict(&[4, 2, 0]).to_string(), "011");
    }
}
