//! Dense GF(2) vectors and matrices.
//!
//! Bits are packed into `u64` words, least significant bit first. Every
//! operation is defined on logical bit positions, so the packing never leaks
//! through the public interface. Unused bits of the last word are kept zero.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A binary vector of fixed length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVector {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    /// Unit vector with a single one at `pos`.
    pub fn unit(len: usize, pos: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(pos, true);
        v
    }

    pub fn from_bits<I>(bits: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<u8>,
    {
        let bits: Vec<u8> = bits.into_iter().map(Into::into).collect();
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from the low `len` bits of `value`, bit `len-1-i` of
    /// `value` landing at position `i` (so the first position is the MSB).
    pub fn from_u64_msb(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut v = Self::zeros(len);
        for i in 0..len {
            if (value >> (len - 1 - i)) & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// GF(2) inner product.
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot product");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Overwrites `self` with `a ^ b` without reallocating.
    pub fn assign_xor(&mut self, a: &BitVector, b: &BitVector) {
        assert!(a.len == b.len && a.len == self.len, "length mismatch in xor");
        for ((o, x), y) in self.words.iter_mut().zip(&a.words).zip(&b.words) {
            *o = x ^ y;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Complement of every bit.
    pub fn not(&self) -> BitVector {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    /// Positions holding a one, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    /// Kronecker product: entry `i * other.len() + j` equals `self[i] & other[j]`.
    pub fn kron(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len * other.len);
        for i in self.iter_ones() {
            let base = i * other.len;
            for j in other.iter_ones() {
                out.set(base + j, true);
            }
        }
        out
    }

    /// Restriction to the given positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> BitVector {
        let mut out = BitVector::zeros(positions.len());
        for (k, &p) in positions.iter().enumerate() {
            if self.get(p) {
                out.set(k, true);
            }
        }
        out
    }

    /// Bipolar map 0 -> +1, 1 -> -1.
    pub fn bipolar(&self) -> Vec<f64> {
        self.iter().map(|b| if b { -1.0 } else { 1.0 }).collect()
    }

    /// Correlation of the bipolar image with a real vector.
    pub fn correlation(&self, values: &[f64]) -> f64 {
        assert_eq!(self.len, values.len(), "length mismatch in correlation");
        values
            .iter()
            .enumerate()
            .map(|(i, &x)| if self.get(i) { -x } else { x })
            .sum()
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({})", self)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::new();
        for ch in s.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_whitespace() || c == ',' => {}
                c => return Err(Error::Parse(format!("unexpected character {c:?} in bit string"))),
            }
        }
        Ok(BitVector::from_bools(&bits))
    }
}

/// Dense binary matrix stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// Nonzero rows of the RREF, row `t` having its leading one at `pivots[t]`.
    pub rows: BitMatrix,
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: (0..rows).map(|_| BitVector::zeros(cols)).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix {
            cols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    /// An empty matrix with the given column count.
    pub fn empty(cols: usize) -> Self {
        BitMatrix { cols, rows: Vec::new() }
    }

    pub fn from_rows(rows: Vec<BitVector>) -> Result<Self> {
        let cols = rows.first().map(BitVector::len).unwrap_or(0);
        Self::from_rows_with_cols(rows, cols)
    }

    pub fn from_rows_with_cols(rows: Vec<BitVector>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(BitMatrix { cols, rows })
    }

    /// Parses one row per line of `0`/`1` characters. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(BitVector::from_str)
            .collect::<Result<Vec<_>>>()?;
        if rows.is_empty() {
            return Err(Error::Parse("matrix text has no rows".into()));
        }
        Self::from_rows(rows)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }

    #[inline]
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BitMatrix { cols: self.cols, rows })
    }

    /// Row vector times matrix: XOR of the rows selected by `coeffs`.
    pub fn left_mul(&self, coeffs: &BitVector) -> Result<BitVector> {
        if coeffs.len() != self.rows.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rows.len(),
                found: coeffs.len(),
            });
        }
        let mut out = BitVector::zeros(self.cols);
        for i in coeffs.iter_ones() {
            out.xor_assign(&self.rows[i]);
        }
        Ok(out)
    }

    /// Matrix times column vector (the syndrome `M v^T`).
    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(BitVector::from_bools(
            &self.rows.iter().map(|r| r.dot(v)).collect::<Vec<_>>(),
        ))
    }

    /// True iff every row is orthogonal to `v`.
    pub fn annihilates(&self, v: &BitVector) -> bool {
        v.len() == self.cols && self.rows.iter().all(|r| !r.dot(v))
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.cols, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.iter_ones() {
                out.rows[j].set(i, true);
            }
        }
        out
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        let rows = self
            .rows
            .iter()
            .map(|r| other.left_mul(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(BitMatrix {
            cols: other.cols,
            rows,
        })
    }

    /// Reduced row echelon form. Pivots are chosen column by column from the
    /// left, taking the lowest-index remaining row with a one in that column.
    pub fn echelon(&self) -> Echelon {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            if next == rows.len() {
                break;
            }
            let Some(p) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(next, p);
            let pivot_row = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
        }
        rows.truncate(next);
        Echelon {
            rows: BitMatrix { cols: self.cols, rows },
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of `{x : M x^T = 0}`, one row per non-pivot column.
    pub fn nullspace(&self) -> BitMatrix {
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - ech.pivots.len());
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut x = BitVector::unit(self.cols, free);
            for (t, &p) in ech.pivots.iter().enumerate() {
                if ech.rows.get(t, free) {
                    x.set(p, true);
                }
            }
            basis.push(x);
        }
        BitMatrix {
            cols: self.cols,
            rows: basis,
        }
    }

    /// Row-space membership. On success returns coefficients `a` with `a M = v`.
    pub fn solve_left(&self, v: &BitVector) -> Result<Option<BitVector>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        // Augment each row with its originating unit vector so the
        // combination can be read back after elimination.
        let k = self.rows.len();
        let mut rows: Vec<(BitVector, BitVector)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), BitVector::unit(k, i)))
            .collect();
        let mut residual = v.clone();
        let mut coeffs = BitVector::zeros(k);
        let mut next = 0;
        for col in 0..self.cols {
            if next == rows.len() {
                break;
            }
            let Some(p) = (next..rows.len()).find(|&r| rows[r].0.get(col)) else {
                continue;
            };
            rows.swap(next, p);
            let (pr, pc) = rows[next].clone();
            for (r, (row, comb)) in rows.iter_mut().enumerate() {
                if r != next && row.get(col) {
                    row.xor_assign(&pr);
                    comb.xor_assign(&pc);
                }
            }
            if residual.get(col) {
                residual.xor_assign(&pr);
                coeffs.xor_assign(&pc);
            }
            next += 1;
        }
        Ok(residual.is_zero().then_some(coeffs))
    }

    pub fn in_span(&self, v: &BitVector) -> Result<bool> {
        Ok(self.solve_left(v)?.is_some())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn mat(rows: &[&str]) -> BitMatrix {
        BitMatrix::from_rows(rows.iter().map(|r| bv(r)).collect()).unwrap()
    }

    #[test]
    fn kron_examples() {
        assert_eq!(bv("1").kron(&bv("101")), bv("101"));
        assert_eq!(bv("10").kron(&bv("11")), bv("1100"));
        assert_eq!(bv("111").kron(&bv("111")), BitVector::ones(9));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        assert_eq!(BitMatrix::zeros(2, 4).rank(), 0);
        assert_eq!(mat(&["110", "011", "101"]).rank(), 2);
    }

    #[test]
    fn in_span_examples() {
        let m = mat(&["100", "010"]);
        let zero = m.solve_left(&bv("000")).unwrap().unwrap();
        assert!(zero.is_zero());
        let row0 = m.solve_left(&bv("100")).unwrap().unwrap();
        assert_eq!(row0, bv("10"));
        assert!(!m.in_span(&bv("111")).unwrap());
        assert!(matches!(
            m.in_span(&bv("11")),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(BitMatrix::identity(4).nullspace().num_rows(), 0);
        let ns = mat(&["11"]).nullspace();
        assert_eq!(ns.rows(), &[bv("11")]);

        let g = mat(&["111", "011"]);
        let h = g.nullspace();
        assert_eq!(h.num_rows(), 1);
        for msg in 0..4u64 {
            let c = g.left_mul(&BitVector::from_u64_msb(msg, 2)).unwrap();
            assert!(!h.row(0).dot(&c));
        }
    }

    #[test]
    fn echelon_pivots_are_leftmost() {
        let e = mat(&["0110", "0011", "1000"]).echelon();
        assert_eq!(e.pivots, vec![0, 1, 2]);
        assert_eq!(e.rows.row(0), &bv("1000"));
        assert_eq!(e.rows.row(1), &bv("0101"));
        assert_eq!(e.rows.row(2), &bv("0011"));
    }

    #[test]
    fn not_and_ones_keep_tail_clear() {
        let v = BitVector::ones(70);
        assert_eq!(v.weight(), 70);
        assert_eq!(v.not().weight(), 0);
        assert_eq!(BitVector::zeros(70).not(), v);
    }

    #[test]
    fn parse_text_matrix() {
        let m = BitMatrix::parse_text("# hamming\n1101000\n0110100\n\n0011010\n0001101\n").unwrap();
        assert_eq!(m.num_rows(), 4);
        assert_eq!(m.num_cols(), 7);
        assert!(BitMatrix::parse_text("10x").is_err());
        assert!(BitMatrix::parse_text("10\n101").is_err());
    }

    fn arb_vec(len: usize) -> impl Strategy<Value = BitVector> {
        prop::collection::vec(any::<bool>(), len).prop_map(|b| BitVector::from_bools(&b))
    }

    fn arb_matrix() -> impl Strategy<Value = BitMatrix> {
        (1usize..8, 1usize..80).prop_flat_map(|(r, c)| {
            prop::collection::vec(arb_vec(c), r)
                .prop_map(move |rows| BitMatrix::from_rows_with_cols(rows, c).unwrap())
        })
    }

    proptest! {
        #[test]
        fn kron_is_associative(a in arb_vec(3), b in arb_vec(5), c in arb_vec(4)) {
            prop_assert_eq!(a.kron(&b).kron(&c), a.kron(&b.kron(&c)));
        }

        #[test]
        fn rank_ignores_row_order(m in arb_matrix(), seed in any::<u64>()) {
            let mut rows = m.rows().to_vec();
            let n = rows.len();
            for i in (1..n).rev() {
                let j = (seed.wrapping_mul(i as u64 + 7) % (i as u64 + 1)) as usize;
                rows.swap(i, j);
            }
            let shuffled = BitMatrix::from_rows_with_cols(rows, m.num_cols()).unwrap();
            prop_assert_eq!(m.rank(), shuffled.rank());
        }

        #[test]
        fn nullspace_is_orthogonal_complement(m in arb_matrix()) {
            let ns = m.nullspace();
            for h in ns.rows() {
                prop_assert!(m.annihilates(h));
            }
            prop_assert_eq!(ns.rank() + m.rank(), m.num_cols());
        }

        #[test]
        fn solve_left_remultiplies(m in arb_matrix(), coeff_seed in any::<u64>()) {
            let k = m.num_rows();
            let coeffs = BitVector::from_u64_msb(coeff_seed & ((1 << k) - 1), k);
            let v = m.left_mul(&coeffs).unwrap();
            let found = m.solve_left(&v).unwrap().expect("vector built from rows must be in span");
            prop_assert_eq!(m.left_mul(&found).unwrap(), v);
        }
    }
}
