//! Base codes and recursive subproduct codes.
//!
//! A [`BaseCode`] is an `[n, k, d]` binary code containing the all-ones word,
//! stored with a generator whose row 0 is `1_n` and whose remaining rows span
//! a subcode that excludes `1_n`. A [`SubproductCode`] of order `r` and
//! `m` factors is spanned by the Kronecker products
//! `g_{j_0} ⊗ ... ⊗ g_{j_{m-1}}` over index tuples `j ∈ [k]^m` with at most
//! `r` nonzero entries, grouped by weight and listed lexicographically.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// Largest base dimension for which the codebook is enumerated exhaustively.
pub const MAX_BASE_DIM: usize = 20;

/// Default cap on the block length `n^m`.
pub const DEFAULT_MAX_LEN: usize = 1 << 22;

/// Binomial coefficient, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Calls `f` on every element of the row space of `rows`, visiting them in
/// Gray-code order starting from zero.
pub fn for_each_combination<F: FnMut(&BitVector)>(rows: &[BitVector], len: usize, mut f: F) {
    assert!(rows.len() < 64, "too many rows for exhaustive enumeration");
    let mut cur = BitVector::zeros(len);
    f(&cur);
    for step in 1u64..(1u64 << rows.len()) {
        cur.xor_assign(&rows[step.trailing_zeros() as usize]);
        f(&cur);
    }
}

/// An `[n, k, d]` code containing `1_n`.
#[derive(Clone, Debug)]
pub struct BaseCode {
    n: usize,
    k: usize,
    d: usize,
    generator: BitMatrix,
    min_weight: Vec<BitVector>,
}

impl BaseCode {
    /// Builds a base code from any full-rank generator whose row space holds
    /// `1_n`. The subcode basis is found by greedily extending `{1_n}` with
    /// rows of `g` in order.
    pub fn new(g: &BitMatrix) -> Result<Self> {
        let n = g.num_cols();
        let k = g.num_rows();
        if !(2..=MAX_BASE_DIM).contains(&k) {
            return Err(Error::UnsupportedDimension { k, max: MAX_BASE_DIM });
        }
        let rank = g.rank();
        if rank != k {
            return Err(Error::RankDeficient { rank, rows: k });
        }
        let ones = BitVector::ones(n);
        if !g.in_span(&ones)? {
            return Err(Error::AllOnesNotInCode);
        }
        let mut basis = BitMatrix::from_rows(vec![ones])?;
        for row in g.rows() {
            if !basis.in_span(row)? {
                basis.push_row(row.clone())?;
            }
        }
        debug_assert_eq!(basis.num_rows(), k);
        Self::from_generator(basis)
    }

    /// Builds a base code from an explicit subcode basis. The generator becomes
    /// `[1_n; sub]`.
    pub fn with_subcode(sub: &BitMatrix) -> Result<Self> {
        let n = sub.num_cols();
        let g = BitMatrix::from_rows(vec![BitVector::ones(n)])?.stack(sub)?;
        let k = g.num_rows();
        if !(2..=MAX_BASE_DIM).contains(&k) {
            return Err(Error::UnsupportedDimension { k, max: MAX_BASE_DIM });
        }
        let rank = g.rank();
        if rank != k {
            // Either the subcode rows are dependent or they span 1_n.
            return Err(Error::RankDeficient { rank, rows: k });
        }
        Self::from_generator(g)
    }

    fn from_generator(generator: BitMatrix) -> Result<Self> {
        let n = generator.num_cols();
        let k = generator.num_rows();
        let mut d = usize::MAX;
        let mut min_weight = Vec::new();
        for msg in 1u64..(1u64 << k) {
            let c = generator.left_mul(&BitVector::from_u64_msb(msg, k))?;
            let w = c.weight();
            if w < d {
                d = w;
                min_weight.clear();
            }
            if w == d {
                min_weight.push(c);
            }
        }
        Ok(BaseCode {
            n,
            k,
            d,
            generator,
            min_weight,
        })
    }

    /// The full space `F_2^n` with subcode basis `e_1, ..., e_{n-1}`
    /// (the first `n-1` standard basis vectors).
    pub fn full_space(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedDimension { k: n, max: MAX_BASE_DIM });
        }
        let sub = BitMatrix::from_rows((0..n - 1).map(|i| BitVector::unit(n, i)).collect())?;
        Self::with_subcode(&sub)
    }

    /// The cyclic `[7,4,3]` Hamming code.
    pub fn hamming_7_4() -> Self {
        let g = BitMatrix::parse_text("1101000\n0110100\n0011010\n0001101\n")
            .expect("static matrix");
        Self::new(&g).expect("Hamming code contains the all-ones word")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Generator with row 0 equal to `1_n`.
    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    /// Rows `g_1 .. g_{k-1}`.
    pub fn subcode_rows(&self) -> &[BitVector] {
        &self.generator.rows()[1..]
    }

    pub fn subcode_generator(&self) -> BitMatrix {
        BitMatrix::from_rows_with_cols(self.subcode_rows().to_vec(), self.n).expect("same width")
    }

    /// All minimum-weight codewords, in message order.
    pub fn min_weight_codewords(&self) -> &[BitVector] {
        &self.min_weight
    }

    /// All `2^(k-1)` words of the subcode, indexed by the message
    /// `(b_1, ..., b_{k-1})` read as an integer with `b_1` most significant.
    pub fn subcode_words(&self) -> Vec<BitVector> {
        let k1 = self.k - 1;
        let sub = self.subcode_generator();
        (0..1u64 << k1)
            .map(|msg| sub.left_mul(&BitVector::from_u64_msb(msg, k1)).expect("width"))
            .collect()
    }

    /// All `2^k` codewords, indexed by the message `(b_0, ..., b_{k-1})` with
    /// `b_0` (the all-ones coefficient) most significant.
    pub fn codewords(&self) -> Vec<BitVector> {
        (0..1u64 << self.k)
            .map(|msg| {
                self.generator
                    .left_mul(&BitVector::from_u64_msb(msg, self.k))
                    .expect("width")
            })
            .collect()
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        v.len() == self.n && self.generator.in_span(v).unwrap_or(false)
    }
}

/// The code `C^⊗[r,m]` over a base code `C`.
#[derive(Clone, Debug)]
pub struct SubproductCode {
    base: BaseCode,
    r: usize,
    m: usize,
    len: usize,
    dim: usize,
    dmin: usize,
    generator: BitMatrix,
    /// Reduced echelon form of `generator`; restricted to `info_set` it is the identity.
    systematic: BitMatrix,
    info_set: Vec<usize>,
    parity_check: OnceLock<BitMatrix>,
}

/// Index tuples `j ∈ [k]^m` of Hamming weight `l`, in lexicographic order.
pub fn weight_tuples(k: usize, m: usize, l: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut j = vec![0usize; m];
    loop {
        if j.iter().filter(|&&x| x != 0).count() == l {
            out.push(j.clone());
        }
        // Odometer increment, last position fastest.
        let mut pos = m;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            j[pos] += 1;
            if j[pos] < k {
                break;
            }
            j[pos] = 0;
        }
    }
}

/// Decomposition `c = Σ_i d_i ⊗ g_i` of a codeword.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlotkinParts {
    /// `parts[0]` lies in `C^⊗[r,m-1]`, the rest in `C^⊗[r-1,m-1]`.
    pub parts: Vec<BitVector>,
}

impl SubproductCode {
    pub fn build(base: BaseCode, r: usize, m: usize) -> Result<Self> {
        Self::build_with_limit(base, r, m, DEFAULT_MAX_LEN)
    }

    pub fn build_with_limit(base: BaseCode, r: usize, m: usize, max_len: usize) -> Result<Self> {
        if m == 0 || r > m {
            return Err(Error::InvalidOrder { r, m });
        }
        let len = base
            .n
            .checked_pow(m as u32)
            .filter(|&l| l <= max_len)
            .ok_or(Error::TooLong {
                len: base.n.saturating_pow(m as u32),
                limit: max_len,
            })?;
        let k = base.k;
        let rows_g = base.generator.rows();
        let mut rows = Vec::new();
        for l in 0..=r {
            for j in weight_tuples(k, m, l) {
                let mut b = rows_g[j[0]].clone();
                for &jl in &j[1..] {
                    b = b.kron(&rows_g[jl]);
                }
                rows.push(b);
            }
        }
        let generator = BitMatrix::from_rows_with_cols(rows, len)?;
        let dim = (0..=r).map(|l| binomial(m, l) * (k - 1).pow(l as u32)).sum();
        debug_assert_eq!(generator.num_rows(), dim);
        let dmin = base.d.pow(r as u32) * base.n.pow((m - r) as u32);
        let ech = generator.echelon();
        Ok(SubproductCode {
            base,
            r,
            m,
            len,
            dim,
            dmin,
            generator,
            systematic: ech.rows,
            info_set: ech.pivots,
            parity_check: OnceLock::new(),
        })
    }

    pub fn base(&self) -> &BaseCode {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.r
    }

    pub fn factors(&self) -> usize {
        self.m
    }

    /// Block length `n^m`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dmin(&self) -> usize {
        self.dmin
    }

    pub fn rate(&self) -> f64 {
        self.dim as f64 / self.len as f64
    }

    /// `(k-1) / log2(n)`.
    pub fn alpha(&self) -> f64 {
        (self.base.k - 1) as f64 / (self.base.n as f64).log2()
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn systematic_generator(&self) -> &BitMatrix {
        &self.systematic
    }

    pub fn parity_check(&self) -> &BitMatrix {
        self.parity_check.get_or_init(|| self.generator.nullspace())
    }

    pub fn encode(&self, msg: &BitVector) -> Result<BitVector> {
        self.generator.left_mul(msg)
    }

    pub fn encode_systematic(&self, msg: &BitVector) -> Result<BitVector> {
        self.systematic.left_mul(msg)
    }

    /// Restriction of `c` to the information set. For a codeword this is the
    /// message that [`encode_systematic`](Self::encode_systematic) maps to `c`.
    pub fn extract_message(&self, c: &BitVector) -> Result<BitVector> {
        if c.len() != self.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                found: c.len(),
            });
        }
        Ok(c.select(&self.info_set))
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.parity_check().annihilates(v)
    }

    /// Splits a codeword into `k` parts of length `n^(m-1)`.
    ///
    /// Block `j` of `c` (positions `j*n .. j*n+n`) is a codeword of the base
    /// code; its coordinates in the basis `g_0..g_{k-1}` give entry `j` of each part.
    pub fn plotkin_decompose(&self, c: &BitVector) -> Result<PlotkinParts> {
        if c.len() != self.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                found: c.len(),
            });
        }
        if !self.contains(c) {
            return Err(Error::NotACodeword);
        }
        let n = self.base.n;
        let k = self.base.k;
        let blocks = self.len / n;
        let mut parts = vec![BitVector::zeros(blocks); k];
        let block_positions: Vec<Vec<usize>> =
            (0..blocks).map(|j| (j * n..j * n + n).collect()).collect();
        for (j, pos) in block_positions.iter().enumerate() {
            let block = c.select(pos);
            let coeffs = self
                .base
                .generator
                .solve_left(&block)?
                .ok_or(Error::NotACodeword)?;
            for i in coeffs.iter_ones() {
                parts[i].set(j, true);
            }
        }
        Ok(PlotkinParts { parts })
    }

    /// Inverse of [`plotkin_decompose`](Self::plotkin_decompose).
    pub fn plotkin_compose(&self, parts: &PlotkinParts) -> Result<BitVector> {
        let k = self.base.k;
        let blocks = self.len / self.base.n;
        if parts.parts.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: parts.parts.len(),
            });
        }
        let mut c = BitVector::zeros(self.len);
        for (d, g) in parts.parts.iter().zip(self.base.generator.rows()) {
            if d.len() != blocks {
                return Err(Error::DimensionMismatch {
                    expected: blocks,
                    found: d.len(),
                });
            }
            c.xor_assign(&d.kron(g));
        }
        // The block-wise coefficients in the basis of the base code are
        // exactly the parts, so the sum is a codeword iff every part lies in
        // its required code.
        if !self.contains(&c) {
            return Err(Error::NotACodeword);
        }
        Ok(c)
    }

    /// All codewords of weight `dmin`, as Kronecker products with a
    /// minimum-weight base codeword on each position of an `r`-subset and
    /// `1_n` elsewhere. Subsets are listed lexicographically, and within a
    /// subset the base codewords vary fastest on the last chosen position.
    pub fn enumerate_min_weight(&self) -> Result<Vec<BitVector>> {
        let (n, d) = (self.base.n, self.base.d);
        if n == 2 * d {
            return Err(Error::MinWeightUnavailable { n, d });
        }
        let amin = &self.base.min_weight;
        let ones = BitVector::ones(n);
        let mut out = Vec::with_capacity(binomial(self.m, self.r) * amin.len().pow(self.r as u32));
        for subset in subsets(self.m, self.r) {
            let total = amin.len().pow(self.r as u32);
            for idx in 0..total {
                // Mixed-radix digits of idx select the base codeword per chosen position.
                let mut digits = vec![0usize; self.r];
                let mut rest = idx;
                for slot in (0..self.r).rev() {
                    digits[slot] = rest % amin.len();
                    rest /= amin.len();
                }
                let mut word = BitVector::ones(1);
                let mut slot = 0;
                for pos in 0..self.m {
                    let factor = if slot < subset.len() && subset[slot] == pos {
                        let f = &amin[digits[slot]];
                        slot += 1;
                        f
                    } else {
                        &ones
                    };
                    word = word.kron(factor);
                }
                out.push(word);
            }
        }
        Ok(out)
    }

    /// Whether the minimum-weight codewords span the whole code.
    pub fn min_weight_spans(&self) -> Result<bool> {
        let rows = self.enumerate_min_weight()?;
        let m = BitMatrix::from_rows_with_cols(rows, self.len)?;
        Ok(m.rank() == self.dim)
    }

    /// Exhaustive minimum nonzero weight and its multiplicity. Only feasible
    /// for small dimensions.
    pub fn exhaustive_min_weight(&self) -> Result<(usize, usize)> {
        if self.dim > 30 {
            return Err(Error::UnsupportedDimension { k: self.dim, max: 30 });
        }
        let mut best = usize::MAX;
        let mut count = 0usize;
        let mut first = true;
        for_each_combination(self.generator.rows(), self.len, |c| {
            if first {
                first = false;
                return;
            }
            let w = c.weight();
            if w < best {
                best = w;
                count = 0;
            }
            if w == best {
                count += 1;
            }
        });
        Ok((best, count))
    }

    /// Every codeword, in Gray-code order of the generator rows.
    pub fn codebook(&self) -> Result<Vec<BitVector>> {
        if self.dim > MAX_BASE_DIM {
            return Err(Error::UnsupportedDimension {
                k: self.dim,
                max: MAX_BASE_DIM,
            });
        }
        let mut out = Vec::with_capacity(1 << self.dim);
        for_each_combination(self.generator.rows(), self.len, |c| out.push(c.clone()));
        Ok(out)
    }
}

/// `r`-subsets of `0..m` in lexicographic order.
pub fn subsets(m: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for x in start..m {
            cur.push(x);
            rec(x + 1, m, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, r, &mut Vec::new(), &mut out);
    out
}

/// `RM(r, m)` as the subproduct code over `F_2^2` with subcode basis `[0 1]`.
pub fn rm_code(r: usize, m: usize) -> Result<SubproductCode> {
    let sub = BitMatrix::parse_text("01")?;
    SubproductCode::build(BaseCode::with_subcode(&sub)?, r, m)
}

/// The Dual Berman code `DB_n(r, m)`, up to a fixed coordinate permutation.
pub fn dual_berman_code(n: usize, r: usize, m: usize) -> Result<SubproductCode> {
    SubproductCode::build(BaseCode::full_space(n)?, r, m)
}

/// `H^⊗[r,m]` over the `[7,4,3]` Hamming code.
pub fn hamming_code(r: usize, m: usize) -> Result<SubproductCode> {
    SubproductCode::build(BaseCode::hamming_7_4(), r, m)
}
