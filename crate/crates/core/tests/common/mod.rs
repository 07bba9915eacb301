#![allow(dead_code)]

//! Reference implementations used as oracles. They avoid the library's
//! construction and decoding code and only rely on `BitVector` storage.

use subproduct::{BitMatrix, BitVector};

/// Base code given as `1_n` followed by explicit subcode rows.
pub struct RefBase {
    pub n: usize,
    pub rows: Vec<Vec<bool>>,
}

fn parse_row(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

impl RefBase {
    pub fn new(sub: &[&str]) -> Self {
        let n = sub[0].len();
        let mut rows = vec![vec![true; n]];
        rows.extend(sub.iter().map(|s| parse_row(s)));
        RefBase { n, rows }
    }

    pub fn full_space(n: usize) -> Self {
        let mut rows = vec![vec![true; n]];
        for i in 0..n - 1 {
            let mut e = vec![false; n];
            e[i] = true;
            rows.push(e);
        }
        RefBase { n, rows }
    }

    pub fn hamming() -> Self {
        RefBase::new(&["1101000", "0110100", "0011010"])
    }

    /// `[9,5,3]`: `1 ⊗ 1`, `e_i ⊗ 1`, `1 ⊗ e_i` for `i < 2`.
    pub fn db9() -> Self {
        let e = |i: usize| (0..3).map(|j| j == i).collect::<Vec<bool>>();
        let one = vec![true; 3];
        let mut rows = vec![kron(&one, &one)];
        for i in 0..2 {
            rows.push(kron(&e(i), &one));
            rows.push(kron(&one, &e(i)));
        }
        RefBase { n: 9, rows }
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    /// Minimum nonzero weight by enumerating all messages.
    pub fn d(&self) -> usize {
        let k = self.k();
        (1u32..1 << k)
            .map(|msg| {
                let mut word = vec![false; self.n];
                for (b, row) in self.rows.iter().enumerate() {
                    if msg >> b & 1 == 1 {
                        for (w, r) in word.iter_mut().zip(row) {
                            *w ^= r;
                        }
                    }
                }
                word.iter().filter(|&&x| x).count()
            })
            .min()
            .unwrap()
    }
}

pub fn kron(a: &[bool], b: &[bool]) -> Vec<bool> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x && y);
        }
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Kronecker products `g_{j_0} ⊗ ... ⊗ g_{j_{m-1}}` over every tuple with
/// at most `r` nonzero entries.
pub fn ref_generator(base: &RefBase, r: usize, m: usize) -> Vec<Vec<bool>> {
    let k = base.k();
    let mut out = Vec::new();
    let total = k.pow(m as u32);
    for t in 0..total {
        let mut digits = vec![0; m];
        let mut rest = t;
        for d in digits.iter_mut().rev() {
            *d = rest % k;
            rest /= k;
        }
        if digits.iter().filter(|&&d| d != 0).count() > r {
            continue;
        }
        let mut word = vec![true];
        for &d in &digits {
            word = kron(&word, &base.rows[d]);
        }
        out.push(word);
    }
    out
}

pub fn ref_dim(k: usize, r: usize, m: usize) -> usize {
    (0..=r.min(m)).map(|l| binomial(m, l) * (k - 1).pow(l as u32)).sum()
}

pub fn to_matrix(rows: &[Vec<bool>]) -> BitMatrix {
    let cols = rows.first().map_or(0, Vec::len);
    BitMatrix::from_rows_with_cols(rows.iter().map(|r| BitVector::from_bools(r)).collect(), cols).unwrap()
}

/// Every codeword spanned by `rows`, in Gray-code order.
pub fn span(rows: &[BitVector], len: usize) -> Vec<BitVector> {
    let mut out = Vec::with_capacity(1 << rows.len());
    let mut cur = BitVector::zeros(len);
    out.push(cur.clone());
    for step in 1u64..(1u64 << rows.len()) {
        cur.xor_assign(&rows[step.trailing_zeros() as usize]);
        out.push(cur.clone());
    }
    out
}

pub fn corr(c: &BitVector, llr: &[f64]) -> f64 {
    llr.iter()
        .enumerate()
        .map(|(i, &l)| if c.get(i) { -l } else { l })
        .sum()
}

/// `(max_{c_p = 0} corr, max_{c_p = 1} corr)` for every position `p`.
pub fn ref_partial(book: &[BitVector], llr: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut plus = vec![f64::NEG_INFINITY; llr.len()];
    let mut minus = vec![f64::NEG_INFINITY; llr.len()];
    for c in book {
        let v = corr(c, llr);
        for p in 0..llr.len() {
            let slot = if c.get(p) { &mut minus[p] } else { &mut plus[p] };
            *slot = slot.max(v);
        }
    }
    (plus, minus)
}

pub fn ref_ml_metric(book: &[BitVector], llr: &[f64]) -> f64 {
    book.iter().map(|c| corr(c, llr)).fold(f64::NEG_INFINITY, f64::max)
}

/// Deterministic Gaussian LLR vectors around a random codeword of `book`.
pub fn awgn_llrs(book: &[BitVector], count: usize, sigma: f64, seed: u64) -> Vec<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let c = &book[rng.random_range(0..book.len())];
            (0..c.len())
                .map(|i| {
                    let x = if c.get(i) { -1.0 } else { 1.0 };
                    let z: f64 = rng.sample(StandardNormal);
                    2.0 * (x + sigma * z) / (sigma * sigma)
                })
                .collect()
        })
        .collect()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
