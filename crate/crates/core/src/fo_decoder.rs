//! ML and max-log-MAP decoding of first-order codes `C^⊗[1,m]`.
//!
//! Every codeword of `C^⊗[1,m]` has the form `d ⊗ 1_n + 1_{n^(m-1)} ⊗ a` with
//! `d ∈ C^⊗[1,m-1]` and `a` in the subcode, so its bipolar image is
//! `d^b ⊗ a^b`. Splitting the LLRs into `n^(m-1)` blocks of `n`, the
//! correlation becomes `<d^b, l(a)>` where `l(a)_j = Σ_i a^b_i l_{j,i}`.
//! Both decoders recurse on this identity, one branch per subcode word.

use crate::construction::BaseCode;
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Decoded codeword with its correlation metric `<c^b, l>`.
#[derive(Clone, Debug, PartialEq)]
pub struct MlResult {
    pub codeword: BitVector,
    pub metric: f64,
}

impl MlResult {
    pub fn bipolar(&self) -> Vec<f64> {
        self.codeword.bipolar()
    }
}

/// Best correlations with coordinate `(j, i)` fixed to `+1` (`plus`) or
/// `-1` (`minus`), stored at flat index `j * n + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialLlrs {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

/// Exhaustive ML over an explicit codebook. Ties go to the lowest index.
pub fn brute_ml(codebook: &[BitVector], llr: &[f64]) -> Result<MlResult> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, c) in codebook.iter().enumerate() {
        if c.len() != llr.len() {
            return Err(Error::DimensionMismatch {
                expected: llr.len(),
                found: c.len(),
            });
        }
        let metric = c.correlation(llr);
        if best.is_none_or(|(_, m)| metric > m) {
            best = Some((idx, metric));
        }
    }
    let (idx, metric) = best.ok_or(Error::EmptyCodebook)?;
    Ok(MlResult {
        codeword: codebook[idx].clone(),
        metric,
    })
}

/// Max-log-MAP soft output over an explicit codebook:
/// `L_i = (max_{c_i=0} <c^b,l> - max_{c_i=1} <c^b,l>) / 2`.
///
/// A position where every codeword agrees gets `±inf`.
pub fn max_log_map_exhaustive(codebook: &[BitVector], llr: &[f64]) -> Vec<f64> {
    let len = llr.len();
    let mut plus = vec![f64::NEG_INFINITY; len];
    let mut minus = vec![f64::NEG_INFINITY; len];
    for c in codebook {
        let metric = c.correlation(llr);
        for i in 0..len {
            let slot = if c.get(i) { &mut minus[i] } else { &mut plus[i] };
            if metric > *slot {
                *slot = metric;
            }
        }
    }
    plus.iter().zip(&minus).map(|(p, q)| 0.5 * (p - q)).collect()
}

/// `l(a)_j = Σ_i a^b_i l_{j,i}` for a bipolar pattern `signs` of length `n`.
pub fn projected_llr(llr: &[f64], signs: &[f64]) -> Result<Vec<f64>> {
    let n = signs.len();
    if n == 0 || llr.len() % n != 0 {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: llr.len(),
        });
    }
    Ok(project_into(llr, signs))
}

fn project_into(llr: &[f64], signs: &[f64]) -> Vec<f64> {
    llr.chunks_exact(signs.len())
        .map(|block| block.iter().zip(signs).map(|(l, s)| l * s).sum())
        .collect()
}

/// Recursive decoders for `C^⊗[1,m]` over a fixed base code.
#[derive(Clone, Debug)]
pub struct FirstOrderDecoder {
    n: usize,
    /// Subcode words in message order.
    sub_words: Vec<BitVector>,
    /// Bipolar images of `sub_words`.
    sub_signs: Vec<Vec<f64>>,
}

impl FirstOrderDecoder {
    pub fn new(base: &BaseCode) -> Self {
        let sub_words = base.subcode_words();
        let sub_signs = sub_words.iter().map(BitVector::bipolar).collect();
        FirstOrderDecoder {
            n: base.n(),
            sub_words,
            sub_signs,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check_len(&self, m: usize, llr: &[f64]) -> Result<()> {
        let expected = self.n.pow(m as u32);
        if m == 0 || llr.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: llr.len(),
            });
        }
        Ok(())
    }

    /// Fast ML decoding of `C^⊗[1,m]`.
    pub fn ml(&self, m: usize, llr: &[f64]) -> Result<MlResult> {
        self.check_len(m, llr)?;
        Ok(self.ml_rec(m, llr))
    }

    fn ml_rec(&self, m: usize, llr: &[f64]) -> MlResult {
        if m == 1 {
            return self.ml_base(llr);
        }
        let mut best: Option<(usize, MlResult)> = None;
        for (t, signs) in self.sub_signs.iter().enumerate() {
            let projected = project_into(llr, signs);
            let inner = self.ml_rec(m - 1, &projected);
            if best.as_ref().is_none_or(|(_, b)| inner.metric > b.metric) {
                best = Some((t, inner));
            }
        }
        let (t, inner) = best.expect("subcode is nonempty");
        // c = d ⊗ 1_n + 1 ⊗ a, i.e. c_{j,i} = d_j xor a_i.
        let a = &self.sub_words[t];
        let mut codeword = BitVector::zeros(llr.len());
        for j in 0..inner.codeword.len() {
            let flip = inner.codeword.get(j);
            for i in 0..self.n {
                if flip ^ a.get(i) {
                    codeword.set(j * self.n + i, true);
                }
            }
        }
        MlResult {
            codeword,
            metric: inner.metric,
        }
    }

    /// Base case over the `2^(k-1)` subcode words and their complements.
    fn ml_base(&self, llr: &[f64]) -> MlResult {
        let mut pos: Option<(usize, f64)> = None;
        let mut neg: Option<(usize, f64)> = None;
        for (t, signs) in self.sub_signs.iter().enumerate() {
            let corr: f64 = signs.iter().zip(llr).map(|(s, l)| s * l).sum();
            if pos.is_none_or(|(_, m)| corr > m) {
                pos = Some((t, corr));
            }
            if neg.is_none_or(|(_, m)| -corr > m) {
                neg = Some((t, -corr));
            }
        }
        let (tp, mp) = pos.expect("nonempty");
        let (tn, mn) = neg.expect("nonempty");
        // Subcode words precede their complements in codebook order.
        if mp >= mn {
            MlResult {
                codeword: self.sub_words[tp].clone(),
                metric: mp,
            }
        } else {
            MlResult {
                codeword: self.sub_words[tn].not(),
                metric: mn,
            }
        }
    }

    /// `L^{(±1)}_{j,i}` for every coordinate.
    pub fn partial_llrs(&self, m: usize, llr: &[f64]) -> Result<PartialLlrs> {
        self.check_len(m, llr)?;
        Ok(self.partial_rec(m, llr))
    }

    fn partial_rec(&self, m: usize, llr: &[f64]) -> PartialLlrs {
        let n = self.n;
        let mut plus = vec![f64::NEG_INFINITY; llr.len()];
        let mut minus = vec![f64::NEG_INFINITY; llr.len()];
        if m == 1 {
            for signs in &self.sub_signs {
                let corr: f64 = signs.iter().zip(llr).map(|(s, l)| s * l).sum();
                for i in 0..n {
                    // The word itself has sign signs[i] at i; its complement the opposite.
                    let (same, other) = if signs[i] > 0.0 {
                        (&mut plus, &mut minus)
                    } else {
                        (&mut minus, &mut plus)
                    };
                    same[i] = same[i].max(corr);
                    other[i] = other[i].max(-corr);
                }
            }
            return PartialLlrs { plus, minus };
        }
        for signs in &self.sub_signs {
            let projected = project_into(llr, signs);
            let inner = self.partial_rec(m - 1, &projected);
            for j in 0..projected.len() {
                let (ip, im) = (inner.plus[j], inner.minus[j]);
                for i in 0..n {
                    let idx = j * n + i;
                    // c_{j,i} = d_j a_i: +1 needs d_j = a_i, -1 needs d_j = -a_i.
                    let (p, q) = if signs[i] > 0.0 { (ip, im) } else { (im, ip) };
                    if p > plus[idx] {
                        plus[idx] = p;
                    }
                    if q > minus[idx] {
                        minus[idx] = q;
                    }
                }
            }
        }
        PartialLlrs { plus, minus }
    }

    /// Max-log-MAP output `(L^{(+1)} - L^{(-1)}) / 2`.
    pub fn max_log_map(&self, m: usize, llr: &[f64]) -> Result<Vec<f64>> {
        let p = self.partial_llrs(m, llr)?;
        Ok(p.plus.iter().zip(&p.minus).map(|(a, b)| 0.5 * (a - b)).collect())
    }
}
