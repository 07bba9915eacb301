//! Greedy search over the graph joining codewords at distance `dmin`.
//!
//! Vertices are codewords; `c` and `c ^ w` are adjacent for every
//! minimum-weight codeword `w`. Starting from a codeword, each step moves to
//! the unvisited neighbor of highest correlation with the channel LLRs and
//! the best codeword seen along the path is returned.

use rustc_hash::FxHashSet;

use crate::construction::SubproductCode;
use crate::crc::CrcSpec;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchConfig {
    pub path_len: usize,
    pub crc: Option<CrcSpec>,
}

/// Exact membership over systematic message bits of visited codewords.
#[derive(Clone, Debug, Default)]
pub struct VisitedSet {
    keys: FxHashSet<BitVector>,
}

impl VisitedSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` if the key was already present.
    pub fn insert(&mut self, key: BitVector) -> bool {
        self.keys.insert(key)
    }

    pub fn contains(&self, key: &BitVector) -> bool {
        self.keys.contains(key)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub codeword: BitVector,
    pub correlation: f64,
    /// `None` without a CRC; otherwise whether the returned word passes it.
    pub crc_ok: Option<bool>,
    /// Codewords on the path, start included.
    pub visited: usize,
    pub steps: usize,
}

#[derive(Clone, Debug)]
pub struct LocalGraphSearch {
    len: usize,
    dim: usize,
    parity_check: BitMatrix,
    info_set: Vec<usize>,
    min_weight: Vec<BitVector>,
    supports: Vec<Vec<usize>>,
    /// Systematic key of each minimum-weight word; keys are linear.
    keys: Vec<BitVector>,
}

impl LocalGraphSearch {
    /// Fails when the minimum-weight list is unavailable (`n = 2d`) or does
    /// not span the code, since the graph would then be disconnected.
    pub fn new(code: &SubproductCode) -> Result<Self> {
        let min_weight = code.enumerate_min_weight()?;
        let rank = BitMatrix::from_rows_with_cols(min_weight.clone(), code.len())?.rank();
        if rank != code.dim() {
            return Err(Error::RankDeficient {
                rank,
                rows: code.dim(),
            });
        }
        let supports = min_weight.iter().map(|w| w.iter_ones().collect()).collect();
        let keys = min_weight
            .iter()
            .map(|w| code.extract_message(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(LocalGraphSearch {
            len: code.len(),
            dim: code.dim(),
            parity_check: code.parity_check().clone(),
            info_set: code.info_set().to_vec(),
            min_weight,
            supports,
            keys,
        })
    }

    pub fn min_weight_codewords(&self) -> &[BitVector] {
        &self.min_weight
    }

    pub fn degree(&self) -> usize {
        self.min_weight.len()
    }

    fn check_codeword(&self, c: &BitVector) -> Result<()> {
        if c.len() != self.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                found: c.len(),
            });
        }
        if !self.parity_check.annihilates(c) {
            return Err(Error::NotACodeword);
        }
        Ok(())
    }

    pub fn key(&self, c: &BitVector) -> BitVector {
        c.select(&self.info_set)
    }

    /// `c ^ w` for every minimum-weight `w`, in enumeration order.
    pub fn neighbors(&self, c: &BitVector) -> Result<Vec<BitVector>> {
        self.check_codeword(c)?;
        Ok(self.min_weight.iter().map(|w| c.xor(w)).collect())
    }

    pub fn search(&self, start: &BitVector, llr: &[f64], cfg: &SearchConfig) -> Result<SearchOutcome> {
        self.check_codeword(start)?;
        if llr.len() != self.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                found: llr.len(),
            });
        }
        if let Some(crc) = &cfg.crc {
            if crc.total_len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: crc.total_len(),
                });
            }
        }
        let crc_pass = |key: &BitVector| -> Result<bool> {
            match &cfg.crc {
                Some(crc) => crc.check(key),
                None => Ok(true),
            }
        };

        let mut current = start.clone();
        let mut key = self.key(start);
        // signed[i] = (-1)^{c_i} * llr_i, so the correlation is its sum.
        let mut signed: Vec<f64> = llr
            .iter()
            .enumerate()
            .map(|(i, &l)| if current.get(i) { -l } else { l })
            .collect();
        let mut corr = start.correlation(llr);

        let mut visited = VisitedSet::new();
        visited.insert(key.clone());
        let mut best_any = (current.clone(), corr);
        let mut best_pass = if crc_pass(&key)? {
            Some((current.clone(), corr))
        } else {
            None
        };

        let mut scratch = BitVector::zeros(self.dim);
        let mut steps = 0;
        while steps < cfg.path_len {
            let mut choice: Option<(usize, f64)> = None;
            for (idx, support) in self.supports.iter().enumerate() {
                let delta = -2.0 * support.iter().map(|&i| signed[i]).sum::<f64>();
                if choice.is_some_and(|(_, best)| delta <= best) {
                    continue;
                }
                // Membership is only checked for candidates that would win.
                scratch.assign_xor(&key, &self.keys[idx]);
                if !visited.contains(&scratch) {
                    choice = Some((idx, delta));
                }
            }
            let Some((idx, _)) = choice else { break };
            current.xor_assign(&self.min_weight[idx]);
            key.xor_assign(&self.keys[idx]);
            for &i in &self.supports[idx] {
                signed[i] = -signed[i];
            }
            corr = current.correlation(llr);
            visited.insert(key.clone());
            steps += 1;

            if corr > best_any.1 {
                best_any = (current.clone(), corr);
            }
            if crc_pass(&key)? && best_pass.as_ref().is_none_or(|(_, b)| corr > *b) {
                best_pass = Some((current.clone(), corr));
            }
        }

        let (crc_ok, (codeword, correlation)) = match (&cfg.crc, best_pass) {
            (None, _) => (None, best_any),
            (Some(_), Some(pass)) => (Some(true), pass),
            (Some(_), None) => (Some(false), best_any),
        };
        Ok(SearchOutcome {
            codeword,
            correlation,
            crc_ok,
            visited: visited.len(),
            steps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::modulate;
    use crate::construction::{dual_berman_code, rm_code};
    use rand::Rng;

    fn random_codeword<R: Rng>(code: &SubproductCode, rng: &mut R) -> BitVector {
        let msg = BitVector::from_bools(&(0..code.dim()).map(|_| rng.random()).collect::<Vec<_>>());
        code.encode(&msg).unwrap()
    }

    #[test]
    fn degree_of_second_order_db() {
        let code = dual_berman_code(3, 2, 5).unwrap();
        let lgs = LocalGraphSearch::new(&code).unwrap();
        assert_eq!(lgs.degree(), 90);
        let zero = BitVector::zeros(code.len());
        assert_eq!(lgs.neighbors(&zero).unwrap(), code.enumerate_min_weight().unwrap());
    }

    #[test]
    fn neighbors_are_codewords_at_dmin() {
        let code = dual_berman_code(3, 2, 4).unwrap();
        let lgs = LocalGraphSearch::new(&code).unwrap();
        let mut rng = rand::rng();
        for _ in 0..5 {
            let c = random_codeword(&code, &mut rng);
            for nb in lgs.neighbors(&c).unwrap() {
                assert!(code.contains(&nb));
                assert_eq!(nb.xor(&c).weight(), code.dmin());
                assert!(lgs.neighbors(&nb).unwrap().contains(&c));
            }
        }
    }

    #[test]
    fn rejects_non_codewords_and_rm() {
        let code = dual_berman_code(3, 2, 3).unwrap();
        let lgs = LocalGraphSearch::new(&code).unwrap();
        let mut bad = BitVector::zeros(code.len());
        bad.set(0, true);
        assert!(matches!(lgs.neighbors(&bad), Err(Error::NotACodeword)));
        let llr = vec![0.0; code.len()];
        assert!(lgs.search(&bad, &llr, &SearchConfig::default()).is_err());
        assert!(LocalGraphSearch::new(&rm_code(1, 3).unwrap()).is_err());
    }

    #[test]
    fn zero_path_returns_start() {
        let code = dual_berman_code(3, 2, 3).unwrap();
        let lgs = LocalGraphSearch::new(&code).unwrap();
        let mut rng = rand::rng();
        let c = random_codeword(&code, &mut rng);
        let llr: Vec<f64> = (0..code.len()).map(|_| rng.random_range(-3.0..3.0)).collect();
        let out = lgs.search(&c, &llr, &SearchConfig::default()).unwrap();
        assert_eq!(out.codeword, c);
        assert_eq!(out.steps, 0);
        assert_eq!(out.visited, 1);
    }

    #[test]
    fn clean_start_is_kept() {
        let code = dual_berman_code(3, 2, 4).unwrap();
        let lgs = LocalGraphSearch::new(&code).unwrap();
        let c = random_codeword(&code, &mut rand::rng());
        let llr: Vec<f64> = modulate(&c).iter().map(|x| 50.0 * x).collect();
        let cfg = SearchConfig {
            path_len: 20,
            crc: None,
        };
        let out = lgs.search(&c, &llr, &cfg).unwrap();
        assert_eq!(out.codeword, c);
        assert_eq!(out.steps, 20);
        assert_eq!(out.visited, 21);
    }

    #[test]
    fn crc_length_must_match_dimension() {
        let code = dual_berman_code(3, 2, 3).unwrap();
        let lgs = LocalGraphSearch::new(&code).unwrap();
        let cfg = SearchConfig {
            path_len: 1,
            crc: Some(CrcSpec::x4_x_1(code.dim())),
        };
        let zero = BitVector::zeros(code.len());
        assert!(lgs.search(&zero, &vec![1.0; code.len()], &cfg).is_err());
    }

    #[test]
    fn visited_set_contract() {
        let mut v = VisitedSet::new();
        let a: BitVector = "0110".parse().unwrap();
        assert!(!v.contains(&a));
        assert!(v.insert(a.clone()));
        assert!(v.contains(&a));
        assert!(!v.insert(a));
        assert!(!v.contains(&"0111".parse().unwrap()));
        assert_eq!(v.len(), 1);
    }
}
