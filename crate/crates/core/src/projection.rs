//! Tuple indexing, puncturing and order-reducing projections.
//!
//! Coordinate `i` (0-based) of a length-`n^m` word is identified with the
//! digits of its base-`n` expansion, most significant first. Freezing the
//! digits on a set `F` of positions to a value `u` selects `n^(m-f)`
//! coordinates; those are ordered by the remaining digits, kept in their
//! original positional order. Adding the two punctured words for distinct
//! values `u`, `ũ` maps `C^⊗[r,m]` into `C^⊗[r-1,m-f]`.

use crate::construction::{binomial, subsets, SubproductCode};
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Digits of `index` in base `n`, `m` of them, most significant first.
pub fn to_tuple(index: usize, n: usize, m: usize) -> Result<Vec<usize>> {
    let len = n.pow(m as u32);
    if index >= len {
        return Err(Error::InvalidProjection(format!(
            "index {index} out of range for length {len}"
        )));
    }
    let mut digits = vec![0; m];
    let mut rest = index;
    for d in digits.iter_mut().rev() {
        *d = rest % n;
        rest /= n;
    }
    Ok(digits)
}

pub fn from_tuple(digits: &[usize], n: usize) -> Result<usize> {
    digits.iter().try_fold(0usize, |acc, &d| {
        if d >= n {
            Err(Error::InvalidProjection(format!("digit {d} out of range for n={n}")))
        } else {
            Ok(acc * n + d)
        }
    })
}

/// Coordinates whose digits on `frozen` equal `value`, ordered by the free digits.
pub fn puncture_set(n: usize, m: usize, frozen: &[usize], value: &[usize]) -> Result<Vec<usize>> {
    validate_frozen(n, m, frozen, value)?;
    let free: Vec<usize> = (0..m).filter(|p| !frozen.contains(p)).collect();
    let count = n.pow(free.len() as u32);
    let mut digits = vec![0usize; m];
    for (&p, &v) in frozen.iter().zip(value) {
        digits[p] = v;
    }
    let mut out = Vec::with_capacity(count);
    for rest in 0..count {
        let mut r = rest;
        for &p in free.iter().rev() {
            digits[p] = r % n;
            r /= n;
        }
        out.push(from_tuple(&digits, n)?);
    }
    Ok(out)
}

fn validate_frozen(n: usize, m: usize, frozen: &[usize], value: &[usize]) -> Result<()> {
    if frozen.is_empty() || frozen.len() > m {
        return Err(Error::InvalidProjection(format!(
            "frozen set size {} not in 1..={m}",
            frozen.len()
        )));
    }
    if frozen.windows(2).any(|w| w[0] >= w[1]) || frozen.iter().any(|&p| p >= m) {
        return Err(Error::InvalidProjection(format!(
            "frozen positions {frozen:?} must be strictly increasing and below {m}"
        )));
    }
    if value.len() != frozen.len() || value.iter().any(|&v| v >= n) {
        return Err(Error::InvalidProjection(format!(
            "value {value:?} does not fit frozen set {frozen:?} over [{n}]"
        )));
    }
    Ok(())
}

/// A projection: frozen positions and two distinct values for them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionSpec {
    pub n: usize,
    pub m: usize,
    pub frozen: Vec<usize>,
    pub u: Vec<usize>,
    pub u_tilde: Vec<usize>,
}

impl ProjectionSpec {
    pub fn new(
        n: usize,
        m: usize,
        frozen: Vec<usize>,
        u: Vec<usize>,
        u_tilde: Vec<usize>,
    ) -> Result<Self> {
        validate_frozen(n, m, &frozen, &u)?;
        validate_frozen(n, m, &frozen, &u_tilde)?;
        if u == u_tilde {
            return Err(Error::InvalidProjection("u and ũ must differ".into()));
        }
        Ok(ProjectionSpec {
            n,
            m,
            frozen,
            u,
            u_tilde,
        })
    }

    pub fn f(&self) -> usize {
        self.frozen.len()
    }

    /// Length `n^(m-f)` of the projected word.
    pub fn projected_len(&self) -> usize {
        self.n.pow((self.m - self.f()) as u32)
    }

    /// Coordinate pairs `(i, ĩ)` combined into entry `i'` of the projection.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let h = puncture_set(self.n, self.m, &self.frozen, &self.u).expect("validated");
        let ht = puncture_set(self.n, self.m, &self.frozen, &self.u_tilde).expect("validated");
        h.into_iter().zip(ht).collect()
    }
}

/// `P_H(c) + P_H̃(c)` over GF(2).
pub fn project(c: &BitVector, spec: &ProjectionSpec) -> Result<BitVector> {
    let len = spec.n.pow(spec.m as u32);
    if c.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            found: c.len(),
        });
    }
    let pairs = spec.pairs();
    let mut out = BitVector::zeros(pairs.len());
    for (k, (i, it)) in pairs.into_iter().enumerate() {
        if c.get(i) ^ c.get(it) {
            out.set(k, true);
        }
    }
    Ok(out)
}

/// Every projection with `f` frozen positions valid for the code's order:
/// frozen sets lexicographically, then unordered pairs `{u, ũ}` with `u < ũ`
/// in lexicographic order.
pub fn enumerate_projections(code: &SubproductCode, f: usize) -> Result<Vec<ProjectionSpec>> {
    let (n, m, r) = (code.base().n(), code.factors(), code.order());
    let max_f = m.min(m + 1 - r);
    if f == 0 || f > max_f {
        return Err(Error::InvalidProjection(format!(
            "f={f} outside 1..={max_f} for r={r}, m={m}"
        )));
    }
    let values = n.pow(f as u32);
    let mut out = Vec::with_capacity(binomial(m, f) * binomial(values, 2));
    for frozen in subsets(m, f) {
        for a in 0..values {
            for b in a + 1..values {
                out.push(ProjectionSpec {
                    n,
                    m,
                    frozen: frozen.clone(),
                    u: to_tuple(a, n, f)?,
                    u_tilde: to_tuple(b, n, f)?,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{dual_berman_code, rm_code};

    #[test]
    fn tuple_examples() {
        assert_eq!(to_tuple(0, 3, 2).unwrap(), vec![0, 0]);
        assert_eq!(to_tuple(4, 3, 2).unwrap(), vec![1, 1]);
        assert!(to_tuple(9, 3, 2).is_err());
        for i in 0..81 {
            assert_eq!(from_tuple(&to_tuple(i, 3, 4).unwrap(), 3).unwrap(), i);
        }
        assert!(from_tuple(&[0, 3], 3).is_err());
    }

    #[test]
    fn puncture_examples() {
        assert_eq!(puncture_set(3, 1, &[0], &[2]).unwrap(), vec![2]);
        assert_eq!(puncture_set(3, 2, &[1], &[0]).unwrap(), vec![0, 3, 6]);
        assert_eq!(puncture_set(3, 4, &[0, 2], &[1, 1]).unwrap().len(), 9);
        assert!(puncture_set(3, 2, &[2], &[0]).is_err());
        assert!(puncture_set(3, 2, &[1, 0], &[0, 0]).is_err());
        assert!(puncture_set(3, 2, &[0], &[3]).is_err());
    }

    #[test]
    fn spec_rejects_equal_values() {
        assert!(ProjectionSpec::new(3, 2, vec![0], vec![1], vec![1]).is_err());
        assert!(ProjectionSpec::new(3, 2, vec![0], vec![1], vec![2]).is_ok());
    }

    #[test]
    fn projection_of_constant_words() {
        let spec = ProjectionSpec::new(3, 3, vec![1], vec![0], vec![2]).unwrap();
        assert!(project(&BitVector::ones(27), &spec).unwrap().is_zero());
        assert!(project(&BitVector::zeros(27), &spec).unwrap().is_zero());
        assert!(project(&BitVector::zeros(26), &spec).is_err());
    }

    #[test]
    fn projection_counts() {
        let c = dual_berman_code(3, 2, 5).unwrap();
        assert_eq!(enumerate_projections(&c, 1).unwrap().len(), 15);
        let h = crate::construction::hamming_code(2, 3).unwrap();
        assert_eq!(enumerate_projections(&h, 1).unwrap().len(), 63);
        let rm = rm_code(2, 3).unwrap();
        assert_eq!(enumerate_projections(&rm, 2).unwrap().len(), 18);
        assert!(enumerate_projections(&rm, 3).is_err());
        assert!(enumerate_projections(&rm, 0).is_err());
    }

    #[test]
    fn punctured_sets_are_disjoint() {
        let c = dual_berman_code(3, 2, 4).unwrap();
        for f in 1..=2 {
            for spec in enumerate_projections(&c, f).unwrap() {
                let pairs = spec.pairs();
                assert_eq!(pairs.len(), spec.projected_len());
                let mut seen = std::collections::HashSet::new();
                for (a, b) in pairs {
                    assert!(seen.insert(a));
                    assert!(seen.insert(b));
                }
            }
        }
    }
}
