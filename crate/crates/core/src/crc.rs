//! Bit-serial CRC over message bit vectors.
//!
//! Convention: MSB-first polynomial division, zero initial remainder, no
//! reflection, no final XOR. The remainder of `msg(x) * x^w` modulo the
//! generator is appended after the message, highest-degree bit first.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::BitVector;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrcSpec {
    /// Coefficients from `x^w` down to `x^0`; the leading one is included.
    poly: Vec<bool>,
    message_len: usize,
}

impl CrcSpec {
    pub fn new(poly: Vec<bool>, message_len: usize) -> Result<Self> {
        if poly.len() < 2 || !poly[0] {
            return Err(Error::Config(
                "CRC polynomial needs degree >= 1 and a leading coefficient of 1".into(),
            ));
        }
        Ok(CrcSpec { poly, message_len })
    }

    /// Parses the generator polynomial from a `0x` hex or plain binary
    /// string, leading term included (`0x13` and `10011` both give `x^4+x+1`).
    pub fn parse(text: &str, message_len: usize) -> Result<Self> {
        let text = text.trim();
        let bits: Vec<bool> = if let Some(hex) = text.strip_prefix("0x").or(text.strip_prefix("0X")) {
            let value = u64::from_str_radix(hex, 16)
                .map_err(|e| Error::Parse(format!("bad CRC polynomial {text:?}: {e}")))?;
            if value == 0 {
                return Err(Error::Parse("CRC polynomial is zero".into()));
            }
            let degree = 63 - value.leading_zeros() as usize;
            (0..=degree).rev().map(|b| (value >> b) & 1 == 1).collect()
        } else {
            BitVector::from_str(text)?.iter().collect()
        };
        Self::new(bits, message_len)
    }

    /// `x^4 + x + 1`.
    pub fn x4_x_1(message_len: usize) -> Self {
        Self::new(vec![true, false, false, true, true], message_len).expect("valid")
    }

    pub fn width(&self) -> usize {
        self.poly.len() - 1
    }

    pub fn message_len(&self) -> usize {
        self.message_len
    }

    pub fn total_len(&self) -> usize {
        self.message_len + self.width()
    }

    /// Remainder of `bits(x) * x^w` when `shift`, else of `bits(x)`.
    fn remainder<I: Iterator<Item = bool>>(&self, bits: I, shift: bool) -> Vec<bool> {
        let w = self.width();
        let mut reg = vec![false; w];
        let feed = bits.chain(std::iter::repeat_n(false, if shift { w } else { 0 }));
        for b in feed {
            let out = reg[0];
            reg.rotate_left(1);
            reg[w - 1] = b;
            if out {
                for (r, &p) in reg.iter_mut().zip(&self.poly[1..]) {
                    *r ^= p;
                }
            }
        }
        reg
    }

    pub fn append(&self, msg: &BitVector) -> Result<BitVector> {
        if msg.len() != self.message_len {
            return Err(Error::DimensionMismatch {
                expected: self.message_len,
                found: msg.len(),
            });
        }
        let rem = self.remainder(msg.iter(), true);
        let mut bits: Vec<bool> = msg.iter().collect();
        bits.extend(rem);
        Ok(BitVector::from_bools(&bits))
    }

    pub fn check(&self, bits: &BitVector) -> Result<bool> {
        if bits.len() != self.total_len() {
            return Err(Error::DimensionMismatch {
                expected: self.total_len(),
                found: bits.len(),
            });
        }
        Ok(self.remainder(bits.iter(), false).iter().all(|&b| !b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Long division on integer polynomials, independent of the shift register.
    fn reference_remainder(msg: &[bool], poly: u64, w: usize) -> u64 {
        let mut value: u128 = 0;
        for &b in msg {
            value = (value << 1) | b as u128;
        }
        value <<= w;
        let total = msg.len() + w;
        for bit in (w..total).rev() {
            if (value >> bit) & 1 == 1 {
                value ^= (poly as u128) << (bit - w);
            }
        }
        value as u64
    }

    #[test]
    fn zero_message_has_zero_crc() {
        let spec = CrcSpec::x4_x_1(47);
        let out = spec.append(&BitVector::zeros(47)).unwrap();
        assert_eq!(out.len(), 51);
        assert!(out.is_zero());
    }

    #[test]
    fn matches_long_division() {
        let spec = CrcSpec::x4_x_1(47);
        let mut state = 0x1234_5678_9abc_def0u64;
        for _ in 0..200 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let bits: Vec<bool> = (0..47).map(|i| (state >> (i % 64)) & 1 == 1).collect();
            let out = spec.append(&BitVector::from_bools(&bits)).unwrap();
            let rem = reference_remainder(&bits, 0b10011, 4);
            let got: u64 = (47..51).fold(0, |acc, i| (acc << 1) | out.get(i) as u64);
            assert_eq!(got, rem);
            assert!(spec.check(&out).unwrap());
        }
    }

    #[test]
    fn known_vector() {
        // 1101_0000 mod 10011: xor 10011000 -> 01001000, xor 01001100 -> 0100.
        let spec = CrcSpec::x4_x_1(4);
        let out = spec.append(&"1101".parse().unwrap()).unwrap();
        assert_eq!(out, "11010100".parse().unwrap());
        assert_eq!(reference_remainder(&[true, true, false, true], 0b10011, 4), 0b0100);
    }

    #[test]
    fn single_bit_errors_are_detected() {
        let spec = CrcSpec::x4_x_1(47);
        let msg = BitVector::from_bools(&(0..47).map(|i| i % 3 == 0).collect::<Vec<_>>());
        let good = spec.append(&msg).unwrap();
        for i in 0..51 {
            let mut bad = good.clone();
            bad.flip(i);
            assert!(!spec.check(&bad).unwrap(), "flip at {i} undetected");
        }
    }

    #[test]
    fn parse_forms() {
        assert_eq!(CrcSpec::parse("0x13", 47).unwrap(), CrcSpec::x4_x_1(47));
        assert_eq!(CrcSpec::parse("10011", 47).unwrap(), CrcSpec::x4_x_1(47));
        assert!(CrcSpec::parse("0x0", 47).is_err());
        assert!(CrcSpec::parse("0011", 47).is_err());
        assert!(CrcSpec::parse("1", 47).is_err());
        assert!(CrcSpec::parse("0xzz", 47).is_err());
    }

    #[test]
    fn length_errors() {
        let spec = CrcSpec::x4_x_1(47);
        assert!(spec.append(&BitVector::zeros(46)).is_err());
        assert!(spec.check(&BitVector::zeros(47)).is_err());
    }
}
