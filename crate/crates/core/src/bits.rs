//! Bit strings with an explicit length, plus small writer/reader helpers used by
//! every certificate format in the crate.

use serde::{Deserialize, Serialize};

use crate::error::{PlsError, Result};

/// A finite bit string. Certificates and labels are both of this type.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    /// `value` written in exactly `width` bits, most significant first.
    pub fn from_uint(value: u64, width: usize) -> Self {
        let mut w = BitWriter::new();
        w.uint(value, width);
        w.finish()
    }

    /// All strings of length `len`, indexed by `index` in `0..2^len`.
    pub fn nth_of_len(index: u64, len: usize) -> Self {
        Self::from_uint(index, len)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, b: bool) {
        self.bits[i] = b;
    }

    pub fn push(&mut self, b: bool) {
        self.bits.push(b);
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn extend(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString { bits: self.bits[start..end].to_vec() }
    }

    pub fn truncate(&mut self, len: usize) {
        self.bits.truncate(len);
    }

    /// Unsigned value of the whole string, or `None` when it has more than 64
    /// significant bits.
    pub fn to_uint(&self) -> Option<u64> {
        let mut v: u64 = 0;
        for &b in &self.bits {
            if v >> 63 != 0 {
                return None;
            }
            v = (v << 1) | b as u64;
        }
        Some(v)
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { bits: &self.bits, pos: 0 }
    }

    /// Packs the bits MSB-first into bytes (zero padded) and hex encodes them.
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.bits.len().div_ceil(4));
        for chunk in self.bits.chunks(8) {
            let mut byte = 0u8;
            for (i, &b) in chunk.iter().enumerate() {
                if b {
                    byte |= 0x80 >> i;
                }
            }
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        if hex.len() % 2 != 0 || hex.len() / 2 != len.div_ceil(8) {
            return Err(PlsError::Malformed(format!(
                "hex string of {} chars cannot hold exactly {len} bits",
                hex.len()
            )));
        }
        let mut bits = Vec::with_capacity(len);
        for i in 0..hex.len() / 2 {
            let byte = u8::from_str_radix(&hex[2 * i..2 * i + 2], 16)
                .map_err(|e| PlsError::Malformed(format!("bad hex: {e}")))?;
            for j in 0..8 {
                if bits.len() < len {
                    bits.push(byte & (0x80 >> j) != 0);
                } else if byte & (0x80 >> j) != 0 {
                    return Err(PlsError::Malformed("nonzero padding bits".into()));
                }
            }
        }
        Ok(Self { bits })
    }
}

impl std::fmt::Display for BitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Wire form shared by certificate files: `{"bits": <hex>, "len": <n>}`.
#[derive(Serialize, Deserialize)]
struct WireBits {
    bits: String,
    len: usize,
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WireBits { bits: self.to_hex(), len: self.len() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = WireBits::deserialize(d)?;
        BitString::from_hex(&w.bits, w.len).map_err(serde::de::Error::custom)
    }
}

/// Number of bits needed to write `v` in binary (0 needs 0 bits).
pub fn bit_width(v: u64) -> usize {
    (64 - v.leading_zeros()) as usize
}

/// ⌈log2 n⌉, with the convention that it is at least 1.
pub fn log2_ceil(n: u64) -> usize {
    if n <= 2 {
        1
    } else {
        bit_width(n - 1)
    }
}

#[derive(Default)]
pub struct BitWriter {
    bits: Vec<bool>,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bit(&mut self, b: bool) {
        self.bits.push(b);
    }

    pub fn uint(&mut self, value: u64, width: usize) {
        debug_assert!(width >= 64 || value >> width == 0, "{value} does not fit in {width} bits");
        for i in (0..width).rev() {
            self.bits.push(i < 64 && (value >> i) & 1 == 1);
        }
    }

    /// Elias-gamma code of `value + 1`, so that zero is representable.
    pub fn gamma(&mut self, value: u64) {
        let v = value + 1;
        let w = bit_width(v);
        for _ in 1..w {
            self.bits.push(false);
        }
        self.uint(v, w);
    }

    pub fn bits(&mut self, b: &BitString) {
        self.bits.extend_from_slice(b.as_slice());
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn finish(self) -> BitString {
        BitString { bits: self.bits }
    }
}

/// Sequential reader. Every method returns `None` on underflow so that
/// verifiers can treat malformed certificates as a plain reject.
pub struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl BitReader<'_> {
    pub fn bit(&mut self) -> Option<bool> {
        let b = *self.bits.get(self.pos)?;
        self.pos += 1;
        Some(b)
    }

    pub fn uint(&mut self, width: usize) -> Option<u64> {
        if width > 64 || self.remaining() < width {
            return None;
        }
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | self.bit()? as u64;
        }
        Some(v)
    }

    pub fn gamma(&mut self) -> Option<u64> {
        let mut zeros = 0;
        while !*self.bits.get(self.pos)? {
            zeros += 1;
            self.pos += 1;
            if zeros > 63 {
                return None;
            }
        }
        Some(self.uint(zeros + 1)? - 1)
    }

    pub fn take(&mut self, len: usize) -> Option<BitString> {
        if self.remaining() < len {
            return None;
        }
        let out = BitString::from_bits(self.bits[self.pos..self.pos + len].to_vec());
        self.pos += len;
        Some(out)
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn at_end(&self) -> bool {
        self.remaining() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hex_of_five_bits() {
        let b = BitString::from_bits(vec![true, false, true, true, false]);
        assert_eq!(b.to_hex(), "b0");
        assert_eq!(BitString::from_hex("b0", 5).unwrap(), b);
    }

    #[test]
    fn empty_string_round_trips() {
        let b = BitString::new();
        assert_eq!(b.to_hex(), "");
        assert_eq!(BitString::from_hex("", 0).unwrap(), b);
    }

    #[test]
    fn padding_must_be_zero() {
        assert!(BitString::from_hex("b1", 5).is_err());
        assert!(BitString::from_hex("b0b0", 5).is_err());
    }

    #[test]
    fn log_conventions() {
        assert_eq!(log2_ceil(1), 1);
        assert_eq!(log2_ceil(2), 1);
        assert_eq!(log2_ceil(3), 2);
        assert_eq!(log2_ceil(64), 6);
        assert_eq!(log2_ceil(65), 7);
        assert_eq!(bit_width(0), 0);
        assert_eq!(bit_width(255), 8);
    }

    proptest! {
        #[test]
        fn hex_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..200)) {
            let b = BitString::from_bits(bits);
            let back = BitString::from_hex(&b.to_hex(), b.len()).unwrap();
            prop_assert_eq!(back, b);
        }

        #[test]
        fn json_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..100)) {
            let b = BitString::from_bits(bits);
            let s = serde_json::to_string(&b).unwrap();
            let back: BitString = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(back, b);
        }

        #[test]
        fn gamma_and_uint_round_trip(vals in proptest::collection::vec((0u64..1_000_000, 20usize..40), 0..10)) {
            let mut w = BitWriter::new();
            for &(v, width) in &vals {
                w.gamma(v);
                w.uint(v, width);
            }
            let b = w.finish();
            let mut r = b.reader();
            for &(v, width) in &vals {
                prop_assert_eq!(r.gamma(), Some(v));
                prop_assert_eq!(r.uint(width), Some(v));
            }
            prop_assert!(r.at_end());
        }
    }
}
