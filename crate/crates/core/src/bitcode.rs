//! Packed sign codes in `{-1,+1}^m` and their serialization.
//!
//! Packing is MSB-first: bit `i` of a code lives in byte `i / 8` at bit
//! position `7 - (i % 8)`, and a set bit means `+1`. Trailing bits of the
//! last byte are always zero, so whole-byte XOR + popcount is exact.
//!
//! Text format: one code per line, characters `+` / `-`.
//! Binary format: header `BEMB` (4 bytes), `m` as u64 LE, `count` as u64 LE,
//! then `count` codes of `ceil(m/8)` bytes each.

use crate::error::{Error, Result};
use std::io::{Read, Write};

pub const BINARY_MAGIC: &[u8; 4] = b"BEMB";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitCode {
    data: Vec<u8>,
    len: usize,
}

impl BitCode {
    /// Entrywise sign of `v` with the convention `sgn(0) = +1`.
    pub fn from_signs(v: &[f64]) -> BitCode {
        let mut code = BitCode { data: vec![0u8; v.len().div_ceil(8)], len: v.len() };
        for (i, &x) in v.iter().enumerate() {
            if x >= 0.0 {
                code.data[i / 8] |= 1 << (7 - (i % 8));
            }
        }
        code
    }

    pub fn from_bits(bits: &[bool]) -> BitCode {
        let mut code = BitCode { data: vec![0u8; bits.len().div_ceil(8)], len: bits.len() };
        for (i, &b) in bits.iter().enumerate() {
            if b {
                code.data[i / 8] |= 1 << (7 - (i % 8));
            }
        }
        code
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bytes(&self) -> &[u8] {
        &self.data
    }

    /// Bit `i` as a boolean (`true` means `+1`).
    pub fn bit(&self, i: usize) -> bool {
        self.data[i / 8] & (1 << (7 - (i % 8))) != 0
    }

    /// The code as a `±1` vector.
    pub fn signs(&self) -> Vec<f64> {
        (0..self.len).map(|i| if self.bit(i) { 1.0 } else { -1.0 }).collect()
    }

    /// Number of disagreeing positions, via XOR + popcount.
    pub fn count_diff(&self, other: &BitCode) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch { expected: self.len, got: other.len });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Disagreements within the bit range `[start, end)`.
    pub fn count_diff_range(&self, other: &BitCode, start: usize, end: usize) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch { expected: self.len, got: other.len });
        }
        if start > end || end > self.len {
            return Err(Error::InvalidArgument(format!(
                "bit range [{start}, {end}) out of bounds for length {}",
                self.len
            )));
        }
        let mut count = 0usize;
        let mut byte = start / 8;
        let last = end.div_ceil(8);
        while byte < last {
            let mut x = self.data[byte] ^ other.data[byte];
            let lo = byte * 8;
            if start > lo {
                x &= 0xffu8 >> (start - lo);
            }
            if end < lo + 8 {
                x &= !(0xffu8 >> (end - lo));
            }
            count += x.count_ones() as usize;
            byte += 1;
        }
        Ok(count)
    }

    pub fn to_text_line(&self) -> String {
        (0..self.len).map(|i| if self.bit(i) { '+' } else { '-' }).collect()
    }

    pub fn from_text_line(line: &str) -> Result<BitCode> {
        let mut bits = Vec::with_capacity(line.len());
        for (i, c) in line.chars().enumerate() {
            match c {
                '+' => bits.push(true),
                '-' => bits.push(false),
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "invalid code character {c:?} at position {i}"
                    )))
                }
            }
        }
        if bits.is_empty() {
            return Err(Error::EmptyInput("bit code line"));
        }
        Ok(BitCode::from_bits(&bits))
    }
}

/// Writes codes in the binary container format. All codes must share one
/// length.
pub fn write_binary(codes: &[BitCode], w: &mut impl Write) -> Result<()> {
    let m = codes.first().map_or(0, |c| c.len());
    if codes.iter().any(|c| c.len() != m) {
        return Err(Error::InvalidArgument("codes of mixed lengths".into()));
    }
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&(m as u64).to_le_bytes())?;
    w.write_all(&(codes.len() as u64).to_le_bytes())?;
    for c in codes {
        w.write_all(c.bytes())?;
    }
    Ok(())
}

pub fn read_binary(r: &mut impl Read) -> Result<Vec<BitCode>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(Error::InvalidArgument("bad magic in bit-code file".into()));
    }
    let mut buf8 = [0u8; 8];
    r.read_exact(&mut buf8)?;
    let m = u64::from_le_bytes(buf8) as usize;
    r.read_exact(&mut buf8)?;
    let count = u64::from_le_bytes(buf8) as usize;
    let stride = m.div_ceil(8);
    let mut codes = Vec::with_capacity(count);
    for _ in 0..count {
        let mut data = vec![0u8; stride];
        r.read_exact(&mut data)?;
        // enforce the zero-tail invariant so popcount stays exact
        if !m.is_multiple_of(8) {
            if let Some(lastb) = data.last() {
                if lastb & (0xffu8 >> (m % 8)) != 0 {
                    return Err(Error::InvalidArgument(
                        "nonzero padding bits in bit-code file".into(),
                    ));
                }
            }
        }
        codes.push(BitCode { data, len: m });
    }
    Ok(codes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sign_convention() {
        let c = BitCode::from_signs(&[0.5, -0.2, 0.3]);
        assert_eq!(c.signs(), vec![1.0, -1.0, 1.0]);
        let z = BitCode::from_signs(&[0.0, -0.0, 0.0]);
        assert_eq!(z.signs(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn text_roundtrip() {
        let c = BitCode::from_signs(&[1.0, -1.0, -1.0, 1.0, 1.0]);
        assert_eq!(c.to_text_line(), "+--++");
        assert_eq!(BitCode::from_text_line("+--++").unwrap(), c);
        assert!(BitCode::from_text_line("+-x").is_err());
        assert!(BitCode::from_text_line("").is_err());
    }

    #[test]
    fn ranged_count_matches_bitwise() {
        let a = BitCode::from_bits(&(0..37).map(|i| i % 3 == 0).collect::<Vec<_>>());
        let b = BitCode::from_bits(&(0..37).map(|i| i % 5 == 0).collect::<Vec<_>>());
        for start in 0..=37 {
            for end in start..=37 {
                let slow = (start..end).filter(|&i| a.bit(i) != b.bit(i)).count();
                assert_eq!(a.count_diff_range(&b, start, end).unwrap(), slow);
            }
        }
        assert_eq!(a.count_diff(&b).unwrap(), a.count_diff_range(&b, 0, 37).unwrap());
    }

    proptest! {
        #[test]
        fn pack_unpack_roundtrip(bits in proptest::collection::vec(any::<bool>(), 1..200)) {
            let code = BitCode::from_bits(&bits);
            prop_assert_eq!(code.len(), bits.len());
            for (i, &b) in bits.iter().enumerate() {
                prop_assert_eq!(code.bit(i), b);
            }
            let signs = code.signs();
            let back = BitCode::from_signs(&signs);
            prop_assert_eq!(back, code);
        }

        #[test]
        fn binary_container_roundtrip(
            rows in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 11), 0..5)
        ) {
            let codes: Vec<BitCode> = rows.iter().map(|r| BitCode::from_bits(r)).collect();
            let mut buf = Vec::new();
            write_binary(&codes, &mut buf).unwrap();
            let back = read_binary(&mut buf.as_slice()).unwrap();
            prop_assert_eq!(back, codes);
        }
    }
}
