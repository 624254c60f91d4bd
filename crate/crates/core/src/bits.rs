//! Minimal bit-exact writer/reader pair used by the label encoders.
//!
//! Values are written MSB-first in fields of an explicit width; a label's
//! size in bits is therefore exactly the sum of its field widths, which is
//! what the size measurements report.

use crate::error::{Error, Result};

/// Width of every list-length prefix in the label encodings. A flat 16
/// bits comfortably covers all list lengths that can arise (they are
/// bounded by the vertex count) and keeps decoding self-delimiting.
pub const LEN_BITS: u32 = 16;

/// Number of bits needed to store values in `0..=max` (at least 1).
pub fn bits_for(max: u64) -> u32 {
    (64 - max.leading_zeros()).max(1)
}

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    /// Total bits written so far.
    len: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the low `width` bits of `value`, most significant first.
    /// Panics if the value does not fit, so encoders fail loudly.
    pub fn put(&mut self, value: u64, width: u32) {
        assert!(width <= 64, "field width {width} > 64");
        assert!(
            width == 64 || value < (1u64 << width),
            "value {value} does not fit in {width} bits"
        );
        for i in (0..width).rev() {
            let bit = (value >> i) & 1;
            let byte = self.len / 8;
            if byte == self.bytes.len() {
                self.bytes.push(0);
            }
            if bit == 1 {
                self.bytes[byte] |= 1 << (7 - self.len % 8);
            }
            self.len += 1;
        }
    }

    pub fn put_bool(&mut self, b: bool) {
        self.put(b as u64, 1);
    }

    /// Total number of bits written.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The written bits, zero-padded to a whole number of bytes.
    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        BitReader { bytes, pos: 0 }
    }

    /// Reads a `width`-bit field written by [`BitWriter::put`].
    pub fn get(&mut self, width: u32) -> Result<u64> {
        assert!(width <= 64, "field width {width} > 64");
        if self.pos + width as usize > self.bytes.len() * 8 {
            return Err(Error::Parse(format!(
                "bit stream exhausted at bit {} reading {width}-bit field",
                self.pos
            )));
        }
        let mut value = 0u64;
        for _ in 0..width {
            let byte = self.bytes[self.pos / 8];
            let bit = (byte >> (7 - self.pos % 8)) & 1;
            value = (value << 1) | bit as u64;
            self.pos += 1;
        }
        Ok(value)
    }

    pub fn get_bool(&mut self) -> Result<bool> {
        Ok(self.get(1)? == 1)
    }

    /// Bits consumed so far.
    pub fn position(&self) -> usize {
        self.pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bits_for_boundaries() {
        assert_eq!(bits_for(0), 1);
        assert_eq!(bits_for(1), 1);
        assert_eq!(bits_for(2), 2);
        assert_eq!(bits_for(255), 8);
        assert_eq!(bits_for(256), 9);
        assert_eq!(bits_for(u64::MAX), 64);
    }

    #[test]
    fn writer_tracks_exact_bit_length() {
        let mut w = BitWriter::new();
        w.put(5, 3);
        w.put_bool(true);
        w.put(1023, 10);
        assert_eq!(w.len(), 14);
        assert_eq!(w.as_bytes().len(), 2);
    }

    #[test]
    fn exhausted_reader_errors() {
        let mut w = BitWriter::new();
        w.put(3, 2);
        let bytes = w.into_bytes();
        let mut r = BitReader::new(&bytes);
        assert_eq!(r.get(2).unwrap(), 3);
        // The padding bits are readable (zero), but not past the buffer.
        assert_eq!(r.get(6).unwrap(), 0);
        assert!(r.get(1).is_err());
    }

    proptest! {
        /// Every written field reads back exactly, at any alignment.
        #[test]
        fn roundtrip(fields in proptest::collection::vec((0u64..u64::MAX, 1u32..=64), 0..50)) {
            let mut w = BitWriter::new();
            let mut expect = Vec::new();
            for &(value, width) in &fields {
                let masked = if width == 64 { value } else { value & ((1u64 << width) - 1) };
                w.put(masked, width);
                expect.push((masked, width));
            }
            let total: usize = fields.iter().map(|&(_, w)| w as usize).sum();
            prop_assert_eq!(w.len(), total);
            let bytes = w.into_bytes();
            prop_assert_eq!(bytes.len(), total.div_ceil(8));
            let mut r = BitReader::new(&bytes);
            for (value, width) in expect {
                prop_assert_eq!(r.get(width).unwrap(), value);
            }
        }
    }
}
