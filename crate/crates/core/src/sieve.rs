//! Segmented bit sieve for `M_B` / `F_B` on integer intervals.
//!
//! Bit `i` of an [`EtaSegment`] is 1 iff `start + i` is B-free. Words are
//! little-endian `u64`s; bits past `len` in the last word are always zero.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sets::BSet;

pub const DEFAULT_SEGMENT_BITS: usize = 1 << 16;

/// Size in bytes of the on-disk header: start (i64 LE), length (u64 LE).
pub const HEADER_LEN: usize = 16;

/// The B-free indicator word on `[start, start + len)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaSegment {
    start: i64,
    len: u64,
    words: Vec<u64>,
}

impl EtaSegment {
    fn filled(start: i64, len: u64, value: bool) -> Self {
        let nwords = len.div_ceil(64) as usize;
        let mut words = vec![if value { u64::MAX } else { 0 }; nwords];
        if value {
            mask_tail(&mut words, len);
        }
        Self { start, len, words }
    }

    /// Build from explicit bits (`true` = B-free).
    pub fn from_bits(start: i64, bits: &[bool]) -> Self {
        let mut seg = Self::filled(start, bits.len() as u64, false);
        for (i, &b) in bits.iter().enumerate() {
            if b {
                seg.words[i / 64] |= 1 << (i % 64);
            }
        }
        seg
    }

    /// Parse a `0`/`1` string.
    pub fn from_bitstring(start: i64, s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(start, &bits))
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Bit at offset `i` (relative to `start`).
    #[inline]
    pub fn get(&self, i: u64) -> bool {
        assert!(i < self.len, "offset {i} out of range {}", self.len);
        self.words[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    /// Bit for the integer `k`.
    pub fn is_free(&self, k: i64) -> bool {
        self.get((k as i128 - self.start as i128) as u64)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bitstring(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn count_zeros(&self) -> u64 {
        self.len - self.count_ones()
    }

    /// Number of B-free positions among offsets `[0, m)`.
    pub fn count_ones_prefix(&self, m: u64) -> u64 {
        let m = m.min(self.len);
        let full = (m / 64) as usize;
        let mut c: u64 = self.words[..full].iter().map(|w| w.count_ones() as u64).sum();
        let rem = m % 64;
        if rem > 0 {
            c += (self.words[full] & ((1u64 << rem) - 1)).count_ones() as u64;
        }
        c
    }

    /// Copy of offsets `[from, from + len)`.
    pub fn slice(&self, from: u64, len: u64) -> Self {
        assert!(from + len <= self.len);
        let mut out = Self::filled(self.start + from as i64, len, false);
        if from % 64 == 0 {
            let w0 = (from / 64) as usize;
            let n = out.words.len();
            out.words.copy_from_slice(&self.words[w0..w0 + n]);
            mask_tail(&mut out.words, len);
        } else {
            for i in 0..len {
                if self.get(from + i) {
                    out.words[(i / 64) as usize] |= 1 << (i % 64);
                }
            }
        }
        out
    }

    /// The segment read backwards, re-anchored at `-(start + len - 1)`.
    pub fn negated(&self) -> Self {
        let start = if self.len == 0 {
            -self.start
        } else {
            -(self.start + self.len as i64 - 1)
        };
        let bits: Vec<bool> = (0..self.len).rev().map(|i| self.get(i)).collect();
        Self::from_bits(start, &bits)
    }

    /// Concatenate with a segment that starts where this one ends.
    pub fn concat(&self, next: &EtaSegment) -> Result<Self> {
        if self.start as i128 + self.len as i128 != next.start as i128 {
            return Err(Error::precondition("segments are not adjacent"));
        }
        let bits: Vec<bool> = self.iter().chain(next.iter()).collect();
        Ok(Self::from_bits(self.start, &bits))
    }

    /// Length of the longest run of zeros.
    pub fn max_zero_run(&self) -> u64 {
        let mut best = 0u64;
        let mut cur = 0u64;
        for (wi, &w) in self.words.iter().enumerate() {
            let valid = (self.len - wi as u64 * 64).min(64);
            if w == 0 {
                cur += valid;
                best = best.max(cur);
                continue;
            }
            for b in 0..valid {
                if w >> b & 1 == 0 {
                    cur += 1;
                    best = best.max(cur);
                } else {
                    cur = 0;
                }
            }
        }
        best
    }

    /// Header (start i64 LE, length u64 LE) followed by `ceil(len/8)` bytes,
    /// bit `i` stored in byte `i/8` at bit position `i%8`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8) as usize;
        let mut out = Vec::with_capacity(HEADER_LEN + nbytes);
        out.extend_from_slice(&self.start.to_le_bytes());
        out.extend_from_slice(&self.len.to_le_bytes());
        out.extend(self.words.iter().flat_map(|w| w.to_le_bytes()).take(nbytes));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Parse("segment dump shorter than header".into()));
        }
        let start = i64::from_le_bytes(bytes[0..8].try_into().unwrap());
        let len = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
        let body = &bytes[HEADER_LEN..];
        if body.len() as u64 != len.div_ceil(8) {
            return Err(Error::Parse(format!(
                "segment dump body has {} bytes, expected {}",
                body.len(),
                len.div_ceil(8)
            )));
        }
        let mut words = vec![0u64; len.div_ceil(64) as usize];
        for (i, chunk) in body.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            words[i] = u64::from_le_bytes(buf);
        }
        if words.last().is_some_and(|&w| len % 64 != 0 && w >> (len % 64) != 0) {
            return Err(Error::Parse("segment dump has bits past its length".into()));
        }
        Ok(Self { start, len, words })
    }

    pub fn write_to(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read_from(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

fn mask_tail(words: &mut [u64], len: u64) {
    let rem = len % 64;
    if rem != 0 {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << rem) - 1;
        }
    }
}

/// Sieve configuration. The segment size only affects performance, never
/// the result.
#[derive(Debug, Clone, Copy)]
pub struct Sieve {
    segment_bits: usize,
}

impl Default for Sieve {
    fn default() -> Self {
        Self {
            segment_bits: DEFAULT_SEGMENT_BITS,
        }
    }
}

impl Sieve {
    /// Segment size is rounded up to a multiple of 64 bits.
    pub fn with_segment_bits(bits: usize) -> Self {
        Self {
            segment_bits: bits.max(64).next_multiple_of(64),
        }
    }

    pub fn segment_bits(&self) -> usize {
        self.segment_bits
    }

    pub fn sieve(&self, b: &BSet, start: i64, len: u64) -> EtaSegment {
        assert!(
            start as i128 + len as i128 <= i64::MAX as i128,
            "interval end overflows i64"
        );
        if b.contains_one() {
            return EtaSegment::filled(start, len, false);
        }
        let mut seg = EtaSegment::filled(start, len, true);
        if len == 0 || b.is_empty() {
            return seg;
        }
        let moduli = b.values();
        let seg_words = self.segment_bits / 64;
        seg.words
            .par_chunks_mut(seg_words)
            .enumerate()
            .for_each(|(ci, words)| {
                let off = (ci * self.segment_bits) as u64;
                let bits = (len - off).min(self.segment_bits as u64);
                strike(words, start as i128 + off as i128, bits, &moduli);
            });
        seg
    }
}

/// Clear the bits of multiples of each modulus in `[lo, lo + bits)`.
fn strike(words: &mut [u64], lo: i128, bits: u64, moduli: &[u64]) {
    for &b in moduli {
        let bi = b as i128;
        let first = (bi - lo.rem_euclid(bi)) % bi;
        if first as u64 >= bits {
            continue;
        }
        if b >= bits {
            let i = first as usize;
            words[i / 64] &= !(1u64 << (i % 64));
            continue;
        }
        let mut i = first as usize;
        let step = b as usize;
        let end = bits as usize;
        while i < end {
            words[i / 64] &= !(1u64 << (i % 64));
            i += step;
        }
    }
}

/// `F_B` indicator on `[start, start + len)`.
pub fn sieve_interval(b: &BSet, start: i64, len: u64) -> EtaSegment {
    Sieve::default().sieve(b, start, len)
}

/// `|M_B ∩ [start, start + len)|`.
pub fn count_multiples(b: &BSet, start: i64, len: u64) -> u64 {
    sieve_interval(b, start, len).count_zeros()
}
