//! Block-level statistics of the B-free subshift.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sets::{BSet, FamilySpec};
use crate::sieve::{sieve_interval, EtaSegment};
use crate::window;

pub const MAX_BLOCK_LEN: u32 = 64;

/// A 0/1 word of length `1..=64`, encoded as the binary number it spells
/// (first symbol most significant). Ordered by length, then code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Block {
    len: u32,
    code: u64,
}

impl Block {
    pub fn new(len: u32, code: u64) -> Result<Self> {
        if len == 0 || len > MAX_BLOCK_LEN {
            return Err(Error::precondition(format!("block length {len} not in 1..=64")));
        }
        if len < 64 && code >> len != 0 {
            return Err(Error::precondition(format!("code {code} too wide for length {len}")));
        }
        Ok(Self { len, code })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let len = s.len() as u32;
        let mut code = 0u64;
        for c in s.chars() {
            code = code << 1
                | match c {
                    '0' => 0,
                    '1' => 1,
                    other => return Err(Error::Parse(format!("invalid block symbol `{other}`"))),
                };
        }
        Self::new(len, code)
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    /// Symbol at position `i` (0 = first).
    pub fn symbol(&self, i: u32) -> bool {
        self.code >> (self.len - 1 - i) & 1 == 1
    }

    /// Is `self <= other` coordinatewise?
    pub fn is_below(&self, other: &Block) -> bool {
        self.len == other.len && self.code & !other.code == 0
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.symbol(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for Block {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub type BlockSet = BTreeSet<Block>;

fn check_block_len(seg: &EtaSegment, n: u32) -> Result<()> {
    if n == 0 || n > MAX_BLOCK_LEN {
        return Err(Error::precondition(format!("block length {n} not in 1..=64")));
    }
    if n as u64 > seg.len() {
        return Err(Error::precondition(format!(
            "block length {n} exceeds segment length {}",
            seg.len()
        )));
    }
    Ok(())
}

/// Calls `f(code)` for each length-`n` window starting at offsets
/// `[from, to)`.
fn for_each_window(seg: &EtaSegment, n: u32, from: u64, to: u64, mut f: impl FnMut(u64)) {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut code = 0u64;
    for i in 0..n as u64 - 1 {
        code = code << 1 | seg.get(from + i) as u64;
    }
    for start in from..to {
        code = (code << 1 | seg.get(start + n as u64 - 1) as u64) & mask;
        f(code);
    }
}

/// Distinct length-`n` subwords.
pub fn observed_blocks(seg: &EtaSegment, n: u32) -> Result<BlockSet> {
    check_block_len(seg, n)?;
    let windows = seg.len() - n as u64 + 1;
    if n <= 20 {
        let mut seen = vec![false; 1 << n];
        for_each_window(seg, n, 0, windows, |c| seen[c as usize] = true);
        return Ok(seen
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(c, _)| Block { len: n, code: c as u64 })
            .collect());
    }
    let mut out = BlockSet::new();
    for_each_window(seg, n, 0, windows, |c| {
        out.insert(Block { len: n, code: c });
    });
    Ok(out)
}

/// Count and frequency of one block in a window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockStats {
    pub block: Block,
    pub count: u64,
    pub window_start: i64,
    pub window_length: u64,
    #[serde(serialize_with = "ser_u64_ratio")]
    pub frequency: Ratio<u64>,
}

impl BlockStats {
    pub fn frequency_f64(&self) -> f64 {
        *self.frequency.numer() as f64 / *self.frequency.denom() as f64
    }
}

fn ser_u64_ratio<S: Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
}

const COUNT_CHUNK: u64 = 1 << 18;

/// Exact counts of every occurring length-`n` block, sorted by block.
/// Frequencies are `count / segment length`.
pub fn block_frequencies(seg: &EtaSegment, n: u32) -> Result<Vec<BlockStats>> {
    check_block_len(seg, n)?;
    let windows = seg.len() - n as u64 + 1;
    let chunks: Vec<(u64, u64)> = (0..windows.div_ceil(COUNT_CHUNK))
        .map(|c| (c * COUNT_CHUNK, ((c + 1) * COUNT_CHUNK).min(windows)))
        .collect();
    let counts: Vec<(u64, u64)> = if n <= 16 {
        let dense = chunks
            .par_iter()
            .map(|&(a, b)| {
                let mut local = vec![0u64; 1 << n];
                for_each_window(seg, n, a, b, |c| local[c as usize] += 1);
                local
            })
            .reduce(
                || vec![0u64; 1 << n],
                |mut x, y| {
                    for (a, b) in x.iter_mut().zip(y) {
                        *a += b;
                    }
                    x
                },
            );
        dense
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(code, c)| (code as u64, c))
            .collect()
    } else {
        let mut map = std::collections::BTreeMap::new();
        for_each_window(seg, n, 0, windows, |c| *map.entry(c).or_insert(0u64) += 1);
        map.into_iter().collect()
    };
    Ok(counts
        .into_iter()
        .map(|(code, count)| BlockStats {
            block: Block { len: n, code },
            count,
            window_start: seg.start(),
            window_length: seg.len(),
            frequency: Ratio::new(count, seg.len()),
        })
        .collect())
}

/// One block tracked across nested windows `[1, W_j]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportRow {
    pub block: Block,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportReport {
    pub n: u32,
    pub windows: Vec<u64>,
    pub decay_factor: f64,
    pub rows: Vec<SupportRow>,
    pub flagged: Vec<Block>,
}

pub const DEFAULT_DECAY_FACTOR: f64 = 4.0;

/// Track every block seen in the smallest window `[1, W_0]` through the
/// larger windows, flagging blocks whose frequency vanishes or drops by
/// more than `decay_factor` per doubling of the window.
pub fn support_stability(b: &BSet, n: u32, windows: &[u64], decay_factor: f64) -> Result<SupportReport> {
    if windows.is_empty() || windows.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition("windows must be non-empty and strictly increasing"));
    }
    let eta = sieve_interval(b, 1, *windows.last().unwrap());
    support_stability_on(&eta, n, windows, decay_factor)
}

/// [`support_stability`] on an explicit word; windows are prefix lengths.
pub fn support_stability_on(
    eta: &EtaSegment,
    n: u32,
    windows: &[u64],
    decay_factor: f64,
) -> Result<SupportReport> {
    if windows.is_empty() || windows.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition("windows must be non-empty and strictly increasing"));
    }
    if decay_factor <= 1.0 {
        return Err(Error::precondition("decay factor must be > 1"));
    }
    if *windows.last().unwrap() > eta.len() {
        return Err(Error::precondition("window exceeds segment length"));
    }
    let tables = windows
        .iter()
        .map(|&w| block_frequencies(&eta.slice(0, w), n))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for base in &tables[0] {
        let counts: Vec<u64> = tables
            .iter()
            .map(|t| {
                t.binary_search_by(|s| s.block.cmp(&base.block))
                    .map_or(0, |i| t[i].count)
            })
            .collect();
        let frequencies: Vec<f64> = counts
            .iter()
            .zip(windows)
            .map(|(&c, &w)| c as f64 / w as f64)
            .collect();
        let flagged = (1..windows.len()).any(|j| {
            let doublings = (windows[j] as f64 / windows[j - 1] as f64).log2();
            let floor = frequencies[j - 1] / decay_factor.powf(doublings);
            frequencies[j] == 0.0 || frequencies[j] < floor
        });
        rows.push(SupportRow {
            block: base.block,
            counts,
            frequencies,
            flagged,
        });
    }
    let flagged = rows.iter().filter(|r| r.flagged).map(|r| r.block).collect();
    Ok(SupportReport {
        n,
        windows: windows.to_vec(),
        decay_factor,
        rows,
        flagged,
    })
}

/// A block `missing` below an observed block `witness` that is itself not
/// in the set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HeredityViolation {
    pub missing: Block,
    pub witness: Block,
}

/// Downward-closure check: every `y <= x` for observed `x` must be
/// observed. Each missing block is reported once, with the first witness
/// in block order.
pub fn heredity_check(blocks: &BlockSet) -> Result<Vec<HeredityViolation>> {
    let Some(first) = blocks.first() else {
        return Ok(Vec::new());
    };
    if blocks.iter().any(|b| b.len != first.len) {
        return Err(Error::precondition("heredity check needs blocks of one length"));
    }
    let mut reported = BTreeSet::new();
    let mut out = Vec::new();
    for x in blocks {
        // all submasks of x.code, including 0
        let mut y = x.code;
        loop {
            let cand = Block { len: x.len, code: y };
            if !blocks.contains(&cand) && reported.insert(cand) {
                out.push(HeredityViolation {
                    missing: cand,
                    witness: *x,
                });
            }
            if y == 0 {
                break;
            }
            y = (y - 1) & x.code;
        }
    }
    out.sort_by_key(|v| v.missing);
    Ok(out)
}

pub fn max_zero_run(seg: &EtaSegment) -> u64 {
    seg.max_zero_run()
}

/// Observed η-blocks against the φ-blocks of a truncation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XPhiReport {
    pub family: String,
    pub k: u64,
    pub moduli: Vec<u64>,
    pub n: u32,
    pub range_start: i64,
    pub range_length: u64,
    pub eta_blocks: usize,
    pub phi_blocks: usize,
    pub phi_exhaustive: bool,
    pub contained: bool,
    pub outside: Vec<Block>,
    pub gap: usize,
    /// Blocks of the full family's η on the same range.
    pub full_eta_blocks: usize,
    /// How many of those are codable by the truncation.
    pub full_eta_in_phi: usize,
}

/// Compare the length-`n` blocks of η for `B ∩ {1..K}` on a range with
/// all coded blocks `φ(h)` of the same truncation.
pub fn xeta_vs_xphi(
    family: &FamilySpec,
    k: u64,
    n: u32,
    start: i64,
    len: u64,
    enumeration_budget: u64,
) -> Result<XPhiReport> {
    let full = family.expand()?;
    let truncated = family.expand_up_to(k)?;
    let eta = observed_blocks(&sieve_interval(&truncated, start, len), n)?;
    let phi = window::phi_blocks(&truncated, n, enumeration_budget)?;
    let outside: Vec<Block> = eta.difference(&phi.blocks).copied().collect();
    let full_eta = observed_blocks(&sieve_interval(&full, start, len), n)?;
    let full_eta_in_phi = full_eta.intersection(&phi.blocks).count();
    Ok(XPhiReport {
        family: family.to_string(),
        k,
        moduli: truncated.values(),
        n,
        range_start: start,
        range_length: len,
        eta_blocks: eta.len(),
        phi_blocks: phi.blocks.len(),
        phi_exhaustive: phi.exhaustive,
        contained: outside.is_empty(),
        gap: phi.blocks.difference(&eta).count(),
        outside,
        full_eta_blocks: full_eta.len(),
        full_eta_in_phi,
    })
}
