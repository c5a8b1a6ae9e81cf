//! Finite quotients `Z/L` of the canonical group, windows and coding words.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::density::{exact_density, ExactDensity, Limits};
use crate::dynamics::{observed_blocks, BlockSet};
use crate::error::{Error, Result};
use crate::sets::BSet;
use crate::sieve::{sieve_interval, EtaSegment};

/// Above this period residues are counted, not listed.
pub const RESIDUE_LIST_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteQuotient {
    pub moduli: BSet,
    pub lcm: BigUint,
}

impl FiniteQuotient {
    pub fn new(moduli: &BSet) -> Self {
        Self {
            lcm: moduli.lcm(),
            moduli: moduli.clone(),
        }
    }
}

/// Residues `h mod L` with `h ≢ 0 mod b` for every modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSet {
    pub quotient: FiniteQuotient,
    pub count: BigUint,
    /// Listed only when `L <= RESIDUE_LIST_CAP`.
    pub residues: Option<Vec<u64>>,
}

impl WindowSet {
    pub fn measure(&self) -> ExactDensity {
        ExactDensity::new(self.count.clone(), self.quotient.lcm.clone())
    }
}

pub fn window_set(b: &BSet, limits: &Limits) -> Result<WindowSet> {
    let quotient = FiniteQuotient::new(b);
    match quotient.lcm.to_u64().filter(|&l| l <= RESIDUE_LIST_CAP) {
        Some(l) => {
            let eta = sieve_interval(b, 0, l);
            let residues: Vec<u64> = (0..l).filter(|&h| eta.get(h)).collect();
            Ok(WindowSet {
                quotient,
                count: BigUint::from(residues.len()),
                residues: Some(residues),
            })
        }
        None => {
            let d = exact_density(b, limits)?.complement();
            // d = count / L with L a multiple of d's denominator
            let count = (&quotient.lcm / d.value.denom().magnitude()) * d.value.numer().magnitude();
            Ok(WindowSet {
                quotient,
                count,
                residues: None,
            })
        }
    }
}

/// Haar measure of a cylinder fixing every coordinate in `b`: `1/lcm(b)`.
pub fn cylinder_measure(b: &BSet) -> ExactDensity {
    let l = b.lcm();
    ExactDensity::new(BigUint::one(), l)
}

/// `|W'| / L`.
pub fn window_measure(b: &BSet, limits: &Limits) -> Result<ExactDensity> {
    Ok(window_set(b, limits)?.measure())
}

/// `φ(h)` on `[start, start + len)`: bit `i` is set iff `h + start + i` is
/// divisible by no modulus.
pub fn coding_word(b: &BSet, h: u64, start: i64, len: u64) -> Result<EtaSegment> {
    let l = b.lcm();
    if BigUint::from(h) >= l {
        return Err(Error::precondition(format!("residue {h} not below lcm {l}")));
    }
    let from = (h as i64)
        .checked_add(start)
        .ok_or_else(|| Error::precondition("h + start overflows"))?;
    let seg = sieve_interval(b, from, len);
    Ok(EtaSegment::from_bits(start, &seg.iter().collect::<Vec<_>>()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiBlocks {
    pub blocks: BlockSet,
    /// All residues mod `L` were visited.
    pub exhaustive: bool,
    pub residues: u64,
}

/// Length-`n` subwords of `φ(h)` over residues `h`. Exhaustive when
/// `L·n <= budget`; otherwise `h = 0, 1, ...` up to the budget.
pub fn phi_blocks(b: &BSet, n: u32, budget: u64) -> Result<PhiBlocks> {
    if n == 0 {
        return Err(Error::precondition("block length must be >= 1"));
    }
    let full = b
        .lcm()
        .to_u64()
        .filter(|l| l.checked_mul(n as u64).is_some_and(|w| w <= budget));
    let (residues, exhaustive) = match full {
        Some(l) => (l, true),
        None => ((budget / n as u64).max(1), false),
    };
    // φ(h)(i) = η(h + i): the blocks at offsets h < residues
    const CHUNK: u64 = 1 << 20;
    let chunks: Vec<u64> = (0..residues.div_ceil(CHUNK)).collect();
    let sets = chunks
        .par_iter()
        .map(|&c| {
            let from = c * CHUNK;
            let count = CHUNK.min(residues - from);
            let seg = sieve_interval(b, from as i64, count + n as u64 - 1);
            observed_blocks(&seg, n)
        })
        .collect::<Result<Vec<_>>>()?;
    let blocks = sets.into_iter().fold(BlockSet::new(), |mut acc, s| {
        acc.extend(s);
        acc
    });
    Ok(PhiBlocks {
        blocks,
        exhaustive,
        residues,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowReport {
    pub moduli: Vec<u64>,
    pub lcm: String,
    pub window_count: String,
    pub window_measure: ExactDensity,
    /// `1 - d(M_B)`, computed independently.
    pub density_check: ExactDensity,
    pub consistent: bool,
}

pub fn window_report(b: &BSet, limits: &Limits) -> Result<WindowReport> {
    let w = window_set(b, limits)?;
    let measure = w.measure();
    let check = exact_density(b, limits)?.complement();
    Ok(WindowReport {
        moduli: b.values(),
        lcm: w.quotient.lcm.to_string(),
        window_count: w.count.to_string(),
        consistent: measure.value == check.value,
        window_measure: measure,
        density_check: check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Block;
    use proptest::prelude::*;

    fn set(v: &[u64]) -> BSet {
        BSet::primitivize(v).unwrap()
    }

    fn brute_word(b: &[u64], h: u64, start: i64, len: u64) -> String {
        (0..len as i64)
            .map(|i| {
                let k = h as i64 + start + i;
                if b.iter().all(|&m| k.rem_euclid(m as i64) != 0) { '1' } else { '0' }
            })
            .collect()
    }

    #[test]
    fn window_examples() {
        let lim = Limits::default();
        let w = window_set(&set(&[2, 3]), &lim).unwrap();
        assert_eq!(w.residues.as_deref(), Some(&[1u64, 5][..]));
        assert_eq!(w.measure().to_string(), "1/3");
        assert_eq!(window_measure(&set(&[2]), &lim).unwrap().to_string(), "1/2");
        assert_eq!(window_measure(&set(&[6, 10, 15]), &lim).unwrap().to_string(), "11/15");
        assert_eq!(window_measure(&BSet::empty(), &lim).unwrap().to_string(), "1/1");
    }

    #[test]
    fn large_period_counts_without_listing() {
        let lim = Limits::default();
        let b = set(&[1009, 1013, 1019]);
        let w = window_set(&b, &lim).unwrap();
        assert!(w.residues.is_none());
        assert_eq!(w.count, BigUint::from(1008u64 * 1012 * 1018));
    }

    #[test]
    fn cylinder_examples() {
        assert_eq!(cylinder_measure(&set(&[2, 3])).to_string(), "1/6");
        assert_eq!(cylinder_measure(&set(&[4, 9, 25])).to_string(), "1/900");
        assert_eq!(cylinder_measure(&set(&[1])).to_string(), "1/1");
    }

    #[test]
    fn coding_word_examples() {
        assert_eq!(coding_word(&set(&[2]), 0, 0, 4).unwrap().to_bitstring(), "0101");
        let w = coding_word(&set(&[2, 3]), 1, 0, 6).unwrap().to_bitstring();
        assert_eq!(w, brute_word(&[2, 3], 1, 0, 6));
        assert_eq!(w, "100010");
        assert!(coding_word(&set(&[2, 3]), 6, 0, 3).is_err());
        // φ(0) is η on the same range
        let b = set(&[4, 9, 25, 49]);
        assert_eq!(
            coding_word(&b, 0, -300, 5_000).unwrap().to_bitstring(),
            sieve_interval(&b, -300, 5_000).to_bitstring()
        );
    }

    #[test]
    fn phi_block_examples() {
        let names = |p: PhiBlocks| p.blocks.iter().map(Block::to_string).collect::<Vec<_>>();
        assert_eq!(names(phi_blocks(&set(&[2]), 2, 1_000).unwrap()), vec!["01", "10"]);
        assert_eq!(names(phi_blocks(&set(&[2, 3]), 1, 1_000).unwrap()), vec!["0", "1"]);
        assert_eq!(names(phi_blocks(&set(&[1]), 2, 1_000).unwrap()), vec!["00"]);
        let partial = phi_blocks(&set(&[4, 9, 25]), 3, 30).unwrap();
        assert!(!partial.exhaustive);
        assert_eq!(partial.residues, 10);
    }

    #[test]
    fn phi_covers_eta() {
        let b = set(&[4, 9, 25]);
        let phi = phi_blocks(&b, 4, 1 << 20).unwrap();
        assert!(phi.exhaustive);
        let eta = observed_blocks(&sieve_interval(&b, 1, 100_000), 4).unwrap();
        assert!(eta.is_subset(&phi.blocks));
    }

    #[test]
    fn report_is_consistent() {
        let r = window_report(&set(&[6, 10, 15]), &Limits::default()).unwrap();
        assert!(r.consistent);
        assert_eq!(r.window_count, "22");
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["window_measure"], "11/15");
        assert_eq!(json["lcm"], "30");
    }

    fn small_bset() -> impl Strategy<Value = BSet> {
        prop::collection::vec(2u64..40, 0..6).prop_map(|v| set(&v))
    }

    proptest! {
        #[test]
        fn window_is_complement_of_density(b in small_bset()) {
            let lim = Limits::default();
            let w = window_measure(&b, &lim).unwrap();
            prop_assert_eq!(w.value, exact_density(&b, &lim).unwrap().complement().value);
        }

        #[test]
        fn window_shrinks_when_moduli_added(b in small_bset(), extra in 2u64..40) {
            let lim = Limits::default();
            let mut v = b.values();
            v.push(extra);
            let bigger = set(&v);
            prop_assert!(window_measure(&bigger, &lim).unwrap().value <= window_measure(&b, &lim).unwrap().value);
        }

        #[test]
        fn coding_word_is_periodic(b in small_bset(), h in 0u64..1_000) {
            let l = b.lcm_u64().unwrap();
            let h = h % l;
            let two = coding_word(&b, h, 0, 2 * l).unwrap();
            prop_assert_eq!(two.slice(0, l).to_bitstring(), two.slice(l, l).to_bitstring());
            let lim = Limits::default();
            let ones = two.slice(0, l).count_ones();
            prop_assert_eq!(
                num_rational::BigRational::new(ones.into(), l.into()),
                window_measure(&b, &lim).unwrap().value
            );
        }
    }
}
