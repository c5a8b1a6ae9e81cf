//! Exact and estimated densities of sets of multiples.
//!
//! Exact values are rationals counted over one period (the lcm of the
//! moduli), either by inclusion–exclusion over subsets or by sieving a
//! full period. Estimates for truncations of infinite families come from
//! a sieve of `[1, n]` and always carry their window `n`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::primes;
use crate::sets::{BSet, FamilySpec};
use crate::sieve::{sieve_interval, EtaSegment};

/// Numeric limits for exact computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, Serialize)]
pub struct Limits {
    /// Largest period handled by direct counting.
    pub lcm_cap: u64,
    /// Largest number of subsets visited by inclusion–exclusion.
    pub subset_budget: u64,
    /// Periods up to this size are sieved instead of expanded.
    pub sieve_cap: u64,
    /// Budget for residue/block enumeration (`L * n`).
    pub enumeration_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            lcm_cap: 1_000_000_000,
            subset_budget: 1 << 22,
            sieve_cap: 10_000_000,
            enumeration_budget: 100_000_000,
        }
    }
}

/// An exact density and the period it was counted over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDensity {
    pub value: BigRational,
    pub period: BigUint,
}

impl ExactDensity {
    pub fn new(count: BigUint, period: BigUint) -> Self {
        let value = BigRational::new(BigInt::from(count), BigInt::from(period.clone()));
        Self { value, period }
    }

    pub fn from_ratio(num: u64, den: u64) -> Self {
        Self {
            value: BigRational::new(num.into(), den.into()),
            period: den.into(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    /// `numerator/denominator`.
    pub fn to_ratio_string(&self) -> String {
        ratio_string(&self.value)
    }

    /// `1 - self`, same period.
    pub fn complement(&self) -> Self {
        Self {
            value: BigRational::one() - &self.value,
            period: self.period.clone(),
        }
    }
}

pub(crate) fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

impl fmt::Display for ExactDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ratio_string())
    }
}

impl Serialize for ExactDensity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_ratio_string())
    }
}

/// Rational lower/upper bounds from pruned inclusion–exclusion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityBounds {
    #[serde(serialize_with = "ser_ratio")]
    pub lower: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub upper: BigRational,
    pub cap: u64,
    pub pruned_subtrees: u64,
}

impl DensityBounds {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

pub(crate) fn ser_ratio<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    InclusionExclusion,
    PeriodSieve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateKind {
    NaturalLower,
    NaturalUpper,
    /// Plain partial average at the window end.
    Natural,
    Logarithmic,
}

/// A density estimate at window `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub n: u64,
    /// `(m, partial value)` checkpoints the value was derived from.
    #[serde(skip)]
    pub trace: Vec<(u64, f64)>,
}

impl DensityEstimate {
    fn exact_zero(kind: EstimateKind, n: u64) -> Self {
        Self {
            value: 0.0,
            kind,
            n,
            trace: Vec::new(),
        }
    }
}

/// Liminf/limsup proxies plus the final partial average.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NaturalBounds {
    pub lower: DensityEstimate,
    pub upper: DensityEstimate,
    pub last: DensityEstimate,
}

/// Decimal text, or just the digit count for huge values.
pub(crate) fn describe_big(n: &BigUint) -> String {
    if n.bits() <= 256 {
        n.to_string()
    } else {
        format!("~10^{}", (n.bits() as f64 * std::f64::consts::LOG10_2) as u64)
    }
}

fn lcm_biguint(b: &BSet) -> BigUint {
    b.lcm()
}

/// Number of nonempty subsets of `b`, saturating.
fn subset_count(len: usize) -> u128 {
    if len >= 127 {
        u128::MAX
    } else {
        (1u128 << len) - 1
    }
}

/// `d(M_B)`, choosing the cheaper exact method.
pub fn exact_density(b: &BSet, limits: &Limits) -> Result<ExactDensity> {
    if b.is_empty() {
        return Ok(ExactDensity::from_ratio(0, 1));
    }
    let lcm = lcm_biguint(b);
    let small = lcm.to_u64();
    if small.is_some_and(|l| l <= limits.sieve_cap) {
        return period_sieve_density(b, limits);
    }
    if subset_count(b.len()) <= limits.subset_budget as u128 {
        return inclusion_exclusion_density(b, limits);
    }
    if small.is_some_and(|l| l <= limits.lcm_cap) {
        return period_sieve_density(b, limits);
    }
    Err(Error::PeriodOverflow {
        lcm: describe_big(&lcm),
        cap: limits.lcm_cap,
        subsets: subset_count(b.len()).to_string(),
        budget: limits.subset_budget,
    })
}

pub fn exact_density_by(b: &BSet, method: Method, limits: &Limits) -> Result<ExactDensity> {
    match method {
        Method::InclusionExclusion => inclusion_exclusion_density(b, limits),
        Method::PeriodSieve => period_sieve_density(b, limits),
    }
}

/// Count `M_B` over one full period `[1, lcm(B)]`.
pub fn period_sieve_density(b: &BSet, limits: &Limits) -> Result<ExactDensity> {
    let lcm = b.lcm_u64().filter(|&l| l <= limits.lcm_cap).ok_or_else(|| {
        Error::PeriodOverflow {
            lcm: describe_big(&b.lcm()),
            cap: limits.lcm_cap,
            subsets: subset_count(b.len()).to_string(),
            budget: limits.subset_budget,
        }
    })?;
    let count = sieve_interval(b, 1, lcm).count_zeros();
    Ok(ExactDensity::new(count.into(), lcm.into()))
}

/// `Σ_{∅≠S⊆B} (-1)^{|S|+1} / lcm(S)`, exact, over the period `lcm(B)`.
pub fn inclusion_exclusion_density(b: &BSet, limits: &Limits) -> Result<ExactDensity> {
    let subsets = subset_count(b.len());
    if subsets > limits.subset_budget as u128 {
        return Err(Error::Budget(format!(
            "inclusion-exclusion over {} moduli needs {} subsets, budget {}",
            b.len(),
            subsets,
            limits.subset_budget
        )));
    }
    let period = lcm_biguint(b);
    if b.is_empty() {
        return Ok(ExactDensity::new(BigUint::zero(), BigUint::one()));
    }
    let values = b.values();
    // fast path: all subset lcms divide the period, which fits comfortably
    if let Some(p) = period.to_u128().filter(|&p| p < 1u128 << 100) {
        let mut count: i128 = 0;
        ie_small(&values, 0, 1, true, p, &mut count);
        return Ok(ExactDensity::new(
            BigUint::from(count as u128),
            period,
        ));
    }
    let mut count = BigInt::zero();
    ie_big(&values, 0, &BigUint::one(), true, &period, &mut count);
    Ok(ExactDensity::new(
        count.to_biguint().expect("non-negative count"),
        period,
    ))
}

fn ie_small(values: &[u64], from: usize, cur: u128, odd: bool, period: u128, acc: &mut i128) {
    for j in from..values.len() {
        let v = values[j] as u128;
        let l = cur / gcd128(cur, v) * v;
        let term = (period / l) as i128;
        if odd {
            *acc += term;
        } else {
            *acc -= term;
        }
        ie_small(values, j + 1, l, !odd, period, acc);
    }
}

fn ie_big(values: &[u64], from: usize, cur: &BigUint, odd: bool, period: &BigUint, acc: &mut BigInt) {
    for j in from..values.len() {
        let l = cur.lcm(&BigUint::from(values[j]));
        let term = BigInt::from(period / &l);
        if odd {
            *acc += term;
        } else {
            *acc -= term;
        }
        ie_big(values, j + 1, &l, !odd, period, acc);
    }
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inclusion–exclusion that stops descending below subsets whose lcm
/// exceeds `cap`. A pruned subtree rooted at lcm `l` contributes
/// `±x` with `0 <= x <= 1/l < 1/(cap+1)`, which widens the interval.
pub fn density_bounds(b: &BSet, cap: u64, limits: &Limits) -> Result<DensityBounds> {
    struct Walk<'a> {
        values: &'a [u64],
        cap: u128,
        budget: u64,
        visited: u64,
        // sums of 1/l over exact terms, stored as count over `period`
        exact: BigInt,
        period: BigUint,
        pruned_pos: u64,
        pruned_neg: u64,
    }

    impl Walk<'_> {
        fn go(&mut self, from: usize, cur: u128, odd: bool) -> Result<()> {
            for j in from..self.values.len() {
                self.visited += 1;
                if self.visited > self.budget {
                    return Err(Error::Budget(format!(
                        "pruned inclusion-exclusion exceeded {} subsets",
                        self.budget
                    )));
                }
                let v = self.values[j] as u128;
                let l = cur / gcd128(cur, v) * v;
                if l > self.cap {
                    if odd {
                        self.pruned_pos += 1;
                    } else {
                        self.pruned_neg += 1;
                    }
                    continue;
                }
                let term = BigInt::from(&self.period / BigUint::from(l));
                if odd {
                    self.exact += term;
                } else {
                    self.exact -= term;
                }
                self.go(j + 1, l, !odd)?;
            }
            Ok(())
        }
    }

    let values = b.values();
    // every retained lcm is <= cap, so it divides the lcm of all numbers <= cap
    // that occur; accumulate over lcm of the moduli that are themselves <= cap
    let period = values
        .iter()
        .filter(|&&v| v <= cap)
        .fold(BigUint::one(), |acc, &v| acc.lcm(&BigUint::from(v)));
    let mut walk = Walk {
        values: &values,
        cap: cap as u128,
        budget: limits.subset_budget,
        visited: 0,
        exact: BigInt::zero(),
        period: period.clone(),
        pruned_pos: 0,
        pruned_neg: 0,
    };
    walk.go(0, 1, true)?;
    let exact = BigRational::new(walk.exact, BigInt::from(period));
    let slack = |k: u64| BigRational::new(k.into(), (cap as u128 + 1).into());
    let zero = BigRational::zero();
    let one = BigRational::one();
    let lower = (&exact - slack(walk.pruned_neg)).max(zero.clone()).min(one.clone());
    let upper = (&exact + slack(walk.pruned_pos)).max(zero).min(one);
    Ok(DensityBounds {
        lower,
        upper,
        cap,
        pruned_subtrees: walk.pruned_pos + walk.pruned_neg,
    })
}

/// Density of `{k ≡ r mod beta : k + i ∈ F_C for every shift i}`, counted
/// over one period `lcm(beta, lcm(C))`.
pub fn exact_progression_free_density(
    c: &BSet,
    beta: u64,
    r: i64,
    shifts: &[i64],
    limits: &Limits,
) -> Result<ExactDensity> {
    if beta == 0 {
        return Err(Error::precondition("beta must be >= 1"));
    }
    let period = c
        .lcm_u64()
        .and_then(|l| {
            let g = primes::gcd(l, beta);
            (l / g).checked_mul(beta)
        })
        .filter(|&l| l <= limits.lcm_cap)
        .ok_or_else(|| Error::PeriodOverflow {
            lcm: describe_big(&c.lcm().lcm(&BigUint::from(beta))),
            cap: limits.lcm_cap,
            subsets: subset_count(c.len()).to_string(),
            budget: limits.subset_budget,
        })?;
    let lo_shift = shifts.iter().copied().min().unwrap_or(0).min(0);
    let hi_shift = shifts.iter().copied().max().unwrap_or(0).max(0);
    let r0 = r.rem_euclid(beta as i64) as u64;

    const CHUNK: u64 = 1 << 22;
    let chunks: Vec<u64> = (0..period.div_ceil(CHUNK)).collect();
    let count: u64 = chunks
        .par_iter()
        .map(|&ci| {
            let from = ci * CHUNK;
            let to = (from + CHUNK).min(period);
            let base = from as i64 + lo_shift;
            let seg = sieve_interval(c, base, (to - from) + (hi_shift - lo_shift) as u64);
            // first k >= from with k ≡ r0 mod beta
            let mut k = from + (r0 + beta - from % beta) % beta;
            let mut n = 0u64;
            while k < to {
                if shifts
                    .iter()
                    .all(|&i| seg.get((k as i64 + i - base) as u64))
                {
                    n += 1;
                }
                k += beta;
            }
            n
        })
        .sum();
    Ok(ExactDensity::new(count.into(), period.into()))
}

/// Checkpoints `n·2^(-j/8)`, `j = 0..=8`, ascending and deduplicated.
pub fn checkpoints(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (0..=8)
        .map(|j| ((n as f64) * 2f64.powf(-(j as f64) / 8.0)).round() as u64)
        .map(|m| m.clamp(1, n))
        .collect();
    out[0] = n;
    out[8] = (n / 2).max(1);
    out.sort_unstable();
    out.dedup();
    out
}

/// Min/max of partial averages over the checkpoints in `[n/2, n]`, plus
/// the average at `n`.
pub fn natural_density_bounds(b: &BSet, n: u64) -> Result<NaturalBounds> {
    if n == 0 {
        return Err(Error::precondition("window n must be >= 1"));
    }
    if b.is_empty() {
        return Ok(NaturalBounds {
            lower: DensityEstimate::exact_zero(EstimateKind::NaturalLower, n),
            upper: DensityEstimate::exact_zero(EstimateKind::NaturalUpper, n),
            last: DensityEstimate::exact_zero(EstimateKind::Natural, n),
        });
    }
    let seg = sieve_interval(b, 1, n);
    Ok(bounds_from_segment(&seg, n))
}

fn bounds_from_segment(seg: &EtaSegment, n: u64) -> NaturalBounds {
    let trace: Vec<(u64, f64)> = checkpoints(n)
        .into_iter()
        .map(|m| (m, (m - seg.count_ones_prefix(m)) as f64 / m as f64))
        .collect();
    let lo = trace.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
    let hi = trace.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    let last = trace.last().map(|t| t.1).unwrap_or(0.0);
    let est = |value, kind| DensityEstimate {
        value,
        kind,
        n,
        trace: trace.clone(),
    };
    NaturalBounds {
        lower: est(lo, EstimateKind::NaturalLower),
        upper: est(hi, EstimateKind::NaturalUpper),
        last: est(last, EstimateKind::Natural),
    }
}

/// `|M_B ∩ [1, n]| / n`.
pub fn natural_density_estimate(b: &BSet, n: u64) -> Result<DensityEstimate> {
    if n == 0 {
        return Err(Error::precondition("window n must be >= 1"));
    }
    if b.is_empty() {
        return Ok(DensityEstimate::exact_zero(EstimateKind::Natural, n));
    }
    let zeros = crate::sieve::count_multiples(b, 1, n);
    Ok(DensityEstimate {
        value: zeros as f64 / n as f64,
        kind: EstimateKind::Natural,
        n,
        trace: Vec::new(),
    })
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn merge(&mut self, other: Kahan) {
        self.add(other.sum);
        self.add(other.comp);
    }

    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

/// Logarithmic density estimate: the harmonic average of `1_{M_B}` over
/// the tail window `(⌊√n⌋, n]`. The trace holds the plain normalized
/// average `Σ_{k≤n} 1_M(k)/k / Σ_{k≤n} 1/k` for comparison.
pub fn log_density_estimate(b: &BSet, n: u64) -> Result<DensityEstimate> {
    if n < 2 {
        return Err(Error::precondition("log density window n must be >= 2"));
    }
    if b.is_empty() {
        return Ok(DensityEstimate::exact_zero(EstimateKind::Logarithmic, n));
    }
    let seg = sieve_interval(b, 1, n);
    let m = primes::isqrt(n);

    // fixed chunking keeps the reduction order independent of thread count
    const CHUNK: u64 = 1 << 16;
    let partials: Vec<[Kahan; 4]> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|ci| {
            let mut acc = [Kahan::default(); 4]; // head M, head all, tail M, tail all
            let from = ci * CHUNK + 1;
            let to = ((ci + 1) * CHUNK).min(n);
            for k in from..=to {
                let w = 1.0 / k as f64;
                let in_m = !seg.get(k - 1);
                let slot = if k <= m { 0 } else { 2 };
                if in_m {
                    acc[slot].add(w);
                }
                acc[slot + 1].add(w);
            }
            acc
        })
        .collect();
    let mut tot = [Kahan::default(); 4];
    for p in partials {
        for (t, x) in tot.iter_mut().zip(p) {
            t.merge(x);
        }
    }
    let tail = tot[2].value() / tot[3].value();
    let mut head_m = tot[0];
    head_m.merge(tot[2]);
    let mut head_all = tot[1];
    head_all.merge(tot[3]);
    let raw = head_m.value() / head_all.value();
    Ok(DensityEstimate {
        value: tail,
        kind: EstimateKind::Logarithmic,
        n,
        trace: vec![(n, raw)],
    })
}

fn check_increasing(ks: &[u64], what: &str) -> Result<()> {
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition(format!("{what} must be strictly increasing")));
    }
    Ok(())
}

/// `d(M_{B ∩ {1..K}})` for each `K`.
pub fn davenport_erdos_sequence(
    family: &FamilySpec,
    ks: &[u64],
    limits: &Limits,
) -> Result<Vec<ExactDensity>> {
    check_increasing(ks, "Ks")?;
    let full = match (ks.last(), family.truncation()) {
        (Some(&k), Some(bound)) if k > bound => {
            return Err(Error::TruncationExceeded { k, bound })
        }
        _ => family.expand()?,
    };
    ks.iter()
        .map(|&k| exact_density(&full.truncate(k), limits))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub k: u64,
    pub tail_size: usize,
    pub estimate: DensityEstimate,
}

/// Upper-density proxy of `M_{{b > K}}` at window `n`, per `K`.
pub fn light_tails_profile(b: &BSet, ks: &[u64], n: u64) -> Result<Vec<TailEstimate>> {
    check_increasing(ks, "Ks")?;
    ks.par_iter()
        .map(|&k| {
            let tail = b.tail(k);
            let estimate = if tail.is_empty() {
                DensityEstimate::exact_zero(EstimateKind::NaturalUpper, n)
            } else {
                natural_density_bounds(&tail, n)?.upper
            };
            Ok(TailEstimate {
                k,
                tail_size: tail.len(),
                estimate,
            })
        })
        .collect()
}

/// `(δ(M_A ∩ M_C), δ(M_A), δ(M_C))` for mutually coprime `A`, `C`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoprimeTriple {
    pub intersection: ExactDensity,
    pub a: ExactDensity,
    pub c: ExactDensity,
}

impl CoprimeTriple {
    pub fn is_multiplicative(&self) -> bool {
        self.intersection.value == &self.a.value * &self.c.value
    }
}

pub fn coprime_product_check(a: &BSet, c: &BSet, limits: &Limits) -> Result<CoprimeTriple> {
    let mut products = Vec::with_capacity(a.len() * c.len());
    for x in a.values() {
        for y in c.values() {
            let g = primes::gcd(x, y);
            if g != 1 {
                return Err(Error::NotCoprime { a: x, c: y, gcd: g });
            }
            products.push(x.checked_mul(y).ok_or_else(|| {
                Error::Budget(format!("product {x}*{y} overflows u64"))
            })?);
        }
    }
    // M_A ∩ M_C = M_{ac}: coprime a, c give lcm(a, c) = ac
    let inter = BSet::primitivize(&products)?;
    Ok(CoprimeTriple {
        intersection: exact_density(&inter, limits)?,
        a: exact_density(a, limits)?,
        c: exact_density(c, limits)?,
    })
}
