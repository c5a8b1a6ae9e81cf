//! Dichotomy profiles, tautness diagnostics, prime exhaustion and the
//! progression-density checks.

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::density::{
    exact_progression_free_density, natural_density_estimate, ratio, ser_ratio, DensityEstimate,
    ExactDensity, Limits,
};
use crate::error::{Error, Result};
use crate::primes::{self, gcd, is_prime};
use crate::sets::{BSet, FamilySpec};
use crate::sieve::sieve_interval;

/// Finite proxy for the 0/1 dichotomy of `δ(M_{B̃^(N)})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct Thresholds {
    /// Behrend-like when every estimate exceeds this.
    pub behrend_above: f64,
    /// Vanishing needs the last estimate below this ...
    pub vanishing_below: f64,
    /// ... and `first >= min_decrease * last`.
    pub min_decrease: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            behrend_above: 0.9,
            vanishing_below: 0.1,
            min_decrease: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    BehrendLike,
    Vanishing,
    Inconclusive,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::BehrendLike => "behrend-like",
            Classification::Vanishing => "vanishing",
            Classification::Inconclusive => "inconclusive",
        }
    }
}

pub fn classify(estimates: &[f64], t: &Thresholds) -> Classification {
    let (Some(&first), Some(&last)) = (estimates.first(), estimates.last()) else {
        return Classification::Inconclusive;
    };
    if estimates.iter().all(|&e| e > t.behrend_above) {
        Classification::BehrendLike
    } else if last < t.vanishing_below && first >= t.min_decrease * last {
        Classification::Vanishing
    } else {
        Classification::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyProfile {
    pub family: String,
    /// Bound the family was expanded to.
    pub truncation: Option<u64>,
    #[serde(rename = "Ns")]
    pub ns: Vec<u64>,
    pub window: u64,
    pub estimates: Vec<DensityEstimate>,
    /// `|B̃^(N)|` per `N`.
    pub sizes: Vec<usize>,
    pub classification: Classification,
    pub thresholds: Thresholds,
}

fn check_ns(ns: &[u64]) -> Result<()> {
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition("Ns must be non-empty and strictly increasing"));
    }
    Ok(())
}

/// For an explicit finite list, append the largest prime of its spectrum
/// (where `B̃^(N)` becomes empty) if `ns` stops short of it.
fn close_finite(family: &FamilySpec, b: &BSet, ns: &[u64]) -> Vec<u64> {
    let mut ns = ns.to_vec();
    if matches!(family, FamilySpec::List(_)) {
        let top = b.elements().iter().filter_map(|m| m.largest_prime()).max();
        if let Some(p) = top.filter(|&p| ns.last().is_some_and(|&last| last < p)) {
            ns.push(p);
        }
    }
    ns
}

/// `δ̂(M_{B̃^(N)})` for each `N`: natural average at window `n`.
pub fn profile_of(b: &BSet, ns: &[u64], n: u64, t: &Thresholds) -> Result<DichotomyProfile> {
    check_ns(ns)?;
    let rows = ns
        .par_iter()
        .map(|&big_n| {
            let sub = b.spec_outside(big_n);
            Ok((natural_density_estimate(&sub, n)?, sub.len()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (estimates, sizes): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let values: Vec<f64> = estimates.iter().map(|e| e.value).collect();
    Ok(DichotomyProfile {
        family: b.provenance().source.clone(),
        truncation: b.provenance().truncation,
        ns: ns.to_vec(),
        window: n,
        classification: classify(&values, t),
        estimates,
        sizes,
        thresholds: *t,
    })
}

/// Dichotomy profile of a family. Members up to the window `n` are always
/// included, whatever the textual bound.
pub fn behrend_profile(family: &FamilySpec, ns: &[u64], n: u64, t: &Thresholds) -> Result<DichotomyProfile> {
    check_ns(ns)?;
    let b = family.extended_to(n).expand()?;
    let mut p = profile_of(&b, &close_finite(family, &b, ns), n, t)?;
    p.family = family.to_string();
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum TautVerdict {
    TautConsistent,
    NonTautWitness { q: u64 },
    Inconclusive,
}

impl TautVerdict {
    pub fn name(&self) -> String {
        match self {
            TautVerdict::TautConsistent => "taut-consistent".into(),
            TautVerdict::NonTautWitness { q } => format!("non-taut witness q={q}"),
            TautVerdict::Inconclusive => "inconclusive".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientProfile {
    pub q: u64,
    pub profile: DichotomyProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TautReport {
    pub family: String,
    pub qs: Vec<u64>,
    #[serde(rename = "Ns")]
    pub ns: Vec<u64>,
    pub window: u64,
    pub thresholds: Thresholds,
    pub profiles: Vec<QuotientProfile>,
    pub verdict: TautVerdict,
}

/// Profiles of `B/q` (the element 1 dropped) for each `q`.
pub fn tautness_diagnostic(
    family: &FamilySpec,
    qs: &[u64],
    ns: &[u64],
    n: u64,
    t: &Thresholds,
) -> Result<TautReport> {
    check_ns(ns)?;
    if qs.is_empty() || qs.contains(&0) {
        return Err(Error::precondition("qs must be non-empty positive integers"));
    }
    let q_max = *qs.iter().max().unwrap();
    let b = family.extended_to(n.saturating_mul(q_max)).expand()?;
    let ns = close_finite(family, &b, ns);
    let profiles = qs
        .iter()
        .map(|&q| {
            let bq = b.quotient(q)?.without_one();
            let mut profile = profile_of(&bq, &ns, n, t)?;
            profile.family = format!("{family} / {q}");
            Ok(QuotientProfile { q, profile })
        })
        .collect::<Result<Vec<_>>>()?;
    let witness = profiles
        .iter()
        .find(|p| p.profile.classification == Classification::BehrendLike);
    let verdict = if let Some(w) = witness {
        TautVerdict::NonTautWitness { q: w.q }
    } else if profiles
        .iter()
        .all(|p| p.profile.classification == Classification::Vanishing)
    {
        TautVerdict::TautConsistent
    } else {
        TautVerdict::Inconclusive
    };
    Ok(TautReport {
        family: family.to_string(),
        qs: qs.to_vec(),
        ns,
        window: n,
        thresholds: *t,
        profiles,
        verdict,
    })
}

/// Parameters and outcome of the prime-exhaustion construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimeExhaustReport {
    pub family: String,
    #[serde(rename = "A")]
    pub a: Vec<u64>,
    pub epsilon: f64,
    pub window: u64,
    /// Smallest `L` with `Σ_{p∈A} p^{-L} < ε`.
    #[serde(rename = "L")]
    pub l: u32,
    #[serde(rename = "Q0")]
    pub q0: Vec<u64>,
    /// `ε / L^|A|`.
    pub threshold: f64,
    #[serde(rename = "N")]
    pub n_found: u64,
    /// `max_q δ̂(M_{(B/q)̃^(N)})` at the chosen `N`.
    pub max_quotient_estimate: f64,
    #[serde(rename = "P")]
    pub p: Vec<u64>,
    /// `δ̂(M_{B ∖ (B_A ∪ M_P)})`.
    pub verified: DensityEstimate,
}

const MAX_EXPONENT: u32 = 64;
const MAX_Q0: usize = 4096;

fn q0_set(a: &[u64], l: u32) -> Result<Vec<u64>> {
    let mut out = vec![1u64];
    for &p in a {
        let mut next = Vec::new();
        for &q in &out {
            let mut pk = 1u64;
            for _ in 0..l {
                let Some(v) = q.checked_mul(pk) else { break };
                next.push(v);
                let Some(np) = pk.checked_mul(p) else { break };
                pk = np;
            }
        }
        out = next;
        if out.len() > MAX_Q0 {
            return Err(Error::Budget(format!("|Q0| exceeds {MAX_Q0}")));
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Search for `N` such that `P = (primes <= N) ∖ A` leaves a residual
/// family `B ∖ (B_A ∪ M_P)` of estimated density `< ε`.
pub fn prime_exhaust(
    family: &FamilySpec,
    a: &[u64],
    epsilon: f64,
    n: u64,
    max_n: u64,
) -> Result<PrimeExhaustReport> {
    if !(epsilon > 0.0) {
        return Err(Error::precondition("epsilon must be positive"));
    }
    let mut a: Vec<u64> = a.to_vec();
    a.sort_unstable();
    a.dedup();
    if let Some(&bad) = a.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::precondition(format!("{bad} in A is not prime")));
    }
    let l = if a.is_empty() {
        1
    } else {
        (1..=MAX_EXPONENT)
            .find(|&l| a.iter().map(|&p| (p as f64).powi(-(l as i32))).sum::<f64>() < epsilon)
            .ok_or_else(|| Error::Budget(format!("no L <= {MAX_EXPONENT} for epsilon {epsilon}")))?
    };
    let q0 = q0_set(&a, l)?;
    let threshold = epsilon / (l as f64).powi(a.len() as i32);

    let q_max = *q0.last().unwrap();
    let b = family.extended_to(n.saturating_mul(q_max)).expand()?;
    let window_b = family.extended_to(n).expand()?;
    let quotients: Vec<BSet> = q0
        .iter()
        .map(|&q| Ok(b.quotient(q)?.without_one()))
        .collect::<Result<_>>()?;
    let residual_base = window_b.minus(&window_b.restrict_spectrum(&a));

    let mut candidates = vec![0u64];
    candidates.extend(primes::primes_up_to(max_n));

    // (max quotient estimate, residual estimate) at candidate index i
    let evaluate = |i: usize| -> Result<(f64, DensityEstimate, Vec<u64>)> {
        let big_n = candidates[i];
        let worst = quotients
            .par_iter()
            .map(|bq| natural_density_estimate(&bq.spec_outside(big_n), n).map(|e| e.value))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let p: Vec<u64> = candidates[1..=i].iter().copied().filter(|q| !a.contains(q)).collect();
        let residual = natural_density_estimate(&residual_base.remove_multiples(&p), n)?;
        Ok((worst, residual, p))
    };
    let passes = |r: &(f64, DensityEstimate, Vec<u64>)| r.0 < threshold && r.1.value < epsilon;

    // both estimates are non-increasing in N, so bisect for the first pass
    let last = candidates.len() - 1;
    let top = evaluate(last)?;
    if !passes(&top) {
        return Err(Error::SearchExhausted(format!(
            "no N <= {max_n} reaches threshold {threshold:.4} (max quotient estimate {:.4}, residual {:.4})",
            top.0, top.1.value
        )));
    }
    let (mut lo, mut hi, mut best) = (0usize, last, top);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let r = evaluate(mid)?;
        if passes(&r) {
            hi = mid;
            best = r;
        } else {
            lo = mid + 1;
        }
    }
    if hi == 0 {
        best = evaluate(0)?;
    }
    let (worst, verified, p) = best;
    Ok(PrimeExhaustReport {
        family: family.to_string(),
        a,
        epsilon,
        window: n,
        l,
        q0,
        threshold,
        n_found: candidates[hi],
        max_quotient_estimate: worst,
        p,
        verified,
    })
}

/// Both sides of the progression-density inequality, exactly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProgressionBoundReport {
    pub c: Vec<u64>,
    pub beta: u64,
    pub r: i64,
    pub n: u64,
    #[serde(rename = "P")]
    pub p: Vec<u64>,
    pub lhs: ExactDensity,
    /// `Π_{p∈P} (1 - n/p)`.
    #[serde(serialize_with = "ser_ratio")]
    pub factor: BigRational,
    /// Density for `C ∖ M_P`, before the factor.
    pub reduced: ExactDensity,
    #[serde(serialize_with = "ser_ratio")]
    pub rhs: BigRational,
    pub holds: bool,
}

pub fn progression_bound_check(
    c: &BSet,
    beta: u64,
    r: i64,
    n: u64,
    p: &[u64],
    limits: &Limits,
) -> Result<ProgressionBoundReport> {
    if beta == 0 || n == 0 {
        return Err(Error::precondition("beta and n must be >= 1"));
    }
    let mut p: Vec<u64> = p.to_vec();
    p.sort_unstable();
    p.dedup();
    for &q in &p {
        if !is_prime(q) {
            return Err(Error::precondition(format!("{q} in P is not prime")));
        }
        if q <= n {
            return Err(Error::precondition(format!("prime {q} in P is not > n = {n}")));
        }
        if gcd(q, beta) != 1 {
            return Err(Error::precondition(format!("prime {q} in P divides beta = {beta}")));
        }
    }
    let shifts: Vec<i64> = (1..=n as i64).collect();
    let lhs = exact_progression_free_density(c, beta, r, &shifts, limits)?;
    let reduced = exact_progression_free_density(&c.remove_multiples(&p), beta, r, &shifts, limits)?;
    let factor = p
        .iter()
        .fold(BigRational::one(), |acc, &q| acc * ratio(q - n, q));
    let rhs = &factor * &reduced.value;
    Ok(ProgressionBoundReport {
        c: c.values(),
        beta,
        r,
        n,
        p,
        holds: lhs.value >= rhs,
        lhs,
        factor,
        reduced,
        rhs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub i: u64,
    pub modulus: u64,
}

/// Frequency of the pattern `{r+1..r+n} ∩ M_B = r + I` along a window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternFrequencyReport {
    pub family: String,
    pub r: i64,
    pub n: u32,
    /// Offsets `i` in `1..=n` with `r + i ∈ M_B`.
    #[serde(rename = "I")]
    pub i_set: Vec<u64>,
    pub pattern: String,
    pub window_start: i64,
    pub window_length: u64,
    pub count: u64,
    pub frequency: f64,
    /// Smallest modulus dividing `r + i`, per `i ∈ I`.
    pub witnesses: Vec<Witness>,
    pub witness_lcm: Option<u64>,
    /// `1 / witness_lcm` when `I = {1..n}`.
    pub lower_bound: Option<f64>,
}

pub fn pattern_frequency_check(b: &BSet, r: i64, n: u32, start: i64, len: u64) -> Result<PatternFrequencyReport> {
    if n == 0 || n > 64 {
        return Err(Error::precondition("pattern length must be in 1..=64"));
    }
    let reference = sieve_interval(b, r + 1, n as u64);
    let pattern = reference.to_bitstring();
    let i_set: Vec<u64> = (0..n as u64).filter(|&i| !reference.get(i)).map(|i| i + 1).collect();
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let target = reference.iter().fold(0u64, |acc, bit| acc << 1 | bit as u64);

    let count = if len == 0 {
        0
    } else {
        let seg = sieve_interval(b, start + 1, len + n as u64 - 1);
        let mut code = 0u64;
        for i in 0..n as u64 - 1 {
            code = code << 1 | seg.get(i) as u64;
        }
        let mut count = 0;
        for k in 0..len {
            code = (code << 1 | seg.get(k + n as u64 - 1) as u64) & mask;
            count += (code == target) as u64;
        }
        count
    };

    let witnesses: Vec<Witness> = i_set
        .iter()
        .map(|&i| {
            let v = r + i as i64;
            let modulus = b
                .values()
                .into_iter()
                .find(|&m| v.rem_euclid(m as i64) == 0)
                .expect("offset in I has a dividing modulus");
            Witness { i, modulus }
        })
        .collect();
    let witness_lcm = if witnesses.is_empty() {
        None
    } else {
        witnesses.iter().try_fold(1u64, |acc, w| {
            (acc / gcd(acc, w.modulus)).checked_mul(w.modulus)
        })
    };
    let full = i_set.len() == n as usize;
    Ok(PatternFrequencyReport {
        family: b.provenance().source.clone(),
        r,
        n,
        i_set,
        pattern,
        window_start: start,
        window_length: len,
        count,
        frequency: if len == 0 { 0.0 } else { count as f64 / len as f64 },
        witnesses,
        lower_bound: witness_lcm.filter(|_| full).map(|l| 1.0 / l as f64),
        witness_lcm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[u64]) -> BSet {
        BSet::primitivize(v).unwrap()
    }

    fn fam(s: &str) -> FamilySpec {
        FamilySpec::parse(s).unwrap()
    }

    #[test]
    fn classification_rule() {
        let t = Thresholds::default();
        assert_eq!(classify(&[0.95, 0.99], &t), Classification::BehrendLike);
        assert_eq!(classify(&[0.2, 0.05], &t), Classification::Vanishing);
        assert_eq!(classify(&[0.0, 0.0], &t), Classification::Vanishing);
        assert_eq!(classify(&[0.08, 0.05], &t), Classification::Inconclusive);
        assert_eq!(classify(&[0.5, 0.4], &t), Classification::Inconclusive);
    }

    #[test]
    fn primes_are_behrend_like() {
        let t = Thresholds::default();
        let p = behrend_profile(&fam("primes:1000"), &[2, 5, 10, 20], 1_000_000, &t).unwrap();
        assert_eq!(p.classification, Classification::BehrendLike);
        assert!(p.estimates.iter().all(|e| e.value > 0.99), "{:?}", p.estimates);
    }

    #[test]
    fn prime_squares_vanish() {
        let t = Thresholds::default();
        let p = behrend_profile(&fam("prime_squares:1000000"), &[2, 3, 5, 10], 1_000_000, &t).unwrap();
        assert_eq!(p.classification, Classification::Vanishing);
        assert!(p.estimates[3].value <= 0.04);
        assert!(p.estimates.windows(2).all(|w| w[0].value >= w[1].value));
    }

    #[test]
    fn empty_family_vanishes() {
        let t = Thresholds::default();
        let p = behrend_profile(&fam("list:"), &[2, 5], 10_000, &t).unwrap();
        assert!(p.estimates.iter().all(|e| e.value == 0.0));
        assert_eq!(p.classification, Classification::Vanishing);
    }

    #[test]
    fn tautness_examples() {
        let t = Thresholds::default();
        let sq = tautness_diagnostic(&fam("prime_squares:10000"), &[1, 2, 3, 4], &[2, 5, 10], 1_000_000, &t)
            .unwrap();
        assert_eq!(sq.verdict, TautVerdict::TautConsistent);
        let scaled = tautness_diagnostic(
            &fam("scale:2,predicate:odd_primes:1000"),
            &[1, 2],
            &[2, 5, 10, 20],
            1_000_000,
            &t,
        )
        .unwrap();
        assert_eq!(scaled.verdict, TautVerdict::NonTautWitness { q: 2 });
        let two = tautness_diagnostic(&fam("list:2"), &[1, 2], &[2, 5], 100_000, &t).unwrap();
        assert_eq!(two.verdict, TautVerdict::TautConsistent);
    }

    #[test]
    fn prime_exhaust_examples() {
        let r = prime_exhaust(&fam("prime_squares:1000000"), &[2], 0.1, 1_000_000, 1_000).unwrap();
        assert!(r.p.contains(&3));
        assert!(!r.p.contains(&2));
        assert!(r.verified.value < 0.1);
        assert_eq!(r.l, 4);
        assert_eq!(r.q0, vec![1, 2, 4, 8]);

        let b = fam("list:6,10,15");
        let r = prime_exhaust(&b, &[], 1.5, 10_000, 100).unwrap();
        assert!(r.p.is_empty());
        assert_eq!(r.n_found, 0);

        let e = prime_exhaust(&fam("scale:2,primes:1000"), &[2], 0.1, 100_000, 200).unwrap_err();
        assert!(matches!(e, Error::SearchExhausted(_)));
        assert!(prime_exhaust(&b, &[4], 0.1, 100, 10).is_err());
    }

    #[test]
    fn progression_bound_examples() {
        let lim = Limits::default();
        let r = progression_bound_check(&set(&[5, 9, 25]), 2, 1, 2, &[5], &lim).unwrap();
        assert_eq!(r.lhs.to_string(), "7/30");
        assert_eq!(ratio_text(&r.rhs), "7/30");
        assert_eq!(r.reduced.to_string(), "7/18");
        assert!(r.holds);

        let r = progression_bound_check(&set(&[9]), 2, 1, 2, &[5], &lim).unwrap();
        assert_eq!(r.lhs.to_string(), "7/18");
        assert_eq!(r.rhs * BigRational::new(5.into(), 3.into()), r.lhs.value);

        let r = progression_bound_check(&set(&[5, 9, 25]), 2, 1, 2, &[], &lim).unwrap();
        assert_eq!(r.lhs.value, r.rhs);

        assert!(progression_bound_check(&set(&[9]), 2, 1, 2, &[2], &lim).is_err());
        assert!(progression_bound_check(&set(&[9]), 10, 1, 2, &[5], &lim).is_err());
        assert!(progression_bound_check(&set(&[9]), 2, 1, 2, &[9], &lim).is_err());
    }

    fn ratio_text(r: &BigRational) -> String {
        format!("{}/{}", r.numer(), r.denom())
    }

    #[test]
    fn pattern_frequency_examples() {
        let sq = fam("prime_squares:1000000").expand().unwrap();
        let r = pattern_frequency_check(&sq, 47, 3, 1, 1_000_000).unwrap();
        assert_eq!(r.i_set, vec![1, 2, 3]);
        assert_eq!(r.witness_lcm, Some(4900));
        assert!(r.frequency >= 1.0 / 4900.0);

        let r = pattern_frequency_check(&set(&[2]), 1, 2, 0, 10_000).unwrap();
        assert_eq!(r.i_set, vec![1]);
        assert_eq!(r.pattern, "01");
        assert_eq!(r.frequency, 0.5);
        assert_eq!(r.lower_bound, None);

        // I = ∅ reduces to the density of F_B
        let b = set(&[4, 9]);
        let r = pattern_frequency_check(&b, 0, 1, 0, 36_000).unwrap();
        assert!(r.i_set.is_empty());
        assert_eq!(r.count, 36_000 - crate::sieve::count_multiples(&b, 1, 36_000));
    }

    /// `δ((βZ+r) ∩ ⋂(F_C − i))` by listing one period.
    fn brute_progression(c: &[u64], beta: u64, r: i64, n: u64) -> BigRational {
        let period = c.iter().fold(beta, |acc, &m| acc / gcd(acc, m) * m);
        let free = |k: i64| c.iter().all(|&m| k.rem_euclid(m as i64) != 0);
        let count = (0..period as i64)
            .filter(|&k| (k - r).rem_euclid(beta as i64) == 0)
            .filter(|&k| (1..=n as i64).all(|i| free(k + i)))
            .count();
        BigRational::new((count as u64).into(), period.into())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn progression_bound_inequality(
            c in prop::collection::vec(1u64..=50, 0..4),
            beta in 1u64..=6,
            r in 0i64..6,
            n in 1u64..=3,
            mask in 0u8..16,
        ) {
            let c = set(&c);
            prop_assume!(c.lcm_u64().is_some_and(|l| l <= 2_000_000));
            let p: Vec<u64> = [5u64, 7, 11, 13]
                .iter()
                .enumerate()
                .filter(|&(i, &q)| mask >> i & 1 == 1 && q > n && gcd(q, beta) == 1)
                .map(|(_, &q)| q)
                .collect();
            let rep = progression_bound_check(&c, beta, r, n, &p, &Limits::default()).unwrap();
            prop_assert!(rep.holds);
            if c.lcm_u64().unwrap() <= 20_000 {
                prop_assert_eq!(rep.lhs.value, brute_progression(&c.values(), beta, r, n));
            }
        }

        #[test]
        fn finite_lists_are_taut_consistent(v in prop::collection::vec(2u64..200, 1..5)) {
            let spec = FamilySpec::List(v);
            let t = Thresholds::default();
            let rep = tautness_diagnostic(&spec, &[1, 2, 3], &[2, 5], 20_000, &t).unwrap();
            prop_assert_eq!(rep.verdict, TautVerdict::TautConsistent);
        }

        #[test]
        fn profile_non_increasing(v in prop::collection::vec(2u64..500, 1..8)) {
            let b = set(&v);
            let p = profile_of(&b, &[2, 3, 5, 7, 11], 50_000, &Thresholds::default()).unwrap();
            prop_assert!(p.estimates.windows(2).all(|w| w[0].value >= w[1].value));
        }

        #[test]
        fn exhaust_avoids_a(a in prop::sample::subsequence(vec![2u64, 3, 5], 0..=2)) {
            let r = prime_exhaust(&fam("prime_squares:100000"), &a, 0.2, 100_000, 200).unwrap();
            prop_assert!(r.p.iter().all(|q| !a.contains(q)));
        }
    }
}
