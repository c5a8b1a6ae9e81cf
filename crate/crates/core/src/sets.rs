//! Sets of moduli and the derived sets used throughout the lab.
//!
//! A [`BSet`] is always primitive, sorted and duplicate-free. Infinite
//! families are handled through [`FamilySpec`], which expands to a
//! truncation; the truncation bound travels with the set in its
//! [`Provenance`].

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{self, PrimeTable};

/// A positive integer together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Modulus {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Modulus {
    pub fn new(value: u64) -> Result<Self> {
        if value == 0 {
            return Err(Error::precondition("moduli must be >= 1"));
        }
        Ok(Self {
            value,
            factors: primes::factorize(value),
        })
    }

    fn with_table(value: u64, table: &PrimeTable) -> Self {
        Self {
            value,
            factors: table.factorize(value),
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// `(prime, exponent)` pairs, ascending.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// The prime divisors, ascending. Empty for 1.
    pub fn spectrum(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.last().map(|&(p, _)| p)
    }

    pub fn smallest_prime(&self) -> Option<u64> {
        self.factors.first().map(|&(p, _)| p)
    }

    fn proper_divisors_above_one(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.retain(|&d| d != 1 && d != self.value);
        divs
    }
}

/// Where a set came from: the generating description and, for infinite
/// families, the truncation bound on element size.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub truncation: Option<u64>,
}

impl Provenance {
    pub fn explicit(source: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            truncation: None,
        }
    }

    fn derive(&self, step: impl fmt::Display) -> Self {
        Self {
            source: format!("{} | {}", self.source, step),
            truncation: self.truncation,
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.truncation {
            Some(m) => write!(f, "{} (computed at truncation {})", self.source, m),
            None => f.write_str(&self.source),
        }
    }
}

/// A finite primitive set of moduli.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BSet {
    elements: Vec<Modulus>,
    provenance: Provenance,
}

impl BSet {
    pub fn empty() -> Self {
        Self {
            elements: Vec::new(),
            provenance: Provenance::explicit("empty"),
        }
    }

    /// Reduce `values` to its minimal elements under divisibility.
    pub fn primitivize(values: &[u64]) -> Result<Self> {
        let source = format!(
            "list:{}",
            values.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        );
        Self::primitivize_with(values, Provenance::explicit(source))
    }

    pub fn primitivize_with(values: &[u64], provenance: Provenance) -> Result<Self> {
        if values.contains(&0) {
            return Err(Error::precondition("moduli must be >= 1"));
        }
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.first() == Some(&1) {
            sorted.truncate(1);
        }
        let table = PrimeTable::for_max_value(sorted.last().copied().unwrap_or(1));
        let mut kept: HashSet<u64> = HashSet::with_capacity(sorted.len());
        let mut elements = Vec::with_capacity(sorted.len());
        for v in sorted {
            let m = Modulus::with_table(v, &table);
            let covered = !kept.is_empty()
                && m
                    .proper_divisors_above_one()
                    .iter()
                    .any(|d| kept.contains(d));
            if !covered {
                kept.insert(v);
                elements.push(m);
            }
        }
        Ok(Self {
            elements,
            provenance,
        })
    }

    fn from_sorted_primitive(elements: Vec<Modulus>, provenance: Provenance) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0].value < w[1].value));
        Self {
            elements,
            provenance,
        }
    }

    fn filtered(&self, step: impl fmt::Display, keep: impl Fn(&Modulus) -> bool) -> Self {
        Self::from_sorted_primitive(
            self.elements.iter().filter(|m| keep(m)).cloned().collect(),
            self.provenance.derive(step),
        )
    }

    pub fn elements(&self) -> &[Modulus] {
        &self.elements
    }

    pub fn values(&self) -> Vec<u64> {
        self.elements.iter().map(Modulus::value).collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains_one(&self) -> bool {
        self.elements.first().is_some_and(|m| m.value == 1)
    }

    pub fn max(&self) -> Option<u64> {
        self.elements.last().map(Modulus::value)
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// lcm of all elements; 1 for the empty set.
    pub fn lcm(&self) -> BigUint {
        let mut exps: std::collections::BTreeMap<u64, u32> = Default::default();
        for m in &self.elements {
            for &(p, e) in m.factors() {
                let slot = exps.entry(p).or_insert(0);
                *slot = (*slot).max(e);
            }
        }
        let mut terms: Vec<BigUint> = exps
            .into_iter()
            .map(|(p, e)| BigUint::from(p).pow(e))
            .collect();
        // balanced product tree
        while terms.len() > 1 {
            terms = terms
                .chunks(2)
                .map(|c| if c.len() == 2 { &c[0] * &c[1] } else { c[0].clone() })
                .collect();
        }
        terms.pop().unwrap_or_else(|| BigUint::from(1u32))
    }

    /// lcm as `u64`, or `None` when it does not fit.
    pub fn lcm_u64(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for m in &self.elements {
            let g = primes::gcd(acc, m.value);
            acc = (acc / g).checked_mul(m.value)?;
        }
        Some(acc)
    }

    /// Does some element divide `k`? (`k` may be negative.)
    pub fn divides_some(&self, k: i64) -> bool {
        let k = k.unsigned_abs();
        self.elements.iter().any(|m| k % m.value == 0)
    }

    /// `{b : b <= k}`.
    pub fn truncate(&self, k: u64) -> Self {
        self.filtered(format!("b <= {k}"), |m| m.value <= k)
    }

    /// `{b : b > k}`, the tail used for light-tails profiles.
    pub fn tail(&self, k: u64) -> Self {
        self.filtered(format!("b > {k}"), |m| m.value > k)
    }

    /// `{b : Spec(b) ⊆ {1..n}}`.
    pub fn spec_within(&self, n: u64) -> Self {
        self.filtered(format!("Spec(b) <= {n}"), |m| {
            m.largest_prime().map_or(true, |p| p <= n)
        })
    }

    /// `{b : Spec(b) ∩ {1..n} = ∅}`.
    pub fn spec_outside(&self, n: u64) -> Self {
        self.filtered(format!("Spec(b) > {n}"), |m| {
            m.smallest_prime().map_or(true, |p| p > n)
        })
    }

    /// `B/q = {b/q : q | b}`. The result of a primitive set is primitive.
    pub fn quotient(&self, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::precondition("quotient by 0"));
        }
        let quotients: Vec<u64> = self
            .elements
            .iter()
            .filter(|m| m.value % q == 0)
            .map(|m| m.value / q)
            .collect();
        let table = PrimeTable::for_max_value(quotients.last().copied().unwrap_or(1));
        Ok(Self::from_sorted_primitive(
            quotients
                .into_iter()
                .map(|v| Modulus::with_table(v, &table))
                .collect(),
            self.provenance.derive(format!("/{q}")),
        ))
    }

    /// The set without the element 1, if present.
    pub fn without_one(&self) -> Self {
        if self.contains_one() {
            self.filtered("b != 1", |m| m.value != 1)
        } else {
            self.clone()
        }
    }

    /// `B_A = {b : Spec(b) ⊆ A}`.
    pub fn restrict_spectrum(&self, primes: &[u64]) -> Self {
        let a: BTreeSet<u64> = primes.iter().copied().collect();
        self.filtered(format!("Spec(b) in {a:?}"), |m| {
            m.spectrum().all(|p| a.contains(&p))
        })
    }

    /// `{b : no p in P divides b}`.
    pub fn remove_multiples(&self, primes: &[u64]) -> Self {
        self.filtered(format!("no p in {primes:?} divides b"), |m| {
            primes.iter().all(|&p| p == 0 || m.value % p != 0)
        })
    }

    /// Set difference on elements.
    pub fn minus(&self, other: &BSet) -> Self {
        let drop: HashSet<u64> = other.elements.iter().map(Modulus::value).collect();
        self.filtered("minus", |m| !drop.contains(&m.value))
    }

    /// Greedy scan in increasing order for `k` pairwise coprime elements.
    pub fn find_coprime_subset(&self, k: usize) -> Option<Vec<Modulus>> {
        if k == 0 {
            return Some(Vec::new());
        }
        let mut picked: Vec<Modulus> = Vec::with_capacity(k);
        for m in &self.elements {
            if picked.iter().all(|x| primes::gcd(x.value, m.value) == 1) {
                picked.push(m.clone());
                if picked.len() == k {
                    return Some(picked);
                }
            }
        }
        None
    }
}

impl fmt::Display for BSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", m.value)?;
        }
        write!(f, "}}")
    }
}

/// Named predicates available through `predicate:<name>:M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Predicate {
    OddPrimes,
    PrimeCubes,
    Semiprimes,
    SquarefreeSemiprimes,
    Primes1Mod4,
    Primes3Mod4,
}

impl Predicate {
    pub const ALL: [Predicate; 6] = [
        Predicate::OddPrimes,
        Predicate::PrimeCubes,
        Predicate::Semiprimes,
        Predicate::SquarefreeSemiprimes,
        Predicate::Primes1Mod4,
        Predicate::Primes3Mod4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Predicate::OddPrimes => "odd_primes",
            Predicate::PrimeCubes => "prime_cubes",
            Predicate::Semiprimes => "semiprimes",
            Predicate::SquarefreeSemiprimes => "squarefree_semiprimes",
            Predicate::Primes1Mod4 => "primes_1mod4",
            Predicate::Primes3Mod4 => "primes_3mod4",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    fn expand(self, bound: u64) -> Vec<u64> {
        match self {
            Predicate::OddPrimes => primes::primes_up_to(bound).into_iter().skip(1).collect(),
            Predicate::Primes1Mod4 => primes::primes_up_to(bound)
                .into_iter()
                .filter(|p| p % 4 == 1)
                .collect(),
            Predicate::Primes3Mod4 => primes::primes_up_to(bound)
                .into_iter()
                .filter(|p| p % 4 == 3)
                .collect(),
            Predicate::PrimeCubes => primes::primes_up_to(icbrt(bound))
                .into_iter()
                .map(|p| p * p * p)
                .filter(|&c| c <= bound)
                .collect(),
            Predicate::Semiprimes | Predicate::SquarefreeSemiprimes => {
                let ps = primes::primes_up_to(bound / 2);
                let strict = self == Predicate::SquarefreeSemiprimes;
                let mut out = Vec::new();
                for (i, &p) in ps.iter().enumerate() {
                    if p > bound / p {
                        break;
                    }
                    let from = if strict { i + 1 } else { i };
                    for &q in &ps[from..] {
                        if q > bound / p {
                            break;
                        }
                        out.push(p * q);
                    }
                }
                out
            }
        }
    }
}

fn icbrt(n: u64) -> u64 {
    let mut x = (n as f64).cbrt() as u64;
    while x > 0 && x.saturating_mul(x).saturating_mul(x) > n {
        x -= 1;
    }
    while (x + 1).saturating_mul(x + 1).saturating_mul(x + 1) <= n {
        x += 1;
    }
    x
}

/// A finite handle on a possibly infinite family of moduli.
///
/// Textual form: `list:6,10,15`, `primes:M`, `prime_squares:M`,
/// `scale:r,<inner spec>`, `predicate:<name>:M`. `M` bounds element
/// size (for `scale`, the inner family is truncated at `M` and then
/// scaled by `r`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FamilySpec {
    List(Vec<u64>),
    Primes { bound: u64 },
    PrimeSquares { bound: u64 },
    Scaled { factor: u64, inner: Box<FamilySpec> },
    Predicate { predicate: Predicate, bound: u64 },
}

impl FamilySpec {
    pub fn parse(text: &str) -> Result<Self> {
        let err = |reason: &str| Error::FamilySpec {
            spec: text.to_string(),
            reason: reason.to_string(),
        };
        let text_trim = text.trim();
        let (kind, rest) = text_trim
            .split_once(':')
            .ok_or_else(|| err("expected `<kind>:<args>`"))?;
        let num = |s: &str| -> Result<u64> {
            let cleaned: String = s.trim().chars().filter(|&c| c != '_').collect();
            cleaned
                .parse::<u64>()
                .map_err(|_| err(&format!("`{}` is not a non-negative integer", s.trim())))
        };
        let bound = |s: &str| -> Result<u64> {
            let b = num(s)?;
            if b == 0 {
                return Err(err("truncation bound must be positive"));
            }
            Ok(b)
        };
        match kind.trim() {
            "list" => {
                let values = if rest.trim().is_empty() {
                    Vec::new()
                } else {
                    rest.split(',').map(num).collect::<Result<Vec<_>>>()?
                };
                if values.contains(&0) {
                    return Err(err("moduli must be >= 1"));
                }
                Ok(FamilySpec::List(values))
            }
            "primes" => Ok(FamilySpec::Primes { bound: bound(rest)? }),
            "prime_squares" => Ok(FamilySpec::PrimeSquares { bound: bound(rest)? }),
            "scale" => {
                let (r, inner) = rest
                    .split_once(',')
                    .ok_or_else(|| err("expected `scale:r,<inner spec>`"))?;
                let factor = num(r)?;
                if factor == 0 {
                    return Err(err("scale factor must be positive"));
                }
                Ok(FamilySpec::Scaled {
                    factor,
                    inner: Box::new(FamilySpec::parse(inner)?),
                })
            }
            "predicate" => {
                let (name, m) = rest
                    .rsplit_once(':')
                    .ok_or_else(|| err("expected `predicate:<name>:M`"))?;
                let predicate = Predicate::from_name(name.trim()).ok_or_else(|| {
                    let known: Vec<_> = Predicate::ALL.iter().map(|p| p.name()).collect();
                    err(&format!("unknown predicate `{}` (known: {})", name, known.join(", ")))
                })?;
                Ok(FamilySpec::Predicate {
                    predicate,
                    bound: bound(m)?,
                })
            }
            other => Err(err(&format!("unknown family kind `{other}`"))),
        }
    }

    /// Upper bound on element size, if the family is a truncation.
    pub fn truncation(&self) -> Option<u64> {
        match self {
            FamilySpec::List(_) => None,
            FamilySpec::Primes { bound }
            | FamilySpec::PrimeSquares { bound }
            | FamilySpec::Predicate { bound, .. } => Some(*bound),
            FamilySpec::Scaled { factor, inner } => inner
                .truncation()
                .map(|m| m.saturating_mul(*factor)),
        }
    }

    fn raw_values(&self) -> Vec<u64> {
        match self {
            FamilySpec::List(v) => v.clone(),
            FamilySpec::Primes { bound } => primes::primes_up_to(*bound),
            FamilySpec::PrimeSquares { bound } => primes::primes_up_to(primes::isqrt(*bound))
                .into_iter()
                .map(|p| p * p)
                .collect(),
            FamilySpec::Scaled { factor, inner } => inner
                .raw_values()
                .into_iter()
                .filter_map(|v| v.checked_mul(*factor))
                .collect(),
            FamilySpec::Predicate { predicate, bound } => predicate.expand(*bound),
        }
    }

    /// Expand to a primitive truncation.
    pub fn expand(&self) -> Result<BSet> {
        BSet::primitivize_with(
            &self.raw_values(),
            Provenance {
                source: self.to_string(),
                truncation: self.truncation(),
            },
        )
    }

    /// The same family with its bound raised to at least `m` (so every
    /// member `<= m` is present). Lists are returned unchanged.
    pub fn extended_to(&self, m: u64) -> FamilySpec {
        match self {
            FamilySpec::List(_) => self.clone(),
            FamilySpec::Primes { bound } => FamilySpec::Primes { bound: (*bound).max(m) },
            FamilySpec::PrimeSquares { bound } => FamilySpec::PrimeSquares { bound: (*bound).max(m) },
            FamilySpec::Scaled { factor, inner } => FamilySpec::Scaled {
                factor: *factor,
                inner: Box::new(inner.extended_to(m.div_ceil(*factor))),
            },
            FamilySpec::Predicate { predicate, bound } => FamilySpec::Predicate {
                predicate: *predicate,
                bound: (*bound).max(m),
            },
        }
    }

    /// `B ∩ {1..k}`; fails if `k` exceeds the truncation bound.
    pub fn expand_up_to(&self, k: u64) -> Result<BSet> {
        if let Some(bound) = self.truncation() {
            if k > bound {
                return Err(Error::TruncationExceeded { k, bound });
            }
        }
        Ok(self.expand()?.truncate(k))
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::List(v) => write!(
                f,
                "list:{}",
                v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
            ),
            FamilySpec::Primes { bound } => write!(f, "primes:{bound}"),
            FamilySpec::PrimeSquares { bound } => write!(f, "prime_squares:{bound}"),
            FamilySpec::Scaled { factor, inner } => write!(f, "scale:{factor},{inner}"),
            FamilySpec::Predicate { predicate, bound } => {
                write!(f, "predicate:{}:{bound}", predicate.name())
            }
        }
    }
}

impl std::str::FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilySpec::parse(s)
    }
}

impl TryFrom<String> for FamilySpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        FamilySpec::parse(&s)
    }
}

impl From<FamilySpec> for String {
    fn from(f: FamilySpec) -> String {
        f.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[u64]) -> BSet {
        BSet::primitivize(v).unwrap()
    }

    fn multiple_of_some(b: &[u64], k: u64) -> bool {
        b.iter().any(|&x| k % x == 0)
    }

    #[test]
    fn primitivize_examples() {
        let p = set(&[2, 4, 6, 3]);
        assert_eq!(p.values(), vec![2, 3]);
        for k in 1..=100 {
            assert_eq!(multiple_of_some(&[2, 3], k), multiple_of_some(&[2, 4, 6, 3], k));
        }
        assert_eq!(set(&[5]).values(), vec![5]);
        assert_eq!(set(&[1, 7]).values(), vec![1]);
        assert!(set(&[]).is_empty());
        assert!(BSet::primitivize(&[0, 3]).is_err());
    }

    #[test]
    fn modulus_spectrum() {
        let m = Modulus::new(360).unwrap();
        assert_eq!(m.spectrum().collect::<Vec<_>>(), vec![2, 3, 5]);
        assert_eq!(Modulus::new(1).unwrap().spectrum().count(), 0);
        assert!(Modulus::new(0).is_err());
    }

    #[test]
    fn spectrum_filters() {
        let b = set(&[6, 10, 15]);
        assert_eq!(b.spec_within(3).values(), vec![6]);
        assert_eq!(b.spec_within(5).values(), vec![6, 10, 15]);
        assert!(set(&[4, 9, 25]).spec_within(1).is_empty());

        assert_eq!(b.spec_outside(2).values(), vec![15]);
        assert_eq!(set(&[4, 9, 25]).spec_outside(3).values(), vec![25]);
        assert_eq!(b.spec_outside(0).values(), b.values());
    }

    #[test]
    fn quotient_examples() {
        let b = set(&[6, 10, 15]);
        assert_eq!(b.quotient(2).unwrap().values(), vec![3, 5]);
        assert!(b.quotient(4).unwrap().is_empty());
        assert_eq!(set(&[4, 9, 25]).quotient(1).unwrap().values(), vec![4, 9, 25]);
        assert_eq!(set(&[4, 9]).quotient(4).unwrap().values(), vec![1]);
        assert!(set(&[4, 9]).quotient(4).unwrap().without_one().is_empty());
        assert!(b.quotient(0).is_err());
    }

    #[test]
    fn restrict_and_remove() {
        let b = set(&[6, 10, 15]);
        assert_eq!(b.restrict_spectrum(&[2, 3]).values(), vec![6]);
        assert_eq!(set(&[4, 9, 25]).restrict_spectrum(&[2, 5]).values(), vec![4, 25]);
        assert!(b.restrict_spectrum(&[]).is_empty());
        assert_eq!(set(&[1]).restrict_spectrum(&[]).values(), vec![1]);

        assert_eq!(b.remove_multiples(&[5]).values(), vec![6]);
        assert_eq!(set(&[4, 9, 25]).remove_multiples(&[3]).values(), vec![4, 25]);
        assert_eq!(b.remove_multiples(&[]).values(), b.values());
    }

    #[test]
    fn coprime_subsets() {
        let found = set(&[4, 9, 25]).find_coprime_subset(3).unwrap();
        assert_eq!(found.iter().map(Modulus::value).collect::<Vec<_>>(), vec![4, 9, 25]);
        // brute force over pairs
        let b = [6u64, 10, 15];
        for i in 0..3 {
            for j in i + 1..3 {
                assert!(primes::gcd(b[i], b[j]) > 1);
            }
        }
        assert!(set(&b).find_coprime_subset(2).is_none());
        assert!(set(&[2]).find_coprime_subset(2).is_none());
    }

    #[test]
    fn family_parsing_and_expansion() {
        let f = FamilySpec::parse("prime_squares:100").unwrap();
        assert_eq!(f.expand().unwrap().values(), vec![4, 9, 25, 49]);
        assert_eq!(f.truncation(), Some(100));

        let s = FamilySpec::parse("scale:2,predicate:odd_primes:20").unwrap();
        assert_eq!(s.expand().unwrap().values(), vec![6, 10, 14, 22, 26, 34, 38]);
        assert_eq!(s.truncation(), Some(40));

        let l = FamilySpec::parse("list:6,10,15,30").unwrap();
        assert_eq!(l.expand().unwrap().values(), vec![6, 10, 15]);
        assert_eq!(l.to_string(), "list:6,10,15,30");

        assert_eq!(
            FamilySpec::parse("predicate:semiprimes:30").unwrap().expand().unwrap().values(),
            vec![4, 6, 9, 10, 14, 15, 21, 22, 25, 26]
        );
        assert_eq!(
            FamilySpec::parse("predicate:prime_cubes:1000").unwrap().expand().unwrap().values(),
            vec![8, 27, 125, 343]
        );

        for bad in ["primes", "primes:0", "primes:x", "foo:3", "predicate:nope:10", "scale:0,primes:5", "list:0,2"] {
            assert!(FamilySpec::parse(bad).is_err(), "{bad}");
        }
        assert!(matches!(
            f.expand_up_to(1000),
            Err(Error::TruncationExceeded { k: 1000, bound: 100 })
        ));
        assert_eq!(f.expand_up_to(25).unwrap().values(), vec![4, 9, 25]);
    }

    #[test]
    fn spec_within_stabilizes_with_truncation() {
        let sizes: Vec<usize> = [1_000u64, 10_000, 100_000]
            .iter()
            .map(|&m| FamilySpec::PrimeSquares { bound: m }.expand().unwrap().spec_within(7).len())
            .collect();
        assert_eq!(sizes, vec![4, 4, 4]);
    }

    proptest! {
        #[test]
        fn primitivize_is_idempotent_and_preserves_multiples(
            v in proptest::collection::vec(1u64..200, 0..12)
        ) {
            let p = set(&v);
            prop_assert_eq!(set(&p.values()).values(), p.values());
            let pv = p.values();
            for w in pv.windows(2) {
                prop_assert!(w[0] < w[1]);
            }
            for (i, &a) in pv.iter().enumerate() {
                for &b in &pv[i + 1..] {
                    prop_assert!(b % a != 0);
                }
            }
            for k in 1..=2_000u64 {
                prop_assert_eq!(multiple_of_some(&pv, k), multiple_of_some(&v, k));
            }
        }

        #[test]
        fn quotient_scales_back_into_b(
            v in proptest::collection::vec(2u64..500, 1..10),
            q in 1u64..12,
        ) {
            let b = set(&v);
            let quot = b.quotient(q).unwrap();
            let bv = b.values();
            for x in quot.values() {
                prop_assert!(bv.contains(&(x * q)));
            }
        }

        #[test]
        fn within_and_outside_are_disjoint(
            v in proptest::collection::vec(2u64..500, 0..10),
            n in 0u64..30,
        ) {
            let b = set(&v);
            let w = b.spec_within(n).values();
            let o = b.spec_outside(n).values();
            prop_assert!(w.iter().all(|x| !o.contains(x)));
            let bv = b.values();
            prop_assert!(w.iter().chain(&o).all(|x| bv.contains(x)));
        }

        #[test]
        fn family_display_round_trips(bound in 1u64..10_000, r in 1u64..9) {
            for text in [
                format!("primes:{bound}"),
                format!("scale:{r},prime_squares:{bound}"),
                format!("predicate:primes_3mod4:{bound}"),
            ] {
                let f = FamilySpec::parse(&text).unwrap();
                prop_assert_eq!(f.to_string(), text);
            }
        }
    }
}
