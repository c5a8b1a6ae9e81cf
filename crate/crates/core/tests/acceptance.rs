//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::time::{Duration, Instant};

use bfree::density::{
    coprime_product_check, davenport_erdos_sequence, exact_density_by, log_density_estimate, Limits,
    Method,
};
use bfree::dynamics::{heredity_check, observed_blocks, support_stability, xeta_vs_xphi, Block, DEFAULT_DECAY_FACTOR};
use bfree::primes::{gcd, primes_up_to};
use bfree::taut::{
    behrend_profile, progression_bound_check, pattern_frequency_check, tautness_diagnostic, Classification, TautVerdict,
    Thresholds,
};
use bfree::window::{cylinder_measure, window_measure};
use bfree::{exact_density, sieve_interval, BSet, Error, FamilySpec};
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_b5e7;
const LOG_TARGET: f64 = 0.3921;
const LOG_TOLERANCE: f64 = 0.005;

type Outcome = Result<String, String>;

fn fam(s: &str) -> FamilySpec {
    FamilySpec::parse(s).unwrap()
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Random primitive subset of `{2..60}` with lcm at most `10^6`.
fn random_bset(rng: &mut ChaCha8Rng) -> BSet {
    loop {
        let k = rng.gen_range(1..=8);
        let values: Vec<u64> = (0..k).map(|_| rng.gen_range(2..=60)).collect();
        let b = BSet::primitivize(&values).unwrap();
        if b.lcm_u64().is_some_and(|l| l <= 1_000_000) {
            return b;
        }
    }
}

fn c1_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let lim = Limits::default();
    for case in 0..200 {
        let b = random_bset(&mut rng);
        let ie = exact_density_by(&b, Method::InclusionExclusion, &lim).map_err(|e| e.to_string())?;
        let sv = exact_density_by(&b, Method::PeriodSieve, &lim).map_err(|e| e.to_string())?;
        ensure(ie.value == sv.value, || format!("case {case} {b}: {ie} vs {sv}"))?;
    }
    Ok("200 random sets agree".into())
}

fn c2_davenport_erdos() -> Outcome {
    let lim = Limits::default();
    let seq = davenport_erdos_sequence(&fam("prime_squares:49"), &[4, 9, 25, 49], &lim).map_err(|e| e.to_string())?;
    let expected = [ratio(1, 4), ratio(1, 3), ratio(9, 25), ratio(457, 1225)];
    let got: Vec<String> = seq.iter().map(|d| d.to_string()).collect();
    ensure(seq.iter().map(|d| &d.value).eq(expected.iter()), || format!("sequence {got:?}"))?;
    ensure(seq.windows(2).all(|w| w[0].value <= w[1].value), || "not non-decreasing".into())?;
    let b = fam("prime_squares:10000000").expand().unwrap();
    let est = log_density_estimate(&b, 10_000_000).map_err(|e| e.to_string())?;
    ensure((est.value - LOG_TARGET).abs() <= LOG_TOLERANCE, || {
        format!("log estimate {:.5} not within {LOG_TOLERANCE} of {LOG_TARGET}", est.value)
    })?;
    Ok(format!("sequence {got:?}; log estimate at 1e7 = {:.5}", est.value))
}

fn c3_window_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let lim = Limits::default();
    for case in 0..100 {
        let b = random_bset(&mut rng);
        let w = window_measure(&b, &lim).map_err(|e| e.to_string())?;
        let d = exact_density(&b, &lim).map_err(|e| e.to_string())?;
        ensure(w.value == d.complement().value, || format!("case {case} {b}: window {w}, density {d}"))?;
        let c = cylinder_measure(&b);
        ensure(c.value == BigRational::new(1.into(), b.lcm().into()), || format!("case {case}: cylinder {c}"))?;
    }
    Ok("100 random sets".into())
}

fn c4_coprime_multiplicativity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let lim = Limits::default();
    let small_primes = primes_up_to(30);
    for case in 0..100 {
        let mut ps = small_primes.clone();
        ps.shuffle(&mut rng);
        let split = rng.gen_range(1..ps.len());
        let (left, right) = ps.split_at(split);
        let draw = |rng: &mut ChaCha8Rng, pool: &[u64]| -> BSet {
            let k = rng.gen_range(1..=4);
            let values: Vec<u64> = (0..k)
                .map(|_| {
                    let mut v = 1;
                    for _ in 0..rng.gen_range(1..=2) {
                        v *= pool[rng.gen_range(0..pool.len())];
                    }
                    v
                })
                .collect();
            BSet::primitivize(&values).unwrap()
        };
        let a = draw(&mut rng, left);
        let c = draw(&mut rng, right);
        let t = coprime_product_check(&a, &c, &lim).map_err(|e| e.to_string())?;
        ensure(t.is_multiplicative(), || format!("case {case} A={a} C={c}: {} != {} * {}", t.intersection, t.a, t.c))?;
    }
    let bad = coprime_product_check(
        &BSet::primitivize(&[6]).unwrap(),
        &BSet::primitivize(&[10]).unwrap(),
        &lim,
    );
    ensure(matches!(bad, Err(Error::NotCoprime { .. })), || "non-coprime pair accepted".into())?;
    Ok("100 coprime pairs multiply; {6} x {10} rejected".into())
}

fn c5_dichotomy() -> Outcome {
    let t = Thresholds::default();
    let primes = behrend_profile(&fam("primes:1000000"), &[2, 5, 10, 20], 1_000_000, &t).map_err(|e| e.to_string())?;
    let pv: Vec<f64> = primes.estimates.iter().map(|e| e.value).collect();
    ensure(primes.classification == Classification::BehrendLike, || format!("primes {:?}", primes.classification))?;
    ensure(pv.iter().all(|&v| v > 0.99), || format!("primes estimates {pv:?}"))?;
    let sq = behrend_profile(&fam("prime_squares:1000000"), &[2, 3, 5, 10], 1_000_000, &t).map_err(|e| e.to_string())?;
    let sv: Vec<f64> = sq.estimates.iter().map(|e| e.value).collect();
    ensure(sq.classification == Classification::Vanishing, || format!("prime squares {:?}", sq.classification))?;
    ensure(sv[3] <= 0.04, || format!("prime squares N=10 estimate {}", sv[3]))?;
    Ok(format!("primes min {:.5}; prime squares at N=10 {:.5}", pv.iter().cloned().fold(1.0, f64::min), sv[3]))
}

fn c6_tautness() -> Outcome {
    let t = Thresholds::default();
    let sq = tautness_diagnostic(&fam("prime_squares:1000000"), &[1, 2, 3, 4], &[2, 5, 10], 1_000_000, &t)
        .map_err(|e| e.to_string())?;
    ensure(sq.verdict == TautVerdict::TautConsistent, || format!("prime squares {}", sq.verdict.name()))?;
    let scaled = tautness_diagnostic(
        &fam("scale:2,predicate:odd_primes:1000000"),
        &[1, 2],
        &[2, 5, 10, 20],
        1_000_000,
        &t,
    )
    .map_err(|e| e.to_string())?;
    ensure(scaled.verdict == TautVerdict::NonTautWitness { q: 2 }, || format!("scaled primes {}", scaled.verdict.name()))?;
    Ok("prime squares taut-consistent; {2p} non-taut witness q=2".into())
}

fn c7_progression_bound() -> Outcome {
    let lim = Limits::default();
    let c = BSet::primitivize(&[5, 9, 25]).unwrap();
    let r = progression_bound_check(&c, 2, 1, 2, &[5], &lim).map_err(|e| e.to_string())?;
    ensure(r.lhs.value == ratio(7, 30) && r.rhs == ratio(7, 30), || format!("lhs {} rhs {}", r.lhs, r.rhs))?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let mut checked = 0;
    while checked < 200 {
        let k = rng.gen_range(0..=4);
        let values: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=50)).collect();
        let c = BSet::primitivize(&values).unwrap();
        if !c.lcm_u64().is_some_and(|l| l <= 1_000_000) {
            continue;
        }
        let beta = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=3);
        let r = rng.gen_range(0..beta as i64);
        let p: Vec<u64> = [5u64, 7, 11, 13]
            .into_iter()
            .filter(|&q| rng.gen_bool(0.5) && q > n && gcd(q, beta) == 1)
            .collect();
        let rep = progression_bound_check(&c, beta, r, n, &p, &lim).map_err(|e| e.to_string())?;
        ensure(rep.holds, || format!("C={c} beta={beta} r={r} n={n} P={p:?}: {} < {}", rep.lhs, rep.rhs))?;
        checked += 1;
    }
    Ok("worked instance 7/30 = 7/30; 200 random instances hold".into())
}

fn c8_support() -> Outcome {
    let b = fam("prime_squares:8000000").expand().unwrap();
    let mut freqs = Vec::new();
    for j in 0..=3 {
        let w = 1_000_000u64 << j;
        let rep = pattern_frequency_check(&b, 47, 3, 1, w).map_err(|e| e.to_string())?;
        ensure(rep.witness_lcm == Some(4900), || format!("witness lcm {:?}", rep.witness_lcm))?;
        ensure(rep.frequency >= 1.0 / 4900.0, || format!("window {w}: frequency {}", rep.frequency))?;
        freqs.push(rep.frequency);
    }
    let b = fam("prime_squares:10000000").expand().unwrap();
    for n in 1..=4 {
        let rep = support_stability(&b, n, &[100_000, 1_000_000, 10_000_000], DEFAULT_DECAY_FACTOR)
            .map_err(|e| e.to_string())?;
        ensure(rep.flagged.is_empty(), || {
            format!("n={n}: flagged {:?}", rep.flagged.iter().map(Block::to_string).collect::<Vec<_>>())
        })?;
    }
    Ok(format!("r=47 frequencies {freqs:.6?} >= {:.6}; no flagged blocks n<=4", 1.0 / 4900.0))
}

fn c9_heredity() -> Outcome {
    let b = fam("prime_squares:10000000").expand().unwrap();
    let eta = sieve_interval(&b, 1, 10_000_000);
    for n in 1..=8 {
        let blocks = observed_blocks(&eta, n).map_err(|e| e.to_string())?;
        let v = heredity_check(&blocks).map_err(|e| e.to_string())?;
        ensure(v.is_empty(), || format!("n={n}: {} violations, first missing {}", v.len(), v[0].missing))?;
    }
    let two = BSet::primitivize(&[2]).unwrap();
    let blocks = observed_blocks(&sieve_interval(&two, 1, 1_000), 2).unwrap();
    let v = heredity_check(&blocks).unwrap();
    ensure(
        v.len() == 1 && v[0].missing.to_string() == "00" && v[0].witness.to_string() == "01",
        || format!("control violations {v:?}"),
    )?;
    Ok("squarefree blocks n<=8 hereditary; B={2} misses 00 below 01".into())
}

fn c10_containment() -> Outcome {
    let family = fam("prime_squares:1000000");
    let mut gaps = Vec::new();
    for k in [25, 49] {
        let r = xeta_vs_xphi(&family, k, 4, 1, 1_000_000, Limits::default().enumeration_budget)
            .map_err(|e| e.to_string())?;
        ensure(r.phi_exhaustive, || format!("K={k}: phi blocks not exhaustive"))?;
        ensure(r.contained, || format!("K={k}: blocks outside phi {:?}", r.outside))?;
        gaps.push(r.gap);
    }
    ensure(gaps[1] <= gaps[0], || format!("gap increased {gaps:?}"))?;
    Ok(format!("contained at K=25,49; gaps {gaps:?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("exact-density oracle equivalence", c1_oracle_equivalence, 60),
        ("Davenport-Erdős sequence and log estimate", c2_davenport_erdos, 120),
        ("window identity", c3_window_identity, 60),
        ("coprime multiplicativity", c4_coprime_multiplicativity, 60),
        ("dichotomy profiles", c5_dichotomy, 180),
        ("tautness criterion", c6_tautness, 180),
        ("progression density bound", c7_progression_bound, 60),
        ("support reflection", c8_support, 180),
        ("heredity reflection", c9_heredity, 120),
        ("eta/phi containment", c10_containment, 120),
    ];
    let mut failures = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(*limit) => {
                Err(format!("{detail}; took {elapsed:.1?}, limit {limit}s"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
