//! Command-line front end: argument model, dispatch and report rendering.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::density::{
    davenport_erdos_sequence, density_bounds, exact_density, light_tails_profile, log_density_estimate,
    natural_density_bounds, DensityBounds, DensityEstimate, ExactDensity, Limits, NaturalBounds,
    TailEstimate,
};
use crate::dynamics::{
    block_frequencies, heredity_check, observed_blocks, support_stability, xeta_vs_xphi, BlockStats,
    HeredityViolation, SupportReport, XPhiReport, DEFAULT_DECAY_FACTOR,
};
use crate::error::{Error, ErrorKind, Result};
use crate::sets::{BSet, FamilySpec};
use crate::sieve::sieve_interval;
use crate::taut::{
    behrend_profile, progression_bound_check, prime_exhaust, pattern_frequency_check, tautness_diagnostic,
    PatternFrequencyReport, DichotomyProfile, ProgressionBoundReport, PrimeExhaustReport, TautReport, Thresholds,
};
use crate::window::{coding_word, cylinder_measure, window_report, WindowReport};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "bfree",
    version,
    about = "Sets of multiples and B-free subshifts: exact densities, tautness and block statistics"
)]
pub struct Cli {
    /// Output format [default: text on a terminal, json otherwise]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads [default: available cores]
    #[arg(long, global = true, env = "BFREE_THREADS")]
    pub threads: Option<usize>,

    /// Largest period counted directly
    #[arg(long, global = true, default_value_t = Limits::default().lcm_cap)]
    pub lcm_cap: u64,

    /// Largest number of inclusion-exclusion subsets
    #[arg(long, global = true, default_value_t = Limits::default().subset_budget)]
    pub subset_budget: u64,

    /// Periods up to this size are sieved
    #[arg(long, global = true, default_value_t = Limits::default().sieve_cap)]
    pub sieve_cap: u64,

    /// Budget for residue and block enumeration (L * n)
    #[arg(long, global = true, default_value_t = Limits::default().enumeration_budget)]
    pub enumeration_budget: u64,

    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    /// Resolve defaults into a self-contained config.
    pub fn into_config(self, stdout_is_terminal: bool) -> RunConfig {
        let format = self.format.unwrap_or(if stdout_is_terminal && self.output.is_none() {
            Format::Text
        } else {
            Format::Json
        });
        RunConfig {
            command: self.command,
            format,
            output: self.output,
            threads: self.threads,
            limits: Limits {
                lcm_cap: self.lcm_cap,
                subset_budget: self.subset_budget,
                sieve_cap: self.sieve_cap,
                enumeration_budget: self.enumeration_budget,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Args, Serialize, Deserialize)]
pub struct ThresholdArgs {
    /// Behrend-like if every estimate exceeds this
    #[arg(long, default_value_t = 0.9)]
    pub behrend_above: f64,
    /// Vanishing needs the last estimate below this
    #[arg(long, default_value_t = 0.1)]
    pub vanishing_below: f64,
    /// Vanishing needs first >= this * last
    #[arg(long, default_value_t = 2.0)]
    pub min_decrease: f64,
}

impl From<ThresholdArgs> for Thresholds {
    fn from(t: ThresholdArgs) -> Self {
        Thresholds {
            behrend_above: t.behrend_above,
            vanishing_below: t.vanishing_below,
            min_decrease: t.min_decrease,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Exact density of M_B, or window estimates with --n
    Density {
        #[arg(long)]
        bset: FamilySpec,
        /// Exact rational density over the lcm period
        #[arg(long)]
        #[serde(default)]
        exact: bool,
        /// Window for natural and logarithmic estimates
        #[arg(long)]
        n: Option<u64>,
        /// Also report certified bounds with this lcm cap
        #[arg(long)]
        bounds_cap: Option<u64>,
    },
    /// Exact densities of B ∩ [1, K] for each K
    DeSequence {
        #[arg(long)]
        bset: FamilySpec,
        #[arg(long = "Ks", visible_alias = "ks", value_delimiter = ',', required = true)]
        ks: Vec<u64>,
    },
    /// Upper-density proxies of the tails {b > K}
    LightTails {
        #[arg(long)]
        bset: FamilySpec,
        #[arg(long = "Ks", visible_alias = "ks", value_delimiter = ',', required = true)]
        ks: Vec<u64>,
        #[arg(long)]
        n: u64,
    },
    /// Density profile of the moduli with no prime factor <= N
    Behrend {
        #[arg(long)]
        bset: FamilySpec,
        #[arg(long = "Ns", visible_alias = "ns", value_delimiter = ',', required = true)]
        ns: Vec<u64>,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Behrend profiles of B/q for each q
    Taut {
        #[arg(long)]
        bset: FamilySpec,
        #[arg(long, value_delimiter = ',', required = true)]
        qs: Vec<u64>,
        #[arg(long = "Ns", visible_alias = "ns", value_delimiter = ',', required = true)]
        ns: Vec<u64>,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Search primes P avoiding A with a residual density below epsilon
    PrimeExhaust {
        #[arg(long)]
        bset: FamilySpec,
        /// Primes to keep (comma separated, may be empty)
        #[arg(long = "A", visible_alias = "a", value_delimiter = ',')]
        a: Vec<u64>,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        /// Largest N searched
        #[arg(long, default_value_t = 10_000)]
        max_n: u64,
    },
    /// Window measure on the finite quotient Z/lcm(B)
    Window {
        #[arg(long)]
        bset: FamilySpec,
        /// Residue for a coding word
        #[arg(long)]
        h: Option<u64>,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        start: i64,
        #[arg(long, default_value_t = 64)]
        len: u64,
    },
    /// Block frequencies of η on [start, start + len)
    Blocks {
        #[arg(long)]
        bset: FamilySpec,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        start: i64,
        #[arg(long)]
        len: u64,
    },
    /// Downward closure of the observed blocks
    Heredity {
        #[arg(long)]
        bset: FamilySpec,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        start: i64,
        #[arg(long)]
        len: u64,
    },
    /// Block frequencies across nested windows [1, W]
    Support {
        #[arg(long)]
        bset: FamilySpec,
        #[arg(long)]
        n: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        windows: Vec<u64>,
        #[arg(long, default_value_t = DEFAULT_DECAY_FACTOR)]
        decay: f64,
    },
    /// Exact progression densities for C and C without multiples of P
    #[command(visible_alias = "lemma520")]
    #[serde(alias = "lemma520")]
    ProgressionBound {
        #[arg(long = "C", visible_alias = "c", value_delimiter = ',', required = true)]
        c: Vec<u64>,
        #[arg(long)]
        beta: u64,
        #[arg(long, allow_negative_numbers = true)]
        r: i64,
        #[arg(long)]
        n: u64,
        #[arg(long = "P", visible_alias = "p", value_delimiter = ',')]
        p: Vec<u64>,
    },
    /// Frequency of the pattern of η at r+1..r+n
    #[command(visible_alias = "as511")]
    #[serde(alias = "as511")]
    PatternFrequency {
        #[arg(long)]
        bset: FamilySpec,
        #[arg(long, allow_negative_numbers = true)]
        r: i64,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        start: i64,
        #[arg(long)]
        len: u64,
    },
    /// Observed η-blocks of B ∩ [1, K] against its coded blocks
    Xphi {
        #[arg(long)]
        bset: FamilySpec,
        #[arg(long = "K", visible_alias = "k")]
        k: u64,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        start: i64,
        #[arg(long)]
        len: u64,
    },
}

/// Everything a run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub format: Format,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub limits: Limits,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub family: String,
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactDensity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<DensityBounds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub natural: Option<NaturalBounds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub logarithmic: Option<DensityEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceEntry {
    #[serde(rename = "K")]
    pub k: u64,
    pub density: ExactDensity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeSequenceReport {
    pub family: String,
    pub sequence: Vec<SequenceEntry>,
    pub non_decreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LightTailsReport {
    pub family: String,
    pub window: u64,
    pub tails: Vec<TailEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowCmdReport {
    #[serde(flatten)]
    pub window: WindowReport,
    pub cylinder_measure: ExactDensity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coding_word: Option<CodingWord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodingWord {
    pub h: u64,
    pub start: i64,
    pub word: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlocksReport {
    pub family: String,
    pub n: u32,
    pub window_start: i64,
    pub window_length: u64,
    pub blocks: Vec<BlockStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeredityReport {
    pub family: String,
    pub n: u32,
    pub window_start: i64,
    pub window_length: u64,
    pub observed: usize,
    pub violations: Vec<HeredityViolation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Report {
    Density(DensityReport),
    DeSequence(DeSequenceReport),
    LightTails(LightTailsReport),
    Behrend(DichotomyProfile),
    Taut(TautReport),
    PrimeExhaust(PrimeExhaustReport),
    Window(WindowCmdReport),
    Blocks(BlocksReport),
    Heredity(HeredityReport),
    Support(SupportReport),
    ProgressionBound(ProgressionBoundReport),
    PatternFrequency(PatternFrequencyReport),
    XPhi(XPhiReport),
}

/// Members up to `m` regardless of the textual bound.
fn window_family(spec: &FamilySpec, m: u64) -> Result<BSet> {
    spec.extended_to(m).expand()
}

fn window_end(start: i64, len: u64) -> u64 {
    (start.max(0) as u64).saturating_add(len)
}

pub fn run(config: &RunConfig) -> Result<Report> {
    let limits = &config.limits;
    Ok(match &config.command {
        Command::Density { bset, exact, n, bounds_cap } => {
            let literal = bset.expand()?;
            let estimate_family = n.map(|n| window_family(bset, n)).transpose()?;
            let exact_value = if *exact || n.is_none() {
                Some(exact_density(&literal, limits)?)
            } else {
                None
            };
            let (natural, logarithmic) = match (n, &estimate_family) {
                (Some(n), Some(b)) => (Some(natural_density_bounds(b, *n)?), Some(log_density_estimate(b, *n)?)),
                _ => (None, None),
            };
            DensityReport {
                family: bset.to_string(),
                size: literal.len(),
                period: exact_value.as_ref().map(|d| d.period.to_string()),
                exact: exact_value,
                bounds: bounds_cap.map(|cap| density_bounds(&literal, cap, limits)).transpose()?,
                natural,
                logarithmic,
            }
            .into_report()
        }
        Command::DeSequence { bset, ks } => {
            let values = davenport_erdos_sequence(bset, ks, limits)?;
            let non_decreasing = values.windows(2).all(|w| w[0].value <= w[1].value);
            Report::DeSequence(DeSequenceReport {
                family: bset.to_string(),
                sequence: ks
                    .iter()
                    .zip(values)
                    .map(|(&k, density)| SequenceEntry { k, density })
                    .collect(),
                non_decreasing,
            })
        }
        Command::LightTails { bset, ks, n } => {
            let b = window_family(bset, *n)?;
            Report::LightTails(LightTailsReport {
                family: bset.to_string(),
                window: *n,
                tails: light_tails_profile(&b, ks, *n)?,
            })
        }
        Command::Behrend { bset, ns, n, thresholds } => {
            Report::Behrend(behrend_profile(bset, ns, *n, &(*thresholds).into())?)
        }
        Command::Taut { bset, qs, ns, n, thresholds } => {
            Report::Taut(tautness_diagnostic(bset, qs, ns, *n, &(*thresholds).into())?)
        }
        Command::PrimeExhaust { bset, a, epsilon, n, max_n } => {
            Report::PrimeExhaust(prime_exhaust(bset, a, *epsilon, *n, *max_n)?)
        }
        Command::Window { bset, h, start, len } => {
            let b = bset.expand()?;
            let coding = h
                .map(|h| {
                    coding_word(&b, h, *start, *len).map(|w| CodingWord {
                        h,
                        start: *start,
                        word: w.to_bitstring(),
                    })
                })
                .transpose()?;
            Report::Window(WindowCmdReport {
                window: window_report(&b, limits)?,
                cylinder_measure: cylinder_measure(&b),
                coding_word: coding,
            })
        }
        Command::Blocks { bset, n, start, len } => {
            let b = window_family(bset, window_end(*start, *len))?;
            let seg = sieve_interval(&b, *start, *len);
            Report::Blocks(BlocksReport {
                family: bset.to_string(),
                n: *n,
                window_start: *start,
                window_length: *len,
                blocks: block_frequencies(&seg, *n)?,
            })
        }
        Command::Heredity { bset, n, start, len } => {
            let b = window_family(bset, window_end(*start, *len))?;
            let observed = observed_blocks(&sieve_interval(&b, *start, *len), *n)?;
            Report::Heredity(HeredityReport {
                family: bset.to_string(),
                n: *n,
                window_start: *start,
                window_length: *len,
                observed: observed.len(),
                violations: heredity_check(&observed)?,
            })
        }
        Command::Support { bset, n, windows, decay } => {
            let top = windows.iter().copied().max().unwrap_or(1);
            let b = window_family(bset, top)?;
            Report::Support(support_stability(&b, *n, windows, *decay)?)
        }
        Command::ProgressionBound { c, beta, r, n, p } => {
            let c = BSet::primitivize(c)?;
            Report::ProgressionBound(progression_bound_check(&c, *beta, *r, *n, p, limits)?)
        }
        Command::PatternFrequency { bset, r, n, start, len } => {
            let reach = window_end(*start, *len).max(r.unsigned_abs()) + *n as u64;
            let b = window_family(bset, reach)?;
            let mut rep = pattern_frequency_check(&b, *r, *n, *start, *len)?;
            rep.family = bset.to_string();
            Report::PatternFrequency(rep)
        }
        Command::Xphi { bset, k, n, start, len } => {
            Report::XPhi(xeta_vs_xphi(bset, *k, *n, *start, *len, limits.enumeration_budget)?)
        }
    })
}

impl DensityReport {
    fn into_report(self) -> Report {
        Report::Density(self)
    }
}

/// `{"config": ..., "report": ...}`, pretty-printed.
pub fn render_json(config: &RunConfig, report: &Report) -> Result<String> {
    let doc = serde_json::json!({ "config": config, "report": report });
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn render_csv(report: &Report) -> Result<String> {
    Ok(match report {
        Report::Blocks(r) => csv(
            &["block", "count", "window_length", "frequency"],
            r.blocks.iter().map(|s| {
                vec![
                    s.block.to_string(),
                    s.count.to_string(),
                    s.window_length.to_string(),
                    format!("{}/{}", s.frequency.numer(), s.frequency.denom()),
                ]
            }),
        ),
        Report::DeSequence(r) => csv(
            &["K", "density", "value"],
            r.sequence
                .iter()
                .map(|e| vec![e.k.to_string(), e.density.to_string(), e.density.to_f64().to_string()]),
        ),
        Report::LightTails(r) => csv(
            &["K", "tail_size", "estimate"],
            r.tails
                .iter()
                .map(|t| vec![t.k.to_string(), t.tail_size.to_string(), t.estimate.value.to_string()]),
        ),
        Report::Behrend(p) => csv(&["N", "size", "estimate"], profile_rows(p, None)),
        Report::Taut(t) => csv(
            &["q", "N", "size", "estimate"],
            t.profiles.iter().flat_map(|qp| profile_rows(&qp.profile, Some(qp.q))),
        ),
        Report::Support(s) => csv(
            &["block", "window_length", "count", "frequency", "flagged"],
            s.rows.iter().flat_map(|row| {
                s.windows.iter().enumerate().map(move |(j, w)| {
                    vec![
                        row.block.to_string(),
                        w.to_string(),
                        row.counts[j].to_string(),
                        row.frequencies[j].to_string(),
                        row.flagged.to_string(),
                    ]
                })
            }),
        ),
        Report::Heredity(h) => csv(
            &["missing", "witness"],
            h.violations
                .iter()
                .map(|v| vec![v.missing.to_string(), v.witness.to_string()]),
        ),
        other => {
            let value = serde_json::to_value(other).map_err(|e| Error::Parse(e.to_string()))?;
            let Value::Object(map) = value else {
                return Err(Error::precondition("report is not a record"));
            };
            csv(
                &["field", "value"],
                map.iter().map(|(k, v)| vec![k.clone(), scalar_text(v)]),
            )
        }
    })
}

fn profile_rows(p: &DichotomyProfile, q: Option<u64>) -> Vec<Vec<String>> {
    p.ns.iter()
        .zip(&p.sizes)
        .zip(&p.estimates)
        .map(|((n, size), e)| {
            let mut row: Vec<String> = q.iter().map(u64::to_string).collect();
            row.extend([n.to_string(), size.to_string(), e.value.to_string()]);
            row
        })
        .collect()
}

pub fn render_text(report: &Report) -> String {
    let mut s = String::new();
    let w = &mut s;
    match report {
        Report::Density(r) => {
            let _ = writeln!(w, "family {} ({} moduli)", r.family, r.size);
            if let Some(d) = &r.exact {
                let _ = writeln!(w, "exact density {d} ≈ {:.6} (period {})", d.to_f64(), d.period);
            }
            if let Some(b) = &r.bounds {
                let _ = writeln!(
                    w,
                    "bounds [{}, {}] (cap {}, {} pruned subtrees)",
                    crate::density::ratio_string(&b.lower),
                    crate::density::ratio_string(&b.upper),
                    b.cap,
                    b.pruned_subtrees
                );
            }
            if let Some(nb) = &r.natural {
                let _ = writeln!(
                    w,
                    "natural at n={}: lower {:.6} upper {:.6} last {:.6}",
                    nb.last.n, nb.lower.value, nb.upper.value, nb.last.value
                );
            }
            if let Some(l) = &r.logarithmic {
                let _ = writeln!(w, "logarithmic at n={}: {:.6}", l.n, l.value);
            }
        }
        Report::DeSequence(r) => {
            let _ = writeln!(w, "family {}", r.family);
            for e in &r.sequence {
                let _ = writeln!(w, "K={:<10} {} ≈ {:.6}", e.k, e.density, e.density.to_f64());
            }
            let _ = writeln!(w, "non-decreasing: {}", r.non_decreasing);
        }
        Report::LightTails(r) => {
            let _ = writeln!(w, "family {} at n={}", r.family, r.window);
            for t in &r.tails {
                let _ = writeln!(w, "K={:<10} tail {:<8} upper {:.6}", t.k, t.tail_size, t.estimate.value);
            }
        }
        Report::Behrend(p) => profile_text(w, p),
        Report::Taut(t) => {
            for qp in &t.profiles {
                let _ = writeln!(w, "q={}", qp.q);
                profile_text(w, &qp.profile);
            }
            let _ = writeln!(w, "verdict: {}", t.verdict.name());
        }
        Report::PrimeExhaust(r) => {
            let _ = writeln!(w, "family {} A={:?} epsilon={}", r.family, r.a, r.epsilon);
            let _ = writeln!(w, "L={} |Q0|={} threshold={:.6}", r.l, r.q0.len(), r.threshold);
            let _ = writeln!(w, "N={} max quotient estimate {:.6}", r.n_found, r.max_quotient_estimate);
            let _ = writeln!(w, "P has {} primes; verified residual {:.6}", r.p.len(), r.verified.value);
        }
        Report::Window(r) => {
            let _ = writeln!(w, "moduli {:?} lcm {}", r.window.moduli, r.window.lcm);
            let _ = writeln!(
                w,
                "window {} residues, measure {} (1 - density = {}, consistent: {})",
                r.window.window_count, r.window.window_measure, r.window.density_check, r.window.consistent
            );
            let _ = writeln!(w, "cylinder measure {}", r.cylinder_measure);
            if let Some(c) = &r.coding_word {
                let _ = writeln!(w, "phi({}) from {}: {}", c.h, c.start, c.word);
            }
        }
        Report::Blocks(r) => {
            let _ = writeln!(w, "family {} n={} on [{}, +{})", r.family, r.n, r.window_start, r.window_length);
            for b in &r.blocks {
                let _ = writeln!(w, "{}  {:>12}  {:.6}", b.block, b.count, b.frequency_f64());
            }
        }
        Report::Heredity(r) => {
            let _ = writeln!(w, "{} blocks of length {} observed", r.observed, r.n);
            if r.violations.is_empty() {
                let _ = writeln!(w, "hereditary: no violations");
            }
            for v in &r.violations {
                let _ = writeln!(w, "missing {} below {}", v.missing, v.witness);
            }
        }
        Report::Support(r) => {
            let _ = writeln!(w, "n={} windows {:?} decay {}", r.n, r.windows, r.decay_factor);
            for row in &r.rows {
                let freqs: Vec<String> = row.frequencies.iter().map(|f| format!("{f:.6}")).collect();
                let mark = if row.flagged { "  FLAGGED" } else { "" };
                let _ = writeln!(w, "{}  {}{}", row.block, freqs.join(" "), mark);
            }
            let _ = writeln!(w, "{} flagged", r.flagged.len());
        }
        Report::ProgressionBound(r) => {
            let _ = writeln!(w, "C={:?} beta={} r={} n={} P={:?}", r.c, r.beta, r.r, r.n, r.p);
            let _ = writeln!(
                w,
                "lhs {}  rhs {} = {} * {}  holds: {}",
                r.lhs,
                crate::density::ratio_string(&r.rhs),
                crate::density::ratio_string(&r.factor),
                r.reduced,
                r.holds
            );
        }
        Report::PatternFrequency(r) => {
            let _ = writeln!(w, "family {} r={} pattern {} I={:?}", r.family, r.r, r.pattern, r.i_set);
            let _ = writeln!(
                w,
                "count {} over {} → frequency {:.8}",
                r.count, r.window_length, r.frequency
            );
            if let Some(l) = r.witness_lcm {
                let _ = writeln!(w, "witness lcm {l}");
            }
            if let Some(b) = r.lower_bound {
                let _ = writeln!(w, "lower bound {b:.8}");
            }
        }
        Report::XPhi(r) => {
            let _ = writeln!(w, "family {} K={} moduli {:?} n={}", r.family, r.k, r.moduli, r.n);
            let _ = writeln!(
                w,
                "eta blocks {}  phi blocks {} (exhaustive: {})  contained: {}  gap {}",
                r.eta_blocks, r.phi_blocks, r.phi_exhaustive, r.contained, r.gap
            );
        }
    }
    s
}

fn profile_text(w: &mut String, p: &DichotomyProfile) {
    let _ = writeln!(w, "family {} at n={}", p.family, p.window);
    for ((n, size), e) in p.ns.iter().zip(&p.sizes).zip(&p.estimates) {
        let _ = writeln!(w, "N={:<8} size {:<8} estimate {:.6}", n, size, e.value);
    }
    let _ = writeln!(w, "classification: {}", p.classification.name());
}

pub fn render(config: &RunConfig, report: &Report) -> Result<String> {
    match config.format {
        Format::Json => render_json(config, report),
        Format::Csv => render_csv(report),
        Format::Text => Ok(render_text(report)),
    }
}

/// Run and write the report; returns the rendered text.
pub fn execute(config: &RunConfig) -> Result<String> {
    let report = run(config)?;
    let text = render(config, &report)?;
    match &config.output {
        Some(path) => std::fs::write(path, &text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(text)
}

/// Parse a JSON `RunConfig`, run it and return the JSON report. The
/// config's format and output path are ignored.
pub fn run_json(config_json: &str) -> Result<String> {
    let config: RunConfig =
        serde_json::from_str(config_json).map_err(|e| Error::Parse(format!("run config: {e}")))?;
    let report = run(&config)?;
    render_json(&config, &report)
}

pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Parse => 2,
        ErrorKind::Budget => 3,
        ErrorKind::Precondition => 4,
        ErrorKind::Io => 1,
    }
}

/// Machine-readable error object.
pub fn error_json(code: &str, message: &str, exit: i32) -> String {
    serde_json::json!({ "error": { "code": code, "message": message, "exit_code": exit } }).to_string()
}
