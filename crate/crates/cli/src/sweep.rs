//! Sweep configuration and the deterministic parallel runner.
//!
//! A sweep executes one module's invariant suite over configured ranges and
//! emits a report whose bytes depend only on the config and seed: cases get
//! independent RNG streams derived from (seed, modulus), run under rayon in
//! any order, and are sorted lexicographically by inputs before assembly.
//! Wall-clock time is printed to stderr by the caller, never into the report.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use klooster::bessel::{bessel_j, jnu_at_nu_bracket};
use klooster::kloosterman::{certify_lower_bound, eval_bruteforce, eval_multiplicative, Verdict};
use klooster::petersson::{find_admissible, thresholds, verify, Mode, TraceInstance, VerifyVerdict};

use crate::report::{Record, Value};

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: i64,
    pub stop: i64,
    #[serde(default = "default_step")]
    pub step: i64,
}

fn default_step() -> i64 {
    1
}

impl Range {
    /// Inclusive values start, start+step, ... ≤ stop. Empty when start > stop.
    fn values(&self) -> Vec<i64> {
        let mut out = Vec::new();
        if self.step <= 0 {
            return out;
        }
        let mut v = self.start;
        while v <= self.stop {
            out.push(v);
            v += self.step;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed |brute − multiplicative| disagreement.
    pub eval: f64,
    /// Slack in certificate and Petersson margin checks.
    pub certificate: f64,
    /// Slack added to Bessel bracket membership (beyond the eval's own error).
    pub bracket: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eval: 1e-6,
            certificate: 1e-6,
            bracket: 0.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub target: String,
    pub ranges: BTreeMap<String, Range>,
    pub samples_per_modulus: u64,
    pub seed: i64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

fn default_parallelism() -> usize {
    1
}

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading sweep config {}", path.display()))?;
        let config: SweepConfig = toml::from_str(&text)
            .with_context(|| format!("parsing sweep config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        let required: &[&str] = match self.target.as_str() {
            "kloosterman" => &["c"],
            "bessel" => &["k"],
            "petersson" => &["level", "k"],
            other => bail!("unknown sweep target {other:?} (expected kloosterman, bessel, or petersson)"),
        };
        for key in required {
            if !self.ranges.contains_key(*key) {
                bail!("target {} requires a [ranges.{key}] table", self.target);
            }
        }
        for key in self.ranges.keys() {
            if !required.contains(&key.as_str()) {
                bail!("range {key:?} is not used by target {}", self.target);
            }
        }
        for (key, r) in &self.ranges {
            if r.step <= 0 {
                bail!("range {key:?} has non-positive step {}", r.step);
            }
            if r.start < 0 {
                bail!("range {key:?} has negative start {}", r.start);
            }
        }
        if self.samples_per_modulus == 0 {
            bail!("samples_per_modulus must be positive");
        }
        if self.parallelism == 0 {
            bail!("parallelism must be positive");
        }
        Ok(())
    }

    fn echo(&self) -> Record {
        let mut ranges = Record::new();
        for (key, r) in &self.ranges {
            let mut rr = Record::new();
            rr.push("start", Value::I(r.start));
            rr.push("stop", Value::I(r.stop));
            rr.push("step", Value::I(r.step));
            ranges.push(key, Value::Object(rr));
        }
        let mut tol = Record::new();
        tol.push("eval", Value::F(self.tolerances.eval));
        tol.push("certificate", Value::F(self.tolerances.certificate));
        tol.push("bracket", Value::F(self.tolerances.bracket));
        let mut rec = Record::new();
        rec.push("target", Value::S(self.target.clone()));
        rec.push("ranges", Value::Object(ranges));
        rec.push("samples_per_modulus", Value::U(self.samples_per_modulus));
        rec.push("seed", Value::I(self.seed));
        rec.push("tolerances", Value::Object(tol));
        rec.push("parallelism", Value::U(self.parallelism as u64));
        rec
    }
}

/// SplitMix64-style finalizer; decorrelates the per-case streams drawn from
/// one 64-bit seed.
fn mix(seed: u64, tag: u64) -> u64 {
    let mut z = seed.wrapping_add(tag.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

struct Case {
    key: (u64, u64, i64, i64),
    record: Record,
    violation: f64,
    tightness: Option<f64>,
    tag: &'static str,
}

pub struct SweepOutcome {
    pub report: Record,
    pub cases: Vec<Record>,
    pub exit_code: i32,
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(effective_parallelism(config.parallelism))
        .build()
        .context("building sweep thread pool")?;

    let mut cases = pool.install(|| match config.target.as_str() {
        "kloosterman" => kloosterman_cases(config),
        "bessel" => bessel_cases(config),
        "petersson" => petersson_cases(config),
        _ => unreachable!("validated target"),
    })?;
    cases.sort_by(|x, y| x.key.cmp(&y.key));

    let violations = cases.iter().filter(|c| c.violation > 0.0).count() as u64;
    let max_violation = cases.iter().fold(0.0_f64, |m, c| m.max(c.violation));
    let min_tightness = cases
        .iter()
        .filter_map(|c| c.tightness)
        .fold(f64::INFINITY, f64::min);

    let mut tags = BTreeMap::new();
    for case in &cases {
        *tags.entry(case.tag).or_insert(0u64) += 1;
    }

    let mut summary = Record::new();
    summary.push("cases", Value::U(cases.len() as u64));
    summary.push("violations", Value::U(violations));
    summary.push("max_violation", Value::F(max_violation));
    summary.push(
        "min_tightness",
        if min_tightness.is_finite() {
            Value::F(min_tightness)
        } else {
            Value::Null
        },
    );
    for (tag, count) in tags {
        summary.push(tag, Value::U(count));
    }

    let case_records: Vec<Record> = cases.iter().map(|c| c.record.clone()).collect();
    let mut report = Record::new();
    report.push("config", Value::Object(config.echo()));
    report.push(
        "cases",
        Value::Array(case_records.iter().cloned().map(Value::Object).collect()),
    );
    report.push("summary", Value::Object(summary));

    let exit_code = if violations > 0 {
        2
    } else if case_records.is_empty() {
        1
    } else {
        0
    };
    Ok(SweepOutcome {
        report,
        cases: case_records,
        exit_code,
    })
}

/// The one permitted environment override: KLOOSTER_THREADS caps the worker
/// count without touching the config echo (reports stay byte-identical).
fn effective_parallelism(configured: usize) -> usize {
    match std::env::var("KLOOSTER_THREADS") {
        Ok(s) => s.parse::<usize>().ok().filter(|&n| n > 0).unwrap_or(configured),
        Err(_) => configured,
    }
}

fn kloosterman_cases(config: &SweepConfig) -> Result<Vec<Case>> {
    let tol = config.tolerances;
    let seed = config.seed as u64;
    let moduli: Vec<u64> = config.ranges["c"]
        .values()
        .into_iter()
        .map(|v| v as u64)
        .filter(|&c| c >= 3 && c % 2 == 1)
        .collect();
    let nested: Vec<Result<Vec<Case>>> = moduli
        .par_iter()
        .map(|&c| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, c));
            let mut out = Vec::new();
            for _ in 0..config.samples_per_modulus {
                let a = sample_unit(&mut rng, c);
                let b = sample_unit(&mut rng, c);
                out.push(kloosterman_case(a, b, c, &tol)?);
            }
            Ok(out)
        })
        .collect();
    let mut cases = Vec::new();
    for group in nested {
        cases.extend(group?);
    }
    Ok(cases)
}

fn sample_unit(rng: &mut ChaCha8Rng, c: u64) -> i64 {
    loop {
        let x = rng.gen_range(1..c);
        if gcd(x, c) == 1 {
            return x as i64;
        }
    }
}

fn kloosterman_case(a: i64, b: i64, c: u64, tol: &Tolerances) -> Result<Case> {
    let brute = eval_bruteforce(a, b, c);
    let mult = eval_multiplicative(a, b, c);
    let diff = (brute.value - mult.value).abs();
    let cert = certify_lower_bound(a, b, c)
        .with_context(|| format!("certificate for ({a},{b};{c})"))?;
    let magnitude = brute.value.abs();

    let mut violation: f64 = diff - tol.eval;
    let tightness = match cert.verdict {
        Verdict::BoundedBelow => {
            violation = violation.max(cert.theorem_bound - tol.certificate - magnitude);
            (cert.theorem_bound > 0.0).then(|| magnitude / cert.theorem_bound)
        }
        Verdict::Vanishes => {
            violation = violation.max(magnitude - tol.certificate);
            None
        }
    };
    if cert.log_corollary_bound.is_finite() && cert.log_theorem_bound.is_finite() {
        violation = violation.max(cert.log_corollary_bound - cert.log_theorem_bound - 1e-9);
    }
    let violation = violation.max(0.0);

    let mut rec = Record::new();
    rec.push("c", Value::U(c));
    rec.push("a", Value::I(a));
    rec.push("b", Value::I(b));
    rec.push("brute", Value::F(brute.value));
    rec.push("multiplicative", Value::F(mult.value));
    rec.push("diff", Value::F(diff));
    rec.push("verdict", Value::S(cert.verdict.as_str().to_string()));
    rec.push("theorem_bound", Value::F(cert.theorem_bound));
    rec.push("corollary_bound", Value::F(cert.corollary_bound));
    rec.push("violation", Value::F(violation));
    Ok(Case {
        key: (c, 0, a, b),
        record: rec,
        violation,
        tightness,
        tag: match cert.verdict {
            Verdict::BoundedBelow => "bounded_below",
            Verdict::Vanishes => "vanishes",
        },
    })
}

fn bessel_cases(config: &SweepConfig) -> Result<Vec<Case>> {
    let tol = config.tolerances;
    let weights: Vec<u64> = config.ranges["k"]
        .values()
        .into_iter()
        .map(|v| v as u64)
        .filter(|&k| k >= 2 && k % 2 == 0)
        .collect();
    weights
        .par_iter()
        .map(|&k| {
            let nu = (k - 1) as f64;
            let eval = bessel_j((k - 1) as u32, nu)
                .with_context(|| format!("diagonal Bessel value at weight {k}"))?;
            let bracket = jnu_at_nu_bracket(nu, 0.4470);
            let violation = if bracket.valid {
                let below = bracket.lower - (eval.value + eval.abs_error);
                let above = (eval.value - eval.abs_error) - bracket.upper;
                (below.max(above) - tol.bracket).max(0.0)
            } else {
                0.0
            };
            let tightness = (bracket.valid && bracket.lower > 0.0)
                .then(|| eval.value / bracket.lower);

            let mut rec = Record::new();
            rec.push("k", Value::U(k));
            rec.push("nu", Value::F(nu));
            rec.push("value", Value::F(eval.value));
            rec.push("abs_error", Value::F(eval.abs_error));
            rec.push("method", Value::S(eval.method.as_str().to_string()));
            rec.push("bracket_lower", Value::F(bracket.lower));
            rec.push("bracket_upper", Value::F(bracket.upper));
            rec.push("bracket_valid", Value::B(bracket.valid));
            rec.push("violation", Value::F(violation));
            Ok(Case {
                key: (k, 0, 0, 0),
                record: rec,
                violation,
                tightness,
                tag: if bracket.valid {
                    "brackets_checked"
                } else {
                    "brackets_skipped"
                },
            })
        })
        .collect()
}

fn petersson_cases(config: &SweepConfig) -> Result<Vec<Case>> {
    let tol = config.tolerances;
    let d0 = 0.999;
    let levels: Vec<u64> = config.ranges["level"]
        .values()
        .into_iter()
        .map(|v| v as u64)
        .filter(|&n| n % 2 == 1)
        .collect();
    let weights: Vec<u64> = config.ranges["k"]
        .values()
        .into_iter()
        .map(|v| v as u64)
        .filter(|&k| k >= 2 && k % 2 == 0)
        .collect();
    let grid: Vec<(u64, u64)> = levels
        .iter()
        .flat_map(|&n| weights.iter().map(move |&k| (n, k)))
        .collect();

    let nested: Vec<Result<Vec<Case>>> = grid
        .par_iter()
        .map(|&(level, k)| {
            // Sanity-check the threshold formulas once per (level, k) pair.
            thresholds(level, d0, None)
                .with_context(|| format!("thresholds for level {level}"))?;
            let admissible = find_admissible(level, k, Mode::Thm12, d0)
                .with_context(|| format!("admissible search at level {level}, weight {k}"))?;
            let mut out = Vec::new();
            for &n in admissible.iter().take(config.samples_per_modulus as usize) {
                let inst = TraceInstance::new(1, n, level, k)?.with_d0(d0)?;
                let check = verify(&inst, Mode::Thm12)
                    .with_context(|| format!("verify at level {level}, weight {k}, n {n}"))?;
                let margin = check.series_value.abs() - check.series_error - check.theorem_bound;
                let violation = if margin.is_finite() {
                    (-margin - tol.certificate).max(0.0)
                } else {
                    0.0
                };
                let tightness = (check.theorem_bound.is_finite()
                    && check.theorem_bound > 0.0)
                    .then(|| {
                        (check.series_value.abs() - check.series_error) / check.theorem_bound
                    });

                let mut rec = Record::new();
                rec.push("level", Value::U(level));
                rec.push("k", Value::U(k));
                rec.push("m", Value::U(1));
                rec.push("n", Value::U(n));
                rec.push("mode", Value::S(Mode::Thm12.as_str().to_string()));
                rec.push("series_value", Value::F(check.series_value));
                rec.push("series_error", Value::F(check.series_error));
                rec.push("theorem_bound", Value::F(check.theorem_bound));
                rec.push("tail_paper_bound", Value::F(check.tail_paper_bound));
                rec.push("b_max", Value::U(check.b_max));
                rec.push("verdict", Value::S(check.verdict.as_str().to_string()));
                rec.push("violation", Value::F(violation));
                let tag = match check.verdict {
                    VerifyVerdict::Verified => "verified",
                    VerifyVerdict::HypothesisFailed => "hypothesis_failed",
                    VerifyVerdict::Violated => "violated",
                };
                out.push(Case {
                    key: (level, k, n as i64, 0),
                    record: rec,
                    violation,
                    tightness,
                    tag,
                });
            }
            Ok(out)
        })
        .collect();
    let mut cases = Vec::new();
    for group in nested {
        cases.extend(group?);
    }
    Ok(cases)
}
