//! The Kloosterman-Bessel series that measures a spectral average at level N
//! and weight k, with certified truncation control, the two explicit lower
//! bounds it satisfies in the band and transition regimes, threshold weights
//! where those bounds kick in, and an admissibility search for instances.

use crate::arith::{factorize, powerful_split};
use crate::bessel::{bessel_j, c0};
use crate::kloosterman::{common_gcd, eval_multiplicative};
use crate::{Error, Result};
use num_integer::Integer;

/// 1 - 4/9 - ln(9/5), the per-weight exponential decay rate (negative).
pub fn h0() -> f64 {
    5.0 / 9.0 - (9.0f64 / 5.0).ln()
}

/// Growth base A0 = D0 e^{-H0}; above 1 for every admissible D0.
pub fn a0(d0: f64) -> f64 {
    d0 * (-h0()).exp()
}

const MAX_MN: u64 = 1 << 53;

fn bessel_order(k: u64) -> Result<u32> {
    u32::try_from(k - 1).map_err(|_| Error::OutOfRange {
        what: "weight k",
        detail: format!("{k} exceeds the supported Bessel order range"),
    })
}

/// One series instance: indices m, n, odd level N coprime to mn, even
/// weight k, plus the three tunable constants of the bounds.
#[derive(Clone, Debug)]
pub struct TraceInstance {
    pub m: u64,
    pub n: u64,
    pub level: u64,
    pub k: u64,
    pub d0: f64,
    pub e0: f64,
    pub epsilon: f64,
}

/// G(N) and H(N): the certified-lower-bound weight of the level and its
/// normalized form 2^omega(N) G(N) / N^(5/4), both in log domain.
fn level_weights(level: u64) -> Result<(f64, f64)> {
    let split = powerful_split(level)?;
    let f = split.f;
    let ffac = factorize(f)?;
    let (phi_f, tau_f, _) = crate::arith::arithmetic_functions(&ffac);
    let ln_f = (f as f64).ln();
    let ln_tau = (tau_f as f64).ln();
    let log_g = 0.75 * ln_f - phi_f as f64 / (2.0 * tau_f as f64) * (2.0 * ln_tau + ln_f);
    let omega = factorize(level)?.omega();
    let log_h = omega as f64 * std::f64::consts::LN_2 + log_g - 1.25 * (level as f64).ln();
    Ok((log_g.exp(), log_h.exp()))
}

impl TraceInstance {
    /// Defaults: D0 = 0.999, epsilon = 0.4470, E0 = 0.3 * 0.327 * H(N).
    pub fn new(m: u64, n: u64, level: u64, k: u64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::ZeroArgument("trace index"));
        }
        if level == 0 || level % 2 == 0 {
            return Err(Error::EvenModulus(level));
        }
        if k < 2 || k % 2 != 0 {
            return Err(Error::OutOfRange {
                what: "weight k",
                detail: format!("{k} must be even and >= 2"),
            });
        }
        for (what, v) in [("m", m), ("n", n)] {
            if v.gcd(&level) != 1 {
                return Err(Error::NotCoprime {
                    what,
                    value: v as i64,
                    modulus: level,
                });
            }
        }
        let (_, hn) = level_weights(level)?;
        Ok(TraceInstance {
            m,
            n,
            level,
            k,
            d0: 0.999,
            e0: 0.3 * 0.327 * hn,
            epsilon: 0.4470,
        })
    }

    pub fn with_d0(mut self, d0: f64) -> Result<Self> {
        if !(d0 > h0().exp() && d0 < 1.0) {
            return Err(Error::OutOfRange {
                what: "D0",
                detail: format!("{d0} outside (e^H0, 1) = ({:.5}, 1)", h0().exp()),
            });
        }
        self.d0 = d0;
        Ok(self)
    }

    pub fn with_e0(mut self, e0: f64) -> Result<Self> {
        if !(e0 > 0.0 && e0.is_finite()) {
            return Err(Error::OutOfRange {
                what: "E0",
                detail: format!("{e0} must be positive"),
            });
        }
        self.e0 = e0;
        Ok(self)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.4473) {
            return Err(Error::OutOfRange {
                what: "epsilon",
                detail: format!("{epsilon} outside (0, 0.4473)"),
            });
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    /// 4 pi sqrt(mn) / N, the argument of the leading Bessel factor.
    pub fn leading_argument(&self) -> Result<f64> {
        let mn = self
            .m
            .checked_mul(self.n)
            .filter(|&v| v <= MAX_MN)
            .ok_or(Error::Overflow("m*n exceeds 2^53"))?;
        Ok(4.0 * std::f64::consts::PI * (mn as f64).sqrt() / self.level as f64)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Thresholds {
    pub h0: f64,
    pub a0: f64,
    pub gn: f64,
    pub hn: f64,
    pub k0: u64,
    /// Undefined when E0 >= 0.327 H(N).
    pub k1: Option<u64>,
}

/// Threshold weights for level N: k0 where the band-regime bound activates,
/// k1 where the transition-regime bound does. `e0 = None` takes the default
/// 0.3 * 0.327 * H(N).
pub fn thresholds(level: u64, d0: f64, e0: Option<f64>) -> Result<Thresholds> {
    if level == 0 || level % 2 == 0 {
        return Err(Error::EvenModulus(level));
    }
    let h0v = h0();
    if !(d0 > h0v.exp() && d0 < 1.0) {
        return Err(Error::OutOfRange {
            what: "D0",
            detail: format!("{d0} outside (e^H0, 1) = ({:.5}, 1)", h0v.exp()),
        });
    }
    let (gn, hn) = level_weights(level)?;
    let e0v = match e0 {
        Some(v) if !(v > 0.0 && v.is_finite()) => {
            return Err(Error::OutOfRange {
                what: "E0",
                detail: format!("{v} must be positive"),
            })
        }
        Some(v) => v,
        None => 0.3 * 0.327 * hn,
    };
    let a0v = a0(d0);
    let k0 = 2 + ((7f64.ln() - hn.ln()) / a0v.ln()).floor() as u64;
    let margin = 0.327 * hn - e0v;
    let k1 = if margin > 0.0 {
        Some(2 + ((1.632f64.ln() - margin.ln()) / -h0v).floor() as u64)
    } else {
        None
    };
    Ok(Thresholds {
        h0: h0v,
        a0: a0v,
        gn,
        hn,
        k0,
        k1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Thm12,
    Thm13,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Thm12 => "thm12",
            Mode::Thm13 => "thm13",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thm12" => Ok(Mode::Thm12),
            "thm13" => Ok(Mode::Thm13),
            other => Err(Error::OutOfRange {
                what: "mode",
                detail: format!("{other} is not thm12 or thm13"),
            }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> HypothesisCheck {
    HypothesisCheck {
        name,
        passed,
        detail,
    }
}

/// A mode's lower bound when its hypotheses hold, with the full checklist
/// and the proof's intermediate quantities for inspection.
#[derive(Clone, Debug)]
pub struct TheoremBound {
    pub mode: Mode,
    pub bound: Option<f64>,
    pub hypotheses: Vec<HypothesisCheck>,
    /// Band regime: floor on the leading term, 2^omega G(N) N^(-5/4) D0^(k-1) J_{k-1}(k-1).
    pub main_term_floor: Option<f64>,
    /// Band regime: the two sides of 7 e^{H0 (k-1)} <= H(N) D0^(k-1).
    pub dominance_lhs: Option<f64>,
    pub dominance_rhs: Option<f64>,
    /// Transition regime: floor 0.327/(k-1)^(1/3) on the Bessel factor.
    pub transition_floor: Option<f64>,
    /// Transition regime: ceiling 0.543/(k-1)^(1/3) on J_{k-1}(k-1).
    pub jnu_ceiling: Option<f64>,
}

/// Relative slack on band membership: admissible n are constructed from the
/// band's rounded endpoints, so exact comparisons would flap on the boundary.
const BAND_SLACK: f64 = 1e-12;

fn qr_checklist(inst: &TraceInstance) -> Result<HypothesisCheck> {
    let split = powerful_split(inst.level)?;
    let mut failing = Vec::new();
    for &(p, e) in &factorize(inst.level)?.factors {
        if e < 2 {
            continue;
        }
        let mn_mod = ((inst.m as u128 * inst.n as u128) % p as u128) as i64;
        if crate::arith::jacobi_symbol(mn_mod, p)? != 1 {
            failing.push(p.to_string());
        }
    }
    Ok(check(
        "qr_mod_powerful",
        failing.is_empty(),
        if failing.is_empty() {
            format!("mn is a quadratic residue mod every prime of d = {}", split.d)
        } else {
            format!("mn is a nonresidue mod {{{}}}", failing.join(", "))
        },
    ))
}

/// Band-regime lower bound 7.99 pi J_{k-1}(k-1) e^{H0 (k-1)}, hypotheses:
/// the leading argument in [D0 (k-1), (k-1)], mn a QR mod every prime of the
/// powerful part, and k >= max(22, k0(N)).
pub fn thm12_bound(inst: &TraceInstance) -> Result<TheoremBound> {
    let th = thresholds(inst.level, inst.d0, Some(inst.e0))?;
    let nu = (inst.k - 1) as f64;
    let x = inst.leading_argument()?;
    let mut hyp = Vec::new();
    let lo = inst.d0 * nu;
    let in_band = x >= lo * (1.0 - BAND_SLACK) && x <= nu * (1.0 + BAND_SLACK);
    hyp.push(check(
        "ratio_in_band",
        in_band,
        format!("4 pi sqrt(mn)/N = {x:.6} vs [{lo:.6}, {nu:.6}]"),
    ));
    hyp.push(qr_checklist(inst)?);
    let k_min = th.k0.max(22);
    hyp.push(check(
        "k_threshold",
        inst.k >= k_min,
        format!("k = {} vs max(22, k0 = {})", inst.k, th.k0),
    ));
    let dominance_lhs = 7.0 * (h0() * nu).exp();
    let dominance_rhs = th.hn * inst.d0.powf(nu);
    hyp.push(check(
        "dominance",
        dominance_lhs <= dominance_rhs,
        format!("7 e^(H0 (k-1)) = {dominance_lhs:.3e} vs H(N) D0^(k-1) = {dominance_rhs:.3e}"),
    ));
    let passed = hyp.iter().all(|h| h.passed);
    let j = bessel_j(bessel_order(inst.k)?, nu)?;
    let main_term_floor = 2f64.powi(factorize(inst.level)?.omega() as i32) * th.gn
        / (inst.level as f64).powf(1.25)
        * inst.d0.powf(nu)
        * j.value;
    Ok(TheoremBound {
        mode: Mode::Thm12,
        bound: passed.then(|| 7.99 * std::f64::consts::PI * j.value * (h0() * nu).exp()),
        hypotheses: hyp,
        main_term_floor: Some(main_term_floor),
        dominance_lhs: Some(dominance_lhs),
        dominance_rhs: Some(dominance_rhs),
        transition_floor: None,
        jnu_ceiling: None,
    })
}

/// Transition-regime lower bound 2 pi E0 / (k-1)^(1/3), hypotheses: the
/// leading argument in [(k-1), (k-1) + (k-1)^(1/3)], the QR condition,
/// E0 < 0.327 H(N), and k >= max(180, k1(N)).
pub fn thm13_bound(inst: &TraceInstance) -> Result<TheoremBound> {
    let th = thresholds(inst.level, inst.d0, Some(inst.e0))?;
    let nu = (inst.k - 1) as f64;
    let x = inst.leading_argument()?;
    let mut hyp = Vec::new();
    let hi = nu + nu.cbrt();
    let in_band = x >= nu * (1.0 - BAND_SLACK) && x <= hi * (1.0 + BAND_SLACK);
    hyp.push(check(
        "ratio_in_band",
        in_band,
        format!("4 pi sqrt(mn)/N = {x:.6} vs [{nu:.6}, {hi:.6}]"),
    ));
    hyp.push(qr_checklist(inst)?);
    let e0_ok = inst.e0 < 0.327 * th.hn;
    hyp.push(check(
        "e0_range",
        e0_ok,
        format!("E0 = {:.6e} vs 0.327 H(N) = {:.6e}", inst.e0, 0.327 * th.hn),
    ));
    let k_min = th.k1.map_or(u64::MAX, |k1| k1.max(180));
    hyp.push(check(
        "k_threshold",
        inst.k >= k_min,
        match th.k1 {
            Some(k1) => format!("k = {} vs max(180, k1 = {k1})", inst.k),
            None => "k1 undefined (E0 >= 0.327 H(N))".to_string(),
        },
    ));
    let passed = hyp.iter().all(|h| h.passed);
    Ok(TheoremBound {
        mode: Mode::Thm13,
        bound: passed.then(|| 2.0 * std::f64::consts::PI * inst.e0 / nu.cbrt()),
        hypotheses: hyp,
        main_term_floor: None,
        dominance_lhs: None,
        dominance_rhs: None,
        transition_floor: Some(0.327 / nu.cbrt()),
        jnu_ceiling: Some(0.543 / nu.cbrt()),
    })
}

/// Explicit tail bound 6.01 pi J_{k-1}(k-1) e^{H0 (k-1)}, valid for k >= 22
/// when the leading argument sits within [8/9, 10/9] of (k-1).
pub fn tail_paper_bound(inst: &TraceInstance) -> Result<f64> {
    if inst.k < 22 {
        return Err(Error::OutOfRange {
            what: "tail bound weight",
            detail: format!("k = {} below 22", inst.k),
        });
    }
    let nu = (inst.k - 1) as f64;
    let ratio = inst.leading_argument()? / nu;
    if !(BAND_LO..=BAND_HI).contains(&ratio) {
        return Err(Error::OutOfRange {
            what: "tail bound ratio",
            detail: format!("{ratio:.6} outside [8/9, 10/9]"),
        });
    }
    let j = bessel_j(bessel_order(inst.k)?, nu)?;
    Ok(6.01 * std::f64::consts::PI * j.value * (h0() * nu).exp())
}

const BAND_LO: f64 = 8.0 / 9.0 - 1e-12;
const BAND_HI: f64 = 10.0 / 9.0 + 1e-12;

/// Ratio below which a term is never evaluated: its decay envelope is
/// charged wholly to the error budget instead.
const DEEP_DECAY: f64 = 0.9;

struct SeriesOutcome {
    value: f64,
    error: f64,
    /// 2 pi |S(m,n;N)|/N |J_{k-1}(x)|, the b = 1 term in absolute value.
    main_term: f64,
    /// Everything past b = 1, bounded term by term plus the closed-form rest.
    tail_numeric: f64,
}

/// J_{k-1}(k-1) upper estimate used inside decay envelopes; trivial when the
/// on-diagonal bracket is not yet certified.
fn j_diag_upper(nu: f64) -> f64 {
    if nu >= 18.0 {
        c0() / nu.cbrt() + 3.0 / nu
    } else {
        1.0
    }
}

/// Closed-form bound on the truncated rest: sum over b > b_max of
/// 2 pi J_ub e^{nu (1 - x_b + ln x_b)} with x_b = r1/b, dominated through
/// the integral test by 2 pi J_ub e^nu r1^nu B^(1-nu) / (nu - 1).
fn truncation_rest(inst: &TraceInstance, b_max: u64) -> Result<f64> {
    let nu = (inst.k - 1) as f64;
    let r1 = inst.leading_argument()? / nu;
    if nu < 2.0 {
        return Ok(f64::INFINITY);
    }
    let log_rest = (2.0 * std::f64::consts::PI * j_diag_upper(nu)).ln()
        + nu
        + nu * r1.ln()
        + (1.0 - nu) * (b_max as f64).ln()
        - (nu - 1.0).ln();
    Ok(log_rest.exp())
}

fn series_details(inst: &TraceInstance, b_max: u64) -> Result<SeriesOutcome> {
    if b_max == 0 {
        return Err(Error::ZeroArgument("series truncation length"));
    }
    let arg = inst.leading_argument()? * inst.level as f64; // 4 pi sqrt(mn)
    let nu = (inst.k - 1) as f64;
    let order = bessel_order(inst.k)?;
    let sign = if (inst.k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut main_term = 0.0;
    let mut tail_numeric = 0.0;
    for b in 1..=b_max {
        let c = b * inst.level;
        let x = arg / c as f64;
        let ratio = x / nu;
        if nu >= 18.0 && ratio <= DEEP_DECAY {
            // never evaluated: envelope, with the trivial |S| <= phi(c)
            let phi = factorize(c)?.phi();
            let log_env = nu * (1.0 - ratio + ratio.ln()) + j_diag_upper(nu).ln();
            let contribution = two_pi * (phi as f64 / c as f64) * log_env.exp();
            error += contribution;
            if b >= 2 {
                tail_numeric += contribution;
            }
            continue;
        }
        let s = eval_multiplicative(inst.m as i64, inst.n as i64, c);
        let j = bessel_j(order, x)?;
        let weil_env = {
            let fac = factorize(c)?;
            fac.tau() as f64
                * (c as f64).sqrt()
                * (common_gcd(inst.m as i64, inst.n as i64, c) as f64).sqrt()
        };
        let term = two_pi * s.value / c as f64 * j.value;
        let term_err = two_pi / c as f64
            * (weil_env * j.abs_error + j.value.abs() * s.abs_error + s.abs_error * j.abs_error);
        value += sign * term;
        error += term_err;
        if b == 1 {
            main_term = two_pi * s.value.abs() / c as f64 * j.value.abs();
        } else {
            tail_numeric += term.abs() + term_err;
        }
    }
    let rest = truncation_rest(inst, b_max)?;
    error += rest;
    tail_numeric += rest;
    Ok(SeriesOutcome {
        value,
        error,
        main_term,
        tail_numeric,
    })
}

/// Truncated series 2 pi (-1)^(k/2) sum_{b=1}^{b_max} S(m,n;bN)/(bN)
/// J_{k-1}(4 pi sqrt(mn)/(bN)) and a certified bound on everything left out
/// (evaluation errors, skipped deep-decay terms, and the b > b_max rest).
pub fn series_value(inst: &TraceInstance, b_max: u64) -> Result<(f64, f64)> {
    let out = series_details(inst, b_max)?;
    Ok((out.value, out.error))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyVerdict {
    Verified,
    HypothesisFailed,
    Violated,
}

impl VerifyVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            VerifyVerdict::Verified => "verified",
            VerifyVerdict::HypothesisFailed => "hypothesis_failed",
            VerifyVerdict::Violated => "violated",
        }
    }
}

#[derive(Clone, Debug)]
pub struct PeterssonVerification {
    pub instance: TraceInstance,
    pub mode: Mode,
    pub series_value: f64,
    pub series_error: f64,
    pub main_term: f64,
    pub tail_numeric_bound: f64,
    /// NaN when the mode hypotheses fail (the explicit tail bound has no
    /// validity claim there).
    pub tail_paper_bound: f64,
    /// NaN when the mode hypotheses fail.
    pub theorem_bound: f64,
    pub b_max: u64,
    pub hypotheses: Vec<HypothesisCheck>,
    pub verdict: VerifyVerdict,
}

const B_MAX_START: u64 = 8;
const B_MAX_CAP: u64 = 1024;

/// End-to-end check of one instance against the chosen mode's bound.
/// The truncation length starts at 8 and doubles until the certified rest is
/// below 1% of the bound (hard error at 1024). Verdicts: `verified` when
/// |series| - error >= bound, `violated` when |series| + error < bound,
/// `hypothesis_failed` otherwise (failed hypotheses or unresolved precision).
pub fn verify(inst: &TraceInstance, mode: Mode) -> Result<PeterssonVerification> {
    let tb = match mode {
        Mode::Thm12 => thm12_bound(inst)?,
        Mode::Thm13 => thm13_bound(inst)?,
    };
    let mut b_max = B_MAX_START;
    if let Some(bound) = tb.bound {
        while truncation_rest(inst, b_max)? >= 0.01 * bound {
            b_max *= 2;
            if b_max > B_MAX_CAP {
                return Err(Error::TruncationCap { cap: B_MAX_CAP });
            }
        }
    }
    let out = series_details(inst, b_max)?;
    let (theorem_bound, tail_paper, verdict) = match tb.bound {
        Some(bound) => {
            let tail_paper = tail_paper_bound(inst)?;
            let verdict = if out.value.abs() - out.error >= bound {
                VerifyVerdict::Verified
            } else if out.value.abs() + out.error < bound {
                VerifyVerdict::Violated
            } else {
                VerifyVerdict::HypothesisFailed
            };
            (bound, tail_paper, verdict)
        }
        None => (f64::NAN, f64::NAN, VerifyVerdict::HypothesisFailed),
    };
    Ok(PeterssonVerification {
        instance: inst.clone(),
        mode,
        series_value: out.value,
        series_error: out.error,
        main_term: out.main_term,
        tail_numeric_bound: out.tail_numeric,
        tail_paper_bound: tail_paper,
        theorem_bound,
        b_max,
        hypotheses: tb.hypotheses,
        verdict,
    })
}

/// All n with m = 1 that make (1, n, N, k) admissible for the mode: n in the
/// mode's band interval, coprime to N, and a QR mod every prime of the
/// powerful part of N. Ascending; empty is a legitimate outcome.
pub fn find_admissible(level: u64, k: u64, mode: Mode, d0: f64) -> Result<Vec<u64>> {
    if level == 0 || level % 2 == 0 {
        return Err(Error::EvenModulus(level));
    }
    if k < 2 || k % 2 != 0 {
        return Err(Error::OutOfRange {
            what: "weight k",
            detail: format!("{k} must be even and >= 2"),
        });
    }
    if !(d0 > h0().exp() && d0 < 1.0) {
        return Err(Error::OutOfRange {
            what: "D0",
            detail: format!("{d0} outside (e^H0, 1)"),
        });
    }
    let nu = (k - 1) as f64;
    let scale = level as f64 / (4.0 * std::f64::consts::PI);
    let (lo, hi) = match mode {
        Mode::Thm12 => ((d0 * nu * scale).powi(2), (nu * scale).powi(2)),
        Mode::Thm13 => ((nu * scale).powi(2), ((nu + nu.cbrt()) * scale).powi(2)),
    };
    let first = lo.ceil().max(1.0) as u64;
    let last = hi.floor() as u64;
    let powerful_primes: Vec<u64> = factorize(level)?
        .factors
        .iter()
        .filter(|&&(_, e)| e >= 2)
        .map(|&(p, _)| p)
        .collect();
    let mut out = Vec::new();
    for n in first..=last {
        if n.gcd(&level) != 1 {
            continue;
        }
        let qr = powerful_primes
            .iter()
            .all(|&p| matches!(crate::arith::jacobi_symbol((n % p) as i64, p), Ok(1)));
        if qr {
            out.push(n);
        }
    }
    Ok(out)
}
