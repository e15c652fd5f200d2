//! Bessel J of integer order with certified error bounds, the Airy function
//! on the interval the transition analysis needs, and the three envelopes
//! (decay bracket, on-diagonal bracket, transition bracket) that the
//! spectral-average module consumes.

mod airy;
mod gamma;
mod series;
mod quad;

pub use airy::airy_ai;
pub use gamma::gamma;

use crate::{Error, Result};
use std::sync::LazyLock;

pub const MAX_ORDER: u32 = 10_000;
pub const MAX_ARGUMENT: f64 = 1.0e6;

/// Magnitudes below this are reported as 0 with a certified envelope.
pub const TINY_FLOOR: f64 = 1.0e-30;

/// C0 = 2^(1/3) / (3^(2/3) Gamma(2/3)) = 2^(1/3) Ai(0), about 0.44731.
static C0: LazyLock<f64> =
    LazyLock::new(|| 2f64.cbrt() / (3f64.powf(2.0 / 3.0) * gamma(2.0 / 3.0)));

pub fn c0() -> f64 {
    *C0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselMethod {
    Exact,
    Series,
    Quadrature,
    Envelope,
}

impl BesselMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            BesselMethod::Exact => "exact",
            BesselMethod::Series => "series",
            BesselMethod::Quadrature => "quadrature",
            BesselMethod::Envelope => "envelope",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BesselEval {
    pub value: f64,
    pub abs_error: f64,
    pub method: BesselMethod,
}

/// Two-sided bracket [lower, upper]; `valid = false` carries the reason the
/// requested bracket is not certified, and log-domain copies survive
/// underflow of the f64 fields.
#[derive(Clone, Debug)]
pub struct EnvelopePair {
    pub lower: f64,
    pub upper: f64,
    pub log_lower: f64,
    pub log_upper: f64,
    pub valid: bool,
    pub reason: String,
}

impl EnvelopePair {
    fn from_logs(log_lower: f64, log_upper: f64) -> Self {
        EnvelopePair {
            lower: log_lower.exp(),
            upper: log_upper.exp().max(f64::MIN_POSITIVE),
            log_lower,
            log_upper,
            valid: true,
            reason: String::new(),
        }
    }

    fn invalid(reason: String) -> Self {
        EnvelopePair {
            lower: f64::NAN,
            upper: f64::NAN,
            log_lower: f64::NAN,
            log_upper: f64::NAN,
            valid: false,
            reason,
        }
    }

    pub fn contains(&self, v: f64, slack: f64) -> bool {
        self.valid && v >= self.lower - slack && v <= self.upper + slack
    }
}

fn validate(order: u32, x: f64) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::OutOfRange {
            what: "bessel order",
            detail: format!("{order} exceeds {MAX_ORDER}"),
        });
    }
    if !x.is_finite() || !(0.0..=MAX_ARGUMENT).contains(&x) {
        return Err(Error::OutOfRange {
            what: "bessel argument",
            detail: format!("{x} outside [0, {MAX_ARGUMENT:e}]"),
        });
    }
    Ok(())
}

/// J_order(x) with a certified absolute error.
///
/// Dispatch: exact at x = 0; the exact-rational ascending series for
/// x <= max(12, order/3); the validated oscillatory integral otherwise.
/// Deep inside the decay region (x well below the order) the decay bracket
/// already pins |J| under 1e-30, and the value is reported as 0 with the
/// bracket's upper end as the error, skipping evaluation entirely.
pub fn bessel_j(order: u32, x: f64) -> Result<BesselEval> {
    validate(order, x)?;
    if x == 0.0 {
        return Ok(BesselEval {
            value: if order == 0 { 1.0 } else { 0.0 },
            abs_error: 0.0,
            method: BesselMethod::Exact,
        });
    }
    let nu = order as f64;
    if nu >= 18.0 && x < nu {
        let t = x / nu;
        let j_upper = c0() / nu.cbrt() + 3.0 / nu;
        let log_env = nu * (1.0 - t + t.ln()) + j_upper.ln();
        if log_env < TINY_FLOOR.ln() {
            return Ok(BesselEval {
                value: 0.0,
                abs_error: log_env.exp().max(f64::MIN_POSITIVE),
                method: BesselMethod::Envelope,
            });
        }
    }
    let (v, base_err, method) = if x <= 12f64.max(nu / 3.0) {
        let (v, tail) = series::series_value(order, x);
        (v, tail, BesselMethod::Series)
    } else {
        let (v, qerr) = quad::quad_value(order, x);
        (v, qerr, BesselMethod::Quadrature)
    };
    let value = v.to_f64();
    let abs_error = base_err + value.abs() * 2.3e-16;
    if value.abs() < TINY_FLOOR || value.abs() <= abs_error {
        // cannot certify a sign at this magnitude: report the envelope
        return Ok(BesselEval {
            value: 0.0,
            abs_error: value.abs() + abs_error,
            method,
        });
    }
    Ok(BesselEval {
        value,
        abs_error,
        method,
    })
}

/// Series backend without the tiny-value shortcut (for cross-validation).
pub fn bessel_j_series(order: u32, x: f64) -> Result<BesselEval> {
    validate(order, x)?;
    let (v, tail) = series::series_value(order, x);
    let value = v.to_f64();
    Ok(BesselEval {
        value,
        abs_error: tail + value.abs() * 2.3e-16,
        method: BesselMethod::Series,
    })
}

/// Quadrature backend without the tiny-value shortcut (for cross-validation).
pub fn bessel_j_quadrature(order: u32, x: f64) -> Result<BesselEval> {
    validate(order, x)?;
    if x == 0.0 {
        return bessel_j(order, x);
    }
    let (v, qerr) = quad::quad_value(order, x);
    let value = v.to_f64();
    Ok(BesselEval {
        value,
        abs_error: qerr + value.abs() * 2.3e-16,
        method: BesselMethod::Quadrature,
    })
}

/// Decay bracket: for 0 < x <= 1 and j_at_nu = J_nu(nu) > 0,
///
/// ```text
///   x^nu j_at_nu <= J_nu(nu x) <= e^{nu(1-x)} x^nu j_at_nu .
/// ```
///
/// Both ends are formed in the log domain; x^nu alone underflows long before
/// the quantities stop being meaningful.
pub fn paris_envelope(nu: f64, x: f64, j_at_nu: f64) -> Result<EnvelopePair> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::OutOfRange {
            what: "paris_envelope x",
            detail: format!("{x} outside (0, 1]"),
        });
    }
    if !(j_at_nu > 0.0) || !(nu > 0.0) {
        return Err(Error::OutOfRange {
            what: "paris_envelope",
            detail: format!("requires nu > 0 and j_at_nu > 0, got nu={nu}, j={j_at_nu}"),
        });
    }
    let log_pow = nu * x.ln();
    let log_lower = log_pow + j_at_nu.ln();
    let log_upper = nu * (1.0 - x) + log_lower;
    Ok(EnvelopePair::from_logs(log_lower, log_upper))
}

/// On-diagonal bracket: (C0 - eps)/nu^(1/3) <= J_nu(nu) <= C0/nu^(1/3) + 3/nu,
/// certified for nu >= max(18, (3/eps)^(3/2)).
pub fn jnu_at_nu_bracket(nu: f64, epsilon: f64) -> EnvelopePair {
    if !(epsilon > 0.0 && epsilon < 0.4473) {
        return EnvelopePair::invalid(format!("epsilon {epsilon} outside (0, 0.4473)"));
    }
    let threshold = (3.0 / epsilon).powf(1.5).max(18.0);
    if !(nu >= threshold) {
        return EnvelopePair::invalid(format!(
            "nu {nu} below validity threshold {threshold:.3} for epsilon {epsilon}"
        ));
    }
    let lower = (c0() - epsilon) / nu.cbrt();
    let upper = c0() / nu.cbrt() + 3.0 / nu;
    EnvelopePair {
        lower,
        upper,
        log_lower: lower.ln(),
        log_upper: upper.ln(),
        valid: true,
        reason: String::new(),
    }
}

/// Transition bracket around x = (k-1) + t (k-1)^(1/3) for even k >= 180:
/// the Airy main term 2^(1/3) Ai(-2^(1/3) t)/(k-1)^(1/3) plus or minus the
/// half-width (4 t^(9/4) + 21)/(7 (k-1)).
pub fn transition_value(k: u64, t: f64) -> Result<EnvelopePair> {
    if k < 180 || k % 2 != 0 {
        return Err(Error::OutOfRange {
            what: "transition k",
            detail: format!("{k} must be even and >= 180"),
        });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange {
            what: "transition t",
            detail: format!("{t} outside [0, 1]"),
        });
    }
    let nu = (k - 1) as f64;
    let main = 2f64.cbrt() * airy_ai(-(2f64.cbrt()) * t)? / nu.cbrt();
    let half_width = (4.0 * t.powf(2.25) + 21.0) / (7.0 * nu);
    let lower = main - half_width;
    let upper = main + half_width;
    Ok(EnvelopePair {
        lower,
        upper,
        log_lower: lower.ln(),
        log_upper: upper.ln(),
        valid: true,
        reason: String::new(),
    })
}
