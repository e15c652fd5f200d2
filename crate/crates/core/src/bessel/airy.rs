//! Airy Ai on the interval [-2.34, 0] by its Maclaurin expansion, evaluated
//! in double-double to absorb the cancellation near the first negative zero
//! (which sits just left of -2.338).

use super::gamma::gamma;
use crate::dd::DoubleDouble as DD;
use crate::{Error, Result};
use std::sync::LazyLock;

/// Ai(0) = 1/(3^(2/3) Gamma(2/3)) and Ai'(0) = -1/(3^(1/3) Gamma(1/3)).
static AI0: LazyLock<(f64, f64)> = LazyLock::new(|| {
    let ai0 = 1.0 / (3f64.powf(2.0 / 3.0) * gamma(2.0 / 3.0));
    let aip0 = -1.0 / (3f64.cbrt() * gamma(1.0 / 3.0));
    (ai0, aip0)
});

pub fn airy_ai(x: f64) -> Result<f64> {
    if !x.is_finite() || !(-2.34..=0.0).contains(&x) {
        return Err(Error::OutOfRange {
            what: "airy_ai argument",
            detail: format!("{x} outside [-2.34, 0]"),
        });
    }
    let z = DD::from_f64(x);
    let z3 = z * z * z;
    // f(z) = 1 + z^3/(2*3) + z^6/(2*3*5*6) + ...
    let mut t = DD::ONE;
    let mut f = DD::ONE;
    // g(z) = z + z^4/(3*4) + z^7/(3*4*6*7) + ...
    let mut u = z;
    let mut g = z;
    let mut k = 0u32;
    loop {
        t = t * z3 / DD::from_u64(((3 * k + 2) * (3 * k + 3)) as u64);
        u = u * z3 / DD::from_u64(((3 * k + 3) * (3 * k + 4)) as u64);
        f = f + t;
        g = g + u;
        k += 1;
        if t.abs().hi < 1e-40 && u.abs().hi < 1e-40 {
            break;
        }
        debug_assert!(k < 200);
    }
    let (ai0, aip0) = *AI0;
    Ok((DD::from_f64(ai0) * f + DD::from_f64(aip0) * g).to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn airy_anchor_values() {
        let cases = [
            (0.0, 0.35502805388781724),
            (-0.25, 0.41872461427545292),
            (-0.5, 0.47572809161053959),
            (-1.0, 0.53556088329235212),
            (-1.2599210498948732, 0.51863361459891977),
            (-1.75, 0.36548325221423157),
            (-2.0, 0.22740742820168558),
            (-2.33, 0.0056848585964714549),
            (-2.34, -0.0013271024154459529),
        ];
        for (x, want) in cases {
            let got = airy_ai(x).unwrap();
            assert!(
                (got - want).abs() < 1e-13,
                "Ai({x}) = {got}, want {want}"
            );
        }
        // just left of the largest zero the series still resolves the sign
        let near_zero = airy_ai(-2.3381074104597674).unwrap();
        assert!(near_zero.abs() < 1e-14);
    }

    #[test]
    fn airy_rejects_outside_domain() {
        assert!(airy_ai(-2.35).is_err());
        assert!(airy_ai(0.1).is_err());
        assert!(airy_ai(f64::NAN).is_err());
    }

    #[test]
    fn scaled_airy_dominates_its_origin_value() {
        // 2^(1/3) Ai(-2^(1/3) t) stays above 2^(1/3) Ai(0) > 0.44 on [0, 1]
        let ai0 = airy_ai(0.0).unwrap();
        let cbrt2 = 2f64.cbrt();
        let mut t = 0.0;
        while t <= 1.0 {
            let v = airy_ai(-cbrt2 * t).unwrap();
            assert!(v >= ai0 - 1e-15, "Ai(-2^(1/3) {t}) = {v} < Ai(0)");
            assert!(cbrt2 * v > 0.44);
            t += 0.01;
        }
    }
}
