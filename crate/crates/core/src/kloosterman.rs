//! Complete exponential sums S(a,b;c) = sum of e((a x + b x̄)/c) over the
//! units x mod c, evaluated three independent ways (direct summation, the
//! closed form at odd prime powers, and the twisted-multiplicativity
//! factorization), plus certified lower bounds on |S| for odd moduli.

use crate::arith::{
    self, arithmetic_functions, factorize, is_prime, jacobi_symbol, mod_inverse, mulmod,
    powerful_split, sqrt_mod_prime_power, PowerfulSplit,
};
use crate::scalar::Scalar;
use crate::{Error, Result, Wide};
use num_integer::Integer;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Brute,
    Salie,
    Multiplicative,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Salie => "salie",
            Method::Multiplicative => "multiplicative",
        }
    }
}

/// An evaluated sum together with a rigorous absolute-error allowance.
#[derive(Clone, Copy, Debug)]
pub struct KloostermanValue {
    pub a: i64,
    pub b: i64,
    pub c: u64,
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
}

fn error_allowance(c: u64) -> f64 {
    (c as f64 * 1e-12).max(1e-9)
}

/// Reusable direct-summation context for a fixed modulus: the unit group with
/// inverses and a table of cos(2 pi k / c). Building it once amortizes the
/// O(c log c) setup over many (a, b) pairs.
pub struct BruteForcer<S: Scalar> {
    pub c: u64,
    units: Vec<(u64, u64)>,
    cos_table: Vec<S>,
}

impl<S: Scalar> BruteForcer<S> {
    pub fn new(c: u64) -> Self {
        assert!(c >= 1, "modulus must be positive");
        let mut units = Vec::new();
        if c == 1 {
            units.push((0, 0));
        } else {
            for x in 1..c {
                if x.gcd(&c) == 1 {
                    let inv = mod_inverse(x as i64, c).expect("unit is invertible");
                    units.push((x, inv));
                }
            }
        }
        let step = S::two_pi() / S::from_u64(c);
        let cos_table = (0..c).map(|k| (step * S::from_u64(k)).cos()).collect();
        BruteForcer { c, units, cos_table }
    }

    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    /// Compensated sum of cos(2 pi (a x + b x̄)/c) over the units, ascending x.
    pub fn eval(&self, a: i64, b: i64) -> S {
        let c = self.c as i128;
        let mut sum = S::zero();
        let mut comp = S::zero();
        for &(x, xinv) in &self.units {
            let k = (a as i128 * x as i128 + b as i128 * xinv as i128).rem_euclid(c) as usize;
            let t = self.cos_table[k];
            let tmp = sum + t;
            if sum.abs() >= t.abs() {
                comp = comp + ((sum - tmp) + t);
            } else {
                comp = comp + ((t - tmp) + sum);
            }
            sum = tmp;
        }
        sum + comp
    }
}

/// Direct evaluation over the unit group; S(a,b;1) = 1 by the empty
/// coprimality condition on the single residue class.
pub fn eval_bruteforce(a: i64, b: i64, c: u64) -> KloostermanValue {
    let forcer: BruteForcer<f64> = BruteForcer::new(c);
    KloostermanValue {
        a,
        b,
        c,
        value: forcer.eval(a, b),
        abs_error: error_allowance(c),
        method: Method::Brute,
    }
}

/// Closed form at an odd prime power q = p^beta, beta >= 2, requiring
/// p coprime to 2ab. The sum vanishes exactly when ab is a quadratic
/// nonresidue mod p; otherwise, with l the canonical square root of ab mod q
/// and (l/q) the Jacobi symbol,
///
/// ```text
///   S =  2 (l/q) sqrt(q) cos(4 pi l / q)   if q = 1 mod 4,
///   S = -2 (l/q) sqrt(q) sin(4 pi l / q)   if q = 3 mod 4.
/// ```
pub fn eval_salie(a: i64, b: i64, p: u64, beta: u32) -> Result<KloostermanValue> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotAnOddPrime(p));
    }
    let q = p
        .checked_pow(beta)
        .ok_or(Error::Overflow("prime power exceeds u64"))?;
    if beta < 2 {
        return Err(Error::NotAPrimePower { q });
    }
    if (a as i128).rem_euclid(p as i128) == 0 {
        return Err(Error::DivisibleByPrime { a, p });
    }
    if (b as i128).rem_euclid(p as i128) == 0 {
        return Err(Error::DivisibleByPrime { a: b, p });
    }
    let ab_mod_q = (a as i128 * b as i128).rem_euclid(q as i128) as u64;
    let done = |value: f64, abs_error: f64| KloostermanValue {
        a,
        b,
        c: q,
        value,
        abs_error,
        method: Method::Salie,
    };
    if jacobi_symbol((ab_mod_q % p) as i64, p)? == -1 {
        return Ok(done(0.0, 0.0));
    }
    let l = sqrt_mod_prime_power(ab_mod_q as i64, p, beta)?;
    Ok(done(salie_closed_form(q, l), error_allowance(q)))
}

/// The closed form above for a given root l of ab mod q; exposed separately
/// so tests can confirm the value does not depend on the choice of l vs q-l.
pub(crate) fn salie_closed_form(q: u64, l: u64) -> f64 {
    let jac = jacobi_symbol(l as i64, q).expect("odd modulus") as f64;
    let theta = 4.0 * std::f64::consts::PI * l as f64 / q as f64;
    let amp = 2.0 * jac * (q as f64).sqrt();
    if q % 4 == 1 {
        amp * theta.cos()
    } else {
        -amp * theta.sin()
    }
}

/// Lower bound on |S(a,b;q)| at an odd prime power from the distance of the
/// root's phase to the nearest integer: 4 sqrt(q) min(||(q-8r)/(2q)||, ||4r/q||).
/// The two booleans report (exactly) whether each distance is nonzero.
pub fn phase_distance_floor(q: u64, r: u64) -> (f64, bool, bool) {
    let m1 = (q as i128 - 8 * r as i128).rem_euclid(2 * q as i128) as u64;
    let m2 = mulmod(4, r % q, q);
    let d1 = m1.min(2 * q - m1) as f64 / (2 * q) as f64;
    let d2 = m2.min(q - m2) as f64 / q as f64;
    let floor = 4.0 * (q as f64).sqrt() * d1.min(d2);
    (floor, m1 != 0, m2 != 0)
}

/// Evaluation through the prime-power factorization: with c = prod l_i,
/// l_i = p_i^{e_i}, the sum splits as a product of prime-power sums with
/// arguments twisted by inverses of the cofactors. Each factor goes through
/// the closed form when its hypotheses hold and direct summation otherwise.
pub fn eval_multiplicative(a: i64, b: i64, c: u64) -> KloostermanValue {
    assert!(c >= 1, "modulus must be positive");
    let fac = factorize(c).expect("positive modulus");
    let mut value = 1.0f64;
    let mut remaining = c;
    let mut m = 1u64; // running product of cofactor inverses, tracked mod c
    for &(p, e) in &fac.factors {
        let l = p.pow(e);
        remaining /= l;
        // twist: multiply both arguments by m_{i-1} * (c_i)^{-1} mod l_i
        let cbar = mod_inverse((remaining % l) as i64, l).expect("cofactor is a unit");
        let t = mulmod(m % l, cbar, l);
        let ai = (a as i128 * t as i128).rem_euclid(l as i128) as u64;
        let bi = (b as i128 * t as i128).rem_euclid(l as i128) as u64;
        let use_salie = p != 2 && e >= 2 && ai % p != 0 && bi % p != 0;
        let factor = if use_salie {
            eval_salie(ai as i64, bi as i64, p, e)
                .expect("closed-form hypotheses checked")
                .value
        } else {
            eval_bruteforce(ai as i64, bi as i64, l).value
        };
        value *= factor;
        if remaining > 1 {
            let lbar = mod_inverse(l as i64, remaining).expect("prime powers are coprime");
            m = mulmod(m, lbar, c);
        }
    }
    KloostermanValue {
        a,
        b,
        c,
        value,
        abs_error: error_allowance(c),
        method: Method::Multiplicative,
    }
}

/// tau(c) sqrt(c), valid as an upper bound for |S(a,b;c)| when gcd(a,c) = 1.
pub fn weil_bound(a: i64, c: u64) -> Result<f64> {
    if c == 0 {
        return Err(Error::ZeroArgument("weil_bound modulus"));
    }
    let am = (a as i128).rem_euclid(c as i128) as u64;
    if am.gcd(&c) != 1 {
        return Err(Error::NotCoprime {
            what: "a",
            value: a,
            modulus: c,
        });
    }
    let fac = factorize(c)?;
    Ok(fac.tau() as f64 * (c as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Vanishes,
    BoundedBelow,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Vanishes => "vanishes",
            Verdict::BoundedBelow => "bounded_below",
        }
    }
}

/// Quadratic-residue status of ab modulo one prime of the powerful part.
#[derive(Clone, Copy, Debug)]
pub struct QrStatus {
    pub p: u64,
    pub residue: bool,
}

#[derive(Clone, Debug)]
pub struct CertificateHypotheses {
    pub c_odd: bool,
    pub ab_coprime_to_c: bool,
    pub qr_by_prime: Vec<QrStatus>,
}

/// Certified lower bound for |S(a,b;c)|, odd c with gcd(ab,c) = 1.
///
/// Writing c = d f with d powerful and f squarefree: the sum vanishes exactly
/// when ab is a quadratic nonresidue modulo some prime of d; otherwise
///
/// ```text
///   |S| >= prod_{p^e || d} (2/p^{e/2}) * (tau(f) sqrt(f))^{-(phi(f)/tau(f) - 1)}
/// ```
///
/// (each powerful factor contributes 2/sqrt(p^e): the root phase keeps an odd
/// numerator, so the cosine or sine is at least sin(pi/(2 p^e))). The closed
/// form `(f/sqrt(c)) 2^{omega(c)} / (tau(f)^2 f)^{phi(f)/(2 tau(f))}` never
/// exceeds it. Both bounds underflow f64 once f is large, so their natural
/// logarithms are carried alongside; the log fields are always finite.
#[derive(Clone, Debug)]
pub struct BoundCertificate {
    pub a: i64,
    pub b: i64,
    pub c: u64,
    pub split: PowerfulSplit,
    pub verdict: Verdict,
    pub theorem_bound: f64,
    pub corollary_bound: f64,
    pub log_theorem_bound: f64,
    pub log_corollary_bound: f64,
    pub hypotheses: CertificateHypotheses,
}

pub fn certify_lower_bound(a: i64, b: i64, c: u64) -> Result<BoundCertificate> {
    if c == 0 || c % 2 == 0 {
        return Err(Error::EvenModulus(c));
    }
    for (what, v) in [("a", a), ("b", b)] {
        let vm = (v as i128).rem_euclid(c as i128) as u64;
        if vm.gcd(&c) != 1 {
            return Err(Error::NotCoprime {
                what,
                value: v,
                modulus: c,
            });
        }
    }
    let split = powerful_split(c)?;
    let fac = factorize(c)?;
    let mut qr_by_prime = Vec::new();
    let mut all_residues = true;
    for &(p, e) in &fac.factors {
        if e >= 2 {
            let ab_mod_p = ((a as i128 * b as i128).rem_euclid(p as i128)) as i64;
            let residue = jacobi_symbol(ab_mod_p, p)? == 1;
            all_residues &= residue;
            qr_by_prime.push(QrStatus { p, residue });
        }
    }
    let f = split.f;
    let (phi_f, tau_f, _) = arithmetic_functions(&factorize(f)?);
    let ln_f = (f as f64).ln();
    let ln_tau_f = (tau_f as f64).ln();
    let ratio = phi_f as f64 / tau_f as f64;
    // per prime power p^e dividing the powerful part: |S(a,b;p^e)| >= 2/p^(e/2),
    // from |cos or sin of the root phase| >= sin(pi/(2 p^e))
    let mut log_theorem = -(ratio - 1.0) * (ln_tau_f + 0.5 * ln_f);
    for &(p, e) in &fac.factors {
        if e >= 2 {
            log_theorem += std::f64::consts::LN_2 - 0.5 * e as f64 * (p as f64).ln();
        }
    }
    let log_corollary = ln_f - 0.5 * (c as f64).ln()
        + fac.omega() as f64 * std::f64::consts::LN_2
        - 0.5 * ratio * (2.0 * ln_tau_f + ln_f);
    Ok(BoundCertificate {
        a,
        b,
        c,
        split,
        verdict: if all_residues {
            Verdict::BoundedBelow
        } else {
            Verdict::Vanishes
        },
        theorem_bound: log_theorem.exp(),
        corollary_bound: log_corollary.exp(),
        log_theorem_bound: log_theorem,
        log_corollary_bound: log_corollary,
        hypotheses: CertificateHypotheses {
            c_odd: true,
            ab_coprime_to_c: true,
            qr_by_prime,
        },
    })
}

/// Product of S(an, bn; c) over the units n mod c, in extended precision.
/// The result is a rational integer (it is a Galois norm), which is what the
/// nonvanishing argument for squarefree moduli rests on; the modulus cap
/// keeps the product well inside the certified precision.
pub fn norm_product(a: i64, b: i64, c: u64) -> Result<Wide> {
    const MAX_C: u64 = 30;
    if c == 0 || c % 2 == 0 {
        return Err(Error::EvenModulus(c));
    }
    if c > MAX_C {
        return Err(Error::ModulusTooLarge { c, max: MAX_C });
    }
    let fac = factorize(c)?;
    if fac.factors.iter().any(|&(_, e)| e >= 2) {
        return Err(Error::NotSquarefree(c));
    }
    for (what, v) in [("a", a), ("b", b)] {
        let vm = (v as i128).rem_euclid(c as i128) as u64;
        if vm.gcd(&c) != 1 {
            return Err(Error::NotCoprime {
                what,
                value: v,
                modulus: c,
            });
        }
    }
    let forcer: BruteForcer<Wide> = BruteForcer::new(c);
    let mut product = Wide::ONE;
    for n in 1..=c {
        if n.gcd(&c) != 1 {
            continue;
        }
        let an = (a as i128 * n as i128).rem_euclid(c as i128) as i64;
        let bn = (b as i128 * n as i128).rem_euclid(c as i128) as i64;
        product = product * forcer.eval(an, bn);
    }
    Ok(product)
}

/// gcd(a, b, c); the Weil envelope for general arguments carries sqrt of it.
pub fn common_gcd(a: i64, b: i64, c: u64) -> u64 {
    arith::gcd3_mod(a, b, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_near(got: f64, want: f64, tol: f64, what: &str) {
        assert!(
            (got - want).abs() <= tol,
            "{what}: got {got}, want {want} (diff {:.3e})",
            (got - want).abs()
        );
    }

    #[test]
    fn brute_force_anchors() {
        let cases: [(i64, i64, u64, f64); 12] = [
            (1, 1, 1, 1.0),
            (1, 1, 3, -1.0),
            (1, 2, 3, 2.0),
            (1, 1, 5, 0.3819660112501051),
            (1, 1, 9, 1.0418890660015821),
            (2, 2, 9, -5.638155724715450),
            (2, 1, 9, 0.0),
            (1, 1, 15, -2.618033988749895),
            (1, 1, 27, -4.664057895014764),
            (1, 1, 45, -2.1535838529765065),
            (1, 1, 105, -0.7826167835585124),
            (1, 1, 675, 23.213358788626145),
        ];
        for (a, b, c, want) in cases {
            let got = eval_bruteforce(a, b, c);
            assert_near(got.value, want, got.abs_error, &format!("S({a},{b};{c})"));
            assert!(got.abs_error <= (c as f64 * 1e-12).max(1e-9));
        }
    }

    #[test]
    fn brute_force_symmetry_and_twist() {
        for &(a, b, c) in &[(1i64, 2i64, 21u64), (3, 5, 49), (2, 7, 45), (4, 9, 32)] {
            let s1 = eval_bruteforce(a, b, c).value;
            let s2 = eval_bruteforce(b, a, c).value;
            assert_near(s2, s1, 1e-9, "symmetry");
        }
        // S(a n^2, b; c) = S(a n, b n; c) for units n
        for &(a, b, c, n) in &[(1i64, 1i64, 15u64, 2i64), (2, 3, 35, 4), (1, 1, 49, 3)] {
            let lhs = eval_bruteforce(a * n * n, b, c).value;
            let mid = eval_bruteforce(a * n, b * n, c).value;
            let rhs = eval_bruteforce(a, b * n * n, c).value;
            assert_near(lhs, mid, 1e-9, "twist lhs=mid");
            assert_near(mid, rhs, 1e-9, "twist mid=rhs");
        }
    }

    #[test]
    fn salie_anchors() {
        let cases: [(i64, i64, u64, u32, f64); 8] = [
            (1, 1, 3, 2, 1.0418890660015821),
            (1, 1, 3, 3, -4.664057895014764),
            (2, 2, 3, 2, -5.638155724715450),
            (1, 1, 5, 2, 8.763066800438636),
            (2, 3, 5, 2, -1.8738131458572463),
            (1, 1, 7, 2, 13.542128082546412),
            (3, 5, 7, 2, -6.475536063371694),
            (1, 1, 3, 4, 17.783817290582562),
        ];
        for (a, b, p, beta, want) in cases {
            let got = eval_salie(a, b, p, beta).unwrap();
            assert_near(got.value, want, 1e-9, &format!("salie({a},{b},{p},{beta})"));
            assert_eq!(got.method, Method::Salie);
        }
        // quadratic nonresidue cases vanish exactly
        assert_eq!(eval_salie(2, 1, 3, 2).unwrap().value, 0.0);
        assert_eq!(eval_salie(1, 2, 11, 2).unwrap().value, 0.0);
    }

    #[test]
    fn salie_rejects_bad_inputs() {
        assert!(matches!(
            eval_salie(1, 1, 3, 1),
            Err(Error::NotAPrimePower { .. })
        ));
        assert!(matches!(
            eval_salie(3, 1, 3, 2),
            Err(Error::DivisibleByPrime { .. })
        ));
        assert!(matches!(
            eval_salie(1, 1, 2, 3),
            Err(Error::NotAnOddPrime(2))
        ));
        assert!(matches!(
            eval_salie(1, 1, 9, 2),
            Err(Error::NotAnOddPrime(9))
        ));
    }

    #[test]
    fn salie_root_choice_invariance() {
        for &(a, b, p, beta) in &[
            (1i64, 1i64, 3u64, 2u32),
            (2, 3, 5, 2),
            (3, 5, 7, 2),
            (1, 1, 3, 3),
            (1, 1, 11, 2),
            (2, 2, 13, 2),
        ] {
            let q = p.pow(beta);
            let ab = (a as i128 * b as i128).rem_euclid(q as i128) as i64;
            if jacobi_symbol(ab.rem_euclid(p as i64), p).unwrap() != 1 {
                continue;
            }
            let l = sqrt_mod_prime_power(ab, p, beta).unwrap();
            let v1 = salie_closed_form(q, l);
            let v2 = salie_closed_form(q, q - l);
            assert_near(v2, v1, 1e-12 * (q as f64).sqrt(), "root choice");
        }
    }

    #[test]
    fn multiplicative_matches_brute() {
        let cases: [(i64, i64, u64); 10] = [
            (1, 1, 1),
            (1, 1, 15),
            (1, 1, 45),
            (2, 3, 45),
            (1, 1, 105),
            (1, 1, 675),
            (7, 11, 1155),
            (1, 1, 12),
            (5, 3, 56),
            (2, 9, 2025),
        ];
        for (a, b, c) in cases {
            let m = eval_multiplicative(a, b, c);
            let s = eval_bruteforce(a, b, c);
            assert_near(m.value, s.value, 1e-9, &format!("mult S({a},{b};{c})"));
        }
    }

    #[test]
    fn weil_bound_values_and_envelope() {
        assert_near(weil_bound(1, 1).unwrap(), 1.0, 0.0, "c=1");
        assert_near(weil_bound(1, 15).unwrap(), 4.0 * 15f64.sqrt(), 1e-12, "c=15");
        assert_near(weil_bound(1, 9).unwrap(), 9.0, 1e-12, "c=9");
        assert!(weil_bound(3, 9).is_err());
        for c in (1u64..200).step_by(7) {
            for a in 1..5i64 {
                if (a as u64).gcd(&c) != 1 {
                    continue;
                }
                let s = eval_bruteforce(a, 1, c);
                let w = weil_bound(a, c).unwrap();
                assert!(s.value.abs() <= w + s.abs_error, "Weil at ({a},1,{c})");
            }
        }
    }

    #[test]
    fn certificate_examples() {
        let c1 = certify_lower_bound(1, 1, 1).unwrap();
        assert_eq!(c1.verdict, Verdict::BoundedBelow);
        assert_near(c1.theorem_bound, 1.0, 1e-15, "c=1 theorem");

        let c45 = certify_lower_bound(1, 1, 45).unwrap();
        assert_eq!(c45.verdict, Verdict::BoundedBelow);
        assert_near(c45.theorem_bound, 0.14907119849998599, 1e-12, "c=45 theorem");
        assert_near(c45.corollary_bound, 0.14907119849998599, 1e-12, "c=45 corollary");
        assert!(eval_bruteforce(1, 1, 45).value.abs() >= c45.theorem_bound - 1e-6);

        let c9 = certify_lower_bound(2, 1, 9).unwrap();
        assert_eq!(c9.verdict, Verdict::Vanishes);
        assert!(eval_bruteforce(2, 1, 9).value.abs() <= 1e-6);

        // the worst admissible class mod 9 realizes 6 cos(4 pi / 9) = 1.0419,
        // so the d-factor must be 2/sqrt(9), not 2/sqrt(3)
        let c9r = certify_lower_bound(5, 2, 9).unwrap();
        assert_eq!(c9r.verdict, Verdict::BoundedBelow);
        let s9 = eval_bruteforce(5, 2, 9).value.abs();
        assert_near(s9, 1.0418890660015825, 1e-9, "S(5,2;9)");
        assert!(s9 >= c9r.theorem_bound - 1e-6);

        let anchors: [(u64, f64, f64); 4] = [
            (9, 0.6666666666666666, 0.6666666666666666),
            (15, 0.06454972243679028, 0.06454972243679028),
            (675, 0.15396007178390018, 0.15396007178390018),
            (1125, 0.11925695879998878, 0.11925695879998878),
        ];
        for (c, th, co) in anchors {
            let cert = certify_lower_bound(1, 1, c).unwrap();
            assert_near(cert.theorem_bound, th, 1e-12, &format!("c={c} theorem"));
            assert_near(cert.corollary_bound, co, 1e-12, &format!("c={c} corollary"));
            assert!(cert.log_corollary_bound <= cert.log_theorem_bound + 1e-12);
        }

        assert!(certify_lower_bound(1, 1, 12).is_err());
        assert!(certify_lower_bound(3, 1, 45).is_err());
    }

    #[test]
    fn certificate_bound_survives_underflow() {
        // huge squarefree part: the f64 bound underflows but the log stays finite
        let cert = certify_lower_bound(1, 1, 1999).unwrap();
        assert_eq!(cert.verdict, Verdict::BoundedBelow);
        assert!(cert.log_theorem_bound.is_finite());
        assert!(cert.log_corollary_bound <= cert.log_theorem_bound + 1e-9);
        assert_eq!(cert.theorem_bound, 0.0); // honest underflow, log carries it
    }

    #[test]
    fn norm_product_anchors() {
        let cases: [(i64, i64, u64, f64); 8] = [
            (1, 1, 1, 1.0),
            (1, 1, 3, 1.0),
            (1, 2, 3, 4.0),
            (1, 1, 5, 1.0),
            (1, 1, 7, 169.0),
            (1, 1, 13, 2809.0),
            (1, 1, 15, 1.0),
            (1, 1, 21, 28561.0),
        ];
        for (a, b, c, want) in cases {
            let got = norm_product(a, b, c).unwrap();
            let diff = (got - crate::dd::DoubleDouble::from_f64(want)).abs();
            assert!(
                diff.hi < 1e-6,
                "norm({a},{b};{c}) = {:?}, want {want}",
                got
            );
        }
        // 18-digit norm still resolves to an integer in extended precision
        let big = norm_product(1, 1, 29).unwrap();
        let want = crate::dd::DoubleDouble::from_u64(628414176545672521);
        assert!((big - want).abs().hi < 1e-6, "norm c=29: {:?}", big);

        assert!(norm_product(1, 1, 9).is_err());
        assert!(norm_product(1, 1, 31).is_err());
        assert!(norm_product(1, 1, 10).is_err());
        assert!(norm_product(3, 1, 15).is_err());
    }

    #[test]
    fn phase_distance_floor_holds_on_samples() {
        for &(p, beta) in &[(3u64, 2u32), (3, 3), (5, 2), (7, 2), (3, 4), (11, 2)] {
            let q = p.pow(beta);
            for ab in 1..q.min(60) {
                if ab % p == 0 {
                    continue;
                }
                if jacobi_symbol((ab % p) as i64, p).unwrap() != 1 {
                    continue;
                }
                let l = sqrt_mod_prime_power(ab as i64, p, beta).unwrap();
                let (floor, nz1, nz2) = phase_distance_floor(q, l);
                assert!(nz1 && nz2, "distances must be nonzero at q={q}, r={l}");
                let s = salie_closed_form(q, l);
                assert!(
                    s.abs() >= floor - 1e-6,
                    "floor violated at q={q} ab={ab}: |S|={} floor={floor}",
                    s.abs()
                );
            }
        }
    }

    #[test]
    fn imaginary_part_cancels() {
        // conjugation x -> -x pairs terms, so the sine sum telescopes to zero
        for &(a, b, c) in &[(1i64, 1i64, 13u64), (2, 5, 21), (1, 3, 40)] {
            let mut im = 0.0f64;
            for x in 1..c {
                if x.gcd(&c) != 1 {
                    continue;
                }
                let xinv = mod_inverse(x as i64, c).unwrap();
                let k = (a as i128 * x as i128 + b as i128 * xinv as i128)
                    .rem_euclid(c as i128) as f64;
                im += (2.0 * std::f64::consts::PI * k / c as f64).sin();
            }
            assert!(im.abs() < 1e-9, "imaginary residue at ({a},{b},{c})");
        }
    }
}
