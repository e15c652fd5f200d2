//! Integer arithmetic: factorization with deterministic primality testing,
//! multiplicative functions, powerful/squarefree splitting, modular inverses,
//! Jacobi symbols, and square roots modulo odd prime powers.

use crate::{Error, Result};
use num_integer::Integer;

/// Prime factorization `n = prod p_i^{e_i}` with primes ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

/// Decomposition `c = d * f` with `d` powerful (every prime exponent >= 2),
/// `f` squarefree, and `gcd(d, f) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PowerfulSplit {
    pub c: u64,
    pub d: u64,
    pub f: u64,
}

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the fixed witness set certifies all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Brent-cycle Pollard rho. The polynomial offset is derived from `n`, so the
/// whole factorization is deterministic.
fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n % 2 == 1 && n > 1 && !is_prime(n));
    let mut salt = 0u64;
    loop {
        let c = 1 + splitmix64(n ^ salt) % (n - 1);
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = splitmix64(n.wrapping_add(salt).wrapping_mul(0xa5a5a5a5)) % n;
        let mut y = x;
        let mut d = 1u64;
        let mut saved = x;
        let mut count = 0u32;
        'cycle: while d == 1 {
            x = f(x);
            y = f(f(y));
            if x == y {
                break 'cycle; // cycle without factor; retry with new parameters
            }
            // batch the gcd every 64 steps
            let mut prod = 1u64;
            saved = x;
            for _ in 0..64 {
                x = f(x);
                y = f(f(y));
                let diff = x.abs_diff(y);
                if diff == 0 {
                    break;
                }
                prod = mulmod(prod, diff, n);
            }
            d = prod.gcd(&n);
            count += 1;
            if count > 1 << 22 {
                break 'cycle;
            }
        }
        if d == n {
            // backtrack one batch with per-step gcds
            let mut x = saved;
            let mut yy = f(f(saved));
            d = 1;
            for _ in 0..130 {
                let diff = x.abs_diff(yy);
                d = diff.gcd(&n);
                if d != 1 && d != n {
                    break;
                }
                x = f(x);
                yy = f(f(yy));
            }
        }
        if d != 1 && d != n {
            return d;
        }
        salt = salt.wrapping_add(1);
    }
}

/// Factor `n >= 1`: trial division through 10^6, then rho on whatever is left,
/// with every reported prime passing the deterministic primality check.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::ZeroArgument("factorize"));
    }
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    for p in [2u64, 3, 5] {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    // 30-wheel over 7, 11, 13, 17, 19, 23, 29, 31, 37, ...
    const WHEEL: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut p = 7u64;
    let mut wi = 0usize;
    while p <= 1_000_000 && p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += WHEEL[wi];
        wi = (wi + 1) % WHEEL.len();
    }
    if m > 1 {
        if p * p > m {
            factors.push((m, 1));
        } else {
            // all remaining prime factors exceed 10^6; split recursively
            let mut stack = vec![m];
            let mut big: Vec<u64> = Vec::new();
            while let Some(v) = stack.pop() {
                if is_prime(v) {
                    big.push(v);
                } else {
                    let d = pollard_rho(v);
                    stack.push(d);
                    stack.push(v / d);
                }
            }
            big.sort_unstable();
            let mut i = 0;
            while i < big.len() {
                let mut j = i;
                while j < big.len() && big[j] == big[i] {
                    j += 1;
                }
                factors.push((big[i], (j - i) as u32));
                i = j;
            }
        }
    }
    factors.sort_unstable_by_key(|&(p, _)| p);
    debug_assert_eq!(
        factors
            .iter()
            .fold(1u128, |acc, &(p, e)| acc * (p as u128).pow(e)),
        n as u128
    );
    Ok(Factorization { n, factors })
}

impl Factorization {
    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * p.pow(e - 1) * (p - 1))
    }

    pub fn tau(&self) -> u64 {
        self.factors.iter().fold(1u64, |acc, &(_, e)| acc * (e as u64 + 1))
    }

    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }
}

/// Euler phi, divisor count tau, and distinct-prime count omega.
pub fn arithmetic_functions(fac: &Factorization) -> (u64, u64, u32) {
    (fac.phi(), fac.tau(), fac.omega())
}

/// Split off the powerful part (`d`, primes with exponent >= 2) from the
/// squarefree part (`f`, primes with exponent 1).
pub fn powerful_split(c: u64) -> Result<PowerfulSplit> {
    let fac = factorize(c)?;
    let mut d = 1u64;
    let mut f = 1u64;
    for &(p, e) in &fac.factors {
        if e >= 2 {
            d *= p.pow(e);
        } else {
            f *= p;
        }
    }
    Ok(PowerfulSplit { c, d, f })
}

/// Inverse of `a` modulo `n >= 1` by the extended Euclidean algorithm.
pub fn mod_inverse(a: i64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroArgument("mod_inverse modulus"));
    }
    if n == 1 {
        return Ok(0);
    }
    let a0 = (a as i128).rem_euclid(n as i128);
    let (mut r0, mut r1) = (n as i128, a0);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(Error::NotInvertible { a, n });
    }
    Ok(t0.rem_euclid(n as i128) as u64)
}

/// Jacobi symbol `(a/n)` for odd `n >= 1`; 0 when `gcd(a, n) > 1`.
pub fn jacobi_symbol(a: i64, n: u64) -> Result<i32> {
    if n == 0 || n % 2 == 0 {
        return Err(Error::EvenModulus(n));
    }
    let mut a = (a as i128).rem_euclid(n as i128) as u64;
    let mut n = n;
    let mut t = 1i32;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    Ok(if n == 1 { t } else { 0 })
}

/// Tonelli-Shanks square root modulo an odd prime `p` for a unit residue `a`.
fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if powmod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(powmod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    // smallest quadratic nonresidue; a short scan is plenty for 64-bit p
    let mut z = 2u64;
    while powmod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod(z, q, p);
    let mut t = powmod(a, q, p);
    let mut r = powmod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut t2 = t;
        let mut i = 0u32;
        while t2 != 1 {
            t2 = mulmod(t2, t2, p);
            i += 1;
        }
        let b = powmod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    Some(r)
}

/// Square root of `a` modulo `q = p^beta` (`p` an odd prime, `a` a unit),
/// via Tonelli-Shanks at the prime followed by Hensel lifting. Returns the
/// root in `[0, q/2]`, i.e. `min(l, q - l)`.
pub fn sqrt_mod_prime_power(a: i64, p: u64, beta: u32) -> Result<u64> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::NotAnOddPrime(p));
    }
    if beta == 0 {
        return Err(Error::ZeroArgument("sqrt_mod_prime_power exponent"));
    }
    let q = p
        .checked_pow(beta)
        .ok_or(Error::Overflow("prime power exceeds u64"))?;
    let a_mod = (a as i128).rem_euclid(q as i128) as u64;
    if a_mod % p == 0 {
        return Err(Error::DivisibleByPrime { a, p });
    }
    let mut r = sqrt_mod_prime(a_mod % p, p).ok_or(Error::NonResidue { a, q })?;
    // lift r from mod p^k to mod p^(k+1)
    let mut modulus = p;
    while modulus < q {
        let next = modulus * p;
        let r2 = ((r as u128 * r as u128) % next as u128) as u64;
        let diff = (a_mod % next + next - r2) % next;
        debug_assert_eq!(diff % modulus, 0);
        let t = mulmod(diff / modulus, mod_inverse((2 * r % p) as i64, p)?, p);
        r += t * modulus;
        modulus = next;
    }
    debug_assert_eq!(mulmod(r, r, q), a_mod);
    Ok(r.min(q - r))
}

/// gcd of `a`, `b`, and `c` after reducing the first two modulo `c`.
pub(crate) fn gcd3_mod(a: i64, b: i64, c: u64) -> u64 {
    let am = (a as i128).rem_euclid(c as i128) as u64;
    let bm = (b as i128).rem_euclid(c as i128) as u64;
    am.gcd(&bm).gcd(&c)
}
