use super::elem::{Ring, RingElem};
use crate::error::{Error, Result};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Trial-division factorization of a positive integer, primes ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Smallest-prime-factor table for fast factorization of many small integers.
pub struct Sieve {
    spf: Vec<u32>,
}

impl Sieve {
    pub fn new(limit: usize) -> Sieve {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Sieve { spf }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn factor(&self, mut n: u64) -> Vec<(u64, u32)> {
        if n > self.limit() {
            return factor_u64(n);
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }
}

/// A Gaussian prime of norm p for a rational prime p ≡ 1 mod 4 (normalized).
pub fn gaussian_prime_above(p: u64) -> RingElem {
    debug_assert!(p % 4 == 1);
    let mut c = 2u64;
    let x = loop {
        let x = pow_mod(c, (p - 1) / 4, p);
        if mul_mod(x, x, p) == p - 1 {
            break x;
        }
        c += 1;
    };
    RingElem::gauss(p as i64, 0).gcd(&RingElem::gauss(x as i64, 1))
}

/// Primality in the ring: prime |a| over Z; over Z[i] prime norm, or an associate
/// of a rational prime ≡ 3 mod 4.
pub fn is_prime(x: &RingElem) -> bool {
    match x.ring {
        Ring::Rat => is_prime_u64(x.re.unsigned_abs()),
        Ring::Gauss => {
            let n = x.norm();
            if is_prime_u64(n) {
                return true;
            }
            if x.re == 0 || x.im == 0 {
                let a = (x.re + x.im).unsigned_abs();
                return is_prime_u64(a) && a % 4 == 3;
            }
            false
        }
    }
}

/// unit · Π prime^exponent, primes normalized and pairwise non-associate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: RingElem,
    pub factors: Vec<(RingElem, u32)>,
}

impl Factorization {
    pub fn product(&self) -> RingElem {
        let mut acc = self.unit;
        for (p, e) in &self.factors {
            acc = acc * p.pow(*e);
        }
        acc
    }

    /// Exponent of the (normalized) prime p.
    pub fn ord(&self, p: &RingElem) -> u32 {
        let pn = p.normalized();
        self.factors.iter().find(|(q, _)| *q == pn).map(|(_, e)| *e).unwrap_or(0)
    }
}

/// Rational primes p | n together with the Gaussian primes above them.
fn gaussian_primes_over(p: u64) -> Vec<RingElem> {
    if p == 2 {
        vec![RingElem::gauss(1, 1)]
    } else if p % 4 == 3 {
        vec![RingElem::gauss(p as i64, 0)]
    } else {
        let pi = gaussian_prime_above(p);
        vec![pi, pi.conj().normalized()]
    }
}

pub fn factorize(x: &RingElem) -> Result<Factorization> {
    factorize_with(x, None)
}

pub fn factorize_with(x: &RingElem, sieve: Option<&Sieve>) -> Result<Factorization> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    let nf = match sieve {
        Some(s) => s.factor(x.norm()),
        None => factor_u64(x.norm()),
    };
    match x.ring {
        Ring::Rat => Ok(Factorization {
            unit: RingElem::rat(x.re.signum()),
            factors: nf.into_iter().map(|(p, e)| (RingElem::rat(p as i64), e)).collect(),
        }),
        Ring::Gauss => {
            let mut rest = *x;
            let mut factors = Vec::new();
            for (p, _) in nf {
                for pi in gaussian_primes_over(p) {
                    let mut e = 0;
                    while let Some(q) = rest.div_exact(&pi) {
                        rest = q;
                        e += 1;
                    }
                    if e > 0 {
                        factors.push((pi, e));
                    }
                }
            }
            debug_assert!(rest.is_unit());
            Ok(Factorization { unit: rest, factors })
        }
    }
}

/// Möbius function of the ideal (x).
pub fn mobius(x: &RingElem) -> i64 {
    let f = factorize(x).expect("nonzero");
    if f.factors.iter().any(|(_, e)| *e > 1) {
        0
    } else if f.factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// |o/(x)^×| = Nr(x)·Π(1 − Nr(p)^{-1}).
pub fn euler_phi(x: &RingElem) -> u64 {
    let f = factorize(x).expect("nonzero");
    let mut acc = 1u64;
    for (p, e) in f.factors {
        let np = p.norm();
        acc *= np.pow(e - 1) * (np - 1);
    }
    acc
}

/// Number of ideal divisors of (x).
pub fn divisor_count(x: &RingElem) -> u64 {
    let f = factorize(x).expect("nonzero");
    f.factors.iter().map(|(_, e)| (*e as u64) + 1).product()
}

/// All normalized ideal divisors of (x).
pub fn divisors(x: &RingElem) -> Vec<RingElem> {
    let f = factorize(x).expect("nonzero");
    let mut out = vec![RingElem::one(x.ring)];
    for (p, e) in f.factors {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut pp = RingElem::one(x.ring);
            for _ in 0..=e {
                next.push((*d * pp).normalized());
                pp = pp * p;
            }
        }
        out = next;
    }
    out.sort_by_key(|d| (d.norm(), d.re, d.im));
    out
}

/// Normalized representatives of all nonzero ideals of norm ≤ limit, ordered by norm.
pub fn ideals_up_to(ring: Ring, limit: u64) -> Vec<RingElem> {
    let mut out = Vec::new();
    match ring {
        Ring::Rat => {
            for n in 1..=limit as i64 {
                out.push(RingElem::rat(n));
            }
        }
        Ring::Gauss => {
            let r = (limit as f64).sqrt() as i64 + 1;
            for a in 1..=r {
                for b in 0..=r {
                    let z = RingElem::gauss(a, b);
                    if z.norm() <= limit {
                        out.push(z);
                    }
                }
            }
            out.sort_by_key(|d| (d.norm(), d.re, d.im));
        }
    }
    out
}
