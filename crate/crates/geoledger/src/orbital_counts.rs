//! Residue point counts N_0(r; n, l), N_∞(r; n, l) for Hecke local factors.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::local_factors::HeckeLocalParams;
use crate::number_base::{is_prime_u64, kronecker_int};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Which {
    N0,
    NInf,
}

/// θ² − bθ + a = 0 over Z_p, with the local type of Q_p(θ) recorded in `epsilon`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalQuadraticModel {
    pub p: u64,
    pub a: i64,
    pub b: i64,
    pub epsilon: i8,
}

fn ord_p(mut x: i64, p: i64) -> u32 {
    if x == 0 {
        return u32::MAX;
    }
    let mut k = 0;
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    k
}

/// Local type of θ² − bθ + a at an odd prime p when o[θ] is the maximal order; None otherwise.
pub fn classify(p: u64, a: i64, b: i64) -> Option<i8> {
    let d = b * b - 4 * a;
    let pi = p as i64;
    match ord_p(d, pi) {
        0 => Some(if kronecker_int(d, pi) == 1 { 1 } else { -1 }),
        1 => Some(0),
        _ => None,
    }
}

impl LocalQuadraticModel {
    /// All models with 0 ≤ a, b < p² of the requested type, in lexicographic order.
    pub fn search(p: u64, epsilon: i8) -> Result<Vec<LocalQuadraticModel>> {
        if p % 2 == 0 {
            return Err(Error::EvenPrimeUnsupported);
        }
        if !is_prime_u64(p) {
            return Err(Error::OutOfRange(format!("{p} is not prime")));
        }
        let lim = (p * p) as i64;
        let mut out = Vec::new();
        for b in 0..lim {
            for a in 0..lim {
                if classify(p, a, b) == Some(epsilon) {
                    out.push(LocalQuadraticModel { p, a, b, epsilon });
                }
            }
        }
        Ok(out)
    }
}

fn check_range(params: &HeckeLocalParams, r: u32) -> Result<()> {
    if params.n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    if r > params.l {
        return Err(Error::OutOfRange(format!("r = {r} exceeds l = {}", params.l)));
    }
    Ok(())
}

fn qpow(q: u64, e: u32) -> Result<u64> {
    q.checked_pow(e).ok_or(Error::Overflow)
}

pub fn count_n0_closed(params: HeckeLocalParams, r: u32) -> Result<u64> {
    check_range(&params, r)?;
    let (n, l) = (params.n, params.l);
    if r + n <= l {
        qpow(params.local.q, n - 1)
    } else {
        Ok(0)
    }
}

pub fn count_ninf_closed(params: HeckeLocalParams, r: u32) -> Result<u64> {
    check_range(&params, r)?;
    let q = params.local.q;
    let (n, l) = (params.n as i64, params.l as i64);
    let ri = r as i64;
    let tail = || qpow(q, ((n + l - ri) / 2) as u32);
    // threshold below which the generic branch gives a different value
    let shift = if params.local.epsilon == 0 { 1 } else { 0 };
    if l >= n - shift {
        if ri <= l - n {
            qpow(q, n as u32)
        } else {
            tail()
        }
    } else if ri < n - l - shift {
        if params.local.epsilon == 1 {
            Ok(2 * qpow(q, l as u32)?)
        } else {
            Ok(0)
        }
    } else {
        tail()
    }
}

/// RSO(r) = N(r; n, l)/(q^n + q^{n−1}).
pub fn rso_value(params: HeckeLocalParams, r: u32) -> Result<BigRational> {
    let n0 = count_n0_closed(params, r)?;
    let ni = count_ninf_closed(params, r)?;
    let q = params.local.q;
    let den = qpow(q, params.n)? + qpow(q, params.n - 1)?;
    Ok(BigRational::new(BigInt::from(n0 + ni), BigInt::from(den)))
}

fn modp(x: i128, m: i128) -> i128 {
    x.rem_euclid(m)
}

/// Enumerates the defining congruences directly.
///
/// N_0: α ∈ p·(Z/p^n) with 1 − αb p^r + α² a p^{2r} ≡ 0 mod p^{n+r−l}.
/// N_∞: α ∈ Z/p^n with a p^{2r} − αb p^r + α² ≡ 0 mod p^{n+r−l}.
/// For split models these are the norm forms (1 − αθp^r)(1 − αθ̄p^r) and (α − θp^r)(α − θ̄p^r),
/// equivalent to the valuation and α(α + p^r) conditions after a unit rescaling of α.
pub fn count_bruteforce(model: LocalQuadraticModel, params: HeckeLocalParams, r: u32, which: Which) -> Result<u64> {
    check_range(&params, r)?;
    let p = model.p;
    if p % 2 == 0 {
        return Err(Error::EvenPrimeUnsupported);
    }
    if params.local.q != p || params.local.epsilon != model.epsilon {
        return Err(Error::OutOfRange("model does not match the local type".into()));
    }
    let n = params.n;
    let pn = qpow(p, n)?;
    if qpow(p, n + r)? > 100_000_000 {
        return Err(Error::TooLarge(format!("p^(n+r) = {p}^{}", n + r)));
    }
    let e = n as i64 + r as i64 - params.l as i64;
    let range: Box<dyn Iterator<Item = u64>> = match which {
        Which::N0 => Box::new((0..pn / p).map(|k| k * p)),
        Which::NInf => Box::new(0..pn),
    };
    if e <= 0 {
        return Ok(range.count() as u64);
    }
    let m = qpow(p, e as u32)? as i128;
    let pr = modp(qpow(p, r)? as i128, m);
    let (a, b) = (modp(model.a as i128, m), modp(model.b as i128, m));
    let mut count = 0;
    for alpha in range {
        let al = modp(alpha as i128, m);
        let v = match which {
            Which::N0 => {
                let x = modp(al * pr, m);
                1 - modp(x * b, m) + modp(modp(x * x, m) * a, m)
            }
            Which::NInf => modp(modp(pr * pr, m) * a, m) - modp(modp(al * b, m) * pr, m) + modp(al * al, m),
        };
        if modp(v, m) == 0 {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_factors::LocalType;

    fn hp(q: u64, e: i8, l: u32, n: u32) -> HeckeLocalParams {
        HeckeLocalParams { local: LocalType { q, epsilon: e }, l, n }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(count_n0_closed(hp(3, -1, 0, 1), 0).unwrap(), 0);
        assert_eq!(count_n0_closed(hp(3, -1, 2, 1), 1).unwrap(), 1);
        assert_eq!(count_n0_closed(hp(3, -1, 3, 2), 1).unwrap(), 3);
        assert_eq!(count_ninf_closed(hp(3, -1, 0, 1), 0).unwrap(), 0);
        assert_eq!(count_ninf_closed(hp(3, 1, 0, 1), 0).unwrap(), 2);
        assert_eq!(count_ninf_closed(hp(3, -1, 2, 1), 2).unwrap(), 1);
        assert!(matches!(count_n0_closed(hp(3, -1, 1, 1), 2), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn rso_examples() {
        // q^n + q^{n−1} = 3 at q = 2, n = 1
        assert_eq!(rso_value(hp(2, -1, 1, 1), 1).unwrap(), BigRational::new(1.into(), 3.into()));
        // l ≥ n: N_0 = 1, N_∞ = q
        assert_eq!(rso_value(hp(3, 1, 1, 1), 0).unwrap(), BigRational::new(1.into(), 1.into()));
        assert_eq!(rso_value(hp(3, 1, 0, 1), 0).unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(rso_value(hp(3, -1, 0, 2), 0).unwrap(), BigRational::new(0.into(), 1.into()));
    }

    #[test]
    fn bruteforce_examples() {
        let m = LocalQuadraticModel { p: 3, a: 1, b: 0, epsilon: -1 };
        assert_eq!(count_bruteforce(m, hp(3, -1, 0, 1), 0, Which::NInf).unwrap(), 0);
        let m = LocalQuadraticModel { p: 5, a: -1, b: 0, epsilon: 1 };
        assert_eq!(count_bruteforce(m, hp(5, 1, 0, 1), 0, Which::NInf).unwrap(), 2);
        assert_eq!(count_bruteforce(m, hp(5, 1, 0, 1), 0, Which::N0).unwrap(), 0);
        let m2 = LocalQuadraticModel { p: 2, a: 1, b: 1, epsilon: -1 };
        assert_eq!(count_bruteforce(m2, hp(2, -1, 0, 1), 0, Which::N0), Err(Error::EvenPrimeUnsupported));
    }

    #[test]
    fn models_exist_for_each_type() {
        for p in [3, 5, 7] {
            for e in [-1, 0, 1] {
                assert!(LocalQuadraticModel::search(p, e).unwrap().len() >= 3);
            }
        }
    }

    #[test]
    fn oracle_agrees_on_small_grid() {
        for e in [-1i8, 0, 1] {
            for m in LocalQuadraticModel::search(3, e).unwrap().into_iter().take(3) {
                for n in 1..=3 {
                    for l in 0..=3 {
                        let params = hp(3, e, l, n);
                        for r in 0..=l {
                            assert_eq!(
                                count_bruteforce(m, params, r, Which::N0).unwrap(),
                                count_n0_closed(params, r).unwrap()
                            );
                            assert_eq!(
                                count_bruteforce(m, params, r, Which::NInf).unwrap(),
                                count_ninf_closed(params, r).unwrap(),
                                "{m:?} {params:?} r={r}"
                            );
                        }
                    }
                }
            }
        }
    }
}
