//! Quadratic symbols and fundamental discriminants over Z and Z[i].

use super::elem::{Ring, RingElem};
use super::factor::{factorize, Factorization};
use super::residue::Residues;
use crate::error::{Error, Result};

/// δ = D·l² with D fundamental.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DiscriminantData {
    pub delta: RingElem,
    pub fundamental: RingElem,
    pub conductor: RingElem,
}

/// Kronecker symbol (a/n) for rational integers.
pub fn kronecker_int(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let mut v = 0;
    while n % 2 == 0 {
        n /= 2;
        v += 1;
    }
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    // Jacobi (a/n) for odd n > 0
    let mut a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Whether x² ≡ d (mod m) is solvable, by enumeration of o/m.
pub fn is_square_mod(d: RingElem, m: RingElem) -> bool {
    let res = Residues::new(m);
    let target = res.reduce(d);
    let found = res.iter().any(|x| res.mul(x, x) == target);
    found
}

/// Whether d is a square in the fraction field (d ≠ 0).
pub fn is_global_square(d: &RingElem) -> bool {
    if d.is_zero() {
        return true;
    }
    match d.ring {
        Ring::Rat => {
            if d.re < 0 {
                return false;
            }
            let r = (d.re as f64).sqrt().round() as i64;
            (r - 1..=r + 1).any(|s| s >= 0 && s * s == d.re)
        }
        Ring::Gauss => {
            let f = factorize(d).expect("nonzero");
            f.factors.iter().all(|(_, e)| e % 2 == 0)
                && (f.unit == RingElem::gauss(1, 0) || f.unit == RingElem::gauss(-1, 0))
        }
    }
}

fn two_prime(ring: Ring) -> RingElem {
    match ring {
        Ring::Rat => RingElem::rat(2),
        Ring::Gauss => RingElem::gauss(1, 1),
    }
}

/// Decomposes δ = D·l² with D the discriminant of the maximal order of F(√δ).
pub fn fundamental_discriminant(delta: &RingElem) -> Result<DiscriminantData> {
    if delta.is_zero() || is_global_square(delta) {
        return Err(Error::SquareDelta(delta.to_string()));
    }
    let ring = delta.ring;
    let f = factorize(delta)?;
    let two = two_prime(ring);
    let four = RingElem::from_int(ring, 4);
    let mut l = RingElem::one(ring);
    let mut e2 = 0;
    for (p, e) in &f.factors {
        if *p == two {
            e2 = *e;
        } else {
            l = l * p.pow(e / 2);
        }
    }
    let core = delta.div_exact(&(l * l)).expect("divides");
    for j in (0..=e2 / 2).rev() {
        let t = two.pow(j);
        let d = core.div_exact(&(t * t)).expect("divides");
        if is_square_mod(d, four) {
            let cond = (l * t).normalized();
            let fund = delta.div_exact(&(cond * cond)).expect("divides");
            return Ok(DiscriminantData { delta: *delta, fundamental: fund, conductor: cond });
        }
    }
    Err(Error::NonFundamental(format!("{delta} is not a discriminant (not a square mod 4)")))
}

pub fn is_fundamental(d: &RingElem) -> bool {
    match fundamental_discriminant(d) {
        Ok(dd) => dd.conductor.is_unit() && is_square_mod(*d, RingElem::from_int(d.ring, 4)),
        Err(_) => false,
    }
}

/// The quadratic character of F(√D)/F at the prime p (D fundamental).
pub fn local_symbol(d: &RingElem, p: &RingElem) -> i32 {
    if p.divides(d) {
        return 0;
    }
    match d.ring {
        Ring::Rat => kronecker_int(d.re, p.re.abs()),
        Ring::Gauss => {
            if p.norm() == 2 {
                // unit at (1+i): split iff a square modulo 4(1+i)
                let m = RingElem::gauss(1, 1).pow(5);
                if is_square_mod(*d, m) {
                    1
                } else {
                    -1
                }
            } else {
                let res = Residues::new(*p);
                let v = res.pow(*d, (p.norm() - 1) / 2);
                if v == res.reduce(RingElem::gauss(1, 0)) {
                    1
                } else {
                    -1
                }
            }
        }
    }
}

/// χ_D(n) extended multiplicatively over the factorization of n.
pub fn kronecker_from_factorization(d: &RingElem, f: &Factorization) -> i32 {
    let mut acc = 1;
    for (p, e) in &f.factors {
        let s = local_symbol(d, p);
        if s == 0 {
            return 0;
        }
        if e % 2 == 1 {
            acc *= s;
        }
    }
    acc
}

/// χ_D(n): the Kronecker symbol over Z, the quadratic residue symbol over Z[i].
pub fn kronecker(d: &RingElem, n: &RingElem) -> Result<i32> {
    if !is_fundamental(d) {
        return Err(Error::NonFundamental(d.to_string()));
    }
    if n.is_zero() {
        return Ok(if d.is_unit() { 1 } else { 0 });
    }
    match d.ring {
        Ring::Rat => Ok(kronecker_int(d.re, n.re.abs())),
        Ring::Gauss => Ok(kronecker_from_factorization(d, &factorize(n)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_examples() {
        let five = RingElem::rat(5);
        assert_eq!(kronecker(&five, &RingElem::rat(2)).unwrap(), -1);
        assert_eq!(kronecker(&five, &RingElem::rat(4)).unwrap(), 1);
        assert_eq!(kronecker(&five, &RingElem::rat(1)).unwrap(), 1);
        assert_eq!(kronecker(&RingElem::rat(8), &RingElem::rat(2)).unwrap(), 0);
        assert!(kronecker(&RingElem::rat(3), &RingElem::rat(2)).is_err());
    }

    #[test]
    fn fundamental_examples() {
        let d = fundamental_discriminant(&RingElem::rat(5)).unwrap();
        assert_eq!((d.fundamental.re, d.conductor.re), (5, 1));
        let d = fundamental_discriminant(&RingElem::rat(32)).unwrap();
        assert_eq!((d.fundamental.re, d.conductor.re), (8, 2));
        let d = fundamental_discriminant(&RingElem::rat(12)).unwrap();
        assert_eq!((d.fundamental.re, d.conductor.re), (12, 1));
        let d = fundamental_discriminant(&RingElem::rat(-4)).unwrap();
        assert_eq!((d.fundamental.re, d.conductor.re), (-4, 1));
        assert!(matches!(fundamental_discriminant(&RingElem::rat(9)), Err(Error::SquareDelta(_))));
    }

    #[test]
    fn gaussian_discriminants() {
        // 12 = 3·2² over Z[i]; 3 ≡ −1 ≡ i² mod 4 so D = 3, l = 2 up to units
        let d = fundamental_discriminant(&RingElem::gauss(12, 0)).unwrap();
        assert_eq!(d.conductor.norm(), 4);
        assert_eq!(d.fundamental.norm(), 9);
        // −4 = (2i)² is a square in Q(i)
        assert!(fundamental_discriminant(&RingElem::gauss(-4, 0)).is_err());
        // 2 is not a square mod 4; 8 = −4i·(1+i)² with −4i fundamental
        assert!(matches!(fundamental_discriminant(&RingElem::gauss(2, 0)), Err(Error::NonFundamental(_))));
        let d = fundamental_discriminant(&RingElem::gauss(8, 0)).unwrap();
        assert_eq!(d.conductor.norm(), 2);
        assert_eq!(d.fundamental.norm(), 16);
    }

    #[test]
    fn gaussian_local_symbol_matches_splitting() {
        // Q(i)(√5) ⊇ Q(√5): 5 ≡ 1 mod (1+i)^5? compare with direct residue counts
        let d = RingElem::gauss(5, 0);
        for p in [RingElem::gauss(3, 0), RingElem::gauss(2, 3), RingElem::gauss(7, 0)] {
            let res = Residues::new(p);
            let sq = res.iter().filter(|x| !x.is_zero()).any(|x| res.mul(x, x) == res.reduce(d));
            assert_eq!(local_symbol(&d, &p), if sq { 1 } else { -1 });
        }
    }
}
