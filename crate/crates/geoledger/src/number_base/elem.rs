use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Base ring tag: rational integers or Gaussian integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Rat,
    Gauss,
}

impl Ring {
    pub fn from_flag(s: &str) -> Result<Ring> {
        match s.to_ascii_lowercase().as_str() {
            "q" | "z" | "rat" => Ok(Ring::Rat),
            "qi" | "zi" | "gauss" => Ok(Ring::Gauss),
            _ => Err(Error::Parse(format!("unknown ring '{s}'"))),
        }
    }

    pub fn unit_count(self) -> u64 {
        match self {
            Ring::Rat => 2,
            Ring::Gauss => 4,
        }
    }
}

/// An integer of the base ring. For `Ring::Rat` the imaginary part is always zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElem {
    pub ring: Ring,
    pub re: i64,
    pub im: i64,
}

impl RingElem {
    pub const fn rat(a: i64) -> Self {
        RingElem { ring: Ring::Rat, re: a, im: 0 }
    }

    pub const fn gauss(a: i64, b: i64) -> Self {
        RingElem { ring: Ring::Gauss, re: a, im: b }
    }

    pub fn new(ring: Ring, a: i64, b: i64) -> Self {
        match ring {
            Ring::Rat => {
                debug_assert!(b == 0, "rational element with imaginary part");
                RingElem::rat(a)
            }
            Ring::Gauss => RingElem::gauss(a, b),
        }
    }

    pub fn from_int(ring: Ring, a: i64) -> Self {
        RingElem::new(ring, a, 0)
    }

    pub fn zero(ring: Ring) -> Self {
        RingElem::new(ring, 0, 0)
    }

    pub fn one(ring: Ring) -> Self {
        RingElem::new(ring, 1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    /// a²+b² over Z[i], |a| over Z.
    pub fn norm(&self) -> u64 {
        match self.ring {
            Ring::Rat => self.re.unsigned_abs(),
            Ring::Gauss => {
                let a = self.re as i128;
                let b = self.im as i128;
                (a * a + b * b) as u64
            }
        }
    }

    pub fn conj(&self) -> Self {
        RingElem { ring: self.ring, re: self.re, im: -self.im }
    }

    /// Units of the ring.
    pub fn units(ring: Ring) -> Vec<RingElem> {
        match ring {
            Ring::Rat => vec![RingElem::rat(1), RingElem::rat(-1)],
            Ring::Gauss => {
                vec![RingElem::gauss(1, 0), RingElem::gauss(0, 1), RingElem::gauss(-1, 0), RingElem::gauss(0, -1)]
            }
        }
    }

    /// Canonical associate: positive over Z, first quadrant (re > 0, im ≥ 0) over Z[i].
    pub fn normalized(&self) -> Self {
        if self.is_zero() {
            return *self;
        }
        match self.ring {
            Ring::Rat => RingElem::rat(self.re.abs()),
            Ring::Gauss => {
                let mut z = *self;
                while !(z.re > 0 && z.im >= 0) {
                    z = RingElem::gauss(-z.im, z.re);
                }
                z
            }
        }
    }

    /// The unit u with self = u · self.normalized().
    pub fn unit_part(&self) -> Self {
        let n = self.normalized();
        self.div_exact(&n).unwrap_or(RingElem::one(self.ring))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = RingElem::one(self.ring);
        for _ in 0..e {
            acc = acc * *self;
        }
        acc
    }

    pub fn checked_mul(&self, o: &Self) -> Option<Self> {
        let (a, b, c, d) = (self.re as i128, self.im as i128, o.re as i128, o.im as i128);
        let re = a * c - b * d;
        let im = a * d + b * c;
        if re.abs() > i64::MAX as i128 || im.abs() > i64::MAX as i128 {
            return None;
        }
        Some(RingElem { ring: self.ring, re: re as i64, im: im as i64 })
    }

    /// Exact quotient self / d, or None when d does not divide self.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        match self.ring {
            Ring::Rat => {
                if self.re % d.re == 0 {
                    Some(RingElem::rat(self.re / d.re))
                } else {
                    None
                }
            }
            Ring::Gauss => {
                let n = d.norm() as i128;
                let (a, b, c, e) = (self.re as i128, self.im as i128, d.re as i128, -(d.im as i128));
                let re = a * c - b * e;
                let im = a * e + b * c;
                if re % n == 0 && im % n == 0 {
                    Some(RingElem::gauss((re / n) as i64, (im / n) as i64))
                } else {
                    None
                }
            }
        }
    }

    pub fn divides(&self, x: &Self) -> bool {
        if self.is_zero() {
            return x.is_zero();
        }
        x.div_exact(self).is_some()
    }

    /// Euclidean division with rounded quotient; the remainder has smaller norm than d.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        match self.ring {
            Ring::Rat => {
                let q = self.re.div_euclid(d.re);
                (RingElem::rat(q), RingElem::rat(self.re.rem_euclid(d.re)))
            }
            Ring::Gauss => {
                let n = d.norm() as i128;
                let (a, b, c, e) = (self.re as i128, self.im as i128, d.re as i128, -(d.im as i128));
                let re = a * c - b * e;
                let im = a * e + b * c;
                let q = RingElem::gauss(round_div(re, n) as i64, round_div(im, n) as i64);
                let r = *self - q * *d;
                (q, r)
            }
        }
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = *self;
        let mut b = *o;
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.normalized()
    }

    pub fn coprime(&self, o: &Self) -> bool {
        self.gcd(o).is_unit()
    }

    /// Complex value.
    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re as f64, self.im as f64)
    }
}

fn round_div(x: i128, n: i128) -> i128 {
    // nearest integer to x/n for n > 0
    (2 * x + n).div_euclid(2 * n)
}

impl Add for RingElem {
    type Output = RingElem;
    fn add(self, o: RingElem) -> RingElem {
        RingElem { ring: self.ring, re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for RingElem {
    type Output = RingElem;
    fn sub(self, o: RingElem) -> RingElem {
        RingElem { ring: self.ring, re: self.re - o.re, im: self.im - o.im }
    }
}

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem { ring: self.ring, re: -self.re, im: -self.im }
    }
}

impl Mul for RingElem {
    type Output = RingElem;
    fn mul(self, o: RingElem) -> RingElem {
        RingElem { ring: self.ring, re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ring {
            Ring::Rat => write!(f, "{}", self.re),
            Ring::Gauss => {
                if self.im < 0 {
                    write!(f, "{}-{}i", self.re, -self.im)
                } else {
                    write!(f, "{}+{}i", self.re, self.im)
                }
            }
        }
    }
}

impl RingElem {
    /// Parses "7", "-3", "1+i", "2-3i", "i", "-i", "4i" in the given ring.
    pub fn parse(ring: Ring, s: &str) -> Result<RingElem> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty ring element".into()));
        }
        let bad = || Error::Parse(format!("cannot parse ring element '{s}'"));
        if !t.ends_with('i') {
            let a: i64 = t.parse().map_err(|_| bad())?;
            return Ok(RingElem::from_int(ring, a));
        }
        if ring == Ring::Rat {
            return Err(Error::Parse(format!("'{s}' is not a rational integer")));
        }
        let body = &t[..t.len() - 1];
        // split at the last sign that is not in leading position
        let split = body.char_indices().skip(1).filter(|(_, c)| *c == '+' || *c == '-').map(|(i, _)| i).last();
        let (re_s, im_s) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let re: i64 = re_s.parse().map_err(|_| bad())?;
        let im: i64 = match im_s {
            "" | "+" => 1,
            "-" => -1,
            x => x.parse().map_err(|_| bad())?,
        };
        Ok(RingElem::gauss(re, im))
    }
}

impl FromStr for RingElem {
    type Err = Error;
    fn from_str(s: &str) -> Result<RingElem> {
        if s.contains('i') {
            RingElem::parse(Ring::Gauss, s)
        } else {
            RingElem::parse(Ring::Rat, s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms() {
        assert_eq!(RingElem::gauss(1, 1).norm(), 2);
        assert_eq!(RingElem::rat(-7).norm(), 7);
        assert_eq!(RingElem::gauss(3, 4).norm(), 25);
        assert_eq!(RingElem::zero(Ring::Gauss).norm(), 0);
    }

    #[test]
    fn parse_round_trip() {
        for s in ["1+1i", "2-3i", "0+1i", "-4+0i"] {
            let z = RingElem::parse(Ring::Gauss, s).unwrap();
            assert_eq!(z.to_string(), s);
        }
        assert_eq!(RingElem::parse(Ring::Gauss, "1+i").unwrap(), RingElem::gauss(1, 1));
        assert_eq!(RingElem::parse(Ring::Gauss, "-i").unwrap(), RingElem::gauss(0, -1));
        assert_eq!(RingElem::parse(Ring::Gauss, "3").unwrap(), RingElem::gauss(3, 0));
        assert_eq!(RingElem::parse(Ring::Rat, "-12").unwrap(), RingElem::rat(-12));
        assert!(RingElem::parse(Ring::Rat, "1+i").is_err());
    }

    #[test]
    fn normalization_picks_first_quadrant() {
        let z = RingElem::gauss(-2, 3);
        let n = z.normalized();
        assert!(n.re > 0 && n.im >= 0);
        assert_eq!(n.norm(), z.norm());
        assert_eq!(z.unit_part() * n, z);
    }

    #[test]
    fn gaussian_gcd() {
        let a = RingElem::gauss(2, 1) * RingElem::gauss(1, 1);
        let b = RingElem::gauss(2, 1) * RingElem::gauss(3, 0);
        assert_eq!(a.gcd(&b), RingElem::gauss(2, 1).normalized());
    }
}
