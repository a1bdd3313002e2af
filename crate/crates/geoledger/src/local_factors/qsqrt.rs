//! Exact numbers a + b·√q with rational a, b.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSqrt {
    pub a: BigRational,
    pub b: BigRational,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_pow(q: u64, e: i32) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(q));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

impl QSqrt {
    pub fn zero() -> Self {
        QSqrt { a: BigRational::zero(), b: BigRational::zero() }
    }

    pub fn one() -> Self {
        QSqrt::from_rat(BigRational::one())
    }

    pub fn from_rat(a: BigRational) -> Self {
        QSqrt { a, b: BigRational::zero() }
    }

    pub fn int(n: i64) -> Self {
        QSqrt::from_rat(rat(n, 1))
    }

    /// q^{e/2} for any integer e.
    pub fn q_half_pow(q: u64, e: i32) -> Self {
        if e.rem_euclid(2) == 0 {
            QSqrt::from_rat(rat_pow(q, e / 2))
        } else {
            QSqrt { a: BigRational::zero(), b: rat_pow(q, (e - 1).div_euclid(2)) }
        }
    }

    /// q^e for an integer e.
    pub fn q_pow(q: u64, e: i32) -> Self {
        QSqrt::from_rat(rat_pow(q, e))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        QSqrt { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QSqrt { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn neg(&self) -> Self {
        QSqrt { a: -&self.a, b: -&self.b }
    }

    pub fn mul(&self, o: &Self, q: u64) -> Self {
        let qq = BigRational::from_integer(BigInt::from(q));
        QSqrt { a: &self.a * &o.a + &self.b * &o.b * qq, b: &self.a * &o.b + &self.b * &o.a }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        QSqrt { a: &self.a * r, b: &self.b * r }
    }

    pub fn to_f64(&self, q: u64) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * (q as f64).sqrt()
    }

    /// "1/2", "3*sqrt5", "1/2-3/4*sqrt5".
    pub fn render(&self, q: u64) -> String {
        let fmt = |r: &BigRational| {
            if r.is_integer() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        };
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => fmt(&self.a),
            (true, false) => format!("{}*sqrt{}", fmt(&self.b), q),
            (false, false) => {
                let sign = if self.b.is_negative() { "-" } else { "+" };
                format!("{}{}{}*sqrt{}", fmt(&self.a), sign, fmt(&self.b.abs()), q)
            }
        }
    }

    /// Display form: a perfect-square q is folded into the rational part and unit factors are dropped.
    pub fn render_pretty(&self, q: u64) -> String {
        let root = (q as f64).sqrt().round() as u64;
        if root * root == q {
            let v = &self.a + &self.b * BigRational::from_integer(BigInt::from(root));
            return QSqrt::from_rat(v).render(q);
        }
        let one = BigRational::one();
        let b = if self.b == one {
            format!("sqrt{q}")
        } else if self.b == -one {
            format!("-sqrt{q}")
        } else {
            return self.render(q);
        };
        match (self.a.is_zero(), b.strip_prefix('-')) {
            (true, _) => b,
            (false, Some(rest)) => format!("{}-{rest}", QSqrt::from_rat(self.a.clone()).render(q)),
            (false, None) => format!("{}+{b}", QSqrt::from_rat(self.a.clone()).render(q)),
        }
    }

    pub fn parse(s: &str, q: u64) -> Result<Self> {
        let bad = || Error::Parse(format!("bad coefficient '{s}'"));
        let parse_rat = |t: &str| -> Result<BigRational> {
            let t = t.trim();
            let (n, d) = match t.split_once('/') {
                Some((n, d)) => (n, d),
                None => (t, "1"),
            };
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        };
        let t = s.trim();
        let suffix = format!("*sqrt{q}");
        if let Some(body) = t.strip_suffix(&suffix) {
            let split = body.char_indices().skip(1).filter(|(_, c)| *c == '+' || *c == '-').map(|(i, _)| i).last();
            match split {
                Some(i) => {
                    let a = parse_rat(&body[..i])?;
                    let b = parse_rat(body[i..].trim_start_matches('+'))?;
                    Ok(QSqrt { a, b })
                }
                None => Ok(QSqrt { a: BigRational::zero(), b: parse_rat(body)? }),
            }
        } else if t.contains("sqrt") {
            Err(bad())
        } else {
            Ok(QSqrt::from_rat(parse_rat(t)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pretty_forms() {
        assert_eq!(QSqrt { a: rat(0, 1), b: rat(1, 5) }.render_pretty(4), "2/5");
        assert_eq!(QSqrt::q_half_pow(2, 1).render_pretty(2), "sqrt2");
        assert_eq!(QSqrt { a: rat(1, 2), b: rat(-1, 1) }.render_pretty(3), "1/2-sqrt3");
        assert_eq!(QSqrt { a: rat(0, 1), b: rat(1, 3) }.render_pretty(3), "1/3*sqrt3");
    }

    #[test]
    fn half_powers() {
        assert_eq!(QSqrt::q_half_pow(3, 1), QSqrt { a: rat(0, 1), b: rat(1, 1) });
        assert_eq!(QSqrt::q_half_pow(3, -1), QSqrt { a: rat(0, 1), b: rat(1, 3) });
        assert_eq!(QSqrt::q_half_pow(3, 4), QSqrt::int(9));
        assert_eq!(QSqrt::q_half_pow(3, -2), QSqrt::from_rat(rat(1, 3)));
        let s = QSqrt::q_half_pow(5, 1);
        assert_eq!(s.mul(&s, 5), QSqrt::int(5));
    }

    #[test]
    fn render_parse_round_trip() {
        for (a, b) in [((1, 2), (0, 1)), ((0, 1), (3, 1)), ((1, 2), (-3, 4)), ((-7, 3), (5, 9))] {
            let x = QSqrt { a: rat(a.0, a.1), b: rat(b.0, b.1) };
            let s = x.render(7);
            assert_eq!(QSqrt::parse(&s, 7).unwrap(), x, "{s}");
        }
    }
}
