//! Complete residue systems for o/mo, via a Hermite basis of the ideal mo.

use super::elem::{Ring, RingElem};

/// Residues modulo m: x + y·i with 0 ≤ x < a, 0 ≤ y < g, where the ideal
/// (m) has basis (a, 0), (c, g) as a lattice in Z².
#[derive(Clone, Debug)]
pub struct Residues {
    pub modulus: RingElem,
    a: i64,
    c: i64,
    g: i64,
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

impl Residues {
    pub fn new(m: RingElem) -> Residues {
        assert!(!m.is_zero(), "zero modulus");
        match m.ring {
            Ring::Rat => Residues { modulus: m, a: m.re.abs(), c: 0, g: 1 },
            Ring::Gauss => {
                let (ma, mb) = (m.re, m.im);
                // u·mb + v·ma = g
                let (g, u, v) = ext_gcd(mb, ma);
                let c = u * ma - v * mb;
                let a = (m.norm() / g as u64) as i64;
                Residues { modulus: m, a, c: c.rem_euclid(a), g }
            }
        }
    }

    pub fn len(&self) -> u64 {
        (self.a as u64) * (self.g as u64)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn reduce(&self, z: RingElem) -> RingElem {
        match z.ring {
            Ring::Rat => RingElem::rat(z.re.rem_euclid(self.a)),
            Ring::Gauss => {
                let k = z.im.div_euclid(self.g);
                let x = (z.re as i128 - k as i128 * self.c as i128).rem_euclid(self.a as i128) as i64;
                RingElem::gauss(x, z.im - k * self.g)
            }
        }
    }

    /// Index of a reduced residue in 0..len().
    pub fn index(&self, z: RingElem) -> u64 {
        let r = self.reduce(z);
        (r.im as u64) * (self.a as u64) + r.re as u64
    }

    pub fn element(&self, idx: u64) -> RingElem {
        let x = (idx % self.a as u64) as i64;
        let y = (idx / self.a as u64) as i64;
        RingElem::new(self.modulus.ring, x, y)
    }

    pub fn iter(&self) -> impl Iterator<Item = RingElem> + '_ {
        (0..self.len()).map(move |i| self.element(i))
    }

    pub fn mul(&self, x: RingElem, y: RingElem) -> RingElem {
        let (x, y) = (self.reduce(x), self.reduce(y));
        let (a, b, c, d) = (x.re as i128, x.im as i128, y.re as i128, y.im as i128);
        self.reduce_wide(a * c - b * d, a * d + b * c, x.ring)
    }

    fn reduce_wide(&self, re: i128, im: i128, ring: Ring) -> RingElem {
        match ring {
            Ring::Rat => RingElem::rat(re.rem_euclid(self.a as i128) as i64),
            Ring::Gauss => {
                let k = im.div_euclid(self.g as i128);
                let x = (re - k * self.c as i128).rem_euclid(self.a as i128) as i64;
                RingElem::gauss(x, (im - k * self.g as i128) as i64)
            }
        }
    }

    pub fn pow(&self, x: RingElem, mut e: u64) -> RingElem {
        let mut base = self.reduce(x);
        let mut acc = self.reduce(RingElem::one(x.ring));
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero_mod(&self, z: RingElem) -> bool {
        self.reduce(z).is_zero()
    }

    /// Multiplicative inverse modulo m, if it exists.
    pub fn inverse(&self, x: RingElem) -> Option<RingElem> {
        let x = self.reduce(x);
        match x.ring {
            Ring::Rat => {
                let (g, u, _) = ext_gcd(x.re, self.a);
                if g == 1 {
                    Some(RingElem::rat(u.rem_euclid(self.a)))
                } else {
                    None
                }
            }
            Ring::Gauss => {
                // Extended Euclid in Z[i].
                let (mut r0, mut r1) = (self.modulus, x);
                let (mut s0, mut s1) = (RingElem::gauss(0, 0), RingElem::gauss(1, 0));
                while !r1.is_zero() {
                    let (q, r) = r0.div_rem(&r1);
                    r0 = r1;
                    r1 = r;
                    let s = s0 - q * s1;
                    s0 = s1;
                    s1 = s;
                }
                if !r0.is_unit() {
                    return None;
                }
                let uinv = RingElem::one(Ring::Gauss).div_exact(&r0)?;
                Some(self.reduce(s0 * uinv))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_residues_are_complete_and_distinct() {
        for m in [RingElem::gauss(1, 1), RingElem::gauss(2, 1), RingElem::gauss(3, 0), RingElem::gauss(4, 6)] {
            let res = Residues::new(m);
            assert_eq!(res.len(), m.norm());
            let mut seen = std::collections::HashSet::new();
            for a in -6..6 {
                for b in -6..6 {
                    let z = RingElem::gauss(a, b);
                    let r = res.reduce(z);
                    assert!(m.divides(&(z - r)));
                    seen.insert(r);
                }
            }
            assert!(seen.len() as u64 <= m.norm());
            for (i, e) in res.iter().enumerate() {
                assert_eq!(res.index(e), i as u64);
                assert_eq!(res.reduce(e), e);
            }
        }
    }

    #[test]
    fn inverses() {
        let res = Residues::new(RingElem::gauss(3, 2));
        for z in res.iter().skip(1) {
            let inv = res.inverse(z).unwrap();
            assert_eq!(res.mul(z, inv), res.reduce(RingElem::gauss(1, 0)));
        }
        let r = Residues::new(RingElem::rat(12));
        assert_eq!(r.inverse(RingElem::rat(5)), Some(RingElem::rat(5)));
        assert_eq!(r.inverse(RingElem::rat(4)), None);
    }
}
