//! Laurent polynomials in Z with coefficients in Q(√q).

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::qsqrt::QSqrt;
use crate::error::{Error, Result};

/// Which variable the exponents refer to: Z = q^{s−1/2} or Z = q^s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarTag {
    ZHalf,
    ZFull,
}

impl VarTag {
    pub fn name(self) -> &'static str {
        match self {
            VarTag::ZHalf => "Z_HALF",
            VarTag::ZFull => "Z_FULL",
        }
    }

    /// Z as a function of s.
    pub fn z_at(self, q: u64, s: Complex64) -> Complex64 {
        let shift = match self {
            VarTag::ZHalf => 0.5,
            VarTag::ZFull => 0.0,
        };
        ((s - shift) * (q as f64).ln()).exp()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    pub q: u64,
    pub var: VarTag,
    coeffs: BTreeMap<i32, QSqrt>,
}

impl LaurentPoly {
    pub fn zero(q: u64, var: VarTag) -> Self {
        LaurentPoly { q, var, coeffs: BTreeMap::new() }
    }

    pub fn constant(q: u64, var: VarTag, c: QSqrt) -> Self {
        Self::mono(q, var, 0, c)
    }

    pub fn mono(q: u64, var: VarTag, k: i32, c: QSqrt) -> Self {
        let mut p = Self::zero(q, var);
        p.add_term(k, &c);
        p
    }

    /// Z^k − Z^{−k}.
    pub fn z_diff(q: u64, var: VarTag, k: i32) -> Self {
        let mut p = Self::zero(q, var);
        p.add_term(k, &QSqrt::one());
        p.add_term(-k, &QSqrt::int(-1));
        p
    }

    pub fn add_term(&mut self, k: i32, c: &QSqrt) {
        let v = self.coeffs.get(&k).map(|x| x.add(c)).unwrap_or_else(|| c.clone());
        if v.is_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, v);
        }
    }

    pub fn coeff(&self, k: i32) -> QSqrt {
        self.coeffs.get(&k).cloned().unwrap_or_else(QSqrt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &QSqrt)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (k, c) in &o.coeffs {
            r.add_term(*k, c);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&QSqrt::int(-1)))
    }

    pub fn scale(&self, c: &QSqrt) -> Self {
        let mut r = Self::zero(self.q, self.var);
        for (k, v) in &self.coeffs {
            r.add_term(*k, &v.mul(c, self.q));
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.q, self.var);
        for (i, a) in &self.coeffs {
            for (j, b) in &o.coeffs {
                r.add_term(i + j, &a.mul(b, self.q));
            }
        }
        r
    }

    /// Multiply by Z^k.
    pub fn shift(&self, k: i32) -> Self {
        LaurentPoly { q: self.q, var: self.var, coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    /// Exact division by Z − Z^{−1}.
    pub fn div_z_minus_zinv(&self) -> Result<Self> {
        // multiply through by Z: divide Z·P by Z² − 1 (long division from the top)
        let mut rem = self.shift(1);
        let mut quot = Self::zero(self.q, self.var);
        while let Some(top) = rem.max_exp() {
            let lo = rem.min_exp().unwrap();
            if top - lo < 2 {
                return Err(Error::InexactDivision(format!("{self} by Z - Z^-1")));
            }
            let c = rem.coeff(top);
            quot.add_term(top - 2, &c);
            rem.add_term(top, &c.neg());
            rem.add_term(top - 2, &c);
        }
        Ok(quot)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().map(|(k, c)| z.powi(*k) * c.to_f64(self.q)).sum()
    }

    pub fn eval_at_s(&self, s: Complex64) -> Complex64 {
        self.eval(self.var.z_at(self.q, s))
    }

    /// P(Z) = P(Z^{-1}) coefficientwise.
    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().all(|(k, c)| self.coeff(-k) == *c)
    }

    pub fn require_var(&self, var: VarTag) -> Result<()> {
        if self.var == var {
            Ok(())
        } else {
            Err(Error::WrongVariableTag { expected: var.name() })
        }
    }

    /// Canonical text form: `q=3 var=Z_HALF; -1:1/2; 0:1; 1:1/2`.
    pub fn serialize(&self) -> String {
        let mut s = format!("q={} var={}", self.q, self.var.name());
        for (k, c) in &self.coeffs {
            s.push_str(&format!("; {}:{}", k, c.render(self.q)));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut parts = text.split(';');
        let head = parts.next().unwrap_or("");
        let mut q = None;
        let mut var = None;
        for tok in head.split_whitespace() {
            match tok.split_once('=') {
                Some(("q", v)) => q = v.parse::<u64>().ok(),
                Some(("var", "Z_HALF")) => var = Some(VarTag::ZHalf),
                Some(("var", "Z_FULL")) => var = Some(VarTag::ZFull),
                _ => return Err(Error::Parse(format!("bad header token '{tok}'"))),
            }
        }
        let (q, var) = match (q, var) {
            (Some(q), Some(v)) if q >= 2 => (q, v),
            _ => return Err(Error::Parse("header needs q=<int> var=<Z_HALF|Z_FULL>".into())),
        };
        let mut p = LaurentPoly::zero(q, var);
        for term in parts {
            let term = term.trim();
            if term.is_empty() {
                continue;
            }
            let (k, c) = term.split_once(':').ok_or_else(|| Error::Parse(format!("bad term '{term}'")))?;
            let k: i32 = k.trim().parse().map_err(|_| Error::Parse(format!("bad exponent '{k}'")))?;
            p.add_term(k, &QSqrt::parse(c, q)?);
        }
        Ok(p)
    }

    /// Dense f64 coefficients from min_exp to max_exp.
    pub fn dense_f64(&self) -> Option<(i32, Vec<f64>)> {
        let lo = self.min_exp()?;
        let hi = self.max_exp()?;
        Some((lo, (lo..=hi).map(|k| self.coeff(k).to_f64(self.q)).collect()))
    }

    /// Nonzero roots in Z by Aberth iteration, capped at a fixed iteration count.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let (_, c) = self.dense_f64().ok_or(Error::ZeroPolynomial)?;
        let deg = c.len() - 1;
        if deg == 0 {
            return Ok(Vec::new());
        }
        let poly = |z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a);
        let dpoly = |z: Complex64| {
            c.iter().enumerate().skip(1).rev().fold(Complex64::new(0.0, 0.0), |acc, (k, a)| acc * z + a * k as f64)
        };
        // Cauchy-type radius from the constant and leading coefficients.
        let r = (c[0].abs() / c[deg].abs()).powf(1.0 / deg as f64).max(1e-3);
        let mut z: Vec<Complex64> = (0..deg)
            .map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64 + 0.4))
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..deg {
                let pz = poly(z[i]);
                if pz.norm() == 0.0 {
                    continue;
                }
                let ratio = pz / dpoly(z[i]);
                let repel: Complex64 = (0..deg).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repel);
                if step.is_finite() {
                    z[i] -= step;
                    moved = moved.max(step.norm() / z[i].norm().max(1e-300));
                }
            }
            if moved < 1e-15 {
                break;
            }
        }
        Ok(z)
    }

    /// Human-readable rendering, e.g. `1/2*Z^-1 + 1 + 1/2*Z`.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let cs = c.render_pretty(self.q);
                match *k {
                    0 => cs,
                    1 => format!("{cs}*Z"),
                    _ => format!("{cs}*Z^{k}"),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.serialize())
    }
}
