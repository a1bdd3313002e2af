//! Quadratic Dirichlet L-values: truncated character sums and the class number oracle.

use std::collections::HashMap;

use num_complex::Complex64;

use super::elem::{Ring, RingElem};
use super::factor::{factorize_with, ideals_up_to, Sieve};
use super::quadratic::{is_fundamental, kronecker_int, local_symbol};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LMethod {
    CharSum,
    ClassNumber,
}

/// Class number formula normalization, L(1,χ_D) = K·h·log ε/√D, calibrated on
/// D ∈ {5, 8, 13} with h the wide class number and ε the fundamental unit.
pub const CLASS_NUMBER_CONSTANT: f64 = 2.0;

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Reduced primitive indefinite forms (a, b, c) of discriminant D > 0.
pub fn reduced_forms(d: i64) -> Vec<(i64, i64, i64)> {
    let s = isqrt(d as u64) as i64;
    let mut out = Vec::new();
    for b in 1..=s {
        if (b * b - d) % 4 != 0 || b * b >= d {
            continue;
        }
        let m = (d - b * b) / 4; // = −ac > 0
        for a_abs in 1..=m {
            if m % a_abs != 0 {
                continue;
            }
            let two_a = 2 * a_abs;
            let lower_ok = (two_a + b) * (two_a + b) > d;
            let upper_ok = two_a - b <= 0 || (two_a - b) * (two_a - b) < d;
            if !(lower_ok && upper_ok) {
                continue;
            }
            for sign in [1i64, -1] {
                let a = sign * a_abs;
                let c = -m / a;
                if gcd(gcd(a, b), c) == 1 {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

fn rho_step(d: i64, s: i64, f: (i64, i64, i64)) -> (i64, i64, i64) {
    let (_, b, c) = f;
    let m = 2 * c.abs();
    let b2 = s - (s + b).rem_euclid(m);
    let a2 = (b2 * b2 - d) / (4 * c);
    (c, b2, a2)
}

/// Number of cycles of reduced forms (the narrow class number).
pub fn form_cycles(d: i64) -> u64 {
    let forms = reduced_forms(d);
    let s = isqrt(d as u64) as i64;
    let mut seen = std::collections::HashSet::new();
    let mut cycles = 0;
    for f in &forms {
        if seen.contains(f) {
            continue;
        }
        cycles += 1;
        let mut g = *f;
        loop {
            seen.insert(g);
            g = rho_step(d, s, g);
            if g == *f {
                break;
            }
        }
    }
    cycles
}

/// Fundamental unit of the maximal order of Q(√D): (log ε, norm of ε).
pub fn fundamental_unit(d: i64) -> (f64, i32) {
    let s = isqrt(d as u64) as i64;
    let sq = (d as f64).sqrt();
    let (mut p, mut q) = (if d % 2 == 0 { 0 } else { 1 }, 2i64);
    // first step: leave the possibly non-reduced start
    let a0 = (p + s).div_euclid(q);
    p = a0 * q - p;
    q = (d - p * p) / q;
    let start = (p, q);
    let mut log_eps = 0.0;
    let mut period = 0;
    loop {
        log_eps += ((p as f64 + sq) / q as f64).ln();
        period += 1;
        let a = (p + s).div_euclid(q);
        let p2 = a * q - p;
        let q2 = (d - p2 * p2) / q;
        p = p2;
        q = q2;
        if (p, q) == start {
            break;
        }
    }
    (log_eps, if period % 2 == 0 { 1 } else { -1 })
}

/// (h, log ε): wide class number and log of the fundamental unit, for D > 0 fundamental over Q.
pub fn class_number_and_unit(d: &RingElem) -> Result<(u64, f64)> {
    if d.ring != Ring::Rat {
        return Err(Error::UnsupportedPoint("class number oracle is over Q only".into()));
    }
    if d.re <= 0 {
        return Err(Error::NegativeDiscriminant);
    }
    if !is_fundamental(d) {
        return Err(Error::NonFundamental(d.to_string()));
    }
    let narrow = form_cycles(d.re);
    let (log_eps, nrm) = fundamental_unit(d.re);
    let h = if nrm == -1 { narrow } else { narrow / 2 };
    Ok((h, log_eps))
}

fn n_pow_neg_s(n: f64, s: Complex64) -> Complex64 {
    (-s * n.ln()).exp()
}

fn char_sum_rat(s: Complex64, d: i64, truncation: u64) -> Result<Complex64> {
    let period = d.unsigned_abs().max(1);
    let m = truncation.div_ceil(period) * period;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..=m {
        let c = kronecker_int(d, n as i64);
        if c != 0 {
            acc += n_pow_neg_s(n as f64, s) * c as f64;
        }
    }
    let mf = m as f64;
    if period == 1 {
        if (s - 1.0).norm() < 1e-12 {
            return Err(Error::PoleAtS("1".into()));
        }
        // Euler-Maclaurin tail of ζ
        let tail =
            (-(s - 1.0) * mf.ln()).exp() / (s - 1.0) - n_pow_neg_s(mf, s) * 0.5 + s * n_pow_neg_s(mf, s + 1.0) / 12.0;
        return Ok(acc + tail);
    }
    // Abel tail with the periodic partial sums replaced by their mean
    let mut partial = 0i64;
    let mut total = 0i64;
    for r in 1..=period {
        partial += kronecker_int(d, (m + r) as i64) as i64;
        total += partial;
    }
    let mean = total as f64 / period as f64;
    Ok(acc + n_pow_neg_s(mf + 1.0, s) * mean)
}

fn char_sum_gauss(s: Complex64, d: &RingElem, truncation: u64) -> Result<Complex64> {
    if d.is_unit() {
        // ζ_{Q(i)}(s) = ζ(s)·L(s, χ_{−4})
        return Ok(char_sum_rat(s, 1, truncation)? * char_sum_rat(s, -4, truncation)?);
    }
    let sieve = Sieve::new(truncation as usize);
    let mut cache: HashMap<RingElem, i32> = HashMap::new();
    let mut acc = Complex64::new(0.0, 0.0);
    for a in ideals_up_to(Ring::Gauss, truncation) {
        let f = factorize_with(&a, Some(&sieve))?;
        let mut chi = 1;
        for (p, e) in &f.factors {
            let sp = *cache.entry(*p).or_insert_with(|| local_symbol(d, p));
            if sp == 0 {
                chi = 0;
                break;
            }
            if e % 2 == 1 {
                chi *= sp;
            }
        }
        if chi != 0 {
            acc += n_pow_neg_s(a.norm() as f64, s) * chi as f64;
        }
    }
    Ok(acc)
}

/// L(s, χ_D) by a truncated character sum or, at s = 1 over Q with D > 0, by the class number formula.
pub fn dirichlet_l(s: Complex64, d: &RingElem, method: LMethod, truncation: u64) -> Result<Complex64> {
    match method {
        LMethod::ClassNumber => {
            if d.ring != Ring::Rat || d.re <= 0 || (s - 1.0).norm() > 1e-14 {
                return Err(Error::UnsupportedPoint(format!("CLASS_NUMBER at s={s}, D={d}")));
            }
            if d.re == 1 {
                return Err(Error::PoleAtS("1".into()));
            }
            let (h, log_eps) = class_number_and_unit(d)?;
            let v = CLASS_NUMBER_CONSTANT * h as f64 * log_eps / (d.re as f64).sqrt();
            Ok(Complex64::new(v, 0.0))
        }
        LMethod::CharSum => {
            if s.re < 1.0 {
                return Err(Error::ConvergenceRegion(format!("Re(s) = {} < 1", s.re)));
            }
            match d.ring {
                Ring::Rat => char_sum_rat(s, d.re, truncation),
                Ring::Gauss => char_sum_gauss(s, d, truncation),
            }
        }
    }
}

/// L(1, χ_D) over Q by the fastest exact route available.
pub fn l_at_one_rat(d: i64) -> Result<f64> {
    if d > 1 {
        Ok(dirichlet_l(Complex64::new(1.0, 0.0), &RingElem::rat(d), LMethod::ClassNumber, 0)?.re)
    } else {
        Ok(dirichlet_l(Complex64::new(1.0, 0.0), &RingElem::rat(d), LMethod::CharSum, 1_000_000)?.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    #[test]
    fn class_numbers_small() {
        assert_eq!(class_number_and_unit(&RingElem::rat(5)).unwrap().0, 1);
        assert_eq!(class_number_and_unit(&RingElem::rat(8)).unwrap().0, 1);
        assert_eq!(class_number_and_unit(&RingElem::rat(12)).unwrap().0, 1);
        // Q(√10) and Q(√15) have class number 2
        assert_eq!(class_number_and_unit(&RingElem::rat(40)).unwrap().0, 2);
        assert_eq!(class_number_and_unit(&RingElem::rat(60)).unwrap().0, 2);
        let (_, le) = class_number_and_unit(&RingElem::rat(5)).unwrap();
        assert!((le - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-14);
        let (_, le) = class_number_and_unit(&RingElem::rat(12)).unwrap();
        assert!((le - (2.0 + 3f64.sqrt()).ln()).abs() < 1e-14);
        assert_eq!(class_number_and_unit(&RingElem::rat(-4)), Err(Error::NegativeDiscriminant));
    }

    #[test]
    fn l_of_five() {
        let v = dirichlet_l(ONE, &RingElem::rat(5), LMethod::ClassNumber, 0).unwrap().re;
        assert!((v - 0.430409).abs() < 1e-6);
        let w = dirichlet_l(ONE, &RingElem::rat(5), LMethod::CharSum, 1_000_000).unwrap().re;
        assert!((v - w).abs() < 1e-5);
    }

    #[test]
    fn calibration_discriminants_agree() {
        for d in [5, 8, 13] {
            let a = dirichlet_l(ONE, &RingElem::rat(d), LMethod::ClassNumber, 0).unwrap().re;
            let b = dirichlet_l(ONE, &RingElem::rat(d), LMethod::CharSum, 200_000).unwrap().re;
            assert!((a - b).abs() < 1e-6, "D={d}: {a} vs {b}");
        }
    }

    #[test]
    fn zeta_two() {
        let z = dirichlet_l(Complex64::new(2.0, 0.0), &RingElem::rat(1), LMethod::CharSum, 1000).unwrap();
        assert!((z.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-9);
    }

    #[test]
    fn negative_discriminant_l_value() {
        // L(1, χ_{−4}) = π/4
        let v = dirichlet_l(ONE, &RingElem::rat(-4), LMethod::CharSum, 100_000).unwrap().re;
        assert!((v - std::f64::consts::FRAC_PI_4).abs() < 1e-8);
    }

    #[test]
    fn unsupported_points() {
        let r = dirichlet_l(Complex64::new(2.0, 0.0), &RingElem::rat(5), LMethod::ClassNumber, 0);
        assert!(matches!(r, Err(Error::UnsupportedPoint(_))));
    }
}
