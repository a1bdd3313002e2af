//! Zagier's L-function L(s, δ) = Σ λ_q(δ) Nr(q)^{−s}.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::local_factors::{local_poly_principal, LocalType};
use crate::number_base::{
    dirichlet_l, factorize, factorize_with, ideals_up_to, kronecker_int, local_symbol, DiscriminantData, LMethod,
    Residues, Ring, RingElem, Sieve,
};

/// |o^×/(o^×)²| for Z and Z[i].
pub const UNIT_SQUARE_CLASSES: u32 = 2;

/// Order m of the default weight W_m(y) = e^{−y}·Σ_{j ≤ m} y^j/j!.
pub const SMOOTHING_ORDER: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZagierParams {
    pub delta: DiscriminantData,
    pub truncation_norm: u64,
    /// Scale V of the weight W_m(Nr(q)/V); defaults to V = Q_max/10 when Re(s) ≤ 1.
    pub smoothing: Option<f64>,
    pub order: u32,
}

impl ZagierParams {
    pub fn new(delta: DiscriminantData, truncation_norm: u64) -> Self {
        ZagierParams { delta, truncation_norm, smoothing: None, order: SMOOTHING_ORDER }
    }
}

/// W_m(y) = e^{−y}·Σ_{j ≤ m} y^j/j!. Its Mellin transform Σ_j Γ(w + j)/j! has residue 1 at w = 0
/// and none at w = −1, …, −m.
pub fn smoothing_weight(y: f64, m: u32) -> f64 {
    let mut acc = 1.0;
    let mut t = 1.0;
    for j in 1..=m {
        t *= y / j as f64;
        acc += t;
    }
    (-y).exp() * acc
}

/// Normalized ideals of norm ≤ limit with their factorizations.
#[derive(Clone, Debug)]
pub struct IdealTable {
    pub ring: Ring,
    pub limit: u64,
    entries: Vec<(RingElem, Vec<(RingElem, u32)>)>,
}

impl IdealTable {
    pub fn new(ring: Ring, limit: u64) -> Result<IdealTable> {
        let sieve = Sieve::new(limit.max(2) as usize);
        let entries = ideals_up_to(ring, limit)
            .into_iter()
            .map(|q| factorize_with(&q, Some(&sieve)).map(|f| (q, f.factors)))
            .collect::<Result<Vec<_>>>()?;
        Ok(IdealTable { ring, limit, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn two(ring: Ring) -> RingElem {
    match ring {
        Ring::Rat => RingElem::rat(2),
        Ring::Gauss => RingElem::gauss(1, 1),
    }
}

/// ρ_q(δ) = #{x mod 2q : x² ≡ δ mod 4q} by enumerating o/2q.
pub fn rho_q_enumerate(delta: &RingElem, q: &RingElem) -> Result<u64> {
    if q.is_zero() {
        return Err(Error::ZeroModulus);
    }
    let ring = q.ring;
    let m2 = RingElem::from_int(ring, 2) * *q;
    let m4 = RingElem::from_int(ring, 4) * *q;
    if m2.norm() > 4_000_000 {
        return Err(Error::TooLarge(format!("Nr(2q) = {}", m2.norm())));
    }
    let res = Residues::new(m2);
    Ok(res.iter().filter(|x| m4.divides(&(*x * *x - *delta))).count() as u64)
}

/// ρ_q(·) for a fixed q, tabulated over δ mod 4q.
#[derive(Clone, Debug)]
pub struct RhoTable {
    res4: Residues,
    counts: Vec<u32>,
}

impl RhoTable {
    pub fn new(q: &RingElem) -> Result<RhoTable> {
        if q.is_zero() {
            return Err(Error::ZeroModulus);
        }
        let m2 = RingElem::from_int(q.ring, 2) * *q;
        let m4 = RingElem::from_int(q.ring, 4) * *q;
        if m4.norm() > 16_000_000 {
            return Err(Error::TooLarge(format!("Nr(4q) = {}", m4.norm())));
        }
        let res2 = Residues::new(m2);
        let res4 = Residues::new(m4);
        let mut counts = vec![0u32; res4.len() as usize];
        for x in res2.iter() {
            counts[res4.index(res4.mul(x, x)) as usize] += 1;
        }
        Ok(RhoTable { res4, counts })
    }

    /// The residue system of 4q the table is indexed by.
    pub fn residues(&self) -> &Residues {
        &self.res4
    }

    pub fn get(&self, delta: RingElem) -> u64 {
        self.counts[self.res4.index(delta) as usize] as u64
    }
}

/// Legendre symbol of d at an odd prime p with p ∤ d.
fn legendre(d: &RingElem, p: &RingElem) -> i32 {
    match p.ring {
        Ring::Rat => kronecker_int(d.re, p.re.abs()),
        Ring::Gauss => local_symbol(d, p),
    }
}

/// #{x mod p^e : x² ≡ d mod p^e} for an odd prime p.
fn sqrt_count_odd(d: &RingElem, p: &RingElem, e: u32) -> u64 {
    if e == 0 {
        return 1;
    }
    let pe = p.pow(e);
    if pe.divides(d) {
        return p.norm().pow(e / 2);
    }
    let mut v = 0;
    let mut core = *d;
    while let Some(c) = core.div_exact(p) {
        core = c;
        v += 1;
    }
    if v == 0 {
        return (1 + legendre(&core, p)) as u64;
    }
    if v % 2 == 1 {
        return 0;
    }
    let w = v / 2;
    p.norm().pow(w) * sqrt_count_odd(&core, p, e - 2 * w)
}

/// ρ_{π^e}(δ) for π the prime above 2, by enumerating o/2π^e.
fn rho_even_power(delta: &RingElem, pi: &RingElem, e: u32) -> Result<u64> {
    rho_q_enumerate(delta, &pi.pow(e))
}

/// ρ_q(δ) through prime-power local counts.
pub fn rho_q_local(delta: &RingElem, q: &RingElem) -> Result<u64> {
    if q.is_zero() {
        return Err(Error::ZeroModulus);
    }
    let ring = q.ring;
    let rho1 = rho_q_enumerate(delta, &RingElem::one(ring))?;
    if rho1 == 0 {
        return Ok(0);
    }
    let f = factorize(q)?;
    let t = two(ring);
    let mut acc = rho1;
    for (p, e) in &f.factors {
        acc *= if *p == t { rho_even_power(delta, p, *e)? } else { sqrt_count_odd(delta, p, *e) };
    }
    Ok(acc)
}

/// ρ_q(δ); enumeration below a small size, local counts otherwise.
pub fn rho_q(delta: &RingElem, q: &RingElem) -> Result<u64> {
    if q.is_zero() {
        return Err(Error::ZeroModulus);
    }
    if q.norm() <= 64 {
        rho_q_enumerate(delta, q)
    } else {
        rho_q_local(delta, q)
    }
}

/// λ at a prime power: Σ_{2a+b+c=e} μ(p^b) ρ_{p^c}.
fn lambda_prime_power(delta: &RingElem, p: &RingElem, e: u32) -> Result<i64> {
    let mut acc = 0i64;
    let mut c = e as i64;
    while c >= 0 {
        acc += rho_q(delta, &p.pow(c as u32))? as i64;
        if c >= 1 {
            acc -= rho_q(delta, &p.pow(c as u32 - 1))? as i64;
        }
        c -= 2;
    }
    Ok(acc)
}

/// λ_q(δ) = Σ_{a²bc = q} μ(b) ρ_c(δ).
pub fn lambda_q(delta: &RingElem, q: &RingElem) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::ZeroModulus);
    }
    if rho_q_enumerate(delta, &RingElem::one(q.ring))? == 0 {
        return Ok(0);
    }
    let f = factorize(q)?;
    let mut acc = 1i64;
    for (p, e) in &f.factors {
        acc *= lambda_prime_power(delta, p, *e)?;
    }
    Ok(acc)
}

/// λ_q(δ) for every ideal of norm ≤ limit, in the order of `ideals_up_to`.
pub fn lambda_table(delta: &RingElem, limit: u64) -> Result<Vec<(RingElem, i64)>> {
    lambda_table_with(delta, &IdealTable::new(delta.ring, limit)?)
}

/// λ_q(δ) over a precomputed ideal table.
pub fn lambda_table_with(delta: &RingElem, ideals: &IdealTable) -> Result<Vec<(RingElem, i64)>> {
    if rho_q_enumerate(delta, &RingElem::one(ideals.ring))? == 0 {
        return Ok(ideals.entries.iter().map(|(q, _)| (*q, 0)).collect());
    }
    let mut cache: HashMap<(RingElem, u32), i64> = HashMap::new();
    let mut out = Vec::with_capacity(ideals.len());
    for (q, factors) in &ideals.entries {
        let mut acc = 1i64;
        for (p, e) in factors {
            let v = match cache.get(&(*p, *e)) {
                Some(v) => *v,
                None => {
                    let v = lambda_prime_power(delta, p, *e)?;
                    cache.insert((*p, *e), v);
                    v
                }
            };
            acc *= v;
            if acc == 0 {
                break;
            }
        }
        out.push((*q, acc));
    }
    Ok(out)
}

/// Σ_{Nr(q) ≤ Q_max} λ_q(δ) Nr(q)^{−s}, optionally smoothed by W_m(Nr(q)/V).
pub fn zagier_l_series(s: Complex64, params: &ZagierParams) -> Result<Complex64> {
    if s.re <= 0.5 {
        return Err(Error::Divergent(s.re));
    }
    let ideals = IdealTable::new(params.delta.delta.ring, params.truncation_norm)?;
    zagier_l_series_with(s, params, &ideals)
}

/// As `zagier_l_series`, over a precomputed table covering at least Q_max.
pub fn zagier_l_series_with(s: Complex64, params: &ZagierParams, ideals: &IdealTable) -> Result<Complex64> {
    if s.re <= 0.5 {
        return Err(Error::Divergent(s.re));
    }
    if ideals.limit < params.truncation_norm || ideals.ring != params.delta.delta.ring {
        return Err(Error::OutOfRange("ideal table does not cover the truncation".into()));
    }
    let v = match params.smoothing {
        Some(v) => Some(v),
        None if s.re <= 1.0 => Some(params.truncation_norm as f64 / 10.0),
        None => None,
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (q, lam) in lambda_table_with(&params.delta.delta, ideals)? {
        if lam == 0 || q.norm() > params.truncation_norm {
            continue;
        }
        let n = q.norm() as f64;
        let mut term = (-s * n.ln()).exp() * lam as f64;
        if let Some(v) = v {
            term *= smoothing_weight(n / v, params.order);
        }
        acc += term;
    }
    Ok(acc)
}

/// The finite part Nr(l)^{−s}·Π_{p | l} P_p(s, ord_p l) of L(s, δ)/L(s, χ_D).
pub fn local_product(s: Complex64, delta: &DiscriminantData) -> Result<Complex64> {
    let l = delta.conductor;
    if l.is_unit() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let f = factorize(&l)?;
    let mut acc = (-s * (l.norm() as f64).ln()).exp();
    for (p, e) in &f.factors {
        let eps = local_symbol(&delta.fundamental, p) as i8;
        let poly = local_poly_principal(LocalType { q: p.norm(), epsilon: eps }, *e);
        acc *= poly.eval_at_s(s);
    }
    Ok(acc)
}

/// L(s, δ) = Nr(l)^{−s}·Π P_p(s)·L(s, χ_D).
///
/// Over Q at s = 1 with D > 1 the L-value comes from the class number formula; otherwise from a
/// character sum truncated at `truncation`.
pub fn zagier_l_factored(s: Complex64, delta: &DiscriminantData, truncation: u64) -> Result<Complex64> {
    let d = delta.fundamental;
    if d.is_unit() && (s - 1.0).norm() < 1e-12 {
        return Err(Error::PoleAtS("1".into()));
    }
    let lval = if d.ring == Ring::Rat && d.re > 1 && (s - 1.0).norm() < 1e-14 {
        dirichlet_l(s, &d, LMethod::ClassNumber, 0)?
    } else {
        dirichlet_l(s, &d, LMethod::CharSum, truncation)?
    };
    Ok(local_product(s, delta)? * lval)
}

/// #{a mod n : a(t − a) ≡ 1 mod n}.
pub fn conjugacy_count(t: i64, n: u64) -> u64 {
    let n = n as i64;
    (0..n).filter(|a| (a * (t - a) - 1).rem_euclid(n) == 0).count() as u64
}

/// The truncated P-conjugacy series Σ_n #{a mod n : a(t−a) ≡ 1}·n^{−s}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjugacySeries {
    pub raw: Complex64,
    pub unit_factor: u32,
}

impl ConjugacySeries {
    pub fn total(&self) -> Complex64 {
        self.raw * self.unit_factor as f64
    }
}

pub fn p_conjugacy_series(s: Complex64, t: i64, n_max: u64) -> Result<ConjugacySeries> {
    if t.abs() <= 2 {
        return Err(Error::NonHyperbolicTrace(t));
    }
    let mut raw = Complex64::new(0.0, 0.0);
    for n in 1..=n_max {
        let c = conjugacy_count(t, n);
        if c > 0 {
            raw += (-s * (n as f64).ln()).exp() * c as f64;
        }
    }
    Ok(ConjugacySeries { raw, unit_factor: UNIT_SQUARE_CLASSES })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_base::fundamental_discriminant;
    use proptest::prelude::*;

    fn r(x: i64) -> RingElem {
        RingElem::rat(x)
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho_q(&r(5), &r(1)).unwrap(), 1);
        assert_eq!(rho_q(&r(5), &r(3)).unwrap(), 0);
        assert_eq!(rho_q(&r(5), &r(11)).unwrap(), 2);
        assert_eq!(rho_q(&r(5), &r(0)), Err(Error::ZeroModulus));
    }

    #[test]
    fn rho_table_matches_direct_count() {
        for q in [r(6), r(-8), RingElem::gauss(1, 1), RingElem::gauss(2, 1), RingElem::gauss(3, 3)] {
            let t = RhoTable::new(&q).unwrap();
            for a in -7..7 {
                for b in -3..3 {
                    let d = if q.ring == Ring::Rat { r(a * 3 + b) } else { RingElem::gauss(a, b) };
                    assert_eq!(t.get(d), rho_q(&d, &q).unwrap(), "q={q} d={d}");
                }
            }
        }
    }

    #[test]
    fn smoothed_series_at_one() {
        let one = Complex64::new(1.0, 0.0);
        for t in [3i64, 10, 30] {
            let d = fundamental_discriminant(&r(t * t - 4)).unwrap();
            let f = zagier_l_factored(one, &d, 0).unwrap().re;
            let v = zagier_l_series(one, &ZagierParams::new(d, 10_000)).unwrap().re;
            assert!((v - f).abs() < 1e-4 * f, "t={t}: {v} vs {f}");
        }
        assert!((smoothing_weight(0.0, 4) - 1.0).abs() < 1e-15);
        assert!(smoothing_weight(40.0, 4) < 1e-11);
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_q(&r(5), &r(1)).unwrap(), 1);
        let rho2 = rho_q_enumerate(&r(5), &r(2)).unwrap() as i64;
        assert_eq!(lambda_q(&r(5), &r(2)).unwrap(), rho2 - 1);
        let d = r(45);
        assert_eq!(lambda_q(&d, &r(6)).unwrap(), lambda_q(&d, &r(2)).unwrap() * lambda_q(&d, &r(3)).unwrap());
    }

    /// λ_q by the literal divisor-triple sum with enumerated ρ.
    fn lambda_oracle(delta: &RingElem, q: i64) -> i64 {
        let mut acc = 0;
        for a in 1..=q {
            if q % (a * a) != 0 {
                continue;
            }
            let rest = q / (a * a);
            for b in 1..=rest {
                if rest % b != 0 {
                    continue;
                }
                let mu = crate::number_base::mobius(&r(b));
                if mu != 0 {
                    acc += mu * rho_q_enumerate(delta, &r(rest / b)).unwrap() as i64;
                }
            }
        }
        acc
    }

    #[test]
    fn lambda_matches_divisor_triples() {
        for t in [3i64, 4, 7, 11] {
            let d = r(t * t - 4);
            for q in 1..=120 {
                assert_eq!(lambda_q(&d, &r(q)).unwrap(), lambda_oracle(&d, q), "t={t} q={q}");
            }
        }
    }

    #[test]
    fn rho_paths_agree_gaussian() {
        for (a, b) in [(3, 0), (2, 1), (4, 2), (5, 3)] {
            let d = RingElem::gauss(a, b) * RingElem::gauss(a, b) - RingElem::gauss(4, 0);
            for q in ideals_up_to(Ring::Gauss, 130) {
                assert_eq!(rho_q_local(&d, &q).unwrap(), rho_q_enumerate(&d, &q).unwrap(), "δ={d} q={q}");
            }
        }
    }

    #[test]
    fn series_matches_factored() {
        for (d, s) in [(5, 2.0), (12, 3.0), (32, 2.0), (77, 2.0), (45, 2.0)] {
            let dd = fundamental_discriminant(&r(d)).unwrap();
            let a = zagier_l_series(Complex64::new(s, 0.0), &ZagierParams::new(dd, 10_000)).unwrap();
            let b = zagier_l_factored(Complex64::new(s, 0.0), &dd, 200_000).unwrap();
            assert!((a - b).norm() < 1e-4, "δ={d}: {a} vs {b}");
        }
    }

    #[test]
    fn factored_value_at_one() {
        let dd = fundamental_discriminant(&r(5)).unwrap();
        let v = zagier_l_factored(Complex64::new(1.0, 0.0), &dd, 0).unwrap();
        assert!((v.re - 0.430409).abs() < 1e-6);
    }

    #[test]
    fn series_errors() {
        assert!(matches!(fundamental_discriminant(&r(9)), Err(Error::SquareDelta(_))));
        let dd = fundamental_discriminant(&r(5)).unwrap();
        assert_eq!(zagier_l_series(Complex64::new(0.5, 0.0), &ZagierParams::new(dd, 10)), Err(Error::Divergent(0.5)));
    }

    #[test]
    fn conjugacy_bridge() {
        assert_eq!(conjugacy_count(3, 1), 1);
        assert_eq!(conjugacy_count(3, 5), (0..5).filter(|a| (a * (3 - a) - 1) % 5 == 0).count() as u64);
        for t in 3..=8 {
            for n in 1..=50 {
                assert_eq!(conjugacy_count(t, n), rho_q(&r(t * t - 4), &r(n as i64)).unwrap(), "t={t} n={n}");
            }
        }
        assert_eq!(p_conjugacy_series(Complex64::new(2.0, 0.0), 2, 10), Err(Error::NonHyperbolicTrace(2)));
    }

    proptest! {
        #[test]
        fn rho_is_multiplicative(t in 3i64..20, a in 1i64..40, b in 1i64..40) {
            prop_assume!(crate::number_base::RingElem::rat(a).coprime(&RingElem::rat(b)));
            let d = r(t * t - 4);
            let ab = rho_q(&d, &r(a * b)).unwrap();
            prop_assert_eq!(ab, rho_q(&d, &r(a)).unwrap() * rho_q(&d, &r(b)).unwrap());
        }
    }
}
