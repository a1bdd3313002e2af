//! The exponential sums S_q(k, N), Kloosterman sums, the λ-lattice asymptotic and
//! the Dirichlet series identity over Z[i].

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::number_base::{
    dirichlet_l, divisor_count, divisors, factorize, factorize_with, ideals_up_to, mobius, LMethod, Residues, Ring,
    RingElem, Sieve,
};
use crate::zagier_l::RhoTable;

/// Largest Nr(q) accepted by the brute-force sums.
pub const ENUMERATION_LIMIT: u64 = 100_000;
/// Constant in front of d(q₂)·Nr((k,q))^{1/2}·Nr(q)^{1/2}.
pub const WEIL_CONSTANT: f64 = 2.0;
const BLOCK: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpSumParams {
    pub ring: Ring,
    pub q: RingElem,
    /// Frequency, read modulo q.
    pub k: RingElem,
    /// The level N.
    pub n: RingElem,
}

impl ExpSumParams {
    pub fn new(q: RingElem, k: RingElem, n: RingElem) -> Self {
        ExpSumParams { ring: q.ring, q, k, n }
    }
}

/// e(⟨x/q, 1⟩), with ⟨x, y⟩ = Re(xy).
pub fn phase(x: RingElem, q: RingElem) -> Complex64 {
    let (num, den) = match q.ring {
        Ring::Rat => (x.re as i128 * q.re.signum() as i128, q.re.unsigned_abs() as i128),
        Ring::Gauss => {
            let (a, b, c, d) = (x.re as i128, x.im as i128, q.re as i128, q.im as i128);
            (a * c + b * d, c * c + d * d)
        }
    };
    let t = num.rem_euclid(den) as f64 / den as f64;
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

/// Σ_{i < len} f(i), summed in fixed blocks so the result does not depend on scheduling.
fn block_sum<F>(len: u64, f: F) -> Complex64
where
    F: Fn(u64) -> Complex64 + Sync,
{
    let blocks = len.div_ceil(BLOCK);
    let partial: Vec<Complex64> = (0..blocks)
        .into_par_iter()
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in j * BLOCK..((j + 1) * BLOCK).min(len) {
                acc += f(i);
            }
            acc
        })
        .collect();
    partial.into_iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b)
}

fn check_size(q: &RingElem) -> Result<()> {
    if q.is_zero() {
        return Err(Error::ZeroModulus);
    }
    if q.norm() > ENUMERATION_LIMIT {
        return Err(Error::TooLarge(format!("Nr(q) = {}", q.norm())));
    }
    Ok(())
}

/// ρ_q(b(4 + N²b)) for every b in the residue system of q.
fn curve_counts(q: &RingElem, n: &RingElem) -> Result<(Residues, Vec<u64>)> {
    let table = RhoTable::new(q)?;
    let res = Residues::new(*q);
    let ring = q.ring;
    let four = RingElem::from_int(ring, 4);
    let n2 = *n * *n;
    let counts = res
        .iter()
        .map(|b| {
            let m = table.residues();
            let inner = m.reduce(four + m.mul(n2, b));
            table.get(m.mul(b, inner))
        })
        .collect();
    Ok((res, counts))
}

/// S_q(k, N) = Σ_{b mod q} ρ_q(b(4 + N²b))·e(⟨b/q, k⟩), by enumeration.
pub fn s_q_bruteforce(params: &ExpSumParams) -> Result<Complex64> {
    check_size(&params.q)?;
    let (res, counts) = curve_counts(&params.q, &params.n)?;
    let k = params.k;
    Ok(block_sum(res.len(), |i| {
        let c = counts[i as usize];
        if c == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let b = res.element(i);
        phase(res.mul(b, k), params.q) * c as f64
    }))
}

/// S_q(0, N) as an exact integer.
pub fn s_q_zero_exact(q: &RingElem, n: &RingElem) -> Result<u64> {
    check_size(q)?;
    Ok(curve_counts(q, n)?.1.into_iter().sum())
}

/// q = q₁q₂ with q₁ | N^∞ and (q₂, N) = 1, as normalized representatives.
pub fn split_at_level(q: &RingElem, n: &RingElem) -> Result<(RingElem, RingElem)> {
    let f = factorize(q)?;
    let ring = q.ring;
    let (mut q1, mut q2) = (RingElem::one(ring), RingElem::one(ring));
    for (p, e) in f.factors {
        if p.divides(n) {
            q1 = q1 * p.pow(e);
        } else {
            q2 = q2 * p.pow(e);
        }
    }
    Ok((q1.normalized(), q2.normalized()))
}

fn euler_phi_checked(x: &RingElem) -> Result<u64> {
    let f = factorize(x)?;
    Ok(f.factors.iter().map(|(p, e)| p.norm().pow(e - 1) * (p.norm() - 1)).product())
}

/// Nr(q₁)·φ(q₂).
pub fn s_q_zero_closed(q: &RingElem, n: &RingElem) -> Result<u64> {
    let (q1, q2) = split_at_level(q, n)?;
    Ok(q1.norm() * euler_phi_checked(&q2)?)
}

/// S(a, b; c) = Σ_{(y, c) = 1} e(⟨(ay + b y⁻¹)/c, 1⟩).
pub fn kloosterman(a: RingElem, b: RingElem, c: RingElem) -> Result<Complex64> {
    check_size(&c)?;
    let res = Residues::new(c);
    Ok(block_sum(res.len(), |i| {
        let y = res.element(i);
        match res.inverse(y) {
            Some(yinv) => phase(res.reduce(res.mul(a, y) + res.mul(b, yinv)), c),
            None => Complex64::new(0.0, 0.0),
        }
    }))
}

/// Both sides of S_q(k, N) = e(⟨−2Ñ²/q, k⟩)·S(kÑ, kÑ³; q) for (q, N) = 1.
pub fn kloosterman_reduction(params: &ExpSumParams) -> Result<(Complex64, Complex64)> {
    check_size(&params.q)?;
    let res = Residues::new(params.q);
    let ninv = res
        .inverse(params.n)
        .ok_or_else(|| Error::OutOfRange(format!("N = {} is not invertible mod {}", params.n, params.q)))?;
    let k = res.reduce(params.k);
    let n2 = res.mul(ninv, ninv);
    let n3 = res.mul(n2, ninv);
    let shift = res.reduce(-(RingElem::from_int(params.ring, 2) * res.mul(n2, k)));
    let rhs = phase(shift, params.q) * kloosterman(res.mul(k, ninv), res.mul(k, n3), params.q)?;
    Ok((s_q_bruteforce(params)?, rhs))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeilCheck {
    pub value: Complex64,
    pub bound: f64,
    pub ok: bool,
}

/// |S_q(k, N)| against C·d(q₂)·Nr((k, q))^{1/2}·Nr(q)^{1/2}, d the number of ideal divisors.
pub fn s_q_weil_check(params: &ExpSumParams) -> Result<WeilCheck> {
    let value = s_q_bruteforce(params)?;
    let (_, q2) = split_at_level(&params.q, &params.n)?;
    let g = params.k.gcd(&params.q);
    let bound = WEIL_CONSTANT * divisor_count(&q2) as f64 * (g.norm() as f64).sqrt() * (params.q.norm() as f64).sqrt();
    Ok(WeilCheck { value, bound, ok: value.norm() <= bound * (1.0 + 1e-12) })
}

/// k₁, k₂ with S_{q₁q₂}(k, N) = S_{q₁}(k₁, N)·S_{q₂}(k₂, N) for coprime q₁, q₂.
pub fn crt_adjusted_k(k: RingElem, q1: RingElem, q2: RingElem) -> Result<(RingElem, RingElem)> {
    let (r1, r2) = (Residues::new(q1), Residues::new(q2));
    let u2 = r1.inverse(q2).ok_or_else(|| Error::OutOfRange(format!("{q1} and {q2} are not coprime")))?;
    let u1 = r2.inverse(q1).ok_or_else(|| Error::OutOfRange(format!("{q1} and {q2} are not coprime")))?;
    Ok((r1.mul(k, u2), r2.mul(k, u1)))
}

/// g(q) = Nr(q′)·φ(q″) with q′ = gcd(q, N^∞).
pub fn g_function(q: &RingElem, n: &RingElem) -> Result<u64> {
    s_q_zero_closed(q, n)
}

/// Σ_{q₁²q₂q₃ = q} μ(q₂)·g(q₃)/Nr(q₃).
pub fn main_term_coefficient(q: &RingElem, n: &RingElem) -> Result<f64> {
    let mut acc = 0.0;
    for q3 in divisors(q) {
        let rest = q.div_exact(&q3).expect("divisor");
        acc += square_mobius_weight(&rest) as f64 * g_function(&q3, n)? as f64 / q3.norm() as f64;
    }
    Ok(acc)
}

/// Σ_{a²b = m} μ(b).
fn square_mobius_weight(m: &RingElem) -> i64 {
    divisors(m)
        .into_iter()
        .filter_map(|b| {
            let a2 = m.div_exact(&b)?;
            let f = factorize(&a2).ok()?;
            f.factors.iter().all(|(_, e)| e % 2 == 0).then(|| mobius(&b))
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSum {
    pub value: f64,
    pub main: f64,
    pub error: f64,
    /// πZ/Nr(N²), the main term at q = 1.
    pub scale: f64,
}

/// Σ_{Nr(n) ≤ Z, n ∈ 2 + N²o} λ_q((n² − 4)/N²) against its main term.
pub fn lambda_lattice_sum(z: f64, q: &RingElem, n: &RingElem) -> Result<LatticeSum> {
    if q.ring != Ring::Gauss || n.ring != Ring::Gauss {
        return Err(Error::OutOfRange("the lattice sum is defined over Z[i]".into()));
    }
    if z > 1e4 {
        return Err(Error::TooLarge(format!("Z = {z}")));
    }
    check_size(q)?;
    if n.is_zero() {
        return Err(Error::ZeroModulus);
    }
    // λ_q = Σ_{c | q} w(q/c)·ρ_c with w(m) = Σ_{a²b = m} μ(b)
    let mut terms = Vec::new();
    for c in divisors(q) {
        let w = square_mobius_weight(&q.div_exact(&c).expect("divisor"));
        if w != 0 {
            terms.push((w, RhoTable::new(&c)?));
        }
    }
    let n2 = *n * *n;
    let two = RingElem::gauss(2, 0);
    let four = RingElem::gauss(4, 0);
    let r = z.sqrt().floor() as i64 + 1;
    let mut value = 0i64;
    for a in -r..=r {
        for b in -r..=r {
            let x = RingElem::gauss(a, b);
            if x.norm() as f64 > z {
                continue;
            }
            let Some(m) = (x - two).div_exact(&n2) else { continue };
            let delta = m * (four + n2 * m);
            value += terms.iter().map(|(w, t)| w * t.get(delta) as i64).sum::<i64>();
        }
    }
    let scale = PI * z / n2.norm() as f64;
    let main = scale * main_term_coefficient(q, n)?;
    let value = value as f64;
    Ok(LatticeSum { value, main, error: value - main, scale })
}

/// ζ_{Q(i)}(w) = ζ(w)·L(w, χ₋₄).
pub fn dedekind_zeta_gauss(w: Complex64) -> Result<Complex64> {
    dirichlet_l(w, &RingElem::gauss(1, 0), LMethod::CharSum, 200_000)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// Heuristic size of the omitted tail Nr(q) > Q_max.
    pub tail_estimate: f64,
}

/// Local factor Σ_{2a+b+c=e} μ(p^b)·g(p^c)/Nr(p^c).
fn identity_coefficient_local(np: f64, e: u32, p_divides_n: bool) -> f64 {
    let g_over_norm = |c: u32| {
        if c == 0 || p_divides_n {
            1.0
        } else {
            1.0 - 1.0 / np
        }
    };
    let mut acc = 0.0;
    let mut a = 0;
    while 2 * a <= e {
        let rest = e - 2 * a;
        acc += g_over_norm(rest);
        if rest >= 1 {
            acc -= g_over_norm(rest - 1);
        }
        a += 1;
    }
    acc
}

/// Both sides of Σ_q Nr(q)^{−1−s} Σ_{q₁²q₂q₃ = q} μ(q₂)g(q₃)/Nr(q₃) = ζ(2+2s)/ζ(2+s)·Π_{p | N}(1 − Nr(p)^{−2−s})^{−1}.
pub fn dirichlet_identity_check(s: Complex64, n: &RingElem, q_max: u64) -> Result<IdentityCheck> {
    if s.re <= 0.0 {
        return Err(Error::ConvergenceRegion(format!("Re(s) = {} ≤ 0", s.re)));
    }
    if n.is_zero() {
        return Err(Error::ZeroModulus);
    }
    let n = RingElem::gauss(n.re, n.im);
    let nf = factorize(&n)?;
    let sieve = Sieve::new(q_max.max(2) as usize);
    let mut lhs = Complex64::new(0.0, 0.0);
    for q in ideals_up_to(Ring::Gauss, q_max) {
        let f = factorize_with(&q, Some(&sieve))?;
        let mut h = 1.0;
        for (p, e) in &f.factors {
            h *= identity_coefficient_local(p.norm() as f64, *e, nf.ord(p) > 0);
            if h == 0.0 {
                break;
            }
        }
        if h != 0.0 {
            lhs += (-(s + 1.0) * (q.norm() as f64).ln()).exp() * h;
        }
    }
    let mut rhs = dedekind_zeta_gauss(s * 2.0 + 2.0)? / dedekind_zeta_gauss(s + 2.0)?;
    for (p, _) in &nf.factors {
        rhs /= 1.0 - (-(s + 2.0) * (p.norm() as f64).ln()).exp();
    }
    let sigma = s.re;
    let qm = q_max as f64;
    // squares a² with Nr(a)² > Q_max dominate; ζ_{Q(i)}(3/2) ≈ 3.8 bounds the cofactor sum
    let tail_estimate = 1.2
        * (PI / 4.0)
        * (3.8 * qm.powf(-(0.5 + sigma)) / (1.0 + 2.0 * sigma) + qm.powf(-1.0 - sigma) / (1.0 + sigma));
    Ok(IdentityCheck { lhs, rhs, tail_estimate })
}
