//! Prime geodesic counting functions Ψ_Γ(x) for the modular group and principal
//! congruence subgroups over Z and Z[i].

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::number_base::{factorize, fundamental_discriminant, DiscriminantData, Ring, RingElem};
use crate::zagier_l::{zagier_l_factored, zagier_l_series_with, IdealTable, ZagierParams};

/// Truncation of the smoothed series for per-trace L-values over Z[i].
pub const GAUSS_SERIES_NORM: u64 = 40_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubgroupKind {
    Full,
    Principal,
    Hecke,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Oriented,
    NonOriented,
}

impl Orientation {
    fn factor(self) -> f64 {
        match self {
            Orientation::Oriented => 2.0,
            Orientation::NonOriented => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Orientation::Oriented => "oriented",
            Orientation::NonOriented => "non-oriented",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubgroupSpec {
    pub ring: Ring,
    pub kind: SubgroupKind,
    pub level: RingElem,
}

impl SubgroupSpec {
    /// A unit level degrades PRINCIPAL/HECKE to FULL.
    pub fn new(ring: Ring, kind: SubgroupKind, level: RingElem) -> Result<SubgroupSpec> {
        if level.is_zero() {
            return Err(Error::ZeroInput);
        }
        let level = RingElem::new(ring, level.re, level.im).normalized();
        let kind = if level.is_unit() { SubgroupKind::Full } else { kind };
        Ok(SubgroupSpec { ring, kind, level: if kind == SubgroupKind::Full { RingElem::one(ring) } else { level } })
    }

    pub fn full(ring: Ring) -> SubgroupSpec {
        SubgroupSpec { ring, kind: SubgroupKind::Full, level: RingElem::one(ring) }
    }

    /// Whether −1 lies in Γ(N), i.e. N | 2.
    fn contains_minus_one(&self) -> bool {
        self.level.divides(&RingElem::from_int(self.ring, 2))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceTerm {
    pub t: RingElem,
    pub delta: DiscriminantData,
    pub l_value: f64,
    pub term: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsiReport {
    pub x: f64,
    pub ring: Ring,
    pub traces: Vec<TraceTerm>,
    pub total: f64,
    pub main_term: f64,
    pub ratio: f64,
    pub orientation: Orientation,
}

impl PsiReport {
    fn build(x: f64, ring: Ring, traces: Vec<TraceTerm>, orientation: Orientation) -> PsiReport {
        let total = traces.iter().fold(0.0, |a, t| a + t.term);
        let main_term = main_term(x, ring, orientation);
        PsiReport { x, ring, traces, total, main_term, ratio: total / main_term, orientation }
    }

    /// The same report in the other convention; terms scale by exactly 2.
    pub fn with_orientation(&self, orientation: Orientation) -> PsiReport {
        let scale = orientation.factor() / self.orientation.factor();
        let traces = self.traces.iter().map(|t| TraceTerm { term: t.term * scale, ..t.clone() }).collect();
        PsiReport::build(self.x, self.ring, traces, orientation)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_re,t_im,delta,D,l,L_value,term,cumulative\n");
        let mut cum = 0.0;
        for t in &self.traces {
            cum += t.term;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                t.t.re,
                t.t.im,
                t.delta.delta,
                t.delta.fundamental,
                t.delta.conductor,
                fmt_sig(t.l_value),
                fmt_sig(t.term),
                fmt_sig(cum)
            );
        }
        out
    }
}

/// A float at 12 significant digits.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.11e}")
    }
}

/// x for Z, x²/2 for Z[i] (oriented); half of it without orientation.
pub fn main_term(x: f64, ring: Ring, orientation: Orientation) -> f64 {
    let oriented = match ring {
        Ring::Rat => x,
        Ring::Gauss => x * x / 2.0,
    };
    oriented * orientation.factor() / 2.0
}

/// Larger of |λ|, |λ|⁻¹ for λ a root of T² − tT + 1.
pub fn larger_eigenvalue(t: RingElem) -> f64 {
    let tc = t.to_c64();
    let disc = (tc * tc - 4.0).sqrt();
    let a = ((tc + disc) / 2.0).norm();
    let b = ((tc - disc) / 2.0).norm();
    a.max(b)
}

fn is_hyperbolic(t: RingElem) -> bool {
    !(t.im == 0 && t.re.abs() <= 2)
}

/// N(γ) ≤ x: λ² ≤ x over Z (t ≤ √x + 1/√x), |λ|² ≤ x over Z[i].
fn within_bound(t: RingElem, x: f64) -> bool {
    let l = larger_eigenvalue(t);
    l * l <= x * (1.0 + 1e-12)
}

/// Trace representatives t of hyperbolic classes of Γ with N(γ) ≤ x, ordered by norm then value.
///
/// Over Z one sign per PSL₂ class (t ≥ 3, t ≡ ±2 mod N²); over Z[i] every n ∈ 2 + N²o.
/// HECKE over Z uses the solvability of a(t − a) ≡ 1 mod N.
pub fn trace_set(spec: &SubgroupSpec, x: f64) -> Vec<RingElem> {
    if x <= 1.0 {
        return Vec::new();
    }
    let bound = x.sqrt() + 1.0 / x.sqrt();
    let mut out = Vec::new();
    match spec.ring {
        Ring::Rat => {
            let n2 = spec.level * spec.level;
            for t in 3..=(bound.floor() as i64 + 1) {
                let tt = RingElem::rat(t);
                if !within_bound(tt, x) {
                    continue;
                }
                let ok = match spec.kind {
                    SubgroupKind::Full => true,
                    SubgroupKind::Principal => {
                        n2.divides(&(tt - RingElem::rat(2))) || n2.divides(&(tt + RingElem::rat(2)))
                    }
                    SubgroupKind::Hecke => hecke_trace_admissible(t, spec.level.re),
                };
                if ok {
                    out.push(tt);
                }
            }
        }
        Ring::Gauss => {
            let n2 = spec.level * spec.level;
            let r = bound.ceil() as i64 + 1;
            for a in -r..=r {
                for b in -r..=r {
                    let t = RingElem::gauss(a, b);
                    if is_hyperbolic(t) && within_bound(t, x) && n2.divides(&(t - RingElem::gauss(2, 0))) {
                        out.push(t);
                    }
                }
            }
            out.sort_by_key(|t| (t.norm(), t.re, t.im));
        }
    }
    out
}

/// Whether a(t − a) ≡ 1 mod N has a solution a.
pub fn hecke_trace_admissible(t: i64, n: i64) -> bool {
    let n = n.abs();
    if n <= 1 {
        return true;
    }
    (0..n).any(|a| (a * (t - a) - 1).rem_euclid(n) == 0)
}

/// [PSL₂(o) : Γ(N)] = Nr(N)³·Π_{p | N}(1 − Nr(p)^{−2}).
pub fn index_principal(spec: &SubgroupSpec) -> Result<BigRational> {
    if spec.kind == SubgroupKind::Full || spec.level.is_unit() {
        return Ok(BigRational::from_integer(1.into()));
    }
    let nn = BigInt::from(spec.level.norm());
    let mut acc = BigRational::from_integer(nn.pow(3));
    for (p, _) in factorize(&spec.level)?.factors {
        let np = BigInt::from(p.norm());
        let np2 = &np * &np;
        acc *= BigRational::new(&np2 - 1, np2);
    }
    Ok(acc)
}

fn index_f64(spec: &SubgroupSpec) -> Result<f64> {
    let r = index_principal(spec)?;
    Ok(r.numer().to_string().parse::<f64>().unwrap() / r.denom().to_string().parse::<f64>().unwrap())
}

/// Main term of Ψ_Γ(x + u) − Ψ_Γ(x): u/2 over Z, ½(xu + u²/2) over Z[i].
pub fn psi_increment_mainterm(x: f64, u: f64, ring: Ring) -> f64 {
    match ring {
        Ring::Rat => u / 2.0,
        Ring::Gauss => 0.5 * (x * u + u * u / 2.0),
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn delta_of(t: RingElem, level: RingElem) -> Result<DiscriminantData> {
    let ring = t.ring;
    let raw = t * t - RingElem::from_int(ring, 4);
    let delta = raw
        .div_exact(&(level * level))
        .ok_or_else(|| Error::OutOfRange(format!("{t} is not a trace of Γ({level})")))?;
    fundamental_discriminant(&delta)
}

/// Ψ for PSL₂(Z): 2·Σ_{3 ≤ t ≤ √x + 1/√x} √(t² − 4)·L(1, t² − 4) oriented.
pub fn psi_modular(x: f64, orientation: Orientation) -> Result<PsiReport> {
    psi_principal(&SubgroupSpec::full(Ring::Rat), x, orientation)
}

/// Ψ_Γ(x) = C·[PSL₂(o):Γ]·Σ_n √Nr((n² − 4)/N²)·L(1, (n² − 4)/N²), C = 1 over Z and 1/(2π) over Z[i].
///
/// Over Z the L-values are factored (class number oracle); over Z[i] they come from the
/// smoothed series truncated at `GAUSS_SERIES_NORM`.
pub fn psi_principal(spec: &SubgroupSpec, x: f64, orientation: Orientation) -> Result<PsiReport> {
    psi_principal_with(spec, x, orientation, GAUSS_SERIES_NORM)
}

pub fn psi_principal_with(spec: &SubgroupSpec, x: f64, orientation: Orientation, q_max: u64) -> Result<PsiReport> {
    if spec.kind == SubgroupKind::Hecke {
        return Err(Error::OutOfRange("Ψ totals are not available for Hecke subgroups".into()));
    }
    let traces = trace_set(spec, x);
    let level = spec.level;
    let weight = match spec.ring {
        // one sign per PSL₂ class; when −1 ∉ Γ(N) the class index is half the SL₂ index
        Ring::Rat => index_f64(spec)? / if spec.contains_minus_one() { 1.0 } else { 2.0 },
        Ring::Gauss => index_f64(spec)? / (2.0 * PI),
    } * orientation.factor();
    let ideals = match spec.ring {
        Ring::Gauss if !traces.is_empty() => Some(IdealTable::new(Ring::Gauss, q_max)?),
        _ => None,
    };
    let terms = traces
        .par_iter()
        .map(|&t| {
            let delta = delta_of(t, level)?;
            let l_value = match spec.ring {
                Ring::Rat => zagier_l_factored(one(), &delta, 0)?.re,
                Ring::Gauss => {
                    let mut params = ZagierParams::new(delta, q_max);
                    // the Gaussian L-function vanishes at every non-positive integer
                    params.order = 0;
                    zagier_l_series_with(one(), &params, ideals.as_ref().expect("table"))?.re
                }
            };
            let term = weight * (delta.delta.norm() as f64).sqrt() * l_value;
            Ok(TraceTerm { t, delta, l_value, term })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PsiReport::build(x, spec.ring, terms, orientation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zagier_l::zagier_l_series;

    #[test]
    fn trace_sets_over_z() {
        let full = SubgroupSpec::full(Ring::Rat);
        assert!(trace_set(&full, 6.0).is_empty());
        assert_eq!(trace_set(&full, 9.0), vec![RingElem::rat(3)]);
        // (3 + √5)/2 squared is the smallest norm
        let phi4 = ((3.0 + 5f64.sqrt()) / 2.0f64).powi(2);
        assert!(trace_set(&full, phi4 * (1.0 - 1e-9)).is_empty());
        assert_eq!(trace_set(&full, phi4).len(), 1);
        let p2 = SubgroupSpec::new(Ring::Rat, SubgroupKind::Principal, RingElem::rat(2)).unwrap();
        assert_eq!(
            trace_set(&p2, 1000.0),
            vec![6, 10, 14, 18, 22, 26, 30].into_iter().map(RingElem::rat).collect::<Vec<_>>()
        );
        let p3 = SubgroupSpec::new(Ring::Rat, SubgroupKind::Principal, RingElem::rat(3)).unwrap();
        assert_eq!(trace_set(&p3, 500.0), vec![7, 11, 16, 20].into_iter().map(RingElem::rat).collect::<Vec<_>>());
    }

    #[test]
    fn gaussian_traces_respect_bound() {
        let spec = SubgroupSpec::new(Ring::Gauss, SubgroupKind::Principal, RingElem::gauss(1, 1)).unwrap();
        let ts = trace_set(&spec, 20.0);
        assert!(!ts.is_empty());
        for t in &ts {
            assert!(larger_eigenvalue(*t) <= 20.0 + 1e-9);
            assert!((*t - RingElem::gauss(2, 0)).div_exact(&RingElem::gauss(0, 2)).is_some());
            assert!(is_hyperbolic(*t));
        }
        // both signs are kept
        assert!(ts.contains(&RingElem::gauss(-2, 2)) && ts.contains(&RingElem::gauss(2, -2)));
        let mut sorted = ts.clone();
        sorted.sort_by_key(|t| (t.norm(), t.re, t.im));
        assert_eq!(ts, sorted);
    }

    #[test]
    fn subgroup_spec_degrades() {
        let s = SubgroupSpec::new(Ring::Gauss, SubgroupKind::Principal, RingElem::gauss(0, 1)).unwrap();
        assert_eq!(s.kind, SubgroupKind::Full);
        assert_eq!(SubgroupSpec::new(Ring::Rat, SubgroupKind::Principal, RingElem::rat(0)), Err(Error::ZeroInput));
    }

    #[test]
    fn indices() {
        let i = |ring, n| index_principal(&SubgroupSpec::new(ring, SubgroupKind::Principal, n).unwrap()).unwrap();
        assert_eq!(i(Ring::Rat, RingElem::rat(1)), BigRational::from_integer(1.into()));
        assert_eq!(i(Ring::Rat, RingElem::rat(2)), BigRational::from_integer(6.into()));
        assert_eq!(i(Ring::Gauss, RingElem::gauss(1, 1)), BigRational::from_integer(6.into()));
        assert_eq!(i(Ring::Rat, RingElem::rat(3)), BigRational::from_integer(24.into()));
    }

    #[test]
    fn increment_main_terms() {
        assert_eq!(psi_increment_mainterm(1e4, 100.0, Ring::Rat), 50.0);
        assert_eq!(psi_increment_mainterm(100.0, 10.0, Ring::Gauss), 525.0);
        assert_eq!(psi_increment_mainterm(100.0, 0.0, Ring::Gauss), 0.0);
    }

    #[test]
    fn first_trace_value() {
        assert_eq!(psi_modular(6.0, Orientation::Oriented).unwrap().total, 0.0);
        let r = psi_modular(9.0, Orientation::Oriented).unwrap();
        let expect = 4.0 * ((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((r.total - expect).abs() < 1e-12, "{}", r.total);
    }

    #[test]
    fn orientation_ledger_is_exact() {
        let a = psi_modular(2000.0, Orientation::Oriented).unwrap();
        let b = psi_modular(2000.0, Orientation::NonOriented).unwrap();
        assert_eq!(a.total, 2.0 * b.total);
        assert_eq!(a.with_orientation(Orientation::NonOriented).total, b.total);
    }

    #[test]
    fn level_one_reduces_to_modular() {
        let spec = SubgroupSpec::new(Ring::Rat, SubgroupKind::Principal, RingElem::rat(1)).unwrap();
        let a = psi_principal(&spec, 3000.0, Orientation::NonOriented).unwrap();
        let b = psi_modular(3000.0, Orientation::Oriented).unwrap();
        assert_eq!(2.0 * a.total, b.total);
    }

    #[test]
    fn monotone_in_x() {
        let mut last = 0.0;
        for x in [10.0, 50.0, 120.0, 400.0, 1000.0, 2500.0] {
            let v = psi_modular(x, Orientation::Oriented).unwrap().total;
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn per_trace_series_agrees() {
        for t in [3i64, 7, 20, 50] {
            let d = fundamental_discriminant(&RingElem::rat(t * t - 4)).unwrap();
            let f = zagier_l_factored(one(), &d, 0).unwrap().re;
            let s = zagier_l_series(one(), &ZagierParams::new(d, 10_000)).unwrap().re;
            assert!((f - s).abs() <= 1e-3 * f, "t={t}");
        }
    }

    #[test]
    fn principal_level_two_main_term() {
        let spec = SubgroupSpec::new(Ring::Rat, SubgroupKind::Principal, RingElem::rat(2)).unwrap();
        let r = psi_principal(&spec, 1e4, Orientation::Oriented).unwrap();
        assert!((r.ratio - 1.0).abs() < 0.2, "{}", r.ratio);
    }

    #[test]
    fn hecke_predicate() {
        assert!(hecke_trace_admissible(2, 5));
        // a(3 − a) ≡ 1 mod 4 has no solution
        assert!(!hecke_trace_admissible(3, 4));
        let spec = SubgroupSpec::new(Ring::Rat, SubgroupKind::Hecke, RingElem::rat(4)).unwrap();
        assert!(psi_principal(&spec, 100.0, Orientation::Oriented).is_err());
    }

    #[test]
    fn csv_layout() {
        let r = psi_modular(30.0, Orientation::Oriented).unwrap();
        let csv = r.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t_re,t_im,delta,D,l,L_value,term,cumulative");
        assert_eq!(lines.next().unwrap(), "3,0,5,5,1,0.430408940964,1.92484730024,1.92484730024");
        assert_eq!(fmt_sig(1234.5), "1234.50000000");
        assert_eq!(fmt_sig(-0.5), "-0.500000000000");
    }
}
