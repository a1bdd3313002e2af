//! The acceptance grid: eleven end-to-end checks, each with a wall-clock budget.
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::exp_sums::{
    dirichlet_identity_check, kloosterman_reduction, lambda_lattice_sum, s_q_bruteforce, s_q_zero_closed,
    s_q_zero_exact, ExpSumParams,
};
use crate::geodesic_count::{psi_modular, psi_principal, Orientation, SubgroupKind, SubgroupSpec};
use crate::local_factors::{
    assemble_weight, check_functional_equation, hecke_factor_from_counts, legendre_p, legendre_p_oracle,
    local_poly_hecke, local_poly_principal, roots_on_unit_circle, rs_weight, HeckeLocalParams, LocalType,
};
use crate::number_base::{fundamental_discriminant, ideals_up_to, is_prime, is_prime_u64, Ring, RingElem};
use crate::orbital_counts::{count_bruteforce, count_n0_closed, count_ninf_closed, LocalQuadraticModel, Which};
use crate::zagier_l::{conjugacy_count, rho_q, zagier_l_factored, zagier_l_series_with, IdealTable, ZagierParams};

pub const GRID_Q: [u64; 6] = [2, 3, 4, 5, 7, 9];
pub const GRID_MAX: u32 = 6;
pub const DEFAULT_PRIMES: [u64; 3] = [3, 5, 7];
pub const DEFAULT_SEED: u64 = 0x05ee_d1e4;

/// (id, name, budget in seconds)
pub const CRITERIA: [(u32, &str, u64); 11] = [
    (1, "local-fe", 5),
    (2, "local-rh", 10),
    (3, "oracle-orbital", 60),
    (4, "weights", 5),
    (5, "hecke-cross", 30),
    (6, "zagier-dual", 60),
    (7, "pgt-q", 120),
    (8, "exp-sums", 60),
    (9, "dirichlet-identity", 30),
    (10, "lattice", 120),
    (11, "pgt-qi", 300),
];

#[derive(Clone, Debug)]
pub struct AcceptanceOptions {
    pub primes: Vec<u64>,
    pub seed: u64,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        AcceptanceOptions { primes: DEFAULT_PRIMES.to_vec(), seed: DEFAULT_SEED }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    /// The numerical check held.
    pub check: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionResult {
    pub fn pass(&self) -> bool {
        self.check && self.elapsed <= self.budget
    }

    /// One line: `PASS  3 oracle-orbital   0.41s/60s  <detail>`.
    pub fn line(&self) -> String {
        let verdict = if self.pass() { "PASS" } else { "FAIL" };
        let timing = format!("{:.2}s/{}s", self.elapsed.as_secs_f64(), self.budget.as_secs());
        format!("{verdict} {:>2} {:<18} {:>12}  {}", self.id, self.name, timing, self.detail)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn local_types() -> impl Iterator<Item = LocalType> {
    GRID_Q.into_iter().flat_map(|q| [-1i8, 0, 1].map(|e| LocalType { q, epsilon: e }))
}

fn hecke_grid() -> impl Iterator<Item = HeckeLocalParams> {
    local_types().flat_map(|local| {
        (0..=GRID_MAX).flat_map(move |l| (1..=GRID_MAX).map(move |n| HeckeLocalParams { local, l, n }))
    })
}

type Outcome = Result<(bool, String)>;

fn local_fe() -> Outcome {
    let mut total = 0;
    let mut bad = Vec::new();
    for local in local_types() {
        for l in 0..=GRID_MAX {
            total += 1;
            if !check_functional_equation(&local_poly_principal(local, l))? {
                bad.push(format!("principal q={} e={} l={l}", local.q, local.epsilon));
            }
        }
    }
    for params in hecke_grid() {
        total += 1;
        if !check_functional_equation(&local_poly_hecke(params))? {
            bad.push(format!("hecke {params:?}"));
        }
    }
    Ok((bad.is_empty(), format!("{total} polynomials, {} asymmetric {}", bad.len(), bad.join("; "))))
}

fn local_rh() -> Outcome {
    let tol = 1e-9;
    let mut off = Vec::new();
    let mut total = 0;
    for local in local_types() {
        for l in 0..=GRID_MAX {
            total += 1;
            if !roots_on_unit_circle(&local_poly_principal(local, l), tol)? {
                off.push(format!("q={} e={} l={l}", local.q, local.epsilon));
            }
        }
    }
    // for each q some member of the (l=1, n=1) Hecke family has a root of modulus q^{±1/2}
    let mut missing = Vec::new();
    let mut witnesses = Vec::new();
    for q in GRID_Q {
        let target = (q as f64).sqrt();
        let hit = [-1i8, 0, 1].into_iter().find(|&e| {
            let h = local_poly_hecke(HeckeLocalParams { local: LocalType { q, epsilon: e }, l: 1, n: 1 });
            h.roots()
                .map(|rs| rs.iter().any(|z| (z.norm() - target).abs() <= tol || (z.norm() - 1.0 / target).abs() <= tol))
                .unwrap_or(false)
        });
        match hit {
            Some(e) => witnesses.push(format!("q={q}:e={e}")),
            None => missing.push(q),
        }
    }
    let ok = off.is_empty() && missing.is_empty();
    Ok((
        ok,
        format!(
            "{total} principal, {} off circle; q^(±1/2) roots at {} {}",
            off.len(),
            witnesses.join(","),
            if missing.is_empty() { String::new() } else { format!("missing {missing:?}") }
        ),
    ))
}

fn oracle_orbital(primes: &[u64]) -> Outcome {
    let mut cells = 0u64;
    let mut bad = Vec::new();
    for &p in primes {
        if p % 2 == 0 || !is_prime_u64(p) {
            return Err(Error::OutOfRange(format!("oracle prime {p} must be an odd prime")));
        }
        for e in [-1i8, 0, 1] {
            let models = LocalQuadraticModel::search(p, e)?;
            if models.len() < 3 {
                bad.push(format!("p={p} e={e}: only {} models", models.len()));
                continue;
            }
            let picks = [models[0], models[models.len() / 2], models[models.len() - 1]];
            for m in picks {
                for n in 1..=4 {
                    for l in 0..=4 {
                        let params = HeckeLocalParams { local: LocalType { q: p, epsilon: e }, l, n };
                        for r in 0..=l {
                            for (which, closed) in
                                [(Which::N0, count_n0_closed(params, r)?), (Which::NInf, count_ninf_closed(params, r)?)]
                            {
                                cells += 1;
                                let brute = count_bruteforce(m, params, r, which)?;
                                if brute != closed {
                                    bad.push(format!("{m:?} n={n} l={l} r={r} {which:?}: {brute} vs {closed}"));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((bad.is_empty(), format!("{cells} cells over p={primes:?}, {} mismatches {}", bad.len(), bad.join("; "))))
}

fn weights(seed: u64) -> Outcome {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = 0f64;
    for _ in 0..100 {
        let local = LocalType { q: GRID_Q[rng.gen_range(0..GRID_Q.len())], epsilon: rng.gen_range(-1..=1) };
        let r = rng.gen_range(0..=GRID_MAX);
        let s = c(rng.gen_range(-1.5..1.5), rng.gen_range(-8.0..8.0));
        let a = assemble_weight(local, r, s);
        let b = rs_weight(local, r, s);
        worst = worst.max((a - b).norm() / b.norm());
    }
    let mut worst_p = 0f64;
    for local in local_types() {
        for r in 0..=GRID_MAX {
            for s in [c(0.5, 0.0), c(1.0, 0.0), c(1.3, 0.4), c(0.25, -3.0), c(2.0, 7.5)] {
                let a = legendre_p(local, r, s);
                let b = legendre_p_oracle(local, r, s);
                worst_p = worst_p.max((a - b).norm() / b.norm().max(f64::MIN_POSITIVE));
            }
        }
    }
    let ok = worst <= 1e-10 && worst_p <= 1e-12;
    Ok((ok, format!("assembly rel err {worst:.2e} (≤1e-10), legendre rel err {worst_p:.2e} (≤1e-12)")))
}

fn hecke_cross(seed: u64) -> Outcome {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x5);
    let points: Vec<Complex64> = (0..5).map(|_| c(rng.gen_range(-1.0..2.0), rng.gen_range(-5.0..5.0))).collect();
    let mut worst = 0f64;
    let mut bad = Vec::new();
    let mut cells = 0;
    for params in hecke_grid() {
        let poly = local_poly_hecke(params);
        for &s in &points {
            cells += 1;
            let a = hecke_factor_from_counts(params, s)?;
            let b = poly.eval_at_s(s);
            if b.norm() == 0.0 {
                if a.norm() != 0.0 {
                    bad.push(format!("{params:?} s={s}: {a} vs 0"));
                }
                continue;
            }
            let rel = (a - b).norm() / b.norm();
            worst = worst.max(rel);
            if rel > 1e-10 {
                bad.push(format!("{params:?} s={s}: rel {rel:.2e}"));
            }
        }
    }
    Ok((bad.is_empty(), format!("{cells} evaluations, worst rel err {worst:.2e} (≤1e-10) {}", bad.join("; "))))
}

fn zagier_dual() -> Outcome {
    let q_max = 10_000;
    let table = IdealTable::new(Ring::Rat, q_max)?;
    let two = c(2.0, 0.0);
    let mut worst = 0f64;
    for t in 3i64..=30 {
        let d = fundamental_discriminant(&RingElem::rat(t * t - 4))?;
        let a = zagier_l_series_with(two, &ZagierParams::new(d, q_max), &table)?;
        let b = zagier_l_factored(two, &d, 200_000)?;
        worst = worst.max((a - b).norm());
    }
    let mut mismatches = 0;
    for t in 3i64..=20 {
        let delta = RingElem::rat(t * t - 4);
        for n in 1..=200u64 {
            if conjugacy_count(t, n) != rho_q(&delta, &RingElem::rat(n as i64))? {
                mismatches += 1;
            }
        }
    }
    let ok = worst <= 1e-3 && mismatches == 0;
    Ok((ok, format!("series vs factored at s=2: max abs err {worst:.2e} (≤1e-3); per-n count mismatches {mismatches}")))
}

fn pgt_q() -> Outcome {
    let lo = psi_modular(1e2, Orientation::Oriented)?;
    let hi = psi_modular(1e4, Orientation::Oriented)?;
    let ok = (0.85..=1.15).contains(&hi.ratio) && (hi.ratio - 1.0).abs() < (lo.ratio - 1.0).abs();
    Ok((ok, format!("oriented Ψ(x)/x: {:.4} at 1e2, {:.4} at 1e4 (want [0.85,1.15], improving)", lo.ratio, hi.ratio)))
}

fn exp_sums() -> Outcome {
    let mut bad = Vec::new();
    // k = 0 closed form
    let mut zero_cells = 0;
    let grids = [
        (
            Ring::Rat,
            (1..=400).map(RingElem::rat).collect::<Vec<_>>(),
            vec![RingElem::rat(1), RingElem::rat(2), RingElem::rat(3)],
        ),
        (
            Ring::Gauss,
            ideals_up_to(Ring::Gauss, 400),
            vec![RingElem::gauss(1, 0), RingElem::gauss(1, 1), RingElem::gauss(2, 0), RingElem::gauss(3, 0)],
        ),
    ];
    for (_, qs, ns) in &grids {
        for q in qs {
            for n in ns {
                zero_cells += 1;
                let exact = s_q_zero_exact(q, n)?;
                let closed = s_q_zero_closed(q, n)?;
                if exact != closed {
                    bad.push(format!("S_{q}(0,{n}) = {exact} vs {closed}"));
                }
            }
        }
    }
    // Kloosterman reduction at primes coprime to N
    let mut worst_k = 0f64;
    for p in (2..=97i64).filter(|&p| is_prime_u64(p as u64)) {
        for n in [1i64, 2, 3] {
            if n % p == 0 {
                continue;
            }
            for k in 0..p {
                let (a, b) =
                    kloosterman_reduction(&ExpSumParams::new(RingElem::rat(p), RingElem::rat(k), RingElem::rat(n)))?;
                worst_k = worst_k.max((a - b).norm());
            }
        }
    }
    for q in ideals_up_to(Ring::Gauss, 97).into_iter().filter(is_prime) {
        for n in [RingElem::gauss(1, 0), RingElem::gauss(1, 1), RingElem::gauss(3, 0)] {
            if !q.coprime(&n) {
                continue;
            }
            for k in [RingElem::gauss(1, 0), RingElem::gauss(2, 1), RingElem::gauss(0, 3)] {
                let (a, b) = kloosterman_reduction(&ExpSumParams::new(q, k, n))?;
                worst_k = worst_k.max((a - b).norm());
            }
        }
    }
    if worst_k > 1e-10 {
        bad.push(format!("Kloosterman reduction err {worst_k:.2e}"));
    }
    // square-root magnitude at even powers of odd primes dividing N
    let mut worst_m = 0f64;
    let mut powers = 0;
    let mut prime_powers: Vec<(RingElem, RingElem)> = Vec::new();
    for p in (3..=97i64).filter(|&p| is_prime_u64(p as u64)) {
        let mut q = p * p;
        while q <= 10_000 {
            prime_powers.push((RingElem::rat(p), RingElem::rat(q)));
            q *= p * p;
        }
    }
    for p in ideals_up_to(Ring::Gauss, 100).into_iter().filter(|p| is_prime(p) && p.norm() % 2 == 1) {
        let mut q = p * p;
        while q.norm() <= 10_000 {
            prime_powers.push((p, q));
            q = q * p * p;
        }
    }
    for (p, q) in prime_powers {
        let one = RingElem::one(p.ring);
        let ks = match p.ring {
            Ring::Rat => vec![one, RingElem::rat(2)],
            Ring::Gauss => vec![one, RingElem::gauss(1, 1)],
        };
        for k in ks {
            powers += 1;
            let v = s_q_bruteforce(&ExpSumParams::new(q, k, p))?.norm();
            worst_m = worst_m.max((v - (q.norm() as f64).sqrt()).abs());
        }
    }
    if worst_m > 1e-8 {
        bad.push(format!("square-root magnitude err {worst_m:.2e}"));
    }
    Ok((
        bad.is_empty(),
        format!(
            "k=0: {zero_cells} cells; Kloosterman err {worst_k:.2e} (≤1e-10); |S|=Nr(q)^(1/2) on {powers} odd prime powers, err {worst_m:.2e} {}",
            bad.join("; ")
        ),
    ))
}

fn dirichlet_identity() -> Outcome {
    let one = c(1.0, 0.0);
    let mut parts = Vec::new();
    let mut worst = 0f64;
    for n in [RingElem::gauss(1, 0), RingElem::gauss(1, 1), RingElem::gauss(3, 0)] {
        let chk = dirichlet_identity_check(one, &n, 10_000)?;
        let err = (chk.lhs - chk.rhs).norm();
        worst = worst.max(err);
        parts.push(format!("N={n}: {err:.2e}"));
    }
    Ok((worst <= 1e-4, format!("|lhs−rhs| at s=1 (≤1e-4): {}", parts.join(", "))))
}

fn lattice() -> Outcome {
    let n = RingElem::gauss(1, 1);
    let mut ok = true;
    let mut parts = Vec::new();
    for q in [RingElem::gauss(1, 0), RingElem::gauss(1, 1)] {
        let mut errs = Vec::new();
        for z in [1e2, 1e3, 1e4] {
            let s = lambda_lattice_sum(z, &q, &n)?;
            // a vanishing main term is measured against the q = 1 scale instead
            let e = if s.main != 0.0 { (s.value / s.main - 1.0).abs() } else { s.error.abs() / s.scale };
            errs.push(e);
        }
        let mono = if errs.iter().any(|&e| e > 0.0) { errs.windows(2).all(|w| w[1] < w[0]) } else { true };
        ok &= mono;
        parts.push(format!("q={q}: {}", errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", ")));
    }
    Ok((ok, format!("relative error at Z=1e2,1e3,1e4: {}", parts.join("; "))))
}

fn pgt_qi() -> Outcome {
    let spec = SubgroupSpec::new(Ring::Gauss, SubgroupKind::Principal, RingElem::gauss(1, 1))?;
    let lo = psi_principal(&spec, 50.0, Orientation::NonOriented)?;
    let hi = psi_principal(&spec, 200.0, Orientation::NonOriented)?;
    let ok = (0.5..=1.5).contains(&hi.ratio) && (hi.ratio - 1.0).abs() < (lo.ratio - 1.0).abs();
    Ok((
        ok,
        format!("non-oriented Ψ(x)/(x²/4): {:.4} at 50, {:.4} at 200 (want [0.5,1.5], improving)", lo.ratio, hi.ratio),
    ))
}

pub fn criterion_name(id: u32) -> Option<&'static str> {
    CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1)
}

/// Runs one criterion; numeric errors become a failing result rather than an abort.
pub fn run_criterion(id: u32, opts: &AcceptanceOptions) -> Result<CriterionResult> {
    let &(_, name, budget) =
        CRITERIA.iter().find(|c| c.0 == id).ok_or_else(|| Error::OutOfRange(format!("no criterion {id}")))?;
    let start = Instant::now();
    let outcome = match id {
        1 => local_fe(),
        2 => local_rh(),
        3 => oracle_orbital(&opts.primes),
        4 => weights(opts.seed),
        5 => hecke_cross(opts.seed),
        6 => zagier_dual(),
        7 => pgt_q(),
        8 => exp_sums(),
        9 => dirichlet_identity(),
        10 => lattice(),
        _ => pgt_qi(),
    };
    let elapsed = start.elapsed();
    let (check, detail) = match outcome {
        Ok(v) => v,
        Err(Error::OutOfRange(m)) if id == 3 => return Err(Error::OutOfRange(m)),
        Err(e) => (false, format!("error: {e}")),
    };
    Ok(CriterionResult {
        id,
        name,
        check,
        detail: detail.trim_end().to_string(),
        elapsed,
        budget: Duration::from_secs(budget),
    })
}

/// Runs the selected criteria (all when `only` is empty) in id order.
pub fn run_all(only: &[u32], opts: &AcceptanceOptions) -> Result<Vec<CriterionResult>> {
    let ids: Vec<u32> = if only.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { only.to_vec() };
    ids.into_iter().map(|id| run_criterion(id, opts)).collect()
}
