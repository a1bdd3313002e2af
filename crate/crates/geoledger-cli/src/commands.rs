use std::fmt::Write;

use clap::Args;
use num_complex::Complex64;
use serde_json::{json, Value};

use geoledger::acceptance::{criterion_name, run_all, AcceptanceOptions, CRITERIA};
use geoledger::exp_sums::{kloosterman_reduction, s_q_weil_check, s_q_zero_closed, ExpSumParams};
use geoledger::geodesic_count::{
    fmt_sig, larger_eigenvalue, main_term, psi_principal_with, Orientation, PsiReport, SubgroupKind, SubgroupSpec,
    GAUSS_SERIES_NORM,
};
use geoledger::local_factors::{
    assemble_weight, check_functional_equation, legendre_p, legendre_p_oracle, local_poly_hecke, local_poly_principal,
    roots_on_unit_circle, rs_weight, HeckeLocalParams, LocalType,
};
use geoledger::number_base::{fundamental_discriminant, Ring, RingElem};
use geoledger::orbital_counts::{
    count_bruteforce, count_n0_closed, count_ninf_closed, rso_value, LocalQuadraticModel, Which,
};
use geoledger::zagier_l::{zagier_l_factored, zagier_l_series, ZagierParams};

use crate::config::{Format, RunConfig, DEFAULT_Q_MAX};
use crate::emit::{complex, CliError, CliResult, Output, EXIT_VERIFY_FAILED};
use crate::Command;

const RH_TOL: f64 = 1e-9;

#[derive(Args, Debug)]
pub struct PsiArgs {
    /// full, principal or hecke
    #[arg(long, default_value = "full")]
    pub subgroup: String,
    #[arg(long, default_value = "1")]
    pub level: String,
    #[arg(long)]
    pub x: f64,
    /// count each geodesic in both directions
    #[arg(long)]
    pub oriented: bool,
    /// emit one row per trace instead of the summary
    #[arg(long)]
    pub traces: bool,
}

#[derive(Args, Debug)]
pub struct ZagierArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub delta: String,
    /// a, a+bi or a-bi
    #[arg(long, default_value = "2", allow_hyphen_values = true)]
    pub s: String,
    /// series, factored or both
    #[arg(long, default_value = "both")]
    pub method: String,
    /// terms of the character sum in the factored form
    #[arg(long, default_value_t = 200_000)]
    pub truncation: u64,
}

#[derive(Args, Debug)]
pub struct LocalPolyArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub l: u32,
    /// Hecke level exponent; omit for the principal polynomial
    #[arg(long)]
    pub n: Option<u32>,
    /// unr, ram or split
    #[arg(long = "type", default_value = "unr")]
    pub kind: String,
    /// fe and/or rh
    #[arg(long, value_delimiter = ',')]
    pub check: Vec<String>,
    /// print the serialized form instead of the rendered polynomial
    #[arg(long)]
    pub raw: bool,
}

#[derive(Args, Debug)]
pub struct WeightsArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long = "type", default_value = "unr")]
    pub kind: String,
    #[arg(long)]
    pub r: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub s: String,
}

#[derive(Args, Debug)]
pub struct OrbitalArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long = "type", default_value = "unr")]
    pub kind: String,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub l: u32,
    /// also enumerate the congruences on the first model of the type
    #[arg(long)]
    pub bruteforce: bool,
}

#[derive(Args, Debug)]
pub struct ExpsumArgs {
    #[arg(long)]
    pub q: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub k: String,
    #[arg(long, default_value = "1")]
    pub n: String,
    /// compare against the Kloosterman sum (needs (q, N) = 1)
    #[arg(long)]
    pub kloosterman: bool,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, default_value = "full")]
    pub subgroup: String,
    #[arg(long, default_value = "1")]
    pub level: String,
    #[arg(long, default_value_t = 10.0)]
    pub x_min: f64,
    #[arg(long)]
    pub x_max: f64,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    #[arg(long)]
    pub oriented: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// criterion names or ids, comma separated
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// primes for the orbital oracle
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<u64>,
}

pub fn run(cmd: &Command, cfg: &RunConfig) -> CliResult<Output> {
    match cmd {
        Command::Psi(a) => psi(a, cfg),
        Command::ZagierL(a) => zagier(a, cfg),
        Command::LocalPoly(a) => local_poly(a, cfg),
        Command::Weights(a) => weights(a, cfg),
        Command::OrbitalCount(a) => orbital(a, cfg),
        Command::Expsum(a) => expsum(a, cfg),
        Command::PgtScan(a) => scan(a, cfg),
        Command::Verify(a) => verify(a, cfg),
    }
}

fn elem(ring: Ring, s: &str) -> CliResult<RingElem> {
    RingElem::parse(ring, s).map_err(|e| CliError::usage(e.to_string()))
}

pub fn parse_complex(s: &str) -> CliResult<Complex64> {
    let bad = || CliError::usage(format!("cannot parse complex number '{s}'"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(body) = t.strip_suffix('i') {
        let split =
            body.char_indices().skip(1).filter(|&(i, c)| (c == '+' || c == '-') && !body[..i].ends_with('e')).last();
        let (re, im) = match split {
            Some((i, _)) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            v => v,
        };
        Ok(Complex64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?))
    } else {
        Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0))
    }
}

pub fn parse_type(s: &str) -> CliResult<i8> {
    match s.to_ascii_lowercase().as_str() {
        "unr" | "unramified" | "inert" | "-1" => Ok(-1),
        "ram" | "ramified" | "0" => Ok(0),
        "split" | "1" | "+1" => Ok(1),
        _ => Err(CliError::usage(format!("unknown local type '{s}' (unr, ram or split)"))),
    }
}

fn local_type(q: u64, kind: &str) -> CliResult<LocalType> {
    LocalType::new(q, parse_type(kind)?).map_err(|e| CliError::usage(e.to_string()))
}

fn subgroup(ring: Ring, kind: &str, level: &str) -> CliResult<SubgroupSpec> {
    let kind = match kind.to_ascii_lowercase().as_str() {
        "full" => SubgroupKind::Full,
        "principal" => SubgroupKind::Principal,
        "hecke" => SubgroupKind::Hecke,
        _ => return Err(CliError::usage(format!("unknown subgroup '{kind}' (full, principal or hecke)"))),
    };
    SubgroupSpec::new(ring, kind, elem(ring, level)?).map_err(|e| CliError::usage(e.to_string()))
}

fn ring_label(r: Ring) -> &'static str {
    match r {
        Ring::Rat => "q",
        Ring::Gauss => "qi",
    }
}

fn kind_label(k: SubgroupKind) -> &'static str {
    match k {
        SubgroupKind::Full => "full",
        SubgroupKind::Principal => "principal",
        SubgroupKind::Hecke => "hecke",
    }
}

fn orientation(oriented: bool) -> Orientation {
    if oriented {
        Orientation::Oriented
    } else {
        Orientation::NonOriented
    }
}

fn positive_x(x: f64) -> CliResult<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(CliError::usage(format!("x must be positive, got {x}")))
    }
}

fn psi(a: &PsiArgs, cfg: &RunConfig) -> CliResult<Output> {
    positive_x(a.x)?;
    let spec = subgroup(cfg.ring, &a.subgroup, &a.level)?;
    let rep = psi_principal_with(&spec, a.x, orientation(a.oriented), cfg.q_max.unwrap_or(GAUSS_SERIES_NORM))?;
    Ok(match cfg.format {
        Format::Csv if a.traces => Output::text(rep.to_csv()),
        Format::Csv => Output::text(format!(
            "x,ring,subgroup,level,orientation,traces,total,main_term,ratio\n{},{},{},{},{},{},{},{},{}\n",
            fmt_sig(rep.x),
            ring_label(spec.ring),
            kind_label(spec.kind),
            spec.level,
            rep.orientation.label(),
            rep.traces.len(),
            fmt_sig(rep.total),
            fmt_sig(rep.main_term),
            fmt_sig(rep.ratio)
        )),
        Format::Json => Output::json(&psi_json(&spec, &rep, a.traces)),
    })
}

fn psi_json(spec: &SubgroupSpec, rep: &PsiReport, traces: bool) -> Value {
    let mut v = json!({
        "x": rep.x,
        "ring": ring_label(spec.ring),
        "subgroup": kind_label(spec.kind),
        "level": spec.level.to_string(),
        "orientation": rep.orientation.label(),
        "total": rep.total,
        "main_term": rep.main_term,
        "ratio": rep.ratio,
    });
    if traces {
        v["traces"] = rep
            .traces
            .iter()
            .map(|t| {
                json!({
                    "t": t.t.to_string(),
                    "delta": t.delta.delta.to_string(),
                    "D": t.delta.fundamental.to_string(),
                    "l": t.delta.conductor.to_string(),
                    "L_value": t.l_value,
                    "term": t.term,
                })
            })
            .collect();
    }
    v
}

fn zagier(a: &ZagierArgs, cfg: &RunConfig) -> CliResult<Output> {
    let s = parse_complex(&a.s)?;
    let d = fundamental_discriminant(&elem(cfg.ring, &a.delta)?)?;
    let (want_series, want_factored) = match a.method.as_str() {
        "series" => (true, false),
        "factored" => (false, true),
        "both" => (true, true),
        m => return Err(CliError::usage(format!("unknown method '{m}' (series, factored or both)"))),
    };
    let mut rows = Vec::new();
    if want_series {
        rows.push(("series", zagier_l_series(s, &ZagierParams::new(d, cfg.q_max.unwrap_or(DEFAULT_Q_MAX)))?));
    }
    if want_factored {
        rows.push(("factored", zagier_l_factored(s, &d, a.truncation)?));
    }
    Ok(match cfg.format {
        Format::Csv => {
            let mut out = String::from("delta,D,l,s_re,s_im,method,re,im\n");
            for (m, v) in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{m},{},{}",
                    d.delta,
                    d.fundamental,
                    d.conductor,
                    fmt_sig(s.re),
                    fmt_sig(s.im),
                    fmt_sig(v.re),
                    fmt_sig(v.im)
                );
            }
            Output::text(out)
        }
        Format::Json => {
            let mut v = json!({
                "delta": d.delta.to_string(),
                "D": d.fundamental.to_string(),
                "l": d.conductor.to_string(),
                "s": complex(s),
                "q_max": cfg.q_max.unwrap_or(DEFAULT_Q_MAX),
            });
            for (m, z) in rows {
                v[m] = complex(z);
            }
            Output::json(&v)
        }
    })
}

fn local_poly(a: &LocalPolyArgs, cfg: &RunConfig) -> CliResult<Output> {
    let local = local_type(a.q, &a.kind)?;
    let poly = match a.n {
        Some(n) => local_poly_hecke(HeckeLocalParams { local, l: a.l, n }),
        None => local_poly_principal(local, a.l),
    };
    let mut verdicts = Vec::new();
    for c in &a.check {
        let ok = match c.as_str() {
            "fe" => check_functional_equation(&poly)?,
            "rh" => roots_on_unit_circle(&poly, RH_TOL)?,
            other => return Err(CliError::usage(format!("unknown check '{other}' (fe or rh)"))),
        };
        verdicts.push((c.as_str(), ok));
    }
    Ok(match cfg.format {
        Format::Csv => {
            let mut out = format!("{}\n", if a.raw { poly.serialize() } else { poly.pretty() });
            for (c, ok) in verdicts {
                let _ = writeln!(out, "{c}: {}", if ok { "pass" } else { "FAIL" });
            }
            Output::text(out)
        }
        Format::Json => {
            let roots: Vec<Value> =
                if poly.is_zero() { Vec::new() } else { poly.roots()?.into_iter().map(complex).collect() };
            let mut v = json!({
                "q": a.q,
                "type": local.label(),
                "l": a.l,
                "n": a.n,
                "serialized": poly.serialize(),
                "pretty": poly.pretty(),
                "roots": roots,
            });
            for (c, ok) in verdicts {
                v[c] = json!(ok);
            }
            Output::json(&v)
        }
    })
}

fn weights(a: &WeightsArgs, cfg: &RunConfig) -> CliResult<Output> {
    let local = local_type(a.q, &a.kind)?;
    let s = parse_complex(&a.s)?;
    let mut rows = vec![("rs_weight", rs_weight(local, a.r, s)), ("assemble_weight", assemble_weight(local, a.r, s))];
    rows.push(("legendre_p", legendre_p(local, a.r, s)));
    rows.push(("legendre_p_oracle", legendre_p_oracle(local, a.r, s)));
    Ok(match cfg.format {
        Format::Csv => {
            let mut out = String::from("quantity,re,im\n");
            for (name, z) in rows {
                let _ = writeln!(out, "{name},{},{}", fmt_sig(z.re), fmt_sig(z.im));
            }
            Output::text(out)
        }
        Format::Json => {
            let mut v = json!({ "q": a.q, "type": local.label(), "r": a.r, "s": complex(s) });
            for (name, z) in rows {
                v[name] = complex(z);
            }
            Output::json(&v)
        }
    })
}

fn orbital(a: &OrbitalArgs, cfg: &RunConfig) -> CliResult<Output> {
    let local = local_type(a.p, &a.kind)?;
    if a.n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let params = HeckeLocalParams { local, l: a.l, n: a.n };
    let model = if a.bruteforce {
        let models = LocalQuadraticModel::search(a.p, local.epsilon).map_err(|e| CliError::usage(e.to_string()))?;
        Some(*models.first().ok_or_else(|| CliError::usage("no model of this type"))?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for r in 0..=a.l {
        let n0 = count_n0_closed(params, r)?;
        let ninf = count_ninf_closed(params, r)?;
        let rso = rso_value(params, r)?;
        let brute = match model {
            Some(m) => Some((count_bruteforce(m, params, r, Which::N0)?, count_bruteforce(m, params, r, Which::NInf)?)),
            None => None,
        };
        rows.push((r, n0, ninf, rso, brute));
    }
    Ok(match cfg.format {
        Format::Csv => {
            let mut out = String::from("r,n0,ninf,rso");
            if model.is_some() {
                out.push_str(",n0_brute,ninf_brute");
            }
            out.push('\n');
            for (r, n0, ninf, rso, brute) in rows {
                let _ = write!(out, "{r},{n0},{ninf},{rso}");
                if let Some((b0, bi)) = brute {
                    let _ = write!(out, ",{b0},{bi}");
                }
                out.push('\n');
            }
            Output::text(out)
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|(r, n0, ninf, rso, brute)| {
                    let mut v = json!({ "r": r, "n0": n0, "ninf": ninf, "rso": rso.to_string() });
                    if let Some((b0, bi)) = brute {
                        v["n0_brute"] = json!(b0);
                        v["ninf_brute"] = json!(bi);
                    }
                    v
                })
                .collect();
            let model = model.map(|m| json!({ "a": m.a, "b": m.b }));
            Output::json(&json!({ "p": a.p, "type": local.label(), "n": a.n, "l": a.l, "model": model, "rows": rows }))
        }
    })
}

fn expsum(a: &ExpsumArgs, cfg: &RunConfig) -> CliResult<Output> {
    let q = elem(cfg.ring, &a.q)?;
    let k = elem(cfg.ring, &a.k)?;
    let n = elem(cfg.ring, &a.n)?;
    let params = ExpSumParams::new(q, k, n);
    let w = s_q_weil_check(&params)?;
    let closed = if k.is_zero() { Some(s_q_zero_closed(&q, &n)?) } else { None };
    let kl = if a.kloosterman { Some(kloosterman_reduction(&params)?.1) } else { None };
    Ok(match cfg.format {
        Format::Csv => {
            let mut out = String::from("q,k,N,re,im,abs,bound,within_bound");
            let mut row = format!(
                "{q},{k},{n},{},{},{},{},{}",
                fmt_sig(w.value.re),
                fmt_sig(w.value.im),
                fmt_sig(w.value.norm()),
                fmt_sig(w.bound),
                w.ok
            );
            if let Some(c) = closed {
                out.push_str(",closed_k0");
                let _ = write!(row, ",{c}");
            }
            if let Some(z) = kl {
                out.push_str(",kloosterman_re,kloosterman_im");
                let _ = write!(row, ",{},{}", fmt_sig(z.re), fmt_sig(z.im));
            }
            Output::text(format!("{out}\n{row}\n"))
        }
        Format::Json => {
            let mut v = json!({
                "q": q.to_string(), "k": k.to_string(), "N": n.to_string(),
                "value": complex(w.value), "bound": w.bound, "within_bound": w.ok,
            });
            if let Some(c) = closed {
                v["closed_k0"] = json!(c);
            }
            if let Some(z) = kl {
                v["kloosterman"] = complex(z);
            }
            Output::json(&v)
        }
    })
}

fn scan(a: &ScanArgs, cfg: &RunConfig) -> CliResult<Output> {
    positive_x(a.x_min)?;
    positive_x(a.x_max)?;
    if a.x_max < a.x_min || a.points == 0 {
        return Err(CliError::usage("need x_min ≤ x_max and at least one point"));
    }
    let spec = subgroup(cfg.ring, &a.subgroup, &a.level)?;
    let o = orientation(a.oriented);
    let rep = psi_principal_with(&spec, a.x_max, o, cfg.q_max.unwrap_or(GAUSS_SERIES_NORM))?;
    // terms do not depend on x, so one report at x_max serves every grid point
    let norms: Vec<(f64, f64)> = rep.traces.iter().map(|t| (larger_eigenvalue(t.t).powi(2), t.term)).collect();
    let grid: Vec<f64> = if a.points == 1 {
        vec![a.x_max]
    } else {
        let step = (a.x_max / a.x_min).ln() / (a.points - 1) as f64;
        (0..a.points).map(|i| if i + 1 == a.points { a.x_max } else { a.x_min * (step * i as f64).exp() }).collect()
    };
    let rows: Vec<(f64, f64, f64)> = grid
        .into_iter()
        .map(|x| {
            let total = norms.iter().filter(|(nv, _)| *nv <= x * (1.0 + 1e-12)).fold(0.0, |acc, (_, t)| acc + t);
            (x, total, main_term(x, spec.ring, o))
        })
        .collect();
    Ok(match cfg.format {
        Format::Csv => {
            let mut out = String::from("x,total,main_term,ratio\n");
            for (x, t, m) in rows {
                let _ = writeln!(out, "{},{},{},{}", fmt_sig(x), fmt_sig(t), fmt_sig(m), fmt_sig(t / m));
            }
            Output::text(out)
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|(x, t, m)| json!({ "x": x, "total": t, "main_term": m, "ratio": t / m }))
                .collect();
            Output::json(&json!({
                "ring": ring_label(spec.ring),
                "subgroup": kind_label(spec.kind),
                "level": spec.level.to_string(),
                "orientation": o.label(),
                "rows": rows,
            }))
        }
    })
}

fn criterion_id(s: &str) -> CliResult<u32> {
    if let Ok(id) = s.parse::<u32>() {
        if criterion_name(id).is_some() {
            return Ok(id);
        }
    }
    CRITERIA.iter().find(|c| c.1 == s).map(|c| c.0).ok_or_else(|| CliError::usage(format!("unknown criterion '{s}'")))
}

fn verify(a: &VerifyArgs, cfg: &RunConfig) -> CliResult<Output> {
    let only = a.only.iter().map(|s| criterion_id(s)).collect::<CliResult<Vec<_>>>()?;
    let mut opts = AcceptanceOptions::default();
    if !a.p.is_empty() {
        opts.primes = a.p.clone();
    }
    let results = run_all(&only, &opts).map_err(|e| CliError::usage(e.to_string()))?;
    let all_pass = results.iter().all(|r| r.pass());
    let timings: Vec<String> = results.iter().map(|r| format!("{}={:.2}s", r.name, r.elapsed.as_secs_f64())).collect();
    let body = match cfg.format {
        Format::Csv => {
            let mut out = String::new();
            for r in &results {
                let verdict = if r.pass() { "PASS" } else { "FAIL" };
                let over = if r.check && !r.pass() { " (over time budget)" } else { "" };
                let _ = writeln!(out, "{verdict} {:>2} {:<18} {}{over}", r.id, r.name, r.detail);
            }
            let _ =
                writeln!(out, "{} of {} criteria passed", results.iter().filter(|r| r.pass()).count(), results.len());
            out
        }
        Format::Json => {
            let rows: Vec<Value> = results
                .iter()
                .map(|r| {
                    json!({
                        "id": r.id, "name": r.name, "pass": r.pass(), "check": r.check,
                        "detail": r.detail, "budget_s": r.budget.as_secs(),
                    })
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&json!({ "pass": all_pass, "criteria": rows })).expect("json"))
        }
    };
    Ok(Output {
        body,
        footer: Some(format!("# timings: {}", timings.join(" "))),
        status: if all_pass { 0 } else { EXIT_VERIFY_FAILED },
    })
}
