use crate::args::*;
use crate::output::{csv_document, json_document, svg_scatter, Table};
use num_complex::Complex64 as C;
use rayon::prelude::*;
use resolab::identities::{
    check_asymptotics, check_product_identity, check_reflection, covered_radius, hadamard_reconstruct_truncated,
    verify_counting_trend, IdentityReport,
};
use resolab::jost::JostSolver;
use resolab::spectrum::{find_zeros, Analytic, FunctionKind, OmegaFn, Rect, SFn, ZeroSet};
use resolab::uniqueness::{g1, theorem_demo, DemoConfig, Subset, Theorem};
use resolab::{Error, Potential, PotentialPair, Result};
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};

/// How a successful run ends: the exit code is 1 only for `Fail`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

pub struct Output {
    pub text: String,
    pub outcome: Outcome,
}

impl Output {
    fn pass(text: String) -> Self {
        Output { text, outcome: Outcome::Pass }
    }
}

struct Loaded {
    path: PathBuf,
    q: Potential,
}

fn load(paths: &[PathBuf], expected: Option<usize>) -> Result<Vec<Loaded>> {
    if let Some(n) = expected {
        if paths.len() != n {
            return Err(Error::Domain(format!("expected {n} --potential argument(s), got {}", paths.len())));
        }
    }
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Parse { field: "<file>".into(), message: format!("{}: {e}", p.display()) })?;
            let q = Potential::from_json_str(&text).map_err(|e| match e {
                Error::Parse { field, message } => {
                    Error::Parse { field, message: format!("{message} (in {})", p.display()) }
                }
                other => other,
            })?;
            Ok(Loaded { path: p.clone(), q })
        })
        .collect()
}

fn potentials_json(ps: &[Loaded]) -> Value {
    json!(ps.iter().map(|p| json!({"path": p.path.display().to_string(), "digest": p.q.digest()})).collect::<Vec<_>>())
}

fn config(command: &str, ps: &[Loaded], extra: Value) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("potentials".into(), potentials_json(ps));
    if let Value::Object(extra) = extra {
        m.extend(extra);
    }
    m
}

fn wrong_format(command: &str, f: Format) -> Error {
    Error::Domain(format!("`{command}` cannot write {} output", f.as_str()))
}

fn solver(tol: f64) -> JostSolver {
    JostSolver::with_tolerances(tol, tol * 1e-2)
}

pub fn scatter(a: &ScatterArgs) -> Result<Output> {
    check_tol(a.tol)?;
    let ps = load(&a.potentials, Some(1))?;
    let q = &ps[0].q;
    let grid = parse_grid(&a.grid)?;
    let ks = grid.points();
    let real = grid.imag == 0.0;
    if real && ks.iter().any(|k| k.re == 0.0) {
        return Err(Error::Domain("grid contains k = 0, where T and R± are undefined".into()));
    }
    let sol = solver(a.tol);
    let rows: Vec<Vec<Option<f64>>> = ks
        .par_iter()
        .map(|&k| {
            let b = sol.boundary(q, k)?;
            let mut row = vec![Some(k.re), Some(k.im), Some(b.omega.re), Some(b.omega.im), Some(b.s.re), Some(b.s.im)];
            if real {
                let d = sol.scattering(q, k.re)?;
                row.extend([
                    d.t.map(|t| t.norm()),
                    d.r_plus.map(|r| r.norm()),
                    d.r_minus.map(|r| r.norm()),
                    d.unitarity_residual(),
                ]);
            } else {
                row.extend([None; 4]);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let table = Table {
        columns: vec![
            "re_k",
            "im_k",
            "re_omega",
            "im_omega",
            "re_s",
            "im_s",
            "abs_t",
            "abs_r_plus",
            "abs_r_minus",
            "unitarity_residual",
        ],
        rows,
    };
    let cfg = config("scatter", &ps, json!({"grid": grid.describe(), "rtol": a.tol, "atol": a.tol * 1e-2}));
    let text = match a.format {
        Format::Csv => csv_document(&cfg, &table),
        Format::Json => json_document(&cfg, table_json(&table)),
        f => return Err(wrong_format("scatter", f)),
    };
    Ok(Output::pass(text))
}

fn table_json(t: &Table) -> Map<String, Value> {
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|r| {
            let obj: Map<String, Value> =
                t.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.map_or(Value::Null, |v| json!(v)))).collect();
            Value::Object(obj)
        })
        .collect();
    let mut m = Map::new();
    m.insert("rows".into(), Value::Array(rows));
    m
}

fn search(q: &Potential, function: Function, region: Rect, tol: f64) -> Result<ZeroSet> {
    let f: Box<dyn Analytic + '_> = match function {
        Function::Omega => Box::new(OmegaFn::new(q)),
        Function::S => Box::new(SFn::new(q)),
    };
    find_zeros(f.as_ref(), region, tol)
}

pub fn resonances(a: &ResonanceArgs) -> Result<Output> {
    check_tol(a.tol)?;
    let ps = load(&a.potentials, Some(1))?;
    let region = parse_region(&a.region)?;
    let zs = search(&ps[0].q, a.function, region, a.tol)?;
    let function = match a.function {
        Function::Omega => "omega",
        Function::S => "s",
    };
    let cfg = config("resonances", &ps, json!({"region": region.as_array(), "tol": a.tol, "function": function}));
    let text = match a.format {
        Format::Json => {
            let Value::Object(body) = zs.to_json(&ps[0].q.digest()) else { unreachable!("zero set is an object") };
            json_document(&cfg, body)
        }
        Format::Svg => svg_scatter(&cfg, &zs),
        f => return Err(wrong_format("resonances", f)),
    };
    Ok(Output::pass(text))
}

/// 10 x 10 lattice on `[-18, 18] x [-4.5, 4.5]`, away from `k = 0`.
fn default_lattice() -> Vec<C> {
    let mut v = Vec::with_capacity(100);
    for i in 0..10 {
        for j in 0..10 {
            v.push(C::new(-18.0 + 4.0 * i as f64, -4.5 + j as f64));
        }
    }
    v
}

fn asymptotics_grid() -> Vec<f64> {
    (0..=17).map(|i| -25.0 + i as f64).collect()
}

fn tagged(report: &IdentityReport, path: &Path) -> Value {
    let mut v = report.to_json();
    v["potential"] = json!(path.display().to_string());
    v
}

fn skipped(name: &str, reason: &str) -> Value {
    json!({"name": name, "pass": true, "skipped": reason})
}

pub fn verify(a: &VerifyArgs) -> Result<Output> {
    check_tol(a.tol)?;
    if a.format != Format::Json {
        return Err(wrong_format("verify", a.format));
    }
    if !(a.radius > 0.0 && a.radius.is_finite()) {
        return Err(Error::Domain(format!("--radius must be positive, got {}", a.radius)));
    }
    let ps = load(&a.potentials, None)?;
    let grid = match &a.grid {
        Some(g) => parse_grid(g)?.points(),
        None => default_lattice(),
    };
    let radii = [a.radius / 4.0, a.radius / 2.0, a.radius];
    let wants = |s: Suite| a.suite == s || a.suite == Suite::All;
    let mut reports = Vec::new();
    for p in &ps {
        if wants(Suite::Identities) {
            reports.push(tagged(&check_product_identity(&p.q, &grid)?, &p.path));
        }
        if wants(Suite::Asymptotics) {
            reports.push(tagged(&check_asymptotics(&p.q, &asymptotics_grid())?, &p.path));
        }
        if wants(Suite::Reflection) {
            reports.push(tagged(&check_reflection(&p.q, &grid)?, &p.path));
        }
        if wants(Suite::Counting) {
            let zs = find_zeros(&OmegaFn::new(&p.q), Rect::square(a.radius)?, a.tol)?;
            reports.push(tagged(&verify_counting_trend(&zs, &radii)?, &p.path));
        }
    }
    if wants(Suite::Uniqueness) {
        reports.push(if ps.len() == 2 {
            g1_report(&ps, a.prefix, &grid)?
        } else {
            skipped("g1_forms", "the uniqueness suite needs exactly two potentials")
        });
    }
    let pass = reports.iter().all(|r| r["pass"] == true);
    let cfg = config(
        "verify",
        &ps,
        json!({
            "suite": format!("{:?}", a.suite).to_lowercase(),
            "grid": a.grid.clone().unwrap_or_else(|| "lattice [-18,18]x[-4.5,4.5], 10x10".into()),
            "radius": a.radius,
            "counting_radii": radii,
            "asymptotics_tau": asymptotics_grid(),
            "prefix": a.prefix,
            "tol": a.tol,
        }),
    );
    let mut body = Map::new();
    body.insert("reports".into(), Value::Array(reports));
    body.insert("pass".into(), json!(pass));
    Ok(Output { text: json_document(&cfg, body), outcome: if pass { Outcome::Pass } else { Outcome::Fail } })
}

/// Relative spread of the four `g₁` forms over the grid.
fn g1_report(ps: &[Loaded], prefix: f64, grid: &[C]) -> Result<Value> {
    const THRESHOLD: f64 = 1e-7;
    let pair = PotentialPair::new(ps[0].q.clone(), ps[1].q.clone(), prefix)?;
    let samples: Vec<(C, f64)> = grid
        .par_iter()
        .filter(|k| k.norm() >= 0.5)
        .map(|&k| Ok((k, g1(&pair, k)?.max_disagreement())))
        .collect::<Result<_>>()?;
    let worst = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(json!({
        "name": "g1_forms",
        "threshold": THRESHOLD,
        "max_rel_residual": worst,
        "pass": worst <= THRESHOLD,
        "prefix": prefix,
        "samples": samples.iter().map(|(k, r)| json!({"k": [k.re, k.im], "residual": r})).collect::<Vec<_>>(),
    }))
}

pub fn reconstruct(a: &ReconstructArgs) -> Result<Output> {
    check_tol(a.tol)?;
    let ps = load(&a.potentials, Some(1))?;
    let q = &ps[0].q;
    let zs = match &a.zeros {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse { field: "<file>".into(), message: format!("{}: {e}", path.display()) })?;
            let value: Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
                field: "<document>".into(),
                message: format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()),
            })?;
            let zs = ZeroSet::from_json(&value)?;
            if zs.function != FunctionKind::Omega {
                return Err(Error::Domain("reconstruction needs zeros of ω".into()));
            }
            match value.get("potential_digest").and_then(Value::as_str) {
                Some(d) if d == q.digest() => {}
                _ => return Err(Error::Domain("zero set was not computed for this potential".into())),
            }
            zs
        }
        None => find_zeros(&OmegaFn::new(q), Rect::square(a.radius.unwrap_or(50.0))?, a.tol)?,
    };
    let radius = a.radius.unwrap_or_else(|| covered_radius(&zs));
    let probes = [radius / 16.0, radius / 8.0, 3.0 * radius / 16.0, radius / 4.0];
    let rec = hadamard_reconstruct_truncated(&zs, &probes, radius)?;
    let grid = parse_grid(&a.grid)?;
    if grid.imag != 0.0 {
        return Err(Error::Domain("the comparison grid must be real".into()));
    }
    let rows: Vec<Vec<Option<f64>>> = grid
        .points()
        .par_iter()
        .map(|&k| {
            let w = resolab::jost::omega(q, k)?;
            let h = rec.omega_hat(k);
            Ok(vec![Some(k.re), Some(w.norm()), Some(h.norm()), Some((h - w).norm() / w.norm())])
        })
        .collect::<Result<_>>()?;
    let max_err = rows.iter().filter_map(|r| r[3]).fold(0.0, f64::max);
    let table = Table { columns: vec!["k", "abs_omega_direct", "abs_omega_hat", "rel_error"], rows };
    let cfg = config(
        "reconstruct",
        &ps,
        json!({
            "zeros": a.zeros.as_ref().map(|p| p.display().to_string()),
            "region": zs.region.as_array(),
            "truncation_radius": radius,
            "probes": probes,
            "grid": grid.describe(),
            "tol": a.tol,
            "c_omega": [rec.c_omega.re, rec.c_omega.im],
            "limit_samples": rec.limit_samples.iter().map(|(k, c)| json!([k, c.re, c.im])).collect::<Vec<_>>(),
            "cauchy_differences": rec.cauchy_differences(),
            "factor_count": rec.factor_count(),
            "max_rel_error": max_err,
        }),
    );
    let text = match a.format {
        Format::Csv => csv_document(&cfg, &table),
        Format::Json => json_document(&cfg, table_json(&table)),
        f => return Err(wrong_format("reconstruct", f)),
    };
    Ok(Output::pass(text))
}

pub fn uniqueness(a: &UniquenessArgs) -> Result<Output> {
    check_tol(a.tol)?;
    if a.format != Format::Json {
        return Err(wrong_format("uniqueness", a.format));
    }
    let ps = load(&a.potentials, Some(2))?;
    let theorem = Theorem::from_number(a.theorem).expect("clap limits the range");
    let subset =
        Subset::parse(&a.subset).ok_or_else(|| Error::Domain(format!("unknown subset `{}`", a.subset)))?;
    let pair = PotentialPair::new(ps[0].q.clone(), ps[1].q.clone(), a.prefix)?;
    let cfg_core = DemoConfig { theorem, radius: a.radius, tol: a.tol, data_tol: 1e-6, subset };
    let cfg = config(
        "uniqueness",
        &ps,
        json!({
            "theorem": a.theorem,
            "prefix": a.prefix,
            "radius": a.radius,
            "subset": subset.label(),
            "tol": a.tol,
            "data_tol": cfg_core.data_tol,
        }),
    );
    match theorem_demo(&pair, &cfg_core) {
        Ok(report) => {
            let Value::Object(body) = report.to_json() else { unreachable!("report is an object") };
            let outcome = if report.consistent { Outcome::Pass } else { Outcome::Fail };
            Ok(Output { text: json_document(&cfg, body), outcome })
        }
        Err(Error::Inapplicable(why)) => {
            let mut body = Map::new();
            body.insert("skipped".into(), json!(why));
            Ok(Output::pass(json_document(&cfg, body)))
        }
        Err(e) => Err(e),
    }
}
