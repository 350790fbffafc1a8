//! Zeros of `ω` and `s`: argument-principle counting, recursive
//! localization with Newton polishing, classification and sign data.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::jost::JostSolver;
use crate::potential::Potential;
use crate::quad::{self, QuadError, QuadOptions};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    Omega,
    S,
    Other,
}

impl FunctionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FunctionKind::Omega => "omega",
            FunctionKind::S => "s",
            FunctionKind::Other => "other",
        }
    }
}

/// A holomorphic function that can report its derivative.
pub trait Analytic: Sync {
    fn eval_with_derivative(&self, k: C) -> Result<(C, C)>;

    fn eval(&self, k: C) -> Result<C> {
        Ok(self.eval_with_derivative(k)?.0)
    }

    fn kind(&self) -> FunctionKind {
        FunctionKind::Other
    }
}

pub struct OmegaFn<'a> {
    pub q: &'a Potential,
    pub solver: JostSolver,
}

impl<'a> OmegaFn<'a> {
    pub fn new(q: &'a Potential) -> Self {
        OmegaFn { q, solver: JostSolver::default() }
    }
}

impl Analytic for OmegaFn<'_> {
    fn eval_with_derivative(&self, k: C) -> Result<(C, C)> {
        let b = self.solver.boundary_with_derivative(self.q, k)?;
        Ok((b.omega, b.d_omega))
    }

    fn eval(&self, k: C) -> Result<C> {
        Ok(self.solver.boundary(self.q, k)?.omega)
    }

    fn kind(&self) -> FunctionKind {
        FunctionKind::Omega
    }
}

pub struct SFn<'a> {
    pub q: &'a Potential,
    pub solver: JostSolver,
}

impl<'a> SFn<'a> {
    pub fn new(q: &'a Potential) -> Self {
        SFn { q, solver: JostSolver::default() }
    }
}

impl Analytic for SFn<'_> {
    fn eval_with_derivative(&self, k: C) -> Result<(C, C)> {
        let b = self.solver.boundary_with_derivative(self.q, k)?;
        Ok((b.s, b.d_s))
    }

    fn eval(&self, k: C) -> Result<C> {
        Ok(self.solver.boundary(self.q, k)?.s)
    }

    fn kind(&self) -> FunctionKind {
        FunctionKind::S
    }
}

/// Adapter for closed-form functions, mostly for tests.
pub struct FnAnalytic<F>(pub F);

impl<F> Analytic for FnAnalytic<F>
where
    F: Fn(C) -> (C, C) + Sync,
{
    fn eval_with_derivative(&self, k: C) -> Result<(C, C)> {
        Ok((self.0)(k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl Rect {
    pub fn new(re0: f64, re1: f64, im0: f64, im1: f64) -> Result<Rect> {
        let ok = [re0, re1, im0, im1].iter().all(|v| v.is_finite()) && re0 < re1 && im0 < im1;
        if !ok {
            return Err(Error::Domain(format!("ill-ordered rectangle [{re0}, {re1}] x [{im0}, {im1}]")));
        }
        Ok(Rect { re0, re1, im0, im1 })
    }

    /// `[-r, r] x [-r, r]`.
    pub fn square(r: f64) -> Result<Rect> {
        Rect::new(-r, r, -r, r)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.re0, self.re1, self.im0, self.im1]
    }

    pub fn contains(&self, k: C) -> bool {
        k.re >= self.re0 && k.re <= self.re1 && k.im >= self.im0 && k.im <= self.im1
    }

    pub fn diameter(&self) -> f64 {
        (self.re1 - self.re0).hypot(self.im1 - self.im0)
    }

    /// Radius of the largest origin-centred disk inside the rectangle.
    pub fn inradius(&self) -> f64 {
        if !self.contains(C::new(0.0, 0.0)) {
            return 0.0;
        }
        (-self.re0).min(self.re1).min(-self.im0).min(self.im1)
    }

    fn expanded(&self, by: f64) -> Rect {
        Rect { re0: self.re0 - by, re1: self.re1 + by, im0: self.im0 - by, im1: self.im1 + by }
    }

    fn corners(&self) -> [C; 4] {
        [
            C::new(self.re0, self.im0),
            C::new(self.re1, self.im0),
            C::new(self.re1, self.im1),
            C::new(self.re0, self.im1),
        ]
    }

    fn split(&self, fr: f64, fi: f64) -> [Rect; 4] {
        let rm = self.re0 + fr * (self.re1 - self.re0);
        let im = self.im0 + fi * (self.im1 - self.im0);
        [
            Rect { re0: self.re0, re1: rm, im0: self.im0, im1: im },
            Rect { re0: rm, re1: self.re1, im0: self.im0, im1: im },
            Rect { re0: self.re0, re1: rm, im0: im, im1: self.im1 },
            Rect { re0: rm, re1: self.re1, im0: im, im1: self.im1 },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroKind {
    Eigenvalue,
    Resonance,
    Origin,
}

impl ZeroKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ZeroKind::Eigenvalue => "eigenvalue",
            ZeroKind::Resonance => "resonance",
            ZeroKind::Origin => "origin",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub k: C,
    pub multiplicity: usize,
    pub kind: ZeroKind,
}

/// Classification of a zero of `ω`, with the axis and origin checks.
pub fn classify(k: C, multiplicity: usize) -> Result<SpectralPoint> {
    classify_for(FunctionKind::Omega, k, multiplicity)
}

/// As [`classify`]; only zeros of `ω` are held to the axis and simple-origin
/// constraints.
pub fn classify_for(function: FunctionKind, k: C, multiplicity: usize) -> Result<SpectralPoint> {
    let strict = function == FunctionKind::Omega;
    let kind = if k.norm() <= 1e-10 {
        if strict && multiplicity > 1 {
            return Err(Error::Inconsistency(format!("ω has a zero of multiplicity {multiplicity} at the origin")));
        }
        ZeroKind::Origin
    } else if k.im > 1e-8 {
        if strict && k.re.abs() > 1e-8 * (1.0 + k.norm()) {
            return Err(Error::Inconsistency(format!("eigenvalue zero {k} is off the imaginary axis")));
        }
        ZeroKind::Eigenvalue
    } else {
        ZeroKind::Resonance
    };
    Ok(SpectralPoint { k, multiplicity, kind })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub points: Vec<SpectralPoint>,
    pub region: Rect,
    /// `max |f(k*)| / (1 + |f'(k*)| |k*|)` over the polished zeros.
    pub residual_bound: f64,
    pub function: FunctionKind,
}

fn sort_key(k: &C) -> (i64, f64) {
    ((k.norm() * 1e8).round() as i64, k.arg())
}

fn sort_points(points: &mut [SpectralPoint]) {
    points.sort_by(|a, b| {
        let (ra, aa) = sort_key(&a.k);
        let (rb, ab) = sort_key(&b.k);
        ra.cmp(&rb).then(aa.total_cmp(&ab))
    });
}

impl ZeroSet {
    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity).sum()
    }

    /// Zeros with multiplicity repeated.
    pub fn flattened(&self) -> Vec<C> {
        self.points.iter().flat_map(|p| std::iter::repeat(p.k).take(p.multiplicity)).collect()
    }

    /// Largest distance from a zero's mirror `-conj(k)` (when inside the
    /// region) to the nearest zero in the set.
    pub fn mirror_defect(&self) -> f64 {
        let inner = Rect { re0: self.region.re0 + 1e-9, re1: self.region.re1 - 1e-9, ..self.region };
        self.points
            .iter()
            .map(|p| -p.k.conj())
            .filter(|m| inner.contains(*m))
            .map(|m| self.points.iter().map(|p| (p.k - m).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }

    pub fn from_points(function: FunctionKind, region: Rect, points: Vec<(C, usize)>) -> Result<ZeroSet> {
        let mut pts = points
            .into_iter()
            .map(|(k, m)| classify_for(function, k, m))
            .collect::<Result<Vec<_>>>()?;
        sort_points(&mut pts);
        Ok(ZeroSet { points: pts, region, residual_bound: 0.0, function })
    }

    pub fn to_json(&self, potential_digest: &str) -> Value {
        json!({
            "region": self.region.as_array(),
            "function": self.function.as_str(),
            "potential_digest": potential_digest,
            "residual_bound": self.residual_bound,
            "zeros": self.points.iter().map(|p| json!({
                "re": p.k.re,
                "im": p.k.im,
                "multiplicity": p.multiplicity,
                "kind": p.kind.as_str(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &Value) -> Result<ZeroSet> {
        let bad = |field: &str, msg: &str| Error::Parse { field: field.into(), message: msg.into() };
        let region = value
            .get("region")
            .and_then(Value::as_array)
            .filter(|a| a.len() == 4)
            .ok_or_else(|| bad("region", "expected [re0, re1, im0, im1]"))?;
        let r: Vec<f64> = region
            .iter()
            .map(|v| v.as_f64().ok_or_else(|| bad("region", "expected numbers")))
            .collect::<Result<_>>()?;
        let region = Rect::new(r[0], r[1], r[2], r[3])?;
        let function = match value.get("function").and_then(Value::as_str) {
            Some("omega") => FunctionKind::Omega,
            Some("s") => FunctionKind::S,
            Some("other") | None => FunctionKind::Other,
            Some(other) => return Err(bad("function", &format!("unknown function `{other}`"))),
        };
        let zeros = value.get("zeros").and_then(Value::as_array).ok_or_else(|| bad("zeros", "expected an array"))?;
        let mut points = Vec::with_capacity(zeros.len());
        for z in zeros {
            let re = z.get("re").and_then(Value::as_f64).ok_or_else(|| bad("zeros.re", "expected a number"))?;
            let im = z.get("im").and_then(Value::as_f64).ok_or_else(|| bad("zeros.im", "expected a number"))?;
            let m = z
                .get("multiplicity")
                .and_then(Value::as_u64)
                .filter(|m| *m >= 1)
                .ok_or_else(|| bad("zeros.multiplicity", "expected a positive integer"))?;
            let k = C::new(re, im);
            if !region.contains(k) {
                return Err(bad("zeros", &format!("zero {k} lies outside the region")));
            }
            if let Some(kind) = z.get("kind") {
                let kind = kind.as_str().ok_or_else(|| bad("zeros.kind", "expected a string"))?;
                let derived = classify_for(function, k, m as usize)?.kind.as_str();
                if kind != derived {
                    return Err(bad("zeros.kind", &format!("zero {k} is labelled `{kind}` but classifies as `{derived}`")));
                }
            }
            points.push((k, m as usize));
        }
        let mut zs = ZeroSet::from_points(function, region, points)?;
        zs.residual_bound = value.get("residual_bound").and_then(Value::as_f64).unwrap_or(0.0);
        Ok(zs)
    }
}

/// `a / b` without forming `|b|²`, which overflows once `|b|` passes 1e154.
fn ratio(a: C, b: C) -> C {
    let m = b.norm();
    (a / m) * (b.conj() / m)
}

fn contour_error(e: QuadError<Error>) -> Error {
    match e {
        QuadError::Integrand(e) => e,
        QuadError::TooNarrow { at } => Error::ZeroOnContour { at: C::new(at, f64::NAN) },
        QuadError::Budget { error } => Error::Quadrature(format!("contour budget exhausted (error estimate {error:e})")),
    }
}

type EdgeKey = [u64; 4];

struct Contour<'a> {
    f: &'a dyn Analytic,
    cache: Mutex<HashMap<EdgeKey, [C; 3]>>,
}

impl<'a> Contour<'a> {
    fn new(f: &'a dyn Analytic) -> Self {
        Contour { f, cache: Mutex::new(HashMap::new()) }
    }

    /// `∫ [1, k, k²] f'/f dk` along the segment `z0 -> z1`.
    fn edge(&self, z0: C, z1: C) -> Result<[C; 3]> {
        let key = [z0.re.to_bits(), z0.im.to_bits(), z1.re.to_bits(), z1.im.to_bits()];
        let rkey = [key[2], key[3], key[0], key[1]];
        {
            let cache = self.cache.lock().expect("cache lock");
            if let Some(v) = cache.get(&key) {
                return Ok(*v);
            }
            if let Some(v) = cache.get(&rkey) {
                return Ok([-v[0], -v[1], -v[2]]);
            }
        }
        let d = z1 - z0;
        let len = d.norm();
        let opts = QuadOptions {
            epsabs: 1e-8,
            epsrel: 1e-10,
            control: 0,
            max_intervals: 4000,
            min_width: 1e-10 / len,
        };
        let integrand = |t: f64| -> Result<[C; 3]> {
            let k = z0 + d * t;
            let (f, fp) = self.f.eval_with_derivative(k)?;
            let w = ratio(fp, f) * d;
            if f.norm() == 0.0 || !w.re.is_finite() || !w.im.is_finite() {
                return Err(Error::ZeroOnContour { at: k });
            }
            Ok([w, k * w, k * k * w])
        };
        let v = quad::integrate(integrand, 0.0, 1.0, &opts).map_err(|e| match e {
            QuadError::TooNarrow { at } => Error::ZeroOnContour { at: z0 + d * at },
            other => contour_error(other),
        })?;
        self.cache.lock().expect("cache lock").insert(key, v);
        Ok(v)
    }

    /// `(1/2πi) ∮ [1, k, k²] f'/f dk` around the rectangle.
    fn moments(&self, r: &Rect) -> Result<[C; 3]> {
        let c = r.corners();
        let mut total = [C::new(0.0, 0.0); 3];
        for i in 0..4 {
            let e = self.edge(c[i], c[(i + 1) % 4])?;
            for m in 0..3 {
                total[m] += e[m];
            }
        }
        let two_pi_i = C::new(0.0, 2.0 * PI);
        Ok(total.map(|v| v / two_pi_i))
    }
}

fn winding(m0: C) -> Result<usize> {
    let value = m0.re;
    let n = value.round();
    if (value - n).abs() > 0.1 || m0.im.abs() > 0.1 || n < 0.0 {
        return Err(Error::NonIntegerWinding { value });
    }
    Ok(n as usize)
}

fn is_contour_failure(e: &Error) -> bool {
    matches!(e, Error::ZeroOnContour { .. } | Error::Quadrature(_) | Error::NonIntegerWinding { .. })
}

/// Moments of the region, nudging the contour outward once if a zero sits
/// on it. Returns the rectangle actually used.
fn region_moments(contour: &Contour, region: Rect) -> Result<(Rect, [C; 3], usize)> {
    match contour.moments(&region).and_then(|m| Ok((m, winding(m[0])?))) {
        Ok((m, n)) => Ok((region, m, n)),
        Err(e) if is_contour_failure(&e) => {
            let nudged = region.expanded(1e-6 * region.diameter());
            let m = contour.moments(&nudged)?;
            let n = winding(m[0])?;
            Ok((nudged, m, n))
        }
        Err(e) => Err(e),
    }
}

/// Number of zeros (with multiplicity) inside `region`.
pub fn count_zeros(f: &dyn Analytic, region: Rect) -> Result<usize> {
    Ok(region_moments(&Contour::new(f), region)?.2)
}

/// Split fractions tried in turn; none is 1/2 so that zeros on symmetry
/// axes do not land on interior edges.
const SPLITS: [(f64, f64); 5] = [(0.537, 0.529), (0.463, 0.471), (0.5113, 0.5571), (0.4771, 0.4419), (0.5591, 0.5063)];
const MAX_DEPTH: usize = 40;

struct Search<'a> {
    contour: Contour<'a>,
    tol: f64,
}

impl Search<'_> {
    fn f(&self) -> &dyn Analytic {
        self.contour.f
    }

    /// Newton for a zero of multiplicity `mult`; `None` if it wanders off
    /// or stalls.
    fn newton(&self, start: C, mult: usize, bounds: &Rect) -> Result<Option<C>> {
        let mut k = start;
        let mut small_steps = 0;
        for _ in 0..60 {
            let (f, fp) = self.f().eval_with_derivative(k)?;
            let scale = 1.0 + fp.norm() * k.norm();
            if f.norm() == 0.0 {
                return Ok(Some(k));
            }
            if fp.norm() == 0.0 {
                return Ok(None);
            }
            let step = ratio(f, fp) * mult as f64;
            if mult == 1 && f.norm() <= self.tol * scale {
                // One extra step costs little and tightens the residual.
                let polished = k - step;
                return Ok(Some(if bounds.contains(polished) { polished } else { k }));
            }
            k -= step;
            if !k.re.is_finite() || !k.im.is_finite() || !bounds.contains(k) {
                return Ok(None);
            }
            if step.norm() <= 1e-14 * (1.0 + k.norm()) {
                small_steps += 1;
                if small_steps >= 2 || mult > 1 {
                    return Ok(Some(k));
                }
            }
        }
        Ok(None)
    }

    fn solve(&self, r: Rect, n: usize, m: [C; 3], depth: usize) -> Result<Vec<(C, usize)>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        if depth > MAX_DEPTH {
            return Err(Error::Budget { region: r.as_array() });
        }
        let centroid = m[1] / n as f64;
        let diam = r.diameter();
        let bounds = r.expanded(1e-9 * (1.0 + diam));
        if n == 1 {
            if let Some(k) = self.newton(centroid, 1, &bounds)? {
                return Ok(vec![(k, 1)]);
            }
        } else if diam < 1e-6 {
            return Ok(vec![(centroid, n)]);
        } else {
            let spread = (m[2] / n as f64 - centroid * centroid).norm().sqrt();
            if spread < 1e-6 * (1.0 + centroid.norm()) {
                if let Some(k) = self.newton(centroid, n, &bounds)? {
                    let h = 1e-5 * (1.0 + k.norm());
                    let tight = Rect::new(k.re - h, k.re + h, k.im - h, k.im + h)?;
                    if let Ok(mt) = self.contour.moments(&tight) {
                        if winding(mt[0]).ok() == Some(n) {
                            return Ok(vec![(k, n)]);
                        }
                    }
                }
            }
        }
        let mut last_err = None;
        for (fr, fi) in SPLITS {
            let kids = r.split(fr, fi);
            let attempt: Result<Vec<([C; 3], usize)>> = kids
                .iter()
                .map(|c| {
                    let m = self.contour.moments(c)?;
                    Ok((m, winding(m[0])?))
                })
                .collect();
            match attempt {
                Ok(parts) if parts.iter().map(|p| p.1).sum::<usize>() == n => {
                    let (left, right) = rayon::join(
                        || -> Result<Vec<(C, usize)>> {
                            let mut v = self.solve(kids[0], parts[0].1, parts[0].0, depth + 1)?;
                            v.extend(self.solve(kids[1], parts[1].1, parts[1].0, depth + 1)?);
                            Ok(v)
                        },
                        || -> Result<Vec<(C, usize)>> {
                            let mut v = self.solve(kids[2], parts[2].1, parts[2].0, depth + 1)?;
                            v.extend(self.solve(kids[3], parts[3].1, parts[3].0, depth + 1)?);
                            Ok(v)
                        },
                    );
                    let mut v = left?;
                    v.extend(right?);
                    return Ok(v);
                }
                Ok(parts) => {
                    last_err = Some(Error::CountMismatch { expected: n, found: parts.iter().map(|p| p.1).sum() });
                }
                Err(e) if is_contour_failure(&e) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last_err.unwrap_or(Error::Budget { region: r.as_array() }))
    }
}

/// All zeros of `f` in `region`, polished to `|f| <= tol (1 + |f'||k|)`.
pub fn find_zeros(f: &dyn Analytic, region: Rect, tol: f64) -> Result<ZeroSet> {
    if !(tol >= 1e-12) {
        return Err(Error::Domain(format!("tolerance {tol} below 1e-12")));
    }
    let search = Search { contour: Contour::new(f), tol };
    let (region, m, n) = region_moments(&search.contour, region)?;
    let mut found = search.solve(region, n, m, 0)?;

    // Deduplicate (possible only for zeros on a shared edge).
    found.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let mut merged: Vec<(C, usize)> = Vec::with_capacity(found.len());
    for (k, mult) in found {
        match merged.iter_mut().find(|(z, _)| (*z - k).norm() < 1e-7) {
            Some(existing) => existing.1 = existing.1.max(mult),
            None => merged.push((k, mult)),
        }
    }
    let total: usize = merged.iter().map(|p| p.1).sum();
    if total != n {
        return Err(Error::CountMismatch { expected: n, found: total });
    }
    let mut residual_bound = 0.0f64;
    for (k, mult) in &merged {
        if *mult == 1 {
            let (fv, fp) = f.eval_with_derivative(*k)?;
            residual_bound = residual_bound.max(fv.norm() / (1.0 + fp.norm() * k.norm()));
        }
    }
    let mut zs = ZeroSet::from_points(f.kind(), region, merged)?;
    zs.residual_bound = residual_bound;
    Ok(zs)
}

/// Cumulative multiplicity `N(r) = #{k : |k| <= r}` for each radius.
pub fn counting_function(zs: &ZeroSet, radii: &[f64]) -> Result<Vec<(f64, usize)>> {
    let inr = zs.region.inradius();
    radii
        .iter()
        .map(|&r| {
            if r > inr + 1e-12 {
                return Err(Error::Domain(format!("radius {r} exceeds the searched region (inradius {inr})")));
            }
            let n = zs.points.iter().filter(|p| p.k.norm() <= r).map(|p| p.multiplicity).sum();
            Ok((r, n))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignDatum {
    pub zeta: C,
    pub sigma: i8,
}

/// `σ = sign(Im ζ)`, with `|Im ζ| <= 1e-8` mapped to 0.
pub fn sign_of(zeta: C) -> i8 {
    if zeta.im.abs() <= 1e-8 {
        0
    } else if zeta.im > 0.0 {
        1
    } else {
        -1
    }
}

pub fn sign_set(zeros_of_s: &ZeroSet) -> Vec<SignDatum> {
    zeros_of_s.points.iter().map(|p| SignDatum { zeta: p.k, sigma: sign_of(p.k) }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OriginSign {
    pub u: usize,
    pub sigma0: i8,
    /// `i^u s^{(u)}(0) / u!`.
    pub leading: C,
}

/// Taylor data of `f` at the origin from a 256-node trapezoid rule on
/// `|k| = 0.25`.
pub fn origin_data(f: &dyn Analytic) -> Result<OriginSign> {
    const NODES: usize = 256;
    const RADIUS: f64 = 0.25;
    const ORDERS: usize = 16;
    let values: Vec<C> = (0..NODES)
        .map(|j| f.eval(C::from_polar(RADIUS, 2.0 * PI * j as f64 / NODES as f64)))
        .collect::<Result<_>>()?;
    let coeffs: Vec<C> = (0..ORDERS)
        .map(|n| {
            let s: C = values
                .iter()
                .enumerate()
                .map(|(j, v)| v * C::from_polar(1.0, -2.0 * PI * (n * j) as f64 / NODES as f64))
                .sum();
            s / NODES as f64 / RADIUS.powi(n as i32)
        })
        .collect();
    let biggest = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if biggest == 0.0 {
        return Err(Error::HighOrderVanishing);
    }
    let u = coeffs.iter().position(|c| c.norm() > 1e-9 * biggest).expect("some coefficient is the max");
    if u >= 8 {
        return Err(Error::HighOrderVanishing);
    }
    let leading = C::new(0.0, 1.0).powi(u as i32) * coeffs[u];
    if leading.im.abs() > 1e-6 * leading.norm() {
        return Err(Error::SymmetryViolation(format!("i^u c_u = {leading} is not real")));
    }
    let sigma0 = if leading.re > 0.0 { 1 } else if leading.re < 0.0 { -1 } else { 0 };
    Ok(OriginSign { u, sigma0, leading })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(roots: Vec<C>) -> FnAnalytic<impl Fn(C) -> (C, C) + Sync> {
        FnAnalytic(move |k: C| {
            let mut f = C::new(1.0, 0.0);
            let mut fp = C::new(0.0, 0.0);
            for r in &roots {
                fp = fp * (k - r) + f;
                f *= k - r;
            }
            (f, fp)
        })
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(C::new(0.0, 2.0), 1).unwrap().kind, ZeroKind::Eigenvalue);
        assert_eq!(classify(C::new(3.0, -0.7), 1).unwrap().kind, ZeroKind::Resonance);
        assert_eq!(classify(C::new(1e-14, 0.0), 1).unwrap().kind, ZeroKind::Origin);
        assert!(classify(C::new(0.5, 2.0), 1).is_err());
        assert!(classify(C::new(0.0, 0.0), 2).is_err());
        assert_eq!(classify_for(FunctionKind::S, C::new(0.5, 2.0), 1).unwrap().kind, ZeroKind::Eigenvalue);
    }

    #[test]
    fn sign_examples() {
        assert_eq!(sign_of(C::new(3.4452, 0.0)), 0);
        assert_eq!(sign_of(C::new(2.0, -1.5)), -1);
        assert_eq!(sign_of(C::new(0.5, 0.2)), 1);
    }

    #[test]
    fn polynomial_roots_and_multiplicity() {
        let roots = vec![C::new(0.3, 0.2), C::new(-1.1, 0.7), C::new(2.0, -1.0), C::new(2.0, -1.0), C::new(-0.5, -2.5)];
        let f = poly(roots.clone());
        let region = Rect::square(3.0).unwrap();
        assert_eq!(count_zeros(&f, region).unwrap(), 5);
        let zs = find_zeros(&f, region, 1e-10).unwrap();
        assert_eq!(zs.total_multiplicity(), 5);
        let double = zs.points.iter().find(|p| p.multiplicity == 2).expect("double root detected");
        assert!((double.k - C::new(2.0, -1.0)).norm() < 1e-6);
        for r in &roots {
            assert!(zs.points.iter().any(|p| (p.k - r).norm() < 1e-6));
        }
    }

    #[test]
    fn origin_taylor_data() {
        // f = k^2 (3 - k): c_2 = 3 and i^2 c_2 = -3.
        let f = FnAnalytic(|k: C| (k * k * (3.0 - k), 6.0 * k - 3.0 * k * k));
        let o = origin_data(&f).unwrap();
        assert_eq!((o.u, o.sigma0), (2, -1));
        assert!((o.leading - C::new(-3.0, 0.0)).norm() < 1e-10);
        let g = FnAnalytic(|k: C| (C::new(0.0, 1.0) * k * k, C::new(0.0, 2.0) * k));
        assert!(matches!(origin_data(&g), Err(Error::SymmetryViolation(_))));
        let z = FnAnalytic(|_k: C| (C::new(0.0, 0.0), C::new(0.0, 0.0)));
        assert!(matches!(origin_data(&z), Err(Error::HighOrderVanishing)));
    }

    #[test]
    fn counting_function_checks_radius() {
        let zs = ZeroSet::from_points(FunctionKind::Other, Rect::square(2.0).unwrap(), vec![(C::new(1.0, 0.5), 1)]).unwrap();
        assert_eq!(counting_function(&zs, &[1.0, 2.0]).unwrap(), vec![(1.0, 0), (2.0, 1)]);
        assert!(counting_function(&zs, &[3.0]).is_err());
    }
}
