//! Numerical counterparts of the uniqueness theorems: the difference
//! functional `g₁` in four forms, the midpoint logarithmic derivative `τ_k`,
//! subset densities, and falsification-style demos.

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::jost::JostSolver;
use crate::potential::{Potential, PotentialPair};
use crate::spectrum::{
    counting_function, find_zeros, origin_data, sign_of, OmegaFn, Rect, SFn, SpectralPoint, ZeroSet,
};

type C = Complex64;

/// `ψ₊'(1/2,k) / ψ₊(1/2,k)`.
pub fn tau(q: &Potential, k: C) -> Result<C> {
    tau_with(&JostSolver::default(), q, k)
}

pub fn tau_with(solver: &JostSolver, q: &Potential, k: C) -> Result<C> {
    let e = solver.plus(q, k, &[0.5])?[0];
    if e.psi.norm() < 1e-12 * e.dpsi.norm() {
        return Err(Error::Pole { k });
    }
    Ok(e.dpsi / e.psi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G1Evaluation {
    pub k: C,
    /// `∫_a^1 (q̃ - q) ψ₊ ψ̃₊ dx`, `a` the agreement prefix.
    pub integral_form: C,
    /// `ω ψ̃₊(0) - ω̃ ψ₊(0)`.
    pub omega_form: C,
    /// `-s ψ̃₊(0) + s̃ ψ₊(0)`.
    pub s_form: C,
    /// `ψ₊(1/2) ψ̃₊(1/2) (τ - τ̃)`; absent at a pole of either `τ`.
    pub tau_form: Option<C>,
}

impl G1Evaluation {
    pub fn forms(&self) -> Vec<C> {
        let mut v = vec![self.integral_form, self.omega_form, self.s_form];
        v.extend(self.tau_form);
        v
    }

    /// Largest pairwise difference between forms, relative to the largest form.
    pub fn max_disagreement(&self) -> f64 {
        let forms = self.forms();
        let scale = forms.iter().map(|f| f.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for (i, a) in forms.iter().enumerate() {
            for b in &forms[i + 1..] {
                worst = worst.max((a - b).norm() / scale);
            }
        }
        worst
    }
}

/// Fixed Gauss–Legendre rule on `[-1, 1]`, 16 points.
fn legendre16() -> &'static [(f64, f64); 16] {
    static CELL: std::sync::OnceLock<[(f64, f64); 16]> = std::sync::OnceLock::new();
    CELL.get_or_init(|| {
        let n = 16;
        std::array::from_fn(|i| {
            // Newton on P_n from the Chebyshev guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
    })
}

/// `∫_a^1 (q̃ - q) ψ₊ ψ̃₊ dx` by composite Gauss–Legendre on the joint
/// pieces, doubling the panel count until two levels agree.
fn g1_integral(solver: &JostSolver, pair: &PotentialPair, k: C) -> Result<C> {
    let a = pair.prefix;
    let mut breaks: Vec<f64> = pair
        .q
        .breakpoints()
        .into_iter()
        .chain(pair.q_tilde.breakpoints())
        .filter(|&x| x > a && x < 1.0)
        .collect();
    breaks.push(a);
    breaks.push(1.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let rule = legendre16();
    let level = |panels: usize| -> Result<(C, f64)> {
        let mut xs = Vec::new();
        let mut ws = Vec::new();
        for w in breaks.windows(2) {
            let h = (w[1] - w[0]) / panels as f64;
            for p in 0..panels {
                let c = w[0] + h * (p as f64 + 0.5);
                for &(t, wt) in rule {
                    xs.push(c + 0.5 * h * t);
                    ws.push(0.5 * h * wt);
                }
            }
        }
        // The solver wants a monotone list; the rule's nodes run downward
        // within each panel.
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
        let xs: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
        let ws: Vec<f64> = order.iter().map(|&i| ws[i]).collect();
        let p = solver.plus(&pair.q, k, &xs)?;
        let pt = solver.plus(&pair.q_tilde, k, &xs)?;
        let mut total = C::new(0.0, 0.0);
        let mut scale = 0.0f64;
        for i in 0..xs.len() {
            let piece = |q: &Potential| {
                let idx = q.piece_index(xs[i]).expect("node inside [0, 1]");
                q.pieces()[idx].eval(xs[i])
            };
            let term = (piece(&pair.q_tilde) - piece(&pair.q)) * p[i].psi * pt[i].psi;
            total += term * ws[i];
            scale = scale.max(term.norm());
        }
        Ok((total, scale * (1.0 - a)))
    };
    let mut panels = (k.norm().ceil() as usize).max(1);
    let (mut prev, scale) = level(panels)?;
    for _ in 0..8 {
        panels *= 2;
        let (next, _) = level(panels)?;
        if (next - prev).norm() <= 1e-13 * scale.max(next.norm()) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(format!("g1 integral at k = {k}")))
}

/// All four forms of `g₁`, each computed independently.
///
/// The forms coincide when the pair agrees on `[0, 1/2]`; the integral form
/// always uses the pair's prefix as lower limit.
pub fn g1(pair: &PotentialPair, k: C) -> Result<G1Evaluation> {
    g1_with(&JostSolver::default(), pair, k)
}

pub fn g1_with(solver: &JostSolver, pair: &PotentialPair, k: C) -> Result<G1Evaluation> {
    let integral_form = g1_integral(solver, pair, k)?;
    let b = solver.boundary(&pair.q, k)?;
    let bt = solver.boundary(&pair.q_tilde, k)?;
    let omega_form = b.omega * bt.psi0 - bt.omega * b.psi0;
    let s_form = -b.s * bt.psi0 + bt.s * b.psi0;
    let tau_form = match (tau_with(solver, &pair.q, k), tau_with(solver, &pair.q_tilde, k)) {
        (Ok(t), Ok(tt)) => {
            let m = solver.plus(&pair.q, k, &[0.5])?[0].psi;
            let mt = solver.plus(&pair.q_tilde, k, &[0.5])?[0].psi;
            Some(m * mt * (t - tt))
        }
        (Err(Error::Pole { .. }), _) | (_, Err(Error::Pole { .. })) => None,
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    Ok(G1Evaluation { k, integral_form, omega_form, s_form, tau_form })
}

/// Hausdorff distance between the zero lists (with multiplicity) inside
/// `|k| <= radius`.
///
/// Each point inside the disk is matched against the whole other set, so a
/// zero just inside the disk whose partner sits just outside does not
/// register as a mismatch. An empty side against a nonempty one gives
/// infinity.
pub fn resonance_distance(zs_a: &ZeroSet, zs_b: &ZeroSet, radius: f64) -> Result<f64> {
    for zs in [zs_a, zs_b] {
        let [re0, re1, im0, im1] = zs.region.as_array();
        if (-re0).min(re1).min(-im0).min(im1) < radius {
            return Err(Error::Domain(format!("zero set region {:?} does not cover |k| <= {radius}", zs.region.as_array())));
        }
    }
    let a = zs_a.flattened();
    let b = zs_b.flattened();
    let one_way = |from: &[C], to: &[C]| -> f64 {
        from.iter()
            .filter(|z| z.norm() <= radius)
            .map(|z| to.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(one_way(&a, &b).max(one_way(&b, &a)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    One,
    Two,
    Three,
    Four,
}

impl Theorem {
    pub fn number(self) -> u8 {
        match self {
            Theorem::One => 1,
            Theorem::Two => 2,
            Theorem::Three => 3,
            Theorem::Four => 4,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Theorem::One),
            2 => Some(Theorem::Two),
            3 => Some(Theorem::Three),
            4 => Some(Theorem::Four),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub subset_label: String,
    pub radii: Vec<f64>,
    pub counts: Vec<usize>,
    /// Slope of `N(r)·π/2` against `r`, least squares through the origin.
    pub gamma_hat: f64,
    pub threshold: f64,
    pub meets_threshold: bool,
}

/// Density of the zeros picked by `selector` (index in the sorted point
/// list, point), counted with multiplicity.
pub fn subset_density(
    zs: &ZeroSet,
    label: &str,
    selector: &dyn Fn(usize, &SpectralPoint) -> bool,
    a: f64,
    theorem: Theorem,
    radii: &[f64],
) -> Result<DensityEstimate> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Domain(format!("a = {a} outside [0, 1]")));
    }
    let threshold = match theorem {
        Theorem::Two => 2.0 * (1.0 - a),
        Theorem::Three => 1.0 - 2.0 * a,
        _ => return Err(Error::Domain("densities belong to theorems 2 and 3".into())),
    };
    let selected: Vec<SpectralPoint> =
        zs.points.iter().enumerate().filter(|(i, p)| selector(*i, p)).map(|(_, p)| *p).collect();
    let sub = ZeroSet { points: selected, ..zs.clone() };
    let counts: Vec<usize> = counting_function(&sub, radii)?.into_iter().map(|(_, n)| n).collect();
    let num: f64 = radii.iter().zip(&counts).map(|(r, &n)| r * n as f64 * std::f64::consts::FRAC_PI_2).sum();
    let den: f64 = radii.iter().map(|r| r * r).sum();
    let gamma_hat = if den > 0.0 { num / den } else { 0.0 };
    Ok(DensityEstimate {
        subset_label: label.into(),
        radii: radii.to_vec(),
        counts,
        gamma_hat,
        threshold,
        meets_threshold: gamma_hat > threshold,
    })
}

/// Named selectors for the CLI and demos.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subset {
    All,
    EverySecond,
    Nothing,
}

impl Subset {
    pub fn label(self) -> &'static str {
        match self {
            Subset::All => "all",
            Subset::EverySecond => "every-second",
            Subset::Nothing => "none",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "all" => Some(Subset::All),
            "every-second" => Some(Subset::EverySecond),
            "none" => Some(Subset::Nothing),
            _ => None,
        }
    }

    pub fn selects(self, index: usize) -> bool {
        match self {
            Subset::All => true,
            Subset::EverySecond => index % 2 == 0,
            Subset::Nothing => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoConfig {
    pub theorem: Theorem,
    /// Data are compared inside `|k| <= radius`.
    pub radius: f64,
    /// Zero-finder tolerance.
    pub tol: f64,
    /// Data closer than this count as coinciding.
    pub data_tol: f64,
    /// `Ω` for theorem 2, `S` for theorem 3.
    pub subset: Subset,
}

impl DemoConfig {
    pub fn new(theorem: Theorem) -> Self {
        DemoConfig { theorem, radius: 15.0, tol: 1e-10, data_tol: 1e-6, subset: Subset::All }
    }
}

pub const DEMO_HEADER: &str = "Numerical evidence, not a proof: the theorem asserts that the data determine q, \
which is checked in the contrapositive (different tails must give different data).";

#[derive(Debug, Clone, PartialEq)]
pub struct DemoReport {
    pub theorem: Theorem,
    pub prefix: f64,
    pub radius: f64,
    /// Largest discrepancy between the two potentials' data.
    pub data_distance: f64,
    pub data_coincide: bool,
    /// Set when the data coincide: the theorem then predicts `q = q̃`.
    pub predicts_equal: bool,
    /// `max |q - q̃|` on the tail.
    pub tail_difference: f64,
    /// The outcome agrees with the theorem.
    pub consistent: bool,
    pub density: Option<DensityEstimate>,
    pub notes: Vec<String>,
    pub details: Value,
}

impl DemoReport {
    pub fn to_json(&self) -> Value {
        json!({
            "header": DEMO_HEADER,
            "theorem": self.theorem.number(),
            "hypothesis": {"prefix": self.prefix, "radius": self.radius},
            "data_distance": finite_or_string(self.data_distance),
            "data_coincide": self.data_coincide,
            "predicts_equal": self.predicts_equal,
            "tail_difference": self.tail_difference,
            "consistent": self.consistent,
            "density": self.density.as_ref().map(|d| json!({
                "subset": d.subset_label,
                "radii": d.radii,
                "counts": d.counts,
                "gamma_hat": d.gamma_hat,
                "threshold": d.threshold,
                "meets_threshold": d.meets_threshold,
            })),
            "notes": self.notes,
            "details": self.details,
        })
    }
}

fn finite_or_string(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

fn has_endpoint_smoothness(q: &Potential) -> bool {
    !q.is_zero() && q.smoothness().is_some()
}

fn omega_zeros(q: &Potential, cfg: &DemoConfig) -> Result<ZeroSet> {
    find_zeros(&OmegaFn::new(q), Rect::square(cfg.radius)?, cfg.tol)
}

/// `τ` at each zero, `None` at a pole.
fn taus_at(q: &Potential, zeros: &[C]) -> Result<Vec<Option<C>>> {
    zeros
        .par_iter()
        .map(|&k| match tau(q, k) {
            Ok(t) => Ok(Some(t)),
            Err(Error::Pole { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

fn tau_json(t: Option<C>) -> Value {
    match t {
        Some(t) => json!([t.re, t.im]),
        None => json!("inf"),
    }
}

/// Run one theorem's falsification check on `pair`.
pub fn theorem_demo(pair: &PotentialPair, cfg: &DemoConfig) -> Result<DemoReport> {
    let a = pair.prefix;
    let (q, qt) = (&pair.q, &pair.q_tilde);
    let mut notes = vec![DEMO_HEADER.to_string()];
    match cfg.theorem {
        Theorem::One if a < 0.5 => return Err(Error::Inapplicable("theorem 1 needs agreement on [0, 1/2]".into())),
        Theorem::Two if a <= 0.5 => return Err(Error::Inapplicable("theorem 2 needs a > 1/2".into())),
        Theorem::Three if a >= 0.5 => return Err(Error::Inapplicable("theorem 3 needs a < 1/2".into())),
        _ => {}
    }
    if matches!(cfg.theorem, Theorem::One | Theorem::Four) && !(has_endpoint_smoothness(q) && has_endpoint_smoothness(qt)) {
        return Err(Error::Inapplicable("endpoint smoothness metadata missing".into()));
    }
    if q.is_zero() || qt.is_zero() {
        return Err(Error::Inapplicable("potential outside class Q¹".into()));
    }

    let zs = omega_zeros(q, cfg)?;
    let zst = omega_zeros(qt, cfg)?;
    let omega_distance = resonance_distance(&zs, &zst, cfg.radius)?;
    let inside = |p: &SpectralPoint| p.k.norm() <= cfg.radius;
    let zeros_json = |z: &ZeroSet| -> Vec<Value> {
        z.points.iter().filter(|p| inside(p)).map(|p| json!([p.k.re, p.k.im, p.multiplicity])).collect()
    };
    let mut details = json!({
        "zeros": zeros_json(&zs),
        "zeros_tilde": zeros_json(&zst),
        "omega_distance": finite_or_string(omega_distance),
    });
    let mut density = None;

    let data_distance = match cfg.theorem {
        Theorem::One => omega_distance,
        Theorem::Two => {
            let radii: Vec<f64> = (1..=4).map(|j| cfg.radius * j as f64 / 4.0).collect();
            let sel = cfg.subset;
            let est = subset_density(&zs, sel.label(), &|i, _| sel.selects(i), a, Theorem::Two, &radii)?;
            // Ω is given as a subset of q's zeros; q̃ reproduces it only if
            // each selected zero is also a zero of q̃.
            let others = zst.flattened();
            let dist = zs
                .points
                .iter()
                .enumerate()
                .filter(|(i, p)| sel.selects(*i) && inside(p))
                .map(|(_, p)| others.iter().map(|w| (p.k - w).norm()).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max);
            details["omega_subset_distance"] = finite_or_string(dist);
            density = Some(est);
            dist
        }
        Theorem::Three => {
            let s_zeros = find_zeros(&SFn::new(q), Rect::square(cfg.radius)?, cfg.tol)?;
            let s_zeros_t = find_zeros(&SFn::new(qt), Rect::square(cfg.radius)?, cfg.tol)?;
            let sel = cfg.subset;
            let radii: Vec<f64> = (1..=4).map(|j| cfg.radius * j as f64 / 4.0).collect();
            density = Some(subset_density(&s_zeros, sel.label(), &|i, _| sel.selects(i), a, Theorem::Three, &radii)?);
            // Signs of S, matched to the nearest zero of s̃; σ₀ is included
            // in Σ.
            let mut mismatches = 0usize;
            let mut signs = Vec::new();
            for (i, p) in s_zeros.points.iter().enumerate() {
                if !sel.selects(i) || !inside(p) {
                    continue;
                }
                let nearest = s_zeros_t.points.iter().min_by(|x, y| (x.k - p.k).norm().total_cmp(&(y.k - p.k).norm()));
                let (sigma, sigma_t) = (sign_of(p.k), nearest.map(|n| sign_of(n.k)));
                if Some(sigma) != sigma_t {
                    mismatches += 1;
                }
                signs.push(json!([p.k.re, p.k.im, sigma, sigma_t]));
            }
            let o = origin_data(&SFn::new(q))?;
            let ot = origin_data(&SFn::new(qt))?;
            if o.sigma0 != ot.sigma0 {
                mismatches += 1;
            }
            details["signs"] = json!(signs);
            details["sigma0"] = json!([o.sigma0, ot.sigma0]);
            details["sign_mismatches"] = json!(mismatches);
            notes.push("σ₀ is counted as part of the sign data".into());
            if mismatches > 0 {
                f64::INFINITY
            } else {
                omega_distance
            }
        }
        Theorem::Four => {
            if zs.points.iter().any(|p| p.multiplicity > 1) {
                return Err(Error::Inapplicable("ω has a multiple zero; theorem 4 needs simple zeros".into()));
            }
            let ks: Vec<C> = zs.points.iter().filter(|p| inside(p)).map(|p| p.k).collect();
            let t = taus_at(q, &ks)?;
            let tt = taus_at(qt, &ks)?;
            let mut worst = 0.0f64;
            for (x, y) in t.iter().zip(&tt) {
                let d = match (x, y) {
                    (Some(x), Some(y)) => (x - y).norm() / (1.0 + x.norm().max(y.norm())),
                    (None, None) => 0.0,
                    _ => f64::INFINITY,
                };
                worst = worst.max(d);
            }
            details["tau"] = json!(ks
                .iter()
                .zip(t.iter().zip(&tt))
                .map(|(k, (x, y))| json!({"k": [k.re, k.im], "tau": tau_json(*x), "tau_tilde": tau_json(*y)}))
                .collect::<Vec<_>>());
            details["tau_distance"] = finite_or_string(worst);
            omega_distance.max(worst)
        }
    };

    let data_coincide = data_distance <= cfg.data_tol;
    let tail_difference = pair.tail_difference();
    let consistent = if data_coincide { tail_difference <= 1e-12 } else { tail_difference > 0.0 };
    if data_coincide {
        notes.push("uniqueness predicts q = q̃".into());
    }
    if let Some(d) = &density {
        if !d.meets_threshold {
            notes.push(format!(
                "density hypothesis not met: γ̂ = {:.4} <= threshold {:.4}; the theorem makes no claim",
                d.gamma_hat, d.threshold
            ));
        }
    }
    Ok(DemoReport {
        theorem: cfg.theorem,
        prefix: a,
        radius: cfg.radius,
        data_distance,
        data_coincide,
        predicts_equal: data_coincide,
        tail_difference,
        consistent,
        density,
        notes,
        details,
    })
}
