//! Real potentials supported in `[0, 1]`.
//!
//! Every representation is compiled into contiguous polynomial pieces that
//! cover `[0, 1]` exactly. Piece `i` owns the half-open interval
//! `(left, right]` (the first piece also owns `x = 0`), and its coefficients
//! are in the local variable `t = x - left`. The ODE solvers integrate piece
//! by piece, so every representation breakpoint is a forced step boundary.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Endpoint smoothness data: `q` vanishes to order exactly `m` at 0 and `n`
/// at 1, with one-sided smoothness on `[0, delta)` and `(1 - delta, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Smoothness {
    pub m: u32,
    pub n: u32,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    Nearest,
    Linear,
    Cubic,
}

impl Interpolation {
    pub fn order(self) -> u8 {
        match self {
            Interpolation::Nearest => 0,
            Interpolation::Linear => 1,
            Interpolation::Cubic => 3,
        }
    }

    pub fn from_order(order: u64) -> Option<Self> {
        match order {
            0 => Some(Interpolation::Nearest),
            1 => Some(Interpolation::Linear),
            3 => Some(Interpolation::Cubic),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    SquareWell { amplitude: f64 },
    Step { breakpoints: Vec<f64>, levels: Vec<f64> },
    /// Coefficients of piece `i` are in powers of `x - breakpoints[i]`.
    PiecewisePoly { breakpoints: Vec<f64>, coefficients: Vec<Vec<f64>> },
    /// `samples[i]` sits at `x = i / (len - 1)`.
    Grid { samples: Vec<f64>, interpolation: Interpolation },
    /// `amplitude * x^m * (1 - x)^n`.
    Bump { m: u32, n: u32, amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub left: f64,
    pub right: f64,
    pub coeffs: Vec<f64>,
    /// The same polynomial in powers of `x - right`. Evaluating near the
    /// right end from the left expansion loses all relative accuracy at a
    /// root there.
    right_coeffs: Vec<f64>,
}

impl Piece {
    pub fn new(left: f64, right: f64, coeffs: Vec<f64>) -> Self {
        let right_coeffs = taylor_shift(&coeffs, right - left);
        Piece { left, right, coeffs, right_coeffs }
    }

    fn constant(left: f64, right: f64, value: f64) -> Self {
        Piece::new(left, right, vec![value])
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let (t, coeffs) =
            if x - self.left <= self.right - x { (x - self.left, &self.coeffs) } else { (x - self.right, &self.right_coeffs) };
        coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// `p(anchor + d)`, exact in `d` when `anchor` is an end of the piece.
    /// Forming `anchor + d` first would round away the offset near a root.
    #[inline]
    pub fn eval_offset(&self, anchor: f64, d: f64) -> f64 {
        let half = 0.5 * self.width();
        let coeffs = if anchor == self.left && d <= half {
            &self.coeffs
        } else if anchor == self.right && -d < half {
            &self.right_coeffs
        } else {
            return self.eval(anchor + d);
        };
        coeffs.iter().rev().fold(0.0, |acc, &c| acc * d + c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    /// Coefficients re-expanded about `left + shift`.
    fn shifted_coeffs(&self, shift: f64) -> Vec<f64> {
        taylor_shift(&self.coeffs, shift)
    }

    /// Restriction to `[lo, hi]`, both inside the piece.
    fn restrict(&self, lo: f64, hi: f64) -> Piece {
        let coeffs = if lo == self.left { self.coeffs.clone() } else { self.shifted_coeffs(lo - self.left) };
        Piece::new(lo, hi, coeffs)
    }

    /// `∫_lo^hi |p|`, exactly: split at sign changes, then use the
    /// antiderivative on each sign-definite part.
    fn abs_integral(&self, lo: f64, hi: f64) -> f64 {
        let anti: Vec<f64> = std::iter::once(0.0)
            .chain(self.coeffs.iter().enumerate().map(|(i, c)| c / (i + 1) as f64))
            .collect();
        let big_p = |x: f64| {
            let t = x - self.left;
            anti.iter().rev().fold(0.0, |acc, &c| acc * t + c)
        };
        let samples = 64 * self.coeffs.len();
        let mut cuts = vec![lo];
        let mut prev = lo;
        for i in 1..=samples {
            let x = lo + (hi - lo) * i as f64 / samples as f64;
            if self.eval(prev).signum() * self.eval(x).signum() < 0.0 {
                let (mut a, mut b) = (prev, x);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m == a || m == b {
                        break;
                    }
                    if self.eval(a).signum() * self.eval(m).signum() <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                cuts.push(0.5 * (a + b));
            }
            prev = x;
        }
        cuts.push(hi);
        cuts.windows(2).map(|w| (big_p(w[1]) - big_p(w[0])).abs()).sum()
    }

    fn reflected(&self) -> Piece {
        // r(y) = p(L - y) with y measured from the new left end 1 - right.
        let width = self.width();
        let shifted = taylor_shift(&self.coeffs, width);
        let coeffs = shifted.iter().enumerate().map(|(i, &c)| if i % 2 == 1 { -c } else { c }).collect();
        Piece::new(1.0 - self.right, 1.0 - self.left, coeffs)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients of `p(t + s)` given those of `p(t)`.
fn taylor_shift(coeffs: &[f64], s: f64) -> Vec<f64> {
    let deg = coeffs.len();
    (0..deg)
        .map(|i| (i..deg).map(|j| coeffs[j] * binomial(j, i) * s.powi((j - i) as i32)).sum())
        .collect()
}

#[derive(Debug, Clone)]
pub struct Potential {
    repr: Representation,
    smoothness: Option<Smoothness>,
    pieces: Vec<Piece>,
}

fn check_finite(field: &str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidPotential(format!("`{field}` contains a non-finite value")))
    }
}

fn check_breakpoints(breakpoints: &[f64]) -> Result<()> {
    check_finite("breakpoints", breakpoints)?;
    if breakpoints.len() < 2 {
        return Err(Error::InvalidPotential("need at least two breakpoints".into()));
    }
    if breakpoints[0] < 0.0 || *breakpoints.last().unwrap() > 1.0 {
        return Err(Error::InvalidPotential("breakpoints must lie in [0, 1]".into()));
    }
    if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidPotential("breakpoints must be strictly increasing".into()));
    }
    Ok(())
}

/// Fill gaps with zero pieces so the result covers `[0, 1]` contiguously.
fn cover_unit_interval(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut out = Vec::with_capacity(pieces.len() + 2);
    let mut cursor = 0.0;
    for p in pieces {
        if p.left > cursor {
            out.push(Piece::constant(cursor, p.left, 0.0));
        }
        cursor = p.right;
        out.push(p);
    }
    if cursor < 1.0 {
        out.push(Piece::constant(cursor, 1.0, 0.0));
    }
    out
}

fn natural_spline(samples: &[f64]) -> Vec<Piece> {
    let n = samples.len();
    let h = 1.0 / (n - 1) as f64;
    let x = |i: usize| if i == n - 1 { 1.0 } else { i as f64 * h };
    // Second derivatives with M_0 = M_{n-1} = 0 (Thomas algorithm).
    let mut second = vec![0.0; n];
    if n > 2 {
        let m = n - 2;
        let mut diag = vec![4.0; m];
        let mut rhs: Vec<f64> =
            (1..n - 1).map(|i| 6.0 * (samples[i + 1] - 2.0 * samples[i] + samples[i - 1]) / (h * h)).collect();
        for i in 1..m {
            let w = 1.0 / diag[i - 1];
            diag[i] -= w;
            rhs[i] -= w * rhs[i - 1];
        }
        second[m] = rhs[m - 1] / diag[m - 1];
        for i in (0..m - 1).rev() {
            second[i + 1] = (rhs[i] - second[i + 2]) / diag[i];
        }
    }
    (0..n - 1)
        .map(|i| {
            let (s0, s1, m0, m1) = (samples[i], samples[i + 1], second[i], second[i + 1]);
            let b = (s1 - s0) / h - h * (2.0 * m0 + m1) / 6.0;
            Piece::new(x(i), x(i + 1), vec![s0, b, m0 / 2.0, (m1 - m0) / (6.0 * h)])
        })
        .collect()
}

fn compile(repr: &Representation) -> Vec<Piece> {
    let pieces = match repr {
        Representation::SquareWell { amplitude } => vec![Piece::constant(0.0, 1.0, *amplitude)],
        Representation::Step { breakpoints, levels } => breakpoints
            .windows(2)
            .zip(levels)
            .map(|(w, &v)| Piece::constant(w[0], w[1], v))
            .collect(),
        Representation::PiecewisePoly { breakpoints, coefficients } => breakpoints
            .windows(2)
            .zip(coefficients)
            .map(|(w, c)| Piece::new(w[0], w[1], if c.is_empty() { vec![0.0] } else { c.clone() }))
            .collect(),
        Representation::Grid { samples, interpolation } => {
            let n = samples.len();
            let h = 1.0 / (n - 1) as f64;
            let x = |i: usize| if i == n - 1 { 1.0 } else { i as f64 * h };
            match interpolation {
                Interpolation::Nearest => (0..n)
                    .map(|i| {
                        let left = if i == 0 { 0.0 } else { (i as f64 - 0.5) * h };
                        let right = if i == n - 1 { 1.0 } else { (i as f64 + 0.5) * h };
                        Piece::constant(left, right, samples[i])
                    })
                    .collect(),
                Interpolation::Linear => (0..n - 1)
                    .map(|i| {
                        Piece::new(x(i), x(i + 1), vec![samples[i], (samples[i + 1] - samples[i]) / (x(i + 1) - x(i))])
                    })
                    .collect(),
                Interpolation::Cubic => natural_spline(samples),
            }
        }
        Representation::Bump { m, n, amplitude } => {
            let (m, n) = (*m as usize, *n as usize);
            let mut coeffs = vec![0.0; m + n + 1];
            for j in 0..=n {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                coeffs[m + j] = amplitude * sign * binomial(n, j);
            }
            // About x = 1: amplitude (1 + s)^m (-s)^n, exactly.
            let mut right_coeffs = vec![0.0; m + n + 1];
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for i in 0..=m {
                right_coeffs[n + i] = amplitude * sign * binomial(m, i);
            }
            vec![Piece { left: 0.0, right: 1.0, coeffs, right_coeffs }]
        }
    };
    cover_unit_interval(pieces)
}

fn leading_order(coeffs: &[f64]) -> Option<u32> {
    let scale = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    if scale == 0.0 {
        return None;
    }
    coeffs.iter().position(|c| c.abs() > 1e-12 * scale).map(|i| i as u32)
}

fn derive_smoothness(pieces: &[Piece]) -> Option<Smoothness> {
    let first = pieces.first()?;
    let last = pieces.last()?;
    let m = leading_order(&first.coeffs)?;
    let at_one = last.shifted_coeffs(last.width());
    // Taylor coefficients in (x - 1); the vanishing order is the same in (1 - x).
    let n = leading_order(&at_one)?;
    let delta = first.width().min(last.width()).min(0.5);
    Some(Smoothness { m, n, delta })
}

fn representation_from_pieces(pieces: &[Piece]) -> Representation {
    let mut merged: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces.iter().filter(|p| p.width() > 0.0) {
        let mut p = p.clone();
        while p.coeffs.len() > 1 && *p.coeffs.last().unwrap() == 0.0 {
            p.coeffs.pop();
        }
        if let Some(prev) = merged.last_mut() {
            if prev.coeffs.len() == 1 && p.coeffs.len() == 1 && prev.coeffs[0] == p.coeffs[0] {
                prev.right = p.right;
                continue;
            }
        }
        merged.push(p);
    }
    let mut breakpoints: Vec<f64> = merged.iter().map(|p| p.left).collect();
    breakpoints.push(merged.last().map_or(1.0, |p| p.right));
    if merged.iter().all(|p| p.coeffs.len() == 1) {
        if merged.len() == 1 {
            return Representation::SquareWell { amplitude: merged[0].coeffs[0] };
        }
        return Representation::Step { breakpoints, levels: merged.iter().map(|p| p.coeffs[0]).collect() };
    }
    Representation::PiecewisePoly { breakpoints, coefficients: merged.into_iter().map(|p| p.coeffs).collect() }
}

impl PartialEq for Potential {
    fn eq(&self, other: &Self) -> bool {
        self.repr == other.repr && self.smoothness == other.smoothness
    }
}

impl Potential {
    fn from_repr(repr: Representation, smoothness: Option<Smoothness>) -> Self {
        let pieces = compile(&repr);
        let smoothness = smoothness.or_else(|| derive_smoothness(&pieces));
        Potential { repr, smoothness, pieces }
    }

    pub fn zero() -> Self {
        Self::square_well(0.0)
    }

    /// Constant `amplitude` on `[0, 1]`; negative values are wells.
    pub fn square_well(amplitude: f64) -> Self {
        assert!(amplitude.is_finite(), "square well amplitude must be finite");
        Self::from_repr(Representation::SquareWell { amplitude }, None)
    }

    pub fn step(breakpoints: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        check_breakpoints(&breakpoints)?;
        check_finite("levels", &levels)?;
        if levels.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidPotential("step needs one level per interval".into()));
        }
        Ok(Self::from_repr(Representation::Step { breakpoints, levels }, None))
    }

    pub fn piecewise_poly(breakpoints: Vec<f64>, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        check_breakpoints(&breakpoints)?;
        for c in &coefficients {
            check_finite("coefficients", c)?;
        }
        if coefficients.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidPotential("piecewise_poly needs one coefficient list per interval".into()));
        }
        Ok(Self::from_repr(Representation::PiecewisePoly { breakpoints, coefficients }, None))
    }

    pub fn grid(samples: Vec<f64>, interpolation: Interpolation) -> Result<Self> {
        check_finite("samples", &samples)?;
        if samples.len() < 2 {
            return Err(Error::InvalidPotential("grid needs at least two samples".into()));
        }
        Ok(Self::from_repr(Representation::Grid { samples, interpolation }, None))
    }

    pub fn bump(m: u32, n: u32, amplitude: f64) -> Result<Self> {
        check_finite("amplitude", &[amplitude])?;
        if m + n > 40 {
            return Err(Error::InvalidPotential("bump exponents too large".into()));
        }
        Ok(Self::from_repr(Representation::Bump { m, n, amplitude }, None))
    }

    /// Replace the derived endpoint metadata.
    pub fn with_smoothness(mut self, smoothness: Smoothness) -> Result<Self> {
        if !(smoothness.delta > 0.0 && smoothness.delta < 1.0) {
            return Err(Error::InvalidPotential("smoothness delta must lie in (0, 1)".into()));
        }
        self.smoothness = Some(smoothness);
        Ok(self)
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn smoothness(&self) -> Option<Smoothness> {
        self.smoothness
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(Piece::is_zero)
    }

    /// All piece boundaries, including 0 and 1.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.pieces.iter().map(|p| p.left).collect();
        b.push(1.0);
        b
    }

    pub(crate) fn piece_index(&self, x: f64) -> Option<usize> {
        if !(0.0..=1.0).contains(&x) {
            return None;
        }
        let i = self.pieces.partition_point(|p| p.right < x);
        (i < self.pieces.len()).then_some(i)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.piece_index(x) {
            Some(i) => self.pieces[i].eval(x),
            None => 0.0,
        }
    }

    /// Mirror image `x -> 1 - x`.
    pub fn reflect(&self) -> Potential {
        let swap = |s: Smoothness| Smoothness { m: s.n, n: s.m, delta: s.delta };
        let repr = match &self.repr {
            Representation::SquareWell { amplitude } => Representation::SquareWell { amplitude: *amplitude },
            Representation::Step { breakpoints, levels } => Representation::Step {
                breakpoints: breakpoints.iter().rev().map(|b| 1.0 - b).collect(),
                levels: levels.iter().rev().copied().collect(),
            },
            Representation::Grid { samples, interpolation } => Representation::Grid {
                samples: samples.iter().rev().copied().collect(),
                interpolation: *interpolation,
            },
            Representation::Bump { m, n, amplitude } => Representation::Bump { m: *n, n: *m, amplitude: *amplitude },
            Representation::PiecewisePoly { .. } => {
                let pieces: Vec<Piece> = self.pieces.iter().rev().map(Piece::reflected).collect();
                representation_from_pieces(&pieces)
            }
        };
        Potential::from_repr(repr, self.smoothness.map(swap))
    }

    /// `self` on `[0, a]` followed by `tail` on `(a, 1]`.
    pub fn splice(&self, tail: &Potential, a: f64) -> Result<Potential> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::Domain(format!("splice point {a} outside [0, 1]")));
        }
        let mut pieces = Vec::new();
        for p in &self.pieces {
            if p.left < a {
                pieces.push(p.restrict(p.left, p.right.min(a)));
            }
        }
        for p in &tail.pieces {
            if p.right > a {
                pieces.push(p.restrict(p.left.max(a), p.right));
            }
        }
        let repr = representation_from_pieces(&pieces);
        Ok(Potential::from_repr(repr, None))
    }

    /// Pointwise multiple `factor * q`.
    pub fn scaled(&self, factor: f64) -> Potential {
        let repr = match &self.repr {
            Representation::SquareWell { amplitude } => Representation::SquareWell { amplitude: amplitude * factor },
            Representation::Step { breakpoints, levels } => Representation::Step {
                breakpoints: breakpoints.clone(),
                levels: levels.iter().map(|v| v * factor).collect(),
            },
            Representation::PiecewisePoly { breakpoints, coefficients } => Representation::PiecewisePoly {
                breakpoints: breakpoints.clone(),
                coefficients: coefficients.iter().map(|c| c.iter().map(|v| v * factor).collect()).collect(),
            },
            Representation::Grid { samples, interpolation } => Representation::Grid {
                samples: samples.iter().map(|v| v * factor).collect(),
                interpolation: *interpolation,
            },
            Representation::Bump { m, n, amplitude } => Representation::Bump { m: *m, n: *n, amplitude: amplitude * factor },
        };
        let smoothness = if factor == 0.0 { None } else { self.smoothness };
        Potential::from_repr(repr, smoothness)
    }

    /// `∫_x^1 |q(t)| dt`.
    pub fn l1_tail(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("l1_tail needs x in [0, 1], got {x}")));
        }
        let mut total = 0.0;
        for p in self.pieces.iter().filter(|p| p.right > x && !p.is_zero()) {
            let lo = p.left.max(x);
            if p.coeffs.len() == 1 {
                total += p.coeffs[0].abs() * (p.right - lo);
                continue;
            }
            total += p.abs_integral(lo, p.right);
        }
        Ok(total)
    }

    pub fn to_json(&self) -> Value {
        let mut obj = match &self.repr {
            Representation::SquareWell { amplitude } => json!({"type": "square_well", "amplitude": amplitude}),
            Representation::Step { breakpoints, levels } => {
                json!({"type": "step", "breakpoints": breakpoints, "levels": levels})
            }
            Representation::PiecewisePoly { breakpoints, coefficients } => {
                json!({"type": "piecewise_poly", "breakpoints": breakpoints, "coefficients": coefficients})
            }
            Representation::Grid { samples, interpolation } => {
                json!({"type": "grid", "samples": samples, "interpolation": interpolation.order()})
            }
            Representation::Bump { m, n, amplitude } => json!({"type": "bump", "m": m, "n": n, "amplitude": amplitude}),
        };
        if let Some(s) = self.smoothness {
            obj["smoothness"] = json!({"m": s.m, "n": s.n, "delta": s.delta});
        }
        obj
    }

    /// SHA-256 of the compact JSON form, hex encoded.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(&self.to_json()).expect("potential serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            field: "<document>".into(),
            message: format!("line {}, column {}: {}", e.line(), e.column(), e),
        })?;
        Self::from_json(&value)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value.as_object().ok_or_else(|| parse_err("<document>", "expected a JSON object"))?;
        let kind = obj.get("type").and_then(Value::as_str).ok_or_else(|| parse_err("type", "missing or not a string"))?;
        let allowed: &[&str] = match kind {
            "square_well" => &["amplitude"],
            "step" => &["breakpoints", "levels"],
            "piecewise_poly" => &["breakpoints", "coefficients"],
            "grid" => &["samples", "interpolation"],
            "bump" => &["m", "n", "amplitude"],
            other => return Err(parse_err("type", &format!("unknown potential type `{other}`"))),
        };
        for key in obj.keys() {
            if key != "type" && key != "smoothness" && !allowed.contains(&key.as_str()) {
                return Err(parse_err(key, "unknown field"));
            }
        }
        let q = match kind {
            "square_well" => Potential::square_well(real(obj, "amplitude")?),
            "step" => Potential::step(reals(obj, "breakpoints")?, reals(obj, "levels")?)?,
            "piecewise_poly" => {
                let rows = obj
                    .get("coefficients")
                    .and_then(Value::as_array)
                    .ok_or_else(|| parse_err("coefficients", "missing or not an array"))?;
                let coefficients = rows
                    .iter()
                    .map(|r| real_list(r, "coefficients"))
                    .collect::<Result<Vec<_>>>()?;
                Potential::piecewise_poly(reals(obj, "breakpoints")?, coefficients)?
            }
            "grid" => {
                let order = unsigned(obj, "interpolation")?;
                let interp = Interpolation::from_order(order)
                    .ok_or_else(|| parse_err("interpolation", "must be 0, 1 or 3"))?;
                Potential::grid(reals(obj, "samples")?, interp)?
            }
            "bump" => Potential::bump(unsigned(obj, "m")? as u32, unsigned(obj, "n")? as u32, real(obj, "amplitude")?)?,
            _ => unreachable!(),
        };
        match obj.get("smoothness") {
            None | Some(Value::Null) => Ok(q),
            Some(Value::Object(s)) => {
                for key in s.keys() {
                    if !["m", "n", "delta"].contains(&key.as_str()) {
                        return Err(parse_err(&format!("smoothness.{key}"), "unknown field"));
                    }
                }
                let sm = Smoothness {
                    m: unsigned(s, "m")? as u32,
                    n: unsigned(s, "n")? as u32,
                    delta: real(s, "delta")?,
                };
                q.with_smoothness(sm)
            }
            Some(_) => Err(parse_err("smoothness", "expected an object")),
        }
    }
}

fn parse_err(field: &str, message: &str) -> Error {
    Error::Parse { field: field.to_string(), message: message.to_string() }
}

fn real(obj: &Map<String, Value>, key: &str) -> Result<f64> {
    obj.get(key).and_then(Value::as_f64).ok_or_else(|| parse_err(key, "missing or not a real number"))
}

fn unsigned(obj: &Map<String, Value>, key: &str) -> Result<u64> {
    obj.get(key).and_then(Value::as_u64).ok_or_else(|| parse_err(key, "missing or not a nonnegative integer"))
}

fn real_list(v: &Value, key: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| parse_err(key, "expected an array of real numbers"))?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| parse_err(key, "expected a real number (complex values are rejected)")))
        .collect()
}

fn reals(obj: &Map<String, Value>, key: &str) -> Result<Vec<f64>> {
    real_list(obj.get(key).ok_or_else(|| parse_err(key, "missing"))?, key)
}

/// Two potentials known to coincide on `[0, a]`.
#[derive(Debug, Clone)]
pub struct PotentialPair {
    pub q: Potential,
    pub q_tilde: Potential,
    pub prefix: f64,
}

impl PotentialPair {
    pub fn new(q: Potential, q_tilde: Potential, prefix: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&prefix) {
            return Err(Error::Domain(format!("agreement prefix {prefix} outside [0, 1]")));
        }
        // Agreement on [0, 0] is vacuous. Elsewhere allow the rounding of
        // different polynomial expansions of the same function.
        const SAMPLES: usize = 4096;
        for i in (0..=SAMPLES).filter(|_| prefix > 0.0) {
            let x = prefix * i as f64 / SAMPLES as f64;
            let (u, v) = (q.eval(x), q_tilde.eval(x));
            if (u - v).abs() > 1e-12 * (1.0 + u.abs()) {
                return Err(Error::InvalidPotential(format!("pair disagrees at x = {x} inside the prefix [0, {prefix}]")));
            }
        }
        Ok(PotentialPair { q, q_tilde, prefix })
    }

    /// `max |q - q_tilde|` over a uniform 1001-point grid on `[prefix, 1]`.
    pub fn tail_difference(&self) -> f64 {
        (0..=1000)
            .map(|i| self.prefix + (1.0 - self.prefix) * i as f64 / 1000.0)
            .map(|x| (self.q.eval(x) - self.q_tilde.eval(x)).abs())
            .fold(0.0, f64::max)
    }
}
