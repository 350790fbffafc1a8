//! Jost solutions and the entire functions `ω(k)`, `s(k)`.
//!
//! For `|k| >= 0.5` the solver integrates amplitudes `(a, b)` defined by
//! `ψ = a e^{ikx} + b e^{-ikx}`, `ψ' = ik (a e^{ikx} - b e^{-ikx})`, which
//! stay constant wherever `q = 0` and give `ω = 2ik a(0)`, `s = 2ik b(0)`
//! without cancellation. The state carries `2ik (a, b)`, so it is measured
//! in the units of `ω` and `s` themselves. The subdominant amplitude is stored multiplied by
//! its exponential weight so that every state component is on the scale at
//! which it influences the solution. Near `k = 0` the amplitude form is
//! singular and the solver falls back to `(ψ, ψ')` directly.

mod neumann;

pub use neumann::{neumann_psi_plus, NeumannSeries};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{Dop853, OdeError, Tolerances};
use crate::potential::Potential;

type C = Complex64;

const I: C = C::new(0.0, 1.0);
const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Below this modulus the direct `(ψ, ψ')` formulation is used.
const DIRECT_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JostEvaluation {
    pub x: f64,
    pub k: C,
    pub psi: C,
    pub dpsi: C,
}

/// `ω`, `s` and the scattering coefficients at one frequency. `T` and `R±`
/// are only populated for real nonzero `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringData {
    pub k: C,
    pub omega: C,
    pub s: C,
    pub t: Option<C>,
    pub r_plus: Option<C>,
    pub r_minus: Option<C>,
}

impl ScatteringData {
    /// `max(| |T|² + |R₊|² - 1 |, | |T|² + |R₋|² - 1 |)`.
    pub fn unitarity_residual(&self) -> Option<f64> {
        let t = self.t?.norm_sqr();
        let rp = self.r_plus?.norm_sqr();
        let rm = self.r_minus?.norm_sqr();
        Some((t + rp - 1.0).abs().max((t + rm - 1.0).abs()))
    }
}

/// `ψ₊(0, k)`, `ψ₊'(0, k)` and the boundary functions built from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundary {
    pub k: C,
    pub psi0: C,
    pub dpsi0: C,
    pub omega: C,
    pub s: C,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryDerivative {
    pub k: C,
    pub omega: C,
    pub d_omega: C,
    pub s: C,
    pub d_s: C,
}

/// Amplitude frame: `A = a e^{2ikxu}`, `B = b e^{-2ikxv}` with `u + v <= 1`.
#[derive(Debug, Clone, Copy)]
struct Frame {
    u: f64,
    v: f64,
}

impl Frame {
    const PLAIN: Frame = Frame { u: 0.0, v: 0.0 };

    fn for_plus(k: C) -> Frame {
        if k.im > 0.0 {
            Frame { u: 0.0, v: 1.0 }
        } else {
            Frame::PLAIN
        }
    }

    fn for_minus(k: C) -> Frame {
        if k.im > 0.0 {
            Frame { u: 1.0, v: 0.0 }
        } else {
            Frame::PLAIN
        }
    }

    fn coupled(self) -> bool {
        self.u + self.v > 0.0
    }

    /// `(ψ, ψ')` at `x`.
    fn psi(self, k: C, x: f64, a: C, b: C) -> (C, C) {
        let ea = (I * k * x * (1.0 - 2.0 * self.u)).exp();
        let eb = (I * k * x * (2.0 * self.v - 1.0)).exp();
        let (pa, pb) = (a * ea, b * eb);
        (pa + pb, I * k * (pa - pb))
    }
}

trait System<const N: usize> {
    fn rhs(&self, x: f64, q: f64, y: &[C; N]) -> [C; N];
    /// Exact propagation across an interval where `q = 0`.
    fn free(&self, from: f64, to: f64, y: [C; N]) -> [C; N];
}

struct Amplitude {
    k: C,
    inv_2ik: C,
    frame: Frame,
}

impl Amplitude {
    fn new(k: C, frame: Frame) -> Self {
        Amplitude { k, inv_2ik: 1.0 / (2.0 * I * k), frame }
    }
}

impl System<2> for Amplitude {
    #[inline]
    fn rhs(&self, x: f64, q: f64, y: &[C; 2]) -> [C; 2] {
        let g = self.inv_2ik * q;
        let Frame { u, v } = self.frame;
        if self.frame.coupled() {
            let f = g * (y[0] + y[1]);
            let tk = 2.0 * I * self.k;
            [f + tk * u * y[0], -f - tk * v * y[1]]
        } else {
            let ep = (2.0 * I * self.k * x).exp();
            // Not 1/ep: complex division squares the modulus and overflows.
            let em = (-2.0 * I * self.k * x).exp();
            [g * (y[0] + y[1] * em), -g * (y[0] * ep + y[1])]
        }
    }

    fn free(&self, from: f64, to: f64, y: [C; 2]) -> [C; 2] {
        if !self.frame.coupled() {
            return y;
        }
        let d = to - from;
        let tk = 2.0 * I * self.k * d;
        [y[0] * (tk * self.frame.u).exp(), y[1] * (-tk * self.frame.v).exp()]
    }
}

/// Amplitudes together with their `k`-derivatives `[A, B, A_k, B_k]`.
struct AmplitudeVariational(Amplitude);

impl System<4> for AmplitudeVariational {
    #[inline]
    fn rhs(&self, x: f64, q: f64, y: &[C; 4]) -> [C; 4] {
        let sys = &self.0;
        let k = sys.k;
        let g = sys.inv_2ik * q;
        let gk = -g / k;
        let [a, b, ak, bk] = *y;
        let Frame { u, v } = sys.frame;
        if sys.frame.coupled() {
            let f = a + b;
            let fk = ak + bk;
            let tk = 2.0 * I * k;
            [
                g * f + tk * u * a,
                -g * f - tk * v * b,
                gk * f + g * fk + 2.0 * I * u * a + tk * u * ak,
                -gk * f - g * fk - 2.0 * I * v * b - tk * v * bk,
            ]
        } else {
            let ep = (2.0 * I * k * x).exp();
            let em = (-2.0 * I * k * x).exp();
            let ix2 = 2.0 * I * x;
            let fa = a + b * em;
            let fb = a * ep + b;
            [
                g * fa,
                -g * fb,
                gk * fa + g * (ak + bk * em - ix2 * b * em),
                -gk * fb - g * (ak * ep + ix2 * a * ep + bk),
            ]
        }
    }

    fn free(&self, from: f64, to: f64, y: [C; 4]) -> [C; 4] {
        let sys = &self.0;
        if !sys.frame.coupled() {
            return y;
        }
        let d = to - from;
        let Frame { u, v } = sys.frame;
        let ea = (2.0 * I * sys.k * d * u).exp();
        let eb = (-2.0 * I * sys.k * d * v).exp();
        [
            y[0] * ea,
            y[1] * eb,
            ea * (y[2] + 2.0 * I * u * d * y[0]),
            eb * (y[3] - 2.0 * I * v * d * y[1]),
        ]
    }
}

/// `[ψ, ψ', ψ_k, ψ'_k]` for small `|k|`.
struct Direct {
    k: C,
}

/// `sin(kd)/k` and its `k`-derivative by power series (`|kd|` is small).
fn sinc_pair(k: C, d: f64) -> (C, C) {
    let mut s = ZERO;
    let mut sk = ZERO;
    let k2d2 = k * k * d * d;
    let mut term = C::new(d, 0.0); // (-1)^j k^{2j} d^{2j+1} / (2j+1)!
    for j in 0..40 {
        s += term;
        if j > 0 {
            sk += term * (2.0 * j as f64) / k;
        }
        let next = -term * k2d2 / ((2 * j + 2) as f64 * (2 * j + 3) as f64);
        if next.norm() < 1e-18 * s.norm().max(1e-300) {
            break;
        }
        term = next;
    }
    if k == ZERO {
        sk = ZERO;
    }
    (s, sk)
}

impl System<4> for Direct {
    #[inline]
    fn rhs(&self, _x: f64, q: f64, y: &[C; 4]) -> [C; 4] {
        let w = q - self.k * self.k;
        [y[1], w * y[0], y[3], w * y[2] - 2.0 * self.k * y[0]]
    }

    fn free(&self, from: f64, to: f64, y: [C; 4]) -> [C; 4] {
        let k = self.k;
        let d = to - from;
        let c = (k * d).cos();
        let (s, sk) = sinc_pair(k, d);
        let ck = -d * k * s;
        let k2 = k * k;
        let [y0, y1, y2, y3] = y;
        [
            y0 * c + y1 * s,
            -y0 * k2 * s + y1 * c,
            y2 * c + y0 * ck + y3 * s + y1 * sk,
            -y2 * k2 * s - y0 * (2.0 * k * s + k2 * sk) + y3 * c + y1 * ck,
        ]
    }
}

/// Configurable solver; the free functions use the default tolerances.
#[derive(Debug, Clone, Copy)]
pub struct JostSolver {
    pub tol: Tolerances,
}

impl Default for JostSolver {
    fn default() -> Self {
        JostSolver { tol: Tolerances { rtol: 1e-11, atol: 1e-13 } }
    }
}

fn check_k(k: C) -> Result<()> {
    if k.re.is_finite() && k.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("non-finite frequency {k}")))
    }
}

fn check_xs(xs: &[f64], increasing: bool) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::Domain("no evaluation points".into()));
    }
    if xs.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::Domain("evaluation points must lie in [0, 1]".into()));
    }
    let ordered = xs.windows(2).all(|w| if increasing { w[0] <= w[1] } else { w[0] >= w[1] });
    if !ordered {
        return Err(Error::Domain("evaluation points must be ordered".into()));
    }
    Ok(())
}

impl JostSolver {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        JostSolver { tol: Tolerances { rtol, atol } }
    }

    /// Integrate `sys` from `from` through the potential's pieces, returning
    /// the state at each of `stops` (monotone, in the direction of travel).
    fn sweep<const N: usize, S: System<N>>(
        &self,
        q: &Potential,
        k: C,
        sys: &S,
        from: f64,
        y0: [C; N],
        stops: &[f64],
    ) -> Result<Vec<[C; N]>> {
        let to = *stops.last().expect("nonempty stops");
        let forward = to >= from;
        let within = |x: f64| if forward { x > from && x < to } else { x < from && x > to };
        let mut marks: Vec<f64> = q.breakpoints().into_iter().filter(|&x| within(x)).collect();
        marks.extend(stops.iter().copied().filter(|&x| x != from));
        marks.sort_by(|a, b| if forward { a.total_cmp(b) } else { b.total_cmp(a) });
        marks.dedup();

        let mut out = Vec::with_capacity(stops.len());
        let mut next_stop = 0;
        let mut x = from;
        let mut y = y0;
        while next_stop < stops.len() && stops[next_stop] == x {
            out.push(y);
            next_stop += 1;
        }
        let mut ode = Dop853::<N>::new(self.tol);
        let pieces = q.pieces();
        for m in marks {
            let mid = 0.5 * (x + m);
            let piece = &pieces[q.piece_index(mid).expect("midpoint inside [0, 1]")];
            y = if piece.is_zero() {
                sys.free(x, m, y)
            } else {
                // Integrate in the offset from x so that q is evaluated at the
                // exact distance from the segment's start.
                let start = x;
                ode.integrate(|d, y| sys.rhs(start + d, piece.eval_offset(start, d), y), 0.0, y, m - x).map_err(|e| {
                    match e {
                        OdeError::StepUnderflow { x: d } | OdeError::MaxSteps { x: d } => {
                            Error::Nonconvergence { x: start + d, k }
                        }
                    }
                })?
            };
            if y.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::Nonconvergence { x: m, k });
            }
            x = m;
            while next_stop < stops.len() && stops[next_stop] == x {
                out.push(y);
                next_stop += 1;
            }
        }
        Ok(out)
    }

    /// `ψ₊` and `ψ₊'` at each `x` in `xs` (any monotone order).
    pub fn plus(&self, q: &Potential, k: C, xs: &[f64]) -> Result<Vec<JostEvaluation>> {
        check_k(k)?;
        let decreasing = xs.windows(2).all(|w| w[0] >= w[1]);
        check_xs(xs, !decreasing)?;
        let stops: Vec<f64> = if decreasing { xs.to_vec() } else { xs.iter().rev().copied().collect() };
        let mut evals: Vec<JostEvaluation> = if k.norm() < DIRECT_RADIUS {
            let e = (I * k).exp();
            let y0 = [e, I * k * e, I * e, (I - k) * e];
            self.sweep(q, k, &Direct { k }, 1.0, y0, &stops)?
                .into_iter()
                .zip(&stops)
                .map(|(y, &x)| JostEvaluation { x, k, psi: y[0], dpsi: y[1] })
                .collect()
        } else {
            let frame = Frame::for_plus(k);
            let tk = 2.0 * I * k;
            self.sweep(q, k, &Amplitude::new(k, frame), 1.0, [tk, ZERO], &stops)?
                .into_iter()
                .zip(&stops)
                .map(|(y, &x)| {
                    let (psi, dpsi) = frame.psi(k, x, y[0] / tk, y[1] / tk);
                    JostEvaluation { x, k, psi, dpsi }
                })
                .collect()
        };
        if !decreasing {
            evals.reverse();
        }
        Ok(evals)
    }

    /// `ψ₋` and `ψ₋'` at each `x` in `xs` (any monotone order).
    pub fn minus(&self, q: &Potential, k: C, xs: &[f64]) -> Result<Vec<JostEvaluation>> {
        check_k(k)?;
        let increasing = xs.windows(2).all(|w| w[0] <= w[1]);
        check_xs(xs, increasing)?;
        let stops: Vec<f64> = if increasing { xs.to_vec() } else { xs.iter().rev().copied().collect() };
        let mut evals: Vec<JostEvaluation> = if k.norm() < DIRECT_RADIUS {
            let y0 = [ONE, -I * k, ZERO, -I];
            self.sweep(q, k, &Direct { k }, 0.0, y0, &stops)?
                .into_iter()
                .zip(&stops)
                .map(|(y, &x)| JostEvaluation { x, k, psi: y[0], dpsi: y[1] })
                .collect()
        } else {
            let frame = Frame::for_minus(k);
            let tk = 2.0 * I * k;
            self.sweep(q, k, &Amplitude::new(k, frame), 0.0, [ZERO, tk], &stops)?
                .into_iter()
                .zip(&stops)
                .map(|(y, &x)| {
                    let (psi, dpsi) = frame.psi(k, x, y[0] / tk, y[1] / tk);
                    JostEvaluation { x, k, psi, dpsi }
                })
                .collect()
        };
        if !increasing {
            evals.reverse();
        }
        Ok(evals)
    }

    pub fn boundary(&self, q: &Potential, k: C) -> Result<Boundary> {
        check_k(k)?;
        if k.norm() < DIRECT_RADIUS {
            let e = self.plus(q, k, &[0.0])?[0];
            let ik = I * k;
            return Ok(Boundary { k, psi0: e.psi, dpsi0: e.dpsi, omega: e.dpsi + ik * e.psi, s: -e.dpsi + ik * e.psi });
        }
        let frame = Frame::for_plus(k);
        let tk = 2.0 * I * k;
        let y = self.sweep(q, k, &Amplitude::new(k, frame), 1.0, [tk, ZERO], &[0.0])?[0];
        let (psi0, dpsi0) = frame.psi(k, 0.0, y[0] / tk, y[1] / tk);
        Ok(Boundary { k, psi0, dpsi0, omega: y[0], s: y[1] })
    }

    /// `ω`, `s` and their `k`-derivatives from the variational system.
    pub fn boundary_with_derivative(&self, q: &Potential, k: C) -> Result<BoundaryDerivative> {
        check_k(k)?;
        if k.norm() < DIRECT_RADIUS {
            let e = (I * k).exp();
            let y0 = [e, I * k * e, I * e, (I - k) * e];
            let y = self.sweep(q, k, &Direct { k }, 1.0, y0, &[0.0])?[0];
            let ik = I * k;
            return Ok(BoundaryDerivative {
                k,
                omega: y[1] + ik * y[0],
                d_omega: y[3] + I * y[0] + ik * y[2],
                s: -y[1] + ik * y[0],
                d_s: -y[3] + I * y[0] + ik * y[2],
            });
        }
        let sys = AmplitudeVariational(Amplitude::new(k, Frame::for_plus(k)));
        // The system is linear, so scaling by 2ik only changes the initial
        // data: (2ik a)_k starts at 2i.
        let y = self.sweep(q, k, &sys, 1.0, [2.0 * I * k, ZERO, 2.0 * I, ZERO], &[0.0])?[0];
        Ok(BoundaryDerivative { k, omega: y[0], d_omega: y[2], s: y[1], d_s: y[3] })
    }

    pub fn scattering(&self, q: &Potential, k: f64) -> Result<ScatteringData> {
        if k == 0.0 || !k.is_finite() {
            return Err(Error::Domain("scattering coefficients need real k != 0".into()));
        }
        let kc = C::new(k, 0.0);
        let b = self.boundary(q, kc)?;
        let s_minus = self.boundary(q, -kc)?.s;
        if b.omega.norm() < 1e-13 {
            return Err(Error::Inconsistency(format!("ω vanishes on the real axis at k = {k}")));
        }
        Ok(ScatteringData {
            k: kc,
            omega: b.omega,
            s: b.s,
            t: Some(2.0 * I * kc / b.omega),
            r_plus: Some(b.s / b.omega),
            r_minus: Some(s_minus / b.omega),
        })
    }
}

pub fn jost_plus(q: &Potential, k: C, xs: &[f64]) -> Result<Vec<JostEvaluation>> {
    JostSolver::default().plus(q, k, xs)
}

pub fn jost_minus(q: &Potential, k: C, xs: &[f64]) -> Result<Vec<JostEvaluation>> {
    JostSolver::default().minus(q, k, xs)
}

/// `ω(k) = ψ₊'(0, k) + ik ψ₊(0, k)`.
pub fn omega(q: &Potential, k: C) -> Result<C> {
    Ok(JostSolver::default().boundary(q, k)?.omega)
}

/// `s(k) = -ψ₊'(0, k) + ik ψ₊(0, k)`.
pub fn s_func(q: &Potential, k: C) -> Result<C> {
    Ok(JostSolver::default().boundary(q, k)?.s)
}

pub fn omega_prime(q: &Potential, k: C) -> Result<C> {
    Ok(JostSolver::default().boundary_with_derivative(q, k)?.d_omega)
}

pub fn s_prime(q: &Potential, k: C) -> Result<C> {
    Ok(JostSolver::default().boundary_with_derivative(q, k)?.d_s)
}

/// `T = 2ik/ω(k)`, `R₊ = s(k)/ω(k)`, `R₋ = s(-k)/ω(k)`.
pub fn scattering_coefficients(q: &Potential, k: f64) -> Result<ScatteringData> {
    JostSolver::default().scattering(q, k)
}

/// `{f, g} = f g' - f' g`.
pub fn wronskian(f: &JostEvaluation, g: &JostEvaluation) -> Result<C> {
    if f.x != g.x || f.k != g.k {
        return Err(Error::Domain("wronskian needs evaluations at the same (x, k)".into()));
    }
    Ok(f.psi * g.dpsi - f.dpsi * g.psi)
}
