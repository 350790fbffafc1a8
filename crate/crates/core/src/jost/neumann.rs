//! Iterated-integral series for `ψ₊`, used as an independent check on the
//! ODE solver.
//!
//! `ψ₀ = e^{ikx}` and `ψ_j(x) = ∫_x^1 sin(k(t-x))/k · q(t) ψ_{j-1}(t) dt`.
//! Each iterate is tabulated on Chebyshev–Lobatto panels and integrated
//! spectrally.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potential::Potential;

type C = Complex64;

const NODES: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct NeumannSeries {
    pub psi: C,
    pub tail_bound: f64,
    /// `ψ_0(x), ..., ψ_J(x)`.
    pub iterates: Vec<C>,
}

/// Lobatto nodes `cos(πj/(N-1))` on `[-1, 1]`, descending.
fn reference_nodes() -> &'static [f64; NODES] {
    static CELL: OnceLock<[f64; NODES]> = OnceLock::new();
    CELL.get_or_init(|| std::array::from_fn(|j| (std::f64::consts::PI * j as f64 / (NODES - 1) as f64).cos()))
}

/// `M[i][j]`: weight of `f(x_j)` in `∫_{-1}^{x_i} p(t) dt`, `p` the interpolant.
fn cumulative_matrix() -> &'static Vec<[f64; NODES]> {
    static CELL: OnceLock<Vec<[f64; NODES]>> = OnceLock::new();
    CELL.get_or_init(|| {
        let n1 = (NODES - 1) as f64;
        let pi = std::f64::consts::PI;
        let mut m = vec![[0.0; NODES]; NODES];
        for j in 0..NODES {
            // Chebyshev coefficients of the j-th cardinal function.
            let wj = if j == 0 || j == NODES - 1 { 0.5 } else { 1.0 };
            let mut a: Vec<f64> = (0..NODES)
                .map(|n| 2.0 / n1 * wj * (pi * (n * j) as f64 / n1).cos())
                .collect();
            a[0] *= 0.5;
            a[NODES - 1] *= 0.5;
            a.extend([0.0, 0.0]);
            let mut b = vec![0.0; NODES + 1];
            b[1] = a[0] - a[2] / 2.0;
            for n in 2..=NODES {
                b[n] = (a[n - 1] - a[n + 1]) / (2.0 * n as f64);
            }
            b[0] = -(1..=NODES).map(|n| if n % 2 == 0 { b[n] } else { -b[n] }).sum::<f64>();
            for (i, row) in m.iter_mut().enumerate() {
                row[j] = (0..=NODES).map(|n| b[n] * (pi * (n * i) as f64 / n1).cos()).sum();
            }
        }
        m
    })
}

struct Panel {
    left: f64,
    right: f64,
    piece: usize,
}

impl Panel {
    fn nodes(&self) -> [f64; NODES] {
        let (c, h) = (0.5 * (self.left + self.right), 0.5 * (self.right - self.left));
        let r = reference_nodes();
        std::array::from_fn(|j| if j == 0 { self.right } else if j == NODES - 1 { self.left } else { c + h * r[j] })
    }
}

/// Partial sum `Σ_{j<=J} ψ_j(x)` with a rigorous bound on the remainder.
///
/// With `ν = |Im k|`, `E = max(1, e^{-Im k})` and `w = Q(x)/|k|`,
/// `Q(x) = ∫_x^1 |q|`, the iterates satisfy
/// `|ψ_j(x)| <= E e^{ν(1-x)} w^j / j!`, so the tail is at most
/// `E e^{ν(1-x)} w^{J+1} e^w / (J+1)!`.
pub fn neumann_psi_plus(q: &Potential, k: C, x: f64, terms: usize) -> Result<NeumannSeries> {
    if terms < 1 {
        return Err(Error::Domain("need at least one iterate".into()));
    }
    if k.norm() < 0.1 {
        return Err(Error::Domain("series bound is useless for |k| < 0.1".into()));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
    }
    let ik = C::new(0.0, 1.0) * k;
    let psi0 = (ik * x).exp();
    let big_q = q.l1_tail(x)?;
    let nu = k.im.abs();
    let w = big_q / k.norm();
    let growth = 1f64.max((-k.im).exp()) * (nu * (1.0 - x)).exp();
    let factorial: f64 = (1..=terms + 1).map(|i| i as f64).product();
    let tail_bound = growth * w.powi(terms as i32 + 1) * w.exp() / factorial;
    if x == 1.0 || q.is_zero() {
        let mut iterates = vec![C::new(0.0, 0.0); terms + 1];
        iterates[0] = psi0;
        return Ok(NeumannSeries { psi: psi0, tail_bound, iterates });
    }

    // Panels on [x, 1], split at piece boundaries, short enough that the
    // oscillation e^{±ikt} is resolved.
    let mut panels = Vec::new();
    for (idx, p) in q.pieces().iter().enumerate() {
        let (lo, hi) = (p.left.max(x), p.right);
        if hi <= lo {
            continue;
        }
        let count = ((k.norm() * (hi - lo) / 8.0).ceil() as usize).max(1);
        for s in 0..count {
            let a = lo + (hi - lo) * s as f64 / count as f64;
            let b = if s + 1 == count { hi } else { lo + (hi - lo) * (s + 1) as f64 / count as f64 };
            panels.push(Panel { left: a, right: b, piece: idx });
        }
    }
    let nodes: Vec<[f64; NODES]> = panels.iter().map(Panel::nodes).collect();
    let qv: Vec<[f64; NODES]> = panels
        .iter()
        .zip(&nodes)
        .map(|(p, t)| std::array::from_fn(|j| q.pieces()[p.piece].eval(t[j])))
        .collect();
    let ep: Vec<[C; NODES]> = nodes.iter().map(|t| std::array::from_fn(|j| (ik * t[j]).exp())).collect();
    let em: Vec<[C; NODES]> = nodes.iter().map(|t| std::array::from_fn(|j| (-ik * t[j]).exp())).collect();
    let m = cumulative_matrix();

    let mut current: Vec<[C; NODES]> = ep.clone();
    let mut iterates = vec![psi0];
    for _ in 0..terms {
        let mut next = vec![[C::new(0.0, 0.0); NODES]; panels.len()];
        // Running ∫_{panel right}^1 of e^{±ikt} q ψ.
        let mut after_p = C::new(0.0, 0.0);
        let mut after_m = C::new(0.0, 0.0);
        for p in (0..panels.len()).rev() {
            let half = 0.5 * (panels[p].right - panels[p].left);
            let fp: [C; NODES] = std::array::from_fn(|j| ep[p][j] * qv[p][j] * current[p][j]);
            let fm: [C; NODES] = std::array::from_fn(|j| em[p][j] * qv[p][j] * current[p][j]);
            let cum = |f: &[C; NODES], i: usize| -> C {
                m[i].iter().zip(f).map(|(w, v)| v * *w).sum::<C>() * half
            };
            // Node 0 is the right end, so cum(0) is the whole panel.
            let total_p = cum(&fp, 0);
            let total_m = cum(&fm, 0);
            for i in 0..NODES {
                let cp = total_p - cum(&fp, i) + after_p;
                let cm = total_m - cum(&fm, i) + after_m;
                next[p][i] = (em[p][i] * cp - ep[p][i] * cm) / (2.0 * ik);
            }
            after_p += total_p;
            after_m += total_m;
        }
        iterates.push(next[0][NODES - 1]);
        current = next;
    }
    let psi = iterates.iter().sum();
    Ok(NeumannSeries { psi, tail_bound, iterates })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_matrix_integrates_polynomials() {
        let r = reference_nodes();
        let m = cumulative_matrix();
        let f: Vec<f64> = r.iter().map(|x| 5.0 * x.powi(4) - 1.0).collect();
        for (i, x) in r.iter().enumerate() {
            let exact = x.powi(5) - x - (-1.0f64 - -1.0);
            let got: f64 = m[i].iter().zip(&f).map(|(w, v)| w * v).sum();
            assert!((got - exact).abs() < 1e-13, "{got} vs {exact}");
        }
    }

    #[test]
    fn free_line_has_no_corrections() {
        let r = neumann_psi_plus(&Potential::zero(), C::new(2.0, 1.0), 0.3, 1).unwrap();
        assert_eq!(r.tail_bound, 0.0);
        assert!((r.psi - (C::new(0.0, 1.0) * C::new(2.0, 1.0) * 0.3).exp()).norm() < 1e-15);
    }

    #[test]
    fn rejects_small_k() {
        assert!(neumann_psi_plus(&Potential::square_well(1.0), C::new(0.05, 0.0), 0.0, 3).is_err());
        assert!(neumann_psi_plus(&Potential::square_well(1.0), C::new(1.0, 0.0), 0.0, 0).is_err());
    }
}
