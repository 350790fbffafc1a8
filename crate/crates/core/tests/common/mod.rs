//! Independent closed-form oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C;

pub const I: C = C::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// `sin z / z`, with the removable point handled by series.
pub fn sinc(z: C) -> C {
    if z.norm() < 1e-3 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// `κ = sqrt(k² - c)`; every formula below is even in `κ`.
pub fn kappa(k: C, depth: f64) -> C {
    (k * k - depth).sqrt()
}

/// Closed forms for the constant potential `q = depth` on `[0, 1]`.
pub struct SquareWell {
    pub depth: f64,
}

impl SquareWell {
    pub fn omega(&self, k: C) -> C {
        let c = self.depth;
        if k.norm_sqr() > 4.0 * c.abs() + 1.0 {
            // Exponential form with κ on the branch κ ≈ k, which avoids the
            // cancellation between the sin and cos terms at large |Im k|:
            // ω = e^{ik}/(2iκ) [c² e^{iκ}/(κ+k)² - (κ+k)² e^{-iκ}].
            let kap = k * (1.0 - c / (k * k)).sqrt();
            let p = (kap + k) * (kap + k);
            return (I * k).exp() / (2.0 * I * kap) * (c * c * (I * kap).exp() / p - p * (-I * kap).exp());
        }
        let kap = kappa(k, c);
        (I * k).exp() * ((kap * kap + k * k) * sinc(kap) + 2.0 * I * k * kap.cos())
    }

    /// The textbook trigonometric form, used to cross-check the one above.
    pub fn omega_trig(&self, k: C) -> C {
        let kap = kappa(k, self.depth);
        (I * k).exp() * ((kap * kap + k * k) * sinc(kap) + 2.0 * I * k * kap.cos())
    }

    pub fn s(&self, k: C) -> C {
        let kap = kappa(k, self.depth);
        self.depth * (I * k).exp() * sinc(kap)
    }

    /// `dω/dk` by a five-point stencil on the closed form.
    pub fn omega_prime(&self, k: C) -> C {
        let h = 1e-4;
        (-self.omega(k + 2.0 * h) + 8.0 * self.omega(k + h) - 8.0 * self.omega(k - h) + self.omega(k - 2.0 * h))
            / (12.0 * h)
    }

    /// `(ψ₊(x), ψ₊'(x))` for `x` in `[0, 1]`.
    pub fn psi_plus(&self, k: C, x: f64) -> (C, C) {
        let kap = kappa(k, self.depth);
        let y = x - 1.0;
        let e = (I * k).exp();
        let psi = e * ((kap * y).cos() + I * k * y * sinc(kap * y));
        let dpsi = e * (-kap * kap * y * sinc(kap * y) + I * k * (kap * y).cos());
        (psi, dpsi)
    }

    /// Real zeros `±sqrt(c + j²π²)` of `s` (for `c > -π²`).
    pub fn s_zeros(&self, jmax: usize) -> Vec<f64> {
        (1..=jmax).map(|j| (self.depth + (j as f64 * std::f64::consts::PI).powi(2)).sqrt()).collect()
    }
}

/// Relative distance `|a - b| / max(|b|, floor)`.
pub fn rel(a: C, b: C, floor: f64) -> f64 {
    (a - b).norm() / b.norm().max(floor)
}

/// Deterministic pseudo-random points in a rectangle (Halton 2/3).
pub fn halton_points(n: usize, re: (f64, f64), im: (f64, f64)) -> Vec<C> {
    let radical = |mut i: usize, base: usize| {
        let mut f = 1.0;
        let mut r = 0.0;
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    };
    (1..=n)
        .map(|i| c(re.0 + (re.1 - re.0) * radical(i, 2), im.0 + (im.1 - im.0) * radical(i, 3)))
        .collect()
}

/// Root of a real function bracketed by `[a, b]`, by bisection.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// All sign changes of `f` on `[a, b]` found on a grid of `n` cells,
/// refined by bisection.
pub fn real_roots(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    xs.windows(2).filter(|w| f(w[0]) * f(w[1]) < 0.0).map(|w| bisect(&f, w[0], w[1])).collect()
}

impl SquareWell {
    /// `τ > 0` with `ω(iτ) = 0`: the well quantization condition
    /// `(κ² - τ²) sin κ = 2τκ cos κ`, `κ = sqrt(-c - τ²)`.
    pub fn bound_states(&self) -> Vec<f64> {
        let top = (-self.depth).sqrt();
        let f = |t: f64| {
            let kap = (-self.depth - t * t).sqrt();
            (kap * kap - t * t) * kap.sin() - 2.0 * t * kap * kap.cos()
        };
        real_roots(f, 1e-9, top - 1e-12, 20000)
    }

    /// Zeros of `ω` in `|k| < r` by the argument principle on the circle,
    /// with the trapezoid rule on `m` points.
    pub fn count_in_disk(&self, r: f64, m: usize) -> f64 {
        let mut total = C::new(0.0, 0.0);
        for j in 0..m {
            let th = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let k = C::from_polar(r, th);
            let dk = I * k * (2.0 * std::f64::consts::PI / m as f64);
            total += self.omega_prime(k) / self.omega(k) * dk;
        }
        (total / (2.0 * std::f64::consts::PI * I)).re
    }
}
