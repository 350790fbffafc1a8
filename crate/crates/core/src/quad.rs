//! Adaptive Gauss–Kronrod (7/15) quadrature for vector-valued complex
//! integrands along a real parameter.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, PartialEq)]
pub enum QuadError<E> {
    /// An interval shrank below the minimum width; carries its midpoint.
    TooNarrow { at: f64 },
    /// The interval budget ran out before the tolerance was met.
    Budget { error: f64 },
    Integrand(E),
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub epsabs: f64,
    pub epsrel: f64,
    /// Which component of the integrand drives the error control.
    pub control: usize,
    pub max_intervals: usize,
    /// Absolute minimum subinterval width.
    pub min_width: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { epsabs: 1e-12, epsrel: 1e-10, control: 0, max_intervals: 2000, min_width: 0.0 }
    }
}

struct Interval<const M: usize> {
    a: f64,
    b: f64,
    value: [Complex64; M],
    error: f64,
}

impl<const M: usize> PartialEq for Interval<M> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const M: usize> Eq for Interval<M> {}
impl<const M: usize> PartialOrd for Interval<M> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const M: usize> Ord for Interval<M> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod<const M: usize, E, F>(f: &mut F, a: f64, b: f64, control: usize) -> Result<Interval<M>, E>
where
    F: FnMut(f64) -> Result<[Complex64; M], E>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let zero = [Complex64::new(0.0, 0.0); M];
    let mut gk = zero;
    let mut g = zero;
    let fc = f(center)?;
    for m in 0..M {
        gk[m] += fc[m] * WGK[7];
        g[m] += fc[m] * WG[3];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        for m in 0..M {
            let s = f1[m] + f2[m];
            gk[m] += s * WGK[j];
            if j % 2 == 1 {
                g[m] += s * WG[j / 2];
            }
        }
    }
    for m in 0..M {
        gk[m] *= half;
        g[m] *= half;
    }
    let error = (gk[control] - g[control]).norm();
    Ok(Interval { a, b, value: gk, error })
}

/// Integrate `f` over `[a, b]` with globally adaptive bisection.
pub fn integrate<const M: usize, E, F>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<[Complex64; M], QuadError<E>>
where
    F: FnMut(f64) -> Result<[Complex64; M], E>,
{
    integrate_breaks(&mut f, &[a, b], opts)
}

/// Integrate over consecutive intervals `breaks[i]..breaks[i+1]`; the
/// integrand is never sampled across a break.
pub fn integrate_breaks<const M: usize, E, F>(f: &mut F, breaks: &[f64], opts: &QuadOptions) -> Result<[Complex64; M], QuadError<E>>
where
    F: FnMut(f64) -> Result<[Complex64; M], E>,
{
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] != w[0] {
            heap.push(kronrod(f, w[0], w[1], opts.control).map_err(QuadError::Integrand)?);
        }
    }
    loop {
        let mut total = [Complex64::new(0.0, 0.0); M];
        let mut err = 0.0;
        for iv in heap.iter() {
            for m in 0..M {
                total[m] += iv.value[m];
            }
            err += iv.error;
        }
        let target = opts.epsabs.max(opts.epsrel * total[opts.control].norm());
        if err <= target || heap.is_empty() {
            return Ok(total);
        }
        if heap.len() >= opts.max_intervals {
            return Err(QuadError::Budget { error: err });
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a).abs() < opts.min_width || mid == worst.a || mid == worst.b {
            return Err(QuadError::TooNarrow { at: mid });
        }
        heap.push(kronrod(f, worst.a, mid, opts.control).map_err(QuadError::Integrand)?);
        heap.push(kronrod(f, mid, worst.b, opts.control).map_err(QuadError::Integrand)?);
    }
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F>(mut f: F, breaks: &[f64], epsrel: f64) -> Result<f64, QuadError<()>>
where
    F: FnMut(f64) -> f64,
{
    let opts = QuadOptions { epsabs: 1e-300, epsrel, ..Default::default() };
    let mut g = |x: f64| Ok::<_, ()>([Complex64::new(f(x), 0.0)]);
    integrate_breaks(&mut g, breaks, &opts).map(|v| v[0].re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate_real(|x| x.powi(7) - 3.0 * x * x, &[0.0, 2.0], 1e-14).unwrap();
        assert!((v - (32.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn complex_oscillatory_integral() {
        let k = Complex64::new(40.0, -1.0);
        let opts = QuadOptions { epsabs: 1e-13, epsrel: 1e-12, ..Default::default() };
        let v = integrate(|x| Ok::<_, ()>([(k * Complex64::i() * x).exp()]), 0.0, 1.0, &opts).unwrap();
        let exact = ((k * Complex64::i()).exp() - 1.0) / (k * Complex64::i());
        assert!((v[0] - exact).norm() < 1e-11);
    }

    #[test]
    fn kink_handled_by_breaks() {
        let v = integrate_real(|x: f64| (x - 0.3).abs(), &[0.0, 0.3, 1.0], 1e-14).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn too_narrow_is_reported() {
        let opts = QuadOptions { min_width: 1e-3, ..Default::default() };
        let r = integrate(|x: f64| Ok::<_, ()>([Complex64::new(1.0 / (x - 0.5).abs().max(1e-300), 0.0)]), 0.0, 1.0, &opts);
        assert!(matches!(r, Err(QuadError::TooNarrow { .. })));
    }
}
