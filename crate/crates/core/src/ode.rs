//! Explicit Dormand–Prince 8(5,3) integrator for small complex linear systems.
//!
//! The step-size controller follows Hairer's `DOP853`: a fifth-order error
//! estimate blended with a third-order one, safety factor 0.9 and step ratio
//! limits [1/3, 6]. The integrator keeps the last accepted step size so that a
//! sequence of calls over adjacent segments (potential breakpoints, output
//! points) continues smoothly.

use num_complex::Complex64;

const C: [f64; 12] = [
    0.0,
    0.526001519587677318785587544488e-01,
    0.789002279381515978178381316732e-01,
    0.118350341907227396726757197510e+00,
    0.281649658092772603273242802490e+00,
    0.333333333333333333333333333333e+00,
    0.25e+00,
    0.307692307692307692307692307692e+00,
    0.651282051282051282051282051282e+00,
    0.6e+00,
    0.857142857142857142857142857142e+00,
    1.0,
];

const A: [[f64; 11]; 12] = [
    [0.0; 11],
    [5.26001519587677318785587544488e-2, 0., 0., 0., 0., 0., 0., 0., 0., 0., 0.],
    [1.97250569845378994544595329183e-2, 5.91751709536136983633785987549e-2, 0., 0., 0., 0., 0., 0., 0., 0., 0.],
    [2.95875854768068491816892993775e-2, 0., 8.87627564304205475450678981324e-2, 0., 0., 0., 0., 0., 0., 0., 0.],
    [
        2.41365134159266685502369798665e-1,
        0.,
        -8.84549479328286085344864962717e-1,
        9.24834003261792003115737966543e-1,
        0., 0., 0., 0., 0., 0., 0.,
    ],
    [
        3.7037037037037037037037037037e-2,
        0.,
        0.,
        1.70828608729473871279604482173e-1,
        1.25467687566822425016691814123e-1,
        0., 0., 0., 0., 0., 0.,
    ],
    [
        3.7109375e-2,
        0.,
        0.,
        1.70252211019544039314978060272e-1,
        6.02165389804559606850219397283e-2,
        -1.7578125e-2,
        0., 0., 0., 0., 0.,
    ],
    [
        3.70920001185047927108779319836e-2,
        0.,
        0.,
        1.70383925712239993810214054705e-1,
        1.07262030446373284651809199168e-1,
        -1.53194377486244017527936158236e-2,
        8.27378916381402288758473766002e-3,
        0., 0., 0., 0.,
    ],
    [
        6.24110958716075717114429577812e-1,
        0.,
        0.,
        -3.36089262944694129406857109825e0,
        -8.68219346841726006818189891453e-1,
        2.75920996994467083049415600797e1,
        2.01540675504778934086186788979e1,
        -4.34898841810699588477366255144e1,
        0., 0., 0.,
    ],
    [
        4.77662536438264365890433908527e-1,
        0.,
        0.,
        -2.48811461997166764192642586468e0,
        -5.90290826836842996371446475743e-1,
        2.12300514481811942347288949897e1,
        1.52792336328824235832596922938e1,
        -3.32882109689848629194453265587e1,
        -2.03312017085086261358222928593e-2,
        0., 0.,
    ],
    [
        -9.3714243008598732571704021658e-1,
        0.,
        0.,
        5.18637242884406370830023853209e0,
        1.09143734899672957818500254654e0,
        -8.14978701074692612513997267357e0,
        -1.85200656599969598641566180701e1,
        2.27394870993505042818970056734e1,
        2.49360555267965238987089396762e0,
        -3.0467644718982195003823669022e0,
        0.,
    ],
    [
        2.27331014751653820792359768449e0,
        0.,
        0.,
        -1.05344954667372501984066689879e1,
        -2.00087205822486249909675718444e0,
        -1.79589318631187989172765950534e1,
        2.79488845294199600508499808837e1,
        -2.85899827713502369474065508674e0,
        -8.87285693353062954433549289258e0,
        1.23605671757943030647266201528e1,
        6.43392746015763530355970484046e-1,
    ],
];

const B: [f64; 12] = [
    5.42937341165687622380535766363e-2,
    0.,
    0.,
    0.,
    0.,
    4.45031289275240888144113950566e0,
    1.89151789931450038304281599044e0,
    -5.8012039600105847814672114227e0,
    3.1116436695781989440891606237e-1,
    -1.52160949662516078556178806805e-1,
    2.01365400804030348374776537501e-1,
    4.47106157277725905176885569043e-2,
];

const BHH: [f64; 3] = [
    0.244094488188976377952755905512e+00,
    0.733846688281611857341361741547e+00,
    0.220588235294117647058823529412e-01,
];

const ER: [f64; 12] = [
    0.1312004499419488073250102996e-01,
    0.,
    0.,
    0.,
    0.,
    -0.1225156446376204440720569753e+01,
    -0.4957589496572501915214079952e+00,
    0.1664377182454986536961530415e+01,
    -0.3503288487499736816886487290e+00,
    0.3341791187130174790297318841e+00,
    0.8192320648511571246570742613e-01,
    -0.2235530786388629525884427845e-01,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeError {
    StepUnderflow { x: f64 },
    MaxSteps { x: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

pub struct Dop853<const N: usize> {
    tol: Tolerances,
    max_steps: usize,
    h_next: Option<f64>,
    pub steps: usize,
    pub rejected: usize,
}

impl<const N: usize> Dop853<N> {
    pub fn new(tol: Tolerances) -> Self {
        assert!(N <= 32, "state dimension above 32 is not supported");
        Self { tol, max_steps: 200_000, h_next: None, steps: 0, rejected: 0 }
    }

    fn scale(&self, y0: &[Complex64; N], y1: &[Complex64; N], i: usize) -> (f64, f64) {
        // One scale per complex component, so a real or imaginary part passing
        // through zero does not tighten the control.
        let sc = self.tol.atol + self.tol.rtol * y0[i].norm().max(y1[i].norm());
        (sc, sc)
    }

    fn initial_step<F>(&self, f: &mut F, x: f64, y: &[Complex64; N], f0: &[Complex64; N], span: f64) -> f64
    where
        F: FnMut(f64, &[Complex64; N]) -> [Complex64; N],
    {
        let dir = span.signum();
        let mut dnf = 0.0;
        let mut dny = 0.0;
        for i in 0..N {
            let (sr, si) = self.scale(y, y, i);
            dnf += (f0[i].re / sr).powi(2) + (f0[i].im / si).powi(2);
            dny += (y[i].re / sr).powi(2) + (y[i].im / si).powi(2);
        }
        let n = (2 * N) as f64;
        let (dnf, dny) = ((dnf / n).sqrt(), (dny / n).sqrt());
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { 0.01 * dny / dnf };
        h = h.min(span.abs());
        let mut y1 = *y;
        for i in 0..N {
            y1[i] += f0[i] * (dir * h);
        }
        let f1 = f(x + dir * h, &y1);
        let mut der2 = 0.0;
        for i in 0..N {
            let (sr, si) = self.scale(y, y, i);
            let d = f1[i] - f0[i];
            der2 += (d.re / sr).powi(2) + (d.im / si).powi(2);
        }
        let der2 = (der2 / n).sqrt() / h;
        let der12 = der2.abs().max(dnf);
        let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / der12).powf(1.0 / 8.0) };
        // A component starting at zero with a large derivative can drive the
        // estimate toward underflow; the controller recovers from a step
        // that is too long, so keep a floor.
        (100.0 * h).min(h1).min(span.abs()).max(1e-6 * span.abs())
    }

    /// Integrate `y' = f(x, y)` from `x0` to `x1` (either direction).
    ///
    /// The right-hand side is only sampled on the closed interval between
    /// the two endpoints.
    pub fn integrate<F>(&mut self, mut f: F, x0: f64, y0: [Complex64; N], x1: f64) -> Result<[Complex64; N], OdeError>
    where
        F: FnMut(f64, &[Complex64; N]) -> [Complex64; N],
    {
        let span = x1 - x0;
        if span == 0.0 {
            return Ok(y0);
        }
        let dir = span.signum();
        let mut x = x0;
        let mut y = y0;
        let mut k1 = f(x, &y);
        let mut h = match self.h_next {
            Some(h) => h,
            None => self.initial_step(&mut f, x, &y, &k1, span),
        };
        let uround = 2.3e-16;
        let mut last_rejected = false;
        let mut k = [[Complex64::new(0.0, 0.0); N]; 12];
        loop {
            if self.steps >= self.max_steps {
                return Err(OdeError::MaxSteps { x });
            }
            let remaining = (x1 - x).abs();
            let mut last = false;
            if h >= remaining * 0.999_999 {
                h = remaining;
                last = true;
            }
            if h <= 10.0 * uround * x.abs().max(1.0) {
                return Err(OdeError::StepUnderflow { x });
            }
            let hs = dir * h;
            k[0] = k1;
            for s in 1..12 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        for i in 0..N {
                            ys[i] += kj[i] * (a * hs);
                        }
                    }
                }
                let xs = if s == 11 { x + hs } else { x + C[s] * hs };
                k[s] = f(xs, &ys);
            }
            let mut incr = [Complex64::new(0.0, 0.0); N];
            for (s, ks) in k.iter().enumerate() {
                if B[s] != 0.0 {
                    for i in 0..N {
                        incr[i] += ks[i] * B[s];
                    }
                }
            }
            let mut y_new = y;
            for i in 0..N {
                y_new[i] += incr[i] * hs;
            }
            // Scaled error ratios; normalized by their maximum before squaring
            // so very large solutions cannot overflow the norm.
            let mut r5 = [0.0f64; 64];
            let mut r3 = [0.0f64; 64];
            for i in 0..N {
                let (sr, si) = self.scale(&y, &y_new, i);
                let e3 = incr[i] - k[0][i] * BHH[0] - k[8][i] * BHH[1] - k[11][i] * BHH[2];
                let mut e5 = Complex64::new(0.0, 0.0);
                for (s, ks) in k.iter().enumerate() {
                    if ER[s] != 0.0 {
                        e5 += ks[i] * ER[s];
                    }
                }
                r5[2 * i] = e5.re / sr;
                r5[2 * i + 1] = e5.im / si;
                r3[2 * i] = e3.re / sr;
                r3[2 * i + 1] = e3.im / si;
            }
            let big = r5[..2 * N].iter().chain(&r3[..2 * N]).fold(0.0f64, |m, r| m.max(r.abs()));
            let norm = if big > 0.0 { big } else { 1.0 };
            let err: f64 = r5[..2 * N].iter().map(|r| (r / norm).powi(2)).sum();
            let err2: f64 = r3[..2 * N].iter().map(|r| (r / norm).powi(2)).sum();
            let mut deno = err + 0.01 * err2;
            if deno <= 0.0 {
                deno = 1.0;
            }
            let err = norm * h * err * (1.0 / ((2 * N) as f64 * deno)).sqrt();
            if !err.is_finite() {
                // Overflow in a trial stage; shrink hard and retry.
                self.rejected += 1;
                h *= 0.1;
                last_rejected = true;
                continue;
            }
            let fac11 = err.powf(0.125);
            let fac = (fac11 / 0.9).clamp(1.0 / 6.0, 3.0);
            let h_new = h / fac;
            self.steps += 1;
            if err <= 1.0 {
                y = y_new;
                x = if last { x1 } else { x + hs };
                k1 = f(x, &y);
                let h_acc = if last_rejected { h_new.min(h) } else { h_new };
                last_rejected = false;
                if last {
                    // Keep the unconstrained proposal for the next segment.
                    self.h_next = Some(h_acc.max(h));
                    return Ok(y);
                }
                h = h_acc;
            } else {
                self.rejected += 1;
                last_rejected = true;
                h /= (fac11 / 0.9).min(3.0);
            }
        }
    }
}
