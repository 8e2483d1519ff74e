//! Dormand–Prince 5(4) integrator over flat `f64` state slices.
//!
//! Complex systems are packed as interleaved (re, im) pairs by the caller.
//! Integration runs forward or backward depending on the sign of `x1 - x0`.

use crate::error::EpError;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

// fifth-order weights (also row 7 of the tableau)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// difference between fifth- and fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step magnitude; `None` picks one from the interval length.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h_init: None, h_max: f64::INFINITY, max_steps: 200_000 }
    }
}

/// Stage workspace reused between steps.
struct Stages {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
}

impl Stages {
    fn new(dim: usize) -> Self {
        Self { k: std::array::from_fn(|_| vec![0.0; dim]), tmp: vec![0.0; dim] }
    }
}

/// One Dormand–Prince step of size `h` from `(x, y)`.
///
/// Writes the fifth-order solution into `y_new` and returns the weighted
/// error norm (values `<= 1` are acceptable). `k[0]` must already hold `f(x, y)`.
fn dp_step<F>(f: &mut F, x: f64, y: &[f64], h: f64, st: &mut Stages, y_new: &mut [f64], opts: &OdeOptions) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    let Stages { k, tmp } = st;
    let [k1, k2, k3, k4, k5, k6, k7] = k;

    for i in 0..n {
        tmp[i] = y[i] + h * A21 * k1[i];
    }
    f(x + C2 * h, tmp, k2);
    for i in 0..n {
        tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    }
    f(x + C3 * h, tmp, k3);
    for i in 0..n {
        tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    }
    f(x + C4 * h, tmp, k4);
    for i in 0..n {
        tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    }
    f(x + C5 * h, tmp, k5);
    for i in 0..n {
        tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
    }
    f(x + h, tmp, k6);
    for i in 0..n {
        y_new[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
    }
    f(x + h, y_new, k7);

    let mut acc = 0.0;
    for i in 0..n {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
        acc += (e / sc) * (e / sc);
    }
    (acc / n as f64).sqrt()
}

/// Take a single fifth-order step of size `h` without error control.
///
/// Used to evaluate a stored trajectory between accepted nodes.
pub fn single_step<F>(mut f: F, x: f64, y: &[f64], h: f64) -> Vec<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    let mut st = Stages::new(n);
    let mut out = vec![0.0; n];
    if h == 0.0 {
        out.copy_from_slice(y);
        return out;
    }
    f(x, y, &mut st.k[0]);
    let opts = OdeOptions::default();
    dp_step(&mut f, x, y, h, &mut st, &mut out, &opts);
    out
}

/// Summary of an integration run.
#[derive(Debug, Clone)]
pub struct OdeRun {
    pub x: f64,
    pub y: Vec<f64>,
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrate `y' = f(x, y)` from `x0` to `x1`.
///
/// `on_step(x, y)` is called after every accepted step (and once at `x0`);
/// returning `false` stops the run early at that point.
pub fn integrate<F, S>(mut f: F, x0: f64, x1: f64, y0: &[f64], opts: &OdeOptions, mut on_step: S) -> Result<OdeRun, EpError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    S: FnMut(f64, &[f64]) -> bool,
{
    let n = y0.len();
    let span = x1 - x0;
    let dir = if span >= 0.0 { 1.0 } else { -1.0 };
    let mut x = x0;
    let mut y = y0.to_vec();
    let mut y_new = vec![0.0; n];
    let mut st = Stages::new(n);
    let mut run = OdeRun { x, y: y.clone(), accepted: 0, rejected: 0 };

    if !on_step(x, &y) || span == 0.0 {
        return Ok(run);
    }

    let h_max = opts.h_max.min(span.abs());
    let mut h = opts.h_init.unwrap_or(1e-3 * span.abs()).min(h_max);
    f(x, &y, &mut st.k[0]);
    let mut last_reject = false;

    loop {
        if run.accepted + run.rejected >= opts.max_steps {
            return Err(EpError::Integration(format!("step budget {} exhausted at x = {x}", opts.max_steps)));
        }
        let remaining = (x1 - x).abs();
        let mut finish = false;
        if h >= remaining {
            h = remaining;
            finish = true;
        }
        if h <= 1e-14 * x.abs().max(1.0) && !finish {
            return Err(EpError::Integration(format!("step size underflow at x = {x}")));
        }
        let err = dp_step(&mut f, x, &y, dir * h, &mut st, &mut y_new, opts);
        if !err.is_finite() {
            if h < 1e-12 {
                return Err(EpError::Integration(format!("non-finite state at x = {x}")));
            }
            h *= 0.25;
            run.rejected += 1;
            last_reject = true;
            continue;
        }
        if err <= 1.0 {
            x = if finish { x1 } else { x + dir * h };
            std::mem::swap(&mut y, &mut y_new);
            // FSAL: the last stage is f at the new point
            st.k.swap(0, 6);
            run.accepted += 1;
            if !on_step(x, &y) || finish {
                run.x = x;
                run.y = y;
                return Ok(run);
            }
            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 5.0);
            if last_reject {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(h_max);
            last_reject = false;
        } else {
            let fac = (0.9 * err.powf(-0.2)).max(0.2);
            h *= fac;
            run.rejected += 1;
            last_reject = true;
        }
    }
}
