//! Small numerical building blocks shared by the physics modules.

pub mod ode;
pub mod poly;
pub mod quad;

/// `exp(x) - 1 - x` without cancellation for small `x`.
pub fn expm1_minus_x(x: f64) -> f64 {
    if x.abs() < 0.05 {
        // Taylor series from x^2/2; 14 terms reach full precision for |x| < 0.05
        let mut term = 0.5 * x * x;
        let mut sum = term;
        for k in 3..18 {
            term *= x / k as f64;
            sum += term;
        }
        sum
    } else {
        x.exp_m1() - x
    }
}

/// `x - ln(1 + x)` without cancellation for small `x`.
pub fn x_minus_log1p(x: f64) -> f64 {
    if x.abs() < 0.05 {
        let mut pow = x * x;
        let mut sum = 0.0;
        let mut sign = 1.0;
        for k in 2..26 {
            sum += sign * pow / k as f64;
            pow *= x;
            sign = -sign;
        }
        sum
    } else {
        x - x.ln_1p()
    }
}

/// Bisection on `[lo, hi]` where `f(lo) > 0 >= f(hi)` is assumed, not checked.
///
/// Runs until the bracket stops shrinking in floating point.
pub fn bisect_descending<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimisation of a unimodal `f` on `[a, b]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
