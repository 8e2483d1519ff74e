//! Stability integrals `Q(eps)` and `Q_0(eps)`, their speed derivatives,
//! peak tables and the cold-ion gradient threshold.
//!
//! `Q = ∫ n_c u_c dx` is rewritten as an integral over the density,
//! `Q = ∫_0^{n*} sqrt(2) c n^2 H'(n) / ((1+n) sqrt(g(n))) dn`, whose upper
//! endpoint carries an inverse square-root singularity. For `K = 0` the
//! analogous integral over the potential is `Q_0`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::contour::cauchy_second_derivative;
use crate::error::{EpError, Result};
use crate::evans::{evans, EvansOptions};
use crate::numerics::{golden_min, quad};
use crate::params::{default_eps_grid, PlasmaParams};
use crate::profile::{enthalpy_dn, peak_state, sagdeev_g, sagdeev_u, PeakState, ProfileOptions, WaveProfile};

/// How the endpoint singularity is handled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicyKind {
    /// Integrate over `[lower_cut, top - upper_gap]` only.
    Truncated { lower_cut: f64, upper_gap: f64 },
    /// Full interval after substituting `top - t^2`.
    Regularized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePolicy {
    pub kind: PolicyKind,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl QuadraturePolicy {
    pub fn regularized() -> Self {
        Self { kind: PolicyKind::Regularized, rel_tol: 1e-9, max_intervals: 4000 }
    }

    /// Interval `[1e-4, top - 1e-4]`.
    pub fn interval_a() -> Self {
        Self { kind: PolicyKind::Truncated { lower_cut: 1e-4, upper_gap: 1e-4 }, ..Self::regularized() }
    }

    /// Interval `[1e-4, top - 1e-10]`.
    pub fn interval_b() -> Self {
        Self { kind: PolicyKind::Truncated { lower_cut: 1e-4, upper_gap: 1e-10 }, ..Self::regularized() }
    }

    pub fn name(&self) -> String {
        match self.kind {
            PolicyKind::Regularized => "regularized".into(),
            PolicyKind::Truncated { lower_cut, upper_gap } => format!("truncated[{lower_cut:e},-{upper_gap:e}]"),
        }
    }

    /// Parse `regularized`, `ia`, `ib` or `truncated:<lower>:<gap>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "regularized" => Ok(Self::regularized()),
            "ia" | "I_a" => Ok(Self::interval_a()),
            "ib" | "I_b" => Ok(Self::interval_b()),
            _ => {
                let parts: Vec<&str> = s.split(':').collect();
                if parts.len() == 3 && parts[0] == "truncated" {
                    let lo: f64 = parts[1].parse().map_err(|_| EpError::InvalidParameter(format!("bad policy {s}")))?;
                    let gap: f64 = parts[2].parse().map_err(|_| EpError::InvalidParameter(format!("bad policy {s}")))?;
                    if lo >= 0.0 && gap > 0.0 {
                        return Ok(Self { kind: PolicyKind::Truncated { lower_cut: lo, upper_gap: gap }, ..Self::regularized() });
                    }
                }
                Err(EpError::InvalidParameter(format!("unknown quadrature policy {s}")))
            }
        }
    }
}

/// Value of a `Q` integral with its quadrature diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct QValue {
    pub value: f64,
    pub abs_err: f64,
    pub intervals: usize,
}

/// `∫ f` over `[0, top]` (or its truncation), `f` singular like `(top - x)^{-1/2}`.
///
/// Truncated intervals still use the substitution, which leaves the
/// integral unchanged but removes the steep endpoint behaviour.
fn endpoint_integral<F: Fn(f64) -> f64>(f: F, top: f64, slope_at_top: f64, policy: &QuadraturePolicy) -> Result<QValue> {
    let cubic = slope_at_top.abs() < 1e-10;
    let (lo_t, hi_t) = match policy.kind {
        PolicyKind::Regularized => (0.0, top),
        PolicyKind::Truncated { lower_cut, upper_gap } => {
            if lower_cut + upper_gap >= top {
                return Err(EpError::Quadrature(format!("truncation [{lower_cut}, {top} - {upper_gap}] is empty")));
            }
            (upper_gap, top - lower_cut)
        }
    };
    // x = top - t^m with m = 2, or m = 3 at a degenerate turning point
    let m: i32 = if cubic { 3 } else { 2 };
    let root = |x: f64| x.powf(1.0 / m as f64);
    let r = quad::integrate(
        |t| m as f64 * t.powi(m - 1) * f(top - t.powi(m)),
        root(lo_t),
        root(hi_t),
        policy.rel_tol,
        0.0,
        policy.max_intervals,
    )?;
    Ok(QValue { value: r.value, abs_err: r.abs_err, intervals: r.intervals })
}

/// `Q(eps)` for `K > 0`, or `Q_0` when `K = 0`.
pub fn q_integral(p: &PlasmaParams, policy: &QuadraturePolicy) -> Result<QValue> {
    if p.k() == 0.0 {
        return q0_integral(p.c(), policy);
    }
    let (c, k) = (p.c(), p.k());
    let pk = peak_state(p)?;
    let f = |n: f64| {
        let g = sagdeev_g(n, c, k).max(0.0);
        std::f64::consts::SQRT_2 * c * n * n * enthalpy_dn(n, c, k) / ((1.0 + n) * g.sqrt())
    };
    let n = pk.n_star;
    let slope = enthalpy_dn(n, c, k) * (crate::profile::enthalpy(n, c, k).exp() - 1.0 - n);
    endpoint_integral(f, n, slope, policy)
}

/// Cold-ion integral `Q_0 = ∫_0^{phi*} sqrt(2)(c - sqrt(c^2 - 2 phi))^2 / (sqrt(c^2 - 2 phi) sqrt(U)) dphi`.
pub fn q0_integral(c: f64, policy: &QuadraturePolicy) -> Result<QValue> {
    let p = PlasmaParams::new(0.0, c - 1.0)?;
    let pk = peak_state(&p)?;
    let f = |phi: f64| {
        let s = (c * c - 2.0 * phi).max(0.0).sqrt();
        let du = 2.0 * phi / (c + s);
        std::f64::consts::SQRT_2 * du * du / (s * sagdeev_u(phi, c).max(0.0).sqrt())
    };
    let phi = pk.phi_star;
    let s = (c * c - 2.0 * phi).sqrt();
    endpoint_integral(f, phi, phi.exp() - c / s, policy)
}

/// `Q` by composite Simpson over the profile, plus the exponential tail beyond `X`.
pub fn q_direct(profile: &WaveProfile, intervals: usize) -> f64 {
    let m = (intervals.max(2) + 1) / 2 * 2;
    let x_max = profile.x_max();
    let h = x_max / m as f64;
    let f = |x: f64| {
        let s = profile.sample(x);
        s.n * s.u
    };
    let mut sum = f(0.0) + f(x_max);
    for i in 1..m {
        sum += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let half = sum * h / 3.0;
    let tail = f(x_max) / (2.0 * profile.decay_rate());
    2.0 * (half + tail)
}

/// Central-difference speed derivative with a half-step check.
#[derive(Debug, Clone, Copy)]
pub struct Derivative {
    pub value: f64,
    /// Richardson combination of the two step sizes.
    pub richardson: f64,
    /// Relative difference between the two step sizes.
    pub rel_diff: f64,
}

/// `dQ/dc` at `(K, eps)` with step `h = h_rel * eps`.
pub fn dq_dc(k: f64, eps: f64, policy: &QuadraturePolicy, h_rel: f64) -> Result<Derivative> {
    let h = h_rel * eps;
    if !(h > 0.0 && h < eps) {
        return Err(EpError::InvalidParameter(format!("derivative step {h} invalid for eps = {eps}")));
    }
    let q = |e: f64| -> Result<f64> { Ok(q_integral(&PlasmaParams::new(k, e)?, policy)?.value) };
    let central = |h: f64| -> Result<f64> { Ok((q(eps + h)? - q(eps - h)?) / (2.0 * h)) };
    let d1 = central(h)?;
    let d2 = central(0.5 * h)?;
    let rel_diff = (d1 - d2).abs() / d2.abs().max(1e-300);
    if rel_diff > 1e-3 {
        return Err(EpError::Derivative(format!(
            "dQ/dc at K = {k}, eps = {eps}: step h gives {d1}, h/2 gives {d2}"
        )));
    }
    Ok(Derivative { value: d2, richardson: (4.0 * d2 - d1) / 3.0, rel_diff })
}

/// One row of a `Q` sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub eps: f64,
    pub c: f64,
    pub q: f64,
    pub dq_dc: f64,
    pub policy: String,
}

/// `Q` and `dQ/dc` over an amplitude grid (default: 60 log-spaced points up to `0.99 eps_K`).
pub fn q_sweep(k: f64, grid: Option<&[f64]>, policy: &QuadraturePolicy) -> Result<Vec<SweepRow>> {
    let eps: Vec<f64> = match grid {
        Some(g) => g.to_vec(),
        None => default_eps_grid(k, 60)?,
    };
    eps.par_iter()
        .map(|&e| {
            let p = PlasmaParams::new(k, e)?;
            Ok(SweepRow {
                eps: e,
                c: p.c(),
                q: q_integral(&p, policy)?.value,
                dq_dc: dq_dc(k, e, policy, 1e-4)?.value,
                policy: policy.name(),
            })
        })
        .collect()
}

/// Peak states for a list of amplitudes; failures are kept per row.
pub fn peaks_table(k: f64, eps: &[f64]) -> Vec<(f64, Result<PeakState>)> {
    eps.iter().map(|&e| (e, PlasmaParams::new(k, e).and_then(|p| peak_state(&p)))).collect()
}

/// Location and value of `min_x u_x / sqrt(1 + n)` for the cold-ion wave.
#[derive(Debug, Clone, Copy)]
pub struct GradientThreshold {
    pub value: f64,
    pub x: f64,
}

/// Steepest normalised velocity gradient of the `K = 0` wave.
pub fn gradient_threshold(eps: f64) -> Result<GradientThreshold> {
    let p = PlasmaParams::new(0.0, eps)?;
    let w = WaveProfile::compute(&p, &ProfileOptions::default())?;
    let ratio = |x: f64| {
        let s = w.sample(x);
        s.du_dx / (1.0 + s.n).sqrt()
    };
    let nodes: Vec<f64> = w.samples().iter().map(|s| s.x).filter(|&x| x >= 0.0).collect();
    let (i, _) = nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| (i, ratio(x)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| EpError::Integration("empty profile".into()))?;
    let a = nodes[i.saturating_sub(1)];
    let b = nodes[(i + 1).min(nodes.len() - 1)];
    let (x, value) = golden_min(ratio, a, b, 1e-12 * (1.0 + b.abs()));
    Ok(GradientThreshold { value, x })
}

/// `D''(0)` of the Evans function from two Cauchy sums.
#[derive(Debug, Clone, Copy)]
pub struct OriginCurvature {
    pub value: f64,
    pub coarse: Complex64,
    pub fine: Complex64,
    pub radius: f64,
}

/// `D''(0)` on the circle `|lambda| = 0.3 eps^{3/2}` with 64 and 128 nodes.
///
/// The two sums must agree to `1e-4` relative; the imaginary part must vanish.
pub fn d2_lambda_at_origin(profile: &WaveProfile, opts: &EvansOptions) -> Result<OriginCurvature> {
    let radius = 0.3 * profile.params().eps().powf(1.5);
    let f = |z: Complex64| Ok(evans(z, profile, opts)?.value);
    let coarse = cauchy_second_derivative(f, radius, 64, true)?;
    let fine = cauchy_second_derivative(f, radius, 128, true)?;
    if (coarse - fine).norm() > 1e-4 * fine.norm() {
        return Err(EpError::Derivative(format!("Cauchy sums disagree: N = 64 gives {coarse}, N = 128 gives {fine}")));
    }
    if fine.im.abs() > 1e-6 * fine.norm() {
        return Err(EpError::Derivative(format!("D''(0) = {fine} is not real")));
    }
    Ok(OriginCurvature { value: fine.re, coarse, fine, radius })
}
