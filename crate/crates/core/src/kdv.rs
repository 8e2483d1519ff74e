//! Evans function of the KdV soliton, the small-amplitude limit of the
//! scaled Euler–Poisson Evans function.
//!
//! The eigenvalue problem
//! `Lambda p - p' + V (Psi p)' + p''' / (2V) = 0` with
//! `Psi = (3/V) sech^2(sqrt(V/2) xi)` has the closed-form Evans function
//! `((kappa_1 + sqrt(2V)) / (kappa_1 - sqrt(2V)))^2`, where `kappa_1` is the
//! root of `kappa^3 - 2V kappa + 2V Lambda = 0` with least real part.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{EpError, Result};
use crate::evans::{evans, EvansOptions};
use crate::numerics::ode::{self, OdeOptions};
use crate::numerics::poly;
use crate::params::PlasmaParams;
use crate::profile::WaveProfile;
use crate::spectral::{default_c0, weight_eta};

type C = Complex64;

/// Roots of `kappa^3 - 2V kappa + 2V Lambda`, sorted by real part.
pub fn kdv_roots(lambda: C, v: f64) -> Result<[C; 3]> {
    let coeffs = [2.0 * v * lambda, C::new(-2.0 * v, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)];
    let mut r = poly::roots(&coeffs)?;
    r.sort_by(|a, b| a.re.total_cmp(&b.re));
    Ok([r[0], r[1], r[2]])
}

/// Endpoint of the excluded ray `(-inf, -2 sqrt(2V) / (3 sqrt 3)]`.
pub fn kdv_branch_point(v: f64) -> f64 {
    -2.0 * (2.0 * v).sqrt() / (3.0 * 3f64.sqrt())
}

fn leading_root(lambda: C, v: f64) -> Result<C> {
    if lambda.im == 0.0 && lambda.re <= kdv_branch_point(v) {
        return Err(EpError::Splitting(format!("Lambda = {lambda} lies on the excluded ray")));
    }
    let r = kdv_roots(lambda, v)?;
    if r[1].re - r[0].re < 1e-12 {
        return Err(EpError::Splitting(format!("kappa roots coalesce at Lambda = {lambda}")));
    }
    Ok(r[0])
}

/// Closed-form KdV Evans function.
pub fn evans_kdv_closed(lambda: C, v: f64) -> Result<C> {
    let k1 = leading_root(lambda, v)?;
    let s = (2.0 * v).sqrt();
    let q = (k1 + s) / (k1 - s);
    Ok(q * q)
}

/// Options for the ODE evaluation of the KdV Evans function.
#[derive(Debug, Clone, Copy)]
pub struct KdvOdeOptions {
    pub ode_tol: f64,
    /// Half-width in `xi`; defaults to a tail of `1e-14` in `Psi`.
    pub xi_max: Option<f64>,
}

impl Default for KdvOdeOptions {
    fn default() -> Self {
        Self { ode_tol: 1e-11, xi_max: None }
    }
}

/// KdV Evans function by shooting, independent of the closed form.
pub fn evans_kdv_ode(lambda: C, v: f64, opts: &KdvOdeOptions) -> Result<C> {
    let k1 = leading_root(lambda, v)?;
    let rate = (v / 2.0).sqrt();
    let xi_max = opts.xi_max.unwrap_or(-(1e-14f64).ln() / (2.0 * rate));
    let two_v = 2.0 * v;
    let lam = lambda;
    let rhs = |xi: f64, y: &[f64], d: &mut [f64]| {
        let t = (rate * xi).tanh();
        let sech2 = 1.0 - t * t;
        let psi = 3.0 / v * sech2;
        let dpsi = -2.0 * rate * t * psi;
        let p = C::new(y[0], y[1]);
        let p1 = C::new(y[2], y[3]);
        let p2 = C::new(y[4], y[5]);
        // frame e^{-kappa_1 xi} removes the asymptotic growth of the tracked mode
        let p3 = two_v * (-lam * p + p1 - v * (dpsi * p + psi * p1));
        let dd = [p1 - k1 * p, p2 - k1 * p1, p3 - k1 * p2];
        for i in 0..3 {
            d[2 * i] = dd[i].re;
            d[2 * i + 1] = dd[i].im;
        }
    };
    let y0 = [1.0, 0.0, k1.re, k1.im, (k1 * k1).re, (k1 * k1).im];
    let o = OdeOptions { rtol: opts.ode_tol, atol: opts.ode_tol, max_steps: 2_000_000, ..Default::default() };
    let run = ode::integrate(rhs, xi_max, -xi_max, &y0, &o, |_, _| true)?;
    let th = Vector3::new(C::new(run.y[0], run.y[1]), C::new(run.y[2], run.y[3]), C::new(run.y[4], run.y[5]));
    let w = Vector3::new(k1 * k1 - two_v, k1, C::new(1.0, 0.0));
    let norm = 3.0 * k1 * k1 - two_v;
    Ok(w.dot(&th) / norm)
}

/// Far-field companion matrix of the KdV system.
pub fn kdv_far_field(lambda: C, v: f64) -> Matrix3<C> {
    let z = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    Matrix3::new(z, one, z, z, z, one, -2.0 * v * lambda, C::new(2.0 * v, 0.0), z)
}

/// Scaled Evans function `D*(Lambda, eps) = D(eps^{3/2} Lambda, eps)`.
///
/// At `eps = 0` this is the KdV Evans function with the same `V`.
pub fn evans_scaled(lambda: C, eps: f64, k: f64, profile: Option<&WaveProfile>, opts: &EvansOptions) -> Result<C> {
    if eps == 0.0 {
        return evans_kdv_closed(lambda, (1.0 + k).sqrt());
    }
    let scaled = lambda * eps.powf(1.5);
    match profile {
        Some(w) => {
            let p = w.params();
            if p.k() != k || p.eps() != eps {
                return Err(EpError::InvalidParameter("profile does not match (K, eps)".into()));
            }
            Ok(evans(scaled, w, opts)?.value)
        }
        None => {
            let p = PlasmaParams::new(k, eps)?;
            let w = WaveProfile::compute(&p, &Default::default())?;
            Ok(evans(scaled, &w, opts)?.value)
        }
    }
}

/// Midpoints of `points` equal angular cells on the arc `|Lambda| = 5`, `Re Lambda >= -eta`.
pub fn convergence_arc(p: &PlasmaParams, points: usize) -> Vec<C> {
    let eta = weight_eta(default_c0(p), p);
    let th = (-eta / 5.0).acos();
    (0..points).map(|i| C::from_polar(5.0, -th + (i as f64 + 0.5) * 2.0 * th / points as f64)).collect()
}

/// `sup |D*(Lambda, eps) - D_KdV(Lambda)|` over [`convergence_arc`].
pub fn kdv_deviation(k: f64, eps: f64, points: usize, opts: &EvansOptions) -> Result<f64> {
    let p = PlasmaParams::new(k, eps)?;
    let w = WaveProfile::compute(&p, &Default::default())?;
    let mut sup = 0.0f64;
    for l in convergence_arc(&p, points) {
        sup = sup.max((evans_scaled(l, eps, k, Some(&w), opts)? - evans_kdv_closed(l, p.v())?).norm());
    }
    Ok(sup)
}
