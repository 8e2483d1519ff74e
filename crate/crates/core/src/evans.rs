//! Evans function of the linearised Euler–Poisson system about a solitary wave.
//!
//! The eigenvalue problem is written as `Y' = A(x, lambda) Y` with
//! `A = A_1(x) + lambda A_2(x)`. The decaying solution at `+inf` is followed
//! backwards in the frame `theta = e^{-mu_1 x} Y`, where it is dominant, and
//! projected on the left eigenvector `w_1` at `-X`.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{EpError, Result};
use crate::numerics::ode::{self, OdeOptions};
use crate::params::PlasmaParams;
use crate::profile::{WaveProfile, WaveSample};
use crate::spectral::{mode_vectors, separated_roots};

type C = Complex64;

/// `A_1(x)`, the `lambda`-independent part of the coefficient matrix.
pub fn a1_matrix(s: &WaveSample, p: &PlasmaParams) -> Matrix4<f64> {
    let (c, k) = (p.c(), p.k());
    let (n, u, nx, ux) = (s.n, s.u, s.dn_dx, s.du_dx);
    let w = c - u;
    let j = w * w - k;
    let m = 1.0 + n;
    Matrix4::new(
        w * ux / j - k * nx / (j * m), w * nx / j + m * ux / j, 0.0, m / j,
        k * ux / (j * m) - k * w * nx / (j * m * m), k * nx / (j * m) + w * ux / j, 0.0, w / j,
        0.0, 0.0, 0.0, 1.0,
        -1.0, 0.0, s.phi.exp(), 0.0,
    )
}

/// `A_2(x)`, the coefficient of `lambda`.
pub fn a2_matrix(s: &WaveSample, p: &PlasmaParams) -> Matrix4<f64> {
    let b = crate::spectral::a2_block(s, p);
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&b);
    m
}

/// `A(x, lambda) = A_1(x) + lambda A_2(x)`.
pub fn assemble_a(lambda: C, s: &WaveSample, p: &PlasmaParams) -> Matrix4<C> {
    let a1 = a1_matrix(s, p).map(|v| C::new(v, 0.0));
    let a2 = a2_matrix(s, p).map(|v| C::new(v, 0.0));
    a1 + a2 * lambda
}

/// Anything that can supply profile fields on `[-X, X]`.
pub trait ProfileSource: Sync {
    fn params(&self) -> &PlasmaParams;
    fn x_max(&self) -> f64;
    fn sample(&self, x: f64) -> WaveSample;
}

impl ProfileSource for WaveProfile {
    fn params(&self) -> &PlasmaParams {
        WaveProfile::params(self)
    }

    fn x_max(&self) -> f64 {
        WaveProfile::x_max(self)
    }

    fn sample(&self, x: f64) -> WaveSample {
        WaveProfile::sample(self, x)
    }
}

/// Constant state `n = u = phi = 0`: the zero-amplitude limit of the wave.
#[derive(Debug, Clone, Copy)]
pub struct FlatState {
    pub params: PlasmaParams,
    pub x_max: f64,
}

impl ProfileSource for FlatState {
    fn params(&self) -> &PlasmaParams {
        &self.params
    }

    fn x_max(&self) -> f64 {
        self.x_max
    }

    fn sample(&self, x: f64) -> WaveSample {
        WaveSample { x, n: 0.0, u: 0.0, phi: 0.0, e_field: 0.0, dn_dx: 0.0, du_dx: 0.0, d2phi_dx2: 0.0 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EvansOptions {
    /// Integration half-width; defaults to the profile half-width.
    pub x_max: Option<f64>,
    pub ode_tol: f64,
    /// Also integrate the adjoint forward from `-X`, pair the two at `x = 0`
    /// and require agreement with the single sweep.
    pub meet_at_zero: bool,
}

impl Default for EvansOptions {
    fn default() -> Self {
        Self { x_max: None, ode_tol: 1e-10, meet_at_zero: false }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EvansValue {
    pub value: C,
    pub mu1: C,
    pub x_max: f64,
    pub steps: usize,
}

fn pack(v: &Vector4<C>) -> [f64; 8] {
    let mut out = [0.0; 8];
    for i in 0..4 {
        out[2 * i] = v[i].re;
        out[2 * i + 1] = v[i].im;
    }
    out
}

fn unpack(y: &[f64]) -> Vector4<C> {
    Vector4::new(C::new(y[0], y[1]), C::new(y[2], y[3]), C::new(y[4], y[5]), C::new(y[6], y[7]))
}

fn write(v: &Vector4<C>, d: &mut [f64]) {
    for i in 0..4 {
        d[2 * i] = v[i].re;
        d[2 * i + 1] = v[i].im;
    }
}

/// Far-field data shared by the sweeps.
struct Shooting<'a, S: ProfileSource> {
    lambda: C,
    profile: &'a S,
    mu1: C,
    v1: Vector4<C>,
    w1: Vector4<C>,
    x_max: f64,
    ode: OdeOptions,
}

impl<'a, S: ProfileSource> Shooting<'a, S> {
    fn new(lambda: C, profile: &'a S, opts: &EvansOptions) -> Result<Self> {
        if !(opts.ode_tol > 1e-14 && opts.ode_tol < 1e-6) {
            return Err(EpError::InvalidParameter(format!("ode tolerance {} outside (1e-14, 1e-6)", opts.ode_tol)));
        }
        let x_max = opts.x_max.unwrap_or_else(|| profile.x_max());
        if !(x_max > 0.0 && x_max <= profile.x_max()) {
            return Err(EpError::InvalidParameter(format!("half-width {x_max} must lie in (0, {}]", profile.x_max())));
        }
        let p = *profile.params();
        let roots = separated_roots(lambda, &p)?;
        let mu1 = roots.mu[0];
        let mode = mode_vectors(mu1, lambda, &p)?;
        let ode = OdeOptions { rtol: opts.ode_tol, atol: opts.ode_tol, max_steps: 2_000_000, ..Default::default() };
        Ok(Self { lambda, profile, mu1, v1: mode.v, w1: mode.w, x_max, ode })
    }

    fn shifted(&self, x: f64) -> Matrix4<C> {
        assemble_a(self.lambda, &self.profile.sample(x), self.profile.params()) - Matrix4::identity() * self.mu1
    }

    /// `theta = e^{-mu_1 x} y^+` carried from `+X` down to `x_stop`.
    fn right(&self, x_stop: f64) -> Result<(Vector4<C>, usize)> {
        let rhs = |x: f64, y: &[f64], d: &mut [f64]| write(&(self.shifted(x) * unpack(y)), d);
        let r = ode::integrate(rhs, self.x_max, x_stop, &pack(&self.v1), &self.ode, |_, _| true)
            .map_err(|e| EpError::Integration(format!("right sweep at lambda = {}: {e}", self.lambda)))?;
        Ok((unpack(&r.y), r.accepted))
    }

    /// `zeta = e^{mu_1 x} z^-` carried from `-X` up to `x_stop`.
    fn left(&self, x_stop: f64) -> Result<(Vector4<C>, usize)> {
        let rhs = |x: f64, y: &[f64], d: &mut [f64]| {
            let z = unpack(y).transpose() * self.shifted(x);
            write(&(-z.transpose()), d);
        };
        let r = ode::integrate(rhs, -self.x_max, x_stop, &pack(&self.w1), &self.ode, |_, _| true)
            .map_err(|e| EpError::Integration(format!("left sweep at lambda = {}: {e}", self.lambda)))?;
        Ok((unpack(&r.y), r.accepted))
    }
}

/// Evaluate `D(lambda)` for the wave `profile`.
pub fn evans<S: ProfileSource>(lambda: C, profile: &S, opts: &EvansOptions) -> Result<EvansValue> {
    let sh = Shooting::new(lambda, profile, opts)?;
    let (theta, mut steps) = sh.right(-sh.x_max)?;
    let value = sh.w1.dot(&theta);
    if !value.is_finite() {
        return Err(EpError::Integration(format!("non-finite Evans value at lambda = {lambda}")));
    }
    if opts.meet_at_zero {
        let (th0, s1) = sh.right(0.0)?;
        let (ze0, s2) = sh.left(0.0)?;
        let paired = ze0.dot(&th0);
        steps += s1 + s2;
        let scale = value.norm().max(paired.norm()).max(1e-300);
        if (paired - value).norm() > 1e-6 * scale.max(1e-3) {
            return Err(EpError::Integration(format!(
                "single sweep {value} and paired sweeps {paired} disagree at lambda = {lambda}"
            )));
        }
    }
    Ok(EvansValue { value, mu1: sh.mu1, x_max: sh.x_max, steps })
}

/// `z(x_meet) . y(x_meet)`, which equals `D(lambda)` for every meeting point.
pub fn paired_product<S: ProfileSource>(lambda: C, profile: &S, x_meet: f64, opts: &EvansOptions) -> Result<C> {
    let sh = Shooting::new(lambda, profile, opts)?;
    let (theta, _) = sh.right(x_meet)?;
    let (zeta, _) = sh.left(x_meet)?;
    Ok(zeta.dot(&theta))
}

/// `theta(x_stop) = e^{-mu_1 x_stop} y^+(x_stop)`, the decaying solution in the shifted frame.
pub fn decaying_solution<S: ProfileSource>(lambda: C, profile: &S, x_stop: f64, opts: &EvansOptions) -> Result<Vector4<C>> {
    let sh = Shooting::new(lambda, profile, opts)?;
    Ok(sh.right(x_stop)?.0)
}

/// Evans values at many points, in input order.
pub fn evans_many<S: ProfileSource>(lambdas: &[C], profile: &S, opts: &EvansOptions) -> Vec<Result<EvansValue>> {
    lambdas.par_iter().map(|&l| evans(l, profile, opts)).collect()
}
