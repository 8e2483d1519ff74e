//! Far-field linear algebra: the characteristic quartic, its root labels,
//! eigenvectors, dispersion curves and the coefficient matrices of the
//! linearised system.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{EpError, Result};
use crate::numerics::poly;
use crate::params::PlasmaParams;
use crate::profile::WaveSample;

type C = Complex64;

fn re(x: f64) -> C {
    C::new(x, 0.0)
}

/// Sign selecting `d_+` or `d_-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

fn on_cut(mu: C) -> bool {
    mu.im == 0.0 && mu.re.abs() >= 1.0
}

/// `sqrt(1/(1 - mu^2) + K)` on the principal sheet with cuts on `|Re mu| >= 1`.
fn dispersion_root(mu: C, k: f64) -> C {
    let one = re(1.0);
    let base = (one + mu).sqrt() * (one - mu).sqrt();
    if k == 0.0 {
        return one / base;
    }
    let a = re((1.0 + 1.0 / k).sqrt());
    k.sqrt() * (a + mu).sqrt() * (a - mu).sqrt() / base
}

/// `d_±(mu) = mu (c ± sqrt(1/(1 - mu^2) + K))`.
pub fn branch_d(branch: Branch, mu: C, p: &PlasmaParams) -> Result<C> {
    if on_cut(mu) {
        return Err(EpError::OnBranchCut(format!("mu = {mu}")));
    }
    Ok(mu * (p.c() + branch.sign() * dispersion_root(mu, p.k())))
}

/// `d/dmu d_±(mu)`.
pub fn branch_d_prime(branch: Branch, mu: C, p: &PlasmaParams) -> Result<C> {
    if on_cut(mu) {
        return Err(EpError::OnBranchCut(format!("mu = {mu}")));
    }
    let w = re(1.0) - mu * mu;
    let num = re(1.0) + p.k() * w * w;
    Ok(p.c() + branch.sign() * num / (w * w * dispersion_root(mu, p.k())))
}

/// Coefficients (ascending) of `(c^2 - K) d(mu) = (mu^2 - 1)[(lambda - c mu)^2 - K mu^2] + mu^2`.
pub fn quartic_coefficients(lambda: C, p: &PlasmaParams) -> [C; 5] {
    let (c, k) = (p.c(), p.k());
    let j = c * c - k;
    [-lambda * lambda, 2.0 * c * lambda, lambda * lambda - j + 1.0, -2.0 * c * lambda, re(j)]
}

/// Labelled roots of the characteristic quartic.
#[derive(Debug, Clone, Copy)]
pub struct SpectralRoots {
    /// `mu_1` (unique left root), `mu_2` (`d_+`), `mu_3`, `mu_4` (`d_-`).
    pub mu: [C; 4],
    /// Branch each root satisfies; `None` when it sits on a cut.
    pub branch: [Option<Branch>; 4],
    /// `min_{j>1} Re mu_j - Re mu_1`.
    pub gap: f64,
}

/// Solve the quartic and label its roots for the weight `beta`.
///
/// `mu_1` must be the only root with `Re mu + beta < 0`; otherwise the
/// splitting condition fails.
pub fn char_roots(lambda: C, p: &PlasmaParams, beta: f64) -> Result<SpectralRoots> {
    if !lambda.is_finite() || !beta.is_finite() {
        return Err(EpError::InvalidParameter(format!("lambda = {lambda}, beta = {beta}")));
    }
    let coeffs = quartic_coefficients(lambda, p);
    let mut mu = poly::roots(&coeffs)?;
    mu.sort_by(|a, b| a.re.total_cmp(&b.re));
    let left = mu.iter().filter(|m| m.re + beta < -1e-12).count();
    if left != 1 {
        return Err(EpError::Splitting(format!(
            "{left} roots with Re mu < -beta at lambda = {lambda}, beta = {beta}: {mu:?}"
        )));
    }
    let mu1 = mu[0];
    let rest = [mu[1], mu[2], mu[3]];
    let tag = |m: C| -> Option<Branch> {
        let rp = branch_d(Branch::Plus, m, p).ok()?;
        let rm = branch_d(Branch::Minus, m, p).ok()?;
        Some(if (rp - lambda).norm() < (rm - lambda).norm() { Branch::Plus } else { Branch::Minus })
    };
    let plus_residual = |m: C| branch_d(Branch::Plus, m, p).map(|d| (d - lambda).norm()).unwrap_or(f64::INFINITY);
    let i2 = (0..3).min_by(|&a, &b| plus_residual(rest[a]).total_cmp(&plus_residual(rest[b]))).unwrap_or(0);
    let others: Vec<C> = (0..3).filter(|&i| i != i2).map(|i| rest[i]).collect();
    let (mu3, mu4) = if others[0].re <= others[1].re { (others[0], others[1]) } else { (others[1], others[0]) };
    let labelled = [mu1, rest[i2], mu3, mu4];
    let gap = rest.iter().map(|m| m.re).fold(f64::INFINITY, f64::min) - mu1.re;
    Ok(SpectralRoots { mu: labelled, branch: labelled.map(tag), gap })
}

/// Like [`char_roots`] but with `beta` chosen in the middle of the gap.
///
/// Fails when the leftmost root is not strictly separated from the others.
pub fn separated_roots(lambda: C, p: &PlasmaParams) -> Result<SpectralRoots> {
    let coeffs = quartic_coefficients(lambda, p);
    let mut mu = poly::roots(&coeffs)?;
    mu.sort_by(|a, b| a.re.total_cmp(&b.re));
    if mu[1].re - mu[0].re < 1e-9 {
        return Err(EpError::Splitting(format!("leftmost roots coalesce at lambda = {lambda}: {mu:?}")));
    }
    char_roots(lambda, p, -0.5 * (mu[0].re + mu[1].re))
}

/// Right eigenvector, scaled left eigenvector and their pairing for one root.
#[derive(Debug, Clone, Copy)]
pub struct ModePair {
    pub v: Vector4<C>,
    /// `pi / (pi . v)`, so that `w . v = 1`.
    pub w: Vector4<C>,
    pub pi_dot_v: C,
}

/// Eigenvectors of the far-field matrix for root `mu`.
pub fn mode_vectors(mu: C, lambda: C, p: &PlasmaParams) -> Result<ModePair> {
    let (c, k) = (p.c(), p.k());
    let s = re(1.0) - mu * mu;
    if mu.norm() < 1e-300 || s.norm() < 1e-300 {
        return Err(EpError::Degenerate(format!("mu = {mu}")));
    }
    let v = Vector4::new(re(1.0), (c * mu - lambda) / mu, re(1.0) / s, mu / s);
    let pi = Vector4::new((c * lambda / mu - (c * c - k)) * s, -lambda * s / mu, re(1.0), mu);
    let pv = pi.transpose() * v;
    let pv = pv[(0, 0)];
    if pv.norm() < 1e-12 {
        return Err(EpError::Degenerate(format!("pi . v = {pv} at mu = {mu}")));
    }
    Ok(ModePair { v, w: pi / pv, pi_dot_v: pv })
}

/// Closed form of `pi . v`.
pub fn pairing_closed_form(mu: C, lambda: C, p: &PlasmaParams) -> C {
    let s = re(1.0) - mu * mu;
    let j = p.c() * p.c() - p.k();
    lambda * lambda * s / (mu * mu) - j * s + (re(1.0) + mu * mu) / s
}

/// `omega_±(k) = -k (c ± sqrt(1/(1+k^2) + K))`.
pub fn dispersion(branch: Branch, k: f64, p: &PlasmaParams) -> f64 {
    -k * (p.c() + branch.sign() * (1.0 / (1.0 + k * k) + p.k()).sqrt())
}

/// Group velocity `d omega_± / dk`.
pub fn dispersion_dk(branch: Branch, k: f64, p: &PlasmaParams) -> f64 {
    let a = 1.0 + k * k;
    let num = 1.0 + p.k() * a * a;
    -(p.c() + branch.sign() * num / (a * a * (1.0 / a + p.k()).sqrt()))
}

/// Essential-spectrum curves `d_±(ik - beta)` on a wavenumber grid.
#[derive(Debug, Clone)]
pub struct EssentialCurve {
    pub k: Vec<f64>,
    pub plus: Vec<C>,
    pub minus: Vec<C>,
    /// Largest real part over both curves.
    pub sup_re: f64,
}

pub fn essential_spectrum_curve(beta: f64, k_grid: &[f64], p: &PlasmaParams) -> Result<EssentialCurve> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(EpError::InvalidParameter(format!("beta must lie in (0, 1), got {beta}")));
    }
    let mut plus = Vec::with_capacity(k_grid.len());
    let mut minus = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        let mu = C::new(-beta, k);
        plus.push(branch_d(Branch::Plus, mu, p)?);
        minus.push(branch_d(Branch::Minus, mu, p)?);
    }
    let sup_re = plus.iter().chain(minus.iter()).map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(EssentialCurve { k: k_grid.to_vec(), plus, minus, sup_re })
}

/// Default weight constant `c_0 = sqrt(2V) / 2`.
pub fn default_c0(p: &PlasmaParams) -> f64 {
    0.5 * (2.0 * p.v()).sqrt()
}

/// Weight `beta = c_0 sqrt(eps)`.
pub fn weight_beta(c0: f64, p: &PlasmaParams) -> f64 {
    c0 * p.eps().sqrt()
}

/// `eta = (c_0 / 2)(1 - c_0^2 / (2V))`; the weighted region is `Re lambda >= -eps^{3/2} eta`.
pub fn weight_eta(c0: f64, p: &PlasmaParams) -> f64 {
    0.5 * c0 * (1.0 - c0 * c0 / (2.0 * p.v()))
}

/// Asymptotic regime for [`asymptotic_roots`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Small,
    Large,
}

/// Leading-order root approximations.
///
/// Small `lambda`: three cube roots of `-2 V lambda` on `d_-` and
/// `lambda / (c + V)` on `d_+`. Large `lambda`: `-1`, the two roots
/// `(c lambda ∓ sqrt(K lambda^2 - c^2 + K)) / (c^2 - K)` and `+1`.
pub fn asymptotic_roots(lambda: C, regime: Regime, p: &PlasmaParams) -> [C; 4] {
    let (c, k, v) = (p.c(), p.k(), p.v());
    match regime {
        Regime::Small => {
            let base = (-2.0 * v * lambda).powf(1.0 / 3.0);
            let rot = C::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
            [base * rot, base * rot * rot, base, lambda / (c + v)]
        }
        Regime::Large => {
            let j = c * c - k;
            let r = (k * lambda * lambda - j).sqrt();
            [re(-1.0), (c * lambda - r) / j, (c * lambda + r) / j, re(1.0)]
        }
    }
}

/// `-L^{-1}` of the transport block at a profile point, i.e. the `lambda` coefficient.
pub fn a2_block(s: &WaveSample, p: &PlasmaParams) -> Matrix2<f64> {
    let (c, k) = (p.c(), p.k());
    let w = c - s.u;
    let j = w * w - k;
    Matrix2::new(w, 1.0 + s.n, k / (1.0 + s.n), w) / j
}

/// Far-field limit of [`a2_block`].
pub fn a2_block_infinity(p: &PlasmaParams) -> Matrix2<f64> {
    let (c, k) = (p.c(), p.k());
    Matrix2::new(c, 1.0, k, c) / (c * c - k)
}

/// Constant-coefficient matrix `A_inf(lambda)`.
pub fn far_field_matrix(lambda: C, p: &PlasmaParams) -> Matrix4<C> {
    let (c, k) = (p.c(), p.k());
    let j = c * c - k;
    let z = re(0.0);
    Matrix4::new(
        c * lambda / j, lambda / j, z, re(1.0 / j),
        k * lambda / j, c * lambda / j, z, re(c / j),
        z, z, z, re(1.0),
        re(-1.0), z, re(1.0), z,
    )
}

/// Entries `(R11, R12, R21)` of `A_2(x) - A_2(inf)`; `R22 = R11`.
pub fn s1_entries(s: &WaveSample, p: &PlasmaParams) -> (f64, f64, f64) {
    let r = a2_block(s, p) - a2_block_infinity(p);
    (r[(0, 0)], r[(0, 1)], r[(1, 0)])
}

/// Symmetrised `S_1` matrix used in the energy estimate.
pub fn s1_matrix(s: &WaveSample, p: &PlasmaParams) -> Matrix4<f64> {
    let k = p.k();
    let sk = k.sqrt();
    let (r11, r12, r21) = s1_entries(s, p);
    let b = k * r12 + r21;
    let d = k * r12 - r21;
    let a = 2.0 * sk * r11;
    Matrix4::new(
        0.0, 0.0, 0.0, 0.0,
        0.0, a - b, d, 0.0,
        0.0, d, a + b, 0.0,
        0.0, 0.0, 0.0, 0.0,
    )
}

/// Smallest eigenvalue of [`s1_matrix`] in closed form.
pub fn s1_min_eigenvalue(s: &WaveSample, p: &PlasmaParams) -> f64 {
    let k = p.k();
    let (r11, r12, r21) = s1_entries(s, p);
    let nonzero = 2.0 * k.sqrt() * r11 - (2.0 * k * k * r12 * r12 + 2.0 * r21 * r21).sqrt();
    nonzero.min(0.0)
}
