//! Solitary-wave profiles.
//!
//! For `K > 0` the wave is parameterised by the density perturbation `n`,
//! with `phi = H(n)` and `u = c n / (1 + n)`. For `K = 0` the potential `phi`
//! is the primary variable. The profile is integrated from the peak at
//! `x = 0` towards `+X` and mirrored.
//!
//! Close to the peak the planar system `(q, E)` is integrated. Once the wave
//! has dropped to half its peak value the first integral `E^2 / 2 = G(q)`
//! reduces the flow to a scalar equation for `ln q`. This avoids the
//! exponential error growth of the planar flow near the saddle at the origin.

use crate::error::{EpError, Result};
use crate::numerics::ode::{self, OdeOptions};
use crate::numerics::{bisect_descending, expm1_minus_x, x_minus_log1p};
use crate::params::{critical_amplitude, PlasmaParams};

/// `H(n, c) = c^2/2 (1 - (1+n)^-2) - K ln(1+n)`.
pub fn enthalpy(n: f64, c: f64, k: f64) -> f64 {
    0.5 * c * c * n * (2.0 + n) / ((1.0 + n) * (1.0 + n)) - k * n.ln_1p()
}

/// `dH/dn = (c^2 / (1+n)^2 - K) / (1 + n)`.
pub fn enthalpy_dn(n: f64, c: f64, k: f64) -> f64 {
    (c * c / ((1.0 + n) * (1.0 + n)) - k) / (1.0 + n)
}

/// Density at which `dH/dn` vanishes, `c / sqrt(K) - 1`; `None` for `K = 0`.
pub fn sonic_density(c: f64, k: f64) -> Option<f64> {
    (k > 0.0).then(|| c / k.sqrt() - 1.0)
}

/// Potential `g(n) = c^2/(1+n) + K(1+n) + e^H - c^2 - K - 1`, with `E^2/2 = g`.
///
/// Evaluated in a rearranged form that keeps relative accuracy as `n -> 0`.
pub fn sagdeev_g(n: f64, c: f64, k: f64) -> f64 {
    let h = enthalpy(n, c, k);
    -0.5 * c * c * n * n / ((1.0 + n) * (1.0 + n)) + k * x_minus_log1p(n) + expm1_minus_x(h)
}

/// Cold-ion potential `U(phi) = e^phi + c sqrt(c^2 - 2 phi) - 1 - c^2`.
pub fn sagdeev_u(phi: f64, c: f64) -> f64 {
    let s = (1.0 - 2.0 * phi / (c * c)).max(0.0).sqrt();
    expm1_minus_x(phi) - 2.0 * phi * phi / (c * c * (1.0 + s) * (1.0 + s))
}

/// Peak values of the wave at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakState {
    pub n_star: f64,
    pub u_star: f64,
    pub phi_star: f64,
    /// Sonic density `n_s`, only defined for `K > 0`.
    pub n_sonic: Option<f64>,
}

/// Locate the turning point of the Sagdeev potential.
pub fn peak_state(p: &PlasmaParams) -> Result<PeakState> {
    let (c, k) = (p.c(), p.k());
    if k == 0.0 {
        let top = 0.5 * c * c;
        if sagdeev_u(top, c) >= 0.0 {
            return Err(EpError::BeyondExistence { eps: p.eps(), eps_k: critical_amplitude(0.0)?.eps });
        }
        // U > 0 on (0, phi*) analytically; the lower end is not evaluated
        let phi = bisect_descending(|x| sagdeev_u(x, c), 0.0, top);
        let s = (c * c - 2.0 * phi).sqrt();
        return Ok(PeakState { n_star: c / s - 1.0, u_star: c - s, phi_star: phi, n_sonic: None });
    }
    let ns = c / k.sqrt() - 1.0;
    if sagdeev_g(ns, c, k) >= 0.0 {
        return Err(EpError::BeyondExistence { eps: p.eps(), eps_k: critical_amplitude(k)?.eps });
    }
    let n = bisect_descending(|x| sagdeev_g(x, c, k), 0.0, ns);
    Ok(PeakState { n_star: n, u_star: c * n / (1.0 + n), phi_star: enthalpy(n, c, k), n_sonic: Some(ns) })
}

/// Exponential decay rate `sqrt((c^2 - 1 - K) / (c^2 - K))` of the tails.
pub fn far_field_decay_rate(p: &PlasmaParams) -> f64 {
    let c2 = p.c() * p.c();
    ((c2 - 1.0 - p.k()) / (c2 - p.k())).sqrt()
}

/// Half-width giving a relative tail of `1e-12`.
pub fn default_half_width(p: &PlasmaParams) -> f64 {
    (-(1e-12f64).ln() / far_field_decay_rate(p)).ceil()
}

/// Profile fields at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSample {
    pub x: f64,
    pub n: f64,
    pub u: f64,
    pub phi: f64,
    /// Electric field `E = -phi_x`.
    pub e_field: f64,
    pub dn_dx: f64,
    pub du_dx: f64,
    pub d2phi_dx2: f64,
}

impl WaveSample {
    pub fn dphi_dx(&self) -> f64 {
        -self.e_field
    }

    fn mirrored(&self) -> Self {
        Self { x: -self.x, e_field: -self.e_field, dn_dx: -self.dn_dx, du_dx: -self.du_dx, ..*self }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProfileOptions {
    pub tol: f64,
    /// Half-width `X`; defaults to [`default_half_width`].
    pub x_max: Option<f64>,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self { tol: 1e-12, x_max: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Stage {
    /// State `(q, E)`.
    Planar,
    /// State `(ln q, unused)`.
    Reduced,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    x: f64,
    y: [f64; 2],
    stage: Stage,
}

/// Even solitary wave on `[-X, X]`.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    params: PlasmaParams,
    peak: PeakState,
    lambda_c: f64,
    x_max: f64,
    nodes: Vec<Node>,
}

/// Right-hand sides shared by integration and sampling.
#[derive(Debug, Clone, Copy)]
struct Flow {
    c: f64,
    k: f64,
}

impl Flow {
    fn cold(&self) -> bool {
        self.k == 0.0
    }

    /// First integral `G(q)` with `E^2 / 2 = G`.
    fn potential(&self, q: f64) -> f64 {
        if self.cold() {
            sagdeev_u(q, self.c)
        } else {
            sagdeev_g(q, self.c, self.k)
        }
    }

    fn planar(&self, y: &[f64], d: &mut [f64]) {
        let (q, e) = (y[0], y[1]);
        if self.cold() {
            let s = (self.c * self.c - 2.0 * q).max(0.0).sqrt();
            d[0] = -e;
            d[1] = self.c / s - q.exp();
        } else {
            d[0] = -e / enthalpy_dn(q, self.c, self.k);
            d[1] = 1.0 + q - enthalpy(q, self.c, self.k).exp();
        }
    }

    fn reduced(&self, y: &[f64], d: &mut [f64]) {
        let q = y[0].exp();
        let slope = (2.0 * self.potential(q).max(0.0)).sqrt() / q;
        d[0] = if self.cold() { -slope } else { -slope / enthalpy_dn(q, self.c, self.k) };
        d[1] = 0.0;
    }

    fn rhs(&self, stage: Stage, y: &[f64], d: &mut [f64]) {
        match stage {
            Stage::Planar => self.planar(y, d),
            Stage::Reduced => self.reduced(y, d),
        }
    }

    /// Fields from `(q, E)` at `x >= 0`.
    fn fields(&self, x: f64, q: f64, e: f64) -> WaveSample {
        let c = self.c;
        if self.cold() {
            let s = (c * c - 2.0 * q).max(0.0).sqrt();
            let n = c / s - 1.0;
            WaveSample {
                x,
                n,
                u: 2.0 * q / (c + s),
                phi: q,
                e_field: e,
                dn_dx: -c * e / (s * s * s),
                du_dx: -e / s,
                d2phi_dx2: q.exp() - c / s,
            }
        } else {
            let h = enthalpy(q, c, self.k);
            let dn = -e / enthalpy_dn(q, c, self.k);
            WaveSample {
                x,
                n: q,
                u: c * q / (1.0 + q),
                phi: h,
                e_field: e,
                dn_dx: dn,
                du_dx: c * dn / ((1.0 + q) * (1.0 + q)),
                d2phi_dx2: h.exp() - (1.0 + q),
            }
        }
    }

    fn node_fields(&self, x: f64, stage: Stage, y: &[f64]) -> WaveSample {
        match stage {
            Stage::Planar => self.fields(x, y[0], y[1]),
            Stage::Reduced => {
                let q = y[0].exp();
                self.fields(x, q, (2.0 * self.potential(q).max(0.0)).sqrt())
            }
        }
    }
}

impl WaveProfile {
    /// Integrate the wave for `p`.
    pub fn compute(p: &PlasmaParams, opts: &ProfileOptions) -> Result<Self> {
        if !(opts.tol > 0.0 && opts.tol < 1e-3) {
            return Err(EpError::InvalidParameter(format!("profile tolerance {} outside (0, 1e-3)", opts.tol)));
        }
        let peak = peak_state(p)?;
        let lambda_c = far_field_decay_rate(p);
        let x_max = opts.x_max.unwrap_or_else(|| default_half_width(p));
        if !(x_max > 0.0 && x_max.is_finite()) {
            return Err(EpError::InvalidParameter(format!("half-width must be positive, got {x_max}")));
        }
        let flow = Flow { c: p.c(), k: p.k() };
        let q0 = if flow.cold() { peak.phi_star } else { peak.n_star };

        let mut nodes = Vec::new();
        let planar_opts = OdeOptions { rtol: opts.tol, atol: opts.tol * q0, h_init: Some(1e-4 / (1.0 + q0)), ..Default::default() };
        let near = ode::integrate(
            |_, y, d| flow.planar(y, d),
            0.0,
            x_max,
            &[q0, 0.0],
            &planar_opts,
            |x, y| {
                nodes.push(Node { x, y: [y[0], y[1]], stage: Stage::Planar });
                y[0] > 0.5 * q0
            },
        )?;
        if near.x < x_max {
            let reduced_opts = OdeOptions { rtol: opts.tol, atol: opts.tol, h_max: 0.5 / lambda_c, ..Default::default() };
            let start = [near.y[0].ln(), 0.0];
            nodes.push(Node { x: near.x, y: start, stage: Stage::Reduced });
            ode::integrate(
                |_, y, d| flow.reduced(y, d),
                near.x,
                x_max,
                &start,
                &reduced_opts,
                |x, y| {
                    if x > near.x {
                        nodes.push(Node { x, y: [y[0], 0.0], stage: Stage::Reduced });
                    }
                    true
                },
            )?;
        }
        Ok(Self { params: *p, peak, lambda_c, x_max, nodes })
    }

    pub fn params(&self) -> &PlasmaParams {
        &self.params
    }

    pub fn peak(&self) -> &PeakState {
        &self.peak
    }

    /// Tail decay rate `lambda_c`.
    pub fn decay_rate(&self) -> f64 {
        self.lambda_c
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    fn flow(&self) -> Flow {
        Flow { c: self.params.c(), k: self.params.k() }
    }

    /// Fields at any `x`, from the nearest stored node by one integration step.
    pub fn sample(&self, x: f64) -> WaveSample {
        let ax = x.abs();
        let i = match self.nodes.binary_search_by(|nd| nd.x.total_cmp(&ax)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let node = self.nodes[i];
        let flow = self.flow();
        let y = if ax == node.x {
            node.y.to_vec()
        } else {
            ode::single_step(|_, y, d| flow.rhs(node.stage, y, d), node.x, &node.y, ax - node.x)
        };
        let s = flow.node_fields(ax, node.stage, &y);
        if x < 0.0 {
            s.mirrored()
        } else {
            s
        }
    }

    /// Fields at the accepted integration nodes, mirrored onto `[-X, X]`.
    pub fn samples(&self) -> Vec<WaveSample> {
        let flow = self.flow();
        let right: Vec<WaveSample> = self.nodes.iter().map(|nd| flow.node_fields(nd.x, nd.stage, &nd.y)).collect();
        let mut out: Vec<WaveSample> = right.iter().rev().filter(|s| s.x > 0.0).map(|s| s.mirrored()).collect();
        out.extend(right.iter().copied().filter(|s| s.x >= 0.0));
        out.dedup_by(|a, b| a.x == b.x);
        out
    }

    /// `points` equally spaced samples on `[-X, X]`.
    pub fn uniform(&self, points: usize) -> Vec<WaveSample> {
        let m = points.max(2) - 1;
        (0..=m).map(|i| self.sample(-self.x_max + 2.0 * self.x_max * i as f64 / m as f64)).collect()
    }
}
