//! One function per subcommand.

use clap::{Args, ValueEnum};
use ep_stability::contour::{count_zeros, Contour, ZeroCount};
use ep_stability::criteria::{dq_dc, gradient_threshold, peaks_table, q_integral, QuadraturePolicy, SweepRow};
use ep_stability::evans::{evans as evans_value, EvansOptions};
use ep_stability::export::{evans_table, profile_table, spectrum_table, sweep_table, Cell, Table};
use ep_stability::kdv::{evans_kdv_closed, evans_kdv_ode, evans_scaled, kdv_deviation, KdvOdeOptions};
use ep_stability::params::{critical_amplitude, default_eps_grid};
use ep_stability::profile::{ProfileOptions, WaveProfile};
use ep_stability::spectral::{default_c0, essential_spectrum_curve, weight_beta};
use ep_stability::{EpError, PlasmaParams};
use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde_json::json;

use crate::{Common, Failure, Output, Report};

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn meta(command: &str, fields: &[(&str, String)]) -> String {
    let mut s = format!("evans-ep {VERSION} command={command}");
    for (k, v) in fields {
        s.push_str(&format!(" {k}={v}"));
    }
    s
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn usage(m: impl Into<String>) -> Failure {
    Failure::Usage(m.into())
}

fn table(t: Table, diagnostics: Vec<String>) -> Report {
    Report { output: Output::Table(t), diagnostics }
}

fn parse_f64(s: &str, what: &str) -> Result<f64, Failure> {
    s.trim().parse().map_err(|_| usage(format!("bad number '{s}' in {what}")))
}

/// `a,b` as `a + b i`.
fn parse_complex(s: &str) -> Result<C, Failure> {
    let (a, b) = s.split_once(',').ok_or_else(|| usage(format!("expected re,im in '{s}'")))?;
    Ok(C::new(parse_f64(a, s)?, parse_f64(b, s)?))
}

/// `lo:hi:n` as `n` equally spaced values.
fn parse_range(s: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("expected lo:hi:n in '{s}'")));
    }
    let (lo, hi) = (parse_f64(parts[0], s)?, parse_f64(parts[1], s)?);
    let n: usize = parts[2].trim().parse().map_err(|_| usage(format!("bad count in '{s}'")))?;
    if n == 0 {
        return Err(usage(format!("empty range '{s}'")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

/// Points from `--grid re_lo:re_hi:n,im_lo:im_hi:m` and repeated `--lambda re,im`.
fn lambda_points(grid: &Option<String>, lambda: &[String]) -> Result<Vec<C>, Failure> {
    let mut pts = Vec::new();
    if let Some(g) = grid {
        let (r, i) = g.split_once(',').ok_or_else(|| usage(format!("expected RE_RANGE,IM_RANGE in '{g}'")))?;
        let (re, im) = (parse_range(r)?, parse_range(i)?);
        for y in &im {
            for x in &re {
                pts.push(C::new(*x, *y));
            }
        }
    }
    for l in lambda {
        pts.push(parse_complex(l)?);
    }
    if pts.is_empty() {
        return Err(usage("no evaluation points: give --grid or --lambda"));
    }
    Ok(pts)
}

fn params(k: f64, eps: f64) -> Result<PlasmaParams, Failure> {
    Ok(PlasmaParams::new(k, eps)?)
}

fn nonempty(v: &[f64], what: &str) -> Result<(), Failure> {
    if v.is_empty() {
        return Err(usage(format!("{what} must not be empty")));
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct WaveArgs {
    #[arg(long = "K")]
    pub k: f64,
    #[arg(long)]
    pub eps: f64,
    /// Uniform samples on [-X, X]; the integration nodes are used when absent.
    #[arg(long)]
    pub points: Option<usize>,
    /// Integrator tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

pub fn wave(a: &WaveArgs) -> Result<Report, Failure> {
    if !(a.tol > 1e-15 && a.tol < 1e-4) {
        return Err(usage(format!("--tol {} outside (1e-15, 1e-4)", a.tol)));
    }
    let p = params(a.k, a.eps)?;
    let w = WaveProfile::compute(&p, &ProfileOptions { tol: a.tol, x_max: a.x_max })?;
    let samples = match a.points {
        Some(0) | Some(1) => return Err(usage("--points must be at least 2")),
        Some(n) => w.uniform(n),
        None => w.samples(),
    };
    let m = meta("wave", &[("K", a.k.to_string()), ("eps", a.eps.to_string()), ("tol", a.tol.to_string()), ("X", w.x_max().to_string())]);
    Ok(table(profile_table(&m, &samples), Vec::new()))
}

#[derive(Args, Debug)]
pub struct PeaksArgs {
    #[arg(long = "K")]
    pub k: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    #[command(flatten)]
    pub common: Common,
}

pub fn peaks(a: &PeaksArgs) -> Result<Report, Failure> {
    nonempty(&a.eps, "--eps")?;
    critical_amplitude(a.k)?;
    let mut t = Table::new(&meta("peaks", &[("K", a.k.to_string()), ("eps", list(&a.eps))]), &["eps", "n_s", "n_star", "u_star", "phi_star"]);
    let mut diag = Vec::new();
    for (eps, r) in peaks_table(a.k, &a.eps) {
        match r {
            Ok(pk) => t.push([eps, pk.n_sonic.unwrap_or(f64::NAN), pk.n_star, pk.u_star, pk.phi_star].map(Cell::Num)),
            Err(e) if e.is_usage() => return Err(e.into()),
            Err(e) => diag.push(format!("eps = {eps}: {e}")),
        }
    }
    Ok(table(t, diag))
}

#[derive(Args, Debug)]
pub struct EvansArgs {
    #[arg(long = "K")]
    pub k: f64,
    /// Amplitude; 0 selects the constant state, where D = 1.
    #[arg(long)]
    pub eps: f64,
    /// `re_lo:re_hi:n,im_lo:im_hi:m`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Single point `re,im`; may be repeated.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Vec<String>,
    /// Interpret points as Lambda = lambda / eps^{3/2} and return D*.
    #[arg(long)]
    pub scaled: bool,
    #[arg(long, default_value_t = 1e-10)]
    pub ode_tol: f64,
    #[arg(long)]
    pub x_max: Option<f64>,
    /// Cross-check the single sweep against paired sweeps meeting at x = 0.
    #[arg(long)]
    pub meet_at_zero: bool,
    #[command(flatten)]
    pub common: Common,
}

pub fn evans_cmd_options(ode_tol: f64, x_max: Option<f64>, meet_at_zero: bool) -> Result<EvansOptions, Failure> {
    if !(ode_tol > 1e-14 && ode_tol < 1e-6) {
        return Err(usage(format!("--ode-tol {ode_tol} outside (1e-14, 1e-6)")));
    }
    Ok(EvansOptions { x_max, ode_tol, meet_at_zero })
}

fn collect_rows(pts: &[C], f: impl Fn(C) -> ep_stability::Result<C> + Sync) -> Result<(Vec<(C, C)>, Vec<String>), Failure> {
    let vals: Vec<ep_stability::Result<C>> = pts.par_iter().map(|&l| f(l)).collect();
    let mut rows = Vec::new();
    let mut diag = Vec::new();
    for (l, v) in pts.iter().zip(vals) {
        match v {
            Ok(d) => rows.push((*l, d)),
            Err(e) if e.is_usage() => return Err(e.into()),
            Err(e) => diag.push(format!("lambda = {l}: {e}")),
        }
    }
    Ok((rows, diag))
}

pub fn evans(a: &EvansArgs) -> Result<Report, Failure> {
    let opts = evans_cmd_options(a.ode_tol, a.x_max, a.meet_at_zero)?;
    let pts = lambda_points(&a.grid, &a.lambda)?;
    if !(a.k >= 0.0 && a.k.is_finite()) || !(a.eps >= 0.0 && a.eps.is_finite()) {
        return Err(usage("K and eps must be finite and non-negative"));
    }
    let m = meta(
        "evans",
        &[("K", a.k.to_string()), ("eps", a.eps.to_string()), ("scaled", a.scaled.to_string()), ("ode_tol", a.ode_tol.to_string())],
    );
    let (rows, diag) = if a.scaled {
        let w = if a.eps > 0.0 { Some(WaveProfile::compute(&params(a.k, a.eps)?, &ProfileOptions::default())?) } else { None };
        collect_rows(&pts, |l| evans_scaled(l, a.eps, a.k, w.as_ref(), &opts))?
    } else if a.eps == 0.0 {
        // the linearisation about the constant state has D = 1 identically
        (pts.iter().map(|&l| (l, C::new(1.0, 0.0))).collect(), Vec::new())
    } else {
        let w = WaveProfile::compute(&params(a.k, a.eps)?, &ProfileOptions::default())?;
        collect_rows(&pts, |l| Ok(evans_value(l, &w, &opts)?.value))?
    };
    Ok(table(evans_table(&m, &rows), diag))
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum KdvMethod {
    Closed,
    Ode,
}

#[derive(Args, Debug)]
pub struct EvansKdvArgs {
    /// Speed V; defaults to sqrt(1 + K).
    #[arg(long = "V")]
    pub v: Option<f64>,
    #[arg(long = "K", default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Vec<String>,
    #[arg(long, value_enum, default_value_t = KdvMethod::Closed)]
    pub method: KdvMethod,
    #[arg(long, default_value_t = 1e-11)]
    pub ode_tol: f64,
    #[command(flatten)]
    pub common: Common,
}

pub fn evans_kdv(a: &EvansKdvArgs) -> Result<Report, Failure> {
    let v = a.v.unwrap_or_else(|| (1.0 + a.k).sqrt());
    if !(v > 0.0 && v.is_finite()) {
        return Err(usage(format!("V must be positive, got {v}")));
    }
    if !(a.ode_tol > 1e-14 && a.ode_tol < 1e-6) {
        return Err(usage(format!("--ode-tol {} outside (1e-14, 1e-6)", a.ode_tol)));
    }
    let pts = lambda_points(&a.grid, &a.lambda)?;
    let m = meta("evans-kdv", &[("V", v.to_string()), ("method", format!("{:?}", a.method).to_lowercase())]);
    let opts = KdvOdeOptions { ode_tol: a.ode_tol, xi_max: None };
    let (rows, diag) = match a.method {
        KdvMethod::Closed => collect_rows(&pts, |l| evans_kdv_closed(l, v))?,
        KdvMethod::Ode => collect_rows(&pts, |l| evans_kdv_ode(l, v, &opts))?,
    };
    Ok(table(evans_table(&m, &rows), diag))
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[arg(long = "K", default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.05, 0.025, 0.0125])]
    pub eps: Vec<f64>,
    /// Points on the arc.
    #[arg(long, default_value_t = 16)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub ode_tol: f64,
    #[command(flatten)]
    pub common: Common,
}

pub fn converge(a: &ConvergeArgs) -> Result<Report, Failure> {
    nonempty(&a.eps, "--eps")?;
    if a.points == 0 {
        return Err(usage("--points must be positive"));
    }
    let opts = evans_cmd_options(a.ode_tol, None, false)?;
    let m = meta("converge", &[("K", a.k.to_string()), ("eps", list(&a.eps)), ("points", a.points.to_string())]);
    let mut t = Table::new(&m, &["eps", "sup_abs_diff"]);
    let vals: Vec<ep_stability::Result<f64>> = a.eps.par_iter().map(|&e| kdv_deviation(a.k, e, a.points, &opts)).collect();
    let mut diag = Vec::new();
    for (e, v) in a.eps.iter().zip(vals) {
        match v {
            Ok(s) => t.push([*e, s].map(Cell::Num)),
            Err(err) if err.is_usage() => return Err(err.into()),
            Err(err) => diag.push(format!("eps = {e}: {err}")),
        }
    }
    Ok(table(t, diag))
}

#[derive(Args, Debug)]
pub struct ZerosArgs {
    #[arg(long = "K")]
    pub k: f64,
    #[arg(long)]
    pub eps: f64,
    /// `cx,cy:r=R` or `cx,cy:r=auto` (radius 0.5 eps^{3/2}).
    #[arg(long, allow_hyphen_values = true)]
    pub circle: Option<String>,
    /// `r_in:r_out`, the half annulus in Re lambda >= 0.
    #[arg(long)]
    pub annulus: Option<String>,
    /// Initial node count before refinement.
    #[arg(long, default_value_t = 32)]
    pub nodes: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub ode_tol: f64,
    #[command(flatten)]
    pub common: Common,
}

fn parse_contour(a: &ZerosArgs) -> Result<Contour, Failure> {
    match (&a.circle, &a.annulus) {
        (Some(c), None) => {
            let (center, rad) = c.split_once(':').ok_or_else(|| usage(format!("expected cx,cy:r=R in '{c}'")))?;
            let center = parse_complex(center)?;
            let rad = rad.trim().strip_prefix("r=").ok_or_else(|| usage(format!("expected r=R in '{c}'")))?;
            let r = if rad == "auto" { 0.5 * a.eps.powf(1.5) } else { parse_f64(rad, c)? };
            if !(r > 0.0) {
                return Err(usage(format!("circle radius must be positive, got {r}")));
            }
            Ok(Contour::circle(center, r, a.nodes))
        }
        (None, Some(s)) => {
            let (i, o) = s.split_once(':').ok_or_else(|| usage(format!("expected r_in:r_out in '{s}'")))?;
            let (i, o) = (parse_f64(i, s)?, parse_f64(o, s)?);
            if !(i > 0.0 && o > i) {
                return Err(usage(format!("need 0 < r_in < r_out in '{s}'")));
            }
            Ok(Contour::half_annulus(i, o, a.nodes))
        }
        _ => Err(usage("give exactly one of --circle or --annulus")),
    }
}

fn zero_json(z: &ZeroCount) -> serde_json::Value {
    json!({ "contour": z.contour, "nodes": z.nodes, "winding": z.winding, "count": z.count, "min_abs": z.min_abs })
}

pub fn zeros(a: &ZerosArgs) -> Result<Report, Failure> {
    if a.nodes < 8 {
        return Err(usage("--nodes must be at least 8"));
    }
    if !(a.eps >= 0.0 && a.eps.is_finite()) {
        return Err(usage("eps must be finite and non-negative"));
    }
    let contour = parse_contour(a)?;
    let opts = evans_cmd_options(a.ode_tol, None, false)?;
    let z = if a.eps == 0.0 {
        count_zeros(&contour, |_| Ok(C::new(1.0, 0.0)))?
    } else {
        let w = WaveProfile::compute(&params(a.k, a.eps)?, &ProfileOptions::default())?;
        count_zeros(&contour, |l| Ok(evans_value(l, &w, &opts)?.value))?
    };
    let m = meta("zeros", &[("K", a.k.to_string()), ("eps", a.eps.to_string()), ("ode_tol", a.ode_tol.to_string())]);
    if a.common.format == Some(crate::Format::Csv) {
        let mut t = Table::new(&m, &["contour", "nodes", "winding", "count"]);
        t.push([Cell::Text(z.contour.clone()), Cell::Num(z.nodes as f64), Cell::Num(z.winding), Cell::Num(z.count as f64)]);
        return Ok(table(t, Vec::new()));
    }
    let mut v = zero_json(&z);
    v["meta"] = json!(m);
    Ok(Report { output: Output::Json(v), diagnostics: Vec::new() })
}

fn sweep(k: f64, grid: &[f64], policy: &QuadraturePolicy, h_rel: f64) -> Result<(Vec<SweepRow>, Vec<String>), Failure> {
    let rows: Vec<ep_stability::Result<SweepRow>> = grid
        .par_iter()
        .map(|&e| {
            let p = PlasmaParams::new(k, e)?;
            Ok(SweepRow { eps: e, c: p.c(), q: q_integral(&p, policy)?.value, dq_dc: dq_dc(k, e, policy, h_rel)?.value, policy: policy.name() })
        })
        .collect();
    let mut out = Vec::new();
    let mut diag = Vec::new();
    for (e, r) in grid.iter().zip(rows) {
        match r {
            Ok(row) => out.push(row),
            Err(err) if err.is_usage() => return Err(err.into()),
            Err(err) => diag.push(format!("eps = {e}: {err}")),
        }
    }
    Ok((out, diag))
}

fn amplitude_grid(k: f64, eps: &Option<Vec<f64>>, points: usize) -> Result<Vec<f64>, Failure> {
    match eps {
        Some(v) => {
            nonempty(v, "--eps")?;
            if v.windows(2).any(|w| w[1] <= w[0]) {
                return Err(usage("--eps must be strictly increasing"));
            }
            Ok(v.clone())
        }
        None => {
            if points < 2 {
                return Err(usage("--points must be at least 2"));
            }
            Ok(default_eps_grid(k, points)?)
        }
    }
}

fn parse_policy(s: &str) -> Result<QuadraturePolicy, Failure> {
    QuadraturePolicy::parse(s).map_err(|e: EpError| usage(e.to_string()))
}

#[derive(Args, Debug)]
pub struct CriterionArgs {
    #[arg(long = "K")]
    pub k: f64,
    /// Amplitudes; 60 log-spaced points up to 0.99 eps_K when absent.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long, default_value_t = 60)]
    pub points: usize,
    /// `regularized`, `ia`, `ib` or `truncated:<lower>:<gap>`.
    #[arg(long, default_value = "regularized")]
    pub policy: String,
    /// Relative step of the speed derivative.
    #[arg(long, default_value_t = 1e-4)]
    pub h_rel: f64,
    #[command(flatten)]
    pub common: Common,
}

pub fn criterion(a: &CriterionArgs) -> Result<Report, Failure> {
    let policy = parse_policy(&a.policy)?;
    let grid = amplitude_grid(a.k, &a.eps, a.points)?;
    let (rows, diag) = sweep(a.k, &grid, &policy, a.h_rel)?;
    let m = meta("criterion", &[("K", a.k.to_string()), ("policy", policy.name()), ("h_rel", a.h_rel.to_string())]);
    Ok(table(sweep_table(&m, &rows), diag))
}

#[derive(Args, Debug)]
pub struct CriterionK0Args {
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long, default_value_t = 60)]
    pub points: usize,
    #[arg(long, default_value = "regularized")]
    pub policy: String,
    #[arg(long, default_value_t = 1e-4)]
    pub h_rel: f64,
    #[command(flatten)]
    pub common: Common,
}

pub fn criterion_k0(a: &CriterionK0Args) -> Result<Report, Failure> {
    let policy = parse_policy(&a.policy)?;
    let grid = amplitude_grid(0.0, &a.eps, a.points)?;
    let (rows, diag) = sweep(0.0, &grid, &policy, a.h_rel)?;
    let m = meta("criterion-k0", &[("policy", policy.name()), ("h_rel", a.h_rel.to_string())]);
    Ok(table(sweep_table(&m, &rows), diag))
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long = "K")]
    pub k: f64,
    #[arg(long)]
    pub eps: f64,
    /// Weight; `auto` uses c_0 sqrt(eps) with c_0 = sqrt(2V) / 2.
    #[arg(long, default_value = "auto")]
    pub beta: String,
    #[arg(long, default_value_t = 20.0)]
    pub k_max: f64,
    #[arg(long, default_value_t = 1001)]
    pub points: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn spectrum(a: &SpectrumArgs) -> Result<Report, Failure> {
    let p = params(a.k, a.eps)?;
    let beta = if a.beta == "auto" { weight_beta(default_c0(&p), &p) } else { parse_f64(&a.beta, "--beta")? };
    if a.points < 2 || !(a.k_max > 0.0) {
        return Err(usage("need --points >= 2 and --k-max > 0"));
    }
    let ks: Vec<f64> = (0..a.points).map(|i| -a.k_max + 2.0 * a.k_max * i as f64 / (a.points - 1) as f64).collect();
    let curve = essential_spectrum_curve(beta, &ks, &p)?;
    let rows: Vec<(f64, C, C)> = (0..ks.len()).map(|i| (ks[i], curve.plus[i], curve.minus[i])).collect();
    let m = meta("spectrum", &[("K", a.k.to_string()), ("eps", a.eps.to_string()), ("beta", beta.to_string()), ("sup_re", curve.sup_re.to_string())]);
    Ok(table(spectrum_table(&m, &rows), Vec::new()))
}

#[derive(Args, Debug)]
pub struct ThresholdArgs {
    /// Amplitudes; 40 equally spaced points from 0.01 to 0.585 when absent.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[command(flatten)]
    pub common: Common,
}

pub fn threshold(a: &ThresholdArgs) -> Result<Report, Failure> {
    let grid = match &a.eps {
        Some(v) => {
            nonempty(v, "--eps")?;
            v.clone()
        }
        None => (0..40).map(|i| 0.01 + (0.585 - 0.01) * i as f64 / 39.0).collect(),
    };
    let vals: Vec<ep_stability::Result<(f64, f64)>> = grid.par_iter().map(|&e| gradient_threshold(e).map(|g| (g.value, g.x))).collect();
    let mut t = Table::new(&meta("threshold", &[("K", "0".into())]), &["eps", "min_ratio", "x"]);
    let mut diag = Vec::new();
    for (e, v) in grid.iter().zip(vals) {
        match v {
            Ok((val, x)) => t.push([*e, val, x].map(Cell::Num)),
            Err(err) if err.is_usage() => return Err(err.into()),
            Err(err) => diag.push(format!("eps = {e}: {err}")),
        }
    }
    Ok(table(t, diag))
}
