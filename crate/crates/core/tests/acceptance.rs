//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::f64::consts::SQRT_2;
use std::time::Instant;

use ep_stability::contour::{count_zeros, Contour};
use ep_stability::criteria::{d2_lambda_at_origin, dq_dc, gradient_threshold, q_integral, QuadraturePolicy};
use ep_stability::evans::{evans, EvansOptions};
use ep_stability::kdv::{evans_kdv_closed, evans_kdv_ode, evans_scaled, KdvOdeOptions};
use ep_stability::params::{critical_amplitude, default_eps_grid};
use ep_stability::profile::{peak_state, ProfileOptions, WaveProfile};
use ep_stability::spectral::{
    asymptotic_roots, char_roots, default_c0, essential_spectrum_curve, s1_min_eigenvalue, weight_beta, weight_eta, Regime,
};
use ep_stability::PlasmaParams;
use num_complex::Complex64 as C;
use rand::{rngs::StdRng, Rng, SeedableRng};
use rayon::prelude::*;

// Pinned tolerances.
const TABLE_ABS: f64 = 1e-3;
const TABLE_STEEP_REL: f64 = 0.05;
const TABLE_SECONDS: f64 = 10.0;
const THRESHOLD_ABS: f64 = 1e-3;
const ZEROS_SECONDS: f64 = 120.0;
const KDV_ORACLE_ABS: f64 = 1e-6;
const CONVERGENCE_FINAL: f64 = 0.1;
const S1_FLOOR: f64 = -1e-10;
const SLOPE_LARGE: (f64, f64) = (-2.0, 0.3);
const SLOPE_SMALL_MIN: f64 = 2.0 / 3.0 - 0.1;
const Q_SLOPE: (f64, f64) = (1.5, 0.05);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn profile(k: f64, eps: f64) -> WaveProfile {
    WaveProfile::compute(&PlasmaParams::new(k, eps).unwrap(), &ProfileOptions::default()).unwrap()
}

// (K, eps, n_s, n*, u*, phi*); n_s is absent for K = 0.
const TABLE: [(f64, f64, Option<f64>, f64, f64, f64); 20] = [
    (0.0, 0.01, None, 0.0305, 0.0299, 0.0298),
    (0.0, 0.03, None, 0.0950, 0.0893, 0.0880),
    (0.0, 0.40, None, 3.8463, 1.1111, 0.9383),
    (0.0, 0.584, None, 870.5859, 1.5822, 1.2545),
    (0.0, 0.5845, None, 1.492e3, 1.5834, 1.2553),
    (0.0, 0.585, None, 5.209e3, 1.5847, 1.2561),
    (0.001, 0.01, Some(30.95), 0.0305, 0.0299, 0.0298),
    (0.001, 0.03, Some(31.58), 0.0949, 0.0893, 0.0880),
    (0.001, 0.40, Some(43.28), 3.8569, 1.1121, 0.9375),
    (0.001, 0.5465, Some(47.92), 38.6476, 1.5080, 1.1922),
    (0.001, 0.5470, Some(47.93), 41.2877, 1.5109, 1.1930),
    (0.001, 0.5474, Some(47.94), 45.3119, 1.5145, 1.1936),
    (1.0, 0.002, Some(0.4162), 0.0043, 0.0060, 0.0042),
    (1.0, 0.070, Some(0.4842), 0.1690, 0.2146, 0.1393),
    (1.0, 0.1550, Some(0.5692), 0.5529, 0.5587, 0.2805),
    (1.0, 0.1552, Some(0.5694), 0.5611, 0.5641, 0.2808),
    (10.0, 0.002, Some(0.0494), 0.0018, 0.0060, 0.0018),
    (10.0, 0.030, Some(0.0583), 0.0295, 0.0958, 0.0256),
    (10.0, 0.0522, Some(0.0653), 0.0634, 0.2009, 0.0417),
    (10.0, 0.0523, Some(0.0653), 0.0642, 0.2033, 0.0418),
];

fn peak_table() -> Outcome {
    let t = Instant::now();
    let mut worst = String::new();
    let mut bad = 0;
    for &(k, eps, ns, n, u, phi) in &TABLE {
        let pk = peak_state(&PlasmaParams::new(k, eps).unwrap()).unwrap();
        let steep = k == 0.0 && eps >= 0.584;
        let tol = |r: f64| if steep { TABLE_ABS.max(TABLE_STEEP_REL * r.abs()) } else { TABLE_ABS };
        let mut pairs = vec![(pk.n_star, n), (pk.u_star, u), (pk.phi_star, phi)];
        if let Some(ns) = ns {
            let got = pk.n_sonic.unwrap_or(f64::NAN);
            if k == 0.001 {
                // this column is printed truncated to two decimals
                if !(got >= ns && got < ns + 0.01) {
                    bad += 1;
                    worst = format!("K={k} eps={eps}: n_s {got} does not truncate to {ns}");
                }
            } else {
                pairs.push((got, ns));
            }
        }
        for (got, want) in pairs {
            if !((got - want).abs() <= tol(want)) {
                bad += 1;
                worst = format!("K={k} eps={eps}: got {got}, table {want}");
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(bad == 0 && secs < TABLE_SECONDS, format!("{} rows, {bad} mismatches {worst}, {secs:.2}s", TABLE.len()))
}

fn thresholds() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, want) in [(0.001, 0.5475), (1.0, 0.1553), (10.0, 0.0524)] {
        let e = critical_amplitude(k).unwrap().eps;
        ok &= (e - want).abs() < THRESHOLD_ABS;
        parts.push(format!("eps_K({k})={e:.5}"));
    }
    let z = critical_amplitude(0.0).unwrap().zeta;
    ok &= (z - 1.5852).abs() < THRESHOLD_ABS;
    parts.push(format!("zeta0={z:.5}"));
    outcome(ok, parts.join(", "))
}

fn origin_double_zero() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, eps) in [(1.0, 0.05), (1.0, 0.02), (0.001, 0.05)] {
        let w = profile(k, eps);
        let f = |z: C| Ok(evans(z, &w, &EvansOptions::default())?.value);
        let circle = Contour::circle(C::new(0.0, 0.0), 0.5 * eps.powf(1.5), 32);
        let inner = count_zeros(&circle, f).map(|z| z.count);
        let annulus = Contour::half_annulus(0.1, 5.0, 96);
        let outer = count_zeros(&annulus, f).map(|z| z.count);
        ok &= matches!(inner, Ok(2)) && matches!(outer, Ok(0));
        parts.push(format!("({k},{eps}): circle {inner:?}, annulus {outer:?}"));
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(ok && secs < ZEROS_SECONDS, format!("{}, {secs:.1}s", parts.join("; ")))
}

fn kdv_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for v in [1.0, SQRT_2] {
        for &r in &[0.3, 1.0, 2.5, 4.0, 5.0] {
            for &th in &[-1.4, -0.6, 0.3, 1.2] {
                let l = C::from_polar(r, th);
                let a = evans_kdv_closed(l, v).unwrap();
                let b = evans_kdv_ode(l, v, &KdvOdeOptions::default()).unwrap();
                worst = worst.max((a - b).norm());
            }
        }
    }
    outcome(worst < KDV_ORACLE_ABS, format!("20 points x 2 speeds, max |closed - ode| = {worst:.2e}"))
}

/// 16 points on the circular part of the boundary of `{Re Lambda > -eta} ∩ {|Lambda| <= 5}`.
fn convergence_arc(p: &PlasmaParams) -> Vec<C> {
    let eta = weight_eta(default_c0(p), p);
    let th = (-eta / 5.0).acos();
    (0..16).map(|i| C::from_polar(5.0, -th + (i as f64 + 0.5) * 2.0 * th / 16.0)).collect()
}

fn kdv_distance(k: f64, eps: f64) -> Result<f64, String> {
    let p = PlasmaParams::new(k, eps).map_err(|e| e.to_string())?;
    let w = WaveProfile::compute(&p, &ProfileOptions::default()).map_err(|e| e.to_string())?;
    let arc = convergence_arc(&p);
    let d: Result<Vec<f64>, _> = arc
        .par_iter()
        .map(|&l| -> ep_stability::Result<f64> {
            Ok((evans_scaled(l, eps, k, Some(&w), &EvansOptions::default())? - evans_kdv_closed(l, p.v())?).norm())
        })
        .collect();
    d.map(|v| v.into_iter().fold(0.0, f64::max)).map_err(|e| e.to_string())
}

fn convergence(grid: &[f64]) -> Outcome {
    let sups: Vec<Result<f64, String>> = grid.iter().map(|&e| kdv_distance(1.0, e)).collect();
    let shown: Vec<String> = grid
        .iter()
        .zip(&sups)
        .map(|(e, s)| match s {
            Ok(v) => format!("eps={e}: {v:.4}"),
            Err(m) => format!("eps={e}: {m}"),
        })
        .collect();
    let vals: Option<Vec<f64>> = sups.iter().map(|s| s.as_ref().ok().copied()).collect();
    let ok = match vals {
        Some(v) => v.windows(2).all(|w| w[1] < w[0]) && *v.last().unwrap() < CONVERGENCE_FINAL,
        None => false,
    };
    outcome(ok, shown.join(", "))
}

fn q_monotone() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in [0.001, 1.0, 10.0] {
        let grid = default_eps_grid(k, 60).unwrap();
        let q: Vec<f64> = grid
            .par_iter()
            .map(|&e| q_integral(&PlasmaParams::new(k, e).unwrap(), &QuadraturePolicy::regularized()).unwrap().value)
            .collect();
        let min_step = q.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        ok &= min_step > 0.0;
        parts.push(format!("K={k}: min dQ = {min_step:.3e}"));
    }
    outcome(ok, parts.join(", "))
}

fn dq0_on_grid(policy: &QuadraturePolicy, grid: &[f64]) -> Vec<(f64, Result<f64, String>)> {
    grid.par_iter()
        .map(|&e| (e, dq_dc(0.0, e, policy, 1e-4).map(|d| d.value).map_err(|m| m.to_string())))
        .collect()
}

fn interval_artifact() -> Outcome {
    let grid = default_eps_grid(0.0, 60).unwrap();
    let ia = dq0_on_grid(&QuadraturePolicy::interval_a(), &grid);
    let negative: Vec<f64> = ia
        .iter()
        .filter(|(e, d)| *e > 0.50 && *e < 0.585 && matches!(d, Ok(v) if *v < 0.0))
        .map(|(e, _)| *e)
        .collect();
    let mut ok = !negative.is_empty();
    let mut parts = vec![format!("I_a negative at {} grid points from eps={:.4}", negative.len(), negative.first().copied().unwrap_or(f64::NAN))];
    for policy in [QuadraturePolicy::interval_b(), QuadraturePolicy::regularized()] {
        let d = dq0_on_grid(&policy, &grid);
        let min = d.iter().map(|(_, v)| v.clone().unwrap_or(f64::NAN)).fold(f64::INFINITY, |a, b| if b.is_nan() { f64::NAN } else { a.min(b) });
        ok &= min > 0.0;
        parts.push(format!("{} min dQ0/dc = {min:.4}", policy.name()));
    }
    outcome(ok, parts.join(", "))
}

fn sign_consistency() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, eps) in [(1.0, 0.05), (1.0, 0.1), (0.001, 0.1)] {
        let w = profile(k, eps);
        let d2 = d2_lambda_at_origin(&w, &EvansOptions::default());
        let dq = dq_dc(k, eps, &QuadraturePolicy::regularized(), 1e-4);
        match (d2, dq) {
            (Ok(a), Ok(b)) => {
                ok &= a.value > 0.0 && b.value > 0.0;
                parts.push(format!("({k},{eps}): D''(0)={:.4e}, dQ/dc={:.4}", a.value, b.value));
            }
            (a, b) => {
                ok = false;
                parts.push(format!("({k},{eps}): {:?} / {:?}", a.err(), b.err()));
            }
        }
    }
    outcome(ok, parts.join("; "))
}

fn splitting() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let p0 = PlasmaParams::new(1.0, 0.05).unwrap();
    let mut fails = 0;
    for _ in 0..200 {
        let l = C::new(rng.gen_range(1e-6..10.0), rng.gen_range(-10.0..10.0));
        if char_roots(l, &p0, 0.0).is_err() {
            fails += 1;
        }
    }
    let mut shifted = 0;
    for _ in 0..200 {
        let k = [0.001, 1.0, 10.0][rng.gen_range(0..3)];
        let eps = rng.gen_range(0.005..0.05);
        let p = PlasmaParams::new(k, eps).unwrap();
        let beta = weight_beta(default_c0(&p), &p);
        let edge = eps.powf(1.5) * weight_eta(default_c0(&p), &p);
        let l = C::new(rng.gen_range(-edge * 0.999..10.0), rng.gen_range(-10.0..10.0));
        if char_roots(l, &p, beta).is_err() {
            shifted += 1;
        }
    }
    let mut bound_ok = true;
    let mut margin = f64::INFINITY;
    for (k, eps) in [(0.001, 0.05), (1.0, 0.02), (10.0, 0.01)] {
        let p = PlasmaParams::new(k, eps).unwrap();
        let c0 = default_c0(&p);
        let beta = weight_beta(c0, &p);
        let grid: Vec<f64> = (0..1000).map(|i| -50.0 + 100.0 * i as f64 / 999.0).collect();
        let curve = essential_spectrum_curve(beta, &grid, &p).unwrap();
        let sup = curve.minus.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let bound = -eps * beta / 2.0 * (1.0 - c0 * c0 / (2.0 * p.v()));
        bound_ok &= sup < bound;
        margin = margin.min(bound - sup);
    }
    outcome(
        fails == 0 && shifted == 0 && bound_ok,
        format!("unweighted failures {fails}/200, weighted failures {shifted}/200, essential bound margin {margin:.3e}"),
    )
}

fn nearest(z: C, set: &[C]) -> f64 {
    set.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min)
}

fn asymptotic_rates() -> Outcome {
    let p = PlasmaParams::new(1.0, 0.05).unwrap();
    let radii = logspace(10.0, 1e3, 9);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &r in &radii {
        for th in [-1.2, 0.0, 0.9] {
            let l = C::from_polar(r, th);
            let mu1 = char_roots(l, &p, 0.0).unwrap().mu[0];
            let approx = asymptotic_roots(l, Regime::Large, &p)[0];
            xs.push(r.ln());
            ys.push((mu1 - approx).norm().ln());
        }
    }
    let large = slope(&xs, &ys);
    let ps = PlasmaParams::new(1.0, 1e-6).unwrap();
    let deltas = logspace(1e-3, 1e-2, 9);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &d in &deltas {
        let mut worst = 0.0f64;
        for th in [-1.0, 0.3, 1.3] {
            let l = C::from_polar(0.5 * d, th);
            let mut mu = ep_stability::numerics::poly::roots(&ep_stability::spectral::quartic_coefficients(l, &ps)).unwrap();
            mu.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
            let approx = asymptotic_roots(l, Regime::Small, &ps);
            for a in &approx[..3] {
                worst = worst.max(nearest(*a, &mu) / a.norm());
            }
        }
        xs.push(d.ln());
        ys.push(worst.ln());
    }
    let small = slope(&xs, &ys);
    let ok = (large - SLOPE_LARGE.0).abs() <= SLOPE_LARGE.1 && small >= SLOPE_SMALL_MIN;
    outcome(ok, format!("large-|lambda| slope {large:.3}, small-|lambda| relative error slope {small:.3}"))
}

fn s1_nonnegative(cases: &[(f64, f64)]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for &(k, eps) in cases {
        let w = profile(k, eps);
        let p = *w.params();
        let mut xs: Vec<_> = w.samples();
        xs.extend(w.uniform(4001));
        let min = xs.iter().map(|s| s1_min_eigenvalue(s, &p)).fold(f64::INFINITY, f64::min);
        ok &= min >= S1_FLOOR;
        parts.push(format!("({k},{eps}): {min:.3e}"));
    }
    outcome(ok, parts.join(", "))
}

fn gradient() -> Outcome {
    let at = gradient_threshold(0.585).unwrap().value;
    let grid: Vec<f64> = (0..10).map(|i| 0.3 + (0.585 - 0.3) * i as f64 / 9.0).collect();
    let vals: Vec<f64> = grid.par_iter().map(|&e| gradient_threshold(e).unwrap().value).collect();
    let monotone = vals.windows(2).all(|w| w[1] < w[0]);
    let ok = at > -SQRT_2 && at < -1.35 && monotone && vals.iter().all(|&v| v > -SQRT_2);
    outcome(ok, format!("min at eps=0.585: {at:.5}, sweep 0.3..0.585 decreasing: {monotone}"))
}

fn q_scaling() -> Outcome {
    let eps = logspace(1e-3, 1e-2, 8);
    let q: Vec<f64> = eps
        .iter()
        .map(|&e| q_integral(&PlasmaParams::new(1.0, e).unwrap(), &QuadraturePolicy::regularized()).unwrap().value)
        .collect();
    let s = slope(&eps.iter().map(|e| e.ln()).collect::<Vec<_>>(), &q.iter().map(|v| v.ln()).collect::<Vec<_>>());
    outcome((s - Q_SLOPE.0).abs() <= Q_SLOPE.1, format!("log Q / log eps slope {s:.4}"))
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("peak table", Box::new(peak_table)),
        ("existence thresholds", Box::new(thresholds)),
        ("double zero at the origin", Box::new(origin_double_zero)),
        ("KdV closed form vs ODE", Box::new(kdv_oracle)),
        ("scaled Evans -> KdV, eps in {0.2, 0.1, 0.05, 0.025}", Box::new(|| convergence(&[0.2, 0.1, 0.05, 0.025]))),
        ("Q strictly increasing", Box::new(q_monotone)),
        ("Q0 truncation artifact", Box::new(interval_artifact)),
        ("sign of D''(0) vs dQ/dc", Box::new(sign_consistency)),
        ("root splitting and essential spectrum", Box::new(splitting)),
        ("asymptotic root rates", Box::new(asymptotic_rates)),
        ("S1 non-negative", Box::new(|| s1_nonnegative(&[(1.0, 0.02), (1.0, 0.05), (10.0, 0.01)]))),
        ("cold-ion gradient threshold", Box::new(gradient)),
        ("small-amplitude Q scaling", Box::new(q_scaling)),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        println!(
            "criterion {:2} {}: {} ({}) [{:.1}s]",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            name,
            o.detail,
            t.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed.push(i + 1);
        }
    }
    let extra = convergence(&[0.1, 0.05, 0.025]);
    println!(
        "supplementary {}: scaled Evans -> KdV over amplitudes with a wave at K=1 ({})",
        if extra.pass { "PASS" } else { "FAIL" },
        extra.detail
    );
    let extra = s1_nonnegative(&[(1.0, 0.02), (1.0, 0.01), (10.0, 0.002)]);
    println!("supplementary {}: S1 non-negative at smaller amplitudes ({})", if extra.pass { "PASS" } else { "FAIL" }, extra.detail);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
