//! Zero counting by the argument principle and Cauchy-integral derivatives.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{EpError, Result};

type C = Complex64;

/// One piece of a closed contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line { from: C, to: C },
    /// Arc traversed from `theta0` to `theta1` (clockwise when `theta1 < theta0`).
    Arc { center: C, radius: f64, theta0: f64, theta1: f64 },
}

impl Segment {
    fn point(&self, t: f64) -> C {
        match *self {
            Segment::Line { from, to } => from + (to - from) * t,
            Segment::Arc { center, radius, theta0, theta1 } => center + C::from_polar(radius, theta0 + (theta1 - theta0) * t),
        }
    }

    fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, theta0, theta1, .. } => radius * (theta1 - theta0).abs(),
        }
    }
}

/// Closed, positively oriented contour with an initial node budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub name: String,
    pub segments: Vec<Segment>,
    pub nodes: usize,
}

impl Contour {
    pub fn circle(center: C, radius: f64, nodes: usize) -> Self {
        Self {
            name: format!("circle(center={center}, r={radius})"),
            segments: vec![Segment::Arc { center, radius, theta0: 0.0, theta1: 2.0 * PI }],
            nodes,
        }
    }

    /// Boundary of `{r_in <= |lambda| <= r_out, Re lambda >= 0}`.
    pub fn half_annulus(r_in: f64, r_out: f64, nodes: usize) -> Self {
        let i = C::new(0.0, 1.0);
        let o = C::new(0.0, 0.0);
        Self {
            name: format!("half_annulus(r_in={r_in}, r_out={r_out})"),
            segments: vec![
                Segment::Arc { center: o, radius: r_out, theta0: -0.5 * PI, theta1: 0.5 * PI },
                Segment::Line { from: i * r_out, to: i * r_in },
                Segment::Arc { center: o, radius: r_in, theta0: 0.5 * PI, theta1: -0.5 * PI },
                Segment::Line { from: -i * r_in, to: -i * r_out },
            ],
            nodes,
        }
    }

    /// Point at global parameter `s` in `[0, segments)`.
    pub fn point(&self, s: f64) -> C {
        let i = (s.floor() as usize).min(self.segments.len() - 1);
        self.segments[i].point(s - i as f64)
    }

    /// Initial parameters, spread over segments in proportion to length.
    fn initial_parameters(&self) -> Vec<f64> {
        let total: f64 = self.segments.iter().map(Segment::length).sum();
        let mut out = Vec::new();
        for (i, seg) in self.segments.iter().enumerate() {
            let m = ((self.nodes as f64 * seg.length() / total).round() as usize).max(4);
            out.extend((0..m).map(|j| i as f64 + j as f64 / m as f64));
        }
        out
    }
}

/// Result of a winding-number computation.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCount {
    pub contour: String,
    /// Nodes after refinement.
    pub nodes: usize,
    /// Raw accumulated argument change divided by `2 pi`.
    pub winding: f64,
    pub count: i64,
    pub min_abs: f64,
}

const MAX_ROUNDS: usize = 14;
const MAX_STEP: f64 = PI / 3.0;

/// Count zeros of `f` inside `contour` by tracking `arg f` along it.
///
/// Gaps where the argument jumps by more than `pi / 3` are bisected until
/// resolved; unresolved gaps or near-zero values on the contour are errors.
pub fn count_zeros<F>(contour: &Contour, f: F) -> Result<ZeroCount>
where
    F: Fn(C) -> Result<C> + Sync,
{
    let eval = |ss: &[f64]| -> Result<Vec<C>> { ss.par_iter().map(|&s| f(contour.point(s))).collect() };
    let mut s = contour.initial_parameters();
    let mut vals = eval(&s)?;
    let end = contour.segments.len() as f64;
    for _ in 0..=MAX_ROUNDS {
        let n = s.len();
        let mut bad = Vec::new();
        for i in 0..n {
            let j = (i + 1) % n;
            if (vals[j] / vals[i]).arg().abs() > MAX_STEP {
                bad.push(i);
            }
        }
        if bad.is_empty() {
            break;
        }
        if s.len() > 200_000 {
            break;
        }
        let mids: Vec<f64> = bad
            .iter()
            .map(|&i| {
                let next = if i + 1 == n { end } else { s[i + 1] };
                0.5 * (s[i] + next)
            })
            .collect();
        let new_vals = eval(&mids)?;
        let mut merged: Vec<(f64, C)> = s.iter().copied().zip(vals.iter().copied()).collect();
        merged.extend(mids.into_iter().zip(new_vals));
        merged.sort_by(|a, b| a.0.total_cmp(&b.0));
        s = merged.iter().map(|m| m.0).collect();
        vals = merged.iter().map(|m| m.1).collect();
    }
    let min_abs = vals.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    if min_abs < 1e-10 {
        return Err(EpError::UnresolvedContour(format!("|f| = {min_abs:e} on {}", contour.name)));
    }
    let n = vals.len();
    let mut total = 0.0;
    for i in 0..n {
        let step = (vals[(i + 1) % n] / vals[i]).arg();
        if step.abs() > MAX_STEP {
            return Err(EpError::UnresolvedContour(format!(
                "argument jump {step:.3} near lambda = {} on {}",
                contour.point(s[i]),
                contour.name
            )));
        }
        total += step;
    }
    let winding = total / (2.0 * PI);
    let count = winding.round();
    if (winding - count).abs() > 1e-6 {
        return Err(EpError::UnresolvedContour(format!("non-integer winding {winding} on {}", contour.name)));
    }
    Ok(ZeroCount { contour: contour.name.clone(), nodes: n, winding, count: count as i64, min_abs })
}

/// `f''(0)` from the trapezoidal rule for `(1/pi i) ∮ f / lambda^3` on `|lambda| = r`.
///
/// With `conjugate_symmetric` only the closed upper half circle is evaluated
/// and the rest follows from `f(conj z) = conj f(z)`.
pub fn cauchy_second_derivative<F>(f: F, radius: f64, nodes: usize, conjugate_symmetric: bool) -> Result<C>
where
    F: Fn(C) -> Result<C> + Sync,
{
    if nodes < 8 || nodes % 2 != 0 {
        return Err(EpError::InvalidParameter(format!("node count {nodes} must be even and >= 8")));
    }
    let z = |k: usize| C::from_polar(radius, 2.0 * PI * k as f64 / nodes as f64);
    let idx: Vec<usize> = if conjugate_symmetric { (0..=nodes / 2).collect() } else { (0..nodes).collect() };
    let vals: Vec<C> = idx.par_iter().map(|&k| f(z(k))).collect::<Result<_>>()?;
    let mut sum = C::new(0.0, 0.0);
    for (&k, &v) in idx.iter().zip(&vals) {
        let term = v / (z(k) * z(k));
        if conjugate_symmetric && k != 0 && k != nodes / 2 {
            sum += 2.0 * term.re;
        } else {
            sum += term;
        }
    }
    Ok(sum * (2.0 / nodes as f64))
}
