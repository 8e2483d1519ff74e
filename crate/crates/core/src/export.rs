//! Deterministic tables with a metadata header line, rendered as CSV.

use std::fmt::Write;

use num_complex::Complex64;

use crate::criteria::SweepRow;
use crate::profile::WaveSample;

/// Seventeen significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// A metadata line, a header and rows of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(meta: &str, columns: &[&str]) -> Self {
        Self { meta: meta.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I: IntoIterator<Item = Cell>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# {}\n{}\n", self.meta, self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => fmt_f64(*x),
                    Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

fn nums<const N: usize>(v: [f64; N]) -> impl Iterator<Item = Cell> {
    v.into_iter().map(Cell::Num)
}

pub fn profile_table(meta: &str, samples: &[WaveSample]) -> Table {
    let mut t = Table::new(meta, &["x", "n", "u", "phi", "E", "dn_dx", "du_dx", "d2phi_dx2"]);
    for s in samples {
        t.push(nums([s.x, s.n, s.u, s.phi, s.e_field, s.dn_dx, s.du_dx, s.d2phi_dx2]));
    }
    t
}

/// Rows `(k, d_+(ik - beta), d_-(ik - beta))`.
pub fn spectrum_table(meta: &str, rows: &[(f64, Complex64, Complex64)]) -> Table {
    let mut t = Table::new(meta, &["k", "re_dplus", "im_dplus", "re_dminus", "im_dminus"]);
    for (k, p, m) in rows {
        t.push(nums([*k, p.re, p.im, m.re, m.im]));
    }
    t
}

/// Rows `(lambda, D(lambda))`.
pub fn evans_table(meta: &str, rows: &[(Complex64, Complex64)]) -> Table {
    let mut t = Table::new(meta, &["re_lambda", "im_lambda", "re_D", "im_D", "abs_D"]);
    for (l, d) in rows {
        t.push(nums([l.re, l.im, d.re, d.im, d.norm()]));
    }
    t
}

pub fn sweep_table(meta: &str, rows: &[SweepRow]) -> Table {
    let mut t = Table::new(meta, &["eps", "c", "Q", "dQ_dc", "policy"]);
    for r in rows {
        t.push(nums([r.eps, r.c, r.q, r.dq_dc]).chain([Cell::Text(r.policy.clone())]));
    }
    t
}

pub fn profile_csv(meta: &str, samples: &[WaveSample]) -> String {
    profile_table(meta, samples).to_csv()
}

pub fn spectrum_csv(meta: &str, rows: &[(f64, Complex64, Complex64)]) -> String {
    spectrum_table(meta, rows).to_csv()
}

pub fn evans_csv(meta: &str, rows: &[(Complex64, Complex64)]) -> String {
    evans_table(meta, rows).to_csv()
}

pub fn sweep_csv(meta: &str, rows: &[SweepRow]) -> String {
    sweep_table(meta, rows).to_csv()
}
