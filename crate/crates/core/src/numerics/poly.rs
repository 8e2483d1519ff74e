//! Roots of complex polynomials through companion-matrix eigenvalues.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::EpError;

/// Evaluate `p(z)` and `p'(z)` by Horner, coefficients in ascending order.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All roots of `sum coeffs[k] z^k`, each polished by two Newton steps.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, EpError> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    if lead.norm() == 0.0 {
        return Err(EpError::Splitting("degenerate leading coefficient".into()));
    }
    let mut comp = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let eig = comp
        .schur()
        .eigenvalues()
        .ok_or_else(|| EpError::Splitting("companion eigenvalue solve failed".into()))?;
    let mut out: Vec<Complex64> = eig.iter().copied().collect();
    for z in out.iter_mut() {
        for _ in 0..2 {
            let (p, dp) = horner(coeffs, *z);
            if dp.norm() > 0.0 {
                let step = p / dp;
                if step.is_finite() {
                    *z -= step;
                }
            }
        }
    }
    Ok(out)
}
