//! Adaptive Simpson quadrature with Richardson-corrected leaves.

use crate::error::{Error, Result};

/// Deepest bisection level before giving up.
pub const MAX_DEPTH: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quadrature {
    pub value: f64,
    /// Sum over accepted leaves of `|S_2 - S_1| / 15`.
    pub error: f64,
    pub evaluations: usize,
}

impl std::ops::Add for Quadrature {
    type Output = Quadrature;
    fn add(self, o: Quadrature) -> Quadrature {
        Quadrature {
            value: self.value + o.value,
            error: self.error + o.error,
            evaluations: self.evaluations + o.evaluations,
        }
    }
}

struct Ctx<'a, F> {
    f: &'a F,
    evals: usize,
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    c: &mut Ctx<'_, F>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<(f64, f64)> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = ((c.f)(lm), (c.f)(rm));
    c.evals += 2;
    let h = (b - a) / 12.0;
    let left = h * (fa + 4.0 * flm + fm);
    let right = h * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Some((left + right + delta / 15.0, delta.abs() / 15.0));
    }
    if depth == 0 || !(m > a && m < b) {
        return None;
    }
    let (lv, le) = refine(c, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let (rv, re) = refine(c, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Some((lv + rv, le + re))
}

/// `integral_a^b f` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature::default());
    }
    if b < a {
        let q = adaptive_simpson(f, b, a, tol)?;
        return Ok(Quadrature { value: -q.value, ..q });
    }
    let mut c = Ctx { f, evals: 3 };
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let (value, error) = refine(&mut c, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
        .ok_or(Error::QuadratureNonConvergence { a, b, tol })?;
    if !value.is_finite() {
        return Err(Error::QuadratureNonConvergence { a, b, tol });
    }
    Ok(Quadrature {
        value,
        error,
        evaluations: c.evals,
    })
}

/// Splits `[a, b]` into pieces no longer than `piece` and integrates each to
/// `tol`.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, piece: f64, tol: f64) -> Result<Quadrature> {
    let n = (((b - a).abs() / piece).ceil() as usize).max(1);
    let h = (b - a) / n as f64;
    let mut total = Quadrature::default();
    for i in 0..n {
        let lo = a + h * i as f64;
        let hi = if i + 1 == n { b } else { a + h * (i + 1) as f64 };
        total = total + adaptive_simpson(f, lo, hi, tol)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let q = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x, 0.0, 3.0, 1e-12).unwrap();
        assert!((q.value - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn smooth_integrals() {
        let q = adaptive_simpson(&f64::sin, 0.0, std::f64::consts::PI, 1e-10).unwrap();
        assert!((q.value - 2.0).abs() < 1e-10);
        let q = adaptive_simpson(&|x: f64| 1.0 / x, 1.0, 10.0, 1e-11).unwrap();
        assert!((q.value - 10f64.ln()).abs() < 1e-10);
        let r = adaptive_simpson(&|x: f64| 1.0 / x, 10.0, 1.0, 1e-11).unwrap();
        assert_eq!(r.value, -q.value);
        let p = integrate_pieces(&f64::exp, 0.0, 5.0, 0.7, 1e-11).unwrap();
        assert!((p.value - (5f64.exp() - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn singular_integrand_is_reported() {
        let r = adaptive_simpson(&|x: f64| 1.0 / x, -1.0, 1.0, 1e-9);
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
    }
}
