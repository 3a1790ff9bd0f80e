use crate::error::{Error, Result};

const MAX_ITER: usize = 200;
const REL_TOL: f64 = 1e-10;

/// Root `z > e` of `z / log z = c` for `c > e`, by Newton's method started at
/// `c log c` with step halving to stay in `z > e`.
pub fn solve_z_over_log_z(c: f64) -> Result<f64> {
    if !(c > std::f64::consts::E) {
        return Err(Error::Precondition(format!("z/log z = {c} has no root above e")));
    }
    let e = std::f64::consts::E;
    let mut z = (c * c.ln()).max(e * 1.5);
    for it in 0..MAX_ITER {
        let l = z.ln();
        let f = z / l - c;
        let df = (l - 1.0) / (l * l);
        let mut step = f / df;
        while z - step <= e {
            step *= 0.5;
        }
        // polish to rounding level once the tolerance is met
        if (f / c).abs() <= REL_TOL && step.abs() <= 1e-14 * z {
            return Ok(z);
        }
        z -= step;
        if !z.is_finite() {
            return Err(Error::NewtonNonConvergence { iterations: it + 1 });
        }
    }
    let f = z / z.ln() - c;
    if (f / c).abs() <= REL_TOL {
        return Ok(z);
    }
    Err(Error::NewtonNonConvergence { iterations: MAX_ITER })
}

/// `z_n` with `z_n / log z_n = 2^{n^2} pi + pi/2`, where `sin(z / log z)`
/// peaks.
pub fn anchor_z(n: u32) -> Result<f64> {
    anchor_z_phase(n, std::f64::consts::FRAC_PI_2)
}

/// As [`anchor_z`] with an arbitrary phase offset (`-pi/2` for troughs).
pub fn anchor_z_phase(n: u32, phase: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Precondition("anchors need n >= 2".into()));
    }
    let c = (f64::from(n * n)).exp2() * std::f64::consts::PI + phase;
    solve_z_over_log_z(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn residual_and_monotonicity() {
        for n in 2..=5 {
            let z = anchor_z(n).unwrap();
            let rhs = (f64::from(n * n)).exp2() * PI + PI / 2.0;
            assert!((z / z.ln() - rhs).abs() <= 1e-8 * rhs, "n={n}");
            assert!((z / z.ln()).sin() > 0.999_999);
        }
        assert!(anchor_z(4).unwrap() > anchor_z(3).unwrap());
        let t = anchor_z_phase(3, -PI / 2.0).unwrap();
        assert!((t / t.ln()).sin() < -0.999_999);
        assert!(anchor_z(1).is_err());
        assert!(solve_z_over_log_z(1.0).is_err());
    }
}
