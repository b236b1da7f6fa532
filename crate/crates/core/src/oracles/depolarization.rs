use crate::error::{Error, Result};

/// Target absolute accuracy of the adaptive quadrature.
const TOLERANCE: f64 = 1e-12;

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numerical("adaptive simpson hit its depth limit".into()));
    }
    Ok(adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&f, a, b, fa, fm, fb, whole, TOLERANCE, 50)
}

/// Depolarization factors of a spheroid with semi-axes `(a, b, b)` by direct
/// quadrature of `L_j = (abc/2) ∫₀^∞ ds / ((s + a_j²) √((s+a²)(s+b²)(s+c²)))`.
pub fn depolarization_integral(a: f64, b: f64) -> Result<(f64, f64)> {
    if !(b > 0.0 && a >= b && a.is_finite()) {
        return Err(Error::domain("depolarization integral needs a >= b > 0"));
    }
    // s = c·t²/(1-t)² maps [0, 1) onto [0, ∞) with a smooth endpoint at t = 1
    let scale = a * b;
    let factor = |semi: f64| {
        integrate(
            |t: f64| {
                if t >= 1.0 {
                    return 0.0;
                }
                let s = scale * t * t / ((1.0 - t) * (1.0 - t));
                let ds = 2.0 * scale * t / (1.0 - t).powi(3);
                let root = ((s + a * a) * (s + b * b) * (s + b * b)).sqrt();
                0.5 * a * b * b * ds / ((s + semi * semi) * root)
            },
            0.0,
            1.0,
        )
    };
    Ok((factor(a)?, factor(b)?))
}
