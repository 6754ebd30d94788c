use super::SharpnessError;

/// `phi(t) = (1-t)^p - t^p + p t^(p-1)`.
pub fn frs_phi(p: f64, t: f64) -> f64 {
    (1.0 - t).powf(p) - t.powf(p) + p * t.powf(p - 1.0)
}

const GRID: usize = 10_000;

/// Minimum of `phi` over `(0, 1/2]` for `p >= 2`, by a uniform grid scan and a golden-section
/// refinement on the bracket around the best grid point.
pub fn frs_constant(p: f64) -> Result<f64, SharpnessError> {
    if !(p >= 2.0) || !p.is_finite() {
        return Err(SharpnessError::FrsExponent(p));
    }
    if p == 2.0 {
        // phi is identically 1
        return Ok(1.0);
    }
    Ok(frs_minimizer(p).1)
}

/// `(t*, phi(t*))` for `p >= 2`.
pub fn frs_minimizer(p: f64) -> (f64, f64) {
    let h = 0.5 / GRID as f64;
    let mut best = (h, frs_phi(p, h));
    for i in 2..=GRID {
        let t = h * i as f64;
        let v = frs_phi(p, t);
        if v < best.1 {
            best = (t, v);
        }
    }
    let lo = (best.0 - h).max(0.0);
    let hi = (best.0 + h).min(0.5);
    let (t, v) = golden_section(|t| frs_phi(p, t), lo, hi, 1e-14);
    if v < best.1 {
        (t, v)
    } else {
        best
    }
}

/// Minimize a unimodal function on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    let v = f(t);
    [(c, fc), (d, fd), (t, v)].into_iter().fold((t, v), |acc, x| if x.1 < acc.1 { x } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_at_two() {
        assert_eq!(frs_constant(2.0).unwrap(), 1.0);
    }

    #[test]
    fn closed_form_at_three() {
        // phi'(t) = 0 at t = 1 - 1/sqrt(2); phi there equals 2 - sqrt(2)
        let c = frs_constant(3.0).unwrap();
        assert!((c - (2.0 - 2f64.sqrt())).abs() < 1e-12, "{c}");
    }

    #[test]
    fn minimizer_is_stationary_or_at_the_endpoint() {
        let (t, v) = frs_minimizer(2.5);
        assert!(v > 0.0 && v < 1.0);
        let h = 1e-6;
        let slope = (frs_phi(2.5, t + h) - frs_phi(2.5, t - h)) / (2.0 * h);
        assert!(t >= 0.5 - 1e-9 || slope.abs() < 1e-5, "t = {t}, slope = {slope}");
    }

    #[test]
    fn rejects_small_exponent() {
        assert!(frs_constant(1.5).is_err());
    }
}
