//! Adaptive Simpson quadrature.

/// Integrates `f` over `[a, b]` with adaptive Simpson refinement.
///
/// `tol` is an absolute tolerance on the whole interval; the usual
/// `eps / 15` Richardson correction is applied at the leaves.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(&f, a, m, b, fa, fm, fb, whole, tol, 48)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let eps = left + right - whole;
    if eps.abs() <= 15.0 * tol || depth == 0 {
        left + right + eps / 15.0
    } else {
        let half = 0.5 * tol;
        recurse(f, a, lm, m, fa, flm, fm, left, half, depth - 1)
            + recurse(f, m, rm, b, fm, frm, fb, right, half, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| x * x, 0.0, 1.0, 1e-12);
        assert!((q - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_matches_closed_form() {
        let q = integrate(|x| (-2.0 * x).exp(), 0.0, 1.0, 1e-12);
        assert!((q - 0.5 * (1.0 - (-2.0f64).exp())).abs() < 1e-11);
    }

    #[test]
    fn halving_tolerance_is_stable() {
        let f = |x: f64| (-2.0 * x).exp() * (1.0 + 0.5 * x * x);
        let a = integrate(f, 0.0, 1.0, 1e-10);
        let b = integrate(f, 0.0, 1.0, 5e-11);
        assert!((a - b).abs() < 1e-9);
    }
}
