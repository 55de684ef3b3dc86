//! Small 1-D quadrature helpers.

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Fixed-panel composite Simpson rule; the brute-force oracle used by tests.
pub fn fixed_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(1);
    let h = (b - a) / n as f64;
    let mut sum = 0.0;
    for k in 0..n {
        let x0 = a + h * k as f64;
        let x1 = x0 + h;
        sum += simpson(x0, x1, f(x0), f(0.5 * (x0 + x1)), f(x1));
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials() {
        let f = |x: f64| 3.0 * x * x;
        assert!((adaptive_simpson(&f, 0.0, 2.0, 1e-12) - 8.0).abs() < 1e-10);
        assert!((fixed_simpson(&f, 0.0, 2.0, 4) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_fixed_rule_on_rough_integrand() {
        let f = |x: f64| (x.sqrt() + 1.0).ln() / (x + 0.01);
        let a = adaptive_simpson(&f, 0.0, 1.0, 1e-10);
        let b = fixed_simpson(&f, 0.0, 1.0, 1_000_000);
        assert!((a - b).abs() < 1e-7, "{a} vs {b}");
    }
}
