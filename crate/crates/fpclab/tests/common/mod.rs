//! Test-side oracles, independent of the library's numeric paths.

/// ln Gamma via argument-shifting recurrence plus the Stirling series.
/// Shares nothing with the library's Lanczos implementation.
pub fn oracle_ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut z = x;
    let mut shift = 0.0;
    while z < 20.0 {
        shift -= z.ln();
        z += 1.0;
    }
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z.powi(3)) + 1.0 / (1260.0 * z.powi(5))
        - 1.0 / (1680.0 * z.powi(7));
    shift + 0.5 * ((2.0 * std::f64::consts::PI).ln() - z.ln()) + z * (z.ln() - 1.0) + series
}

pub fn oracle_gamma(x: f64) -> f64 {
    oracle_ln_gamma(x).exp()
}

/// Adaptive Simpson on a finite interval; the cross-check integrator for the
/// library's Gauss-Kronrod path.
pub fn oracle_simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, m: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, 0.5 * (a + m), m);
        let right = simpson(f, m, 0.5 * (m + b), b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, m, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, right, tol / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    recurse(&f, a, b, simpson(&f, a, m, b), tol, 48)
}
