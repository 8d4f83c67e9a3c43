//! Adaptive Gauss-Kronrod quadrature on a semi-infinite interval.
//!
//! The integral over (lower, inf) is reduced to (0, 1) in two steps:
//! a power substitution u = (x - lower)^(1-sigma) that removes a known
//! endpoint singularity of order sigma, then the rational map u = t/(1-t)
//! that folds the infinite tail in. A G7/K15 rule with bisection of the
//! worst interval drives the error below tolerance.

use crate::error::{Error, Result};

/// Tolerances and the known endpoint behaviour for one integral.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Known power-law order sigma in [0, 1) of the integrand at the lower
    /// limit: f(x) ~ C (x - lower)^(-sigma). Zero means no singularity.
    pub endpoint_singularity_order: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            endpoint_singularity_order: 0.0,
        }
    }
}

impl QuadratureSpec {
    pub fn with_singularity(order: f64) -> Self {
        QuadratureSpec {
            endpoint_singularity_order: order,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::domain("quadrature", "tolerances must be positive"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::domain("quadrature", "max_subdivisions must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.endpoint_singularity_order) {
            return Err(Error::domain(
                "quadrature",
                format!(
                    "endpoint_singularity_order must lie in [0,1), got {}",
                    self.endpoint_singularity_order
                ),
            ));
        }
        Ok(())
    }
}

/// Converged integral value with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_bound: f64,
    pub subdivisions: usize,
}

/// Integrate f over (lower, inf) under `spec`.
pub fn integrate_semi_infinite<F>(f: F, lower: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    if !lower.is_finite() {
        return Err(Error::domain(
            "integrate_semi_infinite",
            "lower limit must be finite",
        ));
    }
    let sigma = spec.endpoint_singularity_order;
    let p = 1.0 / (1.0 - sigma);

    // t in (0,1) -> x in (lower, inf); all K15 nodes are interior so the
    // endpoints are never evaluated.
    let transformed = |t: f64| -> f64 {
        let omt = 1.0 - t;
        let u = t / omt;
        let x = lower + u.powf(p);
        let fx = f(x);
        if fx == 0.0 {
            return 0.0; // avoid 0 * inf from the Jacobian at the far edge
        }
        let jac = p * u.powf(p - 1.0) / (omt * omt);
        fx * jac
    };

    adaptive_gk(&transformed, 0.0, 1.0, spec)
}

/// Adaptive bisection with the G7/K15 pair on a finite interval.
fn adaptive_gk<F>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    struct Seg {
        a: f64,
        b: f64,
        value: f64,
        error: f64,
    }

    let (value, error) = gk15(f, a, b);
    let mut segs = vec![Seg { a, b, value, error }];
    let mut total_value = value;
    let mut total_error = error;

    loop {
        if total_error <= spec.abs_tol.max(spec.rel_tol * total_value.abs()) {
            return Ok(QuadResult {
                value: total_value,
                error_bound: total_error,
                subdivisions: segs.len(),
            });
        }
        if segs.len() >= spec.max_subdivisions {
            return Err(Error::Convergence {
                estimate: total_value,
                error_bound: total_error,
                subdivisions: segs.len(),
            });
        }
        // split the interval with the worst error estimate
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let seg = segs.swap_remove(worst);
        total_value -= seg.value;
        total_error -= seg.error;

        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval narrowed to machine resolution and still not converged
            return Err(Error::Convergence {
                estimate: total_value + seg.value,
                error_bound: total_error + seg.error,
                subdivisions: segs.len() + 1,
            });
        }
        for (lo, hi) in [(seg.a, mid), (mid, seg.b)] {
            let (v, e) = gk15(f, lo, hi);
            total_value += v;
            total_error += e;
            segs.push(Seg {
                a: lo,
                b: hi,
                value: v,
                error: e,
            });
        }
    }
}

// 15-point Kronrod abscissae on [-1, 1] (positive half) and weights, with
// the embedded 7-point Gauss weights; QUADPACK values.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

fn gk15<F>(f: &F, a: f64, b: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut fv = [0.0f64; 15];
    fv[7] = fc;

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let value = kronrod * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let err = rescale_error((kronrod - gauss) * half, resabs, resasc);
    (value, err)
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut scaled = err.abs();
    if resasc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / resasc).powf(1.5);
        scaled = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * resabs);
    }
    scaled
}
