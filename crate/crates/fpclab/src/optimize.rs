//! Search for the outage-minimizing exponent s*, robustness bands, and the
//! parameter sweeps behind the figure set.
//!
//! Analytic objectives are scanned on a grid and refined by golden-section
//! search. The simulated objective uses common random numbers (one master
//! seed shared by every grid point) and stops at grid resolution, since
//! sub-grid refinement would chase sampling noise.

use crate::analytic::{self, NetworkParams, PowerControlPolicy};
use crate::error::{Error, Result};
use crate::fading::FadingModel;
use crate::numerics::{find_root_increasing, minimize_unimodal};
use crate::simulate::{estimate_outage, SimConfig};

/// Which outage evaluator drives the optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Simulated,
    LowerBound,
    Jensen,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Simulated => "simulated",
            Method::LowerBound => "lower_bound",
            Method::Jensen => "jensen",
        }
    }
}

/// Objective description for [`optimal_exponent`] and friends.
#[derive(Debug, Clone)]
pub struct ObjectiveSpec {
    pub method: Method,
    pub s_lo: f64,
    pub s_hi: f64,
    pub grid_step: f64,
    /// Golden-section tolerance; analytic methods only.
    pub refine_tol: f64,
    /// Trials per grid point for the simulated method.
    pub sim_trials: u64,
    /// Master seed shared across grid points (common random numbers).
    pub master_seed: u64,
    pub truncation_rel_tol: f64,
}

impl ObjectiveSpec {
    pub fn new(method: Method) -> Self {
        ObjectiveSpec {
            method,
            s_lo: -0.25,
            s_hi: 0.95,
            grid_step: 0.01,
            refine_tol: 1e-4,
            sim_trials: 200_000,
            master_seed: 0,
            truncation_rel_tol: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s_lo < self.s_hi)
            || !(-0.5..=1.0).contains(&self.s_lo)
            || !(-0.5..=1.0).contains(&self.s_hi)
        {
            return Err(Error::Validation(format!(
                "s_range must satisfy -0.5 <= lo < hi <= 1, got [{}, {}]",
                self.s_lo, self.s_hi
            )));
        }
        if !(self.grid_step > 0.0) {
            return Err(Error::Validation("grid_step must be positive".into()));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::Validation("refine_tol must be positive".into()));
        }
        Ok(())
    }

    /// Evaluate the objective at one exponent: (outage, evaluation noise).
    fn evaluate(&self, s: f64, params: &NetworkParams, fading: &FadingModel) -> Result<(f64, f64)> {
        let policy = PowerControlPolicy::new(s, fading.clone())?;
        match self.method {
            Method::Simulated => {
                let mut cfg = SimConfig::new(params.clone(), policy);
                cfg.n_trials = self.sim_trials;
                cfg.master_seed = self.master_seed;
                cfg.truncation_rel_tol = self.truncation_rel_tol;
                let est = estimate_outage(&cfg)?;
                Ok((est.p_hat, est.std_err))
            }
            Method::LowerBound => {
                let b = analytic::outage_lb_fpc(&policy, params)?;
                Ok((b.value, b.quadrature_error))
            }
            Method::Jensen => {
                let b = analytic::outage_jensen_fpc(&policy, params)?;
                Ok((b.value, b.quadrature_error))
            }
        }
    }
}

/// Result of the exponent search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalExponent {
    pub s_star: f64,
    pub q_star: f64,
    /// The objective varied by less than twice the evaluation noise over the
    /// whole grid; s_star is then just the midpoint of the usable range.
    pub flat: bool,
    /// Range actually scanned after dropping edge cells whose moments
    /// diverge.
    pub range_used: (f64, f64),
    pub clipped: bool,
}

struct GridScan {
    points: Vec<(f64, f64, f64)>, // (s, q, noise)
    clipped: bool,
}

fn scan_grid(
    objective: &ObjectiveSpec,
    params: &NetworkParams,
    fading: &FadingModel,
) -> Result<GridScan> {
    objective.validate()?;
    let n_steps = ((objective.s_hi - objective.s_lo) / objective.grid_step).round() as usize;
    let n_steps = n_steps.max(1);
    let mut evals: Vec<(f64, Result<(f64, f64)>)> = Vec::with_capacity(n_steps + 1);
    for i in 0..=n_steps {
        let s = if i == n_steps {
            objective.s_hi
        } else {
            objective.s_lo + i as f64 * objective.grid_step
        };
        evals.push((s, objective.evaluate(s, params, fading)));
    }
    // divergent moments occur only toward the range edges; trim them
    let total = evals.len();
    let keep_from = evals.iter().position(|(_, r)| r.is_ok()).ok_or_else(|| {
        Error::Infeasible("objective not evaluable anywhere on the requested s range".into())
    })?;
    let keep_to = evals.iter().rposition(|(_, r)| r.is_ok()).unwrap();
    let clipped = keep_from > 0 || keep_to + 1 < total;
    let mut points = Vec::with_capacity(keep_to - keep_from + 1);
    for (s, r) in evals
        .drain(..)
        .skip(keep_from)
        .take(keep_to - keep_from + 1)
    {
        let (q, noise) = r?; // interior failures are real errors
        points.push((s, q, noise));
    }
    Ok(GridScan { points, clipped })
}

/// Locate the outage-minimizing exponent for the given objective.
pub fn optimal_exponent(
    objective: &ObjectiveSpec,
    params: &NetworkParams,
    fading: &FadingModel,
) -> Result<OptimalExponent> {
    let scan = scan_grid(objective, params, fading)?;
    optimum_from_scan(objective, params, fading, &scan)
}

fn optimum_from_scan(
    objective: &ObjectiveSpec,
    params: &NetworkParams,
    fading: &FadingModel,
    scan: &GridScan,
) -> Result<OptimalExponent> {
    let points = &scan.points;
    let lo = points.first().unwrap().0;
    let hi = points.last().unwrap().0;

    let q_min = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let q_max = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let noise = points.iter().map(|p| p.2).fold(0.0, f64::max);
    if q_max - q_min <= 2.0 * noise + 1e-14 * q_max.abs() {
        let mid = 0.5 * (lo + hi);
        let (q_mid, _) = objective.evaluate(mid, params, fading)?;
        return Ok(OptimalExponent {
            s_star: mid,
            q_star: q_mid,
            flat: true,
            range_used: (lo, hi),
            clipped: scan.clipped,
        });
    }

    let best = points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .unwrap();
    let (s_best, q_best, _) = points[best];

    if objective.method == Method::Simulated {
        // grid resolution is the noise floor; do not refine further
        return Ok(OptimalExponent {
            s_star: s_best,
            q_star: q_best,
            flat: false,
            range_used: (lo, hi),
            clipped: scan.clipped,
        });
    }

    let window_lo = if best == 0 { lo } else { points[best - 1].0 };
    let window_hi = if best + 1 == points.len() {
        hi
    } else {
        points[best + 1].0
    };
    let (s_star, q_star) = minimize_unimodal(
        |s| {
            objective
                .evaluate(s, params, fading)
                .map(|(q, _)| q)
                .unwrap_or(f64::NAN)
        },
        window_lo,
        window_hi,
        objective.refine_tol,
    )?;
    Ok(OptimalExponent {
        s_star,
        q_star,
        flat: false,
        range_used: (lo, hi),
        clipped: scan.clipped,
    })
}

/// Exponent band within a relative outage penalty of the optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessBand {
    pub s_star: f64,
    pub q_star: f64,
    pub s_lo: f64,
    pub s_hi: f64,
    pub delta_pct: f64,
    /// Band endpoints clipped at the scanned range rather than found by a
    /// threshold crossing.
    pub clipped_lo: bool,
    pub clipped_hi: bool,
}

/// Exponents whose outage stays within `delta_pct` percent of the optimum.
pub fn robustness_band(
    objective: &ObjectiveSpec,
    params: &NetworkParams,
    fading: &FadingModel,
    delta_pct: f64,
) -> Result<RobustnessBand> {
    let (_, mut bands) = optimal_with_bands(objective, params, fading, &[delta_pct])?;
    Ok(bands.remove(0))
}

/// One grid scan shared by the optimum and any number of bands.
pub fn optimal_with_bands(
    objective: &ObjectiveSpec,
    params: &NetworkParams,
    fading: &FadingModel,
    deltas_pct: &[f64],
) -> Result<(OptimalExponent, Vec<RobustnessBand>)> {
    let scan = scan_grid(objective, params, fading)?;
    let opt = optimum_from_scan(objective, params, fading, &scan)?;
    let mut bands = Vec::with_capacity(deltas_pct.len());
    for &delta_pct in deltas_pct {
        if !(delta_pct >= 0.0) {
            return Err(Error::Validation(format!(
                "delta_pct must be >= 0, got {delta_pct}"
            )));
        }
        bands.push(band_from_scan(
            objective, params, fading, &scan, &opt, delta_pct,
        )?);
    }
    Ok((opt, bands))
}

fn band_from_scan(
    objective: &ObjectiveSpec,
    params: &NetworkParams,
    fading: &FadingModel,
    scan: &GridScan,
    opt: &OptimalExponent,
    delta_pct: f64,
) -> Result<RobustnessBand> {
    let degenerate = RobustnessBand {
        s_star: opt.s_star,
        q_star: opt.q_star,
        s_lo: opt.s_star,
        s_hi: opt.s_star,
        delta_pct,
        clipped_lo: false,
        clipped_hi: false,
    };
    if delta_pct == 0.0 || opt.flat {
        let (lo, hi) = opt.range_used;
        // a flat objective is indifferent over the whole range
        return Ok(if opt.flat {
            RobustnessBand {
                s_lo: lo,
                s_hi: hi,
                clipped_lo: true,
                clipped_hi: true,
                ..degenerate
            }
        } else {
            degenerate
        });
    }

    let threshold = opt.q_star * (1.0 + delta_pct / 100.0);
    let (range_lo, range_hi) = opt.range_used;
    let points = &scan.points;

    if objective.method == Method::Simulated {
        // outward scan on the common-random-number grid, linear interpolation
        // at the crossing
        let crossing = |side: &[(f64, f64, f64)], rising: bool| -> (f64, bool) {
            // side is ordered moving away from s*; find the first point above
            let mut prev = (opt.s_star, opt.q_star);
            for &(s, q, _) in side {
                if q > threshold {
                    let t = if q > prev.1 {
                        (threshold - prev.1) / (q - prev.1)
                    } else {
                        1.0
                    };
                    let x = prev.0 + t * (s - prev.0);
                    return (x, false);
                }
                prev = (s, q);
            }
            (if rising { range_hi } else { range_lo }, true)
        };
        let idx = points
            .iter()
            .position(|p| p.0 >= opt.s_star)
            .unwrap_or(points.len() - 1);
        let right: Vec<_> = points[idx..].to_vec();
        let mut left: Vec<_> = points[..idx].to_vec();
        left.reverse();
        let (s_hi, clipped_hi) = crossing(&right, true);
        let (s_lo, clipped_lo) = crossing(&left, false);
        return Ok(RobustnessBand {
            s_lo,
            s_hi,
            clipped_lo,
            clipped_hi,
            ..degenerate
        });
    }

    let eval = |s: f64| -> f64 {
        objective
            .evaluate(s, params, fading)
            .map(|(q, _)| q)
            .unwrap_or(f64::NAN)
    };
    // right endpoint: q increases away from the optimum
    let (s_hi, clipped_hi) = if eval(range_hi) <= threshold {
        (range_hi, true)
    } else {
        (
            find_root_increasing(
                |s| eval(s) - threshold,
                opt.s_star,
                range_hi,
                objective.refine_tol,
            )?,
            false,
        )
    };
    let (s_lo, clipped_lo) = if eval(range_lo) <= threshold {
        (range_lo, true)
    } else {
        let t = find_root_increasing(
            |t| eval(opt.s_star - t) - threshold,
            0.0,
            opt.s_star - range_lo,
            objective.refine_tol,
        )?;
        (opt.s_star - t, false)
    };
    Ok(RobustnessBand {
        s_lo,
        s_hi,
        clipped_lo,
        clipped_hi,
        ..degenerate
    })
}

/// Numeric witness for the convexity/symmetry structure of
/// h(s) = E[H^{-s d}] E[H^{-(1-s) d}].
#[derive(Debug, Clone)]
pub struct ConvexityReport {
    pub grid: Vec<(f64, f64)>,
    pub midpoint_violations: usize,
    pub symmetry_residual: f64,
    pub derivative_at_half: f64,
}

/// Evaluate h(s) on a grid and report midpoint-convexity violations, the
/// s <-> 1-s symmetry residual and the central-difference derivative at 1/2.
pub fn convexity_witness(
    fading: &FadingModel,
    delta: f64,
    grid: &[f64],
) -> Result<ConvexityReport> {
    let h = |s: f64| -> Result<f64> {
        Ok(fading.fractional_moment(-s * delta)? * fading.fractional_moment(-(1.0 - s) * delta)?)
    };
    let mut values = Vec::with_capacity(grid.len());
    for &s in grid {
        values.push((s, h(s)?));
    }

    let scale = values.iter().map(|v| v.1).fold(0.0, f64::max);
    let tol = 1e-9 * scale;
    let mut violations = 0;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let (s1, h1) = values[i];
            let (s2, h2) = values[j];
            let hm = h(0.5 * (s1 + s2))?;
            if hm > 0.5 * (h1 + h2) + tol {
                violations += 1;
            }
        }
    }

    let mut symmetry_residual = 0.0f64;
    for &(s, hs) in &values {
        symmetry_residual = symmetry_residual.max((hs - h(1.0 - s)?).abs());
    }

    let eps = 1e-4;
    let derivative_at_half = (h(0.5 + eps)? - h(0.5 - eps)?) / (2.0 * eps);

    Ok(ConvexityReport {
        grid: values,
        midpoint_violations: violations,
        symmetry_residual,
        derivative_at_half,
    })
}

/// Families of parameter sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Outage (simulated, lower bound, Jensen) against the exponent s.
    VsS,
    /// Optimal s and robustness bands against the pathloss exponent.
    VsAlpha,
    /// ... against the interference-free SNR (linear).
    VsSnr,
    /// ... against the SINR threshold beta (linear).
    VsBeta,
    /// ... against the transmitter density.
    VsLambda,
    /// Loss factor L(s) per pathloss exponent.
    LossCurve,
}

impl SweepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepKind::VsS => "vs_s",
            SweepKind::VsAlpha => "vs_alpha",
            SweepKind::VsSnr => "vs_snr",
            SweepKind::VsBeta => "vs_beta",
            SweepKind::VsLambda => "vs_lambda",
            SweepKind::LossCurve => "loss_curve",
        }
    }

    pub fn swept_param(&self) -> &'static str {
        match self {
            SweepKind::VsS => "s",
            SweepKind::VsAlpha => "alpha",
            SweepKind::VsSnr => "snr",
            SweepKind::VsBeta => "beta",
            SweepKind::VsLambda => "lambda",
            SweepKind::LossCurve => "alpha",
        }
    }
}

/// Sweep description: the swept values plus everything the evaluators need.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub kind: SweepKind,
    /// Values of the swept parameter, ascending.
    pub values: Vec<f64>,
    /// Exponent grid for `VsS` and `LossCurve`.
    pub s_values: Vec<f64>,
    pub objective: ObjectiveSpec,
    /// Run the Monte-Carlo column of `VsS` (analytic columns always run).
    pub simulate: bool,
}

/// One row per evaluated cell; failures stay in-row so a sweep never dies
/// half way.
#[derive(Debug, Clone)]
pub enum SweepRow {
    Curve {
        s: f64,
        q_sim: Option<f64>,
        std_err: Option<f64>,
        q_lb: Option<f64>,
        q_lb_err: Option<f64>,
        q_jensen: Option<f64>,
        q_jensen_err: Option<f64>,
        error: Option<String>,
    },
    Loss {
        alpha: f64,
        s: f64,
        loss_factor: Option<f64>,
        error: Option<String>,
    },
    Optimal {
        value: f64,
        s_star: Option<f64>,
        q_star: Option<f64>,
        s_lo_1: Option<f64>,
        s_hi_1: Option<f64>,
        s_lo_10: Option<f64>,
        s_hi_10: Option<f64>,
        error: Option<String>,
    },
}

impl SweepRow {
    pub fn error(&self) -> Option<&str> {
        match self {
            SweepRow::Curve { error, .. }
            | SweepRow::Loss { error, .. }
            | SweepRow::Optimal { error, .. } => error.as_deref(),
        }
    }
}

/// A completed sweep: the figure data carrier.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub swept_param: &'static str,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn error_count(&self) -> usize {
        self.rows.iter().filter(|r| r.error().is_some()).count()
    }
}

/// Run a sweep. Cells that fail record their error and the sweep continues.
pub fn sweep(spec: &SweepSpec, params: &NetworkParams, fading: &FadingModel) -> SweepResult {
    let mut values = spec.values.clone();
    values.sort_by(f64::total_cmp);
    let rows = match spec.kind {
        SweepKind::VsS => sweep_vs_s(spec, params, fading),
        SweepKind::LossCurve => sweep_loss_curve(spec, &values, fading),
        _ => sweep_optimal(spec, &values, params, fading),
    };
    SweepResult {
        kind: spec.kind,
        swept_param: spec.kind.swept_param(),
        rows,
    }
}

fn sweep_vs_s(spec: &SweepSpec, params: &NetworkParams, fading: &FadingModel) -> Vec<SweepRow> {
    let mut s_values = if spec.s_values.is_empty() {
        spec.values.clone()
    } else {
        spec.s_values.clone()
    };
    s_values.sort_by(f64::total_cmp);
    s_values
        .iter()
        .map(|&s| {
            let mut error: Option<String> = None;
            let mut record = |e: Error| {
                if error.is_none() {
                    error = Some(e.to_string());
                }
            };

            let policy = match PowerControlPolicy::new(s, fading.clone()) {
                Ok(p) => Some(p),
                Err(e) => {
                    record(e);
                    None
                }
            };
            let mut q_lb = None;
            let mut q_lb_err = None;
            let mut q_jensen = None;
            let mut q_jensen_err = None;
            let mut q_sim = None;
            let mut std_err = None;
            if let Some(policy) = policy {
                match analytic::outage_lb_fpc(&policy, params) {
                    Ok(b) => {
                        q_lb = Some(b.value);
                        q_lb_err = Some(b.quadrature_error);
                    }
                    Err(e) => {
                        record(e);
                    }
                }
                match analytic::outage_jensen_fpc(&policy, params) {
                    Ok(b) => {
                        q_jensen = Some(b.value);
                        q_jensen_err = Some(b.quadrature_error);
                    }
                    Err(e) => {
                        record(e);
                    }
                }
                if spec.simulate {
                    let mut cfg = SimConfig::new(params.clone(), policy);
                    cfg.n_trials = spec.objective.sim_trials;
                    cfg.master_seed = spec.objective.master_seed;
                    cfg.truncation_rel_tol = spec.objective.truncation_rel_tol;
                    match estimate_outage(&cfg) {
                        Ok(est) => {
                            q_sim = Some(est.p_hat);
                            std_err = Some(est.std_err);
                        }
                        Err(e) => {
                            record(e);
                        }
                    }
                }
            }
            SweepRow::Curve {
                s,
                q_sim,
                std_err,
                q_lb,
                q_lb_err,
                q_jensen,
                q_jensen_err,
                error,
            }
        })
        .collect()
}

fn sweep_loss_curve(spec: &SweepSpec, alphas: &[f64], fading: &FadingModel) -> Vec<SweepRow> {
    let mut s_values = spec.s_values.clone();
    s_values.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    for &alpha in alphas {
        let delta = 2.0 / alpha;
        for &s in &s_values {
            let (loss_factor, error) = match analytic::loss_factor_fpc(s, fading, delta) {
                Ok(l) => (Some(l), None),
                Err(e) => (None, Some(e.to_string())),
            };
            rows.push(SweepRow::Loss {
                alpha,
                s,
                loss_factor,
                error,
            });
        }
    }
    rows
}

fn sweep_optimal(
    spec: &SweepSpec,
    values: &[f64],
    base: &NetworkParams,
    fading: &FadingModel,
) -> Vec<SweepRow> {
    values
        .iter()
        .map(|&value| {
            let params = match apply_swept_value(spec.kind, base, value) {
                Ok(p) => p,
                Err(e) => {
                    return SweepRow::Optimal {
                        value,
                        s_star: None,
                        q_star: None,
                        s_lo_1: None,
                        s_hi_1: None,
                        s_lo_10: None,
                        s_hi_10: None,
                        error: Some(e.to_string()),
                    }
                }
            };
            match optimal_with_bands(&spec.objective, &params, fading, &[1.0, 10.0]) {
                Ok((opt, bands)) => SweepRow::Optimal {
                    value,
                    s_star: Some(opt.s_star),
                    q_star: Some(opt.q_star),
                    s_lo_1: Some(bands[0].s_lo),
                    s_hi_1: Some(bands[0].s_hi),
                    s_lo_10: Some(bands[1].s_lo),
                    s_hi_10: Some(bands[1].s_hi),
                    error: None,
                },
                Err(e) => SweepRow::Optimal {
                    value,
                    s_star: None,
                    q_star: None,
                    s_lo_1: None,
                    s_hi_1: None,
                    s_lo_10: None,
                    s_hi_10: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

fn apply_swept_value(kind: SweepKind, base: &NetworkParams, value: f64) -> Result<NetworkParams> {
    match kind {
        SweepKind::VsAlpha => {
            NetworkParams::new(value, base.beta, base.d, base.p, base.eta, base.lambda)
        }
        SweepKind::VsSnr => {
            if !(value > 0.0) {
                return Err(Error::Validation(format!(
                    "snr must be positive, got {value}"
                )));
            }
            // hold p fixed, set the noise level to realize the target SNR
            let eta = base.p * base.d.powf(-base.alpha) / value;
            NetworkParams::new(base.alpha, base.beta, base.d, base.p, eta, base.lambda)
        }
        SweepKind::VsBeta => {
            NetworkParams::new(base.alpha, value, base.d, base.p, base.eta, base.lambda)
        }
        SweepKind::VsLambda => {
            NetworkParams::new(base.alpha, base.beta, base.d, base.p, base.eta, value)
        }
        SweepKind::VsS | SweepKind::LossCurve => Ok(base.clone()),
    }
}

/// Inclusive f64 range with a fixed step.
pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    let mut out: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
    out.push(hi);
    out
}
