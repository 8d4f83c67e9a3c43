//! Closed-form and quadrature outage bounds, Jensen approximations, density
//! inversions, loss factors and transmission capacity.
//!
//! The dominant-interferer argument gives a lower bound on outage of the form
//! 1 - E[exp(-c (H^{1-s}/beta - E[H^-s]/SNR)^{-delta}) | H >= kappa(s)];
//! replacing E[exp(-X)] by exp(-E[X]) gives the closed-form Jensen
//! approximation. Both are evaluated here, together with their constant-power
//! (s = 0), channel-inversion (s = 1) and pure-pathloss specializations.
//!
//! The noise-free case is a distinct code path using the simplified closed
//! forms rather than a limit of the conditioned quadrature.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fading::FadingModel;
use crate::numerics::{integrate_semi_infinite, QuadratureSpec};

/// Network-level parameters of the SINR model.
///
/// `eta = 0` selects the noise-free (interference-limited) branch; `snr()`
/// is then infinite and `inv_snr()` zero.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub alpha: f64,
    pub beta: f64,
    pub d: f64,
    pub p: f64,
    pub eta: f64,
    pub lambda: f64,
}

impl NetworkParams {
    pub fn new(alpha: f64, beta: f64, d: f64, p: f64, eta: f64, lambda: f64) -> Result<Self> {
        if !(alpha > 2.0) || !alpha.is_finite() {
            return Err(Error::Validation(format!(
                "alpha must exceed 2, got {alpha}"
            )));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Validation(format!(
                "beta must be a positive real, got {beta}"
            )));
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Validation(format!(
                "d must be a positive real, got {d}"
            )));
        }
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::Validation(format!(
                "p must be a positive real, got {p}"
            )));
        }
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::Validation(format!(
                "eta must be finite and >= 0, got {eta}"
            )));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Validation(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        Ok(NetworkParams {
            alpha,
            beta,
            d,
            p,
            eta,
            lambda,
        })
    }

    /// Defaults used throughout: alpha 3, beta 1 (0 dB), d 10 m, SNR 20 dB,
    /// lambda 1e-4 users/m^2.
    pub fn defaults() -> Self {
        NetworkParams {
            alpha: 3.0,
            beta: 1.0,
            d: 10.0,
            p: 1.0,
            eta: 1e-5,
            lambda: 1e-4,
        }
    }

    /// Stability exponent delta = 2/alpha in (0, 1).
    pub fn delta(&self) -> f64 {
        2.0 / self.alpha
    }

    /// Interference-free SNR p d^-alpha / eta; infinite when eta = 0.
    pub fn snr(&self) -> f64 {
        if self.eta == 0.0 {
            f64::INFINITY
        } else {
            self.p * self.d.powf(-self.alpha) / self.eta
        }
    }

    /// 1/SNR, exactly zero in the noise-free branch.
    pub fn inv_snr(&self) -> f64 {
        if self.eta == 0.0 {
            0.0
        } else {
            self.eta * self.d.powf(self.alpha) / self.p
        }
    }

    /// lambda pi d^2, the relative density that scales every exponent.
    fn rel_density(&self) -> f64 {
        self.lambda * PI * self.d * self.d
    }

    /// Whether an inversion-type policy with the given normalizer E[H^-s]
    /// leaves a positive interference margin: SNR / E[H^-s] > beta.
    pub fn inversion_feasible(&self, normalizer: f64) -> bool {
        1.0 / self.beta - normalizer * self.inv_snr() > 0.0
    }
}

/// Fractional power control policy: transmit power p H^{-s} / E[H^{-s}].
///
/// `s` in [-0.5, 1]; 0 is constant power, 1 is channel inversion, negative
/// values are the "greedy" extension. The normalizer E[H^-s] is evaluated
/// lazily: it only enters the noisy-branch formulas and the simulator, and
/// the noise-free analytics at s = 1 are well defined even where E[H^-1]
/// diverges (the normalization cancels from the SIR).
#[derive(Debug, Clone, PartialEq)]
pub struct PowerControlPolicy {
    s: f64,
    fading: FadingModel,
}

impl PowerControlPolicy {
    pub fn new(s: f64, fading: FadingModel) -> Result<Self> {
        if !s.is_finite() || !(-0.5..=1.0).contains(&s) {
            return Err(Error::Validation(format!(
                "power-control exponent s must lie in [-0.5, 1], got {s}"
            )));
        }
        Ok(PowerControlPolicy { s, fading })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn fading(&self) -> &FadingModel {
        &self.fading
    }

    /// E[H^-s]; errors when the moment diverges (Rayleigh at s = 1).
    pub fn normalizer(&self) -> Result<f64> {
        self.fading.power_normalizer(self.s)
    }
}

/// How a `BoundResult` value should be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Dominant-interferer lower bound on the true outage probability.
    LowerBound,
    /// Jensen closed form: an approximation, not a bound on the true outage.
    JensenApprox,
    /// Exact value (degenerate cases: no interferers, or outage certain).
    ExactFormula,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::LowerBound => "lower_bound",
            Method::JensenApprox => "jensen_approx",
            Method::ExactFormula => "exact_formula",
        }
    }
}

/// A probability (or density) with its evaluation pedigree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    pub value: f64,
    pub method: Method,
    /// Error bound of any quadrature involved; 0 for closed forms.
    pub quadrature_error: f64,
}

impl BoundResult {
    fn exact(value: f64) -> Self {
        BoundResult {
            value,
            method: Method::ExactFormula,
            quadrature_error: 0.0,
        }
    }
}

// Tolerances for the outage integrals. Tighter than the general-purpose
// default so that bound comparisons at the 1e-8 level stay meaningful.
fn analytic_quad_spec(singularity: f64) -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: 1e-10,
        abs_tol: 1e-13,
        max_subdivisions: 2000,
        endpoint_singularity_order: singularity,
    }
}

/// Tail lower bound for marked Poisson shot noise:
/// P(sum Z_i X_i^-alpha > y) >= 1 - exp(-pi lambda E[Z^delta] y^-delta).
pub fn shot_noise_tail_lb(lambda: f64, ez_delta: f64, y: f64, delta: f64) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::domain(
            "shot_noise_tail_lb",
            format!("y must be positive, got {y}"),
        ));
    }
    if !(lambda >= 0.0) || !ez_delta.is_finite() || !(0.0..1.0).contains(&delta) {
        return Err(Error::domain(
            "shot_noise_tail_lb",
            "bad lambda, E[Z^delta] or delta",
        ));
    }
    Ok(-(-PI * lambda * ez_delta * y.powf(-delta)).exp_m1())
}

/// Pure-pathloss outage lower bound (noise included). Returns 1 when the
/// interference-free SNR cannot reach beta.
pub fn outage_lb_pathloss(params: &NetworkParams) -> f64 {
    let snr = params.snr();
    if snr < params.beta {
        return 1.0;
    }
    if snr == params.beta {
        // exactly at threshold: any interference at all causes outage
        return if params.lambda > 0.0 { 1.0 } else { 0.0 };
    }
    if params.lambda == 0.0 {
        return 0.0;
    }
    let margin = 1.0 / params.beta - params.inv_snr();
    -(-params.rel_density() * margin.powf(-params.delta())).exp_m1()
}

/// Closed-form inverse of [`outage_lb_pathloss`]: the density at which the
/// pathloss bound equals `epsilon`.
pub fn density_ub_pathloss(params: &NetworkParams, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let margin = 1.0 / params.beta - params.inv_snr();
    if margin <= 0.0 {
        return Err(Error::Infeasible(format!(
            "pathloss density inversion requires SNR > beta (snr {}, beta {})",
            params.snr(),
            params.beta
        )));
    }
    Ok(-(1.0 - epsilon).ln() / (PI * params.d * params.d) * margin.powf(params.delta()))
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(
            "density inversion",
            format!("epsilon must lie in (0,1), got {epsilon}"),
        ));
    }
    Ok(())
}

/// Signal-fade threshold kappa(s) = (beta E[H^-s] / SNR)^{1/(1-s)}:
/// below it, outage is certain from noise alone. Zero in the noise-free
/// branch. Defined for s < 1; for s = 1 the conditioning is handled by the
/// channel-inversion branch.
pub fn kappa(policy: &PowerControlPolicy, params: &NetworkParams) -> Result<f64> {
    if policy.s() >= 1.0 {
        return Err(Error::domain("kappa", "kappa(s) is defined for s < 1"));
    }
    if params.inv_snr() == 0.0 {
        return Ok(0.0);
    }
    let norm = policy.normalizer()?;
    Ok((params.beta * norm * params.inv_snr()).powf(1.0 / (1.0 - policy.s())))
}

// Interference moments shared by the FPC expressions.
struct FpcMoments {
    e_h_delta: f64,       // E[H^delta]
    e_h_neg_s_delta: f64, // E[H^{-s delta}]
}

fn fpc_moments(fading: &FadingModel, s: f64, delta: f64) -> Result<FpcMoments> {
    Ok(FpcMoments {
        e_h_delta: fading.fractional_moment(delta)?,
        e_h_neg_s_delta: fading.fractional_moment(-s * delta)?,
    })
}

/// E[g(margin(H)) 1{H >= kappa}] where margin(h) = h^{1-s}/beta - k and
/// kappa = (beta k)^{1/(1-s)}. `g` receives the margin; `singularity` is its
/// power-law order as the margin vanishes.
///
/// The continuous part is integrated in the offset w = h^{1-s} - beta k, so
/// the singular point sits exactly at the lower limit of the quadrature and
/// the margin w/beta never suffers cancellation.
fn conditioned_expectation<G>(
    fading: &FadingModel,
    s: f64,
    beta: f64,
    k: f64,
    g: G,
    singularity: f64,
) -> Result<(f64, f64)>
where
    G: Fn(f64) -> f64,
{
    let u0 = beta * k;
    let kap = u0.powf(1.0 / (1.0 - s));
    let inv_beta = 1.0 / beta;
    let mut total = 0.0;
    let mut qerr = 0.0;

    if let Some((loc, mass)) = fading.atom() {
        if loc >= kap {
            let gu = g(loc.powf(1.0 - s) * inv_beta - k);
            if gu != 0.0 {
                total += mass * gu;
            }
        }
    }

    let support_lo = fading.pdf_support_lower();
    if support_lo.is_finite() {
        let pp = 1.0 / (1.0 - s);
        if support_lo <= kap {
            // conditioning boundary inside the support: singular endpoint
            let spec = analytic_quad_spec(singularity);
            let integrand = |w: f64| -> f64 {
                let u = u0 + w;
                let h = u.powf(pp);
                let density = fading.pdf(h);
                if density == 0.0 {
                    return 0.0;
                }
                let gu = g(w * inv_beta);
                if gu == 0.0 {
                    return 0.0;
                }
                gu * density * pp * u.powf(pp - 1.0)
            };
            let r = integrate_semi_infinite(integrand, 0.0, &spec)?;
            total += r.value;
            qerr += r.error_bound;
        } else {
            // support floor above kappa: margins bounded away from zero
            let base_u = support_lo.powf(1.0 - s);
            let b0 = base_u - u0;
            let spec = analytic_quad_spec(0.0);
            let integrand = |w: f64| -> f64 {
                let u = base_u + w;
                let h = u.powf(pp);
                let density = fading.pdf(h);
                if density == 0.0 {
                    return 0.0;
                }
                let gu = g((b0 + w) * inv_beta);
                if gu == 0.0 {
                    return 0.0;
                }
                gu * density * pp * u.powf(pp - 1.0)
            };
            let r = integrate_semi_infinite(integrand, 0.0, &spec)?;
            total += r.value;
            qerr += r.error_bound;
        }
    }

    Ok((total, qerr))
}

/// E[g(H)] over the full support (noise-free branch), in the original
/// variable h.
fn full_expectation<G>(fading: &FadingModel, g: G) -> Result<(f64, f64)>
where
    G: Fn(f64) -> f64,
{
    let mut total = 0.0;
    let mut qerr = 0.0;
    if let Some((loc, mass)) = fading.atom() {
        total += mass * g(loc);
    }
    let support_lo = fading.pdf_support_lower();
    if support_lo.is_finite() {
        let spec = analytic_quad_spec(0.0);
        let integrand = |h: f64| -> f64 {
            let density = fading.pdf(h);
            if density == 0.0 {
                return 0.0;
            }
            let gh = g(h);
            if gh == 0.0 {
                return 0.0;
            }
            gh * density
        };
        let r = integrate_semi_infinite(integrand, support_lo, &spec)?;
        total += r.value;
        qerr += r.error_bound;
    }
    Ok((total, qerr))
}

/// Dominant-interferer lower bound on the FPC outage probability.
///
/// s = 0 coincides with the constant-power bound, s = 1 dispatches to the
/// channel-inversion closed form, and eta = 0 uses the simplified noise-free
/// expression.
pub fn outage_lb_fpc(policy: &PowerControlPolicy, params: &NetworkParams) -> Result<BoundResult> {
    let s = policy.s();
    let delta = params.delta();
    let fading = policy.fading();

    if s >= 1.0 {
        return outage_lb_ci(params, fading);
    }

    if params.inv_snr() == 0.0 {
        // 1 - E[exp(-lambda pi d^2 beta^d E[H^d] E[H^{-sd}] H^{-(1-s)d})]
        if params.lambda == 0.0 {
            return Ok(BoundResult::exact(0.0));
        }
        let m = fpc_moments(fading, s, delta)?;
        let a = params.rel_density() * params.beta.powf(delta) * m.e_h_delta * m.e_h_neg_s_delta;
        let expo = (1.0 - s) * delta;
        let (ev, qerr) = full_expectation(fading, |h| (-a * h.powf(-expo)).exp())?;
        return Ok(BoundResult {
            value: (1.0 - ev).clamp(0.0, 1.0),
            method: Method::LowerBound,
            quadrature_error: qerr,
        });
    }

    let norm = policy.normalizer()?;
    let k = norm * params.inv_snr();
    let kap = (params.beta * k).powf(1.0 / (1.0 - s));

    if params.lambda == 0.0 {
        // no interferers: outage exactly when the signal fade is below kappa
        return Ok(BoundResult::exact(1.0 - fading.tail_prob(kap)));
    }
    if fading.tail_prob(kap) == 0.0 {
        // the power cost of this exponent pushes the fade threshold beyond
        // the support: outage certain
        return Ok(BoundResult::exact(1.0));
    }

    let m = fpc_moments(fading, s, delta)?;
    let c = params.rel_density() * m.e_h_neg_s_delta * m.e_h_delta;
    let g = |margin: f64| -> f64 {
        if margin <= 0.0 {
            return 0.0; // exp(-inf)
        }
        (-c * margin.powf(-delta)).exp()
    };
    let (ev, qerr) = conditioned_expectation(fading, s, params.beta, k, g, 0.0)?;
    Ok(BoundResult {
        value: (1.0 - ev).clamp(0.0, 1.0),
        method: Method::LowerBound,
        quadrature_error: qerr,
    })
}

/// Conditional moment E[(H^{1-s}/beta - E[H^-s]/SNR)^{-delta} | H >= kappa]
/// together with P(H >= kappa). Requires s < 1 and eta > 0.
fn fpc_conditional_moment(
    policy: &PowerControlPolicy,
    params: &NetworkParams,
) -> Result<(f64, f64, f64)> {
    let s = policy.s();
    let delta = params.delta();
    let fading = policy.fading();
    let norm = policy.normalizer()?;
    let k = norm * params.inv_snr();
    let kap = (params.beta * k).powf(1.0 / (1.0 - s));
    let p_tail = fading.tail_prob(kap);

    let g = |margin: f64| -> f64 {
        if margin <= 0.0 {
            return f64::INFINITY;
        }
        margin.powf(-delta)
    };
    let (raw, qerr) = conditioned_expectation(fading, s, params.beta, k, g, delta)?;
    Ok((raw / p_tail, p_tail, qerr))
}

/// Jensen approximation of the FPC outage probability.
pub fn outage_jensen_fpc(
    policy: &PowerControlPolicy,
    params: &NetworkParams,
) -> Result<BoundResult> {
    let s = policy.s();
    let delta = params.delta();
    let fading = policy.fading();

    if s >= 1.0 {
        // P0 H00 is deterministic under inversion, so Jensen is exact there
        let ci = outage_lb_ci(params, fading)?;
        return Ok(BoundResult {
            method: Method::JensenApprox,
            ..ci
        });
    }

    if params.inv_snr() == 0.0 {
        if params.lambda == 0.0 {
            return Ok(BoundResult::exact(0.0));
        }
        let m = fpc_moments(fading, s, delta)?;
        let e_tail = fading.fractional_moment(-(1.0 - s) * delta)?;
        let a = params.rel_density() * params.beta.powf(delta) * m.e_h_delta * m.e_h_neg_s_delta;
        return Ok(BoundResult {
            value: (-(-a * e_tail).exp_m1()).clamp(0.0, 1.0),
            method: Method::JensenApprox,
            quadrature_error: 0.0,
        });
    }

    if params.lambda == 0.0 {
        let kap = kappa(policy, params)?;
        return Ok(BoundResult::exact(1.0 - fading.tail_prob(kap)));
    }
    if fading.tail_prob(kappa(policy, params)?) == 0.0 {
        return Ok(BoundResult::exact(1.0));
    }

    let (cond_moment, p_tail, qerr) = fpc_conditional_moment(policy, params)?;
    let m = fpc_moments(fading, s, delta)?;
    let c = params.rel_density() * m.e_h_neg_s_delta * m.e_h_delta;
    let value = 1.0 - p_tail * (-c * cond_moment).exp();
    Ok(BoundResult {
        value: value.clamp(0.0, 1.0),
        method: Method::JensenApprox,
        quadrature_error: qerr,
    })
}

/// Constant-power outage lower bound: the FPC bound at s = 0.
pub fn outage_lb_cp(params: &NetworkParams, fading: &FadingModel) -> Result<BoundResult> {
    outage_lb_fpc(&PowerControlPolicy::new(0.0, fading.clone())?, params)
}

/// Constant-power Jensen approximation: the FPC approximation at s = 0.
pub fn outage_jensen_cp(params: &NetworkParams, fading: &FadingModel) -> Result<BoundResult> {
    outage_jensen_fpc(&PowerControlPolicy::new(0.0, fading.clone())?, params)
}

/// Channel-inversion outage lower bound (closed form, no quadrature):
/// 1 - exp(-lambda pi d^2 E[H^d] E[H^-d] (1/beta - E[H^-1]/SNR)^-d).
pub fn outage_lb_ci(params: &NetworkParams, fading: &FadingModel) -> Result<BoundResult> {
    let delta = params.delta();
    let e_h_d = fading.fractional_moment(delta)?;
    let e_h_nd = fading.fractional_moment(-delta)?;
    // E[H^-1] only matters when noise is present; evaluating it lazily keeps
    // the noise-free Rayleigh case (where it diverges but cancels) legal.
    let inv_term = if params.inv_snr() == 0.0 {
        0.0
    } else {
        fading.fractional_moment(-1.0)? * params.inv_snr()
    };
    let margin = 1.0 / params.beta - inv_term;
    if margin <= 0.0 {
        return Err(Error::Infeasible(format!(
            "channel inversion requires SNR/E[H^-1] > beta (snr {}, beta {})",
            params.snr(),
            params.beta
        )));
    }
    if params.lambda == 0.0 {
        return Ok(BoundResult::exact(0.0));
    }
    let c = params.rel_density() * e_h_d * e_h_nd * margin.powf(-delta);
    Ok(BoundResult {
        value: (-(-c).exp_m1()).clamp(0.0, 1.0),
        method: Method::LowerBound,
        quadrature_error: 0.0,
    })
}

/// Density at which the Jensen outage approximation equals `epsilon`
/// (transmission attempt intensity). Inverse of [`outage_jensen_fpc`].
pub fn density_fpc(
    policy: &PowerControlPolicy,
    params: &NetworkParams,
    epsilon: f64,
) -> Result<f64> {
    check_epsilon(epsilon)?;
    let s = policy.s();
    let delta = params.delta();
    let fading = policy.fading();
    let pi_d2 = PI * params.d * params.d;

    if s >= 1.0 {
        // invert the channel-inversion closed form
        let e_h_d = fading.fractional_moment(delta)?;
        let e_h_nd = fading.fractional_moment(-delta)?;
        let inv_term = if params.inv_snr() == 0.0 {
            0.0
        } else {
            fading.fractional_moment(-1.0)? * params.inv_snr()
        };
        let margin = 1.0 / params.beta - inv_term;
        if margin <= 0.0 {
            return Err(Error::Infeasible(
                "channel inversion density requires SNR/E[H^-1] > beta".into(),
            ));
        }
        return Ok(-(1.0 - epsilon).ln() / (pi_d2 * e_h_d * e_h_nd) * margin.powf(delta));
    }

    if params.inv_snr() == 0.0 {
        let m = fpc_moments(fading, s, delta)?;
        let e_tail = fading.fractional_moment(-(1.0 - s) * delta)?;
        let denom = params.beta.powf(delta) * m.e_h_delta * m.e_h_neg_s_delta * e_tail;
        return Ok(-(1.0 - epsilon).ln() / (pi_d2 * denom));
    }

    let fade_floor = 1.0 - fading.tail_prob(kappa(policy, params)?);
    if epsilon <= fade_floor {
        return Err(Error::Infeasible(format!(
            "target outage {epsilon} is below the pure-fading floor {fade_floor}: \
             unreachable at any density"
        )));
    }
    let (cond_moment, p_tail, _) = fpc_conditional_moment(policy, params)?;
    let m = fpc_moments(fading, s, delta)?;
    let log_term = -((1.0 - epsilon) / p_tail).ln();
    Ok(log_term / (pi_d2 * m.e_h_neg_s_delta * m.e_h_delta * cond_moment))
}

/// Transmission-capacity loss factor
/// L(s) = 1 / (E[H^d] E[H^{-s d}] E[H^{-(1-s) d}]); 1 for pure pathloss.
pub fn loss_factor_fpc(s: f64, fading: &FadingModel, delta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::domain(
            "loss_factor_fpc",
            format!("delta must be in (0,1), got {delta}"),
        ));
    }
    let e_h_d = fading.fractional_moment(delta)?;
    let e_m_sd = fading.fractional_moment(-s * delta)?;
    let e_m_1msd = fading.fractional_moment(-(1.0 - s) * delta)?;
    Ok(1.0 / (e_h_d * e_m_sd * e_m_1msd))
}

/// Transmission capacity c(eps) = density (1 - eps) b with the default
/// spectral efficiency b = log2(1 + beta).
pub fn transmission_capacity(params: &NetworkParams, epsilon: f64, density: f64) -> f64 {
    transmission_capacity_with_b(density, epsilon, (1.0 + params.beta).log2())
}

/// Transmission capacity with an explicit per-link spectral efficiency.
pub fn transmission_capacity_with_b(density: f64, epsilon: f64, b: f64) -> f64 {
    density * (1.0 - epsilon) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading::FadingModel;

    const GAMMA_THIRD: f64 = 2.678_938_534_707_748; // Gamma(1/3)
    const GAMMA_HALF: f64 = 1.772_453_850_905_516;

    fn defaults() -> NetworkParams {
        NetworkParams::defaults()
    }

    fn rayleigh_policy(s: f64) -> PowerControlPolicy {
        PowerControlPolicy::new(s, FadingModel::Rayleigh).unwrap()
    }

    #[test]
    fn default_snr_is_twenty_db() {
        let p = defaults();
        assert!((p.snr() - 100.0).abs() < 1e-9);
        assert!((p.delta() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn shot_noise_examples() {
        let delta = 2.0 / 3.0;
        assert_eq!(shot_noise_tail_lb(0.0, 1.0, 1.0, delta).unwrap(), 0.0);
        // re-evaluation with independent arithmetic: 1 - exp(-pi 1e-4)
        let v = shot_noise_tail_lb(1e-4, 1.0, 1.0, delta).unwrap();
        let want = 1.0 - (-std::f64::consts::PI * 1e-4).exp();
        assert!((v - want).abs() < 1e-15);
        assert!((v - 3.141_099_225_042_808e-4).abs() < 1e-12);
        // limits
        assert!(shot_noise_tail_lb(1e-4, 1.0, 1e30, delta).unwrap() < 1e-20);
        assert!(shot_noise_tail_lb(1e-4, 1.0, 1e-300, delta).unwrap() > 1.0 - 1e-12);
        assert!(shot_noise_tail_lb(1e-4, 1.0, 0.0, delta).is_err());
    }

    #[test]
    fn pathloss_bound_at_defaults() {
        // 1 - exp(-lambda pi d^2 (1/beta - 1/SNR)^{-2/3}), recomputed inline
        let p = defaults();
        let got = outage_lb_pathloss(&p);
        let want =
            1.0 - (-(1e-4 * std::f64::consts::PI * 100.0) * (1.0f64 - 0.01).powf(-2.0 / 3.0)).exp();
        assert!((got - want).abs() < 1e-15);
        assert!((got - 0.031_132_220_661_801_28).abs() < 1e-12);
    }

    #[test]
    fn pathloss_bound_noise_free_reduction() {
        let p = NetworkParams::new(3.0, 1.0, 10.0, 1.0, 0.0, 1e-4).unwrap();
        let got = outage_lb_pathloss(&p);
        let want = 1.0 - (-1e-4 * std::f64::consts::PI * 100.0f64).exp();
        assert!((got - want).abs() < 1e-15);
        assert!((got - 0.030_927_573_695_189_36).abs() < 1e-12);
    }

    #[test]
    fn pathloss_edge_cases() {
        let mut p = defaults();
        p.lambda = 0.0;
        assert_eq!(outage_lb_pathloss(&p), 0.0);
        // outage certain when SNR below target even with no interferers
        let weak = NetworkParams::new(3.0, 200.0, 10.0, 1.0, 1e-5, 0.0).unwrap();
        assert_eq!(outage_lb_pathloss(&weak), 1.0);
    }

    #[test]
    fn ci_with_deterministic_fading_is_pathloss() {
        // H = 1 collapses every moment to 1 and the inversion bound becomes
        // the pathloss formula
        let p = defaults();
        let ci = outage_lb_ci(&p, &FadingModel::Deterministic).unwrap();
        assert!((ci.value - outage_lb_pathloss(&p)).abs() < 1e-15);
        let jn = outage_jensen_fpc(
            &PowerControlPolicy::new(1.0, FadingModel::Deterministic).unwrap(),
            &p,
        )
        .unwrap();
        assert!((jn.value - outage_lb_pathloss(&p)).abs() < 1e-15);
    }

    #[test]
    fn densities_vanish_linearly_in_epsilon() {
        // -log(1 - eps) = eps + O(eps^2), so density(eps)/eps approaches a
        // constant from above as eps -> 0. Noise-free branch: with noise the
        // fading floor makes tiny targets infeasible instead.
        let nf = NetworkParams::new(3.0, 1.0, 10.0, 1.0, 0.0, 1e-4).unwrap();
        let policy = rayleigh_policy(0.5);
        let slope_at = |eps: f64| density_fpc(&policy, &nf, eps).unwrap() / eps;
        let s1 = slope_at(1e-3);
        let s2 = slope_at(1e-6);
        let s3 = slope_at(1e-9);
        assert!(
            ((s2 - s3) / s3).abs() < 1e-5,
            "slope not settling: {s2} vs {s3}"
        );
        assert!(s1 > s2 && s2 > s3, "not approaching linearly from above");
        let pl1 = density_ub_pathloss(&nf, 1e-6).unwrap() / 1e-6;
        let pl2 = density_ub_pathloss(&nf, 1e-9).unwrap() / 1e-9;
        assert!(((pl1 - pl2) / pl2).abs() < 1e-5);
        // and below the fading floor the noisy branch refuses
        let noisy = defaults();
        assert!(matches!(
            density_fpc(&policy, &noisy, 1e-6),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn pathloss_density_inversion() {
        let p = defaults();
        let lam = density_ub_pathloss(&p, 0.05).unwrap();
        assert!((lam - 1.621_813_272_323_62e-4).abs() < 1e-12);
        // round trip through the forward map
        let mut at = p.clone();
        at.lambda = lam;
        assert!((outage_lb_pathloss(&at) - 0.05).abs() < 1e-12);
        // noise-free reduction
        let nf = NetworkParams::new(3.0, 1.0, 10.0, 1.0, 0.0, 1e-4).unwrap();
        let lam0 = density_ub_pathloss(&nf, 0.05).unwrap();
        let want = -(0.95f64.ln()) / (std::f64::consts::PI * 100.0);
        assert!((lam0 - want).abs() < 1e-18);
        // infeasible when snr <= beta
        let weak = NetworkParams::new(3.0, 200.0, 10.0, 1.0, 1e-5, 1e-4).unwrap();
        assert!(density_ub_pathloss(&weak, 0.05).is_err());
    }

    #[test]
    fn kappa_values() {
        let p = defaults();
        // s=0: exponent 1, E[H^0] = 1 -> beta/SNR
        let k0 = kappa(&rayleigh_policy(0.0), &p).unwrap();
        assert!((k0 - 0.01).abs() < 1e-15);
        // s=0.5: (0.01 Gamma(1/2))^2
        let k5 = kappa(&rayleigh_policy(0.5), &p).unwrap();
        assert!((k5 - (0.01 * GAMMA_HALF).powi(2)).abs() < 1e-15);
        assert!((k5 - 3.141_592_653_589_793e-4).abs() < 1e-12);
        // eta = 0 -> 0
        let nf = NetworkParams::new(3.0, 1.0, 10.0, 1.0, 0.0, 1e-4).unwrap();
        assert_eq!(kappa(&rayleigh_policy(0.5), &nf).unwrap(), 0.0);
        assert!(kappa(&rayleigh_policy(1.0), &p).is_err());
    }

    #[test]
    fn conditional_moment_is_memoryless_at_s0() {
        // at s=0, beta=1 the conditioned moment is E[(H-kappa)^{-d} | H>=kappa],
        // which by memorylessness equals Gamma(1-d) exactly; this exercises
        // the singular endpoint path against a closed form.
        let p = defaults();
        let (m, p_tail, _) = fpc_conditional_moment(&rayleigh_policy(0.0), &p).unwrap();
        let want = crate::numerics::gamma_fn(1.0 - p.delta()).unwrap();
        assert!(((m - want) / want).abs() < 1e-8, "moment {m} vs {want}");
        assert!((p_tail - (-0.01f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn fpc_bounds_at_defaults_match_reference_quadrature() {
        // values frozen from an independent high-precision evaluation of the
        // conditioned integrals
        let p = defaults();
        let cases = [
            (0.0, 0.069_996_707_008_267_4, 0.082_383_975_753_057_54),
            (0.25, 0.057_094_064_225_069_34, 0.062_414_370_013_418_59),
            (0.5, 0.052_135_121_044_758_73, 0.053_356_074_099_318_73),
            (0.75, 0.056_894_968_432_466_68, 0.057_022_224_303_200_34),
        ];
        for (s, lb_want, jn_want) in cases {
            let lb = outage_lb_fpc(&rayleigh_policy(s), &p).unwrap();
            let jn = outage_jensen_fpc(&rayleigh_policy(s), &p).unwrap();
            assert!(
                ((lb.value - lb_want) / lb_want).abs() < 1e-6,
                "s={s}: lb {} vs {lb_want}",
                lb.value
            );
            assert!(
                ((jn.value - jn_want) / jn_want).abs() < 1e-6,
                "s={s}: jensen {} vs {jn_want}",
                jn.value
            );
            assert_eq!(lb.method, Method::LowerBound);
            assert_eq!(jn.method, Method::JensenApprox);
            assert!(lb.value <= jn.value + 1e-10);
        }
    }

    #[test]
    fn deterministic_fading_collapses_to_pathloss() {
        let p = defaults();
        for s in [0.0, 0.3, 0.5, 0.9] {
            let policy = PowerControlPolicy::new(s, FadingModel::Deterministic).unwrap();
            let lb = outage_lb_fpc(&policy, &p).unwrap();
            let jn = outage_jensen_fpc(&policy, &p).unwrap();
            let want = outage_lb_pathloss(&p);
            assert!(
                (lb.value - want).abs() < 1e-12,
                "s={s}: {} vs {want}",
                lb.value
            );
            assert!(
                (jn.value - want).abs() < 1e-12,
                "s={s}: {} vs {want}",
                jn.value
            );
        }
    }

    #[test]
    fn noise_free_jensen_closed_form() {
        // 1 - exp(-lambda pi d^2 Gamma(5/3) Gamma(2/3)^2) at s = 1/2
        let nf = NetworkParams::new(3.0, 1.0, 10.0, 1.0, 0.0, 1e-4).unwrap();
        let jn = outage_jensen_fpc(&rayleigh_policy(0.5), &nf).unwrap();
        assert!(
            (jn.value - 0.050_673_945_937_882_07).abs() < 1e-12,
            "{}",
            jn.value
        );
        assert_eq!(jn.quadrature_error, 0.0);
    }

    #[test]
    fn noise_free_inversion_identity() {
        // q~cp = q_ci = 1 - exp(-lambda pi d^2 beta^d Gamma(1+d) Gamma(1-d))
        let nf = NetworkParams::new(3.0, 1.0, 10.0, 1.0, 0.0, 1e-4).unwrap();
        let cp = outage_jensen_cp(&nf, &FadingModel::Rayleigh).unwrap();
        let ci = outage_lb_ci(&nf, &FadingModel::Rayleigh).unwrap();
        assert!(
            (cp.value - ci.value).abs() < 1e-14,
            "{} vs {}",
            cp.value,
            ci.value
        );
        assert!((ci.value - 0.073_161_781_390_265_76).abs() < 1e-12);
        // and the FPC bound at s = 1 equals the same closed form
        let fpc1 = outage_lb_fpc(&rayleigh_policy(1.0), &nf).unwrap();
        assert!((fpc1.value - ci.value).abs() < 1e-14);
    }

    #[test]
    fn ci_with_noise_needs_clamped_rayleigh() {
        let p = defaults();
        assert!(matches!(
            outage_lb_ci(&p, &FadingModel::Rayleigh),
            Err(Error::DivergentMoment { .. })
        ));
        let clamped = FadingModel::clamped_rayleigh(1e-4).unwrap();
        let q = outage_lb_ci(&p, &clamped).unwrap();
        assert!(q.value > 0.0 && q.value < 1.0, "{}", q.value);
    }

    #[test]
    fn ci_infeasible_when_margin_gone() {
        // SNR / E[H^-1] <= beta: clamped E[H^-1] ~ 9.63, SNR = 100, beta = 20
        let p = NetworkParams::new(3.0, 20.0, 10.0, 1.0, 1e-5, 1e-4).unwrap();
        let clamped = FadingModel::clamped_rayleigh(1e-4).unwrap();
        assert!(matches!(
            outage_lb_ci(&p, &clamped),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn cp_delegation_is_bitwise() {
        let p = defaults();
        let via_cp = outage_lb_cp(&p, &FadingModel::Rayleigh).unwrap();
        let via_fpc = outage_lb_fpc(&rayleigh_policy(0.0), &p).unwrap();
        assert_eq!(via_cp.value.to_bits(), via_fpc.value.to_bits());
        // kappa(0) equals the constant-power conditioning threshold beta/SNR
        let k0 = kappa(&rayleigh_policy(0.0), &p).unwrap();
        assert_eq!(k0.to_bits(), (p.beta * p.inv_snr()).to_bits());
    }

    #[test]
    fn density_round_trips_through_jensen() {
        for eta in [0.0, 1e-5] {
            let p = NetworkParams::new(3.0, 1.0, 10.0, 1.0, eta, 1e-4).unwrap();
            for s in [0.0, 0.25, 0.5, 0.75] {
                let policy = rayleigh_policy(s);
                for eps in [0.01, 0.05, 0.1] {
                    let lam = density_fpc(&policy, &p, eps).unwrap();
                    let mut at = p.clone();
                    at.lambda = lam;
                    let q = outage_jensen_fpc(&policy, &at).unwrap();
                    assert!(
                        (q.value - eps).abs() < 1e-10,
                        "eta={eta} s={s} eps={eps}: {}",
                        q.value
                    );
                }
            }
        }
    }

    #[test]
    fn density_noise_free_closed_form() {
        // equals L(1/2) times the pathloss density at the same eps
        let nf = NetworkParams::new(3.0, 1.0, 10.0, 1.0, 0.0, 1e-4).unwrap();
        let lam = density_fpc(&rayleigh_policy(0.5), &nf, 0.05).unwrap();
        let loss = loss_factor_fpc(0.5, &FadingModel::Rayleigh, nf.delta()).unwrap();
        let pl = density_ub_pathloss(&nf, 0.05).unwrap();
        assert!(((lam - loss * pl) / lam).abs() < 1e-12);
    }

    #[test]
    fn density_infeasible_below_fading_floor() {
        // at SNR = 10 dB and s = 0.9 the fade floor is sizable; ask below it
        let p = NetworkParams::new(3.0, 1.0, 10.0, 1.0, 1e-4, 1e-4).unwrap();
        let policy = rayleigh_policy(0.9);
        let floor = 1.0 - FadingModel::Rayleigh.tail_prob(kappa(&policy, &p).unwrap());
        assert!(floor > 0.05, "floor {floor}");
        assert!(matches!(
            density_fpc(&policy, &p, floor * 0.5),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn loss_factor_values() {
        let delta = 2.0 / 3.0;
        for s in [0.0, 1.0] {
            let l = loss_factor_fpc(s, &FadingModel::Rayleigh, delta).unwrap();
            assert!((l - 0.41).abs() < 0.005, "L({s}) = {l}");
        }
        assert_eq!(
            loss_factor_fpc(0.37, &FadingModel::Deterministic, delta).unwrap(),
            1.0
        );
        let mid = loss_factor_fpc(0.5, &FadingModel::Rayleigh, delta).unwrap();
        let edge = loss_factor_fpc(0.0, &FadingModel::Rayleigh, delta).unwrap();
        assert!(mid > edge);
        // independent Gamma oracle for the midpoint
        let want = 1.0 / (0.902_745_292_950_933_6 * 1.354_117_939_426_400_4f64.powi(2));
        assert!(((mid - want) / want).abs() < 1e-10);
    }

    #[test]
    fn loss_factor_symmetry_and_bound() {
        let delta = 0.58;
        for model in [
            FadingModel::Rayleigh,
            FadingModel::clamped_rayleigh(1e-3).unwrap(),
            FadingModel::Deterministic,
        ] {
            for s in [0.0, 0.2, 0.35, 0.5] {
                let a = loss_factor_fpc(s, &model, delta).unwrap();
                let b = loss_factor_fpc(1.0 - s, &model, delta).unwrap();
                assert!(
                    (a - b).abs() < 1e-9 * a.abs().max(1.0),
                    "{}: {a} vs {b}",
                    model.name()
                );
                let slack = if model == FadingModel::Deterministic {
                    1e-12
                } else {
                    0.0
                };
                assert!(a <= 1.0 + slack, "{}: L({s}) = {a} > 1", model.name());
            }
        }
    }

    #[test]
    fn capacity_composition() {
        let p = defaults();
        assert_eq!(transmission_capacity(&p, 0.05, 0.0), 0.0);
        // beta = 1 -> b = 1
        let c = transmission_capacity(&p, 0.05, 2e-4);
        assert!((c - 2e-4 * 0.95).abs() < 1e-18);
        let c2 = transmission_capacity_with_b(2e-4, 0.05, 3.0);
        assert!((c2 - 3.0 * c).abs() < 1e-15);
    }

    #[test]
    fn jensen_cp_memoryless_identity() {
        // at s=0, beta=1 the conditional moment is Gamma(1-d) exactly, so the
        // Jensen cp value has the closed form 1 - P exp(-c Gamma(1/3))
        let p = defaults();
        let jn = outage_jensen_cp(&p, &FadingModel::Rayleigh).unwrap();
        let delta = p.delta();
        let c =
            1e-4 * std::f64::consts::PI * 100.0 * crate::numerics::gamma_fn(1.0 + delta).unwrap();
        let p_tail = (-0.01f64).exp();
        let exact = 1.0 - p_tail * (-c * GAMMA_THIRD).exp();
        assert!(
            ((jn.value - exact) / exact).abs() < 1e-8,
            "{} vs {exact}",
            jn.value
        );
    }

    #[test]
    fn monotone_in_lambda_and_beta() {
        let base = defaults();
        let policy = rayleigh_policy(0.4);
        let mut denser = base.clone();
        denser.lambda *= 2.0;
        let mut stricter = base.clone();
        stricter.beta *= 1.5;
        for f in [
            outage_lb_fpc as fn(&PowerControlPolicy, &NetworkParams) -> Result<BoundResult>,
            outage_jensen_fpc,
        ] {
            let q0 = f(&policy, &base).unwrap().value;
            let q_lam = f(&policy, &denser).unwrap().value;
            let q_beta = f(&policy, &stricter).unwrap().value;
            assert!(q_lam > q0, "not increasing in lambda: {q_lam} vs {q0}");
            assert!(q_beta > q0, "not increasing in beta: {q_beta} vs {q0}");
        }
        // densities increase with epsilon
        let d1 = density_fpc(&policy, &base, 0.02).unwrap();
        let d2 = density_fpc(&policy, &base, 0.04).unwrap();
        assert!(d2 > d1);
    }

    #[test]
    fn policy_range_validation() {
        assert!(PowerControlPolicy::new(-0.6, FadingModel::Rayleigh).is_err());
        assert!(PowerControlPolicy::new(1.1, FadingModel::Rayleigh).is_err());
        assert!(PowerControlPolicy::new(f64::NAN, FadingModel::Rayleigh).is_err());
        // s = 1 is constructible; the divergent normalizer surfaces only
        // where it is actually needed
        let p = PowerControlPolicy::new(1.0, FadingModel::Rayleigh).unwrap();
        assert!(p.normalizer().is_err());
    }

    #[test]
    fn params_validation_messages() {
        let err = NetworkParams::new(1.5, 1.0, 10.0, 1.0, 0.0, 1e-4).unwrap_err();
        assert!(err.to_string().contains("alpha must exceed 2"));
        assert!(NetworkParams::new(3.0, -1.0, 10.0, 1.0, 0.0, 1e-4).is_err());
        assert!(NetworkParams::new(3.0, 1.0, 10.0, 1.0, -1e-9, 1e-4).is_err());
    }
}
