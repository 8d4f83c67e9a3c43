//! Ground-truth Monte-Carlo estimation of the outage probability.
//!
//! Each trial draws a Poisson number of interferers uniformly on a disc
//! around the reference receiver, i.i.d. fading on every link, applies the
//! power-control rule to the reference transmitter and every interferer, and
//! tests SINR < beta. Trials are keyed by (master_seed, trial index), so the
//! estimate is a pure function of the configuration regardless of how many
//! workers run it.

use rayon::prelude::*;

use crate::analytic::{NetworkParams, PowerControlPolicy};
use crate::error::{Error, Result};
use crate::fading::FadingModel;
use crate::numerics::RandomStream;

/// Monte-Carlo run description.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub params: NetworkParams,
    pub policy: PowerControlPolicy,
    pub n_trials: u64,
    pub master_seed: u64,
    /// Mean residual interference from beyond the truncation disc, as a
    /// fraction of the mean received signal power.
    pub truncation_rel_tol: f64,
    /// The disc radius never drops below this multiple of d.
    pub min_radius_factor: f64,
}

impl SimConfig {
    pub fn new(params: NetworkParams, policy: PowerControlPolicy) -> Self {
        SimConfig {
            params,
            policy,
            n_trials: 200_000,
            master_seed: 0,
            truncation_rel_tol: 1e-3,
            min_radius_factor: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials < 1 {
            return Err(Error::Validation("n_trials must be >= 1".into()));
        }
        if !(self.truncation_rel_tol > 0.0 && self.truncation_rel_tol <= 0.1) {
            return Err(Error::Validation(format!(
                "truncation_rel_tol must lie in (0, 0.1], got {}",
                self.truncation_rel_tol
            )));
        }
        if !(self.min_radius_factor >= 1.0) {
            return Err(Error::Validation(format!(
                "min_radius_factor must be >= 1, got {}",
                self.min_radius_factor
            )));
        }
        // simulating requires the actual transmit powers, hence a finite
        // normalizer; (Rayleigh, s = 1) must use ClampedRayleigh instead
        if self.policy.normalizer().is_err() {
            return Err(Error::Validation(format!(
                "cannot simulate s = {} under {} fading: the power normalizer E[H^-s] \
                 is infinite; use clamped_rayleigh fading for channel inversion",
                self.policy.s(),
                self.policy.fading().name()
            )));
        }
        Ok(())
    }
}

/// One estimated outage probability with its sampling uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub n_trials: u64,
    pub ci95: (f64, f64),
    pub seed: u64,
}

impl OutageEstimate {
    fn from_count(outages: u64, n_trials: u64, seed: u64) -> Self {
        let p_hat = outages as f64 / n_trials as f64;
        let std_err = (p_hat * (1.0 - p_hat) / n_trials as f64).sqrt();
        OutageEstimate {
            p_hat,
            std_err,
            n_trials,
            ci95: (
                (p_hat - 1.96 * std_err).max(0.0),
                (p_hat + 1.96 * std_err).min(1.0),
            ),
            seed,
        }
    }
}

/// Truncation radius: the smallest R >= min_radius_factor * d such that the
/// mean interference from transmitters beyond R is at most
/// truncation_rel_tol times the mean received signal power.
///
/// Mean residual interference of the PPP beyond R is
/// 2 pi lambda E[P H] R^{2-alpha} / (alpha - 2) with E[P] = p, and the mean
/// signal power is p d^-alpha E[H^{1-s}] / E[H^-s].
pub fn truncation_radius(cfg: &SimConfig) -> Result<f64> {
    cfg.validate()?;
    let params = &cfg.params;
    let s = cfg.policy.s();
    let fading = cfg.policy.fading();
    let floor = cfg.min_radius_factor * params.d;
    if params.lambda == 0.0 {
        return Ok(floor);
    }
    let e_h = fading.fractional_moment(1.0)?;
    let e_h_neg_s = fading.power_normalizer(s)?;
    let e_h_1ms = fading.fractional_moment(1.0 - s)?;
    let alpha = params.alpha;
    let r_mean =
        (2.0 * std::f64::consts::PI * params.lambda * e_h * e_h_neg_s * params.d.powf(alpha)
            / ((alpha - 2.0) * cfg.truncation_rel_tol * e_h_1ms))
            .powf(1.0 / (alpha - 2.0));
    Ok(floor.max(r_mean))
}

// Everything a trial needs, precomputed once per run.
struct TrialSetup {
    radius_sq: f64,
    mean_count: f64,
    power_scale: f64, // p / E[H^-s]
    s: f64,
    neg_half_alpha: f64,
    d_neg_alpha: f64,
    beta: f64,
    eta: f64,
    fading: FadingModel,
}

impl TrialSetup {
    fn build(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let radius = truncation_radius(cfg)?;
        let params = &cfg.params;
        Ok(TrialSetup {
            radius_sq: radius * radius,
            mean_count: params.lambda * std::f64::consts::PI * radius * radius,
            power_scale: params.p / cfg.policy.normalizer()?,
            s: cfg.policy.s(),
            neg_half_alpha: -0.5 * params.alpha,
            d_neg_alpha: params.d.powf(-params.alpha),
            beta: params.beta,
            eta: params.eta,
            fading: cfg.policy.fading().clone(),
        })
    }

    // Draw order is part of the reproducibility contract: H00 first, then the
    // interferer count, then (r^2, H_i0, H_ii) per interferer.
    fn run(&self, stream: &mut RandomStream) -> TrialOutcome {
        let h00 = self.fading.sample(stream);
        let n = stream
            .poisson(self.mean_count)
            .expect("mean_count validated finite and nonnegative");
        let mut interference = 0.0;
        for _ in 0..n {
            let r_sq = self.radius_sq * stream.uniform();
            let h_i0 = self.fading.sample(stream);
            let h_ii = self.fading.sample(stream);
            // interferer power depends on its own link fade, not on its
            // channel to the reference receiver
            let power = self.power_scale * pow_neg_s(h_ii, self.s);
            interference += power * h_i0 * r_sq.powf(self.neg_half_alpha);
        }
        let signal = self.power_scale * pow_neg_s(h00, self.s) * h00 * self.d_neg_alpha;
        let denom = interference + self.eta;
        let sinr = if denom == 0.0 {
            f64::INFINITY
        } else {
            signal / denom
        };
        TrialOutcome {
            sinr,
            outage: sinr < self.beta,
        }
    }
}

#[inline]
fn pow_neg_s(h: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        h.powf(-s)
    }
}

/// SINR and outage indicator of a single snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub sinr: f64,
    /// Strict threshold: SINR < beta. A tie at the threshold is a success.
    pub outage: bool,
}

/// One simulated snapshot using the caller's stream.
pub fn run_trial(cfg: &SimConfig, stream: &mut RandomStream) -> Result<TrialOutcome> {
    Ok(TrialSetup::build(cfg)?.run(stream))
}

/// Frequentist outage estimate over `cfg.n_trials` independent snapshots.
/// Trial i uses stream id i of the master seed; the outage count is an exact
/// integer sum, so worker count and scheduling cannot change the result.
pub fn estimate_outage(cfg: &SimConfig) -> Result<OutageEstimate> {
    let setup = TrialSetup::build(cfg)?;
    let outages: u64 = (0..cfg.n_trials)
        .into_par_iter()
        .map(|trial| {
            let mut stream = RandomStream::new(cfg.master_seed, trial);
            u64::from(setup.run(&mut stream).outage)
        })
        .sum();
    Ok(OutageEstimate::from_count(
        outages,
        cfg.n_trials,
        cfg.master_seed,
    ))
}

/// Monte-Carlo estimate of the marked shot-noise tail
/// P(sum Z_i X_i^-alpha > y) with marks Z drawn from `fading`, for checking
/// the analytic tail bound directly.
pub fn shot_noise_tail_mc(
    lambda: f64,
    fading: &FadingModel,
    y: f64,
    alpha: f64,
    n_trials: u64,
    master_seed: u64,
) -> Result<OutageEstimate> {
    if !(y > 0.0) || !(lambda >= 0.0) || !(alpha > 2.0) || n_trials < 1 {
        return Err(Error::Validation(
            "shot_noise_tail_mc needs y > 0, lambda >= 0, alpha > 2, n_trials >= 1".into(),
        ));
    }
    // truncate where the mean residual is far below the threshold level
    let e_z = fading.fractional_moment(1.0)?;
    let radius = if lambda == 0.0 {
        1.0
    } else {
        (2.0 * std::f64::consts::PI * lambda * e_z / ((alpha - 2.0) * 1e-3 * y))
            .powf(1.0 / (alpha - 2.0))
    };
    let radius_sq = radius * radius;
    let mean_count = lambda * std::f64::consts::PI * radius_sq;
    let neg_half_alpha = -0.5 * alpha;

    let exceed: u64 = (0..n_trials)
        .into_par_iter()
        .map(|trial| {
            let mut stream = RandomStream::new(master_seed, trial);
            let n = stream.poisson(mean_count).expect("validated mean");
            let mut total = 0.0;
            for _ in 0..n {
                let r_sq = radius_sq * stream.uniform();
                let z = fading.sample(&mut stream);
                total += z * r_sq.powf(neg_half_alpha);
            }
            u64::from(total > y)
        })
        .sum();
    Ok(OutageEstimate::from_count(exceed, n_trials, master_seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;

    fn config(s: f64, fading: FadingModel) -> SimConfig {
        let params = NetworkParams::defaults();
        let policy = PowerControlPolicy::new(s, fading).unwrap();
        SimConfig::new(params, policy)
    }

    #[test]
    fn radius_floor_binds_for_sparse_networks() {
        let mut cfg = config(0.0, FadingModel::Deterministic);
        cfg.params.lambda = 1e-12;
        let r = truncation_radius(&cfg).unwrap();
        assert_eq!(r, 100.0); // 10 d at defaults
    }

    #[test]
    fn radius_matches_residual_mean_closed_form() {
        // at alpha = 3: R = 2 pi lambda E[PH] / (tol * p d^-3 E[H^{1-s}]/E[H^-s])
        let cfg = config(0.5, FadingModel::Rayleigh);
        let r = truncation_radius(&cfg).unwrap();
        let e_h_neg_s = FadingModel::Rayleigh.power_normalizer(0.5).unwrap();
        let e_h_1ms = FadingModel::Rayleigh.fractional_moment(0.5).unwrap();
        let want = 2.0 * std::f64::consts::PI * 1e-4 * 1.0 * 1000.0 * e_h_neg_s / (1e-3 * e_h_1ms);
        assert!((r - want).abs() < 1e-9 * want, "{r} vs {want}");
        // residual shot-noise mean beyond R: 2 pi lambda E[H] / R at alpha=3,
        // which must sit exactly at tol times the mean signal
        let residual = 2.0 * std::f64::consts::PI * 1e-4 / r;
        let signal = 1e-3 * e_h_1ms / e_h_neg_s;
        assert!((residual / signal - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn radius_monotone_in_tolerance() {
        let mut cfg = config(0.5, FadingModel::Rayleigh);
        let r1 = truncation_radius(&cfg).unwrap();
        cfg.truncation_rel_tol = 2e-3;
        let r2 = truncation_radius(&cfg).unwrap();
        assert!(r2 <= r1);
    }

    #[test]
    fn empty_network_never_in_outage() {
        let mut cfg = config(0.0, FadingModel::Deterministic);
        cfg.params.lambda = 0.0;
        cfg.params.eta = 0.0;
        let mut stream = RandomStream::new(0, 0);
        let t = run_trial(&cfg, &mut stream).unwrap();
        assert_eq!(t.sinr, f64::INFINITY);
        assert!(!t.outage);
        // with noise: SINR equals the SNR of 100 exactly
        let mut cfg = config(0.0, FadingModel::Deterministic);
        cfg.params.lambda = 0.0;
        let t = run_trial(&cfg, &mut RandomStream::new(0, 0)).unwrap();
        assert!((t.sinr - 100.0).abs() < 1e-9);
        assert!(!t.outage);
    }

    #[test]
    fn outage_is_strict_inequality() {
        // one interferer at distance d with H = 1 everywhere, s = 0, eta = 0:
        // signal and interference are both p d^-alpha, SINR is exactly 1,
        // and the tie at beta = 1 counts as a success
        let p = NetworkParams::defaults();
        let signal = p.p * p.d.powf(-p.alpha);
        let interference = p.p * 1.0 * p.d.powf(-p.alpha);
        let sinr = signal / interference;
        assert_eq!(sinr, 1.0);
        let outage = sinr < p.beta;
        assert!(!outage);
    }

    #[test]
    fn rejects_unclamped_inversion() {
        let cfg = config(1.0, FadingModel::Rayleigh);
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("normalizer"), "{err}");
        // clamped inversion is fine
        let cfg = config(1.0, FadingModel::clamped_rayleigh(1e-4).unwrap());
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn estimate_is_deterministic() {
        let mut cfg = config(0.5, FadingModel::Rayleigh);
        cfg.n_trials = 5_000;
        cfg.master_seed = 42;
        let a = estimate_outage(&cfg).unwrap();
        let b = estimate_outage(&cfg).unwrap();
        assert_eq!(a.p_hat.to_bits(), b.p_hat.to_bits());
        assert_eq!(a.std_err.to_bits(), b.std_err.to_bits());
        cfg.master_seed = 43;
        let c = estimate_outage(&cfg).unwrap();
        assert_ne!(a.p_hat.to_bits(), c.p_hat.to_bits());
    }

    #[test]
    fn vanishing_density_vanishing_outage() {
        let mut cfg = config(0.5, FadingModel::Rayleigh);
        cfg.params.lambda = 1e-9;
        cfg.params.eta = 0.0;
        cfg.n_trials = 20_000;
        let est = estimate_outage(&cfg).unwrap();
        assert!(est.p_hat <= est.ci95.1);
        assert!(est.p_hat < 1e-3, "p_hat {}", est.p_hat);
    }

    #[test]
    fn deterministic_fading_tracks_pathloss_bound() {
        // with H = 1, the dominant-interferer bound is the pathloss formula
        // and the simulation must sit above it (minus noise allowance)
        let mut cfg = config(0.0, FadingModel::Deterministic);
        cfg.n_trials = 50_000;
        cfg.master_seed = 7;
        let est = estimate_outage(&cfg).unwrap();
        let bound = analytic::outage_lb_pathloss(&cfg.params);
        assert!(
            est.p_hat >= bound - 4.0 * est.std_err,
            "p_hat {} vs bound {bound} (se {})",
            est.p_hat,
            est.std_err
        );
        // and the bound is tight at this density
        assert!((est.p_hat - bound).abs() / bound < 0.15);
    }

    #[test]
    fn truncation_insensitivity() {
        let mut cfg = config(0.25, FadingModel::Rayleigh);
        cfg.n_trials = 40_000;
        cfg.master_seed = 11;
        let base = estimate_outage(&cfg).unwrap();
        cfg.truncation_rel_tol = 5e-4;
        let tighter = estimate_outage(&cfg).unwrap();
        assert!(
            (base.p_hat - tighter.p_hat).abs() <= 2.0 * base.std_err,
            "{} vs {} (se {})",
            base.p_hat,
            tighter.p_hat,
            base.std_err
        );
    }

    #[test]
    fn shot_noise_tail_basics() {
        // enormous threshold: never exceeded
        let est = shot_noise_tail_mc(1e-4, &FadingModel::Rayleigh, 1e12, 3.0, 2_000, 1).unwrap();
        assert_eq!(est.p_hat, 0.0);
        // doubling the density raises the exceedance rate (paired seeds)
        let lo = shot_noise_tail_mc(1e-4, &FadingModel::Rayleigh, 1e-3, 3.0, 20_000, 5).unwrap();
        let hi = shot_noise_tail_mc(2e-4, &FadingModel::Rayleigh, 1e-3, 3.0, 20_000, 5).unwrap();
        assert!(
            hi.p_hat > lo.p_hat - 2.0 * (lo.std_err + hi.std_err),
            "{} vs {}",
            hi.p_hat,
            lo.p_hat
        );
    }

    #[test]
    fn estimate_fields_consistent() {
        let mut cfg = config(0.5, FadingModel::Rayleigh);
        cfg.n_trials = 10_000;
        cfg.master_seed = 3;
        let est = estimate_outage(&cfg).unwrap();
        assert!(est.p_hat >= 0.0 && est.p_hat <= 1.0);
        let want_se = (est.p_hat * (1.0 - est.p_hat) / est.n_trials as f64).sqrt();
        assert_eq!(est.std_err.to_bits(), want_se.to_bits());
        assert!(est.ci95.0 <= est.p_hat && est.p_hat <= est.ci95.1);
        assert_eq!(est.seed, 3);
    }
}
