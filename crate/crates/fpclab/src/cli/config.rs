//! JSON run configuration: fail-closed parsing, defaults, validation.
//!
//! Every field has a default so `{}` is a complete configuration; unknown
//! keys are rejected so typos cannot silently fall back to defaults.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analytic::{NetworkParams, PowerControlPolicy};
use crate::error::{Error, Result};
use crate::fading::FadingModel;
use crate::optimize::{self, Method, ObjectiveSpec, SweepKind, SweepSpec};
use crate::simulate::SimConfig;

/// Fading selection as it appears in JSON:
/// `"rayleigh"`, `"none"`, or `{"clamped_rayleigh": {"h_min": x}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingSpec(pub FadingModel);

impl Serialize for FadingSpec {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.0 {
            FadingModel::Deterministic => ser.serialize_str("none"),
            FadingModel::Rayleigh => ser.serialize_str("rayleigh"),
            FadingModel::ClampedRayleigh { h_min } => {
                #[derive(Serialize)]
                struct Inner {
                    h_min: f64,
                }
                #[derive(Serialize)]
                struct Outer {
                    clamped_rayleigh: Inner,
                }
                Outer {
                    clamped_rayleigh: Inner { h_min: *h_min },
                }
                .serialize(ser)
            }
        }
    }
}

impl<'de> Deserialize<'de> for FadingSpec {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Name(String),
            Clamped { clamped_rayleigh: ClampedRaw },
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct ClampedRaw {
            h_min: f64,
        }
        match Raw::deserialize(de).map_err(|_| {
            D::Error::custom(
                "fading must be \"rayleigh\", \"none\", or {\"clamped_rayleigh\": {\"h_min\": x}}",
            )
        })? {
            Raw::Name(name) => match name.as_str() {
                "rayleigh" => Ok(FadingSpec(FadingModel::Rayleigh)),
                "none" | "deterministic" => Ok(FadingSpec(FadingModel::Deterministic)),
                other => Err(D::Error::custom(format!(
                    "unknown fading model {other:?}; expected \"rayleigh\", \"none\" \
                     or a clamped_rayleigh object"
                ))),
            },
            Raw::Clamped { clamped_rayleigh } => {
                let model = FadingModel::clamped_rayleigh(clamped_rayleigh.h_min)
                    .map_err(|e| D::Error::custom(e.to_string()))?;
                Ok(FadingSpec(model))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsSection {
    pub alpha: f64,
    pub beta: f64,
    pub d: f64,
    pub p: f64,
    pub eta: f64,
    pub lambda: f64,
}

impl Default for ParamsSection {
    fn default() -> Self {
        let p = NetworkParams::defaults();
        ParamsSection {
            alpha: p.alpha,
            beta: p.beta,
            d: p.d,
            p: p.p,
            eta: p.eta,
            lambda: p.lambda,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct PolicySection {
    pub s: f64,
    pub fading: FadingSpec,
}

impl Default for PolicySection {
    fn default() -> Self {
        PolicySection {
            s: 0.5,
            fading: FadingSpec(FadingModel::Rayleigh),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub n_trials: u64,
    pub master_seed: u64,
    pub truncation_rel_tol: f64,
    pub min_radius_factor: f64,
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection {
            n_trials: 200_000,
            master_seed: 0,
            truncation_rel_tol: 1e-3,
            min_radius_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub kind: String,
    /// Swept parameter values; kind-specific defaults when empty.
    pub values: Vec<f64>,
    /// Exponent grid for vs_s / loss_curve sweeps.
    pub s_values: Vec<f64>,
    /// Whether vs_s sweeps run the Monte-Carlo column.
    pub simulate: bool,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            kind: "vs_s".into(),
            values: vec![],
            s_values: vec![],
            simulate: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizeSection {
    pub method: String,
    pub s_range: [f64; 2],
    pub grid_step: f64,
    pub refine_tol: f64,
    pub deltas_pct: Vec<f64>,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        OptimizeSection {
            method: "jensen".into(),
            s_range: [-0.25, 0.95],
            grid_step: 0.01,
            refine_tol: 1e-4,
            deltas_pct: vec![1.0, 10.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
    pub svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: ".".into(),
            svg: false,
        }
    }
}

/// The whole configuration file. `{}` resolves to the built-in default
/// operating point.
#[derive(Debug, Clone, Serialize, Deserialize, Default, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Option<String>,
    pub params: ParamsSection,
    pub policy: PolicySection,
    pub sim: SimSection,
    pub sweep: SweepSection,
    pub optimize: OptimizeSection,
    pub epsilon: f64,
    pub spectral_efficiency: Option<f64>,
    pub output: OutputSection,
}

const KNOWN_COMMANDS: [&str; 6] = [
    "analytic",
    "simulate",
    "sweep",
    "optimize",
    "loss-curve",
    "reproduce",
];

/// Parse and validate a JSON configuration. The command argument, when
/// known, enables command-specific checks (a simulate run needs a finite
/// power normalizer).
pub fn parse_config(text: &str, command: Option<&str>) -> Result<RunConfig> {
    let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
        Error::Validation(format!(
            "config parse error at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    if cfg.epsilon == 0.0 {
        cfg.epsilon = 0.05; // serde Default for f64 is 0
    }
    validate(&cfg, command)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig, command: Option<&str>) -> Result<()> {
    if let Some(cmd) = cfg.command.as_deref() {
        if !KNOWN_COMMANDS.contains(&cmd) {
            return Err(Error::Validation(format!(
                "unknown command {cmd:?}; expected one of {KNOWN_COMMANDS:?}"
            )));
        }
    }
    cfg.network_params()?;
    let policy = cfg.power_policy()?;
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        return Err(Error::Validation(format!(
            "epsilon must lie in (0,1), got {}",
            cfg.epsilon
        )));
    }
    if let Some(b) = cfg.spectral_efficiency {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::Validation(format!(
                "spectral_efficiency must be positive, got {b}"
            )));
        }
    }
    cfg.sweep_kind()?;
    cfg.objective_spec()?;

    let effective = command.or(cfg.command.as_deref());
    let simulates = matches!(effective, Some("simulate") | Some("reproduce"))
        || (matches!(effective, Some("sweep")) && cfg.sweep.simulate);
    if simulates {
        // surfaces the infinite-normalizer rejection for (rayleigh, s = 1)
        cfg.sim_config(policy)?.validate()?;
    }
    Ok(())
}

impl RunConfig {
    pub fn network_params(&self) -> Result<NetworkParams> {
        let p = &self.params;
        NetworkParams::new(p.alpha, p.beta, p.d, p.p, p.eta, p.lambda)
    }

    pub fn power_policy(&self) -> Result<PowerControlPolicy> {
        PowerControlPolicy::new(self.policy.s, self.policy.fading.0.clone())
    }

    pub fn fading(&self) -> FadingModel {
        self.policy.fading.0.clone()
    }

    pub fn sim_config(&self, policy: PowerControlPolicy) -> Result<SimConfig> {
        let mut sim = SimConfig::new(self.network_params()?, policy);
        sim.n_trials = self.sim.n_trials;
        sim.master_seed = self.sim.master_seed;
        sim.truncation_rel_tol = self.sim.truncation_rel_tol;
        sim.min_radius_factor = self.sim.min_radius_factor;
        sim.validate()?;
        Ok(sim)
    }

    pub fn sweep_kind(&self) -> Result<SweepKind> {
        match self.sweep.kind.as_str() {
            "vs_s" => Ok(SweepKind::VsS),
            "vs_alpha" => Ok(SweepKind::VsAlpha),
            "vs_snr" => Ok(SweepKind::VsSnr),
            "vs_beta" => Ok(SweepKind::VsBeta),
            "vs_lambda" => Ok(SweepKind::VsLambda),
            "loss_curve" => Ok(SweepKind::LossCurve),
            other => Err(Error::Validation(format!(
                "unknown sweep kind {other:?}; expected vs_s, vs_alpha, vs_snr, vs_beta, \
                 vs_lambda or loss_curve"
            ))),
        }
    }

    pub fn objective_spec(&self) -> Result<ObjectiveSpec> {
        let method = match self.optimize.method.as_str() {
            "simulated" => Method::Simulated,
            "lower_bound" => Method::LowerBound,
            "jensen" => Method::Jensen,
            other => {
                return Err(Error::Validation(format!(
                    "unknown objective method {other:?}; expected simulated, lower_bound \
                     or jensen"
                )))
            }
        };
        let mut spec = ObjectiveSpec::new(method);
        spec.s_lo = self.optimize.s_range[0];
        spec.s_hi = self.optimize.s_range[1];
        spec.grid_step = self.optimize.grid_step;
        spec.refine_tol = self.optimize.refine_tol;
        spec.sim_trials = self.sim.n_trials;
        spec.master_seed = self.sim.master_seed;
        spec.truncation_rel_tol = self.sim.truncation_rel_tol;
        spec.validate()?;
        for &d in &self.optimize.deltas_pct {
            if !(d >= 0.0) {
                return Err(Error::Validation(format!(
                    "deltas_pct must be >= 0, got {d}"
                )));
            }
        }
        Ok(spec)
    }

    /// Sweep description with kind-appropriate default grids.
    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let kind = self.sweep_kind()?;
        let objective = self.objective_spec()?;
        let values = if self.sweep.values.is_empty() {
            match kind {
                SweepKind::VsS => vec![],
                SweepKind::LossCurve => vec![2.1, 3.0, 4.0],
                // below alpha ~2.6 the truncation disc of a simulated
                // objective grows like (1/(alpha-2))-th roots and trials
                // stop being computable; pass explicit values to go lower
                SweepKind::VsAlpha => vec![2.6, 3.0, 3.5, 4.0, 4.5, 5.0],
                SweepKind::VsSnr => vec![
                    3.16227766017,
                    10.0,
                    31.6227766017,
                    100.0,
                    316.227766017,
                    1000.0,
                ],
                SweepKind::VsBeta => vec![0.1, 0.316227766017, 1.0, 3.16227766017, 10.0],
                SweepKind::VsLambda => vec![1e-5, 3.16227766017e-5, 1e-4, 3.16227766017e-4, 1e-3],
            }
        } else {
            self.sweep.values.clone()
        };
        let s_values = if self.sweep.s_values.is_empty() {
            match kind {
                SweepKind::LossCurve => optimize::grid(0.0, 1.0, 0.01),
                _ => optimize::grid(-0.25, 0.95, 0.05),
            }
        } else {
            self.sweep.s_values.clone()
        };
        Ok(SweepSpec {
            kind,
            values,
            s_values,
            objective,
            simulate: self.sweep.simulate,
        })
    }

    /// Resolved-config line embedded in every CSV header. The output section
    /// is omitted: where a file landed is not part of what it records.
    pub fn comment_lines(&self) -> Vec<String> {
        let mut value = serde_json::to_value(self).expect("config serializes");
        value
            .as_object_mut()
            .expect("config is an object")
            .remove("output");
        vec![
            "fpclab csv schema_version=1".to_string(),
            format!("config={value}"),
            format!("seed={}", self.sim.master_seed),
        ]
    }
}
