//! Strict JSON configuration.
//!
//! ```json
//! {
//!   "command": "simulate",
//!   "scenario": {"case": "case-b", "eps": 0.05, "x0": [0, 0, 1, 0, 1, 0], "t_max": 200},
//!   "integrator": {"method": "rk45-adaptive", "rtol": 1e-9, "atol": 1e-12},
//!   "output": {"dir": "out", "svg": false, "csv_precision": 12}
//! }
//! ```
//!
//! `scenario` may also be a built-in name: `case-a`, `case-b`,
//! `case-b-averaged`, `standard-example`, `fast-slow`, `warped` or
//! `twisted-example`.

use std::fmt;
use std::path::PathBuf;

use qcosym_core::fastslow::{
    ComparisonConfig, FrequencyProfile, PotentialKind, ScenarioCase, ScenarioConfig,
};
use qcosym_core::IntegratorConfig;
use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{CliError, CliResult};

pub const DEFAULT_CSV_PRECISION: usize = 12;
pub const DEFAULT_COMPARE_DT: f64 = 1e-3;
pub const SEED_ENV: &str = "QCOSYM_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Validate,
    Simulate,
    Average,
    Compare,
    Brackets,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Validate => "validate",
            Self::Simulate => "simulate",
            Self::Average => "average",
            Self::Compare => "compare",
            Self::Brackets => "brackets",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureKind {
    /// `Σ dqᵢ∧dpᵢ` with `λᵢ = dzᵢ` on `ℝ^{2n+q}`.
    Standard,
    /// The 2-cosymplectic structure of the fast–slow oscillator.
    FastSlow,
    /// A non-flat structure on `ℝ³`.
    Warped,
    /// `(1 + z) dq∧dp` with `λ = dz`: not closed, so validation fails.
    Twisted,
}

/// The `scenario` section: a built-in name or an object overriding one.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub name: Option<String>,
    pub case: Option<ScenarioCase>,
    pub eps: Option<f64>,
    pub x0: Option<[f64; 6]>,
    pub t_max: Option<f64>,
    pub seed: Option<u64>,
    pub omega0: Option<f64>,
    pub action_override: Option<f64>,
    pub secular_tau_average: Option<bool>,
    pub averaging_nodes: Option<usize>,
    pub frequency: Option<FrequencyProfile>,
    pub potential: Option<PotentialKind>,
    pub structure: Option<StructureKind>,
    pub n: Option<usize>,
    pub q: Option<usize>,
    pub samples: Option<usize>,
    /// Sample points are drawn from `[−sample_radius, sample_radius]^dim`.
    pub sample_radius: Option<f64>,
    /// Coordinate-name pairs for `brackets`.
    pub pairs: Option<Vec<(String, String)>>,
}

impl<'de> Deserialize<'de> for ScenarioInput {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ScenarioInput;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a built-in scenario name or a scenario object")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
                Ok(ScenarioInput(ScenarioSection {
                    name: Some(v.to_string()),
                    ..ScenarioSection::default()
                }))
            }
            fn visit_map<A: MapAccess<'de>>(self, map: A) -> Result<Self::Value, A::Error> {
                ScenarioSection::deserialize(de::value::MapAccessDeserializer::new(map))
                    .map(ScenarioInput)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioInput(pub ScenarioSection);

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub svg: bool,
    pub csv_precision: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            svg: false,
            csv_precision: DEFAULT_CSV_PRECISION,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    command: Option<Command>,
    scenario: Option<ScenarioInput>,
    #[serde(default)]
    output: OutputSection,
    integrator: Option<IntegratorConfig>,
}

/// What a structure command operates on.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureJob {
    pub kind: StructureKind,
    pub n: usize,
    pub q: usize,
    pub samples: usize,
    pub seed: u64,
    pub sample_radius: f64,
    pub pairs: Option<Vec<(String, String)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Structure(StructureJob),
    Scenario(ScenarioConfig),
    Compare(ComparisonConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub command: Command,
    pub job: Job,
    pub output: OutputSection,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> CliResult<CliConfig> {
    parse_config_with(text, None, None)
}

/// As [`parse_config`], with the command optionally supplied from outside
/// the document and the sampler seed optionally overridden.
pub fn parse_config_with(
    text: &str,
    command: Option<Command>,
    seed_override: Option<u64>,
) -> CliResult<CliConfig> {
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: Document = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::ConfigParse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| CliError::ConfigParse {
        path: ".".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    resolve(doc, command, seed_override)
}

/// `QCOSYM_SEED`, when set to an integer.
pub fn seed_from_env() -> CliResult<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            CliError::ConfigValidation(format!("{SEED_ENV} must be an integer, got `{v}`"))
        }),
        Err(_) => Ok(None),
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::ConfigValidation(msg.into())
}

fn resolve(
    doc: Document,
    command: Option<Command>,
    seed_override: Option<u64>,
) -> CliResult<CliConfig> {
    let command = match (command, doc.command) {
        (Some(c), _) | (None, Some(c)) => c,
        (None, None) => return Err(invalid("missing `command`")),
    };
    let output = doc.output;
    if !(6..=17).contains(&output.csv_precision) {
        return Err(invalid(format!(
            "output.csv_precision must lie in [6, 17], got {}",
            output.csv_precision
        )));
    }
    let section = doc.scenario.map(|s| s.0).unwrap_or_default();
    let job = match command {
        Command::Validate | Command::Brackets => {
            Job::Structure(structure_job(&section, command, seed_override)?)
        }
        Command::Simulate | Command::Average => {
            let mut sc = scenario_config(&section, doc.integrator, seed_override)?;
            if command == Command::Average {
                match sc.case {
                    ScenarioCase::CaseB => sc.case = ScenarioCase::CaseBAveraged,
                    ScenarioCase::CaseBAveraged => {}
                    other => {
                        return Err(invalid(format!(
                            "`average` needs a case-b scenario, got {other:?}"
                        )))
                    }
                }
            }
            Job::Scenario(sc)
        }
        Command::Compare => {
            let dt = doc.integrator.map(|i| i.dt).unwrap_or(DEFAULT_COMPARE_DT);
            let scenario = scenario_config(&section, None, seed_override)?;
            if scenario.eps <= 0.0 {
                return Err(invalid("`compare` needs eps > 0"));
            }
            if !(dt.is_finite() && dt > 0.0 && dt <= 1.0 / scenario.eps) {
                return Err(invalid(format!(
                    "integrator.dt = {dt} must lie in (0, 1/eps]"
                )));
            }
            Job::Compare(ComparisonConfig {
                scenario,
                dt,
                secular_tau_average: section.secular_tau_average.unwrap_or(false),
            })
        }
    };
    Ok(CliConfig {
        command,
        job,
        output,
    })
}

fn builtin_case(name: &str) -> Option<ScenarioCase> {
    match name {
        "case-a" => Some(ScenarioCase::CaseA),
        "case-b" => Some(ScenarioCase::CaseB),
        "case-b-averaged" => Some(ScenarioCase::CaseBAveraged),
        "custom" => Some(ScenarioCase::Custom),
        _ => None,
    }
}

fn reject_structure_fields(s: &ScenarioSection) -> CliResult<()> {
    let extra = [
        ("structure", s.structure.is_some()),
        ("n", s.n.is_some()),
        ("q", s.q.is_some()),
        ("samples", s.samples.is_some()),
        ("sample_radius", s.sample_radius.is_some()),
        ("pairs", s.pairs.is_some()),
    ];
    match extra.iter().find(|(_, present)| *present) {
        Some((name, _)) => Err(invalid(format!(
            "scenario.{name} only applies to validate/brackets"
        ))),
        None => Ok(()),
    }
}

fn scenario_config(
    s: &ScenarioSection,
    integrator: Option<IntegratorConfig>,
    seed_override: Option<u64>,
) -> CliResult<ScenarioConfig> {
    reject_structure_fields(s)?;
    let named = match &s.name {
        Some(n) => Some(builtin_case(n).ok_or_else(|| invalid(format!("unknown scenario `{n}`")))?),
        None => None,
    };
    let case = match (named, s.case) {
        (Some(a), Some(b)) if a != b => {
            return Err(invalid(format!(
                "scenario name `{}` conflicts with case {b:?}",
                s.name.as_deref().unwrap_or("")
            )))
        }
        (Some(c), _) | (None, Some(c)) => c,
        (None, None) => return Err(invalid("scenario needs a `name` or a `case`")),
    };
    let mut c = ScenarioConfig::builtin(case);
    if let Some(v) = s.eps {
        c.eps = v;
    }
    if let Some(v) = s.x0 {
        c.x0 = v;
    }
    if let Some(v) = s.t_max {
        c.t_max = v;
    }
    if let Some(v) = s.seed {
        c.seed = v;
    }
    if let Some(v) = s.omega0 {
        c.omega0 = v;
    }
    c.action_override = s.action_override.or(c.action_override);
    if let Some(v) = s.secular_tau_average {
        c.secular_tau_average = v;
    }
    if let Some(v) = s.averaging_nodes {
        c.averaging_nodes = v;
    }
    if let Some(v) = s.frequency {
        c.frequency = v;
    }
    if let Some(v) = s.potential {
        c.potential = v;
    }
    if let Some(i) = integrator {
        c.integrator = i;
    }
    if let Some(seed) = seed_override {
        c.seed = seed;
    }
    if let FrequencyProfile::Constant(w) = c.frequency {
        if !(w.is_finite() && w > 0.0) {
            return Err(invalid(format!(
                "scenario.frequency value must be positive, got {w}"
            )));
        }
    }
    c.validate().map_err(|e| invalid(e.to_string()))?;
    Ok(c)
}

fn structure_job(
    s: &ScenarioSection,
    command: Command,
    seed_override: Option<u64>,
) -> CliResult<StructureJob> {
    let (kind, n, q) = match s.name.as_deref() {
        None => (s.structure.unwrap_or(StructureKind::Standard), 1, 1),
        Some("standard-example") => (StructureKind::Standard, 1, 1),
        Some("fast-slow") | Some("case-a") | Some("case-b") | Some("case-b-averaged") => {
            (StructureKind::FastSlow, 2, 2)
        }
        Some("warped") => (StructureKind::Warped, 1, 1),
        Some("twisted-example") => (StructureKind::Twisted, 1, 1),
        Some(other) => return Err(invalid(format!("unknown structure `{other}`"))),
    };
    let kind = match (s.name.is_some(), s.structure) {
        (true, Some(k)) if k != kind => {
            return Err(invalid("scenario.name conflicts with scenario.structure"))
        }
        _ => kind,
    };
    let (n, q) = match kind {
        StructureKind::Standard => (s.n.unwrap_or(n), s.q.unwrap_or(q)),
        _ if s.n.is_some() || s.q.is_some() => {
            return Err(invalid(
                "scenario.n and scenario.q only apply to the standard structure",
            ))
        }
        _ => (n, q),
    };
    if n == 0 || q == 0 {
        return Err(invalid("scenario.n and scenario.q must be at least 1"));
    }
    let default_samples = if command == Command::Brackets { 4 } else { 64 };
    let samples = s.samples.unwrap_or(default_samples);
    if samples == 0 {
        return Err(invalid("scenario.samples must be at least 1"));
    }
    let sample_radius = s.sample_radius.unwrap_or(2.0);
    if !(sample_radius.is_finite() && sample_radius > 0.0) {
        return Err(invalid("scenario.sample_radius must be positive"));
    }
    if s.pairs.is_some() && command != Command::Brackets {
        return Err(invalid("scenario.pairs only applies to brackets"));
    }
    Ok(StructureJob {
        kind,
        n,
        q,
        samples,
        seed: seed_override
            .or(s.seed)
            .unwrap_or(qcosym_core::sampling::DEFAULT_SEED),
        sample_radius,
        pairs: s.pairs.clone(),
    })
}
