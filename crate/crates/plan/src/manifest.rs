//! Run manifests: everything needed to reproduce an output document.

use std::path::Path;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::files::{parse_json, AssignmentFile, CampaignFile, GaDto, InputError, ScenarioFile};

pub const TOOL: &str = "miab-plan";

/// Resolved inputs of one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "command", rename_all = "snake_case", deny_unknown_fields)]
pub enum RunSpec {
    Evaluate { scenario: ScenarioFile, assignment: AssignmentFile },
    Solve { scenario: ScenarioFile, ga: GaDto, seed: u64 },
    Oracle { scenario: ScenarioFile, grid_step_m: f64 },
    Campaign { config: CampaignFile },
}

impl RunSpec {
    pub fn command(&self) -> &'static str {
        match self {
            Self::Evaluate { .. } => "evaluate",
            Self::Solve { .. } => "solve",
            Self::Oracle { .. } => "oracle",
            Self::Campaign { .. } => "campaign",
        }
    }
}

/// Modelling choices the outputs depend on, echoed for the reader.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Decisions {
    pub los_rule: String,
    pub out_of_range_links: String,
    pub penalty: String,
    pub selection: String,
    pub crossover: String,
    pub mutation: String,
    pub initial_population: String,
    pub oracle_tie_break: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v1_mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacle_footprint_m: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacle_height_m: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ga: Option<GaDto>,
}

impl Decisions {
    pub fn for_spec(spec: &RunSpec) -> Self {
        let mut d = Self {
            los_rule: "NLoS when the segment enters an obstacle interior by more than 1e-9 m; grazing contact is LoS".into(),
            out_of_range_links: "path loss evaluated at the nearest in-range distance, excess reported as a violation".into(),
            penalty: "fitness = objective - weight * normalised violation (soft penalty); weight defaults to the objective upper bound".into(),
            selection: "binary tournament on penalised fitness, lower index wins ties; elites copied unchanged".into(),
            crossover: "uniform-weight arithmetic blend of positions, uniform exchange of cells and donors".into(),
            mutation: "Gaussian position step with sigma = 5% of the area bounding-box diagonal, or with probability 0.1 a uniform redraw in the area; uniform resample of cells and donors".into(),
            initial_population: "genome 0 puts every UE on its nearest FIAB; the rest are uniform".into(),
            oracle_tie_break: "first strict improvement in (grid index, UE cells, MIAB donors) lexicographic order".into(),
            v1_mode: None,
            obstacle_footprint_m: None,
            obstacle_height_m: None,
            ga: None,
        };
        match spec {
            RunSpec::Solve { ga, .. } => d.ga = Some(ga.clone()),
            RunSpec::Campaign { config } => {
                d.v1_mode = Some(
                    if config.v1_with_miab { "V1 = V0 + obstacles + MIAB (PF)" } else { "V1 = V0 + obstacles, no MIAB" }.into(),
                );
                d.obstacle_footprint_m = Some(config.obstacle_footprint_m);
                d.obstacle_height_m = Some(config.obstacle_height_m);
                d.ga = Some(config.ga.clone());
            }
            _ => {}
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub master_seed: u64,
    pub run: RunSpec,
    pub decisions: Decisions,
}

impl RunManifest {
    pub fn new(master_seed: u64, run: RunSpec) -> Self {
        let decisions = Decisions::for_spec(&run);
        Self { tool: TOOL.into(), version: env!("CARGO_PKG_VERSION").into(), master_seed, run, decisions }
    }

    /// Reads a manifest, either bare or embedded under `manifest` in an
    /// output document.
    pub fn load(path: &Path) -> Result<Self, InputError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| InputError::new(&name, e.to_string()))?;
        let value: serde_json::Value = parse_json(&text, &name)?;
        let inner = match value.get("manifest") {
            Some(m) => m.to_string(),
            None => text,
        };
        parse_json(&inner, &name)
    }
}
