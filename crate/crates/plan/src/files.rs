//! JSON documents read by the CLI and their conversion into core types.
//!
//! Every document rejects unknown fields. Lengths are metres, carrier
//! frequencies GHz and powers dBm.

use std::fs;
use std::path::Path;

use miab_core::experiments::{default_areas, CampaignConfig, SolverChoice};
use miab_core::geometry::{AreaPolygon, HalfPlane};
use miab_core::network::NamedArea;
use miab_core::{CellId, Cuboid, GaConfig, Point3, RadioParams, SchedulerKind, Scenario, ScenarioParts};
use schemars::JsonSchema;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Failure to turn an input file into a valid model object.
#[derive(Debug, thiserror::Error)]
#[error("{source_name}: {message}")]
pub struct InputError {
    pub source_name: String,
    pub message: String,
}

impl InputError {
    pub fn new(source_name: impl Into<String>, message: impl Into<String>) -> Self {
        Self { source_name: source_name.into(), message: message.into() }
    }
}

/// Parses `text`, reporting the JSON path, line and column of the first error.
pub fn parse_json<T: DeserializeOwned>(text: &str, source_name: &str) -> Result<T, InputError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let at = if path.is_empty() || path == "." { String::new() } else { format!("field `{path}`: ") };
        InputError::new(source_name, format!("{at}line {}, column {}: {inner}", inner.line(), inner.column()))
    })?;
    de.end().map_err(|e| InputError::new(source_name, format!("line {}, column {}: {e}", e.line(), e.column())))?;
    Ok(value)
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| InputError::new(&name, e.to_string()))?;
    parse_json(&text, &name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub enum SchedulerDto {
    #[serde(rename = "PF", alias = "pf")]
    Pf,
    #[serde(rename = "RR", alias = "rr")]
    Rr,
}

impl From<SchedulerDto> for SchedulerKind {
    fn from(s: SchedulerDto) -> Self {
        match s {
            SchedulerDto::Pf => SchedulerKind::Pf,
            SchedulerDto::Rr => SchedulerKind::Rr,
        }
    }
}

/// Convex area given either by its corners (counter-clockwise) or by
/// half-planes `a*x + b*y <= c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AreaDto {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_planes: Option<Vec<[f64; 3]>>,
}

impl AreaDto {
    pub fn from_polygon(name: &str, polygon: &AreaPolygon) -> Self {
        Self {
            name: name.to_owned(),
            vertices: Some(polygon.vertices().iter().map(|&(x, y)| [x, y]).collect()),
            half_planes: None,
        }
    }

    pub fn to_area(&self, field: &str) -> Result<NamedArea, String> {
        let polygon = match (&self.vertices, &self.half_planes) {
            (Some(v), None) => {
                let corners: Vec<(f64, f64)> = v.iter().map(|&[x, y]| (x, y)).collect();
                AreaPolygon::from_vertices(&corners)
            }
            (None, Some(h)) => AreaPolygon::new(h.iter().map(|&[a, b, c]| HalfPlane { a, b, c }).collect()),
            _ => return Err(format!("{field}: give exactly one of `vertices` or `half_planes`")),
        }
        .map_err(|e| format!("{field}: {e}"))?;
        Ok(NamedArea { name: self.name.clone(), polygon })
    }
}

/// Obstacle as an axis-aligned box or as eight vertices (bottom face
/// counter-clockwise seen from above, then the top face in the same order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ObstacleDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<[[f64; 3]; 8]>,
}

impl ObstacleDto {
    pub fn to_cuboid(&self, field: &str) -> Result<Cuboid, String> {
        let p = |[x, y, z]: [f64; 3]| Point3::new(x, y, z);
        match (self.min, self.max, self.vertices) {
            (Some(lo), Some(hi), None) => Cuboid::axis_aligned(p(lo), p(hi)),
            (None, None, Some(v)) => Cuboid::new(v.map(p)),
            _ => return Err(format!("{field}: give either `min` and `max` or `vertices`")),
        }
        .map_err(|e| format!("{field}: {e}"))
    }
}

/// Radio parameters; omitted fields take the built-in defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct RadioDto {
    pub pt_dbm: f64,
    pub numerology: u32,
    pub rb_per_slot: u32,
    pub subcarriers_per_rb: u32,
    pub scs_base_hz: f64,
    pub noise_exponent: f64,
    pub q_rx_lev_min_dbm: f64,
    pub se_slope: f64,
    pub se_intercept: f64,
    pub se_max: f64,
    pub f_miab_ghz: f64,
    pub f_fiab_ghz: f64,
    pub h_miab: f64,
    pub h_fiab: f64,
    pub h_ut: f64,
    pub h_e: f64,
}

impl Default for RadioDto {
    fn default() -> Self {
        RadioParams::default().into()
    }
}

impl From<RadioParams> for RadioDto {
    fn from(r: RadioParams) -> Self {
        Self {
            pt_dbm: r.pt_dbm,
            numerology: r.numerology,
            rb_per_slot: r.rb_per_slot,
            subcarriers_per_rb: r.subcarriers_per_rb,
            scs_base_hz: r.scs_base_hz,
            noise_exponent: r.noise_exponent,
            q_rx_lev_min_dbm: r.q_rx_lev_min_dbm,
            se_slope: r.se_slope,
            se_intercept: r.se_intercept,
            se_max: r.se_max,
            f_miab_ghz: r.f_miab_ghz,
            f_fiab_ghz: r.f_fiab_ghz,
            h_miab: r.h_miab,
            h_fiab: r.h_fiab,
            h_ut: r.h_ut,
            h_e: r.h_e,
        }
    }
}

impl From<&RadioDto> for RadioParams {
    fn from(r: &RadioDto) -> Self {
        Self {
            pt_dbm: r.pt_dbm,
            numerology: r.numerology,
            rb_per_slot: r.rb_per_slot,
            subcarriers_per_rb: r.subcarriers_per_rb,
            scs_base_hz: r.scs_base_hz,
            noise_exponent: r.noise_exponent,
            q_rx_lev_min_dbm: r.q_rx_lev_min_dbm,
            se_slope: r.se_slope,
            se_intercept: r.se_intercept,
            se_max: r.se_max,
            f_miab_ghz: r.f_miab_ghz,
            f_fiab_ghz: r.f_fiab_ghz,
            h_miab: r.h_miab,
            h_fiab: r.h_fiab,
            h_ut: r.h_ut,
            h_e: r.h_e,
        }
    }
}

fn default_scheduler() -> SchedulerDto {
    SchedulerDto::Pf
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub areas: Vec<AreaDto>,
    pub fiabs: Vec<[f64; 2]>,
    #[serde(default)]
    pub miab_count: usize,
    pub ues: Vec<[f64; 2]>,
    pub special_team: Vec<usize>,
    #[serde(default)]
    pub obstacles: Vec<ObstacleDto>,
    #[serde(default)]
    pub radio: RadioDto,
    #[serde(default = "default_scheduler")]
    pub scheduler: SchedulerDto,
    /// Index into `areas` of the area the MIABs are confined to.
    #[serde(default)]
    pub deployment_area: usize,
}

impl ScenarioFile {
    pub fn to_scenario(&self, source_name: &str) -> Result<Scenario, InputError> {
        let err = |m: String| InputError::new(source_name, m);
        let areas = self
            .areas
            .iter()
            .enumerate()
            .map(|(i, a)| a.to_area(&format!("areas[{i}]")))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let obstacles = self
            .obstacles
            .iter()
            .enumerate()
            .map(|(i, o)| o.to_cuboid(&format!("obstacles[{i}]")))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        Scenario::new(ScenarioParts {
            areas,
            fiabs: self.fiabs.iter().map(|&[x, y]| (x, y)).collect(),
            miab_count: self.miab_count,
            ues: self.ues.iter().map(|&[x, y]| (x, y)).collect(),
            special_team: self.special_team.clone(),
            obstacles,
            radio: (&self.radio).into(),
            scheduler: self.scheduler.into(),
            deployment_area: self.deployment_area,
        })
        .map_err(|e| err(e.to_string()))
    }
}

/// Cell reference written `F<k>` for FIAB `k` or `M<m>` for MIAB `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(try_from = "String", into = "String")]
pub struct CellRef(#[schemars(with = "String")] pub CellId);

impl TryFrom<String> for CellRef {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        let bad = || format!("invalid cell `{s}`, expected F<index> or M<index>");
        let (kind, index) = s.split_at_checked(1).ok_or_else(bad)?;
        let index: usize = index.parse().map_err(|_| bad())?;
        match kind {
            "F" | "f" => Ok(Self(CellId::Fiab(index))),
            "M" | "m" => Ok(Self(CellId::Miab(index))),
            _ => Err(bad()),
        }
    }
}

impl From<CellRef> for String {
    fn from(c: CellRef) -> Self {
        c.0.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AssignmentFile {
    #[serde(default)]
    pub miab_positions: Vec<[f64; 2]>,
    /// Serving cell of every UE, in UE order.
    pub ue_cells: Vec<CellRef>,
    /// Donor FIAB index of every MIAB.
    #[serde(default)]
    pub backhaul_donors: Vec<usize>,
}

impl AssignmentFile {
    pub fn to_assignment(&self) -> miab_core::Assignment {
        miab_core::Assignment {
            miab_xy: self.miab_positions.iter().map(|&[x, y]| (x, y)).collect(),
            ue_cell: self.ue_cells.iter().map(|c| c.0).collect(),
            backhaul_donor: self.backhaul_donors.clone(),
        }
    }

    pub fn from_assignment(a: &miab_core::Assignment) -> Self {
        Self {
            miab_positions: a.miab_xy.iter().map(|&(x, y)| [x, y]).collect(),
            ue_cells: a.ue_cell.iter().map(|&c| CellRef(c)).collect(),
            backhaul_donors: a.backhaul_donor.clone(),
        }
    }
}

/// Genetic-algorithm settings; the seed is given separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct GaDto {
    pub population_size: usize,
    pub mutation_rate: f64,
    pub crossover_rate: f64,
    pub generations: usize,
    pub elite_count: usize,
    /// Bit/s per unit of normalised violation; absent means the objective
    /// upper bound of the scenario.
    pub penalty_weight: Option<f64>,
}

impl Default for GaDto {
    fn default() -> Self {
        let g = GaConfig::default();
        Self {
            population_size: g.population_size,
            mutation_rate: g.mutation_rate,
            crossover_rate: g.crossover_rate,
            generations: g.generations,
            elite_count: g.elite_count,
            penalty_weight: g.penalty_weight,
        }
    }
}

impl GaDto {
    pub fn to_config(&self, seed: u64) -> GaConfig {
        GaConfig {
            population_size: self.population_size,
            mutation_rate: self.mutation_rate,
            crossover_rate: self.crossover_rate,
            generations: self.generations,
            elite_count: self.elite_count,
            seed,
            penalty_weight: self.penalty_weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolverDto {
    Ga,
    Oracle { grid_step_m: f64 },
}

/// Campaign configuration; omitted fields take the built-in defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignFile {
    pub areas: Vec<AreaDto>,
    pub scenarios_per_area: usize,
    pub ues_total: usize,
    pub special_team_size: usize,
    pub obstacles_per_scenario: usize,
    pub obstacle_footprint_m: [f64; 2],
    pub obstacle_height_m: [f64; 2],
    pub miab_count: usize,
    /// Master seed; absent means the `MIAB_PLAN_SEED` variable or 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub ga: GaDto,
    pub radio: RadioDto,
    pub solver: SolverDto,
    /// Give V1 a MIAB (scheduled PF) instead of the obstacle-only baseline.
    pub v1_with_miab: bool,
}

impl Default for CampaignFile {
    fn default() -> Self {
        let c = CampaignConfig::default();
        Self {
            areas: default_areas().iter().map(|a| AreaDto::from_polygon(&a.name, &a.polygon)).collect(),
            scenarios_per_area: c.scenarios_per_area,
            ues_total: c.ues_total,
            special_team_size: c.special_team_size,
            obstacles_per_scenario: c.obstacles_per_scenario,
            obstacle_footprint_m: [c.obstacle_footprint_m.0, c.obstacle_footprint_m.1],
            obstacle_height_m: [c.obstacle_height_m.0, c.obstacle_height_m.1],
            miab_count: c.miab_count,
            seed: None,
            ga: GaDto::default(),
            radio: c.radio.into(),
            solver: SolverDto::Ga,
            v1_with_miab: c.v1_with_miab,
        }
    }
}

impl CampaignFile {
    pub fn to_config(&self, source_name: &str) -> Result<CampaignConfig, InputError> {
        let areas = self
            .areas
            .iter()
            .enumerate()
            .map(|(i, a)| a.to_area(&format!("areas[{i}]")))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|m| InputError::new(source_name, m))?;
        let config = CampaignConfig {
            areas,
            scenarios_per_area: self.scenarios_per_area,
            ues_total: self.ues_total,
            special_team_size: self.special_team_size,
            obstacles_per_scenario: self.obstacles_per_scenario,
            obstacle_footprint_m: (self.obstacle_footprint_m[0], self.obstacle_footprint_m[1]),
            obstacle_height_m: (self.obstacle_height_m[0], self.obstacle_height_m[1]),
            miab_count: self.miab_count,
            seed: self.seed.unwrap_or(0),
            ga: self.ga.to_config(0),
            radio: (&self.radio).into(),
            solver: match self.solver {
                SolverDto::Ga => SolverChoice::Ga,
                SolverDto::Oracle { grid_step_m } => SolverChoice::Oracle { grid_step_m },
            },
            v1_with_miab: self.v1_with_miab,
        };
        config.validate().map_err(|e| InputError::new(source_name, e.to_string()))?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCENARIO: &str = r#"{
        "areas": [{"name": "A0", "vertices": [[-300, -300], [300, -300], [300, 300], [-300, 300]]}],
        "fiabs": [[0, 0]],
        "ues": [[60, 0], [0, -80], [120, 50], [-150, 30], [200, -200]],
        "special_team": [0, 1],
        "obstacles": [{"min": [20, 20, 0], "max": [40, 40, 12]}]
    }"#;

    #[test]
    fn scenario_round_trip() {
        let file: ScenarioFile = parse_json(SCENARIO, "s.json").unwrap();
        let s1 = file.to_scenario("s.json").unwrap();
        let again: ScenarioFile = parse_json(&serde_json::to_string(&file).unwrap(), "s.json").unwrap();
        assert_eq!(again, file);
        assert_eq!(again.to_scenario("s.json").unwrap(), s1);
        assert_eq!(s1.radio(), &RadioParams::default());
        assert_eq!(s1.scheduler(), SchedulerKind::Pf);
    }

    #[test]
    fn unknown_field_is_located() {
        let text = SCENARIO.replace("\"special_team\"", "\"team\": 1, \"special_team\"");
        let err = parse_json::<ScenarioFile>(&text, "s.json").unwrap_err();
        assert!(err.message.contains("unknown field `team`"), "{err}");
        assert!(err.message.contains("line 5"), "{err}");
    }

    #[test]
    fn nested_type_error_names_the_field() {
        let text = SCENARIO.replace("\"max\": [40, 40, 12]", "\"max\": [40, \"x\", 12]");
        let err = parse_json::<ScenarioFile>(&text, "s.json").unwrap_err();
        assert!(err.message.contains("obstacles[0].max"), "{err}");
    }

    #[test]
    fn semantic_errors_surface() {
        let text = SCENARIO.replace("[60, 0]", "[5, 0]");
        let file: ScenarioFile = parse_json(&text, "s.json").unwrap();
        let err = file.to_scenario("s.json").unwrap_err();
        assert!(err.message.contains("UE 0"), "{err}");
    }

    #[test]
    fn cell_refs() {
        assert_eq!(CellRef::try_from("M0".to_owned()), Ok(CellRef(CellId::Miab(0))));
        assert_eq!(CellRef::try_from("F12".to_owned()), Ok(CellRef(CellId::Fiab(12))));
        assert!(CellRef::try_from("X1".to_owned()).is_err());
        assert!(CellRef::try_from(String::new()).is_err());
        assert_eq!(String::from(CellRef(CellId::Fiab(3))), "F3");
    }

    #[test]
    fn campaign_defaults_resolve() {
        let file: CampaignFile = parse_json("{}", "c.json").unwrap();
        let config = file.to_config("c.json").unwrap();
        assert_eq!(config.areas.len(), 5);
        let (got, want) = (&config.areas[0].polygon, &default_areas()[0].polygon);
        assert_eq!(got.vertices(), want.vertices());
        assert_eq!(got.bounding_box(), want.bounding_box());
        let bad: Result<CampaignFile, _> = parse_json(r#"{"solver": {"kind": "oracle"}}"#, "c.json");
        assert!(bad.is_err());
    }
}
