//! Campaign harness: random scenario families, the V0 to V5 variant matrix
//! and the gain, distance and CDF metrics.
//!
//! A campaign visits every (area, scenario index) pair. Each pair draws one
//! layout from its own random stream and evaluates all six variants on it,
//! so variants differ only in MIAB presence, obstacles and scheduler.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, RngCore};

use crate::capacity::{CellId, SchedulerKind};
use crate::geometry::{dist2d, AreaPolygon, Cuboid, Point3};
use crate::network::{evaluate, Assignment, Evaluation, NamedArea, Scenario, ScenarioError, ScenarioParts};
use crate::optimizer::{solve_ga, solve_oracle, GaConfig, GaConfigError, OracleError, SolveResult};
use crate::radio::{RadioParams, MAX_LINK_DISTANCE, MIN_LINK_DISTANCE};
use crate::rng::{pack, substream};

/// Layout draws attempted before a scenario is declared ungeneratable.
pub const MAX_LAYOUT_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VariantId {
    V0,
    V1,
    V2,
    V3,
    V4,
    V5,
}

impl VariantId {
    pub const ALL: [VariantId; 6] = [Self::V0, Self::V1, Self::V2, Self::V3, Self::V4, Self::V5];

    /// V1 carries a MIAB only in the alternative reading enabled by
    /// `v1_with_miab`.
    pub fn has_miab(self, v1_with_miab: bool) -> bool {
        match self {
            Self::V0 => false,
            Self::V1 => v1_with_miab,
            _ => true,
        }
    }

    pub fn has_obstacles(self) -> bool {
        matches!(self, Self::V1 | Self::V3 | Self::V5)
    }

    /// `None` where no MIAB exists and PF and RR coincide.
    pub fn scheduler(self, v1_with_miab: bool) -> Option<SchedulerKind> {
        match self {
            Self::V0 => None,
            Self::V1 => v1_with_miab.then_some(SchedulerKind::Pf),
            Self::V2 | Self::V3 => Some(SchedulerKind::Pf),
            Self::V4 | Self::V5 => Some(SchedulerKind::Rr),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        ["V0", "V1", "V2", "V3", "V4", "V5"][self.index()]
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.label().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolverChoice {
    Ga,
    Oracle { grid_step_m: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub areas: Vec<NamedArea>,
    pub scenarios_per_area: usize,
    pub ues_total: usize,
    pub special_team_size: usize,
    pub obstacles_per_scenario: usize,
    /// Side lengths of the obstacle footprint, sampled independently (m).
    pub obstacle_footprint_m: (f64, f64),
    pub obstacle_height_m: (f64, f64),
    pub miab_count: usize,
    pub seed: u64,
    /// Search settings; the seed field is replaced by a per-run seed.
    pub ga: GaConfig,
    pub radio: RadioParams,
    pub solver: SolverChoice,
    pub v1_with_miab: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            areas: default_areas(),
            scenarios_per_area: 5,
            ues_total: 5,
            special_team_size: 2,
            obstacles_per_scenario: 1,
            obstacle_footprint_m: (10.0, 40.0),
            obstacle_height_m: (6.0, 15.0),
            miab_count: 1,
            seed: 0,
            ga: GaConfig::default(),
            radio: RadioParams::default(),
            solver: SolverChoice::Ga,
            v1_with_miab: false,
        }
    }
}

/// Five synthetic port quays, long and narrow, a few hundred metres apart.
pub fn default_areas() -> Vec<NamedArea> {
    let quay = |name: &str, x0, y0, x1, y1| NamedArea {
        name: name.into(),
        polygon: AreaPolygon::rectangle(x0, y0, x1, y1).expect("built-in areas are valid"),
    };
    vec![
        quay("north-quay", 0.0, 0.0, 260.0, 10.0),
        quay("east-pier", 600.0, 100.0, 610.0, 360.0),
        quay("gate-road", -500.0, 300.0, -240.0, 312.0),
        quay("south-berth", 150.0, -520.0, 410.0, -510.0),
        quay("west-jetty", -700.0, -400.0, -688.0, -140.0),
    ]
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CampaignError {
    #[error("invalid campaign configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Ga(#[from] GaConfigError),
    #[error("area {area}: no valid layout after {attempts} attempts")]
    LayoutExhausted { area: usize, attempts: usize },
    #[error("area {area}: {source}")]
    Scenario { area: usize, source: ScenarioError },
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<(), CampaignError> {
        let range_ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi;
        if self.areas.is_empty() {
            return Err(CampaignError::InvalidConfig("at least one area is required"));
        }
        if self.scenarios_per_area == 0 || self.ues_total == 0 || self.special_team_size == 0 {
            return Err(CampaignError::InvalidConfig("scenario, UE and team counts must be at least 1"));
        }
        if self.special_team_size > self.ues_total {
            return Err(CampaignError::InvalidConfig("special team cannot exceed the UE count"));
        }
        if !range_ok(self.obstacle_footprint_m) || !range_ok(self.obstacle_height_m) {
            return Err(CampaignError::InvalidConfig("obstacle size ranges must be positive and ordered"));
        }
        if let SolverChoice::Oracle { grid_step_m } = self.solver {
            if !(grid_step_m.is_finite() && grid_step_m > 0.0) {
                return Err(CampaignError::InvalidConfig("oracle grid step must be positive"));
            }
        }
        self.radio.validate().map_err(|_| CampaignError::InvalidConfig("radio parameters are invalid"))?;
        self.ga.validate()?;
        Ok(())
    }
}

/// One random layout shared by all six variants.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFamily {
    pub area: usize,
    /// Layout without MIABs or obstacles, scheduled PF.
    pub base: ScenarioParts,
    pub obstacles: Vec<Cuboid>,
    pub miab_count: usize,
}

impl ScenarioFamily {
    pub fn variant(&self, variant: VariantId, v1_with_miab: bool) -> Scenario {
        let mut parts = self.base.clone();
        if variant.has_obstacles() {
            parts.obstacles = self.obstacles.clone();
        }
        if variant.has_miab(v1_with_miab) {
            parts.miab_count = self.miab_count;
        }
        parts.scheduler = variant.scheduler(v1_with_miab).unwrap_or(SchedulerKind::Pf);
        Scenario::new(parts).expect("family layouts are validated on generation")
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// Draws a layout in area `area`: FIAB, special team and obstacle centres
/// inside it, the remaining UEs over the union of all areas with each area
/// picked in proportion to its surface. Layouts with a UE closer than 10 m
/// (or further than 5 km) from the FIAB are redrawn.
pub fn generate_scenario<R: Rng + ?Sized>(
    config: &CampaignConfig,
    area: usize,
    rng: &mut R,
) -> Result<ScenarioFamily, CampaignError> {
    let polygon = &config.areas.get(area).ok_or(CampaignError::InvalidConfig("area index out of range"))?.polygon;
    let weights: Vec<f64> = config.areas.iter().map(|a| a.polygon.area()).collect();
    let total: f64 = weights.iter().sum();
    let exhausted = |_| CampaignError::LayoutExhausted { area, attempts: MAX_LAYOUT_ATTEMPTS };

    for _ in 0..MAX_LAYOUT_ATTEMPTS {
        let fiab = polygon.sample(rng).map_err(exhausted)?;
        let mut ues = Vec::with_capacity(config.ues_total);
        for _ in 0..config.special_team_size {
            ues.push(polygon.sample(rng).map_err(exhausted)?);
        }
        for _ in config.special_team_size..config.ues_total {
            let mut pick = rng.gen_range(0.0..total);
            let mut chosen = weights.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                if pick < *w {
                    chosen = i;
                    break;
                }
                pick -= w;
            }
            ues.push(config.areas[chosen].polygon.sample(rng).map_err(exhausted)?);
        }
        let mut obstacles = Vec::with_capacity(config.obstacles_per_scenario);
        for _ in 0..config.obstacles_per_scenario {
            let (cx, cy) = polygon.sample(rng).map_err(exhausted)?;
            let wx = uniform(rng, config.obstacle_footprint_m);
            let wy = uniform(rng, config.obstacle_footprint_m);
            let h = uniform(rng, config.obstacle_height_m);
            let cuboid = Cuboid::axis_aligned(
                Point3::new(cx - wx / 2.0, cy - wy / 2.0, 0.0),
                Point3::new(cx + wx / 2.0, cy + wy / 2.0, h),
            )
            .expect("positive obstacle extents");
            obstacles.push(cuboid);
        }

        let f = Point3::new(fiab.0, fiab.1, 0.0);
        let in_range = ues.iter().all(|&(x, y)| {
            let d = dist2d(Point3::new(x, y, 0.0), f);
            (MIN_LINK_DISTANCE..=MAX_LINK_DISTANCE).contains(&d)
        });
        if !in_range {
            continue;
        }
        let base = ScenarioParts {
            areas: config.areas.clone(),
            fiabs: vec![fiab],
            miab_count: 0,
            ues,
            special_team: (0..config.special_team_size).collect(),
            obstacles: Vec::new(),
            radio: config.radio.clone(),
            scheduler: SchedulerKind::Pf,
            deployment_area: area,
        };
        Scenario::new(base.clone()).map_err(|source| CampaignError::Scenario { area, source })?;
        return Ok(ScenarioFamily { area, base, obstacles, miab_count: config.miab_count });
    }
    Err(CampaignError::LayoutExhausted { area, attempts: MAX_LAYOUT_ATTEMPTS })
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("gain is undefined for a zero baseline")]
    ZeroBaseline,
    #[error("no values to summarise")]
    Empty,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("inter-distance needs a special team of 2, got {0}")]
    UnsupportedTeamSize(usize),
    #[error("percentile must lie in (0, 1]")]
    InvalidPercentile,
}

/// `(c_vx - c_v0) * 100 / c_v0`.
pub fn gain_percent(c_vx: f64, c_v0: f64) -> Result<f64, MetricError> {
    if c_v0 == 0.0 {
        return Err(MetricError::ZeroBaseline);
    }
    Ok((c_vx - c_v0) * 100.0 / c_v0)
}

/// Mean horizontal distance from each UE to its nearest FIAB.
pub fn avg_topology_distance(scenario: &Scenario) -> f64 {
    let ues = scenario.ues();
    let sum: f64 = ues
        .iter()
        .map(|&u| dist2d(u, scenario.fiabs()[scenario.nearest_fiab(u)]))
        .sum();
    sum / ues.len() as f64
}

/// Horizontal distance between the two special-team members.
pub fn inter_distance(scenario: &Scenario) -> Result<f64, MetricError> {
    match scenario.special_team() {
        &[a, b] => Ok(dist2d(scenario.ues()[a], scenario.ues()[b])),
        team => Err(MetricError::UnsupportedTeamSize(team.len())),
    }
}

/// Right-continuous step CDF: each distinct value with the fraction of
/// inputs at or below it.
pub fn empirical_cdf(values: &[f64]) -> Result<Vec<(f64, f64)>, MetricError> {
    let sorted = sorted_finite(values)?;
    let n = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 = frac,
            _ => out.push((v, frac)),
        }
    }
    Ok(out)
}

/// Nearest-rank percentile: the smallest value whose CDF reaches `p`.
pub fn percentile(values: &[f64], p: f64) -> Result<f64, MetricError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(MetricError::InvalidPercentile);
    }
    let sorted = sorted_finite(values)?;
    let rank = libm::ceil(p * sorted.len() as f64) as usize;
    Ok(sorted[rank.clamp(1, sorted.len()) - 1])
}

fn sorted_finite(values: &[f64]) -> Result<Vec<f64>, MetricError> {
    if values.is_empty() {
        return Err(MetricError::Empty);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(MetricError::NonFinite);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Ok,
    Failed(String),
}

/// How a record's assignment was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Every UE on its nearest FIAB, no search.
    Direct,
    Ga,
    Oracle,
}

impl SolverKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Direct => "direct",
            Self::Ga => "ga",
            Self::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverMeta {
    pub kind: SolverKind,
    /// Search seed; 0 for direct evaluations.
    pub seed: u64,
    pub generations_run: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub area_id: usize,
    pub area_name: String,
    pub scenario_index: usize,
    pub scenario_seed: u64,
    pub variant: VariantId,
    pub scheduler: Option<SchedulerKind>,
    pub status: RunStatus,
    pub objective_bps: f64,
    /// Against the V0 run of the same (area, scenario); `None` when that
    /// baseline is zero or failed.
    pub gain_percent: Option<f64>,
    pub miab_position: Option<(f64, f64)>,
    pub associations: Vec<CellId>,
    pub backhaul_donor: Option<usize>,
    pub backhaul_capacity_bps: Option<f64>,
    /// Sum of capacities of UEs served by the MIAB.
    pub miab_served_bps: Option<f64>,
    pub avg_topology_distance_m: f64,
    pub inter_distance_m: Option<f64>,
    pub feasible: bool,
    pub solver: SolverMeta,
}

/// Gain summary of one variant over the successful runs with a defined gain.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantSummary {
    pub variant: VariantId,
    pub runs: usize,
    pub feasible_runs: usize,
    pub min_gain: Option<f64>,
    pub median_gain: Option<f64>,
    pub p90_gain: Option<f64>,
    pub cdf: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub summaries: Vec<VariantSummary>,
    pub failed_runs: usize,
}

impl CampaignReport {
    pub fn summary(&self, variant: VariantId) -> &VariantSummary {
        &self.summaries[variant.index()]
    }
}

/// Seed of the layout for `(area, scenario)` under `master`.
pub fn scenario_seed(master: u64, area: usize, scenario: usize) -> u64 {
    substream(master, pack(area as u32, scenario as u32)).next_u64()
}

fn run_seed(scenario_seed: u64, variant: VariantId) -> u64 {
    substream(scenario_seed, 1 + variant.index() as u64).next_u64()
}

#[allow(clippy::too_many_arguments)]
fn record_from(
    config: &CampaignConfig,
    family: &ScenarioFamily,
    scenario_index: usize,
    seed: u64,
    variant: VariantId,
    scenario: &Scenario,
    assignment: &Assignment,
    evaluation: &Evaluation,
    solver: SolverMeta,
) -> RunRecord {
    let backhaul = evaluation.backhaul_links.first();
    RunRecord {
        area_id: family.area,
        area_name: config.areas[family.area].name.clone(),
        scenario_index,
        scenario_seed: seed,
        variant,
        scheduler: variant.scheduler(config.v1_with_miab),
        status: RunStatus::Ok,
        objective_bps: evaluation.objective_bps,
        gain_percent: None,
        miab_position: assignment.miab_xy.first().copied(),
        associations: assignment.ue_cell.clone(),
        backhaul_donor: assignment.backhaul_donor.first().copied(),
        backhaul_capacity_bps: backhaul.map(|b| b.capacity_bps),
        miab_served_bps: backhaul.map(|b| b.served_bps),
        avg_topology_distance_m: avg_topology_distance(scenario),
        inter_distance_m: inter_distance(scenario).ok(),
        feasible: evaluation.feasible,
        solver,
    }
}

fn failed_record(config: &CampaignConfig, area: usize, scenario_index: usize, seed: u64, variant: VariantId, reason: String) -> RunRecord {
    RunRecord {
        area_id: area,
        area_name: config.areas[area].name.clone(),
        scenario_index,
        scenario_seed: seed,
        variant,
        scheduler: variant.scheduler(config.v1_with_miab),
        status: RunStatus::Failed(reason),
        objective_bps: 0.0,
        gain_percent: None,
        miab_position: None,
        associations: Vec::new(),
        backhaul_donor: None,
        backhaul_capacity_bps: None,
        miab_served_bps: None,
        avg_topology_distance_m: 0.0,
        inter_distance_m: None,
        feasible: false,
        solver: SolverMeta { kind: SolverKind::Direct, seed: 0, generations_run: 0, evaluations: 0 },
    }
}

/// The six records of one (area, scenario) pair, V0 first.
pub fn run_family(config: &CampaignConfig, area: usize, scenario_index: usize) -> Vec<RunRecord> {
    let seed = scenario_seed(config.seed, area, scenario_index);
    let mut rng = substream(seed, 0);
    let family = match generate_scenario(config, area, &mut rng) {
        Ok(f) => f,
        Err(e) => {
            let reason = format!("scenario {scenario_index}, seed {seed}: {e}");
            return VariantId::ALL
                .into_iter()
                .map(|v| failed_record(config, area, scenario_index, seed, v, reason.clone()))
                .collect();
        }
    };

    let mut records: Vec<RunRecord> = VariantId::ALL
        .into_iter()
        .map(|variant| {
            let scenario = family.variant(variant, config.v1_with_miab);
            if scenario.miab_count() == 0 {
                let a = Assignment::direct(&scenario, Vec::new());
                let e = evaluate(&scenario, &a).expect("direct assignment is structurally valid");
                let meta = SolverMeta { kind: SolverKind::Direct, seed: 0, generations_run: 0, evaluations: 1 };
                return record_from(config, &family, scenario_index, seed, variant, &scenario, &a, &e, meta);
            }
            let rs = run_seed(seed, variant);
            let solved: Result<(SolveResult, SolverKind), String> = match config.solver {
                SolverChoice::Ga => {
                    let ga = GaConfig { seed: rs, ..config.ga.clone() };
                    solve_ga(&scenario, &ga).map(|r| (r, SolverKind::Ga)).map_err(|e| format!("{e}"))
                }
                SolverChoice::Oracle { grid_step_m } => solve_oracle(&scenario, grid_step_m)
                    .map(|r| (r, SolverKind::Oracle))
                    .map_err(|e: OracleError| format!("{e}")),
            };
            match solved {
                Ok((r, kind)) => {
                    let meta = SolverMeta {
                        kind,
                        seed: if kind == SolverKind::Ga { rs } else { 0 },
                        generations_run: r.generations_run,
                        evaluations: r.evaluations,
                    };
                    record_from(config, &family, scenario_index, seed, variant, &scenario, &r.best_assignment, &r.best_evaluation, meta)
                }
                Err(reason) => failed_record(config, area, scenario_index, seed, variant, reason),
            }
        })
        .collect();

    let baseline = match (&records[0].status, records[0].objective_bps) {
        (RunStatus::Ok, c) if c > 0.0 => Some(c),
        _ => None,
    };
    for r in &mut records {
        if r.status == RunStatus::Ok {
            r.gain_percent = baseline.and_then(|c| gain_percent(r.objective_bps, c).ok());
        }
    }
    records
}

/// Runs every (area, scenario) family and summarises gains per variant.
///
/// Records come out in (area, scenario, variant) order whatever the
/// execution order.
pub fn run_campaign(config: &CampaignConfig) -> Result<(Vec<RunRecord>, CampaignReport), CampaignError> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = (0..config.areas.len())
        .flat_map(|a| (0..config.scenarios_per_area).map(move |s| (a, s)))
        .collect();
    let run = |&(a, s): &(usize, usize)| run_family(config, a, s);
    #[cfg(feature = "parallel")]
    let families: Vec<Vec<RunRecord>> = {
        use rayon::prelude::*;
        jobs.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let families: Vec<Vec<RunRecord>> = jobs.iter().map(run).collect();
    let records: Vec<RunRecord> = families.into_iter().flatten().collect();
    let report = summarize(&records);
    Ok((records, report))
}

pub fn summarize(records: &[RunRecord]) -> CampaignReport {
    let summaries = VariantId::ALL
        .into_iter()
        .map(|variant| {
            let runs: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.variant == variant && r.status == RunStatus::Ok)
                .collect();
            let gains: Vec<f64> = runs.iter().filter_map(|r| r.gain_percent).collect();
            VariantSummary {
                variant,
                runs: runs.len(),
                feasible_runs: runs.iter().filter(|r| r.feasible).count(),
                min_gain: percentile(&gains, f64::MIN_POSITIVE).ok(),
                median_gain: percentile(&gains, 0.5).ok(),
                p90_gain: percentile(&gains, 0.9).ok(),
                cdf: empirical_cdf(&gains).unwrap_or_default(),
            }
        })
        .collect();
    let failed_runs = records.iter().filter(|r| r.status != RunStatus::Ok).count();
    CampaignReport { summaries, failed_runs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert_eq, proptest};
    use rand::SeedableRng;

    fn small_config() -> CampaignConfig {
        CampaignConfig {
            scenarios_per_area: 1,
            ga: GaConfig { generations: 5, population_size: 10, ..GaConfig::default() },
            ..CampaignConfig::default()
        }
    }

    #[test]
    fn variant_table() {
        use VariantId::*;
        assert!(!V0.has_miab(false) && !V0.has_obstacles() && V0.scheduler(false).is_none());
        assert!(!V1.has_miab(false) && V1.has_obstacles() && V1.scheduler(false).is_none());
        assert!(V1.has_miab(true) && V1.scheduler(true) == Some(SchedulerKind::Pf));
        assert_eq!((V2.has_obstacles(), V2.scheduler(false)), (false, Some(SchedulerKind::Pf)));
        assert_eq!((V3.has_obstacles(), V3.scheduler(false)), (true, Some(SchedulerKind::Pf)));
        assert_eq!((V4.has_obstacles(), V4.scheduler(false)), (false, Some(SchedulerKind::Rr)));
        assert_eq!((V5.has_obstacles(), V5.scheduler(false)), (true, Some(SchedulerKind::Rr)));
        assert_eq!(VariantId::parse("v3"), Some(V3));
        assert_eq!(V5.to_string(), "V5");
    }

    #[test]
    fn gains() {
        assert_eq!(gain_percent(150.0, 50.0), Ok(200.0));
        assert_eq!(gain_percent(50.0, 50.0), Ok(0.0));
        assert_eq!(gain_percent(25.0, 50.0), Ok(-50.0));
        assert_eq!(gain_percent(1.0, 0.0), Err(MetricError::ZeroBaseline));
    }

    #[test]
    fn cdf_and_percentiles() {
        assert_eq!(empirical_cdf(&[10.0]).unwrap(), vec![(10.0, 1.0)]);
        let cdf = empirical_cdf(&[4.0, 2.0, 3.0, 1.0]).unwrap();
        assert_eq!(cdf[1], (2.0, 0.5));
        assert_eq!(empirical_cdf(&[1.0, 1.0, 2.0]).unwrap(), vec![(1.0, 2.0 / 3.0), (2.0, 1.0)]);
        assert_eq!(empirical_cdf(&[]), Err(MetricError::Empty));
        assert_eq!(empirical_cdf(&[f64::NAN]), Err(MetricError::NonFinite));
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(percentile(&v, 0.9), Ok(9.0));
        assert_eq!(percentile(&v, 0.5), Ok(5.0));
        assert_eq!(percentile(&v, 0.0), Err(MetricError::InvalidPercentile));
    }

    proptest! {
        #[test]
        fn percentile_matches_counting_oracle(v in proptest::collection::vec(-500.0f64..500.0, 1..60), p in 0.01f64..=1.0) {
            let n = v.len() as f64;
            let oracle = v
                .iter()
                .copied()
                .filter(|&c| v.iter().filter(|&&x| x <= c).count() as f64 >= p * n - 1e-12)
                .fold(f64::INFINITY, f64::min);
            prop_assert_eq!(percentile(&v, p).unwrap(), oracle);
        }

        #[test]
        fn cdf_is_monotone(v in proptest::collection::vec(-500.0f64..500.0, 1..60)) {
            let cdf = empirical_cdf(&v).unwrap();
            for w in cdf.windows(2) {
                proptest::prop_assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1);
            }
            prop_assert_eq!(cdf.last().unwrap().1, 1.0);
        }
    }

    #[test]
    fn distances() {
        let cfg = CampaignConfig::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let fam = generate_scenario(&cfg, 0, &mut rng).unwrap();
        let mut parts = fam.base.clone();
        parts.fiabs = vec![(100.0, 5.0)];
        parts.ues = vec![(50.0, 5.0), (250.0, 5.0), (100.0, 55.0), (100.0, -45.0), (0.0, 5.0)];
        let s = Scenario::new(parts.clone()).unwrap();
        assert!((avg_topology_distance(&s) - 80.0).abs() < 1e-12);
        parts.ues[0] = (100.0, 5.0 + 30.0);
        parts.ues[1] = (130.0, 5.0 + 70.0);
        parts.special_team = vec![0, 1];
        let s = Scenario::new(parts.clone()).unwrap_err();
        assert!(matches!(s, ScenarioError::TeamOutsideArea { .. }));
        parts.ues[0] = (10.0, 0.0);
        parts.ues[1] = (40.0, 0.0);
        let s = Scenario::new(parts.clone()).unwrap();
        assert_eq!(inter_distance(&s), Ok(30.0));
        parts.special_team = vec![0, 1, 2];
        parts.ues[2] = (60.0, 5.0);
        let s = Scenario::new(parts).unwrap();
        assert_eq!(inter_distance(&s), Err(MetricError::UnsupportedTeamSize(3)));
    }

    #[test]
    fn generation_is_deterministic_and_valid() {
        let cfg = CampaignConfig::default();
        for seed in 0..200 {
            let area = (seed % 5) as usize;
            let a = generate_scenario(&cfg, area, &mut substream(seed, 0)).unwrap();
            let b = generate_scenario(&cfg, area, &mut substream(seed, 0)).unwrap();
            assert_eq!(a, b);
            let poly = &cfg.areas[area].polygon;
            let (fx, fy) = a.base.fiabs[0];
            assert!(poly.contains(fx, fy));
            for &(x, y) in &a.base.ues[..2] {
                assert!(poly.contains(x, y));
            }
            for &(x, y) in &a.base.ues {
                let d = libm::hypot(x - fx, y - fy);
                assert!((10.0..=5000.0).contains(&d));
            }
            assert_eq!(a.obstacles.len(), 1);
        }
    }

    #[test]
    fn family_shares_geometry() {
        let cfg = small_config();
        let records = run_family(&cfg, 2, 0);
        assert_eq!(records.len(), 6);
        assert!(records.iter().all(|r| r.status == RunStatus::Ok));
        assert_eq!(records[0].gain_percent, Some(0.0));
        assert!(records[1].objective_bps <= records[0].objective_bps);
        assert!(records.iter().all(|r| r.avg_topology_distance_m == records[0].avg_topology_distance_m));
        assert!(records[2].miab_position.is_some() && records[0].miab_position.is_none());
        assert_eq!(records[0].solver.kind, SolverKind::Direct);
        assert_eq!(records[4].solver.kind, SolverKind::Ga);

        let fam = generate_scenario(&cfg, 2, &mut substream(scenario_seed(cfg.seed, 2, 0), 0)).unwrap();
        let v0 = fam.variant(VariantId::V0, false);
        let v5 = fam.variant(VariantId::V5, false);
        assert_eq!(v0.ues(), v5.ues());
        assert_eq!(v0.fiabs(), v5.fiabs());
        assert!(v0.obstacles().is_empty() && v5.obstacles().len() == 1);
    }

    #[test]
    fn campaign_shape() {
        let cfg = small_config();
        let (records, report) = run_campaign(&cfg).unwrap();
        assert_eq!(records.len(), 5 * 6);
        let keys: Vec<_> = records.iter().map(|r| (r.area_id, r.scenario_index, r.variant)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(report.summary(VariantId::V2).runs, 5);
        assert_eq!(report.failed_runs, 0);
        let bad = CampaignConfig { special_team_size: 6, ..cfg };
        assert!(matches!(run_campaign(&bad), Err(CampaignError::InvalidConfig(_))));
    }
}
