//! Output documents and CSV tables.

use std::io::Write;

use miab_core::experiments::{CampaignReport, RunRecord, RunStatus, VariantId};
use miab_core::network::{BackhaulLink, UeLink};
use miab_core::{Evaluation, LinkBudget, LosClass, SolveResult};
use serde::Serialize;

use crate::files::AssignmentFile;
use crate::manifest::RunManifest;

#[derive(Debug, Serialize)]
pub struct LinkDoc {
    pub los: &'static str,
    pub d2d_m: f64,
    pub d3d_m: f64,
    pub pathloss_db: f64,
    pub rsrp_dbm: f64,
    pub sinr_db: f64,
    pub spectral_efficiency: f64,
    pub above_rsrp_floor: bool,
}

impl From<&LinkBudget> for LinkDoc {
    fn from(b: &LinkBudget) -> Self {
        Self {
            los: match b.los {
                LosClass::Los => "LoS",
                LosClass::Nlos => "NLoS",
            },
            d2d_m: b.d2d,
            d3d_m: b.d3d,
            pathloss_db: b.pl_db,
            rsrp_dbm: b.rsrp_dbm,
            sinr_db: b.sinr_db,
            spectral_efficiency: b.se,
            above_rsrp_floor: b.above_rsrp_floor,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct UeDoc {
    pub ue: usize,
    pub cell: String,
    pub special: bool,
    pub rb_share_divisor: u32,
    pub capacity_bps: f64,
    pub range_excess_m: f64,
    pub link: LinkDoc,
}

impl From<&UeLink> for UeDoc {
    fn from(l: &UeLink) -> Self {
        Self {
            ue: l.ue,
            cell: l.cell.to_string(),
            special: l.special,
            rb_share_divisor: l.share,
            capacity_bps: l.capacity_bps,
            range_excess_m: l.range_excess_m,
            link: (&l.budget).into(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BackhaulDoc {
    pub miab: usize,
    pub donor: usize,
    pub capacity_bps: f64,
    pub served_bps: f64,
    pub deficit_bps: f64,
    pub range_excess_m: f64,
    pub link: LinkDoc,
}

impl From<&BackhaulLink> for BackhaulDoc {
    fn from(l: &BackhaulLink) -> Self {
        Self {
            miab: l.miab,
            donor: l.donor,
            capacity_bps: l.capacity_bps,
            served_bps: l.served_bps,
            deficit_bps: l.deficit_bps,
            range_excess_m: l.range_excess_m,
            link: (&l.budget).into(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ViolationsDoc {
    pub rsrp_deficit_db: f64,
    pub backhaul_deficit_bps: f64,
    pub range_violations: usize,
    pub range_excess_m: f64,
    pub area_violation_m: f64,
}

#[derive(Debug, Serialize)]
pub struct EvaluationDoc {
    pub feasible: bool,
    pub objective_bps: f64,
    pub ues: Vec<UeDoc>,
    pub backhauls: Vec<BackhaulDoc>,
    pub violations: ViolationsDoc,
}

impl From<&Evaluation> for EvaluationDoc {
    fn from(e: &Evaluation) -> Self {
        let v = &e.violations;
        Self {
            feasible: e.feasible,
            objective_bps: e.objective_bps,
            ues: e.ue_links.iter().map(UeDoc::from).collect(),
            backhauls: e.backhaul_links.iter().map(BackhaulDoc::from).collect(),
            violations: ViolationsDoc {
                rsrp_deficit_db: v.total_rsrp_deficit_db(),
                backhaul_deficit_bps: v.total_backhaul_deficit_bps(),
                range_violations: v.range_violations,
                range_excess_m: v.range_excess_m,
                area_violation_m: v.area_violation_m,
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EvaluateOutput<'a> {
    pub manifest: &'a RunManifest,
    pub evaluation: EvaluationDoc,
}

#[derive(Debug, Serialize)]
pub struct SolveOutput<'a> {
    pub manifest: &'a RunManifest,
    pub solver: &'static str,
    pub feasible: bool,
    pub best_assignment: AssignmentFile,
    pub evaluation: EvaluationDoc,
    pub generations_run: usize,
    pub evaluations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tie_break: Option<&'static str>,
}

/// How the oracle picks among equal candidates.
pub const ORACLE_TIE_BREAK: &str =
    "lexicographically smallest (grid point index, UE cells, MIAB donors) among equal objectives";

impl<'a> SolveOutput<'a> {
    pub fn new(manifest: &'a RunManifest, solver: &'static str, r: &SolveResult) -> Self {
        Self {
            manifest,
            solver,
            feasible: r.best_evaluation.feasible,
            best_assignment: AssignmentFile::from_assignment(&r.best_assignment),
            evaluation: (&r.best_evaluation).into(),
            generations_run: r.generations_run,
            evaluations: r.evaluations,
            tie_break: (solver == "oracle").then_some(ORACLE_TIE_BREAK),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SummaryDoc {
    pub variant: String,
    pub runs: usize,
    pub feasible_runs: usize,
    pub min_gain_percent: Option<f64>,
    pub median_gain_percent: Option<f64>,
    pub p90_gain_percent: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct CampaignOutput<'a> {
    pub manifest: &'a RunManifest,
    pub records: usize,
    pub failed_runs: usize,
    pub summaries: Vec<SummaryDoc>,
}

impl<'a> CampaignOutput<'a> {
    pub fn new(manifest: &'a RunManifest, records: usize, report: &CampaignReport) -> Self {
        Self {
            manifest,
            records,
            failed_runs: report.failed_runs,
            summaries: report
                .summaries
                .iter()
                .map(|s| SummaryDoc {
                    variant: s.variant.to_string(),
                    runs: s.runs,
                    feasible_runs: s.feasible_runs,
                    min_gain_percent: s.min_gain,
                    median_gain_percent: s.median_gain,
                    p90_gain_percent: s.p90_gain,
                })
                .collect(),
        }
    }
}

pub fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
}

fn num(v: f64) -> String {
    v.to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub const RECORD_COLUMNS: [&str; 24] = [
    "area_id",
    "area_name",
    "scenario_index",
    "scenario_seed",
    "variant",
    "scheduler",
    "status",
    "objective_bps",
    "gain_percent",
    "miab_x",
    "miab_y",
    "associations",
    "backhaul_donor",
    "backhaul_capacity_bps",
    "miab_served_bps",
    "avg_topology_distance_m",
    "inter_distance_m",
    "feasible",
    "solver",
    "solver_seed",
    "generations_run",
    "evaluations",
    "has_obstacles",
    "error",
];

pub fn write_records<W: Write>(w: W, records: &[RunRecord]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RECORD_COLUMNS)?;
    for r in records {
        let (status, error) = match &r.status {
            RunStatus::Ok => ("ok", String::new()),
            RunStatus::Failed(e) => ("failed", e.clone()),
        };
        let cells: Vec<String> = r.associations.iter().map(|c| c.to_string()).collect();
        out.write_record([
            r.area_id.to_string(),
            r.area_name.clone(),
            r.scenario_index.to_string(),
            r.scenario_seed.to_string(),
            r.variant.to_string(),
            r.scheduler.map_or("n/a".to_owned(), |s| s.to_string()),
            status.to_owned(),
            num(r.objective_bps),
            opt(r.gain_percent),
            opt(r.miab_position.map(|p| p.0)),
            opt(r.miab_position.map(|p| p.1)),
            cells.join(";"),
            r.backhaul_donor.map(|d| d.to_string()).unwrap_or_default(),
            opt(r.backhaul_capacity_bps),
            opt(r.miab_served_bps),
            num(r.avg_topology_distance_m),
            opt(r.inter_distance_m),
            r.feasible.to_string(),
            r.solver.kind.label().to_owned(),
            r.solver.seed.to_string(),
            r.solver.generations_run.to_string(),
            r.solver.evaluations.to_string(),
            r.variant.has_obstacles().to_string(),
            error,
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_cdf<W: Write>(w: W, cdf: &[(f64, f64)]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["gain_percent", "fraction"])?;
    for &(v, f) in cdf {
        out.write_record([num(v), num(f)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_trace<W: Write>(w: W, r: &SolveResult) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["generation", "best_objective_bps", "feasible_fraction"])?;
    for (g, best) in r.best_objective_trace.iter().enumerate() {
        let frac = r.feasible_fraction_trace.get(g).copied();
        out.write_record([g.to_string(), num(*best), opt(frac)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn cdf_file_name(variant: VariantId) -> String {
    format!("cdf_{variant}.csv")
}
