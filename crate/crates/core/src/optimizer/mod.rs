//! Search over MIAB placements and associations.
//!
//! [`solve_ga`] is the production solver. [`solve_oracle`] enumerates every
//! association pattern at every point of a placement grid and is used to
//! certify the GA on small scenarios.

mod ga;
mod oracle;

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::network::{objective_upper_bound, Assignment, Evaluation, Scenario};

pub use ga::{decode_and_repair, penalized_fitness, solve_ga, GaConfig, GaConfigError, Genome};
pub use oracle::{grid_points, oracle_budget, solve_oracle, OracleError, ORACLE_BUDGET};

/// Outcome of either solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub best_assignment: Assignment,
    pub best_evaluation: Evaluation,
    pub generations_run: usize,
    /// Best feasible objective found so far, per generation (0 before the
    /// first feasible assignment).
    pub best_objective_trace: Vec<f64>,
    /// Share of feasible genomes per generation.
    pub feasible_fraction_trace: Vec<f64>,
    pub evaluations: usize,
}

/// Weighted, dimensionless sum of the constraint residuals.
///
/// RSRP and range residuals are scaled per 10 dB / 10 m, backhaul deficits by
/// the objective upper bound and area distance by the area diagonal.
pub fn normalized_violation(scenario: &Scenario, evaluation: &Evaluation) -> f64 {
    let v = &evaluation.violations;
    let bound = objective_upper_bound(scenario).max(1.0);
    let diag = scenario.deployment_area().bounding_box().diagonal().max(1.0);
    v.total_rsrp_deficit_db() / 10.0
        + v.total_backhaul_deficit_bps() / bound
        + v.range_excess_m / 10.0
        + v.area_violation_m / diag
}

/// Incumbent order: feasible beats infeasible, then higher objective among
/// feasible and lower violation among infeasible. `Greater` means `a` wins.
pub(crate) fn compare_candidates(scenario: &Scenario, a: &Evaluation, b: &Evaluation) -> Ordering {
    match (a.feasible, b.feasible) {
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (true, true) => a.objective_bps.total_cmp(&b.objective_bps),
        (false, false) => normalized_violation(scenario, b).total_cmp(&normalized_violation(scenario, a)),
    }
}
