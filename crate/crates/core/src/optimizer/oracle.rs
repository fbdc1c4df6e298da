use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{compare_candidates, SolveResult};
use crate::capacity::CellId;
use crate::geometry::AreaPolygon;
use crate::network::{evaluate, Assignment, Evaluation, Scenario};

/// Largest number of evaluations the oracle agrees to run.
pub const ORACLE_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("exhaustive search needs {required} evaluations, above the budget of {limit}")]
    BudgetExceeded { required: u128, limit: u128 },
    #[error("grid step must be positive and finite, got {0}")]
    InvalidGridStep(f64),
    #[error("no grid point falls inside the deployment area")]
    NoGridPoints,
}

/// Lattice `min + i * step` over the bounding box, restricted to the area.
///
/// Anchoring at the bounding-box corner makes a grid of step `s` a subset of
/// the grid of step `s / k` for integer `k`.
pub fn grid_points(area: &AreaPolygon, step: f64) -> Vec<(f64, f64)> {
    let b = area.bounding_box();
    let nx = libm::floor(b.width() / step + 1e-9) as usize;
    let ny = libm::floor(b.height() / step + 1e-9) as usize;
    let mut points = Vec::new();
    for i in 0..=nx {
        for j in 0..=ny {
            let (x, y) = (b.min_x + i as f64 * step, b.min_y + j as f64 * step);
            if area.contains(x, y) {
                points.push((x, y));
            }
        }
    }
    points
}

/// `(F + M)^U * F^M * P^M` evaluations for `P` grid points.
pub fn oracle_budget(scenario: &Scenario, grid_points: usize) -> u128 {
    let f = scenario.fiabs().len() as u128;
    let m = scenario.miab_count() as u32;
    let u = scenario.ues().len() as u32;
    let cells = f + u128::from(m);
    cells
        .checked_pow(u)
        .and_then(|a| f.checked_pow(m).and_then(|b| a.checked_mul(b)))
        .and_then(|a| (grid_points as u128).checked_pow(m).and_then(|b| a.checked_mul(b)))
        .unwrap_or(u128::MAX)
}

/// Advances a mixed-radix counter (most significant digit first).
fn advance(digits: &mut [usize], radix: &[usize]) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radix[i] {
            return true;
        }
        digits[i] = 0;
    }
    false
}

/// Exact optimum over grid placements and every association pattern.
///
/// Placements are visited in lexicographic order of grid indices and, for
/// each, associations in lexicographic order of (UE cells, MIAB donors) with
/// cells ordered FIABs first. Only strict improvements replace the
/// incumbent, so ties resolve to the smallest (placement, association).
pub fn solve_oracle(scenario: &Scenario, grid_step: f64) -> Result<SolveResult, OracleError> {
    if !(grid_step.is_finite() && grid_step > 0.0) {
        return Err(OracleError::InvalidGridStep(grid_step));
    }
    let m = scenario.miab_count();
    let f = scenario.fiabs().len();
    let u = scenario.ues().len();
    let grid = if m == 0 { Vec::new() } else { grid_points(scenario.deployment_area(), grid_step) };
    if m > 0 && grid.is_empty() {
        return Err(OracleError::NoGridPoints);
    }
    let required = oracle_budget(scenario, grid.len());
    if required > ORACLE_BUDGET {
        return Err(OracleError::BudgetExceeded { required, limit: ORACLE_BUDGET });
    }

    let cells = scenario.cell_count();
    let pos_radix = vec![grid.len(); m];
    let assoc_radix: Vec<usize> = core::iter::repeat_n(cells, u).chain(core::iter::repeat_n(f, m)).collect();

    let mut best: Option<(Assignment, Evaluation)> = None;
    let mut evaluations = 0;
    let mut pos = vec![0usize; m];
    loop {
        let miab_xy: Vec<(f64, f64)> = pos.iter().map(|&i| grid[i]).collect();
        let mut assoc = vec![0usize; u + m];
        loop {
            let a = Assignment {
                miab_xy: miab_xy.clone(),
                ue_cell: assoc[..u].iter().map(|&c| CellId::from_index(c, f)).collect(),
                backhaul_donor: assoc[u..].to_vec(),
            };
            let e = evaluate(scenario, &a).expect("enumerated assignments are structurally valid");
            evaluations += 1;
            let better = match &best {
                None => true,
                Some((_, b)) => compare_candidates(scenario, &e, b) == Ordering::Greater,
            };
            if better {
                best = Some((a, e));
            }
            if !advance(&mut assoc, &assoc_radix) {
                break;
            }
        }
        if !advance(&mut pos, &pos_radix) {
            break;
        }
    }

    let (best_assignment, best_evaluation) = best.expect("at least one candidate is enumerated");
    let trace = if best_evaluation.feasible { best_evaluation.objective_bps } else { 0.0 };
    Ok(SolveResult {
        best_assignment,
        best_evaluation,
        generations_run: 1,
        best_objective_trace: vec![trace],
        feasible_fraction_trace: Vec::new(),
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::SchedulerKind;
    use crate::network::{NamedArea, ScenarioParts};
    use crate::radio::RadioParams;

    fn scenario(miabs: usize, area: AreaPolygon) -> Scenario {
        Scenario::new(ScenarioParts {
            areas: vec![NamedArea { name: "A".into(), polygon: area }],
            fiabs: vec![(0.0, 0.0)],
            miab_count: miabs,
            ues: vec![(90.0, 80.0), (70.0, 95.0), (30.0, 60.0), (-40.0, 10.0), (15.0, -25.0)],
            special_team: vec![0, 1],
            obstacles: vec![],
            radio: RadioParams::default(),
            scheduler: SchedulerKind::Pf,
            deployment_area: 0,
        })
        .unwrap()
    }

    #[test]
    fn grid_is_nested() {
        let area = AreaPolygon::from_vertices(&[(0.0, 0.0), (100.0, 0.0), (100.0, 100.0)]).unwrap();
        let coarse = grid_points(&area, 20.0);
        let fine = grid_points(&area, 10.0);
        assert!(coarse.iter().all(|p| fine.contains(p)));
        assert!(fine.len() > coarse.len());
    }

    #[test]
    fn counts_patterns() {
        let s = scenario(1, AreaPolygon::rectangle(0.0, 0.0, 100.0, 100.0).unwrap());
        // One grid point: the 2^5 association patterns.
        let r = solve_oracle(&s, 200.0).unwrap();
        assert_eq!(r.evaluations, 32);
        assert_eq!(oracle_budget(&s, 1), 32);
    }

    #[test]
    fn no_miab_matches_direct() {
        let s = scenario(0, AreaPolygon::rectangle(0.0, 0.0, 100.0, 100.0).unwrap());
        let r = solve_oracle(&s, 20.0).unwrap();
        assert_eq!(r.evaluations, 1);
        assert_eq!(r.best_evaluation, evaluate(&s, &Assignment::direct(&s, vec![])).unwrap());
    }

    #[test]
    fn refinement_never_hurts() {
        let s = scenario(1, AreaPolygon::rectangle(0.0, 0.0, 100.0, 100.0).unwrap());
        let coarse = solve_oracle(&s, 20.0).unwrap();
        let fine = solve_oracle(&s, 10.0).unwrap();
        assert!(fine.best_evaluation.objective_bps >= coarse.best_evaluation.objective_bps);
    }

    #[test]
    fn refuses_over_budget() {
        let s = scenario(1, AreaPolygon::rectangle(0.0, 0.0, 100.0, 100.0).unwrap());
        match solve_oracle(&s, 0.01) {
            Err(OracleError::BudgetExceeded { required, limit }) => {
                assert_eq!(limit, ORACLE_BUDGET);
                assert!(required > limit);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
        assert!(matches!(solve_oracle(&s, 0.0), Err(OracleError::InvalidGridStep(_))));
    }
}
