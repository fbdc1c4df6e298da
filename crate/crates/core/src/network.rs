//! Scenario model, assignments and the constrained evaluation.
//!
//! [`evaluate`] builds every access and backhaul link budget for an
//! assignment, turns them into capacities under the scenario's scheduler and
//! reports the special-team objective together with the magnitude of every
//! constraint violation. Violations never abort an evaluation: the search
//! needs to know how far an assignment is from feasibility.

use alloc::string::String;
use alloc::vec::Vec;

use crate::capacity::{access_capacity, backhaul_capacity, compute_loads, CellId, LoadCounts, SchedulerKind};
use crate::geometry::{dist2d, los_class, AreaPolygon, Cuboid, LosClass, Point3, Segment};
use crate::radio::{self, LinkBudget, RadioError, RadioParams, MAX_LINK_DISTANCE, MIN_LINK_DISTANCE};

#[derive(Debug, Clone, PartialEq)]
pub struct NamedArea {
    pub name: String,
    pub polygon: AreaPolygon,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("scenario needs at least one FIAB")]
    NoFiab,
    #[error("scenario needs at least one UE")]
    NoUe,
    #[error("special team is empty")]
    EmptyTeam,
    #[error("special team member {0} is not a UE index")]
    TeamIndexOutOfRange(usize),
    #[error("special team lists UE {0} twice")]
    DuplicateTeamMember(usize),
    #[error("deployment area index {0} does not exist")]
    UnknownDeploymentArea(usize),
    #[error("special team UE {ue} lies outside the deployment area")]
    TeamOutsideArea { ue: usize },
    #[error("UE {ue} is {distance:.3} m from FIAB {fiab}, outside [10, 5000] m")]
    UeFiabDistance { ue: usize, fiab: usize, distance: f64 },
    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),
    #[error(transparent)]
    Radio(#[from] RadioError),
}

/// Construction input for [`Scenario`]; node positions are horizontal only,
/// heights come from the radio parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParts {
    pub areas: Vec<NamedArea>,
    pub fiabs: Vec<(f64, f64)>,
    pub miab_count: usize,
    pub ues: Vec<(f64, f64)>,
    pub special_team: Vec<usize>,
    pub obstacles: Vec<Cuboid>,
    pub radio: RadioParams,
    pub scheduler: SchedulerKind,
    /// Index into `areas` where MIABs may be placed.
    pub deployment_area: usize,
}

/// Immutable, validated world description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    parts: ScenarioParts,
    fiab_pos: Vec<Point3>,
    ue_pos: Vec<Point3>,
    delta_hz: f64,
    noise_w: f64,
}

impl Scenario {
    pub fn new(parts: ScenarioParts) -> Result<Self, ScenarioError> {
        parts.radio.validate()?;
        if parts.fiabs.is_empty() {
            return Err(ScenarioError::NoFiab);
        }
        if parts.ues.is_empty() {
            return Err(ScenarioError::NoUe);
        }
        if parts.fiabs.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
            return Err(ScenarioError::NonFinite("fiabs"));
        }
        if parts.ues.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
            return Err(ScenarioError::NonFinite("ues"));
        }
        let area = parts
            .areas
            .get(parts.deployment_area)
            .ok_or(ScenarioError::UnknownDeploymentArea(parts.deployment_area))?;
        if parts.special_team.is_empty() {
            return Err(ScenarioError::EmptyTeam);
        }
        for (i, &u) in parts.special_team.iter().enumerate() {
            if u >= parts.ues.len() {
                return Err(ScenarioError::TeamIndexOutOfRange(u));
            }
            if parts.special_team[..i].contains(&u) {
                return Err(ScenarioError::DuplicateTeamMember(u));
            }
            let (x, y) = parts.ues[u];
            if !area.polygon.contains(x, y) {
                return Err(ScenarioError::TeamOutsideArea { ue: u });
            }
        }
        let r = &parts.radio;
        let fiab_pos: Vec<Point3> = parts.fiabs.iter().map(|&(x, y)| Point3::new(x, y, r.h_fiab)).collect();
        let ue_pos: Vec<Point3> = parts.ues.iter().map(|&(x, y)| Point3::new(x, y, r.h_ut)).collect();
        for (u, ue) in ue_pos.iter().enumerate() {
            for (k, fiab) in fiab_pos.iter().enumerate() {
                let d = dist2d(*ue, *fiab);
                if !(MIN_LINK_DISTANCE..=MAX_LINK_DISTANCE).contains(&d) {
                    return Err(ScenarioError::UeFiabDistance { ue: u, fiab: k, distance: d });
                }
            }
        }
        let delta_hz = r.delta_hz()?;
        let noise_w = r.noise_w()?;
        Ok(Self { parts, fiab_pos, ue_pos, delta_hz, noise_w })
    }

    pub fn parts(&self) -> &ScenarioParts {
        &self.parts
    }

    pub fn into_parts(self) -> ScenarioParts {
        self.parts
    }

    pub fn areas(&self) -> &[NamedArea] {
        &self.parts.areas
    }

    pub fn deployment_area(&self) -> &AreaPolygon {
        &self.parts.areas[self.parts.deployment_area].polygon
    }

    pub fn fiabs(&self) -> &[Point3] {
        &self.fiab_pos
    }

    pub fn ues(&self) -> &[Point3] {
        &self.ue_pos
    }

    pub fn miab_count(&self) -> usize {
        self.parts.miab_count
    }

    pub fn cell_count(&self) -> usize {
        self.fiab_pos.len() + self.parts.miab_count
    }

    pub fn special_team(&self) -> &[usize] {
        &self.parts.special_team
    }

    pub fn is_special(&self, ue: usize) -> bool {
        self.parts.special_team.contains(&ue)
    }

    pub fn obstacles(&self) -> &[Cuboid] {
        &self.parts.obstacles
    }

    pub fn radio(&self) -> &RadioParams {
        &self.parts.radio
    }

    pub fn scheduler(&self) -> SchedulerKind {
        self.parts.scheduler
    }

    pub fn delta_hz(&self) -> f64 {
        self.delta_hz
    }

    pub fn noise_w(&self) -> f64 {
        self.noise_w
    }

    /// MIAB antenna position for a horizontal placement.
    pub fn miab_point(&self, (x, y): (f64, f64)) -> Point3 {
        Point3::new(x, y, self.parts.radio.h_miab)
    }

    /// FIAB closest (2D) to `p`, lowest index on ties.
    pub fn nearest_fiab(&self, p: Point3) -> usize {
        let mut best = 0;
        for (k, f) in self.fiab_pos.iter().enumerate() {
            if dist2d(p, *f) < dist2d(p, self.fiab_pos[best]) {
                best = k;
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssignmentError {
    #[error("UE {ue} has no cell association (assignment lists {listed} UEs)")]
    MissingUe { ue: usize, listed: usize },
    #[error("assignment lists {listed} UEs but the scenario has {expected}")]
    ExtraUe { listed: usize, expected: usize },
    #[error("UE {ue} is associated to unknown cell {cell}")]
    UnknownCell { ue: usize, cell: CellId },
    #[error("assignment places {got} MIABs but the scenario has {expected}")]
    MiabCount { expected: usize, got: usize },
    #[error("assignment gives {got} backhaul donors for {expected} MIABs")]
    DonorCount { expected: usize, got: usize },
    #[error("MIAB {miab} uses unknown donor FIAB {donor}")]
    UnknownDonor { miab: usize, donor: usize },
    #[error("MIAB {miab} has a non-finite position")]
    NonFinitePosition { miab: usize },
}

/// Decision variables: MIAB placements and single associations.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub miab_xy: Vec<(f64, f64)>,
    pub ue_cell: Vec<CellId>,
    pub backhaul_donor: Vec<usize>,
}

impl Assignment {
    /// Every UE on its nearest FIAB; MIABs placed at `miab_xy` and backhauled
    /// to their nearest FIAB.
    pub fn direct(scenario: &Scenario, miab_xy: Vec<(f64, f64)>) -> Self {
        let ue_cell = scenario
            .ues()
            .iter()
            .map(|u| CellId::Fiab(scenario.nearest_fiab(*u)))
            .collect();
        let backhaul_donor = miab_xy
            .iter()
            .map(|&p| scenario.nearest_fiab(scenario.miab_point(p)))
            .collect();
        Self { miab_xy, ue_cell, backhaul_donor }
    }

    pub fn validate(&self, scenario: &Scenario) -> Result<(), AssignmentError> {
        let expected = scenario.ues().len();
        let listed = self.ue_cell.len();
        if listed < expected {
            return Err(AssignmentError::MissingUe { ue: listed, listed });
        }
        if listed > expected {
            return Err(AssignmentError::ExtraUe { listed, expected });
        }
        let (f, m) = (scenario.fiabs().len(), scenario.miab_count());
        for (ue, &cell) in self.ue_cell.iter().enumerate() {
            let ok = match cell {
                CellId::Fiab(k) => k < f,
                CellId::Miab(i) => i < m,
            };
            if !ok {
                return Err(AssignmentError::UnknownCell { ue, cell });
            }
        }
        if self.miab_xy.len() != m {
            return Err(AssignmentError::MiabCount { expected: m, got: self.miab_xy.len() });
        }
        if self.backhaul_donor.len() != m {
            return Err(AssignmentError::DonorCount { expected: m, got: self.backhaul_donor.len() });
        }
        for (miab, &donor) in self.backhaul_donor.iter().enumerate() {
            if donor >= f {
                return Err(AssignmentError::UnknownDonor { miab, donor });
            }
        }
        for (miab, p) in self.miab_xy.iter().enumerate() {
            if !(p.0.is_finite() && p.1.is_finite()) {
                return Err(AssignmentError::NonFinitePosition { miab });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UeLink {
    pub ue: usize,
    pub cell: CellId,
    pub special: bool,
    /// Actual horizontal distance; the budget is computed at this distance
    /// clamped into the model range.
    pub d2d_m: f64,
    pub budget: LinkBudget,
    /// Power-share divisor applied to the RSRP.
    pub share: u32,
    pub capacity_bps: f64,
    pub range_excess_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackhaulLink {
    pub miab: usize,
    pub donor: usize,
    pub d2d_m: f64,
    pub budget: LinkBudget,
    pub share: u32,
    pub capacity_bps: f64,
    /// Sum of the access capacities of the UEs the MIAB serves.
    pub served_bps: f64,
    pub deficit_bps: f64,
    pub range_excess_m: f64,
}

/// Constraint residuals; all zero iff the assignment is feasible.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Violations {
    /// dB below the RSRP floor, UE links first then backhauls.
    pub rsrp_deficit_db: Vec<f64>,
    /// Per MIAB, served capacity in excess of the backhaul capacity.
    pub backhaul_deficit_bps: Vec<f64>,
    /// Links whose 2D length falls outside [10, 5000] m.
    pub range_violations: usize,
    /// Total distance outside that range, in meters.
    pub range_excess_m: f64,
    /// Total distance of MIABs from the deployment area, in meters.
    pub area_violation_m: f64,
}

impl Violations {
    pub fn is_zero(&self) -> bool {
        self.rsrp_deficit_db.iter().all(|&d| d == 0.0)
            && self.backhaul_deficit_bps.iter().all(|&d| d == 0.0)
            && self.range_violations == 0
            && self.range_excess_m == 0.0
            && self.area_violation_m == 0.0
    }

    pub fn total_rsrp_deficit_db(&self) -> f64 {
        self.rsrp_deficit_db.iter().sum()
    }

    pub fn total_backhaul_deficit_bps(&self) -> f64 {
        self.backhaul_deficit_bps.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub ue_links: Vec<UeLink>,
    pub backhaul_links: Vec<BackhaulLink>,
    pub loads: LoadCounts,
    /// Sum of the special team's capacities, in bit/s.
    pub objective_bps: f64,
    pub violations: Violations,
    pub feasible: bool,
}

impl Evaluation {
    pub fn per_ue_capacity(&self) -> Vec<f64> {
        self.ue_links.iter().map(|l| l.capacity_bps).collect()
    }

    pub fn backhaul_capacity(&self) -> Vec<f64> {
        self.backhaul_links.iter().map(|l| l.capacity_bps).collect()
    }
}

pub fn assignment_feasible(evaluation: &Evaluation) -> bool {
    evaluation.violations.is_zero()
}

struct RangedBudget {
    d2d: f64,
    excess: f64,
    budget: LinkBudget,
}

/// Link budget that tolerates out-of-range distances: the path loss is taken
/// at the nearest in-range distance and the breach is reported separately.
fn ranged_budget(tx: Point3, rx: Point3, f_ghz: f64, share: u32, scenario: &Scenario) -> RangedBudget {
    let d2d = dist2d(tx, rx);
    let clamped = d2d.clamp(MIN_LINK_DISTANCE, MAX_LINK_DISTANCE);
    let excess = (MIN_LINK_DISTANCE - d2d).max(d2d - MAX_LINK_DISTANCE).max(0.0);
    let d3d = libm::hypot(clamped, tx.z - rx.z);
    let los = Segment::new(tx, rx)
        .map(|s| los_class(&s, scenario.obstacles()))
        .unwrap_or(LosClass::Los);
    let budget = radio::budget_for(clamped, d3d, tx.z, rx.z, los, f_ghz, share.max(1), scenario.radio())
        .expect("scenario radio parameters are validated and distances clamped");
    RangedBudget { d2d, excess, budget }
}

/// Evaluates an assignment: loads, link budgets, capacities, the objective
/// and every constraint residual.
pub fn evaluate(scenario: &Scenario, assignment: &Assignment) -> Result<Evaluation, AssignmentError> {
    assignment.validate(scenario)?;
    let r = scenario.radio();
    let sched = scenario.scheduler();
    let b = f64::from(r.rb_per_slot);
    let delta = scenario.delta_hz();
    let loads = compute_loads(&assignment.ue_cell, &assignment.backhaul_donor, scenario.fiabs().len(), sched);
    let miab_pos: Vec<Point3> = assignment.miab_xy.iter().map(|&p| scenario.miab_point(p)).collect();

    let mut violations = Violations::default();
    let mut ue_links = Vec::with_capacity(scenario.ues().len());
    for (ue, (&cell, &pos)) in assignment.ue_cell.iter().zip(scenario.ues()).enumerate() {
        let (tx, f_ghz, share) = match cell {
            CellId::Miab(m) => (miab_pos[m], r.f_miab_ghz, loads.miab_ues[m]),
            CellId::Fiab(k) => (scenario.fiabs()[k], r.f_fiab_ghz, loads.fiab_rntis[k]),
        };
        let link = ranged_budget(tx, pos, f_ghz, share, scenario);
        let capacity_bps = access_capacity(b, delta, link.budget.se, share).unwrap_or(0.0);
        ue_links.push(UeLink {
            ue,
            cell,
            special: scenario.is_special(ue),
            d2d_m: link.d2d,
            budget: link.budget,
            share,
            capacity_bps,
            range_excess_m: link.excess,
        });
    }

    let mut backhaul_links = Vec::with_capacity(miab_pos.len());
    for (miab, (&donor, &pos)) in assignment.backhaul_donor.iter().zip(&miab_pos).enumerate() {
        let u_m = loads.miab_ues[miab];
        let u_z = loads.fiab_rntis[donor];
        // An idle MIAB under PF does not enter U_z; its backhaul still exists.
        let share = u_z.max(1);
        let link = ranged_budget(scenario.fiabs()[donor], pos, r.f_fiab_ghz, share, scenario);
        let capacity_bps = backhaul_capacity(b, delta, link.budget.se, u_m, u_z, sched).unwrap_or(0.0);
        let served_bps: f64 = ue_links
            .iter()
            .filter(|l| l.cell == CellId::Miab(miab))
            .map(|l| l.capacity_bps)
            .sum();
        backhaul_links.push(BackhaulLink {
            miab,
            donor,
            d2d_m: link.d2d,
            budget: link.budget,
            share,
            capacity_bps,
            served_bps,
            deficit_bps: (served_bps - capacity_bps).max(0.0),
            range_excess_m: link.excess,
        });
    }

    let floor = r.q_rx_lev_min_dbm;
    let budgets = ue_links
        .iter()
        .map(|l| (&l.budget, l.range_excess_m))
        .chain(backhaul_links.iter().map(|l| (&l.budget, l.range_excess_m)));
    for (budget, excess) in budgets {
        violations.rsrp_deficit_db.push((floor - budget.rsrp_dbm).max(0.0));
        if excess > 0.0 {
            violations.range_violations += 1;
            violations.range_excess_m += excess;
        }
    }
    violations.backhaul_deficit_bps = backhaul_links.iter().map(|l| l.deficit_bps).collect();
    let area = scenario.deployment_area();
    violations.area_violation_m = assignment.miab_xy.iter().map(|&(x, y)| area.distance_to(x, y)).sum();

    let objective_bps = scenario.special_team().iter().map(|&u| ue_links[u].capacity_bps).sum();
    let feasible = violations.is_zero();
    Ok(Evaluation { ue_links, backhaul_links, loads, objective_bps, violations, feasible })
}

/// `team_size * B * delta * se_max`: what the team would get with every
/// member alone on a cell at peak spectral efficiency.
pub fn capacity_ceiling(team_size: usize, radio: &RadioParams) -> f64 {
    let delta = radio.delta_hz().unwrap_or(0.0);
    team_size as f64 * f64::from(radio.rb_per_slot) * delta * radio.se_max
}

/// Upper bound on [`Evaluation::objective_bps`] for any assignment.
pub fn objective_upper_bound(scenario: &Scenario) -> f64 {
    capacity_ceiling(scenario.special_team().len(), scenario.radio())
}
