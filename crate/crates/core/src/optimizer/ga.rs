use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{compare_candidates, normalized_violation, SolveResult};
use crate::capacity::CellId;
use crate::network::{evaluate, objective_upper_bound, Assignment, Evaluation, Scenario};
use crate::rng::{pack, substream};

/// Stream tag of the initial population.
const INIT_GENERATION: u32 = u32::MAX;

/// Genetic-algorithm settings. Defaults: population 50, mutation 20 %,
/// crossover 80 %, 200 generations, 2 elites.
#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub mutation_rate: f64,
    pub crossover_rate: f64,
    pub generations: usize,
    pub elite_count: usize,
    pub seed: u64,
    /// Bit/s per unit of normalised violation; `None` uses the objective
    /// upper bound of the scenario.
    pub penalty_weight: Option<f64>,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            mutation_rate: 0.20,
            crossover_rate: 0.80,
            generations: 200,
            elite_count: 2,
            seed: 0,
            penalty_weight: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GaConfigError {
    #[error("population size must be at least 2")]
    PopulationTooSmall,
    #[error("{0} must lie in [0, 1]")]
    RateOutOfRange(&'static str),
    #[error("at least one generation is required")]
    NoGenerations,
    #[error("elite count must be below the population size")]
    TooManyElites,
    #[error("penalty weight must be finite and non-negative")]
    InvalidPenalty,
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaConfigError> {
        if self.population_size < 2 {
            return Err(GaConfigError::PopulationTooSmall);
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(GaConfigError::RateOutOfRange("mutation rate"));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(GaConfigError::RateOutOfRange("crossover rate"));
        }
        if self.generations == 0 {
            return Err(GaConfigError::NoGenerations);
        }
        if self.elite_count >= self.population_size {
            return Err(GaConfigError::TooManyElites);
        }
        if let Some(w) = self.penalty_weight {
            if !(w.is_finite() && w >= 0.0) {
                return Err(GaConfigError::InvalidPenalty);
            }
        }
        Ok(())
    }
}

/// Mixed encoding: continuous MIAB coordinates plus categorical cell and
/// donor choices.
#[derive(Debug, Clone, PartialEq)]
pub struct Genome {
    pub positions: Vec<(f64, f64)>,
    pub cells: Vec<CellId>,
    pub donors: Vec<usize>,
}

impl Genome {
    pub fn from_assignment(a: &Assignment) -> Self {
        Self { positions: a.miab_xy.clone(), cells: a.ue_cell.clone(), donors: a.backhaul_donor.clone() }
    }

    fn random<R: Rng>(scenario: &Scenario, rng: &mut R) -> Self {
        let f = scenario.fiabs().len();
        let cells = scenario.cell_count();
        let positions = (0..scenario.miab_count()).map(|_| random_position(scenario, rng)).collect();
        let cells = (0..scenario.ues().len())
            .map(|_| CellId::from_index(rng.gen_range(0..cells), f))
            .collect();
        let donors = (0..scenario.miab_count()).map(|_| rng.gen_range(0..f)).collect();
        Self { positions, cells, donors }
    }
}

fn random_position<R: Rng>(scenario: &Scenario, rng: &mut R) -> (f64, f64) {
    let area = scenario.deployment_area();
    area.sample(rng).unwrap_or_else(|_| {
        let b = area.bounding_box();
        area.project((b.min_x + b.max_x) / 2.0, (b.min_y + b.max_y) / 2.0)
    })
}

/// Genome to assignment, with MIAB positions projected into the deployment area.
pub fn decode_and_repair(genome: &Genome, scenario: &Scenario) -> Assignment {
    let area = scenario.deployment_area();
    Assignment {
        miab_xy: genome.positions.iter().map(|&(x, y)| area.project(x, y)).collect(),
        ue_cell: genome.cells.clone(),
        backhaul_donor: genome.donors.clone(),
    }
}

/// Objective minus `weight * normalised violation`.
///
/// The penalty is soft: a slightly infeasible genome can outrank a feasible
/// one, which lets the search approach constraint boundaries from both
/// sides. The incumbent returned by [`solve_ga`] is still the best feasible
/// assignment seen. With `weight` at or above the objective upper bound, any
/// genome with a normalised violation of 1 or more ranks at or below every
/// feasible one.
pub fn penalized_fitness(scenario: &Scenario, evaluation: &Evaluation, weight: f64) -> f64 {
    if evaluation.feasible {
        evaluation.objective_bps
    } else {
        evaluation.objective_bps - weight * normalized_violation(scenario, evaluation)
    }
}

fn evaluate_population(scenario: &Scenario, population: &[Genome]) -> Vec<(Assignment, Evaluation)> {
    let run = |g: &Genome| {
        let a = decode_and_repair(g, scenario);
        let e = evaluate(scenario, &a).expect("decoded genomes are structurally valid");
        (a, e)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        population.par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        population.iter().map(run).collect()
    }
}

fn tournament<R: Rng>(fitness: &[f64], rng: &mut R) -> usize {
    let i = rng.gen_range(0..fitness.len());
    let j = rng.gen_range(0..fitness.len());
    match fitness[i].total_cmp(&fitness[j]) {
        Ordering::Greater => i,
        Ordering::Less => j,
        Ordering::Equal => i.min(j),
    }
}

fn crossover<R: Rng>(a: &Genome, b: &Genome, rng: &mut R) -> Genome {
    let positions = a
        .positions
        .iter()
        .zip(&b.positions)
        .map(|(&(ax, ay), &(bx, by))| {
            let w: f64 = rng.gen();
            (w * ax + (1.0 - w) * bx, w * ay + (1.0 - w) * by)
        })
        .collect();
    let cells = a
        .cells
        .iter()
        .zip(&b.cells)
        .map(|(&x, &y)| if rng.gen_bool(0.5) { x } else { y })
        .collect();
    let donors = a
        .donors
        .iter()
        .zip(&b.donors)
        .map(|(&x, &y)| if rng.gen_bool(0.5) { x } else { y })
        .collect();
    Genome { positions, cells, donors }
}

/// Share of position mutations that redraw the position uniformly in the
/// area instead of taking a Gaussian step.
const POSITION_RESET_SHARE: f64 = 0.1;

fn mutate<R: Rng>(g: &mut Genome, scenario: &Scenario, rate: f64, step: &Normal<f64>, rng: &mut R) {
    let f = scenario.fiabs().len();
    let cells = scenario.cell_count();
    for p in &mut g.positions {
        if rng.gen_bool(rate) {
            if rng.gen_bool(POSITION_RESET_SHARE) {
                *p = random_position(scenario, rng);
            } else {
                p.0 += step.sample(rng);
                p.1 += step.sample(rng);
            }
        }
    }
    for c in &mut g.cells {
        if rng.gen_bool(rate) {
            *c = CellId::from_index(rng.gen_range(0..cells), f);
        }
    }
    for d in &mut g.donors {
        if rng.gen_bool(rate) {
            *d = rng.gen_range(0..f);
        }
    }
}

/// Genetic search over MIAB positions and associations.
///
/// Each genome of generation `g` at slot `i` is bred from its own random
/// stream `(seed, g, i)`, and evaluations are reduced in slot order, so the
/// result does not depend on how many threads evaluate the population. The
/// initial population holds one genome with every UE on its nearest FIAB.
pub fn solve_ga(scenario: &Scenario, config: &GaConfig) -> Result<SolveResult, GaConfigError> {
    config.validate()?;
    let weight = config.penalty_weight.unwrap_or_else(|| objective_upper_bound(scenario));

    if scenario.miab_count() == 0 && scenario.fiabs().len() == 1 {
        let a = Assignment::direct(scenario, Vec::new());
        let e = evaluate(scenario, &a).expect("direct assignment is structurally valid");
        let best = if e.feasible { e.objective_bps } else { 0.0 };
        let frac = if e.feasible { 1.0 } else { 0.0 };
        return Ok(SolveResult {
            best_assignment: a,
            best_evaluation: e,
            generations_run: 1,
            best_objective_trace: alloc::vec![best],
            feasible_fraction_trace: alloc::vec![frac],
            evaluations: 1,
        });
    }

    let n = config.population_size;
    let sigma = 0.05 * scenario.deployment_area().bounding_box().diagonal();
    let step = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE)).expect("sigma is finite and positive");

    let mut population: Vec<Genome> = (0..n)
        .map(|i| {
            let mut rng = substream(config.seed, pack(INIT_GENERATION, i as u32));
            if i == 0 {
                let xy = (0..scenario.miab_count()).map(|_| random_position(scenario, &mut rng)).collect();
                Genome::from_assignment(&Assignment::direct(scenario, xy))
            } else {
                Genome::random(scenario, &mut rng)
            }
        })
        .collect();

    let mut incumbent: Option<(Assignment, Evaluation)> = None;
    let mut best_trace = Vec::with_capacity(config.generations);
    let mut feasible_trace = Vec::with_capacity(config.generations);
    let mut evaluations = 0;

    for generation in 0..config.generations {
        let evaluated = evaluate_population(scenario, &population);
        evaluations += evaluated.len();
        let fitness: Vec<f64> = evaluated.iter().map(|(_, e)| penalized_fitness(scenario, e, weight)).collect();

        let feasible = evaluated.iter().filter(|(_, e)| e.feasible).count();
        feasible_trace.push(feasible as f64 / n as f64);
        for (a, e) in &evaluated {
            let better = match &incumbent {
                None => true,
                Some((_, best)) => compare_candidates(scenario, e, best) == Ordering::Greater,
            };
            if better {
                incumbent = Some((a.clone(), e.clone()));
            }
        }
        let best_feasible = incumbent
            .as_ref()
            .filter(|(_, e)| e.feasible)
            .map_or(0.0, |(_, e)| e.objective_bps);
        best_trace.push(best_feasible);

        if generation + 1 == config.generations {
            break;
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| fitness[j].total_cmp(&fitness[i]).then(i.cmp(&j)));
        let mut next: Vec<Genome> = order[..config.elite_count].iter().map(|&i| population[i].clone()).collect();
        for slot in config.elite_count..n {
            let mut rng = substream(config.seed, pack(generation as u32, slot as u32));
            let p1 = tournament(&fitness, &mut rng);
            let p2 = tournament(&fitness, &mut rng);
            let mut child = if rng.gen_bool(config.crossover_rate) {
                crossover(&population[p1], &population[p2], &mut rng)
            } else {
                population[p1].clone()
            };
            mutate(&mut child, scenario, config.mutation_rate, &step, &mut rng);
            let repaired = decode_and_repair(&child, scenario);
            child.positions = repaired.miab_xy;
            next.push(child);
        }
        population = next;
    }

    let (best_assignment, best_evaluation) = incumbent.expect("at least one generation ran");
    Ok(SolveResult {
        best_assignment,
        best_evaluation,
        generations_run: config.generations,
        best_objective_trace: best_trace,
        feasible_fraction_trace: feasible_trace,
        evaluations,
    })
}
