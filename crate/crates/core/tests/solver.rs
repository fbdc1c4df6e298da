use miab_core::experiments::{generate_scenario, CampaignConfig, VariantId};
use miab_core::geometry::{dist2d, los_class};
use miab_core::network::NamedArea;
use miab_core::optimizer::grid_points;
use miab_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CORNER: (f64, f64) = (40.0, 40.0);

fn wall(x0: f64, y0: f64, x1: f64, y1: f64) -> Cuboid {
    Cuboid::axis_aligned(Point3::new(x0, y0, 0.0), Point3::new(x1, y1, 20.0)).unwrap()
}

/// One special UE walled in on three sides, with a gap facing the north-east
/// corner of a 30 m yard. The FIAB's direct path is blocked by the east wall.
/// The raised noise floor keeps spectral efficiency off its ceiling so the
/// LoS positions near the corner stand out.
fn corner_los() -> Scenario {
    let radio = RadioParams { noise_exponent: -16.5, f_fiab_ghz: 2.0, ..RadioParams::default() };
    Scenario::new(ScenarioParts {
        areas: vec![NamedArea { name: "yard".into(), polygon: AreaPolygon::rectangle(10.0, 10.0, 40.0, 40.0).unwrap() }],
        fiabs: vec![(52.0, 34.0)],
        miab_count: 1,
        ues: vec![(30.0, 30.0)],
        special_team: vec![0],
        obstacles: vec![
            wall(26.0, 26.0, 27.0, 34.0),
            wall(26.0, 26.0, 34.0, 27.0),
            wall(26.0, 33.0, 31.0, 34.0),
            wall(33.0, 26.0, 34.0, 31.0),
        ],
        radio,
        scheduler: SchedulerKind::Pf,
        deployment_area: 0,
    })
    .unwrap()
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

#[test]
fn oracle_places_corner_scenario_miab_at_the_los_corner() {
    let sc = corner_los();
    let r = solve_oracle(&sc, 1.0).unwrap();
    assert!(r.best_evaluation.feasible);
    let xy = r.best_assignment.miab_xy[0];
    assert!(dist(xy, CORNER) < 10.0, "{xy:?}");
    let seg = Segment::new(sc.miab_point(xy), sc.ues()[0]).unwrap();
    assert_eq!(los_class(&seg, sc.obstacles()), LosClass::Los);
}

#[test]
fn ga_finds_corner_in_nine_of_ten_seeds() {
    let sc = corner_los();
    let oracle = solve_oracle(&sc, 1.0).unwrap().best_assignment.miab_xy[0];
    let hits = (0..10)
        .filter(|&seed| {
            let r = solve_ga(&sc, &GaConfig { seed, ..GaConfig::default() }).unwrap();
            let xy = r.best_assignment.miab_xy[0];
            r.best_evaluation.feasible && dist(xy, CORNER) <= 10.0 && dist(xy, oracle) <= 10.0
        })
        .count();
    assert!(hits >= 9, "{hits}/10");
}

fn desk_config() -> CampaignConfig {
    CampaignConfig {
        areas: vec![NamedArea { name: "desk".into(), polygon: AreaPolygon::rectangle(0.0, 0.0, 120.0, 80.0).unwrap() }],
        ..CampaignConfig::default()
    }
}

#[test]
fn oracle_dominates_ga_associations_on_its_grid() {
    let config = desk_config();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..4 {
        let family = generate_scenario(&config, 0, &mut rng).unwrap();
        let sc = family.variant(VariantId::ALL[2 + k], false);
        let oracle = solve_oracle(&sc, 20.0).unwrap();
        let ga = solve_ga(&sc, &GaConfig { seed: k as u64, generations: 30, ..GaConfig::default() }).unwrap();
        for xy in grid_points(sc.deployment_area(), 20.0) {
            let a = Assignment { miab_xy: vec![xy], ..ga.best_assignment.clone() };
            let e = evaluate(&sc, &a).unwrap();
            if e.feasible {
                assert!(oracle.best_evaluation.objective_bps >= e.objective_bps, "{k} {xy:?}");
            }
        }
    }
}

#[test]
fn generated_layouts_respect_range_over_a_thousand_seeds() {
    let config = CampaignConfig::default();
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let area = (seed % config.areas.len() as u64) as usize;
        let family = generate_scenario(&config, area, &mut rng).unwrap();
        let sc = family.variant(VariantId::V3, false);
        let fiab = sc.fiabs()[0];
        for ue in sc.ues() {
            let d = dist2d(*ue, fiab);
            assert!((10.0..=5000.0).contains(&d), "seed {seed}: {d}");
        }
        for &t in sc.special_team() {
            let p = sc.ues()[t];
            assert!(sc.deployment_area().contains(p.x, p.y));
        }
    }
}
