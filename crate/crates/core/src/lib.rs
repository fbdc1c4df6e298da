//! Placement and evaluation engine for mobile IAB nodes (MIABs).
//!
//! The crate positions MIABs inside convex deployment areas that also hold
//! fixed IAB donors (FIABs), user equipment and cuboid obstacles. It chooses
//! MIAB positions and UE/backhaul associations that maximise the downlink
//! capacity offered to a "special team" of UEs, while keeping every link
//! above the RSRP floor and every MIAB backhaul above the traffic it carries.
//!
//! Module map:
//!
//! - [`geometry`]: points, cuboid obstacles, half-plane areas, LoS tests.
//! - [`radio`]: UMi path loss, RSRP, noise, SINR and spectral efficiency.
//! - [`capacity`]: PF/RR resource-block shares and link capacities.
//! - [`network`]: scenarios, assignments and the constrained evaluation.
//! - [`optimizer`]: the genetic search and the exhaustive grid oracle.
//! - [`experiments`]: scenario generation, V0..V5 variants and metrics.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. All floating-point math goes through `libm`, so results are
//! bit-identical between `std` and `no_std` builds.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod capacity;
pub mod experiments;
pub mod geometry;
pub mod network;
pub mod optimizer;
pub mod radio;
mod rng;

pub use capacity::{CellId, SchedulerKind};
pub use geometry::{AreaPolygon, Cuboid, LosClass, Point3, Segment};
pub use network::{evaluate, Assignment, Evaluation, Scenario, ScenarioParts};
pub use optimizer::{solve_ga, solve_oracle, GaConfig, SolveResult};
pub use radio::{LinkBudget, RadioParams};
