//! Radio resource dimensioning for an OFDM cell.
//!
//! Outdoor users sit on random roads (a Cox process driven by a Poisson line
//! process) and indoor users form a spatial Poisson process. Each user needs
//! a number of PRBs that grows with its distance to the base station, so the
//! total demand `Γ` is a compound-Poisson sum once the roads are fixed. The
//! crate computes `Π(M) = P(Γ ≥ M)` and inverts it to find the PRB budget
//! that keeps congestion below a target for a forecast cell throughput.
//!
//! Module map:
//! - [`linkmodel`]: SINR, Shannon rate, per-user PRB demand, ring radii.
//! - [`geometry`]: road and user sampling, per-level user masses.
//! - [`compound`]: PMF / CCDF of `Σ n·V_n`, Bell polynomials, Fourier route.
//! - [`congestion`]: conditional and road-averaged congestion, mean load.
//! - [`dimension`]: minimal `M` for a target congestion, sweeps.
//! - [`simulate`]: end-to-end Monte Carlo.
//! - [`scenario_file`]: TOML scenario documents.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundled;
pub mod compound;
pub mod congestion;
pub mod dimension;
pub mod error;
pub mod geometry;
pub mod linkmodel;
pub mod quadrature;
pub mod rng;
pub mod scenario_file;
pub mod simulate;

pub use compound::{CompoundSpec, PmfTable};
pub use congestion::{CongestionCurve, CongestionModel, Region, Scenario, Traffic};
pub use dimension::{DimensionQuery, DimensionReport, SweepAxis, SweepPoint};
pub use error::{Error, Result};
pub use geometry::{GeometryParams, OutdoorModel, RadiusSampler, RoadRealization, UserDrop};
pub use linkmodel::{DemandProfile, Environment, InterferenceModel, LinkBudget, Service};
pub use scenario_file::{parse_scenario, ScenarioFile};
pub use simulate::{EmpiricalCurve, SimulationSummary};

/// Version recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
