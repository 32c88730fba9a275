//! Inversion of the congestion probability: the smallest PRB budget `M`
//! with `Π(M) ≤ Π*` for a forecast cell throughput.

use rayon::prelude::*;

use crate::congestion::{CongestionCurve, Scenario};
use crate::error::{Error, Result};

pub const DEFAULT_M_CEILING: usize = 4096;
const INITIAL_BRACKET: usize = 64;

/// A dimensioning request.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionQuery {
    /// Scenario whose traffic is set from the forecast throughput.
    pub scenario: Scenario,
    /// Tolerated congestion probability, in `(0, 1)`.
    pub target_congestion: f64,
    pub m_ceiling: usize,
}

impl DimensionQuery {
    pub fn new(scenario: Scenario, target_congestion: f64) -> Self {
        Self {
            scenario,
            target_congestion,
            m_ceiling: DEFAULT_M_CEILING,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_congestion > 0.0 && self.target_congestion < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "target congestion must lie in (0, 1), got {}",
                self.target_congestion
            )));
        }
        if self.m_ceiling < 1 {
            return Err(Error::InvalidParameter("the M ceiling must be at least 1".into()));
        }
        self.scenario.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionReport {
    pub required_m: usize,
    /// `Π(required_m)`.
    pub pi_at: f64,
    /// `Π(required_m - 1)`.
    pub pi_before: f64,
    pub stderr_at: f64,
    pub stderr_before: f64,
    /// The curve the answer was read from, `M = 0..=bracket`.
    pub curve: CongestionCurve,
}

/// Smallest `M` with `curve[M] ≤ target` on a nonincreasing curve.
pub fn first_below(pi: &[f64], target: f64) -> Option<usize> {
    let idx = pi.partition_point(|p| *p > target);
    (idx < pi.len()).then_some(idx)
}

/// Solves `Π(M) ≤ Π*` on one fixed set of road realizations, doubling the
/// evaluated range of `M` until the target is bracketed.
pub fn dimension_prbs(q: &DimensionQuery) -> Result<DimensionReport> {
    q.validate()?;
    let model = q.scenario.prepare()?;
    let mut m_hi = INITIAL_BRACKET.min(q.m_ceiling);
    loop {
        let curve = model.averaged_congestion(m_hi);
        if let Some(m) = first_below(&curve.pi, q.target_congestion) {
            return Ok(DimensionReport {
                required_m: m,
                pi_at: curve.pi[m],
                pi_before: curve.pi[m - 1],
                stderr_at: curve.stderr[m],
                stderr_before: curve.stderr[m - 1],
                curve,
            });
        }
        if m_hi >= q.m_ceiling {
            return Err(Error::CeilingReached {
                target: q.target_congestion,
                ceiling: q.m_ceiling,
                achieved: curve.pi[m_hi],
            });
        }
        m_hi = (2 * m_hi).min(q.m_ceiling);
    }
}

/// Axis of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    /// Cell throughputs in bit/s.
    Throughput(Vec<f64>),
    /// Road intensities per km, at the scenario's throughput.
    RoadIntensity(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub throughput_bps: f64,
    pub road_intensity: f64,
    pub target_congestion: f64,
    pub result: Result<DimensionReport>,
}

/// Dimensions every grid point. Points keep the scenario seed, so all points
/// with the same road intensity see the same road realizations.
pub fn sweep(base: &DimensionQuery, axis: &SweepAxis, outdoor_fraction: f64) -> Result<Vec<SweepPoint>> {
    let (throughput, fraction) = match base.scenario.traffic {
        crate::congestion::Traffic::Throughput {
            throughput_bps,
            outdoor_fraction: f,
        } => (throughput_bps, f),
        crate::congestion::Traffic::Intensities { .. } => (f64::NAN, outdoor_fraction),
    };
    let points: Vec<(f64, f64)> = match axis {
        SweepAxis::Throughput(grid) => grid.iter().map(|t| (*t, base.scenario.road_intensity)).collect(),
        SweepAxis::RoadIntensity(grid) => grid.iter().map(|l| (throughput, *l)).collect(),
    };
    if points.is_empty() {
        return Err(Error::InvalidParameter("sweep grid is empty".into()));
    }
    Ok(points
        .into_par_iter()
        .map(|(tau, lambda)| {
            let mut scenario = base.scenario.with_throughput(tau, fraction);
            scenario.road_intensity = lambda;
            let query = DimensionQuery {
                scenario,
                ..base.clone()
            };
            SweepPoint {
                throughput_bps: tau,
                road_intensity: lambda,
                target_congestion: base.target_congestion,
                result: dimension_prbs(&query),
            }
        })
        .collect())
}
