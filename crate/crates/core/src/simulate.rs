//! Monte-Carlo counterpart of the analytic path: draw roads and users, give
//! each user its PRB demand, and add them up.

use rand::Rng;
use rayon::prelude::*;

use crate::congestion::CongestionModel;
use crate::geometry::{sample_roads, sample_users, OutdoorModel, RoadRealization, UserDrop};
use crate::linkmodel::Environment;
use crate::rng::stream_rng;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;
const CHUNK: usize = 256;

/// Per-environment, per-level user counts of one snapshot.
#[derive(Debug, Clone, PartialEq)]
struct Snapshot {
    gamma: u64,
    outdoor: Vec<u64>,
    indoor: Vec<u64>,
}

/// Total PRBs requested by the users of a drop.
pub fn total_demand(model: &CongestionModel, drop: &UserDrop) -> u64 {
    drop.users
        .iter()
        .filter_map(|u| model.profile(u.env).level_at(u.distance_km))
        .map(u64::from)
        .sum()
}

fn snapshot(model: &CongestionModel, drop: &UserDrop) -> Snapshot {
    let levels = model.outdoor_profile().max_level().max(model.indoor_profile().max_level()) as usize;
    let mut outdoor = vec![0; levels];
    let mut indoor = vec![0; levels];
    let mut gamma = 0;
    for user in &drop.users {
        if let Some(n) = model.profile(user.env).level_at(user.distance_km) {
            gamma += u64::from(n);
            let counts = match user.env {
                Environment::Outdoor => &mut outdoor,
                Environment::Indoor => &mut indoor,
            };
            counts[n as usize - 1] += 1;
        }
    }
    Snapshot { gamma, outdoor, indoor }
}

fn draw_drop<R: Rng + ?Sized>(model: &CongestionModel, roads: Option<&RoadRealization>, rng: &mut R) -> UserDrop {
    let scn = model.scenario();
    let radius = scn.link.cell_radius_km;
    let sampled;
    let road = match roads {
        Some(r) => r,
        None => {
            sampled = if scn.outdoor_model == OutdoorModel::Cox {
                sample_roads(model.geometry(), radius, scn.sampler, rng)
            } else {
                RoadRealization::empty()
            };
            &sampled
        }
    };
    sample_users(model.geometry(), radius, scn.outdoor_model, road, rng)
}

/// One draw of `Γ`.
pub fn simulate_once<R: Rng + ?Sized>(model: &CongestionModel, rng: &mut R) -> u64 {
    total_demand(model, &draw_drop(model, None, rng))
}

/// Aggregated replications.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    pub replications: usize,
    /// `histogram[g]` counts replications with `Γ = g`.
    pub histogram: Vec<u64>,
    pub outdoor_level_sum: Vec<f64>,
    pub outdoor_level_sq: Vec<f64>,
    pub indoor_level_sum: Vec<f64>,
    pub indoor_level_sq: Vec<f64>,
}

impl SimulationSummary {
    fn empty(levels: usize) -> Self {
        Self {
            replications: 0,
            histogram: Vec::new(),
            outdoor_level_sum: vec![0.0; levels],
            outdoor_level_sq: vec![0.0; levels],
            indoor_level_sum: vec![0.0; levels],
            indoor_level_sq: vec![0.0; levels],
        }
    }

    fn add(&mut self, s: &Snapshot) {
        self.replications += 1;
        let g = s.gamma as usize;
        if self.histogram.len() <= g {
            self.histogram.resize(g + 1, 0);
        }
        self.histogram[g] += 1;
        for (i, &c) in s.outdoor.iter().enumerate() {
            self.outdoor_level_sum[i] += c as f64;
            self.outdoor_level_sq[i] += (c * c) as f64;
        }
        for (i, &c) in s.indoor.iter().enumerate() {
            self.indoor_level_sum[i] += c as f64;
            self.indoor_level_sq[i] += (c * c) as f64;
        }
    }

    fn merge(mut self, other: SimulationSummary) -> Self {
        self.replications += other.replications;
        if self.histogram.len() < other.histogram.len() {
            self.histogram.resize(other.histogram.len(), 0);
        }
        for (a, b) in self.histogram.iter_mut().zip(&other.histogram) {
            *a += b;
        }
        let pairs = [
            (&mut self.outdoor_level_sum, &other.outdoor_level_sum),
            (&mut self.outdoor_level_sq, &other.outdoor_level_sq),
            (&mut self.indoor_level_sum, &other.indoor_level_sum),
            (&mut self.indoor_level_sq, &other.indoor_level_sq),
        ];
        for (a, b) in pairs {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self
    }

    pub fn mean_gamma(&self) -> f64 {
        let total: f64 = self.histogram.iter().enumerate().map(|(g, c)| g as f64 * *c as f64).sum();
        total / self.replications as f64
    }

    pub fn variance_gamma(&self) -> f64 {
        let n = self.replications as f64;
        let mean = self.mean_gamma();
        let sq: f64 = self
            .histogram
            .iter()
            .enumerate()
            .map(|(g, c)| (g as f64 - mean).powi(2) * *c as f64)
            .sum();
        sq / (n - 1.0)
    }

    /// Realized mean number of outdoor users per snapshot.
    pub fn mean_outdoor_users(&self) -> f64 {
        self.outdoor_level_sum.iter().sum::<f64>() / self.replications as f64
    }

    pub fn mean_indoor_users(&self) -> f64 {
        self.indoor_level_sum.iter().sum::<f64>() / self.replications as f64
    }

    /// Variance-to-mean ratio of the per-level counts, `None` for empty levels.
    pub fn dispersion(&self, env: Environment) -> Vec<Option<f64>> {
        let (sum, sq) = match env {
            Environment::Outdoor => (&self.outdoor_level_sum, &self.outdoor_level_sq),
            Environment::Indoor => (&self.indoor_level_sum, &self.indoor_level_sq),
        };
        let n = self.replications as f64;
        sum.iter()
            .zip(sq)
            .map(|(s, q)| {
                let mean = s / n;
                (mean > 0.0).then(|| (q - n * mean * mean) / (n - 1.0) / mean)
            })
            .collect()
    }

    /// Empirical `P(Γ ≥ M)` for `M = 0..=m_max` with Wilson 95% intervals.
    pub fn empirical_ccdf(&self, m_max: usize) -> EmpiricalCurve {
        let n = self.replications as u64;
        let mut at_least = vec![0u64; m_max + 1];
        let mut running = 0u64;
        let len = self.histogram.len();
        // suffix sums of the histogram
        for g in (0..len.max(m_max + 1)).rev() {
            running += self.histogram.get(g).copied().unwrap_or(0);
            if g <= m_max {
                at_least[g] = running;
            }
        }
        let mut curve = EmpiricalCurve {
            p_hat: Vec::with_capacity(m_max + 1),
            lower: Vec::with_capacity(m_max + 1),
            upper: Vec::with_capacity(m_max + 1),
            replications: self.replications,
        };
        for k in at_least {
            let (lo, hi) = wilson_interval(k, n);
            curve.p_hat.push(k as f64 / n as f64);
            curve.lower.push(lo);
            curve.upper.push(hi);
        }
        curve
    }
}

/// Empirical congestion curve.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCurve {
    pub p_hat: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub replications: usize,
}

/// Wilson score interval for `k` successes out of `n` at 95%.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lower = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let upper = if k == n { 1.0 } else { (center + half).min(1.0) };
    (lower, upper)
}

fn run(model: &CongestionModel, replications: usize, roads: Option<&RoadRealization>) -> SimulationSummary {
    let levels = model.outdoor_profile().max_level().max(model.indoor_profile().max_level()) as usize;
    let seed = model.scenario().seed;
    (0..replications.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = SimulationSummary::empty(levels);
            for i in c * CHUNK..((c + 1) * CHUNK).min(replications) {
                let mut rng = stream_rng(seed, i as u64);
                let drop = draw_drop(model, roads, &mut rng);
                acc.add(&snapshot(model, &drop));
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(SimulationSummary::empty(levels), SimulationSummary::merge)
}

/// `replications` independent snapshots; replication `i` uses stream
/// `(seed, i)`, so its roads coincide with analytic realization `i`.
pub fn simulate(model: &CongestionModel, replications: usize) -> SimulationSummary {
    run(model, replications, None)
}

/// Snapshots that all share the given roads.
pub fn simulate_with_roads(model: &CongestionModel, road: &RoadRealization, replications: usize) -> SimulationSummary {
    run(model, replications, Some(road))
}

/// Empirical congestion curve from `replications` snapshots.
pub fn empirical_ccdf(model: &CongestionModel, m_max: usize, replications: usize) -> EmpiricalCurve {
    simulate(model, replications).empirical_ccdf(m_max)
}
