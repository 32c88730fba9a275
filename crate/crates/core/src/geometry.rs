//! Road (Poisson line process) and user (Cox / spatial PPP) sampling, and
//! the per-level user masses that feed the compound-Poisson sum.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::compound::CompoundSpec;
use crate::error::{Error, Result};
use crate::linkmodel::{DemandProfile, Environment};

/// Intensities of the road and user processes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryParams {
    /// Roads per km; `2πλR` roads hit a cell of radius `R` on average.
    pub road_intensity: f64,
    /// Outdoor users per km of road.
    pub user_intensity_linear: f64,
    /// Indoor users per km².
    pub user_intensity_area: f64,
}

impl GeometryParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.road_intensity, self.user_intensity_linear, self.user_intensity_area];
        if all.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter("intensities must be finite and >= 0".into()));
        }
        Ok(())
    }

    /// Expected number of roads crossing the cell, `ω = 2πλR`.
    pub fn expected_roads(&self, cell_radius_km: f64) -> f64 {
        2.0 * std::f64::consts::PI * self.road_intensity * cell_radius_km
    }
}

/// Law of the distance between a road and the cell center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiusSampler {
    /// `r = R·√U`: density `2r/R²`, uniform in the disk.
    #[default]
    Paper,
    /// `r = R·U`: uniform on `[0, R]`, the line-process parameterization.
    Standard,
}

impl RadiusSampler {
    fn draw<R: Rng + ?Sized>(self, cell_radius_km: f64, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        match self {
            RadiusSampler::Paper => cell_radius_km * u.sqrt(),
            RadiusSampler::Standard => cell_radius_km * u,
        }
    }

    /// Expected chord mass of a road inside the annulus `(u, v]`, per road
    /// and per unit linear intensity.
    pub fn expected_chord_mass(self, cell_radius_km: f64, u: f64, v: f64) -> f64 {
        let r = cell_radius_km;
        match self {
            // (2/R²) ∫ 2√(d²-ρ²) ρ dρ = 4 d³ / (3 R²)
            RadiusSampler::Paper => 4.0 * (v.powi(3) - u.powi(3)) / (3.0 * r * r),
            // (1/R) ∫ 2√(d²-ρ²) dρ = π d² / (2 R)
            RadiusSampler::Standard => std::f64::consts::PI * (v * v - u * u) / (2.0 * r),
        }
    }
}

/// Distances of the sampled roads to the cell center.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RoadRealization {
    pub chord_distances: Vec<f64>,
}

impl RoadRealization {
    pub fn new(chord_distances: Vec<f64>) -> Self {
        Self { chord_distances }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn road_count(&self) -> usize {
        self.chord_distances.len()
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let draw: f64 = Poisson::new(mean).expect("positive finite mean").sample(rng);
    draw as u64
}

/// Samples the roads crossing a cell of radius `R`.
pub fn sample_roads<R: Rng + ?Sized>(
    gp: &GeometryParams,
    cell_radius_km: f64,
    sampler: RadiusSampler,
    rng: &mut R,
) -> RoadRealization {
    let count = poisson_count(gp.expected_roads(cell_radius_km), rng);
    let chord_distances = (0..count).map(|_| sampler.draw(cell_radius_km, rng)).collect();
    RoadRealization { chord_distances }
}

fn half_chord(radius: f64, r: f64) -> f64 {
    if radius > r {
        (radius * radius - r * r).sqrt()
    } else {
        0.0
    }
}

/// Expected users on the road segments inside the annulus `(u, v]`.
pub fn chord_mass(road: &RoadRealization, u: f64, v: f64, delta: f64) -> f64 {
    let length: f64 = road
        .chord_distances
        .iter()
        .map(|&r| half_chord(v, r) - half_chord(u, r))
        .sum();
    2.0 * delta * length
}

fn weights_from<F: Fn(f64, f64) -> f64>(profile: &DemandProfile, mass: F) -> Vec<f64> {
    let n = profile.max_level().max(1) as usize;
    let mut w = vec![0.0; n];
    for (level, intervals) in profile.levels() {
        w[*level as usize - 1] = intervals.iter().map(|&(u, v)| mass(u, v)).sum();
    }
    w
}

/// Per-level outdoor intensities `μ_n(Y)` on a realized set of roads.
pub fn outdoor_masses(road: &RoadRealization, profile: &DemandProfile, delta: f64) -> CompoundSpec {
    debug_assert_eq!(profile.environment(), Environment::Outdoor);
    let w = weights_from(profile, |u, v| chord_mass(road, u, v, delta));
    CompoundSpec::new(w).expect("chord masses are nonnegative")
}

/// Per-level intensities of a spatial PPP, `κπ Σ (v² - u²)`.
pub fn indoor_masses(profile: &DemandProfile, kappa: f64) -> CompoundSpec {
    let w = weights_from(profile, |u, v| kappa * std::f64::consts::PI * (v * v - u * u));
    CompoundSpec::new(w).expect("annulus areas are nonnegative")
}

/// Per-level road-averaged outdoor intensities `E[μ_n]` for a radius law.
pub fn expected_outdoor_masses(
    gp: &GeometryParams,
    profile: &DemandProfile,
    sampler: RadiusSampler,
) -> CompoundSpec {
    let r = profile.cell_radius_km();
    let scale = gp.expected_roads(r) * gp.user_intensity_linear;
    let w = weights_from(profile, |u, v| scale * sampler.expected_chord_mass(r, u, v));
    CompoundSpec::new(w).expect("expected masses are nonnegative")
}

/// Mean number of users `(λδ + κ)πR²`.
///
/// This is the nominal count used to translate cell throughput into
/// intensities; the outdoor count actually realized on random chords differs
/// (see [`crate::simulate::SimulationSummary::mean_outdoor_users`]).
pub fn mean_users(gp: &GeometryParams, cell_radius_km: f64) -> f64 {
    (gp.road_intensity * gp.user_intensity_linear + gp.user_intensity_area)
        * std::f64::consts::PI
        * cell_radius_km
        * cell_radius_km
}

/// A sampled user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct User {
    pub distance_km: f64,
    pub env: Environment,
}

/// One snapshot of user positions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UserDrop {
    pub users: Vec<User>,
}

impl UserDrop {
    pub fn count(&self, env: Environment) -> usize {
        self.users.iter().filter(|u| u.env == env).count()
    }
}

/// How outdoor users are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutdoorModel {
    /// Linear PPPs of intensity `δ` on the roads.
    #[default]
    Cox,
    /// Spatial PPP of intensity `λδ`, the matched-intensity baseline.
    Ppp,
}

fn disk_users<R: Rng + ?Sized>(intensity: f64, cell_radius_km: f64, env: Environment, rng: &mut R, out: &mut Vec<User>) {
    let count = poisson_count(intensity * std::f64::consts::PI * cell_radius_km * cell_radius_km, rng);
    for _ in 0..count {
        let u: f64 = rng.random();
        // 1 - U lies in (0, 1], keeping users off the exact center.
        let distance_km = cell_radius_km * (1.0 - u).sqrt();
        out.push(User { distance_km, env });
    }
}

/// Samples outdoor users on the given roads and indoor users in the disk.
pub fn sample_users<R: Rng + ?Sized>(
    gp: &GeometryParams,
    cell_radius_km: f64,
    outdoor: OutdoorModel,
    road: &RoadRealization,
    rng: &mut R,
) -> UserDrop {
    let mut users = Vec::new();
    match outdoor {
        OutdoorModel::Cox => {
            for &r in &road.chord_distances {
                let h = half_chord(cell_radius_km, r);
                let count = poisson_count(2.0 * gp.user_intensity_linear * h, rng);
                for _ in 0..count {
                    let t = h * (2.0 * rng.random::<f64>() - 1.0);
                    let distance_km = (r * r + t * t).sqrt().min(cell_radius_km);
                    users.push(User {
                        distance_km,
                        env: Environment::Outdoor,
                    });
                }
            }
        }
        OutdoorModel::Ppp => disk_users(
            gp.road_intensity * gp.user_intensity_linear,
            cell_radius_km,
            Environment::Outdoor,
            rng,
            &mut users,
        ),
    }
    disk_users(gp.user_intensity_area, cell_radius_km, Environment::Indoor, rng, &mut users);
    UserDrop { users }
}
