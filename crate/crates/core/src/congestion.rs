//! Congestion probability `Π(M) = P(Γ ≥ M)` of the total requested PRBs,
//! conditionally on the roads and averaged over road realizations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compound::{ccdf_bell, ccdf_curve, CompoundSpec};
use crate::error::{Error, Result};
use crate::geometry::{
    expected_outdoor_masses, indoor_masses, outdoor_masses, sample_roads, GeometryParams, OutdoorModel,
    RadiusSampler, RoadRealization,
};
use crate::linkmodel::{ring_radii, DemandProfile, Environment, InterferenceModel, LinkBudget, Service};
use crate::rng::stream_rng;

/// Where the user intensities come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Traffic {
    /// Users per km of road and per km².
    Intensities { linear: f64, area: f64 },
    /// Forecast cell throughput split between outdoor and indoor users.
    Throughput { throughput_bps: f64, outdoor_fraction: f64 },
}

/// Part of the cell whose users are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    #[default]
    All,
    Center,
    Middle,
    Edge,
}

impl Region {
    /// Index of the interference region, `None` for the whole cell.
    fn index(self, regions: usize) -> Result<Option<usize>> {
        match self {
            Region::All => Ok(None),
            Region::Center => Ok(Some(0)),
            Region::Edge => Ok(Some(regions - 1)),
            Region::Middle if regions == 3 => Ok(Some(1)),
            Region::Middle => Err(Error::InvalidParameter(format!(
                "region 'middle' needs a three-region interference model, got {regions} region(s)"
            ))),
        }
    }
}

/// Everything needed to evaluate the congestion of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub link: LinkBudget,
    pub interference: InterferenceModel,
    pub service: Service,
    /// Roads per km.
    pub road_intensity: f64,
    pub traffic: Traffic,
    pub outdoor_model: OutdoorModel,
    pub sampler: RadiusSampler,
    pub region: Region,
    pub seed: u64,
    /// Road realizations averaged by the analytic path.
    pub mc_realizations: usize,
}

/// `u = τ/C*` users split into `δ = f·u/(λπR²)` and `κ = (1-f)·u/(πR²)`.
pub fn intensities_from_throughput(
    throughput_bps: f64,
    rate_bps: f64,
    cell_radius_km: f64,
    road_intensity: f64,
    outdoor_fraction: f64,
) -> Result<(f64, f64)> {
    if !(throughput_bps > 0.0) || !throughput_bps.is_finite() {
        return Err(Error::InvalidParameter(format!("cell throughput must be positive, got {throughput_bps}")));
    }
    if !(0.0..=1.0).contains(&outdoor_fraction) {
        return Err(Error::InvalidParameter(format!(
            "outdoor fraction must lie in [0, 1], got {outdoor_fraction}"
        )));
    }
    if outdoor_fraction > 0.0 && !(road_intensity > 0.0) {
        return Err(Error::InfeasibleSplit {
            fraction: outdoor_fraction,
            road_intensity,
        });
    }
    let users = throughput_bps / rate_bps;
    let area = std::f64::consts::PI * cell_radius_km * cell_radius_km;
    let delta = if outdoor_fraction > 0.0 {
        outdoor_fraction * users / (road_intensity * area)
    } else {
        0.0
    };
    let kappa = (1.0 - outdoor_fraction) * users / area;
    Ok((delta, kappa))
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.link.validate()?;
        self.interference.validate_for(self.link.cell_radius_km)?;
        Service::new(self.service.rate_bps)?;
        if self.mc_realizations < 1 {
            return Err(Error::InvalidParameter("at least one road realization is required".into()));
        }
        self.region.index(self.interference.region_count())?;
        self.geometry()?.validate()
    }

    /// Resolved intensities.
    pub fn geometry(&self) -> Result<GeometryParams> {
        let (linear, area) = match self.traffic {
            Traffic::Intensities { linear, area } => (linear, area),
            Traffic::Throughput {
                throughput_bps,
                outdoor_fraction,
            } => intensities_from_throughput(
                throughput_bps,
                self.service.rate_bps,
                self.link.cell_radius_km,
                self.road_intensity,
                outdoor_fraction,
            )?,
        };
        Ok(GeometryParams {
            road_intensity: self.road_intensity,
            user_intensity_linear: linear,
            user_intensity_area: area,
        })
    }

    /// Same scenario with a different forecast throughput.
    pub fn with_throughput(&self, throughput_bps: f64, outdoor_fraction: f64) -> Scenario {
        Scenario {
            traffic: Traffic::Throughput {
                throughput_bps,
                outdoor_fraction,
            },
            ..self.clone()
        }
    }

    pub fn prepare(&self) -> Result<CongestionModel> {
        CongestionModel::new(self)
    }
}

/// Averaged congestion curve, indexed by `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct CongestionCurve {
    pub pi: Vec<f64>,
    pub stderr: Vec<f64>,
    pub realizations: usize,
}

impl CongestionCurve {
    pub fn m_max(&self) -> usize {
        self.pi.len() - 1
    }
}

/// A scenario with its demand profiles and deterministic masses resolved.
#[derive(Debug, Clone)]
pub struct CongestionModel {
    scenario: Scenario,
    geometry: GeometryParams,
    outdoor: DemandProfile,
    indoor: DemandProfile,
    /// Masses that do not depend on the roads: indoor users, plus outdoor
    /// users when they form a spatial PPP.
    fixed: CompoundSpec,
}

/// Realizations summed sequentially before partial sums are combined; fixed
/// so the floating-point reduction order does not depend on thread count.
const CHUNK: usize = 32;

impl CongestionModel {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        scenario.validate()?;
        let geometry = scenario.geometry()?;
        let lb = &scenario.link;
        let im = &scenario.interference;
        let mut outdoor = ring_radii(lb, im, &scenario.service, Environment::Outdoor);
        let mut indoor = ring_radii(lb, im, &scenario.service, Environment::Indoor);
        if let Some(idx) = scenario.region.index(im.region_count())? {
            let (lo, hi) = im.regions(lb.cell_radius_km)[idx];
            outdoor = outdoor.restricted(lo, hi);
            indoor = indoor.restricted(lo, hi);
        }
        let mut fixed = indoor_masses(&indoor, geometry.user_intensity_area);
        if scenario.outdoor_model == OutdoorModel::Ppp {
            let ppp = indoor_masses(&outdoor, geometry.road_intensity * geometry.user_intensity_linear);
            fixed = fixed.superpose(&ppp);
        }
        let levels = outdoor.max_level().max(indoor.max_level()) as usize;
        fixed = fixed.superpose(&CompoundSpec::new(vec![0.0; levels])?);
        Ok(Self {
            scenario: scenario.clone(),
            geometry,
            outdoor,
            indoor,
            fixed,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn geometry(&self) -> &GeometryParams {
        &self.geometry
    }

    pub fn outdoor_profile(&self) -> &DemandProfile {
        &self.outdoor
    }

    pub fn indoor_profile(&self) -> &DemandProfile {
        &self.indoor
    }

    pub fn profile(&self, env: Environment) -> &DemandProfile {
        match env {
            Environment::Outdoor => &self.outdoor,
            Environment::Indoor => &self.indoor,
        }
    }

    /// True when the conditional law does not depend on the roads.
    pub fn is_road_independent(&self) -> bool {
        self.scenario.outdoor_model == OutdoorModel::Ppp
            || self.geometry.road_intensity == 0.0
            || self.geometry.user_intensity_linear == 0.0
    }

    /// Roads of realization `i`, drawn first from stream `(seed, i)`.
    pub fn road_realization(&self, i: usize) -> RoadRealization {
        let mut rng = stream_rng(self.scenario.seed, i as u64);
        sample_roads(&self.geometry, self.scenario.link.cell_radius_km, self.scenario.sampler, &mut rng)
    }

    /// Combined per-level intensities `μ_n(Y) + μ̃_n` given the roads.
    pub fn conditional_spec(&self, road: &RoadRealization) -> CompoundSpec {
        if self.scenario.outdoor_model == OutdoorModel::Ppp {
            return self.fixed.clone();
        }
        let outdoor = outdoor_masses(road, &self.outdoor, self.geometry.user_intensity_linear);
        self.fixed.superpose(&outdoor)
    }

    /// `P(Γ ≥ M | roads)`.
    pub fn conditional_congestion(&self, road: &RoadRealization, m: usize) -> f64 {
        ccdf_bell(&self.conditional_spec(road), m)
    }

    /// `P(Γ ≥ M | roads)` for `M = 0..=m_max`.
    pub fn conditional_curve(&self, road: &RoadRealization, m_max: usize) -> Vec<f64> {
        ccdf_curve(&self.conditional_spec(road), m_max)
    }

    /// Average of the conditional curves over `mc_realizations` road draws.
    pub fn averaged_congestion(&self, m_max: usize) -> CongestionCurve {
        let n = self.scenario.mc_realizations;
        if self.is_road_independent() {
            let pi = self.conditional_curve(&RoadRealization::empty(), m_max);
            return CongestionCurve {
                stderr: vec![0.0; pi.len()],
                pi,
                realizations: n,
            };
        }
        let chunks: Vec<(Vec<f64>, Vec<f64>)> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut sum = vec![0.0; m_max + 1];
                let mut sq = vec![0.0; m_max + 1];
                for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                    let curve = self.conditional_curve(&self.road_realization(i), m_max);
                    for (m, p) in curve.into_iter().enumerate() {
                        sum[m] += p;
                        sq[m] += p * p;
                    }
                }
                (sum, sq)
            })
            .collect();
        let mut sum = vec![0.0; m_max + 1];
        let mut sq = vec![0.0; m_max + 1];
        for (s, q) in &chunks {
            for m in 0..=m_max {
                sum[m] += s[m];
                sq[m] += q[m];
            }
        }
        let nf = n as f64;
        let pi: Vec<f64> = sum.iter().map(|s| s / nf).collect();
        let stderr = if n > 1 {
            pi.iter()
                .zip(&sq)
                .map(|(mean, q)| ((q - nf * mean * mean).max(0.0) / (nf - 1.0) / nf).sqrt())
                .collect()
        } else {
            vec![0.0; m_max + 1]
        };
        CongestionCurve {
            pi,
            stderr,
            realizations: n,
        }
    }

    /// Road-averaged per-level intensities `E[μ_n] + μ̃_n`.
    pub fn mean_spec(&self) -> CompoundSpec {
        match self.scenario.outdoor_model {
            OutdoorModel::Ppp => self.fixed.clone(),
            OutdoorModel::Cox => {
                self.fixed
                    .superpose(&expected_outdoor_masses(&self.geometry, &self.outdoor, self.scenario.sampler))
            }
        }
    }

    /// `E(Γ)`.
    pub fn expected_load(&self) -> f64 {
        self.mean_spec().mean()
    }
}
