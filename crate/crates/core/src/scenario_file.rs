//! TOML scenario documents.
//!
//! ```toml
//! [cell]
//! cell_radius_km = 0.7
//! tx_power_dbm = 60.0
//! noise_power_dbm = -93.0
//! prop_const_outdoor_db = 130.0
//! prop_const_indoor_db = 166.0
//! path_loss_exp = 3.5
//! tx_antennas = 8
//! rx_antennas = 2
//! prb_bandwidth_khz = 180.0
//! n_max_prbs = 100
//!
//! [service]
//! rate_kbps = 500.0
//! cell_throughput_mbps = 30.0
//! outdoor_fraction = 0.5
//!
//! [interference]
//! margins_db = [1.0, 8.0, 15.0]
//!
//! [geometry]
//! road_intensity_per_km = 9.0
//!
//! [monte_carlo]
//! seed = 1
//! realizations = 10000
//! ```
//!
//! Traffic is given either as `cell_throughput_mbps` + `outdoor_fraction`
//! in `[service]`, or as `outdoor_users_per_km` + `indoor_users_per_km2` in
//! `[geometry]`. Three margins without `breakpoints_km` split the cell at
//! `R/3` and `2R/3`. Optional keys and their defaults: `outdoor_model =
//! "cox"`, `radius_sampler = "paper"`, `region = "all"`.

use serde::{Deserialize, Serialize};

use crate::congestion::{Region, Scenario, Traffic};
use crate::error::{Error, Result};
use crate::geometry::{OutdoorModel, RadiusSampler};
use crate::linkmodel::{InterferenceModel, LinkBudget, Service};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub cell: CellSection,
    pub service: ServiceSection,
    pub interference: InterferenceSection,
    pub geometry: GeometrySection,
    pub monte_carlo: MonteCarloSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSection {
    pub cell_radius_km: f64,
    pub tx_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub prop_const_outdoor_db: f64,
    pub prop_const_indoor_db: f64,
    pub path_loss_exp: f64,
    pub tx_antennas: u32,
    pub rx_antennas: u32,
    pub prb_bandwidth_khz: f64,
    pub n_max_prbs: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceSection {
    pub rate_kbps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_throughput_mbps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outdoor_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferenceSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoints_km: Option<Vec<f64>>,
    pub margins_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub road_intensity_per_km: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outdoor_users_per_km: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indoor_users_per_km2: Option<f64>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub outdoor_model: OutdoorModel,
    #[serde(default, skip_serializing_if = "is_default")]
    pub radius_sampler: RadiusSampler,
    #[serde(default, skip_serializing_if = "is_default")]
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    pub seed: u64,
    pub realizations: usize,
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario sections always serialize")
    }

    pub fn to_scenario(&self) -> Result<Scenario> {
        let c = &self.cell;
        let link = LinkBudget {
            tx_power_dbm: c.tx_power_dbm,
            noise_power_dbm: c.noise_power_dbm,
            prop_const_db: c.prop_const_outdoor_db,
            prop_const_indoor_db: c.prop_const_indoor_db,
            path_loss_exp: c.path_loss_exp,
            tx_antennas: c.tx_antennas,
            rx_antennas: c.rx_antennas,
            prb_bandwidth_hz: c.prb_bandwidth_khz * 1e3,
            cell_radius_km: c.cell_radius_km,
            n_max: c.n_max_prbs,
        };
        let margins = self.interference.margins_db.clone();
        let interference = match &self.interference.breakpoints_km {
            Some(b) => InterferenceModel::new(b.clone(), margins),
            None if margins.len() == 3 => {
                InterferenceModel::three_region(c.cell_radius_km, margins[0], margins[1], margins[2])
            }
            None if margins.len() == 1 => Ok(InterferenceModel::uniform(margins[0])),
            None => Err(Error::InvalidParameter(format!(
                "{} margins need explicit breakpoints_km",
                margins.len()
            ))),
        }
        .map_err(|e| Error::Scenario(format!("[interference]: {e}")))?;
        let service = Service::new(self.service.rate_kbps * 1e3).map_err(|e| Error::Scenario(format!("[service]: {e}")))?;
        let g = &self.geometry;
        let traffic = match (
            self.service.cell_throughput_mbps,
            self.service.outdoor_fraction,
            g.outdoor_users_per_km,
            g.indoor_users_per_km2,
        ) {
            (Some(t), Some(f), None, None) => Traffic::Throughput {
                throughput_bps: t * 1e6,
                outdoor_fraction: f,
            },
            (None, None, Some(linear), Some(area)) => Traffic::Intensities { linear, area },
            _ => {
                return Err(Error::Scenario(
                    "traffic needs either [service] cell_throughput_mbps + outdoor_fraction, \
                     or [geometry] outdoor_users_per_km + indoor_users_per_km2"
                        .into(),
                ))
            }
        };
        let scenario = Scenario {
            link,
            interference,
            service,
            road_intensity: g.road_intensity_per_km,
            traffic,
            outdoor_model: g.outdoor_model,
            sampler: g.radius_sampler,
            region: g.region,
            seed: self.monte_carlo.seed,
            mc_realizations: self.monte_carlo.realizations,
        };
        scenario.validate().map_err(|e| Error::Scenario(e.to_string()))?;
        Ok(scenario)
    }

    pub fn from_scenario(s: &Scenario) -> Self {
        let (cell_throughput_mbps, outdoor_fraction, outdoor_users_per_km, indoor_users_per_km2) = match s.traffic {
            Traffic::Throughput {
                throughput_bps,
                outdoor_fraction,
            } => (Some(throughput_bps / 1e6), Some(outdoor_fraction), None, None),
            Traffic::Intensities { linear, area } => (None, None, Some(linear), Some(area)),
        };
        let im = &s.interference;
        let default_split = im.region_count() == 1
            || (im.region_count() == 3
                && im.breakpoints_km() == [s.link.cell_radius_km / 3.0, 2.0 * s.link.cell_radius_km / 3.0]);
        ScenarioFile {
            cell: CellSection {
                cell_radius_km: s.link.cell_radius_km,
                tx_power_dbm: s.link.tx_power_dbm,
                noise_power_dbm: s.link.noise_power_dbm,
                prop_const_outdoor_db: s.link.prop_const_db,
                prop_const_indoor_db: s.link.prop_const_indoor_db,
                path_loss_exp: s.link.path_loss_exp,
                tx_antennas: s.link.tx_antennas,
                rx_antennas: s.link.rx_antennas,
                prb_bandwidth_khz: s.link.prb_bandwidth_hz / 1e3,
                n_max_prbs: s.link.n_max,
            },
            service: ServiceSection {
                rate_kbps: s.service.rate_bps / 1e3,
                cell_throughput_mbps,
                outdoor_fraction,
            },
            interference: InterferenceSection {
                breakpoints_km: (!default_split).then(|| im.breakpoints_km().to_vec()),
                margins_db: im.margins_db().to_vec(),
            },
            geometry: GeometrySection {
                road_intensity_per_km: s.road_intensity,
                outdoor_users_per_km,
                indoor_users_per_km2,
                outdoor_model: s.outdoor_model,
                radius_sampler: s.sampler,
                region: s.region,
            },
            monte_carlo: MonteCarloSection {
                seed: s.seed,
                realizations: s.mc_realizations,
            },
        }
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    ScenarioFile::parse(text)?.to_scenario()
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"
[cell]
cell_radius_km = 0.7
tx_power_dbm = 60.0
noise_power_dbm = -93.0
prop_const_outdoor_db = 130.0
prop_const_indoor_db = 166.0
path_loss_exp = 3.5
tx_antennas = 8
rx_antennas = 2
prb_bandwidth_khz = 180.0
n_max_prbs = 8

[service]
rate_kbps = 500.0
cell_throughput_mbps = 30.0
outdoor_fraction = 0.5

[interference]
margins_db = [1.0, 8.0, 15.0]

[geometry]
road_intensity_per_km = 9.0

[monte_carlo]
seed = 1
realizations = 100
"#;

    #[test]
    fn parses_and_round_trips() {
        let s = parse_scenario(DOC).unwrap();
        assert_eq!(s.link.prb_bandwidth_hz, 180e3);
        assert_eq!(s.interference.breakpoints_km(), &[0.7 / 3.0, 1.4 / 3.0]);
        assert_eq!(
            s.traffic,
            Traffic::Throughput {
                throughput_bps: 30e6,
                outdoor_fraction: 0.5
            }
        );
        let text = ScenarioFile::from_scenario(&s).to_toml();
        assert_eq!(parse_scenario(&text).unwrap(), s);
        assert_eq!(ScenarioFile::from_scenario(&parse_scenario(&text).unwrap()).to_toml(), text);
    }

    #[test]
    fn rejects_unknown_keys_with_location() {
        let doc = DOC.replace("seed = 1", "seed = 1\nseeds = 2");
        let err = parse_scenario(&doc).unwrap_err().to_string();
        assert!(err.contains("unknown field"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn rejects_missing_keys() {
        let doc = DOC.replace("path_loss_exp = 3.5\n", "");
        let err = parse_scenario(&doc).unwrap_err().to_string();
        assert!(err.contains("path_loss_exp"), "{err}");
    }

    #[test]
    fn rejects_ambiguous_traffic() {
        let doc = DOC.replace("road_intensity_per_km = 9.0", "road_intensity_per_km = 9.0\noutdoor_users_per_km = 6.0");
        assert!(parse_scenario(&doc).is_err());
        let doc = DOC.replace("outdoor_fraction = 0.5\n", "");
        assert!(parse_scenario(&doc).is_err());
    }

    #[test]
    fn rejects_invalid_values() {
        assert!(parse_scenario(&DOC.replace("path_loss_exp = 3.5", "path_loss_exp = 2.0")).is_err());
        assert!(parse_scenario(&DOC.replace("margins_db = [1.0, 8.0, 15.0]", "margins_db = [1.0, 8.0]")).is_err());
        assert!(parse_scenario(&DOC.replace("outdoor_fraction = 0.5", "outdoor_fraction = 1.5")).is_err());
    }
}
