//! Link budget, SINR, Shannon rate and the radial PRB demand profile.
//!
//! Distances are in km and the 1 km reference distance is absorbed into the
//! propagation constants, so a user at distance `x` receives
//! `P - a - 10 * path_loss_exp * log10(x)` dBm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Propagation environment of a user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Environment {
    Outdoor,
    Indoor,
}

/// Radio parameters of the cell.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    /// Transmit power including antenna gain, dBm.
    pub tx_power_dbm: f64,
    /// Thermal noise plus receiver noise figure over the full band, dBm.
    pub noise_power_dbm: f64,
    /// Outdoor propagation constant, dB at 1 km.
    pub prop_const_db: f64,
    /// Indoor propagation constant, dB at 1 km.
    pub prop_const_indoor_db: f64,
    /// Path loss exponent (`2b`).
    pub path_loss_exp: f64,
    pub tx_antennas: u32,
    pub rx_antennas: u32,
    /// Bandwidth of one PRB, Hz.
    pub prb_bandwidth_hz: f64,
    pub cell_radius_km: f64,
    /// Operator cap on the PRBs granted to a single user.
    pub n_max: u32,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.tx_power_dbm,
            self.noise_power_dbm,
            self.prop_const_db,
            self.prop_const_indoor_db,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("link budget powers must be finite".into()));
        }
        if !(self.path_loss_exp > 2.0) || !self.path_loss_exp.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "path loss exponent must exceed 2, got {}",
                self.path_loss_exp
            )));
        }
        if !(self.cell_radius_km > 0.0) || !self.cell_radius_km.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cell radius must be positive, got {}",
                self.cell_radius_km
            )));
        }
        if !(self.prb_bandwidth_hz > 0.0) || !self.prb_bandwidth_hz.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "PRB bandwidth must be positive, got {}",
                self.prb_bandwidth_hz
            )));
        }
        if self.spatial_layers() < 1 {
            return Err(Error::InvalidParameter("antenna counts must be at least 1".into()));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of MIMO spatial layers, `min(tx, rx)`.
    pub fn spatial_layers(&self) -> u32 {
        self.tx_antennas.min(self.rx_antennas)
    }

    pub fn prop_const_for(&self, env: Environment) -> f64 {
        match env {
            Environment::Outdoor => self.prop_const_db,
            Environment::Indoor => self.prop_const_indoor_db,
        }
    }

    /// Peak rate per unit spectral efficiency, `layers * W`.
    fn rate_scale(&self) -> f64 {
        f64::from(self.spatial_layers()) * self.prb_bandwidth_hz
    }
}

/// Piecewise-constant interference margin over concentric regions.
///
/// Region `i` covers `(breakpoints[i-1], breakpoints[i]]`, with the first
/// region starting at 0 and the last one ending at the cell edge.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceModel {
    breakpoints_km: Vec<f64>,
    margins_db: Vec<f64>,
}

impl InterferenceModel {
    pub fn new(breakpoints_km: Vec<f64>, margins_db: Vec<f64>) -> Result<Self> {
        if margins_db.len() != breakpoints_km.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "{} breakpoints need {} margins, got {}",
                breakpoints_km.len(),
                breakpoints_km.len() + 1,
                margins_db.len()
            )));
        }
        if margins_db.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
            return Err(Error::InvalidParameter("interference margins must be finite and >= 0 dB".into()));
        }
        if breakpoints_km.iter().any(|b| !(*b > 0.0) || !b.is_finite()) {
            return Err(Error::InvalidParameter("breakpoints must be positive".into()));
        }
        if breakpoints_km.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("breakpoints must be strictly increasing".into()));
        }
        Ok(Self { breakpoints_km, margins_db })
    }

    /// No interference: a single region with a 0 dB margin.
    pub fn noise_limited() -> Self {
        Self::uniform(0.0)
    }

    /// A single region with a constant margin.
    pub fn uniform(margin_db: f64) -> Self {
        Self {
            breakpoints_km: Vec::new(),
            margins_db: vec![margin_db],
        }
    }

    /// Center / middle / edge regions split at `R/3` and `2R/3`.
    pub fn three_region(cell_radius_km: f64, center_db: f64, middle_db: f64, edge_db: f64) -> Result<Self> {
        Self::new(
            vec![cell_radius_km / 3.0, 2.0 * cell_radius_km / 3.0],
            vec![center_db, middle_db, edge_db],
        )
    }

    pub fn breakpoints_km(&self) -> &[f64] {
        &self.breakpoints_km
    }

    pub fn margins_db(&self) -> &[f64] {
        &self.margins_db
    }

    pub fn region_count(&self) -> usize {
        self.margins_db.len()
    }

    /// Checks the breakpoints against a cell radius.
    pub fn validate_for(&self, cell_radius_km: f64) -> Result<()> {
        if let Some(last) = self.breakpoints_km.last() {
            if *last >= cell_radius_km {
                return Err(Error::InvalidParameter(format!(
                    "breakpoint {last} km is not inside the cell of radius {cell_radius_km} km"
                )));
            }
        }
        Ok(())
    }

    /// Index of the region containing distance `x` (half-open on the left).
    pub fn region_of(&self, x: f64) -> usize {
        self.breakpoints_km.partition_point(|b| *b < x)
    }

    pub fn margin_at(&self, x: f64) -> f64 {
        self.margins_db[self.region_of(x)]
    }

    /// Margin of the outermost region.
    pub fn edge_margin(&self) -> f64 {
        *self.margins_db.last().expect("at least one region")
    }

    /// The `(lo, hi]` extent of each region within a cell of radius `r`.
    pub fn regions(&self, cell_radius_km: f64) -> Vec<(f64, f64)> {
        let mut bounds = Vec::with_capacity(self.margins_db.len() + 1);
        bounds.push(0.0);
        bounds.extend(self.breakpoints_km.iter().copied());
        bounds.push(cell_radius_km);
        bounds.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

/// Single class of service.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Service {
    /// Required transmission rate, bit/s.
    pub rate_bps: f64,
}

impl Service {
    pub fn new(rate_bps: f64) -> Result<Self> {
        if !(rate_bps > 0.0) || !rate_bps.is_finite() {
            return Err(Error::InvalidParameter(format!("service rate must be positive, got {rate_bps}")));
        }
        Ok(Self { rate_bps })
    }
}

fn check_distance(lb: &LinkBudget, x: f64) -> Result<()> {
    if !(x > 0.0) || x > lb.cell_radius_km || x.is_nan() {
        return Err(Error::Domain(format!(
            "distance {x} km outside (0, {}]",
            lb.cell_radius_km
        )));
    }
    Ok(())
}

fn sinr_db_unchecked(lb: &LinkBudget, margin_db: f64, x: f64, env: Environment) -> f64 {
    lb.tx_power_dbm - lb.prop_const_for(env) - 10.0 * lb.path_loss_exp * x.log10() - lb.noise_power_dbm - margin_db
}

fn rate_from_sinr_db(lb: &LinkBudget, sinr_db: f64) -> f64 {
    let linear = 10f64.powf(sinr_db / 10.0);
    lb.rate_scale() * linear.ln_1p() / std::f64::consts::LN_2
}

/// Linear SINR of a user at distance `x` km.
pub fn sinr_at(lb: &LinkBudget, im: &InterferenceModel, x: f64, env: Environment) -> Result<f64> {
    check_distance(lb, x)?;
    Ok(10f64.powf(sinr_db_unchecked(lb, im.margin_at(x), x, env) / 10.0))
}

/// Shannon rate `layers * W * log2(1 + SINR)` in bit/s.
pub fn throughput_at(lb: &LinkBudget, im: &InterferenceModel, x: f64, env: Environment) -> Result<f64> {
    check_distance(lb, x)?;
    Ok(rate_from_sinr_db(lb, sinr_db_unchecked(lb, im.margin_at(x), x, env)))
}

/// `ceil(C* / C)`, saturating to `u32::MAX` for vanishing rates.
fn ceil_ratio(required: f64, rate: f64) -> u32 {
    let ratio = (required / rate).ceil();
    if ratio.is_finite() && ratio < f64::from(u32::MAX) {
        (ratio as u32).max(1)
    } else {
        u32::MAX
    }
}

/// Maximum number of PRBs per user, set by the rate at the cell edge under
/// the edge margin and capped by `n_max`.
pub fn max_prbs(lb: &LinkBudget, im: &InterferenceModel, svc: &Service, env: Environment) -> u32 {
    let r = lb.cell_radius_km;
    let edge_rate = rate_from_sinr_db(lb, sinr_db_unchecked(lb, im.edge_margin(), r, env));
    ceil_ratio(svc.rate_bps, edge_rate).min(lb.n_max)
}

/// PRBs needed by a user at distance `x`, capped at the cell maximum.
pub fn prbs_required(
    lb: &LinkBudget,
    im: &InterferenceModel,
    svc: &Service,
    x: f64,
    env: Environment,
) -> Result<u32> {
    let rate = throughput_at(lb, im, x, env)?;
    Ok(ceil_ratio(svc.rate_bps, rate).min(max_prbs(lb, im, svc, env)))
}

/// Distance at which the rate equals `C*/n` under a fixed margin, i.e. the
/// outer radius of the ring where users need `n` PRBs.
pub fn ring_radius(lb: &LinkBudget, margin_db: f64, svc: &Service, env: Environment, n: u32) -> f64 {
    if n == 0 {
        return 0.0;
    }
    // a * (I + sigma^2) / P in linear scale, at the 1 km reference.
    let loss_db = lb.prop_const_for(env) + margin_db + lb.noise_power_dbm - lb.tx_power_dbm;
    let sinr_needed = (std::f64::consts::LN_2 * svc.rate_bps / (f64::from(n) * lb.rate_scale())).exp_m1();
    let log10_base = loss_db / 10.0 + sinr_needed.log10();
    10f64.powf(-log10_base / lb.path_loss_exp)
}

/// The step function `n(x)` as lists of `(u, v]` intervals per PRB level.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandProfile {
    env: Environment,
    cell_radius_km: f64,
    max_level: u32,
    /// `(n, intervals)` sorted by `n`; only populated levels are kept.
    levels: Vec<(u32, Vec<(f64, f64)>)>,
}

impl DemandProfile {
    /// Builds a profile from raw level intervals. Empty intervals are dropped,
    /// and adjacent intervals of the same level are merged.
    pub fn from_levels(
        env: Environment,
        cell_radius_km: f64,
        max_level: u32,
        mut levels: Vec<(u32, Vec<(f64, f64)>)>,
    ) -> Self {
        levels.sort_by_key(|(n, _)| *n);
        let mut merged: Vec<(u32, Vec<(f64, f64)>)> = Vec::new();
        for (n, mut intervals) in levels {
            intervals.retain(|(u, v)| v > u);
            if intervals.is_empty() {
                continue;
            }
            match merged.last_mut() {
                Some((last, existing)) if *last == n => existing.extend(intervals),
                _ => merged.push((n, intervals)),
            }
        }
        for (_, intervals) in merged.iter_mut() {
            intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut out: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
            for &(u, v) in intervals.iter() {
                match out.last_mut() {
                    Some(last) if last.1 == u => last.1 = v,
                    _ => out.push((u, v)),
                }
            }
            *intervals = out;
        }
        Self {
            env,
            cell_radius_km,
            max_level,
            levels: merged,
        }
    }

    pub fn environment(&self) -> Environment {
        self.env
    }

    pub fn cell_radius_km(&self) -> f64 {
        self.cell_radius_km
    }

    /// `N`, the largest PRB count a user of this environment can be granted.
    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    /// Highest level that actually has a nonempty interval.
    pub fn top_populated_level(&self) -> u32 {
        self.levels.last().map_or(0, |(n, _)| *n)
    }

    pub fn levels(&self) -> &[(u32, Vec<(f64, f64)>)] {
        &self.levels
    }

    pub fn intervals(&self, n: u32) -> &[(f64, f64)] {
        self.levels
            .iter()
            .find(|(level, _)| *level == n)
            .map_or(&[][..], |(_, iv)| iv.as_slice())
    }

    /// Level `n(x)` for `x` in `(0, R]`; `None` outside the covered set.
    pub fn level_at(&self, x: f64) -> Option<u32> {
        self.levels
            .iter()
            .find(|(_, iv)| iv.iter().any(|&(u, v)| x > u && x <= v))
            .map(|(n, _)| *n)
    }

    /// All intervals sorted by left endpoint, tagged with their level.
    pub fn sorted_intervals(&self) -> Vec<(f64, f64, u32)> {
        let mut all: Vec<(f64, f64, u32)> = self
            .levels
            .iter()
            .flat_map(|(n, iv)| iv.iter().map(move |&(u, v)| (u, v, *n)))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        all
    }

    /// Keeps only the part of the profile inside the annulus `(lo, hi]`.
    /// Used to isolate the demand of one interference region.
    pub fn restricted(&self, lo: f64, hi: f64) -> Self {
        let levels = self
            .levels
            .iter()
            .map(|(n, iv)| {
                let clipped = iv
                    .iter()
                    .map(|&(u, v)| (u.max(lo), v.min(hi)))
                    .filter(|(u, v)| v > u)
                    .collect();
                (*n, clipped)
            })
            .collect();
        Self::from_levels(self.env, self.cell_radius_km, self.max_level, levels)
    }
}

/// Level sets of `n(x)` over the cell. With a single interference region the
/// rings are `(d_{n-1}, d_n]`; with several regions the rings are computed
/// inside each region with its own margin and merged per level.
pub fn ring_radii(lb: &LinkBudget, im: &InterferenceModel, svc: &Service, env: Environment) -> DemandProfile {
    let r = lb.cell_radius_km;
    let cap = max_prbs(lb, im, svc, env);
    let mut levels: Vec<(u32, Vec<(f64, f64)>)> = Vec::new();
    for ((lo, hi), &margin) in im.regions(r).into_iter().zip(im.margins_db()) {
        let mut n_lo = if lo > 0.0 {
            let rate = rate_from_sinr_db(lb, sinr_db_unchecked(lb, margin, lo, env));
            // Level just outside `lo`: level of lo itself, since the ring boundary
            // sits at lo only if lo is exactly some d_n.
            ceil_ratio(svc.rate_bps, rate).min(cap)
        } else {
            1
        };
        // Walk outward through the closed-form ring radii.
        let mut start = lo;
        loop {
            let d_n = ring_radius(lb, margin, svc, env, n_lo);
            if n_lo >= cap || d_n >= hi {
                levels.push((n_lo, vec![(start, hi)]));
                break;
            }
            if d_n > start {
                levels.push((n_lo, vec![(start, d_n)]));
                start = d_n;
            }
            n_lo += 1;
        }
    }
    DemandProfile::from_levels(env, r, cap, levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn budget() -> LinkBudget {
        LinkBudget {
            tx_power_dbm: 60.0,
            noise_power_dbm: -93.0,
            prop_const_db: 130.0,
            prop_const_indoor_db: 166.0,
            path_loss_exp: 3.5,
            tx_antennas: 8,
            rx_antennas: 2,
            prb_bandwidth_hz: 180e3,
            cell_radius_km: 0.7,
            n_max: 100,
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn sinr_reference_distance() {
        let lb = LinkBudget { cell_radius_km: 1.0, ..budget() };
        let im = InterferenceModel::noise_limited();
        let s = sinr_at(&lb, &im, 1.0, Environment::Outdoor).unwrap();
        assert!(rel(s, 199.526_231_496_887_88) < 1e-12);
        let s = sinr_at(&lb, &im, 1.0, Environment::Indoor).unwrap();
        assert!(rel(s, 0.050_118_723_362_727_22) < 1e-12);
    }

    #[test]
    fn sinr_and_rate_at_cell_edge() {
        let lb = budget();
        let im = InterferenceModel::noise_limited();
        let s = sinr_at(&lb, &im, 0.7, Environment::Outdoor).unwrap();
        assert!(rel(10.0 * s.log10(), 28.421_568_599_501_01) < 1e-12);
        assert!(rel(s, 695.275_394_162_558_85) < 1e-11);
        let c = throughput_at(&lb, &im, 0.7, Environment::Outdoor).unwrap();
        assert!(rel(c, 3_399_665.122_924_156) < 1e-11);
    }

    #[test]
    fn rate_of_unit_and_three_sinr() {
        // SINR of exactly 1 and 3 through the dB path.
        let lb = LinkBudget {
            tx_power_dbm: 0.0,
            noise_power_dbm: 0.0,
            prop_const_db: 0.0,
            cell_radius_km: 1.0,
            ..budget()
        };
        let im = InterferenceModel::noise_limited();
        let c = throughput_at(&lb, &im, 1.0, Environment::Outdoor).unwrap();
        assert!(rel(c, 360_000.0) < 1e-12);
        let lb3 = LinkBudget { tx_power_dbm: 10.0 * 3f64.log10(), ..lb };
        let c = throughput_at(&lb3, &im, 1.0, Environment::Outdoor).unwrap();
        assert!(rel(c, 720_000.0) < 1e-12);
    }

    #[test]
    fn distance_domain() {
        let lb = budget();
        let im = InterferenceModel::noise_limited();
        assert!(matches!(sinr_at(&lb, &im, 0.0, Environment::Outdoor), Err(Error::Domain(_))));
        assert!(matches!(sinr_at(&lb, &im, 0.71, Environment::Outdoor), Err(Error::Domain(_))));
        assert!(matches!(throughput_at(&lb, &im, -1.0, Environment::Indoor), Err(Error::Domain(_))));
    }

    #[test]
    fn ceiling_of_rate_ratio() {
        assert_eq!(ceil_ratio(500e3, 3.4e6), 1);
        assert_eq!(ceil_ratio(500e3, 500e3), 1);
        assert_eq!(ceil_ratio(500e3, 120e3), 5);
        assert_eq!(ceil_ratio(500e3, 0.0), u32::MAX);
    }

    #[test]
    fn noise_limited_outdoor_is_single_level() {
        let lb = budget();
        let svc = Service::new(500e3).unwrap();
        let p = ring_radii(&lb, &InterferenceModel::noise_limited(), &svc, Environment::Outdoor);
        assert_eq!(p.max_level(), 1);
        assert_eq!(p.levels(), &[(1, vec![(0.0, 0.7)])]);
    }

    #[test]
    fn unit_parameter_ring_radius() {
        // a(I+s^2)/P = 1, C*/(layers W) = 1, 2b = 2.
        let lb = LinkBudget {
            tx_power_dbm: 0.0,
            noise_power_dbm: 0.0,
            prop_const_db: 0.0,
            path_loss_exp: 2.0,
            tx_antennas: 1,
            rx_antennas: 1,
            prb_bandwidth_hz: 1.0,
            ..budget()
        };
        let svc = Service { rate_bps: 1.0 };
        let d1 = ring_radius(&lb, 0.0, &svc, Environment::Outdoor, 1);
        assert!((d1 - 1.0).abs() < 1e-15);
        assert_eq!(ring_radius(&lb, 0.0, &svc, Environment::Outdoor, 0), 0.0);
    }

    #[test]
    fn indoor_edge_margin_rings() {
        // Closed-form radii under a uniform 15 dB margin, evaluated at 30 digits.
        let expected = [
            0.138_112_466_173_840_99,
            0.181_829_839_337_011_85,
            0.209_216_198_427_975_96,
            0.229_880_458_689_683_22,
            0.246_765_685_116_322_27,
            0.261_190_546_593_188_78,
            0.273_868_767_762_471_32,
            0.285_233_888_896_877_73,
            0.295_570_711_973_809_33,
            0.305_077_269_501_643_6,
            0.313_897_336_500_362_1,
        ];
        let lb = budget();
        let svc = Service::new(500e3).unwrap();
        for (i, want) in expected.iter().enumerate() {
            let d = ring_radius(&lb, 15.0, &svc, Environment::Indoor, i as u32 + 1);
            assert!(rel(d, *want) < 1e-12, "d_{} = {d}, want {want}", i + 1);
        }
        let p = ring_radii(&lb, &InterferenceModel::uniform(15.0), &svc, Environment::Indoor);
        assert_eq!(p.max_level(), 100);
        let first = p.sorted_intervals();
        assert_eq!(first[0].2, 1);
        assert!(rel(first[0].1, expected[0]) < 1e-12);
    }

    #[test]
    fn ring_radius_reproduces_required_rate() {
        let lb = budget();
        let svc = Service::new(500e3).unwrap();
        let im = InterferenceModel::uniform(15.0);
        for n in 1..40 {
            let d = ring_radius(&lb, 15.0, &svc, Environment::Indoor, n);
            if d > lb.cell_radius_km {
                break;
            }
            let c = throughput_at(&lb, &im, d, Environment::Indoor).unwrap();
            assert!(rel(svc.rate_bps / c, f64::from(n)) < 1e-9);
        }
    }

    #[test]
    fn three_region_profile() {
        let lb = budget();
        let svc = Service::new(500e3).unwrap();
        let im = InterferenceModel::three_region(0.7, 1.0, 8.0, 15.0).unwrap();
        let p = ring_radii(&lb, &im, &svc, Environment::Indoor);
        assert_eq!(p.max_level(), max_prbs(&lb, &im, &svc, Environment::Indoor));
        for x in [0.01, 0.2, 0.233, 0.234, 0.3, 0.466, 0.467, 0.5, 0.69, 0.7] {
            assert_eq!(
                p.level_at(x),
                Some(prbs_required(&lb, &im, &svc, x, Environment::Indoor).unwrap()),
                "x = {x}"
            );
        }
    }

    #[test]
    fn interference_model_validation() {
        assert!(InterferenceModel::new(vec![0.3], vec![1.0]).is_err());
        assert!(InterferenceModel::new(vec![0.3, 0.2], vec![1.0, 2.0, 3.0]).is_err());
        assert!(InterferenceModel::new(vec![0.3], vec![-1.0, 2.0]).is_err());
        let im = InterferenceModel::three_region(0.7, 1.0, 8.0, 15.0).unwrap();
        assert!(im.validate_for(0.7).is_ok());
        assert!(im.validate_for(0.4).is_err());
        assert_eq!(im.region_of(0.7 / 3.0), 0);
        assert_eq!(im.region_of(0.7 / 3.0 + 1e-12), 1);
        assert_eq!(im.edge_margin(), 15.0);
    }

    #[test]
    fn budget_validation() {
        assert!(budget().validate().is_ok());
        assert!(LinkBudget { path_loss_exp: 2.0, ..budget() }.validate().is_err());
        assert!(LinkBudget { cell_radius_km: 0.0, ..budget() }.validate().is_err());
        assert!(LinkBudget { tx_antennas: 0, ..budget() }.validate().is_err());
        assert!(LinkBudget { tx_power_dbm: f64::NAN, ..budget() }.validate().is_err());
        assert!(Service::new(0.0).is_err());
    }

    #[test]
    fn restricted_profile_clips() {
        let lb = budget();
        let svc = Service::new(500e3).unwrap();
        let im = InterferenceModel::three_region(0.7, 1.0, 8.0, 15.0).unwrap();
        let p = ring_radii(&lb, &im, &svc, Environment::Indoor);
        let edge = p.restricted(0.7 * 2.0 / 3.0, 0.7);
        let total: f64 = edge.sorted_intervals().iter().map(|(u, v, _)| v - u).sum();
        assert!((total - 0.7 / 3.0).abs() < 1e-12);
        assert_eq!(edge.level_at(0.1), None);
    }
}
