//! Self-check suites run by `prbdim validate`.

use num_bigint::BigInt;
use rand::Rng;

use prbdim_core::compound::{
    bell_complete, bell_complete_exact, bell_determinant_exact, bell_sequence_exact, ccdf_curve,
    ccdf_integral_curve, pmf, CompoundSpec,
};
use prbdim_core::dimension::{dimension_prbs, DimensionQuery};
use prbdim_core::rng::stream_rng;
use prbdim_core::simulate::simulate;
use prbdim_core::{bundled, InterferenceModel, OutdoorModel, Region, Result, Scenario, Traffic};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    /// Observed discrepancy or statistic.
    pub value: f64,
    pub tolerance: String,
    pub passed: bool,
}

impl Check {
    fn within(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance: format!("<= {tolerance:e}"),
            passed: value <= tolerance,
        }
    }

    fn range(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance: format!("in [{lo}, {hi}]"),
            passed: (lo..=hi).contains(&value),
        }
    }
}

fn random_spec<R: Rng>(rng: &mut R, max_levels: usize, max_weight: f64) -> CompoundSpec {
    let n = rng.random_range(1..=max_levels);
    CompoundSpec::new((0..n).map(|_| rng.random_range(0.0..max_weight)).collect()).expect("valid weights")
}

/// PMF of `Σ n V_n` by direct convolution of truncated Poisson PMFs.
fn convolution_pmf(spec: &CompoundSpec, k_max: usize) -> Vec<f64> {
    let mut acc = vec![0.0; k_max + 1];
    acc[0] = 1.0;
    for (i, &w) in spec.weights().iter().enumerate() {
        let level = i + 1;
        let mut term = vec![0.0; k_max + 1];
        let mut p = (-w).exp();
        let mut v = 0;
        while v * level <= k_max {
            term[v * level] = p;
            v += 1;
            p *= w / v as f64;
        }
        let mut next = vec![0.0; k_max + 1];
        for a in 0..=k_max {
            if acc[a] == 0.0 {
                continue;
            }
            for b in 0..=k_max - a {
                next[a + b] += acc[a] * term[b];
            }
        }
        acc = next;
    }
    acc
}

pub fn identities(seed: u64) -> Result<Vec<Check>> {
    let mut rng = stream_rng(seed, 0);
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for _ in 0..20 {
        let spec = random_spec(&mut rng, 20, 2.0);
        let bell = ccdf_curve(&spec, 150);
        let fourier = ccdf_integral_curve(&spec, 150)?;
        for (a, b) in bell.iter().zip(&fourier) {
            worst = worst.max((a - b).abs());
        }
    }
    checks.push(Check::within("fourier_vs_bell_ccdf", worst, 1e-6));

    let mut worst = 0.0f64;
    for _ in 0..20 {
        let spec = random_spec(&mut rng, 5, 2.0);
        let table = pmf(&spec, 50);
        for (a, b) in table.probabilities().iter().zip(convolution_pmf(&spec, 50)) {
            worst = worst.max((a - b).abs());
        }
    }
    checks.push(Check::within("pmf_vs_convolution", worst, 1e-10));

    let mut mismatches = 0.0;
    for _ in 0..20 {
        let p = rng.random_range(0..=10);
        let x: Vec<BigInt> = (0..p).map(|_| BigInt::from(rng.random_range(-5i64..=5))).collect();
        if bell_complete_exact(&x) != bell_determinant_exact(&x) {
            mismatches += 1.0;
        }
    }
    checks.push(Check::within("bell_recurrence_vs_determinant", mismatches, 0.0));

    let mut mismatches = 0.0;
    for _ in 0..20 {
        let p = rng.random_range(0..=8usize);
        let x: Vec<BigInt> = (0..p).map(|_| BigInt::from(rng.random_range(-4i64..=4))).collect();
        let y: Vec<BigInt> = (0..p).map(|_| BigInt::from(rng.random_range(-4i64..=4))).collect();
        let sum: Vec<BigInt> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let bx = bell_sequence_exact(&x);
        let by = bell_sequence_exact(&y);
        let mut rhs = BigInt::from(0);
        let mut binom = BigInt::from(1);
        for i in 0..=p {
            rhs += &binom * &bx[p - i] * &by[i];
            binom = binom * BigInt::from(p - i) / BigInt::from(i + 1);
        }
        if bell_complete_exact(&sum) != rhs {
            mismatches += 1.0;
        }
    }
    checks.push(Check::within("bell_binomial_type", mismatches, 0.0));

    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x: Vec<f64> = (0..4).map(|_| f64::from(rng.random_range(-6i32..=6))).collect();
        let listed = [
            1.0,
            x[0],
            x[0] * x[0] + x[1],
            x[0].powi(3) + 3.0 * x[0] * x[1] + x[2],
            x[0].powi(4) + 6.0 * x[0] * x[0] * x[1] + 4.0 * x[0] * x[2] + 3.0 * x[1] * x[1] + x[3],
        ];
        for (k, want) in listed.iter().enumerate() {
            worst = worst.max((bell_complete(&x[..k])? - want).abs());
        }
    }
    checks.push(Check::within("listed_bell_polynomials", worst, 0.0));
    Ok(checks)
}

pub fn monte_carlo(seed: u64, replications: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let nf = replications as f64;

    // Indoor-only: the analytic curve is exact, so the empirical CCDF must
    // stay inside the DKW band at false-alarm level 1e-3.
    let mut indoor = bundled::scenario("fig2_tau30")?.with_throughput(30e6, 0.0);
    indoor.seed = seed;
    let model = indoor.prepare()?;
    let m_max = 400;
    let analytic = model.averaged_congestion(m_max).pi;
    let empirical = simulate(&model, replications).empirical_ccdf(m_max).p_hat;
    let sup = analytic
        .iter()
        .zip(&empirical)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    checks.push(Check::within("indoor_ccdf_dkw", sup, (2000f64.ln() / (2.0 * nf)).sqrt()));

    // Mean load: closed form vs simulation, within 4 standard errors.
    let mut outdoor = bundled::scenario("fig4")?;
    outdoor.seed = seed;
    let model = outdoor.prepare()?;
    let summary = simulate(&model, replications);
    let se = (summary.variance_gamma() / nf).sqrt();
    let z = (summary.mean_gamma() - model.expected_load()).abs() / se;
    checks.push(Check::within("mean_load_sigma", z, 4.0));

    // Road-averaged analytic curve vs end-to-end simulation.
    for name in ["fig2_tau14", "fig2_tau30"] {
        let mut s = bundled::scenario(name)?;
        s.seed = seed;
        s.mc_realizations = replications;
        let model = s.prepare()?;
        let analytic = model.averaged_congestion(m_max).pi;
        let empirical = simulate(&model, replications).empirical_ccdf(m_max).p_hat;
        let worst = analytic
            .iter()
            .zip(&empirical)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let tol = 0.02f64.max(4.0 * (0.25 / nf).sqrt());
        checks.push(Check::within(&format!("{name}_analytic_vs_mc"), worst, tol));
    }
    Ok(checks)
}

fn required(s: Scenario, target: f64) -> Result<f64> {
    Ok(dimension_prbs(&DimensionQuery::new(s, target))?.required_m as f64)
}

pub fn figures(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let reseed = |mut s: Scenario| {
        s.seed = seed;
        s
    };

    let sparse = reseed(bundled::scenario("fig3")?);
    let dense = Scenario {
        road_intensity: 10.0,
        ..sparse.clone()
    };
    let delta = required(sparse, 0.05)? - required(dense, 0.05)?;
    checks.push(Check::range("outdoor_lambda2_minus_lambda10", delta, 20.0, 45.0));

    for (name, lo, hi) in [("fig6_mixed", 55.0, 105.0), ("fig7", 35.0, 70.0)] {
        let with_im = reseed(bundled::scenario(name)?);
        let noise = Scenario {
            interference: InterferenceModel::noise_limited(),
            ..with_im.clone()
        };
        let delta = required(with_im, 0.05)? - required(noise, 0.05)?;
        checks.push(Check::range(&format!("{name}_interference_gap"), delta, lo, hi));
    }

    let cox = reseed(bundled::scenario("fig4")?);
    let ppp = Scenario {
        outdoor_model: OutdoorModel::Ppp,
        ..cox.clone()
    };
    let gap = required(cox, 0.05)? - required(ppp, 0.05)?;
    checks.push(Check::range("cox_minus_ppp", gap, 0.0, f64::INFINITY));

    let base = reseed(bundled::scenario("fig4")?);
    let g = base.geometry()?;
    let indoor = Scenario {
        traffic: Traffic::Intensities {
            linear: 0.0,
            area: g.road_intensity * g.user_intensity_linear,
        },
        ..base.clone()
    };
    let gap = required(indoor, 0.05)? - required(Scenario { outdoor_model: OutdoorModel::Ppp, ..base }, 0.05)?;
    checks.push(Check::range("indoor_minus_outdoor_ppp", gap, 0.0, f64::INFINITY));

    let regions = reseed(bundled::scenario("fig8_regions")?);
    let per_region: Vec<f64> = [Region::Center, Region::Middle, Region::Edge]
        .into_iter()
        .map(|region| required(Scenario { region, ..regions.clone() }, 0.05))
        .collect::<Result<_>>()?;
    checks.push(Check::range("edge_minus_middle", per_region[2] - per_region[1], 0.0, f64::INFINITY));
    checks.push(Check::range("middle_minus_center", per_region[1] - per_region[0], 0.0, f64::INFINITY));
    Ok(checks)
}
