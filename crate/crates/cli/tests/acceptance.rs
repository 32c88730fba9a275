//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::Rng;

use prbdim_core::compound::{
    bell_complete, bell_complete_exact, bell_determinant, bell_determinant_exact, bell_sequence_exact, ccdf_curve,
    ccdf_integral_curve, pmf, CompoundSpec,
};
use prbdim_core::dimension::{dimension_prbs, DimensionQuery};
use prbdim_core::rng::stream_rng;
use prbdim_core::simulate::simulate;
use prbdim_core::{
    bundled, CongestionCurve, Environment, InterferenceModel, OutdoorModel, Region, Scenario, Traffic,
};

const TARGET: f64 = 0.05;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn random_spec<R: Rng>(rng: &mut R, max_levels: usize) -> CompoundSpec {
    let n = rng.random_range(1..=max_levels);
    CompoundSpec::new((0..n).map(|_| rng.random_range(0.0..=2.0)).collect()).unwrap()
}

fn required(s: &Scenario) -> usize {
    dimension_prbs(&DimensionQuery::new(s.clone(), TARGET)).unwrap().required_m
}

fn fixture(name: &str) -> Scenario {
    bundled::scenario(name).unwrap()
}

fn route_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = stream_rng(101, 0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let spec = random_spec(&mut rng, 20);
        let bell = ccdf_curve(&spec, 150);
        let integral = ccdf_integral_curve(&spec, 150).unwrap();
        for (a, b) in bell.iter().zip(&integral) {
            worst = worst.max((a - b).abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-6 && elapsed < Duration::from_secs(30),
        format!("max |bell - integral| = {worst:.3e} (<= 1e-6), {:.2} s (< 30 s)", elapsed.as_secs_f64()),
    )
}

/// `P(Σ n V_n = k)` for `k ≤ k_max`, summing over every occupancy vector.
fn enumerated_pmf(w: &[f64], k_max: usize) -> Vec<f64> {
    fn walk(w: &[f64], level: usize, used: usize, prob: f64, k_max: usize, out: &mut [f64]) {
        if level > w.len() {
            out[used] += prob;
            return;
        }
        let lambda = w[level - 1];
        let mut p = (-lambda).exp();
        let mut v = 0;
        while used + v * level <= k_max {
            walk(w, level + 1, used + v * level, prob * p, k_max, out);
            v += 1;
            p *= lambda / v as f64;
        }
    }
    let mut out = vec![0.0; k_max + 1];
    walk(w, 1, 0, 1.0, k_max, &mut out);
    out
}

fn convolved_pmf(w: &[f64], k_max: usize) -> Vec<f64> {
    let mut acc = vec![0.0; k_max + 1];
    acc[0] = 1.0;
    for (i, &lambda) in w.iter().enumerate() {
        let level = i + 1;
        let mut next = vec![0.0; k_max + 1];
        let mut p = (-lambda).exp();
        let mut v = 0;
        while v * level <= k_max {
            for a in 0..=k_max - v * level {
                next[a + v * level] += acc[a] * p;
            }
            v += 1;
            p *= lambda / v as f64;
        }
        acc = next;
    }
    acc
}

fn oracle_equivalence() -> Outcome {
    let mut rng = stream_rng(102, 0);
    let mut worst = 0.0f64;
    for _ in 0..60 {
        let spec = random_spec(&mut rng, 5);
        let k_max = rng.random_range(0..=50);
        let table = pmf(&spec, k_max);
        let enumerated = enumerated_pmf(spec.weights(), k_max);
        let convolved = convolved_pmf(spec.weights(), k_max);
        for k in 0..=k_max {
            worst = worst.max((table.get(k) - enumerated[k]).abs());
            worst = worst.max((table.get(k) - convolved[k]).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max |pmf - brute force| = {worst:.3e} (<= 1e-10)"))
}

fn int_vec<R: Rng>(rng: &mut R, len: usize, bound: i64) -> Vec<BigInt> {
    (0..len).map(|_| BigInt::from(rng.random_range(-bound..=bound))).collect()
}

fn bell_identities() -> Outcome {
    let mut rng = stream_rng(103, 0);
    let mut failures = Vec::new();

    for _ in 0..200 {
        let p = rng.random_range(0..=10);
        let x = int_vec(&mut rng, p, 9);
        if bell_complete_exact(&x) != bell_determinant_exact(&x) {
            failures.push(format!("recurrence != determinant for {x:?}"));
        }
    }
    // On small integers the floating recurrence is exact; the determinant
    // divides during elimination and is held to rounding error.
    for _ in 0..200 {
        let p = rng.random_range(0..=6);
        let x: Vec<f64> = (0..p).map(|_| f64::from(rng.random_range(-3i32..=3))).collect();
        let exact = bell_complete_exact(&x.iter().map(|v| BigInt::from(*v as i64)).collect::<Vec<_>>());
        let want: f64 = exact.to_string().parse().unwrap();
        let det = bell_determinant(&x).unwrap();
        if bell_complete(&x).unwrap() != want || (det - want).abs() > 1e-12 * want.abs().max(1.0) {
            failures.push(format!("floating Bell mismatch for {x:?}"));
        }
    }
    for _ in 0..200 {
        let p = rng.random_range(0..=8usize);
        let (x, y) = (int_vec(&mut rng, p, 6), int_vec(&mut rng, p, 6));
        let sum: Vec<BigInt> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let (bx, by) = (bell_sequence_exact(&x), bell_sequence_exact(&y));
        let mut rhs = BigInt::from(0);
        let mut binom = BigInt::from(1);
        for i in 0..=p {
            rhs += &binom * &bx[p - i] * &by[i];
            binom = binom * BigInt::from(p - i) / BigInt::from(i + 1);
        }
        if bell_complete_exact(&sum) != rhs {
            failures.push(format!("binomial-type relation fails for {x:?}, {y:?}"));
        }
    }
    for _ in 0..200 {
        let x = int_vec(&mut rng, 4, 20);
        let (x1, x2, x3, x4) = (&x[0], &x[1], &x[2], &x[3]);
        let listed = [
            BigInt::from(1),
            x1.clone(),
            x1 * x1 + x2,
            x1 * x1 * x1 + 3 * x1 * x2 + x3,
            x1 * x1 * x1 * x1 + 6 * x1 * x1 * x2 + 4 * x1 * x3 + 3 * x2 * x2 + x4,
        ];
        if bell_sequence_exact(&x) != listed {
            failures.push(format!("B_0..B_4 differ for {x:?}"));
        }
    }
    outcome(
        failures.is_empty(),
        match failures.first() {
            None => "recurrence = determinant (p <= 10), binomial type (p <= 8), B_0..B_4: all exact".into(),
            Some(f) => format!("{} failures, first: {f}", failures.len()),
        },
    )
}

fn mean_load() -> Outcome {
    let start = Instant::now();
    let model = fixture("fig4").prepare().unwrap();
    let summary = simulate(&model, 100_000);
    let (want, got) = (model.expected_load(), summary.mean_gamma());
    let rel = (got - want).abs() / want;
    let elapsed = start.elapsed();
    outcome(
        rel <= 0.01 && elapsed < Duration::from_secs(120),
        format!(
            "E(Γ) = {want:.3}, simulated {got:.3}, relative error {rel:.2e} (<= 1e-2), {:.2} s (< 120 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn analytic_vs_simulated() -> Outcome {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut passed = true;
    for name in ["fig2_tau14", "fig2_tau30"] {
        let mut s = fixture(name);
        s.mc_realizations = 10_000;
        let model = s.prepare().unwrap();
        let analytic = model.averaged_congestion(400).pi;
        let empirical = simulate(&model, 10_000).empirical_ccdf(400).p_hat;
        let worst = analytic.iter().zip(&empirical).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        passed &= worst <= 0.02;
        details.push(format!("{name}: {worst:.4}"));
    }
    let elapsed = start.elapsed();
    outcome(
        passed && elapsed < Duration::from_secs(300),
        format!("max |Π - Π_mc| {} (<= 0.02), {:.2} s (< 300 s)", details.join(", "), elapsed.as_secs_f64()),
    )
}

fn road_intensity_delta() -> Outcome {
    let sparse = fixture("fig3");
    let dense = Scenario {
        road_intensity: 10.0,
        ..sparse.clone()
    };
    let (a, b) = (required(&sparse), required(&dense));
    let delta = a as i64 - b as i64;
    outcome(
        (20..=45).contains(&delta),
        format!("M(λ=2) = {a}, M(λ=10) = {b}, difference {delta} (in [20, 45])"),
    )
}

fn interference_delta(name: &str, lo: i64, hi: i64) -> Outcome {
    let with_im = fixture(name);
    let noise = Scenario {
        interference: InterferenceModel::noise_limited(),
        ..with_im.clone()
    };
    let (a, b) = (required(&with_im), required(&noise));
    let delta = a as i64 - b as i64;
    outcome(
        (lo..=hi).contains(&delta),
        format!("M(1/8/15 dB) = {a}, M(noise-limited) = {b}, difference {delta} (in [{lo}, {hi}])"),
    )
}

/// `hi ≥ lo` pointwise up to 3 combined standard errors, and strictly above
/// that band somewhere.
fn dominates(hi: &CongestionCurve, lo: &CongestionCurve) -> (bool, usize) {
    let mut violated = false;
    let mut separated = 0;
    for m in 0..hi.pi.len().min(lo.pi.len()) {
        let band = 3.0 * (hi.stderr[m].powi(2) + lo.stderr[m].powi(2)).sqrt();
        let gap = hi.pi[m] - lo.pi[m];
        violated |= gap < -band - 1e-12;
        separated += usize::from(gap > band + 1e-12);
    }
    (!violated, separated)
}

fn orderings() -> Outcome {
    let m_max = 600;
    let curve = |s: &Scenario| s.prepare().unwrap().averaged_congestion(m_max);
    let mut details = Vec::new();
    let mut passed = true;

    let cox = fixture("fig4");
    let ppp = Scenario {
        outdoor_model: OutdoorModel::Ppp,
        ..cox.clone()
    };
    let g = cox.geometry().unwrap();
    let indoor = Scenario {
        traffic: Traffic::Intensities {
            linear: 0.0,
            area: g.road_intensity * g.user_intensity_linear,
        },
        ..cox.clone()
    };
    let (c_cox, c_ppp, c_in) = (curve(&cox), curve(&ppp), curve(&indoor));
    for (label, hi, lo) in [("cox>=ppp", &c_cox, &c_ppp), ("indoor>=outdoor", &c_in, &c_ppp)] {
        let (ok, separated) = dominates(hi, lo);
        passed &= ok && separated > 0;
        details.push(format!("{label}: {} ({separated} M separated)", if ok { "ok" } else { "violated" }));
    }

    let base = fixture("fig8_regions");
    let mut region_ok = true;
    let mut separated = 0;
    for tau in [14e6, 20e6, 26e6, 30e6] {
        let at = |region| Scenario {
            region,
            ..base.with_throughput(tau, 0.5)
        };
        let (center, middle, edge) = (at(Region::Center), at(Region::Middle), at(Region::Edge));
        let (mc, mm, me) = (required(&center), required(&middle), required(&edge));
        region_ok &= me >= mm && mm >= mc;
        for (hi, lo) in [(&edge, &middle), (&middle, &center)] {
            let (ok, s) = dominates(&curve(hi), &curve(lo));
            region_ok &= ok;
            separated += s;
        }
        details.push(format!("τ={}: M center/middle/edge = {mc}/{mm}/{me}", tau / 1e6));
    }
    passed &= region_ok && separated > 0;
    outcome(passed, details.join("; "))
}

fn structural_invariants() -> Outcome {
    let mut failures: Vec<String> = Vec::new();

    // Profiles partition (0, R] without gaps or overlaps.
    for name in ["fig2_tau30", "fig7"] {
        let model = fixture(name).prepare().unwrap();
        for env in [Environment::Outdoor, Environment::Indoor] {
            let iv = model.profile(env).sorted_intervals();
            let contiguous = iv.windows(2).all(|w| w[0].1 == w[1].0);
            if iv[0].0 != 0.0 || iv.last().unwrap().1 != 0.7 || !contiguous {
                failures.push(format!("{name} {env:?} profile is not a partition"));
            }
        }
    }

    // Curves are nonincreasing and start at one.
    let model = fixture("fig7").prepare().unwrap();
    let curve = model.averaged_congestion(400);
    if curve.pi[0] != 1.0 || curve.pi.windows(2).any(|w| w[1] > w[0]) {
        failures.push("averaged curve is not a nonincreasing CCDF".into());
    }

    // Larger δ, κ or margins never lower Π on shared roads.
    let base = fixture("fig4");
    let bumps = [
        Scenario {
            traffic: Traffic::Intensities { linear: 7.0, area: 0.0 },
            ..base.clone()
        },
        Scenario {
            traffic: Traffic::Intensities { linear: 6.0, area: 5.0 },
            ..base.clone()
        },
        Scenario {
            interference: InterferenceModel::three_region(0.7, 1.0, 8.0, 15.0).unwrap(),
            ..base.clone()
        },
    ];
    let low = base.prepare().unwrap().averaged_congestion(400).pi;
    for (i, s) in bumps.iter().enumerate() {
        let high = s.prepare().unwrap().averaged_congestion(400).pi;
        if low.iter().zip(&high).any(|(l, h)| h + 1e-12 < *l) {
            failures.push(format!("monotonicity fails for perturbation {i}"));
        }
    }

    // Same curve on any number of worker threads.
    let model = fixture("fig2_tau30").prepare().unwrap();
    let on = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| model.averaged_congestion(300))
    };
    if on(1) != on(4) {
        failures.push("averaged curve depends on the thread count".into());
    }

    // CLI output is byte-identical across runs and thread counts.
    let scenario = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/scenarios/fig6_mixed.scenario");
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_prbdim"))
            .args(["congestion", "--scenario", scenario.to_str().unwrap(), "--m-max", "350"])
            .args(["--realizations", "1000", "--with-mc", "--replications", "1000"])
            .env("PRBDIM_THREADS", threads)
            .output()
            .unwrap()
    };
    let (a, b, c) = (run("1"), run("3"), run("1"));
    if !a.status.success() || a.stdout != b.stdout || a.stdout != c.stdout {
        failures.push("CLI output is not byte-identical".into());
    }

    outcome(
        failures.is_empty(),
        match failures.first() {
            None => "partition, CCDF shape, δ/κ/margin monotonicity, thread and CLI determinism".into(),
            Some(f) => format!("{} failures, first: {f}", failures.len()),
        },
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 route equivalence", route_equivalence),
        ("2 pmf vs brute force", oracle_equivalence),
        ("3 Bell identities", bell_identities),
        ("4 mean load vs simulation", mean_load),
        ("5 analytic vs simulated Π", analytic_vs_simulated),
        ("6 road intensity delta", road_intensity_delta),
        ("7 interference delta, τ=30", || interference_delta("fig6_mixed", 55, 105)),
        ("8 interference delta, τ=26", || interference_delta("fig7", 35, 70)),
        ("9 orderings", orderings),
        ("10 structural invariants", structural_invariants),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let result = check();
        failed += usize::from(!result.passed);
        println!("{} {name}: {}", if result.passed { "PASS" } else { "FAIL" }, result.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
