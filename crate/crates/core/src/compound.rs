//! Distribution of `Λ = Σ n·V_n` with independent `V_n ~ Poisson(w_n)`.
//!
//! Production probabilities come from the weighted-convolution recursion
//! `k·p_k = Σ_j j·w_j·p_{k-j}`, which yields the same coefficients as the
//! complete Bell polynomial form `p_k = H·B_k(x_1..x_k)/k!` with
//! `x_j = w_j·j!` while staying inside `[0, 1]`. The Bell evaluators and the
//! Fourier-integral route are kept as independent cross-checks.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Poisson intensities `w_1..w_N` of the per-level counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CompoundSpec {
    weights: Vec<f64>,
}

impl CompoundSpec {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("compound spec needs at least one level".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter(format!("level intensity must be finite and >= 0, got {w}")));
        }
        Ok(Self { weights })
    }

    /// `w_n` for `n = 1..=N`, stored at index `n - 1`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn levels(&self) -> usize {
        self.weights.len()
    }

    pub fn total_intensity(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `H = exp(-Σ w_n)`, the probability that `Λ = 0`.
    pub fn zero_probability(&self) -> f64 {
        (-self.total_intensity()).exp()
    }

    /// Bell-polynomial arguments `x_j = w_j·j!`.
    pub fn bell_arguments(&self) -> Vec<f64> {
        let mut fact = 1.0;
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| {
                fact *= (i + 1) as f64;
                w * fact
            })
            .collect()
    }

    /// `E(Λ) = Σ n·w_n`.
    pub fn mean(&self) -> f64 {
        self.weights.iter().enumerate().map(|(i, w)| (i + 1) as f64 * w).sum()
    }

    /// `Var(Λ) = Σ n²·w_n`.
    pub fn variance(&self) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| ((i + 1) * (i + 1)) as f64 * w)
            .sum()
    }

    /// Superposition of two independent compound sums over aligned levels.
    pub fn superpose(&self, other: &CompoundSpec) -> CompoundSpec {
        let len = self.weights.len().max(other.weights.len());
        let weights = (0..len)
            .map(|i| self.weights.get(i).copied().unwrap_or(0.0) + other.weights.get(i).copied().unwrap_or(0.0))
            .collect();
        CompoundSpec { weights }
    }

    /// Index `K` beyond which the tail mass is below `1e-12`, from the
    /// Chernoff bound `exp(Σ w_n (e^{s n} - 1) - s K)` at `s = 1/N`,
    /// capped at `cap`.
    pub fn tail_cutoff(&self, cap: usize) -> usize {
        let s = 1.0 / self.levels() as f64;
        let log_mgf: f64 = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, w)| w * (s * (i + 1) as f64).exp_m1())
            .sum();
        // exp(log_mgf - s K) < 1e-12  <=>  K > (log_mgf + 12 ln 10) / s
        let k = ((log_mgf + 12.0 * std::f64::consts::LN_10) / s).ceil();
        if k.is_finite() && k < cap as f64 {
            (k as usize).max(1)
        } else {
            cap
        }
    }
}

/// `P(Λ = k)` for `k = 0..=K`, plus the mass beyond `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfTable {
    probabilities: Vec<f64>,
    tail: f64,
}

impl PmfTable {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn get(&self, k: usize) -> f64 {
        self.probabilities.get(k).copied().unwrap_or(0.0)
    }

    /// `P(Λ > K)`.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn max_index(&self) -> usize {
        self.probabilities.len() - 1
    }

    /// `P(Λ ≥ M)` for `M = 0..=K+1`.
    pub fn ccdf(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.probabilities.len() + 1);
        let mut below = 0.0;
        out.push(1.0);
        for p in &self.probabilities {
            below += p;
            out.push((1.0 - below).clamp(0.0, 1.0));
        }
        out
    }
}

const RESCALE_ABOVE: f64 = 1e280;

/// Compound-Poisson PMF up to index `max_k`.
///
/// Runs the recursion on unnormalised values starting from 1 and carries a
/// log scale, so totals far beyond `exp(-745)` do not underflow `p_0`.
pub fn pmf(spec: &CompoundSpec, max_k: usize) -> PmfTable {
    let populated: Vec<(usize, f64)> = spec
        .weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w > 0.0)
        .map(|(i, w)| (i + 1, (i + 1) as f64 * w))
        .collect();
    let mut q = vec![0.0; max_k + 1];
    q[0] = 1.0;
    let mut log_scale = 0.0;
    for k in 1..=max_k {
        let mut acc = 0.0;
        for &(j, jw) in &populated {
            if j > k {
                break;
            }
            acc += jw * q[k - j];
        }
        q[k] = acc / k as f64;
        if q[k] > RESCALE_ABOVE {
            for v in q[..=k].iter_mut() {
                *v /= RESCALE_ABOVE;
            }
            log_scale += RESCALE_ABOVE.ln();
        }
    }
    let shift = log_scale - spec.total_intensity();
    let probabilities: Vec<f64> = q.into_iter().map(|v| if v == 0.0 { 0.0 } else { (v.ln() + shift).exp() }).collect();
    let tail = (1.0 - probabilities.iter().sum::<f64>()).max(0.0);
    PmfTable { probabilities, tail }
}

/// `P(Λ ≥ M)` through the Bell-polynomial identity, evaluated with the
/// stable recursion.
pub fn ccdf_bell(spec: &CompoundSpec, m: usize) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let table = pmf(spec, m - 1);
    (1.0 - table.probabilities.iter().sum::<f64>()).clamp(0.0, 1.0)
}

/// `P(Λ ≥ M)` for every `M` in `0..=m_max`.
pub fn ccdf_curve(spec: &CompoundSpec, m_max: usize) -> Vec<f64> {
    if m_max == 0 {
        return vec![1.0];
    }
    let mut curve = pmf(spec, m_max - 1).ccdf();
    curve.truncate(m_max + 1);
    curve
}

/// `1 - H Σ_{k<M} B_k(x_1..x_k)/k!` evaluated literally. Only usable while
/// the Bell values stay finite.
pub fn ccdf_bell_literal(spec: &CompoundSpec, m: usize) -> Result<f64> {
    if m == 0 {
        return Ok(1.0);
    }
    let mut x = spec.bell_arguments();
    x.resize(m.max(x.len()), 0.0);
    let bells = bell_sequence(&x[..m - 1])?;
    let mut sum = 0.0;
    let mut fact = 1.0;
    for (k, b) in bells.iter().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        sum += b / fact;
    }
    Ok((1.0 - spec.zero_probability() * sum).clamp(0.0, 1.0))
}

/// Largest `k` accepted by the floating-point Bell evaluators.
pub const BELL_MAX_ORDER: usize = 25;

fn binomial_row(p: usize) -> Vec<f64> {
    let mut row = vec![1.0; p + 1];
    for i in 1..p {
        row[i] = row[i - 1] * (p - i + 1) as f64 / i as f64;
    }
    row
}

/// `B_0..B_k` for the arguments `x_1..x_k`, by the recurrence
/// `B_{p+1} = Σ_i C(p,i)·B_{p-i}·x_{i+1}`.
pub fn bell_sequence(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() > BELL_MAX_ORDER {
        return Err(Error::Range(format!(
            "Bell polynomial order {} exceeds {BELL_MAX_ORDER} in floating point",
            x.len()
        )));
    }
    let mut b = Vec::with_capacity(x.len() + 1);
    b.push(1.0);
    for p in 0..x.len() {
        let binom = binomial_row(p);
        let next: f64 = (0..=p).map(|i| binom[i] * b[p - i] * x[i]).sum();
        if !next.is_finite() {
            return Err(Error::Range(format!("B_{} overflows double precision", p + 1)));
        }
        b.push(next);
    }
    Ok(b)
}

/// Complete exponential Bell polynomial `B_k(x_1..x_k)`, `k = x.len()`.
pub fn bell_complete(x: &[f64]) -> Result<f64> {
    Ok(*bell_sequence(x)?.last().expect("B_0 always present"))
}

/// `B_k` as the determinant of the matrix with `C(p-i, j-i)·x_{j-i+1}` on
/// and above the diagonal and `-1` on the subdiagonal.
pub fn bell_determinant(x: &[f64]) -> Result<f64> {
    let p = x.len();
    if p > BELL_MAX_ORDER {
        return Err(Error::Range(format!(
            "Bell polynomial order {p} exceeds {BELL_MAX_ORDER} in floating point"
        )));
    }
    if p == 0 {
        return Ok(1.0);
    }
    let mut a = vec![vec![0.0; p]; p];
    for i in 0..p {
        let binom = binomial_row(p - 1 - i);
        for j in i..p {
            a[i][j] = binom[j - i] * x[j - i];
        }
        if i > 0 {
            a[i][i - 1] = -1.0;
        }
    }
    // Upper Hessenberg: eliminate the subdiagonal row by row with pivoting.
    let mut det = 1.0;
    for col in 0..p {
        if col + 1 < p && a[col + 1][col].abs() > a[col][col].abs() {
            a.swap(col, col + 1);
            det = -det;
        }
        let pivot = a[col][col];
        if pivot == 0.0 {
            return Ok(0.0);
        }
        det *= pivot;
        if col + 1 < p {
            let factor = a[col + 1][col] / pivot;
            for j in col..p {
                a[col + 1][j] -= factor * a[col][j];
            }
        }
    }
    if !det.is_finite() {
        return Err(Error::Range(format!("B_{p} overflows double precision")));
    }
    Ok(det)
}

fn binomial_exact(n: usize, k: usize) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

/// Exact `B_0..B_k` over integers.
pub fn bell_sequence_exact(x: &[BigInt]) -> Vec<BigInt> {
    let mut b = vec![BigInt::one()];
    for p in 0..x.len() {
        let next = (0..=p).fold(BigInt::zero(), |acc, i| acc + binomial_exact(p, i) * &b[p - i] * &x[i]);
        b.push(next);
    }
    b
}

/// Exact complete Bell polynomial by the recurrence.
pub fn bell_complete_exact(x: &[BigInt]) -> BigInt {
    bell_sequence_exact(x).pop().expect("B_0 always present")
}

/// Exact determinant form, by fraction-free (Bareiss) elimination.
pub fn bell_determinant_exact(x: &[BigInt]) -> BigInt {
    let p = x.len();
    if p == 0 {
        return BigInt::one();
    }
    let mut a = vec![vec![BigInt::zero(); p]; p];
    for i in 0..p {
        for j in i..p {
            a[i][j] = binomial_exact(p - 1 - i, j - i) * &x[j - i];
        }
        if i > 0 {
            a[i][i - 1] = -BigInt::one();
        }
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..p - 1 {
        if a[k][k].is_zero() {
            match (k + 1..p).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..p {
            for j in k + 1..p {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    &a[p - 1][p - 1] * sign
}

/// Absolute tolerance of the Fourier route.
pub const INTEGRAL_TOLERANCE: f64 = 1e-9;
/// Largest panel count tried before giving up.
const MAX_PANELS: usize = 1 << 16;
const NODES_PER_PANEL: usize = 8;

/// Composite Gauss-Legendre grid on `[0, π]` with `p_N`, `q_N` precomputed.
struct FourierGrid {
    theta: Vec<f64>,
    weight: Vec<f64>,
    /// `exp(p_N(θ) - Σ w_n)`.
    envelope: Vec<f64>,
    /// `q_N(θ)`.
    phase: Vec<f64>,
}

impl FourierGrid {
    fn new(spec: &CompoundSpec, panels: usize, rule: &GaussLegendre) -> Self {
        let total = spec.total_intensity();
        let width = std::f64::consts::PI / panels as f64;
        let n = panels * rule.nodes().len();
        let mut grid = FourierGrid {
            theta: Vec::with_capacity(n),
            weight: Vec::with_capacity(n),
            envelope: Vec::with_capacity(n),
            phase: Vec::with_capacity(n),
        };
        for panel in 0..panels {
            let lo = panel as f64 * width;
            for (node, w) in rule.nodes().iter().zip(rule.weights()) {
                let theta = lo + 0.5 * width * (node + 1.0);
                // cos(nθ), sin(nθ) by the angle-addition recurrence.
                let (s1, c1) = theta.sin_cos();
                let (mut s, mut c) = (s1, c1);
                let (mut p, mut q) = (0.0, 0.0);
                for wn in &spec.weights {
                    p += wn * c;
                    q += wn * s;
                    let next_c = c * c1 - s * s1;
                    s = s * c1 + c * s1;
                    c = next_c;
                }
                grid.theta.push(theta);
                grid.weight.push(0.5 * width * w);
                grid.envelope.push((p - total).exp());
                grid.phase.push(q);
            }
        }
        grid
    }

    /// `(1/π) ∫_0^π e^{p-Σw} · sin(Mθ/2)/sin(θ/2) · cos((M-1)θ/2 - q) dθ`,
    /// i.e. `P(Λ < M)`.
    fn cdf_below(&self, m: usize) -> f64 {
        let mf = m as f64;
        let mut acc = 0.0;
        for i in 0..self.theta.len() {
            let theta = self.theta[i];
            let half = 0.5 * theta;
            let sh = half.sin();
            let dirichlet = if sh.abs() < 1e-300 { mf } else { (mf * half).sin() / sh };
            acc += self.weight[i] * self.envelope[i] * dirichlet * (0.5 * (mf - 1.0) * theta - self.phase[i]).cos();
        }
        acc / std::f64::consts::PI
    }
}

fn initial_panels(spec: &CompoundSpec, m_max: usize) -> usize {
    64usize.max(4 * (m_max + spec.levels()))
}

/// `P(Λ ≥ M)` for `M = 1..=m_max` (index 0 holds `M = 0`) by integrating the
/// characteristic function. The panel count doubles until two successive
/// grids agree to `INTEGRAL_TOLERANCE` at every `M`.
pub fn ccdf_integral_curve(spec: &CompoundSpec, m_max: usize) -> Result<Vec<f64>> {
    let rule = GaussLegendre::new(NODES_PER_PANEL);
    let mut panels = initial_panels(spec, m_max);
    let eval = |grid: &FourierGrid| -> Vec<f64> {
        std::iter::once(1.0)
            .chain((1..=m_max).map(|m| 1.0 - grid.cdf_below(m)))
            .collect()
    };
    let mut coarse = eval(&FourierGrid::new(spec, panels, &rule));
    loop {
        panels *= 2;
        let fine = eval(&FourierGrid::new(spec, panels, &rule));
        let worst = coarse
            .iter()
            .zip(&fine)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if worst <= INTEGRAL_TOLERANCE {
            return Ok(fine.into_iter().map(clamp_probability).collect());
        }
        if panels >= MAX_PANELS {
            let estimate = fine.last().copied().unwrap_or(1.0);
            return Err(Error::Accuracy {
                estimate,
                achieved_error: worst,
                tolerance: INTEGRAL_TOLERANCE,
            });
        }
        coarse = fine;
    }
}

/// Quadrature noise within ±1e-8 of the unit interval is clamped away.
fn clamp_probability(p: f64) -> f64 {
    if p < 0.0 && p > -1e-8 {
        0.0
    } else if p > 1.0 && p < 1.0 + 1e-8 {
        1.0
    } else {
        p
    }
}

/// `P(Λ ≥ M)` through the Fourier integral, for `M ≥ 1`.
pub fn ccdf_integral(spec: &CompoundSpec, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("the integral form needs M >= 1".into()));
    }
    let rule = GaussLegendre::new(NODES_PER_PANEL);
    let mut panels = initial_panels(spec, m);
    let mut coarse = 1.0 - FourierGrid::new(spec, panels, &rule).cdf_below(m);
    loop {
        panels *= 2;
        let fine = 1.0 - FourierGrid::new(spec, panels, &rule).cdf_below(m);
        let err = (fine - coarse).abs();
        if err <= INTEGRAL_TOLERANCE {
            return Ok(clamp_probability(fine));
        }
        if panels >= MAX_PANELS {
            return Err(Error::Accuracy {
                estimate: fine,
                achieved_error: err,
                tolerance: INTEGRAL_TOLERANCE,
            });
        }
        coarse = fine;
    }
}
