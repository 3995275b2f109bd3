//! Expected-peak model and recovery of orientation, orientational variance and scaling.
//!
//! The model predicts where the shift density of a probe `(psi, S)` peaks for data made of shapes
//! with orientation `phi`, scaling `s` and Gaussian orientation noise of variance `V`. Folding over
//! `V` is the Gaussian-weighted average of the `V = 0` curve, integrated piecewise with
//! Gauss-Legendre rules split at the kinks of the `min(...)`.
//!
//! Fitting minimizes the squared distance between predicted and observed peaks with seeded
//! simulated annealing restarts, each polished by Nelder-Mead.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{density_peak, DensityConfig};
use crate::error::{NiphError, Result};
use crate::geometry::{canonical_angle, PointCloud, ProbeSpec};
use crate::synth::mix_seed;

/// Homology dimension whose shift statistics are being modeled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HomologyDim {
    /// Grid model (0-dimensional homology).
    #[serde(rename = "0")]
    Zero,
    /// Rectangle model (1-dimensional homology).
    #[serde(rename = "1")]
    One,
}

impl HomologyDim {
    pub fn index(self) -> usize {
        match self {
            HomologyDim::Zero => 0,
            HomologyDim::One => 1,
        }
    }

    pub fn from_index(d: usize) -> Result<Self> {
        match d {
            0 => Ok(HomologyDim::Zero),
            1 => Ok(HomologyDim::One),
            other => Err(NiphError::InvalidInput(format!(
                "homology dimension must be 0 or 1, got {other}"
            ))),
        }
    }
}

/// How orientational variance enters the model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FoldMode {
    /// Gaussian-weighted average of the unperturbed peak.
    #[default]
    WeightedIntegral,
    /// Mode of the distribution of unperturbed peaks under the orientation noise.
    DensityArgmax,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    pub fn gauss_legendre(n: usize) -> Self {
        let n = n.max(1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
                }
                dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Default Gauss-Legendre order per smooth piece of the folding integral.
pub const DEFAULT_FOLD_NODES: usize = 10;

/// Half-width of the folding window in standard deviations.
const FOLD_SPAN: f64 = 8.5;

fn default_rule() -> &'static Quadrature {
    static RULE: OnceLock<Quadrature> = OnceLock::new();
    RULE.get_or_init(|| Quadrature::gauss_legendre(DEFAULT_FOLD_NODES))
}

fn check_model_args(factor: f64, var: f64, s: f64) -> Result<()> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(NiphError::InvalidInput(format!(
            "probe factor must be > 0, got {factor}"
        )));
    }
    if !(var >= 0.0 && var.is_finite()) {
        return Err(NiphError::InvalidInput(format!(
            "variance must be >= 0, got {var}"
        )));
    }
    if !(s >= 1.0 && s.is_finite()) {
        return Err(NiphError::InvalidInput(format!(
            "scaling must be >= 1, got {s}"
        )));
    }
    Ok(())
}

/// Unperturbed expected peak at angle offset `theta = phi - psi`.
#[inline]
fn peak_at(dim: HomologyDim, theta: f64, factor: f64, s: f64) -> f64 {
    let (sin, cos) = theta.sin_cos();
    let k = factor * factor - 1.0;
    match dim {
        HomologyDim::One => {
            let along = factor / (1.0 + k * cos * cos).sqrt();
            let across = s * factor / (1.0 + k * sin * sin).sqrt();
            along.min(across)
        }
        HomologyDim::Zero => (factor * factor * cos * cos + sin * sin).sqrt().min(s),
    }
}

/// Offsets in `[0, pi)` where the two branches of the `min` cross.
fn kink_angles(dim: HomologyDim, factor: f64, s: f64) -> Vec<f64> {
    let k = factor * factor - 1.0;
    if k == 0.0 {
        return Vec::new();
    }
    let c = match dim {
        HomologyDim::One => (factor * factor - s * s) / (k * (1.0 + s * s)),
        HomologyDim::Zero => (s * s - 1.0) / k,
    };
    if !(0.0..=1.0).contains(&c) {
        return Vec::new();
    }
    let t = c.sqrt().acos();
    vec![t, PI - t]
}

/// Breakpoints and node positions of the folding integral for standard deviation `sigma`.
fn fold_nodes(
    dim: HomologyDim,
    psi: f64,
    factor: f64,
    phi: f64,
    sigma: f64,
    s: f64,
    rule: &Quadrature,
    mut visit: impl FnMut(f64, f64),
) {
    let half = FOLD_SPAN * sigma;
    let mut cuts: Vec<f64> = Vec::new();
    let pieces = (2.0 * FOLD_SPAN).ceil() as usize;
    for k in 0..=pieces {
        cuts.push(-half + 2.0 * half * k as f64 / pieces as f64);
    }
    // kinks at phi + t - psi = kink + m pi
    for kink in kink_angles(dim, factor, s) {
        let base = kink + psi - phi;
        let m_lo = ((-half - base) / PI).ceil() as i64;
        let m_hi = ((half - base) / PI).floor() as i64;
        for m in m_lo..=m_hi {
            cuts.push(base + m as f64 * PI);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15 * half.max(1e-300));
    let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let rad = 0.5 * (b - a);
        if rad <= 0.0 {
            continue;
        }
        for (x, wq) in rule.nodes.iter().zip(&rule.weights) {
            let t = mid + rad * x;
            let gauss = norm * (-0.5 * (t / sigma).powi(2)).exp();
            visit(t, wq * rad * gauss);
        }
    }
}

fn folded_integral(
    dim: HomologyDim,
    psi: f64,
    factor: f64,
    phi: f64,
    var: f64,
    s: f64,
    rule: &Quadrature,
) -> f64 {
    if var == 0.0 {
        return peak_at(dim, phi - psi, factor, s);
    }
    let sigma = var.sqrt();
    let mut acc = 0.0;
    let mut mass = 0.0;
    fold_nodes(dim, psi, factor, phi, sigma, s, rule, |t, w| {
        acc += w * peak_at(dim, phi + t - psi, factor, s);
        mass += w;
    });
    // renormalize the truncated Gaussian window
    acc / mass
}

fn folded_argmax(
    dim: HomologyDim,
    psi: f64,
    factor: f64,
    phi: f64,
    var: f64,
    s: f64,
    rule: &Quadrature,
) -> f64 {
    if var == 0.0 {
        return peak_at(dim, phi - psi, factor, s);
    }
    let sigma = var.sqrt();
    let mut values = Vec::new();
    let mut weights = Vec::new();
    fold_nodes(dim, psi, factor, phi, sigma, s, rule, |t, w| {
        values.push(peak_at(dim, phi + t - psi, factor, s));
        weights.push(w);
    });
    match density_peak(&values, &weights, &DensityConfig::default()) {
        Ok((_, p)) => p,
        Err(_) => values[0],
    }
}

/// Model evaluation with an explicit fold mode and quadrature rule.
#[allow(clippy::too_many_arguments)]
pub fn expected_peak_with(
    dim: HomologyDim,
    psi: f64,
    factor: f64,
    phi: f64,
    var: f64,
    s: f64,
    mode: FoldMode,
    rule: &Quadrature,
) -> Result<f64> {
    check_model_args(factor, var, s)?;
    Ok(match mode {
        FoldMode::WeightedIntegral => folded_integral(dim, psi, factor, phi, var, s, rule),
        FoldMode::DensityArgmax => folded_argmax(dim, psi, factor, phi, var, s, rule),
    })
}

pub fn expected_peak(
    dim: HomologyDim,
    psi: f64,
    factor: f64,
    phi: f64,
    var: f64,
    s: f64,
) -> Result<f64> {
    expected_peak_with(
        dim,
        psi,
        factor,
        phi,
        var,
        s,
        FoldMode::WeightedIntegral,
        default_rule(),
    )
}

/// Expected shift peak for 1-dimensional homology of oriented rectangles.
///
/// `min(S / sqrt(1 + (S^2 - 1) cos^2(phi - psi)), s S / sqrt(1 + (S^2 - 1) sin^2(phi - psi)))`,
/// averaged over `phi + N(0, V)` when `V > 0`.
pub fn expected_peak_1d(psi: f64, factor: f64, phi: f64, var: f64, s: f64) -> Result<f64> {
    expected_peak(HomologyDim::One, psi, factor, phi, var, s)
}

/// Expected shift peak for 0-dimensional homology of oriented grids:
/// `min(sqrt(S^2 cos^2(phi - psi) + sin^2(phi - psi)), s)`, folded like the 1-dimensional case.
pub fn expected_peak_0d(psi: f64, factor: f64, phi: f64, var: f64, s: f64) -> Result<f64> {
    expected_peak(HomologyDim::Zero, psi, factor, phi, var, s)
}

/// Measured peak of one probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakObservation {
    pub probe: ProbeSpec,
    pub peak: f64,
    pub dim: HomologyDim,
}

impl PeakObservation {
    pub fn new(angle: f64, factor: f64, peak: f64, dim: HomologyDim) -> Result<Self> {
        if !(peak > 0.0 && peak.is_finite()) {
            return Err(NiphError::InvalidInput(format!(
                "peak must be > 0, got {peak}"
            )));
        }
        Ok(Self {
            probe: ProbeSpec::from_angle(angle, factor)?,
            peak,
            dim,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub v_max: f64,
    pub s_max: f64,
    /// Annealing evaluations per restart.
    pub evaluations: usize,
    pub restarts: usize,
    pub seed: u64,
    pub fold: FoldMode,
    pub fold_nodes: usize,
    /// Nelder-Mead stops once the simplex is smaller than this in every parameter.
    pub polish_tolerance: f64,
    /// Report the smallest `s` whose residual matches the optimum.
    ///
    /// Above the probing factor `s` stops influencing the model, so the optimum is a plateau.
    pub minimal_scaling: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            v_max: 1.0,
            s_max: 10.0,
            evaluations: 5000,
            restarts: 8,
            seed: 0,
            fold: FoldMode::WeightedIntegral,
            fold_nodes: DEFAULT_FOLD_NODES,
            polish_tolerance: 1e-7,
            minimal_scaling: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Orientation in `[0, pi)`.
    pub phi: f64,
    pub var: f64,
    pub s: f64,
    pub residual: f64,
    pub evaluations: usize,
}

impl FitResult {
    pub fn sqrt_var(&self) -> f64 {
        self.var.sqrt()
    }

    pub fn phi_deg(&self) -> f64 {
        self.phi.to_degrees()
    }
}

struct Objective<'a> {
    obs: &'a [(HomologyDim, f64, f64, f64)],
    mode: FoldMode,
    rule: &'a Quadrature,
}

impl Objective<'_> {
    /// Parameters are `(phi, sqrt(V), s)`.
    fn eval(&self, x: &[f64; 3]) -> f64 {
        let var = x[1] * x[1];
        self.obs
            .iter()
            .map(|&(dim, psi, factor, peak)| {
                let model = match self.mode {
                    FoldMode::WeightedIntegral => {
                        folded_integral(dim, psi, factor, x[0], var, x[2], self.rule)
                    }
                    FoldMode::DensityArgmax => {
                        folded_argmax(dim, psi, factor, x[0], var, x[2], self.rule)
                    }
                };
                (model - peak).powi(2)
            })
            .sum()
    }
}

#[derive(Clone, Copy)]
struct Bounds {
    lo: [f64; 3],
    hi: [f64; 3],
}

impl Bounds {
    fn project(&self, x: &mut [f64; 3]) {
        x[0] = x[0].rem_euclid(PI);
        for k in 1..3 {
            x[k] = x[k].clamp(self.lo[k], self.hi[k]);
        }
    }

    fn reflect(&self, x: &mut [f64; 3]) {
        x[0] = x[0].rem_euclid(PI);
        for k in 1..3 {
            let (lo, hi) = (self.lo[k], self.hi[k]);
            let w = hi - lo;
            if w <= 0.0 {
                x[k] = lo;
                continue;
            }
            let mut v = (x[k] - lo).rem_euclid(2.0 * w);
            if v > w {
                v = 2.0 * w - v;
            }
            x[k] = lo + v;
        }
    }
}

fn anneal(f: &Objective, bounds: Bounds, evaluations: usize, seed: u64) -> ([f64; 3], f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let range = [
        bounds.hi[0] - bounds.lo[0],
        bounds.hi[1] - bounds.lo[1],
        bounds.hi[2] - bounds.lo[2],
    ];
    let random_point = |rng: &mut ChaCha8Rng| {
        let mut x = [0.0; 3];
        for k in 0..3 {
            x[k] = bounds.lo[k] + range[k] * rng.random::<f64>();
        }
        x
    };
    // initial temperature from the spread of the objective over the box
    let probes = 24.min(evaluations.max(2));
    let mut samples = Vec::with_capacity(probes);
    let mut best = random_point(&mut rng);
    let mut best_f = f.eval(&best);
    samples.push(best_f);
    for _ in 1..probes {
        let x = random_point(&mut rng);
        let fx = f.eval(&x);
        samples.push(fx);
        if fx < best_f {
            best = x;
            best_f = fx;
        }
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let sd =
        (samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / samples.len() as f64).sqrt();
    let t0 = sd.max(1e-12);
    let t_end = t0 * 1e-9;
    let steps = evaluations.saturating_sub(probes).max(1);
    let cooling = (t_end / t0).powf(1.0 / steps as f64);

    let mut current = best;
    let mut current_f = best_f;
    let mut temp = t0;
    for k in 0..steps {
        // step size shrinks from the full box to ~1e-4 of it
        let frac = 1.0 - k as f64 / steps as f64;
        let scale = 1e-4 + frac * frac * 0.5;
        let mut cand = current;
        for d in 0..3 {
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            cand[d] += z * scale * range[d];
        }
        bounds.reflect(&mut cand);
        let fc = f.eval(&cand);
        let accept = fc <= current_f || rng.random::<f64>() < (-(fc - current_f) / temp).exp();
        if accept {
            current = cand;
            current_f = fc;
            if fc < best_f {
                best = cand;
                best_f = fc;
            }
        }
        temp *= cooling;
    }
    (best, best_f, probes + steps)
}

fn nelder_mead(
    f: &Objective,
    bounds: Bounds,
    start: [f64; 3],
    tol: f64,
    max_iter: usize,
) -> ([f64; 3], f64, usize) {
    let eval = |x: &[f64; 3]| {
        let mut y = *x;
        bounds.project(&mut y);
        f.eval(&y)
    };
    let steps = [
        0.05,
        0.05 * (bounds.hi[1] - bounds.lo[1]).max(1e-3),
        0.05 * (bounds.hi[2] - bounds.lo[2]).max(1e-3),
    ];
    let mut evals = 0;
    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push((start, eval(&start)));
    for d in 0..3 {
        let mut x = start;
        x[d] += if x[d] + steps[d] <= bounds.hi[d] || d == 0 {
            steps[d]
        } else {
            -steps[d]
        };
        simplex.push((x, eval(&x)));
    }
    evals += 4;
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let size = (1..4)
            .map(|k| {
                (0..3)
                    .map(|d| (simplex[k].0[d] - simplex[0].0[d]).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if size < tol {
            break;
        }
        let mut centroid = [0.0; 3];
        for (x, _) in &simplex[..3] {
            for d in 0..3 {
                centroid[d] += x[d] / 3.0;
            }
        }
        let worst = simplex[3];
        let along = |t: f64| {
            let mut x = [0.0; 3];
            for d in 0..3 {
                x[d] = centroid[d] + t * (worst.0[d] - centroid[d]);
            }
            x
        };
        let xr = along(-1.0);
        let fr = eval(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe);
            evals += 1;
            simplex[3] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[2].1 {
            simplex[3] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let x = along(-0.5);
                (x, eval(&x))
            } else {
                let x = along(0.5);
                (x, eval(&x))
            };
            evals += 1;
            if fc < worst.1.min(fr) {
                simplex[3] = (xc, fc);
            } else {
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    for d in 0..3 {
                        v.0[d] = best[d] + 0.5 * (v.0[d] - best[d]);
                    }
                    v.1 = eval(&v.0);
                }
                evals += 3;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut x = simplex[0].0;
    bounds.project(&mut x);
    (x, simplex[0].1, evals)
}

/// Fits `(phi, V, s)` to observed peaks; deterministic for a given `cfg.seed`.
pub fn fit_parameters(obs: &[PeakObservation], cfg: &FitConfig) -> Result<FitResult> {
    if obs.len() < 3 {
        return Err(NiphError::InvalidInput(format!(
            "fitting needs at least 3 observations, got {}",
            obs.len()
        )));
    }
    let dim = obs[0].dim;
    if obs.iter().any(|o| o.dim != dim) {
        return Err(NiphError::InvalidInput(
            "all observations must come from one homology dimension".into(),
        ));
    }
    let mut rows = Vec::with_capacity(obs.len());
    for o in obs {
        let psi = o.probe.angle().ok_or_else(|| {
            NiphError::InvalidInput("fitting is only defined for planar probes".into())
        })?;
        if !(o.peak > 0.0 && o.peak.is_finite()) {
            return Err(NiphError::InvalidInput(format!(
                "peak must be > 0, got {}",
                o.peak
            )));
        }
        rows.push((dim, psi, o.probe.factor(), o.peak));
    }
    let mut angles: Vec<f64> = rows.iter().map(|r| r.1).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if angles.len() < 2 || (angles.len() == 2 && (angles[1] - angles[0] - PI).abs() < 1e-9) {
        return Err(NiphError::InvalidInput(
            "observations must span at least 2 distinct directions".into(),
        ));
    }
    if !(cfg.v_max >= 0.0 && cfg.s_max >= 1.0 && cfg.v_max.is_finite() && cfg.s_max.is_finite()) {
        return Err(NiphError::InvalidInput(format!(
            "empty search box: V in [0, {}], s in [1, {}]",
            cfg.v_max, cfg.s_max
        )));
    }
    let rule = if cfg.fold_nodes == DEFAULT_FOLD_NODES {
        default_rule().clone()
    } else {
        Quadrature::gauss_legendre(cfg.fold_nodes)
    };
    let objective = Objective {
        obs: &rows,
        mode: cfg.fold,
        rule: &rule,
    };
    let bounds = Bounds {
        lo: [0.0, 0.0, 1.0],
        hi: [PI, cfg.v_max.sqrt(), cfg.s_max],
    };
    let restarts = cfg.restarts.max(1);
    let runs: Vec<([f64; 3], f64, usize)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let (x, _, e1) = anneal(
                &objective,
                bounds,
                cfg.evaluations,
                mix_seed(cfg.seed, r as u64),
            );
            let (x, _, e2) = nelder_mead(&objective, bounds, x, cfg.polish_tolerance, 4000);
            // one restart of the simplex around the polished point
            let (x, fx, e3) = nelder_mead(&objective, bounds, x, cfg.polish_tolerance, 4000);
            (x, fx, e1 + e2 + e3)
        })
        .collect();
    let mut evaluations: usize = runs.iter().map(|r| r.2).sum();
    let (mut best, mut best_f) = (runs[0].0, runs[0].1);
    for run in &runs[1..] {
        if run.1 < best_f {
            best = run.0;
            best_f = run.1;
        }
    }
    if cfg.minimal_scaling {
        let (s, f, e) = minimal_scaling(&objective, best, best_f);
        best[2] = s;
        best_f = f;
        evaluations += e;
    }
    Ok(FitResult {
        phi: canonical_angle(best[0]),
        var: best[1] * best[1],
        s: best[2],
        residual: best_f.max(0.0),
        evaluations,
    })
}

/// Smallest `s` in `[1, s*]` whose residual stays within round-off of the optimum.
fn minimal_scaling(f: &Objective, x: [f64; 3], fx: f64) -> (f64, f64, usize) {
    let threshold = fx * (1.0 + 1e-9) + 1e-15 * f.obs.len() as f64;
    let at = |s: f64| f.eval(&[x[0], x[1], s]);
    let mut evals = 1;
    if at(1.0) <= threshold {
        return (1.0, at(1.0), evals + 1);
    }
    let (mut lo, mut hi) = (1.0, x[2]);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        evals += 1;
        if at(mid) <= threshold {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    let f_hi = at(hi);
    if f_hi <= fx {
        (hi, f_hi, evals + 1)
    } else {
        (hi, f_hi.max(fx), evals + 1)
    }
}

/// Leading principal direction of a planar cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcaOrientation {
    /// Angle of the leading eigenvector in `[0, pi)`.
    pub angle: f64,
    /// `lambda_1 / lambda_2`; infinite for collinear data.
    pub ratio: f64,
}

pub fn pca_orientation(cloud: &PointCloud) -> Result<PcaOrientation> {
    if cloud.dim() != 2 {
        return Err(NiphError::DimensionMismatch {
            expected: 2,
            found: cloud.dim(),
        });
    }
    let n = cloud.len();
    if n < 2 {
        return Err(NiphError::Degenerate("PCA needs at least 2 points".into()));
    }
    let (mut mx, mut my) = (0.0, 0.0);
    for p in cloud.points() {
        mx += p[0];
        my += p[1];
    }
    mx /= n as f64;
    my /= n as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in cloud.points() {
        let (dx, dy) = (p[0] - mx, p[1] - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let denom = (n - 1) as f64;
    let (sxx, syy, sxy) = (sxx / denom, syy / denom, sxy / denom);
    let half_trace = 0.5 * (sxx + syy);
    let disc = (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
    let (l1, l2) = (half_trace + disc, (half_trace - disc).max(0.0));
    if l1 <= 0.0 {
        return Err(NiphError::Degenerate("zero covariance".into()));
    }
    let angle = canonical_angle(0.5 * (2.0 * sxy).atan2(sxx - syy));
    let ratio = if l2 > l1 * 1e-15 {
        l1 / l2
    } else {
        f64::INFINITY
    };
    Ok(PcaOrientation { angle, ratio })
}

/// Distance between two axial angles, in degrees, in `[0, 90]`.
pub fn angular_error(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d).to_degrees()
}
