//! Probe loop: persistence under every probe metric, death matching, shift peaks and the fit.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::DensityConfig;
use crate::error::{NiphError, Result};
use crate::fit::{fit_parameters, FitConfig, FitResult, HomologyDim, PeakObservation};
use crate::geometry::{canonical_angle, scale_points, PointCloud, ProbeSpec};
use crate::persistence::{
    death_distribution, death_edge_orientations, vr_persistence_0, vr_persistence_1,
    PersistenceDiagram, RipsConfig, WeightedDeaths, Weighting, DEFAULT_MAX_EDGES,
};
use crate::transport::{mult_shifts, ot_1d, shift_diagram, MultShiftDiagram};

/// Probe directions and factors of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbePlan {
    pub directions: Vec<f64>,
    pub factors: Vec<f64>,
    pub dim: HomologyDim,
    pub weighting: Weighting,
}

impl ProbePlan {
    /// `k` directions evenly spaced over `[0, pi)`.
    pub fn even(
        k: usize,
        factors: Vec<f64>,
        dim: HomologyDim,
        weighting: Weighting,
    ) -> Result<Self> {
        let directions = (0..k).map(|i| PI * i as f64 / k as f64).collect();
        Self::with_directions(directions, factors, dim, weighting)
    }

    pub fn with_directions(
        directions: Vec<f64>,
        factors: Vec<f64>,
        dim: HomologyDim,
        weighting: Weighting,
    ) -> Result<Self> {
        let plan = Self {
            directions: directions.into_iter().map(canonical_angle).collect(),
            factors,
            dim,
            weighting,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// 15 directions and 9 factors in `[1.2, 2.5]`.
    pub fn road_default(dim: HomologyDim) -> Self {
        let factors = (0..9).map(|i| 1.2 + 1.3 * i as f64 / 8.0).collect();
        Self::even(15, factors, dim, Weighting::Unit).expect("valid default plan")
    }

    /// 8 directions at factor 2.
    pub fn synthetic_default(dim: HomologyDim) -> Self {
        let weighting = match dim {
            HomologyDim::Zero => Weighting::Unit,
            HomologyDim::One => Weighting::PersistenceDiff,
        };
        Self::even(8, vec![2.0], dim, weighting).expect("valid default plan")
    }

    pub fn validate(&self) -> Result<()> {
        if self.directions.len() < 2 {
            return Err(NiphError::InvalidInput(format!(
                "a probe plan needs at least 2 directions, got {}",
                self.directions.len()
            )));
        }
        if self.factors.is_empty() {
            return Err(NiphError::InvalidInput(
                "a probe plan needs at least one factor".into(),
            ));
        }
        if let Some(f) = self.factors.iter().find(|f| !(**f > 1.0 && f.is_finite())) {
            return Err(NiphError::InvalidInput(format!(
                "probe factors must be > 1, got {f}"
            )));
        }
        for (a, x) in self.directions.iter().enumerate() {
            if !x.is_finite() {
                return Err(NiphError::InvalidInput(format!(
                    "direction {x} is not finite"
                )));
            }
            for y in &self.directions[a + 1..] {
                let d = (x - y).rem_euclid(PI);
                if d.min(PI - d) < 1e-12 {
                    return Err(NiphError::InvalidInput(format!(
                        "directions {x} and {y} coincide mod pi"
                    )));
                }
            }
        }
        if self.dim == HomologyDim::Zero && self.weighting == Weighting::PersistenceRatio {
            return Err(NiphError::InvalidWeighting(
                "persistence-ratio weighting needs births > 0, unavailable in dimension 0".into(),
            ));
        }
        Ok(())
    }

    /// Same plan with every direction turned by `theta`.
    pub fn rotated(&self, theta: f64) -> Self {
        Self {
            directions: self
                .directions
                .iter()
                .map(|d| canonical_angle(d + theta))
                .collect(),
            ..self.clone()
        }
    }

    /// Probes in direction-major order.
    pub fn probes(&self) -> Result<Vec<ProbeSpec>> {
        let mut out = Vec::with_capacity(self.directions.len() * self.factors.len());
        for &d in &self.directions {
            for &f in &self.factors {
                out.push(ProbeSpec::from_angle(d, f)?);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NiphConfig {
    /// Radius cap for 1-dimensional persistence in base units; probes use `r_max * factor`.
    pub r_max: Option<f64>,
    pub max_edges: usize,
    pub density: DensityConfig,
    pub fit: FitConfig,
    /// Worker threads; the global pool when `None`.
    pub threads: Option<usize>,
    /// Bins of the death-edge orientation histograms; none when `None`.
    pub orientation_bins: Option<usize>,
    pub record_timing: bool,
}

impl Default for NiphConfig {
    fn default() -> Self {
        Self {
            r_max: None,
            max_edges: DEFAULT_MAX_EDGES,
            density: DensityConfig::default(),
            fit: FitConfig::default(),
            threads: None,
            orientation_bins: None,
            record_timing: false,
        }
    }
}

/// Persistence diagram of `cloud` under the probe metric (Euclidean when `probe` is `None`).
pub fn probe_persistence(
    cloud: &PointCloud,
    probe: Option<&ProbeSpec>,
    dim: HomologyDim,
    r_max: Option<f64>,
    max_edges: usize,
) -> Result<PersistenceDiagram> {
    let scaled;
    let space = match probe {
        Some(p) => {
            scaled = scale_points(cloud, p)?;
            &scaled
        }
        None => cloud,
    };
    match dim {
        HomologyDim::Zero => vr_persistence_0(space),
        HomologyDim::One => {
            let r = r_max.ok_or_else(|| {
                NiphError::InvalidInput("1-dimensional persistence needs r_max".into())
            })?;
            vr_persistence_1(
                space,
                &RipsConfig {
                    r_max: r,
                    max_edges,
                },
            )
        }
    }
}

/// Shift diagram of one probe against a precomputed base distribution.
pub fn probe_shift_diagram(
    cloud: &PointCloud,
    base: &WeightedDeaths,
    probe: &ProbeSpec,
    dim: HomologyDim,
    weighting: Weighting,
    cfg: &NiphConfig,
) -> Result<(MultShiftDiagram, PersistenceDiagram, usize)> {
    let r_max = cfg.r_max.map(|r| r * probe.factor().max(1.0));
    let diagram = probe_persistence(cloud, Some(probe), dim, r_max, cfg.max_edges)?;
    let deaths = death_distribution(&diagram, weighting)?;
    let plan = ot_1d(base, &deaths)?;
    let shifts = mult_shifts(&plan, base, &deaths)?;
    let weights: Vec<f64> = shifts
        .source_index
        .iter()
        .map(|&i| base.weights[i])
        .collect();
    let ms = shift_diagram(&shifts.shifts, &weights, probe, &cfg.density)?;
    Ok((ms, diagram, shifts.dropped.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSummary {
    pub angle: f64,
    pub factor: f64,
    pub peak: f64,
    pub weight_mass: f64,
    pub shifts: usize,
    /// Base classes without transported mass.
    pub dropped: usize,
    /// Classes alive at the probe's radius cap.
    pub truncated: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    /// Death-edge orientations measured in the input frame.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation_histogram: Option<Vec<f64>>,
}

/// Spread of peaks over directions at one factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationStrength {
    pub factor: f64,
    pub max_peak: f64,
    pub min_peak: f64,
    pub range: f64,
    /// Direction of the largest peak.
    pub max_angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub base_ms: f64,
    pub probes_ms: f64,
    pub fit_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NiphReport {
    pub fingerprint: String,
    pub points: usize,
    pub plan: ProbePlan,
    pub base_classes: usize,
    pub probes: Vec<ProbeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitResult>,
    pub strength: Vec<OrientationStrength>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_orientation_histogram: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Full shift diagrams in probe order.
    #[serde(skip)]
    pub diagrams: Vec<MultShiftDiagram>,
}

impl NiphReport {
    pub fn peaks(&self) -> Vec<PeakObservation> {
        self.diagrams
            .iter()
            .map(|d| PeakObservation {
                probe: d.probe.clone(),
                peak: d.peak,
                dim: self.plan.dim,
            })
            .collect()
    }
}

/// FNV-1a over dimension and coordinate bits.
pub fn fingerprint(cloud: &PointCloud) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for b in bytes {
            h ^= *b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    eat(&(cloud.dim() as u64).to_le_bytes());
    for c in cloud.coords() {
        eat(&c.to_bits().to_le_bytes());
    }
    format!("{h:016x}")
}

/// Runs every probe of `plan` on `cloud` and fits the model to the peaks.
pub fn run_niph(cloud: &PointCloud, plan: &ProbePlan, cfg: &NiphConfig) -> Result<NiphReport> {
    plan.validate()?;
    if cloud.dim() != 2 {
        return Err(NiphError::DimensionMismatch {
            expected: 2,
            found: cloud.dim(),
        });
    }
    if cloud.len() < 2 {
        return Err(NiphError::Degenerate(
            "persistence needs at least 2 points".into(),
        ));
    }
    if plan.dim == HomologyDim::One && cfg.r_max.is_none() {
        return Err(NiphError::InvalidInput(
            "1-dimensional runs need r_max".into(),
        ));
    }
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| NiphError::InvalidInput(format!("thread pool: {e}")))?
            .install(|| run_inner(cloud, plan, cfg)),
        None => run_inner(cloud, plan, cfg),
    }
}

fn run_inner(cloud: &PointCloud, plan: &ProbePlan, cfg: &NiphConfig) -> Result<NiphReport> {
    let start = Instant::now();
    let mut warnings = Vec::new();
    let base = probe_persistence(cloud, None, plan.dim, cfg.r_max, cfg.max_edges)?;
    warnings.extend(base.warnings.iter().cloned());
    let base_deaths = death_distribution(&base, plan.weighting)?;
    let base_hist = match cfg.orientation_bins {
        Some(bins) => Some(death_edge_orientations(&base, cloud, plan.weighting)?.histogram(bins)),
        None => None,
    };
    let base_ms = start.elapsed().as_secs_f64() * 1e3;

    let probes = plan.probes()?;
    let outcomes: Vec<Result<(MultShiftDiagram, PersistenceDiagram, usize)>> = probes
        .par_iter()
        .map(|p| probe_shift_diagram(cloud, &base_deaths, p, plan.dim, plan.weighting, cfg))
        .collect();
    if let Some(index) = outcomes.iter().position(|o| o.is_err()) {
        let completed = outcomes
            .iter()
            .enumerate()
            .filter(|(_, o)| o.is_ok())
            .map(|(i, _)| i)
            .collect();
        let source = outcomes
            .into_iter()
            .nth(index)
            .and_then(|o| o.err())
            .expect("error");
        return Err(NiphError::Probe {
            index,
            angle: probes[index].angle().unwrap_or(f64::NAN),
            factor: probes[index].factor(),
            completed,
            source: Box::new(source),
        });
    }
    let mut diagrams = Vec::with_capacity(probes.len());
    let mut summaries = Vec::with_capacity(probes.len());
    for o in outcomes {
        let (ms, diagram, dropped) = o?;
        let truncated = diagram.truncated_count();
        for w in &diagram.warnings {
            warnings.push(format!(
                "probe ({:.6}, {}): {w}",
                ms.probe.angle().unwrap_or(f64::NAN),
                ms.probe.factor()
            ));
        }
        let orientation_histogram = match cfg.orientation_bins {
            Some(bins) => {
                Some(death_edge_orientations(&diagram, cloud, plan.weighting)?.histogram(bins))
            }
            None => None,
        };
        summaries.push(ProbeSummary {
            angle: ms.probe.angle().unwrap_or(f64::NAN),
            factor: ms.probe.factor(),
            peak: ms.peak,
            weight_mass: ms.weight_mass(),
            shifts: ms.shifts.len(),
            dropped,
            truncated,
            bandwidth: ms.density.as_ref().map(|c| c.bandwidth),
            orientation_histogram,
        });
        diagrams.push(ms);
    }
    let probes_ms = start.elapsed().as_secs_f64() * 1e3 - base_ms;

    let strength = plan
        .factors
        .iter()
        .map(|&f| {
            let at: Vec<&ProbeSummary> = summaries.iter().filter(|s| s.factor == f).collect();
            let mut best = at[0];
            let mut min_peak = at[0].peak;
            for s in &at[1..] {
                if s.peak > best.peak {
                    best = s;
                }
                min_peak = min_peak.min(s.peak);
            }
            OrientationStrength {
                factor: f,
                max_peak: best.peak,
                min_peak,
                range: best.peak - min_peak,
                max_angle: best.angle,
            }
        })
        .collect();

    let fit_start = Instant::now();
    let obs: Vec<PeakObservation> = diagrams
        .iter()
        .map(|d| PeakObservation {
            probe: d.probe.clone(),
            peak: d.peak,
            dim: plan.dim,
        })
        .collect();
    let fit = if obs.len() >= 3 {
        Some(fit_parameters(&obs, &cfg.fit)?)
    } else {
        warnings.push(format!(
            "fit skipped: {} peaks, at least 3 needed",
            obs.len()
        ));
        None
    };
    let fit_ms = fit_start.elapsed().as_secs_f64() * 1e3;

    Ok(NiphReport {
        fingerprint: fingerprint(cloud),
        points: cloud.len(),
        plan: plan.clone(),
        base_classes: base_deaths.len(),
        probes: summaries,
        fit,
        strength,
        base_orientation_histogram: base_hist,
        timing: cfg.record_timing.then_some(Timing {
            base_ms,
            probes_ms,
            fit_ms,
        }),
        warnings,
        diagrams,
    })
}
