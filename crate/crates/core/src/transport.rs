//! Optimal transport between death distributions and the multiplicative death shift.

use serde::{Deserialize, Serialize};

use crate::density::{self, DensityConfig, DensityCurve};
use crate::error::{NiphError, Result};
use crate::geometry::ProbeSpec;
use crate::persistence::WeightedDeaths;

/// Cumulative-mass breakpoints closer than this are merged during the corner sweep.
const MASS_EPS: f64 = 1e-14;

/// Sparse coupling between two normalized weighted distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    pub rows: usize,
    pub cols: usize,
    /// `(i, j, mass)` triplets with `mass > 0`.
    pub entries: Vec<(usize, usize, f64)>,
    pub source_mass: Vec<f64>,
    pub target_mass: Vec<f64>,
}

#[derive(Serialize)]
struct Triplet {
    i: usize,
    j: usize,
    mass: f64,
}

impl TransportPlan {
    pub fn row_sums(&self) -> Vec<f64> {
        let mut r = vec![0.0; self.rows];
        for &(i, _, m) in &self.entries {
            r[i] += m;
        }
        r
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.cols];
        for &(_, j, m) in &self.entries {
            c[j] += m;
        }
        c
    }

    /// `sum T_ij c(a_i, b_j)`.
    pub fn cost(&self, source: &[f64], target: &[f64], c: impl Fn(f64, f64) -> f64) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, m)| m * c(source[i], target[j]))
            .sum()
    }

    /// Debug export: JSON array of `{i, j, mass}`.
    pub fn to_triplet_json(&self) -> Result<String> {
        let t: Vec<Triplet> = self
            .entries
            .iter()
            .map(|&(i, j, mass)| Triplet { i, j, mass })
            .collect();
        Ok(serde_json::to_string_pretty(&t)?)
    }
}

pub fn squared_cost(a: f64, b: f64) -> f64 {
    (a - b) * (a - b)
}

fn normalized(d: &WeightedDeaths) -> Result<Vec<f64>> {
    d.validate()?;
    let total = d.total_weight();
    Ok(d.weights.iter().map(|w| w / total).collect())
}

/// Cumulative mass along `order`, pinned to end at exactly 1.
fn cumulative(mass: &[f64], order: &[usize]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = order
        .iter()
        .map(|&k| {
            acc += mass[k];
            acc
        })
        .collect();
    if let Some(last) = out.last_mut() {
        *last = 1.0;
    }
    out
}

fn sorted_support(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx
}

/// Exact transport on the line: the monotone (north-west corner on sorted supports) coupling.
///
/// Optimal for `c(a, b) = h(a - b)` with any convex `h`, in particular the squared difference.
pub fn ot_1d(source: &WeightedDeaths, target: &WeightedDeaths) -> Result<TransportPlan> {
    let a = normalized(source)?;
    let b = normalized(target)?;
    let rows_sorted = sorted_support(&source.deaths);
    let cols_sorted = sorted_support(&target.deaths);

    let row_cdf = cumulative(&a, &rows_sorted);
    let col_cdf = cumulative(&b, &cols_sorted);
    let mut entries = Vec::with_capacity(a.len() + b.len());
    let (mut x, mut y) = (0, 0);
    let mut prev = 0.0;
    while x < row_cdf.len() && y < col_cdf.len() {
        let (ra, cb) = (row_cdf[x], col_cdf[y]);
        let (end, next_x, next_y) = if (ra - cb).abs() <= MASS_EPS {
            (ra.max(cb), x + 1, y + 1)
        } else if ra < cb {
            (ra, x + 1, y)
        } else {
            (cb, x, y + 1)
        };
        if end - prev > 0.0 {
            entries.push((rows_sorted[x], cols_sorted[y], end - prev));
            prev = end;
        }
        x = next_x;
        y = next_y;
    }
    Ok(TransportPlan {
        rows: a.len(),
        cols: b.len(),
        entries,
        source_mass: a,
        target_mass: b,
    })
}

/// Entropically regularized plan (log-domain Sinkhorn) with cost `(a - b)^2` and strength `lambda`.
///
/// Stops when both marginal errors fall below `1e-9` or after `max_iter` sweeps.
pub fn ot_entropic(
    source: &WeightedDeaths,
    target: &WeightedDeaths,
    lambda: f64,
    max_iter: usize,
) -> Result<TransportPlan> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(NiphError::InvalidInput(format!(
            "regularization strength must be > 0, got {lambda}"
        )));
    }
    let a = normalized(source)?;
    let b = normalized(target)?;
    let (n, m) = (a.len(), b.len());
    let cost: Vec<f64> = (0..n * m)
        .map(|k| squared_cost(source.deaths[k / m], target.deaths[k % m]))
        .collect();
    let log_a: Vec<f64> = a.iter().map(|v| v.ln()).collect();
    let log_b: Vec<f64> = b.iter().map(|v| v.ln()).collect();
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; m];
    let lse = |vals: &mut dyn Iterator<Item = f64>| {
        let v: Vec<f64> = vals.collect();
        let mx = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if mx == f64::NEG_INFINITY {
            mx
        } else {
            mx + v.iter().map(|x| (x - mx).exp()).sum::<f64>().ln()
        }
    };
    let plan_entry =
        |f: &[f64], g: &[f64], i: usize, j: usize| ((f[i] + g[j] - cost[i * m + j]) / lambda).exp();
    for _ in 0..max_iter {
        for i in 0..n {
            if a[i] > 0.0 {
                f[i] = lambda * log_a[i]
                    - lambda * lse(&mut (0..m).map(|j| (g[j] - cost[i * m + j]) / lambda));
            }
        }
        for j in 0..m {
            if b[j] > 0.0 {
                g[j] = lambda * log_b[j]
                    - lambda * lse(&mut (0..n).map(|i| (f[i] - cost[i * m + j]) / lambda));
            }
        }
        // after the column update the column marginals are exact; check rows
        let row_err = (0..n)
            .map(|i| ((0..m).map(|j| plan_entry(&f, &g, i, j)).sum::<f64>() - a[i]).abs())
            .fold(0.0, f64::max);
        if row_err < 1e-9 {
            break;
        }
    }
    let mut entries = Vec::new();
    for i in 0..n {
        if a[i] <= 0.0 {
            continue;
        }
        for j in 0..m {
            if b[j] <= 0.0 {
                continue;
            }
            let t = plan_entry(&f, &g, i, j);
            if t > 0.0 {
                entries.push((i, j, t));
            }
        }
    }
    Ok(TransportPlan {
        rows: n,
        cols: m,
        entries,
        source_mass: a,
        target_mass: b,
    })
}

/// Per-source-atom multiplicative shifts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftSet {
    pub shifts: Vec<f64>,
    /// Source atom of each shift.
    pub source_index: Vec<usize>,
    /// Source atoms without transported mass.
    pub dropped: Vec<usize>,
}

/// `ms_i = exp(sum_j That_ij ln(D'_j / D_i))` with `That` the row-normalized plan.
///
/// A row sent to a single target gives the plain ratio `D'_j / D_i`.
pub fn mult_shifts(
    plan: &TransportPlan,
    source: &WeightedDeaths,
    target: &WeightedDeaths,
) -> Result<ShiftSet> {
    if plan.rows != source.len() || plan.cols != target.len() {
        return Err(NiphError::DimensionMismatch {
            expected: plan.rows,
            found: source.len(),
        });
    }
    for d in source.deaths.iter().chain(&target.deaths) {
        if !(*d > 0.0 && d.is_finite()) {
            return Err(NiphError::InvalidInput(format!(
                "death times must be finite and > 0, found {d}"
            )));
        }
    }
    let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); plan.rows];
    for &(i, j, m) in &plan.entries {
        if m > 0.0 {
            by_row[i].push((j, m));
        }
    }
    let mut out = ShiftSet {
        shifts: Vec::new(),
        source_index: Vec::new(),
        dropped: Vec::new(),
    };
    for (i, row) in by_row.iter().enumerate() {
        let mass: f64 = row.iter().map(|(_, m)| m).sum();
        if row.is_empty() || mass <= 0.0 {
            out.dropped.push(i);
            continue;
        }
        let di = source.deaths[i];
        let ms = if let [(j, _)] = row.as_slice() {
            target.deaths[*j] / di
        } else {
            row.iter()
                .map(|&(j, m)| m / mass * (target.deaths[j] / di).ln())
                .sum::<f64>()
                .exp()
        };
        out.shifts.push(ms);
        out.source_index.push(i);
    }
    Ok(out)
}

/// Density of shifts for one probe and its most prominent value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultShiftDiagram {
    pub shifts: Vec<f64>,
    pub weights: Vec<f64>,
    /// `None` when all shifts coincide.
    pub density: Option<DensityCurve>,
    pub peak: f64,
    pub probe: ProbeSpec,
}

impl MultShiftDiagram {
    pub fn weight_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

pub fn shift_diagram(
    shifts: &[f64],
    weights: &[f64],
    probe: &ProbeSpec,
    cfg: &DensityConfig,
) -> Result<MultShiftDiagram> {
    if shifts.is_empty() {
        return Err(NiphError::EmptyDistribution("no shifts".into()));
    }
    if shifts.len() != weights.len() {
        return Err(NiphError::DimensionMismatch {
            expected: shifts.len(),
            found: weights.len(),
        });
    }
    if let Some(s) = shifts.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(NiphError::InvalidInput(format!(
            "shifts must be > 0, found {s}"
        )));
    }
    if weights.iter().all(|w| *w == 0.0) {
        return Err(NiphError::EmptyDistribution(
            "all shift weights are zero".into(),
        ));
    }
    let (density, peak) = density::density_peak(shifts, weights, cfg)?;
    let lo = shifts.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = shifts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let peak = peak.clamp(lo, hi);
    Ok(MultShiftDiagram {
        shifts: shifts.to_vec(),
        weights: weights.to_vec(),
        density,
        peak,
        probe: probe.clone(),
    })
}
