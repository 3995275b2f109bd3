//! Point clouds, the direction-scaled metric family and dense dissimilarity matrices.
//!
//! A probe `(u, alpha)` stretches space by `alpha` along the unit vector `u` and leaves the
//! orthogonal complement untouched. The stretch is `H diag(alpha, 1, ..., 1) H`, where `H` is the
//! Householder reflection exchanging `e1` and `u`; any other orthonormal completion of `u` yields
//! the same linear map.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{NiphError, Result};

/// Default cap on the number of points for which a dense distance matrix is built.
pub const DEFAULT_MAX_MATRIX_POINTS: usize = 20_000;

const UNIT_TOLERANCE: f64 = 1e-12;

/// A finite set of points in `R^n`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    /// Free-form provenance (file name, generator spec, ...).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(Vec::len).unwrap_or(2);
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(NiphError::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(NiphError::InvalidInput(format!(
                "point dimension must be at least 2, got {dim}"
            )));
        }
        if coords.len() % dim != 0 {
            return Err(NiphError::InvalidInput(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().position(|c| !c.is_finite()) {
            return Err(NiphError::InvalidInput(format!(
                "non-finite coordinate in point {}",
                bad / dim
            )));
        }
        Ok(Self {
            dim,
            coords,
            provenance: None,
        })
    }

    pub fn from_xy(points: &[[f64; 2]]) -> Result<Self> {
        Self::from_flat(2, points.iter().flatten().copied().collect())
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = Some(provenance.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Multiplies every coordinate by `c`.
    pub fn scaled_by(&self, c: f64) -> Result<Self> {
        let mut out = Self::from_flat(self.dim, self.coords.iter().map(|v| v * c).collect())?;
        out.provenance = self.provenance.clone();
        Ok(out)
    }

    pub(crate) fn map_points(&self, f: impl Fn(&[f64], &mut [f64]) + Sync) -> Self {
        let dim = self.dim;
        let mut coords = vec![0.0; self.coords.len()];
        coords
            .par_chunks_mut(dim)
            .zip(self.coords.par_chunks(dim))
            .for_each(|(out, p)| f(p, out));
        Self {
            dim,
            coords,
            provenance: self.provenance.clone(),
        }
    }
}

/// Euclidean distance; every distance in the crate goes through this expression.
#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Direction and factor of a metric deformation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    direction: Vec<f64>,
    factor: f64,
}

impl ProbeSpec {
    pub fn new(direction: Vec<f64>, factor: f64) -> Result<Self> {
        if direction.len() < 2 {
            return Err(NiphError::InvalidProbe(format!(
                "direction must have at least 2 components, got {}",
                direction.len()
            )));
        }
        if direction.iter().any(|c| !c.is_finite()) {
            return Err(NiphError::InvalidProbe("non-finite direction".into()));
        }
        let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(NiphError::InvalidProbe(format!(
                "direction must be a unit vector, norm is {norm}"
            )));
        }
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(NiphError::InvalidProbe(format!(
                "scaling factor must be finite and > 0, got {factor}"
            )));
        }
        Ok(Self { direction, factor })
    }

    /// Planar probe from an angle; the angle is canonicalized to `[0, pi)`.
    pub fn from_angle(angle: f64, factor: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(NiphError::InvalidProbe("non-finite angle".into()));
        }
        let psi = canonical_angle(angle);
        let (s, c) = psi.sin_cos();
        // cos/sin of the same argument are unit to within a couple of ulps
        let norm = (c * c + s * s).sqrt();
        Self::new(vec![c / norm, s / norm], factor)
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    /// Planar angle of the direction in `[0, pi)`.
    pub fn angle(&self) -> Option<f64> {
        (self.dim() == 2).then(|| canonical_angle(self.direction[1].atan2(self.direction[0])))
    }

    /// Orthonormal basis whose first row is the probe direction, from one Householder reflection.
    pub fn householder_basis(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let u = &self.direction;
        // v = u + sign(u0) e1 avoids cancellation; the reflection sends e1 to -sign(u0) u
        let sign = if u[0] >= 0.0 { 1.0 } else { -1.0 };
        let mut v = u.clone();
        v[0] += sign;
        let vv: f64 = v.iter().map(|c| c * c).sum();
        (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let id = if r == c { 1.0 } else { 0.0 };
                        let h = id - 2.0 * v[r] * v[c] / vv;
                        if r == 0 {
                            -sign * h
                        } else {
                            h
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// The linear map `S_{u,alpha}` as a row-major `n x n` matrix.
    pub fn scaling_matrix(&self) -> Vec<f64> {
        scaling_matrix_in_basis(&self.householder_basis(), self.factor)
    }
}

/// `B^T diag(alpha, 1, ..., 1) B` for an orthonormal basis given as rows of `B`.
pub fn scaling_matrix_in_basis(basis: &[Vec<f64>], alpha: f64) -> Vec<f64> {
    let n = basis.len();
    let mut m = vec![0.0; n * n];
    for (k, row) in basis.iter().enumerate() {
        let scale = if k == 0 { alpha } else { 1.0 };
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] += scale * row[i] * row[j];
            }
        }
    }
    m
}

/// Angle reduced to `[0, pi)`.
pub fn canonical_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(PI);
    if a >= PI {
        0.0
    } else {
        a
    }
}

fn apply(m: &[f64], n: usize, x: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = m[i * n..(i + 1) * n]
            .iter()
            .zip(x)
            .map(|(a, b)| a * b)
            .sum();
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(NiphError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Applies `S_{u,alpha}` to every point.
pub fn scale_points(cloud: &PointCloud, probe: &ProbeSpec) -> Result<PointCloud> {
    check_dim(probe.dim(), cloud.dim())?;
    if cloud.is_empty() {
        return Err(NiphError::InvalidInput("empty point cloud".into()));
    }
    if probe.factor() == 1.0 {
        return Ok(cloud.clone());
    }
    let n = cloud.dim();
    let m = probe.scaling_matrix();
    Ok(cloud.map_points(|p, out| apply(&m, n, p, out)))
}

pub fn anisotropic_distance(x: &[f64], y: &[f64], probe: &ProbeSpec) -> Result<f64> {
    check_dim(probe.dim(), x.len())?;
    check_dim(probe.dim(), y.len())?;
    if probe.factor() == 1.0 {
        return Ok(euclidean(x, y));
    }
    let n = probe.dim();
    let m = probe.scaling_matrix();
    let mut sx = vec![0.0; n];
    let mut sy = vec![0.0; n];
    apply(&m, n, x, &mut sx);
    apply(&m, n, y, &mut sy);
    Ok(euclidean(&sx, &sy))
}

/// Rotates a planar cloud counter-clockwise by `theta`.
pub fn rotate_cloud(cloud: &PointCloud, theta: f64) -> Result<PointCloud> {
    if cloud.dim() != 2 {
        return Err(NiphError::DimensionMismatch {
            expected: 2,
            found: cloud.dim(),
        });
    }
    let (s, c) = theta.sin_cos();
    Ok(cloud.map_points(|p, out| {
        out[0] = c * p[0] - s * p[1];
        out[1] = s * p[0] + c * p[1];
    }))
}

/// Dense symmetric dissimilarity matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DissimilarityMatrix {
    /// Validates symmetry, zero diagonal, finiteness and nonnegativity.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in &rows {
            check_dim(n, row.len())?;
            data.extend_from_slice(row);
        }
        let m = Self { n, data };
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(NiphError::InvalidInput(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let d = m.get(i, j);
                if !d.is_finite() || d < 0.0 {
                    return Err(NiphError::InvalidInput(format!(
                        "entry ({i},{j}) = {d} is not a finite nonnegative value"
                    )));
                }
                if d != m.get(j, i) {
                    return Err(NiphError::InvalidInput(format!(
                        "matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(m)
    }

    pub(crate) fn from_upper(n: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Self {
        let mut data = vec![0.0; n * n];
        data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = match i.cmp(&j) {
                    std::cmp::Ordering::Less => f(i, j),
                    std::cmp::Ordering::Greater => f(j, i),
                    std::cmp::Ordering::Equal => 0.0,
                };
            }
        });
        Self { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

pub fn distance_matrix(
    cloud: &PointCloud,
    probe: Option<&ProbeSpec>,
) -> Result<DissimilarityMatrix> {
    distance_matrix_capped(cloud, probe, DEFAULT_MAX_MATRIX_POINTS)
}

/// Dense matrix of `d_{u,alpha}` (Euclidean when `probe` is `None`), refusing clouds over `max_points`.
pub fn distance_matrix_capped(
    cloud: &PointCloud,
    probe: Option<&ProbeSpec>,
    max_points: usize,
) -> Result<DissimilarityMatrix> {
    let n = cloud.len();
    if n < 2 {
        return Err(NiphError::Degenerate(format!(
            "distance matrix needs at least 2 points, got {n}"
        )));
    }
    if n > max_points {
        return Err(NiphError::TooManyPoints(n, max_points));
    }
    let scaled;
    let pts = match probe {
        Some(p) => {
            scaled = scale_points(cloud, p)?;
            &scaled
        }
        None => cloud,
    };
    Ok(DissimilarityMatrix::from_upper(n, |i, j| {
        euclidean(pts.point(i), pts.point(j))
    }))
}

/// Bandwidth parameter of the density-rescaled dissimilarity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutlierSpec {
    pub delta: f64,
}

/// Local density weights `mu_delta(x) = f_delta(x) |X| / sum_y f_delta(y)`.
///
/// Computed in log space: for small `delta` the Gaussian sums underflow long before the ratios
/// stop being meaningful.
pub fn outlier_weights(dist: &DissimilarityMatrix, spec: OutlierSpec) -> Result<Vec<f64>> {
    if !(spec.delta > 0.0 && spec.delta.is_finite()) {
        return Err(NiphError::InvalidInput(format!(
            "outlier bandwidth must be > 0, got {}",
            spec.delta
        )));
    }
    let n = dist.len();
    if n < 2 {
        return Err(NiphError::Degenerate(
            "outlier metric needs at least 2 points".into(),
        ));
    }
    let log_f: Vec<f64> = (0..n)
        .map(|i| {
            let terms = (0..n).filter(|&j| j != i).map(|j| {
                let d = dist.get(i, j);
                -d * d / spec.delta
            });
            log_sum_exp(terms)
        })
        .collect();
    Ok(log_mu(&log_f).into_iter().map(f64::exp).collect())
}

/// `ln mu` from `ln f`, shifted by the maximum so equal densities give exactly 1.
fn log_mu(log_f: &[f64]) -> Vec<f64> {
    let max = log_f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = log_f.iter().map(|v| v - max).collect();
    let log_total = shifted.iter().map(|v| v.exp()).sum::<f64>().ln();
    let log_n = (log_f.len() as f64).ln();
    shifted.iter().map(|v| v - log_total + log_n).collect()
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `d_mu(x, y) = 2 d(x, y) / (mu(x) + mu(y))` over the Euclidean distances of `cloud`.
///
/// Pairs of isolated points at tiny `delta` saturate at `f64::MAX` instead of overflowing.
pub fn outlier_dissimilarity(cloud: &PointCloud, spec: OutlierSpec) -> Result<DissimilarityMatrix> {
    let base = distance_matrix(cloud, None)?;
    // validates delta and size
    outlier_weights(&base, spec)?;
    let n = base.len();
    let log_f: Vec<f64> = (0..n)
        .map(|i| {
            log_sum_exp((0..n).filter(|&j| j != i).map(|j| {
                let d = base.get(i, j);
                -d * d / spec.delta
            }))
        })
        .collect();
    let lmu = log_mu(&log_f);
    Ok(DissimilarityMatrix::from_upper(n, |i, j| {
        let d = base.get(i, j);
        if d == 0.0 {
            return 0.0;
        }
        let (a, b) = (lmu[i].max(lmu[j]), lmu[i].min(lmu[j]));
        let log_sum = a + (b - a).exp().ln_1p();
        let v = (2.0 * d).ln() - log_sum;
        if v >= f64::MAX.ln() {
            f64::MAX
        } else {
            v.exp()
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(pts: &[[f64; 2]]) -> PointCloud {
        PointCloud::from_xy(pts).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn scale_points_examples() {
        let x = cloud(&[[0.0, 0.0], [1.0, 1.0]]);
        let id = scale_points(&x, &ProbeSpec::new(vec![1.0, 0.0], 1.0).unwrap()).unwrap();
        assert_eq!(id.coords(), x.coords());
        let sx = scale_points(&x, &ProbeSpec::new(vec![1.0, 0.0], 2.0).unwrap()).unwrap();
        assert!(close(sx.coords(), &[0.0, 0.0, 2.0, 1.0], 1e-15));
        let sy = scale_points(&x, &ProbeSpec::new(vec![0.0, 1.0], 2.0).unwrap()).unwrap();
        assert!(close(sy.coords(), &[0.0, 0.0, 1.0, 2.0], 1e-15));
    }

    #[test]
    fn probe_validation() {
        assert!(matches!(
            ProbeSpec::new(vec![1.0, 1.0], 2.0),
            Err(NiphError::InvalidProbe(_))
        ));
        assert!(ProbeSpec::new(vec![1.0, 0.0], 0.0).is_err());
        assert!(ProbeSpec::new(vec![1.0, 0.0], -1.0).is_err());
        assert!(ProbeSpec::new(vec![1.0], 2.0).is_err());
        let p = ProbeSpec::from_angle(PI + 0.25, 2.0).unwrap();
        assert!((p.angle().unwrap() - 0.25).abs() < 1e-12);
        let q = ProbeSpec::from_angle(-0.25, 2.0).unwrap();
        assert!((q.angle().unwrap() - (PI - 0.25)).abs() < 1e-12);
    }

    #[test]
    fn anisotropic_distance_examples() {
        let e1 = ProbeSpec::new(vec![1.0, 0.0], 1.0).unwrap();
        assert_eq!(
            anisotropic_distance(&[0.0, 0.0], &[1.0, 1.0], &e1).unwrap(),
            2f64.sqrt()
        );
        let e2 = ProbeSpec::new(vec![1.0, 0.0], 2.0).unwrap();
        let d = anisotropic_distance(&[0.0, 0.0], &[1.0, 1.0], &e2).unwrap();
        assert!((d - 5f64.sqrt()).abs() < 1e-15);
        let e7 = ProbeSpec::new(vec![1.0, 0.0], 7.0).unwrap();
        let d = anisotropic_distance(&[0.0, 0.0], &[0.0, 3.0], &e7).unwrap();
        assert!((d - 3.0).abs() < 1e-15);
        assert!(matches!(
            anisotropic_distance(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &e7),
            Err(NiphError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn distance_matrix_examples() {
        let m = distance_matrix(&cloud(&[[0.0, 0.0], [3.0, 4.0]]), None).unwrap();
        assert_eq!(m.row(0), &[0.0, 5.0]);
        assert_eq!(m.row(1), &[5.0, 0.0]);

        let x = cloud(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let p = ProbeSpec::new(vec![1.0, 0.0], 2.0).unwrap();
        let m = distance_matrix(&x, Some(&p)).unwrap();
        assert!((m.get(0, 1) - 2.0).abs() < 1e-15);
        assert!((m.get(0, 2) - 1.0).abs() < 1e-15);
        assert!((m.get(1, 2) - 5f64.sqrt()).abs() < 1e-15);

        let id = ProbeSpec::from_angle(0.7, 1.0).unwrap();
        assert_eq!(
            distance_matrix(&x, Some(&id)).unwrap(),
            distance_matrix(&x, None).unwrap()
        );
    }

    #[test]
    fn distance_matrix_cap_and_degenerate() {
        let x = cloud(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        assert!(matches!(
            distance_matrix_capped(&x, None, 2),
            Err(NiphError::TooManyPoints(3, 2))
        ));
        assert!(distance_matrix(&cloud(&[[0.0, 0.0]]), None).is_err());
    }

    #[test]
    fn rotation_examples() {
        let r = rotate_cloud(&cloud(&[[1.0, 0.0]]), PI / 2.0).unwrap();
        assert!(close(r.coords(), &[0.0, 1.0], 1e-15));
        let r = rotate_cloud(&cloud(&[[1.0, 0.0]]), PI / 4.0).unwrap();
        let h = 2f64.sqrt() / 2.0;
        assert!(close(r.coords(), &[h, h], 1e-15));
        let r = rotate_cloud(&cloud(&[[2.0, 1.0]]), PI).unwrap();
        assert!(close(r.coords(), &[-2.0, -1.0], 1e-15));
        let x3 = PointCloud::new(vec![vec![1.0, 0.0, 0.0]]).unwrap();
        assert!(rotate_cloud(&x3, 1.0).is_err());
    }

    #[test]
    fn outlier_two_points_is_euclidean() {
        for delta in [0.01, 1.0, 100.0] {
            let m = outlier_dissimilarity(&cloud(&[[0.0, 0.0], [1.0, 0.0]]), OutlierSpec { delta })
                .unwrap();
            assert!((m.get(0, 1) - 1.0).abs() < 1e-15, "{delta} {}", m.get(0, 1));
        }
    }

    #[test]
    fn outlier_line_matches_direct_formula() {
        // Direct evaluation of f_delta, mu_delta and d_mu on {0, 1, 10}, delta = 1.
        let xs = [0.0f64, 1.0, 10.0];
        let f: Vec<f64> = (0..3)
            .map(|i| {
                (0..3)
                    .filter(|&j| j != i)
                    .map(|j| (-(xs[i] - xs[j]).powi(2)).exp())
                    .sum()
            })
            .collect();
        let total: f64 = f.iter().sum();
        let mu: Vec<f64> = f.iter().map(|v| v * 3.0 / total).collect();
        let x = cloud(&[[0.0, 0.0], [1.0, 0.0], [10.0, 0.0]]);
        let m = outlier_dissimilarity(&x, OutlierSpec { delta: 1.0 }).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j {
                    0.0
                } else {
                    2.0 * (xs[i] - xs[j]).abs() / (mu[i] + mu[j])
                };
                assert!((m.get(i, j) - expect).abs() < 1e-12 * expect.max(1.0));
            }
        }
        // the isolated point at 10 is pushed away, the dense pair pulled together
        assert!(m.get(0, 1) < 1.0);
        assert!(m.get(1, 2) > 9.0);
    }

    #[test]
    fn outlier_wide_bandwidth_recovers_euclidean() {
        let x = cloud(&[[0.0, 0.0], [1.0, 0.3], [4.0, -2.0], [0.5, 7.0], [3.0, 3.0]]);
        let base = distance_matrix(&x, None).unwrap();
        let m = outlier_dissimilarity(&x, OutlierSpec { delta: 1e12 }).unwrap();
        for i in 0..x.len() {
            for j in 0..x.len() {
                assert!((m.get(i, j) - base.get(i, j)).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn outlier_narrow_bandwidth_stays_finite() {
        let x = cloud(&[[0.0, 0.0], [1.0, 0.3], [4.0, -2.0], [0.5, 7.0]]);
        let m = outlier_dissimilarity(&x, OutlierSpec { delta: 1e-8 }).unwrap();
        assert!((0..4).all(|i| (0..4).all(|j| m.get(i, j).is_finite() && m.get(i, j) >= 0.0)));
        assert!(outlier_dissimilarity(&x, OutlierSpec { delta: 0.0 }).is_err());
    }

    #[test]
    fn matrix_validation() {
        assert!(DissimilarityMatrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(DissimilarityMatrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 0.0]]).is_err());
        assert!(DissimilarityMatrix::from_rows(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
        assert!(DissimilarityMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).is_ok());
    }

    #[test]
    fn householder_basis_near_axis() {
        let t: f64 = 8.79e-4;
        for dir in [
            vec![t.cos(), t.sin()],
            vec![-t.cos(), t.sin()],
            vec![1.0, 0.0],
        ] {
            let b = ProbeSpec::new(dir.clone(), 2.0)
                .unwrap()
                .householder_basis();
            assert_eq!(b[0].len(), 2);
            assert!((b[0][0] - dir[0]).abs() < 1e-15 && (b[0][1] - dir[1]).abs() < 1e-15);
            for r in 0..2 {
                for c in 0..2 {
                    let dot: f64 = (0..2).map(|k| b[r][k] * b[c][k]).sum();
                    let id = if r == c { 1.0 } else { 0.0 };
                    assert!((dot - id).abs() < 1e-15, "{dot}");
                }
            }
        }
    }
}
