//! Seeded generators for rotated grids and fields of oriented shapes.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{NiphError, Result};
use crate::geometry::{rotate_cloud, PointCloud};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    /// Independent uniform noise in `[-bound, bound]` per coordinate.
    #[default]
    Uniform,
    /// Independent normal noise with standard deviation `bound` per coordinate.
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n1: usize,
    pub n2: usize,
    pub d1: f64,
    pub d2: f64,
    pub phi: f64,
    pub noise_bound: f64,
    #[serde(default)]
    pub noise: NoiseModel,
    pub seed: u64,
}

impl GridSpec {
    pub fn clean(n1: usize, n2: usize, d1: f64, d2: f64, phi: f64) -> Self {
        Self {
            n1,
            n2,
            d1,
            d2,
            phi,
            noise_bound: 0.0,
            noise: NoiseModel::Uniform,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 < 2 || self.n2 < 2 {
            return Err(NiphError::InvalidInput(format!(
                "grid counts must exceed 1, got {} x {}",
                self.n1, self.n2
            )));
        }
        // d1 == d2 is accepted for plain square lattices; the shift guarantees need d1 < d2
        if !(self.d1 > 0.0 && self.d1 <= self.d2 && self.d2.is_finite()) {
            return Err(NiphError::InvalidInput(format!(
                "grid spacings must satisfy 0 < d1 <= d2, got d1 = {}, d2 = {}",
                self.d1, self.d2
            )));
        }
        if !(self.noise_bound >= 0.0 && self.noise_bound.is_finite()) || !self.phi.is_finite() {
            return Err(NiphError::InvalidInput("noise bound must be >= 0".into()));
        }
        Ok(())
    }

    /// Whether the separation hypothesis `d1 + delta < d2 - delta` of the noisy-grid bound holds.
    pub fn noise_separated(&self) -> bool {
        self.d1 + self.noise_bound < self.d2 - self.noise_bound
    }
}

/// Points `(i d1, j d2)`, perturbed per coordinate, then rotated by `phi`.
pub fn gen_grid(spec: &GridSpec) -> Result<PointCloud> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, spec.noise_bound.max(f64::MIN_POSITIVE))
        .map_err(|e| NiphError::InvalidInput(e.to_string()))?;
    let mut coords = Vec::with_capacity(spec.n1 * spec.n2 * 2);
    for j in 0..spec.n2 {
        for i in 0..spec.n1 {
            let mut p = [i as f64 * spec.d1, j as f64 * spec.d2];
            if spec.noise_bound > 0.0 {
                for c in &mut p {
                    *c += match spec.noise {
                        NoiseModel::Uniform => {
                            rng.random_range(-spec.noise_bound..=spec.noise_bound)
                        }
                        NoiseModel::Gaussian => normal.sample(&mut rng),
                    };
                }
            }
            coords.extend_from_slice(&p);
        }
    }
    let grid = PointCloud::from_flat(2, coords)?;
    let mut out = if spec.phi == 0.0 {
        grid
    } else {
        rotate_cloud(&grid, spec.phi)?
    };
    out.provenance = Some(format!(
        "grid {}x{} d1={} d2={} phi={} noise={} seed={}",
        spec.n1, spec.n2, spec.d1, spec.d2, spec.phi, spec.noise_bound, spec.seed
    ));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Ellipse,
    Rectangle,
    Circle,
}

impl std::str::FromStr for ShapeKind {
    type Err = NiphError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ellipse" => Ok(Self::Ellipse),
            "rectangle" | "rect" => Ok(Self::Rectangle),
            "circle" => Ok(Self::Circle),
            other => Err(NiphError::InvalidInput(format!("unknown shape `{other}`"))),
        }
    }
}

/// A field of randomly placed shapes sharing a mean orientation.
///
/// For ellipses and circles the short-axis length is the short semi-axis; for rectangles it is
/// the short side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeFieldSpec {
    pub count: usize,
    pub phi: f64,
    /// Variance (rad^2) of the per-shape orientation perturbation.
    pub var: f64,
    /// Long axis over short axis.
    pub s: f64,
    pub size_range: (f64, f64),
    pub points_per_shape: usize,
    /// Side of the square `[-region/2, region/2]^2` holding the centers.
    pub region: f64,
    pub shape: ShapeKind,
    pub seed: u64,
}

impl Default for ShapeFieldSpec {
    fn default() -> Self {
        Self {
            count: 200,
            phi: 0.0,
            var: 0.0,
            s: 2.0,
            size_range: (0.2, 2.0),
            points_per_shape: 100,
            region: 3000.0,
            shape: ShapeKind::Ellipse,
            seed: 0,
        }
    }
}

impl ShapeFieldSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(NiphError::InvalidInput(m));
        if self.count == 0 {
            return bad("shape count must be >= 1".into());
        }
        if !(self.s >= 1.0 && self.s.is_finite()) {
            return bad(format!("scaling factor must be >= 1, got {}", self.s));
        }
        if !(self.var >= 0.0 && self.var.is_finite()) {
            return bad(format!(
                "orientational variance must be >= 0, got {}",
                self.var
            ));
        }
        let (lo, hi) = self.size_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return bad(format!(
                "size range must satisfy 0 < low <= high, got ({lo}, {hi})"
            ));
        }
        if self.points_per_shape == 0 {
            return bad("points per shape must be >= 1".into());
        }
        if !(self.region >= 0.0 && self.region.is_finite()) || !self.phi.is_finite() {
            return bad("region side must be >= 0".into());
        }
        if self.shape == ShapeKind::Circle && self.s != 1.0 {
            return bad("circles require s = 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeInstance {
    pub center: [f64; 2],
    pub orientation: f64,
    pub short_axis: f64,
    pub long_axis: f64,
}

#[derive(Debug, Clone)]
pub struct ShapeField {
    pub cloud: PointCloud,
    pub shapes: Vec<ShapeInstance>,
}

/// splitmix64 finalizer; decorrelates per-shape streams derived from one seed.
pub(crate) fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gen_shape_field(spec: &ShapeFieldSpec) -> Result<PointCloud> {
    Ok(gen_shape_field_detailed(spec)?.cloud)
}

/// Like [`gen_shape_field`], also returning the drawn per-shape parameters.
pub fn gen_shape_field_detailed(spec: &ShapeFieldSpec) -> Result<ShapeField> {
    spec.validate()?;
    let sd = spec.var.sqrt();
    let per_shape: Vec<(ShapeInstance, Vec<f64>)> = (0..spec.count)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(spec.seed, k as u64));
            let half = spec.region / 2.0;
            let center = [
                half * (2.0 * rng.random::<f64>() - 1.0),
                half * (2.0 * rng.random::<f64>() - 1.0),
            ];
            let noise = if sd > 0.0 {
                sd * rng.sample::<f64, _>(rand_distr::StandardNormal)
            } else {
                0.0
            };
            let orientation = spec.phi + noise;
            let (lo, hi) = spec.size_range;
            let short_axis = if hi > lo {
                rng.random_range(lo..hi)
            } else {
                lo
            };
            let shape = ShapeInstance {
                center,
                orientation,
                short_axis,
                long_axis: spec.s * short_axis,
            };
            let pts = sample_boundary(&shape, spec.shape, spec.points_per_shape, &mut rng);
            (shape, pts)
        })
        .collect();
    let mut coords = Vec::with_capacity(spec.count * spec.points_per_shape * 2);
    let mut shapes = Vec::with_capacity(spec.count);
    for (shape, pts) in per_shape {
        coords.extend(pts);
        shapes.push(shape);
    }
    let cloud = PointCloud::from_flat(2, coords)?.with_provenance(format!(
        "{:?} field count={} phi={} var={} s={} seed={}",
        spec.shape, spec.count, spec.phi, spec.var, spec.s, spec.seed
    ));
    Ok(ShapeField { cloud, shapes })
}

fn sample_boundary(
    shape: &ShapeInstance,
    kind: ShapeKind,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let (s, c) = shape.orientation.sin_cos();
    let l = shape.long_axis;
    let w = shape.short_axis;
    let mut out = Vec::with_capacity(count * 2);
    for _ in 0..count {
        // local frame: x along the long axis
        let (x, y) = match kind {
            ShapeKind::Ellipse | ShapeKind::Circle => {
                let t = rng.random::<f64>() * TAU;
                (l * t.cos(), w * t.sin())
            }
            ShapeKind::Rectangle => {
                let perimeter = 2.0 * (l + w);
                let mut u = rng.random::<f64>() * perimeter;
                if u < l {
                    (u - l / 2.0, -w / 2.0)
                } else {
                    u -= l;
                    if u < w {
                        (l / 2.0, u - w / 2.0)
                    } else {
                        u -= w;
                        if u < l {
                            (l / 2.0 - u, w / 2.0)
                        } else {
                            u -= l;
                            (-l / 2.0, w / 2.0 - u)
                        }
                    }
                }
            }
        };
        out.push(shape.center[0] + c * x - s * y);
        out.push(shape.center[1] + s * x + c * y);
    }
    out
}

/// Axial (mod pi) circular mean of weighted angles.
pub fn axial_mean(angles: &[f64], weights: Option<&[f64]>) -> f64 {
    let (mut sx, mut sy) = (0.0, 0.0);
    for (k, a) in angles.iter().enumerate() {
        let w = weights.map_or(1.0, |w| w[k]);
        sx += w * (2.0 * a).cos();
        sy += w * (2.0 * a).sin();
    }
    (0.5 * sy.atan2(sx)).rem_euclid(PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::euclidean;

    #[test]
    fn unit_grid() {
        let g = gen_grid(&GridSpec::clean(2, 2, 1.0, 1.0, 0.0)).unwrap();
        assert_eq!(g.coords(), &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert!(gen_grid(&GridSpec::clean(2, 2, 2.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn grid_nearest_neighbour_and_gaps() {
        let g = gen_grid(&GridSpec::clean(3, 2, 1.0, 2.0, 0.0)).unwrap();
        assert_eq!(g.len(), 6);
        let mut nn = f64::INFINITY;
        let mut gaps = Vec::new();
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                let d = euclidean(g.point(i), g.point(j));
                nn = nn.min(d);
                let dx = (g.point(i)[0] - g.point(j)[0]).abs();
                let dy = (g.point(i)[1] - g.point(j)[1]).abs();
                if (dx == 0.0) != (dy == 0.0) {
                    gaps.push(d);
                }
            }
        }
        assert_eq!(nn, 1.0);
        let mut adjacent: Vec<f64> = gaps.into_iter().filter(|&d| d <= 2.0).collect();
        adjacent.sort_by(f64::total_cmp);
        adjacent.dedup();
        assert_eq!(adjacent, vec![1.0, 2.0]);
    }

    #[test]
    fn grid_rotation_composes() {
        let mut spec = GridSpec::clean(4, 3, 1.0, 2.5, 0.0);
        let flat = gen_grid(&spec).unwrap();
        spec.phi = PI / 2.0;
        let rotated = gen_grid(&spec).unwrap();
        assert_eq!(
            rotated.coords(),
            rotate_cloud(&flat, PI / 2.0).unwrap().coords()
        );
    }

    #[test]
    fn grid_noise_is_bounded_and_seeded() {
        let spec = GridSpec {
            noise_bound: 0.05,
            seed: 9,
            ..GridSpec::clean(5, 4, 1.0, 2.0, 0.0)
        };
        let a = gen_grid(&spec).unwrap();
        let b = gen_grid(&spec).unwrap();
        assert_eq!(a.coords(), b.coords());
        let clean = gen_grid(&GridSpec::clean(5, 4, 1.0, 2.0, 0.0)).unwrap();
        for (x, y) in a.coords().iter().zip(clean.coords()) {
            assert!((x - y).abs() <= 0.05);
        }
        let other = gen_grid(&GridSpec { seed: 10, ..spec }).unwrap();
        assert_ne!(a.coords(), other.coords());
    }

    #[test]
    fn single_circle_has_unit_radius() {
        let spec = ShapeFieldSpec {
            count: 1,
            s: 1.0,
            size_range: (1.0, 1.0),
            region: 0.0,
            shape: ShapeKind::Circle,
            points_per_shape: 200,
            ..Default::default()
        };
        let c = gen_shape_field(&spec).unwrap();
        for p in c.points() {
            assert!((euclidean(p, &[0.0, 0.0]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rectangle_extents() {
        let spec = ShapeFieldSpec {
            count: 1,
            s: 2.0,
            size_range: (1.0, 1.0),
            region: 0.0,
            shape: ShapeKind::Rectangle,
            points_per_shape: 2000,
            ..Default::default()
        };
        let r = gen_shape_field(&spec).unwrap();
        let xs: Vec<f64> = r.points().map(|p| p[0]).collect();
        let ys: Vec<f64> = r.points().map(|p| p[1]).collect();
        let extent = |v: &[f64]| {
            v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - v.iter().cloned().fold(f64::INFINITY, f64::min)
        };
        assert!(extent(&xs) <= 2.0 + 1e-12 && extent(&xs) > 1.99);
        assert!(extent(&ys) <= 1.0 + 1e-12 && extent(&ys) > 0.99);
        // every point lies on the boundary
        for p in r.points() {
            let on_x = (p[0].abs() - 1.0).abs() < 1e-12;
            let on_y = (p[1].abs() - 0.5).abs() < 1e-12;
            assert!(on_x || on_y);
        }
    }

    #[test]
    fn full_size_field_count() {
        let c = gen_shape_field(&ShapeFieldSpec::default()).unwrap();
        assert_eq!(c.len(), 20_000);
    }

    #[test]
    fn field_is_deterministic() {
        let spec = ShapeFieldSpec {
            count: 20,
            var: 0.1,
            seed: 3,
            ..Default::default()
        };
        let a = gen_shape_field(&spec).unwrap();
        let b = gen_shape_field(&spec).unwrap();
        assert_eq!(a.coords(), b.coords());
    }

    #[test]
    fn orientation_statistics() {
        let spec = ShapeFieldSpec {
            count: 10_000,
            phi: 0.7,
            var: 0.04,
            points_per_shape: 1,
            seed: 11,
            ..Default::default()
        };
        let field = gen_shape_field_detailed(&spec).unwrap();
        let angles: Vec<f64> = field.shapes.iter().map(|s| s.orientation).collect();
        assert!((axial_mean(&angles, None) - 0.7).abs() < 0.01);
        let var = angles.iter().map(|a| (a - 0.7).powi(2)).sum::<f64>() / angles.len() as f64;
        assert!((var - 0.04).abs() < 0.003, "variance {var}");
    }

    #[test]
    fn invalid_specs() {
        let ok = ShapeFieldSpec::default();
        assert!(ShapeFieldSpec {
            s: 0.5,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(ShapeFieldSpec {
            var: -1.0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(ShapeFieldSpec {
            count: 0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(ShapeFieldSpec {
            size_range: (0.0, 1.0),
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(ShapeFieldSpec {
            shape: ShapeKind::Circle,
            ..ok
        }
        .validate()
        .is_err());
        assert!(gen_grid(&GridSpec::clean(1, 3, 1.0, 2.0, 0.0)).is_err());
    }
}
