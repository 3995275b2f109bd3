//! Road networks from GeoJSON line features and length-proportional point sampling.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{NiphError, Result};
use crate::geometry::PointCloud;

/// Mean Earth radius in metres.
pub const EARTH_RADIUS: f64 = 6_371_008.8;

/// Origin of the equirectangular projection applied to lon/lat input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub lon0: f64,
    pub lat0: f64,
}

impl Projection {
    pub fn project(&self, lon: f64, lat: f64) -> [f64; 2] {
        let k = self.lat0.to_radians().cos();
        [
            EARTH_RADIUS * (lon - self.lon0).to_radians() * k,
            EARTH_RADIUS * (lat - self.lat0).to_radians(),
        ]
    }
}

/// Planar polylines with an optional road-type tag each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineNetwork {
    pub segments: Vec<Vec<[f64; 2]>>,
    pub tags: Vec<Option<String>>,
    /// Set when the input looked like lon/lat and was projected.
    pub projection: Option<Projection>,
}

impl LineNetwork {
    pub fn new(segments: Vec<Vec<[f64; 2]>>, tags: Vec<Option<String>>) -> Result<Self> {
        if segments.len() != tags.len() {
            return Err(NiphError::DimensionMismatch {
                expected: segments.len(),
                found: tags.len(),
            });
        }
        for (k, s) in segments.iter().enumerate() {
            if s.len() < 2 {
                return Err(NiphError::InvalidInput(format!(
                    "polyline {k} has {} vertices, at least 2 needed",
                    s.len()
                )));
            }
            if s.iter().flatten().any(|c| !c.is_finite()) {
                return Err(NiphError::InvalidInput(format!(
                    "polyline {k} has non-finite coordinates"
                )));
            }
        }
        Ok(Self {
            segments,
            tags,
            projection: None,
        })
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn polyline_length(&self, k: usize) -> f64 {
        self.segments[k]
            .windows(2)
            .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
            .sum()
    }

    /// Whether polyline `k` passes the road-type filter; an empty filter keeps everything.
    pub fn matches(&self, k: usize, filter: &[String]) -> bool {
        filter.is_empty()
            || self.tags[k]
                .as_deref()
                .is_some_and(|t| filter.iter().any(|f| f == t))
    }
}

fn coords_of(v: &Value, what: &str) -> Result<Vec<[f64; 2]>> {
    let arr = v
        .as_array()
        .ok_or_else(|| NiphError::InvalidInput(format!("{what}: coordinates must be an array")))?;
    arr.iter()
        .map(|p| {
            let xy = p.as_array().filter(|a| a.len() >= 2).ok_or_else(|| {
                NiphError::InvalidInput(format!("{what}: each position needs 2 numbers"))
            })?;
            match (xy[0].as_f64(), xy[1].as_f64()) {
                (Some(x), Some(y)) => Ok([x, y]),
                _ => Err(NiphError::InvalidInput(format!(
                    "{what}: non-numeric position"
                ))),
            }
        })
        .collect()
}

fn collect_geometry(
    geom: &Value,
    tag: &Option<String>,
    out: &mut Vec<(Vec<[f64; 2]>, Option<String>)>,
) -> Result<()> {
    let kind = geom.get("type").and_then(Value::as_str).unwrap_or("");
    match kind {
        "LineString" => out.push((coords_of(&geom["coordinates"], "LineString")?, tag.clone())),
        "MultiLineString" => {
            let parts = geom["coordinates"].as_array().ok_or_else(|| {
                NiphError::InvalidInput("MultiLineString: coordinates must be an array".into())
            })?;
            for part in parts {
                out.push((coords_of(part, "MultiLineString")?, tag.clone()));
            }
        }
        "GeometryCollection" => {
            if let Some(gs) = geom.get("geometries").and_then(Value::as_array) {
                for g in gs {
                    collect_geometry(g, tag, out)?;
                }
            }
        }
        // points and areas carry no road length
        _ => {}
    }
    Ok(())
}

/// Parses a FeatureCollection (or single Feature) of LineString/MultiLineString geometries.
///
/// The road type is read from `properties.highway`. Inputs whose coordinates all lie within
/// `[-180, 180]` are taken as lon/lat and projected equirectangularly around their centroid.
pub fn parse_geojson(text: &str) -> Result<LineNetwork> {
    let root: Value = serde_json::from_str(text)?;
    let features: Vec<&Value> = match root.get("type").and_then(Value::as_str) {
        Some("FeatureCollection") => root
            .get("features")
            .and_then(Value::as_array)
            .ok_or_else(|| NiphError::InvalidInput("FeatureCollection without features".into()))?
            .iter()
            .collect(),
        Some("Feature") => vec![&root],
        other => {
            return Err(NiphError::InvalidInput(format!(
                "expected a GeoJSON FeatureCollection, found type {other:?}"
            )))
        }
    };
    let mut lines = Vec::new();
    for f in features {
        let tag = f
            .get("properties")
            .and_then(|p| p.get("highway"))
            .and_then(Value::as_str)
            .map(str::to_owned);
        if let Some(g) = f.get("geometry").filter(|g| !g.is_null()) {
            collect_geometry(g, &tag, &mut lines)?;
        }
    }
    lines.retain(|(c, _)| c.len() >= 2);
    if lines.is_empty() {
        return Err(NiphError::EmptyDistribution(
            "no line geometries in GeoJSON".into(),
        ));
    }
    let geographic = lines
        .iter()
        .flat_map(|(c, _)| c.iter())
        .all(|p| p[0].abs() <= 180.0 && p[1].abs() <= 90.0);
    let projection = if geographic {
        let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
        for p in lines.iter().flat_map(|(c, _)| c.iter()) {
            sx += p[0];
            sy += p[1];
            n += 1;
        }
        let proj = Projection {
            lon0: sx / n as f64,
            lat0: sy / n as f64,
        };
        for (c, _) in &mut lines {
            for p in c.iter_mut() {
                *p = proj.project(p[0], p[1]);
            }
        }
        Some(proj)
    } else {
        None
    };
    let (segments, tags) = lines.into_iter().unzip();
    let mut net = LineNetwork::new(segments, tags)?;
    net.projection = projection;
    Ok(net)
}

/// `count` points placed uniformly by length over the polylines passing `filter`.
pub fn sample_network(
    net: &LineNetwork,
    filter: &[String],
    count: usize,
    seed: u64,
) -> Result<PointCloud> {
    let mut pieces: Vec<([f64; 2], [f64; 2])> = Vec::new();
    let mut lengths = Vec::new();
    for (k, seg) in net.segments.iter().enumerate() {
        if !net.matches(k, filter) {
            continue;
        }
        for w in seg.windows(2) {
            let len = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
            if len > 0.0 {
                pieces.push((w[0], w[1]));
                lengths.push(len);
            }
        }
    }
    if pieces.is_empty() {
        return Err(NiphError::EmptyDistribution(format!(
            "no road of positive length matches filter {filter:?}"
        )));
    }
    let pick = WeightedIndex::new(&lengths)
        .map_err(|e| NiphError::InvalidInput(format!("segment lengths: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(2 * count);
    for _ in 0..count {
        let (a, b) = pieces[pick.sample(&mut rng)];
        let t: f64 = rng.random();
        coords.push(a[0] + t * (b[0] - a[0]));
        coords.push(a[1] + t * (b[1] - a[1]));
    }
    let mut cloud = PointCloud::from_flat(2, coords)?;
    cloud.provenance = Some(format!(
        "sample-network count={count} seed={seed} filter={}",
        filter.join("|")
    ));
    Ok(cloud)
}
