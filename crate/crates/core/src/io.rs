//! CSV and JSON formats for point clouds, diagrams, shifts, peaks and fits.
//!
//! Numbers are written with 9 significant digits; lines starting with `#` are comments.

use std::io::{Read, Write};

use serde::Serialize;
use serde_json::{json, Value};

use crate::density::DensityCurve;
use crate::error::{NiphError, Result};
use crate::fit::{FitConfig, FitResult, HomologyDim, PeakObservation};
use crate::geometry::PointCloud;
use crate::persistence::{PersistenceDiagram, PersistencePair};
use crate::pipeline::NiphReport;
use crate::transport::MultShiftDiagram;

/// Rounds to 9 significant digits.
pub fn round9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// Shortest decimal form of `x` rounded to 9 significant digits.
pub fn fmt_g9(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let r = round9(x);
        // normalize -0
        if r == 0.0 {
            "0".into()
        } else {
            format!("{r}")
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> NiphError {
    NiphError::Parse {
        line,
        msg: msg.into(),
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

/// Numeric rows of a CSV stream with their 1-based line numbers.
fn numeric_rows<R: Read>(input: R) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut out = Vec::new();
    for rec in reader(input).records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let vals = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| parse_err(line, format!("not a number: {f:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        out.push((line, vals));
    }
    Ok(out)
}

pub fn read_points_csv<R: Read>(input: R) -> Result<PointCloud> {
    let rows = numeric_rows(input)?;
    let Some((_, first)) = rows.first() else {
        return Err(NiphError::EmptyDistribution("no points in CSV".into()));
    };
    let dim = first.len();
    let mut coords = Vec::with_capacity(rows.len() * dim);
    for (line, r) in &rows {
        if r.len() != dim {
            return Err(parse_err(
                *line,
                format!("expected {dim} coordinates, found {}", r.len()),
            ));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(parse_err(*line, "non-finite coordinate"));
        }
        coords.extend_from_slice(r);
    }
    PointCloud::from_flat(dim, coords)
}

pub fn write_points_csv<W: Write>(cloud: &PointCloud, mut out: W) -> Result<()> {
    let header: Vec<String> = match cloud.dim() {
        2 => vec!["x".into(), "y".into()],
        d => (0..d).map(|k| format!("x{k}")).collect(),
    };
    writeln!(out, "# {}", header.join(","))?;
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(|v| fmt_g9(*v)).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Serializes with every float rounded to 9 significant digits.
pub fn to_json_rounded<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    Ok(serde_json::to_string_pretty(&v)?)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round9(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Diagram as a JSON array of pairs; infinite deaths are the string `"inf"`.
pub fn diagram_to_json(diagram: &PersistenceDiagram) -> Result<String> {
    to_json_rounded(&diagram.pairs)
}

pub fn diagram_from_json(text: &str) -> Result<Vec<PersistencePair>> {
    Ok(serde_json::from_str(text)?)
}

pub fn write_diagram_csv<W: Write>(diagram: &PersistenceDiagram, mut out: W) -> Result<()> {
    writeln!(out, "# birth,death,dim,death_i,death_j,truncated")?;
    for p in &diagram.pairs {
        let (i, j) = match p.death_edge {
            Some([i, j]) => (i.to_string(), j.to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{},{},{i},{j},{}",
            fmt_g9(p.birth),
            fmt_g9(p.death),
            p.dim,
            p.truncated as u8
        )?;
    }
    Ok(())
}

/// Shift rows `angle,factor,shift,weight` for a set of probes.
pub fn write_shifts_csv<W: Write>(diagrams: &[MultShiftDiagram], mut out: W) -> Result<()> {
    writeln!(out, "# angle,factor,shift,weight")?;
    for d in diagrams {
        let angle = fmt_g9(d.probe.angle().unwrap_or(f64::NAN));
        let factor = fmt_g9(d.probe.factor());
        for (s, w) in d.shifts.iter().zip(&d.weights) {
            writeln!(out, "{angle},{factor},{},{}", fmt_g9(*s), fmt_g9(*w))?;
        }
    }
    Ok(())
}

/// Density rows `angle,factor,x,density`.
pub fn write_curves_csv<W: Write>(diagrams: &[MultShiftDiagram], mut out: W) -> Result<()> {
    writeln!(out, "# angle,factor,x,density")?;
    for d in diagrams {
        let Some(c) = &d.density else { continue };
        let angle = fmt_g9(d.probe.angle().unwrap_or(f64::NAN));
        let factor = fmt_g9(d.probe.factor());
        for (x, y) in c.grid.iter().zip(&c.values) {
            writeln!(out, "{angle},{factor},{},{}", fmt_g9(*x), fmt_g9(*y))?;
        }
    }
    Ok(())
}

pub fn write_curve_csv<W: Write>(curve: &DensityCurve, mut out: W) -> Result<()> {
    writeln!(out, "# x,density")?;
    for (x, y) in curve.grid.iter().zip(&curve.values) {
        writeln!(out, "{},{}", fmt_g9(*x), fmt_g9(*y))?;
    }
    Ok(())
}

/// Groups of `(x, y)` rows keyed by `(angle, factor)`, in order of first appearance.
///
/// Accepts 2-column rows (one unnamed group) or 4-column rows as written by
/// [`write_shifts_csv`] and [`write_curves_csv`].
pub type SeriesGroups = Vec<((f64, f64), Vec<(f64, f64)>)>;

pub fn read_series_csv<R: Read>(input: R) -> Result<SeriesGroups> {
    let mut groups: SeriesGroups = Vec::new();
    for (line, r) in numeric_rows(input)? {
        let (key, xy) = match r.as_slice() {
            [x, y] => ((f64::NAN, f64::NAN), (*x, *y)),
            [a, f, x, y] => ((*a, *f), (*x, *y)),
            _ => {
                return Err(parse_err(
                    line,
                    format!("expected 2 or 4 columns, found {}", r.len()),
                ))
            }
        };
        let same =
            |k: &(f64, f64)| k.0.to_bits() == key.0.to_bits() && k.1.to_bits() == key.1.to_bits();
        match groups.iter_mut().find(|(k, _)| same(k)) {
            Some((_, rows)) => rows.push(xy),
            None => groups.push((key, vec![xy])),
        }
    }
    if groups.is_empty() {
        return Err(NiphError::EmptyDistribution("no rows in CSV".into()));
    }
    Ok(groups)
}

/// Peak rows `angle,factor,peak,dim` (angle in radians).
pub fn write_peaks_csv<W: Write>(obs: &[PeakObservation], mut out: W) -> Result<()> {
    writeln!(out, "# angle,factor,peak,dim")?;
    for o in obs {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_g9(o.probe.angle().unwrap_or(f64::NAN)),
            fmt_g9(o.probe.factor()),
            fmt_g9(o.peak),
            o.dim.index()
        )?;
    }
    Ok(())
}

pub fn read_peaks_csv<R: Read>(input: R) -> Result<Vec<PeakObservation>> {
    let mut out = Vec::new();
    for (line, r) in numeric_rows(input)? {
        let [angle, factor, peak, dim] = r.as_slice() else {
            return Err(parse_err(
                line,
                format!("expected 4 columns, found {}", r.len()),
            ));
        };
        if dim.fract() != 0.0 || *dim < 0.0 {
            return Err(parse_err(
                line,
                format!("dimension must be 0 or 1, got {dim}"),
            ));
        }
        let dim =
            HomologyDim::from_index(*dim as usize).map_err(|e| parse_err(line, e.to_string()))?;
        out.push(
            PeakObservation::new(*angle, *factor, *peak, dim)
                .map_err(|e| parse_err(line, e.to_string()))?,
        );
    }
    Ok(out)
}

pub fn fit_result_json(fit: &FitResult, cfg: &FitConfig) -> Result<String> {
    let v = json!({
        "phi_rad": fit.phi,
        "phi_deg": fit.phi_deg(),
        "var": fit.var,
        "sqrt_var": fit.sqrt_var(),
        "s": fit.s,
        "residual": fit.residual,
        "evaluations": fit.evaluations,
        "config_echo": cfg,
    });
    to_json_rounded(&v)
}

pub fn report_json(report: &NiphReport) -> Result<String> {
    to_json_rounded(report)
}
