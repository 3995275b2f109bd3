mod config;

use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde_json::json;

use niph::density::{density_peak, DensityConfig};
use niph::fit::{fit_parameters, pca_orientation, FitConfig, FoldMode, HomologyDim};
use niph::geometry::ProbeSpec;
use niph::io::{
    diagram_to_json, fit_result_json, read_peaks_csv, read_points_csv, read_series_csv,
    report_json, to_json_rounded, write_curves_csv, write_diagram_csv, write_peaks_csv,
    write_points_csv, write_shifts_csv,
};
use niph::network::{parse_geojson, sample_network};
use niph::persistence::{Weighting, DEFAULT_MAX_EDGES};
use niph::pipeline::{fingerprint, probe_persistence, run_niph, NiphConfig, ProbePlan};
use niph::plot::{line_plot_svg, PlotConfig, Series};
use niph::synth::{gen_grid, gen_shape_field, GridSpec, NoiseModel, ShapeFieldSpec, ShapeKind};
use niph::NiphError;

/// Non-isotropic persistent homology: orientation and anisotropy of point clouds.
///
/// Angles on the command line are in degrees; CSV files and reports store radians.
#[derive(Parser)]
#[command(name = "niph", version, args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic point cloud (grid or shape field) as CSV
    Generate(GenerateArgs),
    /// Sample points uniformly by length from GeoJSON road lines
    SampleNetwork(SampleArgs),
    /// Persistence diagram of a point cloud, optionally under a probe metric
    Ph(PhArgs),
    /// Run every probe of a plan, then fit orientation and scaling
    Niph(NiphArgs),
    /// Fit (phi, V, s) to a peaks CSV
    Fit(FitArgs),
    /// Principal-axis orientation of a point cloud
    Pca(PcaArgs),
    /// Render shift or density CSV as an SVG chart, one curve per probe
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Grid,
    Ellipse,
    Rectangle,
    Circle,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Uniform,
    Gaussian,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    shape: ShapeArg,
    /// Output CSV; a `.json` sidecar with the generator spec is written next to it
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Mean orientation in degrees
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    /// Grid: points along the first axis
    #[arg(long, default_value_t = 5)]
    n1: usize,
    /// Grid: points along the second axis
    #[arg(long, default_value_t = 4)]
    n2: usize,
    /// Grid: spacing along the first axis
    #[arg(long, default_value_t = 1.0)]
    d1: f64,
    /// Grid: spacing along the second axis
    #[arg(long, default_value_t = 2.0)]
    d2: f64,
    /// Grid: noise bound per coordinate
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, value_enum, default_value_t = NoiseArg::Uniform)]
    noise_model: NoiseArg,
    /// Shapes: number of shapes
    #[arg(long, default_value_t = 200)]
    count: usize,
    /// Shapes: points per shape
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Shapes: side of the square holding the centers
    #[arg(long, default_value_t = 3000.0)]
    region: f64,
    /// Shapes: long axis over short axis
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    /// Shapes: orientational variance in rad^2
    #[arg(long, default_value_t = 0.0)]
    var: f64,
    /// Shapes: smallest short axis
    #[arg(long, default_value_t = 0.2)]
    size_min: f64,
    /// Shapes: largest short axis
    #[arg(long, default_value_t = 2.0)]
    size_max: f64,
}

#[derive(Args)]
struct SampleArgs {
    /// GeoJSON FeatureCollection of LineString/MultiLineString features
    input: PathBuf,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated `highway` values to keep; all lines when absent
    #[arg(long, value_delimiter = ',')]
    filter: Vec<String>,
    /// Output CSV; a `.json` sidecar records the projection
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct PhArgs {
    /// Point cloud CSV (`-` for stdin)
    input: PathBuf,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    dim: u8,
    /// Radius cap, required for dimension 1
    #[arg(long)]
    rmax: Option<f64>,
    /// Probe direction in degrees
    #[arg(long, requires = "probe_scale")]
    probe_angle: Option<f64>,
    /// Probe scaling factor
    #[arg(long, requires = "probe_angle")]
    probe_scale: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_EDGES)]
    max_edges: usize,
    /// Output format; taken from the output extension when absent
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FoldArg {
    Integral,
    Argmax,
}

#[derive(Args)]
struct FitOptions {
    #[arg(long, default_value_t = 1.0)]
    v_max: f64,
    #[arg(long, default_value_t = 10.0)]
    s_max: f64,
    /// Annealing evaluations per restart
    #[arg(long, default_value_t = 5000)]
    evaluations: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    /// Optimizer seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FoldArg::Integral)]
    fold: FoldArg,
}

impl FitOptions {
    fn config(&self) -> FitConfig {
        FitConfig {
            v_max: self.v_max,
            s_max: self.s_max,
            evaluations: self.evaluations,
            restarts: self.restarts,
            seed: self.seed,
            fold: match self.fold {
                FoldArg::Integral => FoldMode::WeightedIntegral,
                FoldArg::Argmax => FoldMode::DensityArgmax,
            },
            ..FitConfig::default()
        }
    }
}

#[derive(Args)]
struct NiphArgs {
    /// Point cloud CSV (`-` for stdin)
    input: PathBuf,
    /// Number of probe directions, evenly spaced over [0, 180) degrees
    #[arg(long, default_value_t = 8)]
    directions: usize,
    /// Comma-separated probe factors
    #[arg(long, value_delimiter = ',', default_value = "2.0")]
    scales: Vec<f64>,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    dim: u8,
    /// unit, diff or ratio; unit in dimension 0 and diff in dimension 1 by default
    #[arg(long)]
    weighting: Option<String>,
    /// Radius cap, required for dimension 1
    #[arg(long)]
    rmax: Option<f64>,
    /// Worker threads; falls back to NIPH_THREADS
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_MAX_EDGES)]
    max_edges: usize,
    /// Bins of the death-edge orientation histograms
    #[arg(long)]
    orientation_bins: Option<usize>,
    /// Record wall-clock timings in the report
    #[arg(long)]
    timing: bool,
    /// Report JSON; stdout when absent
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write every shift as `angle,factor,shift,weight`
    #[arg(long)]
    shifts: Option<PathBuf>,
    /// Also write every density curve as `angle,factor,x,density`
    #[arg(long)]
    curves: Option<PathBuf>,
    /// Also write the per-probe peaks as `angle,factor,peak,dim`
    #[arg(long)]
    peaks: Option<PathBuf>,
    #[command(flatten)]
    fit: FitOptions,
}

#[derive(Args)]
struct FitArgs {
    /// Peaks CSV `angle,factor,peak,dim` (`-` for stdin)
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    fit: FitOptions,
}

#[derive(Args)]
struct PcaArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotKind {
    /// Decide from the CSV header
    Auto,
    /// Raw shifts; a density is estimated per probe
    Shifts,
    /// Density curves, drawn as given
    Curves,
}

#[derive(Args)]
struct PlotArgs {
    /// Shifts or curves CSV (`-` for stdin)
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PlotKind::Auto)]
    kind: PlotKind,
    #[arg(long, default_value = "")]
    title: String,
    #[arg(long, default_value_t = 720.0)]
    width: f64,
    #[arg(long, default_value_t = 440.0)]
    height: f64,
}

/// Bad invocation that clap cannot see, such as a missing `--rmax` for dimension 1.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 1;
    }
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<NiphError>() {
            return if e.is_resource() { 3 } else { 2 };
        }
    }
    2
}

fn open_input(path: &Path) -> Result<Box<dyn Read>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(io::stdin().lock()));
    }
    let f =
        File::open(path).with_context(|| format!("cannot open input file {}", path.display()))?;
    Ok(Box::new(io::BufReader::new(f)))
}

fn read_text(path: &Path) -> Result<String> {
    let mut s = String::new();
    open_input(path)?
        .read_to_string(&mut s)
        .with_context(|| format!("cannot read {}", path.display()))?;
    Ok(s)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Runs `f` against the output file, or stdout when `path` is `None`.
fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    with_output(path, |w| {
        w.write_all(text.as_bytes())?;
        if !text.ends_with('\n') {
            w.write_all(b"\n")?;
        }
        Ok(())
    })
}

fn sidecar(path: &Path, value: &serde_json::Value) -> Result<()> {
    let p = path.with_extension("json");
    fs::write(&p, to_json_rounded(value)? + "\n")
        .with_context(|| format!("cannot write {}", p.display()))
}

fn load_points(path: &Path) -> Result<niph::PointCloud> {
    let cloud = read_points_csv(open_input(path)?)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(cloud.with_provenance(path.display().to_string()))
}

fn homology(dim: u8) -> HomologyDim {
    if dim == 0 {
        HomologyDim::Zero
    } else {
        HomologyDim::One
    }
}

fn generate(a: GenerateArgs) -> Result<()> {
    let phi = a.phi.to_radians();
    let (cloud, spec) = match a.shape {
        ShapeArg::Grid => {
            let spec = GridSpec {
                n1: a.n1,
                n2: a.n2,
                d1: a.d1,
                d2: a.d2,
                phi,
                noise_bound: a.noise,
                noise: match a.noise_model {
                    NoiseArg::Uniform => NoiseModel::Uniform,
                    NoiseArg::Gaussian => NoiseModel::Gaussian,
                },
                seed: a.seed,
            };
            (gen_grid(&spec)?, json!({"kind": "grid", "spec": spec}))
        }
        shape => {
            let shape = match shape {
                ShapeArg::Ellipse => ShapeKind::Ellipse,
                ShapeArg::Rectangle => ShapeKind::Rectangle,
                _ => ShapeKind::Circle,
            };
            let spec = ShapeFieldSpec {
                count: a.count,
                phi,
                var: a.var,
                s: if shape == ShapeKind::Circle { 1.0 } else { a.s },
                size_range: (a.size_min, a.size_max),
                points_per_shape: a.points,
                region: a.region,
                shape,
                seed: a.seed,
            };
            (
                gen_shape_field(&spec)?,
                json!({"kind": "shapes", "spec": spec}),
            )
        }
    };
    with_output(a.output.as_deref(), |w| Ok(write_points_csv(&cloud, w)?))?;
    if let Some(out) = &a.output {
        let mut meta = spec;
        meta["points"] = json!(cloud.len());
        meta["fingerprint"] = json!(fingerprint(&cloud));
        sidecar(out, &meta)?;
    }
    Ok(())
}

fn sample(a: SampleArgs) -> Result<()> {
    let net = parse_geojson(&read_text(&a.input)?)
        .with_context(|| format!("parsing {}", a.input.display()))?;
    let cloud = sample_network(&net, &a.filter, a.count, a.seed)?;
    with_output(a.output.as_deref(), |w| Ok(write_points_csv(&cloud, w)?))?;
    if let Some(out) = &a.output {
        sidecar(
            out,
            &json!({
                "source": a.input.display().to_string(),
                "count": a.count,
                "seed": a.seed,
                "filter": a.filter,
                "lines": net.len(),
                "projection": net.projection,
                "fingerprint": fingerprint(&cloud),
            }),
        )?;
    }
    Ok(())
}

fn ph(a: PhArgs) -> Result<()> {
    let dim = homology(a.dim);
    if dim == HomologyDim::One && a.rmax.is_none() {
        return Err(usage("--rmax is required for --dim 1"));
    }
    let probe = match (a.probe_angle, a.probe_scale) {
        (Some(angle), Some(f)) => Some(ProbeSpec::from_angle(angle.to_radians(), f)?),
        _ => None,
    };
    let cloud = load_points(&a.input)?;
    // keep every class of the base cap alive under the probe
    let r_max = a
        .rmax
        .map(|r| r * probe.as_ref().map_or(1.0, |p| p.factor().max(1.0)));
    let diagram = probe_persistence(&cloud, probe.as_ref(), dim, r_max, a.max_edges)?;
    let csv_ext = a
        .output
        .as_ref()
        .and_then(|p| p.extension())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let format = a
        .format
        .unwrap_or(if csv_ext { Format::Csv } else { Format::Json });
    match format {
        Format::Json => write_text(a.output.as_deref(), &diagram_to_json(&diagram)?),
        Format::Csv => with_output(a.output.as_deref(), |w| Ok(write_diagram_csv(&diagram, w)?)),
    }
}

fn threads(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("NIPH_THREADS") {
        Ok(v) if !v.trim().is_empty() => v.trim().parse::<usize>().map(Some).map_err(|_| {
            usage(format!(
                "NIPH_THREADS must be a positive integer, got `{v}`"
            ))
        }),
        _ => Ok(None),
    }
}

fn niph_cmd(a: NiphArgs) -> Result<()> {
    let dim = homology(a.dim);
    if dim == HomologyDim::One && a.rmax.is_none() {
        return Err(usage("--rmax is required for --dim 1"));
    }
    let weighting = match &a.weighting {
        Some(w) => w.parse::<Weighting>().map_err(|e| usage(e.to_string()))?,
        None if dim == HomologyDim::Zero => Weighting::Unit,
        None => Weighting::PersistenceDiff,
    };
    let plan = ProbePlan::even(a.directions, a.scales.clone(), dim, weighting)
        .map_err(|e| usage(e.to_string()))?;
    let cfg = NiphConfig {
        r_max: a.rmax,
        max_edges: a.max_edges,
        density: DensityConfig::default(),
        fit: a.fit.config(),
        threads: threads(a.threads)?,
        orientation_bins: a.orientation_bins,
        record_timing: a.timing,
    };
    let cloud = load_points(&a.input)?;
    let report = run_niph(&cloud, &plan, &cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    write_text(a.output.as_deref(), &report_json(&report)?)?;
    if let Some(p) = &a.shifts {
        let mut w = create(p)?;
        write_shifts_csv(&report.diagrams, &mut w)?;
        w.flush()?;
    }
    if let Some(p) = &a.curves {
        let mut w = create(p)?;
        write_curves_csv(&report.diagrams, &mut w)?;
        w.flush()?;
    }
    if let Some(p) = &a.peaks {
        let mut w = create(p)?;
        write_peaks_csv(&report.peaks(), &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn fit_cmd(a: FitArgs) -> Result<()> {
    let obs = read_peaks_csv(open_input(&a.input)?)
        .with_context(|| format!("reading {}", a.input.display()))?;
    let cfg = a.fit.config();
    let fit = fit_parameters(&obs, &cfg)?;
    write_text(a.output.as_deref(), &fit_result_json(&fit, &cfg)?)
}

fn pca_cmd(a: PcaArgs) -> Result<()> {
    let cloud = load_points(&a.input)?;
    let r = pca_orientation(&cloud)?;
    let ratio = if r.ratio.is_finite() {
        json!(r.ratio)
    } else {
        json!(null)
    };
    let v = json!({
        "angle_rad": r.angle,
        "angle_deg": r.angle.to_degrees(),
        "ratio": ratio,
        "points": cloud.len(),
    });
    write_text(a.output.as_deref(), &to_json_rounded(&v)?)
}

fn series_label(key: (f64, f64)) -> String {
    if key.0.is_nan() {
        "series".into()
    } else {
        format!("{:.1}° x{}", key.0.to_degrees(), niph::io::fmt_g9(key.1))
    }
}

fn plot_cmd(a: PlotArgs) -> Result<()> {
    let text = read_text(&a.input)?;
    let kind = match a.kind {
        PlotKind::Auto => {
            let header = text
                .lines()
                .find(|l| l.trim_start().starts_with('#'))
                .unwrap_or("");
            if header.contains("shift") {
                PlotKind::Shifts
            } else {
                PlotKind::Curves
            }
        }
        k => k,
    };
    let groups = read_series_csv(text.as_bytes())
        .with_context(|| format!("reading {}", a.input.display()))?;
    let mut series = Vec::with_capacity(groups.len());
    for (key, rows) in groups {
        let points = if kind == PlotKind::Shifts {
            let (xs, ws): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
            match density_peak(&xs, &ws, &DensityConfig::default())? {
                (Some(curve), _) => curve.grid.into_iter().zip(curve.values).collect(),
                // all shifts equal: draw a spike at the atom
                (None, atom) => vec![(atom, 0.0), (atom, 1.0), (atom, 0.0)],
            }
        } else {
            rows
        };
        series.push(Series {
            label: series_label(key),
            points,
        });
    }
    let cfg = PlotConfig {
        title: a.title,
        width: a.width,
        height: a.height,
        ..PlotConfig::default()
    };
    write_text(a.output.as_deref(), &line_plot_svg(&series, &cfg))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::SampleNetwork(a) => sample(a),
        Command::Ph(a) => ph(a),
        Command::Niph(a) => niph_cmd(a),
        Command::Fit(a) => fit_cmd(a),
        Command::Pca(a) => pca_cmd(a),
        Command::Plot(a) => plot_cmd(a),
    }
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let mut command = Cli::command();
    for sub in command.get_subcommands_mut() {
        *sub = sub.clone().args_override_self(true);
    }
    let cli = match command
        .try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
