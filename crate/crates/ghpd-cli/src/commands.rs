//! The four subcommands. All output content is produced before anything is
//! written, and files land via a temp-file rename, so output paths stay
//! untouched on failure.

use crate::args::{ClassifyArgs, ComputeArgs, OutputFormat, SimulateArgs, WheelArgs};
use crate::config::{resolve, Config};
use ghpd::credible::{fair_ghpd, Phi};
use ghpd::io::{self, PhiRecord};
use ghpd::posterior::{CredibleLevel, DiscretePosterior};
use ghpd::qda::{fit_qda, fit_qda_with_priors, QdaModel};
use ghpd::simulate::{simulate, SimulationSpec};
use ghpd::wheel::{build_wheel, render_panel, render_svg, Palette, ViewBounds, WheelSpec};
use ghpd::{grid_ghpd, interior_intervals, Error as GhpdError, GridPosterior};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Exit 2: malformed input or usage. Exit 3: numerical or model failure.
#[derive(Debug)]
pub struct CmdError {
    pub code: i32,
    pub message: String,
}

impl CmdError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn model(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<GhpdError> for CmdError {
    fn from(e: GhpdError) -> Self {
        let code = match &e {
            // invariant and model failures
            GhpdError::NotNormalized { .. }
            | GhpdError::AllZeroWeights
            | GhpdError::GridNotNormalized { .. }
            | GhpdError::TooFewClasses(_)
            | GhpdError::ClassTooSmall { .. }
            | GhpdError::CovarianceNotPositiveDefinite(_)
            | GhpdError::InvalidSimulationSpec(_)
            | GhpdError::InconsistentKappa { .. }
            | GhpdError::GammaOutOfRange(_)
            | GhpdError::LabelMismatch => 3,
            // everything else is malformed input or usage
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<String> for CmdError {
    fn from(message: String) -> Self {
        Self::usage(message)
    }
}

fn read_input(path: &Path) -> Result<String, CmdError> {
    std::fs::read_to_string(path)
        .map_err(|e| CmdError::usage(format!("cannot read {}: {e}", path.display())))
}

/// Writes through a sibling temp file and renames, so a failed run never
/// leaves a partial file at the destination.
fn write_atomic(path: &Path, content: &str) -> Result<(), CmdError> {
    let tmp = path.with_extension(format!(
        "{}tmp",
        path.extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    let finish = (|| -> std::io::Result<()> {
        std::fs::write(&tmp, content)?;
        std::fs::rename(&tmp, path)
    })();
    finish.map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        CmdError::usage(format!("cannot write {}: {e}", path.display()))
    })
}

fn emit(output: Option<&Path>, content: &str) -> Result<(), CmdError> {
    match output {
        Some(path) => write_atomic(path, content),
        None => {
            print!("{content}");
            std::io::stdout()
                .flush()
                .map_err(|e| CmdError::usage(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Line-by-line writer with the same tmp-then-rename contract as
/// [`write_atomic`]; dropping it unfinished removes the partial file.
struct JsonlWriter {
    tmp: PathBuf,
    path: PathBuf,
    file: Option<std::io::BufWriter<std::fs::File>>,
}

impl JsonlWriter {
    fn create(path: &Path) -> Result<Self, CmdError> {
        let tmp = path.with_extension("jsonl.tmp");
        let file = std::fs::File::create(&tmp)
            .map_err(|e| CmdError::usage(format!("cannot write {}: {e}", tmp.display())))?;
        Ok(Self {
            tmp,
            path: path.to_path_buf(),
            file: Some(std::io::BufWriter::new(file)),
        })
    }

    fn line(&mut self, text: &str) -> Result<(), CmdError> {
        let file = self.file.as_mut().expect("writer still open");
        writeln!(file, "{text}")
            .map_err(|e| CmdError::usage(format!("cannot write {}: {e}", self.tmp.display())))
    }

    fn finish(mut self) -> Result<(), CmdError> {
        let file = self.file.take().expect("writer still open");
        file.into_inner()
            .map_err(|e| CmdError::usage(format!("cannot flush {}: {e}", self.tmp.display())))?;
        std::fs::rename(&self.tmp, &self.path)
            .map_err(|e| CmdError::usage(format!("cannot write {}: {e}", self.path.display())))
    }
}

impl Drop for JsonlWriter {
    fn drop(&mut self) {
        if self.file.is_some() {
            let _ = std::fs::remove_file(&self.tmp);
        }
    }
}

fn parse_alpha(flag: Option<f64>, config: &Config) -> Result<CredibleLevel, CmdError> {
    let alpha = resolve(flag, config, "alpha", 0.05)?;
    CredibleLevel::new(alpha).map_err(|e| {
        CmdError::usage(format!("{e}; pass --alpha with a value strictly between 0 and 1"))
    })
}

fn parse_format(
    flag: Option<OutputFormat>,
    config: &Config,
    default: OutputFormat,
) -> Result<OutputFormat, CmdError> {
    if let Some(f) = flag {
        return Ok(f);
    }
    match config.get("format") {
        None => Ok(default),
        Some("json") => Ok(OutputFormat::Json),
        Some("svg") => Ok(OutputFormat::Svg),
        Some("both") => Ok(OutputFormat::Both),
        Some(other) => Err(CmdError::usage(format!(
            "config key format: expected json|svg|both, got {other:?}"
        ))),
    }
}

fn argmax_label(post: &DiscretePosterior) -> String {
    let mut best = 0;
    for i in 1..post.len() {
        if post.prob(i) > post.prob(best) {
            best = i;
        }
    }
    post.label(best).to_string()
}

fn wheel_for(
    hub: Option<&str>,
    fallback: &str,
    phi: &Phi,
) -> Result<WheelSpec, CmdError> {
    let palette = Palette::default_for(phi.labels())?;
    Ok(build_wheel(hub.unwrap_or(fallback), phi, &palette)?)
}

// ── compute ─────────────────────────────────────────────────────────

pub fn run_compute(args: &ComputeArgs, config: &Config) -> Result<(), CmdError> {
    let level = parse_alpha(args.alpha, config)?;
    let format = parse_format(args.format, config, OutputFormat::Json)?;
    let size_px = resolve(args.size_px, config, "size_px", 256u32)?;
    let text = read_input(&args.input)?;

    let is_csv = args
        .input
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let grid_input = !is_csv && serde_json::from_str::<Value>(&text)
        .ok()
        .as_ref()
        .and_then(Value::as_object)
        .is_some_and(|o| o.contains_key("density"));

    let (post, phi, intervals) = if grid_input {
        let mut grid = io::grid_from_json(&text)?;
        if args.grid_lo.is_some() || args.grid_hi.is_some() || args.grid_step.is_some() {
            grid = GridPosterior::new(
                args.grid_lo.unwrap_or(grid.lo()),
                args.grid_hi.unwrap_or(grid.hi()),
                args.grid_step.unwrap_or(grid.step()),
                grid.density().to_vec(),
            )?;
        }
        let phi = grid_ghpd(&grid, level)?;
        let intervals = interior_intervals(&grid, &phi);
        (grid.to_posterior(), phi, Some(intervals))
    } else {
        let post = if is_csv {
            io::posterior_from_csv(&text)?
        } else {
            io::posterior_from_json(&text)?
        };
        let phi = fair_ghpd(&post, level)?;
        (post, phi, None)
    };

    let record = PhiRecord::from_phi(&phi);
    let json_text = match &intervals {
        None => record.to_json(),
        Some(intervals) => {
            // append the continuous-set summary to the standard document
            let mut value: Value = serde_json::from_str(&record.to_json()).expect("own output");
            let list: Vec<Value> = intervals.iter().map(|(a, b)| json!([a, b])).collect();
            value
                .as_object_mut()
                .expect("document is an object")
                .insert("intervals".to_string(), Value::Array(list));
            io::to_json_string(&value)
        }
    };

    let svg_text = if format != OutputFormat::Json {
        let wheel = wheel_for(args.hub.as_deref(), &argmax_label(&post), &phi)?;
        Some(render_svg(&wheel, size_px)?)
    } else {
        None
    };

    match format {
        OutputFormat::Json => emit(args.output.as_deref(), &json_text),
        OutputFormat::Svg => emit(args.output.as_deref(), svg_text.as_deref().unwrap()),
        OutputFormat::Both => {
            let base = args.output.as_deref().ok_or_else(|| {
                CmdError::usage("--format both needs --output to name the .json/.svg pair")
            })?;
            write_atomic(&base.with_extension("json"), &json_text)?;
            write_atomic(&base.with_extension("svg"), svg_text.as_deref().unwrap())
        }
    }
}

// ── simulate ────────────────────────────────────────────────────────

struct ClassifiedPoint {
    features: Vec<f64>,
    true_label: Option<String>,
    predicted: String,
    posterior: DiscretePosterior,
    phi: Phi,
}

fn classified_record(index: usize, point: &ClassifiedPoint) -> String {
    let mut posterior = Map::new();
    for (label, &p) in point.posterior.labels().iter().zip(point.posterior.probs()) {
        posterior.insert(label.clone(), json!(p));
    }
    let phi_value: Value =
        serde_json::from_str(&PhiRecord::from_phi(&point.phi).to_json()).expect("own output");
    let mut record = Map::new();
    record.insert("index".to_string(), json!(index));
    record.insert("features".to_string(), json!(point.features));
    if let Some(label) = &point.true_label {
        record.insert("label".to_string(), json!(label));
    }
    record.insert("predicted".to_string(), json!(point.predicted));
    record.insert("posterior".to_string(), Value::Object(posterior));
    record.insert("phi".to_string(), phi_value);
    io::to_json_string(&Value::Object(record))
}

/// Classifies rows in parallel; records come back in input order.
fn classify_rows(
    model: &QdaModel,
    rows: &[Vec<f64>],
    true_labels: Option<&[String]>,
    level: CredibleLevel,
) -> Result<Vec<ClassifiedPoint>, CmdError> {
    rows.par_iter()
        .enumerate()
        .map(|(i, x)| {
            let posterior = model.posterior_at(x)?;
            let (predicted, phi) = model.classify_with_uncertainty(x, level)?;
            Ok(ClassifiedPoint {
                features: x.clone(),
                true_label: true_labels.map(|l| l[i].clone()),
                predicted,
                posterior,
                phi,
            })
        })
        .collect()
}

fn panel_svg(points: &[ClassifiedPoint]) -> Result<String, CmdError> {
    let labels: Vec<&str> = points[0]
        .posterior
        .labels()
        .iter()
        .map(String::as_str)
        .collect();
    let palette = Palette::default_for(&labels)?;
    let mut wheels = Vec::with_capacity(points.len());
    for point in points {
        let wheel = build_wheel(&point.predicted, &point.phi, &palette)?.with_rim_radius(16.0);
        wheels.push((point.features[0], point.features[1], wheel));
    }
    let coords: Vec<(f64, f64)> = wheels.iter().map(|(x, y, _)| (*x, *y)).collect();
    let bounds = ViewBounds::around(&coords, 0.08);
    Ok(render_panel(&wheels, &bounds, 640, 640)?)
}

pub fn run_simulate(args: &SimulateArgs, config: &Config) -> Result<(), CmdError> {
    let level = parse_alpha(args.alpha, config)?;
    let seed = resolve(args.seed, config, "seed", 42u64)?;
    let per_class = resolve(args.per_class, config, "per_class", 10usize)?;
    let format = parse_format(args.format, config, OutputFormat::Both)?;
    let out_dir = args
        .output
        .clone()
        .or_else(|| config.get("output").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    let spec = SimulationSpec::three_class(per_class, seed);
    let data = simulate(&spec)?;
    let model = fit_qda(&data).map_err(|e| CmdError::model(e.to_string()))?;

    let rows: Vec<Vec<f64>> = (0..data.n()).map(|i| data.row(i).to_vec()).collect();
    let labels: Vec<String> = data.labels().to_vec();
    let points = classify_rows(&model, &rows, Some(&labels), level)?;

    let csv_text = io::dataset_to_csv(&data);
    let svg = if format != OutputFormat::Json {
        Some(panel_svg(&points)?)
    } else {
        None
    };

    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CmdError::usage(format!("cannot create {}: {e}", out_dir.display())))?;
    write_atomic(&out_dir.join("dataset.csv"), &csv_text)?;
    if format != OutputFormat::Svg {
        let mut writer = JsonlWriter::create(&out_dir.join("records.jsonl"))?;
        for (i, point) in points.iter().enumerate() {
            writer.line(&classified_record(i, point))?;
        }
        writer.finish()?;
    }
    if let Some(svg) = svg {
        write_atomic(&out_dir.join("panel.svg"), &svg)?;
    }
    Ok(())
}

// ── classify ────────────────────────────────────────────────────────

fn parse_priors(spec: &str) -> Result<Vec<(String, f64)>, CmdError> {
    spec.split(',')
        .map(|pair| {
            let (label, value) = pair.split_once('=').ok_or_else(|| {
                CmdError::usage(format!("--priors: expected label=p, got {pair:?}"))
            })?;
            let p = value.trim().parse::<f64>().map_err(|e| {
                CmdError::usage(format!("--priors: bad probability {value:?}: {e}"))
            })?;
            Ok((label.trim().to_string(), p))
        })
        .collect()
}

pub fn run_classify(args: &ClassifyArgs, config: &Config) -> Result<(), CmdError> {
    let level = parse_alpha(args.alpha, config)?;
    let format = parse_format(args.format, config, OutputFormat::Json)?;
    let size_px = resolve(args.size_px, config, "size_px", 256u32)?;
    let out_dir = args
        .output
        .clone()
        .or_else(|| config.get("output").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    let train = io::dataset_from_csv(&read_input(&args.train)?)?;
    let (test_rows, test_labels) = io::test_rows_from_csv(&read_input(&args.test)?)?;
    if test_rows[0].len() != train.dim() {
        return Err(CmdError::usage(format!(
            "test rows have dimension {}, training data has {}",
            test_rows[0].len(),
            train.dim()
        )));
    }

    let priors = args
        .priors
        .as_deref()
        .or_else(|| config.get("priors"))
        .map(parse_priors)
        .transpose()?;
    let model = match &priors {
        Some(p) => fit_qda_with_priors(&train, p),
        None => fit_qda(&train),
    }
    .map_err(CmdError::from)?;

    let palette = if format != OutputFormat::Json {
        Some(Palette::default_for(&model.class_labels())?)
    } else {
        None
    };

    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CmdError::usage(format!("cannot create {}: {e}", out_dir.display())))?;

    // records stream out chunk by chunk in input order, so memory stays
    // flat on large test sets while each chunk classifies in parallel;
    // wheels are buffered so nothing lands on disk if a later chunk fails
    let mut writer = if format != OutputFormat::Svg {
        Some(JsonlWriter::create(&out_dir.join("predictions.jsonl"))?)
    } else {
        None
    };
    let mut wheels: Vec<String> = Vec::new();
    const CHUNK: usize = 512;
    let mut offset = 0;
    for rows in test_rows.chunks(CHUNK) {
        let labels = test_labels
            .as_deref()
            .map(|l| &l[offset..offset + rows.len()]);
        let points = classify_rows(&model, rows, labels, level)?;
        for (i, point) in points.iter().enumerate() {
            if let Some(writer) = writer.as_mut() {
                writer.line(&classified_record(offset + i, point))?;
            }
            if let Some(palette) = &palette {
                let wheel = build_wheel(&point.predicted, &point.phi, palette)?;
                wheels.push(render_svg(&wheel, size_px)?);
            }
        }
        offset += rows.len();
    }
    if let Some(writer) = writer {
        writer.finish()?;
    }
    write_atomic(&out_dir.join("model.json"), &io::model_to_json(&model))?;
    if !wheels.is_empty() {
        let wheel_dir = out_dir.join("wheels");
        std::fs::create_dir_all(&wheel_dir)
            .map_err(|e| CmdError::usage(format!("cannot create {}: {e}", wheel_dir.display())))?;
        for (i, svg) in wheels.iter().enumerate() {
            write_atomic(&wheel_dir.join(format!("row_{i:04}.svg")), svg)?;
        }
    }
    Ok(())
}

// ── wheel ───────────────────────────────────────────────────────────

pub fn run_wheel(args: &WheelArgs, config: &Config) -> Result<(), CmdError> {
    let size_px = resolve(args.size_px, config, "size_px", 256u32)?;
    let record = PhiRecord::from_json(&read_input(&args.input)?)?;
    let phi = record.to_phi()?;
    let fallback = phi
        .interior()
        .first()
        .copied()
        .or_else(|| phi.boundary().first().copied())
        .ok_or_else(|| CmdError::usage("document has no included label to use as the hub"))?
        .to_string();
    let wheel = wheel_for(args.hub.as_deref(), &fallback, &phi)?;
    let svg = render_svg(&wheel, size_px)?;
    emit(args.output.as_deref(), &svg)
}
