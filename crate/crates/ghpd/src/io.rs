//! File formats: posterior/grid JSON, dataset CSV, credible-set documents,
//! and model persistence.
//!
//! Every float is emitted with 17 significant digits, enough for a
//! bit-exact f64 round trip, and documents keep their label order.

use crate::credible::{Phi, Region};
use crate::error::{Error, Result};
use crate::grid::GridPosterior;
use crate::posterior::DiscretePosterior;
use crate::qda::{LabeledDataset, QdaModel};
use nalgebra::DMatrix;
use serde_json::{json, Map, Value};

/// Serializes a JSON value with 17-significant-digit floats.
pub fn to_json_string(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigitFormatter);
    serde::Serialize::serialize(value, &mut ser).expect("in-memory serialization");
    String::from_utf8(out).expect("serializer emits UTF-8")
}

/// A compact formatter that writes every f64 as `{:.16e}` (17 significant
/// digits) and never leaves a literal `--` inside strings, so documents can
/// be embedded in XML comments verbatim.
struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_string_fragment<W: ?Sized + std::io::Write>(
        &mut self,
        writer: &mut W,
        fragment: &str,
    ) -> std::io::Result<()> {
        writer.write_all(fragment.replace("--", "-\\u002d").as_bytes())
    }
}

fn obj_f64(map: &Map<String, Value>, key: &str) -> Result<f64> {
    map.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::InvalidDocument(format!("missing or non-numeric field {key:?}")))
}

fn obj_array<'a>(map: &'a Map<String, Value>, key: &str) -> Result<&'a Vec<Value>> {
    map.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidDocument(format!("missing or non-array field {key:?}")))
}

fn as_object(value: &Value) -> Result<&Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| Error::InvalidDocument("expected a JSON object".into()))
}

fn string_list(values: &[Value], what: &str) -> Result<Vec<String>> {
    values
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::InvalidDocument(format!("{what} must be strings")))
        })
        .collect()
}

fn f64_list(values: &[Value], what: &str) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|v| {
            v.as_f64()
                .ok_or_else(|| Error::InvalidDocument(format!("{what} must be numbers")))
        })
        .collect()
}

// ── posterior ───────────────────────────────────────────────────────

/// Reads `{"labels": [...], "probs": [...]}` (pre-normalized) or
/// `{"labels": [...], "weights": [...]}` (raw, normalized on load).
pub fn posterior_from_json(text: &str) -> Result<DiscretePosterior> {
    let value: Value = serde_json::from_str(text)?;
    let obj = as_object(&value)?;
    let labels = string_list(obj_array(obj, "labels")?, "labels")?;
    if let Some(Value::Array(probs)) = obj.get("probs") {
        DiscretePosterior::from_probs(labels, f64_list(probs, "probs")?)
    } else if let Some(Value::Array(weights)) = obj.get("weights") {
        DiscretePosterior::from_weights(labels, f64_list(weights, "weights")?)
    } else {
        Err(Error::InvalidDocument(
            "posterior needs a \"probs\" or \"weights\" array".into(),
        ))
    }
}

pub fn posterior_to_json(post: &DiscretePosterior) -> String {
    to_json_string(&json!({
        "labels": post.labels(),
        "probs": post.probs(),
    }))
}

/// Reads CSV with header `label,prob`.
pub fn posterior_from_csv(text: &str) -> Result<DiscretePosterior> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "label" || &headers[1] != "prob" {
        return Err(Error::InvalidDocument(
            "posterior CSV must have header \"label,prob\"".into(),
        ));
    }
    let mut labels = Vec::new();
    let mut probs = Vec::new();
    for record in reader.records() {
        let record = record?;
        labels.push(record[0].to_string());
        probs.push(
            record[1]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Csv(format!("bad probability {:?}: {e}", &record[1])))?,
        );
    }
    DiscretePosterior::from_probs(labels, probs)
}

// ── grid ────────────────────────────────────────────────────────────

/// Reads `{"lo": l, "hi": h, "step": s, "density": [...]}`.
pub fn grid_from_json(text: &str) -> Result<GridPosterior> {
    let value: Value = serde_json::from_str(text)?;
    let obj = as_object(&value)?;
    GridPosterior::new(
        obj_f64(obj, "lo")?,
        obj_f64(obj, "hi")?,
        obj_f64(obj, "step")?,
        f64_list(obj_array(obj, "density")?, "density")?,
    )
}

pub fn grid_to_json(grid: &GridPosterior) -> String {
    to_json_string(&json!({
        "lo": grid.lo(),
        "hi": grid.hi(),
        "step": grid.step(),
        "density": grid.density(),
    }))
}

// ── credible-set documents ──────────────────────────────────────────

/// The serialized form of a [`Phi`]: metadata, per-label values in input
/// order, the three-way partition, and the achieved mass and size.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiRecord {
    pub alpha: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub phi: Vec<(String, f64)>,
    pub interior: Vec<String>,
    pub boundary: Vec<String>,
    pub exterior: Vec<String>,
    pub credible_mass: f64,
    pub size: f64,
}

impl PhiRecord {
    pub fn from_phi(phi: &Phi) -> Self {
        Self {
            alpha: phi.alpha(),
            kappa: phi.kappa(),
            gamma: phi.gamma(),
            phi: phi
                .labels()
                .iter()
                .cloned()
                .zip(phi.values().iter().copied())
                .collect(),
            interior: phi.interior().iter().map(|s| s.to_string()).collect(),
            boundary: phi.boundary().iter().map(|s| s.to_string()).collect(),
            exterior: phi.exterior().iter().map(|s| s.to_string()).collect(),
            credible_mass: phi.achieved_mass(),
            size: phi.size(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut phi_map = Map::new();
        for (label, value) in &self.phi {
            phi_map.insert(label.clone(), json!(value));
        }
        to_json_string(&json!({
            "alpha": self.alpha,
            "kappa": self.kappa,
            "gamma": self.gamma,
            "phi": Value::Object(phi_map),
            "interior": self.interior,
            "boundary": self.boundary,
            "exterior": self.exterior,
            "credible_mass": self.credible_mass,
            "size": self.size,
        }))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let obj = as_object(&value)?;
        let phi_obj = obj
            .get("phi")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::InvalidDocument("missing \"phi\" object".into()))?;
        let mut phi = Vec::with_capacity(phi_obj.len());
        for (label, v) in phi_obj {
            let v = v
                .as_f64()
                .ok_or_else(|| Error::InvalidDocument("phi values must be numbers".into()))?;
            phi.push((label.clone(), v));
        }
        Ok(Self {
            alpha: obj_f64(obj, "alpha")?,
            kappa: obj_f64(obj, "kappa")?,
            gamma: obj_f64(obj, "gamma")?,
            phi,
            interior: string_list(obj_array(obj, "interior")?, "interior")?,
            boundary: string_list(obj_array(obj, "boundary")?, "boundary")?,
            exterior: string_list(obj_array(obj, "exterior")?, "exterior")?,
            credible_mass: obj_f64(obj, "credible_mass")?,
            size: obj_f64(obj, "size")?,
        })
    }

    /// Validates the document invariants and rebuilds the membership
    /// function: values must be 0, gamma, or 1 (within 1e-12) and the three
    /// partition lists must agree with them.
    pub fn to_phi(&self) -> Result<Phi> {
        if self.alpha <= 0.0 || self.alpha >= 1.0 {
            return Err(Error::InvalidDocument(format!(
                "alpha {} outside (0,1)",
                self.alpha
            )));
        }
        if self.kappa <= 0.0 {
            return Err(Error::InvalidDocument(format!(
                "kappa {} must be positive",
                self.kappa
            )));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidDocument(format!(
                "gamma {} outside [0,1]",
                self.gamma
            )));
        }
        let tol = 1e-12;
        let mut labels = Vec::with_capacity(self.phi.len());
        let mut values = Vec::with_capacity(self.phi.len());
        let mut regions = Vec::with_capacity(self.phi.len());
        for (label, v) in &self.phi {
            let region = if (v - 1.0).abs() <= tol {
                Region::Interior
            } else if v.abs() <= tol {
                Region::Exterior
            } else if (v - self.gamma).abs() <= tol {
                Region::Boundary
            } else {
                return Err(Error::InvalidDocument(format!(
                    "phi value {v} for {label:?} is none of 0, gamma, 1"
                )));
            };
            // gamma itself may be 0 or 1; the partition lists disambiguate
            let region = if self.boundary.contains(label) && (v - self.gamma).abs() <= tol {
                Region::Boundary
            } else {
                region
            };
            let expected = match region {
                Region::Interior => &self.interior,
                Region::Boundary => &self.boundary,
                Region::Exterior => &self.exterior,
            };
            if !expected.contains(label) {
                return Err(Error::InvalidDocument(format!(
                    "label {label:?} not listed in its region"
                )));
            }
            labels.push(label.clone());
            values.push(*v);
            regions.push(region);
        }
        let listed = self.interior.len() + self.boundary.len() + self.exterior.len();
        if listed != self.phi.len() {
            return Err(Error::InvalidDocument(
                "interior/boundary/exterior must partition the label set".into(),
            ));
        }
        Ok(Phi::from_parts(
            self.alpha,
            self.kappa,
            self.gamma,
            labels,
            values,
            regions,
            self.credible_mass,
        ))
    }
}

// ── datasets ────────────────────────────────────────────────────────

/// Writes CSV with header `f1,...,fd,label`.
pub fn dataset_to_csv(data: &LabeledDataset) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=data.dim()).map(|j| format!("f{j}")).collect();
    header.push("label".to_string());
    writer.write_record(&header).expect("in-memory write");
    for i in 0..data.n() {
        let mut row: Vec<String> = data.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        row.push(data.label(i).to_string());
        writer.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("UTF-8")
}

/// Reads CSV with header `f1,...,fd,label`.
pub fn dataset_from_csv(text: &str) -> Result<LabeledDataset> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.len() < 2 || &headers[headers.len() - 1] != "label" {
        return Err(Error::InvalidDocument(
            "dataset CSV must end with a \"label\" column".into(),
        ));
    }
    let dim = headers.len() - 1;
    for (j, name) in headers.iter().take(dim).enumerate() {
        if name != format!("f{}", j + 1) {
            return Err(Error::InvalidDocument(format!(
                "feature column {} must be named f{}, got {name:?}",
                j + 1,
                j + 1
            )));
        }
    }
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != dim + 1 {
            return Err(Error::RaggedRow {
                row: i,
                got: record.len().saturating_sub(1),
                expected: dim,
            });
        }
        let mut row = Vec::with_capacity(dim);
        for j in 0..dim {
            row.push(
                record[j]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Csv(format!("row {i}: bad feature {:?}: {e}", &record[j])))?,
            );
        }
        features.push(row);
        labels.push(record[dim].to_string());
    }
    LabeledDataset::new(features, labels)
}

/// Feature rows plus the labels when the file carried a label column.
pub type TestRows = (Vec<Vec<f64>>, Option<Vec<String>>);

/// Reads feature rows from CSV with header `f1,...,fd` or `f1,...,fd,label`;
/// the labels come back when present.
pub fn test_rows_from_csv(text: &str) -> Result<TestRows> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.is_empty() {
        return Err(Error::InvalidDocument("empty CSV header".into()));
    }
    let labeled = &headers[headers.len() - 1] == "label";
    let dim = if labeled {
        headers.len() - 1
    } else {
        headers.len()
    };
    if dim == 0 {
        return Err(Error::InvalidDocument("no feature columns".into()));
    }
    for (j, name) in headers.iter().take(dim).enumerate() {
        if name != format!("f{}", j + 1) {
            return Err(Error::InvalidDocument(format!(
                "feature column {} must be named f{}, got {name:?}",
                j + 1,
                j + 1
            )));
        }
    }
    let mut features = Vec::new();
    let mut labels = if labeled { Some(Vec::new()) } else { None };
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != headers.len() {
            return Err(Error::RaggedRow {
                row: i,
                got: record.len(),
                expected: headers.len(),
            });
        }
        let mut row = Vec::with_capacity(dim);
        for j in 0..dim {
            row.push(
                record[j]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Csv(format!("row {i}: bad feature {:?}: {e}", &record[j])))?,
            );
        }
        features.push(row);
        if let Some(labels) = labels.as_mut() {
            labels.push(record[dim].to_string());
        }
    }
    if features.is_empty() {
        return Err(Error::EmptyInput("test rows"));
    }
    Ok((features, labels))
}

// ── model persistence ───────────────────────────────────────────────

pub fn model_to_json(model: &QdaModel) -> String {
    let classes: Vec<Value> = model
        .classes()
        .iter()
        .map(|c| {
            let cov = c.covariance();
            let rows: Vec<Vec<f64>> = (0..cov.nrows())
                .map(|i| (0..cov.ncols()).map(|j| cov[(i, j)]).collect())
                .collect();
            json!({
                "label": c.label(),
                "mean": c.mean(),
                "cov": rows,
                "prior": c.prior(),
            })
        })
        .collect();
    to_json_string(&json!({ "classes": classes }))
}

pub fn model_from_json(text: &str) -> Result<QdaModel> {
    let value: Value = serde_json::from_str(text)?;
    let obj = as_object(&value)?;
    let classes = obj_array(obj, "classes")?;
    let mut parts = Vec::with_capacity(classes.len());
    for class in classes {
        let class = as_object(class)?;
        let label = class
            .get("label")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::InvalidDocument("class needs a string label".into()))?;
        let mean = f64_list(obj_array(class, "mean")?, "mean")?;
        let d = mean.len();
        let cov_rows = obj_array(class, "cov")?;
        if cov_rows.len() != d {
            return Err(Error::InvalidDocument(format!(
                "class {label:?}: cov must be {d}x{d}"
            )));
        }
        let mut cov = DMatrix::zeros(d, d);
        for (i, row) in cov_rows.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| Error::InvalidDocument("cov rows must be arrays".into()))?;
            let row = f64_list(row, "cov")?;
            if row.len() != d {
                return Err(Error::InvalidDocument(format!(
                    "class {label:?}: cov must be {d}x{d}"
                )));
            }
            for (j, v) in row.into_iter().enumerate() {
                cov[(i, j)] = v;
            }
        }
        parts.push((label.to_string(), mean, cov, obj_f64(class, "prior")?));
    }
    QdaModel::from_parts(parts)
}
