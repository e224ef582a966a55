//! On-disk document formats and their strict loaders.
//!
//! Every document carries `schema_version`; unknown fields are rejected. Parse and
//! validation failures name the file and the JSON pointer of the offending value.

use std::collections::BTreeMap;
use std::path::Path;

use meshroof::mesh::{CoreId, MeshConfig};
use meshroof::model::CalibrationParams;
use meshroof::placement::{pattern, PlacementMatrix, PlacementPattern};
use meshroof::report::ReportRow;
use meshroof::workload::{check_memory, Connection, Population, WorkloadLimits, WorkloadSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadDoc {
    pub schema_version: u32,
    pub populations: Vec<Population>,
    pub connections: Vec<Connection>,
    #[serde(default)]
    pub assignment: BTreeMap<String, Vec<CoreId>>,
}

impl From<WorkloadSpec> for WorkloadDoc {
    fn from(w: WorkloadSpec) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            populations: w.populations,
            connections: w.connections,
            assignment: w.assignment,
        }
    }
}

impl From<WorkloadDoc> for WorkloadSpec {
    fn from(d: WorkloadDoc) -> Self {
        Self {
            populations: d.populations,
            connections: d.connections,
            assignment: d.assignment,
        }
    }
}

/// A named pattern or an explicit 0/1 matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementDoc {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PlacementPattern>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PlacementMatrix>,
}

impl PlacementDoc {
    pub fn from_pattern(p: PlacementPattern) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            pattern: Some(p),
            matrix: None,
        }
    }

    /// Label for report rows.
    pub fn label(&self) -> String {
        match &self.pattern {
            Some(p) => p.label(),
            None => "custom".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshDoc {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub rows: u32,
    pub cols: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cores_per_router: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallel_meshes: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reserved_slots: Vec<CoreId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub core_link_sharing: Option<u32>,
}

impl MeshDoc {
    fn into_mesh(self) -> MeshConfig {
        let d = MeshConfig {
            rows: self.rows,
            cols: self.cols,
            ..MeshConfig::loihi2()
        };
        MeshConfig {
            cores_per_router: self.cores_per_router.unwrap_or(d.cores_per_router),
            parallel_meshes: self.parallel_meshes.unwrap_or(d.parallel_meshes),
            reserved_slots: self.reserved_slots.into_iter().collect(),
            core_link_sharing: self.core_link_sharing.unwrap_or(d.core_link_sharing),
            ..d
        }
    }
}

impl From<&MeshConfig> for MeshDoc {
    fn from(m: &MeshConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            rows: m.rows,
            cols: m.cols,
            cores_per_router: Some(m.cores_per_router),
            parallel_meshes: Some(m.parallel_meshes),
            reserved_slots: m.reserved_slots.iter().copied().collect(),
            core_link_sharing: Some(m.core_link_sharing),
        }
    }
}

/// Calibration file: seconds and bits per second throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationDoc {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub t_dendop_s: f64,
    pub t_synop_s: f64,
    pub t_synmem_read_s: f64,
    pub link_bandwidth_bps: f64,
    pub t_barrier_s: f64,
    pub word_width_bits: u32,
    pub index_bits: u32,
    pub bits_per_message_default: u32,
}

impl From<CalibrationDoc> for CalibrationParams {
    fn from(d: CalibrationDoc) -> Self {
        Self {
            t_dendop: d.t_dendop_s,
            t_synop: d.t_synop_s,
            t_synmem_read: d.t_synmem_read_s,
            link_bandwidth: d.link_bandwidth_bps,
            t_barrier: d.t_barrier_s,
            word_width: d.word_width_bits,
            index_bits: d.index_bits,
            bits_per_message_default: d.bits_per_message_default,
        }
    }
}

impl From<&CalibrationParams> for CalibrationDoc {
    fn from(c: &CalibrationParams) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            t_dendop_s: c.t_dendop,
            t_synop_s: c.t_synop,
            t_synmem_read_s: c.t_synmem_read,
            link_bandwidth_bps: c.link_bandwidth,
            t_barrier_s: c.t_barrier,
            word_width_bits: c.word_width,
            index_bits: c.index_bits,
            bits_per_message_default: c.bits_per_message_default,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDoc {
    pub schema_version: u32,
    pub rows: Vec<ReportRow>,
}

/// JSON pointer of a deserialization path; the document root is `/`.
fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => {}
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn is_toml(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"))
}

/// Reads a JSON (or, by extension, TOML) document strictly.
pub fn parse<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read(path)?;
    if is_toml(path) {
        let value: toml::Table = toml::from_str(&text).map_err(|e| CliError::invalid(path, None, e.to_string()))?;
        return serde_path_to_error::deserialize(toml::Value::Table(value))
            .map_err(|e| CliError::invalid(path, Some(pointer(e.path())), e.inner().to_string()));
    }
    let mut de = serde_json::Deserializer::from_str(&text);
    let value: T = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| CliError::invalid(path, Some(pointer(e.path())), e.inner().to_string()))?;
    de.end().map_err(|e| CliError::invalid(path, None, e.to_string()))?;
    Ok(value)
}

fn check_version(path: &Path, v: u32) -> Result<()> {
    if v == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(CliError::invalid(
            path,
            Some("/schema_version".into()),
            format!("unsupported schema version {v}, expected {SCHEMA_VERSION}"),
        ))
    }
}

pub fn load_mesh(path: Option<&Path>) -> Result<MeshConfig> {
    let Some(path) = path else {
        return Ok(MeshConfig::loihi2());
    };
    let doc: MeshDoc = parse(path)?;
    check_version(path, doc.schema_version)?;
    let mesh = doc.into_mesh();
    mesh.validate().map_err(|e| CliError::from_model(path, e))?;
    Ok(mesh)
}

pub fn load_calibration(path: &Path) -> Result<CalibrationParams> {
    let doc: CalibrationDoc = parse(path)?;
    check_version(path, doc.schema_version)?;
    let cal = CalibrationParams::from(doc);
    cal.validate().map_err(|e| CliError::from_model(path, e))?;
    Ok(cal)
}

/// Loads a workload and checks it against the chip, the neuron capacity and, when a
/// calibration is given, the synaptic memory budget.
pub fn load_workload(path: &Path, mesh: &MeshConfig, cal: Option<&CalibrationParams>) -> Result<WorkloadSpec> {
    let doc: WorkloadDoc = parse(path)?;
    check_version(path, doc.schema_version)?;
    let w = WorkloadSpec::from(doc);
    let limits = WorkloadLimits::default();
    w.validate(mesh, &limits).map_err(|e| CliError::from_model(path, e))?;
    if let Some(cal) = cal {
        check_memory(&w, &cal.packing(), &limits).map_err(|e| CliError::from_model(path, e))?;
    }
    Ok(w)
}

pub fn load_placement(path: &Path) -> Result<(PlacementDoc, PlacementMatrix)> {
    let doc: PlacementDoc = parse(path)?;
    check_version(path, doc.schema_version)?;
    let matrix = match (&doc.pattern, &doc.matrix) {
        (Some(p), None) => pattern(p).map_err(|e| CliError::from_model(path, e))?,
        (None, Some(m)) => m.clone(),
        _ => {
            return Err(CliError::invalid(
                path,
                Some("/".into()),
                "exactly one of `pattern` and `matrix` is required",
            ))
        }
    };
    Ok((doc, matrix))
}

pub fn load_report(path: &Path) -> Result<ReportDoc> {
    let doc: ReportDoc = parse(path)?;
    check_version(path, doc.schema_version)?;
    Ok(doc)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}
