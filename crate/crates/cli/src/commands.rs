use std::io::Write;
use std::path::Path;

use meshroof::analytic::{brute_force_loads, nll_closed_form, nll_formula, nll_permutation_bound, ScalingPattern};
use meshroof::calibration::Quantity;
use meshroof::mesh::MeshConfig;
use meshroof::model::{fit_effective_rate, fit_largest_count, CalibrationParams, MeasurementSeries};
use meshroof::placement::{pattern, realize, PlacementPattern};
use meshroof::report::{link_records, render_heatmap, scaling_records, LINK_COLUMNS, SCALING_COLUMNS};
use meshroof::traffic::{compute_link_loads, router_heatmap};
use meshroof::workload::{
    gen_dense_linear_layer, gen_microbenchmark, gen_qubo, gen_tiled_identity, CoreMap, Microbenchmark, WorkloadSpec,
};

use crate::args::{
    AnalyticArgs, CalibrateArgs, EstimateArgs, FitMethod, GenerateCommand, PatternName, ScalingArgs, TrafficArgs,
};
use crate::docs::{self, CalibrationDoc, MeshDoc, PlacementDoc, WorkloadDoc};
use crate::error::{CliError, Result};
use crate::params::Params;
use crate::{evaluate, write_csv, write_report};

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "workload".into())
}

/// Core map of the workload's own assignment, or of a pair placement applied to it.
fn core_map(w: &WorkloadSpec, mesh: &MeshConfig, placement: Option<&Path>) -> Result<(CoreMap, String)> {
    match placement {
        None => Ok((CoreMap::from_workload(w), "assigned".into())),
        Some(path) => {
            let (doc, matrix) = docs::load_placement(path)?;
            let map = realize(&matrix, w, mesh).map_err(|e| CliError::from_model(path, e))?;
            Ok((map, doc.label()))
        }
    }
}

pub fn estimate(a: &EstimateArgs, out: &mut dyn Write) -> Result<()> {
    let mesh = docs::load_mesh(a.mesh.as_deref())?;
    let cal = docs::load_calibration(&a.calib)?;
    let w = docs::load_workload(&a.workload, &mesh, Some(&cal))?;
    let (map, label) = core_map(&w, &mesh, a.placement.as_deref())?;
    let wid = a.workload_id.clone().unwrap_or_else(|| stem(&a.workload));
    let pid = a.placement_id.clone().unwrap_or(label);
    let row = evaluate(&w, &map, &mesh, &cal, a.oracle, &wid, &pid).map_err(CliError::model)?;
    write_report(out, vec![row], a.format)
}

pub fn traffic(a: &TrafficArgs, out: &mut dyn Write) -> Result<()> {
    let mesh = docs::load_mesh(a.mesh.as_deref())?;
    let w = docs::load_workload(&a.workload, &mesh, None)?;
    let (map, _) = core_map(&w, &mesh, a.placement.as_deref())?;
    let loads = compute_link_loads(&w, &map, &mesh).map_err(CliError::model)?;
    if a.heatmap {
        out.write_all(render_heatmap(&router_heatmap(&loads, &mesh)).as_bytes())?;
        Ok(())
    } else {
        write_csv(out, &LINK_COLUMNS, link_records(&loads))
    }
}

fn pattern_kind(
    name: PatternName,
    n: usize,
    m: Option<usize>,
    a: Option<usize>,
    seed: u64,
) -> Result<PlacementPattern> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| CliError::Usage(format!("pattern needs --{flag}")));
    Ok(match name {
        PatternName::Rect => PlacementPattern::SaturatedRect { n, m: need(m, "m")? },
        PatternName::Square => PlacementPattern::Square { n },
        PatternName::Xshape => PlacementPattern::Xshape { n },
        PatternName::Identity => PlacementPattern::Identity { n },
        PatternName::Permutation => PlacementPattern::Permutation {
            n,
            a: need(a, "a")?,
            seed,
        },
    })
}

fn opt(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn analytic(a: &AnalyticArgs, out: &mut dyn Write) -> Result<()> {
    let kind = pattern_kind(a.pattern, a.n, a.m, a.a, a.seed)?;
    let p = pattern(&kind).map_err(CliError::model)?;
    let formula = nll_formula(&p).value;
    let (closed, bound) = match kind {
        PlacementPattern::Permutation { n, a, .. } => {
            (None, Some(nll_permutation_bound(n, a).map_err(CliError::model)?))
        }
        _ => (Some(nll_closed_form(&kind).map_err(CliError::model)?), None),
    };
    let brute = a.compare_bruteforce.then(|| brute_force_loads(&p).directions().left);
    write_csv(
        out,
        &["pattern", "closed_form", "bound", "formula", "brute_force"],
        [vec![
            kind.label(),
            opt(closed),
            opt(bound),
            formula.to_string(),
            opt(brute),
        ]],
    )?;
    let mut problems = Vec::new();
    if let Some(c) = closed.filter(|&c| c != formula) {
        problems.push(format!("closed form {c} != formula {formula}"));
    }
    if let Some(b) = bound.filter(|&b| formula > b) {
        problems.push(format!("formula {formula} exceeds bound {b}"));
    }
    if let Some(b) = brute.filter(|&b| b != formula) {
        problems.push(format!("brute force {b} != formula {formula}"));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("{}: {}", kind.label(), problems.join("; "))))
    }
}

pub fn scaling_table(a: &ScalingArgs, out: &mut dyn Write) -> Result<()> {
    let kinds = a
        .patterns
        .iter()
        .map(|s| match s.as_str() {
            "square" => Ok(ScalingPattern::Square),
            "xshape" => Ok(ScalingPattern::Xshape),
            "identity" => Ok(ScalingPattern::Identity),
            other => Err(CliError::Usage(format!("unknown scaling pattern `{other}`"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = meshroof::analytic::scaling_table(&kinds, &a.pairs).map_err(CliError::model)?;
    write_csv(out, &SCALING_COLUMNS, scaling_records(&rows))
}

fn read_series(path: &Path) -> Result<MeasurementSeries> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| CliError::invalid(path, None, e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != ["count", "time_s"] {
        return Err(CliError::invalid(path, None, "header must be `count,time_s`"));
    }
    let mut points = Vec::new();
    for record in rdr.deserialize::<(f64, f64)>() {
        points.push(record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CliError::invalid(path, None, format!("line {line}: {e}"))
        })?);
    }
    MeasurementSeries::new(points).map_err(|e| CliError::invalid(path, None, e.to_string()))
}

pub fn calibrate(a: &CalibrateArgs, out: &mut dyn Write) -> Result<()> {
    let q = Quantity::from_name(&a.quantity).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown quantity `{}`; expected dendop, synop, synmem or bandwidth",
            a.quantity
        ))
    })?;
    let series = read_series(&a.series)?;
    let (method, fit) = match a.method {
        FitMethod::Fit => ("fit", fit_effective_rate(&series)),
        FitMethod::LargestN => ("largest-n", fit_largest_count(&series)),
    };
    let fit = fit.map_err(|e| CliError::invalid(&a.series, None, e.to_string()))?;
    write_csv(
        out,
        &["quantity", "method", "per_unit_time_s", "offset_s", "throughput_per_s"],
        [vec![
            q.name().to_string(),
            method.to_string(),
            fit.per_unit_time.to_string(),
            fit.offset.to_string(),
            fit.throughput().to_string(),
        ]],
    )
}

fn generate_workload(kind: &str, mesh: &MeshConfig, p: &mut Params) -> Result<WorkloadSpec> {
    let bench = |b: Microbenchmark| gen_microbenchmark(b, mesh);
    let w = match kind {
        "dense-linear" => gen_dense_linear_layer(
            p.get("cores", 8)?,
            p.get("neurons_per_core", 64)?,
            p.get("weight_bits", 8)?,
            mesh,
        ),
        "tiled-identity" => gen_tiled_identity(
            p.get("origin_cores", 8)?,
            p.get("dest_cores", 8)?,
            p.get("neurons_per_core", 1024)?,
            mesh,
        ),
        "qubo-checking" | "qubo-switching" => {
            let stages = gen_qubo(
                p.get("neurons", 1000)?,
                p.get("cores", 32)?,
                p.get("checking_rate", crate::sweep::QUBO_CHECKING_RATE)?,
                p.get("switching_rate", crate::sweep::QUBO_SWITCHING_RATE)?,
                mesh,
            );
            stages.map(|(c, s)| if kind == "qubo-checking" { c } else { s })
        }
        "barrier" => bench(Microbenchmark::Barrier),
        "dendop" => bench(Microbenchmark::DendOp { n: p.get("n", 4095)? }),
        "synop" => bench(Microbenchmark::SynOp { n: p.get("n", 1024)? }),
        "synmem" => bench(Microbenchmark::SynMemRead { n: p.get("n", 1024)? }),
        "link-bandwidth" => bench(Microbenchmark::LinkBandwidth {
            n: p.get("n", 4095)?,
            pairs: p.get("pairs", 12)?,
        }),
        other => return Err(CliError::Usage(format!("unknown workload kind `{other}`"))),
    };
    w.map_err(CliError::model)
}

pub fn generate(g: GenerateCommand, out: &mut dyn Write) -> Result<()> {
    let text = match g {
        GenerateCommand::Workload { kind, mesh, params } => {
            let mesh = docs::load_mesh(mesh.as_deref())?;
            let mut p = Params::parse(&params)?;
            let w = generate_workload(&kind, &mesh, &mut p)?;
            p.finish()?;
            docs::to_json(&WorkloadDoc::from(w))
        }
        GenerateCommand::Placement {
            pattern: name,
            n,
            m,
            a,
            seed,
        } => {
            let kind = pattern_kind(name, n, m, a, seed)?;
            pattern(&kind).map_err(CliError::model)?;
            docs::to_json(&PlacementDoc::from_pattern(kind))
        }
        GenerateCommand::Calib { toml } => {
            let doc = CalibrationDoc::from(&CalibrationParams::synthetic());
            if toml {
                toml::to_string(&doc).expect("calibration serializes")
            } else {
                docs::to_json(&doc)
            }
        }
        GenerateCommand::Mesh { rows, cols } => {
            let mesh = MeshConfig::new(rows, cols).map_err(CliError::model)?;
            docs::to_json(&MeshDoc::from(&mesh))
        }
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}
