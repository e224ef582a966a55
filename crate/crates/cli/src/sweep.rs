//! Built-in sweep suites. Configurations are evaluated in parallel and reported sorted
//! by (workload_id, placement_id).

use std::io::Write;

use meshroof::calibration::Quantity;
use meshroof::mesh::MeshConfig;
use meshroof::model::CalibrationParams;
use meshroof::placement::{pattern, random_on_mesh, realize, PlacementMatrix, PlacementPattern};
use meshroof::report::ReportRow;
use meshroof::workload::{
    check_memory, gen_dense_linear_layer, gen_microbenchmark, gen_qubo, gen_tiled_identity, CoreMap, Microbenchmark,
    WorkloadLimits, WorkloadSpec, DENSE_SWEEP_CORES, DENSE_SWEEP_NEURONS_PER_CORE, DENSE_SWEEP_WEIGHT_BITS,
};
use rayon::prelude::*;

use crate::args::SweepArgs;
use crate::docs;
use crate::error::{CliError, Result};
use crate::params::Params;
use crate::{evaluate, write_report, THREADS_ENV};

pub const SUITES: [&str; 4] = ["dense-linear", "microbench", "tiled-identity-placements", "qubo"];

/// Problem sizes (neurons, cores) of the QUBO suite.
pub const QUBO_SIZES: [(u32, u32); 5] = [(250, 8), (500, 16), (1000, 32), (2000, 64), (4000, 120)];
/// Fraction of neurons spiking per step in each solver stage.
pub const QUBO_CHECKING_RATE: f64 = 0.02;
pub const QUBO_SWITCHING_RATE: f64 = 0.2;

struct Task {
    workload_id: String,
    placement_id: String,
    workload: WorkloadSpec,
    placement: Option<PlacementMatrix>,
}

impl Task {
    fn assigned(workload_id: String, workload: WorkloadSpec) -> Self {
        Self {
            workload_id,
            placement_id: "assigned".into(),
            workload,
            placement: None,
        }
    }
}

fn threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV}={v} is not a positive integer"))),
        },
    }
}

fn dense_linear(mesh: &MeshConfig, cal: &CalibrationParams, p: &mut Params) -> Result<Vec<Task>> {
    let cores = p.list("cores", &DENSE_SWEEP_CORES)?;
    let neurons = p.list("neurons_per_core", &DENSE_SWEEP_NEURONS_PER_CORE)?;
    let bits = p.list("weight_bits", &DENSE_SWEEP_WEIGHT_BITS)?;
    let limits = WorkloadLimits::default();
    let mut tasks = Vec::new();
    for &c in &cores {
        for &n in &neurons {
            for &b in &bits {
                // configurations that do not fit the chip are skipped
                let Ok(w) = gen_dense_linear_layer(c, n, b, mesh) else {
                    continue;
                };
                if check_memory(&w, &cal.packing(), &limits).is_err() {
                    continue;
                }
                tasks.push(Task::assigned(format!("dense-c{c:02}-n{n:03}-w{b}"), w));
            }
        }
    }
    Ok(tasks)
}

fn microbench(mesh: &MeshConfig, p: &mut Params) -> Result<Vec<Task>> {
    let mut tasks = vec![Task::assigned(
        "barrier".into(),
        gen_microbenchmark(Microbenchmark::Barrier, mesh).map_err(CliError::model)?,
    )];
    let link_neurons = p.get("link_neurons", meshroof::calibration::LINK_SWEEP_NEURONS)?;
    for q in Quantity::ALL {
        for &size in &p.list(&format!("{}_sizes", q.name()), q.default_sizes())? {
            let (id, bench) = match q {
                Quantity::Dendop => (format!("dendop-n{size:04}"), Microbenchmark::DendOp { n: size }),
                Quantity::Synop => (format!("synop-n{size:04}"), Microbenchmark::SynOp { n: size }),
                Quantity::Synmem => (format!("synmem-n{size:04}"), Microbenchmark::SynMemRead { n: size }),
                Quantity::Bandwidth => (
                    format!("bandwidth-m{size:02}"),
                    Microbenchmark::LinkBandwidth {
                        n: link_neurons,
                        pairs: size,
                    },
                ),
            };
            tasks.push(Task::assigned(
                id,
                gen_microbenchmark(bench, mesh).map_err(CliError::model)?,
            ));
        }
    }
    Ok(tasks)
}

/// Row and column counts of the most square `rows x cols = pairs` rectangle.
fn rect_shape(pairs: usize) -> (usize, usize) {
    let rows = (1..=pairs)
        .filter(|r| pairs.is_multiple_of(*r) && r * r <= pairs)
        .max()
        .unwrap_or(1);
    (rows, pairs / rows)
}

fn tiled_identity(mesh: &MeshConfig, p: &mut Params) -> Result<Vec<Task>> {
    let pairs: usize = p.get("pairs", 8)?;
    let neurons: u32 = p.get("neurons_per_core", 1024)?;
    let seeds: u64 = p.get("seeds", 20)?;
    let w = gen_tiled_identity(pairs as u32, pairs as u32, neurons, mesh).map_err(CliError::model)?;
    let workload_id = format!("tiled-identity-m{pairs:02}-n{neurons:04}");
    let (rows, cols) = rect_shape(pairs);
    let mut named = vec![
        PlacementPattern::SaturatedRect { n: rows, m: cols },
        PlacementPattern::Identity { n: pairs },
    ];
    if pairs.is_multiple_of(4) {
        named.push(PlacementPattern::Xshape { n: pairs / 2 });
    }
    let mut placements = Vec::new();
    for kind in named {
        let m = pattern(&kind).map_err(CliError::model)?;
        // patterns wider or taller than the chip are left out
        if m.rows() <= mesh.rows as usize && m.cols() <= mesh.cols as usize {
            placements.push((kind.label(), m));
        }
    }
    for seed in 0..seeds {
        let m = random_on_mesh(pairs, mesh, seed).map_err(CliError::model)?;
        placements.push((format!("random-{pairs}-s{seed:03}"), m));
    }
    Ok(placements
        .into_iter()
        .map(|(placement_id, m)| Task {
            workload_id: workload_id.clone(),
            placement_id,
            workload: w.clone(),
            placement: Some(m),
        })
        .collect())
}

fn qubo(mesh: &MeshConfig, p: &mut Params) -> Result<Vec<Task>> {
    let checking = p.get("checking_rate", QUBO_CHECKING_RATE)?;
    let switching = p.get("switching_rate", QUBO_SWITCHING_RATE)?;
    let mut tasks = Vec::new();
    for (n, cores) in QUBO_SIZES {
        let (c, s) = gen_qubo(n, cores, checking, switching, mesh).map_err(CliError::model)?;
        tasks.push(Task::assigned(format!("qubo-n{n:04}-checking"), c));
        tasks.push(Task::assigned(format!("qubo-n{n:04}-switching"), s));
    }
    Ok(tasks)
}

fn evaluate_task(t: &Task, mesh: &MeshConfig, cal: &CalibrationParams, oracle: bool) -> meshroof::Result<ReportRow> {
    let map = match &t.placement {
        None => CoreMap::from_workload(&t.workload),
        Some(p) => realize(p, &t.workload, mesh)?,
    };
    evaluate(&t.workload, &map, mesh, cal, oracle, &t.workload_id, &t.placement_id)
}

pub fn run(a: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    if !SUITES.contains(&a.suite.as_str()) {
        return Err(CliError::Usage(format!(
            "unknown suite `{}`; expected one of {}",
            a.suite,
            SUITES.join(", ")
        )));
    }
    let cal = docs::load_calibration(&a.calib)?;
    let mesh = match (&a.mesh, a.suite.as_str()) {
        // the placement comparison needs room for eight pairs in a row and a column
        (None, "tiled-identity-placements") => MeshConfig::new(8, 8).map_err(CliError::model)?,
        (m, _) => docs::load_mesh(m.as_deref())?,
    };
    let mut params = Params::parse(&a.params)?;
    let tasks = match a.suite.as_str() {
        "dense-linear" => dense_linear(&mesh, &cal, &mut params)?,
        "microbench" => microbench(&mesh, &mut params)?,
        "tiled-identity-placements" => tiled_identity(&mesh, &mut params)?,
        _ => qubo(&mesh, &mut params)?,
    };
    params.finish()?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads()? {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let mut rows = pool
        .install(|| {
            tasks
                .par_iter()
                .map(|t| evaluate_task(t, &mesh, &cal, a.oracle))
                .collect::<meshroof::Result<Vec<_>>>()
        })
        .map_err(CliError::model)?;
    rows.sort_by(|x, y| x.sort_key().cmp(&y.sort_key()));
    write_report(out, rows, a.format)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_shape_is_most_square() {
        assert_eq!(rect_shape(8), (2, 4));
        assert_eq!(rect_shape(16), (4, 4));
        assert_eq!(rect_shape(7), (1, 7));
    }
}
