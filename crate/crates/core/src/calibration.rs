//! Microbenchmark sweeps and recovery of effective rates from their timings.
//!
//! Each sweep scales one microbenchmark so that one term dominates. A single sweep
//! fitted on its own still carries the small contributions of the other resources (a
//! SynOp sweep also reads synaptic memory, a SynMem sweep also performs SynOps).
//! [`calibrate_suite`] removes them: it fits every sweep against the residual left
//! after subtracting the current estimates of all other rates, and repeats until the
//! estimates settle.

use serde::{Deserialize, Serialize};

use crate::mesh::MeshConfig;
use crate::model::{fit_effective_rate, CalibrationParams, MeasurementSeries, RateFit};
use crate::simref::simulate_step;
use crate::traffic::{compute_link_loads, heaviest_link, HeaviestLink};
use crate::workload::{derive_op_counts, gen_microbenchmark, CoreMap, Microbenchmark, OpCounts, Packing};
use crate::{Error, Result};

/// Neurons per pair in the link bandwidth sweep.
pub const LINK_SWEEP_NEURONS: u32 = 4095;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Dendop,
    Synop,
    Synmem,
    Bandwidth,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [Quantity::Dendop, Quantity::Synop, Quantity::Synmem, Quantity::Bandwidth];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Dendop => "dendop",
            Quantity::Synop => "synop",
            Quantity::Synmem => "synmem",
            Quantity::Bandwidth => "bandwidth",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|q| q.name() == s)
    }

    /// Default sweep sizes: neurons for compute sweeps, pairs for the bandwidth sweep.
    pub fn default_sizes(self) -> &'static [u32] {
        match self {
            Quantity::Dendop => &[256, 512, 1024, 2048, 4095],
            Quantity::Synop | Quantity::Synmem => &[64, 128, 256, 512, 1024],
            Quantity::Bandwidth => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12],
        }
    }

    fn benchmark(self, size: u32) -> Microbenchmark {
        match self {
            Quantity::Dendop => Microbenchmark::DendOp { n: size },
            Quantity::Synop => Microbenchmark::SynOp { n: size },
            Quantity::Synmem => Microbenchmark::SynMemRead { n: size },
            Quantity::Bandwidth => Microbenchmark::LinkBandwidth {
                n: LINK_SWEEP_NEURONS,
                pairs: size,
            },
        }
    }

    fn rate(self, cal: &CalibrationParams) -> f64 {
        match self {
            Quantity::Dendop => cal.t_dendop,
            Quantity::Synop => cal.t_synop,
            Quantity::Synmem => cal.t_synmem_read,
            Quantity::Bandwidth => 1.0 / cal.link_bandwidth,
        }
    }
}

/// One microbenchmark instance of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub size: u32,
    /// The swept quantity: DendOps, SynOps, SynMem reads or heaviest-link bits.
    pub count: f64,
    pub ops: OpCounts,
    pub heaviest: HeaviestLink,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MicrobenchSweep {
    pub quantity: Quantity,
    pub points: Vec<SweepPoint>,
}

pub fn microbench_sweep(
    quantity: Quantity,
    sizes: &[u32],
    mesh: &MeshConfig,
    packing: &Packing,
) -> Result<MicrobenchSweep> {
    let points = sizes
        .iter()
        .map(|&size| {
            let w = gen_microbenchmark(quantity.benchmark(size), mesh)?;
            let ops = derive_op_counts(&w, packing)?;
            let heaviest = heaviest_link(&compute_link_loads(&w, &CoreMap::from_workload(&w), mesh)?);
            let count = match quantity {
                Quantity::Dendop => ops.max_dend_ops(),
                Quantity::Synop => ops.max_syn_ops(),
                Quantity::Synmem => ops.max_synmem_reads(),
                Quantity::Bandwidth => heaviest.bits_per_step,
            };
            Ok(SweepPoint {
                size,
                count,
                ops,
                heaviest,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MicrobenchSweep { quantity, points })
}

impl MicrobenchSweep {
    /// Reference-oracle time per step at every point.
    pub fn simulate(&self, cal: &CalibrationParams) -> Vec<f64> {
        self.points
            .iter()
            .map(|p| simulate_step(&p.ops, &p.heaviest, cal).t_step)
            .collect()
    }

    pub fn series(&self, times: &[f64]) -> Result<MeasurementSeries> {
        if times.len() != self.points.len() {
            return Err(Error::Fit(format!(
                "{} times for {} sweep points",
                times.len(),
                self.points.len()
            )));
        }
        MeasurementSeries::new(self.points.iter().map(|p| p.count).zip(times.iter().copied()).collect())
    }
}

/// A sweep together with its measured times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedSweep {
    pub sweep: MicrobenchSweep,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteCalibration {
    pub params: CalibrationParams,
    /// Final residual fit of each sweep.
    pub fits: Vec<(Quantity, RateFit)>,
    pub iterations: usize,
}

const MAX_ITERATIONS: usize = 100;
const RELATIVE_CONVERGENCE: f64 = 1e-13;

/// Recovers all four effective rates and the barrier time from one timed sweep per
/// quantity. The barrier time is the offset of the DendOp sweep.
pub fn calibrate_suite(sweeps: &[TimedSweep], packing: &Packing, bits_per_message: u32) -> Result<SuiteCalibration> {
    let find = |q: Quantity| {
        sweeps
            .iter()
            .find(|s| s.sweep.quantity == q)
            .ok_or_else(|| Error::Fit(format!("missing {} sweep", q.name())))
    };
    let timed: Vec<&TimedSweep> = Quantity::ALL.iter().map(|&q| find(q)).collect::<Result<_>>()?;

    // Rates not yet known are treated as free (zero cost, infinite bandwidth).
    let mut est = CalibrationParams {
        t_dendop: 0.0,
        t_synop: 0.0,
        t_synmem_read: 0.0,
        link_bandwidth: f64::INFINITY,
        t_barrier: 0.0,
        word_width: packing.word_width,
        index_bits: packing.index_bits,
        bits_per_message_default: bits_per_message,
    };
    let mut fits = Vec::new();
    for iteration in 1..=MAX_ITERATIONS {
        let before = est;
        fits.clear();
        for t in &timed {
            let q = t.sweep.quantity;
            let mut others = est;
            others.t_barrier = 0.0;
            match q {
                Quantity::Dendop => others.t_dendop = 0.0,
                Quantity::Synop => others.t_synop = 0.0,
                Quantity::Synmem => others.t_synmem_read = 0.0,
                Quantity::Bandwidth => others.link_bandwidth = f64::INFINITY,
            }
            let residual: Vec<f64> = t
                .sweep
                .simulate(&others)
                .iter()
                .zip(&t.times)
                .map(|(known, measured)| measured - known)
                .collect();
            let fit = fit_effective_rate(&t.sweep.series(&residual)?)?;
            match q {
                Quantity::Dendop => {
                    est.t_dendop = fit.per_unit_time;
                    est.t_barrier = fit.offset;
                }
                Quantity::Synop => est.t_synop = fit.per_unit_time,
                Quantity::Synmem => est.t_synmem_read = fit.per_unit_time,
                Quantity::Bandwidth => est.link_bandwidth = fit.throughput(),
            }
            fits.push((q, fit));
        }
        let settled = Quantity::ALL
            .iter()
            .all(|&q| (q.rate(&est) - q.rate(&before)).abs() <= RELATIVE_CONVERGENCE * q.rate(&est).abs());
        if settled {
            est.validate()?;
            return Ok(SuiteCalibration {
                params: est,
                fits,
                iterations: iteration,
            });
        }
    }
    Err(Error::Fit(format!(
        "rates did not settle within {MAX_ITERATIONS} iterations"
    )))
}
