//! Pessimistic reference timing.
//!
//! Serializes everything the estimate lets overlap: per core, neuron updates, synaptic
//! operations and memory reads run back to back; the busiest core, the heaviest link
//! and the barrier then run one after another. The result is an upper companion to the
//! max-affine estimate, useful wherever a measured time would otherwise be needed.

use serde::{Deserialize, Serialize};

use crate::model::CalibrationParams;
use crate::traffic::HeaviestLink;
use crate::workload::OpCounts;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleTime {
    pub t_step: f64,
    pub compute: f64,
    pub comm: f64,
    pub barrier: f64,
}

pub fn simulate_step(oc: &OpCounts, hl: &HeaviestLink, cal: &CalibrationParams) -> OracleTime {
    let compute = oc
        .per_core
        .values()
        .map(|c| c.dend_ops * cal.t_dendop + c.syn_ops * cal.t_synop + c.synmem_reads * cal.t_synmem_read)
        .fold(0.0, f64::max);
    let comm = hl.bits_per_step / cal.link_bandwidth;
    let barrier = cal.t_barrier;
    OracleTime {
        t_step: barrier + compute + comm,
        compute,
        comm,
        barrier,
    }
}
