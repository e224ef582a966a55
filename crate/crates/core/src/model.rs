//! Max-affine runtime estimate.
//!
//! The time per step is bounded below by the slowest of five resources:
//!
//! ```text
//! T = max(N_DO * T_DO, N_SO * T_SO, N_SMR * T_SMR, N_LL / B, T_BS)
//! ```
//!
//! where the operation counts are per-core maxima (taken independently) and `N_LL` is
//! the heaviest link load in bits per step.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::traffic::HeaviestLink;
use crate::workload::{OpCounts, Packing};
use crate::{Error, Result};

/// Relative tolerance under which a term counts as tied with the maximum.
pub const NEAR_TIE_TOLERANCE: f64 = 0.05;

/// Effective rates. Times in seconds, bandwidth in bits per second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationParams {
    #[serde(rename = "t_dendop_s")]
    pub t_dendop: f64,
    #[serde(rename = "t_synop_s")]
    pub t_synop: f64,
    #[serde(rename = "t_synmem_read_s")]
    pub t_synmem_read: f64,
    #[serde(rename = "link_bandwidth_bps")]
    pub link_bandwidth: f64,
    #[serde(rename = "t_barrier_s")]
    pub t_barrier: f64,
    #[serde(rename = "word_width_bits")]
    pub word_width: u32,
    pub index_bits: u32,
    pub bits_per_message_default: u32,
}

impl CalibrationParams {
    /// Synthetic rates for exercising the model. These are not hardware measurements.
    pub fn synthetic() -> Self {
        Self {
            t_dendop: 4e-9,
            t_synop: 0.5e-9,
            t_synmem_read: 5e-9,
            link_bandwidth: 2e9,
            t_barrier: 2e-6,
            word_width: 64,
            index_bits: 16,
            bits_per_message_default: 32,
        }
    }

    pub fn packing(&self) -> Packing {
        Packing {
            word_width: self.word_width,
            index_bits: self.index_bits,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("/t_dendop_s", self.t_dendop),
            ("/t_synop_s", self.t_synop),
            ("/t_synmem_read_s", self.t_synmem_read),
            ("/link_bandwidth_bps", self.link_bandwidth),
            ("/t_barrier_s", self.t_barrier),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(field, "must be a positive finite number"));
            }
        }
        for (field, v) in [
            ("/word_width_bits", self.word_width),
            ("/index_bits", self.index_bits),
            ("/bits_per_message_default", self.bits_per_message_default),
        ] {
            if v == 0 {
                return Err(Error::config(field, "must be at least 1"));
            }
        }
        Ok(())
    }
}

/// Model terms, in evaluation and tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bottleneck {
    Dendop,
    Synop,
    Synmem,
    Noc,
    Barrier,
}

impl Bottleneck {
    pub const ALL: [Bottleneck; 5] = [
        Bottleneck::Dendop,
        Bottleneck::Synop,
        Bottleneck::Synmem,
        Bottleneck::Noc,
        Bottleneck::Barrier,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Bottleneck::Dendop => "dendop",
            Bottleneck::Synop => "synop",
            Bottleneck::Synmem => "synmem",
            Bottleneck::Noc => "noc",
            Bottleneck::Barrier => "barrier",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.label() == s)
    }
}

impl fmt::Display for Bottleneck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The five resource times, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Terms {
    pub dendop: f64,
    pub synop: f64,
    pub synmem: f64,
    pub noc: f64,
    pub barrier: f64,
}

impl Terms {
    pub fn get(&self, b: Bottleneck) -> f64 {
        match b {
            Bottleneck::Dendop => self.dendop,
            Bottleneck::Synop => self.synop,
            Bottleneck::Synmem => self.synmem,
            Bottleneck::Noc => self.noc,
            Bottleneck::Barrier => self.barrier,
        }
    }

    pub fn max(&self) -> f64 {
        Bottleneck::ALL
            .iter()
            .map(|&b| self.get(b))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The per-step inputs of the model.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelInputs {
    pub n_dendop: f64,
    pub n_synop: f64,
    pub n_synmem: f64,
    pub n_link_bits: f64,
}

impl ModelInputs {
    pub fn new(oc: &OpCounts, hl: &HeaviestLink) -> Self {
        Self {
            n_dendop: oc.max_dend_ops(),
            n_synop: oc.max_syn_ops(),
            n_synmem: oc.max_synmem_reads(),
            n_link_bits: hl.bits_per_step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeEstimate {
    pub t_step: f64,
    pub inputs: ModelInputs,
    pub terms: Terms,
    pub bottleneck: Bottleneck,
    /// Every term within [`NEAR_TIE_TOLERANCE`] of the maximum, the bottleneck included.
    pub near_ties: Vec<Bottleneck>,
}

pub fn terms(inputs: &ModelInputs, cal: &CalibrationParams) -> Terms {
    Terms {
        dendop: inputs.n_dendop * cal.t_dendop,
        synop: inputs.n_synop * cal.t_synop,
        synmem: inputs.n_synmem * cal.t_synmem_read,
        noc: inputs.n_link_bits / cal.link_bandwidth,
        barrier: cal.t_barrier,
    }
}

pub fn estimate_inputs(inputs: &ModelInputs, cal: &CalibrationParams) -> RuntimeEstimate {
    let terms = terms(inputs, cal);
    let t_step = terms.max();
    let bottleneck = Bottleneck::ALL
        .into_iter()
        .find(|&b| terms.get(b) == t_step)
        .unwrap_or(Bottleneck::Barrier);
    let near_ties = Bottleneck::ALL
        .into_iter()
        .filter(|&b| terms.get(b) >= t_step * (1.0 - NEAR_TIE_TOLERANCE))
        .collect();
    RuntimeEstimate {
        t_step,
        inputs: *inputs,
        terms,
        bottleneck,
        near_ties,
    }
}

/// Estimated time per step for a workload's op counts and heaviest link.
pub fn estimate(oc: &OpCounts, hl: &HeaviestLink, cal: &CalibrationParams) -> RuntimeEstimate {
    estimate_inputs(&ModelInputs::new(oc, hl), cal)
}

/// A point on the SynOp roofline: intensity in SynOps per heaviest-link bit,
/// attainable performance in SynOps per second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RooflinePoint {
    pub intensity: f64,
    pub attainable: f64,
}

impl RooflinePoint {
    /// `min(B * x, 1 / T_SO)`.
    pub fn ceiling(intensity: f64, cal: &CalibrationParams) -> f64 {
        (cal.link_bandwidth * intensity).min(1.0 / cal.t_synop)
    }
}

pub fn roofline_point(oc: &OpCounts, hl: &HeaviestLink, cal: &CalibrationParams) -> RooflinePoint {
    let est = estimate(oc, hl, cal);
    let n_so = est.inputs.n_synop;
    let intensity = if hl.bits_per_step > 0.0 {
        n_so / hl.bits_per_step
    } else {
        f64::INFINITY
    };
    RooflinePoint {
        intensity,
        attainable: n_so / est.t_step,
    }
}

/// Per-step times measured (or simulated) at increasing operation counts.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSeries {
    points: Vec<(f64, f64)>,
}

impl MeasurementSeries {
    pub const MIN_POINTS: usize = 3;

    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < Self::MIN_POINTS {
            return Err(Error::Fit(format!(
                "need at least {} points, got {}",
                Self::MIN_POINTS,
                points.len()
            )));
        }
        if points.iter().any(|&(c, t)| !c.is_finite() || !t.is_finite()) {
            return Err(Error::Fit("series contains non-finite values".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Fit("counts must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

/// `time = offset + per_unit_time * count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub per_unit_time: f64,
    pub offset: f64,
}

impl RateFit {
    /// Rate as a throughput, e.g. bits per second when the count is bits.
    pub fn throughput(&self) -> f64 {
        1.0 / self.per_unit_time
    }
}

/// Ordinary least squares over the whole series.
pub fn fit_effective_rate(series: &MeasurementSeries) -> Result<RateFit> {
    let pts = series.points();
    let n = pts.len() as f64;
    let mean_c = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_t = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_c).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_c) * (p.1 - mean_t)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("all counts are equal".into()));
    }
    let per_unit_time = sxy / sxx;
    Ok(RateFit {
        per_unit_time,
        offset: mean_t - per_unit_time * mean_c,
    })
}

/// Divides the time at the largest count by that count (no offset).
pub fn fit_largest_count(series: &MeasurementSeries) -> Result<RateFit> {
    let &(count, time) = series.points().last().expect("series is non-empty");
    if count <= 0.0 {
        return Err(Error::Fit("largest count must be positive".into()));
    }
    Ok(RateFit {
        per_unit_time: time / count,
        offset: 0.0,
    })
}
