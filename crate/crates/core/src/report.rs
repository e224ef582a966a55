//! Tabular and text renderings of estimates, link loads and scaling tables.
//!
//! Numbers are rendered with Rust's shortest round-trip `Display` for `f64`, so every
//! emitted value parses back to the same bits.

use serde::{Deserialize, Serialize};

use crate::analytic::ScalingRow;
use crate::model::{Bottleneck, RuntimeEstimate};
use crate::simref::OracleTime;
use crate::traffic::{LinkLoadMap, RouterHeatmap};

/// One estimate as a flat report record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportRow {
    pub workload_id: String,
    pub placement_id: String,
    pub n_do_max: f64,
    pub n_so_max: f64,
    pub n_smr_max: f64,
    pub n_ll_bits: f64,
    pub term_dendop_s: f64,
    pub term_synop_s: f64,
    pub term_synmem_s: f64,
    pub term_noc_s: f64,
    pub t_barrier_s: f64,
    pub t_estimate_s: f64,
    pub bottleneck: Bottleneck,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_s: Option<f64>,
}

pub const REPORT_COLUMNS: [&str; 14] = [
    "workload_id",
    "placement_id",
    "n_do_max",
    "n_so_max",
    "n_smr_max",
    "n_ll_bits",
    "term_dendop_s",
    "term_synop_s",
    "term_synmem_s",
    "term_noc_s",
    "t_barrier_s",
    "t_estimate_s",
    "bottleneck",
    "oracle_s",
];

impl ReportRow {
    pub fn new(
        workload_id: impl Into<String>,
        placement_id: impl Into<String>,
        est: &RuntimeEstimate,
        oracle: Option<&OracleTime>,
    ) -> Self {
        Self {
            workload_id: workload_id.into(),
            placement_id: placement_id.into(),
            n_do_max: est.inputs.n_dendop,
            n_so_max: est.inputs.n_synop,
            n_smr_max: est.inputs.n_synmem,
            n_ll_bits: est.inputs.n_link_bits,
            term_dendop_s: est.terms.dendop,
            term_synop_s: est.terms.synop,
            term_synmem_s: est.terms.synmem,
            term_noc_s: est.terms.noc,
            t_barrier_s: est.terms.barrier,
            t_estimate_s: est.t_step,
            bottleneck: est.bottleneck,
            oracle_s: oracle.map(|o| o.t_step),
        }
    }

    /// Fields in column order; `oracle_s` is empty when absent.
    pub fn record(&self) -> Vec<String> {
        vec![
            self.workload_id.clone(),
            self.placement_id.clone(),
            self.n_do_max.to_string(),
            self.n_so_max.to_string(),
            self.n_smr_max.to_string(),
            self.n_ll_bits.to_string(),
            self.term_dendop_s.to_string(),
            self.term_synop_s.to_string(),
            self.term_synmem_s.to_string(),
            self.term_noc_s.to_string(),
            self.t_barrier_s.to_string(),
            self.t_estimate_s.to_string(),
            self.bottleneck.label().to_string(),
            self.oracle_s.map(|v| v.to_string()).unwrap_or_default(),
        ]
    }

    pub fn sort_key(&self) -> (&str, &str) {
        (&self.workload_id, &self.placement_id)
    }
}

pub const LINK_COLUMNS: [&str; 5] = ["kind", "i", "j", "slot", "bits_per_step"];

/// One record per loaded link, in link order. Router links leave `slot` empty.
pub fn link_records(l: &LinkLoadMap) -> Vec<Vec<String>> {
    l.loads
        .iter()
        .map(|(link, bits)| {
            vec![
                link.kind.name().to_string(),
                link.anchor.i.to_string(),
                link.anchor.j.to_string(),
                link.core_slot.map(|s| s.to_string()).unwrap_or_default(),
                bits.to_string(),
            ]
        })
        .collect()
}

pub const SCALING_COLUMNS: [&str; 4] = ["pattern", "M", "load", "area"];

pub fn scaling_records(rows: &[ScalingRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                r.pattern.name().to_string(),
                r.pairs.to_string(),
                r.load.to_string(),
                r.area.to_string(),
            ]
        })
        .collect()
}

pub const HEATMAP_RAMP: &[u8; 10] = b" .:-=+*#%@";

/// Glyph for a load relative to the grid maximum. Zero is blank and the maximum is `@`.
pub fn glyph(value: f64, max: f64) -> char {
    if max <= 0.0 || value <= 0.0 {
        return ' ';
    }
    let level = ((value / max) * 9.0).ceil().clamp(1.0, 9.0) as usize;
    HEATMAP_RAMP[level] as char
}

/// Row-per-line character grid (top row first) followed by a legend line.
pub fn render_heatmap(h: &RouterHeatmap) -> String {
    let max = h.max();
    let mut out = String::new();
    for i in 1..=h.rows {
        out.extend((1..=h.cols).map(|j| glyph(h.at(i, j), max)));
        out.push('\n');
    }
    out.push_str(&format!("max {max} bits/step\n"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::MeshConfig;
    use crate::traffic::router_heatmap;

    #[test]
    fn ramp_endpoints() {
        assert_eq!(glyph(0.0, 10.0), ' ');
        assert_eq!(glyph(10.0, 10.0), '@');
        assert_eq!(glyph(0.01, 10.0), '.');
        assert_eq!(glyph(5.0, 0.0), ' ');
    }

    #[test]
    fn empty_heatmap_is_blank() {
        let h = router_heatmap(&LinkLoadMap::default(), &MeshConfig::loihi2());
        let s = render_heatmap(&h);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 9);
        assert!(lines[..8].iter().all(|l| *l == "    "));
        assert_eq!(lines[8], "max 0 bits/step");
    }

    #[test]
    fn record_has_every_column() {
        let cal = crate::model::CalibrationParams::synthetic();
        let est = crate::model::estimate(&Default::default(), &Default::default(), &cal);
        let row = ReportRow::new("w", "p", &est, None);
        let rec = row.record();
        assert_eq!(rec.len(), REPORT_COLUMNS.len());
        assert_eq!(rec[12], "barrier");
        assert_eq!(rec[13], "");
    }
}
