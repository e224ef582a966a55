//! Static link-load analysis.
//!
//! Every (origin core, destination core) message volume is charged to each link of its
//! dimension-order route. Loads are expected bits per timestep on effective links.

use std::collections::BTreeMap;

use crate::mesh::{for_each_route_link, DirectedLink, MeshConfig};
use crate::workload::{derive_message_matrix_mapped, CoreMap, WorkloadSpec};
use crate::Result;

/// Bits per timestep on each loaded link; absent links carry nothing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinkLoadMap {
    pub loads: BTreeMap<DirectedLink, f64>,
}

impl LinkLoadMap {
    pub fn get(&self, link: &DirectedLink) -> f64 {
        self.loads.get(link).copied().unwrap_or(0.0)
    }

    pub fn add(&mut self, link: DirectedLink, bits: f64) {
        if bits > 0.0 {
            *self.loads.entry(link).or_insert(0.0) += bits;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.loads.is_empty()
    }

    /// Loads on router-to-router links only.
    pub fn router_links(&self) -> impl Iterator<Item = (&DirectedLink, &f64)> {
        self.loads.iter().filter(|(l, _)| !l.kind.is_core_side())
    }
}

/// The most loaded link. `link` is `None` when nothing moves.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HeaviestLink {
    pub link: Option<DirectedLink>,
    pub bits_per_step: f64,
}

/// Charges every core-pair volume of `w`, placed by `map`, to the links of its route.
pub fn compute_link_loads(w: &WorkloadSpec, map: &CoreMap, mesh: &MeshConfig) -> Result<LinkLoadMap> {
    let messages = derive_message_matrix_mapped(w, map)?;
    let mut out = LinkLoadMap::default();
    for (&(src, dst), v) in &messages.pairs {
        mesh.check_core(src)?;
        mesh.check_core(dst)?;
        for_each_route_link(mesh, src, dst, |l| out.add(l, v.bits));
    }
    Ok(out)
}

/// Maximum load; ties go to the smallest link in `DirectedLink` order.
pub fn heaviest_link(l: &LinkLoadMap) -> HeaviestLink {
    let mut best = HeaviestLink::default();
    for (link, &bits) in &l.loads {
        if bits > best.bits_per_step {
            best = HeaviestLink {
                link: Some(*link),
                bits_per_step: bits,
            };
        }
    }
    best
}

/// Aggregate outgoing router-to-router load per router.
#[derive(Debug, Clone, PartialEq)]
pub struct RouterHeatmap {
    pub rows: u32,
    pub cols: u32,
    /// Row-major, `rows * cols` entries.
    pub load: Vec<f64>,
}

impl RouterHeatmap {
    pub fn at(&self, i: u32, j: u32) -> f64 {
        self.load[((i - 1) * self.cols + (j - 1)) as usize]
    }

    pub fn max(&self) -> f64 {
        self.load.iter().copied().fold(0.0, f64::max)
    }

    /// Loads divided by the grid maximum (all zero when there is no traffic).
    pub fn normalized(&self) -> Vec<f64> {
        let max = self.max();
        self.load
            .iter()
            .map(|&v| if max > 0.0 { v / max } else { 0.0 })
            .collect()
    }
}

pub fn router_heatmap(l: &LinkLoadMap, mesh: &MeshConfig) -> RouterHeatmap {
    let mut map = RouterHeatmap {
        rows: mesh.rows,
        cols: mesh.cols,
        load: vec![0.0; (mesh.rows * mesh.cols) as usize],
    };
    for (link, bits) in l.router_links() {
        if mesh.contains(link.anchor) {
            map.load[((link.anchor.i - 1) * mesh.cols + (link.anchor.j - 1)) as usize] += bits;
        }
    }
    map
}
