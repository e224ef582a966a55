//! Chip geometry and dimension-order (X-Y) routing.
//!
//! Routers sit on an `rows x cols` lattice indexed from 1, with `i = 1` the top row and
//! `j = 1` the leftmost column. Every router serves `cores_per_router` core slots. The
//! physical chip has several parallel meshes; they are aggregated into one effective
//! link per direction, and every core gets its own effective core-side link pair unless
//! `core_link_sharing` groups slots together.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn default_cores_per_router() -> u32 {
    4
}

fn default_one() -> u32 {
    1
}

fn default_parallel_meshes() -> u32 {
    2
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub rows: u32,
    pub cols: u32,
    #[serde(default = "default_cores_per_router")]
    pub cores_per_router: u32,
    #[serde(default = "default_parallel_meshes")]
    pub parallel_meshes: u32,
    /// Core slots that may not host placed cores.
    #[serde(default)]
    pub reserved_slots: BTreeSet<CoreId>,
    /// Number of adjacent slots multiplexed onto one effective core-side link pair.
    #[serde(default = "default_one")]
    pub core_link_sharing: u32,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self::loihi2()
    }
}

impl MeshConfig {
    /// Unreserved `rows x cols` mesh with the default per-router parameters.
    pub fn new(rows: u32, cols: u32) -> Result<Self> {
        let mesh = Self {
            rows,
            cols,
            cores_per_router: default_cores_per_router(),
            parallel_meshes: default_parallel_meshes(),
            reserved_slots: BTreeSet::new(),
            core_link_sharing: 1,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Single-chip geometry: 8 router rows, 4 columns, 4 cores per router (128 cores).
    pub fn loihi2() -> Self {
        Self::new(8, 4).expect("static geometry is valid")
    }

    pub fn validate(&self) -> Result<()> {
        for (field, value) in [
            ("/rows", self.rows),
            ("/cols", self.cols),
            ("/cores_per_router", self.cores_per_router),
            ("/parallel_meshes", self.parallel_meshes),
            ("/core_link_sharing", self.core_link_sharing),
        ] {
            if value == 0 {
                return Err(Error::config(field, "must be at least 1"));
            }
        }
        for core in &self.reserved_slots {
            self.check_core(*core)?;
        }
        Ok(())
    }

    pub fn router_count(&self) -> u32 {
        self.rows * self.cols
    }

    pub fn core_count(&self) -> u32 {
        self.router_count() * self.cores_per_router
    }

    pub fn contains(&self, r: RouterCoord) -> bool {
        (1..=self.rows).contains(&r.i) && (1..=self.cols).contains(&r.j)
    }

    pub fn is_reserved(&self, core: CoreId) -> bool {
        self.reserved_slots.contains(&core)
    }

    pub fn check_router(&self, r: RouterCoord) -> Result<()> {
        if self.contains(r) {
            Ok(())
        } else {
            Err(self.out_of_range(format!("router {r}")))
        }
    }

    pub fn check_core(&self, c: CoreId) -> Result<()> {
        if self.contains(c.router()) && c.slot < self.cores_per_router {
            Ok(())
        } else {
            Err(self.out_of_range(format!("core {c}")))
        }
    }

    fn out_of_range(&self, what: String) -> Error {
        Error::CoordinateOutOfRange {
            what,
            rows: self.rows,
            cols: self.cols,
            cores_per_router: self.cores_per_router,
        }
    }

    /// Routers in row-major order.
    pub fn routers(&self) -> impl Iterator<Item = RouterCoord> + '_ {
        (1..=self.rows).flat_map(move |i| (1..=self.cols).map(move |j| RouterCoord { i, j }))
    }

    /// Unreserved core slots of the given routers, router by router, slot 0 first.
    pub fn free_slots<'a>(
        &'a self,
        routers: impl IntoIterator<Item = RouterCoord> + 'a,
    ) -> impl Iterator<Item = CoreId> + 'a {
        routers.into_iter().flat_map(move |r| {
            (0..self.cores_per_router)
                .map(move |slot| CoreId::new(r, slot))
                .filter(move |c| !self.is_reserved(*c))
        })
    }

    /// Effective core-side link index for a slot.
    pub fn core_link_index(&self, slot: u32) -> u32 {
        slot / self.core_link_sharing
    }
}

/// Router position, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouterCoord {
    pub i: u32,
    pub j: u32,
}

impl RouterCoord {
    pub const fn new(i: u32, j: u32) -> Self {
        Self { i, j }
    }
}

impl fmt::Display for RouterCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// A core slot on a router.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoreId {
    pub i: u32,
    pub j: u32,
    pub slot: u32,
}

impl CoreId {
    pub const fn new(router: RouterCoord, slot: u32) -> Self {
        Self {
            i: router.i,
            j: router.j,
            slot,
        }
    }

    pub const fn router(&self) -> RouterCoord {
        RouterCoord { i: self.i, j: self.j }
    }
}

impl fmt::Display for CoreId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})#{}", self.i, self.j, self.slot)
    }
}

/// Link kinds, in the order used to break ties between equally loaded links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    CoreToRouter,
    RouterToCore,
    RouterLeft,
    RouterRight,
    RouterUp,
    RouterDown,
}

impl LinkKind {
    pub const ALL: [LinkKind; 6] = [
        LinkKind::CoreToRouter,
        LinkKind::RouterToCore,
        LinkKind::RouterLeft,
        LinkKind::RouterRight,
        LinkKind::RouterUp,
        LinkKind::RouterDown,
    ];

    pub fn is_core_side(self) -> bool {
        matches!(self, LinkKind::CoreToRouter | LinkKind::RouterToCore)
    }

    pub fn name(self) -> &'static str {
        match self {
            LinkKind::CoreToRouter => "core_to_router",
            LinkKind::RouterToCore => "router_to_core",
            LinkKind::RouterLeft => "router_left",
            LinkKind::RouterRight => "router_right",
            LinkKind::RouterUp => "router_up",
            LinkKind::RouterDown => "router_down",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One effective directed link.
///
/// Router-to-router links are anchored at the router they leave. Core-side links are
/// anchored at the router serving the core and carry the (effective) core slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DirectedLink {
    pub kind: LinkKind,
    pub anchor: RouterCoord,
    pub core_slot: Option<u32>,
}

impl DirectedLink {
    pub const fn router(kind: LinkKind, anchor: RouterCoord) -> Self {
        Self {
            kind,
            anchor,
            core_slot: None,
        }
    }

    pub const fn core(kind: LinkKind, anchor: RouterCoord, slot: u32) -> Self {
        Self {
            kind,
            anchor,
            core_slot: Some(slot),
        }
    }

    /// The router at the far end of a router-to-router link.
    pub fn head(&self) -> Option<RouterCoord> {
        let RouterCoord { i, j } = self.anchor;
        match self.kind {
            LinkKind::RouterLeft => Some(RouterCoord::new(i, j - 1)),
            LinkKind::RouterRight => Some(RouterCoord::new(i, j + 1)),
            LinkKind::RouterUp => Some(RouterCoord::new(i - 1, j)),
            LinkKind::RouterDown => Some(RouterCoord::new(i + 1, j)),
            _ => None,
        }
    }
}

impl fmt::Display for DirectedLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.core_slot {
            Some(s) => write!(f, "{}@{}#{}", self.kind, self.anchor, s),
            None => write!(f, "{}@{}", self.kind, self.anchor),
        }
    }
}

/// Calls `visit` for every link of the X-Y route from `src` to `dst`, in path order:
/// the source core-side link, horizontal hops, vertical hops, the destination
/// core-side link. Coordinates must already be valid.
pub(crate) fn for_each_route_link(mesh: &MeshConfig, src: CoreId, dst: CoreId, mut visit: impl FnMut(DirectedLink)) {
    visit(DirectedLink::core(
        LinkKind::CoreToRouter,
        src.router(),
        mesh.core_link_index(src.slot),
    ));
    let (mut i, mut j) = (src.i, src.j);
    while j != dst.j {
        let kind = if dst.j < j {
            LinkKind::RouterLeft
        } else {
            LinkKind::RouterRight
        };
        visit(DirectedLink::router(kind, RouterCoord::new(i, j)));
        if dst.j < j {
            j -= 1;
        } else {
            j += 1;
        }
    }
    while i != dst.i {
        let kind = if dst.i < i {
            LinkKind::RouterUp
        } else {
            LinkKind::RouterDown
        };
        visit(DirectedLink::router(kind, RouterCoord::new(i, j)));
        if dst.i < i {
            i -= 1;
        } else {
            i += 1;
        }
    }
    visit(DirectedLink::core(
        LinkKind::RouterToCore,
        dst.router(),
        mesh.core_link_index(dst.slot),
    ));
}

/// The unique dimension-order route between two cores: horizontal hops toward the
/// destination column first, then vertical hops toward the destination row.
pub fn route_path(src: CoreId, dst: CoreId, mesh: &MeshConfig) -> Result<Vec<DirectedLink>> {
    mesh.check_core(src)?;
    mesh.check_core(dst)?;
    let hops = src.i.abs_diff(dst.i) + src.j.abs_diff(dst.j);
    let mut path = Vec::with_capacity(hops as usize + 2);
    for_each_route_link(mesh, src, dst, |l| path.push(l));
    Ok(path)
}
