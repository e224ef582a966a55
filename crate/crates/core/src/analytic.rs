//! Closed-form heaviest router-to-router loads for paired all-to-all layers.
//!
//! Setting: every occupied router of a placement matrix `P` holds one origin and one
//! destination core, each origin sends one unit (N messages) to every destination, and
//! messages follow X-Y routing. Loads are in units of N messages per step.
//!
//! The leftward load on the link leaving router `(i, l)` is
//!
//! ```text
//! left(i, l) = (sum_{j >= l} P[i][j]) * (sum_{l' < l} colsum[l'])
//! ```
//!
//! since every origin at or right of column `l` in row `i` must carry all traffic for
//! columns left of `l` through that link. Rightward is the mirror image. Vertical
//! segments happen in the destination column after the horizontal leg, so the upward
//! load leaving `(k, l)` counts origins in rows `>= k` anywhere times destinations in
//! column `l` above row `k`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::mesh::{for_each_route_link, CoreId, DirectedLink, LinkKind, MeshConfig};
use crate::placement::{pattern, PlacementMatrix, PlacementPattern};
use crate::{Error, Result};

/// The router-to-router link attaining a directional maximum, 1-based router coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkWitness {
    pub i: usize,
    pub l: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DirectionalLoads {
    pub left: u64,
    pub right: u64,
    pub up: u64,
    pub down: u64,
}

impl DirectionalLoads {
    pub fn max(&self) -> u64 {
        self.left.max(self.right).max(self.up).max(self.down)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyticLoad {
    /// Heaviest leftward router-to-router load.
    pub value: u64,
    /// Leftward link attaining `value` (first in row-major order).
    pub at_link: LinkWitness,
    pub colsums: Vec<u64>,
    pub directions: DirectionalLoads,
}

impl AnalyticLoad {
    /// Heaviest router-to-router load over all four directions.
    pub fn heaviest(&self) -> u64 {
        self.directions.max()
    }
}

fn prefix(v: &[u64]) -> Vec<u64> {
    // prefix[k] = v[0] + ... + v[k-1]
    let mut out = Vec::with_capacity(v.len() + 1);
    out.push(0);
    for x in v {
        out.push(out.last().unwrap() + x);
    }
    out
}

/// Per-row suffix counts `suffix[r][c] = sum_{c' >= c} P[r][c']`, with a trailing zero column.
fn row_suffix(p: &PlacementMatrix) -> Vec<Vec<u64>> {
    (0..p.rows())
        .map(|r| {
            let mut s = vec![0u64; p.cols() + 1];
            for c in (0..p.cols()).rev() {
                s[c] = s[c + 1] + u64::from(p.get(r, c));
            }
            s
        })
        .collect()
}

/// Evaluates the leftward cumulative-sum formula at every link and derives the other
/// three directions.
#[allow(clippy::needless_range_loop)]
pub fn nll_formula(p: &PlacementMatrix) -> AnalyticLoad {
    let (n, m) = (p.rows(), p.cols());
    let colsums = p.col_sums();
    let rowsums = p.row_sums();
    let col_prefix = prefix(&colsums);
    let row_prefix = prefix(&rowsums);
    let suffix = row_suffix(p);
    let total = row_prefix[n];

    let mut value = 0;
    let mut at_link = LinkWitness { i: 1, l: 1 };
    let mut right = 0;
    for r in 0..n {
        for c in 0..m {
            // origins at columns >= c, destinations in columns < c
            let left = suffix[r][c] * col_prefix[c];
            if left > value {
                value = left;
                at_link = LinkWitness { i: r + 1, l: c + 1 };
            }
            // origins at columns <= c, destinations in columns > c
            let origins = suffix[r][0] - suffix[r][c + 1];
            right = right.max(origins * (col_prefix[m] - col_prefix[c + 1]));
        }
    }

    let mut up = 0;
    let mut down = 0;
    for c in 0..m {
        let col: Vec<u64> = (0..n).map(|r| u64::from(p.get(r, c))).collect();
        let col_prefix = prefix(&col);
        for k in 0..n {
            // origins in rows >= k anywhere, destinations in this column above row k
            up = up.max((total - row_prefix[k]) * col_prefix[k]);
            // origins in rows <= k anywhere, destinations in this column below row k
            down = down.max(row_prefix[k + 1] * (col_prefix[n] - col_prefix[k + 1]));
        }
    }

    AnalyticLoad {
        value,
        at_link,
        colsums,
        directions: DirectionalLoads {
            left: value,
            right,
            up,
            down,
        },
    }
}

/// Unit-message loads obtained by routing every origin-destination pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceLoads {
    pub per_link: BTreeMap<DirectedLink, u64>,
}

impl BruteForceLoads {
    pub fn max_of_kind(&self, kind: LinkKind) -> u64 {
        self.per_link
            .iter()
            .filter(|(l, _)| l.kind == kind)
            .map(|(_, &v)| v)
            .max()
            .unwrap_or(0)
    }

    pub fn directions(&self) -> DirectionalLoads {
        DirectionalLoads {
            left: self.max_of_kind(LinkKind::RouterLeft),
            right: self.max_of_kind(LinkKind::RouterRight),
            up: self.max_of_kind(LinkKind::RouterUp),
            down: self.max_of_kind(LinkKind::RouterDown),
        }
    }

    pub fn max_router_to_router(&self) -> u64 {
        self.directions().max()
    }

    /// Heaviest link including core-side links.
    pub fn max_overall(&self) -> u64 {
        self.per_link.values().copied().max().unwrap_or(0)
    }
}

/// Routes one unit from every origin (slot 0) to every destination (slot 1) of `p`.
pub fn brute_force_loads(p: &PlacementMatrix) -> BruteForceLoads {
    let mesh = MeshConfig {
        rows: p.rows() as u32,
        cols: p.cols() as u32,
        cores_per_router: 2,
        parallel_meshes: 1,
        reserved_slots: Default::default(),
        core_link_sharing: 1,
    };
    let routers: Vec<_> = p.occupied().collect();
    let mut per_link = BTreeMap::new();
    for &src in &routers {
        for &dst in &routers {
            for_each_route_link(&mesh, CoreId::new(src, 0), CoreId::new(dst, 1), |l| {
                *per_link.entry(l).or_insert(0) += 1;
            });
        }
    }
    BruteForceLoads { per_link }
}

fn closed_form_rect(n: u64, m: u64) -> u64 {
    n * (m / 2) * m.div_ceil(2)
}

/// Closed-form heaviest leftward load of a named pattern.
///
/// Rectangles use the integer maximum `n * floor(m/2) * ceil(m/2)`, which is `n m^2 / 4`
/// for even `m`. The square is the `n = m` rectangle (`M^{3/2} / 4` for even side).
pub fn nll_closed_form(kind: &PlacementPattern) -> Result<u64> {
    // Constructing the pattern validates its parameters.
    pattern(kind)?;
    match *kind {
        PlacementPattern::SaturatedRect { n, m } => Ok(closed_form_rect(n as u64, m as u64)),
        PlacementPattern::Square { n } => Ok(closed_form_rect(n as u64, n as u64)),
        PlacementPattern::Xshape { n } => Ok(2 * (n as u64 - 1)),
        PlacementPattern::Identity { n } => Ok(n as u64 - 1),
        _ => Err(Error::config(
            "/pattern/kind",
            "closed forms exist for saturated_rect, square, xshape and identity",
        )),
    }
}

/// Upper bound `a * M` (with `M = a n`) for generalized permutation placements.
pub fn nll_permutation_bound(n: usize, a: usize) -> Result<u64> {
    if n == 0 || a == 0 || a > n {
        return Err(Error::config(
            "/pattern/params/a",
            format!("no binary {n}x{n} matrix has all line sums equal to {a}"),
        ));
    }
    Ok((a * a * n) as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingPattern {
    Square,
    Xshape,
    Identity,
}

impl ScalingPattern {
    pub fn name(self) -> &'static str {
        match self {
            ScalingPattern::Square => "square",
            ScalingPattern::Xshape => "xshape",
            ScalingPattern::Identity => "identity",
        }
    }

    /// The pattern that places exactly `pairs` pairs.
    pub fn for_pairs(self, pairs: u64) -> Result<PlacementPattern> {
        let bad = |why: &str| Err(Error::config("/M", format!("{pairs} pairs: {why}")));
        match self {
            ScalingPattern::Square => {
                let n = (pairs as f64).sqrt().round() as u64;
                if n == 0 || n * n != pairs {
                    return bad("square needs a perfect square");
                }
                Ok(PlacementPattern::Square { n: n as usize })
            }
            ScalingPattern::Xshape => {
                if pairs == 0 || !pairs.is_multiple_of(4) {
                    return bad("x-shape needs M = 2n with even n");
                }
                Ok(PlacementPattern::Xshape {
                    n: (pairs / 2) as usize,
                })
            }
            ScalingPattern::Identity => {
                if pairs == 0 {
                    return bad("identity needs at least one pair");
                }
                Ok(PlacementPattern::Identity { n: pairs as usize })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub pattern: ScalingPattern,
    pub pairs: u64,
    pub load: u64,
    /// Routers spanned by the pattern's bounding grid.
    pub area: u64,
}

/// Load and router area of each pattern at each pair count.
pub fn scaling_table(kinds: &[ScalingPattern], pairs: &[u64]) -> Result<Vec<ScalingRow>> {
    let mut rows = Vec::new();
    for &kind in kinds {
        for &m in pairs {
            let pat = kind.for_pairs(m)?;
            let p = pattern(&pat)?;
            rows.push(ScalingRow {
                pattern: kind,
                pairs: m,
                load: nll_closed_form(&pat)?,
                area: (p.rows() * p.cols()) as u64,
            });
        }
    }
    Ok(rows)
}
