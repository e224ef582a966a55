//! Router-occupancy matrices and their realization as core maps.
//!
//! `P[i][j] = 1` places one origin core and one destination core on router `(i, j)`.
//! Matrices are anchored at the top-left router of the mesh.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::mesh::{CoreId, MeshConfig, RouterCoord};
use crate::rng::SplitMix64;
pub use crate::workload::CoreMap;
use crate::workload::{FragmentId, WorkloadSpec};
use crate::{Error, Result};

/// Binary `rows x cols` router-occupancy matrix, row 0 = router row 1.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u8>>", into = "Vec<Vec<u8>>")]
pub struct PlacementMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl fmt::Debug for PlacementMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PlacementMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = (0..self.cols).map(|c| if self.get(r, c) { '1' } else { '.' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<Vec<u8>>> for PlacementMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<u8>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(Error::config("/matrix", "placement matrix must be non-empty"));
        }
        let mut cells = Vec::with_capacity(rows.len() * cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::config(format!("/matrix/{r}"), "rows must have equal length"));
            }
            for (c, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(Error::config(format!("/matrix/{r}/{c}"), "entries must be 0 or 1"));
                }
                cells.push(v == 1);
            }
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            cells,
        })
    }
}

impl From<PlacementMatrix> for Vec<Vec<u8>> {
    fn from(p: PlacementMatrix) -> Self {
        (0..p.rows)
            .map(|r| (0..p.cols).map(|c| u8::from(p.get(r, c))).collect())
            .collect()
    }
}

impl fmt::Display for PlacementMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line: String = (0..self.cols).map(|c| if self.get(r, c) { '1' } else { '0' }).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl PlacementMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            cells: vec![false; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut p = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                p.set(r, c, f(r, c));
            }
        }
        p
    }

    /// Matrix whose bit `r * cols + c` of `bits` is entry `(r, c)`.
    pub fn from_bits(rows: usize, cols: usize, bits: u64) -> Self {
        Self::from_fn(rows, cols, |r, c| bits >> (r * cols + c) & 1 == 1)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Zero-based access.
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.cells[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.cells[r * self.cols + c] = v;
    }

    /// Number of origin-destination pairs.
    pub fn pair_count(&self) -> usize {
        self.cells.iter().filter(|&&v| v).count()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        (0..self.rows)
            .map(|r| (0..self.cols).filter(|&c| self.get(r, c)).count() as u64)
            .collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        (0..self.cols)
            .map(|c| (0..self.rows).filter(|&r| self.get(r, c)).count() as u64)
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Occupied routers in row-major order, as mesh coordinates.
    pub fn occupied(&self) -> impl Iterator<Item = RouterCoord> + '_ {
        (0..self.rows).flat_map(move |r| {
            (0..self.cols)
                .filter(move |&c| self.get(r, c))
                .map(move |c| RouterCoord::new(r as u32 + 1, c as u32 + 1))
        })
    }
}

/// Named placement patterns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum PlacementPattern {
    SaturatedRect {
        n: usize,
        m: usize,
    },
    Square {
        n: usize,
    },
    /// Both diagonals of an `n x n` grid; `n` must be even.
    Xshape {
        n: usize,
    },
    Identity {
        n: usize,
    },
    /// Binary `n x n` matrix with all row and column sums equal to `a`.
    Permutation {
        n: usize,
        a: usize,
        seed: u64,
    },
    /// `pairs` occupied routers drawn uniformly without replacement.
    Random {
        pairs: usize,
        rows: usize,
        cols: usize,
        seed: u64,
    },
    Custom {
        matrix: PlacementMatrix,
    },
}

impl PlacementPattern {
    /// Short label used in report ids.
    pub fn label(&self) -> String {
        match self {
            PlacementPattern::SaturatedRect { n, m } => format!("rect-{n}x{m}"),
            PlacementPattern::Square { n } => format!("square-{n}"),
            PlacementPattern::Xshape { n } => format!("xshape-{n}"),
            PlacementPattern::Identity { n } => format!("identity-{n}"),
            PlacementPattern::Permutation { n, a, seed } => format!("permutation-{n}-a{a}-s{seed}"),
            PlacementPattern::Random { pairs, seed, .. } => format!("random-{pairs}-s{seed:03}"),
            PlacementPattern::Custom { .. } => "custom".to_string(),
        }
    }
}

fn require_positive(field: &str, v: usize) -> Result<()> {
    if v == 0 {
        Err(Error::config(format!("/pattern/params/{field}"), "must be at least 1"))
    } else {
        Ok(())
    }
}

/// Builds the matrix of a named pattern.
pub fn pattern(kind: &PlacementPattern) -> Result<PlacementMatrix> {
    match *kind {
        PlacementPattern::SaturatedRect { n, m } => {
            require_positive("n", n)?;
            require_positive("m", m)?;
            Ok(PlacementMatrix::from_fn(n, m, |_, _| true))
        }
        PlacementPattern::Square { n } => {
            require_positive("n", n)?;
            Ok(PlacementMatrix::from_fn(n, n, |_, _| true))
        }
        PlacementPattern::Xshape { n } => {
            if n == 0 || n % 2 != 0 {
                return Err(Error::config("/pattern/params/n", "x-shape needs a positive even n"));
            }
            Ok(PlacementMatrix::from_fn(n, n, |r, c| r == c || r + c == n - 1))
        }
        PlacementPattern::Identity { n } => {
            require_positive("n", n)?;
            Ok(PlacementMatrix::from_fn(n, n, |r, c| r == c))
        }
        PlacementPattern::Permutation { n, a, seed } => generalized_permutation(n, a, seed),
        PlacementPattern::Random {
            pairs,
            rows,
            cols,
            seed,
        } => {
            require_positive("rows", rows)?;
            require_positive("cols", cols)?;
            let all: Vec<(usize, usize)> = (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).collect();
            random_subset(&all, pairs, rows, cols, seed)
        }
        PlacementPattern::Custom { ref matrix } => Ok(matrix.clone()),
    }
}

fn random_subset(
    eligible: &[(usize, usize)],
    pairs: usize,
    rows: usize,
    cols: usize,
    seed: u64,
) -> Result<PlacementMatrix> {
    if pairs > eligible.len() {
        return Err(Error::config(
            "/pattern/params/pairs",
            format!("{pairs} pairs do not fit on {} eligible routers", eligible.len()),
        ));
    }
    let mut order = eligible.to_vec();
    SplitMix64::new(seed).shuffle(&mut order);
    let mut p = PlacementMatrix::zeros(rows, cols);
    for &(r, c) in &order[..pairs] {
        p.set(r, c, true);
    }
    Ok(p)
}

/// Random placement over the routers of `mesh` whose pair slots (0 and 1) are free.
pub fn random_on_mesh(pairs: usize, mesh: &MeshConfig, seed: u64) -> Result<PlacementMatrix> {
    let eligible: Vec<(usize, usize)> = mesh
        .routers()
        .filter(|&r| pair_slots(mesh, r).is_ok())
        .map(|r| (r.i as usize - 1, r.j as usize - 1))
        .collect();
    random_subset(&eligible, pairs, mesh.rows as usize, mesh.cols as usize, seed)
}

/// Sum of `a` disjoint permutation matrices: a shifted circulant, shuffled by rows and
/// columns, then mixed with sum-preserving 2x2 swaps.
fn generalized_permutation(n: usize, a: usize, seed: u64) -> Result<PlacementMatrix> {
    if n == 0 || a == 0 || a > n {
        return Err(Error::config(
            "/pattern/params/a",
            format!("no binary {n}x{n} matrix has all line sums equal to {a}"),
        ));
    }
    let mut rng = SplitMix64::new(seed);
    let mut row_perm: Vec<usize> = (0..n).collect();
    let mut col_perm: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut row_perm);
    rng.shuffle(&mut col_perm);
    let mut p = PlacementMatrix::from_fn(n, n, |r, c| (col_perm[c] + n - row_perm[r]) % n < a);
    for _ in 0..4 * n * n {
        let r1 = rng.next_below(n as u64) as usize;
        let r2 = rng.next_below(n as u64) as usize;
        let c1 = rng.next_below(n as u64) as usize;
        let c2 = rng.next_below(n as u64) as usize;
        if p.get(r1, c1) && p.get(r2, c2) && !p.get(r1, c2) && !p.get(r2, c1) {
            p.set(r1, c1, false);
            p.set(r2, c2, false);
            p.set(r1, c2, true);
            p.set(r2, c1, true);
        }
    }
    Ok(p)
}

fn pair_slots(mesh: &MeshConfig, r: RouterCoord) -> Result<(CoreId, CoreId)> {
    let origin = CoreId::new(r, 0);
    let dest = CoreId::new(r, 1);
    if mesh.cores_per_router < 2 {
        return Err(Error::Mapping(
            "pair placement needs at least two cores per router".into(),
        ));
    }
    for c in [origin, dest] {
        if mesh.is_reserved(c) {
            return Err(Error::Mapping(format!("core {c} is reserved")));
        }
    }
    Ok((origin, dest))
}

/// Origin and destination population of a single-layer workload.
fn layer_endpoints(w: &WorkloadSpec) -> Result<(&str, &str)> {
    let mut layers = w.connections.iter().filter(|c| c.src != c.dst);
    match (layers.next(), layers.next()) {
        (Some(c), None) => Ok((&c.src, &c.dst)),
        _ => Err(Error::Mapping(
            "pair placement needs exactly one origin-to-destination connection".into(),
        )),
    }
}

/// Maps the `k`-th origin fragment and `k`-th destination fragment to slots 0 and 1 of
/// the `k`-th occupied router (row-major).
pub fn realize(p: &PlacementMatrix, w: &WorkloadSpec, mesh: &MeshConfig) -> Result<CoreMap> {
    w.validate_structure()?;
    if p.rows() > mesh.rows as usize || p.cols() > mesh.cols as usize {
        return Err(Error::Mapping(format!(
            "{}x{} placement does not fit a {}x{} mesh",
            p.rows(),
            p.cols(),
            mesh.rows,
            mesh.cols
        )));
    }
    let (src, dst) = layer_endpoints(w)?;
    let pairs = p.pair_count();
    let n_src = w.assignment[src].len();
    let n_dst = w.assignment[dst].len();
    if n_src != pairs || n_dst != pairs {
        return Err(Error::Mapping(format!(
            "placement has {pairs} pairs but the workload has {n_src} origin and {n_dst} destination cores"
        )));
    }
    let mut map = CoreMap::default();
    for (k, router) in p.occupied().enumerate() {
        let (o, d) = pair_slots(mesh, router)?;
        let frag = |pop: &str| FragmentId {
            population: pop.to_string(),
            index: k as u32,
        };
        map.cores.insert(frag(src), o);
        map.cores.insert(frag(dst), d);
    }
    // Any other population keeps its own assignment.
    for (f, c) in CoreMap::from_workload(w).cores {
        if f.population != src && f.population != dst {
            map.cores.insert(f, c);
        }
    }
    if !map.is_injective() {
        return Err(Error::Mapping("placement puts two fragments on one core".into()));
    }
    Ok(map)
}
