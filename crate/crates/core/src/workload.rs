//! Populations, connections and the per-core work and traffic they imply.
//!
//! A population of `neurons` is split evenly over the cores listed in its assignment
//! (remainder to the first cores); each piece is a *fragment*. Connectivity patterns
//! are defined over global neuron indices of the source and destination populations.
//! All derived counts are expected values per timestep: every source quantity is
//! scaled by the source population's `spikes_per_step`.
//!
//! Message model: a spiking neuron sends one message to every destination core on
//! which it has at least one nonzero weight (replication at the source, no in-network
//! multicast).

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::mesh::{CoreId, MeshConfig, RouterCoord};
use crate::rng::keyed_unit;
use crate::{Error, Result};

pub const MAX_WEIGHT_BITS: u8 = 8;

fn default_activity() -> f64 {
    1.0
}

fn default_message_bits() -> u32 {
    32
}

/// How synaptic weights are laid out in synaptic memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    pub word_width: u32,
    /// Per-entry index overhead for sparse encoding.
    pub index_bits: u32,
}

impl Default for Packing {
    fn default() -> Self {
        Self {
            word_width: 64,
            index_bits: 16,
        }
    }
}

impl Packing {
    fn words(&self, bits: u64) -> u64 {
        bits.div_ceil(self.word_width as u64)
    }
}

/// Per-core hardware budget used for feasibility checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkloadLimits {
    pub neuron_capacity: u32,
    pub synaptic_memory_bytes: u64,
}

impl Default for WorkloadLimits {
    fn default() -> Self {
        Self {
            neuron_capacity: 8192,
            synaptic_memory_bytes: 128 * 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Population {
    pub id: String,
    pub neurons: u32,
    /// Expected fraction of neurons that spike on a timestep.
    #[serde(default = "default_activity")]
    pub spikes_per_step: f64,
    #[serde(default = "default_message_bits")]
    pub bits_per_message: u32,
}

impl Population {
    pub fn new(id: impl Into<String>, neurons: u32) -> Self {
        Self {
            id: id.into(),
            neurons,
            spikes_per_step: default_activity(),
            bits_per_message: default_message_bits(),
        }
    }

    pub fn with_activity(mut self, spikes_per_step: f64) -> Self {
        self.spikes_per_step = spikes_per_step;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    /// Every weight of an incoming row is stored, zeros included.
    Dense,
    /// Only nonzero weights are stored, each with an index.
    Sparse,
}

/// Which weights of the `src x dst` matrix are nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConnectivityPattern {
    AllOnes,
    Identity,
    /// `w[s][d] != 0` iff `s % tile == d % tile`.
    TiledIdentity {
        tile: u32,
    },
    /// Each entry is nonzero independently with probability `density`.
    RandomDensity {
        density: f64,
        seed: u64,
    },
}

impl ConnectivityPattern {
    pub fn is_nonzero(&self, s: u32, d: u32) -> bool {
        match *self {
            ConnectivityPattern::AllOnes => true,
            ConnectivityPattern::Identity => s == d,
            ConnectivityPattern::TiledIdentity { tile } => s % tile == d % tile,
            ConnectivityPattern::RandomDensity { density, seed } => keyed_unit(seed, s as u64, d as u64) < density,
        }
    }

    /// Nonzero entries of row `s` restricted to destination columns `cols`.
    pub fn row_nnz(&self, s: u32, cols: Range<u32>) -> u64 {
        match *self {
            ConnectivityPattern::AllOnes => cols.len() as u64,
            ConnectivityPattern::Identity => cols.contains(&s) as u64,
            ConnectivityPattern::TiledIdentity { tile } => {
                let r = s % tile;
                let below = |x: u32| (x / tile + u32::from(x % tile > r)) as u64;
                below(cols.end) - below(cols.start)
            }
            ConnectivityPattern::RandomDensity { .. } => cols.filter(|&d| self.is_nonzero(s, d)).count() as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Connection {
    pub src: String,
    pub dst: String,
    pub encoding: Encoding,
    pub weight_bits: u8,
    pub pattern: ConnectivityPattern,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadSpec {
    pub populations: Vec<Population>,
    pub connections: Vec<Connection>,
    /// Cores hosting each population, in fragment order.
    pub assignment: BTreeMap<String, Vec<CoreId>>,
}

/// One population's share of neurons on one core.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FragmentId {
    pub population: String,
    pub index: u32,
}

/// Neuron range of every fragment when `neurons` are split over `parts` cores.
pub fn split_even(neurons: u32, parts: u32) -> Vec<Range<u32>> {
    let base = neurons / parts;
    let extra = neurons % parts;
    let mut start = 0;
    (0..parts)
        .map(|k| {
            let len = base + u32::from(k < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

impl WorkloadSpec {
    pub fn population(&self, id: &str) -> Option<&Population> {
        self.populations.iter().find(|p| p.id == id)
    }

    fn population_index(&self, id: &str) -> Option<usize> {
        self.populations.iter().position(|p| p.id == id)
    }

    /// Fragment neuron ranges of a population, in assignment order.
    pub fn fragment_ranges(&self, id: &str) -> Vec<Range<u32>> {
        match (self.population(id), self.assignment.get(id)) {
            (Some(p), Some(cores)) if !cores.is_empty() => split_even(p.neurons, cores.len() as u32),
            _ => Vec::new(),
        }
    }

    /// Replaces every population's activity rate.
    pub fn with_activity(mut self, spikes_per_step: f64) -> Self {
        for p in &mut self.populations {
            p.spikes_per_step = spikes_per_step;
        }
        self
    }

    /// Checks that do not depend on the chip: ids, ranges, endpoints, assignment.
    pub fn validate_structure(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (k, p) in self.populations.iter().enumerate() {
            let at = |f: &str| format!("/populations/{k}/{f}");
            if !seen.insert(p.id.as_str()) {
                return Err(Error::config(at("id"), format!("duplicate population id {:?}", p.id)));
            }
            if p.neurons == 0 {
                return Err(Error::config(at("neurons"), "must be at least 1"));
            }
            if !(0.0..=1.0).contains(&p.spikes_per_step) {
                return Err(Error::config(at("spikes_per_step"), "must lie in [0, 1]"));
            }
            if p.bits_per_message == 0 {
                return Err(Error::config(at("bits_per_message"), "must be at least 1"));
            }
            let cores = match self.assignment.get(&p.id) {
                Some(c) if !c.is_empty() => c,
                _ => {
                    return Err(Error::config(
                        format!("/assignment/{}", p.id),
                        format!("population {:?} is not assigned to any core", p.id),
                    ))
                }
            };
            if cores.len() as u64 > p.neurons as u64 {
                return Err(Error::config(
                    format!("/assignment/{}", p.id),
                    format!("{} cores for {} neurons leaves empty fragments", cores.len(), p.neurons),
                ));
            }
            let distinct: BTreeSet<_> = cores.iter().collect();
            if distinct.len() != cores.len() {
                return Err(Error::config(format!("/assignment/{}", p.id), "core listed twice"));
            }
        }
        for id in self.assignment.keys() {
            if self.population(id).is_none() {
                return Err(Error::config(
                    format!("/assignment/{id}"),
                    format!("unknown population {id:?}"),
                ));
            }
        }
        for (k, c) in self.connections.iter().enumerate() {
            let at = |f: &str| format!("/connections/{k}/{f}");
            let src = self
                .population(&c.src)
                .ok_or_else(|| Error::config(at("src"), format!("unknown population {:?}", c.src)))?;
            let dst = self
                .population(&c.dst)
                .ok_or_else(|| Error::config(at("dst"), format!("unknown population {:?}", c.dst)))?;
            if !(1..=MAX_WEIGHT_BITS).contains(&c.weight_bits) {
                return Err(Error::config(at("weight_bits"), "must lie in [1, 8]"));
            }
            match c.pattern {
                ConnectivityPattern::TiledIdentity { tile } => {
                    if tile == 0 || src.neurons % tile != 0 || dst.neurons % tile != 0 {
                        return Err(Error::config(
                            at("pattern/tile"),
                            format!(
                                "tile {tile} must divide both population sizes ({} and {})",
                                src.neurons, dst.neurons
                            ),
                        ));
                    }
                }
                ConnectivityPattern::RandomDensity { density, .. } if !(0.0..=1.0).contains(&density) => {
                    return Err(Error::config(at("pattern/density"), "must lie in [0, 1]"));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Full validation against a chip and its per-core neuron capacity.
    pub fn validate(&self, mesh: &MeshConfig, limits: &WorkloadLimits) -> Result<()> {
        self.validate_structure()?;
        let mut per_core: BTreeMap<CoreId, u64> = BTreeMap::new();
        for (id, cores) in &self.assignment {
            let ranges = self.fragment_ranges(id);
            for (k, (core, range)) in cores.iter().zip(ranges).enumerate() {
                let field = format!("/assignment/{id}/{k}");
                if mesh.check_core(*core).is_err() {
                    return Err(Error::config(field, format!("core {core} is outside the mesh")));
                }
                if mesh.is_reserved(*core) {
                    return Err(Error::config(field, format!("core {core} is reserved")));
                }
                *per_core.entry(*core).or_default() += range.len() as u64;
            }
        }
        for (core, n) in per_core {
            if n > limits.neuron_capacity as u64 {
                return Err(Error::Infeasible(format!(
                    "core {core} hosts {n} neurons, capacity is {}",
                    limits.neuron_capacity
                )));
            }
        }
        Ok(())
    }
}

/// Physical location of every fragment.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<CoreMapEntry>", into = "Vec<CoreMapEntry>")]
pub struct CoreMap {
    pub cores: BTreeMap<FragmentId, CoreId>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoreMapEntry {
    population: String,
    index: u32,
    i: u32,
    j: u32,
    slot: u32,
}

impl From<Vec<CoreMapEntry>> for CoreMap {
    fn from(v: Vec<CoreMapEntry>) -> Self {
        let cores = v
            .into_iter()
            .map(|e| {
                (
                    FragmentId {
                        population: e.population,
                        index: e.index,
                    },
                    CoreId::new(RouterCoord::new(e.i, e.j), e.slot),
                )
            })
            .collect();
        Self { cores }
    }
}

impl From<CoreMap> for Vec<CoreMapEntry> {
    fn from(m: CoreMap) -> Self {
        m.cores
            .into_iter()
            .map(|(f, c)| CoreMapEntry {
                population: f.population,
                index: f.index,
                i: c.i,
                j: c.j,
                slot: c.slot,
            })
            .collect()
    }
}

impl CoreMap {
    /// The placement recorded in the workload's own assignment.
    pub fn from_workload(w: &WorkloadSpec) -> Self {
        let cores = w
            .assignment
            .iter()
            .flat_map(|(id, cores)| {
                cores.iter().enumerate().map(move |(k, c)| {
                    (
                        FragmentId {
                            population: id.clone(),
                            index: k as u32,
                        },
                        *c,
                    )
                })
            })
            .collect();
        Self { cores }
    }

    pub fn get(&self, f: &FragmentId) -> Option<CoreId> {
        self.cores.get(f).copied()
    }

    pub fn is_injective(&self) -> bool {
        let distinct: BTreeSet<_> = self.cores.values().collect();
        distinct.len() == self.cores.len()
    }

    /// Copy of `w` whose assignment follows this map.
    pub fn apply(&self, w: &WorkloadSpec) -> Result<WorkloadSpec> {
        let mut out = w.clone();
        for (id, cores) in out.assignment.iter_mut() {
            for (k, core) in cores.iter_mut().enumerate() {
                let f = FragmentId {
                    population: id.clone(),
                    index: k as u32,
                };
                *core = self
                    .get(&f)
                    .ok_or_else(|| Error::Mapping(format!("fragment {}[{k}] is not mapped", f.population)))?;
            }
        }
        Ok(out)
    }
}

/// Expected per-timestep work on one core.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoreOps {
    pub dend_ops: f64,
    pub syn_ops: f64,
    pub synmem_reads: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OpCounts {
    pub per_core: BTreeMap<CoreId, CoreOps>,
}

impl OpCounts {
    fn max_by(&self, f: impl Fn(&CoreOps) -> f64) -> f64 {
        self.per_core.values().map(f).fold(0.0, f64::max)
    }

    /// Highest DendOp count over all cores.
    pub fn max_dend_ops(&self) -> f64 {
        self.max_by(|c| c.dend_ops)
    }

    pub fn max_syn_ops(&self) -> f64 {
        self.max_by(|c| c.syn_ops)
    }

    pub fn max_synmem_reads(&self) -> f64 {
        self.max_by(|c| c.synmem_reads)
    }

    pub fn total_syn_ops(&self) -> f64 {
        self.per_core.values().map(|c| c.syn_ops).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PairVolume {
    pub messages: f64,
    pub bits: f64,
}

/// Expected messages per timestep between core pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MessageMatrix {
    pub pairs: BTreeMap<(CoreId, CoreId), PairVolume>,
}

impl MessageMatrix {
    pub fn total_messages(&self) -> f64 {
        self.pairs.values().map(|v| v.messages).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Unscaled statistics of one `(source rows) x (destination columns)` block.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct BlockStats {
    nnz: u64,
    rows_hit: u64,
    words: u64,
}

fn block_stats(c: &Connection, packing: &Packing, rows: Range<u32>, cols: Range<u32>) -> BlockStats {
    let width = cols.len() as u64;
    let dense_row_words = packing.words(width * c.weight_bits as u64);
    let sparse_entry_bits = c.weight_bits as u64 + packing.index_bits as u64;
    let row_words = |nnz: u64| match c.encoding {
        Encoding::Dense => dense_row_words,
        Encoding::Sparse => packing.words(nnz * sparse_entry_bits),
    };
    match c.pattern {
        ConnectivityPattern::AllOnes if width > 0 => {
            let n = rows.len() as u64;
            BlockStats {
                nnz: n * width,
                rows_hit: n,
                words: n * row_words(width),
            }
        }
        ConnectivityPattern::Identity => {
            let lo = rows.start.max(cols.start);
            let hi = rows.end.min(cols.end);
            let n = hi.saturating_sub(lo) as u64;
            BlockStats {
                nnz: n,
                rows_hit: n,
                words: n * row_words(1),
            }
        }
        _ => {
            let mut b = BlockStats::default();
            for s in rows {
                let nnz = c.pattern.row_nnz(s, cols.clone());
                if nnz > 0 {
                    b.nnz += nnz;
                    b.rows_hit += 1;
                    b.words += row_words(nnz);
                }
            }
            b
        }
    }
}

struct Derived {
    ops: OpCounts,
    messages: MessageMatrix,
}

struct Fragment {
    core: CoreId,
    range: Range<u32>,
}

fn fragments(w: &WorkloadSpec, map: &CoreMap, pop: &str) -> Result<Vec<Fragment>> {
    w.fragment_ranges(pop)
        .into_iter()
        .enumerate()
        .map(|(k, range)| {
            let f = FragmentId {
                population: pop.to_string(),
                index: k as u32,
            };
            let core = map
                .get(&f)
                .ok_or_else(|| Error::Mapping(format!("fragment {pop}[{k}] is not mapped")))?;
            Ok(Fragment { core, range })
        })
        .collect()
}

fn derive(w: &WorkloadSpec, map: &CoreMap, packing: &Packing) -> Result<Derived> {
    w.validate_structure()?;
    let frags = w
        .populations
        .iter()
        .map(|p| fragments(w, map, &p.id))
        .collect::<Result<Vec<_>>>()?;
    let mut ops = OpCounts::default();
    for f in frags.iter().flatten() {
        ops.per_core.entry(f.core).or_default().dend_ops += f.range.len() as f64;
    }

    // (source population, source fragment, destination core) -> contributing blocks
    type Key = (usize, usize, CoreId);
    let mut targets: BTreeMap<Key, Vec<(usize, Range<u32>)>> = BTreeMap::new();
    for (ci, c) in w.connections.iter().enumerate() {
        let src_idx = w.population_index(&c.src).expect("validated");
        let dst_idx = w.population_index(&c.dst).expect("validated");
        let activity = w.populations[src_idx].spikes_per_step;
        for (si, s) in frags[src_idx].iter().enumerate() {
            for d in &frags[dst_idx] {
                let b = block_stats(c, packing, s.range.clone(), d.range.clone());
                if b.rows_hit == 0 {
                    continue;
                }
                let core = ops.per_core.entry(d.core).or_default();
                core.syn_ops += b.nnz as f64 * activity;
                core.synmem_reads += b.words as f64 * activity;
                targets
                    .entry((src_idx, si, d.core))
                    .or_default()
                    .push((ci, d.range.clone()));
            }
        }
    }

    let mut messages = MessageMatrix::default();
    for ((src_idx, si, dst_core), blocks) in targets {
        let pop = &w.populations[src_idx];
        let src_frag = &frags[src_idx][si];
        let hit_rows = if let [(ci, cols)] = blocks.as_slice() {
            block_stats(&w.connections[*ci], packing, src_frag.range.clone(), cols.clone()).rows_hit
        } else {
            // Several connections or fragments land on one core: a neuron still sends a
            // single message there if any of them has a nonzero weight in its row.
            src_frag
                .range
                .clone()
                .filter(|&s| {
                    blocks
                        .iter()
                        .any(|(ci, cols)| w.connections[*ci].pattern.row_nnz(s, cols.clone()) > 0)
                })
                .count() as u64
        };
        let msgs = hit_rows as f64 * pop.spikes_per_step;
        if msgs > 0.0 {
            let v = messages.pairs.entry((src_frag.core, dst_core)).or_default();
            v.messages += msgs;
            v.bits += msgs * pop.bits_per_message as f64;
        }
    }
    Ok(Derived { ops, messages })
}

/// Per-core DendOps, SynOps and SynMem reads per timestep under the workload's own
/// assignment.
pub fn derive_op_counts(w: &WorkloadSpec, packing: &Packing) -> Result<OpCounts> {
    derive_op_counts_mapped(w, &CoreMap::from_workload(w), packing)
}

pub fn derive_op_counts_mapped(w: &WorkloadSpec, map: &CoreMap, packing: &Packing) -> Result<OpCounts> {
    Ok(derive(w, map, packing)?.ops)
}

/// Messages and bits per timestep for every (origin core, destination core) pair.
pub fn derive_message_matrix(w: &WorkloadSpec) -> Result<MessageMatrix> {
    derive_message_matrix_mapped(w, &CoreMap::from_workload(w))
}

pub fn derive_message_matrix_mapped(w: &WorkloadSpec, map: &CoreMap) -> Result<MessageMatrix> {
    Ok(derive(w, map, &Packing::default())?.messages)
}

/// Synaptic memory needed on each core, in bytes (whole words).
pub fn synaptic_memory_bytes(w: &WorkloadSpec, packing: &Packing) -> Result<BTreeMap<CoreId, u64>> {
    w.validate_structure()?;
    let map = CoreMap::from_workload(w);
    let mut out: BTreeMap<CoreId, u64> = BTreeMap::new();
    for c in &w.connections {
        let src_frags = fragments(w, &map, &c.src)?;
        for d in fragments(w, &map, &c.dst)? {
            let words: u64 = src_frags
                .iter()
                .map(|s| block_stats(c, packing, s.range.clone(), d.range.clone()).words)
                .sum();
            *out.entry(d.core).or_default() += words * packing.word_width as u64 / 8;
        }
    }
    Ok(out)
}

/// Fails with [`Error::Infeasible`] when a core's synaptic memory exceeds the budget.
pub fn check_memory(w: &WorkloadSpec, packing: &Packing, limits: &WorkloadLimits) -> Result<()> {
    for (core, bytes) in synaptic_memory_bytes(w, packing)? {
        if bytes > limits.synaptic_memory_bytes {
            return Err(Error::Infeasible(format!(
                "core {core} needs {bytes} bytes of synaptic memory, budget is {}",
                limits.synaptic_memory_bytes
            )));
        }
    }
    Ok(())
}

/// Microbenchmarks that isolate one term of the runtime model each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Microbenchmark {
    /// Non-spiking one-neuron pair: only barrier synchronization remains.
    Barrier,
    /// One core of `n` non-spiking neurons.
    DendOp { n: u32 },
    /// `n x n` dense all-ones 1-bit connection between two cores.
    SynOp { n: u32 },
    /// `n x n` dense identity 8-bit connection between two cores.
    SynMemRead { n: u32 },
    /// `pairs` sparse identity `n`-neuron pairs stacked in one router column.
    LinkBandwidth { n: u32, pairs: u32 },
}

fn take_slots(mesh: &MeshConfig, routers: Vec<RouterCoord>, count: usize, what: &str) -> Result<Vec<CoreId>> {
    let slots: Vec<CoreId> = mesh.free_slots(routers).take(count).collect();
    if slots.len() < count {
        return Err(Error::config(
            "/assignment",
            format!("{what}: need {count} free core slots, mesh region has {}", slots.len()),
        ));
    }
    Ok(slots)
}

/// Free slots of the lower half of the chip (origins) and the upper half
/// (destinations). A single-row mesh puts both on that row.
fn split_halves(mesh: &MeshConfig, origins: usize, dests: usize, what: &str) -> Result<(Vec<CoreId>, Vec<CoreId>)> {
    if mesh.rows == 1 {
        let all = take_slots(mesh, mesh.routers().collect(), origins + dests, what)?;
        return Ok((all[..origins].to_vec(), all[origins..].to_vec()));
    }
    let half = mesh.rows / 2;
    let bottom: Vec<_> = mesh.routers().filter(|r| r.i > half).collect();
    let top: Vec<_> = mesh.routers().filter(|r| r.i <= half).collect();
    Ok((
        take_slots(mesh, bottom, origins, what)?,
        take_slots(mesh, top, dests, what)?,
    ))
}

fn check_capacity(n: u32, what: &str) -> Result<()> {
    let cap = WorkloadLimits::default().neuron_capacity;
    if n == 0 || n > cap {
        return Err(Error::config(
            "/populations",
            format!("{what}: {n} neurons per core is outside [1, {cap}]"),
        ));
    }
    Ok(())
}

fn pair_workload(
    n: u32,
    encoding: Encoding,
    weight_bits: u8,
    pattern: ConnectivityPattern,
    cores: &[CoreId],
) -> WorkloadSpec {
    WorkloadSpec {
        populations: vec![Population::new("origin", n), Population::new("destination", n)],
        connections: vec![Connection {
            src: "origin".into(),
            dst: "destination".into(),
            encoding,
            weight_bits,
            pattern,
        }],
        assignment: BTreeMap::from([
            ("origin".to_string(), vec![cores[0]]),
            ("destination".to_string(), vec![cores[1]]),
        ]),
    }
}

/// Builds one of the calibration microbenchmarks.
pub fn gen_microbenchmark(kind: Microbenchmark, mesh: &MeshConfig) -> Result<WorkloadSpec> {
    let first_two = || take_slots(mesh, mesh.routers().collect(), 2, "microbenchmark");
    match kind {
        Microbenchmark::Barrier => {
            let cores = first_two()?;
            let mut w = pair_workload(1, Encoding::Sparse, 8, ConnectivityPattern::Identity, &cores);
            w.populations[0].spikes_per_step = 0.0;
            Ok(w)
        }
        Microbenchmark::DendOp { n } => {
            check_capacity(n, "dendop microbenchmark")?;
            let core = take_slots(mesh, mesh.routers().collect(), 1, "dendop microbenchmark")?[0];
            Ok(WorkloadSpec {
                populations: vec![Population::new("neurons", n).with_activity(0.0)],
                connections: Vec::new(),
                assignment: BTreeMap::from([("neurons".to_string(), vec![core])]),
            })
        }
        Microbenchmark::SynOp { n } => {
            check_capacity(n, "synop microbenchmark")?;
            Ok(pair_workload(
                n,
                Encoding::Dense,
                1,
                ConnectivityPattern::AllOnes,
                &first_two()?,
            ))
        }
        Microbenchmark::SynMemRead { n } => {
            check_capacity(n, "synmem microbenchmark")?;
            Ok(pair_workload(
                n,
                Encoding::Dense,
                8,
                ConnectivityPattern::Identity,
                &first_two()?,
            ))
        }
        Microbenchmark::LinkBandwidth { n, pairs } => {
            check_capacity(n, "link bandwidth microbenchmark")?;
            if pairs == 0 {
                return Err(Error::config(
                    "/populations",
                    "link bandwidth microbenchmark needs at least one pair",
                ));
            }
            // One router column: origins below the midline, destinations above, so every
            // pair crosses the same upward link.
            let column = |above: bool| -> Vec<RouterCoord> {
                let half = mesh.rows / 2;
                (1..=mesh.rows)
                    .filter(|&i| (i <= half) == above)
                    .map(|i| RouterCoord::new(i, 1))
                    .collect()
            };
            if mesh.rows < 2 {
                return Err(Error::config(
                    "/rows",
                    "link bandwidth microbenchmark needs at least two router rows",
                ));
            }
            let origins = take_slots(mesh, column(false), pairs as usize, "link bandwidth microbenchmark")?;
            let dests = take_slots(mesh, column(true), pairs as usize, "link bandwidth microbenchmark")?;
            let mut w = WorkloadSpec::default();
            for k in 0..pairs as usize {
                let (o, d) = (format!("origin{k:02}"), format!("destination{k:02}"));
                w.populations.push(Population::new(o.clone(), n));
                w.populations.push(Population::new(d.clone(), n));
                w.connections.push(Connection {
                    src: o.clone(),
                    dst: d.clone(),
                    encoding: Encoding::Sparse,
                    weight_bits: 8,
                    pattern: ConnectivityPattern::Identity,
                });
                w.assignment.insert(o, vec![origins[k]]);
                w.assignment.insert(d, vec![dests[k]]);
            }
            Ok(w)
        }
    }
}

/// Two populations on `cores` cores each, origins in the lower half of the chip and
/// destinations in the upper half.
fn layer_workload(
    cores: u32,
    neurons_per_core: u32,
    encoding: Encoding,
    weight_bits: u8,
    pattern: ConnectivityPattern,
    mesh: &MeshConfig,
    what: &str,
) -> Result<WorkloadSpec> {
    if cores == 0 {
        return Err(Error::config(
            "/assignment",
            format!("{what}: core count must be positive"),
        ));
    }
    check_capacity(neurons_per_core, what)?;
    let (origins, dests) = split_halves(mesh, cores as usize, cores as usize, what)?;
    let n = cores * neurons_per_core;
    Ok(WorkloadSpec {
        populations: vec![Population::new("origin", n), Population::new("destination", n)],
        connections: vec![Connection {
            src: "origin".into(),
            dst: "destination".into(),
            encoding,
            weight_bits,
            pattern,
        }],
        assignment: BTreeMap::from([("origin".to_string(), origins), ("destination".to_string(), dests)]),
    })
}

/// Dense all-ones linear layer with default packing and memory budget.
pub fn gen_dense_linear_layer(
    cores: u32,
    neurons_per_core: u32,
    weight_bits: u8,
    mesh: &MeshConfig,
) -> Result<WorkloadSpec> {
    gen_dense_linear_layer_with(
        cores,
        neurons_per_core,
        weight_bits,
        mesh,
        &Packing::default(),
        &WorkloadLimits::default(),
    )
}

/// Dense all-ones linear layer; fails with [`Error::Infeasible`] when the destination
/// weights do not fit in synaptic memory.
pub fn gen_dense_linear_layer_with(
    cores: u32,
    neurons_per_core: u32,
    weight_bits: u8,
    mesh: &MeshConfig,
    packing: &Packing,
    limits: &WorkloadLimits,
) -> Result<WorkloadSpec> {
    if !(1..=MAX_WEIGHT_BITS).contains(&weight_bits) {
        return Err(Error::config("/connections/0/weight_bits", "must lie in [1, 8]"));
    }
    let w = layer_workload(
        cores,
        neurons_per_core,
        Encoding::Dense,
        weight_bits,
        ConnectivityPattern::AllOnes,
        mesh,
        "dense linear layer",
    )?;
    check_memory(&w, packing, limits)?;
    Ok(w)
}

/// Core counts, neurons per core and weight widths of the dense linear layer sweep.
pub const DENSE_SWEEP_CORES: [u32; 6] = [1, 4, 8, 16, 32, 60];
pub const DENSE_SWEEP_NEURONS_PER_CORE: [u32; 6] = [1, 16, 32, 64, 128, 256];
pub const DENSE_SWEEP_WEIGHT_BITS: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

/// Sparse tiled-identity layer: every origin neuron reaches exactly one neuron on every
/// destination core, so all origin cores talk to all destination cores.
pub fn gen_tiled_identity(
    origin_cores: u32,
    dest_cores: u32,
    neurons_per_core: u32,
    mesh: &MeshConfig,
) -> Result<WorkloadSpec> {
    if origin_cores == 0 || dest_cores == 0 {
        return Err(Error::config(
            "/assignment",
            "tiled identity: core counts must be positive",
        ));
    }
    check_capacity(neurons_per_core, "tiled identity")?;
    let (origins, dests) = split_halves(mesh, origin_cores as usize, dest_cores as usize, "tiled identity")?;
    let w = WorkloadSpec {
        populations: vec![
            Population::new("origin", origin_cores * neurons_per_core),
            Population::new("destination", dest_cores * neurons_per_core),
        ],
        connections: vec![Connection {
            src: "origin".into(),
            dst: "destination".into(),
            encoding: Encoding::Sparse,
            weight_bits: 8,
            pattern: ConnectivityPattern::TiledIdentity { tile: neurons_per_core },
        }],
        assignment: BTreeMap::from([("origin".to_string(), origins), ("destination".to_string(), dests)]),
    };
    w.validate_structure()?;
    Ok(w)
}

/// QUBO solver traffic: `n` recurrently all-to-all connected neurons over `cores`
/// cores, filled column by column from the bottom-left core. Returns the checking-stage
/// and switching-stage workloads, which differ only in activity.
pub fn gen_qubo(
    n: u32,
    cores: u32,
    checking_rate: f64,
    switching_rate: f64,
    mesh: &MeshConfig,
) -> Result<(WorkloadSpec, WorkloadSpec)> {
    for (field, r) in [("checking_rate", checking_rate), ("switching_rate", switching_rate)] {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::config(format!("/{field}"), "must lie in [0, 1]"));
        }
    }
    if n == 0 || cores == 0 || cores > n {
        return Err(Error::config(
            "/neurons",
            format!("qubo: {n} neurons over {cores} cores"),
        ));
    }
    let column_major: Vec<RouterCoord> = (1..=mesh.cols)
        .flat_map(|j| (1..=mesh.rows).rev().map(move |i| RouterCoord::new(i, j)))
        .collect();
    let slots = take_slots(mesh, column_major, cores as usize, "qubo")?;
    let base = WorkloadSpec {
        populations: vec![Population::new("qubo", n)],
        connections: vec![Connection {
            src: "qubo".into(),
            dst: "qubo".into(),
            encoding: Encoding::Dense,
            weight_bits: 8,
            pattern: ConnectivityPattern::AllOnes,
        }],
        assignment: BTreeMap::from([("qubo".to_string(), slots)]),
    };
    let per_core = split_even(n, cores)[0].len() as u32;
    check_capacity(per_core, "qubo")?;
    Ok((
        base.clone().with_activity(checking_rate),
        base.with_activity(switching_rate),
    ))
}
