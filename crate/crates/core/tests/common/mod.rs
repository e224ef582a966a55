//! Independent oracles used by the integration tests. Nothing here calls the library's
//! routing, counting or load accumulation.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use meshroof::mesh::{CoreId, MeshConfig, RouterCoord};
use meshroof::placement::PlacementMatrix;
use meshroof::rng::SplitMix64;
use meshroof::workload::{Connection, ConnectivityPattern, Encoding, Population, WorkloadSpec};

/// (kind name, i, j, core link index)
pub type LinkKey = (&'static str, u32, u32, Option<u32>);

/// Walks a message one hop at a time: west/east until the column matches, then
/// north/south.
pub fn step_route(src: (u32, u32, u32), dst: (u32, u32, u32), sharing: u32) -> Vec<LinkKey> {
    let mut out = vec![("core_to_router", src.0, src.1, Some(src.2 / sharing))];
    let (mut i, mut j) = (src.0 as i64, src.1 as i64);
    let (ti, tj) = (dst.0 as i64, dst.1 as i64);
    while j != tj {
        let dir = (tj - j).signum();
        out.push((
            if dir < 0 { "router_left" } else { "router_right" },
            i as u32,
            j as u32,
            None,
        ));
        j += dir;
    }
    while i != ti {
        let dir = (ti - i).signum();
        out.push((
            if dir < 0 { "router_up" } else { "router_down" },
            i as u32,
            j as u32,
            None,
        ));
        i += dir;
    }
    out.push(("router_to_core", dst.0, dst.1, Some(dst.2 / sharing)));
    out
}

fn core_of(w: &WorkloadSpec, pop: &Population, neuron: u32) -> CoreId {
    let cores = &w.assignment[&pop.id];
    let k = cores.len() as u32;
    let base = pop.neurons / k;
    let extra = pop.neurons % k;
    // the first `extra` fragments hold base + 1 neurons
    let big = extra * (base + 1);
    let idx = if neuron < big {
        neuron / (base + 1)
    } else {
        extra + (neuron - big) / base
    };
    cores[idx as usize]
}

fn pop<'a>(w: &'a WorkloadSpec, id: &str) -> &'a Population {
    w.populations.iter().find(|p| p.id == id).unwrap()
}

/// Messages per step between cores: a spiking neuron sends one message to each core
/// hosting at least one of its nonzero targets, across all outgoing connections.
pub fn naive_messages(w: &WorkloadSpec) -> BTreeMap<(CoreId, CoreId), (f64, f64)> {
    let mut out: BTreeMap<(CoreId, CoreId), (f64, f64)> = BTreeMap::new();
    for p in &w.populations {
        for s in 0..p.neurons {
            let mut cores = BTreeSet::new();
            for c in w.connections.iter().filter(|c| c.src == p.id) {
                let dp = pop(w, &c.dst);
                for d in 0..dp.neurons {
                    if c.pattern.is_nonzero(s, d) {
                        cores.insert(core_of(w, dp, d));
                    }
                }
            }
            let src = core_of(w, p, s);
            for dc in cores {
                let e = out.entry((src, dc)).or_default();
                e.0 += p.spikes_per_step;
                e.1 += p.spikes_per_step * p.bits_per_message as f64;
            }
        }
    }
    out.retain(|_, v| v.0 > 0.0);
    out
}

pub fn naive_link_loads(w: &WorkloadSpec, mesh: &MeshConfig) -> BTreeMap<LinkKey, f64> {
    let mut loads: BTreeMap<LinkKey, f64> = BTreeMap::new();
    for ((s, d), (_, bits)) in naive_messages(w) {
        for link in step_route((s.i, s.j, s.slot), (d.i, d.j, d.slot), mesh.core_link_sharing) {
            *loads.entry(link).or_default() += bits;
        }
    }
    loads.retain(|_, v| *v > 0.0);
    loads
}

/// (dendops, synops, synmem reads) per core by enumerating every weight.
pub fn naive_op_counts(w: &WorkloadSpec, word_width: u64, index_bits: u64) -> BTreeMap<CoreId, (f64, f64, f64)> {
    let mut out: BTreeMap<CoreId, (f64, f64, f64)> = BTreeMap::new();
    for p in &w.populations {
        for n in 0..p.neurons {
            out.entry(core_of(w, p, n)).or_default().0 += 1.0;
        }
    }
    for c in &w.connections {
        let sp = pop(w, &c.src);
        let dp = pop(w, &c.dst);
        let act = sp.spikes_per_step;
        for s in 0..sp.neurons {
            // neurons of the destination population grouped by hosting fragment
            let mut per_fragment: BTreeMap<(CoreId, u32), (u64, u64)> = BTreeMap::new();
            for d in 0..dp.neurons {
                let core = core_of(w, dp, d);
                let frag = fragment_index(w, dp, d);
                let e = per_fragment.entry((core, frag)).or_default();
                e.0 += 1;
                e.1 += u64::from(c.pattern.is_nonzero(s, d));
            }
            for ((core, _), (width, nnz)) in per_fragment {
                if nnz == 0 {
                    continue;
                }
                let bits = match c.encoding {
                    Encoding::Dense => width * c.weight_bits as u64,
                    Encoding::Sparse => nnz * (c.weight_bits as u64 + index_bits),
                };
                let e = out.entry(core).or_default();
                e.1 += nnz as f64 * act;
                e.2 += bits.div_ceil(word_width) as f64 * act;
            }
        }
    }
    out
}

fn fragment_index(w: &WorkloadSpec, p: &Population, neuron: u32) -> u32 {
    let k = w.assignment[&p.id].len() as u32;
    let base = p.neurons / k;
    let extra = p.neurons % k;
    let big = extra * (base + 1);
    if neuron < big {
        neuron / (base + 1)
    } else {
        extra + (neuron - big) / base
    }
}

/// Unit loads of the paired all-to-all layer on `p`, one origin and one destination
/// per occupied router, accumulated by stepping every route.
pub fn paired_unit_loads(p: &PlacementMatrix) -> BTreeMap<LinkKey, u64> {
    let occupied: Vec<(u32, u32)> = (0..p.rows())
        .flat_map(|r| (0..p.cols()).map(move |c| (r, c)))
        .filter(|&(r, c)| p.get(r, c))
        .map(|(r, c)| (r as u32 + 1, c as u32 + 1))
        .collect();
    let mut loads = BTreeMap::new();
    for &(si, sj) in &occupied {
        for &(di, dj) in &occupied {
            for link in step_route((si, sj, 0), (di, dj, 1), 1) {
                *loads.entry(link).or_insert(0u64) += 1;
            }
        }
    }
    loads
}

pub fn max_of(loads: &BTreeMap<LinkKey, u64>, kind: &str) -> u64 {
    loads
        .iter()
        .filter(|(k, _)| k.0 == kind)
        .map(|(_, &v)| v)
        .max()
        .unwrap_or(0)
}

pub fn max_router_link(loads: &BTreeMap<LinkKey, u64>) -> u64 {
    ["router_left", "router_right", "router_up", "router_down"]
        .iter()
        .map(|k| max_of(loads, k))
        .max()
        .unwrap()
}

/// A small random workload on `mesh`, fully determined by `seed`.
pub fn random_workload(seed: u64, mesh: &MeshConfig) -> WorkloadSpec {
    let mut rng = SplitMix64::new(seed);
    let cores: Vec<CoreId> = mesh.free_slots(mesh.routers().collect::<Vec<_>>()).collect();
    let n_pops = 1 + rng.next_below(3) as usize;
    let mut w = WorkloadSpec::default();
    for k in 0..n_pops {
        let neurons = 1 + rng.next_below(24) as u32;
        let activity = [0.0, 0.25, 0.5, 1.0][rng.next_below(4) as usize];
        let bits = [8, 16, 32][rng.next_below(3) as usize];
        let mut p = Population::new(format!("p{k}"), neurons).with_activity(activity);
        p.bits_per_message = bits;
        let frags = 1 + rng.next_below(neurons.min(4) as u64) as usize;
        let mut pool = cores.clone();
        rng.shuffle(&mut pool);
        let assigned = pool[..frags.min(pool.len())].to_vec();
        w.assignment.insert(p.id.clone(), assigned);
        w.populations.push(p);
    }
    let n_conns = 1 + rng.next_below(3) as usize;
    for _ in 0..n_conns {
        let (si, di) = (
            rng.next_below(n_pops as u64) as usize,
            rng.next_below(n_pops as u64) as usize,
        );
        let (src, dst) = (format!("p{si}"), format!("p{di}"));
        let g = gcd(w.populations[si].neurons, w.populations[di].neurons);
        let divisors: Vec<u32> = (1..=g).filter(|t| g.is_multiple_of(*t)).collect();
        let pattern = match rng.next_below(4) {
            0 => ConnectivityPattern::AllOnes,
            1 => ConnectivityPattern::Identity,
            2 => ConnectivityPattern::TiledIdentity {
                tile: divisors[rng.next_below(divisors.len() as u64) as usize],
            },
            _ => ConnectivityPattern::RandomDensity {
                density: rng.next_f64(),
                seed: rng.next_u64(),
            },
        };
        w.connections.push(Connection {
            src,
            dst,
            encoding: if rng.next_below(2) == 0 {
                Encoding::Dense
            } else {
                Encoding::Sparse
            },
            weight_bits: 1 + rng.next_below(8) as u8,
            pattern,
        });
    }
    w
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn random_mesh(seed: u64, max_side: u64) -> MeshConfig {
    let mut rng = SplitMix64::new(seed ^ 0x5eed);
    let mut mesh = MeshConfig::new(1 + rng.next_below(max_side) as u32, 1 + rng.next_below(max_side) as u32).unwrap();
    mesh.cores_per_router = 1 + rng.next_below(4) as u32;
    mesh
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

pub fn router(i: u32, j: u32) -> RouterCoord {
    RouterCoord::new(i, j)
}

/// Maxima of the paired all-to-all unit loads on `p`, by stepping every route over flat
/// per-router arrays: (left, right, up, down, heaviest including core-side links).
pub fn paired_maxima(p: &PlacementMatrix) -> [u64; 5] {
    let (n, m) = (p.rows(), p.cols());
    let occupied: Vec<(usize, usize)> = (0..n)
        .flat_map(|r| (0..m).map(move |c| (r, c)))
        .filter(|&(r, c)| p.get(r, c))
        .collect();
    let mut dir = vec![[0u64; 4]; n * m];
    for &(si, sj) in &occupied {
        for &(di, dj) in &occupied {
            let mut j = sj;
            while j != dj {
                if dj < j {
                    dir[si * m + j][0] += 1;
                    j -= 1;
                } else {
                    dir[si * m + j][1] += 1;
                    j += 1;
                }
            }
            let mut i = si;
            while i != di {
                if di < i {
                    dir[i * m + dj][2] += 1;
                    i -= 1;
                } else {
                    dir[i * m + dj][3] += 1;
                    i += 1;
                }
            }
        }
    }
    let mut out = [0u64; 5];
    for d in &dir {
        for k in 0..4 {
            out[k] = out[k].max(d[k]);
        }
    }
    // every origin sends to and every destination hears from all occupied routers
    out[4] = out[..4].iter().copied().max().unwrap().max(occupied.len() as u64);
    out
}
