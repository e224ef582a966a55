//! End-to-end acceptance checks. Runs without the libtest harness so that every check
//! prints its own PASS or FAIL line; the process fails if any check fails.

mod common;

use std::time::Instant;

use meshroof::analytic::{nll_closed_form, nll_formula, nll_permutation_bound, scaling_table, ScalingPattern};
use meshroof::calibration::{calibrate_suite, microbench_sweep, Quantity, TimedSweep};
use meshroof::mesh::{LinkKind, MeshConfig};
use meshroof::model::{estimate, fit_effective_rate, CalibrationParams};
use meshroof::placement::{pattern, random_on_mesh, realize, PlacementMatrix, PlacementPattern};
use meshroof::rng::SplitMix64;
use meshroof::simref::simulate_step;
use meshroof::traffic::{compute_link_loads, heaviest_link, HeaviestLink};
use meshroof::workload::{
    derive_op_counts, gen_dense_linear_layer, gen_microbenchmark, gen_qubo, gen_tiled_identity, CoreMap,
    Microbenchmark, WorkloadSpec, DENSE_SWEEP_CORES, DENSE_SWEEP_NEURONS_PER_CORE, DENSE_SWEEP_WEIGHT_BITS,
};

use common::{paired_maxima, pearson, random_mesh, random_workload};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn parallel_chunks<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get());
    let chunk = items.len().div_ceil(threads).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    })
}

fn random_grids(rows: usize, cols: usize, count: usize, seed: u64) -> Vec<PlacementMatrix> {
    let mut rng = SplitMix64::new(seed);
    (0..count)
        .map(|_| {
            let density = rng.next_f64();
            let mut p = PlacementMatrix::zeros(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    p.set(r, c, rng.next_f64() < density);
                }
            }
            p
        })
        .collect()
}

fn formula_grids() -> Vec<PlacementMatrix> {
    let mut grids: Vec<PlacementMatrix> = (0..1u64 << 16).map(|b| PlacementMatrix::from_bits(4, 4, b)).collect();
    grids.extend(random_grids(5, 5, 10_000, 55));
    grids.extend(random_grids(6, 6, 10_000, 66));
    grids
}

fn leftward_formula_is_exact() -> Outcome {
    let start = Instant::now();
    let grids = formula_grids();
    let mismatches: Vec<String> = parallel_chunks(&grids, |p| {
        let a = nll_formula(p);
        let o = paired_maxima(p);
        let got = [
            a.directions.left,
            a.directions.right,
            a.directions.up,
            a.directions.down,
        ];
        (got != o[..4]).then(|| format!("{p}: formula {got:?}, routed {:?}", &o[..4]))
    })
    .into_iter()
    .flatten()
    .collect();
    ensure(mismatches.is_empty(), || {
        format!("{} mismatches, first: {}", mismatches.len(), mismatches[0])
    })?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{} grids, all four directions, {secs:.2} s", grids.len()))
}

fn closed_forms_hold() -> Outcome {
    for n in 1..=16 {
        for m in 1..=16 {
            let kind = PlacementPattern::SaturatedRect { n, m };
            let expect = (n * (m / 2) * m.div_ceil(2)) as u64;
            let formula = nll_formula(&pattern(&kind).unwrap()).value;
            let closed = nll_closed_form(&kind).unwrap();
            ensure(formula == expect && closed == expect, || {
                format!("rect {n}x{m}: eq {formula}, closed {closed}, want {expect}")
            })?;
        }
    }
    let square = nll_formula(&pattern(&PlacementPattern::Square { n: 4 }).unwrap()).value;
    ensure(square == 16 && 16f64.powf(1.5) / 4.0 == 16.0, || {
        format!("square 4: {square}")
    })?;
    for n in (2..=16).step_by(2) {
        let p = pattern(&PlacementPattern::Xshape { n }).unwrap();
        let want = 2 * (n as u64 - 1);
        let (formula, routed) = (nll_formula(&p).value, paired_maxima(&p)[0]);
        ensure(formula == want && routed == want, || {
            format!("xshape {n}: {formula}/{routed}, want {want}")
        })?;
    }
    for n in 1..=16 {
        let p = pattern(&PlacementPattern::Identity { n }).unwrap();
        let want = n as u64 - 1;
        let (formula, routed) = (nll_formula(&p).value, paired_maxima(&p)[0]);
        ensure(formula == want && routed == want, || {
            format!("identity {n}: {formula}/{routed}, want {want}")
        })?;
    }
    let mut samples = 0;
    let mut worst = 0.0f64;
    for n in 4..=8 {
        for a in 1..=3 {
            let bound = nll_permutation_bound(n, a).unwrap();
            for seed in 0..100 {
                let p = pattern(&PlacementPattern::Permutation { n, a, seed }).unwrap();
                let o = paired_maxima(&p);
                let heaviest = o[..4].iter().copied().max().unwrap();
                ensure(heaviest <= bound, || {
                    format!("permutation n={n} a={a} seed={seed}: {heaviest} > {bound}")
                })?;
                worst = worst.max(heaviest as f64 / bound as f64);
                samples += 1;
            }
        }
    }
    Ok(format!(
        "rect 16x16 grid, xshape, identity, {samples} permutations (max load/aM = {worst:.3})"
    ))
}

fn core_side_floor_and_xshape_optimum() -> Outcome {
    let grids = formula_grids();
    let below: Vec<String> = parallel_chunks(&grids, |p| {
        let m = p.pair_count() as u64;
        let overall = paired_maxima(p)[4];
        (overall < m).then(|| format!("{p}: overall {overall} < M = {m}"))
    })
    .into_iter()
    .flatten()
    .collect();
    ensure(below.is_empty(), || below[0].clone())?;
    for n in (2..=16).step_by(2) {
        let p = pattern(&PlacementPattern::Xshape { n }).unwrap();
        let o = paired_maxima(&p);
        let m = 2 * n as u64;
        ensure(o[4] == m, || format!("xshape {n}: overall {} != M = {m}", o[4]))?;
    }
    // the same floor through the full workload and traffic path
    let mesh = MeshConfig::new(8, 8).unwrap();
    for n in [2usize, 4, 8] {
        let p = pattern(&PlacementPattern::Xshape { n }).unwrap();
        let m = (2 * n) as u32;
        let w = gen_tiled_identity(m, m, 1, &mesh).unwrap();
        let loads = compute_link_loads(&w, &realize(&p, &w, &mesh).unwrap(), &mesh).unwrap();
        let h = heaviest_link(&loads).bits_per_step;
        ensure(h == m as f64 * 32.0, || {
            format!("xshape {n} workload: heaviest {h} bits")
        })?;
    }
    Ok(format!(
        "{} grids at or above M; xshape overall = M for even n <= 16",
        grids.len()
    ))
}

fn link_bandwidth_traffic() -> Outcome {
    let mesh = MeshConfig::loihi2();
    let w =
        gen_microbenchmark(Microbenchmark::LinkBandwidth { n: 4095, pairs: 12 }, &mesh).map_err(|e| e.to_string())?;
    let h = heaviest_link(&compute_link_loads(&w, &CoreMap::from_workload(&w), &mesh).unwrap());
    let want = 32.0 * 4095.0 * 12.0;
    ensure(h.bits_per_step == want, || {
        format!("heaviest {} bits, want {want}", h.bits_per_step)
    })?;
    let link = h.link.unwrap();
    ensure(matches!(link.kind, LinkKind::RouterUp | LinkKind::RouterDown), || {
        format!("heaviest link {link} is not vertical")
    })?;
    Ok(format!("{want} bits on {link}"))
}

fn microbenchmark_count_laws() -> Outcome {
    let mesh = MeshConfig::loihi2();
    let cal = CalibrationParams::synthetic();
    for n in [64u32, 256, 1024] {
        let nf = n as f64;
        let w = gen_microbenchmark(Microbenchmark::SynOp { n }, &mesh).unwrap();
        let ops = derive_op_counts(&w, &cal.packing()).unwrap();
        ensure(ops.max_syn_ops() == nf * nf, || {
            format!("synop N={n}: {}", ops.max_syn_ops())
        })?;
        let w = gen_microbenchmark(Microbenchmark::SynMemRead { n }, &mesh).unwrap();
        let ops = derive_op_counts(&w, &cal.packing()).unwrap();
        let reads = nf * (n as u64 * 8).div_ceil(cal.word_width as u64) as f64;
        ensure(ops.max_synmem_reads() == reads, || {
            format!("synmem N={n}: {} reads, want {reads}", ops.max_synmem_reads())
        })?;
        ensure(ops.max_syn_ops() == nf, || {
            format!("synmem N={n}: {} synops", ops.max_syn_ops())
        })?;
    }
    Ok("N in {64, 256, 1024}".into())
}

fn log_uniform(rng: &mut SplitMix64, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.next_f64() * (hi.ln() - lo.ln())).exp()
}

fn random_calibration(rng: &mut SplitMix64) -> CalibrationParams {
    CalibrationParams {
        t_dendop: log_uniform(rng, 1e-10, 1e-7),
        t_synop: log_uniform(rng, 1e-11, 1e-8),
        t_synmem_read: log_uniform(rng, 1e-11, 1e-8),
        link_bandwidth: log_uniform(rng, 1e8, 1e11),
        t_barrier: log_uniform(rng, 1e-7, 1e-4),
        ..CalibrationParams::synthetic()
    }
}

fn estimate_is_a_lower_bound() -> Outcome {
    let mut rng = SplitMix64::new(2024);
    let loihi = MeshConfig::loihi2();
    let mut violations = Vec::new();
    for k in 0..1000u64 {
        let cal = random_calibration(&mut rng);
        let (w, map, mesh): (WorkloadSpec, CoreMap, MeshConfig) = if k % 2 == 0 {
            let mesh = random_mesh(k, 8);
            let w = random_workload(k, &mesh);
            let map = CoreMap::from_workload(&w);
            (w, map, mesh)
        } else {
            let pairs = 1 + rng.next_below(16) as u32;
            let w = gen_tiled_identity(pairs, pairs, 1 + rng.next_below(256) as u32, &loihi).unwrap();
            let p = random_on_mesh(pairs as usize, &loihi, k).unwrap();
            let map = realize(&p, &w, &loihi).unwrap();
            (w, map, loihi.clone())
        };
        let ops = meshroof::workload::derive_op_counts_mapped(&w, &map, &cal.packing()).unwrap();
        let hl = heaviest_link(&compute_link_loads(&w, &map, &mesh).unwrap());
        let (e, o) = (estimate(&ops, &hl, &cal), simulate_step(&ops, &hl, &cal));
        if e.t_step > o.t_step {
            violations.push(format!("triple {k}: estimate {} > oracle {}", e.t_step, o.t_step));
        }
    }
    ensure(violations.is_empty(), || {
        format!("{} violations, first: {}", violations.len(), violations[0])
    })?;
    Ok("1000 triples, 0 violations".into())
}

fn dense_sweep_correlation() -> Outcome {
    let start = Instant::now();
    let mesh = MeshConfig::loihi2();
    let cal = CalibrationParams::synthetic();
    let (mut est, mut oracle) = (Vec::new(), Vec::new());
    let mut classes = std::collections::BTreeSet::new();
    for &c in &DENSE_SWEEP_CORES {
        for &n in &DENSE_SWEEP_NEURONS_PER_CORE {
            for &b in &DENSE_SWEEP_WEIGHT_BITS {
                let Ok(w) = gen_dense_linear_layer(c, n, b, &mesh) else {
                    continue;
                };
                let ops = derive_op_counts(&w, &cal.packing()).unwrap();
                let hl = heaviest_link(&compute_link_loads(&w, &CoreMap::from_workload(&w), &mesh).unwrap());
                let e = estimate(&ops, &hl, &cal);
                classes.insert(e.bottleneck.label());
                est.push(e.t_step);
                oracle.push(simulate_step(&ops, &hl, &cal).t_step);
            }
        }
    }
    let r = pearson(&est, &oracle);
    let secs = start.elapsed().as_secs_f64();
    ensure(r >= 0.9, || format!("pearson {r:.4} over {} configs", est.len()))?;
    ensure(secs < 30.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "pearson {r:.4} over {} feasible configs, bottlenecks {classes:?}, {secs:.2} s",
        est.len()
    ))
}

fn xshape_is_fastest_placement() -> Outcome {
    let mesh = MeshConfig::new(8, 8).unwrap();
    let cal = CalibrationParams::synthetic();
    let w = gen_tiled_identity(8, 8, 1024, &mesh).unwrap();
    let eval = |p: &PlacementMatrix| -> (f64, HeaviestLink, f64) {
        let map = realize(p, &w, &mesh).unwrap();
        let loads = compute_link_loads(&w, &map, &mesh).unwrap();
        let hl = heaviest_link(&loads);
        let r2r = loads.router_links().map(|(_, &b)| b).fold(0.0, f64::max);
        let ops = meshroof::workload::derive_op_counts_mapped(&w, &map, &cal.packing()).unwrap();
        (estimate(&ops, &hl, &cal).t_step, hl, r2r)
    };
    let (tx, hx, rx) = eval(&pattern(&PlacementPattern::Xshape { n: 4 }).unwrap());
    let mut others: Vec<(String, PlacementMatrix)> = vec![
        (
            "rect-2x4".into(),
            pattern(&PlacementPattern::SaturatedRect { n: 2, m: 4 }).unwrap(),
        ),
        (
            "identity-8".into(),
            pattern(&PlacementPattern::Identity { n: 8 }).unwrap(),
        ),
    ];
    others.extend((0..20).map(|s| (format!("random-s{s:02}"), random_on_mesh(8, &mesh, s).unwrap())));
    let unit = 1024.0 * 32.0;
    let mut ties = Vec::new();
    for (name, p) in &others {
        let (t, h, r) = eval(p);
        if t <= tx {
            ties.push(format!(
                "{name} {t:e} s (heaviest {} units, router-to-router {})",
                h.bits_per_step / unit,
                r / unit
            ));
        }
    }
    ensure(ties.is_empty(), || {
        format!(
            "xshape {tx:e} s (heaviest {} units on {}, router-to-router {}) is not strictly below {} of {}: {}",
            hx.bits_per_step / unit,
            hx.link.map(|l| l.to_string()).unwrap_or_default(),
            rx / unit,
            ties.len(),
            others.len(),
            ties.join("; ")
        )
    })?;
    Ok(format!("xshape {tx:e} s below {} placements", others.len()))
}

fn qubo_activity_scaling() -> Outcome {
    let mesh = MeshConfig::loihi2();
    let mut checked = 0;
    for (n, cores) in [(250u32, 8u32), (500, 16), (1000, 32), (2000, 64), (4000, 120)] {
        let (full, _) = gen_qubo(n, cores, 1.0, 1.0, &mesh).map_err(|e| e.to_string())?;
        let map = CoreMap::from_workload(&full);
        let base = heaviest_link(&compute_link_loads(&full, &map, &mesh).unwrap());
        for r in [0.1, 0.3, 1.0] {
            let (check, switch) = gen_qubo(n, cores, r, r, &mesh).unwrap();
            for stage in [check, switch] {
                let h = heaviest_link(&compute_link_loads(&stage, &map, &mesh).unwrap());
                let want = r * base.bits_per_step;
                let rel = (h.bits_per_step - want).abs() / want;
                ensure(rel <= 1e-12, || format!("N={n} r={r}: {} vs {want}", h.bits_per_step))?;
                ensure(h.link == base.link, || {
                    format!("N={n} r={r}: argmax moved to {:?}", h.link)
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} stage workloads"))
}

fn scaling_table_shape() -> Outcome {
    let pairs = [16u64, 36, 64, 100, 144];
    let rows = scaling_table(&[ScalingPattern::Square, ScalingPattern::Xshape], &pairs).map_err(|e| e.to_string())?;
    let load = |kind: ScalingPattern, m: u64| rows.iter().find(|r| r.pattern == kind && r.pairs == m).unwrap().load;
    let mut prev = 0.0;
    for m in pairs {
        let sq = load(ScalingPattern::Square, m);
        let x = load(ScalingPattern::Xshape, m);
        let side = (m as f64).sqrt() as u64;
        ensure(4 * sq == side * side * side, || format!("square M={m}: {sq}"))?;
        ensure(x == m - 2, || format!("xshape M={m}: {x}"))?;
        let ratio = sq as f64 / x as f64;
        ensure(ratio > prev, || format!("ratio fell at M={m}: {ratio} <= {prev}"))?;
        prev = ratio;
    }
    Ok(format!("M in {pairs:?}, final square/x ratio {prev:.3}"))
}

fn closed_loop_calibration() -> Outcome {
    let mesh = MeshConfig::loihi2();
    let cal = CalibrationParams::synthetic();
    let packing = cal.packing();
    let mut timed = Vec::new();
    let mut raw = Vec::new();
    for q in Quantity::ALL {
        let sweep = microbench_sweep(q, q.default_sizes(), &mesh, &packing).map_err(|e| e.to_string())?;
        let times = sweep.simulate(&cal);
        let fit = fit_effective_rate(&sweep.series(&times).unwrap()).unwrap();
        raw.push((q, fit));
        timed.push(TimedSweep { sweep, times });
    }
    let got = calibrate_suite(&timed, &packing, cal.bits_per_message_default).map_err(|e| e.to_string())?;
    let p = got.params;
    let mut report = Vec::new();
    for (name, est, want) in [
        ("T_DO", p.t_dendop, cal.t_dendop),
        ("T_SO", p.t_synop, cal.t_synop),
        ("T_SMR", p.t_synmem_read, cal.t_synmem_read),
        ("B", p.link_bandwidth, cal.link_bandwidth),
    ] {
        let rel = (est - want).abs() / want;
        ensure(rel <= 0.01, || {
            format!("{name}: {est:e} vs {want:e} ({:.3}%)", rel * 100.0)
        })?;
        report.push(format!("{name} {:.1e}%", rel * 100.0));
    }
    let single: Vec<String> = raw
        .iter()
        .map(|(q, f)| {
            let want = match q {
                Quantity::Dendop => cal.t_dendop,
                Quantity::Synop => cal.t_synop,
                Quantity::Synmem => cal.t_synmem_read,
                Quantity::Bandwidth => 1.0 / cal.link_bandwidth,
            };
            format!("{} {:.2}%", q.name(), (f.per_unit_time - want).abs() / want * 100.0)
        })
        .collect();
    Ok(format!(
        "{} after {} rounds (single-sweep fits: {})",
        report.join(", "),
        got.iterations,
        single.join(", ")
    ))
}

fn main() {
    let checks: [Check; 11] = [
        (
            "leftward cumulative-sum load equals routed accumulation",
            leftward_formula_is_exact,
        ),
        ("closed forms and permutation bound", closed_forms_hold),
        (
            "core-side floor M, reached by the x-shape",
            core_side_floor_and_xshape_optimum,
        ),
        ("link bandwidth column traffic", link_bandwidth_traffic),
        ("SynOp and SynMem microbenchmark counts", microbenchmark_count_laws),
        (
            "estimate never exceeds the serialized oracle",
            estimate_is_a_lower_bound,
        ),
        (
            "dense linear sweep correlation with the oracle",
            dense_sweep_correlation,
        ),
        (
            "x-shape strictly fastest tiled-identity placement",
            xshape_is_fastest_placement,
        ),
        ("QUBO load scales with activity", qubo_activity_scaling),
        ("square vs x-shape scaling table", scaling_table_shape),
        ("closed-loop rate recovery within 1%", closed_loop_calibration),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
