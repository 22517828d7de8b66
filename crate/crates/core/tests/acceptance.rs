//! Acceptance checks. Each test writes one `criterion N: PASS|FAIL` line to
//! stderr (bypassing the harness capture) before asserting.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::Write;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use polyscale::fixtures::{self, clustered, polygon_tree, random_connected, twisted_pair};
use polyscale::geometry::{self, Point};
use polyscale::io::to_json;
use polyscale::layout::{self, EnergyConfig, EnergyModel, Layout, Phase, Sizes, Term};
use polyscale::metrics::{overlap_report, MetricsConfig};
use polyscale::pipeline::{self, run_pipeline, EmitScales, PipelineConfig};
use polyscale::planarity::{self, ForbiddenReport};
use polyscale::simplify::{apply, reconstruct_scales, SimplifyConfig, Simplifier, TerminationCriteria};
use polyscale::stats::{adjacency_factor, betweenness_all, DEFAULT_T};
use polyscale::{ElementId, Hypergraph, Kind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n:>2}: {verdict}  {detail}");
}

fn corpus(seed: u64, count: usize, max_size: usize) -> Vec<Hypergraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_connected(&mut rng, max_size)).collect()
}

fn criteria_for(i: usize, h: &Hypergraph) -> TerminationCriteria {
    match i % 4 {
        0 => TerminationCriteria {
            until_forbidden_free: true,
            ..Default::default()
        },
        1 => TerminationCriteria {
            until_linear: true,
            ..Default::default()
        },
        2 => TerminationCriteria {
            target_vertices: Some(1),
            ..Default::default()
        },
        _ => TerminationCriteria {
            target_hyperedges: Some(h.num_hyperedges() / 2),
            ..Default::default()
        },
    }
}

/// Forward scales H_0..=H_n recorded while stepping.
fn forward_scales(h0: &Hypergraph, cfg: &SimplifyConfig) -> (Vec<Hypergraph>, Simplifier) {
    let mut s = Simplifier::new(h0.clone(), cfg).unwrap();
    let mut scales = vec![h0.clone()];
    while cfg.criteria.satisfied(s.hypergraph()).unwrap().is_none() {
        if s.step().unwrap().is_none() {
            break;
        }
        scales.push(s.hypergraph().clone());
    }
    (scales, s)
}

#[test]
fn criterion_01_round_trip() {
    let start = Instant::now();
    let mut mismatches = 0;
    let inputs = corpus(1, 200, 40);
    for (i, h0) in inputs.iter().enumerate() {
        let cfg = SimplifyConfig {
            criteria: criteria_for(i, h0),
            ..Default::default()
        };
        let (forward, s) = forward_scales(h0, &cfg);
        let records = s.records().to_vec();
        let scales = reconstruct_scales(s.hypergraph(), &records).unwrap();
        if to_json(&scales[0]) != to_json(h0) || scales != forward {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = mismatches == 0 && elapsed < Duration::from_secs(10);
    report(
        1,
        pass,
        format!("{mismatches}/200 round-trip mismatches (need 0), {elapsed:.2?} (need < 10 s)"),
    );
    assert!(pass);
}

#[test]
fn criterion_02_monotone_and_connected() {
    let mut violations = 0;
    let mut ops = 0;
    for (i, h0) in corpus(1, 200, 40).iter().enumerate() {
        let cfg = SimplifyConfig {
            criteria: criteria_for(i, h0),
            ..Default::default()
        };
        let (scales, _) = forward_scales(h0, &cfg);
        for w in scales.windows(2) {
            ops += 1;
            if w[1].size() >= w[0].size() || !w[1].is_connected() {
                violations += 1;
            }
        }
    }
    let pass = violations == 0;
    report(2, pass, format!("{violations} violations over {ops} operations (need 0)"));
    assert!(pass);
}

#[test]
fn criterion_03_duality_mirror() {
    let mut mismatches = 0;
    let mut worst: f64 = 0.0;
    let mut scales_checked = 0;
    for (i, h0) in corpus(3, 200, 40).iter().enumerate() {
        let cfg = SimplifyConfig {
            criteria: criteria_for(i, h0),
            track_dual: true,
            ..Default::default()
        };
        let mut s = Simplifier::new(h0.clone(), &cfg).unwrap();
        loop {
            let h = s.hypergraph().clone();
            let dual = s.tracked_dual().unwrap().clone();
            scales_checked += 1;
            if h.dual().unwrap() != dual {
                mismatches += 1;
            }
            let (bp, bd) = (betweenness_all(&h).unwrap(), betweenness_all(&dual).unwrap());
            for x in h.all_elements() {
                if h.degree(x).unwrap() != dual.degree(x.dual()).unwrap() {
                    mismatches += 1;
                }
                worst = worst.max((bp[&x] - bd[&x.dual()]).abs());
                let (ap, ad) = (
                    adjacency_factor(&h, x, DEFAULT_T).unwrap(),
                    adjacency_factor(&dual, x.dual(), DEFAULT_T).unwrap(),
                );
                worst = worst.max((ap - ad).abs());
            }
            if cfg.criteria.satisfied(&h).unwrap().is_some() || s.step().unwrap().is_none() {
                break;
            }
        }
    }
    let pass = mismatches == 0 && worst <= 1e-10;
    report(
        3,
        pass,
        format!("{mismatches} structural mismatches over {scales_checked} scales, max stat gap {worst:.1e} (need <= 1e-10)"),
    );
    assert!(pass);
}

/// Betweenness by listing every shortest path explicitly.
fn exhaustive_betweenness(h: &Hypergraph) -> BTreeMap<ElementId, Ratio<i64>> {
    let k = h.konig();
    let n = k.node_count();
    let mut adj = vec![Vec::new(); n];
    for (u, w) in k.edges() {
        adj[u].push(w);
        adj[w].push(u);
    }
    let mut through = vec![Ratio::from_integer(0); n];
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        for t in s + 1..n {
            if dist[t] == usize::MAX {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(p) = stack.pop() {
                let u = *p.last().unwrap();
                if u == t {
                    paths.push(p);
                    continue;
                }
                for &w in &adj[u] {
                    if dist[w] == dist[u] + 1 && dist[w] <= dist[t] {
                        let mut q = p.clone();
                        q.push(w);
                        stack.push(q);
                    }
                }
            }
            let total = paths.len() as i64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    through[v] += Ratio::new(1, total);
                }
            }
        }
    }
    h.all_elements().map(|x| (x, through[k.index_of(x).unwrap()])).collect()
}

#[test]
fn criterion_04_betweenness_oracle() {
    let mut mismatches = 0;
    let mut worst: f64 = 0.0;
    let mut done = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    while done < 100 {
        let h = random_connected(&mut rng, 12);
        if h.size() < 3 {
            continue;
        }
        done += 1;
        let fast = betweenness_all(&h).unwrap();
        let exact = exhaustive_betweenness(&h);
        for (x, r) in exact {
            let v = *r.numer() as f64 / *r.denom() as f64;
            let gap = (fast[&x] - v).abs();
            worst = worst.max(gap);
            // Brandes accumulates in floating point; a sum of at most a few
            // dozen fractions is exact to well below this bound.
            if gap > 1e-12 * v.max(1.0) {
                mismatches += 1;
            }
        }
    }
    let pass = mismatches == 0;
    report(
        4,
        pass,
        format!("{mismatches} mismatches on 100 hypergraphs with Konig size <= 12, max gap {worst:.1e}"),
    );
    assert!(pass);
}

/// Whether consecutive incident elements of `order` (cyclically) can be
/// linked by pairwise distinct adjacent elements other than `center`.
fn distinct_links(h: &Hypergraph, center: ElementId, order: &[ElementId]) -> bool {
    let links: Vec<Vec<u32>> = (0..order.len())
        .map(|i| {
            let (a, b) = (order[i], order[(i + 1) % order.len()]);
            h.members(a)
                .unwrap()
                .intersection(h.members(b).unwrap())
                .copied()
                .filter(|&m| m != center.index)
                .collect()
        })
        .collect();
    fn assign(links: &[Vec<u32>], used: &mut BTreeSet<u32>) -> bool {
        let Some((first, rest)) = links.split_first() else { return true };
        for &m in first {
            if used.insert(m) {
                if assign(rest, used) {
                    return true;
                }
                used.remove(&m);
            }
        }
        false
    }
    assign(&links, &mut BTreeSet::new())
}

fn permutations(items: &[ElementId]) -> Vec<Vec<ElementId>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Centers with a cycle through 3 or more, but not all, incident elements.
fn exhaustive_strangled(h: &Hypergraph, kind: Kind) -> BTreeSet<ElementId> {
    let mut out = BTreeSet::new();
    for x in h.elements(kind) {
        let incident: Vec<ElementId> = h.incident(x).unwrap().collect();
        let n = incident.len();
        'subsets: for mask in 0u32..(1 << n) {
            let size = mask.count_ones() as usize;
            if size < 3 || size >= n {
                continue;
            }
            let chosen: Vec<ElementId> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| incident[i]).collect();
            for rest in permutations(&chosen[1..]) {
                let mut order = vec![chosen[0]];
                order.extend(rest);
                if distinct_links(h, x, &order) {
                    out.insert(x);
                    break 'subsets;
                }
            }
        }
    }
    out
}

fn exhaustive_clusters(h: &Hypergraph, kind: Kind) -> BTreeSet<(ElementId, ElementId)> {
    let xs: Vec<ElementId> = h.elements(kind).collect();
    let mut out = BTreeSet::new();
    for (i, &a) in xs.iter().enumerate() {
        for &b in &xs[i + 1..] {
            if h.members(a).unwrap().intersection(h.members(b).unwrap()).count() >= 3 {
                out.insert((a, b));
            }
        }
    }
    out
}

#[test]
fn criterion_05_detector_completeness() {
    let mut mismatches = 0;
    let mut found = 0;
    for h in corpus(5, 100, 10) {
        let r = ForbiddenReport::compute(&h).unwrap();
        found += r.count();
        let pairs = |v: &[planarity::ForbiddenInstance]| -> BTreeSet<(ElementId, ElementId)> {
            v.iter().map(|i| (i.anchor[0], i.anchor[1])).collect()
        };
        let centers =
            |v: &[planarity::ForbiddenInstance]| -> BTreeSet<ElementId> { v.iter().map(|i| i.anchor[0]).collect() };
        if pairs(&r.three_adjacent_pairs) != exhaustive_clusters(&h, Kind::Hyperedge)
            || pairs(&r.two_adjacent_triples) != exhaustive_clusters(&h, Kind::Vertex)
            || centers(&r.strangled_vertices) != exhaustive_strangled(&h, Kind::Vertex)
            || centers(&r.strangled_hyperedges) != exhaustive_strangled(&h, Kind::Hyperedge)
            || !r.instances().all(|i| i.verify(&h))
        {
            mismatches += 1;
        }
    }
    let mut fixture_failures = Vec::new();
    for (kind, h, op) in fixtures::forbidden_fixtures() {
        let r = ForbiddenReport::compute(&h).unwrap();
        let one = r.count() == 1 && r.instances().all(|i| i.kind == kind);
        let mut g = h.clone();
        let fixed = apply(&mut g, op, 0.0, 1).is_ok() && planarity::forbidden_count(&g).unwrap() == 0;
        if !(one && fixed) {
            fixture_failures.push(format!("{kind:?}"));
        }
    }
    let pass = mismatches == 0 && fixture_failures.is_empty();
    report(
        5,
        pass,
        format!(
            "{mismatches}/100 detector mismatches ({found} instances seen), fixture failures {fixture_failures:?} (need none)"
        ),
    );
    assert!(pass);
}

/// Relative error of the analytic gradient against central differences.
fn fd_error(model: &EnergyModel, term: Term, x: &[f64]) -> f64 {
    let mut g = vec![0.0; x.len()];
    model.eval_term(term, x, &mut g);
    let mut scratch = vec![0.0; x.len()];
    let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let step = 1e-6 * scale;
    let fd: Vec<f64> = (0..x.len())
        .map(|i| {
            let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
            xp[i] += step;
            xm[i] -= step;
            (model.eval_term(term, &xp, &mut scratch) - model.eval_term(term, &xm, &mut scratch)) / (2.0 * step)
        })
        .collect();
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let diff: Vec<f64> = g.iter().zip(&fd).map(|(a, b)| a - b).collect();
    let denom = norm(&g).max(norm(&fd));
    if denom < 1e-9 {
        norm(&diff)
    } else {
        norm(&diff) / denom
    }
}

#[test]
fn criterion_06_gradient_checks() {
    let start = Instant::now();
    let cfg = EnergyConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: BTreeMap<String, f64> = BTreeMap::new();
    let mut nonzero: BTreeMap<String, usize> = BTreeMap::new();
    let mut failures = 0;
    for term in Term::ALL {
        let phases: &[Phase] = if term == Term::Separation {
            &[Phase::Separation, Phase::Regularity]
        } else {
            &[Phase::Regularity]
        };
        for &phase in phases {
            let name = format!("{term:?}/{phase:?}");
            for _ in 0..100 {
                let h = random_connected(&mut rng, 24);
                let model = EnergyModel::new(&h, &Sizes::of(&h), true, phase, &cfg, None).unwrap();
                let spread = 0.5 * (h.size() as f64).sqrt();
                let x: Vec<f64> = (0..2 * model.point_count()).map(|_| rng.random_range(-spread..spread)).collect();
                let mut g = vec![0.0; x.len()];
                if model.eval_term(term, &x, &mut g) > 0.0 {
                    *nonzero.entry(name.clone()).or_default() += 1;
                }
                let err = fd_error(&model, term, &x);
                let w = worst.entry(name.clone()).or_default();
                *w = w.max(err);
                if err >= 1e-4 {
                    failures += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures == 0 && elapsed < Duration::from_secs(30);
    let summary: Vec<String> = worst
        .iter()
        .map(|(k, v)| format!("{k} {v:.1e} ({} active)", nonzero.get(k).copied().unwrap_or(0)))
        .collect();
    report(
        6,
        pass,
        format!(
            "{failures} configs with rel. err >= 1e-4, worst per term [{}], {elapsed:.2?} (need < 30 s)",
            summary.join(", ")
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07_planar_trees() {
    let mut zero = 0;
    let mut slowest = Duration::ZERO;
    let mut counts = Vec::new();
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(700 + seed);
        let count = rng.random_range(5..=15);
        let h = polygon_tree(&mut rng, count);
        let mut cfg = PipelineConfig {
            seed,
            emit_scales: EmitScales::Ends,
            dual_tracking: true,
            ..Default::default()
        };
        // Simplify as far as the queue allows.
        cfg.criteria = TerminationCriteria {
            target_vertices: Some(1),
            ..Default::default()
        };
        let start = Instant::now();
        let out = run_pipeline(&h, &cfg, None).unwrap();
        slowest = slowest.max(start.elapsed());
        let c = out.manifest.scales[0].overlap.as_ref().unwrap().pair_count;
        counts.push(c);
        if c == 0 {
            zero += 1;
        }
    }
    let pass = zero >= 18 && slowest < Duration::from_secs(10);
    report(
        7,
        pass,
        format!("{zero}/20 overlap-free (need >= 18), counts {counts:?}, slowest run {slowest:.2?} (need < 10 s)"),
    );
    assert!(pass);
}

fn untwist(seed: u64, separation_phase: bool) -> usize {
    let (h, mut l) = twisted_pair(seed);
    let cfg = EnergyConfig {
        seed,
        separation_phase,
        ..Default::default()
    };
    layout::optimize_coarsest(&h, &mut l, &Sizes::of(&h), &cfg).unwrap();
    overlap_report(&h, &l, &MetricsConfig::default()).unwrap().pair_count
}

#[test]
fn criterion_08_untwisting() {
    let untwisted = (0..20).filter(|&s| untwist(s, true) == 0).count();
    let stalled = (0..20).filter(|&s| untwist(s, false) >= 1).count();
    let pass = untwisted >= 18 && stalled >= 10;
    report(
        8,
        pass,
        format!("two-phase overlap-free {untwisted}/20 (need >= 18), regularity-only stalled {stalled}/20 (need >= 10)"),
    );
    assert!(pass);
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
fn criterion_09_multi_scale_benefit() {
    let start = Instant::now();
    let (mut multi_count, mut base_count, mut multi_area, mut base_area) = (vec![], vec![], vec![], vec![]);
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
        let h = clustered(&mut rng, 100, 40, 3);
        let mut cfg = PipelineConfig {
            seed,
            emit_scales: EmitScales::List(vec![0]),
            dual_tracking: true,
            baseline: true,
            ..Default::default()
        };
        cfg.criteria = TerminationCriteria {
            target_vertices: Some(1),
            ..Default::default()
        };
        let out = run_pipeline(&h, &cfg, None).unwrap();
        let m = out.manifest.scales[0].overlap.as_ref().unwrap();
        let b = &out.manifest.baseline.as_ref().unwrap().overlap;
        multi_count.push(m.pair_count as f64);
        base_count.push(b.pair_count as f64);
        multi_area.push(m.total_area);
        base_area.push(b.total_area);
    }
    let elapsed = start.elapsed();
    let (mc, bc) = (median(multi_count.clone()), median(base_count.clone()));
    let (ma, ba) = (median(multi_area), median(base_area));
    let pass = mc <= bc && ma <= 0.75 * ba && elapsed < Duration::from_secs(300);
    report(
        9,
        pass,
        format!(
            "median overlap count multi {mc} vs baseline {bc} (need <=), median area multi {ma:.3} vs 0.75 x {ba:.3} = {:.3} (need <=), {elapsed:.2?} (need < 300 s); counts multi {multi_count:?} baseline {base_count:?}",
            0.75 * ba
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_10_unavoidable_floor() {
    let h = Hypergraph::build(&[("e1", vec!["a", "b", "c", "d"]), ("e2", vec!["a", "b", "c", "x"])]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut layouts: Vec<Layout> = (0..2000)
        .map(|_| Layout {
            scale_index: 0,
            positions: (0..5)
                .map(|v| (v, Point::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))))
                .collect(),
            dual_positions: None,
        })
        .collect();
    for seed in 0..20 {
        let cfg = EnergyConfig {
            seed,
            ..Default::default()
        };
        let mut l = layout::initialize(&h, false, &cfg);
        layout::optimize_coarsest(&h, &mut l, &Sizes::of(&h), &cfg).unwrap();
        layouts.push(l);
    }
    let mut violations = 0;
    let mut tightest = f64::INFINITY;
    for l in &layouts {
        let r = overlap_report(&h, l, &MetricsConfig::default()).unwrap();
        let tri = geometry::signed_area(&geometry::convex_hull(&[
            l.positions[&0],
            l.positions[&1],
            l.positions[&2],
        ]));
        tightest = tightest.min(r.total_area - tri);
        if r.total_area < tri - 1e-6 {
            violations += 1;
        }
    }
    let pass = violations == 0;
    report(
        10,
        pass,
        format!(
            "{violations}/{} layouts below the shared-triangle area (need 0), smallest margin {tightest:.2e}",
            layouts.len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_11_determinism() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = clustered(&mut rng, 40, 16, 2);
    let cfg = PipelineConfig {
        seed: 5,
        dual_tracking: true,
        baseline: true,
        energy: EnergyConfig {
            global_iterations: 200,
            local_iterations: 50,
            ..Default::default()
        },
        ..Default::default()
    };
    let run = |threads: usize| {
        let dir = tempfile::tempdir().unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let out = pool.install(|| run_pipeline(&h, &cfg, Some(dir.path()))).unwrap();
        let mut manifest: serde_json::Value =
            serde_json::from_slice(&std::fs::read(dir.path().join(pipeline::MANIFEST_FILE)).unwrap()).unwrap();
        pipeline::strip_runtime(&mut manifest);
        (manifest, pipeline::read_artifacts(dir.path(), &out.manifest).unwrap())
    };
    let (a, b) = (run(1), run(4));
    let files = a.1.len();
    let differing: Vec<&String> = a.1.keys().filter(|k| a.1.get(*k) != b.1.get(*k)).collect();
    let pass = a.0 == b.0 && differing.is_empty() && a.1.len() == b.1.len();
    report(
        11,
        pass,
        format!(
            "manifests equal: {}, {files} artifacts, {} differing (need 0); single- vs multi-threaded",
            a.0 == b.0,
            differing.len()
        ),
    );
    assert!(pass);
}
