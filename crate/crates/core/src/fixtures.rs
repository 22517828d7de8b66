//! Seeded hypergraph generators and small hand-built fixtures shared by the
//! tests, the benchmarks and the command-line tool.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Point;
use crate::hypergraph::{ElementId, Hypergraph};
use crate::layout::Layout;
use crate::planarity::ForbiddenKind;
use crate::simplify::OpKey;

fn assemble(nv: u32, edges: Vec<BTreeSet<u32>>) -> Hypergraph {
    Hypergraph::from_parts(
        (0..nv).map(|v| (v, None)),
        edges
            .into_iter()
            .enumerate()
            .map(|(e, m)| (e as u32, None, m.into_iter().collect())),
    )
    .expect("generators only produce valid hypergraphs")
}

/// A connected hypergraph with `2 ≤ |V| + |E| ≤ max_size` and hyperedges of
/// cardinality 1 to 4, built so that every hyperedge after the first touches
/// an already covered vertex.
pub fn random_connected(rng: &mut impl Rng, max_size: usize) -> Hypergraph {
    assert!(max_size >= 2);
    let total = rng.random_range(2..=max_size);
    let ne = rng.random_range(1..=(total - 1).min(total / 2).max(1));
    let nv = (total - ne) as u32;
    let mut order: Vec<u32> = (0..nv).collect();
    order.shuffle(rng);
    let mut covered: Vec<u32> = Vec::new();
    let mut pending = order.into_iter();
    let mut edges: Vec<BTreeSet<u32>> = Vec::with_capacity(ne);
    for e in 0..ne {
        let mut members = BTreeSet::new();
        match covered.choose(rng) {
            Some(&anchor) if e > 0 => {
                members.insert(anchor);
            }
            _ => {}
        }
        let card = rng.random_range(1..=4usize).min(nv as usize);
        while members.len() < card {
            let v = pending.next().unwrap_or_else(|| rng.random_range(0..nv));
            members.insert(v);
            if members.len() < card && rng.random_bool(0.3) {
                if let Some(&v) = covered.choose(rng) {
                    members.insert(v);
                }
            }
        }
        if members.is_empty() {
            members.insert(*covered.first().unwrap_or(&0));
        }
        for &v in &members {
            if !covered.contains(&v) {
                covered.push(v);
            }
        }
        edges.push(members);
    }
    for v in pending {
        let e = rng.random_range(0..edges.len());
        edges[e].insert(v);
    }
    assemble(nv, edges)
}

/// `count` triangles and quadrilaterals glued into a tree: each new polygon
/// shares exactly one vertex with an earlier one, and no vertex is shared by
/// more than three polygons.
pub fn polygon_tree(rng: &mut impl Rng, count: usize) -> Hypergraph {
    let mut edges: Vec<BTreeSet<u32>> = Vec::with_capacity(count);
    let mut degree: BTreeMap<u32, usize> = BTreeMap::new();
    let mut next = 0u32;
    for i in 0..count {
        let card = if rng.random_bool(0.5) { 3 } else { 4 };
        let mut members = BTreeSet::new();
        if i > 0 {
            let open: Vec<u32> = degree.iter().filter(|&(_, &d)| d < 3).map(|(&v, _)| v).collect();
            members.insert(*open.choose(rng).expect("fresh vertices keep the tree open"));
        }
        while members.len() < card {
            members.insert(next);
            next += 1;
        }
        for &v in &members {
            *degree.entry(v).or_default() += 1;
        }
        edges.push(members);
    }
    assemble(next, edges)
}

/// Two quadrilaterals `{u, v, a, b}` and `{u, v, c, d}` sharing the chord
/// `uv`, with the second folded onto the same side as the first. Positions
/// are jittered by up to `0.05` per coordinate from `seed`.
pub fn twisted_pair(seed: u64) -> (Hypergraph, Layout) {
    let h = Hypergraph::build(&[("A", vec!["u", "v", "a", "b"]), ("B", vec!["u", "v", "c", "d"])])
        .expect("fixture is valid");
    let base = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.8, 0.5), (0.2, 0.5)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = base
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| {
            let j = Point::new(rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05));
            (i as u32, Point::new(x, y) + j)
        })
        .collect();
    let layout = Layout {
        scale_index: 0,
        positions,
        dual_positions: None,
    };
    (h, layout)
}

/// Roughly `vertices` vertices over `hyperedges` hyperedges of cardinality
/// 2 to 5 arranged along a random spanning tree with a few extra links, and
/// `clusters` injected hyperedges that each share three vertices with an
/// existing one.
pub fn clustered(rng: &mut impl Rng, vertices: usize, hyperedges: usize, clusters: usize) -> Hypergraph {
    assert!(hyperedges > clusters);
    let base = hyperedges - clusters;
    let mut edges: Vec<BTreeSet<u32>> = Vec::with_capacity(hyperedges);
    let mut next = 0u32;
    let fresh_total = vertices.saturating_sub(clusters);
    for i in 0..base {
        let mut members = BTreeSet::new();
        if i > 0 {
            let parent = &edges[rng.random_range(0..i)];
            let pick: Vec<u32> = parent.iter().copied().collect();
            members.insert(*pick.choose(rng).unwrap());
        }
        let remaining_edges = base - i;
        let remaining = fresh_total.saturating_sub(next as usize);
        let share = remaining.div_ceil(remaining_edges).max(1);
        let fresh = rng.random_range(share.saturating_sub(1).max(1)..=share + 1).min(remaining.max(1));
        for _ in 0..fresh {
            if (next as usize) < fresh_total || members.len() < 2 {
                members.insert(next);
                next += 1;
            }
        }
        if i > 0 && rng.random_bool(0.15) {
            members.insert(rng.random_range(0..next));
        }
        edges.push(members);
    }
    let hosts: Vec<usize> = {
        let mut big: Vec<usize> = (0..base).filter(|&i| edges[i].len() >= 3).collect();
        big.shuffle(rng);
        big.into_iter().take(clusters).collect()
    };
    for &host in &hosts {
        let mut pick: Vec<u32> = edges[host].iter().copied().collect();
        pick.shuffle(rng);
        let mut members: BTreeSet<u32> = pick.into_iter().take(3).collect();
        members.insert(next);
        next += 1;
        edges.push(members);
    }
    assemble(next, edges)
}

/// One smallest example of each forbidden configuration, with the atomic
/// operation that removes it.
pub fn forbidden_fixtures() -> Vec<(ForbiddenKind, Hypergraph, OpKey)> {
    let build = |edges: &[(&str, &[&str])]| {
        let owned: Vec<(&str, Vec<&str>)> = edges.iter().map(|(l, m)| (*l, m.to_vec())).collect();
        Hypergraph::build(&owned).expect("fixture is valid")
    };
    let v = ElementId::vertex;
    let e = ElementId::hyperedge;
    let pair = build(&[("e1", &["a", "b", "c", "d"]), ("e2", &["a", "b", "c"])]);
    let triple = build(&[("e1", &["a", "b"]), ("e2", &["a", "b"]), ("e3", &["a", "b", "c"])]);
    let strangled = build(&[
        ("e1", &["v", "u3", "u1"]),
        ("e2", &["v", "u1", "u2"]),
        ("e3", &["v", "u2", "u3"]),
        ("e4", &["v", "w"]),
    ]);
    let strangled_dual = strangled.dual().expect("fixture is valid");
    // v is vertex 0 and u1 is vertex 2 in order of first appearance.
    let strangled_op = OpKey::merge(v(0), v(2));
    vec![
        (ForbiddenKind::ThreeAdjacentPair, pair, OpKey::merge(e(0), e(1))),
        (ForbiddenKind::TwoAdjacentTriple, triple, OpKey::merge(v(0), v(1))),
        (ForbiddenKind::StrangledVertex, strangled, strangled_op),
        (ForbiddenKind::StrangledHyperedge, strangled_dual, strangled_op.dual()),
    ]
}
