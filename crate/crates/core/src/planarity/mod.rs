//! Forbidden sub-hypergraph detection and Zykov planarity.

mod lr;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{intersection_len, ElementId, Hypergraph, Kind};

pub use lr::is_planar as is_planar_graph;

/// Default bound on DFS steps in one strangled-element search.
pub const DEFAULT_STEP_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForbiddenKind {
    /// Two hyperedges sharing at least three vertices.
    ThreeAdjacentPair,
    /// Two vertices contained together in at least three hyperedges.
    TwoAdjacentTriple,
    StrangledVertex,
    StrangledHyperedge,
}

impl ForbiddenKind {
    /// The kind detected by the dual detector.
    pub fn dual(self) -> ForbiddenKind {
        match self {
            ForbiddenKind::ThreeAdjacentPair => ForbiddenKind::TwoAdjacentTriple,
            ForbiddenKind::TwoAdjacentTriple => ForbiddenKind::ThreeAdjacentPair,
            ForbiddenKind::StrangledVertex => ForbiddenKind::StrangledHyperedge,
            ForbiddenKind::StrangledHyperedge => ForbiddenKind::StrangledVertex,
        }
    }
}

/// One located forbidden pattern.
///
/// For clusters, `anchor` is the element pair and `support` the shared
/// elements. For strangled elements, `anchor` is the center and `support` one
/// witnessing cycle in traversal order, alternating incident and adjacent
/// elements and starting with an incident one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForbiddenInstance {
    pub kind: ForbiddenKind,
    pub anchor: Vec<ElementId>,
    pub support: Vec<ElementId>,
}

impl ForbiddenInstance {
    /// Re-checks the defining predicate of this instance against `h`.
    pub fn verify(&self, h: &Hypergraph) -> bool {
        match self.kind {
            ForbiddenKind::ThreeAdjacentPair | ForbiddenKind::TwoAdjacentTriple => {
                let [x, y] = self.anchor[..] else { return false };
                let kind = cluster_kind(self.kind);
                if x.kind != kind || y.kind != kind || x == y {
                    return false;
                }
                let (Ok(a), Ok(b)) = (h.members(x), h.members(y)) else {
                    return false;
                };
                let shared: Vec<ElementId> = a
                    .intersection(b)
                    .map(|&m| ElementId::new(kind.other(), m))
                    .collect();
                shared.len() >= 3 && shared == self.support
            }
            ForbiddenKind::StrangledVertex | ForbiddenKind::StrangledHyperedge => {
                let [center] = self.anchor[..] else { return false };
                let kind = strangled_kind(self.kind);
                center.kind == kind && verify_cycle(h, center, &self.support)
            }
        }
    }

    /// The same pattern expressed in the dual hypergraph.
    pub fn dual(&self) -> ForbiddenInstance {
        ForbiddenInstance {
            kind: self.kind.dual(),
            anchor: self.anchor.iter().map(|x| x.dual()).collect(),
            support: self.support.iter().map(|x| x.dual()).collect(),
        }
    }
}

fn cluster_kind(kind: ForbiddenKind) -> Kind {
    match kind {
        ForbiddenKind::ThreeAdjacentPair => Kind::Hyperedge,
        _ => Kind::Vertex,
    }
}

fn strangled_kind(kind: ForbiddenKind) -> Kind {
    match kind {
        ForbiddenKind::StrangledVertex => Kind::Vertex,
        _ => Kind::Hyperedge,
    }
}

fn verify_cycle(h: &Hypergraph, center: ElementId, cycle: &[ElementId]) -> bool {
    let Ok(incident) = h.members(center) else { return false };
    let k = cycle.len();
    if k < 6 || !k.is_multiple_of(2) {
        return false;
    }
    let distinct: BTreeSet<ElementId> = cycle.iter().copied().collect();
    if distinct.len() != k {
        return false;
    }
    let inc_kind = center.kind.other();
    let mut used = 0;
    for (i, &x) in cycle.iter().enumerate() {
        let y = cycle[(i + 1) % k];
        let expected = if i % 2 == 0 { inc_kind } else { center.kind };
        if x.kind != expected || x == center {
            return false;
        }
        if i % 2 == 0 {
            if !incident.contains(&x.index) {
                return false;
            }
            used += 1;
        } else if !h.contains(x) {
            return false;
        }
        let (inc, adj) = if i % 2 == 0 { (x, y) } else { (y, x) };
        if !h.members_unchecked(inc).contains(&adj.index) {
            return false;
        }
    }
    used >= 3 && used < incident.len()
}

/// Pairs of `kind` elements sharing at least three members.
fn clusters(h: &Hypergraph, kind: Kind) -> Vec<ForbiddenInstance> {
    let report = match kind {
        Kind::Hyperedge => ForbiddenKind::ThreeAdjacentPair,
        Kind::Vertex => ForbiddenKind::TwoAdjacentTriple,
    };
    let mut out = Vec::new();
    for x in h.elements(kind) {
        let mx = h.members_unchecked(x);
        let candidates = h.adjacent(x).expect("element of h");
        for y in candidates.range(x.index + 1..) {
            let y = ElementId::new(kind, *y);
            let my = h.members_unchecked(y);
            if intersection_len(mx, my) >= 3 {
                out.push(ForbiddenInstance {
                    kind: report,
                    anchor: vec![x, y],
                    support: mx
                        .intersection(my)
                        .map(|&m| ElementId::new(kind.other(), m))
                        .collect(),
                });
            }
        }
    }
    out
}

/// Hyperedge pairs with |V_e ∩ V_f| ≥ 3.
pub fn three_adjacent_pairs(h: &Hypergraph) -> Vec<ForbiddenInstance> {
    clusters(h, Kind::Hyperedge)
}

/// Vertex pairs contained together in at least three hyperedges.
pub fn two_adjacent_triples(h: &Hypergraph) -> Vec<ForbiddenInstance> {
    clusters(h, Kind::Vertex)
}

pub fn strangled_vertices(h: &Hypergraph) -> Result<Vec<ForbiddenInstance>> {
    strangled(h, Kind::Vertex, DEFAULT_STEP_CAP)
}

pub fn strangled_hyperedges(h: &Hypergraph) -> Result<Vec<ForbiddenInstance>> {
    strangled(h, Kind::Hyperedge, DEFAULT_STEP_CAP)
}

/// Strangled elements of `kind`, one instance per center, sorted by id.
pub fn strangled(h: &Hypergraph, kind: Kind, step_cap: u64) -> Result<Vec<ForbiddenInstance>> {
    let report = match kind {
        Kind::Vertex => ForbiddenKind::StrangledVertex,
        Kind::Hyperedge => ForbiddenKind::StrangledHyperedge,
    };
    let centers: Vec<ElementId> = h.elements(kind).collect();
    let found: Vec<Option<ForbiddenInstance>> = centers
        .par_iter()
        .map(|&x| {
            Ok(strangling_cycle(h, x, step_cap)?.map(|support| ForbiddenInstance {
                kind: report,
                anchor: vec![x],
                support,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Searches the link structure of `x` for a simple cycle through at least
/// three, but not all, of its incident elements.
pub fn strangling_cycle(h: &Hypergraph, x: ElementId, step_cap: u64) -> Result<Option<Vec<ElementId>>> {
    let incident: Vec<u32> = h.members(x)?.iter().copied().collect();
    if incident.len() < 4 {
        return Ok(None);
    }
    let adjacent: Vec<u32> = h.adjacent(x)?.into_iter().collect();
    let ni = incident.len();
    let n = ni + adjacent.len();
    let adj_pos: BTreeMap<u32, usize> = adjacent
        .iter()
        .enumerate()
        .map(|(i, &a)| (a, ni + i))
        .collect();
    let mut graph: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (i, &m) in incident.iter().enumerate() {
        let inc = ElementId::new(x.kind.other(), m);
        for &a in h.members_unchecked(inc) {
            if a == x.index {
                continue;
            }
            let j = adj_pos[&a];
            graph[i].insert(j);
            graph[j].insert(i);
        }
    }

    // Nodes outside the 2-core lie on no cycle.
    let mut alive = vec![true; n];
    let mut queue: Vec<usize> = (0..n).filter(|&u| graph[u].len() < 2).collect();
    while let Some(u) = queue.pop() {
        if !alive[u] {
            continue;
        }
        alive[u] = false;
        for &w in &graph[u] {
            if alive[w] && graph[w].iter().filter(|&&z| alive[z]).count() < 2 {
                queue.push(w);
            }
        }
    }
    if (0..ni).filter(|&i| alive[i]).count() < 3 {
        return Ok(None);
    }

    let name = |u: usize| {
        if u < ni {
            ElementId::new(x.kind.other(), incident[u])
        } else {
            ElementId::new(x.kind, adjacent[u - ni])
        }
    };
    let mut steps: u64 = 0;
    for s in (0..ni).filter(|&i| alive[i]) {
        // Cycles are reported from their smallest incident node, so nodes
        // below `s` are never entered.
        let mut on_path = vec![false; n];
        let mut path = vec![s];
        on_path[s] = true;
        let mut cursors: Vec<Vec<usize>> = vec![graph[s].iter().copied().filter(|&w| alive[w]).collect()];
        while let Some(frontier) = cursors.last_mut() {
            let Some(w) = frontier.pop() else {
                cursors.pop();
                let u = path.pop().unwrap();
                on_path[u] = false;
                continue;
            };
            steps += 1;
            if steps > step_cap {
                return Err(Error::Indeterminate(x, step_cap));
            }
            let incident_on_path = path.iter().filter(|&&u| u < ni).count();
            if w == s {
                if path.len() >= 6 && incident_on_path >= 3 && incident_on_path < ni {
                    return Ok(Some(path.iter().map(|&u| name(u)).collect()));
                }
                continue;
            }
            if on_path[w] || (w < ni && w < s) {
                continue;
            }
            // An incident node would exhaust the whole incident set.
            if w < ni && incident_on_path + 1 >= ni {
                continue;
            }
            on_path[w] = true;
            path.push(w);
            cursors.push(graph[w].iter().copied().filter(|&z| alive[z]).collect());
        }
    }
    Ok(None)
}

/// All forbidden patterns of `h`, grouped by kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForbiddenReport {
    pub three_adjacent_pairs: Vec<ForbiddenInstance>,
    pub two_adjacent_triples: Vec<ForbiddenInstance>,
    pub strangled_vertices: Vec<ForbiddenInstance>,
    pub strangled_hyperedges: Vec<ForbiddenInstance>,
}

impl ForbiddenReport {
    pub fn compute(h: &Hypergraph) -> Result<Self> {
        Ok(ForbiddenReport {
            three_adjacent_pairs: three_adjacent_pairs(h),
            two_adjacent_triples: two_adjacent_triples(h),
            strangled_vertices: strangled_vertices(h)?,
            strangled_hyperedges: strangled_hyperedges(h)?,
        })
    }

    pub fn count(&self) -> usize {
        self.three_adjacent_pairs.len()
            + self.two_adjacent_triples.len()
            + self.strangled_vertices.len()
            + self.strangled_hyperedges.len()
    }

    pub fn instances(&self) -> impl Iterator<Item = &ForbiddenInstance> {
        self.three_adjacent_pairs
            .iter()
            .chain(&self.two_adjacent_triples)
            .chain(&self.strangled_vertices)
            .chain(&self.strangled_hyperedges)
    }
}

/// Number of forbidden patterns: one per cluster pair and one per strangled
/// center.
pub fn forbidden_count(h: &Hypergraph) -> Result<usize> {
    Ok(ForbiddenReport::compute(h)?.count())
}

/// True iff the König graph of `h` is planar.
pub fn is_zykov_planar(h: &Hypergraph) -> bool {
    lr::is_planar(&h.konig().adjacency)
}

pub fn convex_polygon_planar(h: &Hypergraph) -> Result<bool> {
    Ok(is_zykov_planar(h) && forbidden_count(h)? == 0)
}

/// Everything the `planarity` command reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarityReport {
    pub zykov_planar: bool,
    #[serde(flatten)]
    pub forbidden: ForbiddenReport,
    pub forbidden_count: usize,
    pub convex_polygon_planar: bool,
    pub notes: Vec<String>,
}

impl PlanarityReport {
    pub fn compute(h: &Hypergraph) -> Result<Self> {
        let zykov_planar = is_zykov_planar(h);
        let forbidden = ForbiddenReport::compute(h)?;
        let forbidden_count = forbidden.count();
        Ok(PlanarityReport {
            zykov_planar,
            convex_polygon_planar: zykov_planar && forbidden_count == 0,
            forbidden,
            forbidden_count,
            notes: vec![
                "strangled elements: the proper-subset condition is applied to the incident elements of the cycle only".into(),
                "forbidden_count counts one instance per cluster pair and per strangled center".into(),
            ],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(edges: &[(&str, &[&str])]) -> Hypergraph {
        let owned: Vec<(&str, Vec<&str>)> = edges.iter().map(|(l, m)| (*l, m.to_vec())).collect();
        Hypergraph::build(&owned).unwrap()
    }

    fn strangled_vertex_fixture(with_extra: bool) -> Hypergraph {
        let mut edges: Vec<(&str, &[&str])> = vec![
            ("e1", &["v", "u3", "u1"]),
            ("e2", &["v", "u1", "u2"]),
            ("e3", &["v", "u2", "u3"]),
        ];
        if with_extra {
            edges.push(("e4", &["v", "w"]));
        }
        h(&edges)
    }

    #[test]
    fn three_adjacent_pair_examples() {
        let g = h(&[("e1", &["a", "b", "c", "d"]), ("e2", &["a", "b", "c"])]);
        let found = three_adjacent_pairs(&g);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].anchor, vec![ElementId::hyperedge(0), ElementId::hyperedge(1)]);
        assert!(found[0].verify(&g));

        let g = h(&[("e1", &["a", "b", "c"]), ("e2", &["a", "b"]), ("e3", &["b", "c"])]);
        assert!(three_adjacent_pairs(&g).is_empty());
    }

    #[test]
    fn two_adjacent_triple_examples() {
        let g = h(&[("e1", &["a", "b"]), ("e2", &["a", "b"]), ("e3", &["a", "b", "c"])]);
        let found = two_adjacent_triples(&g);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].support.len(), 3);
        assert!(found[0].verify(&g));

        let g = h(&[("e1", &["a", "b", "c", "d"]), ("e2", &["a", "b", "c"])]);
        assert_eq!(two_adjacent_triples(&g.dual().unwrap()).len(), 1);
    }

    #[test]
    fn strangled_vertex_needs_a_proper_subset() {
        let g = strangled_vertex_fixture(true);
        let found = strangled_vertices(&g).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].anchor, vec![ElementId::vertex(0)]);
        assert!(found[0].verify(&g));
        assert_eq!(found[0].support.len(), 6);

        let g = strangled_vertex_fixture(false);
        assert!(strangled_vertices(&g).unwrap().is_empty());
    }

    #[test]
    fn strangled_hyperedge_is_dual_of_strangled_vertex() {
        let g = strangled_vertex_fixture(true).dual().unwrap();
        let found = strangled_hyperedges(&g).unwrap();
        assert_eq!(found.len(), 1);
        assert!(found[0].verify(&g));
        assert!(strangled_vertices(&g).unwrap().is_empty());
    }

    #[test]
    fn digon_cycle_with_chord_hyperedge() {
        let g = h(&[
            ("ab", &["a", "b"]),
            ("bc", &["b", "c"]),
            ("ca", &["c", "a"]),
            ("chord", &["a", "b", "c", "d"]),
        ]);
        let found = strangled_hyperedges(&g).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].anchor, vec![ElementId::hyperedge(3)]);

        let tight = h(&[("ab", &["a", "b"]), ("bc", &["b", "c"]), ("ca", &["c", "a"]), ("chord", &["a", "b", "c"])]);
        assert!(strangled_hyperedges(&tight).unwrap().is_empty());
    }

    #[test]
    fn tree_like_links_are_not_strangled() {
        let g = h(&[("e1", &["v", "a"]), ("e2", &["v", "b"]), ("e3", &["v", "c"]), ("e4", &["v", "d"])]);
        assert!(strangled_vertices(&g).unwrap().is_empty());
        assert!(strangled_hyperedges(&h(&[("e", &["a", "b", "c"])])).unwrap().is_empty());
    }

    #[test]
    fn step_cap_is_reported() {
        let g = strangled_vertex_fixture(true);
        let err = strangled(&g, Kind::Vertex, 2).unwrap_err();
        assert!(matches!(err, Error::Indeterminate(_, 2)));
    }

    #[test]
    fn zykov_planarity() {
        let tree = h(&[("e1", &["a", "b", "c"]), ("e2", &["c", "d", "e"])]);
        assert!(is_zykov_planar(&tree));
        assert!(convex_polygon_planar(&tree).unwrap());
        // K3,3 as a König graph: three vertices each in the same three hyperedges.
        let k33 = h(&[("x", &["a", "b", "c"]), ("y", &["a", "b", "c"]), ("z", &["a", "b", "c"])]);
        assert!(!is_zykov_planar(&k33));
        // Planar König graph, yet a 3-adjacent pair forces overlap.
        let pair = h(&[("e1", &["a", "b", "c"]), ("e2", &["a", "b", "c", "d"])]);
        assert!(is_zykov_planar(&pair));
        assert!(!convex_polygon_planar(&pair).unwrap());
    }

    #[test]
    fn report_serializes_flat() {
        let g = h(&[("e1", &["a", "b", "c"]), ("e2", &["a", "b", "c"])]);
        let report = PlanarityReport::compute(&g).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["forbidden_count"], 1);
        assert_eq!(json["three_adjacent_pairs"].as_array().unwrap().len(), 1);
    }
}
