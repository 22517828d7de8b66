//! Hypergraph data model.
//!
//! Vertices and hyperedges are stored symmetrically: each kind owns a map from
//! element index to the ordered set of incident indices of the other kind. The
//! dual hypergraph is therefore the same storage with the two maps swapped, and
//! most queries are written once for both kinds.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Vertex,
    Hyperedge,
}

impl Kind {
    pub const ALL: [Kind; 2] = [Kind::Vertex, Kind::Hyperedge];

    /// The kind playing the opposite role (and the kind of this kind's dual).
    pub fn other(self) -> Kind {
        match self {
            Kind::Vertex => Kind::Hyperedge,
            Kind::Hyperedge => Kind::Vertex,
        }
    }

    fn slot(self) -> usize {
        match self {
            Kind::Vertex => 0,
            Kind::Hyperedge => 1,
        }
    }
}

/// Stable identity of a vertex or hyperedge for a whole pipeline run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId {
    pub kind: Kind,
    pub index: u32,
}

impl ElementId {
    pub const fn vertex(index: u32) -> Self {
        ElementId {
            kind: Kind::Vertex,
            index,
        }
    }

    pub const fn hyperedge(index: u32) -> Self {
        ElementId {
            kind: Kind::Hyperedge,
            index,
        }
    }

    pub const fn new(kind: Kind, index: u32) -> Self {
        ElementId { kind, index }
    }

    /// The corresponding element of the dual hypergraph.
    pub fn dual(self) -> Self {
        ElementId {
            kind: self.kind.other(),
            index: self.index,
        }
    }

    pub fn is_vertex(self) -> bool {
        self.kind == Kind::Vertex
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Vertex => write!(f, "v{}", self.index),
            Kind::Hyperedge => write!(f, "e{}", self.index),
        }
    }
}

impl FromStr for ElementId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("malformed element id `{s}`"));
        let (kind, rest) = match s.split_at_checked(1).ok_or_else(bad)? {
            ("v", rest) => (Kind::Vertex, rest),
            ("e", rest) => (Kind::Hyperedge, rest),
            _ => return Err(bad()),
        };
        let index = rest.parse().map_err(|_| bad())?;
        Ok(ElementId { kind, index })
    }
}

impl Serialize for ElementId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ElementId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A set of vertex and hyperedge indices, typically the locality of an operation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Footprint {
    pub vertices: BTreeSet<u32>,
    pub hyperedges: BTreeSet<u32>,
}

impl Footprint {
    pub fn get(&self, kind: Kind) -> &BTreeSet<u32> {
        match kind {
            Kind::Vertex => &self.vertices,
            Kind::Hyperedge => &self.hyperedges,
        }
    }

    pub fn get_mut(&mut self, kind: Kind) -> &mut BTreeSet<u32> {
        match kind {
            Kind::Vertex => &mut self.vertices,
            Kind::Hyperedge => &mut self.hyperedges,
        }
    }

    pub fn contains(&self, x: ElementId) -> bool {
        self.get(x.kind).contains(&x.index)
    }

    pub fn insert(&mut self, x: ElementId) {
        self.get_mut(x.kind).insert(x.index);
    }

    pub fn extend(&mut self, other: &Footprint) {
        self.vertices.extend(other.vertices.iter().copied());
        self.hyperedges.extend(other.hyperedges.iter().copied());
    }

    pub fn len(&self) -> usize {
        self.vertices.len() + self.hyperedges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All elements, vertices first, each kind in index order.
    pub fn elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.vertices
            .iter()
            .map(|&i| ElementId::vertex(i))
            .chain(self.hyperedges.iter().map(|&i| ElementId::hyperedge(i)))
    }

    /// The same element set viewed in the dual hypergraph.
    pub fn dual(&self) -> Footprint {
        Footprint {
            vertices: self.hyperedges.clone(),
            hyperedges: self.vertices.clone(),
        }
    }
}

/// Bipartite incidence graph of a hypergraph: vertices first, then hyperedges.
#[derive(Debug, Clone)]
pub struct KonigGraph {
    pub nodes: Vec<ElementId>,
    pub adjacency: Vec<Vec<usize>>,
    index: BTreeMap<ElementId, usize>,
}

impl KonigGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn index_of(&self, x: ElementId) -> Option<usize> {
        self.index.get(&x).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&w| u < w).map(move |&w| (u, w)))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Hypergraph {
    incidence: [BTreeMap<u32, BTreeSet<u32>>; 2],
    labels: [BTreeMap<u32, String>; 2],
}

impl Hypergraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a hypergraph from labelled member lists, creating one vertex per
    /// distinct label in order of first appearance.
    pub fn build<L, M>(hyperedges: &[(L, Vec<M>)]) -> Result<Self>
    where
        L: AsRef<str>,
        M: AsRef<str>,
    {
        let mut h = Hypergraph::new();
        let mut vertex_ids: BTreeMap<&str, u32> = BTreeMap::new();
        for (e, (label, members)) in hyperedges.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::EmptyHyperedge(label.as_ref().to_string()));
            }
            let e = e as u32;
            h.incidence[1].insert(e, BTreeSet::new());
            h.labels[1].insert(e, label.as_ref().to_string());
            for m in members {
                let next = vertex_ids.len() as u32;
                let v = *vertex_ids.entry(m.as_ref()).or_insert_with(|| {
                    h.incidence[0].insert(next, BTreeSet::new());
                    h.labels[0].insert(next, m.as_ref().to_string());
                    next
                });
                h.link(ElementId::vertex(v), e);
            }
        }
        Ok(h)
    }

    /// Builds from explicit ids. Rejects empty hyperedges, dangling member ids
    /// and vertices that belong to no hyperedge.
    pub fn from_parts(
        vertices: impl IntoIterator<Item = (u32, Option<String>)>,
        hyperedges: impl IntoIterator<Item = (u32, Option<String>, Vec<u32>)>,
    ) -> Result<Self> {
        let mut h = Hypergraph::new();
        for (v, label) in vertices {
            if h.incidence[0].insert(v, BTreeSet::new()).is_some() {
                return Err(Error::Format(format!("duplicate vertex id {v}")));
            }
            if let Some(l) = label {
                h.labels[0].insert(v, l);
            }
        }
        for (e, label, members) in hyperedges {
            let name = label.clone().unwrap_or_else(|| ElementId::hyperedge(e).to_string());
            if members.is_empty() {
                return Err(Error::EmptyHyperedge(name));
            }
            if h.incidence[1].insert(e, BTreeSet::new()).is_some() {
                return Err(Error::Format(format!("duplicate hyperedge id {e}")));
            }
            if let Some(l) = label {
                h.labels[1].insert(e, l);
            }
            for v in members {
                if !h.incidence[0].contains_key(&v) {
                    return Err(Error::UnknownElement(ElementId::vertex(v)));
                }
                h.link(ElementId::vertex(v), e);
            }
        }
        if let Some((&v, _)) = h.incidence[0].iter().find(|(_, es)| es.is_empty()) {
            return Err(Error::IsolatedVertex(ElementId::vertex(v)));
        }
        Ok(h)
    }

    pub fn num_vertices(&self) -> usize {
        self.incidence[0].len()
    }

    pub fn num_hyperedges(&self) -> usize {
        self.incidence[1].len()
    }

    pub fn count(&self, kind: Kind) -> usize {
        self.incidence[kind.slot()].len()
    }

    /// |V| + |E|.
    pub fn size(&self) -> usize {
        self.num_vertices() + self.num_hyperedges()
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    pub fn contains(&self, x: ElementId) -> bool {
        self.incidence[x.kind.slot()].contains_key(&x.index)
    }

    pub fn indices(&self, kind: Kind) -> impl Iterator<Item = u32> + '_ {
        self.incidence[kind.slot()].keys().copied()
    }

    pub fn elements(&self, kind: Kind) -> impl Iterator<Item = ElementId> + '_ {
        self.indices(kind).map(move |i| ElementId::new(kind, i))
    }

    pub fn vertices(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.elements(Kind::Vertex)
    }

    pub fn hyperedges(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.elements(Kind::Hyperedge)
    }

    /// Every element, vertices first.
    pub fn all_elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.vertices().chain(self.hyperedges())
    }

    /// Indices of the elements incident to `x` (hyperedges E_v of a vertex, or
    /// vertices V_e of a hyperedge).
    pub fn members(&self, x: ElementId) -> Result<&BTreeSet<u32>> {
        self.incidence[x.kind.slot()]
            .get(&x.index)
            .ok_or(Error::UnknownElement(x))
    }

    pub(crate) fn members_unchecked(&self, x: ElementId) -> &BTreeSet<u32> {
        &self.incidence[x.kind.slot()][&x.index]
    }

    pub fn incident(&self, x: ElementId) -> Result<impl Iterator<Item = ElementId> + '_> {
        let other = x.kind.other();
        Ok(self.members(x)?.iter().map(move |&i| ElementId::new(other, i)))
    }

    /// deg(v) for a vertex, card(e) for a hyperedge.
    pub fn degree(&self, x: ElementId) -> Result<usize> {
        self.members(x).map(BTreeSet::len)
    }

    pub fn label(&self, x: ElementId) -> Option<&str> {
        self.labels[x.kind.slot()].get(&x.index).map(String::as_str)
    }

    /// Label if present, otherwise the element id.
    pub fn display_name(&self, x: ElementId) -> String {
        self.label(x).map_or_else(|| x.to_string(), str::to_string)
    }

    pub fn set_label(&mut self, x: ElementId, label: impl Into<String>) -> Result<()> {
        if !self.contains(x) {
            return Err(Error::UnknownElement(x));
        }
        self.labels[x.kind.slot()].insert(x.index, label.into());
        Ok(())
    }

    /// Swaps the roles of vertices and hyperedges. Element `x` of this
    /// hypergraph becomes `x.dual()` in the result.
    pub fn dual(&self) -> Result<Hypergraph> {
        if let Some(v) = self.vertices().find(|&v| self.members_unchecked(v).is_empty()) {
            return Err(Error::IsolatedVertex(v));
        }
        let [v, e] = self.incidence.clone();
        let [lv, le] = self.labels.clone();
        Ok(Hypergraph {
            incidence: [e, v],
            labels: [le, lv],
        })
    }

    pub fn konig(&self) -> KonigGraph {
        let nodes: Vec<ElementId> = self.all_elements().collect();
        let index: BTreeMap<ElementId, usize> =
            nodes.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let adjacency = nodes
            .iter()
            .map(|&x| {
                self.incident(x)
                    .expect("node taken from this hypergraph")
                    .map(|y| index[&y])
                    .collect()
            })
            .collect();
        KonigGraph {
            nodes,
            adjacency,
            index,
        }
    }

    /// Number of elements incident to both `x` and `y` (a_uv for vertices,
    /// |V_e ∩ V_f| for hyperedges).
    pub fn adjacency(&self, x: ElementId, y: ElementId) -> Result<usize> {
        if x.kind != y.kind {
            return Err(Error::KindMismatch(x, y));
        }
        if x == y {
            return Err(Error::SameElement(x));
        }
        let a = self.members(x)?;
        let b = self.members(y)?;
        Ok(intersection_len(a, b))
    }

    /// Indices of the elements of `x`'s kind that share an incident element
    /// with `x` (V_v or E_e), excluding `x` itself.
    pub fn adjacent(&self, x: ElementId) -> Result<BTreeSet<u32>> {
        let other = x.kind.other();
        let mut out = BTreeSet::new();
        for &m in self.members(x)? {
            out.extend(self.members_unchecked(ElementId::new(other, m)).iter().copied());
        }
        out.remove(&x.index);
        Ok(out)
    }

    /// Incident and adjacent elements of `x`, including `x` itself.
    pub fn neighborhood(&self, x: ElementId) -> Result<Footprint> {
        let mut fp = Footprint::default();
        *fp.get_mut(x.kind.other()) = self.members(x)?.clone();
        let same = fp.get_mut(x.kind);
        same.extend(self.adjacent(x)?);
        same.insert(x.index);
        Ok(fp)
    }

    /// Number of connected components of the König graph.
    pub fn components(&self) -> usize {
        let mut seen: BTreeSet<ElementId> = BTreeSet::new();
        let mut components = 0;
        for start in self.all_elements() {
            if !seen.insert(start) {
                continue;
            }
            components += 1;
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for y in self.incident(x).expect("visited elements exist") {
                    if seen.insert(y) {
                        queue.push_back(y);
                    }
                }
            }
        }
        components
    }

    /// True iff the König graph is connected. The empty hypergraph is connected.
    pub fn is_connected(&self) -> bool {
        self.components() <= 1
    }

    pub fn ensure_connected(&self) -> Result<()> {
        match self.components() {
            0 | 1 => Ok(()),
            components => Err(Error::Disconnected { components }),
        }
    }

    /// Every pair of distinct hyperedges shares at most one vertex.
    pub fn is_linear(&self) -> bool {
        let edges: Vec<&BTreeSet<u32>> = self.incidence[1].values().collect();
        edges.iter().enumerate().all(|(i, a)| {
            edges[i + 1..]
                .iter()
                .all(|b| intersection_len(a, b) <= 1)
        })
    }

    /// Sub-hypergraph induced by the vertex set `a`: hyperedges clipped to
    /// their members in `a`, empty clips dropped.
    pub fn induced_sub_hypergraph(&self, a: &BTreeSet<u32>) -> Result<Hypergraph> {
        if let Some(&v) = a.iter().find(|&&v| !self.contains(ElementId::vertex(v))) {
            return Err(Error::UnknownElement(ElementId::vertex(v)));
        }
        let mut h = Hypergraph::new();
        for &v in a {
            h.insert_bare(ElementId::vertex(v), self.label(ElementId::vertex(v)));
        }
        for (&e, members) in &self.incidence[1] {
            let clipped: BTreeSet<u32> = members.intersection(a).copied().collect();
            if clipped.is_empty() {
                continue;
            }
            let eid = ElementId::hyperedge(e);
            h.insert_bare(eid, self.label(eid));
            for v in clipped {
                h.link(ElementId::vertex(v), e);
            }
        }
        Ok(h)
    }

    /// Partial hypergraph generated by the hyperedge set `j`.
    pub fn partial_hypergraph(&self, j: &BTreeSet<u32>) -> Result<Hypergraph> {
        self.dual_view(Kind::Hyperedge, j)
    }

    fn dual_view(&self, kind: Kind, keep: &BTreeSet<u32>) -> Result<Hypergraph> {
        let mut h = Hypergraph::new();
        for &i in keep {
            let x = ElementId::new(kind, i);
            let members = self.members(x)?;
            if !h.contains(x) {
                h.insert_bare(x, self.label(x));
            }
            for &m in members {
                let y = ElementId::new(kind.other(), m);
                if !h.contains(y) {
                    h.insert_bare(y, self.label(y));
                }
                h.link(x, m);
            }
        }
        Ok(h)
    }

    /// Checks that the two incidence maps are exact transposes.
    pub fn is_consistent(&self) -> bool {
        Kind::ALL.iter().all(|&k| {
            self.incidence[k.slot()].iter().all(|(&i, ms)| {
                ms.iter().all(|&m| {
                    self.incidence[k.other().slot()]
                        .get(&m)
                        .is_some_and(|back| back.contains(&i))
                })
            })
        })
    }

    // -- mutation, used by simplification and parsing -----------------------

    pub(crate) fn insert_bare(&mut self, x: ElementId, label: Option<&str>) {
        self.incidence[x.kind.slot()].insert(x.index, BTreeSet::new());
        if let Some(l) = label {
            self.labels[x.kind.slot()].insert(x.index, l.to_string());
        }
    }

    /// Adds the incidence between `x` and the element `m` of the other kind.
    pub(crate) fn link(&mut self, x: ElementId, m: u32) {
        self.incidence[x.kind.slot()]
            .get_mut(&x.index)
            .expect("linked element exists")
            .insert(m);
        self.incidence[x.kind.other().slot()]
            .get_mut(&m)
            .expect("linked element exists")
            .insert(x.index);
    }

    pub(crate) fn unlink(&mut self, x: ElementId, m: u32) {
        if let Some(ms) = self.incidence[x.kind.slot()].get_mut(&x.index) {
            ms.remove(&m);
        }
        if let Some(ms) = self.incidence[x.kind.other().slot()].get_mut(&m) {
            ms.remove(&x.index);
        }
    }

    /// Inserts `x` with the given incidences. The member elements must exist.
    pub(crate) fn insert_element(&mut self, x: ElementId, members: &BTreeSet<u32>, label: Option<&str>) {
        self.insert_bare(x, label);
        for &m in members {
            self.link(x, m);
        }
    }

    /// Deletes `x` and all its incidences, returning them with its label.
    pub(crate) fn remove_element(&mut self, x: ElementId) -> Option<(BTreeSet<u32>, Option<String>)> {
        let members = self.incidence[x.kind.slot()].remove(&x.index)?;
        for &m in &members {
            if let Some(ms) = self.incidence[x.kind.other().slot()].get_mut(&m) {
                ms.remove(&x.index);
            }
        }
        let label = self.labels[x.kind.slot()].remove(&x.index);
        Some((members, label))
    }
}

pub(crate) fn intersection_len(a: &BTreeSet<u32>, b: &BTreeSet<u32>) -> usize {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().filter(|x| large.contains(x)).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> Hypergraph {
        Hypergraph::build(&[("e1", vec!["a", "b"]), ("e2", vec!["b", "c"])]).unwrap()
    }

    fn v(i: u32) -> ElementId {
        ElementId::vertex(i)
    }

    fn e(i: u32) -> ElementId {
        ElementId::hyperedge(i)
    }

    #[test]
    fn build_assigns_one_vertex_per_label() {
        let h = path();
        assert_eq!(h.num_vertices(), 3);
        assert_eq!(h.num_hyperedges(), 2);
        assert_eq!(h.degree(v(1)).unwrap(), 2);
        assert_eq!(h.label(v(1)), Some("b"));
        assert!(h.is_consistent());
    }

    #[test]
    fn build_monogon_and_empty() {
        let h = Hypergraph::build(&[("e1", vec!["a"])]).unwrap();
        assert_eq!(h.degree(e(0)).unwrap(), 1);
        let err = Hypergraph::build::<_, &str>(&[("e1", vec![])]).unwrap_err();
        assert!(matches!(err, Error::EmptyHyperedge(l) if l == "e1"));
    }

    #[test]
    fn duplicate_members_collapse() {
        let h = Hypergraph::build(&[("e", vec!["a", "a", "b"])]).unwrap();
        assert_eq!(h.degree(e(0)).unwrap(), 2);
    }

    #[test]
    fn dual_swaps_roles() {
        let h = path();
        let d = h.dual().unwrap();
        assert_eq!(d.num_vertices(), 2);
        assert_eq!(d.num_hyperedges(), 3);
        // b' = {e1', e2'}
        assert_eq!(d.members(e(1)).unwrap(), &BTreeSet::from([0, 1]));
        assert_eq!(d.members(e(0)).unwrap(), &BTreeSet::from([0]));
        assert_eq!(d.label(e(1)), Some("b"));
        assert_eq!(d.dual().unwrap(), h);
    }

    #[test]
    fn dual_rejects_isolated_vertex() {
        let mut h = path();
        h.insert_bare(v(9), None);
        assert!(matches!(h.dual(), Err(Error::IsolatedVertex(x)) if x == v(9)));
    }

    #[test]
    fn konig_of_path_is_a_path() {
        let k = path().konig();
        assert_eq!(k.node_count(), 5);
        assert_eq!(k.edge_count(), 4);
        let degrees: Vec<usize> = k.adjacency.iter().map(Vec::len).collect();
        assert_eq!(degrees, vec![1, 2, 1, 2, 2]);
        let mono = Hypergraph::build(&[("e", vec!["a"])]).unwrap().konig();
        assert_eq!((mono.node_count(), mono.edge_count()), (2, 1));
    }

    #[test]
    fn adjacency_counts_shared_elements() {
        let h = Hypergraph::build(&[("e1", vec!["a", "b", "x"]), ("e2", vec!["a", "b", "y"])]).unwrap();
        assert_eq!(h.adjacency(v(0), v(1)).unwrap(), 2);
        assert_eq!(h.adjacency(e(0), e(1)).unwrap(), 2);
        assert_eq!(h.adjacency(v(2), v(3)).unwrap(), 0);
        assert!(matches!(h.adjacency(v(0), e(0)), Err(Error::KindMismatch(..))));
        assert!(matches!(h.adjacency(v(0), v(0)), Err(Error::SameElement(_))));
    }

    #[test]
    fn neighborhoods() {
        let h = path();
        let nb = h.neighborhood(v(1)).unwrap();
        assert_eq!(nb.vertices, BTreeSet::from([0, 1, 2]));
        assert_eq!(nb.hyperedges, BTreeSet::from([0, 1]));
        let ne = h.neighborhood(e(0)).unwrap();
        assert_eq!(ne.vertices, BTreeSet::from([0, 1]));
        assert_eq!(ne.hyperedges, BTreeSet::from([0, 1]));
        let single = Hypergraph::build(&[("e", vec!["a"])]).unwrap();
        let ns = single.neighborhood(e(0)).unwrap();
        assert_eq!((ns.vertices.len(), ns.hyperedges.len()), (1, 1));
        assert!(h.neighborhood(v(7)).is_err());
    }

    #[test]
    fn connectivity() {
        assert!(path().is_connected());
        let split = Hypergraph::build(&[("e1", vec!["a", "b"]), ("e2", vec!["c", "d"])]).unwrap();
        assert!(!split.is_connected());
        assert_eq!(split.components(), 2);
        assert!(Hypergraph::new().is_connected());
    }

    #[test]
    fn sub_and_partial_hypergraphs() {
        let h = Hypergraph::build(&[("e1", vec!["a", "b", "c"])]).unwrap();
        let ind = h.induced_sub_hypergraph(&BTreeSet::from([0, 1])).unwrap();
        assert_eq!(ind.members(e(0)).unwrap(), &BTreeSet::from([0, 1]));
        assert!(h.induced_sub_hypergraph(&BTreeSet::new()).unwrap().is_empty());

        let p = path().partial_hypergraph(&BTreeSet::from([0])).unwrap();
        assert_eq!(p.vertices().collect::<Vec<_>>(), vec![v(0), v(1)]);
        assert_eq!(p.hyperedges().collect::<Vec<_>>(), vec![e(0)]);
        assert!(path().partial_hypergraph(&BTreeSet::from([5])).is_err());
    }

    #[test]
    fn remove_and_reinsert_round_trip() {
        let mut h = path();
        let before = h.clone();
        let (members, label) = h.remove_element(v(1)).unwrap();
        assert!(h.is_consistent());
        assert_eq!(h.degree(e(0)).unwrap(), 1);
        h.insert_element(v(1), &members, label.as_deref());
        assert_eq!(h, before);
    }

    #[test]
    fn element_id_text_form() {
        assert_eq!(e(12).to_string(), "e12");
        assert_eq!("v3".parse::<ElementId>().unwrap(), v(3));
        assert!("x3".parse::<ElementId>().is_err());
        assert!("".parse::<ElementId>().is_err());
    }
}
