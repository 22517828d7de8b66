//! Element statistics that drive simplification priorities.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{ElementId, Footprint, Hypergraph, Kind};

/// Default adjacency exponent `t`.
pub const DEFAULT_T: f64 = 2.0;

/// Betweenness centrality of every vertex and hyperedge, computed with
/// Brandes' accumulation on the König graph.
///
/// Values count unordered source/target pairs with endpoints excluded, i.e.
/// the ordered-pair accumulation halved.
pub fn betweenness_all(h: &Hypergraph) -> Result<BTreeMap<ElementId, f64>> {
    h.ensure_connected()?;
    let k = h.konig();
    let n = k.node_count();

    // One dependency vector per source, reduced in source order so the sum is
    // independent of thread scheduling.
    let partials: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| single_source_dependencies(&k.adjacency, s))
        .collect();
    let mut total = vec![0.0; n];
    for p in &partials {
        for (t, d) in total.iter_mut().zip(p) {
            *t += d;
        }
    }
    Ok(k.nodes
        .iter()
        .zip(total)
        .map(|(&x, b)| (x, b / 2.0))
        .collect())
}

fn single_source_dependencies(adj: &[Vec<usize>], s: usize) -> Vec<f64> {
    let n = adj.len();
    let mut order = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    sigma[s] = 1.0;
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    while let Some(w) = order.pop() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
    }
    delta[s] = 0.0;
    delta
}

/// Adj(x) = Σ a(x, y)^t over the elements y adjacent to x.
pub fn adjacency_factor(h: &Hypergraph, x: ElementId, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::NegativeExponent(t));
    }
    let mine = h.members(x)?;
    Ok(h.adjacent(x)?
        .into_iter()
        .map(|y| {
            let theirs = h.members_unchecked(ElementId::new(x.kind, y));
            let a = crate::hypergraph::intersection_len(mine, theirs);
            (a as f64).powf(t)
        })
        .sum())
}

/// Per-element statistics carried through simplification.
///
/// Betweenness is frozen at the input scale; adjacency factors track the
/// current hypergraph and are refreshed for the footprint of every applied
/// operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatTable {
    pub betweenness: BTreeMap<ElementId, f64>,
    pub adjacency_factor: BTreeMap<ElementId, f64>,
    pub t: f64,
}

impl StatTable {
    pub fn compute(h: &Hypergraph, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::NegativeExponent(t));
        }
        let betweenness = betweenness_all(h)?;
        let mut table = StatTable {
            betweenness,
            adjacency_factor: BTreeMap::new(),
            t,
        };
        for x in h.all_elements() {
            table.adjacency_factor.insert(x, adjacency_factor(h, x, t)?);
        }
        Ok(table)
    }

    pub fn betweenness(&self, x: ElementId) -> f64 {
        self.betweenness.get(&x).copied().unwrap_or(0.0)
    }

    pub fn adjacency(&self, x: ElementId) -> f64 {
        self.adjacency_factor.get(&x).copied().unwrap_or(0.0)
    }

    /// Recomputes adjacency factors for the elements of `affected` that still
    /// exist and drops entries for those that do not.
    pub fn refresh(&mut self, h: &Hypergraph, affected: &Footprint) -> Result<()> {
        for x in affected.elements() {
            if h.contains(x) {
                self.adjacency_factor.insert(x, adjacency_factor(h, x, self.t)?);
            } else {
                self.adjacency_factor.remove(&x);
            }
        }
        Ok(())
    }

    /// The same statistics keyed by dual element ids.
    pub fn dual(&self) -> StatTable {
        StatTable {
            betweenness: self.betweenness.iter().map(|(x, &b)| (x.dual(), b)).collect(),
            adjacency_factor: self
                .adjacency_factor
                .iter()
                .map(|(x, &a)| (x.dual(), a))
                .collect(),
            t: self.t,
        }
    }
}

/// Closed interval used to normalise one priority term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    fn of(values: impl IntoIterator<Item = f64>) -> Range {
        let mut r = Range {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        };
        for v in values {
            r.min = r.min.min(v);
            r.max = r.max.max(v);
        }
        if r.min > r.max {
            r = Range { min: 0.0, max: 0.0 };
        }
        r
    }

    /// (x - min) / (max - min), or 0 for a degenerate range.
    pub fn rise(&self, x: f64) -> f64 {
        let span = self.max - self.min;
        if span > 0.0 {
            (x - self.min) / span
        } else {
            0.0
        }
    }

    /// (max - x) / (max - min), or 0 for a degenerate range.
    pub fn fall(&self, x: f64) -> f64 {
        let span = self.max - self.min;
        if span > 0.0 {
            (self.max - x) / span
        } else {
            0.0
        }
    }

    fn join(a: Range, b: Range) -> Range {
        Range {
            min: a.min.min(b.min),
            max: a.max.max(b.max),
        }
    }
}

/// How adjacency-factor extrema are shared between vertices and hyperedges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjacencyScope {
    /// One range over all vertices and hyperedges.
    #[default]
    Joint,
    /// Separate ranges for vertex and hyperedge operations.
    PerKind,
}

/// Extrema of the input scale used to normalise the three priority terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalizers {
    pub degree: Range,
    /// Indexed by operand kind: `[vertex, hyperedge]`.
    pub adjacency: [Range; 2],
    pub betweenness: Range,
}

impl Normalizers {
    /// Extrema over the input hypergraph and its dual. The dual has identical
    /// incidence structure, so its values coincide with the primal ones; they
    /// are folded in anyway when a dual is given.
    pub fn compute(
        h0: &Hypergraph,
        h0_dual: Option<&Hypergraph>,
        stats: &StatTable,
        scope: AdjacencyScope,
    ) -> Result<Self> {
        let degree_range = |h: &Hypergraph| -> Range {
            Range::of(h.all_elements().map(|x| h.members_unchecked(x).len() as f64))
        };
        let adj_of = |h: &Hypergraph, kind: Kind, table: &StatTable| -> Range {
            Range::of(h.elements(kind).map(|x| table.adjacency(x)))
        };
        let mut degree = degree_range(h0);
        let mut per_kind = [
            adj_of(h0, Kind::Vertex, stats),
            adj_of(h0, Kind::Hyperedge, stats),
        ];
        let mut betweenness = Range::of(h0.all_elements().map(|x| stats.betweenness(x)));
        if let Some(d) = h0_dual {
            let ds = stats.dual();
            degree = Range::join(degree, degree_range(d));
            per_kind[0] = Range::join(per_kind[0], adj_of(d, Kind::Hyperedge, &ds));
            per_kind[1] = Range::join(per_kind[1], adj_of(d, Kind::Vertex, &ds));
            betweenness = Range::join(
                betweenness,
                Range::of(d.all_elements().map(|x| ds.betweenness(x))),
            );
        }
        let adjacency = match scope {
            AdjacencyScope::Joint => {
                let j = Range::join(per_kind[0], per_kind[1]);
                [j, j]
            }
            AdjacencyScope::PerKind => per_kind,
        };
        Ok(Normalizers {
            degree,
            adjacency,
            betweenness,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> ElementId {
        ElementId::vertex(i)
    }
    fn e(i: u32) -> ElementId {
        ElementId::hyperedge(i)
    }

    #[test]
    fn betweenness_on_path() {
        // König path a - e1 - b - e2 - c; values from enumerating the ten
        // unordered node pairs by hand.
        let h = Hypergraph::build(&[("e1", vec!["a", "b"]), ("e2", vec!["b", "c"])]).unwrap();
        let b = betweenness_all(&h).unwrap();
        assert_eq!(b[&v(1)], 4.0);
        assert_eq!(b[&e(0)], 3.0);
        assert_eq!(b[&e(1)], 3.0);
        assert_eq!(b[&v(0)], 0.0);
        assert_eq!(b[&v(2)], 0.0);
    }

    #[test]
    fn betweenness_single_digon() {
        // König path a - e - b: the hyperedge is interior to the only a-b path.
        let h = Hypergraph::build(&[("e", vec!["a", "b"])]).unwrap();
        let b = betweenness_all(&h).unwrap();
        assert_eq!(b[&e(0)], 1.0);
        assert_eq!(b[&v(0)], 0.0);
        assert_eq!(b[&v(1)], 0.0);
    }

    #[test]
    fn betweenness_rejects_disconnected() {
        let h = Hypergraph::build(&[("e1", vec!["a"]), ("e2", vec!["b"])]).unwrap();
        assert!(matches!(betweenness_all(&h), Err(Error::Disconnected { components: 2 })));
    }

    #[test]
    fn adjacency_factor_examples() {
        let h = Hypergraph::build(&[("e1", vec!["a", "b", "x"]), ("e2", vec!["a", "b", "y"])]).unwrap();
        // a's neighbours: b (2 shared), x (1), y (1).
        assert_eq!(adjacency_factor(&h, v(0), 2.0).unwrap(), 6.0);
        assert_eq!(adjacency_factor(&h, e(0), 2.0).unwrap(), 4.0);
        assert_eq!(adjacency_factor(&h, v(0), 0.0).unwrap(), 3.0);
        assert!(matches!(
            adjacency_factor(&h, v(0), -1.0),
            Err(Error::NegativeExponent(_))
        ));
    }

    #[test]
    fn adjacency_factor_monotone_in_t() {
        let h = Hypergraph::build(&[("e1", vec!["a", "b", "x"]), ("e2", vec!["a", "b", "y"])]).unwrap();
        let mut last = f64::NEG_INFINITY;
        for t in [0.0, 0.5, 1.0, 2.0, 3.5] {
            let a = adjacency_factor(&h, v(0), t).unwrap();
            assert!(a > last);
            last = a;
        }
    }

    #[test]
    fn normalizer_extrema() {
        let h = Hypergraph::build(&[("e1", vec!["a", "b"]), ("e2", vec!["b", "c"])]).unwrap();
        let stats = StatTable::compute(&h, 2.0).unwrap();
        let n = Normalizers::compute(&h, Some(&h.dual().unwrap()), &stats, AdjacencyScope::Joint)
            .unwrap();
        assert_eq!((n.degree.min, n.degree.max), (1.0, 2.0));
        assert_eq!(n.betweenness.min, 0.0);
        assert_eq!(n.betweenness.max, 4.0);
    }

    #[test]
    fn degenerate_range_contributes_zero() {
        // cycle of three digons: every degree and cardinality is 2
        let h = Hypergraph::build(&[
            ("e1", vec!["a", "b"]),
            ("e2", vec!["b", "c"]),
            ("e3", vec!["c", "a"]),
        ])
        .unwrap();
        let stats = StatTable::compute(&h, 2.0).unwrap();
        let n = Normalizers::compute(&h, None, &stats, AdjacencyScope::Joint).unwrap();
        assert_eq!(n.degree.min, n.degree.max);
        assert_eq!(n.degree.rise(2.0), 0.0);
        assert_eq!(n.degree.fall(2.0), 0.0);
    }

    #[test]
    fn per_kind_scope_keeps_separate_ranges() {
        let h = Hypergraph::build(&[("e1", vec!["a", "b", "x"]), ("e2", vec!["a", "b", "y"])]).unwrap();
        let stats = StatTable::compute(&h, 2.0).unwrap();
        let n = Normalizers::compute(&h, None, &stats, AdjacencyScope::PerKind).unwrap();
        assert_eq!((n.adjacency[0].min, n.adjacency[0].max), (2.0, 6.0));
        assert_eq!((n.adjacency[1].min, n.adjacency[1].max), (4.0, 4.0));
    }
}
