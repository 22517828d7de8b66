//! Overlap metrics of a polygon layout.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{self, Point};
use crate::hypergraph::{intersection_len, ElementId, Hypergraph};
use crate::layout::{regular_radius, Layout};
use crate::planarity::{self, ForbiddenReport};

/// Number of points used for the monogon disk and the two digon caps.
const ROUND_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricsConfig {
    pub l0: f64,
    /// Overlap threshold in units of L0².
    pub epsilon: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig { l0: 1.0, epsilon: 1e-9 }
    }
}

impl MetricsConfig {
    pub fn threshold(&self) -> f64 {
        self.epsilon * self.l0 * self.l0
    }
}

/// Convex region drawn for hyperedge `e`, counter-clockwise: the hull of its
/// members, a stadium of half-width `0.1·L0` for digons, and a disk of the
/// monogon radius for monogons.
pub fn realized_polygon(h: &Hypergraph, layout: &Layout, e: u32, l0: f64) -> Result<Vec<Point>> {
    let pts = layout.member_points(h, ElementId::hyperedge(e))?;
    Ok(match pts.len() {
        1 => geometry::regular_polygon(pts[0], regular_radius(1, l0)?, ROUND_POINTS, 0.0),
        2 => geometry::stadium(pts[0], pts[1], 0.1 * l0, ROUND_POINTS / 2),
        _ => geometry::convex_hull(&pts),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairOverlap {
    pub e: ElementId,
    pub f: ElementId,
    pub area: f64,
    pub shared_vertices: usize,
    /// Set for pairs sharing three or more vertices, which no convex drawing
    /// can separate.
    pub unavoidable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub pair_count: usize,
    pub total_area: f64,
    pub pairs: Vec<PairOverlap>,
    pub forbidden_count: usize,
    pub epsilon: f64,
    pub convention: String,
    pub runtime_seconds: f64,
}

impl OverlapReport {
    pub fn unavoidable_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.unavoidable).count()
    }
}

/// Pairwise overlap of all realized hyperedge polygons. Pairs that share
/// vertices are included; mere contact stays below the threshold.
pub fn overlap_report(h: &Hypergraph, layout: &Layout, cfg: &MetricsConfig) -> Result<OverlapReport> {
    let start = Instant::now();
    layout.check_covers(h)?;
    let ids: Vec<u32> = h.hyperedges().map(|e| e.index).collect();
    let polys: Vec<Vec<Point>> = ids
        .iter()
        .map(|&e| realized_polygon(h, layout, e, cfg.l0))
        .collect::<Result<_>>()?;
    let unavoidable: BTreeSet<(ElementId, ElementId)> = planarity::three_adjacent_pairs(h)
        .into_iter()
        .map(|i| (i.anchor[0], i.anchor[1]))
        .collect();
    let index_pairs: Vec<(usize, usize)> = (0..ids.len())
        .flat_map(|i| (i + 1..ids.len()).map(move |j| (i, j)))
        .collect();
    let threshold = cfg.threshold();
    let found: Vec<Option<PairOverlap>> = index_pairs
        .par_iter()
        .map(|&(i, j)| {
            let area = geometry::intersection_area(&polys[i], &polys[j])?;
            if area <= threshold {
                return Ok(None);
            }
            let (e, f) = (ElementId::hyperedge(ids[i]), ElementId::hyperedge(ids[j]));
            let shared = intersection_len(h.members_unchecked(e), h.members_unchecked(f));
            Ok(Some(PairOverlap {
                e,
                f,
                area,
                shared_vertices: shared,
                unavoidable: unavoidable.contains(&(e, f)),
            }))
        })
        .collect::<Result<_>>()?;
    let pairs: Vec<PairOverlap> = found.into_iter().flatten().collect();
    let forbidden_count = ForbiddenReport::compute(h)?.count();
    Ok(OverlapReport {
        pair_count: pairs.len(),
        total_area: pairs.iter().map(|p| p.area).sum(),
        pairs,
        forbidden_count,
        epsilon: threshold,
        convention: format!(
            "pairs with intersection area > {threshold:e} counted, shared-vertex pairs included; \
             monogons as 16-gon disks, digons as stadiums of half-width 0.1 L0"
        ),
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn h(edges: &[(&str, &[&str])]) -> Hypergraph {
        let owned: Vec<(&str, Vec<&str>)> = edges.iter().map(|(l, m)| (*l, m.to_vec())).collect();
        Hypergraph::build(&owned).unwrap()
    }

    fn layout(points: &[(f64, f64)]) -> Layout {
        Layout {
            scale_index: 0,
            positions: points
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| (i as u32, Point::new(x, y)))
                .collect(),
            dual_positions: None,
        }
    }

    #[test]
    fn realized_shapes() {
        let g = h(&[("t", &["a", "b", "c"])]);
        let l = layout(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        let p = realized_polygon(&g, &l, 0, 1.0).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(geometry::signed_area(&p), 0.5);

        let g = h(&[("q", &["a", "b", "c", "d"])]);
        let l = layout(&[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0), (0.5, 0.5)]);
        assert_eq!(realized_polygon(&g, &l, 0, 1.0).unwrap().len(), 3);

        let g = h(&[("m", &["a"])]);
        let l = layout(&[(0.0, 0.0)]);
        let disk = realized_polygon(&g, &l, 0, 1.0).unwrap();
        assert_eq!(disk.len(), 16);
        assert!(disk.iter().all(|p| (p.norm() - 0.25).abs() < 1e-12));
    }

    #[test]
    fn disjoint_triangles_do_not_overlap() {
        let g = h(&[("t1", &["a", "b", "c"]), ("t2", &["d", "e", "f"])]);
        let l = layout(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (5.0, 0.0), (6.0, 0.0), (5.0, 1.0)]);
        let r = overlap_report(&g, &l, &MetricsConfig::default()).unwrap();
        assert_eq!(r.pair_count, 0);
        assert_eq!(r.total_area, 0.0);
    }

    #[test]
    fn shared_vertex_contact_is_not_an_overlap() {
        let g = h(&[("t1", &["a", "b", "c"]), ("t2", &["c", "d", "e"])]);
        let l = layout(&[(0.0, 0.0), (1.0, 0.0), (0.5, 1.0), (0.0, 2.0), (1.0, 2.0)]);
        let r = overlap_report(&g, &l, &MetricsConfig::default()).unwrap();
        assert_eq!(r.pair_count, 0);
    }

    #[test]
    fn three_shared_vertices_force_the_triangle_area() {
        let g = h(&[("e1", &["a", "b", "c", "d"]), ("e2", &["a", "b", "c", "x"])]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let pts: Vec<(f64, f64)> = (0..5).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let l = layout(&pts);
            let r = overlap_report(&g, &l, &MetricsConfig::default()).unwrap();
            let tri = geometry::signed_area(&geometry::convex_hull(&[
                l.positions[&0],
                l.positions[&1],
                l.positions[&2],
            ]));
            assert!(r.total_area >= tri - 1e-6);
            if tri > 1e-6 {
                assert_eq!(r.pair_count, 1);
                assert!(r.pairs[0].unavoidable);
            }
        }
    }

    /// Independent pass: every unordered pair, hull and clip recomputed.
    fn brute_force(g: &Hypergraph, l: &Layout) -> (usize, f64) {
        let polys: BTreeMap<u32, Vec<Point>> = g
            .hyperedges()
            .map(|e| (e.index, realized_polygon(g, l, e.index, 1.0).unwrap()))
            .collect();
        let mut count = 0;
        let mut total = 0.0;
        for (i, p) in &polys {
            for (j, q) in &polys {
                if i < j {
                    let a = geometry::intersection_area(q, p).unwrap();
                    if a > 1e-9 {
                        count += 1;
                        total += a;
                    }
                }
            }
        }
        (count, total)
    }

    #[test]
    fn report_matches_brute_force_and_is_rigid_invariant() {
        let g = h(&[
            ("t1", &["a", "b", "c"]),
            ("t2", &["b", "c", "d"]),
            ("q", &["d", "e", "f", "g"]),
            ("d", &["g", "a"]),
            ("p", &["a", "e", "h", "i", "j"]),
        ]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let pts: Vec<(f64, f64)> = (0..10).map(|_| (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
            let mut l = layout(&pts);
            let r = overlap_report(&g, &l, &MetricsConfig::default()).unwrap();
            let (count, total) = brute_force(&g, &l);
            assert_eq!(r.pair_count, count);
            assert!((r.total_area - total).abs() < 1e-12);
            assert!((r.pairs.iter().map(|p| p.area).sum::<f64>() - r.total_area).abs() < 1e-12);

            l.rotate(0.7);
            l.translate(Point::new(3.0, -8.0));
            let moved = overlap_report(&g, &l, &MetricsConfig::default()).unwrap();
            assert_eq!(moved.pair_count, r.pair_count);
            assert!((moved.total_area - r.total_area).abs() <= 1e-8 * r.total_area.max(1e-12));
        }
    }
}
