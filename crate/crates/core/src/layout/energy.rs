//! The five layout energies and their analytic gradients.
//!
//! Positions live in one flat vector: primal vertices in id order, followed
//! by one dual point per hyperedge when the dual is tracked. Every energy is
//! normalised by `L0²` so values are comparable across unit choices.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{regular_radius_unchecked, target_area, EnergyConfig, Layout, Phase, Sizes};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::hypergraph::{ElementId, Footprint, Hypergraph, Kind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Separation,
    Regularity,
    Area,
    IntersectionRegularity,
    PrimalDual,
}

impl Term {
    pub const ALL: [Term; 5] = [
        Term::Separation,
        Term::Regularity,
        Term::Area,
        Term::IntersectionRegularity,
        Term::PrimalDual,
    ];
}

#[derive(Debug, Clone)]
struct Poly {
    members: Vec<usize>,
    /// Cardinality used for size targets: the larger of the current and the
    /// original cardinality.
    target: usize,
    /// Whether any member is free; untouched polygons only enter pair terms.
    touched: bool,
}

#[derive(Debug, Clone)]
struct Pair {
    a: usize,
    b: usize,
    shared: Vec<usize>,
}

/// Energy of one scale, optionally restricted to an active set of points.
#[derive(Debug, Clone)]
pub struct EnergyModel {
    cfg: EnergyConfig,
    phase: Phase,
    ids: Vec<ElementId>,
    slot: BTreeMap<ElementId, usize>,
    polys: Vec<Poly>,
    pairs: Vec<Pair>,
    coordination: Vec<(usize, Vec<usize>)>,
    has_dual: bool,
    free: Vec<usize>,
}

impl EnergyModel {
    /// Builds the model for `h`. A point set is tracked for the dual iff
    /// `with_dual`; `active` restricts both the free coordinates and the terms
    /// evaluated to those touching footprint elements (vertices of the primal,
    /// dual points of hyperedges).
    pub fn new(
        h: &Hypergraph,
        sizes: &Sizes,
        with_dual: bool,
        phase: Phase,
        cfg: &EnergyConfig,
        active: Option<&Footprint>,
    ) -> Result<Self> {
        cfg.validate()?;
        let mut ids: Vec<ElementId> = h.vertices().collect();
        if with_dual {
            ids.extend(h.hyperedges());
        }
        let slot: BTreeMap<ElementId, usize> = ids.iter().enumerate().map(|(i, &x)| (x, i)).collect();

        let is_active = |i: usize| active.is_none_or(|fp| fp.contains(ids[i]));

        // Polygon systems: hyperedges over vertex points, and when tracked,
        // vertices over dual points.
        let mut polys = Vec::new();
        let mut systems: Vec<Vec<usize>> = Vec::new();
        let kinds: &[Kind] = if with_dual { &Kind::ALL[..] } else { &[Kind::Hyperedge] };
        for &kind in kinds.iter().rev() {
            let mut system = Vec::new();
            for x in h.elements(kind) {
                let members: Vec<usize> = h
                    .members_unchecked(x)
                    .iter()
                    .map(|&m| slot[&ElementId::new(kind.other(), m)])
                    .collect();
                let now = members.len();
                system.push(polys.len());
                polys.push(Poly {
                    members,
                    target: sizes.get(x).max(now),
                    touched: true,
                });
            }
            systems.push(system);
        }
        let touched: Vec<bool> = polys.iter().map(|p| p.members.iter().any(|&m| is_active(m))).collect();

        let mut pairs = Vec::new();
        for system in &systems {
            let sets: Vec<BTreeSet<usize>> = system
                .iter()
                .map(|&p| polys[p].members.iter().copied().collect())
                .collect();
            for i in 0..system.len() {
                for j in i + 1..system.len() {
                    let (a, b) = (system[i], system[j]);
                    if !(touched[a] || touched[b]) {
                        continue;
                    }
                    let shared: Vec<usize> = sets[i].intersection(&sets[j]).copied().collect();
                    if shared.len() >= 3 {
                        continue;
                    }
                    if !shared.is_empty() && (polys[a].members.len() == 1 || polys[b].members.len() == 1) {
                        continue;
                    }
                    pairs.push(Pair { a, b, shared });
                }
            }
        }

        let mut coordination = Vec::new();
        if with_dual {
            for x in h.all_elements() {
                let own = slot[&x];
                let targets: Vec<usize> = h
                    .members_unchecked(x)
                    .iter()
                    .map(|&m| slot[&ElementId::new(x.kind.other(), m)])
                    .collect();
                if is_active(own) || targets.iter().any(|&t| is_active(t)) {
                    coordination.push((own, targets));
                }
            }
        }

        for (p, t) in polys.iter_mut().zip(touched) {
            p.touched = t;
        }
        let free = (0..ids.len()).filter(|&i| is_active(i)).collect();
        Ok(EnergyModel {
            cfg: cfg.clone(),
            phase,
            ids,
            slot,
            polys,
            pairs,
            coordination,
            has_dual: with_dual,
            free,
        })
    }

    pub fn point_count(&self) -> usize {
        self.ids.len()
    }

    /// Indices of the points the solver may move.
    pub fn free_points(&self) -> &[usize] {
        &self.free
    }

    pub fn pack(&self, layout: &Layout) -> Result<Vec<f64>> {
        let mut x = vec![0.0; 2 * self.ids.len()];
        for (i, id) in self.ids.iter().enumerate() {
            let p = match id.kind {
                Kind::Vertex => layout.positions.get(&id.index),
                Kind::Hyperedge => layout.dual_positions.as_ref().and_then(|d| d.get(&id.index)),
            }
            .copied()
            .ok_or(Error::UnknownElement(*id))?;
            if !p.is_finite() {
                return Err(Error::NonFinite(id.to_string()));
            }
            x[2 * i] = p.x;
            x[2 * i + 1] = p.y;
        }
        Ok(x)
    }

    pub fn unpack(&self, x: &[f64], layout: &mut Layout) {
        for (i, id) in self.ids.iter().enumerate() {
            let p = Point::new(x[2 * i], x[2 * i + 1]);
            match id.kind {
                Kind::Vertex => {
                    layout.positions.insert(id.index, p);
                }
                Kind::Hyperedge => {
                    layout.dual_positions.get_or_insert_with(BTreeMap::new).insert(id.index, p);
                }
            }
        }
    }

    pub fn index_of(&self, x: ElementId) -> Option<usize> {
        self.slot.get(&x).copied()
    }

    fn weight(&self, term: Term) -> f64 {
        let w = &self.cfg.weights;
        match (self.phase, term) {
            (_, Term::Separation) => w.separation,
            (_, Term::PrimalDual) if !self.has_dual => 0.0,
            (_, Term::PrimalDual) => w.primal_dual,
            (Phase::Separation, _) => 0.0,
            (Phase::Regularity, Term::Regularity) => w.regularity,
            (Phase::Regularity, Term::Area) => w.area,
            (Phase::Regularity, Term::IntersectionRegularity) => w.intersection,
        }
    }

    /// Total weighted energy; the gradient over all points is written to
    /// `grad`.
    pub fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        Term::ALL
            .iter()
            .filter(|&&t| self.weight(t) > 0.0)
            .map(|&t| self.weight(t) * self.accumulate(t, x, grad, self.weight(t)))
            .sum()
    }

    /// One unweighted term and its gradient, regardless of phase weights.
    pub fn eval_term(&self, term: Term, x: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        self.accumulate(term, x, grad, 1.0)
    }

    /// Per-term unweighted energies at `x`.
    pub fn breakdown(&self, x: &[f64]) -> BTreeMap<String, f64> {
        let mut scratch = vec![0.0; x.len()];
        Term::ALL
            .iter()
            .map(|&t| (format!("{t:?}"), self.eval_term(t, x, &mut scratch)))
            .collect()
    }

    fn accumulate(&self, term: Term, x: &[f64], grad: &mut [f64], scale: f64) -> f64 {
        let mut acc = Acc { grad, scale };
        match term {
            Term::Separation => self.separation(x, &mut acc),
            Term::Regularity => self.regularity(x, &mut acc),
            Term::Area => self.area(x, &mut acc),
            Term::IntersectionRegularity => self.intersection(x, &mut acc),
            Term::PrimalDual => self.coordination(x, &mut acc),
        }
    }

    /// Energy and gradient restricted to the free coordinates, for the
    /// solver. `full` holds the fixed coordinates and is overwritten with the
    /// free ones on every call.
    pub fn eval_free(&self, free_x: &[f64], full: &mut [f64], full_grad: &mut [f64], free_grad: &mut [f64]) -> f64 {
        for (k, &i) in self.free.iter().enumerate() {
            full[2 * i] = free_x[2 * k];
            full[2 * i + 1] = free_x[2 * k + 1];
        }
        let e = self.eval(full, full_grad);
        for (k, &i) in self.free.iter().enumerate() {
            free_grad[2 * k] = full_grad[2 * i];
            free_grad[2 * k + 1] = full_grad[2 * i + 1];
        }
        e
    }

    fn inv_l2(&self) -> f64 {
        1.0 / (self.cfg.l0 * self.cfg.l0)
    }

    fn regularity(&self, x: &[f64], acc: &mut Acc) -> f64 {
        let mut total = 0.0;
        for poly in &self.polys {
            let n = poly.members.len();
            if n < 3 || !poly.touched {
                continue;
            }
            let order = angular_order(x, &poly.members);
            let c = centroid(x, &poly.members);
            let nf = n as f64;
            // Best-fit regular polygon q_k = c + z·ω^k in complex form.
            let (mut zr, mut zi) = (0.0, 0.0);
            for (k, &m) in order.iter().enumerate() {
                let d = pt(x, m) - c;
                let (s, co) = (2.0 * PI * k as f64 / nf).sin_cos();
                zr += d.x * co + d.y * s;
                zi += d.y * co - d.x * s;
            }
            zr /= nf;
            zi /= nf;
            let norm = self.inv_l2() / nf;
            for (k, &m) in order.iter().enumerate() {
                let (s, co) = (2.0 * PI * k as f64 / nf).sin_cos();
                let q = c + Point::new(zr * co - zi * s, zr * s + zi * co);
                let r = pt(x, m) - q;
                total += norm * (r.x * r.x + r.y * r.y);
                acc.add(m, r * (2.0 * norm));
            }
        }
        total
    }

    fn area(&self, x: &[f64], acc: &mut Acc) -> f64 {
        let mut total = 0.0;
        for poly in &self.polys {
            let n = poly.members.len();
            if n < 2 || !poly.touched {
                continue;
            }
            let target = target_area(poly.target, self.cfg.l0);
            if n == 2 {
                // A digon counts as the half disc on its chord.
                let (a, b) = (poly.members[0], poly.members[1]);
                let d = pt(x, a) - pt(x, b);
                let diff = (PI / 8.0 * (d.x * d.x + d.y * d.y) - target) / target;
                total += diff * diff;
                let g = d * (2.0 * diff / target * PI / 4.0);
                acc.add(a, g);
                acc.add(b, g * -1.0);
                continue;
            }
            let members: Vec<Point> = poly.members.iter().map(|&m| pt(x, m)).collect();
            let hull = crate::geometry::convex_hull_indices(&members);
            let order: Vec<usize> = hull.iter().map(|&k| poly.members[k]).collect();
            let pts: Vec<Point> = hull.iter().map(|&k| members[k]).collect();
            let a = if pts.len() >= 3 { crate::geometry::signed_area(&pts) } else { 0.0 };
            let diff = (a - target) / target;
            total += diff * diff;
            let da = 2.0 * diff / target;
            let n = pts.len();
            if n < 3 {
                continue;
            }
            for k in 0..n {
                let next = pts[(k + 1) % n];
                let prev = pts[(k + n - 1) % n];
                acc.add(order[k], Point::new(0.5 * (next.y - prev.y), 0.5 * (prev.x - next.x)) * da);
            }
        }
        total
    }

    fn separation(&self, x: &[f64], acc: &mut Acc) -> f64 {
        let inv = self.inv_l2();
        let db = self.cfg.buffer;
        let l0 = self.cfg.l0;
        let extent: Vec<Option<Extent>> = self
            .polys
            .iter()
            .map(|p| Some(Extent::of(x, p, self.phase, l0)))
            .collect();
        let mut total = 0.0;
        for pair in &self.pairs {
            let (Some(ea), Some(eb)) = (&extent[pair.a], &extent[pair.b]) else {
                continue;
            };
            let (pa, pb) = (&self.polys[pair.a], &self.polys[pair.b]);
            let parts = contact_d0(
                pair.shared.len(),
                (ea.radius, pa.target),
                (eb.radius, pb.target),
                db,
                l0,
            );
            let Some(parts) = parts else { continue };
            let delta = ea.center - eb.center;
            let dist = delta.norm();
            let gap = parts.d0 - dist;
            if gap <= 0.0 {
                continue;
            }
            total += inv * gap * gap;
            let k = 2.0 * inv * gap;
            // d(gap)/d(centers)
            if dist > 0.0 {
                let dir = delta * (1.0 / dist);
                spread(acc, &pa.members, dir * -k);
                spread(acc, &pb.members, dir * k);
            }
            // d(gap)/d(d0)
            if parts.d_ra != 0.0 {
                ea.add_radius_grad(x, acc, k * parts.d_ra);
            }
            if parts.d_rb != 0.0 {
                eb.add_radius_grad(x, acc, k * parts.d_rb);
            }
        }
        total
    }

    fn intersection(&self, x: &[f64], acc: &mut Acc) -> f64 {
        let inv = self.inv_l2();
        let sharp = self.cfg.intersection_sharpness;
        let mut total = 0.0;
        for pair in &self.pairs {
            if pair.shared.len() != 2 {
                continue;
            }
            let (pa, pb) = (&self.polys[pair.a], &self.polys[pair.b]);
            if pa.members.len() < 3 || pb.members.len() < 3 {
                continue;
            }
            let (iu, iv) = (pair.shared[0], pair.shared[1]);
            let (u, v) = (pt(x, iu), pt(x, iv));
            let d = v - u;
            let len = d.norm();
            if len == 0.0 {
                continue;
            }
            let ca = centroid(x, &pa.members);
            let cb = centroid(x, &pb.members);
            let sa = signed_distance(u, d, len, ca);
            let sb = signed_distance(u, d, len, cb);
            let t = sa.value * sb.value * inv;
            let (sp, sig) = softplus(sharp, t);
            total += sp * sp;
            let de_dt = 2.0 * sp * sig;
            for (s, other, members) in [(&sa, sb.value, &pa.members), (&sb, sa.value, &pb.members)] {
                let k = de_dt * other * inv;
                spread(acc, members, s.d_c * k);
                acc.add(iu, s.d_u * k);
                acc.add(iv, s.d_v * k);
            }
        }
        total
    }

    fn coordination(&self, x: &[f64], acc: &mut Acc) -> f64 {
        let inv = self.inv_l2();
        let mut total = 0.0;
        for (own, targets) in &self.coordination {
            if targets.is_empty() {
                continue;
            }
            let r = pt(x, *own) - centroid(x, targets);
            total += inv * (r.x * r.x + r.y * r.y);
            acc.add(*own, r * (2.0 * inv));
            spread(acc, targets, r * (-2.0 * inv));
        }
        total
    }
}

struct Acc<'a> {
    grad: &'a mut [f64],
    scale: f64,
}

impl Acc<'_> {
    fn add(&mut self, i: usize, g: Point) {
        self.grad[2 * i] += self.scale * g.x;
        self.grad[2 * i + 1] += self.scale * g.y;
    }
}

/// Distributes a gradient on a centroid evenly over its members.
fn spread(acc: &mut Acc, members: &[usize], g: Point) {
    let k = 1.0 / members.len() as f64;
    for &m in members {
        acc.add(m, g * k);
    }
}

fn pt(x: &[f64], i: usize) -> Point {
    Point::new(x[2 * i], x[2 * i + 1])
}

fn centroid(x: &[f64], members: &[usize]) -> Point {
    let mut c = Point::default();
    for &m in members {
        c = c + pt(x, m);
    }
    c * (1.0 / members.len() as f64)
}

/// Members sorted counter-clockwise about their centroid, ties by index.
pub(crate) fn angular_order(x: &[f64], members: &[usize]) -> Vec<usize> {
    let c = centroid(x, members);
    let mut keyed: Vec<(f64, usize)> = members
        .iter()
        .map(|&m| {
            let d = pt(x, m) - c;
            (d.y.atan2(d.x), m)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, m)| m).collect()
}

/// Centre and radius of a polygon as seen by the separation term.
struct Extent {
    center: Point,
    radius: f64,
    /// Diameter endpoints when the radius depends on positions.
    diameter: Option<(usize, usize)>,
}

impl Extent {
    fn of(x: &[f64], p: &Poly, phase: Phase, l0: f64) -> Extent {
        let center = centroid(x, &p.members);
        let n = p.members.len();
        match phase {
            Phase::Regularity => Extent {
                center,
                radius: regular_radius_unchecked(p.target, l0),
                diameter: None,
            },
            Phase::Separation if n == 1 => Extent {
                center,
                radius: regular_radius_unchecked(1, l0),
                diameter: None,
            },
            Phase::Separation => {
                let mut best = (0.0, p.members[0], p.members[1]);
                for (i, &a) in p.members.iter().enumerate() {
                    for &b in &p.members[i + 1..] {
                        let d = pt(x, a).dist(pt(x, b));
                        if d > best.0 {
                            best = (d, a, b);
                        }
                    }
                }
                Extent {
                    center,
                    radius: 0.5 * best.0,
                    diameter: Some((best.1, best.2)),
                }
            }
        }
    }

    /// Adds `k · d(radius)/d(positions)`.
    fn add_radius_grad(&self, x: &[f64], acc: &mut Acc, k: f64) {
        if let Some((a, b)) = self.diameter {
            let d = pt(x, a) - pt(x, b);
            let len = d.norm();
            if len > 0.0 {
                let dir = d * (0.5 / len);
                acc.add(a, dir * k);
                acc.add(b, dir * -k);
            }
        }
    }
}

pub(crate) struct D0Parts {
    pub d0: f64,
    pub d_ra: f64,
    pub d_rb: f64,
}

/// Interior angle of a regular `n`-gon; zero for digons and monogons.
fn interior_angle(n: usize) -> f64 {
    if n >= 3 {
        PI * (n as f64 - 2.0) / n as f64
    } else {
        0.0
    }
}

/// Target centre distance for a polygon pair by number of shared vertices,
/// with partial derivatives with respect to the radii.
/// `None` means the pair is exempt.
pub(crate) fn contact_d0(
    shared: usize,
    (ra, na): (f64, usize),
    (rb, nb): (f64, usize),
    buffer: f64,
    l0: f64,
) -> Option<D0Parts> {
    match shared {
        0 => Some(D0Parts {
            d0: ra + rb + buffer,
            d_ra: 1.0,
            d_rb: 1.0,
        }),
        1 => {
            let cos = (0.5 * (interior_angle(na) + interior_angle(nb))).cos();
            let sq = (ra * ra + rb * rb - 2.0 * ra * rb * cos).max(0.0);
            let len = sq.sqrt();
            let (d_ra, d_rb) = if len > 1e-12 * l0 {
                ((ra - rb * cos) / len, (rb - ra * cos) / len)
            } else {
                (0.0, 0.0)
            };
            Some(D0Parts {
                d0: len + buffer,
                d_ra,
                d_rb,
            })
        }
        2 => {
            // Sum of apothems: the polygons meet along the shared side.
            let slope = |n: usize| if n >= 3 { (PI / n as f64).cos() } else { 0.0 };
            Some(D0Parts {
                d0: ra * slope(na) + rb * slope(nb),
                d_ra: slope(na),
                d_rb: slope(nb),
            })
        }
        _ => None,
    }
}

struct SignedDistance {
    value: f64,
    d_c: Point,
    d_u: Point,
    d_v: Point,
}

/// Signed distance of `c` to the line through `u` with direction `d`.
fn signed_distance(u: Point, d: Point, len: f64, c: Point) -> SignedDistance {
    let w = c - u;
    let cr = d.x * w.y - d.y * w.x;
    let value = cr / len;
    let d_c = Point::new(-d.y, d.x) * (1.0 / len);
    // derivative with respect to the direction d = v - u
    let d_d = Point::new(w.y, -w.x) * (1.0 / len) - d * (cr / (len * len * len));
    SignedDistance {
        value,
        d_c,
        d_u: (d_c + d_d) * -1.0,
        d_v: d_d,
    }
}

/// ln(1 + e^{k t}) / k and its derivative, evaluated stably.
fn softplus(k: f64, t: f64) -> (f64, f64) {
    let z = k * t;
    let sp = if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
    let sig = if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    };
    (sp / k, sig)
}
