//! Polygon layout: seeded initialization, two-phase optimization of the
//! coarsest scale, and local refinement while undoing simplification.

mod energy;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Point};
use crate::hypergraph::{ElementId, Footprint, Hypergraph, Kind};
use crate::lbfgs::{self, LbfgsOptions, Status};
use crate::simplify::{invert, AppliedRecord};

pub use energy::{EnergyModel, Term};

/// Vertex positions of one scale, plus one point per hyperedge when the dual
/// layout is tracked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "LayoutRepr", try_from = "LayoutRepr")]
pub struct Layout {
    pub scale_index: usize,
    pub positions: BTreeMap<u32, Point>,
    /// Keyed by hyperedge index (the dual vertex of that hyperedge).
    pub dual_positions: Option<BTreeMap<u32, Point>>,
}

#[derive(Serialize, Deserialize)]
struct PositionEntry {
    id: u32,
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
struct LayoutRepr {
    scale_index: usize,
    positions: Vec<PositionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dual_positions: Option<Vec<PositionEntry>>,
}

fn to_entries(m: &BTreeMap<u32, Point>) -> Vec<PositionEntry> {
    m.iter().map(|(&id, p)| PositionEntry { id, x: p.x, y: p.y }).collect()
}

fn from_entries(v: Vec<PositionEntry>) -> std::result::Result<BTreeMap<u32, Point>, String> {
    let mut m = BTreeMap::new();
    for e in v {
        if m.insert(e.id, Point::new(e.x, e.y)).is_some() {
            return Err(format!("duplicate position for id {}", e.id));
        }
    }
    Ok(m)
}

impl From<Layout> for LayoutRepr {
    fn from(l: Layout) -> Self {
        LayoutRepr {
            scale_index: l.scale_index,
            positions: to_entries(&l.positions),
            dual_positions: l.dual_positions.as_ref().map(to_entries),
        }
    }
}

impl TryFrom<LayoutRepr> for Layout {
    type Error = String;
    fn try_from(r: LayoutRepr) -> std::result::Result<Self, String> {
        Ok(Layout {
            scale_index: r.scale_index,
            positions: from_entries(r.positions)?,
            dual_positions: r.dual_positions.map(from_entries).transpose()?,
        })
    }
}

impl Layout {
    pub fn position(&self, v: u32) -> Option<Point> {
        self.positions.get(&v).copied()
    }

    /// Positions of the members of hyperedge `e`, in member order.
    pub fn member_points(&self, h: &Hypergraph, e: ElementId) -> Result<Vec<Point>> {
        h.members(e)?
            .iter()
            .map(|&v| self.position(v).ok_or(Error::UnknownElement(ElementId::vertex(v))))
            .collect()
    }

    /// Checks that every vertex of `h` (and every hyperedge, for a dual
    /// layout) has a finite position.
    pub fn check_covers(&self, h: &Hypergraph) -> Result<()> {
        for v in h.vertices() {
            match self.positions.get(&v.index) {
                None => return Err(Error::UnknownElement(v)),
                Some(p) if !p.is_finite() => return Err(Error::NonFinite(v.to_string())),
                _ => {}
            }
        }
        if let Some(d) = &self.dual_positions {
            for e in h.hyperedges() {
                match d.get(&e.index) {
                    None => return Err(Error::UnknownElement(e)),
                    Some(p) if !p.is_finite() => return Err(Error::NonFinite(e.to_string())),
                    _ => {}
                }
            }
        }
        Ok(())
    }

    fn map_points(&mut self, f: impl Fn(Point) -> Point) {
        self.positions.values_mut().for_each(|p| *p = f(*p));
        if let Some(d) = self.dual_positions.as_mut() {
            d.values_mut().for_each(|p| *p = f(*p));
        }
    }

    pub fn translate(&mut self, by: Point) {
        self.map_points(|p| p + by);
    }

    pub fn rotate(&mut self, angle: f64) {
        self.map_points(|p| p.rotate(angle));
    }

    /// (min corner, max corner) of the primal positions.
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        let mut it = self.positions.values();
        let first = *it.next()?;
        Some(it.fold((first, first), |(lo, hi), p| {
            (
                Point::new(lo.x.min(p.x), lo.y.min(p.y)),
                Point::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Separation and primal–dual terms only.
    Separation,
    /// All five terms.
    Regularity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TermWeights {
    pub separation: f64,
    pub regularity: f64,
    pub area: f64,
    pub intersection: f64,
    pub primal_dual: f64,
}

impl Default for TermWeights {
    fn default() -> Self {
        TermWeights {
            separation: 1.0,
            regularity: 1.0,
            area: 1.0,
            intersection: 1.0,
            primal_dual: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnergyConfig {
    /// Unit side length L0.
    pub l0: f64,
    /// Buffer distance d_b between separated polygons.
    pub buffer: f64,
    pub weights: TermWeights,
    /// Run the separation phase before the regularity phase.
    pub separation_phase: bool,
    pub global_iterations: usize,
    pub local_iterations: usize,
    pub gradient_tolerance: f64,
    pub memory: usize,
    /// Softplus sharpness of the intersection-regularity term, applied to
    /// the product of signed distances in units of L0².
    pub intersection_sharpness: f64,
    pub seed: u64,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig {
            l0: 1.0,
            buffer: 0.25,
            weights: TermWeights::default(),
            separation_phase: true,
            global_iterations: 500,
            local_iterations: 100,
            gradient_tolerance: 1e-6,
            memory: 10,
            intersection_sharpness: 10.0,
            seed: 0,
        }
    }
}

impl EnergyConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.l0.is_finite() && self.l0 > 0.0) {
            return bad("l0 must be positive");
        }
        if !(self.buffer.is_finite() && self.buffer >= 0.0) {
            return bad("buffer must be non-negative");
        }
        let w = &self.weights;
        if [w.separation, w.regularity, w.area, w.intersection, w.primal_dual]
            .iter()
            .any(|x| !(x.is_finite() && *x >= 0.0))
        {
            return bad("energy weights must be non-negative");
        }
        if self.memory == 0 {
            return bad("solver memory must be at least 1");
        }
        if !(self.gradient_tolerance > 0.0) || !(self.intersection_sharpness > 0.0) {
            return bad("tolerance and sharpness must be positive");
        }
        Ok(())
    }

    fn solver(&self, max_iterations: usize) -> LbfgsOptions {
        LbfgsOptions {
            memory: self.memory,
            max_iterations,
            gradient_tolerance: self.gradient_tolerance,
            // A tenth of a side: long first steps jump across hinge plateaus.
            initial_step: 0.1 * self.l0,
            ..Default::default()
        }
    }
}

/// Degree or cardinality of every element in the input scale.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Sizes(BTreeMap<ElementId, usize>);

impl Sizes {
    pub fn of(h0: &Hypergraph) -> Self {
        Sizes(h0.all_elements().map(|x| (x, h0.members_unchecked(x).len())).collect())
    }

    pub fn get(&self, x: ElementId) -> usize {
        self.0.get(&x).copied().unwrap_or(0)
    }
}

/// Circumradius of the regular `n`-gon with side `l0`; digons use `l0/2`
/// and monogons `l0/4`.
pub fn regular_radius(n: usize, l0: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidConfig("polygon cardinality must be at least 1".into()));
    }
    Ok(regular_radius_unchecked(n, l0))
}

pub(crate) fn regular_radius_unchecked(n: usize, l0: f64) -> f64 {
    match n {
        0 | 1 => 0.25 * l0,
        2 => 0.5 * l0,
        _ => l0 / (2.0 * (PI / n as f64).sin()),
    }
}

/// Area of the regular `n`-gon with side `l0`; disk and lens areas for
/// monogons and digons.
pub fn target_area(n: usize, l0: f64) -> f64 {
    match n {
        0 | 1 => PI * regular_radius_unchecked(1, l0).powi(2),
        2 => 0.5 * PI * regular_radius_unchecked(2, l0).powi(2),
        _ => n as f64 * l0 * l0 / (4.0 * (PI / n as f64).tan()),
    }
}

/// A hyperedge's polygon in one layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub hyperedge: u32,
    /// Members in counter-clockwise order about their centroid.
    pub vertices: Vec<u32>,
    pub points: Vec<Point>,
    pub cardinality_now: usize,
    pub cardinality_original: usize,
}

impl Polygon {
    pub fn of(h: &Hypergraph, layout: &Layout, sizes: &Sizes, e: u32) -> Result<Polygon> {
        let eid = ElementId::hyperedge(e);
        let members: Vec<u32> = h.members(eid)?.iter().copied().collect();
        let pts = layout.member_points(h, eid)?;
        let flat: Vec<f64> = pts.iter().flat_map(|p| [p.x, p.y]).collect();
        let order = energy::angular_order(&flat, &(0..members.len()).collect::<Vec<_>>());
        Ok(Polygon {
            hyperedge: e,
            vertices: order.iter().map(|&i| members[i]).collect(),
            points: order.iter().map(|&i| pts[i]).collect(),
            cardinality_now: members.len(),
            cardinality_original: sizes.get(eid).max(members.len()),
        })
    }

    pub fn centroid(&self) -> Point {
        geometry::mean(&self.points)
    }

    fn radius(&self, phase: Phase, l0: f64) -> f64 {
        match (phase, self.cardinality_now) {
            (Phase::Regularity, _) => regular_radius_unchecked(self.cardinality_original, l0),
            (Phase::Separation, 1) => regular_radius_unchecked(1, l0),
            (Phase::Separation, _) => {
                let mut d: f64 = 0.0;
                for (i, a) in self.points.iter().enumerate() {
                    for b in &self.points[i + 1..] {
                        d = d.max(a.dist(*b));
                    }
                }
                0.5 * d
            }
        }
    }
}

/// Target centroid distance of two polygons; `None` when the pair is exempt
/// from separation (three or more shared vertices, or a monogon touching
/// another polygon).
pub fn separation_d0(p: &Polygon, q: &Polygon, phase: Phase, cfg: &EnergyConfig) -> Option<f64> {
    let shared: Vec<usize> = p
        .vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| q.vertices.contains(v))
        .map(|(i, _)| i)
        .collect();
    if !shared.is_empty() && (p.cardinality_now == 1 || q.cardinality_now == 1) {
        return None;
    }
    energy::contact_d0(
        shared.len(),
        (p.radius(phase, cfg.l0), p.cardinality_original),
        (q.radius(phase, cfg.l0), q.cardinality_original),
        cfg.buffer,
        cfg.l0,
    )
    .map(|parts| parts.d0)
}

/// Uniform random positions in a disk of radius `L0·√(|V|+|E|)`.
pub fn initialize(h: &Hypergraph, with_dual: bool, cfg: &EnergyConfig) -> Layout {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let radius = cfg.l0 * (h.size() as f64).sqrt();
    let mut sample = || {
        let r = radius * rng.random::<f64>().sqrt();
        let t = 2.0 * PI * rng.random::<f64>();
        Point::new(r * t.cos(), r * t.sin())
    };
    let positions = h.indices(Kind::Vertex).map(|v| (v, sample())).collect();
    let dual_positions = with_dual.then(|| h.indices(Kind::Hyperedge).map(|e| (e, sample())).collect());
    Layout {
        scale_index: 0,
        positions,
        dual_positions,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub phase: Phase,
    pub iterations: usize,
    pub evaluations: usize,
    pub status: Status,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub trace: Vec<f64>,
}

/// Minimises the `phase` energy over the points of `active` (all points when
/// `None`), writing the result back into `layout`. Points outside the active
/// set are left bit-identical.
pub fn minimize_layout(
    h: &Hypergraph,
    layout: &mut Layout,
    sizes: &Sizes,
    phase: Phase,
    cfg: &EnergyConfig,
    active: Option<&Footprint>,
    max_iterations: usize,
) -> Result<PhaseReport> {
    let with_dual = layout.dual_positions.is_some();
    let model = EnergyModel::new(h, sizes, with_dual, phase, cfg, active)?;
    let mut full = model.pack(layout)?;
    let free: Vec<usize> = model.free_points().to_vec();
    let x0: Vec<f64> = free.iter().flat_map(|&i| [full[2 * i], full[2 * i + 1]]).collect();
    let mut full_grad = vec![0.0; full.len()];
    let result = {
        let scratch = &mut full;
        lbfgs::minimize(
            |fx, g| model.eval_free(fx, scratch, &mut full_grad, g),
            &x0,
            &cfg.solver(max_iterations),
        )
    };
    for (k, &i) in free.iter().enumerate() {
        full[2 * i] = result.x[2 * k];
        full[2 * i + 1] = result.x[2 * k + 1];
    }
    model.unpack(&full, layout);
    if let Status::LineSearchFailed = result.status {
        log::debug!("{phase:?} phase: line search failed after {} iterations", result.iterations);
    }
    Ok(PhaseReport {
        phase,
        iterations: result.iterations,
        evaluations: result.evaluations,
        status: result.status,
        initial_energy: result.trace[0],
        final_energy: result.f,
        trace: result.trace,
    })
}

/// Separation phase (unless disabled) followed by the regularity phase,
/// with size targets taken from the input-scale cardinalities.
pub fn optimize_coarsest(
    h: &Hypergraph,
    layout: &mut Layout,
    sizes: &Sizes,
    cfg: &EnergyConfig,
) -> Result<Vec<PhaseReport>> {
    cfg.validate()?;
    layout.check_covers(h)?;
    let mut reports = Vec::new();
    if cfg.separation_phase {
        reports.push(minimize_layout(h, layout, sizes, Phase::Separation, cfg, None, cfg.global_iterations)?);
    }
    reports.push(minimize_layout(h, layout, sizes, Phase::Regularity, cfg, None, cfg.global_iterations)?);
    Ok(reports)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    /// Layouts indexed by scale, `layouts[0]` being the input scale.
    pub layouts: Vec<Layout>,
    /// Local refinement reports, `reports[i]` for the step into scale `i`.
    pub reports: Vec<PhaseReport>,
}

/// Undoes `records` from the coarsest scale down to the input, placing each
/// restored element and refining its footprint with the other points fixed.
pub fn reverse_and_refine(
    coarsest: &Hypergraph,
    coarsest_layout: &Layout,
    records: &[AppliedRecord],
    sizes: &Sizes,
    cfg: &EnergyConfig,
) -> Result<Refinement> {
    cfg.validate()?;
    let n = records.len();
    let mut h = coarsest.clone();
    let mut layout = coarsest_layout.clone();
    layout.scale_index = n;
    layout.check_covers(&h)?;
    let mut layouts = vec![layout.clone()];
    let mut reports = Vec::new();
    for (i, record) in records.iter().enumerate().rev() {
        let scale = i + 1;
        invert(&mut h, record, scale).map_err(|e| e.at_scale(scale))?;
        place_restored(&h, &mut layout, record, cfg, scale);
        layout.scale_index = scale - 1;
        let report = minimize_layout(
            &h,
            &mut layout,
            sizes,
            Phase::Regularity,
            cfg,
            Some(&record.footprint),
            cfg.local_iterations,
        )
        .map_err(|e| e.at_scale(scale - 1))?;
        reports.push(report);
        layouts.push(layout.clone());
    }
    layouts.reverse();
    reports.reverse();
    Ok(Refinement { layouts, reports })
}

/// Initial position for the element restored by `record`.
fn place_restored(h: &Hypergraph, layout: &mut Layout, record: &AppliedRecord, cfg: &EnergyConfig, scale: usize) {
    let r = record.removed();
    let members: Vec<u32> = h.members_unchecked(r).iter().copied().collect();
    let mean_of = |pts: Vec<Point>| (!pts.is_empty()).then(|| geometry::mean(&pts));
    match r.kind {
        Kind::Vertex => {
            let tracked = layout
                .dual_positions
                .as_ref()
                .and_then(|d| mean_of(members.iter().filter_map(|e| d.get(e).copied()).collect()));
            let p = tracked.unwrap_or_else(|| {
                let centroids: Vec<Point> = members
                    .iter()
                    .filter_map(|&e| {
                        let others: Vec<Point> = h
                            .members_unchecked(ElementId::hyperedge(e))
                            .iter()
                            .filter(|&&v| v != r.index)
                            .filter_map(|v| layout.positions.get(v).copied())
                            .collect();
                        mean_of(others)
                    })
                    .collect();
                let base = mean_of(centroids)
                    .or_else(|| match record.op {
                        crate::simplify::Applied::Merger { retained, .. } => layout.position(retained.index),
                        _ => None,
                    })
                    .unwrap_or_default();
                base + jitter(cfg, scale)
            });
            layout.positions.insert(r.index, p);
        }
        Kind::Hyperedge => {
            let centroid = mean_of(members.iter().filter_map(|v| layout.positions.get(v).copied()).collect());
            if let (Some(d), Some(c)) = (layout.dual_positions.as_mut(), centroid) {
                d.insert(r.index, c);
            }
        }
    }
}

fn jitter(cfg: &EnergyConfig, scale: usize) -> Point {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (scale as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let t = 2.0 * PI * rng.random::<f64>();
    Point::new(t.cos(), t.sin()) * (0.01 * cfg.l0)
}
