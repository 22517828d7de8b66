//! Prioritized simplification by atomic operations and its exact inverse.
//!
//! The queue is a binary heap of version-stamped entries. Every candidate
//! operation, legal or not, lives in an operation table; heap entries whose
//! version no longer matches the table are skipped when popped.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{intersection_len, ElementId, Footprint, Hypergraph, Kind};
use crate::planarity;
use crate::stats::{AdjacencyScope, Normalizers, StatTable, DEFAULT_T};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    VertexRemoval,
    HyperedgeRemoval,
    VertexMerger,
    HyperedgeMerger,
}

/// A candidate operation. Merger operands are stored in ascending id order;
/// which one survives is decided when the merger is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKey {
    Remove(ElementId),
    Merge(ElementId, ElementId),
}

impl OpKey {
    pub fn merge(x: ElementId, y: ElementId) -> OpKey {
        if x < y {
            OpKey::Merge(x, y)
        } else {
            OpKey::Merge(y, x)
        }
    }

    pub fn kind(&self) -> OpKind {
        match self {
            OpKey::Remove(x) if x.is_vertex() => OpKind::VertexRemoval,
            OpKey::Remove(_) => OpKind::HyperedgeRemoval,
            OpKey::Merge(x, _) if x.is_vertex() => OpKind::VertexMerger,
            OpKey::Merge(..) => OpKind::HyperedgeMerger,
        }
    }

    pub fn operands(&self) -> Vec<ElementId> {
        match *self {
            OpKey::Remove(x) => vec![x],
            OpKey::Merge(x, y) => vec![x, y],
        }
    }

    /// Ordering used to break priority ties: lower element id first, then
    /// removal before merger.
    fn tie_key(&self) -> (ElementId, u8, ElementId) {
        match *self {
            OpKey::Remove(x) => (x, 0, x),
            OpKey::Merge(x, y) => (x, 1, y),
        }
    }

    pub fn dual(&self) -> OpKey {
        match *self {
            OpKey::Remove(x) => OpKey::Remove(x.dual()),
            OpKey::Merge(x, y) => OpKey::merge(x.dual(), y.dual()),
        }
    }
}

impl fmt::Display for OpKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpKey::Remove(x) => write!(f, "remove({x})"),
            OpKey::Merge(x, y) => write!(f, "merge({x},{y})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorityWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for PriorityWeights {
    fn default() -> Self {
        PriorityWeights {
            alpha: 0.4,
            beta: 0.4,
            gamma: 0.2,
        }
    }
}

impl PriorityWeights {
    pub fn validate(&self) -> Result<()> {
        let w = [self.alpha, self.beta, self.gamma];
        if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || w.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidConfig(format!(
                "priority weights must be non-negative and not all zero, got {w:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TerminationCriteria {
    pub target_vertices: Option<usize>,
    pub target_hyperedges: Option<usize>,
    pub until_linear: bool,
    pub until_forbidden_free: bool,
}

impl TerminationCriteria {
    pub fn validate(&self) -> Result<()> {
        if self.target_vertices.is_none()
            && self.target_hyperedges.is_none()
            && !self.until_linear
            && !self.until_forbidden_free
        {
            return Err(Error::InvalidConfig("no termination criterion set".into()));
        }
        Ok(())
    }

    /// The first satisfied criterion, if any.
    pub fn satisfied(&self, h: &Hypergraph) -> Result<Option<StopReason>> {
        if self.target_vertices.is_some_and(|t| h.num_vertices() <= t) {
            return Ok(Some(StopReason::TargetVertices));
        }
        if self.target_hyperedges.is_some_and(|t| h.num_hyperedges() <= t) {
            return Ok(Some(StopReason::TargetHyperedges));
        }
        if self.until_linear && h.is_linear() {
            return Ok(Some(StopReason::Linear));
        }
        if self.until_forbidden_free && planarity::forbidden_count(h)? == 0 {
            return Ok(Some(StopReason::ForbiddenFree));
        }
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TargetVertices,
    TargetHyperedges,
    Linear,
    ForbiddenFree,
    /// No legal operation remained before any criterion was met.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Applied {
    Removal {
        element: ElementId,
    },
    Merger {
        removed: ElementId,
        retained: ElementId,
        /// Elements incident to both operands before the merger.
        shared: BTreeSet<u32>,
    },
}

/// Everything needed to undo one applied operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppliedRecord {
    /// Index of the scale this operation produced.
    pub scale_index: usize,
    pub kind: OpKind,
    #[serde(flatten)]
    pub op: Applied,
    pub priority: f64,
    /// Incidences of the deleted element at application time.
    pub removed_members: BTreeSet<u32>,
    pub removed_label: Option<String>,
    /// Union of the operands' neighborhoods, taken before application.
    pub footprint: Footprint,
}

impl AppliedRecord {
    pub fn removed(&self) -> ElementId {
        match self.op {
            Applied::Removal { element } => element,
            Applied::Merger { removed, .. } => removed,
        }
    }

    pub fn key(&self) -> OpKey {
        match &self.op {
            Applied::Removal { element } => OpKey::Remove(*element),
            Applied::Merger { removed, retained, .. } => OpKey::merge(*removed, *retained),
        }
    }

    /// The same record expressed on the dual hypergraph.
    pub fn dual(&self) -> AppliedRecord {
        let op = match &self.op {
            Applied::Removal { element } => Applied::Removal {
                element: element.dual(),
            },
            Applied::Merger {
                removed,
                retained,
                shared,
            } => Applied::Merger {
                removed: removed.dual(),
                retained: retained.dual(),
                shared: shared.clone(),
            },
        };
        AppliedRecord {
            scale_index: self.scale_index,
            kind: self.key().dual().kind(),
            op,
            priority: self.priority,
            removed_members: self.removed_members.clone(),
            removed_label: self.removed_label.clone(),
            footprint: self.footprint.dual(),
        }
    }
}

/// Removing `x` must keep every pair of its members adjacent through another
/// element, must not empty a monogon and must not isolate a vertex.
pub fn removal_legal(h: &Hypergraph, x: ElementId) -> Result<bool> {
    let members: Vec<u32> = h.members(x)?.iter().copied().collect();
    let other = x.kind.other();
    for (i, &m) in members.iter().enumerate() {
        let mm = h.members_unchecked(ElementId::new(other, m));
        // A monogon member (vertex removal) or a degree-1 vertex (hyperedge
        // removal) would be left without incidences.
        if mm.len() == 1 {
            return Ok(false);
        }
        for &n in &members[i + 1..] {
            let mn = h.members_unchecked(ElementId::new(other, n));
            if intersection_len(mm, mn) < 2 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A merger needs adjacency of at least two.
pub fn merger_legal(h: &Hypergraph, x: ElementId, y: ElementId) -> Result<bool> {
    match h.adjacency(x, y)? {
        0 => Err(Error::NotAdjacent(x, y)),
        a => Ok(a >= 2),
    }
}

pub fn is_legal(h: &Hypergraph, key: OpKey) -> Result<bool> {
    match key {
        OpKey::Remove(x) => removal_legal(h, x),
        OpKey::Merge(x, y) => merger_legal(h, x, y),
    }
}

/// Union of the operands' neighborhoods.
pub fn footprint(h: &Hypergraph, key: OpKey) -> Result<Footprint> {
    let mut fp = Footprint::default();
    for x in key.operands() {
        fp.extend(&h.neighborhood(x)?);
    }
    Ok(fp)
}

/// Weighted sum of the normalised degree, adjacency and betweenness terms.
pub fn priority(
    h: &Hypergraph,
    key: OpKey,
    weights: &PriorityWeights,
    norm: &Normalizers,
    stats: &StatTable,
) -> Result<f64> {
    let operands = key.operands();
    let fp = footprint(h, key)?;
    let d_hat = fp
        .elements()
        .map(|z| h.members_unchecked(z).len())
        .max()
        .unwrap_or(0) as f64;
    let k = operands.len() as f64;
    let a_bar = operands.iter().map(|&x| stats.adjacency(x)).sum::<f64>() / k;
    let b_bar = operands.iter().map(|&x| stats.betweenness(x)).sum::<f64>() / k;
    let a_range = match operands[0].kind {
        Kind::Vertex => norm.adjacency[0],
        Kind::Hyperedge => norm.adjacency[1],
    };
    Ok(weights.alpha * norm.degree.rise(d_hat)
        + weights.beta * a_range.rise(a_bar)
        + weights.gamma * norm.betweenness.fall(b_bar))
}

/// Larger degree/cardinality survives a merger; ties keep the lower id.
pub fn retained_operand(h: &Hypergraph, x: ElementId, y: ElementId) -> Result<(ElementId, ElementId)> {
    let dx = h.degree(x)?;
    let dy = h.degree(y)?;
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    let (dlo, dhi) = if x < y { (dx, dy) } else { (dy, dx) };
    // (removed, retained)
    Ok(if dhi > dlo { (lo, hi) } else { (hi, lo) })
}

/// Applies a legal operation to `h`, producing scale `scale_index`.
pub fn apply(h: &mut Hypergraph, key: OpKey, priority: f64, scale_index: usize) -> Result<AppliedRecord> {
    for x in key.operands() {
        if !h.contains(x) {
            return Err(Error::UnknownElement(x));
        }
    }
    if let OpKey::Merge(x, y) = key {
        if x.kind != y.kind {
            return Err(Error::KindMismatch(x, y));
        }
    }
    if !is_legal(h, key)? {
        return Err(Error::IllegalOperation(key.to_string()));
    }
    let footprint = footprint(h, key)?;
    let op = match key {
        OpKey::Remove(element) => Applied::Removal { element },
        OpKey::Merge(x, y) => {
            let (removed, retained) = retained_operand(h, x, y)?;
            let shared = h
                .members_unchecked(removed)
                .intersection(h.members_unchecked(retained))
                .copied()
                .collect();
            Applied::Merger {
                removed,
                retained,
                shared,
            }
        }
    };
    let mut record = AppliedRecord {
        scale_index,
        kind: key.kind(),
        op,
        priority,
        removed_members: BTreeSet::new(),
        removed_label: None,
        footprint,
    };
    apply_record(h, &mut record);
    Ok(record)
}

/// Performs the mutation described by `record`, filling in the removed
/// element's incidences and label.
fn apply_record(h: &mut Hypergraph, record: &mut AppliedRecord) {
    let (members, label) = h
        .remove_element(record.removed())
        .expect("operand checked to exist");
    if let Applied::Merger { retained, .. } = record.op {
        for &m in &members {
            h.link(retained, m);
        }
    }
    record.removed_members = members;
    record.removed_label = label;
}

/// Re-applies a record to a hypergraph in the state it was recorded from,
/// e.g. the tracked dual when given `record.dual()`.
pub fn replay(h: &mut Hypergraph, record: &AppliedRecord) -> Result<()> {
    let removed = record.removed();
    if h.members(removed)? != &record.removed_members {
        return Err(Error::CorruptRecord(record.scale_index));
    }
    if let Applied::Merger { retained, shared, .. } = &record.op {
        let rm = h.members(*retained)?;
        if &rm.intersection(&record.removed_members).copied().collect::<BTreeSet<_>>() != shared {
            return Err(Error::CorruptRecord(record.scale_index));
        }
    }
    let mut scratch = record.clone();
    apply_record(h, &mut scratch);
    Ok(())
}

/// Undoes `record` on `h`, which must currently be at `current_scale`.
pub fn invert(h: &mut Hypergraph, record: &AppliedRecord, current_scale: usize) -> Result<()> {
    if record.scale_index != current_scale {
        return Err(Error::OutOfOrderInversion {
            record: record.scale_index,
            current: current_scale,
        });
    }
    let corrupt = || Error::CorruptRecord(record.scale_index);
    let removed = record.removed();
    if h.contains(removed) {
        return Err(corrupt());
    }
    let other = removed.kind.other();
    if record
        .removed_members
        .iter()
        .any(|&m| !h.contains(ElementId::new(other, m)))
    {
        return Err(corrupt());
    }
    if let Applied::Merger { retained, shared, .. } = &record.op {
        let rm = h.members(*retained).map_err(|_| corrupt())?;
        if !record.removed_members.is_subset(rm) || !shared.is_subset(&record.removed_members) {
            return Err(corrupt());
        }
        for &m in record.removed_members.difference(shared) {
            h.unlink(*retained, m);
        }
    }
    h.insert_element(removed, &record.removed_members, record.removed_label.as_deref());
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OpState {
    priority: f64,
    legal: bool,
    version: u64,
}

#[derive(Debug, Clone, Copy)]
struct HeapEntry {
    priority: f64,
    key: OpKey,
    version: u64,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then_with(|| other.key.tie_key().cmp(&self.key.tie_key()))
            .then_with(|| self.version.cmp(&other.version))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimplifyConfig {
    pub weights: PriorityWeights,
    pub t: f64,
    pub adjacency_scope: AdjacencyScope,
    pub criteria: TerminationCriteria,
    pub track_dual: bool,
}

impl Default for SimplifyConfig {
    fn default() -> Self {
        SimplifyConfig {
            weights: PriorityWeights::default(),
            t: DEFAULT_T,
            adjacency_scope: AdjacencyScope::default(),
            criteria: TerminationCriteria {
                until_forbidden_free: true,
                ..Default::default()
            },
            track_dual: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleSummary {
    pub scale_index: usize,
    pub vertices: usize,
    pub hyperedges: usize,
}

impl ScaleSummary {
    fn of(h: &Hypergraph, scale_index: usize) -> Self {
        ScaleSummary {
            scale_index,
            vertices: h.num_vertices(),
            hyperedges: h.num_hyperedges(),
        }
    }
}

/// Stateful simplification of one hypergraph.
#[derive(Debug, Clone)]
pub struct Simplifier {
    h: Hypergraph,
    dual: Option<Hypergraph>,
    stats: StatTable,
    norm: Normalizers,
    weights: PriorityWeights,
    ops: BTreeMap<OpKey, OpState>,
    partners: BTreeMap<ElementId, BTreeSet<ElementId>>,
    heap: BinaryHeap<HeapEntry>,
    next_version: u64,
    records: Vec<AppliedRecord>,
    summaries: Vec<ScaleSummary>,
}

impl Simplifier {
    pub fn new(h0: Hypergraph, config: &SimplifyConfig) -> Result<Self> {
        config.weights.validate()?;
        h0.ensure_connected()?;
        let stats = StatTable::compute(&h0, config.t)?;
        let dual = if config.track_dual {
            Some(h0.dual()?)
        } else {
            None
        };
        let norm = Normalizers::compute(&h0, dual.as_ref(), &stats, config.adjacency_scope)?;
        let summaries = vec![ScaleSummary::of(&h0, 0)];
        let mut s = Simplifier {
            h: h0,
            dual,
            stats,
            norm,
            weights: config.weights,
            ops: BTreeMap::new(),
            partners: BTreeMap::new(),
            heap: BinaryHeap::new(),
            next_version: 0,
            records: Vec::new(),
            summaries,
        };
        let all: Vec<ElementId> = s.h.all_elements().collect();
        for x in all {
            s.reevaluate(x)?;
        }
        Ok(s)
    }

    pub fn hypergraph(&self) -> &Hypergraph {
        &self.h
    }

    pub fn tracked_dual(&self) -> Option<&Hypergraph> {
        self.dual.as_ref()
    }

    pub fn stats(&self) -> &StatTable {
        &self.stats
    }

    pub fn normalizers(&self) -> &Normalizers {
        &self.norm
    }

    pub fn records(&self) -> &[AppliedRecord] {
        &self.records
    }

    pub fn current_scale(&self) -> usize {
        self.records.len()
    }

    /// Legal operations currently queued, with their priorities.
    pub fn queue_snapshot(&self) -> BTreeMap<OpKey, f64> {
        self.ops
            .iter()
            .filter(|(_, s)| s.legal)
            .map(|(&k, s)| (k, s.priority))
            .collect()
    }

    /// Number of tracked candidate operations, legal or not.
    pub fn candidate_count(&self) -> usize {
        self.ops.len()
    }

    /// The operation that `step` would apply next.
    pub fn peek(&mut self) -> Option<(OpKey, f64)> {
        while let Some(top) = self.heap.peek() {
            if self.is_current(top) {
                return Some((top.key, top.priority));
            }
            self.heap.pop();
        }
        None
    }

    fn is_current(&self, entry: &HeapEntry) -> bool {
        self.ops
            .get(&entry.key)
            .is_some_and(|s| s.legal && s.version == entry.version)
    }

    /// Applies the highest-priority legal operation, or returns `None` when
    /// the queue is empty.
    pub fn step(&mut self) -> Result<Option<&AppliedRecord>> {
        let Some((key, priority)) = self.peek() else {
            return Ok(None);
        };
        self.heap.pop();
        let scale = self.records.len() + 1;

        let fp = footprint(&self.h, key)?;
        let mut refresh = self.closed_neighborhood(&fp);
        let record = apply(&mut self.h, key, priority, scale).map_err(|e| e.at_scale(scale))?;
        if let Some(d) = self.dual.as_mut() {
            replay(d, &record.dual()).map_err(|e| e.at_scale(scale))?;
        }
        self.stats.refresh(&self.h, &fp)?;

        self.drop_element(record.removed());
        let existing = Footprint {
            vertices: fp.vertices.iter().copied().filter(|&i| self.h.contains(ElementId::vertex(i))).collect(),
            hyperedges: fp
                .hyperedges
                .iter()
                .copied()
                .filter(|&i| self.h.contains(ElementId::hyperedge(i)))
                .collect(),
        };
        refresh.extend(&self.closed_neighborhood(&existing));
        for y in refresh.elements().collect::<Vec<_>>() {
            if self.h.contains(y) {
                self.reevaluate(y)?;
            }
        }

        log::debug!("scale {scale}: {key} (priority {priority:.6})");
        self.summaries.push(ScaleSummary::of(&self.h, scale));
        self.records.push(record);
        Ok(self.records.last())
    }

    /// Runs until the first satisfied criterion or until the queue empties.
    pub fn run(&mut self, criteria: &TerminationCriteria) -> Result<StopReason> {
        criteria.validate()?;
        loop {
            if let Some(reason) = criteria.satisfied(&self.h)? {
                return Ok(reason);
            }
            if self.step()?.is_none() {
                return Ok(StopReason::Exhausted);
            }
        }
    }

    pub fn finish(self, status: StopReason) -> SimplifyOutcome {
        SimplifyOutcome {
            hypergraph: self.h,
            dual: self.dual,
            records: self.records,
            summaries: self.summaries,
            status,
        }
    }

    /// `fp` together with the neighborhoods of all its existing elements.
    fn closed_neighborhood(&self, fp: &Footprint) -> Footprint {
        let mut out = fp.clone();
        for z in fp.elements() {
            if let Ok(n) = self.h.neighborhood(z) {
                out.extend(&n);
            }
        }
        out
    }

    fn drop_element(&mut self, x: ElementId) {
        self.ops.remove(&OpKey::Remove(x));
        for p in self.partners.remove(&x).unwrap_or_default() {
            self.ops.remove(&OpKey::merge(x, p));
            if let Some(ps) = self.partners.get_mut(&p) {
                ps.remove(&x);
            }
        }
    }

    fn reevaluate(&mut self, y: ElementId) -> Result<()> {
        self.evaluate(OpKey::Remove(y))?;
        let adjacent: BTreeSet<ElementId> = self
            .h
            .adjacent(y)?
            .into_iter()
            .map(|i| ElementId::new(y.kind, i))
            .collect();
        let stale: Vec<ElementId> = self
            .partners
            .get(&y)
            .map(|ps| ps.difference(&adjacent).copied().collect())
            .unwrap_or_default();
        for z in stale {
            self.ops.remove(&OpKey::merge(y, z));
            self.partners.entry(y).or_default().remove(&z);
            self.partners.entry(z).or_default().remove(&y);
        }
        for z in adjacent {
            self.partners.entry(y).or_default().insert(z);
            self.partners.entry(z).or_default().insert(y);
            self.evaluate(OpKey::merge(y, z))?;
        }
        Ok(())
    }

    fn evaluate(&mut self, key: OpKey) -> Result<()> {
        let legal = is_legal(&self.h, key)?;
        let p = priority(&self.h, key, &self.weights, &self.norm, &self.stats)?;
        if let Some(s) = self.ops.get(&key) {
            if s.legal == legal && s.priority.to_bits() == p.to_bits() {
                return Ok(());
            }
        }
        self.next_version += 1;
        let version = self.next_version;
        self.ops.insert(
            key,
            OpState {
                priority: p,
                legal,
                version,
            },
        );
        if legal {
            self.heap.push(HeapEntry {
                priority: p,
                key,
                version,
            });
        }
        Ok(())
    }
}

/// Legal operations of `h` with their priorities, computed from scratch.
pub fn generate(
    h: &Hypergraph,
    weights: &PriorityWeights,
    norm: &Normalizers,
    stats: &StatTable,
) -> Result<BTreeMap<OpKey, f64>> {
    let mut out = BTreeMap::new();
    for x in h.all_elements() {
        let mut keys = vec![OpKey::Remove(x)];
        keys.extend(
            h.adjacent(x)?
                .range(x.index + 1..)
                .map(|&i| OpKey::Merge(x, ElementId::new(x.kind, i))),
        );
        for key in keys {
            if is_legal(h, key)? {
                out.insert(key, priority(h, key, weights, norm, stats)?);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplifyOutcome {
    /// The coarsest scale H_n.
    pub hypergraph: Hypergraph,
    pub dual: Option<Hypergraph>,
    /// Applied operations, oldest first; `records[i]` produced scale `i + 1`.
    pub records: Vec<AppliedRecord>,
    pub summaries: Vec<ScaleSummary>,
    pub status: StopReason,
}

pub fn simplify(h0: &Hypergraph, config: &SimplifyConfig) -> Result<SimplifyOutcome> {
    config.criteria.validate()?;
    let mut s = Simplifier::new(h0.clone(), config)?;
    let status = s.run(&config.criteria)?;
    Ok(s.finish(status))
}

/// Undoes every record, coarsest first, returning H_0..=H_n.
pub fn reconstruct_scales(coarsest: &Hypergraph, records: &[AppliedRecord]) -> Result<Vec<Hypergraph>> {
    let mut scales = vec![coarsest.clone()];
    let mut h = coarsest.clone();
    for (i, r) in records.iter().enumerate().rev() {
        invert(&mut h, r, i + 1).map_err(|e| e.at_scale(i + 1))?;
        scales.push(h.clone());
    }
    scales.reverse();
    Ok(scales)
}
