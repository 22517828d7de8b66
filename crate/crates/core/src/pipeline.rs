//! End-to-end runs: simplify, lay out the coarsest scale, refine back down to
//! the input, then measure and draw the requested scales.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{ElementId, Hypergraph};
use crate::io::{self, HypergraphDoc};
use crate::layout::{self, EnergyConfig, Layout, PhaseReport, Sizes};
use crate::lbfgs::Status;
use crate::metrics::{overlap_report, MetricsConfig, OverlapReport};
use crate::render::{render_svg, RenderStyle};
use crate::simplify::{
    reconstruct_scales, simplify, Applied, AppliedRecord, OpKind, PriorityWeights, ScaleSummary, SimplifyConfig,
    StopReason, TerminationCriteria,
};
use crate::stats::{AdjacencyScope, DEFAULT_T};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmitScales {
    All,
    /// The input and the coarsest scale.
    Ends,
    List(Vec<usize>),
}

impl EmitScales {
    fn selects(&self, scale: usize, coarsest: usize) -> bool {
        match self {
            EmitScales::All => true,
            EmitScales::Ends => scale == 0 || scale == coarsest,
            EmitScales::List(l) => l.contains(&scale),
        }
    }
}

impl std::str::FromStr for EmitScales {
    type Err = Error;

    /// `all`, `ends`, or a comma-separated list of scale indices.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(EmitScales::All),
            "ends" => Ok(EmitScales::Ends),
            _ => s
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::InvalidConfig(format!("bad scale index `{t}` in `{s}`")))
                })
                .collect::<Result<_>>()
                .map(EmitScales::List),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub weights: PriorityWeights,
    pub t: f64,
    pub adjacency_scope: AdjacencyScope,
    pub criteria: TerminationCriteria,
    /// The layout seed is taken from `seed`, not from `energy.seed`.
    pub energy: EnergyConfig,
    pub dual_tracking: bool,
    pub emit_scales: EmitScales,
    /// Overlap threshold in units of L0².
    pub epsilon: f64,
    pub style: RenderStyle,
    pub seed: u64,
    /// Also lay out the input directly with the same energies and total
    /// iteration budget, for comparison.
    pub baseline: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            weights: PriorityWeights::default(),
            t: DEFAULT_T,
            adjacency_scope: AdjacencyScope::default(),
            criteria: SimplifyConfig::default().criteria,
            energy: EnergyConfig::default(),
            dual_tracking: false,
            emit_scales: EmitScales::All,
            epsilon: MetricsConfig::default().epsilon,
            style: RenderStyle::default(),
            seed: 0,
            baseline: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(Error::NegativeExponent(self.t));
        }
        self.criteria.validate()?;
        self.energy_config().validate()?;
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::InvalidConfig("epsilon must be non-negative".into()));
        }
        Ok(())
    }

    pub fn simplify_config(&self) -> SimplifyConfig {
        SimplifyConfig {
            weights: self.weights,
            t: self.t,
            adjacency_scope: self.adjacency_scope,
            criteria: self.criteria.clone(),
            track_dual: self.dual_tracking,
        }
    }

    pub fn energy_config(&self) -> EnergyConfig {
        EnergyConfig {
            seed: self.seed,
            ..self.energy.clone()
        }
    }

    pub fn metrics_config(&self) -> MetricsConfig {
        MetricsConfig {
            l0: self.energy.l0,
            epsilon: self.epsilon,
        }
    }

    pub fn render_style(&self) -> RenderStyle {
        RenderStyle {
            l0: self.energy.l0,
            ..self.style
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed,
}

/// A phase report without its energy trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSummary {
    pub phase: layout::Phase,
    pub iterations: usize,
    pub evaluations: usize,
    pub status: Status,
    pub initial_energy: f64,
    pub final_energy: f64,
}

impl From<&PhaseReport> for PhaseSummary {
    fn from(r: &PhaseReport) -> Self {
        PhaseSummary {
            phase: r.phase,
            iterations: r.iterations,
            evaluations: r.evaluations,
            status: r.status,
            initial_energy: r.initial_energy,
            final_energy: r.final_energy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationEntry {
    pub kind: OpKind,
    pub removed: ElementId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub retained: Option<ElementId>,
    pub priority: f64,
}

impl From<&AppliedRecord> for OperationEntry {
    fn from(r: &AppliedRecord) -> Self {
        OperationEntry {
            kind: r.kind,
            removed: r.removed(),
            retained: match r.op {
                Applied::Merger { retained, .. } => Some(retained),
                Applied::Removal { .. } => None,
            },
            priority: r.priority,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleEntry {
    pub scale_index: usize,
    pub vertices: usize,
    pub hyperedges: usize,
    /// The operation that produced this scale from the previous one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operation: Option<OperationEntry>,
    /// Local refinement after undoing the operation of the next scale.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement: Option<PhaseSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layout_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap: Option<OverlapReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_overlap: Option<OverlapReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineEntry {
    /// Iteration cap given to each global phase.
    pub phase_iterations: usize,
    pub phases: Vec<PhaseSummary>,
    pub overlap: OverlapReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layout_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub config: PipelineConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop_reason: Option<StopReason>,
    pub scales: Vec<ScaleEntry>,
    pub coarsest_phases: Vec<PhaseSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<BaselineEntry>,
    pub runtime_seconds: f64,
}

impl Manifest {
    fn new(config: &PipelineConfig) -> Self {
        Manifest {
            status: RunStatus::Failed,
            error: None,
            config: config.clone(),
            stop_reason: None,
            scales: Vec::new(),
            coarsest_phases: Vec::new(),
            baseline: None,
            runtime_seconds: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub manifest: Manifest,
    /// H_0 ..= H_n.
    pub scales: Vec<Hypergraph>,
    /// One layout per scale, same indexing as `scales`.
    pub layouts: Vec<Layout>,
    pub baseline_layout: Option<Layout>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// File name of a per-scale artifact, e.g. `scale_003.svg`.
pub fn scale_file(scale: usize, ext: &str) -> String {
    format!("scale_{scale:03}.{ext}")
}

/// Runs the whole pipeline on `h0`. With `out_dir`, writes the manifest,
/// per-scale layouts and SVGs there; the manifest is written even when a
/// later stage fails, with `status: failed` and the error message.
pub fn run_pipeline(h0: &Hypergraph, cfg: &PipelineConfig, out_dir: Option<&Path>) -> Result<PipelineOutput> {
    let start = Instant::now();
    let mut manifest = Manifest::new(cfg);
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
    }
    let result = run_stages(h0, cfg, out_dir, &mut manifest);
    manifest.runtime_seconds = start.elapsed().as_secs_f64();
    match result {
        Ok((scales, layouts, baseline_layout)) => {
            manifest.status = RunStatus::Ok;
            if let Some(dir) = out_dir {
                io::write_json(&dir.join(MANIFEST_FILE), &manifest)?;
            }
            Ok(PipelineOutput {
                manifest,
                scales,
                layouts,
                baseline_layout,
            })
        }
        Err(e) => {
            manifest.error = Some(e.to_string());
            if let Some(dir) = out_dir {
                io::write_json(&dir.join(MANIFEST_FILE), &manifest)?;
            }
            Err(e)
        }
    }
}

type Stages = (Vec<Hypergraph>, Vec<Layout>, Option<Layout>);

fn run_stages(h0: &Hypergraph, cfg: &PipelineConfig, out_dir: Option<&Path>, manifest: &mut Manifest) -> Result<Stages> {
    cfg.validate()?;
    h0.ensure_connected()?;
    let energy = cfg.energy_config();

    let outcome = simplify(h0, &cfg.simplify_config())?;
    manifest.stop_reason = Some(outcome.status);
    let n = outcome.records.len();
    log::info!("simplified to scale {n} ({:?})", outcome.status);
    let scales = reconstruct_scales(&outcome.hypergraph, &outcome.records)?;
    manifest.scales = scales
        .iter()
        .enumerate()
        .map(|(i, h)| ScaleEntry {
            scale_index: i,
            vertices: h.num_vertices(),
            hyperedges: h.num_hyperedges(),
            operation: i.checked_sub(1).map(|k| OperationEntry::from(&outcome.records[k])),
            refinement: None,
            layout_path: None,
            svg_path: None,
            overlap: None,
            dual_overlap: None,
        })
        .collect();
    if let EmitScales::List(l) = &cfg.emit_scales {
        if let Some(bad) = l.iter().find(|&&s| s > n) {
            return Err(Error::InvalidConfig(format!("scale {bad} requested but the coarsest scale is {n}")));
        }
    }

    let sizes = Sizes::of(h0);
    let mut coarsest_layout = layout::initialize(&outcome.hypergraph, cfg.dual_tracking, &energy);
    coarsest_layout.scale_index = n;
    let phases = layout::optimize_coarsest(&outcome.hypergraph, &mut coarsest_layout, &sizes, &energy)
        .map_err(|e| e.at_scale(n))?;
    manifest.coarsest_phases = phases.iter().map(PhaseSummary::from).collect();
    let refined = layout::reverse_and_refine(&outcome.hypergraph, &coarsest_layout, &outcome.records, &sizes, &energy)?;
    for (i, r) in refined.reports.iter().enumerate() {
        manifest.scales[i].refinement = Some(PhaseSummary::from(r));
    }

    let metrics = cfg.metrics_config();
    let style = cfg.render_style();
    let emitted: Vec<usize> = (0..=n).filter(|&i| cfg.emit_scales.selects(i, n)).collect();
    let artifacts: Vec<(usize, OverlapReport, Option<OverlapReport>, String)> = emitted
        .par_iter()
        .map(|&i| {
            let (h, l) = (&scales[i], &refined.layouts[i]);
            let primal = overlap_report(h, l, &metrics).map_err(|e| e.at_scale(i))?;
            let dual = match &l.dual_positions {
                Some(d) => {
                    let dual_layout = Layout {
                        scale_index: i,
                        positions: d.clone(),
                        dual_positions: None,
                    };
                    Some(overlap_report(&h.dual()?, &dual_layout, &metrics).map_err(|e| e.at_scale(i))?)
                }
                None => None,
            };
            let svg = render_svg(h, l, &style).map_err(|e| e.at_scale(i))?;
            Ok((i, primal, dual, svg))
        })
        .collect::<Result<_>>()?;
    for (i, primal, dual, svg) in artifacts {
        let entry = &mut manifest.scales[i];
        entry.overlap = Some(primal);
        entry.dual_overlap = dual;
        if let Some(dir) = out_dir {
            let (lp, sp) = (scale_file(i, "json"), scale_file(i, "svg"));
            io::write_json(&dir.join(&lp), &refined.layouts[i])?;
            fs::write(dir.join(&sp), svg)?;
            entry.layout_path = Some(lp);
            entry.svg_path = Some(sp);
        }
    }

    let mut baseline_layout = None;
    if cfg.baseline {
        let (entry, l) = run_baseline(h0, cfg, n)?;
        let mut entry = entry;
        if let Some(dir) = out_dir {
            io::write_json(&dir.join("baseline.json"), &l)?;
            fs::write(dir.join("baseline.svg"), render_svg(h0, &l, &style)?)?;
            entry.layout_path = Some("baseline.json".into());
            entry.svg_path = Some("baseline.svg".into());
        }
        manifest.baseline = Some(entry);
        baseline_layout = Some(l);
    }
    Ok((scales, refined.layouts, baseline_layout))
}

/// Iteration cap per global phase that matches the multi-scale budget:
/// the global phases plus one local refinement per applied operation.
pub fn baseline_phase_iterations(energy: &EnergyConfig, operations: usize) -> usize {
    let phases = if energy.separation_phase { 2 } else { 1 };
    energy.global_iterations + (energy.local_iterations * operations).div_ceil(phases)
}

/// Lays out `h0` directly, skipping simplification.
pub fn run_baseline(h0: &Hypergraph, cfg: &PipelineConfig, operations: usize) -> Result<(BaselineEntry, Layout)> {
    let base = cfg.energy_config();
    let phase_iterations = baseline_phase_iterations(&base, operations);
    let energy = EnergyConfig {
        global_iterations: phase_iterations,
        ..base
    };
    let mut l = layout::initialize(h0, cfg.dual_tracking, &energy);
    let phases = layout::optimize_coarsest(h0, &mut l, &Sizes::of(h0), &energy)?;
    let overlap = overlap_report(h0, &l, &cfg.metrics_config())?;
    Ok((
        BaselineEntry {
            phase_iterations,
            phases: phases.iter().map(PhaseSummary::from).collect(),
            overlap,
            layout_path: None,
            svg_path: None,
        },
        l,
    ))
}

/// Output of simplification alone, readable by the layout stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplifyManifest {
    pub config: SimplifyConfig,
    pub stop_reason: StopReason,
    pub scales: Vec<ScaleSummary>,
    pub operations: Vec<AppliedRecord>,
    pub input: HypergraphDoc,
    pub coarsest: HypergraphDoc,
}

impl SimplifyManifest {
    pub fn run(h0: &Hypergraph, config: &SimplifyConfig) -> Result<Self> {
        let outcome = simplify(h0, config)?;
        Ok(SimplifyManifest {
            config: config.clone(),
            stop_reason: outcome.status,
            scales: outcome.summaries,
            operations: outcome.records,
            input: HypergraphDoc::from(h0),
            coarsest: HypergraphDoc::from(&outcome.hypergraph),
        })
    }

    pub fn coarsest(&self) -> Result<Hypergraph> {
        self.coarsest.clone().into_hypergraph()
    }

    pub fn input(&self) -> Result<Hypergraph> {
        self.input.clone().into_hypergraph()
    }
}

/// Lays out every scale of a simplification: the coarsest globally, the rest
/// by local refinement. Returns layouts indexed by scale.
pub fn layout_scales(m: &SimplifyManifest, energy: &EnergyConfig, with_dual: bool) -> Result<Vec<Layout>> {
    let h0 = m.input()?;
    let hn = m.coarsest()?;
    let n = m.operations.len();
    let sizes = Sizes::of(&h0);
    let mut l = layout::initialize(&hn, with_dual, energy);
    l.scale_index = n;
    layout::optimize_coarsest(&hn, &mut l, &sizes, energy).map_err(|e| e.at_scale(n))?;
    Ok(layout::reverse_and_refine(&hn, &l, &m.operations, &sizes, energy)?.layouts)
}

/// Removes every `runtime_seconds` field, for comparing runs.
pub fn strip_runtime(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            map.remove("runtime_seconds");
            map.values_mut().for_each(strip_runtime);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_runtime),
        _ => {}
    }
}

/// Per-scale counts of the manifest must match the hypergraphs they describe.
pub fn check_counts(manifest: &Manifest, scales: &[Hypergraph]) -> bool {
    manifest.scales.len() == scales.len()
        && manifest.scales.iter().zip(scales).enumerate().all(|(i, (e, h))| {
            e.scale_index == i && e.vertices == h.num_vertices() && e.hyperedges == h.num_hyperedges()
        })
}

/// Reads every file named in a manifest, keyed by its path.
pub fn read_artifacts(dir: &Path, manifest: &Manifest) -> Result<BTreeMap<String, Vec<u8>>> {
    let mut out = BTreeMap::new();
    let names = manifest
        .scales
        .iter()
        .flat_map(|s| [s.layout_path.clone(), s.svg_path.clone()])
        .chain(
            manifest
                .baseline
                .iter()
                .flat_map(|b| [b.layout_path.clone(), b.svg_path.clone()]),
        )
        .flatten();
    for name in names {
        out.insert(name.clone(), fs::read(dir.join(&name))?);
    }
    Ok(out)
}
