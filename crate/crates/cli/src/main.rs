use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use polyscale::fixtures;
use polyscale::io::{self, InputFormat};
use polyscale::metrics::overlap_report;
use polyscale::pipeline::{self, run_pipeline, EmitScales, PipelineConfig, SimplifyManifest};
use polyscale::planarity::PlanarityReport;
use polyscale::render::render_svg;
use polyscale::simplify::TerminationCriteria;
use polyscale::stats::StatTable;
use polyscale::Hypergraph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// Multi-scale convex polygon layouts of hypergraphs.
#[derive(Parser)]
#[command(name = "polyscale", version)]
struct Cli {
    /// More log output (-v info, -vv debug). `RUST_LOG` overrides.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-element degree, betweenness and adjacency factor.
    Stats {
        #[command(flatten)]
        input: Input,
        /// Adjacency-factor exponent.
        #[arg(long, default_value_t = polyscale::stats::DEFAULT_T)]
        t: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Zykov planarity and forbidden sub-hypergraphs.
    Planarity {
        #[command(flatten)]
        input: Input,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simplify into a sequence of scales and write a scales manifest.
    Simplify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        settings: Settings,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Lay out every scale of a scales manifest.
    Layout {
        /// Manifest written by `simplify`.
        #[arg(long)]
        scales: PathBuf,
        #[command(flatten)]
        settings: Settings,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Pairwise overlap report of a layout.
    Metrics {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        layout: PathBuf,
        #[command(flatten)]
        settings: Settings,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Draw a layout as SVG.
    Render {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        layout: PathBuf,
        #[command(flatten)]
        settings: Settings,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Simplify, lay out, refine, measure and draw in one run.
    Pipeline {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        settings: Settings,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Compare the multi-scale pipeline against a single-scale layout.
    Bench {
        /// Input hypergraph; without it, synthetic fixtures are generated.
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(long)]
        format: Option<InputFormat>,
        /// Synthetic family: `clustered` or `tree`.
        #[arg(long, default_value = "clustered")]
        generate: String,
        /// Number of seeded runs.
        #[arg(long, default_value_t = 10)]
        runs: u64,
        #[command(flatten)]
        settings: Settings,
        /// Keep each run's artifacts under `<out-dir>/run_<i>`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    #[arg(short, long)]
    input: PathBuf,
    /// `json` or `hmetis`; guessed from the extension when omitted.
    #[arg(long)]
    format: Option<InputFormat>,
}

impl Input {
    fn read(&self) -> Result<Hypergraph> {
        io::parse_input(&self.input, self.format).with_context(|| format!("reading {}", self.input.display()))
    }
}

/// Pipeline settings: a JSON config file, then flags on top.
#[derive(Args)]
struct Settings {
    /// JSON pipeline configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Adjacency-factor exponent.
    #[arg(long)]
    t: Option<f64>,
    /// Stop once at most this many vertices remain.
    #[arg(long)]
    target_vertices: Option<usize>,
    /// Stop once at most this many hyperedges remain.
    #[arg(long)]
    target_hyperedges: Option<usize>,
    #[arg(long)]
    until_linear: bool,
    #[arg(long)]
    until_forbidden_free: bool,
    /// Track the dual hypergraph and its layout.
    #[arg(long)]
    dual: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Unit side length.
    #[arg(long)]
    l0: Option<f64>,
    /// Buffer distance between separated polygons.
    #[arg(long)]
    buffer: Option<f64>,
    #[arg(long)]
    global_iterations: Option<usize>,
    #[arg(long)]
    local_iterations: Option<usize>,
    /// Skip the separation phase.
    #[arg(long)]
    no_separation: bool,
    /// Scales to write: `all`, `ends` or a list such as `0,3`.
    #[arg(long)]
    emit: Option<EmitScales>,
    /// Overlap threshold in units of L0².
    #[arg(long)]
    epsilon: Option<f64>,
    /// Label vertices in SVG output.
    #[arg(long)]
    labels: bool,
    /// SVG width in pixels.
    #[arg(long)]
    width: Option<f64>,
    /// Also run the single-scale baseline.
    #[arg(long)]
    baseline: bool,
}

impl Settings {
    fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg: PipelineConfig = match &self.config {
            Some(p) => io::read_json(p).with_context(|| format!("reading config {}", p.display()))?,
            None => PipelineConfig::default(),
        };
        macro_rules! set {
            ($flag:expr => $($field:tt)+) => {
                if let Some(v) = $flag.clone() {
                    cfg.$($field)+ = v;
                }
            };
        }
        set!(self.alpha => weights.alpha);
        set!(self.beta => weights.beta);
        set!(self.gamma => weights.gamma);
        set!(self.t => t);
        set!(self.seed => seed);
        set!(self.l0 => energy.l0);
        set!(self.buffer => energy.buffer);
        set!(self.global_iterations => energy.global_iterations);
        set!(self.local_iterations => energy.local_iterations);
        set!(self.emit => emit_scales);
        set!(self.epsilon => epsilon);
        set!(self.width => style.width);
        let criteria = TerminationCriteria {
            target_vertices: self.target_vertices,
            target_hyperedges: self.target_hyperedges,
            until_linear: self.until_linear,
            until_forbidden_free: self.until_forbidden_free,
        };
        if criteria != TerminationCriteria::default() {
            cfg.criteria = criteria;
        }
        cfg.dual_tracking |= self.dual;
        cfg.energy.separation_phase &= !self.no_separation;
        cfg.style.labels |= self.labels;
        cfg.baseline |= self.baseline;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(value: &Value, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => io::write_json(p, value).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let written = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(value)?);
            match written {
                Err(e) if e.kind() != ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn stats(h: &Hypergraph, t: f64) -> Result<Value> {
    let table = StatTable::compute(h, t)?;
    let rows: Vec<Value> = h
        .all_elements()
        .map(|x| {
            json!({
                "id": x.to_string(),
                "label": h.label(x),
                "kind": x.kind,
                "degree": h.degree(x).expect("element exists"),
                "betweenness": table.betweenness(x),
                "adjacency_factor": table.adjacency(x),
            })
        })
        .collect();
    Ok(json!({ "t": t, "elements": rows }))
}

fn layout_command(scales: &Path, cfg: &PipelineConfig, out_dir: &Path) -> Result<()> {
    let m: SimplifyManifest = io::read_json(scales).with_context(|| format!("reading {}", scales.display()))?;
    let layouts = pipeline::layout_scales(&m, &cfg.energy_config(), cfg.dual_tracking)?;
    fs::create_dir_all(out_dir)?;
    for l in &layouts {
        io::write_json(&out_dir.join(pipeline::scale_file(l.scale_index, "json")), l)?;
    }
    info!("wrote {} layouts to {}", layouts.len(), out_dir.display());
    Ok(())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    match v.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => v[n / 2],
        n => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

struct BenchRun<'a> {
    input: Option<&'a Hypergraph>,
    family: &'a str,
    runs: u64,
    out_dir: Option<&'a Path>,
}

fn bench(run: BenchRun<'_>, base: &PipelineConfig) -> Result<Value> {
    let mut rows = Vec::new();
    let (mut mc, mut bc, mut ma, mut ba) = (vec![], vec![], vec![], vec![]);
    for i in 0..run.runs {
        let seed = base.seed + i;
        let h = match run.input {
            Some(h) => h.clone(),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                match run.family {
                    "clustered" => fixtures::clustered(&mut rng, 100, 40, 3),
                    "tree" => fixtures::polygon_tree(&mut rng, 10),
                    other => bail!("unknown fixture family `{other}` (expected `clustered` or `tree`)"),
                }
            }
        };
        let cfg = PipelineConfig {
            seed,
            baseline: true,
            emit_scales: EmitScales::List(vec![0]),
            ..base.clone()
        };
        let dir = run.out_dir.map(|d| d.join(format!("run_{i}")));
        let out = run_pipeline(&h, &cfg, dir.as_deref())?;
        let multi = out.manifest.scales[0].overlap.clone().context("input scale was not measured")?;
        let single = out.manifest.baseline.as_ref().context("baseline missing")?.overlap.clone();
        info!(
            "run {i}: multi-scale {} pairs / {:.4}, single-scale {} pairs / {:.4}",
            multi.pair_count, multi.total_area, single.pair_count, single.total_area
        );
        mc.push(multi.pair_count as f64);
        bc.push(single.pair_count as f64);
        ma.push(multi.total_area);
        ba.push(single.total_area);
        rows.push(json!({
            "seed": seed,
            "vertices": h.num_vertices(),
            "hyperedges": h.num_hyperedges(),
            "operations": out.manifest.scales.len() - 1,
            "multi_scale": { "pair_count": multi.pair_count, "total_area": multi.total_area },
            "single_scale": { "pair_count": single.pair_count, "total_area": single.total_area },
            "runtime_seconds": out.manifest.runtime_seconds,
        }));
    }
    Ok(json!({
        "runs": rows,
        "median": {
            "multi_scale": { "pair_count": median(mc), "total_area": median(ma) },
            "single_scale": { "pair_count": median(bc), "total_area": median(ba) },
        },
    }))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Stats { input, t, output } => emit(&stats(&input.read()?, t)?, output.as_deref()),
        Command::Planarity { input, output } => {
            let report = PlanarityReport::compute(&input.read()?)?;
            emit(&serde_json::to_value(report)?, output.as_deref())
        }
        Command::Simplify {
            input,
            settings,
            output,
        } => {
            let h = input.read()?;
            let cfg = settings.resolve()?;
            let m = SimplifyManifest::run(&h, &cfg.simplify_config())?;
            info!("{} operations, stop reason {:?}", m.operations.len(), m.stop_reason);
            emit(&serde_json::to_value(m)?, output.as_deref())
        }
        Command::Layout {
            scales,
            settings,
            out_dir,
        } => layout_command(&scales, &settings.resolve()?, &out_dir),
        Command::Metrics {
            input,
            layout,
            settings,
            output,
        } => {
            let h = input.read()?;
            let l = io::read_layout(&layout)?;
            let report = overlap_report(&h, &l, &settings.resolve()?.metrics_config())?;
            emit(&serde_json::to_value(report)?, output.as_deref())
        }
        Command::Render {
            input,
            layout,
            settings,
            output,
        } => {
            let h = input.read()?;
            let l = io::read_layout(&layout)?;
            let svg = render_svg(&h, &l, &settings.resolve()?.render_style())?;
            fs::write(&output, svg).with_context(|| format!("writing {}", output.display()))
        }
        Command::Pipeline {
            input,
            settings,
            out_dir,
        } => {
            let h = input.read()?;
            let cfg = settings.resolve()?;
            let out = run_pipeline(&h, &cfg, Some(&out_dir))?;
            info!(
                "{} scales in {:.2} s, manifest at {}",
                out.manifest.scales.len(),
                out.manifest.runtime_seconds,
                out_dir.join(pipeline::MANIFEST_FILE).display()
            );
            Ok(())
        }
        Command::Bench {
            input,
            format,
            generate,
            runs,
            settings,
            out_dir,
            output,
        } => {
            let h = input.as_deref().map(|p| io::parse_input(p, format)).transpose()?;
            let run = BenchRun {
                input: h.as_ref(),
                family: &generate,
                runs,
                out_dir: out_dir.as_deref(),
            };
            emit(&bench(run, &settings.resolve()?)?, output.as_deref())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
