//! Command-line pipeline: `gen-dataset → gen-corpus → train → predict →
//! search → reevaluate`, plus the stand-alone evaluation steps.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use transit_robust_core::features::{extract, FeatureLayout};
use transit_robust_core::generate::{
    default_variants, gen_corpus, gen_dataset, CorpusConfig, DatasetSpec, ScheduleStrategy, TimetableStrategy,
    Topology,
};
use transit_robust_core::rng::mix;
use transit_robust_core::robustness::{evaluate, normalize, normalize_against, RobustnessTest};
use transit_robust_core::search::{local_search, reevaluate_real, SearchTrace};
use transit_robust_core::simulation::{simulate, RouteStatus};
use transit_robust_core::surrogate::{
    feature_importance, leave_one_out_study, split_rows, train, LabelKind,
};
use transit_robust_core::Instance;

use crate::error::{Error, Result};
use crate::io::config::RunConfig;
use crate::io::dataset::{read_dataset, write_dataset};
use crate::io::instance::{read_instance, write_instance};
use crate::io::model::{read_model, write_model};
use crate::io::scenario::read_scenarios;
use crate::io::tables::{
    read_features, read_labels, read_layout, read_robustness, read_solutions, write_features, write_history,
    write_labels, write_layout, write_robustness, write_solutions, write_trace, write_trace_real, RealSummary,
    Table, LABEL_COLUMNS,
};
use crate::io::{format_f64, write_csv, write_json};
use crate::manifest::ManifestBuilder;

pub const THREADS_ENV: &str = "TRANSIT_ROBUST_THREADS";

/// Exit status for malformed command lines.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "transit-robust", version, about = "Robustness evaluation and surrogate-guided slack search")]
struct Cli {
    /// Worker threads; falls back to $TRANSIT_ROBUST_THREADS, then to the
    /// number of CPUs. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    Grid,
    Ring,
}

#[derive(Debug, Args)]
struct ConfigArg {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ConfigArg {
    fn load(&self) -> Result<RunConfig> {
        match &self.config {
            Some(p) => RunConfig::read(p),
            None => Ok(RunConfig::default()),
        }
    }
}

/// Overrides of the preset's shape.
#[derive(Debug, Args)]
struct SizeArgs {
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    rings: Option<usize>,
    #[arg(long)]
    spokes: Option<usize>,
    #[arg(long)]
    lines: Option<usize>,
    /// Passenger groups.
    #[arg(long)]
    groups: Option<usize>,
}

impl SizeArgs {
    fn apply(&self, spec: &mut DatasetSpec) -> Result<()> {
        match &mut spec.topology {
            Topology::Grid { rows, cols } => {
                if self.rings.is_some() || self.spokes.is_some() {
                    return Err(Error::Invalid("--rings/--spokes need --preset ring".into()));
                }
                *rows = self.rows.unwrap_or(*rows);
                *cols = self.cols.unwrap_or(*cols);
            }
            Topology::Ring { rings, spokes } => {
                if self.rows.is_some() || self.cols.is_some() {
                    return Err(Error::Invalid("--rows/--cols need --preset grid".into()));
                }
                *rings = self.rings.unwrap_or(*rings);
                *spokes = self.spokes.unwrap_or(*spokes);
            }
        }
        spec.lines.count = self.lines.unwrap_or(spec.lines.count);
        spec.demand.groups = self.groups.unwrap_or(spec.demand.groups);
        Ok(())
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an artificial dataset directory.
    GenDataset {
        #[arg(long, value_enum, default_value = "grid")]
        preset: Preset,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Periods rolled out per instance.
        #[arg(long)]
        horizon: Option<u32>,
        #[command(flatten)]
        size: SizeArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate and label a corpus of timetable/schedule variants.
    GenCorpus {
        #[arg(long)]
        dataset: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Instances per random variant; overrides the config.
        #[arg(long)]
        replicates: Option<usize>,
        /// Also write every instance directory below `OUT/instances`.
        #[arg(long)]
        write_instances: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the four robustness tests; one row of raw values per instance.
    Evaluate {
        #[arg(long, required = true)]
        instance: Vec<PathBuf>,
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        out: PathBuf,
        /// Per-simulation aggregates.
        #[arg(long)]
        breakdown: Option<PathBuf>,
    },
    /// Scale raw robustness values so the worst instance per test is 100.
    Normalize {
        #[arg(long)]
        robustness: PathBuf,
        /// Scale against these maxima instead of the column maxima.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Write the maxima used.
        #[arg(long)]
        reference_out: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute key-feature vectors of instances.
    ExtractFeatures {
        #[arg(long, required = true)]
        instance: Vec<PathBuf>,
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        layout: Option<PathBuf>,
    },
    /// Train the robustness oracle.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Normalization maxima of the labels, stored with the model.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// The labels are raw robustness values.
        #[arg(long)]
        raw_labels: bool,
        #[arg(long, default_value = "")]
        dataset_id: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        history: Option<PathBuf>,
    },
    /// Predict the four robustness values for every feature row.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Importance of the nine feature groups from first-layer weights.
    Importance {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        layout: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Retrain without each feature group and compare test errors.
    Ablate {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        layout: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Feature groups to drop one at a time (default: all nine).
        #[arg(long, value_delimiter = ',')]
        groups: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Surrogate-guided slack injection.
    Search {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the real robustness tests on every solution a search visited.
    Reevaluate {
        /// The instance the search started from.
        #[arg(long)]
        instance: PathBuf,
        /// Output directory of `search`.
        #[arg(long)]
        search: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        /// Maxima to put real values on the oracle's label scale; defaults
        /// to the reference stored in the model, if any.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate delay scenarios from a JSON-lines file.
    Simulate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        scenarios: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        out: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::GenDataset { .. } => "gen-dataset",
            Command::GenCorpus { .. } => "gen-corpus",
            Command::Evaluate { .. } => "evaluate",
            Command::Normalize { .. } => "normalize",
            Command::ExtractFeatures { .. } => "extract-features",
            Command::Train { .. } => "train",
            Command::Predict { .. } => "predict",
            Command::Importance { .. } => "importance",
            Command::Ablate { .. } => "ablate",
            Command::Search { .. } => "search",
            Command::Reevaluate { .. } => "reevaluate",
            Command::Simulate { .. } => "simulate",
        }
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = match resolve_threads(cli.threads, std::env::var(THREADS_ENV).ok().as_deref()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {threads} worker threads: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(cli.command, threads)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn resolve_threads(flag: Option<usize>, env: Option<&str>) -> std::result::Result<usize, String> {
    let n = match (flag, env) {
        (Some(n), _) => n,
        (None, Some(v)) => v.trim().parse().map_err(|_| format!("{THREADS_ENV}={v:?} is not a thread count"))?,
        (None, None) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    if n == 0 {
        return Err("thread count must be >= 1".into());
    }
    Ok(n)
}

/// `manifest.json` inside an output directory, or `<file>.manifest.json`
/// next to an output file.
fn manifest_path(out: &Path, is_dir: bool) -> PathBuf {
    if is_dir {
        out.join("manifest.json")
    } else {
        let mut s = out.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }
}

fn instance_id(dir: &Path) -> String {
    dir.file_name().map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn load_routed(dir: &Path, cfg: &RunConfig) -> Result<Instance> {
    let mut inst = read_instance(dir)?;
    if !inst.has_routes() {
        inst.plan_routes(&cfg.weights());
    }
    Ok(inst)
}

fn read_reference(path: &Path) -> Result<[f64; 4]> {
    let t = read_robustness(path)?;
    match t.quads()?.as_slice() {
        [r] => Ok(*r),
        _ => Err(Error::format(path, "reference file must hold exactly one row")),
    }
}

fn write_reference(path: &Path, reference: &[f64; 4]) -> Result<()> {
    let mut t = Table::new();
    t.push("reference", reference.to_vec());
    write_robustness(path, &t)
}

fn dispatch(command: Command, threads: usize) -> Result<()> {
    let name = command.name();
    match command {
        Command::GenDataset { preset, seed, horizon, size, out } => {
            let mut spec = match preset {
                Preset::Grid => DatasetSpec::grid(),
                Preset::Ring => DatasetSpec::ring(),
            };
            spec.seed = seed;
            if let Some(k) = horizon {
                spec.params.horizon = k;
            }
            size.apply(&mut spec)?;
            let mut m = ManifestBuilder::new(name, String::new(), threads);
            m.seed("dataset", seed);
            let d = gen_dataset(&spec)?;
            write_dataset(&out, &d)?;
            m.phase("generate");
            eprintln!(
                "{} stations, {} edges, {} lines, {} groups ({} passengers)",
                d.station_count(),
                d.edge_count(),
                d.lines.len(),
                d.groups.len(),
                d.total_passengers()
            );
            m.finish(&manifest_path(&out, true))?;
        }

        Command::GenCorpus { dataset, config, seed, replicates, write_instances, out } => {
            let cfg = config.load()?;
            let mut m = ManifestBuilder::new(name, cfg.to_toml(), threads);
            m.input(&dataset)?;
            m.seed("variants", seed);
            m.seed("robustness", cfg.master_seed);
            let d = Arc::new(read_dataset(&dataset)?);
            let variants = default_variants(seed);
            let corpus = CorpusConfig {
                replicates: replicates.unwrap_or(cfg.replicates),
                robustness: cfg.robustness()?,
                caps: cfg.caps(),
                chunk: cfg.chunk,
            };
            if corpus.replicates == 0 {
                return Err(Error::Invalid("replicates must be >= 1".into()));
            }
            let layout = FeatureLayout::new(d.station_count(), d.edge_count(), corpus.caps);
            let mut raw = Table::new();
            let mut features = Table::new();
            let mut index_rows: Vec<Vec<String>> = Vec::new();
            let total: usize = variants.iter().map(|v| v.instances(corpus.replicates)).sum();
            let started = Instant::now();
            let mut io_error = None;
            gen_corpus(&d, &variants, &corpus, |e, inst| {
                let id = format!("i{:05}", e.index);
                if write_instances {
                    if let Err(err) = write_instance(&out.join("instances").join(&id), inst) {
                        io_error = Some(err);
                        return Err(transit_robust_core::Error::InvalidConfig("aborted".into()));
                    }
                }
                let v = &variants[e.variant];
                index_rows.push(vec![
                    id.clone(),
                    e.variant.to_string(),
                    e.replicate.to_string(),
                    v.base.to_string(),
                    e.seed.to_string(),
                    timetable_name(v.timetable),
                    schedule_name(v.schedule),
                ]);
                raw.push(id.clone(), e.raw.to_vec());
                features.push(id, e.features);
                if (e.index + 1) % 100 == 0 || e.index + 1 == total {
                    eprintln!("labeled {}/{total} ({:.0?})", e.index + 1, started.elapsed());
                }
                Ok(())
            })
            .map_err(|e| io_error.take().unwrap_or(Error::Core(e)))?;
            m.phase("label");
            let norm = normalize(&raw.quads()?)?;
            for t in &norm.zero_columns {
                eprintln!("warning: {t:?} is zero on every instance; its labels are 0");
            }
            let labels = Table { ids: raw.ids.clone(), rows: norm.values.iter().map(|v| v.to_vec()).collect() };
            write_robustness(&out.join("robustness.csv"), &raw)?;
            write_labels(&out.join("labels.csv"), &labels)?;
            write_reference(&out.join("reference.csv"), &norm.reference)?;
            write_features(&out.join("features.csv"), &layout, &features)?;
            write_layout(&out.join("layout.json"), &layout)?;
            write_csv(
                &out.join("corpus.csv"),
                &["instance_id", "variant", "replicate", "base", "seed", "timetable", "schedule"],
                &index_rows,
            )?;
            m.phase("write");
            m.finish(&manifest_path(&out, true))?;
        }

        Command::Evaluate { instance, config, out, breakdown } => {
            let cfg = config.load()?;
            let rc = cfg.robustness()?;
            let mut m = ManifestBuilder::new(name, cfg.to_toml(), threads);
            m.seed("robustness", rc.master_seed);
            let mut table = Table::new();
            let mut detail: Vec<Vec<String>> = Vec::new();
            for dir in &instance {
                m.input(dir)?;
                let inst = load_routed(dir, &cfg)?;
                let report = evaluate(&inst, &rc)?;
                let id = instance_id(dir);
                for r in &report.breakdown {
                    detail.push(vec![id.clone(), test_name(r.test).into(), r.index.to_string(), r.aggregate.to_string()]);
                }
                table.push(id, report.raw.to_vec());
            }
            m.phase("evaluate");
            write_robustness(&out, &table)?;
            if let Some(p) = breakdown {
                write_csv(&p, &["instance_id", "test", "index", "aggregate"], &detail)?;
            }
            m.finish(&manifest_path(&out, false))?;
        }

        Command::Normalize { robustness, reference, reference_out, out } => {
            let mut m = ManifestBuilder::new(name, String::new(), threads);
            m.input(&robustness)?;
            let raw = read_robustness(&robustness)?;
            let quads = raw.quads()?;
            let (values, maxima) = match &reference {
                Some(p) => {
                    m.input(p)?;
                    let r = read_reference(p)?;
                    (normalize_against(&quads, &r), r)
                }
                None => {
                    let n = normalize(&quads)?;
                    for t in &n.zero_columns {
                        eprintln!("warning: {t:?} is zero on every instance; its labels are 0");
                    }
                    (n.values, n.reference)
                }
            };
            let labels = Table { ids: raw.ids.clone(), rows: values.iter().map(|v| v.to_vec()).collect() };
            write_labels(&out, &labels)?;
            if let Some(p) = reference_out {
                write_reference(&p, &maxima)?;
            }
            m.finish(&manifest_path(&out, false))?;
        }

        Command::ExtractFeatures { instance, config, out, layout } => {
            let cfg = config.load()?;
            let mut m = ManifestBuilder::new(name, cfg.to_toml(), threads);
            let mut table = Table::new();
            let mut first_layout: Option<FeatureLayout> = None;
            for dir in &instance {
                m.input(dir)?;
                let inst = load_routed(dir, &cfg)?;
                let l = FeatureLayout::for_instance(&inst, cfg.caps());
                match first_layout {
                    Some(f) if f != l => {
                        return Err(Error::Invalid(format!(
                            "{} has a different feature layout than {}",
                            dir.display(),
                            instance[0].display()
                        )))
                    }
                    _ => first_layout = Some(l),
                }
                table.push(instance_id(dir), extract(&inst, &cfg.caps(), &cfg.weights())?);
            }
            let l = first_layout.expect("at least one instance");
            write_features(&out, &l, &table)?;
            if let Some(p) = layout {
                write_layout(&p, &l)?;
            }
            m.finish(&manifest_path(&out, false))?;
        }

        Command::Train {
            features,
            labels,
            config,
            depth,
            width,
            seed,
            reference,
            raw_labels,
            dataset_id,
            out,
            history,
        } => {
            let cfg = config.load()?;
            let mut tc = cfg.train();
            tc.depth = depth.unwrap_or(tc.depth);
            tc.width = width.unwrap_or(tc.width);
            tc.seed = seed;
            let mut m = ManifestBuilder::new(name, cfg.to_toml(), threads);
            m.input(&features)?;
            m.input(&labels)?;
            m.seed("train", seed);
            let x = read_features(&features)?;
            let y = x.align(&read_labels(&labels)?, "labels")?;
            let trained = train(&x.matrix()?, &y.matrix()?, &tc)?;
            m.phase("train");
            let mut model = trained.model;
            model.meta.dataset_id = dataset_id;
            model.meta.caps = cfg.caps();
            model.meta.labels = if raw_labels { LabelKind::Raw } else { LabelKind::Normalized };
            if let Some(p) = &reference {
                m.input(p)?;
                model.meta.reference = Some(read_reference(p)?);
            }
            write_model(&out, &model)?;
            if let Some(p) = history {
                write_history(&p, &trained.history)?;
            }
            if let Some(last) = trained.history.last() {
                eprintln!("{} epochs, train loss {:.4}, validation loss {:.4}", last.epoch, last.train_loss, last.val_loss);
            }
            m.finish(&manifest_path(&out, false))?;
        }

        Command::Predict { model, features, out } => {
            let started = Instant::now();
            let model = read_model(&model)?;
            let x = read_features(&features)?;
            let pred = model.predict_batch(&x.matrix()?)?;
            let t = Table { ids: x.ids.clone(), rows: pred.iter_rows().map(<[f64]>::to_vec).collect() };
            match out {
                Some(p) => write_labels(&p, &t)?,
                None => {
                    println!("instance_id,{}", LABEL_COLUMNS.join(","));
                    for (id, row) in t.ids.iter().zip(&t.rows) {
                        let cells: Vec<String> = row.iter().map(|v| format_f64(*v)).collect();
                        println!("{id},{}", cells.join(","));
                    }
                }
            }
            eprintln!("predicted {} rows in {:.1?}", t.len(), started.elapsed());
        }

        Command::Importance { model, layout, out } => {
            let model = read_model(&model)?;
            let layout = read_layout(&layout)?;
            let imp = feature_importance(&model, &layout)?;
            let rows: Vec<(String, String)> =
                imp.iter().enumerate().map(|(i, v)| (format!("F{}", i + 1), format_f64(*v))).collect();
            match out {
                Some(p) => write_csv(&p, &["feature", "importance"], &rows)?,
                None => {
                    println!("feature,importance");
                    for (f, v) in rows {
                        println!("{f},{v}");
                    }
                }
            }
        }

        Command::Ablate { features, labels, layout, config, seed, groups, out } => {
            let cfg = config.load()?;
            let mut tc = cfg.train();
            tc.seed = seed;
            let mut m = ManifestBuilder::new(name, cfg.to_toml(), threads);
            m.input(&features)?;
            m.input(&labels)?;
            m.seed("train", seed);
            let layout = read_layout(&layout)?;
            let x = read_features(&features)?;
            let y = x.align(&read_labels(&labels)?, "labels")?;
            let (x, y) = (x.matrix()?, y.matrix()?);
            let (rest, test) = split_rows(x.rows(), cfg.test_fraction, mix(seed, 3));
            let groups = if groups.is_empty() { (1..=FeatureLayout::GROUPS).collect() } else { groups };
            if let Some(g) = groups.iter().find(|g| !(1..=FeatureLayout::GROUPS).contains(g)) {
                return Err(Error::Invalid(format!("feature group {g} is not in 1..=9")));
            }
            let mut removals = vec![None];
            removals.extend(groups.into_iter().map(Some));
            let results = leave_one_out_study(
                &x.select_rows(&rest),
                &y.select_rows(&rest),
                &x.select_rows(&test),
                &y.select_rows(&test),
                &layout,
                &tc,
                &removals,
            )?;
            m.phase("ablate");
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|r| {
                    let mut row = vec![r.removed.map_or("none".to_string(), |g| format!("F{g}"))];
                    row.push(format_f64(r.report.overall_mae));
                    row.extend(r.report.mae.iter().map(|v| format_f64(*v)));
                    row.push(format_f64(r.report.within_1));
                    row.push(format_f64(r.report.within_5));
                    row
                })
                .collect();
            write_csv(
                &out,
                &["removed", "mae", "mae_rt1", "mae_rt2", "mae_rt3", "mae_rt4", "within_1", "within_5"],
                &rows,
            )?;
            m.finish(&manifest_path(&out, false))?;
        }

        Command::Search { instance, model, config, out } => {
            let cfg = config.load()?;
            let mut m = ManifestBuilder::new(name, cfg.to_toml(), threads);
            m.input(&instance)?;
            m.input(&model)?;
            let start = load_routed(&instance, &cfg)?;
            let model = read_model(&model)?;
            let mut sc = cfg.search();
            sc.caps = model.meta.caps;
            let trace = local_search(&start, &model, &sc)?;
            m.phase("search");
            write_instance(&out.join("solution"), &trace.solution)?;
            write_trace(&out.join("trace.csv"), &trace.records)?;
            write_solutions(&out.join("solutions.csv"), &trace.solutions)?;
            let first = sc.score(&trace.start_estimate);
            let last = sc.score(&trace.solutions.last().expect("start is recorded").estimate);
            eprintln!(
                "{} iterations, {} accepted, estimated objective {first:.3} -> {last:.3}",
                trace.records.len(),
                trace.solutions.len() - 1
            );
            m.finish(&manifest_path(&out, true))?;
        }

        Command::Reevaluate { instance, search, config, reference, model, out } => {
            let cfg = config.load()?;
            let rc = cfg.robustness()?;
            let mut m = ManifestBuilder::new(name, cfg.to_toml(), threads);
            m.input(&instance)?;
            let solutions_path = search.join("solutions.csv");
            m.input(&solutions_path)?;
            m.seed("robustness", rc.master_seed);
            let start = load_routed(&instance, &cfg)?;
            let solutions = read_solutions(&solutions_path)?;
            if let Some(bad) = solutions.iter().find(|s| s.times.len() != start.network.events.len()) {
                return Err(Error::Invalid(format!(
                    "solution of iteration {} has {} event times, the instance has {} events",
                    bad.iteration,
                    bad.times.len(),
                    start.network.events.len()
                )));
            }
            let reference = match (&reference, &model) {
                (Some(p), _) => Some(read_reference(p)?),
                (None, Some(p)) => read_model(p)?.meta.reference,
                (None, None) => None,
            };
            let first = solutions.first().ok_or_else(|| Error::Invalid("search trace is empty".into()))?;
            let trace = SearchTrace {
                start_estimate: first.estimate,
                start_utility: start.total_perceived_time(&cfg.weights()),
                records: Vec::new(),
                solutions: solutions.clone(),
                solution: start.clone(),
            };
            let series = reevaluate_real(&start, &trace, &rc, reference.as_ref(), &cfg.objective)?;
            m.phase("reevaluate");
            write_trace_real(&out, &series)?;
            let summary = RealSummary::from(&series);
            let mut s = out.as_os_str().to_owned();
            s.push(".summary.json");
            write_json(Path::new(&s), &summary)?;
            eprintln!(
                "estimated improvement {:.1}%, real improvement {:.1}%, final gap {:.3}",
                100.0 * summary.estimated_improvement,
                100.0 * summary.real_improvement,
                summary.final_gap
            );
            m.finish(&manifest_path(&out, false))?;
        }

        Command::Simulate { instance, scenarios, config, out } => {
            let cfg = config.load()?;
            let mut m = ManifestBuilder::new(name, cfg.to_toml(), threads);
            m.input(&instance)?;
            m.input(&scenarios)?;
            let inst = load_routed(&instance, &cfg)?;
            let scenarios = read_scenarios(&scenarios)?;
            let mut rows = Vec::with_capacity(scenarios.len());
            for (i, s) in scenarios.iter().enumerate() {
                s.validate(&inst)?;
                let o = simulate(&inst, s, &cfg.weights())?;
                let count = |st: RouteStatus| o.groups.iter().filter(|g| g.status == st).count();
                rows.push(vec![
                    i.to_string(),
                    o.aggregate.to_string(),
                    count(RouteStatus::Completed).to_string(),
                    count(RouteStatus::Rerouted).to_string(),
                    count(RouteStatus::Stranded).to_string(),
                ]);
            }
            write_csv(&out, &["scenario", "aggregate", "completed", "rerouted", "stranded"], &rows)?;
            m.finish(&manifest_path(&out, false))?;
        }
    }
    Ok(())
}

fn test_name(t: RobustnessTest) -> &'static str {
    match t {
        RobustnessTest::Rt1 => "rt1",
        RobustnessTest::Rt2 => "rt2",
        RobustnessTest::Rt3 => "rt3",
        RobustnessTest::Rt4 => "rt4",
    }
}

fn timetable_name(t: TimetableStrategy) -> String {
    match t {
        TimetableStrategy::EarliestFeasible => "earliest".into(),
        TimetableStrategy::RandomSlack(b) => format!("random-slack-{b}"),
        TimetableStrategy::UniformBuffer(b) => format!("uniform-buffer-{b}"),
    }
}

fn schedule_name(s: ScheduleStrategy) -> String {
    match s {
        ScheduleStrategy::FirstFit => "first-fit".into(),
        ScheduleStrategy::BufferedTurnaround(u32::MAX) => "one-vehicle-per-trip".into(),
        ScheduleStrategy::BufferedTurnaround(x) => format!("buffered-{x}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_resolution() {
        assert_eq!(resolve_threads(Some(3), Some("8")), Ok(3));
        assert_eq!(resolve_threads(None, Some("8")), Ok(8));
        assert!(resolve_threads(None, Some("many")).is_err());
        assert!(resolve_threads(Some(0), None).is_err());
        assert!(resolve_threads(None, None).unwrap() >= 1);
    }

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(run(["transit-robust", "evaluate", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["transit-robust", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["transit-robust", "--help"]), 0);
    }

    #[test]
    fn missing_input_exits_2() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("r.csv");
        let missing = dir.path().join("nope");
        let code = run([
            "transit-robust".as_ref(),
            "evaluate".as_ref(),
            "--instance".as_ref(),
            missing.as_os_str(),
            "--out".as_ref(),
            out.as_os_str(),
        ]);
        assert_eq!(code, 2);
    }

    #[test]
    fn manifest_paths() {
        assert_eq!(manifest_path(Path::new("a/b"), true), PathBuf::from("a/b/manifest.json"));
        assert_eq!(manifest_path(Path::new("a/r.csv"), false), PathBuf::from("a/r.csv.manifest.json"));
    }
}
