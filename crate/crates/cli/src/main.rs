mod config;
mod eval;
mod stages;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use accord_core::corpus::{Lexicon, WindowSizes};
use accord_core::extraction::{ExtractionRecord, ExtractorBackend, RelationType, RemoteScorerConfig};
use accord_core::generation::{DescriptionRecord, GeneratorBackend, RelationRouting, RemoteGeneratorConfig};
use accord_core::io::write_jsonl;
use accord_core::pipeline::{DemarcatedItem, Provenance};
use accord_service::DescriptionIndex;
use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{existing, provenance_path, required, PipelineConfig};

#[derive(Debug, Parser)]
#[command(name = "accord", version, about = "Build and serve description sets for scientific concepts")]
struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every stochastic component.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel stages (default: number of processors).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExtractBackendArg {
    Rule,
    Remote,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenBackendArg {
    Template,
    Remote,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RoutingArg {
    AllPredicted,
    TopScore,
}

#[derive(Debug, Args)]
struct LexiconArgs {
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Minimum lexicon score kept (default 1.0).
    #[arg(long)]
    min_score: Option<f64>,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long, value_enum)]
    backend: Option<ExtractBackendArg>,
    #[arg(long)]
    binary_threshold: Option<f64>,
    #[arg(long)]
    relation_threshold: Option<f64>,
    /// Classifier endpoint for the remote backend.
    #[arg(long)]
    scorer_endpoint: Option<String>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    gen_backend: Option<GenBackendArg>,
    #[arg(long, value_enum)]
    routing: Option<RoutingArg>,
    /// Let the reference occur inside the target mention.
    #[arg(long)]
    relax_reference: bool,
    /// Few-shot exemplar bank (JSON Lines); the bundled bank is used otherwise.
    #[arg(long)]
    exemplars: Option<PathBuf>,
    /// Completion endpoint for the remote backend.
    #[arg(long)]
    generator_endpoint: Option<String>,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated relations, in output order (default compare,is-a).
    #[arg(long)]
    relations: Option<String>,
    #[arg(long)]
    set_size_cap: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split the corpus into candidate contexts and demarcate each target.
    Ingest {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[command(flatten)]
        lexicon: LexiconArgs,
        /// Comma-separated window sizes from {1, 2}.
        #[arg(long)]
        window_sizes: Option<String>,
        /// Demarcated items (JSON Lines); context provenance goes to the sidecar file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify demarcated items: description or not, then relation types.
    Extract {
        #[arg(long)]
        items: PathBuf,
        #[command(flatten)]
        lexicon: LexiconArgs,
        #[command(flatten)]
        extract: ExtractArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        failures_out: Option<PathBuf>,
    },
    /// Generate, parse and filter descriptions for every positive item.
    Generate {
        #[arg(long)]
        extractions: PathBuf,
        #[command(flatten)]
        lexicon: LexiconArgs,
        #[command(flatten)]
        generate: GenerateArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        rejected_out: Option<PathBuf>,
        #[arg(long)]
        failures_out: Option<PathBuf>,
    },
    /// Build one stratified description set per target.
    Select {
        #[arg(long)]
        descriptions: PathBuf,
        #[command(flatten)]
        lexicon: LexiconArgs,
        #[command(flatten)]
        select: SelectArgs,
        /// Context provenance from `ingest`; when given, the rows the sets use are written next to the output.
        #[arg(long)]
        provenance: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Annotation corpus statistics and validation.
    Stats {
        #[arg(long)]
        annotations: PathBuf,
        #[command(flatten)]
        lexicon: LexiconArgs,
        #[arg(long)]
        relax_reference: bool,
    },
    /// Agreement, classification and preference statistics.
    Eval {
        #[command(subcommand)]
        command: eval::EvalCommand,
    },
    /// Serve the read-only description API.
    Serve {
        /// Sets file; provenance is read from its sidecar unless given.
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        provenance: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        port: Option<u16>,
        /// Built UI bundle served under `/`.
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
    /// Run ingest, extract, generate and select in sequence.
    Pipeline {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[command(flatten)]
        lexicon: LexiconArgs,
        #[arg(long)]
        window_sizes: Option<String>,
        #[command(flatten)]
        extract: ExtractArgs,
        #[command(flatten)]
        generate: GenerateArgs,
        #[command(flatten)]
        select: SelectArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep intermediate files here.
        #[arg(long)]
        work_dir: Option<PathBuf>,
    },
}

fn parse_window_sizes(raw: &str) -> anyhow::Result<WindowSizes> {
    let sizes = raw
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| anyhow!("bad window size {s:?}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(WindowSizes::new(sizes)?)
}

fn parse_relations(raw: &str) -> anyhow::Result<Vec<RelationType>> {
    raw.split(',').map(|s| s.parse::<RelationType>().map_err(anyhow::Error::from)).collect()
}

impl LexiconArgs {
    fn apply(&self, cfg: &mut PipelineConfig) {
        if let Some(s) = self.min_score {
            cfg.min_score = s;
        }
        if self.lexicon.is_some() {
            cfg.paths.lexicon = self.lexicon.clone();
        }
    }
}

impl ExtractArgs {
    fn apply(&self, cfg: &mut PipelineConfig) {
        let e = &mut cfg.extraction;
        if let Some(b) = self.backend {
            e.backend = match b {
                ExtractBackendArg::Rule => ExtractorBackend::Rule,
                ExtractBackendArg::Remote => ExtractorBackend::Remote,
            };
        }
        if let Some(t) = self.binary_threshold {
            e.binary_threshold = t;
        }
        if let Some(t) = self.relation_threshold {
            e.relation_threshold = t;
        }
        if let Some(endpoint) = &self.scorer_endpoint {
            e.remote.get_or_insert_with(RemoteScorerConfig::default).endpoint = endpoint.clone();
        }
    }
}

impl GenerateArgs {
    fn apply(&self, cfg: &mut PipelineConfig) {
        let g = &mut cfg.generation;
        if let Some(b) = self.gen_backend {
            g.backend = match b {
                GenBackendArg::Template => GeneratorBackend::Template,
                GenBackendArg::Remote => GeneratorBackend::Remote,
            };
        }
        if let Some(r) = self.routing {
            g.routing = match r {
                RoutingArg::AllPredicted => RelationRouting::AllPredicted,
                RoutingArg::TopScore => RelationRouting::TopScore,
            };
        }
        if self.relax_reference {
            g.relax_reference = true;
        }
        if let Some(endpoint) = &self.generator_endpoint {
            g.remote.get_or_insert_with(RemoteGeneratorConfig::default).endpoint = endpoint.clone();
        }
        if self.exemplars.is_some() {
            cfg.paths.exemplars = self.exemplars.clone();
        }
    }
}

impl SelectArgs {
    fn apply(&self, cfg: &mut PipelineConfig) -> anyhow::Result<()> {
        let s = &mut cfg.selection;
        if let Some(k) = self.k {
            s.k = k;
        }
        if let Some(r) = &self.relations {
            s.relations = parse_relations(r)?;
        }
        if self.set_size_cap.is_some() {
            s.set_size_cap = self.set_size_cap;
        }
        Ok(())
    }
}

/// Lexicon from flags/config, required only when `needed`.
fn optional_lexicon(cfg: &PipelineConfig, needed: bool) -> anyhow::Result<Option<Lexicon>> {
    match &cfg.paths.lexicon {
        Some(p) => Ok(Some(stages::lexicon(&existing(p.clone())?, cfg.min_score)?)),
        None if needed => Err(anyhow!("missing --lexicon (or paths.lexicon in the config file)")),
        None => Ok(None),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = PipelineConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global().context("configuring worker threads")?;
    }
    match cli.command {
        Command::Ingest { corpus, lexicon, window_sizes, out } => {
            lexicon.apply(&mut cfg);
            if let Some(w) = window_sizes {
                cfg.window_sizes = parse_window_sizes(&w)?;
            }
            let corpus = existing(required(&corpus, &cfg.paths.corpus, "corpus")?)?;
            let lex = optional_lexicon(&cfg, true)?.expect("required");
            let ingested = stages::ingest(&corpus, &lex, &cfg.window_sizes)?;
            write_jsonl(&out, &ingested.items)?;
            write_jsonl(provenance_path(&out), &ingested.provenance)?;
        }
        Command::Extract { items, lexicon, extract, out, failures_out } => {
            lexicon.apply(&mut cfg);
            extract.apply(&mut cfg);
            let lex = optional_lexicon(&cfg, cfg.extraction.backend == ExtractorBackend::Rule)?;
            let extractor = stages::extractor(&cfg.extraction, lex.as_ref())?;
            let items: Vec<DemarcatedItem> = stages::read(&existing(items)?)?;
            let outcome = stages::extract(&items, extractor.as_ref(), failures_out.as_deref())?;
            write_jsonl(&out, &outcome.records)?;
        }
        Command::Generate { extractions, lexicon, generate, out, rejected_out, failures_out } => {
            lexicon.apply(&mut cfg);
            generate.apply(&mut cfg);
            let lex = optional_lexicon(&cfg, cfg.generation.backend == GeneratorBackend::Template)?;
            let generator = stages::generator(&cfg.generation, lex.as_ref(), cfg.paths.exemplars.as_deref())?;
            let records: Vec<ExtractionRecord> = stages::read(&existing(extractions)?)?;
            let outcome =
                stages::generate(records, generator.as_ref(), &cfg.generation, rejected_out.as_deref(), failures_out.as_deref())?;
            write_jsonl(&out, &outcome.descriptions)?;
        }
        Command::Select { descriptions, lexicon, select, provenance, out } => {
            lexicon.apply(&mut cfg);
            select.apply(&mut cfg)?;
            let lex = optional_lexicon(&cfg, true)?.expect("required");
            let descs: Vec<DescriptionRecord> = stages::read(&existing(descriptions)?)?;
            let prov: Option<Vec<Provenance>> = match provenance {
                Some(p) => Some(stages::read(&existing(p)?)?),
                None => None,
            };
            let (sets, set_prov) = stages::select(&descs, &lex, &cfg.selection, prov.as_deref())?;
            stages::write_sets(&out, &sets, set_prov.as_deref())?;
        }
        Command::Stats { annotations, lexicon, relax_reference } => {
            lexicon.apply(&mut cfg);
            let lex = optional_lexicon(&cfg, false)?.unwrap_or_default();
            print_json(&eval::stats(&existing(annotations)?, &lex, relax_reference)?)?;
        }
        Command::Eval { command } => print_json(&eval::run(&command, cfg.seed)?)?,
        Command::Serve { data, provenance, host, port, static_dir } => {
            let prov = provenance.unwrap_or_else(|| provenance_path(&data));
            let index = DescriptionIndex::load(existing(data)?, existing(prov)?)?;
            serve(index, &host, port.unwrap_or(cfg.port), static_dir)?;
        }
        Command::Pipeline { corpus, lexicon, window_sizes, extract, generate, select, out, work_dir } => {
            lexicon.apply(&mut cfg);
            extract.apply(&mut cfg);
            generate.apply(&mut cfg);
            select.apply(&mut cfg)?;
            if let Some(w) = window_sizes {
                cfg.window_sizes = parse_window_sizes(&w)?;
            }
            if work_dir.is_some() {
                cfg.paths.work_dir = work_dir;
            }
            let corpus = existing(required(&corpus, &cfg.paths.corpus, "corpus")?)?;
            let out = required(&out, &cfg.paths.out, "out")?;
            run_pipeline(&cfg, &corpus, &out)?;
        }
    }
    Ok(())
}

fn run_pipeline(cfg: &PipelineConfig, corpus: &Path, out: &Path) -> anyhow::Result<()> {
    let lex = optional_lexicon(cfg, true)?.expect("required");
    // Build both backends first so configuration errors surface before any work.
    let extractor = stages::extractor(&cfg.extraction, Some(&lex))?;
    let generator = stages::generator(&cfg.generation, Some(&lex), cfg.paths.exemplars.as_deref())?;
    let work = cfg.paths.work_dir.as_deref().map(stages::WorkFiles::new);

    let ingested = stages::ingest(corpus, &lex, &cfg.window_sizes)?;
    if let Some(w) = &work {
        write_jsonl(&w.items, &ingested.items)?;
        write_jsonl(&w.provenance, &ingested.provenance)?;
    }
    let extracted = stages::extract(&ingested.items, extractor.as_ref(), work.as_ref().map(|w| w.extract_failures.as_path()))?;
    if let Some(w) = &work {
        write_jsonl(&w.extractions, &extracted.records)?;
    }
    let generated = stages::generate(
        extracted.records,
        generator.as_ref(),
        &cfg.generation,
        work.as_ref().map(|w| w.rejected.as_path()),
        work.as_ref().map(|w| w.generate_failures.as_path()),
    )?;
    if let Some(w) = &work {
        write_jsonl(&w.descriptions, &generated.descriptions)?;
    }
    let (sets, set_prov) = stages::select(&generated.descriptions, &lex, &cfg.selection, Some(&ingested.provenance))?;
    stages::write_sets(out, &sets, set_prov.as_deref())?;
    Ok(())
}

fn serve(index: DescriptionIndex, host: &str, port: u16, static_dir: Option<PathBuf>) -> anyhow::Result<()> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port)).await.with_context(|| format!("binding {host}:{port}"))?;
        let addr = listener.local_addr()?;
        println!("listening on http://{addr}");
        std::io::stdout().flush()?;
        let concepts = index.len();
        log::info!("serving {concepts} concepts");
        let app = accord_service::router(Arc::new(index), static_dir);
        accord_service::serve(listener, app).await?;
        Ok(())
    })
}

fn print_json(value: &serde_json::Value) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
