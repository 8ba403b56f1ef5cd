use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, Context};
use geometer_core::bench::{
    benchmark_report, load_query_library, read_runs, run_benchmark, BenchError, Clock, EngineClient, EngineSpec,
    FrozenClock, RunFilter, RunOptions, RunStore, StoreError, SystemClock, TimeWindow,
};
use geometer_core::content::{analyze_document, default_priors, priors_from_csv, Document, Lexicon};
use geometer_core::entity::{build_entity_graph, clarity_report, load_document};
use geometer_core::metrics::{parse_registries, visibility_report_with, BrandRegistry, PositionMode};
use geometer_core::transcript::{parse_plain_text, parse_timestamp, parse_transcript_file_with, TranscriptMeta};
use serde::Serialize;

use crate::args::{
    AnalyzeArgs, BenchCommand, BenchReportArgs, BenchRunArgs, Command, EntityArgs, Format, ScoreArgs,
};
use crate::settings::{CliConfig, Verbosity};
use crate::{Completed, Failure};

type Outcome = Result<Completed, Failure>;

pub fn dispatch(command: Command, config: &CliConfig) -> Outcome {
    match command {
        Command::Score(args) => score(args, config),
        Command::Analyze(args) => analyze(args, config),
        Command::Entity(args) => entity(args, config),
        Command::Bench(BenchCommand::Run(args)) => bench_run(args, config),
        Command::Bench(BenchCommand::Report(args)) => bench_report(args, config),
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .context("reading stdin")
            .map_err(Failure::runtime)?;
        return Ok(buf);
    }
    std::fs::read(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::invalid)
}

fn read_text(path: &Path) -> Result<String, Failure> {
    String::from_utf8(read_input(path)?)
        .map_err(|_| Failure::invalid(anyhow!("{} is not valid UTF-8", path.display())))
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") })
        .and_then(|_| out.flush())
        .context("writing output")
        .map_err(Failure::runtime)
}

fn emit_json<T: Serialize + ?Sized>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).context("encoding output").map_err(Failure::runtime)?;
    emit(&text)
}

fn load_registries(config: &CliConfig) -> Result<Vec<BrandRegistry>, Failure> {
    if config.brands.is_empty() {
        return Err(Failure::invalid(anyhow!(
            "no brand registry given; pass --brands or set `brands` in the config file"
        )));
    }
    let mut out = Vec::new();
    for path in &config.brands {
        let text = read_text(path)?;
        let registries = parse_registries(&text)
            .with_context(|| format!("invalid brand registry {}", path.display()))
            .map_err(Failure::invalid)?;
        out.extend(registries);
    }
    Ok(out)
}

fn position_mode(raw: bool) -> PositionMode {
    if raw {
        PositionMode::RawIndex
    } else {
        PositionMode::Normalized
    }
}

fn note(config: &CliConfig, message: impl AsRef<str>) {
    if config.verbosity >= Verbosity::Verbose {
        eprintln!("{}", message.as_ref());
    }
}

fn score(args: ScoreArgs, config: &CliConfig) -> Outcome {
    let mut registries = load_registries(config)?;
    if let Some(name) = &args.brand {
        registries.retain(|r| r.brand_name().eq_ignore_ascii_case(name));
        if registries.is_empty() {
            return Err(Failure::invalid(anyhow!("brand '{name}' is not in any registry")));
        }
    }
    let segmenter = config.analyzer.segmenter();
    let transcript = match (&args.transcript, &args.text, &args.sources) {
        (Some(path), _, _) => parse_transcript_file_with(&read_input(path)?, &segmenter)
            .with_context(|| format!("invalid transcript {}", path.display())),
        (None, Some(text_path), Some(sources_path)) => {
            let text = read_text(text_path)?;
            let sidecar = read_text(sources_path)?;
            let captured_at = match &args.captured_at {
                Some(t) => parse_timestamp(t).map_err(Failure::invalid)?,
                None => SystemClock.now(),
            };
            let meta = TranscriptMeta {
                query: args.query.clone(),
                engine_id: args.engine.clone(),
                captured_at,
            };
            parse_plain_text(&text, &sidecar, meta, &segmenter)
                .with_context(|| format!("invalid answer {}", text_path.display()))
        }
        _ => unreachable!("clap requires --transcript or --text with --sources"),
    }
    .map_err(Failure::invalid)?;
    note(
        config,
        format!("{} sentences, {} words", transcript.sentences.len(), transcript.total_word_count()),
    );

    let mode = position_mode(args.raw_position);
    let reports = registries
        .iter()
        .map(|r| visibility_report_with(&transcript, r, mode))
        .collect::<Result<Vec<_>, _>>()
        .context("cannot score transcript")
        .map_err(Failure::invalid)?;

    match config.format {
        Format::Json if reports.len() == 1 => emit_json(&reports[0])?,
        Format::Json => emit_json(&reports)?,
        Format::Csv => {
            let mut out = format!("brand,{}\n", geometer_core::metrics::CSV_HEADER);
            for report in &reports {
                for line in report.to_csv().lines().skip(1) {
                    out.push_str(&format!("{},{line}\n", csv_field(&report.brand)));
                }
            }
            emit(&out)?;
        }
        Format::Md => emit(&reports.iter().map(|r| r.to_markdown()).collect::<Vec<_>>().join("\n"))?,
    }
    Ok(Completed::default())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn is_markdown_path(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "md" | "markdown"))
}

fn analyze(args: AnalyzeArgs, config: &CliConfig) -> Outcome {
    let text = read_text(&args.input)?;
    let markdown = args.markdown || (!args.plain && is_markdown_path(&args.input));
    let document = if markdown { Document::markdown(&text) } else { Document::plain(&text) };
    let mut analyzer = config.analyzer.clone();
    if let Some(keywords) = &args.keywords {
        analyzer.keywords = Lexicon::new(keywords);
    }
    let priors = match &args.priors {
        Some(path) => priors_from_csv(&read_text(path)?)
            .with_context(|| format!("invalid priors {}", path.display()))
            .map_err(Failure::invalid)?,
        None => default_priors(),
    };
    let analysis = analyze_document(&document, &analyzer, &priors)
        .with_context(|| format!("cannot analyze {}", args.input.display()))
        .map_err(Failure::invalid)?;
    match config.format {
        Format::Json => emit_json(&analysis)?,
        Format::Md => emit(&analysis.to_markdown())?,
        Format::Csv => {
            let mut out = String::from("rank,strategy,prior_percent,significance,current,priority,deprioritized\n");
            for (i, r) in analysis.recommendations.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{:.1},{},{:.6},{:.6},{}\n",
                    i + 1,
                    r.strategy.name(),
                    r.relative_improvement_percent,
                    r.significance,
                    r.current,
                    r.priority,
                    r.deprioritized
                ));
            }
            emit(&out)?;
        }
    }
    Ok(Completed::default())
}

fn entity(args: EntityArgs, config: &CliConfig) -> Outcome {
    let mut clarity = config.clarity.clone();
    for (flag, list, slot) in [
        ("--taxonomy", &args.taxonomy, &mut clarity.service_taxonomy),
        ("--licence-keys", &args.licence_keys, &mut clarity.licence_keys),
    ] {
        if let Some(list) = list {
            let list: Vec<String> = list.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            if list.is_empty() {
                return Err(Failure::invalid(anyhow!("{flag} must not be empty")));
            }
            *slot = list;
        }
    }
    let mut documents = Vec::new();
    let mut diagnostics = Vec::new();
    for path in &args.files {
        let text = read_text(path)?;
        let (doc, diags) = load_document(&path.display().to_string(), &text);
        note(config, format!("{}: {} entities", path.display(), doc.entities.len()));
        documents.push(doc);
        diagnostics.extend(diags);
    }
    let graph = build_entity_graph(&documents);
    let mut report = clarity_report(&graph, &clarity);
    let warnings = diagnostics.iter().map(|d| format!("{}: {}", d.document, d.message)).collect();
    report.diagnostics = diagnostics;
    match config.format {
        Format::Json => emit_json(&report)?,
        Format::Md => emit(&report.to_markdown())?,
        Format::Csv => {
            let mut out = String::from("layer,points,satisfied,missing\n");
            for l in &report.layers {
                let names = |items: &[geometer_core::entity::ChecklistItem]| {
                    items
                        .iter()
                        .map(|i| serde_json::to_value(i).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default())
                        .collect::<Vec<_>>()
                        .join(";")
                };
                out.push_str(&format!("{},{:.6},{},{}\n", l.layer, l.points, names(&l.satisfied), names(&l.missing)));
            }
            out.push_str(&format!("composite,{:.6},,\n", report.composite));
            emit(&out)?;
        }
    }
    Ok(Completed { warnings })
}

fn store_path(flag: &Option<PathBuf>, config: &CliConfig) -> Result<PathBuf, Failure> {
    flag.clone()
        .or_else(|| config.store.clone())
        .ok_or_else(|| Failure::invalid(anyhow!("no run store given; pass --store or set bench.store in the config file")))
}

fn bench_error(e: BenchError) -> Failure {
    match e {
        BenchError::Store(StoreError::Io { .. }) => Failure::runtime(e),
        other => Failure::invalid(other),
    }
}

fn bench_run(args: BenchRunArgs, config: &CliConfig) -> Outcome {
    let registries = load_registries(config)?;
    let library = load_query_library(&args.library)
        .with_context(|| format!("invalid query library {}", args.library.display()))
        .map_err(Failure::invalid)?;
    let clock: Arc<dyn Clock> = match &args.clock {
        Some(t) => Arc::new(FrozenClock(parse_timestamp(t).context("--clock").map_err(Failure::invalid)?)),
        None => Arc::new(SystemClock),
    };
    let mut clients = Vec::new();
    for spec in &args.engines {
        let spec = EngineSpec::parse(spec).map_err(|e| Failure::invalid(anyhow!(e)))?;
        if !spec.dir.is_dir() {
            return Err(Failure::invalid(anyhow!(
                "engine '{}': fixture directory {} does not exist",
                spec.id,
                spec.dir.display()
            )));
        }
        if clients.iter().any(|c: &geometer_core::bench::FixtureClient| c.engine_id() == spec.id) {
            return Err(Failure::invalid(anyhow!("engine id '{}' given twice", spec.id)));
        }
        clients.push(spec.client(clock.clone()));
    }
    let clients: Vec<&dyn EngineClient> = clients.iter().map(|c| c as &dyn EngineClient).collect();
    let store = RunStore::new(store_path(&args.store, config)?);
    let options = RunOptions {
        parallelism: args.parallelism.unwrap_or(config.parallelism).max(1),
        position_mode: position_mode(args.raw_position),
    };
    let summary = run_benchmark(&library, &clients, &registries, &store, clock.as_ref(), options).map_err(bench_error)?;

    #[derive(Serialize)]
    struct Output<'a> {
        store: String,
        library_version: &'a str,
        records: usize,
        errors: usize,
        warnings: &'a [String],
    }
    let output = Output {
        store: store.path().display().to_string(),
        library_version: &library.version,
        records: summary.records,
        errors: summary.errors,
        warnings: &summary.warnings,
    };
    match config.format {
        Format::Json => emit_json(&output)?,
        Format::Csv => emit(&format!(
            "store,library_version,records,errors\n{},{},{},{}\n",
            csv_field(&output.store),
            csv_field(output.library_version),
            output.records,
            output.errors
        ))?,
        Format::Md => emit(&format!(
            "Appended {} run records and {} error entries to {} (library {}).\n",
            output.records, output.errors, output.store, output.library_version
        ))?,
    }
    Ok(Completed {
        warnings: summary.warnings,
    })
}

fn bench_report(args: BenchReportArgs, config: &CliConfig) -> Outcome {
    let registries = load_registries(config)?;
    let window_a = TimeWindow::parse(&args.window_a).map_err(|e| Failure::invalid(anyhow!(e)))?;
    let window_b = match &args.window_b {
        Some(w) => TimeWindow::parse(w).map_err(|e| Failure::invalid(anyhow!(e)))?,
        None => window_a,
    };
    let store = RunStore::new(store_path(&args.store, config)?);
    let filter = RunFilter {
        engine: args.engine.clone(),
        query: None,
        tag: args.tag,
        window: None,
    };
    let selection = read_runs(&store, &filter).map_err(|e| bench_error(e.into()))?;
    let warnings = selection
        .diagnostics
        .iter()
        .map(|d| format!("{} line {}: {}", store.path().display(), d.line, d.message))
        .collect();
    let report = benchmark_report(
        &selection.records,
        &registries,
        window_a,
        window_b,
        position_mode(args.raw_position),
    )
    .map_err(bench_error)?;
    match config.format {
        Format::Json => emit_json(&report)?,
        Format::Csv => emit(&report.to_csv())?,
        Format::Md => emit(&report.to_markdown())?,
    }
    Ok(Completed { warnings })
}
