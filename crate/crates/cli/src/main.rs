use std::collections::BTreeSet;
use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context as _};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lyphforge::analysis::{neurulate, replace_neurulated, soma_processes};
use lyphforge::composer::{self, resolve_imports, CachePolicy, CachedFetcher, SourceFetcher};
use lyphforge::document::{parse_model, serialize_generated, serialize_spec, to_canonical_string};
use lyphforge::editor::{parse_script, run_script, EditLog};
use lyphforge::exporter::{
    serialize_json_ld, serialize_resource_map, JsonLdContext, DEFAULT_BASE_IRI,
};
use lyphforge::generator::generate;
use lyphforge::layout::{layout, snapshot, to_svg, LayoutConfig, Mode};
use lyphforge::schema::{validate_references, validate_syntax};
use lyphforge::tabular::{read_workbook, spec_to_workbook, workbook_to_spec, write_csv_dir};
use lyphforge::{GeneratedModel, Identifier, Model, ValidationReport};

/// Compile, link, analyze, lay out and export lyph-based connectivity models.
///
/// Exit status: 0 clean, 1 warnings, 2 errors (or bad usage).
#[derive(Parser)]
#[command(name = "lyphforge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model (JSON, workbook or CSV directory; `-` reads JSON from stdin).
    Validate { input: String },
    /// Convert between JSON and workbook forms. A `.json` output is written
    /// as JSON, anything else as a directory of CSV pages.
    Convert {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Expand a model; writes `<out>/<name>.generated.json`.
    Generate {
        input: PathBuf,
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
        #[command(flatten)]
        imports: ImportArgs,
    },
    /// Merge `other` into `base` (first definition wins).
    Merge {
        base: PathBuf,
        other: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Join `other` into `base` under its own namespace, wrapped in a group.
    Join {
        base: PathBuf,
        other: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// List closed link components; `-o` writes the model with them as groups.
    Neurulate {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        imports: ImportArgs,
    },
    /// Processes of the neurons whose soma is at `--start`; prints the group.
    Query {
        input: PathBuf,
        #[arg(long)]
        start: String,
        #[command(flatten)]
        imports: ImportArgs,
    },
    /// Lay out a model; prints the snapshot unless `-o` is given.
    Layout(LayoutArgs),
    /// Write `<name>.generated.json`, `<name>.jsonld` and `<name>.resource-map.json`.
    Export {
        input: PathBuf,
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
        /// Resource IRIs are `<base><namespace>#<id>`.
        #[arg(long, default_value = DEFAULT_BASE_IRI)]
        base_iri: String,
        #[command(flatten)]
        imports: ImportArgs,
    },
    /// Apply an edit script (all or nothing); writes the model and `<out>.editlog.json`.
    Edit {
        input: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Edit log of an earlier run to continue (UNDO reaches into it).
        #[arg(long)]
        resume: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ImportArgs {
    /// Import cache directory [default: $LYPHFORGE_CACHE_DIR, $XDG_CACHE_HOME/lyphforge or ~/.cache/lyphforge].
    #[arg(long)]
    import_cache: Option<PathBuf>,
    /// Revalidate cached imports with their source.
    #[arg(long)]
    always_fetch: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(name = "2d")]
    TwoD,
    #[value(name = "3d")]
    ThreeD,
}

#[derive(Args)]
struct LayoutArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 300)]
    iters: usize,
    #[arg(long, value_enum, default_value = "2d")]
    mode: ModeArg,
    /// Comma-separated groups to show (all visible resources when absent).
    #[arg(long, value_delimiter = ',')]
    groups: Option<Vec<String>>,
    /// Show only resources present in this clade.
    #[arg(long)]
    clade: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write an SVG top view.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    imports: ImportArgs,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            if !report.is_empty() {
                eprint!("{}", report.render());
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Model name used for output files: the file stem without `.generated`.
fn stem(path: &Path) -> String {
    let s = path.file_stem().and_then(|s| s.to_str()).unwrap_or("model");
    s.strip_suffix(".generated").unwrap_or(s).to_string()
}

/// Reads a JSON model, a workbook file or a CSV directory.
fn load(path: &Path) -> anyhow::Result<(Model, ValidationReport)> {
    if is_json(path) {
        let text =
            fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        load_json(&text, path)
    } else {
        let wb = read_workbook(path)?;
        Ok(workbook_to_spec(&wb))
    }
}

fn load_json(text: &str, path: &Path) -> anyhow::Result<(Model, ValidationReport)> {
    let report = validate_syntax(text).in_file(&path.display().to_string());
    if report.has_errors() {
        return Ok((Model::new(), report));
    }
    let model = parse_model(text).with_context(|| format!("cannot parse {}", path.display()))?;
    Ok((model, report))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Loads, links imports and generates. `None` when an error was reported.
fn prepare(
    path: &Path,
    imports: &ImportArgs,
    report: &mut ValidationReport,
) -> anyhow::Result<Option<GeneratedModel>> {
    let (mut model, r) = load(path)?;
    let failed = r.has_errors();
    report.extend(r);
    if failed {
        return Ok(None);
    }
    if !model.imports.is_empty() {
        let dir = imports
            .import_cache
            .clone()
            .unwrap_or_else(composer::default_cache_dir);
        let fetcher = CachedFetcher::new(SourceFetcher::default(), dir);
        let policy = if imports.always_fetch {
            CachePolicy::AlwaysFetch
        } else {
            CachePolicy::CacheOk
        };
        let linked = resolve_imports(&model, path.to_str(), &fetcher, policy);
        let failed = linked.report.has_errors();
        report.extend(linked.report);
        if failed {
            return Ok(None);
        }
        model = linked.model;
    }
    match generate(&model) {
        Ok(g) => {
            report.extend(g.report);
            Ok(Some(g.model))
        }
        Err(r) => {
            report.extend(r);
            Ok(None)
        }
    }
}

fn combine(
    base: &Path,
    other: &Path,
    output: &Path,
    f: fn(&Model, &Model) -> (Model, ValidationReport),
    report: &mut ValidationReport,
) -> anyhow::Result<()> {
    let (a, ra) = load(base)?;
    let (b, rb) = load(other)?;
    let failed = ra.has_errors() || rb.has_errors();
    report.extend(ra);
    report.extend(rb);
    if !failed {
        let (m, r) = f(&a, &b);
        report.extend(r);
        write(output, &serialize_spec(&m))?;
    }
    Ok(())
}

fn run(command: Command) -> anyhow::Result<ValidationReport> {
    let mut report = ValidationReport::new();
    match command {
        Command::Validate { input } => {
            let (model, r) = if input == "-" {
                let mut text = String::new();
                std::io::stdin()
                    .read_to_string(&mut text)
                    .context("cannot read stdin")?;
                load_json(&text, Path::new("<stdin>"))?
            } else {
                load(Path::new(&input))?
            };
            let failed = r.has_errors();
            report.extend(r);
            if !failed {
                let linked = lyphforge::generator::linked_namespaces(&model);
                report.extend(validate_references(&model, &linked));
            }
            if report.is_empty() {
                println!("OK");
            }
        }
        Command::Convert { input, output } => {
            let (model, r) = load(&input)?;
            let failed = r.has_errors();
            report.extend(r);
            if !failed {
                if is_json(&output) {
                    write(&output, &serialize_spec(&model))?;
                } else {
                    write_csv_dir(&spec_to_workbook(&model), &output)?;
                }
            }
        }
        Command::Generate {
            input,
            output,
            imports,
        } => {
            if let Some(g) = prepare(&input, &imports, &mut report)? {
                let path = output.join(format!("{}.generated.json", stem(&input)));
                write(&path, &serialize_generated(&g))?;
            }
        }
        Command::Merge {
            base,
            other,
            output,
        } => combine(&base, &other, &output, composer::merge, &mut report)?,
        Command::Join {
            base,
            other,
            output,
        } => combine(&base, &other, &output, composer::join, &mut report)?,
        Command::Neurulate {
            input,
            output,
            imports,
        } => {
            if let Some(g) = prepare(&input, &imports, &mut report)? {
                let n = neurulate(g.model());
                for grp in &n.groups {
                    let links: Vec<String> = grp.links.iter().map(ToString::to_string).collect();
                    println!("{}\t{}", grp.id, links.join(" "));
                }
                report.extend(n.report.clone());
                if let Some(out) = output {
                    let mut m = g.into_model();
                    replace_neurulated(&mut m, &n.groups);
                    write(
                        &out,
                        &serialize_generated(&GeneratedModel::assume_generated(m)),
                    )?;
                }
            }
        }
        Command::Query {
            input,
            start,
            imports,
        } => {
            let start = Identifier::parse(&start).map_err(|e| anyhow!("--start: {e}"))?;
            if let Some(g) = prepare(&input, &imports, &mut report)? {
                match soma_processes(g.model(), &start) {
                    Ok((grp, r)) => {
                        report.extend(r);
                        let json = lyphforge::document::resource_to_json(&grp.to_resource());
                        print!("{}", to_canonical_string(&json));
                    }
                    Err(issue) => report.push(issue),
                }
            }
        }
        Command::Layout(args) => {
            if let Some(g) = prepare(&args.input, &args.imports, &mut report)? {
                let groups = match &args.groups {
                    None => None,
                    Some(list) => Some(
                        list.iter()
                            .filter(|s| !s.is_empty())
                            .map(|s| Identifier::parse(s).map_err(|e| anyhow!("--groups: {e}")))
                            .collect::<anyhow::Result<BTreeSet<_>>>()?,
                    ),
                };
                let config = LayoutConfig {
                    seed: args.seed,
                    iterations: args.iters,
                    mode: match args.mode {
                        ModeArg::TwoD => Mode::TwoD,
                        ModeArg::ThreeD => Mode::ThreeD,
                    },
                    groups,
                    clade: args.clade.clone(),
                    ..LayoutConfig::default()
                };
                let l = layout(g.model(), &config);
                report.extend(l.report.clone());
                let snap = snapshot(&l.state);
                match &args.output {
                    Some(p) => write(p, &snap)?,
                    None => print!("{snap}"),
                }
                if let Some(p) = &args.svg {
                    write(p, &to_svg(g.model(), &l))?;
                }
            }
        }
        Command::Export {
            input,
            output,
            base_iri,
            imports,
        } => {
            if let Some(g) = prepare(&input, &imports, &mut report)? {
                let name = stem(&input);
                let ctx = JsonLdContext::for_model(&base_iri, g.model());
                match serialize_json_ld(&g, &ctx) {
                    Ok(text) => {
                        write(
                            &output.join(format!("{name}.generated.json")),
                            &serialize_generated(&g),
                        )?;
                        write(&output.join(format!("{name}.jsonld")), &text)?;
                        write(
                            &output.join(format!("{name}.resource-map.json")),
                            &serialize_resource_map(&g),
                        )?;
                    }
                    Err(r) => report.extend(r),
                }
            }
        }
        Command::Edit {
            input,
            script,
            output,
            resume,
        } => {
            let (model, r) = load(&input)?;
            let failed = r.has_errors();
            report.extend(r);
            if failed {
                return Ok(report);
            }
            let text = fs::read_to_string(&script)
                .with_context(|| format!("cannot read {}", script.display()))?;
            let steps = parse_script(&text)?;
            let log = match &resume {
                Some(p) => {
                    let text = fs::read_to_string(p)
                        .with_context(|| format!("cannot read {}", p.display()))?;
                    EditLog::from_json(&serde_json::from_str(&text)?)?
                }
                None => EditLog::new(),
            };
            match run_script(&model, &steps, log) {
                Ok(run) => {
                    for line in &run.summary {
                        println!("{line}");
                    }
                    for (i, d) in &run.diffs {
                        println!("--- step {i}");
                        print!("{}", d.render());
                    }
                    write(&output, &serialize_spec(&run.model))?;
                    let mut sidecar = output.clone().into_os_string();
                    sidecar.push(".editlog.json");
                    write(
                        Path::new(&sidecar),
                        &to_canonical_string(&run.log.to_json()),
                    )?;
                }
                Err((i, issue)) => {
                    report.push(issue.at(format!("/{i}")));
                }
            }
        }
    }
    Ok(report)
}
