//! `silt` command-line driver: layered configuration, versioned outputs,
//! manifests with checksums, and replay.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgAction, ArgMatches, Command};
use serde_json::json;

use config::{parse_assignment, read_config_file, CommandKind, KeyKind, RunConfig};
use error::{CliError, CliResult};
use output::{Manifest, OutputDir};

pub const OUT_ENV: &str = "SILT_OUT";
const DEFAULT_OUT: &str = "silt-out";

fn schema_command(kind: CommandKind, name: &'static str) -> Command {
    let mut cmd = Command::new(name).about(kind.about());
    for spec in kind.keys() {
        let mut help = spec.help.to_string();
        if let KeyKind::Choice(opts) = spec.kind {
            help.push_str(&format!(" [{}]", opts.join("|")));
        }
        match spec.default {
            Some(d) if !d.is_empty() => help.push_str(&format!(" (default {d})")),
            None => help.push_str(" (required)"),
            _ => {}
        }
        let mut arg = Arg::new(spec.name)
            .long(spec.name)
            .value_name("VALUE")
            .help(help)
            .allow_hyphen_values(true);
        if spec.name.contains('_') {
            let alias: &'static str = Box::leak(spec.name.replace('_', "-").into_boxed_str());
            arg = arg.alias(alias);
        }
        cmd = cmd.arg(arg);
    }
    cmd
}

fn cli() -> Command {
    let mut root = Command::new("silt")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Self-intersection local time of fractional Brownian motion: simulation, estimators, checks")
        .subcommand_required(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("FILE")
                .help("key = value file applied over the defaults"),
        )
        .arg(
            Arg::new("set")
                .long("set")
                .global(true)
                .value_name("KEY=VALUE")
                .action(ArgAction::Append)
                .allow_hyphen_values(true)
                .help("override applied after flags; repeatable"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .global(true)
                .value_name("DIR")
                .help("output directory (else $SILT_OUT, else ./silt-out)"),
        )
        .arg(
            Arg::new("threads")
                .long("threads")
                .global(true)
                .value_name("N")
                .value_parser(clap::value_parser!(usize))
                .help("worker threads; results do not depend on it"),
        );
    for kind in CommandKind::ALL {
        if !kind.tag().starts_with("arcs-") {
            root = root.subcommand(schema_command(kind, kind.tag()));
        }
    }
    root.subcommand(
        Command::new("arcs")
            .about("Arc-diagram combinatorics")
            .subcommand_required(true)
            .subcommand(schema_command(CommandKind::ArcsAnalyze, "analyze"))
            .subcommand(schema_command(CommandKind::ArcsEnumerate, "enumerate"))
            .subcommand(schema_command(CommandKind::ArcsExponents, "exponents")),
    )
    .subcommand(
        Command::new("replay")
            .about("Re-run a manifest and compare output checksums")
            .arg(Arg::new("manifest").required(true).value_name("MANIFEST")),
    )
}

/// defaults < `--config` file < flags < `--set`.
fn resolve(kind: CommandKind, top: &ArgMatches, sub: &ArgMatches) -> CliResult<RunConfig> {
    let mut layers = Vec::new();
    if let Some(path) = top.get_one::<String>("config") {
        layers.push(read_config_file(Path::new(path))?);
    }
    let flags = kind
        .keys()
        .iter()
        .filter_map(|s| sub.get_one::<String>(s.name).map(|v| (s.name.to_string(), v.clone())))
        .collect();
    layers.push(flags);
    if let Some(sets) = top.get_many::<String>("set") {
        layers.push(sets.map(|s| parse_assignment(s)).collect::<CliResult<Vec<_>>>()?);
    }
    RunConfig::resolve(kind, &layers)
}

fn out_dir(top: &ArgMatches) -> PathBuf {
    top.get_one::<String>("out")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

/// Runs one resolved configuration into `dir` and writes its manifest.
pub fn run_config(cfg: &RunConfig, dir: &Path) -> CliResult<(Manifest, serde_json::Value)> {
    let mut out = OutputDir::create(dir)?;
    let summary = commands::execute(cfg, &mut out)?;
    let manifest = out.finish(cfg)?;
    Ok((manifest, summary))
}

fn replay(manifest_path: &Path, explicit_out: Option<&String>) -> CliResult<serde_json::Value> {
    let original = Manifest::read(manifest_path)?;
    let kind: CommandKind = original.command.parse()?;
    let layer: Vec<(String, String)> = original.config.clone().into_iter().collect();
    let cfg = RunConfig::resolve(kind, &[layer])?;
    let dir = match explicit_out {
        Some(d) => PathBuf::from(d),
        None => manifest_path.parent().unwrap_or(Path::new(".")).join("replay"),
    };
    let (fresh, _) = run_config(&cfg, &dir)?;
    let mut problems = Vec::new();
    for e in &original.outputs {
        match fresh.outputs.iter().find(|f| f.path == e.path) {
            None => problems.push(format!("{} not produced", e.path)),
            Some(f) if f.sha256 != e.sha256 => problems.push(format!("{} checksum differs", e.path)),
            Some(_) => {}
        }
    }
    for f in &fresh.outputs {
        if !original.outputs.iter().any(|e| e.path == f.path) {
            problems.push(format!("{} not in the original manifest", f.path));
        }
    }
    if !problems.is_empty() {
        return Err(CliError::Mismatch(problems.join("; ")));
    }
    Ok(json!({
        "replay": manifest_path.display().to_string(),
        "out": dir.display().to_string(),
        "identical": true,
        "outputs": fresh.outputs.len(),
    }))
}

fn dispatch(top: &ArgMatches) -> CliResult<serde_json::Value> {
    let (name, sub) = top.subcommand().expect("subcommand required");
    if name == "replay" {
        let m = sub.get_one::<String>("manifest").expect("required");
        return replay(Path::new(m), top.get_one::<String>("out"));
    }
    let (kind, sub) = if name == "arcs" {
        let (leaf, leaf_m) = sub.subcommand().expect("subcommand required");
        (format!("arcs-{leaf}").parse::<CommandKind>()?, leaf_m)
    } else {
        (name.parse::<CommandKind>()?, sub)
    };
    let cfg = resolve(kind, top, sub)?;
    let dir = out_dir(top);
    let (manifest, summary) = run_config(&cfg, &dir)?;
    Ok(json!({
        "command": kind.tag(),
        "out": dir.display().to_string(),
        "outputs": manifest.outputs.iter().map(|o| o.path.clone()).collect::<Vec<_>>(),
        "summary": summary,
    }))
}

/// Parses `args`, runs, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let top = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match top.get_one::<usize>("threads") {
        Some(&n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&top)),
            Err(e) => Err(CliError::config("threads", e.to_string())),
        },
        None => dispatch(&top),
    };
    match result {
        Ok(v) => {
            // A closed pipe on stdout is not a failure of the run.
            let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&v).expect("json"));
            0
        }
        Err(e) => {
            eprintln!("{}", e.record());
            e.exit_code()
        }
    }
}
