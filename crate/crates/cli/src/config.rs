//! Flat `key = value` run configuration with a typed schema per command.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyKind {
    Float,
    /// Nonnegative integer.
    Count,
    Seed,
    /// Comma-separated floats; may be empty.
    FloatList,
    Choice(&'static [&'static str]),
    Text,
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub kind: KeyKind,
    /// `None` marks a required key.
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn key(name: &'static str, kind: KeyKind, default: Option<&'static str>, help: &'static str) -> KeySpec {
    KeySpec {
        name,
        kind,
        default,
        help,
    }
}

const H: KeySpec = key("H", KeyKind::Float, None, "Hurst parameter in (0, 1)");
const T: KeySpec = key("t", KeyKind::Float, Some("1"), "time horizon");
const SEED: KeySpec = key("seed", KeyKind::Seed, Some("0"), "seed, or first seed of a replicate block");
const REPLICATES: KeySpec = key("replicates", KeyKind::Count, Some("1"), "number of paths (seeds seed, seed+1, ...)");
const REGION: KeySpec = key(
    "region",
    KeyKind::Text,
    Some("D"),
    "D | D:kappa | A:j:k | rect:r0,r1,s0,s1, joined with '+'",
);
const KIND: KeySpec = key(
    "kind",
    KeyKind::Choice(&["alpha", "alpha_hat_prime", "alpha_tilde_prime"]),
    Some("alpha_hat_prime"),
    "estimator",
);

fn n_steps(default: &'static str) -> KeySpec {
    key("n_steps", KeyKind::Count, Some(default), "time steps per path")
}

fn epsilon(default: &'static str) -> KeySpec {
    key("epsilon", KeyKind::Float, Some(default), "mollifier variance")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CommandKind {
    Simulate,
    Estimate,
    Expectation,
    Asymptotics,
    OccupationCheck,
    Holder,
    ProbeZero,
    ArcsAnalyze,
    ArcsEnumerate,
    ArcsExponents,
    Sweep,
}

impl CommandKind {
    pub const ALL: [CommandKind; 11] = [
        CommandKind::Simulate,
        CommandKind::Estimate,
        CommandKind::Expectation,
        CommandKind::Asymptotics,
        CommandKind::OccupationCheck,
        CommandKind::Holder,
        CommandKind::ProbeZero,
        CommandKind::ArcsAnalyze,
        CommandKind::ArcsEnumerate,
        CommandKind::ArcsExponents,
        CommandKind::Sweep,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            CommandKind::Simulate => "simulate",
            CommandKind::Estimate => "estimate",
            CommandKind::Expectation => "expectation",
            CommandKind::Asymptotics => "asymptotics",
            CommandKind::OccupationCheck => "occupation-check",
            CommandKind::Holder => "holder",
            CommandKind::ProbeZero => "probe-zero",
            CommandKind::ArcsAnalyze => "arcs-analyze",
            CommandKind::ArcsEnumerate => "arcs-enumerate",
            CommandKind::ArcsExponents => "arcs-exponents",
            CommandKind::Sweep => "sweep",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            CommandKind::Simulate => "Sample one fBm path",
            CommandKind::Estimate => "Pathwise SILT estimates with epsilon extrapolation",
            CommandKind::Expectation => "Exact mean of the derivative SILT by quadrature",
            CommandKind::Asymptotics => "Small-y regime and constant of the mean",
            CommandKind::OccupationCheck => "Check the occupation-time identities on sampled paths",
            CommandKind::Holder => "Structure-function Hölder exponent estimate",
            CommandKind::ProbeZero => "Ensemble probe of the derivative near y = 0",
            CommandKind::ArcsAnalyze => "u-vectors, free variables and spanning sets of one word",
            CommandKind::ArcsEnumerate => "All pair configurations of n arcs",
            CommandKind::ArcsExponents => "Convergence exponent condition",
            CommandKind::Sweep => "Cartesian parameter sweep of one estimator with aggregates",
        }
    }

    pub fn keys(self) -> Vec<KeySpec> {
        use KeyKind::*;
        match self {
            CommandKind::Simulate => vec![
                H,
                T,
                n_steps("1024"),
                SEED,
                key("method", Choice(&["auto", "circulant", "cholesky"]), Some("auto"), "synthesis route"),
            ],
            CommandKind::Estimate => vec![
                H,
                T,
                n_steps("1024"),
                SEED,
                REPLICATES,
                KIND,
                key("y", FloatList, Some("0"), "levels"),
                key("epsilon", FloatList, Some(""), "mollifier variances; empty for the default ladder"),
                REGION,
            ],
            CommandKind::Expectation => vec![
                H,
                T,
                key("y", FloatList, None, "levels"),
                key("epsilon", Float, Some("0"), "mollifier variance; 0 for the limit"),
            ],
            CommandKind::Asymptotics => vec![
                H,
                T,
                key("y", FloatList, Some(""), "levels for a ratio table"),
            ],
            CommandKind::OccupationCheck => vec![
                H,
                T,
                n_steps("4096"),
                SEED,
                REPLICATES,
                epsilon("0.001"),
                key(
                    "g",
                    Text,
                    Some("gaussian:0.25:1"),
                    "one | identity | gaussian:c:w | cosine:f:p | poly:c0,c1,..[:R]",
                ),
                REGION,
                key("identity", Choice(&["alpha", "derivative", "both"]), Some("both"), "which identity"),
            ],
            CommandKind::Holder => vec![
                H,
                T,
                n_steps("1024"),
                SEED,
                key("replicates", Count, Some("64"), "number of paths"),
                epsilon("0.01"),
                key("axis", Choice(&["time", "space", "joint"]), Some("time"), "increment direction"),
                key(
                    "process",
                    Choice(&["alpha", "alpha_hat_prime", "region_restricted"]),
                    Some("alpha"),
                    "sampled field",
                ),
                key("y_start", Float, Some("-0.5"), "first level"),
                key("y_step", Float, Some("0.0125"), "level spacing"),
                key("y_len", Count, Some("81"), "number of levels"),
                REGION,
            ],
            CommandKind::ProbeZero => vec![
                key("H", Float, Some("0.6"), "Hurst parameter in (1/2, 2/3)"),
                T,
                n_steps("1024"),
                SEED,
                key("replicates", Count, Some("64"), "number of paths"),
                epsilon("0.01"),
                key("multiplier", Float, Some("1"), "factor on the subtracted mean"),
                key("radius", Float, Some("0.5"), "grid half-width"),
                key("y_step", Float, Some("0.05"), "grid spacing"),
            ],
            CommandKind::ArcsAnalyze => vec![key("word", Text, None, "e.g. \"r1 r2 s1 s2\"")],
            CommandKind::ArcsEnumerate => vec![key("n", Count, None, "number of arcs, 1..=5")],
            CommandKind::ArcsExponents => vec![
                H,
                key("lambda", Float, Some("0"), "spatial order"),
                key("gamma", Float, Some("1"), "time exponent"),
                key(
                    "mode",
                    Choice(&["main-y", "main-eps", "main-t", "appendix-y", "appendix-eps", "appendix-t"]),
                    Some("main-y"),
                    "condition",
                ),
                key("m", Text, Some(""), "optional m-assignment, e.g. 1,2,0"),
            ],
            CommandKind::Sweep => vec![
                key("H", Float, Some("0.5"), "Hurst parameter unless swept"),
                T,
                n_steps("256"),
                SEED,
                key("replicates", Count, Some("10"), "seeds per grid point, shared across points"),
                KIND,
                key("y", Float, Some("0"), "level unless swept"),
                epsilon("0.01"),
                REGION,
                key("grid", Text, Some(""), "axes like H=0.3,0.4;y=0,0.5 over H, t, n_steps, y, epsilon"),
                key("budget", Count, Some("100000"), "maximum grid points x replicates"),
            ],
        }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for CommandKind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        CommandKind::ALL
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| CliError::config("command", format!("unknown command {s:?}")))
    }
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::config("config", format!("line {}: expected key = value", i + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(CliError::config("config", format!("line {}: empty key", i + 1)));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_text(&text)
}

/// `KEY=VALUE` from `--set`.
pub fn parse_assignment(s: &str) -> CliResult<(String, String)> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(CliError::config("set", format!("{s:?} is not KEY=VALUE"))),
    }
}

fn check_value(spec: &KeySpec, v: &str) -> CliResult<()> {
    let bad = |what: &str| CliError::config(spec.name, format!("{v:?} is not {what}"));
    match spec.kind {
        KeyKind::Float => {
            let x: f64 = v.parse().map_err(|_| bad("a number"))?;
            if !x.is_finite() {
                return Err(bad("finite"));
            }
        }
        KeyKind::Count => {
            v.parse::<usize>().map_err(|_| bad("a nonnegative integer"))?;
        }
        KeyKind::Seed => {
            v.parse::<u64>().map_err(|_| bad("a 64-bit seed"))?;
        }
        KeyKind::FloatList => {
            parse_float_list(spec.name, v)?;
        }
        KeyKind::Choice(options) => {
            if !options.contains(&v) {
                return Err(bad(&format!("one of {options:?}")));
            }
        }
        KeyKind::Text => {}
    }
    Ok(())
}

pub fn parse_float_list(field: &str, v: &str) -> CliResult<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(CliError::config(field, format!("{s:?} is not a finite number"))),
        })
        .collect()
}

/// Fully resolved parameters of one command, every schema key present.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    values: BTreeMap<String, String>,
}

impl RunConfig {
    /// Later layers override earlier ones; defaults fill the rest.
    pub fn resolve(command: CommandKind, layers: &[Vec<(String, String)>]) -> CliResult<RunConfig> {
        let keys = command.keys();
        let mut values = BTreeMap::new();
        for layer in layers {
            for (k, v) in layer {
                let spec = keys.iter().find(|s| s.name == k).ok_or_else(|| {
                    CliError::config(k.clone(), format!("not a parameter of {command}"))
                })?;
                check_value(spec, v)?;
                values.insert(k.clone(), v.clone());
            }
        }
        for spec in &keys {
            if !values.contains_key(spec.name) {
                match spec.default {
                    Some(d) => {
                        values.insert(spec.name.to_string(), d.to_string());
                    }
                    None => return Err(CliError::config(spec.name, "required")),
                }
            }
        }
        Ok(RunConfig { command, values })
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn text(&self, k: &str) -> &str {
        self.values.get(k).map(String::as_str).unwrap_or("")
    }

    pub fn f64(&self, k: &str) -> f64 {
        self.text(k).parse().expect("validated float")
    }

    pub fn usize(&self, k: &str) -> usize {
        self.text(k).parse().expect("validated count")
    }

    pub fn u64(&self, k: &str) -> u64 {
        self.text(k).parse().expect("validated seed")
    }

    pub fn f64_list(&self, k: &str) -> Vec<f64> {
        parse_float_list(k, self.text(k)).expect("validated list")
    }

    /// `seed, seed + 1, ...` for `replicates` paths.
    pub fn seeds(&self) -> CliResult<Vec<u64>> {
        let base = self.u64("seed");
        let n = self.usize("replicates") as u64;
        if n == 0 {
            return Err(CliError::config("replicates", "must be >= 1"));
        }
        base.checked_add(n - 1)
            .ok_or_else(|| CliError::config("seed", "seed block overflows u64"))?;
        Ok((0..n).map(|i| base + i).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kv(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn parses_file_text() {
        let t = "# run\nH = 0.3\n\n t=2 # horizon\ny = 0.1, 0.2\n";
        assert_eq!(parse_config_text(t).unwrap(), kv(&[("H", "0.3"), ("t", "2"), ("y", "0.1, 0.2")]));
        assert!(parse_config_text("H 0.3").is_err());
        assert!(parse_config_text("= 1").is_err());
    }

    #[test]
    fn layers_and_defaults() {
        let c = RunConfig::resolve(
            CommandKind::Expectation,
            &[kv(&[("H", "0.3"), ("y", "1")]), kv(&[("H", "0.25")])],
        )
        .unwrap();
        assert_eq!(c.f64("H"), 0.25);
        assert_eq!(c.f64("t"), 1.0);
        assert_eq!(c.f64_list("y"), vec![1.0]);
    }

    #[test]
    fn rejects_bad_input() {
        let e = RunConfig::resolve(CommandKind::Expectation, &[kv(&[("y", "1")])]).unwrap_err();
        assert!(matches!(e, CliError::Config { ref field, .. } if field == "H"));
        let e = RunConfig::resolve(CommandKind::Expectation, &[kv(&[("H", "x"), ("y", "1")])]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(RunConfig::resolve(CommandKind::Expectation, &[kv(&[("H", "0.3"), ("y", "1"), ("zz", "1")])]).is_err());
        assert!(RunConfig::resolve(CommandKind::Simulate, &[kv(&[("H", "0.3"), ("method", "fft")])]).is_err());
        assert!(RunConfig::resolve(CommandKind::Expectation, &[kv(&[("H", "0.3"), ("y", "1,nan")])]).is_err());
    }

    #[test]
    fn seeds_block() {
        let c = RunConfig::resolve(CommandKind::Estimate, &[kv(&[("H", "0.3"), ("seed", "5"), ("replicates", "3")])])
            .unwrap();
        assert_eq!(c.seeds().unwrap(), vec![5, 6, 7]);
        let c = RunConfig::resolve(
            CommandKind::Estimate,
            &[kv(&[("H", "0.3"), ("seed", &u64::MAX.to_string()), ("replicates", "2")])],
        )
        .unwrap();
        assert!(c.seeds().is_err());
    }

    #[test]
    fn command_tags_round_trip() {
        for c in CommandKind::ALL {
            assert_eq!(c.tag().parse::<CommandKind>().unwrap(), c);
            let names: Vec<_> = c.keys().iter().map(|k| k.name).collect();
            let mut dedup = names.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), names.len(), "{c}");
        }
    }
}
