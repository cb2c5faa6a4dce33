use rayon::prelude::*;
use serde_json::{json, Value};
use silt_core::arcs::{
    build_spanning_sets, classify_gaps, compute_u_vectors, connected_components, convergence_exponents,
    enumerate_configurations, enumerate_m_assignments, equivalence_classes, find_admissible_pair,
    find_free_variables, find_isolated_intervals, lemma_gap_sets, remove_isolated_intervals,
    ExponentMode, MAssignment, PairConfiguration,
};
use silt_core::expectation::{asymptotic_constant, mean_alpha_prime, mean_alpha_prime_eps, regime_classify};
use silt_core::fbm::{FbmGenerator, Synthesis};
use silt_core::regularity::{
    continuity_probe_at_zero, covering_grid, holder_exponent_estimate, occupation_checks,
    simulate_alpha_time_field, simulate_space_field, Axis, ProbeSetup, ProcessKind, TestFunction,
};
use silt_core::silt::{
    default_epsilon_ladder, epsilon_extrapolate, estimate, EstimatorKind, Rect, Region, SiltEstimate, YGrid,
};
use silt_core::{HurstParameter, Mollifier};

use crate::config::{parse_float_list, CommandKind, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, OutputDir};

pub fn execute(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<Value> {
    match cfg.command {
        CommandKind::Simulate => simulate(cfg, out),
        CommandKind::Estimate => estimate_cmd(cfg, out),
        CommandKind::Expectation => expectation(cfg, out),
        CommandKind::Asymptotics => asymptotics(cfg, out),
        CommandKind::OccupationCheck => occupation(cfg, out),
        CommandKind::Holder => holder(cfg, out),
        CommandKind::ProbeZero => probe_zero(cfg, out),
        CommandKind::ArcsAnalyze => arcs_analyze(cfg, out),
        CommandKind::ArcsEnumerate => arcs_enumerate(cfg, out),
        CommandKind::ArcsExponents => arcs_exponents(cfg, out),
        CommandKind::Sweep => crate::sweep::run(cfg, out),
    }
}

pub(crate) fn hurst(cfg: &RunConfig) -> CliResult<HurstParameter> {
    HurstParameter::new(cfg.f64("H")).map_err(|e| CliError::config("H", e.to_string()))
}

pub(crate) fn estimator_kind(cfg: &RunConfig) -> CliResult<EstimatorKind> {
    Ok(cfg.text("kind").parse()?)
}

fn numbers(field: &str, s: &str, want: usize) -> CliResult<Vec<f64>> {
    let v = parse_float_list(field, s)?;
    if v.len() != want {
        return Err(CliError::config(field, format!("{s:?}: expected {want} numbers")));
    }
    Ok(v)
}

fn one_region(spec: &str, t: f64) -> CliResult<Region> {
    let bad = |m: &str| CliError::config("region", format!("{spec:?}: {m}"));
    let parts: Vec<&str> = spec.trim().split(':').collect();
    let r = match parts.as_slice() {
        ["D"] => Region::full_triangle(t)?,
        ["D", kappa] => Region::offset_triangle(t, kappa.parse().map_err(|_| bad("bad offset"))?)?,
        ["A", j, k] => Region::dyadic_square(
            j.parse().map_err(|_| bad("bad level j"))?,
            k.parse().map_err(|_| bad("bad index k"))?,
            t,
        )?,
        ["rect", corners] => {
            let c = numbers("region", corners, 4)?;
            Region::from_rects(spec.trim(), vec![Rect::new(c[0], c[1], c[2], c[3])?])?
        }
        _ => return Err(bad("expected D, D:kappa, A:j:k or rect:r0,r1,s0,s1")),
    };
    Ok(r)
}

/// `D`, `D:kappa`, `A:j:k`, `rect:r0,r1,s0,s1`, joined by `+` into a disjoint union.
pub(crate) fn parse_region(spec: &str, t: f64) -> CliResult<Region> {
    let mut parts = spec.split('+');
    let mut region = one_region(parts.next().unwrap_or(""), t)?;
    for p in parts {
        region = region.union(&one_region(p, t)?)?;
    }
    Ok(region)
}

pub(crate) fn parse_test_function(spec: &str) -> CliResult<TestFunction> {
    let bad = |m: &str| CliError::config("g", format!("{spec:?}: {m}"));
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
    let parts: Vec<&str> = spec.trim().split(':').collect();
    let g = match parts.as_slice() {
        ["one"] => TestFunction::constant_one(),
        ["identity"] => TestFunction::identity(),
        ["gaussian", c, w] => TestFunction::gaussian(num(c)?, num(w)?)?,
        ["cosine", f, p] => TestFunction::cosine(num(f)?, num(p)?)?,
        ["poly", c] => TestFunction::polynomial(parse_float_list("g", c)?)?,
        ["poly", c, r] => TestFunction::polynomial_cutoff(parse_float_list("g", c)?, num(r)?)?,
        _ => return Err(bad("unknown test function")),
    };
    Ok(g)
}

fn simulate(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<Value> {
    let method = match cfg.text("method") {
        "circulant" => Synthesis::CirculantEmbedding,
        "cholesky" => Synthesis::Cholesky,
        _ => Synthesis::Auto,
    };
    let gen = FbmGenerator::new(hurst(cfg)?, cfg.f64("t"), cfg.usize("n_steps"), method)?;
    let path = gen.sample(cfg.u64("seed"));
    let rows: Vec<Vec<String>> = path
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| vec![k.to_string(), fmt_f64(path.time(k)), fmt_f64(*v)])
        .collect();
    out.write_csv("path.csv", "path", &["k", "t", "value"], &rows)?;
    let (lo, hi) = path.range();
    let summary = json!({
        "H": path.hurst().value(),
        "t": path.horizon(),
        "n_steps": path.n_steps(),
        "seed": path.seed(),
        "method": gen.method(),
        "min": lo,
        "max": hi,
        "terminal": path.values()[path.n_steps()],
    });
    out.write_json("summary.json", "simulate-summary", summary.clone())?;
    Ok(summary)
}

fn estimate_row(e: &SiltEstimate) -> Vec<String> {
    vec![
        e.kind.tag().to_string(),
        fmt_f64(e.hurst),
        fmt_f64(e.horizon),
        e.n_steps.to_string(),
        e.seed.to_string(),
        fmt_f64(e.y),
        fmt_f64(e.epsilon),
        e.region.label().to_string(),
        fmt_f64(e.value),
        e.converged.map(|c| c.to_string()).unwrap_or_default(),
    ]
}

const ESTIMATE_HEADER: [&str; 10] = [
    "kind", "H", "t", "n_steps", "seed", "y", "epsilon", "region_id", "value", "converged",
];

fn estimate_cmd(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<Value> {
    let h = hurst(cfg)?;
    let t = cfg.f64("t");
    let kind = estimator_kind(cfg)?;
    let ys = cfg.f64_list("y");
    if ys.is_empty() {
        return Err(CliError::config("y", "need at least one level"));
    }
    let mut ladder = cfg.f64_list("epsilon");
    if ladder.is_empty() {
        ladder = default_epsilon_ladder(h.value(), t).to_vec();
    }
    let mollifiers = ladder
        .iter()
        .map(|&e| Mollifier::new(e).map_err(|err| CliError::config("epsilon", err.to_string())))
        .collect::<CliResult<Vec<_>>>()?;
    let region = parse_region(cfg.text("region"), t)?;
    let seeds = cfg.seeds()?;
    let gen = FbmGenerator::new(h, t, cfg.usize("n_steps"), Synthesis::Auto)?;

    let per_seed = seeds
        .par_iter()
        .map(|&s| {
            let path = gen.sample(s);
            let mut recs = Vec::new();
            for &y in &ys {
                let raw = mollifiers
                    .iter()
                    .map(|m| estimate(kind, &path, y, m, &region))
                    .collect::<silt_core::Result<Vec<_>>>()?;
                let extra = if raw.len() >= 3 { Some(epsilon_extrapolate(&raw)?) } else { None };
                recs.extend(raw);
                recs.extend(extra);
            }
            Ok(recs)
        })
        .collect::<silt_core::Result<Vec<_>>>()?;
    let records: Vec<SiltEstimate> = per_seed.into_iter().flatten().collect();
    let rows: Vec<Vec<String>> = records.iter().map(estimate_row).collect();
    out.write_csv("estimates.csv", "estimate", &ESTIMATE_HEADER, &rows)?;
    let extrapolated: Vec<&SiltEstimate> = records.iter().filter(|e| e.converged.is_some()).collect();
    let summary = json!({
        "records": records.len(),
        "kind": kind.tag(),
        "region": region.label(),
        "epsilon_ladder": ladder,
        "extrapolated": extrapolated.len(),
        "not_converged": extrapolated.iter().filter(|e| e.converged == Some(false)).count(),
    });
    out.write_json("summary.json", "estimate-summary", summary.clone())?;
    Ok(summary)
}

fn expectation(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<Value> {
    let h = hurst(cfg)?;
    let (t, eps) = (cfg.f64("t"), cfg.f64("epsilon"));
    if eps < 0.0 {
        return Err(CliError::config("epsilon", "must be >= 0"));
    }
    let ys = cfg.f64_list("y");
    let results = ys
        .iter()
        .map(|&y| {
            if eps == 0.0 {
                mean_alpha_prime(t, y, h)
            } else {
                mean_alpha_prime_eps(t, y, eps, h)
            }
        })
        .collect::<silt_core::Result<Vec<_>>>()?;
    let ratio = |y: f64, v: f64| if y == 0.0 { None } else { Some(v / y) };
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            vec![
                fmt_f64(h.value()),
                fmt_f64(t),
                fmt_f64(r.y),
                fmt_f64(eps),
                fmt_f64(r.value),
                fmt_f64(r.abs_error_estimate),
                ratio(r.y, r.value).map(fmt_f64).unwrap_or_default(),
            ]
        })
        .collect();
    out.write_csv(
        "expectation.csv",
        "expectation",
        &["H", "t", "y", "epsilon", "value", "abs_error", "value_over_y"],
        &rows,
    )?;
    let summary = json!({
        "H": h.value(),
        "t": t,
        "epsilon": eps,
        "results": results.iter().map(|r| json!({
            "y": r.y,
            "value": r.value,
            "abs_error": r.abs_error_estimate,
            "value_over_y": ratio(r.y, r.value),
        })).collect::<Vec<_>>(),
    });
    out.write_json("summary.json", "expectation-summary", summary.clone())?;
    Ok(summary)
}

fn asymptotics(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<Value> {
    let h = hurst(cfg)?;
    let t = cfg.f64("t");
    let class = regime_classify(h)?;
    let a = asymptotic_constant(t, h)?;
    let ys = cfg.f64_list("y");
    let mut rows = Vec::new();
    for &y in &ys {
        let m = mean_alpha_prime(t, y, h)?.value;
        let norm = a.scaling.evaluate(y);
        rows.push(vec![fmt_f64(y), fmt_f64(m), fmt_f64(norm), fmt_f64(m / norm), fmt_f64(a.constant)]);
    }
    if !ys.is_empty() {
        out.write_csv(
            "asymptotics.csv",
            "asymptotics",
            &["y", "mean", "normalizer", "ratio", "constant"],
            &rows,
        )?;
    }
    let summary = json!({
        "H": h.value(),
        "t": t,
        "regime": class.regime,
        "continuous_at_zero": class.continuous_at_zero,
        "scaling": a.scaling,
        "normalizer": a.scaling.describe(),
        "constant": a.constant,
        "abs_error": a.abs_error_estimate,
    });
    out.write_json("summary.json", "asymptotics-summary", summary.clone())?;
    Ok(summary)
}

fn occupation(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<Value> {
    let h = hurst(cfg)?;
    let t = cfg.f64("t");
    let m = Mollifier::new(cfg.f64("epsilon")).map_err(|e| CliError::config("epsilon", e.to_string()))?;
    let g = parse_test_function(cfg.text("g"))?;
    let region = parse_region(cfg.text("region"), t)?;
    let which: Vec<(&str, bool)> = match cfg.text("identity") {
        "alpha" => vec![("alpha", false)],
        "derivative" => vec![("derivative", true)],
        _ => vec![("alpha", false), ("derivative", true)],
    };
    let seeds = cfg.seeds()?;
    let gen = FbmGenerator::new(h, t, cfg.usize("n_steps"), Synthesis::Auto)?;
    let per_seed = seeds
        .par_iter()
        .map(|&s| {
            let path = gen.sample(s);
            let grid = covering_grid(&path, &m)?;
            which
                .iter()
                .map(|&(name, d)| {
                    occupation_checks(&path, std::slice::from_ref(&g), grid, &m, &region, d)
                        .map(|mut c| (s, name, c.remove(0)))
                })
                .collect::<silt_core::Result<Vec<_>>>()
        })
        .collect::<silt_core::Result<Vec<_>>>()?;
    let checks: Vec<_> = per_seed.into_iter().flatten().collect();
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|(s, name, c)| {
            vec![
                s.to_string(),
                name.to_string(),
                fmt_f64(c.lhs),
                fmt_f64(c.rhs),
                fmt_f64(c.residual),
                fmt_f64(c.leakage),
            ]
        })
        .collect();
    out.write_csv(
        "occupation.csv",
        "occupation",
        &["seed", "identity", "lhs", "rhs", "residual", "leakage"],
        &rows,
    )?;
    let worst = |name: &str| {
        checks
            .iter()
            .filter(|(_, n, _)| *n == name)
            .map(|(_, _, c)| c.residual)
            .fold(None, |a: Option<f64>, r| Some(a.map_or(r, |a| a.max(r))))
    };
    let summary = json!({
        "region": region.label(),
        "g": g,
        "checks": checks.len(),
        "max_residual_alpha": worst("alpha"),
        "max_residual_derivative": worst("derivative"),
    });
    out.write_json("summary.json", "occupation-summary", summary.clone())?;
    Ok(summary)
}

fn holder(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<Value> {
    let h = hurst(cfg)?;
    let t = cfg.f64("t");
    let n = cfg.usize("n_steps");
    let m = Mollifier::new(cfg.f64("epsilon")).map_err(|e| CliError::config("epsilon", e.to_string()))?;
    let axis: Axis = cfg.text("axis").parse()?;
    let kind = match cfg.text("process") {
        "alpha_hat_prime" => ProcessKind::AlphaHatPrime,
        "region_restricted" => ProcessKind::RegionRestricted,
        _ => ProcessKind::Alpha,
    };
    let grid = YGrid::new(cfg.f64("y_start"), cfg.f64("y_step"), cfg.usize("y_len"))?;
    let region = parse_region(cfg.text("region"), t)?;
    let seeds = cfg.seeds()?;
    let field = match axis {
        Axis::Space => simulate_space_field(h, kind, t, n, grid, &m, &region, &seeds)?,
        _ if kind != ProcessKind::Alpha => {
            return Err(CliError::config("process", "time and joint axes are sampled for alpha only"))
        }
        _ => simulate_alpha_time_field(h, t, n, grid, &m, &seeds)?,
    };
    let report = holder_exponent_estimate(&field, axis)?;
    out.write_columns("holder_loglog.dat", "holder-loglog", ("log_lag", "log_structure"), &report.loglog())?;
    let summary = serde_json::to_value(&report).expect("json");
    out.write_json("holder.json", "holder", summary.clone())?;
    Ok(summary)
}

fn probe_zero(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<Value> {
    let setup = ProbeSetup {
        hurst: hurst(cfg)?,
        horizon: cfg.f64("t"),
        n_steps: cfg.usize("n_steps"),
        multiplier: cfg.f64("multiplier"),
    };
    let m = Mollifier::new(cfg.f64("epsilon")).map_err(|e| CliError::config("epsilon", e.to_string()))?;
    let grid = YGrid::symmetric(cfg.f64("radius"), cfg.f64("y_step"))?;
    let seeds = cfg.seeds()?;
    let rows = continuity_probe_at_zero(&seeds, setup, grid, &m)?;
    let csv: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            [r.y, r.mean, r.variance, r.subtracted, r.renormalized_mean, r.renormalized_variance]
                .into_iter()
                .map(fmt_f64)
                .collect()
        })
        .collect();
    out.write_csv(
        "probe.csv",
        "probe",
        &["y", "mean", "variance", "subtracted", "renormalized_mean", "renormalized_variance"],
        &csv,
    )?;
    let summary = json!({ "rows": rows.len(), "replicates": seeds.len(), "exploratory": true });
    out.write_json("summary.json", "probe-summary", summary.clone())?;
    Ok(summary)
}

/// Spanning witnesses are listed per m-assignment up to this many arcs.
const WITNESS_LIMIT_N: usize = 4;

fn arcs_analyze(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<Value> {
    let c: PairConfiguration = cfg.text("word").parse()?;
    let n = c.n();
    let u = compute_u_vectors(&c);
    let isolated = find_isolated_intervals(&c);
    let assignments = enumerate_m_assignments(&c)?;
    let spanning = if isolated.is_empty() && n <= WITNESS_LIMIT_N {
        let list = assignments
            .iter()
            .map(|m| {
                let w = build_spanning_sets(&c, m)?;
                let pair = if w.intersection_admissible { None } else { find_admissible_pair(&c, m)? };
                Ok(json!({
                    "m": m.m,
                    "a": w.a,
                    "b": w.b,
                    "intersection_admissible": w.intersection_admissible,
                    "admissible_pair": pair,
                }))
            })
            .collect::<silt_core::Result<Vec<_>>>()?;
        Some(list)
    } else {
        None
    };
    let summary = json!({
        "word": c.to_string(),
        "n": n,
        "canonical": c.canonical_form().to_string(),
        "u_vectors": u.iter().map(|v| v.render()).collect::<Vec<_>>(),
        "u_coefficients": u.iter().map(|v| v.coefficients.clone()).collect::<Vec<_>>(),
        "classification": classify_gaps(&c),
        "free": find_free_variables(&c),
        "isolated": isolated,
        "lemma_sets": lemma_gap_sets(&c),
        "components": connected_components(&c).iter().map(|k| json!({
            "first": k.first,
            "last": k.last,
            "labels": k.labels,
            "word": k.config.to_string(),
        })).collect::<Vec<_>>(),
        "reduction": remove_isolated_intervals(&c),
        "m_assignments": assignments.len(),
        "spanning": spanning,
    });
    out.write_json("arcs.json", "arcs", summary.clone())?;
    Ok(summary)
}

fn arcs_enumerate(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<Value> {
    let configs = enumerate_configurations(cfg.usize("n"))?;
    let rows: Vec<Vec<String>> = configs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                i.to_string(),
                c.to_string(),
                c.canonical_form().to_string(),
                find_isolated_intervals(c).len().to_string(),
            ]
        })
        .collect();
    out.write_csv("configurations.csv", "configurations", &["index", "word", "canonical", "isolated"], &rows)?;
    let classes = equivalence_classes(&configs);
    let class_rows: Vec<Vec<String>> = classes
        .iter()
        .map(|(k, v)| vec![k.to_string(), v.len().to_string()])
        .collect();
    out.write_csv("classes.csv", "classes", &["canonical", "size"], &class_rows)?;
    let summary = json!({
        "n": cfg.usize("n"),
        "configurations": configs.len(),
        "classes": classes.len(),
        "without_isolated": configs.iter().filter(|c| find_isolated_intervals(c).is_empty()).count(),
    });
    out.write_json("summary.json", "arcs-enumerate-summary", summary.clone())?;
    Ok(summary)
}

fn arcs_exponents(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<Value> {
    let mode: ExponentMode = cfg.text("mode").parse()?;
    let m = match cfg.text("m").trim() {
        "" => None,
        s => {
            let v = s
                .split(',')
                .map(|x| x.trim().parse::<u8>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::config("m", format!("{s:?} is not a list of 0, 1, 2")))?;
            Some(MAssignment::new(v)?)
        }
    };
    let report = convergence_exponents(hurst(cfg)?, cfg.f64("lambda"), cfg.f64("gamma"), m.as_ref(), mode)?;
    let summary = serde_json::to_value(&report).expect("json");
    out.write_json("exponents.json", "exponents", summary.clone())?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regions() {
        assert_eq!(parse_region("D", 1.0).unwrap().label(), "D");
        let a = parse_region("A:2:1+A:2:2", 1.0).unwrap();
        assert!((a.area() - 2.0 / 16.0).abs() < 1e-15);
        assert!((parse_region("rect:0,0.5,0.5,1", 2.0).unwrap().area() - 0.25).abs() < 1e-15);
        for bad in ["", "B", "A:0:1", "A:1", "rect:1,2", "D:x", "A:1:1+A:1:1"] {
            let e = parse_region(bad, 1.0).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn test_functions() {
        assert_eq!(parse_test_function("one").unwrap(), TestFunction::constant_one());
        assert_eq!(parse_test_function("gaussian:0:1").unwrap().value(0.0), 1.0);
        assert_eq!(parse_test_function("poly:1,2").unwrap().value(2.0), 5.0);
        assert!(parse_test_function("poly:1,2:0.5").unwrap().value(1.0) == 0.0);
        assert!(parse_test_function("gaussian:0:-1").is_err());
        assert!(parse_test_function("spline").is_err());
    }
}
