//! Cartesian sweeps of one estimator. Every grid point reuses the same seed
//! block, so differences between points are not blurred by fresh noise.

use rayon::prelude::*;
use serde_json::{json, Value};
use silt_core::fbm::{FbmGenerator, Synthesis};
use silt_core::silt::estimate;
use silt_core::stats::Summary;
use silt_core::{HurstParameter, Mollifier};

use crate::commands::{estimator_kind, parse_region};
use crate::config::{parse_float_list, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, OutputDir};

const AXES: [&str; 5] = ["H", "t", "n_steps", "y", "epsilon"];

#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    hurst: f64,
    t: f64,
    n_steps: usize,
    y: f64,
    epsilon: f64,
}

impl Point {
    fn set(&mut self, axis: &str, v: f64) -> CliResult<()> {
        match axis {
            "H" => self.hurst = v,
            "t" => self.t = v,
            "y" => self.y = v,
            "epsilon" => self.epsilon = v,
            "n_steps" => {
                if v < 1.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
                    return Err(CliError::config("grid", format!("n_steps value {v} is not a positive integer")));
                }
                self.n_steps = v as usize;
            }
            _ => unreachable!(),
        }
        Ok(())
    }
}

/// `H=0.3,0.4;y=0,0.5` into ordered axes. An axis may be listed once.
fn parse_grid(spec: &str) -> CliResult<Vec<(String, Vec<f64>)>> {
    let mut axes: Vec<(String, Vec<f64>)> = Vec::new();
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, values) = part
            .split_once('=')
            .ok_or_else(|| CliError::config("grid", format!("{part:?} is not AXIS=v1,v2,...")))?;
        let name = name.trim();
        if !AXES.contains(&name) {
            return Err(CliError::config("grid", format!("cannot sweep {name:?}; axes are {AXES:?}")));
        }
        if axes.iter().any(|(a, _)| a == name) {
            return Err(CliError::config("grid", format!("axis {name} listed twice")));
        }
        axes.push((name.to_string(), parse_float_list("grid", values)?));
    }
    Ok(axes)
}

/// Row-major product, last axis fastest. No axes, or any empty axis, gives no points.
fn expand(base: Point, axes: &[(String, Vec<f64>)]) -> CliResult<Vec<Point>> {
    if axes.is_empty() || axes.iter().any(|(_, v)| v.is_empty()) {
        return Ok(Vec::new());
    }
    let mut points = vec![base];
    for (name, values) in axes {
        let mut next = Vec::with_capacity(points.len() * values.len());
        for p in &points {
            for &v in values {
                let mut q = *p;
                q.set(name, v)?;
                next.push(q);
            }
        }
        points = next;
    }
    Ok(points)
}

pub fn run(cfg: &RunConfig, out: &mut OutputDir) -> CliResult<Value> {
    let kind = estimator_kind(cfg)?;
    let base = Point {
        hurst: cfg.f64("H"),
        t: cfg.f64("t"),
        n_steps: cfg.usize("n_steps"),
        y: cfg.f64("y"),
        epsilon: cfg.f64("epsilon"),
    };
    let axes = parse_grid(cfg.text("grid"))?;
    let points = expand(base, &axes)?;
    let seeds = cfg.seeds()?;
    let budget = cfg.usize("budget");
    let work = points.len().saturating_mul(seeds.len());
    if work > budget {
        return Err(CliError::config(
            "budget",
            format!("{} grid points x {} replicates = {work} runs exceeds budget {budget}", points.len(), seeds.len()),
        ));
    }

    // Validate every point before any path is drawn.
    let mut prepared = Vec::with_capacity(points.len());
    for p in &points {
        let h = HurstParameter::new(p.hurst).map_err(|e| CliError::config("H", e.to_string()))?;
        let m = Mollifier::new(p.epsilon).map_err(|e| CliError::config("epsilon", e.to_string()))?;
        let region = parse_region(cfg.text("region"), p.t)?;
        let gen = FbmGenerator::new(h, p.t, p.n_steps, Synthesis::Auto)?;
        prepared.push((gen, m, region));
    }

    let jobs: Vec<(usize, u64)> = (0..points.len())
        .flat_map(|i| seeds.iter().map(move |&s| (i, s)))
        .collect();
    let values = jobs
        .par_iter()
        .map(|&(i, s)| {
            let (gen, m, region) = &prepared[i];
            estimate(kind, &gen.sample(s), points[i].y, m, region).map(|e| e.value)
        })
        .collect::<silt_core::Result<Vec<f64>>>()?;

    let mut rows = Vec::new();
    let mut aggregates = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let block = &values[i * seeds.len()..(i + 1) * seeds.len()];
        let cells = |record: &str, seed: String| {
            vec![
                record.to_string(),
                i.to_string(),
                kind.tag().to_string(),
                fmt_f64(p.hurst),
                fmt_f64(p.t),
                p.n_steps.to_string(),
                fmt_f64(p.y),
                fmt_f64(p.epsilon),
                seed,
            ]
        };
        for (&s, &v) in seeds.iter().zip(block) {
            let mut row = cells("run", s.to_string());
            row.extend([fmt_f64(v), String::new(), String::new(), String::new(), String::new(), String::new()]);
            rows.push(row);
        }
        let sm = Summary::of(block);
        let hw = sm.half_width(1.96);
        let mut row = cells("aggregate", String::new());
        row.extend([
            fmt_f64(sm.mean),
            sm.count.to_string(),
            fmt_f64(sm.variance),
            fmt_f64(sm.std_error()),
            fmt_f64(sm.mean - hw),
            fmt_f64(sm.mean + hw),
        ]);
        rows.push(row);
        aggregates.push(json!({
            "point": i,
            "H": p.hurst,
            "t": p.t,
            "n_steps": p.n_steps,
            "y": p.y,
            "epsilon": p.epsilon,
            "count": sm.count,
            "mean": sm.mean,
            "variance": sm.variance,
            "std_error": sm.std_error(),
            "ci95": [sm.mean - hw, sm.mean + hw],
        }));
    }
    out.write_csv(
        "sweep.csv",
        "sweep",
        &[
            "record", "point", "kind", "H", "t", "n_steps", "y", "epsilon", "seed", "value", "count", "variance",
            "std_error", "ci_lo", "ci_hi",
        ],
        &rows,
    )?;
    let summary = json!({
        "kind": kind.tag(),
        "region": cfg.text("region"),
        "axes": axes.iter().map(|(a, _)| a.clone()).collect::<Vec<_>>(),
        "points": points.len(),
        "replicates": seeds.len(),
        "runs": values.len(),
        "aggregates": aggregates,
    });
    out.write_json("summary.json", "sweep-summary", summary.clone())?;
    Ok(summary)
}
