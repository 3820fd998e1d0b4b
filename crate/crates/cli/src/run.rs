use std::fs;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde_json::{json, Map, Value};

use lanecode::paths::enumerate_paths;
use lanecode::report::analyze_point;
use lanecode::sim::{expected, run_scenario, AggregateStats, Estimate, Expected};
use lanecode::sweep::{SweepParam, SweepSpec, MAX_POINTS};
use lanecode::validate::run_all;
use lanecode::{DelayVector, Error, Method, MultiGraph, Scenario};

use crate::output::Table;
use crate::{AnalyzeArgs, NetworkArgs, OutputArgs, PointArgs, SimulateArgs};

pub fn exit_code_for(e: &anyhow::Error) -> ExitCode {
    match e.downcast_ref::<Error>() {
        Some(Error::NoPath { .. } | Error::AllBlocked) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn load_graph(topology: &str) -> Result<MultiGraph> {
    if let Some(g) = MultiGraph::builtin(topology) {
        return Ok(g);
    }
    let text = fs::read_to_string(topology).with_context(|| format!("reading topology {topology}"))?;
    Ok(MultiGraph::parse(&text)?)
}

fn endpoints(topology: &str, src: Option<usize>, dst: Option<usize>) -> Result<(usize, usize)> {
    let is_nsfnet = topology.eq_ignore_ascii_case("nsfnet");
    match (src, dst) {
        (Some(s), Some(d)) => Ok((s, d)),
        (s, d) if is_nsfnet => Ok((s.unwrap_or(0), d.unwrap_or(5))),
        _ => bail!("--src and --dst are required for topology {topology}"),
    }
}

pub fn paths(topology: &str, src: Option<usize>, dst: Option<usize>, max_hops: usize, out: &OutputArgs) -> Result<ExitCode> {
    let g = load_graph(topology)?;
    let (src, dst) = endpoints(topology, src, dst)?;
    let catalog = enumerate_paths(&g, src, dst, max_hops)?;
    let d = catalog.reduced();
    let mut table = Table::new(json!({
        "command": "paths",
        "version": env!("CARGO_PKG_VERSION"),
        "topology": topology,
        "src": src,
        "dst": dst,
        "max_hops": max_hops,
    }))?;
    table.summary = Some(json!({
        "N": d.len(),
        "D_min": d.min(),
        "D_max": d.max(),
        "tau_up": d.tau_up(0)?,
        "wavelength_paths": catalog.expanded().len(),
        "vector": d.to_string(),
    }));
    for (i, route) in catalog.routes.iter().enumerate() {
        table.push_serialized(json!({
            "index": i + 1,
            "nodes": route.to_string(),
            "hops": route.hops(),
            "delay": route.delay,
            "wavelengths": route.wavelengths,
        }))?;
    }
    table.write(out.format, out.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

struct Network {
    delays: DelayVector,
    config: Map<String, Value>,
}

fn resolve_network(a: &NetworkArgs) -> Result<Network> {
    let mut config = Map::new();
    let delays = if let Some(text) = &a.delays {
        let d: DelayVector = text.parse()?;
        config.insert("delays".into(), json!(d.to_string()));
        d
    } else if let Some(f) = a.abstract_paths {
        config.insert("abstract".into(), json!(f));
        DelayVector::abstract_network(f)?
    } else {
        let topology = a.topology.as_deref().unwrap_or("nsfnet");
        let g = load_graph(topology)?;
        let (src, dst) = endpoints(topology, a.src, a.dst)?;
        let catalog = enumerate_paths(&g, src, dst, a.max_hops)?;
        config.insert("topology".into(), json!(topology));
        config.insert("src".into(), json!(src));
        config.insert("dst".into(), json!(dst));
        config.insert("max_hops".into(), json!(a.max_hops));
        config.insert("wavelengths".into(), json!(a.wavelengths));
        if a.wavelengths {
            catalog.expanded()
        } else {
            catalog.reduced()
        }
    };
    config.insert("F".into(), json!(delays.len()));
    Ok(Network { delays, config })
}

#[derive(Clone, Copy, Debug)]
struct Point {
    available: Option<usize>,
    k: usize,
    r: usize,
    pb: f64,
}

fn expand_points(base: Point, sweeps: &[String]) -> Result<(Vec<Point>, Vec<SweepSpec>)> {
    let specs: Vec<SweepSpec> = sweeps.iter().map(|s| s.parse()).collect::<lanecode::Result<_>>()?;
    let mut points = vec![base];
    for spec in &specs {
        let mut next = Vec::new();
        for p in &points {
            for v in spec.values() {
                let mut q = *p;
                match spec.param {
                    SweepParam::Available => q.available = Some(v.round() as usize),
                    SweepParam::K => q.k = v.round() as usize,
                    SweepParam::R => q.r = v.round() as usize,
                    SweepParam::Blocking => q.pb = v,
                }
                next.push(q);
            }
        }
        if next.len() > MAX_POINTS {
            bail!("sweep grid has {} points; at most {MAX_POINTS} are allowed", next.len());
        }
        points = next;
    }
    Ok((points, specs))
}

fn point_config(config: &mut Map<String, Value>, p: &PointArgs, available: Option<usize>, specs: &[SweepSpec]) {
    config.insert("k".into(), json!(p.k));
    config.insert("r".into(), json!(p.r));
    config.insert("pb".into(), json!(p.pb));
    config.insert("N".into(), json!(available));
    let sweeps: Vec<String> = specs.iter().map(|s| s.to_string()).collect();
    config.insert("sweep".into(), json!(sweeps));
}

pub fn analyze(a: &AnalyzeArgs) -> Result<ExitCode> {
    let net = resolve_network(&a.network)?;
    let base = Point {
        available: a.available,
        k: a.point.k,
        r: a.point.r,
        pb: a.point.pb,
    };
    let (points, specs) = expand_points(base, &a.point.sweep)?;
    let mut config = Map::new();
    config.insert("command".into(), json!("analyze"));
    config.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    config.extend(net.config.clone());
    point_config(&mut config, &a.point, a.available, &specs);
    let mut table = Table::new(Value::Object(config))?;
    let d = &net.delays;
    for p in points {
        let available = p.available.unwrap_or(d.len());
        let row = analyze_point(d, available, p.k, p.r, p.pb)
            .with_context(|| format!("at N={available}, k={}, r={}, pb={}", p.k, p.r, p.pb))?;
        table.push_serialized(row)?;
    }
    table.write(a.output.format, a.output.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn metric(row: &mut Map<String, Value>, name: &str, est: Option<&Estimate>, want: Option<f64>) {
    row.insert(format!("{name}_mean"), json!(est.map(|e| e.mean)));
    row.insert(format!("{name}_ci"), json!(est.map(|e| e.half_width)));
    row.insert(format!("{name}_expected"), json!(want));
    let agree = match (est, want) {
        (Some(e), Some(w)) => Some(e.contains(w)),
        _ => None,
    };
    row.insert(format!("{name}_agree"), json!(agree));
}

fn scale(e: Option<&Estimate>, by: f64) -> Option<Estimate> {
    e.map(|e| Estimate {
        mean: e.mean / by,
        std_err: e.std_err / by,
        half_width: e.half_width / by,
        samples: e.samples,
        indicator: e.indicator,
    })
}

fn simulation_row(s: &Scenario, stats: Option<&AggregateStats>, want: &Expected) -> Map<String, Value> {
    let mut row = Map::new();
    row.insert("N".into(), json!(s.fixed_available));
    row.insert("n".into(), json!(s.n()));
    row.insert("k".into(), json!(s.k));
    row.insert("r".into(), json!(s.r));
    row.insert("pb".into(), json!(s.blocking));
    row.insert("method".into(), json!(s.method.name()));
    let reps = if s.redraw_per_frame {
        s.replications * s.frames_per_replication
    } else {
        s.replications
    };
    row.insert("replications".into(), json!(reps));
    row.insert("blocked".into(), json!(stats.map_or(reps, |st| st.blocked)));
    let all_blocked = Estimate::from_indicators(&vec![1.0; reps]);
    let blocking = stats.map(|st| st.blocking_rate).or(all_blocked);
    metric(&mut row, "blocking", blocking.as_ref(), want.blocking);
    let st = |f: fn(&AggregateStats) -> Option<Estimate>| stats.and_then(f);
    metric(&mut row, "available", st(|x| x.mean_available).as_ref(), want.mean_available);
    let diff = st(|x| x.mean_diff_delay);
    metric(&mut row, "diff_delay", diff.as_ref(), want.diff_delay);
    let tau_full = s.delays.tau_up(0).unwrap_or(0) as f64;
    if tau_full > 0.0 {
        let norm = scale(diff.as_ref(), tau_full);
        metric(&mut row, "diff_delay_normalized", norm.as_ref(), want.diff_delay.map(|v| v / tau_full));
    } else {
        metric(&mut row, "diff_delay_normalized", None, None);
    }
    metric(&mut row, "p_up", st(|x| x.p_up_empirical).as_ref(), want.p_up);
    metric(&mut row, "deskew", st(|x| x.mean_deskew).as_ref(), want.deskew);
    metric(&mut row, "decoding", st(|x| x.mean_decoding).as_ref(), want.decoding);
    let steady = st(|x| x.mean_decoding_steady);
    row.insert("decoding_steady_mean".into(), json!(steady.map(|e| e.mean)));
    row.insert("decoding_steady_ci".into(), json!(steady.map(|e| e.half_width)));
    row.insert("decode_failures".into(), json!(stats.map(|x| x.decode_failures)));
    row.insert("stalls".into(), json!(stats.map(|x| x.stalls)));
    row.insert("voq_conflicts".into(), json!(stats.map(|x| x.voq_conflicts)));
    row.insert("intact_rate".into(), json!(stats.map(|x| x.intact_rate)));
    row
}

pub fn simulate(a: &SimulateArgs) -> Result<ExitCode> {
    let net = resolve_network(&a.network)?;
    let method: Method = a.method.parse()?;
    let base = Point {
        available: a.available,
        k: a.point.k,
        r: a.point.r,
        pb: a.point.pb,
    };
    let (points, specs) = expand_points(base, &a.point.sweep)?;
    let mut config = Map::new();
    config.insert("command".into(), json!("simulate"));
    config.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    config.extend(net.config.clone());
    point_config(&mut config, &a.point, a.available, &specs);
    for (key, value) in [
        ("method", json!(method.name())),
        ("reps", json!(a.reps)),
        ("seed", json!(a.seed)),
        ("frames", json!(a.frames)),
        ("frame_bytes", json!(a.frame_bytes)),
        ("f_path", json!(a.f_path)),
        ("f_pack", json!(a.f_pack)),
        ("allow_excess_loss", json!(a.allow_excess_loss)),
        ("voq_limit", json!(a.voq_limit)),
        ("redraw_per_frame", json!(a.redraw_per_frame)),
    ] {
        config.insert(key.into(), value);
    }
    let mut table = Table::new(Value::Object(config))?;
    let mut delivered_any = false;
    for p in points {
        let mut s = Scenario::new(net.delays.clone(), p.k, p.r, method);
        s.blocking = p.pb;
        s.fixed_available = p.available;
        s.failures.paths = a.f_path;
        s.failures.packets = a.f_pack;
        s.allow_excess_loss = a.allow_excess_loss;
        s.replications = a.reps;
        s.frames_per_replication = a.frames;
        s.frame_bytes = a.frame_bytes;
        s.seed = a.seed;
        s.voq_limit = a.voq_limit;
        s.redraw_per_frame = a.redraw_per_frame;
        let context = || format!("at N={:?}, k={}, r={}, pb={}", p.available, p.k, p.r, p.pb);
        let want = expected(&s).with_context(context)?;
        let stats = match run_scenario(&s) {
            Ok(st) => Some(st),
            Err(Error::AllBlocked) => None,
            Err(e) => return Err(anyhow::Error::new(e).context(context())),
        };
        delivered_any |= stats.is_some();
        table.push(simulation_row(&s, stats.as_ref(), &want));
    }
    table.write(a.output.format, a.output.out.as_deref())?;
    if !delivered_any {
        eprintln!("error: {}", Error::AllBlocked);
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn validate(vectors: usize, seed: u64) -> Result<ExitCode> {
    let checks = run_all(vectors, seed);
    for c in &checks {
        println!(
            "{} {:<18} comparisons={:<8} max_deviation={:e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.comparisons,
            c.max_deviation
        );
    }
    if let Some(c) = checks.iter().find(|c| !c.passed) {
        bail!("check {} failed with max deviation {:e}", c.name, c.max_deviation);
    }
    println!("all {} checks passed", checks.len());
    Ok(ExitCode::SUCCESS)
}
