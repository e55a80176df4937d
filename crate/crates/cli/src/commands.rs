use std::collections::BTreeMap;
use std::io::Write;

use hypermult_core::bounds::{bound_comparison_sweep, bound_report, BoundInput};
use hypermult_core::collar::ball_area;
use hypermult_core::families::{sparse_short_family, two_piece_family};
use hypermult_core::nets::{greedy_separated_net, net_cardinality_bound, sample_hyperbolic_ball, CardinalityBound};
use hypermult_core::verify::{run_suite, Check, Suite, SuiteReport, VerifyConfig};
use hypermult_core::{ConstantsProfile, NetResult, Param, SurfaceDescriptor};
use serde::Serialize;

use crate::report::{read_cloud_csv, write_checks_csv, write_cloud_csv, write_sweep_csv};
use crate::{
    BoundsArgs, Cli, CliError, CliResult, Command, Constants, DecomposeArgs, Family, NetArgs,
    SweepArgs, VerifyCommon,
};

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Decompose(a) => decompose(a),
        Command::Verify(a) => {
            let suites = if a.suites.is_empty() {
                Suite::ALL.to_vec()
            } else {
                a.suites.into_iter().map(Suite::from).collect()
            };
            verify(&suites, a.common)
        }
        Command::VerifyModes(c) => verify(&[Suite::Modes, Suite::Ratios], c),
        Command::VerifyKernel(c) => verify(&[Suite::Kernel], c),
        Command::Net(a) => net(a),
        Command::Bounds(a) => bounds(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn write_json<T: Serialize>(mut out: Box<dyn Write>, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn decompose(a: DecomposeArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&a.input)
        .map_err(|e| CliError::Input(format!("{}: {e}", a.input.display())))?;
    let descriptor: SurfaceDescriptor =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("schema: {e}")))?;
    descriptor.validate().map_err(|e| CliError::Input(format!("invalid descriptor: {e}")))?;
    let report = descriptor.area_budget(a.epsilon, a.trim)?;
    write_json(a.output.writer()?, &report)
}

#[derive(Serialize)]
struct PropertyCount {
    passed: usize,
    failed: usize,
}

#[derive(Serialize)]
struct SuiteSummary<'a> {
    suite: Suite,
    grid_points: usize,
    checks: usize,
    passed: usize,
    failed: usize,
    properties: BTreeMap<&'a str, PropertyCount>,
    first_failure: Option<&'a Check>,
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    seed: u64,
    tol: f64,
    perturb_ratio: f64,
    passed: bool,
    suites: Vec<SuiteSummary<'a>>,
}

fn summarize(r: &SuiteReport) -> SuiteSummary<'_> {
    let mut properties: BTreeMap<&str, PropertyCount> = BTreeMap::new();
    for c in &r.checks {
        let entry = properties
            .entry(c.property.as_str())
            .or_insert(PropertyCount { passed: 0, failed: 0 });
        if c.passed {
            entry.passed += 1;
        } else {
            entry.failed += 1;
        }
    }
    SuiteSummary {
        suite: r.suite,
        grid_points: r.grid_points,
        checks: r.checks.len(),
        passed: r.passed,
        failed: r.failed,
        properties,
        first_failure: r.first_failure(),
    }
}

fn verify(suites: &[Suite], c: VerifyCommon) -> CliResult<()> {
    if !(c.perturb_ratio > 0.0 && c.perturb_ratio.is_finite()) {
        return Err(CliError::Domain(format!(
            "perturb-ratio must be positive, got {}",
            c.perturb_ratio
        )));
    }
    let cfg = VerifyConfig {
        seed: c.seed,
        tol: c.tol,
        perturb_ratio: c.perturb_ratio,
    };
    let reports: Vec<SuiteReport> = suites.iter().map(|&s| run_suite(s, &cfg)).collect();
    if let Some(path) = &c.output.output {
        let file = std::fs::File::create(path)?;
        write_checks_csv(std::io::BufWriter::new(file), &reports)?;
    }
    let summary = VerifySummary {
        seed: cfg.seed,
        tol: cfg.tol,
        perturb_ratio: cfg.perturb_ratio,
        passed: reports.iter().all(SuiteReport::all_passed),
        suites: reports.iter().map(summarize).collect(),
    };
    write_json(Box::new(std::io::stdout().lock()), &summary)?;
    match reports.iter().find_map(|r| r.first_failure()) {
        Some(f) => Err(CliError::Verification(format!(
            "suite {}, {} at {} (value {:e}, limit {:e})",
            f.suite, f.property, f.point, f.value, f.limit
        ))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct NetReport {
    eps: f64,
    points: usize,
    seed: Option<u64>,
    radius: Option<f64>,
    seed_index: usize,
    size: usize,
    ball_area: Option<f64>,
    cardinality_bound: Option<CardinalityBound>,
    net: NetResult,
}

fn net(a: NetArgs) -> CliResult<()> {
    let (cloud, sampled) = match &a.input {
        Some(path) => {
            let file = std::fs::File::open(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            (read_cloud_csv(file, a.epsilon)?, false)
        }
        None => (sample_hyperbolic_ball(a.epsilon, a.radius, a.points, a.seed)?, true),
    };
    if let Some(path) = &a.cloud_output {
        write_cloud_csv(std::io::BufWriter::new(std::fs::File::create(path)?), &cloud)?;
    }
    let net = greedy_separated_net(&cloud, a.r, a.seed_index)?;
    let area = if sampled { Some(ball_area(a.epsilon, a.radius)?) } else { None };
    let cardinality_bound = area.map(|ar| net_cardinality_bound(ar, a.r)).transpose()?;
    let report = NetReport {
        eps: a.epsilon,
        points: cloud.len(),
        seed: sampled.then_some(a.seed),
        radius: sampled.then_some(a.radius),
        seed_index: a.seed_index,
        size: net.selected.len(),
        ball_area: area,
        cardinality_bound,
        net,
    };
    write_json(a.output.writer()?, &report)
}

fn profile(c: &Constants) -> ConstantsProfile {
    let mut p = ConstantsProfile::default();
    if let Some(v) = c.k {
        p.k = Param::user(v);
    }
    if let Some(v) = c.c_eps {
        p.c_eps = Param::user(v);
    }
    if let Some(v) = c.c2 {
        p.c2 = Param::user(v);
    }
    if let Some(v) = c.c3 {
        p.c3 = Param::user(v);
    }
    p
}

fn bounds(a: BoundsArgs) -> CliResult<()> {
    if a.thm2 && a.lambda.is_none() {
        return Err(CliError::Domain("lambda required for the second bound".into()));
    }
    let input = BoundInput {
        g: a.genus,
        eps: a.epsilon,
        lambda: a.lambda,
        n_short: a.n_short,
        i_thick: a.i_thick,
        delta: a.delta,
        j_max: a.j_max,
    };
    let report = bound_report(input, &profile(&a.constants));
    let strict = |wanted: bool, err: &Option<String>| match err {
        Some(e) if wanted => Err(CliError::Domain(e.clone())),
        _ => Ok(()),
    };
    strict(a.thm1, &report.thm1_error)?;
    strict(a.thm2, &report.thm2_error)?;
    if report.thm1_bound.is_none() && report.thm2_bound.is_none() {
        let first = report.thm1_error.clone().unwrap_or_default();
        return Err(CliError::Domain(first));
    }
    write_json(a.output.writer()?, &report)
}

fn sweep(a: SweepArgs) -> CliResult<()> {
    let family = a
        .genus
        .iter()
        .map(|&g| match a.family {
            Family::Sparse => {
                sparse_short_family(g, (g as f64).sqrt() as usize, a.short_length, a.long_length)
            }
            Family::TwoPiece => two_piece_family(g, a.short_length, a.long_length),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rows = bound_comparison_sweep(&family, &a.epsilon, &a.lambda, a.delta, &profile(&a.constants))?;
    write_sweep_csv(a.output.writer()?, &rows)
}
