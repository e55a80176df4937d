//! Built-in verification sweeps.
//!
//! Each suite evaluates a fixed grid of checks and returns every record, in a
//! deterministic order, so the caller can summarise, emit CSV, or locate the
//! first failure. Grid points are evaluated in parallel; results are collected
//! in input order.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{constants_feasibility, feasibility_threshold_c, ConstantsProfile, Param};
use crate::collar::ball_area;
use crate::error::{Error, Result};
use crate::heat::{
    gaussian_majorant_check, kernel_sum_majorant, ln_kernel, ln_kernel_tanh_sinh, total_mass,
};
use crate::modes::{certify_mode, cosh_ratio, mass_ratio_of};
use crate::nets::{greedy_separated_net, is_maximal, sample_hyperbolic_ball};
use crate::MASS_RATIO_CEILING;

/// Slack allowed above the mass-ratio ceiling.
pub const RATIO_SLACK: f64 = 1e-9;
/// Allowed Wronskian drift, as a multiple of the solver tolerance.
pub const WRONSKIAN_FACTOR: f64 = 10.0;
/// Closed form versus quadrature for the cosh^2 ratios.
pub const COSH_QUADRATURE_TOL: f64 = 1e-10;
/// Deviation of the total heat-kernel mass from 1.
pub const MASS_TOL: f64 = 1e-6;
/// Agreement of the two kernel quadratures, relative.
pub const ORACLE_TOL: f64 = 1e-8;
/// Relative accuracy of the located feasibility threshold.
pub const THRESHOLD_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Modes,
    Ratios,
    Kernel,
    Nets,
    Constants,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Modes,
        Suite::Ratios,
        Suite::Kernel,
        Suite::Nets,
        Suite::Constants,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Modes => "modes",
            Suite::Ratios => "ratios",
            Suite::Kernel => "kernel",
            Suite::Nets => "nets",
            Suite::Constants => "constants",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Solver tolerance for the mode integrations.
    pub tol: f64,
    /// Fault injection for harness checks. At 1 the measured mode ratios are
    /// used as is; otherwise each ratio is first raised to the ceiling and then
    /// multiplied by this factor, so any value above 1 must fail the suite.
    pub perturb_ratio: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tol: 1e-9,
            perturb_ratio: 1.0,
        }
    }
}

/// One assertion at one grid point. `passed` is the verdict; `value` and
/// `limit` are the numbers it was based on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Suite,
    pub property: String,
    pub point: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(suite: Suite, property: &str, point: String, value: f64, limit: f64) -> Self {
        Check {
            suite,
            property: property.to_string(),
            point,
            value,
            limit,
            passed: value <= limit,
        }
    }

    fn holds(suite: Suite, property: &str, point: String, ok: bool) -> Self {
        Check {
            suite,
            property: property.to_string(),
            point,
            value: if ok { 1.0 } else { 0.0 },
            limit: 1.0,
            passed: ok,
        }
    }

    fn failed(suite: Suite, property: &str, point: String, err: &Error) -> Self {
        Check {
            suite,
            property: format!("{property} ({err})"),
            point,
            value: f64::NAN,
            limit: f64::NAN,
            passed: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub grid_points: usize,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: Suite, grid_points: usize, checks: Vec<Check>) -> Self {
        let passed = checks.iter().filter(|c| c.passed).count();
        SuiteReport {
            suite,
            grid_points,
            passed,
            failed: checks.len() - passed,
            checks,
        }
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> SuiteReport {
    match suite {
        Suite::Modes => modes_suite(cfg),
        Suite::Ratios => ratios_suite(),
        Suite::Kernel => kernel_suite(cfg.seed),
        Suite::Nets => nets_suite(cfg.seed),
        Suite::Constants => constants_suite(),
    }
}

/// The `(l, lambda, j)` grid of the mode-ratio certification.
pub fn mode_grid() -> Vec<(f64, f64, u32)> {
    let mut grid = Vec::new();
    for il in 1..=20 {
        let length = il as f64 / 20.0;
        for ilam in 0..=9 {
            let lambda = ilam as f64 * 0.11;
            let base = lambda.sqrt().floor() as u32;
            for j in base + 1..=base + 4 {
                grid.push((length, lambda, j));
            }
        }
    }
    grid
}

fn perturbed(ratio: f64, factor: f64) -> f64 {
    if factor == 1.0 {
        ratio
    } else {
        ratio.max(MASS_RATIO_CEILING) * factor
    }
}

fn modes_suite(cfg: &VerifyConfig) -> SuiteReport {
    let grid = mode_grid();
    let checks: Vec<Check> = grid
        .par_iter()
        .flat_map_iter(|&(length, lambda, j)| {
            let point = format!("l={length:.2} lambda={lambda:.2} j={j}");
            match certify_mode(length, lambda, j, cfg.tol) {
                Ok(cert) => vec![
                    Check::at_most(
                        Suite::Modes,
                        "phi mass ratio",
                        point.clone(),
                        perturbed(cert.ratio_phi, cfg.perturb_ratio),
                        MASS_RATIO_CEILING + RATIO_SLACK,
                    ),
                    Check::at_most(
                        Suite::Modes,
                        "psi mass ratio",
                        point.clone(),
                        perturbed(cert.ratio_psi, cfg.perturb_ratio),
                        MASS_RATIO_CEILING + RATIO_SLACK,
                    ),
                    Check::at_most(
                        Suite::Modes,
                        "wronskian drift",
                        point,
                        cert.wronskian_drift,
                        WRONSKIAN_FACTOR * cfg.tol,
                    ),
                ],
                Err(e) => vec![Check::failed(Suite::Modes, "mode solve", point, &e)],
            }
        })
        .collect();
    SuiteReport::new(Suite::Modes, grid.len(), checks)
}

fn closed_form_unit(w: f64) -> f64 {
    (2.0 * w - 2.0 + (2.0 * w - 2.0).sinh()) / (2.0 * w + (2.0 * w).sinh())
}

fn ratios_suite() -> SuiteReport {
    const SAMPLES: usize = 10_000;
    const QUADRATURE_EVERY: usize = 50;
    let mut points: Vec<(f64, f64, f64, bool)> = (0..SAMPLES)
        .map(|i| {
            let w = 1.0 + 29.0 * i as f64 / (SAMPLES - 1) as f64;
            (1.0, w, 1.0, i % QUADRATURE_EVERY == 0)
        })
        .collect();
    for k in 1..=9 {
        let delta = 0.05 * k as f64;
        for i in 0..200 {
            let w = 1.0 / delta + 2.0 + 0.5 * i as f64;
            points.push((delta, w, 1.0 / delta, i % 10 == 0));
        }
    }
    let checks: Vec<Check> = points
        .par_iter()
        .flat_map_iter(|&(delta, w, trim, with_quadrature)| {
            let s = Suite::Ratios;
            let point = format!("delta={delta:.2} w={w:.6}");
            let mut out = Vec::new();
            if delta == 1.0 {
                // the closed form itself is defined down to w = 1, where it vanishes
                let direct = closed_form_unit(w);
                out.push(Check::at_most(s, "closed form ratio", point.clone(), direct, MASS_RATIO_CEILING));
                if w <= trim {
                    return out;
                }
            }
            let r = match cosh_ratio(w, trim, delta) {
                Ok(r) => r,
                Err(e) => {
                    out.push(Check::failed(s, "cosh^2 ratio", point, &e));
                    return out;
                }
            };
            out.push(Check::at_most(s, "cosh^2 ratio", point.clone(), r, MASS_RATIO_CEILING));
            if delta == 1.0 {
                let direct = closed_form_unit(w);
                out.push(Check::at_most(
                    s,
                    "closed form identity",
                    point.clone(),
                    (r - direct).abs(),
                    1e-13 * direct,
                ));
            }
            if with_quadrature {
                match mass_ratio_of(|x| (delta * x).cosh(), w - trim, w) {
                    Ok(q) => out.push(Check::at_most(
                        s,
                        "closed form vs quadrature",
                        point,
                        (q - r).abs(),
                        COSH_QUADRATURE_TOL,
                    )),
                    Err(e) => out.push(Check::failed(s, "quadrature", point, &e)),
                }
            }
            out
        })
        .collect();
    SuiteReport::new(Suite::Ratios, points.len(), checks)
}

/// `5 e^{-2} + 1 / (1 - e^{-1})`, a uniform ceiling for `sum e^{-4t}` on `t >= 1`
/// implied by the split bound.
pub fn majorant_scaled_ceiling() -> f64 {
    5.0 * (-2f64).exp() + 1.0 / (1.0 - (-1f64).exp())
}

fn kernel_suite(seed: u64) -> SuiteReport {
    let s = Suite::Kernel;
    let mut checks = Vec::new();

    let masses: Vec<(f64, f64)> = vec![(0.5, 1.0), (1.0, 1.0), (5.0, 1.0), (4.0, 0.5), (2.0, 0.25)];
    checks.extend(masses.par_iter().map(|&(t, eps)| {
        let point = format!("t={t} eps={eps}");
        match total_mass(t, eps) {
            Ok(m) => Check::at_most(s, "total mass", point, (m - 1.0).abs(), MASS_TOL),
            Err(e) => Check::failed(s, "total mass", point, &e),
        }
    }).collect::<Vec<_>>());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<(f64, f64)> = (0..100)
        .map(|_| {
            let t = 10f64.powf(rng.gen_range(-3.0..=3.0));
            let rho = rng.gen_range(0.0..=100.0);
            (t, rho)
        })
        .collect();
    checks.extend(samples.par_iter().map(|&(t, rho)| {
        let point = format!("t={t:.6e} rho={rho:.6}");
        match (ln_kernel(t, rho), ln_kernel_tanh_sinh(t, rho)) {
            // |ln a - ln b| bounds the relative difference to first order
            (Ok(a), Ok(b)) => Check::at_most(s, "two-oracle agreement", point, (a - b).abs(), ORACLE_TOL),
            (Err(e), _) | (_, Err(e)) => Check::failed(s, "two-oracle agreement", point, &e),
        }
    }).collect::<Vec<_>>());

    let ts: Vec<f64> = (0..=20).map(|i| 10f64.powf(-3.0 + 0.3 * i as f64)).collect();
    let rhos: Vec<f64> = (0..=50).map(|i| 2.0 * i as f64).collect();
    checks.extend(ts.par_iter().map(|&t| {
        let point = format!("t={t:.6e}");
        let column: Result<Vec<f64>> = rhos.iter().map(|&r| ln_kernel(t, r)).collect();
        match column {
            Ok(c) => Check::holds(
                s,
                "positive and decreasing in rho",
                point,
                c.iter().all(|v| v.is_finite()) && c.windows(2).all(|w| w[1] < w[0]),
            ),
            Err(e) => Check::failed(s, "positive and decreasing in rho", point, &e),
        }
    }).collect::<Vec<_>>());

    let ceiling = majorant_scaled_ceiling();
    let sum_ts: Vec<f64> = (0..=490).map(|i| 1.0 + 0.1 * i as f64).collect();
    checks.extend(sum_ts.par_iter().flat_map_iter(|&t| {
        let point = format!("t={t:.1}");
        match kernel_sum_majorant(t) {
            Ok(m) => vec![
                Check::at_most(s, "series below split bound", point.clone(), m.sum, m.split_bound),
                Check::at_most(s, "series times e^-4t bounded", point, m.scaled, ceiling),
            ],
            Err(e) => vec![Check::failed(s, "majorant series", point, &e)],
        }
    }).collect::<Vec<_>>());

    let grid_t: Vec<f64> = (0..=49).map(|i| 1.0 + i as f64).collect();
    let grid_rho: Vec<f64> = (0..=40).map(|i| i as f64).collect();
    match gaussian_majorant_check(1.0, &grid_t, &grid_rho) {
        Ok(r) => {
            let point = format!("eps=1 t=[1,50] rho=[0,40] argmax=({}, {})", r.argmax_t, r.argmax_rho);
            checks.push(Check::holds(s, "gaussian majorant finite", point.clone(), r.finite));
            checks.push(Check::holds(s, "origin column bounded by k_1(0)", point, r.origin_column_bounded));
            let doubling: Result<Vec<bool>> = grid_t
                .iter()
                .flat_map(|&t| (1..=20).map(move |i| (t, i as f64)))
                .map(|(t, rho)| {
                    let q = crate::heat::KernelQuery { t, rho: 2.0 * rho, eps: 1.0 };
                    let lk = crate::heat::ln_kernel_rescaled(q)?;
                    Ok((lk + 4.0 * rho * rho / (8.0 * t)).exp() <= r.c_star)
                })
                .collect();
            match doubling {
                Ok(v) => checks.push(Check::holds(
                    s,
                    "doubled distance stays below C*",
                    format!("C*={:.17e}", r.c_star),
                    v.into_iter().all(|b| b),
                )),
                Err(e) => checks.push(Check::failed(s, "doubled distance", String::new(), &e)),
            }
        }
        Err(e) => checks.push(Check::failed(s, "gaussian majorant", String::new(), &e)),
    }

    let grid_points = masses.len() + samples.len() + ts.len() + sum_ts.len() + 1;
    SuiteReport::new(s, grid_points, checks)
}

/// Parameters of the seeded net instances: `(eps, radius, n, r, sample seed)`.
pub fn net_instances(seed: u64) -> Vec<(f64, f64, usize, f64, u64)> {
    let epss = [0.25, 0.5, 1.0];
    let mut out: Vec<_> = (0..99u64)
        .map(|k| {
            let eps = epss[(k % 3) as usize];
            let radius = 6.0 + (k % 5) as f64;
            let n = 500 + ((k * 937) % 4500) as usize;
            let r = 4.0 + (k % 4) as f64;
            (eps, radius, n, r, seed.wrapping_add(k))
        })
        .collect();
    out.push((1.0, 10.0, 10_000, 4.0, seed.wrapping_add(99)));
    out
}

fn nets_suite(seed: u64) -> SuiteReport {
    let s = Suite::Nets;
    let instances = net_instances(seed);
    let checks: Vec<Check> = instances
        .par_iter()
        .flat_map_iter(|&(eps, radius, n, r, sample_seed)| {
            let point = format!("eps={eps} radius={radius} n={n} r={r} seed={sample_seed}");
            let run = || -> Result<Vec<Check>> {
                let cloud = sample_hyperbolic_ball(eps, radius, n, sample_seed)?;
                let net = greedy_separated_net(&cloud, r, 0)?;
                let bound = crate::nets::net_cardinality_bound(ball_area(eps, radius)?, r)?;
                let mut out = vec![
                    Check::holds(s, "separated", point.clone(), net.is_separated),
                    Check::holds(s, "covering", point.clone(), net.is_net),
                    Check::at_most(s, "cardinality bound", point.clone(), net.selected.len() as f64, bound.value),
                ];
                if n <= 1000 {
                    out.push(Check::holds(s, "maximal", point.clone(), is_maximal(&cloud, &net)?));
                }
                Ok(out)
            };
            run().unwrap_or_else(|e| vec![Check::failed(s, "net instance", point.clone(), &e)])
        })
        .collect();
    SuiteReport::new(s, instances.len(), checks)
}

fn constants_suite() -> SuiteReport {
    let s = Suite::Constants;
    let p = ConstantsProfile::default();
    let mut checks = vec![Check::holds(
        s,
        "example tuple feasible",
        "C'=1e5 C=1e4 c=1e-7".into(),
        constants_feasibility(&p).feasible,
    )];
    let exact = 1.0 / (4.0 * 50.0 * (1.0 + p.big_c.value));
    match feasibility_threshold_c(&p, 1e-9) {
        Ok(t) => checks.push(Check::at_most(
            s,
            "threshold matches 1/(4h)",
            format!("located={t:.17e} exact={exact:.17e}"),
            (t / exact - 1.0).abs(),
            THRESHOLD_TOL,
        )),
        Err(e) => checks.push(Check::failed(s, "threshold", String::new(), &e)),
    }
    checks.push(Check::holds(
        s,
        "h = 50(1+C)",
        format!("h={}", p.h()),
        p.h() == 50.0 * (1.0 + p.big_c.value),
    ));
    checks.push(Check::holds(
        s,
        "c = 1e-3 infeasible",
        "C=1e4".into(),
        !constants_feasibility(&p.with_c(1e-3)).feasible,
    ));
    let mut small = p;
    small.big_c = Param::user(10.0);
    checks.push(Check::holds(
        s,
        "C = 10 infeasible",
        "C=10".into(),
        !constants_feasibility(&small).feasible,
    ));
    SuiteReport::new(s, 5, checks)
}
