//! Multiplicity-bound evaluators, the constant-feasibility system, radii and
//! level schedules, and dyadic mass accounting.
//!
//! The theorem constants are not explicit, so every evaluator is a calculator
//! for the *shape* of a bound: constants come from a [`ConstantsProfile`]
//! whose fields carry their provenance. Logarithms are natural throughout.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collar::eps_delta;
use crate::error::{Error, Result};
use crate::surface::SurfaceDescriptor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    PaperExample,
    User,
    Default,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub value: f64,
    pub provenance: Provenance,
}

impl Param {
    pub const fn new(value: f64, provenance: Provenance) -> Self {
        Self { value, provenance }
    }

    pub const fn user(value: f64) -> Self {
        Self::new(value, Provenance::User)
    }
}

/// Constants of the bound machinery. `h` and `c1` are derived, never stored,
/// so `h = 50 (1 + C)` and `9 c1 c2 = 1` hold by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsProfile {
    #[serde(rename = "K")]
    pub k: Param,
    #[serde(rename = "C_eps")]
    pub c_eps: Param,
    pub c: Param,
    #[serde(rename = "C")]
    pub big_c: Param,
    #[serde(rename = "C_prime")]
    pub c_prime: Param,
    pub c2: Param,
    pub c3: Param,
    #[serde(rename = "C1")]
    pub c_1: Param,
    #[serde(rename = "C2")]
    pub c_2: Param,
    #[serde(rename = "C3")]
    pub c_3: Param,
    #[serde(rename = "C4")]
    pub c_4: Param,
    #[serde(rename = "C5")]
    pub c_5: Param,
}

impl Default for ConstantsProfile {
    fn default() -> Self {
        let d = |v| Param::new(v, Provenance::Default);
        let example = |v| Param::new(v, Provenance::PaperExample);
        Self {
            k: d(1.0),
            c_eps: d(1.0),
            c: example(1e-7),
            big_c: example(1e4),
            c_prime: example(1e5),
            c2: d(1.0),
            c3: d(1.0),
            c_1: d(1.0),
            c_2: d(1.0),
            c_3: d(1.0),
            c_4: d(1.0),
            c_5: d(1.0),
        }
    }
}

impl ConstantsProfile {
    /// `h = 50 (1 + C)`.
    pub fn h(&self) -> f64 {
        50.0 * (1.0 + self.big_c.value)
    }

    /// `c1 = 1 / (9 c2)`.
    pub fn c1(&self) -> f64 {
        1.0 / (9.0 * self.c2.value)
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = Param::user(c);
        self
    }
}

fn check_eps_open(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

fn check_genus(g: u64) -> Result<()> {
    if g < 2 {
        return Err(Error::domain(format!("genus must be >= 2, got {g}")));
    }
    Ok(())
}

/// `ln ln x`, erroring when it would not be positive.
fn double_log(x: f64, what: &str) -> Result<f64> {
    if !(x > std::f64::consts::E) {
        return Err(Error::domain(format!(
            "{what} = {x} must exceed e for the double logarithm to be positive"
        )));
    }
    Ok(x.ln().ln())
}

/// `(K / eps^2) g / ln ln(10 g / (N + 1))`.
pub fn thm1_multiplicity_bound(g: u64, eps: f64, n_short: u64, k: f64) -> Result<f64> {
    check_genus(g)?;
    check_eps_open(eps)?;
    if !(k >= 1.0) {
        return Err(Error::domain(format!("K must be >= 1, got {k}")));
    }
    let x = 10.0 * g as f64 / (n_short as f64 + 1.0);
    Ok(k / (eps * eps) * g as f64 / double_log(x, "10g/(N+1)")?)
}

/// `C(eps) sqrt(lambda) g + 24 I`.
pub fn thm2_multiplicity_bound(
    lambda: f64,
    g: u64,
    eps: f64,
    i_thick: u64,
    delta: f64,
    c_eps: f64,
) -> Result<f64> {
    check_genus(g)?;
    let ceiling = eps_delta(delta)?;
    if !(lambda > 0.0 && lambda <= 0.25 - delta * delta) {
        return Err(Error::domain(format!(
            "lambda must lie in (0, 1/4 - delta^2] = (0, {}], got {lambda}",
            0.25 - delta * delta
        )));
    }
    if !(eps > 0.0 && eps < ceiling) {
        return Err(Error::domain(format!(
            "eps must lie in (0, eps_delta) = (0, {ceiling:e}), got {eps}"
        )));
    }
    if i_thick < 1 {
        return Err(Error::domain("at least one thick component is required"));
    }
    if !(c_eps > 0.0) {
        return Err(Error::domain(format!("C(eps) must be positive, got {c_eps}")));
    }
    Ok(c_eps * lambda.sqrt() * g as f64 + 24.0 * i_thick as f64)
}

/// The `lambda` at which the two bounds coincide, or `None` when the first
/// bound already lies below the `24 I` floor of the second.
pub fn thm2_crossover_lambda(thm1: f64, g: u64, i_thick: u64, c_eps: f64) -> Option<f64> {
    let gap = thm1 - 24.0 * i_thick as f64;
    (gap > 0.0).then(|| (gap / (c_eps * g as f64)).powi(2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub violated: Vec<String>,
}

/// Checks the constant system with `h = 50 (1 + C)`; lists every violation.
pub fn constants_feasibility(p: &ConstantsProfile) -> Feasibility {
    let (cp, big, c, h) = (p.c_prime.value, p.big_c.value, p.c.value, p.h());
    let checks = [
        ("C' > 48", cp > 48.0),
        ("C > 16", big > 16.0),
        ("c > 0", c > 0.0),
        ("c < 1/(8+6C')", c < 1.0 / (8.0 + 6.0 * cp)),
        ("c < 1/(4h)", c < 1.0 / (4.0 * h)),
        ("C'^2 > 80+48C'", cp * cp > 80.0 + 48.0 * cp),
        ("C'^2 > 16/c", cp * cp > 16.0 / c),
        ("C^2/64 > h+4", big * big / 64.0 > h + 4.0),
    ];
    let violated: Vec<String> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| name.to_string())
        .collect();
    Feasibility {
        feasible: violated.is_empty(),
        violated,
    }
}

/// Largest feasible `c` above the profile's own (feasible) `c`, located by
/// geometric bisection to relative width `rel_tol`.
pub fn feasibility_threshold_c(p: &ConstantsProfile, rel_tol: f64) -> Result<f64> {
    if !constants_feasibility(p).feasible {
        return Err(Error::domain("the starting profile is not feasible"));
    }
    let feasible = |c: f64| constants_feasibility(&p.with_c(c)).feasible;
    let mut lo = p.c.value;
    let mut hi = lo;
    while feasible(hi) {
        hi *= 10.0;
        if !hi.is_finite() {
            return Err(Error::domain("feasible region in c is unbounded"));
        }
    }
    while hi / lo - 1.0 > rel_tol {
        let mid = (lo * hi).sqrt();
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiiSchedule {
    pub r1: f64,
    pub r2: f64,
    pub n: u64,
    /// `r1 < 4`: far from the large-radius regime the argument assumes.
    pub small_r1_warning: bool,
}

/// `r1 = c ln ln x`, `r2 = c ln x`, `n = floor(r2 / r1)` with `x = K g / (N + 1)`.
pub fn radii_schedule(c: f64, k: f64, g: u64, n_short: u64) -> Result<RadiiSchedule> {
    if !(c > 0.0 && k > 0.0) {
        return Err(Error::domain(format!("c and K must be positive, got c {c}, K {k}")));
    }
    let x = k * g as f64 / (n_short as f64 + 1.0);
    let r1 = c * double_log(x, "Kg/(N+1)")?;
    let r2 = c * x.ln();
    Ok(RadiiSchedule {
        r1,
        r2,
        n: (r2 / r1).floor() as u64,
        small_r1_warning: r1 < 4.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSchedule {
    pub mu: Vec<f64>,
    pub radius: Vec<f64>,
}

/// `mu_j = 2^j sqrt(lambda)` and `R_j = c1 2^j / sqrt(lambda)` for `j = 0..=j_max`.
pub fn level_schedules(lambda: f64, c1: f64, j_max: u32) -> Result<LevelSchedule> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!("lambda must be positive, got {lambda}")));
    }
    if !(c1 > 0.0) {
        return Err(Error::domain(format!("c1 must be positive, got {c1}")));
    }
    let s = lambda.sqrt();
    let pow = |j: u32| 2f64.powi(j as i32);
    Ok(LevelSchedule {
        mu: (0..=j_max).map(|j| pow(j) * s).collect(),
        radius: (0..=j_max).map(|j| c1 * pow(j) / s).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DyadicCase {
    /// The top level's radius reaches the diameter: the total is exactly 8.
    Case1,
    /// Level-by-level accounting using the ball-area floor.
    Case2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicMass {
    pub j0: usize,
    pub case: DyadicCase,
    pub value: f64,
    /// `4 / mu_{j-1}` for `j >= 1`; `None` at `j = 0`.
    pub level_caps: Vec<Option<f64>>,
    /// Levels whose supplied area exceeds its cap.
    pub cap_violations: Vec<usize>,
}

/// Bounds `sum_j mu_j area(G_j)` from the level areas.
pub fn dyadic_mass_bound(
    level_areas: &[f64],
    lambda: f64,
    area_thick_plus_shell: f64,
    diam_c: f64,
    p: &ConstantsProfile,
) -> Result<DyadicMass> {
    if level_areas.is_empty() {
        return Err(Error::domain("at least one level area is required"));
    }
    if let Some(a) = level_areas.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(Error::domain(format!("level areas must be finite and >= 0, got {a}")));
    }
    if !(lambda > 0.0 && lambda < 0.25) {
        return Err(Error::domain(format!("lambda must lie in (0, 1/4), got {lambda}")));
    }
    if !(area_thick_plus_shell >= 0.0 && diam_c > 0.0) {
        return Err(Error::domain("area must be >= 0 and diameter positive"));
    }
    let c1 = p.c1();
    let c3 = p.c3.value;
    let j0 = level_areas.iter().rposition(|&a| a > 0.0).unwrap_or(0);
    let sched = level_schedules(lambda, c1, (level_areas.len() - 1) as u32)?;
    let level_caps: Vec<Option<f64>> = (0..level_areas.len())
        .map(|j| (j > 0).then(|| 4.0 / sched.mu[j - 1]))
        .collect();
    let cap_violations = level_caps
        .iter()
        .zip(level_areas)
        .enumerate()
        .filter(|(_, (cap, &a))| cap.is_some_and(|c| a > c))
        .map(|(j, _)| j)
        .collect();
    let s = lambda.sqrt();
    let (case, value) = if sched.radius[j0] >= diam_c {
        (DyadicCase::Case1, 8.0)
    } else {
        let tail: f64 = (1..=j0)
            .map(|j| 8.0 * s * area_thick_plus_shell / (c1 * c3 * 2f64.powi(j as i32)))
            .sum();
        (DyadicCase::Case2, s * level_areas[0] + tail)
    };
    Ok(DyadicMass {
        j0,
        case,
        value,
        level_caps,
        cap_violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stronger {
    #[serde(rename = "thm1")]
    Thm1,
    #[serde(rename = "thm2")]
    Thm2,
    #[serde(rename = "tie")]
    Tie,
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl Stronger {
    pub fn compare(thm1: Option<f64>, thm2: Option<f64>) -> Self {
        match (thm1, thm2) {
            (Some(a), Some(b)) if (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) => Stronger::Tie,
            (Some(a), Some(b)) if a < b => Stronger::Thm1,
            (Some(_), Some(_)) => Stronger::Thm2,
            (Some(_), None) => Stronger::Thm1,
            (None, Some(_)) => Stronger::Thm2,
            (None, None) => Stronger::NotApplicable,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Stronger::Thm1 => "thm1",
            Stronger::Thm2 => "thm2",
            Stronger::Tie => "tie",
            Stronger::NotApplicable => "n/a",
        }
    }
}

/// Inputs of a single bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInput {
    pub g: u64,
    pub eps: f64,
    pub lambda: Option<f64>,
    pub n_short: u64,
    pub i_thick: u64,
    pub delta: f64,
    pub j_max: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub input: BoundInput,
    pub thm1_bound: Option<f64>,
    pub thm1_error: Option<String>,
    pub thm2_bound: Option<f64>,
    pub thm2_error: Option<String>,
    pub radii: Option<RadiiSchedule>,
    pub mu_schedule: Vec<f64>,
    pub r_schedule: Vec<f64>,
    pub stronger: Stronger,
    pub h: f64,
    pub c1: f64,
    pub constants: ConstantsProfile,
}

fn split<T>(r: Result<T>) -> (Option<T>, Option<String>) {
    match r {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

/// Evaluates both bounds and the intermediate schedules; per-bound domain
/// errors are recorded rather than propagated.
pub fn bound_report(input: BoundInput, p: &ConstantsProfile) -> BoundReport {
    let (thm1_bound, thm1_error) =
        split(thm1_multiplicity_bound(input.g, input.eps, input.n_short, p.k.value));
    let (thm2_bound, thm2_error) = split(match input.lambda {
        Some(lambda) => thm2_multiplicity_bound(
            lambda,
            input.g,
            input.eps,
            input.i_thick,
            input.delta,
            p.c_eps.value,
        ),
        None => Err(Error::domain("lambda required")),
    });
    let radii = radii_schedule(p.c.value, p.k.value, input.g, input.n_short).ok();
    let levels = input
        .lambda
        .and_then(|l| level_schedules(l, p.c1(), input.j_max).ok());
    let (mu_schedule, r_schedule) = levels.map(|l| (l.mu, l.radius)).unwrap_or_default();
    BoundReport {
        input,
        stronger: Stronger::compare(thm1_bound, thm2_bound),
        thm1_bound,
        thm1_error,
        thm2_bound,
        thm2_error,
        radii,
        mu_schedule,
        r_schedule,
        h: p.h(),
        c1: p.c1(),
        constants: *p,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub g: u64,
    pub eps: f64,
    pub lambda: f64,
    pub n_eps: u64,
    pub i_eps: u64,
    pub thm1: Option<f64>,
    pub thm2: Option<f64>,
    pub stronger: Stronger,
}

/// Both bounds for every (surface, eps, lambda) cell, in input order.
pub fn bound_comparison_sweep(
    family: &[SurfaceDescriptor],
    eps_grid: &[f64],
    lambda_grid: &[f64],
    delta: f64,
    p: &ConstantsProfile,
) -> Result<Vec<SweepRow>> {
    for d in family {
        d.validate()?;
    }
    let cells: Vec<(&SurfaceDescriptor, f64, f64)> = family
        .iter()
        .flat_map(|d| {
            eps_grid
                .iter()
                .flat_map(move |&e| lambda_grid.iter().map(move |&l| (d, e, l)))
        })
        .collect();
    cells
        .par_iter()
        .map(|&(d, eps, lambda)| {
            let g = d.genus as u64;
            let n_eps = d.count_short_geodesics(eps)? as u64;
            let i_eps = d.thick_component_count(eps)? as u64;
            let thm1 = thm1_multiplicity_bound(g, eps, n_eps, p.k.value).ok();
            let thm2 =
                thm2_multiplicity_bound(lambda, g, eps, i_eps, delta, p.c_eps.value).ok();
            Ok(SweepRow {
                g,
                eps,
                lambda,
                n_eps,
                i_eps,
                thm1,
                thm2,
                stronger: Stronger::compare(thm1, thm2),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thm1_examples() {
        let b = thm1_multiplicity_bound(1_000_000, 0.25, 0, 1.0).unwrap();
        let oracle = 16e6 / (1e7f64).ln().ln();
        assert!((b - oracle).abs() < 1e-9 * oracle);
        assert!((b / 5.7554e6 - 1.0).abs() < 1e-4);
        let maximal = thm1_multiplicity_bound(1_000_000, 0.25, 2_999_997, 1.0).unwrap();
        assert!(maximal > b);
        let denom = (1e7f64 / 2_999_998.0).ln().ln();
        assert!((denom - 0.1856).abs() < 1e-4);
        assert!(thm1_multiplicity_bound(1_000_000, 1.0, 0, 1.0).is_err());
        assert!(thm1_multiplicity_bound(2, 0.5, 1000, 1.0).is_err());
    }

    #[test]
    fn thm2_examples() {
        let b = thm2_multiplicity_bound(0.01, 10_000, 1e-6, 2, 0.1, 1.0).unwrap();
        assert_eq!(b, 1048.0);
        let floor = thm2_multiplicity_bound(1e-300, 10_000, 1e-6, 1, 0.1, 1.0).unwrap();
        assert!((floor - 24.0).abs() < 1e-100);
        assert!(thm2_multiplicity_bound(0.25, 10, 1e-6, 1, 0.1, 1.0).is_err());
        assert!(thm2_multiplicity_bound(0.1, 10, 0.5, 1, 0.1, 1.0).is_err());
    }

    #[test]
    fn example_constants_feasible() {
        let p = ConstantsProfile::default();
        assert_eq!(constants_feasibility(&p), Feasibility { feasible: true, violated: vec![] });
        assert_eq!(p.h(), 500_050.0);
        assert_eq!(9.0 * p.c1() * p.c2.value, 1.0);
        let f = constants_feasibility(&p.with_c(1e-3));
        assert!(!f.feasible && f.violated.contains(&"c < 1/(4h)".to_string()));
        let mut small = p;
        small.big_c = Param::user(10.0);
        assert!(constants_feasibility(&small).violated.contains(&"C > 16".to_string()));
    }

    #[test]
    fn threshold_matches_closed_form() {
        let p = ConstantsProfile::default();
        let t = feasibility_threshold_c(&p, 1e-9).unwrap();
        let exact = 1.0 / (4.0 * 50.0 * (1.0 + 1e4));
        assert!((t / exact - 1.0).abs() < 1e-6);
    }

    #[test]
    fn radii_examples() {
        let r = radii_schedule(1e-7, 10.0, 1_000_000, 0).unwrap();
        assert!((r.r2 - 1.6118e-6).abs() < 1e-10);
        assert!((r.r1 - 2.7800e-7).abs() < 1e-11);
        assert_eq!(r.n, 5);
        let r = radii_schedule(1.0, 10.0, 1_000_000, 0).unwrap();
        assert!((r.r1 - 2.78).abs() < 1e-3 && (r.r2 - 16.12).abs() < 1e-2);
        assert!(r.small_r1_warning);
        assert!(radii_schedule(1.0, 10.0, 1_000_000, 9_999_999).is_err());
    }

    #[test]
    fn level_examples() {
        let l = level_schedules(0.25, 1.0, 3).unwrap();
        assert_eq!(l.mu, vec![0.5, 1.0, 2.0, 4.0]);
        let l = level_schedules(0.01, 0.1, 3).unwrap();
        assert!((l.radius[3] - 8.0).abs() < 1e-12);
        for j in 0..4 {
            assert!((l.mu[j] * l.radius[j] - 0.1 * 4f64.powi(j as i32)).abs() < 1e-12);
        }
        assert!(level_schedules(0.0, 1.0, 3).is_err());
    }

    #[test]
    fn dyadic_cases() {
        let p = ConstantsProfile::default();
        let single = dyadic_mass_bound(&[3.0, 0.0, 0.0], 0.04, 100.0, 1e6, &p).unwrap();
        assert_eq!(single.case, DyadicCase::Case2);
        assert!((single.value - 0.2 * 3.0).abs() < 1e-15);
        let case1 = dyadic_mass_bound(&[3.0, 1.0, 2.0], 0.04, 100.0, 1e-3, &p).unwrap();
        assert_eq!((case1.case, case1.value), (DyadicCase::Case1, 8.0));

        // c1 c3 = 0.01: c2 = 1/(9 * 0.01), c3 = 1
        let mut q = p;
        q.c2 = Param::user(1.0 / 0.09);
        let m = dyadic_mass_bound(&[5.0, 1.0, 1.0, 1.0, 1.0], 0.04, 100.0, 1e9, &q).unwrap();
        let oracle = 0.2 * 5.0 + (1..=4).map(|j| 160.0 / 2f64.powi(j)).sum::<f64>() / 0.01;
        assert_eq!(m.j0, 4);
        assert!((m.value - oracle).abs() < 1e-9 * oracle, "{} vs {oracle}", m.value);
        assert!(dyadic_mass_bound(&[-1.0], 0.04, 1.0, 1.0, &p).is_err());
        assert!(dyadic_mass_bound(&[1.0], 0.3, 1.0, 1.0, &p).is_err());
    }

    #[test]
    fn stronger_marks_smaller() {
        assert_eq!(Stronger::compare(Some(1.0), Some(2.0)), Stronger::Thm1);
        assert_eq!(Stronger::compare(Some(3.0), Some(2.0)), Stronger::Thm2);
        assert_eq!(Stronger::compare(Some(2.0), Some(2.0)), Stronger::Tie);
        assert_eq!(Stronger::compare(Some(2.0), None), Stronger::Thm1);
        assert_eq!(Stronger::compare(None, None), Stronger::NotApplicable);
        assert_eq!(serde_json::to_string(&Stronger::NotApplicable).unwrap(), "\"n/a\"");
    }

    #[test]
    fn report_records_missing_lambda() {
        let input = BoundInput {
            g: 1_000_000,
            eps: 0.25,
            lambda: None,
            n_short: 0,
            i_thick: 1,
            delta: 0.1,
            j_max: 4,
        };
        let r = bound_report(input, &ConstantsProfile::default());
        assert!(r.thm1_bound.is_some());
        assert_eq!(r.thm2_error.as_deref(), Some("lambda required"));
        assert_eq!(r.stronger, Stronger::Thm1);
    }
}
