//! Heat kernel of the hyperbolic plane and the majorants built from it.
//!
//! For curvature `-1`,
//!
//! ```text
//! k_t(rho) = sqrt(2) e^{-t/4} / (4 pi t)^{3/2}
//!            * int_rho^inf s e^{-s^2/(4t)} / sqrt(cosh s - cosh rho) ds.
//! ```
//!
//! Values are computed in log form: the factor `exp(-rho^2/(4t) - rho/2)` is
//! pulled out analytically, so the remaining integral is O(1) for every
//! `(t, rho)` in range and the kernel never underflows before it is needed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_kronrod, tanh_sinh};

pub const T_RANGE: (f64, f64) = (1e-3, 1e3);
pub const RHO_RANGE: (f64, f64) = (0.0, 100.0);
const INNER_TOL: f64 = 1e-13;

fn check_args(t: f64, rho: f64) -> Result<()> {
    if !(T_RANGE.0..=T_RANGE.1).contains(&t) {
        return Err(Error::domain(format!(
            "time {t} outside [{}, {}]",
            T_RANGE.0, T_RANGE.1
        )));
    }
    if !(RHO_RANGE.0..=RHO_RANGE.1).contains(&rho) {
        return Err(Error::domain(format!(
            "distance {rho} outside [{}, {}]",
            RHO_RANGE.0, RHO_RANGE.1
        )));
    }
    Ok(())
}

/// `ln` of the prefactor times the pulled-out Gaussian and `e^{-rho/2}`.
fn log_envelope(t: f64, rho: f64) -> f64 {
    0.5 * std::f64::consts::LN_2
        - 0.25 * t
        - 1.5 * (4.0 * std::f64::consts::PI * t).ln()
        - rho * rho / (4.0 * t)
        - 0.5 * rho
}

/// `2 e^{-rho} sinh(rho + x) sinh(x)`, i.e. `(cosh(rho + 2x) - cosh rho) e^{-rho}`.
fn reduced_gap(rho: f64, x: f64) -> f64 {
    2.0 * (-rho).exp() * (rho + x).sinh() * x.sinh()
}

/// Upper cut where the integrand has decayed by `e^{-60}` relative to O(1).
fn cutoff(t: f64, rho: f64) -> f64 {
    (-rho + (rho * rho + 240.0 * t).sqrt()).min(120.0)
}

/// `ln k_t(rho)` via the substitution `s = rho + v^2` and adaptive
/// Gauss-Kronrod in `v`.
pub fn ln_kernel(t: f64, rho: f64) -> Result<f64> {
    check_args(t, rho)?;
    let integrand = |v: f64| -> f64 {
        if v == 0.0 {
            return if rho == 0.0 {
                0.0
            } else {
                2.0 * rho / ((-rho).exp() * rho.sinh()).sqrt()
            };
        }
        let v2 = v * v;
        let gauss = (-(2.0 * rho * v2 + v2 * v2) / (4.0 * t)).exp();
        (rho + v2) * gauss * 2.0 * v / reduced_gap(rho, 0.5 * v2).sqrt()
    };
    let upper = cutoff(t, rho).sqrt();
    let integral = gauss_kronrod(integrand, 0.0, upper, INNER_TOL, 0.0)?;
    Ok(log_envelope(t, rho) + integral.value.ln())
}

/// `ln k_t(rho)` by tanh-sinh quadrature directly in `s`, letting the
/// double-exponential rule absorb the `(s - rho)^{-1/2}` endpoint singularity.
pub fn ln_kernel_tanh_sinh(t: f64, rho: f64) -> Result<f64> {
    check_args(t, rho)?;
    let integrand = |_s: f64, u: f64, _: f64| -> f64 {
        (rho + u) * (-u * (2.0 * rho + u) / (4.0 * t)).exp() / reduced_gap(rho, 0.5 * u).sqrt()
    };
    let integral = tanh_sinh(integrand, 0.0, cutoff(t, rho), 1e-12)?;
    Ok(log_envelope(t, rho) + integral.value.ln())
}

/// Heat kernel of the curvature `-1` plane at time `t` and distance `rho`.
pub fn kernel_curv_minus1(t: f64, rho: f64) -> Result<f64> {
    Ok(ln_kernel(t, rho)?.exp())
}

/// Time, distance and curvature scale (curvature `-eps^2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelQuery {
    pub t: f64,
    pub rho: f64,
    pub eps: f64,
}

impl KernelQuery {
    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::domain(format!("curvature scale must lie in (0, 1], got {}", self.eps)));
        }
        if !(self.t > 0.0) {
            return Err(Error::domain(format!("time must be positive, got {}", self.t)));
        }
        if !(self.rho >= 0.0) {
            return Err(Error::domain(format!("distance must be >= 0, got {}", self.rho)));
        }
        Ok(())
    }
}

/// `ln k_{t,eps}(rho) = ln(eps^2 k_{eps^2 t}(eps rho))`.
pub fn ln_kernel_rescaled(q: KernelQuery) -> Result<f64> {
    q.validate()?;
    Ok(2.0 * q.eps.ln() + ln_kernel(q.eps * q.eps * q.t, q.eps * q.rho)?)
}

/// Heat kernel of the curvature `-eps^2` plane, `rho` measured in that metric.
pub fn kernel_rescaled(q: KernelQuery) -> Result<f64> {
    Ok(ln_kernel_rescaled(q)?.exp())
}

/// `int_0^inf k_{t,eps}(rho) 2 pi sinh(eps rho)/eps d rho`, which is 1.
pub fn total_mass(t: f64, eps: f64) -> Result<f64> {
    KernelQuery { t, rho: 0.0, eps }.validate()?;
    let tau = eps * eps * t;
    // the density peaks near sigma = tau and has fallen by e^{-60} here
    let sigma_max = (tau + (tau * tau + 240.0 * tau).sqrt()).min(RHO_RANGE.1);
    let failure = std::cell::Cell::new(None);
    let density = |rho: f64| -> f64 {
        let q = KernelQuery { t, rho, eps };
        match ln_kernel_rescaled(q) {
            Ok(lk) => {
                let sigma = eps * rho;
                // ln(2 pi sinh(sigma) / eps) without overflow
                let ln_circ = if sigma > 20.0 {
                    sigma - std::f64::consts::LN_2
                } else {
                    sigma.sinh().ln()
                };
                (lk + ln_circ + (2.0 * std::f64::consts::PI / eps).ln()).exp()
            }
            Err(e) => {
                failure.set(Some(e.to_string()));
                0.0
            }
        }
    };
    let integral = gauss_kronrod(density, 0.0, sigma_max / eps, 1e-11, 0.0)?;
    if let Some(msg) = failure.take() {
        return Err(Error::Quadrature(msg));
    }
    Ok(integral.value)
}

/// One grid point of the Gaussian majorant scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajorantPoint {
    pub t: f64,
    pub rho: f64,
    pub kernel: f64,
    /// `k_{t,eps}(rho) exp(rho^2 / (8t))`.
    pub gaussian_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantReport {
    pub eps: f64,
    pub c_star: f64,
    pub argmax_t: f64,
    pub argmax_rho: f64,
    pub finite: bool,
    /// `k_t(0) <= k_1(0)` for every scanned `t >= 1`.
    pub origin_column_bounded: bool,
    pub points: Vec<MajorantPoint>,
}

/// Scans `k_{t,eps}(rho) exp(rho^2/(8t))` over a `t x rho` grid with `t >= 1`.
pub fn gaussian_majorant_check(eps: f64, ts: &[f64], rhos: &[f64]) -> Result<MajorantReport> {
    if let Some(&t) = ts.iter().find(|&&t| !(t >= 1.0)) {
        return Err(Error::domain(format!("majorant scan needs t >= 1, got {t}")));
    }
    if ts.is_empty() || rhos.is_empty() {
        return Err(Error::domain("majorant scan needs a non-empty grid"));
    }
    let mut points = Vec::with_capacity(ts.len() * rhos.len());
    for &t in ts {
        for &rho in rhos {
            let lk = ln_kernel_rescaled(KernelQuery { t, rho, eps })?;
            points.push(MajorantPoint {
                t,
                rho,
                kernel: lk.exp(),
                gaussian_ratio: (lk + rho * rho / (8.0 * t)).exp(),
            });
        }
    }
    let best = points
        .iter()
        .max_by(|a, b| a.gaussian_ratio.total_cmp(&b.gaussian_ratio))
        .copied()
        .expect("non-empty grid");
    let k1 = ln_kernel_rescaled(KernelQuery { t: 1.0, rho: 0.0, eps })?;
    let origin_column_bounded = ts
        .iter()
        .map(|&t| ln_kernel_rescaled(KernelQuery { t, rho: 0.0, eps }))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|lk| lk <= k1 + 1e-12);
    Ok(MajorantReport {
        eps,
        c_star: best.gaussian_ratio,
        argmax_t: best.t,
        argmax_rho: best.rho,
        finite: best.gaussian_ratio.is_finite(),
        origin_column_bounded,
        points,
    })
}

/// The annulus-counting series `sum_m exp(m - m^2/(8t))` and its split bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajorantSum {
    pub t: f64,
    pub sum: f64,
    /// `(4t + 1) e^{2t} + e^{8t - ceil(4t)} / (1 - e^{-1})`.
    pub split_bound: f64,
    /// `sum * e^{-4t}`.
    pub scaled: f64,
    pub terms: usize,
}

pub const MAJORANT_T_RANGE: (f64, f64) = (1.0, 50.0);

pub fn kernel_sum_majorant(t: f64) -> Result<MajorantSum> {
    if !(MAJORANT_T_RANGE.0..=MAJORANT_T_RANGE.1).contains(&t) {
        return Err(Error::domain(format!(
            "majorant series needs t in [{}, {}], got {t}",
            MAJORANT_T_RANGE.0, MAJORANT_T_RANGE.1
        )));
    }
    let exponent = |m: f64| m - m * m / (8.0 * t);
    let mut sum = 0.0;
    let mut m = 0usize;
    loop {
        let mf = m as f64;
        sum += exponent(mf).exp();
        m += 1;
        let next = m as f64;
        if next > 4.0 * t + 1.0 {
            // terms decrease geometrically with ratio below q from here on
            let q = (exponent(next + 1.0) - exponent(next)).exp();
            let tail = exponent(next).exp() / (1.0 - q);
            if tail < 1e-13 * sum {
                break;
            }
        }
    }
    let split_bound = (4.0 * t + 1.0) * (2.0 * t).exp()
        + (8.0 * t - (4.0 * t).ceil()).exp() / (1.0 - (-1f64).exp());
    Ok(MajorantSum {
        t,
        sum,
        split_bound,
        scaled: sum * (-4.0 * t).exp(),
        terms: m,
    })
}
