//! One-dimensional quadrature: adaptive Gauss-Kronrod, tanh-sinh with
//! endpoint-distance callbacks, and fixed Gauss-Legendre panels.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

// 15-point Kronrod abscissae on [0, 1]; odd indices are the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive 7/15 Gauss-Kronrod quadrature on a finite interval.
///
/// Bisects the panel with the largest error estimate until the summed
/// estimate falls below `max(abs_tol, rel_tol * |value|)`.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Integral> {
    const MAX_PANELS: usize = 4000;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("gauss_kronrod needs finite limits"));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (v, e) = kronrod15(&f, a, b);
    let mut panels = vec![(a, b, v, e)];
    let mut evaluations = 15;
    loop {
        let value: f64 = panels.iter().map(|p| p.2).sum();
        let error: f64 = panels.iter().map(|p| p.3).sum();
        if !value.is_finite() {
            return Err(Error::NonFinite("integrand".into()));
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Integral {
                value,
                error,
                evaluations,
            });
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::Quadrature(format!(
                "error estimate {error:e} after {MAX_PANELS} panels on [{a}, {b}]"
            )));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Quadrature(format!(
                "panel [{lo}, {hi}] cannot be bisected further"
            )));
        }
        let (v1, e1) = kronrod15(&f, lo, mid);
        let (v2, e2) = kronrod15(&f, mid, hi);
        evaluations += 30;
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
}

/// Tanh-sinh (double exponential) quadrature on `[a, b]`.
///
/// The integrand receives `(x, x - a, b - x)` with both endpoint distances
/// computed without cancellation, so integrable endpoint singularities can
/// be evaluated from the distance directly.
pub fn tanh_sinh<F: Fn(f64, f64, f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<Integral> {
    const T_MAX: f64 = 4.5;
    const MAX_LEVEL: u32 = 14;
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::domain("tanh_sinh needs finite limits with a <= b"));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let half = 0.5 * (b - a);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let node = |t: f64| -> f64 {
        let u = half_pi * t.sinh();
        let dl = half * 2.0 / (1.0 + (-2.0 * u).exp());
        let dr = half * 2.0 / (1.0 + (2.0 * u).exp());
        if dl <= 0.0 || dr <= 0.0 {
            return 0.0;
        }
        let x = if dl < dr { a + dl } else { b - dr };
        let cu = u.cosh();
        let w = half * half_pi * t.cosh() / (cu * cu);
        let fx = f(x, dl, dr);
        if w == 0.0 {
            0.0
        } else {
            w * fx
        }
    };

    let mut h = 0.5;
    let mut sum = node(0.0);
    let mut evaluations = 1;
    let mut k = 1;
    while k as f64 * h <= T_MAX {
        let t = k as f64 * h;
        sum += node(t) + node(-t);
        evaluations += 2;
        k += 1;
    }
    let mut estimate = sum * h;
    for _ in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= T_MAX {
            let t = k as f64 * h;
            sum += node(t) + node(-t);
            evaluations += 2;
            k += 2;
        }
        let next = sum * h;
        if !next.is_finite() {
            return Err(Error::NonFinite("tanh-sinh integrand".into()));
        }
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= rel_tol * next.abs() {
            return Ok(Integral {
                value: next,
                error: diff,
                evaluations,
            });
        }
    }
    Err(Error::Quadrature(format!(
        "tanh-sinh did not reach relative tolerance {rel_tol:e} on [{a}, {b}]"
    )))
}

/// Six-point Gauss-Legendre nodes on [-1, 1]; exact for polynomials of degree <= 11.
pub const GL6_NODES: [f64; 6] = [
    -0.932_469_514_203_152_1,
    -0.661_209_386_466_264_5,
    -0.238_619_186_083_196_9,
    0.238_619_186_083_196_9,
    0.661_209_386_466_264_5,
    0.932_469_514_203_152_1,
];
pub const GL6_WEIGHTS: [f64; 6] = [
    0.171_324_492_379_170_3,
    0.360_761_573_048_138_6,
    0.467_913_934_572_691_0,
    0.467_913_934_572_691_0,
    0.360_761_573_048_138_6,
    0.171_324_492_379_170_3,
];

/// Six-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre6<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    GL6_NODES
        .iter()
        .zip(GL6_WEIGHTS.iter())
        .map(|(&x, &w)| w * f(c + h * x))
        .sum::<f64>()
        * h
}
