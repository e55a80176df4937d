//! Dormand-Prince 5(4) integration of `u'' = V(x) u` for the full 2x2
//! fundamental matrix.
//!
//! Each accepted step is computed as a propagator `T` (the Runge-Kutta map
//! applied to the identity), so the fundamental matrix is `Y_n = T_n Y_{n-1}`.
//! Solutions of this equation grow like `exp(int sqrt(V))` and overflow `f64`
//! quickly, so `Y` is stored as `exp(s) * Yhat` with `Yhat` renormalized after
//! every step. The Wronskian `det Y` is accumulated as `sum ln det T_n`:
//! evaluating `phi psi' - phi' psi` directly from samples cancels away every
//! significant digit once the solutions exceed ~1e8.

use crate::error::{Error, Result};

pub type Mat2 = [[f64; 2]; 2];

const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn axpy(acc: &mut Mat2, s: f64, m: &Mat2) {
    for i in 0..2 {
        for j in 0..2 {
            acc[i][j] += s * m[i][j];
        }
    }
}

/// `A(x) M` with `A = [[0, 1], [V, 0]]`.
fn apply(v: f64, m: &Mat2) -> Mat2 {
    [[m[1][0], m[1][1]], [v * m[0][0], v * m[0][1]]]
}

fn max_abs(m: &Mat2) -> f64 {
    m.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

fn column_norm(m: &Mat2, col: usize) -> f64 {
    m[0][col].abs().max(m[1][col].abs())
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
// fifth-order weights; also the seventh stage row (FSAL)
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// fifth minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// continuous extension (Hairer-Norsett-Wanner, DOPRI5 dense output)
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// One accepted step.
///
/// The dense propagator on the step is
/// `R(theta) = I + theta (r1 + (1 - theta)(r2 + theta (r3 + (1 - theta) r4)))`
/// and the state is `exp(log_scale) * R(theta) * start`.
#[derive(Debug, Clone)]
pub struct Step {
    pub x: f64,
    pub h: f64,
    pub log_scale: f64,
    pub start: Mat2,
    dense: [Mat2; 4],
}

impl Step {
    pub fn propagator_at(&self, theta: f64) -> Mat2 {
        let [r1, r2, r3, r4] = &self.dense;
        let mut inner = *r4;
        for row in inner.iter_mut() {
            for v in row.iter_mut() {
                *v *= 1.0 - theta;
            }
        }
        let mut acc = IDENTITY;
        let mut m = *r3;
        axpy(&mut m, 1.0, &inner);
        let mut n = *r2;
        axpy(&mut n, theta, &m);
        let mut o = *r1;
        axpy(&mut o, 1.0 - theta, &n);
        axpy(&mut acc, theta, &o);
        acc
    }

    /// Scaled state `Yhat(x + theta h)`; multiply by `exp(log_scale)` for `Y`.
    pub fn scaled_state_at(&self, theta: f64) -> Mat2 {
        mul(&self.propagator_at(theta), &self.start)
    }
}

/// Output of [`integrate`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub steps: Vec<Step>,
    /// Grid `x_0 = 0 < x_1 < ... < x_N = x_end`.
    pub grid: Vec<f64>,
    /// `Yhat` at every grid point; `Y = exp(log_scale) Yhat`.
    pub states: Vec<Mat2>,
    pub log_scales: Vec<f64>,
    /// `ln |det Y| - ln |det Y_0|` accumulated from the step propagators.
    pub log_det_drift: Vec<f64>,
    pub rejected: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    /// Relative error allowed per unit of `x`, per column of `Y`.
    pub tol: f64,
    pub max_steps: usize,
}

/// Integrates `Y' = [[0, 1], [V(x), 0]] Y` from `x = 0` to `x_end`.
///
/// Step control is error-per-unit-step: the embedded estimate on a step of
/// size `h` must stay below `tol * h` relative to the column magnitude, which
/// bounds the accumulated error by roughly `tol * x_end`.
pub fn integrate<V: Fn(f64) -> f64>(
    potential: V,
    initial: Mat2,
    x_end: f64,
    settings: Settings,
) -> Result<Trajectory> {
    if !(x_end > 0.0 && x_end.is_finite()) {
        return Err(Error::domain(format!("integration endpoint must be positive, got {x_end}")));
    }
    let v0 = potential(0.0);
    if !v0.is_finite() {
        return Err(Error::NonFinite(format!("potential at 0 is {v0}")));
    }
    let tol = settings.tol;
    let mut x = 0.0;
    let norm0 = max_abs(&initial);
    let mut state = initial;
    for row in state.iter_mut() {
        for v in row.iter_mut() {
            *v /= norm0;
        }
    }
    let mut log_scale = norm0.ln();
    let mut h = (0.05 / v0.abs().max(1.0).sqrt()).min(x_end);
    let mut out = Trajectory {
        steps: Vec::new(),
        grid: vec![0.0],
        states: vec![state],
        log_scales: vec![log_scale],
        log_det_drift: vec![0.0],
        rejected: 0,
    };
    let mut log_det = 0.0;

    while x < x_end {
        if out.steps.len() >= settings.max_steps {
            return Err(Error::StepBudget(settings.max_steps));
        }
        let last = x + h >= x_end;
        if last {
            h = x_end - x;
        }
        let mut k = [[[0.0; 2]; 2]; 7];
        k[0] = apply(potential(x), &IDENTITY);
        let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        for (s, row) in rows.iter().enumerate() {
            let mut y = IDENTITY;
            for (j, &a) in row.iter().enumerate() {
                axpy(&mut y, h * a, &k[j]);
            }
            let vx = potential(x + C[s + 1] * h);
            if !vx.is_finite() {
                return Err(Error::NonFinite(format!("potential at {} is {vx}", x + C[s + 1] * h)));
            }
            k[s + 1] = apply(vx, &y);
        }
        let mut prop = IDENTITY;
        for (j, &b) in B.iter().enumerate() {
            axpy(&mut prop, h * b, &k[j]);
        }
        k[6] = apply(potential(x + h), &prop);
        let mut err = [[0.0; 2]; 2];
        for (j, &e) in E.iter().enumerate() {
            axpy(&mut err, h * e, &k[j]);
        }

        let next = mul(&prop, &state);
        let err_state = mul(&err, &state);
        let mut ratio: f64 = 0.0;
        for col in 0..2 {
            let scale = column_norm(&state, col).max(column_norm(&next, col));
            ratio = ratio.max(column_norm(&err_state, col) / (tol * h * scale));
        }
        if !ratio.is_finite() {
            return Err(Error::NonFinite(format!("error estimate at x = {x}")));
        }
        if ratio > 1.0 {
            out.rejected += 1;
            h *= (0.9 * ratio.powf(-0.25)).clamp(0.1, 0.9);
            continue;
        }

        // dense output coefficients for the identity-started propagator
        let mut r1 = prop;
        axpy(&mut r1, -1.0, &IDENTITY);
        let mut r2 = [[0.0; 2]; 2];
        axpy(&mut r2, h, &k[0]);
        axpy(&mut r2, -1.0, &r1);
        let mut r3 = r1;
        axpy(&mut r3, -h, &k[6]);
        axpy(&mut r3, -1.0, &r2);
        let mut r4 = [[0.0; 2]; 2];
        for (j, &d) in D.iter().enumerate() {
            axpy(&mut r4, h * d, &k[j]);
        }
        out.steps.push(Step {
            x,
            h,
            log_scale,
            start: state,
            dense: [r1, r2, r3, r4],
        });

        let det = prop[0][0] * prop[1][1] - prop[0][1] * prop[1][0];
        log_det += (det - 1.0).ln_1p();
        let m = max_abs(&next);
        state = next;
        for row in state.iter_mut() {
            for v in row.iter_mut() {
                *v /= m;
            }
        }
        log_scale += m.ln();
        x = if last { x_end } else { x + h };
        out.grid.push(x);
        out.states.push(state);
        out.log_scales.push(log_scale);
        out.log_det_drift.push(log_det);

        let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.25)).clamp(0.2, 5.0) };
        h *= grow;
    }
    Ok(out)
}

impl Trajectory {
    /// Index of the step containing `x` (the last step for `x = x_end`).
    pub fn step_index(&self, x: f64) -> usize {
        match self.steps.binary_search_by(|s| s.x.total_cmp(&x)) {
            Ok(i) => i.min(self.steps.len() - 1),
            Err(0) => 0,
            Err(i) => i - 1,
        }
    }

    /// `(Yhat(x), log_scale)` from the dense output.
    pub fn state_at(&self, x: f64) -> (Mat2, f64) {
        let step = &self.steps[self.step_index(x)];
        let theta = ((x - step.x) / step.h).clamp(0.0, 1.0);
        (step.scaled_state_at(theta), step.log_scale)
    }
}
