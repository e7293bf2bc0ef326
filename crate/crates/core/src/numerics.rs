//! Adaptive quadrature and Runge-Kutta integration.

use std::collections::BinaryHeap;
use std::cmp::Ordering;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },
    #[error("quadrature did not converge: estimate {value}, error {error}")]
    NotConverged { value: f64, error: f64 },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step limit reached at t = {t}")]
    StepLimit { t: f64 },
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_intervals: 2000,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

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

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64), NumericsError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut eval = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumericsError::NonFinite { at: x })
        }
    };
    let fc = eval(c)?;
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = eval(c - dx)? + eval(c + dx)?;
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod 7-15 on a finite interval.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Quad, NumericsError> {
    if a == b {
        return Ok(Quad {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (v, e) = kronrod(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, error: e });
    let (mut total, mut err) = (v, e);
    let mut evaluations = 15;
    while err > opts.abs_tol.max(opts.rel_tol * total.abs()) {
        if heap.len() >= opts.max_intervals {
            return Err(NumericsError::NotConverged { value: total, error: err });
        }
        let worst = heap.pop().unwrap();
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            return Err(NumericsError::NotConverged { value: total, error: err });
        }
        let (v1, e1) = kronrod(&mut f, worst.a, m)?;
        let (v2, e2) = kronrod(&mut f, m, worst.b)?;
        evaluations += 30;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: m, value: v1, error: e1 });
        heap.push(Piece { a: m, b: worst.b, value: v2, error: e2 });
        if heap.len() % 64 == 0 {
            // Re-sum to keep rounding drift out of the running totals.
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.error).sum();
        }
    }
    Ok(Quad {
        value: total,
        error: err,
        evaluations,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            initial_step: 1e-3,
            max_steps: 1_000_000,
        }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Dormand-Prince 5(4) with error control; returns the state at each of
/// `outputs` (which must be monotone in the direction of integration).
pub fn dopri5<F>(mut f: F, t0: f64, y0: &[f64], outputs: &[f64], opts: OdeOptions) -> Result<Vec<Vec<f64>>, NumericsError>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut out = Vec::with_capacity(outputs.len());
    let mut h = opts.initial_step.abs();
    let mut steps = 0;
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    for &target in outputs {
        let dir = if target >= t { 1.0 } else { -1.0 };
        while (target - t) * dir > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(NumericsError::StepLimit { t });
            }
            let step = (h.min((target - t).abs())) * dir;
            k[0] = f(t, &y);
            let mut stage = vec![0.0; n];
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for j in 0..s {
                        acc += step * A[s][j] * k[j][i];
                    }
                    stage[i] = acc;
                }
                k[s] = f(t + C[s] * step, &stage);
            }
            // stage now holds the 5th order solution (FSAL row).
            let mut err = 0.0;
            for i in 0..n {
                let mut e = 0.0;
                for s in 0..7 {
                    e += E[s] * k[s][i];
                }
                e *= step;
                let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(stage[i].abs());
                err += (e / scale).powi(2);
            }
            let err = (err / n as f64).sqrt();
            if !err.is_finite() || stage.iter().any(|v| !v.is_finite()) {
                h *= 0.2;
                if h < 1e-14 * (1.0 + t.abs()) {
                    return Err(NumericsError::StepUnderflow { t });
                }
                continue;
            }
            if err <= 1.0 {
                t += step;
                y.copy_from_slice(&stage);
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = step.abs() * factor;
            if h < 1e-14 * (1.0 + t.abs()) {
                return Err(NumericsError::StepUnderflow { t });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_smooth_and_peaked() {
        let q = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, QuadOptions::default()).unwrap();
        assert!((q.value - 2.0).abs() < 1e-13);
        let q = integrate(|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, QuadOptions::default()).unwrap();
        let exact = 2.0 * 100.0 * (100.0f64).atan();
        assert!((q.value - exact).abs() < 1e-8 * exact);
        // integrable endpoint singularity
        let q = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, QuadOptions { rel_tol: 1e-8, ..Default::default() }).unwrap();
        assert!((q.value - 2.0).abs() < 1e-6);
    }

    #[test]
    fn quadrature_reports_non_finite() {
        let r = integrate(|x: f64| if x > 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0, QuadOptions::default());
        assert!(matches!(r, Err(NumericsError::NonFinite { .. })));
    }

    #[test]
    fn dopri_harmonic_oscillator() {
        let ts: Vec<f64> = (1..=10).map(|k| k as f64).collect();
        let ys = dopri5(|_, y| vec![y[1], -y[0]], 0.0, &[1.0, 0.0], &ts, OdeOptions::default()).unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert!((y[0] - t.cos()).abs() < 1e-10, "t={t}");
            assert!((y[1] + t.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn dopri_backward_and_blowup() {
        let ys = dopri5(|_, y| vec![y[0]], 0.0, &[1.0], &[-1.0], OdeOptions::default()).unwrap();
        assert!((ys[0][0] - (-1.0f64).exp()).abs() < 1e-11);
        // y' = y^2, y(0) = 1 blows up at t = 1
        let r = dopri5(|_, y| vec![y[0] * y[0]], 0.0, &[1.0], &[2.0], OdeOptions::default());
        assert!(r.is_err());
    }
}
