//! Dormand-Prince 5(4) integrator with PI step control, dense output and
//! a scalar stopping function.
//!
//! The solver works in either time direction. When a stopping function
//! `g` is supplied, integration ends at the first time `g(y)` becomes
//! positive; the crossing is located on the dense-output polynomial.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Local error tolerances and step limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            max_step: 0.5,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tol(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::ConstraintViolation(format!(
                "integrator tolerances must be positive (rtol={}, atol={})",
                self.rtol, self.atol
            )));
        }
        if !(self.max_step > 0.0) || self.max_steps == 0 {
            return Err(Error::ConstraintViolation(
                "max_step and max_steps must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Why an integration run ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    Horizon,
    /// The stopping function turned positive at this time.
    Stopped(f64),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub min_step: f64,
    pub max_step: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub stats: StepStats,
    pub termination: Termination,
}

/// Which states to keep.
#[derive(Debug, Clone, Copy)]
pub enum Output<'a> {
    /// Every accepted step.
    Steps,
    /// Dense output at the given times (monotone in the integration direction).
    At(&'a [f64]),
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Quartic dense-output polynomial over one accepted step.
struct Dense {
    t0: f64,
    h: f64,
    c: [Vec<f64>; 5],
}

impl Dense {
    fn eval(&self, t: f64, out: &mut [f64]) {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.c[0][i]
                + s * (self.c[1][i] + s1 * (self.c[2][i] + s * (self.c[3][i] + s1 * self.c[4][i])));
        }
    }
}

/// Scalar event function; the run stops where it turns positive.
pub type StopFn<'a> = &'a dyn Fn(&[f64]) -> f64;

/// Integrates `y' = f(t, y)` from `t0` to `t_end`.
///
/// `stop`, when given, ends the run as soon as it becomes positive; the
/// state at the crossing is appended to the output.
pub fn solve<F>(
    f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    cfg: &IntegratorConfig,
    output: Output<'_>,
    stop: Option<StopFn<'_>>,
) -> Result<Solution>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    cfg.validate()?;
    let dim = y0.len();
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let span = (t_end - t0).abs();

    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut sample_idx = 0usize;
    let samples: &[f64] = match output {
        Output::At(ts) => ts,
        Output::Steps => &[],
    };
    let keep_steps = matches!(output, Output::Steps);

    // Samples at the start time.
    while sample_idx < samples.len() && dir * (samples[sample_idx] - t0) <= 0.0 {
        times.push(samples[sample_idx]);
        states.push(y0.to_vec());
        sample_idx += 1;
    }
    if keep_steps {
        times.push(t0);
        states.push(y0.to_vec());
    }

    let mut stats = StepStats {
        min_step: f64::INFINITY,
        ..StepStats::default()
    };
    if span == 0.0 {
        stats.min_step = 0.0;
        return Ok(Solution {
            times,
            states,
            stats,
            termination: Termination::Horizon,
        });
    }
    if let Some(g) = stop {
        if g(y0) > 0.0 {
            stats.min_step = 0.0;
            return Ok(Solution {
                times,
                states,
                stats,
                termination: Termination::Stopped(t0),
            });
        }
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut k5 = vec![0.0; dim];
    let mut k6 = vec![0.0; dim];
    let mut k7 = vec![0.0; dim];
    let mut ytmp = vec![0.0; dim];
    let mut ynew = vec![0.0; dim];
    let mut yerr = vec![0.0; dim];

    f(t, &y, &mut k1);
    stats.rhs_evals += 1;
    let mut h = initial_step(&f, t, &y, &k1, dir, cfg, &mut stats).min(span);
    let mut err_old: f64 = 1e-4;
    let mut last_rejected = false;
    let mut steps = 0usize;

    loop {
        if steps >= cfg.max_steps {
            return Err(Error::StepLimit {
                max_steps: cfg.max_steps,
                t,
                state: y,
            });
        }
        let remaining = (t_end - t) * dir;
        if remaining <= 0.0 {
            break;
        }
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { h, t, state: y });
        }
        let hs = h * dir;

        for i in 0..dim {
            ytmp[i] = y[i] + hs * A21 * k1[i];
        }
        f(t + C2 * hs, &ytmp, &mut k2);
        for i in 0..dim {
            ytmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * hs, &ytmp, &mut k3);
        for i in 0..dim {
            ytmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * hs, &ytmp, &mut k4);
        for i in 0..dim {
            ytmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * hs, &ytmp, &mut k5);
        for i in 0..dim {
            ytmp[i] =
                y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if last { t_end } else { t + hs };
        f(t + hs, &ytmp, &mut k6);
        for i in 0..dim {
            ynew[i] =
                y[i] + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t_new, &ynew, &mut k7);
        stats.rhs_evals += 6;

        let mut err = 0.0;
        for i in 0..dim {
            yerr[i] =
                hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = cfg.atol + cfg.rtol * y[i].abs().max(ynew[i].abs());
            err += (yerr[i] / sc).powi(2);
        }
        err = (err / dim as f64).sqrt();

        if err <= 1.0 {
            steps += 1;
            stats.accepted += 1;
            stats.min_step = stats.min_step.min(h);
            stats.max_step = stats.max_step.max(h);

            let dense = build_dense(t, hs, &y, &ynew, &k1, &k3, &k4, &k5, &k6, &k7);

            // Stopping function crossing.
            if let Some(g) = stop {
                if g(&ynew) > 0.0 {
                    let (ts, ys) = locate_crossing(&dense, t, t_new, g, dim);
                    while sample_idx < samples.len() && dir * (samples[sample_idx] - ts) <= 0.0 {
                        let mut out = vec![0.0; dim];
                        dense.eval(samples[sample_idx], &mut out);
                        times.push(samples[sample_idx]);
                        states.push(out);
                        sample_idx += 1;
                    }
                    times.push(ts);
                    states.push(ys);
                    return Ok(Solution {
                        times,
                        states,
                        stats,
                        termination: Termination::Stopped(ts),
                    });
                }
            }

            while sample_idx < samples.len() && dir * (samples[sample_idx] - t_new) <= 0.0 {
                let mut out = vec![0.0; dim];
                dense.eval(samples[sample_idx], &mut out);
                times.push(samples[sample_idx]);
                states.push(out);
                sample_idx += 1;
            }
            if keep_steps {
                times.push(t_new);
                states.push(ynew.clone());
            }

            std::mem::swap(&mut y, &mut ynew);
            std::mem::swap(&mut k1, &mut k7);
            t = t_new;
            if last {
                break;
            }

            let fac = 0.9 * err.max(1e-10).powf(-0.17) * err_old.powf(0.04);
            let fac = if last_rejected { fac.min(1.0) } else { fac };
            h = (h * fac.clamp(0.2, 10.0)).min(cfg.max_step);
            err_old = err.max(1e-4);
            last_rejected = false;
        } else {
            stats.rejected += 1;
            let fac = 0.9 * err.powf(-0.17);
            h *= fac.clamp(0.2, 1.0);
            last_rejected = true;
        }
    }

    Ok(Solution {
        times,
        states,
        stats,
        termination: Termination::Horizon,
    })
}

#[allow(clippy::too_many_arguments)]
fn build_dense(
    t: f64,
    hs: f64,
    y: &[f64],
    ynew: &[f64],
    k1: &[f64],
    k3: &[f64],
    k4: &[f64],
    k5: &[f64],
    k6: &[f64],
    k7: &[f64],
) -> Dense {
    let dim = y.len();
    let mut c: [Vec<f64>; 5] = Default::default();
    for v in c.iter_mut() {
        *v = vec![0.0; dim];
    }
    for i in 0..dim {
        let ydiff = ynew[i] - y[i];
        let bspl = hs * k1[i] - ydiff;
        c[0][i] = y[i];
        c[1][i] = ydiff;
        c[2][i] = bspl;
        c[3][i] = ydiff - hs * k7[i] - bspl;
        c[4][i] =
            hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    Dense { t0: t, h: hs, c }
}

fn locate_crossing(
    dense: &Dense,
    t_lo: f64,
    t_hi: f64,
    g: &dyn Fn(&[f64]) -> f64,
    dim: usize,
) -> (f64, Vec<f64>) {
    let mut lo = t_lo;
    let mut hi = t_hi;
    let mut buf = vec![0.0; dim];
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        dense.eval(mid, &mut buf);
        if g(&buf) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    dense.eval(hi, &mut buf);
    (hi, buf)
}

fn initial_step<F>(
    f: &F,
    t: f64,
    y: &[f64],
    f0: &[f64],
    dir: f64,
    cfg: &IntegratorConfig,
    stats: &mut StepStats,
) -> f64
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let dim = y.len() as f64;
    let scale = |i: usize| cfg.atol + cfg.rtol * y[i].abs();
    let d0 = (y
        .iter()
        .enumerate()
        .map(|(i, v)| (v / scale(i)).powi(2))
        .sum::<f64>()
        / dim)
        .sqrt();
    let d1 = (f0
        .iter()
        .enumerate()
        .map(|(i, v)| (v / scale(i)).powi(2))
        .sum::<f64>()
        / dim)
        .sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
    .min(cfg.max_step);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(v, d)| v + dir * h0 * d).collect();
    let mut f1 = vec![0.0; y.len()];
    f(t + dir * h0, &y1, &mut f1);
    stats.rhs_evals += 1;
    let d2 = (f1
        .iter()
        .zip(f0)
        .enumerate()
        .map(|(i, (a, b))| ((a - b) / scale(i)).powi(2))
        .sum::<f64>()
        / dim)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(cfg.max_step)
}
