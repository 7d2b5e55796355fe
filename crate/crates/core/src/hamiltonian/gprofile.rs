//! The outer profile `G` applied to `K`.
//!
//! Built on the log scale: with `u = log t` and `g(u) = log G(e^u)`, the
//! slope `g'` is a smooth 0→1 step over `[a, a + w]`. Then `G ≡ 1` for
//! `t ≤ e^a`, `t·(log G)'(t) = g'(log t) ∈ [0, 1]`, and `G(t) = t` once
//! the ramp is over, provided `∫ g'` up to `log λ` equals `log λ`. The
//! start `a` is fitted by bisection on that integral.

use serde::{Deserialize, Serialize};

use super::rho::{smooth_step, smooth_step_prime};
use crate::error::{Error, Result};

/// Cells in the antiderivative table of the smooth step.
pub const TABLE_SIZE: usize = 4096;

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Ramp parameters that fully determine a [`GProfile`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GRamp {
    pub lambda: f64,
    pub c: f64,
    /// Log-scale start of the ramp.
    pub start: f64,
    /// Log-scale width of the ramp.
    pub width: f64,
}

#[derive(Debug, Clone)]
pub struct GProfile {
    ramp: GRamp,
    /// `I(x_i) = ∫_0^{x_i} smooth_step` at `x_i = i / TABLE_SIZE`.
    table: Vec<f64>,
}

impl GProfile {
    pub fn ramp(&self) -> GRamp {
        self.ramp
    }

    /// `G(t) = 1` for `t` at or below this value.
    pub fn floor_until(&self) -> f64 {
        self.ramp.start.exp()
    }

    /// `G(t) = t` (up to the fitted integral) for `t` at or above this value.
    pub fn identity_from(&self) -> f64 {
        (self.ramp.start + self.ramp.width).exp()
    }

    fn integral(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return self.table[TABLE_SIZE];
        }
        let h = 1.0 / TABLE_SIZE as f64;
        let pos = x * TABLE_SIZE as f64;
        let i = (pos.floor() as usize).min(TABLE_SIZE - 1);
        let s = pos - i as f64;
        let (y0, y1) = (self.table[i], self.table[i + 1]);
        let (d0, d1) = (
            smooth_step(i as f64 * h) * h,
            smooth_step((i + 1) as f64 * h) * h,
        );
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1
    }

    /// `g(u) = log G(e^u)`.
    pub fn log_g(&self, u: f64) -> f64 {
        let GRamp { start, width, .. } = self.ramp;
        if u <= start {
            0.0
        } else if u < start + width {
            width * self.integral((u - start) / width)
        } else {
            width * self.table[TABLE_SIZE] + (u - start - width)
        }
    }

    /// `g'(u) = t·(log G)'(t)` at `t = e^u`; lies in `[0, 1]`.
    pub fn log_slope(&self, u: f64) -> f64 {
        smooth_step((u - self.ramp.start) / self.ramp.width)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.log_g(t.ln()).exp()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let u = t.ln();
        self.log_g(u).exp() / t * self.log_slope(u)
    }

    /// `(G(t), G'(t))`.
    pub fn value_and_derivative(&self, t: f64) -> (f64, f64) {
        let u = t.ln();
        let g = self.log_g(u).exp();
        (g, g / t * self.log_slope(u))
    }

    /// Second log-derivative `g''`, used only by diagnostics.
    pub fn log_curvature(&self, u: f64) -> f64 {
        smooth_step_prime((u - self.ramp.start) / self.ramp.width) / self.ramp.width
    }
}

fn build_table() -> Vec<f64> {
    let h = 1.0 / TABLE_SIZE as f64;
    let mut table = Vec::with_capacity(TABLE_SIZE + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for i in 0..TABLE_SIZE {
        let mid = (i as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut cell = 0.0;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            cell += w * (smooth_step(mid - half * x) + smooth_step(mid + half * x));
        }
        acc += cell * half;
        table.push(acc);
    }
    table
}

/// Fits the ramp for `1 < λ < e^C`.
pub fn build_g(lambda: f64, c: f64) -> Result<GProfile> {
    let log_l = lambda.ln();
    if !(lambda > 1.0 && log_l < c) {
        return Err(Error::ConstraintViolation(format!(
            "need 1 < lambda < e^C (lambda={lambda}, C={c})"
        )));
    }
    let table = build_table();
    let half_area = table[TABLE_SIZE];
    let width = (c - log_l).min(log_l);
    let u0 = log_l - c;

    // area(start) = ∫_{u0}^{log λ} g' du, decreasing in start
    let area = |start: f64| width * half_area + (log_l - start - width);
    let (mut lo, mut hi) = (u0, log_l - width);
    if !(area(lo) >= log_l && area(hi) <= log_l) {
        return Err(Error::InfeasibleRamp(format!(
            "bracket [{lo}, {hi}] does not contain the root"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi || hi - lo < 1e-15 {
            break;
        }
        if area(mid) > log_l {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let start = if (area(lo) - log_l).abs() < (area(hi) - log_l).abs() {
        lo
    } else {
        hi
    };
    Ok(GProfile {
        ramp: GRamp {
            lambda,
            c,
            start,
            width,
        },
        table,
    })
}

impl GProfile {
    /// Rebuilds a profile from stored ramp parameters.
    pub fn from_ramp(ramp: GRamp) -> Self {
        Self {
            ramp,
            table: build_table(),
        }
    }
}
