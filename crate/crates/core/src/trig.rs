//! Real trigonometric polynomials on the n-torus.
//!
//! A [`TrigPoly`] is a finite sum `Σ a·cos(m·θ) + s·sin(m·θ)` over integer
//! frequency vectors `m`. Values and partial derivatives are exact closed
//! forms, so every function built from them is smooth and periodic.

use serde::{Deserialize, Serialize};

/// One Fourier mode of a [`TrigPoly`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub m: Vec<i64>,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub s: f64,
}

impl Term {
    fn phase(&self, theta: &[f64]) -> f64 {
        self.m
            .iter()
            .zip(theta)
            .map(|(&mi, &t)| mi as f64 * t)
            .sum()
    }
}

/// Finite Fourier sum on `T^n`. Serialized as the bare list of terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrigPoly {
    terms: Vec<Term>,
}

impl TrigPoly {
    pub fn new(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self {
            terms: vec![Term {
                m: vec![0; n],
                a: value,
                s: 0.0,
            }],
        }
    }

    /// Adds one mode and returns `self` for chaining.
    pub fn with_term(mut self, m: Vec<i64>, a: f64, s: f64) -> Self {
        self.terms.push(Term { m, a, s });
        self
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Torus dimension implied by the terms; `None` for the empty sum.
    pub fn dim(&self) -> Option<usize> {
        self.terms.first().map(|t| t.m.len())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.m.iter().all(|&mi| mi == 0))
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let (sn, cs) = t.phase(theta).sin_cos();
                t.a * cs + t.s * sn
            })
            .sum()
    }

    /// Writes `∂/∂θ_j` into `grad` (length n) and returns the value.
    pub fn value_and_grad(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut v = 0.0;
        for t in &self.terms {
            let (sn, cs) = t.phase(theta).sin_cos();
            v += t.a * cs + t.s * sn;
            let d = -t.a * sn + t.s * cs;
            for (g, &mi) in grad.iter_mut().zip(&t.m) {
                *g += mi as f64 * d;
            }
        }
        v
    }

    pub fn grad(&self, theta: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; theta.len()];
        self.value_and_grad(theta, &mut g);
        g
    }

    /// Termwise sum; modes are concatenated, not merged.
    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        TrigPoly { terms }
    }

    pub fn scale(&self, c: f64) -> TrigPoly {
        TrigPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    m: t.m.clone(),
                    a: c * t.a,
                    s: c * t.s,
                })
                .collect(),
        }
    }
}

/// Uniform grid on `T^n` with `per_axis` points per angle, in row-major order.
pub fn torus_grid(n: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let total = per_axis.pow(n as u32);
    let h = std::f64::consts::TAU / per_axis as f64;
    (0..total)
        .map(|mut idx| {
            let mut theta = vec![0.0; n];
            for t in theta.iter_mut().rev() {
                *t = (idx % per_axis) as f64 * h;
                idx /= per_axis;
            }
            theta
        })
        .collect()
}

/// Wraps an angle difference into `(-π, π]`.
pub fn wrap_angle(d: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let w = d.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}
