//! Points and tangent vectors of `R^{2n+1}` in Cartesian coordinates
//! `(x_1, y_1, …, x_n, y_n, z)`, with a polar view `(r_j, θ_j)` per plane.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhasePoint {
    coords: Vec<f64>,
}

impl PhasePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() % 2 != 1 {
            return Err(Error::Domain(format!(
                "phase point needs 2n+1 coordinates, got {}",
                coords.len()
            )));
        }
        Ok(Self { coords })
    }

    pub fn from_polar(r: &[f64], theta: &[f64], z: f64) -> Self {
        let mut coords = Vec::with_capacity(2 * r.len() + 1);
        for (&rj, &tj) in r.iter().zip(theta) {
            let (s, c) = tj.sin_cos();
            coords.push(rj * c);
            coords.push(rj * s);
        }
        coords.push(z);
        Self { coords }
    }

    pub fn origin(n: usize) -> Self {
        Self {
            coords: vec![0.0; 2 * n + 1],
        }
    }

    pub fn n(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn x(&self, j: usize) -> f64 {
        self.coords[2 * j]
    }

    pub fn y(&self, j: usize) -> f64 {
        self.coords[2 * j + 1]
    }

    pub fn z(&self) -> f64 {
        self.coords[2 * self.n()]
    }

    pub fn r(&self, j: usize) -> f64 {
        self.x(j).hypot(self.y(j))
    }

    pub fn theta(&self, j: usize) -> f64 {
        self.y(j).atan2(self.x(j))
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.r(j)).collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.theta(j)).collect()
    }

    pub fn min_radius(&self) -> f64 {
        (0..self.n())
            .map(|j| self.r(j))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Tangent vector in the Cartesian basis `(∂x_1, ∂y_1, …, ∂z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TangentVector {
    pub comps: Vec<f64>,
}

impl TangentVector {
    pub fn zero(n: usize) -> Self {
        Self {
            comps: vec![0.0; 2 * n + 1],
        }
    }

    pub fn n(&self) -> usize {
        self.comps.len() / 2
    }

    /// `∂z`.
    pub fn dz(n: usize) -> Self {
        let mut v = Self::zero(n);
        v.comps[2 * n] = 1.0;
        v
    }

    pub fn dx(n: usize, j: usize) -> Self {
        let mut v = Self::zero(n);
        v.comps[2 * j] = 1.0;
        v
    }

    pub fn dy(n: usize, j: usize) -> Self {
        let mut v = Self::zero(n);
        v.comps[2 * j + 1] = 1.0;
        v
    }

    /// `∂r_j = cos θ_j ∂x_j + sin θ_j ∂y_j` at `p`.
    pub fn d_radial(p: &PhasePoint, j: usize) -> Self {
        let mut v = Self::zero(p.n());
        let (s, c) = p.theta(j).sin_cos();
        v.comps[2 * j] = c;
        v.comps[2 * j + 1] = s;
        v
    }

    /// `∂θ_j = −y_j ∂x_j + x_j ∂y_j` at `p`.
    pub fn d_angular(p: &PhasePoint, j: usize) -> Self {
        let mut v = Self::zero(p.n());
        v.comps[2 * j] = -p.y(j);
        v.comps[2 * j + 1] = p.x(j);
        v
    }

    pub fn z(&self) -> f64 {
        self.comps[2 * self.n()]
    }

    pub fn add_scaled(&mut self, c: f64, other: &TangentVector) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            *a += c * b;
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            comps: self.comps.iter().map(|v| c * v).collect(),
        }
    }

    pub fn dist(&self, other: &TangentVector) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.comps.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}
