//! The contact Hamiltonian `H = G∘K` with
//!
//! ```text
//! K = λ·exp{ [1 + C − Q^b[2] − (z² + μ)·Σ_j r_j] · Π_ℓ ρ(r_ℓ) − C }
//! ```
//!
//! All gradients are closed-form chain-rule expressions in the polar
//! coordinates `(r_j, θ_j, z)`. Wherever some `r_j ≤ 1/3` the cutoff product
//! vanishes, `K = λe^{−C}`, and `H ≡ 1` with zero gradient; evaluation
//! short-circuits there so the polar singularity at `r_j = 0` never arises.

mod gprofile;
mod rho;

pub use gprofile::{build_g, GProfile, GRamp, TABLE_SIZE};
pub use rho::{build_rho, RhoProfile};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::PhasePoint;
use crate::quadratic::{
    certify_b, find_b, q_grad_r, q_grad_theta, q_value, sublevel_radius, BCertificate, C_MAX,
};
use crate::rng::CounterRng;
use crate::torus::{normalize_field_on_grid, InvariantSetSpec, NormalizedField, TorusVectorField};

/// How `b` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BChoice {
    Auto,
    Fixed(f64),
}

/// Grid resolutions used when certifying a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    /// Points per angle on the torus grid.
    pub per_axis: usize,
    /// Points per radius in the region-L grid before the exact polish.
    pub r_grid: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            per_axis: crate::torus::DEFAULT_GRID,
            r_grid: 24,
        }
    }
}

/// Box outside which `H ≡ 1` and the Reeb field is `∂z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportBounds {
    pub r_max: f64,
    pub z_max: f64,
}

impl SupportBounds {
    pub fn contains(&self, p: &PhasePoint) -> bool {
        p.z().abs() <= self.z_max && (0..p.n()).all(|j| p.r(j) <= self.r_max)
    }
}

/// Gradient in polar coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarGradient {
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub z: f64,
}

impl PolarGradient {
    pub fn zero(n: usize) -> Self {
        Self {
            r: vec![0.0; n],
            theta: vec![0.0; n],
            z: 0.0,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.r
            .iter()
            .chain(&self.theta)
            .chain(std::iter::once(&self.z))
            .fold(0.0f64, |a, v| a.max(v.abs()))
    }

    fn scaled(&self, c: f64) -> Self {
        Self {
            r: self.r.iter().map(|v| c * v).collect(),
            theta: self.theta.iter().map(|v| c * v).collect(),
            z: c * self.z,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }
}

/// Everything computed at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub k: f64,
    pub h: f64,
    pub grad_k: PolarGradient,
    pub grad_h: PolarGradient,
    /// `Σ_j r_j (log K)_{r_j}`.
    pub radial_log_k: f64,
    /// `K·(log G)'(K)`.
    pub g_log_slope: f64,
    /// True when `H` was short-circuited to the constant 1.
    pub flat: bool,
}

impl Evaluation {
    /// `Σ_j r_j (log H)_{r_j}`.
    pub fn radial_log_h(&self) -> f64 {
        self.radial_log_k * self.g_log_slope
    }
}

/// Immutable bundle defining `K` and `H`.
#[derive(Debug, Clone)]
pub struct HamiltonianModel {
    c: f64,
    lambda: f64,
    b: f64,
    field: NormalizedField,
    set: InvariantSetSpec,
    rho: RhoProfile,
    g: GProfile,
    certificate: BCertificate,
    support: SupportBounds,
    grids: GridOptions,
}

/// Checks `0 < C < 7/9` and `1 < λ < e^C`.
pub fn check_parameters(c: f64, lambda: f64) -> Result<()> {
    if !(c > 0.0 && c < C_MAX) {
        return Err(Error::ConstraintViolation(format!(
            "C must satisfy 0 < C < 7/9 (got {c})"
        )));
    }
    if !(lambda > 1.0 && lambda < c.exp()) {
        return Err(Error::ConstraintViolation(format!(
            "lambda must satisfy 1 < lambda < e^C = {} (got {lambda})",
            c.exp()
        )));
    }
    Ok(())
}

impl HamiltonianModel {
    pub fn build(
        v: &TorusVectorField,
        set: InvariantSetSpec,
        c: f64,
        lambda: f64,
        b: BChoice,
        grids: GridOptions,
    ) -> Result<Self> {
        check_parameters(c, lambda)?;
        if set.dim() != v.dim() {
            return Err(Error::DimensionMismatch {
                expected: v.dim(),
                got: set.dim(),
            });
        }
        let field = normalize_field_on_grid(v, lambda, grids.per_axis)?;
        let certificate = match b {
            BChoice::Auto => find_b(c, &field, grids.per_axis, grids.r_grid)?,
            BChoice::Fixed(b) => certify_b(b, c, &field, grids.per_axis, grids.r_grid)?,
        };
        let g = build_g(lambda, c)?;
        let n = v.dim() as f64;
        let support = SupportBounds {
            r_max: sublevel_radius(1.0 + c, certificate.min_eig) + 0.01,
            z_max: (3.0 * (1.0 + c) / n).sqrt(),
        };
        Ok(Self {
            c,
            lambda,
            b: certificate.b,
            field,
            set,
            rho: build_rho(),
            g,
            certificate,
            support,
            grids,
        })
    }

    pub fn n(&self) -> usize {
        self.field.dim()
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn field(&self) -> &NormalizedField {
        &self.field
    }

    pub fn invariant_set(&self) -> &InvariantSetSpec {
        &self.set
    }

    pub fn rho(&self) -> &RhoProfile {
        &self.rho
    }

    pub fn g(&self) -> &GProfile {
        &self.g
    }

    pub fn certificate(&self) -> &BCertificate {
        &self.certificate
    }

    pub fn grids(&self) -> GridOptions {
        self.grids
    }

    /// `λe^{−C}`, the value of `K` where the cutoff vanishes.
    pub fn k_floor(&self) -> f64 {
        self.lambda * (-self.c).exp()
    }

    pub fn support_bounds(&self) -> SupportBounds {
        self.support
    }

    /// Full evaluation of `K`, `H` and their gradients.
    pub fn evaluate(&self, p: &PhasePoint) -> Evaluation {
        let n = self.n();
        let floor = self.k_floor();
        let flat = |k: f64| Evaluation {
            k,
            h: 1.0,
            grad_k: PolarGradient::zero(n),
            grad_h: PolarGradient::zero(n),
            radial_log_k: 0.0,
            g_log_slope: 0.0,
            flat: true,
        };
        if p.min_radius() <= RhoProfile::LOWER {
            return flat(floor);
        }
        let r = p.radii();
        let theta = p.angles();
        let z = p.z();

        let rho: Vec<f64> = r.iter().map(|&v| self.rho.value(v)).collect();
        let drho: Vec<f64> = r.iter().map(|&v| self.rho.derivative(v)).collect();
        let prod: f64 = rho.iter().product();

        let mut dk = vec![0.0; n * n];
        let kv = self.field.k_and_grad(&theta, &mut dk);
        let mut dmu = vec![0.0; n];
        let mu = self.set.mu().value_and_grad(&theta, &mut dmu);

        let q2 = q_value(&kv, self.b, 2.0, &r);
        let mut q2_r = vec![0.0; n];
        q_grad_r(&kv, self.b, 2.0, &r, &mut q2_r);
        let mut q2_t = vec![0.0; n];
        q_grad_theta(&dk, 2.0, &r, &mut q2_t);

        let sum_r: f64 = r.iter().sum();
        let weight = z * z + mu;
        let bracket = 1.0 + self.c - q2 - weight * sum_r;
        let exponent = bracket * prod - self.c;
        let k = self.lambda * exponent.exp();

        // exponent derivatives
        let mut e_r = vec![0.0; n];
        for j in 0..n {
            let others: f64 = (0..n).filter(|&l| l != j).map(|l| rho[l]).product();
            e_r[j] = (-q2_r[j] - weight) * prod + bracket * drho[j] * others;
        }
        let e_t: Vec<f64> = (0..n).map(|j| (-q2_t[j] - dmu[j] * sum_r) * prod).collect();
        let e_z = -2.0 * z * sum_r * prod;
        let radial_log_k: f64 = r.iter().zip(&e_r).map(|(a, b)| a * b).sum();

        let grad_k = PolarGradient {
            r: e_r.iter().map(|v| k * v).collect(),
            theta: e_t.iter().map(|v| k * v).collect(),
            z: k * e_z,
        };

        if k <= self.g.floor_until() {
            let mut e = flat(k);
            e.grad_k = grad_k;
            e.radial_log_k = radial_log_k;
            return e;
        }
        let (h, dg) = self.g.value_and_derivative(k);
        let grad_h = grad_k.scaled(dg);
        Evaluation {
            k,
            h,
            grad_k,
            grad_h,
            radial_log_k,
            g_log_slope: self.g.log_slope(k.ln()),
            flat: false,
        }
    }

    pub fn eval_k(&self, p: &PhasePoint) -> f64 {
        self.evaluate(p).k
    }

    pub fn grad_k(&self, p: &PhasePoint) -> PolarGradient {
        self.evaluate(p).grad_k
    }

    pub fn eval_h(&self, p: &PhasePoint) -> f64 {
        self.evaluate(p).h
    }

    pub fn grad_h(&self, p: &PhasePoint) -> PolarGradient {
        self.evaluate(p).grad_h
    }

    /// `Σ_j r_j (log H)_{r_j} = Σ_j r_j (log K)_{r_j} · K(log G)'(K)`.
    pub fn radial_log_derivative(&self, p: &PhasePoint) -> f64 {
        self.evaluate(p).radial_log_h()
    }

    /// `H − ½ Σ_j r_j H_{r_j}`.
    pub fn h3_margin(&self, p: &PhasePoint) -> f64 {
        let e = self.evaluate(p);
        let r = p.radii();
        e.h - 0.5 * r.iter().zip(&e.grad_h.r).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Distance to `𝒜 × {0}` in the product metric
    /// `√(Σ(r_j − 1)² + d_T(θ, 𝒜)² + z²)`.
    pub fn distance_to_set(&self, p: &PhasePoint) -> f64 {
        let radial: f64 = (0..p.n()).map(|j| (p.r(j) - 1.0).powi(2)).sum();
        let ang = self.set.distance(&p.angles());
        (radial + ang * ang + p.z() * p.z()).sqrt()
    }

    /// Samples `samples` points on the support shell and beyond it and
    /// returns the worst `|H − 1|`, failing above `1e-12`.
    pub fn verify_support_shell(&self, samples: usize, seed: u64) -> Result<f64> {
        let (worst, witness) =
            self.support_shell_points(samples, seed)
                .iter()
                .fold((0.0f64, Vec::new()), |acc, p| {
                    let d = (self.eval_h(p) - 1.0).abs();
                    if d > acc.0 {
                        (d, p.coords().to_vec())
                    } else {
                        acc
                    }
                });
        if worst > 1e-12 {
            return Err(Error::ShellViolation {
                deviation: worst,
                witness,
            });
        }
        Ok(worst)
    }

    /// Deterministic points on the faces of the support box and outside it.
    pub fn support_shell_points(&self, samples: usize, seed: u64) -> Vec<PhasePoint> {
        let n = self.n();
        let rng = CounterRng::new(seed, "support-shell");
        let SupportBounds { r_max, z_max } = self.support;
        (0..samples as u64)
            .map(|i| {
                let beyond = i % 2 == 1;
                let mut r = rng.vector(i, n, 0.0, r_max);
                let theta = rng.vector(
                    i ^ (1 << 40),
                    n,
                    -std::f64::consts::PI,
                    std::f64::consts::PI,
                );
                let mut z = rng.uniform_in(i, 99, -z_max, z_max);
                let face = (rng.bits(i, 100) % (n as u64 + 1)) as usize;
                let stretch = if beyond {
                    1.0 + rng.uniform(i, 101)
                } else {
                    1.0
                };
                if face == n {
                    z = z.signum() * z_max * stretch;
                } else {
                    r[face] = r_max * stretch;
                }
                PhasePoint::from_polar(&r, &theta, z)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::InvariantSetKind;
    use crate::trig::TrigPoly;

    fn default_model() -> HamiltonianModel {
        HamiltonianModel::build(
            &TorusVectorField::constant(&[1.0, 2f64.sqrt()]),
            InvariantSetSpec::full(2),
            0.7,
            1.5,
            BChoice::Auto,
            GridOptions::default(),
        )
        .unwrap()
    }

    fn half_model() -> HamiltonianModel {
        HamiltonianModel::build(
            &TorusVectorField::constant(&[1.0, 1.0]),
            InvariantSetSpec::full(2),
            0.7,
            1.5,
            BChoice::Fixed(4.0),
            GridOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn parameter_constraints() {
        assert!(check_parameters(0.7, 1.5).is_ok());
        assert!(check_parameters(0.8, 1.5).is_err());
        assert!(check_parameters(0.7, 2.5).is_err());
        assert!(check_parameters(0.7, 1.0).is_err());
    }

    #[test]
    fn auto_b_default_scenario() {
        assert_eq!(default_model().b(), 4.0);
    }

    #[test]
    fn k_on_torus_equals_lambda() {
        let m = half_model();
        let p = PhasePoint::from_polar(&[1.0, 1.0], &[0.3, 1.2], 0.0);
        assert!((m.eval_k(&p) - 1.5).abs() < 1e-14);
        let g = m.grad_k(&p);
        assert!((g.r[0] - 1.5).abs() < 1e-13 && (g.r[1] - 1.5).abs() < 1e-13);
        assert!(g.theta.iter().all(|v| v.abs() < 1e-14));
        assert_eq!(g.z, 0.0);
    }

    #[test]
    fn k_at_quadratic_center() {
        let m = half_model();
        let p = PhasePoint::from_polar(&[2.0, 2.0], &[0.0, 0.0], 0.0);
        assert!((m.eval_k(&p) - 1.5 * 1f64.exp()).abs() < 1e-13);
        assert!((m.eval_k(&p) - 4.077_423_0).abs() < 1e-6);
    }

    #[test]
    fn k_floor_inside_cutoff() {
        let m = half_model();
        for z in [-3.0, 0.0, 0.4] {
            let p = PhasePoint::from_polar(&[0.2, 1.7], &[0.0, 1.0], z);
            assert_eq!(m.eval_k(&p), 1.5 * (-0.7f64).exp());
            assert!((m.eval_k(&p) - 0.744_877_6).abs() < 1e-6);
            assert!(m.grad_k(&p).is_zero());
            assert_eq!(m.eval_h(&p), 1.0);
            assert!(m.grad_h(&p).is_zero());
            assert_eq!(m.radial_log_derivative(&p), 0.0);
        }
    }

    #[test]
    fn h4_values_on_torus() {
        let m = default_model();
        let k = m.field().k(&[0.0, 0.0]);
        let p = PhasePoint::from_polar(&[1.0, 1.0], &[2.0, -1.0], 0.0);
        let e = m.evaluate(&p);
        assert!((e.h - 1.5).abs() < 1e-12);
        for (g, kj) in e.grad_h.r.iter().zip(&k) {
            assert!((g - 3.0 * kj).abs() < 1e-12);
        }
        assert!((e.radial_log_k - 2.0).abs() < 1e-13);
        assert!(m.h3_margin(&p).abs() < 1e-12);
    }

    #[test]
    fn case_two_radial_log_derivative_below_two() {
        let m = half_model();
        let p = PhasePoint::from_polar(&[2.0, 2.0], &[0.0, 0.0], 0.5);
        let e = m.evaluate(&p);
        // all radii ≥ 2/3: −Σ r_j Q_{r_j} − z² Σ r_j = (2 − 2Q^b[1]) − z²·Σr
        let q1 = 0.5 + 0.5;
        let expected = 2.0 - 2.0 * q1 - 0.25 * 4.0;
        assert!((e.radial_log_k - expected).abs() < 1e-12);
        assert!(m.radial_log_derivative(&p) < 2.0);
        let margin = m.h3_margin(&p);
        assert!((margin - 0.5 * e.h * (2.0 - e.radial_log_h())).abs() < 1e-12);
    }

    #[test]
    fn far_region_margin_is_one() {
        let m = half_model();
        let p = PhasePoint::from_polar(&[5.0, 5.0], &[0.0, 0.0], 0.0);
        assert_eq!(m.eval_h(&p), 1.0);
        assert_eq!(m.h3_margin(&p), 1.0);
    }

    #[test]
    fn support_bounds_closed_forms() {
        let m = half_model();
        let s = m.support_bounds();
        assert!((s.z_max - 2.55f64.sqrt()).abs() < 1e-15);
        assert!((s.z_max - 1.596_872_0).abs() < 1e-7);
        assert!((s.r_max - (2.0 + (1.7f64 / 0.5).sqrt() + 0.01)).abs() < 1e-10);
        assert!((s.r_max - 3.854).abs() < 1e-3);
        assert_eq!(m.verify_support_shell(500, 3).unwrap(), 0.0);
    }

    #[test]
    fn subtorus_model_builds() {
        let v = TorusVectorField::new(vec![
            TrigPoly::constant(2, 2.0),
            TrigPoly::zero().with_term(vec![0, 1], 0.0, 1.0),
        ])
        .unwrap();
        let set = InvariantSetSpec::new(
            2,
            InvariantSetKind::SubTorus {
                indices: vec![1],
                values: vec![0.0],
            },
        )
        .unwrap();
        let m = HamiltonianModel::build(
            &v,
            set,
            0.7,
            1.5,
            BChoice::Auto,
            GridOptions {
                per_axis: 32,
                r_grid: 12,
            },
        )
        .unwrap();
        let p = PhasePoint::from_polar(&[1.0, 1.0], &[0.4, 0.0], 0.0);
        let e = m.evaluate(&p);
        assert!((e.h - 1.5).abs() < 1e-12);
        assert!(e.grad_h.theta.iter().all(|v| v.abs() < 1e-12));
        // off the set (θ_2 ≠ 0) the (H3) margin is positive
        let q = PhasePoint::from_polar(&[1.0, 1.0], &[0.4, 0.5], 0.0);
        assert!(m.h3_margin(&q) > 0.0);
    }
}
