//! Vector fields and invariant sets on the torus `T^n`.
//!
//! A transverse field `V = Σ ν_j ∂θ_j` (with `Σ ν_j > 0`) is rescaled into
//! the normalized coefficients `k_j = ν_j / Σν` that drive the Hamiltonian,
//! together with the factor `f = 2λ / Σν` relating the two parametrizations.
//! Invariant sets carry a nonnegative trigonometric polynomial `μ` that
//! vanishes to second order exactly on the set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, IntegratorConfig, Output};
use crate::trig::{torus_grid, wrap_angle, TrigPoly};

/// Default number of grid points per angle for torus sweeps.
pub const DEFAULT_GRID: usize = 64;

/// `V = Σ_j ν_j ∂θ_j` on `T^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusVectorField {
    pub nu: Vec<TrigPoly>,
}

impl TorusVectorField {
    pub fn new(nu: Vec<TrigPoly>) -> Result<Self> {
        let n = nu.len();
        if n == 0 {
            return Err(Error::ConstraintViolation(
                "vector field has no components".into(),
            ));
        }
        for p in &nu {
            if let Some(d) = p.dim() {
                if d != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: d,
                    });
                }
            }
        }
        Ok(Self { nu })
    }

    /// Constant-coefficient field.
    pub fn constant(coeffs: &[f64]) -> Self {
        let n = coeffs.len();
        Self {
            nu: coeffs.iter().map(|&c| TrigPoly::constant(n, c)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.nu.len()
    }

    pub fn eval(&self, theta: &[f64]) -> Vec<f64> {
        self.nu.iter().map(|p| p.value(theta)).collect()
    }

    /// Minimum of `Σ ν_j` over a uniform grid, with the first minimizing point.
    pub fn min_transversality(&self, per_axis: usize) -> (f64, Vec<f64>) {
        let mut best = (f64::INFINITY, Vec::new());
        for theta in torus_grid(self.dim(), per_axis) {
            let s: f64 = self.nu.iter().map(|p| p.value(&theta)).sum();
            if s < best.0 {
                best = (s, theta);
            }
        }
        best
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            nu: self.nu.iter().map(|p| p.scale(c)).collect(),
        }
    }
}

/// The normalized coefficients `k_j = ν_j/Σν` and `f = 2λ/Σν`.
///
/// Both are evaluated as quotients of the underlying polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedField {
    field: TorusVectorField,
    lambda: f64,
    constant_k: Option<Vec<f64>>,
}

impl NormalizedField {
    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn field(&self) -> &TorusVectorField {
        &self.field
    }

    /// `Some(k)` when every `ν_j` is constant.
    pub fn constant_k(&self) -> Option<&[f64]> {
        self.constant_k.as_deref()
    }

    pub fn k(&self, theta: &[f64]) -> Vec<f64> {
        if let Some(k) = &self.constant_k {
            return k.clone();
        }
        let nu = self.field.eval(theta);
        let s: f64 = nu.iter().sum();
        nu.iter().map(|v| v / s).collect()
    }

    pub fn f(&self, theta: &[f64]) -> f64 {
        let s: f64 = self.field.eval(theta).iter().sum();
        2.0 * self.lambda / s
    }

    /// Returns `k(θ)` and writes `∂k_i/∂θ_j` into `dk[i * n + j]`.
    pub fn k_and_grad(&self, theta: &[f64], dk: &mut [f64]) -> Vec<f64> {
        let n = self.dim();
        if let Some(k) = &self.constant_k {
            dk.iter_mut().for_each(|v| *v = 0.0);
            return k.clone();
        }
        let mut nu = vec![0.0; n];
        let mut dnu = vec![0.0; n * n];
        for (i, p) in self.field.nu.iter().enumerate() {
            nu[i] = p.value_and_grad(theta, &mut dnu[i * n..(i + 1) * n]);
        }
        let s: f64 = nu.iter().sum();
        let mut ds = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                ds[j] += dnu[i * n + j];
            }
        }
        let s2 = s * s;
        for i in 0..n {
            for j in 0..n {
                dk[i * n + j] = (dnu[i * n + j] * s - nu[i] * ds[j]) / s2;
            }
        }
        nu.iter().map(|v| v / s).collect()
    }
}

/// Normalizes `V` after checking transversality on a grid.
pub fn normalize_field(v: &TorusVectorField, lambda: f64) -> Result<NormalizedField> {
    normalize_field_on_grid(v, lambda, DEFAULT_GRID)
}

pub fn normalize_field_on_grid(
    v: &TorusVectorField,
    lambda: f64,
    per_axis: usize,
) -> Result<NormalizedField> {
    if !(lambda > 1.0) {
        return Err(Error::ConstraintViolation(format!(
            "lambda must exceed 1 (got {lambda})"
        )));
    }
    let (min, theta) = v.min_transversality(per_axis);
    if !(min > 0.0) {
        return Err(Error::TransversalityViolation { min, theta });
    }
    let n = v.dim();
    let constant_k = if v.nu.iter().all(TrigPoly::is_constant) {
        let zero = vec![0.0; n];
        let nu = v.eval(&zero);
        let s: f64 = nu.iter().sum();
        Some(nu.iter().map(|x| x / s).collect())
    } else {
        None
    };
    Ok(NormalizedField {
        field: v.clone(),
        lambda,
        constant_k,
    })
}

/// Shape of the compact invariant set `𝒜 ⊂ T^n`. Indices are zero-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum InvariantSetKind {
    FullTorus,
    /// `{θ_i = c_i for i in indices}`.
    SubTorus {
        indices: Vec<usize>,
        values: Vec<f64>,
    },
    /// Closed orbit `θ0 + t·d` for a rational direction `d`.
    PeriodicOrbit {
        base: Vec<f64>,
        direction: Vec<f64>,
    },
    /// Sampled set with a user-provided `μ`.
    Custom {
        points: Vec<Vec<f64>>,
        mu: TrigPoly,
    },
}

/// Invariant set description together with its `μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSetSpec {
    n: usize,
    kind: InvariantSetKind,
    mu: TrigPoly,
    /// Primitive integer direction for periodic orbits.
    orbit_dir: Option<Vec<i64>>,
}

impl InvariantSetSpec {
    pub fn new(n: usize, kind: InvariantSetKind) -> Result<Self> {
        let mu = build_mu(n, &kind)?;
        let orbit_dir = match &kind {
            InvariantSetKind::PeriodicOrbit { direction, .. } => Some(rationalize(direction)?),
            _ => None,
        };
        Ok(Self {
            n,
            kind,
            mu,
            orbit_dir,
        })
    }

    pub fn full(n: usize) -> Self {
        Self {
            n,
            kind: InvariantSetKind::FullTorus,
            mu: TrigPoly::zero(),
            orbit_dir: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &InvariantSetKind {
        &self.kind
    }

    pub fn mu(&self) -> &TrigPoly {
        &self.mu
    }

    /// Flat-torus distance from `θ` to the set.
    pub fn distance(&self, theta: &[f64]) -> f64 {
        match &self.kind {
            InvariantSetKind::FullTorus => 0.0,
            InvariantSetKind::SubTorus { indices, values } => indices
                .iter()
                .zip(values)
                .map(|(&i, &c)| wrap_angle(theta[i] - c).powi(2))
                .sum::<f64>()
                .sqrt(),
            InvariantSetKind::PeriodicOrbit { base, .. } => {
                let d = self.orbit_dir.as_ref().expect("orbit direction");
                orbit_distance(theta, base, d)
            }
            InvariantSetKind::Custom { points, .. } => points
                .iter()
                .map(|p| {
                    p.iter()
                        .zip(theta)
                        .map(|(a, b)| wrap_angle(b - a).powi(2))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Deterministic points of the set (Kronecker sequence in free angles).
    pub fn sample_points(&self, count: usize) -> Vec<Vec<f64>> {
        use std::f64::consts::TAU;
        let n = self.n;
        (0..count)
            .map(|i| {
                let free = kronecker(i, n);
                match &self.kind {
                    InvariantSetKind::FullTorus => free,
                    InvariantSetKind::SubTorus { indices, values } => {
                        let mut th = free;
                        for (&idx, &c) in indices.iter().zip(values) {
                            th[idx] = c;
                        }
                        th
                    }
                    InvariantSetKind::PeriodicOrbit { base, .. } => {
                        let d = self.orbit_dir.as_ref().expect("orbit direction");
                        let t = TAU * i as f64 / count as f64;
                        base.iter()
                            .zip(d)
                            .map(|(b, &di)| (b + t * di as f64).rem_euclid(TAU))
                            .collect()
                    }
                    InvariantSetKind::Custom { points, .. } => points[i % points.len()].clone(),
                }
            })
            .collect()
    }
}

fn kronecker(i: usize, n: usize) -> Vec<f64> {
    const PRIMES: [f64; 12] = [2., 3., 5., 7., 11., 13., 17., 19., 23., 29., 31., 37.];
    (0..n)
        .map(|j| {
            let alpha = PRIMES[j % PRIMES.len()].sqrt().fract();
            std::f64::consts::TAU * ((i as f64 + 0.5) * alpha).fract()
        })
        .collect()
}

/// Builds `μ` for the closed-form set kinds.
pub fn build_mu(n: usize, kind: &InvariantSetKind) -> Result<TrigPoly> {
    match kind {
        InvariantSetKind::FullTorus => Ok(TrigPoly::zero()),
        InvariantSetKind::SubTorus { indices, values } => {
            if indices.len() != values.len() || indices.is_empty() {
                return Err(Error::UnsupportedSet(
                    "sub-torus needs matching, nonempty indices and values".into(),
                ));
            }
            let mut mu = TrigPoly::constant(n, indices.len() as f64);
            for (&i, &c) in indices.iter().zip(values) {
                if i >= n {
                    return Err(Error::UnsupportedSet(format!(
                        "index {i} out of range for n={n}"
                    )));
                }
                let mut m = vec![0; n];
                m[i] = 1;
                mu = mu.with_term(m, -c.cos(), -c.sin());
            }
            Ok(mu)
        }
        InvariantSetKind::PeriodicOrbit { base, direction } => {
            if base.len() != n || direction.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: direction.len(),
                });
            }
            let d = rationalize(direction)?;
            let generators = annihilator_basis(&d);
            if generators.is_empty() {
                return Err(Error::UnsupportedSet(
                    "annihilator of the orbit direction is trivial".into(),
                ));
            }
            let mut mu = TrigPoly::constant(n, generators.len() as f64);
            for m in generators {
                let phase: f64 = m.iter().zip(base).map(|(&mi, b)| mi as f64 * b).sum();
                mu = mu.with_term(m, -phase.cos(), -phase.sin());
            }
            Ok(mu)
        }
        InvariantSetKind::Custom { points, mu } => {
            if points.is_empty() {
                return Err(Error::UnsupportedSet(
                    "custom set has no sample points".into(),
                ));
            }
            Ok(mu.clone())
        }
    }
}

/// Primitive integer vector parallel to `d`, if `d` is rational.
fn rationalize(d: &[f64]) -> Result<Vec<i64>> {
    let dmax = d.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if !(dmax > 0.0) || d.iter().any(|v| !v.is_finite()) {
        return Err(Error::UnsupportedSet(
            "orbit direction must be nonzero and finite".into(),
        ));
    }
    let e: Vec<f64> = d.iter().map(|v| v / dmax).collect();
    for q in 1..=10_000i64 {
        let qf = q as f64;
        if e.iter()
            .all(|v| (qf * v - (qf * v).round()).abs() <= 1e-9 * qf)
        {
            let ints: Vec<i64> = e.iter().map(|v| (qf * v).round() as i64).collect();
            let g = ints.iter().fold(0i64, |a, &b| gcd(a, b.abs()));
            return Ok(ints.iter().map(|v| v / g).collect());
        }
    }
    Err(Error::UnsupportedSet(format!(
        "orbit direction {d:?} is not rational; its closure is not a closed orbit"
    )))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Lattice basis of `{m ∈ Z^n : m·d = 0}` by unimodular column reduction.
pub(crate) fn annihilator_basis(d: &[i64]) -> Vec<Vec<i64>> {
    let n = d.len();
    let mut v = d.to_vec();
    let mut u: Vec<Vec<i64>> = (0..n)
        .map(|j| (0..n).map(|i| i64::from(i == j)).collect())
        .collect();
    loop {
        let nonzero: Vec<usize> = (0..n).filter(|&i| v[i] != 0).collect();
        if nonzero.len() <= 1 {
            return (0..n)
                .filter(|i| !nonzero.contains(i))
                .map(|j| u[j].clone())
                .collect();
        }
        let p = *nonzero.iter().min_by_key(|&&i| v[i].abs()).unwrap();
        for &j in &nonzero {
            if j == p {
                continue;
            }
            let q = v[j].div_euclid(v[p]);
            v[j] -= q * v[p];
            let col_p = u[p].clone();
            for (a, b) in u[j].iter_mut().zip(col_p) {
                *a -= q * b;
            }
        }
    }
}

fn orbit_distance(theta: &[f64], base: &[f64], d: &[i64]) -> f64 {
    use std::f64::consts::TAU;
    let dist = |t: f64| -> f64 {
        theta
            .iter()
            .zip(base)
            .zip(d)
            .map(|((th, b), &di)| wrap_angle(th - b - t * di as f64).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let dmax = d.iter().map(|v| v.abs()).max().unwrap_or(1) as usize;
    let samples = 256 * dmax.max(1);
    let step = TAU / samples as f64;
    let (mut best_t, mut best) = (0.0, f64::INFINITY);
    for i in 0..samples {
        let t = i as f64 * step;
        let v = dist(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    // golden-section polish inside the bracketing cell
    let (mut lo, mut hi) = (best_t - step, best_t + step);
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let a = hi - gr * (hi - lo);
        let b = lo + gr * (hi - lo);
        if dist(a) < dist(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    best.min(dist(0.5 * (lo + hi)))
}

/// Summary of the `μ` conditions checked on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuCheck {
    /// Minimum of `μ` over the grid (must be ≥ 0).
    pub grid_min: f64,
    /// Largest `|μ|` or `|∂μ|` at sampled points of the set.
    pub on_set_max: f64,
    /// Minimum of `μ` at grid points farther than `eps` from the set.
    pub off_set_min: f64,
    /// Fitted constant `κ` with `μ ≤ κ·dist²` on the grid.
    pub kappa: f64,
}

impl MuCheck {
    pub fn passes(&self) -> bool {
        self.grid_min >= -1e-15 && self.on_set_max <= 1e-12 && self.off_set_min > 0.0
    }
}

pub fn check_mu(spec: &InvariantSetSpec, per_axis: usize, eps: f64, set_samples: usize) -> MuCheck {
    let n = spec.dim();
    let mu = spec.mu();
    let mut grid_min = f64::INFINITY;
    let mut off_set_min = f64::INFINITY;
    let mut kappa: f64 = 0.0;
    for theta in torus_grid(n, per_axis) {
        let v = mu.value(&theta);
        grid_min = grid_min.min(v);
        let d = spec.distance(&theta);
        if d > eps {
            off_set_min = off_set_min.min(v);
        }
        if d > 1e-6 {
            kappa = kappa.max(v / (d * d));
        }
    }
    let mut on_set_max: f64 = 0.0;
    let mut g = vec![0.0; n];
    for theta in spec.sample_points(set_samples) {
        let v = mu.value_and_grad(&theta, &mut g);
        on_set_max = on_set_max.max(v.abs());
        for gj in &g {
            on_set_max = on_set_max.max(gj.abs());
        }
    }
    MuCheck {
        grid_min,
        on_set_max,
        off_set_min,
        kappa,
    }
}

/// Flows points of the set along `θ' = k(θ)` for time `t_final` and returns the
/// largest departure, measured by `μ` (or by distance for custom point clouds).
pub fn check_invariance(
    v: &TorusVectorField,
    spec: &InvariantSetSpec,
    t_final: f64,
    tol: f64,
) -> Result<f64> {
    let drift = invariance_drift(v, spec, t_final, 16)?;
    if drift > tol {
        return Err(Error::InvarianceViolation { drift, tol });
    }
    Ok(drift)
}

pub fn invariance_drift(
    v: &TorusVectorField,
    spec: &InvariantSetSpec,
    t_final: f64,
    samples: usize,
) -> Result<f64> {
    if matches!(spec.kind(), InvariantSetKind::FullTorus) {
        return Ok(0.0);
    }
    let field = normalize_field_on_grid(v, 2.0, DEFAULT_GRID)?;
    let cfg = IntegratorConfig::with_tol(1e-12, 1e-12);
    let rhs = |_t: f64, th: &[f64], out: &mut [f64]| {
        let k = field.k(th);
        out.copy_from_slice(&k);
    };
    let proxy = |th: &[f64]| match spec.kind() {
        InvariantSetKind::Custom { .. } => spec.distance(th),
        _ => spec.mu().value(th),
    };
    let mut worst: f64 = 0.0;
    for theta0 in spec.sample_points(samples.max(1)) {
        let sol = ode::solve(rhs, 0.0, &theta0, t_final, &cfg, Output::Steps, None)?;
        for th in &sol.states {
            worst = worst.max(proxy(th));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2_field() -> TorusVectorField {
        TorusVectorField::constant(&[1.0, 2f64.sqrt()])
    }

    #[test]
    fn normalization_values() {
        let nf = normalize_field(&sqrt2_field(), 1.5).unwrap();
        let k = nf.k(&[0.3, 0.7]);
        assert!((k[0] - 0.414_213_6).abs() < 1e-7);
        assert!((k[1] - 0.585_786_4).abs() < 1e-7);
        let f = nf.f(&[1.0, 2.0]);
        assert!((f - 3.0 / (1.0 + 2f64.sqrt())).abs() < 1e-15);
        assert!((f - 1.242_640_7).abs() < 1e-7);
    }

    #[test]
    fn opposite_field_is_not_transverse() {
        let v = TorusVectorField::constant(&[1.0, -1.0]);
        assert!(matches!(
            normalize_field(&v, 1.5),
            Err(Error::TransversalityViolation { .. })
        ));
    }

    #[test]
    fn lambda_must_exceed_one() {
        assert!(matches!(
            normalize_field(&sqrt2_field(), 1.0),
            Err(Error::ConstraintViolation(_))
        ));
    }

    fn wavy_field() -> TorusVectorField {
        TorusVectorField::new(vec![
            TrigPoly::constant(2, 2.0).with_term(vec![0, 1], 0.3, 0.1),
            TrigPoly::constant(2, 1.0).with_term(vec![1, -1], 0.2, -0.4),
        ])
        .unwrap()
    }

    #[test]
    fn normalized_invariants_on_grid() {
        let v = wavy_field();
        let lambda = 1.5;
        let nf = normalize_field(&v, lambda).unwrap();
        for theta in torus_grid(2, 64) {
            let k = nf.k(&theta);
            assert!((k.iter().sum::<f64>() - 1.0).abs() <= 1e-14);
            let f = nf.f(&theta);
            let nu = v.eval(&theta);
            for j in 0..2 {
                assert!((f * nu[j] - 2.0 * lambda * k[j]).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn k_grad_matches_finite_differences() {
        let nf = normalize_field(&wavy_field(), 1.5).unwrap();
        let theta = [0.4, 2.1];
        let mut dk = vec![0.0; 4];
        nf.k_and_grad(&theta, &mut dk);
        let h = 1e-6;
        for j in 0..2 {
            let mut tp = theta;
            let mut tm = theta;
            tp[j] += h;
            tm[j] -= h;
            let (kp, km) = (nf.k(&tp), nf.k(&tm));
            for i in 0..2 {
                let fd = (kp[i] - km[i]) / (2.0 * h);
                assert!((fd - dk[i * 2 + j]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rescaling_leaves_k_unchanged() {
        let v = wavy_field();
        let a = normalize_field(&v, 1.5).unwrap();
        let b = normalize_field(&v.scaled(3.0), 1.5).unwrap();
        for theta in torus_grid(2, 16) {
            let (ka, kb) = (a.k(&theta), b.k(&theta));
            for j in 0..2 {
                assert!((ka[j] - kb[j]).abs() <= 1e-14);
            }
            assert!((a.f(&theta) / 3.0 - b.f(&theta)).abs() <= 1e-14);
        }
    }

    #[test]
    fn mu_full_torus_is_zero() {
        let mu = build_mu(3, &InvariantSetKind::FullTorus).unwrap();
        assert_eq!(mu.value(&[0.1, 0.2, 0.3]), 0.0);
    }

    #[test]
    fn mu_sub_torus_closed_form() {
        let kind = InvariantSetKind::SubTorus {
            indices: vec![1],
            values: vec![0.0],
        };
        let mu = build_mu(2, &kind).unwrap();
        for theta in [[0.3, 1.1], [2.0, -0.4]] {
            assert!((mu.value(&theta) - (1.0 - theta[1].cos())).abs() < 1e-15);
            let g = mu.grad(&theta);
            assert!(g[0].abs() < 1e-15);
            assert!((g[1] - theta[1].sin()).abs() < 1e-15);
        }
        assert_eq!(mu.grad(&[1.3, 0.0])[1], 0.0);
    }

    #[test]
    fn mu_periodic_orbit_diagonal() {
        let kind = InvariantSetKind::PeriodicOrbit {
            base: vec![0.0, 0.0],
            direction: vec![1.0, 1.0],
        };
        let mu = build_mu(2, &kind).unwrap();
        for theta in [[0.3f64, 1.1], [2.0, -0.4], [1.0, 1.0]] {
            let expected = 1.0 - (theta[0] - theta[1]).cos();
            assert!((mu.value(&theta) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn annihilator_of_general_direction() {
        for d in [
            vec![2, 3, 5],
            vec![0, 1, 0],
            vec![4, -6, 2],
            vec![1, 1, 1, 1],
        ] {
            let basis = annihilator_basis(&d);
            assert_eq!(basis.len(), d.len() - 1);
            for m in &basis {
                let dot: i64 = m.iter().zip(&d).map(|(a, b)| a * b).sum();
                assert_eq!(dot, 0);
            }
        }
    }

    #[test]
    fn irrational_orbit_direction_unsupported() {
        let kind = InvariantSetKind::PeriodicOrbit {
            base: vec![0.0, 0.0],
            direction: vec![1.0, 2f64.sqrt()],
        };
        assert!(matches!(build_mu(2, &kind), Err(Error::UnsupportedSet(_))));
        let one_dim = InvariantSetKind::PeriodicOrbit {
            base: vec![0.0],
            direction: vec![1.0],
        };
        assert!(matches!(
            build_mu(1, &one_dim),
            Err(Error::UnsupportedSet(_))
        ));
    }

    #[test]
    fn mu_conditions_hold_for_closed_forms() {
        let kinds = [
            InvariantSetKind::SubTorus {
                indices: vec![1],
                values: vec![0.7],
            },
            InvariantSetKind::PeriodicOrbit {
                base: vec![0.5, 1.0],
                direction: vec![1.0, 2.0],
            },
            InvariantSetKind::PeriodicOrbit {
                base: vec![0.0, 0.0, 0.0],
                direction: vec![1.0, 1.0, 0.0],
            },
        ];
        for kind in kinds {
            let n = match &kind {
                InvariantSetKind::PeriodicOrbit { base, .. } => base.len(),
                _ => 2,
            };
            let spec = InvariantSetSpec::new(n, kind).unwrap();
            let per_axis = if n == 2 { 64 } else { 24 };
            let check = check_mu(&spec, per_axis, 0.05, 200);
            assert!(check.passes(), "{check:?}");
            // second-order vanishing: bounded ratio μ/dist²
            assert!(check.kappa < 10.0, "{check:?}");
        }
    }

    #[test]
    fn orbit_distance_on_and_off() {
        let spec = InvariantSetSpec::new(
            2,
            InvariantSetKind::PeriodicOrbit {
                base: vec![0.0, 0.0],
                direction: vec![1.0, 1.0],
            },
        )
        .unwrap();
        assert!(spec.distance(&[0.4, 0.4]) < 1e-12);
        let d = spec.distance(&[0.0, 0.2]);
        assert!((d - 0.2 / 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn invariance_full_torus() {
        let spec = InvariantSetSpec::full(2);
        assert_eq!(
            check_invariance(&sqrt2_field(), &spec, 100.0, 1e-12).unwrap(),
            0.0
        );
    }

    #[test]
    fn invariance_sub_torus_with_vanishing_normal_component() {
        let v = TorusVectorField::new(vec![
            TrigPoly::constant(2, 2.0),
            TrigPoly::zero().with_term(vec![0, 1], 0.0, 1.0),
        ])
        .unwrap();
        let spec = InvariantSetSpec::new(
            2,
            InvariantSetKind::SubTorus {
                indices: vec![1],
                values: vec![0.0],
            },
        )
        .unwrap();
        let drift = check_invariance(&v, &spec, 100.0, 1e-9).unwrap();
        assert!(drift <= 1e-9);
    }

    #[test]
    fn invariance_violation_for_constant_field() {
        let v = TorusVectorField::constant(&[1.0, 1.0]);
        let spec = InvariantSetSpec::new(
            2,
            InvariantSetKind::SubTorus {
                indices: vec![1],
                values: vec![0.0],
            },
        )
        .unwrap();
        assert!(matches!(
            check_invariance(&v, &spec, 100.0, 1e-9),
            Err(Error::InvarianceViolation { .. })
        ));
    }
}
