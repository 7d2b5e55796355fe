//! The coupled quadratic form
//! `Q^b[τ](r, θ) = Σ_i k_i(θ)(r_i − τ)² + b Σ_{p≠q} (r_p − r_q)²`
//! and its matrix `A(b)`, with the numerical certificates used to pick `b`.
//!
//! The pair sum runs over ordered pairs, so `Q^b[0] = rᵀ A(b) r` where
//! `A(b)` has diagonal `k_i + 2(n−1)b` and off-diagonal `−2b`. Because the
//! pair sum is shift invariant, `Q^b[τ](r) = (r − τ𝟙)ᵀ A(b) (r − τ𝟙)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::NormalizedField;
use crate::trig::torus_grid;

/// Upper bound for the `C` parameter (exclusive).
pub const C_MAX: f64 = 7.0 / 9.0;
/// Largest coupling tried by [`find_b`].
pub const B_SEARCH_CAP: f64 = (1u64 << 30) as f64;

/// `Q^b[τ]` bound to a normalized field.
#[derive(Debug, Clone, Copy)]
pub struct QuadForm<'a> {
    pub b: f64,
    pub tau: f64,
    pub k: &'a NormalizedField,
}

fn check_domain(r: &[f64]) -> Result<()> {
    if let Some(bad) = r.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::Domain(format!("radius {bad} is not positive")));
    }
    Ok(())
}

impl<'a> QuadForm<'a> {
    pub fn new(b: f64, tau: f64, k: &'a NormalizedField) -> Self {
        Self { b, tau, k }
    }

    pub fn eval(&self, r: &[f64], theta: &[f64]) -> Result<f64> {
        check_domain(r)?;
        Ok(q_value(&self.k.k(theta), self.b, self.tau, r))
    }

    /// `(∂Q/∂r, ∂Q/∂θ)`.
    pub fn grad(&self, r: &[f64], theta: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        check_domain(r)?;
        let n = r.len();
        let mut dk = vec![0.0; n * n];
        let k = self.k.k_and_grad(theta, &mut dk);
        let mut gr = vec![0.0; n];
        q_grad_r(&k, self.b, self.tau, r, &mut gr);
        let mut gt = vec![0.0; n];
        q_grad_theta(&dk, self.tau, r, &mut gt);
        Ok((gr, gt))
    }
}

/// `Q^b[τ](r)` for fixed coefficients `k`.
pub fn q_value(k: &[f64], b: f64, tau: f64, r: &[f64]) -> f64 {
    let n = r.len();
    let mut diag = 0.0;
    for i in 0..n {
        diag += k[i] * (r[i] - tau).powi(2);
    }
    let mut pairs = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            pairs += (r[p] - r[q]).powi(2);
        }
    }
    diag + 2.0 * b * pairs
}

/// `∂Q/∂r_j = 2k_j(r_j − τ) + 4b Σ_{q≠j}(r_j − r_q)`.
pub fn q_grad_r(k: &[f64], b: f64, tau: f64, r: &[f64], out: &mut [f64]) {
    let n = r.len();
    for j in 0..n {
        let mut coupling = 0.0;
        for q in 0..n {
            if q != j {
                coupling += r[j] - r[q];
            }
        }
        out[j] = 2.0 * k[j] * (r[j] - tau) + 4.0 * b * coupling;
    }
}

/// `∂Q/∂θ_j = Σ_i ∂k_i/∂θ_j (r_i − τ)²`, with `dk[i*n + j] = ∂k_i/∂θ_j`.
pub fn q_grad_theta(dk: &[f64], tau: f64, r: &[f64], out: &mut [f64]) {
    let n = r.len();
    for j in 0..n {
        out[j] = (0..n).map(|i| dk[i * n + j] * (r[i] - tau).powi(2)).sum();
    }
}

/// `A(b)` at fixed coefficients `k`.
pub fn a_matrix(k: &[f64], b: f64) -> DMatrix<f64> {
    let n = k.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            k[i] + 2.0 * (n as f64 - 1.0) * b
        } else {
            -2.0 * b
        }
    })
}

/// Eigenvalues of `A(b)` in ascending order, with matching eigenvectors (columns).
pub fn sorted_eigen(k: &[f64], b: f64) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(a_matrix(k, b));
    let n = k.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &c| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[c]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |row, col| eig.eigenvectors[(row, order[col])]);
    (values, vectors)
}

fn grid_for(k: &NormalizedField, per_axis: usize) -> Vec<Vec<f64>> {
    if k.constant_k().is_some() {
        vec![vec![0.0; k.dim()]]
    } else {
        torus_grid(k.dim(), per_axis)
    }
}

/// Picks the smallest value; ties go to the lowest index.
fn argmin_by<T, F: Fn(&T) -> f64>(items: &[T], key: F) -> usize {
    let mut best = 0;
    for i in 1..items.len() {
        if key(&items[i]) < key(&items[best]) {
            best = i;
        }
    }
    best
}

/// Smallest eigenvalue of `A(b)(θ)` over a uniform torus grid.
pub fn min_eig_over_torus(b: f64, k: &NormalizedField, per_axis: usize) -> (f64, Vec<f64>) {
    let grid = grid_for(k, per_axis);
    let mins: Vec<f64> = grid
        .par_iter()
        .map(|theta| sorted_eigen(&k.k(theta), b).0[0])
        .collect();
    let i = argmin_by(&mins, |v| *v);
    (mins[i], grid[i].clone())
}

/// Spectrum of `A(b)` at one angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSnapshot {
    pub b: f64,
    pub eigenvalues: Vec<f64>,
    /// `λ_1/λ_i` for `i ≥ 2`.
    pub ratios: Vec<f64>,
    /// Principal angle between the lowest eigenspace and `span{(1,…,1)}`.
    pub angle: f64,
}

pub fn eigen_asymptotics(b_list: &[f64], k: &NormalizedField, theta: &[f64]) -> Vec<EigenSnapshot> {
    let kv = k.k(theta);
    let n = kv.len();
    let ones = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    b_list
        .iter()
        .map(|&b| {
            let (values, vectors) = sorted_eigen(&kv, b);
            let lo = values[0];
            let scale = values
                .iter()
                .fold(0.0f64, |a, v| a.max(v.abs()))
                .max(1e-300);
            // lowest eigenspace, including numerically repeated eigenvalues
            let cluster: Vec<usize> = (0..n)
                .filter(|&i| (values[i] - lo).abs() <= 1e-9 * scale)
                .collect();
            let proj_sq: f64 = cluster
                .iter()
                .map(|&i| vectors.column(i).dot(&ones).powi(2))
                .sum();
            let angle = proj_sq.min(1.0).sqrt().acos();
            EigenSnapshot {
                b,
                ratios: values[1..].iter().map(|v| lo / v).collect(),
                eigenvalues: values,
                angle,
            }
        })
        .collect()
}

/// Distance from `v` to the segment joining `±s(1,…,1)`.
pub fn point_segment_distance(v: &[f64], s: f64) -> f64 {
    let n = v.len() as f64;
    let t = (v.iter().sum::<f64>() / n).clamp(-s, s);
    v.iter().map(|x| (x - t).powi(2)).sum::<f64>().sqrt()
}

/// Hausdorff distance between `E(c) = {v : vᵀA(b)v ≤ c}` and the segment
/// `J(c)` joining `±(√c,…,√c)`, by sampling `∂E(c)`.
///
/// `J(c) ⊂ E(c)` is checked first, so only the directed distance from the
/// ellipsoid to the segment is needed.
pub fn hausdorff_e_to_j(
    b: f64,
    c: f64,
    k: &NormalizedField,
    theta: &[f64],
    samples: usize,
) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::ConstraintViolation(format!(
            "c must be positive (got {c})"
        )));
    }
    let kv = k.k(theta);
    let n = kv.len();
    let (values, vectors) = sorted_eigen(&kv, b);
    if !(values[0] > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eig: values[0] });
    }
    let s = c.sqrt();
    let a = a_matrix(&kv, b);
    let end = DVector::from_element(n, s);
    let qe = end.dot(&(&a * &end));
    if qe > c * (1.0 + 1e-12) {
        return Err(Error::ConstraintViolation(format!(
            "segment endpoint lies outside the ellipsoid ({qe} > {c})"
        )));
    }
    let semi: Vec<f64> = values.iter().map(|l| (c / l).sqrt()).collect();
    let boundary_point = |u: &[f64]| -> Vec<f64> {
        let mut v = vec![0.0; n];
        for (i, ui) in u.iter().enumerate() {
            for (row, vr) in v.iter_mut().enumerate() {
                *vr += semi[i] * ui * vectors[(row, i)];
            }
        }
        v
    };
    let dist_at = |u: &[f64]| point_segment_distance(&boundary_point(u), s);

    let samples = samples.max(8);
    if n == 2 {
        let step = std::f64::consts::TAU / samples as f64;
        let angle_dist = |phi: f64| dist_at(&[phi.cos(), phi.sin()]);
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 0..samples {
            let phi = i as f64 * step;
            let d = angle_dist(phi);
            if d > best.0 {
                best = (d, phi);
            }
        }
        let (mut lo, mut hi) = (best.1 - step, best.1 + step);
        let gr = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..100 {
            let x1 = hi - gr * (hi - lo);
            let x2 = lo + gr * (hi - lo);
            if angle_dist(x1) > angle_dist(x2) {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        return Ok(best.0.max(angle_dist(0.5 * (lo + hi))));
    }

    // Higher dimensions: axis points plus a low-discrepancy cloud on the sphere.
    let mut best: f64 = 0.0;
    let mut u = vec![0.0; n];
    for i in 0..n {
        for sign in [-1.0, 1.0] {
            u.iter_mut().for_each(|x| *x = 0.0);
            u[i] = sign;
            best = best.max(dist_at(&u));
        }
    }
    const PRIMES: [f64; 12] = [2., 3., 5., 7., 11., 13., 17., 19., 23., 29., 31., 37.];
    for i in 0..samples {
        for (j, x) in u.iter_mut().enumerate() {
            let alpha = PRIMES[j % PRIMES.len()].sqrt().fract();
            *x = 2.0 * ((i as f64 + 0.5) * alpha).fract() - 1.0;
        }
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            u.iter_mut().for_each(|x| *x /= norm);
            best = best.max(dist_at(&u));
        }
    }
    Ok(best)
}

/// Radius bound from positive definiteness: `Q^b[2] ≤ q` forces
/// `|r − 2𝟙| ≤ √(q/λ_min)`, so every `r_j ≤ 2 + √(q/λ_min)`.
pub fn sublevel_radius(level: f64, lambda_min: f64) -> f64 {
    2.0 + (level / lambda_min).sqrt()
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c < C_MAX) {
        return Err(Error::ConstraintViolation(format!(
            "C must satisfy 0 < C < 7/9 (got {c})"
        )));
    }
    Ok(())
}

/// Numerical certificate that `Q^b[2] > 1 + C` on the closure of the region
/// where some radius lies in `[1/3, 2/3]` and all others are `≥ 1/3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaLCertificate {
    pub b: f64,
    pub c: f64,
    /// `min Q^b[2] − (1 + C)`.
    pub margin: f64,
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    /// Cap used for the unbounded radii.
    pub r_cap: f64,
    /// Lipschitz bound on how much the minimum can drop between angle grid points.
    pub theta_slack: f64,
    pub grid_points: usize,
}

impl LemmaLCertificate {
    pub fn passes(&self) -> bool {
        self.margin > 0.0
    }

    pub fn ensure(&self) -> Result<()> {
        if self.passes() {
            Ok(())
        } else {
            Err(Error::MarginNegative {
                margin: self.margin,
                r: self.r.clone(),
                theta: self.theta.clone(),
            })
        }
    }
}

/// Minimizes `Q^b[2]` over the closure of the region `L` (radii capped at the
/// sublevel radius) and the angle grid.
///
/// Each box of `L̄` is handled with a coarse radius grid followed by an exact
/// box-constrained solve (enumeration of active faces), which is exact for
/// the strictly convex quadratic.
pub fn check_lemma_l(
    b: f64,
    c: f64,
    k: &NormalizedField,
    per_axis: usize,
    r_grid: usize,
) -> Result<LemmaLCertificate> {
    check_c(c)?;
    let n = k.dim();
    let (lambda_min, _) = min_eig_over_torus(b, k, per_axis);
    if !(lambda_min > 0.0) {
        return Err(Error::NotPositiveDefinite {
            min_eig: lambda_min,
        });
    }
    let r_cap = sublevel_radius(1.0 + c, lambda_min) + 0.01;
    let grid = grid_for(k, per_axis);
    let lo_r = 1.0 / 3.0;
    let hi_r = 2.0 / 3.0;

    let per_theta: Vec<(f64, Vec<f64>, f64)> = grid
        .par_iter()
        .map(|theta| {
            let mut dk = vec![0.0; n * n];
            let kv = k.k_and_grad(theta, &mut dk);
            let mut best = (f64::INFINITY, Vec::new());
            for i in 0..n {
                let mut lo = vec![lo_r; n];
                let mut hi = vec![r_cap; n];
                hi[i] = hi_r;
                lo[i] = lo_r;
                let (v, r) = box_minimum(&kv, b, 2.0, &lo, &hi, r_grid);
                if v < best.0 {
                    best = (v, r);
                }
            }
            // largest |∂k/∂θ_j| column sum, for the grid-spacing slack
            let gk = (0..n)
                .map(|j| (0..n).map(|i| dk[i * n + j].abs()).sum::<f64>())
                .fold(0.0f64, f64::max);
            (best.0, best.1, gk)
        })
        .collect();

    let idx = argmin_by(&per_theta, |t| t.0);
    let (qmin, r, _) = per_theta[idx].clone();
    let theta_slack = if k.constant_k().is_some() {
        0.0
    } else {
        let gk = per_theta.iter().map(|t| t.2).fold(0.0f64, f64::max);
        let spread = (2.0 - lo_r).max(r_cap - 2.0).powi(2);
        let h = std::f64::consts::TAU / per_axis as f64;
        gk * spread * 0.5 * h * (n as f64).sqrt()
    };
    Ok(LemmaLCertificate {
        b,
        c,
        margin: qmin - (1.0 + c),
        r,
        theta: grid[idx].clone(),
        r_cap,
        theta_slack,
        grid_points: grid.len(),
    })
}

/// Minimum of `Q^b[τ]` over the box `[lo, hi]` at fixed `k`.
pub fn box_minimum(
    k: &[f64],
    b: f64,
    tau: f64,
    lo: &[f64],
    hi: &[f64],
    r_grid: usize,
) -> (f64, Vec<f64>) {
    let n = k.len();
    let mut best = (f64::INFINITY, lo.to_vec());

    // coarse grid
    let m = r_grid.max(2);
    let total = m.pow(n as u32);
    let mut r = vec![0.0; n];
    for mut idx in 0..total {
        for j in (0..n).rev() {
            let t = (idx % m) as f64 / (m - 1) as f64;
            r[j] = lo[j] + t * (hi[j] - lo[j]);
            idx /= m;
        }
        let v = q_value(k, b, tau, &r);
        if v < best.0 {
            best = (v, r.clone());
        }
    }

    // exact polish: every face of the box, stationary point restricted to it
    let a = a_matrix(k, b);
    let patterns = 3usize.pow(n as u32);
    for mut code in 0..patterns {
        let mut fixed = vec![None; n];
        for f in fixed.iter_mut() {
            *f = match code % 3 {
                0 => None,
                1 => Some(0),
                _ => Some(1),
            };
            code /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&j| fixed[j].is_none()).collect();
        let mut cand = vec![0.0; n];
        for j in 0..n {
            cand[j] = match fixed[j] {
                Some(0) => lo[j],
                Some(_) => hi[j],
                None => 0.0,
            };
        }
        if !free.is_empty() {
            // minimize (r − τ𝟙)ᵀA(r − τ𝟙) over free coords: A_ff x_f = −A_fb x_b
            let nf = free.len();
            let mut aff = DMatrix::zeros(nf, nf);
            let mut rhs = DVector::zeros(nf);
            for (fi, &i) in free.iter().enumerate() {
                for (fj, &j) in free.iter().enumerate() {
                    aff[(fi, fj)] = a[(i, j)];
                }
                let mut s = 0.0;
                for j in 0..n {
                    if fixed[j].is_some() {
                        s += a[(i, j)] * (cand[j] - tau);
                    }
                }
                rhs[fi] = -s;
            }
            let Some(sol) = aff.cholesky().map(|ch| ch.solve(&rhs)) else {
                continue;
            };
            let mut feasible = true;
            for (fi, &i) in free.iter().enumerate() {
                let x = sol[fi] + tau;
                let slack = 1e-12 * (1.0 + x.abs());
                if x < lo[i] - slack || x > hi[i] + slack {
                    feasible = false;
                    break;
                }
                cand[i] = x.clamp(lo[i], hi[i]);
            }
            if !feasible {
                continue;
            }
        }
        let v = q_value(k, b, tau, &cand);
        if v < best.0 {
            best = (v, cand);
        }
    }
    best
}

/// A `b` with both certificates attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BCertificate {
    pub b: f64,
    pub min_eig: f64,
    pub min_eig_theta: Vec<f64>,
    pub lemma_l: LemmaLCertificate,
}

impl BCertificate {
    pub fn passes(&self) -> bool {
        self.min_eig > 0.0 && self.lemma_l.passes()
    }
}

/// Certifies a given `b` (positive definiteness and the region-L margin).
pub fn certify_b(
    b: f64,
    c: f64,
    k: &NormalizedField,
    per_axis: usize,
    r_grid: usize,
) -> Result<BCertificate> {
    check_c(c)?;
    let (min_eig, min_eig_theta) = min_eig_over_torus(b, k, per_axis);
    if !(min_eig > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eig });
    }
    let lemma_l = check_lemma_l(b, c, k, per_axis, r_grid)?;
    Ok(BCertificate {
        b,
        min_eig,
        min_eig_theta,
        lemma_l,
    })
}

/// Doubling search `b = 1, 2, 4, …` up to `2^30`.
pub fn find_b(c: f64, k: &NormalizedField, per_axis: usize, r_grid: usize) -> Result<BCertificate> {
    check_c(c)?;
    let mut b = 1.0;
    while b <= B_SEARCH_CAP {
        match certify_b(b, c, k, per_axis, r_grid) {
            Ok(cert) if cert.passes() => return Ok(cert),
            Ok(_) | Err(Error::NotPositiveDefinite { .. }) => {}
            Err(e) => return Err(e),
        }
        b *= 2.0;
    }
    Err(Error::SearchExhausted { cap: B_SEARCH_CAP })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{normalize_field, TorusVectorField};
    use crate::trig::TrigPoly;

    fn half_half() -> NormalizedField {
        normalize_field(&TorusVectorField::constant(&[1.0, 1.0]), 1.5).unwrap()
    }

    fn wavy() -> NormalizedField {
        let v = TorusVectorField::new(vec![
            TrigPoly::constant(2, 2.0).with_term(vec![0, 1], 0.3, 0.1),
            TrigPoly::constant(2, 1.0).with_term(vec![1, -1], 0.2, -0.4),
        ])
        .unwrap();
        normalize_field(&v, 1.5).unwrap()
    }

    #[test]
    fn q_center_vanishes() {
        let k = half_half();
        let th = [0.0, 0.0];
        assert_eq!(
            QuadForm::new(3.0, 2.0, &k).eval(&[2.0, 2.0], &th).unwrap(),
            0.0
        );
        assert_eq!(
            QuadForm::new(3.0, 1.0, &k).eval(&[1.0, 1.0], &th).unwrap(),
            0.0
        );
    }

    #[test]
    fn q_hand_value() {
        let k = half_half();
        let v = QuadForm::new(1.0, 2.0, &k)
            .eval(&[1.0, 1.0], &[0.0, 0.0])
            .unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn q_rejects_nonpositive_radius() {
        let k = half_half();
        let q = QuadForm::new(1.0, 2.0, &k);
        assert!(matches!(
            q.eval(&[0.0, 1.0], &[0.0, 0.0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            q.grad(&[1.0, -1.0], &[0.0, 0.0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn grad_hand_value_and_radial_identity() {
        let k = half_half();
        let (gr, gt) = QuadForm::new(1.0, 2.0, &k)
            .grad(&[1.0, 1.0], &[0.0, 0.0])
            .unwrap();
        assert_eq!(gr, vec![-1.0, -1.0]);
        assert_eq!(gt, vec![0.0, 0.0]);
        let q1 = QuadForm::new(1.0, 1.0, &k)
            .eval(&[1.0, 1.0], &[0.0, 0.0])
            .unwrap();
        assert_eq!(gr[0] + gr[1], 2.0 * q1 - 2.0);
    }

    #[test]
    fn grad_matches_finite_differences_for_varying_k() {
        let k = wavy();
        let q = QuadForm::new(3.0, 2.0, &k);
        let r = [0.9, 1.7];
        let th = [0.8, 2.3];
        let (gr, gt) = q.grad(&r, &th).unwrap();
        let h = 1e-6;
        for j in 0..2 {
            let (mut rp, mut rm) = (r, r);
            rp[j] += h;
            rm[j] -= h;
            let fd = (q.eval(&rp, &th).unwrap() - q.eval(&rm, &th).unwrap()) / (2.0 * h);
            assert!((fd - gr[j]).abs() / gr[j].abs().max(1.0) < 1e-7);
            let (mut tp, mut tm) = (th, th);
            tp[j] += h;
            tm[j] -= h;
            let fd = (q.eval(&r, &tp).unwrap() - q.eval(&r, &tm).unwrap()) / (2.0 * h);
            assert!((fd - gt[j]).abs() / gt[j].abs().max(1.0) < 1e-7);
        }
    }

    #[test]
    fn min_eig_closed_forms() {
        let k = half_half();
        assert!((min_eig_over_torus(1.0, &k, 8).0 - 0.5).abs() < 1e-12);
        assert!((min_eig_over_torus(10.0, &k, 8).0 - 0.5).abs() < 1e-12);
        assert!((min_eig_over_torus(0.0, &k, 8).0 - 0.5).abs() < 1e-15);
        let (vals, _) = sorted_eigen(&[0.5, 0.5], 1.0);
        assert!((vals[1] - 4.5).abs() < 1e-12);
    }

    #[test]
    fn asymptotics_closed_form_and_degenerate_case() {
        let k = half_half();
        let snaps = eigen_asymptotics(&[0.0, 10.0], &k, &[0.0, 0.0]);
        assert!((snaps[0].ratios[0] - 1.0).abs() < 1e-15);
        assert!(snaps[0].angle.abs() < 1e-7);
        assert!((snaps[1].ratios[0] - 0.5 / 40.5).abs() < 1e-12);
        assert!(snaps[1].angle.abs() < 1e-7);
    }

    #[test]
    fn hausdorff_semi_minor_axis() {
        let k = half_half();
        let d = hausdorff_e_to_j(100.0, 1.0, &k, &[0.0, 0.0], 720).unwrap();
        assert!((d - (1.0f64 / 400.5).sqrt()).abs() < 1e-10, "{d}");
    }

    #[test]
    fn hausdorff_rejects_indefinite() {
        let v = TorusVectorField::constant(&[1.0, 0.0]);
        let k = normalize_field(&v, 1.5).unwrap();
        assert!(matches!(
            hausdorff_e_to_j(0.0, 1.0, &k, &[0.0, 0.0], 64),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn lemma_l_precondition() {
        let k = half_half();
        assert!(matches!(
            check_lemma_l(4.0, 0.8, &k, 8, 8),
            Err(Error::ConstraintViolation(_))
        ));
        assert!(matches!(
            find_b(0.8, &k, 8, 8),
            Err(Error::ConstraintViolation(_))
        ));
    }

    #[test]
    fn lemma_l_inner_square_without_coupling() {
        // b = 0, both radii in [1/3, 2/3]: the worst corner is (2/3, 2/3).
        let (v, r) = box_minimum(&[0.5, 0.5], 0.0, 2.0, &[1.0 / 3.0; 2], &[2.0 / 3.0; 2], 5);
        assert!((v - (4.0f64 / 3.0).powi(2)).abs() < 1e-12);
        assert!(v > 1.7);
        assert_eq!(r, vec![2.0 / 3.0, 2.0 / 3.0]);
    }

    #[test]
    fn negative_margin_reports_witness() {
        let cert = check_lemma_l(1.0, 0.7, &half_half(), 8, 16).unwrap();
        match cert.ensure() {
            Err(Error::MarginNegative { margin, r, .. }) => {
                assert!(margin < 0.0);
                assert_eq!(r.len(), 2);
            }
            other => panic!("expected MarginNegative, got {other:?}"),
        }
    }

    #[test]
    fn find_b_for_small_c() {
        let cert = find_b(0.1, &half_half(), 8, 16).unwrap();
        assert!(cert.b <= 4.0);
        assert!(cert.passes());
    }

    #[test]
    fn find_b_varying_k_certifies() {
        let cert = find_b(0.7, &wavy(), 16, 12).unwrap();
        assert!(cert.passes());
        assert!(cert.lemma_l.theta_slack >= 0.0);
    }
}
