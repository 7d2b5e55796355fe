//! Standard contact geometry on `R^{2n+1}` and the Reeb field of `α_st / H`.
//!
//! `α_st = dz + ½ Σ_j (x_j dy_j − y_j dx_j)` has Reeb field `∂z`. A positive
//! function `H` corresponds to the contact vector field `X = H ∂z + Y`,
//! where `Y ∈ ker α_st` solves `i(Y)dα_st = dH(∂z)α_st − dH`. In polar
//! coordinates
//!
//! ```text
//! Y = Σ_j [ (r_j/2·H_z − H_{θ_j}/r_j) ∂_{r_j} + (H_{r_j}/r_j)(∂_{θ_j} − (r_j²/2) ∂z) ]
//! ```
//!
//! and since `α_st(X) = H > 0`, `X` is the Reeb field of `α = α_st / H`.

use serde::{Deserialize, Serialize};

use crate::hamiltonian::{HamiltonianModel, PolarGradient};
pub use crate::phase::{PhasePoint, TangentVector};

/// `α_st(v)` at `p`.
pub fn alpha_st(p: &PhasePoint, v: &TangentVector) -> f64 {
    let n = p.n();
    let mut s = v.comps[2 * n];
    for j in 0..n {
        s += 0.5 * (p.x(j) * v.comps[2 * j + 1] - p.y(j) * v.comps[2 * j]);
    }
    s
}

/// `dα_st(v, w) = Σ_j dx_j ∧ dy_j (v, w)`; independent of the base point.
pub fn d_alpha_st(v: &TangentVector, w: &TangentVector) -> f64 {
    let n = v.n();
    (0..n)
        .map(|j| v.comps[2 * j] * w.comps[2 * j + 1] - v.comps[2 * j + 1] * w.comps[2 * j])
        .sum()
}

/// The `2n` vectors `∂x_j + (y_j/2)∂z`, `∂y_j − (x_j/2)∂z` spanning `ker α_st`.
pub fn kernel_frame(p: &PhasePoint) -> Vec<TangentVector> {
    let n = p.n();
    let mut out = Vec::with_capacity(2 * n);
    for j in 0..n {
        let mut ex = TangentVector::dx(n, j);
        ex.comps[2 * n] = 0.5 * p.y(j);
        let mut ey = TangentVector::dy(n, j);
        ey.comps[2 * n] = -0.5 * p.x(j);
        out.push(ex);
        out.push(ey);
    }
    out
}

/// Converts a polar gradient to the Cartesian differential at `p`.
pub fn cartesian_differential(p: &PhasePoint, g: &PolarGradient) -> TangentVector {
    let n = p.n();
    let mut d = TangentVector::zero(n);
    for j in 0..n {
        let r = p.r(j);
        if r == 0.0 {
            continue;
        }
        let (c, s) = (p.x(j) / r, p.y(j) / r);
        d.comps[2 * j] = g.r[j] * c - g.theta[j] * s / r;
        d.comps[2 * j + 1] = g.r[j] * s + g.theta[j] * c / r;
    }
    d.comps[2 * n] = g.z;
    d
}

/// Contact vector field of a Hamiltonian value `h` with polar gradient `g`.
pub fn contact_vector_field(p: &PhasePoint, h: f64, g: &PolarGradient) -> TangentVector {
    let n = p.n();
    let mut x = TangentVector::zero(n);
    let mut vz = h;
    for j in 0..n {
        let r = p.r(j);
        if r == 0.0 {
            continue;
        }
        let radial = 0.5 * r * g.z - g.theta[j] / r;
        let angular = g.r[j] / r;
        let (xj, yj) = (p.x(j), p.y(j));
        x.comps[2 * j] = radial * xj / r - angular * yj;
        x.comps[2 * j + 1] = radial * yj / r + angular * xj;
        vz -= 0.5 * r * g.r[j];
    }
    x.comps[2 * n] = vz;
    x
}

/// Reeb field of `α_st / H`.
pub fn reeb_field(m: &HamiltonianModel, p: &PhasePoint) -> TangentVector {
    let e = m.evaluate(p);
    if e.flat {
        return TangentVector::dz(p.n());
    }
    contact_vector_field(p, e.h, &e.grad_h)
}

/// Writes the Reeb field into `out`; used as the ODE right-hand side.
pub fn reeb_rhs(m: &HamiltonianModel, coords: &[f64], out: &mut [f64]) {
    let p = PhasePoint::new(coords.to_vec()).expect("odd state length");
    let x = reeb_field(m, &p);
    out.copy_from_slice(&x.comps);
}

/// Residuals of the Reeb equations for `α = α_st / H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReebResiduals {
    /// `|α(X) − 1|`.
    pub alpha: f64,
    /// `max_i |dα(X, e_i)|` over the kernel frame.
    pub d_alpha: f64,
}

/// Evaluates `α(X)` and `i(X)dα` with `dα = dα_st/H − dH∧α_st/H²`.
pub fn certify_reeb(m: &HamiltonianModel, p: &PhasePoint) -> ReebResiduals {
    let e = m.evaluate(p);
    let x = reeb_field(m, p);
    let dh = cartesian_differential(p, &e.grad_h);
    let h = e.h;
    let ax = alpha_st(p, &x);
    let pair = |v: &TangentVector, w: &TangentVector| -> f64 {
        v.comps.iter().zip(&w.comps).map(|(a, b)| a * b).sum()
    };
    let dhx = pair(&dh, &x);
    let d_alpha = kernel_frame(p)
        .iter()
        .map(|f| {
            let wedge = dhx * alpha_st(p, f) - pair(&dh, f) * ax;
            (d_alpha_st(&x, f) / h - wedge / (h * h)).abs()
        })
        .fold(0.0f64, f64::max);
    ReebResiduals {
        alpha: (ax / h - 1.0).abs(),
        d_alpha,
    }
}

/// `dz(X) = H − ½ Σ_j r_j H_{r_j}`.
pub fn dz_rate(m: &HamiltonianModel, p: &PhasePoint) -> f64 {
    m.h3_margin(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{BChoice, GridOptions};
    use crate::torus::{InvariantSetSpec, TorusVectorField};

    fn model(nu: &[f64]) -> HamiltonianModel {
        HamiltonianModel::build(
            &TorusVectorField::constant(nu),
            InvariantSetSpec::full(nu.len()),
            0.7,
            1.5,
            BChoice::Auto,
            GridOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn alpha_on_basic_vectors() {
        let p = PhasePoint::from_polar(&[1.0, 0.5], &[0.4, 2.0], 0.3);
        assert_eq!(alpha_st(&p, &TangentVector::dz(2)), 1.0);
        let dt = TangentVector::d_angular(&p, 0);
        assert!((alpha_st(&p, &dt) - 0.5).abs() < 1e-15);
        let mut frame = TangentVector::d_angular(&p, 1);
        frame.comps[4] -= 0.5 * 0.25;
        assert!(alpha_st(&p, &frame).abs() < 1e-15);
        for f in kernel_frame(&p) {
            assert_eq!(alpha_st(&p, &f), 0.0);
        }
    }

    #[test]
    fn d_alpha_pairings() {
        assert_eq!(
            d_alpha_st(&TangentVector::dx(2, 0), &TangentVector::dy(2, 0)),
            1.0
        );
        assert_eq!(
            d_alpha_st(&TangentVector::dz(2), &TangentVector::dx(2, 1)),
            0.0
        );
        let v = TangentVector {
            comps: vec![0.3, -1.2, 2.0, 0.7, 0.1],
        };
        let w = TangentVector {
            comps: vec![-0.5, 0.4, 1.1, -2.2, 3.0],
        };
        assert!((d_alpha_st(&v, &w) + d_alpha_st(&w, &v)).abs() < 1e-14);
    }

    #[test]
    fn reeb_is_dz_outside_support() {
        let m = model(&[1.0, 2f64.sqrt()]);
        for p in [
            PhasePoint::from_polar(&[5.0, 1.0], &[0.0, 0.0], 0.0),
            PhasePoint::from_polar(&[1.0, 1.0], &[0.0, 0.0], 2.0),
            PhasePoint::origin(2),
        ] {
            assert_eq!(reeb_field(&m, &p), TangentVector::dz(2));
            let res = certify_reeb(&m, &p);
            assert_eq!(res.alpha, 0.0);
            assert_eq!(res.d_alpha, 0.0);
            assert_eq!(dz_rate(&m, &p), 1.0);
        }
    }

    #[test]
    fn reeb_on_torus_equal_weights() {
        let m = model(&[1.0, 1.0]);
        let p = PhasePoint::from_polar(&[1.0, 1.0], &[0.7, -0.2], 0.0);
        let x = reeb_field(&m, &p);
        for j in 0..2 {
            let rate = (p.x(j) * x.comps[2 * j + 1] - p.y(j) * x.comps[2 * j]) / 1.0;
            assert!((rate - 1.5).abs() < 1e-12);
        }
        assert!(x.z().abs() < 1e-12);
    }

    #[test]
    fn reeb_on_torus_matches_scaled_field() {
        let m = model(&[1.0, 2f64.sqrt()]);
        let p = PhasePoint::from_polar(&[1.0, 1.0], &[1.3, 4.0], 0.0);
        let x = reeb_field(&m, &p);
        let rates: Vec<f64> = (0..2)
            .map(|j| p.x(j) * x.comps[2 * j + 1] - p.y(j) * x.comps[2 * j])
            .collect();
        assert!((rates[0] - 1.242_640_7).abs() < 1e-7);
        assert!((rates[1] - 1.757_359_3).abs() < 1e-7);
        let f = m.field().f(&[1.3, 4.0]);
        assert!((rates[0] - f * 1.0).abs() < 1e-12);
        assert!((rates[1] - f * 2f64.sqrt()).abs() < 1e-12);
        // radial components vanish on the torus
        for j in 0..2 {
            let radial = p.x(j) * x.comps[2 * j] + p.y(j) * x.comps[2 * j + 1];
            assert!(radial.abs() < 1e-12);
        }
        let res = certify_reeb(&m, &p);
        assert!(res.alpha < 1e-12 && res.d_alpha < 1e-12);
        assert!(dz_rate(&m, &p).abs() < 1e-12);
    }

    #[test]
    fn correspondence_roundtrip_and_dz_agreement() {
        let m = model(&[1.0, 2f64.sqrt()]);
        for (r, th, z) in [
            ([0.9, 1.4], [0.2, 1.0], -0.3),
            ([1.8, 0.5], [2.2, -1.0], 0.6),
            ([2.5, 2.1], [0.0, 3.0], 0.1),
        ] {
            let p = PhasePoint::from_polar(&r, &th, z);
            let x = reeb_field(&m, &p);
            let h = m.eval_h(&p);
            assert!((alpha_st(&p, &x) - h).abs() < 1e-12);
            assert!((dz_rate(&m, &p) - x.z()).abs() < 1e-12);
            let res = certify_reeb(&m, &p);
            assert!(res.alpha < 1e-12, "{res:?}");
            assert!(res.d_alpha < 1e-10, "{res:?}");
        }
    }
}
