//! Central finite differences in polar coordinates.

use crate::hamiltonian::PolarGradient;
use crate::phase::PhasePoint;

/// Central differences of `f` in `(r_j, θ_j, z)` with step `h`.
///
/// `p` should be farther than `2h` from every polar axis.
pub fn fd_gradient_oracle<F>(f: F, p: &PhasePoint, h: f64) -> PolarGradient
where
    F: Fn(&PhasePoint) -> f64,
{
    let n = p.n();
    let r = p.radii();
    let theta = p.angles();
    let z = p.z();
    let diff = |plus: PhasePoint, minus: PhasePoint| (f(&plus) - f(&minus)) / (2.0 * h);
    let shifted = |v: &[f64], j: usize, d: f64| {
        let mut w = v.to_vec();
        w[j] += d;
        w
    };
    PolarGradient {
        r: (0..n)
            .map(|j| {
                diff(
                    PhasePoint::from_polar(&shifted(&r, j, h), &theta, z),
                    PhasePoint::from_polar(&shifted(&r, j, -h), &theta, z),
                )
            })
            .collect(),
        theta: (0..n)
            .map(|j| {
                diff(
                    PhasePoint::from_polar(&r, &shifted(&theta, j, h), z),
                    PhasePoint::from_polar(&r, &shifted(&theta, j, -h), z),
                )
            })
            .collect(),
        z: diff(
            PhasePoint::from_polar(&r, &theta, z + h),
            PhasePoint::from_polar(&r, &theta, z - h),
        ),
    }
}

/// `‖a − b‖_∞ / max(‖a‖_∞, floor)`.
pub fn relative_error(analytic: &PolarGradient, numeric: &PolarGradient, floor: f64) -> f64 {
    let diff = analytic
        .r
        .iter()
        .zip(&numeric.r)
        .chain(analytic.theta.iter().zip(&numeric.theta))
        .chain(std::iter::once((&analytic.z, &numeric.z)))
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    diff / analytic.max_abs().max(floor)
}
