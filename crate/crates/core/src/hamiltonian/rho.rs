//! Smooth cutoff in the radius: 0 up to 1/3, 1 from 2/3 on.

/// `exp(−1/t)` for `t > 0`, else 0.
#[inline]
pub(crate) fn flat(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Derivative of [`flat`].
#[inline]
pub(crate) fn flat_prime(t: f64) -> f64 {
    if t > 0.0 {
        flat(t) / (t * t)
    } else {
        0.0
    }
}

/// Smooth step on `[0, 1]`: 0 for `x ≤ 0`, 1 for `x ≥ 1`, symmetric about 1/2.
#[inline]
pub(crate) fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = flat(x);
    a / (a + flat(1.0 - x))
}

#[inline]
pub(crate) fn smooth_step_prime(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let (a, c) = (flat(x), flat(1.0 - x));
    let (da, dc) = (flat_prime(x), flat_prime(1.0 - x));
    let den = a + c;
    (da * c + a * dc) / (den * den)
}

/// `ρ(r) = s(3r−1) / (s(3r−1) + s(2−3r))` with `s(t) = exp(−1/t)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RhoProfile;

impl RhoProfile {
    pub const LOWER: f64 = 1.0 / 3.0;
    pub const UPPER: f64 = 2.0 / 3.0;

    pub fn value(&self, r: f64) -> f64 {
        smooth_step(3.0 * r - 1.0)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        3.0 * smooth_step_prime(3.0 * r - 1.0)
    }
}

pub fn build_rho() -> RhoProfile {
    RhoProfile
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        let rho = build_rho();
        assert_eq!(rho.value(1.0 / 3.0), 0.0);
        assert_eq!(rho.value(2.0 / 3.0), 1.0);
        assert_eq!(rho.value(0.1), 0.0);
        assert_eq!(rho.value(5.0), 1.0);
        assert!(rho.value(0.35) > 0.0);
        assert!(rho.value(0.65) < 1.0);
    }

    #[test]
    fn symmetric_midpoint() {
        assert!((build_rho().value(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn flat_regions_have_zero_slope() {
        let rho = build_rho();
        assert_eq!(rho.derivative(0.2), 0.0);
        assert_eq!(rho.derivative(0.9), 0.0);
    }

    #[test]
    fn monotone_on_samples() {
        let rho = build_rho();
        let mut prev = rho.value(0.0);
        for i in 1..=1000 {
            let r = i as f64 / 1000.0;
            let v = rho.value(r);
            assert!(v >= prev, "decrease at r={r}");
            assert!(rho.derivative(r) >= 0.0);
            prev = v;
        }
    }

    #[test]
    fn derivative_matches_differences() {
        let rho = build_rho();
        let h = 1e-6;
        for r in [0.36, 0.42, 0.5, 0.58, 0.64] {
            let fd = (rho.value(r + h) - rho.value(r - h)) / (2.0 * h);
            assert!((fd - rho.derivative(r)).abs() < 1e-7 * rho.derivative(r).max(1.0));
        }
    }
}
