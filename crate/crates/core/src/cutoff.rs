//! Radial bump and the shrinking cutoff `φ(x,t) = q(|x−x₀| + C·t)`.
//!
//! The profile `q` is the cubic Hermite smoothstep: `1` on `[0, η/2]`, `0` on
//! `[η, ∞)`, and `1 − (3s² − 2s³)` with `s = 2r/η − 1` in between. It is C¹
//! and non-increasing, so the cutoff solves `∂tφ − C·(x−x₀)/|x−x₀|·∇φ = 0`
//! away from the center.

use crate::error::{LabError, Result};
use crate::gas::{dot, norm};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBump<const D: usize> {
    center: [f64; D],
    eta: f64,
}

impl<const D: usize> RadialBump<D> {
    pub fn new(center: [f64; D], eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(LabError::Domain(format!("bump radius must be > 0, got {eta}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(LabError::Domain("bump center must be finite".into()));
        }
        Ok(Self { center, eta })
    }

    pub fn center(&self) -> [f64; D] {
        self.center
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Profile value `q(r)`.
    #[inline]
    pub fn profile(&self, r: f64) -> f64 {
        let half = 0.5 * self.eta;
        if r <= half {
            1.0
        } else if r >= self.eta {
            0.0
        } else {
            let s = (2.0 * r / self.eta - 1.0).clamp(0.0, 1.0);
            1.0 - s * s * (3.0 - 2.0 * s)
        }
    }

    /// Profile derivative `q'(r)`; non-positive, zero outside the transition band.
    #[inline]
    pub fn profile_deriv(&self, r: f64) -> f64 {
        let half = 0.5 * self.eta;
        if r <= half || r >= self.eta {
            0.0
        } else {
            let s = 2.0 * r / self.eta - 1.0;
            -6.0 * s * (1.0 - s) * 2.0 / self.eta
        }
    }

    /// `∫₀^∞ q(r) dr`, the one-dimensional half-mass of the bump: `η/2 + η/4`.
    pub fn radial_mass(&self) -> f64 {
        0.75 * self.eta
    }

    pub fn radius_of(&self, x: &[f64; D]) -> f64 {
        let mut d = [0.0; D];
        for k in 0..D {
            d[k] = x[k] - self.center[k];
        }
        norm(&d)
    }

    pub fn eval(&self, x: &[f64; D]) -> f64 {
        self.profile(self.radius_of(x))
    }
}

/// Outcome of [`TransportedCutoff::sign_condition`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignCheck {
    /// `a·∂tφ + b·∇φ`.
    pub value: f64,
    /// False when `a < 0` or `|b| > C·a·(1 + 1e-9)`, in which case no sign is
    /// guaranteed.
    pub applicable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportedCutoff<const D: usize> {
    bump: RadialBump<D>,
    speed: f64,
}

impl<const D: usize> TransportedCutoff<D> {
    pub fn new(bump: RadialBump<D>, speed: f64) -> Result<Self> {
        if !(speed.is_finite() && speed > 0.0) {
            return Err(LabError::Domain(format!("cutoff speed must be > 0, got {speed}")));
        }
        Ok(Self { bump, speed })
    }

    pub fn bump(&self) -> &RadialBump<D> {
        &self.bump
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    /// Radius of `supp φ(·,t)`, clipped at zero.
    pub fn support_radius(&self, t: f64) -> f64 {
        (self.bump.eta - self.speed * t).max(0.0)
    }

    /// Time at which the support has shrunk to a point.
    pub fn lifetime(&self) -> f64 {
        self.bump.eta / self.speed
    }

    #[inline]
    fn argument(&self, x: &[f64; D], t: f64) -> (f64, f64) {
        let r = self.bump.radius_of(x);
        (r, r + self.speed * t)
    }

    pub fn eval(&self, x: &[f64; D], t: f64) -> f64 {
        self.bump.profile(self.argument(x, t).1)
    }

    /// `∂tφ = C·q'(|x−x₀| + Ct)`.
    pub fn dt(&self, x: &[f64; D], t: f64) -> f64 {
        self.speed * self.bump.profile_deriv(self.argument(x, t).1)
    }

    /// `∇φ = q'(|x−x₀| + Ct)·(x−x₀)/|x−x₀|`, taken as zero at the center.
    pub fn grad(&self, x: &[f64; D], t: f64) -> [f64; D] {
        let (r, arg) = self.argument(x, t);
        let qp = self.bump.profile_deriv(arg);
        let mut g = [0.0; D];
        if r > 0.0 && qp != 0.0 {
            for k in 0..D {
                g[k] = qp * (x[k] - self.bump.center[k]) / r;
            }
        }
        g
    }

    /// Centered finite-difference evaluation of `∂tφ − C·r̂·∇φ` with step `h`.
    pub fn transport_residual(&self, x: &[f64; D], t: f64, h: f64) -> Result<f64> {
        let r = self.bump.radius_of(x);
        if r == 0.0 {
            return Err(LabError::UndefinedDirection);
        }
        if r <= h {
            return Err(LabError::Domain(format!(
                "finite-difference step {h} reaches the cutoff center (distance {r})"
            )));
        }
        let dt = (self.eval(x, t + h) - self.eval(x, t - h)) / (2.0 * h);
        let mut radial_grad = 0.0;
        for k in 0..D {
            let mut xp = *x;
            let mut xm = *x;
            xp[k] += h;
            xm[k] -= h;
            let dk = (self.eval(&xp, t) - self.eval(&xm, t)) / (2.0 * h);
            radial_grad += dk * (x[k] - self.bump.center[k]) / r;
        }
        Ok(dt - self.speed * radial_grad)
    }

    /// `a·∂tφ + b·∇φ` with analytic derivatives. Non-positive whenever
    /// `a ≥ 0` and `|b| ≤ C·a`.
    pub fn sign_condition(&self, a: f64, b: &[f64; D], x: &[f64; D], t: f64) -> SignCheck {
        let applicable = a >= 0.0 && norm(b) <= self.speed * a * (1.0 + 1e-9);
        let value = a * self.dt(x, t) + dot(b, &self.grad(x, t));
        SignCheck { value, applicable }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit_bump() -> RadialBump<1> {
        RadialBump::new([0.0], 1.0).unwrap()
    }

    #[test]
    fn bump_examples() {
        let b = unit_bump();
        assert_eq!(b.eval(&[0.3]), 1.0);
        assert_eq!(b.eval(&[-1.2]), 0.0);
        assert_abs_diff_eq!(b.eval(&[0.75]), 0.5, epsilon = 1e-15);
        assert_eq!(b.profile(0.5), 1.0);
        assert_eq!(b.profile(1.0), 0.0);
    }

    #[test]
    fn profile_derivative_vanishes_at_band_ends() {
        let b = unit_bump();
        for r in [0.0, 0.5, 1.0, 2.0] {
            assert_eq!(b.profile_deriv(r), 0.0);
        }
        assert!(b.profile_deriv(0.75) < 0.0);
        // q'(3/4) = -6·½·½·2 = -3
        assert_abs_diff_eq!(b.profile_deriv(0.75), -3.0, epsilon = 1e-14);
    }

    #[test]
    fn cutoff_examples() {
        let c = TransportedCutoff::new(unit_bump(), 1.0).unwrap();
        assert_eq!(c.eval(&[0.2], 0.2), 1.0);
        assert_eq!(c.eval(&[0.6], 0.4), 0.0);
        assert_eq!(c.eval(&[-0.5], 0.7), 0.0);
        // radial argument 0 + 2·0.5 = η, on the outer edge where q = 0.
        let c2 = TransportedCutoff::new(unit_bump(), 2.0).unwrap();
        assert_eq!(c2.eval(&[0.0], 0.5), 0.0);
    }

    #[test]
    fn residual_rejects_center() {
        let c = TransportedCutoff::new(unit_bump(), 1.0).unwrap();
        assert_eq!(
            c.transport_residual(&[0.0], 0.1, 1e-3),
            Err(LabError::UndefinedDirection)
        );
        assert!(c.transport_residual(&[1e-4], 0.1, 1e-3).is_err());
    }

    #[test]
    fn residual_in_flat_core_is_zero() {
        let b = RadialBump::new([0.0, 0.0], 1.0).unwrap();
        let c = TransportedCutoff::new(b, 1.3).unwrap();
        assert_eq!(c.transport_residual(&[0.1, 0.05], 0.05, 1e-4).unwrap(), 0.0);
    }

    #[test]
    fn residual_shrinks_quadratically_in_band() {
        let b = RadialBump::new([0.0, 0.0], 1.0).unwrap();
        let c = TransportedCutoff::new(b, 0.7).unwrap();
        let x = [0.41, 0.27];
        let coarse = c.transport_residual(&x, 0.12, 1e-3).unwrap().abs();
        let fine = c.transport_residual(&x, 0.12, 1e-4).unwrap().abs();
        assert!(coarse <= 1e-5, "coarse residual {coarse}");
        assert!(coarse >= 50.0 * fine, "coarse {coarse} fine {fine}");
    }

    #[test]
    fn sign_condition_examples() {
        let c = TransportedCutoff::new(unit_bump(), 1.5).unwrap();
        let s = c.sign_condition(0.0, &[0.0], &[0.7], 0.0);
        assert_eq!(s.value, 0.0);
        assert!(s.applicable);
        let s = c.sign_condition(2.0, &[1.0], &[0.1], 0.0);
        assert_eq!(s.value, 0.0);
        // b = −C·r̂ in the transition band gives a·C·q' − C·q' ≤ 0 with a = 1.
        let x = [0.6];
        let s = c.sign_condition(1.0, &[-1.5], &x, 0.05);
        assert!(s.applicable);
        assert!(s.value <= 0.0);
        let s = c.sign_condition(1.0, &[3.0], &x, 0.05);
        assert!(!s.applicable);
    }

    #[test]
    fn support_shrinks_at_speed() {
        let c = TransportedCutoff::new(unit_bump(), 2.0).unwrap();
        assert_eq!(c.support_radius(0.25), 0.5);
        assert_eq!(c.support_radius(1.0), 0.0);
        assert_eq!(c.lifetime(), 0.5);
    }
}
