//! Equation of state, energy densities and the relative energy pair (A, B)
//! of the isentropic system with pressure law `p(ρ) = ρ^γ`.
//!
//! The relative energy density between a strong state `(R, U)` and a weak
//! state `(ρ, u)` is
//!
//! ```text
//! A = ½ρ|u−U|² + R^γ − γ/(γ−1)·ρR^{γ−1} + ρ^γ/(γ−1)
//! ```
//!
//! and its flux is
//!
//! ```text
//! B = ½ρ|u−U|²u − γ/(γ−1)·(R^{γ−1} − ρ^{γ−1})ρu + (R^γ − ρ^γ)U.
//! ```
//!
//! On a bounded state box there is a constant `C` with `|B| ≤ C·A`; it is
//! computed here by exhaustive grid search and by an explicit convexity
//! chain (the latter only without vacuum).

use rayon::prelude::*;

use crate::error::{LabError, Result};

/// Multiplier applied to the grid maximum of `|B|/A`.
pub const GRID_SAFETY_FACTOR: f64 = 1.05;

/// Ratios are only taken where `A` exceeds this value.
pub const A_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParams {
    gamma: f64,
}

impl GasParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(LabError::Domain(format!(
                "adiabatic exponent must satisfy gamma > 1, got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `γ/(γ−1)`, the enthalpy coefficient.
    #[inline]
    pub fn enthalpy_coeff(&self) -> f64 {
        self.gamma / (self.gamma - 1.0)
    }
}

/// Density and velocity at a point of `R^D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState<const D: usize> {
    pub rho: f64,
    pub vel: [f64; D],
}

impl<const D: usize> PrimitiveState<D> {
    pub fn new(rho: f64, vel: [f64; D]) -> Result<Self> {
        if !rho.is_finite() || vel.iter().any(|v| !v.is_finite()) {
            return Err(LabError::Domain("state components must be finite".into()));
        }
        if rho < 0.0 {
            return Err(LabError::Domain(format!("negative density {rho}")));
        }
        Ok(Self { rho, vel })
    }

    /// Builds a state without validation; callers guarantee the invariants.
    #[inline]
    pub const fn new_unchecked(rho: f64, vel: [f64; D]) -> Self {
        Self { rho, vel }
    }

    #[inline]
    pub fn speed(&self) -> f64 {
        norm(&self.vel)
    }
}

impl PrimitiveState<1> {
    #[inline]
    pub const fn scalar(rho: f64, u: f64) -> Self {
        Self { rho, vel: [u] }
    }

    #[inline]
    pub fn u(&self) -> f64 {
        self.vel[0]
    }
}

#[inline]
pub(crate) fn dot<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm<const D: usize>(a: &[f64; D]) -> f64 {
    dot(a, a).sqrt()
}

fn check_density(name: &str, rho: f64) -> Result<()> {
    if rho.is_nan() || rho < 0.0 {
        Err(LabError::Domain(format!("{name} must be nonnegative, got {rho}")))
    } else {
        Ok(())
    }
}

pub fn pressure(rho: f64, g: GasParams) -> Result<f64> {
    check_density("density", rho)?;
    Ok(rho.powf(g.gamma))
}

/// `√(γρ^{γ−1})`.
pub fn sound_speed(rho: f64, g: GasParams) -> Result<f64> {
    check_density("density", rho)?;
    Ok(sound_speed_unchecked(rho, g))
}

#[inline]
pub(crate) fn sound_speed_unchecked(rho: f64, g: GasParams) -> f64 {
    if rho <= 0.0 {
        0.0
    } else {
        (g.gamma * rho.powf(g.gamma - 1.0)).sqrt()
    }
}

/// Total energy density `½ρ|u|² + ρ^γ/(γ−1)`.
#[inline]
pub fn energy_density<const D: usize>(s: &PrimitiveState<D>, g: GasParams) -> f64 {
    0.5 * s.rho * dot(&s.vel, &s.vel) + s.rho.powf(g.gamma) / (g.gamma - 1.0)
}

/// Energy flux `(½ρ|u|² + γρ^γ/(γ−1))·u`.
#[inline]
pub fn energy_flux<const D: usize>(s: &PrimitiveState<D>, g: GasParams) -> [f64; D] {
    let coeff = 0.5 * s.rho * dot(&s.vel, &s.vel) + g.enthalpy_coeff() * s.rho.powf(g.gamma);
    s.vel.map(|v| coeff * v)
}

/// Bregman divergence of `r ↦ r^γ/(γ−1)` between `rho` and the base point `big_r`.
pub fn relative_potential(big_r: f64, rho: f64, g: GasParams) -> Result<f64> {
    check_density("strong density", big_r)?;
    check_density("weak density", rho)?;
    Ok(relative_potential_unchecked(big_r, rho, g))
}

#[inline]
pub(crate) fn relative_potential_unchecked(big_r: f64, rho: f64, g: GasParams) -> f64 {
    let gm1 = g.gamma - 1.0;
    let r_gm1 = big_r.powf(gm1);
    big_r * r_gm1 - g.enthalpy_coeff() * rho * r_gm1 + rho.powf(g.gamma) / gm1
}

/// Relative energy density `A(R,U; ρ,u)`.
#[inline]
pub fn rel_energy_density<const D: usize>(
    strong: &PrimitiveState<D>,
    weak: &PrimitiveState<D>,
    g: GasParams,
) -> f64 {
    let mut w2 = 0.0;
    for k in 0..D {
        let d = weak.vel[k] - strong.vel[k];
        w2 += d * d;
    }
    0.5 * weak.rho * w2 + relative_potential_unchecked(strong.rho, weak.rho, g)
}

/// Relative energy flux `B(R,U; ρ,u)`.
#[inline]
pub fn rel_energy_flux<const D: usize>(
    strong: &PrimitiveState<D>,
    weak: &PrimitiveState<D>,
    g: GasParams,
) -> [f64; D] {
    let gm1 = g.gamma - 1.0;
    let mut w2 = 0.0;
    for k in 0..D {
        let d = weak.vel[k] - strong.vel[k];
        w2 += d * d;
    }
    let kin = 0.5 * weak.rho * w2;
    let (r, rho) = (strong.rho, weak.rho);
    let enthalpy_gap = g.enthalpy_coeff() * (r.powf(gm1) - rho.powf(gm1)) * rho;
    let pressure_gap = r.powf(g.gamma) - rho.powf(g.gamma);
    let mut out = [0.0; D];
    for k in 0..D {
        out[k] = (kin - enthalpy_gap) * weak.vel[k] + pressure_gap * strong.vel[k];
    }
    out
}

/// Density and velocity bounds `r_lo ≤ ρ, R ≤ r_hi`, `|u|, |U| ≤ v_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateBox {
    r_lo: f64,
    r_hi: f64,
    v_max: f64,
    gas: GasParams,
}

impl StateBox {
    pub fn new(r_lo: f64, r_hi: f64, v_max: f64, gas: GasParams) -> Result<Self> {
        if !(r_lo.is_finite() && r_hi.is_finite() && v_max.is_finite()) {
            return Err(LabError::Domain("state box bounds must be finite".into()));
        }
        if !(0.0 <= r_lo && r_lo < r_hi) {
            return Err(LabError::Domain(format!(
                "state box needs 0 <= r_lo < r_hi, got r_lo={r_lo}, r_hi={r_hi}"
            )));
        }
        if v_max <= 0.0 {
            return Err(LabError::Domain(format!("state box needs v_max > 0, got {v_max}")));
        }
        if gas.gamma() < 2.0 && r_lo <= 0.0 {
            return Err(LabError::Hypothesis(format!(
                "vacuum (r_lo = 0) is only admissible for gamma >= 2, got gamma={}",
                gas.gamma()
            )));
        }
        Ok(Self {
            r_lo,
            r_hi,
            v_max,
            gas,
        })
    }

    /// Smallest valid box containing the observed ranges. A degenerate
    /// density range or a zero velocity bound is widened slightly.
    pub fn enclosing(rho_min: f64, rho_max: f64, speed_max: f64, gas: GasParams) -> Result<Self> {
        let r_lo = rho_min.max(0.0);
        let r_hi = if rho_max > r_lo {
            rho_max
        } else {
            r_lo + 1e-9 * r_lo.max(1.0)
        };
        let v_max = if speed_max > 0.0 { speed_max } else { 1e-12 };
        Self::new(r_lo, r_hi, v_max, gas)
    }

    pub fn r_lo(&self) -> f64 {
        self.r_lo
    }
    pub fn r_hi(&self) -> f64 {
        self.r_hi
    }
    pub fn v_max(&self) -> f64 {
        self.v_max
    }
    pub fn gas(&self) -> GasParams {
        self.gas
    }

    pub fn contains<const D: usize>(&self, s: &PrimitiveState<D>) -> bool {
        s.rho >= self.r_lo && s.rho <= self.r_hi && s.speed() <= self.v_max
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
        .collect()
}

/// Maximum of `|B|/A` over a tensor grid of the box, without safety factor.
///
/// Densities `ρ, R` take `grid_n` values each on `[r_lo, r_hi]`; velocity
/// magnitudes take `grid_n` values each on `[0, v_max]` and are combined
/// collinearly and anti-collinearly. Only points with `A > A_FLOOR` count.
pub fn lemma_ratio_sup_grid(b: &StateBox, grid_n: usize) -> Result<f64> {
    if grid_n < 2 {
        return Err(LabError::Domain(format!("grid_n must be >= 2, got {grid_n}")));
    }
    let g = b.gas;
    let gm1 = g.gamma - 1.0;
    let k = g.enthalpy_coeff();
    let dens = linspace(b.r_lo, b.r_hi, grid_n);
    let pow_g: Vec<f64> = dens.iter().map(|r| r.powf(g.gamma)).collect();
    let pow_gm1: Vec<f64> = dens.iter().map(|r| r.powf(gm1)).collect();
    let speeds = linspace(0.0, b.v_max, grid_n);

    let sup = (0..grid_n)
        .into_par_iter()
        .map(|ir| {
            let mut best = 0.0_f64;
            for (ip, &rho) in dens.iter().enumerate() {
                let potential = pow_g[ir] - k * rho * pow_gm1[ir] + pow_g[ip] / gm1;
                let enthalpy_gap = k * (pow_gm1[ir] - pow_gm1[ip]) * rho;
                let pressure_gap = pow_g[ir] - pow_g[ip];
                for &u in &speeds {
                    for &s in &speeds {
                        for big_u in [s, -s] {
                            let w = u - big_u;
                            let kin = 0.5 * rho * w * w;
                            let a = kin + potential;
                            if a > A_FLOOR {
                                let flux = (kin - enthalpy_gap) * u + pressure_gap * big_u;
                                best = best.max(flux.abs() / a);
                            }
                        }
                    }
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(sup)
}

/// Grid realization of the flux-domination constant: [`lemma_ratio_sup_grid`]
/// times [`GRID_SAFETY_FACTOR`].
///
/// `dim` is the spatial dimension of the velocities. Collinear configurations
/// embed the search in any dimension, so the value does not depend on it.
pub fn lemma_constant_grid(b: &StateBox, dim: usize, grid_n: usize) -> Result<f64> {
    if dim == 0 {
        return Err(LabError::Domain("dimension must be >= 1".into()));
    }
    Ok(GRID_SAFETY_FACTOR * lemma_ratio_sup_grid(b, grid_n)?)
}

/// Constant `c` in `relative_potential(R, ρ) ≥ c·(R−ρ)²` on the box: half the
/// minimum of the second derivative of `r^γ/(γ−1)`.
pub fn potential_convexity_constant(b: &StateBox) -> Result<f64> {
    if b.r_lo <= 0.0 {
        return Err(LabError::UnsupportedRegime(
            "quadratic lower bound requires r_lo > 0; use the grid constant".into(),
        ));
    }
    let ex = b.gas.gamma - 2.0;
    Ok(0.5 * b.gas.gamma * b.r_lo.powf(ex).min(b.r_hi.powf(ex)))
}

/// Flux-domination constant from the convexity chain:
/// `C = 2v + γ/(γ−1)·max(1, r̄K/(2c))` with `K = (γ−1)²M²`,
/// `M = max(r̲^{γ−2}, r̄^{γ−2})`.
pub fn lemma_constant_analytic(b: &StateBox) -> Result<f64> {
    let c = potential_convexity_constant(b)?;
    let g = b.gas.gamma;
    let ex = g - 2.0;
    let m = b.r_lo.powf(ex).max(b.r_hi.powf(ex));
    let lip2 = (g - 1.0).powi(2) * m * m;
    Ok(2.0 * b.v_max + b.gas.enthalpy_coeff() * (b.r_hi * lip2 / (2.0 * c)).max(1.0))
}
