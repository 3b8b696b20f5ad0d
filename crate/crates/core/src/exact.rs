//! Strong-solution providers for the 1-D compressible experiments and a
//! catalog of closed-form 2-D incompressible Euler solutions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};
use crate::gas::PrimitiveState;
use crate::solver::{simulate, Boundary, Field, Grid1D, SolverConfig, Trajectory};

/// A smooth solution `(R, U)` of the 1-D isentropic system that can be
/// evaluated anywhere in its domain.
pub trait StrongSolution1D: Send + Sync {
    fn kind(&self) -> &'static str;

    fn state(&self, x: f64, t: f64) -> PrimitiveState<1>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantStrong {
    rho: f64,
    u: f64,
}

pub fn constant_strong(rho: f64, u: f64) -> Result<ConstantStrong> {
    if !(rho.is_finite() && rho >= 0.0 && u.is_finite()) {
        return Err(LabError::Domain(format!(
            "constant state needs finite rho >= 0 and finite u, got ({rho}, {u})"
        )));
    }
    let u = if rho == 0.0 { 0.0 } else { u };
    Ok(ConstantStrong { rho, u })
}

impl StrongSolution1D for ConstantStrong {
    fn kind(&self) -> &'static str {
        "constant"
    }

    fn state(&self, _x: f64, _t: f64) -> PrimitiveState<1> {
        PrimitiveState::scalar(self.rho, self.u)
    }
}

/// Ratio of the gradient monitor to its initial value above which a
/// reference run no longer counts as smooth.
pub const SMOOTHNESS_BREACH_FACTOR: f64 = 5.0;

/// Fine-grid run standing in for a C¹ solution before shock formation.
#[derive(Debug, Clone)]
pub struct ReferenceStrong {
    traj: Trajectory,
    refine: usize,
    /// Per snapshot: `max_i |Δu/Δx| + |Δρ/Δx|`.
    monitor: Vec<f64>,
    smooth: bool,
    vacuum_eps: f64,
}

fn gradient_monitor(f: &Field, eps: f64) -> f64 {
    let dx = f.grid().dx();
    let cells = f.cells();
    let n = cells.len();
    let pairs = match f.grid().bc() {
        Boundary::Periodic => n,
        Boundary::CopyOut => n - 1,
    };
    (0..pairs)
        .map(|i| {
            let a = cells[i];
            let b = cells[(i + 1) % n];
            ((b.velocity(eps) - a.velocity(eps)).abs() + (b.rho - a.rho).abs()) / dx
        })
        .fold(0.0, f64::max)
}

/// Runs the solver on `grid` refined `refine` times with initial data
/// `init(x) = (ρ, u)` sampled at the fine cell centers.
pub fn reference_strong(
    init: &dyn Fn(f64) -> (f64, f64),
    grid: &Grid1D,
    refine: usize,
    cfg: &SolverConfig,
) -> Result<ReferenceStrong> {
    if refine < 8 {
        return Err(LabError::Config(format!(
            "reference refinement must be >= 8, got {refine}"
        )));
    }
    let fine = grid.refined(refine)?;
    let start = Field::from_fn(fine, 0.0, init)?;
    let traj = simulate(&start, cfg)?;
    let eps = cfg.vacuum_eps;
    let monitor: Vec<f64> = traj.snapshots().iter().map(|s| gradient_monitor(s, eps)).collect();
    let limit = SMOOTHNESS_BREACH_FACTOR * monitor[0] + 1e-12;
    let smooth = monitor.iter().all(|&m| m <= limit);
    Ok(ReferenceStrong {
        traj,
        refine,
        monitor,
        smooth,
        vacuum_eps: eps,
    })
}

impl ReferenceStrong {
    pub fn trajectory(&self) -> &Trajectory {
        &self.traj
    }

    pub fn refine(&self) -> usize {
        self.refine
    }

    pub fn monitor(&self) -> &[f64] {
        &self.monitor
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    pub fn ensure_smooth(&self) -> Result<()> {
        if self.smooth {
            return Ok(());
        }
        let m0 = self.monitor[0];
        let (k, peak) = self
            .monitor
            .iter()
            .copied()
            .enumerate()
            .fold((0, 0.0), |acc, (k, m)| if m > acc.1 { (k, m) } else { acc });
        Err(LabError::NotSmooth(format!(
            "gradient monitor reached {peak:.4e} at t={} (initial {m0:.4e}); shorten t_end",
            self.traj.snapshots()[k].time()
        )))
    }

    fn primitive_at(&self, f: &Field, x: f64) -> (f64, f64) {
        let grid = f.grid();
        let n = grid.n_cells();
        let dx = grid.dx();
        let cells = f.cells();
        let eps = self.vacuum_eps;
        let s = (x - grid.x_min()) / dx - 0.5;
        let (i0, frac) = {
            let fl = s.floor();
            (fl as i64, s - fl)
        };
        let fetch = |i: i64| -> (f64, f64) {
            let idx = match grid.bc() {
                Boundary::Periodic => i.rem_euclid(n as i64) as usize,
                Boundary::CopyOut => i.clamp(0, n as i64 - 1) as usize,
            };
            let c = cells[idx];
            (c.rho, c.velocity(eps))
        };
        let (ra, ua) = fetch(i0);
        let (rb, ub) = fetch(i0 + 1);
        (ra + frac * (rb - ra), ua + frac * (ub - ua))
    }
}

impl StrongSolution1D for ReferenceStrong {
    fn kind(&self) -> &'static str {
        "reference"
    }

    /// Piecewise-linear interpolation in `x` between fine cell centers and in
    /// `t` between snapshots; times outside the run are clamped.
    fn state(&self, x: f64, t: f64) -> PrimitiveState<1> {
        let snaps = self.traj.snapshots();
        let k = snaps.partition_point(|s| s.time() <= t);
        let (rho, u) = if k == 0 {
            self.primitive_at(&snaps[0], x)
        } else if k == snaps.len() {
            self.primitive_at(&snaps[k - 1], x)
        } else {
            let (a, b) = (&snaps[k - 1], &snaps[k]);
            let w = (t - a.time()) / (b.time() - a.time());
            let (ra, ua) = self.primitive_at(a, x);
            if w == 0.0 {
                (ra, ua)
            } else {
                let (rb, ub) = self.primitive_at(b, x);
                (ra + w * (rb - ra), ua + w * (ub - ua))
            }
        };
        PrimitiveState::scalar(rho.max(0.0), u)
    }
}

/// Shear profile `f(y) = slope·y + bend·sgn(y)·(|y| − strip)₊²`; linear on the
/// strip `|y| ≤ strip`, C¹ everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearProfile {
    pub slope: f64,
    pub bend: f64,
    pub strip: f64,
}

impl ShearProfile {
    pub fn linear(slope: f64) -> Self {
        Self {
            slope,
            bend: 0.0,
            strip: 0.0,
        }
    }

    pub fn value(&self, y: f64) -> f64 {
        let e = (y.abs() - self.strip).max(0.0);
        self.slope * y + self.bend * y.signum() * e * e
    }

    pub fn deriv(&self, y: f64) -> f64 {
        let e = (y.abs() - self.strip).max(0.0);
        self.slope + 2.0 * self.bend * e
    }
}

/// Closed-form solutions of the 2-D incompressible Euler equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IncompressibleSolution2D {
    Rest,
    /// `U = (f(y), 0)`, `P = 0`.
    Shear(ShearProfile),
    /// Steady vortex `v_θ(r) = r(1−r²)²` for `r ≤ 1` around `center`.
    Vortex { center: [f64; 2] },
    /// The vortex advected by the uniform velocity `velocity`.
    TranslatingVortex {
        center: [f64; 2],
        velocity: [f64; 2],
    },
    /// `U ≡ velocity`, `P = 0`.
    Uniform { velocity: [f64; 2] },
}

/// Vortex pressure `∫₀^r v_θ(s)²/s ds = (1 − (1−r²)⁵)/10`, constant for `r ≥ 1`.
pub fn vortex_pressure(r: f64) -> f64 {
    if r >= 1.0 {
        0.1
    } else {
        let a = 1.0 - r * r;
        (1.0 - a.powi(5)) / 10.0
    }
}

/// Azimuthal vortex speed `v_θ(r)`.
pub fn vortex_speed(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        let a = 1.0 - r * r;
        r * a * a
    }
}

fn vortex_at(d: [f64; 2]) -> ([f64; 2], f64, [[f64; 2]; 2]) {
    let r2 = d[0] * d[0] + d[1] * d[1];
    if r2 >= 1.0 {
        return ([0.0, 0.0], 0.1, [[0.0; 2]; 2]);
    }
    let a = 1.0 - r2;
    let omega = a * a;
    let (x, y) = (d[0], d[1]);
    let vel = [-y * omega, x * omega];
    let jac = [
        [4.0 * a * x * y, -omega + 4.0 * a * y * y],
        [omega - 4.0 * a * x * x, -4.0 * a * x * y],
    ];
    (vel, vortex_pressure(r2.sqrt()), jac)
}

impl IncompressibleSolution2D {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Rest => "rest",
            Self::Shear(_) => "shear",
            Self::Vortex { .. } => "vortex",
            Self::TranslatingVortex { .. } => "translating_vortex",
            Self::Uniform { .. } => "uniform",
        }
    }

    /// Velocity, pressure and velocity Jacobian `J[i][j] = ∂_j U_i`.
    pub fn eval_full(&self, x: &[f64; 2], t: f64) -> ([f64; 2], f64, [[f64; 2]; 2]) {
        match *self {
            Self::Rest => ([0.0, 0.0], 0.0, [[0.0; 2]; 2]),
            Self::Uniform { velocity } => (velocity, 0.0, [[0.0; 2]; 2]),
            Self::Shear(p) => ([p.value(x[1]), 0.0], 0.0, [[0.0, p.deriv(x[1])], [0.0, 0.0]]),
            Self::Vortex { center } => vortex_at([x[0] - center[0], x[1] - center[1]]),
            Self::TranslatingVortex { center, velocity } => {
                let d = [
                    x[0] - center[0] - velocity[0] * t,
                    x[1] - center[1] - velocity[1] * t,
                ];
                let (v, p, j) = vortex_at(d);
                ([v[0] + velocity[0], v[1] + velocity[1]], p, j)
            }
        }
    }

    pub fn eval(&self, x: &[f64; 2], t: f64) -> ([f64; 2], f64) {
        let (u, p, _) = self.eval_full(x, t);
        (u, p)
    }

    /// Operator norm of the symmetric velocity gradient.
    pub fn sym_grad_norm(&self, x: &[f64; 2], t: f64) -> f64 {
        let (_, _, j) = self.eval_full(x, t);
        let s11 = j[0][0];
        let s22 = j[1][1];
        let s12 = 0.5 * (j[0][1] + j[1][0]);
        let mean = 0.5 * (s11 + s22);
        let rad = (0.25 * (s11 - s22).powi(2) + s12 * s12).sqrt();
        mean.abs() + rad
    }

    /// Center of the sampling window used by [`residual_check`].
    fn sample_center(&self) -> [f64; 2] {
        match *self {
            Self::Vortex { center } | Self::TranslatingVortex { center, .. } => center,
            _ => [0.0, 0.0],
        }
    }
}

/// Step of the centered differences in [`residual_check`].
pub const RESIDUAL_FD_STEP: f64 = 1e-4;

/// Max over `samples` random points `(x, t) ∈ (c + [−2.5, 2.5]²) × [0, 1]` of
/// the momentum residual `|∂tU + (U·∇)U + ∇P|` and of `|div U|`, with
/// centered differences.
pub fn residual_check(s: &IncompressibleSolution2D, samples: usize, seed: u64) -> f64 {
    let h = RESIDUAL_FD_STEP;
    let c = s.sample_center();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let x = [c[0] + rng.gen_range(-2.5..2.5), c[1] + rng.gen_range(-2.5..2.5)];
        let t = rng.gen_range(0.0..1.0);
        let (u, _) = s.eval(&x, t);
        let (up, _) = s.eval(&x, t + h);
        let (um, _) = s.eval(&x, t - h);
        let mut du = [[0.0; 2]; 2];
        let mut dp = [0.0; 2];
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let (a, pa) = s.eval(&xp, t);
            let (b, pb) = s.eval(&xm, t);
            for i in 0..2 {
                du[i][k] = (a[i] - b[i]) / (2.0 * h);
            }
            dp[k] = (pa - pb) / (2.0 * h);
        }
        let mut res2 = 0.0;
        for i in 0..2 {
            let r = (up[i] - um[i]) / (2.0 * h) + u[0] * du[i][0] + u[1] * du[i][1] + dp[i];
            res2 += r * r;
        }
        let div = du[0][0] + du[1][1];
        worst = worst.max(res2.sqrt()).max(div.abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::{rel_energy_density, GasParams};
    use crate::solver::physical_flux;
    use crate::solver::Conserved;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_strong_examples() {
        let c = constant_strong(1.0, 0.0).unwrap();
        assert_eq!(c.state(3.7, 12.0), PrimitiveState::scalar(1.0, 0.0));
        let g = GasParams::new(2.0).unwrap();
        let s = c.state(0.0, 0.0);
        assert_eq!(rel_energy_density(&s, &s, g), 0.0);
        let c = constant_strong(2.0, 0.5).unwrap();
        let s = c.state(-1.0, 0.3);
        let (m, p) = physical_flux(&Conserved::from_primitive(s.rho, s.u()), g);
        assert_eq!((m, p), (1.0, 2.0 * 0.25 + 4.0));
        assert!(constant_strong(-1.0, 0.0).is_err());
    }

    #[test]
    fn reference_of_constant_matches_constant() {
        let grid = Grid1D::new(0.0, 1.0, 8, Boundary::Periodic).unwrap();
        let cfg = SolverConfig::new(0.45, GasParams::new(2.0).unwrap(), 0.2, 0.1).unwrap();
        let r = reference_strong(&|_| (1.3, 0.2), &grid, 8, &cfg).unwrap();
        assert!(r.is_smooth());
        let c = constant_strong(1.3, 0.2).unwrap();
        for &(x, t) in &[(0.1, 0.0), (0.77, 0.13), (0.5, 0.2)] {
            let a = r.state(x, t);
            let b = c.state(x, t);
            assert_abs_diff_eq!(a.rho, b.rho, epsilon = 1e-14);
            assert_abs_diff_eq!(a.u(), b.u(), epsilon = 1e-14);
        }
        assert!(reference_strong(&|_| (1.0, 0.0), &grid, 4, &cfg).is_err());
    }

    #[test]
    fn vortex_pressure_matches_quadrature() {
        // composite Simpson on v_θ(s)²/s
        let n = 2000;
        let h = 1.0 / n as f64;
        let f = |s: f64| if s == 0.0 { 0.0 } else { vortex_speed(s).powi(2) / s };
        let mut acc = f(0.0) + f(1.0);
        for i in 1..n {
            acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        assert_abs_diff_eq!(acc * h / 3.0, vortex_pressure(1.0), epsilon = 1e-10);
        assert_eq!(vortex_pressure(1.5), vortex_pressure(1.0));
    }

    #[test]
    fn catalog_examples() {
        let rest = IncompressibleSolution2D::Rest;
        assert_eq!(rest.eval(&[3.0, -1.0], 0.4), ([0.0, 0.0], 0.0));
        let shear = IncompressibleSolution2D::Shear(ShearProfile::linear(1.0));
        assert_eq!(shear.eval(&[0.0, 2.0], 0.0), ([2.0, 0.0], 0.0));
        let vortex = IncompressibleSolution2D::Vortex { center: [0.0, 0.0] };
        assert_eq!(vortex.eval(&[1.5, 0.0], 0.0), ([0.0, 0.0], 0.1));
        let (u, _) = vortex.eval(&[0.5, 0.0], 0.0);
        assert_abs_diff_eq!(u[1], vortex_speed(0.5), epsilon = 1e-15);
    }

    #[test]
    fn catalog_members_are_exact() {
        let members = [
            IncompressibleSolution2D::Rest,
            IncompressibleSolution2D::Shear(ShearProfile::linear(1.0)),
            IncompressibleSolution2D::Shear(ShearProfile {
                slope: 0.5,
                bend: 0.8,
                strip: 1.0,
            }),
            IncompressibleSolution2D::Vortex { center: [0.2, -0.1] },
            IncompressibleSolution2D::TranslatingVortex {
                center: [0.0, 0.0],
                velocity: [1.0, 0.0],
            },
        ];
        for m in members {
            let r = residual_check(&m, 2000, 7);
            assert!(r <= 1e-6, "{} residual {r}", m.name());
        }
        assert_eq!(residual_check(&IncompressibleSolution2D::Rest, 10, 0), 0.0);
    }

    #[test]
    fn sym_grad_norm_of_vortex() {
        // strain magnitude of a rotational flow is r|Ω'(r)|/2 = 2r²(1−r²)
        let v = IncompressibleSolution2D::Vortex { center: [0.0, 0.0] };
        let r: f64 = 0.6;
        let x = [r * 0.3f64.cos(), r * 0.3f64.sin()];
        assert_abs_diff_eq!(v.sym_grad_norm(&x, 0.0), 2.0 * r * r * (1.0 - r * r), epsilon = 1e-14);
        assert_eq!(v.sym_grad_norm(&[2.0, 0.0], 0.0), 0.0);
    }

    #[test]
    fn vortex_vanishes_outside_support() {
        let v = IncompressibleSolution2D::Vortex { center: [0.0, 0.0] };
        for k in 0..64 {
            let a = k as f64 * 0.1;
            let r = 1.0 + 0.05 * k as f64;
            assert_eq!(v.eval(&[r * a.cos(), r * a.sin()], 0.0).0, [0.0, 0.0]);
        }
    }

    #[test]
    fn shears_agreeing_on_strip_coincide_there() {
        let a = ShearProfile::linear(0.5);
        let b = ShearProfile {
            slope: 0.5,
            bend: 2.0,
            strip: 1.0,
        };
        let sa = IncompressibleSolution2D::Shear(a);
        let sb = IncompressibleSolution2D::Shear(b);
        for k in 0..=40 {
            let y = -1.0 + 0.05 * k as f64;
            for t in [0.0, 0.5, 3.0] {
                assert_eq!(sa.eval(&[0.3, y], t), sb.eval(&[0.3, y], t));
            }
        }
        assert!(sa.eval(&[0.0, 1.5], 0.0) != sb.eval(&[0.0, 1.5], 0.0));
    }
}
