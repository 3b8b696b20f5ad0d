//! Discrete evaluation of the localized relative energy and of the
//! inequalities built on it.
//!
//! Space integrals use the midpoint rule on the weak grid, time integrals the
//! trapezoid rule on snapshot times; cutoff derivatives are analytic.

use crate::cutoff::TransportedCutoff;
use crate::error::{LabError, Result};
use crate::exact::{IncompressibleSolution2D, StrongSolution1D};
use crate::gas::{rel_energy_density, rel_energy_flux, GasParams, PrimitiveState, StateBox};
use crate::solver::{Field, Trajectory};

/// Tolerance on `|ρ−R| + |ρu−RU|` for "matched initial data".
pub const MATCH_TOL: f64 = 1e-10;

/// Default Gronwall factor in front of `∫‖U‖_{C¹} E dt`.
pub const DEFAULT_GRONWALL_FACTOR: f64 = 2.0;

fn check_coverage(f: &Field, c: &TransportedCutoff<1>, t: f64) -> Result<()> {
    let radius = c.support_radius(t);
    if radius <= 0.0 {
        return Ok(());
    }
    let x0 = c.bump().center()[0];
    let (lo, hi) = (x0 - radius, x0 + radius);
    let grid = f.grid();
    if lo < grid.x_min() || hi > grid.x_max() {
        return Err(LabError::DomainCoverage {
            lo,
            hi,
            x_min: grid.x_min(),
            x_max: grid.x_max(),
        });
    }
    Ok(())
}

fn weak_state(f: &Field, i: usize, eps: f64) -> PrimitiveState<1> {
    f.cells()[i].primitive(eps)
}

/// `E^φ_rel(t) = Σ_i Δx·φ(x_i, t)·A(strong(x_i, t); weak_i)` at `t = weak.time()`.
pub fn localized_relative_energy(
    weak: &Field,
    strong: &dyn StrongSolution1D,
    c: &TransportedCutoff<1>,
    g: GasParams,
    vacuum_eps: f64,
) -> Result<f64> {
    let t = weak.time();
    check_coverage(weak, c, t)?;
    let grid = weak.grid();
    let dx = grid.dx();
    let mut sum = 0.0;
    for i in 0..grid.n_cells() {
        let x = grid.center(i);
        let phi = c.eval(&[x], t);
        if phi > 0.0 {
            let a = rel_energy_density(&strong.state(x, t), &weak_state(weak, i, vacuum_eps), g);
            sum += phi * a;
        }
    }
    Ok(sum * dx)
}

/// `max |U| + |∂xU| + |R| + |∂xR|` over cell centers inside `supp φ(·,t)`,
/// derivatives by centered differences with step `Δx`.
pub fn strong_c1_norm(
    grid: &crate::solver::Grid1D,
    strong: &dyn StrongSolution1D,
    c: &TransportedCutoff<1>,
    t: f64,
) -> f64 {
    let h = grid.dx();
    let mut best = 0.0_f64;
    for i in 0..grid.n_cells() {
        let x = grid.center(i);
        if c.eval(&[x], t) <= 0.0 {
            continue;
        }
        let s = strong.state(x, t);
        let sp = strong.state(x + h, t);
        let sm = strong.state(x - h, t);
        let du = (sp.u() - sm.u()) / (2.0 * h);
        let dr = (sp.rho - sm.rho) / (2.0 * h);
        best = best.max(s.u().abs() + du.abs() + s.rho.abs() + dr.abs());
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallRow {
    pub tau: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub c1_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GronwallReport {
    pub rows: Vec<GronwallRow>,
    pub factor: f64,
    /// Time integral of the cutoff flux terms `∂tφ·A + ∂xφ·B`, per snapshot.
    pub flux_part: Vec<f64>,
    /// `∫‖U‖_{C¹} E dt` per snapshot, without the factor.
    pub gronwall_part: Vec<f64>,
}

impl GronwallReport {
    pub fn max_lhs(&self) -> f64 {
        self.rows.iter().map(|r| r.lhs).fold(0.0, f64::max)
    }

    /// Smallest residual over snapshots.
    pub fn worst_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min)
    }

    /// Smallest Gronwall factor keeping every residual nonnegative, ignoring
    /// deficits below `1e-12·max lhs`; infinite when the flux part alone falls
    /// short where the Gronwall part vanishes.
    pub fn min_sufficient_factor(&self) -> f64 {
        let floor = 1e-12 * self.max_lhs();
        let mut need = 0.0_f64;
        for (k, row) in self.rows.iter().enumerate() {
            let deficit = row.lhs - self.flux_part[k];
            if deficit > floor {
                let gw = self.gronwall_part[k];
                if gw > 0.0 {
                    need = need.max(deficit / gw);
                } else {
                    return f64::INFINITY;
                }
            }
        }
        need
    }
}

/// Checks that weak and strong data agree on `supp φ(·,0)`.
pub fn check_matched_initial_data(
    weak0: &Field,
    strong: &dyn StrongSolution1D,
    c: &TransportedCutoff<1>,
) -> Result<()> {
    let grid = weak0.grid();
    let t = weak0.time();
    for i in 0..grid.n_cells() {
        let x = grid.center(i);
        if c.eval(&[x], t) <= 0.0 {
            continue;
        }
        let w = weak0.cells()[i];
        let s = strong.state(x, t);
        let gap = (w.rho - s.rho).abs() + (w.mom - s.rho * s.u()).abs();
        if gap > MATCH_TOL {
            return Err(LabError::Hypothesis(format!(
                "initial data differ by {gap:.3e} at x={x} inside the cutoff support"
            )));
        }
    }
    Ok(())
}

/// Both sides of the localized relative energy inequality at each snapshot:
/// `lhs = E^φ_rel(τ)`, `rhs = ∫₀^τ Σ Δx (∂tφ·A + ∂xφ·B) dt + factor·∫₀^τ ‖U‖_{C¹} E^φ_rel dt`.
pub fn gronwall_evaluate(
    weak: &Trajectory,
    strong: &dyn StrongSolution1D,
    c: &TransportedCutoff<1>,
    g: GasParams,
    factor: f64,
) -> Result<GronwallReport> {
    let eps = weak.config().vacuum_eps;
    let snaps = weak.snapshots();
    check_matched_initial_data(&snaps[0], strong, c)?;
    let grid = *weak.grid();
    let dx = grid.dx();

    let mut energy = Vec::with_capacity(snaps.len());
    let mut flux_density = Vec::with_capacity(snaps.len());
    let mut c1 = Vec::with_capacity(snaps.len());
    for f in snaps {
        let t = f.time();
        check_coverage(f, c, t)?;
        let mut e = 0.0;
        let mut q = 0.0;
        for i in 0..grid.n_cells() {
            let x = [grid.center(i)];
            let phi = c.eval(&x, t);
            let dphi_t = c.dt(&x, t);
            let dphi_x = c.grad(&x, t)[0];
            if phi == 0.0 && dphi_t == 0.0 && dphi_x == 0.0 {
                continue;
            }
            let s = strong.state(x[0], t);
            let w = weak_state(f, i, eps);
            let a = rel_energy_density(&s, &w, g);
            let b = rel_energy_flux(&s, &w, g)[0];
            e += phi * a;
            q += dphi_t * a + dphi_x * b;
        }
        energy.push(e * dx);
        flux_density.push(q * dx);
        c1.push(strong_c1_norm(&grid, strong, c, t));
    }

    let mut rows = Vec::with_capacity(snaps.len());
    let mut flux_part = Vec::with_capacity(snaps.len());
    let mut gronwall_part = Vec::with_capacity(snaps.len());
    let (mut flux_acc, mut gw_acc) = (0.0, 0.0);
    for k in 0..snaps.len() {
        if k > 0 {
            let dt = snaps[k].time() - snaps[k - 1].time();
            flux_acc += 0.5 * dt * (flux_density[k] + flux_density[k - 1]);
            gw_acc += 0.5 * dt * (c1[k] * energy[k] + c1[k - 1] * energy[k - 1]);
        }
        let rhs = flux_acc + factor * gw_acc;
        rows.push(GronwallRow {
            tau: snaps[k].time(),
            lhs: energy[k],
            rhs,
            residual: rhs - energy[k],
            c1_norm: c1[k],
        });
        flux_part.push(flux_acc);
        gronwall_part.push(gw_acc);
    }
    Ok(GronwallReport {
        rows,
        factor,
        flux_part,
        gronwall_part,
    })
}

/// Number of trapezoid intervals in time for [`incompressible_gronwall`].
pub const INCOMPRESSIBLE_TIME_STEPS: usize = 64;

/// `(lhs, rhs)` of the incompressible localized energy inequality at `tau`,
/// with `quad_n²` midpoint nodes over the bounding square of `supp φ(·,0)`.
pub fn incompressible_gronwall(
    weakish: &IncompressibleSolution2D,
    strong: &IncompressibleSolution2D,
    c: &TransportedCutoff<2>,
    tau: f64,
    quad_n: usize,
) -> Result<(f64, f64)> {
    if quad_n < 2 {
        return Err(LabError::Domain(format!("quad_n must be >= 2, got {quad_n}")));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(LabError::Domain(format!("tau must be >= 0, got {tau}")));
    }
    let x0 = c.bump().center();
    let eta = c.bump().eta();
    let h = 2.0 * eta / quad_n as f64;
    let area = h * h;
    let nodes: Vec<[f64; 2]> = (0..quad_n)
        .flat_map(|i| {
            (0..quad_n).map(move |j| {
                [
                    x0[0] - eta + (i as f64 + 0.5) * h,
                    x0[1] - eta + (j as f64 + 0.5) * h,
                ]
            })
        })
        .collect();

    for x in &nodes {
        if c.eval(x, 0.0) > 0.0 {
            let (u, _) = weakish.eval(x, 0.0);
            let (v, _) = strong.eval(x, 0.0);
            let gap = ((u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2)).sqrt();
            if gap > MATCH_TOL {
                return Err(LabError::Hypothesis(format!(
                    "velocities differ by {gap:.3e} at {x:?} inside supp φ(·,0)"
                )));
            }
        }
    }

    // (E(t), flux integrand, ‖∇_sym U‖ over the support)
    let terms = |t: f64| -> (f64, f64, f64) {
        let mut e = 0.0;
        let mut q = 0.0;
        let mut sym = 0.0_f64;
        for x in &nodes {
            let phi = c.eval(x, t);
            let dphi_t = c.dt(x, t);
            let grad = c.grad(x, t);
            if phi == 0.0 && dphi_t == 0.0 && grad == [0.0, 0.0] {
                continue;
            }
            let (u, p) = weakish.eval(x, t);
            let (v, pv) = strong.eval(x, t);
            let d = [v[0] - u[0], v[1] - u[1]];
            let d2 = d[0] * d[0] + d[1] * d[1];
            e += 0.5 * phi * d2;
            let flux = [
                0.5 * d2 * u[0] + (pv - p) * d[0],
                0.5 * d2 * u[1] + (pv - p) * d[1],
            ];
            q += 0.5 * dphi_t * d2 + grad[0] * flux[0] + grad[1] * flux[1];
            if phi > 0.0 {
                sym = sym.max(strong.sym_grad_norm(x, t));
            }
        }
        (e * area, q * area, sym)
    };

    let lhs = terms(tau).0;
    let nt = INCOMPRESSIBLE_TIME_STEPS;
    let dt = tau / nt as f64;
    let mut flux_int = 0.0;
    let mut gw_int = 0.0;
    if tau > 0.0 {
        for k in 0..=nt {
            let (e, q, s) = terms(k as f64 * dt);
            let w = if k == 0 || k == nt { 0.5 } else { 1.0 };
            flux_int += w * dt * q;
            gw_int += w * dt * s * e;
        }
    }
    Ok((lhs, flux_int + 2.0 * gw_int))
}

/// Largest `|x_i|` over cells with `|ρ_i − ρ̄| + |m_i − m̄| > threshold`; zero if none.
pub fn support_radius(f: &Field, background: (f64, f64), threshold: f64) -> f64 {
    let grid = f.grid();
    f.cells()
        .iter()
        .enumerate()
        .filter(|(_, c)| (c.rho - background.0).abs() + (c.mom - background.1).abs() > threshold)
        .map(|(i, _)| grid.center(i).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedFit {
    pub speed: f64,
    pub intercept: f64,
    pub times: Vec<f64>,
    pub radii: Vec<f64>,
    /// False if the radius ever drops by more than one cell width.
    pub monotone: bool,
}

/// Least-squares line through `(t, r)` pairs.
pub fn fit_line(times: &[f64], values: &[f64]) -> Result<(f64, f64)> {
    if times.len() < 3 || times.len() != values.len() {
        return Err(LabError::InsufficientData(format!(
            "line fit needs >= 3 points, got {}",
            times.len()
        )));
    }
    let n = times.len() as f64;
    let tm = times.iter().sum::<f64>() / n;
    let vm = values.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (t, v) in times.iter().zip(values) {
        sxy += (t - tm) * (v - vm);
        sxx += (t - tm) * (t - tm);
    }
    if sxx <= 0.0 {
        return Err(LabError::InsufficientData("all snapshot times coincide".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, vm - slope * tm))
}

/// Support radius per snapshot and its least-squares growth rate.
pub fn propagation_speed(t: &Trajectory, background: (f64, f64), threshold: f64) -> Result<SpeedFit> {
    if !(threshold > 0.0) {
        return Err(LabError::Domain(format!("threshold must be > 0, got {threshold}")));
    }
    let times = t.times();
    let radii: Vec<f64> = t
        .snapshots()
        .iter()
        .map(|s| support_radius(s, background, threshold))
        .collect();
    let (speed, intercept) = fit_line(&times, &radii)?;
    let dx = t.grid().dx();
    let monotone = radii.windows(2).all(|w| w[1] >= w[0] - dx);
    Ok(SpeedFit {
        speed,
        intercept,
        times,
        radii,
        monotone,
    })
}

/// Max over steps of the largest cell energy production divided by the
/// largest cell energy at the start of that step.
pub fn admissibility_report(t: &Trajectory) -> f64 {
    t.steps()
        .iter()
        .map(|r| {
            if r.max_energy > 0.0 {
                r.max_production / r.max_energy
            } else {
                r.max_production
            }
        })
        .fold(0.0, f64::max)
}

/// Smallest state box containing every weak cell state and the strong
/// solution at every cell center over all snapshots.
pub fn realized_box(
    weak: &Trajectory,
    strong: Option<&dyn StrongSolution1D>,
    g: GasParams,
) -> Result<StateBox> {
    let eps = weak.config().vacuum_eps;
    let grid = weak.grid();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    let mut v = 0.0_f64;
    for f in weak.snapshots() {
        for (i, c) in f.cells().iter().enumerate() {
            lo = lo.min(c.rho);
            hi = hi.max(c.rho);
            v = v.max(c.velocity(eps).abs());
            if let Some(s) = strong {
                let st = s.state(grid.center(i), f.time());
                lo = lo.min(st.rho);
                hi = hi.max(st.rho);
                v = v.max(st.u().abs());
            }
        }
    }
    StateBox::enclosing(lo, hi, v, g)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SignSweep {
    /// Nodes inside `supp φ` that were checked.
    pub nodes: usize,
    /// Nodes with `a·∂tφ + b·∂xφ > 1e-12·(1 + a)`.
    pub violations: usize,
    /// Nodes where `|b| ≤ C·a` failed, so no sign is guaranteed.
    pub inapplicable: usize,
    /// Largest value of `(a·∂tφ + b·∂xφ)/(1 + a)`.
    pub max_scaled: f64,
}

pub const SIGN_TOL: f64 = 1e-12;

/// Evaluates the pointwise sign condition with `a = A`, `b = B` at every
/// cell center inside the cutoff support, for every snapshot.
pub fn sign_condition_sweep(
    weak: &Trajectory,
    strong: &dyn StrongSolution1D,
    c: &TransportedCutoff<1>,
    g: GasParams,
) -> SignSweep {
    let eps = weak.config().vacuum_eps;
    let grid = weak.grid();
    let mut out = SignSweep {
        max_scaled: f64::NEG_INFINITY,
        ..SignSweep::default()
    };
    for f in weak.snapshots() {
        let t = f.time();
        for i in 0..grid.n_cells() {
            let x = [grid.center(i)];
            if c.eval(&x, t) <= 0.0 {
                continue;
            }
            let s = strong.state(x[0], t);
            let w = weak_state(f, i, eps);
            let a = rel_energy_density(&s, &w, g);
            let b = rel_energy_flux(&s, &w, g);
            let check = c.sign_condition(a, &b, &x, t);
            out.nodes += 1;
            if !check.applicable {
                out.inapplicable += 1;
            }
            if check.value > SIGN_TOL * (1.0 + a) {
                out.violations += 1;
            }
            out.max_scaled = out.max_scaled.max(check.value / (1.0 + a));
        }
    }
    out
}
