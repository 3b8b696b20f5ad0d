//! First-order local Lax–Friedrichs finite volumes for the 1-D isentropic
//! system, with a per-cell account of discrete energy production.
//!
//! The interface flux is `F̂ = ½(F_L + F_R) − ½λ(U_R − U_L)` with
//! `λ = max(|u_L| + c_L, |u_R| + c_R)`, and it is paired with the numerical
//! energy flux `Q̂ = ½(Q_L + Q_R) − ½λ(E_R − E_L)`. For `cfl ≤ 0.5` the update
//! is a convex combination of two-wave Riemann fans, so the cell production
//! `P_i = (E_i^{n+1} − E_i^n)/Δt + (Q̂_{i+½} − Q̂_{i−½})/Δx` should stay at or
//! below rounding level.

use crate::error::{LabError, Result};
use crate::gas::{self, GasParams, PrimitiveState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// Zero-gradient ghost cells.
    CopyOut,
}

impl Boundary {
    pub fn name(&self) -> &'static str {
        match self {
            Boundary::Periodic => "periodic",
            Boundary::CopyOut => "copy-out",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "copy-out" => Ok(Boundary::CopyOut),
            other => Err(LabError::Config(format!(
                "unknown boundary condition '{other}' (expected periodic or copy-out)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_cells: usize,
    bc: Boundary,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize, bc: Boundary) -> Result<Self> {
        if n_cells < 4 {
            return Err(LabError::Domain(format!("grid needs >= 4 cells, got {n_cells}")));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(LabError::Domain(format!(
                "grid needs x_max > x_min, got [{x_min}, {x_max}]"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_cells,
            bc,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }
    pub fn bc(&self) -> Boundary {
        self.bc
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    #[inline]
    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    /// Same domain and boundary with `factor` times as many cells.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.x_min, self.x_max, self.n_cells * factor, self.bc)
    }
}

/// Cell average of `(ρ, ρu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conserved {
    pub rho: f64,
    pub mom: f64,
}

impl Conserved {
    pub const fn new(rho: f64, mom: f64) -> Self {
        Self { rho, mom }
    }

    pub fn from_primitive(rho: f64, u: f64) -> Self {
        Self { rho, mom: rho * u }
    }

    /// Velocity with the vacuum guard: zero when `ρ ≤ vacuum_eps`.
    #[inline]
    pub fn velocity(&self, vacuum_eps: f64) -> f64 {
        if self.rho > vacuum_eps {
            self.mom / self.rho
        } else {
            0.0
        }
    }

    #[inline]
    pub fn primitive(&self, vacuum_eps: f64) -> PrimitiveState<1> {
        PrimitiveState::scalar(self.rho, self.velocity(vacuum_eps))
    }

    fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.mom.is_finite()
    }
}

/// Physical flux `(ρu, ρu² + ρ^γ)`.
pub fn physical_flux(s: &Conserved, g: GasParams) -> (f64, f64) {
    physical_flux_guarded(s, g, DEFAULT_VACUUM_EPS)
}

#[inline]
fn physical_flux_guarded(s: &Conserved, g: GasParams, eps: f64) -> (f64, f64) {
    let u = s.velocity(eps);
    (s.mom, s.mom * u + s.rho.max(0.0).powf(g.gamma()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceFlux {
    pub mass: f64,
    pub mom: f64,
    /// Local wave speed bound `λ`.
    pub speed: f64,
}

/// Local Lax–Friedrichs (Rusanov) flux between two cells.
pub fn llf_interface_flux(left: &Conserved, right: &Conserved, g: GasParams) -> InterfaceFlux {
    llf_guarded(left, right, g, DEFAULT_VACUUM_EPS)
}

#[inline]
fn llf_guarded(left: &Conserved, right: &Conserved, g: GasParams, eps: f64) -> InterfaceFlux {
    let ul = left.velocity(eps);
    let ur = right.velocity(eps);
    let lam_l = ul.abs() + gas::sound_speed_unchecked(left.rho, g);
    let lam_r = ur.abs() + gas::sound_speed_unchecked(right.rho, g);
    let speed = lam_l.max(lam_r);
    let (fl0, fl1) = physical_flux_guarded(left, g, eps);
    let (fr0, fr1) = physical_flux_guarded(right, g, eps);
    InterfaceFlux {
        mass: 0.5 * (fl0 + fr0) - 0.5 * speed * (right.rho - left.rho),
        mom: 0.5 * (fl1 + fr1) - 0.5 * speed * (right.mom - left.mom),
        speed,
    }
}

pub const DEFAULT_VACUUM_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub cfl: f64,
    pub gas: GasParams,
    pub vacuum_eps: f64,
    pub t_end: f64,
    pub snapshot_dt: f64,
}

impl SolverConfig {
    pub fn new(cfl: f64, gas: GasParams, t_end: f64, snapshot_dt: f64) -> Result<Self> {
        let cfg = Self {
            cfl,
            gas,
            vacuum_eps: DEFAULT_VACUUM_EPS,
            t_end,
            snapshot_dt,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return Err(LabError::Config(format!("cfl must lie in (0, 0.5], got {}", self.cfl)));
        }
        if !(self.vacuum_eps >= 0.0 && self.vacuum_eps.is_finite()) {
            return Err(LabError::Config("vacuum_eps must be a finite nonnegative number".into()));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(LabError::Config(format!("t_end must be > 0, got {}", self.t_end)));
        }
        if !(self.snapshot_dt.is_finite() && self.snapshot_dt > 0.0) {
            return Err(LabError::Config(format!(
                "snapshot_dt must be > 0, got {}",
                self.snapshot_dt
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid1D,
    cells: Vec<Conserved>,
    time: f64,
}

impl Field {
    pub fn new(grid: Grid1D, cells: Vec<Conserved>, time: f64) -> Result<Self> {
        if cells.len() != grid.n_cells() {
            return Err(LabError::Domain(format!(
                "field has {} cells, grid expects {}",
                cells.len(),
                grid.n_cells()
            )));
        }
        for (i, c) in cells.iter().enumerate() {
            if !c.is_finite() || c.rho < 0.0 {
                return Err(LabError::Domain(format!("cell {i} holds an invalid state {c:?}")));
            }
            if c.rho == 0.0 && c.mom != 0.0 {
                return Err(LabError::Domain(format!("vacuum cell {i} carries momentum")));
            }
        }
        Ok(Self { grid, cells, time })
    }

    /// Samples primitive data `(ρ, u)` at cell centers.
    pub fn from_fn(grid: Grid1D, time: f64, f: impl Fn(f64) -> (f64, f64)) -> Result<Self> {
        let cells = (0..grid.n_cells())
            .map(|i| {
                let (rho, u) = f(grid.center(i));
                Conserved::from_primitive(rho, u)
            })
            .collect();
        Self::new(grid, cells, time)
    }

    pub fn constant(grid: Grid1D, rho: f64, u: f64) -> Result<Self> {
        Self::from_fn(grid, 0.0, |_| (rho, u))
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }
    pub fn cells(&self) -> &[Conserved] {
        &self.cells
    }
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn total_mass(&self) -> f64 {
        self.cells.iter().map(|c| c.rho).sum::<f64>() * self.grid.dx()
    }

    pub fn total_momentum(&self) -> f64 {
        self.cells.iter().map(|c| c.mom).sum::<f64>() * self.grid.dx()
    }

    pub fn total_energy(&self, g: GasParams, eps: f64) -> f64 {
        self.cells
            .iter()
            .map(|c| gas::energy_density(&c.primitive(eps), g))
            .sum::<f64>()
            * self.grid.dx()
    }

    fn ghost_left(&self) -> Conserved {
        match self.grid.bc {
            Boundary::Periodic => self.cells[self.cells.len() - 1],
            Boundary::CopyOut => self.cells[0],
        }
    }

    fn ghost_right(&self) -> Conserved {
        match self.grid.bc {
            Boundary::Periodic => self.cells[0],
            Boundary::CopyOut => self.cells[self.cells.len() - 1],
        }
    }

    fn max_wave_speed(&self, g: GasParams, eps: f64) -> f64 {
        self.cells
            .iter()
            .map(|c| c.velocity(eps).abs() + gas::sound_speed_unchecked(c.rho, g))
            .fold(0.0, f64::max)
    }
}

/// Result of one forward-Euler step.
#[derive(Debug, Clone)]
pub struct StepOutput {
    pub field: Field,
    /// Discrete energy production `P_i` per cell.
    pub production: Vec<f64>,
    pub dt: f64,
}

/// One step at the CFL time step `cfl·Δx/max λ`.
pub fn step(f: &Field, cfg: &SolverConfig) -> Result<StepOutput> {
    step_capped(f, cfg, f64::INFINITY)
}

/// One step with the time step additionally capped at `dt_cap`.
pub fn step_capped(f: &Field, cfg: &SolverConfig, dt_cap: f64) -> Result<StepOutput> {
    let g = cfg.gas;
    let eps = cfg.vacuum_eps;
    let n = f.cells.len();
    let dx = f.grid.dx();
    let lam_max = f.max_wave_speed(g, eps);
    let mut dt = if lam_max > 0.0 {
        cfg.cfl * dx / lam_max
    } else {
        f64::INFINITY
    };
    dt = dt.min(dt_cap);
    if !(dt.is_finite() && dt > 0.0) {
        return Err(LabError::Domain(format!("no admissible time step (dt = {dt})")));
    }

    let energy = |c: &Conserved| gas::energy_density(&c.primitive(eps), g);
    let energy_flux = |c: &Conserved| gas::energy_flux(&c.primitive(eps), g)[0];

    // Interface j sits between cell j-1 and cell j; j = 0 and j = n touch the ghosts.
    let mut mass_flux = Vec::with_capacity(n + 1);
    let mut mom_flux = Vec::with_capacity(n + 1);
    let mut en_flux = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let left = if j == 0 { f.ghost_left() } else { f.cells[j - 1] };
        let right = if j == n { f.ghost_right() } else { f.cells[j] };
        let fl = llf_guarded(&left, &right, g, eps);
        let el = energy(&left);
        let er = energy(&right);
        let q = 0.5 * (energy_flux(&left) + energy_flux(&right)) - 0.5 * fl.speed * (er - el);
        mass_flux.push(fl.mass);
        mom_flux.push(fl.mom);
        en_flux.push(q);
    }

    let ratio = dt / dx;
    let time = f.time + dt;
    let mut cells = Vec::with_capacity(n);
    let mut production = Vec::with_capacity(n);
    for i in 0..n {
        let old = f.cells[i];
        let mut rho = old.rho - ratio * (mass_flux[i + 1] - mass_flux[i]);
        let mut mom = old.mom - ratio * (mom_flux[i + 1] - mom_flux[i]);
        if !(rho.is_finite() && mom.is_finite()) {
            return Err(LabError::Blowup { cell: i, time });
        }
        if rho <= eps {
            rho = rho.max(0.0);
            mom = 0.0;
        }
        let new = Conserved::new(rho, mom);
        let p = (energy(&new) - energy(&old)) / dt + (en_flux[i + 1] - en_flux[i]) / dx;
        if !p.is_finite() {
            return Err(LabError::Blowup { cell: i, time });
        }
        cells.push(new);
        production.push(p);
    }

    Ok(StepOutput {
        field: Field {
            grid: f.grid,
            cells,
            time,
        },
        production,
        dt,
    })
}

/// Per-step summary of the energy production.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    /// Time at the end of the step.
    pub time: f64,
    pub dt: f64,
    pub max_production: f64,
    /// Largest cell energy density at the start of the step.
    pub max_energy: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    snapshots: Vec<Field>,
    config: SolverConfig,
    steps: Vec<StepRecord>,
}

impl Trajectory {
    pub fn new(snapshots: Vec<Field>, config: SolverConfig) -> Result<Self> {
        Self::with_steps(snapshots, config, Vec::new())
    }

    pub(crate) fn with_steps(
        snapshots: Vec<Field>,
        config: SolverConfig,
        steps: Vec<StepRecord>,
    ) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(LabError::InsufficientData("trajectory without snapshots".into()));
        }
        let grid = snapshots[0].grid;
        for w in snapshots.windows(2) {
            if !(w[1].time > w[0].time) {
                return Err(LabError::Domain("snapshot times must increase strictly".into()));
            }
        }
        if snapshots.iter().any(|s| s.grid != grid) {
            return Err(LabError::Domain("snapshots must share one grid".into()));
        }
        Ok(Self {
            snapshots,
            config,
            steps,
        })
    }

    pub fn snapshots(&self) -> &[Field] {
        &self.snapshots
    }
    pub fn config(&self) -> &SolverConfig {
        &self.config
    }
    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }
    pub fn grid(&self) -> &Grid1D {
        &self.snapshots[0].grid
    }
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }
    pub fn last(&self) -> &Field {
        self.snapshots.last().expect("nonempty")
    }
}

fn snapshot_targets(t0: f64, cfg: &SolverConfig) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 1usize;
    loop {
        let t = t0 + k as f64 * cfg.snapshot_dt;
        if t >= cfg.t_end - 1e-12 * cfg.t_end.max(1.0) {
            break;
        }
        out.push(t);
        k += 1;
    }
    out.push(cfg.t_end);
    out
}

/// Steps from `init` to `cfg.t_end`, keeping a snapshot every `snapshot_dt`
/// and at `t_end`. The initial field is the first snapshot.
pub fn simulate(init: &Field, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if init.time >= cfg.t_end {
        return Err(LabError::Config(format!(
            "t_end {} does not exceed the initial time {}",
            cfg.t_end, init.time
        )));
    }
    let g = cfg.gas;
    let eps = cfg.vacuum_eps;
    let mut snapshots = vec![init.clone()];
    let mut steps = Vec::new();
    let mut current = init.clone();
    for target in snapshot_targets(init.time, cfg) {
        while current.time < target {
            let remaining = target - current.time;
            let max_energy = current
                .cells
                .iter()
                .map(|c| gas::energy_density(&c.primitive(eps), g))
                .fold(0.0, f64::max);
            let out = step_capped(&current, cfg, remaining)?;
            let mut field = out.field;
            if out.dt >= remaining {
                field.time = target;
            }
            steps.push(StepRecord {
                time: field.time,
                dt: out.dt,
                max_production: out.production.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                max_energy,
            });
            current = field;
        }
        snapshots.push(current.clone());
    }
    Trajectory::with_steps(snapshots, *cfg, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn g2() -> GasParams {
        GasParams::new(2.0).unwrap()
    }

    fn bump(x: f64, center: f64, half_width: f64) -> f64 {
        let s = ((x - center).abs() / half_width).min(1.0);
        1.0 - s * s * (3.0 - 2.0 * s)
    }

    #[test]
    fn physical_flux_examples() {
        assert_eq!(physical_flux(&Conserved::new(1.0, 0.0), g2()), (0.0, 1.0));
        assert_eq!(physical_flux(&Conserved::new(0.0, 0.0), g2()), (0.0, 0.0));
        assert_eq!(physical_flux(&Conserved::new(1.0, 1.0), g2()), (1.0, 2.0));
    }

    #[test]
    fn llf_is_consistent() {
        let s = Conserved::new(1.0, 0.0);
        let f = llf_interface_flux(&s, &s, g2());
        assert_eq!((f.mass, f.mom), (0.0, 1.0));
        assert_abs_diff_eq!(f.speed, 2f64.sqrt(), epsilon = 1e-15);

        let s = Conserved::new(0.7, -0.3);
        let f = llf_interface_flux(&s, &s, g2());
        let (m, p) = physical_flux(&s, g2());
        assert_eq!((f.mass, f.mom), (m, p));
        let u: f64 = -0.3 / 0.7;
        assert_abs_diff_eq!(f.speed, u.abs() + (2.0 * 0.7f64).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn llf_mirror_symmetry() {
        let l = Conserved::new(1.3, 0.4);
        let r = Conserved::new(0.6, -0.2);
        let f = llf_interface_flux(&l, &r, g2());
        let fm = llf_interface_flux(
            &Conserved::new(r.rho, -r.mom),
            &Conserved::new(l.rho, -l.mom),
            g2(),
        );
        assert_abs_diff_eq!(fm.mass, -f.mass, epsilon = 1e-15);
        assert_abs_diff_eq!(fm.mom, f.mom, epsilon = 1e-15);
        assert_eq!(fm.speed, f.speed);
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(0.0, 1.0, 3, Boundary::Periodic).is_err());
        assert!(Grid1D::new(1.0, 1.0, 10, Boundary::Periodic).is_err());
        let g = Grid1D::new(-1.0, 1.0, 4, Boundary::CopyOut).unwrap();
        assert_eq!(g.dx(), 0.5);
        assert_eq!(g.center(0), -0.75);
    }

    #[test]
    fn cfl_above_half_is_rejected() {
        assert!(SolverConfig::new(0.6, g2(), 1.0, 0.1).is_err());
        assert!(SolverConfig::new(0.5, g2(), 1.0, 0.1).is_ok());
    }

    #[test]
    fn constant_field_is_steady() {
        let grid = Grid1D::new(0.0, 1.0, 16, Boundary::Periodic).unwrap();
        let f = Field::constant(grid, 1.2, 0.3).unwrap();
        let cfg = SolverConfig::new(0.45, g2(), 1.0, 0.5).unwrap();
        let out = step(&f, &cfg).unwrap();
        assert_eq!(out.field.cells(), f.cells());
        assert!(out.production.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn symmetric_data_stays_symmetric() {
        let grid = Grid1D::new(-2.0, 2.0, 200, Boundary::Periodic).unwrap();
        let f = Field::from_fn(grid, 0.0, |x| (1.0 + 0.3 * bump(x, 0.0, 0.8), 0.0)).unwrap();
        let cfg = SolverConfig::new(0.45, g2(), 0.4, 0.4).unwrap();
        let traj = simulate(&f, &cfg).unwrap();
        let cells = traj.last().cells();
        let n = cells.len();
        for i in 0..n / 2 {
            let (a, b) = (cells[i], cells[n - 1 - i]);
            assert_abs_diff_eq!(a.rho, b.rho, epsilon = 1e-12);
            assert_abs_diff_eq!(a.mom, -b.mom, epsilon = 1e-12);
        }
    }

    #[test]
    fn smooth_bump_is_admissible_and_conservative() {
        let grid = Grid1D::new(-2.0, 2.0, 400, Boundary::Periodic).unwrap();
        let f = Field::from_fn(grid, 0.0, |x| (1.0 + 0.1 * bump(x, 0.0, 0.5), 0.0)).unwrap();
        let cfg = SolverConfig::new(0.45, g2(), 0.5, 0.05).unwrap();
        let traj = simulate(&f, &cfg).unwrap();
        let m0 = f.total_mass();
        let p0 = f.total_momentum();
        for s in traj.snapshots() {
            assert!(((s.total_mass() - m0) / m0).abs() <= 1e-12);
            assert!((s.total_momentum() - p0).abs() <= 1e-12 * m0);
        }
        let energies: Vec<f64> = traj
            .snapshots()
            .iter()
            .map(|s| s.total_energy(cfg.gas, cfg.vacuum_eps))
            .collect();
        for w in energies.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-14));
        }
        for r in traj.steps() {
            assert!(r.max_production <= 1e-10 * r.max_energy, "{r:?}");
        }
        assert_eq!(traj.last().time(), 0.5);
    }

    #[test]
    fn vacuum_stays_nonnegative() {
        let grid = Grid1D::new(-1.0, 1.0, 100, Boundary::CopyOut).unwrap();
        let f = Field::from_fn(grid, 0.0, |x| if x.abs() < 0.4 { (1.0, 0.0) } else { (0.0, 0.0) })
            .unwrap();
        let cfg = SolverConfig::new(0.5, g2(), 0.2, 0.05).unwrap();
        let traj = simulate(&f, &cfg).unwrap();
        for s in traj.snapshots() {
            assert!(s.cells().iter().all(|c| c.rho >= 0.0));
        }
    }

    #[test]
    fn snapshots_land_on_grid_of_times() {
        let grid = Grid1D::new(0.0, 1.0, 8, Boundary::Periodic).unwrap();
        let f = Field::constant(grid, 1.0, 0.0).unwrap();
        let cfg = SolverConfig::new(0.4, g2(), 0.25, 0.1).unwrap();
        let traj = simulate(&f, &cfg).unwrap();
        let t = traj.times();
        assert_eq!(t.len(), 4);
        assert_eq!(t[0], 0.0);
        assert_eq!(t[3], 0.25);
        assert_abs_diff_eq!(t[1], 0.1, epsilon = 1e-15);
    }

    #[test]
    fn field_rejects_bad_cells() {
        let grid = Grid1D::new(0.0, 1.0, 4, Boundary::Periodic).unwrap();
        assert!(Field::new(grid, vec![Conserved::new(1.0, 0.0); 3], 0.0).is_err());
        let mut cells = vec![Conserved::new(1.0, 0.0); 4];
        cells[2] = Conserved::new(-1.0, 0.0);
        assert!(Field::new(grid, cells.clone(), 0.0).is_err());
        cells[2] = Conserved::new(0.0, 1.0);
        assert!(Field::new(grid, cells, 0.0).is_err());
    }
}
