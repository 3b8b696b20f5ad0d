//! Experiment configuration: TOML with dotted sections, unknown keys rejected.
//!
//! ```toml
//! experiment = "weak-strong"
//! gamma = 2.0
//!
//! [grid]
//! x_min = -3.0
//! x_max = 3.0
//! n_cells = 400
//! ```
//!
//! `grid.n_cells = 400` at top level is the same key.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cutoff::{RadialBump, TransportedCutoff};
use crate::error::{LabError, Result};
use crate::gas::{GasParams, StateBox};
use crate::solver::{Boundary, Field, Grid1D, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub gamma: f64,
    #[serde(default)]
    pub seed: u64,
    pub grid: Option<GridSection>,
    pub initial: Option<InitialSection>,
    pub cutoff: Option<CutoffSection>,
    pub solver: Option<SolverSection>,
    #[serde(rename = "box")]
    pub state_box: Option<BoxSection>,
    pub lemma: Option<LemmaSection>,
    pub gronwall: Option<GronwallSection>,
    pub uniqueness: Option<UniquenessSection>,
    pub finite_speed: Option<FiniteSpeedSection>,
    pub incompressible: Option<IncompressibleSection>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    #[serde(default = "default_boundary")]
    pub boundary: String,
}

fn default_boundary() -> String {
    "periodic".into()
}

/// `ρ = rho + amplitude·b(x)`, `u = u + velocity_amplitude·b(x)`, with `b` a
/// compactly supported bump of half-width `half_width` around `center`. The
/// optional `outer_*` bump is added to the weak data only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub rho: f64,
    #[serde(default)]
    pub u: f64,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default)]
    pub velocity_amplitude: f64,
    #[serde(default = "one")]
    pub half_width: f64,
    #[serde(default)]
    pub center: f64,
    #[serde(default)]
    pub outer_amplitude: f64,
    #[serde(default = "one")]
    pub outer_half_width: f64,
    #[serde(default)]
    pub outer_center: f64,
}

fn one() -> f64 {
    1.0
}

/// `(1 − s²)³` on `|s| < 1`, zero outside.
pub fn bump_profile(x: f64, center: f64, half_width: f64) -> f64 {
    let s = (x - center) / half_width;
    if s.abs() >= 1.0 {
        0.0
    } else {
        let q = 1.0 - s * s;
        q * q * q
    }
}

impl InitialSection {
    pub fn background(&self) -> (f64, f64) {
        (self.rho, self.rho * self.u)
    }

    /// Strong (shared) data `(ρ, u)` at `x`.
    pub fn shared(&self, x: f64) -> (f64, f64) {
        let b = bump_profile(x, self.center, self.half_width);
        (self.rho + self.amplitude * b, self.u + self.velocity_amplitude * b)
    }

    /// Weak data: shared data plus the outer density bump.
    pub fn weak(&self, x: f64) -> (f64, f64) {
        let (r, u) = self.shared(x);
        (r + self.outer_amplitude * bump_profile(x, self.outer_center, self.outer_half_width), u)
    }

    fn validate(&self) -> Result<()> {
        if !(self.rho >= 0.0) {
            return Err(LabError::Config(format!("initial.rho must be >= 0, got {}", self.rho)));
        }
        if !(self.half_width > 0.0 && self.outer_half_width > 0.0) {
            return Err(LabError::Config("initial half widths must be > 0".into()));
        }
        if self.rho + self.amplitude.min(0.0) + self.outer_amplitude.min(0.0) < 0.0 {
            return Err(LabError::Config("initial density would be negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpeedMode {
    Grid,
    Analytic,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffSection {
    pub eta: f64,
    #[serde(default)]
    pub center: f64,
    pub speed_mode: SpeedMode,
    pub speed: Option<f64>,
}

impl CutoffSection {
    /// Cutoff with speed taken from `lemma` unless the mode is explicit.
    pub fn build(&self, lemma: impl FnOnce(SpeedMode) -> Result<f64>) -> Result<TransportedCutoff<1>> {
        let speed = match self.speed_mode {
            SpeedMode::Explicit => self
                .speed
                .ok_or_else(|| LabError::Config("cutoff.speed required when speed_mode = explicit".into()))?,
            mode => lemma(mode)?,
        };
        TransportedCutoff::new(RadialBump::new([self.center], self.eta)?, speed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub cfl: f64,
    pub t_end: f64,
    pub snapshot_dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSection {
    pub r_lo: f64,
    pub r_hi: f64,
    pub v_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaSection {
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub samples: usize,
    /// Extra boxes for `lemma-sweep`, each `[r_lo, r_hi, v_max]`.
    #[serde(default)]
    pub boxes: Vec<[f64; 3]>,
}

fn default_grid_n() -> usize {
    128
}

fn default_dim() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrongKind {
    Constant,
    Reference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GronwallSection {
    pub strong: StrongKind,
    #[serde(default = "default_factor")]
    pub factor: f64,
    #[serde(default = "default_refine")]
    pub refine: usize,
    /// Grid sizes for the refinement study; empty means `grid.n_cells` only.
    #[serde(default)]
    pub resolutions: Vec<usize>,
}

fn default_factor() -> f64 {
    crate::diagnostics::DEFAULT_GRONWALL_FACTOR
}

fn default_refine() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniquenessSection {
    pub tau: f64,
    #[serde(default = "default_refine")]
    pub refine: usize,
    pub resolutions: Vec<usize>,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteSpeedSection {
    pub threshold: f64,
    pub resolutions: Vec<usize>,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IncompressiblePair {
    VortexRest,
    ShearShear,
    TranslatingVortex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncompressibleSection {
    pub pairs: Vec<IncompressiblePair>,
    pub taus: Vec<f64>,
    #[serde(default = "default_quad_n")]
    pub quad_n: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_quad_n() -> usize {
    256
}

fn default_samples() -> usize {
    10_000
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub production: f64,
    pub mass_rel: f64,
    pub residual_rel: f64,
    pub residual_abs: f64,
    pub order: f64,
    pub sign: f64,
    pub exactness: f64,
    pub incompressible: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            production: 1e-10,
            mass_rel: 1e-12,
            residual_rel: 0.01,
            residual_abs: 1e-6,
            order: 0.8,
            sign: 1e-12,
            exactness: 1e-6,
            incompressible: 1e-8,
        }
    }
}

pub const EXPERIMENTS: [&str; 7] = [
    "constant",
    "simulate",
    "weak-strong",
    "finite-speed",
    "gronwall",
    "incompressible",
    "lemma-sweep",
];

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| LabError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    /// Re-checks every module invariant reachable from the config.
    pub fn validate(&self) -> Result<()> {
        if !EXPERIMENTS.contains(&self.experiment.as_str()) {
            return Err(LabError::Config(format!("unknown experiment '{}'", self.experiment)));
        }
        let gas = self.gas()?;
        if let Some(g) = &self.grid {
            Grid1D::new(g.x_min, g.x_max, g.n_cells, Boundary::parse(&g.boundary)?)
                .map_err(as_config)?;
        }
        if let Some(i) = &self.initial {
            i.validate()?;
        }
        if let Some(s) = &self.solver {
            SolverConfig::new(s.cfl, gas, s.t_end, s.snapshot_dt)?;
        }
        if let Some(b) = &self.state_box {
            StateBox::new(b.r_lo, b.r_hi, b.v_max, gas).map_err(as_config)?;
        }
        if let Some(c) = &self.cutoff {
            RadialBump::new([c.center], c.eta).map_err(as_config)?;
            if c.speed_mode == SpeedMode::Explicit && !c.speed.is_some_and(|s| s > 0.0) {
                return Err(LabError::Config("cutoff.speed must be > 0 when speed_mode = explicit".into()));
            }
        }
        if let Some(l) = &self.lemma {
            if l.grid_n < 2 || l.dim == 0 {
                return Err(LabError::Config("lemma.grid_n must be >= 2 and lemma.dim >= 1".into()));
            }
            for b in &l.boxes {
                StateBox::new(b[0], b[1], b[2], gas).map_err(as_config)?;
            }
        }
        if let Some(g) = &self.gronwall {
            if !(g.factor >= 0.0) {
                return Err(LabError::Config("gronwall.factor must be >= 0".into()));
            }
            if g.strong == StrongKind::Reference && g.refine < 8 {
                return Err(LabError::Config("gronwall.refine must be >= 8".into()));
            }
        }
        if let Some(u) = &self.uniqueness {
            if u.refine < 8 {
                return Err(LabError::Config("uniqueness.refine must be >= 8".into()));
            }
            if u.resolutions.len() < 2 {
                return Err(LabError::Config("uniqueness.resolutions needs >= 2 entries".into()));
            }
        }
        if let Some(f) = &self.finite_speed {
            if !(f.threshold > 0.0) {
                return Err(LabError::Config("finite_speed.threshold must be > 0".into()));
            }
        }
        if let Some(i) = &self.incompressible {
            if i.quad_n < 2 || i.samples == 0 {
                return Err(LabError::Config("incompressible.quad_n >= 2 and samples >= 1".into()));
            }
            if i.taus.iter().any(|t| !(*t >= 0.0)) {
                return Err(LabError::Config("incompressible.taus must be >= 0".into()));
            }
        }
        Ok(())
    }

    pub fn gas(&self) -> Result<GasParams> {
        GasParams::new(self.gamma).map_err(as_config)
    }

    pub fn require<'a, T>(&self, section: &'a Option<T>, name: &str) -> Result<&'a T> {
        section.as_ref().ok_or_else(|| {
            LabError::Config(format!("experiment '{}' needs a [{name}] section", self.experiment))
        })
    }

    pub fn grid_with(&self, n_cells: usize) -> Result<Grid1D> {
        let g = self.require(&self.grid, "grid")?;
        Grid1D::new(g.x_min, g.x_max, n_cells, Boundary::parse(&g.boundary)?).map_err(as_config)
    }

    pub fn grid1d(&self) -> Result<Grid1D> {
        let n = self.require(&self.grid, "grid")?.n_cells;
        self.grid_with(n)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let s = self.require(&self.solver, "solver")?;
        SolverConfig::new(s.cfl, self.gas()?, s.t_end, s.snapshot_dt)
    }

    /// Weak initial field on `grid`.
    pub fn weak_field(&self, grid: Grid1D) -> Result<Field> {
        let init = *self.require(&self.initial, "initial")?;
        Field::from_fn(grid, 0.0, |x| init.weak(x))
    }

    pub fn state_box(&self) -> Result<StateBox> {
        let b = self.require(&self.state_box, "box")?;
        StateBox::new(b.r_lo, b.r_hi, b.v_max, self.gas()?).map_err(as_config)
    }
}

fn as_config(e: LabError) -> LabError {
    match e {
        LabError::Config(_) => e,
        other => LabError::Config(other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
experiment = "simulate"
gamma = 2.0
grid.x_min = -1.0
grid.x_max = 1.0
grid.n_cells = 64
[solver]
cfl = 0.45
t_end = 0.1
snapshot_dt = 0.05
"#;

    #[test]
    fn dotted_and_sectioned_keys_agree() {
        let a = ExperimentConfig::from_toml(MINIMAL).unwrap();
        let b = ExperimentConfig::from_toml(
            "experiment = \"simulate\"\ngamma = 2.0\n[grid]\nx_min = -1.0\nx_max = 1.0\nn_cells = 64\n\
             [solver]\ncfl = 0.45\nt_end = 0.1\nsnapshot_dt = 0.05\n",
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.seed, 0);
        assert_eq!(a.grid1d().unwrap().bc(), Boundary::Periodic);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = format!("{MINIMAL}\nfoo = 1\n");
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(LabError::Config(_))));
        let text = MINIMAL.replace("grid.n_cells", "grid.cells");
        assert!(ExperimentConfig::from_toml(&text).is_err());
    }

    #[test]
    fn invariants_revalidated() {
        let err = ExperimentConfig::from_toml(&MINIMAL.replace("gamma = 2.0", "gamma = 1.0")).unwrap_err();
        assert!(err.to_string().contains("gamma > 1"), "{err}");
        assert!(ExperimentConfig::from_toml(&MINIMAL.replace("cfl = 0.45", "cfl = 0.6")).is_err());
        assert!(ExperimentConfig::from_toml(&MINIMAL.replace("n_cells = 64", "n_cells = 2")).is_err());
        assert!(ExperimentConfig::from_toml(&MINIMAL.replace("\"simulate\"", "\"nope\"")).is_err());
    }

    #[test]
    fn round_trips_through_toml() {
        let a = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(ExperimentConfig::from_toml(&a.to_toml()).unwrap(), a);
    }

    #[test]
    fn bump_profile_shape() {
        assert_eq!(bump_profile(0.0, 0.0, 1.0), 1.0);
        assert_eq!(bump_profile(1.0, 0.0, 1.0), 0.0);
        assert_eq!(bump_profile(-1.5, 0.0, 1.0), 0.0);
        assert_eq!(bump_profile(2.5, 2.0, 1.0), 0.421875);
    }
}
