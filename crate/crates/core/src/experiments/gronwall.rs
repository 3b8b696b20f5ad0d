use super::{Criterion, Experiment, Report};
use crate::config::{bump_profile, ExperimentConfig, SpeedMode, StrongKind};
use crate::cutoff::TransportedCutoff;
use crate::diagnostics::{gronwall_evaluate, realized_box, GronwallReport};
use crate::error::{LabError, Result};
use crate::exact::{constant_strong, reference_strong, StrongSolution1D};
use crate::gas::{lemma_constant_analytic, lemma_constant_grid};
use crate::io::gronwall_csv;
use crate::solver::{simulate, Field, Grid1D, Trajectory};

/// A simulated weak solution, its strong partner and the cutoff between them.
pub struct Pair {
    pub strong: Box<dyn StrongSolution1D>,
    pub weak: Trajectory,
    pub cutoff: TransportedCutoff<1>,
}

/// Strong solution from the shared initial data on `grid`.
pub fn build_strong(
    cfg: &ExperimentConfig,
    kind: StrongKind,
    grid: &Grid1D,
    refine: usize,
) -> Result<Box<dyn StrongSolution1D>> {
    let init = *cfg.require(&cfg.initial, "initial")?;
    match kind {
        StrongKind::Constant => {
            if init.amplitude != 0.0 || init.velocity_amplitude != 0.0 {
                return Err(LabError::Config(
                    "a constant strong solution needs initial.amplitude = initial.velocity_amplitude = 0".into(),
                ));
            }
            Ok(Box::new(constant_strong(init.rho, init.u)?))
        }
        StrongKind::Reference => {
            let s = reference_strong(&|x| init.shared(x), grid, refine, &cfg.solver_config()?)?;
            s.ensure_smooth()?;
            Ok(Box::new(s))
        }
    }
}

/// Weak data: the strong solution at `t = 0` sampled on `grid` plus the outer bump.
pub fn matched_weak_field(cfg: &ExperimentConfig, strong: &dyn StrongSolution1D, grid: Grid1D) -> Result<Field> {
    let init = *cfg.require(&cfg.initial, "initial")?;
    Field::from_fn(grid, 0.0, |x| {
        let s = strong.state(x, 0.0);
        let extra = init.outer_amplitude * bump_profile(x, init.outer_center, init.outer_half_width);
        (s.rho + extra, s.u())
    })
}

pub fn build_pair(cfg: &ExperimentConfig, kind: StrongKind, n_cells: usize, refine: usize) -> Result<Pair> {
    let grid = cfg.grid_with(n_cells)?;
    let strong = build_strong(cfg, kind, &grid, refine)?;
    let weak = simulate(&matched_weak_field(cfg, strong.as_ref(), grid)?, &cfg.solver_config()?)?;
    let grid_n = cfg.lemma.as_ref().map_or(128, |l| l.grid_n);
    let g = cfg.gas()?;
    let cutoff = cfg.require(&cfg.cutoff, "cutoff")?.build(|mode| {
        let b = realized_box(&weak, Some(strong.as_ref()), g)?;
        match mode {
            SpeedMode::Analytic => lemma_constant_analytic(&b),
            _ => lemma_constant_grid(&b, 1, grid_n),
        }
    })?;
    Ok(Pair { strong, weak, cutoff })
}

/// `max(0, −min residual)`.
pub fn deficit(r: &GronwallReport) -> f64 {
    (-r.worst_residual()).max(0.0)
}

pub struct Gronwall;

impl Experiment for Gronwall {
    fn name(&self) -> &'static str {
        "gronwall"
    }

    fn summary(&self) -> &'static str {
        "both sides of the localized relative energy inequality under refinement"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let gw = cfg.require(&cfg.gronwall, "gronwall")?;
        let g = cfg.gas()?;
        let mut resolutions = gw.resolutions.clone();
        if resolutions.is_empty() {
            resolutions.push(cfg.require(&cfg.grid, "grid")?.n_cells);
        }
        let mut r = Report::default();
        let mut deficits = Vec::new();
        let mut last = None;
        for &n in &resolutions {
            let pair = build_pair(cfg, gw.strong, n, gw.refine)?;
            let report = gronwall_evaluate(&pair.weak, pair.strong.as_ref(), &pair.cutoff, g, gw.factor)?;
            r.set(&format!("n{n}.max_lhs"), report.max_lhs());
            r.set(&format!("n{n}.worst_residual"), report.worst_residual());
            r.set(&format!("n{n}.min_sufficient_factor"), finite_or_null(report.min_sufficient_factor()));
            r.set(&format!("n{n}.cutoff_speed"), pair.cutoff.speed());
            r.file(format!("gronwall_n{n}.csv"), gronwall_csv(&report));
            deficits.push(deficit(&report));
            last = Some(report);
        }
        let last = last.expect("at least one resolution");
        let scale = last.max_lhs();
        let normalized = if scale > 0.0 { last.worst_residual() / scale } else { 0.0 };
        r.criteria.push(Criterion::at_least(
            "residual_finest",
            normalized,
            -cfg.tolerances.residual_rel,
        ));
        if deficits.len() > 1 {
            let worst_step = deficits.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
            r.criteria.push(Criterion::at_most("deficit_monotone", worst_step, 0.0));
        }
        r.set("strong", pair_kind(gw.strong));
        Ok(r)
    }
}

fn pair_kind(k: StrongKind) -> &'static str {
    match k {
        StrongKind::Constant => "constant",
        StrongKind::Reference => "reference",
    }
}

pub(super) fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        x.into()
    } else {
        serde_json::Value::Null
    }
}
