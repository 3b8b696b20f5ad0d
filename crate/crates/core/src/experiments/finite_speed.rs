use super::{Criterion, Experiment, Report};
use crate::config::ExperimentConfig;
use crate::diagnostics::{propagation_speed, realized_box};
use crate::error::Result;
use crate::gas::{lemma_constant_grid, sound_speed};
use crate::io::speed_csv;
use crate::solver::simulate;

pub struct FiniteSpeed;

impl Experiment for FiniteSpeed {
    fn name(&self) -> &'static str {
        "finite-speed"
    }

    fn summary(&self) -> &'static str {
        "support growth of a localized perturbation against the flux-domination constant"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let fs = cfg.require(&cfg.finite_speed, "finite_speed")?;
        let init = *cfg.require(&cfg.initial, "initial")?;
        let g = cfg.gas()?;
        let solver = cfg.solver_config()?;
        let c_sound = sound_speed(init.rho, g)?;
        let mut r = Report::default();
        let mut violations = 0usize;
        for &n in &fs.resolutions {
            let traj = simulate(&cfg.weak_field(cfg.grid_with(n)?)?, &solver)?;
            let b = realized_box(&traj, None, g)?;
            let c_grid = lemma_constant_grid(&b, 1, fs.grid_n)?;
            let fit = propagation_speed(&traj, init.background(), fs.threshold)?;
            if fit.speed > c_grid {
                violations += 1;
            }
            r.criteria.push(Criterion::at_most(format!("n{n}.speed"), fit.speed, c_grid));
            r.set(&format!("n{n}.speed"), fit.speed);
            r.set(&format!("n{n}.c_grid"), c_grid);
            r.set(&format!("n{n}.sound_ratio"), fit.speed / c_sound);
            r.set(&format!("n{n}.radius_monotone"), fit.monotone);
            r.file(format!("speed_n{n}.csv"), speed_csv(&fit.times, &fit.radii, &fit, c_grid));
        }
        r.set("violations", violations);
        r.set("sound_speed", c_sound);
        Ok(r)
    }
}
