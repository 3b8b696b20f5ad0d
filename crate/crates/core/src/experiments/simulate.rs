use super::{Criterion, Experiment, Report};
use crate::config::ExperimentConfig;
use crate::diagnostics::admissibility_report;
use crate::error::Result;
use crate::io::write_trajectory;
use crate::solver::{simulate, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationStats {
    /// `max_k |M_k − M_0| / M_0` over snapshots.
    pub mass_drift: f64,
    /// `max_k (E_{k+1} − E_k) / E_0`; non-positive when energy never grows.
    pub energy_growth: f64,
}

pub fn conservation_stats(t: &Trajectory) -> ConservationStats {
    let g = t.config().gas;
    let eps = t.config().vacuum_eps;
    let m0 = t.snapshots()[0].total_mass();
    let energies: Vec<f64> = t.snapshots().iter().map(|s| s.total_energy(g, eps)).collect();
    let mass_drift = t
        .snapshots()
        .iter()
        .map(|s| (s.total_mass() - m0).abs() / m0.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let energy_growth = energies
        .windows(2)
        .map(|w| (w[1] - w[0]) / energies[0].max(f64::MIN_POSITIVE))
        .fold(f64::NEG_INFINITY, f64::max);
    ConservationStats {
        mass_drift,
        energy_growth,
    }
}

pub struct Simulate;

impl Experiment for Simulate {
    fn name(&self) -> &'static str {
        "simulate"
    }

    fn summary(&self) -> &'static str {
        "single run with discrete energy admissibility and conservation checks"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let solver = cfg.solver_config()?;
        let init = cfg.weak_field(cfg.grid1d()?)?;
        let traj = simulate(&init, &solver)?;
        let production = admissibility_report(&traj);
        let stats = conservation_stats(&traj);
        let tol = cfg.tolerances;

        let mut r = Report::default();
        r.criteria.push(Criterion::at_most("energy_production", production, tol.production));
        r.criteria.push(Criterion::at_most("mass_drift", stats.mass_drift, tol.mass_rel));
        r.criteria.push(Criterion::at_most("energy_growth", stats.energy_growth, 0.0));
        r.set("steps", traj.steps().len());
        r.set("snapshots", traj.snapshots().len());
        r.file("trajectory.txt", write_trajectory(&traj));
        Ok(r)
    }
}
