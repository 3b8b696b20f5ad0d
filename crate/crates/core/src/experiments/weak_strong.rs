use super::gronwall::{build_pair, deficit, finite_or_null};
use super::{Criterion, Experiment, Report};
use crate::config::{ExperimentConfig, StrongKind};
use crate::diagnostics::{gronwall_evaluate, localized_relative_energy, sign_condition_sweep};
use crate::error::{LabError, Result};
use crate::io::gronwall_csv;

/// Observed convergence orders between consecutive resolutions.
pub fn observed_orders(ns: &[usize], values: &[f64]) -> Vec<f64> {
    ns.windows(2)
        .zip(values.windows(2))
        .map(|(n, v)| (v[0] / v[1]).ln() / (n[1] as f64 / n[0] as f64).ln())
        .collect()
}

pub struct WeakStrong;

impl Experiment for WeakStrong {
    fn name(&self) -> &'static str {
        "weak-strong"
    }

    fn summary(&self) -> &'static str {
        "localized relative energy of data matched on a ball, under refinement"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let uq = cfg.require(&cfg.uniqueness, "uniqueness")?;
        let g = cfg.gas()?;
        let eps = cfg.solver_config()?.vacuum_eps;
        let factor = cfg.gronwall.as_ref().map_or(crate::diagnostics::DEFAULT_GRONWALL_FACTOR, |s| s.factor);
        let mut r = Report::default();
        let mut energies = Vec::new();
        let mut worst_sign = f64::NEG_INFINITY;
        let mut sign_violations = 0;
        let mut e0_max = 0.0_f64;
        let mut finest = None;

        for &n in &uq.resolutions {
            let pair = build_pair(cfg, StrongKind::Reference, n, uq.refine)?;
            let snaps = pair.weak.snapshots();
            let at_tau = snaps
                .iter()
                .find(|s| (s.time() - uq.tau).abs() <= 1e-12 * uq.tau.max(1.0))
                .ok_or_else(|| {
                    LabError::Config(format!("uniqueness.tau = {} is not a snapshot time", uq.tau))
                })?;
            let e_tau = localized_relative_energy(at_tau, pair.strong.as_ref(), &pair.cutoff, g, eps)?;
            let e0 = localized_relative_energy(&snaps[0], pair.strong.as_ref(), &pair.cutoff, g, eps)?;
            let sweep = sign_condition_sweep(&pair.weak, pair.strong.as_ref(), &pair.cutoff, g);
            worst_sign = worst_sign.max(sweep.max_scaled);
            sign_violations += sweep.violations;
            e0_max = e0_max.max(e0);
            energies.push(e_tau);
            r.set(&format!("n{n}.energy_tau"), e_tau);
            r.set(&format!("n{n}.cutoff_speed"), pair.cutoff.speed());
            r.set(&format!("n{n}.sign_nodes"), sweep.nodes);
            r.set(&format!("n{n}.sign_inapplicable"), sweep.inapplicable);
            finest = Some((n, pair));
        }

        let orders = observed_orders(&uq.resolutions, &energies);
        let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
        r.criteria.push(Criterion::at_least("observed_order", min_order, cfg.tolerances.order));
        r.criteria.push(Criterion::at_most("sign_condition", worst_sign, cfg.tolerances.sign));
        r.criteria.push(Criterion::at_most("sign_violations", sign_violations as f64, 0.0));
        r.criteria.push(Criterion::at_most("initial_energy", e0_max, 1e-10));
        r.set("orders", orders.iter().map(|&o| finite_or_null(o)).collect::<Vec<_>>());

        let (n, pair) = finest.expect("at least two resolutions");
        let report = gronwall_evaluate(&pair.weak, pair.strong.as_ref(), &pair.cutoff, g, factor)?;
        r.criteria.push(Criterion::at_least(
            "gronwall_residual",
            report.worst_residual(),
            -cfg.tolerances.residual_abs,
        ));
        r.set("gronwall_deficit", deficit(&report));
        r.set("gronwall_max_lhs", report.max_lhs());
        r.file(format!("gronwall_n{n}.csv"), gronwall_csv(&report));
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_of_exact_power_laws() {
        let ns = [100, 200, 400];
        let v: Vec<f64> = ns.iter().map(|&n| 3.0 / (n as f64).powi(2)).collect();
        for o in observed_orders(&ns, &v) {
            assert!((o - 2.0).abs() < 1e-12);
        }
    }
}
