use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Criterion, Experiment, Report};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::gas::{
    lemma_constant_analytic, lemma_constant_grid, potential_convexity_constant, rel_energy_density,
    rel_energy_flux, relative_potential_unchecked, GasParams, PrimitiveState, StateBox,
    GRID_SAFETY_FACTOR,
};

/// Allowed rounding below zero for `A`.
pub const A_NEG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SampleStats {
    pub samples: usize,
    pub min_a: f64,
    /// Samples with `A < −1e-12`.
    pub negative: usize,
    /// Samples with `A ≤ 1e-12` whose states are not identified.
    pub identification_failures: usize,
    /// Samples with `|B| > C·A`.
    pub domination_violations: usize,
    pub max_ratio: f64,
    /// Samples with `potential < c·(R−ρ)² − 1e-12`; zero when `r_lo = 0`.
    pub quadratic_failures: usize,
}

fn pick(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}

/// Uniform samples of `(R, U; ρ, u)` in the box with scalar velocities.
pub fn sample_box(b: &StateBox, c: f64, samples: usize, seed: u64) -> SampleStats {
    let g = b.gas();
    let quad = potential_convexity_constant(b).ok();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = SampleStats {
        samples,
        min_a: f64::INFINITY,
        ..SampleStats::default()
    };
    let v = b.v_max();
    for _ in 0..samples {
        let big_r = pick(&mut rng, b.r_lo(), b.r_hi());
        let rho = pick(&mut rng, b.r_lo(), b.r_hi());
        let big_u = pick(&mut rng, -v, v);
        let u = pick(&mut rng, -v, v);
        let strong = PrimitiveState::scalar(big_r, big_u);
        let weak = PrimitiveState::scalar(rho, u);
        let a = rel_energy_density(&strong, &weak, g);
        let flux = rel_energy_flux(&strong, &weak, g)[0].abs();
        st.min_a = st.min_a.min(a);
        if a < -A_NEG_TOL {
            st.negative += 1;
        }
        if a <= A_NEG_TOL && !((rho - big_r).abs() <= 1e-6 && (rho <= 1e-6 || (u - big_u).abs() <= 1e-6)) {
            st.identification_failures += 1;
        }
        if flux > c * a {
            st.domination_violations += 1;
        }
        if a > crate::gas::A_FLOOR {
            st.max_ratio = st.max_ratio.max(flux / a);
        }
        if let Some(cq) = quad {
            let p = relative_potential_unchecked(big_r, rho, g);
            if p < cq * (big_r - rho).powi(2) - A_NEG_TOL {
                st.quadratic_failures += 1;
            }
        }
    }
    st
}

/// `|B| ≤ C·A` for 2-D velocities with random directions; returns the
/// number of violations.
pub fn direction_check(b: &StateBox, c: f64, samples: usize, seed: u64) -> usize {
    let g = b.gas();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    let v = b.v_max();
    for _ in 0..samples {
        let big_r = pick(&mut rng, b.r_lo(), b.r_hi());
        let rho = pick(&mut rng, b.r_lo(), b.r_hi());
        let (su, au) = (pick(&mut rng, 0.0, v), rng.gen_range(0.0..std::f64::consts::TAU));
        let (sw, aw) = (pick(&mut rng, 0.0, v), rng.gen_range(0.0..std::f64::consts::TAU));
        let strong = PrimitiveState::new_unchecked(big_r, [su * au.cos(), su * au.sin()]);
        let weak = PrimitiveState::new_unchecked(rho, [sw * aw.cos(), sw * aw.sin()]);
        let a = rel_energy_density(&strong, &weak, g);
        let f = rel_energy_flux(&strong, &weak, g);
        if (f[0] * f[0] + f[1] * f[1]).sqrt() > c * a {
            bad += 1;
        }
    }
    bad
}

/// Largest `|potential(R, ρ) − (R−ρ)²|` at γ = 2 over uniform `(R, ρ) ∈ [0, 10]²`.
pub fn gamma2_identity_error(samples: usize, seed: u64) -> f64 {
    let g = GasParams::new(2.0).expect("2 > 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let big_r: f64 = rng.gen_range(0.0..=10.0);
            let rho: f64 = rng.gen_range(0.0..=10.0);
            (relative_potential_unchecked(big_r, rho, g) - (big_r - rho).powi(2)).abs()
        })
        .fold(0.0, f64::max)
}

pub struct Constant;

impl Experiment for Constant {
    fn name(&self) -> &'static str {
        "constant"
    }

    fn summary(&self) -> &'static str {
        "grid and analytic flux-domination constants of a state box"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let b = cfg.state_box()?;
        let (grid_n, dim) = cfg.lemma.as_ref().map_or((128, 1), |l| (l.grid_n, l.dim));
        let c_grid = lemma_constant_grid(&b, dim, grid_n)?;
        let c_analytic = lemma_constant_analytic(&b).ok();
        let mut r = Report::default();
        r.criteria.push(Criterion::flag("grid_constant_finite", c_grid.is_finite()));
        if let Some(ca) = c_analytic {
            r.criteria.push(Criterion::at_least(
                "analytic_dominates_grid",
                ca,
                c_grid / GRID_SAFETY_FACTOR,
            ));
            r.set("c_analytic", ca);
        }
        r.set("c_grid", c_grid);
        r.set("grid_n", grid_n);
        let mut csv = String::from("gamma,r_lo,r_hi,v_max,grid_n,c_grid,c_analytic\n");
        let _ = writeln!(
            csv,
            "{:?},{:?},{:?},{:?},{grid_n},{c_grid:?},{}",
            b.gas().gamma(),
            b.r_lo(),
            b.r_hi(),
            b.v_max(),
            c_analytic.map_or("".into(), |c| format!("{c:?}"))
        );
        r.file("constants.csv", csv);
        Ok(r)
    }
}

pub struct LemmaSweep;

impl Experiment for LemmaSweep {
    fn name(&self) -> &'static str {
        "lemma-sweep"
    }

    fn summary(&self) -> &'static str {
        "sampled nonnegativity and flux domination over state boxes"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let lemma = cfg.require(&cfg.lemma, "lemma")?;
        let g = cfg.gas()?;
        let mut boxes = Vec::new();
        if cfg.state_box.is_some() {
            boxes.push(cfg.state_box()?);
        }
        for b in &lemma.boxes {
            boxes.push(StateBox::new(b[0], b[1], b[2], g)?);
        }
        let samples = lemma.samples.max(1);
        let mut r = Report::default();
        let mut csv = String::from(
            "r_lo,r_hi,v_max,c_grid,c_grid_fine,refinement_change,c_analytic,min_a,max_ratio,violations,direction_violations\n",
        );
        for (k, b) in boxes.iter().enumerate() {
            let c = lemma_constant_grid(b, lemma.dim, lemma.grid_n)?;
            let c_fine = lemma_constant_grid(b, lemma.dim, 2 * lemma.grid_n)?;
            let change = (c_fine - c).abs() / c;
            let seed = cfg.seed.wrapping_add(k as u64);
            let st = sample_box(b, c, samples, seed);
            let dirs = direction_check(b, c, 10_000, seed ^ 0x5eed);
            let ca = lemma_constant_analytic(b).ok();
            let tag = format!("box{k}");
            r.criteria.push(Criterion::at_most(format!("{tag}.negative_a"), st.negative as f64, 0.0));
            r.criteria.push(Criterion::at_most(
                format!("{tag}.identification_failures"),
                st.identification_failures as f64,
                0.0,
            ));
            r.criteria.push(Criterion::at_most(
                format!("{tag}.domination_violations"),
                st.domination_violations as f64,
                0.0,
            ));
            r.criteria.push(Criterion::at_most(format!("{tag}.direction_violations"), dirs as f64, 0.0));
            r.criteria.push(Criterion::at_most(format!("{tag}.refinement_change"), change, 0.02));
            if let Some(ca) = ca {
                r.criteria.push(Criterion::at_least(
                    format!("{tag}.analytic_dominates_grid"),
                    ca,
                    c / GRID_SAFETY_FACTOR,
                ));
                r.criteria.push(Criterion::at_most(
                    format!("{tag}.quadratic_failures"),
                    st.quadratic_failures as f64,
                    0.0,
                ));
            }
            let _ = writeln!(
                csv,
                "{:?},{:?},{:?},{c:?},{c_fine:?},{change:?},{},{:?},{:?},{},{dirs}",
                b.r_lo(),
                b.r_hi(),
                b.v_max(),
                ca.map_or("".into(), |c| format!("{c:?}")),
                st.min_a,
                st.max_ratio,
                st.domination_violations
            );
        }
        if g.gamma() == 2.0 {
            let err = gamma2_identity_error(samples, cfg.seed);
            r.criteria.push(Criterion::at_most("gamma2_identity", err, 1e-12));
        }
        r.set("boxes", boxes.len());
        r.file("lemma_sweep.csv", csv);
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_box_samples_are_dominated() {
        let g = GasParams::new(2.0).unwrap();
        let b = StateBox::new(0.9, 1.1, 0.2, g).unwrap();
        let c = lemma_constant_grid(&b, 1, 32).unwrap();
        let st = sample_box(&b, c, 20_000, 3);
        assert_eq!(st.negative, 0);
        assert_eq!(st.domination_violations, 0);
        assert_eq!(st.quadratic_failures, 0);
        assert!(st.max_ratio <= c);
        assert_eq!(direction_check(&b, c, 2000, 4), 0);
    }

    #[test]
    fn undersized_constant_is_caught() {
        let g = GasParams::new(2.0).unwrap();
        let b = StateBox::new(0.5, 2.0, 1.0, g).unwrap();
        let st = sample_box(&b, 1.0, 20_000, 5);
        assert!(st.domination_violations > 0);
    }

    #[test]
    fn identity_at_gamma_two() {
        assert!(gamma2_identity_error(10_000, 0) <= 1e-12);
    }
}
