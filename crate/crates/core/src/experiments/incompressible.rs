use std::fmt::Write as _;

use super::{Criterion, Experiment, Report};
use crate::config::{ExperimentConfig, IncompressiblePair};
use crate::cutoff::{RadialBump, TransportedCutoff};
use crate::diagnostics::incompressible_gronwall;
use crate::error::Result;
use crate::exact::{residual_check, IncompressibleSolution2D as Sol, ShearProfile};

/// `(weakish, strong, cutoff)` for a named pair. Each cutoff stays where the
/// two fields coincide for all times considered.
pub fn pair_setup(p: IncompressiblePair) -> Result<(Sol, Sol, TransportedCutoff<2>)> {
    Ok(match p {
        IncompressiblePair::VortexRest => (
            Sol::Vortex { center: [0.0, 0.0] },
            Sol::Rest,
            TransportedCutoff::new(RadialBump::new([2.6, 0.0], 1.5)?, 1.0)?,
        ),
        IncompressiblePair::ShearShear => (
            Sol::Shear(ShearProfile {
                slope: 1.0,
                bend: 0.5,
                strip: 1.0,
            }),
            Sol::Shear(ShearProfile::linear(1.0)),
            TransportedCutoff::new(RadialBump::new([0.0, 0.0], 0.9)?, 0.5)?,
        ),
        IncompressiblePair::TranslatingVortex => (
            Sol::TranslatingVortex {
                center: [0.0, 0.0],
                velocity: [1.0, 0.0],
            },
            Sol::Uniform { velocity: [1.0, 0.0] },
            TransportedCutoff::new(RadialBump::new([-1.5, 1.8], 1.0)?, 0.5)?,
        ),
    })
}

fn pair_name(p: IncompressiblePair) -> &'static str {
    match p {
        IncompressiblePair::VortexRest => "vortex-rest",
        IncompressiblePair::ShearShear => "shear-shear",
        IncompressiblePair::TranslatingVortex => "translating-vortex",
    }
}

pub struct Incompressible;

impl Experiment for Incompressible {
    fn name(&self) -> &'static str {
        "incompressible"
    }

    fn summary(&self) -> &'static str {
        "localized energy inequality for exact incompressible pairs"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let inc = cfg.require(&cfg.incompressible, "incompressible")?;
        let tol = cfg.tolerances;
        let mut r = Report::default();
        let mut csv = String::from("pair,tau,lhs,rhs\n");
        for (k, &p) in inc.pairs.iter().enumerate() {
            let name = pair_name(p);
            let (weakish, strong, cutoff) = pair_setup(p)?;
            let seed = cfg.seed.wrapping_add(2 * k as u64);
            let exact = residual_check(&weakish, inc.samples, seed).max(residual_check(&strong, inc.samples, seed + 1));
            r.criteria.push(Criterion::at_most(format!("{name}.exactness"), exact, tol.exactness));
            for &tau in &inc.taus {
                let (lhs, rhs) = incompressible_gronwall(&weakish, &strong, &cutoff, tau, inc.quad_n)?;
                r.criteria.push(Criterion::at_most(format!("{name}.tau{tau}"), lhs - rhs, tol.incompressible));
                let _ = writeln!(csv, "{name},{tau:?},{lhs:?},{rhs:?}");
            }
        }
        r.file("incompressible.csv", csv);
        Ok(r)
    }
}
