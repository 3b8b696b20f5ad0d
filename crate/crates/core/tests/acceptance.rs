//! Exit criteria. Each criterion prints one PASS/FAIL line; the process exits
//! nonzero when any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use locrel::config::ExperimentConfig;
use locrel::cutoff::{RadialBump, TransportedCutoff};
use locrel::experiments::lemma::{gamma2_identity_error, sample_box};
use locrel::experiments::{Registry, Report};
use locrel::gas::{GasParams, StateBox};

struct Outcome {
    passed: bool,
    detail: String,
}

fn config(file: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(file);
    ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{file}: {e}"))
}

fn run(file: &str) -> Report {
    let cfg = config(file);
    Registry::builtin().run(&cfg).unwrap_or_else(|e| panic!("{file}: {e}"))
}

fn failing(r: &Report) -> Vec<String> {
    r.criteria
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} = {:e} (bound {:e})", c.name, c.value, c.bound))
        .collect()
}

fn nonnegativity() -> Outcome {
    let cases = [(1.4, 0.01), (2.0, 0.0), (3.0, 0.0)];
    let mut detail = Vec::new();
    let mut passed = true;
    for (k, (gamma, r_lo)) in cases.into_iter().enumerate() {
        let g = GasParams::new(gamma).unwrap();
        let b = StateBox::new(r_lo, 10.0, 5.0, g).unwrap();
        let st = sample_box(&b, f64::INFINITY, 1_000_000, k as u64);
        passed &= st.negative == 0 && st.identification_failures == 0;
        detail.push(format!("γ={gamma}: min A {:.2e}, {} below −1e-12", st.min_a, st.negative));
    }
    let id = gamma2_identity_error(1_000_000, 7);
    passed &= id <= 1e-12;
    detail.push(format!("γ=2 identity error {id:.2e}"));
    Outcome {
        passed,
        detail: detail.join("; "),
    }
}

fn flux_domination() -> Outcome {
    let cfg = config("lemma-sweep.toml");
    let lemma = cfg.lemma.as_ref().unwrap();
    assert_eq!(cfg.gamma, 2.0);
    assert_eq!(lemma.samples, 1_000_000);
    let mut boxes = vec![[0.5, 2.0, 1.0]];
    boxes.extend(lemma.boxes.iter().copied());
    assert_eq!(boxes, vec![[0.5, 2.0, 1.0], [0.0, 2.0, 1.0], [0.9, 1.1, 0.2]]);
    let r = Registry::builtin().run(&cfg).unwrap();
    let bad = failing(&r);
    Outcome {
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{} checks over 3 boxes, zero violations", r.criteria.len())
        } else {
            bad.join("; ")
        },
    }
}

fn admissibility() -> Outcome {
    let mut detail = Vec::new();
    let mut passed = true;
    for file in ["simulate.toml", "simulate-shock.toml"] {
        let cfg = config(file);
        let s = cfg.solver.unwrap();
        assert_eq!((cfg.gamma, cfg.grid.as_ref().unwrap().n_cells, s.cfl), (2.0, 400, 0.45));
        let r = run(file);
        passed &= r.passed();
        let prod = r.criterion("energy_production").unwrap().value;
        let mass = r.criterion("mass_drift").unwrap().value;
        let growth = r.criterion("energy_growth").unwrap().value;
        detail.push(format!("{file}: production {prod:.2e}, mass {mass:.2e}, energy step {growth:.2e}"));
    }
    Outcome {
        passed,
        detail: detail.join("; "),
    }
}

fn gronwall() -> Outcome {
    let mut detail = Vec::new();
    let mut passed = true;
    for file in ["gronwall-constant.toml", "gronwall.toml"] {
        let cfg = config(file);
        assert_eq!(cfg.gronwall.as_ref().unwrap().resolutions, vec![200, 400, 800]);
        let r = run(file);
        passed &= r.passed();
        let res = r.criterion("residual_finest").unwrap().value;
        let mono = r.criterion("deficit_monotone").unwrap();
        detail.push(format!(
            "{file}: worst residual/max lhs {res:.2e} at N=800, deficit monotone {}",
            mono.passed
        ));
    }
    Outcome {
        passed,
        detail: detail.join("; "),
    }
}

fn weak_strong() -> Outcome {
    let cfg = config("weak-strong.toml");
    let uq = cfg.uniqueness.as_ref().unwrap();
    assert_eq!((uq.tau, uq.resolutions.clone()), (0.2, vec![200, 400, 800]));
    let r = run("weak-strong.toml");
    let order = r.criterion("observed_order").unwrap();
    let sign = r.criterion("sign_condition").unwrap();
    let violations = r.criterion("sign_violations").unwrap();
    Outcome {
        passed: order.passed && sign.passed && violations.passed,
        detail: format!(
            "min order {:.3}, orders {}, max (a∂tφ+b∂xφ)/(1+A) {:.2e}",
            order.value,
            r.values["orders"],
            sign.value
        ),
    }
}

fn finite_speed() -> Outcome {
    let cfg = config("finite-speed.toml");
    let fs = cfg.finite_speed.as_ref().unwrap();
    assert_eq!((fs.threshold, fs.resolutions.clone()), (1e-7, vec![400, 800, 1600]));
    assert_eq!(cfg.initial.unwrap().amplitude, 0.01);
    let r = run("finite-speed.toml");
    let detail = fs
        .resolutions
        .iter()
        .map(|n| {
            format!(
                "N={n}: speed {:.4} vs C {:.4} (speed/c₀ {:.4})",
                r.value(&format!("n{n}.speed")).unwrap(),
                r.value(&format!("n{n}.c_grid")).unwrap(),
                r.value(&format!("n{n}.sound_ratio")).unwrap()
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome {
        passed: r.passed(),
        detail,
    }
}

fn incompressible() -> Outcome {
    let cfg = config("incompressible.toml");
    let inc = cfg.incompressible.as_ref().unwrap();
    assert_eq!((inc.quad_n, inc.samples, inc.taus.clone()), (256, 10_000, vec![0.1, 0.5]));
    let r = run("incompressible.toml");
    let bad = failing(&r);
    Outcome {
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{} checks", r.criteria.len())
        } else {
            bad.join("; ")
        },
    }
}

fn cutoff_contract() -> Outcome {
    let eta = 1.0;
    let speed = 1.3;
    let c = TransportedCutoff::new(RadialBump::new([0.0, 0.0], eta).unwrap(), speed).unwrap();
    let (h1, h2) = (1e-3, 5e-4);
    let margin = 4.0 * h1 * (1.0 + speed);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut coarse, mut fine) = (0.0_f64, 0.0_f64);
    for _ in 0..10_000 {
        let t = rng.gen_range(0.0..0.25 * c.lifetime());
        let s = rng.gen_range(0.5 * eta + margin..eta - margin);
        let r = s - speed * t;
        if r <= margin {
            continue;
        }
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        let x = [r * a.cos(), r * a.sin()];
        coarse = coarse.max(c.transport_residual(&x, t, h1).unwrap().abs());
        fine = fine.max(c.transport_residual(&x, t, h2).unwrap().abs());
    }
    let order = (coarse / fine).log2();

    let n = 64;
    let quarter = 0.25 * eta;
    let t_max = eta / (4.0 * speed);
    let mut off = 0usize;
    let mut checked = 0usize;
    for i in 0..n {
        for j in 0..n {
            let x = [-quarter + 2.0 * quarter * i as f64 / (n - 1) as f64, -quarter + 2.0 * quarter * j as f64 / (n - 1) as f64];
            if (x[0] * x[0] + x[1] * x[1]).sqrt() >= quarter {
                continue;
            }
            for k in 0..n {
                let t = t_max * k as f64 / n as f64;
                checked += 1;
                if c.eval(&x, t) != 1.0 {
                    off += 1;
                }
            }
        }
    }
    Outcome {
        passed: order >= 1.9 && off == 0,
        detail: format!(
            "residual max {coarse:.2e} → {fine:.2e}, order {order:.3}; φ ≠ 1 at {off} of {checked} lattice points"
        ),
    }
}

type Check = (&'static str, fn() -> Outcome, u64);

fn main() -> ExitCode {
    let criteria: [Check; 8] = [
        ("relative energy nonnegativity", nonnegativity, 10),
        ("flux domination constant", flux_domination, 60),
        ("solver admissibility", admissibility, 30),
        ("localized Gronwall inequality", gronwall, 120),
        ("local weak-strong uniqueness", weak_strong, 120),
        ("finite propagation speed", finite_speed, 120),
        ("incompressible localized inequality", incompressible, 60),
        ("cutoff contract", cutoff_contract, 10),
    ];
    let mut failures = 0;
    for (k, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(budget);
        let ok = out.passed && in_time;
        if !ok {
            failures += 1;
        }
        println!(
            "criterion {} {} {name}: {} [{:.1}s of {budget}s]",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
