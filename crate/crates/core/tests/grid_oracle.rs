use locrel::gas::{lemma_constant_grid, rel_energy_density, rel_energy_flux, GasParams, PrimitiveState, StateBox};

/// Exhaustive search of `1.05·max |B|/A` built only on the public density and
/// flux functions, on cell midpoints rather than endpoints.
fn oracle(b: &StateBox, n: usize) -> f64 {
    let g = b.gas();
    let mid = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
    let mut best = 0.0_f64;
    for i in 0..n {
        let r = mid(b.r_lo(), b.r_hi(), i);
        for j in 0..n {
            let rho = mid(b.r_lo(), b.r_hi(), j);
            for k in 0..n {
                let u = mid(0.0, b.v_max(), k);
                for l in 0..n {
                    let s = mid(0.0, b.v_max(), l);
                    for big_u in [s, -s] {
                        let strong = PrimitiveState::new(r, [big_u]).unwrap();
                        let weak = PrimitiveState::new(rho, [u]).unwrap();
                        let a = rel_energy_density(&strong, &weak, g);
                        if a > 1e-14 {
                            best = best.max(rel_energy_flux(&strong, &weak, g)[0].abs() / a);
                        }
                    }
                }
            }
        }
    }
    1.05 * best
}

#[test]
fn grid_constant_matches_exhaustive_oracle() {
    let b = StateBox::new(0.5, 2.0, 1.0, GasParams::new(2.0).unwrap()).unwrap();
    let c = lemma_constant_grid(&b, 1, 64).unwrap();
    let o = oracle(&b, 256);
    assert!((c - o).abs() <= 0.02 * o, "grid {c} vs oracle {o}");
}
