use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use tc_core::closed_form::{block_propagator, FormulaVariant, Propagator};
use tc_core::decomposition::Spin;
use tc_core::operators::{masked_max_abs, Basis};
use tc_core::simulator::{build_initial_state, FieldSpec, InitialSpec};

fn random_state(dim: usize, seed: &[f64]) -> DVector<C64> {
    let v = DVector::from_fn(dim, |i, _| {
        let a = seed[i % seed.len()] + i as f64;
        C64::new(a.sin(), (1.7 * a).cos())
    });
    let norm = v.norm();
    v / C64::from(norm)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn composition_and_inverse(n in 1usize..=4, t1 in -6.0f64..6.0, t2 in -6.0f64..6.0) {
        let nmax = 8;
        let p = Propagator::new(n, nmax).unwrap();
        let mask = Basis::new(n, nmax).unwrap().contained_indices();
        let u1 = p.interaction(t1).unwrap();
        let u2 = p.interaction(t2).unwrap();
        let u12 = p.interaction(t1 + t2).unwrap();
        prop_assert!(masked_max_abs(&(&u1 * &u2 - u12), &mask, &mask) < 1e-9);
        let id = DMatrix::<C64>::identity(u1.nrows(), u1.ncols());
        prop_assert!(masked_max_abs(&(u1.adjoint() * &u1 - id), &mask, &mask) < 1e-10);
    }

    #[test]
    fn state_application_matches_dense(n in 1usize..=4, tau in -8.0f64..8.0, seed in prop::collection::vec(-3.0f64..3.0, 4)) {
        let nmax = 7;
        let p = Propagator::new(n, nmax).unwrap();
        let psi = random_state(p.basis.dim(), &seed);
        let dense = p.interaction(tau).unwrap() * &psi;
        let direct = p.apply_interaction(tau, &psi).unwrap();
        prop_assert!((dense - direct).camax() < 1e-12);
    }

    #[test]
    fn blocks_are_unitary_on_contained_columns(twice in 1u32..=4, tau in -10.0f64..10.0) {
        let nmax = 12;
        let j = Spin::from_twice(twice);
        let u = block_propagator(j, tau, FormulaVariant::Corrected).unwrap().materialize(nmax);
        let p = nmax + 1;
        let top = twice as usize;
        let cols: Vec<usize> = (0..j.dim())
            .flat_map(|r| (0..=nmax).filter(move |&m| top - r + m <= nmax).map(move |m| r * p + m))
            .collect();
        let id = DMatrix::<C64>::identity(u.nrows(), u.ncols());
        prop_assert!(masked_max_abs(&(u.adjoint() * &u - id), &cols, &cols) < 1e-10);
    }

    #[test]
    fn excitation_weights_are_conserved(n in 1usize..=4, tau in 0.0f64..20.0, seed in prop::collection::vec(-3.0f64..3.0, 3)) {
        let nmax = 6;
        let p = Propagator::new(n, nmax).unwrap();
        let basis = p.basis;
        let mut psi = random_state(basis.dim(), &seed);
        for i in 0..basis.dim() {
            if !basis.sector_contained(i) {
                psi[i] = C64::from(0.0);
            }
        }
        let out = p.apply_full(1.0, 1.0, tau, &psi).unwrap();
        for e in 0..=nmax {
            let weight = |v: &DVector<C64>| -> f64 {
                (0..basis.dim()).filter(|&i| basis.excitation(i) == e).map(|i| v[i].norm_sqr()).sum()
            };
            prop_assert!((weight(&psi) - weight(&out)).abs() < 1e-12);
        }
    }

    #[test]
    fn coherent_states_are_normalised(alpha in 0.0f64..5.0, extra in 0usize..10) {
        let field = FieldSpec::Coherent(alpha);
        let nmax = field.required_nmax() + extra;
        let s = build_initial_state(&InitialSpec { atoms: "du".into(), field }, 2, nmax).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-14);
        prop_assert!((s.mean_photons() - alpha * alpha).abs() < 1e-8 * (1.0 + alpha * alpha));
    }
}
