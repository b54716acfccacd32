//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use tc_core::closed_form::{
    assemble_propagator, b_power_check, block_propagator, full_evolution, FormulaVariant, Spectral3, Spectral4,
};
use tc_core::decomposition::{block_diagonalize, Spin, SpinDecomposition};
use tc_core::operators::{
    collective_spin, commutator, excitation_operator, hamiltonian, interaction_a, masked_max_abs, max_abs, Basis,
    ModelParams,
};
use tc_core::oracle::{contained_deviation, oracle_propagator};
use tc_core::simulator::{evolve, FieldSpec, InitialSpec, SimConfig, TimeGrid, TimeUnits};

const TAUS: [f64; 3] = [0.1, 1.0, 5.0];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: String) -> Outcome {
    Outcome { passed, summary }
}

fn unitary_defect(u: &DMatrix<C64>, basis: &Basis) -> f64 {
    let mask = basis.contained_indices();
    let d = u.adjoint() * u - DMatrix::<C64>::identity(u.nrows(), u.ncols());
    masked_max_abs(&d, &mask, &mask)
}

fn oracle_equivalence() -> Outcome {
    let nmax = 16;
    let mut worst = 0.0f64;
    let mut at = String::new();
    for n in 1..=4 {
        let basis = Basis::new(n, nmax).unwrap();
        for tau in TAUS {
            let closed = assemble_propagator(n, tau, 1.0, nmax).unwrap();
            let exact = oracle_propagator(n, tau, 1.0, nmax).unwrap();
            let dev = contained_deviation(&basis, &closed, &exact);
            if dev.max_dev >= worst {
                worst = dev.max_dev;
                at = format!("n={n} tau={tau}");
            }
        }
    }
    outcome(worst < 1e-10, format!("max deviation {worst:.2e} ({at}), limit 1e-10"))
}

fn unitarity() -> Outcome {
    let nmax = 16;
    let mut worst = 0.0f64;
    for n in 1..=4 {
        let p = ModelParams::resonant(n, 1.3, 1.0, nmax);
        for tau in TAUS {
            worst = worst.max(unitary_defect(&full_evolution(&p, tau).unwrap(), &p.basis()));
        }
    }
    outcome(worst < 1e-10, format!("max |U'U - 1| {worst:.2e}, limit 1e-10"))
}

fn block_diagonalization() -> Outcome {
    let expected: [(usize, Vec<u32>); 3] = [(2, vec![0, 2]), (3, vec![1, 1, 3]), (4, vec![0, 2, 0, 2, 2, 4])];
    let mut residual = 0.0f64;
    let mut block_err = 0.0f64;
    let mut spins_ok = true;
    for (n, twice) in expected {
        let dec = SpinDecomposition::new(n).unwrap();
        spins_ok &= dec.spins().iter().map(|s| s.twice()).collect::<Vec<_>>() == twice;
        for nmax in [4, 16, 64] {
            let bd = block_diagonalize(&interaction_a(n, nmax).unwrap(), &dec, nmax).unwrap();
            residual = residual.max(bd.residual);
            block_err = bd.block_errors(&dec, nmax).unwrap().into_iter().fold(block_err, f64::max);
        }
    }
    outcome(
        residual < 1e-13 && block_err < 1e-13 && spins_ok,
        format!(
            "off-block {residual:.2e}, block vs B_j {block_err:.2e}, spin multisets {}",
            if spins_ok { "match" } else { "differ" }
        ),
    )
}

fn power_lemma() -> Outcome {
    let nmax = 24;
    let mut worst = 0.0f64;
    for j in [Spin::ONE, Spin::THREE_HALVES] {
        for p in 0..=7 {
            worst = worst.max(b_power_check(j, p, nmax).unwrap());
        }
    }
    outcome(worst < 1e-12, format!("max relative deviation {worst:.2e} over p<=7, limit 1e-12"))
}

fn schrodinger_residual() -> Outcome {
    let h = 1e-4;
    let t = 0.7;
    let mut worst = 0.0f64;
    for n in [1, 4] {
        // the O(h²) term scales with ‖H‖³, so the cutoff stays moderate
        let p = ModelParams::resonant(n, 1.0, 0.8, 6);
        let mask = p.basis().contained_indices();
        let du = (full_evolution(&p, t + h).unwrap() - full_evolution(&p, t - h).unwrap()) / C64::from(2.0 * h);
        let residual = du * C64::i() - hamiltonian(&p).unwrap() * full_evolution(&p, t).unwrap();
        worst = worst.max(masked_max_abs(&residual, &mask, &mask));
    }
    outcome(worst < 1e-6, format!("max |i dU/dt - HU| {worst:.2e} at h=1e-4, limit 1e-6"))
}

fn su2_and_conservation() -> Outcome {
    let mut su2 = 0.0f64;
    let mut comm = 0.0f64;
    for n in 1..=4 {
        let s = collective_spin(n).unwrap();
        su2 = su2
            .max(max_abs(&(commutator(&s.plus, &s.minus) - &s.three * C64::from(2.0))))
            .max(max_abs(&(commutator(&s.three, &s.plus) - &s.plus)))
            .max(max_abs(&(commutator(&s.three, &s.minus) + &s.minus)));
        let nmax = 16;
        let mask = Basis::new(n, nmax).unwrap().contained_indices();
        let c = commutator(&interaction_a(n, nmax).unwrap(), &excitation_operator(n, nmax).unwrap());
        comm = comm.max(masked_max_abs(&c, &mask, &mask));
    }
    outcome(su2 == 0.0 && comm < 1e-13, format!("su(2) defect {su2:e} (exact), [A,E] {comm:.2e}, limit 1e-13"))
}

fn group_law() -> Outcome {
    let (t1, t2) = (0.7, 1.9);
    let mut composition = 0.0f64;
    let mut reversal = 0.0f64;
    for n in 1..=4 {
        let p = ModelParams::resonant(n, 1.1, 0.9, 16);
        let mask = p.basis().contained_indices();
        let u1 = full_evolution(&p, t1).unwrap();
        let u2 = full_evolution(&p, t2).unwrap();
        let u12 = full_evolution(&p, t1 + t2).unwrap();
        composition = composition.max(masked_max_abs(&(&u1 * &u2 - u12), &mask, &mask));
        let back = full_evolution(&p, -t1).unwrap();
        reversal = reversal.max(masked_max_abs(&(back - u1.adjoint()), &mask, &mask));
    }
    outcome(
        composition < 1e-9 && reversal < 1e-12,
        format!("U(t1)U(t2)-U(t1+t2) {composition:.2e} (1e-9), U(-t)-U(t)' {reversal:.2e} (1e-12)"),
    )
}

fn reality() -> Outcome {
    let nmax = 32;
    let mut worst = 0.0f64;
    let mut count = 0usize;
    let mut negative_three = false;
    let mut negative_four = false;
    let mut removable = false;
    for twice in 1..=4 {
        let j = Spin::from_twice(twice);
        for tau in TAUS {
            for s in block_propagator(j, tau, FormulaVariant::Corrected).unwrap().reached_coefficients(nmax) {
                // odd entries carry the factor −i of the sine series; the spectral part is real
                let phase = if (s.row + s.col) % 2 == 1 { C64::i() } else { C64::from(1.0) };
                worst = worst.max((s.value * phase).im.abs());
                count += 1;
                negative_three |= twice == 3 && s.argument == 0;
                negative_four |= twice == 4 && s.argument == 0;
                removable |= twice == 3 && s.argument == 1;
            }
        }
    }
    let branch_points = Spectral3::at(0).lambda_minus < 0.0
        && Spectral4::at(0).lambda_minus < 0.0
        && Spectral3::at(1).lambda_minus == 0.0;
    let covered = negative_three && negative_four && removable && branch_points;
    outcome(
        worst < 1e-12 && covered,
        format!(
            "max |Im| {worst:.2e} over {count} evaluations, N=0 and lambda=0 points {}",
            if covered { "reached" } else { "missing" }
        ),
    )
}

fn simulation_sanity() -> Outcome {
    let g = 1.0;
    let rabi = SimConfig {
        model: ModelParams::resonant(1, 2.0, g, 2),
        time: TimeGrid { start: 0.0, end: 20.0, dt: 0.02, units: TimeUnits::Absolute },
        initial: InitialSpec { atoms: "u".into(), field: FieldSpec::Fock(0) },
        ..SimConfig::default()
    };
    let rabi_dev = evolve(&rabi)
        .unwrap()
        .records
        .iter()
        .map(|r| (r.s3 - 0.5 * (2.0 * g * r.t).cos()).abs())
        .fold(0.0, f64::max);

    let mut norm_dev = 0.0f64;
    let mut energy_dev = 0.0f64;
    let mut points = 0;
    for (n, atoms, alpha) in [(1, "u", 3.0), (4, "udud", 2.0)] {
        let coherent = SimConfig {
            model: ModelParams::resonant(n, 1.0, g, 0),
            time: TimeGrid { start: 0.0, end: 49.95, dt: 0.05, units: TimeUnits::Absolute },
            initial: InitialSpec { atoms: atoms.into(), field: FieldSpec::Coherent(alpha) },
            auto_nmax: true,
            ..SimConfig::default()
        };
        let records = evolve(&coherent).unwrap().records;
        points = records.len();
        let e0 = records[0].excitation();
        for r in &records {
            norm_dev = norm_dev.max(r.norm_deficit);
            energy_dev = energy_dev.max((r.excitation() - e0).abs());
        }
    }
    outcome(
        rabi_dev < 1e-10 && norm_dev < 1e-10 && energy_dev < 1e-10 && points == 1000,
        format!(
            "vacuum Rabi {rabi_dev:.2e}, norm drift {norm_dev:.2e}, <E> drift {energy_dev:.2e} over {points} points, limit 1e-10"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("unitarity", unitarity),
        ("block diagonalization", block_diagonalization),
        ("power formulas", power_lemma),
        ("Schrodinger residual", schrodinger_residual),
        ("su(2) and excitation conservation", su2_and_conservation),
        ("group law and time reversal", group_law),
        ("reality of coefficients", reality),
        ("simulation sanity", simulation_sanity),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        failed += usize::from(!o.passed);
        println!(
            "{} {}. {name}: {} [{:.2}s]",
            if o.passed { "PASS" } else { "FAIL" },
            k + 1,
            o.summary,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
