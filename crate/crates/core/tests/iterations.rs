use std::f64::consts::PI;

use pint_gfm_core::discretization::NodeFamily;
use pint_gfm_core::iterations::{
    build_iteration, check_consistency, global_iteration_matrix, matrix_diagnostics, run,
    run_overlap_parareal, InitialGuess, Method, PararealCoarse, PrimaryBlockIteration,
};
use pint_gfm_core::linalg::{c64, ComplexMatrix, Lu};
use pint_gfm_core::operators::{
    build_single_level, build_two_level, Approximation, Integrator, RkFormulation, RkMethod,
    TwoLevelSetup,
};
use pint_gfm_core::{Complex64, Error};

const ALL_METHODS: [Method; 9] = [
    Method::DampedBlockJacobi { omega: 0.7 },
    Method::ApproxBlockJacobi,
    Method::ApproxBlockGaussSeidel,
    Method::Parareal {
        coarse: PararealCoarse::Approximate,
    },
    Method::Parareal {
        coarse: PararealCoarse::CoarseLevel,
    },
    Method::Tmg { omega: 1.0 },
    Method::Tmg { omega: 0.6 },
    Method::TmgFine,
    Method::TmgCoarse,
];

fn u0() -> Complex64 {
    c64(1.0, 0.0)
}

fn lobatto(m: usize) -> Integrator {
    Integrator::Collocation {
        family: NodeFamily::LobattoLegendre,
        nodes: m,
    }
}

fn fig6_left() -> TwoLevelSetup {
    let lam_dt = c64(-0.2, 2.0) * (2.0 * PI / 10.0);
    build_two_level(&lobatto(5), &lobatto(3), Some(&Approximation::QDeltaBackwardEuler), lam_dt).unwrap()
}

fn fig2(lambda: Complex64) -> TwoLevelSetup {
    let fine = Integrator::RungeKutta {
        method: RkMethod::ClassicRk4,
        steps: 10,
        formulation: RkFormulation::Interface,
    };
    let approx = Approximation::RungeKutta {
        method: RkMethod::BackwardEuler,
        steps: Some(2),
    };
    build_single_level(&fine, Some(&approx), lambda * (2.0 * PI / 10.0)).unwrap()
}

fn max_diff(a: &[Vec<Vec<Complex64>>], b: &[Vec<Vec<Complex64>>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

#[test]
fn builder_examples() {
    let setup = fig6_left();
    let m = setup.dim();
    let bj = build_iteration(&Method::DampedBlockJacobi { omega: 1.0 }, &setup).unwrap();
    assert!(bj.same_block_prev_iter.is_zero());
    assert!(bj.prev_block_prev_iter.max_abs_diff(setup.fine.psi()) < 1e-15);

    let exact = TwoLevelSetup::single_level(setup.fine.clone(), Some(setup.fine.phi_factored().clone()));
    let bgs = build_iteration(&Method::ApproxBlockGaussSeidel, &exact).unwrap();
    assert!(bgs.same_block_prev_iter.max_abs() < 1e-13);
    assert!(bgs.prev_block_curr_iter.max_abs_diff(setup.fine.psi()) < 1e-13);

    let tmg = build_iteration(&Method::Tmg { omega: 1.0 }, &setup).unwrap();
    let para = build_iteration(
        &Method::Parareal {
            coarse: PararealCoarse::CoarseLevel,
        },
        &setup,
    )
    .unwrap();
    assert!(tmg.same_block_prev_iter.max_abs() < 1e-12);
    assert!(tmg.prev_block_curr_iter.max_abs_diff(&para.prev_block_curr_iter) < 1e-12);
    assert!(tmg.prev_block_prev_iter.max_abs_diff(&para.prev_block_prev_iter) < 1e-12);
    assert_eq!(tmg.dim(), m);
}

#[test]
fn every_method_is_consistent() {
    let setup = fig6_left();
    for method in ALL_METHODS.iter().chain([Method::Pfasst].iter()) {
        let it = build_iteration(method, &setup).unwrap();
        assert!(check_consistency(&it) <= 1e-12, "{method}");
    }
}

#[test]
fn missing_operators_are_reported() {
    let setup = fig2(c64(0.0, 1.0));
    assert!(matches!(
        build_iteration(&Method::Pfasst, &setup),
        Err(Error::MissingOperator { .. })
    ));
    let bare = TwoLevelSetup::single_level(setup.fine.clone(), None);
    assert!(matches!(
        build_iteration(&Method::ApproxBlockJacobi, &bare),
        Err(Error::MissingOperator { .. })
    ));
    assert!(build_iteration(&Method::DampedBlockJacobi { omega: 3.0 }, &bare).is_err());
}

#[test]
fn consistency_detects_perturbation() {
    let setup = fig6_left();
    let it = build_iteration(&Method::ApproxBlockJacobi, &setup).unwrap();
    let mut b00 = it.prev_block_prev_iter.clone();
    b00[(0, 0)] += c64(0.1, 0.0);
    let bad = PrimaryBlockIteration::new_unchecked(
        "perturbed",
        it.same_block_prev_iter.clone(),
        it.prev_block_curr_iter.clone(),
        b00.clone(),
        it.psi.clone(),
    )
    .unwrap();
    assert!(check_consistency(&bad) >= 0.1 - 1e-12);
    assert!(matches!(
        PrimaryBlockIteration::new(
            "perturbed",
            it.same_block_prev_iter.clone(),
            it.prev_block_curr_iter.clone(),
            b00,
            it.psi.clone()
        ),
        Err(Error::Inconsistent { .. })
    ));
}

#[test]
fn parareal_is_consistent_for_any_coarse_propagator() {
    let setup = fig6_left();
    let approx = setup.fine_approx.as_ref().unwrap();
    let g = approx.solve(setup.fine.chi()).scale(c64(0.5, 0.0));
    let psi = setup.fine.psi().clone();
    let it = PrimaryBlockIteration::new(
        "half-coarse parareal",
        ComplexMatrix::zeros(5, 5),
        g.clone(),
        &psi - &g,
        psi,
    )
    .unwrap();
    assert!(check_consistency(&it) <= 1e-12);
}

#[test]
fn contractive_methods_reach_the_fixed_point() {
    let setup = fig6_left();
    for method in [Method::ApproxBlockGaussSeidel, Method::Tmg { omega: 1.0 }, Method::Pfasst] {
        let it = build_iteration(&method, &setup).unwrap();
        let r = run(&it, u0(), 10, 50, &InitialGuess::Random { seed: 3 }).unwrap();
        assert!(r.volume_errors[50][10] < 1e-10, "{method}: {}", r.volume_errors[50][10]);
    }
}

#[test]
fn parareal_terminates_after_n_iterations() {
    for lambda in [c64(0.0, 1.0), c64(-1.0, 0.0)] {
        let it = build_iteration(
            &Method::Parareal {
                coarse: PararealCoarse::Approximate,
            },
            &fig2(lambda),
        )
        .unwrap();
        let r = run(&it, u0(), 10, 12, &InitialGuess::Random { seed: 11 }).unwrap();
        for k in 0..=12 {
            for n in 0..=k.min(10) {
                assert!(r.volume_errors[k][n] <= 1e-12, "λ={lambda} k={k} n={n}");
            }
        }
        assert!(r.volume_errors.iter().all(|row| row[0] == 0.0));
    }
}

#[test]
fn exact_block_gauss_seidel_converges_in_one_sweep() {
    let setup = fig6_left();
    let exact = TwoLevelSetup::single_level(setup.fine.clone(), Some(setup.fine.phi_factored().clone()));
    let it = build_iteration(&Method::ApproxBlockGaussSeidel, &exact).unwrap();
    let r = run(&it, u0(), 10, 2, &InitialGuess::Random { seed: 5 }).unwrap();
    assert!(r.volume_errors[1].iter().all(|e| *e <= 1e-12));
}

#[test]
fn initial_guess_variants() {
    let setup = fig2(c64(0.0, 1.0));
    let it = build_iteration(&Method::ApproxBlockJacobi, &setup).unwrap();
    let zero = run(&it, u0(), 4, 0, &InitialGuess::Zero).unwrap();
    assert!(zero.iterates[0][1..].iter().flatten().all(|v| *v == c64(0.0, 0.0)));
    let exact = run(&it, u0(), 4, 0, &InitialGuess::Propagated(setup.fine.psi().clone())).unwrap();
    assert!(exact.initial_volume_error() < 1e-14);
    let a = run(&it, u0(), 4, 0, &InitialGuess::Random { seed: 9 }).unwrap();
    let b = run(&it, u0(), 4, 0, &InitialGuess::Random { seed: 9 }).unwrap();
    assert_eq!(max_diff(&a.iterates, &b.iterates), 0.0);
    for v in a.iterates[0][1..].iter().flatten() {
        assert!((0.0..1.0).contains(&v.re) && (0.0..1.0).contains(&v.im));
    }
    assert!(run(&it, u0(), 0, 3, &InitialGuess::Zero).is_err());
}

#[test]
fn engine_is_deterministic_and_fixed_point_is_stationary() {
    let setup = fig6_left();
    for method in ALL_METHODS.iter().chain([Method::Pfasst].iter()) {
        let it = build_iteration(method, &setup).unwrap();
        let r = run(&it, u0(), 6, 4, &InitialGuess::Random { seed: 1 }).unwrap();
        for k in 0..4 {
            for n in 0..6 {
                let again = it.update(&r.iterates[k][n + 1], &r.iterates[k + 1][n], &r.iterates[k][n]);
                let diff = again
                    .iter()
                    .zip(&r.iterates[k + 1][n + 1])
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(diff <= 1e-13, "{method} k={k} n={n}");
            }
        }
        let u = &r.fixed_point;
        for n in 0..6 {
            let next = it.update(&u[n + 1], &u[n], &u[n]);
            let residual = next
                .iter()
                .zip(&u[n + 1])
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(residual <= 1e-12, "{method} n={n}");
        }
    }
}

#[test]
fn tmg_and_parareal_iterates_coincide() {
    let setup = fig6_left();
    let tmg = build_iteration(&Method::Tmg { omega: 1.0 }, &setup).unwrap();
    let para = build_iteration(
        &Method::Parareal {
            coarse: PararealCoarse::CoarseLevel,
        },
        &setup,
    )
    .unwrap();
    let init = InitialGuess::Random { seed: 42 };
    let a = run(&tmg, u0(), 10, 15, &init).unwrap();
    let b = run(&para, u0(), 10, 15, &init).unwrap();
    assert!(max_diff(&a.iterates, &b.iterates) <= 1e-12);
}

#[test]
fn overlap_parareal_examples() {
    let setup = fig2(c64(0.0, 1.0));
    let f = setup.fine.psi().clone();
    let g = setup.fine_approx.as_ref().unwrap().solve(setup.fine.chi());
    let init = InitialGuess::Random { seed: 2 };
    let r = run_overlap_parareal(&f, &g, u0(), 10, 7, &init).unwrap();
    for n in 0..=10 {
        assert!(r.volume_errors[6][n] <= 1e-12, "n={n}");
    }
    let exact = run_overlap_parareal(&f, &f, u0(), 10, 1, &init).unwrap();
    assert!(exact.volume_errors[1].iter().all(|e| *e <= 1e-12));
    let zero = ComplexMatrix::zeros(1, 1);
    let r = run_overlap_parareal(&f, &zero, u0(), 10, 6, &init).unwrap();
    for k in 0..=6 {
        for n in 0..=10 {
            if k >= (n as usize).div_ceil(2) {
                assert!(r.volume_errors[k][n] <= 1e-12, "G=0 k={k} n={n}");
            }
        }
    }
}

/// `I − M⁻¹A` for Parareal assembled from the all-at-once system `A` and the
/// preconditioner `M` with `−φG` below the diagonal.
fn parareal_reference_matrix(setup: &TwoLevelSetup, g: &ComplexMatrix, n_blocks: usize) -> ComplexMatrix {
    let m = setup.dim();
    let size = m * n_blocks;
    let mut a = ComplexMatrix::zeros(size, size);
    let mut p = ComplexMatrix::zeros(size, size);
    let phi_g = setup.fine.phi() * g;
    for b in 0..n_blocks {
        for i in 0..m {
            for j in 0..m {
                a[(b * m + i, b * m + j)] = setup.fine.phi()[(i, j)];
                p[(b * m + i, b * m + j)] = setup.fine.phi()[(i, j)];
                if b > 0 {
                    a[((b) * m + i, (b - 1) * m + j)] = -setup.fine.chi()[(i, j)];
                    p[((b) * m + i, (b - 1) * m + j)] = -phi_g[(i, j)];
                }
            }
        }
    }
    let solved = Lu::new(&p).unwrap().solve(&a);
    &ComplexMatrix::identity(size) - &solved
}

#[test]
fn global_matrix_matches_preconditioned_system() {
    let setup = fig6_left();
    let it = build_iteration(
        &Method::Parareal {
            coarse: PararealCoarse::Approximate,
        },
        &setup,
    )
    .unwrap();
    let r = global_iteration_matrix(&it, 6).unwrap();
    let reference = parareal_reference_matrix(&setup, &it.prev_block_curr_iter, 6);
    assert!(r.max_abs_diff(&reference) < 1e-12);
    for b in 0..6 {
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(r[(b * 5 + i, b * 5 + j)], c64(0.0, 0.0));
            }
        }
    }
    assert_eq!(matrix_diagnostics(&r).spectral_radius_estimate, 0.0);
}

#[test]
fn global_matrix_examples() {
    let setup = fig6_left();
    let it = build_iteration(&Method::Pfasst, &setup).unwrap();
    let single = global_iteration_matrix(&it, 1).unwrap();
    assert!(single.max_abs_diff(&it.same_block_prev_iter) == 0.0);

    let bj = build_iteration(&Method::DampedBlockJacobi { omega: 1.0 }, &setup).unwrap();
    let r = global_iteration_matrix(&bj, 4).unwrap();
    let mut power = r.clone();
    for _ in 1..4 {
        power = &power * &r;
    }
    assert!(power.max_abs() <= 1e-12);

    assert!(matches!(
        global_iteration_matrix(&bj, 1000),
        Err(Error::TooLarge { .. })
    ));
}

#[test]
fn linear_bound_dominates_runs() {
    let setup = fig6_left();
    for method in ALL_METHODS.iter().chain([Method::Pfasst].iter()) {
        let it = build_iteration(method, &setup).unwrap();
        let r = run(&it, u0(), 8, 10, &InitialGuess::Random { seed: 4 }).unwrap();
        let norm = global_iteration_matrix(&it, 8).unwrap().inf_norm();
        let delta = r.initial_volume_error();
        for k in 0..=10 {
            for n in 0..=8 {
                assert!(r.volume_errors[k][n] <= norm.powi(k as i32) * delta + 1e-10, "{method}");
            }
        }
    }
}
