use pint_gfm_core::discretization::{generate_nodes, NodeFamily};
use pint_gfm_core::linalg::c64;
use pint_gfm_core::operators::{
    build_two_level, collocation_pair, qdelta_backward_euler, quadrature_matrix, rk_pair,
    stability_value, Approximation, Integrator, RkFormulation, RkMethod,
};
use pint_gfm_core::{Complex64, Error};

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

#[test]
fn stability_function_examples() {
    assert_eq!(stability_value(RkMethod::ClassicRk4, c64(0.0, 0.0)).unwrap(), c64(1.0, 0.0));
    assert_eq!(stability_value(RkMethod::BackwardEuler, c64(-1.0, 0.0)).unwrap(), c64(0.5, 0.0));
    assert_eq!(stability_value(RkMethod::Heun, c64(0.0, 2.0)).unwrap(), c64(-1.0, 2.0));
    assert!(matches!(
        stability_value(RkMethod::BackwardEuler, c64(1.0, 0.0)),
        Err(Error::Pole { .. })
    ));
}

#[test]
fn collocation_examples() {
    let z = c64(-0.3, 0.8);
    let one = generate_nodes(NodeFamily::Equidistant, 1).unwrap();
    let p = collocation_pair(&one, z).unwrap();
    assert!(close(p.phi()[(0, 0)], c64(1.0, 0.0) - z, 1e-15));
    assert_eq!(p.chi()[(0, 0)], c64(1.0, 0.0));

    let three = generate_nodes(NodeFamily::LobattoLegendre, 3).unwrap();
    let q = quadrature_matrix(&three, c64(0.0, 0.1)).unwrap();
    for (j, w) in [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0].iter().enumerate() {
        assert!(close(q[(2, j)], c64(0.0, 0.1 * w), 1e-15));
    }
    let p = collocation_pair(&three, c64(0.0, 0.0)).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let id = if i == j { 1.0 } else { 0.0 };
            assert_eq!(p.phi()[(i, j)], c64(id, 0.0));
            assert_eq!(p.chi()[(i, j)], c64(if j == 2 { 1.0 } else { 0.0 }, 0.0));
        }
    }
    let open = generate_nodes(NodeFamily::LobattoLegendre, 4).unwrap();
    let v = [c64(1.0, 0.0), c64(2.0, 0.0), c64(3.0, 1.0), c64(-4.0, 2.0)];
    let copied = collocation_pair(&open, z).unwrap().chi().apply(&v);
    assert!(copied.iter().all(|x| *x == v[3]));
}

#[test]
fn qdelta_examples() {
    let z = c64(0.2, -1.1);
    let one = generate_nodes(NodeFamily::Equidistant, 1).unwrap();
    assert_eq!(qdelta_backward_euler(&one, z)[(0, 0)], z);
    let two = generate_nodes(NodeFamily::LobattoLegendre, 2).unwrap();
    let q = qdelta_backward_euler(&two, z);
    assert_eq!([q[(0, 0)], q[(0, 1)], q[(1, 0)]], [c64(0.0, 0.0); 3]);
    assert!(close(q[(1, 1)], z, 1e-15));
    let three = generate_nodes(NodeFamily::Equidistant, 3).unwrap();
    let q = qdelta_backward_euler(&three, z);
    for i in 0..3 {
        for j in 0..3 {
            let expected = if j <= i { z / 3.0 } else { c64(0.0, 0.0) };
            assert!(close(q[(i, j)], expected, 1e-15));
        }
    }
    for family in [NodeFamily::LobattoLegendre, NodeFamily::RadauRight] {
        let d = generate_nodes(family, 7).unwrap();
        let q = qdelta_backward_euler(&d, z);
        for (i, t) in d.nodes().iter().enumerate() {
            let sum: Complex64 = q.row(i).iter().sum();
            assert!(close(sum, z * *t, 1e-12));
        }
    }
}

#[test]
fn rk_examples() {
    let z = c64(0.3, 0.4);
    let p = rk_pair(RkMethod::BackwardEuler, 1, z, RkFormulation::Interface).unwrap();
    assert!(close(p.phi()[(0, 0)], c64(1.0, 0.0) - z, 1e-15));
    assert_eq!(p.chi()[(0, 0)], c64(1.0, 0.0));
    let p = rk_pair(RkMethod::ClassicRk4, 7, c64(0.0, 0.0), RkFormulation::Interface).unwrap();
    assert_eq!(p.phi()[(0, 0)], c64(1.0, 0.0));
}

#[test]
fn rk_formulations_agree_at_interfaces() {
    let u0 = c64(1.0, 0.0);
    let lam_dt = c64(-0.2, 2.0 * std::f64::consts::PI / 10.0);
    for method in [RkMethod::BackwardEuler, RkMethod::Heun, RkMethod::ClassicRk4] {
        for steps in [2, 5, 10] {
            let interface = rk_pair(method, steps, lam_dt, RkFormulation::Interface).unwrap();
            for formulation in [RkFormulation::Volume, RkFormulation::VolumeClosed] {
                let volume = rk_pair(method, steps, lam_dt, formulation).unwrap();
                let mut a = vec![u0];
                let mut b = vec![u0; volume.dim()];
                for _ in 0..10 {
                    a = interface.psi().apply(&a);
                    b = volume.psi().apply(&b);
                    assert!(close(a[0], *b.last().unwrap(), 1e-12), "{method} {steps} {formulation:?}");
                }
            }
        }
    }
}

fn collocation_end_error(m: usize, n_blocks: usize) -> f64 {
    let lambda = c64(-1.0, 1.0);
    let dt = 1.0 / n_blocks as f64;
    let disc = generate_nodes(NodeFamily::LobattoLegendre, m).unwrap();
    let pair = collocation_pair(&disc, lambda * dt).unwrap();
    let mut u = vec![c64(1.0, 0.0); m];
    for _ in 0..n_blocks {
        u = pair.psi().apply(&u);
    }
    (u[m - 1] - lambda.exp()).norm()
}

#[test]
fn lobatto_collocation_has_order_2m_minus_2() {
    for m in [3, 4] {
        let errors: Vec<f64> = [4, 8, 16].iter().map(|&n| collocation_end_error(m, n)).collect();
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((order - (2 * m - 2) as f64).abs() < 0.5, "M={m} order {order}");
        }
    }
}

#[test]
fn two_level_examples() {
    let lam_dt = c64(-0.2, 0.6);
    let col = |m| Integrator::Collocation {
        family: NodeFamily::LobattoLegendre,
        nodes: m,
    };
    let setup = build_two_level(&col(3), &col(2), Some(&Approximation::QDeltaBackwardEuler), lam_dt).unwrap();
    let coarse = setup.coarse.as_ref().unwrap();
    let expected_r = [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
    let expected_p = [[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]];
    for i in 0..2 {
        for j in 0..3 {
            assert!((coarse.restrict[(i, j)] - expected_r[i][j]).abs() < 1e-15);
            assert!((coarse.prolong[(j, i)] - expected_p[j][i]).abs() < 1e-15);
        }
    }

    let setup = build_two_level(&col(5), &col(3), Some(&Approximation::QDeltaBackwardEuler), lam_dt).unwrap();
    assert!(setup.delta_chi_norm() <= 1e-12);
    assert!(setup.transfer_residual() <= 1e-12);

    let setup = build_two_level(&col(4), &col(4), None, lam_dt).unwrap();
    let coarse = setup.coarse.as_ref().unwrap();
    assert!(coarse.pair.phi().max_abs_diff(setup.fine.phi()) < 1e-15);
    assert!(coarse.restrict.max_abs_diff(&pint_gfm_core::linalg::RealMatrix::identity(4)) < 1e-15);

    let radau = |m| Integrator::Collocation {
        family: NodeFamily::RadauRight,
        nodes: m,
    };
    let setup = build_two_level(&radau(5), &radau(2), Some(&Approximation::QDeltaBackwardEuler), lam_dt).unwrap();
    assert!(setup.delta_chi_norm() <= 1e-12 && setup.transfer_residual() <= 1e-12);

    assert!(build_two_level(&col(3), &col(5), None, lam_dt).is_err());
}
