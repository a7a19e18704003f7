//! Built-in figure configurations and the experiment runner.

use std::f64::consts::PI;

use num_complex::Complex64;
use pint_gfm_core::bounds::{
    bound_table, extract_coefficients, extract_interface_coefficients, BoundCoefficients, BoundMode,
    InterfaceCoefficients, ZERO_TOL,
};
use pint_gfm_core::discretization::NodeFamily;
use pint_gfm_core::iterations::{
    build_iteration, check_consistency, global_iteration_matrix, matrix_diagnostics, run, InitialGuess,
    IterationRun, Method, PararealCoarse, PrimaryBlockIteration, MAX_GLOBAL_SIZE,
};
use pint_gfm_core::linalg::ComplexMatrix;
use pint_gfm_core::operators::{
    build_single_level, build_two_level, Approximation, Integrator, RkFormulation, RkMethod, TwoLevelSetup,
};

use crate::config::{ConfigError, Experiment, InitKind, OutputKind};

/// Targets of `reproduce`.
pub const TARGETS: [&str; 6] = ["fig2", "fig3", "fig4", "fig5", "fig6", "table3"];

pub const DEFAULT_SEED: u64 = 1234;

fn base(name: &str, lambda: Complex64, t_end: f64, fine: Integrator) -> Experiment {
    Experiment {
        name: name.into(),
        lambda,
        t_end,
        u0: Complex64::new(1.0, 0.0),
        n_blocks: 10,
        fine,
        coarse: None,
        approx: None,
        methods: Vec::new(),
        iterations: 10,
        seed: DEFAULT_SEED,
        init: InitKind::Random,
        outputs: OutputKind::ALL.to_vec(),
    }
}

fn lobatto(nodes: usize) -> Integrator {
    Integrator::Collocation {
        family: NodeFamily::LobattoLegendre,
        nodes,
    }
}

/// Parareal on scalar interface blocks: RK4 with 10 steps per block as fine
/// propagator, backward Euler with 2 steps as coarse propagator.
pub fn parareal_rk(name: &str, lambda: Complex64) -> Experiment {
    let fine = Integrator::RungeKutta {
        method: RkMethod::ClassicRk4,
        steps: 10,
        formulation: RkFormulation::Interface,
    };
    Experiment {
        approx: Some(Approximation::RungeKutta {
            method: RkMethod::BackwardEuler,
            steps: Some(2),
        }),
        methods: vec![Method::Parareal {
            coarse: PararealCoarse::Approximate,
        }],
        ..base(name, lambda, 2.0 * PI, fine)
    }
}

pub fn fig4() -> Experiment {
    Experiment {
        approx: Some(Approximation::QDeltaBackwardEuler),
        methods: vec![Method::ApproxBlockJacobi, Method::ApproxBlockGaussSeidel],
        iterations: 15,
        ..base("fig4", Complex64::new(0.0, 1.0), PI, lobatto(10))
    }
}

pub fn fig5() -> Experiment {
    Experiment {
        coarse: Some(lobatto(2)),
        approx: Some(Approximation::QDeltaBackwardEuler),
        methods: vec![Method::Pfasst],
        iterations: 15,
        ..base("fig5", Complex64::new(0.0, 1.0), 2.0 * PI, lobatto(6))
    }
}

/// The seven compared methods: ABJ, ABGS, Parareal, TMG, TMG_c, TMG_f, PFASST.
pub fn comparison_methods() -> Vec<Method> {
    vec![
        Method::ApproxBlockJacobi,
        Method::ApproxBlockGaussSeidel,
        Method::Parareal {
            coarse: PararealCoarse::Approximate,
        },
        Method::Tmg { omega: 1.0 },
        Method::TmgCoarse,
        Method::TmgFine,
        Method::Pfasst,
    ]
}

fn comparison_lambda() -> Complex64 {
    Complex64::new(-0.2, 2.0)
}

pub fn fig6_left() -> Experiment {
    Experiment {
        coarse: Some(lobatto(3)),
        approx: Some(Approximation::QDeltaBackwardEuler),
        methods: comparison_methods(),
        iterations: 15,
        ..base("fig6_left", comparison_lambda(), 2.0 * PI, lobatto(5))
    }
}

/// RK4 on 5 equidistant nodes including both end points (4 steps), coarse
/// RK4 on 3 nodes (2 steps), Heun as approximation on both levels.
pub fn fig6_right() -> Experiment {
    let rk4 = |steps| Integrator::RungeKutta {
        method: RkMethod::ClassicRk4,
        steps,
        formulation: RkFormulation::VolumeClosed,
    };
    Experiment {
        coarse: Some(rk4(2)),
        approx: Some(Approximation::RungeKutta {
            method: RkMethod::Heun,
            steps: None,
        }),
        methods: comparison_methods(),
        iterations: 15,
        ..base("fig6_right", comparison_lambda(), 2.0 * PI, rk4(4))
    }
}

/// Experiments behind a `reproduce` target.
pub fn builtin(target: &str) -> Result<Vec<Experiment>, ConfigError> {
    let i = Complex64::new(0.0, 1.0);
    let experiments = match target {
        "fig2" => vec![
            parareal_rk("fig2_left", i),
            parareal_rk("fig2_right", Complex64::new(-1.0, 0.0)),
        ],
        "fig3" => vec![
            parareal_rk("fig3_left", 4.0 * i),
            parareal_rk("fig3_right", Complex64::new(-4.0, 0.0)),
        ],
        "fig4" => vec![fig4()],
        "fig5" => vec![fig5()],
        "fig6" | "table3" => vec![fig6_left(), fig6_right()],
        other => {
            return Err(ConfigError::single(format!(
                "unknown target `{other}` (expected one of {})",
                TARGETS.join(", ")
            )))
        }
    };
    Ok(experiments)
}

/// Applies a `PINT_GFM_SEED` override to built-in experiments.
pub fn apply_seed_override(experiments: &mut [Experiment]) -> Result<(), ConfigError> {
    if let Ok(text) = std::env::var(crate::config::SEED_ENV) {
        let seed = text.trim().parse().map_err(|_| {
            ConfigError::single(format!("{}: `{text}` is not an unsigned integer", crate::config::SEED_ENV))
        })?;
        for e in experiments {
            e.seed = seed;
        }
    }
    Ok(())
}

pub fn build_setup(exp: &Experiment) -> pint_gfm_core::Result<TwoLevelSetup> {
    match &exp.coarse {
        Some(coarse) => build_two_level(&exp.fine, coarse, exp.approx.as_ref(), exp.lam_dt()),
        None => build_single_level(&exp.fine, exp.approx.as_ref(), exp.lam_dt()),
    }
}

/// Per-method scalar diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub volume: BoundCoefficients,
    pub interface: InterfaceCoefficients,
    pub inf_norm_r: Option<f64>,
    pub spectral_radius_r: Option<f64>,
    pub consistency_residual: f64,
}

/// Errors and requested bound tables of one method, indexed `[k][n]`.
#[derive(Debug, Clone)]
pub struct MethodResult {
    pub method: Method,
    pub iteration: PrimaryBlockIteration,
    pub run: IterationRun,
    pub gfm_bound: Option<Vec<Vec<f64>>>,
    pub interface_estimate: Option<Vec<Vec<f64>>>,
    pub gander_hairer: Option<Vec<Vec<f64>>>,
    pub linear_bound: Option<Vec<Vec<f64>>>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub experiment: Experiment,
    pub methods: Vec<MethodResult>,
}

fn initial_guess(exp: &Experiment, setup: &TwoLevelSetup) -> pint_gfm_core::Result<InitialGuess> {
    Ok(match exp.init {
        InitKind::Random => InitialGuess::Random { seed: exp.seed },
        InitKind::Zero => InitialGuess::Zero,
        InitKind::Coarse => {
            let g: ComplexMatrix = if let Some(approx) = &setup.fine_approx {
                approx.solve(setup.fine.chi())
            } else if let Some(coarse) = &setup.coarse {
                &coarse.coarse_inverse() * setup.fine.chi()
            } else {
                return Err(pint_gfm_core::Error::Parameter(
                    "init = coarse needs an approximation or a coarse level".into(),
                ));
            };
            InitialGuess::Propagated(g)
        }
    })
}

pub fn run_method(
    exp: &Experiment,
    setup: &TwoLevelSetup,
    method: &Method,
) -> pint_gfm_core::Result<MethodResult> {
    let it = build_iteration(method, setup)?;
    let init = initial_guess(exp, setup)?;
    let r = run(&it, exp.u0, exp.n_blocks, exp.iterations, &init)?;
    let volume = extract_coefficients(&it, &r);
    let wants_r = exp.wants(OutputKind::Diagnostics) || exp.wants(OutputKind::LinearBound);
    let global = if wants_r && exp.n_blocks * it.dim() <= MAX_GLOBAL_SIZE {
        Some(matrix_diagnostics(&global_iteration_matrix(&it, exp.n_blocks)?))
    } else {
        None
    };
    let table = |kind: OutputKind, mode: BoundMode| -> pint_gfm_core::Result<Option<Vec<Vec<f64>>>> {
        if exp.wants(kind) {
            bound_table(&it, &r, mode).map(Some)
        } else {
            Ok(None)
        }
    };
    let gander_hairer = if volume.gamma < ZERO_TOL {
        table(OutputKind::GanderHairer, BoundMode::GanderHairer)?
    } else {
        None
    };
    let linear_bound = match global {
        Some(d) if exp.wants(OutputKind::LinearBound) => Some(
            (0..=exp.iterations)
                .map(|k| {
                    let mut row = vec![volume.delta * d.inf_norm.powi(k as i32); exp.n_blocks + 1];
                    row[0] = 0.0;
                    row
                })
                .collect(),
        ),
        _ => None,
    };
    let diagnostics = Diagnostics {
        volume,
        interface: extract_interface_coefficients(&it, &r),
        inf_norm_r: global.map(|d| d.inf_norm),
        spectral_radius_r: global.map(|d| d.spectral_radius_estimate),
        consistency_residual: check_consistency(&it),
    };
    Ok(MethodResult {
        method: *method,
        gfm_bound: table(OutputKind::GfmBound, BoundMode::Volume)?,
        interface_estimate: table(OutputKind::InterfaceEstimate, BoundMode::InterfaceEstimate)?,
        gander_hairer,
        linear_bound,
        diagnostics,
        iteration: it,
        run: r,
    })
}

pub fn run_experiment(exp: &Experiment) -> pint_gfm_core::Result<ExperimentResult> {
    let setup = build_setup(exp)?;
    let methods = exp
        .methods
        .iter()
        .map(|m| run_method(exp, &setup, m))
        .collect::<pint_gfm_core::Result<_>>()?;
    Ok(ExperimentResult {
        experiment: exp.clone(),
        methods,
    })
}

/// Maximum error against `u0 e^{λt}` of the sequential solution
/// `u_{n+1} = G u_n` on the given block nodes.
pub fn propagator_error(exp: &Experiment, propagator: &ComplexMatrix, nodes: &[f64]) -> f64 {
    let dt = exp.dt();
    let mut u = vec![exp.u0; propagator.rows()];
    let mut worst: f64 = 0.0;
    for n in 0..exp.n_blocks {
        u = propagator.apply(&u);
        for (value, tau) in u.iter().zip(nodes) {
            let exact = exp.u0 * (exp.lambda * ((n as f64 + tau) * dt)).exp();
            worst = worst.max((value - exact).norm());
        }
    }
    worst
}

/// Sequential accuracy of the four block propagators of a setup.
///
/// Fine-level propagators are measured on the fine nodes; coarse-level
/// propagators on the coarse nodes, where they are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorErrors {
    /// `φ⁻¹χ`.
    pub fine: f64,
    /// `φ̃⁻¹χ`.
    pub approx: Option<f64>,
    /// `φ_C⁻¹χ_C`.
    pub coarse: Option<f64>,
    /// `φ̃_C⁻¹χ_C`.
    pub coarse_approx: Option<f64>,
}

pub fn propagator_errors(exp: &Experiment) -> pint_gfm_core::Result<PropagatorErrors> {
    let setup = build_setup(exp)?;
    let fine_nodes = setup.fine.disc().nodes();
    let fine = propagator_error(exp, setup.fine.psi(), fine_nodes);
    let approx = setup
        .fine_approx
        .as_ref()
        .map(|a| propagator_error(exp, &a.solve(setup.fine.chi()), fine_nodes));
    let (coarse, coarse_approx) = match &setup.coarse {
        Some(c) => {
            let nodes = c.pair.disc().nodes();
            (
                Some(propagator_error(exp, c.pair.psi(), nodes)),
                c.approx
                    .as_ref()
                    .map(|a| propagator_error(exp, &a.solve(c.pair.chi()), nodes)),
            )
        }
        None => (None, None),
    };
    Ok(PropagatorErrors {
        fine,
        approx,
        coarse,
        coarse_approx,
    })
}

/// Index of the method with the smallest maximal volume error at iteration `k`.
pub fn fastest_at(result: &ExperimentResult, k: usize) -> Option<usize> {
    let worst = |m: &MethodResult| m.run.volume_errors[k].iter().copied().fold(0.0, f64::max);
    (0..result.methods.len()).min_by(|&a, &b| {
        worst(&result.methods[a]).total_cmp(&worst(&result.methods[b]))
    })
}
