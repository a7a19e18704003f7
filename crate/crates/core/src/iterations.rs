//! Primary block iterations: construction for every method, the generic
//! iteration engine, and global iteration-matrix diagnostics.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::operators::TwoLevelSetup;

/// Maximum residual of the consistency condition accepted by the builders.
pub const CONSISTENCY_TOL: f64 = 1e-12;

/// Largest global system assembled by [`global_iteration_matrix`].
pub const MAX_GLOBAL_SIZE: usize = 4096;

/// Block vector of `M` complex values.
pub type BlockVector = Vec<Complex64>;

/// Coarse propagator used by a Parareal iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PararealCoarse {
    /// `G = φ̃⁻¹χ`.
    Approximate,
    /// `G = T_C^F φ_C⁻¹ T_F^C χ` (two-level TMG with ω = 1).
    CoarseLevel,
    /// `G = T_C^F φ̃_C⁻¹ T_F^C χ` (TMG_c).
    CoarseApproximate,
}

/// Block iteration methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    DampedBlockJacobi { omega: f64 },
    /// Approximate block Jacobi (Block Jacobi SDC with `φ̃ = I − Q_Δ`).
    ApproxBlockJacobi,
    /// Approximate block Gauss-Seidel (Block Gauss-Seidel SDC with `φ̃ = I − Q_Δ`).
    ApproxBlockGaussSeidel,
    Parareal { coarse: PararealCoarse },
    /// Two-level time multigrid: one damped block Jacobi pre-smoothing step
    /// followed by an exact coarse grid correction.
    Tmg { omega: f64 },
    /// Two-level multigrid with an approximate block Jacobi smoother.
    TmgFine,
    /// Two-level multigrid whose coarse correction is one approximate block
    /// Gauss-Seidel step.
    TmgCoarse,
    Pfasst,
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::DampedBlockJacobi { omega } => format!("damped_block_jacobi(omega={omega})"),
            Method::ApproxBlockJacobi => "abj".into(),
            Method::ApproxBlockGaussSeidel => "abgs".into(),
            Method::Parareal { coarse } => match coarse {
                PararealCoarse::Approximate => "parareal".into(),
                PararealCoarse::CoarseLevel => "parareal(coarse)".into(),
                PararealCoarse::CoarseApproximate => "parareal(coarse_approx)".into(),
            },
            Method::Tmg { omega } => {
                if *omega == 1.0 {
                    "tmg".into()
                } else {
                    format!("tmg(omega={omega})")
                }
            }
            Method::TmgFine => "tmg_f".into(),
            Method::TmgCoarse => "tmg_c".into(),
            Method::Pfasst => "pfasst".into(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `u[n+1]^(k+1) = B10 u[n+1]^k + B01 u[n]^(k+1) + B00 u[n]^k`.
#[derive(Debug, Clone)]
pub struct PrimaryBlockIteration {
    /// `B10`, applied to `u[n+1]^k`.
    pub same_block_prev_iter: ComplexMatrix,
    /// `B01`, applied to `u[n]^(k+1)`.
    pub prev_block_curr_iter: ComplexMatrix,
    /// `B00`, applied to `u[n]^k`.
    pub prev_block_prev_iter: ComplexMatrix,
    /// Fine block propagator `ψ = φ⁻¹χ` defining the fixed point.
    pub psi: ComplexMatrix,
    pub label: String,
    /// Whether the last block node is the block's right end point `τ_M = 1`.
    pub last_node_is_interface: bool,
}

impl PrimaryBlockIteration {
    /// Assembles an iteration and rejects it if the consistency residual
    /// exceeds [`CONSISTENCY_TOL`].
    pub fn new(
        label: impl Into<String>,
        same_block_prev_iter: ComplexMatrix,
        prev_block_curr_iter: ComplexMatrix,
        prev_block_prev_iter: ComplexMatrix,
        psi: ComplexMatrix,
    ) -> Result<Self> {
        let it = Self::new_unchecked(
            label,
            same_block_prev_iter,
            prev_block_curr_iter,
            prev_block_prev_iter,
            psi,
        )?;
        let residual = check_consistency(&it);
        if residual.is_nan() || residual > CONSISTENCY_TOL {
            return Err(Error::Inconsistent {
                label: it.label,
                residual,
            });
        }
        Ok(it)
    }

    /// Assembles an iteration without the consistency check; dimensions are
    /// still validated.
    pub fn new_unchecked(
        label: impl Into<String>,
        same_block_prev_iter: ComplexMatrix,
        prev_block_curr_iter: ComplexMatrix,
        prev_block_prev_iter: ComplexMatrix,
        psi: ComplexMatrix,
    ) -> Result<Self> {
        let m = psi.rows();
        for (name, b) in [
            ("B10", &same_block_prev_iter),
            ("B01", &prev_block_curr_iter),
            ("B00", &prev_block_prev_iter),
            ("psi", &psi),
        ] {
            if b.rows() != m || b.cols() != m {
                return Err(Error::Dimension(format!(
                    "{name} is {}x{}, expected {m}x{m}",
                    b.rows(),
                    b.cols()
                )));
            }
        }
        Ok(Self {
            same_block_prev_iter,
            prev_block_curr_iter,
            prev_block_prev_iter,
            psi,
            label: label.into(),
            last_node_is_interface: true,
        })
    }

    pub fn dim(&self) -> usize {
        self.psi.rows()
    }

    /// One block update from `u[n+1]^k`, `u[n]^(k+1)` and `u[n]^k`.
    pub fn update(&self, same_prev: &[Complex64], prev_curr: &[Complex64], prev_prev: &[Complex64]) -> BlockVector {
        let mut out = vec![Complex64::zero(); self.dim()];
        self.same_block_prev_iter.apply_add(same_prev, &mut out);
        self.prev_block_curr_iter.apply_add(prev_curr, &mut out);
        self.prev_block_prev_iter.apply_add(prev_prev, &mut out);
        out
    }
}

/// `‖(B10 − I)ψ + B01 + B00‖∞`.
pub fn check_consistency(it: &PrimaryBlockIteration) -> f64 {
    let m = it.dim();
    let shifted = &it.same_block_prev_iter - &ComplexMatrix::identity(m);
    let residual = &(&(&shifted * &it.psi) + &it.prev_block_curr_iter) + &it.prev_block_prev_iter;
    residual.inf_norm()
}

fn require<'a, T>(value: Option<&'a T>, method: &Method, missing: &'static str) -> Result<&'a T> {
    value.ok_or_else(|| Error::MissingOperator {
        method: method.label(),
        missing,
    })
}

fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega <= 2.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("relaxation ω = {omega} outside (0, 2]")))
    }
}

/// Builds the block operators of `method` on the given operators.
pub fn build_iteration(method: &Method, setup: &TwoLevelSetup) -> Result<PrimaryBlockIteration> {
    let fine = &setup.fine;
    let m = fine.dim();
    let identity = ComplexMatrix::identity(m);
    let zero = ComplexMatrix::zeros(m, m);
    let chi = fine.chi();
    let phi = fine.phi();
    let psi = fine.psi().clone();
    let label = method.label();

    // I − φ̃⁻¹φ and φ̃⁻¹χ.
    let approx_parts = || -> Result<(ComplexMatrix, ComplexMatrix)> {
        let approx = require(setup.fine_approx.as_ref(), method, "an approximate fine operator")?;
        Ok((&identity - &approx.solve(phi), approx.solve(chi)))
    };
    // T_C^F φ_C⁻¹ T_F^C and its approximate-coarse counterpart.
    let coarse_exact = || -> Result<ComplexMatrix> {
        Ok(require(setup.coarse.as_ref(), method, "a coarse level")?.coarse_inverse())
    };
    let coarse_approx = || -> Result<ComplexMatrix> {
        let coarse = require(setup.coarse.as_ref(), method, "a coarse level")?;
        coarse
            .coarse_approx_inverse()
            .ok_or_else(|| Error::MissingOperator {
                method: method.label(),
                missing: "an approximate coarse operator",
            })
    };
    let parareal = |g: ComplexMatrix| {
        let b00 = &psi - &g;
        PrimaryBlockIteration::new(label.clone(), zero.clone(), g, b00, psi.clone())
    };
    // Two-level update with a given coarse inverse `p` and smoother parts.
    let two_level_with_approx_smoother = |p: ComplexMatrix| -> Result<PrimaryBlockIteration> {
        let (smooth, approx_chi) = approx_parts()?;
        let cgc = &identity - &(&p * phi);
        let b10 = &cgc * &smooth;
        let b00 = &cgc * &approx_chi;
        let b01 = &p * chi;
        PrimaryBlockIteration::new(label.clone(), b10, b01, b00, psi.clone())
    };

    let it = match *method {
        Method::DampedBlockJacobi { omega } => {
            check_omega(omega)?;
            let b10 = identity.scale(Complex64::new(1.0 - omega, 0.0));
            let b00 = psi.scale(Complex64::new(omega, 0.0));
            PrimaryBlockIteration::new(label, b10, zero, b00, psi)
        }
        Method::ApproxBlockJacobi => {
            let (b10, b00) = approx_parts()?;
            PrimaryBlockIteration::new(label, b10, zero, b00, psi)
        }
        Method::ApproxBlockGaussSeidel => {
            let (b10, b01) = approx_parts()?;
            PrimaryBlockIteration::new(label, b10, b01, zero, psi)
        }
        Method::Parareal { coarse } => {
            let g = match coarse {
                PararealCoarse::Approximate => approx_parts()?.1,
                PararealCoarse::CoarseLevel => &coarse_exact()? * chi,
                PararealCoarse::CoarseApproximate => &coarse_approx()? * chi,
            };
            parareal(g)
        }
        Method::TmgCoarse => parareal(&coarse_approx()? * chi),
        Method::Tmg { omega } => {
            check_omega(omega)?;
            let p = coarse_exact()?;
            let w = Complex64::new(omega, 0.0);
            let b10 = (&identity - &(&p * phi)).scale(Complex64::one() - w);
            let b01 = &p * chi;
            let b00 = (&psi - &b01).scale(w);
            PrimaryBlockIteration::new(label, b10, b01, b00, psi)
        }
        Method::TmgFine => two_level_with_approx_smoother(coarse_exact()?),
        Method::Pfasst => two_level_with_approx_smoother(coarse_approx()?),
    }?;
    Ok(PrimaryBlockIteration {
        last_node_is_interface: fine.disc().includes_right_endpoint(),
        ..it
    })
}

/// Starting iterate `u^0` on blocks `1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    /// Real and imaginary parts uniform in `[0, 1)` from a seeded generator.
    Random { seed: u64 },
    Zero,
    /// Sequential propagation of `u0·1` with the given block propagator.
    Propagated(ComplexMatrix),
}

impl InitialGuess {
    fn blocks(&self, u0: Complex64, m: usize, n_blocks: usize) -> Result<Vec<BlockVector>> {
        match self {
            InitialGuess::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..n_blocks)
                    .map(|_| {
                        (0..m)
                            .map(|_| {
                                let re: f64 = rng.random();
                                let im: f64 = rng.random();
                                Complex64::new(re, im)
                            })
                            .collect()
                    })
                    .collect())
            }
            InitialGuess::Zero => Ok(vec![vec![Complex64::zero(); m]; n_blocks]),
            InitialGuess::Propagated(g) => {
                if g.rows() != m || g.cols() != m {
                    return Err(Error::Dimension(format!(
                        "initial propagator is {}x{}, expected {m}x{m}",
                        g.rows(),
                        g.cols()
                    )));
                }
                let mut u = vec![u0; m];
                Ok((0..n_blocks)
                    .map(|_| {
                        u = g.apply(&u);
                        u.clone()
                    })
                    .collect())
            }
        }
    }
}

/// Iterates, fixed point and errors of one run.
///
/// Block index `n` runs over `0..=N`, where block 0 holds the initial
/// condition `u0·1`; iteration index `k` runs over `0..=K`.
#[derive(Debug, Clone)]
pub struct IterationRun {
    pub iterates: Vec<Vec<BlockVector>>,
    pub fixed_point: Vec<BlockVector>,
    /// `e[k][n] = ‖u[n]^k − u[n]‖∞`.
    pub volume_errors: Vec<Vec<f64>>,
    /// `ē[k][n] = |last entry of u[n]^k − u[n]|`.
    pub interface_errors: Vec<Vec<f64>>,
}

impl IterationRun {
    fn from_iterates(iterates: Vec<Vec<BlockVector>>, fixed_point: Vec<BlockVector>) -> Self {
        let volume_errors = iterates
            .iter()
            .map(|sweep| {
                sweep
                    .iter()
                    .zip(&fixed_point)
                    .map(|(u, v)| u.iter().zip(v).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
                    .collect()
            })
            .collect();
        let interface_errors = iterates
            .iter()
            .map(|sweep| {
                sweep
                    .iter()
                    .zip(&fixed_point)
                    .map(|(u, v)| match (u.last(), v.last()) {
                        (Some(a), Some(b)) => (a - b).norm(),
                        _ => 0.0,
                    })
                    .collect()
            })
            .collect();
        Self {
            iterates,
            fixed_point,
            volume_errors,
            interface_errors,
        }
    }

    pub fn n_blocks(&self) -> usize {
        self.fixed_point.len() - 1
    }

    pub fn n_iterations(&self) -> usize {
        self.iterates.len() - 1
    }

    /// `δ = max_n e[0][n]`.
    pub fn initial_volume_error(&self) -> f64 {
        self.volume_errors[0].iter().copied().fold(0.0, f64::max)
    }

    /// `δ̄ = max_n ē[0][n]`.
    pub fn initial_interface_error(&self) -> f64 {
        self.interface_errors[0].iter().copied().fold(0.0, f64::max)
    }
}

/// Sequential solution `u[n+1] = ψ u[n]` with `u[0] = u0·1`.
pub fn sequential_solution(psi: &ComplexMatrix, u0: Complex64, n_blocks: usize) -> Vec<BlockVector> {
    let m = psi.rows();
    let mut out = Vec::with_capacity(n_blocks + 1);
    out.push(vec![u0; m]);
    for n in 0..n_blocks {
        let next = psi.apply(&out[n]);
        out.push(next);
    }
    out
}

fn check_run_args(n_blocks: usize) -> Result<()> {
    if n_blocks == 0 {
        return Err(Error::Parameter("at least one block is required".into()));
    }
    Ok(())
}

/// Runs `k_max` sweeps of a primary block iteration over `n_blocks` blocks.
pub fn run(
    it: &PrimaryBlockIteration,
    u0: Complex64,
    n_blocks: usize,
    k_max: usize,
    init: &InitialGuess,
) -> Result<IterationRun> {
    check_run_args(n_blocks)?;
    let m = it.dim();
    let start = vec![u0; m];
    let mut first = Vec::with_capacity(n_blocks + 1);
    first.push(start.clone());
    first.extend(init.blocks(u0, m, n_blocks)?);
    let mut iterates = Vec::with_capacity(k_max + 1);
    iterates.push(first);
    for k in 0..k_max {
        let prev = &iterates[k];
        let mut next: Vec<BlockVector> = Vec::with_capacity(n_blocks + 1);
        next.push(start.clone());
        for n in 0..n_blocks {
            let u = it.update(&prev[n + 1], &next[n], &prev[n]);
            next.push(u);
        }
        iterates.push(next);
    }
    let fixed_point = sequential_solution(&it.psi, u0, n_blocks);
    Ok(IterationRun::from_iterates(iterates, fixed_point))
}

/// Parareal with overlap:
/// `u[n+1]^(k+1) = (F − G) F u[n−1]^k + G u[n]^(k+1)`.
///
/// Block 1 has no predecessor two blocks back and is set to `F u[0]` exactly.
pub fn run_overlap_parareal(
    fine: &ComplexMatrix,
    coarse: &ComplexMatrix,
    u0: Complex64,
    n_blocks: usize,
    k_max: usize,
    init: &InitialGuess,
) -> Result<IterationRun> {
    check_run_args(n_blocks)?;
    let m = fine.rows();
    if !fine.is_square() || coarse.rows() != m || coarse.cols() != m {
        return Err(Error::Dimension("F and G must be square of equal size".into()));
    }
    let two_back = &(fine - coarse) * fine;
    let start = vec![u0; m];
    let mut first = Vec::with_capacity(n_blocks + 1);
    first.push(start.clone());
    first.extend(init.blocks(u0, m, n_blocks)?);
    let mut iterates = Vec::with_capacity(k_max + 1);
    iterates.push(first);
    for k in 0..k_max {
        let prev = &iterates[k];
        let mut next: Vec<BlockVector> = Vec::with_capacity(n_blocks + 1);
        next.push(start.clone());
        next.push(fine.apply(&start));
        for n in 1..n_blocks {
            let mut u = vec![Complex64::zero(); m];
            two_back.apply_add(&prev[n - 1], &mut u);
            coarse.apply_add(&next[n], &mut u);
            next.push(u);
        }
        iterates.push(next);
    }
    let fixed_point = sequential_solution(fine, u0, n_blocks);
    Ok(IterationRun::from_iterates(iterates, fixed_point))
}

/// Error propagation matrix `R = (I − L)⁻¹ U` of the iteration on `N` blocks,
/// with `L` block-subdiagonal `B01` and `U = diag(B10) + subdiag(B00)`.
pub fn global_iteration_matrix(it: &PrimaryBlockIteration, n_blocks: usize) -> Result<ComplexMatrix> {
    check_run_args(n_blocks)?;
    let m = it.dim();
    let size = n_blocks * m;
    if size > MAX_GLOBAL_SIZE {
        return Err(Error::TooLarge {
            size,
            limit: MAX_GLOBAL_SIZE,
        });
    }
    let mut r = ComplexMatrix::zeros(size, size);
    // Block row i: R_i = U_i + B01 R_{i−1}; only block columns j ≤ i are nonzero.
    for i in 0..n_blocks {
        for j in 0..=i {
            let mut block = if i > 0 {
                let mut above = ComplexMatrix::zeros(m, m);
                for a in 0..m {
                    for b in 0..m {
                        above[(a, b)] = r[((i - 1) * m + a, j * m + b)];
                    }
                }
                &it.prev_block_curr_iter * &above
            } else {
                ComplexMatrix::zeros(m, m)
            };
            if j == i {
                block = &block + &it.same_block_prev_iter;
            } else if j + 1 == i {
                block = &block + &it.prev_block_prev_iter;
            }
            for a in 0..m {
                for b in 0..m {
                    r[(i * m + a, j * m + b)] = block[(a, b)];
                }
            }
        }
    }
    Ok(r)
}

/// Norm and spectral-radius estimate of a square matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixDiagnostics {
    pub inf_norm: f64,
    pub spectral_radius_estimate: f64,
}

const POWER_MAX_ITER: usize = 500;
const POWER_REL_TOL: f64 = 1e-10;
const POWER_UNDERFLOW: f64 = 1e-30;
const POWER_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

pub fn matrix_diagnostics(a: &ComplexMatrix) -> MatrixDiagnostics {
    assert!(a.is_square(), "diagnostics need a square matrix");
    MatrixDiagnostics {
        inf_norm: a.inf_norm(),
        spectral_radius_estimate: spectral_radius_estimate(a),
    }
}

fn two_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Power iteration from a fixed pseudo-random start vector.
///
/// Returns 0 once an iterate vanishes (nilpotent matrices). Without
/// convergence of the norm ratio, the geometric mean of the ratios over the
/// second half of the iterations is returned.
pub fn spectral_radius_estimate(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| {
            let re: f64 = rng.random();
            let im: f64 = rng.random();
            Complex64::new(re + 0.5, im - 0.5)
        })
        .collect();
    let norm = two_norm(&v);
    v.iter_mut().for_each(|x| *x /= norm);
    let mut previous = f64::NAN;
    let mut log_sum = 0.0;
    let mut log_count = 0usize;
    for iter in 0..POWER_MAX_ITER {
        let w = a.apply(&v);
        let ratio = two_norm(&w);
        if ratio.is_nan() || ratio < POWER_UNDERFLOW {
            return 0.0;
        }
        if (ratio - previous).abs() <= POWER_REL_TOL * ratio {
            return ratio;
        }
        if iter >= POWER_MAX_ITER / 2 {
            log_sum += ratio.ln();
            log_count += 1;
        }
        previous = ratio;
        v = w.into_iter().map(|x| x / ratio).collect();
    }
    (log_sum / log_count as f64).exp()
}

impl fmt::Display for PrimaryBlockIteration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (M = {})", self.label, self.dim())
    }
}

/// Parses a method name such as `parareal`, `tmg`, `tmg(omega=0.5)`,
/// `damped_block_jacobi(omega=1)`.
pub fn parse_method(spec: &str) -> Result<Method> {
    let spec = spec.trim();
    let (name, omega) = match spec.find('(') {
        Some(open) => {
            let inner = spec[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::Parameter(format!("unbalanced parentheses in `{spec}`")))?;
            let value = inner
                .trim()
                .strip_prefix("omega")
                .map(|s| s.trim_start().trim_start_matches('=').trim())
                .unwrap_or(inner.trim());
            let omega: f64 = value
                .parse()
                .map_err(|_| Error::Parameter(format!("bad relaxation parameter in `{spec}`")))?;
            (spec[..open].trim(), Some(omega))
        }
        None => (spec, None),
    };
    let no_param = |m: Method| -> Result<Method> {
        match omega {
            None => Ok(m),
            Some(_) => Err(Error::Parameter(format!("method `{name}` takes no parameter"))),
        }
    };
    match name.to_ascii_lowercase().as_str() {
        "damped_block_jacobi" | "block_jacobi" | "bj" => Ok(Method::DampedBlockJacobi {
            omega: omega.unwrap_or(1.0),
        }),
        "abj" | "bj_sdc" => no_param(Method::ApproxBlockJacobi),
        "abgs" | "bgs_sdc" => no_param(Method::ApproxBlockGaussSeidel),
        "parareal" => no_param(Method::Parareal {
            coarse: PararealCoarse::Approximate,
        }),
        "parareal_coarse" => no_param(Method::Parareal {
            coarse: PararealCoarse::CoarseLevel,
        }),
        "parareal_coarse_approx" => no_param(Method::Parareal {
            coarse: PararealCoarse::CoarseApproximate,
        }),
        "tmg" | "stmg" => Ok(Method::Tmg {
            omega: omega.unwrap_or(1.0),
        }),
        "tmg_f" => no_param(Method::TmgFine),
        "tmg_c" => no_param(Method::TmgCoarse),
        "pfasst" => no_param(Method::Pfasst),
        other => Err(Error::Parameter(format!("unknown method `{other}`"))),
    }
}

impl core::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_method(s)
    }
}

/// Stable identifier suitable for file names.
pub fn method_slug(method: &Method) -> String {
    method
        .label()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect::<String>()
        .trim_end_matches('_')
        .to_string()
}
