//! GFM convergence bounds, the Gander–Hairer variant, the interface error
//! estimate and the scalar recurrence they solve.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::iterations::{global_iteration_matrix, IterationRun, PrimaryBlockIteration};
use crate::linalg::ComplexMatrix;

/// Coefficients below this are treated as exactly zero in [`theta`].
pub const ZERO_TOL: f64 = 1e-14;

/// Volume coefficients `α = ‖B00‖∞`, `β = ‖B01‖∞`, `γ = ‖B10‖∞` and the
/// initial error `δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl BoundCoefficients {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("delta", delta)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Parameter(format!("{name} = {v} must be finite and nonnegative")));
            }
        }
        Ok(Self { alpha, beta, gamma, delta })
    }
}

/// Moduli of the bottom-right entries of `B00`, `B01`, `B10` and the initial
/// interface error `δ̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceCoefficients {
    pub alpha_bar: f64,
    pub beta_bar: f64,
    pub gamma_bar: f64,
    pub delta_bar: f64,
}

impl InterfaceCoefficients {
    pub fn as_bound_coefficients(&self) -> BoundCoefficients {
        BoundCoefficients {
            alpha: self.alpha_bar,
            beta: self.beta_bar,
            gamma: self.gamma_bar,
            delta: self.delta_bar,
        }
    }
}

pub fn extract_coefficients(it: &PrimaryBlockIteration, run: &IterationRun) -> BoundCoefficients {
    BoundCoefficients {
        alpha: it.prev_block_prev_iter.inf_norm(),
        beta: it.prev_block_curr_iter.inf_norm(),
        gamma: it.same_block_prev_iter.inf_norm(),
        delta: run.initial_volume_error(),
    }
}

fn last_entry(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    m[(n - 1, n - 1)].norm()
}

pub fn extract_interface_coefficients(it: &PrimaryBlockIteration, run: &IterationRun) -> InterfaceCoefficients {
    InterfaceCoefficients {
        alpha_bar: last_entry(&it.prev_block_prev_iter),
        beta_bar: last_entry(&it.prev_block_curr_iter),
        gamma_bar: last_entry(&it.same_block_prev_iter),
        delta_bar: run.initial_interface_error(),
    }
}

/// `C(n, k)` by multiplicative accumulation in floating point.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 1..=k {
        acc = acc * (n - k + j) as f64 / j as f64;
    }
    acc
}

fn snap(v: f64) -> f64 {
    if v < ZERO_TOL {
        0.0
    } else {
        v
    }
}

fn check_domain(k: usize, values: &[f64]) -> Result<()> {
    if k == 0 {
        return Err(Error::Parameter("bounding functions are defined for k ≥ 1".into()));
    }
    for v in values {
        if !(v.is_finite() && *v >= 0.0) {
            return Err(Error::Parameter(format!("coefficient {v} must be finite and nonnegative")));
        }
    }
    Ok(())
}

/// `Σ_{i=0}^{last} C(i+k−1, i) β^i`.
fn weighted_series(beta: f64, k: usize, last: usize) -> f64 {
    let mut sum = 0.0;
    let mut power = 1.0;
    for i in 0..=last {
        sum += binomial(i + k - 1, i) * power;
        power *= beta;
    }
    sum
}

/// Bounding function `θ_{n+1}^k` for `k ≥ 1`, so that the error of block
/// `n + 1` after `k` iterations is at most `δ θ_{n+1}^k`.
///
/// Only `delta` is ignored in `c`.
pub fn theta(n: usize, k: usize, c: &BoundCoefficients) -> Result<f64> {
    check_domain(k, &[c.alpha, c.beta, c.gamma])?;
    let (alpha, beta, gamma) = (snap(c.alpha), snap(c.beta), snap(c.gamma));
    let kk = k as i32;
    let value = if gamma == 0.0 {
        if n < k {
            0.0
        } else {
            alpha.powi(kk) * weighted_series(beta, k, n - k)
        }
    } else if beta == 0.0 {
        if k <= n {
            (gamma + alpha).powi(kk)
        } else {
            (0..=n)
                .map(|i| binomial(k, i) * alpha.powi(i as i32) * gamma.powi(kk - i as i32))
                .sum()
        }
    } else if alpha == 0.0 {
        gamma.powi(kk) * weighted_series(beta, k, n)
    } else {
        // Written with α^i γ^(k−i) rather than γ^k (α/γ)^i.
        let mut sum = 0.0;
        for i in 0..=n.min(k) {
            let outer = binomial(k, i) * alpha.powi(i as i32) * gamma.powi(kk - i as i32);
            sum += outer * weighted_series(beta, k, n - i);
        }
        sum
    };
    Ok(value)
}

/// `(α^k / k!) β̄^(n−k) Π_{l=1}^k (n+1−l)` with `β̄ = max(1, β)`.
pub fn gander_hairer_theta(n: usize, k: usize, alpha: f64, beta: f64) -> Result<f64> {
    check_domain(k, &[alpha, beta])?;
    if k > n {
        return Ok(0.0);
    }
    let beta_bar = beta.max(1.0);
    Ok(alpha.powi(k as i32) * beta_bar.powi((n - k) as i32) * binomial(n, k))
}

/// Solves `E(n+1,k+1) = γE(n+1,k) + βE(n,k+1) + αE(n,k)` with
/// `E(n,0) = δ` for `n ≥ 1` and `E(0,k) = 0`.
///
/// The result is indexed `[n][k]` for `n ∈ 0..=n_max`, `k ∈ 0..=k_max`; row 0
/// is the zero boundary.
pub fn recurrence_oracle(c: &BoundCoefficients, n_max: usize, k_max: usize) -> Vec<Vec<f64>> {
    let mut e = vec![vec![0.0; k_max + 1]; n_max + 1];
    for row in e.iter_mut().skip(1) {
        row[0] = c.delta;
    }
    for n in 0..n_max {
        for k in 0..k_max {
            e[n + 1][k + 1] = c.gamma * e[n + 1][k] + c.beta * e[n][k + 1] + c.alpha * e[n][k];
        }
    }
    e
}

/// Which bound to tabulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    /// `δ θ` with volume coefficients; a rigorous bound.
    Volume,
    /// `δ̄ θ̄` with interface coefficients; an estimate, not a bound, for M > 1.
    InterfaceEstimate,
    GanderHairer,
    /// `‖R‖∞^k δ` from the global iteration matrix.
    Linear,
}

impl BoundMode {
    pub fn name(&self) -> &'static str {
        match self {
            BoundMode::Volume => "gfm_bound",
            BoundMode::InterfaceEstimate => "interface_estimate",
            BoundMode::GanderHairer => "gander_hairer_bound",
            BoundMode::Linear => "linear_bound",
        }
    }
}

/// Bound values indexed `[k][n]` for `k ∈ 0..=K`, `n ∈ 0..=N`, aligned with
/// [`IterationRun`] error tables. Entry `n = 0` is zero; `k = 0` holds `δ`.
pub fn bound_table(
    it: &PrimaryBlockIteration,
    run: &IterationRun,
    mode: BoundMode,
) -> Result<Vec<Vec<f64>>> {
    let n_blocks = run.n_blocks();
    let k_max = run.n_iterations();
    let volume = extract_coefficients(it, run);
    let tabulate = |delta: f64, f: &dyn Fn(usize, usize) -> Result<f64>| -> Result<Vec<Vec<f64>>> {
        let mut table = vec![vec![0.0; n_blocks + 1]; k_max + 1];
        for (k, row) in table.iter_mut().enumerate() {
            for (n, cell) in row.iter_mut().enumerate().skip(1) {
                *cell = if k == 0 { delta } else { delta * f(n - 1, k)? };
            }
        }
        Ok(table)
    };
    match mode {
        BoundMode::Volume => tabulate(volume.delta, &|n, k| theta(n, k, &volume)),
        BoundMode::InterfaceEstimate => {
            if !it.last_node_is_interface {
                return Err(Error::Unsupported(format!(
                    "interface estimate for `{}`: the last block node is not the block end point",
                    it.label
                )));
            }
            let c = extract_interface_coefficients(it, run).as_bound_coefficients();
            tabulate(c.delta, &|n, k| theta(n, k, &c))
        }
        BoundMode::GanderHairer => tabulate(volume.delta, &|n, k| {
            gander_hairer_theta(n, k, volume.alpha, volume.beta)
        }),
        BoundMode::Linear => {
            let norm = global_iteration_matrix(it, n_blocks)?.inf_norm();
            tabulate(volume.delta, &|_, k| Ok(norm.powi(k as i32)))
        }
    }
}
