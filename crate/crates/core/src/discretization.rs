//! Normalized block nodes and the Lagrange matrices built on them.
//!
//! All node families are right-inclusive: the last node of a block is `τ = 1`,
//! so the block's final value is the interface value handed to the next block.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::RealMatrix;

/// Node spacing below which Lagrange bases are considered ill-conditioned.
pub const MIN_NODE_SPACING: f64 = 1e-12;

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;

/// Family of normalized nodes in one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeFamily {
    /// `τ_m = m/M`, `m = 1..M` (left endpoint excluded).
    Equidistant,
    /// `τ_m = (m-1)/(M-1)`, `m = 1..M`; both block boundaries are nodes.
    EquidistantClosed,
    /// Gauss-Lobatto-Legendre points, including both endpoints.
    LobattoLegendre,
    /// Right Radau (Radau-IIA) points, including `τ = 1` but not `τ = 0`.
    RadauRight,
}

impl NodeFamily {
    pub fn name(self) -> &'static str {
        match self {
            NodeFamily::Equidistant => "equidistant",
            NodeFamily::EquidistantClosed => "equidistant_closed",
            NodeFamily::LobattoLegendre => "lobatto_legendre",
            NodeFamily::RadauRight => "radau_right",
        }
    }

    /// Smallest admissible node count.
    pub fn min_nodes(self) -> usize {
        match self {
            NodeFamily::Equidistant | NodeFamily::RadauRight => 1,
            NodeFamily::EquidistantClosed | NodeFamily::LobattoLegendre => 2,
        }
    }
}

impl fmt::Display for NodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The normalized nodes of one time block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiscretization {
    family: NodeFamily,
    nodes: Vec<f64>,
}

impl BlockDiscretization {
    pub fn new(family: NodeFamily, m: usize) -> Result<Self> {
        generate_nodes(family, m)
    }

    pub fn family(&self) -> NodeFamily {
        self.family
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn includes_right_endpoint(&self) -> bool {
        self.nodes.last().is_some_and(|&t| (t - 1.0).abs() <= 1e-14)
    }
}

/// Generates `m` normalized nodes of the given family.
pub fn generate_nodes(family: NodeFamily, m: usize) -> Result<BlockDiscretization> {
    if m < family.min_nodes() {
        return Err(Error::Parameter(alloc::format!(
            "{family} blocks need at least {} node(s), got {m}",
            family.min_nodes()
        )));
    }
    let nodes = match family {
        NodeFamily::Equidistant => (1..=m).map(|i| i as f64 / m as f64).collect(),
        NodeFamily::EquidistantClosed => (0..m).map(|i| i as f64 / (m - 1) as f64).collect(),
        NodeFamily::LobattoLegendre => lobatto_nodes(m)?,
        NodeFamily::RadauRight => radau_right_nodes(m)?,
    };
    Ok(BlockDiscretization { family, nodes })
}

/// Legendre polynomials `P_n(x)`, `P_{n-1}(x)` and the derivative `P'_n(x)`.
fn legendre(n: usize, x: f64) -> (f64, f64, f64) {
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    // p[k], p[k-1], dp[k], dp[k-1]
    let (mut p, mut p_prev) = (x, 1.0);
    let (mut dp, mut dp_prev) = (1.0, 0.0);
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        let dp_next = dp_prev + (2.0 * kf + 1.0) * p;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    (p, p_prev, dp)
}

fn to_unit_interval(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("nodes are finite"));
    xs.into_iter().map(|x| 0.5 * (x + 1.0)).collect()
}

fn lobatto_nodes(m: usize) -> Result<Vec<f64>> {
    let n = m - 1;
    // Chebyshev-Gauss-Lobatto starting guesses; the update is Newton's method
    // on (1 - x²) P'_n(x) written through the three-term recurrence.
    let mut xs: Vec<f64> = (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect();
    for x in xs.iter_mut().skip(1).take(n.saturating_sub(1)) {
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, p_prev, _) = legendre(n, *x);
            let step = (*x * p - p_prev) / ((n + 1) as f64 * p);
            *x -= step;
            if step.abs() < NEWTON_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Parameter(alloc::format!(
                "Lobatto node iteration did not converge for M = {m}"
            )));
        }
    }
    xs[0] = 1.0;
    xs[n] = -1.0;
    let mut nodes = to_unit_interval(xs);
    symmetrize(&mut nodes);
    nodes[0] = 0.0;
    nodes[n] = 1.0;
    Ok(nodes)
}

fn symmetrize(nodes: &mut [f64]) {
    let len = nodes.len();
    for i in 0..len / 2 {
        let d = 0.5 * (nodes[len - 1 - i] - nodes[i]);
        nodes[i] = 0.5 - d;
        nodes[len - 1 - i] = 0.5 + d;
    }
    if len % 2 == 1 {
        nodes[len / 2] = 0.5;
    }
}

fn radau_right_nodes(m: usize) -> Result<Vec<f64>> {
    // Roots of P_m - P_{m-1}; x = 1 is a root, the remaining m - 1 are found by
    // Newton's method with that root deflated.
    let mut xs = vec![1.0];
    for j in 1..m {
        let mut x = (2.0 * PI * j as f64 / (2 * m - 1) as f64).cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (pm, pm1, dpm) = legendre(m, x);
            let (_, _, dpm1) = legendre(m - 1, x);
            let f = pm - pm1;
            let df = dpm - dpm1;
            let mut denom = df / f - 1.0 / (x - 1.0);
            for &r in &xs[1..] {
                denom -= 1.0 / (x - r);
            }
            let step = 1.0 / denom;
            x -= step;
            if step.abs() < NEWTON_TOL || f == 0.0 {
                converged = true;
                break;
            }
        }
        if !converged || !(-1.0..1.0).contains(&x) {
            return Err(Error::Parameter(alloc::format!(
                "Radau node iteration did not converge for M = {m}"
            )));
        }
        xs.push(x);
    }
    let mut nodes = to_unit_interval(xs);
    nodes[m - 1] = 1.0;
    Ok(nodes)
}

/// Barycentric weights `w_j = 1 / Π_{i≠j} (τ_j − τ_i)`.
fn barycentric_weights(nodes: &[f64]) -> Result<Vec<f64>> {
    let mut weights = vec![1.0; nodes.len()];
    for (j, &tj) in nodes.iter().enumerate() {
        for (i, &ti) in nodes.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = tj - ti;
            if d.abs() < MIN_NODE_SPACING {
                return Err(Error::Conditioning {
                    spacing: d.abs(),
                    threshold: MIN_NODE_SPACING,
                });
            }
            weights[j] /= d;
        }
    }
    Ok(weights)
}

/// Values `l_j(x)` of every Lagrange basis polynomial at `x`.
fn lagrange_basis_at(nodes: &[f64], weights: &[f64], x: f64, out: &mut [f64]) {
    if let Some(k) = nodes.iter().position(|&t| t == x) {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[k] = 1.0;
        return;
    }
    let mut denom = 0.0;
    for ((o, &t), &w) in out.iter_mut().zip(nodes).zip(weights) {
        *o = w / (x - t);
        denom += *o;
    }
    out.iter_mut().for_each(|v| *v /= denom);
}

/// Gauss-Legendre rule with `n` points on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            for _ in 0..NEWTON_MAX_ITER {
                let (p, _, dp) = legendre(n, x);
                let step = p / dp;
                x -= step;
                if step.abs() < NEWTON_TOL {
                    break;
                }
            }
            let (_, _, dp) = legendre(n, x);
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// `q[m][j] = ∫_0^{τ_m} l_j(s) ds` for the Lagrange basis on the block nodes.
///
/// The integrals are evaluated with an `M`-point Gauss-Legendre rule on
/// `[0, τ_m]`, exact for the degree `M − 1` basis polynomials.
pub fn lagrange_integration_coefficients(disc: &BlockDiscretization) -> Result<RealMatrix> {
    let nodes = disc.nodes();
    let m = nodes.len();
    let weights = barycentric_weights(nodes)?;
    let rule = gauss_legendre(m);
    let mut q = RealMatrix::zeros(m, m);
    let mut basis = vec![0.0; m];
    for (row, &tau) in nodes.iter().enumerate() {
        for &(x, w) in &rule {
            let s = 0.5 * tau * (x + 1.0);
            lagrange_basis_at(nodes, &weights, s, &mut basis);
            for (j, &l) in basis.iter().enumerate() {
                q[(row, j)] += 0.5 * tau * w * l;
            }
        }
    }
    Ok(q)
}

/// Interpolation matrix with entries `l_j(dst_i)`, where `l_j` is the Lagrange
/// basis on `src`.
pub fn interpolation_matrix(src: &[f64], dst: &[f64]) -> Result<RealMatrix> {
    if src.is_empty() {
        return Err(Error::Parameter("interpolation from an empty node set".into()));
    }
    let weights = barycentric_weights(src)?;
    let mut out = RealMatrix::zeros(dst.len(), src.len());
    let mut basis = vec![0.0; src.len()];
    for (i, &x) in dst.iter().enumerate() {
        lagrange_basis_at(src, &weights, x, &mut basis);
        for (j, &l) in basis.iter().enumerate() {
            out[(i, j)] = l;
        }
    }
    Ok(out)
}
