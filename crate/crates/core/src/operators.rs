//! Block operator pairs `(φ, χ)` for collocation, SDC and Runge-Kutta blocks,
//! and the two-level setup used by the multigrid-type iterations.
//!
//! A pair satisfies `φ u[n+1] = χ u[n]`; its block propagator is `ψ = φ⁻¹χ`.
//! `φ⁻¹` is never formed: every pair keeps an LU factorization of `φ` and
//! applies it by solving.

use alloc::format;
use alloc::string::String;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::discretization::{
    generate_nodes, interpolation_matrix, lagrange_integration_coefficients,
    BlockDiscretization, NodeFamily,
};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Lu, RealMatrix};

/// Tolerance for the transfer-operator assumptions checked at construction.
pub const ASSUMPTION_TOL: f64 = 1e-12;

/// Runge-Kutta methods used in the experiments, described by their stability
/// function `R(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RkMethod {
    BackwardEuler,
    Heun,
    ClassicRk4,
}

impl RkMethod {
    pub fn name(self) -> &'static str {
        match self {
            RkMethod::BackwardEuler => "backward_euler",
            RkMethod::Heun => "heun_rk2",
            RkMethod::ClassicRk4 => "classic_rk4",
        }
    }

    /// Evaluates the stability function `R(z)`.
    pub fn stability(self, z: Complex64) -> Result<Complex64> {
        stability_value(self, z)
    }
}

impl core::fmt::Display for RkMethod {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn stability_value(method: RkMethod, z: Complex64) -> Result<Complex64> {
    let one = Complex64::one();
    Ok(match method {
        RkMethod::BackwardEuler => {
            if (one - z).norm() == 0.0 {
                return Err(Error::Pole { re: z.re, im: z.im });
            }
            one / (one - z)
        }
        RkMethod::Heun => one + z + z * z / 2.0,
        RkMethod::ClassicRk4 => {
            let z2 = z * z;
            one + z + z2 / 2.0 + z2 * z / 6.0 + z2 * z2 / 24.0
        }
    })
}

/// How a Runge-Kutta integration over one block is cast into block operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RkFormulation {
    /// A single value per block (`M = 1`), `φ = R(λΔt/ℓ)^{-ℓ}`, `χ = 1`.
    Interface,
    /// One value per step (`M = ℓ`, nodes `m/M`).
    Volume,
    /// One value per step plus the left boundary (`M = ℓ + 1`, nodes
    /// `(m-1)/(M-1)`); the first node copies the previous block's last value.
    VolumeClosed,
}

impl RkFormulation {
    pub fn name(self) -> &'static str {
        match self {
            RkFormulation::Interface => "interface",
            RkFormulation::Volume => "volume",
            RkFormulation::VolumeClosed => "volume_closed",
        }
    }

    /// Number of block nodes for `steps` Runge-Kutta steps.
    pub fn nodes_for_steps(self, steps: usize) -> usize {
        match self {
            RkFormulation::Interface => 1,
            RkFormulation::Volume => steps,
            RkFormulation::VolumeClosed => steps + 1,
        }
    }
}

/// A square matrix together with its LU factorization.
#[derive(Debug, Clone)]
pub struct FactoredMatrix {
    matrix: ComplexMatrix,
    lu: Lu<Complex64>,
}

impl FactoredMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let lu = Lu::new(&matrix)?;
        Ok(Self { matrix, lu })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `A⁻¹ B`.
    pub fn solve(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.lu.solve(rhs)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// The block operators `(φ, χ)` of one integrator on one block.
#[derive(Debug, Clone)]
pub struct BlockOperatorPair {
    phi: FactoredMatrix,
    chi: ComplexMatrix,
    psi: ComplexMatrix,
    lam_dt: Complex64,
    disc: BlockDiscretization,
}

impl BlockOperatorPair {
    pub fn new(
        phi: ComplexMatrix,
        chi: ComplexMatrix,
        lam_dt: Complex64,
        disc: BlockDiscretization,
    ) -> Result<Self> {
        let m = disc.len();
        if phi.rows() != m || phi.cols() != m || chi.rows() != m || chi.cols() != m {
            return Err(Error::Dimension(format!(
                "operators must be {m}x{m}, got phi {}x{} and chi {}x{}",
                phi.rows(),
                phi.cols(),
                chi.rows(),
                chi.cols()
            )));
        }
        if !chi.is_finite() {
            return Err(Error::Parameter("chi has non-finite entries".into()));
        }
        let phi = FactoredMatrix::new(phi)?;
        let psi = phi.solve(&chi);
        Ok(Self {
            phi,
            chi,
            psi,
            lam_dt,
            disc,
        })
    }

    pub fn phi(&self) -> &ComplexMatrix {
        self.phi.matrix()
    }

    pub fn phi_factored(&self) -> &FactoredMatrix {
        &self.phi
    }

    pub fn chi(&self) -> &ComplexMatrix {
        &self.chi
    }

    /// Block propagator `ψ = φ⁻¹χ`.
    pub fn psi(&self) -> &ComplexMatrix {
        &self.psi
    }

    /// `φ⁻¹ B`.
    pub fn solve(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.phi.solve(rhs)
    }

    pub fn lam_dt(&self) -> Complex64 {
        self.lam_dt
    }

    pub fn disc(&self) -> &BlockDiscretization {
        &self.disc
    }

    pub fn dim(&self) -> usize {
        self.disc.len()
    }
}

/// `H`: every row is `(0, …, 0, 1)`, copying the previous block's last value.
pub fn transfer_last_value(m: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m, m, |_, j| {
        if j + 1 == m {
            Complex64::one()
        } else {
            Complex64::zero()
        }
    })
}

/// Collocation block operators `φ = I − Q`, `χ = H` with
/// `Q = λΔt (∫_0^{τ_m} l_j)`.
pub fn collocation_pair(disc: &BlockDiscretization, lam_dt: Complex64) -> Result<BlockOperatorPair> {
    if !disc.includes_right_endpoint() {
        return Err(Error::Unsupported(format!(
            "collocation blocks need τ_M = 1 ({} nodes do not end at 1)",
            disc.family()
        )));
    }
    let q = quadrature_matrix(disc, lam_dt)?;
    let m = disc.len();
    let phi = &ComplexMatrix::identity(m) - &q;
    BlockOperatorPair::new(phi, transfer_last_value(m), lam_dt, disc.clone())
}

/// Collocation quadrature matrix `Q = λΔt (q_{m,j})`.
pub fn quadrature_matrix(disc: &BlockDiscretization, lam_dt: Complex64) -> Result<ComplexMatrix> {
    Ok(lagrange_integration_coefficients(disc)?
        .to_complex()
        .scale(lam_dt))
}

/// SDC approximation `Q_Δ` of the quadrature matrix: one backward Euler step
/// between consecutive nodes, with `τ_0 = 0`.
pub fn qdelta_backward_euler(disc: &BlockDiscretization, lam_dt: Complex64) -> ComplexMatrix {
    let nodes = disc.nodes();
    let m = nodes.len();
    ComplexMatrix::from_fn(m, m, |row, j| {
        if j > row {
            return Complex64::zero();
        }
        let left = if j == 0 { 0.0 } else { nodes[j - 1] };
        lam_dt * (nodes[j] - left)
    })
}

/// Block operators of `steps` Runge-Kutta steps per block.
pub fn rk_pair(
    method: RkMethod,
    steps: usize,
    lam_dt: Complex64,
    formulation: RkFormulation,
) -> Result<BlockOperatorPair> {
    if steps == 0 {
        return Err(Error::Parameter("Runge-Kutta blocks need at least one step".into()));
    }
    let amplification = method.stability(lam_dt / steps as f64)?;
    if amplification.norm() == 0.0 {
        return Err(Error::Singular {
            pivot: 0.0,
            threshold: 0.0,
        });
    }
    let r = amplification.inv();
    let one = Complex64::one();
    match formulation {
        RkFormulation::Interface => {
            let phi = ComplexMatrix::from_diagonal(&[r.powi(steps as i32)]);
            let disc = generate_nodes(NodeFamily::Equidistant, 1)?;
            BlockOperatorPair::new(phi, ComplexMatrix::identity(1), lam_dt, disc)
        }
        RkFormulation::Volume | RkFormulation::VolumeClosed => {
            let closed = formulation == RkFormulation::VolumeClosed;
            let m = formulation.nodes_for_steps(steps);
            let family = if closed {
                NodeFamily::EquidistantClosed
            } else {
                NodeFamily::Equidistant
            };
            let phi = ComplexMatrix::from_fn(m, m, |i, j| {
                if i == j {
                    if closed && i == 0 {
                        one
                    } else {
                        r
                    }
                } else if i == j + 1 {
                    -one
                } else {
                    Complex64::zero()
                }
            });
            let chi = ComplexMatrix::from_fn(m, m, |i, j| {
                if i == 0 && j + 1 == m {
                    one
                } else {
                    Complex64::zero()
                }
            });
            BlockOperatorPair::new(phi, chi, lam_dt, generate_nodes(family, m)?)
        }
    }
}

/// Time integrator of one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Collocation {
        family: NodeFamily,
        nodes: usize,
    },
    RungeKutta {
        method: RkMethod,
        steps: usize,
        formulation: RkFormulation,
    },
}

impl Integrator {
    pub fn pair(&self, lam_dt: Complex64) -> Result<BlockOperatorPair> {
        match *self {
            Integrator::Collocation { family, nodes } => {
                collocation_pair(&generate_nodes(family, nodes)?, lam_dt)
            }
            Integrator::RungeKutta {
                method,
                steps,
                formulation,
            } => rk_pair(method, steps, lam_dt, formulation),
        }
    }

    pub fn block_size(&self) -> usize {
        match *self {
            Integrator::Collocation { nodes, .. } => nodes,
            Integrator::RungeKutta {
                steps, formulation, ..
            } => formulation.nodes_for_steps(steps),
        }
    }

    /// Whether `T_F^C χ = χ_C T_F^C` is expected between two levels of this
    /// integrator.
    fn transmission_commutes(&self) -> bool {
        !matches!(
            self,
            Integrator::RungeKutta {
                formulation: RkFormulation::Volume,
                ..
            }
        )
    }

    pub fn describe(&self) -> String {
        match self {
            Integrator::Collocation { family, nodes } => format!("collocation({family}, M={nodes})"),
            Integrator::RungeKutta {
                method,
                steps,
                formulation,
            } => format!("{method}({}, steps={steps})", formulation.name()),
        }
    }
}

/// Cheaper approximation `φ̃` of a level's integration operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approximation {
    /// `φ̃ = I − Q_Δ` with backward Euler steps between the level's nodes.
    QDeltaBackwardEuler,
    /// A Runge-Kutta operator in the level's formulation. `steps = None` uses
    /// the level's own step count; interface blocks may use a different count.
    RungeKutta {
        method: RkMethod,
        steps: Option<usize>,
    },
}

/// Builds `φ̃` for the level described by `integrator` and `pair`.
pub fn approximate_operator(
    approx: &Approximation,
    integrator: &Integrator,
    pair: &BlockOperatorPair,
) -> Result<FactoredMatrix> {
    let lam_dt = pair.lam_dt();
    let matrix = match *approx {
        Approximation::QDeltaBackwardEuler => {
            let m = pair.dim();
            &ComplexMatrix::identity(m) - &qdelta_backward_euler(pair.disc(), lam_dt)
        }
        Approximation::RungeKutta { method, steps } => {
            let (level_steps, formulation) = match *integrator {
                Integrator::RungeKutta {
                    steps, formulation, ..
                } => (steps, formulation),
                Integrator::Collocation { .. } => {
                    return Err(Error::Unsupported(
                        "Runge-Kutta approximation of a collocation level".into(),
                    ))
                }
            };
            let steps = steps.unwrap_or(level_steps);
            if formulation != RkFormulation::Interface && steps != level_steps {
                return Err(Error::Parameter(format!(
                    "volume approximation must use the level's {level_steps} steps, got {steps}"
                )));
            }
            rk_pair(method, steps, lam_dt, formulation)?.phi().clone()
        }
    };
    FactoredMatrix::new(matrix)
}

/// Coarse level of a two-level setup.
#[derive(Debug, Clone)]
pub struct CoarseLevel {
    pub pair: BlockOperatorPair,
    pub approx: Option<FactoredMatrix>,
    /// `T_F^C`, `M^C × M`.
    pub restrict: RealMatrix,
    /// `T_C^F`, `M × M^C`.
    pub prolong: RealMatrix,
}

impl CoarseLevel {
    /// `T_F^C χ − χ_C T_F^C`.
    pub fn delta_chi(&self, fine_chi: &ComplexMatrix) -> ComplexMatrix {
        let restrict = self.restrict.to_complex();
        &(&restrict * fine_chi) - &(self.pair.chi() * &restrict)
    }

    /// `T_C^F φ_C⁻¹ T_F^C`, an `M × M` matrix.
    pub fn coarse_inverse(&self) -> ComplexMatrix {
        let restricted = self.restrict.to_complex();
        &self.prolong.to_complex() * &self.pair.solve(&restricted)
    }

    /// `T_C^F φ̃_C⁻¹ T_F^C`, if the coarse approximation exists.
    pub fn coarse_approx_inverse(&self) -> Option<ComplexMatrix> {
        let approx = self.approx.as_ref()?;
        Some(&self.prolong.to_complex() * &approx.solve(&self.restrict.to_complex()))
    }
}

/// Fine operators, an optional approximation `φ̃`, and an optional coarse level.
#[derive(Debug, Clone)]
pub struct TwoLevelSetup {
    pub fine: BlockOperatorPair,
    pub fine_approx: Option<FactoredMatrix>,
    pub coarse: Option<CoarseLevel>,
}

impl TwoLevelSetup {
    pub fn single_level(fine: BlockOperatorPair, fine_approx: Option<FactoredMatrix>) -> Self {
        Self {
            fine,
            fine_approx,
            coarse: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.fine.dim()
    }

    /// `‖T_F^C T_C^F − I‖∞`, or zero without a coarse level.
    pub fn transfer_residual(&self) -> f64 {
        self.coarse.as_ref().map_or(0.0, |c| {
            let product = &c.restrict * &c.prolong;
            (&product - &RealMatrix::identity(product.rows())).inf_norm()
        })
    }

    /// `‖Δ_χ‖∞`, or zero without a coarse level.
    pub fn delta_chi_norm(&self) -> f64 {
        self.coarse
            .as_ref()
            .map_or(0.0, |c| c.delta_chi(self.fine.chi()).inf_norm())
    }
}

/// Builds the fine level (and its approximation when `approx` is given).
pub fn build_single_level(
    fine: &Integrator,
    approx: Option<&Approximation>,
    lam_dt: Complex64,
) -> Result<TwoLevelSetup> {
    let pair = fine.pair(lam_dt)?;
    let fine_approx = approx
        .map(|a| approximate_operator(a, fine, &pair))
        .transpose()?;
    Ok(TwoLevelSetup::single_level(pair, fine_approx))
}

/// Builds fine and coarse levels with the same integrator kind, polynomial
/// transfer operators between their nodes, and checks the transfer
/// assumptions.
pub fn build_two_level(
    fine: &Integrator,
    coarse: &Integrator,
    approx: Option<&Approximation>,
    lam_dt: Complex64,
) -> Result<TwoLevelSetup> {
    let same_kind = match (fine, coarse) {
        (Integrator::Collocation { .. }, Integrator::Collocation { .. }) => true,
        (
            Integrator::RungeKutta { formulation: a, .. },
            Integrator::RungeKutta { formulation: b, .. },
        ) => a == b,
        _ => false,
    };
    if !same_kind {
        return Err(Error::Parameter(format!(
            "coarse level {} must use the fine level's kind {}",
            coarse.describe(),
            fine.describe()
        )));
    }
    if coarse.block_size() > fine.block_size() {
        return Err(Error::Parameter(format!(
            "coarse block has {} nodes, more than the fine block's {}",
            coarse.block_size(),
            fine.block_size()
        )));
    }
    let mut setup = build_single_level(fine, approx, lam_dt)?;
    let coarse_pair = coarse.pair(lam_dt)?;
    let coarse_approx = approx
        .map(|a| approximate_operator(a, coarse, &coarse_pair))
        .transpose()?;
    let fine_nodes = setup.fine.disc().nodes();
    let coarse_nodes = coarse_pair.disc().nodes();
    let restrict = interpolation_matrix(fine_nodes, coarse_nodes)?;
    let prolong = interpolation_matrix(coarse_nodes, fine_nodes)?;
    setup.coarse = Some(CoarseLevel {
        pair: coarse_pair,
        approx: coarse_approx,
        restrict,
        prolong,
    });

    let residual = setup.transfer_residual();
    if residual > ASSUMPTION_TOL {
        return Err(Error::Assumption {
            assumption: "restriction after prolongation is the identity",
            residual,
        });
    }
    if fine.transmission_commutes() {
        let residual = setup.delta_chi_norm();
        if residual > ASSUMPTION_TOL {
            return Err(Error::Assumption {
                assumption: "restriction commutes with the transmission operator",
                residual,
            });
        }
    }
    Ok(setup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    #[test]
    fn stability_values() {
        let z0 = Complex64::zero();
        for m in [RkMethod::BackwardEuler, RkMethod::Heun, RkMethod::ClassicRk4] {
            assert_eq!(stability_value(m, z0).unwrap(), Complex64::one());
        }
        assert_eq!(
            stability_value(RkMethod::BackwardEuler, c64(-1.0, 0.0)).unwrap(),
            c64(0.5, 0.0)
        );
        assert_eq!(
            stability_value(RkMethod::Heun, c64(0.0, 2.0)).unwrap(),
            c64(-1.0, 2.0)
        );
        assert!(matches!(
            stability_value(RkMethod::BackwardEuler, c64(1.0, 0.0)),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn collocation_single_node_is_backward_euler() {
        let z = c64(-0.3, 0.7);
        let disc = generate_nodes(NodeFamily::RadauRight, 1).unwrap();
        let pair = collocation_pair(&disc, z).unwrap();
        assert!((pair.phi()[(0, 0)] - (Complex64::one() - z)).norm() < 1e-15);
        assert_eq!(pair.chi()[(0, 0)], Complex64::one());
        let be = rk_pair(RkMethod::BackwardEuler, 1, z, RkFormulation::Interface).unwrap();
        assert!((be.phi()[(0, 0)] - pair.phi()[(0, 0)]).norm() < 1e-15);
    }

    #[test]
    fn collocation_without_dynamics() {
        let disc = generate_nodes(NodeFamily::LobattoLegendre, 4).unwrap();
        let pair = collocation_pair(&disc, Complex64::zero()).unwrap();
        assert_eq!(pair.phi(), &ComplexMatrix::identity(4));
        assert_eq!(pair.chi(), &transfer_last_value(4));
    }

    #[test]
    fn collocation_last_row_holds_simpson_weights() {
        let disc = generate_nodes(NodeFamily::LobattoLegendre, 3).unwrap();
        let z = c64(0.0, 0.1);
        let q = quadrature_matrix(&disc, z).unwrap();
        let expect = [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0];
        for (j, w) in expect.iter().enumerate() {
            assert!((q[(2, j)] - z * *w).norm() < 1e-15);
        }
    }

    #[test]
    fn chi_copies_last_entry() {
        let h = transfer_last_value(3);
        let v = [c64(1.0, 2.0), c64(3.0, 4.0), c64(5.0, 6.0)];
        assert_eq!(h.apply(&v), [v[2]; 3]);
    }

    #[test]
    fn qdelta_small_cases() {
        let z = c64(0.2, -1.0);
        let d1 = generate_nodes(NodeFamily::RadauRight, 1).unwrap();
        assert_eq!(qdelta_backward_euler(&d1, z).as_slice(), &[z]);
        let d2 = generate_nodes(NodeFamily::LobattoLegendre, 2).unwrap();
        assert_eq!(
            qdelta_backward_euler(&d2, z).as_slice(),
            &[Complex64::zero(), Complex64::zero(), Complex64::zero(), z]
        );
        let d3 = generate_nodes(NodeFamily::Equidistant, 3).unwrap();
        let qd = qdelta_backward_euler(&d3, z);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if j <= i { z / 3.0 } else { Complex64::zero() };
                assert!((qd[(i, j)] - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn rk_interface_trivia() {
        let z = c64(0.4, 0.1);
        let be = rk_pair(RkMethod::BackwardEuler, 1, z, RkFormulation::Interface).unwrap();
        assert!((be.phi()[(0, 0)] - (Complex64::one() - z)).norm() < 1e-15);
        let rk4 = rk_pair(RkMethod::ClassicRk4, 7, Complex64::zero(), RkFormulation::Interface).unwrap();
        assert_eq!(rk4.phi()[(0, 0)], Complex64::one());
    }

    #[test]
    fn rk_volume_structure() {
        let z = c64(-0.5, 1.0);
        let pair = rk_pair(RkMethod::Heun, 4, z, RkFormulation::Volume).unwrap();
        assert_eq!(pair.dim(), 4);
        assert_eq!(pair.chi()[(0, 3)], Complex64::one());
        assert_eq!(pair.chi().as_slice().iter().filter(|c| !c.is_zero()).count(), 1);
        let closed = rk_pair(RkMethod::Heun, 4, z, RkFormulation::VolumeClosed).unwrap();
        assert_eq!(closed.dim(), 5);
        assert_eq!(closed.disc().nodes()[0], 0.0);
        // Last entry of ψ·(1,…,1) is R(z/4)^4 for both.
        let r4 = RkMethod::Heun.stability(z / 4.0).unwrap().powi(4);
        assert!((pair.psi()[(3, 3)] - r4).norm() < 1e-14);
        assert!((closed.psi()[(4, 4)] - r4).norm() < 1e-14);
    }

    #[test]
    fn degenerate_coarsening_is_identity() {
        let fine = Integrator::Collocation {
            family: NodeFamily::LobattoLegendre,
            nodes: 4,
        };
        let setup = build_two_level(
            &fine,
            &fine,
            Some(&Approximation::QDeltaBackwardEuler),
            c64(0.0, 0.5),
        )
        .unwrap();
        let coarse = setup.coarse.as_ref().unwrap();
        assert!(coarse.restrict.max_abs_diff(&RealMatrix::identity(4)) < 1e-15);
        assert!(coarse.prolong.max_abs_diff(&RealMatrix::identity(4)) < 1e-15);
        assert!(coarse.pair.phi().max_abs_diff(setup.fine.phi()) < 1e-15);
    }

    #[test]
    fn nested_lobatto_transfers() {
        let setup = build_two_level(
            &Integrator::Collocation {
                family: NodeFamily::LobattoLegendre,
                nodes: 3,
            },
            &Integrator::Collocation {
                family: NodeFamily::LobattoLegendre,
                nodes: 2,
            },
            None,
            c64(0.0, 1.0),
        )
        .unwrap();
        let c = setup.coarse.unwrap();
        assert_eq!(c.restrict.as_slice(), &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let expect = [1.0, 0.0, 0.5, 0.5, 0.0, 1.0];
        assert!(c
            .prolong
            .as_slice()
            .iter()
            .zip(&expect)
            .all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn mismatched_kinds_fail() {
        let fine = Integrator::Collocation {
            family: NodeFamily::LobattoLegendre,
            nodes: 3,
        };
        let coarse = Integrator::RungeKutta {
            method: RkMethod::ClassicRk4,
            steps: 2,
            formulation: RkFormulation::Volume,
        };
        assert!(build_two_level(&fine, &coarse, None, c64(0.0, 1.0)).is_err());
        let bigger = Integrator::Collocation {
            family: NodeFamily::LobattoLegendre,
            nodes: 5,
        };
        assert!(build_two_level(&fine, &bigger, None, c64(0.0, 1.0)).is_err());
    }
}
