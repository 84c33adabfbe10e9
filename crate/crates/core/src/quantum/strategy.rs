//! States, effects and the Born rule for the two-source network.
//!
//! The four qubits are ordered `(A, B_left, B_right, C)`. The first source
//! feeds `A` and `B_left`, the second feeds `B_right` and `C`, and Bob's
//! effects act jointly on his two qubits.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::behavior::{index, Behavior, DoData};
use crate::error::{Error, Result};

use super::linalg::{kron, ComplexMatrix, C64, HERMITIAN_TOL, MAX_DIM};

/// Slack allowed on negative eigenvalues of states and effects.
pub const PSD_TOL: f64 = 1e-10;
pub const COMPLETENESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() > MAX_DIM {
            return Err(Error::Dimension(format!(
                "density operator must be square of dimension <= {MAX_DIM}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::InvalidQuantum("density operator is not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::InvalidQuantum(format!("trace is {tr}, expected 1")));
        }
        let min_eig = matrix.hermitian_eigenvalues()?[0];
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidQuantum(format!(
                "density operator has eigenvalue {min_eig}"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        Self::new(ComplexMatrix::projector(amplitudes))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// `(|01> + |10>)/sqrt(2)`.
    pub fn psi_plus() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let z = C64::new(0.0, 0.0);
        Self::pure(&[z, h, h, z]).expect("valid Bell state")
    }

    /// Isotropic mixture `v * self + (1 - v) * 1/d`.
    pub fn with_visibility(&self, v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidInput(format!("visibility {v} outside [0,1]")));
        }
        let d = self.dim();
        let noise = ComplexMatrix::identity(d).scale((1.0 - v) / d as f64);
        Ok(Self {
            matrix: &self.matrix.scale(v) + &noise,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Parameters of the one-parameter quantum family with isotropic noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub theta: f64,
    pub visibility: f64,
}

#[derive(Debug, Clone)]
pub struct QuantumStrategy {
    source_ab: DensityOperator,
    source_bc: DensityOperator,
    /// `effects_a[b][a]`, 2x2.
    effects_a: [[ComplexMatrix; 2]; 2],
    /// `effects_b[b]`, 4x4.
    effects_b: [ComplexMatrix; 2],
    /// `effects_c[b][c]`, 2x2.
    effects_c: [[ComplexMatrix; 2]; 2],
    family: Option<FamilyParams>,
}

fn check_povm(label: &str, effects: &[ComplexMatrix; 2], dim: usize) -> Result<()> {
    for (k, e) in effects.iter().enumerate() {
        if e.rows() != dim || e.cols() != dim {
            return Err(Error::Dimension(format!(
                "{label} effect {k} is {}x{}, expected {dim}x{dim}",
                e.rows(),
                e.cols()
            )));
        }
        let min_eig = e.hermitian_eigenvalues()?[0];
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidQuantum(format!(
                "{label} effect {k} has eigenvalue {min_eig}"
            )));
        }
    }
    let total = &effects[0] + &effects[1];
    if total.max_abs_diff(&ComplexMatrix::identity(dim)) > COMPLETENESS_TOL {
        return Err(Error::InvalidQuantum(format!("{label} effects do not sum to identity")));
    }
    Ok(())
}

/// Two-outcome projective measurement of a Hermitian, unitary observable:
/// outcome 0 is the +1 eigenspace.
pub fn observable_effects(observable: &ComplexMatrix) -> [ComplexMatrix; 2] {
    let id = ComplexMatrix::identity(observable.rows());
    [(&id + observable).scale(0.5), (&id - observable).scale(0.5)]
}

impl QuantumStrategy {
    pub fn new(
        source_ab: DensityOperator,
        source_bc: DensityOperator,
        effects_a: [[ComplexMatrix; 2]; 2],
        effects_b: [ComplexMatrix; 2],
        effects_c: [[ComplexMatrix; 2]; 2],
    ) -> Result<Self> {
        if source_ab.dim() != 4 || source_bc.dim() != 4 {
            return Err(Error::Dimension("both sources must be two-qubit states".into()));
        }
        for b in 0..2 {
            check_povm(&format!("A|b={b}"), &effects_a[b], 2)?;
            check_povm(&format!("C|b={b}"), &effects_c[b], 2)?;
        }
        check_povm("B", &effects_b, 4)?;
        Ok(Self {
            source_ab,
            source_bc,
            effects_a,
            effects_b,
            effects_c,
            family: None,
        })
    }

    /// Bell-state sources with visibility `v`, `sigma_x` for `b = 0` and
    /// `sigma_z` for `b = 1` on both outer parties, and Bob projecting on
    /// `sin(theta)|01> + cos(theta)|10>`.
    pub fn family(theta: f64, visibility: f64) -> Result<Self> {
        let source = DensityOperator::psi_plus().with_visibility(visibility)?;
        let x = observable_effects(&ComplexMatrix::pauli_x());
        let z = observable_effects(&ComplexMatrix::pauli_z());
        let z0 = C64::new(0.0, 0.0);
        let psi = [z0, C64::new(theta.sin(), 0.0), C64::new(theta.cos(), 0.0), z0];
        let hit = ComplexMatrix::projector(&psi);
        let miss = &ComplexMatrix::identity(4) - &hit;
        let mut s = Self::new(
            source.clone(),
            source,
            [x.clone(), z.clone()],
            [hit, miss],
            [x, z],
        )?;
        s.family = Some(FamilyParams { theta, visibility });
        Ok(s)
    }

    pub fn family_params(&self) -> Option<FamilyParams> {
        self.family
    }

    pub fn with_effects_a(mut self, effects_a: [[ComplexMatrix; 2]; 2]) -> Result<Self> {
        for b in 0..2 {
            check_povm(&format!("A|b={b}"), &effects_a[b], 2)?;
        }
        self.effects_a = effects_a;
        self.family = None;
        Ok(self)
    }

    pub fn with_source_ab(mut self, source: DensityOperator) -> Result<Self> {
        if source.dim() != 4 {
            return Err(Error::Dimension("source must be a two-qubit state".into()));
        }
        self.source_ab = source;
        self.family = None;
        Ok(self)
    }

    pub fn source_ab(&self) -> &DensityOperator {
        &self.source_ab
    }

    pub fn source_bc(&self) -> &DensityOperator {
        &self.source_bc
    }

    /// `P(a,b,c) = Tr[(rho_AB ⊗ rho_BC)(E_{a|b} ⊗ E_b ⊗ E_{c|b})]`.
    pub fn born_behavior(&self) -> Result<Behavior> {
        let state = kron(self.source_ab.matrix(), self.source_bc.matrix());
        let mut p = [0.0; 8];
        for b in 0..2 {
            for a in 0..2 {
                let left = kron(&self.effects_a[b][a], &self.effects_b[b]);
                for c in 0..2 {
                    let effect = kron(&left, &self.effects_c[b][c]);
                    let value = state.trace_product(&effect)?;
                    p[index(a, b, c)] = value.re;
                }
            }
        }
        emit(p)
    }

    /// Interventional conditionals: Bob's measurement is replaced by a fixed
    /// value, so only the reduced states of the outer parties matter.
    pub fn born_do_data(&self) -> Result<DoData> {
        let id = ComplexMatrix::identity(2);
        let mut a_do = [[0.0; 2]; 2];
        let mut c_do = [[0.0; 2]; 2];
        for b in 0..2 {
            for x in 0..2 {
                let ea = kron(&self.effects_a[b][x], &id);
                a_do[b][x] = self.source_ab.matrix().trace_product(&ea)?.re;
                let ec = kron(&id, &self.effects_c[b][x]);
                c_do[b][x] = self.source_bc.matrix().trace_product(&ec)?.re;
            }
        }
        for col in a_do.iter_mut().chain(c_do.iter_mut()) {
            let total = col[0] + col[1];
            for v in col.iter_mut() {
                *v = v.max(0.0) / total;
            }
        }
        DoData::new(a_do, c_do)
    }
}

/// Clamps tiny negatives and renormalizes before handing out a behavior.
fn emit(mut p: [f64; 8]) -> Result<Behavior> {
    for v in p.iter_mut() {
        if *v < -1e-12 {
            return Err(Error::InvalidQuantum(format!("Born probability {v} is negative")));
        }
        *v = v.max(0.0);
    }
    let total: f64 = p.iter().sum();
    Behavior::new(p.map(|v| v / total))
}
