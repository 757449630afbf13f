use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::matrix::{exp_i, tensor, ComplexMatrix, Ket, I};
use crate::measure::pointer::{pointer_sigma, PointerSpace};
use crate::measure::povm::Povm;
use crate::spin1::{squared_projection, Triad};
use crate::tolerance;

/// A system coupled to a pointer apparatus by a unitary interaction.
///
/// The interaction is stored as a list of stages applied in order, so the
/// total unitary is `stages[n-1] ⋯ stages[1] stages[0]`. Sequential joint
/// measurements keep one stage per pointer, which lets Kraus operators be
/// extracted without forming the full product.
#[derive(Clone, Debug)]
pub struct MeasurementModel {
    sys_dim: usize,
    pointers: PointerSpace,
    ready: Ket,
    stages: Vec<ComplexMatrix>,
}

impl MeasurementModel {
    pub fn new(sys_dim: usize, pointers: PointerSpace, ready: Ket, unitary: ComplexMatrix) -> Result<Self> {
        Self::from_stages(sys_dim, pointers, ready, vec![unitary])
    }

    pub fn from_stages(
        sys_dim: usize,
        pointers: PointerSpace,
        ready: Ket,
        stages: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let total = sys_dim * pointers.dim();
        if ready.dim() != pointers.dim() {
            return Err(Error::DimensionMismatch { expected: pointers.dim(), found: ready.dim() });
        }
        ready.ensure_normalized()?;
        if stages.is_empty() {
            return Err(Error::InvalidParameter("measurement needs at least one stage".into()));
        }
        for s in &stages {
            if s.dim() != total {
                return Err(Error::DimensionMismatch { expected: total, found: s.dim() });
            }
            if !s.is_unitary(tolerance::UNITARY) {
                return Err(Error::InvalidParameter(format!(
                    "interaction is not unitary (defect {:.3e})",
                    s.unitary_defect()
                )));
            }
        }
        Ok(MeasurementModel { sys_dim, pointers, ready, stages })
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn pointers(&self) -> &PointerSpace {
        &self.pointers
    }

    pub fn ready_state(&self) -> &Ket {
        &self.ready
    }

    pub fn ap_dim(&self) -> usize {
        self.pointers.dim()
    }

    /// The total interaction unitary.
    pub fn unitary(&self) -> ComplexMatrix {
        let mut stages = self.stages.iter();
        let mut u = stages.next().expect("non-empty").clone();
        for s in stages {
            u = s * &u;
        }
        u
    }

    /// `U(|ψ⟩ ⊗ |φ₀⟩)`.
    pub fn evolve(&self, psi: &Ket) -> Ket {
        self.stages.iter().fold(psi.tensor(&self.ready), |v, s| s.apply(&v))
    }

    /// Kraus operators `T_α = (1 ⊗ ⟨α|) U (1 ⊗ |φ₀⟩)`, indexed by apparatus
    /// basis state.
    pub fn kraus_operators(&self) -> Vec<ComplexMatrix> {
        let d = self.ap_dim();
        // Column m' of U(1 ⊗ |φ₀⟩) is U(|m'⟩ ⊗ |φ₀⟩).
        let columns: Vec<Ket> = (0..self.sys_dim).map(|m| self.evolve(&Ket::basis(self.sys_dim, m))).collect();
        (0..d)
            .map(|alpha| ComplexMatrix::from_fn(self.sys_dim, |m, mp| columns[mp][m * d + alpha]))
            .collect()
    }

    pub fn povm(&self) -> Povm {
        Povm::from_kraus(self.sys_dim, self.pointers.clone(), self.kraus_operators())
    }
}

/// `(1 - P) ⊗ 1 + i P ⊗ σ_r`, an ideal measurement of the projector `P` on
/// pointer `r`.
pub fn single_ideal_unitary(p: &ComplexMatrix, r: usize, pointers: &PointerSpace) -> Result<ComplexMatrix> {
    let defect = p.projector_defect().max(p.hermitian_defect());
    if defect > tolerance::PROJECTOR {
        return Err(Error::NotProjector { defect });
    }
    let sigma = pointer_sigma(r, pointers)?;
    let one_sys = ComplexMatrix::identity(p.dim());
    let one_ap = ComplexMatrix::identity(pointers.dim());
    Ok(&tensor(&(&one_sys - p), &one_ap) + &tensor(p, &sigma).scale(I))
}

fn triad_projectors(t: &Triad) -> [ComplexMatrix; 3] {
    t.axes().map(|e| squared_projection(e).expect("triad axes are unit vectors"))
}

fn ready_triad_pointers() -> (PointerSpace, Ket) {
    let ps = PointerSpace::binary(3);
    let ready = Ket::basis(ps.dim(), ps.ready_index());
    (ps, ready)
}

/// `U = U₃U₂U₁`: three ideal measurements of `(e_r·L)²` chained in order, each
/// writing to its own pointer; apparatus ready state `|0,0,0⟩`.
pub fn sequential_model(t: &Triad) -> MeasurementModel {
    let (ps, ready) = ready_triad_pointers();
    let stages = triad_projectors(t)
        .iter()
        .enumerate()
        .map(|(r, p)| single_ideal_unitary(p, r, &ps).expect("squared projections are projectors"))
        .collect();
    MeasurementModel::from_stages(3, ps, ready, stages).expect("well-formed sequential model")
}

/// `U' = exp[i(π/2)(P₁⊗σ₁ + P₂⊗σ₂ + P₃⊗σ₃)]`: all three couplings switched on
/// together.
pub fn contemporaneous_model(t: &Triad) -> MeasurementModel {
    let (ps, ready) = ready_triad_pointers();
    let mut generator = ComplexMatrix::zeros(3 * ps.dim());
    for (r, p) in triad_projectors(t).iter().enumerate() {
        let sigma = pointer_sigma(r, &ps).expect("three binary pointers");
        generator = &generator + &tensor(p, &sigma);
    }
    let u = exp_i(&generator.scale_real(FRAC_PI_2)).expect("generator is Hermitian");
    MeasurementModel::new(3, ps, ready, u).expect("well-formed contemporaneous model")
}

/// How the three pointer couplings of a joint triad measurement are timed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum JointScheme {
    #[default]
    Sequential,
    Contemporaneous,
}

impl JointScheme {
    pub fn model(self, t: &Triad) -> MeasurementModel {
        match self {
            JointScheme::Sequential => sequential_model(t),
            JointScheme::Contemporaneous => contemporaneous_model(t),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            JointScheme::Sequential => "sequential",
            JointScheme::Contemporaneous => "contemporaneous",
        }
    }
}

impl std::str::FromStr for JointScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sequential" => Ok(JointScheme::Sequential),
            "contemporaneous" => Ok(JointScheme::Contemporaneous),
            other => Err(Error::InvalidParameter(format!("unknown measurement model '{other}'"))),
        }
    }
}

/// `P^{(0)} = 1 - P`, `P^{(1)} = P`.
pub fn projector_branch(p: &ComplexMatrix, bit: usize) -> ComplexMatrix {
    if bit == 1 {
        p.clone()
    } else {
        &ComplexMatrix::identity(p.dim()) - p
    }
}
