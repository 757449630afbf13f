use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{operator_norm, ComplexMatrix, Ket};
use crate::measure::pointer::PointerSpace;

/// Outcome-indexed POVM on the system space together with the Kraus
/// operators it was built from, `E_α = T_α† T_α`.
#[derive(Clone, Debug)]
pub struct Povm {
    sys_dim: usize,
    pointers: PointerSpace,
    kraus: Vec<ComplexMatrix>,
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn from_kraus(sys_dim: usize, pointers: PointerSpace, kraus: Vec<ComplexMatrix>) -> Self {
        assert_eq!(kraus.len(), pointers.dim(), "one Kraus operator per pointer basis state");
        let elements = kraus.iter().map(|t| (&t.adjoint() * t).hermitian_part()).collect();
        Povm { sys_dim, pointers, kraus, elements }
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn pointers(&self) -> &PointerSpace {
        &self.pointers
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.pointers.label(i)).collect()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn element(&self, label: &str) -> Option<&ComplexMatrix> {
        (0..self.len()).find(|&i| self.pointers.label(i) == label).map(|i| &self.elements[i])
    }

    /// `‖Σ_α E_α - 1‖` measured entrywise.
    pub fn completeness_defect(&self) -> f64 {
        let sum = self.elements.iter().fold(ComplexMatrix::zeros(self.sys_dim), |acc, e| &acc + e);
        (&sum - &ComplexMatrix::identity(self.sys_dim)).max_abs()
    }

    /// Completeness, positivity of every element, and `E = T†T`.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.completeness_defect() <= tol
            && self.elements.iter().all(|e| e.is_psd(tol))
            && self.kraus.iter().zip(&self.elements).all(|(t, e)| (&t.adjoint() * t).approx_eq(e, tol))
    }

    /// Marginal POVM of pointer `r`: one element per register value, summing
    /// over every other pointer reading.
    pub fn marginal(&self, r: usize) -> Result<Vec<ComplexMatrix>> {
        self.pointers.check_register(r)?;
        let mut out = vec![ComplexMatrix::zeros(self.sys_dim); self.pointers.register_dim(r)];
        for (i, e) in self.elements.iter().enumerate() {
            let d = self.pointers.digits(i)[r];
            out[d] = &out[d] + e;
        }
        Ok(out)
    }

    /// `p_α = ⟨ψ|E_α|ψ⟩` for every outcome.
    pub fn outcome_probabilities(&self, psi: &Ket) -> Result<Vec<f64>> {
        if psi.dim() != self.sys_dim {
            return Err(Error::DimensionMismatch { expected: self.sys_dim, found: psi.dim() });
        }
        psi.ensure_normalized()?;
        Ok(self.elements.iter().map(|e| e.expectation(psi)).collect())
    }

    /// Sum of the elements whose outcome index satisfies `pred`.
    pub fn sum_where(&self, pred: impl Fn(usize) -> bool) -> ComplexMatrix {
        self.elements
            .iter()
            .enumerate()
            .filter(|(i, _)| pred(*i))
            .fold(ComplexMatrix::zeros(self.sys_dim), |acc, (_, e)| &acc + e)
    }

    pub fn to_document(&self) -> PovmDocument {
        let labels = self.labels();
        let encode = |ms: &[ComplexMatrix]| -> BTreeMap<String, MatrixRows> {
            labels.iter().cloned().zip(ms.iter().map(matrix_rows)).collect()
        };
        PovmDocument {
            sys_dim: self.sys_dim,
            outcomes: labels.clone(),
            elements: encode(&self.elements),
            kraus: encode(&self.kraus),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("POVM documents always serialize")
    }
}

/// Row-major `[[re, im], ...]` rows.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;

pub fn matrix_rows(m: &ComplexMatrix) -> MatrixRows {
    (0..m.dim()).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
}

/// Serializable form of a [`Povm`]: outcome labels plus element and Kraus
/// matrices as row-major arrays of `(re, im)` pairs.
#[derive(Clone, Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct PovmDocument {
    pub sys_dim: usize,
    pub outcomes: Vec<String>,
    pub elements: BTreeMap<String, MatrixRows>,
    pub kraus: BTreeMap<String, MatrixRows>,
}

/// Spin-1 triad rule: the values of `(e_r·L)²` on an orthonormal triad are
/// two 1s and one 0.
pub fn is_legal_combination(bits: [u8; 3]) -> bool {
    bits.iter().map(|&b| b as u32).sum::<u32>() == 2 && bits.iter().all(|&b| b <= 1)
}

/// Outcome indices of a three-pointer POVM that are not legal combinations:
/// 111, 100, 010, 001 and 000.
pub fn illegal_outcomes() -> Vec<usize> {
    (0..8).filter(|&i| !is_legal_combination(index_bits(i))).collect()
}

/// Pointer bits `(α₁, α₂, α₃)` of a three-pointer outcome index.
pub fn index_bits(index: usize) -> [u8; 3] {
    [((index >> 2) & 1) as u8, ((index >> 1) & 1) as u8, (index & 1) as u8]
}

/// Sum of the illegal-combination elements of a three-pointer POVM.
pub fn illegal_element(p: &Povm) -> ComplexMatrix {
    assert_eq!(p.len(), 8, "illegal combinations are defined for three binary pointers");
    let illegal = illegal_outcomes();
    p.sum_where(|i| illegal.contains(&i))
}

/// State-independent bound on the illegal-combination probability.
pub fn illegal_bound(p: &Povm) -> f64 {
    operator_norm(&illegal_element(p)).expect("sum of POVM elements is Hermitian")
}
