use crate::error::{Error, Result};
use crate::matrix::{tensor, ComplexMatrix, I, ZERO};

/// Apparatus state space made of one or more pointer registers.
///
/// Each register has a list of pointer values, one per basis state. Basis
/// states of the whole apparatus are tuples of register digits laid out in
/// mixed radix with the first register most significant, so for three binary
/// pointers the index of `|α₁,α₂,α₃⟩` is `4α₁ + 2α₂ + α₃`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointerSpace {
    registers: Vec<Vec<f64>>,
}

impl PointerSpace {
    /// `n` two-level pointers with values 0 and 1.
    pub fn binary(n: usize) -> Self {
        assert!(n > 0, "need at least one pointer");
        PointerSpace { registers: vec![vec![0.0, 1.0]; n] }
    }

    /// A single register whose basis states carry the given values.
    pub fn single(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "pointer register needs at least one value");
        PointerSpace { registers: vec![values] }
    }

    pub fn n_pointers(&self) -> usize {
        self.registers.len()
    }

    pub fn dim(&self) -> usize {
        self.registers.iter().map(Vec::len).product()
    }

    pub fn register_dim(&self, r: usize) -> usize {
        self.registers[r].len()
    }

    pub fn values(&self, r: usize) -> &[f64] {
        &self.registers[r]
    }

    pub fn is_binary(&self, r: usize) -> bool {
        self.registers.get(r).is_some_and(|v| v.len() == 2)
    }

    pub fn check_register(&self, r: usize) -> Result<()> {
        if r >= self.n_pointers() {
            Err(Error::IndexOutOfRange { index: r, bound: self.n_pointers() })
        } else {
            Ok(())
        }
    }

    /// Register digits of a basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.n_pointers()];
        for r in (0..self.n_pointers()).rev() {
            let d = self.register_dim(r);
            out[r] = index % d;
            index /= d;
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.registers).fold(0, |acc, (d, reg)| acc * reg.len() + d)
    }

    /// Outcome label: digits concatenated (`"101"`), or dot-separated when a
    /// register has more than ten states.
    pub fn label(&self, index: usize) -> String {
        let digits = self.digits(index);
        if self.registers.iter().all(|r| r.len() <= 10) {
            digits.iter().map(|d| char::from_digit(*d as u32, 10).unwrap()).collect()
        } else {
            digits.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(".")
        }
    }

    /// Pointer value of register `r` in the basis state `index`.
    pub fn value(&self, index: usize, r: usize) -> f64 {
        self.registers[r][self.digits(index)[r]]
    }

    /// Pointer observable `α_r` on the apparatus space: diagonal, with the
    /// register-`r` value of each basis state. For a binary register this is
    /// the projector onto `α_r = 1`.
    pub fn pointer_observable(&self, r: usize) -> Result<ComplexMatrix> {
        self.check_register(r)?;
        let values: Vec<f64> = (0..self.dim()).map(|i| self.value(i, r)).collect();
        Ok(ComplexMatrix::diag_real(&values))
    }

    /// Basis-state index with every register at digit 0.
    pub fn ready_index(&self) -> usize {
        0
    }

    /// Identity on every register except `r`, `op` on register `r`.
    pub fn embed(&self, r: usize, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_register(r)?;
        if op.dim() != self.register_dim(r) {
            return Err(Error::DimensionMismatch { expected: self.register_dim(r), found: op.dim() });
        }
        let mut out: Option<ComplexMatrix> = None;
        for s in 0..self.n_pointers() {
            let factor = if s == r { op.clone() } else { ComplexMatrix::identity(self.register_dim(s)) };
            out = Some(match out {
                None => factor,
                Some(acc) => tensor(&acc, &factor),
            });
        }
        Ok(out.expect("at least one register"))
    }
}

/// Flip operator on pointer `r`: `σ|0⟩ = -i|1⟩`, `σ|1⟩ = i|0⟩`, identity on
/// the other registers.
pub fn pointer_sigma(r: usize, pointers: &PointerSpace) -> Result<ComplexMatrix> {
    pointers.check_register(r)?;
    if !pointers.is_binary(r) {
        return Err(Error::NotBinaryPointer(r));
    }
    let sigma = ComplexMatrix::from_vec(2, vec![ZERO, I, -I, ZERO]);
    pointers.embed(r, &sigma)
}
