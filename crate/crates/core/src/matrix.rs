//! Dense complex linear algebra for the small spaces used by the measurement
//! models (at most a 3-dimensional system times an 8-dimensional apparatus).
//!
//! Matrices are square and stored row-major. Tensor products follow the
//! usual Kronecker convention: for `A ⊗ B` the index of `A` is the major
//! index and the index of `B` the minor one, so system⊗apparatus basis
//! states are laid out as `sys * dim_ap + ap`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        ComplexMatrix { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. Panics unless `entries` is a
    /// perfect square in length.
    pub fn from_vec(dim: usize, entries: Vec<C64>) -> Self {
        assert!(dim > 0 && entries.len() == dim * dim, "expected {dim}x{dim} entries");
        ComplexMatrix { dim, data: entries }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(N, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(*v, 0.0);
        }
        m
    }

    /// The rank-one operator `|u⟩⟨v|`.
    pub fn outer(u: &Ket, v: &Ket) -> Self {
        assert_eq!(u.dim(), v.dim());
        Self::from_fn(u.dim(), |i, j| u[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    pub fn unitary_defect(&self) -> f64 {
        (&(&self.adjoint() * self) - &Self::identity(self.dim)).max_abs()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_defect() <= tol
    }

    /// True when the matrix is Hermitian and its smallest eigenvalue is at
    /// least `-tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        match hermitian_eig(self) {
            Ok(eig) => eig.values.first().is_none_or(|&v| v >= -tol),
            Err(_) => false,
        }
    }

    pub fn projector_defect(&self) -> f64 {
        (&(self * self) - self).max_abs()
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn apply(&self, v: &Ket) -> Ket {
        assert_eq!(self.dim, v.dim(), "dimension mismatch in matrix-vector product");
        let amps = (0..self.dim)
            .map(|i| self.row(i).iter().zip(v.amplitudes()).map(|(a, b)| a * b).sum())
            .collect();
        Ket::new(amps)
    }

    /// `⟨u|M|v⟩`.
    pub fn matrix_element(&self, u: &Ket, v: &Ket) -> C64 {
        u.inner(&self.apply(v))
    }

    /// Real expectation value `⟨ψ|M|ψ⟩` (the imaginary part is dropped).
    pub fn expectation(&self, psi: &Ket) -> f64 {
        self.matrix_element(psi, psi).re
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && (self - other).max_abs() <= tol
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self + &rhs
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self - &rhs
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self * &rhs
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> =
                self.row(i).iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// A state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: Vec<C64>,
}

impl Ket {
    pub fn new(amps: Vec<C64>) -> Self {
        assert!(!amps.is_empty(), "ket dimension must be positive");
        Ket { amps }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Ket::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ket::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= tolerance::NORMALIZED
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Ket::new(self.amps.iter().map(|z| z / n).collect())
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Ket) -> C64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in inner product");
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Ket::new(self.amps.iter().map(|z| z * s).collect())
    }

    pub fn sub(&self, other: &Ket) -> Self {
        Ket::new(self.amps.iter().zip(&other.amps).map(|(a, b)| a - b).collect())
    }

    pub fn tensor(&self, other: &Ket) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ket::new(amps)
    }

    /// Requires the state to be normalized.
    pub fn ensure_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm: self.norm() })
        }
    }
}

impl Index<usize> for Ket {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.amps[i]
    }
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues in ascending order
/// with orthonormal eigenvectors in matching order.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: Vec<Ket>,
}

impl HermitianEig {
    /// `Σ f(λᵢ) vᵢvᵢ†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n);
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            let w = f(*lambda);
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        out
    }
}

fn require_hermitian(m: &ComplexMatrix) -> Result<()> {
    let defect = m.hermitian_defect();
    if defect > tolerance::HERMITIAN {
        Err(Error::NotHermitian { defect })
    } else {
        Ok(())
    }
}

/// Cyclic complex Jacobi eigenvalue iteration.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    require_hermitian(m)?;
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = D·R with D = diag(1, conj(phase)) on (p, q) and R the
                // real Jacobi rotation; J†AJ zeroes the (p, q) entry.
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = phase.conj() * -s;
                let jqq = phase.conj() * c;
                rotate_columns(&mut a, p, q, jpp, jpq, jqp, jqq);
                rotate_rows(&mut a, p, q, jpp, jpq, jqp, jqq);
                rotate_columns(&mut v, p, q, jpp, jpq, jqp, jqq);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut pairs: Vec<(f64, Ket)> = (0..n)
        .map(|k| {
            let col: Vec<C64> = (0..n).map(|i| v[(i, k)]).collect();
            (a[(k, k)].re, fix_phase(Ket::new(col)))
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(HermitianEig { values, vectors })
}

/// Rotates the eigenvector phase so that its largest component is real and
/// positive, which makes the decomposition reproducible.
fn fix_phase(v: Ket) -> Ket {
    let pivot = v
        .amplitudes()
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(ONE);
    if pivot.norm() == 0.0 {
        return v;
    }
    v.scale(pivot.conj() / pivot.norm())
}

fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, jpp: C64, jpq: C64, jqp: C64, jqq: C64) {
    for k in 0..m.dim() {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * jpp + mkq * jqp;
        m[(k, q)] = mkp * jpq + mkq * jqq;
    }
}

fn rotate_rows(m: &mut ComplexMatrix, p: usize, q: usize, jpp: C64, jpq: C64, jqp: C64, jqq: C64) {
    for k in 0..m.dim() {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = jpp.conj() * mpk + jqp.conj() * mqk;
        m[(q, k)] = jpq.conj() * mpk + jqq.conj() * mqk;
    }
}

/// Operator norm of a Hermitian matrix, `max |λᵢ|`.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eig(m)?;
    Ok(eig.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
}

/// Operator norm of an arbitrary square matrix, `sqrt(max eig(M†M))`.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    let gram = &m.adjoint() * m;
    hermitian_eig(&gram)
        .map(|e| e.values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
        .expect("M†M is Hermitian by construction")
}

/// `exp(iH)` for Hermitian `H`, computed through the eigen-decomposition.
pub fn exp_i(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    Ok(eig.map_spectrum(|lambda| C64::new(0.0, lambda).exp()))
}

/// Kronecker product `A ⊗ B`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim(), b.dim());
    let n = na * nb;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..na {
        for j in 0..na {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Unitary factor of the polar decomposition, `M (M†M)^{-1/2}`.
pub fn polar_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let gram = (&m.adjoint() * m).hermitian_part();
    let eig = hermitian_eig(&gram)?;
    let smallest = eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    if smallest <= tolerance::SINGULAR {
        return Err(Error::Singular { smallest });
    }
    let inv_sqrt = eig.map_spectrum(|lambda| C64::new(1.0 / lambda.sqrt(), 0.0));
    Ok(m * &inv_sqrt)
}
