//! Maximal rms errors of retrodiction and prediction.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{operator_norm, tensor, ComplexMatrix, Ket, ZERO};
use crate::measure::{JointScheme, MeasurementModel, Povm};
use crate::spin1::{squared_projection, Triad};

/// `(Δ_ei, Δ_ef)` for one observable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorPair {
    pub retrodictive: f64,
    pub predictive: f64,
}

fn check_sys(expected: usize, m: &ComplexMatrix) -> Result<()> {
    if m.dim() != expected {
        return Err(Error::DimensionMismatch { expected, found: m.dim() });
    }
    Ok(())
}

/// `(1 ⊗ ⟨φ₀|) X (1 ⊗ |φ₀⟩)` as a system-space matrix.
pub fn compress(x: &ComplexMatrix, sys_dim: usize, phi0: &Ket) -> ComplexMatrix {
    let d = phi0.dim();
    ComplexMatrix::from_fn(sys_dim, |m, mp| {
        let mut acc = ZERO;
        for a in 0..d {
            let left = phi0[a].conj();
            if left == ZERO {
                continue;
            }
            for b in 0..d {
                acc += left * x[(m * d + a, mp * d + b)] * phi0[b];
            }
        }
        acc
    })
}

/// `(1 ⊗ ⟨φ₀|) X†X (1 ⊗ |φ₀⟩)`, formed as a Gram matrix so that an `X`
/// vanishing on the ready subspace gives an exact-to-rounding zero.
fn compressed_square(x: &ComplexMatrix, sys_dim: usize, phi0: &Ket) -> ComplexMatrix {
    let cols: Vec<Ket> = (0..sys_dim).map(|m| x.apply(&Ket::basis(sys_dim, m).tensor(phi0))).collect();
    ComplexMatrix::from_fn(sys_dim, |i, j| cols[i].inner(&cols[j]))
}

/// `Σ_k K_k†K_k`.
fn gram_sum(ks: impl IntoIterator<Item = ComplexMatrix>, dim: usize) -> ComplexMatrix {
    ks.into_iter().fold(ComplexMatrix::zeros(dim), |acc, k| &acc + &(&k.adjoint() * &k))
}

fn sqrt_norm(m: &ComplexMatrix) -> f64 {
    operator_norm(&m.hermitian_part()).expect("Hermitian part is Hermitian").max(0.0).sqrt()
}

/// Errors from the Heisenberg-picture error operators
/// `ε_i = U†(1⊗α)U - A⊗1` and `ε_f = U†(1⊗α)U - U†(A⊗1)U`:
/// `Δ = sqrt(‖(1⊗⟨φ₀|) ε² (1⊗|φ₀⟩)‖)`.
pub fn errors_heisenberg(m: &MeasurementModel, a: &ComplexMatrix, alpha: &ComplexMatrix) -> Result<ErrorPair> {
    check_sys(m.sys_dim(), a)?;
    check_sys(m.ap_dim(), alpha)?;
    let u = m.unitary();
    let ud = u.adjoint();
    let pointer_final = &(&ud * &tensor(&ComplexMatrix::identity(m.sys_dim()), alpha)) * &u;
    let a_initial = tensor(a, &ComplexMatrix::identity(m.ap_dim()));
    let a_final = &(&ud * &a_initial) * &u;
    let eps_i = &pointer_final - &a_initial;
    let eps_f = &pointer_final - &a_final;
    let phi0 = m.ready_state();
    Ok(ErrorPair {
        retrodictive: sqrt_norm(&compressed_square(&eps_i, m.sys_dim(), phi0)),
        predictive: sqrt_norm(&compressed_square(&eps_f, m.sys_dim(), phi0)),
    })
}

/// `sqrt(‖Σ_a (A - a) E⁽ʳ⁾_a (A - a)‖)` over the marginal of pointer `r`,
/// with `a` the register's pointer values. Each term is evaluated through
/// the Kraus operators as `Σ_{α_r = a} [T_α(A - a)]† [T_α(A - a)]`.
pub fn retrodictive_error_povm(p: &Povm, r: usize, a: &ComplexMatrix) -> Result<f64> {
    check_sys(p.sys_dim(), a)?;
    p.pointers().check_register(r)?;
    let one = ComplexMatrix::identity(p.sys_dim());
    let terms = p.kraus().iter().enumerate().map(|(idx, t)| {
        let shifted = a - &one.scale_real(p.pointers().value(idx, r));
        t * &shifted
    });
    Ok(sqrt_norm(&gram_sum(terms, p.sys_dim())))
}

/// `sqrt(‖Σ_α T_α† (A - α_r)² T_α‖)`.
pub fn predictive_error_povm(p: &Povm, r: usize, a: &ComplexMatrix) -> Result<f64> {
    check_sys(p.sys_dim(), a)?;
    p.pointers().check_register(r)?;
    let one = ComplexMatrix::identity(p.sys_dim());
    let terms = p.kraus().iter().enumerate().map(|(idx, t)| {
        let shifted = a - &one.scale_real(p.pointers().value(idx, r));
        &shifted * t
    });
    Ok(sqrt_norm(&gram_sum(terms, p.sys_dim())))
}

/// The retrodictive sum evaluated literally from the marginal elements,
/// `Σ_a (A - a) E⁽ʳ⁾_a (A - a)`, before the square root and norm.
pub fn retrodictive_operator(p: &Povm, r: usize, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_sys(p.sys_dim(), a)?;
    let marginal = p.marginal(r)?;
    let one = ComplexMatrix::identity(p.sys_dim());
    let mut sum = ComplexMatrix::zeros(p.sys_dim());
    for (e, &value) in marginal.iter().zip(p.pointers().values(r)) {
        let shifted = a - &one.scale_real(value);
        sum = &sum + &(&(&shifted * e) * &shifted);
    }
    Ok(sum)
}

/// Both POVM-formula errors for pointer `r`.
pub fn errors_povm(p: &Povm, r: usize, a: &ComplexMatrix) -> Result<ErrorPair> {
    Ok(ErrorPair { retrodictive: retrodictive_error_povm(p, r, a)?, predictive: predictive_error_povm(p, r, a)? })
}

/// Spread of the final pointer reading about the initial mean `⟨A⟩`,
/// returned with its upper bound `Δ_ei A + ΔA`.
pub fn spread_bound(
    m: &MeasurementModel,
    psi: &Ket,
    a: &ComplexMatrix,
    alpha: &ComplexMatrix,
) -> Result<(f64, f64)> {
    check_sys(m.sys_dim(), a)?;
    check_sys(m.ap_dim(), alpha)?;
    if psi.dim() != m.sys_dim() {
        return Err(Error::DimensionMismatch { expected: m.sys_dim(), found: psi.dim() });
    }
    psi.ensure_normalized()?;
    let mean = a.expectation(psi);
    let spread_a = ((a * a).expectation(psi) - mean * mean).max(0.0).sqrt();
    let out = m.evolve(psi);
    let shifted = &tensor(&ComplexMatrix::identity(m.sys_dim()), alpha)
        - &ComplexMatrix::identity(m.sys_dim() * m.ap_dim()).scale_real(mean);
    let lhs = shifted.apply(&out).norm();
    let delta_ei = errors_heisenberg(m, a, alpha)?.retrodictive;
    Ok((lhs, delta_ei + spread_a))
}

/// Leading-order small-angle values of `Δ_ef P_r` for the sequential model
/// of `triad_from_angles(ψ, θ, φ)`, `r` 0-based.
pub fn closed_form_predictive(r: usize, psi: f64, theta: f64, phi: f64) -> f64 {
    match r {
        0 => (2.0 * (psi * psi + theta * theta * phi.cos().powi(2))).sqrt(),
        1 => (std::f64::consts::SQRT_2 * theta * phi.sin()).abs(),
        _ => 0.0,
    }
}

/// Leading-order published values of `Δ_ei P_r`: `0`, `|ψ|`, `|θ|`.
///
/// The exact errors approach `√2` times these values; see
/// [`leading_order_retrodictive`].
pub fn closed_form_retrodictive(r: usize, psi: f64, theta: f64, _phi: f64) -> f64 {
    match r {
        0 => 0.0,
        1 => psi.abs(),
        _ => theta.abs(),
    }
}

/// Leading-order behaviour of the exact `Δ_ei P_r`: `0`, `√2|ψ|`, `√2|θ|`.
///
/// With `θ = 0`, start in `e2`, the `P₂ = 0` eigenstate. The first stage
/// collapses it onto `e1` or onto `e1 × e3`, and from either branch the
/// second pointer reads 1 with probability `sin²ψ cos²ψ`, so
/// `Δ_ei P₂ ≥ sqrt(2 sin²ψ cos²ψ)`, which is attained.
pub fn leading_order_retrodictive(r: usize, psi: f64, theta: f64, phi: f64) -> f64 {
    std::f64::consts::SQRT_2 * closed_form_retrodictive(r, psi, theta, phi)
}

/// One row of an error table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub psi: f64,
    pub theta: f64,
    pub phi: f64,
    pub observable: String,
    pub delta_ei: f64,
    pub delta_ef: f64,
}

/// Retrodictive and predictive errors for the three squared projections of
/// a triad.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ErrorReport {
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    pub fn for_triad(t: &Triad, scheme: JointScheme) -> Result<Self> {
        let povm = scheme.model(t).povm();
        let [psi, theta, phi] = t.angles().unwrap_or([f64::NAN; 3]);
        let mut rows = Vec::with_capacity(3);
        for r in 0..3 {
            let a = squared_projection(t.axis(r))?;
            let e = errors_povm(&povm, r, &a)?;
            rows.push(ErrorRow {
                psi,
                theta,
                phi,
                observable: format!("P{}", r + 1),
                delta_ei: e.retrodictive,
                delta_ef: e.predictive,
            });
        }
        Ok(ErrorReport { rows })
    }

    pub fn extend(&mut self, other: ErrorReport) {
        self.rows.extend(other.rows);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(input);
        let mut rows = Vec::new();
        for (i, rec) in rd.deserialize().enumerate() {
            rows.push(rec.map_err(|e| Error::Parse { line: i + 2, message: e.to_string() })?);
        }
        Ok(ErrorReport { rows })
    }
}
