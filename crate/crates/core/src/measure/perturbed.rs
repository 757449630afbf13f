use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{hermitian_eig, polar_unitary, ComplexMatrix, Ket, C64};
use crate::measure::model::MeasurementModel;
use crate::measure::pointer::PointerSpace;
use crate::tolerance;

/// Ideal measurement of a non-degenerate observable `A` with one pointer
/// register whose basis states carry the eigenvalues of `A` (ascending).
///
/// `U(|a_k⟩ ⊗ |0⟩) = |a_k⟩ ⊗ |k⟩`, extended to a unitary by cyclic shifts
/// of the pointer on the other apparatus states.
pub fn ideal_single_measurement(a: &ComplexMatrix) -> Result<MeasurementModel> {
    perturbed_single_measurement(a, 0.0, 0)
}

/// Imperfect measurement of `A`: the ideal interaction is modified so that
/// `U(|a_b⟩ ⊗ |0⟩) = |a_b⟩ ⊗ |b⟩ + Σ_{a,d} ε_{a,bd} |a_a⟩ ⊗ |d⟩`, then
/// re-unitarized by its polar factor.
///
/// Each `ε` is uniform on the complex disc of radius `strength`, drawn from a
/// ChaCha8 stream seeded with `seed`. `strength = 0` gives the ideal model
/// exactly.
pub fn perturbed_single_measurement(a: &ComplexMatrix, strength: f64, seed: u64) -> Result<MeasurementModel> {
    if !(strength >= 0.0 && strength.is_finite()) {
        return Err(Error::InvalidParameter(format!("perturbation strength must be >= 0, got {strength}")));
    }
    let eig = hermitian_eig(a)?;
    let n = a.dim();
    let gap = eig.values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if n > 1 && gap <= tolerance::DEGENERACY {
        return Err(Error::DegenerateSpectrum { gap });
    }

    let pointers = PointerSpace::single(eig.values.clone());
    let total = n * n;
    // Work in the eigenbasis: system index k means |a_k⟩.
    let mut m = ComplexMatrix::zeros(total);
    for k in 0..n {
        for j in 0..n {
            m[(k * n + (j + k) % n, k * n + j)] = C64::new(1.0, 0.0);
        }
    }
    if strength > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for b in 0..n {
            for row in 0..total {
                let r = strength * rng.random::<f64>().sqrt();
                let angle = std::f64::consts::TAU * rng.random::<f64>();
                m[(row, b * n)] += C64::from_polar(r, angle);
            }
        }
        m = polar_unitary(&m)?;
    }

    // Back to the computational basis: (V ⊗ 1) M (V† ⊗ 1).
    let v = ComplexMatrix::from_fn(n, |i, k| eig.vectors[k][i]);
    let v_big = crate::matrix::tensor(&v, &ComplexMatrix::identity(n));
    let u = &(&v_big * &m) * &v_big.adjoint();
    MeasurementModel::new(n, pointers, Ket::basis(n, 0), u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::tests::random_hermitian;

    fn observable() -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        random_hermitian(&mut rng, 3)
    }

    #[test]
    fn ideal_model_reveals_eigenvalues() {
        let a = observable();
        let model = ideal_single_measurement(&a).unwrap();
        let eig = hermitian_eig(&a).unwrap();
        let p = model.povm();
        for k in 0..3 {
            let expected = ComplexMatrix::outer(&eig.vectors[k], &eig.vectors[k]);
            assert!(p.elements()[k].approx_eq(&expected, 1e-10));
            assert!((model.pointers().values(0)[k] - eig.values[k]).abs() <= 1e-15);
        }
    }

    #[test]
    fn perturbed_model_is_unitary_and_complete() {
        let a = observable();
        for seed in 0..10 {
            let model = perturbed_single_measurement(&a, 0.05, seed).unwrap();
            assert!(model.unitary().is_unitary(tolerance::UNITARY));
            assert!(model.povm().is_valid(tolerance::POVM));
        }
    }

    #[test]
    fn seeded_reproducibility() {
        let a = observable();
        let x = perturbed_single_measurement(&a, 0.01, 42).unwrap().unitary();
        let y = perturbed_single_measurement(&a, 0.01, 42).unwrap().unitary();
        let z = perturbed_single_measurement(&a, 0.01, 43).unwrap().unitary();
        assert_eq!(x, y);
        assert!(!x.approx_eq(&z, 1e-6));
    }

    #[test]
    fn small_perturbations_give_small_errors() {
        use crate::accuracy::errors_povm;
        let a = observable();
        let ideal = errors_povm(&ideal_single_measurement(&a).unwrap().povm(), 0, &a).unwrap();
        assert!(ideal.retrodictive <= 1e-7 && ideal.predictive <= 1e-7);
        let mut worst = 0.0f64;
        for seed in 0..100 {
            let e = errors_povm(&perturbed_single_measurement(&a, 0.01, seed).unwrap().povm(), 0, &a).unwrap();
            worst = worst.max(e.retrodictive).max(e.predictive);
        }
        // Observed worst case over these seeds: 0.0265.
        assert!(worst <= 0.1, "{worst}");
        assert!(worst > 0.0);
    }

    #[test]
    fn rejects_degenerate_and_negative_strength() {
        let a = ComplexMatrix::diag_real(&[1.0, 1.0, 2.0]);
        assert!(matches!(perturbed_single_measurement(&a, 0.0, 0), Err(Error::DegenerateSpectrum { .. })));
        let a = ComplexMatrix::diag_real(&[0.0, 1.0]);
        assert!(matches!(perturbed_single_measurement(&a, -0.1, 0), Err(Error::InvalidParameter(_))));
    }
}
