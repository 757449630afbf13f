use crate::matrix::ComplexMatrix;
use crate::spin1::angular_momentum_ops;

/// Second-order small-angle approximation of the sequential POVM for
/// `triad_from_angles(psi, theta, phi)`, indexed like the exact POVM
/// (`4α₁ + 2α₂ + α₃`).
pub fn second_order_povm(psi: f64, theta: f64, phi: f64) -> Vec<ComplexMatrix> {
    let [l1, l2, l3] = angular_momentum_ops();
    let one = ComplexMatrix::identity(3);
    // 1 - L_k² projects onto the k-th coordinate axis.
    let q1 = &one - &(&l1 * &l1);
    let q2 = &one - &(&l2 * &l2);
    let q3 = &one - &(&l3 * &l3);
    let anti = l2.anticommutator(&l3);
    let (s2, c2) = (phi.sin().powi(2), phi.cos().powi(2));
    let (psi2, theta2) = (psi * psi, theta * theta);
    let cross = theta * psi * phi.cos();

    let e111 = &(&q2.scale_real(psi2) + &q3.scale_real(theta2)) - &anti.scale_real(cross);
    let e110 = &q3.scale_real(1.0 - theta2) + &anti.scale_real(cross);
    let e101 = q2.scale_real(1.0 - theta2 * s2 - psi2);
    let e011 = q1.scale_real(1.0 - theta2 * c2 - psi2);
    let e100 = q2.scale_real(theta2 * s2);
    let e010 = q1.scale_real(theta2 * c2);
    let e001 = q1.scale_real(psi2);
    let e000 = ComplexMatrix::zeros(3);
    vec![e000, e001, e010, e011, e100, e101, e110, e111]
}
