//! Joint-measurement POVM of a slightly non-orthonormal triad, compared with
//! its second-order expansion and with the projective limit.

use spin1_ks::measure::{illegal_bound, second_order_povm, sequential_model};
use spin1_ks::matrix::spectral_norm;
use spin1_ks::spin1::triad_from_angles;

fn main() {
    let phi = 0.7;
    println!("{:>8} {:>14} {:>14} {:>14}", "angle", "completeness", "2nd-order dev", "illegal bound");
    for eps in [0.0, 0.003, 0.01, 0.03, 0.1] {
        let p = sequential_model(&triad_from_angles(eps, eps, phi)).povm();
        let approx = second_order_povm(eps, eps, phi);
        let dev = p.elements().iter().zip(&approx).map(|(e, a)| spectral_norm(&(e - a))).fold(0.0, f64::max);
        println!("{eps:>8} {:>14.3e} {dev:>14.3e} {:>14.3e}", p.completeness_defect(), illegal_bound(&p));
    }

    let p = sequential_model(&triad_from_angles(0.01, 0.01, phi)).povm();
    println!("\nouter-product weights at ψ = θ = 0.01:");
    for (label, e) in p.labels().iter().zip(p.elements()) {
        println!("  E{label}: trace {:.6}", e.trace().re);
    }
}
