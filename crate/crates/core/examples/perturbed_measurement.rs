//! Ideal and randomly perturbed measurements of a single observable.

use spin1_ks::accuracy::errors_heisenberg;
use spin1_ks::matrix::ComplexMatrix;
use spin1_ks::measure::{ideal_single_measurement, perturbed_single_measurement};

fn main() {
    let a = ComplexMatrix::from_real_rows([[1.0, 0.2, 0.0], [0.2, -0.5, 0.1], [0.0, 0.1, 2.0]]);
    let ideal = ideal_single_measurement(&a).unwrap();
    let alpha = ideal.pointers().pointer_observable(0).unwrap();
    let e = errors_heisenberg(&ideal, &a, &alpha).unwrap();
    println!("ideal: Δei {:.2e}, Δef {:.2e}", e.retrodictive, e.predictive);
    for strength in [0.001, 0.01, 0.1] {
        let worst = (0..20)
            .map(|seed| {
                let m = perturbed_single_measurement(&a, strength, seed).unwrap();
                let e = errors_heisenberg(&m, &a, &alpha).unwrap();
                e.retrodictive.max(e.predictive)
            })
            .fold(0.0, f64::max);
        println!("strength {strength}: worst error over 20 seeds {worst:.4e}");
    }
}
