//! Retrodictive and predictive errors of each pointer as the triad departs
//! from orthonormality, next to the leading-order closed forms.

use spin1_ks::accuracy::{closed_form_predictive, closed_form_retrodictive, ErrorReport};
use spin1_ks::measure::JointScheme;
use spin1_ks::spin1::triad_from_angles;

fn main() {
    let phi = 1.0;
    let mut report = ErrorReport::default();
    for eps in [0.001, 0.003, 0.01, 0.03, 0.1] {
        report.extend(ErrorReport::for_triad(&triad_from_angles(eps, eps, phi), JointScheme::Sequential).unwrap());
    }
    println!("{:>6} {:>3} {:>12} {:>12} {:>12} {:>12}", "angle", "obs", "Δei", "closed ei", "Δef", "closed ef");
    for row in &report.rows {
        let r: usize = row.observable[1..].parse::<usize>().unwrap() - 1;
        println!(
            "{:>6} {:>3} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            row.psi,
            row.observable,
            row.delta_ei,
            closed_form_retrodictive(r, row.psi, row.theta, phi),
            row.delta_ef,
            closed_form_predictive(r, row.psi, row.theta, phi),
        );
    }
    let mut csv = Vec::new();
    report.write_csv(&mut csv).unwrap();
    println!("\n{} CSV bytes", csv.len());
}
