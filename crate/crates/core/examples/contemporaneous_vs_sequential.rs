//! The two joint-measurement schemes agree to first order in the triad
//! angles but differ in which outcomes carry the leftover weight.

use spin1_ks::matrix::spectral_norm;
use spin1_ks::measure::{illegal_bound, JointScheme};
use spin1_ks::spin1::triad_from_angles;

fn main() {
    println!("{:>7} {:>14} {:>14} {:>14}", "angle", "max ‖ΔE‖", "seq illegal", "cont illegal");
    for eps in [0.003, 0.01, 0.03, 0.1] {
        let t = triad_from_angles(eps, eps, 0.4);
        let seq = JointScheme::Sequential.model(&t).povm();
        let con = JointScheme::Contemporaneous.model(&t).povm();
        let dev = seq.elements().iter().zip(con.elements()).map(|(a, b)| spectral_norm(&(a - b))).fold(0.0, f64::max);
        println!("{eps:>7} {dev:>14.4e} {:>14.4e} {:>14.4e}", illegal_bound(&seq), illegal_bound(&con));
    }
}
