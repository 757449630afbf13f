//! The 33-ray set admits no 0/1 colouring; dropping one ray makes it
//! colourable.

use spin1_ks::coloring::{check_coloring, find_legal_coloring, ortho_structure, peres_rays, SolveOutcome};
use spin1_ks::spin1::UnitVector3;
use spin1_ks::tolerance;

fn main() {
    let rays = peres_rays();
    let os = ortho_structure(&rays, tolerance::ORTHOGONAL);
    println!("{} rays, {} orthogonal pairs, {} triads", rays.len(), os.pairs.len(), os.triads.len());
    match find_legal_coloring(&os, rays.len()) {
        SolveOutcome::Unsatisfiable(c) => {
            println!("no legal colouring ({} conflicts, {} decisions)", c.conflicts, c.decisions)
        }
        SolveOutcome::Colorable(_) => println!("unexpectedly colourable"),
    }

    let z = rays.position(UnitVector3::new(0.0, 0.0, 1.0).unwrap()).unwrap();
    let reduced = rays.without(&[z]);
    let os = ortho_structure(&reduced, tolerance::ORTHOGONAL);
    if let SolveOutcome::Colorable(c) = find_legal_coloring(&os, reduced.len()) {
        println!("without {}: colourable, {}", rays.label(z), c.to_bit_string());
        println!("violations: {}", check_coloring(&os, &c).unwrap().len());
    }
}
