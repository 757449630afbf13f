//! Kochen–Specker colourability of finite ray sets.

pub mod rays;
pub mod solver;

pub use rays::{canonical_sign, peres_rays, same_ray, RaySet};
pub use solver::{
    brute_force_colorable, check_coloring, find_legal_coloring, ortho_structure, Certificate, Coloring,
    OrthoStructure, SolveOutcome, Violation,
};
