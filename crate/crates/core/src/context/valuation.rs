use serde::Serialize;

use crate::coloring::{
    canonical_sign, find_legal_coloring, ortho_structure, peres_rays, RaySet, SolveOutcome,
};
use crate::error::{Error, Result};
use crate::spin1::UnitVector3;
use crate::tolerance;

/// A concrete `{0, 1}` valuation of directions, standing in for a hidden
/// variable assignment `f`.
#[derive(Clone, Debug, PartialEq)]
pub enum ValuationStrategy {
    /// The same value everywhere.
    Constant(u8),
    /// The colour of the nearest ray of a coloured finite set (largest
    /// `|n·r|`, lowest index on ties).
    NearestRay { rays: RaySet, colors: Vec<u8> },
    /// 1 on the closed hemisphere `n·axis ≥ 0`.
    Hemisphere { axis: UnitVector3 },
    /// 1 within `half_width` radians of the great circle orthogonal to
    /// `axis`, 0 near the poles.
    EquatorialBand { axis: UnitVector3, half_width: f64 },
    /// Pseudo-random bit per cell of a `cells`-per-unit grid over the
    /// sign-normalized direction.
    SeededRandom { seed: u64, cells: u32 },
}

impl ValuationStrategy {
    pub fn nearest_ray(rays: RaySet, colors: Vec<u8>) -> Result<Self> {
        if colors.len() != rays.len() {
            return Err(Error::DimensionMismatch { expected: rays.len(), found: colors.len() });
        }
        if rays.is_empty() {
            return Err(Error::InvalidParameter("nearest-ray valuation needs at least one ray".into()));
        }
        if colors.iter().any(|&c| c > 1) {
            return Err(Error::InvalidParameter("colours must be 0 or 1".into()));
        }
        Ok(ValuationStrategy::NearestRay { rays, colors })
    }

    /// Nearest-ray valuation on the Peres rays, coloured by a legal colouring
    /// of the set with `(0, 0, 1)` removed and that ray given the value 1.
    pub fn peres_nearest_ray() -> Self {
        let peres = peres_rays();
        let z = peres.position(UnitVector3::Z).expect("Peres set contains the z axis");
        let rest = peres.without(&[z]);
        let os = ortho_structure(&rest, tolerance::ORTHOGONAL);
        let SolveOutcome::Colorable(c) = find_legal_coloring(&os, rest.len()) else {
            unreachable!("the Peres set minus one axis is colourable")
        };
        let mut colors: Vec<u8> = c.values.into_iter().map(|v| v.expect("total")).collect();
        colors.insert(z, 1);
        ValuationStrategy::NearestRay { rays: peres, colors }
    }

    /// `f(n)`.
    pub fn evaluate(&self, n: UnitVector3) -> u8 {
        match self {
            ValuationStrategy::Constant(v) => *v,
            ValuationStrategy::NearestRay { rays, colors } => {
                let mut best = 0;
                let mut best_dot = f64::NEG_INFINITY;
                for (i, r) in rays.rays().iter().enumerate() {
                    let d = r.dot(n).abs();
                    if d > best_dot {
                        best = i;
                        best_dot = d;
                    }
                }
                colors[best]
            }
            ValuationStrategy::Hemisphere { axis } => u8::from(n.dot(*axis) >= 0.0),
            ValuationStrategy::EquatorialBand { axis, half_width } => {
                u8::from(n.dot(*axis).abs() <= half_width.sin())
            }
            ValuationStrategy::SeededRandom { seed, cells } => {
                let v = canonical_sign(n).to_array();
                let k = *cells as f64;
                let mut h = *seed;
                for c in v {
                    h = splitmix64(h ^ ((c * k).floor() as i64 as u64));
                }
                (h >> 63) as u8
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ValuationStrategy::Constant(_) => "constant",
            ValuationStrategy::NearestRay { .. } => "nearest-ray",
            ValuationStrategy::Hemisphere { .. } => "hemisphere",
            ValuationStrategy::EquatorialBand { .. } => "equatorial-band",
            ValuationStrategy::SeededRandom { .. } => "seeded-random",
        }
    }

    pub fn describe(&self) -> ValuationSummary {
        let mut s = ValuationSummary { kind: self.name(), ..Default::default() };
        match self {
            ValuationStrategy::Constant(v) => s.value = Some(*v),
            ValuationStrategy::NearestRay { rays, colors } => {
                s.rays = Some(rays.len());
                s.colors = Some(colors.iter().map(|c| char::from(b'0' + c)).collect());
            }
            ValuationStrategy::Hemisphere { axis } => s.axis = Some(axis.to_array()),
            ValuationStrategy::EquatorialBand { axis, half_width } => {
                s.axis = Some(axis.to_array());
                s.half_width = Some(*half_width);
            }
            ValuationStrategy::SeededRandom { seed, cells } => {
                s.seed = Some(*seed);
                s.cells = Some(*cells);
            }
        }
        s
    }
}

impl Default for ValuationStrategy {
    fn default() -> Self {
        ValuationStrategy::peres_nearest_ray()
    }
}

/// Serializable description of a valuation.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValuationSummary {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rays: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colors: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<u32>,
}

/// SplitMix64 finalizer, used to derive independent seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{check_coloring, Coloring};

    #[test]
    fn default_valuation_colours_peres_minus_z() {
        let ValuationStrategy::NearestRay { rays, colors } = ValuationStrategy::default() else { panic!() };
        assert_eq!(rays.len(), 33);
        let z = rays.position(UnitVector3::Z).unwrap();
        assert_eq!(colors[z], 1);
        let rest = rays.without(&[z]);
        let mut rest_colors = colors.clone();
        rest_colors.remove(z);
        let os = ortho_structure(&rest, tolerance::ORTHOGONAL);
        assert!(check_coloring(&os, &Coloring::total(rest_colors)).unwrap().is_empty());
        // On the full set the colouring necessarily fails somewhere.
        let os = ortho_structure(&rays, tolerance::ORTHOGONAL);
        assert!(!check_coloring(&os, &Coloring::total(colors.clone())).unwrap().is_empty());
        let f = ValuationStrategy::default();
        for (i, r) in rays.rays().iter().enumerate() {
            assert_eq!(f.evaluate(*r), colors[i]);
            assert_eq!(f.evaluate(-*r), colors[i]);
        }
    }

    #[test]
    fn simple_rules() {
        assert_eq!(ValuationStrategy::Constant(1).evaluate(UnitVector3::X), 1);
        let h = ValuationStrategy::Hemisphere { axis: UnitVector3::Z };
        assert_eq!(h.evaluate(UnitVector3::Z), 1);
        assert_eq!(h.evaluate(-UnitVector3::Z), 0);
        assert_eq!(h.evaluate(UnitVector3::X), 1);
        let b = ValuationStrategy::EquatorialBand { axis: UnitVector3::Z, half_width: 0.1 };
        assert_eq!(b.evaluate(UnitVector3::X), 1);
        assert_eq!(b.evaluate(UnitVector3::Z), 0);
    }

    #[test]
    fn seeded_random_is_deterministic_and_projective() {
        let f = ValuationStrategy::SeededRandom { seed: 9, cells: 50 };
        let g = ValuationStrategy::SeededRandom { seed: 10, cells: 50 };
        let dirs: Vec<UnitVector3> =
            (0..200).map(|k| UnitVector3::normalize((k as f64).sin(), (k as f64 * 0.7).cos(), 0.3).unwrap()).collect();
        let a: Vec<u8> = dirs.iter().map(|&n| f.evaluate(n)).collect();
        assert_eq!(a, dirs.iter().map(|&n| f.evaluate(n)).collect::<Vec<_>>());
        assert_eq!(a, dirs.iter().map(|&n| f.evaluate(-n)).collect::<Vec<_>>());
        assert_ne!(a, dirs.iter().map(|&n| g.evaluate(n)).collect::<Vec<_>>());
        let ones = a.iter().filter(|&&v| v == 1).count();
        assert!((50..150).contains(&ones), "{ones}");
    }

    #[test]
    fn nearest_ray_validation() {
        let rs = RaySet::from_vectors(&[[1.0, 0.0, 0.0]]).unwrap();
        assert!(ValuationStrategy::nearest_ray(rs.clone(), vec![]).is_err());
        assert!(ValuationStrategy::nearest_ray(rs, vec![2]).is_err());
    }
}
