use std::f64::consts::SQRT_2;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spin1::UnitVector3;
use crate::tolerance;

/// A finite set of rays in R³. A ray is a direction up to sign, stored with
/// its first non-negligible component positive.
#[derive(Clone, Debug, PartialEq)]
pub struct RaySet {
    rays: Vec<UnitVector3>,
    labels: Vec<String>,
}

/// Representative of `±v` whose first non-negligible component is positive.
pub fn canonical_sign(v: UnitVector3) -> UnitVector3 {
    let lead = v.to_array().into_iter().find(|c| c.abs() > tolerance::DUPLICATE_RAY).unwrap_or(0.0);
    if lead < 0.0 {
        -v
    } else {
        v
    }
}

/// Whether `u` and `v` span the same line.
pub fn same_ray(u: UnitVector3, v: UnitVector3, tol: f64) -> bool {
    let c = u.cross(v);
    (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt() <= tol
}

impl RaySet {
    /// Builds a ray set, rejecting rays that coincide up to sign.
    pub fn new(rays: Vec<UnitVector3>, labels: Vec<String>) -> Result<Self> {
        if rays.len() != labels.len() {
            return Err(Error::DimensionMismatch { expected: rays.len(), found: labels.len() });
        }
        if let Some((i, j)) = first_duplicate(&rays) {
            return Err(Error::InvalidParameter(format!("rays {i} and {j} coincide up to sign")));
        }
        Ok(RaySet { rays: rays.into_iter().map(canonical_sign).collect(), labels })
    }

    /// Normalizes each vector and labels it by its position.
    pub fn from_vectors(vectors: &[[f64; 3]]) -> Result<Self> {
        let rays = vectors.iter().map(|v| UnitVector3::normalize(v[0], v[1], v[2])).collect::<Result<Vec<_>>>()?;
        let labels = (0..rays.len()).map(|i| format!("r{i}")).collect();
        Self::new(rays, labels)
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn rays(&self) -> &[UnitVector3] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> UnitVector3 {
        self.rays[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Index of the ray through `v`, if present.
    pub fn position(&self, v: UnitVector3) -> Option<usize> {
        self.rays.iter().position(|&r| same_ray(r, v, tolerance::DUPLICATE_RAY))
    }

    /// The set with the listed indices removed.
    pub fn without(&self, remove: &[usize]) -> RaySet {
        let keep = |i: &usize| !remove.contains(i);
        RaySet {
            rays: (0..self.len()).filter(keep).map(|i| self.rays[i]).collect(),
            labels: (0..self.len()).filter(keep).map(|i| self.labels[i].clone()).collect(),
        }
    }

    /// The subset at the listed indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> RaySet {
        RaySet {
            rays: indices.iter().map(|&i| self.rays[i]).collect(),
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }

    /// Applies a rotation matrix to every ray.
    pub fn rotated(&self, rot: &[[f64; 3]; 3]) -> RaySet {
        let rays = self
            .rays
            .iter()
            .map(|r| {
                let a = r.to_array();
                let v: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| rot[i][j] * a[j]).sum());
                canonical_sign(UnitVector3::normalize(v[0], v[1], v[2]).expect("rotation preserves length"))
            })
            .collect();
        RaySet { rays, labels: self.labels.clone() }
    }

    /// Parses one ray per line: three whitespace-separated reals, `#` starts
    /// a comment, blank lines are skipped. Vectors are normalized.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rays = Vec::new();
        let mut labels = Vec::new();
        let mut lines = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse { line, message: format!("expected 3 numbers, found {}", fields.len()) });
            }
            let mut v = [0.0; 3];
            for (slot, f) in v.iter_mut().zip(&fields) {
                *slot = f
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Parse { line, message: format!("not a finite number: {f:?}") })?;
            }
            let ray = UnitVector3::normalize(v[0], v[1], v[2])
                .map_err(|_| Error::Parse { line, message: "zero vector".into() })?;
            if let Some(k) = rays.iter().position(|&r| same_ray(r, ray, tolerance::DUPLICATE_RAY)) {
                return Err(Error::Parse { line, message: format!("duplicate of the ray on line {}", lines[k]) });
            }
            rays.push(ray);
            labels.push(fields.join(" "));
            lines.push(line);
        }
        Self::new(rays, labels)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

fn first_duplicate(rays: &[UnitVector3]) -> Option<(usize, usize)> {
    for j in 0..rays.len() {
        for i in 0..j {
            if same_ray(rays[i], rays[j], tolerance::DUPLICATE_RAY) {
                return Some((i, j));
            }
        }
    }
    None
}

fn component_label(c: f64) -> &'static str {
    match c {
        0.0 => "0",
        1.0 => "1",
        -1.0 => "-1",
        c if c == SQRT_2 => "√2",
        _ => "-√2",
    }
}

/// Peres' 33 rays: every permutation of `(0,0,1)`, `(0,1,±1)`,
/// `(0,1,±√2)` and `(1,±1,±√2)` up to overall sign.
pub fn peres_rays() -> RaySet {
    let s = SQRT_2;
    let perms = |[a, b, c]: [f64; 3]| [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]];
    let patterns = [
        [0.0, 0.0, 1.0],
        [0.0, 1.0, 1.0],
        [0.0, 1.0, -1.0],
        [0.0, 1.0, s],
        [0.0, 1.0, -s],
        [1.0, 1.0, s],
        [1.0, 1.0, -s],
        [1.0, -1.0, s],
        [1.0, -1.0, -s],
    ];
    let mut raw: Vec<[f64; 3]> = Vec::new();
    for v in patterns.into_iter().flat_map(perms) {
        // Components are exact, so sign normalization makes equal rays equal.
        let lead = v.iter().copied().find(|c| *c != 0.0).unwrap_or(1.0).signum();
        let v = v.map(|c| c * lead + 0.0);
        if !raw.contains(&v) {
            raw.push(v);
        }
    }
    let rays = raw.iter().map(|v| UnitVector3::normalize(v[0], v[1], v[2]).expect("nonzero")).collect();
    let labels = raw
        .iter()
        .map(|v| format!("({}, {}, {})", component_label(v[0]), component_label(v[1]), component_label(v[2])))
        .collect();
    RaySet::new(rays, labels).expect("Peres rays are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peres_has_33_rays_including_axes() {
        let p = peres_rays();
        assert_eq!(p.len(), 33);
        for axis in [UnitVector3::X, UnitVector3::Y, UnitVector3::Z] {
            assert!(p.position(axis).is_some());
        }
        assert_eq!(p.label(p.position(UnitVector3::Z).unwrap()), "(0, 0, 1)");
        for r in p.rays() {
            let a = r.to_array();
            assert!((a.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn duplicates_rejected() {
        let err = RaySet::from_vectors(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-2.0, 0.0, 0.0]]);
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn parse_format() {
        let text = "# canonical basis\n1 0 0\n\n0 2 0   # unnormalized\n0 0 1\n";
        let rs = RaySet::parse(text).unwrap();
        assert_eq!(rs.len(), 3);
        assert_eq!(rs.ray(1), UnitVector3::Y);
        assert_eq!(rs.label(1), "0 2 0");

        assert_eq!(
            RaySet::parse("1 0 0\n0 1\n"),
            Err(Error::Parse { line: 2, message: "expected 3 numbers, found 2".into() })
        );
        assert!(matches!(RaySet::parse("1 0 x\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(RaySet::parse("1 0 0\n\n0 0 0\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(RaySet::parse("1 1 0\n-2 -2 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(RaySet::parse("1 0 nan\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn canonical_sign_rule() {
        let v = UnitVector3::normalize(0.0, -1.0, 1.0).unwrap();
        assert_eq!(canonical_sign(v).to_array(), (-v).to_array());
        assert_eq!(canonical_sign(UnitVector3::X), UnitVector3::X);
    }
}
