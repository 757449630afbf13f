use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spin1::{Triad, UnitVector3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlignmentKind {
    /// Each analyzer direction is perturbed on its own.
    #[default]
    Independent,
    /// The whole triad is rotated rigidly, so it stays orthonormal.
    CorrelatedOrthonormal,
}

impl AlignmentKind {
    pub fn name(self) -> &'static str {
        match self {
            AlignmentKind::Independent => "independent",
            AlignmentKind::CorrelatedOrthonormal => "correlated",
        }
    }
}

impl std::str::FromStr for AlignmentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" => Ok(AlignmentKind::Independent),
            "correlated" | "correlated-orthonormal" => Ok(AlignmentKind::CorrelatedOrthonormal),
            other => Err(Error::InvalidParameter(format!("unknown alignment mode {other:?}"))),
        }
    }
}

/// Distribution of the actual analyzer alignment around a target.
///
/// `sigma` is the rms angular deviation of one actual axis from its target,
/// in radians. Deviations are Gaussian in the tangent plane with standard
/// deviation `sigma / √2` per tangent direction, so the deviation angle is
/// Rayleigh distributed with mean `sigma·√π / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlignmentDistribution {
    pub kind: AlignmentKind,
    pub sigma: f64,
    pub seed: u64,
}

impl AlignmentDistribution {
    pub fn new(kind: AlignmentKind, sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be finite and >= 0, got {sigma}")));
        }
        Ok(AlignmentDistribution { kind, sigma, seed })
    }

    pub fn independent(sigma: f64, seed: u64) -> Result<Self> {
        Self::new(AlignmentKind::Independent, sigma, seed)
    }

    pub fn correlated(sigma: f64, seed: u64) -> Result<Self> {
        Self::new(AlignmentKind::CorrelatedOrthonormal, sigma, seed)
    }

    fn component(&self) -> Normal<f64> {
        Normal::new(0.0, self.sigma / std::f64::consts::SQRT_2).expect("sigma validated")
    }
}

/// `normalize(n + g)` with `g` an isotropic tangent-plane Gaussian.
pub fn perturb_direction(n: UnitVector3, d: &AlignmentDistribution, rng: &mut impl Rng) -> UnitVector3 {
    if d.sigma == 0.0 {
        return n;
    }
    let normal = d.component();
    let (t1, t2) = n.tangent_basis();
    let (g1, g2) = (normal.sample(rng), normal.sample(rng));
    let a = n.to_array();
    let v: [f64; 3] = std::array::from_fn(|i| a[i] + g1 * t1[i] + g2 * t2[i]);
    UnitVector3::normalize(v[0], v[1], v[2]).expect("unit vector plus tangent offset is nonzero")
}

/// Rotation by the vector `w` (axis `w/|w|`, angle `|w|`), row-major.
pub fn rotation_matrix(w: [f64; 3]) -> [[f64; 3]; 3] {
    let angle = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    if angle == 0.0 {
        return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    }
    let k = w.map(|c| c / angle);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [c + t * k[0] * k[0], t * k[0] * k[1] - s * k[2], t * k[0] * k[2] + s * k[1]],
        [t * k[1] * k[0] + s * k[2], c + t * k[1] * k[1], t * k[1] * k[2] - s * k[0]],
        [t * k[2] * k[0] - s * k[1], t * k[2] * k[1] + s * k[0], c + t * k[2] * k[2]],
    ]
}

/// Random rigid rotation whose rotation vector has independent Gaussian
/// components of standard deviation `sigma / √2`, which gives each rotated
/// axis an rms deviation of `sigma`.
pub fn random_rotation(d: &AlignmentDistribution, rng: &mut impl Rng) -> [[f64; 3]; 3] {
    if d.sigma == 0.0 {
        return rotation_matrix([0.0; 3]);
    }
    let normal = d.component();
    rotation_matrix([normal.sample(rng), normal.sample(rng), normal.sample(rng)])
}

/// One draw of the actual triad realised by analyzers aimed at `target`.
pub fn sample_actual_triad(target: &Triad, d: &AlignmentDistribution, rng: &mut impl Rng) -> Triad {
    if d.sigma == 0.0 {
        return *target;
    }
    match d.kind {
        AlignmentKind::Independent => {
            let [e1, e2, e3] = target.axes().map(|e| perturb_direction(e, d, rng));
            Triad::oriented(e1, e2, e3)
        }
        AlignmentKind::CorrelatedOrthonormal => target.rotated(&random_rotation(d, rng)),
    }
}

/// One draw of the actual direction for a single analyzer aimed at `n`.
pub fn sample_direction(n: UnitVector3, d: &AlignmentDistribution, rng: &mut impl Rng) -> UnitVector3 {
    match d.kind {
        AlignmentKind::Independent => perturb_direction(n, d, rng),
        AlignmentKind::CorrelatedOrthonormal => {
            let rot = random_rotation(d, rng);
            let a = n.to_array();
            let v: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| rot[i][j] * a[j]).sum());
            UnitVector3::normalize(v[0], v[1], v[2]).expect("rotation preserves norm")
        }
    }
}
