//! Spin-1 angular momentum in the Cartesian (adjoint) representation.
//!
//! With `(L_k)_{ij} = -i ε_{kij}` the squared projection onto a unit
//! direction has the closed form `(n·L)² = 1 - n nᵀ`, so `1 - (n·L)²` is the
//! rank-one projector onto `n` itself.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::tolerance;

/// A direction in R³.
#[derive(Clone, Copy, PartialEq, Serialize)]
pub struct UnitVector3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector3 {
    pub const X: UnitVector3 = UnitVector3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: UnitVector3 = UnitVector3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: UnitVector3 = UnitVector3 { x: 0.0, y: 0.0, z: 1.0 };

    /// Accepts components that are already unit length.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (x * x + y * y + z * z - 1.0).abs() > tolerance::UNIT_VECTOR {
            return Err(Error::NonUnitVector { norm });
        }
        Ok(UnitVector3 { x, y, z })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NonUnitVector { norm });
        }
        Ok(UnitVector3 { x: x / norm, y: y / norm, z: z / norm })
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn x(self) -> f64 {
        self.x
    }

    pub fn y(self) -> f64 {
        self.y
    }

    pub fn z(self) -> f64 {
        self.z
    }

    pub fn dot(self, other: UnitVector3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: UnitVector3) -> [f64; 3] {
        [
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        ]
    }

    /// Angle between the two directions in `[0, π]`.
    pub fn angle_to(self, other: UnitVector3) -> f64 {
        let c = self.cross(other);
        let s = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        s.atan2(self.dot(other))
    }

    /// Two orthonormal vectors spanning the plane perpendicular to `self`.
    pub fn tangent_basis(self) -> ([f64; 3], [f64; 3]) {
        // Cross with the coordinate axis least aligned with self.
        let a = [self.x.abs(), self.y.abs(), self.z.abs()];
        let helper = if a[0] <= a[1] && a[0] <= a[2] {
            UnitVector3::X
        } else if a[1] <= a[2] {
            UnitVector3::Y
        } else {
            UnitVector3::Z
        };
        let t1 = self.cross(helper);
        let n1 = (t1[0] * t1[0] + t1[1] * t1[1] + t1[2] * t1[2]).sqrt();
        let t1 = UnitVector3 { x: t1[0] / n1, y: t1[1] / n1, z: t1[2] / n1 };
        let t2 = self.cross(t1);
        (t1.to_array(), t2)
    }
}

impl std::ops::Neg for UnitVector3 {
    type Output = UnitVector3;

    fn neg(self) -> UnitVector3 {
        UnitVector3 { x: -self.x, y: -self.y, z: -self.z }
    }
}

impl fmt::Debug for UnitVector3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6}, {:.6})", self.x, self.y, self.z)
    }
}

/// Three directions intended to be (nearly) orthonormal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Triad {
    axes: [UnitVector3; 3],
    angles: Option<[f64; 3]>,
}

impl Triad {
    /// Rejects left-handed triads (`e1·(e2×e3) ≤ 0`).
    pub fn new(e1: UnitVector3, e2: UnitVector3, e3: UnitVector3) -> Result<Self> {
        let t = Triad { axes: [e1, e2, e3], angles: None };
        let det = t.determinant();
        if det <= 0.0 {
            return Err(Error::LeftHandedTriad { det });
        }
        Ok(t)
    }

    /// Flips the sign of `e3` when needed so that the triad is right-handed.
    /// Only valid where the axes are used as rays, which is everywhere in this
    /// crate since `(n·L)²` is even in `n`.
    pub fn oriented(e1: UnitVector3, e2: UnitVector3, e3: UnitVector3) -> Self {
        let t = Triad { axes: [e1, e2, e3], angles: None };
        if t.determinant() < 0.0 {
            Triad { axes: [e1, e2, -e3], angles: None }
        } else {
            t
        }
    }

    pub fn canonical() -> Self {
        Triad { axes: [UnitVector3::X, UnitVector3::Y, UnitVector3::Z], angles: Some([0.0, 0.0, 0.0]) }
    }

    pub fn axes(&self) -> &[UnitVector3; 3] {
        &self.axes
    }

    pub fn axis(&self, r: usize) -> UnitVector3 {
        self.axes[r]
    }

    /// `(ψ, θ, φ)` when the triad came from [`triad_from_angles`].
    pub fn angles(&self) -> Option<[f64; 3]> {
        self.angles
    }

    pub fn determinant(&self) -> f64 {
        let [e1, e2, e3] = self.axes;
        let c = e2.cross(e3);
        e1.x * c[0] + e1.y * c[1] + e1.z * c[2]
    }

    /// Applies a 3×3 rotation (row-major) to every axis.
    pub fn rotated(&self, rot: &[[f64; 3]; 3]) -> Self {
        let apply = |v: UnitVector3| {
            let a = v.to_array();
            let r: Vec<f64> = rot.iter().map(|row| row[0] * a[0] + row[1] * a[1] + row[2] * a[2]).collect();
            UnitVector3::normalize(r[0], r[1], r[2]).expect("rotation preserves norm")
        };
        Triad { axes: self.axes.map(apply), angles: None }
    }

    /// Swaps `e1` and `e3`, negating `e2` to keep the handedness.
    pub fn reversed(&self) -> Self {
        let [e1, e2, e3] = self.axes;
        Triad { axes: [e3, -e2, e1], angles: None }
    }
}

/// Largest pairwise `|e_r·e_s|` over `r ≠ s`.
pub fn orthonormality_defect(t: &Triad) -> f64 {
    let [a, b, c] = t.axes;
    a.dot(b).abs().max(a.dot(c).abs()).max(b.dot(c).abs())
}

/// The near-orthonormal parameterization
/// `e1 = (1,0,0)`, `e2 = (sin ψ, cos ψ, 0)`,
/// `e3 = (sin θ cos φ, sin θ sin φ, cos θ)`.
pub fn triad_from_angles(psi: f64, theta: f64, phi: f64) -> Triad {
    let e1 = UnitVector3::X;
    let e2 = UnitVector3 { x: psi.sin(), y: psi.cos(), z: 0.0 };
    let e3 = UnitVector3 { x: theta.sin() * phi.cos(), y: theta.sin() * phi.sin(), z: theta.cos() };
    Triad { axes: [e1, e2, e3], angles: Some([psi, theta, phi]) }
}

/// `(L1, L2, L3)` with `(L_k)_{ij} = -i ε_{kij}`.
pub fn angular_momentum_ops() -> [ComplexMatrix; 3] {
    let levi = |i: usize, j: usize, k: usize| -> f64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    };
    [0, 1, 2].map(|k| ComplexMatrix::from_fn(3, |i, j| C64::new(0.0, -levi(k, i, j))))
}

/// `n·L`.
pub fn projection(n: UnitVector3) -> ComplexMatrix {
    let [l1, l2, l3] = angular_momentum_ops();
    &(&l1.scale_real(n.x) + &l2.scale_real(n.y)) + &l3.scale_real(n.z)
}

/// `(n·L)²`, the projector onto the plane perpendicular to `n`.
pub fn squared_projection(n: UnitVector3) -> Result<ComplexMatrix> {
    let norm_sq = n.x * n.x + n.y * n.y + n.z * n.z;
    if (norm_sq - 1.0).abs() > tolerance::UNIT_VECTOR {
        return Err(Error::NonUnitVector { norm: norm_sq.sqrt() });
    }
    let p = projection(n);
    Ok((&p * &p).hermitian_part())
}

/// `1 - (n·L)²`, the projector onto `n`.
pub fn ray_projector(n: UnitVector3) -> ComplexMatrix {
    let a = n.to_array();
    ComplexMatrix::from_fn(3, |i, j| C64::new(a[i] * a[j], 0.0))
}

/// Unitary whose columns are the `L3` eigenvectors `|+1⟩, |0⟩, |-1⟩` in the
/// Condon–Shortley phase convention, so `V† L3 V = diag(1, 0, -1)`.
pub fn spherical_basis() -> ComplexMatrix {
    let h = FRAC_1_SQRT_2;
    let plus = [C64::new(-h, 0.0), C64::new(0.0, -h), ZERO];
    let zero = [ZERO, ZERO, ONE];
    let minus = [C64::new(h, 0.0), C64::new(0.0, -h), ZERO];
    ComplexMatrix::from_fn(3, |i, j| match j {
        0 => plus[i],
        1 => zero[i],
        _ => minus[i],
    })
}

/// Expresses a Cartesian-basis operator in the `L3`-diagonal basis.
pub fn to_spherical(op: &ComplexMatrix) -> ComplexMatrix {
    let v = spherical_basis();
    &(&v.adjoint() * op) * &v
}
