//! Named analytic fields with closed-form gradients and Laplacians.
//!
//! These provide exact boundary data, volume loads and reference solutions
//! for the benchmark cases. The singular power fields are real or imaginary
//! parts of z^λ on an explicit branch, so their traces on the legs of the
//! corner they are built around are exact.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::geometry::Point;

/// Anything that can be evaluated and differentiated at a point.
pub trait ScalarField {
    fn value(&self, p: Point) -> f64;
    fn gradient(&self, p: Point) -> Point;
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalyticField {
    /// Identically zero.
    Zero,
    /// Constant value.
    Constant(f64),
    /// y(x1, x2) = x1.
    LinearX,
    /// y(x1, x2) = x1 - x1²/2; solves -Δy = 1 with ∂y/∂x1 = 0 at x1 = 1.
    ParabolicX,
    /// Re(z²) = x1² - x2², harmonic everywhere.
    HarmonicQuadratic,
    /// x1²(1-x1)² x2²(1-x2)² on the unit square; zero value and zero
    /// normal derivative on all four edges.
    SquareBubble,
    /// ρ^{3/2} cos(3φ/2) with φ ∈ [0, π] measured at the origin; harmonic
    /// on the upper half-plane. Trace on φ = 0 is positive with zero
    /// normal derivative, trace on φ = π is zero with positive normal
    /// derivative: contact exactly on {x1 ≤ 0}.
    EndpointExact,
    /// ρ^{1/3} cos(θ/3) with θ ∈ [0, 2π); harmonic on the sector
    /// θ ∈ (0, 3π/2). Positive with zero normal derivative on θ = 0,
    /// zero on θ = 3π/2.
    LdomainSd,
    /// -ρ^{2/3} sin(2θ/3) with θ ∈ [0, 2π); harmonic on the sector
    /// θ ∈ (0, 3π/2). Zero on both legs with positive outward normal
    /// derivative: full contact on both legs.
    LdomainSs,
}

/// Polar coordinates with the angle on the branch [0, 2π).
fn polar_full(p: Point) -> (f64, f64) {
    let r = p.norm();
    let mut theta = p.y.atan2(p.x);
    if theta < 0.0 {
        theta += 2.0 * PI;
    }
    (r, theta)
}

/// Polar coordinates on the closed upper half-plane, angle in [0, π].
fn polar_upper(p: Point) -> (f64, f64) {
    let r = p.norm();
    let phi = p.y.max(0.0).atan2(p.x);
    (r, phi)
}

/// a·Re(z^λ) + b·Im(z^λ) evaluated from polar coordinates.
fn power_value(r: f64, theta: f64, lambda: f64, a: f64, b: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    r.powf(lambda) * (a * (lambda * theta).cos() + b * (lambda * theta).sin())
}

/// Gradient of a·Re(z^λ) + b·Im(z^λ):
///   ∂x = λ r^{λ-1} ( a cos((λ-1)θ) + b sin((λ-1)θ) )
///   ∂y = λ r^{λ-1} ( -a sin((λ-1)θ) + b cos((λ-1)θ) )
fn power_gradient(r: f64, theta: f64, lambda: f64, a: f64, b: f64) -> Point {
    if r == 0.0 {
        return Point::new(0.0, 0.0);
    }
    let s = lambda * r.powf(lambda - 1.0);
    let c = ((lambda - 1.0) * theta).cos();
    let sn = ((lambda - 1.0) * theta).sin();
    Point::new(s * (a * c + b * sn), s * (-a * sn + b * c))
}

// SquareBubble factors: p(t) = t²(1-t)².
fn bubble_p(t: f64) -> f64 {
    let u = t * (1.0 - t);
    u * u
}
fn bubble_dp(t: f64) -> f64 {
    2.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
}
fn bubble_ddp(t: f64) -> f64 {
    2.0 - 12.0 * t + 12.0 * t * t
}

impl AnalyticField {
    pub fn value(&self, p: Point) -> f64 {
        match self {
            AnalyticField::Zero => 0.0,
            AnalyticField::Constant(c) => *c,
            AnalyticField::LinearX => p.x,
            AnalyticField::ParabolicX => p.x - 0.5 * p.x * p.x,
            AnalyticField::HarmonicQuadratic => p.x * p.x - p.y * p.y,
            AnalyticField::SquareBubble => bubble_p(p.x) * bubble_p(p.y),
            AnalyticField::EndpointExact => {
                let (r, phi) = polar_upper(p);
                power_value(r, phi, 1.5, 1.0, 0.0)
            }
            AnalyticField::LdomainSd => {
                let (r, theta) = polar_full(p);
                power_value(r, theta, 1.0 / 3.0, 1.0, 0.0)
            }
            AnalyticField::LdomainSs => {
                let (r, theta) = polar_full(p);
                power_value(r, theta, 2.0 / 3.0, 0.0, -1.0)
            }
        }
    }

    /// Closed-form gradient. Unbounded at the singular center of the
    /// power fields with λ < 1; callers keep a positive distance.
    pub fn gradient(&self, p: Point) -> Point {
        match self {
            AnalyticField::Zero | AnalyticField::Constant(_) => Point::new(0.0, 0.0),
            AnalyticField::LinearX => Point::new(1.0, 0.0),
            AnalyticField::ParabolicX => Point::new(1.0 - p.x, 0.0),
            AnalyticField::HarmonicQuadratic => Point::new(2.0 * p.x, -2.0 * p.y),
            AnalyticField::SquareBubble => Point::new(
                bubble_dp(p.x) * bubble_p(p.y),
                bubble_p(p.x) * bubble_dp(p.y),
            ),
            AnalyticField::EndpointExact => {
                let (r, phi) = polar_upper(p);
                power_gradient(r, phi, 1.5, 1.0, 0.0)
            }
            AnalyticField::LdomainSd => {
                let (r, theta) = polar_full(p);
                power_gradient(r, theta, 1.0 / 3.0, 1.0, 0.0)
            }
            AnalyticField::LdomainSs => {
                let (r, theta) = polar_full(p);
                power_gradient(r, theta, 2.0 / 3.0, 0.0, -1.0)
            }
        }
    }

    /// Closed-form Laplacian; zero for the harmonic fields.
    pub fn laplacian(&self, p: Point) -> f64 {
        match self {
            AnalyticField::Zero
            | AnalyticField::Constant(_)
            | AnalyticField::LinearX
            | AnalyticField::HarmonicQuadratic
            | AnalyticField::EndpointExact
            | AnalyticField::LdomainSd
            | AnalyticField::LdomainSs => 0.0,
            AnalyticField::ParabolicX => -1.0,
            AnalyticField::SquareBubble => {
                bubble_ddp(p.x) * bubble_p(p.y) + bubble_p(p.x) * bubble_ddp(p.y)
            }
        }
    }

    pub fn is_harmonic(&self) -> bool {
        !matches!(
            self,
            AnalyticField::ParabolicX | AnalyticField::SquareBubble
        )
    }
}

impl ScalarField for AnalyticField {
    fn value(&self, p: Point) -> f64 {
        AnalyticField::value(self, p)
    }
    fn gradient(&self, p: Point) -> Point {
        AnalyticField::gradient(self, p)
    }
}

/// Volume load on the right-hand side of the equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VolumeLoad {
    Constant(f64),
    Field(AnalyticField),
    /// f = -Δ y* for a named field y*; the homogenization construction.
    NegLaplacianOf(AnalyticField),
}

impl VolumeLoad {
    pub fn eval(&self, p: Point) -> f64 {
        match self {
            VolumeLoad::Constant(c) => *c,
            VolumeLoad::Field(f) => f.value(p),
            VolumeLoad::NegLaplacianOf(f) => -f.laplacian(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [AnalyticField; 9] = [
        AnalyticField::Zero,
        AnalyticField::Constant(2.5),
        AnalyticField::LinearX,
        AnalyticField::ParabolicX,
        AnalyticField::HarmonicQuadratic,
        AnalyticField::SquareBubble,
        AnalyticField::EndpointExact,
        AnalyticField::LdomainSd,
        AnalyticField::LdomainSs,
    ];

    /// Probe points with positive distance from boundaries and branch cuts
    /// of every field (upper half-plane, first quadrant-ish).
    fn probes() -> Vec<Point> {
        vec![
            Point::new(0.31, 0.42),
            Point::new(0.72, 0.19),
            Point::new(0.55, 0.61),
            Point::new(0.18, 0.77),
            Point::new(0.83, 0.35),
        ]
    }

    #[test]
    fn gradients_match_finite_differences() {
        let h = 1e-6;
        for f in ALL {
            for p in probes() {
                let g = f.gradient(p);
                let gx = (f.value(Point::new(p.x + h, p.y)) - f.value(Point::new(p.x - h, p.y)))
                    / (2.0 * h);
                let gy = (f.value(Point::new(p.x, p.y + h)) - f.value(Point::new(p.x, p.y - h)))
                    / (2.0 * h);
                assert!((g.x - gx).abs() < 1e-7, "{f:?} ∂x at {p:?}: {} vs {gx}", g.x);
                assert!((g.y - gy).abs() < 1e-7, "{f:?} ∂y at {p:?}: {} vs {gy}", g.y);
            }
        }
    }

    #[test]
    fn laplacians_match_finite_differences() {
        let h = 1e-4;
        for f in ALL {
            for p in probes() {
                let stencil = (f.value(Point::new(p.x + h, p.y))
                    + f.value(Point::new(p.x - h, p.y))
                    + f.value(Point::new(p.x, p.y + h))
                    + f.value(Point::new(p.x, p.y - h))
                    - 4.0 * f.value(p))
                    / (h * h);
                assert!(
                    (stencil - f.laplacian(p)).abs() < 1e-5,
                    "{f:?} at {p:?}: stencil {stencil} vs {}",
                    f.laplacian(p)
                );
            }
        }
    }

    #[test]
    fn endpoint_field_signorini_branches() {
        let f = AnalyticField::EndpointExact;
        // Non-contact leg φ = 0: positive value, zero normal derivative.
        let p = Point::new(0.5, 0.0);
        assert!(f.value(p) > 0.0);
        // Outward normal of the upper half-plane at the axis is (0, -1).
        assert!(f.gradient(p).y.abs() < 1e-14);
        // Contact leg φ = π: zero value, normal derivative (3/2)ρ^{1/2}.
        let q = Point::new(-0.49, 0.0);
        assert!(f.value(q).abs() < 1e-14);
        let dn = -f.gradient(q).y; // outward is -e2
        assert!((dn - 1.5 * 0.49f64.sqrt()).abs() < 1e-12, "dn = {dn}");
    }

    #[test]
    fn ldomain_sd_traces() {
        let f = AnalyticField::LdomainSd;
        // θ = 0 leg: value ρ^{1/3} > 0, zero normal derivative (normal -e2).
        let p = Point::new(0.7, 0.0);
        assert!((f.value(p) - 0.7f64.powf(1.0 / 3.0)).abs() < 1e-14);
        assert!(f.gradient(p).y.abs() < 1e-14);
        // θ = 3π/2 leg: zero value (Dirichlet-compatible).
        let q = Point::new(0.0, -0.4);
        assert!(f.value(q).abs() < 1e-14);
    }

    #[test]
    fn ldomain_ss_contact_on_both_legs() {
        let f = AnalyticField::LdomainSs;
        // θ = 0: zero value, outward normal -e2, ∂n = (2/3)ρ^{-1/3} > 0.
        let p = Point::new(0.6, 0.0);
        assert!(f.value(p).abs() < 1e-14);
        let dn0 = -f.gradient(p).y;
        assert!(
            (dn0 - (2.0 / 3.0) * 0.6f64.powf(-1.0 / 3.0)).abs() < 1e-12,
            "dn0 = {dn0}"
        );
        // θ = 3π/2: zero value, outward normal +e1, positive ∂n.
        let q = Point::new(0.0, -0.6);
        assert!(f.value(q).abs() < 1e-13);
        let dn1 = f.gradient(q).x;
        assert!(
            (dn1 - (2.0 / 3.0) * 0.6f64.powf(-1.0 / 3.0)).abs() < 1e-12,
            "dn1 = {dn1}"
        );
    }

    #[test]
    fn bubble_flat_on_unit_square_boundary() {
        let f = AnalyticField::SquareBubble;
        for t in [0.0, 0.21, 0.5, 0.83, 1.0] {
            for p in [
                Point::new(t, 0.0),
                Point::new(t, 1.0),
                Point::new(0.0, t),
                Point::new(1.0, t),
            ] {
                assert_eq!(f.value(p), 0.0);
                let g = f.gradient(p);
                assert_eq!(g.x.abs().max(g.y.abs()), 0.0);
            }
        }
    }

    #[test]
    fn serde_names_are_stable() {
        let json = serde_json::to_string(&AnalyticField::EndpointExact).unwrap();
        assert_eq!(json, "\"endpoint-exact\"");
        let json = serde_json::to_string(&AnalyticField::Constant(-1.0)).unwrap();
        assert_eq!(json, "{\"constant\":-1.0}");
        let load: VolumeLoad =
            serde_json::from_str("{\"neg-laplacian-of\":\"square-bubble\"}").unwrap();
        assert_eq!(
            load,
            VolumeLoad::NegLaplacianOf(AnalyticField::SquareBubble)
        );
    }
}
