//! The conformal corner map z ↦ z^{π/α} flattening a sector of opening α
//! onto a half-disk, with numerical checks of its Dirichlet energy
//! identity and of the boundary behavior of w(z)² = (∂₂y + i∂₁y)².

use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

use crate::field::ScalarField;
use crate::geometry::Point;
use crate::quad::gauss_legendre_on;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConformalError {
    #[error("point lies outside the sector (local angle {theta})")]
    OutOfSector { theta: f64 },
}

const ANGLE_TOL: f64 = 1e-9;

/// Conformal bijection of the sector {0 < θ < α} around `center` (first
/// leg in direction `leg_angle`) onto the half-disk sector {0 < θ̂ < π}:
/// r̂ = r^{π/α}, θ̂ = θπ/α.
#[derive(Clone, Copy, Debug)]
pub struct CornerMap {
    pub center: Point,
    pub opening: f64,
    /// Rotation aligning the sector's first leg with θ = 0.
    pub leg_angle: f64,
}

impl CornerMap {
    pub fn new(center: Point, opening: f64, leg_angle: f64) -> Self {
        assert!(
            opening > 0.0 && opening < 2.0 * PI,
            "sector opening must be in (0, 2π)"
        );
        CornerMap {
            center,
            opening,
            leg_angle,
        }
    }

    pub fn exponent(&self) -> f64 {
        PI / self.opening
    }

    /// Polar coordinates of a point in the local sector frame.
    fn local_polar(&self, z: Point) -> Result<(f64, f64), ConformalError> {
        let d = z - self.center;
        let r = d.norm();
        if r == 0.0 {
            return Err(ConformalError::OutOfSector { theta: 0.0 });
        }
        let mut theta = d.angle() - self.leg_angle;
        theta = theta.rem_euclid(2.0 * PI);
        if theta > self.opening {
            if theta >= 2.0 * PI - ANGLE_TOL {
                theta = 0.0;
            } else if theta <= self.opening + ANGLE_TOL {
                theta = self.opening;
            } else {
                return Err(ConformalError::OutOfSector { theta });
            }
        }
        Ok((r, theta))
    }

    /// Image in the half-disk chart: r̂ e^{iθ̂} as a plane point with the
    /// image of the center at the origin.
    pub fn map_point(&self, z: Point) -> Result<Point, ConformalError> {
        let (r, theta) = self.local_polar(z)?;
        let k = self.exponent();
        let r_hat = r.powf(k);
        let theta_hat = theta * k;
        Ok(Point::new(
            r_hat * theta_hat.cos(),
            r_hat * theta_hat.sin(),
        ))
    }

    /// Exact inverse: half-disk chart back to the sector.
    pub fn inverse(&self, z_hat: Point) -> Result<Point, ConformalError> {
        let r_hat = z_hat.norm();
        if r_hat == 0.0 {
            return Err(ConformalError::OutOfSector { theta: 0.0 });
        }
        let mut theta_hat = z_hat.angle();
        if theta_hat < 0.0 {
            if theta_hat >= -ANGLE_TOL {
                theta_hat = 0.0;
            } else {
                return Err(ConformalError::OutOfSector { theta: theta_hat });
            }
        }
        let k = self.exponent();
        let r = r_hat.powf(1.0 / k);
        let theta = theta_hat / k + self.leg_angle;
        Ok(self.center + Point::new(r * theta.cos(), r * theta.sin()))
    }
}

/// Dirichlet energies of a field over the sector and of its pushforward
/// over the half-disk, with their relative difference.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnergyIdentity {
    pub sector: f64,
    pub mapped: f64,
    pub relative_difference: f64,
}

/// Check the energy identity ∫ |∇̂ŷ|² = ∫ |∇y|² for ŷ(ẑ) := y(z) by
/// tensor Gauss quadrature in polar coordinates, `resolution` points per
/// direction, over the sector of the given radius.
pub fn energy_identity_check(
    field: &dyn ScalarField,
    map: &CornerMap,
    radius: f64,
    resolution: usize,
) -> EnergyIdentity {
    assert!(radius > 0.0 && resolution >= 2);
    let k = map.exponent();
    let (r_nodes, r_weights) = gauss_legendre_on(resolution, 0.0, radius);
    let (t_nodes, t_weights) = gauss_legendre_on(resolution, 0.0, map.opening);
    let mut sector = 0.0;
    for (&r, &wr) in r_nodes.iter().zip(&r_weights) {
        for (&t, &wt) in t_nodes.iter().zip(&t_weights) {
            let angle = map.leg_angle + t;
            let p = map.center + Point::new(r * angle.cos(), r * angle.sin());
            let g = field.gradient(p);
            sector += wr * wt * g.dot(g) * r;
        }
    }

    let radius_hat = radius.powf(k);
    let (rh_nodes, rh_weights) = gauss_legendre_on(resolution, 0.0, radius_hat);
    let (th_nodes, th_weights) = gauss_legendre_on(resolution, 0.0, PI);
    // |∇̂ŷ(ẑ)|² = |∇y(z)|² |dz/dẑ|², |dz/dẑ| = (α/π) r̂^{α/π - 1}.
    let inv_k = 1.0 / k;
    let mut mapped = 0.0;
    for (&rh, &wr) in rh_nodes.iter().zip(&rh_weights) {
        for (&th, &wt) in th_nodes.iter().zip(&th_weights) {
            let r = rh.powf(inv_k);
            let theta = th * inv_k;
            let angle = map.leg_angle + theta;
            let p = map.center + Point::new(r * angle.cos(), r * angle.sin());
            let g = field.gradient(p);
            let jac = inv_k * rh.powf(inv_k - 1.0);
            mapped += wr * wt * g.dot(g) * jac * jac * rh;
        }
    }

    let denom = sector.abs().max(mapped.abs());
    let relative_difference = if denom == 0.0 {
        0.0
    } else {
        (sector - mapped).abs() / denom
    };
    EnergyIdentity {
        sector,
        mapped,
        relative_difference,
    }
}

/// Boundary derivative sample in a local frame where the boundary runs
/// along the real axis: `tangential` = ∂₁y, `normal` = ∂₂y, so that
/// w = ∂₂y + i∂₁y.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundaryGradientSample {
    pub arclength: f64,
    pub tangential: f64,
    pub normal: f64,
}

impl BoundaryGradientSample {
    /// The complex value w = ∂₂y + i∂₁y as (re, im).
    pub fn w(&self) -> (f64, f64) {
        (self.normal, self.tangential)
    }
}

/// Im(w²) = 2·(∂₁y)(∂₂y) = 2·t·n; it vanishes on the Signorini boundary
/// away from the critical points since one factor is zero on each side of
/// a coincidence endpoint.
pub fn imag_w_squared(sample: &BoundaryGradientSample) -> f64 {
    2.0 * sample.tangential * sample.normal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::AnalyticField;

    struct Lcg(u64);
    impl Lcg {
        fn next_f64(&mut self) -> f64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (self.0 >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    #[test]
    fn identity_at_opening_pi() {
        let map = CornerMap::new(Point::new(0.0, 0.0), PI, 0.0);
        let z = Point::new(0.3, 0.4);
        let w = map.map_point(z).unwrap();
        assert!((w.x - z.x).abs() < 1e-15);
        assert!((w.y - z.y).abs() < 1e-15);
    }

    #[test]
    fn quarter_sector_maps_i_to_minus_one() {
        let map = CornerMap::new(Point::new(0.0, 0.0), PI / 2.0, 0.0);
        let w = map.map_point(Point::new(0.0, 1.0)).unwrap();
        assert!((w.x + 1.0).abs() < 1e-14);
        assert!(w.y.abs() < 1e-14);
    }

    #[test]
    fn reentrant_sector_arithmetic() {
        // α = 3π/2, r = 8, θ = 3π/4 → r̂ = 8^{2/3} = 4, θ̂ = π/2.
        let map = CornerMap::new(Point::new(0.0, 0.0), 1.5 * PI, 0.0);
        let theta = 0.75 * PI;
        let z = Point::new(8.0 * theta.cos(), 8.0 * theta.sin());
        let w = map.map_point(z).unwrap();
        assert!(w.x.abs() < 1e-13, "w = {w:?}");
        assert!((w.y - 4.0).abs() < 1e-13);
    }

    #[test]
    fn out_of_sector_rejected() {
        let map = CornerMap::new(Point::new(0.0, 0.0), PI / 2.0, 0.0);
        assert!(map.map_point(Point::new(0.5, -0.5)).is_err());
        assert!(map.map_point(Point::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn round_trip_thousand_points() {
        let mut rng = Lcg(0x5ee0);
        for &(opening, leg) in &[(PI / 2.0, 0.3), (1.5 * PI, -1.1), (0.8 * PI, 2.0)] {
            let map = CornerMap::new(Point::new(0.25, -0.5), opening, leg);
            for _ in 0..334 {
                let r = 0.01 + 1.5 * rng.next_f64();
                let t = rng.next_f64() * opening;
                let z = map.center + Point::new(r * (leg + t).cos(), r * (leg + t).sin());
                let w = map.map_point(z).unwrap();
                let back = map.inverse(w).unwrap();
                assert!(back.dist(z) <= 1e-12 * r.max(1.0), "{z:?} -> {back:?}");
            }
        }
    }

    #[test]
    fn conformality_preserves_angles() {
        let map = CornerMap::new(Point::new(0.0, 0.0), 1.5 * PI, 0.0);
        let mut rng = Lcg(0xc0ffee);
        let eps = 1e-6;
        for _ in 0..50 {
            let r = 0.2 + rng.next_f64();
            let t = (0.05 + 0.9 * rng.next_f64()) * map.opening;
            let z = Point::new(r * t.cos(), r * t.sin());
            let a1 = 2.0 * PI * rng.next_f64();
            let a2 = 2.0 * PI * rng.next_f64();
            let push = |dir: f64| {
                let d = Point::new(eps * dir.cos(), eps * dir.sin());
                let plus = map.map_point(z + d).unwrap();
                let minus = map.map_point(z - d).unwrap();
                Point::new(plus.x - minus.x, plus.y - minus.y)
            };
            let v1 = push(a1);
            let v2 = push(a2);
            let pushed = v1.cross(v2).atan2(v1.dot(v2));
            let original = (a2 - a1).sin().atan2((a2 - a1).cos());
            assert!(
                (pushed - original).abs() < 1e-8,
                "angle {original} became {pushed}"
            );
        }
    }

    #[test]
    fn energy_identity_quadratic_harmonic() {
        // Re(z²) on sectors of opening π/2, π, 3π/2: both integrands are
        // polynomial in the quadrature variables, so 64 points already
        // reach machine accuracy.
        for opening in [PI / 2.0, PI, 1.5 * PI] {
            let map = CornerMap::new(Point::new(0.0, 0.0), opening, 0.0);
            let out = energy_identity_check(&AnalyticField::HarmonicQuadratic, &map, 1.0, 64);
            assert!(
                out.relative_difference <= 1e-6,
                "α = {opening}: rel diff {}",
                out.relative_difference
            );
            // ∫ |∇ Re z²|² = ∫ 4r² · r dr dθ = α over the unit sector.
            assert!((out.sector - opening).abs() < 1e-10);
        }
    }

    #[test]
    fn energy_identity_constant_field() {
        let map = CornerMap::new(Point::new(0.0, 0.0), 1.2, 0.4);
        let out = energy_identity_check(&AnalyticField::Constant(3.0), &map, 1.0, 16);
        assert_eq!(out.sector, 0.0);
        assert_eq!(out.mapped, 0.0);
        assert_eq!(out.relative_difference, 0.0);
    }

    /// r^{π/α} cos(πθ/α) maps to the linear function r̂ cos θ̂, whose
    /// half-disk energy is the half-disk area.
    struct SectorPower {
        lambda: f64,
    }
    impl ScalarField for SectorPower {
        fn value(&self, p: Point) -> f64 {
            let r = p.norm();
            let mut t = p.y.atan2(p.x);
            if t < 0.0 {
                t += 2.0 * PI;
            }
            r.powf(self.lambda) * (self.lambda * t).cos()
        }
        fn gradient(&self, p: Point) -> Point {
            let r = p.norm();
            let mut t = p.y.atan2(p.x);
            if t < 0.0 {
                t += 2.0 * PI;
            }
            let s = self.lambda * r.powf(self.lambda - 1.0);
            Point::new(
                s * ((self.lambda - 1.0) * t).cos(),
                -s * ((self.lambda - 1.0) * t).sin(),
            )
        }
    }

    #[test]
    fn energy_identity_power_field_matches_half_disk_value() {
        let opening = 1.5 * PI;
        let map = CornerMap::new(Point::new(0.0, 0.0), opening, 0.0);
        let field = SectorPower {
            lambda: PI / opening,
        };
        let out = energy_identity_check(&field, &map, 1.0, 256);
        // ŷ = r̂ cos θ̂ has |∇̂ŷ| = 1: energy = area of the half disk of
        // radius 1 = π/2. The sector-side integrand has an r^{2λ-1}
        // endpoint singularity, so the agreement is quadrature-limited.
        assert!((out.mapped - PI / 2.0).abs() < 1e-9, "mapped {}", out.mapped);
        assert!(out.relative_difference < 1e-5, "{}", out.relative_difference);
        // The mismatch shrinks as the resolution doubles.
        let coarse = energy_identity_check(&field, &map, 1.0, 64);
        let mid = energy_identity_check(&field, &map, 1.0, 128);
        assert!(mid.relative_difference < coarse.relative_difference);
        assert!(out.relative_difference < mid.relative_difference);
    }

    #[test]
    fn pushforward_of_harmonic_field_stays_harmonic() {
        // 5-point stencil of ŷ in the half-disk chart shrinks at the
        // quadratic rate under grid refinement.
        let map = CornerMap::new(Point::new(0.0, 0.0), 1.5 * PI, 0.0);
        let field = AnalyticField::HarmonicQuadratic;
        let y_hat = |z_hat: Point| field.value(map.inverse(z_hat).unwrap());
        let probe = Point::new(0.25, 0.4);
        let mut prev = f64::INFINITY;
        for k in 0..4 {
            let h = 0.02 / (1 << k) as f64;
            let lap = (y_hat(Point::new(probe.x + h, probe.y))
                + y_hat(Point::new(probe.x - h, probe.y))
                + y_hat(Point::new(probe.x, probe.y + h))
                + y_hat(Point::new(probe.x, probe.y - h))
                - 4.0 * y_hat(probe))
                / (h * h);
            assert!(lap.abs() < prev.max(1e-9), "stencil grew: {lap} vs {prev}");
            prev = lap.abs();
        }
        assert!(prev < 1e-4, "final stencil value {prev}");
    }

    #[test]
    fn imag_w_squared_cases() {
        let mk = |t: f64, n: f64| BoundaryGradientSample {
            arclength: 0.0,
            tangential: t,
            normal: n,
        };
        assert_eq!(imag_w_squared(&mk(0.0, 5.0)), 0.0);
        assert_eq!(imag_w_squared(&mk(3.0, 0.0)), 0.0);
        assert_eq!(imag_w_squared(&mk(1.0, 1.0)), 2.0);
        // Consistency with the complex square: Im((n + it)²) = 2tn.
        let s = mk(0.7, -1.3);
        let (re, im) = s.w();
        assert!((2.0 * re * im - imag_w_squared(&s)).abs() < 1e-15);
    }
}
