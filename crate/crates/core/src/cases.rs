//! Benchmark problems with known structure: the coincidence-endpoint
//! solution ρ^{3/2}cos(3φ/2) on a rectangle, the L-domain ρ^{1/3} and
//! ρ^{2/3} corner solutions, squares with full Signorini boundary under
//! constant loads, and manufactured problems built by homogenization
//! (f = -Δy*, ψ = y*|_{Γ_S}).
//!
//! Every case with an exact solution is verified at construction time by
//! probing the strong form: a Richardson-extrapolated 5-point stencil of
//! the Laplacian at interior points away from the singular centers, and
//! the boundary conditions on every segment.

use thiserror::Error;

use crate::field::{AnalyticField, VolumeLoad};
use crate::geometry::{
    validate_boundary, BoundarySpec, ConditionTag, Point, Polygon, SegmentSpec,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CaseError {
    #[error("homogenization seed is incompatible: {detail}")]
    IncompatibleYStar { detail: String },
    #[error("strong-form probe check failed: {detail}")]
    StrongFormViolated { detail: String },
}

/// Expected leading singular exponent at a point.
#[derive(Clone, Copy, Debug)]
pub struct ExpectedExponent {
    pub location: Point,
    pub lambda: f64,
}

/// A fully specified benchmark problem.
#[derive(Clone, Debug)]
pub struct CaseSpec {
    pub name: &'static str,
    pub boundary: BoundarySpec,
    pub volume_load: Option<VolumeLoad>,
    /// Gap field ψ; absent means ψ ≡ 0.
    pub gap: Option<AnalyticField>,
    /// Exact solution, when one exists in closed form.
    pub exact: Option<AnalyticField>,
    /// Expected number of coincidence intervals (refinement limit).
    pub expected_intervals: Option<usize>,
    pub expected_isolated: Option<usize>,
    pub expected_exponents: Vec<ExpectedExponent>,
}

fn rectangle_endpoint_boundary() -> BoundarySpec {
    validate_boundary(BoundarySpec {
        polygon: Polygon::new(vec![
            Point::new(-1.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(-1.0, 1.0),
        ])
        .unwrap(),
        segments: vec![
            SegmentSpec::new(vec![0], ConditionTag::Signorini),
            SegmentSpec::new(vec![1, 2, 3], ConditionTag::Dirichlet),
        ],
        lifting: Some(AnalyticField::EndpointExact),
    })
    .unwrap()
}

fn l_domain_boundary(both_legs_signorini: bool, lifting: AnalyticField) -> BoundarySpec {
    let polygon = Polygon::new(vec![
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(1.0, 1.0),
        Point::new(-1.0, 1.0),
        Point::new(-1.0, -1.0),
        Point::new(0.0, -1.0),
    ])
    .unwrap();
    let segments = if both_legs_signorini {
        vec![
            SegmentSpec::new(vec![0], ConditionTag::Signorini),
            SegmentSpec::new(vec![1, 2, 3, 4], ConditionTag::Dirichlet),
            SegmentSpec::new(vec![5], ConditionTag::Signorini),
        ]
    } else {
        vec![
            SegmentSpec::new(vec![0], ConditionTag::Signorini),
            SegmentSpec::new(vec![1, 2, 3, 4, 5], ConditionTag::Dirichlet),
        ]
    };
    validate_boundary(BoundarySpec {
        polygon,
        segments,
        lifting: Some(lifting),
    })
    .unwrap()
}

fn square_signorini_boundary(lifting: Option<AnalyticField>) -> BoundarySpec {
    validate_boundary(BoundarySpec {
        polygon: Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap(),
        segments: vec![
            SegmentSpec::new(vec![0, 1, 2], ConditionTag::Signorini),
            SegmentSpec::new(vec![3], ConditionTag::Dirichlet),
        ],
        lifting,
    })
    .unwrap()
}

/// Rectangle [-1,1]×[0,1] with exact solution ρ^{3/2}cos(3φ/2): contact
/// exactly on {x ≤ 0} of the bottom Signorini edge, free endpoint at the
/// origin with exponent 3/2.
pub fn endpoint_case() -> CaseSpec {
    let case = CaseSpec {
        name: "endpoint",
        boundary: rectangle_endpoint_boundary(),
        volume_load: None,
        gap: None,
        exact: Some(AnalyticField::EndpointExact),
        expected_intervals: Some(1),
        expected_isolated: Some(0),
        expected_exponents: vec![ExpectedExponent {
            location: Point::new(0.0, 0.0),
            lambda: 1.5,
        }],
    };
    verify_case(&case).expect("endpoint case satisfies its strong form");
    case
}

/// L-domain with Signorini on the leg θ = 0 only; exact solution
/// ρ^{1/3}cos(θ/3) with empty contact and leading exponent 1/3 at the
/// reentrant corner.
pub fn l_domain_sd_case() -> CaseSpec {
    let case = CaseSpec {
        name: "l-sd",
        boundary: l_domain_boundary(false, AnalyticField::LdomainSd),
        volume_load: None,
        gap: None,
        exact: Some(AnalyticField::LdomainSd),
        expected_intervals: Some(0),
        expected_isolated: Some(0),
        expected_exponents: vec![ExpectedExponent {
            location: Point::new(0.0, 0.0),
            lambda: 1.0 / 3.0,
        }],
    };
    verify_case(&case).expect("S-D case satisfies its strong form");
    case
}

/// L-domain with Signorini on both legs of the reentrant corner; exact
/// solution -ρ^{2/3}sin(2θ/3) in full contact on both legs, leading
/// exponent 2/3.
pub fn l_domain_ss_case() -> CaseSpec {
    let case = CaseSpec {
        name: "l-ss",
        boundary: l_domain_boundary(true, AnalyticField::LdomainSs),
        volume_load: None,
        gap: None,
        exact: Some(AnalyticField::LdomainSs),
        // One interval per Signorini leg (the corner itself is a critical
        // point, not part of the relatively open Signorini boundary).
        expected_intervals: Some(2),
        expected_isolated: Some(0),
        expected_exponents: vec![ExpectedExponent {
            location: Point::new(0.0, 0.0),
            lambda: 2.0 / 3.0,
        }],
    };
    verify_case(&case).expect("S-S case satisfies its strong form");
    case
}

/// Unit square with Signorini conditions on three sides, Dirichlet on the
/// left, and a constant volume load. load = 0 gives the zero solution;
/// load > 0 lifts the membrane off the obstacle (empty contact, exact
/// solution x - x²/2 for load = 1); load < 0 presses it into full
/// contact.
pub fn square_full_signorini_case(load: f64) -> CaseSpec {
    let (name, exact, expected_intervals) = if load == 0.0 {
        // y ≡ 0 touches the obstacle everywhere: one interval covering
        // Γ_S by the exact-equality convention.
        ("square-zero", Some(AnalyticField::Zero), Some(1))
    } else if load == 1.0 {
        ("square-pos", Some(AnalyticField::ParabolicX), Some(0))
    } else if load < 0.0 {
        ("square-neg", None, Some(1))
    } else {
        ("square-load", None, None)
    };
    let case = CaseSpec {
        name,
        boundary: square_signorini_boundary(None),
        volume_load: if load == 0.0 {
            None
        } else {
            Some(VolumeLoad::Constant(load))
        },
        gap: None,
        exact,
        expected_intervals,
        expected_isolated: expected_intervals.map(|_| 0),
        expected_exponents: vec![],
    };
    if case.exact.is_some() {
        verify_case(&case).expect("square case satisfies its strong form");
    }
    case
}

/// Manufactured problem from a seed y* with zero Dirichlet trace and zero
/// normal derivative on the rest of the boundary: f = -Δy*, ψ = y*|_{Γ_S}.
/// The homogenized problem (y - y*) has zero data, so y* itself is the
/// exact solution.
pub fn homogenized_case(y_star: AnalyticField) -> Result<CaseSpec, CaseError> {
    let boundary = square_signorini_boundary(None);
    check_homogenization_seed(&boundary, &y_star)?;
    let case = CaseSpec {
        name: "bubble",
        boundary,
        volume_load: Some(VolumeLoad::NegLaplacianOf(y_star)),
        gap: Some(y_star),
        exact: Some(y_star),
        expected_intervals: None,
        expected_isolated: None,
        expected_exponents: vec![],
    };
    verify_case(&case).map_err(|e| CaseError::IncompatibleYStar {
        detail: e.to_string(),
    })?;
    Ok(case)
}

/// All shipped benchmark cases, in a fixed order.
pub fn all_cases() -> Vec<CaseSpec> {
    vec![
        endpoint_case(),
        l_domain_sd_case(),
        l_domain_ss_case(),
        square_full_signorini_case(0.0),
        square_full_signorini_case(1.0),
        square_full_signorini_case(-1.0),
        homogenized_case(AnalyticField::SquareBubble).expect("bubble seed is compatible"),
    ]
}

pub fn case_names() -> Vec<&'static str> {
    vec![
        "endpoint",
        "l-sd",
        "l-ss",
        "square-zero",
        "square-pos",
        "square-neg",
        "bubble",
    ]
}

pub fn by_name(name: &str) -> Option<CaseSpec> {
    match name {
        "endpoint" => Some(endpoint_case()),
        "l-sd" => Some(l_domain_sd_case()),
        "l-ss" => Some(l_domain_ss_case()),
        "square-zero" => Some(square_full_signorini_case(0.0)),
        "square-pos" => Some(square_full_signorini_case(1.0)),
        "square-neg" => Some(square_full_signorini_case(-1.0)),
        "bubble" => Some(homogenized_case(AnalyticField::SquareBubble).ok()?),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Probe verification
// ---------------------------------------------------------------------------

const INTERIOR_PROBES: usize = 1000;
const STENCIL_H: f64 = 3e-3;
const LAPLACIAN_TOL: f64 = 1e-8;
const BOUNDARY_TOL: f64 = 1e-10;
/// Probes keep this distance from singular expansion centers so the
/// stencil truncation error stays below LAPLACIAN_TOL.
const SINGULAR_EXCLUSION: f64 = 0.5;
const BOUNDARY_MARGIN: f64 = 0.02;

struct Lcg(u64);
impl Lcg {
    fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn dist_to_boundary(polygon: &Polygon, p: Point) -> f64 {
    let mut best = f64::INFINITY;
    for e in 0..polygon.edge_count() {
        let (a, b) = polygon.edge(e);
        let d = b - a;
        let t = ((p - a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
        best = best.min(p.dist(a + d * t));
    }
    best
}

/// Richardson-extrapolated 5-point Laplacian: kills the h² term of the
/// plain stencil, leaving O(h⁴) truncation plus rounding noise.
fn stencil_laplacian(field: &AnalyticField, p: Point, h: f64) -> f64 {
    let five = |h: f64| {
        (field.value(Point::new(p.x + h, p.y))
            + field.value(Point::new(p.x - h, p.y))
            + field.value(Point::new(p.x, p.y + h))
            + field.value(Point::new(p.x, p.y - h))
            - 4.0 * field.value(p))
            / (h * h)
    };
    (4.0 * five(0.5 * h) - five(h)) / 3.0
}

/// Verify the strong form of a case with an exact solution at interior
/// and boundary probe points.
pub fn verify_case(case: &CaseSpec) -> Result<(), CaseError> {
    let Some(exact) = &case.exact else {
        return Ok(());
    };
    let polygon = &case.boundary.polygon;
    let verts = polygon.vertices();
    let (mut lo, mut hi) = (verts[0], verts[0]);
    for v in verts {
        lo = Point::new(lo.x.min(v.x), lo.y.min(v.y));
        hi = Point::new(hi.x.max(v.x), hi.y.max(v.y));
    }
    let exclusion: Vec<Point> = case
        .expected_exponents
        .iter()
        .map(|e| e.location)
        .collect();

    // Interior: -Δy = f at 1000 probe points.
    let mut rng = Lcg(0x51640);
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < INTERIOR_PROBES {
        attempts += 1;
        if attempts > 200 * INTERIOR_PROBES {
            return Err(CaseError::StrongFormViolated {
                detail: "could not place interior probe points".into(),
            });
        }
        let p = Point::new(
            lo.x + (hi.x - lo.x) * rng.next_f64(),
            lo.y + (hi.y - lo.y) * rng.next_f64(),
        );
        if !polygon.contains(p)
            || dist_to_boundary(polygon, p) < BOUNDARY_MARGIN
            || exclusion.iter().any(|c| c.dist(p) < SINGULAR_EXCLUSION)
        {
            continue;
        }
        accepted += 1;
        let lap = stencil_laplacian(exact, p, STENCIL_H);
        let f = case.volume_load.as_ref().map_or(0.0, |l| l.eval(p));
        let residual = (lap + f).abs();
        if residual > LAPLACIAN_TOL * f.abs().max(1.0) {
            return Err(CaseError::StrongFormViolated {
                detail: format!("|Δy + f| = {residual} at probe {p:?}"),
            });
        }
    }

    // Boundary conditions segment by segment.
    let table = case.boundary.edge_table();
    for (edge, &(segment, tag)) in table.iter().enumerate() {
        let (a, b) = polygon.edge(edge);
        let d = b - a;
        let len = d.norm();
        let outward = Point::new(d.y / len, -d.x / len);
        for t in [0.13, 0.31, 0.5, 0.72, 0.9] {
            let p = a + d * t;
            let y = exact.value(p);
            let dn = exact.gradient(p).dot(outward);
            match tag {
                ConditionTag::Dirichlet => {
                    let g = case.boundary.dirichlet_value(segment, edge, p);
                    if (y - g).abs() > BOUNDARY_TOL {
                        return Err(CaseError::StrongFormViolated {
                            detail: format!("Dirichlet mismatch {} at {p:?}", (y - g).abs()),
                        });
                    }
                }
                ConditionTag::Neumann | ConditionTag::Control => {
                    let u = case.boundary.segment_datum(segment, edge, p);
                    if (dn - u).abs() > BOUNDARY_TOL {
                        return Err(CaseError::StrongFormViolated {
                            detail: format!("flux mismatch {} at {p:?}", (dn - u).abs()),
                        });
                    }
                }
                ConditionTag::Signorini => {
                    let psi = case.gap.as_ref().map_or(0.0, |g| g.value(p));
                    let slack = y - psi;
                    if slack < -BOUNDARY_TOL
                        || dn < -BOUNDARY_TOL
                        || slack.abs().min(dn.abs()) > BOUNDARY_TOL
                    {
                        return Err(CaseError::StrongFormViolated {
                            detail: format!(
                                "Signorini triple violated at {p:?}: y-ψ = {slack}, ∂n y = {dn}"
                            ),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_homogenization_seed(
    boundary: &BoundarySpec,
    y_star: &AnalyticField,
) -> Result<(), CaseError> {
    let table = boundary.edge_table();
    for (edge, &(_, tag)) in table.iter().enumerate() {
        let (a, b) = boundary.polygon.edge(edge);
        let d = b - a;
        let len = d.norm();
        let outward = Point::new(d.y / len, -d.x / len);
        for t in [0.08, 0.25, 0.5, 0.77, 0.94] {
            let p = a + d * t;
            match tag {
                ConditionTag::Dirichlet => {
                    let v = y_star.value(p).abs();
                    if v > BOUNDARY_TOL {
                        return Err(CaseError::IncompatibleYStar {
                            detail: format!("y* = {v} on the Dirichlet boundary at {p:?}"),
                        });
                    }
                }
                _ => {
                    let dn = y_star.gradient(p).dot(outward).abs();
                    if dn > BOUNDARY_TOL {
                        return Err(CaseError::IncompatibleYStar {
                            detail: format!("∂n y* = {dn} at {p:?}"),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}
