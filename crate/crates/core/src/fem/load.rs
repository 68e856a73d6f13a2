use super::{Mesh, Mesh1D, Mesh2D, NodalField, SchemeKind};
use crate::error::{Error, Result};
use crate::linalg::conjugate_gradient;
use crate::spectral::{ProfileKind, SpatialProfile};

/// Discrete representative of the spatial source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// L² projection P_h: M f_h = b.
    L2,
    /// Lumped projection: M_L f_h = b.
    Lumped,
}

impl From<SchemeKind> for Projection {
    fn from(s: SchemeKind) -> Self {
        match s {
            SchemeKind::Galerkin => Projection::L2,
            SchemeKind::LumpedMass => Projection::Lumped,
        }
    }
}

/// Exact load vector b_i = ⟨f, φ_i⟩ over interior nodes.
pub fn load_vector(mesh: Mesh, profile: &SpatialProfile) -> Result<Vec<f64>> {
    profile.validate()?;
    let amp = profile.amplitude;
    let b = match (mesh, profile.kind) {
        (Mesh::D1(m), ProfileKind::CharInterval { a, b }) => interval_load(&m, a, b),
        (Mesh::D1(m), ProfileKind::PointMass { x0 }) => (1..=m.interior()).map(|k| m.hat(k, x0)).collect(),
        (Mesh::D2(m), ProfileKind::CharRect { a, b, c, d }) => rect_load(&m, [a, b, c, d]),
        (Mesh::D2(m), ProfileKind::CurveMass { a, b, c, d }) => curve_load(&m, [a, b, c, d]),
        _ => {
            return Err(Error::UnsupportedProfile(format!(
                "{:?} does not live on this mesh",
                profile.kind
            )))
        }
    };
    Ok(b.into_iter().map(|v| amp * v).collect())
}

/// P_h f for Galerkin, the lumped projection otherwise.
pub fn project_source(mesh: Mesh, scheme: SchemeKind, profile: &SpatialProfile) -> Result<NodalField> {
    project_source_with(mesh, scheme.into(), profile)
}

pub fn project_source_with(mesh: Mesh, projection: Projection, profile: &SpatialProfile) -> Result<NodalField> {
    let b = load_vector(mesh, profile)?;
    let values = match projection {
        Projection::Lumped => {
            let w = mesh.lumped_weight();
            b.iter().map(|v| v / w).collect()
        }
        Projection::L2 => match mesh {
            Mesh::D1(m) => m.mass().solve(&b)?,
            Mesh::D2(m) => conjugate_gradient(|x| m.mass_apply(x), &b, 1e-14, 10_000)?,
        },
    };
    NodalField::new(mesh, values)
}

fn interval_load(m: &Mesh1D, a: f64, b: f64) -> Vec<f64> {
    // the hat is linear on each half of its support, so the midpoint rule
    // on each clipped half is exact
    (1..=m.interior())
        .map(|k| {
            [(m.node(k - 1), m.node(k)), (m.node(k), m.node(k + 1))]
                .iter()
                .map(|&(lo, hi)| {
                    let (lo, hi) = (lo.max(a), hi.min(b));
                    if hi > lo {
                        (hi - lo) * m.hat(k, 0.5 * (lo + hi))
                    } else {
                        0.0
                    }
                })
                .sum()
        })
        .collect()
}

fn vertex(m: &Mesh2D, (i, j): (usize, usize)) -> [f64; 2] {
    [i as f64 * m.h(), j as f64 * m.h()]
}

/// ∫_{T ∩ R} φ_v for each vertex v of each triangle T, by clipping T
/// against the rectangle R; each φ_v is linear on the clipped polygon.
fn rect_load(m: &Mesh2D, r: [f64; 4]) -> Vec<f64> {
    let mut out = vec![0.0; m.side() * m.side()];
    for tri in m.triangles() {
        let pts: Vec<[f64; 2]> = tri.iter().map(|&v| vertex(m, v)).collect();
        let poly = clip_to_rect(pts, r);
        if poly.len() < 3 {
            continue;
        }
        let (area, cx, cy) = area_centroid(&poly);
        if area <= 0.0 {
            continue;
        }
        for &v in &tri {
            if m.is_interior(v) {
                out[m.index(v.0, v.1)] += area * m.hat(v.0, v.1, cx, cy);
            }
        }
    }
    out
}

fn clip_to_rect(mut poly: Vec<[f64; 2]>, [a, b, c, d]: [f64; 4]) -> Vec<[f64; 2]> {
    // half-planes as (axis, bound, keep_greater)
    for (axis, bound, greater) in [(0, a, true), (0, b, false), (1, c, true), (1, d, false)] {
        let inside = |p: &[f64; 2]| if greater { p[axis] >= bound } else { p[axis] <= bound };
        let mut next = Vec::with_capacity(poly.len() + 2);
        for i in 0..poly.len() {
            let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
            let (pin, qin) = (inside(&p), inside(&q));
            if pin {
                next.push(p);
            }
            if pin != qin {
                let s = (bound - p[axis]) / (q[axis] - p[axis]);
                next.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
            }
        }
        poly = next;
        if poly.is_empty() {
            break;
        }
    }
    poly
}

fn area_centroid(poly: &[[f64; 2]]) -> (f64, f64, f64) {
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let cr = p[0] * q[1] - q[0] * p[1];
        a += cr;
        cx += (p[0] + q[0]) * cr;
        cy += (p[1] + q[1]) * cr;
    }
    let a = 0.5 * a;
    if a.abs() < f64::MIN_POSITIVE {
        return (0.0, 0.0, 0.0);
    }
    (a.abs(), cx / (6.0 * a), cy / (6.0 * a))
}

/// ∫_Γ φ_i ds over the boundary of the rectangle, splitting each side where
/// it crosses mesh lines (vertical, horizontal and diagonal).
fn curve_load(m: &Mesh2D, [a, b, c, d]: [f64; 4]) -> Vec<f64> {
    let mut out = vec![0.0; m.side() * m.side()];
    let sides = [([a, c], [b, c]), ([b, c], [b, d]), ([a, d], [b, d]), ([a, c], [a, d])];
    let n = m.subdivisions() as f64;
    for (p, q) in sides {
        let len = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
        if len == 0.0 {
            continue;
        }
        // parameter values s ∈ (0, 1) where the side meets x = i h, y = j h
        // or x - y = l h
        let mut cuts = vec![0.0, 1.0];
        let mut crossings = |f0: f64, f1: f64| {
            if f1 != f0 {
                let (lo, hi) = (f0.min(f1), f0.max(f1));
                let mut l = lo.ceil();
                while l <= hi {
                    let s = (l - f0) / (f1 - f0);
                    if s > 0.0 && s < 1.0 {
                        cuts.push(s);
                    }
                    l += 1.0;
                }
            }
        };
        crossings(p[0] * n, q[0] * n);
        crossings(p[1] * n, q[1] * n);
        crossings((p[0] - p[1]) * n, (q[0] - q[1]) * n);
        cuts.sort_by(f64::total_cmp);
        for w in cuts.windows(2) {
            let (s0, s1) = (w[0], w[1]);
            if s1 <= s0 {
                continue;
            }
            let sm = 0.5 * (s0 + s1);
            let (x, y) = (p[0] + sm * (q[0] - p[0]), p[1] + sm * (q[1] - p[1]));
            let piece = (s1 - s0) * len;
            for v in m.locate(x, y) {
                if m.is_interior(v) {
                    out[m.index(v.0, v.1)] += piece * m.hat(v.0, v.1, x, y);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussRule;

    fn rect(a: f64, b: f64, c: f64, d: f64) -> SpatialProfile {
        SpatialProfile::new(ProfileKind::CharRect { a, b, c, d }, 1.0).unwrap()
    }

    #[test]
    fn interval_load_matches_fine_quadrature() {
        let m = Mesh1D::new(10).unwrap();
        let p = SpatialProfile::new(ProfileKind::CharInterval { a: 0.13, b: 0.61 }, 1.0).unwrap();
        let b = load_vector(Mesh::D1(m), &p).unwrap();
        let rule = GaussRule::new(2);
        for k in 1..=10 {
            let mut acc = 0.0;
            let pieces = 20_000;
            for i in 0..pieces {
                let (lo, hi) = (i as f64 / pieces as f64, (i + 1) as f64 / pieces as f64);
                acc += rule.integrate(lo, hi, |x| if (0.13..=0.61).contains(&x) { m.hat(k, x) } else { 0.0 });
            }
            assert!((acc - b[k - 1]).abs() < 1e-8, "{k}");
        }
    }

    #[test]
    fn full_rectangle_gives_hat_integrals() {
        let m = Mesh2D::new(5).unwrap();
        let b = load_vector(Mesh::D2(m), &rect(0.0, 1.0, 0.0, 1.0)).unwrap();
        let h2 = m.h() * m.h();
        assert!(b.iter().all(|v| (v - h2).abs() < 1e-15));
    }

    #[test]
    fn rect_load_matches_monte_carlo_free_grid_sum() {
        // midpoint sum on a fine sub-grid converges to the clipped integral
        let m = Mesh2D::new(4).unwrap();
        let r = [0.1, 0.62, 0.3, 0.9];
        let b = load_vector(Mesh::D2(m), &rect(r[0], r[1], r[2], r[3])).unwrap();
        let k = 1000;
        for (i, j) in [(1, 1), (2, 2), (3, 2)] {
            let mut acc = 0.0;
            for p in 0..k {
                for q in 0..k {
                    let (x, y) = ((p as f64 + 0.5) / k as f64, (q as f64 + 0.5) / k as f64);
                    if x >= r[0] && x <= r[1] && y >= r[2] && y <= r[3] {
                        acc += m.hat(i, j, x, y);
                    }
                }
            }
            acc /= (k * k) as f64;
            assert!((acc - b[m.index(i, j)]).abs() < 2e-5, "{i} {j}");
        }
    }

    #[test]
    fn curve_load_total_is_perimeter_weighted() {
        // Σ_i b_i = ∫_Γ Σ φ_i = perimeter when Γ keeps one cell from ∂Ω
        let m = Mesh2D::new(8).unwrap();
        let p = SpatialProfile::new(
            ProfileKind::CurveMass {
                a: 0.2,
                b: 0.7,
                c: 0.3,
                d: 0.8,
            },
            1.0,
        )
        .unwrap();
        let b = load_vector(Mesh::D2(m), &p).unwrap();
        let total: f64 = b.iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
        // first moment: Σ b_i x_i = ∫_Γ x ds since the interpolant of x is exact
        let mx: f64 = (1..8)
            .flat_map(|i| (1..8).map(move |j| (i, j)))
            .map(|(i, j)| b[m.index(i, j)] * i as f64 * m.h())
            .sum();
        let exact = 2.0 * 0.5 * (0.7 * 0.7 - 0.2 * 0.2) + 0.5 * (0.2 + 0.7);
        assert!((mx - exact).abs() < 1e-13, "{mx} {exact}");
    }

    #[test]
    fn projections() {
        let m = Mesh::D1(Mesh1D::new(15).unwrap());
        let p = SpatialProfile::new(ProfileKind::CharInterval { a: 0.0, b: 1.0 }, 2.0).unwrap();
        let lumped = project_source_with(m, Projection::Lumped, &p).unwrap();
        assert!(lumped.values.iter().all(|v| (v - 2.0).abs() < 1e-13));
        let l2 = project_source(m, SchemeKind::Galerkin, &p).unwrap();
        let mf = m.mass_apply(&l2.values);
        let b = load_vector(m, &p).unwrap();
        assert!(mf.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-14));
        let m2 = Mesh::D2(Mesh2D::new(8).unwrap());
        let q = rect(0.25, 0.75, 0.25, 0.75);
        let l2 = project_source_with(m2, Projection::L2, &q).unwrap();
        let mf = m2.mass_apply(&l2.values);
        let b = load_vector(m2, &q).unwrap();
        assert!(mf.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-14));
        assert!(load_vector(m, &q).is_err());
    }
}
