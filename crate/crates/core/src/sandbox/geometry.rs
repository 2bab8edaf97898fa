//! Exact measures of centered balls intersected with axis-aligned boxes.

use crate::rearrangement::Cube;

/// `|[-r, r] ∩ [a, b]|`.
pub fn segment_overlap(r: f64, a: f64, b: f64) -> f64 {
    (b.min(r) - a.max(-r)).max(0.0)
}

/// `|B(0, r) ∩ [0, x] × [0, y]|` for `x, y ≥ 0`.
fn quadrant_area(r: f64, x: f64, y: f64) -> f64 {
    let (x, y) = (x.min(r), y.min(r));
    if x * x + y * y <= r * r {
        return x * y;
    }
    // columns s ≤ a are cut by y, columns beyond by the circle
    let a = (r * r - y * y).max(0.0).sqrt();
    let prim = |s: f64| 0.5 * (s * (r * r - s * s).max(0.0).sqrt() + r * r * (s / r).clamp(-1.0, 1.0).asin());
    y * a + prim(x) - prim(a)
}

/// Odd extension of [`quadrant_area`] in each variable.
fn signed_area(r: f64, x: f64, y: f64) -> f64 {
    x.signum() * y.signum() * quadrant_area(r, x.abs(), y.abs())
}

/// `|B(0, r) ∩ Q|` in the plane.
pub fn disc_rect_area(r: f64, q: &Cube) -> f64 {
    let ([x0, y0], [x1, y1]) = (q.lo, q.hi);
    let a = signed_area(r, x1, y1) - signed_area(r, x0, y1) - signed_area(r, x1, y0) + signed_area(r, x0, y0);
    a.max(0.0)
}

/// `|B(0, r) ∩ Q|` in dimension 1 or 2.
pub fn ball_box_measure(dim: usize, r: f64, q: &Cube) -> f64 {
    if dim == 1 {
        segment_overlap(r, q.lo[0], q.hi[0])
    } else {
        disc_rect_area(r, q)
    }
}
