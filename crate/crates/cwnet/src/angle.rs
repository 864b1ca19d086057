//! Phase arithmetic on the half-open interval `[0, 2π)`.

/// Default absolute tolerance for comparing phases, in radians.
pub const PHASE_TOL: f64 = 1e-9;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Reduces an angle to `[0, 2π)`.
pub fn wrap(x: f64) -> f64 {
    let mut r = x.rem_euclid(TWO_PI);
    // rem_euclid can return exactly 2π for tiny negative inputs
    if r >= TWO_PI {
        r -= TWO_PI;
    }
    r
}

/// Circular distance between two angles, in `[0, π]`.
pub fn dist(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    d.min(TWO_PI - d)
}

/// Whether two angles agree within an absolute circular tolerance.
pub fn eq(a: f64, b: f64, tol: f64) -> bool {
    dist(a, b) <= tol
}

/// The phase of the mirrored (conjugate) direction of an edge.
pub fn mirror(phi: f64) -> f64 {
    wrap(TWO_PI - phi)
}
