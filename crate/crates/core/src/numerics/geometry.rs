pub type Vec3 = [f64; 3];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalized(a: Vec3) -> Option<Vec3> {
    let n = norm(a);
    (n > 0.0 && n.is_finite()).then(|| [a[0] / n, a[1] / n, a[2] / n])
}

/// Signed solid angle of the spherical triangle (v1, v2, v3).
///
/// Positive when the vertices run counter-clockwise seen from outside the
/// sphere. Inputs are normalized here; a zero vector or a triple coplanar with
/// the origin gives 0.
pub fn solid_angle(v1: Vec3, v2: Vec3, v3: Vec3) -> f64 {
    let (Some(a), Some(b), Some(c)) = (normalized(v1), normalized(v2), normalized(v3)) else {
        return 0.0;
    };
    let triple = dot(a, cross(b, c));
    if triple.abs() <= 1e-15 {
        return 0.0;
    }
    let denom = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    2.0 * triple.atan2(denom)
}
