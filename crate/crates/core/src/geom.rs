//! Small fixed-size geometry types used throughout the crate: points and
//! covectors in the plane, and 2x2 real matrices for linearized flows.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Point::new(r * theta.cos(), r * theta.sin())
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn angle(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn add(&self, v: Point) -> Point {
        Point::new(self.x + v.x, self.y + v.y)
    }

    pub fn sub(&self, v: Point) -> Point {
        Point::new(self.x - v.x, self.y - v.y)
    }

    pub fn scale(&self, s: f64) -> Point {
        Point::new(s * self.x, s * self.y)
    }

    pub fn dist(&self, other: Point) -> f64 {
        self.sub(other).radius()
    }

    pub fn dot(&self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Rotate counterclockwise by `phi`.
    pub fn rotate(&self, phi: f64) -> Point {
        let (s, c) = phi.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Value of a 1-form `p dx + q dy` at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneForm {
    /// Coefficient of `dx`.
    pub p: f64,
    /// Coefficient of `dy`.
    pub q: f64,
}

impl OneForm {
    pub const fn new(p: f64, q: f64) -> Self {
        OneForm { p, q }
    }

    /// Pair the covector with a tangent vector.
    pub fn apply(&self, v: Point) -> f64 {
        self.p * v.x + self.q * v.y
    }

    pub fn scale(&self, s: f64) -> OneForm {
        OneForm::new(s * self.p, s * self.q)
    }

    pub fn sub(&self, other: OneForm) -> OneForm {
        OneForm::new(self.p - other.p, self.q - other.q)
    }

    pub fn norm(&self) -> f64 {
        self.p.hypot(self.q)
    }
}

/// A 2x2 real matrix in row-major order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub const fn identity() -> Self {
        Mat2::new(1.0, 0.0, 0.0, 1.0)
    }

    pub const fn diag(a: f64, d: f64) -> Self {
        Mat2::new(a, 0.0, 0.0, d)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn mul(&self, m: &Mat2) -> Mat2 {
        Mat2::new(
            self.a * m.a + self.b * m.c,
            self.a * m.b + self.b * m.d,
            self.c * m.a + self.d * m.c,
            self.c * m.b + self.d * m.d,
        )
    }

    pub fn apply(&self, v: Point) -> Point {
        Point::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    /// Pull a covector back through this matrix: `(M^T w)` as a 1-form.
    pub fn pullback(&self, w: OneForm) -> OneForm {
        OneForm::new(self.a * w.p + self.c * w.q, self.b * w.p + self.d * w.q)
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.a, self.c, self.b, self.d)
    }

    pub fn pow(&self, s: u32) -> Mat2 {
        let mut result = Mat2::identity();
        let mut base = *self;
        let mut exp = s;
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        result
    }

    /// Eigenvalues as a complex pair, ordered by real part (then imaginary).
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let tr = self.trace();
        let det = self.det();
        let disc = tr * tr - 4.0 * det;
        let mut eigs = if disc >= 0.0 {
            // Numerically stable root pairing: the large root from the
            // quadratic formula, the small one from the determinant
            // (avoids cancellation when |tr| is large).
            let s = disc.sqrt();
            let big = if tr >= 0.0 { (tr + s) / 2.0 } else { (tr - s) / 2.0 };
            let small = if big != 0.0 { det / big } else { (tr + s) / 2.0 };
            [Complex64::new(small, 0.0), Complex64::new(big, 0.0)]
        } else {
            let s = (-disc).sqrt();
            [
                Complex64::new(tr / 2.0, -s / 2.0),
                Complex64::new(tr / 2.0, s / 2.0),
            ]
        };
        if (eigs[0].re, eigs[0].im) > (eigs[1].re, eigs[1].im) {
            eigs.swap(0, 1);
        }
        eigs
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_power_matches_repeated_multiplication() {
        let m = Mat2::new(1.5, 0.25, -0.5, 0.75);
        let mut acc = Mat2::identity();
        for s in 0..=6 {
            let p = m.pow(s);
            assert!((p.a - acc.a).abs() < 1e-12);
            assert!((p.d - acc.d).abs() < 1e-12);
            acc = acc.mul(&m);
        }
    }

    #[test]
    fn eigenvalues_of_diagonal_matrix() {
        let eigs = Mat2::diag(2.0, 0.5).eigenvalues();
        assert!((eigs[0].re - 0.5).abs() < 1e-15 && eigs[0].im == 0.0);
        assert!((eigs[1].re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvalues_of_rotation_are_on_unit_circle() {
        let (s, c) = 0.7f64.sin_cos();
        let eigs = Mat2::new(c, -s, s, c).eigenvalues();
        for e in eigs {
            assert!((e.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pullback_is_transpose_action() {
        let m = Mat2::new(1.0, 2.0, 3.0, 4.0);
        let w = OneForm::new(5.0, 7.0);
        let v = Point::new(-1.0, 2.0);
        // (M^T w)(v) == w(M v)
        assert!((m.pullback(w).apply(v) - w.apply(m.apply(v))).abs() < 1e-12);
    }
}
