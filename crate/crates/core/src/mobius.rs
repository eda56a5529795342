//! Projective points, Möbius maps and generalized circles on the Riemann
//! sphere.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::C64;

pub type Mat = Matrix2<C64>;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Point a/b of ℂ ∪ {∞} in homogeneous coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pt {
    pub a: C64,
    pub b: C64,
}

impl Pt {
    pub const INF: Pt = Pt { a: C64::new(1.0, 0.0), b: C64::new(0.0, 0.0) };

    pub fn finite(z: C64) -> Pt {
        Pt { a: z, b: c(1.0) }
    }

    /// Rescaled so that |a|² + |b|² = 1.
    pub fn normalized(self) -> Pt {
        let n = (self.a.norm_sqr() + self.b.norm_sqr()).sqrt();
        if n == 0.0 {
            self
        } else {
            Pt { a: self.a / n, b: self.b / n }
        }
    }

    pub fn is_null(&self) -> bool {
        self.a.norm() == 0.0 && self.b.norm() == 0.0 || !self.a.is_finite() || !self.b.is_finite()
    }

    /// Affine value, `None` within `eps` (chordally) of ∞.
    pub fn to_complex(self, eps: f64) -> Option<C64> {
        let p = self.normalized();
        if p.b.norm() <= eps {
            None
        } else {
            Some(p.a / p.b)
        }
    }
}

/// a₁b₂ − a₂b₁, proportional to z₁ − z₂.
pub fn det(p: Pt, q: Pt) -> C64 {
    p.a * q.b - q.a * p.b
}

/// Chordal distance on the unit sphere, in [0, 1].
pub fn chordal(p: Pt, q: Pt) -> f64 {
    let (p, q) = (p.normalized(), q.normalized());
    det(p, q).norm()
}

pub fn apply(m: &Mat, p: Pt) -> Pt {
    Pt { a: m[(0, 0)] * p.a + m[(0, 1)] * p.b, b: m[(1, 0)] * p.a + m[(1, 1)] * p.b }
}

/// Adjugate, the projective inverse.
pub fn adjugate(m: &Mat) -> Mat {
    Mat::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)])
}

/// Scaled to determinant 1 (up to sign).
pub fn normalize(m: &Mat) -> Mat {
    let d = m.determinant();
    if d.norm() == 0.0 {
        *m
    } else {
        m / d.sqrt()
    }
}

/// Cross-ratio (z₀ − z₁)(z₂ − z₃) / ((z₀ − z₂)(z₁ − z₃)).
pub fn cross_ratio(z: [Pt; 4]) -> C64 {
    let num = det(z[0], z[1]) * det(z[2], z[3]);
    let den = det(z[0], z[2]) * det(z[1], z[3]);
    num / den
}

/// The map sending z₁, z₂, z₃ to 0, 1, ∞.
pub fn to_standard(z: [Pt; 3]) -> Mat {
    let k = det(z[1], z[2]) / det(z[1], z[0]);
    Mat::new(k * z[0].b, -k * z[0].a, z[2].b, -z[2].a)
}

/// The Möbius map taking `src` to `dst` pointwise.
pub fn from_three(src: [Pt; 3], dst: [Pt; 3]) -> Mat {
    adjugate(&to_standard(dst)) * to_standard(src)
}

/// Rotation of the sphere: unitary, moves no point very far in chordal terms.
pub fn rotation(theta: f64, phi: f64) -> Mat {
    let (s, co) = theta.sin_cos();
    let e = C64::from_polar(1.0, phi);
    Mat::new(c(co), -e.conj() * s, e * s, c(co))
}

/// Generalized circle a|z|² + b z̄ + b̄ z + d = 0; the interior is where the
/// form is negative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub a: f64,
    pub b: C64,
    pub d: f64,
}

impl Circle {
    pub fn from_center(center: C64, radius: f64) -> Circle {
        Circle { a: 1.0, b: -center, d: center.norm_sqr() - radius * radius }.normalized()
    }

    /// Line through `p` with the interior on the left of `dir`.
    pub fn line(p: C64, dir: C64) -> Circle {
        let b = C64::new(0.0, -0.5) * dir;
        let circ = Circle { a: 0.0, b, d: -2.0 * (b.conj() * p).re };
        circ.normalized()
    }

    pub fn form(&self, p: Pt) -> f64 {
        self.a * p.a.norm_sqr() + 2.0 * (self.b * p.a.conj() * p.b).re + self.d * p.b.norm_sqr()
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b.norm_sqr()
    }

    pub fn normalized(self) -> Circle {
        let m = self.a.abs().max(self.b.norm()).max(self.d.abs());
        if m == 0.0 {
            self
        } else {
            Circle { a: self.a / m, b: self.b / m, d: self.d / m }
        }
    }

    pub fn flipped(self) -> Circle {
        Circle { a: -self.a, b: -self.b, d: -self.d }
    }

    pub fn is_line(&self, eps: f64) -> bool {
        self.a.abs() <= eps * self.b.norm().max(self.d.abs())
    }

    pub fn center(&self) -> Option<C64> {
        (self.a != 0.0).then(|| -self.b / self.a)
    }

    pub fn radius(&self) -> Option<f64> {
        (self.a != 0.0).then(|| (-self.det()).max(0.0).sqrt() / self.a.abs())
    }

    /// Whether ∞ lies in the interior.
    pub fn contains_infinity(&self) -> bool {
        self.a < 0.0
    }

    pub fn hermitian(&self) -> Mat {
        Mat::new(c(self.a), self.b, self.b.conj(), c(self.d))
    }

    fn from_hermitian(h: &Mat) -> Circle {
        Circle { a: h[(0, 0)].re, b: (h[(0, 1)] + h[(1, 0)].conj()) / 2.0, d: h[(1, 1)].re }
    }

    /// Image under a Möbius map; interiors go to interiors.
    pub fn transform(&self, m: &Mat) -> Circle {
        let inv = adjugate(m);
        let h = inv.adjoint() * self.hermitian() * inv;
        Circle::from_hermitian(&h).normalized()
    }

    /// Circle through three points, interior on the left when they are
    /// traversed in order.
    pub fn through(p: [Pt; 3]) -> Circle {
        let m = to_standard(p);
        // the real line, interior = upper half plane, is left of 0 → 1 → ∞
        let real = Circle { a: 0.0, b: C64::new(0.0, -0.5), d: 0.0 };
        real.transform(&adjugate(&m))
    }

    /// Least-squares fit through many points; returns the circle and the
    /// largest point residual.
    pub fn fit(points: &[Pt]) -> (Circle, f64) {
        let mut ata = Matrix4::<f64>::zeros();
        for p in points {
            let p = p.normalized();
            let ab = p.a.conj() * p.b;
            let row = nalgebra::Vector4::new(p.a.norm_sqr(), 2.0 * ab.re, -2.0 * ab.im, p.b.norm_sqr());
            ata += row * row.transpose();
        }
        let eig = SymmetricEigen::new(ata);
        let k = (0..4).min_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j])).unwrap_or(0);
        let v = eig.eigenvectors.column(k);
        let circ = Circle { a: v[0], b: C64::new(v[1], v[2]), d: v[3] }.normalized();
        let res = points.iter().map(|&p| circ.residual(p)).fold(0.0, f64::max);
        (circ, res)
    }

    /// Distance-like residual of a point from the circle.
    pub fn residual(&self, p: Pt) -> f64 {
        let p = p.normalized();
        let n = (-self.det()).abs().sqrt().max(1e-300);
        self.form(p).abs() / n
    }

    /// Inversive product: +1 for tangency with disjoint interiors, −1 for
    /// tangency with nested interiors, > 1 for disjoint circles.
    pub fn inversive(&self, o: &Circle) -> f64 {
        let num = self.a * o.d + o.a * self.d - 2.0 * (self.b * o.b.conj()).re;
        num / (2.0 * (self.det() * o.det()).abs().sqrt())
    }

    /// Point of tangency with `o`, assuming the circles are tangent.
    pub fn tangency(&self, o: &Circle) -> Pt {
        let s = self.inversive(o).signum();
        let n1 = (-self.det()).abs().sqrt();
        let n2 = (-o.det()).abs().sqrt();
        let m = self.hermitian() / c(n1) + o.hermitian() * c(s / n2);
        let k = if m.column(0).norm() >= m.column(1).norm() { 0 } else { 1 };
        let col = m.column(k);
        Pt { a: col[1].conj(), b: -col[0].conj() }.normalized()
    }

    /// Interiors are disjoint (closures may touch).
    pub fn interiors_disjoint(&self, o: &Circle, tol: f64) -> bool {
        self.inversive(o) >= 1.0 - tol && !(self.contains_infinity() && o.contains_infinity())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Pt {
        Pt::finite(C64::new(re, im))
    }

    #[test]
    fn standard_position() {
        let m = to_standard([z(2.0, 1.0), z(-1.0, 0.5), z(0.0, 3.0)]);
        assert!(chordal(apply(&m, z(2.0, 1.0)), z(0.0, 0.0)) < 1e-12);
        assert!(chordal(apply(&m, z(-1.0, 0.5)), z(1.0, 0.0)) < 1e-12);
        assert!(chordal(apply(&m, z(0.0, 3.0)), Pt::INF) < 1e-12);
    }

    #[test]
    fn cross_ratio_with_infinity() {
        let zeta = C64::new(0.3, -0.7);
        let cr = cross_ratio([Pt::INF, z(0.0, 0.0), z(1.0, 0.0), Pt::finite(zeta)]);
        assert!((cr - (c(1.0) - c(1.0) / zeta)).norm() < 1e-12);
    }

    #[test]
    fn tangent_unit_circles() {
        let a = Circle::from_center(c(0.0), 1.0);
        let b = Circle::from_center(c(2.0), 1.0);
        assert!((a.inversive(&b) - 1.0).abs() < 1e-12);
        assert!(chordal(a.tangency(&b), z(1.0, 0.0)) < 1e-12);
        assert!((a.inversive(&b.flipped()) + 1.0).abs() < 1e-12);
        assert!(a.interiors_disjoint(&b, 1e-9));
        assert!(!a.interiors_disjoint(&b.flipped(), 1e-9));
    }

    #[test]
    fn circle_through_points_has_left_interior() {
        let k = Circle::through([z(1.0, 0.0), z(0.0, 1.0), z(-1.0, 0.0)]);
        assert!(k.form(z(0.0, 0.0)) < 0.0);
        assert!((k.radius().unwrap() - 1.0).abs() < 1e-12);
        let cw = Circle::through([z(-1.0, 0.0), z(0.0, 1.0), z(1.0, 0.0)]);
        assert!(cw.form(z(0.0, 0.0)) > 0.0);
    }

    #[test]
    fn line_interior() {
        let l = Circle::line(c(0.0), c(1.0));
        assert!(l.is_line(1e-12));
        assert!(l.form(z(0.0, 1.0)) < 0.0);
        let k = Circle::through([z(0.0, 0.0), z(1.0, 0.0), Pt::INF]);
        assert!(k.form(z(0.0, 1.0)) < 0.0);
    }

    #[test]
    fn fit_recovers_circle() {
        let pts: Vec<Pt> = (0..7).map(|k| Pt::finite(c(1.0) + C64::from_polar(2.0, k as f64))).collect();
        let (k, r) = Circle::fit(&pts);
        assert!(r < 1e-10);
        assert!((k.center().unwrap() - c(1.0)).norm() < 1e-9);
        assert!((k.radius().unwrap() - 2.0).abs() < 1e-9);
    }
}
