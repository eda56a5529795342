//! W-matrices, labels on arbitrary arcs, developing, and the gluing and
//! orientation checks on the induced piecewise geometry.

mod develop;
mod gluing;
pub mod paths;
mod triangulate;

use serde::{Deserialize, Serialize};

use crate::complex::PeripheralComplex;
use crate::equations::Token;
use crate::error::{invalid, Error, Result};
use crate::C64;

pub use crate::mobius::Mat;
pub use develop::{develop, develop_cell, DevelopedCell};
pub use gluing::{
    check_strong_gluing, check_weak_gluing, induced_geometry, is_geometric_by_orientation, shape_at, EdgeReport,
    OrientationReport, PiecewiseGeometry, StrongEdge, StrongReport, Verdict, WeakReport, GEOMETRIC_TOL, MARGINAL_TOL,
};
pub use triangulate::{triangulate, EdgeKey, Tet, Triangulation, TET_EDGES};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Edge matrix [[1, −u], [0, 1]].
pub fn t_mat(u: C64) -> Mat {
    Mat::new(c(1.0), -u, c(0.0), c(1.0))
}

/// Crossing matrix [[0, w], [1, 0]].
pub fn j_mat(w: C64) -> Mat {
    Mat::new(c(0.0), w, c(1.0), c(0.0))
}

/// Contravariant product: later letters multiply on the left.
pub fn word_matrix(x: &[C64], tokens: &[Token]) -> Mat {
    let mut m = Mat::identity();
    for t in tokens {
        let a = match *t {
            Token::U { var, forward } => t_mat(if forward { x[var] } else { -x[var] }),
            Token::W { var } => j_mat(x[var]),
        };
        m = a * m;
    }
    m
}

fn scaled_by_largest(m: &Mat) -> Option<Mat> {
    let big = m.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm()))?;
    (big.norm() > 0.0 && big.is_finite()).then(|| m / big)
}

/// Frobenius distance to the identity after dividing by the entry of
/// largest modulus; `f64::INFINITY` for the zero matrix.
pub fn projective_defect(m: &Mat) -> f64 {
    match scaled_by_largest(m) {
        Some(s) => (s - Mat::identity()).norm(),
        None => f64::INFINITY,
    }
}

/// Distance between two matrices as elements of PGL(2, ℂ).
pub fn projective_distance(a: &Mat, b: &Mat) -> f64 {
    let (Some(a), Some(b)) = (scaled_by_largest(a), scaled_by_largest(b)) else {
        return f64::INFINITY;
    };
    // align phases on the entry where a is largest
    let k = (0..4).max_by(|&i, &j| a[i].norm().total_cmp(&a[j].norm())).unwrap_or(0);
    if b[k].norm() == 0.0 {
        return f64::INFINITY;
    }
    (a - b * (a[k] / b[k])).norm()
}

/// Labels read off a crossing-arc word γ₁ε₁…γ_k.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedLabels {
    /// u(ε₀) at the start.
    pub u: C64,
    /// u(ε_k) at the end.
    pub u_end: C64,
    pub w: C64,
}

/// Solves W(γ₁ε₁…γ_k) ~ [[u′, uu′ + w], [1, u]].
pub fn extend_labels(x: &[C64], tokens: &[Token]) -> Result<ExtendedLabels> {
    match (tokens.first(), tokens.last()) {
        (Some(Token::W { .. }), Some(Token::W { .. })) => {}
        _ => return Err(invalid("path", "a crossing-arc word must start and end with an arc")),
    }
    let m = word_matrix(x, tokens);
    let lower = m[(1, 0)];
    if lower.norm() <= 1e-12 * m.norm() || !lower.is_finite() {
        return Err(Error::Degenerate("word matrix has zero lower-left entry; the path is peripheral".into()));
    }
    let n = m / lower;
    let (u_end, u) = (n[(0, 0)], n[(1, 1)]);
    Ok(ExtendedLabels { u, u_end, w: n[(0, 1)] - u * u_end })
}

/// Sum of edge labels along a closed peripheral-edge word.
pub fn word_sum(c: &PeripheralComplex, x: &[C64], word: &[(usize, bool)]) -> Result<C64> {
    let na = c.arcs.len();
    let mut at: Option<usize> = None;
    let mut start = None;
    let mut sum = C64::new(0.0, 0.0);
    for &(e, fw) in word {
        let p = c.pedges.get(e).ok_or_else(|| invalid("word", format!("no peripheral edge {e}")))?;
        let (s, t) = if fw { (p.tail, p.head) } else { (p.head, p.tail) };
        match at {
            Some(a) if a != s => return Err(invalid(&p.id, "word endpoints do not match")),
            None => start = Some(s),
            _ => {}
        }
        at = Some(t);
        sum += if fw { x[na + e] } else { -x[na + e] };
    }
    if at.is_none() || at != start {
        return Err(invalid("word", "longitude word is not closed"));
    }
    Ok(sum)
}

/// Cusp shape of `torus` along an explicit longitude word, in units of the
/// meridian word.
pub fn cusp_shape(
    c: &PeripheralComplex,
    x: &[C64],
    longitude: &[(usize, bool)],
    meridian: &[(usize, bool)],
) -> Result<C64> {
    let t = |w: &[(usize, bool)]| w.first().map(|&(e, _)| c.pedges[e].torus);
    if t(longitude) != t(meridian) {
        return Err(invalid("word", "longitude and meridian lie on different tori"));
    }
    Ok(word_sum(c, x, longitude)? / word_sum(c, x, meridian)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_matrix() {
        let m = word_matrix(&[c(1.0)], &[Token::U { var: 0, forward: true }]);
        assert_eq!(m, Mat::new(c(1.0), c(-1.0), c(0.0), c(1.0)));
    }

    #[test]
    fn two_crossings_give_diagonal() {
        let x = [c(2.0), c(3.0)];
        let m = word_matrix(&x, &[Token::W { var: 0 }, Token::W { var: 1 }]);
        assert_eq!(m, Mat::new(c(3.0), c(0.0), c(0.0), c(2.0)));
    }

    #[test]
    fn trivial_extension() {
        let x = [C64::new(0.3, -0.2)];
        let l = extend_labels(&x, &[Token::W { var: 0 }]).unwrap();
        assert_eq!(l.u, c(0.0));
        assert_eq!(l.u_end, c(0.0));
        assert!((l.w - x[0]).norm() < 1e-15);
    }

    #[test]
    fn hand_multiplied_extension() {
        // J(1)·T(1)·J(1) = [[0,1],[1,0]]·[[1,−1],[0,1]]·[[0,1],[1,0]] = [[1,0],[−1,1]]
        let x = [c(1.0), c(1.0), c(1.0)];
        let t = [Token::W { var: 0 }, Token::U { var: 1, forward: true }, Token::W { var: 2 }];
        assert_eq!(word_matrix(&x, &t), Mat::new(c(1.0), c(0.0), c(-1.0), c(1.0)));
        let l = extend_labels(&x, &t).unwrap();
        assert!((l.u_end - c(-1.0)).norm() < 1e-15);
        assert!((l.u - c(-1.0)).norm() < 1e-15);
        assert!((l.w - c(-1.0)).norm() < 1e-15);
    }

    #[test]
    fn peripheral_word_is_rejected() {
        let x = [c(1.0)];
        assert!(extend_labels(&x, &[Token::U { var: 0, forward: true }]).is_err());
    }

    #[test]
    fn projective_distance_ignores_scale() {
        let a = Mat::new(c(1.0), c(2.0), c(3.0), c(4.0));
        assert!(projective_distance(&a, &(a * C64::new(0.0, -2.5))) < 1e-15);
        assert!(projective_distance(&a, &Mat::identity()) > 0.1);
    }
}
