use std::f64::consts::PI;

use serde::Serialize;

use super::{DevelopedCell, Triangulation, TET_EDGES};
use crate::error::{Error, Result};
use crate::mobius::{cross_ratio, Pt};
use crate::C64;

pub const GEOMETRIC_TOL: f64 = 1e-8;
pub const MARGINAL_TOL: f64 = 1e-4;

/// Shape parameters of every tetrahedron at its six edges, in `TET_EDGES`
/// order. With the orientation used here the complete structure has
/// Im ζ < 0.
#[derive(Clone, Debug, Serialize)]
pub struct PiecewiseGeometry {
    pub points: Vec<[Pt; 4]>,
    pub shapes: Vec<[C64; 6]>,
    pub edges: Vec<[usize; 6]>,
    pub class_names: Vec<String>,
}

const EVEN: [[usize; 4]; 12] = [
    [0, 1, 2, 3],
    [0, 2, 3, 1],
    [0, 3, 1, 2],
    [1, 0, 3, 2],
    [1, 2, 0, 3],
    [1, 3, 2, 0],
    [2, 0, 1, 3],
    [2, 1, 3, 0],
    [2, 3, 0, 1],
    [3, 0, 2, 1],
    [3, 1, 0, 2],
    [3, 2, 1, 0],
];

/// ζ at the edge v_i v_j of an oriented ideal tetrahedron.
pub fn shape_at(z: [Pt; 4], i: usize, j: usize) -> C64 {
    let s = EVEN.iter().find(|s| (s[1] == i && s[2] == j) || (s[1] == j && s[2] == i)).copied().unwrap_or([0, 1, 2, 3]);
    cross_ratio([z[s[0]], z[s[1]], z[s[2]], z[s[3]]])
}

pub fn induced_geometry(tri: &Triangulation, developed: &[DevelopedCell]) -> Result<PiecewiseGeometry> {
    let mut points = Vec::with_capacity(tri.tets.len());
    let mut shapes = Vec::with_capacity(tri.tets.len());
    for t in &tri.tets {
        let d = developed
            .iter()
            .find(|d| d.cell == t.cell)
            .ok_or_else(|| Error::Degenerate(format!("cell {} was not developed", t.cell)))?;
        let mut z = [Pt::INF; 4];
        for (k, &v) in t.vertices.iter().enumerate() {
            z[k] = d.position(v).ok_or_else(|| Error::Degenerate(format!("polygon {v} has no position")))?;
        }
        points.push(z);
        shapes.push(TET_EDGES.map(|(i, j)| shape_at(z, i, j)));
    }
    Ok(PiecewiseGeometry {
        points,
        shapes,
        edges: tri.tets.iter().map(|t| t.edges).collect(),
        class_names: tri.classes.iter().map(|c| c.1.clone()).collect(),
    })
}

impl PiecewiseGeometry {
    /// (tetrahedron, local edge) occurrences of every edge class.
    pub fn occurrences(&self) -> Vec<Vec<(usize, usize)>> {
        let mut occ = vec![Vec::new(); self.class_names.len()];
        for (t, es) in self.edges.iter().enumerate() {
            for (k, &e) in es.iter().enumerate() {
                occ[e].push((t, k));
            }
        }
        occ
    }

    pub fn all_shapes(&self) -> impl Iterator<Item = C64> + '_ {
        self.shapes.iter().flat_map(|s| s.iter().copied())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeReport {
    pub class: String,
    pub degree: usize,
    pub product: C64,
    pub defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakReport {
    pub edges: Vec<EdgeReport>,
    pub max_defect: f64,
    pub passed: bool,
}

pub fn check_weak_gluing(pg: &PiecewiseGeometry, tol: f64) -> WeakReport {
    let mut edges = Vec::new();
    for (e, occ) in pg.occurrences().into_iter().enumerate() {
        let product: C64 = occ.iter().map(|&(t, k)| pg.shapes[t][k]).product();
        let defect = (product - 1.0).norm();
        edges.push(EdgeReport {
            class: pg.class_names[e].clone(),
            degree: occ.len(),
            product,
            defect: if defect.is_finite() { defect } else { f64::INFINITY },
        });
    }
    let max_defect = edges.iter().map(|e| e.defect).fold(0.0, f64::max);
    WeakReport { passed: max_defect <= tol, edges, max_defect }
}

#[derive(Clone, Debug, Serialize)]
pub struct StrongEdge {
    pub class: String,
    /// Sum of principal arguments, measured in the orientation where the
    /// complete structure is positive.
    pub angle_sum: f64,
    pub local_degree: i64,
    pub problems: Vec<String>,
    pub passed: bool,
    pub marginal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrongReport {
    pub edges: Vec<StrongEdge>,
    pub passed: bool,
    pub marginal: bool,
}

pub fn check_strong_gluing(pg: &PiecewiseGeometry, tol: f64) -> StrongReport {
    let mut edges = Vec::new();
    for (e, occ) in pg.occurrences().into_iter().enumerate() {
        let mut problems = Vec::new();
        let mut sum = 0.0;
        let mut marginal = false;
        for &(t, k) in &occ {
            let z = pg.shapes[t][k];
            if !z.is_finite() || z.norm() > 1.0 / tol {
                problems.push(format!("infinite shape parameter in tetrahedron {t}"));
                continue;
            }
            if z.im.abs() <= tol {
                problems.push(format!("real shape parameter {:.3e} in tetrahedron {t}", z.re));
                continue;
            }
            if z.im.abs() <= MARGINAL_TOL || (z.arg().abs() - PI).abs() <= MARGINAL_TOL {
                marginal = true;
            }
            sum += z.conj().arg();
        }
        let local_degree = (sum / (2.0 * PI)).round() as i64;
        if problems.is_empty() && (sum - 2.0 * PI).abs() > tol {
            problems.push(format!("angle sum {sum:.6} is not 2π (local degree {local_degree})"));
        }
        edges.push(StrongEdge {
            class: pg.class_names[e].clone(),
            angle_sum: sum,
            local_degree,
            passed: problems.is_empty(),
            marginal,
            problems,
        });
    }
    StrongReport {
        passed: edges.iter().all(|e| e.passed),
        marginal: edges.iter().any(|e| e.marginal),
        edges,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Geometric,
    /// Every shape has Im ζ > 0: the structure of the mirror image.
    GeometricReversed,
    /// Signs are right but some |Im ζ| lies in the marginal band.
    Marginal,
    NotGeometric,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrientationReport {
    pub verdict: Verdict,
    pub min_neg_im: f64,
    pub offenders: Vec<String>,
    pub marginal: Vec<String>,
}

pub fn is_geometric_by_orientation(pg: &PiecewiseGeometry) -> OrientationReport {
    let mut neg = 0;
    let mut pos = 0;
    let mut offenders = Vec::new();
    let mut marginal = Vec::new();
    let mut min_neg_im = f64::INFINITY;
    for (t, s) in pg.shapes.iter().enumerate() {
        for (k, z) in s.iter().enumerate() {
            let (i, j) = TET_EDGES[k];
            let tag = format!("tet {t} edge {i}{j}: {:.6}{:+.6}i", z.re, z.im);
            if !z.is_finite() || z.im.abs() < GEOMETRIC_TOL {
                offenders.push(tag);
                continue;
            }
            if z.im < 0.0 {
                neg += 1;
                min_neg_im = min_neg_im.min(-z.im);
            } else {
                pos += 1;
            }
            if z.im.abs() <= MARGINAL_TOL {
                marginal.push(tag);
            }
        }
    }
    let verdict = if !offenders.is_empty() || (neg > 0 && pos > 0) || neg + pos == 0 {
        Verdict::NotGeometric
    } else if !marginal.is_empty() {
        Verdict::Marginal
    } else if pos == 0 {
        Verdict::Geometric
    } else {
        Verdict::GeometricReversed
    };
    if neg > 0 && pos > 0 {
        for (t, s) in pg.shapes.iter().enumerate() {
            for (k, z) in s.iter().enumerate() {
                if z.im > 0.0 {
                    let (i, j) = TET_EDGES[k];
                    offenders.push(format!("tet {t} edge {i}{j}: {:.6}{:+.6}i", z.re, z.im));
                }
            }
        }
    }
    OrientationReport { verdict, min_neg_im, offenders, marginal }
}
