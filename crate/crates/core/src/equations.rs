//! The polynomial system in crossing labels w and edge labels u.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::{FaceKind, PeripheralComplex};
use crate::error::{invalid, Error, Result};
use crate::geometry;
use crate::poly::{self, Poly};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    W,
    U,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Variable {
    pub id: String,
    pub kind: VarKind,
    /// Torus of a u, or the tori at both ends of a w.
    pub tori: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EqKind {
    Edge,
    Region,
    Vertical,
    Bowtie,
    Bigon,
    Segment,
    Boundary,
    Normalization,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Equation {
    pub kind: EqKind,
    pub source: String,
    /// 0 for f_n, +1 for f_n^+, −1 for f_n^-.
    #[serde(default)]
    pub shift: i8,
    pub poly: Poly,
}

/// A letter of a matrix word: an edge label traversed forward or backward,
/// or a crossing label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Token {
    U { var: usize, forward: bool },
    W { var: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixWord {
    pub source: String,
    pub tokens: Vec<Token>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cusp {
    pub id: String,
    pub meridian: [i64; 2],
    pub longitude: [i64; 2],
    /// Edge labels along the meridian and longitude walks, as (variable, sign).
    pub meridian_word: Vec<(usize, i8)>,
    pub longitude_word: Vec<(usize, i8)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquationSystem {
    pub name: String,
    pub variables: Vec<Variable>,
    pub equations: Vec<Equation>,
    pub words: Vec<MatrixWord>,
    pub cusps: Vec<Cusp>,
    /// Meridian scale per torus; 1 unless rescaled.
    pub gauge: Vec<C64>,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn linear(terms: &[(usize, f64)], rhs: C64) -> Poly {
    let mut t: Vec<(C64, poly::Monomial)> = terms.iter().map(|&(v, c)| (C64::new(c, 0.0), vec![(v, 1)])).collect();
    t.push((-rhs, Vec::new()));
    Poly::from_terms(t)
}

impl EquationSystem {
    pub fn build(c: &PeripheralComplex) -> Result<EquationSystem> {
        EquationSystem::build_gauged(c, &vec![one(); c.tori.len()])
    }

    /// The system whose normalization right sides are scaled by `gauge`.
    pub fn build_gauged(c: &PeripheralComplex, gauge: &[C64]) -> Result<EquationSystem> {
        if gauge.len() != c.tori.len() {
            return Err(invalid("gauge", format!("expected {} entries, got {}", c.tori.len(), gauge.len())));
        }
        if let Some(i) = gauge.iter().position(|g| g.norm() == 0.0) {
            return Err(invalid(&c.tori[i].id, "gauge entry is zero"));
        }
        let na = c.arcs.len();
        let wv = |a: usize| a;
        let uv = |e: usize| na + e;
        let mut variables: Vec<Variable> = c
            .arcs
            .iter()
            .enumerate()
            .map(|(a, arc)| Variable { id: format!("w:{}", arc.id), kind: VarKind::W, tori: c.tori_of_arc(a).to_vec() })
            .collect();
        variables.extend(
            c.pedges.iter().map(|p| Variable { id: format!("u:{}", p.id), kind: VarKind::U, tori: vec![p.torus] }),
        );

        let mut equations = Vec::new();
        let mut words = Vec::new();

        for f in &c.faces {
            let n = f.corners.len();
            let ut: Vec<Poly> = f
                .corners
                .iter()
                .map(|&(e, fw)| Poly::var(uv(e)).scale(C64::new(if fw { 1.0 } else { -1.0 }, 0.0)))
                .collect();
            let wt: Vec<Poly> = f.sides.iter().map(|&(a, _)| Poly::var(wv(a))).collect();
            let kind = match f.kind {
                FaceKind::Region => EqKind::Region,
                FaceKind::Vertical => EqKind::Vertical,
                FaceKind::Bowtie => EqKind::Bowtie,
            };
            match n {
                1 => {
                    return Err(Error::Unsupported(format!(
                        "face {} is a monogon; remove the nugatory crossing first",
                        f.id
                    )))
                }
                2 => {
                    let (e0, e1) = (f.corners[0].0, f.corners[1].0);
                    let (a0, a1) = (f.sides[0].0, f.sides[1].0);
                    for e in [e0, e1] {
                        equations.push(Equation {
                            kind: EqKind::Bigon,
                            source: f.id.clone(),
                            shift: 0,
                            poly: Poly::var(uv(e)),
                        });
                    }
                    if a0 != a1 {
                        equations.push(Equation {
                            kind: EqKind::Bigon,
                            source: f.id.clone(),
                            shift: 0,
                            poly: linear(&[(wv(a0), 1.0), (wv(a1), -1.0)], C64::new(0.0, 0.0)),
                        });
                    }
                }
                _ => {
                    for (p, shift) in poly::region_equations(&ut, &wt).into_iter().zip([0i8, 1, -1]) {
                        equations.push(Equation { kind, source: f.id.clone(), shift, poly: p });
                    }
                }
            }
            let mut tokens = Vec::with_capacity(2 * n);
            for i in 0..n {
                tokens.push(Token::U { var: uv(f.corners[i].0), forward: f.corners[i].1 });
                tokens.push(Token::W { var: wv(f.sides[i].0) });
            }
            words.push(MatrixWord { source: f.id.clone(), tokens });
        }

        // pedges sharing both ends whose difference is a multiple of the meridian
        let mut by_ends: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (e, p) in c.pedges.iter().enumerate() {
            by_ends.entry((p.tail, p.head)).or_default().push(e);
        }
        for es in by_ends.values() {
            for i in 0..es.len() {
                for j in i + 1..es.len() {
                    let (p, q) = (&c.pedges[es[i]], &c.pedges[es[j]]);
                    let d = [p.h[0] - q.h[0], p.h[1] - q.h[1]];
                    let m = c.meridian[p.torus];
                    let (mult, exact) = meridian_multiple(d, m);
                    if !exact {
                        continue;
                    }
                    equations.push(Equation {
                        kind: EqKind::Edge,
                        source: format!("{}|{}", p.id, q.id),
                        shift: 0,
                        poly: linear(&[(uv(es[i]), 1.0), (uv(es[j]), -1.0)], gauge[p.torus] * mult as f64),
                    });
                }
            }
        }

        let pidx = c.pedge_index();
        for p in &c.pedges {
            if let Some(seg) = p.id.strip_prefix("el:") {
                if let Some(&r) = pidx.get(&format!("er:{seg}")) {
                    equations.push(Equation {
                        kind: EqKind::Segment,
                        source: seg.to_string(),
                        shift: 0,
                        poly: linear(&[(uv(pidx[&p.id]), 1.0), (uv(r), -1.0)], C64::new(0.0, 0.0)),
                    });
                }
            }
        }

        for (li, l) in c.polygons.iter().enumerate() {
            let terms: Vec<(usize, f64)> = l.sides.iter().map(|&(e, fw)| (uv(e), if fw { 1.0 } else { -1.0 })).collect();
            equations.push(Equation {
                kind: EqKind::Boundary,
                source: format!("{}#{li}", c.tori[l.torus].id),
                shift: 0,
                poly: linear(&terms, C64::new(0.0, 0.0)),
            });
        }

        let mut cusps = Vec::new();
        for (t, torus) in c.tori.iter().enumerate() {
            let mer = c.meridian[t];
            let lon = c.longitude_class(t);
            let walk_word = |class| -> Result<Vec<(usize, i8)>> {
                Ok(c.find_walk(t, class)?.into_iter().map(|(e, fw)| (uv(e), if fw { 1 } else { -1 })).collect())
            };
            let mw = walk_word(mer)?;
            let lw = walk_word(lon)?;
            let terms: Vec<(usize, f64)> = mw.iter().map(|&(v, s)| (v, s as f64)).collect();
            equations.push(Equation {
                kind: EqKind::Normalization,
                source: torus.id.clone(),
                shift: 0,
                poly: linear(&terms, gauge[t]),
            });
            cusps.push(Cusp { id: torus.id.clone(), meridian: mer, longitude: lon, meridian_word: mw, longitude_word: lw });
        }

        Ok(EquationSystem { name: c.name.clone(), variables, equations, words, cusps, gauge: gauge.to_vec() })
    }

    pub fn n_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.id.clone()).collect()
    }

    pub fn var_index(&self, id: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.id == id)
    }

    /// Residuals of every equation, followed by the projective defects of the
    /// face words.
    pub fn evaluate(&self, x: &[C64]) -> Residuals {
        let equations: Vec<f64> = self.equations.iter().map(|e| e.poly.eval(x).norm()).collect();
        let words: Vec<f64> = self.words.iter().map(|w| geometry::projective_defect(&geometry::word_matrix(x, &w.tokens))).collect();
        let max_eq = equations.iter().copied().fold(0.0, f64::max);
        let max_word = words.iter().copied().fold(0.0, f64::max);
        Residuals { equations, words, max_eq, max_word }
    }

    /// Shape parameter ζ = −w/(ũũ′) at side `i` of the face word `word`.
    pub fn shape(&self, x: &[C64], word: usize, i: usize) -> Option<C64> {
        let t = &self.words[word].tokens;
        let n = t.len() / 2;
        let u = |k: usize| match t[2 * (k % n)] {
            Token::U { var, forward } => {
                if forward {
                    x[var]
                } else {
                    -x[var]
                }
            }
            Token::W { .. } => unreachable!("corners are edge labels"),
        };
        let w = match t[2 * i + 1] {
            Token::W { var } => x[var],
            Token::U { .. } => unreachable!("sides are crossing labels"),
        };
        let d = u(i) * u(i + 1);
        if d.norm() == 0.0 {
            None
        } else {
            Some(-w / d)
        }
    }

    /// Variables fixed to zero by the linear equations alone.
    pub fn structural_zeros(&self) -> Vec<bool> {
        let mut z = vec![false; self.n_vars()];
        for e in &self.equations {
            if e.kind == EqKind::Bigon && e.poly.terms.len() == 1 {
                if let [(v, 1)] = e.poly.terms[0].1.as_slice() {
                    z[*v] = true;
                }
            }
        }
        z
    }

    /// Cusp shape: the sum of edge labels along the longitude, in units of
    /// the meridian.
    pub fn cusp_shape(&self, x: &[C64], torus: usize) -> C64 {
        let c = &self.cusps[torus];
        let sum = |w: &[(usize, i8)]| w.iter().map(|&(v, s)| x[v] * s as f64).sum::<C64>();
        sum(&c.longitude_word) / sum(&c.meridian_word)
    }
}

/// (k, true) when d = k·m.
fn meridian_multiple(d: [i64; 2], m: [i64; 2]) -> (i64, bool) {
    if d == [0, 0] {
        return (0, true);
    }
    if d[0] * m[1] != d[1] * m[0] {
        return (0, false);
    }
    let k = if m[0] != 0 { d[0] / m[0] } else { d[1] / m[1] };
    (k, k * m[0] == d[0] && k * m[1] == d[1])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Residuals {
    pub equations: Vec<f64>,
    pub words: Vec<f64>,
    pub max_eq: f64,
    pub max_word: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.max_eq.max(self.max_word)
    }
}

/// Rescales labels: u on torus i by ν_i, w by the product over its two ends.
pub fn gauge_rescale(sys: &EquationSystem, x: &[C64], nu: &[C64]) -> Result<Vec<C64>> {
    if let Some(i) = nu.iter().position(|g| g.norm() == 0.0) {
        return Err(invalid(format!("gauge[{i}]"), "gauge entry is zero"));
    }
    Ok(sys
        .variables
        .iter()
        .zip(x)
        .map(|(v, &val)| v.tori.iter().fold(val, |acc, &t| acc * nu[t]))
        .collect())
}

/// Label values keyed by variable id.
pub fn labels_map(sys: &EquationSystem, x: &[C64]) -> BTreeMap<String, C64> {
    sys.variables.iter().zip(x).map(|(v, &val)| (v.id.clone(), val)).collect()
}

pub fn labels_from_map(sys: &EquationSystem, m: &BTreeMap<String, C64>) -> Result<Vec<C64>> {
    sys.variables
        .iter()
        .map(|v| m.get(&v.id).copied().ok_or_else(|| invalid(&v.id, "missing label")))
        .collect()
}
