//! JSON artifacts for every stage, and SVG rendering of packings.
//!
//! Complex numbers are written as `[re, im]` pairs. Object keys are sorted so
//! that identical inputs give byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::equations::{labels_from_map, labels_map, Cusp, EqKind, Equation, EquationSystem, MatrixWord, Token, Variable};
use crate::error::{invalid, Error, Result};
use crate::fal::{CirclePacking, PackingFit, UnivalenceReport};
use crate::poly::Poly;
use crate::solver::SolutionSet;
use crate::C64;

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let value = serde_json::to_value(v)?;
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: C64,
    /// Exponent of every variable, in variable order.
    pub exps: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquationDump {
    pub kind: EqKind,
    pub source: String,
    #[serde(default)]
    pub shift: i8,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WordDump {
    pub source: String,
    /// `T(id)`, `T(-id)` or `J(id)`, first letter first.
    pub tokens: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemDump {
    pub name: String,
    pub variables: Vec<Variable>,
    pub equations: Vec<EquationDump>,
    pub words: Vec<WordDump>,
    pub cusps: Vec<Cusp>,
    pub gauge: Vec<C64>,
}

impl SystemDump {
    pub fn from_system(sys: &EquationSystem) -> SystemDump {
        let n = sys.n_vars();
        let names = sys.names();
        let equations = sys
            .equations
            .iter()
            .map(|e| EquationDump {
                kind: e.kind,
                source: e.source.clone(),
                shift: e.shift,
                terms: e
                    .poly
                    .terms
                    .iter()
                    .map(|(c, m)| {
                        let mut exps = vec![0; n];
                        for &(v, k) in m {
                            exps[v] = k;
                        }
                        Term { coeff: *c, exps }
                    })
                    .collect(),
            })
            .collect();
        let words = sys
            .words
            .iter()
            .map(|w| WordDump {
                source: w.source.clone(),
                tokens: w
                    .tokens
                    .iter()
                    .map(|t| match *t {
                        Token::U { var, forward: true } => format!("T({})", names[var]),
                        Token::U { var, forward: false } => format!("T(-{})", names[var]),
                        Token::W { var } => format!("J({})", names[var]),
                    })
                    .collect(),
            })
            .collect();
        SystemDump {
            name: sys.name.clone(),
            variables: sys.variables.clone(),
            equations,
            words,
            cusps: sys.cusps.clone(),
            gauge: sys.gauge.clone(),
        }
    }

    pub fn to_system(&self) -> Result<EquationSystem> {
        let n = self.variables.len();
        let index: BTreeMap<&str, usize> = self.variables.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        let mut equations = Vec::with_capacity(self.equations.len());
        for e in &self.equations {
            let mut terms = Vec::with_capacity(e.terms.len());
            for t in &e.terms {
                if t.exps.len() != n {
                    return Err(invalid(&e.source, format!("term has {} exponents for {n} variables", t.exps.len())));
                }
                let m = t.exps.iter().enumerate().filter(|(_, &k)| k > 0).map(|(v, &k)| (v, k)).collect();
                terms.push((t.coeff, m));
            }
            equations.push(Equation { kind: e.kind, source: e.source.clone(), shift: e.shift, poly: Poly::from_terms(terms) });
        }
        let var = |s: &str, at: &str| index.get(s).copied().ok_or_else(|| invalid(at, format!("unknown variable {s}")));
        let mut words = Vec::with_capacity(self.words.len());
        for w in &self.words {
            let mut tokens = Vec::with_capacity(w.tokens.len());
            for t in &w.tokens {
                let inner = |p: &str| t.strip_prefix(p).and_then(|r| r.strip_suffix(')'));
                let tok = if let Some(r) = inner("T(-") {
                    Token::U { var: var(r, &w.source)?, forward: false }
                } else if let Some(r) = inner("T(") {
                    Token::U { var: var(r, &w.source)?, forward: true }
                } else if let Some(r) = inner("J(") {
                    Token::W { var: var(r, &w.source)? }
                } else {
                    return Err(invalid(&w.source, format!("bad token {t}")));
                };
                tokens.push(tok);
            }
            words.push(MatrixWord { source: w.source.clone(), tokens });
        }
        if self.gauge.is_empty() && !self.cusps.is_empty() {
            return Err(invalid("gauge", "missing gauge"));
        }
        Ok(EquationSystem {
            name: self.name.clone(),
            variables: self.variables.clone(),
            equations,
            words,
            cusps: self.cusps.clone(),
            gauge: self.gauge.clone(),
        })
    }
}

pub fn system_to_json(sys: &EquationSystem) -> Result<String> {
    to_json(&SystemDump::from_system(sys))
}

pub fn system_from_json(text: &str) -> Result<EquationSystem> {
    let d: SystemDump = serde_json::from_str(text).map_err(|e| Error::Parse(format!("system file: {e}")))?;
    d.to_system()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub labels: BTreeMap<String, C64>,
    pub residual: f64,
    pub degenerate: bool,
}

pub fn solutions_to_records(sys: &EquationSystem, set: &SolutionSet) -> Vec<SolutionRecord> {
    set.solutions
        .iter()
        .map(|r| SolutionRecord { labels: labels_map(sys, &r.x), residual: r.residual, degenerate: r.degenerate })
        .collect()
}

pub fn solutions_from_json(text: &str) -> Result<Vec<SolutionRecord>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("solutions file: {e}")))
}

/// Label vectors in the variable order of `sys`.
pub fn records_to_roots(sys: &EquationSystem, recs: &[SolutionRecord]) -> Result<Vec<Vec<C64>>> {
    recs.iter().map(|r| labels_from_map(sys, &r.labels)).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircleRecord {
    pub region: String,
    /// Entries of [[a, b], [b̄, d]] in row order.
    pub hermitian: [C64; 4],
    pub center: Option<C64>,
    pub radius: Option<f64>,
    pub contains_infinity: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TangencyRecord {
    pub id: String,
    pub regions: [String; 2],
    /// `None` for ∞.
    pub point: Option<C64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PackingRecord {
    pub diagram: String,
    pub solution: usize,
    pub circles: Vec<CircleRecord>,
    pub tangencies: Vec<TangencyRecord>,
    pub fit_residual: f64,
    pub tangency_residual: f64,
    pub univalence: UnivalenceReport,
    pub verdict: String,
}

const LINE_EPS: f64 = 1e-12;

pub fn packing_record(diagram: &str, solution: usize, pf: &PackingFit, univalence: UnivalenceReport) -> PackingRecord {
    let p = &pf.packing;
    let circles = p
        .regions
        .iter()
        .zip(&p.circles)
        .map(|(r, c)| {
            let h = c.hermitian();
            let line = c.is_line(LINE_EPS);
            CircleRecord {
                region: r.clone(),
                hermitian: [h[(0, 0)], h[(0, 1)], h[(1, 0)], h[(1, 1)]],
                center: if line { None } else { c.center() },
                radius: if line { None } else { c.radius() },
                contains_infinity: c.contains_infinity(),
            }
        })
        .collect();
    let tangencies = p
        .edges
        .iter()
        .map(|e| TangencyRecord {
            id: e.id.clone(),
            regions: [p.regions[e.ends[0]].clone(), p.regions[e.ends[1]].clone()],
            point: e.point.to_complex(LINE_EPS),
        })
        .collect();
    PackingRecord {
        diagram: diagram.into(),
        solution,
        circles,
        tangencies,
        fit_residual: pf.fit_residual,
        tangency_residual: pf.tangency_residual,
        verdict: univalence.verdict.to_string(),
        univalence,
    }
}

fn finite_points(p: &CirclePacking) -> Vec<C64> {
    p.edges.iter().filter_map(|e| e.point.to_complex(LINE_EPS)).collect()
}

/// Circles, tangency points and region ids. The view is fitted to the
/// tangency points; circles through ∞ are drawn as lines.
pub fn packing_svg(p: &CirclePacking) -> String {
    let pts = finite_points(p);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in &pts {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    if pts.is_empty() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let w = 1.5 * span;
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let size = 800.0;
    let k = size / w;
    let sx = |x: f64| (x - cx) * k + size / 2.0;
    let sy = |y: f64| size / 2.0 - (y - cy) * k;
    let stroke = 1.5;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (r, c) in p.regions.iter().zip(&p.circles) {
        let fill = if c.contains_infinity() { "none" } else { "#cfe0f5" };
        let label_at;
        if c.is_line(LINE_EPS) {
            // a z̄ + b̄ z + d = 0 with a = 0: Re(b̄ z) = −d/2
            let n = c.b.conj();
            let base = -c.d / 2.0 * n / n.norm_sqr();
            let dir = C64::new(0.0, 1.0) * n / n.norm();
            let (p0, p1) = (base - dir * (4.0 * w), base + dir * (4.0 * w));
            let _ = writeln!(
                s,
                r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="{stroke}"/>"#,
                sx(p0.re),
                sy(p0.im),
                sx(p1.re),
                sy(p1.im)
            );
            label_at = base;
        } else {
            let (Some(z), Some(rad)) = (c.center(), c.radius()) else { continue };
            let dash = if c.contains_infinity() { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                s,
                r#"<circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="{fill}" fill-opacity="0.5" stroke="black" stroke-width="{stroke}"{dash}/>"#,
                sx(z.re),
                sy(z.im),
                rad * k
            );
            label_at = if c.contains_infinity() { z + C64::new(0.0, rad * 1.05) } else { z };
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            sx(label_at.re),
            sy(label_at.im),
            escape(r)
        );
    }
    for e in &p.edges {
        if let Some(z) = e.point.to_complex(LINE_EPS) {
            let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="crimson"><title>{}</title></circle>"#, sx(z.re), sy(z.im), escape(&e.id));
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
