//! Geometricity of fully augmented links in S³: the three label criteria,
//! circle packings from solutions and back, and univalence.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::complex::{gamma0_left, FaceKind, PeripheralComplex};
use crate::diagram::FalDiagram;
use crate::equations::EquationSystem;
use crate::error::{invalid, Error, Result};
use crate::geometry::develop_cell;
use crate::mobius::{self, chordal, Circle, Mat, Pt};
use crate::C64;

pub const FAL_TOL: f64 = 1e-8;
/// Largest admissible circumcircle residual of a region's vertices.
pub const FIT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Offender {
    pub label: String,
    pub value: C64,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub criterion: String,
    pub passed: bool,
    pub offenders: Vec<Offender>,
}

impl CriterionReport {
    fn new(name: &str, offenders: Vec<Offender>) -> CriterionReport {
        CriterionReport { criterion: name.into(), passed: offenders.is_empty(), offenders }
    }
}

struct Labels<'a> {
    c: &'a PeripheralComplex,
    x: &'a [C64],
    pe: BTreeMap<String, usize>,
    ar: BTreeMap<String, usize>,
}

impl<'a> Labels<'a> {
    fn new(c: &'a PeripheralComplex, x: &'a [C64]) -> Result<Labels<'a>> {
        let n = c.arcs.len() + c.pedges.len();
        if x.len() != n {
            return Err(invalid("solution", format!("expected {n} labels, got {}", x.len())));
        }
        Ok(Labels { c, x, pe: c.pedge_index(), ar: c.arc_index() })
    }

    fn u(&self, id: &str) -> Result<C64> {
        let e = self.pe.get(id).ok_or_else(|| invalid(id, "missing conventional peripheral edge"))?;
        Ok(self.x[self.c.arcs.len() + e])
    }

    fn w(&self, id: &str) -> Result<C64> {
        let a = self.ar.get(id).ok_or_else(|| invalid(id, "missing conventional crossing arc"))?;
        Ok(self.x[*a])
    }
}

fn off(label: String, value: C64, reason: &str) -> Offender {
    Offender { label, value, reason: reason.into() }
}

/// Slot through which each strand leaves each circle, keyed by (circle, 1 or 2).
fn departure_slots(d: &FalDiagram) -> BTreeMap<(usize, u8), u8> {
    let mut out = BTreeMap::new();
    for st in &d.strands {
        for (j, &(s, fw)) in st.segs.iter().enumerate() {
            let seg = &d.segments[s];
            out.insert(st.punctures[j], if fw { seg.from.1 } else { seg.to.1 });
        }
    }
    out
}

/// Expected u of `e{strand}+` at a circle: ±1/2, positive when the γ⁰ end
/// lies to the left of the departing strand.
fn half_meridian(slots: &BTreeMap<(usize, u8), u8>, circle: usize, strand: u8) -> f64 {
    match slots.get(&(circle, strand)) {
        Some(&s) if gamma0_left(s) => 0.5,
        _ => -0.5,
    }
}

/// Direction of every segment along its strand.
fn segment_forward(d: &FalDiagram) -> Vec<bool> {
    let mut fw = vec![true; d.segments.len()];
    for st in &d.strands {
        for &(s, f) in &st.segs {
            fw[s] = f;
        }
    }
    fw
}

pub fn check_pure_imag(c: &PeripheralComplex, d: &FalDiagram, x: &[C64], tol: f64) -> Result<CriterionReport> {
    let l = Labels::new(c, x)?;
    let slots = departure_slots(d);
    let mut bad = Vec::new();
    for (ci, circ) in d.circles.iter().enumerate() {
        let id = &circ.id;
        for m in ["emu1", "emu2"] {
            let u = l.u(&format!("{m}:{id}"))?;
            if (u - 1.0).norm() > tol {
                bad.push(off(format!("u({m}:{id})"), u, "meridian edge label is not 1"));
            }
        }
        for strand in [1u8, 2] {
            let h = half_meridian(&slots, ci, strand);
            for (sign, want) in [("+", h), ("-", -h)] {
                let name = format!("e{strand}{sign}:{id}");
                let u = l.u(&name)?;
                if (u - want).norm() > tol {
                    bad.push(off(format!("u({name})"), u, &format!("expected {want:+}")));
                }
            }
        }
        for g in ["g1", "g2"] {
            let w = l.w(&format!("{g}:{id}"))?;
            if w.re.abs() > tol {
                bad.push(off(format!("w({g}:{id})"), w, "not pure imaginary"));
            }
        }
        let w0 = l.w(&format!("g0:{id}"))?;
        if w0.im.abs() > tol {
            bad.push(off(format!("w(g0:{id})"), w0, "not real"));
        }
        let u0 = l.u(&format!("e0+:{id}"))?;
        if u0.re.abs() > tol {
            bad.push(off(format!("u(e0+:{id})"), u0, "not pure imaginary"));
        }
    }
    for s in &d.segments {
        let ul = l.u(&format!("el:{}", s.id))?;
        let ur = l.u(&format!("er:{}", s.id))?;
        if (ul - ur).norm() > tol {
            bad.push(off(format!("u(el:{})", s.id), ul, "differs from the right edge"));
        }
        if ul.re.abs() > tol {
            bad.push(off(format!("u(el:{})", s.id), ul, "not pure imaginary"));
        }
    }
    Ok(CriterionReport::new("pure_imaginary", bad))
}

/// The spanning-face edge and the left segment edges must lie on the
/// negative imaginary axis in the orientation where geometric shapes have
/// Im ζ < 0. With the circle slot order used here that orientation reads
/// Im u(e0+) > 0 and Im u(el) > 0 along the strand.
pub fn check_orientation(c: &PeripheralComplex, d: &FalDiagram, x: &[C64], tol: f64) -> Result<CriterionReport> {
    let l = Labels::new(c, x)?;
    let mut bad = Vec::new();
    for circ in &d.circles {
        let u = l.u(&format!("e0+:{}", circ.id))?;
        if u.im <= tol {
            bad.push(off(format!("u(e0+:{})", circ.id), u, "wrong side of the imaginary axis"));
        }
    }
    let fw = segment_forward(d);
    for (i, s) in d.segments.iter().enumerate() {
        let u = l.u(&format!("el:{}", s.id))?;
        let along = if fw[i] { u } else { -u };
        if along.im <= tol {
            bad.push(off(format!("u(el:{})", s.id), u, "wrong side of the imaginary axis"));
        }
    }
    Ok(CriterionReport::new("orientation", bad))
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionEdge {
    pub id: String,
    /// Link polygon of the cusp in the top cell.
    pub polygon: usize,
    pub ends: [usize; 2],
}

/// Γ_L: one vertex per region face, one edge per circle or segment, with the
/// edges around each vertex in face-word order.
#[derive(Clone, Debug, Serialize)]
pub struct RegionGraph {
    pub cell: usize,
    pub faces: Vec<usize>,
    pub names: Vec<String>,
    pub edges: Vec<RegionEdge>,
    pub around: Vec<Vec<usize>>,
}

fn eta_name(c: &PeripheralComplex, e: usize) -> Result<String> {
    let id = &c.pedges[e].id;
    match id.split_once(':') {
        Some(("el" | "er", s)) => Ok(format!("segment:{s}")),
        Some(("emu1" | "emu2", s)) => Ok(format!("circle:{s}")),
        _ => Err(invalid(id, "region face corner is neither a segment nor a circle edge")),
    }
}

pub fn region_graph(c: &PeripheralComplex) -> Result<RegionGraph> {
    let faces: Vec<usize> = (0..c.faces.len()).filter(|&f| c.faces[f].kind == FaceKind::Region).collect();
    if faces.is_empty() {
        return Err(invalid(&c.name, "no region faces; not a fully augmented link"));
    }
    let mut cell = None;
    let mut by_poly: BTreeMap<usize, (String, Vec<usize>)> = BTreeMap::new();
    let mut corners_of = Vec::new();
    for (v, &f) in faces.iter().enumerate() {
        let mut polys = Vec::new();
        for &(e, d) in &c.faces[f].corners {
            let (l, _) = c.polygon_of(e, !d);
            match cell {
                None => cell = Some(c.polygon_cell[l]),
                Some(k) if k != c.polygon_cell[l] => {
                    return Err(Error::Unsupported("region faces do not share a top cell".into()));
                }
                _ => {}
            }
            let name = eta_name(c, e)?;
            by_poly.entry(l).or_insert_with(|| (name, Vec::new())).1.push(v);
            polys.push(l);
        }
        corners_of.push(polys);
    }
    let mut edges = Vec::new();
    let mut edge_of: HashMap<usize, usize> = HashMap::new();
    for (l, (id, vs)) in by_poly {
        if vs.len() != 2 {
            return Err(invalid(&id, format!("cusp touches {} region corners, expected 2", vs.len())));
        }
        edge_of.insert(l, edges.len());
        edges.push(RegionEdge { id, polygon: l, ends: [vs[0], vs[1]] });
    }
    let around = corners_of.iter().map(|ps| ps.iter().map(|l| edge_of[l]).collect()).collect();
    Ok(RegionGraph {
        cell: cell.unwrap_or(0),
        names: faces.iter().map(|&f| c.faces[f].id.clone()).collect(),
        faces,
        edges,
        around,
    })
}

/// Unitary map sending to ∞ the point of a fixed spiral farthest from all
/// of `pts`.
fn away_from(pts: &[Pt]) -> Mat {
    const N: usize = 512;
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut best = (f64::NEG_INFINITY, Pt::INF);
    for k in 0..N {
        let zc = 1.0 - 2.0 * (k as f64 + 0.5) / N as f64;
        let r = (1.0 - zc * zc).sqrt();
        let phi = golden * k as f64;
        // stereographic point for (r cos φ, r sin φ, zc)
        let p = Pt { a: C64::from_polar(r, phi), b: C64::new(1.0 - zc, 0.0) }.normalized();
        let d = pts.iter().map(|&q| chordal(p, q)).fold(f64::INFINITY, f64::min);
        if d > best.0 {
            best = (d, p);
        }
    }
    let p = best.1;
    Mat::new(p.a.conj(), p.b.conj(), -p.b, p.a)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingEdge {
    pub id: String,
    pub ends: [usize; 2],
    pub point: Pt,
}

/// Circles indexed by regions, interiors on the left of each region's
/// tangency points in face-word order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CirclePacking {
    pub regions: Vec<String>,
    pub circles: Vec<Circle>,
    pub edges: Vec<PackingEdge>,
    pub around: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PackingFit {
    pub packing: CirclePacking,
    /// Largest distance of a region vertex from its circle.
    pub fit_residual: f64,
    /// Largest of ||I| − 1| and the tangency point displacement.
    pub tangency_residual: f64,
}

fn circle_through(ts: &[Pt]) -> (Circle, f64) {
    let thr = Circle::through([ts[0], ts[1], ts[2]]);
    if ts.len() == 3 {
        return (thr, 0.0);
    }
    let (fit, res) = Circle::fit(ts);
    (if fit.inversive(&thr) > 0.0 { fit.flipped() } else { fit }, res)
}

pub fn solution_to_packing(c: &PeripheralComplex, x: &[C64]) -> Result<PackingFit> {
    let rg = region_graph(c)?;
    let base = *c.cells[rg.cell].polygons.iter().min().ok_or_else(|| Error::Degenerate("empty top cell".into()))?;
    let dev = develop_cell(c, x, rg.cell, (base, 0))?;
    let raw: Vec<Pt> = rg
        .edges
        .iter()
        .map(|e| dev.position(e.polygon).ok_or_else(|| Error::Degenerate(format!("{} was not placed", e.id))))
        .collect::<Result<_>>()?;
    let m = away_from(&raw);
    let pts: Vec<Pt> = raw.iter().map(|&p| mobius::apply(&m, p).normalized()).collect();
    let mut circles = Vec::new();
    let mut fit_residual = 0.0f64;
    for (v, ar) in rg.around.iter().enumerate() {
        if ar.len() < 3 {
            return Err(Error::Unsupported(format!("region {} has fewer than three cusps", rg.names[v])));
        }
        let ts: Vec<Pt> = ar.iter().map(|&e| pts[e]).collect();
        let (circ, res) = circle_through(&ts);
        fit_residual = fit_residual.max(res);
        circles.push(circ);
    }
    if !(fit_residual <= FIT_TOL) {
        return Err(Error::Degenerate(format!(
            "region vertices are not concyclic (residual {fit_residual:.3e}); the solution fails the packing premise"
        )));
    }
    let mut tangency_residual = 0.0f64;
    for (e, re) in rg.edges.iter().enumerate() {
        let (a, b) = (&circles[re.ends[0]], &circles[re.ends[1]]);
        let i = a.inversive(b);
        let t = a.tangency(b);
        tangency_residual = tangency_residual.max((i.abs() - 1.0).abs()).max(chordal(t, pts[e]));
    }
    let packing = CirclePacking {
        regions: rg.names.clone(),
        circles,
        edges: rg.edges.iter().zip(&pts).map(|(e, &p)| PackingEdge { id: e.id.clone(), ends: e.ends, point: p }).collect(),
        around: rg.around.clone(),
    };
    Ok(PackingFit { packing, fit_residual, tangency_residual })
}

/// Labels of the algebraic solution whose top cell has the packing's
/// tangency points as ideal vertices, normalized by the meridian edges.
pub fn packing_to_solution(c: &PeripheralComplex, d: &FalDiagram, p: &CirclePacking) -> Result<Vec<C64>> {
    let rg = region_graph(c)?;
    let ridx: HashMap<&str, usize> = p.regions.iter().enumerate().map(|(i, r)| (r.as_str(), i)).collect();
    let mut pos = vec![Pt::INF; rg.edges.len()];
    for (k, e) in rg.edges.iter().enumerate() {
        let [a, b] = e.ends.map(|v| ridx.get(rg.names[v].as_str()).copied());
        let (Some(a), Some(b)) = (a, b) else {
            return Err(invalid(&e.id, "packing lacks a circle for one of its regions"));
        };
        if !p.edges.iter().any(|pe| pe.id == e.id) {
            return Err(invalid(&e.id, "packing misses a required tangency"));
        }
        let (ca, cb) = (&p.circles[a], &p.circles[b]);
        let i = ca.inversive(cb);
        if (i.abs() - 1.0).abs() > FIT_TOL {
            return Err(invalid(&e.id, format!("circles {} and {} are not tangent (I = {i:.6})", p.regions[a], p.regions[b])));
        }
        pos[k] = ca.tangency(cb);
    }
    let m = away_from(&pos);
    let z: Vec<C64> = pos
        .iter()
        .map(|&q| mobius::apply(&m, q).to_complex(1e-9).ok_or_else(|| Error::Degenerate("tangency point at ∞".into())))
        .collect::<Result<_>>()?;
    let edge_of: HashMap<usize, usize> = rg.edges.iter().enumerate().map(|(k, e)| (e.polygon, k)).collect();
    let slots = departure_slots(d);
    let cidx: HashMap<&str, usize> = d.circles.iter().enumerate().map(|(i, c)| (c.id.as_str(), i)).collect();
    let known = |id: &str| -> Option<C64> {
        let (kind, cid) = id.split_once(':')?;
        match kind {
            "emu1" | "emu2" => Some(C64::new(1.0, 0.0)),
            "e1+" | "e1-" | "e2+" | "e2-" => {
                let strand = if kind.starts_with("e1") { 1 } else { 2 };
                let h = half_meridian(&slots, *cidx.get(cid)?, strand);
                Some(C64::new(if kind.ends_with('+') { h } else { -h }, 0.0))
            }
            _ => None,
        }
    };

    let na = c.arcs.len();
    let mut x: Vec<Option<C64>> = vec![None; na + c.pedges.len()];
    let mut lambda = vec![C64::new(0.0, 0.0); rg.edges.len()];
    for (k, e) in rg.edges.iter().enumerate() {
        let poly = &c.polygons[e.polygon];
        let n = poly.sides.len();
        let zv = z[k];
        let g: Vec<C64> = (0..n)
            .map(|j| {
                let ((r, _), _) = c.arc_partner[&(e.polygon, j)];
                edge_of.get(&r).map(|&kr| 1.0 / (z[kr] - zv)).ok_or_else(|| Error::Degenerate(format!("{}: partner outside the top cell", e.id)))
            })
            .collect::<Result<_>>()?;
        let raw: Vec<C64> = (0..n).map(|j| g[(j + 1) % n] - g[j]).collect();
        let (j, want) = (0..n)
            .find_map(|j| {
                let (pe, fw) = poly.sides[j];
                known(&c.pedges[pe].id).map(|u| (j, if fw { u } else { -u }))
            })
            .ok_or_else(|| invalid(&e.id, "no side with a normalized label"))?;
        if raw[j].norm() == 0.0 {
            return Err(Error::Degenerate(format!("{}: coincident tangency points", e.id)));
        }
        let lam = want / raw[j];
        lambda[k] = lam;
        for (jj, &(pe, fw)) in poly.sides.iter().enumerate() {
            let ut = lam * raw[jj];
            x[na + pe] = Some(if fw { ut } else { -ut });
        }
    }
    for (k, e) in rg.edges.iter().enumerate() {
        for j in 0..c.polygons[e.polygon].sides.len() {
            let ((r, _), arc) = c.arc_partner[&(e.polygon, j)];
            let kr = edge_of[&r];
            x[arc] = Some(-lambda[k] * lambda[kr] / (z[kr] - z[k]).powi(2));
        }
    }
    // edges of the other cell are mirror images of their twins
    let pe = c.pedge_index();
    for e in 0..c.pedges.len() {
        if x[na + e].is_some() {
            continue;
        }
        let Some((kind, rest)) = c.pedges[e].id.split_once(':') else { continue };
        let (twin, circle) = match kind {
            "e0-" => ("e0+", true),
            "e0+" => ("e0-", true),
            "e1-" => ("e1+", false),
            "e1+" => ("e1-", false),
            "e2-" => ("e2+", false),
            "e2+" => ("e2-", false),
            _ => continue,
        };
        if let Some(u) = pe.get(&format!("{twin}:{rest}")).and_then(|&t| x[na + t]) {
            x[na + e] = Some(if circle { u.conj() } else { -u.conj() });
        }
    }
    let x: Vec<C64> = x
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| {
                let id = if i < na { &c.arcs[i].id } else { &c.pedges[i - na].id };
                Error::Degenerate(format!("{id} is not determined by the top cell"))
            })
        })
        .collect::<Result<_>>()?;
    let res = EquationSystem::build(c)?.evaluate(&x).max();
    if !(res < FAL_TOL) {
        return Err(Error::Degenerate(format!("labels from the packing leave residual {res:.3e}")));
    }
    Ok(x)
}

/// Shape parameters of every region at its edges against pairs of
/// diagonals, from the developed top cell: real and in (0, 1) exactly when
/// the region is circumscribed with its vertices in order.
pub fn check_shape_range(c: &PeripheralComplex, x: &[C64], tol: f64) -> Result<CriterionReport> {
    let rg = region_graph(c)?;
    let base = *c.cells[rg.cell].polygons.iter().min().ok_or_else(|| Error::Degenerate("empty top cell".into()))?;
    let dev = develop_cell(c, x, rg.cell, (base, 0))?;
    let mut bad = Vec::new();
    for (v, ar) in rg.around.iter().enumerate() {
        let n = ar.len();
        let z: Vec<Pt> = ar
            .iter()
            .map(|&e| dev.position(rg.edges[e].polygon).ok_or_else(|| Error::Degenerate("unplaced vertex".into())))
            .collect::<Result<_>>()?;
        for i in 0..n {
            let (v1, v2) = (i, (i + 1) % n);
            // p_0 = v2, …, p_{n−1} = v1
            let p = |k: usize| z[(v2 + k) % n];
            for a in 2..n - 1 {
                let m = mobius::to_standard([p(0), p(a), p(n - 1)]);
                for b in 1..a {
                    let zeta = mobius::apply(&m, p(b)).to_complex(1e-14).unwrap_or(C64::new(f64::INFINITY, 0.0));
                    let ok = zeta.is_finite() && zeta.im.abs() <= tol && zeta.re > tol && zeta.re < 1.0 - tol;
                    if !ok {
                        let (ea, eb) = (&rg.edges[ar[(v2 + a) % n]].id, &rg.edges[ar[(v2 + b) % n]].id);
                        bad.push(off(
                            format!("{}[{}–{}; {ea}, {eb}]", rg.names[v], rg.edges[ar[v1]].id, rg.edges[ar[v2]].id),
                            zeta,
                            if zeta.im.abs() > tol { "not real" } else { "outside (0, 1)" },
                        ));
                    }
                }
            }
        }
    }
    Ok(CriterionReport::new("shape_range", bad))
}

#[derive(Clone, Debug, Serialize)]
pub struct FillingReport {
    /// Interior of each circle: +1 on the left of its face-word order.
    pub orientation: Vec<i8>,
    pub order_preserving: bool,
    pub locally_univalent: bool,
    pub univalent: bool,
    /// Verdict of the local lemma: order preserving and locally univalent.
    pub lemma_univalent: bool,
    pub problems: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnivalenceVerdict {
    Univalent,
    LocallyUnivalentNotUnivalent,
    NotLocallyUnivalent,
}

impl std::fmt::Display for UnivalenceVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UnivalenceVerdict::Univalent => "univalent",
            UnivalenceVerdict::LocallyUnivalentNotUnivalent => "locally univalent but not univalent",
            UnivalenceVerdict::NotLocallyUnivalent => "not locally univalent",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UnivalenceReport {
    pub fillings: Vec<FillingReport>,
    pub verdict: UnivalenceVerdict,
}

/// Whether the tangency points of a circle run along its orientation in
/// the given cyclic order.
fn in_cyclic_order(circ: &Circle, ts: &[Pt]) -> bool {
    let thr = Circle::through([ts[0], ts[1], ts[2]]);
    if circ.inversive(&thr) > 0.0 {
        return false;
    }
    let m = mobius::to_standard([ts[0], ts[1], ts[2]]);
    let mut last = f64::NEG_INFINITY;
    for &t in &ts[3..] {
        let Some(v) = mobius::apply(&m, t).to_complex(1e-14) else {
            return false;
        };
        if v.re >= 0.0 || v.re <= last {
            return false;
        }
        last = v.re;
    }
    true
}

fn filling_report(p: &CirclePacking, orientation: Vec<i8>, tol: f64) -> FillingReport {
    let circles: Vec<Circle> =
        p.circles.iter().zip(&orientation).map(|(c, &s)| if s > 0 { *c } else { c.flipped() }).collect();
    let mut problems = Vec::new();
    let mut order_preserving = true;
    for (v, ar) in p.around.iter().enumerate() {
        let ts: Vec<Pt> = ar.iter().map(|&e| p.edges[e].point).collect();
        if ts.len() >= 3 && !in_cyclic_order(&circles[v], &ts) {
            order_preserving = false;
            problems.push(format!("{}: tangency order reversed or scrambled", p.regions[v]));
        }
    }
    let mut locally_univalent = true;
    for e in &p.edges {
        let [a, b] = e.ends;
        if !circles[a].interiors_disjoint(&circles[b], tol) {
            locally_univalent = false;
            problems.push(format!("{}: interiors of {} and {} overlap", e.id, p.regions[a], p.regions[b]));
        }
    }
    let mut univalent = true;
    for a in 0..circles.len() {
        for b in a + 1..circles.len() {
            if !circles[a].interiors_disjoint(&circles[b], tol) {
                univalent = false;
                if locally_univalent {
                    problems.push(format!("interiors of {} and {} overlap", p.regions[a], p.regions[b]));
                }
            }
        }
    }
    FillingReport {
        orientation,
        order_preserving,
        locally_univalent,
        univalent,
        lemma_univalent: order_preserving && locally_univalent,
        problems,
    }
}

/// Tries the two fillings that make every tangency externally tangent
/// (when they exist), and otherwise the two fillings following the
/// face-word order.
pub fn check_univalence(p: &CirclePacking, tol: f64) -> UnivalenceReport {
    let n = p.circles.len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (k, e) in p.edges.iter().enumerate() {
        adj[e.ends[0]].push((e.ends[1], k));
        adj[e.ends[1]].push((e.ends[0], k));
    }
    // propagate orientations so that every tangency has I ≈ +1
    let mut orient = vec![0i8; n];
    let mut consistent = true;
    for s in 0..n {
        if orient[s] != 0 {
            continue;
        }
        orient[s] = 1;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &(w, _) in &adj[v] {
                let i = p.circles[v].inversive(&p.circles[w]) * f64::from(orient[v]);
                let want = if i > 0.0 { 1 } else { -1 };
                if orient[w] == 0 {
                    orient[w] = want;
                    q.push_back(w);
                } else if orient[w] != want {
                    consistent = false;
                }
            }
        }
    }
    let base = if consistent { orient } else { vec![1; n] };
    let flipped: Vec<i8> = base.iter().map(|s| -s).collect();
    let fillings = vec![filling_report(p, base, tol), filling_report(p, flipped, tol)];
    let verdict = if fillings.iter().any(|f| f.univalent) {
        UnivalenceVerdict::Univalent
    } else if fillings.iter().any(|f| f.locally_univalent) {
        UnivalenceVerdict::LocallyUnivalentNotUnivalent
    } else {
        UnivalenceVerdict::NotLocallyUnivalent
    };
    UnivalenceReport { fillings, verdict }
}

#[derive(Clone, Debug, Serialize)]
pub struct FalVerdict {
    pub pure_imaginary: CriterionReport,
    pub orientation: CriterionReport,
    pub shape_range: CriterionReport,
    pub geometric: bool,
}

pub fn is_geometric_fal(c: &PeripheralComplex, d: &FalDiagram, x: &[C64], tol: f64) -> Result<FalVerdict> {
    let pure_imaginary = check_pure_imag(c, d, x, tol)?;
    let orientation = check_orientation(c, d, x, tol)?;
    let shape_range = check_shape_range(c, x, tol)?;
    let geometric = pure_imaginary.passed && orientation.passed && shape_range.passed;
    Ok(FalVerdict { pure_imaginary, orientation, shape_range, geometric })
}
