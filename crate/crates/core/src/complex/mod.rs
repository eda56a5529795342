//! Peripheral complexes: boundary tori with points and peripheral edges,
//! the arcs joining them, and the 2-cells whose boundary words alternate
//! between peripheral edges (corners) and arcs (sides).

mod build_fal;
mod build_link;

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use crate::diagram::{Diagram, Parsed};
use crate::error::{invalid, Error, Result};
use crate::rotation::{Dart, RotationSystem};

pub use build_fal::{fal_complex, gamma0_left};
pub use build_link::link_complex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TorusKind {
    /// Boundary of a tubular neighbourhood of a link component.
    Component,
    /// Crossing circle of a fully augmented link.
    Circle,
    /// Thickened-torus end above the projection surface.
    North,
    /// Thickened-torus end below the projection surface.
    South,
}

#[derive(Clone, Debug, Serialize)]
pub struct Torus {
    pub id: String,
    pub kind: TorusKind,
}

#[derive(Clone, Debug, Serialize)]
pub struct Point {
    pub id: String,
    pub torus: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Arc {
    pub id: String,
    pub ends: [usize; 2],
}

/// Peripheral edge. `h` is its lattice displacement in the basis
/// (meridian, longitude) of the torus.
#[derive(Clone, Debug, Serialize)]
pub struct Pedge {
    pub id: String,
    pub torus: usize,
    pub tail: usize,
    pub head: usize,
    pub h: [i64; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FaceKind {
    Region,
    Vertical,
    Bowtie,
}

/// Boundary word ε_1 γ_1 ε_2 γ_2 … ε_n γ_n; side γ_i sits between corners
/// ε_i and ε_{i+1}.
#[derive(Clone, Debug, Serialize)]
pub struct Face {
    pub id: String,
    pub kind: FaceKind,
    pub corners: Vec<(usize, bool)>,
    pub sides: Vec<(usize, bool)>,
}

/// Counterclockwise boundary cycle of peripheral edges on a torus.
#[derive(Clone, Debug, Serialize)]
pub struct Polygon {
    pub torus: usize,
    pub sides: Vec<(usize, bool)>,
}

/// One side of a face as seen from a 3-cell. Side A is the side whose link
/// polygons run along the corners against the face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FaceSide {
    pub face: usize,
    pub a_side: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub polygons: Vec<usize>,
    pub faces: Vec<FaceSide>,
}

/// A vertex occurrence in a link polygon: (polygon, index of the side that
/// starts there).
pub type Corner = (usize, usize);

#[derive(Clone, Debug, Serialize)]
pub struct PeripheralComplex {
    pub name: String,
    pub tori: Vec<Torus>,
    pub points: Vec<Point>,
    pub arcs: Vec<Arc>,
    pub pedges: Vec<Pedge>,
    pub faces: Vec<Face>,
    /// Counterclockwise darts (pedge, end) at each point.
    pub rotation: Vec<Vec<Dart>>,
    pub polygons: Vec<Polygon>,
    pub cells: Vec<Cell>,
    pub polygon_cell: Vec<usize>,
    /// Arc at each point.
    pub point_arc: Vec<usize>,
    /// Across-arc partner of every polygon corner within its cell.
    pub arc_partner: HashMap<Corner, (Corner, usize)>,
    /// Meridian class per torus in the (meridian, longitude) lattice basis.
    pub meridian: Vec<[i64; 2]>,
    pub notes: Vec<String>,
}

/// Polyline of a peripheral edge in the universal cover of its torus,
/// as (s, θ) pairs: s runs along the torus, θ around the meridian.
pub type Polyline = Vec<(f64, f64)>;

#[derive(Default)]
pub(crate) struct Builder {
    pub name: String,
    pub tori: Vec<Torus>,
    pub points: Vec<Point>,
    pub arcs: Vec<Arc>,
    pub pedges: Vec<Pedge>,
    pub faces: Vec<Face>,
    pub paths: Vec<Option<Polyline>>,
    pub torus_idx: BTreeMap<String, usize>,
    pub point_idx: BTreeMap<String, usize>,
    pub arc_idx: BTreeMap<String, usize>,
    pub pedge_idx: BTreeMap<String, usize>,
    pub notes: Vec<String>,
}

impl Builder {
    pub fn torus(&mut self, id: &str, kind: TorusKind) -> usize {
        if let Some(&i) = self.torus_idx.get(id) {
            return i;
        }
        self.tori.push(Torus { id: id.into(), kind });
        self.torus_idx.insert(id.into(), self.tori.len() - 1);
        self.tori.len() - 1
    }

    pub fn point(&mut self, id: &str, torus: usize) -> usize {
        if let Some(&i) = self.point_idx.get(id) {
            return i;
        }
        self.points.push(Point { id: id.into(), torus });
        self.point_idx.insert(id.into(), self.points.len() - 1);
        self.points.len() - 1
    }

    pub fn arc(&mut self, id: &str, a: usize, b: usize) -> usize {
        if let Some(&i) = self.arc_idx.get(id) {
            return i;
        }
        self.arcs.push(Arc { id: id.into(), ends: [a, b] });
        self.arc_idx.insert(id.into(), self.arcs.len() - 1);
        self.arcs.len() - 1
    }

    pub fn pedge(&mut self, id: &str, tail: usize, head: usize, h: [i64; 2], path: Option<Polyline>) -> usize {
        let torus = self.points[tail].torus;
        self.pedges.push(Pedge { id: id.into(), torus, tail, head, h });
        self.paths.push(path);
        self.pedge_idx.insert(id.into(), self.pedges.len() - 1);
        self.pedges.len() - 1
    }

    pub fn pe(&self, id: &str) -> usize {
        self.pedge_idx[id]
    }

    pub fn ar(&self, id: &str) -> usize {
        self.arc_idx[id]
    }

    pub fn face(&mut self, id: &str, kind: FaceKind, corners: Vec<(usize, bool)>, sides: Vec<(usize, bool)>) {
        self.faces.push(Face { id: id.into(), kind, corners, sides });
    }

    pub fn finish(self, meridians: &BTreeMap<String, String>) -> Result<PeripheralComplex> {
        finish(self, meridians)
    }
}

fn angle_of(v: (f64, f64)) -> f64 {
    // frame X = Δθ, Y = −Δs
    (-v.0).atan2(v.1)
}

fn finish(b: Builder, meridians: &BTreeMap<String, String>) -> Result<PeripheralComplex> {
    let np = b.points.len();
    for p in &b.pedges {
        if b.points[p.head].torus != p.torus {
            return Err(invalid(&p.id, "peripheral edge joins two different tori"));
        }
    }
    let mut point_arc = vec![usize::MAX; np];
    for (ai, a) in b.arcs.iter().enumerate() {
        for &p in &a.ends {
            if point_arc[p] != usize::MAX {
                return Err(invalid(&b.points[p].id, "point is the end of two arcs"));
            }
            point_arc[p] = ai;
        }
    }
    if let Some(p) = (0..np).find(|&p| point_arc[p] == usize::MAX) {
        return Err(invalid(&b.points[p].id, "point is not the end of an arc"));
    }
    // face words must be closed paths
    let mut corner_face = vec![usize::MAX; b.pedges.len()];
    for (fi, f) in b.faces.iter().enumerate() {
        let n = f.corners.len();
        if n == 0 || f.sides.len() != n {
            return Err(invalid(&f.id, "face word must alternate corners and sides"));
        }
        for i in 0..n {
            let (e, d) = f.corners[i];
            let pe = &b.pedges[e];
            let end = if d { pe.head } else { pe.tail };
            let (a, ad) = f.sides[i];
            let arc = &b.arcs[a];
            let (s0, s1) = if ad { (arc.ends[0], arc.ends[1]) } else { (arc.ends[1], arc.ends[0]) };
            let (e2, d2) = f.corners[(i + 1) % n];
            let pe2 = &b.pedges[e2];
            let start2 = if d2 { pe2.tail } else { pe2.head };
            if end != s0 || s1 != start2 {
                return Err(invalid(&f.id, format!("word breaks between {} and {}", pe.id, pe2.id)));
            }
            if corner_face[e] != usize::MAX {
                return Err(invalid(&pe.id, "peripheral edge is a corner of two faces"));
            }
            corner_face[e] = fi;
        }
    }
    if let Some(e) = (0..b.pedges.len()).find(|&e| corner_face[e] == usize::MAX) {
        return Err(invalid(&b.pedges[e].id, "peripheral edge is not a corner of any face"));
    }

    let mut rotation: Vec<Vec<Dart>> = vec![Vec::new(); np];
    let mut geometric = vec![false; b.tori.len()];
    for (e, path) in b.paths.iter().enumerate() {
        if path.is_some() {
            geometric[b.pedges[e].torus] = true;
            rotation[b.pedges[e].tail].push(Dart { edge: e, end: 0 });
            rotation[b.pedges[e].head].push(Dart { edge: e, end: 1 });
        }
    }
    for p in 0..np {
        if geometric[b.points[p].torus] {
            let ang = |d: &Dart| {
                let path = b.paths[d.edge].as_ref().expect("geometric torus");
                let n = path.len();
                let v = if d.end == 0 {
                    (path[1].0 - path[0].0, path[1].1 - path[0].1)
                } else {
                    (path[n - 2].0 - path[n - 1].0, path[n - 2].1 - path[n - 1].1)
                };
                angle_of(v)
            };
            rotation[p].sort_by(|x, y| ang(x).total_cmp(&ang(y)));
            for w in rotation[p].windows(2) {
                if (ang(&w[0]) - ang(&w[1])).abs() < 1e-12 {
                    return Err(invalid(&b.points[p].id, "two peripheral edges leave in the same direction"));
                }
            }
        }
    }
    // tori without embedded paths inherit their rotation across arcs
    for p in 0..np {
        if geometric[b.points[p].torus] {
            continue;
        }
        let a = point_arc[p];
        let q = if b.arcs[a].ends[0] == p { b.arcs[a].ends[1] } else { b.arcs[a].ends[0] };
        if !geometric[b.points[q].torus] {
            return Err(invalid(&b.points[p].id, "cannot orient: both ends of its arc lie on unembedded tori"));
        }
        let mut order: Vec<(usize, Dart)> = Vec::new();
        for f in &b.faces {
            let n = f.corners.len();
            for i in 0..n {
                if f.sides[i].0 != a {
                    continue;
                }
                let (e0, d0) = f.corners[i];
                let (e1, d1) = f.corners[(i + 1) % n];
                // dart of the corner at each end of the arc
                let end_e0 = Dart { edge: e0, end: u8::from(d0) };
                let start_e1 = Dart { edge: e1, end: u8::from(!d1) };
                let pt = |d: Dart| if d.end == 0 { b.pedges[d.edge].tail } else { b.pedges[d.edge].head };
                let (at_q, at_p) = if pt(end_e0) == q && pt(start_e1) == p {
                    (end_e0, start_e1)
                } else {
                    (start_e1, end_e0)
                };
                let pos = rotation[q].iter().position(|d| *d == at_q).ok_or_else(|| {
                    invalid(&f.id, "corner dart missing from the rotation at the far end of an arc")
                })?;
                order.push((pos, at_p));
            }
        }
        order.sort_by_key(|o| std::cmp::Reverse(o.0));
        rotation[p] = order.into_iter().map(|o| o.1).collect();
    }
    for (p, r) in rotation.iter().enumerate() {
        if r.is_empty() {
            return Err(invalid(&b.points[p].id, "point has no peripheral edges"));
        }
    }

    // link polygons per torus
    let mut polygons = Vec::new();
    for t in 0..b.tori.len() {
        let pts: Vec<usize> = (0..np).filter(|&p| b.points[p].torus == t).collect();
        let local: HashMap<usize, usize> = pts.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let es: Vec<usize> = (0..b.pedges.len()).filter(|&e| b.pedges[e].torus == t).collect();
        let le: HashMap<usize, usize> = es.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let rs = RotationSystem {
            rot: pts
                .iter()
                .map(|&p| rotation[p].iter().map(|d| Dart { edge: le[&d.edge], end: d.end }).collect())
                .collect(),
        };
        rs.check().map_err(|m| invalid(&b.tori[t].id, m))?;
        let ends: Vec<(usize, usize)> = es.iter().map(|&e| (local[&b.pedges[e].tail], local[&b.pedges[e].head])).collect();
        if !rs.is_connected(&ends) {
            return Err(invalid(&b.tori[t].id, "peripheral graph is not connected"));
        }
        let faces = rs.faces();
        let chi = pts.len() as i64 - es.len() as i64 + faces.len() as i64;
        if chi != 0 {
            return Err(invalid(&b.tori[t].id, format!("peripheral graph has euler characteristic {chi}, expected 0")));
        }
        for f in faces {
            let sides: Vec<(usize, bool)> = f.iter().map(|&(e, fw)| (es[e], fw)).collect();
            let mut h = [0i64; 2];
            for &(e, fw) in &sides {
                let s = if fw { 1 } else { -1 };
                h[0] += s * b.pedges[e].h[0];
                h[1] += s * b.pedges[e].h[1];
            }
            if h != [0, 0] {
                return Err(invalid(&b.tori[t].id, "a link polygon is not a disk"));
            }
            polygons.push(Polygon { torus: t, sides });
        }
    }

    // polygon on each side of every pedge
    let mut side_poly: HashMap<(usize, bool), (usize, usize)> = HashMap::new();
    for (li, l) in polygons.iter().enumerate() {
        for (j, &s) in l.sides.iter().enumerate() {
            side_poly.insert(s, (li, j));
        }
    }
    let mut uf: Vec<usize> = (0..polygons.len()).collect();
    fn find(uf: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while uf[r] != r {
            r = uf[r];
        }
        let mut y = x;
        while uf[y] != r {
            let n = uf[y];
            uf[y] = r;
            y = n;
        }
        r
    }
    for f in &b.faces {
        for a_side in [true, false] {
            let ls: Vec<usize> = f.corners.iter().map(|&(e, d)| side_poly[&(e, if a_side { !d } else { d })].0).collect();
            for w in ls.windows(2) {
                let (x, y) = (find(&mut uf, w[0]), find(&mut uf, w[1]));
                uf[x] = y;
            }
        }
    }
    let mut roots: BTreeMap<usize, usize> = BTreeMap::new();
    let mut polygon_cell = vec![0; polygons.len()];
    for (l, cell) in polygon_cell.iter_mut().enumerate() {
        let r = find(&mut uf, l);
        let n = roots.len();
        *cell = *roots.entry(r).or_insert(n);
    }
    let mut cells: Vec<Cell> = (0..roots.len()).map(|_| Cell { polygons: Vec::new(), faces: Vec::new() }).collect();
    for (l, &c) in polygon_cell.iter().enumerate() {
        cells[c].polygons.push(l);
    }
    let mut arc_partner: HashMap<Corner, (Corner, usize)> = HashMap::new();
    for (fi, f) in b.faces.iter().enumerate() {
        let n = f.corners.len();
        for a_side in [true, false] {
            let (e, d) = f.corners[0];
            let l0 = side_poly[&(e, if a_side { !d } else { d })].0;
            cells[polygon_cell[l0]].faces.push(FaceSide { face: fi, a_side });
            for i in 0..n {
                let (e0, d0) = f.corners[i];
                let (e1, d1) = f.corners[(i + 1) % n];
                let (l, j) = side_poly[&(e0, if a_side { !d0 } else { d0 })];
                let q = if a_side { (l, j) } else { (l, (j + 1) % polygons[l].sides.len()) };
                let (l2, j2) = side_poly[&(e1, if a_side { !d1 } else { d1 })];
                let r = if a_side { (l2, (j2 + 1) % polygons[l2].sides.len()) } else { (l2, j2) };
                let arc = f.sides[i].0;
                for (x, y) in [(q, r), (r, q)] {
                    if let Some(old) = arc_partner.insert(x, (y, arc)) {
                        if old != (y, arc) {
                            return Err(invalid(&f.id, "an arc copy is glued inconsistently"));
                        }
                    }
                }
            }
        }
    }
    for (li, l) in polygons.iter().enumerate() {
        for j in 0..l.sides.len() {
            if !arc_partner.contains_key(&(li, j)) {
                return Err(invalid(&b.tori[l.torus].id, "a polygon corner has no arc copy"));
            }
        }
    }

    let mut meridian = vec![[1i64, 0]; b.tori.len()];
    let tidx: BTreeMap<&str, usize> = b.tori.iter().enumerate().map(|(i, t)| (t.id.as_str(), i)).collect();
    let pedge_idx = b.pedge_idx.clone();
    for (cusp, word) in meridians {
        let t = *tidx.get(cusp.as_str()).ok_or_else(|| invalid(cusp, "unknown cusp in meridian override"))?;
        meridian[t] = parse_class(word, t, &b.pedges, &pedge_idx).map_err(|m| invalid(cusp, m))?;
    }
    let mut notes = b.notes;
    for (i, t) in b.tori.iter().enumerate() {
        if meridian[i] != [1, 0] {
            notes.push(format!("cusp {} uses meridian class {:?}", t.id, meridian[i]));
        }
    }

    Ok(PeripheralComplex {
        name: b.name,
        tori: b.tori,
        points: b.points,
        arcs: b.arcs,
        pedges: b.pedges,
        faces: b.faces,
        rotation,
        polygons,
        cells,
        polygon_cell,
        point_arc,
        arc_partner,
        meridian,
        notes,
    })
}

/// Parses `p:q` or a whitespace separated pedge word like `a+ b-`.
fn parse_class(word: &str, torus: usize, pedges: &[Pedge], idx: &BTreeMap<String, usize>) -> std::result::Result<[i64; 2], String> {
    let w = word.trim();
    let class = if let Some((p, q)) = w.split_once(':').filter(|(p, q)| p.trim().parse::<i64>().is_ok() && q.trim().parse::<i64>().is_ok()) {
        [p.trim().parse::<i64>().unwrap_or(0), q.trim().parse::<i64>().unwrap_or(0)]
    } else {
        let steps = parse_word(w, idx)?;
        let mut h = [0i64; 2];
        let mut at: Option<usize> = None;
        let mut start = None;
        for (e, fw) in steps {
            let p = &pedges[e];
            if p.torus != torus {
                return Err(format!("{} lies on another torus", p.id));
            }
            let (s, t) = if fw { (p.tail, p.head) } else { (p.head, p.tail) };
            if let Some(a) = at {
                if a != s {
                    return Err(format!("word breaks at {}", p.id));
                }
            } else {
                start = Some(s);
            }
            at = Some(t);
            let g = if fw { 1 } else { -1 };
            h[0] += g * p.h[0];
            h[1] += g * p.h[1];
        }
        if at != start {
            return Err("meridian word is not closed".into());
        }
        h
    };
    if gcd(class[0], class[1]) != 1 {
        return Err(format!("class {class:?} is not primitive"));
    }
    Ok(class)
}

pub(crate) fn parse_word(w: &str, idx: &BTreeMap<String, usize>) -> std::result::Result<Vec<(usize, bool)>, String> {
    let mut out = Vec::new();
    for tok in w.split_whitespace() {
        let (name, fw) = if let Some(n) = tok.strip_suffix('~') {
            (n, false)
        } else {
            (tok, true)
        };
        let e = *idx.get(name).ok_or_else(|| format!("unknown peripheral edge {name}"))?;
        out.push((e, fw));
    }
    if out.is_empty() {
        return Err("empty word".into());
    }
    Ok(out)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Integer vector completing `m` to a basis with determinant +1.
pub fn complete_basis(m: [i64; 2]) -> [i64; 2] {
    // extended gcd: x·m0 + y·m1 = 1, then (−y, x) works
    fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
        if b == 0 {
            (a, 1, 0)
        } else {
            let (g, x, y) = egcd(b, a.rem_euclid(b));
            (g, y, x - a.div_euclid(b) * y)
        }
    }
    let (g, x, y) = egcd(m[0], m[1]);
    let (x, y) = if g < 0 { (-x, -y) } else { (x, y) };
    [-y, x]
}

impl PeripheralComplex {
    pub fn from_parsed(p: &Parsed) -> Result<PeripheralComplex> {
        match &p.diagram {
            Diagram::Link(l) => link_complex(l, &p.meridians),
            Diagram::Fal(f) => fal_complex(f, &p.meridians),
        }
    }

    pub fn pedge_index(&self) -> BTreeMap<String, usize> {
        self.pedges.iter().enumerate().map(|(i, p)| (p.id.clone(), i)).collect()
    }

    pub fn arc_index(&self) -> BTreeMap<String, usize> {
        self.arcs.iter().enumerate().map(|(i, p)| (p.id.clone(), i)).collect()
    }

    pub fn torus_index(&self, id: &str) -> Option<usize> {
        self.tori.iter().position(|t| t.id == id)
    }

    pub fn face_index(&self, id: &str) -> Option<usize> {
        self.faces.iter().position(|f| f.id == id)
    }

    /// Closed walk of peripheral edges on `torus` whose lattice class is
    /// `class`, found by breadth-first search in the universal cover.
    pub fn find_walk(&self, torus: usize, class: [i64; 2]) -> Result<Vec<(usize, bool)>> {
        let start = self.points.iter().position(|p| p.torus == torus).ok_or_else(|| invalid(&self.tori[torus].id, "torus has no points"))?;
        let bound = 2 * (class[0].abs() + class[1].abs()) + 4;
        let mut prev: HashMap<(usize, [i64; 2]), (usize, [i64; 2], usize, bool)> = HashMap::new();
        let mut queue = VecDeque::new();
        queue.push_back((start, [0i64, 0]));
        prev.insert((start, [0, 0]), (usize::MAX, [0, 0], 0, true));
        while let Some((p, h)) = queue.pop_front() {
            if p == start && h == class && class != [0, 0] {
                let mut walk = Vec::new();
                let mut cur = (p, h);
                while cur != (start, [0, 0]) {
                    let (pp, ph, e, fw) = prev[&cur];
                    walk.push((e, fw));
                    cur = (pp, ph);
                }
                walk.reverse();
                return Ok(walk);
            }
            for d in &self.rotation[p] {
                let e = &self.pedges[d.edge];
                let (q, sg) = if d.end == 0 { (e.head, 1) } else { (e.tail, -1) };
                let nh = [h[0] + sg * e.h[0], h[1] + sg * e.h[1]];
                if nh[0].abs() > bound || nh[1].abs() > bound {
                    continue;
                }
                if let std::collections::hash_map::Entry::Vacant(v) = prev.entry((q, nh)) {
                    v.insert((p, h, d.edge, d.end == 0));
                    queue.push_back((q, nh));
                }
            }
        }
        Err(Error::Degenerate(format!("no closed walk of class {class:?} on {}", self.tori[torus].id)))
    }

    /// Longitude class completing the meridian of `torus` to a positive basis.
    pub fn longitude_class(&self, torus: usize) -> [i64; 2] {
        complete_basis(self.meridian[torus])
    }

    pub fn tori_of_arc(&self, a: usize) -> [usize; 2] {
        let e = self.arcs[a].ends;
        [self.points[e[0]].torus, self.points[e[1]].torus]
    }

    /// Point at a polygon corner.
    pub fn corner_point(&self, c: Corner) -> usize {
        let (e, fw) = self.polygons[c.0].sides[c.1];
        if fw {
            self.pedges[e].tail
        } else {
            self.pedges[e].head
        }
    }

    /// Polygon on the given side of a face corner, and the index of that
    /// corner's pedge within it.
    pub fn polygon_of(&self, pedge: usize, fw: bool) -> (usize, usize) {
        for (li, l) in self.polygons.iter().enumerate() {
            if let Some(j) = l.sides.iter().position(|&s| s == (pedge, fw)) {
                return (li, j);
            }
        }
        unreachable!("every pedge side lies on a polygon")
    }
}
