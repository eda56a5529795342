use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::complex::PeripheralComplex;
use crate::error::{Error, Result};

/// Local edges of a tetrahedron as vertex index pairs.
pub const TET_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EdgeKey {
    Arc(usize),
    /// Diagonal of a face between two corner indices, i < j.
    Diag { face: usize, i: usize, j: usize },
    /// Cone edge inside a cell between two of its polygons, a < b.
    Interior { cell: usize, a: usize, b: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct Tet {
    pub cell: usize,
    pub face: usize,
    pub a_side: bool,
    /// Polygons at the vertices, in orientation order.
    pub vertices: [usize; 4],
    /// Edge class of each local edge, in `TET_EDGES` order.
    pub edges: [usize; 6],
}

#[derive(Clone, Debug, Serialize)]
pub struct Triangulation {
    pub apex: Vec<usize>,
    pub fan_root: Vec<usize>,
    pub tets: Vec<Tet>,
    /// Representative key and display name per edge class.
    pub classes: Vec<(EdgeKey, String)>,
    pub notes: Vec<String>,
}

struct Uf {
    parent: Vec<usize>,
}

impl Uf {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let n = self.parent[y];
            self.parent[y] = r;
            y = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a.max(b)] = a.min(b);
        }
    }
}

#[derive(Default)]
struct Keys {
    ids: HashMap<EdgeKey, usize>,
    keys: Vec<EdgeKey>,
}

impl Keys {
    fn id(&mut self, k: EdgeKey) -> usize {
        if let Some(&i) = self.ids.get(&k) {
            return i;
        }
        self.keys.push(k.clone());
        self.ids.insert(k, self.keys.len() - 1);
        self.keys.len() - 1
    }
}

fn polygon_key(c: &PeripheralComplex, l: usize) -> String {
    let poly = &c.polygons[l];
    let side = poly
        .sides
        .iter()
        .map(|&(e, fw)| format!("{}{}", c.pedges[e].id, if fw { "" } else { "~" }))
        .min()
        .unwrap_or_default();
    format!("{}|{side}", c.tori[poly.torus].id)
}

/// Fans every face from one corner and cones every cell from an apex
/// polygon. Apexes are taken least-key first subject to the fans of the
/// faces they touch starting at them.
pub fn triangulate(c: &PeripheralComplex) -> Result<Triangulation> {
    let mut side_poly: HashMap<(usize, bool), usize> = HashMap::new();
    for (l, p) in c.polygons.iter().enumerate() {
        for &s in &p.sides {
            side_poly.insert(s, l);
        }
    }
    let corner_poly = |face: usize, i: usize, a_side: bool| -> usize {
        let (e, d) = c.faces[face].corners[i];
        side_poly[&(e, if a_side { !d } else { d })]
    };

    let mut fixed: BTreeMap<usize, usize> = BTreeMap::new();
    let mut apex = Vec::with_capacity(c.cells.len());
    let mut notes = Vec::new();
    for (ci, cell) in c.cells.iter().enumerate() {
        let mut cands = cell.polygons.clone();
        cands.sort_by_key(|&l| polygon_key(c, l));
        let mut chosen = None;
        // strict pass keeps the apex at the fan root of every face it touches
        'pass: for strict in [true, false] {
            'cand: for &a in &cands {
                let mut want: BTreeMap<usize, usize> = BTreeMap::new();
                for fs in &cell.faces {
                    let n = c.faces[fs.face].corners.len();
                    for i in 0..n {
                        if corner_poly(fs.face, i, fs.a_side) != a {
                            continue;
                        }
                        if want.get(&fs.face).is_some_and(|&j| j != i) {
                            continue 'cand;
                        }
                        if strict && fixed.get(&fs.face).is_some_and(|&j| j != i) {
                            continue 'cand;
                        }
                        want.insert(fs.face, i);
                    }
                }
                for (f, i) in want {
                    fixed.entry(f).or_insert(i);
                }
                chosen = Some(a);
                break 'pass;
            }
        }
        match chosen {
            Some(a) => {
                if Some(&a) != cands.first() {
                    notes.push(format!("cell {ci}: least polygon cannot be an apex, using {}", polygon_key(c, a)));
                }
                apex.push(a);
            }
            None => return Err(Error::Unsupported(format!("cell {ci} has no polygon usable as a cone apex"))),
        }
    }
    let fan_root: Vec<usize> = (0..c.faces.len())
        .map(|f| {
            fixed.get(&f).copied().unwrap_or_else(|| {
                let corners = &c.faces[f].corners;
                (0..corners.len()).min_by_key(|&i| &c.pedges[corners[i].0].id).unwrap_or(0)
            })
        })
        .collect();

    let mut keys = Keys::default();
    let mut merges: Vec<(usize, usize)> = Vec::new();
    for f in &c.faces {
        if f.corners.len() == 2 {
            let a = keys.id(EdgeKey::Arc(f.sides[0].0));
            let b = keys.id(EdgeKey::Arc(f.sides[1].0));
            merges.push((a, b));
        }
    }
    let face_edge = |keys: &mut Keys, face: usize, i: usize, j: usize| -> usize {
        let n = c.faces[face].corners.len();
        if (i + 1) % n == j {
            keys.id(EdgeKey::Arc(c.faces[face].sides[i].0))
        } else if (j + 1) % n == i {
            keys.id(EdgeKey::Arc(c.faces[face].sides[j].0))
        } else {
            keys.id(EdgeKey::Diag { face, i: i.min(j), j: i.max(j) })
        }
    };

    let mut tets = Vec::new();
    for (ci, cell) in c.cells.iter().enumerate() {
        let a = apex[ci];
        // edges from the apex along the boundary
        let mut links: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for j in 0..c.polygons[a].sides.len() {
            let ((r, _), arc) = c.arc_partner[&(a, j)];
            let k = keys.id(EdgeKey::Arc(arc));
            links.entry(r).or_default().push(k);
        }
        for fs in &cell.faces {
            let n = c.faces[fs.face].corners.len();
            let r = fan_root[fs.face];
            let Some(m) = (0..n).find(|&i| corner_poly(fs.face, i, fs.a_side) == a) else {
                continue;
            };
            let adjacent = |i: usize, j: usize| i == j || (i + 1) % n == j || (j + 1) % n == i;
            for k in 0..n {
                if !adjacent(m, k) && (m == r || k == r) {
                    let e = face_edge(&mut keys, fs.face, m, k);
                    links.entry(corner_poly(fs.face, k, fs.a_side)).or_default().push(e);
                }
            }
        }
        for (x, ks) in links.iter_mut() {
            ks.sort_unstable();
            ks.dedup();
            if ks.len() > 1 {
                notes.push(format!("cell {ci}: apex and polygon {x} share {} boundary edges; identified", ks.len()));
            }
            for w in ks.windows(2) {
                merges.push((w[0], w[1]));
            }
        }
        for fs in &cell.faces {
            let f = &c.faces[fs.face];
            let n = f.corners.len();
            if n < 3 {
                continue;
            }
            let r = fan_root[fs.face];
            for s in 1..n - 1 {
                let tri = [r, (r + s) % n, (r + s + 1) % n];
                if tri.iter().any(|&i| corner_poly(fs.face, i, fs.a_side) == a) {
                    continue;
                }
                let order = if fs.a_side { [tri[0], tri[2], tri[1]] } else { tri };
                let polys = order.map(|i| corner_poly(fs.face, i, fs.a_side));
                let vertices = [a, polys[0], polys[1], polys[2]];
                let mut edges = [0usize; 6];
                for (k, &(p, q)) in TET_EDGES.iter().enumerate() {
                    edges[k] = if p == 0 {
                        let x = vertices[q];
                        match links.get(&x).and_then(|v| v.first()) {
                            Some(&id) => id,
                            None => keys.id(EdgeKey::Interior { cell: ci, a: a.min(x), b: a.max(x) }),
                        }
                    } else {
                        face_edge(&mut keys, fs.face, order[p - 1], order[q - 1])
                    };
                }
                tets.push(Tet { cell: ci, face: fs.face, a_side: fs.a_side, vertices, edges });
            }
        }
    }

    let mut uf = Uf { parent: (0..keys.keys.len()).collect() };
    for (x, y) in merges {
        uf.union(x, y);
    }
    let mut class_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut classes = Vec::new();
    for t in &mut tets {
        for e in t.edges.iter_mut() {
            let r = uf.find(*e);
            let n = class_of.len();
            *e = *class_of.entry(r).or_insert_with(|| {
                classes.push(r);
                n
            });
        }
    }
    let classes = classes
        .into_iter()
        .map(|r| {
            let k = keys.keys[r].clone();
            let name = match &k {
                EdgeKey::Arc(a) => c.arcs[*a].id.clone(),
                EdgeKey::Diag { face, i, j } => format!("{}[{i},{j}]", c.faces[*face].id),
                EdgeKey::Interior { cell, a, b } => format!("cell{cell}[{a},{b}]"),
            };
            (k, name)
        })
        .collect();
    Ok(Triangulation { apex, fan_root, tets, classes, notes })
}
