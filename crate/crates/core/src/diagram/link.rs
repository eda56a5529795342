use std::collections::BTreeMap;

use super::{index_ids, Ambient, CrossingInput, EdgeInput};
use crate::error::{invalid, Result};
use crate::rotation::{canonical_rotation, Dart, RotationSystem};

#[derive(Clone, Debug)]
pub struct Crossing {
    pub id: String,
    /// Slots of the over strand.
    pub over: [u8; 2],
    /// +1 when the under strand passes from right to left of the over strand.
    pub sign: i8,
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub id: String,
    pub tail: (usize, u8),
    pub head: (usize, u8),
    pub shift: [i64; 2],
}

/// A pass of a component through a crossing.
#[derive(Clone, Copy, Debug)]
pub struct Visit {
    pub crossing: usize,
    pub over: bool,
    pub in_edge: usize,
    pub out_edge: usize,
}

/// Edges of a component in traversal order; `visits[i]` is the tail of
/// `edges[i]`.
#[derive(Clone, Debug)]
pub struct Component {
    pub edges: Vec<usize>,
    pub visits: Vec<Visit>,
}

/// A complementary region, traced counterclockwise.
#[derive(Clone, Debug)]
pub struct Region {
    pub id: String,
    pub steps: Vec<(usize, bool)>,
}

#[derive(Clone, Debug)]
pub struct LinkDiagram {
    pub name: String,
    pub ambient: Ambient,
    pub crossings: Vec<Crossing>,
    pub edges: Vec<Edge>,
    pub slot_dart: Vec<[Dart; 4]>,
    pub components: Vec<Component>,
    pub regions: Vec<Region>,
    /// (component, position in component) for each edge.
    pub edge_place: Vec<(usize, usize)>,
}

impl LinkDiagram {
    pub fn build(name: &str, ambient: Ambient, cin: &[CrossingInput], ein: &[EdgeInput]) -> Result<LinkDiagram> {
        if cin.is_empty() {
            return Err(invalid("crossings", "no crossings: TT system undefined"));
        }
        let cidx = index_ids(cin.iter().map(|c| &c.id), "crossing")?;
        index_ids(ein.iter().map(|e| &e.id), "edge")?;
        let mut slots: Vec<[Option<Dart>; 4]> = vec![[None; 4]; cin.len()];
        let mut edges = Vec::new();
        for (i, e) in ein.iter().enumerate() {
            let mut ends = [(0usize, 0u8); 2];
            for (k, (cid, s)) in [&e.from, &e.to].into_iter().enumerate() {
                let c = *cidx.get(cid).ok_or_else(|| invalid(&e.id, format!("unknown crossing {cid}")))?;
                if *s > 3 {
                    return Err(invalid(&e.id, format!("slot {s} out of range 0..3")));
                }
                if slots[c][*s as usize].is_some() {
                    return Err(invalid(&e.id, format!("slot {s} of {cid} used twice")));
                }
                slots[c][*s as usize] = Some(Dart { edge: i, end: k as u8 });
                ends[k] = (c, *s);
            }
            if ambient == Ambient::S3 && e.shift.is_some_and(|s| s != [0, 0]) {
                return Err(invalid(&e.id, "lattice shifts only apply on the torus"));
            }
            edges.push(Edge { id: e.id.clone(), tail: ends[0], head: ends[1], shift: e.shift.unwrap_or([0, 0]) });
        }
        let mut slot_dart = Vec::new();
        let mut crossings = Vec::new();
        for (c, ci) in cin.iter().enumerate() {
            let mut row = [Dart { edge: 0, end: 0 }; 4];
            for s in 0..4 {
                row[s] = slots[c][s].ok_or_else(|| invalid(&ci.id, format!("slot {s} is empty")))?;
            }
            let over = ci.over.unwrap_or([0, 2]);
            let mut o = over;
            o.sort_unstable();
            if o != [0, 2] && o != [1, 3] {
                return Err(invalid(&ci.id, "over strand must occupy opposite slots"));
            }
            let under = if o == [0, 2] { [1u8, 3] } else { [0u8, 2] };
            let out_slot = |pair: [u8; 2]| -> Result<u8> {
                let (a, b) = (row[pair[0] as usize], row[pair[1] as usize]);
                match (a.end, b.end) {
                    (0, 1) => Ok(pair[0]),
                    (1, 0) => Ok(pair[1]),
                    _ => Err(invalid(&ci.id, "a strand must enter and leave through opposite slots")),
                }
            };
            let over_out = out_slot(o)?;
            let under_out = out_slot(under)?;
            let sign = if (over_out + 1) % 4 == under_out { 1 } else { -1 };
            if let Some(s) = ci.sign {
                if s != sign {
                    return Err(invalid(&ci.id, format!("declared sign {s} disagrees with orientation ({sign})")));
                }
            }
            slot_dart.push(row);
            crossings.push(Crossing { id: ci.id.clone(), over: o, sign });
        }

        let mut d = LinkDiagram {
            name: name.to_string(),
            ambient,
            crossings,
            edges,
            slot_dart,
            components: Vec::new(),
            regions: Vec::new(),
            edge_place: Vec::new(),
        };
        d.trace_components();
        d.trace_regions()?;
        Ok(d)
    }

    pub fn is_over(&self, c: usize, slot: u8) -> bool {
        self.crossings[c].over.contains(&slot)
    }

    pub fn rotation(&self) -> RotationSystem {
        RotationSystem { rot: self.slot_dart.iter().map(|r| r.to_vec()).collect() }
    }

    fn trace_components(&mut self) {
        let n = self.edges.len();
        let mut seen = vec![false; n];
        let mut place = vec![(0, 0); n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut es = Vec::new();
            let mut e = start;
            loop {
                seen[e] = true;
                place[e] = (self.components.len(), es.len());
                es.push(e);
                let (c, s) = self.edges[e].head;
                let next = self.slot_dart[c][((s + 2) % 4) as usize].edge;
                if next == start {
                    break;
                }
                e = next;
            }
            let visits = (0..es.len())
                .map(|i| {
                    let out_edge = es[i];
                    let in_edge = es[(i + es.len() - 1) % es.len()];
                    let (c, s) = self.edges[out_edge].tail;
                    Visit { crossing: c, over: self.is_over(c, s), in_edge, out_edge }
                })
                .collect();
            self.components.push(Component { edges: es, visits });
        }
        self.edge_place = place;
    }

    fn trace_regions(&mut self) -> Result<()> {
        let rot = self.rotation();
        let faces = rot.faces();
        let chi = rot.euler_characteristic();
        let ends: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.tail.0, e.head.0)).collect();
        if !rot.is_connected(&ends) {
            return Err(invalid(&self.name, "diagram is not connected"));
        }
        let want = match self.ambient {
            Ambient::S3 => 2,
            Ambient::T2 => 0,
        };
        if chi != want {
            return Err(invalid(&self.name, format!("euler characteristic {chi}, expected {want}")));
        }
        let mut regions: Vec<(Vec<(String, bool)>, Vec<(usize, bool)>)> = faces
            .into_iter()
            .map(|f| {
                let key: Vec<(String, bool)> = f.iter().map(|&(e, fw)| (self.edges[e].id.clone(), !fw)).collect();
                let k = canonical_rotation(&key);
                let off = (0..f.len()).find(|&i| key[i..].iter().chain(key[..i].iter()).eq(k.iter())).unwrap_or(0);
                let steps: Vec<(usize, bool)> = f[off..].iter().chain(f[..off].iter()).copied().collect();
                (k, steps)
            })
            .collect();
        regions.sort_by(|a, b| a.0.cmp(&b.0));
        for (i, (_, steps)) in regions.into_iter().enumerate() {
            if self.ambient == Ambient::T2 {
                let mut s = [0i64; 2];
                for &(e, fw) in &steps {
                    let sh = self.edges[e].shift;
                    let sg = if fw { 1 } else { -1 };
                    s[0] += sg * sh[0];
                    s[1] += sg * sh[1];
                }
                if s != [0, 0] {
                    return Err(invalid(format!("R{i}"), "region is not a disk: boundary winds around the torus"));
                }
            }
            self.regions.push(Region { id: format!("R{i}"), steps });
        }
        Ok(())
    }

    /// Regions to the left and right of each edge.
    pub fn edge_sides(&self) -> Vec<(usize, usize)> {
        let mut sides = vec![(usize::MAX, usize::MAX); self.edges.len()];
        for (r, reg) in self.regions.iter().enumerate() {
            for &(e, fw) in &reg.steps {
                if fw {
                    sides[e].0 = r;
                } else {
                    sides[e].1 = r;
                }
            }
        }
        sides
    }

    pub fn crossing_index(&self) -> BTreeMap<String, usize> {
        self.crossings.iter().enumerate().map(|(i, c)| (c.id.clone(), i)).collect()
    }
}
