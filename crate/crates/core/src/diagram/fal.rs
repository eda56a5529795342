use std::collections::BTreeMap;

use serde::Serialize;

use super::{index_ids, Ambient, FalInput};
use crate::error::{invalid, Result};
use crate::rotation::{canonical_rotation, Dart, RotationSystem};

#[derive(Clone, Debug)]
pub struct Circle {
    pub id: String,
    /// Segment ends at slots x1A, x1B, x2B, x2A.
    pub slots: [Dart; 4],
    pub half_twist: bool,
}

#[derive(Clone, Debug)]
pub struct Segment {
    pub id: String,
    pub from: (usize, u8),
    pub to: (usize, u8),
    pub shift: [i64; 2],
}

/// A strand component: segments in traversal order with their direction,
/// and the punctures (circle, strand 1 or 2) between them. Puncture j
/// precedes segment j.
#[derive(Clone, Debug)]
pub struct Strand {
    pub segs: Vec<(usize, bool)>,
    pub punctures: Vec<(usize, u8)>,
}

/// A region of the plane graph of circles and segments; `gaps[i]` is the
/// slot gap (g, g+1) passed at the circle after `steps[i]`.
#[derive(Clone, Debug)]
pub struct FalRegion {
    pub id: String,
    pub steps: Vec<(usize, bool)>,
    pub gaps: Vec<(usize, u8)>,
}

/// Bow-tie graph: vertices are circles (first) then segments; each circle
/// contributes six edges.
#[derive(Clone, Debug, Serialize)]
pub struct BowTie {
    pub vertex_ids: Vec<String>,
    pub edge_ids: Vec<String>,
    pub edge_ends: Vec<(usize, usize)>,
    pub rotation: RotationSystem,
    /// Face walks; bow-tie triangles first flagged by `is_bowtie`.
    pub faces: Vec<Vec<(usize, bool)>>,
    pub is_bowtie: Vec<bool>,
    /// Region graph: vertices are the non bow-tie faces.
    pub region_faces: Vec<usize>,
    pub region_graph: RotationSystem,
    /// For each region graph edge (one per bow-tie vertex): its two regions.
    pub region_edge_ends: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct FalDiagram {
    pub name: String,
    pub ambient: Ambient,
    pub circles: Vec<Circle>,
    pub segments: Vec<Segment>,
    pub strands: Vec<Strand>,
    pub regions: Vec<FalRegion>,
    pub bowtie: BowTie,
}

/// Bow-tie edge names per circle, in the order g1A g1B g2B g2A g0A g0B.
pub const BOWTIE_EDGES: [&str; 6] = ["g1A", "g1B", "g2B", "g2A", "g0A", "g0B"];

/// Bow-tie edge (index into `BOWTIE_EDGES`) on the left of a segment that
/// leaves a circle through `slot`.
pub fn left_on_departure(slot: u8) -> usize {
    [0, 5, 2, 4][slot as usize]
}

/// Bow-tie edge on the right of a segment leaving through `slot`.
pub fn right_on_departure(slot: u8) -> usize {
    [4, 1, 5, 3][slot as usize]
}

impl FalDiagram {
    pub fn build(name: &str, ambient: Ambient, f: &FalInput) -> Result<FalDiagram> {
        if f.circles.is_empty() {
            return Err(invalid("fal", "a fully augmented link needs at least one circle"));
        }
        let cidx = index_ids(f.circles.iter().map(|c| &c.id), "circle")?;
        let sidx = index_ids(f.segments.iter().map(|s| &s.id), "segment")?;
        let mut slots: Vec<[Option<Dart>; 4]> = vec![[None; 4]; f.circles.len()];
        let mut segments = Vec::new();
        for (i, s) in f.segments.iter().enumerate() {
            let mut ends = [(0usize, 0u8); 2];
            for (k, (cid, t)) in [&s.from, &s.to].into_iter().enumerate() {
                let c = *cidx.get(cid).ok_or_else(|| invalid(&s.id, format!("unknown circle {cid}")))?;
                if *t > 3 {
                    return Err(invalid(&s.id, format!("slot {t} out of range 0..3")));
                }
                if slots[c][*t as usize].is_some() {
                    return Err(invalid(&s.id, format!("slot {t} of {cid} used twice")));
                }
                slots[c][*t as usize] = Some(Dart { edge: i, end: k as u8 });
                ends[k] = (c, *t);
            }
            if ambient == Ambient::S3 && s.shift.is_some_and(|x| x != [0, 0]) {
                return Err(invalid(&s.id, "lattice shifts only apply on the torus"));
            }
            segments.push(Segment { id: s.id.clone(), from: ends[0], to: ends[1], shift: s.shift.unwrap_or([0, 0]) });
        }
        let mut circles = Vec::new();
        for (c, ci) in f.circles.iter().enumerate() {
            let mut row = [Dart { edge: 0, end: 0 }; 4];
            for t in 0..4 {
                row[t] = slots[c][t].ok_or_else(|| invalid(&ci.id, format!("slot {t} is empty")))?;
                let named = sidx.get(&ci.slots[t]).copied();
                if named != Some(row[t].edge) {
                    return Err(invalid(
                        &ci.id,
                        format!("slot {t} lists {} but segment {} ends there", ci.slots[t], segments[row[t].edge].id),
                    ));
                }
            }
            circles.push(Circle { id: ci.id.clone(), slots: row, half_twist: ci.half_twist });
        }
        let strands = trace_strands(&circles, &segments);
        let regions = trace_regions(name, ambient, &circles, &segments)?;
        let bowtie = build_bowtie(ambient, &circles, &segments)?;
        let d = FalDiagram { name: name.into(), ambient, circles, segments, strands, regions, bowtie };
        if let Some(given) = &f.bowtie {
            d.check_bowtie(given)?;
        }
        Ok(d)
    }

    pub fn has_half_twists(&self) -> bool {
        self.circles.iter().any(|c| c.half_twist)
    }

    fn check_bowtie(&self, given: &BTreeMap<String, Vec<String>>) -> Result<()> {
        let bt = &self.bowtie;
        if given.len() != bt.vertex_ids.len() {
            return Err(invalid("bowtie", "vertex count differs from the diagram"));
        }
        for (v, vid) in bt.vertex_ids.iter().enumerate() {
            let got = given.get(vid).ok_or_else(|| invalid("bowtie", format!("missing vertex {vid}")))?;
            let want: Vec<String> = bt.rotation.rot[v].iter().map(|d| bt.edge_ids[d.edge].clone()).collect();
            let mut got_edges = got.clone();
            let mut want_edges = want.clone();
            got_edges.sort();
            want_edges.sort();
            if got_edges != want_edges {
                return Err(invalid("bowtie", format!("edges at {vid} differ from the diagram")));
            }
            let same = (0..want.len()).any(|k| want[k..].iter().chain(want[..k].iter()).eq(got.iter()));
            if !same {
                return Err(invalid("bowtie", format!("cyclic order at {vid} differs from the diagram")));
            }
        }
        Ok(())
    }
}

fn trace_strands(circles: &[Circle], segments: &[Segment]) -> Vec<Strand> {
    let mut seen = vec![false; segments.len()];
    let mut out = Vec::new();
    for start in 0..segments.len() {
        if seen[start] {
            continue;
        }
        let mut segs = Vec::new();
        let mut punctures = Vec::new();
        let (mut s, mut fw) = (start, true);
        loop {
            seen[s] = true;
            let enter = if fw { segments[s].from } else { segments[s].to };
            punctures.push((enter.0, if enter.1 < 2 { 1 } else { 2 }));
            segs.push((s, fw));
            let (c, t) = if fw { segments[s].to } else { segments[s].from };
            let d = circles[c].slots[(t ^ 1) as usize];
            s = d.edge;
            fw = d.end == 0;
            if s == start {
                break;
            }
        }
        out.push(Strand { segs, punctures });
    }
    out
}

fn trace_regions(name: &str, ambient: Ambient, circles: &[Circle], segments: &[Segment]) -> Result<Vec<FalRegion>> {
    let rot = RotationSystem { rot: circles.iter().map(|c| c.slots.to_vec()).collect() };
    let ends: Vec<(usize, usize)> = segments.iter().map(|s| (s.from.0, s.to.0)).collect();
    if !rot.is_connected(&ends) {
        return Err(invalid(name, "the circle and segment graph is not connected"));
    }
    let chi = rot.euler_characteristic();
    let want = if ambient == Ambient::S3 { 2 } else { 0 };
    if chi != want {
        return Err(invalid(name, format!("euler characteristic {chi}, expected {want}")));
    }
    let mut regs: Vec<(Vec<(String, bool)>, Vec<(usize, bool)>)> = rot
        .faces()
        .into_iter()
        .map(|f| {
            let key: Vec<(String, bool)> = f.iter().map(|&(e, fw)| (segments[e].id.clone(), !fw)).collect();
            let k = canonical_rotation(&key);
            let off = (0..f.len()).find(|&i| key[i..].iter().chain(key[..i].iter()).eq(k.iter())).unwrap_or(0);
            (k, f[off..].iter().chain(f[..off].iter()).copied().collect())
        })
        .collect();
    regs.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = Vec::new();
    for (i, (_, steps)) in regs.into_iter().enumerate() {
        let gaps = steps
            .iter()
            .map(|&(s, fw)| {
                let (c, t) = if fw { segments[s].to } else { segments[s].from };
                (c, (t + 3) % 4)
            })
            .collect();
        if ambient == Ambient::T2 {
            let mut sum = [0i64; 2];
            for &(s, fw) in &steps {
                let g = if fw { 1 } else { -1 };
                sum[0] += g * segments[s].shift[0];
                sum[1] += g * segments[s].shift[1];
            }
            if sum != [0, 0] {
                return Err(invalid(format!("R{i}"), "region is not a disk: boundary winds around the torus"));
            }
        }
        out.push(FalRegion { id: format!("R{i}"), steps, gaps });
    }
    Ok(out)
}

fn build_bowtie(ambient: Ambient, circles: &[Circle], segments: &[Segment]) -> Result<BowTie> {
    let nc = circles.len();
    let mut vertex_ids: Vec<String> = circles.iter().map(|c| c.id.clone()).collect();
    vertex_ids.extend(segments.iter().map(|s| s.id.clone()));
    let mut edge_ids = Vec::new();
    let mut edge_ends = Vec::new();
    for (ci, c) in circles.iter().enumerate() {
        let seg = |t: usize| nc + c.slots[t].edge;
        for (k, name) in BOWTIE_EDGES.iter().enumerate() {
            edge_ids.push(format!("{name}:{}", c.id));
            edge_ends.push(match k {
                0 => (ci, seg(0)),
                1 => (ci, seg(1)),
                2 => (ci, seg(2)),
                3 => (ci, seg(3)),
                4 => (seg(0), seg(3)),
                _ => (seg(1), seg(2)),
            });
        }
    }
    let mut rot = RotationSystem::new(nc + segments.len());
    for ci in 0..nc {
        rot.rot[ci] = (0..4).map(|k| Dart { edge: 6 * ci + k, end: 0 }).collect();
    }
    // end of a bow-tie edge that sits at the segment occupying `slot`
    let end_at = |slot: u8, k: usize| -> u8 {
        match k {
            0..=3 => 1,
            4 => u8::from(slot == 3),
            _ => u8::from(slot == 2),
        }
    };
    for (si, s) in segments.iter().enumerate() {
        let (x, tx) = s.from;
        let (y, ty) = s.to;
        let dart = |c: usize, slot: u8, k: usize| Dart { edge: 6 * c + k, end: end_at(slot, k) };
        rot.rot[nc + si] = vec![
            dart(y, ty, right_on_departure(ty)),
            dart(x, tx, left_on_departure(tx)),
            dart(x, tx, right_on_departure(tx)),
            dart(y, ty, left_on_departure(ty)),
        ];
    }
    rot.check().map_err(|m| invalid("bowtie", m))?;
    let faces = rot.faces();
    let is_bowtie: Vec<bool> = faces
        .iter()
        .map(|f| {
            if f.len() != 3 {
                return false;
            }
            let c = f[0].0 / 6;
            let mut ks: Vec<usize> = f.iter().map(|&(e, _)| if e / 6 == c { e % 6 } else { 99 }).collect();
            ks.sort_unstable();
            ks == [0, 3, 4] || ks == [1, 2, 5]
        })
        .collect();
    let nb = is_bowtie.iter().filter(|b| **b).count();
    if nb != 2 * nc {
        return Err(invalid("bowtie", format!("found {nb} bow-tie faces, expected {}", 2 * nc)));
    }
    let region_faces: Vec<usize> = (0..faces.len()).filter(|&i| !is_bowtie[i]).collect();
    let nv = nc + segments.len();
    let mut rg = RotationSystem::new(region_faces.len());
    let mut ends: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for (ri, &fi) in region_faces.iter().enumerate() {
        for (pos, &(e, fw)) in faces[fi].iter().enumerate() {
            let v = if fw { edge_ends[e].1 } else { edge_ends[e].0 };
            ends[v].push((ri, pos));
        }
    }
    let mut region_edge_ends = Vec::new();
    let mut slots: Vec<Vec<(usize, Dart)>> = vec![Vec::new(); region_faces.len()];
    for (v, e) in ends.iter().enumerate() {
        if e.len() != 2 {
            return Err(invalid(&vertex_ids[v], format!("bow-tie vertex meets {} regions, expected 2", e.len())));
        }
        region_edge_ends.push((e[0].0, e[1].0));
        slots[e[0].0].push((e[0].1, Dart { edge: v, end: 0 }));
        slots[e[1].0].push((e[1].1, Dart { edge: v, end: 1 }));
    }
    for (ri, mut s) in slots.into_iter().enumerate() {
        s.sort_by_key(|p| p.0);
        rg.rot[ri] = s.into_iter().map(|p| p.1).collect();
    }
    let want = if ambient == Ambient::S3 { 2 } else { 0 };
    let chi = rg.euler_characteristic();
    if chi != want {
        return Err(invalid("region graph", format!("euler characteristic {chi}, expected {want}")));
    }
    Ok(BowTie { vertex_ids, edge_ids, edge_ends, rotation: rot, faces, is_bowtie, region_faces, region_graph: rg, region_edge_ends })
}
