use std::collections::BTreeMap;

use super::{Builder, FaceKind, PeripheralComplex, TorusKind};
use crate::diagram::{Ambient, FalDiagram};
use crate::error::{Error, Result};

/// Whether the γ⁰ end of a puncture lies to the left of a strand that
/// leaves the circle through `slot`.
pub fn gamma0_left(slot: u8) -> bool {
    slot % 2 == 1
}

pub fn fal_complex(d: &FalDiagram, meridians: &BTreeMap<String, String>) -> Result<PeripheralComplex> {
    if d.ambient != Ambient::S3 {
        return Err(Error::Unsupported(
            "fully augmented links in the thickened torus are supported as graphs only".into(),
        ));
    }
    if d.has_half_twists() {
        return Err(Error::Unsupported("fully augmented links with half-twists are supported as graphs only".into()));
    }
    let mut b = Builder { name: d.name.clone(), ..Default::default() };
    for c in &d.circles {
        let t = b.torus(&format!("C:{}", c.id), TorusKind::Circle);
        let p1 = b.point(&format!("P1:{}", c.id), t);
        let p2 = b.point(&format!("P2:{}", c.id), t);
        b.pedge(&format!("emu1:{}", c.id), p1, p1, [1, 0], Some(vec![(0.0, 0.0), (0.0, 1.0)]));
        b.pedge(&format!("emu2:{}", c.id), p2, p2, [1, 0], Some(vec![(0.5, 0.0), (0.5, 1.0)]));
        b.pedge(&format!("e0+:{}", c.id), p1, p2, [0, 0], Some(vec![(0.0, 0.0), (0.5, 0.0)]));
        b.pedge(&format!("e0-:{}", c.id), p1, p2, [0, -1], Some(vec![(0.0, 0.0), (-0.5, 0.0)]));
    }
    for (k, st) in d.strands.iter().enumerate() {
        let t = b.torus(&format!("K{k}"), TorusKind::Component);
        let n = st.segs.len();
        // θ = 0 point and θ = 1/2 point at each puncture
        let mut at = Vec::new();
        for j in 0..n {
            let (c, strand) = st.punctures[j];
            let cid = &d.circles[c].id;
            let (s, fw) = st.segs[j];
            let slot = if fw { d.segments[s].from.1 } else { d.segments[s].to.1 };
            let z0 = b.point(&format!("z0:{cid}:{strand}"), t);
            let zk = b.point(&format!("zk:{cid}:{strand}"), t);
            let jf = j as f64;
            if gamma0_left(slot) {
                b.pedge(&format!("e{strand}+:{cid}"), z0, zk, [0, 0], Some(vec![(jf, 0.0), (jf, 0.5)]));
                b.pedge(&format!("e{strand}-:{cid}"), z0, zk, [-1, 0], Some(vec![(jf, 0.0), (jf, -0.5)]));
                at.push((z0, zk));
            } else {
                b.pedge(&format!("e{strand}+:{cid}"), z0, zk, [0, 0], Some(vec![(jf, 0.5), (jf, 0.0)]));
                b.pedge(&format!("e{strand}-:{cid}"), z0, zk, [1, 0], Some(vec![(jf, 0.5), (jf, 1.0)]));
                at.push((zk, z0));
            }
        }
        for j in 0..n {
            let (s, fw) = st.segs[j];
            let sid = &d.segments[s].id;
            let wrap = i64::from(j + 1 == n);
            let (a, bb) = (at[j], at[(j + 1) % n]);
            let (jf, nf) = (j as f64, (j + 1) as f64);
            if fw {
                b.pedge(&format!("el:{sid}"), a.0, bb.0, [0, wrap], Some(vec![(jf, 0.0), (nf, 0.0)]));
                b.pedge(&format!("er:{sid}"), a.1, bb.1, [0, wrap], Some(vec![(jf, 0.5), (nf, 0.5)]));
            } else {
                b.pedge(&format!("el:{sid}"), bb.1, a.1, [0, -wrap], Some(vec![(nf, 0.5), (jf, 0.5)]));
                b.pedge(&format!("er:{sid}"), bb.0, a.0, [0, -wrap], Some(vec![(nf, 0.0), (jf, 0.0)]));
            }
        }
    }
    for c in &d.circles {
        let id = &c.id;
        let (p1, p2) = (b.point_idx[&format!("P1:{id}")], b.point_idx[&format!("P2:{id}")]);
        let pz = |b: &Builder, pre: &str, strand: u8| b.point_idx[&format!("{pre}:{id}:{strand}")];
        let g0 = b.arc(&format!("g0:{id}"), pz(&b, "z0", 1), pz(&b, "z0", 2));
        let g1 = b.arc(&format!("g1:{id}"), p1, pz(&b, "zk", 1));
        let g2 = b.arc(&format!("g2:{id}"), p2, pz(&b, "zk", 2));
        for sign in ["+", "-"] {
            let corners = vec![
                (b.pe(&format!("e0{sign}:{id}")), false),
                (b.pe(&format!("e1{sign}:{id}")), false),
                (b.pe(&format!("e2{sign}:{id}")), true),
            ];
            b.face(&format!("F{sign}:{id}"), FaceKind::Bowtie, corners, vec![(g1, true), (g0, true), (g2, false)]);
        }
    }
    for r in &d.regions {
        let mut corners = Vec::new();
        let mut sides = Vec::new();
        for (i, &(s, fw)) in r.steps.iter().enumerate() {
            let sid = &d.segments[s].id;
            corners.push(if fw { (b.pe(&format!("el:{sid}")), true) } else { (b.pe(&format!("er:{sid}")), false) });
            let (c, g) = r.gaps[i];
            let cid = &d.circles[c].id;
            match g {
                0 => {
                    let a = b.ar(&format!("g1:{cid}"));
                    sides.push((a, false));
                    corners.push((b.pe(&format!("emu1:{cid}")), false));
                    sides.push((a, true));
                }
                2 => {
                    let a = b.ar(&format!("g2:{cid}"));
                    sides.push((a, false));
                    corners.push((b.pe(&format!("emu2:{cid}")), true));
                    sides.push((a, true));
                }
                1 => sides.push((b.ar(&format!("g0:{cid}")), false)),
                _ => sides.push((b.ar(&format!("g0:{cid}")), true)),
            }
        }
        b.face(&r.id, FaceKind::Region, corners, sides);
    }
    b.finish(meridians)
}
