use std::collections::BTreeMap;

use super::{Builder, FaceKind, PeripheralComplex, TorusKind};
use crate::diagram::{Ambient, LinkDiagram};
use crate::error::{invalid, Result};

const THIRD: f64 = 1.0 / 3.0;

/// Overpass (or underpass): maximal run of edges between two under (over)
/// visits, given by the component, first edge position, and the unwrapped
/// position where it ends.
struct Pass {
    id: String,
    comp: usize,
    start: usize,
    end: usize,
}

fn height(over: bool) -> f64 {
    if over {
        0.75
    } else {
        0.25
    }
}

pub fn link_complex(d: &LinkDiagram, meridians: &BTreeMap<String, String>) -> Result<PeripheralComplex> {
    let mut b = Builder { name: d.name.clone(), ..Default::default() };
    let torus_ambient = d.ambient == Ambient::T2;
    if torus_ambient {
        b.torus("*N", TorusKind::North);
        b.torus("*S", TorusKind::South);
    }
    let point_id = |c: usize, over: bool| format!("x:{}:{}", d.crossings[c].id, if over { "o" } else { "u" });
    for (k, comp) in d.components.iter().enumerate() {
        let t = b.torus(&format!("K{k}"), TorusKind::Component);
        for v in &comp.visits {
            b.point(&point_id(v.crossing, v.over), t);
        }
    }
    for (c, x) in d.crossings.iter().enumerate() {
        let o = b.point_idx[&point_id(c, true)];
        let u = b.point_idx[&point_id(c, false)];
        b.arc(&format!("g:{}", x.id), o, u);
    }
    for comp in &d.components {
        let n = comp.visits.len();
        for i in 0..n {
            let e = comp.edges[i];
            let tv = comp.visits[i];
            let hv = comp.visits[(i + 1) % n];
            let tail = b.point_idx[&point_id(tv.crossing, tv.over)];
            let head = b.point_idx[&point_id(hv.crossing, hv.over)];
            let (tt, th) = (height(tv.over), height(hv.over));
            let wrap = i64::from(i + 1 == n);
            let s = i as f64;
            b.pedge(
                &format!("eR:{}", d.edges[e].id),
                tail,
                head,
                [0, wrap],
                Some(vec![(s, tt), (s + THIRD, 0.5), (s + 2.0 * THIRD, 0.5), (s + 1.0, th)]),
            );
            let l = if tv.over { 1.0 } else { 0.0 };
            let k = (l - th).round() as i64;
            b.pedge(
                &format!("eL:{}", d.edges[e].id),
                tail,
                head,
                [k, wrap],
                Some(vec![(s, tt), (s + THIRD, l), (s + 2.0 * THIRD, l), (s + 1.0, th + k as f64)]),
            );
        }
    }

    let mut overpasses = Vec::new();
    let mut underpasses = Vec::new();
    if torus_ambient {
        for (k, comp) in d.components.iter().enumerate() {
            let n = comp.visits.len();
            let unders: Vec<usize> = (0..n).filter(|&i| !comp.visits[i].over).collect();
            let overs: Vec<usize> = (0..n).filter(|&i| comp.visits[i].over).collect();
            if unders.is_empty() || overs.is_empty() {
                return Err(invalid(
                    format!("K{k}"),
                    "on the torus every component needs both an over- and an under-crossing",
                ));
            }
            for (list, out, pre) in [(&unders, &mut overpasses, "a"), (&overs, &mut underpasses, "b")] {
                for (j, &i) in list.iter().enumerate() {
                    let next = list[(j + 1) % list.len()];
                    let end = if next > i { next } else { next + n };
                    out.push(Pass { id: format!("{pre}:{}", d.edges[comp.edges[i]].id), comp: k, start: i, end });
                }
            }
        }
        add_passes(&mut b, d, &overpasses, true, &point_id);
        add_passes(&mut b, d, &underpasses, false, &point_id);
    }

    // regions
    for r in &d.regions {
        let m = r.steps.len();
        let mut corners = Vec::new();
        let mut sides = Vec::new();
        for k in 0..m {
            let (e, fw) = r.steps[k];
            let id = if fw { format!("eL:{}", d.edges[e].id) } else { format!("eR:{}", d.edges[e].id) };
            corners.push((b.pe(&id), fw));
            let (c, slot) = if fw { d.edges[e].head } else { d.edges[e].tail };
            sides.push((b.ar(&format!("g:{}", d.crossings[c].id)), d.is_over(c, slot)));
        }
        b.face(&r.id, FaceKind::Region, corners, sides);
    }

    if torus_ambient {
        add_vertical_faces(&mut b, d, &overpasses, true);
        add_vertical_faces(&mut b, d, &underpasses, false);
    }
    b.finish(meridians)
}

fn add_passes(b: &mut Builder, d: &LinkDiagram, passes: &[Pass], over: bool, point_id: &dyn Fn(usize, bool) -> String) {
    let (cusp, pre) = if over { ("*N", "a") } else { ("*S", "b") };
    let nt = b.torus_idx[cusp];
    let side = if over { 0.25 } else { 0.75 };
    for p in passes {
        let comp = &d.components[p.comp];
        let n = comp.visits.len();
        let t = b.torus_idx[&format!("K{}", p.comp)];
        let base = b.point(&format!("p:{}", p.id), t);
        let top = b.point(&format!("p{}:{}", &cusp[1..], p.id), nt);
        b.arc(&format!("g:{}", p.id), base, top);
        let s0 = p.start as f64 + 0.5;
        let vis = |m: usize| comp.visits[m % n];
        let pt = |b: &Builder, m: usize| b.point_idx[&point_id(vis(m).crossing, vis(m).over)];
        let first = pt(b, p.start);
        b.pedge(&format!("e{pre}0:{}", p.id), base, first, [0, 0], Some(vec![(s0, side), (p.start as f64, side)]));
        let last = pt(b, p.end);
        b.pedge(
            &format!("e{pre}1:{}", p.id),
            base,
            last,
            [0, (p.end / n) as i64],
            Some(vec![(s0, side), (p.end as f64, side)]),
        );
        for m in p.start + 1..p.end {
            let c = &d.crossings[vis(m).crossing].id;
            let q = pt(b, m);
            let wrap = (m / n) as i64;
            let sm = m as f64;
            let (r_path, l_path, l_shift) = if over {
                (vec![(s0, side), (sm, 0.5), (sm, 0.75)], vec![(s0, side), (sm, 0.0), (sm, -0.25)], -1)
            } else {
                (vec![(s0, side), (sm, 0.5), (sm, 0.25)], vec![(s0, side), (sm, 1.0), (sm, 1.25)], 1)
            };
            b.pedge(&format!("e{pre}r:{}:{c}", p.id), base, q, [0, wrap], Some(r_path));
            b.pedge(&format!("e{pre}l:{}:{c}", p.id), base, q, [l_shift, wrap], Some(l_path));
        }
    }
}

/// Vertical triangles above (over = true) or below every crossing.
fn add_vertical_faces(b: &mut Builder, d: &LinkDiagram, passes: &[Pass], over: bool) {
    let (cusp, pre) = if over { ("*N", "a") } else { ("*S", "b") };
    let shift_sum = |p: &Pass, upto: usize| -> [i64; 2] {
        let comp = &d.components[p.comp];
        let n = comp.visits.len();
        let mut s = [0i64; 2];
        for m in p.start..upto {
            let sh = d.edges[comp.edges[m % n]].shift;
            s[0] += sh[0];
            s[1] += sh[1];
        }
        s
    };
    for (c, x) in d.crossings.iter().enumerate() {
        // pass running across c, and the two passes meeting at c
        let mut across = None;
        let mut ending = None;
        let mut starting = None;
        for p in passes {
            let comp = &d.components[p.comp];
            let n = comp.visits.len();
            for m in p.start..=p.end {
                let v = comp.visits[m % n];
                if v.crossing != c {
                    continue;
                }
                if m == p.start {
                    starting = Some((p, m));
                } else if m == p.end {
                    ending = Some((p, m));
                } else {
                    across = Some((p, m));
                }
            }
        }
        let (Some((a1, m1)), Some((a_in, _)), Some((a_out, _))) = (across, ending, starting) else {
            continue;
        };
        let s1 = shift_sum(a1, m1);
        // incoming under (over) strand lies to the right of the over (left of
        // the under) strand at a positive crossing
        let in_right = (x.sign > 0) == over;
        for (a2, incoming) in [(a_in, true), (a_out, false)] {
            let s2 = if incoming { shift_sum(a2, a2.end) } else { [0, 0] };
            let h = [s1[0] - s2[0], s1[1] - s2[1]];
            let side = if incoming == in_right { "r" } else { "l" };
            let tag = if incoming { "in" } else { "out" };
            let n1 = b.point_idx[&format!("p{}:{}", &cusp[1..], a1.id)];
            let n2 = b.point_idx[&format!("p{}:{}", &cusp[1..], a2.id)];
            let eid = format!("e{}:{}:{tag}", &cusp[1..], x.id);
            let top = b.pedge(&eid, n1, n2, h, None);
            let c1 = b.pe(&format!("e{pre}{side}:{}:{}", a1.id, x.id));
            let c2 = b.pe(&format!("e{pre}{}:{}", if incoming { 1 } else { 0 }, a2.id));
            let gc = b.ar(&format!("g:{}", x.id));
            let g2 = b.ar(&format!("g:{}", a2.id));
            let g1 = b.ar(&format!("g:{}", a1.id));
            b.face(
                &format!("V{}:{}:{tag}", &cusp[1..], x.id),
                FaceKind::Vertical,
                vec![(c1, true), (c2, false), (top, false)],
                vec![(gc, over), (g2, true), (g1, false)],
            );
        }
    }
}
