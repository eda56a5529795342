use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use super::{j_mat, projective_distance, t_mat, Mat};
use crate::complex::{Corner, PeripheralComplex};
use crate::error::{Error, Result};
use crate::mobius::{self, Pt};
use crate::C64;

/// One 3-cell placed in the upper half-space model. `frames[q]` maps base
/// coordinates to the centered view at corner q: its own ideal vertex at ∞,
/// the far end of the arc at q at 0, horosphere at height 1.
#[derive(Clone, Debug, Serialize)]
pub struct DevelopedCell {
    pub cell: usize,
    pub base: Corner,
    #[serde(skip)]
    pub frames: BTreeMap<Corner, Mat>,
    /// Ideal vertex of each polygon of the cell.
    pub positions: BTreeMap<usize, Pt>,
    /// Largest disagreement between frames reached along different paths.
    pub closure_defect: f64,
}

fn step_side(c: &PeripheralComplex, x: &[C64], q: Corner) -> Mat {
    let (e, fw) = c.polygons[q.0].sides[q.1];
    let u = x[c.arcs.len() + e];
    t_mat(if fw { u } else { -u })
}

/// Places the vertices of `cell`, starting from the frame I at `base`.
pub fn develop_cell(c: &PeripheralComplex, x: &[C64], cell: usize, base: Corner) -> Result<DevelopedCell> {
    let mut frames: BTreeMap<Corner, Mat> = BTreeMap::new();
    let mut via: BTreeMap<Corner, String> = BTreeMap::new();
    frames.insert(base, Mat::identity());
    via.insert(base, String::new());
    let mut queue = VecDeque::from([base]);
    let mut closure = 0.0f64;
    while let Some(q) = queue.pop_front() {
        let f = frames[&q];
        let len = c.polygons[q.0].sides.len();
        let next = (q.0, (q.1 + 1) % len);
        let prev = (q.0, (q.1 + len - 1) % len);
        let (partner, arc) = c.arc_partner[&q];
        let moves = [
            (next, step_side(c, x, q), &c.pedges[c.polygons[q.0].sides[q.1].0].id),
            (prev, mobius::adjugate(&step_side(c, x, prev)), &c.pedges[c.polygons[q.0].sides[prev.1].0].id),
            (partner, j_mat(x[arc]), &c.arcs[arc].id),
        ];
        for (r, m, label) in moves {
            let g = mobius::normalize(&(m * f));
            if !g.iter().all(|v| v.is_finite()) || g.norm() > 1e150 {
                return Err(Error::Degenerate(format!(
                    "developing overflowed at {} along {}{label}",
                    c.tori[c.polygons[r.0].torus].id, via[&q]
                )));
            }
            match frames.get(&r) {
                Some(old) => {
                    let d = projective_distance(old, &g);
                    if d.is_finite() {
                        closure = closure.max(d / old.norm().max(1.0));
                    } else {
                        closure = f64::INFINITY;
                    }
                }
                None => {
                    frames.insert(r, g);
                    via.insert(r, format!("{}{label} ", via[&q]));
                    queue.push_back(r);
                }
            }
        }
    }
    let mut positions = BTreeMap::new();
    for (&q, f) in &frames {
        positions.entry(q.0).or_insert_with(|| Pt { a: f[(1, 1)], b: -f[(1, 0)] }.normalized());
    }
    Ok(DevelopedCell { cell, base, frames, positions, closure_defect: closure })
}

/// Develops every cell from its least corner.
pub fn develop(c: &PeripheralComplex, x: &[C64]) -> Result<Vec<DevelopedCell>> {
    c.cells
        .iter()
        .enumerate()
        .map(|(i, cell)| {
            let p = *cell.polygons.iter().min().ok_or_else(|| Error::Degenerate(format!("cell {i} is empty")))?;
            develop_cell(c, x, i, (p, 0))
        })
        .collect()
}

impl DevelopedCell {
    /// Crossing labels recomputed from the frames at the two ends of every
    /// arc copy in the cell, keyed by arc.
    pub fn recovered_w(&self, c: &PeripheralComplex) -> Vec<(usize, C64)> {
        let mut out = Vec::new();
        for (&q, fq) in &self.frames {
            let (r, arc) = c.arc_partner[&q];
            if let Some(fr) = self.frames.get(&r) {
                let j = fr * mobius::adjugate(fq);
                out.push((arc, j[(0, 1)] / j[(1, 0)]));
            }
        }
        out
    }

    /// Edge labels recomputed from consecutive frames, keyed by pedge.
    pub fn recovered_u(&self, c: &PeripheralComplex) -> Vec<(usize, C64)> {
        let mut out = Vec::new();
        for (&q, fq) in &self.frames {
            let len = c.polygons[q.0].sides.len();
            if let Some(fr) = self.frames.get(&(q.0, (q.1 + 1) % len)) {
                let t = fr * mobius::adjugate(fq);
                let ut = -t[(0, 1)] / t[(0, 0)];
                let (e, fw) = c.polygons[q.0].sides[q.1];
                out.push((e, if fw { ut } else { -ut }));
            }
        }
        out
    }

    /// Vertex of the polygon at a corner.
    pub fn position(&self, polygon: usize) -> Option<Pt> {
        self.positions.get(&polygon).copied()
    }
}
