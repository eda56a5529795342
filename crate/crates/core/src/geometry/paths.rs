//! Paths in the 2-skeleton and homotopies between them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex::PeripheralComplex;
use crate::equations::Token;
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    /// Peripheral edge, forward when run tail to head.
    Edge(usize, bool),
    /// Arc, forward when run from its first end to its second.
    Arc(usize, bool),
}

impl Step {
    pub fn reversed(self) -> Step {
        match self {
            Step::Edge(e, f) => Step::Edge(e, !f),
            Step::Arc(a, f) => Step::Arc(a, !f),
        }
    }

    pub fn ends(self, c: &PeripheralComplex) -> (usize, usize) {
        match self {
            Step::Edge(e, f) => {
                let p = &c.pedges[e];
                if f {
                    (p.tail, p.head)
                } else {
                    (p.head, p.tail)
                }
            }
            Step::Arc(a, f) => {
                let [s, t] = c.arcs[a].ends;
                if f {
                    (s, t)
                } else {
                    (t, s)
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub start: usize,
    pub steps: Vec<Step>,
}

impl Path {
    /// Point reached after the first `k` steps.
    pub fn point_at(&self, c: &PeripheralComplex, k: usize) -> usize {
        self.steps[..k].last().map_or(self.start, |s| s.ends(c).1)
    }

    pub fn end(&self, c: &PeripheralComplex) -> usize {
        self.point_at(c, self.steps.len())
    }

    pub fn validate(&self, c: &PeripheralComplex) -> Result<()> {
        let mut at = self.start;
        for (i, s) in self.steps.iter().enumerate() {
            let (a, b) = s.ends(c);
            if a != at {
                return Err(invalid("path", format!("step {i} does not start where step {} ended", i.saturating_sub(1))));
            }
            at = b;
        }
        Ok(())
    }

    pub fn tokens(&self, c: &PeripheralComplex) -> Vec<Token> {
        let na = c.arcs.len();
        self.steps
            .iter()
            .map(|s| match *s {
                Step::Edge(e, f) => Token::U { var: na + e, forward: f },
                Step::Arc(a, _) => Token::W { var: a },
            })
            .collect()
    }
}

/// Null-homotopic loops based at `p`: face boundaries, link polygon
/// boundaries and backtracks, each in both directions.
pub fn relations_at(c: &PeripheralComplex, p: usize) -> Vec<Vec<Step>> {
    let mut out = Vec::new();
    let mut push_both = |lp: Vec<Step>| {
        let rev: Vec<Step> = lp.iter().rev().map(|s| s.reversed()).collect();
        out.push(lp);
        out.push(rev);
    };
    for f in &c.faces {
        let mut cyc = Vec::with_capacity(2 * f.corners.len());
        for i in 0..f.corners.len() {
            cyc.push(Step::Edge(f.corners[i].0, f.corners[i].1));
            cyc.push(Step::Arc(f.sides[i].0, f.sides[i].1));
        }
        for k in 0..cyc.len() {
            if cyc[k].ends(c).0 == p {
                let mut lp = cyc[k..].to_vec();
                lp.extend_from_slice(&cyc[..k]);
                push_both(lp);
            }
        }
    }
    for poly in &c.polygons {
        let cyc: Vec<Step> = poly.sides.iter().map(|&(e, f)| Step::Edge(e, f)).collect();
        for k in 0..cyc.len() {
            if cyc[k].ends(c).0 == p {
                let mut lp = cyc[k..].to_vec();
                lp.extend_from_slice(&cyc[..k]);
                push_both(lp);
            }
        }
    }
    for d in &c.rotation[p] {
        let s = Step::Edge(d.edge, d.end == 0);
        push_both(vec![s, s.reversed()]);
    }
    let a = c.point_arc[p];
    let s = Step::Arc(a, c.arcs[a].ends[0] == p);
    push_both(vec![s, s.reversed()]);
    out
}

/// Random path starting and ending with an arc, with `len` steps in between.
pub fn random_arc_path<R: Rng>(c: &PeripheralComplex, rng: &mut R, len: usize) -> Path {
    let start = rng.random_range(0..c.points.len());
    let a = c.point_arc[start];
    let mut steps = vec![Step::Arc(a, c.arcs[a].ends[0] == start)];
    let mut at = steps[0].ends(c).1;
    for _ in 0..len {
        let s = if rng.random_bool(0.5) {
            let a = c.point_arc[at];
            Step::Arc(a, c.arcs[a].ends[0] == at)
        } else {
            let d = c.rotation[at][rng.random_range(0..c.rotation[at].len())];
            Step::Edge(d.edge, d.end == 0)
        };
        at = s.ends(c).1;
        steps.push(s);
    }
    let a = c.point_arc[at];
    steps.push(Step::Arc(a, c.arcs[a].ends[0] == at));
    Path { start, steps }
}

/// Inserts a random null-homotopic loop, or cancels a backtrack, strictly
/// inside the path so that its first and last steps are kept.
pub fn random_rewrite<R: Rng>(c: &PeripheralComplex, path: &Path, rng: &mut R) -> Path {
    let n = path.steps.len();
    let mut out = path.clone();
    if n >= 4 && rng.random_bool(0.25) {
        let cands: Vec<usize> = (1..n - 2).filter(|&k| path.steps[k + 1] == path.steps[k].reversed()).collect();
        if !cands.is_empty() {
            let k = cands[rng.random_range(0..cands.len())];
            out.steps.drain(k..k + 2);
            return out;
        }
    }
    let k = rng.random_range(1..n.max(2));
    let p = path.point_at(c, k);
    let rels = relations_at(c, p);
    let lp = &rels[rng.random_range(0..rels.len())];
    out.steps.splice(k..k, lp.iter().copied());
    out
}
