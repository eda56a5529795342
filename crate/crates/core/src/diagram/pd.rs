//! Planar diagram codes: X[a, b, c, d] lists the edge labels around a
//! crossing counterclockwise, starting from the incoming under strand.

use std::collections::BTreeMap;

use super::{CrossingInput, EdgeInput};
use crate::error::{invalid, Result};

pub(super) fn expand(pd: &[[i64; 4]]) -> Result<(Vec<CrossingInput>, Vec<EdgeInput>)> {
    if pd.is_empty() {
        return Err(invalid("pd", "empty pd code"));
    }
    let mut ends: BTreeMap<i64, Vec<(usize, u8)>> = BTreeMap::new();
    for (c, x) in pd.iter().enumerate() {
        for (s, &l) in x.iter().enumerate() {
            ends.entry(l).or_default().push((c, s as u8));
        }
    }
    for (l, e) in &ends {
        if e.len() != 2 {
            return Err(invalid(format!("pd label {l}"), format!("appears {} times, expected 2", e.len())));
        }
    }
    // orientation of each end: Some(true) = edge arrives here
    let mut arrives: BTreeMap<(usize, u8), bool> = BTreeMap::new();
    for (c, _) in pd.iter().enumerate() {
        arrives.insert((c, 0), true);
        arrives.insert((c, 2), false);
    }
    let labels: Vec<i64> = ends.keys().copied().collect();
    loop {
        let mut changed = false;
        for l in &labels {
            let e = &ends[l];
            match (arrives.get(&e[0]).copied(), arrives.get(&e[1]).copied()) {
                (Some(a), None) => {
                    arrives.insert(e[1], !a);
                    changed = true;
                }
                (None, Some(b)) => {
                    arrives.insert(e[0], !b);
                    changed = true;
                }
                (Some(a), Some(b)) if a == b => {
                    return Err(invalid(format!("pd label {l}"), "inconsistent strand orientation"));
                }
                _ => {}
            }
        }
        for c in 0..pd.len() {
            match (arrives.get(&(c, 1)).copied(), arrives.get(&(c, 3)).copied()) {
                (Some(a), None) => {
                    arrives.insert((c, 3), !a);
                    changed = true;
                }
                (None, Some(b)) => {
                    arrives.insert((c, 1), !b);
                    changed = true;
                }
                (Some(a), Some(b)) if a == b => {
                    return Err(invalid(format!("c{}", c + 1), "over strand does not pass through"));
                }
                _ => {}
            }
        }
        if !changed {
            let open = (0..pd.len()).find(|c| !arrives.contains_key(&(*c, 1)));
            match open {
                None => break,
                Some(c) => {
                    // over-only component: follow label order
                    let (b, d) = (pd[c][1], pd[c][3]);
                    arrives.insert((c, 1), d != b + 1);
                }
            }
        }
    }
    let crossings = (0..pd.len()).map(|c| CrossingInput { id: format!("c{}", c + 1), over: Some([1, 3]), sign: None }).collect();
    let mut edges = Vec::new();
    for (l, e) in &ends {
        let (tail, head) = if arrives[&e[0]] { (e[1], e[0]) } else { (e[0], e[1]) };
        edges.push(EdgeInput {
            id: format!("e{l}"),
            from: (format!("c{}", tail.0 + 1), tail.1),
            to: (format!("c{}", head.0 + 1), head.1),
            shift: None,
        });
    }
    Ok((crossings, edges))
}
