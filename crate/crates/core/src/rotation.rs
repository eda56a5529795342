//! Rotation systems of embedded graphs and their face tracing.

use serde::{Deserialize, Serialize};

/// Half of an edge: `end` 0 sits at the tail, 1 at the head.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dart {
    pub edge: usize,
    pub end: u8,
}

impl Dart {
    pub fn twin(self) -> Dart {
        Dart { edge: self.edge, end: 1 - self.end }
    }
}

/// Counterclockwise cyclic order of darts around each vertex.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RotationSystem {
    pub rot: Vec<Vec<Dart>>,
}

/// A face boundary as (edge, traversed tail to head) steps, counterclockwise.
pub type FaceWalk = Vec<(usize, bool)>;

impl RotationSystem {
    pub fn new(n_vertices: usize) -> Self {
        RotationSystem { rot: vec![Vec::new(); n_vertices] }
    }

    pub fn n_edges(&self) -> usize {
        self.rot.iter().map(Vec::len).sum::<usize>() / 2
    }

    fn locate(&self) -> std::collections::HashMap<Dart, (usize, usize)> {
        let mut at = std::collections::HashMap::new();
        for (v, ds) in self.rot.iter().enumerate() {
            for (i, d) in ds.iter().enumerate() {
                at.insert(*d, (v, i));
            }
        }
        at
    }

    /// Checks that every edge has exactly its two darts placed.
    pub fn check(&self) -> Result<(), String> {
        let at = self.locate();
        let total: usize = self.rot.iter().map(Vec::len).sum();
        if at.len() != total {
            return Err("a dart appears twice".into());
        }
        for d in at.keys() {
            if !at.contains_key(&d.twin()) {
                return Err(format!("edge {} has a single end", d.edge));
            }
        }
        Ok(())
    }

    /// Traces faces keeping each face on the left: after arriving at a
    /// vertex through dart d, leave through the dart clockwise from d.
    pub fn faces(&self) -> Vec<FaceWalk> {
        let at = self.locate();
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        let mut starts: Vec<Dart> = at.keys().copied().collect();
        starts.sort();
        for s in starts {
            if seen.contains(&s) {
                continue;
            }
            let mut walk = Vec::new();
            let mut d = s;
            loop {
                seen.insert(d);
                walk.push((d.edge, d.end == 0));
                let (v, i) = at[&d.twin()];
                let k = self.rot[v].len();
                d = self.rot[v][(i + k - 1) % k];
                if d == s {
                    break;
                }
            }
            out.push(walk);
        }
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.rot.len() as i64 - self.n_edges() as i64 + self.faces().len() as i64
    }

    /// Connectivity of the underlying graph.
    pub fn is_connected(&self, edge_ends: &[(usize, usize)]) -> bool {
        let n = self.rot.len();
        if n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edge_ends {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }
}

/// Rotates a cyclic sequence so that its least element comes first.
pub fn canonical_rotation<T: Ord + Clone>(seq: &[T]) -> Vec<T> {
    if seq.is_empty() {
        return Vec::new();
    }
    let n = seq.len();
    let best = (0..n)
        .min_by(|&a, &b| {
            let ra = seq[a..].iter().chain(seq[..a].iter());
            let rb = seq[b..].iter().chain(seq[..b].iter());
            ra.cmp(rb)
        })
        .unwrap_or(0);
    seq[best..].iter().chain(seq[..best].iter()).cloned().collect()
}
