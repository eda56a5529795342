#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use tt_core::diagram::{self, Diagram, FalDiagram};
use tt_core::report::Pipeline;
use tt_core::solver::{solve_all, SolutionSet, SolverConfig};
use tt_core::C64;

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

pub fn pipeline(name: &str) -> Pipeline {
    Pipeline::new(diagram::parse_str(&fixture_text(name)).unwrap()).unwrap()
}

pub struct Solved {
    pub p: Pipeline,
    pub set: SolutionSet,
}

impl Solved {
    pub fn roots(&self) -> Vec<Vec<C64>> {
        self.set.solutions.iter().map(|r| r.x.clone()).collect()
    }

    pub fn nondegenerate(&self) -> Vec<Vec<C64>> {
        self.set.nondegenerate().map(|r| r.x.clone()).collect()
    }

    pub fn fal(&self) -> &FalDiagram {
        match &self.p.parsed.diagram {
            Diagram::Fal(d) => d,
            Diagram::Link(_) => panic!("not a fully augmented link"),
        }
    }

    pub fn label(&self, x: &[C64], id: &str) -> C64 {
        x[self.p.system.var_index(id).unwrap_or_else(|| panic!("no label {id}"))]
    }
}

/// Each fixture is solved once per test binary with the default settings.
pub fn solved(name: &str) -> Arc<Solved> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<Solved>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().unwrap().get(name) {
        return s.clone();
    }
    let p = pipeline(name);
    let set = solve_all(&p.system, &SolverConfig::default()).unwrap();
    let s = Arc::new(Solved { p, set });
    cache.lock().unwrap().entry(name.to_string()).or_insert(s).clone()
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol
}
