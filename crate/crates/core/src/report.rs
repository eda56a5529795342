//! Per-root classification: gluing, orientation, cusp shapes and, for fully
//! augmented links, the label criteria and packing univalence.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::complex::PeripheralComplex;
use crate::diagram::{Ambient, Diagram, Parsed};
use crate::equations::{labels_map, EquationSystem};
use crate::error::Result;
use crate::fal::{self, FalVerdict, UnivalenceReport};
use crate::geometry::{self, OrientationReport, StrongReport, Triangulation, Verdict, WeakReport};
use crate::solver;
use crate::C64;

#[derive(Clone, Debug, Serialize)]
pub struct PackingSummary {
    pub fit_residual: f64,
    pub tangency_residual: f64,
    pub univalence: UnivalenceReport,
    pub verdict: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionReport {
    pub index: usize,
    pub residual: f64,
    pub word_defect: f64,
    pub degenerate: bool,
    pub labels: BTreeMap<String, C64>,
    pub cusp_shapes: BTreeMap<String, C64>,
    pub weak_gluing: Option<WeakReport>,
    pub strong_gluing: Option<StrongReport>,
    pub orientation: Option<OrientationReport>,
    pub fal: Option<FalVerdict>,
    pub packing: Option<PackingSummary>,
    pub geometric: bool,
    pub problems: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub diagram: String,
    pub tolerance: f64,
    pub tetrahedra: usize,
    pub triangulation_notes: Vec<String>,
    pub solutions: Vec<SolutionReport>,
    /// Indices of the roots judged geometric.
    pub geometric: Vec<usize>,
}

/// Everything derived from a diagram that classification needs.
pub struct Pipeline {
    pub parsed: Parsed,
    pub complex: PeripheralComplex,
    pub system: EquationSystem,
}

impl Pipeline {
    pub fn new(parsed: Parsed) -> Result<Pipeline> {
        let complex = PeripheralComplex::from_parsed(&parsed)?;
        let system = EquationSystem::build(&complex)?;
        Ok(Pipeline { parsed, complex, system })
    }

    pub fn is_fal(&self) -> bool {
        matches!(self.parsed.diagram, Diagram::Fal(_))
    }

    /// Root `index` with labels `x`.
    pub fn classify_root(&self, tri: Option<&Triangulation>, index: usize, x: &[C64], tol: f64) -> SolutionReport {
        let c = &self.complex;
        let res = self.system.evaluate(x);
        let degenerate = solver::is_degenerate(&self.system, x);
        let mut problems = Vec::new();
        let cusp_shapes = self
            .system
            .cusps
            .iter()
            .enumerate()
            .map(|(t, cu)| (cu.id.clone(), self.system.cusp_shape(x, t)))
            .collect();

        let (mut weak, mut strong, mut orientation) = (None, None, None);
        if let Some(tri) = tri {
            match geometry::develop(c, x).and_then(|d| geometry::induced_geometry(tri, &d)) {
                Ok(pg) => {
                    weak = Some(geometry::check_weak_gluing(&pg, tol));
                    strong = Some(geometry::check_strong_gluing(&pg, tol));
                    orientation = Some(geometry::is_geometric_by_orientation(&pg));
                }
                Err(e) => problems.push(format!("developing failed: {e}")),
            }
        }

        let mut fal_verdict = None;
        let mut packing = None;
        if let Diagram::Fal(d) = &self.parsed.diagram {
            if d.ambient == Ambient::S3 && !degenerate {
                match fal::is_geometric_fal(c, d, x, tol) {
                    Ok(v) => fal_verdict = Some(v),
                    Err(e) => problems.push(format!("fal criteria: {e}")),
                }
                match fal::solution_to_packing(c, x) {
                    Ok(pf) => {
                        let univalence = fal::check_univalence(&pf.packing, tol);
                        packing = Some(PackingSummary {
                            fit_residual: pf.fit_residual,
                            tangency_residual: pf.tangency_residual,
                            verdict: univalence.verdict.to_string(),
                            univalence,
                        });
                    }
                    Err(e) => problems.push(format!("packing: {e}")),
                }
            }
        }

        let geometric = !degenerate
            && match &fal_verdict {
                Some(v) => v.geometric,
                None => {
                    orientation.as_ref().is_some_and(|o| o.verdict == Verdict::Geometric)
                        && strong.as_ref().is_some_and(|s| s.passed)
                        && weak.as_ref().is_some_and(|w| w.passed)
                }
            };
        SolutionReport {
            index,
            residual: res.max_eq,
            word_defect: res.max_word,
            degenerate,
            labels: labels_map(&self.system, x),
            cusp_shapes,
            weak_gluing: weak,
            strong_gluing: strong,
            orientation,
            fal: fal_verdict,
            packing,
            geometric,
            problems,
        }
    }

    pub fn classify(&self, roots: &[Vec<C64>], tol: f64) -> ClassifyReport {
        let (tri, mut notes) = match geometry::triangulate(&self.complex) {
            Ok(t) => {
                let n = t.notes.clone();
                (Some(t), n)
            }
            Err(e) => (None, vec![format!("no triangulation: {e}")]),
        };
        let solutions: Vec<SolutionReport> =
            roots.iter().enumerate().map(|(i, x)| self.classify_root(tri.as_ref(), i, x, tol)).collect();
        if tri.as_ref().is_some_and(|t| t.tets.is_empty()) {
            notes.push("the polyhedra are flat; there are no tetrahedra".into());
        }
        ClassifyReport {
            diagram: self.parsed.name.clone(),
            tolerance: tol,
            tetrahedra: tri.as_ref().map_or(0, |t| t.tets.len()),
            triangulation_notes: notes,
            geometric: solutions.iter().filter(|s| s.geometric).map(|s| s.index).collect(),
            solutions,
        }
    }
}
