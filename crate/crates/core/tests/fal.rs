mod common;

use std::collections::BTreeSet;

use common::*;
use tt_core::fal::{self, UnivalenceVerdict};
use tt_core::geometry::{self, Verdict};
use tt_core::mobius::chordal;

fn geometric_root(name: &str) -> (std::sync::Arc<Solved>, Vec<tt_core::C64>) {
    let s = solved(name);
    let x = s
        .nondegenerate()
        .into_iter()
        .find(|x| fal::is_geometric_fal(&s.p.complex, s.fal(), x, fal::FAL_TOL).unwrap().geometric)
        .expect("a root passing the label criteria");
    (s, x)
}

#[test]
fn borromean_region_graph_is_a_tetrahedron() {
    let p = pipeline("borromean_fal");
    let rg = fal::region_graph(&p.complex).unwrap();
    assert_eq!(rg.faces.len(), 4);
    assert_eq!(rg.edges.len(), 6);
    let pairs: BTreeSet<[usize; 2]> = rg.edges.iter().map(|e| [e.ends[0].min(e.ends[1]), e.ends[0].max(e.ends[1])]).collect();
    assert_eq!(pairs.len(), 6);
    assert!(rg.around.iter().all(|a| a.len() == 3));
    let circles = rg.edges.iter().filter(|e| e.id.starts_with("circle:")).count();
    assert_eq!(circles, 2);
}

#[test]
fn region_graphs_are_planar_triangulations_of_the_bowties() {
    for name in ["borromean_fal", "stacked_octahedron_fal"] {
        let s = solved(name);
        let rg = fal::region_graph(&s.p.complex).unwrap();
        let (v, e) = (rg.faces.len() as i64, rg.edges.len() as i64);
        let f = 2 * s.fal().circles.len() as i64;
        assert_eq!(v - e + f, 2, "{name}");
        assert_eq!(rg.around.iter().map(Vec::len).sum::<usize>(), 2 * rg.edges.len());
        for (k, re) in rg.edges.iter().enumerate() {
            for end in re.ends {
                assert!(rg.around[end].contains(&k));
            }
        }
    }
}

#[test]
fn borromean_has_one_root_passing_the_label_criteria() {
    let s = solved("borromean_fal");
    let roots = s.nondegenerate();
    assert_eq!(roots.len(), 2);
    let verdicts: Vec<_> = roots.iter().map(|x| fal::is_geometric_fal(&s.p.complex, s.fal(), x, fal::FAL_TOL).unwrap()).collect();
    assert_eq!(verdicts.iter().filter(|v| v.geometric).count(), 1);
    let bad = verdicts.iter().find(|v| !v.geometric).unwrap();
    assert!(bad.pure_imaginary.passed);
    assert!(!bad.orientation.passed || !bad.shape_range.passed);
    assert!(bad.orientation.offenders.iter().chain(&bad.shape_range.offenders).all(|o| !o.reason.is_empty()));
}

#[test]
fn label_criteria_agree_with_the_orientation_of_the_triangulation() {
    let s = solved("borromean_fal");
    let tri = geometry::triangulate(&s.p.complex).unwrap();
    for x in s.nondegenerate() {
        let pass = fal::is_geometric_fal(&s.p.complex, s.fal(), &x, fal::FAL_TOL).unwrap().geometric;
        let pg = geometry::induced_geometry(&tri, &geometry::develop(&s.p.complex, &x).unwrap()).unwrap();
        let o = geometry::is_geometric_by_orientation(&pg).verdict;
        assert_eq!(pass, o == Verdict::Geometric, "{o:?}");
    }
}

#[test]
fn borromean_cusps_have_shape_2i() {
    let (s, x) = geometric_root("borromean_fal");
    for t in 0..s.p.complex.tori.len() {
        assert!(close(s.p.system.cusp_shape(&x, t), c(0.0, 2.0), 1e-9));
    }
}

#[test]
fn borromean_packing_is_four_mutually_tangent_circles() {
    let (s, x) = geometric_root("borromean_fal");
    let pf = fal::solution_to_packing(&s.p.complex, &x).unwrap();
    assert!(pf.fit_residual < 1e-8 && pf.tangency_residual < 1e-8);
    let p = &pf.packing;
    assert_eq!(p.circles.len(), 4);
    for a in 0..4 {
        for b in a + 1..4 {
            assert!((p.circles[a].inversive(&p.circles[b]).abs() - 1.0).abs() < 1e-8);
        }
    }
    // distinct tangency points, each on both of its circles
    for (i, e) in p.edges.iter().enumerate() {
        for f in &p.edges[i + 1..] {
            assert!(chordal(e.point, f.point) > 1e-3);
        }
        for v in e.ends {
            let circ = p.circles[v].normalized();
            assert!(circ.form(e.point.normalized()).abs() < 1e-8);
        }
    }
    assert_eq!(fal::check_univalence(p, 1e-8).verdict, UnivalenceVerdict::Univalent);
}

#[test]
fn packing_round_trip() {
    for name in ["borromean_fal", "stacked_octahedron_fal"] {
        let (s, x) = geometric_root(name);
        let pf = fal::solution_to_packing(&s.p.complex, &x).unwrap();
        let back = fal::packing_to_solution(&s.p.complex, s.fal(), &pf.packing).unwrap();
        assert!(back.iter().zip(&x).all(|(a, b)| close(*a, *b, 1e-8)), "{name}");
        let again = fal::solution_to_packing(&s.p.complex, &back).unwrap();
        for (a, b) in pf.packing.edges.iter().zip(&again.packing.edges) {
            assert!(chordal(a.point, b.point) < 1e-8);
        }
    }
}

#[test]
fn packing_must_cover_every_tangency() {
    let (s, x) = geometric_root("borromean_fal");
    let mut p = fal::solution_to_packing(&s.p.complex, &x).unwrap().packing;
    p.edges.pop();
    assert!(fal::packing_to_solution(&s.p.complex, s.fal(), &p).is_err());
}

#[test]
fn stacked_octahedron_roots() {
    let s = solved("stacked_octahedron_fal");
    let report = s.p.classify(&s.roots(), fal::FAL_TOL);
    assert_eq!(report.geometric.len(), 1);
    let g = &report.solutions[report.geometric[0]];
    assert_eq!(g.packing.as_ref().unwrap().univalence.verdict, UnivalenceVerdict::Univalent);
    let flagged: Vec<_> = report
        .solutions
        .iter()
        .filter_map(|r| r.packing.as_ref())
        .filter(|p| p.univalence.verdict == UnivalenceVerdict::LocallyUnivalentNotUnivalent)
        .collect();
    assert!(!flagged.is_empty());
    for p in flagged {
        assert!(p.univalence.fillings.iter().any(|f| f.locally_univalent && !f.univalent));
        assert_eq!(p.verdict, "locally univalent but not univalent");
    }
}

#[test]
fn geometric_fal_roots_are_geometric_in_the_report() {
    for name in ["borromean_fal", "stacked_octahedron_fal"] {
        let s = solved(name);
        let report = s.p.classify(&s.roots(), fal::FAL_TOL);
        for r in &report.solutions {
            let fal_pass = r.fal.as_ref().is_some_and(|v| v.geometric);
            assert_eq!(r.geometric, fal_pass && !r.degenerate, "{name} root {}", r.index);
            if r.degenerate {
                assert!(r.fal.is_none() && r.packing.is_none());
            }
        }
    }
}

#[test]
fn wrong_length_solutions_are_rejected() {
    let s = solved("borromean_fal");
    let x = &s.nondegenerate()[0];
    assert!(fal::is_geometric_fal(&s.p.complex, s.fal(), &x[1..], fal::FAL_TOL).is_err());
}
