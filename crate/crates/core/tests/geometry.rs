mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tt_core::complex::FaceKind;
use tt_core::geometry::{self, Verdict};
use tt_core::mobius::{self, Pt};
use tt_core::C64;

#[test]
fn developing_puts_base_at_infinity_and_partner_at_zero() {
    let s = solved("square_weave");
    let cx = &s.p.complex;
    let x = &s.nondegenerate()[0];
    for cell in geometry::develop(cx, x).unwrap() {
        let base = cell.position(cell.base.0).unwrap();
        assert!(base.to_complex(1e-12).is_none());
        let ((partner, _), _) = cx.arc_partner[&cell.base];
        let z = cell.position(partner).unwrap().to_complex(1e-12).unwrap();
        assert!(z.norm() < 1e-12);
    }
}

#[test]
fn developed_frames_close_up_on_roots() {
    for name in ["square_weave", "borromean_fal", "trefoil"] {
        let s = solved(name);
        for x in s.nondegenerate() {
            for cell in geometry::develop(&s.p.complex, &x).unwrap() {
                assert!(cell.closure_defect < 1e-9, "{name}: {}", cell.closure_defect);
            }
        }
    }
}

#[test]
fn developed_labels_are_recovered() {
    let s = solved("square_weave");
    let cx = &s.p.complex;
    let na = cx.arcs.len();
    for x in s.nondegenerate() {
        for cell in geometry::develop(cx, &x).unwrap() {
            for (a, w) in cell.recovered_w(cx) {
                assert!(close(w, x[a], 1e-10));
            }
            for (e, u) in cell.recovered_u(cx) {
                assert!(close(u, x[na + e], 1e-10));
            }
        }
    }
}

#[test]
fn region_vertices_are_concyclic() {
    // four points lie on one circle exactly when their cross ratio is real
    let s = solved("square_weave");
    let cx = &s.p.complex;
    for x in s.nondegenerate() {
        let cells = geometry::develop(cx, &x).unwrap();
        let mut checked = 0;
        for (k, cell) in cx.cells.iter().enumerate() {
            for side in &cell.faces {
                let face = &cx.faces[side.face];
                if face.kind != FaceKind::Region {
                    continue;
                }
                let pts: Vec<Pt> = face
                    .corners
                    .iter()
                    .map(|&(e, d)| cells[k].position(cx.polygon_of(e, if side.a_side { !d } else { d }).0).unwrap())
                    .collect();
                assert_eq!(pts.len(), 4);
                let cr = mobius::cross_ratio([pts[0], pts[1], pts[2], pts[3]]);
                assert!(cr.im.abs() < 1e-9 * cr.norm().max(1.0), "{}: {cr}", face.id);
                checked += 1;
            }
        }
        assert_eq!(checked, 8);
    }
}

#[test]
fn boundary_words_are_trivial_on_roots() {
    for name in ["square_weave", "trefoil", "borromean_fal", "stacked_octahedron_fal"] {
        let s = solved(name);
        for x in s.nondegenerate() {
            let r = s.p.system.evaluate(&x);
            assert!(r.max_word < 1e-9, "{name}: {}", r.max_word);
            for w in &s.p.system.words {
                assert!(geometry::projective_defect(&geometry::word_matrix(&x, &w.tokens)) < 1e-9);
            }
        }
    }
}

#[test]
fn perturbed_labels_break_the_gluing() {
    let s = solved("square_weave");
    let cx = &s.p.complex;
    let tri = geometry::triangulate(cx).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut x = s.nondegenerate()[0].clone();
    for z in x.iter_mut() {
        *z += c(rng.random_range(-1e-3..1e-3), rng.random_range(-1e-3..1e-3));
    }
    assert!(s.p.system.evaluate(&x).max_word > 1e-5);
    let cells = geometry::develop(cx, &x).unwrap();
    assert!(cells.iter().any(|d| d.closure_defect > 1e-6));
    let pg = geometry::induced_geometry(&tri, &cells).unwrap();
    assert!(!geometry::check_weak_gluing(&pg, 1e-8).passed);
}

#[test]
fn square_weave_orientations() {
    let s = solved("square_weave");
    let cx = &s.p.complex;
    let tri = geometry::triangulate(cx).unwrap();
    let mut verdicts = Vec::new();
    for x in s.nondegenerate() {
        let pg = geometry::induced_geometry(&tri, &geometry::develop(cx, &x).unwrap()).unwrap();
        assert!(geometry::check_weak_gluing(&pg, 1e-8).passed);
        let o = geometry::is_geometric_by_orientation(&pg);
        if o.verdict == Verdict::Geometric {
            assert!(geometry::check_strong_gluing(&pg, 1e-8).passed);
        }
        verdicts.push((s.label(&x, "w:g:c1").im > 0.0, o.verdict));
    }
    verdicts.sort_by_key(|v| v.0);
    assert_eq!(verdicts, vec![(false, Verdict::Geometric), (true, Verdict::GeometricReversed)]);
}

#[test]
fn shapes_obey_the_triple_relation() {
    let s = solved("borromean_fal");
    let tri = geometry::triangulate(&s.p.complex).unwrap();
    let one = c(1.0, 0.0);
    for x in s.nondegenerate() {
        let pg = geometry::induced_geometry(&tri, &geometry::develop(&s.p.complex, &x).unwrap()).unwrap();
        for p in &pg.points {
            let z = geometry::shape_at(*p, 0, 1);
            let z1 = one / (one - z);
            let z2 = one - one / z;
            assert!(close(z * z1 * z2, -one, 1e-9));
        }
    }
}

#[test]
fn polygon_sides_sum_to_zero() {
    let s = solved("square_weave");
    let cx = &s.p.complex;
    for x in s.nondegenerate() {
        for l in &cx.polygons {
            let sum = geometry::word_sum(cx, &x, &l.sides).unwrap();
            assert!(sum.norm() < 1e-10);
        }
    }
}

#[test]
fn cusp_shapes_from_walks() {
    let s = solved("square_weave");
    let (cx, sys) = (&s.p.complex, &s.p.system);
    for x in s.nondegenerate() {
        for t in 0..cx.tori.len() {
            let m = cx.find_walk(t, cx.meridian[t]).unwrap();
            let l = cx.find_walk(t, cx.longitude_class(t)).unwrap();
            let shape = geometry::cusp_shape(cx, &x, &l, &m).unwrap();
            assert!(close(shape, sys.cusp_shape(&x, t), 1e-10));
            assert!(shape.im.abs() > 1e-3);

            // a homologous longitude: go round a polygon at the start first
            let start = if l[0].1 { cx.pedges[l[0].0].tail } else { cx.pedges[l[0].0].head };
            let poly = cx
                .polygons
                .iter()
                .enumerate()
                .find_map(|(i, p)| (0..p.sides.len()).find(|&j| cx.corner_point((i, j)) == start).map(|j| (i, j)))
                .unwrap();
            let sides = &cx.polygons[poly.0].sides;
            let mut longer: Vec<(usize, bool)> = (0..sides.len()).map(|k| sides[(poly.1 + k) % sides.len()]).collect();
            longer.extend(&l);
            assert!(close(geometry::cusp_shape(cx, &x, &longer, &m).unwrap(), shape, 1e-10));
        }
    }
}

#[test]
fn word_sum_rejects_open_and_foreign_walks() {
    let s = solved("square_weave");
    let cx = &s.p.complex;
    let x = &s.nondegenerate()[0];
    let walk = cx.find_walk(0, cx.meridian[0]).unwrap();
    if walk.len() > 1 {
        assert!(geometry::word_sum(cx, x, &walk[..1]).is_err());
    }
    assert!(geometry::word_sum(cx, x, &[]).is_err());
    assert!(geometry::word_sum(cx, x, &[(cx.pedges.len(), true)]).is_err());
}

#[test]
fn word_sum_is_the_signed_label_sum() {
    let s = solved("square_weave");
    let cx = &s.p.complex;
    let x = &s.nondegenerate()[0];
    let na = cx.arcs.len();
    for t in 0..cx.tori.len() {
        let walk = cx.find_walk(t, cx.longitude_class(t)).unwrap();
        let by_hand: C64 = walk.iter().map(|&(e, fw)| if fw { x[na + e] } else { -x[na + e] }).sum();
        assert_eq!(geometry::word_sum(cx, x, &walk).unwrap(), by_hand);
        let back: Vec<(usize, bool)> = walk.iter().rev().map(|&(e, fw)| (e, !fw)).collect();
        assert!(close(geometry::word_sum(cx, x, &back).unwrap(), -by_hand, 1e-15));
    }
}

#[test]
fn mobius_maps_preserve_cross_ratios() {
    let pts = [c(0.3, 0.1), c(-1.0, 2.0), c(2.5, -0.4), c(0.0, -1.5)].map(Pt::finite);
    let m = mobius::from_three([pts[0], pts[1], pts[2]], [Pt::INF, Pt::finite(c(0.0, 0.0)), Pt::finite(c(1.0, 0.0))]);
    let moved = pts.map(|p| mobius::apply(&m, p));
    assert!(close(mobius::cross_ratio(pts), mobius::cross_ratio(moved), 1e-12));
    assert!(moved[0].to_complex(1e-12).is_none());
}
