mod common;

use std::collections::BTreeMap;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tt_core::complex::FaceKind;
use tt_core::equations::{gauge_rescale, EqKind, EquationSystem};
use tt_core::poly::{region_equations, region_poly, region_poly_closed, zeta_matrix_product, Poly, ZetaPoly};
use tt_core::C64;

fn zp(terms: &[(&[usize], i64)]) -> ZetaPoly {
    ZetaPoly { terms: terms.iter().map(|(k, v)| (k.to_vec(), *v)).collect::<BTreeMap<_, _>>() }
}

/// Constant term of a linear equation a·u − b·u′ + k = 0, as the right side −k.
fn rhs(p: &Poly) -> C64 {
    -p.terms.iter().find(|(_, m)| m.is_empty()).map_or(C64::new(0.0, 0.0), |t| t.0)
}

#[test]
fn small_region_polynomials() {
    assert_eq!(region_poly(3), zp(&[(&[], 1), (&[2], -1)]));
    assert_eq!(region_poly(4), zp(&[(&[2], 1), (&[3], 1), (&[], -1)]));
    // by hand: f_5 = −(f_4 + ζ_4 f_3)
    let f5 = zp(&[(&[], 1), (&[2], -1), (&[3], -1), (&[4], -1), (&[2, 4], 1)]);
    assert_eq!(region_poly(5), f5);
    assert_eq!(region_poly_closed(5), f5);
}

#[test]
fn symmetric_square_region() {
    // all ζ equal: f_4 = 2ζ − 1, so ζ = 1/2 is forced
    let f4 = region_poly(4);
    for z in [c(0.5, 0.0), c(0.3, -0.7)] {
        assert!(close(f4.eval(&[z; 4]), 2.0 * z - 1.0, 1e-15));
    }
}

#[test]
fn triangle_constraint_in_every_shift() {
    let f3 = region_poly(3);
    for d in [0isize, 1, -1] {
        let s = f3.shift(d, 3);
        assert_eq!(s.terms.len(), 2);
        assert_eq!(s.terms[&Vec::new()], 1);
    }
}

#[test]
fn region_polynomial_is_reversal_symmetric() {
    for n in 3..=10 {
        assert_eq!(region_poly(n).reversed(n), region_poly(n).shift(n as isize - 1, n).shift(1 - n as isize, n).reversed(n));
        let f = region_poly(n);
        assert_eq!(f.reversed(n).reversed(n), f);
    }
}

#[test]
fn region_polynomial_is_the_lower_left_entry() {
    // f_n is, up to one sign per n, the lower left entry of the product of
    // [[0, −ζ_i], [1, −1]]; rotating the ζ's gives the shifted copies
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 3..=12 {
        let f = region_poly(n);
        let mut sign = None;
        for _ in 0..10 {
            let zeta: Vec<C64> = (0..n).map(|_| c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5))).collect();
            let entry = zeta_matrix_product(&zeta)[1][0];
            let v = f.eval(&zeta);
            let s = *sign.get_or_insert(if close(entry, v, 1e-9 * v.norm().max(1.0)) { 1.0 } else { -1.0 });
            assert!(close(entry, v * s, 1e-9 * v.norm().max(1.0)), "n={n}");
            let mut rot = zeta.clone();
            rot.rotate_left(1);
            let shifted = f.shift(1, n).eval(&zeta);
            assert!(close(zeta_matrix_product(&rot)[1][0], shifted * s, 1e-9 * shifted.norm().max(1.0)), "n={n}");
        }
    }
}

#[test]
fn backward_built_triangle_satisfies_its_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let u: Vec<C64> = (0..3).map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
        let w: Vec<C64> = (0..3).map(|i| -u[i] * u[(i + 1) % 3]).collect();
        let x: Vec<C64> = u.iter().chain(&w).copied().collect();
        let up: Vec<Poly> = (0..3).map(Poly::var).collect();
        let wp: Vec<Poly> = (3..6).map(Poly::var).collect();
        for e in region_equations(&up, &wp) {
            assert!(e.eval(&x).norm() < 1e-12);
        }
    }
}

#[test]
fn unit_corners_force_unit_crossing_label() {
    // ũ = 1 at both corners of every side: ζ = −w, and ζ = 1 gives w = −1
    let up: Vec<Poly> = (0..3).map(Poly::var).collect();
    let wp: Vec<Poly> = (3..6).map(Poly::var).collect();
    let eqs = region_equations(&up, &wp);
    let one = c(1.0, 0.0);
    let x = [one, one, one, -one, -one, -one];
    assert!(eqs.iter().all(|e| e.eval(&x).norm() < 1e-15));
    let y = [one, one, one, one, -one, -one];
    assert!(eqs.iter().any(|e| e.eval(&y).norm() > 0.5));
}

#[test]
fn square_weave_edge_equations() {
    let p = pipeline("square_weave");
    let names = p.system.names();
    let regional: Vec<&_> = p
        .system
        .equations
        .iter()
        .filter(|e| e.kind == EqKind::Edge && e.source.starts_with("eR:"))
        .collect();
    assert_eq!(regional.len(), 8);
    let mut plus = 0;
    for e in &regional {
        let r = rhs(&e.poly);
        assert!(close(r, c(1.0, 0.0), 1e-15) || close(r, c(-1.0, 0.0), 1e-15), "{}", e.poly.display(&names));
        plus += usize::from(r.re > 0.0);
    }
    assert_eq!(plus, 4);
}

#[test]
fn overpass_edges_differ_by_a_meridian() {
    let p = pipeline("square_weave");
    for e in p.system.equations.iter().filter(|e| e.kind == EqKind::Edge && e.source.starts_with("ear:")) {
        let (a, b) = e.source.split_once('|').unwrap();
        assert_eq!(a.replacen("ear:", "eal:", 1), b);
        assert!((rhs(&e.poly).norm() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn fal_segment_equations() {
    let p = pipeline("borromean_fal");
    let segs: Vec<_> = p.system.equations.iter().filter(|e| e.kind == EqKind::Segment).collect();
    assert_eq!(segs.len(), 4);
    for e in segs {
        let l = p.system.var_index(&format!("u:el:{}", e.source)).unwrap();
        let r = p.system.var_index(&format!("u:er:{}", e.source)).unwrap();
        let mut x = vec![c(0.0, 0.0); p.system.n_vars()];
        x[l] = c(0.3, 0.2);
        x[r] = c(0.3, 0.2);
        assert_eq!(e.poly.eval(&x), c(0.0, 0.0));
        x[r] = c(0.0, 0.2);
        assert!(e.poly.eval(&x).norm() > 0.1);
    }
}

#[test]
fn fal_meridian_edges_are_normalized() {
    let s = solved("borromean_fal");
    for x in s.nondegenerate() {
        for circle in ["Cbd", "Cac"] {
            assert!(close(s.label(&x, &format!("u:emu1:{circle}")), c(1.0, 0.0), 1e-10));
        }
    }
}

#[test]
fn square_weave_vertical_values() {
    // w_{a1} = −1/4, w_1 = ±i/4 and u_{a1c1} = −1/2, u_{a1a2} = 1/2 in the
    // vertical triangle at c1; edge labels read against our edge direction
    let p = pipeline("square_weave");
    let f = p.complex.face_index("VN:c1:out").unwrap();
    assert_eq!(p.complex.faces[f].kind, FaceKind::Vertical);
    let eqs: Vec<_> = p.system.equations.iter().filter(|e| e.source == "VN:c1:out").collect();
    assert_eq!(eqs.len(), 3);
    for s in [1.0, -1.0] {
        let mut x = vec![c(0.0, 0.0); p.system.n_vars()];
        let mut set = |id: &str, v: C64| x[p.system.var_index(id).unwrap()] = v;
        set("w:g:a:h2", c(-0.25, 0.0));
        set("w:g:c1", c(0.0, 0.25 * s));
        set("w:g:a:v1", c(0.0, 0.25 * s));
        set("u:ear:a:h2:c1", c(0.5, 0.0));
        set("u:eN:c1:out", c(-0.5, 0.0));
        set("u:ea0:a:v1", c(0.0, 0.5 * s));
        for e in &eqs {
            assert!(e.poly.eval(&x).norm() < 1e-15);
        }
    }
}

#[test]
fn normalization_meridian_of_one_edge() {
    let p = pipeline("borromean_fal");
    let e = p.system.equations.iter().find(|e| e.kind == EqKind::Normalization && e.source == "C:Cbd").unwrap();
    let mut x = vec![c(0.0, 0.0); p.system.n_vars()];
    x[p.system.var_index("u:emu1:Cbd").unwrap()] = c(1.0, 0.0);
    assert_eq!(e.poly.eval(&x), c(0.0, 0.0));
}

#[test]
fn square_weave_meridian_override_sets_vertical_edge() {
    // with the meridian of *N along a_2, u_{a1a2} = 1/2 on the solutions
    let s = solved("square_weave");
    for x in s.nondegenerate() {
        assert!(close(-s.label(&x, "u:eN:c1:out"), c(0.5, 0.0), 1e-9));
    }
}

#[test]
fn gauge_identity_and_sign() {
    let s = solved("square_weave");
    let (sys, cx) = (&s.p.system, &s.p.complex);
    let x = &s.nondegenerate()[0];
    let ones = vec![c(1.0, 0.0); cx.tori.len()];
    assert_eq!(&gauge_rescale(sys, x, &ones).unwrap(), x);
    let mut nu = ones.clone();
    let arc = sys.var_index("w:g:c1").unwrap();
    for &t in &sys.variables[arc].tori {
        nu[t] = c(0.0, 1.0);
    }
    let y = gauge_rescale(sys, x, &nu).unwrap();
    assert!(close(y[arc], -x[arc], 1e-15));
}

#[test]
fn gauge_on_one_component_keeps_shapes() {
    let s = solved("square_weave");
    let (sys, cx) = (&s.p.system, &s.p.complex);
    let k0 = cx.torus_index("K0").unwrap();
    let mut nu = vec![c(1.0, 0.0); cx.tori.len()];
    nu[k0] = c(2.0, 0.0);
    let g = EquationSystem::build_gauged(cx, &nu).unwrap();
    for x in s.nondegenerate() {
        let y = gauge_rescale(sys, &x, &nu).unwrap();
        assert!(g.evaluate(&y).max() < 1e-12);
        for (f, face) in cx.faces.iter().enumerate() {
            for i in 0..face.corners.len() {
                assert!(close(sys.shape(&x, f, i).unwrap(), g.shape(&y, f, i).unwrap(), 1e-12));
            }
        }
    }
}

#[test]
fn zero_gauge_is_rejected() {
    let p = pipeline("square_weave");
    let mut nu = vec![c(1.0, 0.0); p.complex.tori.len()];
    nu[0] = c(0.0, 0.0);
    assert!(EquationSystem::build_gauged(&p.complex, &nu).is_err());
    assert!(EquationSystem::build_gauged(&p.complex, &nu[1..]).is_err());
}

#[test]
fn bigon_labels_are_structural_zeros() {
    let p = pipeline("trefoil");
    let z = p.system.structural_zeros();
    let bigons = p.system.equations.iter().filter(|e| e.kind == EqKind::Bigon).count();
    assert!(bigons > 0);
    assert!(z.iter().any(|&b| b));
    assert!(p.system.variables.iter().zip(&z).all(|(v, &b)| !b || v.id.starts_with("u:")));
}
