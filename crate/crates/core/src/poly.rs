//! Sparse multivariate polynomials over ℂ, and the integer region
//! polynomials f_n in the shape parameters.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::C64;

/// Sorted list of (variable, exponent) pairs with positive exponents.
pub type Monomial = Vec<(usize, u32)>;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub terms: Vec<(C64, Monomial)>,
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            out.push((a[i].0, a[i].1 + b[j].1));
            i += 1;
            j += 1;
        }
    }
    out
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Poly::from_terms(vec![(c, Vec::new())])
    }

    pub fn var(v: usize) -> Self {
        Poly { terms: vec![(C64::new(1.0, 0.0), vec![(v, 1)])] }
    }

    /// Collects like terms and drops exact zeros.
    pub fn from_terms(terms: Vec<(C64, Monomial)>) -> Self {
        let mut acc: BTreeMap<Monomial, C64> = BTreeMap::new();
        for (c, m) in terms {
            *acc.entry(m).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Poly { terms: acc.into_iter().filter(|(_, c)| *c != C64::new(0.0, 0.0)).map(|(m, c)| (c, m)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut t = self.terms.clone();
        t.extend(other.terms.iter().cloned());
        Poly::from_terms(t)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(a, m)| (a * c, m.clone())).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut t = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, ma) in &self.terms {
            for (b, mb) in &other.terms {
                t.push((a * b, mono_mul(ma, mb)));
            }
        }
        Poly::from_terms(t)
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, m)| m.iter().map(|p| p.1).sum::<u32>()).max().unwrap_or(0)
    }

    pub fn variables(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.iter().flat_map(|(_, m)| m.iter().map(|p| p.0)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn eval(&self, x: &[C64]) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (c, m) in &self.terms {
            let mut t = *c;
            for &(v, e) in m {
                t *= x[v].powu(e);
            }
            s += t;
        }
        s
    }

    /// Partial derivatives, accumulated as (variable, value) pairs.
    pub fn gradient(&self, x: &[C64], out: &mut BTreeMap<usize, C64>) {
        out.clear();
        for (c, m) in &self.terms {
            for (k, &(v, e)) in m.iter().enumerate() {
                let mut t = *c * e as f64 * x[v].powu(e - 1);
                for (j, &(w, f)) in m.iter().enumerate() {
                    if j != k {
                        t *= x[w].powu(f);
                    }
                }
                *out.entry(v).or_insert(C64::new(0.0, 0.0)) += t;
            }
        }
    }

    /// Replaces each variable through `f`, which returns a polynomial.
    pub fn substitute(&self, f: &dyn Fn(usize) -> Poly) -> Poly {
        let mut out = Poly::zero();
        for (c, m) in &self.terms {
            let mut t = Poly::constant(*c);
            for &(v, e) in m {
                let s = f(v);
                for _ in 0..e {
                    t = t.mul(&s);
                }
            }
            out = out.add(&t);
        }
        out
    }

    pub fn max_coef(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.norm()).fold(0.0, f64::max)
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (c, m)) in self.terms.iter().enumerate() {
            if i > 0 {
                s.push_str(" + ");
            }
            let _ = write!(s, "({}{:+}i)", c.re, c.im);
            for &(v, e) in m {
                let _ = write!(s, "*{}", names.get(v).map(String::as_str).unwrap_or("?"));
                if e > 1 {
                    let _ = write!(s, "^{e}");
                }
            }
        }
        s
    }
}

/// Multilinear polynomial in ζ_1..ζ_n with integer coefficients; keys are
/// sorted index sets (1-based).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZetaPoly {
    pub terms: BTreeMap<Vec<usize>, i64>,
}

impl ZetaPoly {
    fn constant(c: i64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), c);
        ZetaPoly { terms }
    }

    fn add(&self, other: &ZetaPoly, sign: i64) -> ZetaPoly {
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            *terms.entry(k.clone()).or_insert(0) += sign * v;
        }
        terms.retain(|_, v| *v != 0);
        ZetaPoly { terms }
    }

    fn times_zeta(&self, i: usize) -> ZetaPoly {
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            let mut k = k.clone();
            assert!(!k.contains(&i), "f_n is multilinear");
            k.push(i);
            k.sort_unstable();
            terms.insert(k, *v);
        }
        ZetaPoly { terms }
    }

    /// Shifts every index by `delta` cyclically modulo n.
    pub fn shift(&self, delta: isize, n: usize) -> ZetaPoly {
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            let mut k: Vec<usize> = k.iter().map(|&i| ((i as isize - 1 + delta).rem_euclid(n as isize) + 1) as usize).collect();
            k.sort_unstable();
            terms.insert(k, *v);
        }
        ZetaPoly { terms }
    }

    /// Reverses the cyclic order ζ_i ↦ ζ_{n+1-i}.
    pub fn reversed(&self, n: usize) -> ZetaPoly {
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            let mut k: Vec<usize> = k.iter().map(|&i| n + 1 - i).collect();
            k.sort_unstable();
            terms.insert(k, *v);
        }
        ZetaPoly { terms }
    }

    pub fn eval(&self, zeta: &[C64]) -> C64 {
        self.terms
            .iter()
            .map(|(k, v)| k.iter().fold(C64::new(*v as f64, 0.0), |acc, &i| acc * zeta[i - 1]))
            .sum()
    }
}

/// f_n by the three-term recursion (n ≥ 3).
pub fn region_poly(n: usize) -> ZetaPoly {
    assert!(n >= 3);
    let f3 = ZetaPoly::constant(1).add(&ZetaPoly::constant(1).times_zeta(2), -1);
    if n == 3 {
        return f3;
    }
    let mut f4 = ZetaPoly::constant(-1);
    f4 = f4.add(&ZetaPoly::constant(1).times_zeta(2), 1);
    f4 = f4.add(&ZetaPoly::constant(1).times_zeta(3), 1);
    let (mut a, mut b) = (f3, f4);
    for m in 5..=n {
        let next = b.add(&a.times_zeta(m - 1), 1);
        let next = ZetaPoly::constant(0).add(&next, -1);
        a = b;
        b = next;
    }
    b
}

/// f_n from the alternating sum over index sets 1 < i_1 < … < i_k < n with
/// gaps at least two.
pub fn region_poly_closed(n: usize) -> ZetaPoly {
    let mut terms = BTreeMap::new();
    fn rec(start: usize, n: usize, cur: &mut Vec<usize>, out: &mut BTreeMap<Vec<usize>, i64>) {
        let k = cur.len() as i64;
        let sign = if (n as i64 + k + 1) % 2 == 0 { 1 } else { -1 };
        out.insert(cur.clone(), sign);
        for i in start..n {
            cur.push(i);
            rec(i + 2, n, cur, out);
            cur.pop();
        }
    }
    rec(2, n, &mut Vec::new(), &mut terms);
    ZetaPoly { terms }
}

/// Product of the matrices [[0, −ζ_i], [1, −1]] for i = 1..n.
pub fn zeta_matrix_product(zeta: &[C64]) -> [[C64; 2]; 2] {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut m = [[one, zero], [zero, one]];
    for z in zeta {
        let a = [[zero, -z], [one, -one]];
        m = [
            [m[0][0] * a[0][0] + m[0][1] * a[1][0], m[0][0] * a[0][1] + m[0][1] * a[1][1]],
            [m[1][0] * a[0][0] + m[1][1] * a[1][0], m[1][0] * a[0][1] + m[1][1] * a[1][1]],
        ];
    }
    m
}

/// Region equations for a face with corner labels ũ_1..ũ_n and side labels
/// w_1..w_n, where ζ_i = −w_i / (ũ_i ũ_{i+1}). Returns f_n, f_n^+, f_n^-
/// with denominators cleared by the least common multiple of the ũ's.
pub fn region_equations(u: &[Poly], w: &[Poly]) -> Vec<Poly> {
    let n = u.len();
    assert!(n >= 3 && w.len() == n);
    let base = region_poly(n);
    [0isize, 1, -1]
        .iter()
        .map(|&d| {
            let f = base.shift(d, n);
            let mut denom: Vec<usize> = Vec::new();
            for k in f.terms.keys() {
                for &i in k {
                    denom.push(i - 1);
                    denom.push(i % n);
                }
            }
            denom.sort_unstable();
            denom.dedup();
            let mut out = Poly::zero();
            for (k, &c) in &f.terms {
                let sign = if k.len() % 2 == 0 { 1.0 } else { -1.0 };
                let mut t = Poly::constant(C64::new(c as f64 * sign, 0.0));
                let mut used = Vec::new();
                for &i in k {
                    t = t.mul(&w[i - 1]);
                    used.push(i - 1);
                    used.push(i % n);
                }
                for &j in &denom {
                    if !used.contains(&j) {
                        t = t.mul(&u[j]);
                    }
                }
                out = out.add(&t);
            }
            out
        })
        .collect()
}
