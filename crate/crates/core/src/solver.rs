//! Multi-start Gauss–Newton root enumeration with deflation.
//!
//! Linear equations are eliminated exactly first; the remaining polynomials
//! are solved in the free variables by Levenberg–Marquardt steps on the
//! least-squares residual. Found roots deflate the merit function so later
//! starts are pushed elsewhere.

use std::collections::BTreeMap;

use log::{debug, info};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::equations::EquationSystem;
use crate::error::{invalid, Result};
use crate::poly::Poly;
use crate::C64;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverConfig {
    pub residual_tol: f64,
    pub dedupe_tol: f64,
    pub max_starts: usize,
    pub max_newton_iters: usize,
    pub damping: f64,
    pub rng_seed: u64,
    pub start_box: f64,
    /// Cap on distinct nondegenerate roots.
    pub max_roots: usize,
    /// Stop after this many consecutive starts without a new nondegenerate root.
    pub stall_starts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            residual_tol: 1e-10,
            dedupe_tol: 1e-6,
            max_starts: 2000,
            max_newton_iters: 200,
            damping: 1.0,
            rng_seed: 0,
            start_box: 4.0,
            max_roots: 50,
            stall_starts: 150,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0 && self.dedupe_tol > 0.0) {
            return Err(invalid("solver", "tolerances must be positive"));
        }
        if self.dedupe_tol <= self.residual_tol {
            return Err(invalid("solver", "dedupe_tol must exceed residual_tol"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(invalid("solver", "damping must lie in (0, 1]"));
        }
        if self.start_box <= 0.0 || self.max_starts == 0 || self.max_newton_iters == 0 {
            return Err(invalid("solver", "start_box, max_starts and max_newton_iters must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Root {
    pub x: Vec<C64>,
    pub residual: f64,
    pub degenerate: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SolveStats {
    pub starts_used: usize,
    pub converged: usize,
    pub duplicates: usize,
    pub failed: usize,
    pub rejected: usize,
    pub stalled: bool,
    pub free_variables: usize,
    pub inconsistent: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SolutionSet {
    /// Nondegenerate roots first, each group sorted by canonical key.
    pub solutions: Vec<Root>,
    pub stats: SolveStats,
}

impl SolutionSet {
    pub fn nondegenerate(&self) -> impl Iterator<Item = &Root> {
        self.solutions.iter().filter(|r| !r.degenerate)
    }
}

/// The linear part solved: x = base + Σ coef·y_free.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub free: Vec<usize>,
    pub base: Vec<C64>,
    pub map: Vec<Vec<(usize, C64)>>,
    pub polys: Vec<Poly>,
    pub inconsistent: bool,
}

impl Reduction {
    pub fn expand(&self, y: &[C64]) -> Vec<C64> {
        self.base
            .iter()
            .zip(&self.map)
            .map(|(&b, terms)| terms.iter().fold(b, |acc, &(j, c)| acc + c * y[j]))
            .collect()
    }

    /// Free coordinates of a full assignment.
    pub fn restrict(&self, x: &[C64]) -> Vec<C64> {
        self.free.iter().map(|&v| x[v]).collect()
    }
}

pub fn reduce(sys: &EquationSystem) -> Reduction {
    let n = sys.n_vars();
    let mut rows: Vec<Vec<C64>> = Vec::new();
    let mut polys = Vec::new();
    for e in &sys.equations {
        if e.poly.degree() <= 1 {
            let mut r = vec![C64::new(0.0, 0.0); n + 1];
            for (c, m) in &e.poly.terms {
                match m.as_slice() {
                    [] => r[n] -= c,
                    [(v, 1)] => r[*v] += c,
                    _ => unreachable!("degree at most one"),
                }
            }
            rows.push(r);
        } else {
            polys.push(e.poly.clone());
        }
    }
    // reduced row echelon form
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let best = (row..rows.len()).max_by(|&a, &b| rows[a][col].norm().total_cmp(&rows[b][col].norm()));
        let Some(p) = best else { break };
        if rows[p][col].norm() < 1e-9 {
            continue;
        }
        rows.swap(row, p);
        let piv = rows[row][col];
        for v in rows[row].iter_mut() {
            *v /= piv;
        }
        for r in 0..rows.len() {
            if r != row && rows[r][col].norm() > 0.0 {
                let f = rows[r][col];
                let pivot = rows[row].clone();
                for (a, b) in rows[r].iter_mut().zip(&pivot) {
                    *a -= f * b;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    let inconsistent = rows[row..].iter().any(|r| r[n].norm() > 1e-9);
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; n];
        for &(_, c) in &pivots {
            v[c] = true;
        }
        v
    };
    let free: Vec<usize> = (0..n).filter(|&v| !is_pivot[v]).collect();
    let free_pos: BTreeMap<usize, usize> = free.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut base = vec![C64::new(0.0, 0.0); n];
    let mut map: Vec<Vec<(usize, C64)>> = vec![Vec::new(); n];
    for &v in &free {
        map[v] = vec![(free_pos[&v], C64::new(1.0, 0.0))];
    }
    for &(r, c) in &pivots {
        base[c] = rows[r][n];
        map[c] = free
            .iter()
            .filter(|&&f| rows[r][f].norm() > 1e-14)
            .map(|&f| (free_pos[&f], -rows[r][f]))
            .collect();
    }
    let subst: Vec<Poly> = (0..n)
        .map(|v| {
            let mut p = Poly::constant(base[v]);
            for &(j, c) in &map[v] {
                p = p.add(&Poly::var(j).scale(c));
            }
            p
        })
        .collect();
    let mut reduced = Vec::new();
    let mut inconsistent = inconsistent;
    for p in polys {
        let q = Poly::from_terms(
            p.substitute(&|v| subst[v].clone()).terms.into_iter().filter(|(c, _)| c.norm() > 1e-13).collect(),
        );
        if q.is_zero() {
            continue;
        }
        if q.degree() == 0 {
            inconsistent = true;
            continue;
        }
        let s = q.max_coef();
        reduced.push(q.scale(C64::new(1.0 / s, 0.0)));
    }
    Reduction { free, base, map, polys: reduced, inconsistent }
}

/// Analytic Jacobian of all equations at x (rows = equations).
pub fn jacobian(sys: &EquationSystem, x: &[C64]) -> DMatrix<C64> {
    let mut j = DMatrix::from_element(sys.equations.len(), sys.n_vars(), C64::new(0.0, 0.0));
    let mut g = BTreeMap::new();
    for (r, e) in sys.equations.iter().enumerate() {
        g.clear();
        e.poly.gradient(x, &mut g);
        for (&v, &d) in &g {
            j[(r, v)] = d;
        }
    }
    j
}

/// Central-difference Jacobian with real step h.
pub fn jacobian_fd(sys: &EquationSystem, x: &[C64], h: f64) -> DMatrix<C64> {
    let mut j = DMatrix::from_element(sys.equations.len(), sys.n_vars(), C64::new(0.0, 0.0));
    let mut xp = x.to_vec();
    for v in 0..sys.n_vars() {
        xp[v] = x[v] + h;
        let fp: Vec<C64> = sys.equations.iter().map(|e| e.poly.eval(&xp)).collect();
        xp[v] = x[v] - h;
        let fm: Vec<C64> = sys.equations.iter().map(|e| e.poly.eval(&xp)).collect();
        xp[v] = x[v];
        for r in 0..fp.len() {
            j[(r, v)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    j
}

/// Gradient of one face word's projective defect, by central differences in
/// the real and imaginary directions.
pub fn word_defect_gradient_fd(sys: &EquationSystem, x: &[C64], word: usize, h: f64) -> Vec<(f64, f64)> {
    let defect = |y: &[C64]| {
        crate::geometry::projective_defect(&crate::geometry::word_matrix(y, &sys.words[word].tokens))
    };
    let mut y = x.to_vec();
    (0..x.len())
        .map(|v| {
            let mut out = [0.0; 2];
            for (k, dir) in [C64::new(h, 0.0), C64::new(0.0, h)].into_iter().enumerate() {
                y[v] = x[v] + dir;
                let p = defect(&y);
                y[v] = x[v] - dir;
                let m = defect(&y);
                y[v] = x[v];
                out[k] = (p - m) / (2.0 * h);
            }
            (out[0], out[1])
        })
        .collect()
}

struct Problem<'a> {
    polys: &'a [Poly],
    k: usize,
}

impl Problem<'_> {
    fn residual(&self, y: &[C64]) -> Vec<C64> {
        self.polys.iter().map(|p| p.eval(y)).collect()
    }

    fn jac(&self, y: &[C64]) -> DMatrix<C64> {
        let mut j = DMatrix::from_element(self.polys.len(), self.k, C64::new(0.0, 0.0));
        let mut g = BTreeMap::new();
        for (r, p) in self.polys.iter().enumerate() {
            g.clear();
            p.gradient(y, &mut g);
            for (&v, &d) in &g {
                j[(r, v)] = d;
            }
        }
        j
    }

    /// Levenberg–Marquardt step solving (JᴴJ + μI)δ = −JᴴF.
    fn step(&self, j: &DMatrix<C64>, f: &[C64], mu: f64) -> Option<Vec<C64>> {
        let jh = j.adjoint();
        let mut a = &jh * j;
        for i in 0..self.k {
            a[(i, i)] += mu;
        }
        let b = -(&jh * nalgebra::DVector::from_column_slice(f));
        let chol = a.cholesky()?;
        Some(chol.solve(&b).iter().copied().collect())
    }
}

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn norm_inf(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn dist_inf(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Deflation multiplier M(y) = Π (1/‖y − r‖² + 1) and the directional
/// derivative of log M along δ.
fn deflation(y: &[C64], roots: &[Vec<C64>], delta: &[C64]) -> (f64, f64) {
    let mut m = 1.0;
    let mut dlog = 0.0;
    for r in roots {
        let d2: f64 = y.iter().zip(r).map(|(a, b)| (a - b).norm_sqr()).sum();
        let d2 = d2.max(1e-300);
        let inner: f64 = y.iter().zip(r).zip(delta).map(|((a, b), d)| ((a - b).conj() * d).re).sum();
        let g = 1.0 / d2;
        m *= g + 1.0;
        dlog += (-2.0 * inner / (d2 * d2)) / (g + 1.0);
    }
    (m, dlog)
}

enum Outcome {
    Converged(Vec<C64>),
    Failed,
}

fn newton(p: &Problem, mut y: Vec<C64>, roots: &[Vec<C64>], cfg: &SolverConfig) -> Outcome {
    let mut f = p.residual(&y);
    let mut mu = 1e-8;
    for _ in 0..cfg.max_newton_iters {
        if norm_inf(&f) < cfg.residual_tol * 1e-2 {
            return Outcome::Converged(y);
        }
        let j = p.jac(&y);
        let Some(delta) = p.step(&j, &f, mu) else {
            mu = (mu * 10.0).max(1e-12);
            continue;
        };
        let (m0, dlog) = deflation(&y, roots, &delta);
        let tau = if roots.is_empty() { 1.0 } else { 1.0 / (1.0 - dlog) };
        let tau = if tau.is_finite() && tau.abs() < 1e6 { tau } else { 1.0 };
        let merit0 = m0 * norm2(&f);
        let mut accepted = false;
        for _ in 0..12 {
            let s = cfg.damping * tau;
            let trial: Vec<C64> = y.iter().zip(&delta).map(|(a, d)| a + d * s).collect();
            let ft = p.residual(&trial);
            let (m1, _) = deflation(&trial, roots, &delta);
            let merit1 = m1 * norm2(&ft);
            if merit1.is_finite() && (merit1 < merit0 || norm2(&ft) < 1e-3 * norm2(&f)) {
                y = trial;
                f = ft;
                mu = (mu / 4.0).max(1e-15);
                accepted = true;
                break;
            }
            mu *= 8.0;
            if mu > 1e12 {
                break;
            }
            match p.step(&j, &f, mu) {
                Some(d) => {
                    let trial_delta = d;
                    let trial: Vec<C64> = y.iter().zip(&trial_delta).map(|(a, d)| a + d * cfg.damping).collect();
                    let ft = p.residual(&trial);
                    let (m1, _) = deflation(&trial, roots, &trial_delta);
                    if (m1 * norm2(&ft)).is_finite() && m1 * norm2(&ft) < merit0 {
                        y = trial;
                        f = ft;
                        accepted = true;
                        break;
                    }
                }
                None => continue,
            }
        }
        if !accepted || norm_inf(&y) > 1e8 {
            return Outcome::Failed;
        }
    }
    if norm_inf(&f) < cfg.residual_tol {
        Outcome::Converged(y)
    } else {
        Outcome::Failed
    }
}

/// Undeflated Gauss–Newton polishing.
fn polish(p: &Problem, mut y: Vec<C64>) -> Vec<C64> {
    for _ in 0..8 {
        let f = p.residual(&y);
        if norm_inf(&f) < 1e-15 {
            break;
        }
        let j = p.jac(&y);
        let Some(d) = p.step(&j, &f, 1e-14) else { break };
        let trial: Vec<C64> = y.iter().zip(&d).map(|(a, b)| a + b).collect();
        if norm2(&p.residual(&trial)) <= norm2(&f) {
            y = trial;
        } else {
            break;
        }
    }
    y
}

/// Sort key: rounded real and imaginary parts.
pub fn canonical_key(x: &[C64], tol: f64) -> Vec<(i64, i64)> {
    x.iter().map(|z| ((z.re / tol).round() as i64, (z.im / tol).round() as i64)).collect()
}

pub fn is_degenerate(sys: &EquationSystem, x: &[C64]) -> bool {
    let structural = sys.structural_zeros();
    x.iter().zip(&structural).any(|(z, &s)| !s && z.norm() < 1e-8)
}

pub fn solve_all(sys: &EquationSystem, cfg: &SolverConfig) -> Result<SolutionSet> {
    cfg.validate()?;
    let red = reduce(sys);
    let k = red.free.len();
    let mut stats = SolveStats { free_variables: k, inconsistent: red.inconsistent, ..Default::default() };
    info!("{}: {} variables, {} free after linear elimination, {} polynomial equations", sys.name, sys.n_vars(), k, red.polys.len());
    if red.inconsistent {
        return Ok(SolutionSet { solutions: Vec::new(), stats });
    }
    let problem = Problem { polys: &red.polys, k };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut good: Vec<Root> = Vec::new();
    let mut degenerate: Vec<Root> = Vec::new();
    let mut deflate: Vec<Vec<C64>> = Vec::new();
    let mut since_new = 0;
    for start in 0..cfg.max_starts {
        if good.len() >= cfg.max_roots || since_new >= cfg.stall_starts {
            stats.stalled = since_new >= cfg.stall_starts;
            break;
        }
        stats.starts_used = start + 1;
        since_new += 1;
        let y0: Vec<C64> = (0..k)
            .map(|_| C64::new(rng.random_range(-cfg.start_box..cfg.start_box), rng.random_range(-cfg.start_box..cfg.start_box)))
            .collect();
        let y = match newton(&problem, y0, &deflate, cfg) {
            Outcome::Converged(y) => polish(&problem, y),
            Outcome::Failed => {
                stats.failed += 1;
                continue;
            }
        };
        stats.converged += 1;
        let x = red.expand(&y);
        let res = sys.evaluate(&x);
        let degen = is_degenerate(sys, &x);
        let residual = if degen { res.max_eq } else { res.max() };
        if residual >= cfg.residual_tol {
            stats.rejected += 1;
            debug!("start {start}: residual {residual:.3e} above tolerance");
            continue;
        }
        let pool = if degen { &mut degenerate } else { &mut good };
        if pool.iter().any(|r| dist_inf(&r.x, &x) < cfg.dedupe_tol) {
            stats.duplicates += 1;
            continue;
        }
        if degen && pool.len() >= cfg.max_roots {
            continue;
        }
        debug!("start {start}: new {} root", if degen { "degenerate" } else { "nondegenerate" });
        deflate.push(y);
        pool.push(Root { x, residual, degenerate: degen });
        if !degen {
            since_new = 0;
        }
    }
    for pool in [&mut good, &mut degenerate] {
        pool.sort_by_key(|r| canonical_key(&r.x, cfg.dedupe_tol));
    }
    info!(
        "{}: {} nondegenerate and {} degenerate roots from {} starts",
        sys.name,
        good.len(),
        degenerate.len(),
        stats.starts_used
    );
    good.extend(degenerate);
    Ok(SolutionSet { solutions: good, stats })
}
