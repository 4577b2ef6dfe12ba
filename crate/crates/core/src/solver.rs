//! PID atoms for one target via the minimum-synergy unique-information measure.
//!
//! Unique information is defined through the distribution `q*` minimizing
//! `I_q(T:(A,B))` over all `q` that reproduce the `(T,A)` and `(T,B)`
//! pairwise marginals of the input. Because the constraints only couple
//! cells sharing a target value, the feasible set is a product of
//! transportation polytopes, one per outcome `t`. Its tangent space is
//! spanned by exchange directions
//!
//! ```text
//! e(t,a0,b0) + e(t,a,b) − e(t,a0,b) − e(t,a,b0)
//! ```
//!
//! which move mass around a rectangle without touching any row or column
//! sum, so every iterate is feasible by construction.
//!
//! The objective `Σ q(t,a,b) ln q(t|a,b)` is convex. Problems whose
//! exchange-coordinate dimension is moderate are solved by a damped Newton
//! method in those coordinates with an Armijo line search and a
//! fraction-to-boundary rule; larger problems (fine discretizations) use
//! alternating I-projections, which also decrease the objective
//! monotonically.

use serde::Serialize;

use crate::dist::{mutual_information, JointDist3, Role, Vars};
use crate::error::{PidError, Result};
use crate::scalar::Real;

/// Largest exchange-coordinate dimension handled by the Newton engine.
pub const NEWTON_MAX_DIM: usize = 900;

const ARMIJO: f64 = 1e-4;
const TO_BOUNDARY: f64 = 0.995;
const START_MIX: f64 = 0.05;
/// Initial barrier weight (nats per cell) and its reduction factor per centring phase.
const MU_START: f64 = 1e-3;
const MU_SHRINK: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Stop once an iteration decreases the objective by less than this (bits).
    pub tol_bits: f64,
    pub max_iters: usize,
    /// Largest tolerated deviation of any pairwise-marginal cell.
    pub marginal_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tol_bits: 1e-10, max_iters: 100_000, marginal_tol: 1e-8 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_bits > 0.0) || !(self.marginal_tol > 0.0) || self.max_iters == 0 {
            return Err(PidError::InvalidParameter(format!(
                "solver tolerances and iteration cap must be strictly positive: {self:?}"
            )));
        }
        Ok(())
    }
}

/// The four PID atoms of `I(target : (source_a, source_b))`, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PidAtoms<T> {
    pub target: Role,
    pub source_a: Role,
    pub source_b: Role,
    /// Redundancy `SI(T:{A;B})`.
    pub si: T,
    /// `UI(T:{A\B})`.
    pub ui_a: T,
    /// `UI(T:{B\A})`.
    pub ui_b: T,
    /// Synergy `CI(T:{A;B})`.
    pub ci: T,
}

impl<T: Real> PidAtoms<T> {
    /// Unique information carried by `source` (one of the two sources).
    pub fn ui(&self, source: Role) -> T {
        if source == self.source_a {
            self.ui_a
        } else if source == self.source_b {
            self.ui_b
        } else {
            panic!("{source} is the target of this decomposition")
        }
    }

    pub fn total(&self) -> T {
        self.si + self.ui_a + self.ui_b + self.ci
    }

    pub fn as_array(&self) -> [T; 4] {
        [self.si, self.ui_a, self.ui_b, self.ci]
    }

    /// Derives all four atoms from the optimal objective `I_q*(T:(A,B))`.
    pub(crate) fn from_objective(
        dist: &JointDist3<T>,
        target: Role,
        objective_bits: T,
    ) -> Result<PidAtoms<T>> {
        let (a, b) = target.others();
        let i_ta = mutual_information(dist, target, a)?;
        let i_tb = mutual_information(dist, target, b)?;
        let i_tab = mutual_information(dist, target, Vars::pair(a, b))?;
        let ui_a = clamp_atom(objective_bits - i_tb, "UI", target)?;
        let ui_b = clamp_atom(objective_bits - i_ta, "UI", target)?;
        let si = clamp_atom(i_ta - ui_a, "SI", target)?;
        let ci = clamp_atom(i_tab - objective_bits, "CI", target)?;
        Ok(PidAtoms { target, source_a: a, source_b: b, si, ui_a, ui_b, ci })
    }
}

pub(crate) fn clamp_atom<T: Real>(v: T, what: &str, target: Role) -> Result<T> {
    if v >= T::zero() {
        Ok(v)
    } else if v >= -T::lit(T::ATOM_CLAMP) {
        Ok(T::zero())
    } else {
        Err(PidError::Inconsistent(format!("{what} for target {target} is {v} < 0")))
    }
}

/// A feasible distribution of the constraint polytope and its objective value.
#[derive(Clone, Debug, PartialEq)]
pub struct PolytopePoint<T> {
    /// Axes in the input's role order (X, Y, Z).
    pub q: JointDist3<T>,
    /// `I_q(T:(A,B))` in bits.
    pub objective: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Engine {
    /// No free coordinates: the input is the only feasible point.
    Trivial,
    Newton,
    Alternating,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveStats {
    pub engine: Engine,
    pub dimension: usize,
    pub iterations: usize,
    /// Objective in bits at the start point and after every iteration.
    pub objective_trace: Vec<f64>,
    /// Largest pairwise-marginal deviation over all iterates.
    pub max_marginal_residual: f64,
    /// The input distribution itself was at least as good as the final iterate.
    pub input_was_optimal: bool,
    /// Upper bound on the distance of the objective from its minimum, in bits,
    /// when the engine certifies one.
    pub gap_bound_bits: f64,
}

#[derive(Clone, Debug)]
pub struct PidSolution<T> {
    pub atoms: PidAtoms<T>,
    pub point: PolytopePoint<T>,
    pub stats: SolveStats,
}

/// Computes the PID of `I(target : others)`.
pub fn solve_pid<T: Real>(
    dist: &JointDist3<T>,
    target: Role,
    cfg: &SolverConfig,
) -> Result<PidSolution<T>> {
    cfg.validate()?;
    let (a, b) = target.others();
    let order = [target, a, b];
    let local = dist.permuted(order);
    let problem = Problem::new(&local);
    let dim = problem.basis.len();

    let (q, mut stats) = if dim == 0 {
        let f = problem.objective(&problem.p);
        let stats = SolveStats {
            engine: Engine::Trivial,
            dimension: 0,
            iterations: 0,
            objective_trace: vec![problem.to_bits(f).f64()],
            max_marginal_residual: 0.0,
            input_was_optimal: true,
            gap_bound_bits: 0.0,
        };
        (problem.p.clone(), stats)
    } else if dim <= NEWTON_MAX_DIM {
        problem.newton(cfg, target)?
    } else {
        problem.alternating(cfg, target)?
    };

    let f_q = problem.objective(&q);
    let f_p = problem.objective(&problem.p);
    let (q, f) = if f_p <= f_q {
        stats.input_was_optimal = true;
        (problem.p.clone(), f_p)
    } else {
        (q, f_q)
    };
    let residual = problem.marginal_residual(&q).f64();
    stats.max_marginal_residual = stats.max_marginal_residual.max(residual);
    if residual > cfg.marginal_tol {
        return Err(PidError::Infeasible { target, residual });
    }

    let objective = problem.to_bits(f);
    let atoms = PidAtoms::from_objective(dist, target, objective)?;
    let q_local = JointDist3::normalized(local.alphabets().clone(), q)?;
    let inverse = inverse_order(order);
    let point = PolytopePoint { q: q_local.permuted(inverse), objective };
    Ok(PidSolution { atoms, point, stats })
}

fn inverse_order(order: [Role; 3]) -> [Role; 3] {
    let mut inv = [Role::X; 3];
    for (k, r) in order.iter().enumerate() {
        inv[r.index()] = Role::from_index(k);
    }
    inv
}

/// `I_q(T:(A,B))` in bits for a distribution whose axes are `(T, A, B)`.
pub fn target_information<T: Real>(q: &JointDist3<T>) -> T {
    let problem = Problem::new(q);
    problem.to_bits(problem.objective(q.probs()))
}

struct Block {
    t: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

/// The constraint polytope of one target choice, axes ordered `(T, A, B)`.
struct Problem<T> {
    na: usize,
    nb: usize,
    p: Vec<T>,
    p_ta: Vec<T>,
    p_tb: Vec<T>,
    h_t: T,
    blocks: Vec<Block>,
    /// Cells `[anchor, (a,b), (anchor_row,b), (a,anchor_col)]` with signs `+ + − −`.
    basis: Vec<[usize; 4]>,
}

const SIGNS: [f64; 4] = [1.0, 1.0, -1.0, -1.0];

impl<T: Real> Problem<T> {
    fn new(local: &JointDist3<T>) -> Self {
        let [nt, na, nb] = local.shape();
        let p = local.probs().to_vec();
        let mut p_ta = vec![T::zero(); nt * na];
        let mut p_tb = vec![T::zero(); nt * nb];
        let mut p_t = vec![T::zero(); nt];
        for t in 0..nt {
            for a in 0..na {
                for b in 0..nb {
                    let v = p[(t * na + a) * nb + b];
                    p_ta[t * na + a] = p_ta[t * na + a] + v;
                    p_tb[t * nb + b] = p_tb[t * nb + b] + v;
                    p_t[t] = p_t[t] + v;
                }
            }
        }
        let h_t = -p_t.iter().copied().map(crate::scalar::xlog2x).sum::<T>();
        let mut blocks = Vec::new();
        let mut basis = Vec::new();
        for t in 0..nt {
            let rows: Vec<usize> = (0..na).filter(|&a| p_ta[t * na + a] > T::zero()).collect();
            let cols: Vec<usize> = (0..nb).filter(|&b| p_tb[t * nb + b] > T::zero()).collect();
            if rows.len() < 2 || cols.len() < 2 {
                continue;
            }
            let idx = |a: usize, b: usize| (t * na + a) * nb + b;
            let (a0, b0) = (rows[0], cols[0]);
            for &a in &rows[1..] {
                for &b in &cols[1..] {
                    basis.push([idx(a0, b0), idx(a, b), idx(a0, b), idx(a, b0)]);
                }
            }
            blocks.push(Block { t, rows, cols });
        }
        Problem { na, nb, p, p_ta, p_tb, h_t, blocks, basis }
    }

    #[inline]
    fn ab_of(&self, cell: usize) -> usize {
        cell % (self.na * self.nb)
    }

    fn fiber_mass(&self, q: &[T]) -> Vec<T> {
        let nab = self.na * self.nb;
        let mut qab = vec![T::zero(); nab];
        for (i, &v) in q.iter().enumerate() {
            qab[i % nab] = qab[i % nab] + v;
        }
        qab
    }

    /// `Σ q ln q(t|a,b)` in nats, i.e. `−H_q(T|A,B) · ln 2`.
    fn objective(&self, q: &[T]) -> T {
        let qab = self.fiber_mass(q);
        let nab = self.na * self.nb;
        q.iter()
            .enumerate()
            .filter(|(_, v)| **v > T::zero())
            .map(|(i, &v)| v * (v / qab[i % nab]).ln())
            .sum()
    }

    fn to_bits(&self, f_nats: T) -> T {
        (self.h_t + f_nats / T::ln2()).max(T::zero())
    }

    fn marginal_residual(&self, q: &[T]) -> T {
        let (na, nb) = (self.na, self.nb);
        let nt = q.len() / (na * nb);
        let mut worst = T::zero();
        let mut tb = vec![T::zero(); nb];
        for t in 0..nt {
            tb.iter_mut().for_each(|v| *v = T::zero());
            for a in 0..na {
                let mut row = T::zero();
                for b in 0..nb {
                    let v = q[(t * na + a) * nb + b];
                    if v < T::zero() {
                        worst = worst.max(-v);
                    }
                    row = row + v;
                    tb[b] = tb[b] + v;
                }
                worst = worst.max((row - self.p_ta[t * na + a]).abs());
            }
            for b in 0..nb {
                worst = worst.max((tb[b] - self.p_tb[t * nb + b]).abs());
            }
        }
        worst
    }

    /// Strictly interior feasible start: the input itself when it already has
    /// full support on every block, otherwise a mixture with the per-target
    /// independent coupling `p(t,a) p(t,b) / p(t)`.
    fn start(&self) -> Vec<T> {
        let (na, nb) = (self.na, self.nb);
        let interior = self.blocks.iter().all(|blk| {
            blk.rows.iter().all(|&a| {
                blk.cols.iter().all(|&b| self.p[(blk.t * na + a) * nb + b] > T::zero())
            })
        });
        if interior {
            return self.p.clone();
        }
        let w = T::lit(START_MIX);
        let mut q = self.p.clone();
        for blk in &self.blocks {
            let pt: T = blk.rows.iter().map(|&a| self.p_ta[blk.t * na + a]).sum();
            for &a in &blk.rows {
                for &b in &blk.cols {
                    let i = (blk.t * na + a) * nb + b;
                    let ind = self.p_ta[blk.t * na + a] * self.p_tb[blk.t * nb + b] / pt;
                    q[i] = (T::one() - w) * self.p[i] + w * ind;
                }
            }
        }
        q
    }

    /// Log-barrier path following: for a decreasing sequence of weights `μ`
    /// minimize `f(q) − μ Σ ln q` over the block cells by damped Newton
    /// steps. A centred point of weight `μ` is within `m·μ` of the optimum
    /// (`m` barrier cells), which is what certifies the final tolerance,
    /// including optima on the boundary of the polytope.
    fn newton(&self, cfg: &SolverConfig, target: Role) -> Result<(Vec<T>, SolveStats)> {
        let k = self.basis.len();
        let nab = self.na * self.nb;
        let tol = T::lit(cfg.tol_bits) * T::ln2();

        // Which exchange directions touch each cell and each (a,b) fiber.
        let mut by_cell: std::collections::HashMap<usize, Vec<(usize, f64)>> = Default::default();
        let mut by_fiber: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nab];
        for (j, cells) in self.basis.iter().enumerate() {
            for (c, s) in cells.iter().zip(SIGNS) {
                by_cell.entry(*c).or_default().push((j, s));
                by_fiber[c % nab].push((j, s));
            }
        }
        let mut by_cell: Vec<(usize, Vec<(usize, f64)>)> = by_cell.into_iter().collect();
        by_cell.sort_by_key(|(c, _)| *c);
        let barrier_cells: Vec<usize> = by_cell.iter().map(|(c, _)| *c).collect();
        let fibers: Vec<(usize, Vec<(usize, f64)>)> = by_fiber
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_empty())
            .collect();

        let m = T::lit(barrier_cells.len() as f64);
        let mu_end = tol / (T::lit(10.0) * m);
        let centred = tol / T::lit(10.0);
        let mut mu = T::lit(MU_START).max(mu_end);

        let mut q = self.start();
        let mut trace = vec![self.to_bits(self.objective(&q)).f64()];
        let mut max_resid = self.marginal_residual(&q).f64();
        let mut hess = vec![T::zero(); k * k];
        let mut grad = vec![T::zero(); k];
        let mut dir = vec![T::zero(); k];
        let mut cell_dir = vec![T::zero(); q.len()];
        let mut trial = q.clone();
        let mut iters = 0;

        loop {
            let mut fb = self.barrier_objective(&q, mu, &barrier_cells);
            loop {
                if iters >= cfg.max_iters {
                    return Err(PidError::NonConvergence {
                        target,
                        iterations: iters,
                        best_objective_bits: self.to_bits(self.objective(&q)).f64(),
                        gap_estimate_bits: (m * mu / T::ln2()).f64(),
                    });
                }
                let qab = self.fiber_mass(&q);
                for (j, cells) in self.basis.iter().enumerate() {
                    let mut g = T::zero();
                    for (c, s) in cells.iter().zip(SIGNS) {
                        let v = q[*c];
                        g = g + T::lit(s) * ((v / qab[self.ab_of(*c)]).ln() - mu / v);
                    }
                    grad[j] = g;
                }
                hess.iter_mut().for_each(|h| *h = T::zero());
                for (c, list) in &by_cell {
                    let v = q[*c];
                    accumulate(&mut hess, k, list, T::one() / v + mu / (v * v));
                }
                for (ab, list) in &fibers {
                    accumulate(&mut hess, k, list, -T::one() / qab[*ab]);
                }
                if !newton_direction(&hess, &grad, k, &mut dir) {
                    scaled_gradient(&hess, &grad, k, &mut dir);
                }
                let decrement: T = -grad.iter().zip(&dir).map(|(g, d)| *g * *d).sum::<T>();
                if decrement / T::lit(2.0) < centred {
                    break;
                }
                iters += 1;
                let mut step = self.line_search(&q, fb, mu, &barrier_cells, &grad, &dir, &mut cell_dir, &mut trial);
                if step.is_none() {
                    scaled_gradient(&hess, &grad, k, &mut dir);
                    step = self.line_search(&q, fb, mu, &barrier_cells, &grad, &dir, &mut cell_dir, &mut trial);
                }
                // No descent possible at working precision: this centre is as good as it gets.
                let Some(f_new) = step else { break };
                std::mem::swap(&mut q, &mut trial);
                fb = f_new;
                trace.push(self.to_bits(self.objective(&q)).f64());
                max_resid = max_resid.max(self.marginal_residual(&q).f64());
            }
            if mu <= mu_end {
                break;
            }
            mu = (mu * T::lit(MU_SHRINK)).max(mu_end);
        }
        let mut stats = self.stats(Engine::Newton, iters, trace, max_resid);
        stats.gap_bound_bits = ((m * mu + centred) / T::ln2()).f64();
        Ok((q, stats))
    }

    fn barrier_objective(&self, q: &[T], mu: T, cells: &[usize]) -> T {
        self.objective(q) - mu * cells.iter().map(|&c| q[c].ln()).sum::<T>()
    }

    /// Armijo backtracking on the barrier objective along `dir`, truncated to
    /// stay strictly inside the polytope. Returns the new barrier objective.
    #[allow(clippy::too_many_arguments)]
    fn line_search(
        &self,
        q: &[T],
        f: T,
        mu: T,
        cells: &[usize],
        grad: &[T],
        dir: &[T],
        cell_dir: &mut [T],
        trial: &mut [T],
    ) -> Option<T> {
        let slope: T = grad.iter().zip(dir).map(|(g, d)| *g * *d).sum();
        if !(slope < T::zero()) {
            return None;
        }
        cell_dir.iter_mut().for_each(|v| *v = T::zero());
        for (cells, &d) in self.basis.iter().zip(dir) {
            for (c, s) in cells.iter().zip(SIGNS) {
                cell_dir[*c] = cell_dir[*c] + T::lit(s) * d;
            }
        }
        let mut alpha_max = T::infinity();
        for &c in cells {
            if cell_dir[c] < T::zero() {
                alpha_max = alpha_max.min(q[c] / -cell_dir[c]);
            }
        }
        let mut alpha = T::one().min(alpha_max * T::lit(TO_BOUNDARY));
        for _ in 0..80 {
            for i in 0..q.len() {
                trial[i] = q[i] + alpha * cell_dir[i];
            }
            if cells.iter().all(|&c| trial[c] > T::zero()) {
                let f_new = self.barrier_objective(trial, mu, cells);
                if f_new <= f + T::lit(ARMIJO) * alpha * slope && f_new < f {
                    return Some(f_new);
                }
            }
            alpha = alpha / T::lit(2.0);
        }
        None
    }

    fn alternating(&self, cfg: &SolverConfig, target: Role) -> Result<(Vec<T>, SolveStats)> {
        let (na, nb) = (self.na, self.nb);
        let tol = T::lit(cfg.tol_bits) * T::ln2();
        let inner_tol = T::lit(cfg.marginal_tol * 1e-2);
        let mut q = self.start();
        let mut f = self.objective(&q);
        let mut trace = vec![self.to_bits(f).f64()];
        let mut max_resid = self.marginal_residual(&q).f64();
        let mut scalings: Vec<(Vec<T>, Vec<T>)> = self
            .blocks
            .iter()
            .map(|b| (vec![T::one(); b.rows.len()], vec![T::one(); b.cols.len()]))
            .collect();

        for iter in 0..cfg.max_iters {
            let s = self.fiber_mass(&q);
            let mut next = q.clone();
            for (blk, (u, v)) in self.blocks.iter().zip(scalings.iter_mut()) {
                let rows: Vec<T> = blk.rows.iter().map(|&a| self.p_ta[blk.t * na + a]).collect();
                let cols: Vec<T> = blk.cols.iter().map(|&b| self.p_tb[blk.t * nb + b]).collect();
                let kernel: Vec<T> = blk
                    .rows
                    .iter()
                    .flat_map(|&a| blk.cols.iter().map(move |&b| a * nb + b))
                    .map(|ab| s[ab])
                    .collect();
                sinkhorn(&kernel, &rows, &cols, u, v, inner_tol, 10_000);
                let m = blk.cols.len();
                for (i, &a) in blk.rows.iter().enumerate() {
                    for (j, &b) in blk.cols.iter().enumerate() {
                        next[(blk.t * na + a) * nb + b] = u[i] * kernel[i * m + j] * v[j];
                    }
                }
            }
            let f_new = self.objective(&next);
            max_resid = max_resid.max(self.marginal_residual(&next).f64());
            if f_new > f {
                // Inexact projection overshoot: the previous iterate stands.
                return Ok((q, self.stats(Engine::Alternating, iter, trace, max_resid)));
            }
            let decrease = f - f_new;
            q = next;
            f = f_new;
            trace.push(self.to_bits(f).f64());
            if decrease < tol {
                return Ok((q, self.stats(Engine::Alternating, iter + 1, trace, max_resid)));
            }
        }
        let last = trace.len();
        let gap = if last >= 2 { trace[last - 2] - trace[last - 1] } else { f64::NAN };
        Err(PidError::NonConvergence {
            target,
            iterations: cfg.max_iters,
            best_objective_bits: self.to_bits(f).f64(),
            gap_estimate_bits: gap,
        })
    }

    fn stats(&self, engine: Engine, iterations: usize, trace: Vec<f64>, resid: f64) -> SolveStats {
        SolveStats {
            engine,
            dimension: self.basis.len(),
            iterations,
            objective_trace: trace,
            max_marginal_residual: resid,
            input_was_optimal: false,
            gap_bound_bits: f64::NAN,
        }
    }
}

/// Steepest descent in the metric given by the Hessian diagonal.
fn scaled_gradient<T: Real>(hess: &[T], grad: &[T], k: usize, dir: &mut [T]) {
    for j in 0..k {
        let h = hess[j * k + j];
        dir[j] = -grad[j] / if h > T::zero() { h } else { T::one() };
    }
}

fn accumulate<T: Real>(hess: &mut [T], k: usize, list: &[(usize, f64)], w: T) {
    for &(i, si) in list {
        let wi = w * T::lit(si);
        for &(j, sj) in list {
            hess[i * k + j] = hess[i * k + j] + wi * T::lit(sj);
        }
    }
}

/// Solves `(H + μ diag) d = −g` after symmetric diagonal scaling, raising the
/// damping `μ` until the factorization succeeds.
fn newton_direction<T: Real>(hess: &[T], grad: &[T], k: usize, dir: &mut [T]) -> bool {
    let scale: Vec<T> = (0..k)
        .map(|i| {
            let h = hess[i * k + i];
            if h > T::zero() {
                T::one() / h.sqrt()
            } else {
                T::one()
            }
        })
        .collect();
    let mut mu = T::lit(1e-12);
    let mut a = vec![T::zero(); k * k];
    for _ in 0..12 {
        for i in 0..k {
            for j in 0..k {
                a[i * k + j] = hess[i * k + j] * scale[i] * scale[j];
            }
            a[i * k + i] = a[i * k + i] + mu;
        }
        for i in 0..k {
            dir[i] = -grad[i] * scale[i];
        }
        if cholesky_solve(&mut a, k, dir) {
            for i in 0..k {
                dir[i] = dir[i] * scale[i];
            }
            if dir.iter().all(|d| d.is_finite()) {
                return true;
            }
        }
        mu = mu * T::lit(100.0);
    }
    false
}

/// In-place Cholesky factorization of the symmetric matrix `a` followed by
/// forward/back substitution of `b`. Returns false if `a` is not positive definite.
pub(crate) fn cholesky_solve<T: Real>(a: &mut [T], n: usize, b: &mut [T]) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for m in 0..j {
            d = d - a[j * n + m] * a[j * n + m];
        }
        if !(d > T::zero()) {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for m in 0..j {
                s = s - a[i * n + m] * a[j * n + m];
            }
            a[i * n + j] = s / d;
        }
    }
    for i in 0..n {
        let mut s = b[i];
        for m in 0..i {
            s = s - a[i * n + m] * b[m];
        }
        b[i] = s / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for m in (i + 1)..n {
            s = s - a[m * n + i] * b[m];
        }
        b[i] = s / a[i * n + i];
    }
    true
}

/// Scales `kernel` (row-major, `rows.len() × cols.len()`) to the given
/// marginals: the result is `u_i K_ij v_j`.
fn sinkhorn<T: Real>(
    kernel: &[T],
    rows: &[T],
    cols: &[T],
    u: &mut [T],
    v: &mut [T],
    tol: T,
    max_iter: usize,
) {
    let (n, m) = (rows.len(), cols.len());
    for _ in 0..max_iter {
        for i in 0..n {
            let s: T = (0..m).map(|j| kernel[i * m + j] * v[j]).sum();
            u[i] = if s > T::zero() { rows[i] / s } else { T::zero() };
        }
        let mut err = T::zero();
        for j in 0..m {
            let s: T = (0..n).map(|i| u[i] * kernel[i * m + j]).sum();
            let col = s * v[j];
            err = err.max((col - cols[j]).abs());
            v[j] = if s > T::zero() { cols[j] / s } else { T::zero() };
        }
        if err < tol {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Alphabet;
    use approx::assert_abs_diff_eq;

    fn binary(w: [f64; 8]) -> JointDist3<f64> {
        let al = [0; 3].map(|_| Alphabet::numeric(2).unwrap());
        JointDist3::normalized(al, w.to_vec()).unwrap()
    }

    fn xor() -> JointDist3<f64> {
        let mut w = [0.0; 8];
        for y in 0..2 {
            for z in 0..2 {
                w[((y ^ z) * 2 + y) * 2 + z] = 1.0;
            }
        }
        binary(w)
    }

    fn and_gate() -> JointDist3<f64> {
        let mut w = [0.0; 8];
        for y in 0..2 {
            for z in 0..2 {
                w[((y & z) * 2 + y) * 2 + z] = 1.0;
            }
        }
        binary(w)
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig { tol_bits: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SolverConfig { max_iters: 0, ..Default::default() };
        assert!(solve_pid(&xor(), Role::X, &bad).is_err());
    }

    #[test]
    fn xor_is_pure_synergy() {
        for t in Role::ALL {
            let s = solve_pid(&xor(), t, &SolverConfig::default()).unwrap();
            let a = s.atoms;
            assert_abs_diff_eq!(a.si, 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(a.ui_a, 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(a.ui_b, 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(a.ci, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn and_gate_redundancy() {
        let s = solve_pid(&and_gate(), Role::X, &SolverConfig::default()).unwrap();
        assert_abs_diff_eq!(s.atoms.si, 0.3113, epsilon = 1e-4);
        assert_abs_diff_eq!(s.atoms.ui_a, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.atoms.ui_b, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn returned_point_is_feasible_and_optimal_value_matches() {
        let d = binary([0.1, 0.05, 0.2, 0.15, 0.12, 0.08, 0.07, 0.23]);
        let s = solve_pid(&d, Role::Y, &SolverConfig::default()).unwrap();
        let (pm, qm) = (d.permuted([Role::Y, Role::X, Role::Z]), s.point.q.permuted([Role::Y, Role::X, Role::Z]));
        for keep in [Vars::pair(Role::X, Role::Y), Vars::pair(Role::Y, Role::Z)] {
            let a = crate::dist::marginal(&d, keep).unwrap();
            let b = crate::dist::marginal(&s.point.q, keep).unwrap();
            for (x, y) in a.probs().iter().zip(b.probs()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        assert_abs_diff_eq!(target_information(&qm), s.point.objective, epsilon = 1e-12);
        assert!(target_information(&pm) >= s.point.objective - 1e-12);
    }

    #[test]
    fn newton_certifies_its_gap() {
        let d = binary([0.3, 0.01, 0.02, 0.17, 0.05, 0.2, 0.15, 0.1]);
        for t in Role::ALL {
            let s = solve_pid(&d, t, &SolverConfig::default()).unwrap();
            let trace = &s.stats.objective_trace;
            assert!(trace.last().unwrap() <= &trace[0], "{trace:?}");
            assert!(s.stats.gap_bound_bits <= 1e-10, "{:?}", s.stats);
        }
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let mut a = vec![4.0, 2.0, 2.0, 3.0];
        let mut b = vec![2.0, 1.0];
        assert!(cholesky_solve(&mut a, 2, &mut b));
        assert_abs_diff_eq!(b[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(b[1], 0.0, epsilon = 1e-15);
        let mut indefinite = vec![1.0, 2.0, 2.0, 1.0];
        assert!(!cholesky_solve(&mut indefinite, 2, &mut [0.0, 0.0]));
    }

    #[test]
    fn single_precision_and_gate() {
        let d: JointDist3<f32> = and_gate().cast().unwrap();
        let s = solve_pid(&d, Role::X, &SolverConfig::default()).unwrap();
        assert!((s.atoms.si - 0.3113).abs() < 1e-3);
    }
}
