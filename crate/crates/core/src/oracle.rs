//! Exhaustive scan of the marginal-constraint polytope for low-dimensional systems.
//!
//! Used to cross-check [`crate::solver::solve_pid`]. It shares no code with
//! the solver's optimization path: the polytope is parameterized
//! independently (anchored at the last row and column of each block) and the
//! objective is minimized by nested golden-section searches. Each coordinate
//! is searched over its exact feasible interval given the outer coordinates,
//! found by enumerating the vertices of the remaining slice. Partial minima of
//! a convex function are convex, so every nested search is unimodal.

use crate::dist::{conditional_mutual_information, mutual_information, JointDist3, Role, Vars};
use crate::error::{PidError, Result};
use crate::scalar::Real;
use crate::solver::{clamp_atom, PidAtoms};

/// Largest number of free polytope coordinates the scan accepts.
pub const MAX_ORACLE_DIM: usize = 4;

const GOLDEN: f64 = 0.618_033_988_749_894_8;
/// Slack on cell nonnegativity when testing vertices and points.
const FEAS_TOL: f64 = 1e-12;

struct Scan {
    shape: [usize; 3],
    base: Vec<f64>,
    /// Per coordinate: the cells it moves, with sign.
    coords: Vec<Vec<(usize, f64)>>,
    /// Per touched cell: base mass and coefficient of every coordinate.
    rows: Vec<(f64, Vec<f64>)>,
    resolution: f64,
    best: (f64, Vec<f64>),
    work: Vec<f64>,
}

/// Solves the square system `m x = r` by Gaussian elimination with partial pivoting.
fn solve_square(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = r.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        r.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            r[row] -= f * r[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let s: f64 = (col + 1..n).map(|k| m[col][k] * x[k]).sum();
        x[col] = (r[col] - s) / m[col][col];
    }
    Some(x)
}

/// All `k`-element subsets of `0..n`, in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

impl Scan {
    /// Writes the point at `theta` into `out`; false if a cell goes negative.
    fn fill(&self, theta: &[f64], out: &mut Vec<f64>) -> bool {
        out.clear();
        out.extend_from_slice(&self.base);
        for (cells, &th) in self.coords.iter().zip(theta) {
            for &(c, s) in cells {
                out[c] += s * th;
            }
        }
        for v in out.iter_mut() {
            if *v < 0.0 {
                if *v < -FEAS_TOL {
                    return false;
                }
                *v = 0.0;
            }
        }
        true
    }

    /// `I_q(T:(A,B))` in bits, straight from the definition.
    fn information(&self, q: &[f64]) -> f64 {
        let [nt, na, nb] = self.shape;
        let mut qt = vec![0.0; nt];
        let mut qab = vec![0.0; na * nb];
        for t in 0..nt {
            for ab in 0..na * nb {
                qt[t] += q[t * na * nb + ab];
                qab[ab] += q[t * na * nb + ab];
            }
        }
        let mut i = 0.0;
        for t in 0..nt {
            for ab in 0..na * nb {
                let v = q[t * na * nb + ab];
                if v > 0.0 {
                    i += v * (v / (qt[t] * qab[ab])).log2();
                }
            }
        }
        i
    }

    fn leaf(&mut self, theta: &[f64]) -> f64 {
        let mut q = std::mem::take(&mut self.work);
        let v = if self.fill(theta, &mut q) { self.information(&q) } else { f64::INFINITY };
        self.work = q;
        if v < self.best.0 {
            self.best = (v, theta.to_vec());
        }
        v
    }

    /// Range of coordinate `level` over the slice with coordinates `..level` fixed.
    fn interval(&self, level: usize, theta: &[f64]) -> Option<(f64, f64)> {
        let free = self.coords.len() - level;
        // Constraint rows `a · θ_free ≥ −rhs`.
        let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
        for (b, coef) in &self.rows {
            let rhs = b + (0..level).map(|k| coef[k] * theta[k]).sum::<f64>();
            let a = coef[level..].to_vec();
            if a.iter().all(|v| *v == 0.0) {
                if rhs < -FEAS_TOL {
                    return None;
                }
            } else {
                cons.push((a, rhs));
            }
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for pick in subsets(cons.len(), free) {
            let m: Vec<Vec<f64>> = pick.iter().map(|&i| cons[i].0.clone()).collect();
            let r: Vec<f64> = pick.iter().map(|&i| -cons[i].1).collect();
            let Some(x) = solve_square(m, r) else { continue };
            let ok = cons.iter().all(|(a, rhs)| a.iter().zip(&x).map(|(u, v)| u * v).sum::<f64>() + rhs >= -FEAS_TOL);
            if ok {
                lo = lo.min(x[0]);
                hi = hi.max(x[0]);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    fn search(&mut self, level: usize, theta: &mut Vec<f64>) -> f64 {
        if level == self.coords.len() {
            return self.leaf(theta);
        }
        let Some((mut a, mut b)) = self.interval(level, theta) else {
            return f64::INFINITY;
        };
        let eval = |scan: &mut Scan, x: f64, theta: &mut Vec<f64>| {
            theta[level] = x;
            scan.search(level + 1, theta)
        };
        let mut best = eval(self, a, theta).min(eval(self, b, theta));
        let mut c = b - GOLDEN * (b - a);
        let mut d = a + GOLDEN * (b - a);
        let mut fc = eval(self, c, theta);
        let mut fd = eval(self, d, theta);
        while b - a > self.resolution {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - GOLDEN * (b - a);
                fc = eval(self, c, theta);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + GOLDEN * (b - a);
                fd = eval(self, d, theta);
            }
            best = best.min(fc).min(fd);
        }
        best
    }
}

/// PID atoms of `I(target : others)` from a brute-force scan of the
/// constraint polytope. `resolution` is the final bracket width of every
/// coordinate search (probability units).
pub fn brute_force_pid<T: Real>(
    dist: &JointDist3<T>,
    target: Role,
    resolution: f64,
) -> Result<PidAtoms<T>> {
    if !(resolution > 0.0) {
        return Err(PidError::InvalidParameter(format!("resolution {resolution} must be positive")));
    }
    let (a_role, b_role) = target.others();
    let local = dist.permuted([target, a_role, b_role]);
    let shape = local.shape();
    let [nt, na, nb] = shape;
    let p: Vec<f64> = local.probs().iter().map(|v| v.f64()).collect();
    let cell = |t: usize, a: usize, b: usize| (t * na + a) * nb + b;

    let mut coords = Vec::new();
    for t in 0..nt {
        let row_mass: Vec<f64> = (0..na).map(|a| (0..nb).map(|b| p[cell(t, a, b)]).sum()).collect();
        let col_mass: Vec<f64> = (0..nb).map(|b| (0..na).map(|a| p[cell(t, a, b)]).sum()).collect();
        let rows: Vec<usize> = (0..na).filter(|&a| row_mass[a] > 0.0).collect();
        let cols: Vec<usize> = (0..nb).filter(|&b| col_mass[b] > 0.0).collect();
        if rows.len() < 2 || cols.len() < 2 {
            continue;
        }
        let (am, bn) = (*rows.last().unwrap(), *cols.last().unwrap());
        for &a in &rows[..rows.len() - 1] {
            for &b in &cols[..cols.len() - 1] {
                coords.push(vec![
                    (cell(t, a, b), 1.0),
                    (cell(t, am, bn), 1.0),
                    (cell(t, a, bn), -1.0),
                    (cell(t, am, b), -1.0),
                ]);
            }
        }
    }
    if coords.len() > MAX_ORACLE_DIM {
        return Err(PidError::DimensionGuard { dim: coords.len(), max: MAX_ORACLE_DIM });
    }
    let mut touched: Vec<usize> = coords.iter().flatten().map(|&(c, _)| c).collect();
    touched.sort_unstable();
    touched.dedup();
    let rows = touched
        .iter()
        .map(|&c| {
            let coef = coords
                .iter()
                .map(|cells| cells.iter().filter(|(k, _)| *k == c).map(|(_, s)| s).sum())
                .collect();
            (p[c], coef)
        })
        .collect();

    let mut scan = Scan { shape, base: p, coords, rows, resolution, best: (f64::INFINITY, Vec::new()), work: Vec::new() };
    let mut theta = vec![0.0; scan.coords.len()];
    scan.search(0, &mut theta);
    let best_theta = scan.best.1.clone();
    let mut q = Vec::new();
    assert!(scan.fill(&best_theta, &mut q), "best point is feasible");
    let q = JointDist3::<T>::normalized(local.alphabets().clone(), q.into_iter().map(T::lit).collect())?;

    // Atoms in the local (T, A, B) axis order.
    let (t, a, b) = (Role::X, Role::Y, Role::Z);
    let ui_a = clamp_atom(conditional_mutual_information(&q, t, a, b)?, "UI", target)?;
    let ui_b = clamp_atom(conditional_mutual_information(&q, t, b, a)?, "UI", target)?;
    let i_ta = mutual_information(&local, t, a)?;
    let si = clamp_atom(i_ta - ui_a, "SI", target)?;
    let ci = clamp_atom(
        mutual_information(&local, t, Vars::pair(a, b))? - mutual_information(&q, t, Vars::pair(a, b))?,
        "CI",
        target,
    )?;
    Ok(PidAtoms { target, source_a: a_role, source_b: b_role, si, ui_a, ui_b, ci })
}
