//! Self-check: solver against the brute-force scan, plus every report identity,
//! on the catalog and on seeded random systems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use trivariate_pid::catalog::{make_and, make_copy, make_dice, make_dyadic, make_markov, make_parallel, make_triadic, make_xor};
use trivariate_pid::format::to_pmf_json;
use trivariate_pid::oracle::brute_force_pid;
use trivariate_pid::{Alphabet, JointDist3, PidError, Role, SolverConfig};

use crate::output::fmt_num;
use crate::report::analyse;

/// Allowed gap between solver and scan, per atom (bits).
pub const ATOM_TOL: f64 = 1e-4;
/// Final bracket width of every coordinate search in the brute-force scan.
pub const SCAN_RESOLUTION: f64 = 1e-6;

pub struct Case {
    pub name: String,
    pub dist: JointDist3,
}

fn simplex(rng: &mut ChaCha8Rng, n: usize, sparsity: f64) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..n).map(|_| if rng.gen::<f64>() < sparsity { 0.0 } else { rng.gen() }).collect();
        let s: f64 = w.iter().sum();
        if s > 0.0 {
            return w.into_iter().map(|v| v / s).collect();
        }
    }
}

pub fn cases(seed: u64, random: usize) -> Vec<Case> {
    let mut out = Vec::new();
    let mut add = |name: String, d: trivariate_pid::Result<JointDist3>| {
        out.push(Case { name, dist: d.expect("catalog parameters are valid") });
    };
    for l in [0.0, 0.5, 1.0] {
        add(format!("copy lambda={l}"), make_copy(l));
        add(format!("and lambda={l}"), make_and(l));
    }
    add("xor".into(), make_xor());
    add("dice lambda=0.5 alpha=1".into(), make_dice(0.5, 1));
    add("dice lambda=0.5 alpha=6".into(), make_dice(0.5, 6));
    add("dyadic".into(), make_dyadic());
    add("triadic".into(), make_triadic());
    add("parallel 0.5,0.5,0.5".into(), make_parallel(0.5, 0.5, 0.5));
    add("parallel 0,1,0.5".into(), make_parallel(0.0, 1.0, 0.5));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..2 {
        let pz = simplex(&mut rng, 2, 0.0);
        let xz: Vec<Vec<f64>> = (0..2).map(|_| simplex(&mut rng, 2, 0.2)).collect();
        let yz: Vec<Vec<f64>> = (0..2).map(|_| simplex(&mut rng, 3, 0.2)).collect();
        add(format!("markov {k}"), make_markov(&pz, &xz, &yz));
    }
    for k in 0..random {
        let shape = [rng.gen_range(2..=3), rng.gen_range(2..=3), rng.gen_range(2..=3)];
        let n = shape.iter().product();
        let w = simplex(&mut rng, n, 0.2);
        let al = shape.map(|s| Alphabet::numeric(s).expect("non-empty alphabet"));
        add(format!("random {k} {}x{}x{}", shape[0], shape[1], shape[2]), JointDist3::normalized(al, w));
    }
    out
}

#[derive(Default)]
pub struct Outcome {
    pub oracle_checks: usize,
    pub worst_atom: f64,
    pub worst_identity: f64,
    pub failures: Vec<String>,
}

fn replay(case: &Case, target: Option<Role>) -> String {
    json!({ "case": case.name, "target": target, "pmf": to_pmf_json(&case.dist) }).to_string()
}

fn check_case(case: &Case, cfg: &SolverConfig) -> Outcome {
    let mut o = Outcome::default();
    let a = match analyse(&case.dist, cfg) {
        Ok(a) => a,
        Err(e) => {
            o.failures.push(format!("{}: {e}\n  replay: {}", case.name, replay(case, None)));
            return o;
        }
    };
    o.worst_identity = a.worst_residual;
    for t in Role::ALL {
        let scan = match brute_force_pid(&case.dist, t, SCAN_RESOLUTION) {
            Ok(s) => s,
            Err(PidError::DimensionGuard { .. }) => continue,
            Err(e) => {
                o.failures.push(format!("{} target {t}: scan failed: {e}\n  replay: {}", case.name, replay(case, Some(t))));
                continue;
            }
        };
        o.oracle_checks += 1;
        let solved = a.pids.get(t).as_array();
        let gap = solved.iter().zip(scan.as_array()).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        o.worst_atom = o.worst_atom.max(gap);
        if !(gap <= ATOM_TOL) {
            o.failures.push(format!(
                "{} target {t}: solver {:?} vs scan {:?} (gap {gap:e})\n  replay: {}",
                case.name,
                solved,
                scan.as_array(),
                replay(case, Some(t))
            ));
        }
    }
    o
}

pub fn run(seed: u64, random: usize, cfg: &SolverConfig) -> (usize, Outcome) {
    let cases = cases(seed, random);
    let results: Vec<Outcome> = cases.par_iter().map(|c| check_case(c, cfg)).collect();
    let mut total = Outcome::default();
    for r in results {
        total.oracle_checks += r.oracle_checks;
        total.worst_atom = total.worst_atom.max(r.worst_atom);
        total.worst_identity = total.worst_identity.max(r.worst_identity);
        total.failures.extend(r.failures);
    }
    (cases.len(), total)
}

pub fn summary(n: usize, o: &Outcome) -> String {
    let mut s = format!(
        "cases: {n}\noracle comparisons: {}\nworst atom residual vs brute force: {}\nworst identity residual: {}\n",
        o.oracle_checks,
        fmt_num(o.worst_atom, 3),
        fmt_num(o.worst_identity, 3)
    );
    for f in &o.failures {
        s.push_str(&format!("FAIL {f}\n"));
    }
    s.push_str(if o.failures.is_empty() { "PASS\n" } else { "FAILED\n" });
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_list_is_seeded() {
        let a = cases(7, 5);
        let b = cases(7, 5);
        let c = cases(8, 5);
        assert_eq!(a.len(), 20);
        assert!(a.iter().zip(&b).all(|(x, y)| x.name == y.name && x.dist == y.dist));
        assert!(a.iter().zip(&c).any(|(x, y)| x.dist != y.dist));
    }
}
