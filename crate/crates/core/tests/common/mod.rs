//! Helpers shared by the integration tests: seeded random systems and
//! Shannon quantities computed by direct enumeration, independent of the
//! library's marginalization code.

#![allow(dead_code)]

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trivariate_pid::{Alphabet, JointDist3, Role};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random weights on `shape`, each cell zeroed with probability `sparsity`.
pub fn random_dist(rng: &mut ChaCha8Rng, shape: [usize; 3], sparsity: f64) -> JointDist3 {
    let n = shape.iter().product::<usize>();
    loop {
        let w: Vec<f64> = (0..n)
            .map(|_| if rng.gen::<f64>() < sparsity { 0.0 } else { rng.gen::<f64>() })
            .collect();
        if w.iter().any(|v| *v > 0.0) {
            let al = shape.map(|k| Alphabet::numeric(k).unwrap());
            return JointDist3::normalized(al, w).unwrap();
        }
    }
}

/// Random probability vector of length `n`, entries zeroed with probability
/// `sparsity` (at least one entry survives).
pub fn random_simplex(rng: &mut ChaCha8Rng, n: usize, sparsity: f64) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..n)
            .map(|_| if rng.gen::<f64>() < sparsity { 0.0 } else { rng.gen::<f64>() })
            .collect();
        let s: f64 = w.iter().sum();
        if s > 0.0 {
            return w.into_iter().map(|v| v / s).collect();
        }
    }
}

/// Shannon quantities by brute-force enumeration of the support.
pub struct Enumerated {
    cells: Vec<([usize; 3], f64)>,
}

impl Enumerated {
    pub fn new(d: &JointDist3) -> Self {
        Enumerated { cells: d.support().map(|(x, y, z, p)| ([x, y, z], p)).collect() }
    }

    /// Entropy of the variables in `vars`, in bits.
    pub fn h(&self, vars: &[Role]) -> f64 {
        let mut m: HashMap<Vec<usize>, f64> = HashMap::new();
        for (o, p) in &self.cells {
            *m.entry(vars.iter().map(|r| o[r.index()]).collect()).or_default() += p;
        }
        -m.values().filter(|p| **p > 0.0).map(|p| p * p.log2()).sum::<f64>()
    }

    pub fn mi(&self, a: &[Role], b: &[Role]) -> f64 {
        let ab: Vec<Role> = a.iter().chain(b).copied().collect();
        self.h(a) + self.h(b) - self.h(&ab)
    }

    pub fn cmi(&self, a: Role, b: Role, c: Role) -> f64 {
        self.h(&[a, c]) + self.h(&[b, c]) - self.h(&[a, b, c]) - self.h(&[c])
    }

    pub fn co_information(&self, a: Role, b: Role, c: Role) -> f64 {
        self.mi(&[a], &[b]) - self.cmi(a, b, c)
    }
}

/// `p(u, v)` for two bits driven by a hidden uniform bit at coupling λ,
/// written out in closed form: `½(a² + b²)` on the diagonal, `ab` off it,
/// with `a = 1 − λ/2`, `b = λ/2`.
pub fn coupled_pair_closed_form(lambda: f64) -> [[f64; 2]; 2] {
    let (a, b) = (1.0 - lambda / 2.0, lambda / 2.0);
    let same = 0.5 * (a * a + b * b);
    [[same, a * b], [a * b, same]]
}

/// Mutual information of a 2-D table (rows × cols), in bits.
pub fn table_mi(p: &[Vec<f64>]) -> f64 {
    let rows: Vec<f64> = p.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..p[0].len()).map(|j| p.iter().map(|r| r[j]).sum()).collect();
    let mut i = 0.0;
    for (r, row) in p.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if v > 0.0 {
                i += v * (v / (rows[r] * cols[c])).log2();
            }
        }
    }
    i
}
