//! Parametric example systems.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dist::{Alphabet, JointDist3};
use crate::error::{PidError, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Copy,
    And,
    Xor,
    Dice,
    Dyadic,
    Triadic,
    Markov,
    Parallel,
}

impl SystemKind {
    pub const ALL: [SystemKind; 8] = [
        SystemKind::Copy,
        SystemKind::And,
        SystemKind::Xor,
        SystemKind::Dice,
        SystemKind::Dyadic,
        SystemKind::Triadic,
        SystemKind::Markov,
        SystemKind::Parallel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Copy => "copy",
            SystemKind::And => "and",
            SystemKind::Xor => "xor",
            SystemKind::Dice => "dice",
            SystemKind::Dyadic => "dyadic",
            SystemKind::Triadic => "triadic",
            SystemKind::Markov => "markov",
            SystemKind::Parallel => "parallel",
        }
    }

    /// Parameter names accepted by this kind.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            SystemKind::Copy | SystemKind::And => &["lambda"],
            SystemKind::Dice => &["lambda", "alpha"],
            SystemKind::Parallel => &["lambda1", "lambda2", "lambda3"],
            SystemKind::Markov => &["pz", "x_given_z", "y_given_z"],
            SystemKind::Xor | SystemKind::Dyadic | SystemKind::Triadic => &[],
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemKind {
    type Err = PidError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        SystemKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| PidError::InvalidParameter(format!("unknown system kind '{s}'")))
    }
}

/// A catalog system with its parameters, e.g. `{"kind": "and", "params": {"lambda": 0.5}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub kind: SystemKind,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
}

impl SystemSpec {
    pub fn new(kind: SystemKind) -> Self {
        SystemSpec { kind, params: BTreeMap::new() }
    }

    pub fn with(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.params.insert(name.to_string(), value.into());
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| PidError::Malformed(format!("system spec: {e}")))
    }

    fn real(&self, name: &str) -> Result<f64> {
        let v = self
            .params
            .get(name)
            .ok_or_else(|| PidError::InvalidParameter(format!("{} needs parameter '{name}'", self.kind)))?;
        v.as_f64()
            .ok_or_else(|| PidError::InvalidParameter(format!("parameter '{name}' must be a number, got {v}")))
    }

    fn vector(v: &Value, name: &str) -> Result<Vec<f64>> {
        v.as_array()
            .and_then(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
            .ok_or_else(|| PidError::InvalidParameter(format!("parameter '{name}' must be an array of numbers")))
    }

    fn table(&self, name: &str) -> Result<Vec<Vec<f64>>> {
        let v = self
            .params
            .get(name)
            .ok_or_else(|| PidError::InvalidParameter(format!("markov needs parameter '{name}'")))?;
        v.as_array()
            .ok_or_else(|| PidError::InvalidParameter(format!("parameter '{name}' must be an array of rows")))?
            .iter()
            .map(|row| SystemSpec::vector(row, name))
            .collect()
    }

    /// Builds the distribution, rejecting unknown or out-of-range parameters.
    pub fn build<T: Real>(&self) -> Result<JointDist3<T>> {
        let allowed = self.kind.params();
        if let Some(extra) = self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(PidError::InvalidParameter(format!(
                "{} does not take parameter '{extra}' (accepted: {allowed:?})",
                self.kind
            )));
        }
        match self.kind {
            SystemKind::Copy => make_copy(T::lit(self.real("lambda")?)),
            SystemKind::And => make_and(T::lit(self.real("lambda")?)),
            SystemKind::Xor => make_xor(),
            SystemKind::Dice => {
                let alpha = self.real("alpha")?;
                if alpha.fract() != 0.0 || !(1.0..=6.0).contains(&alpha) {
                    return Err(PidError::InvalidParameter(format!("alpha must be an integer in 1..=6, got {alpha}")));
                }
                make_dice(T::lit(self.real("lambda")?), alpha as u32)
            }
            SystemKind::Dyadic => make_dyadic(),
            SystemKind::Triadic => make_triadic(),
            SystemKind::Markov => {
                let pz = SystemSpec::vector(
                    self.params
                        .get("pz")
                        .ok_or_else(|| PidError::InvalidParameter("markov needs parameter 'pz'".into()))?,
                    "pz",
                )?;
                let lift = |rows: Vec<Vec<f64>>| -> Vec<Vec<T>> {
                    rows.into_iter().map(|r| r.into_iter().map(T::lit).collect()).collect()
                };
                make_markov(
                    &pz.into_iter().map(T::lit).collect::<Vec<_>>(),
                    &lift(self.table("x_given_z")?),
                    &lift(self.table("y_given_z")?),
                )
            }
            SystemKind::Parallel => make_parallel(
                T::lit(self.real("lambda1")?),
                T::lit(self.real("lambda2")?),
                T::lit(self.real("lambda3")?),
            ),
        }
    }
}

fn check_lambda<T: Real>(name: &str, lambda: T) -> Result<()> {
    if lambda >= T::zero() && lambda <= T::one() {
        Ok(())
    } else {
        Err(PidError::InvalidParameter(format!("{name} must lie in [0, 1], got {lambda}")))
    }
}

/// `p(u, v)` of two bits driven by a hidden uniform bit `W` with
/// `p(u|w) = λ/2 + (1−λ)δ_uw`, `W` summed out.
fn coupled_pair<T: Real>(lambda: T) -> [[T; 2]; 2] {
    let half = T::lit(0.5);
    let cond = |u: usize, w: usize| lambda * half + if u == w { T::one() - lambda } else { T::zero() };
    let mut p = [[T::zero(); 2]; 2];
    for (u, row) in p.iter_mut().enumerate() {
        for (v, cell) in row.iter_mut().enumerate() {
            *cell = (0..2).map(|w| half * cond(u, w) * cond(v, w)).sum();
        }
    }
    p
}

fn binary() -> Alphabet {
    Alphabet::numeric(2).expect("two labels")
}

fn gate_from_pair<T: Real>(
    lambda: T,
    x_alphabet: Alphabet,
    gate: impl Fn(usize, usize) -> usize,
) -> Result<JointDist3<T>> {
    check_lambda("lambda", lambda)?;
    let p = coupled_pair(lambda);
    JointDist3::from_fn([x_alphabet, binary(), binary()], |x, y, z| {
        if gate(y, z) == x {
            p[y][z]
        } else {
            T::zero()
        }
    })
}

/// `X = (Y, Z)` over λ-coupled input bits; `X` labels are `"y|z"`.
pub fn make_copy<T: Real>(lambda: T) -> Result<JointDist3<T>> {
    gate_from_pair(lambda, Alphabet::product(&binary(), &binary())?, |y, z| 2 * y + z)
}

/// `X = Y ∧ Z` over λ-coupled input bits.
pub fn make_and<T: Real>(lambda: T) -> Result<JointDist3<T>> {
    gate_from_pair(lambda, binary(), |y, z| y & z)
}

/// `X = Y ⊕ Z` with independent uniform inputs.
pub fn make_xor<T: Real>() -> Result<JointDist3<T>> {
    JointDist3::from_fn([binary(), binary(), binary()], |x, y, z| {
        if y ^ z == x {
            T::one()
        } else {
            T::zero()
        }
    })
}

/// Two dice coupled by `p(y,z) = λ/36 + (1−λ)/6·δ_yz`, combined as `X = y + α·z`.
pub fn make_dice<T: Real>(lambda: T, alpha: u32) -> Result<JointDist3<T>> {
    check_lambda("lambda", lambda)?;
    if !(1..=6).contains(&alpha) {
        return Err(PidError::InvalidParameter(format!("alpha must lie in 1..=6, got {alpha}")));
    }
    let alpha = alpha as usize;
    let sum = |y: usize, z: usize| (y + 1) + alpha * (z + 1);
    let mut sums: Vec<usize> = (0..6).flat_map(|y| (0..6).map(move |z| sum(y, z))).collect();
    sums.sort_unstable();
    sums.dedup();
    let xs = Alphabet::new(sums.iter().map(|s| s.to_string()))?;
    let faces = Alphabet::new((1..=6).map(|v| v.to_string()))?;
    let (uniform, diagonal) = (lambda / T::lit(36.0), (T::one() - lambda) / T::lit(6.0));
    JointDist3::from_fn([xs, faces.clone(), faces], |x, y, z| {
        if sums[x] == sum(y, z) {
            uniform + if y == z { diagonal } else { T::zero() }
        } else {
            T::zero()
        }
    })
}

/// Outcomes of the dyadic system, eight equiprobable rows over `{0,1,2,3}³`.
pub const DYADIC_TABLE: [[usize; 3]; 8] = [
    [0, 0, 0],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 3],
    [2, 1, 0],
    [2, 3, 1],
    [3, 1, 2],
    [3, 3, 3],
];

/// Outcomes of the triadic system, eight equiprobable rows over `{0,1,2,3}³`.
pub const TRIADIC_TABLE: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 1, 1],
    [0, 2, 2],
    [1, 3, 3],
    [2, 0, 2],
    [3, 1, 3],
    [2, 2, 0],
    [3, 3, 1],
];

fn from_table<T: Real>(rows: &[[usize; 3]; 8]) -> Result<JointDist3<T>> {
    let four = Alphabet::numeric(4)?;
    JointDist3::from_fn([four.clone(), four.clone(), four], |x, y, z| {
        if rows.contains(&[x, y, z]) {
            T::one()
        } else {
            T::zero()
        }
    })
}

pub fn make_dyadic<T: Real>() -> Result<JointDist3<T>> {
    from_table(&DYADIC_TABLE)
}

pub fn make_triadic<T: Real>() -> Result<JointDist3<T>> {
    from_table(&TRIADIC_TABLE)
}

fn check_stochastic<T: Real>(name: &str, row: &[T]) -> Result<()> {
    let total: T = row.iter().copied().sum();
    if row.iter().any(|p| !p.is_finite() || *p < T::zero()) || (total - T::one()).abs() > T::lit(T::NORM_TOL) {
        return Err(PidError::InvalidParameter(format!("{name} is not a probability vector (sum {total})")));
    }
    Ok(())
}

/// `p(x, y, z) = p(z)·p(x|z)·p(y|z)`; conditional tables are indexed `[z][x]` and `[z][y]`.
pub fn make_markov<T: Real>(pz: &[T], x_given_z: &[Vec<T>], y_given_z: &[Vec<T>]) -> Result<JointDist3<T>> {
    check_stochastic("pz", pz)?;
    let nz = pz.len();
    if x_given_z.len() != nz || y_given_z.len() != nz {
        return Err(PidError::InvalidParameter(format!(
            "conditional tables need one row per z value ({nz})"
        )));
    }
    let (nx, ny) = (x_given_z[0].len(), y_given_z[0].len());
    for (z, (rx, ry)) in x_given_z.iter().zip(y_given_z).enumerate() {
        if rx.len() != nx || ry.len() != ny {
            return Err(PidError::InvalidParameter(format!("conditional rows for z = {z} differ in length")));
        }
        check_stochastic(&format!("x_given_z[{z}]"), rx)?;
        check_stochastic(&format!("y_given_z[{z}]"), ry)?;
    }
    let alphabets = [Alphabet::numeric(nx)?, Alphabet::numeric(ny)?, Alphabet::numeric(nz)?];
    let mut probs = Vec::with_capacity(nx * ny * nz);
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                probs.push(pz[z] * x_given_z[z][x] * y_given_z[z][y]);
            }
        }
    }
    JointDist3::new(alphabets, probs)
}

/// `X = (X₁, X₂)`, `Y = (Y₁, Y₂)` and a bit `Z`: `X₁` and `Y₁` are each
/// coupled to `Z` (at λ₁ and λ₂), `X₂` to `Y₂` (at λ₃), with every pair
/// following the law of [`make_copy`]'s inputs. `X` and `Y` labels are `"a|b"`.
pub fn make_parallel<T: Real>(lambda1: T, lambda2: T, lambda3: T) -> Result<JointDist3<T>> {
    check_lambda("lambda1", lambda1)?;
    check_lambda("lambda2", lambda2)?;
    check_lambda("lambda3", lambda3)?;
    let (xz, yz, xy) = (coupled_pair(lambda1), coupled_pair(lambda2), coupled_pair(lambda3));
    let two = T::lit(2.0);
    let pair = Alphabet::product(&binary(), &binary())?;
    JointDist3::from_fn([pair.clone(), pair, binary()], |x, y, z| {
        let (x1, x2, y1, y2) = (x / 2, x % 2, y / 2, y % 2);
        // p(z) = 1/2, p(x₁|z) = 2·p(x₁,z), p(y₁|z) = 2·p(y₁,z).
        T::lit(0.5) * (two * xz[x1][z]) * (two * yz[y1][z]) * xy[x2][y2]
    })
}
