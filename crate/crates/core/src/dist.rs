//! Finite trivariate distributions and the Shannon quantities built on them.
//!
//! All information values are in bits. Cells with zero mass contribute
//! nothing to any entropy (`0 · log 0 = 0`); no smoothing is ever applied.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{PidError, Result};
use crate::scalar::{xlog2x, Real};

/// Upper bound on `|X|·|Y|·|Z|` for a dense table.
pub const MAX_CELLS: usize = 1_000_000;

/// One of the three variables of a trivariate system, identified by position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    X,
    Y,
    Z,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::X, Role::Y, Role::Z];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Role {
        Role::ALL[i]
    }

    /// The two remaining roles, in role order.
    pub fn others(self) -> (Role, Role) {
        match self {
            Role::X => (Role::Y, Role::Z),
            Role::Y => (Role::X, Role::Z),
            Role::Z => (Role::X, Role::Y),
        }
    }

    /// The role that is neither `self` nor `other`.
    ///
    /// # Panics
    /// If `self == other`.
    pub fn third(self, other: Role) -> Role {
        assert_ne!(self, other, "third() needs two distinct roles");
        Role::from_index(3 - self.index() - other.index())
    }

    pub fn name(self) -> &'static str {
        match self {
            Role::X => "X",
            Role::Y => "Y",
            Role::Z => "Z",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Role {
    type Err = PidError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "X" => Ok(Role::X),
            "Y" => Ok(Role::Y),
            "Z" => Ok(Role::Z),
            other => Err(PidError::InvalidParameter(format!("unknown variable '{other}'"))),
        }
    }
}

/// A subset of `{X, Y, Z}`, used to name marginals and joint arguments such as `(Y,Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Vars(u8);

impl Vars {
    pub const EMPTY: Vars = Vars(0);
    pub const ALL: Vars = Vars(0b111);

    pub fn pair(a: Role, b: Role) -> Vars {
        Vars::from(a).union(Vars::from(b))
    }

    pub fn union(self, other: Vars) -> Vars {
        Vars(self.0 | other.0)
    }

    pub fn contains(self, r: Role) -> bool {
        self.0 & (1 << r.index()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_disjoint(self, other: Vars) -> bool {
        self.0 & other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Member roles in role order.
    pub fn roles(self) -> impl Iterator<Item = Role> {
        Role::ALL.into_iter().filter(move |r| self.contains(*r))
    }
}

impl From<Role> for Vars {
    fn from(r: Role) -> Vars {
        Vars(1 << r.index())
    }
}

impl fmt::Display for Vars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.roles().map(Role::name).collect();
        if names.len() == 1 {
            f.write_str(names[0])
        } else {
            write!(f, "({})", names.join(","))
        }
    }
}

/// Ordered set of distinct outcome labels of one variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    labels: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(PidError::InvalidAlphabet("alphabet is empty".into()));
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(PidError::InvalidAlphabet(format!("duplicate label '{l}'")));
            }
        }
        Ok(Alphabet { labels })
    }

    /// Labels `"0"`, `"1"`, …, `"n-1"`.
    pub fn numeric(n: usize) -> Result<Self> {
        Alphabet::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Alphabet of pairs `(a,b)` in row-major order, labelled `"a|b"`.
    pub fn product(a: &Alphabet, b: &Alphabet) -> Result<Alphabet> {
        Alphabet::new(
            a.labels
                .iter()
                .flat_map(|la| b.labels.iter().map(move |lb| format!("{la}|{lb}"))),
        )
    }
}

/// Dense probability table over a subset of the variables.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbTable<T> {
    vars: Vars,
    shape: Vec<usize>,
    probs: Vec<T>,
}

impl<T: Real> ProbTable<T> {
    pub fn vars(&self) -> Vars {
        self.vars
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Cells in row-major order over the kept variables (role order).
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn total(&self) -> T {
        self.probs.iter().copied().sum()
    }
}

/// A probability mass function `p(x, y, z)` over three finite alphabets.
///
/// Cells are stored row-major with `z` varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDist3<T> {
    alphabets: [Alphabet; 3],
    probs: Vec<T>,
}

impl<T: Real> JointDist3<T> {
    /// Validates and wraps a dense table. Mass must already sum to one.
    pub fn new(alphabets: [Alphabet; 3], probs: Vec<T>) -> Result<Self> {
        let cells = check_shape(&alphabets, probs.len())?;
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < T::zero() {
                let (x, y, z) = unflatten(&alphabets, i);
                return Err(PidError::InvalidDistribution(format!(
                    "cell ({}, {}, {}) has invalid mass {p}",
                    alphabets[0].label(x),
                    alphabets[1].label(y),
                    alphabets[2].label(z)
                )));
            }
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::lit(T::NORM_TOL) {
            return Err(PidError::InvalidDistribution(format!(
                "total mass over {cells} cells is {total}, expected 1"
            )));
        }
        Ok(JointDist3 { alphabets, probs })
    }

    /// Builds a distribution from nonnegative weights, dividing by their sum.
    pub fn normalized(alphabets: [Alphabet; 3], weights: Vec<T>) -> Result<Self> {
        check_shape(&alphabets, weights.len())?;
        if weights.iter().any(|w| !w.is_finite() || *w < T::zero()) {
            return Err(PidError::InvalidDistribution(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: T = weights.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(PidError::InvalidDistribution("weights sum to zero".into()));
        }
        let probs = weights.into_iter().map(|w| w / total).collect();
        JointDist3::new(alphabets, probs)
    }

    /// Builds a distribution by evaluating `f(x, y, z)` on every cell and normalizing.
    pub fn from_fn(alphabets: [Alphabet; 3], mut f: impl FnMut(usize, usize, usize) -> T) -> Result<Self> {
        let [nx, ny, nz] = [alphabets[0].len(), alphabets[1].len(), alphabets[2].len()];
        let mut w = Vec::with_capacity(nx * ny * nz);
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    w.push(f(x, y, z));
                }
            }
        }
        JointDist3::normalized(alphabets, w)
    }

    pub fn alphabets(&self) -> &[Alphabet; 3] {
        &self.alphabets
    }

    pub fn alphabet(&self, role: Role) -> &Alphabet {
        &self.alphabets[role.index()]
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.alphabets[0].len(), self.alphabets[1].len(), self.alphabets[2].len()]
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> T {
        let [_, ny, nz] = self.shape();
        self.probs[(x * ny + y) * nz + z]
    }

    /// Outcomes with nonzero mass as `(x, y, z, p)` index tuples.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize, usize, T)> + '_ {
        let [_, ny, nz] = self.shape();
        self.probs.iter().enumerate().filter(|(_, p)| **p > T::zero()).map(move |(i, &p)| {
            (i / (ny * nz), (i / nz) % ny, i % nz, p)
        })
    }

    /// Reorders the axes: the result's axis `k` is this distribution's axis `order[k]`.
    pub fn permuted(&self, order: [Role; 3]) -> JointDist3<T> {
        assert!(
            order[0] != order[1] && order[1] != order[2] && order[0] != order[2],
            "order must be a permutation"
        );
        let alphabets = order.map(|r| self.alphabets[r.index()].clone());
        let [n0, n1, n2] = [alphabets[0].len(), alphabets[1].len(), alphabets[2].len()];
        let mut probs = vec![T::zero(); self.probs.len()];
        let mut src = [0usize; 3];
        for i0 in 0..n0 {
            for i1 in 0..n1 {
                for i2 in 0..n2 {
                    src[order[0].index()] = i0;
                    src[order[1].index()] = i1;
                    src[order[2].index()] = i2;
                    probs[(i0 * n1 + i1) * n2 + i2] = self.get(src[0], src[1], src[2]);
                }
            }
        }
        JointDist3 { alphabets, probs }
    }

    /// Joint entropy `H(X,Y,Z)`.
    pub fn joint_entropy(&self) -> T {
        -self.probs.iter().copied().map(xlog2x).sum::<T>()
    }

    /// Converts the scalar type, renormalizing to absorb rounding.
    pub fn cast<U: Real>(&self) -> Result<JointDist3<U>> {
        let w = self.probs.iter().map(|p| U::lit(p.f64())).collect();
        JointDist3::normalized(self.alphabets.clone(), w)
    }
}

fn check_shape(alphabets: &[Alphabet; 3], len: usize) -> Result<usize> {
    let cells = alphabets
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.len()))
        .unwrap_or(usize::MAX);
    if cells > MAX_CELLS {
        return Err(PidError::TooLarge { cells, limit: MAX_CELLS });
    }
    if cells != len {
        return Err(PidError::InvalidDistribution(format!(
            "table has {len} cells but the alphabets span {cells}"
        )));
    }
    Ok(cells)
}

fn unflatten(alphabets: &[Alphabet; 3], i: usize) -> (usize, usize, usize) {
    let (ny, nz) = (alphabets[1].len(), alphabets[2].len());
    (i / (ny * nz), (i / nz) % ny, i % nz)
}

/// Sums out every variable not in `keep`.
pub fn marginal<T: Real>(dist: &JointDist3<T>, keep: Vars) -> Result<ProbTable<T>> {
    if keep.is_empty() {
        return Err(PidError::EmptyVariableSet);
    }
    let full = dist.shape();
    let shape: Vec<usize> = keep.roles().map(|r| full[r.index()]).collect();
    let kept: Vec<usize> = keep.roles().map(Role::index).collect();
    let mut probs = vec![T::zero(); shape.iter().product()];
    let [_, ny, nz] = full;
    for (i, &p) in dist.probs.iter().enumerate() {
        if p == T::zero() {
            continue;
        }
        let idx = [i / (ny * nz), (i / nz) % ny, i % nz];
        let mut flat = 0;
        for (&k, &n) in kept.iter().zip(&shape) {
            flat = flat * n + idx[k];
        }
        probs[flat] = probs[flat] + p;
    }
    Ok(ProbTable { vars: keep, shape, probs })
}

/// Shannon entropy of a table in bits.
pub fn entropy<T: Real>(table: &ProbTable<T>) -> T {
    let h = -table.probs.iter().copied().map(xlog2x).sum::<T>();
    h.max(T::zero())
}

/// Entropy of the marginal over `vars`; zero for the empty set.
pub fn entropy_of<T: Real>(dist: &JointDist3<T>, vars: Vars) -> T {
    if vars.is_empty() {
        return T::zero();
    }
    if vars == Vars::ALL {
        return dist.joint_entropy().max(T::zero());
    }
    entropy(&marginal(dist, vars).expect("non-empty variable set"))
}

/// `H(a | given)`.
pub fn conditional_entropy<T: Real>(dist: &JointDist3<T>, a: Vars, given: Vars) -> Result<T> {
    if a.is_empty() {
        return Err(PidError::EmptyVariableSet);
    }
    if !a.is_disjoint(given) {
        return Err(PidError::OverlappingVariables(format!("H({a} | {given})")));
    }
    let h = entropy_of(dist, a.union(given)) - entropy_of(dist, given);
    clamp_info(h, || format!("H({a} | {given})"))
}

/// `I(a : b)`; either side may be a pair, e.g. `I(X : (Y,Z))`.
pub fn mutual_information<T: Real>(
    dist: &JointDist3<T>,
    a: impl Into<Vars>,
    b: impl Into<Vars>,
) -> Result<T> {
    let (a, b) = (a.into(), b.into());
    if a.is_empty() || b.is_empty() {
        return Err(PidError::EmptyVariableSet);
    }
    if !a.is_disjoint(b) {
        return Err(PidError::OverlappingVariables(format!("I({a} : {b})")));
    }
    let i = entropy_of(dist, a) + entropy_of(dist, b) - entropy_of(dist, a.union(b));
    clamp_info(i, || format!("I({a} : {b})"))
}

/// `I(a : b | c)` for three distinct variables.
pub fn conditional_mutual_information<T: Real>(
    dist: &JointDist3<T>,
    a: Role,
    b: Role,
    given: Role,
) -> Result<T> {
    if a == b || a == given || b == given {
        return Err(PidError::OverlappingVariables(format!("I({a} : {b} | {given})")));
    }
    let c = Vars::from(given);
    let i = entropy_of(dist, Vars::pair(a, given)) + entropy_of(dist, Vars::pair(b, given))
        - entropy_of(dist, Vars::ALL)
        - entropy_of(dist, c);
    clamp_info(i, || format!("I({a} : {b} | {given})"))
}

/// Co-information `I(X:Y) − I(X:Y|Z)`; symmetric in all three variables, may be negative.
pub fn co_information<T: Real>(dist: &JointDist3<T>) -> T {
    let h = |v: Vars| entropy_of(dist, v);
    let (x, y, z) = (Vars::from(Role::X), Vars::from(Role::Y), Vars::from(Role::Z));
    h(x) + h(y) + h(z) - h(x.union(y)) - h(x.union(z)) - h(y.union(z)) + h(Vars::ALL)
}

/// Co-information evaluated as `I(a:b) − I(a:b|c)` for one role assignment.
pub fn co_information_as<T: Real>(dist: &JointDist3<T>, a: Role, b: Role) -> Result<T> {
    let c = a.third(b);
    Ok(mutual_information(dist, a, b)? - conditional_mutual_information(dist, a, b, c)?)
}

pub(crate) fn clamp_info<T: Real>(value: T, what: impl FnOnce() -> String) -> Result<T> {
    if value >= T::zero() {
        Ok(value)
    } else if value >= -T::lit(T::INFO_CLAMP) {
        Ok(T::zero())
    } else {
        Err(PidError::Inconsistent(format!("{} = {value} is negative", what())))
    }
}

/// The six Shannon quantities decomposed by the three PID lattices, plus co-information.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShannonSummary<T> {
    pub i_xy: T,
    pub i_xz: T,
    pub i_yz: T,
    pub i_xy_given_z: T,
    pub i_xz_given_y: T,
    pub i_yz_given_x: T,
    pub co_information: T,
    pub joint_entropy: T,
}

impl<T: Real> ShannonSummary<T> {
    pub fn of(dist: &JointDist3<T>) -> Result<Self> {
        use Role::*;
        Ok(ShannonSummary {
            i_xy: mutual_information(dist, X, Y)?,
            i_xz: mutual_information(dist, X, Z)?,
            i_yz: mutual_information(dist, Y, Z)?,
            i_xy_given_z: conditional_mutual_information(dist, X, Y, Z)?,
            i_xz_given_y: conditional_mutual_information(dist, X, Z, Y)?,
            i_yz_given_x: conditional_mutual_information(dist, Y, Z, X)?,
            co_information: co_information(dist),
            joint_entropy: dist.joint_entropy(),
        })
    }

    pub fn mi(&self, a: Role, b: Role) -> T {
        match (a.min(b), a.max(b)) {
            (Role::X, Role::Y) => self.i_xy,
            (Role::X, Role::Z) => self.i_xz,
            (Role::Y, Role::Z) => self.i_yz,
            _ => panic!("mi() needs two distinct roles"),
        }
    }

    pub fn cmi(&self, a: Role, b: Role) -> T {
        match (a.min(b), a.max(b)) {
            (Role::X, Role::Y) => self.i_xy_given_z,
            (Role::X, Role::Z) => self.i_xz_given_y,
            (Role::Y, Role::Z) => self.i_yz_given_x,
            _ => panic!("cmi() needs two distinct roles"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::collections::HashMap;

    fn bits() -> Alphabet {
        Alphabet::numeric(2).unwrap()
    }

    fn from_rows(n: [usize; 3], rows: &[([usize; 3], f64)]) -> JointDist3<f64> {
        let al = n.map(|k| Alphabet::numeric(k).unwrap());
        let mut w = vec![0.0; n[0] * n[1] * n[2]];
        for &([x, y, z], p) in rows {
            w[(x * n[1] + y) * n[2] + z] += p;
        }
        JointDist3::new(al, w).unwrap()
    }

    fn xor() -> JointDist3<f64> {
        let rows: Vec<_> = (0..2)
            .flat_map(|y| (0..2).map(move |z| ([y ^ z, y, z], 0.25)))
            .collect();
        from_rows([2, 2, 2], &rows)
    }

    fn and_indep() -> JointDist3<f64> {
        let rows: Vec<_> = (0..2)
            .flat_map(|y| (0..2).map(move |z| ([y & z, y, z], 0.25)))
            .collect();
        from_rows([2, 2, 2], &rows)
    }

    // Oracle: entropies by explicit outcome enumeration through hash maps.
    fn oracle_h(rows: &[([usize; 3], f64)], keep: &[usize]) -> f64 {
        let mut m: HashMap<Vec<usize>, f64> = HashMap::new();
        for (o, p) in rows {
            *m.entry(keep.iter().map(|&k| o[k]).collect()).or_default() += p;
        }
        m.values().filter(|p| **p > 0.0).map(|p| -p * p.log2()).sum()
    }

    const DYADIC: [[usize; 3]; 8] = [
        [0, 0, 0], [0, 2, 1], [1, 0, 2], [1, 2, 3], [2, 1, 0], [2, 3, 1], [3, 1, 2], [3, 3, 3],
    ];
    const TRIADIC: [[usize; 3]; 8] = [
        [0, 0, 0], [1, 1, 1], [0, 2, 2], [1, 3, 3], [2, 0, 2], [3, 1, 3], [2, 2, 0], [3, 3, 1],
    ];

    fn rows8(t: &[[usize; 3]; 8]) -> Vec<([usize; 3], f64)> {
        t.iter().map(|&o| (o, 0.125)).collect()
    }

    #[test]
    fn alphabet_rejects_duplicates_and_empty() {
        assert!(Alphabet::new(["a", "b", "a"]).is_err());
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert_eq!(Alphabet::numeric(3).unwrap().position("2"), Some(2));
    }

    #[test]
    fn construction_rejects_bad_mass() {
        let al = [bits(), bits(), bits()];
        assert!(JointDist3::new(al.clone(), vec![0.125; 8]).is_ok());
        assert!(JointDist3::new(al.clone(), vec![0.126; 8]).is_err());
        let mut neg = vec![0.125; 8];
        neg[0] = -0.125;
        neg[1] = 0.375;
        assert!(JointDist3::new(al.clone(), neg).is_err());
        assert!(JointDist3::new(al.clone(), vec![0.25; 4]).is_err());
        assert!(JointDist3::normalized(al, vec![2.0; 8]).is_ok());
    }

    #[test]
    fn size_guard() {
        let big = Alphabet::numeric(101).unwrap();
        let err = JointDist3::<f64>::new([big.clone(), big.clone(), big], vec![]).unwrap_err();
        assert!(matches!(err, PidError::TooLarge { .. }));
    }

    #[test]
    fn marginal_of_triadic_x_is_uniform() {
        let d = from_rows([4, 4, 4], &rows8(&TRIADIC));
        let m = marginal(&d, Role::X.into()).unwrap();
        assert_eq!(m.probs(), &[0.25; 4]);
    }

    #[test]
    fn marginal_of_point_mass() {
        let d = from_rows([2, 3, 2], &[([1, 2, 0], 1.0)]);
        let m = marginal(&d, Role::Y.into()).unwrap();
        assert_eq!(m.probs(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn marginal_rejects_empty() {
        assert!(matches!(marginal(&xor(), Vars::EMPTY), Err(PidError::EmptyVariableSet)));
    }

    #[test]
    fn identity_marginal_keeps_entropy() {
        let d = from_rows([4, 4, 4], &rows8(&DYADIC));
        let m = marginal(&d, Vars::ALL).unwrap();
        assert_eq!(entropy(&m), d.joint_entropy());
    }

    #[test]
    fn entropy_examples() {
        let d = from_rows([4, 4, 4], &rows8(&DYADIC));
        assert_abs_diff_eq!(d.joint_entropy(), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(entropy_of(&xor(), Role::Y.into()), 1.0, epsilon = 1e-12);
        let det = from_rows([2, 2, 2], &[([0, 1, 0], 0.5), ([0, 0, 1], 0.5)]);
        assert_eq!(entropy_of(&det, Role::X.into()), 0.0);
    }

    #[test]
    fn mutual_information_examples() {
        use Role::*;
        assert_abs_diff_eq!(mutual_information(&xor(), X, Y).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            mutual_information(&xor(), X, Vars::pair(Y, Z)).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let rows = rows8(&DYADIC);
        let want = oracle_h(&rows, &[0]) + oracle_h(&rows, &[1]) - oracle_h(&rows, &[0, 1]);
        assert_abs_diff_eq!(want, 1.0, epsilon = 1e-12);
        let d = from_rows([4, 4, 4], &rows);
        assert_abs_diff_eq!(mutual_information(&d, X, Y).unwrap(), want, epsilon = 1e-12);
        assert!(mutual_information(&d, X, X).is_err());
        assert!(mutual_information(&d, Vars::pair(X, Y), Y).is_err());
    }

    #[test]
    fn conditional_mutual_information_examples() {
        use Role::*;
        assert_abs_diff_eq!(
            conditional_mutual_information(&xor(), X, Y, Z).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        // AND with independent inputs, oracle by enumeration.
        let rows: Vec<_> = (0..2)
            .flat_map(|y| (0..2).map(move |z| ([y & z, y, z], 0.25)))
            .collect();
        let want = oracle_h(&rows, &[1, 0]) + oracle_h(&rows, &[2, 0])
            - oracle_h(&rows, &[0, 1, 2])
            - oracle_h(&rows, &[0]);
        assert_abs_diff_eq!(want, 0.18872187554086728, epsilon = 1e-12);
        assert_abs_diff_eq!(
            conditional_mutual_information(&and_indep(), Y, Z, X).unwrap(),
            want,
            epsilon = 1e-12
        );
        assert!(conditional_mutual_information(&xor(), X, X, Z).is_err());
    }

    #[test]
    fn co_information_examples() {
        assert_abs_diff_eq!(co_information(&xor()), -1.0, epsilon = 1e-12);
        // Enumeration gives I(X:Y) = 1 and I(X:Y|Z) = 1, so the triadic co-information
        // vanishes (one bit of redundancy minus one bit of synergy).
        let rows = rows8(&TRIADIC);
        let i_xy = oracle_h(&rows, &[0]) + oracle_h(&rows, &[1]) - oracle_h(&rows, &[0, 1]);
        let i_xy_z = oracle_h(&rows, &[0, 2]) + oracle_h(&rows, &[1, 2])
            - oracle_h(&rows, &[0, 1, 2])
            - oracle_h(&rows, &[2]);
        assert_abs_diff_eq!(i_xy, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(i_xy_z, 1.0, epsilon = 1e-12);
        let tri = from_rows([4, 4, 4], &rows);
        assert_abs_diff_eq!(co_information(&tri), i_xy - i_xy_z, epsilon = 1e-12);
        let prod = JointDist3::from_fn(
            [bits(), Alphabet::numeric(3).unwrap(), bits()],
            |x, y, z| [0.3, 0.7][x] * [0.2, 0.5, 0.3][y] * [0.6, 0.4][z],
        )
        .unwrap();
        assert_abs_diff_eq!(co_information(&prod), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn permutation_round_trip() {
        let d = from_rows([4, 4, 4], &rows8(&DYADIC));
        let p = d.permuted([Role::Z, Role::X, Role::Y]);
        assert_eq!(p.get(1, 0, 2), d.get(0, 2, 1));
        let back = p.permuted([Role::Y, Role::Z, Role::X]);
        assert_eq!(back, d);
    }

    #[test]
    fn works_in_single_precision() {
        let d: JointDist3<f32> = xor().cast().unwrap();
        let i = conditional_mutual_information(&d, Role::X, Role::Y, Role::Z).unwrap();
        assert!((i - 1.0).abs() < 1e-5);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_dist() -> impl Strategy<Value = JointDist3<f64>> {
            (1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(a, b, c)| {
                prop::collection::vec(0.0f64..1.0, a * b * c).prop_filter_map(
                    "zero mass",
                    move |w| {
                        let al = [a, b, c].map(|n| Alphabet::numeric(n).unwrap());
                        JointDist3::normalized(al, w).ok()
                    },
                )
            })
        }

        proptest! {
            #[test]
            fn co_information_is_symmetric(d in arb_dist()) {
                use Role::*;
                let c = co_information(&d);
                for (a, b) in [(X, Y), (X, Z), (Y, Z)] {
                    prop_assert!((co_information_as(&d, a, b).unwrap() - c).abs() < 1e-12);
                }
            }

            #[test]
            fn chain_rule(d in arb_dist()) {
                use Role::*;
                let joint = mutual_information(&d, X, Vars::pair(Y, Z)).unwrap();
                let via_y = mutual_information(&d, X, Y).unwrap()
                    + conditional_mutual_information(&d, X, Z, Y).unwrap();
                let via_z = mutual_information(&d, X, Z).unwrap()
                    + conditional_mutual_information(&d, X, Y, Z).unwrap();
                prop_assert!((joint - via_y).abs() < 1e-12);
                prop_assert!((joint - via_z).abs() < 1e-12);
            }

            #[test]
            fn shannon_quantities_nonnegative(d in arb_dist()) {
                let s = ShannonSummary::of(&d).unwrap();
                for v in [s.i_xy, s.i_xz, s.i_yz, s.i_xy_given_z, s.i_xz_given_y, s.i_yz_given_x] {
                    prop_assert!(v >= 0.0);
                }
            }
        }
    }
}
