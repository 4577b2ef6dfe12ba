//! The three PIDs of a system, the minimal set of seven subatoms, the
//! source/non-source split of redundancy and the entropy decomposition.
//!
//! Naming: for an unordered pair `{a, b}` the third role `c` is the
//! *middle*. `SI_a` is short for `SI(a : {b; c})`.

use serde::Serialize;

use crate::dist::{
    co_information, conditional_entropy, mutual_information, Alphabet, JointDist3, Role, Vars,
};
use crate::error::{PidError, Result};
use crate::scalar::Real;
use crate::solver::{clamp_atom, solve_pid, PidAtoms, SolveStats, SolverConfig};

/// Unordered role pairs in the order used by every `[T; 3]` pair table.
pub const PAIRS: [(Role, Role); 3] = [(Role::X, Role::Y), (Role::X, Role::Z), (Role::Y, Role::Z)];

/// Labels of the seven subatoms, in the order of [`MinimalSet::values`].
pub const SUBATOM_LABELS: [&str; 7] =
    ["rsi", "rci", "rui_xy", "rui_xz", "rui_yz", "irsi_first", "irsi_second"];

/// Weight of each subatom in the dual total correlation, aligned with [`SUBATOM_LABELS`].
pub const ENTROPY_COEFFICIENTS: [u32; 7] = [1, 2, 1, 1, 1, 3, 2];

/// Index of an unordered pair in [`PAIRS`].
///
/// # Panics
/// If `a == b`.
pub fn pair_index(a: Role, b: Role) -> usize {
    assert_ne!(a, b, "a pair needs two distinct roles");
    a.index() + b.index() - 1
}

/// Residual above which a derived identity is reported as an internal inconsistency.
fn check_tol<T: Real>() -> T {
    T::lit(T::IDENTITY_TOL * 100.0)
}

fn consistency<T: Real>(residual: T, what: impl FnOnce() -> String) -> Result<()> {
    if residual.abs() > check_tol::<T>() || !residual.is_finite() {
        Err(PidError::Inconsistent(format!("{} (residual {:e})", what(), residual.f64())))
    } else {
        Ok(())
    }
}

/// PID atoms for each of the three target choices.
#[derive(Clone, Debug, Serialize)]
pub struct ThreePids<T> {
    /// Indexed by target role.
    pub by_target: [PidAtoms<T>; 3],
    /// `I(a:b)` indexed like [`PAIRS`].
    pub pair_information: [T; 3],
    pub co_information: T,
    #[serde(skip)]
    pub stats: [SolveStats; 3],
}

impl<T: Real> ThreePids<T> {
    pub fn get(&self, target: Role) -> &PidAtoms<T> {
        &self.by_target[target.index()]
    }

    pub fn si(&self, target: Role) -> T {
        self.get(target).si
    }

    pub fn ci(&self, target: Role) -> T {
        self.get(target).ci
    }

    /// `UI(a : {b \ c})`.
    pub fn ui(&self, a: Role, b: Role) -> T {
        self.get(a).ui(b)
    }

    pub fn mi(&self, a: Role, b: Role) -> T {
        self.pair_information[pair_index(a, b)]
    }

    /// Largest violation of the cross-lattice identities: for every pair,
    /// `SI_a + UI(a:{b\c}) = SI_b + UI(b:{a\c})`, the synergy analogue, and
    /// `SI_t − CI_t` equal to the co-information for every target.
    pub fn cross_lattice_residual(&self) -> T {
        let mut worst = T::zero();
        for (a, b) in PAIRS {
            let shared = (self.si(a) + self.ui(a, b)) - (self.si(b) + self.ui(b, a));
            let synergy = (self.ci(a) + self.ui(a, b)) - (self.ci(b) + self.ui(b, a));
            worst = worst.max(shared.abs()).max(synergy.abs());
        }
        for t in Role::ALL {
            worst = worst.max((self.si(t) - self.ci(t) - self.co_information).abs());
        }
        worst
    }
}

/// Solves the PID for every target and aligns the three lattices.
///
/// Synergies are recomputed as `CI_t = SI_t − coI` so the ordering of the
/// redundancies and of the synergies agree exactly.
pub fn three_pids<T: Real>(dist: &JointDist3<T>, cfg: &SolverConfig) -> Result<ThreePids<T>> {
    let co_i = co_information(dist);
    let mut atoms = Vec::with_capacity(3);
    let mut stats = Vec::with_capacity(3);
    for t in Role::ALL {
        let sol = solve_pid(dist, t, cfg).map_err(|e| match e {
            PidError::Inconsistent(_) => PidError::Solver { target: t, source: Box::new(e) },
            other => other,
        })?;
        let mut a = sol.atoms;
        a.ci = clamp_atom(a.si - co_i, "CI", t)
            .map_err(|e| PidError::Solver { target: t, source: Box::new(e) })?;
        atoms.push(a);
        stats.push(sol.stats);
    }
    let pair_information = [
        mutual_information(dist, Role::X, Role::Y)?,
        mutual_information(dist, Role::X, Role::Z)?,
        mutual_information(dist, Role::Y, Role::Z)?,
    ];
    let pids = ThreePids {
        by_target: atoms.try_into().expect("three targets"),
        pair_information,
        co_information: co_i,
        stats: stats.try_into().expect("three targets"),
    };
    consistency(pids.cross_lattice_residual(), || "cross-lattice identities violated".into())?;
    Ok(pids)
}

/// `min(SI_a, SI_b)`: redundancy shared by both lattices, with the third role in the middle.
pub fn rsi_between<T: Real>(pids: &ThreePids<T>, a: Role, b: Role) -> T {
    assert_ne!(a, b, "rsi_between needs two distinct roles");
    pids.si(a).min(pids.si(b))
}

/// `min(CI_a, CI_b)`.
pub fn rci_between<T: Real>(pids: &ThreePids<T>, a: Role, b: Role) -> T {
    assert_ne!(a, b, "rci_between needs two distinct roles");
    pids.ci(a).min(pids.ci(b))
}

/// `min(UI(a:{b\c}), UI(b:{a\c}))`.
pub fn rui_between<T: Real>(pids: &ThreePids<T>, a: Role, b: Role) -> T {
    assert_ne!(a, b, "rui_between needs two distinct roles");
    pids.ui(a, b).min(pids.ui(b, a))
}

/// Redundancy present in the lattice of `head` but not in that of `tail`.
pub fn irsi_directed<T: Real>(pids: &ThreePids<T>, head: Role, tail: Role) -> T {
    assert_ne!(head, tail, "irsi_directed needs two distinct roles");
    pids.si(head) - rsi_between(pids, head, tail)
}

/// Roles of one irreversible increment: present for `head`, absent for `tail`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IrsiLabel {
    pub head: Role,
    pub tail: Role,
    pub middle: Role,
}

/// The seven subatoms from which all twelve atoms are rebuilt.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimalSet<T> {
    /// Targets sorted by ascending redundancy, ties in role order.
    pub ordering: [Role; 3],
    pub rsi: T,
    pub rci: T,
    /// Reversible unique information per pair, indexed like [`PAIRS`].
    pub rui: [T; 3],
    pub irsi_first: T,
    pub irsi_second: T,
    pub irsi_first_label: IrsiLabel,
    pub irsi_second_label: IrsiLabel,
}

impl<T: Real> MinimalSet<T> {
    pub fn rui(&self, a: Role, b: Role) -> T {
        self.rui[pair_index(a, b)]
    }

    /// Values aligned with [`SUBATOM_LABELS`].
    pub fn values(&self) -> [T; 7] {
        [self.rsi, self.rci, self.rui[0], self.rui[1], self.rui[2], self.irsi_first, self.irsi_second]
    }

    fn level(&self, target: Role) -> T {
        let k = self.ordering.iter().position(|&r| r == target).expect("ordering is a permutation");
        match k {
            0 => T::zero(),
            1 => self.irsi_first,
            _ => self.irsi_first + self.irsi_second,
        }
    }

    /// Rebuilds the PID atoms of `target` from the subatoms alone.
    pub fn atoms_for(&self, target: Role) -> PidAtoms<T> {
        let (a, b) = target.others();
        let up = self.level(target);
        // UI(t:{s\·}) exceeds the reversible part by how much more redundancy s has than t.
        let ui = |s: Role| {
            let ls = self.level(s);
            self.rui(target, s) + (ls - up.min(ls))
        };
        PidAtoms {
            target,
            source_a: a,
            source_b: b,
            si: self.rsi + up,
            ui_a: ui(a),
            ui_b: ui(b),
            ci: self.rci + up,
        }
    }

    /// Largest deviation between `pids` and the atoms rebuilt from this set.
    pub fn reconstruction_residual(&self, pids: &ThreePids<T>) -> T {
        let mut worst = T::zero();
        for t in Role::ALL {
            let rebuilt = self.atoms_for(t).as_array();
            for (r, o) in rebuilt.iter().zip(pids.get(t).as_array()) {
                worst = worst.max((*r - o).abs());
            }
        }
        worst
    }
}

pub fn minimal_set<T: Real>(pids: &ThreePids<T>) -> Result<MinimalSet<T>> {
    let mut ordering = Role::ALL;
    // Stable sort keeps role order for ties.
    ordering.sort_by(|a, b| pids.si(*a).f64().total_cmp(&pids.si(*b).f64()));
    let [t1, t2, t3] = ordering;
    let rui = PAIRS.map(|(a, b)| rui_between(pids, a, b));
    let mset = MinimalSet {
        ordering,
        rsi: pids.si(t1),
        rci: pids.ci(t1),
        rui,
        irsi_first: pids.si(t2) - pids.si(t1),
        irsi_second: pids.si(t3) - pids.si(t2),
        irsi_first_label: IrsiLabel { head: t2, tail: t1, middle: t3 },
        irsi_second_label: IrsiLabel { head: t3, tail: t2, middle: t1 },
    };
    for (label, v) in SUBATOM_LABELS.iter().zip(mset.values()) {
        if v < -T::lit(T::ATOM_CLAMP) || !v.is_finite() {
            return Err(PidError::Inconsistent(format!("subatom {label} = {v} is negative")));
        }
    }
    let mset = MinimalSet {
        rsi: mset.rsi.max(T::zero()),
        rci: mset.rci.max(T::zero()),
        rui: mset.rui.map(|v| v.max(T::zero())),
        ..mset
    };
    consistency(mset.reconstruction_residual(pids), || {
        "PID atoms are not reproduced by the minimal set".into()
    })?;
    Ok(mset)
}

/// Redundancy of one lattice split into the part shared with a source's lattice and the rest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RedundancySplit<T> {
    pub target: Role,
    /// Source redundancy.
    pub sr: T,
    /// Non-source redundancy.
    pub nsr: T,
}

pub fn source_redundancy<T: Real>(pids: &ThreePids<T>, target: Role) -> RedundancySplit<T> {
    let (a, b) = target.others();
    let sr = rsi_between(pids, target, a).max(rsi_between(pids, target, b));
    let nsr = (pids.si(target) - sr).max(T::zero());
    RedundancySplit { target, sr, nsr }
}

/// `H(X,Y,Z) = H₍₁₎ + DTC`, with the dual total correlation written as a
/// weighted sum of the seven subatoms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyDecomposition<T> {
    /// `H(X|Y,Z)`, `H(Y|X,Z)`, `H(Z|X,Y)`.
    pub h1_terms: [T; 3],
    pub dtc: T,
    /// Subatom values aligned with [`SUBATOM_LABELS`] and [`ENTROPY_COEFFICIENTS`].
    pub subatoms: [T; 7],
    pub total: T,
}

impl<T: Real> EntropyDecomposition<T> {
    pub fn h1(&self) -> T {
        self.h1_terms.iter().copied().sum()
    }

    /// `Σ coefficient · subatom`.
    pub fn weighted_subatoms(&self) -> T {
        self.subatoms.iter().zip(ENTROPY_COEFFICIENTS).map(|(&s, c)| s * T::lit(c as f64)).sum()
    }

    pub fn residual(&self) -> T {
        self.h1() + self.weighted_subatoms() - self.total
    }
}

pub fn entropy_decomposition<T: Real>(
    dist: &JointDist3<T>,
    mset: &MinimalSet<T>,
) -> Result<EntropyDecomposition<T>> {
    let mut h1_terms = [T::zero(); 3];
    for r in Role::ALL {
        let (a, b) = r.others();
        h1_terms[r.index()] = conditional_entropy(dist, r.into(), Vars::pair(a, b))?;
    }
    let total = dist.joint_entropy();
    let h1: T = h1_terms.iter().copied().sum();
    let dec = EntropyDecomposition { h1_terms, dtc: total - h1, subatoms: mset.values(), total };
    consistency(dec.residual(), || "entropy is not reproduced by the subatoms".into())?;
    Ok(dec)
}

/// A four-variable distribution `p(x, y, z, e)` whose extra axis `e` can be
/// merged into one of the three roles.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedSystem<T> {
    alphabets: [Alphabet; 3],
    extension: Alphabet,
    /// Row-major over `(x, y, z, e)`.
    probs: Vec<T>,
}

impl<T: Real> ExtendedSystem<T> {
    /// Builds the system by evaluating `f(x, y, z, e)` on every cell and normalizing.
    pub fn from_fn(
        alphabets: [Alphabet; 3],
        extension: Alphabet,
        mut f: impl FnMut(usize, usize, usize, usize) -> T,
    ) -> Result<Self> {
        let [nx, ny, nz] = [alphabets[0].len(), alphabets[1].len(), alphabets[2].len()];
        let ne = extension.len();
        let cells = nx * ny * nz * ne;
        if cells > crate::dist::MAX_CELLS {
            return Err(PidError::TooLarge { cells, limit: crate::dist::MAX_CELLS });
        }
        let mut probs = Vec::with_capacity(cells);
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    for e in 0..ne {
                        let w = f(x, y, z, e);
                        if !w.is_finite() || w < T::zero() {
                            return Err(PidError::InvalidDistribution(
                                "weights must be finite and nonnegative".into(),
                            ));
                        }
                        probs.push(w);
                    }
                }
            }
        }
        let total: T = probs.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(PidError::InvalidDistribution("weights sum to zero".into()));
        }
        probs.iter_mut().for_each(|p| *p = *p / total);
        Ok(ExtendedSystem { alphabets, extension, probs })
    }

    /// The trivariate system with the extension summed out.
    pub fn base(&self) -> Result<JointDist3<T>> {
        let ne = self.extension.len();
        let w = self.probs.chunks(ne).map(|c| c.iter().copied().sum()).collect();
        JointDist3::normalized(self.alphabets.clone(), w)
    }

    /// The trivariate system with `role` replaced by the pair `(role, e)`.
    pub fn merged(&self, role: Role) -> Result<JointDist3<T>> {
        let mut alphabets = self.alphabets.clone();
        alphabets[role.index()] = Alphabet::product(&self.alphabets[role.index()], &self.extension)?;
        let [nx, ny, nz] = [self.alphabets[0].len(), self.alphabets[1].len(), self.alphabets[2].len()];
        let ne = self.extension.len();
        let shape = [alphabets[0].len(), alphabets[1].len(), alphabets[2].len()];
        let mut w = vec![T::zero(); self.probs.len()];
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    for e in 0..ne {
                        let mut idx = [x, y, z];
                        idx[role.index()] = idx[role.index()] * ne + e;
                        w[(idx[0] * shape[1] + idx[1]) * shape[2] + idx[2]] =
                            self.probs[((x * ny + y) * nz + z) * ne + e];
                    }
                }
            }
        }
        JointDist3::normalized(alphabets, w)
    }
}

/// RSI between the two endpoints with `middle` alone and with `middle`
/// extended by the fourth variable, in that order.
pub fn rsi_through<T: Real>(
    ext: &ExtendedSystem<T>,
    middle: Role,
    cfg: &SolverConfig,
) -> Result<(T, T)> {
    let (a, b) = middle.others();
    let before = three_pids(&ext.base()?, cfg)?;
    let after = three_pids(&ext.merged(middle)?, cfg)?;
    Ok((rsi_between(&before, a, b), rsi_between(&after, a, b)))
}

/// Whether extending the middle variable never lowers the RSI between the endpoints.
pub fn verify_monotonicity<T: Real>(
    ext: &ExtendedSystem<T>,
    middle: Role,
    cfg: &SolverConfig,
) -> Result<bool> {
    let (before, after) = rsi_through(ext, middle, cfg)?;
    Ok(after >= before - T::lit(T::ATOM_CLAMP))
}
