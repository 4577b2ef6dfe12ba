//! Closed-form PID for trivariate jointly Gaussian systems with a univariate target.
//!
//! Every quantity depends on the covariance only through the correlation
//! matrix, so results are computed from correlations directly.

use serde::{Deserialize, Serialize};

use crate::dist::{Alphabet, JointDist3, Role};
use crate::error::{PidError, Result};
use crate::scalar::Real;
use crate::solver::PidAtoms;
use crate::subatoms::{pair_index, RedundancySplit, PAIRS};

/// Smallest admissible eigenvalue relative to the largest.
pub const PD_RATIO: f64 = 1e-12;
/// Allowed asymmetry, relative to the largest entry.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Covariance of `(X, Y, Z)`, validated symmetric positive definite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianCov<T> {
    cov: [[T; 3]; 3],
}

/// JSON form `{"cov": [[..],[..],[..]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub cov: [[f64; 3]; 3],
}

impl<T: Real> GaussianCov<T> {
    pub fn new(cov: [[T; 3]; 3]) -> Result<Self> {
        let scale = cov.iter().flatten().fold(T::zero(), |m, v| m.max(v.abs()));
        if cov.iter().flatten().any(|v| !v.is_finite()) || !(scale > T::zero()) {
            return Err(PidError::Degenerate("covariance must be finite and nonzero".into()));
        }
        for i in 0..3 {
            for j in 0..i {
                if (cov[i][j] - cov[j][i]).abs() > T::lit(SYMMETRY_TOL) * scale {
                    return Err(PidError::InvalidParameter(format!(
                        "covariance is not symmetric: entry ({i},{j}) = {} but ({j},{i}) = {}",
                        cov[i][j], cov[j][i]
                    )));
                }
            }
        }
        let eig = symmetric_eigenvalues(cov);
        if !(eig[0] > T::lit(PD_RATIO) * eig[2]) {
            return Err(PidError::Degenerate(format!(
                "covariance is not positive definite (eigenvalues {}, {}, {})",
                eig[0], eig[1], eig[2]
            )));
        }
        Ok(GaussianCov { cov })
    }

    /// Unit variances with the given correlations.
    pub fn from_correlations(rho_xy: T, rho_xz: T, rho_yz: T) -> Result<Self> {
        let one = T::one();
        GaussianCov::new([[one, rho_xy, rho_xz], [rho_xy, one, rho_yz], [rho_xz, rho_yz, one]])
    }

    pub fn from_spec(spec: &GaussianSpec) -> Result<Self> {
        GaussianCov::new(spec.cov.map(|row| row.map(T::lit)))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GaussianSpec = serde_json::from_str(text)
            .map_err(|e| PidError::Malformed(format!("Gaussian JSON: {e}")))?;
        GaussianCov::from_spec(&spec)
    }

    pub fn cov(&self) -> &[[T; 3]; 3] {
        &self.cov
    }

    pub fn correlation(&self, a: Role, b: Role) -> T {
        let (i, j) = (a.index(), b.index());
        self.cov[i][j] / (self.cov[i][i] * self.cov[j][j]).sqrt()
    }

    fn correlation_matrix(&self) -> [[T; 3]; 3] {
        let mut r = [[T::one(); 3]; 3];
        for (a, b) in PAIRS {
            let rho = self.correlation(a, b);
            r[a.index()][b.index()] = rho;
            r[b.index()][a.index()] = rho;
        }
        r
    }
}

/// Eigenvalues of a symmetric 3×3 matrix in ascending order (trigonometric closed form).
fn symmetric_eigenvalues<T: Real>(a: [[T; 3]; 3]) -> [T; 3] {
    let off = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
    let mut e = if off == T::zero() {
        [a[0][0], a[1][1], a[2][2]]
    } else {
        let three = T::lit(3.0);
        let q = (a[0][0] + a[1][1] + a[2][2]) / three;
        let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + T::lit(2.0) * off;
        let p = (p2 / T::lit(6.0)).sqrt();
        let mut b = a;
        for (i, row) in b.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (*v - if i == j { q } else { T::zero() }) / p;
            }
        }
        let r = (det3(b) / T::lit(2.0)).max(-T::one()).min(T::one());
        let phi = r.acos() / three;
        let big = q + T::lit(2.0) * p * phi.cos();
        let small = q + T::lit(2.0) * p * (phi + T::lit(2.0 * std::f64::consts::PI / 3.0)).cos();
        [small, three * q - big - small, big]
    };
    e.sort_by(|x, y| x.f64().total_cmp(&y.f64()));
    e
}

fn det3<T: Real>(m: [[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Pairwise and target-versus-pair mutual informations, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianInformation<T> {
    /// `I(a:b)` indexed like [`PAIRS`].
    pub pairwise: [T; 3],
    /// `I(t:(others))` indexed by role.
    pub joint: [T; 3],
}

impl<T: Real> GaussianInformation<T> {
    pub fn mi(&self, a: Role, b: Role) -> T {
        self.pairwise[pair_index(a, b)]
    }

    pub fn joint(&self, target: Role) -> T {
        self.joint[target.index()]
    }
}

fn half_log2_ratio<T: Real>(num: T, den: T, what: impl FnOnce() -> String) -> Result<T> {
    if !(den > T::zero()) || !num.is_finite() || !den.is_finite() {
        return Err(PidError::Degenerate(format!("{} is infinite", what())));
    }
    Ok((T::lit(0.5) * (num / den).log2()).max(T::zero()))
}

pub fn gaussian_mutual_informations<T: Real>(g: &GaussianCov<T>) -> Result<GaussianInformation<T>> {
    let r = g.correlation_matrix();
    let mut pairwise = [T::zero(); 3];
    for (k, (a, b)) in PAIRS.iter().enumerate() {
        let rho = r[a.index()][b.index()];
        pairwise[k] = half_log2_ratio(T::one(), T::one() - rho * rho, || format!("I({a}:{b})"))?;
    }
    let det = det3(r);
    let mut joint = [T::zero(); 3];
    for t in Role::ALL {
        let (a, b) = t.others();
        let rho = r[a.index()][b.index()];
        // Var(t | a, b) / Var(t) = det R / det R_ab.
        joint[t.index()] = half_log2_ratio(T::one() - rho * rho, det, || format!("I({t}:({a},{b}))"))?;
    }
    Ok(GaussianInformation { pairwise, joint })
}

pub fn gaussian_pid<T: Real>(g: &GaussianCov<T>, target: Role) -> Result<PidAtoms<T>> {
    let info = gaussian_mutual_informations(g)?;
    let (a, b) = target.others();
    let (i_ta, i_tb) = (info.mi(target, a), info.mi(target, b));
    let si = i_ta.min(i_tb);
    let ci = (info.joint(target) - i_ta.max(i_tb)).max(T::zero());
    Ok(PidAtoms { target, source_a: a, source_b: b, si, ui_a: i_ta - si, ui_b: i_tb - si, ci })
}

pub fn gaussian_sr_nsr<T: Real>(g: &GaussianCov<T>, target: Role) -> Result<RedundancySplit<T>> {
    let info = gaussian_mutual_informations(g)?;
    let (a, b) = target.others();
    let si = info.mi(target, a).min(info.mi(target, b));
    let sr = si.min(info.mi(a, b));
    Ok(RedundancySplit { target, sr, nsr: si - sr })
}

/// Bins each variable into `bins` equal cells over `±half_width` standard
/// deviations and weights every cell by the density at its centre.
pub fn discretize<T: Real>(g: &GaussianCov<T>, bins: usize, half_width: f64) -> Result<JointDist3<T>> {
    if bins == 0 || !(half_width > 0.0) {
        return Err(PidError::InvalidParameter("need at least one bin and a positive range".into()));
    }
    let r = g.correlation_matrix().map(|row| row.map(|v| v.f64()));
    let det = det3(r);
    // Inverse through the adjugate.
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            *v = (r[r0][c0] * r[r1][c1] - r[r0][c1] * r[r1][c0]) / det;
        }
    }
    let width = 2.0 * half_width / bins as f64;
    let centre = |k: usize| -half_width + (k as f64 + 0.5) * width;
    let al = Alphabet::numeric(bins)?;
    JointDist3::from_fn([al.clone(), al.clone(), al], |x, y, z| {
        let u = [centre(x), centre(y), centre(z)];
        let mut quad = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                quad += u[i] * inv[i][j] * u[j];
            }
        }
        T::lit((-0.5 * quad).exp())
    })
}
