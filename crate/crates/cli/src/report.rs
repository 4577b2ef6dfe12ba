//! Decomposition reports and their pre-emission consistency check.

use serde::Serialize;
use trivariate_pid::gaussian::{gaussian_mutual_informations, gaussian_pid, gaussian_sr_nsr, GaussianInformation};
use trivariate_pid::solver::Engine;
use trivariate_pid::subatoms::{entropy_decomposition, minimal_set, source_redundancy, three_pids};
use trivariate_pid::{
    GaussianCov, IrsiLabel, JointDist3, MinimalSet, PidAtoms, RedundancySplit, Role, ShannonSummary, SolverConfig,
    SystemSpec, ThreePids, SUBATOM_LABELS,
};

use crate::error::{CliError, CliResult};
use crate::output::{fmt_num, table};

/// Largest identity residual a report may carry and still be printed.
pub const REPORT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct InputDescriptor {
    pub source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    pub alphabet_sizes: [usize; 3],
}

#[derive(Clone, Debug, Serialize)]
pub struct IrsiValue {
    pub value: f64,
    #[serde(flatten)]
    pub label: IrsiLabel,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubatomView {
    pub ordering: [Role; 3],
    pub rsi: f64,
    pub rci: f64,
    pub rui_xy: f64,
    pub rui_xz: f64,
    pub rui_yz: f64,
    pub irsi_first: IrsiValue,
    pub irsi_second: IrsiValue,
}

impl SubatomView {
    fn of(m: &MinimalSet) -> Self {
        SubatomView {
            ordering: m.ordering,
            rsi: m.rsi,
            rci: m.rci,
            rui_xy: m.rui[0],
            rui_xz: m.rui[1],
            rui_yz: m.rui[2],
            irsi_first: IrsiValue { value: m.irsi_first, label: m.irsi_first_label },
            irsi_second: IrsiValue { value: m.irsi_second, label: m.irsi_second_label },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyView {
    pub total: f64,
    pub h1: f64,
    pub h1_terms: [f64; 3],
    pub dtc: f64,
    /// Coefficient-weighted subatoms, aligned with the subatom labels.
    pub weighted: Vec<(String, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TargetDiagnostics {
    pub target: Role,
    pub engine: Engine,
    pub dimension: usize,
    pub iterations: usize,
    pub max_marginal_residual: f64,
    pub gap_bound_bits: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub solves: Vec<TargetDiagnostics>,
    pub cross_lattice_residual: f64,
    pub reconstruction_residual: f64,
    pub entropy_residual: f64,
    /// Largest residual found by the check run before printing.
    pub worst_identity_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub input: InputDescriptor,
    pub shannon: ShannonSummary<f64>,
    pub pids: Vec<PidAtoms>,
    pub minimal_set: SubatomView,
    pub splits: Vec<RedundancySplit>,
    pub entropy: EntropyView,
    pub diagnostics: Diagnostics,
}

/// Everything computed for one distribution, before it is turned into a report.
pub struct Analysis {
    pub shannon: ShannonSummary<f64>,
    pub pids: ThreePids,
    pub mset: MinimalSet,
    pub splits: [RedundancySplit; 3],
    pub entropy: trivariate_pid::EntropyDecomposition,
    pub worst_residual: f64,
}

pub fn analyse(dist: &JointDist3, cfg: &SolverConfig) -> CliResult<Analysis> {
    let shannon = ShannonSummary::of(dist)?;
    let pids = three_pids(dist, cfg)?;
    let mset = minimal_set(&pids)?;
    let splits = Role::ALL.map(|t| source_redundancy(&pids, t));
    let entropy = entropy_decomposition(dist, &mset)?;
    let mut a = Analysis { shannon, pids, mset, splits, entropy, worst_residual: 0.0 };
    a.worst_residual = check(&a)?;
    Ok(a)
}

/// Re-derives every identity linking the report's numbers; refuses on any violation.
fn check(a: &Analysis) -> CliResult<f64> {
    let mut worst = 0.0f64;
    let mut fail = None;
    let mut see = |what: String, r: f64| {
        if !(r.abs() <= REPORT_TOL) && fail.is_none() {
            fail = Some(format!("{what} off by {r:e}"));
        }
        worst = worst.max(r.abs());
    };
    let s = &a.shannon;
    for t in Role::ALL {
        let p = a.pids.get(t);
        let (sa, sb) = (p.source_a, p.source_b);
        for (k, v) in p.as_array().iter().enumerate() {
            see(format!("target {t}: atom {k} sign"), v.min(0.0));
        }
        see(format!("target {t}: SI + UI({sa}) vs I({t}:{sa})"), p.si + p.ui_a - s.mi(t, sa));
        see(format!("target {t}: SI + UI({sb}) vs I({t}:{sb})"), p.si + p.ui_b - s.mi(t, sb));
        see(format!("target {t}: UI({sa}) + CI vs I({t}:{sa}|{sb})"), p.ui_a + p.ci - s.cmi(t, sa));
        see(format!("target {t}: SI − CI vs co-information"), p.si - p.ci - s.co_information);
        let split = &a.splits[t.index()];
        see(format!("target {t}: SR + NSR vs SI"), split.sr + split.nsr - p.si);
        see(format!("target {t}: SR sign"), split.sr.min(0.0));
        see(format!("target {t}: NSR sign"), split.nsr.min(0.0));
    }
    see("subatom reconstruction".into(), a.mset.reconstruction_residual(&a.pids));
    see("entropy decomposition".into(), a.entropy.residual());
    see("joint entropy".into(), a.entropy.total - s.joint_entropy);
    see("cross-lattice mutual information".into(), a.pids.cross_lattice_residual());
    for v in a.mset.values() {
        see("subatom sign".into(), v.min(0.0));
    }
    match fail {
        Some(msg) => Err(CliError::solver(format!("report refused: {msg}"))),
        None => Ok(worst),
    }
}

impl Report {
    pub fn build(input: InputDescriptor, a: &Analysis, targets: &[Role]) -> Report {
        let entropy = EntropyView {
            total: a.entropy.total,
            h1: a.entropy.h1(),
            h1_terms: a.entropy.h1_terms,
            dtc: a.entropy.dtc,
            weighted: SUBATOM_LABELS
                .iter()
                .zip(a.entropy.subatoms.iter().zip(trivariate_pid::subatoms::ENTROPY_COEFFICIENTS))
                .map(|(l, (v, c))| (l.to_string(), v * c as f64))
                .collect(),
        };
        let solves = targets
            .iter()
            .map(|&t| {
                let st = &a.pids.stats[t.index()];
                TargetDiagnostics {
                    target: t,
                    engine: st.engine,
                    dimension: st.dimension,
                    iterations: st.iterations,
                    max_marginal_residual: st.max_marginal_residual,
                    gap_bound_bits: st.gap_bound_bits,
                }
            })
            .collect();
        Report {
            input,
            shannon: a.shannon,
            pids: targets.iter().map(|&t| *a.pids.get(t)).collect(),
            minimal_set: SubatomView::of(&a.mset),
            splits: targets.iter().map(|&t| a.splits[t.index()]).collect(),
            entropy,
            diagnostics: Diagnostics {
                solves,
                cross_lattice_residual: a.pids.cross_lattice_residual(),
                reconstruction_residual: a.mset.reconstruction_residual(&a.pids),
                entropy_residual: a.entropy.residual(),
                worst_identity_residual: a.worst_residual,
            },
        }
    }

    pub fn to_table(&self, digits: usize) -> String {
        let n = |v: f64| fmt_num(v, digits);
        let mut out = String::new();
        let i = &self.input;
        let what = match (&i.system, &i.file) {
            (Some(s), _) => serde_json::to_string(s).expect("spec serializes"),
            (None, Some(f)) => f.clone(),
            _ => String::new(),
        };
        out.push_str(&format!(
            "input: {} {what} ({}x{}x{})\n\n",
            i.source, i.alphabet_sizes[0], i.alphabet_sizes[1], i.alphabet_sizes[2]
        ));
        let s = &self.shannon;
        out.push_str(&table(&[
            vec!["I(X:Y)".into(), n(s.i_xy), "I(X:Y|Z)".into(), n(s.i_xy_given_z)],
            vec!["I(X:Z)".into(), n(s.i_xz), "I(X:Z|Y)".into(), n(s.i_xz_given_y)],
            vec!["I(Y:Z)".into(), n(s.i_yz), "I(Y:Z|X)".into(), n(s.i_yz_given_x)],
            vec!["co-information".into(), n(s.co_information), "H(X,Y,Z)".into(), n(s.joint_entropy)],
        ]));
        out.push('\n');
        let mut rows = vec![["target", "SI", "UI(a)", "UI(b)", "CI", "SR", "NSR"].map(String::from).to_vec()];
        for (p, sp) in self.pids.iter().zip(&self.splits) {
            rows.push(vec![
                format!("{} <- {},{}", p.target, p.source_a, p.source_b),
                n(p.si),
                n(p.ui_a),
                n(p.ui_b),
                n(p.ci),
                n(sp.sr),
                n(sp.nsr),
            ]);
        }
        out.push_str(&table(&rows));
        out.push('\n');
        let m = &self.minimal_set;
        let o = m.ordering;
        let label = |v: &IrsiValue| format!("{}^({}->{})", v.label.middle, v.label.tail, v.label.head);
        out.push_str(&table(&[
            vec!["ordering".into(), format!("{} {} {}", o[0], o[1], o[2])],
            vec!["rsi".into(), n(m.rsi)],
            vec!["rci".into(), n(m.rci)],
            vec!["rui_xy".into(), n(m.rui_xy)],
            vec!["rui_xz".into(), n(m.rui_xz)],
            vec!["rui_yz".into(), n(m.rui_yz)],
            vec![format!("irsi_first {}", label(&m.irsi_first)), n(m.irsi_first.value)],
            vec![format!("irsi_second {}", label(&m.irsi_second)), n(m.irsi_second.value)],
        ]));
        out.push('\n');
        let e = &self.entropy;
        out.push_str(&table(&[
            vec!["H".into(), n(e.total)],
            vec!["H1".into(), n(e.h1)],
            vec!["DTC".into(), n(e.dtc)],
        ]));
        out.push('\n');
        let mut rows = vec![["target", "engine", "dim", "iters", "marginal", "gap"].map(String::from).to_vec()];
        for d in &self.diagnostics.solves {
            rows.push(vec![
                d.target.to_string(),
                format!("{:?}", d.engine).to_lowercase(),
                d.dimension.to_string(),
                d.iterations.to_string(),
                n(d.max_marginal_residual),
                n(d.gap_bound_bits),
            ]);
        }
        out.push_str(&table(&rows));
        out.push_str(&format!("worst identity residual {}\n", n(self.diagnostics.worst_identity_residual)));
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussianTarget {
    pub target: Role,
    pub pid: PidAtoms,
    pub split: RedundancySplit,
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussianReport {
    pub file: String,
    pub cov: [[f64; 3]; 3],
    pub information: GaussianInformation<f64>,
    pub targets: Vec<GaussianTarget>,
    pub worst_identity_residual: f64,
}

impl GaussianReport {
    pub fn build(file: String, g: &GaussianCov, targets: &[Role]) -> CliResult<Self> {
        let info = gaussian_mutual_informations(g)?;
        let mut worst = 0.0f64;
        let mut out = Vec::new();
        for &t in targets {
            let pid = gaussian_pid(g, t)?;
            let split = gaussian_sr_nsr(g, t)?;
            let residuals = [
                pid.si + pid.ui_a - info.mi(t, pid.source_a),
                pid.si + pid.ui_b - info.mi(t, pid.source_b),
                pid.total() - info.joint(t),
                split.sr + split.nsr - pid.si,
                pid.ui_a.min(pid.ui_b),
            ];
            for r in residuals {
                worst = worst.max(r.abs());
            }
            out.push(GaussianTarget { target: t, pid, split });
        }
        if !(worst <= REPORT_TOL) {
            return Err(CliError::solver(format!("report refused: Gaussian identity off by {worst:e}")));
        }
        Ok(GaussianReport { file, cov: *g.cov(), information: info, targets: out, worst_identity_residual: worst })
    }

    pub fn to_table(&self, digits: usize) -> String {
        let n = |v: f64| fmt_num(v, digits);
        let mut out = format!("input: gaussian {}\n\n", self.file);
        let mut rows = vec![["target", "SI", "UI(a)", "UI(b)", "CI", "SR", "NSR"].map(String::from).to_vec()];
        for g in &self.targets {
            let p = &g.pid;
            rows.push(vec![
                format!("{} <- {},{}", p.target, p.source_a, p.source_b),
                n(p.si),
                n(p.ui_a),
                n(p.ui_b),
                n(p.ci),
                n(g.split.sr),
                n(g.split.nsr),
            ]);
        }
        out.push_str(&table(&rows));
        out
    }
}
