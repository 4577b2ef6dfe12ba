mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use trivariate_pid::format::{parse_pmf, to_pmf_json, to_pmf_text};
use trivariate_pid::gaussian::{gaussian_pid, gaussian_sr_nsr};
use trivariate_pid::solver::solve_pid;
use trivariate_pid::subatoms::{minimal_set, source_redundancy, three_pids};
use trivariate_pid::{GaussianCov, JointDist3, Role, SolverConfig};

fn small_dist() -> impl Strategy<Value = JointDist3> {
    (2usize..=3, 2usize..=3, 2usize..=3, any::<u64>(), 0.0f64..0.3)
        .prop_map(|(a, b, c, seed, sparsity)| common::random_dist(&mut common::rng(seed), [a, b, c], sparsity))
}

fn permutation() -> impl Strategy<Value = [Role; 3]> {
    prop::sample::select(vec![
        [Role::X, Role::Y, Role::Z],
        [Role::X, Role::Z, Role::Y],
        [Role::Y, Role::X, Role::Z],
        [Role::Y, Role::Z, Role::X],
        [Role::Z, Role::X, Role::Y],
        [Role::Z, Role::Y, Role::X],
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn atoms_are_nonnegative_and_add_up(d in small_dist()) {
        let o = common::Enumerated::new(&d);
        for t in Role::ALL {
            let (a, b) = t.others();
            let s = solve_pid(&d, t, &SolverConfig::default()).unwrap();
            for v in s.atoms.as_array() {
                prop_assert!(v >= 0.0);
            }
            prop_assert!((s.atoms.total() - o.mi(&[t], &[a, b])).abs() < 1e-9);
        }
    }

    #[test]
    fn subatoms_follow_the_variables_under_relabelling(d in small_dist(), order in permutation()) {
        let cfg = SolverConfig::default();
        let m = minimal_set(&three_pids(&d, &cfg).unwrap()).unwrap();
        let p = minimal_set(&three_pids(&d.permuted(order), &cfg).unwrap()).unwrap();
        prop_assert!((m.rsi - p.rsi).abs() < 1e-7);
        prop_assert!((m.rci - p.rci).abs() < 1e-7);
        prop_assert!((m.irsi_first - p.irsi_first).abs() < 1e-7);
        prop_assert!((m.irsi_second - p.irsi_second).abs() < 1e-7);
        // New axis k holds old variable order[k].
        for i in 0..3 {
            for j in i + 1..3 {
                let (a, b) = (Role::from_index(i), Role::from_index(j));
                prop_assert!((p.rui(a, b) - m.rui(order[i], order[j])).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn symbol_order_does_not_matter(d in small_dist(), seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let perms: Vec<Vec<usize>> = d
            .shape()
            .iter()
            .map(|&n| {
                let mut v: Vec<usize> = (0..n).collect();
                v.shuffle(&mut r);
                v
            })
            .collect();
        let shuffled = JointDist3::from_fn(d.alphabets().clone(), |x, y, z| d.get(perms[0][x], perms[1][y], perms[2][z]))
            .unwrap();
        let cfg = SolverConfig::default();
        for t in Role::ALL {
            let u = solve_pid(&d, t, &cfg).unwrap().atoms.as_array();
            let v = solve_pid(&shuffled, t, &cfg).unwrap().atoms.as_array();
            for k in 0..4 {
                prop_assert!((u[k] - v[k]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn source_redundancy_never_exceeds_shared_information(d in small_dist()) {
        let pids = three_pids(&d, &SolverConfig::default()).unwrap();
        for t in Role::ALL {
            let split = source_redundancy(&pids, t);
            prop_assert!(split.sr >= 0.0 && split.nsr >= 0.0);
            prop_assert!(split.sr <= pids.si(t) + 1e-12);
            prop_assert!((split.sr + split.nsr - pids.si(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_precision_tracks_double(d in small_dist()) {
        let single = d.cast::<f32>().unwrap();
        for t in Role::ALL {
            let u = solve_pid(&d, t, &SolverConfig::default()).unwrap().atoms.as_array();
            let v = solve_pid(&single, t, &SolverConfig { tol_bits: 1e-5, marginal_tol: 1e-5, ..Default::default() })
                .unwrap()
                .atoms
                .as_array();
            for k in 0..4 {
                prop_assert!((u[k] - v[k] as f64).abs() < 1e-3, "{u:?} vs {v:?}");
            }
        }
    }

    #[test]
    fn pmf_text_and_json_round_trip(d in small_dist()) {
        // The text format only lists the support, so compare labelled outcomes.
        let by_label = |d: &JointDist3| -> BTreeMap<[String; 3], f64> {
            let a = d.alphabets();
            d.support()
                .filter(|c| c.3 > 0.0)
                .map(|(x, y, z, p)| ([a[0].label(x).to_string(), a[1].label(y).to_string(), a[2].label(z).to_string()], p))
                .collect()
        };
        let from_text: JointDist3 = parse_pmf(&to_pmf_text(&d)).unwrap();
        let from_json: JointDist3 = parse_pmf(&to_pmf_json(&d).to_string()).unwrap();
        prop_assert_eq!(from_json.alphabets(), d.alphabets());
        let want = by_label(&d);
        for back in [from_text, from_json] {
            let got = by_label(&back);
            prop_assert_eq!(got.len(), want.len());
            for (k, p) in &want {
                prop_assert!((got[k] - p).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gaussian_atoms_are_consistent(r in prop::array::uniform3(-0.9f64..0.9)) {
        let g = match GaussianCov::from_correlations(r[0], r[1], r[2]) {
            Ok(g) => g,
            Err(_) => return Ok(()),
        };
        for t in Role::ALL {
            let p = gaussian_pid(&g, t).unwrap();
            for v in p.as_array() {
                prop_assert!(v >= 0.0);
            }
            let s = gaussian_sr_nsr(&g, t).unwrap();
            prop_assert!(s.sr >= 0.0 && s.nsr >= 0.0 && (s.sr + s.nsr - p.si).abs() < 1e-12);
        }
    }
}
