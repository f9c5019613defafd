use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use wsbn::process::{ProcessSpace, VassConfig, VassSpec};
use wsbn::wqo::{basis_subsumes, backward_coverability, is_antichain, minimize, Saturation};
use wsbn::{ResourceLimits, StateId, WellStructured};
use wsbn_testkit::{all_labels, forward_cover, random_vass, VassShape};

fn relay() -> VassSpec {
    VassSpec::builder(1)
        .initial("q0", &[1])
        .initial("q6", &[1])
        .transition("q0", "!!a", &[-1], "q1")
        .transition("q1", "??b", &[1], "q2")
        .transition("q2", "??c", &[1], "q3")
        .transition("q2", "??d", &[1], "q4")
        .transition("q3", "!!d", &[-1], "q5")
        .transition("q6", "??a", &[1], "q7")
        .transition("q7", "!!b", &[-1], "q8")
        .transition("q8", "!!c", &[-1], "q9")
        .build()
        .unwrap()
}

fn cfg(state: u32, counters: &[u32]) -> VassConfig {
    VassConfig::new(StateId(state), counters.to_vec())
}

fn config_strategy() -> impl Strategy<Value = VassConfig> {
    (0u32..3, prop::collection::vec(0u32..5, 2)).prop_map(|(s, v)| VassConfig::new(StateId(s), v))
}

#[test]
fn minimize_examples() {
    assert!(minimize(Vec::<VassConfig>::new(), VassConfig::leq).is_empty());
    let out = minimize(vec![cfg(0, &[2, 0]), cfg(0, &[1, 0]), cfg(1, &[0, 0])], VassConfig::leq);
    assert_eq!(out, vec![cfg(0, &[1, 0]), cfg(1, &[0, 0])]);
}

#[test]
fn subsumption_examples() {
    assert!(basis_subsumes(&[cfg(0, &[0, 0])], &[cfg(0, &[3, 1])], VassConfig::leq));
    assert!(!basis_subsumes(&[cfg(0, &[1, 0])], &[cfg(0, &[0, 1])], VassConfig::leq));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn minimize_keeps_exactly_the_undominated(configs in prop::collection::vec(config_strategy(), 0..50)) {
        let out = minimize(configs.clone(), VassConfig::leq);
        // all-pairs oracle: first occurrence of every element with no strictly
        // smaller element
        let mut expected: Vec<VassConfig> = Vec::new();
        for c in &configs {
            let dominated = configs.iter().any(|d| d.leq(c) && !c.leq(d));
            if !dominated && !expected.contains(c) {
                expected.push(c.clone());
            }
        }
        prop_assert_eq!(&out, &expected);
        prop_assert!(is_antichain(&out, VassConfig::leq));
        for c in &configs {
            prop_assert!(out.iter().any(|m| m.leq(c)));
        }
    }

    #[test]
    fn subsumption_matches_membership(
        b1 in prop::collection::vec(config_strategy(), 0..6),
        b2 in prop::collection::vec(config_strategy(), 0..6),
    ) {
        let b1 = minimize(b1, VassConfig::leq);
        let b2 = minimize(b2, VassConfig::leq);
        let expected = b2.iter().all(|c| b1.iter().any(|m| m.leq(c)));
        prop_assert_eq!(basis_subsumes(&b1, &b2, VassConfig::leq), expected);
    }

    #[test]
    fn order_is_reflexive_and_transitive(a in config_strategy(), b in config_strategy(), c in config_strategy()) {
        prop_assert!(a.leq(&a));
        if a.leq(&b) && b.leq(&c) {
            prop_assert!(a.leq(&c));
        }
    }
}

#[test]
fn plain_process_reaches_q1() {
    let p = relay();
    let v = backward_coverability(&ProcessSpace(&p), &p.config("q1", &[0]), ResourceLimits::default()).unwrap();
    assert!(v.is_coverable());
    let w = v.witness().unwrap();
    assert_eq!(w.labels.len(), 1);
    assert!(p.covered_by_initial(&w.chain[0]));
}

#[test]
fn initial_target_takes_no_iteration() {
    let p = relay();
    let v = backward_coverability(&ProcessSpace(&p), &p.config("q6", &[1]), ResourceLimits::default()).unwrap();
    assert!(v.is_coverable());
    assert_eq!(v.stats().iterations, 0);
}

#[test]
fn random_vass_agree_with_forward_search() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut compared = 0;
    let mut attempts = 0;
    while compared < 30 {
        attempts += 1;
        assert!(attempts < 2000, "too few conclusive forward searches");
        let p = random_vass(&mut rng, VassShape::default());
        let state = StateId(rng.gen_range(0..p.states().len()) as u32);
        let counters = (0..p.dim()).map(|_| rng.gen_range(0..3)).collect();
        let target = VassConfig::new(state, counters);
        let forward = forward_cover(&p, &all_labels(&p), &target, 8, 12);
        if !forward.complete {
            continue;
        }
        let space = ProcessSpace(&p);
        let verdict = Saturation::new(&space).audit(true).run(&target).unwrap();
        assert_eq!(verdict.is_coverable(), forward.found, "{p:?} target {target:?}");
        assert_eq!(verdict.stats().audit_violations, 0);
        compared += 1;
    }
}

#[test]
fn witnesses_realize_into_runs() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..100 {
        let p = random_vass(&mut rng, VassShape::default());
        let state = StateId(rng.gen_range(0..p.states().len()) as u32);
        let target = VassConfig::new(state, vec![0; p.dim()]);
        let space = ProcessSpace(&p);
        let verdict = backward_coverability(&space, &target, ResourceLimits::default()).unwrap();
        if let Some(w) = verdict.witness() {
            let start = p.initial().iter().find(|s| w.chain[0].leq(s)).unwrap();
            let path = wsbn::wqo::realize_witness(&space, start, w).expect("compatible order realizes");
            assert!(target.leq(path.last().unwrap()));
        }
    }
}

#[test]
fn per_label_pre_basis_equals_filtered_model() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..50 {
        let p = random_vass(&mut rng, VassShape::default());
        for label in p.labels() {
            let mut b = VassSpec::builder(p.dim());
            for c in p.initial() {
                let counters: Vec<i64> = c.counters.iter().map(|&x| i64::from(x)).collect();
                b.add_initial(p.state_name(c.state), &counters);
            }
            for s in p.states() {
                b.state(s);
            }
            for t in p.transitions().iter().filter(|t| t.label == label) {
                let delta: Vec<i64> = t.delta.iter().map(|&x| i64::from(x)).collect();
                b.add_transition(
                    p.state_name(t.source),
                    &label.display(wsbn::Semantics::letter_names(&p)).to_string(),
                    &delta,
                    p.state_name(t.target),
                );
            }
            let filtered = b.build().unwrap();
            let fl = filtered.labels()[0];
            for state in 0..p.states().len() {
                let basis = vec![VassConfig::new(StateId(state as u32), vec![1; p.dim()])];
                assert_eq!(p.pre_basis(label, &basis), filtered.pre_basis(fl, &basis));
            }
        }
    }
}
