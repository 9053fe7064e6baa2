mod common;

use common::linear::{fine, random_case, unit_source};
use hyperion_core::hset::{check_covering, derive_backcovering_by_symmetry, CertDirection, PlanarMap};
use hyperion_core::interval::decimal_mul;
use hyperion_core::proofs::{ProofSettings, Prover};
use proptest::prelude::*;
use rand::{rngs::StdRng, SeedableRng};

#[test]
fn linear_maps_agree_with_the_analytic_decision() {
    common::checks::covering_oracle().unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shrinking_the_entry_extent_keeps_a_covering(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let c = random_case(&mut rng);
        // Entry margin above 10%: the relation holds with the y limit at 0.9.
        prop_assume!(c.affine.decision(0.02, 0.9) == Some(true));
        let m = unit_source();
        let s = fine();
        prop_assert!(check_covering(&m, &c.n, 1, &c.map, &s).verified);
        let mut n = c.n.clone();
        for b in n.b[1].iter_mut() {
            *b = decimal_mul(b, "0.9").unwrap();
        }
        let cert = check_covering(&m, &n, 1, &c.map, &s);
        prop_assert!(cert.verified, "{:?}\n{:?}\n{:?}", c.affine, n.b, cert.diagnostics);
    }
}

#[test]
fn derived_certificates_do_not_touch_the_integrator() {
    let prover = Prover::new(ProofSettings::default()).unwrap();
    let report = prover.prove_theorem_p1p3();
    assert_eq!(report.symmetry_evaluations, 0);
    let derived: Vec<_> = report
        .certificates
        .iter()
        .filter(|c| c.direction == CertDirection::SymmetryDerived)
        .collect();
    assert!(!derived.is_empty());
    assert!(derived.iter().all(|c| c.verified && c.map_calls == 0 && c.pieces == 0));

    let forward = report
        .certificates
        .iter()
        .find(|c| c.direction == CertDirection::Forward && c.verified)
        .unwrap();
    let set = |name: &str| report.sets.iter().find(|s| s.name == name).unwrap();
    let (steps, evals) = (prover.integrator().step_count(), prover.map().evaluations());
    let (cert, from, to) = derive_backcovering_by_symmetry(forward, set(&forward.from), set(&forward.to)).unwrap();
    assert_eq!(prover.integrator().step_count(), steps);
    assert_eq!(prover.map().evaluations(), evals);
    assert!(cert.verified);
    assert_eq!(from.name, format!("R({})^T", forward.to));
    assert_eq!(to.name, format!("R({})^T", forward.from));
}
