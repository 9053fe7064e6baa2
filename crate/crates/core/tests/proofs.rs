use hyperion_core::hset::CertDirection;
use hyperion_core::proofs::{ProofSettings, Prover, Verdict};

fn prover() -> Prover {
    Prover::new(ProofSettings::default()).unwrap()
}

#[test]
fn horseshoe_between_p1_and_p2() {
    let p = prover();
    let r = p.prove_theorem_p1p2();
    assert_eq!(r.verdict, Verdict::Proved, "{:?}", r.failures);
    let pairs: Vec<(&str, &str)> = r.certificates.iter().map(|c| (c.from.as_str(), c.to.as_str())).collect();
    assert_eq!(pairs, [("N0", "N0"), ("N0", "N1"), ("N1", "N1"), ("N1", "N0")]);
    assert!(r.certificates.iter().all(|c| c.verified && c.iterate == 1 && c.degree.is_some()));
    assert!(r.symbolic.is_some());
    assert!(!r.periodic.is_empty());
    // The period-one loops contain the proven fixed points.
    assert_eq!(r.cross_checks.len(), 2);
    assert!(r.cross_checks.iter().all(|c| c.holds), "{:?}", r.cross_checks);
}

#[test]
fn reports_are_reproducible() {
    let a = prover().prove_theorem_p1p2().to_json();
    let b = prover().prove_theorem_p1p2().to_json();
    assert_eq!(a, b);
}

#[test]
fn symmetric_theorem_closes_without_integration() {
    let p = prover();
    let r = p.prove_theorem_p1p3();
    assert_eq!(r.verdict, Verdict::Proved, "{:?}", r.failures);
    assert!(r.symmetric_sets.iter().all(|(_, ok)| *ok));
    assert_eq!(r.symmetric_sets.len(), 2);
    assert_eq!(r.symmetry_evaluations, 0);
    assert!(r.certificates.iter().any(|c| c.direction == CertDirection::SymmetryDerived));
    assert!(!r.derived_sets.is_empty());
}

#[test]
fn unknown_theorem() {
    assert!(prover().prove_theorem("p4p4").is_none());
}

#[test]
fn p3p3_closes_with_the_row_swapped_n3_frame() {
    use hyperion_core::hset::table::{Prelude, TheoremTable, BUILTIN};
    let text = BUILTIN.iter().find(|(id, _)| *id == "p3p3").unwrap().1;
    let p = prover();
    let asis = p.prove_table(&TheoremTable::parse(text, &Prelude::builtin()).unwrap());
    assert_eq!(asis.verdict, Verdict::Failed);
    assert!(asis.failures.iter().any(|f| f.starts_with("N3 => N4")), "{:?}", asis.failures);

    let swapped = text.replace("[0.866025, -0.5; 0.5, 0.866025]", "[0.5, 0.866025; 0.866025, -0.5]");
    assert_ne!(swapped, text);
    let r = p.prove_table(&TheoremTable::parse(&swapped, &Prelude::builtin()).unwrap());
    assert_eq!(r.verdict, Verdict::Proved, "{:?}", r.failures);
}
