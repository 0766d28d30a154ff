//! The core of +1 surgery on the left-handed trefoil lives in a homology
//! sphere that is not an L-space, and its bordered structure breaks the
//! extremal rules that hold for knots in L-spaces.

use hfsplice_core::cfd_builder::extremal_violations;
use hfsplice_core::f2::BitVec;
use hfsplice_core::knot_library::get;
use hfsplice_core::pairing::box_tensor;
use hfsplice_core::type_a::{check_ainfty, extremal_violations_a, ImplicitTypeA};
use hfsplice_core::RhoIndex::*;

fn structure() -> hfsplice_core::type_d::TypeDStructure {
    get("sigma237_core_cfd").unwrap().cfd().unwrap()
}

#[test]
fn structure_is_valid() {
    let d = structure();
    assert!(d.check_structure().passed());
    assert!(d.is_reduced());
    let a2 = d.alexander2().unwrap();
    let bottom: Vec<&str> = (0..d.dim()).filter(|&i| a2[i] == -2).map(|i| d.name(i)).collect();
    assert_eq!(bottom, ["eta_1"]);
}

#[test]
fn both_witness_compositions_are_nonzero_and_distinct() {
    let d = structure();
    let eta1 = BitVec::unit(d.dim(), d.index_of("eta_1").unwrap());
    let first = d.apply_sequence(&[R123, R2], &eta1);
    let second = d.apply_sequence(&[R3, R2, R12], &eta1);
    assert!(!first.is_zero());
    assert!(!second.is_zero());
    assert_ne!(first, second);
}

#[test]
fn out_of_b_rule_fails_with_those_witnesses() {
    let d = structure();
    let b = vec![d.index_of("eta_1").unwrap()];
    let bad = extremal_violations(&d, &b, &[], &[], 8);
    let out_of_b: Vec<_> = bad
        .iter()
        .filter(|v| v.rule == "paths out of B")
        .map(|v| v.labels.clone())
        .collect();
    assert!(out_of_b.contains(&vec![R123, R2]));
    assert!(out_of_b.contains(&vec![R3, R2, R12]));
}

#[test]
fn type_a_side_fails_too() {
    let d = structure();
    let b = vec![d.index_of("eta_1").unwrap()];
    let a = ImplicitTypeA::new(d.clone()).unwrap();
    let eta1 = BitVec::unit(d.dim(), b[0]);
    assert!(!a.eval_m(&eta1, &[R3, R2, R12]).is_zero());
    assert!(!a.eval_m(&eta1, &[R123, R2]).is_zero());
    let bad = extremal_violations_a(&a, &b, &[], 8);
    assert!(bad.iter().any(|v| v.labels == [R123, R2]));
    assert!(bad.iter().any(|v| v.labels == [R3, R2, R12]));
    assert!(check_ainfty(&a, 8).passed());
}

#[test]
fn pairing_with_unknot_recovers_the_homology_sphere() {
    // Splicing with the unknot complement refills the solid torus, so the
    // result is −Σ(2,3,7), whose hat-HF has rank 3.
    let a = ImplicitTypeA::new(structure()).unwrap();
    let unknot = get("unknot").unwrap().cfd().unwrap();
    let c = box_tensor(&a, &unknot, 12).unwrap();
    assert_eq!(c.homology_rank().unwrap(), 3);
}
