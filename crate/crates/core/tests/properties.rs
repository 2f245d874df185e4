mod common;

use common::CASES;

#[test]
fn gauss_rationals_form_a_field() {
    common::gauss_field_axioms(1, 256).unwrap();
}

#[test]
fn rational_functions_form_a_field() {
    common::ratfun_field_axioms(2, CASES).unwrap();
}

#[test]
fn basis_change_is_a_group_action() {
    common::action_laws(3, CASES).unwrap();
}

#[test]
fn invariants_ignore_the_basis() {
    common::invariant_basis_invariance(4, CASES).unwrap();
}

#[test]
fn derivations_close_under_bracket() {
    common::derivation_bracket_closure(5, CASES).unwrap();
}

#[test]
fn reduction_and_closure_are_idempotent() {
    common::reduction_closure_idempotence(6, CASES).unwrap();
}

#[test]
fn congruent_matrices_classify_alike() {
    common::congruence_transport(7, CASES).unwrap();
}

#[test]
fn heisenberg_correspondence_is_equivariant() {
    common::heisenberg_equivariance(8, CASES).unwrap();
}

#[test]
fn heisenberg_roundtrip() {
    common::heisenberg_roundtrip(9, CASES).unwrap();
}
