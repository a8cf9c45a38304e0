//! The verification gate: one test per documented guarantee, each driving a
//! claim from the reproduce registry end to end on its pinned instances and
//! asserting the measured outcome. Run with
//! `cargo test --test acceptance -- --nocapture` to see one line per claim.

use std::time::Instant;

use hamswitch_cli::reproduce::{run_claim, CLAIM_IDS};

/// Wall-clock budget for the composed-switch transform batch (250 cycle
/// pairs on graphs of 28–40 vertices), generous even single-threaded.
const TRANSFORM_TIME_BUDGET_SECS: u64 = 120;

fn drive(index: usize, id: &str) {
    assert_eq!(CLAIM_IDS[index - 1], id, "claim registry order changed");
    match run_claim(id) {
        Ok(r) => {
            println!(
                "criterion {index:02} ({id}): {}",
                if r.pass { "PASS" } else { "FAIL" }
            );
            assert!(r.pass, "criterion {index:02} ({id}): {}", r.details);
        }
        Err(e) => {
            println!("criterion {index:02} ({id}): FAIL (error: {e})");
            panic!("criterion {index:02} ({id}): {e}");
        }
    }
}

#[test]
fn criterion_01_composed_switches_connect_random_dense_hamilton_cycles() {
    let t0 = Instant::now();
    drive(1, "random-dense-transform");
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs() < TRANSFORM_TIME_BUDGET_SECS,
        "transform batch took {elapsed:?}"
    );
}

#[test]
fn criterion_02_reconnection_needs_one_small_switch_per_extra_component() {
    drive(2, "reconnect-bound");
}

#[test]
fn criterion_03_two_factor_transforms_stay_within_size_four_switches() {
    drive(3, "twofactor-transform");
}

#[test]
fn criterion_04_parity_preserving_family_disconnects_the_chain() {
    drive(4, "parity-locked");
}

#[test]
fn criterion_05_gadget_family_locks_distant_cycle_pairs() {
    drive(5, "gadget-locked");
}

#[test]
fn criterion_06_monotone_embedding_keeps_its_lipschitz_and_edit_bounds() {
    drive(6, "monotone-pipeline");
}

#[test]
fn criterion_07_staircase_counts_match_their_closed_forms() {
    drive(7, "staircase-count");
}

#[test]
fn criterion_08_auxiliary_chain_is_stable_with_bounded_repairs() {
    drive(8, "js-stability");
}

#[test]
fn criterion_09_kernel_algebra_and_mixing_agree_with_exact_spectra() {
    drive(9, "chain-algebra");
}

#[test]
fn criterion_10_every_artifact_is_byte_identical_across_reruns() {
    drive(10, "determinism");
}
