//! Acceptance gate: runs every suite criterion and prints one pass/fail line
//! per criterion. Run with `cargo test --test acceptance -- --nocapture` to
//! see the lines even on success.

use nevlab_core::suite;

#[test]
fn acceptance_criteria() {
    let mut failed = 0usize;
    for id in 1..=suite::CRITERIA.len() as u32 {
        let r = suite::run(id, 1e-8).expect("valid id");
        println!("{}", r.line());
        if !r.passed {
            failed += 1;
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
