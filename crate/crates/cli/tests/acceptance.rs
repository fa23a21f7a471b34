use jtcalc_cli::suite::{max_type_disagreements, run_criterion, CRITERIA};
use jtcalc_core::fields::Fe;
use jtcalc_core::theta::Variant;

const SEED: u64 = 42;

// Criterion 4 samples (s:t) = (1:2), where s + t = 0 in GF(3): the homotopy
// operator is (s + t) * theta_exp plus higher-order terms, which vanish here,
// so it is the zero map. The failure is expected and pinned below.
const UNATTAINABLE: [u8; 1] = [4];

#[test]
fn acceptance() {
    let mut unexpected = Vec::new();
    for c in &CRITERIA {
        let o = run_criterion(c, SEED);
        println!("{}", o.line());
        if o.passed == UNATTAINABLE.contains(&o.id) {
            unexpected.push(o.id);
        }
    }
    assert!(unexpected.is_empty(), "criteria with unexpected verdicts: {unexpected:?}");
}

#[test]
fn max_type_failure_is_confined_to_the_degenerate_homotopy() {
    let (points, bad, _) = max_type_disagreements().unwrap();
    assert_eq!(points, 243);
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0].0, Variant::Homotopy { s: Fe(1), t: Fe(2) });
    assert!(bad[0].1.starts_with("8[1] on"), "{}", bad[0].1);
}
