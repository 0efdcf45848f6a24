//! Text round trip followed by every registered strategy.

use nacirc::corpus::{fixtures, random_family};
use nacirc::hitting::HittingOptions;
use nacirc::strategy::{strategy, strategy_names, PitOptions};
use nacirc::{Circuit, Field, Mode};

fn check(name: &str, c: &Circuit, zero: Option<bool>) -> usize {
    let parsed = Circuit::parse(&c.to_text()).unwrap();
    assert_eq!(parsed.to_text(), c.to_text(), "{name}");
    let opts = PitOptions { seed: 5, hitting: HittingOptions::with_budget(200_000), ..PitOptions::default() };
    let mut answers = Vec::new();
    let mut skipped = 0;
    for s in strategy_names() {
        match strategy(s).unwrap().test(&parsed, &opts) {
            Ok(v) => answers.push((s, v.is_zero())),
            Err(e) if s == "hitting" && e.is_unsupported() => skipped += 1,
            Err(e) => panic!("{name} {s}: {e}"),
        }
    }
    let truth = zero.unwrap_or(answers.iter().find(|(s, _)| *s == "oracle").unwrap().1);
    for (s, z) in answers {
        assert_eq!(z, truth, "{name}: {s}");
    }
    skipped
}

#[test]
fn fixtures_agree_after_reparse() {
    let f = Field::default();
    let mut skipped = 0;
    for (name, c, zero) in fixtures(f) {
        skipped += check(&name, &c, Some(zero));
    }
    // zero instances with many variables are out of the hitting scan budget
    assert!(skipped <= 6, "{skipped}");
}

#[test]
fn random_circuits_agree_after_reparse() {
    let f = Field::new(1_000_000_007).unwrap();
    let mut skipped = 0;
    for mode in [Mode::Comm, Mode::NonComm] {
        for (i, c) in random_family(mode, f, 24, 9).iter().enumerate() {
            skipped += check(&format!("{}-{i}", mode.as_str()), c, None);
        }
    }
    assert!(skipped < 24, "{skipped}");
}
