//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use factor_forge::engine::Label;

/// Issues with their pro-plaintiff and pro-defendant factors, as tabulated
/// for US trade secrets law.
pub const ISSUE_FACTORS: [(&str, &[&str], &[&str]); 5] = [
    ("InfoValuable", &["F8p", "F15p"], &["F16d", "F20d", "F24d", "F27d"]),
    ("SecrecyMaintained", &["F4p", "F6p", "F12p"], &["F10d", "F19d"]),
    ("ImproperMeans", &["F2p", "F7p", "F14p", "F22p", "F26p"], &["F17d", "F25d"]),
    ("InfoUsed", &["F7p", "F8p", "F14p", "F18p"], &["F17d", "F25d"]),
    ("ConfidentialRelationship", &["F4p", "F13p", "F21p"], &["F1d", "F23d"]),
];

pub const LEAVES: [&str; 5] =
    ["InfoValuable", "SecrecyMaintained", "InfoUsed", "ConfidentialRelationship", "ImproperMeans"];

/// The plaintiff wins iff the information is a trade secret (valuable and
/// kept secret) and was misappropriated (used in confidence, or obtained
/// improperly).
pub fn plaintiff_wins(valuable: bool, secret: bool, used: bool, confidential: bool, improper: bool) -> bool {
    valuable && secret && ((used && confidential) || improper)
}

/// Grounded extension as the least fixpoint of the characteristic function
/// F(S) = {a | every attacker of a is attacked by S}, iterated from the
/// empty set. OUT is whatever the extension attacks.
pub fn grounded_oracle(n: usize, edges: &[(usize, usize)]) -> BTreeMap<usize, Label> {
    let attackers = |a: usize| edges.iter().filter(move |e| e.1 == a).map(|e| e.0);
    let attacked_by = |s: &BTreeSet<usize>, b: usize| edges.iter().any(|e| e.1 == b && s.contains(&e.0));
    let mut s: BTreeSet<usize> = BTreeSet::new();
    loop {
        let next: BTreeSet<usize> = (0..n).filter(|&a| attackers(a).all(|b| attacked_by(&s, b))).collect();
        if next == s {
            break;
        }
        s = next;
    }
    (0..n)
        .map(|a| {
            let l = if s.contains(&a) {
                Label::In
            } else if attacked_by(&s, a) {
                Label::Out
            } else {
                Label::Undec
            };
            (a, l)
        })
        .collect()
}
