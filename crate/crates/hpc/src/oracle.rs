//! Brute-force ground truth for hairpin completion semantics.
//!
//! Everything here recomputes from the raw definition with literal
//! factorization scans; nothing is shared with the decision procedure, the
//! grammar, or the bridge automaton, so it can serve as an independent
//! cross-check for all of them.

use std::collections::BTreeSet;

use crate::alphabet::{canonical_sort, Letter, Word};
use crate::dfa::Dfa;

/// A hairpin completion problem: two complete DFAs over a shared involutive
/// alphabet plus the primer length kappa. `dfa1` accepts L1; `dfa2` accepts
/// the reversed complement of L2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HairpinInstance {
    pub alphabet: crate::alphabet::Alphabet,
    pub kappa: usize,
    pub dfa1: Dfa,
    pub dfa2: Dfa,
}

impl HairpinInstance {
    pub fn new(alphabet: crate::alphabet::Alphabet, kappa: usize, dfa1: Dfa, dfa2: Dfa) -> HairpinInstance {
        assert!(kappa >= 1, "kappa must be at least 1");
        assert_eq!(dfa1.k, alphabet.len(), "dfa1 alphabet size mismatch");
        assert_eq!(dfa2.k, alphabet.len(), "dfa2 alphabet size mismatch");
        HairpinInstance { alphabet, kappa, dfa1, dfa2 }
    }

    /// The same problem with the two languages exchanged, so that every word
    /// of the original completion appears reversed-complemented. Used to run
    /// the decision battery "from the other end".
    pub fn mirrored(&self) -> HairpinInstance {
        HairpinInstance {
            alphabet: self.alphabet.clone(),
            kappa: self.kappa,
            dfa1: self.dfa2.clone(),
            dfa2: self.dfa1.clone(),
        }
    }
}

/// The factorization pi = gamma alpha beta bar(alpha) bar(gamma) that
/// certifies membership, with |alpha| = kappa and |gamma| minimal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaAlphaSplit {
    pub gamma: Word,
    pub alpha: Word,
}

/// Which end of the word gets completed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// w = gamma alpha beta bar(alpha) in L1 extends to w bar(gamma).
    Right,
    /// w = alpha beta bar(alpha) bar(gamma) in L2 extends to gamma w.
    Left,
}

pub const DEFAULT_MAX_LEN_CAP: usize = 14;

/// Enumeration length cap; override with the HPC_MAX_LEN environment
/// variable. Completion sets grow exponentially in this bound.
pub fn max_len_cap() -> usize {
    std::env::var("HPC_MAX_LEN")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_MAX_LEN_CAP)
}

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("enumeration to length {requested} exceeds the cap {cap}; set HPC_MAX_LEN to raise it")]
    CapExceeded { requested: usize, cap: usize },
}

/// All hairpin completions of a single word, by exhaustive scan over the
/// factorization parameters t = |gamma| and a = |alpha|. Purely structural:
/// no language membership is consulted.
pub fn completions_of_word(w: &[Letter], inst: &HairpinInstance, side: Side) -> BTreeSet<Word> {
    let al = &inst.alphabet;
    let n = w.len();
    let mut out = BTreeSet::new();
    for t in 0..=n {
        for a in inst.kappa..=(n - t) / 2 {
            let ok = match side {
                Side::Right => w[n - a..] == al.bar_word(&w[t..t + a])[..],
                Side::Left => w[n - t - a..n - t] == al.bar_word(&w[..a])[..],
            };
            if !ok {
                continue;
            }
            // The completion depends only on t, so one matching a suffices.
            let pi = match side {
                Side::Right => {
                    let mut p = w.to_vec();
                    p.extend(al.bar_word(&w[..t]));
                    p
                }
                Side::Left => {
                    let mut p = al.bar_word(&w[n - t..]);
                    p.extend_from_slice(w);
                    p
                }
            };
            out.insert(pi);
            break;
        }
    }
    out
}

/// Whether pi belongs to the hairpin completion, by scanning every split
/// pi = gamma alpha beta bar(alpha) bar(gamma) with |alpha| >= kappa and
/// running the two DFAs from scratch on each candidate.
pub fn membership(pi: &[Letter], inst: &HairpinInstance) -> bool {
    let al = &inst.alphabet;
    let n = pi.len();
    for t in 0..=n {
        for a in inst.kappa..=n {
            // gamma and alpha both occur twice in pi = gamma alpha beta
            // bar(alpha) bar(gamma).
            if 2 * (t + a) > n {
                continue;
            }
            let s = t + a;
            if !(1..=s).all(|j| pi[n - j] == al.bar(pi[j - 1])) {
                continue;
            }
            if inst.dfa1.accepts(&pi[..n - t]) || inst.dfa2.accepts(&al.bar_word(&pi[t..])) {
                return true;
            }
        }
    }
    false
}

/// The certifying split with |alpha| = kappa and |gamma| minimal, scanning
/// |gamma| ascending. Returns none iff pi is not in the completion.
pub fn minimal_gamma_alpha_prefix(pi: &[Letter], inst: &HairpinInstance) -> Option<GammaAlphaSplit> {
    let al = &inst.alphabet;
    let n = pi.len();
    for t in 0..=n {
        let s = t + inst.kappa;
        if 2 * s > n {
            break;
        }
        if !(1..=s).all(|j| pi[n - j] == al.bar(pi[j - 1])) {
            continue;
        }
        if inst.dfa1.accepts(&pi[..n - t]) || inst.dfa2.accepts(&al.bar_word(&pi[t..])) {
            return Some(GammaAlphaSplit {
                gamma: pi[..t].to_vec(),
                alpha: pi[t..s].to_vec(),
            });
        }
    }
    None
}

/// The full completion truncated to `max_len`, enumerated outward from L1
/// and L2 (completions are never shorter than their source word). Canonical
/// order: length, then lexicographic.
pub fn oracle_hairpin_set(inst: &HairpinInstance, max_len: usize) -> Result<Vec<Word>, OracleError> {
    let cap = max_len_cap();
    if max_len > cap {
        return Err(OracleError::CapExceeded { requested: max_len, cap });
    }
    let mut out: BTreeSet<Word> = BTreeSet::new();
    for w in inst.dfa1.enumerate_language(max_len) {
        for pi in completions_of_word(&w, inst, Side::Right) {
            if pi.len() <= max_len {
                out.insert(pi);
            }
        }
    }
    for v in inst.dfa2.enumerate_language(max_len) {
        let w = inst.alphabet.bar_word(&v); // a word of L2 itself
        for pi in completions_of_word(&w, inst, Side::Left) {
            if pi.len() <= max_len {
                out.insert(pi);
            }
        }
    }
    let mut words: Vec<Word> = out.into_iter().collect();
    canonical_sort(&mut words);
    Ok(words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::*;

    fn words(inst: &HairpinInstance, strs: &[&str]) -> Vec<Word> {
        strs.iter().map(|s| inst.alphabet.parse(s).unwrap()).collect()
    }

    #[test]
    fn completions_by_exhaustive_split() {
        let inst = one_sided_counting();
        let w = inst.alphabet.parse("aabA").unwrap();
        let got = completions_of_word(&w, &inst, Side::Right);
        let want: BTreeSet<Word> = words(&inst, &["aabA", "aabAA"]).into_iter().collect();
        assert_eq!(got, want);

        let short = inst.alphabet.parse("b").unwrap();
        assert!(completions_of_word(&short, &inst, Side::Right).is_empty());
        assert!(completions_of_word(&short, &inst, Side::Left).is_empty());

        let aba = inst.alphabet.parse("abA").unwrap();
        let got = completions_of_word(&aba, &inst, Side::Right);
        let want: BTreeSet<Word> = words(&inst, &["abA"]).into_iter().collect();
        assert_eq!(got, want);
    }

    #[test]
    fn membership_by_split_scan() {
        let inst = one_sided_counting();
        assert!(membership(&inst.alphabet.parse("aabAA").unwrap(), &inst));
        assert!(!membership(&inst.alphabet.parse("abAA").unwrap(), &inst));

        let g = golden();
        assert!(membership(&g.alphabet.parse("abA").unwrap(), &g));
        assert!(!membership(&g.alphabet.parse("ABa").unwrap(), &g));
    }

    #[test]
    fn golden_set_and_counts() {
        let g = golden();
        let set = oracle_hairpin_set(&g, 3).unwrap();
        assert_eq!(set, words(&g, &["abA", "aBA"]));

        let set5 = oracle_hairpin_set(&g, 5).unwrap();
        let count = |m: usize| set5.iter().filter(|w| w.len() == m).count();
        assert_eq!((count(3), count(4), count(5)), (2, 3, 5));
    }

    #[test]
    fn empty_and_singleton_sets() {
        let al = ab_alphabet();
        let empty = HairpinInstance::new(
            al.clone(),
            1,
            Dfa::empty_language(al.len()),
            Dfa::empty_language(al.len()),
        );
        assert!(oracle_hairpin_set(&empty, 6).unwrap().is_empty());

        let s = singleton();
        let set = oracle_hairpin_set(&s, 6).unwrap();
        assert_eq!(set, words(&s, &["abA"]));
    }

    #[test]
    fn one_sided_counting_set() {
        let inst = one_sided_counting();
        let set = oracle_hairpin_set(&inst, 5).unwrap();
        assert_eq!(set, words(&inst, &["abA", "aabA", "aaabA", "aabAA"]));
    }

    #[test]
    fn minimal_split_scans_gamma_ascending() {
        let inst = one_sided_counting();
        let pi = inst.alphabet.parse("aabAA").unwrap();
        let split = minimal_gamma_alpha_prefix(&pi, &inst).unwrap();
        assert_eq!(split.gamma, inst.alphabet.parse("a").unwrap());
        assert_eq!(split.alpha, inst.alphabet.parse("a").unwrap());

        let g = golden();
        let pi = g.alphabet.parse("abA").unwrap();
        let split = minimal_gamma_alpha_prefix(&pi, &g).unwrap();
        assert!(split.gamma.is_empty());
        assert_eq!(split.alpha, g.alphabet.parse("a").unwrap());

        assert!(minimal_gamma_alpha_prefix(&g.alphabet.parse("ABa").unwrap(), &g).is_none());
    }

    #[test]
    fn membership_matches_enumeration() {
        for inst in [golden(), one_sided_counting(), regular_two_sided(), pumping_pair()] {
            let max_len = 7;
            let set: BTreeSet<Word> = oracle_hairpin_set(&inst, max_len).unwrap().into_iter().collect();
            // Walk all words up to length 5 over the alphabet (k^5 is small).
            let k = inst.alphabet.len();
            let mut stack: Vec<Word> = vec![Vec::new()];
            while let Some(w) = stack.pop() {
                assert_eq!(membership(&w, &inst), set.contains(&w), "word {:?}", w);
                assert_eq!(membership(&w, &inst), minimal_gamma_alpha_prefix(&w, &inst).is_some());
                if w.len() < 5 {
                    for a in 0..k {
                        let mut w2 = w.clone();
                        w2.push(a as Letter);
                        stack.push(w2);
                    }
                }
            }
        }
    }

    #[test]
    fn right_completions_of_l1_words_are_members() {
        let g = golden();
        for w in g.dfa1.enumerate_language(6) {
            for pi in completions_of_word(&w, &g, Side::Right) {
                assert!(membership(&pi, &g), "completion {:?} of {:?}", pi, w);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = golden();
        let err = oracle_hairpin_set(&g, max_len_cap() + 1).unwrap_err();
        assert!(matches!(err, OracleError::CapExceeded { .. }));
    }
}
