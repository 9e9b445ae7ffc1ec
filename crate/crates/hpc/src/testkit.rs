//! Hand-built instances shared by the test suites.

use crate::alphabet::Alphabet;
use crate::dfa::Dfa;
use crate::oracle::HairpinInstance;

pub fn ab_alphabet() -> Alphabet {
    Alphabet::from_pairs(&[("a", "A"), ("b", "B")]).unwrap()
}

/// L1 = a*(b|B)A, ov(L2) = a*BA, kappa 1, over a=0, A=1, b=2, B=3.
/// Completion: a+ b A+ together with {a^i B A^j : i >= j >= 1}. Not regular.
/// State order in both DFAs: start, primed, final, trap.
pub fn golden() -> HairpinInstance {
    let al = ab_alphabet();
    let dfa1 = Dfa {
        n: 4,
        k: 4,
        initial: 0,
        finals: vec![false, false, true, false],
        delta: vec![
            vec![0, 3, 1, 1],
            vec![3, 2, 3, 3],
            vec![3, 3, 3, 3],
            vec![3, 3, 3, 3],
        ],
    };
    let dfa2 = Dfa {
        n: 4,
        k: 4,
        initial: 0,
        finals: vec![false, false, true, false],
        delta: vec![
            vec![0, 3, 3, 1],
            vec![3, 2, 3, 3],
            vec![3, 3, 3, 3],
            vec![3, 3, 3, 3],
        ],
    };
    HairpinInstance::new(al, 1, dfa1, dfa2)
}

/// L1 = a*bA, L2 empty, kappa 1. Completion: {a^i b A^j : i >= j >= 1},
/// not regular; the input languages make one automaton side finite.
pub fn one_sided_counting() -> HairpinInstance {
    let al = ab_alphabet();
    let (dfa1, _) = Dfa::from_partial(3, 4, 0, &[2], &[(0, 0, 0), (0, 2, 1), (1, 1, 2)]);
    let dfa2 = Dfa::empty_language(4);
    HairpinInstance::new(al, 1, dfa1, dfa2)
}

/// L1 = {abA}, L2 empty, kappa 1. Completion: {abA}.
pub fn singleton() -> HairpinInstance {
    let al = ab_alphabet();
    let (dfa1, _) = Dfa::from_partial(4, 4, 0, &[3], &[(0, 0, 1), (1, 2, 2), (2, 1, 3)]);
    let dfa2 = Dfa::empty_language(4);
    HairpinInstance::new(al, 1, dfa1, dfa2)
}

/// L1 = a*bA, ov(L2) = a+bA, kappa 1, over a=0, A=1 and a self-paired b=2.
/// The two sides fill in each other's missing completions: the result is
/// exactly a+ b A+, which is regular.
pub fn regular_two_sided() -> HairpinInstance {
    let al = Alphabet::from_pairs(&[("a", "A"), ("b", "b")]).unwrap();
    let (dfa1, _) = Dfa::from_partial(3, 3, 0, &[2], &[(0, 0, 0), (0, 2, 1), (1, 1, 2)]);
    let (dfa2, _) = Dfa::from_partial(4, 3, 0, &[3], &[(0, 0, 1), (1, 0, 1), (1, 2, 2), (2, 1, 3)]);
    HairpinInstance::new(al, 1, dfa1, dfa2)
}

/// L1 = a a* A, ov(L2) = b a* B, kappa 1. Completion:
/// {a^i A^j : i >= j >= 1} union {b A^i B : i >= 0}. Not regular.
pub fn pumping_pair() -> HairpinInstance {
    let al = ab_alphabet();
    let (dfa1, _) = Dfa::from_partial(3, 4, 0, &[2], &[(0, 0, 1), (1, 0, 1), (1, 1, 2)]);
    let (dfa2, _) = Dfa::from_partial(3, 4, 0, &[2], &[(0, 2, 1), (1, 0, 1), (1, 3, 2)]);
    HairpinInstance::new(al, 1, dfa1, dfa2)
}
