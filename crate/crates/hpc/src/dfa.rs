//! Complete deterministic finite automata over letter indices.
//!
//! Every DFA here is complete: `delta[state][letter]` is total. Partial
//! transition tables are completed with a fresh non-accepting sink at
//! construction time.

use crate::alphabet::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    /// Number of states; states are `0..n`.
    pub n: usize,
    /// Number of letters; `delta[p]` has exactly this many entries.
    pub k: usize,
    pub initial: usize,
    pub finals: Vec<bool>,
    /// `delta[p][a]` is the successor of `p` on letter `a`.
    pub delta: Vec<Vec<usize>>,
}

impl Dfa {
    /// Builds a complete DFA from a possibly partial table. Missing entries
    /// go to a fresh non-accepting sink (added only if needed). Returns the
    /// DFA and whether a sink was added.
    pub fn from_partial(
        n: usize,
        k: usize,
        initial: usize,
        finals: &[usize],
        table: &[(usize, Letter, usize)],
    ) -> (Dfa, bool) {
        let mut delta = vec![vec![usize::MAX; k]; n];
        for &(p, a, q) in table {
            delta[p][a as usize] = q;
        }
        let needs_sink = delta.iter().any(|row| row.iter().any(|&q| q == usize::MAX));
        let n_total = if needs_sink { n + 1 } else { n };
        if needs_sink {
            let sink = n;
            for row in &mut delta {
                for q in row.iter_mut() {
                    if *q == usize::MAX {
                        *q = sink;
                    }
                }
            }
            delta.push(vec![sink; k]);
        }
        let mut fin = vec![false; n_total];
        for &f in finals {
            fin[f] = true;
        }
        (Dfa { n: n_total, k, initial, finals: fin, delta }, needs_sink)
    }

    /// DFA accepting the empty language (single non-final sink).
    pub fn empty_language(k: usize) -> Dfa {
        Dfa { n: 1, k, initial: 0, finals: vec![false], delta: vec![vec![0; k]] }
    }

    pub fn step(&self, p: usize, a: Letter) -> usize {
        self.delta[p][a as usize]
    }

    pub fn run_from(&self, mut p: usize, w: &[Letter]) -> usize {
        for &a in w {
            p = self.step(p, a);
        }
        p
    }

    pub fn run(&self, w: &[Letter]) -> usize {
        self.run_from(self.initial, w)
    }

    pub fn accepts(&self, w: &[Letter]) -> bool {
        self.finals[self.run(w)]
    }

    pub fn is_final(&self, p: usize) -> bool {
        self.finals[p]
    }

    /// `preimage[a][q]` lists the states `p` with `delta[p][a] = q`.
    pub fn preimages(&self) -> Vec<Vec<Vec<usize>>> {
        let mut pre = vec![vec![Vec::new(); self.n]; self.k];
        for p in 0..self.n {
            for a in 0..self.k {
                pre[a][self.delta[p][a]].push(p);
            }
        }
        pre
    }

    /// Shortest distance from each state to any final state (`usize::MAX` if
    /// no final state is reachable).
    pub fn distance_to_final(&self) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        for p in 0..self.n {
            if self.finals[p] {
                dist[p] = 0;
                queue.push_back(p);
            }
        }
        let pre = self.preimages();
        while let Some(q) = queue.pop_front() {
            for a in 0..self.k {
                for &p in &pre[a][q] {
                    if dist[p] == usize::MAX {
                        dist[p] = dist[q] + 1;
                        queue.push_back(p);
                    }
                }
            }
        }
        dist
    }

    /// All accepted words of length at most `max_len`, in canonical
    /// (length, lex) order. Cost is proportional to the number of live
    /// prefixes, so dense languages cost `O(k^max_len)`.
    pub fn enumerate_language(&self, max_len: usize) -> Vec<Word> {
        let dist = self.distance_to_final();
        let mut out = Vec::new();
        let mut word: Word = Vec::new();
        self.enum_rec(self.initial, max_len, &dist, &mut word, &mut out);
        crate::alphabet::canonical_sort(&mut out);
        out
    }

    fn enum_rec(&self, p: usize, budget: usize, dist: &[usize], word: &mut Word, out: &mut Vec<Word>) {
        if self.finals[p] {
            out.push(word.clone());
        }
        if budget == 0 {
            return;
        }
        for a in 0..self.k {
            let q = self.delta[p][a];
            if dist[q] != usize::MAX && dist[q] < budget {
                word.push(a as Letter);
                self.enum_rec(q, budget - 1, dist, word, out);
                word.pop();
            }
        }
    }

    /// True iff the accepted language is empty.
    pub fn is_empty_language(&self) -> bool {
        self.distance_to_final()[self.initial] == usize::MAX
    }

    /// Number of accepted words per length `0..=max_len`, exactly.
    pub fn count_words_by_length(&self, max_len: usize) -> Vec<num_bigint::BigUint> {
        use num_bigint::BigUint;
        use num_traits::Zero;
        let mut vec: Vec<BigUint> = (0..self.n)
            .map(|p| if p == self.initial { BigUint::from(1u8) } else { BigUint::zero() })
            .collect();
        let mut counts = Vec::with_capacity(max_len + 1);
        for _ in 0..=max_len {
            let total = vec
                .iter()
                .enumerate()
                .filter(|&(p, _)| self.finals[p])
                .fold(BigUint::zero(), |acc, (_, c)| acc + c);
            counts.push(total);
            let mut next = vec![BigUint::zero(); self.n];
            for p in 0..self.n {
                if vec[p].is_zero() {
                    continue;
                }
                for a in 0..self.k {
                    let q = self.delta[p][a];
                    next[q] += &vec[p];
                }
            }
            vec = next;
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// a* b bar(a) over letters a=0, A=1, b=2, B=3.
    fn astar_b_abar() -> Dfa {
        let table = vec![(0, 0u8, 0), (0, 2u8, 1), (1, 1u8, 2)];
        let (d, sink_added) = Dfa::from_partial(3, 4, 0, &[2], &table);
        assert!(sink_added);
        assert_eq!(d.n, 4);
        d
    }

    #[test]
    fn completion_adds_sink() {
        let d = astar_b_abar();
        assert!(d.accepts(&[2, 1]));
        assert!(d.accepts(&[0, 0, 2, 1]));
        assert!(!d.accepts(&[0, 2]));
        assert!(!d.accepts(&[2, 1, 0]));
    }

    #[test]
    fn enumerate_in_canonical_order() {
        let d = astar_b_abar();
        let words = d.enumerate_language(4);
        assert_eq!(words, vec![vec![2, 1], vec![0, 2, 1], vec![0, 0, 2, 1]]);
    }

    #[test]
    fn counts_match_enumeration() {
        let d = astar_b_abar();
        let counts = d.count_words_by_length(6);
        let words = d.enumerate_language(6);
        for m in 0..=6usize {
            let by_enum = words.iter().filter(|w| w.len() == m).count();
            assert_eq!(counts[m], num_bigint::BigUint::from(by_enum));
        }
    }

    #[test]
    fn empty_language_dfa() {
        let d = Dfa::empty_language(2);
        assert!(d.is_empty_language());
        assert!(d.enumerate_language(3).is_empty());
    }
}
