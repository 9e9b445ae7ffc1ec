//! Nondeterministic finite automata (no epsilon transitions).

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::alphabet::{Alphabet, Letter, Word};
use crate::dfa::Dfa;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    pub n: usize,
    pub k: usize,
    pub initials: Vec<usize>,
    pub finals: Vec<bool>,
    /// Sorted, deduplicated arc list.
    pub arcs: Vec<(usize, Letter, usize)>,
}

impl Nfa {
    pub fn new(n: usize, k: usize, initials: Vec<usize>, finals: Vec<bool>, mut arcs: Vec<(usize, Letter, usize)>) -> Nfa {
        arcs.sort_unstable();
        arcs.dedup();
        Nfa { n, k, initials, finals, arcs }
    }

    pub fn from_dfa(d: &Dfa) -> Nfa {
        let mut arcs = Vec::with_capacity(d.n * d.k);
        for p in 0..d.n {
            for a in 0..d.k {
                arcs.push((p, a as Letter, d.delta[p][a]));
            }
        }
        Nfa::new(d.n, d.k, vec![d.initial], d.finals.clone(), arcs)
    }

    /// Forward adjacency: `adj[p]` holds `(letter, target)` sorted.
    pub fn adjacency(&self) -> Vec<Vec<(Letter, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(p, a, q) in &self.arcs {
            adj[p].push((a, q));
        }
        adj
    }

    pub fn reverse_adjacency(&self) -> Vec<Vec<(Letter, usize)>> {
        let mut radj = vec![Vec::new(); self.n];
        for &(p, a, q) in &self.arcs {
            radj[q].push((a, p));
        }
        for row in &mut radj {
            row.sort_unstable();
        }
        radj
    }

    pub fn accepts(&self, w: &[Letter]) -> bool {
        let mut cur: BTreeSet<usize> = self.initials.iter().copied().collect();
        let adj = self.adjacency();
        for &a in w {
            let mut next = BTreeSet::new();
            for &p in &cur {
                for &(b, q) in &adj[p] {
                    if b == a {
                        next.insert(q);
                    }
                }
            }
            cur = next;
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|&p| self.finals[p])
    }

    /// Removes states that are not both reachable and co-reachable.
    /// Returns the trimmed automaton and, for each old state, its new index.
    pub fn trim(&self) -> (Nfa, Vec<Option<usize>>) {
        let adj = self.adjacency();
        let radj = self.reverse_adjacency();
        let mut reach = vec![false; self.n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &i in &self.initials {
            if !reach[i] {
                reach[i] = true;
                queue.push_back(i);
            }
        }
        while let Some(p) = queue.pop_front() {
            for &(_, q) in &adj[p] {
                if !reach[q] {
                    reach[q] = true;
                    queue.push_back(q);
                }
            }
        }
        let mut coreach = vec![false; self.n];
        for p in 0..self.n {
            if self.finals[p] {
                coreach[p] = true;
                queue.push_back(p);
            }
        }
        while let Some(q) = queue.pop_front() {
            for &(_, p) in &radj[q] {
                if !coreach[p] {
                    coreach[p] = true;
                    queue.push_back(p);
                }
            }
        }
        let mut map = vec![None; self.n];
        let mut n_new = 0;
        for p in 0..self.n {
            if reach[p] && coreach[p] {
                map[p] = Some(n_new);
                n_new += 1;
            }
        }
        let initials = self.initials.iter().filter_map(|&i| map[i]).collect();
        let mut finals = vec![false; n_new];
        for p in 0..self.n {
            if let Some(np) = map[p] {
                finals[np] = self.finals[p];
            }
        }
        let arcs = self
            .arcs
            .iter()
            .filter_map(|&(p, a, q)| Some((map[p]?, a, map[q]?)))
            .collect();
        (Nfa::new(n_new, self.k, initials, finals, arcs), map)
    }

    /// Subset construction. State 0 of the result is the initial subset; a
    /// complete DFA is returned (the empty subset acts as sink).
    pub fn determinize(&self) -> Dfa {
        self.determinize_capped(usize::MAX).expect("uncapped subset construction")
    }

    /// Subset construction that gives up once more than `max_states` subsets
    /// appear, for callers that must not risk the exponential worst case.
    pub fn determinize_capped(&self, max_states: usize) -> Option<Dfa> {
        let adj = self.adjacency();
        let start: BTreeSet<usize> = self.initials.iter().copied().collect();
        let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut subsets: Vec<BTreeSet<usize>> = Vec::new();
        let mut delta: Vec<Vec<usize>> = Vec::new();
        index.insert(start.clone(), 0);
        subsets.push(start);
        let mut i = 0;
        while i < subsets.len() {
            let cur = subsets[i].clone();
            let mut row = Vec::with_capacity(self.k);
            for a in 0..self.k {
                let mut next = BTreeSet::new();
                for &p in &cur {
                    for &(b, q) in &adj[p] {
                        if b as usize == a {
                            next.insert(q);
                        }
                    }
                }
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = subsets.len();
                        if id >= max_states {
                            return None;
                        }
                        index.insert(next.clone(), id);
                        subsets.push(next);
                        id
                    }
                };
                row.push(id);
            }
            delta.push(row);
            i += 1;
        }
        let finals = subsets
            .iter()
            .map(|s| s.iter().any(|&p| self.finals[p]))
            .collect();
        Some(Dfa { n: subsets.len(), k: self.k, initial: 0, finals, delta })
    }

    /// Acceptor of `{ bar(w) : w in L }` for the involutive antimorphism:
    /// reverse all arcs, relabel by complement, swap initials and finals.
    pub fn reverse_complement(&self, alphabet: &Alphabet) -> Nfa {
        let arcs = self
            .arcs
            .iter()
            .map(|&(p, a, q)| (q, alphabet.bar(a), p))
            .collect();
        let mut initials = Vec::new();
        for p in 0..self.n {
            if self.finals[p] {
                initials.push(p);
            }
        }
        let mut finals = vec![false; self.n];
        for &i in &self.initials {
            finals[i] = true;
        }
        Nfa::new(self.n, self.k, initials, finals, arcs)
    }

    /// Product automaton accepting the intersection with a DFA's language.
    pub fn intersect_dfa(&self, d: &Dfa) -> Nfa {
        assert_eq!(self.k, d.k);
        let idx = |p: usize, s: usize| p * d.n + s;
        let mut arcs = Vec::new();
        for &(p, a, q) in &self.arcs {
            for s in 0..d.n {
                arcs.push((idx(p, s), a, idx(q, d.delta[s][a as usize])));
            }
        }
        let initials = self.initials.iter().map(|&p| idx(p, d.initial)).collect();
        let mut finals = vec![false; self.n * d.n];
        for p in 0..self.n {
            if !self.finals[p] {
                continue;
            }
            for s in 0..d.n {
                if d.finals[s] {
                    finals[idx(p, s)] = true;
                }
            }
        }
        Nfa::new(self.n * d.n, self.k, initials, finals, arcs)
    }

    /// True iff the accepted language is finite: the trimmed automaton has no
    /// nontrivial strongly connected component.
    pub fn is_finite_language(&self) -> bool {
        let (t, _) = self.trim();
        let scc = crate::scc::tarjan(t.n, &t.adjacency_targets());
        !scc.nontrivial.iter().any(|&b| b)
    }

    /// Plain successor lists (letters dropped), for SCC computations. Multi
    /// arcs between the same states collapse; self-loops are kept.
    pub fn adjacency_targets(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(p, _, q) in &self.arcs {
            adj[p].push(q);
        }
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
        }
        adj
    }

    /// All accepted words of length at most `max_len`, canonical order,
    /// deduplicated (distinct accepting paths may share a label).
    pub fn enumerate_language(&self, max_len: usize) -> Vec<Word> {
        let mut seen: BTreeSet<Word> = BTreeSet::new();
        let adj = self.adjacency();
        // Subset-walk enumeration keeps one entry per word, not per path.
        let mut layer: Vec<(Word, BTreeSet<usize>)> =
            vec![(Vec::new(), self.initials.iter().copied().collect())];
        for len in 0..=max_len {
            let mut next_layer = Vec::new();
            for (w, set) in &layer {
                if set.iter().any(|&p| self.finals[p]) {
                    seen.insert(w.clone());
                }
                if len == max_len {
                    continue;
                }
                for a in 0..self.k {
                    let mut next = BTreeSet::new();
                    for &p in set {
                        for &(b, q) in &adj[p] {
                            if b as usize == a {
                                next.insert(q);
                            }
                        }
                    }
                    if !next.is_empty() {
                        let mut w2 = w.clone();
                        w2.push(a as Letter);
                        next_layer.push((w2, next));
                    }
                }
            }
            layer = next_layer;
        }
        let mut out: Vec<Word> = seen.into_iter().collect();
        crate::alphabet::canonical_sort(&mut out);
        out
    }

    /// Shortest accepted word, ties broken lexicographically. Walks a
    /// frontier of states whose distance-to-final keeps decreasing, trying
    /// letters in ascending order, so no candidate words are materialized.
    pub fn shortest_lex_word(&self) -> Option<Word> {
        let radj = self.reverse_adjacency();
        const INF: usize = usize::MAX;
        let mut rdist = vec![INF; self.n];
        let mut queue = VecDeque::new();
        for p in 0..self.n {
            if self.finals[p] {
                rdist[p] = 0;
                queue.push_back(p);
            }
        }
        while let Some(q) = queue.pop_front() {
            for &(_, p) in &radj[q] {
                if rdist[p] == INF {
                    rdist[p] = rdist[q] + 1;
                    queue.push_back(p);
                }
            }
        }
        let d = self.initials.iter().map(|&i| rdist[i]).min()?;
        if d == INF {
            return None;
        }
        let adj = self.adjacency();
        let mut frontier: BTreeSet<usize> =
            self.initials.iter().copied().filter(|&i| rdist[i] == d).collect();
        let mut word = Vec::with_capacity(d);
        for step in 0..d {
            let remaining = d - step;
            let mut chosen = None;
            for a in 0..self.k {
                let next: BTreeSet<usize> = frontier
                    .iter()
                    .flat_map(|&p| adj[p].iter())
                    .filter(|&&(b, q)| b as usize == a && rdist[q] == remaining - 1)
                    .map(|&(_, q)| q)
                    .collect();
                if !next.is_empty() {
                    chosen = Some((a as Letter, next));
                    break;
                }
            }
            let (a, next) = chosen.expect("distance-consistent frontier cannot dead-end");
            word.push(a);
            frontier = next;
        }
        Some(word)
    }

    /// Number of accepting paths per word length. Equals the number of
    /// accepted words only when the automaton is unambiguous.
    pub fn count_paths_by_length(&self, max_len: usize) -> Vec<num_bigint::BigUint> {
        use num_bigint::BigUint;
        use num_traits::Zero;
        let adj = self.adjacency();
        let mut vec: Vec<BigUint> = vec![BigUint::zero(); self.n];
        for &i in &self.initials {
            vec[i] += 1u8;
        }
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
                for &(_, q) in &adj[p] {
                    next[q] += &vec[p];
                }
            }
            vec = next;
        }
        counts
    }
}
