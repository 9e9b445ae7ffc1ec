//! Bridges and the prefix automaton.
//!
//! A tuple (p1,p2,q1,q2) is a basic bridge when some word w satisfies
//! p1.w = q1 in dfa1 and p2.bar(w) = q2 in dfa2; it is an a-bridge when such
//! a w exists starting with the letter a. The prefix automaton layers basic
//! bridges over kappa+1 levels so that its accepted words are exactly the
//! minimal gamma-alpha-prefixes of the hairpin completion.

use std::collections::VecDeque;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::dfa::Dfa;
use crate::nfa::Nfa;
use crate::oracle::HairpinInstance;

/// Reachability tables of the two-sided transition system: nodes are pairs
/// (r,s) in Q1 x Q2, and reading a moves r forward by a while s moves
/// backward by bar(a). A path from (p1,q2) to (q1,p2) labeled w certifies
/// p1.w = q1 and p2.bar(w) = q2.
pub struct BridgeTables {
    pub n1: usize,
    pub n2: usize,
    pub k: usize,
    /// Arcs of the transition system over nodes r*n2 + s.
    arcs: Vec<(usize, Letter, usize)>,
    /// reach[u][v]: v reachable from u (reflexive).
    reach: Vec<Vec<bool>>,
    /// a_reach[a][u][v]: v reachable from u via a nonempty path starting with a.
    a_reach: Vec<Vec<Vec<bool>>>,
}

impl BridgeTables {
    fn node(&self, r: usize, s: usize) -> usize {
        r * self.n2 + s
    }

    pub fn basic(&self, p1: usize, p2: usize, q1: usize, q2: usize) -> bool {
        self.reach[self.node(p1, q2)][self.node(q1, p2)]
    }

    pub fn a_bridge(&self, a: Letter, p1: usize, p2: usize, q1: usize, q2: usize) -> bool {
        self.a_reach[a as usize][self.node(p1, q2)][self.node(q1, p2)]
    }

    /// The language B(p1,p2,q1,q2) as an NFA over the transition system,
    /// optionally restricted to words starting with a forced first letter.
    pub fn bridge_language_nfa(
        &self,
        p1: usize,
        p2: usize,
        q1: usize,
        q2: usize,
        first: Option<Letter>,
    ) -> Nfa {
        let base = self.n1 * self.n2;
        let start = self.node(p1, q2);
        let target = self.node(q1, p2);
        match first {
            None => Nfa::new(
                base,
                self.k,
                vec![start],
                (0..base).map(|v| v == target).collect(),
                self.arcs.clone(),
            ),
            Some(a) => {
                // Fresh start state whose only out-arcs are the a-arcs of the
                // original start, so the empty word is never accepted.
                let mut arcs = self.arcs.clone();
                for &(u, b, v) in &self.arcs {
                    if u == start && b == a {
                        arcs.push((base, b, v));
                    }
                }
                Nfa::new(
                    base + 1,
                    self.k,
                    vec![base],
                    (0..=base).map(|v| v == target).collect(),
                    arcs,
                )
            }
        }
    }
}

/// Computes reachability of the two-sided transition system by BFS from
/// every node, plus the per-letter variant used for a-bridge queries.
pub fn compute_bridges(d1: &Dfa, d2: &Dfa, alphabet: &Alphabet) -> BridgeTables {
    let (n1, n2, k) = (d1.n, d2.n, d1.k);
    assert_eq!(d2.k, k);
    let nn = n1 * n2;
    let pre2 = d2.preimages();
    let mut arcs = Vec::new();
    for r in 0..n1 {
        for s in 0..n2 {
            for a in 0..k {
                let abar = alphabet.bar(a as Letter) as usize;
                let r2 = d1.delta[r][a];
                for &s2 in &pre2[abar][s] {
                    arcs.push((r * n2 + s, a as Letter, r2 * n2 + s2));
                }
            }
        }
    }
    let mut adj = vec![Vec::new(); nn];
    for &(u, a, v) in &arcs {
        adj[u].push((a, v));
    }
    let closure = |seeds: &[usize]| -> Vec<bool> {
        let mut seen = vec![false; nn];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &u in seeds {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &(_, v) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    };
    let reach: Vec<Vec<bool>> = (0..nn).map(|u| closure(&[u])).collect();
    let a_reach: Vec<Vec<Vec<bool>>> = (0..k)
        .map(|a| {
            (0..nn)
                .map(|u| {
                    let seeds: Vec<usize> = adj[u]
                        .iter()
                        .filter(|&&(b, _)| b as usize == a)
                        .map(|&(_, v)| v)
                        .collect();
                    closure(&seeds)
                })
                .collect()
        })
        .collect();
    let mut arcs = arcs;
    arcs.sort_unstable();
    arcs.dedup();
    BridgeTables { n1, n2, k, arcs, reach, a_reach }
}

/// A state of the prefix automaton: a basic bridge tagged with a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Bridge {
    pub p1: usize,
    pub p2: usize,
    pub q1: usize,
    pub q2: usize,
    pub level: usize,
}

/// The trimmed prefix automaton. Bridges are kept in canonical order
/// ((p1,p2),q1,q2,level), which is the linear order used to pick loop
/// anchors deterministically.
pub struct BridgeNfa {
    pub kappa: usize,
    /// Alphabet size shared with the input DFAs.
    pub k: usize,
    pub bridges: Vec<Bridge>,
    /// Sorted (source index, letter, target index) triples.
    pub arcs: Vec<(usize, Letter, usize)>,
    pub initials: Vec<usize>,
    pub finals: Vec<usize>,
}

impl BridgeNfa {
    pub fn to_nfa(&self) -> Nfa {
        let mut finals = vec![false; self.bridges.len()];
        for &f in &self.finals {
            finals[f] = true;
        }
        Nfa::new(
            self.bridges.len(),
            self.k,
            self.initials.clone(),
            finals,
            self.arcs.clone(),
        )
    }

    /// One arc per line plus state and endpoint listings, canonical order.
    pub fn render_graph(&self, alphabet: &Alphabet) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "bridges: {}", self.bridges.len()).unwrap();
        for (i, b) in self.bridges.iter().enumerate() {
            writeln!(
                out,
                "state {} = (({},{}),{},{},{})",
                i, b.p1, b.p2, b.q1, b.q2, b.level
            )
            .unwrap();
        }
        let fmt_list = |ix: &[usize]| {
            ix.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
        };
        writeln!(out, "initials: {}", fmt_list(&self.initials)).unwrap();
        writeln!(out, "finals: {}", fmt_list(&self.finals)).unwrap();
        for &(u, a, v) in &self.arcs {
            writeln!(out, "arc {} {} {}", u, alphabet.token(a), v).unwrap();
        }
        out
    }
}

/// Builds the prefix automaton: states are basic bridges (P,q1,q2,level)
/// with P ranging over the product states reachable by reading a common
/// word in both DFAs. Reading a moves P forward by a and the (q1,q2) pair
/// backward by bar(a); the level tracks how many letters of the primer have
/// been committed (0 before the last final visit, then counting up to kappa).
pub fn build_bridge_nfa(inst: &HairpinInstance, tables: &BridgeTables) -> BridgeNfa {
    let (d1, d2) = (&inst.dfa1, &inst.dfa2);
    let (n1, n2, k, kappa) = (d1.n, d2.n, d1.k, inst.kappa);
    let al = &inst.alphabet;

    // Product states reachable from the start pair under the diagonal action.
    let q0 = (d1.initial, d2.initial);
    let mut seen = vec![false; n1 * n2];
    let mut queue = VecDeque::new();
    seen[q0.0 * n2 + q0.1] = true;
    queue.push_back(q0);
    let mut q12: Vec<(usize, usize)> = Vec::new();
    while let Some((r, s)) = queue.pop_front() {
        q12.push((r, s));
        for a in 0..k {
            let t = (d1.delta[r][a], d2.delta[s][a]);
            if !seen[t.0 * n2 + t.1] {
                seen[t.0 * n2 + t.1] = true;
                queue.push_back(t);
            }
        }
    }
    q12.sort_unstable();
    let mut q12_index = vec![usize::MAX; n1 * n2];
    for (i, &(r, s)) in q12.iter().enumerate() {
        q12_index[r * n2 + s] = i;
    }

    // All candidate bridges, canonical order.
    let levels = kappa + 1;
    let cell = |pi: usize, q1: usize, q2: usize, l: usize| ((pi * n1 + q1) * n2 + q2) * levels + l;
    let mut idx_of = vec![usize::MAX; q12.len() * n1 * n2 * levels];
    let mut bridges: Vec<Bridge> = Vec::new();
    for (pi, &(p1, p2)) in q12.iter().enumerate() {
        for q1 in 0..n1 {
            for q2 in 0..n2 {
                if !tables.basic(p1, p2, q1, q2) {
                    continue;
                }
                for level in 0..levels {
                    idx_of[cell(pi, q1, q2, level)] = bridges.len();
                    bridges.push(Bridge { p1, p2, q1, q2, level });
                }
            }
        }
    }

    // Arc enumeration: fix the source product pair P and the target (q1,q2);
    // the source (q1.bar(a), q2.bar(a)) and the level move are derived.
    let mut arcs: Vec<(usize, Letter, usize)> = Vec::new();
    for (pi, &(p1, p2)) in q12.iter().enumerate() {
        for a in 0..k {
            let abar = al.bar(a as Letter) as usize;
            let tp = q12_index[d1.delta[p1][a] * n2 + d2.delta[p2][a]];
            for q1 in 0..n1 {
                for q2 in 0..n2 {
                    let s1 = d1.delta[q1][abar];
                    let s2 = d2.delta[q2][abar];
                    if !tables.basic(p1, p2, s1, s2) {
                        continue;
                    }
                    if idx_of[cell(tp, q1, q2, 0)] == usize::MAX {
                        continue; // target pair is not basic
                    }
                    let switch = d1.finals[s1] || d2.finals[s2];
                    for lsrc in 0..kappa {
                        let ltgt = match lsrc {
                            0 => usize::from(switch),
                            _ => lsrc + 1,
                        };
                        arcs.push((
                            idx_of[cell(pi, s1, s2, lsrc)],
                            a as Letter,
                            idx_of[cell(tp, q1, q2, ltgt)],
                        ));
                    }
                }
            }
        }
    }

    let initials: Vec<usize> = {
        let pi = q12_index[d1.initial * n2 + d2.initial];
        let mut v: Vec<usize> = (0..n1)
            .flat_map(|q1| (0..n2).map(move |q2| (q1, q2)))
            .filter_map(|(q1, q2)| {
                let i = idx_of[cell(pi, q1, q2, 0)];
                (i != usize::MAX).then_some(i)
            })
            .collect();
        v.sort_unstable();
        v
    };
    let finals: Vec<usize> = bridges
        .iter()
        .enumerate()
        .filter(|(_, b)| b.level == kappa)
        .map(|(i, _)| i)
        .collect();

    trim_bridge_nfa(kappa, k, bridges, arcs, initials, finals)
}

fn trim_bridge_nfa(
    kappa: usize,
    k: usize,
    bridges: Vec<Bridge>,
    mut arcs: Vec<(usize, Letter, usize)>,
    initials: Vec<usize>,
    finals: Vec<usize>,
) -> BridgeNfa {
    arcs.sort_unstable();
    arcs.dedup();
    let n = bridges.len();
    let mut adj = vec![Vec::new(); n];
    let mut radj = vec![Vec::new(); n];
    for &(u, _, v) in &arcs {
        adj[u].push(v);
        radj[v].push(u);
    }
    let bfs = |seeds: &[usize], adj: &[Vec<usize>]| -> Vec<bool> {
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = seeds.iter().copied().collect();
        for &u in seeds {
            seen[u] = true;
        }
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    };
    let fwd = bfs(&initials, &adj);
    let bwd = bfs(&finals, &radj);
    let mut map = vec![usize::MAX; n];
    let mut kept: Vec<Bridge> = Vec::new();
    for i in 0..n {
        if fwd[i] && bwd[i] {
            map[i] = kept.len();
            kept.push(bridges[i]);
        }
    }
    let arcs: Vec<(usize, Letter, usize)> = arcs
        .into_iter()
        .filter(|&(u, _, v)| map[u] != usize::MAX && map[v] != usize::MAX)
        .map(|(u, a, v)| (map[u], a, map[v]))
        .collect();
    let remap = |ix: Vec<usize>| -> Vec<usize> {
        ix.into_iter().filter(|&i| map[i] != usize::MAX).map(|i| map[i]).collect()
    };
    BridgeNfa {
        kappa,
        bridges: kept,
        arcs,
        initials: remap(initials),
        finals: remap(finals),
        k,
    }
}

/// One initial-final pair of the prefix automaton together with its path
/// language and the bridge language of the final's components.
pub struct PairLanguage {
    pub initial: Bridge,
    pub fin: Bridge,
    /// Labels of paths initial -> final inside the prefix automaton.
    pub r_mu: Nfa,
    /// B(d1,d2,e1,e2) for the final bridge ((d1,d2),e1,e2,kappa).
    pub b_mu: Nfa,
}

/// All pairs (I,F) with at least one I->F path. The completion decomposes
/// as the disjoint union over pairs of { v beta bar(v) : v in R, beta in B }.
pub fn extract_pair_languages(a: &BridgeNfa, tables: &BridgeTables) -> Vec<PairLanguage> {
    let base = a.to_nfa();
    let mut out = Vec::new();
    for &i in &a.initials {
        for &f in &a.finals {
            let mut finals = vec![false; base.n];
            finals[f] = true;
            let sub = Nfa::new(base.n, base.k, vec![i], finals, base.arcs.clone());
            let (r_mu, _) = sub.trim();
            if r_mu.n == 0 {
                continue;
            }
            let fb = a.bridges[f];
            let b_mu = tables.bridge_language_nfa(fb.p1, fb.p2, fb.q1, fb.q2, None);
            out.push(PairLanguage { initial: a.bridges[i], fin: fb, r_mu, b_mu });
        }
    }
    out
}

/// True iff none of the sampled words labels two distinct paths between any
/// fixed pair of bridges. Distinct accepting paths of a shared label would
/// make the path language ambiguous.
pub fn unique_path_check(a: &BridgeNfa, sample_words: &[Word]) -> bool {
    let n = a.bridges.len();
    let mut adj = vec![Vec::new(); n];
    for &(u, l, v) in &a.arcs {
        adj[u].push((l, v));
    }
    for w in sample_words {
        for start in 0..n {
            let mut counts = vec![0u64; n];
            counts[start] = 1;
            for &c in w {
                let mut next = vec![0u64; n];
                for u in 0..n {
                    if counts[u] == 0 {
                        continue;
                    }
                    for &(l, v) in &adj[u] {
                        if l == c {
                            next[v] += counts[u];
                        }
                    }
                }
                counts = next;
            }
            if counts.iter().any(|&c| c > 1) {
                return false;
            }
        }
    }
    true
}

/// Exhaustive variant of the path-uniqueness check for all words up to the
/// given length: a synchronized walk over bridge pairs, flagging pairs that
/// have already diverged. An ambiguous word exists iff a diverged pair
/// re-converges.
pub fn unique_paths_upto(a: &BridgeNfa, max_len: usize) -> bool {
    use std::collections::HashSet;
    let n = a.bridges.len();
    let mut adj = vec![Vec::new(); n];
    for &(u, l, v) in &a.arcs {
        adj[u].push((l, v));
    }
    let mut layer: HashSet<(usize, usize, bool)> = (0..n).map(|u| (u, u, false)).collect();
    let mut seen = layer.clone();
    for _ in 0..max_len {
        let mut next = HashSet::new();
        for &(u, v, diverged) in &layer {
            for &(la, ua) in &adj[u] {
                for &(lb, vb) in &adj[v] {
                    if la != lb {
                        continue;
                    }
                    let key = (ua.min(vb), ua.max(vb), diverged || ua != vb);
                    if key.2 && key.0 == key.1 {
                        return false;
                    }
                    if seen.insert(key) {
                        next.insert(key);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    true
}
