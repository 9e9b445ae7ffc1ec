//! Strongly connected components (iterative Tarjan).

#[derive(Debug, Clone)]
pub struct SccResult {
    /// Component id of each node. Ids are in reverse topological order:
    /// component 0 has no outgoing arcs to other components.
    pub comp_of: Vec<usize>,
    /// Members of each component, ascending node order.
    pub comps: Vec<Vec<usize>>,
    /// Whether the component contains an internal arc (cycle through it).
    pub nontrivial: Vec<bool>,
}

pub fn tarjan(n: usize, adj: &[Vec<usize>]) -> SccResult {
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comp_of = vec![UNSET; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut next_index = 0usize;

    // Explicit DFS frames: (node, next child position).
    let mut frames: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut ci)) = frames.last_mut() {
            if *ci < adj[v].len() {
                let w = adj[v][*ci];
                *ci += 1;
                if index[w] == UNSET {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&mut (parent, _)) = frames.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let id = comps.len();
                    let mut members = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp_of[w] = id;
                        members.push(w);
                        if w == v {
                            break;
                        }
                    }
                    members.sort_unstable();
                    comps.push(members);
                }
            }
        }
    }

    let mut nontrivial = vec![false; comps.len()];
    for v in 0..n {
        for &w in &adj[v] {
            if comp_of[v] == comp_of[w] {
                nontrivial[comp_of[v]] = true;
            }
        }
    }
    SccResult { comp_of, comps, nontrivial }
}
