use crate::matrix::{IncidenceMatrix, IndexSubset};

use super::PfError;

/// True iff the digraph with an edge `i -> j` whenever `M(i,j) > 0` is
/// strongly connected. A 1x1 matrix is irreducible whatever its entry.
pub fn is_irreducible(m: &IncidenceMatrix) -> bool {
    let adj = m.adjacency();
    let mut reverse = vec![Vec::new(); m.dim()];
    for (i, succ) in adj.iter().enumerate() {
        for &j in succ {
            reverse[j].push(i);
        }
    }
    reaches_all(&adj) && reaches_all(&reverse)
}

fn reaches_all(adj: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Strongly connected components, each sorted, listed by smallest member.
pub fn scc_decompose(m: &IncidenceMatrix) -> Vec<IndexSubset> {
    let mut comps = tarjan(&m.adjacency());
    for c in &mut comps {
        c.sort_unstable();
    }
    comps.sort_unstable_by_key(|c| c[0]);
    comps
        .into_iter()
        .map(|c| IndexSubset::new(c, m.dim()).expect("component indices are valid"))
        .collect()
}

// Iterative Tarjan: explicit call stack of (vertex, next successor position).
fn tarjan(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call = vec![(root, 0usize)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = adj[v].get(*pos) {
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comps.push(comp);
            }
        }
    }
    comps
}

/// Smallest `q >= 1` with `(M^q)(j, 0) > 0`, i.e. the length of the shortest
/// walk from `j` to the first vertex. The search stops after `n` steps.
pub fn first_reach(m: &IncidenceMatrix, j: usize) -> Result<u32, PfError> {
    let n = m.dim();
    if j >= n {
        return Err(PfError::IndexOutOfRange { index: j, dim: n });
    }
    let adj = m.adjacency();
    // frontier = vertices reachable from j by walks of exactly q steps
    let mut frontier = vec![false; n];
    frontier[j] = true;
    for q in 1..=n {
        let mut next = vec![false; n];
        for (v, &live) in frontier.iter().enumerate() {
            if live {
                for &w in &adj[v] {
                    next[w] = true;
                }
            }
        }
        if next[0] {
            return Ok(q as u32);
        }
        frontier = next;
    }
    Err(PfError::NotIrreducible)
}
