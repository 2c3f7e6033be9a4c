//! Strongly connected components (iterative Tarjan).

/// Result of an SCC decomposition.
///
/// Components are numbered in the order Tarjan's algorithm closes them, which is a
/// reverse topological order of the condensation: every edge leaving component `c`
/// goes to a component with a smaller index.
#[derive(Clone, Debug)]
pub struct Components {
    pub component: Vec<usize>,
    pub count: usize,
}

impl Components {
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (v, &c) in self.component.iter().enumerate() {
            if c != UNVISITED {
                out[c].push(v);
            }
        }
        out
    }
}

const UNVISITED: usize = usize::MAX;

/// Computes the SCCs of the graph on `0..n` whose successors are given by `succ`.
///
/// `include` restricts the graph to a subset of vertices; excluded vertices get
/// component `usize::MAX` and edges into them are ignored.
pub fn tarjan<F, I>(n: usize, include: impl Fn(usize) -> bool, succ: F) -> Components
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize>,
{
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut component = vec![UNVISITED; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut count = 0usize;

    let mut call: Vec<(usize, I)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED || !include(root) {
            continue;
        }
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, succ(root)));

        while let Some((v, mut iter)) = call.pop() {
            let mut child = None;
            for w in iter.by_ref() {
                if !include(w) {
                    continue;
                }
                if index[w] == UNVISITED {
                    child = Some(w);
                    break;
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            }
            if let Some(w) = child {
                call.push((v, iter));
                index[w] = next_index;
                low[w] = next_index;
                next_index += 1;
                stack.push(w);
                on_stack[w] = true;
                call.push((w, succ(w)));
                continue;
            }
            if let Some((parent, _)) = call.last() {
                let parent = *parent;
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component[w] = count;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }

    Components { component, count }
}
