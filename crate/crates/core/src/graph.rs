//! Strongly connected components of small explicit graphs.

/// Components of `succ`, sinks first (Tarjan order). `comp[v]` is the index
/// of `v`'s component in the returned list.
pub struct Sccs {
    pub comp: Vec<usize>,
    pub members: Vec<Vec<usize>>,
}

impl Sccs {
    pub fn new(succ: &[Vec<usize>]) -> Self {
        let n = succ.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comp = vec![usize::MAX; n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut next = 0;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut k)) = call.last_mut() {
                if *k < succ[v].len() {
                    let w = succ[v][*k];
                    *k += 1;
                    if index[w] == usize::MAX {
                        index[w] = next;
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let id = members.len();
                        let mut group = Vec::new();
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            comp[w] = id;
                            group.push(w);
                            if w == v {
                                break;
                            }
                        }
                        group.sort_unstable();
                        members.push(group);
                    }
                }
            }
        }
        Sccs { comp, members }
    }

    /// Whether component `c` has no edge leaving it.
    pub fn is_bottom(&self, succ: &[Vec<usize>], c: usize) -> bool {
        self.members[c]
            .iter()
            .all(|&v| succ[v].iter().all(|&w| self.comp[w] == c))
    }

    /// Whether `v` lies on a cycle (a nontrivial component or a self loop).
    pub fn on_cycle(&self, succ: &[Vec<usize>], v: usize) -> bool {
        self.members[self.comp[v]].len() > 1 || succ[v].contains(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_components_sinks_first() {
        // 0 -> 1 <-> 2 -> 3 (self loop)
        let succ = vec![vec![1], vec![2], vec![1, 3], vec![3]];
        let sccs = Sccs::new(&succ);
        assert_eq!(sccs.members.len(), 3);
        assert_eq!(sccs.members[0], vec![3]);
        assert_eq!(sccs.members[1], vec![1, 2]);
        assert!(sccs.is_bottom(&succ, 0));
        assert!(!sccs.is_bottom(&succ, 1));
        assert!(sccs.on_cycle(&succ, 3));
        assert!(!sccs.on_cycle(&succ, 0));
    }
}
