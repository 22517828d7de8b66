//! Left-right planarity test (Brandes' formulation of de Fraysseix–Rosenstiehl).
//!
//! Only the decision is computed; no embedding is built. Both DFS passes are
//! iterative so deep graphs do not exhaust the call stack.

type EdgeId = usize;

#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
struct Interval {
    low: Option<EdgeId>,
    high: Option<EdgeId>,
}

impl Interval {
    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Clone, Copy, Debug)]
struct ConflictPair {
    id: usize,
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

struct State<'a> {
    adj: Vec<Vec<(usize, EdgeId)>>,
    src: Vec<usize>,
    dst: Vec<usize>,
    oriented: Vec<bool>,
    height: Vec<Option<usize>>,
    parent_edge: Vec<Option<EdgeId>>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<usize>,
    ordered: Vec<Vec<EdgeId>>,
    refs: Vec<Option<EdgeId>>,
    lowpt_edge: Vec<EdgeId>,
    stack_bottom: Vec<Option<usize>>,
    stack: Vec<ConflictPair>,
    next_pair: usize,
    _graph: std::marker::PhantomData<&'a ()>,
}

/// Tests an undirected simple graph given as adjacency lists. Parallel edges
/// and self-loops are ignored.
pub fn is_planar(adjacency: &[Vec<usize>]) -> bool {
    let n = adjacency.len();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (u, ns) in adjacency.iter().enumerate() {
        for &w in ns {
            let key = (u.min(w), u.max(w));
            if u != w && seen.insert(key) {
                edges.push(key);
            }
        }
    }
    if n >= 3 && edges.len() > 3 * n - 6 {
        return false;
    }
    let m = edges.len();
    let mut adj = vec![Vec::new(); n];
    for (id, &(u, w)) in edges.iter().enumerate() {
        adj[u].push((w, id));
        adj[w].push((u, id));
    }
    let mut st = State {
        adj,
        src: vec![0; m],
        dst: vec![0; m],
        oriented: vec![false; m],
        height: vec![None; n],
        parent_edge: vec![None; n],
        lowpt: vec![0; m],
        lowpt2: vec![0; m],
        nesting_depth: vec![0; m],
        ordered: vec![Vec::new(); n],
        refs: vec![None; m],
        lowpt_edge: vec![0; m],
        stack_bottom: vec![None; m],
        stack: Vec::new(),
        next_pair: 0,
        _graph: std::marker::PhantomData,
    };
    let mut roots = Vec::new();
    for v in 0..n {
        if st.height[v].is_none() {
            st.height[v] = Some(0);
            roots.push(v);
            st.orient(v);
        }
    }
    for v in 0..n {
        let mut out: Vec<EdgeId> = st.adj[v]
            .iter()
            .map(|&(_, e)| e)
            .filter(|&e| st.src[e] == v)
            .collect();
        out.sort_by_key(|&e| st.nesting_depth[e]);
        st.ordered[v] = out;
    }
    roots.into_iter().all(|r| st.test(r))
}

impl State<'_> {
    fn h(&self, v: usize) -> usize {
        self.height[v].expect("visited")
    }

    fn orient(&mut self, root: usize) {
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&(v, i)) = frames.last() {
            if i < self.adj[v].len() {
                frames.last_mut().unwrap().1 += 1;
                let (w, e) = self.adj[v][i];
                if self.oriented[e] {
                    continue;
                }
                self.oriented[e] = true;
                self.src[e] = v;
                self.dst[e] = w;
                let hv = self.h(v);
                self.lowpt[e] = hv;
                self.lowpt2[e] = hv;
                match self.height[w] {
                    None => {
                        self.parent_edge[w] = Some(e);
                        self.height[w] = Some(hv + 1);
                        frames.push((w, 0));
                    }
                    Some(hw) => {
                        self.lowpt[e] = hw;
                        self.finish_orientation(e);
                    }
                }
            } else {
                frames.pop();
                if let Some(e) = self.parent_edge[v] {
                    self.finish_orientation(e);
                }
            }
        }
    }

    fn finish_orientation(&mut self, vw: EdgeId) {
        let v = self.src[vw];
        self.nesting_depth[vw] = 2 * self.lowpt[vw];
        if self.lowpt2[vw] < self.h(v) {
            self.nesting_depth[vw] += 1;
        }
        if let Some(e) = self.parent_edge[v] {
            if self.lowpt[vw] < self.lowpt[e] {
                self.lowpt2[e] = self.lowpt[e].min(self.lowpt2[vw]);
                self.lowpt[e] = self.lowpt[vw];
            } else if self.lowpt[vw] > self.lowpt[e] {
                self.lowpt2[e] = self.lowpt2[e].min(self.lowpt[vw]);
            } else {
                self.lowpt2[e] = self.lowpt2[e].min(self.lowpt2[vw]);
            }
        }
    }

    fn top_id(&self) -> Option<usize> {
        self.stack.last().map(|p| p.id)
    }

    fn fresh_pair(&mut self, left: Interval, right: Interval) -> ConflictPair {
        self.next_pair += 1;
        ConflictPair {
            id: self.next_pair,
            left,
            right,
        }
    }

    fn conflicting(&self, i: &Interval, b: EdgeId) -> bool {
        !i.is_empty() && self.lowpt[i.high.expect("non-empty")] > self.lowpt[b]
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        if p.left.is_empty() {
            return self.lowpt[p.right.low.expect("non-empty pair")];
        }
        if p.right.is_empty() {
            return self.lowpt[p.left.low.expect("non-empty pair")];
        }
        self.lowpt[p.left.low.unwrap()].min(self.lowpt[p.right.low.unwrap()])
    }

    fn test(&mut self, root: usize) -> bool {
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&(v, i)) = frames.last() {
            if i < self.ordered[v].len() {
                let ei = self.ordered[v][i];
                self.stack_bottom[ei] = self.top_id();
                let w = self.dst[ei];
                if self.parent_edge[w] == Some(ei) {
                    frames.push((w, 0));
                    continue;
                }
                self.lowpt_edge[ei] = ei;
                let pair = self.fresh_pair(
                    Interval::default(),
                    Interval {
                        low: Some(ei),
                        high: Some(ei),
                    },
                );
                self.stack.push(pair);
                if !self.integrate(v, i, ei) {
                    return false;
                }
                frames.last_mut().unwrap().1 += 1;
            } else {
                frames.pop();
                if let Some(e) = self.parent_edge[v] {
                    self.remove_back_edges(e);
                    let &(pv, pi) = frames.last().expect("tree edge has a parent frame");
                    if !self.integrate(pv, pi, e) {
                        return false;
                    }
                    frames.last_mut().unwrap().1 += 1;
                }
            }
        }
        true
    }

    /// Integrates the return edges of `ei`, the `i`-th outgoing edge of `v`.
    fn integrate(&mut self, v: usize, i: usize, ei: EdgeId) -> bool {
        if self.lowpt[ei] >= self.h(v) {
            return true;
        }
        let e = self.parent_edge[v].expect("edge with return edges below a non-root");
        if i == 0 {
            self.lowpt_edge[e] = self.lowpt_edge[ei];
            true
        } else {
            self.add_constraints(ei, e)
        }
    }

    fn add_constraints(&mut self, ei: EdgeId, e: EdgeId) -> bool {
        let mut p = ConflictPair {
            id: 0,
            left: Interval::default(),
            right: Interval::default(),
        };
        loop {
            let mut q = self.stack.pop().expect("return edges of ei are on the stack");
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            let qlow = q.right.low.expect("non-empty interval");
            if self.lowpt[qlow] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else {
                    self.refs[p.right.low.unwrap()] = q.right.high;
                }
                p.right.low = q.right.low;
            } else {
                self.refs[qlow] = Some(self.lowpt_edge[e]);
            }
            if self.top_id() == self.stack_bottom[ei] {
                break;
            }
        }
        while let Some(top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().unwrap();
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            if let Some(l) = p.right.low {
                self.refs[l] = q.right.high;
            }
            if q.right.low.is_some() {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else if let Some(l) = p.left.low {
                self.refs[l] = q.left.high;
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            let fresh = self.fresh_pair(p.left, p.right);
            self.stack.push(fresh);
        }
        true
    }

    fn remove_back_edges(&mut self, e: EdgeId) {
        let u = self.src[e];
        let hu = self.h(u);
        while let Some(top) = self.stack.last() {
            if self.lowest(top) == hu {
                self.stack.pop();
            } else {
                break;
            }
        }
        if let Some(mut p) = self.stack.pop() {
            while let Some(h) = p.left.high {
                if self.dst[h] != u {
                    break;
                }
                p.left.high = self.refs[h];
            }
            if p.left.high.is_none() {
                if let Some(l) = p.left.low.take() {
                    self.refs[l] = p.right.low;
                }
            }
            while let Some(h) = p.right.high {
                if self.dst[h] != u {
                    break;
                }
                p.right.high = self.refs[h];
            }
            if p.right.high.is_none() {
                if let Some(l) = p.right.low.take() {
                    self.refs[l] = p.left.low;
                }
            }
            self.stack.push(p);
        }
    }
}
