//! Vantage-point tree for distance-band queries over a sample.

/// Tree over sample indices `0..n`. Each node stores its vantage point and,
/// for both children, the exact range of distances from the vantage point.
#[derive(Debug, Clone)]
pub struct VpTree {
    nodes: Vec<Node>,
    root: Option<usize>,
}

#[derive(Debug, Clone)]
struct Node {
    point: usize,
    inside: Option<Child>,
    outside: Option<Child>,
}

#[derive(Debug, Clone, Copy)]
struct Child {
    node: usize,
    lo: f64,
    hi: f64,
}

impl VpTree {
    pub fn build<D>(n: usize, dist: D) -> Self
    where
        D: Fn(usize, usize) -> f64,
    {
        let mut tree = VpTree {
            nodes: Vec::with_capacity(n),
            root: None,
        };
        let mut items: Vec<usize> = (0..n).collect();
        tree.root = tree.build_rec(&mut items, &dist);
        tree
    }

    fn build_rec<D>(&mut self, items: &mut [usize], dist: &D) -> Option<usize>
    where
        D: Fn(usize, usize) -> f64,
    {
        let (vp, rest) = items.split_first_mut()?;
        let vp = *vp;
        let id = self.nodes.len();
        self.nodes.push(Node {
            point: vp,
            inside: None,
            outside: None,
        });
        if rest.is_empty() {
            return Some(id);
        }
        let mut keyed: Vec<(f64, usize)> = rest.iter().map(|&i| (dist(vp, i), i)).collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mid = keyed.len() / 2;
        let (inner, outer) = keyed.split_at(mid);
        let range = |part: &[(f64, usize)]| (part[0].0, part[part.len() - 1].0);
        for (slot, &(_, k)) in rest.iter_mut().zip(&keyed) {
            *slot = k;
        }
        let (left, right) = rest.split_at_mut(mid);
        if !inner.is_empty() {
            let (lo, hi) = range(inner);
            let node = self.build_rec(left, dist).expect("nonempty");
            self.nodes[id].inside = Some(Child { node, lo, hi });
        }
        if !outer.is_empty() {
            let (lo, hi) = range(outer);
            let node = self.build_rec(right, dist).expect("nonempty");
            self.nodes[id].outside = Some(Child { node, lo, hi });
        }
        Some(id)
    }

    /// Appends to `out` every index `i` with `lo ≤ query_dist(i) ≤ hi`,
    /// then sorts `out` ascending.
    pub fn band<Q>(&self, query_dist: Q, lo: f64, hi: f64, out: &mut Vec<usize>)
    where
        Q: Fn(usize) -> f64,
    {
        let start = out.len();
        let mut stack: Vec<usize> = self.root.into_iter().collect();
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            let dq = query_dist(node.point);
            if dq >= lo && dq <= hi {
                out.push(node.point);
            }
            for child in [node.inside, node.outside].into_iter().flatten() {
                let reach_lo = (child.lo - dq).max(dq - child.hi).max(0.0);
                let reach_hi = dq + child.hi;
                // Small slack keeps the pruning safe under rounding.
                if reach_hi + 1e-12 >= lo && reach_lo - 1e-12 <= hi {
                    stack.push(child.node);
                }
            }
        }
        out[start..].sort_unstable();
    }
}
