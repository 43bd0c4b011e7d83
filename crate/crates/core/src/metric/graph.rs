use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::contract;
use crate::{Error, Result};

use super::GEOMETRIC_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

/// Connected metric graph with exact all-pairs vertex distances.
///
/// Points live on edges as `(edge, offset)` with offset measured from `a`.
#[derive(Debug, Clone)]
pub struct MetricGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    apsp: Vec<f64>,
}

impl PartialEq for MetricGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.edges == other.edges
    }
}

impl MetricGraph {
    pub fn new(vertex_count: usize, edges: Vec<Edge>) -> Result<Self> {
        if vertex_count == 0 || edges.is_empty() {
            return Err(Error::InvalidDescriptor(
                "a metric graph needs at least one vertex and one edge".into(),
            ));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.a >= vertex_count || e.b >= vertex_count {
                return Err(Error::InvalidDescriptor(format!(
                    "edge {i} has an endpoint outside 0..{vertex_count}"
                )));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::InvalidDescriptor(format!(
                    "edge {i} has non-positive length {}",
                    e.length
                )));
            }
        }
        let n = vertex_count;
        let mut d = vec![f64::INFINITY; n * n];
        for v in 0..n {
            d[v * n + v] = 0.0;
        }
        for e in &edges {
            if e.a != e.b {
                let w = d[e.a * n + e.b].min(e.length);
                d[e.a * n + e.b] = w;
                d[e.b * n + e.a] = w;
            }
        }
        for k in 0..n {
            for i in 0..n {
                let dik = d[i * n + k];
                if dik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let cand = dik + d[k * n + j];
                    if cand < d[i * n + j] {
                        d[i * n + j] = cand;
                    }
                }
            }
        }
        if d.iter().any(|x| x.is_infinite()) {
            return Err(Error::InvalidDescriptor(
                "metric graph is not connected".into(),
            ));
        }
        Ok(Self {
            vertex_count,
            edges,
            apsp: d,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_distance(&self, u: usize, v: usize) -> f64 {
        self.apsp[u * self.vertex_count + v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.a == v) as usize + (e.b == v) as usize)
            .sum()
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                length: e.length * lambda,
                ..*e
            })
            .collect();
        Self {
            vertex_count: self.vertex_count,
            edges,
            apsp: self.apsp.iter().map(|d| d * lambda).collect(),
        }
    }

    /// Canonical `(edge, offset)` of vertex `v`: the smallest incident edge id.
    pub fn vertex_point(&self, v: usize) -> Result<(usize, f64)> {
        self.edges
            .iter()
            .enumerate()
            .find(|(_, e)| e.a == v || e.b == v)
            .map(|(i, e)| (i, if e.a == v { 0.0 } else { e.length }))
            .ok_or_else(|| contract(format!("vertex {v} has no incident edge")))
    }

    /// Validates and canonicalizes an edge point. Offsets within the global
    /// tolerance of an endpoint snap to that vertex.
    pub fn canonical(&self, edge: usize, offset: f64) -> Result<(usize, f64)> {
        let e = self
            .edges
            .get(edge)
            .ok_or_else(|| contract(format!("edge id {edge} out of range")))?;
        if !offset.is_finite() || offset < -GEOMETRIC_TOL || offset > e.length + GEOMETRIC_TOL {
            return Err(contract(format!(
                "offset {offset} outside [0, {}] on edge {edge}",
                e.length
            )));
        }
        if offset <= 0.0 {
            self.vertex_point(e.a)
        } else if offset >= e.length {
            self.vertex_point(e.b)
        } else {
            Ok((edge, offset))
        }
    }

    /// Exact distance between two edge points: the best of the four
    /// endpoint routes, plus the direct route when both share an edge.
    pub fn point_distance(&self, p: (usize, f64), q: (usize, f64)) -> f64 {
        let (ep, op) = p;
        let (eq, oq) = q;
        let e = self.edges[ep];
        let f = self.edges[eq];
        let to_p = [(e.a, op), (e.b, e.length - op)];
        let to_q = [(f.a, oq), (f.b, f.length - oq)];
        let mut best = f64::INFINITY;
        for &(u, du) in &to_p {
            for &(v, dv) in &to_q {
                best = best.min(du + self.vertex_distance(u, v) + dv);
            }
        }
        if ep == eq {
            best = best.min((op - oq).abs());
        }
        best
    }

    /// Length of the shortest cycle: for each edge, its length plus the
    /// shortest path between its endpoints avoiding that edge.
    pub fn girth(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (i, e) in self.edges.iter().enumerate() {
            let cycle = if e.a == e.b {
                Some(e.length)
            } else {
                self.path_avoiding(e.a, e.b, i).map(|d| d + e.length)
            };
            if let Some(c) = cycle {
                best = Some(best.map_or(c, |b: f64| b.min(c)));
            }
        }
        best
    }

    fn path_avoiding(&self, src: usize, dst: usize, skip: usize) -> Option<f64> {
        #[derive(PartialEq)]
        struct Item(f64, usize);
        impl Eq for Item {}
        impl PartialOrd for Item {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for Item {
            fn cmp(&self, other: &Self) -> Ordering {
                other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
            }
        }

        let mut dist = vec![f64::INFINITY; self.vertex_count];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Item(0.0, src));
        while let Some(Item(d, u)) = heap.pop() {
            if u == dst {
                return Some(d);
            }
            if d > dist[u] {
                continue;
            }
            for (i, e) in self.edges.iter().enumerate() {
                if i == skip || e.a == e.b {
                    continue;
                }
                let v = if e.a == u {
                    e.b
                } else if e.b == u {
                    e.a
                } else {
                    continue;
                };
                let nd = d + e.length;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Item(nd, v));
                }
            }
        }
        None
    }
}
