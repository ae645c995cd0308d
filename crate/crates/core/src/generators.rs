//! Deterministic test graphs and seeded geometric graphs.
//!
//! The geometric generator is the desk-scale stand-in for road networks: points
//! uniform in the unit square (optionally with periodic boundaries), unit-weight
//! edges between points closer than `radius`, and components joined by their
//! closest vertex pairs until the graph is connected.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::{Error, Result};

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i, 1.0))).expect("valid path")
}

pub fn cycle(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).expect("valid cycle")
}

pub fn complete(n: usize) -> Graph {
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0)));
    Graph::from_edges(n, edges).expect("valid complete graph")
}

/// Star with vertex 0 as hub and `n - 1` leaves.
pub fn star(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|i| (0, i, 1.0))).expect("valid star")
}

/// `rows x cols` lattice, row-major vertex numbering.
pub fn grid(rows: usize, cols: usize) -> Graph {
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1, 1.0));
            }
            if r + 1 < rows {
                edges.push((v, v + cols, 1.0));
            }
        }
    }
    Graph::from_edges(rows * cols, edges).expect("valid grid")
}

/// Connected random geometric graph, see the module docs.
pub fn random_geometric(n: usize, radius: f64, periodic: bool, seed: u64) -> Result<Graph> {
    if n < 2 || !(radius > 0.0) {
        return Err(Error::InvalidParameters(
            "geometric graph needs n >= 2 and radius > 0".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
        .collect();
    let dist = |a: usize, b: usize| {
        let mut s = 0.0;
        for k in 0..2 {
            let mut d = (points[a][k] - points[b][k]).abs();
            if periodic {
                d = d.min(1.0 - d);
            }
            s += d * d;
        }
        s.sqrt()
    };

    let mut edges = Vec::new();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if dist(i, j) < radius {
                edges.push((i, j, 1.0));
                uf.union(i, j);
            }
        }
    }
    // Bridge: repeatedly join the component of vertex 0 to its nearest outside vertex.
    loop {
        let root = uf.find(0);
        let inside: Vec<usize> = (0..n).filter(|&v| uf.find(v) == root).collect();
        if inside.len() == n {
            break;
        }
        let mut best = (f64::INFINITY, 0, 0);
        for &a in &inside {
            for b in 0..n {
                if uf.find(b) != root {
                    let d = dist(a, b);
                    if d < best.0 {
                        best = (d, a, b);
                    }
                }
            }
        }
        let (_, a, b) = best;
        edges.push((a.min(b), a.max(b), 1.0));
        uf.union(a, b);
    }
    Graph::from_edges(n, edges)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Unit-weight degree sequence helper used in tests.
pub fn degree_histogram(g: &Graph) -> Vec<usize> {
    let deg = g.degrees();
    let max = deg.iter().fold(0.0f64, |a, &b| a.max(b)) as usize;
    let mut hist = vec![0; max + 1];
    for d in deg {
        hist[d as usize] += 1;
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_is_connected_and_seeded() {
        let a = random_geometric(300, 0.055, true, 9).unwrap();
        let b = random_geometric(300, 0.055, true, 9).unwrap();
        assert!(a.is_connected());
        assert_eq!(a, b);
        assert_ne!(a, random_geometric(300, 0.055, true, 10).unwrap());
    }

    #[test]
    fn small_graphs() {
        assert_eq!(grid(2, 3).edges().len(), 7);
        assert_eq!(cycle(5).degrees(), [2.0; 5]);
        assert_eq!(degree_histogram(&star(4)), [0, 3, 0, 1]);
    }
}
