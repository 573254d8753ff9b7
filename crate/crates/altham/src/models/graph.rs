use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::{Error, Result};

/// Simple undirected graph with a degree bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    degree_bound: usize,
}

impl Graph {
    /// Edges are stored as `(min, max)` in the given order.
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>, degree_bound: usize) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut deg = vec![0usize; n_vertices];
        let mut norm = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(Error::Graph(format!("self-loop at {u}")));
            }
            if u >= n_vertices || v >= n_vertices {
                return Err(Error::Graph(format!("edge ({u}, {v}) outside {n_vertices} vertices")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::Graph(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
            deg[u] += 1;
            deg[v] += 1;
            norm.push(e);
        }
        if let Some(v) = deg.iter().position(|&d| d > degree_bound) {
            return Err(Error::Graph(format!("vertex {v} has degree {} > {degree_bound}", deg[v])));
        }
        Ok(Self { n_vertices, edges: norm, degree_bound })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n_vertices];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    /// Largest cut by enumeration (vertex 0 fixed to one side).
    pub fn max_cut(&self) -> usize {
        let n = self.n_vertices;
        assert!(n <= 30, "exhaustive max-cut is limited to 30 vertices");
        if n == 0 {
            return 0;
        }
        (0u64..1 << (n - 1))
            .map(|s| self.edges.iter().filter(|&&(u, v)| ((s >> u) ^ (s >> v)) & 1 == 1).count())
            .max()
            .unwrap_or(0)
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        for (u, v) in &self.edges {
            writeln!(f, "{u} {v}")?;
        }
        f.flush()?;
        Ok(())
    }

    /// Reads `u v` pairs; blank lines and `#` comments are skipped.
    pub fn read_edge_list(path: &Path, n_vertices: Option<usize>, degree_bound: Option<usize>) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut edges = Vec::new();
        for (k, line) in f.lines().enumerate() {
            let line = line?;
            let t = line.split('#').next().unwrap_or("").trim();
            if t.is_empty() {
                continue;
            }
            let parse = |s: Option<&str>| -> Result<usize> {
                s.and_then(|x| x.parse().ok())
                    .ok_or(Error::Parse { line: k + 1, msg: format!("expected `u v`, got `{t}`") })
            };
            let mut it = t.split_whitespace();
            let (u, v) = (parse(it.next())?, parse(it.next())?);
            if it.next().is_some() {
                return Err(Error::Parse { line: k + 1, msg: "trailing fields".into() });
            }
            edges.push((u, v));
        }
        let n = n_vertices.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
        Self::new(n, edges, degree_bound.unwrap_or(usize::MAX))
    }
}

/// Random `degree`-regular graph from the pairing model with rejection.
pub fn random_regular_graph<R: Rng + ?Sized>(n: usize, degree: usize, rng: &mut R) -> Result<Graph> {
    if (n * degree) % 2 != 0 {
        return Err(Error::Graph(format!("n·degree = {} is odd", n * degree)));
    }
    if degree >= n {
        return Err(Error::Graph(format!("degree {degree} must be below n = {n}")));
    }
    const TRIES: usize = 10_000;
    // Stub pairing where each stub picks a uniformly random compatible partner; dead ends restart.
    'outer: for _ in 0..TRIES {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
        stubs.shuffle(rng);
        let mut seen = BTreeSet::new();
        let mut edges = Vec::with_capacity(stubs.len() / 2);
        while let Some(u) = stubs.pop() {
            let ok: Vec<usize> =
                (0..stubs.len()).filter(|&k| stubs[k] != u && !seen.contains(&(u.min(stubs[k]), u.max(stubs[k])))).collect();
            if ok.is_empty() {
                continue 'outer;
            }
            let v = stubs.swap_remove(ok[rng.random_range(0..ok.len())]);
            seen.insert((u.min(v), u.max(v)));
            edges.push((u.min(v), u.max(v)));
        }
        return Graph::new(n, edges, degree);
    }
    Err(Error::Graph(format!("no simple {degree}-regular graph on {n} vertices after {TRIES} tries")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn tiny_and_full_sized_graphs() {
        let g = random_regular_graph(2, 1, &mut stream(0, 0)).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        let g = random_regular_graph(12, 4, &mut stream(1, 0)).unwrap();
        assert_eq!(g.edges().len(), 24);
        assert!(g.degrees().iter().all(|&d| d == 4));
        let g = random_regular_graph(10, 6, &mut stream(2, 0)).unwrap();
        assert_eq!(g.edges().len(), 30);
        assert!(random_regular_graph(5, 3, &mut stream(0, 0)).is_err());
    }

    #[test]
    fn four_cycle_cut() {
        let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)], 2).unwrap();
        assert_eq!(g.max_cut(), 4);
    }

    #[test]
    fn invalid_graphs() {
        assert!(Graph::new(3, vec![(0, 0)], 2).is_err());
        assert!(Graph::new(3, vec![(0, 1), (1, 0)], 2).is_err());
        assert!(Graph::new(3, vec![(0, 1), (0, 2)], 1).is_err());
    }
}
