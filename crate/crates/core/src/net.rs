//! Weighted directed networks: construction, regular generation,
//! degree-perturbing rewiring and exposure sums.
//!
//! `W[i][j] > 0` means node `i` names node `j`. Edges are kept sorted by
//! `(src, dst)` so structurally equal networks compare equal.

use std::collections::HashSet;
use std::io::{Read, Write};

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub src: usize,
    pub dst: usize,
    pub weight: T,
}

impl<T> Edge<T> {
    pub fn new(src: usize, dst: usize, weight: T) -> Self {
        Self { src, dst, weight }
    }
}

/// Which side of a tie an exposure sum runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `Σ_j W_ij y_j`: exposure to the alters the ego names.
    Forward,
    /// `Σ_j W_ji y_j`: exposure to the alters who name the ego.
    Reverse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectedNetwork<T> {
    n: usize,
    edges: Vec<Edge<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequences {
    pub indegree: Vec<usize>,
    pub outdegree: Vec<usize>,
}

/// Result of a rewiring pass. `failed` counts chosen edges left in place
/// because no legal new endpoint existed.
#[derive(Debug, Clone, PartialEq)]
pub struct Rewired<T> {
    pub network: DirectedNetwork<T>,
    pub failed: usize,
}

impl<T: Real> DirectedNetwork<T> {
    /// Validating constructor: no self-loops, no duplicates, positive finite
    /// weights, indices in range.
    pub fn new(n: usize, mut edges: Vec<Edge<T>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidNetwork("node count must be at least 1".into()));
        }
        for e in &edges {
            if e.src >= n || e.dst >= n {
                return Err(Error::InvalidNetwork(format!(
                    "edge {}->{} out of range for n = {n}",
                    e.src, e.dst
                )));
            }
            if e.src == e.dst {
                return Err(Error::InvalidNetwork(format!("self-loop at node {}", e.src)));
            }
            if !(e.weight > T::zero()) || !e.weight.is_finite() {
                return Err(Error::InvalidNetwork(format!(
                    "edge {}->{} has non-positive weight {}",
                    e.src, e.dst, e.weight
                )));
            }
        }
        edges.sort_by_key(|e| (e.src, e.dst));
        if let Some(w) = edges.windows(2).find(|w| (w[0].src, w[0].dst) == (w[1].src, w[1].dst)) {
            return Err(Error::InvalidNetwork(format!(
                "duplicate edge {}->{}",
                w[0].src, w[0].dst
            )));
        }
        Ok(Self { n, edges })
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, pairs.iter().map(|&(s, d)| Edge::new(s, d, T::one())).collect())
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    /// Edges leaving `src`, sorted by receiver.
    pub fn out_edges(&self, src: usize) -> &[Edge<T>] {
        let lo = self.edges.partition_point(|e| e.src < src);
        let hi = self.edges.partition_point(|e| e.src <= src);
        &self.edges[lo..hi]
    }

    /// Undirected view: for each node, `(j, W_ij + W_ji)` over all `j` tied
    /// to it in either direction.
    pub fn undirected_neighbors(&self) -> Vec<Vec<(usize, T)>> {
        let mut adj: Vec<Vec<(usize, T)>> = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.src].push((e.dst, e.weight));
            adj[e.dst].push((e.src, e.weight));
        }
        for list in &mut adj {
            list.sort_by_key(|&(j, _)| j);
            list.dedup_by(|b, a| {
                if a.0 == b.0 {
                    a.1 += b.1;
                    true
                } else {
                    false
                }
            });
        }
        adj
    }

    pub fn weight(&self, src: usize, dst: usize) -> T {
        self.edges
            .binary_search_by_key(&(src, dst), |e| (e.src, e.dst))
            .map_or(T::zero(), |k| self.edges[k].weight)
    }

    pub fn indegrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        self.edges.iter().for_each(|e| d[e.dst] += 1);
        d
    }

    pub fn outdegrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        self.edges.iter().for_each(|e| d[e.src] += 1);
        d
    }

    pub fn degree_sequences(&self) -> DegreeSequences {
        DegreeSequences { indegree: self.indegrees(), outdegree: self.outdegrees() }
    }

    pub fn transpose(&self) -> Self {
        let mut edges: Vec<Edge<T>> =
            self.edges.iter().map(|e| Edge::new(e.dst, e.src, e.weight)).collect();
        edges.sort_by_key(|e| (e.src, e.dst));
        Self { n: self.n, edges }
    }

    /// True when every tie is reciprocated with the same weight.
    pub fn is_symmetric(&self) -> bool {
        self.edges.iter().all(|e| self.weight(e.dst, e.src) == e.weight)
    }

    /// Union of the network and its transpose; unreciprocated ties become
    /// mutual, mutual ties keep the larger weight.
    pub fn symmetrize(&self) -> Self {
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for e in &self.edges {
            let back = self.weight(e.dst, e.src);
            edges.push(Edge::new(e.src, e.dst, e.weight.max(back)));
            if back == T::zero() {
                edges.push(Edge::new(e.dst, e.src, e.weight));
            }
        }
        edges.sort_by_key(|e| (e.src, e.dst));
        Self { n: self.n, edges }
    }

    /// Scale each node's outgoing weights to sum to one. Isolated senders
    /// are left alone.
    pub fn row_normalize(&self) -> Self {
        let mut sums = vec![T::zero(); self.n];
        self.edges.iter().for_each(|e| sums[e.src] += e.weight);
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(e.src, e.dst, e.weight / sums[e.src]))
            .collect();
        Self { n: self.n, edges }
    }

    pub fn row_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.n];
        self.edges.iter().for_each(|e| sums[e.src] += e.weight);
        sums
    }

    /// Network exposure of every node to outcome `y`.
    pub fn exposure(&self, y: &[T], direction: Direction) -> Result<Vec<T>> {
        if y.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: y.len() });
        }
        let mut out = vec![T::zero(); self.n];
        match direction {
            Direction::Forward => {
                self.edges.iter().for_each(|e| out[e.src] += e.weight * y[e.dst]);
            }
            Direction::Reverse => {
                self.edges.iter().for_each(|e| out[e.dst] += e.weight * y[e.src]);
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.n, self.n);
        for e in &self.edges {
            m[(e.src, e.dst)] = e.weight;
        }
        m
    }

    /// Strongly connected components, each sorted by node index.
    pub fn strong_components(&self) -> Vec<Vec<usize>> {
        let mut g = petgraph::Graph::<(), ()>::with_capacity(self.n, self.edges.len());
        let ids: Vec<_> = (0..self.n).map(|_| g.add_node(())).collect();
        for e in &self.edges {
            g.add_edge(ids[e.src], ids[e.dst], ());
        }
        petgraph::algo::tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|v| v.index()).collect();
                c.sort_unstable();
                c
            })
            .collect()
    }

    /// Dense `W` restricted to `nodes` (rows and columns in the given order).
    pub fn dense_block(&self, nodes: &[usize]) -> Matrix<T> {
        let mut pos = vec![usize::MAX; self.n];
        for (k, &v) in nodes.iter().enumerate() {
            pos[v] = k;
        }
        let mut m = Matrix::zeros(nodes.len(), nodes.len());
        for &v in nodes {
            for e in self.out_edges(v) {
                if pos[e.dst] != usize::MAX {
                    m[(pos[v], pos[e.dst])] = e.weight;
                }
            }
        }
        m
    }

    /// `a·W + b·Wᵀ` as a dense matrix.
    pub fn dense_combination(&self, a: T, b: T) -> Matrix<T> {
        let mut m = Matrix::zeros(self.n, self.n);
        for e in &self.edges {
            m[(e.src, e.dst)] += a * e.weight;
            m[(e.dst, e.src)] += b * e.weight;
        }
        m
    }

    /// Write the `src,dst,weight` edge list.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["src", "dst", "weight"])?;
        for e in &self.edges {
            wtr.write_record([e.src.to_string(), e.dst.to_string(), e.weight.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Read a `src,dst,weight` edge list. Without an explicit node count the
    /// largest index plus one is used.
    pub fn read_csv<R: Read>(r: R, n: Option<usize>) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        let expected = ["src", "dst", "weight"];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h.trim() != e) {
            return Err(Error::Parse(format!(
                "edge list header must be `src,dst,weight`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut edges = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |k: usize| rec.get(k).unwrap_or("").trim();
            let bad = |what: &str| Error::Parse(format!("row {}: bad {what}", line + 2));
            let src: usize = field(0).parse().map_err(|_| bad("src"))?;
            let dst: usize = field(1).parse().map_err(|_| bad("dst"))?;
            let w: f64 = field(2).parse().map_err(|_| bad("weight"))?;
            edges.push(Edge::new(src, dst, T::lit(w)));
        }
        let inferred = edges.iter().map(|e| e.src.max(e.dst) + 1).max().unwrap_or(1);
        let n = n.unwrap_or(inferred);
        Self::new(n, edges)
    }

    /// Receiver rewiring: `k` distinct edges chosen uniformly each get a new
    /// receiver drawn uniformly from the legal targets. Outdegrees are kept.
    pub fn rewire_receivers<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<Rewired<T>> {
        let m = self.edges.len();
        if k > m {
            return Err(Error::InvalidParameter(format!(
                "cannot rewire {k} edges of a network with {m}"
            )));
        }
        let mut edges = self.edges.clone();
        let mut present: HashSet<(usize, usize)> = edges.iter().map(|e| (e.src, e.dst)).collect();
        let mut failed = 0;
        let mut candidates = Vec::with_capacity(self.n);
        for idx in index::sample(rng, m, k) {
            let Edge { src, dst, .. } = edges[idx];
            candidates.clear();
            candidates.extend((0..self.n).filter(|&t| t != src && !present.contains(&(src, t))));
            let Some(&new_dst) = candidates.get(rng.random_range(0..candidates.len().max(1)))
            else {
                failed += 1;
                continue;
            };
            present.remove(&(src, dst));
            present.insert((src, new_dst));
            edges[idx].dst = new_dst;
        }
        edges.sort_by_key(|e| (e.src, e.dst));
        Ok(Rewired { network: Self { n: self.n, edges }, failed })
    }

    /// Sender rewiring, the mirror image of [`Self::rewire_receivers`].
    /// Indegrees are kept.
    pub fn rewire_senders<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<Rewired<T>> {
        let r = self.transpose().rewire_receivers(k, rng)?;
        Ok(Rewired { network: r.network.transpose(), failed: r.failed })
    }
}

/// Random directed network in which every node has indegree and outdegree
/// exactly `d`, with unit weights.
///
/// Built as a union of `d` fixed-point-free permutations that avoid each
/// other's edges. Each layer is repaired by random swaps; if that keeps
/// failing (dense cases such as `d = n − 1`) a relabelled circulant is used.
pub fn make_regular_network<T: Real, R: Rng + ?Sized>(
    n: usize,
    d: usize,
    rng: &mut R,
) -> Result<DirectedNetwork<T>> {
    if d < 1 || d >= n {
        return Err(Error::InvalidParameter(format!(
            "regular outdegree must satisfy 1 <= d < n, got d = {d}, n = {n}"
        )));
    }
    const ATTEMPTS: usize = 64;
    'attempt: for _ in 0..ATTEMPTS {
        let mut present: HashSet<(usize, usize)> = HashSet::with_capacity(n * d);
        for _layer in 0..d {
            match permutation_layer(n, &present, rng) {
                Some(perm) => present.extend(perm.into_iter().enumerate()),
                None => continue 'attempt,
            }
        }
        let edges = present.into_iter().map(|(s, t)| Edge::new(s, t, T::one())).collect();
        return DirectedNetwork::new(n, edges);
    }
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let edges = (0..n)
        .flat_map(|i| (1..=d).map(move |k| (i, (i + k) % n)))
        .map(|(s, t)| Edge::new(labels[s], labels[t], T::one()))
        .collect();
    DirectedNetwork::new(n, edges)
}

fn permutation_layer<R: Rng + ?Sized>(
    n: usize,
    present: &HashSet<(usize, usize)>,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let ok = |i: usize, t: usize| i != t && !present.contains(&(i, t));
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    for _round in 0..4 * n + 16 {
        let Some(i) = (0..n).find(|&i| !ok(i, perm[i])) else {
            return Some(perm);
        };
        let j = rng.random_range(0..n);
        if ok(i, perm[j]) && ok(j, perm[i]) {
            perm.swap(i, j);
        }
    }
    (0..n).all(|i| ok(i, perm[i])).then_some(perm)
}
