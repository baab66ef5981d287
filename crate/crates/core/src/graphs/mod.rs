//! Edge-colored directed graphs, word-graphs, quotients by vertex
//! partitions, and congruence / strong-congruence enumeration.
//!
//! Edges of one color form a subset of `V x V`, so parallel same-color
//! edges between the same ordered pair collapse to a single edge.

mod partition;

pub use partition::{all_partitions, Partition};

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::words::{Order, Signature, Word};

/// Default cap on the vertex count for partition enumeration.
pub const DEFAULT_VERTEX_BOUND: usize = 14;

/// A directed edge with a 1-based color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: u32,
    pub to: u32,
    pub color: usize,
}

impl Edge {
    pub fn new(from: u32, to: u32, color: usize) -> Self {
        Edge { from, to, color }
    }
}

/// A maximal monochrome chain or cycle of an admissible graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSummary {
    pub color: usize,
    /// Edge count.
    pub length: usize,
    pub is_loop: bool,
    /// For a loop: the cyclic vertex sequence starting at its minimum
    /// vertex, no repeats. For a string: all `length + 1` vertices from
    /// source to sink.
    pub vertices: Vec<u32>,
}

/// Finite directed edge-colored graph with ordered opaque vertex labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColoredGraph {
    vertices: Vec<u32>,
    edges: Vec<Edge>,
}

impl ColoredGraph {
    /// Vertex list must be non-empty; edges must join listed vertices
    /// and carry a positive color. Duplicates collapse.
    pub fn new(mut vertices: Vec<u32>, mut edges: Vec<Edge>) -> Result<Self> {
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(Error::invalid("graph needs at least one vertex"));
        }
        for e in &edges {
            if e.color == 0 {
                return Err(Error::invalid("edge colors are 1-based"));
            }
            if vertices.binary_search(&e.from).is_err()
                || vertices.binary_search(&e.to).is_err()
            {
                return Err(Error::invalid(format!(
                    "edge {} -> {} uses an unknown vertex",
                    e.from, e.to
                )));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(ColoredGraph { vertices, edges })
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Largest color present (0 for a trivial graph).
    pub fn max_color(&self) -> usize {
        self.edges.iter().map(|e| e.color).max().unwrap_or(0)
    }

    /// Position of a label in the ordered vertex list.
    pub fn index_of(&self, label: u32) -> Option<usize> {
        self.vertices.binary_search(&label).ok()
    }

    /// The word-graph of a non-empty word: vertices `1..=n`, the k-th
    /// edge has the k-th letter's color and runs `k+1 -> k` for an
    /// unstarred letter, `k -> k+1` for a starred one (indices mod n).
    pub fn word_graph(w: &Word) -> Result<Self> {
        let n = w.len() as u32;
        if n == 0 {
            return Err(Error::EmptyWord);
        }
        let mut edges = Vec::with_capacity(w.len());
        for (k0, letter) in w.letters().iter().enumerate() {
            let k = k0 as u32 + 1;
            let next = if k == n { 1 } else { k + 1 };
            let (from, to) = if letter.starred { (k, next) } else { (next, k) };
            edges.push(Edge::new(from, to, letter.color));
        }
        ColoredGraph::new((1..=n).collect(), edges)
    }

    fn check_partition(&self, p: &Partition) -> Result<()> {
        if p.size() != self.vertices.len() {
            return Err(Error::GroundSetMismatch {
                partition: p.size(),
                expected: self.vertices.len(),
            });
        }
        Ok(())
    }

    /// Quotient by a partition of the vertex set. Quotient vertices are
    /// labeled by the minimum original label of each block.
    pub fn quotient(&self, p: &Partition) -> Result<Self> {
        self.check_partition(p)?;
        let mut representative = vec![u32::MAX; p.num_blocks()];
        for (i, &v) in self.vertices.iter().enumerate() {
            let b = p.block_of(i);
            representative[b] = representative[b].min(v);
        }
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let fi = self.index_of(e.from).unwrap();
                let ti = self.index_of(e.to).unwrap();
                Edge::new(
                    representative[p.block_of(fi)],
                    representative[p.block_of(ti)],
                    e.color,
                )
            })
            .collect();
        ColoredGraph::new(representative, edges)
    }

    /// No two distinct same-color edges share a source or share a
    /// target.
    pub fn is_admissible(&self) -> bool {
        let mut sources = BTreeSet::new();
        let mut targets = BTreeSet::new();
        for e in &self.edges {
            if !sources.insert((e.color, e.from)) || !targets.insert((e.color, e.to)) {
                return false;
            }
        }
        true
    }

    /// Congruence test: for every same-color edge pair, sources are
    /// merged iff targets are merged. Equivalent to the quotient being
    /// admissible.
    pub fn is_congruence(&self, p: &Partition) -> Result<bool> {
        self.check_partition(p)?;
        for (i, e1) in self.edges.iter().enumerate() {
            for e2 in &self.edges[i + 1..] {
                if e1.color != e2.color {
                    continue;
                }
                let a1 = p.block_of(self.index_of(e1.from).unwrap());
                let a2 = p.block_of(self.index_of(e2.from).unwrap());
                let b1 = p.block_of(self.index_of(e1.to).unwrap());
                let b2 = p.block_of(self.index_of(e2.to).unwrap());
                if (a1 == a2) != (b1 == b2) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Decompose every monochrome subgraph into maximal chains and
    /// cycles. Requires admissibility.
    pub fn paths(&self) -> Result<Vec<PathSummary>> {
        if !self.is_admissible() {
            return Err(Error::NotAdmissible);
        }
        let mut out = Vec::new();
        let colors: BTreeSet<usize> = self.edges.iter().map(|e| e.color).collect();
        for color in colors {
            let mut next: std::collections::BTreeMap<u32, u32> = Default::default();
            let mut prev: std::collections::BTreeMap<u32, u32> = Default::default();
            for e in self.edges.iter().filter(|e| e.color == color) {
                next.insert(e.from, e.to);
                prev.insert(e.to, e.from);
            }
            let mut visited: BTreeSet<u32> = BTreeSet::new();
            // strings start at a vertex with an outgoing edge and no incoming one
            for &start in next.keys() {
                if prev.contains_key(&start) {
                    continue;
                }
                let mut vertices = vec![start];
                let mut cur = start;
                while let Some(&n) = next.get(&cur) {
                    visited.insert(cur);
                    vertices.push(n);
                    cur = n;
                }
                visited.insert(cur);
                out.push(PathSummary {
                    color,
                    length: vertices.len() - 1,
                    is_loop: false,
                    vertices,
                });
            }
            // what remains are disjoint cycles
            for &start in next.keys() {
                if visited.contains(&start) {
                    continue;
                }
                let mut cycle = vec![start];
                visited.insert(start);
                let mut cur = next[&start];
                while cur != start {
                    visited.insert(cur);
                    cycle.push(cur);
                    cur = next[&cur];
                }
                // canonical start at the minimum vertex
                let min_pos = cycle
                    .iter()
                    .enumerate()
                    .min_by_key(|&(_, v)| v)
                    .map(|(i, _)| i)
                    .unwrap();
                cycle.rotate_left(min_pos);
                out.push(PathSummary {
                    color,
                    length: cycle.len(),
                    is_loop: true,
                    vertices: cycle,
                });
            }
        }
        out.sort_by(|a, b| (a.color, &a.vertices).cmp(&(b.color, &b.vertices)));
        Ok(out)
    }

    /// Vertices - edges + monochrome loops.
    pub fn loop_characteristic(&self) -> Result<i64> {
        let loops = self.paths()?.iter().filter(|p| p.is_loop).count();
        Ok(self.vertices.len() as i64 - self.edges.len() as i64 + loops as i64)
    }

    /// Admissible, every r-loop has length exactly `d_r` (hence no
    /// r-loops at all when `d_r` is infinite), and every r-string is
    /// strictly shorter than `d_r`.
    pub fn is_strongly_admissible(&self, sig: &Signature) -> Result<bool> {
        if !self.is_admissible() {
            return Ok(false);
        }
        for path in self.paths()? {
            let order = sig.order(path.color)?;
            match (path.is_loop, order) {
                (true, Order::Finite(d)) => {
                    if path.length as u64 != d {
                        return Ok(false);
                    }
                }
                (true, Order::Infinite) => return Ok(false),
                (false, Order::Finite(d)) => {
                    if path.length as u64 >= d {
                        return Ok(false);
                    }
                }
                (false, Order::Infinite) => {}
            }
        }
        Ok(true)
    }

    fn check_bound(&self, bound: usize) -> Result<()> {
        if self.vertices.len() > bound {
            return Err(Error::VertexBoundExceeded {
                vertices: self.vertices.len(),
                bound,
            });
        }
        Ok(())
    }

    /// All congruences, in canonical restricted-growth order. The
    /// search assigns vertices one at a time and prunes a prefix as
    /// soon as some same-color edge pair violates the congruence
    /// condition.
    pub fn congruences(&self, bound: usize) -> Result<Vec<Partition>> {
        self.check_bound(bound)?;
        let n = self.vertices.len();
        // edge endpoints as vertex indices
        let edges: Vec<(usize, usize, usize)> = self
            .edges
            .iter()
            .map(|e| {
                (
                    self.index_of(e.from).unwrap(),
                    self.index_of(e.to).unwrap(),
                    e.color,
                )
            })
            .collect();
        // pairs[i]: same-color edge pairs whose endpoints all lie in 0..=i,
        // with i the largest endpoint; checked exactly once per prefix
        let mut pairs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, &(f1, t1, c1)) in edges.iter().enumerate() {
            for (j, &(f2, t2, c2)) in edges.iter().enumerate().skip(i + 1) {
                if c1 != c2 {
                    continue;
                }
                let max = f1.max(t1).max(f2).max(t2);
                pairs[max].push((i, j));
            }
        }
        let mut out = Vec::new();
        let mut rgs = vec![0usize; n];
        fn dfs(
            pos: usize,
            n: usize,
            rgs: &mut Vec<usize>,
            edges: &[(usize, usize, usize)],
            pairs: &[Vec<(usize, usize)>],
            out: &mut Vec<Partition>,
        ) {
            if pos == n {
                out.push(Partition::from_assignment(rgs).unwrap());
                return;
            }
            let cap = if pos == 0 {
                0
            } else {
                rgs[..pos].iter().copied().max().unwrap() + 1
            };
            'blocks: for b in 0..=cap {
                rgs[pos] = b;
                for &(i, j) in &pairs[pos] {
                    let (f1, t1, _) = edges[i];
                    let (f2, t2, _) = edges[j];
                    if (rgs[f1] == rgs[f2]) != (rgs[t1] == rgs[t2]) {
                        continue 'blocks;
                    }
                }
                dfs(pos + 1, n, rgs, edges, pairs, out);
            }
        }
        dfs(0, n, &mut rgs, &edges, &pairs, &mut out);
        Ok(out)
    }

    /// Congruences whose quotient is strongly admissible.
    pub fn strong_congruences(&self, sig: &Signature, bound: usize) -> Result<Vec<Partition>> {
        let mut out = Vec::new();
        for p in self.congruences(bound)? {
            if self.quotient(&p)?.is_strongly_admissible(sig)? {
                out.push(p);
            }
        }
        Ok(out)
    }

    /// The strong congruence with unit loop-characteristic quotient,
    /// when one exists. At most one exists for a connected graph.
    pub fn chi1_strong_congruence(
        &self,
        sig: &Signature,
        bound: usize,
    ) -> Result<Option<Partition>> {
        if !self.is_connected() {
            return Err(Error::NotConnected);
        }
        for p in self.strong_congruences(sig, bound)? {
            if self.quotient(&p)?.loop_characteristic()? == 1 {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }

    /// Number of strong congruences with unit loop-characteristic
    /// quotient (0 or 1 on connected graphs).
    pub fn chi1_strong_congruence_count(&self, sig: &Signature, bound: usize) -> Result<usize> {
        Ok(self.chi1_strong_congruence(sig, bound)?.is_some() as usize)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut adjacency = vec![Vec::new(); n];
        for e in &self.edges {
            let f = self.index_of(e.from).unwrap();
            let t = self.index_of(e.to).unwrap();
            adjacency[f].push(t);
            adjacency[t].push(f);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Connected components as subgraphs on the original labels.
    pub fn connected_components(&self) -> Vec<ColoredGraph> {
        let n = self.vertices.len();
        let mut adjacency = vec![Vec::new(); n];
        for e in &self.edges {
            let f = self.index_of(e.from).unwrap();
            let t = self.index_of(e.to).unwrap();
            adjacency[f].push(t);
            adjacency[t].push(f);
        }
        let mut component = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if component[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            component[start] = count;
            while let Some(v) = stack.pop() {
                for &w in &adjacency[v] {
                    if component[w] == usize::MAX {
                        component[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (0..count)
            .map(|c| {
                let vertices: Vec<u32> = self
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| component[i] == c)
                    .map(|(_, &v)| v)
                    .collect();
                let edges: Vec<Edge> = self
                    .edges
                    .iter()
                    .filter(|e| component[self.index_of(e.from).unwrap()] == c)
                    .copied()
                    .collect();
                ColoredGraph::new(vertices, edges).unwrap()
            })
            .collect()
    }

    /// Disjoint union of graphs, relabeled consecutively from 1.
    pub fn disjoint_union(parts: &[&ColoredGraph]) -> Result<ColoredGraph> {
        if parts.is_empty() {
            return Err(Error::invalid("disjoint union of no graphs"));
        }
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        let mut offset = 0u32;
        for g in parts {
            let relabel = |v: u32| offset + 1 + g.index_of(v).unwrap() as u32;
            vertices.extend(g.vertices().iter().map(|&v| relabel(v)));
            edges.extend(
                g.edges()
                    .iter()
                    .map(|e| Edge::new(relabel(e.from), relabel(e.to), e.color)),
            );
            offset += g.num_vertices() as u32;
        }
        ColoredGraph::new(vertices, edges)
    }

    /// Same vertex set, edges of one color only.
    pub fn monochrome(&self, color: usize) -> ColoredGraph {
        ColoredGraph {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .filter(|e| e.color == color)
                .copied()
                .collect(),
        }
    }

    /// Remove the edges of one path, keeping all vertices.
    pub fn remove_path(&self, path: &PathSummary) -> ColoredGraph {
        let mut removed: BTreeSet<Edge> = BTreeSet::new();
        let k = path.vertices.len();
        for i in 0..path.length {
            let from = path.vertices[i];
            let to = path.vertices[(i + 1) % k];
            removed.insert(Edge::new(from, to, path.color));
        }
        ColoredGraph {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .filter(|e| !removed.contains(e))
                .copied()
                .collect(),
        }
    }

    /// Subgraph on a vertex subset, keeping edges inside it.
    pub fn induced(&self, keep: &[u32]) -> Result<ColoredGraph> {
        let set: BTreeSet<u32> = keep.iter().copied().collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| set.contains(&e.from) && set.contains(&e.to))
            .copied()
            .collect();
        ColoredGraph::new(keep.to_vec(), edges)
    }

    /// `Γ/ρ ≅ (Γ/π)/(ρ/π)` for `π ≤ ρ`; checked by explicit
    /// construction and a bijection search.
    pub fn second_isomorphism_check(&self, pi: &Partition, rho: &Partition) -> Result<bool> {
        self.check_partition(pi)?;
        if !pi.leq(rho)? {
            return Err(Error::NotARefinement);
        }
        let direct = self.quotient(rho)?;
        let by_pi = self.quotient(pi)?;
        let two_step = by_pi.quotient(&rho.quotient_over(pi)?)?;
        Ok(isomorphic(&direct, &two_step))
    }

    /// Text form: a vertex-list line, then one `from to color` line per
    /// edge.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.from, e.to, e.color);
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let vertex_line = lines.next().ok_or_else(|| Error::parse("graph", text))?;
        let vertices: Vec<u32> = vertex_line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::parse("graph", text)))
            .collect::<Result<_>>()?;
        let mut edges = Vec::new();
        for line in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::parse("graph", text));
            }
            let from = fields[0].parse().map_err(|_| Error::parse("graph", text))?;
            let to = fields[1].parse().map_err(|_| Error::parse("graph", text))?;
            let color = fields[2].parse().map_err(|_| Error::parse("graph", text))?;
            edges.push(Edge::new(from, to, color));
        }
        ColoredGraph::new(vertices, edges)
    }
}

/// Color-degree fingerprint used to prune the isomorphism search.
fn fingerprints(g: &ColoredGraph) -> Vec<Vec<(usize, i8)>> {
    let n = g.num_vertices();
    let mut fp = vec![Vec::new(); n];
    for e in g.edges() {
        fp[g.index_of(e.from).unwrap()].push((e.color, 1i8));
        fp[g.index_of(e.to).unwrap()].push((e.color, -1i8));
    }
    for f in &mut fp {
        f.sort_unstable();
    }
    fp
}

/// Exhaustive backtracking isomorphism test with degree/color pruning.
/// Intended for desk-scale graphs (about ten vertices).
pub(crate) fn isomorphic(g1: &ColoredGraph, g2: &ColoredGraph) -> bool {
    let n = g1.num_vertices();
    if n != g2.num_vertices() || g1.num_edges() != g2.num_edges() {
        return false;
    }
    let fp1 = fingerprints(g1);
    let fp2 = fingerprints(g2);
    {
        let mut s1 = fp1.clone();
        let mut s2 = fp2.clone();
        s1.sort();
        s2.sort();
        if s1 != s2 {
            return false;
        }
    }
    let edges1: BTreeSet<(usize, usize, usize)> = g1
        .edges()
        .iter()
        .map(|e| {
            (
                g1.index_of(e.from).unwrap(),
                g1.index_of(e.to).unwrap(),
                e.color,
            )
        })
        .collect();
    let edges2: BTreeSet<(usize, usize, usize)> = g2
        .edges()
        .iter()
        .map(|e| {
            (
                g2.index_of(e.from).unwrap(),
                g2.index_of(e.to).unwrap(),
                e.color,
            )
        })
        .collect();

    fn extend(
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        pos: usize,
        fp1: &[Vec<(usize, i8)>],
        fp2: &[Vec<(usize, i8)>],
        edges1: &BTreeSet<(usize, usize, usize)>,
        edges2: &BTreeSet<(usize, usize, usize)>,
    ) -> bool {
        let n = map.len();
        if pos == n {
            return true;
        }
        'candidates: for image in 0..n {
            if used[image] || fp1[pos] != fp2[image] {
                continue;
            }
            // consistency with already-mapped vertices
            for prior in 0..pos {
                let pi = map[prior].unwrap();
                for &(a, b, c) in edges1.iter() {
                    let involves = (a == pos && b == prior)
                        || (a == prior && b == pos)
                        || (a == pos && b == pos);
                    if !involves {
                        continue;
                    }
                    let ia = if a == pos { image } else { pi };
                    let ib = if b == pos { image } else { pi };
                    if !edges2.contains(&(ia, ib, c)) {
                        continue 'candidates;
                    }
                }
                for &(a, b, c) in edges2.iter() {
                    let involves = (a == image && b == pi)
                        || (a == pi && b == image)
                        || (a == image && b == image);
                    if !involves {
                        continue;
                    }
                    let pa = if a == image { pos } else { prior };
                    let pb = if b == image { pos } else { prior };
                    if !edges1.contains(&(pa, pb, c)) {
                        continue 'candidates;
                    }
                }
            }
            // self-loops at pos
            for &(a, b, c) in edges1.iter() {
                if a == pos && b == pos && !edges2.contains(&(image, image, c)) {
                    continue 'candidates;
                }
            }
            map[pos] = Some(image);
            used[image] = true;
            if extend(map, used, pos + 1, fp1, fp2, edges1, edges2) {
                return true;
            }
            map[pos] = None;
            used[image] = false;
        }
        false
    }

    let mut map = vec![None; n];
    let mut used = vec![false; n];
    extend(&mut map, &mut used, 0, &fp1, &fp2, &edges1, &edges2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str) -> Word {
        Word::parse(text).unwrap()
    }

    fn sig(text: &str) -> Signature {
        Signature::parse(text).unwrap()
    }

    const FIGURE_WORD: &str = "g3* g1* g2 g2* g1 g4 g2* g1*";
    const FIGURE_PARTITION: &str = "{1,2,6|3,5,8|4,7}";

    fn figure_graph() -> ColoredGraph {
        ColoredGraph::word_graph(&w(FIGURE_WORD)).unwrap()
    }

    fn figure_quotient() -> ColoredGraph {
        let g = figure_graph();
        let p = Partition::parse(FIGURE_PARTITION, g.vertices()).unwrap();
        g.quotient(&p).unwrap()
    }

    #[test]
    fn figure_word_graph_edges() {
        let g = figure_graph();
        assert_eq!(g.num_vertices(), 8);
        assert_eq!(g.num_edges(), 8);
        let expected = [
            (1, 2, 3),
            (2, 3, 1),
            (4, 3, 2),
            (4, 5, 2),
            (6, 5, 1),
            (7, 6, 4),
            (7, 8, 2),
            (8, 1, 1),
        ];
        for (f, t, c) in expected {
            assert!(g.edges().contains(&Edge::new(f, t, c)), "{f}->{t} c{c}");
        }
        assert!(g.is_connected());
    }

    #[test]
    fn single_letter_word_graph_is_a_self_loop() {
        let g = ColoredGraph::word_graph(&w("g1")).unwrap();
        assert_eq!(g.vertices(), &[1]);
        assert_eq!(g.edges(), &[Edge::new(1, 1, 1)]);
    }

    #[test]
    fn coincident_prescriptions_store_one_edge() {
        // g1 g1*: edge 1 is 2 -> 1, edge 2 is 2 -> 1 again
        let g = ColoredGraph::word_graph(&w("g1 g1*")).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.edges(), &[Edge::new(2, 1, 1)]);
    }

    #[test]
    fn empty_word_has_no_graph() {
        assert_eq!(
            ColoredGraph::word_graph(&Word::empty()),
            Err(Error::EmptyWord)
        );
    }

    #[test]
    fn figure_quotient_matches_figure_two() {
        let q = figure_quotient();
        assert_eq!(q.vertices(), &[1, 3, 4]);
        let expected = [(1, 3, 1), (3, 1, 1), (4, 3, 2), (1, 1, 3), (4, 1, 4)];
        assert_eq!(q.num_edges(), 5);
        for (f, t, c) in expected {
            assert!(q.edges().contains(&Edge::new(f, t, c)));
        }
        assert!(q.is_admissible());
    }

    #[test]
    fn quotient_by_singletons_is_isomorphic() {
        let g = figure_graph();
        let p = Partition::singletons(8);
        let q = g.quotient(&p).unwrap();
        assert!(isomorphic(&g, &q));
    }

    #[test]
    fn quotient_by_one_block_collapses_colors() {
        let g = figure_graph();
        let q = g.quotient(&Partition::one_block(8)).unwrap();
        assert_eq!(q.num_vertices(), 1);
        // one self-loop per color present
        assert_eq!(q.num_edges(), 4);
    }

    #[test]
    fn admissibility() {
        assert!(figure_quotient().is_admissible());
        let bad = ColoredGraph::new(
            vec![1, 2, 3],
            vec![Edge::new(1, 2, 1), Edge::new(1, 3, 1)],
        )
        .unwrap();
        assert!(!bad.is_admissible());
        let trivial = ColoredGraph::new(vec![1], vec![]).unwrap();
        assert!(trivial.is_admissible());
    }

    #[test]
    fn congruence_definitional_and_quotient_views_agree() {
        let g = figure_graph();
        let p = Partition::parse(FIGURE_PARTITION, g.vertices()).unwrap();
        assert!(g.is_congruence(&p).unwrap());
        // the one-block partition is always a congruence
        assert!(g.is_congruence(&Partition::one_block(8)).unwrap());
        // all-singletons is a congruence iff the graph is admissible;
        // the figure graph is not (vertex 4 sources two 2-edges)
        assert!(!g.is_admissible());
        assert!(!g.is_congruence(&Partition::singletons(8)).unwrap());
        for p in all_partitions(5) {
            let g5 = ColoredGraph::word_graph(&w("g1 g2 g1 g2 g1")).unwrap();
            assert_eq!(
                g5.is_congruence(&p).unwrap(),
                g5.quotient(&p).unwrap().is_admissible()
            );
        }
    }

    #[test]
    fn figure_paths_and_loop_characteristic() {
        let q = figure_quotient();
        let paths = q.paths().unwrap();
        let mut summary: Vec<(usize, usize, bool)> = paths
            .iter()
            .map(|p| (p.color, p.length, p.is_loop))
            .collect();
        summary.sort_unstable();
        assert_eq!(
            summary,
            vec![(1, 2, true), (2, 1, false), (3, 1, true), (4, 1, false)]
        );
        assert_eq!(q.loop_characteristic().unwrap(), 0);
    }

    #[test]
    fn trivial_graph_paths() {
        let trivial = ColoredGraph::new(vec![1], vec![]).unwrap();
        assert!(trivial.paths().unwrap().is_empty());
        assert_eq!(trivial.loop_characteristic().unwrap(), 1);
    }

    #[test]
    fn two_letter_loop() {
        let g = ColoredGraph::word_graph(&w("g1 g1")).unwrap();
        let paths = g.paths().unwrap();
        assert_eq!(paths.len(), 1);
        assert!(paths[0].is_loop);
        assert_eq!(paths[0].length, 2);
        assert_eq!(g.loop_characteristic().unwrap(), 1);
    }

    #[test]
    fn strong_admissibility_cases() {
        let loop3 = ColoredGraph::new(
            vec![1, 2, 3],
            vec![Edge::new(1, 2, 1), Edge::new(2, 3, 1), Edge::new(3, 1, 1)],
        )
        .unwrap();
        assert!(loop3.is_strongly_admissible(&sig("3")).unwrap());
        let loop2 = ColoredGraph::word_graph(&w("g1 g1")).unwrap();
        assert!(!loop2.is_strongly_admissible(&sig("3")).unwrap());
        let string2 = ColoredGraph::new(
            vec![1, 2, 3],
            vec![Edge::new(1, 2, 1), Edge::new(2, 3, 1)],
        )
        .unwrap();
        assert!(string2.is_strongly_admissible(&sig("inf")).unwrap());
        // no loops allowed at infinite order
        let loop1 = ColoredGraph::word_graph(&w("g1")).unwrap();
        assert!(!loop1.is_strongly_admissible(&sig("inf")).unwrap());
    }

    #[test]
    fn congruence_enumeration_small_cases() {
        let trivial = ColoredGraph::new(vec![1], vec![]).unwrap();
        assert_eq!(trivial.congruences(14).unwrap().len(), 1);

        let g = ColoredGraph::word_graph(&w("g1 g1*")).unwrap();
        assert_eq!(g.congruences(14).unwrap().len(), 2);

        let edgeless = ColoredGraph::new(vec![1, 2, 3], vec![]).unwrap();
        assert_eq!(edgeless.congruences(14).unwrap().len(), 5);

        assert_eq!(
            edgeless.congruences(2),
            Err(Error::VertexBoundExceeded {
                vertices: 3,
                bound: 2
            })
        );
    }

    #[test]
    fn strong_congruence_enumeration() {
        let loop1 = ColoredGraph::word_graph(&w("g1")).unwrap();
        assert_eq!(loop1.strong_congruences(&sig("1"), 14).unwrap().len(), 1);
        assert_eq!(loop1.strong_congruences(&sig("2"), 14).unwrap().len(), 0);

        let g = ColoredGraph::word_graph(&w("g1 g1*")).unwrap();
        let scon = g.strong_congruences(&sig("2"), 14).unwrap();
        assert_eq!(scon.len(), 1);
        assert_eq!(scon[0], Partition::singletons(2));
    }

    #[test]
    fn chi1_counts() {
        let g = ColoredGraph::word_graph(&w("g1 g1*")).unwrap();
        for orders in ["1", "2", "inf"] {
            assert_eq!(g.chi1_strong_congruence_count(&sig(orders), 14).unwrap(), 1);
        }
        let loop1 = ColoredGraph::word_graph(&w("g1")).unwrap();
        assert_eq!(loop1.chi1_strong_congruence_count(&sig("inf"), 14).unwrap(), 0);
        let loop2 = ColoredGraph::word_graph(&w("g1 g1")).unwrap();
        assert_eq!(loop2.chi1_strong_congruence_count(&sig("2"), 14).unwrap(), 1);

        let disconnected = ColoredGraph::new(vec![1, 2], vec![]).unwrap();
        assert_eq!(
            disconnected.chi1_strong_congruence_count(&sig("2"), 14),
            Err(Error::NotConnected)
        );
    }

    #[test]
    fn second_isomorphism_on_figure() {
        let g = figure_graph();
        let rho = Partition::parse(FIGURE_PARTITION, g.vertices()).unwrap();
        let pi = Partition::parse("{1,2|3|4|5|6|7|8}", g.vertices()).unwrap();
        assert!(pi.leq(&rho).unwrap());
        assert!(g.second_isomorphism_check(&pi, &rho).unwrap());
        assert!(g
            .second_isomorphism_check(&Partition::singletons(8), &rho)
            .unwrap());
        assert!(g.second_isomorphism_check(&rho, &rho).unwrap());
        assert_eq!(
            g.second_isomorphism_check(&rho, &Partition::singletons(8)),
            Err(Error::NotARefinement)
        );
    }

    #[test]
    fn text_round_trip() {
        let g = figure_quotient();
        let parsed = ColoredGraph::parse_text(&g.to_text()).unwrap();
        assert_eq!(g, parsed);
        assert!(ColoredGraph::parse_text("").is_err());
        assert!(ColoredGraph::parse_text("1 2\n1 2\n").is_err());
    }

    #[test]
    fn isomorphism_distinguishes_direction() {
        let a = ColoredGraph::new(vec![1, 2], vec![Edge::new(1, 2, 1)]).unwrap();
        let b = ColoredGraph::new(vec![1, 2], vec![Edge::new(2, 1, 1)]).unwrap();
        // these are isomorphic (swap labels)
        assert!(isomorphic(&a, &b));
        let c = ColoredGraph::new(vec![1, 2], vec![Edge::new(1, 2, 2)]).unwrap();
        assert!(!isomorphic(&a, &c));
    }

    #[test]
    fn disjoint_union_relabels() {
        let a = ColoredGraph::word_graph(&w("g1 g2")).unwrap();
        let b = ColoredGraph::word_graph(&w("g1")).unwrap();
        let u = ColoredGraph::disjoint_union(&[&a, &b]).unwrap();
        assert_eq!(u.vertices(), &[1, 2, 3]);
        assert_eq!(u.connected_components().len(), 2);
        assert!(u.edges().contains(&Edge::new(3, 3, 1)));
    }
}
