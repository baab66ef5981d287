//! Set partitions in canonical restricted-growth form.
//!
//! The ground set is positional: a partition of size `n` partitions the
//! indices `0..n`, which callers map onto vertex labels. The canonical
//! restricted-growth string assigns block id 0 to index 0 and never
//! skips a block id, so equal partitions compare equal structurally.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    rgs: Vec<usize>,
    blocks: usize,
}

impl Partition {
    /// Build from any block assignment (not necessarily canonical);
    /// block ids are renumbered by first appearance.
    pub fn from_assignment(assignment: &[usize]) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::invalid("partition of an empty ground set"));
        }
        let mut relabel: Vec<Option<usize>> = vec![None; assignment.len()];
        let mut rgs = Vec::with_capacity(assignment.len());
        let mut blocks = 0;
        for &raw in assignment {
            if raw >= assignment.len() {
                return Err(Error::invalid("block id out of range"));
            }
            let id = *relabel[raw].get_or_insert_with(|| {
                let id = blocks;
                blocks += 1;
                id
            });
            rgs.push(id);
        }
        Ok(Partition { rgs, blocks })
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            rgs: (0..n).collect(),
            blocks: n,
        }
    }

    pub fn one_block(n: usize) -> Self {
        Partition {
            rgs: vec![0; n],
            blocks: 1,
        }
    }

    /// Ground-set size.
    pub fn size(&self) -> usize {
        self.rgs.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks
    }

    /// Canonical restricted-growth string.
    pub fn rgs(&self) -> &[usize] {
        &self.rgs
    }

    pub fn block_of(&self, index: usize) -> usize {
        self.rgs[index]
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.rgs[a] == self.rgs[b]
    }

    /// Blocks as sorted index lists, ordered by block id (= first
    /// appearance, = minimum index).
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.blocks];
        for (i, &b) in self.rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        blocks
    }

    fn check_same_ground(&self, other: &Partition) -> Result<()> {
        if self.size() != other.size() {
            return Err(Error::GroundSetMismatch {
                partition: other.size(),
                expected: self.size(),
            });
        }
        Ok(())
    }

    /// Lattice meet: blocks are the nonempty pairwise intersections.
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        self.check_same_ground(other)?;
        let mut seen: Vec<(usize, usize, usize)> = Vec::new();
        let mut assignment = Vec::with_capacity(self.size());
        for i in 0..self.size() {
            let key = (self.rgs[i], other.rgs[i]);
            let id = match seen.iter().find(|&&(a, b, _)| (a, b) == key) {
                Some(&(_, _, id)) => id,
                None => {
                    let id = seen.len();
                    seen.push((key.0, key.1, id));
                    id
                }
            };
            assignment.push(id);
        }
        Partition::from_assignment(&assignment)
    }

    /// `self <= other`: every block of `self` lies inside a block of
    /// `other`.
    pub fn leq(&self, other: &Partition) -> Result<bool> {
        self.check_same_ground(other)?;
        let mut image: Vec<Option<usize>> = vec![None; self.blocks];
        for i in 0..self.size() {
            match image[self.rgs[i]] {
                None => image[self.rgs[i]] = Some(other.rgs[i]),
                Some(b) if b == other.rgs[i] => {}
                Some(_) => return Ok(false),
            }
        }
        Ok(true)
    }

    /// The quotient partition `self / finer` on the blocks of `finer`:
    /// blocks of `finer` are grouped when `self` merges them. Requires
    /// `finer <= self`.
    pub fn quotient_over(&self, finer: &Partition) -> Result<Partition> {
        if !finer.leq(self)? {
            return Err(Error::NotARefinement);
        }
        let mut assignment = vec![0usize; finer.blocks];
        for i in 0..self.size() {
            assignment[finer.rgs[i]] = self.rgs[i];
        }
        Partition::from_assignment(&assignment)
    }

    /// Restriction to a subset of indices (kept in order).
    pub fn restrict(&self, keep: &[usize]) -> Result<Partition> {
        if keep.is_empty() {
            return Err(Error::invalid("restriction to an empty subset"));
        }
        let assignment: Vec<usize> = keep.iter().map(|&i| self.rgs[i]).collect();
        // from_assignment renumbers, but block ids may exceed keep.len();
        // renumber manually first.
        let mut relabel: std::collections::BTreeMap<usize, usize> = Default::default();
        let mut rgs = Vec::with_capacity(assignment.len());
        for raw in assignment {
            let next = relabel.len();
            let id = *relabel.entry(raw).or_insert(next);
            rgs.push(id);
        }
        let blocks = relabel.len();
        Ok(Partition { rgs, blocks })
    }

    /// Disjoint union: `self` on its ground set followed by `other`.
    pub fn disjoint_union(&self, other: &Partition) -> Partition {
        let mut rgs = self.rgs.clone();
        rgs.extend(other.rgs.iter().map(|&b| b + self.blocks));
        Partition {
            rgs,
            blocks: self.blocks + other.blocks,
        }
    }

    /// Parse `{1,2,6|3,5,8|4,7}` against an ordered vertex-label list.
    pub fn parse(text: &str, vertices: &[u32]) -> Result<Self> {
        let inner = text
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| Error::parse("partition", text))?;
        let mut assignment = vec![usize::MAX; vertices.len()];
        for (block_id, block) in inner.split('|').enumerate() {
            for elem in block.split(',') {
                let label: u32 = elem
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse("partition", text))?;
                let idx = vertices
                    .iter()
                    .position(|&v| v == label)
                    .ok_or_else(|| Error::parse("partition", text))?;
                if assignment[idx] != usize::MAX {
                    return Err(Error::parse("partition", text));
                }
                assignment[idx] = block_id;
            }
        }
        if assignment.contains(&usize::MAX) {
            return Err(Error::parse("partition", text));
        }
        Partition::from_assignment(&assignment)
    }

    /// Render with vertex labels, blocks by minimum element:
    /// `{1,2,6|3,5,8|4,7}`.
    pub fn display_with(&self, vertices: &[u32]) -> String {
        let mut out = String::from("{");
        for (i, block) in self.blocks().iter().enumerate() {
            if i > 0 {
                out.push('|');
            }
            for (j, &idx) in block.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", vertices[idx]);
            }
        }
        out.push('}');
        out
    }
}

/// Every partition of `0..n` in restricted-growth lexicographic order
/// (Bell(n) of them). Intended for desk-scale n.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        let blocks = rgs.iter().copied().max().map_or(0, |m| m + 1);
        out.push(Partition {
            rgs: rgs.clone(),
            blocks,
        });
        // next restricted-growth string
        let mut i = n;
        loop {
            if i <= 1 {
                return out;
            }
            i -= 1;
            let cap = rgs[..i].iter().copied().max().unwrap() + 1;
            if rgs[i] < cap {
                rgs[i] += 1;
                for item in rgs.iter_mut().skip(i + 1) {
                    *item = 0;
                }
                break;
            }
            rgs[i] = 0;
        }
    }
}
