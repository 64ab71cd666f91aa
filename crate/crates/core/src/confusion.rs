//! Confusion graphs of side-information graphs.
//!
//! A vertex of `Γ_t(G)` is a tuple of blocks `x = (x_1, ..., x_n)` with
//! `x_j ∈ {0,1}^{t_j}`, packed into an integer big-endian by node order:
//! node 1's block occupies the most significant bits. Two tuples are
//! adjacent iff they are confusable at some node `j`, that is `x_j != z_j`
//! while `x_i = z_i` for every `i ∈ A_j`. Adjacency depends only on the XOR
//! difference `x ⊕ z`, so the graph is stored as the set of confusable
//! differences and every translation `x ↦ x ⊕ c` is an automorphism.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::graph::{BlockLengths, SideInformationGraph, UndirectedGraph};
use crate::limits::Limits;

/// Confusability at some node, evaluated directly from the definition on
/// per-node block values.
pub fn confusable(
    g: &SideInformationGraph,
    t: &BlockLengths,
    x: &[u64],
    z: &[u64],
) -> Result<bool> {
    Ok(confusing_node(g, t, x, z)?.is_some())
}

/// Lowest node at which `x` and `z` are confusable, if any.
pub fn confusing_node(
    g: &SideInformationGraph,
    t: &BlockLengths,
    x: &[u64],
    z: &[u64],
) -> Result<Option<usize>> {
    let n = g.n();
    for (what, tuple) in [("tuple x", x), ("tuple z", z)] {
        if tuple.len() != n {
            return Err(Error::LengthMismatch {
                what,
                expected: n,
                actual: tuple.len(),
            });
        }
        if t.len() != n {
            return Err(Error::LengthMismatch {
                what: "block lengths",
                expected: n,
                actual: t.len(),
            });
        }
        for (j, &v) in tuple.iter().enumerate() {
            if t.get(j) < 64 && v >> t.get(j) != 0 {
                return Err(Error::invalid(format!(
                    "{what}: block {} value {v} does not fit in {} bits",
                    j + 1,
                    t.get(j)
                )));
            }
        }
    }
    Ok((0..n).find(|&j| x[j] != z[j] && g.in_set(j).iter().all(|&i| x[i] == z[i])))
}

/// Bit layout of tuples under block lengths `t`, together with the
/// in-neighborhoods that define each node's observation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleLayout {
    base: SideInformationGraph,
    t: BlockLengths,
    total_bits: u32,
    shifts: Vec<u32>,
    block_masks: Vec<u64>,
    /// OR of the block masks of `A_j`.
    in_masks: Vec<u64>,
}

impl TupleLayout {
    pub fn new(g: &SideInformationGraph, t: &BlockLengths, limits: &Limits) -> Result<Self> {
        t.validate(g.n(), limits)?;
        let total_bits = t.total();
        let n = g.n();
        let mut shifts = Vec::with_capacity(n);
        let mut block_masks = Vec::with_capacity(n);
        let mut offset = 0;
        for j in 0..n {
            let tj = t.get(j);
            let shift = total_bits - offset - tj;
            shifts.push(shift);
            block_masks.push(((1u64 << tj) - 1) << shift);
            offset += tj;
        }
        let in_masks = (0..n)
            .map(|j| g.in_set(j).iter().fold(0, |m, &i| m | block_masks[i]))
            .collect();
        Ok(TupleLayout {
            base: g.clone(),
            t: t.clone(),
            total_bits,
            shifts,
            block_masks,
            in_masks,
        })
    }

    pub fn base(&self) -> &SideInformationGraph {
        &self.base
    }

    pub fn block_lengths(&self) -> &BlockLengths {
        &self.t
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn total_bits(&self) -> u32 {
        self.total_bits
    }

    pub fn vertex_count(&self) -> u64 {
        1u64 << self.total_bits
    }

    /// Lowest node at which the packed tuples `x` and `z` are confusable.
    pub fn confusing_node(&self, x: u64, z: u64) -> Option<usize> {
        let d = x ^ z;
        (0..self.n()).find(|&j| d & self.block_masks[j] != 0 && d & self.in_masks[j] == 0)
    }

    pub fn block_mask(&self, j: usize) -> u64 {
        self.block_masks[j]
    }

    /// Mask of the blocks observed by node `j`.
    pub fn in_mask(&self, j: usize) -> u64 {
        self.in_masks[j]
    }

    #[inline]
    pub fn block(&self, x: u64, j: usize) -> u64 {
        (x & self.block_masks[j]) >> self.shifts[j]
    }

    /// `x` with block `j` replaced by `value`.
    pub fn with_block(&self, x: u64, j: usize, value: u64) -> u64 {
        (x & !self.block_masks[j]) | (value << self.shifts[j]) & self.block_masks[j]
    }

    /// Observation `x(A_j)`: the blocks of `A_j` concatenated in node order.
    pub fn observation(&self, x: u64, j: usize) -> u64 {
        self.base
            .in_set(j)
            .iter()
            .fold(0, |acc, &i| (acc << self.t.get(i)) | self.block(x, i))
    }

    /// Number of bits in node `j`'s observation.
    pub fn observation_bits(&self, j: usize) -> u32 {
        self.base.in_set(j).iter().map(|&i| self.t.get(i)).sum()
    }

    /// Packs per-node block values into a vertex index.
    pub fn pack(&self, blocks: &[u64]) -> Result<u64> {
        if blocks.len() != self.n() {
            return Err(Error::LengthMismatch {
                what: "tuple",
                expected: self.n(),
                actual: blocks.len(),
            });
        }
        let mut x = 0;
        for (j, &v) in blocks.iter().enumerate() {
            if v >> self.t.get(j) != 0 {
                return Err(Error::invalid(format!(
                    "block {} value {v} does not fit in {} bits",
                    j + 1,
                    self.t.get(j)
                )));
            }
            x |= v << self.shifts[j];
        }
        Ok(x)
    }

    pub fn unpack(&self, x: u64) -> Vec<u64> {
        (0..self.n()).map(|j| self.block(x, j)).collect()
    }

    /// Bit string of a tuple, e.g. `"011"`; `"-"` for the empty tuple.
    pub fn format_tuple(&self, x: u64) -> String {
        if self.total_bits == 0 {
            return "-".into();
        }
        format!("{:0width$b}", x, width = self.total_bits as usize)
    }

    pub fn parse_tuple(&self, s: &str) -> Result<u64> {
        if s == "-" && self.total_bits == 0 {
            return Ok(0);
        }
        if s.len() != self.total_bits as usize || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::invalid(format!(
                "tuple {s:?} is not a {}-bit string",
                self.total_bits
            )));
        }
        Ok(u64::from_str_radix(s, 2).unwrap_or(0))
    }

    fn shift(&self, j: usize) -> u32 {
        self.shifts[j]
    }
}

#[derive(Clone, Debug)]
pub struct ConfusionGraph {
    layout: TupleLayout,
    confusable: BitSet,
    diffs: Vec<u64>,
}

impl ConfusionGraph {
    /// Builds `Γ_t(G)` by scanning all nonzero differences.
    pub fn new(g: &SideInformationGraph, t: &BlockLengths, limits: &Limits) -> Result<Self> {
        let layout = TupleLayout::new(g, t, limits)?;
        let size = 1usize << layout.total_bits;
        let mut confusable = BitSet::new(size);
        let mut diffs = Vec::new();
        for d in 1..size as u64 {
            if (0..g.n()).any(|j| d & layout.block_masks[j] != 0 && d & layout.in_masks[j] == 0) {
                confusable.insert(d as usize);
                diffs.push(d);
            }
        }
        Ok(ConfusionGraph {
            layout,
            confusable,
            diffs,
        })
    }

    pub fn layout(&self) -> &TupleLayout {
        &self.layout
    }

    pub fn base(&self) -> &SideInformationGraph {
        self.layout.base()
    }

    pub fn block_lengths(&self) -> &BlockLengths {
        self.layout.block_lengths()
    }

    pub fn n(&self) -> usize {
        self.layout.n()
    }

    pub fn total_bits(&self) -> u32 {
        self.layout.total_bits()
    }

    pub fn vertex_count(&self) -> u64 {
        self.layout.vertex_count()
    }

    /// Common degree of every vertex.
    pub fn degree(&self) -> usize {
        self.diffs.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.vertex_count() * self.diffs.len() as u64 / 2
    }

    /// The confusable differences in ascending order.
    pub fn confusable_diffs(&self) -> &[u64] {
        &self.diffs
    }

    #[inline]
    pub fn is_confusable_diff(&self, d: u64) -> bool {
        self.confusable.contains(d as usize)
    }

    #[inline]
    pub fn adjacent(&self, x: u64, z: u64) -> bool {
        self.confusable.contains((x ^ z) as usize)
    }

    /// Lowest node at which the packed tuples `x` and `z` are confusable.
    pub fn confusing_node(&self, x: u64, z: u64) -> Option<usize> {
        self.layout.confusing_node(x, z)
    }

    pub fn block_mask(&self, j: usize) -> u64 {
        self.layout.block_mask(j)
    }

    /// Mask of the blocks observed by node `j`.
    pub fn in_mask(&self, j: usize) -> u64 {
        self.layout.in_mask(j)
    }

    #[inline]
    pub fn block(&self, x: u64, j: usize) -> u64 {
        self.layout.block(x, j)
    }

    /// Observation `x(A_j)`: the blocks of `A_j` concatenated in node order.
    pub fn observation(&self, x: u64, j: usize) -> u64 {
        self.layout.observation(x, j)
    }

    /// Number of bits in node `j`'s observation.
    pub fn observation_bits(&self, j: usize) -> u32 {
        self.layout.observation_bits(j)
    }

    /// Packs per-node block values into a vertex index.
    pub fn pack(&self, blocks: &[u64]) -> Result<u64> {
        self.layout.pack(blocks)
    }

    pub fn unpack(&self, x: u64) -> Vec<u64> {
        self.layout.unpack(x)
    }

    /// Bit string of a tuple, e.g. `"011"`; `"-"` for the empty tuple.
    pub fn format_tuple(&self, x: u64) -> String {
        self.layout.format_tuple(x)
    }

    pub fn parse_tuple(&self, s: &str) -> Result<u64> {
        self.layout.parse_tuple(s)
    }

    /// Re-embeds a tuple of `smaller` (with `smaller.t <= self.t`) by
    /// zero-padding every block on the left.
    pub fn embed_from(&self, smaller: &ConfusionGraph, x: u64) -> u64 {
        (0..self.n()).fold(0, |acc, j| acc | smaller.block(x, j) << self.layout.shift(j))
    }

    /// Checks `x ~ z ⟺ (x⊕c) ~ (z⊕c)` on every sampled pair.
    pub fn translation_automorphism_check(&self, c: u64, pairs: &[(u64, u64)]) -> Result<bool> {
        let limit = self.vertex_count();
        if c >= limit {
            return Err(Error::invalid(format!("translation {c} out of range")));
        }
        for &(x, z) in pairs {
            if x >= limit || z >= limit {
                return Err(Error::invalid(format!("pair ({x}, {z}) out of range")));
            }
            let direct = x != z && self.confusing_node(x, z).is_some();
            let shifted = x != z && self.confusing_node(x ^ c, z ^ c).is_some();
            if direct != shifted {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All unordered vertex pairs, for exhaustive checks on small graphs.
    pub fn all_pairs(&self) -> Vec<(u64, u64)> {
        let v = self.vertex_count();
        (0..v)
            .flat_map(|x| (x + 1..v).map(move |z| (x, z)))
            .collect()
    }

    /// Materializes the adjacency; vertex `i` is the tuple with value `i`.
    pub fn to_explicit(&self, limits: &Limits) -> Result<UndirectedGraph> {
        limits.check_explicit(self.vertex_count())?;
        let size = self.vertex_count() as usize;
        let rows = (0..size as u64)
            .map(|x| {
                let mut row = BitSet::new(size);
                for &d in &self.diffs {
                    row.insert((x ^ d) as usize);
                }
                row
            })
            .collect();
        Ok(UndirectedGraph::from_rows(rows))
    }
}
