//! Executable index codes and locally recoverable storage codes.
//!
//! An index code broadcasts the color of the message tuple in a proper
//! coloring of `Γ_t`; receiver `j` decodes from the color and its side
//! information `x(A_j)`. A storage code keeps a codebook that is an
//! independent set of `Γ_t`, so every node's block is a function of the
//! blocks it observes. Decoders and recovery functions are lookup tables,
//! checked exhaustively when a code is built or loaded.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::confusion::TupleLayout;
use crate::error::{Error, Result};
use crate::fracchrom::Coloring;
use crate::graph::{BlockLengths, SideInformationGraph};
use crate::limits::Limits;

/// `⌈log2 k⌉`, with `0` for `k <= 1`.
fn ceil_log2(k: usize) -> u32 {
    if k <= 1 {
        0
    } else {
        usize::BITS - (k - 1).leading_zeros()
    }
}

pub(crate) fn hex(v: u64) -> String {
    format!("{v:x}")
}

pub(crate) fn parse_hex(s: &str) -> Result<u64> {
    u64::from_str_radix(s, 16).map_err(|_| Error::invalid(format!("bad hex value {s:?}")))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexCode {
    layout: TupleLayout,
    /// Broadcast bits.
    pub r: u32,
    /// `φ`: the index sent for each message tuple.
    pub encoder: Vec<u64>,
    /// `ψ_j`: `(index, x(A_j)) ↦ x_j` for each node.
    pub decoders: Vec<BTreeMap<(u64, u64), u64>>,
}

/// First failure found by an exhaustive check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// Receiver `node` decodes the tuple `x` wrongly or not at all.
    Decode {
        x: String,
        node: usize,
        expected: String,
        decoded: Option<String>,
    },
    /// Two codewords share every block observed by `node` yet differ there.
    ConfusablePair { a: String, b: String, node: usize },
    /// The codebook lists a tuple twice.
    Duplicate { codeword: String },
    /// Node `node` recovers codeword `m` wrongly or not at all.
    Recovery {
        m: usize,
        node: usize,
        expected: String,
        recovered: Option<String>,
    },
    /// A table has the wrong shape.
    Malformed { detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    /// Number of (input, node) pairs checked.
    pub checked: u64,
    pub counterexample: Option<Counterexample>,
}

impl VerifyReport {
    fn fail(checked: u64, c: Counterexample) -> Self {
        VerifyReport {
            passed: false,
            checked,
            counterexample: Some(c),
        }
    }

    fn pass(checked: u64) -> Self {
        VerifyReport {
            passed: true,
            checked,
            counterexample: None,
        }
    }
}

/// Formats node `j`'s block of `x` as a bit string (`"-"` when empty).
pub(crate) fn format_block(layout: &TupleLayout, j: usize, v: u64) -> String {
    let bits = layout.block_lengths().get(j) as usize;
    if bits == 0 {
        "-".into()
    } else {
        format!("{v:0bits$b}")
    }
}

/// 1-indexed in-sets, as written in graph files.
pub(crate) fn external_in_sets(g: &SideInformationGraph) -> Vec<Vec<usize>> {
    g.in_sets().iter().map(|s| s.iter().map(|&i| i + 1).collect()).collect()
}

pub(crate) fn internal_graph(in_sets: &[Vec<usize>]) -> Result<SideInformationGraph> {
    let sets = in_sets
        .iter()
        .map(|s| {
            s.iter()
                .map(|&i| i.checked_sub(1).ok_or_else(|| Error::invalid("node indices start at 1")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SideInformationGraph::from_in_sets(sets)
}

impl IndexCode {
    pub fn layout(&self) -> &TupleLayout {
        &self.layout
    }

    pub fn block_lengths(&self) -> &BlockLengths {
        self.layout.block_lengths()
    }

    /// `ψ_j(index, observation)`.
    pub fn decode(&self, j: usize, index: u64, observation: u64) -> Option<u64> {
        self.decoders.get(j)?.get(&(index, observation)).copied()
    }

    /// Round trip `ψ_j(φ(x), x(A_j)) = x_j` for every tuple and node.
    pub fn verify(&self) -> VerifyReport {
        let layout = &self.layout;
        if self.encoder.len() as u64 != layout.vertex_count() || self.decoders.len() != layout.n() {
            return VerifyReport::fail(
                0,
                Counterexample::Malformed {
                    detail: "table sizes do not match the block lengths".into(),
                },
            );
        }
        let mut checked = 0;
        for x in 0..layout.vertex_count() {
            let index = self.encoder[x as usize];
            if self.r < 64 && index >> self.r != 0 {
                return VerifyReport::fail(
                    checked,
                    Counterexample::Malformed {
                        detail: format!("index {index} of tuple {} exceeds {} bits", layout.format_tuple(x), self.r),
                    },
                );
            }
            for j in 0..layout.n() {
                checked += 1;
                let expected = layout.block(x, j);
                let decoded = self.decode(j, index, layout.observation(x, j));
                if decoded != Some(expected) {
                    return VerifyReport::fail(
                        checked,
                        Counterexample::Decode {
                            x: layout.format_tuple(x),
                            node: j + 1,
                            expected: format_block(layout, j, expected),
                            decoded: decoded.map(|v| format_block(layout, j, v)),
                        },
                    );
                }
            }
        }
        VerifyReport::pass(checked)
    }

    pub fn to_document(&self) -> IndexCodeDocument {
        IndexCodeDocument {
            kind: "index".into(),
            graph: external_in_sets(self.layout.base()),
            t: self.layout.block_lengths().clone(),
            r: self.r,
            encoder: self.encoder.iter().copied().map(hex).collect(),
            decoders: self
                .decoders
                .iter()
                .map(|table| {
                    table
                        .iter()
                        .map(|(&(index, obs), &block)| DecoderEntry {
                            index: hex(index),
                            observation: hex(obs),
                            block: hex(block),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &IndexCodeDocument, limits: &Limits) -> Result<Self> {
        if doc.kind != "index" {
            return Err(Error::invalid(format!("expected an index code, found {:?}", doc.kind)));
        }
        let g = internal_graph(&doc.graph)?;
        let layout = TupleLayout::new(&g, &doc.t, limits)?;
        let encoder = doc.encoder.iter().map(|s| parse_hex(s)).collect::<Result<Vec<_>>>()?;
        let decoders = doc
            .decoders
            .iter()
            .map(|entries| {
                entries
                    .iter()
                    .map(|e| Ok(((parse_hex(&e.index)?, parse_hex(&e.observation)?), parse_hex(&e.block)?)))
                    .collect::<Result<BTreeMap<_, _>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IndexCode {
            layout,
            r: doc.r,
            encoder,
            decoders,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("serializable")
    }

    pub fn from_json(text: &str, limits: &Limits) -> Result<Self> {
        let doc: IndexCodeDocument =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("index code JSON: {e}")))?;
        Self::from_document(&doc, limits)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoderEntry {
    pub index: String,
    pub observation: String,
    pub block: String,
}

/// JSON form of an [`IndexCode`]; numbers are hex strings and nodes are
/// 1-indexed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCodeDocument {
    pub kind: String,
    pub graph: Vec<Vec<usize>>,
    pub t: BlockLengths,
    pub r: u32,
    pub encoder: Vec<String>,
    pub decoders: Vec<Vec<DecoderEntry>>,
}

/// Index code broadcasting the color of each tuple in a proper coloring of
/// `Γ_t` (vertex `x` of the coloring is the tuple with value `x`).
pub fn index_code_from_coloring(
    g: &SideInformationGraph,
    t: &BlockLengths,
    coloring: &Coloring,
    limits: &Limits,
) -> Result<IndexCode> {
    let layout = TupleLayout::new(g, t, limits)?;
    let size = layout.vertex_count();
    if coloring.colors.len() as u64 != size {
        return Err(Error::LengthMismatch {
            what: "coloring",
            expected: size as usize,
            actual: coloring.colors.len(),
        });
    }
    let count = coloring.colors.iter().max().map_or(0, |&c| c + 1).max(coloring.count);
    let r = ceil_log2(count);
    let encoder: Vec<u64> = coloring.colors.iter().map(|&c| c as u64).collect();
    let mut decoders: Vec<BTreeMap<(u64, u64), u64>> = vec![BTreeMap::new(); layout.n()];
    // Tuples sharing a color and node j's observation must agree at j, or
    // they would be adjacent with the same color.
    let mut owners: Vec<BTreeMap<(u64, u64), u64>> = vec![BTreeMap::new(); layout.n()];
    for x in 0..size {
        for (j, table) in decoders.iter_mut().enumerate() {
            let key = (encoder[x as usize], layout.observation(x, j));
            let block = layout.block(x, j);
            match table.get(&key) {
                None => {
                    table.insert(key, block);
                    owners[j].insert(key, x);
                }
                Some(&b) if b == block => {}
                Some(_) => {
                    let other = owners[j][&key];
                    return Err(Error::ImproperColoring {
                        a: layout.format_tuple(other),
                        b: layout.format_tuple(x),
                        color: key.0 as usize,
                    });
                }
            }
        }
    }
    let code = IndexCode {
        layout,
        r,
        encoder,
        decoders,
    };
    let report = code.verify();
    debug_assert!(report.passed, "{report:?}");
    Ok(code)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StorageCode {
    layout: TupleLayout,
    /// Message bits; the codebook has `2^r` rows.
    pub r: u32,
    /// `x^n(m)` for `m = 0, ..., 2^r − 1`, as packed tuples.
    pub codebook: Vec<u64>,
    /// `f_j`: `x(A_j) ↦ x_j`, defined on codeword observations only.
    pub recovery: Vec<BTreeMap<u64, u64>>,
}

impl StorageCode {
    pub fn layout(&self) -> &TupleLayout {
        &self.layout
    }

    pub fn block_lengths(&self) -> &BlockLengths {
        self.layout.block_lengths()
    }

    /// `f_j(observation)`; an error outside the codebook's observations.
    pub fn recover(&self, j: usize, observation: u64) -> Result<u64> {
        let table = self
            .recovery
            .get(j)
            .ok_or_else(|| Error::invalid(format!("node {} out of range", j + 1)))?;
        table.get(&observation).copied().ok_or_else(|| {
            Error::invalid(format!(
                "observation {observation:x} of node {} is outside the recovery table",
                j + 1
            ))
        })
    }

    /// Erases block `failed` of codeword `m` and rebuilds it from the
    /// surviving blocks in `A_failed`.
    pub fn simulate_failure(&self, m: usize, failed: usize) -> Result<Recovery> {
        let &x = self
            .codebook
            .get(m)
            .ok_or_else(|| Error::invalid(format!("message {m} out of range 0..{}", self.codebook.len())))?;
        if failed >= self.layout.n() {
            return Err(Error::invalid(format!("node {} out of range", failed + 1)));
        }
        let erased = self.layout.block(x, failed);
        let survivors = self.layout.with_block(x, failed, 0);
        let recovered = self.recover(failed, self.layout.observation(survivors, failed))?;
        Ok(Recovery {
            m,
            node: failed + 1,
            erased: format_block(&self.layout, failed, erased),
            recovered: format_block(&self.layout, failed, recovered),
            ok: erased == recovered,
        })
    }

    /// Injectivity, pairwise recoverability and `f_j(x(A_j)) = x_j` for
    /// every codeword and node.
    pub fn verify(&self) -> VerifyReport {
        let layout = &self.layout;
        if self.recovery.len() != layout.n() || (self.r < 64 && self.codebook.len() as u64 != 1u64 << self.r) {
            return VerifyReport::fail(
                0,
                Counterexample::Malformed {
                    detail: format!("expected 2^{} codewords and {} recovery tables", self.r, layout.n()),
                },
            );
        }
        if let Some(&x) = self.codebook.iter().find(|&&x| x >= layout.vertex_count()) {
            return VerifyReport::fail(
                0,
                Counterexample::Malformed {
                    detail: format!("codeword {x:x} does not fit in {} bits", layout.total_bits()),
                },
            );
        }
        let mut sorted = self.codebook.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return VerifyReport::fail(
                0,
                Counterexample::Duplicate {
                    codeword: layout.format_tuple(w[0]),
                },
            );
        }
        let mut checked = 0;
        for (i, &a) in self.codebook.iter().enumerate() {
            for &b in &self.codebook[i + 1..] {
                checked += 1;
                if let Some(j) = layout.confusing_node(a, b) {
                    return VerifyReport::fail(
                        checked,
                        Counterexample::ConfusablePair {
                            a: layout.format_tuple(a),
                            b: layout.format_tuple(b),
                            node: j + 1,
                        },
                    );
                }
            }
        }
        for (m, &x) in self.codebook.iter().enumerate() {
            for j in 0..layout.n() {
                checked += 1;
                let expected = layout.block(x, j);
                let recovered = self.recovery[j].get(&layout.observation(x, j)).copied();
                if recovered != Some(expected) {
                    return VerifyReport::fail(
                        checked,
                        Counterexample::Recovery {
                            m,
                            node: j + 1,
                            expected: format_block(layout, j, expected),
                            recovered: recovered.map(|v| format_block(layout, j, v)),
                        },
                    );
                }
            }
        }
        VerifyReport::pass(checked)
    }

    pub fn to_document(&self) -> StorageCodeDocument {
        StorageCodeDocument {
            kind: "storage".into(),
            graph: external_in_sets(self.layout.base()),
            t: self.layout.block_lengths().clone(),
            r: self.r,
            codebook: self
                .codebook
                .iter()
                .map(|&x| self.layout.unpack(x).into_iter().map(hex).collect())
                .collect(),
            recovery: self
                .recovery
                .iter()
                .map(|table| table.iter().map(|(&o, &b)| (hex(o), hex(b))).collect())
                .collect(),
        }
    }

    pub fn from_document(doc: &StorageCodeDocument, limits: &Limits) -> Result<Self> {
        if doc.kind != "storage" {
            return Err(Error::invalid(format!("expected a storage code, found {:?}", doc.kind)));
        }
        let g = internal_graph(&doc.graph)?;
        let layout = TupleLayout::new(&g, &doc.t, limits)?;
        let codebook = doc
            .codebook
            .iter()
            .map(|blocks| {
                let blocks = blocks.iter().map(|s| parse_hex(s)).collect::<Result<Vec<_>>>()?;
                layout.pack(&blocks)
            })
            .collect::<Result<Vec<_>>>()?;
        let recovery = doc
            .recovery
            .iter()
            .map(|table| {
                table
                    .iter()
                    .map(|(o, b)| Ok((parse_hex(o)?, parse_hex(b)?)))
                    .collect::<Result<BTreeMap<_, _>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StorageCode {
            layout,
            r: doc.r,
            codebook,
            recovery,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("serializable")
    }

    pub fn from_json(text: &str, limits: &Limits) -> Result<Self> {
        let doc: StorageCodeDocument =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("storage code JSON: {e}")))?;
        Self::from_document(&doc, limits)
    }
}

/// Outcome of one simulated failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Recovery {
    pub m: usize,
    /// 1-indexed failed node.
    pub node: usize,
    pub erased: String,
    pub recovered: String,
    pub ok: bool,
}

/// JSON form of a [`StorageCode`]: codewords as lists of hex blocks,
/// recovery tables keyed by hex observations, nodes 1-indexed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StorageCodeDocument {
    pub kind: String,
    pub graph: Vec<Vec<usize>>,
    pub t: BlockLengths,
    pub r: u32,
    pub codebook: Vec<Vec<String>>,
    pub recovery: Vec<BTreeMap<String, String>>,
}

/// Either kind of code, for loading a document of unknown kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Code {
    Index(IndexCode),
    Storage(StorageCode),
}

impl Code {
    pub fn from_json(text: &str, limits: &Limits) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("code JSON: {e}")))?;
        match value.get("kind").and_then(|k| k.as_str()) {
            Some("index") => IndexCode::from_json(text, limits).map(Code::Index),
            Some("storage") => StorageCode::from_json(text, limits).map(Code::Storage),
            other => Err(Error::invalid(format!("unknown code kind {other:?}"))),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            Code::Index(c) => c.to_json(),
            Code::Storage(c) => c.to_json(),
        }
    }

    pub fn verify(&self) -> VerifyReport {
        match self {
            Code::Index(c) => c.verify(),
            Code::Storage(c) => c.verify(),
        }
    }
}

/// Checks that `s` is an independent set of `Γ_t`, naming a confusable
/// pair (and the 1-indexed node) otherwise. Returns `s` sorted and deduped.
pub(crate) fn check_independent(layout: &TupleLayout, s: &[u64]) -> Result<Vec<u64>> {
    let mut set = s.to_vec();
    set.sort_unstable();
    set.dedup();
    if let Some(&x) = set.iter().find(|&&x| x >= layout.vertex_count()) {
        return Err(Error::invalid(format!("tuple {x:x} does not fit in {} bits", layout.total_bits())));
    }
    for (i, &a) in set.iter().enumerate() {
        for &b in &set[i + 1..] {
            if let Some(j) = layout.confusing_node(a, b) {
                return Err(Error::NotIndependent {
                    a: layout.format_tuple(a),
                    b: layout.format_tuple(b),
                    node: j + 1,
                });
            }
        }
    }
    Ok(set)
}

/// Checks that `s` is an independent set of `Γ_t`; returns it sorted.
pub fn check_independent_set(
    g: &SideInformationGraph,
    t: &BlockLengths,
    s: &[u64],
    limits: &Limits,
) -> Result<Vec<u64>> {
    check_independent(&TupleLayout::new(g, t, limits)?, s)
}

/// Storage code on the first `2^⌊log2 |s|⌋` members of an independent set
/// `s` of `Γ_t`, in ascending tuple order.
pub fn storage_code_from_independent_set(
    g: &SideInformationGraph,
    t: &BlockLengths,
    s: &[u64],
    limits: &Limits,
) -> Result<StorageCode> {
    let layout = TupleLayout::new(g, t, limits)?;
    let set = check_independent(&layout, s)?;
    if set.is_empty() {
        return Err(Error::invalid("independent set is empty"));
    }
    let r = usize::BITS - 1 - set.len().leading_zeros();
    let codebook: Vec<u64> = set[..1 << r].to_vec();
    let recovery = (0..layout.n())
        .map(|j| {
            codebook
                .iter()
                .map(|&x| (layout.observation(x, j), layout.block(x, j)))
                .collect()
        })
        .collect();
    let code = StorageCode {
        layout,
        r,
        codebook,
        recovery,
    };
    let report = code.verify();
    debug_assert!(report.passed, "{report:?}");
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::confusion::ConfusionGraph;
    use crate::fracchrom::chromatic_number;
    use crate::independence::confusion_independence;

    fn three_node() -> SideInformationGraph {
        SideInformationGraph::from_in_sets(vec![vec![1, 2], vec![0], vec![0, 1]]).unwrap()
    }

    fn ones(n: usize) -> BlockLengths {
        BlockLengths::uniform(n, 1)
    }

    fn lim() -> Limits {
        Limits::default()
    }

    fn optimal_index_code(g: &SideInformationGraph, t: &BlockLengths) -> IndexCode {
        let cg = ConfusionGraph::new(g, t, &lim()).unwrap();
        let coloring = chromatic_number(&cg.to_explicit(&lim()).unwrap(), &lim()).unwrap();
        index_code_from_coloring(g, t, &coloring, &lim()).unwrap()
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!([0, 1, 2, 3, 4, 5, 8, 9].map(ceil_log2), [0, 0, 1, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn three_node_index_code() {
        let code = optimal_index_code(&three_node(), &ones(3));
        assert_eq!(code.r, 2);
        let report = code.verify();
        assert!(report.passed);
        assert_eq!(report.checked, 8 * 3);
    }

    #[test]
    fn parity_index_code_for_complete_graph() {
        let g = SideInformationGraph::complete(3);
        let parity = Coloring {
            colors: (0..8u32).map(|x| (x.count_ones() % 2) as usize).collect(),
            count: 2,
        };
        let code = index_code_from_coloring(&g, &ones(3), &parity, &lim()).unwrap();
        assert_eq!(code.r, 1);
        assert!(code.verify().passed);
        // Node 1 sees x2 = 1, x3 = 0 and hears parity 0, so x1 = 1.
        assert_eq!(code.decode(0, 0, 0b10), Some(1));
    }

    #[test]
    fn single_node_sends_the_bit() {
        let code = optimal_index_code(&SideInformationGraph::edgeless(1), &ones(1));
        assert_eq!(code.r, 1);
        assert!(code.verify().passed);
    }

    #[test]
    fn improper_coloring_is_rejected() {
        let bad = Coloring {
            colors: vec![0; 8],
            count: 1,
        };
        let err = index_code_from_coloring(&three_node(), &ones(3), &bad, &lim()).unwrap_err();
        assert!(matches!(err, Error::ImproperColoring { .. }), "{err}");
    }

    #[test]
    fn corrupted_decoder_is_caught() {
        let mut code = optimal_index_code(&three_node(), &ones(3));
        let (key, value) = code.decoders[1].iter().next().map(|(k, v)| (*k, *v)).unwrap();
        code.decoders[1].insert(key, value ^ 1);
        let report = code.verify();
        assert!(!report.passed);
        assert!(matches!(report.counterexample, Some(Counterexample::Decode { node: 2, .. })));
    }

    #[test]
    fn three_node_storage_code() {
        let code = storage_code_from_independent_set(&three_node(), &ones(3), &[0b000, 0b111], &lim()).unwrap();
        assert_eq!(code.r, 1);
        assert!(code.verify().passed);
        // f_1 maps x2 x3 = 00 to 0 and 11 to 1.
        assert_eq!(code.recovery[0], BTreeMap::from([(0b00, 0), (0b11, 1)]));
        let rec = code.simulate_failure(1, 1).unwrap();
        assert_eq!(rec.recovered, "1");
        assert!(rec.ok);
    }

    #[test]
    fn parity_storage_code_recovers_every_failure() {
        let g = SideInformationGraph::complete(3);
        let even: Vec<u64> = (0..8u64).filter(|x| x.count_ones() % 2 == 0).collect();
        let code = storage_code_from_independent_set(&g, &ones(3), &even, &lim()).unwrap();
        assert_eq!(code.r, 2);
        for m in 0..4 {
            for j in 0..3 {
                let rec = code.simulate_failure(m, j).unwrap();
                assert!(rec.ok);
                // Each block is the XOR of the other two.
                let x = code.codebook[m];
                let others = (0..3).filter(|&i| i != j).map(|i| code.layout().block(x, i)).fold(0, |a, b| a ^ b);
                assert_eq!(rec.recovered, others.to_string());
            }
        }
        assert!(code.simulate_failure(4, 0).is_err());
    }

    #[test]
    fn trivial_storage_codes() {
        let code = storage_code_from_independent_set(&three_node(), &ones(3), &[0], &lim()).unwrap();
        assert_eq!(code.r, 0);
        assert_eq!(code.codebook, vec![0]);
        assert!(code.verify().passed);
        let g = SideInformationGraph::edgeless(2);
        let code = storage_code_from_independent_set(&g, &BlockLengths::new(vec![1, 0]), &[1], &lim()).unwrap();
        let rec = code.simulate_failure(0, 1).unwrap();
        assert_eq!(rec.erased, "-");
        assert!(rec.ok);
    }

    #[test]
    fn dependent_sets_are_rejected() {
        let err = storage_code_from_independent_set(&three_node(), &ones(3), &[0b000, 0b100], &lim()).unwrap_err();
        assert_eq!(
            err,
            Error::NotIndependent {
                a: "000".into(),
                b: "100".into(),
                node: 1
            }
        );
    }

    #[test]
    fn inserted_confusable_pair_is_caught() {
        let mut code = storage_code_from_independent_set(&three_node(), &ones(3), &[0b000, 0b111], &lim()).unwrap();
        code.codebook[1] = 0b001;
        let report = code.verify();
        assert_eq!(
            report.counterexample,
            Some(Counterexample::ConfusablePair {
                a: "000".into(),
                b: "001".into(),
                node: 3
            })
        );
    }

    #[test]
    fn maximum_independent_set_gives_floor_log_alpha() {
        for (g, t) in [(three_node(), BlockLengths::new(vec![2, 1, 2])), (SideInformationGraph::bidirected_cycle(5), ones(5))] {
            let cg = ConfusionGraph::new(&g, &t, &lim()).unwrap();
            let cert = confusion_independence(&cg, &lim()).unwrap();
            let s: Vec<u64> = cert.witness.iter().map(|&v| v as u64).collect();
            let code = storage_code_from_independent_set(&g, &t, &s, &lim()).unwrap();
            assert_eq!(code.r, usize::BITS - 1 - cert.alpha.leading_zeros());
            // The codebook of a verified code is independent in Γ_t.
            assert!(check_independent(code.layout(), &code.codebook).is_ok());
        }
    }

    #[test]
    fn json_round_trips_bit_exactly() {
        let index = optimal_index_code(&three_node(), &BlockLengths::new(vec![1, 2, 1]));
        let back = IndexCode::from_json(&index.to_json(), &lim()).unwrap();
        assert_eq!(back, index);
        assert_eq!(back.to_json(), index.to_json());

        let g = SideInformationGraph::complete(3);
        let even: Vec<u64> = (0..8u64).filter(|x| x.count_ones() % 2 == 0).collect();
        let storage = storage_code_from_independent_set(&g, &ones(3), &even, &lim()).unwrap();
        let back = StorageCode::from_json(&storage.to_json(), &lim()).unwrap();
        assert_eq!(back, storage);
        match Code::from_json(&storage.to_json(), &lim()).unwrap() {
            Code::Storage(c) => assert_eq!(c, storage),
            Code::Index(_) => panic!("wrong kind"),
        }
        assert!(Code::from_json("{\"kind\":\"other\"}", &lim()).is_err());
    }
}
