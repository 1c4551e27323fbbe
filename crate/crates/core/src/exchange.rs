//! Text exchange format for posets and Graphviz export of Hasse diagrams.
//!
//! The exchange format is a JSON object `{"n": 4, "relations": [[1, 2], ...]}`
//! whose pairs are 1-based and mean `a < b`. Loading takes the transitive
//! closure and then validates the result.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poset::{bits, Poset, PosetError, RankedPoset};

#[derive(Debug, Error)]
pub enum ExchangeError {
    #[error("malformed poset document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("relation [{a}, {b}] is outside 1..={n}")]
    OutOfRange { a: usize, b: usize, n: usize },
    #[error(transparent)]
    Poset(#[from] PosetError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetDocument {
    pub n: usize,
    pub relations: Vec<[usize; 2]>,
}

impl PosetDocument {
    /// Cover relations of `p`, 1-based, in lexicographic order.
    pub fn from_poset(p: &Poset) -> Self {
        let covers = p.cover_rows();
        let relations = (0..p.len()).flat_map(|a| bits(covers[a]).map(move |b| [a + 1, b + 1])).collect();
        PosetDocument { n: p.len(), relations }
    }

    pub fn to_poset(&self) -> Result<Poset, ExchangeError> {
        let mut pairs = Vec::with_capacity(self.relations.len());
        for &[a, b] in &self.relations {
            if a == 0 || b == 0 || a > self.n || b > self.n {
                return Err(ExchangeError::OutOfRange { a, b, n: self.n });
            }
            pairs.push((a - 1, b - 1));
        }
        Ok(Poset::from_relations(self.n, &pairs)?)
    }
}

pub fn parse_poset(text: &str) -> Result<Poset, ExchangeError> {
    serde_json::from_str::<PosetDocument>(text)?.to_poset()
}

pub fn write_poset(p: &Poset) -> String {
    serde_json::to_string(&PosetDocument::from_poset(p)).expect("plain data serializes")
}

/// Hasse diagram as a DOT digraph: cover edges only, one `rank=same`
/// subgraph per rank when a rank function exists. Vertices are 1-based.
pub fn to_dot(p: &Poset) -> String {
    let mut out = String::from("digraph poset {\n  rankdir=BT;\n  node [shape=circle];\n");
    match RankedPoset::from_poset(p.clone()) {
        Some(r) => {
            for (i, set) in r.rank_sets().into_iter().enumerate() {
                let names: Vec<String> = bits(set).map(|v| (v + 1).to_string()).collect();
                let _ = writeln!(out, "  {{ rank=same; {}; }} // rank {i}", names.join("; "));
            }
        }
        None => {
            for v in 0..p.len() {
                let _ = writeln!(out, "  {};", v + 1);
            }
        }
    }
    let covers = p.cover_rows();
    for a in 0..p.len() {
        for b in bits(covers[a]) {
            let _ = writeln!(out, "  {} -> {};", a + 1, b + 1);
        }
    }
    out.push_str("}\n");
    out
}
