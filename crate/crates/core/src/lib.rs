//! Exact enumeration of graded (3+1)-avoiding posets.
//!
//! Modules, bottom up:
//! - [`poset`]: labeled posets, rank functions, seeing classes, pattern search;
//! - [`structure`]: trimming, ordinal sums, quark decompositions and words;
//! - [`series`]: exact truncated power series in `x`, `z`, `t`;
//! - [`genfun`]: quark counts and the generating-function pipelines;
//! - [`oracle`]: exhaustive enumeration used as ground truth;
//! - [`asymptotics`]: `ψ_n`, theta constants and ratio diagnostics;
//! - [`exchange`]: the JSON poset format and DOT export.

pub mod asymptotics;
pub mod exchange;
pub mod genfun;
pub mod oracle;
pub mod poset;
pub mod series;
pub mod structure;

pub use poset::{Poset, PosetError, RankedPoset, SeeingClass};
pub use series::{Bounds, SeriesError, SeriesMatrix, TruncatedSeries};
pub use structure::{BType, Join, LegalityMode, Quark, QuarkRole, StructureError, TrimmedPoset, Word};
