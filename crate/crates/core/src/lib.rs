//! Shared primitives for the ledgergraph workspace.
//!
//! Every chain model (UTXO, account, credit network, tangle) builds on the
//! types here: opaque address identifiers, exact integer amounts in the
//! smallest subunit of their currency, and the uniform containers used to
//! export every graph the workspace can build.

pub mod address;
pub mod amount;
pub mod export;
pub mod graph;
pub mod rng;
pub mod stats;

pub use address::{AddressError, AddressId, AddressKind, ChainTag};
pub use amount::{convert_unit, Amount, AmountError, Family, IssuedCurrency, Unit};
pub use export::{
    export_edge_list, export_hypergraph, write_matrix_csv, ExportError, ExportFormat,
};
pub use graph::{Edge, EdgeList, GraphError, GraphView, Hyperedge, Hypergraph, ToEdgeList, Weight};
pub use stats::{graph_stats, GraphStats};

/// Exact rational used for edge weights that are products of ratios.
pub type Rational = num_rational::Ratio<i128>;

/// Transaction identifier. Treated as an opaque string.
#[derive(
    Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(transparent)]
pub struct TxId(pub String);

impl TxId {
    pub fn new(id: impl Into<String>) -> Self {
        TxId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for TxId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TxId {
    fn from(s: &str) -> Self {
        TxId(s.to_string())
    }
}
