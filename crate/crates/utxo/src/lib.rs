//! UTXO ledgers: validation, coin lineage, privacy overlays, transaction and
//! address graphs, chainlet matrices and a synthetic generator.

pub mod chainlets;
pub mod generator;
pub mod graphs;
pub mod ingest;
pub mod ledger;
pub mod lineage;
pub mod model;
pub mod overlay;

pub use chainlets::{
    aggregate_timeseries, amount_matrix, classify_first_order, extract_k_chainlets,
    extreme_chainlet_report, occurrence_matrix, ChainletClass, ChainletError, ChainletMatrix,
    ExtremePattern, Snapshot, SnapshotTx,
};
pub use generator::{generate_blocks, generate_ledger, GenError, UtxoGenConfig};
pub use graphs::{
    build_address_graph, build_incidence_graph, build_transaction_graph, AddressGraph,
    AddressGraphOptions, GraphBuildError, TransactionGraph,
};
pub use ingest::{load_ledger, parse_jsonl, write_jsonl, IngestError};
pub use ledger::{
    validate_coinbase, validate_transaction, Ledger, LedgerConfig, SubsidySchedule, UtxoError,
    UtxoView,
};
pub use lineage::{lineage_path_count, trace_lineage};
pub use model::{Block, OutPoint, RingInput, ShieldKind, ShieldKinds, TxOut, UtxoTransaction};
pub use overlay::{build_ring_input, classify_zcash_tx, OverlayError, ZcashClass};
