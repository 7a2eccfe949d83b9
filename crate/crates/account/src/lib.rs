//! Account-model ledgers: transaction multigraphs with nonce ordering, token
//! networks and call-trace hypergraphs.

mod graph;
mod model;
mod nonce;
mod scenario;
mod token;
mod trace;

pub use graph::{build_account_graph, net_flows};
pub use model::{parse_account_jsonl, AccountError, AccountTx, AccountTxRecord, ReceiverKind};
pub use nonce::{validate_nonce_order, NonceIssue, NonceReport};
pub use scenario::{parse_scenario, Scenario};
pub use token::{
    build_token_graph, deploy_token, execute_token_transfer, shared_traders, AddressDeriver,
    InternalTransfer, Sha256Deriver, TokenContract, TokenError, TokenRegistry,
};
pub use trace::{
    build_trace_hypergraph, Action, CallKind, Trace, TraceExecutor, TraceStep, DEFAULT_STEP_BUDGET,
};
