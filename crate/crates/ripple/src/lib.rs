//! Credit-network ledger: trust lines stored as canonical per-pair records,
//! payments that ripple along chains of trust, an exchange order book,
//! checks and escrows.

mod deferred;
mod io;
mod ledger;
mod offers;
mod payment;
mod script;
mod state;

pub use deferred::{Check, Escrow};
pub use io::{
    build_path_hypergraph, build_payment_graph, build_trust_graph, load_trust_csv, parse_payments,
    read_trust_csv, write_trust_csv, RippleIoError, TrustRow,
};
pub use ledger::{
    OfferOutcome, RippleAccount, RippleConfig, RippleError, RippleLedger, DROPS_PER_XRP,
};
pub use offers::{fill_amounts, residual_offer, Asset, Fill, MatchResult, Offer, OrderBook};
pub use payment::{PaymentOutcome, PaymentSpec};
pub use script::{apply_command, parse_command, replay, AccountFlags, AssetAmount, Command, Event};
pub use state::{canonical_pair, infer_issuer, state_key, IssuerSide, RippleState, StateKey};
