//! Tangle ledger mechanics: a balanced-ternary codec, seed to address
//! derivation over a pluggable sponge, bundle construction, tangle growth
//! with toy proof of work, milestone confirmation with double-spend
//! invalidation, promotion and snapshots.

mod bundle;
mod derive;
mod error;
mod io;
mod script;
pub mod sponge;
mod tangle;
pub mod trytes;

pub use bundle::{
    build_bundle, Bundle, BundleInput, BundleOutput, TangleTransaction, TxKind, TAG_TRYTES,
};
pub use derive::{
    add_checksum, address_from_seed, checksum, derive_address, derive_private_key, derive_subseed,
    verify_checksum, SecurityLevel, Seed, CHECKSUM_TRYTES, FRAGMENT_TRYTES, MAX_INDEX,
    SEGMENT_HASH_ROUNDS,
};
pub use error::IotaError;
pub use io::{build_tangle_graph, read_tangle_csv, tangle_rows, write_tangle_csv, TangleRow};
pub use script::{
    parse_tangle_command, replay_tangle, InputSpec, OutputSpec, TangleCommand, TangleEvent,
    TangleScenario,
};
pub use sponge::{MixSponge, Sponge};
pub use tangle::{
    do_pow, transaction_hash, MilestoneReport, TangleState, TipStrategy, DEFAULT_DIFFICULTY,
    DEFAULT_POW_BUDGET,
};
pub use trytes::{decode_trytes, encode_trytes, Trit};
