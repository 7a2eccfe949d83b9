use crate::generate::Chain;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "ledgergraph",
    version,
    about = "Build graphs, matrices and replays from ledger data"
)]
pub struct Cli {
    /// Flat key = value settings file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    pub format: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// UTXO ledgers.
    #[command(subcommand)]
    Utxo(UtxoCmd),
    /// Occurrence and amount matrices of a UTXO ledger.
    Chainlet(ChainletArgs),
    /// Account-model ledgers.
    #[command(subcommand)]
    Account(AccountCmd),
    /// Credit-network ledgers.
    #[command(subcommand)]
    Ripple(RippleCmd),
    /// Tangle ledgers.
    #[command(subcommand)]
    Iota(IotaCmd),
    /// Write a synthetic ledger.
    Generate(GenerateArgs),
    /// Apply a JSONL command script and log every transition.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    Tx,
    Address,
    Incidence,
    All,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    /// First block height (inclusive).
    #[arg(long)]
    pub from: Option<u64>,
    /// Last block height (inclusive).
    #[arg(long)]
    pub to: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum UtxoCmd {
    /// Check every block and report totals.
    Validate { input: PathBuf },
    /// Export transaction, address and incidence graphs.
    Graph {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        kind: GraphKind,
        #[command(flatten)]
        range: RangeArgs,
        /// Draw coinbase outputs from a virtual COINBASE node.
        #[arg(long)]
        coinbase_source: bool,
    },
}

#[derive(Debug, Args)]
pub struct ChainletArgs {
    pub input: PathBuf,
    #[arg(long, short = 'N', alias = "N")]
    pub n: Option<usize>,
    /// Blocks per window for the share time series.
    #[arg(long)]
    pub window: Option<u64>,
    /// Add the coinbase row to both matrices.
    #[arg(long)]
    pub coinbase: bool,
    #[command(flatten)]
    pub range: RangeArgs,
}

#[derive(Debug, Subcommand)]
pub enum AccountCmd {
    /// Transaction multigraph and net flows.
    Graph {
        input: PathBuf,
        /// Treat the input as a scenario with contract scripts.
        #[arg(long)]
        scenario: bool,
    },
    /// Token contracts from a deploy/transfer JSONL.
    Tokens { input: PathBuf },
    /// Call traces of a scenario as a hypergraph.
    Traces { input: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum RippleCmd {
    /// Load a trust-line CSV and export its graph.
    Trust { trust: PathBuf },
    /// Apply payment specs against a trust-line CSV.
    Pay { trust: PathBuf, payments: PathBuf },
    /// Replay a command script and export the resulting order book.
    Offers {
        script: PathBuf,
        #[arg(long)]
        trust: Option<PathBuf>,
    },
    /// Per-currency positions and graph statistics.
    Report { trust: PathBuf },
}

#[derive(Debug, Args)]
pub struct TipArgs {
    /// uniform or oldest.
    #[arg(long)]
    pub tip_strategy: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum IotaCmd {
    /// Addresses from a seed.
    Derive {
        /// 81-tryte seed; drawn from the run seed when absent.
        #[arg(long)]
        seed_trytes: Option<String>,
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 2)]
        level: u8,
    },
    /// Replay a tangle script and list its bundles.
    Bundle { script: PathBuf },
    /// Replay a tangle script, then attach zero-value messages.
    Grow {
        script: PathBuf,
        #[arg(long, default_value_t = 0)]
        messages: usize,
        #[command(flatten)]
        tips: TipArgs,
    },
    /// Replay a tangle script, then issue one milestone over selected tips.
    Milestone {
        script: PathBuf,
        #[command(flatten)]
        tips: TipArgs,
    },
    /// Replay a tangle script, then prune it to a snapshot.
    Snapshot { script: PathBuf },
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub chain: Chain,
    /// Transactions (or payments, or transfers) to generate.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub txs_per_block: Option<usize>,
    #[arg(long)]
    pub split_bias: Option<f64>,
    #[arg(long)]
    pub reuse_probability: Option<f64>,
    #[arg(long)]
    pub rings: bool,
    #[arg(long)]
    pub shielded: bool,
    #[arg(long)]
    pub trust_density: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReplayChain {
    Ripple,
    Iota,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long, value_enum)]
    pub chain: ReplayChain,
    pub script: PathBuf,
    /// Trust-line CSV loaded before a ripple script.
    #[arg(long)]
    pub trust: Option<PathBuf>,
    #[command(flatten)]
    pub tips: TipArgs,
}
