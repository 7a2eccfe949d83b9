//! Subcommand implementations. Each writes its artifacts through [`Output`]
//! and returns a JSON summary.

use crate::cli::*;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::generate::generate;
use crate::output::Output;
use ledgergraph_account::{
    build_account_graph, build_token_graph, build_trace_hypergraph, deploy_token, net_flows,
    parse_account_jsonl, parse_scenario, shared_traders, AccountTx, Sha256Deriver, TokenRegistry,
    Trace,
};
use ledgergraph_core::{
    graph_stats, AddressId, EdgeList, ExportFormat, GraphStats, ToEdgeList, TxId,
};
use ledgergraph_iota::{
    address_from_seed, build_tangle_graph, replay_tangle, tangle_rows, write_tangle_csv, MixSponge,
    SecurityLevel, Seed, TangleEvent, TangleScenario, TangleState,
};
use ledgergraph_ripple::{
    build_path_hypergraph, build_payment_graph, build_trust_graph, load_trust_csv, parse_payments,
    replay, write_trust_csv, RippleConfig, RippleLedger,
};
use ledgergraph_utxo::{
    aggregate_timeseries, amount_matrix, build_address_graph, build_incidence_graph,
    build_transaction_graph, extreme_chainlet_report, load_ledger, occurrence_matrix,
    AddressGraphOptions, ExtremePattern, GraphBuildError, Ledger, LedgerConfig, Snapshot,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::io::BufReader;
use std::path::Path;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::io("cli.io", format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<std::fs::File>, CliError> {
    std::fs::File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io("cli.io", format!("{}: {e}", path.display())))
}

pub fn stats_json(s: &GraphStats) -> Value {
    json!({
        "nodes": s.nodes,
        "edges": s.edges,
        "self_loops": s.self_loops,
        "components": s.components,
        "triangles": s.triangles,
        "degree_distribution": s.degree_distribution.iter().map(|(d, c)| (d.to_string(), json!(c))).collect::<serde_json::Map<_, _>>(),
    })
}

pub fn run_command(cmd: &Command, cfg: &RunConfig, out: &mut Output) -> Result<Value, CliError> {
    match cmd {
        Command::Utxo(UtxoCmd::Validate { input }) => utxo_validate(input),
        Command::Utxo(UtxoCmd::Graph {
            input,
            kind,
            range,
            coinbase_source,
        }) => utxo_graph(input, *kind, range, *coinbase_source, out),
        Command::Chainlet(a) => chainlet(a, cfg, out),
        Command::Account(AccountCmd::Graph { input, scenario }) => {
            account_graph(input, *scenario, out)
        }
        Command::Account(AccountCmd::Tokens { input }) => account_tokens(input, out),
        Command::Account(AccountCmd::Traces { input }) => account_traces(input, out),
        Command::Ripple(RippleCmd::Trust { trust }) => ripple_trust(trust, out),
        Command::Ripple(RippleCmd::Pay { trust, payments }) => ripple_pay(trust, payments, out),
        Command::Ripple(RippleCmd::Offers { script, trust }) => {
            ripple_offers(script, trust.as_deref(), out)
        }
        Command::Ripple(RippleCmd::Report { trust }) => ripple_report(trust, out),
        Command::Iota(c) => iota(c, cfg, out),
        Command::Generate(a) => gen(a, cfg, out),
        Command::Replay(a) => replay_cmd(a, cfg, out),
    }
}

// ---- utxo ----

fn load_utxo(input: &Path) -> Result<Ledger, CliError> {
    Ok(load_ledger(open(input)?, LedgerConfig::default())?)
}

fn utxo_validate(input: &Path) -> Result<Value, CliError> {
    let l = load_utxo(input)?;
    Ok(json!({
        "blocks": l.blocks().len(),
        "transactions": l.transactions().count(),
        "supply": l.supply().to_string(),
        "unspent_outputs": l.unspent_outpoints().len(),
        "unspent_value": l.unspent_value().to_string(),
        "fees": l.reports().iter().flat_map(|r| r.tx_fees.iter().map(|(_, f)| *f)).sum::<i128>().to_string(),
    }))
}

fn range_of(l: &Ledger, r: &RangeArgs) -> (u64, u64) {
    (r.from.unwrap_or(0), r.to.or(l.tip_height()).unwrap_or(0))
}

/// An empty range exports an empty graph instead of failing.
fn or_empty<G>(
    res: Result<G, GraphBuildError>,
    directed_multi: (bool, bool),
) -> Result<EdgeList, CliError>
where
    G: ToEdgeList,
{
    match res {
        Ok(g) => Ok(g.to_edge_list()),
        Err(GraphBuildError::EmptyRange { .. }) => {
            Ok(EdgeList::new(directed_multi.0, directed_multi.1))
        }
        Err(e) => Err(e.into()),
    }
}

fn utxo_graph(
    input: &Path,
    kind: GraphKind,
    range: &RangeArgs,
    coinbase_source: bool,
    out: &mut Output,
) -> Result<Value, CliError> {
    let l = load_utxo(input)?;
    let (from, to) = range_of(&l, range);
    let opts = AddressGraphOptions { coinbase_source };
    let mut summary = serde_json::Map::new();
    if matches!(kind, GraphKind::Tx | GraphKind::All) {
        let g = or_empty(build_transaction_graph(&l, from, to), (true, false))?;
        out.edges("transaction_graph", &g)?;
        summary.insert("transaction_graph".into(), stats_json(&graph_stats(&g)));
    }
    if matches!(kind, GraphKind::Address | GraphKind::All) {
        let g = or_empty(build_address_graph(&l, from, to, opts), (true, true))?;
        out.edges("address_graph", &g)?;
        summary.insert("address_graph".into(), stats_json(&graph_stats(&g)));
    }
    if matches!(kind, GraphKind::Incidence | GraphKind::All) {
        let g = or_empty(build_incidence_graph(&l, from, to, opts), (true, true))?;
        out.edges("incidence_graph", &g)?;
        summary.insert("incidence_graph".into(), stats_json(&graph_stats(&g)));
    }
    summary.insert("from".into(), json!(from));
    summary.insert("to".into(), json!(to));
    Ok(Value::Object(summary))
}

#[derive(Serialize)]
struct ExtremeRow {
    txid: String,
    x: usize,
    y: usize,
    output_total: String,
    pattern: &'static str,
}

#[derive(Serialize)]
struct ShareRow {
    window: usize,
    merge: f64,
    transition: f64,
    split: f64,
    counted: usize,
}

fn chainlet(a: &ChainletArgs, cfg: &RunConfig, out: &mut Output) -> Result<Value, CliError> {
    let l = load_utxo(&a.input)?;
    let (from, to) = range_of(&l, &a.range);
    let snap = Snapshot::from_ledger(&l, from, to)?;
    let n = cfg.n;
    let occ = occurrence_matrix(&snap, n, a.coinbase)?;
    let amt = amount_matrix(&snap, n, a.coinbase)?;
    if a.coinbase {
        out.matrix("occurrence", &occ.rows_with_coinbase())?;
        out.matrix("amount", &amt.rows_with_coinbase())?;
    } else {
        out.matrix("occurrence", &occ.rows())?;
        out.matrix("amount", &amt.rows())?;
    }
    let extreme: Vec<ExtremeRow> = extreme_chainlet_report(&snap, n)?
        .into_iter()
        .map(|e| ExtremeRow {
            txid: e.txid.0,
            x: e.x,
            y: e.y,
            output_total: e.output_total.to_string(),
            pattern: match e.pattern {
                ExtremePattern::Sell => "sell",
                ExtremePattern::Buy => "buy",
                ExtremePattern::Large => "large",
            },
        })
        .collect();
    out.table(
        "extreme",
        &["txid", "x", "y", "output_total", "pattern"],
        &extreme,
    )?;
    let windows = if cfg.window == 0 {
        if snap.is_empty() {
            Vec::new()
        } else {
            vec![snap.clone()]
        }
    } else {
        Snapshot::windows(&l, cfg.window)?
    };
    let shares: Vec<ShareRow> = aggregate_timeseries(&windows)
        .into_iter()
        .enumerate()
        .map(|(i, s)| ShareRow {
            window: i,
            merge: s.merge,
            transition: s.transition,
            split: s.split,
            counted: s.counted,
        })
        .collect();
    out.table(
        "shares",
        &["window", "merge", "transition", "split", "counted"],
        &shares,
    )?;
    Ok(json!({
        "n": n,
        "transactions": snap.len(),
        "occurrence_total": occ.total(),
        "amount_total": amt.total().to_string(),
        "extreme": extreme.len(),
        "windows": shares.len(),
    }))
}

// ---- account ----

#[derive(Serialize)]
struct FlowRow {
    address: String,
    net: String,
}

fn account_graph(input: &Path, scenario: bool, out: &mut Output) -> Result<Value, CliError> {
    let text = read_text(input)?;
    let (txs, traces): (Vec<AccountTx>, Vec<Trace>) = if scenario {
        let sc = parse_scenario(&text)?;
        let traces = sc.traces();
        (sc.txs, traces)
    } else {
        (parse_account_jsonl(&text)?, Vec::new())
    };
    let g = build_account_graph(&txs, &traces)?;
    out.edges("account_graph", &g)?;
    let flows: Vec<FlowRow> = net_flows(&txs)
        .into_iter()
        .map(|(address, net)| FlowRow {
            address,
            net: net.to_string(),
        })
        .collect();
    out.table("net_flows", &["address", "net"], &flows)?;
    Ok(json!({"transactions": txs.len(), "graph": stats_json(&graph_stats(&g))}))
}

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
enum TokenOp {
    Deploy {
        owner: String,
        symbol: String,
        #[serde(default)]
        decimals: u8,
        supply: u64,
        #[serde(default)]
        nonce: u64,
    },
    Transfer {
        /// Symbol of a deployed token, or its contract address.
        token: String,
        from: String,
        to: String,
        amount: u64,
        #[serde(default)]
        tx: Option<String>,
    },
}

#[derive(Serialize)]
struct HolderRow {
    token: String,
    symbol: String,
    holder: String,
    balance: String,
}

#[derive(Serialize)]
struct SharedRow {
    trader: String,
    tokens: String,
}

fn account_tokens(input: &Path, out: &mut Output) -> Result<Value, CliError> {
    let text = read_text(input)?;
    let mut reg = TokenRegistry::default();
    let mut by_symbol: BTreeMap<String, String> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let op: TokenOp = serde_json::from_str(line)
            .map_err(|e| CliError::validation("account.parse", format!("line {}: {e}", i + 1)))?;
        match op {
            TokenOp::Deploy {
                owner,
                symbol,
                decimals,
                supply,
                nonce,
            } => {
                let owner =
                    AddressId::eoa(owner).map_err(|e| CliError::validation("account.parse", e))?;
                let c = deploy_token(
                    &Sha256Deriver,
                    &owner,
                    &symbol,
                    decimals,
                    u128::from(supply),
                    nonce,
                )?;
                let addr = reg.deploy(c)?.address.clone();
                by_symbol.entry(symbol).or_insert(addr);
            }
            TokenOp::Transfer {
                token,
                from,
                to,
                amount,
                tx,
            } => {
                let addr = by_symbol.get(&token).cloned().unwrap_or(token);
                let tx = TxId::new(tx.unwrap_or_else(|| format!("line{}", i + 1)));
                reg.transfer(&addr, &from, &to, u128::from(amount), &tx)?;
            }
        }
    }
    let mut g = EdgeList::new(true, true);
    for addr in reg.contracts.keys() {
        for e in build_token_graph(&reg.transfers, addr).edges() {
            g.push(e.clone()).expect("multigraph");
        }
    }
    out.edges("token_graph", &g)?;
    let holders: Vec<HolderRow> = reg
        .contracts
        .values()
        .flat_map(|c| {
            c.balances.iter().map(|(h, b)| HolderRow {
                token: c.address.clone(),
                symbol: c.symbol.clone(),
                holder: h.clone(),
                balance: b.to_string(),
            })
        })
        .collect();
    out.table(
        "token_balances",
        &["token", "symbol", "holder", "balance"],
        &holders,
    )?;
    let shared: Vec<SharedRow> = shared_traders(&reg.transfers)
        .into_iter()
        .map(|(trader, tokens)| SharedRow {
            trader,
            tokens: tokens.into_iter().collect::<Vec<_>>().join(";"),
        })
        .collect();
    out.table("shared_traders", &["trader", "tokens"], &shared)?;
    Ok(
        json!({"tokens": reg.contracts.len(), "transfers": reg.transfers.len(), "shared_traders": shared.len()}),
    )
}

#[derive(Serialize)]
struct StepRow {
    tx: String,
    step: usize,
    depth: usize,
    kind: &'static str,
    caller: String,
    callee: String,
    value: String,
}

fn account_traces(input: &Path, out: &mut Output) -> Result<Value, CliError> {
    let sc = parse_scenario(&read_text(input)?)?;
    let traces = sc.traces();
    let h = build_trace_hypergraph(&traces);
    out.hyperedges("trace_hypergraph", &h)?;
    let steps: Vec<StepRow> = traces
        .iter()
        .flat_map(|t| {
            t.steps.iter().enumerate().map(|(i, s)| StepRow {
                tx: t.root_tx.0.clone(),
                step: i,
                depth: s.depth,
                kind: s.kind.as_str(),
                caller: s.caller.clone(),
                callee: s.callee.clone(),
                value: s.value.to_string(),
            })
        })
        .collect();
    out.table(
        "trace_steps",
        &["tx", "step", "depth", "kind", "caller", "callee", "value"],
        &steps,
    )?;
    Ok(json!({
        "transactions": sc.txs.len(),
        "hyperedges": h.hyperedges.len(),
        "truncated": traces.iter().filter(|t| t.truncated).count(),
    }))
}

// ---- ripple ----

fn load_trust(path: &Path) -> Result<RippleLedger, CliError> {
    let mut l = RippleLedger::new(RippleConfig::default());
    load_trust_csv(open(path)?, &mut l)?;
    Ok(l)
}

#[derive(Serialize)]
struct AccountRow {
    address: String,
    xrp_balance: String,
    owned_objects: u32,
}

#[derive(Serialize)]
struct OfferRow {
    owner: String,
    sequence: u64,
    gets_asset: String,
    gets: String,
    pays_asset: String,
    pays: String,
}

fn ripple_state(l: &RippleLedger, out: &mut Output) -> Result<(), CliError> {
    out.file("trust_lines.csv", |w| Ok(write_trust_csv(l, w)?))?;
    let accounts: Vec<AccountRow> = l
        .accounts()
        .map(|a| AccountRow {
            address: a.address.clone(),
            xrp_balance: a.xrp_balance.to_string(),
            owned_objects: a.owned_objects,
        })
        .collect();
    out.table(
        "accounts",
        &["address", "xrp_balance", "owned_objects"],
        &accounts,
    )?;
    let offers: Vec<OfferRow> = l
        .book()
        .offers()
        .iter()
        .map(|o| OfferRow {
            owner: o.owner.clone(),
            sequence: o.sequence,
            gets_asset: o.gets_asset.to_string(),
            gets: o.gets.to_string(),
            pays_asset: o.pays_asset.to_string(),
            pays: o.pays.to_string(),
        })
        .collect();
    out.table(
        "offers",
        &[
            "owner",
            "sequence",
            "gets_asset",
            "gets",
            "pays_asset",
            "pays",
        ],
        &offers,
    )
}

fn ripple_trust(trust: &Path, out: &mut Output) -> Result<Value, CliError> {
    let l = load_trust(trust)?;
    let g = build_trust_graph(&l);
    out.edges("trust_graph", &g)?;
    out.file("trust_lines.csv", |w| Ok(write_trust_csv(&l, w)?))?;
    Ok(
        json!({"accounts": l.accounts().count(), "lines": l.states().count(), "graph": stats_json(&graph_stats(&g))}),
    )
}

fn ripple_pay(trust: &Path, payments: &Path, out: &mut Output) -> Result<Value, CliError> {
    let mut l = load_trust(trust)?;
    let specs = parse_payments(&read_text(payments)?)?;
    let mut settled = Vec::new();
    let mut events = Vec::new();
    for (i, spec) in specs.into_iter().enumerate() {
        let before = l.clone();
        match l.pay(&spec) {
            Ok(o) => {
                events.push(json!({"payment": i, "ok": true, "delivered": o.delivered.to_string(), "path": o.path}));
                settled.push((spec, o));
            }
            Err(e) => {
                l = before;
                events.push(
                    json!({"payment": i, "ok": false, "error": e.code(), "message": e.to_string()}),
                );
            }
        }
    }
    out.edges("payment_graph", &build_payment_graph(&settled))?;
    out.hyperedges("payment_paths", &build_path_hypergraph(&settled))?;
    out.jsonl("events.jsonl", &events)?;
    out.file("trust_lines.csv", |w| Ok(write_trust_csv(&l, w)?))?;
    Ok(
        json!({"payments": events.len(), "settled": settled.len(), "rejected": events.len() - settled.len()}),
    )
}

fn ripple_offers(script: &Path, trust: Option<&Path>, out: &mut Output) -> Result<Value, CliError> {
    let mut l = match trust {
        Some(t) => load_trust(t)?,
        None => RippleLedger::new(RippleConfig::default()),
    };
    let events = replay(&mut l, &read_text(script)?)?;
    out.jsonl("events.jsonl", &events)?;
    ripple_state(&l, out)?;
    Ok(json!({
        "commands": events.len(),
        "rejected": events.iter().filter(|e| !e.ok).count(),
        "resting_offers": l.book().offers().len(),
    }))
}

#[derive(Serialize)]
struct PositionRow {
    currency: String,
    account: String,
    net: String,
}

fn ripple_report(trust: &Path, out: &mut Output) -> Result<Value, CliError> {
    let l = load_trust(trust)?;
    let currencies: std::collections::BTreeSet<String> =
        l.states().map(|s| s.currency.clone()).collect();
    let mut rows = Vec::new();
    for c in &currencies {
        for (account, net) in l.net_positions(c) {
            rows.push(PositionRow {
                currency: c.clone(),
                account,
                net: net.to_string(),
            });
        }
    }
    out.table("positions", &["currency", "account", "net"], &rows)?;
    let g = build_trust_graph(&l);
    let per_currency: BTreeMap<&String, usize> = currencies
        .iter()
        .map(|c| (c, l.states().filter(|s| &s.currency == c).count()))
        .collect();
    Ok(json!({
        "accounts": l.accounts().count(),
        "lines": l.states().count(),
        "lines_per_currency": per_currency,
        "graph": stats_json(&graph_stats(&g)),
    }))
}

// ---- iota ----

type Scenario = TangleScenario<MixSponge>;

fn iota_replay(script: &Path, cfg: &RunConfig) -> Result<(Scenario, Vec<TangleEvent>), CliError> {
    let mut sc = TangleScenario::new(MixSponge::default(), cfg.tip_strategy, cfg.seed);
    let events = replay_tangle(&mut sc, &read_text(script)?)?;
    Ok((sc, events))
}

fn tangle_export(st: &TangleState<MixSponge>, out: &mut Output) -> Result<(), CliError> {
    match out.format() {
        ExportFormat::Csv => out.file("tangle.csv", |w| Ok(write_tangle_csv(st, w)?))?,
        ExportFormat::Json => out.json("tangle.json", &tangle_rows(st))?,
    }
    out.edges("tangle_graph", &build_tangle_graph(st))
}

#[derive(Serialize)]
struct BalanceRow {
    address: String,
    balance: i64,
}

fn balances(st: &TangleState<MixSponge>, out: &mut Output) -> Result<(), CliError> {
    let rows: Vec<BalanceRow> = st
        .balances()
        .iter()
        .map(|(a, b)| BalanceRow {
            address: a.clone(),
            balance: *b,
        })
        .collect();
    out.table("balances", &["address", "balance"], &rows)
}

#[derive(Serialize)]
struct StatusRow {
    hash: String,
    label: String,
    status: &'static str,
}

fn status_rows(sc: &Scenario) -> Result<Vec<StatusRow>, CliError> {
    let st = sc.state()?;
    Ok(st
        .transactions()
        .map(|t| StatusRow {
            hash: t.hash.clone(),
            label: sc.label_of(&t.hash).unwrap_or("").to_string(),
            status: if st.is_invalid(&t.hash) {
                "invalid"
            } else if st.is_confirmed(&t.hash) {
                "confirmed"
            } else {
                "pending"
            },
        })
        .collect())
}

fn tangle_summary(sc: &Scenario, events: &[TangleEvent]) -> Result<Value, CliError> {
    let st = sc.state()?;
    Ok(json!({
        "commands": events.len(),
        "rejected": events.iter().filter(|e| !e.ok).count(),
        "transactions": st.len(),
        "confirmed": st.confirmed().len(),
        "invalid": st.invalid().len(),
        "invalid_labels": sc.invalid_labels(),
        "milestones": st.milestones().len(),
        "supply": st.total_balance().to_string(),
    }))
}

fn apply_tips(tips: &TipArgs, cfg: &RunConfig) -> Result<RunConfig, CliError> {
    let mut cfg = cfg.clone();
    if let Some(s) = &tips.tip_strategy {
        cfg.set("tip_strategy", s)?;
    }
    Ok(cfg)
}

#[derive(Serialize)]
struct AddressRow {
    index: u64,
    address: String,
    address_with_checksum: String,
}

#[derive(Serialize)]
struct BundleRow {
    bundle: String,
    head: String,
    label: String,
    transactions: usize,
    value_sum: i128,
    spent: i64,
}

fn iota(c: &IotaCmd, cfg: &RunConfig, out: &mut Output) -> Result<Value, CliError> {
    let sponge = MixSponge::default();
    match c {
        IotaCmd::Derive {
            seed_trytes,
            index,
            count,
            level,
        } => {
            let seed = match seed_trytes {
                Some(s) => Seed::parse(s)?,
                None => Seed::random(&mut ledgergraph_core::rng::labeled_rng(
                    cfg.seed,
                    "iota.seed",
                )),
            };
            let level = SecurityLevel::new(*level)?;
            let mut rows = Vec::new();
            for i in *index..index.saturating_add(*count) {
                let with = address_from_seed(&sponge, &seed, i, level, true)?;
                rows.push(AddressRow {
                    index: i,
                    address: with[..81].to_string(),
                    address_with_checksum: with,
                });
            }
            out.table(
                "addresses",
                &["index", "address", "address_with_checksum"],
                &rows,
            )?;
            Ok(json!({"seed": seed.as_str(), "level": level.get(), "addresses": rows.len()}))
        }
        IotaCmd::Bundle { script } => {
            let (sc, events) = iota_replay(script, cfg)?;
            out.jsonl("events.jsonl", &events)?;
            let st = sc.state()?;
            let mut rows = Vec::new();
            for t in st
                .transactions()
                .filter(|t| t.is_head() && t.hash != st.genesis())
            {
                let members: Vec<_> = st
                    .bundle_members(&t.hash)
                    .iter()
                    .filter_map(|h| st.get(h))
                    .cloned()
                    .collect();
                if members.iter().all(|m| m.value == 0) && members.len() == 1 {
                    continue;
                }
                rows.push(BundleRow {
                    bundle: t.bundle.clone(),
                    head: t.hash.clone(),
                    label: sc.label_of(&t.hash).unwrap_or("").to_string(),
                    transactions: members.len(),
                    value_sum: members.iter().map(|m| i128::from(m.value)).sum(),
                    spent: members
                        .iter()
                        .filter(|m| m.value < 0)
                        .map(|m| -m.value)
                        .sum(),
                });
            }
            out.table(
                "bundles",
                &[
                    "bundle",
                    "head",
                    "label",
                    "transactions",
                    "value_sum",
                    "spent",
                ],
                &rows,
            )?;
            tangle_export(st, out)?;
            let mut s = tangle_summary(&sc, &events)?;
            s["bundles"] = json!(rows.len());
            Ok(s)
        }
        IotaCmd::Grow {
            script,
            messages,
            tips,
        } => {
            let cfg = apply_tips(tips, cfg)?;
            let (mut sc, mut events) = iota_replay(script, &cfg)?;
            let grow: String = (0..*messages)
                .map(|i| format!("{}\n", json!({"cmd": "message", "id": format!("grow{i}")})))
                .collect();
            let base = events.last().map_or(0, |e| e.line);
            for mut e in replay_tangle(&mut sc, &grow)? {
                e.line += base;
                events.push(e);
            }
            out.jsonl("events.jsonl", &events)?;
            tangle_export(sc.state()?, out)?;
            tangle_summary(&sc, &events)
        }
        IotaCmd::Milestone { script, tips } => {
            let cfg = apply_tips(tips, cfg)?;
            let (mut sc, mut events) = iota_replay(script, &cfg)?;
            let line = events.last().map_or(0, |e| e.line) + 1;
            let detail = match sc.apply(&ledgergraph_iota::TangleCommand::Milestone {
                id: "issued".into(),
                time: None,
                trunk: None,
                branch: None,
            }) {
                Ok(d) => (true, d),
                Err(e) => (false, json!({"error": e.code(), "message": e.to_string()})),
            };
            events.push(TangleEvent {
                line,
                cmd: "milestone".into(),
                ok: detail.0,
                detail: detail.1,
            });
            out.jsonl("events.jsonl", &events)?;
            out.table("status", &["hash", "label", "status"], &status_rows(&sc)?)?;
            tangle_export(sc.state()?, out)?;
            tangle_summary(&sc, &events)
        }
        IotaCmd::Snapshot { script } => {
            let (mut sc, mut events) = iota_replay(script, cfg)?;
            let line = events.last().map_or(0, |e| e.line) + 1;
            let d = sc.apply(&ledgergraph_iota::TangleCommand::Snapshot)?;
            events.push(TangleEvent {
                line,
                cmd: "snapshot".into(),
                ok: true,
                detail: d,
            });
            out.jsonl("events.jsonl", &events)?;
            let st = sc.state()?;
            balances(st, out)?;
            tangle_export(st, out)?;
            tangle_summary(&sc, &events)
        }
    }
}

// ---- generate / replay ----

fn gen(a: &GenerateArgs, cfg: &RunConfig, out: &mut Output) -> Result<Value, CliError> {
    let mut cfg = cfg.clone();
    let sets: [(&str, Option<String>); 5] = [
        ("count", a.count.map(|v| v.to_string())),
        ("txs_per_block", a.txs_per_block.map(|v| v.to_string())),
        ("split_bias", a.split_bias.map(|v| v.to_string())),
        (
            "reuse_probability",
            a.reuse_probability.map(|v| v.to_string()),
        ),
        ("trust_density", a.trust_density.map(|v| v.to_string())),
    ];
    for (k, v) in sets {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    cfg.rings |= a.rings;
    cfg.shielded |= a.shielded;
    let files = generate(a.chain, &cfg)?;
    let mut names = Vec::new();
    for (name, body) in &files {
        out.file(name, |w| {
            std::io::Write::write_all(w, body.as_bytes())?;
            Ok(())
        })?;
        names.push(name.clone());
    }
    Ok(
        json!({"chain": format!("{:?}", a.chain).to_lowercase(), "seed": cfg.seed, "count": cfg.count, "files": names}),
    )
}

fn replay_cmd(a: &ReplayArgs, cfg: &RunConfig, out: &mut Output) -> Result<Value, CliError> {
    match a.chain {
        ReplayChain::Ripple => {
            let mut l = match &a.trust {
                Some(t) => load_trust(t)?,
                None => RippleLedger::new(RippleConfig::default()),
            };
            let events = replay(&mut l, &read_text(&a.script)?)?;
            out.jsonl("events.jsonl", &events)?;
            ripple_state(&l, out)?;
            Ok(json!({
                "commands": events.len(),
                "rejected": events.iter().filter(|e| !e.ok).count(),
                "accounts": l.accounts().count(),
                "lines": l.states().count(),
            }))
        }
        ReplayChain::Iota => {
            let cfg = apply_tips(&a.tips, cfg)?;
            let (sc, events) = iota_replay(&a.script, &cfg)?;
            out.jsonl("events.jsonl", &events)?;
            match &sc.state {
                Some(st) => {
                    balances(st, out)?;
                    out.table("status", &["hash", "label", "status"], &status_rows(&sc)?)?;
                    tangle_export(st, out)?;
                    tangle_summary(&sc, &events)
                }
                None => Ok(
                    json!({"commands": events.len(), "rejected": events.iter().filter(|e| !e.ok).count(), "transactions": 0}),
                ),
            }
        }
    }
}
