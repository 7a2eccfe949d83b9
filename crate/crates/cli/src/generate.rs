//! Synthetic ledgers for every chain model. Each generator draws from its own
//! labelled stream of the run seed and checks its output with the chain's own
//! validators before returning it.

use crate::config::RunConfig;
use crate::error::CliError;
use clap::ValueEnum;
use ledgergraph_account::{
    build_account_graph, parse_account_jsonl, AccountTxRecord, ReceiverKind,
};
use ledgergraph_core::rng::labeled_rng;
use ledgergraph_iota::{replay_tangle, MixSponge, TangleScenario};
use ledgergraph_ripple::{
    load_trust_csv, parse_payments, PaymentSpec, RippleConfig, RippleLedger, TrustRow,
};
use ledgergraph_utxo::{generate_ledger, write_jsonl, UtxoGenConfig};
use rand::Rng;
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Chain {
    Utxo,
    Account,
    Ripple,
    Iota,
}

/// Generated files as (name, contents).
pub type Files = Vec<(String, String)>;

pub fn utxo_config(cfg: &RunConfig) -> UtxoGenConfig {
    UtxoGenConfig {
        transactions: cfg.count,
        txs_per_block: cfg.txs_per_block,
        split_bias: cfg.split_bias,
        reuse_probability: cfg.reuse_probability,
        rings: cfg.rings,
        shielded: cfg.shielded,
        ..UtxoGenConfig::default()
    }
}

pub fn generate(chain: Chain, cfg: &RunConfig) -> Result<Files, CliError> {
    match chain {
        Chain::Utxo => gen_utxo(cfg),
        Chain::Account => gen_account(cfg),
        Chain::Ripple => gen_ripple(cfg),
        Chain::Iota => gen_iota(cfg),
    }
}

fn utf8(buf: Vec<u8>) -> String {
    String::from_utf8(buf).expect("writers emit utf-8")
}

fn gen_utxo(cfg: &RunConfig) -> Result<Files, CliError> {
    // generate_ledger replays every block through the validator
    let ledger = generate_ledger(&utxo_config(cfg), cfg.seed)?;
    let mut buf = Vec::new();
    write_jsonl(ledger.blocks(), &mut buf)?;
    Ok(vec![("utxo.jsonl".into(), utf8(buf))])
}

fn gen_account(cfg: &RunConfig) -> Result<Files, CliError> {
    let mut rng = labeled_rng(cfg.seed, "gen.account");
    let n_accounts = (cfg.count / 10).clamp(2, 500);
    let name = |i: usize| format!("0x{i:040x}");
    let mut nonces = vec![0u64; n_accounts];
    let per_block = cfg.txs_per_block.max(1);
    let mut out = String::new();
    for k in 0..cfg.count {
        let from = rng.gen_range(0..n_accounts);
        let mut to = rng.gen_range(0..n_accounts - 1);
        if to >= from {
            to += 1;
        }
        let rec = AccountTxRecord {
            id: Some(format!("g{k}")),
            from: name(from),
            to: name(to),
            to_kind: ReceiverKind::Eoa,
            amount: rng.gen_range(1..=1_000_000),
            nonce: nonces[from],
            block: (k / per_block) as u64 + 1,
            index: (k % per_block) as u32,
            time: None,
            data: String::new(),
            create: false,
        };
        nonces[from] += 1;
        out.push_str(&serde_json::to_string(&rec).expect("record serialises"));
        out.push('\n');
    }
    build_account_graph(&parse_account_jsonl(&out)?, &[])?;
    Ok(vec![("account.jsonl".into(), out)])
}

fn gen_ripple(cfg: &RunConfig) -> Result<Files, CliError> {
    let mut rng = labeled_rng(cfg.seed, "gen.ripple");
    let n_accounts = (cfg.count / 20).clamp(4, 24);
    let name = |i: usize| format!("r{i:02}");
    let mut rows = Vec::new();
    for i in 0..n_accounts {
        for j in i + 1..n_accounts {
            if !rng.gen_bool(cfg.trust_density) {
                continue;
            }
            let mut limit = || {
                if rng.gen_bool(0.6) {
                    rng.gen_range(1..=10i128) * 100
                } else {
                    0
                }
            };
            let (low_limit, high_limit) = (limit(), limit());
            if low_limit == 0 && high_limit == 0 {
                continue;
            }
            rows.push(TrustRow {
                low: name(i),
                high: name(j),
                currency: "USD".into(),
                balance: 0,
                low_limit,
                high_limit,
                low_no_ripple: false,
                high_no_ripple: false,
                frozen: false,
            });
        }
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).map_err(|e| CliError::io("cli.export", e))?;
    }
    let mut trust = utf8(
        w.into_inner()
            .map_err(|e| CliError::io("cli.export", e.to_string()))?,
    );
    if rows.is_empty() {
        trust =
            "low,high,currency,balance,low_limit,high_limit,low_no_ripple,high_no_ripple,frozen\n"
                .into();
    }

    let mut payments = String::new();
    for _ in 0..cfg.count {
        let a = rng.gen_range(0..n_accounts);
        let mut b = rng.gen_range(0..n_accounts - 1);
        if b >= a {
            b += 1;
        }
        let mut spec = PaymentSpec::new(&name(a), &name(b), "USD", rng.gen_range(1..=200));
        spec.partial = rng.gen_bool(0.5);
        payments.push_str(&serde_json::to_string(&spec).expect("spec serialises"));
        payments.push('\n');
    }

    let mut ledger = RippleLedger::new(RippleConfig::default());
    load_trust_csv(trust.as_bytes(), &mut ledger)?;
    parse_payments(&payments)?;
    Ok(vec![
        ("trust.csv".into(), trust),
        ("payments.jsonl".into(), payments),
    ])
}

/// Letters only, so every name is a valid tryte string.
fn iota_name(i: usize) -> String {
    let a = (b'A' + (i / 26) as u8) as char;
    let b = (b'A' + (i % 26) as u8) as char;
    format!("G{a}{b}")
}

fn gen_iota(cfg: &RunConfig) -> Result<Files, CliError> {
    let mut rng = labeled_rng(cfg.seed, "gen.iota");
    let n_addr = (cfg.count / 10).clamp(4, 26 * 26);
    let mut confirmed: Vec<i64> = (0..n_addr).map(|_| rng.gen_range(100..=10_000)).collect();
    let init: serde_json::Map<String, serde_json::Value> = (0..n_addr)
        .map(|i| (iota_name(i), json!(confirmed[i])))
        .collect();
    let mut next = confirmed.clone();
    let mut lines =
        vec![json!({"cmd": "init", "coordinator": "COO", "balances": init, "difficulty": 1})];
    let period = cfg.txs_per_block.clamp(1, 20);
    let mut prev = "genesis".to_string();
    // every transfer chains onto the previous one, so a milestone on the
    // newest covers all of them; each address spends at most once per period
    // and only from its balance as of the last milestone
    let mut spent = vec![false; n_addr];
    let mut pending = 0usize;
    let mut m = 0usize;
    let mut milestone = |lines: &mut Vec<serde_json::Value>, prev: &mut String| {
        let id = format!("m{m}");
        lines.push(json!({"cmd": "milestone", "id": id, "trunk": *prev, "branch": *prev}));
        *prev = id;
        m += 1;
    };
    for k in 0..cfg.count {
        let mut funded: Vec<usize> = (0..n_addr)
            .filter(|&i| confirmed[i] > 0 && !spent[i])
            .collect();
        if funded.is_empty() && pending > 0 {
            milestone(&mut lines, &mut prev);
            pending = 0;
            spent.fill(false);
            confirmed.clone_from(&next);
            funded = (0..n_addr).filter(|&i| confirmed[i] > 0).collect();
        }
        if funded.is_empty() {
            break;
        }
        let from = funded[rng.gen_range(0..funded.len())];
        let mut to = rng.gen_range(0..n_addr - 1);
        if to >= from {
            to += 1;
        }
        let amount = rng.gen_range(1..=confirmed[from]);
        next[from] -= amount;
        next[to] += amount;
        spent[from] = true;
        let id = format!("t{k}");
        lines.push(json!({
            "cmd": "transfer", "id": id,
            "inputs": [{"address": iota_name(from), "level": rng.gen_range(1..=2), "amount": amount}],
            "outputs": [{"address": iota_name(to), "value": amount}],
            "trunk": prev,
        }));
        prev = id;
        pending += 1;
        if pending == period {
            milestone(&mut lines, &mut prev);
            pending = 0;
            spent.fill(false);
            confirmed.clone_from(&next);
        }
    }
    if pending > 0 {
        milestone(&mut lines, &mut prev);
    }
    let script: String = lines.iter().map(|l| format!("{l}\n")).collect();

    let mut sc = TangleScenario::new(MixSponge::default(), cfg.tip_strategy, cfg.seed);
    let events = replay_tangle(&mut sc, &script)?;
    if let Some(bad) = events.iter().find(|e| !e.ok) {
        return Err(CliError::validation(
            "cli.generate",
            format!(
                "generated tangle script rejected at line {}: {}",
                bad.line, bad.detail
            ),
        ));
    }
    Ok(vec![("tangle.jsonl".into(), script)])
}
