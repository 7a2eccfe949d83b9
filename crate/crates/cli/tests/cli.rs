use clap::Parser;
use ledgergraph_cli::{execute, Cli, CliError};
use serde_json::Value;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn no_env(_: &str) -> Option<String> {
    None
}

fn run_in(out: &Path, args: &[&str]) -> Result<Value, CliError> {
    let mut full = vec![
        "ledgergraph".to_string(),
        "--out".into(),
        out.to_string_lossy().into_owned(),
    ];
    full.extend(args.iter().map(|s| s.to_string()));
    let cli = Cli::try_parse_from(full).expect("arguments parse");
    execute(&cli, no_env)
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records()
        .map(|x| x.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ledgergraph"))
        .args(args)
        .output()
        .unwrap()
}

fn dir_bytes(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().into(), std::fs::read(&p).unwrap())
        })
        .collect()
}

#[test]
fn generation_is_byte_identical_for_a_seed() {
    let tmp = tempfile::tempdir().unwrap();
    for chain in ["utxo", "account", "ripple", "iota"] {
        let a = tmp.path().join(format!("{chain}-a"));
        let b = tmp.path().join(format!("{chain}-b"));
        let c = tmp.path().join(format!("{chain}-c"));
        run_in(
            &a,
            &[
                "--seed", "42", "generate", "--chain", chain, "--count", "120",
            ],
        )
        .unwrap();
        run_in(
            &b,
            &[
                "--seed", "42", "generate", "--chain", chain, "--count", "120",
            ],
        )
        .unwrap();
        run_in(
            &c,
            &[
                "--seed", "43", "generate", "--chain", chain, "--count", "120",
            ],
        )
        .unwrap();
        assert_eq!(dir_bytes(&a), dir_bytes(&b), "{chain}");
        assert_ne!(dir_bytes(&a), dir_bytes(&c), "{chain}");
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let ok = bin(&[
        "--out",
        out,
        "utxo",
        "validate",
        &fixture("utxo_network.jsonl"),
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let summary: Value = serde_json::from_slice(&ok.stdout).unwrap();
    // six network transactions plus the funding coinbase in block 0
    assert_eq!(summary["transactions"], 8);

    let bad = tmp.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"id\":\"t1\",\"block\":1,\"coinbase\":false,\"inputs\":[{\"txid\":\"nope\",\"index\":0}],\"outputs\":[{\"amount\":1,\"address\":\"a\"}]}\n").unwrap();
    let v = bin(&["--out", out, "utxo", "validate", bad.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(2));
    let report: Value = serde_json::from_slice(&v.stderr).unwrap();
    assert!(
        report["error"].as_str().unwrap().starts_with("utxo."),
        "{report}"
    );
    assert_eq!(report["kind"], "validation");

    let missing = bin(&["--out", out, "utxo", "validate", "/no/such/ledger.jsonl"]);
    assert_eq!(missing.status.code(), Some(3));
    let report: Value = serde_json::from_slice(&missing.stderr).unwrap();
    assert_eq!(report["kind"], "io");

    assert_eq!(bin(&["utxo", "frobnicate"]).status.code(), Some(2));
    assert_eq!(
        bin(&[
            "--out",
            out,
            "--format",
            "xml",
            "utxo",
            "validate",
            &fixture("utxo_network.jsonl")
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn empty_inputs_give_header_only_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let e = empty.to_str().unwrap();

    let out = tmp.path().join("utxo");
    run_in(&out, &["utxo", "graph", e]).unwrap();
    for f in [
        "address_graph.csv",
        "transaction_graph.csv",
        "incidence_graph.csv",
    ] {
        assert_eq!(
            read(&out, f),
            "source,target,weight_num,weight_den,attr_json\n",
            "{f}"
        );
    }

    let out = tmp.path().join("account");
    run_in(&out, &["account", "graph", e]).unwrap();
    assert_eq!(read(&out, "account_graph.csv").lines().count(), 1);
    assert_eq!(read(&out, "net_flows.csv"), "address,net\n");

    let out = tmp.path().join("chainlet");
    let s = run_in(&out, &["chainlet", e, "--N", "2"]).unwrap();
    assert_eq!(s["transactions"], 0);
    assert_eq!(read(&out, "extreme.csv"), "txid,x,y,output_total,pattern\n");
    assert_eq!(
        read(&out, "shares.csv"),
        "window,merge,transition,split,counted\n"
    );
}

#[test]
fn empty_script_leaves_state_unchanged() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty.jsonl");
    std::fs::write(&empty, "\n").unwrap();
    let out = tmp.path().join("r");
    let trust = fixture("ripple_payment_trust.csv");
    run_in(
        &out,
        &[
            "replay",
            "--chain",
            "ripple",
            empty.to_str().unwrap(),
            "--trust",
            &trust,
        ],
    )
    .unwrap();
    assert_eq!(read(&out, "events.jsonl"), "");
    let before = csv_rows(&std::fs::read_to_string(&trust).unwrap());
    let mut sorted = before.clone();
    sorted.sort();
    assert_eq!(csv_rows(&read(&out, "trust_lines.csv")), sorted);

    let out = tmp.path().join("i");
    let s = run_in(
        &out,
        &["replay", "--chain", "iota", empty.to_str().unwrap()],
    )
    .unwrap();
    assert_eq!(s["commands"], 0);
}

#[test]
fn network_fixture_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    run_in(
        tmp.path(),
        &[
            "utxo",
            "graph",
            &fixture("utxo_network.jsonl"),
            "--from",
            "1",
            "--to",
            "1",
        ],
    )
    .unwrap();
    let tx: BTreeSet<(String, String)> = csv_rows(&read(tmp.path(), "transaction_graph.csv"))
        .into_iter()
        .map(|r| (r[0].clone(), r[1].clone()))
        .collect();
    let want: BTreeSet<(String, String)> = [
        ("t1", "t5"),
        ("t2", "t5"),
        ("t2", "t6"),
        ("t3", "t5"),
        ("t3", "t6"),
        ("t4", "t6"),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    assert_eq!(tx, want);
    let addr = csv_rows(&read(tmp.path(), "address_graph.csv"));
    assert_eq!(addr.len(), 25);
    assert!(addr.iter().any(|r| r[0] == "a10" && r[1] == "a10"));
    assert_eq!(csv_rows(&read(tmp.path(), "incidence_graph.csv")).len(), 24);
}

#[test]
fn chainlet_fixture_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let s = run_in(
        tmp.path(),
        &[
            "chainlet",
            &fixture("utxo_chainlets.jsonl"),
            "--N",
            "3",
            "--from",
            "1",
            "--to",
            "1",
        ],
    )
    .unwrap();
    assert_eq!(s["n"], 3);
    assert_eq!(read(tmp.path(), "occurrence.csv"), "0,2,0\n1,1,1\n1,0,0\n");
    assert_eq!(
        read(tmp.path(), "amount.csv"),
        "0,358000000,0\n190000000,175000000,300000000\n280000000,0,0\n"
    );
    let folded = tmp.path().join("n2");
    run_in(
        &folded,
        &[
            "chainlet",
            &fixture("utxo_chainlets.jsonl"),
            "--N",
            "2",
            "--from",
            "1",
            "--to",
            "1",
        ],
    )
    .unwrap();
    // columns and rows of size >= 2 collapse into the last bucket
    assert_eq!(read(&folded, "occurrence.csv"), "0,2\n2,2\n");
    assert_eq!(
        read(&folded, "amount.csv"),
        "0,358000000\n470000000,475000000\n"
    );
}

#[test]
fn payment_replay_final_balances() {
    let tmp = tempfile::tempdir().unwrap();
    run_in(
        tmp.path(),
        &[
            "replay",
            "--chain",
            "ripple",
            &fixture("ripple_payment_script.jsonl"),
        ],
    )
    .unwrap();
    let events: Vec<Value> = read(tmp.path(), "events.jsonl")
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let pays: Vec<&Value> = events.iter().filter(|e| e["cmd"] == "pay").collect();
    assert_eq!(pays[0]["detail"]["delivered"], "50");
    assert_eq!(pays[1]["ok"], false);
    assert_eq!(pays[2]["detail"]["delivered"], "25");
    // 50/75/65 after the first payment, plus 25 from the partial one
    let owed: BTreeMap<(String, String), i64> = csv_rows(&read(tmp.path(), "trust_lines.csv"))
        .into_iter()
        .map(|r| {
            (
                (r[0].clone(), r[1].clone()),
                r[3].parse::<i64>().unwrap().abs(),
            )
        })
        .collect();
    assert_eq!(owed[&("Sarah".into(), "Tim".into())], 75);
    assert_eq!(owed[&("John".into(), "Tim".into())], 100);
    assert_eq!(owed[&("Bob".into(), "John".into())], 90);
}

#[test]
fn tangle_replay_marks_double_spend() {
    let tmp = tempfile::tempdir().unwrap();
    let s = run_in(
        tmp.path(),
        &["replay", "--chain", "iota", &fixture("iota_double_spend.jsonl")],
    )
    .unwrap();
    assert_eq!(
        s["invalid_labels"],
        serde_json::json!(["t2", "x1", "x2", "x3"])
    );
    let status: BTreeMap<String, String> = csv_rows(&read(tmp.path(), "status.csv"))
        .into_iter()
        .filter(|r| !r[1].is_empty())
        .map(|r| (r[1].clone(), r[2].clone()))
        .collect();
    assert_eq!(status["t1"], "confirmed");
    assert_eq!(status["t2"], "invalid");
    let rejected: Vec<Value> = read(tmp.path(), "events.jsonl")
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap())
        .filter(|e| e["ok"] == false)
        .collect();
    assert_eq!(rejected.len(), 1);
    assert_eq!(rejected[0]["detail"]["error"], "iota.invalid-tx");
    assert!(read(tmp.path(), "tangle.csv")
        .starts_with("tx_hash,epoch,value,bundle,tag,address,branch,trunk\n"));
}

fn generated_blocks(dir: &Path) -> Vec<Value> {
    read(dir, "utxo.jsonl")
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn forced_split_bias_gives_only_splits() {
    let tmp = tempfile::tempdir().unwrap();
    run_in(
        tmp.path(),
        &[
            "generate",
            "--chain",
            "utxo",
            "--count",
            "400",
            "--split-bias",
            "1.0",
        ],
    )
    .unwrap();
    let txs = generated_blocks(tmp.path());
    let spending: Vec<&Value> = txs.iter().filter(|t| t["coinbase"] == false).collect();
    assert_eq!(spending.len(), 400);
    for t in spending {
        let (x, y) = (
            t["inputs"].as_array().unwrap().len(),
            t["outputs"].as_array().unwrap().len(),
        );
        assert!(x < y, "{t}");
    }
    let out = tmp.path().join("ch");
    run_in(
        &out,
        &["chainlet", tmp.path().join("utxo.jsonl").to_str().unwrap()],
    )
    .unwrap();
    let shares = csv_rows(&read(&out, "shares.csv"));
    assert_eq!(shares[0][3], "100.0");
}

#[test]
fn no_reuse_keeps_addresses_in_at_most_two_transactions() {
    let tmp = tempfile::tempdir().unwrap();
    run_in(
        tmp.path(),
        &[
            "generate",
            "--chain",
            "utxo",
            "--count",
            "500",
            "--reuse-probability",
            "0",
        ],
    )
    .unwrap();
    let txs = generated_blocks(tmp.path());
    let mut owner: BTreeMap<(String, u64), String> = BTreeMap::new();
    for t in &txs {
        for (i, o) in t["outputs"].as_array().unwrap().iter().enumerate() {
            owner.insert(
                (t["id"].as_str().unwrap().into(), i as u64),
                o["address"].as_str().unwrap().into(),
            );
        }
    }
    let mut seen: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for t in &txs {
        let id = t["id"].as_str().unwrap().to_string();
        for o in t["outputs"].as_array().unwrap() {
            seen.entry(o["address"].as_str().unwrap().into())
                .or_default()
                .insert(id.clone());
        }
        for i in t["inputs"].as_array().unwrap() {
            let key = (
                i["txid"].as_str().unwrap().to_string(),
                i["index"].as_u64().unwrap(),
            );
            seen.entry(owner[&key].clone())
                .or_default()
                .insert(id.clone());
        }
    }
    assert!(seen.values().all(|s| s.len() <= 2));
}

#[test]
fn settings_layer_file_then_env_then_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = tmp.path().join("run.toml");
    std::fs::write(&conf, "seed = 7\ncount = 30\nformat = \"json\"\n").unwrap();
    let out = tmp.path().join("o");
    let base = [
        "ledgergraph",
        "--config",
        conf.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    let parse = |extra: &[&str]| {
        let args: Vec<&str> = base.iter().copied().chain(extra.iter().copied()).collect();
        Cli::try_parse_from(args).unwrap()
    };
    let env = |k: &str| (k == "LEDGERGRAPH_SEED").then(|| "9".to_string());

    let s = execute(&parse(&["generate", "--chain", "account"]), no_env).unwrap();
    assert_eq!(
        (s["seed"].as_u64(), s["count"].as_u64()),
        (Some(7), Some(30))
    );
    let s = execute(&parse(&["generate", "--chain", "account"]), env).unwrap();
    assert_eq!(s["seed"], 9);
    let s = execute(
        &parse(&["--seed", "11", "generate", "--chain", "account"]),
        env,
    )
    .unwrap();
    assert_eq!(s["seed"], 11);
    assert!(out.join("summary.json").exists());

    let bad_env = |k: &str| (k == "LEDGERGRAPH_SPLIT_BIAS").then(|| "2".to_string());
    let err = execute(&parse(&["generate", "--chain", "utxo"]), bad_env).unwrap_err();
    assert_eq!((err.code(), err.exit_code()), ("cli.config", 2));
}

#[test]
fn json_format_exports() {
    let tmp = tempfile::tempdir().unwrap();
    run_in(
        tmp.path(),
        &[
            "--format",
            "json",
            "utxo",
            "graph",
            &fixture("utxo_network.jsonl"),
            "--kind",
            "tx",
            "--from",
            "1",
            "--to",
            "1",
        ],
    )
    .unwrap();
    let doc: Value = serde_json::from_str(&read(tmp.path(), "transaction_graph.json")).unwrap();
    assert_eq!(doc["edges"].as_array().unwrap().len(), 6);
    assert!(!tmp.path().join("address_graph.json").exists());
}

#[test]
fn token_operations() {
    let tmp = tempfile::tempdir().unwrap();
    let ops = tmp.path().join("tokens.jsonl");
    std::fs::write(
        &ops,
        [
            r#"{"op":"deploy","owner":"a2","symbol":"TOK","supply":5}"#,
            r#"{"op":"deploy","owner":"a1","symbol":"OTH","supply":3,"nonce":1}"#,
            r#"{"op":"transfer","token":"TOK","from":"a2","to":"a1","amount":2,"tx":"e7"}"#,
            r#"{"op":"transfer","token":"OTH","from":"a1","to":"a2","amount":1}"#,
        ]
        .join("\n"),
    )
    .unwrap();
    let out = tmp.path().join("o");
    let s = run_in(&out, &["account", "tokens", ops.to_str().unwrap()]).unwrap();
    assert_eq!(
        (
            s["tokens"].as_u64(),
            s["transfers"].as_u64(),
            s["shared_traders"].as_u64()
        ),
        (Some(2), Some(2), Some(2))
    );
    let edges = csv_rows(&read(&out, "token_graph.csv"));
    assert!(edges
        .iter()
        .any(|r| r[0] == "a2" && r[1] == "a1" && r[2] == "2"));

    std::fs::write(
        &ops,
        r#"{"op":"deploy","owner":"a2","symbol":"TOK","supply":1}
{"op":"transfer","token":"TOK","from":"a2","to":"a1","amount":2}"#,
    )
    .unwrap();
    let err = run_in(&out, &["account", "tokens", ops.to_str().unwrap()]).unwrap_err();
    assert_eq!(err.code(), "account.insufficient-token-balance");
}

#[test]
fn tangle_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("b");
    let s = run_in(&out, &["iota", "bundle", &fixture("iota_bundle_shapes.jsonl")]).unwrap();
    assert_eq!(s["bundles"], 2);
    let mut sizes: Vec<String> = csv_rows(&read(&out, "bundles.csv"))
        .into_iter()
        .map(|r| r[3].clone())
        .collect();
    sizes.sort();
    assert_eq!(sizes, ["4", "5"]);

    let out = tmp.path().join("m");
    let s = run_in(&out, &["iota", "milestone", &fixture("iota_exchange_bundle.jsonl")]).unwrap();
    assert_eq!(s["supply"], "142998000");

    let out = tmp.path().join("s");
    run_in(&out, &["iota", "snapshot", &fixture("iota_exchange_bundle.jsonl")]).unwrap();
    let bal = csv_rows(&read(&out, "balances.csv"));
    let total: i64 = bal.iter().map(|r| r[1].parse::<i64>().unwrap()).sum();
    assert_eq!(total, 142_998_000);
    assert_eq!(bal.len(), 2);

    let out = tmp.path().join("g");
    let s = run_in(
        &out,
        &[
            "iota",
            "grow",
            &fixture("iota_double_spend.jsonl"),
            "--messages",
            "3",
            "--tip-strategy",
            "oldest",
        ],
    )
    .unwrap();
    assert_eq!(s["commands"], 16);

    let out = tmp.path().join("d");
    run_in(&out, &["iota", "derive", "--count", "3", "--level", "1"]).unwrap();
    let rows = csv_rows(&read(&out, "addresses.csv"));
    assert_eq!(rows.len(), 3);
    assert!(rows
        .iter()
        .all(|r| r[1].len() == 81 && r[2].len() == 90 && r[2].starts_with(&r[1])));
}

#[test]
fn generated_ledgers_feed_their_pipelines() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("gen");
    for chain in ["ripple", "account", "iota"] {
        run_in(&g, &["generate", "--chain", chain, "--count", "80"]).unwrap();
    }
    let p = |n: &str| g.join(n).to_string_lossy().into_owned();
    let s = run_in(
        &tmp.path().join("pay"),
        &["ripple", "pay", &p("trust.csv"), &p("payments.jsonl")],
    )
    .unwrap();
    assert_eq!(s["payments"], 80);
    let s = run_in(
        &tmp.path().join("acc"),
        &["account", "graph", &p("account.jsonl")],
    )
    .unwrap();
    assert_eq!(s["transactions"], 80);
    let s = run_in(
        &tmp.path().join("tan"),
        &["replay", "--chain", "iota", &p("tangle.jsonl")],
    )
    .unwrap();
    assert_eq!(s["rejected"], 0);
    assert_eq!(s["invalid"], 0);
    let s = run_in(
        &tmp.path().join("rep"),
        &["ripple", "report", &p("trust.csv")],
    )
    .unwrap();
    assert!(s["lines"].as_u64().unwrap() > 0);
}
