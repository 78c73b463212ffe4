//! Command-line interface: JSON/CSV result records, on-disk caching of
//! computed records, and the engine-comparison benchmark.

use crate::antichain::{
    count_antichains_with, count_kcore_subsets_with, count_primitive_subsets_oracle,
    count_smooth_primitive_with, CountConfig, ORACLE_CAP,
};
use crate::arith::{enumerate_smooth, PrimeBasis};
use crate::limits::{
    alpha_k_enclosure_with, finite_n_gap_with, fnk_log2_bounds, fnk_product_with, fn_exact_with,
    verify_inequalities, AlphaEnclosure, PkEngine, VerificationReport,
};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime};

/// Format of every record emitted on stdout.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the cache directory (overridden by `--cache-dir`).
pub const CACHE_ENV: &str = "PRIMLIM_CACHE";

/// When set to a unix-seconds value, pins the record timestamp and zeroes the
/// reported runtime so output is byte-identical across runs.
pub const EPOCH_ENV: &str = "PRIMLIM_EPOCH";

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 1;
const EXIT_VERIFICATION: i32 = 2;
const EXIT_RESOURCE: i32 = 3;

/// One computed result with its parameters and provenance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub op: String,
    pub params: BTreeMap<String, String>,
    pub result: Value,
    pub timestamp: String,
    pub runtime_ms: u64,
}

#[derive(Parser, Debug)]
#[command(
    name = "primlim",
    version,
    about = "Exact counts of divisor-free subsets and rigorous growth-constant enclosures"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Emit the record as JSON (default).
    #[arg(long, global = true)]
    json: bool,

    /// Emit CSV rows instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    csv: bool,

    /// Worker threads for parallel engines; 0 picks the number of cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Directory for cached result records (or set PRIMLIM_CACHE).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Skip cache lookup and store for this invocation.
    #[arg(long, global = true)]
    no_cache: bool,

    /// Approximate memo/state budget in bytes for the counting engines.
    #[arg(long, global = true, value_name = "BYTES")]
    memo_budget: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Number of subsets of {1..n} in which no element divides another.
    Fn {
        #[arg(long)]
        n: u64,
    },
    /// k-core count of {1..n} via the rough-part product decomposition.
    Fnk {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        /// Report rigorous log2 bounds instead of the full decimal count.
        #[arg(long)]
        log2_only: bool,
    },
    /// Number of primitive subsets of the k-smooth numbers <= x.
    Pk {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        x: u64,
    },
    /// Rigorous enclosure of the growth constant of the k-core counts.
    Alpha {
        #[arg(long)]
        k: usize,
        /// Truncation level; must be a power of two >= 2.
        #[arg(long = "L")]
        l_trunc: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Check every identity and inequality over a parameter range.
    Verify {
        #[arg(long)]
        n_max: u64,
        #[arg(long)]
        k_max: usize,
    },
    /// Gap between the finite-n growth rate and the enclosure midpoint.
    Gap {
        #[arg(long, conflicts_with = "table")]
        n: Option<u64>,
        #[arg(long)]
        k: usize,
        /// Truncation level for the reference enclosure.
        #[arg(long = "L")]
        l_trunc: Option<u64>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Report the gap for n in {10^3, 10^4, 10^5, 10^6}.
        #[arg(long)]
        table: bool,
    },
    /// Compare the counting engines on a fixed instance ladder.
    Bench,
    /// List the basis-smooth numbers up to x.
    Smooth {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        k: usize,
    },
}

/// Entry point used by `main`; also callable in-process for tests.
/// `argv[0]` is the program name.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not usage errors
            return if e.use_stderr() {
                let _ = write!(err, "{e}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{e}");
                EXIT_OK
            };
        }
    };
    if cli.common.threads > 0 {
        // a prior in-process run may already have pinned the pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.common.threads)
            .build_global();
    }
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(Error::Parameter(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Error::ResourceLimit(msg)) => {
            let _ = writeln!(err, "error: resource limit exceeded: {msg}");
            EXIT_RESOURCE
        }
        Err(Error::Io(e)) => {
            let _ = writeln!(err, "error: io: {e}");
            EXIT_USAGE
        }
    }
}

pub fn run_from_env() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run(&argv, &mut out, &mut err)
}

fn count_config(common: &Common) -> CountConfig {
    let mut cfg = CountConfig::default();
    if let Some(budget) = common.memo_budget {
        cfg.memo_budget_bytes = budget;
    }
    cfg
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = count_config(&cli.common);
    match &cli.cmd {
        Cmd::Fn { n } => {
            let params = params([("n", n.to_string())]);
            let record = cached_compute(&cli.common, "fn", params, || {
                Ok(Value::String(fn_exact_with(*n, &cfg)?.to_string()))
            })?;
            emit(&cli.common, &record, out)?;
            Ok(EXIT_OK)
        }
        Cmd::Fnk { n, k, log2_only } => {
            let mut p = params([("n", n.to_string()), ("k", k.to_string())]);
            if *log2_only {
                p.insert("log2_only".into(), "true".into());
            }
            let record = cached_compute(&cli.common, "fnk", p, || {
                let mut engine = PkEngine::with_config(PrimeBasis::new(*k)?, cfg.clone());
                if *log2_only {
                    let (lo, hi) = fnk_log2_bounds(*n, &mut engine)?;
                    Ok(json!({ "log2_lower": lo, "log2_upper": hi }))
                } else {
                    Ok(Value::String(fnk_product_with(*n, &mut engine)?.to_string()))
                }
            })?;
            emit(&cli.common, &record, out)?;
            Ok(EXIT_OK)
        }
        Cmd::Pk { k, x } => {
            let p = params([("k", k.to_string()), ("x", x.to_string())]);
            let record = cached_compute(&cli.common, "pk", p, || {
                let basis = PrimeBasis::new(*k)?;
                Ok(Value::String(
                    count_smooth_primitive_with(*x, &basis, &cfg)?.to_string(),
                ))
            })?;
            emit(&cli.common, &record, out)?;
            Ok(EXIT_OK)
        }
        Cmd::Alpha { k, l_trunc, tol } => {
            let p = params([
                ("k", k.to_string()),
                ("L", l_trunc.to_string()),
                ("tol", format!("{tol:e}")),
            ]);
            let record = cached_compute(&cli.common, "alpha", p, || {
                let mut engine = PkEngine::with_config(PrimeBasis::new(*k)?, cfg.clone());
                let enc = alpha_k_enclosure_with(&mut engine, *l_trunc, *tol)?;
                Ok(enclosure_value(&enc))
            })?;
            emit(&cli.common, &record, out)?;
            Ok(EXIT_OK)
        }
        Cmd::Verify { n_max, k_max } => {
            let report = verify_inequalities(*n_max, *k_max)?;
            let p = params([("n_max", n_max.to_string()), ("k_max", k_max.to_string())]);
            let record = finish_record("verify", p, report_value(&report));
            emit(&cli.common, &record, out)?;
            Ok(if report.all_passed() {
                EXIT_OK
            } else {
                EXIT_VERIFICATION
            })
        }
        Cmd::Gap {
            n,
            k,
            l_trunc,
            tol,
            table,
        } => {
            let l_trunc = l_trunc.unwrap_or(if *k == 1 { 1 << 20 } else { 1 << 12 });
            let mut engine = PkEngine::with_config(PrimeBasis::new(*k)?, cfg.clone());
            let enc = alpha_k_enclosure_with(&mut engine, l_trunc, *tol)?;
            if *table {
                let p = params([
                    ("k", k.to_string()),
                    ("L", l_trunc.to_string()),
                    ("table", "true".into()),
                ]);
                let mut rows = Vec::new();
                for n in [1_000u64, 10_000, 100_000, 1_000_000] {
                    let gap = finite_n_gap_with(n, &mut engine, &enc)?;
                    rows.push(json!({ "n": n, "gap": gap }));
                }
                let record = finish_record(
                    "gap",
                    p,
                    json!({ "midpoint_log2": enc.midpoint_log2(), "rows": rows }),
                );
                emit(&cli.common, &record, out)?;
                return Ok(EXIT_OK);
            }
            let n = n.ok_or_else(|| Error::parameter("gap needs --n or --table"))?;
            let p = params([
                ("n", n.to_string()),
                ("k", k.to_string()),
                ("L", l_trunc.to_string()),
            ]);
            let record = cached_compute(&cli.common, "gap", p, || {
                let gap = finite_n_gap_with(n, &mut engine, &enc)?;
                Ok(json!({ "gap": gap, "midpoint_log2": enc.midpoint_log2() }))
            })?;
            emit(&cli.common, &record, out)?;
            Ok(EXIT_OK)
        }
        Cmd::Bench => {
            let (value, agreed) = run_bench(&cfg)?;
            let record = finish_record("bench", BTreeMap::new(), value);
            emit(&cli.common, &record, out)?;
            Ok(if agreed { EXIT_OK } else { EXIT_VERIFICATION })
        }
        Cmd::Smooth { x, k } => {
            let p = params([("x", x.to_string()), ("k", k.to_string())]);
            let record = cached_compute(&cli.common, "smooth", p, || {
                let basis = PrimeBasis::new(*k)?;
                let values = enumerate_smooth(*x, &basis)?;
                Ok(json!({ "count": values.len(), "values": values }))
            })?;
            emit(&cli.common, &record, out)?;
            Ok(EXIT_OK)
        }
    }
}

fn params<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn enclosure_value(enc: &AlphaEnclosure) -> Value {
    json!({
        "k": enc.k(),
        "L": enc.l_trunc(),
        "lower_log2": enc.lower_log2(),
        "upper_log2": enc.upper_log2(),
        "lower": enc.lower_value(),
        "upper": enc.upper_value(),
        "width": enc.width_value(),
        "error_budget": enc.error_budget(),
    })
}

fn report_value(report: &VerificationReport) -> Value {
    json!({
        "all_passed": report.all_passed(),
        "checks": report.checks.iter().map(|c| json!({
            "name": c.name,
            "params": c.params,
            "pass": c.passed,
            "witness": c.witness,
        })).collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------------------
// record assembly, timestamps, cache
// ---------------------------------------------------------------------------

fn pinned_epoch() -> Option<u64> {
    std::env::var(EPOCH_ENV).ok()?.parse().ok()
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(SystemTime::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Days-to-civil conversion (proleptic Gregorian), then clock-of-day.
fn iso8601(unix_secs: u64) -> String {
    let days = (unix_secs / 86_400) as i64;
    let secs = unix_secs % 86_400;
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = yoe + era * 400 + i64::from(m <= 2);
    format!(
        "{y:04}-{m:02}-{d:02}T{:02}:{:02}:{:02}Z",
        secs / 3600,
        secs % 3600 / 60,
        secs % 60
    )
}

fn finish_record(op: &str, params: BTreeMap<String, String>, result: Value) -> ResultRecord {
    let (timestamp, runtime_ms) = match pinned_epoch() {
        Some(epoch) => (iso8601(epoch), 0),
        None => (iso8601(unix_now()), 0),
    };
    ResultRecord {
        schema_version: SCHEMA_VERSION,
        op: op.to_string(),
        params,
        result,
        timestamp,
        runtime_ms,
    }
}

fn canonical_key(op: &str, params: &BTreeMap<String, String>) -> String {
    let mut key = format!("v{SCHEMA_VERSION}|{op}");
    for (k, v) in params {
        key.push('|');
        key.push_str(k);
        key.push('=');
        key.push_str(v);
    }
    key
}

fn cache_file(dir: &Path, key: &str) -> PathBuf {
    let digest = Sha256::digest(key.as_bytes());
    let mut name = String::with_capacity(68);
    for byte in digest {
        name.push_str(&format!("{byte:02x}"));
    }
    name.push_str(".json");
    dir.join(name)
}

fn cache_dir(common: &Common) -> Option<PathBuf> {
    if common.no_cache {
        return None;
    }
    common
        .cache_dir
        .clone()
        .or_else(|| std::env::var(CACHE_ENV).ok().map(PathBuf::from))
}

/// Returns the cached record for the canonical key of `(op, params)` when
/// present and schema-compatible; otherwise computes, stores best-effort,
/// and returns. Unreadable or mismatched cache entries are ignored and
/// recomputed, never fatal. With `dir = None` the cache is bypassed.
pub fn cache_lookup_store(
    dir: Option<&Path>,
    op: &str,
    params: &BTreeMap<String, String>,
    compute: impl FnOnce() -> Result<Value>,
) -> Result<ResultRecord> {
    let key = canonical_key(op, params);
    let path = dir.map(|d| cache_file(d, &key));
    if let Some(path) = &path {
        if let Ok(text) = std::fs::read_to_string(path) {
            if let Ok(record) = serde_json::from_str::<ResultRecord>(&text) {
                if record.schema_version == SCHEMA_VERSION
                    && record.op == op
                    && &record.params == params
                {
                    return Ok(record);
                }
            }
        }
    }
    let started = Instant::now();
    let result = compute()?;
    let mut record = finish_record(op, params.clone(), result);
    if pinned_epoch().is_none() {
        record.runtime_ms = started.elapsed().as_millis() as u64;
    }
    if let Some(path) = &path {
        if let Some(parent) = path.parent() {
            let _ = std::fs::create_dir_all(parent);
        }
        if let Ok(text) = serde_json::to_string(&record) {
            let _ = std::fs::write(path, text);
        }
    }
    Ok(record)
}

fn cached_compute(
    common: &Common,
    op: &str,
    params: BTreeMap<String, String>,
    compute: impl FnOnce() -> Result<Value>,
) -> Result<ResultRecord> {
    let dir = cache_dir(common);
    cache_lookup_store(dir.as_deref(), op, &params, compute)
}

// ---------------------------------------------------------------------------
// output
// ---------------------------------------------------------------------------

fn emit(common: &Common, record: &ResultRecord, out: &mut dyn Write) -> Result<()> {
    if common.csv {
        write_csv(record, out)?;
    } else {
        let text = serde_json::to_string(record).expect("record serializes");
        writeln!(out, "{text}")?;
    }
    Ok(())
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn csv_row(out: &mut dyn Write, fields: &[String]) -> std::io::Result<()> {
    let row: Vec<String> = fields.iter().map(|f| csv_escape(f)).collect();
    writeln!(out, "{}", row.join(","))
}

fn value_field(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Stable per-op CSV shapes; volatile fields (timestamp, runtime) are
/// deliberately excluded so CSV output is reproducible.
fn write_csv(record: &ResultRecord, out: &mut dyn Write) -> std::io::Result<()> {
    match record.op.as_str() {
        "verify" => {
            csv_row(out, &["name".into(), "params".into(), "pass".into(), "witness".into()])?;
            for check in record.result["checks"].as_array().into_iter().flatten() {
                csv_row(
                    out,
                    &[
                        value_field(&check["name"]),
                        value_field(&check["params"]),
                        value_field(&check["pass"]),
                        value_field(&check["witness"]),
                    ],
                )?;
            }
        }
        "smooth" => {
            csv_row(out, &["op".into(), "x".into(), "k".into(), "index".into(), "value".into()])?;
            for (i, v) in record.result["values"].as_array().into_iter().flatten().enumerate() {
                csv_row(
                    out,
                    &[
                        record.op.clone(),
                        record.params["x"].clone(),
                        record.params["k"].clone(),
                        i.to_string(),
                        value_field(v),
                    ],
                )?;
            }
        }
        "bench" => {
            csv_row(
                out,
                &["instance".into(), "engine".into(), "count".into(), "runtime_ms".into(), "agree".into()],
            )?;
            for row in record.result["rows"].as_array().into_iter().flatten() {
                csv_row(
                    out,
                    &[
                        value_field(&row["instance"]),
                        value_field(&row["engine"]),
                        value_field(&row["count"]),
                        value_field(&row["runtime_ms"]),
                        value_field(&row["agree"]),
                    ],
                )?;
            }
        }
        "gap" if record.result.get("rows").is_some() => {
            csv_row(out, &["op".into(), "k".into(), "L".into(), "n".into(), "gap".into()])?;
            for row in record.result["rows"].as_array().into_iter().flatten() {
                csv_row(
                    out,
                    &[
                        record.op.clone(),
                        record.params["k"].clone(),
                        record.params["L"].clone(),
                        value_field(&row["n"]),
                        value_field(&row["gap"]),
                    ],
                )?;
            }
        }
        _ => {
            // single-result ops: one header, one row of params then payload
            let mut header: Vec<String> = vec!["op".into()];
            let mut row: Vec<String> = vec![record.op.clone()];
            for (k, v) in &record.params {
                header.push(k.clone());
                row.push(v.clone());
            }
            match &record.result {
                Value::Object(map) => {
                    // result keys echoing a parameter (alpha repeats k and L)
                    // would duplicate columns; the parameter wins
                    for (k, v) in map.iter().filter(|(k, _)| !record.params.contains_key(*k)) {
                        header.push(k.clone());
                        row.push(value_field(v));
                    }
                }
                other => {
                    header.push("result".into());
                    row.push(value_field(other));
                }
            }
            csv_row(out, &header)?;
            csv_row(out, &row)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// benchmark ladder
// ---------------------------------------------------------------------------

fn bench_row(instance: &str, engine: &str, count: String, ms: u128) -> Value {
    json!({ "instance": instance, "engine": engine, "count": count, "runtime_ms": ms as u64, "agree": true })
}

/// Runs every applicable engine on a fixed ladder of instances; rows carry
/// the engine's count and runtime, and any disagreement flips `agreed`.
fn run_bench(cfg: &CountConfig) -> Result<(Value, bool)> {
    let mut rows: Vec<Value> = Vec::new();
    let mut agreed = true;

    let mut record_group = |rows: &mut Vec<Value>, instance: String, results: Vec<(&str, String, u128)>| {
        let baseline = results.first().map(|(_, c, _)| c.clone());
        let group_ok = results
            .iter()
            .all(|(_, c, _)| Some(c) == baseline.as_ref());
        if !group_ok {
            agreed = false;
        }
        for (engine, count, ms) in results {
            let mut row = bench_row(&instance, engine, count, ms);
            row["agree"] = Value::Bool(group_ok);
            rows.push(row);
        }
    };

    // prefix sets {1..n}: oracle vs branching
    for n in [12u64, 16, 20] {
        let elements: Vec<u64> = (1..=n).collect();
        let mut results = Vec::new();
        if elements.len() <= ORACLE_CAP {
            let t = Instant::now();
            let c = count_primitive_subsets_oracle(&elements)?;
            results.push(("oracle", c.to_string(), t.elapsed().as_millis()));
        }
        let t = Instant::now();
        let c = count_antichains_with(&elements, cfg)?;
        results.push(("branching", c.to_string(), t.elapsed().as_millis()));
        let t = Instant::now();
        let c = count_kcore_subsets_with(n, &PrimeBasis::new(crate::arith::MAX_BASIS)?, cfg)?;
        results.push(("kcore-max-basis", c.to_string(), t.elapsed().as_millis()));
        record_group(&mut rows, format!("prefix n={n}"), results);
    }

    // smooth ground sets: grid sweep vs branching vs oracle where they fit
    for (k, xs) in [(2usize, vec![100u64, 1_000, 10_000, 1_000_000]), (3, vec![50, 200, 400])] {
        let basis = PrimeBasis::new(k)?;
        for x in xs {
            let elements = enumerate_smooth(x, &basis)?;
            let mut results = Vec::new();
            let t = Instant::now();
            let c = count_smooth_primitive_with(x, &basis, cfg)?;
            results.push(("grid", c.to_string(), t.elapsed().as_millis()));
            if elements.len() <= 64 {
                let t = Instant::now();
                let c = count_antichains_with(&elements, cfg)?;
                results.push(("branching", c.to_string(), t.elapsed().as_millis()));
            }
            if elements.len() <= ORACLE_CAP {
                let t = Instant::now();
                let c = count_primitive_subsets_oracle(&elements)?;
                results.push(("oracle", c.to_string(), t.elapsed().as_millis()));
            }
            record_group(&mut rows, format!("smooth k={k} x={x}"), results);
        }
    }

    Ok((json!({ "agreed": agreed, "rows": rows }), agreed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iso_format_known_dates() {
        assert_eq!(iso8601(0), "1970-01-01T00:00:00Z");
        assert_eq!(iso8601(86_399), "1970-01-01T23:59:59Z");
        assert_eq!(iso8601(951_782_400), "2000-02-29T00:00:00Z");
        assert_eq!(iso8601(1_754_006_400), "2025-08-01T00:00:00Z");
    }

    #[test]
    fn canonical_keys_are_order_independent() {
        let a = params([("n", "10".into()), ("k", "2".into())]);
        let b = params([("k", "2".into()), ("n", "10".into())]);
        assert_eq!(canonical_key("fnk", &a), canonical_key("fnk", &b));
        assert_ne!(canonical_key("fnk", &a), canonical_key("fn", &a));
    }

    #[test]
    fn csv_escaping() {
        assert_eq!(csv_escape("plain"), "plain");
        assert_eq!(csv_escape("a,b"), "\"a,b\"");
        assert_eq!(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let argv: Vec<String> = std::iter::once("primlim")
            .chain(args.iter().copied())
            .map(String::from)
            .collect();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(&argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn fn_subcommand_reports_known_count() {
        let (code, out, _) = run_capture(&["fn", "--n", "10"]);
        assert_eq!(code, EXIT_OK);
        let record: ResultRecord = serde_json::from_str(&out).unwrap();
        assert_eq!(record.result, Value::String("103".into()));
        assert_eq!(record.schema_version, 1);
        assert_eq!(record.params["n"], "10");
    }

    #[test]
    fn usage_and_resource_exit_codes() {
        let (code, _, err) = run_capture(&["fn", "--bogus"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!err.is_empty());

        let (code, _, _) = run_capture(&["fn", "--n", "100"]);
        assert_eq!(code, EXIT_RESOURCE);

        let (code, _, _) = run_capture(&["fn", "--n", "0"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn verify_failure_exit_code_is_distinct() {
        // out-of-range parameters are usage errors, not verification failures
        let (code, _, _) = run_capture(&["verify", "--n-max", "50", "--k-max", "1"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn csv_single_result_shape() {
        let (code, out, _) = run_capture(&["--csv", "pk", "--k", "2", "--x", "10"]);
        assert_eq!(code, EXIT_OK);
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some("op,k,x,result"));
        assert_eq!(lines.next(), Some("pk,2,10,19"));
    }
}
