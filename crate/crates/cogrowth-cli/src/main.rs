//! Command-line driver: compiles polynomials into gadgets and generating
//! sets, counts cogrowth sequences, runs the congruence and charge checks,
//! and renders reports.
//!
//! Exit codes: 0 when all requested checks pass, 1 on a mathematical
//! mismatch, 2 on usage or resource errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;

use cogrowth_core::charge::{dalg_hypothesis_check, kummer_scan, net_charge_scan};
use cogrowth_core::congruence::{detect_root_signal, verify_modulos};
use cogrowth_core::engine::{cogrowth_sequence, CountMode, EngineConfig, Strategy};
use cogrowth_core::gadget::{
    charge_extend, compile_basic, compile_subword, compile_sync, size_report,
    verify_gadget_identity,
};
use cogrowth_core::genset::build_st;
use cogrowth_core::poly::{root_search_box, separate, separation_report};
use cogrowth_core::{Error as CoreError, GadgetSet, GeneratingSet, MultiPoly};

#[derive(Parser)]
#[command(
    name = "cogrowth",
    about = "Cogrowth counting and Diophantine gadget compilation for unitriangular matrix groups",
    version
)]
struct Cli {
    /// Worker threads for walk-table expansion.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Cap on walk-table entries (also COGROWTH_MEMORY_CAP).
    #[arg(long, global = true)]
    memory_cap: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a polynomial into a matrix gadget (and optionally the S/T
    /// generating sets).
    Compile(CompileArgs),
    /// Cogrowth sequence of a generating set.
    Count(CountArgs),
    /// Verification suites.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// First length at which the two sequences differ modulo u^10.
    Detect(DetectArgs),
    /// Root-separation transform.
    Separate(SeparateArgs),
    /// Integer roots in a box.
    Roots(RootsArgs),
    /// Charged-generator checks.
    #[command(subcommand)]
    Charge(ChargeCmd),
    /// Render a previously written JSON report as a text table.
    Report(ReportArgs),
}

#[derive(Args)]
struct CompileArgs {
    /// Polynomial: a JSON file path or a literal like "x1^2 - 2".
    #[arg(long)]
    poly: String,
    #[arg(long, default_value = "subword")]
    level: String,
    /// Accept degree-1 polynomials at subword level.
    #[arg(long)]
    allow_deg1: bool,
    /// Output path for the gadget JSON.
    #[arg(long)]
    out: PathBuf,
    /// Also build the S/T generating sets with this weight parameter.
    #[arg(long)]
    st_u: Option<String>,
    #[arg(long, requires = "st_u")]
    s_out: Option<PathBuf>,
    #[arg(long, requires = "st_u")]
    t_out: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    /// Generating-set JSON file.
    #[arg(long)]
    genset: PathBuf,
    #[arg(long)]
    nmax: usize,
    /// "exact" or "mod:M".
    #[arg(long, default_value = "exact")]
    mode: String,
    /// "frontier", "mitm", or "auto".
    #[arg(long, default_value = "auto")]
    strategy: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Check the eight-factor identity over a box of points.
    Gadget(VerifyGadgetArgs),
    /// Check the congruence between the S and T sequences.
    Modulos(VerifyModulosArgs),
}

#[derive(Args)]
struct VerifyGadgetArgs {
    #[arg(long)]
    poly: String,
    /// Verify a previously compiled gadget instead of recompiling.
    #[arg(long)]
    gadget: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    r#box: u64,
    /// Level to compile when no gadget file is given; "all" checks
    /// basic, sync, and subword.
    #[arg(long, default_value = "all")]
    level: String,
    #[arg(long)]
    allow_deg1: bool,
}

#[derive(Args)]
struct VerifyModulosArgs {
    #[arg(long)]
    poly: String,
    #[arg(long, default_value = "16")]
    u: String,
    #[arg(long)]
    nmax: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    poly: String,
    #[arg(long, default_value = "16")]
    u: String,
    #[arg(long)]
    nmax: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SeparateArgs {
    #[arg(long)]
    poly: String,
    #[arg(long)]
    out: PathBuf,
    /// Also search this box for roots of the input and report the lifted
    /// roots of the output.
    #[arg(long)]
    r#box: Option<u64>,
}

#[derive(Args)]
struct RootsArgs {
    #[arg(long)]
    poly: String,
    #[arg(long)]
    r#box: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ChargeCmd {
    /// Net-charge brute force on a charged toy gadget.
    Verify(ChargeVerifyArgs),
    /// Binomial parity grid: carry criterion vs direct computation.
    Kummer(ChargeKummerArgs),
    /// Finite-prefix checks of the odd-spacing hypotheses.
    Dalg(ChargeDalgArgs),
}

#[derive(Args)]
struct ChargeVerifyArgs {
    #[arg(long)]
    poly: String,
    #[arg(long, default_value_t = 8)]
    max_letters: usize,
}

#[derive(Args)]
struct ChargeKummerArgs {
    #[arg(long, default_value_t = 10)]
    xmax: u64,
    #[arg(long, default_value_t = 1024)]
    vmax: u64,
}

#[derive(Args)]
struct ChargeDalgArgs {
    /// File holding the marked indices (whitespace/comma separated).
    #[arg(long)]
    nseq: PathBuf,
    /// Optional file of sequence parities by index.
    #[arg(long)]
    lambda: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    window: u32,
    /// Window slack constant for the multiset condition.
    #[arg(long, default_value_t = 4)]
    c: u64,
    /// Multiset size for the multiset condition.
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON report written by another subcommand.
    #[arg(long)]
    input: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn engine_config(cli_workers: usize, cli_cap: Option<usize>) -> EngineConfig {
    let mut config = EngineConfig {
        workers: cli_workers,
        ..EngineConfig::default()
    };
    let env_cap = std::env::var("COGROWTH_MEMORY_CAP")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(cap) = cli_cap.or(env_cap) {
        config.max_table_entries = cap;
    }
    config
}

/// Accepts either a path to polynomial JSON or an inline literal.
fn load_poly(spec: &str) -> anyhow::Result<MultiPoly> {
    let path = Path::new(spec);
    if path.exists() {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading polynomial file {}", path.display()))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .with_context(|| format!("parsing JSON in {}", path.display()))?;
        return Ok(MultiPoly::from_json(&value)?);
    }
    if spec.ends_with(".json") {
        bail!("polynomial file {spec} does not exist");
    }
    Ok(MultiPoly::parse(spec)?)
}

fn parse_biguint(s: &str) -> anyhow::Result<BigUint> {
    s.parse::<BigUint>()
        .map_err(|e| anyhow!("bad integer {s:?}: {e}"))
}

fn write_json(path: &Path, value: &serde_json::Value) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn compile_level(f: &MultiPoly, level: &str, allow_deg1: bool) -> anyhow::Result<GadgetSet> {
    Ok(match level {
        "basic" => compile_basic(f),
        "sync" => compile_sync(f),
        "subword" => compile_subword(f, allow_deg1)?,
        "charged" => charge_extend(&compile_subword(f, allow_deg1)?)?,
        other => bail!("unknown level {other:?}; expected basic, sync, subword, or charged"),
    })
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let config = engine_config(cli.workers, cli.memory_cap);
    match cli.cmd {
        Cmd::Compile(args) => {
            let f = load_poly(&args.poly)?;
            let gadget = compile_level(&f, &args.level, args.allow_deg1)?;
            let bound = size_report(gadget.degree.max(1), gadget.k as u32);
            write_json(&args.out, &gadget.to_json())?;
            println!(
                "compiled {} gadget: dim {} (level bound {}), degree {}, {} variable(s)",
                gadget.level.name(),
                gadget.dim,
                bound.for_level(gadget.level),
                gadget.degree,
                gadget.k
            );
            if let Some(u_str) = args.st_u {
                let u = parse_biguint(&u_str)?;
                let st = build_st(&gadget, &u)?;
                println!(
                    "generating sets: dim {}, |S| = {} distinct, |T| = {} distinct",
                    st.s.dim(),
                    st.s.len(),
                    st.t.len()
                );
                if let Some(p) = args.s_out {
                    write_json(&p, &st.s.to_json())?;
                }
                if let Some(p) = args.t_out {
                    write_json(&p, &st.t.to_json())?;
                }
            }
            Ok(0)
        }
        Cmd::Count(args) => {
            let text = fs::read_to_string(&args.genset)
                .with_context(|| format!("reading generating set {}", args.genset.display()))?;
            let set = GeneratingSet::from_json(&serde_json::from_str(&text)?)?;
            let mode = CountMode::parse(&args.mode)?;
            let mut config = config;
            config.strategy = Strategy::parse(&args.strategy)?;
            let result = cogrowth_sequence(&set, args.nmax, &mode, &config)?;
            print!("{}", result.to_text());
            println!(
                "mode: {}, strategy: {}",
                result.mode.name(),
                result.strategy_used.name()
            );
            if let Some(p) = args.out {
                write_json(&p, &result.to_json())?;
            }
            Ok(0)
        }
        Cmd::Verify(VerifyCmd::Gadget(args)) => {
            let f = load_poly(&args.poly)?;
            let mut failures = 0u64;
            let checks: Vec<(String, GadgetSet)> = if let Some(path) = args.gadget {
                let text = fs::read_to_string(&path)
                    .with_context(|| format!("reading gadget {}", path.display()))?;
                let gadget = GadgetSet::from_json(&serde_json::from_str(&text)?)?;
                vec![(format!("{} (from file)", gadget.level.name()), gadget)]
            } else if args.level == "all" {
                let mut v = vec![
                    ("basic".to_string(), compile_basic(&f)),
                    ("sync".to_string(), compile_sync(&f)),
                ];
                match compile_subword(&f, args.allow_deg1 || f.degree() == 1) {
                    Ok(g) => v.push(("subword".to_string(), g)),
                    Err(CoreError::DegreeTooLow(_)) => {}
                    Err(e) => return Err(e.into()),
                }
                v
            } else {
                vec![(
                    args.level.clone(),
                    compile_level(&f, &args.level, args.allow_deg1)?,
                )]
            };
            for (name, gadget) in checks {
                let check = verify_gadget_identity(&gadget, &f, args.r#box)?;
                let status = if check.failures.is_empty() {
                    "ok"
                } else {
                    "FAILED"
                };
                println!(
                    "{name}: dim {}, {} points checked, {} failures ... {status}",
                    check.dim,
                    check.points_checked,
                    check.failures.len()
                );
                failures += check.failures.len() as u64;
            }
            Ok(if failures == 0 { 0 } else { 1 })
        }
        Cmd::Verify(VerifyCmd::Modulos(args)) => {
            let f = load_poly(&args.poly)?;
            let u = parse_biguint(&args.u)?;
            let report = verify_modulos(&f, &u, args.nmax, &config)?;
            print!("{}", report.to_text());
            if let Some(p) = args.out {
                write_json(&p, &report.to_json())?;
            }
            Ok(if report.all_match() { 0 } else { 1 })
        }
        Cmd::Detect(args) => {
            let f = load_poly(&args.poly)?;
            let u = parse_biguint(&args.u)?;
            let (signal, report) = detect_root_signal(&f, &u, args.nmax, &config)?;
            match signal {
                Some(n) => println!("signal: sequences differ first at n = {n}"),
                None => println!("no signal up to n = {}", report.checked_up_to),
            }
            print!("{}", report.to_text());
            if let Some(p) = args.out {
                write_json(&p, &report.to_json())?;
            }
            Ok(if report.all_match() { 0 } else { 1 })
        }
        Cmd::Separate(args) => {
            let g = load_poly(&args.poly)?;
            let out = separate(&g);
            write_json(&args.out, &out.to_json())?;
            println!(
                "separated polynomial: degree {} in {} variables, {} terms (degree bound {})",
                out.degree(),
                out.k(),
                out.terms().count(),
                (2 * g.degree()).max(4 * g.k() as u32 + 12)
            );
            if let Some(b) = args.r#box {
                let report = separation_report(&g, b)?;
                for (root, norm) in report.lifted_roots.iter().zip(&report.lifted_norms) {
                    let coords: Vec<String> = root.iter().map(|v| v.to_string()).collect();
                    println!("lifted root ({}) with norm {}", coords.join(", "), norm);
                }
                println!(
                    "norms even: {}, norms distinct: {}",
                    report.all_norms_even, report.norms_distinct
                );
            }
            Ok(0)
        }
        Cmd::Roots(args) => {
            let f = load_poly(&args.poly)?;
            let roots = root_search_box(&f, args.r#box)?;
            for r in &roots {
                let coords: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                println!("({})", coords.join(", "));
            }
            println!(
                "{} root(s) in [-{}, {}]^{}",
                roots.len(),
                args.r#box,
                args.r#box,
                f.k()
            );
            if let Some(p) = args.out {
                let value = serde_json::json!({
                    "poly": f.to_json(),
                    "box": args.r#box,
                    "roots": roots
                        .iter()
                        .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                });
                write_json(&p, &value)?;
            }
            Ok(0)
        }
        Cmd::Charge(ChargeCmd::Verify(args)) => {
            let f = load_poly(&args.poly)?;
            let scan = net_charge_scan(&f, args.max_letters)?;
            println!(
                "base cogrowth words: {}, assignments multiplied: {}",
                scan.base_cogrowth_words, scan.assignments_checked
            );
            println!(
                "equivalence (cogrowth iff all part charges zero): {}",
                scan.equivalence_holds
            );
            println!(
                "projection to uncharged letters: {}",
                scan.projection_verified
            );
            println!(
                "non-cogrowth spot checks: {} (all non-cogrowth: {})",
                scan.noncogrowth_checked, scan.noncogrowth_all_noncogrowth
            );
            for (len, gamma) in &scan.gamma_by_length {
                println!("charged cogrowth count at length {len}: {gamma}");
            }
            let ok = scan.equivalence_holds
                && scan.projection_verified
                && scan.noncogrowth_all_noncogrowth;
            Ok(if ok { 0 } else { 1 })
        }
        Cmd::Charge(ChargeCmd::Kummer(args)) => {
            let scan = kummer_scan(args.xmax, args.vmax);
            println!(
                "grid 0..={} x 0..={}: {} odd binomials",
                scan.x_max, scan.v_max, scan.odd_count
            );
            println!(
                "carry criterion vs direct computation: {} disagreement(s)",
                scan.carry_vs_direct.len()
            );
            println!(
                "stated necessary condition missed {} odd point(s): {:?}",
                scan.criterion_violations.len(),
                scan.criterion_violations
            );
            println!(
                "stated condition held at {} even point(s) (not sufficient), e.g. {:?}",
                scan.criterion_not_sufficient, scan.not_sufficient_samples
            );
            Ok(if scan.carry_vs_direct.is_empty() { 0 } else { 1 })
        }
        Cmd::Charge(ChargeCmd::Dalg(args)) => {
            let n_seq = read_integers(&args.nseq)?;
            let lambda: Vec<u8> = match &args.lambda {
                Some(path) => read_integers(path)?
                    .into_iter()
                    .map(|v| (v & 1) as u8)
                    .collect(),
                None => Vec::new(),
            };
            let report = dalg_hypothesis_check(&n_seq, &lambda, args.window, args.c, args.d);
            print!("{}", report.to_text());
            if let Some(p) = args.out {
                write_json(&p, &report.to_json())?;
            }
            let ok = report.all_known_odd && report.window_violations.is_empty();
            Ok(if ok { 0 } else { 1 })
        }
        Cmd::Report(args) => {
            let text = fs::read_to_string(&args.input)
                .with_context(|| format!("reading report {}", args.input.display()))?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            print!("{}", render_report(&value)?);
            Ok(0)
        }
    }
}

fn read_integers(path: &Path) -> anyhow::Result<Vec<u64>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<u64>()
                .map_err(|e| anyhow!("bad integer {s:?} in {}: {e}", path.display()))
        })
        .collect()
}

/// Renders any of the JSON reports this binary writes back into the text
/// table form, keyed off the fields present.
fn render_report(value: &serde_json::Value) -> anyhow::Result<String> {
    // Congruence report.
    if let Some(rows) = value.get("rows").and_then(|r| r.as_array()) {
        let mut out = String::new();
        out.push_str(&format!(
            "congruence report: u = {}, modulus = {}, checked up to n = {}\n",
            value["u"].as_str().unwrap_or("?"),
            value["modulus"].as_str().unwrap_or("?"),
            value["checked_up_to"]
        ));
        out.push_str(&format!(
            "{:>4}  {:>16}  {:>16}  {:>9}  match\n",
            "n", "lhs", "rhs", "c_(n-1)"
        ));
        for r in rows {
            out.push_str(&format!(
                "{:>4}  {:>16}  {:>16}  {:>9}  {}\n",
                r["n"],
                r["lhs"].as_str().unwrap_or("?"),
                r["rhs"].as_str().unwrap_or("?"),
                r["pattern_prev"].as_str().unwrap_or("?"),
                if r["match"].as_bool().unwrap_or(false) {
                    "yes"
                } else {
                    "NO"
                }
            ));
        }
        out.push_str(&format!("all rows match: {}\n", value["all_match"]));
        return Ok(out);
    }
    // Sequence output.
    if let (Some(ns), Some(counts)) = (
        value.get("n").and_then(|n| n.as_array()),
        value.get("count").and_then(|c| c.as_array()),
    ) {
        let mut out = String::new();
        out.push_str(&format!(
            "cogrowth sequence ({}, {})\n",
            value["mode"].as_str().unwrap_or("?"),
            value["strategy"].as_str().unwrap_or("?")
        ));
        for (n, c) in ns.iter().zip(counts) {
            out.push_str(&format!("{:>4}  {}\n", n, c.as_str().unwrap_or("?")));
        }
        return Ok(out);
    }
    // Root list.
    if let Some(roots) = value.get("roots").and_then(|r| r.as_array()) {
        let mut out = String::new();
        for r in roots {
            let coords: Vec<String> = r
                .as_array()
                .map(|a| {
                    a.iter()
                        .map(|v| v.as_str().unwrap_or("?").to_string())
                        .collect()
                })
                .unwrap_or_default();
            out.push_str(&format!("({})\n", coords.join(", ")));
        }
        out.push_str(&format!("{} root(s)\n", roots.len()));
        return Ok(out);
    }
    bail!("unrecognized report shape (expected a congruence, sequence, or roots report)")
}
