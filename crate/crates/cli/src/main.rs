//! Command-line front door: sampling, Θ checking, classification,
//! decomposition, staged analysis, the oracle sweep, and the Monte Carlo
//! bound comparison — all deterministic given their flags and seeds.
//!
//! Exit codes: 0 = success / agreement; 1 = a property violation was found
//! (failing Θ witness, non-decomposable flip matrix, class outside the
//! switch family, oracle discrepancy, empirical rate above the bound);
//! 2 = usage errors and malformed input files.

mod mapfile;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use switchlab::{
    balanced_split, check_theta, classify_report, decompose, derive_seed, estimate_theta_failure,
    failure_bound_term, find_odd_minor, flip_matrix, mn_analysis, verify_equivalence,
    verify_trace, BipartiteGraph, Error as CoreError, FlipMatrix, SidedMap,
};

#[derive(Parser)]
#[command(
    name = "switchlab",
    version,
    about = "Classify side-preserving reducts of bipartite graphs and probe the extension property",
    propagate_version = true
)]
struct Cli {
    /// Emit line-delimited machine-readable records instead of text reports
    #[arg(long, global = true)]
    records: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a seeded random bipartite graph and write it to a file
    Sample {
        /// Left side size
        #[arg(short)]
        m: usize,
        /// Right side size
        #[arg(short)]
        n: usize,
        /// Seed, decimal or 0x-hex
        #[arg(long, value_parser = parse_seed, default_value = "0")]
        seed: u64,
        /// Output file path
        #[arg(short)]
        o: PathBuf,
    },
    /// Check the extension property on a graph file
    Theta {
        /// Maximum subset size per requirement
        #[arg(short)]
        k: usize,
        /// Graph file
        file: PathBuf,
    },
    /// Classify the flip matrix of a map between two graph files
    Classify {
        /// Source graph file
        #[arg(long)]
        source: PathBuf,
        /// Target graph file
        #[arg(long)]
        target: PathBuf,
        /// Vertex map file
        #[arg(long)]
        map: PathBuf,
    },
    /// Decompose a flip-matrix file into a switch pattern
    Decompose {
        /// Flip matrix file (same grid format as graphs)
        #[arg(long)]
        flip: PathBuf,
    },
    /// Stage-by-stage analysis of a map with block witnesses
    Analyze {
        /// Source graph file
        #[arg(long)]
        source: PathBuf,
        /// Target graph file
        #[arg(long)]
        target: PathBuf,
        /// Vertex map file
        #[arg(long)]
        map: PathBuf,
        /// Witness block rows
        #[arg(short)]
        m: usize,
        /// Witness block columns
        #[arg(short)]
        n: usize,
    },
    /// Exhaustively compare the brute-force oracle with the classifier
    Oracle {
        /// Largest left side to sweep
        #[arg(long)]
        max_left: usize,
        /// Largest right side to sweep
        #[arg(long)]
        max_right: usize,
    },
    /// Monte Carlo failure rates vs the analytic bound over a size sweep
    Sfbsp {
        /// Maximum subset size per requirement
        #[arg(short)]
        k: usize,
        /// Comma-separated total sizes, e.g. 20,40,80
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Trials per size
        #[arg(long)]
        trials: u64,
        /// Master seed, decimal or 0x-hex
        #[arg(long, value_parser = parse_seed, default_value = "0")]
        seed: u64,
    },
}

/// Seed accepted as decimal or 0x-prefixed hexadecimal.
fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        s.parse()
    };
    parsed.map_err(|_| format!("'{}' is not a valid 64-bit seed", s))
}

fn main() -> ExitCode {
    if let Err(msg) = apply_thread_cap() {
        eprintln!("error: {}", msg);
        return ExitCode::from(2);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}

/// Optional THREADS environment variable caps the global thread pool.
/// Results never depend on it; only wall-clock time does.
fn apply_thread_cap() -> Result<(), String> {
    match std::env::var("THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| format!("THREADS must be a positive integer, got '{}'", raw))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| format!("could not configure the thread pool: {}", e))
        }
    }
}

fn run(cli: &Cli) -> Result<u8, String> {
    match &cli.command {
        Command::Sample { m, n, seed, o } => cmd_sample(cli.records, *m, *n, *seed, o),
        Command::Theta { k, file } => cmd_theta(cli.records, *k, file),
        Command::Classify {
            source,
            target,
            map,
        } => cmd_classify(cli.records, source, target, map),
        Command::Decompose { flip } => cmd_decompose(cli.records, flip),
        Command::Analyze {
            source,
            target,
            map,
            m,
            n,
        } => cmd_analyze(cli.records, source, target, map, *m, *n),
        Command::Oracle {
            max_left,
            max_right,
        } => cmd_oracle(cli.records, *max_left, *max_right),
        Command::Sfbsp {
            k,
            sizes,
            trials,
            seed,
        } => cmd_sfbsp(cli.records, *k, sizes, *trials, *seed),
    }
}

/// Echo the full effective configuration (to stderr, one line).
fn echo_config(fields: &[(&str, String)]) {
    let mut line = String::from("config:");
    for (key, value) in fields {
        let _ = write!(line, " {}={}", key, value);
    }
    eprintln!("{}", line);
}

fn read_graph(path: &Path) -> Result<BipartiteGraph, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
    text.parse::<BipartiteGraph>()
        .map_err(|e| format!("{}: {}", path.display(), e))
}

fn read_flip(path: &Path) -> Result<FlipMatrix, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
    text.parse::<FlipMatrix>()
        .map_err(|e| format!("{}: {}", path.display(), e))
}

fn read_map(
    path: &Path,
    source: &BipartiteGraph,
    target: &BipartiteGraph,
) -> Result<SidedMap, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
    mapfile::parse_map_file(&text, source, target).map_err(|e| format!("{}: {}", path.display(), e))
}

fn cmd_sample(records: bool, m: usize, n: usize, seed: u64, out: &Path) -> Result<u8, String> {
    echo_config(&[
        ("command", "sample".into()),
        ("m", m.to_string()),
        ("n", n.to_string()),
        ("seed", seed.to_string()),
        ("o", out.display().to_string()),
    ]);
    let g = switchlab::sample_graph(m, n, seed).map_err(|e| e.to_string())?;
    std::fs::write(out, g.to_string())
        .map_err(|e| format!("cannot write {}: {}", out.display(), e))?;
    if records {
        println!(
            "{}",
            json!({
                "record": "sample",
                "m": m,
                "n": n,
                "seed": seed,
                "path": out.display().to_string(),
                "p1_count": g.p1_count(),
            })
        );
    } else {
        println!(
            "wrote {}x{} graph (seed {}) to {} ; {} cells of cross-type P1",
            m,
            n,
            seed,
            out.display(),
            g.p1_count()
        );
    }
    Ok(0)
}

fn cmd_theta(records: bool, k: usize, file: &Path) -> Result<u8, String> {
    echo_config(&[
        ("command", "theta".into()),
        ("k", k.to_string()),
        ("file", file.display().to_string()),
    ]);
    let g = read_graph(file)?;
    let w = check_theta(&g, k);
    if records {
        let failing = w.failing.as_ref().map(|f| {
            json!({
                "side": f.side.to_string(),
                "x1": f.x1,
                "x2": f.x2,
            })
        });
        println!(
            "{}",
            json!({
                "record": "theta",
                "k": k,
                "left": g.left_count(),
                "right": g.right_count(),
                "ok": w.ok,
                "failing": failing,
            })
        );
    } else {
        println!(
            "extension property at k={} on a {}x{} graph: {}",
            k,
            g.left_count(),
            g.right_count(),
            w
        );
    }
    Ok(if w.ok { 0 } else { 1 })
}

fn cmd_classify(records: bool, source: &Path, target: &Path, map: &Path) -> Result<u8, String> {
    echo_config(&[
        ("command", "classify".into()),
        ("source", source.display().to_string()),
        ("target", target.display().to_string()),
        ("map", map.display().to_string()),
    ]);
    let g = read_graph(source)?;
    let h = read_graph(target)?;
    let f = read_map(map, &g, &h)?;
    let e = flip_matrix(&f, &g, &h).map_err(|e| e.to_string())?;
    let report = classify_report(&e);
    if records {
        println!(
            "{}",
            json!({
                "record": "classify",
                "class": report.class.to_string(),
                "decomposable": report.decomposable,
                "exchange": report.exchange,
                "pattern_left": report.pattern.as_ref().map(|p| p.left_set()),
                "pattern_right": report.pattern.as_ref().map(|p| p.right_set()),
                "certificate": report.certificate.map(|c| json!({
                    "rows": [c.rows.0, c.rows.1],
                    "cols": [c.cols.0, c.cols.1],
                })),
            })
        );
    } else {
        println!("{}", report);
    }
    Ok(0)
}

fn cmd_decompose(records: bool, flip: &Path) -> Result<u8, String> {
    echo_config(&[
        ("command", "decompose".into()),
        ("flip", flip.display().to_string()),
    ]);
    let e = read_flip(flip)?;
    match decompose(&e) {
        Some(d) => {
            let d = d.normalize();
            if records {
                println!(
                    "{}",
                    json!({
                        "record": "decompose",
                        "ok": true,
                        "exchange": d.global_exchange,
                        "left": d.pattern.left_set(),
                        "right": d.pattern.right_set(),
                    })
                );
            } else {
                println!("decomposition: {}", d);
            }
            Ok(0)
        }
        None => {
            let minor = find_odd_minor(&e).expect("a non-decomposable matrix has an odd block");
            if records {
                println!(
                    "{}",
                    json!({
                        "record": "decompose",
                        "ok": false,
                        "certificate": {
                            "rows": [minor.rows.0, minor.rows.1],
                            "cols": [minor.cols.0, minor.cols.1],
                        },
                    })
                );
            } else {
                println!("not decomposable ; odd 2x2 block at {}", minor);
            }
            Ok(1)
        }
    }
}

fn cmd_analyze(
    records: bool,
    source: &Path,
    target: &Path,
    map: &Path,
    m: usize,
    n: usize,
) -> Result<u8, String> {
    echo_config(&[
        ("command", "analyze".into()),
        ("source", source.display().to_string()),
        ("target", target.display().to_string()),
        ("map", map.display().to_string()),
        ("m", m.to_string()),
        ("n", n.to_string()),
    ]);
    let g = read_graph(source)?;
    let h = read_graph(target)?;
    let f = read_map(map, &g, &h)?;
    match mn_analysis(&f, &g, &h, m, n) {
        Ok(trace) => {
            let verified = verify_trace(&trace, &f, &g, &h);
            if records {
                let stages: Vec<_> = trace
                    .stages
                    .iter()
                    .map(|s| {
                        json!({
                            "kind": s.kind.to_string(),
                            "vertex": s.vertex.map(|v| v.to_string()),
                            "witness_left": s.witness_left,
                            "witness_right": s.witness_right,
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    json!({
                        "record": "analyze",
                        "ok": true,
                        "prefix": trace.global_prefix.to_string(),
                        "stages": stages,
                        "switch_count": trace.switch_count(),
                        "final_check": trace.final_check,
                        "verified": verified,
                    })
                );
            } else {
                println!("{}", trace);
                println!("independent verification: {}", if verified { "pass" } else { "fail" });
            }
            Ok(if verified { 0 } else { 1 })
        }
        Err(CoreError::NotInSLR) => {
            let e = flip_matrix(&f, &g, &h).map_err(|e| e.to_string())?;
            let minor = find_odd_minor(&e).expect("outside the switch class means an odd block");
            if records {
                println!(
                    "{}",
                    json!({
                        "record": "analyze",
                        "ok": false,
                        "reason": "not in the switch class",
                        "certificate": {
                            "rows": [minor.rows.0, minor.rows.1],
                            "cols": [minor.cols.0, minor.cols.1],
                        },
                    })
                );
            } else {
                println!("not in the switch class ; odd 2x2 block at {}", minor);
            }
            Ok(1)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn cmd_oracle(records: bool, max_left: usize, max_right: usize) -> Result<u8, String> {
    echo_config(&[
        ("command", "oracle".into()),
        ("max-left", max_left.to_string()),
        ("max-right", max_right.to_string()),
    ]);
    if max_left == 0 || max_right == 0 {
        return Err("side limits must be at least 1".into());
    }
    let mut all_agree = true;
    for left in 1..=max_left {
        for right in 1..=max_right {
            let report = verify_equivalence(left, right).map_err(|e| e.to_string())?;
            all_agree &= report.agreement();
            if records {
                let counts = |c: &switchlab::ClassCounts| {
                    json!({
                        "aut_star": c.aut_star,
                        "s_l": c.s_l,
                        "s_r": c.s_r,
                        "s_lr": c.s_lr,
                        "sym": c.sym,
                    })
                };
                println!(
                    "{}",
                    json!({
                        "record": "oracle",
                        "left": left,
                        "right": right,
                        "total_maps": report.total_maps,
                        "oracle_counts": counts(&report.oracle_counts),
                        "classifier_counts": counts(&report.classifier_counts),
                        "agreement": report.agreement(),
                    })
                );
            } else {
                println!(
                    "sides {}x{} : {} maps ; oracle [{}] ; classifier [{}] ; agreement: {}",
                    left,
                    right,
                    report.total_maps,
                    report.oracle_counts,
                    report.classifier_counts,
                    if report.agreement() { "yes" } else { "NO" }
                );
                if let Some(d) = &report.discrepancy {
                    println!("{}", d);
                }
            }
        }
    }
    Ok(if all_agree { 0 } else { 1 })
}

fn cmd_sfbsp(records: bool, k: usize, sizes: &[usize], trials: u64, seed: u64) -> Result<u8, String> {
    echo_config(&[
        ("command", "sfbsp".into()),
        ("k", k.to_string()),
        (
            "sizes",
            sizes
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(","),
        ),
        ("trials", trials.to_string()),
        ("seed", seed.to_string()),
    ]);
    if k == 0 {
        return Err("k must be at least 1".into());
    }
    let mut violation = false;
    if !records {
        println!(
            "{:>8} {:>7} {:>7} {:>9} {:>10} {:>10} {:>14}",
            "n_total", "m_left", "n_right", "failures", "rate", "ci95", "analytic_term"
        );
    }
    for (index, &total) in sizes.iter().enumerate() {
        let sub_seed = derive_seed(seed, index as u64);
        let est = estimate_theta_failure(total, k, trials, sub_seed).map_err(|e| e.to_string())?;
        let (m_left, n_right) = balanced_split(total);
        let analytic = 4.0 * failure_bound_term(total / 2, k);
        if est.rate > analytic.min(1.0) + 3.0 * est.ci95 {
            violation = true;
        }
        if records {
            println!(
                "{}",
                json!({
                    "record": "sfbsp",
                    "k": k,
                    "n_total": total,
                    "m_left": m_left,
                    "n_right": n_right,
                    "trials": est.trials,
                    "failures": est.failures,
                    "empirical_rate": est.rate,
                    "ci95": est.ci95,
                    "analytic_term": analytic,
                })
            );
        } else {
            println!(
                "{:>8} {:>7} {:>7} {:>9} {:>10.6} {:>10.6} {:>14.6}",
                total, m_left, n_right, est.failures, est.rate, est.ci95, analytic
            );
        }
    }
    Ok(if violation { 1 } else { 0 })
}
