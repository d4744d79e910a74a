//! Command-line front end: per-level reports, golden-table
//! verification, and direct access to the cusp, genus, Heegner, lift,
//! exceptional, integrality and analytic computations.
//!
//! Exit codes: 0 on success, 1 on verification failure, 2 on usage
//! errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use starcurve::analytic::{error_bound, threshold};
use starcurve::catalog::load_signs;
use starcurve::cusps::rational_star_cusps;
use starcurve::cyclo_integrality::integrality_factor;
use starcurve::default_data_dir;
use starcurve::exceptional::{is_exceptional_level, shape_classify};
use starcurve::genus::genus_data;
use starcurve::heegner::load_candidate_discriminants;
use starcurve::report::{
    exceptional_display, golden_compare, level_report, load_golden, reconcile, GoldenRow,
    LevelRow,
};
use starcurve::volcano::cm_lift_report;

#[derive(Parser)]
#[command(name = "starcurve", version, about = "Cusp, Heegner and integrality combinatorics for X_0(N)*")]
struct Cli {
    /// Emit JSON instead of the human-readable table.
    #[arg(long, global = true)]
    json: bool,
    /// Emit CSV instead of the human-readable table.
    #[arg(long, global = true, conflicts_with = "json")]
    csv: bool,
    /// Data directory holding the bundled tables.
    #[arg(long, global = true, value_name = "PATH")]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rational cusps of X_0(N)*.
    Cusps { n: i64 },
    /// Genus data of X_0(N) and its star quotient.
    Genus { n: i64 },
    /// Rational Heegner star points of X_0(N)*.
    Heegner { n: i64 },
    /// Certified CM lifts (rational non-Heegner CM points).
    Lift { n: i64 },
    /// Exceptional-level classification.
    Exceptional { n: i64 },
    /// Integrality factors m and m' for the pair (N, M).
    Integrality { n: i64, m: i64 },
    /// Analytic nonvanishing bound for M = pq.
    Lfunc {
        #[arg(long)]
        p: i64,
        #[arg(long, conflicts_with = "find_threshold")]
        q: Option<i64>,
        /// Search the minimal q with bound below 1.
        #[arg(long)]
        find_threshold: bool,
    },
    /// Reconstructed table rows for the given levels (default: all
    /// golden levels).
    Report { levels: Vec<i64> },
    /// Regenerate Tables 1 and 4 and diff against the golden data.
    VerifyTables,
}

fn emit<T: serde::Serialize>(cli: &Cli, value: &T, human: impl FnOnce()) {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(value).unwrap());
    } else {
        human();
    }
}

fn candidates() -> Result<Vec<i64>, String> {
    load_candidate_discriminants(&default_data_dir().join("discriminants.txt"))
        .map_err(|e| format!("cannot read discriminant data: {e}"))
}

fn golden_rows() -> Result<Vec<GoldenRow>, String> {
    let dir = default_data_dir();
    let mut rows = load_golden(&dir.join("golden_table1.json"))
        .map_err(|e| format!("cannot read golden_table1.json: {e}"))?;
    let t4 = load_golden(&dir.join("golden_table4.json"))
        .map_err(|e| format!("cannot read golden_table4.json: {e}"))?;
    for r in t4 {
        if !rows.iter().any(|x| x.level == r.level) {
            rows.push(r);
        }
    }
    rows.sort_by_key(|r| r.level);
    Ok(rows)
}

fn print_row_human(r: &LevelRow) {
    let qp = r
        .q_points
        .map(|v| v.to_string())
        .unwrap_or_else(|| "-".into());
    let res = r
        .exceptional_residual
        .map(|v| v.to_string())
        .unwrap_or_else(|| "-".into());
    println!(
        "N={:<5} genus={:<2} Q-pts={:<3} Q-cusps={:<2} heegner={:?} lifts={:?} residual={}",
        r.level, r.genus, qp, r.q_cusps, r.heegner_discs, r.lift_entries, res
    );
    for s in exceptional_display(r.level) {
        println!("    exceptional: {s}");
    }
}

fn print_row_csv(r: &LevelRow) {
    let qp = r.q_points.map(|v| v.to_string()).unwrap_or_default();
    let res = r
        .exceptional_residual
        .map(|v| v.to_string())
        .unwrap_or_default();
    let discs: Vec<String> = r.heegner_discs.iter().map(|d| d.to_string()).collect();
    let lifts: Vec<String> = r
        .lift_entries
        .iter()
        .map(|(a, b)| format!("{a}->{b}"))
        .collect();
    println!(
        "{},{},{},{},{},{},{}",
        r.level,
        r.genus,
        qp,
        r.q_cusps,
        discs.join(";"),
        lifts.join(";"),
        res
    );
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    match &cli.cmd {
        Cmd::Cusps { n } => {
            let cusps = rational_star_cusps(*n);
            emit(cli, &cusps, || {
                println!("X_0({n})* has {} rational cusp(s):", cusps.len());
                for c in &cusps {
                    let members: Vec<String> =
                        c.members.iter().map(|x| x.to_string()).collect();
                    println!("  {{{}}}", members.join(", "));
                }
            });
        }
        Cmd::Genus { n } => {
            let g = genus_data(*n);
            emit(cli, &g, || {
                println!(
                    "X_0({n}): genus {}, mu {}, nu2 {}, nu3 {}, cusps {}",
                    g.genus, g.mu, g.nu2, g.nu3, g.nu_inf
                );
                println!("X_0({n})*: genus {}", g.genus_star);
            });
        }
        Cmd::Heegner { n } => {
            let discs = starcurve::heegner::rational_heegner_report(*n, &candidates()?)
                .map_err(|e| e.to_string())?;
            emit(cli, &discs, || {
                println!(
                    "X_0({n})* has {} rational Heegner point(s): {:?}",
                    discs.len(),
                    discs
                );
            });
        }
        Cmd::Lift { n } => {
            let entries = cm_lift_report(*n, &candidates()?).map_err(|e| e.to_string())?;
            emit(cli, &entries, || {
                for e in &entries {
                    println!(
                        "({} -> {}) via X_0({})* and a cyclic {}-isogeny, certificate {:?}",
                        e.source, e.target, e.m_level, e.d, e.certificate
                    );
                }
                if entries.is_empty() {
                    println!("no certified CM lifts at level {n}");
                }
            });
        }
        Cmd::Exceptional { n } => {
            let cls = is_exceptional_level(*n).map_err(|e| e.to_string())?;
            let shape = shape_classify(*n).ok();
            emit(cli, &(&cls, shape), || {
                if cls.exceptional {
                    println!(
                        "{n} is an exceptional level{}",
                        shape
                            .map(|s| format!(" (shape {s})"))
                            .unwrap_or_default()
                    );
                } else {
                    println!("{n} is not exceptional; witness {:?}", cls.witness);
                }
            });
        }
        Cmd::Integrality { n, m } => {
            let recs = load_signs(*n, *m).map_err(|e| e.to_string())?;
            let mut reports = Vec::new();
            for rec in &recs {
                let rep = integrality_factor(*n, *m, &rec.sign_vector())
                    .map_err(|e| format!("{e:?}"))?;
                reports.push((rec.label.clone(), rep));
            }
            emit(cli, &reports, || {
                for (label, rep) in &reports {
                    println!(
                        "(N, M) = ({n}, {m}) via {label}: m = {}, m' = {}",
                        rep.m, rep.m_prime
                    );
                }
            });
        }
        Cmd::Lfunc { p, q, find_threshold } => {
            if *find_threshold {
                let t = threshold(*p).map_err(|e| e.to_string())?;
                emit(cli, &t, || {
                    println!(
                        "p = {}: minimal q0 = {} (bound {:.6}, decreasing certified: {})",
                        t.p, t.q0, t.total_at_q0, t.decreasing_certified
                    );
                });
            } else {
                let q = q.ok_or_else(|| "lfunc needs --q or --find-threshold".to_string())?;
                let b = error_bound(*p, q).map_err(|e| e.to_string())?;
                emit(cli, &b, || {
                    println!(
                        "p = {}, q = {}: total {:.6} = leading {:.6} + weil {:.6} + f1 {:.6} + f2 {:.6}",
                        b.p, b.q, b.total, b.leading, b.weil_block, b.f1, b.f2
                    );
                    println!(
                        "nonvanishing {}",
                        if b.total < 1.0 { "certified" } else { "not certified at this q" }
                    );
                });
            }
        }
        Cmd::Report { levels } => {
            let golden = golden_rows()?;
            let levels: Vec<i64> = if levels.is_empty() {
                golden.iter().map(|g| g.level).collect()
            } else {
                levels.clone()
            };
            let cands = candidates()?;
            let mut rows: Vec<LevelRow> = levels
                .par_iter()
                .map(|&n| level_report(n, &cands).map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            rows.sort_by_key(|r| r.level);
            let rows: Vec<LevelRow> = rows
                .iter()
                .map(|r| match golden.iter().find(|g| g.level == r.level) {
                    Some(g) => reconcile(r, g),
                    None => r.clone(),
                })
                .collect();
            emit(cli, &rows, || {
                if cli.csv {
                    println!("level,genus,q_points,q_cusps,heegner,lifts,residual");
                    for r in &rows {
                        print_row_csv(r);
                    }
                } else {
                    for r in &rows {
                        print_row_human(r);
                    }
                }
            });
        }
        Cmd::VerifyTables => {
            let cands = candidates()?;
            let dir = default_data_dir();
            let mut failed = false;
            for file in ["golden_table1.json", "golden_table4.json"] {
                let golden = load_golden(&dir.join(file))
                    .map_err(|e| format!("cannot read {file}: {e}"))?;
                let rows: Vec<LevelRow> = golden
                    .par_iter()
                    .map(|g| level_report(g.level, &cands).map_err(|e| e.to_string()))
                    .collect::<Result<_, _>>()?;
                let diff = golden_compare(&rows, &golden);
                if diff.is_empty() {
                    println!("{file}: {} rows verified", golden.len());
                } else {
                    failed = true;
                    println!("{file}: {} mismatch(es)", diff.mismatches.len());
                    for m in &diff.mismatches {
                        println!("  {m}");
                    }
                }
            }
            if failed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(dir) = &cli.data_dir {
        std::env::set_var("STARCURVE_DATA_DIR", dir);
    }
    match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
