//! Command-line front end: run verification plans, dump structure tables,
//! and compute individual subgroups.

use chevalley::chevbasis::StructureTable;
use chevalley::group::{GroupCtx, RepKind, Representation};
use chevalley::harness::{self, parse_plan, run_plan, subgroup_by_descriptor};
use chevalley::ring::FiniteRing;
use chevalley::roots::{RootSystem, TypeLabel};
use chevalley::subgroups::{SetData, DEFAULT_CAP};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "chevalley", version, about = "Exact Chevalley groups over finite rings")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification plan and emit a JSON report
    Verify {
        /// plan file (line-oriented key=value)
        #[arg(long)]
        plan: Option<PathBuf>,
        /// run the bundled verification corpus instead of a plan file
        #[arg(long)]
        suite: bool,
        /// write the JSON report here (stdout otherwise)
        #[arg(long)]
        out: Option<PathBuf>,
        /// element cap for subgroup closures
        #[arg(long)]
        cap: Option<usize>,
        /// worker threads for independent instances
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Dump canonical tables
    Table {
        #[command(subcommand)]
        what: TableCmd,
    },
    /// Compute a subgroup from a descriptor and print order and generators
    Subgroup {
        #[arg(long)]
        system: String,
        #[arg(long)]
        ring: String,
        /// adjoint | natural | auto
        #[arg(long, default_value = "auto")]
        rep: String,
        /// descriptor, e.g. "E(R,(2))" or "[E(R,(2)),E(R,(3))]"
        #[arg(long)]
        expr: String,
        #[arg(long)]
        cap: Option<usize>,
    },
}

#[derive(Subcommand)]
enum TableCmd {
    /// The structure-constant and commutator-coefficient table of a system
    Structure {
        #[arg(long)]
        system: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Verify { plan, suite, out, cap, threads } => {
            let (label, text) = if suite {
                ("bundled-suite".to_string(), harness::PAPER_SUITE.to_string())
            } else {
                let path = plan.ok_or("pass --plan <file> or --suite")?;
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| format!("cannot read plan: {e}"))?;
                (path.display().to_string(), text)
            };
            let mut parsed = parse_plan(&label, &text).map_err(|e| e.to_string())?;
            if let Some(cap) = cap {
                parsed.cap = cap;
            }
            let report = run_plan(&parsed, threads.max(1));
            let json =
                serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
            match out {
                Some(path) => std::fs::write(&path, &json)
                    .map_err(|e| format!("cannot write report: {e}"))?,
                None => println!("{json}"),
            }
            eprintln!("{}", report.summary());
            Ok(ExitCode::from(report.exit_code() as u8))
        }
        Cmd::Table { what: TableCmd::Structure { system } } => {
            let rs = RootSystem::parse(&system).map_err(|e| e.to_string())?;
            let table = StructureTable::new(rs);
            print!("{}", table.dump());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Subgroup { system, ring, rep, expr, cap } => {
            let rs = RootSystem::parse(&system).map_err(|e| e.to_string())?;
            let table = StructureTable::new(rs.clone());
            let kind = match rep.as_str() {
                "adjoint" => RepKind::Adjoint,
                "natural" => RepKind::Natural,
                "auto" => match rs.label() {
                    TypeLabel::A | TypeLabel::C => RepKind::Natural,
                    _ => RepKind::Adjoint,
                },
                other => return Err(format!("unknown representation `{other}`")),
            };
            let representation = match kind {
                RepKind::Adjoint => Representation::adjoint(table),
                RepKind::Natural => {
                    Representation::natural(table).map_err(|e| e.to_string())?
                }
            };
            let ring = FiniteRing::parse(&ring).map_err(|e| e.to_string())?;
            let ctx = GroupCtx::new(representation, ring);
            let cap = cap.unwrap_or(DEFAULT_CAP);
            let handle = subgroup_by_descriptor(&ctx, &expr, cap)?;
            println!("descriptor: {}", handle.label);
            println!("representation: {} (dimension {})", ctx.rep.kind(), ctx.dim());
            match &handle.set {
                SetData::Full(s) => {
                    println!("order: {}", s.len());
                    if let Some(d) = handle.digest() {
                        println!("digest: {d:016x}");
                    }
                }
                SetData::Capped { seen } => {
                    println!("order: > {seen} (cap exceeded; not exhaustive)")
                }
            }
            println!("generators: {}", handle.gens.len());
            for (i, g) in handle.gens.iter().take(8).enumerate() {
                println!("  g{}: {}", i + 1, ctx.canonical_text(g));
            }
            if handle.gens.len() > 8 {
                println!("  ... ({} more)", handle.gens.len() - 8);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
