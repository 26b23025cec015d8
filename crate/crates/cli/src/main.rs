//! `ciforge` — census runs, conjugation certificates, and permutation-group
//! tools for Cayley digraphs of elementary abelian groups.
//!
//! Exit codes: 0 success (and, for `census`, the class/orbit signature
//! holds); 1 failed verification or violated signature; 2 usage or parse
//! errors; 3 exhaustive space too large; 4 pipeline contract violation or
//! search budget exhaustion (with a diagnostic dump).

mod formats;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use ciforge_core::cayley::{build_cayley, canonical_hex, ConnectionSet};
use ciforge_core::conjugator::{conjugate_full, verify_certificate};
use ciforge_core::dci::{
    exhaustive_census, run_campaign_with, sampled_census, CampaignKind, CampaignReport,
    TrialRecord,
};
use ciforge_core::ea::regular_rep_with_cap;
use ciforge_core::group::PermutationGroup;
use ciforge_core::two_closure::{orbitals, two_closure_with_cap};
use ciforge_core::{Error as CoreError, DEFAULT_POINT_CAP};

#[derive(Parser)]
#[command(
    name = "ciforge",
    version,
    about = "Cayley digraph census, conjugation certificates, and permutation-group tools"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count isomorphism classes of Cayley digraphs against orbits of
    /// connection sets, exhaustively or by sampling
    Census(CensusArgs),
    /// Produce or re-verify conjugation certificates
    Conj {
        #[command(subcommand)]
        cmd: ConjCmd,
    },
    /// Seeded conjugation campaigns over random permutations
    Campaign(CampaignArgs),
    /// Automorphism groups, 2-closures, orbits, and block systems
    Group {
        #[command(subcommand)]
        cmd: GroupCmd,
    },
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = ["exhaustive", "sample"])]
    mode: String,
    /// sample count in sample mode
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// report file (stdout always gets a summary)
    #[arg(long)]
    out: Option<PathBuf>,
    /// canonical-form cache, append-only, enables resuming exhaustive runs
    #[arg(long)]
    cache: Option<PathBuf>,
    /// skip cross-checks (closed-form orbit count, 2-closedness, per-graph
    /// criterion); recorded in the report header
    #[arg(long)]
    no_verify: bool,
}

#[derive(Subcommand)]
enum ConjCmd {
    /// Run the conjugation pipeline against pi^-1 R pi for a permutation file
    Run(ConjRunArgs),
    /// Re-verify a certificate file against a permutation file
    Verify(ConjVerifyArgs),
}

#[derive(Args)]
struct ConjRunArgs {
    /// file with one `perm N: ...` record
    #[arg(long)]
    pi: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConjVerifyArgs {
    #[arg(long)]
    cert: PathBuf,
    #[arg(long)]
    pi: PathBuf,
}

#[derive(Args)]
struct CampaignArgs {
    #[arg(long)]
    p: usize,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// draw conjugators from the standard wreath Sylow subgroup instead of
    /// uniform permutations (denser coverage of the reduction lemmas)
    #[arg(long)]
    wreath: bool,
    /// per-trial timeout; exceeding it classifies the trial as a timeout
    #[arg(long, default_value_t = 120)]
    timeout_secs: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Automorphism group of a Cayley digraph given by a connection-set file
    Aut {
        #[arg(long)]
        set: PathBuf,
    },
    /// 2-closure of the group generated by a permutation file
    TwoClosure {
        #[arg(long)]
        group: PathBuf,
    },
    /// Orbit partition of the group generated by a permutation file
    Orbits {
        #[arg(long)]
        group: PathBuf,
    },
    /// Block systems of the group generated by a permutation file
    Blocks {
        #[arg(long)]
        group: PathBuf,
    },
    /// Orbital partition (orbits on ordered pairs) of a permutation file
    Orbitals {
        #[arg(long)]
        group: PathBuf,
    },
}

fn point_cap() -> usize {
    std::env::var("CIFORGE_POINT_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_POINT_CAP)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    };
    ExitCode::from(code)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Census(args) => cmd_census(args),
        Cmd::Conj { cmd: ConjCmd::Run(args) } => cmd_conj_run(args),
        Cmd::Conj { cmd: ConjCmd::Verify(args) } => cmd_conj_verify(args),
        Cmd::Campaign(args) => cmd_campaign(args),
        Cmd::Group { cmd } => cmd_group(cmd),
    }
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_census(args: CensusArgs) -> Result<u8> {
    let cap = point_cap();
    if ciforge_core::checked_degree(args.p, args.n, cap).is_err() {
        eprintln!("census: p must be prime and p^n within the {cap}-point cap");
        return Ok(2);
    }
    let t0 = Instant::now();
    let report = match args.mode.as_str() {
        "exhaustive" => {
            let mut cache = match &args.cache {
                Some(path) => Some(formats::FileCache::open(path)?),
                None => None,
            };
            let cache_dyn = cache.as_mut().map(|c| c as &mut dyn ciforge_core::dci::CanonCache);
            match exhaustive_census(args.p, args.n, !args.no_verify, cache_dyn) {
                Ok(r) => r,
                Err(CoreError::BudgetExceeded(msg)) => {
                    eprintln!("census: {msg}");
                    return Ok(3);
                }
                Err(e) => return Err(anyhow!("{e}")),
            }
        }
        "sample" => sampled_census(args.p, args.n, args.trials, args.seed).map_err(|e| anyhow!("{e}"))?,
        _ => unreachable!("clap validates the mode"),
    };
    let text = formats::census_report_to_text(&report);
    write_or_print(&args.out, &text)?;
    eprintln!(
        "census p={} n={} finished in {:.1?}: orbits={} iso={} dci={}",
        args.p,
        args.n,
        t0.elapsed(),
        report.orbit_total,
        report.iso_total,
        if report.dci_holds { "ok" } else { "VIOLATED" }
    );
    Ok(if report.dci_holds { 0 } else { 1 })
}

fn infer_p_rank4(degree: usize) -> Option<usize> {
    (2..degree).find(|&p| ciforge_core::is_prime(p) && p.pow(4) == degree)
}

fn cmd_conj_run(args: ConjRunArgs) -> Result<u8> {
    let pi = match formats::read_perm_file(&args.pi) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("conj: {e:#}");
            return Ok(2);
        }
    };
    let degree = pi.degree();
    let Some(p) = infer_p_rank4(degree) else {
        eprintln!("conj: permutation degree {degree} is not p^4 for a prime p");
        return Ok(2);
    };
    let r = regular_rep_with_cap(p, 4, point_cap()).map_err(|e| anyhow!("{e}"))?;
    let q = r.conjugate_subgroup(&pi);
    match conjugate_full(&r, &q, args.seed) {
        Ok(cert) => {
            let text = formats::certificate_to_text(&cert);
            write_or_print(&args.out, &text)?;
            eprintln!("certificate verified: {} steps", cert.steps.len());
            Ok(0)
        }
        Err(e @ (CoreError::ContractViolation { .. } | CoreError::BudgetExceeded(_))) => {
            eprintln!("conj: pipeline aborted: {e}");
            eprintln!("  p {p} n 4 seed {}", args.seed);
            eprintln!("  pi {pi}");
            Ok(4)
        }
        Err(e) => Err(anyhow!("{e}")),
    }
}

fn cmd_conj_verify(args: ConjVerifyArgs) -> Result<u8> {
    let (cert, pi) = match (|| -> Result<_> {
        let text = std::fs::read_to_string(&args.cert)
            .with_context(|| format!("reading {}", args.cert.display()))?;
        Ok((formats::certificate_from_text(&text)?, formats::read_perm_file(&args.pi)?))
    })() {
        Ok(x) => x,
        Err(e) => {
            eprintln!("conj verify: {e:#}");
            return Ok(2);
        }
    };
    let r = regular_rep_with_cap(cert.p, cert.n, point_cap()).map_err(|e| anyhow!("{e}"))?;
    if pi.degree() != r.degree() {
        eprintln!("conj verify: permutation degree does not match the certificate");
        return Ok(2);
    }
    let q = r.conjugate_subgroup(&pi);
    match verify_certificate(&r, &q, &cert) {
        Ok(()) => {
            println!("certificate ok: {} steps verified", cert.steps.len());
            Ok(0)
        }
        Err(e) => {
            println!("certificate INVALID: {e}");
            Ok(1)
        }
    }
}

fn cmd_campaign(args: CampaignArgs) -> Result<u8> {
    if args.n != 4 {
        eprintln!("campaign: the pipeline is specific to rank 4");
        return Ok(2);
    }
    let kind = if args.wreath { CampaignKind::WreathConjugate } else { CampaignKind::RandomPi };
    let mut elapsed_ms: Vec<u128> = Vec::with_capacity(args.trials);
    let mut last = Instant::now();
    let report: CampaignReport = run_campaign_with(
        args.p,
        args.n,
        args.trials,
        args.seed,
        kind,
        &mut |_idx: usize, _rec: &TrialRecord| {
            elapsed_ms.push(last.elapsed().as_millis());
            last = Instant::now();
        },
    )
    .map_err(|e| anyhow!("{e}"))?;
    let kind_name = if args.wreath { "wreath-conjugate" } else { "random-pi" };
    let (text, cls) = formats::campaign_report_to_text(&report, kind_name, args.timeout_secs, &elapsed_ms);
    write_or_print(&args.out, &text)?;
    eprintln!(
        "campaign p={} trials={} ok={} failed={} timeout={}",
        args.p, args.trials, cls.ok, cls.failed, cls.timed_out
    );
    Ok(if cls.failed == 0 && cls.timed_out == 0 { 0 } else { 1 })
}

fn print_group(label: &str, g: &PermutationGroup) {
    println!("{label}: order {}", g.order());
    for gen in g.generators() {
        println!("{gen}");
    }
}

fn cmd_group(cmd: GroupCmd) -> Result<u8> {
    let cap = point_cap();
    match cmd {
        GroupCmd::Aut { set } => {
            let (p, n, members) = match formats::read_connection_set_file(&set) {
                Ok(x) => x,
                Err(e) => {
                    eprintln!("group aut: {e:#}");
                    return Ok(2);
                }
            };
            if ciforge_core::checked_degree(p, n, cap).is_err() {
                eprintln!("group aut: parameters exceed the {cap}-point cap");
                return Ok(2);
            }
            let cs = ConnectionSet::new(p, n, &members).map_err(|e| anyhow!("{e}"))?;
            let d = build_cayley(cs);
            let aut = d.automorphism_group();
            print_group("automorphism group", &aut);
            println!("canonical-form {}", canonical_hex(&d.canonical_form()));
            Ok(0)
        }
        GroupCmd::TwoClosure { group } => {
            let g = match formats::read_group_file(&group) {
                Ok(g) => g,
                Err(e) => {
                    eprintln!("group two-closure: {e:#}");
                    return Ok(2);
                }
            };
            let closure = two_closure_with_cap(&g, cap).map_err(|e| anyhow!("{e}"))?;
            print_group("two-closure", &closure);
            Ok(0)
        }
        GroupCmd::Orbits { group } => {
            let g = match formats::read_group_file(&group) {
                Ok(g) => g,
                Err(e) => {
                    eprintln!("group orbits: {e:#}");
                    return Ok(2);
                }
            };
            for (i, orbit) in g.orbits().iter().enumerate() {
                let pts: Vec<String> = orbit.iter().map(usize::to_string).collect();
                println!("orbit {i}: {}", pts.join(" "));
            }
            Ok(0)
        }
        GroupCmd::Blocks { group } => {
            let g = match formats::read_group_file(&group) {
                Ok(g) => g,
                Err(e) => {
                    eprintln!("group blocks: {e:#}");
                    return Ok(2);
                }
            };
            if !g.is_transitive() {
                eprintln!("group blocks: group is not transitive");
                return Ok(2);
            }
            let mut systems = vec![ciforge_core::BlockSystem::singletons(g.degree())];
            systems.extend(
                ciforge_core::blocks::pair_closure_block_systems(&g).map_err(|e| anyhow!("{e}"))?,
            );
            systems.push(ciforge_core::BlockSystem::whole(g.degree()));
            systems.sort_by_key(ciforge_core::BlockSystem::block_size);
            systems.dedup_by_key(|s| s.canonical_key());
            for sys in &systems {
                let blocks: Vec<String> = sys
                    .blocks()
                    .iter()
                    .map(|b| {
                        let pts: Vec<String> = b.iter().map(usize::to_string).collect();
                        format!("{{{}}}", pts.join(","))
                    })
                    .collect();
                println!("blocks of size {}: {}", sys.block_size(), blocks.join(" "));
            }
            Ok(0)
        }
        GroupCmd::Orbitals { group } => {
            let g = match formats::read_group_file(&group) {
                Ok(g) => g,
                Err(e) => {
                    eprintln!("group orbitals: {e:#}");
                    return Ok(2);
                }
            };
            print!("{}", orbitals(&g).dump());
            Ok(0)
        }
    }
}
