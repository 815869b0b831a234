use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use flagqec::code::{code_513, code_steane};
use flagqec::gadget::build_flagged_gadget;
use flagqec::protocol::{Protocol, ProtocolName};
use flagqec::synthesis::{certify_fault_tolerance, min_syndrome_bits, propagated_error_set, provenance};
use flagqec::threshold::{
    bootstrap_pseudothreshold, default_trials, logspace, pseudothreshold, read_csv, run_sweep, write_csv,
};
use flagqec::{Error, PauliOperator};

const USAGE: u8 = 2;
const NOT_FT: u8 = 1;

#[derive(Parser)]
#[command(name = "flagqec", version, about = "Flag fault-tolerance protocols: certification, tables, sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify protocols against every single fault.
    Verify {
        name: Option<String>,
        #[arg(long)]
        protocol: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Monte Carlo logical error rates over a grid of physical rates.
    Sweep(SweepArgs),
    /// Identity-line crossing for each protocol in a sweep CSV.
    Pseudothreshold {
        #[arg(long = "in")]
        input: PathBuf,
        /// Bootstrap resamples for a 95% interval (0 to skip).
        #[arg(long, default_value_t = 0)]
        bootstrap: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Two-qubit gate totals per branch.
    Gatecount { name: String },
    /// Lookup-table entries as branch, history and correction.
    Lut { name: String },
    /// Propagated errors of the flagged gadget for a stabilizer.
    Errorset { stabilizer: String },
    /// Decision graph as a node list.
    Dump { name: String },
    /// Measurement choices made by search.
    Provenance,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    protocol: Option<String>,
    /// Comma-separated physical error rates.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// `lo,hi,n` log-spaced grid.
    #[arg(long = "p-logspace")]
    p_logspace: Option<String>,
    /// Trials per point; by default 10^6 above 10^-3 and 10^5 below.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// File of `key=value` lines supplying defaults for the flags above.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    NotFt,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { name, protocol, all } => verify(name.or(protocol), all),
        Command::Sweep(args) => sweep(args),
        Command::Pseudothreshold { input, bootstrap, seed } => cmd_pseudothreshold(&input, bootstrap, seed),
        Command::Gatecount { name } => gatecount(&name),
        Command::Lut { name } => lut(&name),
        Command::Errorset { stabilizer } => errorset(&stabilizer),
        Command::Dump { name } => dump(&name),
        Command::Provenance => provenance().map_err(Failure::from).map(|s| print!("{s}")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NotFt) => ExitCode::from(NOT_FT),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
    }
}

fn verify(name: Option<String>, all: bool) -> CliResult {
    let names = match (name, all) {
        (Some(_), true) => return Err(Failure::Usage("give a protocol name or --all, not both".into())),
        (None, false) => return Err(Failure::Usage("give a protocol name or --all".into())),
        (None, true) => ProtocolName::ALL.to_vec(),
        (Some(n), false) => vec![n.parse()?],
    };
    let mut ok = true;
    for name in names {
        let report = certify_fault_tolerance(&name.build()?);
        print!("{report}");
        println!("{}", report.summary());
        ok &= report.is_fault_tolerant();
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::NotFt)
    }
}

fn read_config(path: &Path) -> Result<HashMap<String, String>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, Failure> {
    v.parse().map_err(|_| Failure::Usage(format!("bad value for {key}: {v:?}")))
}

fn parse_logspace(spec: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let [lo, hi, n] = parts[..] else {
        return Err(Failure::Usage(format!("--p-logspace wants lo,hi,n, got {spec:?}")));
    };
    Ok(logspace(parse_value("lo", lo)?, parse_value("hi", hi)?, parse_value("n", n)?)?)
}

fn sweep(mut args: SweepArgs) -> CliResult {
    if let Some(path) = &args.config {
        for (k, v) in read_config(path)? {
            match k.as_str() {
                "protocol" => args.protocol = args.protocol.or(Some(v)),
                "p" => {
                    if args.p.is_none() && args.p_logspace.is_none() {
                        args.p = Some(v.split(',').map(|s| parse_value("p", s.trim())).collect::<Result<_, _>>()?);
                    }
                }
                "p-logspace" => {
                    if args.p.is_none() && args.p_logspace.is_none() {
                        args.p_logspace = Some(v);
                    }
                }
                "trials" => args.trials = args.trials.or(Some(parse_value(&k, &v)?)),
                "seed" => args.seed = args.seed.or(Some(parse_value(&k, &v)?)),
                "workers" => args.workers = args.workers.or(Some(parse_value(&k, &v)?)),
                "out" => args.out = args.out.or(Some(PathBuf::from(v))),
                other => return Err(Failure::Usage(format!("unknown config key {other:?}"))),
            }
        }
    }
    let name: ProtocolName = args.protocol.ok_or_else(|| Failure::Usage("--protocol is required".into()))?.parse()?;
    let grid = match (args.p, args.p_logspace) {
        (Some(_), Some(_)) => return Err(Failure::Usage("give --p or --p-logspace, not both".into())),
        (Some(p), None) => p,
        (None, Some(spec)) => parse_logspace(&spec)?,
        (None, None) => logspace(1e-4, 1e-2, 9)?,
    };
    if args.trials == Some(0) {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    let workers = args.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let protocol = Protocol::shipped(name)?;
    let trials = args.trials;
    let points = run_sweep(&protocol, &grid, |p| trials.unwrap_or_else(|| default_trials(p)), args.seed.unwrap_or(1), workers)?;
    match args.out {
        Some(path) => {
            let file = fs::File::create(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            write_csv(io::BufWriter::new(file), name.as_str(), &points)?;
        }
        None => write_csv(io::stdout().lock(), name.as_str(), &points)?,
    }
    Ok(())
}

fn cmd_pseudothreshold(input: &Path, bootstrap: usize, seed: u64) -> CliResult {
    let file = fs::File::open(input).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
    let groups = read_csv(file)?;
    let mut out = io::stdout().lock();
    let header = if bootstrap > 0 { "protocol,p_star,bracket_low,bracket_high,boot_low,boot_high" } else { "protocol,p_star,bracket_low,bracket_high" };
    writeln!(out, "{header}")?;
    let mut all_found = true;
    for (name, points) in groups {
        match pseudothreshold(&points) {
            Ok(e) => {
                write!(out, "{name},{},{},{}", e.p_star, e.bracket_low.p, e.bracket_high.p)?;
                if bootstrap > 0 {
                    match bootstrap_pseudothreshold(&points, bootstrap, seed) {
                        Ok((lo, hi)) => write!(out, ",{lo},{hi}")?,
                        Err(_) => write!(out, ",,")?,
                    }
                }
                writeln!(out)?;
            }
            Err(_) => {
                all_found = false;
                eprintln!("{name}: no bracket: p_L never crosses p on this grid");
            }
        }
    }
    if all_found {
        Ok(())
    } else {
        Err(Failure::NotFt)
    }
}

fn gatecount(name: &str) -> CliResult {
    let tree = name.parse::<ProtocolName>()?.build()?;
    let paths = tree.paths();
    println!("{:<16} {:>5} {:>6} {:>6} {:>9} {:>9}", "branch", "paths", "gates", "meas", "subround1", "subround2");
    for branch in tree.branches() {
        let mine: Vec<_> = paths.iter().filter(|p| p.branch == branch).collect();
        let span = |f: &dyn Fn(&&flagqec::protocol::PathSummary) -> usize| {
            let lo = mine.iter().map(f).min().unwrap_or(0);
            let hi = mine.iter().map(f).max().unwrap_or(0);
            if lo == hi {
                lo.to_string()
            } else {
                format!("{lo}-{hi}")
            }
        };
        println!(
            "{:<16} {:>5} {:>6} {:>6} {:>9} {:>9}",
            branch,
            mine.len(),
            span(&|p| p.two_qubit_gates),
            span(&|p| p.measurements),
            span(&|p| p.two_qubit_gates - p.subround2_gates),
            span(&|p| p.subround2_gates),
        );
    }
    let min = paths.iter().map(|p| p.two_qubit_gates).min().unwrap_or(0);
    let max = paths.iter().map(|p| p.two_qubit_gates).max().unwrap_or(0);
    let fault_free = tree.branch_gate_count("trivial")?;
    println!("min {min} max {max} fault-free {fault_free}");
    Ok(())
}

fn lut(name: &str) -> CliResult {
    let protocol = Protocol::shipped(name.parse()?)?;
    print!("{}", protocol.lut_dump());
    Ok(())
}

fn errorset(stabilizer: &str) -> CliResult {
    let s: PauliOperator = stabilizer.parse()?;
    let code = match s.num_qubits() {
        5 => code_513(),
        7 => code_steane(),
        n => return Err(Failure::Usage(format!("no built-in code on {n} qubits"))),
    };
    if !code.is_plus_one_element(&s) {
        return Err(Failure::Usage(format!("{s} is not an element of the {} stabilizer group", code.name())));
    }
    let n = code.n();
    let gadget = build_flagged_gadget(&s, n, n + 1)?;
    let set = propagated_error_set(&code, &gadget);
    for e in &set {
        println!("{e}");
    }
    println!("min_syndrome_bits {}", min_syndrome_bits(&set, &code));
    Ok(())
}

fn dump(name: &str) -> CliResult {
    print!("{}", name.parse::<ProtocolName>()?.build()?.dump());
    Ok(())
}
