use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use subproduct::sim::{min_weight_count, union_bound_cer, write_results, CodeSpec, Simulator, SweepConfig};

#[derive(Parser)]
#[command(name = "subproduct", version, about = "Recursive subproduct codes over BPSK/AWGN")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo codeword error rate sweep.
    Sweep(SweepArgs),
    /// Print code parameters.
    Info(InfoArgs),
}

/// Every option may also be given as `key = value` in the config file
/// (keys as below with `-` or `_`); command-line flags take precedence.
#[derive(Args)]
struct SweepArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// db:n:r:m, rm:r:m, hamming:r:m, dbsub:n:r0:m0:r:m or file:PATH:r:m.
    #[arg(long)]
    code: Option<String>,
    /// fastml, bp or bp+lgs.
    #[arg(long)]
    decoder: Option<String>,
    /// Weight on degree-3 check messages.
    #[arg(long)]
    gamma: Option<String>,
    /// Weight on base-code check messages.
    #[arg(long)]
    gamma_g: Option<String>,
    /// Maximum BP iterations.
    #[arg(long)]
    tmax: Option<String>,
    /// exact or minsum.
    #[arg(long)]
    boxplus: Option<String>,
    /// Local graph search path length.
    #[arg(long)]
    plgs: Option<String>,
    /// CRC generator with leading term, hex (0x13) or binary (10011).
    /// Appended MSB-first with zero initial remainder, no reflection and no
    /// final XOR; Eb/N0 is then taken per payload bit.
    #[arg(long)]
    crc: Option<String>,
    /// start:step:stop or a comma-separated list, in dB.
    #[arg(long)]
    ebn0: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Stop a point after this many codeword errors.
    #[arg(long)]
    min_errors: Option<String>,
    /// Stop a point after this many trials.
    #[arg(long)]
    max_trials: Option<String>,
    /// Trials per parallel batch.
    #[arg(long)]
    batch: Option<String>,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Suppress per-point progress on stderr.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct InfoArgs {
    #[arg(long)]
    code: String,
    /// Also print the leading union-bound term at this Eb/N0 (dB).
    #[arg(long)]
    ebn0: Option<f64>,
}

fn sweep_config(args: &SweepArgs) -> Result<SweepConfig, String> {
    let mut cfg = SweepConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.apply_file_text(&text)
            .map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let flags = [
        ("code", &args.code),
        ("decoder", &args.decoder),
        ("gamma", &args.gamma),
        ("gamma_g", &args.gamma_g),
        ("tmax", &args.tmax),
        ("boxplus", &args.boxplus),
        ("plgs", &args.plgs),
        ("crc", &args.crc),
        ("ebn0", &args.ebn0),
        ("seed", &args.seed),
        ("min_errors", &args.min_errors),
        ("max_trials", &args.max_trials),
        ("batch", &args.batch),
        ("out", &args.out),
        ("format", &args.format),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v).map_err(|e| format!("--{}: {e}", key.replace('_', "-")))?;
        }
    }
    Ok(cfg)
}

fn run_sweep(args: &SweepArgs) -> Result<(), String> {
    let cfg = sweep_config(args)?;
    let sim = Simulator::new(cfg.clone()).map_err(|e| e.to_string())?;
    let code = sim.code();
    if !args.quiet {
        eprintln!(
            "{} [{}, {}, {}] decoder={} rate={:.4} hash={}",
            cfg.code,
            code.len(),
            code.dim(),
            code.dmin(),
            cfg.decoder,
            sim.rate(),
            cfg.config_hash()
        );
    }
    let records = sim
        .run_with(|r| {
            if !args.quiet {
                eprintln!(
                    "  {:>6.2} dB  trials={:<8} errors={:<5} cer={:.3e} ml_lb={:.3e} {:.1}s",
                    r.ebn0_db, r.trials, r.errors, r.cer, r.ml_lb, r.seconds
                );
            }
        })
        .map_err(|e| e.to_string())?;
    let sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(File::create(path).map_err(|e| format!("{}: {e}", path.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    write_results(&records, cfg.format, BufWriter::new(sink)).map_err(|e| e.to_string())
}

fn run_info(args: &InfoArgs) -> Result<(), String> {
    let spec: CodeSpec = args.code.parse().map_err(|e| format!("--code: {e}"))?;
    let code = spec.build().map_err(|e| e.to_string())?;
    let base = code.base();
    println!("code      {spec}");
    println!("base      [{}, {}, {}]", base.n(), base.k(), base.d());
    println!("order     r={} m={}", code.order(), code.factors());
    println!("params    [{}, {}, {}]", code.len(), code.dim(), code.dmin());
    println!("rate      {:.6}", code.rate());
    match min_weight_count(&code) {
        Ok(a) => println!("min-wt    {a}"),
        Err(e) => println!("min-wt    unavailable ({e})"),
    }
    if let Some(ebn0) = args.ebn0 {
        match union_bound_cer(&code, ebn0) {
            Ok(v) => println!("union     {v:.6e} at {ebn0} dB"),
            Err(e) => println!("union     unavailable ({e})"),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(args) => run_sweep(args),
        Command::Info(args) => run_info(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
