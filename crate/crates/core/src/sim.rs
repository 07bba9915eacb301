//! Monte-Carlo codeword error rate sweeps over BPSK/AWGN.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bp::{BoxplusMode, BpConfig, BpDecoder};
use crate::channel::{llr, modulate, transmit, trial_rng, ChannelConfig};
use crate::construction::{binomial, dual_berman_code, hamming_code, rm_code, BaseCode, SubproductCode};
use crate::crc::CrcSpec;
use crate::error::{Error, Result};
use crate::fo_decoder::FirstOrderDecoder;
use crate::gf2::{BitMatrix, BitVector};
use crate::lgs::{LocalGraphSearch, SearchConfig};

/// Which family and parameters to build.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeSpec {
    /// `db:n:r:m`, base code `F_2^n`.
    DualBerman { n: usize, r: usize, m: usize },
    /// `rm:r:m`.
    ReedMuller { r: usize, m: usize },
    /// `hamming:r:m`, base code the [7,4] Hamming code.
    Hamming { r: usize, m: usize },
    /// `dbsub:n:r0:m0:r:m`, base code `DB(n; r0, m0)`.
    NestedDualBerman {
        n: usize,
        r0: usize,
        m0: usize,
        r: usize,
        m: usize,
    },
    /// `file:PATH:r:m`, base generator read from a text file.
    File { path: PathBuf, r: usize, m: usize },
}

impl CodeSpec {
    pub fn order(&self) -> usize {
        match *self {
            CodeSpec::DualBerman { r, .. }
            | CodeSpec::ReedMuller { r, .. }
            | CodeSpec::Hamming { r, .. }
            | CodeSpec::NestedDualBerman { r, .. }
            | CodeSpec::File { r, .. } => r,
        }
    }

    pub fn build(&self) -> Result<SubproductCode> {
        match self {
            &CodeSpec::DualBerman { n, r, m } => dual_berman_code(n, r, m),
            &CodeSpec::ReedMuller { r, m } => rm_code(r, m),
            &CodeSpec::Hamming { r, m } => hamming_code(r, m),
            &CodeSpec::NestedDualBerman { n, r0, m0, r, m } => {
                let inner = dual_berman_code(n, r0, m0)?;
                SubproductCode::build(BaseCode::new(inner.generator())?, r, m)
            }
            CodeSpec::File { path, r, m } => {
                let text = std::fs::read_to_string(path)?;
                SubproductCode::build(BaseCode::new(&BitMatrix::parse_text(&text)?)?, *r, *m)
            }
        }
    }
}

fn parse_usize(field: &str, what: &str) -> Result<usize> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{what}: expected a non-negative integer, got {field:?}")))
}

impl FromStr for CodeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("code spec {s:?} has no family prefix")))?;
        if family == "file" {
            let mut tail = rest.rsplitn(3, ':');
            let (m, r, path) = (tail.next(), tail.next(), tail.next());
            return match (path, r, m) {
                (Some(path), Some(r), Some(m)) if !path.is_empty() => Ok(CodeSpec::File {
                    path: PathBuf::from(path),
                    r: parse_usize(r, "r")?,
                    m: parse_usize(m, "m")?,
                }),
                _ => Err(Error::Parse(format!("expected file:PATH:r:m, got {s:?}"))),
            };
        }
        let nums = rest
            .split(':')
            .map(|f| parse_usize(f, family))
            .collect::<Result<Vec<_>>>()?;
        match (family, nums.as_slice()) {
            ("db", &[n, r, m]) => Ok(CodeSpec::DualBerman { n, r, m }),
            ("rm", &[r, m]) => Ok(CodeSpec::ReedMuller { r, m }),
            ("hamming", &[r, m]) => Ok(CodeSpec::Hamming { r, m }),
            ("dbsub", &[n, r0, m0, r, m]) => Ok(CodeSpec::NestedDualBerman { n, r0, m0, r, m }),
            _ => Err(Error::Parse(format!(
                "unknown code spec {s:?}; expected db:n:r:m, rm:r:m, hamming:r:m, \
                 dbsub:n:r0:m0:r:m or file:PATH:r:m"
            ))),
        }
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeSpec::DualBerman { n, r, m } => write!(f, "db:{n}:{r}:{m}"),
            CodeSpec::ReedMuller { r, m } => write!(f, "rm:{r}:{m}"),
            CodeSpec::Hamming { r, m } => write!(f, "hamming:{r}:{m}"),
            CodeSpec::NestedDualBerman { n, r0, m0, r, m } => write!(f, "dbsub:{n}:{r0}:{m0}:{r}:{m}"),
            CodeSpec::File { path, r, m } => write!(f, "file:{}:{r}:{m}", path.display()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DecoderChain {
    #[default]
    FastMl,
    Bp,
    BpLgs,
}

impl FromStr for DecoderChain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fastml" | "ml" => Ok(DecoderChain::FastMl),
            "bp" => Ok(DecoderChain::Bp),
            "bp+lgs" | "bplgs" => Ok(DecoderChain::BpLgs),
            other => Err(Error::Parse(format!(
                "unknown decoder {other:?}; expected fastml, bp or bp+lgs"
            ))),
        }
    }
}

impl fmt::Display for DecoderChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecoderChain::FastMl => "fastml",
            DecoderChain::Bp => "bp",
            DecoderChain::BpLgs => "bp+lgs",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Parse(format!("unknown format {other:?}; expected csv or json"))),
        }
    }
}

/// Parses `start:step:stop` or a comma-separated list of values.
pub fn parse_ebn0_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Parse(format!("bad Eb/N0 grid {s:?}"));
    let num = |f: &str| f.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if !(step > 0.0) || stop < start {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            // Round away accumulated float noise so grid values print cleanly.
            (0..count)
                .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
                .collect()
        }
        [list] => list.split(',').filter(|f| !f.trim().is_empty()).map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(bad()),
    };
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    Ok(grid)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub code: CodeSpec,
    pub decoder: DecoderChain,
    pub bp: BpConfig,
    pub path_len: usize,
    /// Generator polynomial text, leading term included.
    pub crc: Option<String>,
    pub ebn0_db: Vec<f64>,
    pub min_errors: u64,
    pub max_trials: u64,
    pub seed: u64,
    /// Trials evaluated in parallel before the stopping rule is checked.
    pub batch_size: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            code: CodeSpec::DualBerman { n: 3, r: 1, m: 4 },
            decoder: DecoderChain::FastMl,
            bp: BpConfig::default(),
            path_len: 512,
            crc: None,
            ebn0_db: vec![3.0],
            min_errors: 100,
            max_trials: 1_000_000,
            seed: 1,
            batch_size: 1024,
            out: None,
            format: OutputFormat::Csv,
        }
    }
}

impl SweepConfig {
    /// Sets one option by its config-file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let num = |what: &str| -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{what}: expected a number, got {value:?}")))
        };
        let int = |what: &str| -> Result<u64> {
            let v = value.replace('_', "");
            v.parse::<u64>()
                .or_else(|_| match v.parse::<f64>() {
                    Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 => Ok(x as u64),
                    _ => Err(()),
                })
                .map_err(|_| Error::Config(format!("{what}: expected an integer, got {value:?}")))
        };
        match key.trim().replace('-', "_").as_str() {
            "code" => self.code = value.parse()?,
            "decoder" => self.decoder = value.parse()?,
            "gamma" => self.bp.gamma = num("gamma")?,
            "gamma_g" => self.bp.gamma_g = num("gamma_g")?,
            "tmax" => self.bp.max_iterations = int("tmax")? as usize,
            "llr_clamp" => self.bp.llr_clamp = num("llr_clamp")?,
            "boxplus" => {
                self.bp.boxplus = match value.to_ascii_lowercase().as_str() {
                    "exact" => BoxplusMode::Exact,
                    "minsum" | "min-sum" => BoxplusMode::MinSum,
                    _ => return Err(Error::Config(format!("unknown boxplus mode {value:?}"))),
                }
            }
            "plgs" => self.path_len = int("plgs")? as usize,
            "crc" => {
                self.crc = match value.to_ascii_lowercase().as_str() {
                    "" | "none" | "off" => None,
                    _ => {
                        CrcSpec::parse(value, 0)?;
                        Some(value.to_string())
                    }
                }
            }
            "ebn0" => self.ebn0_db = parse_ebn0_grid(value)?,
            "seed" => self.seed = int("seed")?,
            "min_errors" => self.min_errors = int("min_errors")?,
            "max_trials" => self.max_trials = int("max_trials")?,
            "batch" | "batch_size" => self.batch_size = int("batch_size")? as usize,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            other => return Err(Error::Config(format!("unknown option {other:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            self.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.ebn0_db.is_empty() {
            return Err(Error::Config("Eb/N0 grid is empty".into()));
        }
        if self.min_errors == 0 {
            return Err(Error::Config("min_errors must be at least 1".into()));
        }
        if self.max_trials == 0 || self.batch_size == 0 {
            return Err(Error::Config("max_trials and batch_size must be at least 1".into()));
        }
        if self.decoder != DecoderChain::FastMl {
            self.bp.validate()?;
        }
        if self.crc.is_some() && self.decoder != DecoderChain::BpLgs {
            return Err(Error::Config("a CRC is only used by the bp+lgs decoder".into()));
        }
        Ok(())
    }

    /// Options that affect results, one `key=value` per line. Output
    /// destination and batch size are left out.
    pub fn canonical(&self) -> String {
        let mut s = format!(
            "code={}\ndecoder={}\nseed={}\nmin_errors={}\nmax_trials={}\nebn0={:?}\n",
            self.code, self.decoder, self.seed, self.min_errors, self.max_trials, self.ebn0_db
        );
        if self.decoder != DecoderChain::FastMl {
            s += &format!(
                "gamma={:?}\ngamma_g={:?}\ntmax={}\nllr_clamp={:?}\nboxplus={:?}\n",
                self.bp.gamma, self.bp.gamma_g, self.bp.max_iterations, self.bp.llr_clamp, self.bp.boxplus
            );
        }
        if self.decoder == DecoderChain::BpLgs {
            s += &format!("plgs={}\ncrc={}\n", self.path_len, self.crc.as_deref().unwrap_or("none"));
        }
        s
    }

    /// First 16 hex digits of the SHA-256 of [`canonical`](Self::canonical).
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CerRecord {
    pub ebn0_db: f64,
    pub trials: u64,
    pub errors: u64,
    pub cer: f64,
    /// Trials where the decision is a valid codeword other than the one
    /// sent, correlating at least as well with the LLRs.
    pub ml_lb_events: u64,
    pub ml_lb: f64,
    pub seconds: f64,
    pub config_hash: String,
    /// Trials where BP did not reach a codeword, so LGS was not run.
    pub lgs_skipped: u64,
    /// Trials where no codeword on the search path passed the CRC.
    pub crc_failures: u64,
}

/// `c_hat != c` and `c_hat` correlates at least as well as `c`. Callers
/// must only pass valid codewords as `c_hat`.
pub fn ml_lower_bound_event(c: &BitVector, c_hat: &BitVector, llr: &[f64]) -> bool {
    c != c_hat && c_hat.correlation(llr) >= c.correlation(llr)
}

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Number of minimum-weight codewords, `C(m, r) |Amin|^r`.
pub fn min_weight_count(code: &SubproductCode) -> Result<usize> {
    let base = code.base();
    if base.n() == 2 * base.d() {
        return Err(Error::MinWeightUnavailable {
            n: base.n(),
            d: base.d(),
        });
    }
    let amin = base.min_weight_codewords().len();
    Ok(binomial(code.factors(), code.order()) * amin.pow(code.order() as u32))
}

/// Leading union-bound term `A Q(sqrt(2 dmin R Eb/N0))` at the code rate.
pub fn union_bound_cer(code: &SubproductCode, ebn0_db: f64) -> Result<f64> {
    let a = min_weight_count(code)? as f64;
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    Ok(a * q_function((2.0 * code.dmin() as f64 * code.rate() * ebn0).sqrt()))
}

#[derive(Clone, Copy, Debug, Default)]
struct TrialOutcome {
    error: bool,
    ml_event: bool,
    lgs_skipped: bool,
    crc_failure: bool,
}

enum Decoder {
    FastMl(FirstOrderDecoder),
    Bp(BpDecoder),
    BpLgs(BpDecoder, LocalGraphSearch, SearchConfig),
}

/// A configured code and decoder chain, reusable across Eb/N0 points.
pub struct Simulator {
    cfg: SweepConfig,
    code: SubproductCode,
    decoder: Decoder,
    crc: Option<CrcSpec>,
    /// Information rate used for Eb: payload bits over length.
    rate: f64,
}

impl Simulator {
    pub fn new(cfg: SweepConfig) -> Result<Self> {
        cfg.validate()?;
        let code = cfg.code.build()?;
        let crc = match &cfg.crc {
            Some(text) => {
                let probe = CrcSpec::parse(text, 0)?;
                if probe.width() >= code.dim() {
                    return Err(Error::Config(format!(
                        "CRC width {} leaves no payload in dimension {}",
                        probe.width(),
                        code.dim()
                    )));
                }
                Some(CrcSpec::parse(text, code.dim() - probe.width())?)
            }
            None => None,
        };
        let decoder = match cfg.decoder {
            DecoderChain::FastMl => {
                if code.order() != 1 {
                    return Err(Error::Config(format!(
                        "fastml decodes first-order codes only (r = {})",
                        code.order()
                    )));
                }
                Decoder::FastMl(FirstOrderDecoder::new(code.base()))
            }
            DecoderChain::Bp => Decoder::Bp(Self::bp_for(&code)?),
            DecoderChain::BpLgs => {
                let lgs = LocalGraphSearch::new(&code).map_err(|e| {
                    Error::Config(format!("local graph search unavailable for {}: {e}", cfg.code))
                })?;
                let search = SearchConfig {
                    path_len: cfg.path_len,
                    crc: crc.clone(),
                };
                Decoder::BpLgs(Self::bp_for(&code)?, lgs, search)
            }
        };
        let payload = crc.as_ref().map_or(code.dim(), |c| c.message_len());
        let rate = payload as f64 / code.len() as f64;
        Ok(Simulator {
            cfg,
            code,
            decoder,
            crc,
            rate,
        })
    }

    fn bp_for(code: &SubproductCode) -> Result<BpDecoder> {
        if code.order() != 2 {
            return Err(Error::Config(format!(
                "bp decodes second-order codes only (r = {})",
                code.order()
            )));
        }
        BpDecoder::new(code)
    }

    pub fn code(&self) -> &SubproductCode {
        &self.code
    }

    pub fn config(&self) -> &SweepConfig {
        &self.cfg
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    fn trial(&self, channel: &ChannelConfig, point: u64, index: u64) -> Result<TrialOutcome> {
        let mut rng = trial_rng(self.cfg.seed, point, index);
        let msg = match &self.crc {
            Some(crc) => {
                let payload: Vec<bool> = (0..crc.message_len()).map(|_| rng.random()).collect();
                crc.append(&BitVector::from_bools(&payload))?
            }
            None => BitVector::from_bools(&(0..self.code.dim()).map(|_| rng.random()).collect::<Vec<_>>()),
        };
        let c = self.code.encode_systematic(&msg)?;
        let y = transmit(&modulate(&c), channel, &mut rng);
        let l = llr(&y, channel);

        let mut out = TrialOutcome::default();
        let (decision, valid) = match &self.decoder {
            Decoder::FastMl(fo) => (fo.ml(self.code.factors(), &l)?.codeword, true),
            Decoder::Bp(bp) => {
                let res = bp.decode(&l, &self.cfg.bp)?;
                (res.hard_decision, res.is_codeword)
            }
            Decoder::BpLgs(bp, lgs, search) => {
                let res = bp.decode(&l, &self.cfg.bp)?;
                if res.is_codeword {
                    let found = lgs.search(&res.hard_decision, &l, search)?;
                    out.crc_failure = found.crc_ok == Some(false);
                    (found.codeword, !out.crc_failure)
                } else {
                    out.lgs_skipped = true;
                    (res.hard_decision, false)
                }
            }
        };
        out.error = decision != c || out.crc_failure;
        out.ml_event = valid && ml_lower_bound_event(&c, &decision, &l);
        Ok(out)
    }

    /// Simulates one Eb/N0 point. Trials run in parallel batches, and the
    /// outcomes are scanned in index order, stopping exactly at the trial
    /// that reaches `min_errors`; the record is therefore independent of
    /// thread count and batch size.
    pub fn run_point(&self, point: usize) -> Result<CerRecord> {
        let ebn0_db = *self
            .cfg
            .ebn0_db
            .get(point)
            .ok_or_else(|| Error::Config(format!("no Eb/N0 point {point}")))?;
        let channel = ChannelConfig::new(ebn0_db, self.rate)?;
        let start = Instant::now();
        let (mut trials, mut errors, mut events, mut skipped, mut crc_fail) = (0u64, 0u64, 0u64, 0u64, 0u64);
        'outer: while trials < self.cfg.max_trials {
            let batch = (self.cfg.batch_size as u64).min(self.cfg.max_trials - trials);
            let outcomes = (trials..trials + batch)
                .into_par_iter()
                .map(|t| self.trial(&channel, point as u64, t))
                .collect::<Result<Vec<_>>>()?;
            for o in outcomes {
                trials += 1;
                errors += o.error as u64;
                events += o.ml_event as u64;
                skipped += o.lgs_skipped as u64;
                crc_fail += o.crc_failure as u64;
                if errors >= self.cfg.min_errors {
                    break 'outer;
                }
            }
        }
        Ok(CerRecord {
            ebn0_db,
            trials,
            errors,
            cer: errors as f64 / trials as f64,
            ml_lb_events: events,
            ml_lb: events as f64 / trials as f64,
            seconds: start.elapsed().as_secs_f64(),
            config_hash: self.cfg.config_hash(),
            lgs_skipped: skipped,
            crc_failures: crc_fail,
        })
    }

    /// Runs every grid point in order, reporting each record as it completes.
    pub fn run_with<F: FnMut(&CerRecord)>(&self, mut on_record: F) -> Result<Vec<CerRecord>> {
        let mut out = Vec::with_capacity(self.cfg.ebn0_db.len());
        for point in 0..self.cfg.ebn0_db.len() {
            let rec = self.run_point(point)?;
            on_record(&rec);
            out.push(rec);
        }
        Ok(out)
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<CerRecord>> {
    Simulator::new(cfg.clone())?.run_with(|_| {})
}

pub const CSV_HEADER: [&str; 7] = ["ebn0_db", "trials", "errors", "cer", "ml_lb", "seconds", "config_hash"];

pub fn write_results<W: Write>(records: &[CerRecord], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in records {
                w.write_record([
                    r.ebn0_db.to_string(),
                    r.trials.to_string(),
                    r.errors.to_string(),
                    r.cer.to_string(),
                    r.ml_lb.to_string(),
                    format!("{:.3}", r.seconds),
                    r.config_hash.clone(),
                ])?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, records)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
