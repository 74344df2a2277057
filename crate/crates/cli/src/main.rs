mod eqfile;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use metabel_core::{
    brute_force_solve, solve, verify_certificate, words_equal, Certificate, PackingInstance,
    SolveOptions, SolverInstance, SphericalEquation, Strategy, Verdict, VerdictRecord, WitnessTuple,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "metabel", version, about = "Spherical equations in free metabelian groups")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Search strategy [default: backtracking; `bench` runs both].
    #[arg(long, global = true)]
    strategy: Option<Strategy>,
    /// Also search for word-level witnesses up to this length.
    #[arg(long, global = true, value_name = "N")]
    max_len: Option<usize>,
    #[arg(long, global = true, value_name = "SECONDS", env = "METABEL_TIMEOUT")]
    timeout: Option<f64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Are two words equal in M_n?
    Word {
        #[arg(short = 'n', long)]
        rank: usize,
        u: String,
        w: String,
    },
    /// Are two words conjugate in M_n?
    Conj {
        #[arg(short = 'n', long)]
        rank: usize,
        u: String,
        w: String,
    },
    /// Decide an equation file.
    Solve { file: PathBuf },
    /// Check a certificate (JSON) against an equation file.
    Verify { equation: PathBuf, certificate: PathBuf },
    /// Print the equation file for a square-packing instance.
    EncodePacking {
        #[arg(required_unless_present = "file")]
        sides: Vec<u64>,
        /// Read the sides from a file instead.
        #[arg(long, short = 'f', conflicts_with = "sides")]
        file: Option<PathBuf>,
    },
    /// Pack squares into a square box.
    Pack {
        #[arg(required_unless_present = "file")]
        sides: Vec<u64>,
        #[arg(long, short = 'f', conflicts_with = "sides")]
        file: Option<PathBuf>,
        /// Draw the packing.
        #[arg(long)]
        ascii: bool,
    },
    /// Time every `.eq` file in a directory (TSV); runs are capped at 10 s
    /// unless `--timeout` says otherwise.
    Bench { dir: PathBuf },
}

/// Per-run limit for `bench` when no timeout is given.
const BENCH_TIMEOUT: Duration = Duration::from_secs(10);

/// Affirmative or negative answer; errors are reported separately.
struct Answer(bool);

impl Cli {
    fn options(&self) -> Result<SolveOptions> {
        let timeout = match self.timeout {
            Some(s) if !(s.is_finite() && s >= 0.0) => bail!("timeout must be a non-negative number of seconds"),
            Some(s) => Some(Duration::from_secs_f64(s)),
            None => None,
        };
        Ok(SolveOptions { strategy: self.strategy.unwrap_or_default(), timeout, threads: self.threads })
    }

    fn run(&self) -> Result<Answer> {
        match &self.command {
            Command::Word { rank, u, w } => {
                let (u, w) = (eqfile::parse_word(u, *rank)?, eqfile::parse_word(w, *rank)?);
                let equal = words_equal(&u, &w)?;
                self.emit(json!({ "equal": equal }), if equal { "equal" } else { "not equal" });
                Ok(Answer(equal))
            }
            Command::Conj { rank, u, w } => {
                let (u, w) = (eqfile::parse_word(u, *rank)?, eqfile::parse_word(w, *rank)?);
                let eq = SphericalEquation::new(*rank, vec![u, w.inverse()])?;
                let verdict = self.decide(&eq)?;
                let conjugate = verdict.is_sat();
                let mut out = json!({ "conjugate": conjugate });
                let mut text = String::from(if conjugate { "conjugate" } else { "not conjugate" });
                if let Some(witness) = self.witness(&eq, &mut out) {
                    // x = u₂⁻¹ satisfies x⁻¹ u x = w.
                    text.push_str(&format!("\nconjugator: {}", witness.words[1].inverse().free_reduce()));
                }
                self.emit(out, &text);
                Ok(Answer(conjugate))
            }
            Command::Solve { file } => {
                let eq = read_equation(file)?;
                let verdict = self.decide(&eq)?;
                let mut out = serde_json::to_value(VerdictRecord::from(verdict.clone()))?;
                let mut text = verdict.status().to_string();
                if let Verdict::Sat(cert) = &verdict {
                    for (i, a) in cert.alphas.iter().enumerate() {
                        text.push_str(&format!("\nalpha{} {a}", i + 1));
                    }
                }
                if let Some(witness) = self.witness(&eq, &mut out) {
                    for (i, u) in witness.words.iter().enumerate() {
                        text.push_str(&format!("\nu{} {}", i + 1, display_word(u)));
                    }
                }
                self.emit(out, &text);
                Ok(Answer(verdict.is_sat()))
            }
            Command::Verify { equation, certificate } => {
                let inst = SolverInstance::new(read_equation(equation)?)?;
                let cert = read_certificate(certificate)?;
                let valid = verify_certificate(&inst, &cert)?;
                self.emit(json!({ "valid": valid }), if valid { "valid" } else { "invalid" });
                Ok(Answer(valid))
            }
            Command::EncodePacking { sides, file } => {
                let inst = PackingInstance::new(&read_sides(sides, file.as_deref())?)?;
                let eq = inst.equation();
                let words: Vec<String> = eq.constants().iter().map(|c| c.to_string()).collect();
                let text = format!(
                    "# box {}, unary size {}\n{}",
                    inst.box_side(),
                    inst.unary_size(),
                    eqfile::format(&eq).trim_end()
                );
                self.emit(
                    json!({ "rank": eq.rank(), "constants": words, "box": inst.box_side(), "unary_size": inst.unary_size() }),
                    &text,
                );
                Ok(Answer(true))
            }
            Command::Pack { sides, file, ascii } => {
                let inst = PackingInstance::new(&read_sides(sides, file.as_deref())?)?;
                let found = metabel_core::pack_brute_force(&inst);
                let text = match &found {
                    None => "none".to_string(),
                    Some(p) if *ascii => p.render_ascii(&inst).trim_end().to_string(),
                    Some(p) => {
                        let rows: Vec<String> = inst
                            .sides()
                            .iter()
                            .zip(&p.offsets)
                            .map(|(s, [x, y])| format!("{s} at ({x},{y})"))
                            .collect();
                        format!("box {}\n{}", inst.box_side(), rows.join("\n"))
                    }
                };
                let out = match &found {
                    Some(p) => serde_json::to_value(p.record(&inst))?,
                    None => serde_json::Value::Null,
                };
                if !self.json {
                    eprintln!("unary size {}", inst.unary_size());
                }
                self.emit(out, &text);
                Ok(Answer(found.is_some()))
            }
            Command::Bench { dir } => self.bench(dir),
        }
    }

    fn decide(&self, eq: &SphericalEquation) -> Result<Verdict> {
        let inst = SolverInstance::new(eq.clone())?;
        match solve(&inst, &self.options()?) {
            Verdict::Timeout => bail!("timed out"),
            v => Ok(v),
        }
    }

    /// Runs the brute-force search when `--max-len` is given and records the
    /// outcome under `"witness"`.
    fn witness(&self, eq: &SphericalEquation, out: &mut serde_json::Value) -> Option<WitnessTuple> {
        let max_len = self.max_len?;
        let found = brute_force_solve(eq, max_len);
        let words = found.as_ref().map(|t| t.words.iter().map(display_word).collect::<Vec<_>>());
        out["witness"] = json!(words);
        if found.is_none() && !self.json {
            eprintln!("no witness with |u_i| <= {max_len}");
        }
        found
    }

    fn bench(&self, dir: &Path) -> Result<Answer> {
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .with_context(|| format!("reading {}", dir.display()))?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        files.retain(|p| p.extension().is_some_and(|e| e == "eq"));
        files.sort();
        let strategies = match self.strategy {
            Some(s) => vec![s],
            None => vec![Strategy::Exhaustive, Strategy::Backtracking],
        };
        let mut opts = self.options()?;
        opts.timeout.get_or_insert(BENCH_TIMEOUT);
        let mut out = std::io::stdout().lock();
        writeln!(out, "instance\tstrategy\tverdict\tmillis")?;
        for file in &files {
            let inst = SolverInstance::new(read_equation(file)?)?;
            let name = file.file_stem().unwrap_or_default().to_string_lossy();
            for &strategy in &strategies {
                opts.strategy = strategy;
                let started = Instant::now();
                let v = solve(&inst, &opts);
                let millis = started.elapsed().as_secs_f64() * 1e3;
                writeln!(out, "{name}\t{strategy}\t{}\t{millis:.3}", v.status())?;
            }
        }
        Ok(Answer(true))
    }

    fn emit(&self, value: serde_json::Value, text: &str) {
        if self.json {
            println!("{value}");
        } else {
            println!("{text}");
        }
    }
}

fn display_word(w: &metabel_core::GroupWord) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        w.to_string()
    }
}

fn read_equation(path: &Path) -> Result<SphericalEquation> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    eqfile::parse(&text).with_context(|| format!("in {}", path.display()))
}

/// Either a bare certificate or a full `solve --json` record.
fn read_certificate(path: &Path) -> Result<Certificate> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(cert) = serde_json::from_str::<Certificate>(&text) {
        return Ok(cert);
    }
    let record: VerdictRecord =
        serde_json::from_str(&text).with_context(|| format!("{} is not a certificate", path.display()))?;
    match record.certificate {
        Some(cert) => Ok(cert),
        None => bail!("{} records a {} verdict without a certificate", path.display(), record.status),
    }
}

fn read_sides(sides: &[u64], file: Option<&Path>) -> Result<Vec<u64>> {
    let Some(path) = file else { return Ok(sides.to_vec()) };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.split_whitespace()
        .map(|t| t.parse::<u64>().with_context(|| format!("bad side length `{t}`")))
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.run() {
        Ok(Answer(true)) => ExitCode::SUCCESS,
        Ok(Answer(false)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
