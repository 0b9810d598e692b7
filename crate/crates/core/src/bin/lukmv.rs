//! Command-line front end: translate formulas between the two existential
//! theories, decide satisfiability, and run the lemma verification suites.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lukmv::decide::{decide_mv, decide_pab, DecideConfig, DecideError, Verdict};
use lukmv::formula::Signature;
use lukmv::lemmas::{run_suite, SuiteConfig, SUITES};
use lukmv::linear::LinearError;
use lukmv::parser::{format_formula_file, parse_formula, parse_formula_file, print_formula};
use lukmv::rat::format_rat;
use lukmv::reduction::{build_s_mv, build_s_pab, ReductionParams, TranslationReport, DEFAULT_C};
use lukmv::transform::TransformError;

const EXIT_UNSAT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "lukmv",
    version,
    about = "Exact oracles and translations for Lukasiewicz/l-group existential theories",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Lang {
    Ab,
    #[value(name = "pab")]
    PAb,
    Mv,
    #[value(name = "mvhalf")]
    MvHalf,
}

impl Lang {
    fn sig(self) -> Signature {
        match self {
            Lang::Ab => Signature::Ab,
            Lang::PAb => Signature::PAb,
            Lang::Mv => Signature::Mv,
            Lang::MvHalf => Signature::MvHalf,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Translate a formula file to its S(Phi, M, k) form
    Translate {
        /// Formula file, or a literal formula when --lang is given
        input: String,
        /// Parse the input argument as a formula in this language
        #[arg(long)]
        lang: Option<Lang>,
        /// Target language (mv for pab input); defaults by input signature
        #[arg(long)]
        to: Option<Lang>,
        /// Self-translation (mv -> mv, the §5 construction)
        #[arg(long = "self", conflicts_with = "to")]
        self_: bool,
        /// Witness-box parameter c
        #[arg(long, default_value_t = DEFAULT_C)]
        c: u64,
        /// Override the certified M (requires --unsafe-M)
        #[arg(long = "M")]
        m: Option<u64>,
        /// Acknowledge that an overridden M voids the completeness guarantee
        #[arg(long = "unsafe-M")]
        unsafe_m: bool,
        /// Write the translated formula file here (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Decide satisfiability of each formula in a file
    Decide {
        /// Formula file, or a literal formula when --lang is given
        input: String,
        /// Parse the input argument as a formula in this language
        #[arg(long)]
        lang: Option<Lang>,
        /// DNF disjunct cap
        #[arg(long, default_value_t = DecideConfig::default().dnf_cap)]
        dnf_cap: usize,
        /// Case-split branch cap
        #[arg(long, default_value_t = DecideConfig::default().split_cap)]
        split_cap: usize,
        /// Write the report here (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a lemma verification suite
    CheckLemma {
        /// Suite name (tau, tau-atoms, tau-tseitin, bonus, delta, sigma,
        /// tau-q, roundtrip-pab, roundtrip-mv, smallsol, brute, size-guard,
        /// tseitin)
        name: String,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Largest gadget chain length checked by the bonus suite
        #[arg(long, default_value_t = 8)]
        max_chain: u64,
        /// DNF disjunct cap
        #[arg(long, default_value_t = DecideConfig::default().dnf_cap)]
        dnf_cap: usize,
        /// Case-split branch cap
        #[arg(long, default_value_t = DecideConfig::default().split_cap)]
        split_cap: usize,
        /// Write the report here (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("LUK_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> CliError {
    CliError {
        code,
        message: message.into(),
    }
}

fn decide_error(e: DecideError) -> CliError {
    let code = match &e {
        DecideError::Transform(TransformError::DnfCap { .. }) => EXIT_CAP,
        DecideError::Linear(LinearError::RowCap { .. }) => EXIT_CAP,
        DecideError::SplitCap { .. } => EXIT_CAP,
        _ => EXIT_USAGE,
    };
    fail(code, e.to_string())
}

/// Reads the formulas to work on: a `#lang`-tagged file, or the argument
/// itself when `--lang` is given.
fn load(
    input: &str,
    lang: Option<Lang>,
) -> Result<(Signature, Vec<lukmv::formula::OpenFormula>), CliError> {
    match lang {
        Some(lang) => {
            let sig = lang.sig();
            let f = parse_formula(input, sig).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
            Ok((sig, vec![f]))
        }
        None => {
            let text =
                fs::read_to_string(input).map_err(|e| fail(EXIT_USAGE, format!("{input}: {e}")))?;
            parse_formula_file(&text).map_err(|e| fail(EXIT_USAGE, format!("{input}: {e}")))
        }
    }
}

/// All file output is written to a sibling temp file and renamed into place,
/// so a failed run never leaves a partial file behind.
fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            let tmp = path.with_extension("tmp");
            fs::write(&tmp, content)
                .and_then(|()| fs::rename(&tmp, path))
                .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))
        }
    }
}

/// Report text of one translation; timings only in text mode, so structured
/// reports are byte-identical across runs.
fn render_report(report: &TranslationReport, format: Format) -> String {
    match format {
        Format::Text => report.render(),
        Format::Structured => report
            .render()
            .lines()
            .filter(|l| !l.starts_with("time_"))
            .fold(String::new(), |mut s, l| {
                let _ = writeln!(s, "{l}");
                s
            }),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Translate {
            input,
            lang,
            to,
            self_,
            c,
            m,
            unsafe_m,
            out,
            format,
        } => {
            if m.is_some() && !unsafe_m {
                return Err(fail(
                    EXIT_USAGE,
                    "--M voids the certified witness box; pass --unsafe-M to override it",
                ));
            }
            let (sig, formulas) = load(&input, lang)?;
            let to_mv = match (to.map(Lang::sig), self_) {
                (Some(Signature::Mv), false) => true,
                (None, true) => false,
                (None, false) => matches!(sig, Signature::Ab | Signature::PAb),
                (Some(other), false) => {
                    return Err(fail(
                        EXIT_USAGE,
                        format!("unsupported translation target `{other}`"),
                    ))
                }
                (Some(_), true) => unreachable!("clap rejects --to with --self"),
            };
            if to_mv && !matches!(sig, Signature::Ab | Signature::PAb) {
                return Err(fail(
                    EXIT_USAGE,
                    format!("`--to mv` expects a pab input, got `{sig}`"),
                ));
            }
            if !to_mv && !matches!(sig, Signature::Mv | Signature::MvHalf) {
                return Err(fail(
                    EXIT_USAGE,
                    format!("`--self` expects an mv input, got `{sig}`"),
                ));
            }
            let mut outputs = Vec::new();
            let mut reports = String::new();
            for f in &formulas {
                let mut p = ReductionParams::for_formula(f, c);
                if let Some(m) = m {
                    p = p.with_m(m);
                }
                let (s, report) = if to_mv {
                    build_s_pab(f, &p)
                } else {
                    build_s_mv(f, &p)
                }
                .map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
                reports.push_str(&render_report(&report, format));
                outputs.push(s);
            }
            let out_sig = if to_mv {
                Signature::Mv
            } else {
                Signature::MvHalf
            };
            let file = format_formula_file(out_sig, &outputs);
            match out {
                Some(path) => {
                    emit(Some(&path), &file)?;
                    if format == Format::Structured {
                        let _ = writeln!(reports, "out={}", path.display());
                    } else {
                        let _ = writeln!(reports, "wrote {}", path.display());
                    }
                }
                None => reports.push_str(&file),
            }
            if format == Format::Structured {
                reports.push_str("verdict=ok\n");
            }
            print!("{reports}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Decide {
            input,
            lang,
            dnf_cap,
            split_cap,
            out,
            format,
        } => {
            let (sig, formulas) = load(&input, lang)?;
            if formulas.is_empty() {
                return Err(fail(EXIT_USAGE, format!("{input}: no formulas")));
            }
            let cfg = DecideConfig {
                dnf_cap,
                split_cap,
                ..DecideConfig::default()
            };
            let mut report = String::new();
            let mut all_sat = true;
            for f in &formulas {
                let verdict = match sig {
                    Signature::Ab | Signature::PAb => decide_pab(f, &cfg),
                    Signature::Mv | Signature::MvHalf => decide_mv(f, &cfg),
                }
                .map_err(decide_error)?;
                all_sat &= verdict.witness.is_some();
                render_verdict(&mut report, f, &verdict, format);
            }
            if format == Format::Structured {
                let _ = writeln!(report, "verdict={}", if all_sat { "sat" } else { "unsat" });
            }
            emit(out.as_deref(), &report)?;
            Ok(if all_sat {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_UNSAT)
            })
        }
        Command::CheckLemma {
            name,
            count,
            seed,
            max_chain,
            dnf_cap,
            split_cap,
            out,
            format,
        } => {
            let cfg = SuiteConfig {
                seed,
                count,
                max_chain,
                decide: DecideConfig {
                    dnf_cap,
                    split_cap,
                    ..DecideConfig::default()
                },
            };
            let report = run_suite(&name, &cfg).ok_or_else(|| {
                fail(
                    EXIT_USAGE,
                    format!("unknown lemma suite `{name}`; known: {}", SUITES.join(", ")),
                )
            })?;
            let mut s = String::new();
            match format {
                Format::Text => {
                    let _ = writeln!(
                        s,
                        "{}: {}/{} pass",
                        report.name, report.passed, report.total
                    );
                    for f in &report.failures {
                        let _ = writeln!(s, "  {f}");
                    }
                }
                Format::Structured => {
                    let _ = writeln!(s, "suite={}", report.name);
                    let _ = writeln!(s, "seed={seed}");
                    let _ = writeln!(s, "count={}", report.total);
                    let _ = writeln!(s, "passed={}", report.passed);
                    for (i, f) in report.failures.iter().enumerate() {
                        let _ = writeln!(s, "failure_{i}={f}");
                    }
                    let _ = writeln!(s, "verdict={}", if report.ok() { "ok" } else { "fail" });
                }
            }
            emit(out.as_deref(), &s)?;
            Ok(if report.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_UNSAT)
            })
        }
    }
}

fn render_verdict(
    report: &mut String,
    f: &lukmv::formula::OpenFormula,
    v: &Verdict,
    format: Format,
) {
    match format {
        Format::Text => match &v.witness {
            Some(w) => {
                let _ = writeln!(report, "SAT {}", print_formula(f));
                for (name, val) in w {
                    let _ = writeln!(report, "  {name} = {}", format_rat(val));
                }
            }
            None => {
                let _ = writeln!(report, "UNSAT {}", print_formula(f));
            }
        },
        Format::Structured => {
            let _ = writeln!(report, "formula={}", print_formula(f));
            let _ = writeln!(
                report,
                "status={}",
                if v.witness.is_some() { "sat" } else { "unsat" }
            );
            if let Some(w) = &v.witness {
                for (name, val) in w {
                    let _ = writeln!(report, "witness_{name}={}", format_rat(val));
                }
            }
            let _ = writeln!(report, "disjuncts={}", v.stats.disjuncts);
            let _ = writeln!(report, "branches={}", v.stats.branches);
        }
    }
}
