//! `univoque`: command-line access to quasi-greedy expansions, uniqueness
//! tests, entropy plateaus and the dimension staircase.
//!
//! Exit codes: 0 success or positive verdict, 1 negative verdict,
//! 2 precision exhausted, 3 parse or argument error, 4 resource limit.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use univoque::bifurcation::{bits_for_width, classify_base, enumerate_plateaus, q_kl, q_t, BaseClass, Plateau, PlateauRow};
use univoque::digits::{Alphabet, EpSeq};
use univoque::dimension::{default_max_period, staircase, PhiOptions};
use univoque::expansion::{
    base_from_alpha, greedy_expansion, is_unique_expansion, quasi_greedy_alpha, BaseEnclosure, ExpansionVerdict,
    DEFAULT_ROOT_BITS,
};
use univoque::rational::{certified_bits, format_decimal, format_ratio, int, parse_rational, BigRational, Round};
use univoque::Error;

#[derive(Parser)]
#[command(name = "univoque", version, about = "Unique expansions in non-integer bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Quasi-greedy expansion of 1 in base q.
    Alpha {
        #[arg(long = "M")]
        m: u32,
        /// Base: `p/q`, a decimal literal, or `root:<sequence>`.
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = 20)]
        digits: usize,
    },
    /// Enclosure of the Komornik-Loreti constant.
    Kl {
        #[arg(long = "M")]
        m: u32,
        #[arg(long, default_value = "1e-12")]
        width: String,
    },
    /// Enclosure of the transitivity threshold q_T.
    Qt {
        #[arg(long = "M")]
        m: u32,
        #[arg(long, default_value = "1e-12")]
        width: String,
    },
    /// Depth-bounded uniqueness of the q-expansion of x.
    Unique {
        #[arg(long = "M")]
        m: u32,
        #[arg(long)]
        q: String,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 40)]
        depth: usize,
    },
    /// Entropy plateaus with left endpoint in (tmin, tmax].
    Plateaus {
        #[arg(long = "M")]
        m: u32,
        #[arg(long)]
        tmin: Option<String>,
        #[arg(long)]
        tmax: Option<String>,
        #[arg(long = "max-period")]
        max_period: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Samples of the dimension staircase φ(t) = max over q <= t of dim U_q.
    Staircase {
        #[arg(long = "M")]
        m: u32,
        #[arg(long)]
        tmin: String,
        #[arg(long)]
        tmax: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long = "max-period")]
        max_period: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locates q relative to the plateaus of the entropy function.
    Classify {
        #[arg(long = "M")]
        m: u32,
        #[arg(long)]
        q: String,
        #[arg(long = "max-period")]
        max_period: Option<usize>,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PrecisionExhausted => 2,
            Error::StateSpaceTooLarge { .. } => 4,
            _ => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 4, message: e.to_string() }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure { code: 4, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure { code: 4, message: e.to_string() }
    }
}

type Outcome = std::result::Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn alphabet(m: u32) -> Result<Alphabet, Failure> {
    Ok(Alphabet::new(m)?)
}

fn rational(text: &str) -> Result<BigRational, Failure> {
    Ok(parse_rational(text)?)
}

/// `root:<sequence>` or a rational literal.
fn base(a: Alphabet, text: &str) -> Result<BaseEnclosure, Failure> {
    match text.trim().strip_prefix("root:") {
        Some(seq) => Ok(base_from_alpha(&EpSeq::parse(a, seq)?)?),
        None => Ok(BaseEnclosure::exact(rational(text)?)?),
    }
}

fn width_bits(text: &str) -> Result<u32, Failure> {
    Ok(bits_for_width(&rational(text)?)?)
}

/// Decimal places that resolve an enclosure of `bits` binary digits.
fn places(bits: u32) -> u32 {
    (bits as f64 * std::f64::consts::LOG10_2).ceil() as u32 + 3
}

fn enclosure_text(q: &BaseEnclosure) -> String {
    if q.is_exact() {
        let v = format_ratio(q.lo());
        return format!("{v},{v}");
    }
    let p = places(certified_bits(&q.width()).min(3000));
    format!("{},{}", format_decimal(q.lo(), p, Round::Down), format_decimal(q.hi(), p, Round::Up))
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Alpha { m, q, digits } => {
            let a = alphabet(m)?;
            let q = base(a, &q)?;
            let w = quasi_greedy_alpha(a, &q, digits)?;
            println!("{w}");
            println!("q in [{}]", enclosure_text(&q));
            Ok(0)
        }
        Command::Kl { m, width } => {
            let a = alphabet(m)?;
            let q = q_kl(a, width_bits(&width)?);
            println!("{}", enclosure_text(&q));
            Ok(0)
        }
        Command::Qt { m, width } => {
            let a = alphabet(m)?;
            let q = q_t(a, width_bits(&width)?);
            println!("{}", enclosure_text(&q));
            Ok(0)
        }
        Command::Unique { m, q, x, depth } => unique(m, &q, &x, depth),
        Command::Plateaus { m, tmin, tmax, max_period, format, out } => {
            let a = alphabet(m)?;
            let kl = q_kl(a, DEFAULT_ROOT_BITS);
            let lo = tmin.as_deref().map(rational).transpose()?.unwrap_or_else(|| kl.lo().clone());
            let hi = tmax.as_deref().map(rational).transpose()?.unwrap_or_else(|| int(a.size() as i64));
            let max_period = max_period.unwrap_or(default_max_period(a));
            let plateaus = enumerate_plateaus(a, &lo, &hi, max_period)?;
            write_plateaus(a, &plateaus, max_period, format, &out)?;
            Ok(0)
        }
        Command::Staircase { m, tmin, tmax, samples, window, max_period, format, out } => {
            let a = alphabet(m)?;
            let mut opts = PhiOptions::for_alphabet(a);
            if let Some(n) = window {
                opts.window = n;
            }
            if let Some(p) = max_period {
                opts.max_period = p;
            }
            let table = staircase(a, &rational(&tmin)?, &rational(&tmax)?, samples, &opts)?;
            let mut w = sink(&out)?;
            match format {
                Format::Csv => {
                    let mut c = csv::Writer::from_writer(w);
                    for row in &table.rows {
                        c.serialize(row)?;
                    }
                    c.flush()?;
                }
                Format::Json => {
                    #[derive(Serialize)]
                    struct Doc<'a> {
                        #[serde(rename = "M")]
                        m: u8,
                        window: usize,
                        samples: usize,
                        max_period: usize,
                        q_kl: [String; 2],
                        rows: &'a [univoque::dimension::StaircaseRow],
                    }
                    let kl = q_kl(a, DEFAULT_ROOT_BITS);
                    let p = places(DEFAULT_ROOT_BITS);
                    let doc = Doc {
                        m: table.m,
                        window: table.window,
                        samples: table.samples,
                        max_period: opts.max_period,
                        q_kl: [format_decimal(kl.lo(), p, Round::Down), format_decimal(kl.hi(), p, Round::Up)],
                        rows: &table.rows,
                    };
                    serde_json::to_writer_pretty(&mut w, &doc)?;
                    writeln!(w)?;
                }
            }
            Ok(0)
        }
        Command::Classify { m, q, max_period } => {
            let a = alphabet(m)?;
            let q = base(a, &q)?;
            let max_period = max_period.unwrap_or(default_max_period(a));
            match classify_base(a, &q, max_period)? {
                BaseClass::BelowKl => println!("BelowKL"),
                BaseClass::InPlateau(p) => println!("InPlateau {}", plateau_text(&p)),
                BaseClass::BifurcationCandidate { resolution, left, right } => {
                    println!("BifurcationCandidate resolution={resolution}");
                    if let Some(p) = left {
                        println!("left {}", plateau_text(&p));
                    }
                    if let Some(p) = right {
                        println!("right {}", plateau_text(&p));
                    }
                }
            }
            Ok(0)
        }
    }
}

fn plateau_text(p: &Plateau) -> String {
    format!(
        "generator={} kind={} p_L=[{}] p_R=[{}] entropy=[{},{}]",
        p.generator,
        p.kind,
        enclosure_text(&p.p_l),
        enclosure_text(&p.p_r),
        p.entropy.lower,
        p.entropy.upper
    )
}

fn unique(m: u32, q: &str, x: &str, depth: usize) -> Outcome {
    let a = alphabet(m)?;
    let q = base(a, q)?;
    let x = rational(x)?;
    let verdict = match is_unique_expansion(a, &x, &q, depth) {
        Ok(v) => v,
        Err(Error::PrecisionExhausted) => {
            println!("undecided: precision exhausted");
            return Ok(2);
        }
        Err(e) => return Err(e.into()),
    };
    let witness = || greedy_expansion(a, &x, &q, depth).map(|w| w.to_string());
    match verdict {
        ExpansionVerdict::Trivial => {
            println!("unique: trivial expansion");
            Ok(0)
        }
        ExpansionVerdict::UniqueToDepth(d) => {
            println!("unique to depth {d}");
            println!("expansion {}", witness()?);
            Ok(0)
        }
        ExpansionVerdict::NotUnique { position, digits: (hi, lo) } => {
            println!("not unique: digits {hi} and {lo} both extend at position {position}");
            println!("greedy {}", witness()?);
            Ok(1)
        }
    }
}

fn write_plateaus(a: Alphabet, plateaus: &[Plateau], max_period: usize, format: Format, out: &Option<PathBuf>) -> Result<(), Failure> {
    let rows: Vec<PlateauRow> = plateaus.iter().map(PlateauRow::from).collect();
    let mut w = sink(out)?;
    match format {
        Format::Csv => {
            let mut c = csv::WriterBuilder::new().has_headers(true).from_writer(w);
            if rows.is_empty() {
                c.write_record([
                    "M", "generator", "p_L_lo", "p_L_hi", "p_hat_lo", "p_hat_hi", "p_R_lo", "p_R_hi", "entropy_lo",
                    "entropy_hi", "kind",
                ])?;
            }
            for row in &rows {
                c.serialize(row)?;
            }
            c.flush()?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                #[serde(rename = "M")]
                m: u8,
                max_period: usize,
                rows: &'a [PlateauRow],
            }
            serde_json::to_writer_pretty(&mut w, &Doc { m: a.max(), max_period, rows: &rows })?;
            writeln!(w)?;
        }
    }
    Ok(())
}
