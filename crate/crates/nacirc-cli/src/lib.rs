//! Command-line front end. [`run`] does all the work so it can be driven
//! in-process by tests; the binary only forwards `std::env::args`.

use std::fs;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use nacirc::circuit::{gen_random_with, GenParams};
use nacirc::hitting::{hitting_set_nonassoc, weight_family_names, HittingOptions};
use nacirc::oracle::{expand, DEFAULT_MAX_TERMS};
use nacirc::strategy::{strategy, strategy_names, PitOptions, Verdict};
use nacirc::verify::{verify_suite, CorpusSize, SuiteConfig};
use nacirc::{Circuit, Error, Field, Mode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "nacirc", version, about = "Identity testing for nonassociative arithmetic circuits")]
struct Cli {
    /// Prime modulus (default 2305843009213693951); overrides the one
    /// declared in circuit files.
    #[arg(long, global = true)]
    field: Option<u64>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct PitArgs {
    /// Circuit file, or `-` for standard input.
    file: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample-set size for random evaluation (default 100 times the degree).
    #[arg(long)]
    set_size: Option<u64>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Degree bound announced to black-box tests.
    #[arg(long)]
    degree: Option<usize>,
    /// Product-depth bound for the hitting set (default: the circuit's).
    #[arg(long)]
    depth: Option<usize>,
    /// Cap on weight candidates and on hitting-set points evaluated.
    #[arg(long)]
    budget: Option<u128>,
    /// Weight family for hitting sets.
    #[arg(long, default_value = "exact")]
    family: String,
    #[arg(long, default_value_t = DEFAULT_MAX_TERMS)]
    max_terms: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Deterministic white-box test.
    PitWhite(PitArgs),
    /// Randomized black-box test.
    PitRandom(PitArgs),
    /// Deterministic black-box test by hitting set.
    PitHitting(PitArgs),
    /// Run any registered strategy by name.
    Pit {
        #[arg(long)]
        strategy: String,
        #[command(flatten)]
        args: PitArgs,
    },
    /// Print every monomial with its coefficient.
    Expand {
        file: String,
        #[arg(long, default_value_t = DEFAULT_MAX_TERMS)]
        max_terms: usize,
    },
    /// Print a seeded random circuit.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value = "comm")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cap on product depth.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Print the hitting set for a circuit class as element dumps.
    HittingDump {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value = "comm")]
        mode: String,
        #[arg(long)]
        budget: Option<u128>,
        #[arg(long, default_value = "exact")]
        family: String,
    },
    /// Run the agreement suite.
    Verify {
        #[arg(long, default_value = "small")]
        corpus: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Inject a wrong product rule into the white-box test.
        #[arg(long)]
        fault: bool,
        #[arg(long)]
        budget: Option<u128>,
    },
    /// List registered strategies and weight families.
    List,
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_parse() || matches!(e, Error::NotPrime(_) | Error::Unknown { .. } | Error::BadMode(_)) {
            EXIT_PARSE
        } else if e.is_unsupported() {
            EXIT_UNSUPPORTED
        } else {
            EXIT_FAILURE
        };
        Failure { code, msg: e.to_string() }
    }
}

fn io_failure(what: &str, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_FAILURE,
        msg: format!("{what}: {e}"),
    }
}

struct Ctx<'a> {
    field: Option<Field>,
    json: bool,
    stdin: &'a mut dyn Read,
}

impl Ctx<'_> {
    fn field_or_default(&self) -> Field {
        self.field.unwrap_or_default()
    }

    fn load(&mut self, path: &str) -> Result<Circuit, Failure> {
        let bytes = if path == "-" {
            let mut b = Vec::new();
            self.stdin.read_to_end(&mut b).map_err(|e| io_failure("stdin", e))?;
            b
        } else {
            fs::read(path).map_err(|e| io_failure(path, e))?
        };
        let text = String::from_utf8(bytes).map_err(|_| Failure {
            code: EXIT_PARSE,
            msg: "input is not UTF-8".into(),
        })?;
        Ok(match self.field {
            Some(f) => Circuit::parse_with_field(&text, f)?,
            None => Circuit::parse(&text)?,
        })
    }
}

fn pit_options(a: &PitArgs) -> PitOptions {
    let mut hitting = match a.budget {
        Some(b) => HittingOptions::with_budget(b),
        None => HittingOptions::default(),
    };
    hitting.family = a.family.clone();
    PitOptions {
        seed: a.seed,
        max_terms: a.max_terms,
        set_size: a.set_size,
        trials: a.trials,
        degree: a.degree,
        depth: a.depth,
        hitting,
        ..Default::default()
    }
}

fn emit_verdict(out: &mut dyn Write, v: &Verdict, json: bool) -> Result<(), Failure> {
    let text = if json {
        serde_json::to_string(v).expect("verdicts serialize")
    } else {
        v.to_string()
    };
    writeln!(out, "{text}").map_err(|e| io_failure("stdout", e))
}

#[derive(Serialize)]
struct Term {
    coefficient: u64,
    monomial: String,
}

#[derive(Serialize)]
struct Expansion {
    terms: Vec<Term>,
    constant: u64,
}

#[derive(Serialize)]
struct DumpPoint {
    candidate: usize,
    t: u128,
    elements: Vec<String>,
}

#[derive(Serialize)]
struct ReportLine {
    id: u8,
    name: String,
    passed: bool,
    detail: String,
}

fn dispatch(cli: Cli, ctx: &mut Ctx, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let wr = |e| io_failure("stdout", e);
    match cli.cmd {
        Command::PitWhite(a) => run_strategy("white", &a, ctx, out),
        Command::PitRandom(a) => run_strategy("random", &a, ctx, out),
        Command::PitHitting(a) => run_strategy("hitting", &a, ctx, out),
        Command::Pit { strategy: s, args } => run_strategy(&s, &args, ctx, out),
        Command::Expand { file, max_terms } => {
            let c = ctx.load(&file)?;
            let p = expand(&c, max_terms)?;
            if ctx.json {
                let e = Expansion {
                    terms: p
                        .terms()
                        .map(|(m, c)| Term {
                            coefficient: *c,
                            monomial: m.to_string(),
                        })
                        .collect(),
                    constant: p.constant(),
                };
                writeln!(out, "{}", serde_json::to_string(&e).expect("serializes")).map_err(wr)?;
            } else {
                write!(out, "{}", p.to_lines()).map_err(wr)?;
            }
            Ok(EXIT_OK)
        }
        Command::Gen {
            n,
            size,
            degree,
            mode,
            seed,
            depth,
        } => {
            if n == 0 || size == 0 {
                return Err(Failure {
                    code: EXIT_PARSE,
                    msg: "--n and --size must be at least 1".into(),
                });
            }
            let c = gen_random_with(&GenParams {
                nvars: n,
                size,
                degree_cap: degree,
                mode: Mode::parse(&mode)?,
                seed,
                depth_cap: depth,
                field: ctx.field_or_default(),
            });
            write!(out, "{}", c.to_text()).map_err(wr)?;
            Ok(EXIT_OK)
        }
        Command::HittingDump {
            n,
            size,
            degree,
            depth,
            mode,
            budget,
            family,
        } => {
            let mut opts = budget.map_or_else(HittingOptions::default, HittingOptions::with_budget);
            opts.family = family;
            let h = hitting_set_nonassoc(n, size, degree, depth, Mode::parse(&mode)?, ctx.field_or_default(), &opts)?;
            if h.len() > opts.point_budget {
                return Err(Error::EnumerationCapExceeded {
                    needed: h.len(),
                    budget: opts.point_budget,
                }
                .into());
            }
            for (candidate, t, xs) in h.points() {
                let elements: Vec<String> = xs.iter().map(|x| x.dump()).collect();
                if ctx.json {
                    let p = DumpPoint { candidate, t, elements };
                    writeln!(out, "{}", serde_json::to_string(&p).expect("serializes")).map_err(wr)?;
                } else {
                    writeln!(out, "point candidate={candidate} t={t}").map_err(wr)?;
                    for (i, e) in elements.iter().enumerate() {
                        write!(out, "x{}:\n{e}", i + 1).map_err(wr)?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            corpus,
            seed,
            fault,
            budget,
        } => {
            let corpus = CorpusSize::parse(&corpus).ok_or_else(|| Failure {
                code: EXIT_PARSE,
                msg: format!("unknown corpus `{corpus}`, expected small or full"),
            })?;
            let cfg = SuiteConfig {
                corpus,
                seed,
                field: ctx.field_or_default(),
                fault,
                hitting: budget.map_or_else(HittingOptions::default, HittingOptions::with_budget),
            };
            let reports = verify_suite(&cfg);
            for r in &reports {
                // timings vary run to run, so they stay off stdout
                let _ = writeln!(err, "criterion {} took {:.2}s", r.id, r.elapsed.as_secs_f64());
                if ctx.json {
                    let line = ReportLine {
                        id: r.id,
                        name: r.name.to_string(),
                        passed: r.passed,
                        detail: r.detail.clone(),
                    };
                    writeln!(out, "{}", serde_json::to_string(&line).expect("serializes")).map_err(wr)?;
                } else {
                    writeln!(out, "{r}").map_err(wr)?;
                }
            }
            Ok(if reports.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::List => {
            writeln!(out, "strategies: {}", strategy_names().join(" ")).map_err(wr)?;
            writeln!(out, "weight families: {}", weight_family_names().join(" ")).map_err(wr)?;
            Ok(EXIT_OK)
        }
    }
}

fn run_strategy(name: &str, a: &PitArgs, ctx: &mut Ctx, out: &mut dyn Write) -> Result<i32, Failure> {
    let s = strategy(name)?;
    let c = ctx.load(&a.file)?;
    let v = s.test(&c, &pit_options(a))?;
    emit_verdict(out, &v, ctx.json)?;
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command,
/// returning the exit code. `stdin` backs the `-` file name.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let field = match cli.field.map(Field::new).transpose() {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_PARSE;
        }
    };
    let json = cli.json;
    let mut ctx = Ctx { field, json, stdin };
    match dispatch(cli, &mut ctx, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}
