//! Command-line interface: sequence inspection, Pell-equation solving, the
//! bound chain, the reduction procedures, the final search, and the
//! end-to-end reproduction pipeline.

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use pellbaker::arith::{rational_to_f64, RealExpr};
use pellbaker::bounds::chain::{self, Scenario};
use pellbaker::driver::{self, Config, ReportFormat, StageFilter};
use pellbaker::pelleq;
use pellbaker::reduce::{self, DPQuery, LLLInstance, ReduceError};
use pellbaker::search::{self, SearchBox, WitnessPair};
use pellbaker::sequences::{FamilyName, SequenceFamily};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(name = "pellbaker", version, about = "Verification toolkit for x-coordinates of Pell equations that are products of two binary-recurrence terms")]
struct Cli {
    /// Working precision in bits for ball arithmetic.
    #[arg(long, global = true, default_value_t = 192)]
    prec_bits: u32,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Key-value configuration file (flags win over file values).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print sequence terms and optionally verify the growth envelope.
    Seqs {
        #[arg(long, default_value = "pell")]
        family: FamilyName,
        /// Number of terms to print (indices 0..count).
        #[arg(long, default_value_t = 14)]
        count: u64,
        /// Verify alpha^(m-2) <= term(m) <= alpha^(m-1) for m up to this.
        #[arg(long)]
        growth_max: Option<u64>,
    },
    /// Solve x^2 - d y^2 = +-1 and print the fundamental solution.
    Pelleq {
        #[arg(long)]
        d: u64,
        /// Also print this many x-terms.
        #[arg(long, default_value_t = 8)]
        terms: usize,
    },
    /// Run the lemma chain for one scenario or all of them.
    Bounds {
        /// small-l4 | large-l4-large-m3 | large-l4-small-m3 (default: all).
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Reduction procedures.
    Reduce {
        #[command(subcommand)]
        op: ReduceOp,
    },
    /// Enumerate equations with two product solutions in an index box.
    Search {
        #[command(subcommand)]
        op: SearchOp,
    },
    /// Run the full pipeline and print the comparison report.
    Reproduce {
        #[arg(long, default_value = "text-table")]
        format: String,
        /// all | bounds-only | reduce-only | search-only.
        #[arg(long)]
        stages: Option<String>,
        /// Attach per-stage timings (makes output non-reproducible).
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Subcommand)]
enum ReduceOp {
    /// Certified continued-fraction expansion of an exact expression.
    Cf {
        /// e.g. "div(log(4), log(quad 1 1 2))" or the shorthand "log4/logalpha".
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 40)]
        depth: usize,
    },
    /// Smallest convergent denominator above M and the quotient maximum a(M).
    Legendre {
        #[arg(long, default_value = "log4/logalpha")]
        expr: String,
        /// Modulus M, scientific shorthand accepted (e.g. 3.8e85).
        #[arg(long)]
        modulus: String,
        /// Also apply the exponent reduction with this numerator c.
        #[arg(long)]
        coeff: Option<i64>,
    },
    /// Inhomogeneous reduction: w bound from eps = ||mu q|| - M ||tau q||.
    Dp {
        #[arg(long)]
        tau: String,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        m: String,
        #[arg(long, default_value_t = 10)]
        max_attempts: usize,
    },
    /// Certified lattice lower bound for a linear form instance file.
    Lll {
        /// File with one tau expression per line.
        #[arg(long)]
        linst: PathBuf,
        /// Common coefficient bound X (scientific shorthand accepted).
        #[arg(long)]
        x: String,
        /// Scaling constant C (default: the generic (tX)^(t+1)).
        #[arg(long)]
        c: Option<String>,
    },
}

#[derive(Subcommand)]
enum SearchOp {
    /// Inversion-based enumeration over the index box.
    TwoSolutions {
        #[arg(long, default_value = "pell")]
        family: FamilyName,
        #[arg(long, default_value_t = 200)]
        l1: u64,
        #[arg(long, default_value_t = 200)]
        m1: u64,
        #[arg(long, default_value_t = 120)]
        l2: u64,
        #[arg(long, default_value_t = 120)]
        m2: u64,
        #[arg(long, default_value_t = 150)]
        n2: u64,
    },
    /// Direct scan over squarefree d (independent oracle).
    DirectScan {
        #[arg(long, default_value = "pell")]
        family: FamilyName,
        #[arg(long, default_value_t = 1000)]
        dmax: u64,
        #[arg(long, default_value_t = 10)]
        nmax: u64,
        #[arg(long, default_value_t = 12)]
        lmax: u64,
    },
}

#[derive(Serialize)]
struct WitnessRecord {
    family: String,
    x1: String,
    epsilon: i8,
    n1: u64,
    n2: u64,
    l1: u64,
    m1: u64,
    l2: u64,
    m2: u64,
    x_n1: String,
    x_n2: String,
    d: String,
}

impl WitnessRecord {
    fn from(w: &WitnessPair) -> Self {
        WitnessRecord {
            family: w.family.to_string(),
            x1: w.x1.to_string(),
            epsilon: w.epsilon,
            n1: w.n1,
            n2: w.n2,
            l1: w.l1,
            m1: w.m1,
            l2: w.l2,
            m2: w.m2,
            x_n1: w.xn1.to_string(),
            x_n2: w.xn2.to_string(),
            d: w
                .d
                .as_ref()
                .map(|d| d.to_string())
                .unwrap_or_else(|| "unfactored".to_string()),
        }
    }
}

fn parse_expr(s: &str) -> Result<RealExpr, String> {
    if s == "log4/logalpha" {
        return Ok(RealExpr::log4_over_log_alpha());
    }
    RealExpr::from_str(s)
}

fn witnesses_jsonl(ws: &[WitnessPair]) -> String {
    let mut out = String::new();
    for w in ws {
        out.push_str(&serde_json::to_string(&WitnessRecord::from(w)).unwrap());
        out.push('\n');
    }
    out
}

fn run(cli: &Cli) -> Result<(String, bool), String> {
    match &cli.command {
        Command::Seqs {
            family,
            count,
            growth_max,
        } => {
            let fam = SequenceFamily::get(*family);
            let mut out = String::new();
            let terms: Vec<String> = (0..=*count).map(|m| fam.term(m).to_string()).collect();
            out.push_str(&format!("{}: {}\n", family, terms.join(", ")));
            if let Some(max) = growth_max {
                for m in 1..=*max {
                    if !fam.growth_check(m).map_err(|e| e.to_string())? {
                        return Err(format!("growth envelope fails at m = {}", m));
                    }
                }
                out.push_str(&format!("growth envelope verified for m <= {}\n", max));
            }
            Ok((out, true))
        }
        Command::Pelleq { d, terms } => {
            let fund =
                pelleq::fundamental_solution(&BigInt::from(*d)).map_err(|e| e.to_string())?;
            let mut out = format!(
                "d = {}: x1 = {}, y1 = {}, epsilon = {:+}\n",
                fund.d, fund.x1, fund.y1, fund.epsilon
            );
            if *terms > 0 {
                let xs: Vec<String> = (1..=*terms as u64)
                    .map(|n| pelleq::x_term_at(&fund.x1, fund.epsilon, n).to_string())
                    .collect();
                out.push_str(&format!("x terms: {}\n", xs.join(", ")));
            }
            Ok((out, true))
        }
        Command::Bounds { scenario } => {
            let scenarios: Vec<Scenario> = match scenario {
                Some(tok) => vec![tok.parse()?],
                None => Scenario::all().to_vec(),
            };
            let mut out = String::new();
            let mut ok = true;
            for sc in scenarios {
                let bounds =
                    chain::lemma_chain(sc, cli.prec_bits).map_err(|e| e.to_string())?;
                out.push_str(&format!(
                    "scenario {}: certified ceiling {} (published {:e})\n",
                    sc.token(),
                    bounds.ceiling,
                    bounds.published_ceiling_f64
                ));
                for st in &bounds.stages {
                    if st.certified == Some(false) {
                        ok = false;
                    }
                    out.push_str(&format!(
                        "  {:<44} {:<12?} {}\n",
                        st.name, st.role, st.computed
                    ));
                }
            }
            Ok((out, ok))
        }
        Command::Reduce { op } => run_reduce(cli, op),
        Command::Search { op } => {
            let ws = match op {
                SearchOp::TwoSolutions {
                    family,
                    l1,
                    m1,
                    l2,
                    m2,
                    n2,
                } => search::find_witnesses(&SearchBox::new(*family, *l1, *m1, *l2, *m2, *n2)),
                SearchOp::DirectScan {
                    family,
                    dmax,
                    nmax,
                    lmax,
                } => search::direct_d_scan(*family, *dmax, *nmax, *lmax),
            };
            Ok((witnesses_jsonl(&ws), true))
        }
        Command::Reproduce {
            format,
            stages,
            timings,
        } => {
            let mut cfg = match &cli.config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
                    Config::from_kv_text(&text)?
                }
                None => Config::default(),
            };
            cfg.prec_bits = cli.prec_bits;
            if let Some(s) = stages {
                cfg.stages = StageFilter::from_str(s)?;
            }
            if *timings {
                cfg.timings = true;
            }
            let report = driver::run_pipeline(&cfg);
            let fmt = ReportFormat::from_str(format)?;
            let ok = report.all_verdicts_ok();
            Ok((driver::emit_report(&report, fmt), ok))
        }
    }
}

fn run_reduce(_cli: &Cli, op: &ReduceOp) -> Result<(String, bool), String> {
    match op {
        ReduceOp::Cf { expr, depth } => {
            let e = parse_expr(expr)?;
            match reduce::cf_expand(&e, *depth) {
                Ok(cf) => {
                    let qs: Vec<String> =
                        cf.quotients.iter().map(|a| a.to_string()).collect();
                    let (p, q) = cf.convergents.last().unwrap();
                    Ok((
                        format!(
                            "quotients: [{}]\nlast convergent: {}/{}\n",
                            qs.join(", "),
                            p,
                            q
                        ),
                        true,
                    ))
                }
                Err(ReduceError::Terminated(qs)) => {
                    let qs: Vec<String> = qs.iter().map(|a| a.to_string()).collect();
                    Ok((
                        format!("rational value; complete expansion: [{}]\n", qs.join(", ")),
                        true,
                    ))
                }
                Err(e) => Err(e.to_string()),
            }
        }
        ReduceOp::Legendre {
            expr,
            modulus,
            coeff,
        } => {
            let e = parse_expr(expr)?;
            let m = driver::parse_big_decimal(modulus)?;
            let mut cf = reduce::cf_expand(&e, 16).map_err(|x| x.to_string())?;
            let (n, am) = reduce::legendre_bound(&mut cf, &m).map_err(|x| x.to_string())?;
            let mut out = format!("a(M) = {} at convergent index {}\n", am, n);
            if let Some(c) = coeff {
                let l = reduce::legendre_apply(
                    &am,
                    &BigRational::from_integer(BigInt::from(*c)),
                    &m,
                )
                .map_err(|x| x.to_string())?;
                out.push_str(&format!("exponent bound: {}\n", l));
            }
            Ok((out, true))
        }
        ReduceOp::Dp {
            tau,
            mu,
            a,
            b,
            m,
            max_attempts,
        } => {
            let query = DPQuery {
                tau: parse_expr(tau)?,
                mu: parse_expr(mu)?,
                a: parse_expr(a)?,
                b: parse_expr(b)?,
                m: driver::parse_big_decimal(m)?,
                max_attempts: *max_attempts,
            };
            let res = reduce::dp_reduce(&query).map_err(|x| x.to_string())?;
            Ok((
                format!(
                    "w_max = {} (convergent denominator {}, eps = {})\n",
                    res.w_max,
                    res.q,
                    res.epsilon.to_sci_string()
                ),
                true,
            ))
        }
        ReduceOp::Lll { linst, x, c } => {
            let text = std::fs::read_to_string(linst).map_err(|e| e.to_string())?;
            let taus: Vec<RealExpr> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(parse_expr)
                .collect::<Result<_, _>>()?;
            if taus.len() < 2 {
                return Err("instance file needs at least two tau lines".into());
            }
            let xb = driver::parse_big_decimal(x)?;
            let xs = vec![xb; taus.len()];
            let c = match c {
                Some(s) => driver::parse_big_decimal(s)?,
                None => reduce::lll::default_scaling(taus.len(), &xs),
            };
            let inst = LLLInstance { tau: taus, x: xs, c };
            let out = reduce::lll_form_lower_bound(&inst).map_err(|e| e.to_string())?;
            Ok((
                format!(
                    "lower bound: {:e} (exact {}/{})\n",
                    rational_to_f64(&out.bound),
                    out.bound.numer(),
                    out.bound.denom()
                ),
                true,
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    match run(&cli) {
        Ok((output, ok)) => {
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &output) {
                        eprintln!("error writing {}: {}", path.display(), e);
                        return ExitCode::from(2);
                    }
                }
                None => print!("{}", output),
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}
